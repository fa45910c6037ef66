//! Two-mode Hopfield polaritons.
//!
//! A single probe mode `a` (frequency `omega`) coupled to the collective
//! exciton `B0` of a two-level medium (transition `omega0`) through
//! `G (a + a†)(B0 + B0†)`, counter-rotating terms included. The Bogoliubov
//! transformation `c_k = x1 a + y1 a† + x2 B0 + y2 B0†` diagonalizes it into two
//! polariton modes with frequencies `Omega_1 <= Omega_2`.
//!
//! Coefficient conventions: `u_j = x_j - y_j`, `v_j = x_j + y_j`. The photon
//! field operator decomposes as `a + a† = sum_k u1^k (c_k + c_k†)`, so `u1` of a
//! mode is its coupling weight to anything that couples to the probe field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probe frequency, medium transition frequency and collective coupling
/// (all in one frequency unit, hbar = 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LightMediumParams {
    omega: f64,
    omega0: f64,
    coupling: f64,
}

impl LightMediumParams {
    pub fn new(omega: f64, omega0: f64, coupling: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: format!("must be finite and > 0, got {omega}"),
            });
        }
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "omega0",
                reason: format!("must be finite and > 0, got {omega0}"),
            });
        }
        if !(coupling.is_finite() && coupling >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "G",
                reason: format!("must be finite and >= 0, got {coupling}"),
            });
        }
        let bound = stability_bound(omega, omega0);
        if coupling >= bound {
            return Err(Error::StabilityViolation { coupling, bound });
        }
        Ok(Self {
            omega,
            omega0,
            coupling,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// Largest admissible coupling for these frequencies (exclusive).
    pub fn stability_bound(&self) -> f64 {
        stability_bound(self.omega, self.omega0)
    }

    /// Index (0 or 1) of the polariton branch that connects continuously to
    /// the bare photon as G -> 0. At exact resonance the lower branch is used.
    pub fn photon_like_index(&self) -> usize {
        if self.omega > self.omega0 {
            1
        } else {
            0
        }
    }
}

/// `sqrt(omega * omega0) / 2`; the lower polariton frequency goes imaginary
/// at and beyond this coupling.
pub fn stability_bound(omega: f64, omega0: f64) -> f64 {
    0.5 * (omega * omega0).sqrt()
}

/// One polariton branch: frequency and the eight Bogoliubov coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolaritonMode {
    pub frequency: f64,
    pub u1: f64,
    pub u2: f64,
    pub v1: f64,
    pub v2: f64,
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    pub y2: f64,
}

impl PolaritonMode {
    fn from_uv(frequency: f64, u1: f64, u2: f64, v1: f64, v2: f64) -> Self {
        Self {
            frequency,
            u1,
            u2,
            v1,
            v2,
            x1: 0.5 * (v1 + u1),
            x2: 0.5 * (v2 + u2),
            y1: 0.5 * (v1 - u1),
            y2: 0.5 * (v2 - u2),
        }
    }

    /// Photon fraction `|x1|^2 - |y1|^2 = u1 v1`; the exciton fraction is
    /// `u2 v2` and the two sum to one for a canonical mode.
    pub fn photon_fraction(&self) -> f64 {
        self.x1 * self.x1 - self.y1 * self.y1
    }

    /// `[c, c†]` from the stored x/y coefficients.
    pub fn self_commutator(&self) -> f64 {
        self.x1 * self.x1 - self.y1 * self.y1 + self.x2 * self.x2 - self.y2 * self.y2
    }
}

/// Both polariton branches, ordered by frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolaritonBasis {
    pub mode1: PolaritonMode,
    pub mode2: PolaritonMode,
    pub params: LightMediumParams,
}

impl PolaritonBasis {
    pub fn mode(&self, index: usize) -> &PolaritonMode {
        match index {
            0 => &self.mode1,
            _ => &self.mode2,
        }
    }

    /// The branch continuously connected to the bare photon.
    pub fn photon_like(&self) -> &PolaritonMode {
        self.mode(self.params.photon_like_index())
    }

    /// The branch continuously connected to the bare exciton.
    pub fn exciton_like(&self) -> &PolaritonMode {
        self.mode(1 - self.params.photon_like_index())
    }

    /// `[c1, c2†]` through the coefficients.
    pub fn cross_commutator(&self) -> f64 {
        let (a, b) = (&self.mode1, &self.mode2);
        a.x1 * b.x1 - a.y1 * b.y1 + a.x2 * b.x2 - a.y2 * b.y2
    }

    /// `[c1, c2]` through the coefficients.
    pub fn cross_anomalous_commutator(&self) -> f64 {
        let (a, b) = (&self.mode1, &self.mode2);
        a.x1 * b.y1 - a.y1 * b.x1 + a.x2 * b.y2 - a.y2 * b.x2
    }
}

/// Squared polariton frequencies and the shifts `Omega_k^2 - omega^2`, evaluated
/// without catastrophic cancellation near G = 0 and near the stability bound.
struct SquaredSpectrum {
    lower: f64,
    upper: f64,
    lower_shift: f64,
    upper_shift: f64,
}

fn squared_spectrum(p: &LightMediumParams) -> SquaredSpectrum {
    let (w, w0, g) = (p.omega, p.omega0, p.coupling);
    let detuning = w0 * w0 - w * w;
    let mixing = 16.0 * w * w0 * g * g;
    let disc = (detuning * detuning + mixing).sqrt();

    let upper = 0.5 * (w * w + w0 * w0 + disc);
    // product of the roots: omega^2 omega0^2 - 4 omega omega0 G^2
    let lower = w * w0 * (w * w0 - 4.0 * g * g) / upper;

    let lower_shift = if detuning > 0.0 {
        -0.5 * mixing / (detuning + disc)
    } else {
        0.5 * (detuning - disc)
    };
    let upper_shift = if detuning < 0.0 {
        0.5 * mixing / (disc - detuning)
    } else {
        0.5 * (detuning + disc)
    };
    SquaredSpectrum {
        lower,
        upper,
        lower_shift,
        upper_shift,
    }
}

/// Polariton frequencies `(Omega_1, Omega_2)` with `Omega_1 <= Omega_2`.
pub fn frequencies(params: &LightMediumParams) -> (f64, f64) {
    let s = squared_spectrum(params);
    (s.lower.sqrt(), s.upper.sqrt())
}

/// Diagonalize the light-medium Hamiltonian into its two polariton modes.
///
/// At G = 0 the coefficients are set by continuity: the branch at `omega`
/// is the pure photon (`u1 = v1 = 1`), the other the pure exciton. Each mode
/// carries an overall sign such that its dominant component is positive.
pub fn diagonalize(params: &LightMediumParams) -> PolaritonBasis {
    let s = squared_spectrum(params);
    let photon_index = params.photon_like_index();
    let (w, w0, g) = (params.omega, params.omega0, params.coupling);

    let build = |index: usize, omega_sq: f64, shift: f64| -> PolaritonMode {
        let freq = omega_sq.sqrt();
        let photon_like = index == photon_index;
        if g == 0.0 {
            return if photon_like {
                PolaritonMode::from_uv(freq, 1.0, 0.0, 1.0, 0.0)
            } else {
                PolaritonMode::from_uv(freq, 0.0, 1.0, 0.0, 1.0)
            };
        }
        // From [c_k, H] = Omega_k c_k:
        //   u1 = (omega / Omega) v1,  v2 = (Omega^2 - omega^2) v1 / (2 G omega0),
        //   u2 = (omega0 / Omega) v2, and u1 v1 + u2 v2 = 1 fixes v1.
        let v1 = (4.0 * g * g * freq * w0 / (shift * shift + 4.0 * w * w0 * g * g)).sqrt();
        let u1 = w * v1 / freq;
        let v2 = shift * v1 / (2.0 * g * w0);
        let u2 = w0 * v2 / freq;
        let flip = if photon_like { v1 < 0.0 } else { v2 < 0.0 };
        let sign = if flip { -1.0 } else { 1.0 };
        PolaritonMode::from_uv(freq, sign * u1, sign * u2, sign * v1, sign * v2)
    };

    PolaritonBasis {
        mode1: build(0, s.lower, s.lower_shift),
        mode2: build(1, s.upper, s.upper_shift),
        params: *params,
    }
}

/// Largest deviation from the four bosonic commutation conditions
/// `[c_k, c_k†] = 1`, `[c1, c2†] = 0`, `[c1, c2] = 0`.
pub fn canonical_residual(basis: &PolaritonBasis) -> f64 {
    [
        (basis.mode1.self_commutator() - 1.0).abs(),
        (basis.mode2.self_commutator() - 1.0).abs(),
        basis.cross_commutator().abs(),
        basis.cross_anomalous_commutator().abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    prop_compose! {
        fn stable_params()(omega in 0.1f64..10.0, omega0 in 0.1f64..10.0, frac in 0.0f64..0.99)
            -> LightMediumParams {
            LightMediumParams::new(omega, omega0, frac * stability_bound(omega, omega0)).unwrap()
        }
    }

    proptest! {
        #[test]
        fn canonical_basis(p in stable_params()) {
            let b = diagonalize(&p);
            prop_assert!(canonical_residual(&b) < 1e-10);
            prop_assert!(b.cross_commutator().abs() < 1e-10);
            prop_assert!(b.cross_anomalous_commutator().abs() < 1e-10);
            prop_assert!(b.mode1.frequency <= b.mode2.frequency);
            prop_assert!(b.mode1.frequency > 0.0);
        }

        #[test]
        fn unstable_coupling_rejected(omega in 0.1f64..10.0, omega0 in 0.1f64..10.0, frac in 1.0f64..3.0) {
            let g = frac * stability_bound(omega, omega0);
            let rejected = matches!(
                LightMediumParams::new(omega, omega0, g),
                Err(Error::StabilityViolation { .. })
            );
            prop_assert!(rejected);
        }
    }
}
