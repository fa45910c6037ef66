//! n-photon transmission efficiency `F_n = |<n, 0|_pol |n, 0>_bare|^2`.
//!
//! The light-medium Hamiltonian is rewritten as two coupled oscillators of
//! equal mass `m` with potential `(A x1^2 + B x2^2 + C x1 x2) / 2`. A rotation
//! by `alpha/2` decouples it; a second rotation by `beta/2` diagonalizes the
//! Gaussian part of the overlap integrand. The Hermite factors become a
//! bivariate polynomial in the rotated coordinates and every monomial is
//! integrated exactly with the Gaussian moment formula.
//!
//! Index 1 of the normal coordinates (`y1`, `K1`, `b1`) is the branch that
//! connects to the bare photon coordinate `x1` as `G -> 0`; at exact resonance
//! it is the lower branch.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::{build_light_medium, exact_eigensystem, overlap, Eigensystem, ModeSpec};
use crate::hopfield::{self, LightMediumParams};

pub const DEFAULT_MAX_PHOTONS: usize = 6;
pub const DEFAULT_MASS: f64 = 1.0;

/// The light-medium system as two coupled oscillators of equal mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillatorForm {
    pub mass: f64,
    /// `A = m omega^2`
    pub photon_stiffness: f64,
    /// `B = m omega0^2`
    pub exciton_stiffness: f64,
    /// `C = 4 G m sqrt(omega omega0)`
    pub coupling: f64,
}

impl OscillatorForm {
    pub fn new(params: &LightMediumParams, mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter {
                name: "mass",
                reason: format!("must be finite and > 0, got {mass}"),
            });
        }
        let (w, w0, g) = (params.omega(), params.omega0(), params.coupling());
        let form = Self {
            mass,
            photon_stiffness: mass * w * w,
            exciton_stiffness: mass * w0 * w0,
            coupling: 4.0 * g * mass * (w * w0).sqrt(),
        };
        if !form.is_positive_definite() {
            return Err(Error::StabilityViolation {
                coupling: g,
                bound: params.stability_bound(),
            });
        }
        Ok(form)
    }

    /// `4AB > C^2`.
    pub fn is_positive_definite(&self) -> bool {
        4.0 * self.photon_stiffness * self.exciton_stiffness > self.coupling * self.coupling
    }
}

/// Rotation angles, normal-mode stiffnesses, Gaussian widths and the
/// quadratic form of the overlap integrand.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationData {
    pub alpha: f64,
    pub beta: f64,
    pub k1: f64,
    pub k2: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub w1: f64,
    pub w2: f64,
}

/// Angle of the rotation diagonalizing `[[d1, off/2], [off/2, d2]]`:
/// `tan(angle) = off / (d2 - d1)` on the principal branch, `pi/2 sign(off)`
/// when the diagonal is degenerate. Returns `(angle, signed splitting)` where
/// the splitting is `sign(d2 - d1) sqrt((d2 - d1)^2 + off^2)` (positive sign
/// at degeneracy), so that the rotated diagonal is `(d1 + d2 -/+ splitting)/2`.
fn principal_rotation(d1: f64, d2: f64, off: f64) -> (f64, f64) {
    let gap = d2 - d1;
    let magnitude = gap.hypot(off);
    if gap == 0.0 {
        (FRAC_PI_2 * sign_or_zero(off), magnitude)
    } else {
        ((off / gap).atan(), gap.signum() * magnitude)
    }
}

fn sign_or_zero(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn rotation_data(params: &LightMediumParams, mass: f64) -> Result<RotationData> {
    let form = OscillatorForm::new(params, mass)?;
    let (a, b, c) = (form.photon_stiffness, form.exciton_stiffness, form.coupling);

    let (alpha, k) = principal_rotation(a, b, c);
    let k1 = 0.5 * (a + b - k);
    let k2 = 0.5 * (a + b + k);

    // hbar = 1
    let a1 = (mass * a).powf(0.25);
    let a2 = (mass * b).powf(0.25);
    let b1 = (mass * k1).powf(0.25);
    let b2 = (mass * k2).powf(0.25);

    let (ch, sh) = ((0.5 * alpha).cos(), (0.5 * alpha).sin());
    let p = b1 * b1 * ch * ch + b2 * b2 * sh * sh + a1 * a1;
    let q = b1 * b1 * sh * sh + b2 * b2 * ch * ch + a2 * a2;
    let r = 2.0 * (b2 * b2 - b1 * b1) * ch * sh;

    let (beta, s) = principal_rotation(p, q, r);
    let w1 = 0.5 * (p + q - s);
    let w2 = 0.5 * (p + q + s);

    Ok(RotationData {
        alpha,
        beta,
        k1,
        k2,
        a1,
        a2,
        b1,
        b2,
        p,
        q,
        r,
        w1,
        w2,
    })
}

/// Coefficients of the physicists' Hermite polynomial `H_n` in ascending powers.
pub fn hermite_coefficients(n: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 2.0];
    for k in 1..n {
        // H_{k+1} = 2t H_k - 2k H_{k-1}
        let mut next = vec![0.0; k + 2];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= 2.0 * k as f64 * c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// `int t^n exp(-rho t^2) dt = (1 + (-1)^n)/2 rho^{-(n+1)/2} Gamma((n+1)/2)`.
pub fn gaussian_moment(n: usize, rho: f64) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    // Gamma(k + 1/2) = (k - 1/2) Gamma(k - 1/2), Gamma(1/2) = sqrt(pi)
    let k = n / 2;
    let mut gamma = PI.sqrt();
    for j in 0..k {
        gamma *= j as f64 + 0.5;
    }
    gamma * rho.powf(-0.5 * (n as f64 + 1.0))
}

/// Dense bivariate polynomial, `coeffs[i][j]` multiplies `z1^i z2^j`.
#[derive(Clone, Debug)]
struct Bivariate {
    coeffs: Vec<Vec<f64>>,
}

impl Bivariate {
    /// `H_n(scale * (c1 z1 + c2 z2))`.
    fn hermite_of_linear(n: usize, scale: f64, c1: f64, c2: f64) -> Self {
        let h = hermite_coefficients(n);
        let mut coeffs = vec![vec![0.0; n + 1]; n + 1];
        for (k, &hk) in h.iter().enumerate() {
            if hk == 0.0 {
                continue;
            }
            let lead = hk * scale.powi(k as i32);
            let mut binom = 1.0;
            for i in 0..=k {
                coeffs[i][k - i] += lead * binom * c1.powi(i as i32) * c2.powi((k - i) as i32);
                binom = binom * (k - i) as f64 / (i + 1) as f64;
            }
        }
        Self { coeffs }
    }

    fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![vec![0.0; n]; n];
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (k, row2) in other.coeffs.iter().enumerate() {
                    for (l, &b) in row2.iter().enumerate() {
                        coeffs[i + k][j + l] += a * b;
                    }
                }
            }
        }
        Self { coeffs }
    }

    /// `int int p(z1, z2) exp(-(w1 z1^2 + w2 z2^2)/2) dz1 dz2`.
    fn gaussian_integral(&self, w1: f64, w2: f64) -> f64 {
        let mut total = 0.0;
        for (i, row) in self.coeffs.iter().enumerate() {
            if i % 2 == 1 {
                continue;
            }
            let m1 = gaussian_moment(i, 0.5 * w1);
            for (j, &c) in row.iter().enumerate() {
                if c != 0.0 && j % 2 == 0 {
                    total += c * m1 * gaussian_moment(j, 0.5 * w2);
                }
            }
        }
        total
    }
}

fn oscillator_norm(width: f64, n: usize) -> f64 {
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    (width / (PI.sqrt() * 2f64.powi(n as i32) * factorial)).sqrt()
}

/// Controls for the analytic transfer routine.
#[derive(Clone, Copy, Debug)]
pub struct TransferOptions {
    pub mass: f64,
    pub max_photons: usize,
}

impl Default for TransferOptions {
    fn default() -> Self {
        Self {
            mass: DEFAULT_MASS,
            max_photons: DEFAULT_MAX_PHOTONS,
        }
    }
}

/// The overlap amplitude `S_n0` itself (real, sign convention of the
/// coordinate wavefunctions).
pub fn transfer_amplitude(
    n: usize,
    params: &LightMediumParams,
    options: &TransferOptions,
) -> Result<f64> {
    if n > options.max_photons {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!(
                "photon number {n} exceeds the maximum {}",
                options.max_photons
            ),
        });
    }
    let rot = rotation_data(params, options.mass)?;
    if params.coupling() == 0.0 {
        // the polariton wavefunction is the bare one
        return Ok(1.0);
    }
    let (cb, sb) = ((0.5 * rot.beta).cos(), (0.5 * rot.beta).sin());
    let (cd, sd) = (
        (0.5 * (rot.alpha - rot.beta)).cos(),
        (0.5 * (rot.alpha - rot.beta)).sin(),
    );
    // x1 = cos(beta/2) z1 + sin(beta/2) z2
    // y1 = cos((alpha-beta)/2) z1 - sin((alpha-beta)/2) z2
    let bare = Bivariate::hermite_of_linear(n, rot.a1, cb, sb);
    let dressed = Bivariate::hermite_of_linear(n, rot.b1, cd, -sd);
    let integral = bare.mul(&dressed).gaussian_integral(rot.w1, rot.w2);
    let norm = oscillator_norm(rot.a1, n)
        * oscillator_norm(rot.a2, 0)
        * oscillator_norm(rot.b1, n)
        * oscillator_norm(rot.b2, 0);
    Ok(norm * integral)
}

/// `F_n` with default mass and photon-number limit.
pub fn transmission_efficiency(n: usize, params: &LightMediumParams) -> Result<f64> {
    transmission_efficiency_with(n, params, &TransferOptions::default())
}

pub fn transmission_efficiency_with(
    n: usize,
    params: &LightMediumParams,
    options: &TransferOptions,
) -> Result<f64> {
    let s = transfer_amplitude(n, params, options)?;
    Ok((s * s).min(1.0))
}

/// Closed form of `F_1`:
/// `|4 sqrt(a1^3 a2 b1^3 b2 / (W1 W2)) [cos((alpha-beta)/2) cos(beta/2) / W1
///  - sin((alpha-beta)/2) sin(beta/2) / W2]|^2`.
pub fn f1_closed_form(params: &LightMediumParams) -> Result<f64> {
    let r = rotation_data(params, DEFAULT_MASS)?;
    let half_beta = 0.5 * r.beta;
    let half_diff = 0.5 * (r.alpha - r.beta);
    let prefactor = 4.0 * (r.a1.powi(3) * r.a2 * r.b1.powi(3) * r.b2 / (r.w1 * r.w2)).sqrt();
    let bracket =
        half_diff.cos() * half_beta.cos() / r.w1 - half_diff.sin() * half_beta.sin() / r.w2;
    let s = prefactor * bracket;
    Ok(s * s)
}

/// `F_n` from a truncated Fock-space diagonalization of the light-medium
/// Hamiltonian: the overlap of the bare state `|n>_a |0>_B` with the
/// eigenvector at energy `E_0 + n Omega_photon`.
#[derive(Clone, Debug)]
pub struct FockTransferOracle {
    params: LightMediumParams,
    spec: ModeSpec,
    eigen: Eigensystem,
}

impl FockTransferOracle {
    pub fn new(params: &LightMediumParams, cutoff: usize) -> Result<Self> {
        let spec = ModeSpec::new(&[cutoff, cutoff])?;
        let h = build_light_medium(params, &spec)?;
        let eigen = exact_eigensystem(&h)?;
        Ok(Self {
            params: *params,
            spec,
            eigen,
        })
    }

    pub fn eigensystem(&self) -> &Eigensystem {
        &self.eigen
    }

    /// Eigenvector index of the polariton state with `n_photon` quanta in the
    /// photon-like branch and `n_exciton` in the other.
    pub fn polariton_index(&self, n_photon: usize, n_exciton: usize) -> Result<usize> {
        let (lower, upper) = hopfield::frequencies(&self.params);
        let (photon, exciton) = if self.params.photon_like_index() == 0 {
            (lower, upper)
        } else {
            (upper, lower)
        };
        if n_photon == 0 && n_exciton == 0 {
            return Ok(0);
        }
        let target = self.eigen.values[0] + n_photon as f64 * photon + n_exciton as f64 * exciton;
        // Degenerate only when G = 0 at resonance, or by accidental
        // commensurability of the two branches.
        let separation = 1e-9 * (photon + exciton);
        self.eigen
            .isolated_near(target, separation)
            .ok_or(Error::StateNotResolved(n_photon, n_exciton))
    }

    pub fn efficiency(&self, n: usize) -> Result<f64> {
        let bare = self.spec.basis_state(&[n, 0])?;
        let index = self.polariton_index(n, 0)?;
        Ok(overlap(&self.eigen.state(index), &bare)?.norm_sqr())
    }
}

/// One row of the coupling sweep of `F_1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyRow {
    pub omega0_ratio: f64,
    pub coupling: f64,
    pub efficiency: f64,
}

/// `F_n` over every `(omega0/omega, G/omega)` pair with `omega = 1`. All pairs
/// are validated before any is evaluated.
pub fn efficiency_sweep(n: usize, ratios: &[f64], couplings: &[f64]) -> Result<Vec<EfficiencyRow>> {
    let mut jobs = Vec::with_capacity(ratios.len() * couplings.len());
    for &ratio in ratios {
        for &g in couplings {
            jobs.push((ratio, LightMediumParams::new(1.0, ratio, g)?));
        }
    }
    jobs.par_iter()
        .map(|(ratio, p)| {
            Ok(EfficiencyRow {
                omega0_ratio: *ratio,
                coupling: p.coupling(),
                efficiency: transmission_efficiency(n, p)?,
            })
        })
        .collect()
}

/// `F_1` versus coupling for several detunings.
pub fn fig3_sweep(ratios: &[f64], couplings: &[f64]) -> Result<Vec<EfficiencyRow>> {
    efficiency_sweep(1, ratios, couplings)
}

/// CSV with columns `omega0_ratio,G,F1`.
pub fn efficiency_csv(rows: &[EfficiencyRow]) -> String {
    let mut out = String::from("omega0_ratio,G,F1\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            r.omega0_ratio, r.coupling, r.efficiency
        ));
    }
    out
}
