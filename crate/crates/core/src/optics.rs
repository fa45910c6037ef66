//! Linear response of the dressed probe: steady state of the damped
//! Heisenberg equations for `(A, C', c2)` driven by a classical `<c1>`, the
//! complex susceptibility and its transparency window.

use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eit_dark::EitContext;
use crate::error::{Error, Result};
use crate::fockspace::C64;
use crate::hopfield::{self, diagonalize, LightMediumParams, PolaritonBasis};

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRates {
    /// Excited level `|e>`.
    pub gamma_a: f64,
    /// Spin coherence `|g2>`.
    pub gamma_c: f64,
    /// Off-resonant polariton `c2`.
    pub gamma_c2: f64,
}

impl DecayRates {
    pub fn new(gamma_a: f64, gamma_c: f64, gamma_c2: f64) -> Result<Self> {
        let rates = Self {
            gamma_a,
            gamma_c,
            gamma_c2,
        };
        rates.validate()?;
        Ok(rates)
    }

    fn validate(&self) -> Result<()> {
        let ok = self.gamma_a.is_finite()
            && self.gamma_a > 0.0
            && self.gamma_c.is_finite()
            && self.gamma_c >= 0.0
            && self.gamma_c2.is_finite()
            && self.gamma_c2 >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "decay rates",
                reason: format!("need gamma_A > 0, gamma_C >= 0, gamma_c2 >= 0, got {self:?}"),
            })
        }
    }

    /// Notes on departures from `gamma_A >> gamma_C >> gamma_c2`. These are
    /// allowed; the ordering is only the regime the model is meant for.
    pub fn regime_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.gamma_c >= self.gamma_a {
            out.push(format!(
                "gamma_C = {} is not below gamma_A = {}",
                self.gamma_c, self.gamma_a
            ));
        }
        if self.gamma_c2 >= self.gamma_c && self.gamma_c > 0.0 {
            out.push(format!(
                "gamma_c2 = {} is not below gamma_C = {}",
                self.gamma_c2, self.gamma_c
            ));
        }
        out
    }
}

/// Everything the steady-state response depends on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeContext {
    pub xi: f64,
    pub delta_cap: f64,
    pub omega2_tilde: f64,
    pub u1: f64,
    pub u2: f64,
    /// Collective probe coupling `g sqrt(N)`.
    pub g_root_n: f64,
    /// Bare photon frequency, which sets `F = 2 g^2 N / omega`.
    pub omega: f64,
    /// Two-photon detuning of `c1` from the Raman resonance.
    pub delta: f64,
    pub decay: DecayRates,
}

impl ProbeContext {
    pub fn new(
        xi: f64,
        delta_cap: f64,
        omega2_tilde: f64,
        u1: f64,
        u2: f64,
        g_root_n: f64,
        omega: f64,
        delta: f64,
        decay: DecayRates,
    ) -> Result<Self> {
        let ctx = Self {
            xi,
            delta_cap,
            omega2_tilde,
            u1,
            u2,
            g_root_n,
            omega,
            delta,
            decay,
        };
        let finite = [xi, delta_cap, omega2_tilde, u1, u2, g_root_n, omega, delta];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "probe context",
                reason: "all parameters must be finite".into(),
            });
        }
        if omega <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: format!("must be > 0, got {omega}"),
            });
        }
        if xi < 0.0 || g_root_n < 0.0 {
            return Err(Error::InvalidParameter {
                name: "xi/g_root_N",
                reason: "must be >= 0".into(),
            });
        }
        decay.validate()?;
        Ok(ctx)
    }

    /// Coefficients from a Hopfield basis, `c1` being its photon-like mode.
    pub fn from_basis(
        basis: &PolaritonBasis,
        xi: f64,
        delta_cap: f64,
        g_root_n: f64,
        delta: f64,
        decay: DecayRates,
    ) -> Result<Self> {
        let resonant = basis.photon_like();
        let other = basis.exciton_like();
        Self::new(
            xi,
            delta_cap,
            other.frequency - resonant.frequency,
            resonant.u1,
            other.u1,
            g_root_n,
            basis.params.omega(),
            delta,
            decay,
        )
    }

    pub fn from_eit(eit: &EitContext, omega: f64, delta: f64, decay: DecayRates) -> Result<Self> {
        Self::new(
            eit.xi,
            eit.delta_cap,
            eit.omega2_tilde,
            eit.u1,
            eit.u2,
            eit.g * (eit.atom_count as f64).sqrt(),
            omega,
            delta,
            decay,
        )
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        Self { delta, ..*self }
    }

    /// `Gamma_C - i delta`.
    pub fn alpha(&self) -> C64 {
        C64::new(self.decay.gamma_c, -self.delta)
    }

    /// `Gamma_c2 + i omega2_tilde`.
    pub fn beta(&self) -> C64 {
        C64::new(self.decay.gamma_c2, self.omega2_tilde)
    }

    /// `F = 2 g^2 N / omega`.
    pub fn prefactor(&self) -> f64 {
        2.0 * self.g_root_n * self.g_root_n / self.omega
    }

    /// `g^2 u2^2 N`.
    fn spectator_shift(&self) -> f64 {
        (self.g_root_n * self.u2).powi(2)
    }

    /// `alpha beta (Gamma_A + i Delta) + beta xi^2 + alpha g^2 u2^2 N`, checked
    /// against the size of its terms.
    fn denominator(&self) -> Result<C64> {
        let (a, b) = (self.alpha(), self.beta());
        let terms = [
            a * b * C64::new(self.decay.gamma_a, self.delta_cap),
            b * self.xi * self.xi,
            a * self.spectator_shift(),
        ];
        let d = terms[0] + terms[1] + terms[2];
        let scale: f64 = terms.iter().map(|t| t.norm()).sum();
        if !(d.norm() > 1e-300 * scale) || d.norm() == 0.0 {
            return Err(Error::SingularResponse {
                magnitude: d.norm(),
            });
        }
        Ok(d)
    }

    /// Drift matrix `M` and drive `b` of `d/dt (A, C', c2) = M y + b`.
    fn linear_system(&self, c1: C64) -> (Matrix3<C64>, Vector3<C64>) {
        let w2 = self.g_root_n * self.u2;
        let zero = C64::new(0.0, 0.0);
        #[rustfmt::skip]
        let m = Matrix3::new(
            -C64::new(self.decay.gamma_a, self.delta_cap), -I * self.xi, -I * w2,
            -I * self.xi, C64::new(-self.decay.gamma_c, self.delta), zero,
            -I * w2, zero, -C64::new(self.decay.gamma_c2, self.omega2_tilde),
        );
        let b = Vector3::new(-I * self.g_root_n * self.u1 * c1, zero, zero);
        (m, b)
    }
}

/// `chi = chi1 + i chi2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Susceptibility {
    pub chi1: f64,
    pub chi2: f64,
}

impl Susceptibility {
    pub fn complex(&self) -> C64 {
        C64::new(self.chi1, self.chi2)
    }
}

/// Mean amplitudes `(A, C', c2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyState {
    pub a: C64,
    pub c_prime: C64,
    pub c2: C64,
}

impl SteadyState {
    fn as_vector(&self) -> Vector3<C64> {
        Vector3::new(self.a, self.c_prime, self.c2)
    }

    fn from_vector(v: &Vector3<C64>) -> Self {
        Self {
            a: v[0],
            c_prime: v[1],
            c2: v[2],
        }
    }
}

/// `<A> = -i g sqrt(N) u1 alpha beta <c1> / D`.
pub fn steady_state_mean_a(ctx: &ProbeContext, c1: C64) -> Result<C64> {
    let d = ctx.denominator()?;
    Ok(-I * ctx.g_root_n * ctx.u1 * ctx.alpha() * ctx.beta() * c1 / d)
}

/// `<A>` with the companions `C' = -i xi A / alpha`, `c2 = -i g u2 sqrt(N) A / beta`.
pub fn steady_state(ctx: &ProbeContext, c1: C64) -> Result<SteadyState> {
    let a = steady_state_mean_a(ctx, c1)?;
    let alpha = ctx.alpha();
    let beta = ctx.beta();
    let c2 = if beta.norm() > 0.0 {
        -I * ctx.g_root_n * ctx.u2 * a / beta
    } else {
        C64::new(0.0, 0.0)
    };
    let c_prime = if alpha.norm() > 0.0 {
        -I * ctx.xi * a / alpha
    } else if ctx.xi > 0.0 {
        // Lossless Raman resonance: A vanishes and C' alone cancels the drive.
        -ctx.g_root_n * ctx.u1 * c1 / ctx.xi
    } else {
        return Err(Error::SingularResponse { magnitude: 0.0 });
    };
    Ok(SteadyState { a, c_prime, c2 })
}

/// Steady state from a direct solve of `M y + b = 0`.
pub fn linear_steady_state(ctx: &ProbeContext, c1: C64) -> Result<SteadyState> {
    let (m, b) = ctx.linear_system(c1);
    let y = m
        .lu()
        .solve(&(-b))
        .ok_or(Error::SingularResponse { magnitude: 0.0 })?;
    Ok(SteadyState::from_vector(&y))
}

/// The canonical form `chi = i F alpha beta / D`.
pub fn susceptibility(ctx: &ProbeContext) -> Result<C64> {
    let d = ctx.denominator()?;
    Ok(I * ctx.prefactor() * ctx.alpha() * ctx.beta() / d)
}

/// `chi` from a steady-state `<A>`: `chi = -2 g sqrt(N) <A> / (omega u1 <c1>)`.
pub fn susceptibility_from_response(ctx: &ProbeContext, a: C64, c1: C64) -> Result<C64> {
    if ctx.u1 == 0.0 || c1.norm() == 0.0 {
        return Err(Error::InvalidParameter {
            name: "c1",
            reason: "probe amplitude and u1 must be nonzero".into(),
        });
    }
    Ok(-2.0 * ctx.g_root_n * a / (ctx.omega * ctx.u1 * c1))
}

/// Real and imaginary parts from the explicit real expressions in `Theta` and
/// `Xi`.
pub fn chi_decomposition(ctx: &ProbeContext) -> Result<Susceptibility> {
    let DecayRates {
        gamma_a,
        gamma_c,
        gamma_c2,
    } = ctx.decay;
    let (d, w2, xi2, shift) = (
        ctx.delta,
        ctx.omega2_tilde,
        ctx.xi * ctx.xi,
        ctx.spectator_shift(),
    );
    let cap = ctx.delta_cap;
    let theta = gamma_c * (gamma_a * gamma_c2 - cap * w2)
        + xi2 * gamma_c2
        + d * (cap * gamma_c2 + w2 * gamma_a)
        + shift * gamma_c;
    let xi_part =
        -d * (gamma_a * gamma_c2 - cap * w2) + w2 * xi2 + gamma_c * (cap * gamma_c2 + w2 * gamma_a)
            - d * shift;
    let norm = theta * theta + xi_part * xi_part;
    if !(norm > 0.0) {
        return Err(Error::SingularResponse {
            magnitude: norm.sqrt(),
        });
    }
    let p = d * gamma_c2 - gamma_c * w2;
    let q = gamma_c * gamma_c2 + w2 * d;
    let f = ctx.prefactor();
    Ok(Susceptibility {
        chi1: (p * theta + q * xi_part) / norm * f,
        chi2: (q * theta - p * xi_part) / norm * f,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct RelaxOptions {
    pub horizon: f64,
    /// Number of stored samples after the initial point.
    pub samples: usize,
    /// Relative residual of `M y + b` accepted as converged.
    pub tolerance: f64,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self {
            horizon: 200.0,
            samples: 200,
            tolerance: 1e-10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Relaxation {
    pub times: Vec<f64>,
    pub states: Vec<SteadyState>,
    pub residual: f64,
}

impl Relaxation {
    pub fn last(&self) -> &SteadyState {
        self.states.last().expect("holds the initial state")
    }
}

/// Integrate the damped equations from `initial` with classical RK4.
pub fn relax_to_steady_state(
    ctx: &ProbeContext,
    initial: SteadyState,
    c1: C64,
    options: &RelaxOptions,
) -> Result<Relaxation> {
    if !(options.horizon.is_finite() && options.horizon > 0.0) {
        return Err(Error::InvalidParameter {
            name: "horizon",
            reason: format!("must be finite and > 0, got {}", options.horizon),
        });
    }
    let (m, b) = ctx.linear_system(c1);
    let rate = m
        .row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let samples = options.samples.max(1);
    let per_sample = options.horizon / samples as f64;
    let substeps = (per_sample * rate / 0.5).ceil().max(1.0) as usize;
    let h = per_sample / substeps as f64;

    let f = |y: &Vector3<C64>| m * y + b;
    let mut y = initial.as_vector();
    let mut times = vec![0.0];
    let mut states = vec![initial];
    for k in 1..=samples {
        for _ in 0..substeps {
            let k1 = f(&y);
            let k2 = f(&(y + k1 * C64::new(0.5 * h, 0.0)));
            let k3 = f(&(y + k2 * C64::new(0.5 * h, 0.0)));
            let k4 = f(&(y + k3 * C64::new(h, 0.0)));
            y += (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0);
        }
        times.push(per_sample * k as f64);
        states.push(SteadyState::from_vector(&y));
    }
    let scale = rate * y.norm() + b.norm();
    let residual = if scale > 0.0 {
        f(&y).norm() / scale
    } else {
        0.0
    };
    if residual > options.tolerance {
        return Err(Error::NotConverged { residual });
    }
    Ok(Relaxation {
        times,
        states,
        residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransparencyMetrics {
    /// Detuning of the absorption minimum.
    pub center: f64,
    pub min_chi2: f64,
    /// Distance between the half-height points of the two absorption flanks.
    pub width: f64,
    /// `d chi1 / d delta` at the center.
    pub slope_chi1: f64,
}

/// Half-height crossing walking outward from `center` in direction `step`.
fn half_crossing(deltas: &[f64], chi2: &[f64], center: usize, step: isize) -> f64 {
    let end = if step < 0 { 0 } else { chi2.len() - 1 };
    let range: Vec<usize> = if step < 0 {
        (0..=center).rev().collect()
    } else {
        (center..chi2.len()).collect()
    };
    let peak = range.iter().map(|&i| chi2[i]).fold(f64::MIN, f64::max);
    let half = chi2[center] + 0.5 * (peak - chi2[center]);
    for w in range.windows(2) {
        let (i, j) = (w[0], w[1]);
        if chi2[j] >= half {
            let t = (half - chi2[i]) / (chi2[j] - chi2[i]);
            return deltas[i] + t * (deltas[j] - deltas[i]);
        }
    }
    deltas[end]
}

pub fn transparency_metrics(
    deltas: &[f64],
    curve: &[Susceptibility],
) -> Result<TransparencyMetrics> {
    if deltas.len() != curve.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} detunings for {} samples",
            deltas.len(),
            curve.len()
        )));
    }
    if curve.len() < 3 {
        return Err(Error::NoWindowFound);
    }
    let chi2: Vec<f64> = curve.iter().map(|c| c.chi2).collect();
    let center = (0..chi2.len())
        .min_by(|&i, &j| chi2[i].total_cmp(&chi2[j]))
        .expect("nonempty");
    if center == 0 || center == chi2.len() - 1 {
        return Err(Error::NoWindowFound);
    }
    let left = half_crossing(deltas, &chi2, center, -1);
    let right = half_crossing(deltas, &chi2, center, 1);
    let slope = (curve[center + 1].chi1 - curve[center - 1].chi1)
        / (deltas[center + 1] - deltas[center - 1]);
    Ok(TransparencyMetrics {
        center: deltas[center],
        min_chi2: chi2[center],
        width: right - left,
        slope_chi1: slope,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl DeltaGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) || self.points < 2
        {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!("need min < max and at least 2 points, got {self:?}"),
            });
        }
        let n = self.points - 1;
        Ok((0..=n)
            .map(|k| self.min + (self.max - self.min) * k as f64 / n as f64)
            .collect())
    }
}

/// Parameters of one susceptibility panel. `G_ratio` is `G/omega`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelConfig {
    pub omega: f64,
    pub omega0_ratio: f64,
    #[serde(rename = "G_ratio")]
    pub g_ratio: f64,
    pub xi: f64,
    #[serde(rename = "Delta")]
    pub delta_cap: f64,
    #[serde(rename = "gamma_A")]
    pub gamma_a: f64,
    #[serde(rename = "gamma_C")]
    pub gamma_c: f64,
    pub gamma_c2: f64,
    #[serde(rename = "g_root_N")]
    pub g_root_n: f64,
    pub grid: DeltaGrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbePanel {
    A,
    B,
    C,
    D,
}

impl ProbePanel {
    pub const ALL: [ProbePanel; 4] = [ProbePanel::A, ProbePanel::B, ProbePanel::C, ProbePanel::D];

    /// Shared rates and couplings; `xi = 10` and `Delta = 0` are defaults of
    /// this crate, not part of the panel definitions.
    pub fn config(self) -> PanelConfig {
        let (omega0_ratio, g_ratio) = match self {
            ProbePanel::A => (0.9, 0.0),
            ProbePanel::B => (0.9, 0.1),
            ProbePanel::C => (1.0, 0.1),
            ProbePanel::D => (1.0, 0.001),
        };
        PanelConfig {
            omega: 1e6,
            omega0_ratio,
            g_ratio,
            xi: 10.0,
            delta_cap: 0.0,
            gamma_a: 1.0,
            gamma_c: 1e-4,
            gamma_c2: 1e-6,
            g_root_n: 100.0,
            grid: DeltaGrid {
                min: -3.0,
                max: 3.0,
                points: 801,
            },
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ProbePanel::A => "a",
            ProbePanel::B => "b",
            ProbePanel::C => "c",
            ProbePanel::D => "d",
        }
    }
}

impl FromStr for ProbePanel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(ProbePanel::A),
            "b" => Ok(ProbePanel::B),
            "c" => Ok(ProbePanel::C),
            "d" => Ok(ProbePanel::D),
            _ => Err(Error::Config(format!(
                "unknown panel `{s}`, expected a, b, c or d"
            ))),
        }
    }
}

/// Size of `|Omega2 - Omega1|` against the largest of `|delta|`, `|Delta|`
/// and `g^2 u2^2 N` on a panel's grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetuningHierarchy {
    pub splitting: f64,
    pub max_delta: f64,
    pub delta_cap: f64,
    pub spectator_shift: f64,
}

impl DetuningHierarchy {
    pub fn ratio(&self) -> f64 {
        self.splitting
            / self
                .max_delta
                .max(self.delta_cap.abs())
                .max(self.spectator_shift)
    }
}

impl PanelConfig {
    pub fn light_medium(&self) -> Result<LightMediumParams> {
        LightMediumParams::new(
            self.omega,
            self.omega0_ratio * self.omega,
            self.g_ratio * self.omega,
        )
    }

    pub fn decay(&self) -> Result<DecayRates> {
        DecayRates::new(self.gamma_a, self.gamma_c, self.gamma_c2)
    }

    /// Context at two-photon detuning `delta`.
    pub fn probe_context(&self, delta: f64) -> Result<ProbeContext> {
        let basis = diagonalize(&self.light_medium()?);
        ProbeContext::from_basis(
            &basis,
            self.xi,
            self.delta_cap,
            self.g_root_n,
            delta,
            self.decay()?,
        )
    }

    pub fn detuning_hierarchy(&self) -> Result<DetuningHierarchy> {
        let params = self.light_medium()?;
        let (lower, upper) = hopfield::frequencies(&params);
        let ctx = self.probe_context(0.0)?;
        Ok(DetuningHierarchy {
            splitting: upper - lower,
            max_delta: self.grid.min.abs().max(self.grid.max.abs()),
            delta_cap: self.delta_cap,
            spectator_shift: ctx.spectator_shift(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiRow {
    pub delta: f64,
    pub chi1: f64,
    pub chi2: f64,
}

impl ChiRow {
    pub fn susceptibility(&self) -> Susceptibility {
        Susceptibility {
            chi1: self.chi1,
            chi2: self.chi2,
        }
    }
}

/// `chi1`, `chi2` across the panel's detuning grid.
pub fn fig4_sweep(config: &PanelConfig) -> Result<Vec<ChiRow>> {
    let base = config.probe_context(0.0)?;
    let deltas = config.grid.values()?;
    deltas
        .par_iter()
        .map(|&delta| {
            let chi = chi_decomposition(&base.with_delta(delta))?;
            Ok(ChiRow {
                delta,
                chi1: chi.chi1,
                chi2: chi.chi2,
            })
        })
        .collect()
}

/// Detunings where the absorption comes out negative.
pub fn negative_absorption(rows: &[ChiRow]) -> Vec<f64> {
    rows.iter()
        .filter(|r| r.chi2 < 0.0)
        .map(|r| r.delta)
        .collect()
}

/// `sup |chi_a - chi_b| / sup |chi_a|` over rows sampled on the same grid.
pub fn relative_sup_distance(reference: &[ChiRow], other: &[ChiRow]) -> Result<f64> {
    if reference.len() != other.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} vs {} rows",
            reference.len(),
            other.len()
        )));
    }
    let mut diff: f64 = 0.0;
    let mut size: f64 = 0.0;
    for (r, o) in reference.iter().zip(other) {
        diff = diff.max((r.susceptibility().complex() - o.susceptibility().complex()).norm());
        size = size.max(r.susceptibility().complex().norm());
    }
    Ok(diff / size)
}

/// CSV with columns `delta,chi1,chi2`.
pub fn chi_csv(rows: &[ChiRow]) -> String {
    let mut out = String::from("delta,chi1,chi2\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.delta, r.chi1, r.chi2);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic() -> ProbeContext {
        let decay = DecayRates::new(1.0, 0.5, 0.3).unwrap();
        ProbeContext::new(1.2, 0.4, 2.0, 0.7, 0.5, 1.0, 3.0, 0.2, decay).unwrap()
    }

    #[test]
    fn closed_form_matches_linear_solve() {
        let ctx = generic();
        let c1 = C64::new(0.3, -0.8);
        let closed = steady_state(&ctx, c1).unwrap();
        let solved = linear_steady_state(&ctx, c1).unwrap();
        for (x, y) in [
            (closed.a, solved.a),
            (closed.c_prime, solved.c_prime),
            (closed.c2, solved.c2),
        ] {
            assert!((x - y).norm() < 1e-12 * y.norm().max(1e-300), "{x} vs {y}");
        }
    }

    #[test]
    fn relaxation_reaches_closed_form() {
        let ctx = generic();
        let c1 = C64::new(1.0, 0.0);
        let zero = SteadyState {
            a: C64::new(0.0, 0.0),
            c_prime: C64::new(0.0, 0.0),
            c2: C64::new(0.0, 0.0),
        };
        let run = relax_to_steady_state(&ctx, zero, c1, &RelaxOptions::default()).unwrap();
        let closed = steady_state(&ctx, c1).unwrap();
        assert!((run.last().a - closed.a).norm() < 1e-10);
        assert!((run.last().c_prime - closed.c_prime).norm() < 1e-10);
    }

    #[test]
    fn relaxation_flags_short_horizons() {
        let ctx = generic();
        let zero = SteadyState {
            a: C64::new(0.0, 0.0),
            c_prime: C64::new(0.0, 0.0),
            c2: C64::new(0.0, 0.0),
        };
        let opts = RelaxOptions {
            horizon: 0.5,
            ..RelaxOptions::default()
        };
        assert!(matches!(
            relax_to_steady_state(&ctx, zero, C64::new(1.0, 0.0), &opts),
            Err(Error::NotConverged { .. })
        ));
    }

    #[test]
    fn chain_through_mean_a() {
        let ctx = generic();
        let c1 = C64::new(-0.4, 0.9);
        let a = steady_state_mean_a(&ctx, c1).unwrap();
        let chain = susceptibility_from_response(&ctx, a, c1).unwrap();
        let chi = susceptibility(&ctx).unwrap();
        assert!((chain - chi).norm() < 1e-13 * chi.norm());
    }

    #[test]
    fn decomposition_matches_complex_form() {
        let ctx = generic();
        let chi = susceptibility(&ctx).unwrap();
        let parts = chi_decomposition(&ctx).unwrap();
        assert!((parts.complex() - chi).norm() < 1e-13 * chi.norm());
    }

    #[test]
    fn lossless_raman_resonance_is_transparent() {
        let decay = DecayRates::new(1.0, 0.0, 0.0).unwrap();
        let ctx = ProbeContext::new(1.0, 0.0, 5.0, 1.0, 0.3, 2.0, 10.0, 0.0, decay).unwrap();
        assert_eq!(susceptibility(&ctx).unwrap(), C64::new(0.0, 0.0));
        let parts = chi_decomposition(&ctx).unwrap();
        assert_eq!((parts.chi1, parts.chi2), (0.0, 0.0));
        let s = steady_state(&ctx, C64::new(1.0, 0.0)).unwrap();
        assert_eq!(s.a, C64::new(0.0, 0.0));
        assert!((s.c_prime + 2.0).norm() < 1e-15);
    }

    #[test]
    fn strong_control_empties_excited_state() {
        let ctx = generic();
        let weak = steady_state_mean_a(&ctx, C64::new(1.0, 0.0))
            .unwrap()
            .norm();
        let strong = ProbeContext { xi: 1e6, ..ctx };
        let a = steady_state_mean_a(&strong, C64::new(1.0, 0.0))
            .unwrap()
            .norm();
        assert!(a < 1e-10 * weak);
        let undriven = ProbeContext { u1: 0.0, ..ctx };
        assert_eq!(
            steady_state_mean_a(&undriven, C64::new(1.0, 0.0))
                .unwrap()
                .norm(),
            0.0
        );
    }

    #[test]
    fn singular_corner() {
        let decay = DecayRates::new(1.0, 0.0, 0.0).unwrap();
        let ctx = ProbeContext::new(0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, decay).unwrap();
        assert!(matches!(
            susceptibility(&ctx),
            Err(Error::SingularResponse { .. })
        ));
        assert!(DecayRates::new(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn regime_warnings() {
        assert!(DecayRates::new(1.0, 1e-4, 1e-6)
            .unwrap()
            .regime_warnings()
            .is_empty());
        assert_eq!(
            DecayRates::new(1.0, 2.0, 3.0)
                .unwrap()
                .regime_warnings()
                .len(),
            2
        );
    }

    #[test]
    fn conventional_window_is_centered() {
        let rows = fig4_sweep(&ProbePanel::A.config()).unwrap();
        let deltas: Vec<f64> = rows.iter().map(|r| r.delta).collect();
        let curve: Vec<Susceptibility> = rows.iter().map(|r| r.susceptibility()).collect();
        let m = transparency_metrics(&deltas, &curve).unwrap();
        let step = deltas[1] - deltas[0];
        assert!(m.center.abs() <= step);
        assert!(m.slope_chi1 > 0.0);
        assert!(negative_absorption(&rows).is_empty());
    }

    #[test]
    fn flat_curve_has_no_window() {
        let deltas = [-1.0, 0.0, 1.0];
        let flat = [Susceptibility {
            chi1: 0.0,
            chi2: 0.0,
        }; 3];
        assert_eq!(
            transparency_metrics(&deltas, &flat),
            Err(Error::NoWindowFound)
        );
    }

    #[test]
    fn panel_config_json_names() {
        let json = serde_json::to_value(ProbePanel::B.config()).unwrap();
        for key in [
            "omega",
            "omega0_ratio",
            "G_ratio",
            "xi",
            "Delta",
            "gamma_A",
            "gamma_C",
            "gamma_c2",
            "g_root_N",
            "grid",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!("D".parse::<ProbePanel>().unwrap(), ProbePanel::D);
        assert!("e".parse::<ProbePanel>().is_err());
    }
}
