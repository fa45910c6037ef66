use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use super::collective::{CollectiveModel, MODE_A, MODE_C, MODE_C1, MODE_C2};
use crate::error::{Error, Result};
use crate::fockspace::{
    build_light_medium, evolve, exact_eigensystem, ladder, overlap, EvolveOptions, FockOperator,
    FockState, ModeSpec, C64,
};
use crate::hopfield::{diagonalize, LightMediumParams};

/// Starting angle of the default schedule. A finite control field can never
/// reach `theta = 0` exactly; `cos^2(0.02)` caps the initial dark overlap at
/// `0.9996`.
pub const DEFAULT_THETA_START: f64 = 0.02;

const MONOTONE_SAMPLES: usize = 2000;

/// Control amplitude `xi(t)` on `[0, T]`, non-increasing.
pub struct ControlSchedule {
    duration: f64,
    xi: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for ControlSchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ControlSchedule")
            .field("duration", &self.duration)
            .field("xi(0)", &(self.xi)(0.0))
            .field("xi(T)", &(self.xi)(self.duration))
            .finish()
    }
}

impl ControlSchedule {
    /// `theta(t) = t0 + (pi/2 - t0) sin^2(pi t / 2T)` realized as
    /// `xi = coupling / tan(theta)`, where `coupling = g u1 sqrt(M)`.
    pub fn sin_squared(coupling: f64, duration: f64, theta_start: f64) -> Result<Self> {
        if !(coupling.is_finite() && coupling > 0.0) {
            return Err(Error::DegenerateDark);
        }
        if !(theta_start > 0.0 && theta_start < FRAC_PI_2) {
            return Err(Error::InvalidParameter {
                name: "theta_start",
                reason: format!("must lie in (0, pi/2), got {theta_start}"),
            });
        }
        check_duration(duration)?;
        let xi = move |t: f64| {
            let phase = if duration > 0.0 {
                (FRAC_PI_2 * t / duration).sin().powi(2)
            } else {
                0.0
            };
            let theta = theta_start + (FRAC_PI_2 - theta_start) * phase;
            (coupling / theta.tan()).max(0.0)
        };
        Ok(Self {
            duration,
            xi: Box::new(xi),
        })
    }

    /// Arbitrary profile, rejected unless finite, non-negative and
    /// non-increasing on a fine sampling of `[0, T]`.
    pub fn custom<F>(duration: f64, xi: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_duration(duration)?;
        let mut prev = f64::INFINITY;
        for k in 0..=MONOTONE_SAMPLES {
            let t = duration * k as f64 / MONOTONE_SAMPLES as f64;
            let x = xi(t);
            if !x.is_finite() || x < 0.0 || x > prev + 1e-12 * prev.abs().max(1.0) {
                return Err(Error::ScheduleNotMonotone { time: t });
            }
            prev = x;
        }
        Ok(Self {
            duration,
            xi: Box::new(xi),
        })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn xi(&self, t: f64) -> f64 {
        (self.xi)(t)
    }
}

fn check_duration(duration: f64) -> Result<()> {
    if duration.is_finite() && duration >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "duration",
            reason: format!("must be finite and >= 0, got {duration}"),
        })
    }
}

/// A bare `n`-photon state `|n>_a |0>_B` written in the polariton basis and
/// embedded into the `(c1, c2)` modes of a collective model.
#[derive(Clone, Debug)]
pub struct InitialPhotonState {
    pub state: FockState,
    /// `|<n, 0|_pol |n, 0>_bare|^2`.
    pub s_n0_squared: f64,
    /// Weight of the expansion dropped by the collective model's cutoffs.
    pub truncated_weight: f64,
}

/// Expand `|n>_a |0>_B` over polariton Fock states
/// `c_1'^i c_2'^j |vac> / sqrt(i! j!)`, with `c_1` the photon-like branch, on a
/// light-medium Fock space of cutoff `fock_cutoff`.
pub fn bare_photon_state(
    model: &CollectiveModel,
    params: &LightMediumParams,
    n: usize,
    fock_cutoff: usize,
) -> Result<InitialPhotonState> {
    let basis = diagonalize(params);
    let lm_spec = ModeSpec::new(&[fock_cutoff, fock_cutoff])?;
    let (a, _) = ladder(&lm_spec, 0)?;
    let (b, _) = ladder(&lm_spec, 1)?;
    let creation = |m: &crate::hopfield::PolaritonMode| -> FockOperator {
        // c = x1 a + y1 a' + x2 B + y2 B'
        let mut c = a.scale_real(m.x1);
        c.add_scaled(m.y1, &a.adjoint()).expect("same spec");
        c.add_scaled(m.x2, &b).expect("same spec");
        c.add_scaled(m.y2, &b.adjoint()).expect("same spec");
        c.adjoint()
    };
    let resonant = creation(basis.photon_like());
    let other = creation(basis.exciton_like());

    let h = build_light_medium(params, &lm_spec)?;
    let vacuum = exact_eigensystem(&h)?.state(0);
    let bare = lm_spec.basis_state(&[n, 0])?;

    let cut = model.spec().cutoffs();
    let (max_i, max_j) = (cut[MODE_C1], cut[MODE_C2]);
    let mut state = model.spec().vacuum().scale(C64::new(0.0, 0.0));
    let mut kept = 0.0;
    let mut s_n0 = C64::new(0.0, 0.0);
    let mut row = vacuum;
    for i in 0..=max_i {
        let mut pol = row.clone();
        for j in 0..=max_j {
            let amp = overlap(&pol, &bare)?;
            kept += amp.norm_sqr();
            if (i, j) == (n, 0) {
                s_n0 = amp;
            }
            let target = model.spec().basis_state(&[i, j, 0, 0])?;
            state.add_scaled(amp, &target)?;
            pol = other
                .apply(&pol)?
                .scale(C64::new(1.0 / ((j + 1) as f64).sqrt(), 0.0));
        }
        row = resonant
            .apply(&row)?
            .scale(C64::new(1.0 / ((i + 1) as f64).sqrt(), 0.0));
    }
    Ok(InitialPhotonState {
        state,
        s_n0_squared: s_n0.norm_sqr(),
        truncated_weight: (1.0 - kept).max(0.0),
    })
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    /// Stored photon number `n`; the target is `|n>_C` with the rest empty.
    pub photons: usize,
    pub evolve: EvolveOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            photons: 1,
            evolve: EvolveOptions {
                samples: 200,
                max_step: f64::INFINITY,
                ..EvolveOptions::default()
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSample {
    pub t: f64,
    pub theta: f64,
    /// `|<D_n(theta(t))|psi(t)>|^2`.
    pub fidelity_dark: f64,
    pub pop_e: f64,
    pub pop_c1: f64,
    pub pop_c2: f64,
    pub pop_c: f64,
    pub norm: f64,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub samples: Vec<SweepSample>,
    pub final_state: FockState,
    /// `|<n_C, 0|psi(T)>|^2`.
    pub fidelity: f64,
    /// Population outside every `|m>_C` storage state.
    pub leakage: f64,
}

/// Evolve `initial` under the model with its control replaced by the
/// schedule, recording populations and the dark-state overlap.
pub fn adiabatic_sweep(
    model: &CollectiveModel,
    schedule: &ControlSchedule,
    initial: &FockState,
    options: &SweepOptions,
) -> Result<SweepOutcome> {
    let n = options.photons;
    let coupling = model.context().collective_coupling();
    if coupling == 0.0 && schedule.xi(0.0) == 0.0 {
        return Err(Error::DegenerateDark);
    }
    let cut = model.spec().cutoffs();
    if n > cut[MODE_C] || n > cut[MODE_C1] {
        return Err(Error::InvalidParameter {
            name: "photons",
            reason: format!("{n} exceeds the c1 or C cutoff"),
        });
    }
    let trajectory = evolve(
        |t| model.hamiltonian_at(schedule.xi(t)),
        initial,
        schedule.duration(),
        &options.evolve,
    )?;

    let numbers = [MODE_A, MODE_C1, MODE_C2, MODE_C].map(|m| model.number(m));
    let mut samples = Vec::with_capacity(trajectory.times.len());
    for (&t, psi) in trajectory.times.iter().zip(&trajectory.states) {
        let theta = coupling.abs().atan2(schedule.xi(t));
        let dark = model.dark_fock_state(n, theta);
        let pops = numbers
            .iter()
            .map(|op| psi.expectation(op).map(|z| z.re))
            .collect::<Result<Vec<_>>>()?;
        samples.push(SweepSample {
            t,
            theta,
            fidelity_dark: overlap(&dark, psi)?.norm_sqr(),
            pop_e: pops[0],
            pop_c1: pops[1],
            pop_c2: pops[2],
            pop_c: pops[3],
            norm: psi.norm(),
        });
    }

    let final_state = trajectory.last().clone();
    let mut stored = 0.0;
    let mut fidelity = 0.0;
    for m in 0..=cut[MODE_C] {
        let p = final_state.population(&[0, 0, 0, m])?;
        stored += p;
        if m == n {
            fidelity = p;
        }
    }
    Ok(SweepOutcome {
        samples,
        leakage: (final_state.norm().powi(2) - stored).max(0.0),
        fidelity,
        final_state,
    })
}

/// CSV with columns `t,theta,fidelity_dark,pop_e,pop_c1,pop_c2,pop_C,norm`.
pub fn trajectory_csv(samples: &[SweepSample]) -> String {
    let mut out = String::from("t,theta,fidelity_dark,pop_e,pop_c1,pop_c2,pop_C,norm\n");
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.t, s.theta, s.fidelity_dark, s.pop_e, s.pop_c1, s.pop_c2, s.pop_c, s.norm
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eit_dark::EitContext;
    use crate::transfer::transmission_efficiency;

    fn bare_ctx() -> EitContext {
        // g sqrt(M) = 1 sets the time unit
        EitContext::new(0.0, 0.1, 0.0, -10.0, 1.0, 0.0, 100).unwrap()
    }

    #[test]
    fn custom_schedule_must_decrease() {
        assert!(ControlSchedule::custom(10.0, |t| 10.0 - t).is_ok());
        assert!(matches!(
            ControlSchedule::custom(10.0, |t| (t - 5.0).abs()),
            Err(Error::ScheduleNotMonotone { .. })
        ));
        assert!(ControlSchedule::custom(10.0, |_| -1.0).is_err());
    }

    #[test]
    fn default_schedule_endpoints() {
        let s = ControlSchedule::sin_squared(2.0, 5.0, 0.1).unwrap();
        assert!((s.xi(0.0) - 2.0 / 0.1f64.tan()).abs() < 1e-12);
        assert!(s.xi(5.0) < 1e-15);
        assert!(ControlSchedule::sin_squared(0.0, 5.0, 0.1).is_err());
    }

    #[test]
    fn zero_duration_keeps_initial_overlap() {
        let model = CollectiveModel::new(&bare_ctx(), [2; 4]).unwrap();
        let psi = model.spec().basis_state(&[1, 0, 0, 0]).unwrap();
        let s = ControlSchedule::sin_squared(1.0, 0.0, DEFAULT_THETA_START).unwrap();
        let out = adiabatic_sweep(&model, &s, &psi, &SweepOptions::default()).unwrap();
        assert_eq!(out.fidelity, 0.0);
        assert_eq!(out.samples.len(), 1);
        let expected = DEFAULT_THETA_START.cos().powi(2);
        assert!((out.samples[0].fidelity_dark - expected).abs() < 1e-12);
    }

    #[test]
    fn slow_sweep_stores_a_photon() {
        let model = CollectiveModel::new(&bare_ctx(), [1; 4]).unwrap();
        let psi = model.spec().basis_state(&[1, 0, 0, 0]).unwrap();
        let s = ControlSchedule::sin_squared(1.0, 100.0, DEFAULT_THETA_START).unwrap();
        let out = adiabatic_sweep(&model, &s, &psi, &SweepOptions::default()).unwrap();
        assert!(out.fidelity > 0.99, "{}", out.fidelity);
        assert!(out.leakage < 0.01);
        let last = out.samples.last().unwrap();
        assert!((last.norm - 1.0).abs() < 1e-9);
        assert!(trajectory_csv(&out.samples).starts_with("t,theta,fidelity_dark,"));
    }

    #[test]
    fn bare_photon_expansion() {
        let model = CollectiveModel::new(&bare_ctx(), [2; 4]).unwrap();
        let free = LightMediumParams::new(1.0, 0.9, 0.0).unwrap();
        let init = bare_photon_state(&model, &free, 1, 10).unwrap();
        assert!((init.s_n0_squared - 1.0).abs() < 1e-12);
        assert!((init.state.population(&[1, 0, 0, 0]).unwrap() - 1.0).abs() < 1e-12);

        let p = LightMediumParams::new(1.0, 0.9, 0.05).unwrap();
        let init = bare_photon_state(&model, &p, 1, 25).unwrap();
        let f1 = transmission_efficiency(1, &p).unwrap();
        assert!((init.s_n0_squared - f1).abs() < 1e-6);
        assert!(init.truncated_weight < 1e-3);
    }
}
