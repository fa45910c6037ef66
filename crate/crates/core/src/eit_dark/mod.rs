//! Dark states of the two-colour Λ system: the single-atom four-level
//! subspace, the collective four-mode bosonic model, its bright sector, and
//! adiabatic storage sweeps.

mod collective;
mod single;
mod storage;

pub use collective::{
    bright_sector_spectrum, collective_hamiltonian, dark_mode_operator, derivative_coupling,
    no_mixing_check, BrightSector, CollectiveModel, DressedLabel, NoMixingReport, MODE_A, MODE_C,
    MODE_C1, MODE_C2,
};
pub use single::{dark_state, subspace_matrix, DarkVector, SubspaceMatrix};
pub use storage::{
    adiabatic_sweep, bare_photon_state, trajectory_csv, ControlSchedule, InitialPhotonState,
    SweepOptions, SweepOutcome, SweepSample, DEFAULT_THETA_START,
};

use crate::error::{Error, Result};
use crate::hopfield::PolaritonBasis;

/// Parameters of the interaction-picture Hamiltonian under two-photon
/// resonance with the photon-like polariton `c1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EitContext {
    /// Control Rabi frequency.
    pub xi: f64,
    /// Single-atom probe coupling.
    pub g: f64,
    /// One-photon detuning of the excited level.
    pub delta_cap: f64,
    /// Frequency of the off-resonant polariton relative to `c1`.
    pub omega2_tilde: f64,
    /// Photon content of the resonant polariton.
    pub u1: f64,
    /// Photon content of the off-resonant polariton.
    pub u2: f64,
    pub atom_count: usize,
}

impl EitContext {
    /// Context with explicit polariton coefficients. Use [`Self::from_basis`]
    /// or [`Self::check_against`] to tie them to a Hopfield basis.
    pub fn new(
        xi: f64,
        g: f64,
        delta_cap: f64,
        omega2_tilde: f64,
        u1: f64,
        u2: f64,
        atom_count: usize,
    ) -> Result<Self> {
        let ctx = Self {
            xi,
            g,
            delta_cap,
            omega2_tilde,
            u1,
            u2,
            atom_count,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    /// `u1`, `u2` are the photon amplitudes of the photon-like and the other
    /// polariton, and `omega2_tilde` their frequency difference.
    pub fn from_basis(
        basis: &PolaritonBasis,
        xi: f64,
        g: f64,
        delta_cap: f64,
        atom_count: usize,
    ) -> Result<Self> {
        let resonant = basis.photon_like();
        let other = basis.exciton_like();
        Self::new(
            xi,
            g,
            delta_cap,
            other.frequency - resonant.frequency,
            resonant.u1,
            other.u1,
            atom_count,
        )
    }

    fn validate(&self) -> Result<()> {
        let finite = [
            self.xi,
            self.g,
            self.delta_cap,
            self.omega2_tilde,
            self.u1,
            self.u2,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "context",
                reason: "all parameters must be finite".into(),
            });
        }
        if self.xi < 0.0 {
            return Err(Error::InvalidParameter {
                name: "xi",
                reason: format!("must be >= 0, got {}", self.xi),
            });
        }
        if self.g <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "g",
                reason: format!("must be > 0, got {}", self.g),
            });
        }
        if self.atom_count == 0 {
            return Err(Error::InvalidParameter {
                name: "atom_count",
                reason: "must be >= 1".into(),
            });
        }
        Ok(())
    }

    /// Fails unless `u1`, `u2` and `omega2_tilde` are those of `basis`.
    pub fn check_against(&self, basis: &PolaritonBasis) -> Result<()> {
        let expected = Self::from_basis(basis, self.xi, self.g, self.delta_cap, self.atom_count)?;
        let scale = 1.0 + expected.omega2_tilde.abs();
        let close = (self.u1 - expected.u1).abs() < 1e-12
            && (self.u2 - expected.u2).abs() < 1e-12
            && (self.omega2_tilde - expected.omega2_tilde).abs() < 1e-12 * scale;
        if close {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "u1/u2",
                reason: "coefficients do not come from the given polariton basis".into(),
            })
        }
    }

    pub fn with_xi(&self, xi: f64) -> Self {
        Self { xi, ..*self }
    }

    /// `g u1 sqrt(M)`.
    pub fn collective_coupling(&self) -> f64 {
        self.g * self.u1 * (self.atom_count as f64).sqrt()
    }

    /// `g u2 sqrt(M)`.
    pub fn spectator_coupling(&self) -> f64 {
        self.g * self.u2 * (self.atom_count as f64).sqrt()
    }

    /// Collective dark-mode angle, `tan(theta) = g u1 sqrt(M) / xi`.
    pub fn collective_angle(&self) -> Result<MixingAngle> {
        MixingAngle::from_couplings(
            self.collective_coupling(),
            self.xi,
            AngleConvention::Collective,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngleConvention {
    /// `tan(theta) = g u1 sqrt(n1 + 1) / xi` for `cos|g1, n1+1> - sin|g2>`.
    SingleAtom,
    /// `tan(theta) = g u1 sqrt(M) / xi` for `D = c1 cos - C sin`.
    Collective,
}

/// Dark-state mixing angle in `[0, pi/2]`; `theta = 0` is all photon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingAngle {
    pub theta: f64,
    pub convention: AngleConvention,
}

impl MixingAngle {
    fn from_couplings(probe: f64, control: f64, convention: AngleConvention) -> Result<Self> {
        if probe == 0.0 && control == 0.0 {
            return Err(Error::DegenerateDark);
        }
        Ok(Self {
            theta: probe.abs().atan2(control),
            convention,
        })
    }
}
