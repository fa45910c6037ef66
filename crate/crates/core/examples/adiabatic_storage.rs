//! Store a single photon in the atomic spin wave by turning the control field
//! off adiabatically, with and without light-medium coupling.

use std::time::Instant;

use polariton_eit::eit_dark::{
    adiabatic_sweep, bare_photon_state, CollectiveModel, ControlSchedule, EitContext, SweepOptions,
    DEFAULT_THETA_START,
};
use polariton_eit::hopfield::{diagonalize, LightMediumParams};
use polariton_eit::transfer::transmission_efficiency;

fn main() -> polariton_eit::Result<()> {
    let atoms = 100;
    let g = 0.001; // g sqrt(M) = 0.01 omega
    for coupling in [0.0, 0.05] {
        let params = LightMediumParams::new(1.0, 0.9, coupling)?;
        let ctx = EitContext::from_basis(&diagonalize(&params), 0.0, g, 0.0, atoms)?;
        let model = CollectiveModel::new(&ctx, [2; 4])?;
        let initial = bare_photon_state(&model, &params, 1, 25)?;
        let eps = ctx.collective_coupling();
        println!(
            "G = {coupling}: F_1 = {:.6}, |S_10|^2 = {:.6}",
            transmission_efficiency(1, &params)?,
            initial.s_n0_squared
        );
        for t_eps in [2.0, 10.0, 50.0, 200.0, 1000.0] {
            let clock = Instant::now();
            let schedule = ControlSchedule::sin_squared(eps, t_eps / eps, DEFAULT_THETA_START)?;
            let out = adiabatic_sweep(&model, &schedule, &initial.state, &SweepOptions::default())?;
            println!(
                "  T eps = {t_eps:>6}: fidelity {:.6}  leakage {:.2e}  ({:.1?})",
                out.fidelity,
                out.leakage,
                clock.elapsed()
            );
        }
    }
    Ok(())
}
