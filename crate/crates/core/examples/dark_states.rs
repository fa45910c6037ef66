//! Dark states: the single-atom zero mode, the collective dark polariton and
//! the bright sector it decouples from.

use std::f64::consts::FRAC_PI_2;

use polariton_eit::eit_dark::{
    bright_sector_spectrum, dark_state, no_mixing_check, subspace_matrix, CollectiveModel,
    EitContext,
};
use polariton_eit::fockspace::commutator;
use polariton_eit::hopfield::{diagonalize, LightMediumParams};

fn main() -> polariton_eit::Result<()> {
    let params = LightMediumParams::new(1.0, 0.9, 0.05)?;
    let ctx = EitContext::from_basis(&diagonalize(&params), 0.8, 0.1, 0.3, 49)?;
    println!(
        "u1 = {:.5}, u2 = {:.5}, Omega2~ = {:.5}",
        ctx.u1, ctx.u2, ctx.omega2_tilde
    );

    for n1 in 0..3 {
        let dark = dark_state(n1, 0, &ctx)?;
        let m = subspace_matrix(n1, 0, &ctx).matrix;
        println!(
            "single atom n1 = {n1}: theta = {:.5}, |M v| = {:.1e}",
            dark.angle.theta,
            (m * dark.vector).amax()
        );
    }

    let model = CollectiveModel::new(&ctx, [3; 4])?;
    let theta = ctx.collective_angle()?.theta;
    let d = model.dark_mode(theta);
    println!(
        "collective theta = {theta:.5}: |[H, D]| = {:.1e}",
        commutator(&model.hamiltonian(), &d)?.protected_residual()
    );
    for (name, r) in model.commutation_residuals() {
        println!("  {name:<12} {r:.1e}");
    }

    let bright = bright_sector_spectrum(&ctx, [3; 4])?;
    println!(
        "bright sector energies {:.5?} (coupling {:.5}, eigen residual {:.1e})",
        bright.energies, bright.bright_coupling, bright.eigen_residual
    );

    let thetas: Vec<f64> = (1..=5).map(|k| k as f64 * FRAC_PI_2 / 6.0).collect();
    let report = no_mixing_check(&ctx, &thetas, 2)?;
    println!(
        "{} zero-energy states, {} pairs: max cross coupling {:.1e}",
        report.zero_states.len(),
        report.pairs_checked,
        report.max_cross_coupling
    );
    Ok(())
}
