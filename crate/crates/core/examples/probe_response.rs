//! Steady-state response of the medium to a weak probe, three ways: closed
//! form, direct linear solve, and relaxation of the damped equations.

use polariton_eit::fockspace::C64;
use polariton_eit::optics::{
    linear_steady_state, relax_to_steady_state, steady_state, susceptibility,
    susceptibility_from_response, DecayRates, ProbeContext, RelaxOptions, SteadyState,
};

fn main() -> polariton_eit::Result<()> {
    let decay = DecayRates::new(1.0, 0.2, 0.05)?;
    for w in decay.regime_warnings() {
        println!("warning: {w}");
    }
    let drive = C64::new(1.0, 0.0);
    let zero = SteadyState {
        a: C64::new(0.0, 0.0),
        c_prime: C64::new(0.0, 0.0),
        c2: C64::new(0.0, 0.0),
    };
    for delta in [-1.0, 0.0, 0.5] {
        let ctx = ProbeContext::new(2.0, 0.5, 3.0, 0.95, 0.3, 1.5, 100.0, delta, decay)?;
        let closed = steady_state(&ctx, drive)?;
        let solved = linear_steady_state(&ctx, drive)?;
        let relaxed = relax_to_steady_state(&ctx, zero, drive, &RelaxOptions::default())?;
        let chi = susceptibility(&ctx)?;
        println!(
            "delta = {delta:+.1}: <A> = {:.6}, solve diff {:.1e}, relax diff {:.1e} (residual {:.1e}), chi = {:.4e}, chain diff {:.1e}",
            closed.a,
            (solved.a - closed.a).norm(),
            (relaxed.last().a - closed.a).norm(),
            relaxed.residual,
            chi,
            (susceptibility_from_response(&ctx, closed.a, drive)? - chi).norm()
        );
    }
    Ok(())
}
