//! Polariton branches and Hopfield coefficients as the light-medium coupling
//! grows towards the stability bound.

use polariton_eit::hopfield::{
    canonical_residual, diagonalize, stability_bound, LightMediumParams,
};

fn main() -> polariton_eit::Result<()> {
    for omega0 in [0.9, 1.0] {
        let bound = stability_bound(1.0, omega0);
        println!("omega0 = {omega0} (G < {bound:.4})");
        println!("      G   Omega1   Omega2  photon(1)  photon(2)  residual");
        for frac in [0.0, 0.05, 0.1, 0.2, 0.5, 0.9, 0.99] {
            let params = LightMediumParams::new(1.0, omega0, frac * bound)?;
            let b = diagonalize(&params);
            println!(
                "{:>7.4} {:>8.5} {:>8.5} {:>10.5} {:>10.5} {:>9.1e}",
                params.coupling(),
                b.mode1.frequency,
                b.mode2.frequency,
                b.mode1.photon_fraction(),
                b.mode2.photon_fraction(),
                canonical_residual(&b)
            );
        }
    }
    match LightMediumParams::new(1.0, 1.0, 0.5) {
        Err(e) => println!("G at the bound: {e}"),
        Ok(_) => unreachable!("the bound is exclusive"),
    }
    Ok(())
}
