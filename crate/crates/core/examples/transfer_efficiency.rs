//! How much of an n-photon state survives the passage into the polariton
//! basis: efficiency versus coupling for three detunings, then for several
//! photon numbers.

use polariton_eit::hopfield::LightMediumParams;
use polariton_eit::transfer::{efficiency_sweep, fig3_sweep, rotation_data, DEFAULT_MASS};

fn main() -> polariton_eit::Result<()> {
    let ratios = [0.9, 0.95, 0.99];
    let couplings: Vec<f64> = (0..=10).map(|k| k as f64 * 0.01).collect();
    let rows = fig3_sweep(&ratios, &couplings)?;
    println!("    G  F1(0.9)  F1(0.95) F1(0.99)");
    for (k, g) in couplings.iter().enumerate() {
        let f: Vec<f64> = (0..ratios.len())
            .map(|r| rows[r * couplings.len() + k].efficiency)
            .collect();
        println!("{g:>5.2} {:>8.5} {:>8.5} {:>8.5}", f[0], f[1], f[2]);
    }

    println!("\nomega0 = 0.9, G = 0.05");
    for n in 0..=4 {
        let f = efficiency_sweep(n, &[0.9], &[0.05])?[0].efficiency;
        println!("  F_{n} = {f:.6}");
    }

    let r = rotation_data(&LightMediumParams::new(1.0, 0.9, 0.05)?, DEFAULT_MASS)?;
    println!(
        "  rotation alpha = {:.6}, beta = {:.6}, stiffnesses K1 = {:.6}, K2 = {:.6}",
        r.alpha, r.beta, r.k1, r.k2
    );
    Ok(())
}
