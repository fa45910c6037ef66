//! Cross-check the closed-form polariton spectrum and transfer efficiencies
//! against brute-force diagonalization of the truncated light-medium
//! Hamiltonian.

use polariton_eit::fockspace::{build_light_medium, exact_eigensystem, ModeSpec};
use polariton_eit::hopfield::{frequencies, LightMediumParams};
use polariton_eit::transfer::{transmission_efficiency, FockTransferOracle};

fn main() -> polariton_eit::Result<()> {
    for (omega0, coupling) in [(0.9, 0.05), (0.9, 0.1), (1.0, 0.05), (1.0, 0.1)] {
        let params = LightMediumParams::new(1.0, omega0, coupling)?;
        let (lower, upper) = frequencies(&params);
        println!("omega0 = {omega0}, G = {coupling}: Omega = ({lower:.9}, {upper:.9})");
        for cutoff in [15, 20, 25] {
            let h = build_light_medium(&params, &ModeSpec::new(&[cutoff, cutoff])?)?;
            let values = exact_eigensystem(&h)?.values;
            let gaps = (values[1] - values[0], values[2] - values[0]);
            println!(
                "  cutoff {cutoff}: gap errors {:.3e} {:.3e}",
                (gaps.0 - lower).abs(),
                (gaps.1 - upper).abs()
            );
        }
        let oracle = FockTransferOracle::new(&params, 25)?;
        for n in 0..=2 {
            let analytic = transmission_efficiency(n, &params)?;
            let fock = oracle.efficiency(n)?;
            println!("  F_{n}: analytic {analytic:.12}, Fock {fock:.12}");
        }
    }
    Ok(())
}
