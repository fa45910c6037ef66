//! Dispersion and absorption of the dressed probe for the four coupling
//! regimes, compared against the uncoupled panel.

use polariton_eit::optics::{
    fig4_sweep, negative_absorption, relative_sup_distance, transparency_metrics, ProbePanel,
    Susceptibility,
};

fn main() -> polariton_eit::Result<()> {
    let reference = fig4_sweep(&ProbePanel::A.config())?;
    for panel in ProbePanel::ALL {
        let config = panel.config();
        let rows = fig4_sweep(&config)?;
        let deltas: Vec<f64> = rows.iter().map(|r| r.delta).collect();
        let curve: Vec<Susceptibility> = rows.iter().map(|r| r.susceptibility()).collect();
        let metrics = transparency_metrics(&deltas, &curve)?;
        let hierarchy = config.detuning_hierarchy()?;
        println!(
            "panel {}: distance to (a) {:.4}, window center {:+.4}, min chi2 {:.3e}, width {:.4}, chi1 slope {:.4e}, detuning ratio {:.3e}",
            panel.label(),
            relative_sup_distance(&reference, &rows)?,
            metrics.center,
            metrics.min_chi2,
            metrics.width,
            metrics.slope_chi1,
            hierarchy.ratio(),
        );
        let negative = negative_absorption(&rows);
        if !negative.is_empty() {
            println!("  negative chi2 at {} detunings", negative.len());
        }
    }
    Ok(())
}
