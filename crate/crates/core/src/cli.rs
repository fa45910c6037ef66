//! Command-line front end: JSON configs in, CSV tables and JSON summaries out.
//!
//! Every config is fully validated before any computation, and tables are
//! written through a temporary file that is renamed into place, so a failed
//! run never leaves a partial output behind.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::eit_dark::{
    adiabatic_sweep, bare_photon_state, trajectory_csv, CollectiveModel, ControlSchedule,
    EitContext, SweepOptions, DEFAULT_THETA_START,
};
use crate::error::{Error, Result};
use crate::hopfield::{canonical_residual, diagonalize, LightMediumParams};
use crate::optics::{
    chi_csv, fig4_sweep, negative_absorption, transparency_metrics, ProbePanel, PanelConfig,
    Susceptibility,
};
use crate::transfer::{transmission_efficiency, FockTransferOracle};

pub const CONFIG_VERSION: u32 = 1;
/// Caps the rayon pool used for sweeps.
pub const THREADS_ENV: &str = "POLARITON_EIT_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "polariton-eit",
    version,
    about = "Polariton spectra, photon transfer, dark-state storage and EIT susceptibility"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Polariton frequencies and Hopfield coefficients over a coupling grid.
    Spectrum(CommonArgs),
    /// Photon transmission efficiency over detunings and couplings.
    Transfer {
        #[command(flatten)]
        common: CommonArgs,
        /// Photon number (overrides the config).
        #[arg(long)]
        n: Option<usize>,
        /// Add a Fock-space diagonalization column and its deviation.
        #[arg(long)]
        oracle: bool,
    },
    /// Adiabatic storage of an n-photon state in the atomic spin wave.
    Adiabatic {
        #[command(flatten)]
        common: CommonArgs,
        /// Photon number (overrides the config).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Probe susceptibility across a two-photon detuning grid.
    Chi {
        #[command(flatten)]
        common: CommonArgs,
        /// Built-in parameter set to start from when no config is given.
        #[arg(long, value_parser = ["a", "b", "c", "d"])]
        panel: Option<String>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// JSON config; built-in defaults are used when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV output path [default: <subcommand>.csv].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Explicit values or an inclusive uniform range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Samples {
    List(Vec<f64>),
    Range { min: f64, max: f64, points: usize },
}

impl Samples {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            Samples::List(v) if !v.is_empty() => Ok(v.clone()),
            Samples::List(_) => Err(Error::Config("empty sample list".into())),
            Samples::Range { min, max, points } => {
                if *points == 1 && min == max {
                    return Ok(vec![*min]);
                }
                if !(min.is_finite() && max.is_finite() && min < max) || *points < 2 {
                    return Err(Error::Config(format!(
                        "range needs min < max and at least 2 points, got {min}..{max} x {points}"
                    )));
                }
                let n = points - 1;
                Ok((0..=n)
                    .map(|k| min + (max - min) * k as f64 / n as f64)
                    .collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub version: u32,
    pub omega: f64,
    pub omega0: f64,
    #[serde(rename = "G")]
    pub couplings: Samples,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            omega: 1.0,
            omega0: 0.9,
            couplings: Samples::Range {
                min: 0.0,
                max: 0.2,
                points: 41,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferConfig {
    pub version: u32,
    /// `omega0 / omega`, with `omega = 1`.
    pub ratios: Vec<f64>,
    /// `G / omega`.
    #[serde(rename = "G")]
    pub couplings: Samples,
    #[serde(default = "default_photons")]
    pub n: usize,
    #[serde(default = "default_oracle_cutoff")]
    pub oracle_cutoff: usize,
}

fn default_photons() -> usize {
    1
}

fn default_oracle_cutoff() -> usize {
    25
}

impl Default for TransferConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            ratios: vec![0.99, 0.95, 0.9],
            couplings: Samples::Range {
                min: 0.0,
                max: 0.1,
                points: 101,
            },
            n: 1,
            oracle_cutoff: 25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdiabaticConfig {
    pub version: u32,
    pub omega: f64,
    pub omega0: f64,
    #[serde(rename = "G")]
    pub coupling: f64,
    /// Single-atom probe coupling.
    pub g: f64,
    pub atoms: usize,
    #[serde(rename = "Delta", default)]
    pub delta_cap: f64,
    #[serde(default = "default_photons")]
    pub n: usize,
    /// Sweep duration in units of `1 / (g u1 sqrt(M))`.
    pub duration_eps: f64,
    #[serde(default = "default_theta_start")]
    pub theta_start: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Occupation cutoffs of `(c1, c2, A, C)`; `n + 1` each when absent.
    #[serde(default)]
    pub cutoffs: Option<[usize; 4]>,
    /// Cutoff of the light-medium space used to expand the bare photon state.
    #[serde(default = "default_oracle_cutoff")]
    pub fock_cutoff: usize,
}

fn default_theta_start() -> f64 {
    DEFAULT_THETA_START
}

fn default_samples() -> usize {
    200
}

impl Default for AdiabaticConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            omega: 1.0,
            omega0: 0.9,
            coupling: 0.0,
            g: 0.001,
            atoms: 100,
            delta_cap: 0.0,
            n: 1,
            duration_eps: 200.0,
            theta_start: DEFAULT_THETA_START,
            samples: 200,
            cutoffs: None,
            fock_cutoff: 25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiConfig {
    pub version: u32,
    #[serde(flatten)]
    pub panel: PanelConfig,
}

impl ChiConfig {
    pub fn for_panel(panel: ProbePanel) -> Self {
        Self {
            version: CONFIG_VERSION,
            panel: panel.config(),
        }
    }
}

/// What a subcommand produced: the CSV table and a JSON summary.
#[derive(Clone, Debug, PartialEq)]
pub struct CommandOutput {
    pub csv: String,
    pub summary: Value,
}

fn check_version(version: u32) -> Result<()> {
    if version == CONFIG_VERSION {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "unsupported config version {version}, expected {CONFIG_VERSION}"
        )))
    }
}

pub fn cmd_spectrum(config: &SpectrumConfig) -> Result<CommandOutput> {
    check_version(config.version)?;
    let params = config
        .couplings
        .values()?
        .into_iter()
        .map(|g| LightMediumParams::new(config.omega, config.omega0, g))
        .collect::<Result<Vec<_>>>()?;

    let mut csv = String::from(
        "G,Omega1,Omega2,mode1_u1,mode1_u2,mode1_v1,mode1_v2,mode2_u1,mode2_u2,mode2_v1,mode2_v2,canonical_residual\n",
    );
    let mut worst: f64 = 0.0;
    for p in &params {
        let b = diagonalize(p);
        let residual = canonical_residual(&b);
        worst = worst.max(residual);
        let (m1, m2) = (&b.mode1, &b.mode2);
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            p.coupling(),
            m1.frequency,
            m2.frequency,
            m1.u1,
            m1.u2,
            m1.v1,
            m1.v2,
            m2.u1,
            m2.u2,
            m2.v1,
            m2.v2,
            residual
        );
    }
    Ok(CommandOutput {
        csv,
        summary: json!({
            "rows": params.len(),
            "max_canonical_residual": worst,
        }),
    })
}

pub fn cmd_transfer(config: &TransferConfig, oracle: bool) -> Result<CommandOutput> {
    check_version(config.version)?;
    let couplings = config.couplings.values()?;
    let mut jobs = Vec::new();
    for &ratio in &config.ratios {
        for &g in &couplings {
            jobs.push((ratio, LightMediumParams::new(1.0, ratio, g)?));
        }
    }
    let n = config.n;
    if n > crate::transfer::DEFAULT_MAX_PHOTONS {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("at most {}", crate::transfer::DEFAULT_MAX_PHOTONS),
        });
    }
    if oracle && config.oracle_cutoff < n + 2 {
        return Err(Error::InvalidParameter {
            name: "oracle_cutoff",
            reason: format!("must be at least n + 2 = {}", n + 2),
        });
    }

    let rows: Vec<(f64, f64, f64, Option<f64>)> = jobs
        .par_iter()
        .map(|(ratio, p)| {
            let f = transmission_efficiency(n, p)?;
            let fock = if oracle {
                Some(FockTransferOracle::new(p, config.oracle_cutoff)?.efficiency(n)?)
            } else {
                None
            };
            Ok((*ratio, p.coupling(), f, fock))
        })
        .collect::<Result<_>>()?;

    let mut csv = format!("omega0_ratio,G,F{n}");
    if oracle {
        let _ = write!(csv, ",F{n}_fock,abs_diff");
    }
    csv.push('\n');
    let mut worst: f64 = 0.0;
    for (ratio, g, f, fock) in &rows {
        let _ = write!(csv, "{ratio},{g},{f}");
        if let Some(x) = fock {
            let diff = (f - x).abs();
            worst = worst.max(diff);
            let _ = write!(csv, ",{x},{diff}");
        }
        csv.push('\n');
    }
    let mut summary = json!({ "rows": rows.len(), "n": n });
    if oracle {
        summary["max_oracle_deviation"] = json!(worst);
    }
    Ok(CommandOutput { csv, summary })
}

pub fn cmd_adiabatic(config: &AdiabaticConfig) -> Result<CommandOutput> {
    check_version(config.version)?;
    let params = LightMediumParams::new(config.omega, config.omega0, config.coupling)?;
    let ctx = EitContext::from_basis(
        &diagonalize(&params),
        0.0,
        config.g,
        config.delta_cap,
        config.atoms,
    )?;
    let n = config.n;
    let cutoffs = config.cutoffs.unwrap_or([n + 1; 4]);
    if cutoffs[0] < n || cutoffs[3] < n {
        return Err(Error::InvalidParameter {
            name: "cutoffs",
            reason: format!("c1 and C cutoffs must hold {n} quanta"),
        });
    }
    if config.fock_cutoff < n + 2 {
        return Err(Error::InvalidParameter {
            name: "fock_cutoff",
            reason: format!("must be at least n + 2 = {}", n + 2),
        });
    }
    if !(config.duration_eps.is_finite() && config.duration_eps >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "duration_eps",
            reason: format!("must be finite and >= 0, got {}", config.duration_eps),
        });
    }
    let eps = ctx.collective_coupling();
    let schedule =
        ControlSchedule::sin_squared(eps, config.duration_eps / eps, config.theta_start)?;
    let model = CollectiveModel::new(&ctx, cutoffs)?;

    let initial = bare_photon_state(&model, &params, n, config.fock_cutoff)?;
    let mut options = SweepOptions {
        photons: n,
        ..SweepOptions::default()
    };
    options.evolve.samples = config.samples.max(1);
    let out = adiabatic_sweep(&model, &schedule, &initial.state, &options)?;
    Ok(CommandOutput {
        csv: trajectory_csv(&out.samples),
        summary: json!({
            "fidelity": out.fidelity,
            "leakage": out.leakage,
            "S_n0_squared": initial.s_n0_squared,
            "truncated_weight": initial.truncated_weight,
        }),
    })
}

pub fn cmd_chi(config: &ChiConfig) -> Result<CommandOutput> {
    check_version(config.version)?;
    let panel = &config.panel;
    panel.grid.values()?;
    let decay = panel.decay()?;
    let hierarchy = panel.detuning_hierarchy()?;
    let rows = fig4_sweep(panel)?;

    let deltas: Vec<f64> = rows.iter().map(|r| r.delta).collect();
    let curve: Vec<Susceptibility> = rows.iter().map(|r| r.susceptibility()).collect();
    let metrics = match transparency_metrics(&deltas, &curve) {
        Ok(m) => serde_json::to_value(m).expect("plain numbers"),
        Err(Error::NoWindowFound) => Value::Null,
        Err(e) => return Err(e),
    };
    Ok(CommandOutput {
        csv: chi_csv(&rows),
        summary: json!({
            "metrics": metrics,
            "negative_chi2_points": negative_absorption(&rows).len(),
            "detuning_ratio": hierarchy.ratio(),
            "regime_warnings": decay.regime_warnings(),
        }),
    })
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn load_or<T: DeserializeOwned>(path: &Option<PathBuf>, default: impl FnOnce() -> T) -> Result<T> {
    match path {
        Some(p) => load(p),
        None => Ok(default()),
    }
}

/// Resolve configs and flags, then run the subcommand.
pub fn execute(command: &Command) -> Result<(CommandOutput, PathBuf)> {
    let (output, common, name) = match command {
        Command::Spectrum(common) => {
            let config = load_or(&common.config, SpectrumConfig::default)?;
            (cmd_spectrum(&config)?, common, "spectrum")
        }
        Command::Transfer { common, n, oracle } => {
            let mut config = load_or(&common.config, TransferConfig::default)?;
            if let Some(n) = n {
                config.n = *n;
            }
            (cmd_transfer(&config, *oracle)?, common, "transfer")
        }
        Command::Adiabatic { common, n } => {
            let mut config = load_or(&common.config, AdiabaticConfig::default)?;
            if let Some(n) = n {
                config.n = *n;
            }
            (cmd_adiabatic(&config)?, common, "adiabatic")
        }
        Command::Chi { common, panel } => {
            let config = match (&common.config, panel) {
                (Some(_), Some(_)) => {
                    return Err(Error::Config(
                        "give either --config or --panel, not both".into(),
                    ))
                }
                (Some(path), None) => load(path)?,
                (None, p) => ChiConfig::for_panel(p.as_deref().unwrap_or("a").parse()?),
            };
            (cmd_chi(&config)?, common, "chi")
        }
    };
    let out = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
    Ok((output, out))
}

/// Write `contents` to `path` through a sibling temporary file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

/// Size the global rayon pool from the environment, if asked to.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Error::Config(format!(
            "{THREADS_ENV} must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

pub fn exit_code(error: &Error) -> i32 {
    if error.is_validation() {
        2
    } else {
        3
    }
}

/// Machine-readable error line for standard error.
pub fn error_json(error: &Error) -> String {
    json!({ "error": error.kind(), "message": error.to_string() }).to_string()
}
