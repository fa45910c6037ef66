//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails. Golden CSVs under `tests/golden/` are
//! written on first run (or when `UPDATE_GOLDEN=1`) and compared afterwards.

use std::f64::consts::FRAC_PI_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use polariton_eit::eit_dark::{
    adiabatic_sweep, bare_photon_state, dark_state, no_mixing_check, subspace_matrix,
    CollectiveModel, ControlSchedule, EitContext, SweepOptions, DEFAULT_THETA_START,
};
use polariton_eit::fockspace::{build_light_medium, commutator, exact_eigensystem, ModeSpec, C64};
use polariton_eit::hopfield::{
    canonical_residual, diagonalize, frequencies, stability_bound, LightMediumParams,
};
use polariton_eit::optics::{
    chi_decomposition, chi_csv, fig4_sweep, linear_steady_state, relative_sup_distance,
    relax_to_steady_state, steady_state, susceptibility, transparency_metrics, DecayRates,
    ProbePanel, ProbeContext, RelaxOptions, SteadyState,
};
use polariton_eit::transfer::{
    efficiency_csv, fig3_sweep, transmission_efficiency, transmission_efficiency_with,
    FockTransferOracle, TransferOptions,
};
use polariton_eit::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Tolerances.
const SPECTRUM_REL_TOL: f64 = 1e-10;
const CANONICAL_TOL: f64 = 1e-10;
const GAP_TOL: f64 = 1e-6;
/// Gap errors below this are roundoff, where ordering carries no information.
const GAP_ROUNDOFF_FLOOR: f64 = 1e-12;
const RESONANT_JUMP_TOL: f64 = 1e-2;
const ORACLE_TOL: f64 = 1e-6;
const MASS_TOL: f64 = 1e-10;
const GOLDEN_TOL: f64 = 1e-9;
const DARK_RESIDUAL_TOL: f64 = 1e-12;
const ALGEBRA_TOL: f64 = 1e-10;
const NO_MIXING_TOL: f64 = 1e-8;
const STORAGE_MIN_FIDELITY: f64 = 0.99;
const STORAGE_CAP_TOL: f64 = 0.02;
const STORAGE_TIME_LIMIT: Duration = Duration::from_secs(300);
const CHI_IDENTITY_TOL: f64 = 1e-12;
const RESPONSE_TOL: f64 = 1e-8;
const PANEL_MATCH_TOL: f64 = 0.05;

const SEED: u64 = 0x5eed_0e17;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

type Criterion = fn() -> Result<Outcome>;

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("spectrum identity", spectrum_identity),
        ("oracle ladder", oracle_ladder),
        ("fidelity limits", fidelity_limits),
        ("fidelity oracle equivalence", fidelity_oracle_equivalence),
        ("efficiency sweep regression", efficiency_sweep_regression),
        ("dark-state zero mode", dark_state_zero_mode),
        ("collective algebra", collective_algebra),
        ("adiabatic storage", adiabatic_storage),
        ("susceptibility identities", susceptibility_identities),
        ("susceptibility regimes", susceptibility_regimes),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let clock = Instant::now();
        let outcome = match catch_unwind(AssertUnwindSafe(run)) {
            Ok(Ok(o)) => o,
            Ok(Err(e)) => Outcome::new(false, format!("error: {e}")),
            Err(p) => {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Outcome::new(false, format!("panic: {msg}"))
            }
        };
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "{} [{:>2}] {name}: {} ({:.1?})",
            if outcome.pass { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail,
            clock.elapsed()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

fn random_params(rng: &mut ChaCha8Rng) -> LightMediumParams {
    let omega = rng.gen_range(0.1..10.0);
    let omega0 = rng.gen_range(0.1..10.0);
    let g = rng.gen_range(0.0..0.99) * stability_bound(omega, omega0);
    LightMediumParams::new(omega, omega0, g).expect("inside the bound")
}

fn spectrum_identity() -> Result<Outcome> {
    let mut rng = rng();
    let (mut sum_err, mut prod_err, mut canon): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..500 {
        let p = random_params(&mut rng);
        let (w, w0, g) = (p.omega(), p.omega0(), p.coupling());
        let (o1, o2) = frequencies(&p);
        let sum = w * w + w0 * w0;
        let prod = w * w * w0 * w0 - 4.0 * w * w0 * g * g;
        sum_err = sum_err.max(((o1 * o1 + o2 * o2) - sum).abs() / sum);
        prod_err = prod_err.max(((o1 * o1 * o2 * o2) - prod).abs() / prod);
        canon = canon.max(canonical_residual(&diagonalize(&p)));
    }
    Ok(Outcome::new(
        sum_err < SPECTRUM_REL_TOL && prod_err < SPECTRUM_REL_TOL && canon < CANONICAL_TOL,
        format!(
            "500 draws: sum rel {sum_err:.1e}, product rel {prod_err:.1e}, canonical {canon:.1e}"
        ),
    ))
}

fn gap_errors(p: &LightMediumParams, cutoff: usize) -> Result<f64> {
    let spec = ModeSpec::new(&[cutoff, cutoff])?;
    let eig = exact_eigensystem(&build_light_medium(p, &spec)?)?;
    let (o1, o2) = frequencies(p);
    let e = &eig.values;
    Ok(((e[1] - e[0]) - o1).abs().max(((e[2] - e[0]) - o2).abs()))
}

fn oracle_ladder() -> Result<Outcome> {
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for omega0 in [0.9, 1.0] {
        for g in [0.05, 0.1] {
            let p = LightMediumParams::new(1.0, omega0, g)?;
            let errs = [
                gap_errors(&p, 15)?,
                gap_errors(&p, 20)?,
                gap_errors(&p, 25)?,
            ];
            let monotone = errs
                .windows(2)
                .all(|w| w[1] <= w[0].max(GAP_ROUNDOFF_FLOOR));
            pass &= errs[2] < GAP_TOL && monotone;
            worst = worst.max(errs[2]);
            notes.push(format!(
                "({omega0},{g}) {:.0e}/{:.0e}/{:.0e}",
                errs[0], errs[1], errs[2]
            ));
        }
    }
    Ok(Outcome::new(
        pass,
        format!(
            "max gap error at cutoff 25 {worst:.1e}; cutoffs 15/20/25: {}",
            notes.join(", ")
        ),
    ))
}

fn fidelity_limits() -> Result<Outcome> {
    let mut exact = true;
    for omega0 in [0.5, 0.9, 1.5] {
        let p = LightMediumParams::new(1.0, omega0, 0.0)?;
        for n in 0..=3 {
            exact &= transmission_efficiency(n, &p)? == 1.0;
        }
    }
    let mut worst: f64 = 0.0;
    for k in 4..=6 {
        let p = LightMediumParams::new(1.0, 1.0, 10f64.powi(-k))?;
        worst = worst.max((transmission_efficiency(1, &p)? - 0.5).abs());
    }
    Ok(Outcome::new(
        exact && worst < RESONANT_JUMP_TOL,
        format!("F_n(G=0) exactly 1: {exact}; resonant |F_1 - 0.5| <= {worst:.1e}"),
    ))
}

fn fidelity_oracle_equivalence() -> Result<Outcome> {
    let mut oracle_err: f64 = 0.0;
    let mut mass_err: f64 = 0.0;
    for ratio in [0.9, 0.95, 0.99] {
        for g in [0.01, 0.05, 0.1] {
            let p = LightMediumParams::new(1.0, ratio, g)?;
            let oracle = FockTransferOracle::new(&p, 25)?;
            for n in 0..=2 {
                let f = transmission_efficiency(n, &p)?;
                oracle_err = oracle_err.max((f - oracle.efficiency(n)?).abs());
                for mass in [0.5, 1.0, 7.3] {
                    let opts = TransferOptions {
                        mass,
                        ..TransferOptions::default()
                    };
                    mass_err =
                        mass_err.max((transmission_efficiency_with(n, &p, &opts)? - f).abs());
                }
            }
        }
    }
    Ok(Outcome::new(
        oracle_err < ORACLE_TOL && mass_err < MASS_TOL,
        format!("max |analytic - Fock| {oracle_err:.1e}; max mass spread {mass_err:.1e}"),
    ))
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
        .join(name)
}

/// Compare against the stored table, or store it when absent.
fn golden(name: &str, csv: &str) -> std::result::Result<String, String> {
    let path = golden_path(name);
    let update = std::env::var_os("UPDATE_GOLDEN").is_some_and(|v| v == "1");
    if update || !path.exists() {
        std::fs::create_dir_all(path.parent().unwrap()).map_err(|e| e.to_string())?;
        std::fs::write(&path, csv).map_err(|e| e.to_string())?;
        return Ok(format!("{name} written"));
    }
    let stored = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let (old, new): (Vec<&str>, Vec<&str>) = (stored.lines().collect(), csv.lines().collect());
    if old.len() != new.len() || old.first() != new.first() {
        return Err(format!("{name}: header or row count changed"));
    }
    let mut worst: f64 = 0.0;
    for (a, b) in old.iter().zip(&new).skip(1) {
        let (a, b): (Vec<&str>, Vec<&str>) = (a.split(',').collect(), b.split(',').collect());
        if a.len() != b.len() {
            return Err(format!("{name}: column count changed"));
        }
        for (x, y) in a.iter().zip(&b) {
            let (x, y): (f64, f64) = (
                x.parse().map_err(|_| "bad golden number")?,
                y.parse().map_err(|_| "bad number")?,
            );
            worst = worst.max((x - y).abs() / x.abs().max(1.0));
        }
    }
    if worst <= GOLDEN_TOL {
        Ok(format!("{name} matches ({worst:.0e})"))
    } else {
        Err(format!("{name} deviates by {worst:.1e}"))
    }
}

fn efficiency_sweep_regression() -> Result<Outcome> {
    let ratios = [0.9, 0.95, 0.99];
    let couplings: Vec<f64> = (0..=100).map(|k| k as f64 * 0.001).collect();
    let rows = fig3_sweep(&ratios, &couplings)?;
    let curve = |ratio: f64| -> Vec<f64> {
        rows.iter()
            .filter(|r| r.omega0_ratio == ratio)
            .map(|r| r.efficiency)
            .collect()
    };
    let curves: Vec<Vec<f64>> = ratios.iter().map(|&r| curve(r)).collect();
    let monotone = curves.iter().all(|c| c.windows(2).all(|w| w[1] <= w[0]));
    let ordered =
        (1..couplings.len()).all(|k| curves[0][k] > curves[1][k] && curves[1][k] > curves[2][k]);
    let (gold_ok, gold) = match golden("efficiency.csv", &efficiency_csv(&rows)) {
        Ok(s) => (true, s),
        Err(s) => (false, s),
    };
    Ok(Outcome::new(
        monotone && ordered && gold_ok,
        format!(
            "non-increasing {monotone}, ordered {ordered}; F_1 at G=0.1: {:.4}/{:.4}/{:.4}; {gold}",
            curves[0][100], curves[1][100], curves[2][100]
        ),
    ))
}

fn dark_state_zero_mode() -> Result<Outcome> {
    let mut rng = rng();
    let mut residual: f64 = 0.0;
    let mut slots_zero = true;
    for _ in 0..200 {
        let ctx = EitContext::new(
            rng.gen_range(0.0..5.0),
            rng.gen_range(0.01..2.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(0.05..1.2),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(1..1000),
        )?;
        for n1 in 0..=2 {
            for n2 in 0..=2 {
                let v = dark_state(n1, n2, &ctx)?.vector;
                let m = subspace_matrix(n1, n2, &ctx).matrix;
                residual = residual.max((m * v).amax());
                slots_zero &= v[0] == 0.0 && v[3] == 0.0;
            }
        }
    }
    Ok(Outcome::new(
        residual < DARK_RESIDUAL_TOL && slots_zero,
        format!("max |M v| {residual:.1e}; excited and c2 slots zero: {slots_zero}"),
    ))
}

fn collective_algebra() -> Result<Outcome> {
    let ctx = EitContext::new(0.8, 0.1, 0.3, 2.5, 0.9, 0.2, 49)?;
    let model = CollectiveModel::new(&ctx, [3; 4])?;
    let relations = model.commutation_residuals();
    let worst_relation = relations.iter().map(|(_, r)| *r).fold(0.0, f64::max);

    let theta = ctx.collective_angle()?.theta;
    let d = model.dark_mode(theta);
    let h_d = commutator(&model.hamiltonian(), &d)?.protected_residual();
    let d_dd = (&commutator(&d, &d.adjoint())? - &model.spec().identity()).protected_residual();

    let thetas: Vec<f64> = (1..=8).map(|k| k as f64 * FRAC_PI_2 / 9.0).collect();
    let mixing = no_mixing_check(&ctx, &thetas, 2)?;
    let mixing_worst = mixing.max_cross_coupling.max(mixing.max_self_real);
    Ok(Outcome::new(
        worst_relation < ALGEBRA_TOL && h_d < ALGEBRA_TOL && d_dd < ALGEBRA_TOL && mixing_worst < NO_MIXING_TOL,
        format!(
            "8 relations max {worst_relation:.1e}; [H,D] {h_d:.1e}; [D,D+]-1 {d_dd:.1e}; no-mixing max {mixing_worst:.1e} over {} pairs",
            mixing.pairs_checked
        ),
    ))
}

fn adiabatic_storage() -> Result<Outcome> {
    let durations = [2.0, 10.0, 50.0, 200.0, 1000.0];
    let run = |coupling: f64, t_eps: f64| -> Result<(f64, f64, Duration)> {
        let params = LightMediumParams::new(1.0, 0.9, coupling)?;
        let ctx = EitContext::from_basis(&diagonalize(&params), 0.0, 0.001, 0.0, 100)?;
        let model = CollectiveModel::new(&ctx, [2; 4])?;
        let initial = bare_photon_state(&model, &params, 1, 25)?;
        let eps = ctx.collective_coupling();
        let schedule = ControlSchedule::sin_squared(eps, t_eps / eps, DEFAULT_THETA_START)?;
        let clock = Instant::now();
        let out = adiabatic_sweep(&model, &schedule, &initial.state, &SweepOptions::default())?;
        Ok((
            out.fidelity,
            transmission_efficiency(1, &params)?,
            clock.elapsed(),
        ))
    };
    let mut fidelities = Vec::new();
    let mut slowest = Duration::ZERO;
    for t in durations {
        let (f, _, took) = run(0.0, t)?;
        fidelities.push(f);
        slowest = slowest.max(took);
    }
    let at_200 = fidelities[3];
    // The sweep starts at theta0 > 0, so the bare photon carries a bright
    // admixture sin^2(theta0) whose non-adiabatic leftovers interfere with
    // the stored amplitude; dips below that size are not a loss of adiabaticity.
    let slack = DEFAULT_THETA_START.sin().powi(2);
    let monotone = fidelities.windows(2).all(|w| w[1] >= w[0] - slack);
    let (capped, f1, took) = run(0.05, 1000.0)?;
    slowest = slowest.max(took);
    let cap_gap = (capped - f1).abs();
    let list: Vec<String> = fidelities.iter().map(|f| format!("{f:.5}")).collect();
    Ok(Outcome::new(
        at_200 >= STORAGE_MIN_FIDELITY
            && monotone
            && cap_gap < STORAGE_CAP_TOL
            && slowest <= STORAGE_TIME_LIMIT,
        format!(
            "G=0 fidelities {}; G=0.05: {capped:.4} vs F_1 {f1:.4}; slowest sweep {slowest:.1?}",
            list.join("/")
        ),
    ))
}

fn random_probe(rng: &mut ChaCha8Rng, decay: DecayRates) -> Result<ProbeContext> {
    ProbeContext::new(
        rng.gen_range(0.0..20.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-5.0..5.0),
        rng.gen_range(0.1..1.1),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(0.1..100.0),
        1e4,
        rng.gen_range(-3.0..3.0),
        decay,
    )
}

fn relative(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn susceptibility_identities() -> Result<Outcome> {
    let mut rng = rng();
    let mut chi_err: f64 = 0.0;
    for _ in 0..1000 {
        let decay = DecayRates::new(
            rng.gen_range(0.1..2.0),
            rng.gen_range(0.0..0.1),
            rng.gen_range(0.0..0.01),
        )?;
        let ctx = random_probe(&mut rng, decay)?;
        chi_err = chi_err.max(relative(
            chi_decomposition(&ctx)?.complex(),
            susceptibility(&ctx)?,
        ));
    }

    let mut linear_err: f64 = 0.0;
    let mut relax_err: f64 = 0.0;
    let drive = C64::new(1.0, 0.0);
    let zero = SteadyState {
        a: C64::new(0.0, 0.0),
        c_prime: C64::new(0.0, 0.0),
        c2: C64::new(0.0, 0.0),
    };
    for _ in 0..1000 {
        let decay = DecayRates::new(
            rng.gen_range(0.2..2.0),
            rng.gen_range(0.2..1.0),
            rng.gen_range(0.2..1.0),
        )?;
        let ctx = random_probe(&mut rng, decay)?;
        let closed = steady_state(&ctx, drive)?;
        let solved = linear_steady_state(&ctx, drive)?;
        let relaxed = relax_to_steady_state(&ctx, zero, drive, &RelaxOptions::default())?;
        linear_err = linear_err.max(relative(solved.a, closed.a));
        relax_err = relax_err.max(relative(relaxed.last().a, closed.a));
    }
    Ok(Outcome::new(
        chi_err < CHI_IDENTITY_TOL && linear_err < RESPONSE_TOL && relax_err < RESPONSE_TOL,
        format!("chi vs decomposition {chi_err:.1e}; <A> vs linear solve {linear_err:.1e}, vs relaxation {relax_err:.1e}"),
    ))
}

fn susceptibility_regimes() -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let mut gold_ok = true;
    for panel in ProbePanel::ALL {
        let r = fig4_sweep(&panel.config())?;
        match golden(&format!("chi_{}.csv", panel.label()), &chi_csv(&r)) {
            Ok(s) => notes.push(s),
            Err(s) => {
                gold_ok = false;
                notes.push(s)
            }
        }
        rows.push(r);
    }
    let metrics = |r: &[polariton_eit::optics::ChiRow]| {
        let deltas: Vec<f64> = r.iter().map(|x| x.delta).collect();
        let curve: Vec<_> = r.iter().map(|x| x.susceptibility()).collect();
        transparency_metrics(&deltas, &curve)
    };
    let dist_b = relative_sup_distance(&rows[0], &rows[1])?;
    let dist_c = relative_sup_distance(&rows[0], &rows[2])?;
    let dist_d = relative_sup_distance(&rows[0], &rows[3])?;
    let half_window = metrics(&rows[0])?.width / 2.0;
    let shift_d = metrics(&rows[3])?.center.abs();
    let displaced = shift_d > half_window;
    Ok(Outcome::new(
        dist_b < PANEL_MATCH_TOL && dist_c < PANEL_MATCH_TOL && dist_d > PANEL_MATCH_TOL && displaced && gold_ok,
        format!(
            "distance to (a): b {dist_b:.4}, c {dist_c:.4}, d {dist_d:.4}; (d) minimum shift {shift_d:.4} vs (a) half-window {half_window:.4}{}; {}",
            if displaced { "" } else { " (not displaced)" },
            notes.join(", ")
        ),
    ))
}

fn run_cli(
    args: &[&str],
    out: &std::path::Path,
) -> std::result::Result<(Vec<u8>, Vec<u8>), String> {
    let output = Command::new(env!("CARGO_BIN_EXE_polariton-eit"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("POLARITON_EIT_THREADS", "2")
        .output()
        .map_err(|e| e.to_string())?;
    if !output.status.success() {
        return Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&output.stderr)
        ));
    }
    let csv = std::fs::read(out).map_err(|e| e.to_string())?;
    Ok((csv, output.stdout))
}

fn cli_determinism() -> Result<Outcome> {
    let dir = tempfile::tempdir()?;
    let write = |name: &str, body: &str| -> std::io::Result<String> {
        let path = dir.path().join(name);
        std::fs::write(&path, body)?;
        Ok(path.to_string_lossy().into_owned())
    };
    let spectrum = write(
        "spectrum.json",
        r#"{"version":1,"omega":1,"omega0":0.9,"G":{"min":0,"max":0.2,"points":21}}"#,
    )?;
    let transfer = write(
        "transfer.json",
        r#"{"version":1,"ratios":[0.9,0.99],"G":[0.01,0.05,0.1]}"#,
    )?;
    let adiabatic = write(
        "adiabatic.json",
        r#"{"version":1,"omega":1,"omega0":0.9,"G":0.05,"g":0.001,"atoms":100,"duration_eps":20,"samples":50}"#,
    )?;
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("spectrum", vec!["spectrum", "--config", &spectrum]),
        (
            "transfer",
            vec!["transfer", "--config", &transfer, "--oracle", "--n", "2"],
        ),
        ("adiabatic", vec!["adiabatic", "--config", &adiabatic]),
        ("chi", vec!["chi", "--panel", "d"]),
    ];
    let mut same = Vec::new();
    let mut pass = true;
    for (name, args) in &cases {
        let first = run_cli(args, &dir.path().join(format!("{name}-1.csv")));
        let second = run_cli(args, &dir.path().join(format!("{name}-2.csv")));
        match (first, second) {
            (Ok(a), Ok(b)) => {
                let equal = a == b && !a.0.is_empty();
                pass &= equal;
                same.push(format!(
                    "{name} {}",
                    if equal { "identical" } else { "DIFFERS" }
                ));
            }
            (Err(e), _) | (_, Err(e)) => {
                pass = false;
                same.push(format!("{name} failed: {e}"));
            }
        }
    }
    Ok(Outcome::new(pass, same.join(", ")))
}
