use nalgebra::Matrix3;

use super::{EitContext, MixingAngle};
use crate::error::{Error, Result};
use crate::fockspace::{commutator, ladder, overlap, FockOperator, FockState, ModeSpec, C64};

pub const MODE_C1: usize = 0;
pub const MODE_C2: usize = 1;
pub const MODE_A: usize = 2;
pub const MODE_C: usize = 3;

/// Four bosonic modes `(c1, c2, A, C)` with
/// `H = W2 c2'c2 + D A'A + xi (A'C + C'A) + g u1 sqrt(M) (c1 A' + h.c.)
///    + g u2 sqrt(M) (c2 A' + h.c.)`.
/// The quasi-spin operators are represented as `S = A'A`, `T+ = A'C`.
#[derive(Clone, Debug)]
pub struct CollectiveModel {
    ctx: EitContext,
    spec: ModeSpec,
    lowering: [FockOperator; 4],
    static_part: FockOperator,
    control_part: FockOperator,
}

/// `x y' + h.c.`
fn hop(x: &FockOperator, y: &FockOperator) -> FockOperator {
    let t = &y.adjoint() * x;
    &t + &t.adjoint()
}

impl CollectiveModel {
    pub fn new(ctx: &EitContext, cutoffs: [usize; 4]) -> Result<Self> {
        let spec = ModeSpec::new(&cutoffs)?;
        let ops = (0..4)
            .map(|m| ladder(&spec, m).map(|(lower, _)| lower))
            .collect::<Result<Vec<_>>>()?;
        let lowering: [FockOperator; 4] = ops.try_into().expect("four modes");
        let [c1, c2, a, c] = &lowering;

        let mut static_part = (&c2.adjoint() * c2).scale_real(ctx.omega2_tilde);
        static_part.add_scaled(ctx.delta_cap, &(&a.adjoint() * a))?;
        static_part.add_scaled(ctx.collective_coupling(), &hop(c1, a))?;
        static_part.add_scaled(ctx.spectator_coupling(), &hop(c2, a))?;
        let control_part = hop(c, a);
        Ok(Self {
            ctx: *ctx,
            spec,
            lowering,
            static_part,
            control_part,
        })
    }

    pub fn context(&self) -> &EitContext {
        &self.ctx
    }

    pub fn spec(&self) -> &ModeSpec {
        &self.spec
    }

    pub fn lowering(&self, mode: usize) -> &FockOperator {
        &self.lowering[mode]
    }

    pub fn number(&self, mode: usize) -> FockOperator {
        &self.lowering[mode].adjoint() * &self.lowering[mode]
    }

    pub fn total_excitation(&self) -> FockOperator {
        let mut n = self.spec.zero_operator();
        for m in 0..4 {
            n = &n + &self.number(m);
        }
        n
    }

    pub fn hamiltonian(&self) -> FockOperator {
        self.hamiltonian_at(self.ctx.xi)
    }

    /// The Hamiltonian with the control amplitude replaced by `xi`.
    pub fn hamiltonian_at(&self, xi: f64) -> FockOperator {
        let mut h = self.static_part.clone();
        h.add_scaled(xi, &self.control_part)
            .expect("parts share one mode spec");
        h
    }

    /// `D = c1 cos(theta) - C sin(theta)`.
    pub fn dark_mode(&self, theta: f64) -> FockOperator {
        let (s, c) = theta.sin_cos();
        let mut d = self.lowering[MODE_C1].scale_real(c);
        d.add_scaled(-s, &self.lowering[MODE_C]).expect("same spec");
        d
    }

    /// `B = c1 sin(theta) + C cos(theta)`.
    pub fn bright_mode(&self, theta: f64) -> FockOperator {
        let (s, c) = theta.sin_cos();
        let mut b = self.lowering[MODE_C1].scale_real(s);
        b.add_scaled(c, &self.lowering[MODE_C]).expect("same spec");
        b
    }

    /// `D'^n |0> / sqrt(n!)`.
    pub fn dark_fock_state(&self, n: usize, theta: f64) -> FockState {
        let raise = self.dark_mode(theta).adjoint();
        let mut psi = self.spec.vacuum();
        for k in 1..=n {
            psi = raise
                .apply(&psi)
                .expect("same spec")
                .scale(C64::new(1.0 / (k as f64).sqrt(), 0.0));
        }
        psi
    }

    /// Residuals on the protected subspace of the eight basic commutation
    /// relations of `A`, `C`, `S = A'A`, `T+ = A'C`, `T- = C'A`.
    pub fn commutation_residuals(&self) -> Vec<(&'static str, f64)> {
        let a = &self.lowering[MODE_A];
        let c = &self.lowering[MODE_C];
        let (ad, cd) = (a.adjoint(), c.adjoint());
        let s = &ad * a;
        let t_plus = &ad * c;
        let t_minus = &cd * a;
        let one = self.spec.identity();
        let zero = self.spec.zero_operator();
        let check = |x: &FockOperator, y: &FockOperator, expected: &FockOperator| {
            (&commutator(x, y).expect("same spec") - expected).protected_residual()
        };
        vec![
            ("[A,S]=A", check(a, &s, a)),
            ("[C,S]=0", check(c, &s, &zero)),
            ("[A,A+]=1", check(a, &ad, &one)),
            ("[C,C+]=1", check(c, &cd, &one)),
            ("[T+,C+]=A+", check(&t_plus, &cd, &ad)),
            ("[T-,A+]=C+", check(&t_minus, &ad, &cd)),
            ("[S,T+]=T+", check(&s, &t_plus, &t_plus)),
            ("[S,T-]=-T-", check(&s, &t_minus, &t_minus.scale_real(-1.0))),
        ]
    }
}

pub fn collective_hamiltonian(ctx: &EitContext, cutoffs: [usize; 4]) -> Result<FockOperator> {
    Ok(CollectiveModel::new(ctx, cutoffs)?.hamiltonian())
}

/// Dark-mode operator at the context's control amplitude.
pub fn dark_mode_operator(
    ctx: &EitContext,
    cutoffs: [usize; 4],
) -> Result<(FockOperator, MixingAngle)> {
    let angle = ctx.collective_angle()?;
    let model = CollectiveModel::new(ctx, cutoffs)?;
    Ok((model.dark_mode(angle.theta), angle))
}

/// Normal modes of the bright sector, spanned by `A`, the bright polariton
/// `B` and `c2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BrightSector {
    /// Ascending.
    pub energies: [f64; 3],
    /// `rows[i]` holds the coefficients of `Q_i` on `(A, B, c2)`.
    pub rows: [[f64; 3]; 3],
    /// `sqrt(g^2 u1^2 M + xi^2)`.
    pub bright_coupling: f64,
    /// Worst `[Q_i, H] - e_i Q_i` on the protected subspace.
    pub eigen_residual: f64,
    /// `[H, B'] - e A'` on the protected subspace.
    pub raises_excited_residual: f64,
    /// `[H, B'] - e B'` on the protected subspace.
    pub raises_bright_residual: f64,
}

fn bright_block(ctx: &EitContext) -> ([f64; 3], [[f64; 3]; 3], f64) {
    let eps = ctx.collective_coupling().hypot(ctx.xi);
    let w = ctx.spectator_coupling();
    #[rustfmt::skip]
    let m = Matrix3::new(
        ctx.delta_cap, eps, w,
        eps,           0.0, 0.0,
        w,             0.0, ctx.omega2_tilde,
    );
    let eig = m.symmetric_eigen();
    let mut order = [0, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut energies = [0.0; 3];
    let mut rows = [[0.0; 3]; 3];
    for (k, &i) in order.iter().enumerate() {
        energies[k] = eig.eigenvalues[i];
        let col = eig.eigenvectors.column(i);
        let pivot = (0..3)
            .max_by(|&p, &q| col[p].abs().total_cmp(&col[q].abs()))
            .unwrap_or(0);
        let sign = col[pivot].signum();
        for p in 0..3 {
            rows[k][p] = sign * col[p];
        }
    }
    (energies, rows, eps)
}

fn q_operator(model: &CollectiveModel, theta: f64, row: &[f64; 3]) -> FockOperator {
    let mut q = model.lowering(MODE_A).scale_real(row[0]);
    q.add_scaled(row[1], &model.bright_mode(theta))
        .expect("same spec");
    q.add_scaled(row[2], model.lowering(MODE_C2))
        .expect("same spec");
    q
}

pub fn bright_sector_spectrum(ctx: &EitContext, cutoffs: [usize; 4]) -> Result<BrightSector> {
    let model = CollectiveModel::new(ctx, cutoffs)?;
    let h = model.hamiltonian();
    let theta = ctx.collective_coupling().abs().atan2(ctx.xi);
    let (energies, rows, eps) = bright_block(ctx);

    let mut eigen_residual: f64 = 0.0;
    for (e, row) in energies.iter().zip(&rows) {
        let q = q_operator(&model, theta, row);
        let r = (&commutator(&q, &h)? - &q.scale_real(*e)).protected_residual();
        eigen_residual = eigen_residual.max(r);
    }
    let bd = model.bright_mode(theta).adjoint();
    let ad = model.lowering(MODE_A).adjoint();
    let hb = commutator(&h, &bd)?;
    Ok(BrightSector {
        energies,
        rows,
        bright_coupling: eps,
        eigen_residual,
        raises_excited_residual: (&hb - &ad.scale_real(eps)).protected_residual(),
        raises_bright_residual: (&hb - &bd.scale_real(eps)).protected_residual(),
    })
}

/// Eigenstate `Q1'^m1 Q2'^m2 Q3'^m3 |D_n> / sqrt(m1! m2! m3!)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DressedLabel {
    pub bright: [usize; 3],
    pub dark: usize,
}

impl DressedLabel {
    pub fn dark(n: usize) -> Self {
        Self {
            bright: [0; 3],
            dark: n,
        }
    }

    fn quanta(&self) -> usize {
        self.bright.iter().sum::<usize>() + self.dark
    }
}

/// Dressed operators at one value of the mixing angle; the control amplitude
/// is `g u1 sqrt(M) cot(theta)`.
struct DressedFrame {
    raising: [FockOperator; 3],
    dark_raising: FockOperator,
    energies: [f64; 3],
    rows: [[f64; 3]; 3],
    vacuum: FockState,
}

impl DressedFrame {
    fn new(
        ctx: &EitContext,
        spec_cutoff: usize,
        theta: f64,
        gauge: Option<&[[f64; 3]; 3]>,
    ) -> Result<Self> {
        let xi = ctx.collective_coupling() / theta.tan();
        let ctx = ctx.with_xi(xi.max(0.0));
        let model = CollectiveModel::new(&ctx, [spec_cutoff; 4])?;
        let (energies, mut rows, _) = bright_block(&ctx);
        if let Some(reference) = gauge {
            for (row, r) in rows.iter_mut().zip(reference) {
                let dot: f64 = row.iter().zip(r).map(|(x, y)| x * y).sum();
                if dot < 0.0 {
                    row.iter_mut().for_each(|v| *v = -*v);
                }
            }
        }
        let raising = [0, 1, 2].map(|i| q_operator(&model, theta, &rows[i]).adjoint());
        Ok(Self {
            raising,
            dark_raising: model.dark_mode(theta).adjoint(),
            energies,
            rows,
            vacuum: model.spec().vacuum(),
        })
    }

    fn energy(&self, label: &DressedLabel) -> f64 {
        label
            .bright
            .iter()
            .zip(&self.energies)
            .map(|(&m, e)| m as f64 * e)
            .sum()
    }

    fn state(&self, label: &DressedLabel) -> FockState {
        let mut psi = self.vacuum.clone();
        let mut raise = |op: &FockOperator, count: usize| {
            for k in 1..=count {
                psi = op
                    .apply(&psi)
                    .expect("same spec")
                    .scale(C64::new(1.0 / (k as f64).sqrt(), 0.0));
            }
        };
        raise(&self.dark_raising, label.dark);
        for i in (0..3).rev() {
            raise(&self.raising[i], label.bright[i]);
        }
        psi
    }
}

const THETA_STEP: f64 = 1e-5;

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("must lie in (0, pi/2], got {theta}"),
        })
    }
}

/// `<bra(theta)| d/dtheta |ket(theta)>` by central differences.
pub fn derivative_coupling(
    ctx: &EitContext,
    theta: f64,
    bra: DressedLabel,
    ket: DressedLabel,
) -> Result<C64> {
    if ctx.collective_coupling() == 0.0 {
        return Err(Error::DegenerateDark);
    }
    check_theta(theta)?;
    let cutoff = bra.quanta().max(ket.quanta()).max(1);
    let here = DressedFrame::new(ctx, cutoff, theta, None)?;
    let fd = FiniteDifference::new(ctx, cutoff, theta, &here)?;
    fd.coupling(&here, &bra, &ket)
}

struct FiniteDifference {
    plus: DressedFrame,
    minus: DressedFrame,
    step: f64,
}

impl FiniteDifference {
    fn new(ctx: &EitContext, cutoff: usize, theta: f64, here: &DressedFrame) -> Result<Self> {
        // one-sided at the pi/2 end, where cot(theta) would turn negative
        let hi = (theta + THETA_STEP).min(std::f64::consts::FRAC_PI_2);
        let lo = hi - 2.0 * THETA_STEP;
        Ok(Self {
            plus: DressedFrame::new(ctx, cutoff, hi, Some(&here.rows))?,
            minus: DressedFrame::new(ctx, cutoff, lo, Some(&here.rows))?,
            step: hi - lo,
        })
    }

    fn coupling(&self, here: &DressedFrame, bra: &DressedLabel, ket: &DressedLabel) -> Result<C64> {
        let x = here.state(bra);
        let mut diff = self.plus.state(ket);
        diff.add_scaled(C64::new(-1.0, 0.0), &self.minus.state(ket))?;
        Ok(overlap(&x, &diff)? / self.step)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoMixingReport {
    /// Zero-energy states found at the first angle of the grid.
    pub zero_states: Vec<DressedLabel>,
    /// Largest `|<X| d/dtheta |Y>|` over distinct zero-energy pairs.
    pub max_cross_coupling: f64,
    /// Largest `|Re <X| d/dtheta |X>|`.
    pub max_self_real: f64,
    pub pairs_checked: usize,
}

/// Derivative couplings among the zero-energy dressed states with at most
/// `max_dark` dark quanta and two bright quanta, on every angle of the grid.
pub fn no_mixing_check(
    ctx: &EitContext,
    thetas: &[f64],
    max_dark: usize,
) -> Result<NoMixingReport> {
    if ctx.collective_coupling() == 0.0 {
        return Err(Error::DegenerateDark);
    }
    let cutoff = max_dark + 2;
    let mut labels = Vec::new();
    for n in 0..=max_dark {
        for m1 in 0..=2 {
            for m2 in 0..=2 - m1 {
                for m3 in 0..=2 - m1 - m2 {
                    labels.push(DressedLabel {
                        bright: [m1, m2, m3],
                        dark: n,
                    });
                }
            }
        }
    }

    let mut report = NoMixingReport {
        zero_states: Vec::new(),
        max_cross_coupling: 0.0,
        max_self_real: 0.0,
        pairs_checked: 0,
    };
    for (k, &theta) in thetas.iter().enumerate() {
        check_theta(theta)?;
        let here = DressedFrame::new(ctx, cutoff, theta, None)?;
        let scale = here.energies.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let zero: Vec<DressedLabel> = labels
            .iter()
            .copied()
            .filter(|l| here.energy(l).abs() <= 1e-9 * scale)
            .collect();
        let fd = FiniteDifference::new(ctx, cutoff, theta, &here)?;
        for x in &zero {
            for y in &zero {
                let d = fd.coupling(&here, x, y)?;
                if x == y {
                    report.max_self_real = report.max_self_real.max(d.re.abs());
                } else {
                    report.max_cross_coupling = report.max_cross_coupling.max(d.norm());
                    report.pairs_checked += 1;
                }
            }
        }
        if k == 0 {
            report.zero_states = zero;
        }
    }
    Ok(report)
}
