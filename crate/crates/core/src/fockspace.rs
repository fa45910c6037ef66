//! Dense linear algebra on a truncated multimode Fock space.
//!
//! Basis states are product states `|n_0, n_1, ...>` with `n_k <= cutoff_k`,
//! indexed in mixed radix with the last mode varying fastest. Everything here
//! is brute force on purpose: it is the reference every closed form in the
//! crate gets checked against.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Sub};

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hopfield::LightMediumParams;

pub type C64 = Complex<f64>;

pub const DEFAULT_DIMENSION_CAP: usize = 200_000;

const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[inline]
pub(crate) fn c64(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Per-mode occupation cutoffs of a truncated product space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeSpec {
    cutoffs: Vec<usize>,
    strides: Vec<usize>,
    dimension: usize,
}

impl ModeSpec {
    pub fn new(cutoffs: &[usize]) -> Result<Self> {
        Self::with_cap(cutoffs, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(cutoffs: &[usize], cap: usize) -> Result<Self> {
        if cutoffs.is_empty() {
            return Err(Error::InvalidParameter {
                name: "cutoffs",
                reason: "at least one mode is required".into(),
            });
        }
        if let Some(&c) = cutoffs.iter().find(|&&c| c < 1) {
            return Err(Error::InvalidParameter {
                name: "cutoffs",
                reason: format!("every cutoff must be >= 1, got {c}"),
            });
        }
        let mut dimension: usize = 1;
        for &c in cutoffs {
            dimension = dimension.saturating_mul(c + 1);
        }
        if dimension > cap {
            return Err(Error::DimensionCap { dimension, cap });
        }
        let mut strides = vec![1; cutoffs.len()];
        for k in (0..cutoffs.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * (cutoffs[k + 1] + 1);
        }
        Ok(Self {
            cutoffs: cutoffs.to_vec(),
            strides,
            dimension,
        })
    }

    pub fn modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn index_of(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.modes() {
            return Err(Error::ShapeMismatch(format!(
                "{} occupations for {} modes",
                occupations.len(),
                self.modes()
            )));
        }
        let mut index = 0;
        for (k, (&n, &c)) in occupations.iter().zip(&self.cutoffs).enumerate() {
            if n > c {
                return Err(Error::InvalidParameter {
                    name: "occupation",
                    reason: format!("mode {k} occupation {n} exceeds cutoff {c}"),
                });
            }
            index += n * self.strides[k];
        }
        Ok(index)
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        self.cutoffs
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| (index / s) % (c + 1))
            .collect()
    }

    fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % (self.cutoffs[mode] + 1)
    }

    /// Basis states away from the truncation edge: every occupation at most
    /// `cutoff - 2`. Ladder and commutator identities are exact on these.
    pub fn is_protected(&self, index: usize) -> bool {
        self.occupations(index)
            .iter()
            .zip(&self.cutoffs)
            .all(|(&n, &c)| n + 2 <= c)
    }

    pub fn protected_indices(&self) -> Vec<usize> {
        (0..self.dimension)
            .filter(|&i| self.is_protected(i))
            .collect()
    }

    pub fn total_occupation(&self, index: usize) -> usize {
        self.occupations(index).iter().sum()
    }

    pub fn basis_state(&self, occupations: &[usize]) -> Result<FockState> {
        let mut v = DVector::zeros(self.dimension);
        v[self.index_of(occupations)?] = c64(1.0);
        Ok(FockState {
            spec: self.clone(),
            vector: v,
        })
    }

    pub fn vacuum(&self) -> FockState {
        let mut v = DVector::zeros(self.dimension);
        v[0] = c64(1.0);
        FockState {
            spec: self.clone(),
            vector: v,
        }
    }

    pub fn identity(&self) -> FockOperator {
        FockOperator {
            spec: self.clone(),
            matrix: DMatrix::identity(self.dimension, self.dimension),
        }
    }

    pub fn zero_operator(&self) -> FockOperator {
        FockOperator {
            spec: self.clone(),
            matrix: DMatrix::zeros(self.dimension, self.dimension),
        }
    }
}

/// Dense operator on a truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    spec: ModeSpec,
    matrix: DMatrix<C64>,
}

impl FockOperator {
    pub fn from_matrix(spec: &ModeSpec, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != spec.dimension() || matrix.ncols() != spec.dimension() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix for dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                spec.dimension()
            )));
        }
        Ok(Self {
            spec: spec.clone(),
            matrix,
        })
    }

    pub fn spec(&self) -> &ModeSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            spec: self.spec.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            spec: self.spec.clone(),
            matrix: &self.matrix * factor,
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(c64(factor))
    }

    /// `self + factor * other`, in place.
    pub fn add_scaled(&mut self, factor: f64, other: &FockOperator) -> Result<()> {
        check_specs(&self.spec, &other.spec)?;
        self.matrix
            .zip_apply(&other.matrix, |a, b| *a += b * factor);
        Ok(())
    }

    /// Largest entry of `H - H†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut dev: f64 = 0.0;
        for j in 0..n {
            for i in 0..=j {
                dev = dev.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Largest absolute column sum; an upper bound on the spectral norm for
    /// Hermitian operators.
    pub fn norm_one(&self) -> f64 {
        self.matrix
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest matrix entry in the columns of protected basis states, i.e. the
    /// size of this operator's action on the subspace away from the
    /// truncation edge.
    pub fn protected_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in self.spec.protected_indices() {
            for z in self.matrix.column(j).iter() {
                worst = worst.max(z.norm());
            }
        }
        worst
    }

    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        check_specs(&self.spec, &state.spec)?;
        Ok(FockState {
            spec: self.spec.clone(),
            vector: &self.matrix * &state.vector,
        })
    }

    pub fn try_mul(&self, other: &FockOperator) -> Result<FockOperator> {
        check_specs(&self.spec, &other.spec)?;
        // Operators built from ladders have a handful of entries per column,
        // so skip the zeros of the sparser factor.
        let nnz = |m: &DMatrix<C64>| m.iter().filter(|z| **z != C64::new(0.0, 0.0)).count();
        let matrix = if nnz(&other.matrix) <= nnz(&self.matrix) {
            sparse_right_product(&self.matrix, &other.matrix)
        } else {
            sparse_right_product(&other.matrix.transpose(), &self.matrix.transpose()).transpose()
        };
        Ok(Self {
            spec: self.spec.clone(),
            matrix,
        })
    }
}

/// `l * r`, iterating only over the nonzero entries of `r`.
fn sparse_right_product(l: &DMatrix<C64>, r: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(l.nrows(), r.ncols());
    for j in 0..r.ncols() {
        for k in 0..r.nrows() {
            let v = r[(k, j)];
            if v != C64::new(0.0, 0.0) {
                out.column_mut(j).axpy(v, &l.column(k), C64::new(1.0, 0.0));
            }
        }
    }
    out
}

impl Add for &FockOperator {
    type Output = FockOperator;

    fn add(self, rhs: &FockOperator) -> FockOperator {
        assert_eq!(self.spec, rhs.spec, "operator mode specs differ");
        FockOperator {
            spec: self.spec.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;

    fn sub(self, rhs: &FockOperator) -> FockOperator {
        assert_eq!(self.spec, rhs.spec, "operator mode specs differ");
        FockOperator {
            spec: self.spec.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;

    fn mul(self, rhs: &FockOperator) -> FockOperator {
        self.try_mul(rhs).expect("operator mode specs differ")
    }
}

/// State vector on a truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    spec: ModeSpec,
    vector: DVector<C64>,
}

impl FockState {
    pub fn from_vector(spec: &ModeSpec, vector: DVector<C64>) -> Result<Self> {
        if vector.len() != spec.dimension() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} for dimension {}",
                vector.len(),
                spec.dimension()
            )));
        }
        Ok(Self {
            spec: spec.clone(),
            vector,
        })
    }

    pub fn spec(&self) -> &ModeSpec {
        &self.spec
    }

    pub fn vector(&self) -> &DVector<C64> {
        &self.vector
    }

    pub fn norm(&self) -> f64 {
        self.vector.norm()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self {
            spec: self.spec.clone(),
            vector: &self.vector / c64(n),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            spec: self.spec.clone(),
            vector: &self.vector * factor,
        }
    }

    pub fn add_scaled(&mut self, factor: C64, other: &FockState) -> Result<()> {
        check_specs(&self.spec, &other.spec)?;
        self.vector.axpy(factor, &other.vector, c64(1.0));
        Ok(())
    }

    /// `<self| op |self>`.
    pub fn expectation(&self, op: &FockOperator) -> Result<C64> {
        overlap(self, &op.apply(self)?)
    }

    /// Probability of finding exactly the given occupations.
    pub fn population(&self, occupations: &[usize]) -> Result<f64> {
        Ok(self.vector[self.spec.index_of(occupations)?].norm_sqr())
    }
}

fn check_specs(a: &ModeSpec, b: &ModeSpec) -> Result<()> {
    if a != b {
        return Err(Error::ShapeMismatch(format!(
            "cutoffs {:?} vs {:?}",
            a.cutoffs(),
            b.cutoffs()
        )));
    }
    Ok(())
}

/// Lowering and raising operators of one mode, with matrix elements `sqrt(n)`.
pub fn ladder(spec: &ModeSpec, mode: usize) -> Result<(FockOperator, FockOperator)> {
    if mode >= spec.modes() {
        return Err(Error::IndexOutOfRange {
            index: mode,
            modes: spec.modes(),
        });
    }
    let dim = spec.dimension();
    let stride = spec.strides[mode];
    let mut lower = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let n = spec.occupation(col, mode);
        if n > 0 {
            lower[(col - stride, col)] = c64((n as f64).sqrt());
        }
    }
    let lowering = FockOperator {
        spec: spec.clone(),
        matrix: lower,
    };
    let raising = lowering.adjoint();
    Ok((lowering, raising))
}

/// `a_k† a_k`.
pub fn number(spec: &ModeSpec, mode: usize) -> Result<FockOperator> {
    if mode >= spec.modes() {
        return Err(Error::IndexOutOfRange {
            index: mode,
            modes: spec.modes(),
        });
    }
    let dim = spec.dimension();
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = c64(spec.occupation(i, mode) as f64);
    }
    Ok(FockOperator {
        spec: spec.clone(),
        matrix: m,
    })
}

/// Sum of all mode occupations.
pub fn total_number(spec: &ModeSpec) -> FockOperator {
    let dim = spec.dimension();
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = c64(spec.total_occupation(i) as f64);
    }
    FockOperator {
        spec: spec.clone(),
        matrix: m,
    }
}

/// `omega a†a + omega0 B†B + G (a + a†)(B + B†)` on a two-mode space
/// (mode 0 = photon, mode 1 = exciton).
pub fn build_light_medium(params: &LightMediumParams, spec: &ModeSpec) -> Result<FockOperator> {
    if spec.modes() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "light-medium Hamiltonian needs 2 modes, got {}",
            spec.modes()
        )));
    }
    let (a, ad) = ladder(spec, 0)?;
    let (b, bd) = ladder(spec, 1)?;
    let mut h = number(spec, 0)?.scale_real(params.omega());
    h.add_scaled(params.omega0(), &number(spec, 1)?)?;
    let field = &a + &ad;
    let exciton = &b + &bd;
    h.add_scaled(params.coupling(), &(&field * &exciton))?;
    Ok(h)
}

/// `XY - YX`.
pub fn commutator(x: &FockOperator, y: &FockOperator) -> Result<FockOperator> {
    check_specs(&x.spec, &y.spec)?;
    Ok(FockOperator {
        spec: x.spec.clone(),
        matrix: &x.matrix * &y.matrix - &y.matrix * &x.matrix,
    })
}

/// `<x|y>`.
pub fn overlap(x: &FockState, y: &FockState) -> Result<C64> {
    check_specs(&x.spec, &y.spec)?;
    Ok(x.vector.dotc(&y.vector))
}

/// Full spectrum of a Hermitian operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    spec: ModeSpec,
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<C64>,
}

impl Eigensystem {
    pub fn state(&self, index: usize) -> FockState {
        FockState {
            spec: self.spec.clone(),
            vector: self.vectors.column(index).into_owned(),
        }
    }

    /// Index of the eigenvalue closest to `target`, provided no other
    /// eigenvalue lies within `separation` of it.
    pub fn isolated_near(&self, target: f64, separation: f64) -> Option<usize> {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&i, &j| {
            (self.values[i] - target)
                .abs()
                .total_cmp(&(self.values[j] - target).abs())
        });
        let best = *order.first()?;
        match order.get(1) {
            Some(&next) if (self.values[next] - target).abs() < separation => None,
            _ => Some(best),
        }
    }

    /// Debug dump, columns `index,eigenvalue`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{i},{v}");
        }
        out
    }
}

/// Diagonalize a Hermitian operator. Each eigenvector's phase is fixed by
/// making its largest-magnitude component real and positive.
pub fn exact_eigensystem(h: &FockOperator) -> Result<Eigensystem> {
    let scale = h.matrix.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let deviation = h.hermitian_deviation();
    if deviation > HERMITIAN_TOLERANCE * scale {
        return Err(Error::NotHermitian { deviation });
    }
    let dim = h.matrix.nrows();
    let is_real = h.matrix.iter().all(|z| z.im == 0.0);

    let (values, vectors): (Vec<f64>, DMatrix<C64>) = if is_real {
        let re = h.matrix.map(|z| z.re);
        let sym = (&re + re.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(c64),
        )
    } else {
        let herm = (&h.matrix + h.matrix.adjoint()) * c64(0.5);
        let eig = herm.symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));

    let mut sorted = DMatrix::zeros(dim, dim);
    for (col, &src) in order.iter().enumerate() {
        let v = vectors.column(src);
        let peak = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let pivot = v
            .iter()
            .position(|z| z.norm() >= peak * (1.0 - 1e-9))
            .unwrap_or(0);
        let phase = v[pivot].conj() / v[pivot].norm();
        for row in 0..dim {
            sorted[(row, col)] = v[row] * phase;
        }
    }
    Ok(Eigensystem {
        spec: h.spec.clone(),
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: sorted,
    })
}

/// Integration controls for [`evolve`].
#[derive(Clone, Debug)]
pub struct EvolveOptions {
    /// Number of equally spaced output samples after the initial state.
    pub samples: usize,
    pub max_step: f64,
    pub min_step: f64,
    /// Allowed change of the norm in a single step.
    pub step_norm_tolerance: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            samples: 100,
            max_step: 0.05,
            min_step: 1e-12,
            step_norm_tolerance: 1e-13,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<FockState>,
}

impl Trajectory {
    pub fn last(&self) -> &FockState {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    /// Largest `| |psi(t)| - 1 |` along the trajectory.
    pub fn max_norm_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Apply `exp(-i H h)` to `psi` by a Taylor series; `None` when the series
/// has not converged within the term budget.
fn exp_step(h: &DMatrix<C64>, psi: &DVector<C64>, step: f64) -> Option<DVector<C64>> {
    const MAX_TERMS: usize = 60;
    let scale = psi.norm().max(f64::MIN_POSITIVE);
    let mut out = psi.clone();
    let mut term = psi.clone();
    let mut buf = DVector::zeros(psi.len());
    for k in 1..=MAX_TERMS {
        buf.gemv(C64::new(0.0, -step / k as f64), h, &term, c64(0.0));
        std::mem::swap(&mut term, &mut buf);
        out += &term;
        if term.norm() <= 1e-17 * scale {
            return Some(out);
        }
    }
    None
}

/// Integrate `i d/dt psi = H(t) psi` with time-ordered exponential-midpoint
/// steps. The step is limited by `max_step` and by `||H|| * step <= 1`, and is
/// halved whenever a step changes the norm by more than the tolerance.
pub fn evolve<F>(
    hamiltonian: F,
    psi0: &FockState,
    duration: f64,
    options: &EvolveOptions,
) -> Result<Trajectory>
where
    F: Fn(f64) -> FockOperator,
{
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "duration",
            reason: format!("must be finite and >= 0, got {duration}"),
        });
    }
    let samples = options.samples.max(1);
    let mut times = vec![0.0];
    let mut states = vec![psi0.clone()];
    if duration == 0.0 {
        return Ok(Trajectory { times, states });
    }

    let spec = psi0.spec.clone();
    let mut psi = psi0.vector.clone();
    let mut t = 0.0;
    let mut step = options.max_step;
    for k in 1..=samples {
        let t_out = duration * k as f64 / samples as f64;
        while t < t_out {
            let mut h_step = step.min(options.max_step).min(t_out - t);
            loop {
                if h_step < options.min_step && h_step < t_out - t {
                    return Err(Error::StepUnderflow {
                        time: t,
                        step: h_step,
                    });
                }
                let h = hamiltonian(t + 0.5 * h_step);
                if h.spec != spec {
                    return Err(Error::ShapeMismatch(
                        "schedule changed the mode spec".into(),
                    ));
                }
                let bound = h.norm_one();
                if bound * h_step > 1.0 {
                    h_step = 0.9 / bound;
                    continue;
                }
                match exp_step(&h.matrix, &psi, h_step) {
                    Some(next)
                        if (next.norm() - psi.norm()).abs() <= options.step_norm_tolerance =>
                    {
                        psi = next;
                        t += h_step;
                        step = (2.0 * h_step).min(options.max_step);
                        break;
                    }
                    _ => h_step *= 0.5,
                }
            }
        }
        t = t_out;
        times.push(t_out);
        states.push(FockState {
            spec: spec.clone(),
            vector: psi.clone(),
        });
    }
    Ok(Trajectory { times, states })
}
