//! Brute-force check of the analytic spectra.
//!
//! Kernels are sampled on a tensor grid and symmetrized with the quadrature weights,
//! `K~_ij = sqrt(w_i) K(x_i, x_j) sqrt(w_j)`, which turns the integral eigenproblem into a finite
//! Hermitian one (Nystrom). The partial-transpose kernel of a pure state is
//! `K(x1, x2; x1', x2') = psi(x1, x2') conj(psi(x1', x2))`.

use faer::{c64, Mat, MatRef, Side};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::EvolvedState;
use crate::spectrum::PtSpectrum;

/// Tail mass above which a grid is flagged as not covering the state.
pub const COVERAGE_TOLERANCE: f64 = 1e-6;
/// Default points per axis.
pub const DEFAULT_POINTS: usize = 48;
const MIN_POINTS: usize = 8;
const HERMITIAN_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    Trapezoid,
    GaussLegendre,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub points_per_axis: usize,
    /// Each coordinate spans `[-halfwidth, halfwidth]`.
    pub halfwidth: f64,
    pub weighting: Weighting,
}

impl GridSpec {
    pub fn new(points_per_axis: usize, halfwidth: f64, weighting: Weighting) -> Result<Self> {
        if points_per_axis < MIN_POINTS {
            return Err(Error::InvalidGrid(format!("need at least {MIN_POINTS} points per axis, got {points_per_axis}")));
        }
        if !(halfwidth.is_finite() && halfwidth > 0.0) {
            return Err(Error::InvalidGrid(format!("halfwidth must be positive, got {halfwidth}")));
        }
        Ok(Self { points_per_axis, halfwidth, weighting })
    }

    /// Halfwidth `6 max(sigma(t), 2 sigma_d(t))`, trapezoid weights.
    pub fn for_state(state: &EvolvedState<f64>, points_per_axis: usize) -> Result<Self> {
        Self::new(points_per_axis, default_halfwidth(state), Weighting::Trapezoid)
    }

    /// `(node, weight)` pairs along one axis.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let n = self.points_per_axis;
        let h = self.halfwidth;
        match self.weighting {
            Weighting::Trapezoid => {
                let dx = 2.0 * h / (n - 1) as f64;
                (0..n)
                    .map(|i| {
                        let w = if i == 0 || i == n - 1 { dx / 2.0 } else { dx };
                        (-h + i as f64 * dx, w)
                    })
                    .collect()
            }
            Weighting::GaussLegendre => {
                let rule = gauss_quad::GaussLegendre::new(n.try_into().unwrap());
                let mut v: Vec<(f64, f64)> =
                    rule.as_node_weight_pairs().iter().map(|&(x, w)| (h * x, h * w)).collect();
                v.sort_by(|a, b| a.0.total_cmp(&b.0));
                v
            }
        }
    }
}

pub fn default_halfwidth(state: &EvolvedState<f64>) -> f64 {
    6.0 * state.sigma_sq_t().sqrt().max(2.0 * state.sigma_d_sq_t().sqrt())
}

/// Probability mass of `|psi|^2` outside the grid square (union bound over both coordinates).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coverage {
    pub tail_mass: f64,
}

impl Coverage {
    pub fn is_adequate(&self) -> bool {
        self.tail_mass <= COVERAGE_TOLERANCE
    }
}

fn coverage(state: &EvolvedState<f64>, grid: &GridSpec) -> Coverage {
    // <x1^2> = <x2^2> = sigma_d^2(t) + sigma^2(t)/4
    let var = state.sigma_d_sq_t() + state.sigma_sq_t() / 4.0;
    let tail = libm::erfc(grid.halfwidth / (2.0 * var).sqrt());
    Coverage { tail_mass: 2.0 * tail }
}

#[derive(Debug, Clone)]
pub enum KernelEntries {
    Real(Mat<f64>),
    Complex(Mat<c64>),
}

/// Weighted, Hermitian kernel matrix.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    entries: KernelEntries,
    coverage: Coverage,
}

impl KernelMatrix {
    pub fn dimension(&self) -> usize {
        match &self.entries {
            KernelEntries::Real(m) => m.nrows(),
            KernelEntries::Complex(m) => m.nrows(),
        }
    }

    pub fn entries(&self) -> &KernelEntries {
        &self.entries
    }

    pub fn is_real(&self) -> bool {
        matches!(self.entries, KernelEntries::Real(_))
    }

    pub fn coverage(&self) -> Coverage {
        self.coverage
    }

    /// Entry `(i, j)` as a complex number.
    pub fn get(&self, i: usize, j: usize) -> c64 {
        match &self.entries {
            KernelEntries::Real(m) => c64::new(m[(i, j)], 0.0),
            KernelEntries::Complex(m) => m[(i, j)],
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dimension()).map(|i| self.get(i, i).re).sum()
    }

    /// `sum |K_ij|^2`; equals `Tr K^2` for a Hermitian matrix.
    pub fn frobenius_sq(&self) -> f64 {
        match &self.entries {
            KernelEntries::Real(m) => m.col_iter().flat_map(|c| c.iter().copied()).map(|x| x * x).sum(),
            KernelEntries::Complex(m) => m.col_iter().flat_map(|c| c.iter().copied()).map(|z| z.norm_sqr()).sum(),
        }
    }

    /// `max |K_ij - conj(K_ji)| / max |K_ij|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dimension();
        let mut defect = 0.0f64;
        let mut scale = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                let a = self.get(i, j);
                defect = defect.max((a - self.get(j, i).conj()).norm());
                scale = scale.max(a.norm());
            }
        }
        if scale == 0.0 { 0.0 } else { defect / scale }
    }
}

type Psi = Vec<Complex<f64>>;

/// `sqrt(w_i w_j) psi(x_i, x_j)`, row-major over `(i, j)`.
fn weighted_amplitudes(state: &EvolvedState<f64>, nodes: &[(f64, f64)]) -> Psi {
    let n = nodes.len();
    let mut psi = vec![Complex::new(0.0, 0.0); n * n];
    psi.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let (xi, wi) = nodes[i];
        for (j, out) in row.iter_mut().enumerate() {
            let (xj, wj) = nodes[j];
            *out = state.amplitude(xi, xj) * (wi * wj).sqrt();
        }
    });
    psi
}

/// Builds a column-major `dim x dim` matrix in parallel; each entry is computed independently so
/// the result does not depend on the thread count.
fn assemble<T, F>(dim: usize, f: F) -> Mat<T>
where
    T: faer::traits::ComplexField + Copy + Default + Send + Sync,
    F: Fn(usize, usize) -> T + Sync,
{
    let mut data = vec![T::default(); dim * dim];
    data.par_chunks_mut(dim).enumerate().for_each(|(c, col)| {
        for (r, out) in col.iter_mut().enumerate() {
            *out = f(r, c);
        }
    });
    MatRef::from_column_major_slice(&data, dim, dim).to_owned()
}

/// Discretized partial transpose of `|psi(t)><psi(t)|` on the tensor grid, indexed
/// `(i, j) -> i n + j` for the point `(x1, x2) = (x_i, x_j)`. Real symmetric at `t = 0`.
pub fn discretize_pt_kernel(state: &EvolvedState<f64>, grid: &GridSpec) -> Result<KernelMatrix> {
    let nodes = grid.nodes();
    let n = nodes.len();
    let psi = weighted_amplitudes(state, &nodes);
    let dim = n * n;
    // K[(i,j),(k,l)] = psi~(i, l) conj(psi~(k, j))
    let entry = |r: usize, c: usize| {
        let (i, j) = (r / n, r % n);
        let (k, l) = (c / n, c % n);
        psi[i * n + l] * psi[k * n + j].conj()
    };
    let entries = if state.t() == 0.0 {
        KernelEntries::Real(assemble(dim, |r, c| entry(r, c).re))
    } else {
        KernelEntries::Complex(assemble(dim, entry))
    };
    Ok(KernelMatrix { entries, coverage: coverage(state, grid) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    First,
    Second,
}

/// Reduced density matrix of particle 1, `rho_1(x, x') = integral psi(x, y) conj(psi(x', y)) dy`.
pub fn reduce_density(state: &EvolvedState<f64>, grid: &GridSpec) -> Result<KernelMatrix> {
    reduce_density_of(state, grid, Party::First)
}

pub fn reduce_density_of(state: &EvolvedState<f64>, grid: &GridSpec, party: Party) -> Result<KernelMatrix> {
    let nodes = grid.nodes();
    let n = nodes.len();
    let psi = weighted_amplitudes(state, &nodes);
    let at = |a: usize, b: usize| match party {
        Party::First => psi[a * n + b],
        Party::Second => psi[b * n + a],
    };
    let entry = |r: usize, c: usize| (0..n).map(|j| at(r, j) * at(c, j).conj()).sum::<c64>();
    let entries = if state.t() == 0.0 {
        KernelEntries::Real(assemble(n, |r, c| entry(r, c).re))
    } else {
        KernelEntries::Complex(assemble(n, entry))
    };
    Ok(KernelMatrix { entries, coverage: coverage(state, grid) })
}

fn check_hermitian(k: &KernelMatrix) -> Result<()> {
    let defect = k.hermiticity_defect();
    if defect > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

fn by_magnitude(values: &mut [f64]) {
    values.sort_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
}

fn all_eigenvalues(k: &KernelMatrix) -> Result<Vec<f64>> {
    check_hermitian(k)?;
    let err = |e: faer::linalg::evd::EvdError| Error::Eigensolver(format!("{e:?}"));
    match &k.entries {
        KernelEntries::Real(m) => m.self_adjoint_eigenvalues(Side::Lower).map_err(err),
        KernelEntries::Complex(m) => m.self_adjoint_eigenvalues(Side::Lower).map_err(err),
    }
}

/// The `count` largest-`|lambda|` eigenvalues, by descending `|lambda|` (ties: positive first).
pub fn eigen_spectrum(k: &KernelMatrix, count: usize) -> Result<Vec<f64>> {
    let dim = k.dimension();
    if count > dim {
        return Err(Error::TooManyEigenvalues { requested: count, dimension: dim });
    }
    let mut values = all_eigenvalues(k)?;
    by_magnitude(&mut values);
    values.truncate(count);
    Ok(values)
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<c64>,
    /// `||K v - lambda v|| / ||v||`.
    pub residual: f64,
}

/// Like [`eigen_spectrum`], with eigenvectors and residuals.
pub fn eigen_pairs(k: &KernelMatrix, count: usize) -> Result<Vec<EigenPair>> {
    let dim = k.dimension();
    if count > dim {
        return Err(Error::TooManyEigenvalues { requested: count, dimension: dim });
    }
    check_hermitian(k)?;
    let err = |e: faer::linalg::evd::EvdError| Error::Eigensolver(format!("{e:?}"));
    let (values, vectors): (Vec<f64>, Vec<Vec<c64>>) = match &k.entries {
        KernelEntries::Real(m) => {
            let evd = m.self_adjoint_eigen(Side::Lower).map_err(err)?;
            let u = evd.U();
            (
                (0..dim).map(|i| evd.S()[i]).collect(),
                (0..dim).map(|c| (0..dim).map(|r| c64::new(u[(r, c)], 0.0)).collect()).collect(),
            )
        }
        KernelEntries::Complex(m) => {
            let evd = m.self_adjoint_eigen(Side::Lower).map_err(err)?;
            let u = evd.U();
            ((0..dim).map(|i| evd.S()[i].re).collect(), (0..dim).map(|c| (0..dim).map(|r| u[(r, c)]).collect()).collect())
        }
    };
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(values[b].total_cmp(&values[a])));
    Ok(order
        .into_iter()
        .take(count)
        .map(|idx| {
            let v = &vectors[idx];
            let lambda = values[idx];
            let mut res = 0.0;
            for r in 0..dim {
                let kv: c64 = (0..dim).map(|c| k.get(r, c) * v[c]).sum();
                res += (kv - v[r] * lambda).norm_sqr();
            }
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            EigenPair { value: lambda, vector: v.clone(), residual: res.sqrt() / norm }
        })
        .collect())
}

/// Element-wise comparison of two top-`k` spectra after ordering each by signed value.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumComparison {
    pub errors: Vec<f64>,
    pub max_abs_error: f64,
    /// Same number of positive and negative values, and each matched pair agrees in sign.
    pub signs_match: bool,
}

pub fn compare_spectra(numeric: &[f64], analytic: &[f64]) -> SpectrumComparison {
    let sorted = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    };
    let (a, b) = (sorted(numeric), sorted(analytic));
    let errors: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).collect();
    let positives = |v: &[f64]| v.iter().filter(|x| **x > 0.0).count();
    let signs_match = a.len() == b.len()
        && positives(&a) == positives(&b)
        && a.iter().zip(&b).all(|(x, y)| x.signum() == y.signum());
    let max_abs_error = errors.iter().copied().fold(0.0, f64::max);
    SpectrumComparison { errors, max_abs_error, signs_match }
}

/// Analytic top-`count` eigenvalues of the partial transpose for the state's parameters.
pub fn analytic_head(state: &EvolvedState<f64>, count: usize) -> Result<Vec<f64>> {
    Ok(PtSpectrum::from_params(state.params())?.head(count))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub points_per_axis: usize,
    pub halfwidth: f64,
    pub errors: Vec<f64>,
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Every eigenvalue's error shrinks (within 10 %) at every refinement, or is already at the
    /// noise floor.
    pub monotone: bool,
    /// The maximum error grows at every refinement.
    pub diverging: bool,
}

const NOISE_FLOOR: f64 = 1e-12;

/// Errors of the top-`count` oracle eigenvalues against the analytic spectrum for each grid.
pub fn convergence_report(state: &EvolvedState<f64>, grids: &[GridSpec], count: usize) -> Result<ConvergenceReport> {
    if grids.len() < 2 {
        return Err(Error::TooFewGrids(grids.len()));
    }
    let target = analytic_head(state, count)?;
    let mut rows = Vec::with_capacity(grids.len());
    for grid in grids {
        let k = discretize_pt_kernel(state, grid)?;
        let numeric = eigen_spectrum(&k, count.min(k.dimension()))?;
        let cmp = compare_spectra(&numeric, &target);
        rows.push(ConvergenceRow {
            points_per_axis: grid.points_per_axis,
            halfwidth: grid.halfwidth,
            max_error: cmp.max_abs_error,
            errors: cmp.errors,
        });
    }
    let monotone = rows.windows(2).all(|w| {
        w[0].errors.iter().zip(&w[1].errors).all(|(&prev, &next)| next <= 1.1 * prev || next <= NOISE_FLOOR)
    });
    let diverging = rows.windows(2).all(|w| w[1].max_error > w[0].max_error);
    Ok(ConvergenceReport { rows, monotone, diverging })
}
