//! State tomography with the bases generated by `U_m`.
//!
//! Measuring `rho` in the `d + 1` bases (columns of `U^0 = I, U, ..., U^d`)
//! gives outcome frequencies `f_i^(b)`. The linear-inversion estimate is
//!
//! ```text
//! rho_hat = sum_b sum_i f_i^(b) |e_i^(b)><e_i^(b)|  -  I
//! ```
//!
//! which reproduces `rho` exactly when the frequencies are the Born
//! probabilities (see `docs/estimator.md`). The raw estimate is Hermitian
//! with unit trace but may have small negative eigenvalues at finite shot
//! counts; projection onto the physical set is optional.

use std::io::{Read, Write};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::Serialize;
use thiserror::Error;

use crate::fast::{read_complex_block, write_complex_block, FastError, FastGenerator, StateVector, C64, DENSITY_MAGIC};
use crate::gf2;
use crate::phase::PhaseError;

/// Largest register for which full basis matrices are built.
pub const MAX_BASIS_QUBITS: usize = 10;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const EIGENVALUE_FLOOR: f64 = -1e-10;
/// Looser tolerance accepted for reconstructed estimates.
pub const ESTIMATE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum TomoError {
    #[error("m={m} is not supported for tomography (need a constructible m <= {MAX_BASIS_QUBITS})")]
    UnsupportedM { m: usize },
    #[error("basis index {b} out of range 0..={max}")]
    BasisIndex { b: u64, max: u64 },
    #[error("matrix is {rows}x{cols}; expected {expected}x{expected}")]
    Shape { rows: usize, cols: usize, expected: usize },
    #[error("not Hermitian: max |rho - rho^dag| = {0:e}")]
    NotHermitian(f64),
    #[error("trace {0} differs from 1")]
    BadTrace(f64),
    #[error("not positive semidefinite: smallest eigenvalue {0:e}")]
    NotPsd(f64),
    #[error("invalid probability vector: {0}")]
    BadProbabilities(String),
    #[error("expected {expected} frequency rows/bases, found {found}")]
    WrongBasisCount { expected: usize, found: usize },
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Fast(#[from] FastError),
}

/// A `2^m x 2^m` Hermitian, unit-trace matrix.
///
/// States built with [`DensityMatrix::new`] are also positive semidefinite.
/// Raw tomography estimates may not be; [`DensityMatrix::is_physical`] says
/// which.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: usize,
    mat: DMatrix<C64>,
    physical: bool,
}

fn hermitian_deviation(a: &DMatrix<C64>) -> f64 {
    let n = a.nrows();
    let mut dev = 0.0f64;
    for r in 0..n {
        for c in r..n {
            dev = dev.max((a[(r, c)] - a[(c, r)].conj()).norm());
        }
    }
    dev
}

fn hermitize(a: &DMatrix<C64>) -> DMatrix<C64> {
    (a + a.adjoint()).scale(0.5)
}

fn eigenvalues(a: &DMatrix<C64>) -> Vec<f64> {
    SymmetricEigen::new(hermitize(a)).eigenvalues.iter().copied().collect()
}

fn qubits_of(mat: &DMatrix<C64>) -> Result<usize, TomoError> {
    let (rows, cols) = mat.shape();
    if rows != cols || !rows.is_power_of_two() {
        return Err(TomoError::Shape { rows, cols, expected: rows.next_power_of_two() });
    }
    Ok(rows.trailing_zeros() as usize)
}

impl DensityMatrix {
    /// Validate a physical state.
    pub fn new(mat: DMatrix<C64>) -> Result<Self, TomoError> {
        let m = Self::check_hermitian_trace(&mat, HERMITIAN_TOL, TRACE_TOL)?;
        let min = eigenvalues(&mat).into_iter().fold(f64::INFINITY, f64::min);
        if min < EIGENVALUE_FLOOR {
            return Err(TomoError::NotPsd(min));
        }
        Ok(Self { m, mat, physical: true })
    }

    /// Wrap a Hermitian unit-trace estimate without requiring positivity.
    pub fn from_estimate(mat: DMatrix<C64>) -> Result<Self, TomoError> {
        let m = Self::check_hermitian_trace(&mat, ESTIMATE_TOL, ESTIMATE_TOL)?;
        let min = eigenvalues(&mat).into_iter().fold(f64::INFINITY, f64::min);
        Ok(Self { m, mat, physical: min >= EIGENVALUE_FLOOR })
    }

    fn check_hermitian_trace(mat: &DMatrix<C64>, herm_tol: f64, trace_tol: f64) -> Result<usize, TomoError> {
        let m = qubits_of(mat)?;
        let dev = hermitian_deviation(mat);
        if dev.is_nan() || dev > herm_tol {
            return Err(TomoError::NotHermitian(dev));
        }
        let tr = mat.trace();
        let off = (tr - C64::new(1.0, 0.0)).norm();
        if off.is_nan() || off > trace_tol {
            return Err(TomoError::BadTrace(tr.re));
        }
        Ok(m)
    }

    pub fn maximally_mixed(m: usize) -> Self {
        let d = 1usize << m;
        let mat = DMatrix::<C64>::identity(d, d).scale(1.0 / d as f64);
        Self { m, mat, physical: true }
    }

    /// `|psi><psi|` for a normalized state.
    pub fn pure(psi: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi.amps());
        let mat = hermitize(&(&v * v.adjoint()));
        let tr = mat.trace().re;
        Self { m: psi.qubits(), mat: mat.unscale(tr), physical: true }
    }

    /// Haar-random pure state.
    pub fn random_pure<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        Self::pure(&StateVector::random(m, rng))
    }

    /// Full-rank mixed state `G G^dag / tr(G G^dag)` with `G` complex Ginibre.
    pub fn random_mixed<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let d = 1usize << m;
        let g = DMatrix::<C64>::from_fn(d, d, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let mat = hermitize(&(&g * g.adjoint()));
        let tr = mat.trace().re;
        Self { m, mat: mat.unscale(tr), physical: true }
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        1 << self.m
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn is_physical(&self) -> bool {
        self.physical
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigenvalues(&self.mat).into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Clip negative eigenvalues to zero and renormalize the trace.
    pub fn project_psd(&self) -> Self {
        let eig = SymmetricEigen::new(hermitize(&self.mat));
        let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let d = self.dim();
        if total <= 0.0 {
            return Self::maximally_mixed(self.m);
        }
        let mut out = DMatrix::<C64>::zeros(d, d);
        for (k, &l) in clipped.iter().enumerate() {
            if l > 0.0 {
                let v = eig.eigenvectors.column(k);
                out += (v * v.adjoint()).scale(l / total);
            }
        }
        Self { m: self.m, mat: hermitize(&out), physical: true }
    }

    /// Row-major `d x d` complex block with the `MUBDENSE` header.
    pub fn write_to<W: Write>(&self, w: W) -> Result<(), TomoError> {
        let data: Vec<C64> = self.mat.transpose().iter().copied().collect();
        Ok(write_complex_block(w, DENSITY_MAGIC, self.m, &data)?)
    }

    /// Read and validate a physical state.
    pub fn read_from<R: Read>(r: R) -> Result<Self, TomoError> {
        let (m, data) = read_complex_block(r, DENSITY_MAGIC, |m| (m <= MAX_BASIS_QUBITS).then(|| 1usize << (2 * m)))?;
        let d = 1usize << m;
        Self::new(DMatrix::from_row_slice(d, d, &data))
    }
}

fn check_m(m: usize) -> Result<(), TomoError> {
    if m > MAX_BASIS_QUBITS || gf2::construction_for(m).is_err() {
        return Err(TomoError::UnsupportedM { m });
    }
    Ok(())
}

fn apply_columns(g: &FastGenerator, mat: &DMatrix<C64>) -> Result<DMatrix<C64>, TomoError> {
    let d = mat.nrows();
    let mut out = DMatrix::<C64>::zeros(d, d);
    for c in 0..d {
        let mut v = StateVector::new(mat.column(c).iter().copied().collect())?;
        g.apply(&mut v)?;
        out.set_column(c, &nalgebra::DVector::from_column_slice(v.amps()));
    }
    Ok(out)
}

/// Columns of `U_m^b`, `0 <= b <= 2^m`, with `U^0 = I`.
pub fn basis_columns(m: usize, b: u64) -> Result<DMatrix<C64>, TomoError> {
    check_m(m)?;
    let max = 1u64 << m;
    if b > max {
        return Err(TomoError::BasisIndex { b, max });
    }
    let g = FastGenerator::new(m)?;
    let d = 1usize << m;
    let mut mat = DMatrix::<C64>::identity(d, d);
    for _ in 0..b {
        mat = apply_columns(&g, &mat)?;
    }
    Ok(mat)
}

/// All `2^m + 1` bases, `U^0, ..., U^(2^m)`.
pub fn mub_family(m: usize) -> Result<Vec<DMatrix<C64>>, TomoError> {
    check_m(m)?;
    let g = FastGenerator::new(m)?;
    let d = 1usize << m;
    let mut out = vec![DMatrix::<C64>::identity(d, d)];
    for _ in 0..d {
        let next = apply_columns(&g, out.last().expect("non-empty"))?;
        out.push(next);
    }
    Ok(out)
}

/// Born probabilities `<e_i|rho|e_i>`, clipped to `[0, 1]`.
pub fn outcome_probabilities(rho: &DensityMatrix, basis: &DMatrix<C64>) -> Result<Vec<f64>, TomoError> {
    if !rho.is_physical() {
        return Err(TomoError::NotPsd(rho.min_eigenvalue()));
    }
    let d = rho.dim();
    if basis.shape() != (d, d) {
        return Err(TomoError::Shape { rows: basis.nrows(), cols: basis.ncols(), expected: d });
    }
    let rho_e = rho.matrix() * basis;
    Ok((0..d)
        .map(|i| basis.column(i).dotc(&rho_e.column(i)).re.clamp(0.0, 1.0))
        .collect())
}

fn check_probabilities(p: &[f64]) -> Result<(), TomoError> {
    if p.is_empty() {
        return Err(TomoError::BadProbabilities("empty vector".into()));
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < -1e-12 || **x > 1.0 + 1e-12) {
        return Err(TomoError::BadProbabilities(format!("entry {x} outside [0, 1]")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(TomoError::BadProbabilities(format!("entries sum to {total}")));
    }
    Ok(())
}

/// Multinomial draw of `n` shots via sequential binomials.
pub fn sample_counts_with<R: Rng + ?Sized>(p: &[f64], n: u64, rng: &mut R) -> Result<Vec<u64>, TomoError> {
    check_probabilities(p)?;
    let mut counts = vec![0u64; p.len()];
    let mut left = n;
    let mut mass = 1.0f64;
    for (i, &pi) in p.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == p.len() {
            counts[i] = left;
            break;
        }
        let q = if mass > 0.0 { (pi.max(0.0) / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(left, q).expect("q in [0, 1]").sample(rng);
        counts[i] = k;
        left -= k;
        mass -= pi.max(0.0);
    }
    Ok(counts)
}

/// [`sample_counts_with`] on a fresh `ChaCha8Rng` seeded with `seed`.
pub fn sample_counts(p: &[f64], n: u64, seed: u64) -> Result<Vec<u64>, TomoError> {
    sample_counts_with(p, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Clone, Debug)]
pub struct Estimate {
    pub rho_hat: DensityMatrix,
    pub projected: bool,
    /// Smallest eigenvalue of the raw linear-inversion estimate.
    pub raw_min_eigenvalue: f64,
}

/// Linear inversion from one frequency row per basis.
pub fn reconstruct(freqs: &[Vec<f64>], bases: &[DMatrix<C64>], project_psd: bool) -> Result<Estimate, TomoError> {
    let d = bases.first().map(|b| b.nrows()).unwrap_or(0);
    if d == 0 || bases.len() != d + 1 {
        return Err(TomoError::WrongBasisCount { expected: d + 1, found: bases.len() });
    }
    if freqs.len() != bases.len() {
        return Err(TomoError::WrongBasisCount { expected: bases.len(), found: freqs.len() });
    }
    let mut acc = DMatrix::<C64>::identity(d, d).scale(-1.0);
    for (f, basis) in freqs.iter().zip(bases) {
        if basis.shape() != (d, d) {
            return Err(TomoError::Shape { rows: basis.nrows(), cols: basis.ncols(), expected: d });
        }
        if f.len() != d {
            return Err(TomoError::BadProbabilities(format!("frequency row has {} entries, expected {d}", f.len())));
        }
        check_probabilities(f)?;
        // sum_i f_i e_i e_i^dag = E diag(f) E^dag
        let mut weighted = basis.clone();
        for (i, &fi) in f.iter().enumerate() {
            weighted.column_mut(i).scale_mut(fi);
        }
        acc += weighted * basis.adjoint();
    }
    let raw = DensityMatrix::from_estimate(hermitize(&acc))?;
    let raw_min_eigenvalue = raw.min_eigenvalue();
    let rho_hat = if project_psd { raw.project_psd() } else { raw };
    Ok(Estimate { rho_hat, projected: project_psd, raw_min_eigenvalue })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorMetrics {
    pub fidelity: f64,
    pub trace_distance: f64,
}

// Square roots amplify round-off: an eigenvalue of 1e-17 would contribute
// about 3e-9 to the fidelity of a pure state.
const ROUNDOFF_EIGENVALUE: f64 = 1e-13;

/// `F = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2` and `T = |rho - sigma|_1 / 2`.
///
/// For a non-physical estimate the square roots use eigenvalues clipped at
/// zero; the trace distance needs no such adjustment.
pub fn error_metrics(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<ErrorMetrics, TomoError> {
    if rho.dim() != sigma.dim() {
        return Err(TomoError::Shape { rows: sigma.dim(), cols: sigma.dim(), expected: rho.dim() });
    }
    let diff = rho.matrix() - sigma.matrix();
    let trace_distance = (0.5 * eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>()).clamp(0.0, 1.0);

    let eig = SymmetricEigen::new(hermitize(rho.matrix()));
    let d = rho.dim();
    let mut sqrt_rho = DMatrix::<C64>::zeros(d, d);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l > ROUNDOFF_EIGENVALUE {
            let v = eig.eigenvectors.column(k);
            sqrt_rho += (v * v.adjoint()).scale(l.sqrt());
        }
    }
    let inner = &sqrt_rho * sigma.matrix() * &sqrt_rho;
    let root_sum: f64 = eigenvalues(&inner).iter().filter(|&&l| l > ROUNDOFF_EIGENVALUE).map(|l| l.sqrt()).sum();
    let fidelity = (root_sum * root_sum).clamp(0.0, 1.0);
    Ok(ErrorMetrics { fidelity, trace_distance })
}

/// Which state a run estimates.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StateSpec {
    MaximallyMixed,
    RandomPure { seed: u64 },
    RandomMixed { seed: u64 },
    File { path: String },
}

impl StateSpec {
    /// The state for every variant except `File`, which callers load themselves.
    pub fn generate(&self, m: usize) -> Option<DensityMatrix> {
        match *self {
            StateSpec::MaximallyMixed => Some(DensityMatrix::maximally_mixed(m)),
            StateSpec::RandomPure { seed } => Some(DensityMatrix::random_pure(m, &mut ChaCha8Rng::seed_from_u64(seed))),
            StateSpec::RandomMixed { seed } => Some(DensityMatrix::random_mixed(m, &mut ChaCha8Rng::seed_from_u64(seed))),
            StateSpec::File { .. } => None,
        }
    }
}

/// Dense complex matrix as two real arrays, row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexMatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&DMatrix<C64>> for ComplexMatrixJson {
    fn from(a: &DMatrix<C64>) -> Self {
        let rows = |f: fn(&C64) -> f64| (0..a.nrows()).map(|r| a.row(r).iter().map(f).collect()).collect();
        Self { re: rows(|z| z.re), im: rows(|z| z.im) }
    }
}

/// One simulated tomography experiment. Field order is the JSON key order.
#[derive(Clone, Debug, Serialize)]
pub struct TomographyRun {
    pub m: usize,
    /// `None` means exact Born probabilities were used as frequencies.
    pub shots_per_basis: Option<u64>,
    pub seed: u64,
    pub rng: &'static str,
    pub projected: bool,
    pub frequencies: Vec<Vec<f64>>,
    pub rho_hat: ComplexMatrixJson,
    pub raw_min_eigenvalue: f64,
    pub fidelity: f64,
    pub trace_distance: f64,
}

pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha), seed_from_u64";

/// Simulate measuring `rho` in every basis of `bases` and reconstruct it.
///
/// All bases draw from one generator seeded with `seed`, in basis order.
pub fn simulate(
    rho: &DensityMatrix,
    bases: &[DMatrix<C64>],
    shots: Option<u64>,
    seed: u64,
    project_psd: bool,
) -> Result<TomographyRun, TomoError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frequencies = Vec::with_capacity(bases.len());
    for basis in bases {
        let p = outcome_probabilities(rho, basis)?;
        let row = match shots {
            None => p,
            Some(0) => vec![1.0 / p.len() as f64; p.len()],
            Some(n) => sample_counts_with(&p, n, &mut rng)?.into_iter().map(|c| c as f64 / n as f64).collect(),
        };
        frequencies.push(row);
    }
    let est = reconstruct(&frequencies, bases, project_psd)?;
    let metrics = error_metrics(rho, &est.rho_hat)?;
    Ok(TomographyRun {
        m: rho.qubits(),
        shots_per_basis: shots,
        seed,
        rng: RNG_NAME,
        projected: est.projected,
        frequencies,
        rho_hat: est.rho_hat.matrix().into(),
        raw_min_eigenvalue: est.raw_min_eigenvalue,
        fidelity: metrics.fidelity,
        trace_distance: metrics.trace_distance,
    })
}

/// Median trace distance per shot count, and the least-squares slope of
/// `log10(median)` against `log10(N)`.
#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub m: usize,
    pub shots: Vec<u64>,
    pub seeds: u64,
    pub median_trace_distance: Vec<f64>,
    pub log_log_slope: f64,
}

/// For each seed `s < seeds`, a random pure state (seeded `s`) is estimated
/// at every shot count with sampling seed `s`.
pub fn sweep(m: usize, shots: &[u64], seeds: u64) -> Result<SweepReport, TomoError> {
    let bases = mub_family(m)?;
    let mut medians = Vec::with_capacity(shots.len());
    for &n in shots {
        let mut dists = Vec::with_capacity(seeds as usize);
        for s in 0..seeds {
            let rho = DensityMatrix::random_pure(m, &mut ChaCha8Rng::seed_from_u64(s));
            dists.push(simulate(&rho, &bases, Some(n), s, false)?.trace_distance);
        }
        medians.push(median(&mut dists));
    }
    let xs: Vec<f64> = shots.iter().map(|&n| (n as f64).log10()).collect();
    let ys: Vec<f64> = medians.iter().map(|t| t.log10()).collect();
    Ok(SweepReport { m, shots: shots.to_vec(), seeds, median_trace_distance: medians, log_log_slope: slope(&xs, &ys) })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
