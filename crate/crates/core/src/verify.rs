//! Checks that the powers of `U_m` form a complete set of mutually unbiased bases.
//!
//! The overlap matrix between the bases `U^a` and `U^b` (`a < b`) is
//! `(U^a)^† U^b = U^(b-a)`, so the whole family is pairwise unbiased exactly
//! when every entry of every power `U^k`, `1 <= k <= 2^m`, has squared modulus
//! `2^-m`. Together with `U^(2^m+1) = I` this is what each tier checks.
//!
//! Tiers:
//!
//! * exact (`m` in {1, 2, 4, 6, 8}): Gaussian-integer powers, addition-only
//!   products, every entry of every power;
//! * float: dense complex powers of a given matrix, entrywise tolerance;
//! * sampled (`m = 12`): matrix-free powers applied to a seeded sample of
//!   columns, every entry of each sampled column at every power;
//! * construction only (`m >= 16`, `m = 24`): the generator is built but not
//!   checked, and the report says so.

use std::fmt::Write as _;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{ExactError, ExactScaledMatrix, ScaledGaussian};
use crate::fast::{FastError, FastGenerator, StateVector, C64};
use crate::gf2::{self, Gf2Error};
use crate::phase::{self, Generator, PhaseError, MAX_PHASE_QUBITS};

/// Register sizes handled by the exact tier.
pub const EXACT_TIER: [usize; 5] = [1, 2, 4, 6, 8];
/// Register sizes handled by the sampled float tier.
pub const SAMPLED_TIER: [usize; 1] = [12];
/// Default entrywise tolerance of the float tiers.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default seed of the sampled tier (ASCII "MUB").
pub const DEFAULT_SAMPLE_SEED: u64 = 0x4D_55_42;
/// Default minimum number of (power, entry) pairs checked by the sampled tier.
pub const DEFAULT_SAMPLE_PAIRS: u64 = 100_000;

pub const UNVERIFIED_STATUS: &str = "unverified, paper-claimed";

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Fast(#[from] FastError),
    #[error("m={m} is not covered by the {tier} tier")]
    UnsupportedTier { m: usize, tier: &'static str },
    #[error("matrix is {rows}x{cols}; expected a square matrix of power-of-two size")]
    BadShape { rows: usize, cols: usize },
    #[error("input columns are not orthonormal: max |A^†A - I| = {deviation:e}")]
    NotOrthonormal { deviation: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMode {
    Exact,
    Float,
    Sampled,
    ConstructionOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Unverified,
}

/// Outcome of a cycle verification. Field order is the JSON key order.
#[derive(Clone, Debug, Serialize)]
pub struct CycleReport {
    pub m: usize,
    pub mode: VerifyMode,
    pub verdict: Verdict,
    pub status: String,
    /// `2^m + 1`, the number of bases in the cycle.
    pub bases: u64,
    /// Number of powers `U^k`, `1 <= k <= 2^m`, whose entries were checked.
    pub powers_checked: u64,
    /// Exact tier: whether every entry of `U^k` had squared modulus exactly `2^-m`, per `k`.
    pub power_pass: Vec<bool>,
    /// Float tiers: `max | |u_ij|^2 - 2^-m |` over everything checked.
    pub max_modulus_deviation: Option<f64>,
    pub tolerance: Option<f64>,
    /// Number of (power, entry) pairs checked.
    pub entries_checked: u64,
    pub sampled_columns: Vec<u64>,
    pub sample_seed: Option<u64>,
    /// `U^(2^m+1) = I` (exactly, or within tolerance).
    pub identity_reached: bool,
    /// `tr U^k = -1` for all `1 <= k <= 2^m`.
    pub trace_power_pass: Option<bool>,
    pub wall_time_s: f64,
    pub note: String,
}

impl CycleReport {
    fn new(m: usize, mode: VerifyMode) -> Self {
        Self {
            m,
            mode,
            verdict: Verdict::Unverified,
            status: UNVERIFIED_STATUS.to_string(),
            bases: (1u64 << m.min(63)) + 1,
            powers_checked: 0,
            power_pass: Vec::new(),
            max_modulus_deviation: None,
            tolerance: None,
            entries_checked: 0,
            sampled_columns: Vec::new(),
            sample_seed: None,
            identity_reached: false,
            trace_power_pass: None,
            wall_time_s: 0.0,
            note: String::new(),
        }
    }

    fn finish(mut self, passed: bool, start: Instant) -> Self {
        self.verdict = if passed { Verdict::Pass } else { Verdict::Fail };
        self.status = if passed { "pass" } else { "fail" }.to_string();
        self.wall_time_s = start.elapsed().as_secs_f64();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `key: value` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let opt = |v: Option<String>| v.unwrap_or_else(|| "n/a".to_string());
        let _ = writeln!(s, "m: {}", self.m);
        let _ = writeln!(s, "mode: {:?}", self.mode);
        let _ = writeln!(s, "status: {}", self.status);
        let _ = writeln!(s, "bases: {}", self.bases);
        let _ = writeln!(s, "powers_checked: {}", self.powers_checked);
        if !self.power_pass.is_empty() {
            let failed = self.power_pass.iter().filter(|p| !**p).count();
            let _ = writeln!(s, "powers_failed: {failed}");
        }
        let _ = writeln!(s, "max_modulus_deviation: {}", opt(self.max_modulus_deviation.map(|d| format!("{d:e}"))));
        let _ = writeln!(s, "tolerance: {}", opt(self.tolerance.map(|d| format!("{d:e}"))));
        let _ = writeln!(s, "entries_checked: {}", self.entries_checked);
        if !self.sampled_columns.is_empty() {
            let _ = writeln!(s, "sampled_columns: {:?}", self.sampled_columns);
            let _ = writeln!(s, "sample_seed: {}", opt(self.sample_seed.map(|v| v.to_string())));
        }
        let _ = writeln!(s, "identity_reached: {}", self.identity_reached);
        let _ = writeln!(s, "trace_power_pass: {}", opt(self.trace_power_pass.map(|v| v.to_string())));
        let _ = writeln!(s, "wall_time_s: {:.3}", self.wall_time_s);
        let _ = writeln!(s, "note: {}", self.note);
        s
    }
}

const OVERLAP_NOTE: &str = "bases U^a, U^b (a<b) have overlap matrix U^(b-a); pairwise unbiasedness \
     holds iff every entry of U^k, 1<=k<=2^m, has squared modulus 2^-m";

/// Exact verification for `m` in [`EXACT_TIER`].
pub fn verify_cycle_exact(m: usize) -> Result<CycleReport, VerifyError> {
    if !EXACT_TIER.contains(&m) {
        return Err(VerifyError::UnsupportedTier { m, tier: "exact" });
    }
    let start = Instant::now();
    let gen = Generator::new(m)?;
    let u = phase::u_matrix(m)?;
    let d = 1u64 << m;
    let minus_one = ScaledGaussian::integer(-1);

    let mut report = CycleReport::new(m, VerifyMode::Exact);
    let mut traces_ok = true;
    let mut w = u;
    for _k in 1..=d {
        // |w^t 2^(-s/2) g|^2 = 2^-m  <=>  |g|^2 = 2^(s-m)
        let target = w.scale_exp() - m as u64;
        let ok = w.entries().iter().all(|g| g.has_norm_pow2(target));
        report.power_pass.push(ok);
        report.entries_checked += d * d;
        report.powers_checked += 1;
        traces_ok &= w.trace().value_eq(&minus_one);
        w = w.mul_sylvester_diag(gen.phases.entries(), gen.scale_exp, gen.phase)?;
    }
    report.identity_reached = w.is_identity();
    report.trace_power_pass = Some(traces_ok);
    report.note = format!("{OVERLAP_NOTE}; exact Gaussian-integer powers with addition-only products");
    let passed = report.power_pass.iter().all(|&p| p) && report.identity_reached;
    Ok(report.finish(passed, start))
}

/// `tr U^k = -1` for every `1 <= k <= 2^m`, exactly. Equivalent to the
/// spectrum being every `(2^m+1)`-th root of unity except 1, each simple.
pub fn trace_power_check(m: usize) -> Result<bool, VerifyError> {
    if !EXACT_TIER.contains(&m) {
        return Err(VerifyError::UnsupportedTier { m, tier: "exact" });
    }
    Ok(verify_cycle_exact(m)?.trace_power_pass == Some(true))
}

/// The same trace condition for an arbitrary exact matrix, using general products.
pub fn trace_powers_are_minus_one(u: &ExactScaledMatrix) -> Result<bool, VerifyError> {
    let minus_one = ScaledGaussian::integer(-1);
    let mut w = u.clone();
    for _ in 0..u.dim() {
        if !w.trace().value_eq(&minus_one) {
            return Ok(false);
        }
        w = w.matmul(u)?;
    }
    Ok(true)
}

fn max_abs_diff_identity(a: &DMatrix<C64>) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((a[(r, c)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

fn qubits_of(u: &DMatrix<C64>) -> Result<usize, VerifyError> {
    let (rows, cols) = u.shape();
    if rows != cols || !rows.is_power_of_two() {
        return Err(VerifyError::BadShape { rows, cols });
    }
    Ok(rows.trailing_zeros() as usize)
}

/// Dense floating-point verification of an arbitrary candidate generator.
pub fn verify_cycle_float(u: &DMatrix<C64>, tol: f64) -> Result<CycleReport, VerifyError> {
    let m = qubits_of(u)?;
    let start = Instant::now();
    let mut report = CycleReport::new(m, VerifyMode::Float);
    report.tolerance = Some(tol);
    let deviation = max_abs_diff_identity(&(u.adjoint() * u));
    if deviation > tol {
        report.note = format!("input is not unitary: max |U^dag U - I| = {deviation:e}; powers not checked");
        return Ok(report.finish(false, start));
    }
    let d = u.nrows();
    let inv_d = 1.0 / d as f64;
    let mut worst: f64 = 0.0;
    let mut traces_ok = true;
    let mut w = u.clone();
    for _k in 1..=d {
        let dev = w.iter().map(|z| (z.norm_sqr() - inv_d).abs()).fold(0.0, f64::max);
        worst = worst.max(dev);
        report.entries_checked += (d * d) as u64;
        report.powers_checked += 1;
        traces_ok &= (w.trace() + C64::new(1.0, 0.0)).norm() <= tol * d as f64;
        w = &w * u;
    }
    report.identity_reached = max_abs_diff_identity(&w) <= tol * d as f64;
    report.max_modulus_deviation = Some(worst);
    report.trace_power_pass = Some(traces_ok);
    report.note = format!("{OVERLAP_NOTE}; dense complex powers");
    let passed = worst <= tol && report.identity_reached;
    Ok(report.finish(passed, start))
}

/// Float verification of the constructed generator `U_m`, dense, `m <= 8`.
pub fn verify_generator_float(m: usize, tol: f64) -> Result<CycleReport, VerifyError> {
    if m > 8 {
        return Err(VerifyError::UnsupportedTier { m, tier: "dense float" });
    }
    let u = phase::u_matrix(m)?.to_complex();
    verify_cycle_float(&u, tol)
}

#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    pub min_pairs: u64,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self { min_pairs: DEFAULT_SAMPLE_PAIRS, seed: DEFAULT_SAMPLE_SEED, tol: 1e-8 }
    }
}

/// Matrix-free verification on a seeded sample of columns.
///
/// Columns are drawn without replacement; each sampled column `e_b` is
/// pushed through every power `U^k e_b`, `k = 1..=2^m`, and every entry is
/// checked, then `U^(2^m+1) e_b = e_b` is checked. At least two columns are
/// sampled, more if needed to reach `min_pairs` (power, entry) pairs.
pub fn verify_cycle_sampled(m: usize, opts: SampleOptions) -> Result<CycleReport, VerifyError> {
    gf2::construction_for(m)?;
    if m > MAX_PHASE_QUBITS {
        return Err(VerifyError::UnsupportedTier { m, tier: "sampled" });
    }
    let start = Instant::now();
    let g = FastGenerator::new(m)?;
    let d = 1usize << m;
    let per_column = (d as u64) * (d as u64);
    let columns = opts.min_pairs.div_ceil(per_column).clamp(2.min(d as u64), d as u64) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut picked: Vec<usize> = sample(&mut rng, d, columns).into_vec();
    picked.sort_unstable();

    let inv_d = 1.0 / d as f64;
    let mut report = CycleReport::new(m, VerifyMode::Sampled);
    report.tolerance = Some(opts.tol);
    report.sample_seed = Some(opts.seed);
    report.sampled_columns = picked.iter().map(|&c| c as u64).collect();
    let mut worst: f64 = 0.0;
    let mut closes = true;
    for &col in &picked {
        let mut v = StateVector::basis(m, col);
        for _k in 1..=d {
            g.apply(&mut v)?;
            let dev = v.amps().iter().map(|z| (z.norm_sqr() - inv_d).abs()).fold(0.0, f64::max);
            worst = worst.max(dev);
        }
        g.apply(&mut v)?;
        let back = v
            .amps()
            .iter()
            .enumerate()
            .map(|(i, z)| (z - C64::new((i == col) as u8 as f64, 0.0)).norm())
            .fold(0.0, f64::max);
        closes &= back <= opts.tol;
    }
    report.powers_checked = d as u64;
    report.entries_checked = columns as u64 * per_column;
    report.max_modulus_deviation = Some(worst);
    report.identity_reached = closes;
    report.note = format!(
        "{OVERLAP_NOTE}; matrix-free powers on {columns} seeded columns, all entries at all powers"
    );
    let passed = worst <= opts.tol && closes;
    Ok(report.finish(passed, start))
}

/// Build the generator for `m` without checking it.
pub fn construction_report(m: usize) -> Result<CycleReport, VerifyError> {
    let start = Instant::now();
    let b = gf2::build(m)?;
    let census = gf2::gate_census(&b);
    let mut report = CycleReport::new(m, VerifyMode::ConstructionOnly);
    let trace = phase::generator_trace(m)?;
    phase::normalization(m, &trace)?;
    report.note = format!(
        "B_{m} built ({} Phase, {} CPhase gates), tr V = {trace}; cycle not checked at this size",
        census.n_phase, census.n_cphase
    );
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Verify `m` with the tier that covers it.
pub fn verify_auto(m: usize) -> Result<CycleReport, VerifyError> {
    gf2::construction_for(m)?;
    if EXACT_TIER.contains(&m) {
        verify_cycle_exact(m)
    } else if SAMPLED_TIER.contains(&m) {
        verify_cycle_sampled(m, SampleOptions::default())
    } else {
        construction_report(m)
    }
}

/// `max | |<a_i|b_j>|^2 - 1/d |` over the columns of two orthonormal bases.
pub fn pairwise_unbiasedness(a: &DMatrix<C64>, b: &DMatrix<C64>, tol: f64) -> Result<f64, VerifyError> {
    for x in [a, b] {
        let (rows, cols) = x.shape();
        if rows != cols || rows != a.nrows() {
            return Err(VerifyError::BadShape { rows, cols });
        }
        let deviation = max_abs_diff_identity(&(x.adjoint() * x));
        if deviation > tol {
            return Err(VerifyError::NotOrthonormal { deviation });
        }
    }
    let inv_d = 1.0 / a.nrows() as f64;
    let overlaps = a.adjoint() * b;
    Ok(overlaps.iter().map(|z| (z.norm_sqr() - inv_d).abs()).fold(0.0, f64::max))
}
