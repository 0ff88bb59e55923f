//! Phase systems, Sylvester-Hadamard matrices and the generator `U_m`.
//!
//! Basis states of an `m`-qubit register are labelled by bit strings
//! `(j_1, ..., j_m)`. The linear index is `n = sum_k j_k 2^(k-1)`, so `j_1` is
//! the least significant bit. Every module in the crate uses this convention;
//! it is the one under which the phase rule applied to `B_2` gives
//! `P_2 = diag(1, -i, 1, i)`.
//!
//! The phase vector of a matrix `B` is computed three independent ways:
//!
//! * [`phase_from_b`]: the quadratic-form rule
//!   `p_j = i^(sum_kl b_kl j_k j_l) * (-1)^(sum_k b_kk j_k)`, integer sums;
//! * [`chop`] of `V_{m/2}` (and its per-index unrolling [`chop_recursion_phase`]);
//! * [`v_entry`], the closed form obtained by iterating the chop recursion.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::exact::{ExactScaledMatrix, GaussianInt, ScaledGaussian};
use crate::gf2::{self, BMatrix, Construction, Gf2Error};
use crate::roots::{EighthRoot, Mod4Exponent};

/// Largest `m` for which the dense `2^m x 2^m` Sylvester matrix is built.
pub const MAX_HADAMARD_QUBITS: usize = 13;
/// Largest `m` for which a full phase vector (or a diagonal sum) is materialized.
pub const MAX_PHASE_QUBITS: usize = 24;
/// Largest `m` for which a dense exact generator is materialized.
pub const MAX_EXACT_QUBITS: usize = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PhaseError {
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error("dimension mismatch: matrix has m={matrix}, index has m={index}")]
    DimensionMismatch { matrix: usize, index: usize },
    #[error("m={m} exceeds the materialization cap of {cap} qubits for {what}")]
    TooLarge { m: usize, cap: usize, what: &'static str },
    #[error("the closed-form entry rule only covers the doubling chain, not m={0}")]
    NotDoubling(usize),
    #[error("trace of V_{m} is zero; the generator cannot be normalized")]
    ZeroTrace { m: usize },
    #[error("trace {trace} of V_{m} does not have modulus 2^(m/2); -V/tr V is not unitary")]
    BadTraceModulus { m: usize, trace: String },
    #[error("malformed {what} dump at line {line}: {reason}")]
    Parse { what: &'static str, line: usize, reason: String },
}

fn cap(m: usize, cap: usize, what: &'static str) -> Result<(), PhaseError> {
    if m > cap {
        Err(PhaseError::TooLarge { m, cap, what })
    } else {
        Ok(())
    }
}

/// A basis label `(j_1, ..., j_m)`, bit-packed with `j_1` in bit 0 of word 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitIndex {
    m: usize,
    words: Vec<u64>,
}

impl BitIndex {
    pub fn zeros(m: usize) -> Self {
        Self { m, words: vec![0; m.div_ceil(64).max(1)] }
    }

    /// Label of linear index `n` in an `m`-qubit register.
    pub fn from_linear(m: usize, n: u64) -> Self {
        let mut b = Self::zeros(m);
        b.words[0] = if m < 64 { n & ((1u64 << m) - 1) } else { n };
        b
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut b = Self::zeros(bits.len());
        for (k, &v) in bits.iter().enumerate() {
            b.set(k, v & 1 == 1);
        }
        b
    }

    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let mut b = Self::zeros(m);
        for k in 0..m {
            b.set(k, rng.random());
        }
        b
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// `j_{k+1}` (0-based position `k`).
    #[inline]
    pub fn bit(&self, k: usize) -> bool {
        (self.words[k / 64] >> (k % 64)) & 1 == 1
    }

    fn set(&mut self, k: usize, v: bool) {
        if v {
            self.words[k / 64] |= 1 << (k % 64);
        } else {
            self.words[k / 64] &= !(1 << (k % 64));
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Linear index, if it fits in a `u64`.
    pub fn linear(&self) -> Option<u64> {
        if self.words[1..].iter().any(|&w| w != 0) {
            None
        } else {
            Some(self.words[0])
        }
    }

    /// Bits `start .. start + len` as a new label.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        let mut out = Self::zeros(len);
        for k in 0..len {
            out.set(k, self.bit(start + k));
        }
        out
    }

    /// Parity of the bitwise dot product with a label of equal length.
    pub fn dot_parity(&self, other: &Self) -> bool {
        debug_assert_eq!(self.m, other.m);
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum::<u32>() % 2 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }
}

/// The diagonal of `P_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseVector {
    m: usize,
    entries: Vec<Mod4Exponent>,
}

impl PhaseVector {
    pub fn new(m: usize, entries: Vec<Mod4Exponent>) -> Result<Self, PhaseError> {
        if entries.len() != 1usize << m {
            return Err(PhaseError::DimensionMismatch { matrix: m, index: entries.len() });
        }
        Ok(Self { m, entries })
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[Mod4Exponent] {
        &self.entries
    }

    pub fn get(&self, n: usize) -> Mod4Exponent {
        self.entries[n]
    }

    /// Text dump: `phasevector m=<m>` then one line of `2^m` tokens.
    pub fn dump(&self) -> String {
        let toks: Vec<&str> = self.entries.iter().map(|p| p.token()).collect();
        format!("phasevector m={}\n{}\n", self.m, toks.join(" "))
    }
}

impl FromStr for PhaseVector {
    type Err = PhaseError;

    fn from_str(text: &str) -> Result<Self, PhaseError> {
        let err = |line, reason: String| PhaseError::Parse { what: "phasevector", line, reason };
        let mut lines = text.lines();
        let m: usize = lines
            .next()
            .and_then(|h| h.strip_prefix("phasevector m="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| err(1, "expected `phasevector m=<m>`".into()))?;
        cap(m, MAX_PHASE_QUBITS, "phase vectors")?;
        let body = lines.next().ok_or_else(|| err(2, "missing entries".into()))?;
        let entries = body
            .split_whitespace()
            .map(|t| t.parse::<Mod4Exponent>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| err(2, e))?;
        if entries.len() != 1 << m {
            return Err(err(2, format!("expected {} entries, found {}", 1usize << m, entries.len())));
        }
        Ok(Self { m, entries })
    }
}

/// Dense square matrix whose entries are fourth roots of unity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitEntryMatrix {
    dim: usize,
    entries: Vec<Mod4Exponent>,
}

impl UnitEntryMatrix {
    pub fn new(dim: usize, entries: Vec<Mod4Exponent>) -> Result<Self, PhaseError> {
        if entries.len() != dim * dim {
            return Err(PhaseError::DimensionMismatch { matrix: dim, index: entries.len() });
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Mod4Exponent] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Mod4Exponent {
        self.entries[r * self.dim + c]
    }

    /// Text dump: `unitmatrix m=<m>` then `2^m` lines of `2^m` tokens.
    pub fn dump(&self) -> String {
        let m = self.dim.trailing_zeros();
        let mut s = format!("unitmatrix m={m}\n");
        for row in self.entries.chunks(self.dim) {
            let toks: Vec<&str> = row.iter().map(|p| p.token()).collect();
            s.push_str(&toks.join(" "));
            s.push('\n');
        }
        s
    }
}

impl FromStr for UnitEntryMatrix {
    type Err = PhaseError;

    fn from_str(text: &str) -> Result<Self, PhaseError> {
        let err = |line, reason: String| PhaseError::Parse { what: "unitmatrix", line, reason };
        let mut lines = text.lines();
        let m: usize = lines
            .next()
            .and_then(|h| h.strip_prefix("unitmatrix m="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| err(1, "expected `unitmatrix m=<m>`".into()))?;
        cap(m, MAX_HADAMARD_QUBITS, "unit-entry matrices")?;
        let d = 1usize << m;
        let mut entries = Vec::with_capacity(d * d);
        for r in 0..d {
            let line = lines.next().ok_or_else(|| err(r + 2, "missing row".into()))?;
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<Mod4Exponent>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| err(r + 2, e))?;
            if row.len() != d {
                return Err(err(r + 2, format!("expected {d} entries, found {}", row.len())));
            }
            entries.extend(row);
        }
        Ok(Self { dim: d, entries })
    }
}

/// The unnormalized `±1` Sylvester-Hadamard matrix `H_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignMatrix {
    dim: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i8 {
        self.entries[r * self.dim + c]
    }
}

/// `H_0 = (1)`, `H_{k+1} = [[H_k, H_k], [H_k, -H_k]]`.
pub fn sylvester(m: usize) -> Result<SignMatrix, PhaseError> {
    cap(m, MAX_HADAMARD_QUBITS, "Sylvester-Hadamard matrices")?;
    let mut h = SignMatrix { dim: 1, entries: vec![1] };
    for _ in 0..m {
        let d = h.dim;
        let mut next = vec![0i8; 4 * d * d];
        for r in 0..d {
            for c in 0..d {
                let v = h.get(r, c);
                next[r * 2 * d + c] = v;
                next[r * 2 * d + c + d] = v;
                next[(r + d) * 2 * d + c] = v;
                next[(r + d) * 2 * d + c + d] = -v;
            }
        }
        h = SignMatrix { dim: 2 * d, entries: next };
    }
    Ok(h)
}

/// `H_m * diag(phases)` as a unit-entry matrix.
pub fn sylvester_times_diag(m: usize, phases: &[Mod4Exponent]) -> Result<UnitEntryMatrix, PhaseError> {
    let h = sylvester(m)?;
    let d = h.dim;
    if phases.len() != d {
        return Err(PhaseError::DimensionMismatch { matrix: m, index: phases.len() });
    }
    let mut entries = Vec::with_capacity(d * d);
    for r in 0..d {
        for (c, &p) in phases.iter().enumerate() {
            let sign = if h.get(r, c) < 0 { Mod4Exponent::MINUS_ONE } else { Mod4Exponent::ONE };
            entries.push(sign + p);
        }
    }
    Ok(UnitEntryMatrix { dim: d, entries })
}

/// Phase `p_j` of `B` by the quadratic-form rule, sums taken over the integers.
pub fn phase_from_b(b: &BMatrix, j: &BitIndex) -> Result<Mod4Exponent, PhaseError> {
    let m = b.size();
    if j.len() != m {
        return Err(PhaseError::DimensionMismatch { matrix: m, index: j.len() });
    }
    let mut quad: u64 = 0;
    let mut linear: u64 = 0;
    for k in 0..m {
        if !j.bit(k) {
            continue;
        }
        quad += b
            .row_words(k)
            .iter()
            .zip(j.words())
            .map(|(r, w)| (r & w).count_ones() as u64)
            .sum::<u64>();
        if b.get(k, k) {
            linear += 1;
        }
    }
    Ok(Mod4Exponent::new((quad + 2 * linear) as i64))
}

/// All `2^m` phases of `B`, built incrementally: adding bit `h` to a label
/// `n'` (bit `h` clear) changes the exponent by `3 b_hh + 2 |row_h & n'|`.
pub fn phase_vector(b: &BMatrix) -> Result<PhaseVector, PhaseError> {
    let m = b.size();
    cap(m, MAX_PHASE_QUBITS, "phase vectors")?;
    let mut entries = vec![Mod4Exponent::ONE; 1 << m];
    for h in 0..m {
        let row = b.row_mask(h);
        let diag = if b.get(h, h) { 3 } else { 0 };
        let half = 1usize << h;
        for n in 0..half {
            let delta = diag + 2 * (row & n as u64).count_ones() as i64;
            entries[half + n] = entries[n] + Mod4Exponent::new(delta);
        }
    }
    Ok(PhaseVector { m, entries })
}

/// Row-major flattening of a `d x d` matrix into a length-`d^2` phase vector.
pub fn chop(v: &UnitEntryMatrix) -> PhaseVector {
    let m = 2 * v.dim.trailing_zeros() as usize;
    PhaseVector { m, entries: v.entries.clone() }
}

/// `V_m = H_m * diag(p)` for the supported matrix `B_m`.
pub fn v_matrix(m: usize) -> Result<UnitEntryMatrix, PhaseError> {
    let b = gf2::build(m)?;
    cap(m, MAX_HADAMARD_QUBITS, "V matrices")?;
    sylvester_times_diag(m, phase_vector(&b)?.entries())
}

fn require_doubling(m: usize) -> Result<(), PhaseError> {
    match gf2::construction_for(m)? {
        Construction::Doubling => Ok(()),
        Construction::Tripling => Err(PhaseError::NotDoubling(m)),
    }
}

/// Entry `(i, j)` of `V_m` from the closed form, without materializing anything:
/// `(-1)^x` if `j_1 = 0` and `-i (-1)^x` otherwise, where
/// `x = i.j + (j_1..j_{m/2}).(j_{m/2+1}..j_m) + ... + j_1 j_2`.
pub fn v_entry(m: usize, i: &BitIndex, j: &BitIndex) -> Result<Mod4Exponent, PhaseError> {
    require_doubling(m)?;
    for idx in [i, j] {
        if idx.len() != m {
            return Err(PhaseError::DimensionMismatch { matrix: m, index: idx.len() });
        }
    }
    let mut x = i.dot_parity(j);
    let mut half = m / 2;
    while half >= 1 {
        x ^= j.slice(0, half).dot_parity(&j.slice(half, half));
        half /= 2;
    }
    let base = if j.bit(0) { Mod4Exponent::MINUS_I } else { Mod4Exponent::ONE };
    Ok(if x { base + Mod4Exponent::MINUS_ONE } else { base })
}

/// `p_j` of `P_m` by unrolling `P_m = chop(V_{m/2})` at a single index: the
/// low half `a` of `j` selects the column and the high half `b` the row of
/// `V_{m/2} = H diag(P_{m/2})`, so `p_j = (-1)^(a.b) p_a`.
pub fn chop_recursion_phase(m: usize, j: &BitIndex) -> Result<Mod4Exponent, PhaseError> {
    require_doubling(m)?;
    if j.len() != m {
        return Err(PhaseError::DimensionMismatch { matrix: m, index: j.len() });
    }
    fn rec(j: &BitIndex) -> Mod4Exponent {
        let m = j.len();
        if m == 1 {
            return if j.bit(0) { Mod4Exponent::MINUS_I } else { Mod4Exponent::ONE };
        }
        let col = j.slice(0, m / 2);
        let row = j.slice(m / 2, m / 2);
        let sign = if row.dot_parity(&col) { Mod4Exponent::MINUS_ONE } else { Mod4Exponent::ONE };
        sign + rec(&col)
    }
    Ok(rec(j))
}

/// `tr V_m` by summing `(-1)^{|j|} p_j` over the diagonal.
pub fn trace_v(m: usize) -> Result<GaussianInt, PhaseError> {
    trace_from_b(&gf2::build(m)?)
}

/// `tr (H diag(p))` for the phase system of an arbitrary `B`.
pub fn trace_from_b(b: &BMatrix) -> Result<GaussianInt, PhaseError> {
    cap(b.size(), MAX_PHASE_QUBITS, "diagonal summation")?;
    let p = phase_vector(b)?;
    let mut tally = [0i64; 4];
    for (n, e) in p.entries.iter().enumerate() {
        let sign = if (n as u64).count_ones() % 2 == 1 { Mod4Exponent::MINUS_ONE } else { Mod4Exponent::ONE };
        tally[(sign + *e).exponent() as usize] += 1;
    }
    Ok(GaussianInt::new(tally[0] - tally[2], tally[1] - tally[3]))
}

/// `tr V_m` for any supported `m`: summed when `m <= MAX_PHASE_QUBITS`,
/// otherwise (doubling chain only) the closed value `i 2^(m/2)`.
pub fn generator_trace(m: usize) -> Result<GaussianInt, PhaseError> {
    if m <= MAX_PHASE_QUBITS {
        return trace_v(m);
    }
    require_doubling(m)?;
    Ok(GaussianInt::new(0, num_bigint::BigInt::from(1) << (m / 2)))
}

/// Scale and phase exponents `(s, t)` with `-1 / tr V_m = w^t 2^(-s/2)`.
pub fn normalization(m: usize, trace: &GaussianInt) -> Result<(u64, EighthRoot), PhaseError> {
    if trace.is_zero() {
        return Err(PhaseError::ZeroTrace { m });
    }
    let bad = || PhaseError::BadTraceModulus { m, trace: trace.to_string() };
    if !trace.has_norm_pow2(m as u64) {
        return Err(bad());
    }
    // -1/tr = -conj(tr) / 2^m, so w^t must equal 2^(-m/2) * (-conj(tr))
    let target = ScaledGaussian::new(-&trace.conj(), m as u64, EighthRoot::ONE);
    (0..8)
        .map(EighthRoot::new)
        .find(|&t| target.value_eq(&ScaledGaussian::new(GaussianInt::one(), 0, t)))
        .map(|t| (m as u64, t))
        .ok_or_else(bad)
}

/// Everything needed to apply `U_m = w^t 2^(-s/2) H_m diag(p)` without
/// materializing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub m: usize,
    pub phases: PhaseVector,
    pub scale_exp: u64,
    pub phase: EighthRoot,
}

impl Generator {
    pub fn new(m: usize) -> Result<Self, PhaseError> {
        let b = gf2::build(m)?;
        let phases = phase_vector(&b)?;
        let (scale_exp, phase) = normalization(m, &trace_v(m)?)?;
        Ok(Self { m, phases, scale_exp, phase })
    }
}

/// Exact `U_m = -V_m / tr V_m`.
pub fn u_matrix(m: usize) -> Result<ExactScaledMatrix, PhaseError> {
    gf2::construction_for(m)?;
    cap(m, MAX_EXACT_QUBITS, "exact generators")?;
    let v = v_matrix(m)?;
    let (s, t) = normalization(m, &trace_v(m)?)?;
    Ok(ExactScaledMatrix::from_unit(&v).with_scale_phase(s, t))
}

impl fmt::Display for PhaseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(ts: &[i64]) -> Vec<Mod4Exponent> {
        ts.iter().map(|&t| Mod4Exponent::new(t)).collect()
    }

    #[test]
    fn phase_rule_examples() {
        let b2 = gf2::build(2).unwrap();
        assert_eq!(phase_from_b(&b2, &BitIndex::from_bits(&[1, 0])).unwrap(), Mod4Exponent::MINUS_I);
        assert_eq!(phase_from_b(&b2, &BitIndex::from_bits(&[1, 1])).unwrap(), Mod4Exponent::I);
        for m in [1, 2, 4, 6, 8, 256] {
            let b = gf2::build(m).unwrap();
            assert_eq!(phase_from_b(&b, &BitIndex::zeros(m)).unwrap(), Mod4Exponent::ONE);
        }
        assert!(matches!(
            phase_from_b(&b2, &BitIndex::zeros(3)),
            Err(PhaseError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn small_phase_vectors() {
        assert_eq!(phase_vector(&gf2::build(1).unwrap()).unwrap().entries(), p(&[0, 3]));
        assert_eq!(phase_vector(&gf2::build(2).unwrap()).unwrap().entries(), p(&[0, 3, 0, 1]));
        assert!(matches!(
            phase_vector(&gf2::build(32).unwrap()),
            Err(PhaseError::TooLarge { m: 32, .. })
        ));
    }

    #[test]
    fn incremental_vector_matches_direct_rule() {
        for m in [1, 2, 4, 6, 8, 12] {
            let b = gf2::build(m).unwrap();
            let pv = phase_vector(&b).unwrap();
            for n in 0..1u64 << m {
                assert_eq!(pv.get(n as usize), phase_from_b(&b, &BitIndex::from_linear(m, n)).unwrap());
            }
        }
    }

    #[test]
    fn chop_examples() {
        let v1 = v_matrix(1).unwrap();
        assert_eq!(v1.entries(), p(&[0, 3, 0, 1]));
        assert_eq!(chop(&v1).entries(), p(&[0, 3, 0, 1]));
        let ones = UnitEntryMatrix::new(2, p(&[0, 0, 0, 0])).unwrap();
        assert_eq!(chop(&ones).entries(), p(&[0, 0, 0, 0]));
        assert_eq!(chop(&v_matrix(2).unwrap()), phase_vector(&gf2::build(4).unwrap()).unwrap());
    }

    #[test]
    fn sylvester_small_and_formula() {
        assert_eq!(sylvester(0).unwrap().entries, vec![1]);
        assert_eq!(sylvester(1).unwrap().entries, vec![1, 1, 1, -1]);
        let h = sylvester(10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let (i, j) = (rng.random_range(0..1024), rng.random_range(0..1024));
            let expected = if ((i & j) as u32).count_ones().is_multiple_of(2) { 1 } else { -1 };
            assert_eq!(h.get(i, j), expected);
        }
        assert!(matches!(sylvester(14), Err(PhaseError::TooLarge { .. })));
    }

    #[test]
    fn sylvester_rows_are_orthogonal() {
        for m in 0..=8 {
            let h = sylvester(m).unwrap();
            let d = h.dim();
            for r in 0..d {
                for s in 0..d {
                    let dot: i64 = (0..d).map(|c| h.get(r, c) as i64 * h.get(s, c) as i64).sum();
                    assert_eq!(dot, if r == s { d as i64 } else { 0 });
                }
            }
        }
    }

    #[test]
    fn v_matrix_examples() {
        assert_eq!(v_matrix(1).unwrap().entries(), p(&[0, 3, 0, 1]));
        assert!(v_matrix(3).is_err());
    }

    #[test]
    fn closed_form_entries() {
        let z = BitIndex::from_bits(&[0]);
        let o = BitIndex::from_bits(&[1]);
        assert_eq!(v_entry(1, &z, &z).unwrap(), Mod4Exponent::ONE);
        assert_eq!(v_entry(1, &z, &o).unwrap(), Mod4Exponent::MINUS_I);
        assert_eq!(v_entry(1, &o, &o).unwrap(), Mod4Exponent::I);
        assert_eq!(v_entry(6, &BitIndex::zeros(6), &BitIndex::zeros(6)), Err(PhaseError::NotDoubling(6)));
        for m in [2, 4] {
            let v = v_matrix(m).unwrap();
            for r in 0..1u64 << m {
                for c in 0..1u64 << m {
                    let e = v_entry(m, &BitIndex::from_linear(m, r), &BitIndex::from_linear(m, c)).unwrap();
                    assert_eq!(e, v.get(r as usize, c as usize), "m={m} ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn traces() {
        assert_eq!(trace_v(1).unwrap(), GaussianInt::new(1, 1));
        assert_eq!(trace_v(2).unwrap(), GaussianInt::new(0, 2));
        assert_eq!(trace_v(4).unwrap(), GaussianInt::new(0, 4));
        assert_eq!(trace_v(8).unwrap(), GaussianInt::new(0, 16));
        assert_eq!(generator_trace(64).unwrap(), GaussianInt::new(0, 1u64 << 32));
    }

    #[test]
    fn normalization_exponents() {
        assert_eq!(normalization(1, &GaussianInt::new(1, 1)).unwrap(), (1, EighthRoot::new(3)));
        assert_eq!(normalization(2, &GaussianInt::new(0, 2)).unwrap(), (2, EighthRoot::new(2)));
        assert_eq!(normalization(2, &GaussianInt::zero()), Err(PhaseError::ZeroTrace { m: 2 }));
        assert!(matches!(normalization(2, &GaussianInt::new(1, 1)), Err(PhaseError::BadTraceModulus { .. })));
    }

    #[test]
    fn u_matrix_forms() {
        let u2 = u_matrix(2).unwrap();
        assert_eq!((u2.scale_exp(), u2.phase()), (2, EighthRoot::new(2)));
        assert_eq!(u2.entries(), ExactScaledMatrix::from_unit(&v_matrix(2).unwrap()).entries());
        let u1 = u_matrix(1).unwrap();
        assert_eq!((u1.scale_exp(), u1.phase()), (1, EighthRoot::new(3)));
        let u1_cubed = u1.matmul(&u1).unwrap().matmul(&u1).unwrap();
        assert!(u1_cubed.is_identity());
        let reduced = u1_cubed.reduce();
        assert!(reduced.is_identity());
        assert_eq!(reduced.scale_exp(), 0);
    }

    #[test]
    fn dumps_round_trip() {
        let pv = phase_vector(&gf2::build(2).unwrap()).unwrap();
        assert_eq!(pv.dump(), "phasevector m=2\n1 -i 1 i\n");
        assert_eq!(pv.dump().parse::<PhaseVector>().unwrap(), pv);
        let v = v_matrix(1).unwrap();
        assert_eq!(v.dump(), "unitmatrix m=1\n1 -i\n1 i\n");
        assert_eq!(v.dump().parse::<UnitEntryMatrix>().unwrap(), v);
        assert!("unitmatrix m=1\n1 -i\n1 2\n".parse::<UnitEntryMatrix>().is_err());
        assert!("phasevector m=2\n1 -i 1\n".parse::<PhaseVector>().is_err());
    }
}
