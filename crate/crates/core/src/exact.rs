//! Exact Gaussian-integer arithmetic.
//!
//! [`ExactScaledMatrix`] carries its value as `w^t * 2^(-s/2) * G` with
//! `w = e^{i pi/4}`, `G` a matrix of Gaussian integers, and the power-of-two
//! scale and eighth-root phase tracked as separate exponents. Products add the
//! exponents; nothing is ever divided out unless [`ExactScaledMatrix::reduce`]
//! is called explicitly.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::phase::UnitEntryMatrix;
use crate::roots::{EighthRoot, Mod4Exponent};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("malformed exact matrix dump at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// `re + im*i` with arbitrary-precision components.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        Self { re: re.into(), im: im.into() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn from_root(r: Mod4Exponent) -> Self {
        match r.exponent() {
            0 => Self::new(1, 0),
            1 => Self::new(0, 1),
            2 => Self::new(-1, 0),
            _ => Self::new(0, -1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    /// `i^r * self`.
    pub fn mul_root(&self, r: Mod4Exponent) -> Self {
        let (re, im) = (&self.re, &self.im);
        match r.exponent() {
            0 => self.clone(),
            1 => Self { re: -im, im: re.clone() },
            2 => Self { re: -re, im: -im },
            _ => Self { re: im.clone(), im: -re },
        }
    }

    /// `self += i^r * other` using only additions.
    pub fn add_rotated(&mut self, other: &Self, r: Mod4Exponent) {
        match r.exponent() {
            0 => {
                self.re += &other.re;
                self.im += &other.im;
            }
            1 => {
                self.re -= &other.im;
                self.im += &other.re;
            }
            2 => {
                self.re -= &other.re;
                self.im -= &other.im;
            }
            _ => {
                self.re += &other.im;
                self.im -= &other.re;
            }
        }
    }

    /// Whether `|self|^2 == 2^n`.
    ///
    /// A Gaussian integer of norm `2^n` is a unit times `(1+i)^n`, so for even
    /// `n` it is `±2^(n/2)` or `±2^(n/2) i`, and for odd `n` both components
    /// have absolute value `2^((n-1)/2)`. No squaring needed.
    pub fn has_norm_pow2(&self, n: u64) -> bool {
        let is_pow = |x: &BigInt, e: u64| {
            x.bits() == e + 1 && x.magnitude().trailing_zeros() == Some(e)
        };
        if n.is_multiple_of(2) {
            let e = n / 2;
            (self.re.is_zero() && is_pow(&self.im, e)) || (self.im.is_zero() && is_pow(&self.re, e))
        } else {
            let e = (n - 1) / 2;
            is_pow(&self.re, e) && is_pow(&self.im, e)
        }
    }

    /// `self / (1+i)` when the division is exact.
    pub fn div_one_plus_i(&self) -> Option<Self> {
        // (a+bi)(1-i)/2 = ((a+b) + (b-a)i)/2
        let s = &self.re + &self.im;
        if s.is_odd_bigint() {
            return None;
        }
        let d = &self.im - &self.re;
        Some(Self { re: s >> 1, im: d >> 1 })
    }

    pub fn to_complex_scaled(&self, halvings: u64) -> Complex<f64> {
        Complex::new(scaled_f64(&self.re, halvings), scaled_f64(&self.im, halvings))
    }

    /// In-place butterfly `(x, y) -> (x + y, x - y)`.
    fn butterfly(x: &mut Self, y: &mut Self) {
        x.re += &y.re;
        x.im += &y.im;
        y.re <<= 1u32;
        y.im <<= 1u32;
        y.re -= &x.re;
        y.im -= &x.im;
        y.re = -std::mem::take(&mut y.re);
        y.im = -std::mem::take(&mut y.im);
    }
}

trait OddBig {
    fn is_odd_bigint(&self) -> bool;
}

impl OddBig for BigInt {
    fn is_odd_bigint(&self) -> bool {
        self.magnitude().bit(0)
    }
}

/// `x * 2^(-halvings/2)` as f64, without overflowing for huge `x`.
fn scaled_f64(x: &BigInt, halvings: u64) -> f64 {
    let bits = x.bits();
    let (mantissa, shift) = if bits > 900 {
        let drop = bits - 64;
        ((x >> drop).to_f64().unwrap_or(0.0), drop as f64)
    } else {
        (x.to_f64().unwrap_or(0.0), 0.0)
    };
    mantissa * (shift - halvings as f64 / 2.0).exp2()
}

impl Add for &GaussianInt {
    type Output = GaussianInt;
    fn add(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &GaussianInt {
    type Output = GaussianInt;
    fn sub(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &GaussianInt {
    type Output = GaussianInt;
    fn mul(self, rhs: &GaussianInt) -> GaussianInt {
        gi_mul(self, rhs)
    }
}

impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt { re: -&self.re, im: -&self.im }
    }
}

/// `(a+bi)(c+di) = (ac - bd) + (ad + bc)i`.
pub fn gi_mul(x: &GaussianInt, y: &GaussianInt) -> GaussianInt {
    GaussianInt {
        re: &x.re * &y.re - &x.im * &y.im,
        im: &x.re * &y.im + &x.im * &y.re,
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl FromStr for GaussianInt {
    type Err = String;

    /// Parses the `a+bi` / `a-bi` token form written by `Display`.
    fn from_str(s: &str) -> Result<Self, String> {
        let body = s.strip_suffix('i').ok_or_else(|| format!("`{s}` does not end in 'i'"))?;
        // the separator is the last sign that is not in leading position
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .last()
            .map(|(i, _)| i)
            .ok_or_else(|| format!("`{s}` is not of the form a+bi"))?;
        let (re, im) = body.split_at(split);
        let im = im.strip_prefix('+').unwrap_or(im);
        let parse = |t: &str| {
            if t.is_empty() || t.starts_with("+-") || t.starts_with("--") {
                return Err(format!("bad integer `{t}` in `{s}`"));
            }
            t.parse::<BigInt>().map_err(|e| format!("bad integer `{t}` in `{s}`: {e}"))
        };
        if im.starts_with('+') {
            return Err(format!("`{s}` is not of the form a+bi"));
        }
        Ok(Self { re: parse(re)?, im: parse(im)? })
    }
}

/// A scalar `w^t * 2^(-s/2) * g`.
#[derive(Clone, Debug)]
pub struct ScaledGaussian {
    pub value: GaussianInt,
    pub scale_exp: u64,
    pub phase: EighthRoot,
}

impl ScaledGaussian {
    pub fn new(value: GaussianInt, scale_exp: u64, phase: EighthRoot) -> Self {
        Self { value, scale_exp, phase }
    }

    pub fn integer(v: i64) -> Self {
        Self::new(GaussianInt::new(v, 0), 0, EighthRoot::ONE)
    }

    /// Rewrite as `2^(-e/2) * h` with `h` a Gaussian integer.
    fn as_half_power(&self) -> (u64, GaussianInt) {
        let t = self.phase.exponent();
        if t.is_multiple_of(2) {
            let h = self.value.mul_root(Mod4Exponent::new(t as i64 / 2));
            (self.scale_exp, h)
        } else {
            // w = (1+i)/sqrt(2)
            let rot = self.value.mul_root(Mod4Exponent::new((t as i64 - 1) / 2));
            let h = gi_mul(&rot, &GaussianInt::new(1, 1));
            (self.scale_exp + 1, h)
        }
    }

    /// Exact equality of the represented complex numbers.
    pub fn value_eq(&self, other: &Self) -> bool {
        let (e1, h1) = self.as_half_power();
        let (e2, h2) = other.as_half_power();
        if h1.is_zero() || h2.is_zero() {
            return h1.is_zero() && h2.is_zero();
        }
        // sqrt(2) * h is never a Gaussian integer for nonzero h
        if (e1 + e2) % 2 == 1 {
            return false;
        }
        let (lo, hi, h_lo, h_hi) = if e1 <= e2 { (e1, e2, h1, h2) } else { (e2, e1, h2, h1) };
        let shift = (hi - lo) / 2;
        GaussianInt { re: h_lo.re << shift, im: h_lo.im << shift } == h_hi
    }

    pub fn to_complex(&self) -> Complex<f64> {
        self.phase.to_complex() * self.value.to_complex_scaled(self.scale_exp)
    }
}

/// Dense `d x d` matrix with value `w^t * 2^(-s/2) * G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactScaledMatrix {
    dim: usize,
    entries: Vec<GaussianInt>,
    scale_exp: u64,
    phase: EighthRoot,
}

impl ExactScaledMatrix {
    pub fn new(
        dim: usize,
        entries: Vec<GaussianInt>,
        scale_exp: u64,
        phase: EighthRoot,
    ) -> Result<Self, ExactError> {
        if entries.len() != dim * dim {
            return Err(ExactError::DimensionMismatch(entries.len(), dim * dim));
        }
        Ok(Self { dim, entries, scale_exp, phase })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![GaussianInt::zero(); dim * dim];
        for k in 0..dim {
            entries[k * dim + k] = GaussianInt::one();
        }
        Self { dim, entries, scale_exp: 0, phase: EighthRoot::ONE }
    }

    /// Embed a matrix of fourth roots of unity with unit scale and phase.
    pub fn from_unit(v: &UnitEntryMatrix) -> Self {
        let entries = v.entries().iter().map(|&r| GaussianInt::from_root(r)).collect();
        Self { dim: v.dim(), entries, scale_exp: 0, phase: EighthRoot::ONE }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale_exp(&self) -> u64 {
        self.scale_exp
    }

    pub fn phase(&self) -> EighthRoot {
        self.phase
    }

    pub fn entries(&self) -> &[GaussianInt] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> &GaussianInt {
        &self.entries[r * self.dim + c]
    }

    /// Entry `(r, c)` with the global scale and phase attached.
    pub fn value_at(&self, r: usize, c: usize) -> ScaledGaussian {
        ScaledGaussian::new(self.get(r, c).clone(), self.scale_exp, self.phase)
    }

    pub fn with_scale_phase(mut self, scale_exp: u64, phase: EighthRoot) -> Self {
        self.scale_exp = scale_exp;
        self.phase = phase;
        self
    }

    fn check_dim(&self, other: usize) -> Result<(), ExactError> {
        if self.dim != other {
            return Err(ExactError::DimensionMismatch(self.dim, other));
        }
        Ok(())
    }

    /// General exact product.
    pub fn matmul(&self, other: &Self) -> Result<Self, ExactError> {
        self.check_dim(other.dim)?;
        let d = self.dim;
        let mut out = vec![GaussianInt::zero(); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = &self.entries[r * d + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..d {
                    let p = gi_mul(a, &other.entries[k * d + c]);
                    let o = &mut out[r * d + c];
                    o.re += p.re;
                    o.im += p.im;
                }
            }
        }
        Ok(Self {
            dim: d,
            entries: out,
            scale_exp: self.scale_exp + other.scale_exp,
            phase: self.phase + other.phase,
        })
    }

    /// `self * V` for `V` with entries in `{±1, ±i}`, using additions only.
    pub fn unit_right_multiply(&self, v: &UnitEntryMatrix) -> Result<Self, ExactError> {
        self.check_dim(v.dim())?;
        let d = self.dim;
        let mut out = vec![GaussianInt::zero(); d * d];
        for r in 0..d {
            let row = &self.entries[r * d..(r + 1) * d];
            for c in 0..d {
                let o = &mut out[r * d + c];
                for (k, a) in row.iter().enumerate() {
                    o.add_rotated(a, v.get(k, c));
                }
            }
        }
        Ok(Self { dim: d, entries: out, scale_exp: self.scale_exp, phase: self.phase })
    }

    /// `self * H * diag(phases)` where `H` is the unnormalized Sylvester
    /// matrix of matching size. Rows are transformed by in-place butterflies,
    /// so the cost is `O(d^2 log d)` additions. `extra_scale` and
    /// `extra_phase` are added to the result's exponents, which makes this a
    /// right multiplication by `w^t 2^(-s/2) H diag(p)`.
    pub fn mul_sylvester_diag(
        &self,
        phases: &[Mod4Exponent],
        extra_scale: u64,
        extra_phase: EighthRoot,
    ) -> Result<Self, ExactError> {
        self.check_dim(phases.len())?;
        let d = self.dim;
        let mut entries = self.entries.clone();
        for row in entries.chunks_mut(d) {
            fwht_exact(row);
            for (x, &p) in row.iter_mut().zip(phases) {
                if p != Mod4Exponent::ONE {
                    *x = x.mul_root(p);
                }
            }
        }
        Ok(Self {
            dim: d,
            entries,
            scale_exp: self.scale_exp + extra_scale,
            phase: self.phase + extra_phase,
        })
    }

    pub fn trace(&self) -> ScaledGaussian {
        let mut t = GaussianInt::zero();
        for k in 0..self.dim {
            t = &t + self.get(k, k);
        }
        ScaledGaussian::new(t, self.scale_exp, self.phase)
    }

    /// Exact test for the identity matrix, including scale and phase.
    pub fn is_identity(&self) -> bool {
        let d = self.dim;
        let diag = self.get(0, 0);
        for r in 0..d {
            for c in 0..d {
                let e = self.get(r, c);
                if r == c {
                    if e != diag {
                        return false;
                    }
                } else if !e.is_zero() {
                    return false;
                }
            }
        }
        ScaledGaussian::new(diag.clone(), self.scale_exp, self.phase).value_eq(&ScaledGaussian::integer(1))
    }

    /// Factor the largest common power of `(1+i)` out of `G` into the scale.
    /// Each factor lowers the scale exponent by one and advances the phase
    /// by one eighth turn, since `1+i = sqrt(2) w`.
    pub fn reduce(&self) -> Self {
        let mut out = self.clone();
        while out.scale_exp > 0 && out.entries.iter().any(|e| !e.is_zero()) {
            let divided: Option<Vec<_>> = out.entries.iter().map(|e| e.div_one_plus_i()).collect();
            match divided {
                Some(entries) => {
                    out.entries = entries;
                    out.scale_exp -= 1;
                    out.phase = out.phase + EighthRoot::new(1);
                }
                None => break,
            }
        }
        out
    }

    pub fn to_complex(&self) -> DMatrix<Complex<f64>> {
        let d = self.dim;
        let w = self.phase.to_complex();
        DMatrix::from_fn(d, d, |r, c| w * self.get(r, c).to_complex_scaled(self.scale_exp))
    }

    /// Text dump: header `exact d=<d> s=<s> t=<t>`, then `d` lines of `a+bi` tokens.
    pub fn dump(&self) -> String {
        let mut s = format!("exact d={} s={} t={}\n", self.dim, self.scale_exp, self.phase.exponent());
        for row in self.entries.chunks(self.dim) {
            let line: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

impl FromStr for ExactScaledMatrix {
    type Err = ExactError;

    fn from_str(text: &str) -> Result<Self, ExactError> {
        let err = |line: usize, reason: String| ExactError::Parse { line, reason };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let field = |idx: usize, key: &str| -> Result<u64, ExactError> {
            fields
                .get(idx)
                .and_then(|f| f.strip_prefix(key))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err(1, format!("expected `{key}<n>` in header")))
        };
        if fields.len() != 4 || fields[0] != "exact" {
            return Err(err(1, "expected `exact d=<d> s=<s> t=<t>`".into()));
        }
        let dim = field(1, "d=")? as usize;
        let scale_exp = field(2, "s=")?;
        let t = field(3, "t=")?;
        if t >= 8 {
            return Err(err(1, "phase exponent must be in 0..8".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            let line = lines.next().ok_or_else(|| err(r + 2, "missing row".into()))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != dim {
                return Err(err(r + 2, format!("expected {dim} entries, found {}", toks.len())));
            }
            for tok in toks {
                entries.push(tok.parse().map_err(|e| err(r + 2, e))?);
            }
        }
        Self::new(dim, entries, scale_exp, EighthRoot::new(t as i64))
    }
}

/// Unnormalized Walsh-Hadamard transform of a row of Gaussian integers.
pub fn fwht_exact(row: &mut [GaussianInt]) {
    let n = row.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in row.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                GaussianInt::butterfly(x, y);
            }
        }
        h *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gi(a: i64, b: i64) -> GaussianInt {
        GaussianInt::new(a, b)
    }

    #[test]
    fn small_products() {
        assert_eq!(gi_mul(&gi(1, 1), &gi(1, -1)), gi(2, 0));
        assert_eq!(gi_mul(&gi(0, 1), &gi(0, 1)), gi(-1, 0));
        assert_eq!(gi(3, -4).norm_sqr(), BigInt::from(25));
    }

    #[test]
    fn rotations_match_multiplication() {
        let x = gi(5, -7);
        for t in 0..4 {
            let r = Mod4Exponent::new(t);
            assert_eq!(x.mul_root(r), gi_mul(&GaussianInt::from_root(r), &x));
            let mut acc = gi(1, 2);
            acc.add_rotated(&x, r);
            assert_eq!(acc, &gi(1, 2) + &x.mul_root(r));
        }
    }

    #[test]
    fn norm_pow2_detection() {
        // (1+i)^n for n = 0..12 times every unit
        let mut p = GaussianInt::one();
        for n in 0..12u64 {
            for t in 0..4 {
                let q = p.mul_root(Mod4Exponent::new(t));
                assert!(q.has_norm_pow2(n), "{q} n={n}");
                assert!(!q.has_norm_pow2(n + 1));
            }
            p = gi_mul(&p, &gi(1, 1));
        }
        assert!(!gi(3, 1).has_norm_pow2(3));
        assert!(!gi(0, 0).has_norm_pow2(0));
        assert!(!gi(2, 2).has_norm_pow2(2));
    }

    #[test]
    fn div_one_plus_i() {
        assert_eq!(gi(2, 0).div_one_plus_i(), Some(gi(1, -1)));
        assert_eq!(gi(1, 0).div_one_plus_i(), None);
        assert_eq!(gi(-3, 5).div_one_plus_i().map(|q| gi_mul(&q, &gi(1, 1))), Some(gi(-3, 5)));
    }

    #[test]
    fn token_round_trip() {
        for (x, s) in [(gi(3, -2), "3-2i"), (gi(0, 1), "0+1i"), (gi(-1, 0), "-1+0i"), (gi(-4, -9), "-4-9i")] {
            assert_eq!(x.to_string(), s);
            assert_eq!(s.parse::<GaussianInt>().unwrap(), x);
        }
        for bad in ["3", "3+i", "+-2i", "1+2", "1++2i", "a+bi", "1+-2i"] {
            assert!(bad.parse::<GaussianInt>().is_err(), "{bad}");
        }
    }

    #[test]
    fn scaled_equality() {
        // w * 2^(-1/2) * (1-i) = (1+i)/2 * (1-i) = 1
        let a = ScaledGaussian::new(gi(1, -1), 1, EighthRoot::new(1));
        assert!(a.value_eq(&ScaledGaussian::integer(1)));
        // 2^(-2/2) * 2 = 1
        assert!(ScaledGaussian::new(gi(2, 0), 2, EighthRoot::ONE).value_eq(&ScaledGaussian::integer(1)));
        assert!(!ScaledGaussian::new(gi(1, 0), 1, EighthRoot::ONE).value_eq(&ScaledGaussian::integer(1)));
        assert!(ScaledGaussian::new(gi(0, 1), 0, EighthRoot::new(6)).value_eq(&ScaledGaussian::integer(1)));
        assert!(ScaledGaussian::new(gi(0, 0), 3, EighthRoot::new(1)).value_eq(&ScaledGaussian::integer(0)));
    }

    #[test]
    fn matmul_identity_and_mismatch() {
        let a = ExactScaledMatrix::new(2, vec![gi(1, 2), gi(0, -1), gi(3, 0), gi(1, 1)], 3, EighthRoot::new(5))
            .unwrap();
        let id = ExactScaledMatrix::identity(2);
        assert_eq!(a.matmul(&id).unwrap(), a);
        assert_eq!(id.matmul(&a).unwrap(), a);
        let id4 = ExactScaledMatrix::identity(4);
        assert_eq!(a.matmul(&id4), Err(ExactError::DimensionMismatch(2, 4)));
        let v = crate::phase::v_matrix(2).unwrap();
        assert_eq!(a.unit_right_multiply(&v), Err(ExactError::DimensionMismatch(2, 4)));
    }

    #[test]
    fn reduce_factors_common_two_power() {
        let a = ExactScaledMatrix::new(1, vec![gi(2, 0)], 2, EighthRoot::ONE).unwrap();
        let r = a.reduce();
        assert_eq!(r.scale_exp(), 0);
        assert!(r.value_at(0, 0).value_eq(&ScaledGaussian::integer(1)));
        assert!(r.is_identity());
    }

    #[test]
    fn dump_round_trip() {
        let a = ExactScaledMatrix::new(2, vec![gi(1, 2), gi(0, -1), gi(-3, 0), gi(1, 1)], 3, EighthRoot::new(5))
            .unwrap();
        let text = a.dump();
        assert_eq!(text, "exact d=2 s=3 t=5\n1+2i 0-1i\n-3+0i 1+1i\n");
        assert_eq!(text.parse::<ExactScaledMatrix>().unwrap(), a);
        assert!("exact d=2 s=3\n".parse::<ExactScaledMatrix>().is_err());
        assert!(matches!(
            "exact d=2 s=0 t=0\n1+0i\n".parse::<ExactScaledMatrix>(),
            Err(ExactError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn scaled_f64_handles_huge_values() {
        let big = BigInt::from(1) << 2000u32;
        assert_eq!(scaled_f64(&big, 4000), 1.0);
        assert_eq!(scaled_f64(&BigInt::from(3), 2), 1.5);
    }

    /// Schoolbook reference on decimal digit vectors, independent of BigInt's multiply.
    fn reference_mul(x: &BigInt, y: &BigInt) -> BigInt {
        let (sx, dx) = x.to_radix_le(10);
        let (sy, dy) = y.to_radix_le(10);
        let mut acc = vec![0u64; dx.len() + dy.len() + 1];
        for (i, &a) in dx.iter().enumerate() {
            for (j, &b) in dy.iter().enumerate() {
                acc[i + j] += a as u64 * b as u64;
            }
        }
        let mut carry = 0;
        let mut digits = Vec::with_capacity(acc.len());
        for v in acc {
            let t = v + carry;
            digits.push((t % 10) as u8);
            carry = t / 10;
        }
        while carry > 0 {
            digits.push((carry % 10) as u8);
            carry /= 10;
        }
        let sign = if sx == sy { num_bigint::Sign::Plus } else { num_bigint::Sign::Minus };
        BigInt::from_radix_le(sign, &digits, 10).unwrap()
    }

    fn big_strategy() -> impl Strategy<Value = BigInt> {
        (any::<bool>(), prop::collection::vec(any::<u32>(), 16))
            .prop_map(|(neg, words)| {
                let sign = if neg { num_bigint::Sign::Minus } else { num_bigint::Sign::Plus };
                BigInt::from_slice(sign, &words)
            })
    }

    fn small_matrix(d: usize) -> impl Strategy<Value = ExactScaledMatrix> {
        prop::collection::vec((-50i64..50, -50i64..50), d * d).prop_map(move |v| {
            ExactScaledMatrix::new(d, v.into_iter().map(|(a, b)| gi(a, b)).collect(), 0, EighthRoot::ONE)
                .unwrap()
        })
    }

    fn unit_matrix(d: usize) -> impl Strategy<Value = UnitEntryMatrix> {
        prop::collection::vec(0i64..4, d * d).prop_map(move |v| {
            UnitEntryMatrix::new(d, v.into_iter().map(Mod4Exponent::new).collect()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn gi_mul_matches_schoolbook(a in big_strategy(), b in big_strategy(), c in big_strategy(), d in big_strategy()) {
            let p = gi_mul(&GaussianInt::new(a.clone(), b.clone()), &GaussianInt::new(c.clone(), d.clone()));
            prop_assert_eq!(p.re, reference_mul(&a, &c) - reference_mul(&b, &d));
            prop_assert_eq!(p.im, reference_mul(&a, &d) + reference_mul(&b, &c));
        }

        #[test]
        fn norm_is_multiplicative(a in big_strategy(), b in big_strategy(), c in big_strategy(), d in big_strategy()) {
            let x = GaussianInt::new(a, b);
            let y = GaussianInt::new(c, d);
            prop_assert_eq!(gi_mul(&x, &y).norm_sqr(), x.norm_sqr() * y.norm_sqr());
        }

        #[test]
        fn matmul_is_associative(a in small_matrix(3), b in small_matrix(3), c in small_matrix(3)) {
            let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
            let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn unit_multiply_matches_matmul(a in small_matrix(8), v in unit_matrix(8)) {
            let fast = a.unit_right_multiply(&v).unwrap();
            let slow = a.matmul(&ExactScaledMatrix::from_unit(&v)).unwrap();
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn butterfly_rows_match_dense_product(a in small_matrix(8), p in prop::collection::vec(0i64..4, 8)) {
            let phases: Vec<Mod4Exponent> = p.into_iter().map(Mod4Exponent::new).collect();
            let fast = a.mul_sylvester_diag(&phases, 0, EighthRoot::ONE).unwrap();
            let v = crate::phase::sylvester_times_diag(3, &phases).unwrap();
            prop_assert_eq!(fast, a.unit_right_multiply(&v).unwrap());
        }
    }
}
