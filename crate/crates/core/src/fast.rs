//! Matrix-free application of `U_m` via the fast Walsh-Hadamard transform.
//!
//! Binary state-vector format (little-endian throughout):
//!
//! ```text
//! offset 0   8 bytes   magic "MUBSTATE"
//! offset 8   u64       m (number of qubits)
//! offset 16  2^m x (f64 re, f64 im)
//! ```
//!
//! Density matrices use the same layout with magic `"MUBDENSE"` and `d*d`
//! row-major entries, `d = 2^m`.

use std::io::{self, Read, Write};

use nalgebra::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::phase::{Generator, PhaseError, MAX_PHASE_QUBITS};
use crate::verify::{CycleReport, Verdict};

pub type C64 = Complex<f64>;

pub const STATE_MAGIC: &[u8; 8] = b"MUBSTATE";
pub const DENSITY_MAGIC: &[u8; 8] = b"MUBDENSE";

#[derive(Debug, Error)]
pub enum FastError {
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("state has {state} qubits but the generator acts on {generator}")]
    QubitMismatch { state: usize, generator: usize },
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: String },
    #[error("m={0} is too large for a binary state file")]
    BadHeader(u64),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Amplitudes of an `m`-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    m: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self, FastError> {
        if !amps.len().is_power_of_two() {
            return Err(FastError::NotPowerOfTwo(amps.len()));
        }
        Ok(Self { m: amps.len().trailing_zeros() as usize, amps })
    }

    /// Computational basis state `|n>`.
    pub fn basis(m: usize, n: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << m];
        amps[n] = C64::new(1.0, 0.0);
        Self { m, amps }
    }

    /// Haar-random normalized state.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let mut amps: Vec<C64> = (0..1usize << m)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Self { m, amps }
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<(), FastError> {
        write_complex_block(w, STATE_MAGIC, self.m, &self.amps)
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self, FastError> {
        let (m, amps) = read_complex_block(r, STATE_MAGIC, |m| (m <= MAX_PHASE_QUBITS).then(|| 1usize << m))?;
        Ok(Self { m, amps })
    }
}

pub(crate) fn write_complex_block<W: Write>(
    mut w: W,
    magic: &[u8; 8],
    m: usize,
    data: &[C64],
) -> Result<(), FastError> {
    let mut buf = Vec::with_capacity(16 + 16 * data.len());
    buf.extend_from_slice(magic);
    buf.extend_from_slice(&(m as u64).to_le_bytes());
    for z in data {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub(crate) fn read_complex_block<R: Read>(
    mut r: R,
    magic: &[u8; 8],
    len_for: impl Fn(usize) -> Option<usize>,
) -> Result<(usize, Vec<C64>), FastError> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if &header[..8] != magic {
        return Err(FastError::BadMagic { expected: String::from_utf8_lossy(magic).into_owned() });
    }
    let raw_m = u64::from_le_bytes(header[8..].try_into().expect("8 bytes"));
    let m = usize::try_from(raw_m).map_err(|_| FastError::BadHeader(raw_m))?;
    let n = len_for(m).ok_or(FastError::BadHeader(raw_m))?;
    let mut raw = vec![0u8; 16 * n];
    r.read_exact(&mut raw)?;
    let data = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            C64::new(re, im)
        })
        .collect();
    Ok((m, data))
}

/// `v <- H_m v` with the unnormalized Sylvester matrix.
pub fn fwht_in_place(v: &mut [C64]) -> Result<(), FastError> {
    let n = v.len();
    if !n.is_power_of_two() {
        return Err(FastError::NotPowerOfTwo(n));
    }
    let mut h = 1;
    while h < n {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = a + b;
                *y = a - b;
            }
        }
        h *= 2;
    }
    Ok(())
}

/// `U_m` with its phase diagonal cached as complex numbers.
#[derive(Clone, Debug)]
pub struct FastGenerator {
    m: usize,
    phases: Vec<C64>,
    factor: C64,
}

impl FastGenerator {
    pub fn new(m: usize) -> Result<Self, FastError> {
        Ok(Self::from_generator(&Generator::new(m)?))
    }

    pub fn from_generator(g: &Generator) -> Self {
        let phases = g.phases.entries().iter().map(|p| p.to_complex()).collect();
        let factor = g.phase.to_complex() * (-(g.scale_exp as f64) / 2.0).exp2();
        Self { m: g.m, phases, factor }
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    /// Global factor `w^t 2^(-s/2)`.
    pub fn factor(&self) -> C64 {
        self.factor
    }

    /// `v <- U_m v`.
    pub fn apply(&self, v: &mut StateVector) -> Result<(), FastError> {
        if v.m != self.m {
            return Err(FastError::QubitMismatch { state: v.m, generator: self.m });
        }
        for (a, p) in v.amps.iter_mut().zip(&self.phases) {
            *a *= p;
        }
        fwht_in_place(&mut v.amps)?;
        for a in v.amps.iter_mut() {
            *a *= self.factor;
        }
        Ok(())
    }
}

pub fn apply_generator(m: usize, v: &StateVector) -> Result<StateVector, FastError> {
    let g = FastGenerator::new(m)?;
    let mut out = v.clone();
    g.apply(&mut out)?;
    Ok(out)
}

/// Whether `k` may be reduced modulo the cycle length `2^m + 1`.
#[derive(Clone, Copy, Debug, Default)]
pub enum CycleReduction<'a> {
    #[default]
    Off,
    /// Reduce only if this report is a passing verification for the same `m`.
    IfVerified(&'a CycleReport),
}

#[derive(Clone, Debug)]
pub struct PowerResult {
    pub state: StateVector,
    pub requested: u64,
    pub applied: u64,
    pub reduced: bool,
}

/// `U_m^k v` by `k` sequential applications (or `k mod (2^m+1)` when reduction
/// is requested and backed by a passing cycle report).
pub fn apply_power(
    m: usize,
    k: u64,
    v: &StateVector,
    reduction: CycleReduction<'_>,
) -> Result<PowerResult, FastError> {
    let g = FastGenerator::new(m)?;
    let cycle = (1u64 << m) + 1;
    let reduced = match reduction {
        CycleReduction::IfVerified(r) => r.m == m && r.verdict == Verdict::Pass && r.identity_reached,
        CycleReduction::Off => false,
    };
    let applied = if reduced { k % cycle } else { k };
    let mut state = v.clone();
    for _ in 0..applied {
        g.apply(&mut state)?;
    }
    Ok(PowerResult { state, requested: k, applied, reduced: reduced && applied != k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn fwht_basics() {
        let mut v = vec![c(1.0, 0.0), c(0.0, 0.0)];
        fwht_in_place(&mut v).unwrap();
        assert_eq!(v, vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let orig = StateVector::random(5, &mut rng).into_amps();
        let mut w = orig.clone();
        fwht_in_place(&mut w).unwrap();
        fwht_in_place(&mut w).unwrap();
        for (a, b) in w.iter().zip(&orig) {
            assert!((a - b * 32.0).norm() < 1e-12);
        }
        assert!(matches!(fwht_in_place(&mut [c(1.0, 0.0); 3]), Err(FastError::NotPowerOfTwo(3))));
    }

    #[test]
    fn fwht_matches_dense_sylvester() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in 0..=8 {
            let h = phase::sylvester(m).unwrap();
            let v = StateVector::random(m, &mut rng).into_amps();
            let mut fast = v.clone();
            fwht_in_place(&mut fast).unwrap();
            for (r, x) in fast.iter().enumerate() {
                let dense: C64 = (0..v.len()).map(|col| v[col] * h.get(r, col) as f64).sum();
                assert!((x - dense).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn single_qubit_cycle_visits_z_x_y() {
        // |0> -> x-basis state -> y-basis state -> back to |0>, up to phases
        let g = FastGenerator::new(1).unwrap();
        let mut v = StateVector::basis(1, 0);
        let mut seen = Vec::new();
        for _ in 0..3 {
            g.apply(&mut v).unwrap();
            seen.push(v.amps().to_vec());
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let overlap = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm();
        let x_plus = [c(s, 0.0), c(s, 0.0)];
        let x_minus = [c(s, 0.0), c(-s, 0.0)];
        let y_plus = [c(s, 0.0), c(0.0, s)];
        let y_minus = [c(s, 0.0), c(0.0, -s)];
        let in_x = overlap(&seen[0], &x_plus).max(overlap(&seen[0], &x_minus));
        let in_y = overlap(&seen[1], &y_plus).max(overlap(&seen[1], &y_minus));
        assert!((in_x - 1.0).abs() < 1e-12);
        assert!((in_y - 1.0).abs() < 1e-12);
        assert!((seen[2][0] - c(1.0, 0.0)).norm() < 1e-12 && seen[2][1].norm() < 1e-12);
    }

    #[test]
    fn power_zero_and_reduction_is_opt_in() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = StateVector::random(2, &mut rng);
        let r = apply_power(2, 0, &v, CycleReduction::Off).unwrap();
        assert_eq!(r.state, v);
        let r = apply_power(2, 7, &v, CycleReduction::Off).unwrap();
        assert_eq!((r.applied, r.reduced), (7, false));
        let report = crate::verify::verify_cycle_exact(2).unwrap();
        let r = apply_power(2, 7, &v, CycleReduction::IfVerified(&report)).unwrap();
        assert_eq!((r.applied, r.reduced), (2, true));
        let wrong_m = crate::verify::verify_cycle_exact(1).unwrap();
        let r = apply_power(2, 7, &v, CycleReduction::IfVerified(&wrong_m)).unwrap();
        assert_eq!((r.applied, r.reduced), (7, false));
    }

    #[test]
    fn qubit_mismatch_and_unsupported_m() {
        let g = FastGenerator::new(2).unwrap();
        assert!(matches!(
            g.apply(&mut StateVector::basis(1, 0)),
            Err(FastError::QubitMismatch { state: 1, generator: 2 })
        ));
        assert!(FastGenerator::new(3).is_err());
        assert!(FastGenerator::new(32).is_err());
    }

    #[test]
    fn binary_layout_is_fixed() {
        let v = StateVector::new(vec![c(1.0, -0.5), c(0.25, 2.0)]).unwrap();
        let mut buf = Vec::new();
        v.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 2 * 16);
        assert_eq!(&buf[..8], b"MUBSTATE");
        assert_eq!(&buf[8..16], &1u64.to_le_bytes());
        assert_eq!(&buf[16..24], &1.0f64.to_le_bytes());
        assert_eq!(&buf[24..32], &(-0.5f64).to_le_bytes());
        assert_eq!(StateVector::read_from(&buf[..]).unwrap(), v);
        assert!(matches!(StateVector::read_from(&buf[..20]), Err(FastError::Io(_))));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(StateVector::read_from(&bad[..]), Err(FastError::BadMagic { .. })));
    }
}
