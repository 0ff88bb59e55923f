//! Symmetric GF(2) matrices describing the phase system of the generator.
//!
//! A [`BMatrix`] is read as the adjacency matrix of a graph on the qubits,
//! loops allowed. Row `k` (0-based here, `k + 1` in circuit labels) is stored
//! bit-packed, with bit `l` of the row set iff `b[k][l] = 1`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Qubit counts reachable by doubling from the single-qubit seed.
pub const DOUBLING_SIZES: [usize; 9] = [1, 2, 4, 8, 16, 32, 64, 128, 256];

/// Qubit counts obtained by tripling the doubling matrices for 2, 4 and 8 qubits.
pub const TRIPLING_SIZES: [usize; 3] = [6, 12, 24];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error(
        "unsupported register size m={0}; supported sizes are 1, 2, 4, 8, 16, 32, 64, 128, 256 \
         (doubling) and 6, 12, 24 (tripling)"
    )]
    UnsupportedSize(usize),
    #[error("tripling is only defined for the doubling matrices with m in {{2, 4, 8}}, got m={0}")]
    UnsupportedTripleSeed(usize),
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("malformed bmatrix dump at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// How a supported register size is constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    Doubling,
    Tripling,
}

/// Classify `m` against the closed whitelist of supported sizes.
pub fn construction_for(m: usize) -> Result<Construction, Gf2Error> {
    if DOUBLING_SIZES.contains(&m) {
        Ok(Construction::Doubling)
    } else if TRIPLING_SIZES.contains(&m) {
        Ok(Construction::Tripling)
    } else {
        Err(Gf2Error::UnsupportedSize(m))
    }
}

/// Symmetric `m x m` matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BMatrix {
    m: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BMatrix {
    /// The all-zero `m x m` matrix.
    pub fn zeros(m: usize) -> Self {
        let words = m.div_ceil(64).max(1);
        Self { m, words, bits: vec![0; m * words] }
    }

    /// Build from explicit rows, checking shape and symmetry.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self, Gf2Error> {
        let m = rows.len();
        let mut b = Self::zeros(m);
        for (k, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Gf2Error::Parse {
                    line: k + 1,
                    reason: format!("row has {} entries, expected {m}", row.len()),
                });
            }
            for (l, &v) in row.iter().enumerate() {
                b.set(k, l, v & 1 == 1);
            }
        }
        b.check_symmetric()?;
        Ok(b)
    }

    pub fn size(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize) -> bool {
        (self.bits[k * self.words + l / 64] >> (l % 64)) & 1 == 1
    }

    #[inline]
    fn set(&mut self, k: usize, l: usize, v: bool) {
        let w = &mut self.bits[k * self.words + l / 64];
        if v {
            *w |= 1 << (l % 64);
        } else {
            *w &= !(1 << (l % 64));
        }
    }

    /// Packed words of row `k`; bit `l` is the entry in column `l`.
    pub fn row_words(&self, k: usize) -> &[u64] {
        &self.bits[k * self.words..(k + 1) * self.words]
    }

    /// Row `k` as a single word. Only meaningful for `m <= 64`.
    pub(crate) fn row_mask(&self, k: usize) -> u64 {
        self.bits[k * self.words]
    }

    pub fn check_symmetric(&self) -> Result<(), Gf2Error> {
        for k in 0..self.m {
            for l in k + 1..self.m {
                if self.get(k, l) != self.get(l, k) {
                    return Err(Gf2Error::NotSymmetric(k, l));
                }
            }
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.check_symmetric().is_ok()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Entries as a dense row-major `Vec<Vec<u8>>`.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.m)
            .map(|k| (0..self.m).map(|l| self.get(k, l) as u8).collect())
            .collect()
    }

    fn copy_block(&mut self, src: &BMatrix, row0: usize, col0: usize) {
        for k in 0..src.m {
            for l in 0..src.m {
                if src.get(k, l) {
                    self.set(row0 + k, col0 + l, true);
                }
            }
        }
    }
}

impl fmt::Debug for BMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BMatrix(m={}, {:?})", self.m, self.to_rows())
    }
}

/// `B_1 = (1)`.
pub fn seed_b1() -> BMatrix {
    let mut b = BMatrix::zeros(1);
    b.set(0, 0, true);
    b
}

/// `B -> [[B, I], [I, 0]]`.
pub fn double(b: &BMatrix) -> BMatrix {
    let m = b.m;
    let mut out = BMatrix::zeros(2 * m);
    out.copy_block(b, 0, 0);
    for k in 0..m {
        out.set(k, m + k, true);
        out.set(m + k, k, true);
    }
    out
}

/// `B -> [[B, B, B], [B, B, 0], [B, 0, 0]]`.
///
/// Works for any input; [`build`] only routes the seeds for 2, 4 and 8 qubits
/// through it. Use [`triple_supported`] for the checked variant.
pub fn triple(b: &BMatrix) -> BMatrix {
    let m = b.m;
    let mut out = BMatrix::zeros(3 * m);
    for (r, c) in [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)] {
        out.copy_block(b, r * m, c * m);
    }
    out
}

/// [`triple`] restricted to the doubling matrices for 2, 4 and 8 qubits.
pub fn triple_supported(b: &BMatrix) -> Result<BMatrix, Gf2Error> {
    match b.m {
        2 | 4 | 8 if *b == build(b.m)? => Ok(triple(b)),
        m => Err(Gf2Error::UnsupportedTripleSeed(m)),
    }
}

/// The reduced stabilizer matrix for an `m`-qubit register.
pub fn build(m: usize) -> Result<BMatrix, Gf2Error> {
    match construction_for(m)? {
        Construction::Doubling => {
            let mut b = seed_b1();
            while b.m < m {
                b = double(&b);
            }
            Ok(b)
        }
        Construction::Tripling => Ok(triple(&build(m / 3)?)),
    }
}

/// Gate counts implied by `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GateCensus {
    pub n_phase: usize,
    pub n_cphase: usize,
}

pub fn gate_census(b: &BMatrix) -> GateCensus {
    let mut n_phase = 0;
    let mut n_cphase = 0;
    for k in 0..b.m {
        if b.get(k, k) {
            n_phase += 1;
        }
        for l in k + 1..b.m {
            if b.get(k, l) {
                n_cphase += 1;
            }
        }
    }
    GateCensus { n_phase, n_cphase }
}

/// Text dump: `bmatrix m=<m>` followed by one line of `0`/`1` per row.
pub fn dump(b: &BMatrix) -> String {
    let mut s = format!("bmatrix m={}\n", b.m);
    for k in 0..b.m {
        s.extend((0..b.m).map(|l| if b.get(k, l) { '1' } else { '0' }));
        s.push('\n');
    }
    s
}

impl fmt::Display for BMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&dump(self))
    }
}

impl FromStr for BMatrix {
    type Err = Gf2Error;

    fn from_str(text: &str) -> Result<Self, Gf2Error> {
        let err = |line: usize, reason: &str| Gf2Error::Parse { line, reason: reason.to_string() };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| err(1, "missing header"))?;
        let m: usize = header
            .strip_prefix("bmatrix m=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| err(1, "expected `bmatrix m=<m>`"))?;
        if m == 0 {
            return Err(err(1, "m must be positive"));
        }
        let mut b = BMatrix::zeros(m);
        for k in 0..m {
            let line = lines.next().ok_or_else(|| err(k + 2, "missing row"))?;
            if line.len() != m {
                return Err(err(k + 2, &format!("expected {m} characters, found {}", line.len())));
            }
            for (l, c) in line.bytes().enumerate() {
                match c {
                    b'0' => {}
                    b'1' => b.set(k, l, true),
                    _ => return Err(err(k + 2, "entries must be '0' or '1'")),
                }
            }
        }
        if let Some((i, _)) = lines.enumerate().find(|(_, l)| !l.is_empty()) {
            return Err(err(m + 2 + i, "trailing content after last row"));
        }
        b.check_symmetric()?;
        Ok(b)
    }
}
