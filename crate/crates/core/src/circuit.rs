//! Gate netlists for `U_m` and the `mubcirc v1` text format.
//!
//! ```text
//! mubcirc v1
//! qubits 4
//! phase 1 3        # Phase_1(i^3) = Phase_1(-i)
//! cphase 1 2       # CPhase(-1) between qubits 1 and 2
//! h 1
//! gphase 2         # global phase e^{i pi 2/4} = i
//! ```
//!
//! Qubits are 1-based; qubit `k` is bit `j_k` of the basis label, i.e. bit
//! `k - 1` of the linear index. Gates are listed in time order, so the
//! evaluated matrix is `G_n ... G_2 G_1`.
//!
//! Canonical order: global phases commute with everything and go last,
//! sorted by exponent. The rest is split into maximal runs of diagonal gates
//! and runs of Hadamards; diagonal runs are sorted by `(qubit_a, qubit_b)`
//! (a `Phase` on `q` keys as `(q, q)`), Hadamard runs by qubit. Both kinds of
//! run consist of mutually commuting gates, so canonicalization never
//! changes the evaluated matrix.

use std::cmp::Ordering;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::fast::C64;
use crate::gf2::{self, BMatrix};
use crate::phase::{self, PhaseError, MAX_PHASE_QUBITS};
use crate::roots::{EighthRoot, Mod4Exponent};

/// Largest register evaluated densely.
pub const MAX_EVAL_QUBITS: usize = 10;
/// Largest register accepted by the parser.
pub const MAX_CIRCUIT_QUBITS: usize = 1024;

pub const HEADER: &str = "mubcirc v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    /// `|1><1|` on `qubit` picks up `i^t4`.
    Phase { qubit: usize, t4: Mod4Exponent },
    /// `|11><11|` on qubits `a < b` picks up `-1`.
    CPhase { a: usize, b: usize },
    /// Normalized Hadamard.
    Hadamard { qubit: usize },
    /// Scalar `e^{i pi t8 / 4}`.
    GlobalPhase { t8: EighthRoot },
}

impl Gate {
    pub fn is_diagonal(&self) -> bool {
        !matches!(self, Gate::Hadamard { .. })
    }

    fn diagonal_key(&self) -> (usize, usize, u8) {
        match *self {
            Gate::Phase { qubit, t4 } => (qubit, qubit, t4.exponent()),
            Gate::CPhase { a, b } => (a, b, 0),
            Gate::Hadamard { qubit } => (qubit, qubit, 0),
            Gate::GlobalPhase { t8 } => (0, 0, t8.exponent()),
        }
    }

    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Phase { qubit, .. } | Gate::Hadamard { qubit } => vec![qubit],
            Gate::CPhase { a, b } => vec![a, b],
            Gate::GlobalPhase { .. } => vec![],
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("line {line}, column {column}: {reason}")]
    Syntax { line: usize, column: usize, reason: String },
    #[error("line {line}: qubit {qubit} out of range 1..={m}")]
    QubitOutOfRange { line: usize, qubit: usize, m: usize },
    #[error("line {line}: duplicate `{what}` header")]
    DuplicateHeader { line: usize, what: &'static str },
    #[error("line {line}: missing `{what}` header")]
    MissingHeader { line: usize, what: &'static str },
    #[error("gate {gate:?} is invalid for a {m}-qubit register")]
    InvalidGate { gate: Gate, m: usize },
    #[error("m={m} exceeds the dense evaluation cap of {MAX_EVAL_QUBITS} qubits")]
    TooLarge { m: usize },
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

/// Ordered netlist on `m` qubits, always in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateList {
    m: usize,
    gates: Vec<Gate>,
}

impl GateList {
    /// Validate labels and canonicalize. `CPhase` endpoints are
    /// interchangeable and get stored as `a < b`.
    pub fn new(m: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut fixed = Vec::with_capacity(gates.len());
        for gate in gates {
            let gate = match gate {
                Gate::CPhase { a, b } if a > b => Gate::CPhase { a: b, b: a },
                g => g,
            };
            let in_range = gate.qubits().iter().all(|&q| (1..=m).contains(&q));
            let self_loop = matches!(gate, Gate::CPhase { a, b } if a == b);
            if m == 0 || !in_range || self_loop {
                return Err(CircuitError::InvalidGate { gate, m });
            }
            fixed.push(gate);
        }
        Ok(Self { m, gates: canonicalize(fixed) })
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn census(&self) -> CircuitCensus {
        let mut c = CircuitCensus::default();
        for g in &self.gates {
            match g {
                Gate::Phase { .. } => c.phase += 1,
                Gate::CPhase { .. } => c.cphase += 1,
                Gate::Hadamard { .. } => c.hadamard += 1,
                Gate::GlobalPhase { .. } => c.global_phase += 1,
            }
        }
        c
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CircuitCensus {
    pub phase: usize,
    pub cphase: usize,
    pub hadamard: usize,
    pub global_phase: usize,
}

fn canonicalize(gates: Vec<Gate>) -> Vec<Gate> {
    let (mut globals, rest): (Vec<Gate>, Vec<Gate>) =
        gates.into_iter().partition(|g| matches!(g, Gate::GlobalPhase { .. }));
    let mut out = Vec::with_capacity(rest.len() + globals.len());
    for run in rest.chunk_by(|x, y| x.is_diagonal() == y.is_diagonal()) {
        let mut run = run.to_vec();
        run.sort_by_key(Gate::diagonal_key);
        out.extend(run);
    }
    globals.sort_by(|x, y| match (x, y) {
        (Gate::GlobalPhase { t8: a }, Gate::GlobalPhase { t8: b }) => a.cmp(b),
        _ => Ordering::Equal,
    });
    out.extend(globals);
    out
}

/// Netlist realizing `U_m` for the phase system `b`: one `Phase(-i)` per
/// diagonal 1, one `CPhase(-1)` per strictly-upper 1, a Hadamard on every
/// qubit, and the global phase fixed by `-1 / tr V`.
pub fn compile(b: &BMatrix) -> Result<GateList, CircuitError> {
    let m = b.size();
    let trace = if m <= MAX_PHASE_QUBITS {
        phase::trace_from_b(b)?
    } else if gf2::build(m).as_ref() == Ok(b) {
        phase::generator_trace(m)?
    } else {
        return Err(PhaseError::TooLarge { m, cap: MAX_PHASE_QUBITS, what: "diagonal summation" }.into());
    };
    let (scale, t8) = phase::normalization(m, &trace)?;
    debug_assert_eq!(scale, m as u64);
    let mut gates = Vec::new();
    for k in 0..m {
        if b.get(k, k) {
            gates.push(Gate::Phase { qubit: k + 1, t4: Mod4Exponent::MINUS_I });
        }
        for l in k + 1..m {
            if b.get(k, l) {
                gates.push(Gate::CPhase { a: k + 1, b: l + 1 });
            }
        }
    }
    gates.extend((1..=m).map(|qubit| Gate::Hadamard { qubit }));
    gates.push(Gate::GlobalPhase { t8 });
    GateList::new(m, gates)
}

/// Canonical `mubcirc v1` text.
pub fn emit(g: &GateList) -> String {
    let mut s = format!("{HEADER}\nqubits {}\n", g.m);
    for gate in &g.gates {
        let _ = match *gate {
            Gate::Phase { qubit, t4 } => writeln!(s, "phase {qubit} {}", t4.exponent()),
            Gate::CPhase { a, b } => writeln!(s, "cphase {a} {b}"),
            Gate::Hadamard { qubit } => writeln!(s, "h {qubit}"),
            Gate::GlobalPhase { t8 } => writeln!(s, "gphase {}", t8.exponent()),
        };
    }
    s
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut toks = Vec::new();
    let mut start = None;
    for (i, ch) in code.char_indices().chain(std::iter::once((code.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                toks.push(Token { text: &code[s..i], column: code[..s].chars().count() + 1 });
                start = None;
            }
            _ => {}
        }
    }
    toks
}

/// Parse `mubcirc v1` text into a canonical [`GateList`].
pub fn parse(text: &str) -> Result<GateList, CircuitError> {
    let mut m: Option<usize> = None;
    let mut seen_magic = false;
    let mut gates = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let toks = tokenize(raw);
        let Some(head) = toks.first() else { continue };
        let syntax = |column: usize, reason: String| CircuitError::Syntax { line, column, reason };
        let arity = |n: usize| -> Result<(), CircuitError> {
            match toks.len().cmp(&(n + 1)) {
                Ordering::Equal => Ok(()),
                Ordering::Greater => Err(syntax(toks[n + 1].column, format!("unexpected token `{}`", toks[n + 1].text))),
                Ordering::Less => {
                    let col = toks.last().map(|t| t.column + t.text.len()).unwrap_or(1);
                    Err(syntax(col, format!("`{}` expects {n} argument(s)", head.text)))
                }
            }
        };
        let int = |t: &Token<'_>| -> Result<usize, CircuitError> {
            if !t.text.bytes().all(|c| c.is_ascii_digit()) {
                return Err(syntax(t.column, format!("expected a non-negative integer, found `{}`", t.text)));
            }
            t.text.parse().map_err(|_| syntax(t.column, format!("integer `{}` out of range", t.text)))
        };

        if !seen_magic {
            if head.text != "mubcirc" {
                return Err(CircuitError::MissingHeader { line, what: HEADER });
            }
            arity(1)?;
            if toks[1].text != "v1" {
                return Err(syntax(toks[1].column, format!("unsupported version `{}`", toks[1].text)));
            }
            seen_magic = true;
            continue;
        }
        if head.text == "mubcirc" {
            return Err(CircuitError::DuplicateHeader { line, what: "mubcirc" });
        }
        let Some(qubits) = m else {
            if head.text != "qubits" {
                return Err(CircuitError::MissingHeader { line, what: "qubits" });
            }
            arity(1)?;
            let n = int(&toks[1])?;
            if n == 0 || n > MAX_CIRCUIT_QUBITS {
                return Err(syntax(toks[1].column, format!("qubit count must be in 1..={MAX_CIRCUIT_QUBITS}")));
            }
            m = Some(n);
            continue;
        };
        if head.text == "qubits" {
            return Err(CircuitError::DuplicateHeader { line, what: "qubits" });
        }
        let qubit = |t: &Token<'_>| -> Result<usize, CircuitError> {
            let q = int(t)?;
            if q == 0 || q > qubits {
                return Err(CircuitError::QubitOutOfRange { line, qubit: q, m: qubits });
            }
            Ok(q)
        };
        let gate = match head.text {
            "phase" => {
                arity(2)?;
                let q = qubit(&toks[1])?;
                let t = int(&toks[2])?;
                if t >= 4 {
                    return Err(syntax(toks[2].column, "phase exponent must be in 0..=3".into()));
                }
                Gate::Phase { qubit: q, t4: Mod4Exponent::new(t as i64) }
            }
            "cphase" => {
                arity(2)?;
                let a = qubit(&toks[1])?;
                let b = qubit(&toks[2])?;
                if a == b {
                    return Err(syntax(toks[2].column, "cphase needs two distinct qubits".into()));
                }
                Gate::CPhase { a: a.min(b), b: a.max(b) }
            }
            "h" => {
                arity(1)?;
                Gate::Hadamard { qubit: qubit(&toks[1])? }
            }
            "gphase" => {
                arity(1)?;
                let t = int(&toks[1])?;
                if t >= 8 {
                    return Err(syntax(toks[1].column, "global phase exponent must be in 0..=7".into()));
                }
                Gate::GlobalPhase { t8: EighthRoot::new(t as i64) }
            }
            other => return Err(syntax(head.column, format!("unknown gate `{other}`"))),
        };
        gates.push(gate);
    }
    if !seen_magic {
        return Err(CircuitError::MissingHeader { line: last_line.max(1), what: HEADER });
    }
    let Some(m) = m else {
        return Err(CircuitError::MissingHeader { line: last_line.max(1), what: "qubits" });
    };
    GateList::new(m, gates)
}

/// Dense matrix of the netlist, gates applied in list order.
pub fn evaluate(g: &GateList) -> Result<DMatrix<C64>, CircuitError> {
    evaluate_gates(g.m, &g.gates)
}

/// Dense matrix of an arbitrary gate sequence, without canonicalizing it.
pub fn evaluate_gates(m: usize, gates: &[Gate]) -> Result<DMatrix<C64>, CircuitError> {
    if m > MAX_EVAL_QUBITS {
        return Err(CircuitError::TooLarge { m });
    }
    if let Some(&gate) = gates.iter().find(|g| g.qubits().iter().any(|&q| q == 0 || q > m)) {
        return Err(CircuitError::InvalidGate { gate, m });
    }
    let d = 1usize << m;
    let mut mat = DMatrix::<C64>::identity(d, d);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for gate in gates {
        match *gate {
            Gate::Phase { qubit, t4 } => {
                let z = t4.to_complex();
                let bit = 1 << (qubit - 1);
                for r in (0..d).filter(|r| r & bit != 0) {
                    mat.row_mut(r).iter_mut().for_each(|x| *x *= z);
                }
            }
            Gate::CPhase { a, b } => {
                let mask = (1 << (a - 1)) | (1 << (b - 1));
                for r in (0..d).filter(|r| r & mask == mask) {
                    mat.row_mut(r).iter_mut().for_each(|x| *x = -*x);
                }
            }
            Gate::Hadamard { qubit } => {
                let bit = 1 << (qubit - 1);
                for r in (0..d).filter(|r| r & bit == 0) {
                    for c in 0..d {
                        let (x, y) = (mat[(r, c)], mat[(r | bit, c)]);
                        mat[(r, c)] = (x + y) * s;
                        mat[(r | bit, c)] = (x - y) * s;
                    }
                }
            }
            Gate::GlobalPhase { t8 } => {
                let z = t8.to_complex();
                mat.iter_mut().for_each(|x| *x *= z);
            }
        }
    }
    Ok(mat)
}

/// `max |a - b|`, or the same after aligning `a` to `b` by the best global phase.
pub fn max_deviation(a: &DMatrix<C64>, b: &DMatrix<C64>, up_to_global_phase: bool) -> f64 {
    let align = if up_to_global_phase {
        let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
        if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            C64::new(1.0, 0.0)
        }
    } else {
        C64::new(1.0, 0.0)
    };
    a.iter().zip(b.iter()).map(|(x, y)| (x * align - y).norm()).fold(0.0, f64::max)
}

/// Result of comparing a netlist with the exact generator.
#[derive(Clone, Debug, serde::Serialize)]
pub struct EquivalenceReport {
    pub m: usize,
    pub max_deviation: f64,
    pub max_deviation_up_to_phase: f64,
    pub tolerance: f64,
    pub up_to_global_phase: bool,
    pub passed: bool,
}

/// Evaluate `g` and compare it with the exact `U_m` for its register size.
pub fn check_against_generator(g: &GateList, tol: f64, up_to_global_phase: bool) -> Result<EquivalenceReport, CircuitError> {
    let m = g.m;
    if m > 8 {
        return Err(CircuitError::TooLarge { m });
    }
    let exact = phase::u_matrix(m)?.to_complex();
    let got = evaluate(g)?;
    let max_deviation_up_to_phase = self::max_deviation(&got, &exact, true);
    let max_deviation = self::max_deviation(&got, &exact, false);
    let used = if up_to_global_phase { max_deviation_up_to_phase } else { max_deviation };
    Ok(EquivalenceReport { m, max_deviation, max_deviation_up_to_phase, tolerance: tol, up_to_global_phase, passed: used <= tol })
}
