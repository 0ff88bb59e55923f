//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.
//!
//! Runtime limits are part of each criterion and are checked against wall
//! time measured here.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qubit_mubs::circuit::{self, Gate};
use qubit_mubs::exact::GaussianInt;
use qubit_mubs::fast::{self, StateVector, C64};
use qubit_mubs::gf2::{self, DOUBLING_SIZES, TRIPLING_SIZES};
use qubit_mubs::phase::{self, BitIndex};
use qubit_mubs::roots::{EighthRoot, Mod4Exponent};
use qubit_mubs::tomography::{self, DensityMatrix};
use qubit_mubs::verify::{self, CycleReport, SampleOptions, Verdict, UNVERIFIED_STATUS};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

struct Runner {
    failures: Vec<u32>,
}

impl Runner {
    fn run(&mut self, id: u32, title: &str, limit: Duration, f: impl FnOnce() -> Check) {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; exceeded time limit")),
            Err(e) => (false, e),
        };
        println!(
            "{} [{id:2}] {title} ({:.2} s, limit {} s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if !ok {
            self.failures.push(id);
        }
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn exact_cycle(m: usize) -> Check {
    exact_cycle_report(m).map(|(d, _)| d)
}

fn exact_cycle_report(m: usize) -> Result<(String, CycleReport), String> {
    let r = verify::verify_cycle_exact(m).map_err(err)?;
    ensure(r.verdict == Verdict::Pass, format!("verdict {:?}", r.verdict))?;
    ensure(r.identity_reached, "U^(2^m+1) != I")?;
    ensure(r.power_pass.len() == 1 << m && r.power_pass.iter().all(|&p| p), "some power has a biased entry")?;
    let d = format!("{} bases, {} powers exact, U^{} = I", r.bases, r.power_pass.len(), r.bases);
    Ok((d, r))
}

fn c1() -> Check {
    let detail = exact_cycle(1)?;
    let u = phase::u_matrix(1).map_err(err)?;
    let u3 = u.matmul(&u).and_then(|x| x.matmul(&u)).map_err(err)?;
    ensure(u3.is_identity(), "U_1^3 != I")?;
    // U^b maps the z basis to the eigenbasis of one Pauli per power
    let paulis: [DMatrix<C64>; 3] = [
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0].map(|x| C64::new(x, 0.0))),
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(|x| C64::new(x, 0.0))),
        DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)]),
    ];
    let mut found = Vec::new();
    for b in 0..3 {
        let e = tomography::basis_columns(1, b).map_err(err)?;
        let k = paulis
            .iter()
            .position(|p| {
                let d = e.adjoint() * p * &e;
                d[(0, 1)].norm() < 1e-12 && (d[(0, 0)].norm() - 1.0).abs() < 1e-12
            })
            .ok_or(format!("basis {b} diagonalizes no Pauli"))?;
        found.push(["z", "x", "y"][k]);
    }
    ensure(found == ["z", "x", "y"], format!("basis sequence {found:?}"))?;
    Ok(format!("{detail}; bases U^0, U^1, U^2 are the {} eigenbases", found.join("-, ")))
}

fn c2() -> Check {
    let detail = exact_cycle(2)?;
    let u = phase::u_matrix(2).map_err(err)?;
    let mut w = u.clone();
    for k in 1..=4 {
        for r in 0..4 {
            for c in 0..4 {
                let z = w.value_at(r, c);
                // |z|^2 = |g|^2 / 2^s must be exactly 1/4
                let n = z.value.norm_sqr();
                ensure(n << 2u32 == num_bigint::BigInt::from(1) << z.scale_exp as u32, format!("|U^{k}_{r}{c}|^2 != 1/4"))?;
            }
        }
        w = w.matmul(&u).map_err(err)?;
    }
    Ok(format!("{detail}; all 64 entries of U^1..U^4 have |u|^2 = 1/4 exactly"))
}

fn c5_sampled() -> Check {
    let opts = SampleOptions { tol: 1e-8, ..SampleOptions::default() };
    let r = verify::verify_cycle_sampled(12, opts).map_err(err)?;
    ensure(r.passed(), format!("verdict {:?}, max dev {:?}", r.verdict, r.max_modulus_deviation))?;
    ensure(r.entries_checked >= 100_000, format!("only {} pairs", r.entries_checked))?;
    Ok(format!(
        "{} (power, entry) pairs on columns {:?} (seed {}), max dev {:.1e}, cycle closes",
        r.entries_checked,
        r.sampled_columns,
        opts.seed,
        r.max_modulus_deviation.unwrap_or(f64::NAN)
    ))
}

fn c5_construction() -> Check {
    let r = verify::verify_auto(24).map_err(err)?;
    ensure(r.verdict == Verdict::Unverified && r.status == UNVERIFIED_STATUS, format!("status {}", r.status))?;
    Ok(format!("reported \"{}\"", r.status))
}

fn c6() -> Check {
    let t1 = phase::trace_v(1).map_err(err)?;
    ensure(t1 == GaussianInt::new(1, 1), format!("tr V_1 = {t1}"))?;
    let mut parts = vec![format!("tr V_1 = {t1}")];
    for m in [2, 4, 8, 16] {
        let t = phase::trace_v(m).map_err(err)?;
        let want = GaussianInt::new(0, 1i64 << (m / 2));
        ensure(t == want, format!("tr V_{m} = {t}, want {want}"))?;
        parts.push(format!("tr V_{m} = {t}"));
    }
    Ok(parts.join(", "))
}

fn closed_form_phase(m: usize, j: &BitIndex) -> Result<Mod4Exponent, String> {
    if m == 1 {
        return Ok(if j.bit(0) { Mod4Exponent::MINUS_I } else { Mod4Exponent::ONE });
    }
    let h = m / 2;
    phase::v_entry(h, &j.slice(h, h), &j.slice(0, h)).map_err(err)
}

fn c7() -> Check {
    for m in [1usize, 2, 4, 8] {
        let b = gf2::build(m).map_err(err)?;
        let pv = phase::phase_vector(&b).map_err(err)?;
        let chopped = if m > 1 { Some(phase::chop(&phase::v_matrix(m / 2).map_err(err)?)) } else { None };
        for n in 0..1u64 << m {
            let j = BitIndex::from_linear(m, n);
            let direct = phase::phase_from_b(&b, &j).map_err(err)?;
            let rec = phase::chop_recursion_phase(m, &j).map_err(err)?;
            let closed = closed_form_phase(m, &j)?;
            let via_chop = chopped.as_ref().map(|c| c.get(n as usize)).unwrap_or(direct);
            ensure(
                [pv.get(n as usize), rec, closed, via_chop].iter().all(|&p| p == direct),
                format!("m={m}, j={n}: disagreement"),
            )?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for m in [16usize, 32, 64, 128, 256] {
        let b = gf2::build(m).map_err(err)?;
        for _ in 0..10_000 {
            let j = BitIndex::random(m, &mut rng);
            let direct = phase::phase_from_b(&b, &j).map_err(err)?;
            let rec = phase::chop_recursion_phase(m, &j).map_err(err)?;
            let closed = closed_form_phase(m, &j)?;
            ensure(direct == rec && rec == closed, format!("m={m}: disagreement at {:?}", j.words()))?;
        }
    }
    Ok("exhaustive for m in {1,2,4,8}; 10^4 random indices for m in {16,32,64,128,256}".into())
}

fn c8() -> Check {
    let mut total = 0u64;
    for m in [2usize, 4, 8, 16] {
        let pv = phase::phase_vector(&gf2::build(m).map_err(err)?).map_err(err)?;
        for (n, p) in pv.entries().iter().enumerate() {
            ensure(p.is_real() == (n & 1 == 0), format!("m={m}, j={n}: p_j = {p}"))?;
        }
        total += pv.entries().len() as u64;
    }
    Ok(format!("{total} phases checked for m in {{2,4,8,16}}"))
}

fn c9() -> Check {
    for m in [1, 2, 4] {
        ensure(verify::trace_power_check(m).map_err(err)?, format!("tr U^k != -1 for some k, m={m}"))?;
    }
    Ok("tr U^k = -1 exactly for k = 1..2^m, m in {1,2,4}".into())
}

fn c9_extended(r: Option<&CycleReport>) -> Check {
    let r = r.ok_or("m=8 exact run did not complete")?;
    ensure(r.trace_power_pass == Some(true), "tr U^k != -1 for some k")?;
    Ok("tr U^k = -1 exactly for k = 1..256 (from the m=8 exact run)".into())
}

fn c10() -> Check {
    for m in [1, 2, 4, 8] {
        let g = circuit::compile(&gf2::build(m).map_err(err)?).map_err(err)?;
        let rep = circuit::check_against_generator(&g, 1e-12, false).map_err(err)?;
        ensure(rep.passed, format!("m={m}: max deviation {:e}", rep.max_deviation))?;
    }
    let g4 = circuit::compile(&gf2::build(4).map_err(err)?).map_err(err)?;
    let mut got: Vec<Gate> = g4.gates().iter().copied().filter(|g| !matches!(g, Gate::GlobalPhase { .. })).collect();
    let mut want = vec![
        Gate::Phase { qubit: 1, t4: Mod4Exponent::MINUS_I },
        Gate::CPhase { a: 1, b: 2 },
        Gate::CPhase { a: 1, b: 3 },
        Gate::CPhase { a: 2, b: 4 },
    ];
    want.extend((1..=4).map(|qubit| Gate::Hadamard { qubit }));
    let key = |g: &Gate| format!("{g:?}");
    got.sort_by_key(key);
    want.sort_by_key(key);
    ensure(got == want, format!("m=4 gate multiset {got:?}"))?;
    ensure(g4.census().global_phase == 1, "m=4 has no global phase gate")?;
    for m in DOUBLING_SIZES {
        let c = circuit::compile(&gf2::build(m).map_err(err)?).map_err(err)?.census();
        ensure(c.phase == 1 && c.cphase == m - 1, format!("m={m}: census {c:?}"))?;
    }
    Ok("entrywise within 1e-12 for m in {1,2,4,8}; m=4 multiset matches; census 1 + (m-1) for m up to 256".into())
}

fn random_circuit(rng: &mut ChaCha8Rng) -> circuit::GateList {
    use rand::Rng;
    let m = rng.random_range(1..=12);
    let n = rng.random_range(0..40);
    let gates = (0..n)
        .map(|_| match rng.random_range(0..4) {
            0 => Gate::Phase { qubit: rng.random_range(1..=m), t4: Mod4Exponent::new(rng.random_range(0..4)) },
            1 if m > 1 => {
                let a = rng.random_range(1..=m);
                let b = (a + rng.random_range(1..m) - 1) % m + 1;
                Gate::CPhase { a, b }
            }
            2 => Gate::GlobalPhase { t8: EighthRoot::new(rng.random_range(0..8)) },
            _ => Gate::Hadamard { qubit: rng.random_range(1..=m) },
        })
        .collect();
    circuit::GateList::new(m, gates).expect("valid by construction")
}

fn c11() -> Check {
    for m in DOUBLING_SIZES.iter().chain(&TRIPLING_SIZES) {
        let g = circuit::compile(&gf2::build(*m).map_err(err)?).map_err(err)?;
        ensure(circuit::parse(&circuit::emit(&g)).map_err(err)? == g, format!("m={m}: round trip differs"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..1000 {
        let g = random_circuit(&mut rng);
        ensure(circuit::parse(&circuit::emit(&g)).map_err(err)? == g, format!("random circuit {i}: round trip differs"))?;
    }
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/malformed");
    let mut files: Vec<_> = std::fs::read_dir(dir).map_err(err)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>().map_err(err)?;
    files.sort();
    ensure(files.len() == 20, format!("{} malformed fixtures, expected 20", files.len()))?;
    for f in &files {
        let text = std::fs::read_to_string(f).map_err(err)?;
        let want: usize = text
            .lines()
            .find_map(|l| l.strip_prefix("# expect-line: "))
            .and_then(|v| v.trim().parse().ok())
            .ok_or(format!("{}: no expect-line marker", f.display()))?;
        let got = match circuit::parse(&text) {
            Ok(_) => return Err(format!("{} was accepted", f.display())),
            Err(e) => error_line(&e),
        };
        ensure(got == Some(want), format!("{}: error at line {got:?}, expected {want}", f.display()))?;
    }
    Ok("all 12 compiled sizes and 1000 random circuits round-trip; 20 malformed files rejected at the expected line".into())
}

fn error_line(e: &circuit::CircuitError) -> Option<usize> {
    use circuit::CircuitError::*;
    match *e {
        Syntax { line, .. } | QubitOutOfRange { line, .. } | DuplicateHeader { line, .. } | MissingHeader { line, .. } => Some(line),
        _ => None,
    }
}

fn c12() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for m in [1usize, 2, 4, 6, 8] {
        let u = phase::u_matrix(m).map_err(err)?.to_complex();
        for _ in 0..100 {
            let v = StateVector::random(m, &mut rng);
            let fast = fast::apply_generator(m, &v).map_err(err)?;
            let dense = &u * nalgebra::DVector::from_column_slice(v.amps());
            let dev = fast.amps().iter().zip(dense.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            worst = worst.max(dev);
        }
    }
    ensure(worst <= 1e-12, format!("max deviation {worst:e}"))?;
    let mut norm_dev: f64 = 0.0;
    for m in [1usize, 2, 4, 6, 8, 12, 16] {
        for _ in 0..10 {
            let v = StateVector::random(m, &mut rng);
            let w = fast::apply_generator(m, &v).map_err(err)?;
            norm_dev = norm_dev.max((w.norm() - v.norm()).abs());
        }
    }
    ensure(norm_dev <= 1e-12, format!("norm deviation {norm_dev:e}"))?;
    Ok(format!("dense agreement {worst:.1e} (m up to 8, 100 vectors each); norm deviation {norm_dev:.1e} (m up to 16)"))
}

fn c13() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst: f64 = 0.0;
    for m in [1usize, 2] {
        let bases = tomography::mub_family(m).map_err(err)?;
        for i in 0..100 {
            let rho = if i % 2 == 0 { DensityMatrix::random_pure(m, &mut rng) } else { DensityMatrix::random_mixed(m, &mut rng) };
            let run = tomography::simulate(&rho, &bases, None, 0, false).map_err(err)?;
            worst = worst.max(run.trace_distance);
        }
    }
    ensure(worst < 1e-10, format!("exact-probability trace distance {worst:e}"))?;
    let sweep = tomography::sweep(2, &[1_000, 10_000, 100_000], 50).map_err(err)?;
    let s = sweep.log_log_slope;
    ensure((s + 0.5).abs() <= 0.15, format!("slope {s:.3}"))?;
    Ok(format!(
        "exact reconstruction max trace distance {worst:.1e} over 200 states; medians {:?}, slope {s:.3}",
        sweep.median_trace_distance.iter().map(|t| format!("{t:.2e}")).collect::<Vec<_>>()
    ))
}

fn main() -> ExitCode {
    let mut r = Runner { failures: Vec::new() };
    r.run(1, "m=1 cycle of 3 MUBs", secs(1), c1);
    r.run(2, "m=2 cycle of 5 MUBs", secs(1), c2);
    r.run(3, "m=4 cycle of 17 MUBs", secs(5), || exact_cycle(4));
    let mut r8 = None;
    r.run(4, "m=8 cycle of 257 MUBs, addition-only products", secs(600), || {
        let (d, rep) = exact_cycle_report(8)?;
        r8 = Some(rep);
        Ok(d)
    });
    r.run(5, "m=6 tripled cycle of 65 bases, exact", secs(60), || exact_cycle(6));
    r.run(5, "m=12 sampled float check, tol 1e-8", secs(600), c5_sampled);
    r.run(5, "m=24 construction only", secs(60), c5_construction);
    r.run(6, "trace identities", secs(10), c6);
    r.run(7, "phase construction agreement", secs(30), c7);
    r.run(8, "real/imaginary pattern of the phases", secs(30), c8);
    r.run(9, "tr U^k = -1", secs(10), c9);
    r.run(9, "tr U^k = -1, extended run m=8", secs(600), || c9_extended(r8.as_ref()));
    r.run(10, "compiler correctness", secs(60), c10);
    r.run(11, "netlist parser round trip", secs(60), c11);
    r.run(12, "fast Walsh-Hadamard path", secs(60), c12);
    r.run(13, "tomography", secs(120), c13);
    if r.failures.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {:?}", r.failures);
        ExitCode::FAILURE
    }
}
