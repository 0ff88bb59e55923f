//! The `mubs` command line: build, verify, compile, check-circuit, apply, tomo.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or input error,
//! 3 I/O error. JSON artifacts carry a `format` tag and echo the resolved
//! configuration under `config`; keys follow struct field order.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{self, CircuitError};
use crate::fast::{self, CycleReduction, FastError, StateVector};
use crate::gf2::{self, Gf2Error};
use crate::phase::{self, PhaseError, MAX_EXACT_QUBITS, MAX_PHASE_QUBITS};
use crate::tomography::{self, DensityMatrix, StateSpec, TomoError};
use crate::verify::{self, CycleReport, SampleOptions, Verdict, VerifyError};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Largest `m` whose exact generator is written by `build`.
pub const BUILD_EXACT_CAP: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "mubs", version, about = "Mutually unbiased bases for qubit registers from a single generator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the B matrix, phase vector and exact generator dumps.
    Build(BuildArgs),
    /// Check that the powers of U_m form a complete set of MUBs.
    Verify(VerifyArgs),
    /// Emit the gate netlist for U_m.
    Compile(CompileArgs),
    /// Evaluate a netlist and compare it with the exact U_m.
    CheckCircuit(CheckArgs),
    /// Apply U_m^k to a state vector.
    Apply(ApplyArgs),
    /// Simulate state tomography in the 2^m + 1 bases.
    Tomo(TomoArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Args, Debug, Serialize)]
pub struct BuildArgs {
    pub m: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("tier").args(["exact", "float", "sampled", "construction_only"])))]
pub struct VerifyArgs {
    pub m: usize,
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub float: bool,
    #[arg(long)]
    pub sampled: bool,
    #[arg(long)]
    pub construction_only: bool,
    /// Entrywise tolerance of the float tiers.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Column-sampling seed of the sampled tier.
    #[arg(long, default_value_t = verify::DEFAULT_SAMPLE_SEED)]
    pub seed: u64,
    /// Minimum (power, entry) pairs checked by the sampled tier.
    #[arg(long, default_value_t = verify::DEFAULT_SAMPLE_PAIRS)]
    pub pairs: u64,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Args, Debug, Serialize)]
pub struct CompileArgs {
    pub m: usize,
    /// Netlist path; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Ignore a global phase difference.
    #[arg(long)]
    pub up_to_global_phase: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("source").args(["input", "basis", "random"])))]
pub struct ApplyArgs {
    pub m: usize,
    /// Exponent k of U_m^k.
    #[arg(long, short = 'k', default_value_t = 1)]
    pub power: u64,
    /// Binary state file (`MUBSTATE`).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Start from basis state |n>.
    #[arg(long)]
    pub basis: Option<usize>,
    /// Start from a Haar-random state with this seed.
    #[arg(long)]
    pub random: Option<u64>,
    /// Reduce k modulo 2^m + 1 after an exact cycle verification (exact tier only).
    #[arg(long)]
    pub reduce_cycle: bool,
    /// Write the resulting state here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    MaximallyMixed,
    RandomPure,
    RandomMixed,
    File,
}

#[derive(Args, Debug, Serialize)]
pub struct TomoArgs {
    pub m: usize,
    /// Shots per basis.
    #[arg(short = 'N', long, default_value_t = 10_000)]
    pub shots: u64,
    /// Use exact Born probabilities instead of sampling.
    #[arg(long)]
    pub exact_probabilities: bool,
    /// Sampling seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = StateKind::RandomPure)]
    pub state: StateKind,
    /// Seed of the random state; defaults to --seed.
    #[arg(long)]
    pub state_seed: Option<u64>,
    /// Density matrix file (`MUBDENSE`) for --state file.
    #[arg(long, required_if_eq("state", "file"))]
    pub state_file: Option<PathBuf>,
    /// Project the estimate onto positive semidefinite, unit-trace matrices.
    #[arg(long)]
    pub project_psd: bool,
    /// Run the finite-sample sweep instead of a single experiment.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, value_delimiter = ',', default_values_t = [1_000u64, 10_000, 100_000])]
    pub sweep_shots: Vec<u64>,
    /// Number of seeds per sweep point.
    #[arg(long, default_value_t = 50)]
    pub seeds: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(s) | CliError::Io(s) => s,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl From<FastError> for CliError {
    fn from(e: FastError) -> Self {
        match e {
            FastError::Io(io) => CliError::Io(io.to_string()),
            other => usage(other),
        }
    }
}

impl From<TomoError> for CliError {
    fn from(e: TomoError) -> Self {
        match e {
            TomoError::Fast(f) => f.into(),
            other => usage(other),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Fast(f) => f.into(),
            other => usage(other),
        }
    }
}

macro_rules! usage_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                usage(e)
            }
        }
    )*};
}
usage_from!(Gf2Error, PhaseError, CircuitError);

#[derive(Serialize)]
struct Artifact<'a, C: Serialize, R: Serialize> {
    format: &'static str,
    command: &'static str,
    config: &'a C,
    result: R,
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("artifact serializes") + "\n"
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Build(a) => cmd_build(a, out, err),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Compile(a) => cmd_compile(a, out),
        Command::CheckCircuit(a) => cmd_check(a, out),
        Command::Apply(a) => cmd_apply(a, out),
        Command::Tomo(a) => cmd_tomo(a, out),
    };
    match result {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

#[derive(Serialize)]
struct BuildResult {
    files: Vec<PathBuf>,
    notice: Option<String>,
}

fn cmd_build(a: &BuildArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool, CliError> {
    let b = gf2::build(a.m)?;
    fs::create_dir_all(&a.out).map_err(|e| io_err(&a.out, e))?;
    let mut files = Vec::new();
    let b_path = a.out.join(format!("b_m{}.txt", a.m));
    write_file(&b_path, gf2::dump(&b).as_bytes())?;
    files.push(b_path);
    let mut skipped = Vec::new();
    if a.m <= MAX_PHASE_QUBITS {
        let p_path = a.out.join(format!("phases_m{}.txt", a.m));
        write_file(&p_path, phase::phase_vector(&b)?.dump().as_bytes())?;
        files.push(p_path);
    } else {
        skipped.push(format!("phase vector (cap {MAX_PHASE_QUBITS} qubits)"));
    }
    if a.m <= BUILD_EXACT_CAP.min(MAX_EXACT_QUBITS) {
        let u_path = a.out.join(format!("u_m{}.txt", a.m));
        write_file(&u_path, phase::u_matrix(a.m)?.dump().as_bytes())?;
        files.push(u_path);
    } else {
        skipped.push(format!("exact generator (cap {BUILD_EXACT_CAP} qubits)"));
    }
    let notice = (!skipped.is_empty()).then(|| format!("dense matrices not materializable at m={}: skipped {}", a.m, skipped.join(", ")));
    if let Some(n) = &notice {
        let _ = writeln!(err, "notice: {n}");
    }
    let doc = Artifact { format: "mubs-build v1", command: "build", config: a, result: BuildResult { files, notice } };
    out.write_all(to_json(&doc).as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(true)
}

#[derive(Serialize)]
struct VerifyConfig {
    m: usize,
    mode: &'static str,
    tol: Option<f64>,
    seed: Option<u64>,
    pairs: Option<u64>,
    out: Option<PathBuf>,
    format: OutputFormat,
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    gf2::construction_for(a.m)?;
    let mode = if a.exact {
        "exact"
    } else if a.float {
        "float"
    } else if a.sampled {
        "sampled"
    } else if a.construction_only {
        "construction_only"
    } else if verify::EXACT_TIER.contains(&a.m) {
        "exact"
    } else if verify::SAMPLED_TIER.contains(&a.m) {
        "sampled"
    } else {
        "construction_only"
    };
    let tol = match mode {
        "float" => Some(a.tol.unwrap_or(verify::DEFAULT_TOL)),
        "sampled" => Some(a.tol.unwrap_or(SampleOptions::default().tol)),
        _ => None,
    };
    let sampled = mode == "sampled";
    let config = VerifyConfig {
        m: a.m,
        mode,
        tol,
        seed: sampled.then_some(a.seed),
        pairs: sampled.then_some(a.pairs),
        out: a.out.clone(),
        format: a.format,
    };
    let report: CycleReport = match mode {
        "exact" => verify::verify_cycle_exact(a.m)?,
        "float" => verify::verify_generator_float(a.m, tol.expect("set"))?,
        "sampled" => verify::verify_cycle_sampled(a.m, SampleOptions { min_pairs: a.pairs, seed: a.seed, tol: tol.expect("set") })?,
        _ => verify::construction_report(a.m)?,
    };
    let doc = Artifact { format: "mubs-verify v1", command: "verify", config: &config, result: &report };
    let json = to_json(&doc);
    if let Some(p) = &a.out {
        write_file(p, json.as_bytes())?;
    }
    let text = match a.format {
        OutputFormat::Json => json,
        OutputFormat::Text => report.to_text(),
    };
    out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(report.verdict != Verdict::Fail)
}

fn cmd_compile(a: &CompileArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let g = circuit::compile(&gf2::build(a.m)?)?;
    let mut text = circuit::emit(&g);
    text.push_str(&format!("# config: {}\n", serde_json::to_string(&Artifact { format: "mubs-compile v1", command: "compile", config: a, result: () }).expect("serializes")));
    match &a.out {
        Some(p) => write_file(p, text.as_bytes())?,
        None => out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(true)
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let text = fs::read_to_string(&a.file).map_err(|e| io_err(&a.file, e))?;
    let g = circuit::parse(&text).map_err(|e| usage(format!("{}: {e}", a.file.display())))?;
    gf2::construction_for(g.qubits())?;
    let report = circuit::check_against_generator(&g, a.tol, a.up_to_global_phase)?;
    let doc = Artifact { format: "mubs-check v1", command: "check-circuit", config: a, result: &report };
    let json = to_json(&doc);
    if let Some(p) = &a.out {
        write_file(p, json.as_bytes())?;
    }
    let text = match a.format {
        OutputFormat::Json => json,
        OutputFormat::Text => format!(
            "m: {}\nstatus: {}\nmax_deviation: {:e}\nmax_deviation_up_to_phase: {:e}\ntolerance: {:e}\n",
            report.m,
            if report.passed { "pass" } else { "fail" },
            report.max_deviation,
            report.max_deviation_up_to_phase,
            report.tolerance
        ),
    };
    out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(report.passed)
}

#[derive(Serialize)]
struct ApplyResult {
    requested: u64,
    applied: u64,
    reduced: bool,
    reduction_note: String,
    norm_in: f64,
    norm_out: f64,
    amplitudes: Option<Vec<[f64; 2]>>,
}

fn cmd_apply(a: &ApplyArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    gf2::construction_for(a.m)?;
    let state = if let Some(p) = &a.input {
        let f = fs::File::open(p).map_err(|e| io_err(p, e))?;
        let s = StateVector::read_from(io::BufReader::new(f))?;
        if s.qubits() != a.m {
            return Err(usage(format!("state file has m={}, expected m={}", s.qubits(), a.m)));
        }
        s
    } else if let Some(seed) = a.random {
        StateVector::random(a.m, &mut ChaCha8Rng::seed_from_u64(seed))
    } else {
        let n = a.basis.unwrap_or(0);
        if a.m > MAX_PHASE_QUBITS || n >= 1usize << a.m {
            return Err(usage(format!("basis index {n} out of range for m={}", a.m)));
        }
        StateVector::basis(a.m, n)
    };
    let verified;
    let (reduction, reduction_note) = if a.reduce_cycle {
        if verify::EXACT_TIER.contains(&a.m) {
            verified = verify::verify_cycle_exact(a.m)?;
            let note = format!("exact cycle verification: {}", verified.status);
            (CycleReduction::IfVerified(&verified), note)
        } else {
            (CycleReduction::Off, format!("m={} has no exact cycle verification; k applied as given", a.m))
        }
    } else {
        (CycleReduction::Off, "reduction not requested".to_string())
    };
    let res = fast::apply_power(a.m, a.power, &state, reduction)?;
    if let Some(p) = &a.out {
        let f = fs::File::create(p).map_err(|e| io_err(p, e))?;
        res.state.write_to(io::BufWriter::new(f)).map_err(|e| io_err(p, e))?;
    }
    let amplitudes = (a.m <= 4).then(|| res.state.amps().iter().map(|z| [z.re, z.im]).collect());
    let result = ApplyResult {
        requested: res.requested,
        applied: res.applied,
        reduced: res.reduced,
        reduction_note,
        norm_in: state.norm(),
        norm_out: res.state.norm(),
        amplitudes,
    };
    let doc = Artifact { format: "mubs-apply v1", command: "apply", config: a, result };
    out.write_all(to_json(&doc).as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(true)
}

#[derive(Serialize)]
struct TomoConfig<'a> {
    #[serde(flatten)]
    args: &'a TomoArgs,
    state_spec: StateSpec,
    rng: &'static str,
}

fn cmd_tomo(a: &TomoArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let state_seed = a.state_seed.unwrap_or(a.seed);
    let spec = match a.state {
        StateKind::MaximallyMixed => StateSpec::MaximallyMixed,
        StateKind::RandomPure => StateSpec::RandomPure { seed: state_seed },
        StateKind::RandomMixed => StateSpec::RandomMixed { seed: state_seed },
        StateKind::File => StateSpec::File {
            path: a.state_file.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
        },
    };
    let config = TomoConfig { args: a, state_spec: spec.clone(), rng: tomography::RNG_NAME };

    if a.sweep {
        let report = tomography::sweep(a.m, &a.sweep_shots, a.seeds)?;
        let doc = Artifact { format: "mubs-tomo-sweep v1", command: "tomo", config: &config, result: &report };
        return emit_json(&doc, a.out.as_deref(), out);
    }

    let rho = match spec.generate(a.m) {
        Some(r) => r,
        None => {
            let p = a.state_file.as_ref().expect("required by clap");
            let f = fs::File::open(p).map_err(|e| io_err(p, e))?;
            let r = DensityMatrix::read_from(io::BufReader::new(f)).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            if r.qubits() != a.m {
                return Err(usage(format!("state file has m={}, expected m={}", r.qubits(), a.m)));
            }
            r
        }
    };
    let bases = tomography::mub_family(a.m)?;
    let shots = (!a.exact_probabilities).then_some(a.shots);
    let run = tomography::simulate(&rho, &bases, shots, a.seed, a.project_psd)?;
    let doc = Artifact { format: "mubs-tomo v1", command: "tomo", config: &config, result: &run };
    emit_json(&doc, a.out.as_deref(), out)
}

fn emit_json<T: Serialize>(doc: &T, path: Option<&Path>, out: &mut dyn Write) -> Result<bool, CliError> {
    let json = to_json(doc);
    match path {
        Some(p) => write_file(p, json.as_bytes())?,
        None => out.write_all(json.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(true)
}
