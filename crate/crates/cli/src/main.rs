//! Command line front end for the toolkit: scheme construction and
//! verification, channel diagnostics and capacity estimates, correlation
//! experiments. Reports are single-line JSON on standard output with all
//! numbers rounded to nine significant digits, so identical inputs and seeds
//! give byte-identical output; wall-clock time goes to standard error.
//! Exit codes: 0 success, 1 failed verification or inequality, 2 bad input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qichan::capacity::{
    cb_norm, cs1, fidelity_offdiag, fidelity_worst, one_shot_classical_capacity, operator_norm,
    transpose_bound, OffDiagonalConvention, OptimizerConfig,
};
use qichan::channels::{
    channel_from_choi, choi_cp_verdict, choi_of, choi_out_dim, kraus_to_stinespring,
    radon_nikodym, stinespring_apply, Channel, Instrument, KrausMap, StinespringIsometry,
};
use qichan::telepo::{
    basis_from_design, pauli_basis, weyl_basis, HadamardSet, LatinSquare, TeleportationScheme,
};
use qichan::{bell, ComplexMatrix};

#[derive(Parser)]
#[command(name = "qichan", version, about = "Finite-dimensional quantum information toolkit")]
struct Cli {
    /// Pretty-print the JSON report instead of a single line
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build and verify tight teleportation / dense coding schemes
    Scheme {
        #[command(subcommand)]
        cmd: SchemeCmd,
    },
    /// Channel representations, norms, capacities, and fidelities
    Channel {
        #[command(subcommand)]
        cmd: ChannelCmd,
    },
    /// Two-party correlation experiments and the decoding bound
    Bell {
        #[command(subcommand)]
        cmd: BellCmd,
    },
}

#[derive(Subcommand)]
enum SchemeCmd {
    /// Construct a scheme from a unitary basis and write it to a file
    Build(BuildArgs),
    /// Check the teleportation and dense-coding equations of a scheme file
    Verify {
        /// Scheme JSON produced by `scheme build`
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Args)]
struct BuildArgs {
    /// System dimension d; the scheme uses d^2 signals
    #[arg(long)]
    dim: usize,
    #[arg(long, value_enum)]
    construction: Construction,
    /// Latin square JSON, required for the design construction
    #[arg(long)]
    latin: Option<PathBuf>,
    /// Hadamard set JSON, required for the design construction
    #[arg(long)]
    hadamard: Option<PathBuf>,
    /// Where to write the scheme JSON
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    /// Identity plus the three Pauli matrices (d = 2 only)
    Pauli,
    /// Shift-and-clock basis, any dimension
    Weyl,
    /// Latin square and Hadamard set construction
    Design,
}

#[derive(Args)]
struct OptArgs {
    /// Channel JSON with fields in_dim, out_dim, kraus
    #[arg(long = "in")]
    input: PathBuf,
    /// Seed for the optimizer starting points
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random restarts on top of the canonical starts
    #[arg(long, default_value_t = 32)]
    restarts: usize,
}

#[derive(Subcommand)]
enum ChannelCmd {
    /// Decide complete positivity from the spectrum of the Choi matrix
    CheckCp {
        /// Channel JSON, or a map as {"choi": matrix, "in_dim": n}
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Minimal dilation isometry and its reconstruction error
    Stinespring {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Choi matrix round trip and rank
    Choi {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Express instrument outcomes as effects on the dilation space
    RadonNikodym {
        /// Instrument JSON: {"parts": [[matrix, ...], ...], "outcomes": [..]?}
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Plain and stabilized norm of the channel as a map on observables
    Cbnorm(OptArgs),
    /// One-shot classical capacity via ensemble maximization
    Holevo(OptArgs),
    /// One-shot quantum capacity via coherent information maximization
    Cs1(OptArgs),
    /// Capacity assistance bound from the transposed channel
    TransposeBound(OptArgs),
    /// Worst-case and off-diagonal channel fidelities
    Fidelity {
        #[command(flatten)]
        opt: OptArgs,
        /// Which off-diagonal value to report
        #[arg(long, value_enum, default_value = "infimum")]
        convention: Convention,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Infimum,
    Supremum,
}

#[derive(Subcommand)]
enum BellCmd {
    /// Correlation matrix and the four-term combination
    Chsh {
        /// Use the singlet as the shared state (required; no other state is built in)
        #[arg(long)]
        singlet: bool,
        /// Analyzer angles 45, 0 / 22.5, 67.5 degrees, reaching 2 sqrt 2
        #[arg(long)]
        standard_angles: bool,
        /// Explicit analyzer angles in degrees: a1 a2 b1 b2
        #[arg(long, num_args = 4, value_names = ["A1", "A2", "B1", "B2"])]
        angles: Option<Vec<f64>>,
    },
    /// Maximum of the combination over deterministic local strategies
    ClassicalMax,
    /// Decoding success and induced combination of a joint outcome table
    Telephone {
        /// Distribution JSON: {"p": [[i, a, b1, b2, prob], ...]}
        #[arg(long)]
        dist: PathBuf,
    },
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    inputs_digest: String,
    results: Vec<ResultEntry>,
    seed: u64,
}

#[derive(Serialize)]
struct ResultEntry {
    name: String,
    value: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    convention: Option<String>,
}

enum Failure {
    /// Malformed or missing input: exit code 2.
    Input(String),
    /// Inputs were readable but a requested check failed: exit code 1,
    /// report still printed.
    Check(RunReport),
}

type CliResult = Result<RunReport, Failure>;

/// Rounds to nine significant digits so reports are stable across runs.
fn sig9(x: f64) -> serde_json::Value {
    if !x.is_finite() {
        return serde_json::Value::String(format!("{x}"));
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float");
    serde_json::json!(rounded)
}

struct Results(Vec<ResultEntry>);

impl Results {
    fn new() -> Self {
        Results(Vec::new())
    }

    fn num(&mut self, name: &str, x: f64) -> &mut Self {
        self.push(name, sig9(x), None)
    }

    fn int(&mut self, name: &str, x: usize) -> &mut Self {
        self.push(name, serde_json::json!(x), None)
    }

    fn flag(&mut self, name: &str, b: bool) -> &mut Self {
        self.push(name, serde_json::json!(b), None)
    }

    fn text(&mut self, name: &str, s: &str) -> &mut Self {
        self.push(name, serde_json::json!(s), None)
    }

    fn with_convention(&mut self, name: &str, x: f64, convention: &str) -> &mut Self {
        self.push(name, sig9(x), Some(convention.to_string()))
    }

    fn push(&mut self, name: &str, value: serde_json::Value, convention: Option<String>) -> &mut Self {
        self.0.push(ResultEntry {
            name: name.to_string(),
            value,
            convention,
        });
        self
    }
}

/// Accumulates the raw bytes of every input file, in read order, for the
/// report digest. Commands without file inputs digest the empty string.
struct Inputs {
    bytes: Vec<u8>,
}

impl Inputs {
    fn new() -> Self {
        Inputs { bytes: Vec::new() }
    }

    fn load<T: DeserializeOwned>(&mut self, path: &Path) -> Result<T, Failure> {
        let raw = fs::read(path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
        self.bytes.extend_from_slice(&raw);
        serde_json::from_slice(&raw)
            .map_err(|e| Failure::Input(format!("cannot parse {}: {e}", path.display())))
    }

    fn digest(&self) -> String {
        hex::encode(Sha256::digest(&self.bytes))
    }
}

/// Verification tolerance: `QICHAN_TOL` when set, else 1e-9.
fn tolerance() -> Result<f64, Failure> {
    match std::env::var("QICHAN_TOL") {
        Err(_) => Ok(qichan::EPS_ALG),
        Ok(raw) => {
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| Failure::Input(format!("QICHAN_TOL is not a number: {raw:?}")))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Failure::Input(format!(
                    "QICHAN_TOL must be a positive number, got {raw:?}"
                )));
            }
            Ok(v)
        }
    }
}

fn report(command: &str, inputs: &Inputs, seed: u64, results: Results) -> RunReport {
    RunReport {
        command: command.to_string(),
        inputs_digest: inputs.digest(),
        results: results.0,
        seed,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let pretty = cli.pretty;
    let outcome = run(cli.cmd);
    eprintln!("elapsed_ms={}", started.elapsed().as_millis());
    let print = |r: &RunReport| {
        let text = if pretty {
            serde_json::to_string_pretty(r)
        } else {
            serde_json::to_string(r)
        }
        .expect("report serializes");
        println!("{text}");
    };
    match outcome {
        Ok(r) => {
            print(&r);
            ExitCode::SUCCESS
        }
        Err(Failure::Check(r)) => {
            print(&r);
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> CliResult {
    match cmd {
        Cmd::Scheme { cmd } => match cmd {
            SchemeCmd::Build(args) => scheme_build(args),
            SchemeCmd::Verify { input } => scheme_verify(&input),
        },
        Cmd::Channel { cmd } => match cmd {
            ChannelCmd::CheckCp { input } => channel_check_cp(&input),
            ChannelCmd::Stinespring { input } => channel_stinespring(&input),
            ChannelCmd::Choi { input } => channel_choi(&input),
            ChannelCmd::RadonNikodym { input } => channel_radon_nikodym(&input),
            ChannelCmd::Cbnorm(opt) => channel_cbnorm(&opt),
            ChannelCmd::Holevo(opt) => channel_holevo(&opt),
            ChannelCmd::Cs1(opt) => channel_cs1(&opt),
            ChannelCmd::TransposeBound(opt) => channel_transpose_bound(&opt),
            ChannelCmd::Fidelity { opt, convention } => channel_fidelity(&opt, convention),
        },
        Cmd::Bell { cmd } => match cmd {
            BellCmd::Chsh {
                singlet,
                standard_angles,
                angles,
            } => bell_chsh(singlet, standard_angles, angles),
            BellCmd::ClassicalMax => bell_classical_max(),
            BellCmd::Telephone { dist } => bell_telephone(&dist),
        },
    }
}

fn input_err(e: qichan::Error) -> Failure {
    Failure::Input(e.to_string())
}

fn scheme_build(args: BuildArgs) -> CliResult {
    let mut inputs = Inputs::new();
    let tol = tolerance()?;
    let (name, basis) = match args.construction {
        Construction::Pauli => {
            if args.dim != 2 {
                return Err(Failure::Input(format!(
                    "the pauli construction fixes dim 2, got {}",
                    args.dim
                )));
            }
            ("pauli", pauli_basis())
        }
        Construction::Weyl => ("weyl", weyl_basis(args.dim).map_err(input_err)?),
        Construction::Design => {
            let latin = args.latin.ok_or_else(|| {
                Failure::Input("the design construction needs --latin".into())
            })?;
            let hadamard = args.hadamard.ok_or_else(|| {
                Failure::Input("the design construction needs --hadamard".into())
            })?;
            let ls: LatinSquare = inputs.load(&latin)?;
            let hs: HadamardSet = inputs.load(&hadamard)?;
            if ls.order() != args.dim {
                return Err(Failure::Input(format!(
                    "--dim {} does not match the Latin square order {}",
                    args.dim,
                    ls.order()
                )));
            }
            ("design", basis_from_design(&ls, &hs).map_err(input_err)?)
        }
    };
    let scheme = TeleportationScheme::build(basis).map_err(input_err)?;
    let text = serde_json::to_string(&scheme).expect("scheme serializes");
    fs::write(&args.out, text + "\n")
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", args.out.display())))?;
    let tele = scheme.verify_teleportation();
    let dense = scheme.verify_dense_coding();
    let mut results = Results::new();
    results
        .text("construction", name)
        .int("dim", scheme.dim())
        .num("teleportation_residual", tele)
        .num("dense_coding_residual", dense)
        .num("tolerance", tol);
    let rpt = report("scheme build", &inputs, 0, results);
    if tele < tol && dense < tol {
        Ok(rpt)
    } else {
        Err(Failure::Check(rpt))
    }
}

fn scheme_verify(input: &Path) -> CliResult {
    let mut inputs = Inputs::new();
    let tol = tolerance()?;
    let scheme: TeleportationScheme = inputs.load(input)?;
    let tele = scheme.verify_teleportation();
    let dense = scheme.verify_dense_coding();
    let inv = scheme.invariants();
    let mut results = Results::new();
    results
        .int("dim", scheme.dim())
        .num("teleportation_residual", tele)
        .num("dense_coding_residual", dense)
        .num("invariant_residual", inv.max_deviation())
        .num("tolerance", tol)
        .flag("ok", tele < tol && dense < tol);
    let rpt = report("scheme verify", &inputs, 0, results);
    if tele < tol && dense < tol {
        Ok(rpt)
    } else {
        Err(Failure::Check(rpt))
    }
}

/// Input for the complete-positivity check: either a channel in Kraus form
/// or a bare map given by its trace-normalized Choi matrix.
#[derive(Deserialize)]
#[serde(untagged)]
enum MapInput {
    Choi { choi: ComplexMatrix, in_dim: usize },
    Channel(Channel),
}

fn channel_check_cp(input: &Path) -> CliResult {
    let mut inputs = Inputs::new();
    let map: MapInput = inputs.load(input)?;
    let (verdict, in_dim, out_dim) = match &map {
        MapInput::Choi { choi, in_dim } => {
            let out = choi_out_dim(choi, *in_dim).map_err(input_err)?;
            (choi_cp_verdict(choi), *in_dim, out)
        }
        MapInput::Channel(ch) => {
            let choi = choi_of(ch.kraus_map());
            (
                choi_cp_verdict(choi.matrix()),
                ch.in_dim(),
                ch.out_dim(),
            )
        }
    };
    let mut results = Results::new();
    results
        .int("in_dim", in_dim)
        .int("out_dim", out_dim)
        .flag("cp", verdict.cp)
        .num("min_eigenvalue", verdict.min_eigenvalue)
        .num("hermiticity_deviation", verdict.hermiticity_deviation);
    let rpt = report("channel check-cp", &inputs, 0, results);
    if verdict.cp {
        Ok(rpt)
    } else {
        Err(Failure::Check(rpt))
    }
}

fn dilation_residual(ch: &Channel, v: &StinespringIsometry) -> f64 {
    let flat = ComplexMatrix::identity(v.dilation_dim());
    let mut worst = 0.0f64;
    for i in 0..ch.out_dim() {
        for j in 0..ch.out_dim() {
            let e = ComplexMatrix::matrix_unit(ch.out_dim(), i, j);
            let via = stinespring_apply(v, &e, &flat);
            let direct = ch.apply_heisenberg(&e);
            worst = worst.max((&via - &direct).max_abs());
        }
    }
    worst
}

fn channel_stinespring(input: &Path) -> CliResult {
    let mut inputs = Inputs::new();
    let tol = tolerance()?;
    let ch: Channel = inputs.load(input)?;
    let v = kraus_to_stinespring(&ch);
    let residual = dilation_residual(&ch, &v);
    let mut results = Results::new();
    results
        .int("in_dim", v.in_dim())
        .int("out_dim", v.out_dim())
        .int("dilation_dim", v.dilation_dim())
        .flag("minimal", v.is_minimal())
        .num("isometry_deviation", v.isometry_deviation())
        .num("action_residual", residual);
    let rpt = report("channel stinespring", &inputs, 0, results);
    if residual < tol && v.isometry_deviation() < tol {
        Ok(rpt)
    } else {
        Err(Failure::Check(rpt))
    }
}

fn schrodinger_residual(a: &Channel, b: &Channel) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.in_dim() {
        for j in 0..a.in_dim() {
            let e = ComplexMatrix::matrix_unit(a.in_dim(), i, j);
            worst = worst.max((&a.apply_schrodinger_raw(&e) - &b.apply_schrodinger_raw(&e)).max_abs());
        }
    }
    worst
}

fn channel_choi(input: &Path) -> CliResult {
    let mut inputs = Inputs::new();
    let tol = tolerance()?;
    let ch: Channel = inputs.load(input)?;
    let choi = choi_of(ch.kraus_map());
    let verdict = choi_cp_verdict(choi.matrix());
    let back = channel_from_choi(&choi).map_err(input_err)?;
    let residual = schrodinger_residual(&ch, &back);
    let mut results = Results::new();
    results
        .int("in_dim", ch.in_dim())
        .int("out_dim", ch.out_dim())
        .int("choi_rank", back.kraus().len())
        .num("min_eigenvalue", verdict.min_eigenvalue)
        .num("roundtrip_residual", residual);
    let rpt = report("channel choi", &inputs, 0, results);
    if residual < tol {
        Ok(rpt)
    } else {
        Err(Failure::Check(rpt))
    }
}

#[derive(Deserialize)]
struct InstrumentInput {
    #[serde(default)]
    outcomes: Option<Vec<String>>,
    parts: Vec<Vec<ComplexMatrix>>,
}

fn channel_radon_nikodym(input: &Path) -> CliResult {
    let mut inputs = Inputs::new();
    let tol = tolerance()?;
    let raw: InstrumentInput = inputs.load(input)?;
    let maps = raw
        .parts
        .into_iter()
        .map(KrausMap::new)
        .collect::<qichan::Result<Vec<_>>>()
        .map_err(input_err)?;
    let outcomes = raw
        .outcomes
        .unwrap_or_else(|| (0..maps.len()).map(|i| i.to_string()).collect());
    let inst = Instrument::new(outcomes, maps).map_err(input_err)?;
    let effects = radon_nikodym(&inst).map_err(input_err)?;
    let l = effects.first().map_or(0, |f| f.rows());
    let mut completeness = ComplexMatrix::zeros(l, l);
    let mut results = Results::new();
    results.int("outcome_count", effects.len()).int("dilation_dim", l);
    for (label, f) in inst.outcomes().iter().zip(&effects) {
        let weight = f.trace().re / l as f64;
        let flatness = (f - &ComplexMatrix::identity(l).scale(qichan::cr(weight))).max_abs();
        results.num(&format!("weight[{label}]"), weight);
        results.num(&format!("state_independence[{label}]"), flatness);
        completeness = &completeness + f;
    }
    let completeness_dev = (&completeness - &ComplexMatrix::identity(l)).max_abs();
    results.num("completeness_deviation", completeness_dev);
    let rpt = report("channel radon-nikodym", &inputs, 0, results);
    if completeness_dev < tol {
        Ok(rpt)
    } else {
        Err(Failure::Check(rpt))
    }
}

fn optimizer(opt: &OptArgs) -> OptimizerConfig {
    OptimizerConfig {
        seed: opt.seed,
        restarts: opt.restarts,
        ..OptimizerConfig::default()
    }
}

fn channel_cbnorm(opt: &OptArgs) -> CliResult {
    let mut inputs = Inputs::new();
    let ch: Channel = inputs.load(&opt.input)?;
    let cfg = optimizer(opt);
    let map = qichan::channels::LinearMap::heisenberg(ch.kraus_map());
    let plain = operator_norm(&map, &cfg);
    let stabilized = cb_norm(&map, &cfg);
    let mut results = Results::new();
    results
        .num("operator_norm", plain.value)
        .num("cb_norm", stabilized.value)
        .int("stabilizer_dim", stabilized.stabilizer_dim)
        .flag("converged", plain.converged && stabilized.converged);
    Ok(report("channel cbnorm", &inputs, opt.seed, results))
}

fn channel_holevo(opt: &OptArgs) -> CliResult {
    let mut inputs = Inputs::new();
    let ch: Channel = inputs.load(&opt.input)?;
    let rpt = one_shot_classical_capacity(&ch, &optimizer(opt));
    let mut results = Results::new();
    results
        .num("classical_capacity_one_shot", rpt.value)
        .int("ensemble_size", rpt.ensemble.weights().len())
        .flag("converged", rpt.converged);
    Ok(report("channel holevo", &inputs, opt.seed, results))
}

fn channel_cs1(opt: &OptArgs) -> CliResult {
    let mut inputs = Inputs::new();
    let ch: Channel = inputs.load(&opt.input)?;
    let rpt = cs1(&ch, &optimizer(opt));
    let mut results = Results::new();
    results
        .num("quantum_capacity_one_shot", rpt.value)
        .num("max_entangled_value", rpt.max_entangled_value)
        .flag("converged", rpt.converged);
    Ok(report("channel cs1", &inputs, opt.seed, results))
}

fn channel_transpose_bound(opt: &OptArgs) -> CliResult {
    let mut inputs = Inputs::new();
    let ch: Channel = inputs.load(&opt.input)?;
    let rpt = transpose_bound(&ch, &optimizer(opt));
    let mut results = Results::new();
    results
        .num("transpose_bound", rpt.value)
        .flag("cp_shortcut", rpt.cp_shortcut);
    Ok(report("channel transpose-bound", &inputs, opt.seed, results))
}

fn channel_fidelity(opt: &OptArgs, convention: Convention) -> CliResult {
    let mut inputs = Inputs::new();
    let ch: Channel = inputs.load(&opt.input)?;
    let cfg = optimizer(opt);
    let worst = fidelity_worst(&ch, &cfg).map_err(input_err)?;
    let (conv, label) = match convention {
        Convention::Infimum => (OffDiagonalConvention::Infimum, "infimum"),
        Convention::Supremum => (OffDiagonalConvention::Supremum, "supremum"),
    };
    let offdiag = fidelity_offdiag(&ch, &cfg, conv).map_err(input_err)?;
    let mut results = Results::new();
    results
        .with_convention("fidelity_worst", worst.value, "minimum over pure inputs")
        .with_convention("fidelity_offdiag", offdiag.value, label)
        .flag("converged", worst.converged && offdiag.converged);
    Ok(report("channel fidelity", &inputs, opt.seed, results))
}

fn bell_chsh(singlet: bool, standard: bool, angles: Option<Vec<f64>>) -> CliResult {
    let inputs = Inputs::new();
    if !singlet {
        return Err(Failure::Input(
            "only singlet correlations are built in; pass --singlet".into(),
        ));
    }
    let angles = match (standard, angles) {
        (true, Some(_)) => {
            return Err(Failure::Input(
                "choose either --standard-angles or --angles, not both".into(),
            ))
        }
        (_, Some(v)) => bell::ChshAngles {
            a1: v[0],
            a2: v[1],
            b1: v[2],
            b2: v[3],
        },
        _ => bell::standard_angles(),
    };
    let rpt = bell::chsh_from_angles(&bell::singlet(), &angles).map_err(input_err)?;
    let mut results = Results::new();
    results.num("beta", rpt.beta);
    for (i, row) in rpt.correlations.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            results.num(&format!("correlation[a{}][b{}]", i + 1, j + 1), c);
        }
    }
    Ok(report("bell chsh", &inputs, 0, results))
}

fn bell_classical_max() -> CliResult {
    let inputs = Inputs::new();
    let mut results = Results::new();
    results.num("classical_max", bell::classical_chsh_max());
    Ok(report("bell classical-max", &inputs, 0, results))
}

fn bell_telephone(dist_path: &Path) -> CliResult {
    let mut inputs = Inputs::new();
    let tol = tolerance()?;
    let dist: bell::JointOutcomeDistribution = inputs.load(dist_path)?;
    let p_ok = bell::telephone_success(&dist);
    let beta = bell::distribution_beta(&dist);
    let holds = p_ok >= beta / 4.0 - tol;
    let mut results = Results::new();
    results
        .num("p_ok", p_ok)
        .num("beta", beta)
        .num("beta_over_4", beta / 4.0)
        .flag("inequality_holds", holds)
        .flag("signalling", bell::signalling_check(&dist))
        .num("bob_marginal_deviation", dist.bob_marginal_deviation());
    let rpt = report("bell telephone", &inputs, 0, results);
    if holds {
        Ok(rpt)
    } else {
        Err(Failure::Check(rpt))
    }
}
