use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tetrahelix::colex::Colex;
use tetrahelix::csscode::{check_diagonal_transversality, find_t_partition, CodeFile};
use tetrahelix::harness::{self, ExperimentConfig};
use tetrahelix::iqp::{self, IqpCircuit};
use tetrahelix::surgery::{ChainFile, TetrahelixCode};
use tetrahelix::{validate_colex, Basis, BitMatrix, CssCode, Error};

#[derive(Parser)]
#[command(name = "tetrahelix", version, about = "Tetrahedral color codes, tetrahelix chains and sparse IQP sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and inspect codes.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Sparse IQP circuits.
    #[command(subcommand)]
    Iqp(IqpCmd),
    /// Monte Carlo experiments.
    #[command(subcommand)]
    Mc(McCmd),
    /// End-to-end sampling accuracy experiment; writes tv.csv-style rows.
    E2e(RunArgs),
    /// Resource planning.
    #[command(subcommand)]
    Plan(PlanCmd),
}

#[derive(Subcommand)]
enum CodeCmd {
    /// Build a chain of k tetrahedral blocks of edge length L and write it as JSON.
    Build {
        #[arg(long = "L")]
        l: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a colex, code or chain file; exits 1 when a check fails.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Minimum weight of a nontrivial logical of the given type, searched up to --cap.
    Distance {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        basis: BasisArg,
        #[arg(long, default_value_t = 8)]
        cap: usize,
    },
    /// Search for a V+/V- split realizing a transversal logical T.
    TPartition {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    X,
    Z,
}

#[derive(Subcommand)]
enum IqpCmd {
    /// Sample a sparse IQP circuit.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact output distribution as CSV.
    Simulate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Depth-1 GHZ layout; verifies it against the direct distribution when small enough.
    CompileParallel {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the exponential-sum probability of 0^N with the state vector.
    CheckZero {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with experiment parameters.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum McCmd {
    /// Single-block preparation flag rates for each L in `ls`.
    Prep(RunArgs),
    /// Logical error rate of the (L, k) pipeline.
    Pipeline {
        #[command(flatten)]
        run: RunArgs,
        /// Write per-trial JSON lines for the first --trace-trials trials.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        trace_trials: u64,
    },
    /// Grid scan over (ls, ks, epsilons); writes scan.csv-style rows.
    Scan(RunArgs),
}

#[derive(Subcommand)]
enum PlanCmd {
    /// Chain length, block size and qubit count for N logical qubits.
    Overhead {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long = "eps-th")]
        eps_th: f64,
        #[arg(long, default_value_t = 1.0)]
        c_k: f64,
        #[arg(long, default_value_t = 1.0)]
        c_l: f64,
        #[arg(long, default_value_t = 1.0)]
        c_r: f64,
    },
}

enum Failure {
    /// A check ran and failed.
    Check(String),
    /// Unusable input.
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn load_config(path: &Path, seed: u64) -> Result<ExperimentConfig, Failure> {
    let mut cfg: ExperimentConfig =
        toml::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    cfg.seed = seed;
    cfg.validate()?;
    Ok(cfg)
}

fn write_manifest(out: Option<&Path>, cfg: &ExperimentConfig, workers: usize, result: &Value) -> Outcome {
    let manifest = json!({ "config": cfg, "workers": workers, "result": result });
    match out {
        Some(p) => {
            let mut name = p.as_os_str().to_owned();
            name.push(".manifest.json");
            fs::write(PathBuf::from(name), pretty(&manifest))?;
        }
        None => eprintln!("{}", pretty(&manifest)),
    }
    Ok(())
}

/// Any code-like input as a CSS code.
fn load_code(path: &Path) -> Result<CssCode, Failure> {
    let text = read(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    if v.get("pairings").is_some() {
        Ok(TetrahelixCode::from_json(&text)?.code)
    } else if v.get("hx").is_some() {
        Ok(CssCode::from_json(&text)?)
    } else if v.get("cells").is_some() {
        Ok(CssCode::from_colex(&Colex::from_json(&text)?)?)
    } else {
        Err(Failure::Input(format!("{}: not a colex, code or chain file", path.display())))
    }
}

fn check_code_file(f: CodeFile) -> Result<Value, Failure> {
    let bad_len = f.hx.iter().chain(&f.hz).any(|r| r.bits.len() != f.n)
        || f.logical_x.len() != f.n
        || f.logical_z.len() != f.n;
    if bad_len {
        return Err(Failure::Input("row length differs from n".into()));
    }
    let hx = BitMatrix::from_rows(f.n, f.hx.iter().map(|r| r.bits.clone()).collect())?;
    let hz = BitMatrix::from_rows(f.n, f.hz.iter().map(|r| r.bits.clone()).collect())?;
    let commute = hx.mul_transpose(&hz).is_zero();
    let count = f.n as i64 - hx.rank() as i64 - hz.rank() as i64;
    let lx_ok = hz.mul_vec(&f.logical_x).is_zero();
    let lz_ok = hx.mul_vec(&f.logical_z).is_zero();
    let pair = f.logical_x.dot(&f.logical_z);
    Ok(json!({
        "kind": "code",
        "n": f.n,
        "checks": {
            "stabilizers_commute": commute,
            "logical_count_is_one": count == 1,
            "logical_x_commutes_with_z_checks": lx_ok,
            "logical_z_commutes_with_x_checks": lz_ok,
            "logicals_anticommute": pair,
        },
        "passed": commute && count == 1 && lx_ok && lz_ok && pair,
    }))
}

fn code_check(input: &Path) -> Outcome {
    let text = read(input)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", input.display())))?;
    let report = if v.get("pairings").is_some() {
        let f: ChainFile = serde_json::from_value(v).map_err(|e| Failure::Input(format!("chain file: {e}")))?;
        let colex = validate_colex(&f.colex);
        let code = check_code_file(f.code.clone())?;
        let rebuilt = TetrahelixCode::from_file(f).map(|_| ()).map_err(|e| e.to_string());
        let passed = colex.passed() && code["passed"] == json!(true) && rebuilt.is_ok();
        json!({ "kind": "chain", "colex": colex, "code": code, "rebuild": rebuilt.err().unwrap_or_else(|| "ok".into()), "passed": passed })
    } else if v.get("hx").is_some() {
        let f: CodeFile = serde_json::from_value(v).map_err(|e| Failure::Input(format!("code file: {e}")))?;
        check_code_file(f)?
    } else if v.get("cells").is_some() {
        let colex = Colex::from_json(&text)?;
        let report = validate_colex(&colex);
        json!({ "kind": "colex", "checks": report, "passed": report.passed() })
    } else {
        return Err(Failure::Input(format!("{}: not a colex, code or chain file", input.display())));
    };
    let text = pretty(&report);
    if report["passed"] == json!(true) {
        emit(None, &text)
    } else {
        eprint!("{text}");
        Err(Failure::Check("validation failed".into()))
    }
}

fn run_code(cmd: CodeCmd) -> Outcome {
    match cmd {
        CodeCmd::Build { l, k, out } => {
            let t = tetrahelix::build_tetrahelix(k, l)?;
            t.export(&out)?;
            eprintln!("n = {}, k = {k}, L = {l}, logical qubits = {}", t.n(), t.code.logical_count());
            Ok(())
        }
        CodeCmd::Check { input } => code_check(&input),
        CodeCmd::Distance { input, basis, cap } => {
            let code = load_code(&input)?;
            let b = match basis {
                BasisArg::X => Basis::X,
                BasisArg::Z => Basis::Z,
            };
            let d = code.distance(b, cap)?;
            emit(None, &pretty(&json!({ "basis": format!("{b:?}"), "cap": cap, "distance": d.to_string() })))
        }
        CodeCmd::TPartition { input } => {
            let text = read(&input)?;
            // A chain carries T block by block; its blocks share one layout.
            let blocks = if text.contains("\"pairings\"") {
                TetrahelixCode::from_json(&text)?.blocks
            } else {
                vec![load_code(&input)?]
            };
            let Some(p) = find_t_partition(&blocks[0])? else {
                eprintln!("no transversal-T partition found");
                return Err(Failure::Check("no partition".into()));
            };
            let checks = blocks
                .iter()
                .map(|b| check_diagonal_transversality(b, &p, None))
                .collect::<Result<Vec<_>, _>>()?;
            let passed = checks.iter().all(|c| c.passed);
            let text = pretty(&json!({ "partition": p, "blocks": checks }));
            if passed {
                emit(None, &text)
            } else {
                eprint!("{text}");
                Err(Failure::Check("partition fails the codeword check".into()))
            }
        }
    }
}

fn run_iqp(cmd: IqpCmd) -> Outcome {
    let load = |p: &Path| -> Result<IqpCircuit, Failure> { Ok(IqpCircuit::from_json(&read(p)?)?) };
    match cmd {
        IqpCmd::Gen { n, gamma, seed, out } => {
            let c = iqp::sample_circuit(n, gamma, seed)?;
            let mut text = c.to_json()?;
            text.push('\n');
            emit(out.as_deref(), &text)
        }
        IqpCmd::Simulate { input, out } => {
            let d = iqp::exact_distribution(&load(&input)?)?;
            let mut buf = Vec::new();
            d.write_csv(&mut buf)?;
            emit(out.as_deref(), &String::from_utf8(buf).expect("csv is utf-8"))
        }
        IqpCmd::CompileParallel { input, out } => {
            let c = load(&input)?;
            let layout = iqp::compile_parallel(&c)?;
            let text = pretty(&serde_json::to_value(layout.to_file()).expect("layout serializes"));
            if layout.wire_count() <= 16 {
                let tv = iqp::tv_distance(&iqp::simulate_parallel_exact(&layout)?, &iqp::exact_distribution(&c)?)?;
                eprintln!("depth {}, wires {}, TV to direct = {tv:.3e}", layout.k, layout.wire_count());
                if tv > 1e-9 {
                    return Err(Failure::Check(format!("parallel layout differs from the circuit (TV {tv:.3e})")));
                }
            } else {
                eprintln!("depth {}, wires {}", layout.k, layout.wire_count());
            }
            emit(out.as_deref(), &text)
        }
        IqpCmd::CheckZero { input } => {
            let c = load(&input)?;
            let p0 = iqp::prob_zero(&c)?;
            let exact = if c.n <= iqp::MAX_STATEVECTOR_QUBITS { Some(iqp::exact_distribution(&c)?.probs[0]) } else { None };
            let diff = exact.map(|e| (e - p0).abs());
            emit(None, &pretty(&json!({ "n": c.n, "prob_zero": p0, "statevector": exact, "abs_diff": diff })))?;
            match diff {
                Some(d) if d > 1e-9 => Err(Failure::Check(format!("mismatch {d:.3e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn run_mc(cmd: McCmd) -> Outcome {
    match cmd {
        McCmd::Prep(a) => {
            let cfg = load_config(&a.config, a.seed)?;
            let model = cfg.model()?;
            let mut rows = Vec::new();
            for (i, &l) in cfg.ls.iter().enumerate() {
                cfg.caps.check(l, 1)?;
                let r = harness::prep_flag_rate(l, &model, cfg.trials, harness::sub_seed(cfg.seed, i as u64), a.workers)?;
                rows.push(r);
            }
            let result = serde_json::to_value(&rows).expect("rows serialize");
            emit(a.out.as_deref(), &pretty(&result))?;
            write_manifest(a.out.as_deref(), &cfg, a.workers, &result)
        }
        McCmd::Pipeline { run: a, trace, trace_trials } => {
            let cfg = load_config(&a.config, a.seed)?;
            let model = cfg.model()?;
            let r = harness::logical_error_rate(cfg.l, cfg.k, &model, cfg.trials, cfg.seed, &cfg.caps, a.workers)?;
            if let Some(path) = trace {
                let p = tetrahelix::Pipeline::new(tetrahelix::build_tetrahelix(cfg.k, cfg.l)?)?;
                let f = fs::File::create(&path)?;
                harness::write_trace(&p, &model, trace_trials.min(cfg.trials), cfg.seed, io::BufWriter::new(f))?;
            }
            let result = serde_json::to_value(r).expect("rate serializes");
            emit(a.out.as_deref(), &pretty(&result))?;
            write_manifest(a.out.as_deref(), &cfg, a.workers, &result)
        }
        McCmd::Scan(a) => {
            let cfg = load_config(&a.config, a.seed)?;
            let scan = harness::threshold_scan(&cfg.ls, &cfg.ks, &cfg.epsilons, cfg.trials, cfg.seed, &cfg.caps, a.workers)?;
            let mut buf = Vec::new();
            scan.write_csv(&mut buf)?;
            emit(a.out.as_deref(), &String::from_utf8(buf).expect("csv is utf-8"))?;
            for c in &scan.crossings {
                eprintln!(
                    "k={}: L={} and L={} cross in [{}, {}], estimate {:.4}",
                    c.k, c.l_small, c.l_large, c.eps_low, c.eps_high, c.estimate
                );
            }
            write_manifest(a.out.as_deref(), &cfg, a.workers, &json!({ "crossings": scan.crossings }))
        }
    }
}

fn run_e2e(a: RunArgs) -> Outcome {
    let cfg = load_config(&a.config, a.seed)?;
    let r = harness::end_to_end(&cfg, a.workers)?;
    let mut buf = Vec::new();
    r.write_csv(&mut buf)?;
    emit(a.out.as_deref(), &String::from_utf8(buf).expect("csv is utf-8"))?;
    match r.c_fit {
        Some(c) => eprintln!("fitted c = {c:.4}"),
        None => eprintln!("no logical failures observed; c undetermined"),
    }
    write_manifest(a.out.as_deref(), &cfg, a.workers, &serde_json::to_value(&r).expect("result serializes"))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Code(c) => run_code(c),
        Command::Iqp(c) => run_iqp(c),
        Command::Mc(c) => run_mc(c),
        Command::E2e(a) => run_e2e(a),
        Command::Plan(PlanCmd::Overhead { n, delta, eps, eps_th, c_k, c_l, c_r }) => {
            let o = harness::overhead(n, delta, eps, eps_th, c_k, c_l, c_r, 7)?;
            emit(None, &pretty(&serde_json::to_value(o).expect("overhead serializes")))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
