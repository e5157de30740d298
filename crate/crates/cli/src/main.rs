//! `refereed`: generate instances, run seeded protocol trials, decide small
//! SAT instances through the zero-one protocol.
//!
//! Exit codes: 0 on success, 2 when an input (file or flag) is rejected,
//! 3 when a protocol run faults.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use refereed::generate::{generate, GenSpec, Kind, PmfKind};
use refereed::harness::{run_trials, Aggregate, Protocol, TrialConfig};
use refereed::instance_file::{parse_instance, write_instance};
use refereed::rlp::Params;
use refereed::sat::{sat_demo, Cnf, SatDemo};
use refereed::{AdversarySpec, Rational};

#[derive(Parser)]
#[command(name = "refereed", version, about = "Refereed learning simulator")]
#[command(after_help = "RL_ENUM_CAP overrides the largest dimension exact enumeration will touch (default 16).")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Cmd {
    /// Run seeded trials of one protocol on an instance file.
    Run(RunArgs),
    /// Write a generated instance and its exact losses.
    Generate(GenArgs),
    /// Decide satisfiability of a DIMACS 3-CNF through the zero-one protocol.
    SatDemo(SatArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    /// certsum, certindex, certsample, rlp01, rlpmetric, rlp-additive, rlp-mixed, rlp-junta, rlp-precision
    #[arg(long)]
    protocol: String,
    /// Strategy of the dishonest prover, e.g. `sum-liar:1/2`, `garbage:3`.
    #[arg(long, default_value = "honest")]
    adversary: String,
    #[arg(long, default_value = "1")]
    eps: Rational,
    #[arg(long, default_value = "0")]
    eta: Rational,
    #[arg(long, default_value = "1/20")]
    beta: Rational,
    #[arg(long, default_value = "1")]
    alpha: Rational,
    /// Sampling accuracy for certsample.
    #[arg(long, default_value = "1/4")]
    delta: Rational,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// JSON-lines destination; the aggregate CSV goes next to it with a `.csv`
    /// extension. Without it records go to stdout and the CSV to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Route every verifier oracle query through the provers.
    #[arg(long)]
    offload: bool,
    /// Record wall time per run (records then differ between replays).
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PmfArg {
    Uniform,
    Skewed,
}

#[derive(Args)]
struct GenArgs {
    /// loss-gap, junta or lower-bound-ensemble
    #[arg(long)]
    kind: String,
    #[arg(long = "dim", short = 'd')]
    dim: u8,
    /// Requested ratio: L1 > α·L0 + η.
    #[arg(long, default_value = "2")]
    alpha: Rational,
    /// Additive gap, or the mass on 0^d for the lower-bound ensemble.
    #[arg(long, default_value = "0")]
    eta: Rational,
    /// Junta size.
    #[arg(long, default_value_t = 3)]
    j: u8,
    /// Label range; above 2 the metric is |y - y'|.
    #[arg(long, default_value_t = 2)]
    range: u32,
    #[arg(long, value_enum, default_value = "uniform")]
    pmf: PmfArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instance destination (stdout without it).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exact-loss sidecar; defaults to `<out>.json` when `--out` is given.
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Args)]
struct SatArgs {
    #[arg(long)]
    formula: PathBuf,
    /// Simulations per decision.
    #[arg(short, long, default_value_t = 96)]
    a: u32,
    #[arg(long, default_value = "7")]
    eps: Rational,
    #[arg(long, default_value = "1/3")]
    beta: Rational,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent decisions, seeds `seed, seed+1, …`.
    #[arg(long, default_value_t = 1)]
    trials: u64,
}

enum Fault {
    Input(String),
    Protocol(String),
}

impl From<refereed::Error> for Fault {
    fn from(e: refereed::Error) -> Fault {
        if e.is_parse() {
            Fault::Input(e.to_string())
        } else {
            Fault::Protocol(e.to_string())
        }
    }
}

fn input<T, E: std::fmt::Display>(what: &str, r: Result<T, E>) -> Result<T, Fault> {
    r.map_err(|e| Fault::Input(format!("{what}: {e}")))
}

fn read(path: &Path) -> Result<String, Fault> {
    input(&path.display().to_string(), fs::read_to_string(path))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, Fault> {
    input(&path.display().to_string(), fs::File::create(path)).map(BufWriter::new)
}

fn io(e: io::Error) -> Fault {
    Fault::Input(e.to_string())
}

fn cmd_run(a: RunArgs) -> Result<(), Fault> {
    let inst = parse_instance(&read(&a.instance)?).map_err(|e| Fault::Input(format!("{}: {e}", a.instance.display())))?;
    let protocol: Protocol = input("--protocol", a.protocol.parse())?;
    let adversary: AdversarySpec = input("--adversary", a.adversary.parse())?;
    let params = Params::new(a.eps, a.beta).with_eta(a.eta).with_alpha(a.alpha);
    input("parameters", params.validate())?;
    let mut cfg = TrialConfig::new(protocol, params, adversary);
    cfg.delta = a.delta;
    cfg.offload = a.offload;
    cfg.timing = a.timing;
    let records = run_trials(&inst, &cfg, a.seed, a.trials);

    let agg = Aggregate::of(&records);
    let csv = format!("{}\n{}\n", Aggregate::HEADER, agg.csv_row());
    match &a.out {
        Some(path) => {
            let mut w = create(path)?;
            for r in &records {
                writeln!(w, "{}", r.to_json()).map_err(io)?;
            }
            w.flush().map_err(io)?;
            input("csv", fs::write(path.with_extension("csv"), csv))?;
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            for r in &records {
                writeln!(w, "{}", r.to_json()).map_err(io)?;
            }
            w.flush().map_err(io)?;
            eprint!("{csv}");
        }
    }
    match records.iter().find_map(|r| r.fault.as_ref().map(|f| (r.seed, f))) {
        Some((seed, f)) => Err(Fault::Protocol(format!("seed {seed}: {f} ({} of {} runs faulted)", agg.faults, agg.trials))),
        None => Ok(()),
    }
}

fn cmd_generate(a: GenArgs) -> Result<(), Fault> {
    let kind: Kind = input("--kind", a.kind.parse())?;
    let mut spec = GenSpec::new(kind, a.dim, a.seed);
    spec.alpha = a.alpha;
    spec.eta = a.eta;
    spec.j = a.j;
    spec.range = a.range;
    spec.pmf = match a.pmf {
        PmfArg::Uniform => PmfKind::Uniform,
        PmfArg::Skewed => PmfKind::Skewed,
    };
    let (inst, side) = generate(&spec).map_err(|e| Fault::Protocol(e.to_string()))?;
    let text = write_instance(&inst)?;
    let side = serde_json::to_string_pretty(&side).expect("sidecar serializes");
    match &a.out {
        Some(path) => {
            input("--out", fs::write(path, text))?;
            let sidecar = a.sidecar.clone().unwrap_or_else(|| path.with_extension("json"));
            input("--sidecar", fs::write(sidecar, side + "\n"))?;
        }
        None => {
            print!("{text}");
            if let Some(p) = &a.sidecar {
                input("--sidecar", fs::write(p, side + "\n"))?;
            }
        }
    }
    Ok(())
}

fn cmd_sat(a: SatArgs) -> Result<(), Fault> {
    let phi = Cnf::parse_dimacs(&read(&a.formula)?).map_err(|e| Fault::Input(format!("{}: {e}", a.formula.display())))?;
    let cfg = SatDemo { a: a.a, eps: a.eps, beta: a.beta };
    let mut w = BufWriter::new(io::stdout().lock());
    for seed in a.seed..a.seed + a.trials {
        let d = sat_demo(&phi, &cfg, seed)?;
        let line = json!({ "seed": seed, "accept": d.accept, "agreements": d.agreements, "a": d.a });
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Generate(a) => cmd_generate(a),
        Cmd::SatDemo(a) => cmd_sat(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fault::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Fault::Protocol(msg)) => {
            eprintln!("protocol fault: {msg}");
            ExitCode::from(3)
        }
    }
}
