//! Command-line front end: classify (a, b) pairs, simulate ratio fields,
//! run verification suites, and check the characterization theorems.
//!
//! Exit codes: 0 when every check passes, 1 when at least one check
//! fails, 2 on usage or configuration errors.

mod config;
mod output;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use betagamma::distributions::AffineLaw;
use betagamma::lattice::{interior_ratio_samples, simulate_field};
use betagamma::models::{
    classify, perturb_triple, stationary_triple, ModelClass, ShapeParam, StationaryTriple,
    TripleSlot,
};
use betagamma::stats::Characterization;
use betagamma::tolerances::TEST_LEVEL;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use config::{config_hash, ConfigError, ConfigResult, FileConfig, ModelArgs};
use output::{render_json_lines, render_table, write_atomic, Provenance};
use suites::{Suite, SuiteCtx};

#[derive(Parser)]
#[command(
    name = "betagamma",
    version,
    about = "Stationary beta-gamma polymer models: classify, simulate, verify"
)]
struct Cli {
    /// JSON config file; explicit flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an (a, b) pair and print the resolved stationary triple.
    Classify(ClassifyArgs),
    /// Simulate a ratio field (JSON) or replica site samples (CSV).
    Simulate(SimulateArgs),
    /// Run verification suites; exit 0 iff every report passes.
    Verify(VerifyArgs),
    /// Check one of the gamma/beta characterization theorems.
    Characterize(CharacterizeArgs),
}

#[derive(clap::Args)]
struct ClassifyArgs {
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Horizontal extent.
    #[arg(short, long)]
    m: Option<usize>,
    /// Vertical extent.
    #[arg(short, long)]
    n: Option<usize>,
    /// Interior site "i,j" for replica ratio samples (CSV mode).
    #[arg(long, value_delimiter = ',')]
    site: Option<Vec<usize>>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Which suite to run.
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    #[arg(long)]
    seed: Option<u64>,
    /// Test level for the Monte Carlo checks.
    #[arg(long)]
    level: Option<f64>,
    /// Sample count for distributional suites.
    #[arg(long)]
    samples: Option<usize>,
    /// Replica count for the stationarity suite.
    #[arg(long)]
    replicas: Option<usize>,
    /// Point-plan size for the deterministic suites.
    #[arg(long)]
    points: Option<usize>,
    /// Negative control, e.g. "mu=+0.3", "lambda=*1.25", "beta=-0.2".
    /// mu targets the Y law's first shape, lambda the R2 law's first
    /// shape, beta the R1 law's second shape.
    #[arg(long)]
    perturb: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Stdout rendering: summary table or JSON lines.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(clap::Args)]
struct CharacterizeArgs {
    /// Which theorem to check.
    #[arg(long, value_enum)]
    which: TheoremArg,
    /// Three comma-separated positive parameters of the hypothesis laws.
    #[arg(long, value_delimiter = ',')]
    params: Option<Vec<f64>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    level: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Stdout rendering: summary table or JSON lines.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

/// Flag, then file, then the table default.
fn resolve_format(flag: Option<Format>, file: &FileConfig) -> ConfigResult<Format> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match file.format.as_deref() {
        None => Ok(Format::Table),
        Some("table") => Ok(Format::Table),
        Some("json") => Ok(Format::Json),
        Some(other) => Err(ConfigError(format!(
            "unknown format {other:?} (expected table or json)"
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TheoremArg {
    Lukacs,
    LukacsCorollary,
    SeshadriWesolowski,
}

impl From<TheoremArg> for Characterization {
    fn from(t: TheoremArg) -> Self {
        match t {
            TheoremArg::Lukacs => Characterization::Lukacs,
            TheoremArg::LukacsCorollary => Characterization::LukacsCorollary,
            TheoremArg::SeshadriWesolowski => Characterization::SeshadriWesolowski,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match FileConfig::load(cli.config.as_deref()) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match &cli.command {
        Command::Classify(args) => cmd_classify(args, &file),
        Command::Simulate(args) => cmd_simulate(args, &file),
        Command::Verify(args) => cmd_verify(args, &file),
        Command::Characterize(args) => cmd_characterize(args, &file),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}

fn describe(class: ModelClass) -> String {
    match class.basic() {
        Some(basic) => format!("{} ({})", class.tag(), basic.name()),
        None => "invalid: not allowed region".to_string(),
    }
}

fn law_line(label: &str, law: &AffineLaw) -> String {
    let base = format!(
        "{:?}({}, {})",
        law.base.family, law.base.shape1, law.base.shape2
    );
    let mut s = format!("{label} ~ ");
    if law.scale != 1.0 {
        s.push_str(&format!("{} × ", law.scale));
    }
    s.push_str(&base);
    if law.shift != 0.0 {
        s.push_str(&format!(" + {}", law.shift));
    }
    s
}

fn cmd_classify(args: &ClassifyArgs, file: &FileConfig) -> ConfigResult<bool> {
    // Raw (a, b) classification first: the invalid region is an answer,
    // not an error.
    if let (Some(a), Some(b)) = (args.model.a, args.model.b) {
        if classify(a, b) == ModelClass::Invalid {
            println!("invalid: not allowed region");
            return Ok(true);
        }
    }
    let spec = args.model.resolve(file.model.as_ref())?;
    let triple = stationary_triple(&spec)?;
    println!("{}", describe(spec.classify()));
    println!("h(y) = {} + {}·y", spec.a, spec.b);
    println!("{}", law_line("R1", &triple.r1));
    println!("{}", law_line("R2", &triple.r2));
    println!("{}", law_line("Y ", &triple.y));
    Ok(true)
}

fn cmd_simulate(args: &SimulateArgs, file: &FileConfig) -> ConfigResult<bool> {
    let spec = args.model.resolve(file.model.as_ref())?;
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let grid = file.grid.unwrap_or([20, 20]);
    let m = args.m.unwrap_or(grid[0]);
    let n = args.n.unwrap_or(grid[1]);
    let site = match &args.site {
        Some(v) if v.len() == 2 => Some((v[0], v[1])),
        Some(v) => {
            return Err(ConfigError(format!(
                "--site needs exactly i,j (got {} values)",
                v.len()
            )))
        }
        None => file.site.map(|s| (s[0], s[1])),
    };
    let output = args.output.clone().or(file.output.clone());

    let resolved = json!({
        "model": spec, "m": m, "n": n, "site": site, "seed": seed,
        "replicas": args.replicas.or(file.replicas),
    });
    let prov = Provenance {
        command: "simulate".into(),
        seed,
        config_hash: config_hash(&resolved),
        config: resolved,
    };

    match site {
        Some(site) => {
            let replicas = args.replicas.or(file.replicas).unwrap_or(10_000);
            let samples = interior_ratio_samples(&spec, site, replicas, seed)?;
            let csv = output::samples_csv(&prov, site, &samples);
            match &output {
                Some(path) => write_atomic(path, &csv)?,
                None => print!("{csv}"),
            }
        }
        None => {
            if args.replicas.unwrap_or(1) > 1 {
                return Err(ConfigError(
                    "field snapshots are single-replica; pass --site for replica samples".into(),
                ));
            }
            let field = simulate_field(&spec, m, n, seed)?;
            let snapshot = output::field_snapshot(&prov, &field).to_string();
            match &output {
                Some(path) => write_atomic(path, &snapshot)?,
                None => println!("{snapshot}"),
            }
        }
    }
    Ok(true)
}

/// Parse "name=+0.3" / "name=-0.2" / "name=*1.25".
fn parse_perturbation(text: &str) -> ConfigResult<(TripleSlot, ShapeParam, f64, bool)> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| ConfigError(format!("perturbation {text:?} is not name=delta")))?;
    let (slot, param) = match name {
        "mu" => (TripleSlot::Y, ShapeParam::Shape1),
        "lambda" => (TripleSlot::R2, ShapeParam::Shape1),
        "beta" => (TripleSlot::R1, ShapeParam::Shape2),
        other => {
            return Err(ConfigError(format!(
                "unknown parameter {other:?} (expected mu, lambda, or beta)"
            )))
        }
    };
    let (multiplicative, number) = match value.strip_prefix('*') {
        Some(rest) => (true, rest),
        None => (false, value),
    };
    let delta: f64 = number
        .parse()
        .map_err(|e| ConfigError(format!("cannot parse delta {number:?}: {e}")))?;
    Ok((slot, param, delta, multiplicative))
}

fn perturbed(
    triple: &StationaryTriple,
    request: Option<&str>,
) -> ConfigResult<StationaryTriple> {
    match request {
        None => Ok(*triple),
        Some(text) => {
            let (slot, param, delta, multiplicative) = parse_perturbation(text)?;
            Ok(perturb_triple(triple, slot, param, delta, multiplicative)?)
        }
    }
}

fn cmd_verify(args: &VerifyArgs, file: &FileConfig) -> ConfigResult<bool> {
    let spec = args.model.resolve(file.model.as_ref())?;
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let level = args.level.or(file.level).unwrap_or(TEST_LEVEL);
    let samples = args.samples.or(file.samples).unwrap_or(100_000);
    let replicas = args.replicas.or(file.replicas).unwrap_or(100_000);
    let points = args.points.or(file.points).unwrap_or(10_000);
    let output = args.output.clone().or(file.output.clone());

    if args.perturb.is_some()
        && !matches!(args.suite, Suite::Q | Suite::Identity | Suite::Invariance)
    {
        return Err(ConfigError(
            "--perturb applies to the q, identity, and invariance suites only".into(),
        ));
    }

    let triple = stationary_triple(&spec)?;
    let ctx = SuiteCtx {
        spec,
        triple: perturbed(&triple, args.perturb.as_deref())?,
        seed,
        level,
        samples,
        replicas,
        points,
    };

    let resolved = json!({
        "model": spec, "suite": format!("{:?}", args.suite), "seed": seed,
        "level": level, "samples": samples, "replicas": replicas,
        "points": points, "perturb": args.perturb,
    });
    let prov = Provenance {
        command: "verify".into(),
        seed,
        config_hash: config_hash(&resolved),
        config: resolved,
    };

    let reports = suites::run(args.suite, &ctx)?;
    let all_pass = reports.iter().all(|r| r.pass);
    match resolve_format(args.format, file)? {
        Format::Table => print!("{}", render_table(&reports)),
        Format::Json => print!("{}", render_json_lines(&prov, &reports)),
    }
    if let Some(path) = &output {
        let envelope = prov.envelope(json!({ "reports": reports, "pass": all_pass }));
        write_atomic(path, &envelope.to_string())?;
    }
    Ok(all_pass)
}

fn cmd_characterize(args: &CharacterizeArgs, file: &FileConfig) -> ConfigResult<bool> {
    let which: Characterization = args.which.into();
    let params: [f64; 3] = match &args.params {
        Some(v) if v.len() == 3 => [v[0], v[1], v[2]],
        Some(v) => {
            return Err(ConfigError(format!(
                "--params needs exactly three values (got {})",
                v.len()
            )))
        }
        None => match which {
            Characterization::Lukacs | Characterization::LukacsCorollary => [2.0, 3.0, 1.0],
            Characterization::SeshadriWesolowski => [1.0, 1.0, 1.0],
        },
    };
    let samples = args.samples.or(file.samples).unwrap_or(100_000);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let level = args.level.or(file.level).unwrap_or(TEST_LEVEL);
    let output = args.output.clone().or(file.output.clone());

    let resolved = json!({
        "which": which.name(), "params": params, "samples": samples,
        "seed": seed, "level": level,
    });
    let prov = Provenance {
        command: "characterize".into(),
        seed,
        config_hash: config_hash(&resolved),
        config: resolved,
    };

    let reports = betagamma::stats::characterization_check(which, params, samples, seed, level)?;
    let all_pass = reports.iter().all(|r| r.pass);
    match resolve_format(args.format, file)? {
        Format::Table => print!("{}", render_table(&reports)),
        Format::Json => print!("{}", render_json_lines(&prov, &reports)),
    }
    if let Some(path) = &output {
        let envelope = prov.envelope(json!({ "reports": reports, "pass": all_pass }));
        write_atomic(path, &envelope.to_string())?;
    }
    Ok(all_pass)
}
