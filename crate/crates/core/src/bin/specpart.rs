use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use specpart::operator::Potential;
use specpart::scenario::{error_json, exit_code, run, sweep, ExampleConfig, Mode, Report, RunOutput, ScenarioConfig, SweepAxis};
use specpart::{Error, PNorm, Result};

/// Spectral minimal partitions of truncated domains.
#[derive(Parser)]
#[command(name = "specpart", version)]
struct Cli {
    /// Scenario file (TOML, or JSON by extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for report.json and artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Eigensolver tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// File whose [domain] and [potential] tables define the problem.
    #[arg(long)]
    domain: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    /// Number >= 1 or "inf".
    #[arg(long)]
    p: Option<PNorm>,
    /// Bound states of the half-strip example.
    #[arg(long)]
    m: Option<usize>,
    /// Radius of a radial step.
    #[arg(long)]
    r: Option<f64>,
    /// Height of a step potential.
    #[arg(long)]
    c: Option<f64>,
}

#[derive(Subcommand)]
enum Verb {
    /// Optimise a k-partition.
    Solve(Overrides),
    /// Compare the optimal energy with the threshold value.
    Threshold(Overrides),
    /// Persson sweep and Sigma estimate.
    Persson(Overrides),
    /// Ring construction below Sigma + eps.
    Ring(Overrides),
    /// Localisation error of the cutoff splitting.
    Ims(Overrides),
    /// Run a named scenario; `--print` shows its annotated config instead.
    Example {
        name: String,
        #[arg(long)]
        print: bool,
        #[command(flatten)]
        over: Overrides,
    },
    /// One solve per value along an axis; writes a CSV table.
    Sweep {
        /// window | p | k | h
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated values; "inf" allowed for p.
        #[arg(long, value_delimiter = ',')]
        values: Vec<PNorm>,
        #[command(flatten)]
        over: Overrides,
    },
}

fn load(cli: &Cli, over: &Overrides, mode: Mode) -> Result<ScenarioConfig> {
    let mut config = match (&cli.config, &over.domain) {
        (Some(path), _) => ScenarioConfig::load(path)?,
        (None, Some(path)) => from_domain_file(path, mode)?,
        (None, None) => return Err(Error::InvalidConfig("give --config or --domain".into())),
    };
    config.mode = mode;
    apply(cli, over, &mut config);
    config.validate()?;
    Ok(config)
}

/// A scenario from a file that may hold only the problem tables.
fn from_domain_file(path: &Path, mode: Mode) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut table: toml::Table = toml::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    table.entry("mode").or_insert_with(|| toml::Value::String(mode.name().into()));
    if mode != Mode::Example {
        table.remove("example");
    }
    table.try_into().map_err(|e: toml::de::Error| Error::InvalidConfig(e.to_string()))
}

fn apply(cli: &Cli, over: &Overrides, config: &mut ScenarioConfig) {
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(t) = cli.tol {
        config.tol = t;
    }
    if let Some(dir) = &cli.out {
        config.out = Some(dir.clone());
    }
    if let Some(k) = over.k {
        config.k = k;
    }
    if let Some(p) = over.p {
        config.p = p;
    }
    if let Some(m) = over.m {
        config.example.get_or_insert_with(|| ExampleConfig::named("halfstrip")).m = Some(m);
    }
    match &mut config.potential {
        Potential::RadialStep { r, c } => {
            *r = over.r.unwrap_or(*r);
            *c = over.c.unwrap_or(*c);
        }
        Potential::AxialStep { c, .. } => *c = over.c.unwrap_or(*c),
        _ => {}
    }
}

fn execute(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    }
    let (over, mode) = match &cli.verb {
        Verb::Solve(o) => (o, Mode::Solve),
        Verb::Threshold(o) => (o, Mode::Threshold),
        Verb::Persson(o) => (o, Mode::Persson),
        Verb::Ring(o) => (o, Mode::Ring),
        Verb::Ims(o) => (o, Mode::Ims),
        Verb::Example { name, print, over } => {
            if *print {
                print!("{}", ScenarioConfig::sample(name)?);
                return Ok(());
            }
            let mut config = match &cli.config {
                Some(path) => ScenarioConfig::load(path)?,
                None => ScenarioConfig::named(name)?,
            };
            config.mode = Mode::Example;
            config.example.get_or_insert_with(|| ExampleConfig::named(name)).name = name.clone();
            apply(cli, over, &mut config);
            config.validate()?;
            return emit(run(&config)?);
        }
        Verb::Sweep { axis, values, over } => {
            let config = load(cli, over, Mode::Solve)?;
            let values: Vec<f64> = values.iter().map(|p| p.value()).collect();
            let table = sweep(&config, *axis, &values)?;
            let csv = table.to_csv();
            let report = Report::new(&config, "sweep", serde_json::to_value(&table)?)?;
            if let Some(dir) = &config.out {
                let out = RunOutput { report, artifacts: vec![specpart::scenario::Artifact::text("sweep.csv", csv.clone())] };
                out.write(dir)?;
            }
            print!("{csv}");
            return Ok(());
        }
    };
    let config = load(cli, over, mode)?;
    emit(run(&config)?)
}

fn emit(out: RunOutput) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(&out.report)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let json = error_json(&e);
            eprintln!("{json}");
            if let Some(dir) = &cli.out {
                let _ = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(dir.join("error.json"), json.to_string() + "\n"));
            }
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
