use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use risudn::harness::sweep::{read_csv, read_json_lines};
use risudn::harness::{compare_report, preset, run_sweep, Engine, OutputFormat, SweepConfig, Tolerances, PRESET_NAMES};
use risudn::montecarlo::Simulator;
use risudn::Error;

#[derive(Parser)]
#[command(name = "risudn", version, about = "Monte Carlo and analytic evaluation of RIS-assisted ultra-dense networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the simulator over the configured grid.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Also write every drop as JSON lines to this file.
        #[arg(long)]
        drop_log: Option<PathBuf>,
    },
    /// Evaluate the analytic expressions over the configured grid.
    Analyze(RunArgs),
    /// Run the engines selected by `--engine` (both by default).
    Sweep(RunArgs),
    /// Compare the simulated and analytic columns of a results file.
    Compare {
        /// CSV or JSON-lines file written by `sweep`.
        input: PathBuf,
        /// Write the report as JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        coverage_tol: f64,
        #[arg(long, default_value_t = 0.10)]
        ase_tol: f64,
        #[arg(long, default_value_t = 0.10)]
        power_tol: f64,
    },
    /// Run a built-in figure preset.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
        name: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Sim,
    Analytic,
    Both,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Drops per grid point.
    #[arg(long)]
    drops: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    /// Approximate cascade sampling, thinned activity and looser quadrature.
    #[arg(long)]
    fast: bool,
    #[arg(long)]
    workers: Option<usize>,
}

enum Failure {
    /// Rows with engine errors, or a failed comparison.
    Failed,
    Config(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl RunArgs {
    fn resolve(&self, base: Option<SweepConfig>, engine: Option<Engine>) -> Result<SweepConfig, Failure> {
        let mut cfg = match (&self.config, base) {
            (Some(path), _) => SweepConfig::read(path)?,
            (None, Some(b)) => b,
            (None, None) => SweepConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(d) = self.drops {
            cfg.drops = d;
        }
        if let Some(p) = &self.out {
            cfg.output.path = Some(p.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = match f {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            };
        }
        if let Some(e) = self.engine {
            cfg.engine = match e {
                EngineArg::Sim => Engine::Sim,
                EngineArg::Analytic => Engine::Analytic,
                EngineArg::Both => Engine::Both,
            };
        }
        if let Some(e) = engine {
            cfg.engine = e;
        }
        cfg.fast |= self.fast;
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn execute(cfg: &SweepConfig) -> Result<(), Failure> {
    let start = Instant::now();
    let out = run_sweep(cfg)?;
    let mut w = open_output(cfg.output.path.as_deref())?;
    out.write(cfg.output.format, &mut w)?;
    w.flush().map_err(|e| Failure::Config(e.to_string()))?;
    let failed = out.failed_rows();
    eprintln!("{}: {} rows, {} failed, {:.1} s", cfg.name, out.rows.len(), failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        return Err(Failure::Failed);
    }
    Ok(())
}

fn write_drop_log(cfg: &SweepConfig, path: &Path) -> Result<(), Failure> {
    let mut w = open_output(Some(path))?;
    let opts = cfg.sim_options();
    for p in cfg.points() {
        let sim = Simulator::new(p.scenario, opts)?;
        for (k, d) in sim.run(cfg.drops)?.iter().enumerate() {
            let line = serde_json::json!({ "point": p.index, "drop": k, "result": d });
            writeln!(w, "{line}").map_err(|e| Failure::Config(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| Failure::Config(e.to_string()))
}

fn compare(input: &Path, out: Option<&Path>, tol: Tolerances) -> Result<bool, Failure> {
    let file = File::open(input).map_err(|e| Failure::Config(format!("{}: {e}", input.display())))?;
    let is_json = input.extension().is_some_and(|e| e == "json" || e == "jsonl");
    let rows = if is_json { read_json_lines(file)? } else { read_csv(file)? };
    let report = compare_report(&rows, &tol)?;
    print!("{}", report.render_text());
    if let Some(p) = out {
        std::fs::write(p, report.to_json()).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
    }
    Ok(report.pass)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate { run, drop_log } => {
            let cfg = run.resolve(None, Some(Engine::Sim))?;
            execute(&cfg)?;
            if let Some(p) = drop_log {
                write_drop_log(&cfg, &p)?;
            }
            Ok(())
        }
        Command::Analyze(run) => execute(&run.resolve(None, Some(Engine::Analytic))?),
        Command::Sweep(run) => execute(&run.resolve(None, None)?),
        Command::Preset { name, run } => execute(&run.resolve(Some(preset(&name)?), None)?),
        Command::Compare { input, out, coverage_tol, ase_tol, power_tol } => {
            let tol = Tolerances { coverage: coverage_tol, ase: ase_tol, signal: power_tol, interference: power_tol };
            if compare(&input, out.as_deref(), tol)? {
                Ok(())
            } else {
                Err(Failure::Failed)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Failed) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
