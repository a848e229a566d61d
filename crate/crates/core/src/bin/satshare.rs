use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use satshare::consensus::dump_trace;
use satshare::ledger::dump::dump_chain;
use satshare::sim::{
    audit_chain, fig4_csv, fig5_csv, run_scenario, sweep_fig4, sweep_fig5, ConfigError,
    ScenarioConfig, SimError,
};

#[derive(Parser)]
#[command(
    name = "satshare",
    version,
    about = "Satellite spectrum-sharing market and ledger simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML, or JSON with a .json extension)
    config: PathBuf,
    /// Override the scenario seed
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for output files; defaults to experiment.output, else stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV field delimiter
    #[arg(long, default_value_t = ',')]
    csv_delim: char,
}

#[derive(Subcommand)]
enum Command {
    /// Run every epoch of a scenario
    Run(Common),
    /// Optimal price over the gamma x bandwidth grid
    SweepFig4(Common),
    /// Satellite profit over the price x omega grid
    SweepFig5(Common),
    /// Check a chain dump
    Audit {
        dump: PathBuf,
        /// Scenario the chain came from; enables signature and balance checks
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Parse and validate a scenario without running it
    Validate { config: PathBuf },
}

enum Failure {
    Config(String),
    Sim(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(c) => Failure::Config(c.to_string()),
            other => Failure::Sim(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Sim(format!("{}: {e}", path.display()))
}

fn load(common: &Common) -> Result<ScenarioConfig, Failure> {
    let mut cfg = ScenarioConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn out_dir(common: &Common, cfg: &ScenarioConfig) -> Result<Option<PathBuf>, Failure> {
    let dir = common
        .out
        .clone()
        .or_else(|| cfg.experiment.output.as_ref().map(PathBuf::from));
    if let Some(d) = &dir {
        fs::create_dir_all(d).map_err(|e| io_err(d, e))?;
    }
    Ok(dir)
}

fn emit(dir: &Option<PathBuf>, name: &str, body: &str) -> Result<(), Failure> {
    match dir {
        Some(d) => {
            let path = d.join(name);
            fs::write(&path, body).map_err(|e| io_err(&path, e))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn run(common: &Common) -> Result<(), Failure> {
    let cfg = load(common)?;
    let report = run_scenario(&cfg)?;
    let json = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
    let dir = out_dir(common, &cfg)?;
    if dir.is_some() {
        emit(&dir, "report.json", &json)?;
        emit(&dir, "chain.tsv", &dump_chain(&report.chain))?;
        emit(&dir, "trace.tsv", &dump_trace(&report.trace))?;
        emit(
            &dir,
            "reputation.csv",
            &report.table.to_csv(common.csv_delim),
        )?;
        emit(&dir, "epochs.csv", &report.epochs_csv(common.csv_delim))?;
        println!(
            "height {} tip {} trace {}",
            report.chain_height, report.tip_hash, report.trace_hash
        );
    } else {
        print!("{json}");
    }
    Ok(())
}

fn fig4(common: &Common) -> Result<(), Failure> {
    let cfg = load(common)?;
    cfg.validate()?;
    let e = &cfg.experiment;
    let rows = sweep_fig4(
        &cfg.market,
        cfg.pricing.range(),
        cfg.pricing.grid,
        &e.gamma_grid,
        &e.bandwidth_grid,
    )
    .map_err(|e| Failure::Sim(e.to_string()))?;
    emit(
        &out_dir(common, &cfg)?,
        "fig4.csv",
        &fig4_csv(&rows, common.csv_delim),
    )
}

fn fig5(common: &Common) -> Result<(), Failure> {
    let cfg = load(common)?;
    cfg.validate()?;
    let e = &cfg.experiment;
    let rows = sweep_fig5(&cfg.market, &e.pi_grid, &e.omega_grid)
        .map_err(|e| Failure::Sim(e.to_string()))?;
    emit(
        &out_dir(common, &cfg)?,
        "fig5.csv",
        &fig5_csv(&rows, common.csv_delim),
    )
}

fn audit(dump: &Path, config: Option<&Path>) -> Result<(), Failure> {
    let cfg = config.map(ScenarioConfig::load).transpose()?;
    let text = fs::read_to_string(dump).map_err(|e| io_err(dump, e))?;
    let verdict = audit_chain(&text, cfg.as_ref())
        .map_err(|e| Failure::Sim(format!("{}: {e}", dump.display())))?;
    println!(
        "{}",
        serde_json::to_string(&verdict).expect("verdict serialises")
    );
    if verdict.is_valid() {
        Ok(())
    } else {
        Err(Failure::Sim("chain is invalid".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(c) => run(c),
        Command::SweepFig4(c) => fig4(c),
        Command::SweepFig5(c) => fig5(c),
        Command::Audit { dump, config } => audit(dump, config.as_deref()),
        Command::Validate { config } => ScenarioConfig::load(config)
            .map(|_| println!("ok"))
            .map_err(Failure::from),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Sim(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
