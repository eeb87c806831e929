//! `esmix`: run seeded evolution-strategy experiments, verify the
//! statistical properties of the mixing layer, sweep hyperparameter grids,
//! and re-aggregate run outputs into a reuse table.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 invalid
//! config, 4 output conflict (refusing to overwrite existing run files),
//! 5 io/data error.

mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use esmix_core::experiment::{
    aggregate, records_from_csv, records_to_csv, run_one, ConfigError, ExperimentConfig,
    GenerationRecord, MixingMode, RunSummary, SeedsSpec,
};

const EXIT_VERIFY: u8 = 1;
const EXIT_CONFIG: u8 = 3;
const EXIT_CONFLICT: u8 = 4;
const EXIT_IO: u8 = 5;

#[derive(Parser)]
#[command(name = "esmix", version, about = "Evolution strategies with importance-mixing sample reuse")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Experiment config file (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Override the number of seeds (runs seeds 0..N)
    #[arg(long)]
    seeds: Option<u64>,
    /// Output directory (overrides the config's output_dir; default `runs`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the mixing mode
    #[arg(long, value_parser = parse_mixing)]
    mixing: Option<MixingMode>,
    /// Override the archive depth K for extended mixing
    #[arg(long)]
    archive_k: Option<usize>,
    /// Size of the rollout thread pool (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a config: one CSV per seed plus summary.json
    Run(RunArgs),
    /// Check the statistical properties of the mixing layer
    Verify {
        /// Seed for the verification suite
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a grid over population size, initial sigma, and learning rate
    Sweep {
        #[command(flatten)]
        base: RunArgs,
        /// Population sizes to sweep
        #[arg(long, value_delimiter = ',', default_value = "20,50,100")]
        populations: Vec<usize>,
        /// Initial sigma values to sweep
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.25,0.5")]
        sigmas: Vec<f64>,
        /// Learning rates to sweep
        #[arg(long, value_delimiter = ',', default_value = "0.005,0.01,0.05")]
        learning_rates: Vec<f64>,
    },
    /// Aggregate existing per-seed CSVs into reuse_table.csv
    Report {
        /// Directory containing `<name>-seed<k>.csv` files
        #[arg(long)]
        dir: PathBuf,
    },
}

fn parse_mixing(s: &str) -> Result<MixingMode, String> {
    match s {
        "none" => Ok(MixingMode::None),
        "im" => Ok(MixingMode::Im),
        "eim" => Ok(MixingMode::Eim),
        other => Err(format!("unknown mixing mode `{other}` (expected none, im, or eim)")),
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let code = match e {
            ConfigError::Io(_) => EXIT_IO,
            _ => EXIT_CONFIG,
        };
        Failure::new(code, format!("{e}"))
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_IO, format!("io error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Verify { seed } => cmd_verify(seed),
        Command::Sweep { base, populations, sigmas, learning_rates } => {
            cmd_sweep(base, &populations, &sigmas, &learning_rates)
        }
        Command::Report { dir } => cmd_report(&dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut config = ExperimentConfig::from_toml_file(&args.config)?;
    if let Some(n) = args.seeds {
        config.seeds = SeedsSpec::Count(n);
    }
    if let Some(mode) = args.mixing {
        config.mixing = mode;
    }
    if let Some(k) = args.archive_k {
        config.archive_k = k;
    }
    if let Some(out) = &args.out {
        config.output_dir = Some(out.display().to_string());
    }
    config.validate()?;
    if let Some(threads) = args.threads {
        // ignore the error if a global pool already exists (tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(config)
}

fn out_dir(config: &ExperimentConfig) -> PathBuf {
    config.output_dir.as_deref().unwrap_or("runs").into()
}

fn run_prefix(config: &ExperimentConfig) -> String {
    format!("{}-{}-{}", config.env, config.algorithm, config.mixing)
}

/// Execute every seed of the config and write one CSV per seed. Returns the
/// per-seed records along with the file names written.
fn execute(
    config: &ExperimentConfig,
    dir: &Path,
) -> Result<(Vec<String>, Vec<Vec<GenerationRecord>>), Failure> {
    std::fs::create_dir_all(dir)?;
    let prefix = run_prefix(config);
    let seeds = config.seeds.seeds();
    let files: Vec<String> =
        seeds.iter().map(|seed| format!("{prefix}-seed{seed}.csv")).collect();
    for file in &files {
        let path = dir.join(file);
        if path.exists() {
            return Err(Failure::new(
                EXIT_CONFLICT,
                format!(
                    "refusing to overwrite existing run file {}; move it away or choose another --out",
                    path.display()
                ),
            ));
        }
    }
    let mut runs = Vec::with_capacity(seeds.len());
    for (seed, file) in seeds.iter().zip(&files) {
        let records = run_one(config, *seed)
            .map_err(|e| Failure::new(EXIT_CONFIG, format!("run failed: {e}")))?;
        std::fs::write(dir.join(file), records_to_csv(&records))?;
        runs.push(records);
    }
    Ok((files, runs))
}

#[derive(serde::Serialize)]
struct RunReport<'a> {
    config: &'a ExperimentConfig,
    files: &'a [String],
    /// present when the config has at least two seeds
    summary: Option<RunSummary>,
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let config = load_config(&args)?;
    let dir = out_dir(&config);
    let (files, runs) = execute(&config, &dir)?;
    let summary = if runs.len() >= 2 {
        Some(aggregate(&runs).map_err(|e| Failure::new(EXIT_IO, format!("aggregate: {e}")))?)
    } else {
        None
    };
    let report = RunReport { config: &config, files: &files, summary };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Failure::new(EXIT_IO, format!("serialize summary: {e}")))?;
    std::fs::write(dir.join("summary.json"), json)?;
    println!("wrote {} run file(s) and summary.json to {}", files.len(), dir.display());
    Ok(())
}

fn cmd_verify(seed: u64) -> Result<(), Failure> {
    let outcomes = verify::run_suite(seed);
    let mut failed = 0;
    for outcome in &outcomes {
        let tag = if outcome.passed { "ok  " } else { "FAIL" };
        println!("{tag} {} — {}", outcome.name, outcome.detail);
        if !outcome.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        Err(Failure::new(EXIT_VERIFY, format!("{failed}/{} properties failed", outcomes.len())))
    } else {
        println!("all {} properties passed", outcomes.len());
        Ok(())
    }
}

fn cmd_sweep(
    base: RunArgs,
    populations: &[usize],
    sigmas: &[f64],
    learning_rates: &[f64],
) -> Result<(), Failure> {
    let config = load_config(&base)?;
    let dir = out_dir(&config);
    std::fs::create_dir_all(&dir)?;
    let table = dir.join("sweep_table.csv");
    if table.exists() {
        return Err(Failure::new(
            EXIT_CONFLICT,
            format!("refusing to overwrite existing {}", table.display()),
        ));
    }
    let mut rows =
        String::from("population,sigma_init,learning_rate,final_mean_fitness,total_evals,total_reuse_pct\n");
    for &population in populations {
        for &sigma in sigmas {
            for &lr in learning_rates {
                let mut cell = config.clone();
                cell.population = population;
                cell.sigma_init = sigma;
                cell.learning_rate = lr;
                cell.validate()?;
                let runs: Vec<_> = cell
                    .seeds
                    .seeds()
                    .iter()
                    .map(|&seed| run_one(&cell, seed))
                    .collect::<Result<_, _>>()
                    .map_err(|e| Failure::new(EXIT_CONFIG, format!("run failed: {e}")))?;
                let summary = aggregate(&runs)
                    .map_err(|e| Failure::new(EXIT_CONFIG, format!("aggregate: {e}")))?;
                let cell_file = dir.join(format!("sweep-pop{population}-sigma{sigma}-lr{lr}.json"));
                let json = serde_json::to_string_pretty(&summary)
                    .map_err(|e| Failure::new(EXIT_IO, format!("serialize: {e}")))?;
                std::fs::write(&cell_file, json)?;
                rows.push_str(&format!(
                    "{},{},{},{},{},{:.4}\n",
                    population,
                    sigma,
                    lr,
                    summary.mean_fitness.last().copied().unwrap_or(f64::NAN),
                    summary.total_evals,
                    summary.total_reuse_pct
                ));
                println!(
                    "pop {population} sigma {sigma} lr {lr}: final mean {:.1}, reuse {:.1}%",
                    summary.mean_fitness.last().copied().unwrap_or(f64::NAN),
                    summary.total_reuse_pct
                );
            }
        }
    }
    std::fs::write(&table, rows)?;
    println!("wrote {}", table.display());
    Ok(())
}

fn cmd_report(dir: &Path) -> Result<(), Failure> {
    // group `<name>-seed<k>.csv` files by `<name>` and compute the reuse
    // totals per group
    let mut groups: std::collections::BTreeMap<String, Vec<PathBuf>> = Default::default();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
        if !name.ends_with(".csv") {
            continue;
        }
        let Some(pos) = name.rfind("-seed") else { continue };
        groups.entry(name[..pos].to_string()).or_default().push(path.clone());
    }
    if groups.is_empty() {
        return Err(Failure::new(
            EXIT_IO,
            format!("no `<name>-seed<k>.csv` run files found in {}", dir.display()),
        ));
    }
    let mut out = String::from("run,total_reuse_pct,from_im_pct,from_eim_pct\n");
    for (name, files) in &groups {
        let mut samples = 0u64;
        let mut reused = 0u64;
        let mut from_im = 0u64;
        let mut from_eim = 0u64;
        for file in files {
            let text = std::fs::read_to_string(file)?;
            let records = records_from_csv(&text)
                .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", file.display())))?;
            for r in &records {
                samples += (r.reused_total + r.fresh) as u64;
                reused += r.reused_total as u64;
                from_im += r.reused_im as u64;
                from_eim += r.reused_eim as u64;
            }
        }
        let pct = |num: u64, den: u64| if den == 0 { 0.0 } else { 100.0 * num as f64 / den as f64 };
        out.push_str(&format!(
            "{name},{:.4},{:.4},{:.4}\n",
            pct(reused, samples),
            pct(from_im, reused),
            pct(from_eim, reused)
        ));
    }
    let table = dir.join("reuse_table.csv");
    std::fs::write(&table, &out)?;
    print!("{out}");
    println!("wrote {}", table.display());
    Ok(())
}
