use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ftrl_delay::bench::{self, ConfigFile, SeedsField};

/// Run delayed-feedback bandit experiments and check the regret bounds.
#[derive(Parser, Debug)]
#[command(name = "ftrl-bench", version)]
struct Args {
    /// TOML config; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    /// simple | advanced | tsallis
    #[arg(long)]
    tuner: Option<String>,

    #[arg(long)]
    n: Option<usize>,

    #[arg(long)]
    k: Option<usize>,

    /// zero | uniform:<d> | unbalanced | file:<path>
    #[arg(long = "delay-gen")]
    delay_gen: Option<String>,

    /// Comma-separated Bernoulli loss means, one per arm.
    #[arg(long)]
    means: Option<String>,

    /// A count N (seeds 0..N) or a comma-separated list.
    #[arg(long)]
    seeds: Option<String>,

    /// Directory for per-seed CSVs and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Exit non-zero if an applicable regret bound is violated.
    #[arg(long = "check-bounds")]
    check_bounds: bool,
}

fn flags(args: &Args) -> ftrl_delay::Result<ConfigFile> {
    Ok(ConfigFile {
        n: args.n,
        k: args.k,
        tuner: args.tuner.clone(),
        delay_gen: args.delay_gen.clone(),
        means: args.means.as_deref().map(bench::parse_means).transpose()?,
        seeds: args.seeds.as_deref().map(bench::parse_seeds).transpose()?.map(SeedsField::List),
        generator: None,
        out: args.out.clone(),
        check_bounds: args.check_bounds.then_some(true),
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    match try_main(&args) {
        Ok(passed) => {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn try_main(args: &Args) -> ftrl_delay::Result<bool> {
    let base = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let config = base.merge(flags(args)?).into_config()?;
    let experiment = bench::run(&config)?;
    if let Some(dir) = &config.out_dir {
        bench::write_outputs(&experiment, dir)?;
    }
    println!("{}", bench::summary_json(&experiment.summary));
    Ok(experiment.summary.bounds.as_ref().is_none_or(|b| {
        if !b.passed() {
            eprintln!("regret bound violated: {b:?}");
        }
        b.passed()
    }))
}
