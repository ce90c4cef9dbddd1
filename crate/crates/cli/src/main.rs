//! `fpl`: run phase-diagram sweeps of the driven Ising chain and check
//! their outputs.
//!
//! Exit status is 0 on success, 2 when some grid cells failed and 1 on
//! configuration or runtime errors (and failed acceptance checks).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fpl_core::harness::{
    check_acceptance, emit, preflight, run_sweep, Evidence, ExperimentConfig, Recipe, SweepOptions, Verdict,
};
use fpl_core::Error;

#[derive(Parser)]
#[command(name = "fpl", version, about = "Floquet phase-diagram sweeps of a driven disordered Ising chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep and write its artifacts.
    Sweep {
        /// TOML configuration. With --recipe, keys in the file override the recipe.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Built-in recipe: fig2, fig3, fig4, fig5-entropy or fig6-digital.
        #[arg(long)]
        recipe: Option<Recipe>,
        /// Output directory; defaults to output.directory of the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads.
        #[arg(long, env = "FPL_THREADS")]
        threads: Option<usize>,
        /// Reuse cells finished by an earlier run of the same config.
        #[arg(long)]
        resume: bool,
    },
    /// Check emitted artifacts.
    Analyze {
        /// Sweep output directory; repeat to pool several runs.
        #[arg(long = "in", required = true)]
        input: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Check::Acceptance)]
        check: Check,
    },
    /// Print the configuration of a built-in recipe as TOML.
    Recipe { name: Recipe },
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Acceptance,
}

const EXIT_ERROR: u8 = 1;
const EXIT_PARTIAL: u8 = 2;

fn load_config(path: Option<&PathBuf>, recipe: Option<Recipe>) -> Result<ExperimentConfig, Error> {
    match (path, recipe) {
        (Some(p), None) => ExperimentConfig::load(p),
        (Some(p), Some(r)) => ExperimentConfig::overlay(&r.config(), &std::fs::read_to_string(p)?),
        (None, Some(r)) => Ok(r.config()),
        (None, None) => Err(Error::Config("give --config, --recipe or both".into())),
    }
}

fn sweep(
    config: Option<PathBuf>,
    recipe: Option<Recipe>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    resume: bool,
) -> Result<u8, Error> {
    let config = load_config(config.as_ref(), recipe)?;
    let out = out.unwrap_or_else(|| config.output.directory.clone());
    preflight(&out)?;
    eprintln!(
        "sweeping {} cells x {} realizations at L = {} into {}",
        config.n_cells(),
        config.protocol.realizations,
        config.model.n_sites,
        out.display()
    );
    let options = SweepOptions {
        threads,
        resume,
        cache_root: Some(out.join(".cache")),
    };
    let result = run_sweep(&config, &options)?;
    let written = emit(&result, &out)?;
    eprintln!("wrote {} files", written.len());
    let failed = result.failed_cells();
    if failed.is_empty() {
        return Ok(0);
    }
    for cell in result.cells.iter().filter(|c| c.failed()) {
        eprintln!(
            "cell {} (W = {}, omega = {}) failed: {}",
            cell.index,
            cell.w,
            cell.omega,
            cell.failure.as_deref().unwrap_or_default()
        );
    }
    eprintln!("{} of {} cells failed", failed.len(), result.cells.len());
    Ok(EXIT_PARTIAL)
}

fn analyze(input: &[PathBuf]) -> Result<u8, Error> {
    let evidence = Evidence::load_all(input)?;
    let outcomes = check_acceptance(&evidence);
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| o.verdict == Verdict::Fail).count();
    Ok(if failed > 0 { EXIT_ERROR } else { 0 })
}

fn main() -> ExitCode {
    // usage errors count as configuration errors, keeping 2 for failed cells
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    let status = match cli.command {
        Command::Sweep {
            config,
            recipe,
            out,
            threads,
            resume,
        } => sweep(config, recipe, out, threads, resume),
        Command::Analyze { input, check: Check::Acceptance } => analyze(&input),
        Command::Recipe { name } => name.config().to_toml().map(|text| {
            print!("{text}");
            0
        }),
    };
    match status {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
