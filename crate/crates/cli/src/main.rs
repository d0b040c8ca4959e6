use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use learndim_cli::commands::{run_census, run_diagonalize};
use learndim_cli::config::{grid_from_step, parse_grid, ExperimentConfig, EVALUATION_NMAX};
use learndim_cli::exit::{CliError, CliResult, ExitStatus};
use learndim_cli::growth::run_growth;
use learndim_cli::output::{emit, Format};
use learndim_cli::scan::run_dimension_scan;
use learndim_cli::verify::{checks_table, run_verify};

#[derive(Parser)]
#[command(name = "learndim", version, about = "Gales built from learners, and their growth")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Log2 capital of a construction along a sampled class member.
    Growth(Common),
    /// Smallest grid rate at which the counting gale succeeds on samples.
    Scan {
        #[command(flatten)]
        common: Common,
        /// Comma-separated rates, e.g. `0,1/4,1/2`.
        #[arg(long, conflicts_with = "grid_step")]
        grid: Option<String>,
        /// Grid `0, step, 2 step, ..., 1`.
        #[arg(long)]
        grid_step: Option<String>,
    },
    /// Run a verification suite (`all` runs every suite).
    Verify {
        suite: String,
        #[arg(long, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a padded-class member on which a gale never gains.
    Diagonalize {
        #[command(flatten)]
        common: Common,
        /// `padded`, `fair` or `counting`.
        #[arg(long, default_value = "padded")]
        against: String,
    },
    /// List the class blocks, or a learner's good set, at one length.
    Census {
        #[command(flatten)]
        common: Common,
        /// `class`, `mq` or `pac`.
        #[arg(long, default_value = "class")]
        census_mode: String,
        #[arg(long)]
        n: u32,
        /// Example positions for `pac`, comma-separated.
        #[arg(long, value_delimiter = ',')]
        examples: Vec<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    construction: Option<String>,
    #[arg(long)]
    class: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    learner: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    nmax: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
}

impl Common {
    fn config(&self) -> CliResult<ExperimentConfig> {
        let base = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        let flags = ExperimentConfig {
            construction: self.construction.clone(),
            class: self.class.clone(),
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            learner: self.learner.clone(),
            s: self.s.clone(),
            epsilon: self.epsilon.clone(),
            delta: self.delta.clone(),
            budget: self.budget.clone(),
            nmax: self.nmax,
            seed: self.seed,
            mode: self.mode.clone(),
            samples: self.samples,
            grid: None,
            out: self.out.clone(),
        };
        let cfg = base.merged(flags);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> CliResult<ExitStatus> {
    match cli.command {
        Command::Growth(common) => {
            let cfg = common.config()?;
            let report = run_growth(&cfg)?;
            for a in &report.advisories {
                eprintln!("advisory: {a}");
            }
            emit(&report.table.render(common.format), cfg.out.as_deref())?;
            if !report.passed() {
                eprintln!("bound violated at n = {:?}", report.violations);
                return Ok(ExitStatus::InvariantFailure);
            }
        }
        Command::Scan { common, grid, grid_step } => {
            let mut cfg = common.config()?;
            if grid.is_some() {
                cfg.grid = grid;
            }
            let points = match (&cfg.grid, grid_step) {
                (_, Some(step)) => grid_from_step(&step)?,
                (Some(g), None) => parse_grid(g)?,
                (None, None) => grid_from_step("1/50")?,
            };
            let class = cfg.class()?;
            let report = run_dimension_scan(
                class.as_ref(),
                &points,
                cfg.nmax(EVALUATION_NMAX),
                cfg.seed(),
                cfg.samples.unwrap_or(8),
                cfg.sample_mode()?,
            )?;
            emit(&report.table.render(common.format), cfg.out.as_deref())?;
        }
        Command::Verify { suite, format, out } => {
            let checks = run_verify(&suite)?;
            let text = match format {
                Format::Json => checks_table(&checks).to_json(),
                Format::Csv => checks
                    .iter()
                    .map(|c| {
                        format!(
                            "{} {}/{} {}\n",
                            if c.passed { "PASS" } else { "FAIL" },
                            c.suite,
                            c.name,
                            c.detail
                        )
                    })
                    .collect(),
            };
            emit(&text, out.as_deref())?;
            if checks.iter().any(|c| !c.passed) {
                return Ok(ExitStatus::InvariantFailure);
            }
        }
        Command::Diagonalize { common, against } => {
            let cfg = common.config()?;
            let report = run_diagonalize(&cfg, &against)?;
            emit(&report.table.render(common.format), cfg.out.as_deref())?;
            if !report.passed() {
                eprintln!("diagonal language failed its checks");
                return Ok(ExitStatus::InvariantFailure);
            }
        }
        Command::Census { common, census_mode, n, examples } => {
            let cfg = common.config()?;
            let census = run_census(&cfg, &census_mode, n, &examples)?;
            let text = match common.format {
                Format::Csv => census.to_csv(),
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&serde_json::json!({
                        "n": census.n,
                        "count": census.count.to_string(),
                        "members": census.blocks.iter()
                            .map(|b| b.iter().map(|&x| if x { '1' } else { '0' }).collect::<String>())
                            .collect::<Vec<_>>(),
                    }))
                    .expect("json");
                    s.push('\n');
                    s
                }
            };
            emit(&text, cfg.out.as_deref())?;
        }
    }
    Ok(ExitStatus::Success)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { ExitStatus::Usage.code() } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let status = run(cli).unwrap_or_else(|e: CliError| {
        eprintln!("error: {e}");
        e.status
    });
    ExitCode::from(status.code() as u8)
}
