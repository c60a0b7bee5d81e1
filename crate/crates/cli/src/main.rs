use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use weylpain::flow::{integrate, IntegratorConfig, DEFAULT_THRESHOLD};
use weylpain::systems::{load_accepted, load_system, SystemName};
use weylpain::transforms::load_catalog;
use weylpain::Error;
use weylpain_cli::{
    exit_code, fixture_alpha, parse_mode, parse_systems, report_json, run, summary_line, Check, CliError,
    CliResult, RunConfig,
};

#[derive(Parser)]
#[command(name = "weylpain", version, about = "Exact checks for Painlevé-type Hamiltonian systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run check suites and report PASS/FAIL per target.
    Verify {
        #[arg(long, default_value = "all")]
        system: String,
        #[arg(long, default_value = "all")]
        check: String,
        #[arg(long, default_value = "symbolic")]
        mode: String,
        #[arg(long, default_value_t = 40)]
        samples: usize,
        #[arg(long)]
        variant: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Integrate one system numerically and print the trajectory.
    Integrate {
        #[arg(long)]
        system: String,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        /// Comma-separated parameters; random on the relation when absent.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        t1: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Fixed RK4 step instead of adaptive RK45.
        #[arg(long)]
        rk4: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        variant: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn write_out(path: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> CliResult<i32> {
    let data = weylpain::data_dir();
    match cli.command {
        Command::Verify {
            system,
            check,
            mode,
            samples,
            variant,
            seed,
            json,
            jobs,
        } => {
            let mode = parse_mode(&mode, samples, seed)?;
            let cfg = RunConfig {
                data,
                systems: parse_systems(&system)?,
                checks: Check::parse(&check)?,
                mode,
                variant,
                seed,
                jobs,
            };
            let reports = run(&cfg)?;
            for r in &reports {
                println!("{}", summary_line(r));
            }
            let failed = reports.iter().filter(|r| !r.passed()).count();
            println!("{} checks, {} passed, {} failed", reports.len(), reports.len() - failed, failed);
            if let Some(path) = json {
                write_out(Some(&path), &report_json(mode, &reports)?)?;
            }
            Ok(exit_code(&reports))
        }
        Command::Integrate {
            system,
            q,
            p,
            alpha,
            t0,
            t1,
            tol,
            rk4,
            threshold,
            variant,
            seed,
            format,
            out,
        } => {
            let name: SystemName = system.parse()?;
            let sys = match variant {
                Some(v) => load_system(&data, name, &v)?,
                None => load_accepted(&data, name)?,
            };
            let catalog = load_catalog(&data, name)?;
            let alpha = match alpha {
                Some(s) => s
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::Usage(format!("--alpha: {e}")))?,
                None => fixture_alpha(&sys, seed),
            };
            let mut cfg = match rk4 {
                Some(h) => IntegratorConfig::rk4(h),
                None => IntegratorConfig::rk45(tol),
            };
            cfg.chart_switch_threshold = threshold;
            let tr = match integrate(&sys, Some(&catalog), [q, p], &alpha, [t0, t1], cfg) {
                Ok(tr) => tr,
                Err(e @ (Error::Escape(_) | Error::MaxSteps(_) | Error::StepUnderflow(_))) => {
                    eprintln!("integration failed: {e}");
                    return Ok(1);
                }
                Err(e) => return Err(e.into()),
            };
            let text = match format {
                Format::Csv => tr.to_csv(),
                Format::Json => tr.to_json()?,
            };
            write_out(out.as_ref(), &text)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
