use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use twostage::bench::{
    emit_plots, emit_table, read_trace, run_experiment, run_suite, write_outputs, write_suite_outputs, ExperimentConfig,
    ExperimentOutput, MetricsReport, RunOptions, Suite, SuiteSettings, TracePolicy,
};
use twostage::Error;

#[derive(Parser)]
#[command(name = "twostage", version, about = "Online two-stage allocation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config over its seeds.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated seeds; overrides the config.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Output directory; defaults to the config's, then `out`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a reproduction suite over all four demand cases.
    Suite {
        #[arg(value_parser = ["exp1", "exp2"])]
        name: String,
        #[arg(long = "t", default_value_t = twostage::bench::suite::DEFAULT_HORIZON)]
        horizon: usize,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Defaults to `results/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a trace for every seed instead of the first one per cell.
        #[arg(long)]
        all_traces: bool,
    },
    /// Print the mean relative regret (%) per algorithm and case.
    Table { report: PathBuf },
    /// Draw trace CSVs into `figure.svg`.
    Plot {
        traces: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn exit_code(e: &Error) -> ExitCode {
    if e.is_config() {
        ExitCode::from(1)
    } else {
        ExitCode::from(2)
    }
}

fn finish(output: &ExperimentOutput, dir: &Path) -> ExitCode {
    print!("{}", emit_table(&output.report));
    eprintln!("wrote {}", dir.join("report.csv").display());
    if output.report.failures.is_empty() {
        return ExitCode::SUCCESS;
    }
    for f in &output.report.failures {
        eprintln!("failed: {} {} seed {}: {}", f.case, f.algorithm, f.seed, f.message);
    }
    ExitCode::from(2)
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Run {
            config,
            seeds,
            jobs,
            out,
        } => {
            let mut cfg = ExperimentConfig::load(&config).map_err(|e| match e {
                Error::Io { .. } => Error::Config(e.to_string()),
                other => other,
            })?;
            if let Some(s) = seeds {
                cfg.seeds = s;
                cfg.validate()?;
            }
            let dir = out.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
            let output = run_experiment(
                &cfg,
                RunOptions {
                    jobs,
                    traces: TracePolicy::All,
                },
            )?;
            write_outputs(&output, &dir)?;
            Ok(finish(&output, &dir))
        }
        Command::Suite {
            name,
            horizon,
            seeds,
            jobs,
            out,
            all_traces,
        } => {
            let suite: Suite = name.parse()?;
            let mut settings = SuiteSettings {
                horizon,
                options: RunOptions {
                    jobs,
                    traces: if all_traces { TracePolicy::All } else { TracePolicy::FirstSeed },
                },
                ..SuiteSettings::default()
            };
            if let Some(s) = seeds {
                settings.seeds = s;
            }
            let dir = out.unwrap_or_else(|| Path::new("results").join(suite.name()));
            let output = run_suite(suite, &settings)?;
            if let Some(fig) = write_suite_outputs(&output, &dir)? {
                eprintln!("wrote {}", fig.display());
            }
            Ok(finish(&output, &dir))
        }
        Command::Table { report } => {
            print!("{}", emit_table(&MetricsReport::read_csv(&report)?));
            Ok(ExitCode::SUCCESS)
        }
        Command::Plot { traces, out } => {
            let loaded = traces.iter().map(|p| read_trace(p)).collect::<Result<Vec<_>, _>>()?;
            match emit_plots(&loaded, &out)? {
                Some(path) => println!("wrote {}", path.display()),
                None => println!("nothing to plot"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    run(cli.command).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn config_errors_map_to_one() {
        assert_eq!(exit_code(&Error::Config("bad".into())), ExitCode::from(1));
        assert_eq!(exit_code(&Error::NonFinite { what: "x" }), ExitCode::from(2));
    }

    #[test]
    fn suite_flags_parse() {
        let cli = Cli::try_parse_from(["twostage", "suite", "exp2", "--t", "50", "--seeds", "1,2", "--all-traces"]).unwrap();
        match cli.command {
            Command::Suite {
                name,
                horizon,
                seeds,
                all_traces,
                ..
            } => {
                assert_eq!((name.as_str(), horizon, seeds, all_traces), ("exp2", 50, Some(vec![1, 2]), true));
            }
            _ => panic!("expected the suite command"),
        }
        assert!(Cli::try_parse_from(["twostage", "suite", "exp3"]).is_err());
    }
}
