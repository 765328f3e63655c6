//! `bfmeta` command-line front end.
//!
//! Exit codes: 0 success, 2 usage, 3 input, 4 configuration, 5 numerical failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bfmeta::bf::{LogBf, Orientation};
use bfmeta::evidence::classify;
use bfmeta::io::{build_report, ingest_csv, AnalysisConfig, GRule, MethodChoice, OutputFormat, SingleStudyInput};
use bfmeta::simulation::{load_scenarios, run_scenarios, write_metrics_csv, write_replicates_csv};
use bfmeta::synthesis::NuRule;
use bfmeta::Error;
use clap::{Parser, Subcommand};

const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_CONFIG: u8 = 4;
const EXIT_NUMERIC: u8 = 5;

#[derive(Parser)]
#[command(name = "bfmeta", version, about = "Bayes factors from study summaries and their meta-analytic synthesis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// g-prior and JZS Bayes factors for one study.
    Bf {
        /// Signed t statistic.
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// Total sample size.
        #[arg(long)]
        n: Option<usize>,
        /// First group size (with --n2).
        #[arg(long, requires = "n2")]
        n1: Option<usize>,
        /// Second group size (with --n1).
        #[arg(long, requires = "n1")]
        n2: Option<usize>,
        /// Covariate sum of squares; n1·n2/n from group sizes, else n/4.
        #[arg(long)]
        ss: Option<f64>,
        /// g of the g-prior (default n).
        #[arg(long)]
        g: Option<f64>,
        #[arg(long, value_parser = parse_nu_rule, default_value = "n_minus_2")]
        nu_rule: NuRule,
        #[arg(long, value_parser = parse_format, default_value = "text")]
        format: OutputFormat,
    },
    /// Meta-analytic Bayes factors from a CSV study table.
    Meta {
        /// CSV with study_id, one statistic column and sample sizes.
        csv: PathBuf,
        /// TOML with method, g, nu_rule and n_total; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// all, auto, d, p, l, jzs, fisher or stouffer.
        #[arg(long)]
        method: Option<String>,
        /// 'N' or a positive number.
        #[arg(long, allow_hyphen_values = true)]
        g: Option<String>,
        #[arg(long, value_parser = parse_nu_rule)]
        nu_rule: Option<NuRule>,
        /// Total sample size of the final transform (default Σ n_k).
        #[arg(long)]
        n_total: Option<usize>,
        #[arg(long, value_parser = parse_format, default_value = "text")]
        format: OutputFormat,
        /// Write the report here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a simulation scenario file and write metrics CSV.
    Simulate {
        scenario: PathBuf,
        /// Worker threads (default: BFMETA_WORKERS, else all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Metrics CSV destination (default standard output).
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Also write one row per replicate and method here.
        #[arg(long)]
        replicates_out: Option<PathBuf>,
    },
    /// Evidence grade of a 2 ln BF value.
    Classify {
        #[arg(allow_negative_numbers = true)]
        two_log_bf: f64,
        /// Hypothesis in the numerator of the given factor.
        #[arg(long, value_parser = parse_orientation, default_value = "BF10")]
        orientation: Orientation,
    },
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_nu_rule(s: &str) -> Result<NuRule, String> {
    match s {
        "n_minus_2" => Ok(NuRule::TwoSample),
        "n_minus_1" => Ok(NuRule::OneSample),
        other => Err(format!("expected n_minus_2 or n_minus_1, got '{other}'")),
    }
}

fn parse_orientation(s: &str) -> Result<Orientation, String> {
    match s.to_ascii_uppercase().as_str() {
        "BF10" => Ok(Orientation::Bf10),
        "BF01" => Ok(Orientation::Bf01),
        other => Err(format!("expected BF10 or BF01, got '{other}'")),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        e if e.is_numeric() => EXIT_NUMERIC,
        _ => EXIT_INPUT,
    }
}

fn emit(text: &str, path: Option<&Path>) -> bfmeta::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn create(path: &Path) -> bfmeta::Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> bfmeta::Result<()> {
    match command {
        Command::Bf {
            t,
            n,
            n1,
            n2,
            ss,
            g,
            nu_rule,
            format,
        } => {
            let input = SingleStudyInput {
                t,
                n,
                group_sizes: n1.zip(n2),
                ss_x: ss,
                g,
                nu_rule,
            };
            emit(&input.evaluate()?.render(format)?, None)
        }
        Command::Meta {
            csv,
            config,
            method,
            g,
            nu_rule,
            n_total,
            format,
            output,
        } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                    AnalysisConfig::from_toml(&text)?
                }
                None => AnalysisConfig::default(),
            };
            if let Some(m) = method {
                cfg.method = m.parse::<MethodChoice>()?;
            }
            if let Some(g) = g {
                cfg.g_rule = g.parse::<GRule>()?;
            }
            if let Some(nu) = nu_rule {
                cfg.nu_rule = nu;
            }
            if n_total.is_some() {
                cfg.n_total = n_total;
            }
            let records = ingest_csv(&csv)?;
            let report = build_report(&records, &cfg)?;
            emit(&report.render(format)?, output.as_deref())
        }
        Command::Simulate {
            scenario,
            workers,
            output,
            replicates_out,
        } => {
            let specs = load_scenarios(&scenario)?;
            let results = run_scenarios(&specs, workers)?;
            match output {
                Some(p) => {
                    let mut w = create(&p)?;
                    write_metrics_csv(&results, &mut w)?;
                    w.flush()?;
                }
                None => write_metrics_csv(&results, io::stdout().lock())?,
            }
            if let Some(p) = replicates_out {
                let mut w = create(&p)?;
                write_replicates_csv(&results, &mut w)?;
                w.flush()?;
            }
            Ok(())
        }
        Command::Classify { two_log_bf, orientation } => {
            let bf = LogBf {
                two_log_bf,
                orientation,
            };
            let (favoured, level) = if two_log_bf >= 0.0 {
                (orientation, classify(bf))
            } else {
                (orientation.flipped(), classify(bf.flip()))
            };
            let hypothesis = match favoured {
                Orientation::Bf10 => "H1",
                Orientation::Bf01 => "H0",
            };
            emit(&format!("{} for {hypothesis}\n", level.label()), None)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
