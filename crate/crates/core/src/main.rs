use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blochop::criteria::{analyze, analyze_timed, lemma33_check, AnalysisConfig, Classification};
use blochop::disk::TrendRule;
use blochop::report::{compare, default_k_schedule, gridcheck, parse_corpus, to_json};
use blochop::spaces::SpaceSpec;
use blochop::symbol::parse_symbol;

/// Boundedness, compactness and essential-norm diagnostics for weighted
/// composition operators u C_φ into the Bloch space.
#[derive(Parser)]
#[command(name = "blochop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every criterion on one (u, φ, space) triple.
    Analyze {
        #[arg(long)]
        u: String,
        #[arg(long)]
        phi: String,
        /// `bergman:p=P,alpha=A` or `hardy:p=P`
        #[arg(long)]
        space: String,
        #[command(flatten)]
        opts: AnalysisOpts,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include wall-clock timings (the report is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Convergence table of k^α ‖z^{k-1}‖_{v_α} towards (2α/e)^α.
    Lemma33 {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 100_000)]
        kmax: u64,
        /// Explicit comma-separated k values; overrides --kmax.
        #[arg(long, value_delimiter = ',')]
        k: Vec<u64>,
    },
    /// Analyze every line of a corpus file and summarize agreement.
    Compare {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        opts: AnalysisOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the numerics against closed-form oracles.
    Gridcheck {
        /// Grid levels for the quadrature and pointwise suites.
        #[arg(long, default_value_t = 40)]
        levels: u32,
        /// Grid levels for the sup-norm suites.
        #[arg(long, default_value_t = 16)]
        sup_levels: u32,
    },
}

#[derive(Args)]
struct AnalysisOpts {
    #[arg(long, default_value_t = 40)]
    levels: u32,
    #[arg(long, default_value_t = 64)]
    angular_base: usize,
    #[arg(long, default_value_t = blochop::disk::DEFAULT_ANGULAR_CAP)]
    angular_cap: usize,
    #[arg(long, default_value_t = 1024)]
    testfn_angular_cap: usize,
    /// Comma-separated gate cuts in [0, 1); default 1-10^{-k} below the grid radius.
    #[arg(long, value_delimiter = ',')]
    cuts: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    jmax: u64,
    #[arg(long, default_value_t = 32)]
    a_angles: usize,
    #[arg(long, default_value_t = blochop::disk::DEFAULT_POLISH_ITERS)]
    polish_iters: usize,
    /// Relative absolute-tolerance of the trend classifier.
    #[arg(long, default_value_t = TrendRule::default().abs_tol_rel)]
    abs_tol: f64,
    #[arg(long, default_value_t = TrendRule::default().decay_factor)]
    decay_factor: f64,
    #[arg(long, default_value_t = TrendRule::default().growth_factor)]
    growth_factor: f64,
    #[arg(long, default_value_t = 25.0)]
    comparability: f64,
}

impl AnalysisOpts {
    fn config(&self) -> AnalysisConfig {
        AnalysisConfig {
            levels: self.levels,
            angular_base: self.angular_base,
            angular_cap: self.angular_cap,
            testfn_angular_cap: self.testfn_angular_cap,
            cuts: self.cuts.clone(),
            jmax: self.jmax,
            a_angles: self.a_angles,
            polish_iters: self.polish_iters,
            trend: TrendRule {
                abs_tol_rel: self.abs_tol,
                decay_factor: self.decay_factor,
                growth_factor: self.growth_factor,
                ..TrendRule::default()
            },
            comparability_factor: self.comparability,
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Analyze {
            u,
            phi,
            space,
            opts,
            out,
            timings,
        } => {
            let u = parse_symbol(&u).map_err(|e| format!("cannot parse u: {e}"))?;
            let phi = parse_symbol(&phi).map_err(|e| format!("cannot parse phi: {e}"))?;
            let spec: SpaceSpec = space.parse().map_err(|e| format!("{e}"))?;
            let config = opts.config();
            let report = if timings {
                analyze_timed(&u, &phi, &spec, &config)
            } else {
                analyze(&u, &phi, &spec, &config)
            }
            .map_err(|e| e.to_string())?;
            emit(&to_json(&report), out.as_ref())?;
            Ok(if report.classification == Classification::Indeterminate {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Lemma33 { alpha, kmax, k } => {
            let ks = if k.is_empty() { default_k_schedule(kmax) } else { k };
            let rows = lemma33_check(alpha, &ks).map_err(|e| e.to_string())?;
            print!("{}", to_json(&rows));
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { corpus, opts, out } => {
            let text = fs::read_to_string(&corpus).map_err(|e| format!("cannot read {}: {e}", corpus.display()))?;
            let entries = parse_corpus(&text).map_err(|e| format!("{}: {e}", corpus.display()))?;
            let config = opts.config();
            config.validate().map_err(|e| e.to_string())?;
            let summary = compare(&entries, &config);
            emit(&to_json(&summary), out.as_ref())?;
            Ok(if summary.errors > 0 {
                ExitCode::from(1)
            } else if summary.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Gridcheck { levels, sup_levels } => {
            let check = gridcheck(levels, sup_levels).map_err(|e| e.to_string())?;
            print!("{}", to_json(&check));
            Ok(if check.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
