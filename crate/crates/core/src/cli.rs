//! Command-line frontend: `solve`, `bench` and `verify`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{parse_sizes, run_family, Family};
use crate::cutting_plane::CpmConfig;
use crate::error::Error;
use crate::instance::{solve, Instance};
use crate::report::{RunReport, Transcript};
use crate::solver::{SolverConfig, ThresholdPolicy};
use crate::verify::{run_suite, Suite};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_MALFORMED: u8 = 2;
pub const EXIT_ORACLE: u8 = 3;
pub const EXIT_NONTERMINATION: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "intmin", version, about = "Exact integer minimization from a separation oracle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    #[value(name = "lemma31")]
    Guarded,
    #[value(name = "paper1e")]
    Vanishing,
    #[value(name = "tenN")]
    TenN,
}

impl From<PolicyArg> for ThresholdPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Guarded => ThresholdPolicy::Guarded,
            PolicyArg::Vanishing => ThresholdPolicy::Vanishing,
            PolicyArg::TenN => ThresholdPolicy::TenN,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Quad,
    SfmCut,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    Lll,
    Barrier,
    Cpm,
    Dimred,
    Sfm,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and write a JSON run report.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Box radius `R` (set functions always use 1).
        #[arg(long)]
        radius: Option<i64>,
        #[arg(long, value_enum, default_value = "lemma31")]
        threshold_policy: PolicyArg,
        /// Use the shifted-cut placement with the small drop threshold.
        #[arg(long)]
        strict: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Sweep an instance family over sizes and seeds.
    Bench {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// `a..b` (inclusive), `a,b,c`, or a single size.
        #[arg(long, default_value = "3..10")]
        sizes: String,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        /// Box radius for the quadratic family.
        #[arg(long, default_value_t = 16)]
        radius: i64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a property suite.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Sets up logging from `INTMIN_LOG` (`off`, `info` or `trace`; default `off`).
pub fn init_logging() {
    let level = std::env::var("INTMIN_LOG").unwrap_or_else(|_| "off".into());
    let filter = match level.as_str() {
        "off" | "info" | "trace" | "debug" | "warn" | "error" => format!("intmin={level}"),
        other => {
            eprintln!("unknown INTMIN_LOG value {other:?}, logging disabled");
            "off".into()
        }
    };
    let _ = env_logger::Builder::new().parse_filters(&filter).format_timestamp(None).try_init();
}

/// Exit code for a solver error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInstance(_) | Error::Json(_) => EXIT_MALFORMED,
        Error::OracleInconsistency(_) | Error::MalformedOracle(_) | Error::AmbiguousYes { .. } => EXIT_ORACLE,
        Error::NonTermination { .. } => EXIT_NONTERMINATION,
        _ => EXIT_INTERNAL,
    }
}

fn status_name(e: &Error) -> &'static str {
    match e {
        Error::OracleInconsistency(_) | Error::MalformedOracle(_) => "oracle_inconsistency",
        Error::AmbiguousYes { .. } => "ambiguous_yes",
        Error::NonTermination { .. } => "non_termination",
        _ => "error",
    }
}

fn write_output(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n")),
        None => writeln!(std::io::stdout(), "{text}"),
    }
}

/// Builds the solver configuration for `solve`.
pub fn solve_config(inst: &Instance, radius: Option<i64>, policy: ThresholdPolicy, strict: bool) -> SolverConfig {
    let r = if inst.is_set_function() {
        if radius.is_some_and(|r| r != 1) {
            log::warn!("set-function instances use radius 1; ignoring --radius");
        }
        1
    } else {
        radius.or(inst.radius()).unwrap_or(1)
    };
    SolverConfig {
        threshold_policy: policy,
        cpm: if strict { CpmConfig::strict() } else { CpmConfig::default() },
        ..SolverConfig::with_radius(r)
    }
}

fn run_solve(instance: &Path, radius: Option<i64>, policy: ThresholdPolicy, strict: bool, report: Option<&Path>) -> u8 {
    let name = instance.display().to_string();
    let inst = match Instance::load(instance) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_MALFORMED;
        }
    };
    let config = solve_config(&inst, radius, policy, strict);
    let config_json = serde_json::to_value(&config).expect("config serializes");
    let t0 = Instant::now();
    let result = solve(&inst, &config);
    let ms = t0.elapsed().as_secs_f64() * 1e3;
    let (report_value, code) = match result {
        Ok(out) => {
            let rep = RunReport::from_transcript(
                &name,
                out.minimizer,
                Some(out.objective_value),
                out.eo_calls,
                &out.transcript,
                ms,
                config_json,
            );
            (rep, EXIT_OK)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let transcript = match &e {
                Error::NonTermination { transcript, .. } => (**transcript).clone(),
                Error::AmbiguousYes { transcript: Some(t), .. } => (**t).clone(),
                _ => Transcript::default(),
            };
            let mut rep = RunReport::from_transcript(&name, Vec::new(), None, 0, &transcript, ms, config_json);
            rep.status = status_name(&e).into();
            (rep, exit_code(&e))
        }
    };
    let text = serde_json::to_string_pretty(&report_value).expect("report serializes");
    if let Err(e) = write_output(report, &text) {
        eprintln!("error: cannot write report: {e}");
        return EXIT_INTERNAL;
    }
    code
}

fn run_bench(family: Family, sizes: &str, seeds: u64, radius: i64, report: Option<&Path>) -> u8 {
    let sizes = match parse_sizes(sizes) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_MALFORMED;
        }
    };
    if radius < 1 {
        eprintln!("error: radius must be at least 1");
        return EXIT_MALFORMED;
    }
    let rep = run_family(family, &sizes, seeds, &SolverConfig::with_radius(radius));
    for s in &rep.sizes {
        eprintln!(
            "n = {:>2}: {}/{} correct, mean SO calls {:.1}, mean EO calls {:.1}, mean blocks {:.1}",
            s.n, s.correct, s.runs, s.mean_so_calls, s.mean_eo_calls, s.mean_blocks
        );
    }
    eprintln!("log-log slope {:.3}, C = {:.3}", rep.loglog_slope, rep.call_constant);
    let text = serde_json::to_string_pretty(&rep).expect("bench report serializes");
    if let Err(e) = write_output(report, &text) {
        eprintln!("error: cannot write report: {e}");
        return EXIT_INTERNAL;
    }
    if rep.all_correct() {
        EXIT_OK
    } else {
        EXIT_INTERNAL
    }
}

fn run_verify(suite: SuiteArg, seed: u64) -> u8 {
    let suites: Vec<Suite> = match suite {
        SuiteArg::Lll => vec![Suite::Lll],
        SuiteArg::Barrier => vec![Suite::Barrier],
        SuiteArg::Cpm => vec![Suite::Cpm],
        SuiteArg::Dimred => vec![Suite::Dimred],
        SuiteArg::Sfm => vec![Suite::Sfm],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let mut ok = true;
    for s in suites {
        let rep = run_suite(s, seed);
        for c in &rep.checks {
            println!("{} {s}/{}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        ok &= rep.passed();
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_INTERNAL
    }
}

pub fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Solve { instance, radius, threshold_policy, strict, report } => {
            run_solve(&instance, radius, threshold_policy.into(), strict, report.as_deref())
        }
        Command::Bench { family, sizes, seeds, radius, report } => {
            let family = match family {
                FamilyArg::Quad => Family::Quad,
                FamilyArg::SfmCut => Family::SfmCut,
            };
            run_bench(family, &sizes, seeds, radius, report.as_deref())
        }
        Command::Verify { suite, seed } => run_verify(suite, seed),
    }
}

/// Entry point for the binary: parse arguments, set up logging, run.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    init_logging();
    match Cli::try_parse_from(args) {
        Ok(cli) => ExitCode::from(run(cli)),
        Err(e) => {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK })
        }
    }
}
