//! `fraclap`: batch front end of the fractional Laplacian toolkit.
//!
//! Exit codes: 0 success, 2 invalid input or usage, 3 numerical tolerance failure.

mod config;
mod error;
mod halfline;
mod identities;
mod inputs;
mod interval;
mod ops;
mod output;
mod selftest;
mod sweep;

use clap::{CommandFactory, Parser, Subcommand};

use error::CliError;
use output::{pretty, Common, Outcome};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (output format 1)");

#[derive(Debug, Parser)]
#[command(name = "fraclap", version = VERSION, about = "Fractional Laplacian toolkit: multipliers, half-line and interval Dirichlet problems, traces and identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    ApplyOp(ops::ApplyOp),
    PvApply(ops::PvApply),
    CalibrateC(ops::CalibrateC),
    KernelCheck(ops::KernelCheck),
    ComposeCheck(ops::ComposeCheck),
    SupportCheck(ops::SupportCheck),
    SolveHalfline(halfline::SolveHalfline),
    SolveHalflineNonhom(halfline::SolveHalflineNonhom),
    MakeSample(halfline::MakeSample),
    Decompose(halfline::Decompose),
    Trace(halfline::Trace),
    Poisson(halfline::Poisson),
    AssembleInterval(interval::AssembleInterval),
    SolveInterval(interval::SolveInterval),
    SolveIntervalNonhom(interval::SolveIntervalNonhom),
    Eigen(interval::Eigen),
    ResolventScan(interval::ResolventScanCmd),
    HeatEvolve(interval::HeatEvolve),
    CheckPohozaev(identities::CheckPohozaev),
    CheckGreen(identities::CheckGreen),
    ClassifyEmu(identities::ClassifyEmu),
    Sweep(sweep::Sweep),
}

macro_rules! dispatch {
    ($cmd:expr, $($variant:ident),*) => {
        match $cmd {
            $(Command::$variant(c) => (&c.common, if c.common.self_test { c.self_test() } else { c.run() }),)*
        }
    };
}

impl Command {
    fn execute(&self) -> (&Common, Result<Outcome, CliError>) {
        dispatch!(
            self,
            ApplyOp, PvApply, CalibrateC, KernelCheck, ComposeCheck, SupportCheck,
            SolveHalfline, SolveHalflineNonhom, MakeSample, Decompose, Trace, Poisson,
            AssembleInterval, SolveInterval, SolveIntervalNonhom, Eigen, ResolventScan, HeatEvolve,
            CheckPohozaev, CheckGreen, ClassifyEmu, Sweep
        )
    }
}

fn subcommand_name(args: &[String]) -> Option<String> {
    let cmd = Cli::command();
    args.iter()
        .skip(1)
        .find(|a| cmd.find_subcommand(a.as_str()).is_some())
        .cloned()
}

fn print_usage(args: &[String]) {
    let mut cmd = Cli::command();
    let help = match subcommand_name(args).and_then(|n| cmd.find_subcommand_mut(&n).map(|c| c.render_help())) {
        Some(h) => h,
        None => cmd.render_help(),
    };
    eprintln!("{help}");
}

fn run(args: Vec<String>) -> i32 {
    let args = match config::merge(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (common, result) = cli.command.execute();
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Validation(_) = e {
                print_usage(&args);
            }
            return e.exit_code();
        }
    };
    if !common.self_test {
        if let Err(e) = outcome.write(&common.output_dir, common.emit) {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    }
    print!("{}", pretty(&outcome.summary));
    match &outcome.failure {
        Some(reason) => {
            let e = CliError::Tolerance {
                reason: reason.clone(),
                report: outcome.summary.clone(),
            };
            eprintln!("error: {e}");
            if let CliError::Tolerance { report, .. } = &e {
                eprint!("{}", pretty(report));
            }
            e.exit_code()
        }
        None => 0,
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    std::process::exit(run(std::env::args().collect()));
}
