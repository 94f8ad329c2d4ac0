mod cmd;
mod config;
mod diag;
mod io;

use clap::{Parser, Subcommand};
use cmd::Ctx;
use diag::Diagnostic;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "tqnn", version, about = "Topological quantum neural network toolkit")]
struct Cli {
    /// Worker thread cap [default: all cores]
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML config with one table per subcommand
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides TQNN_OUT_DIR and the config `out` key)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[command(rename_all = "kebab-case")]
enum Command {
    /// Character table and orthogonality report for a group
    Groups(cmd::groups::GroupsArgs),
    /// State-sum amplitude of a 2-complex
    Bf(cmd::bf::BfArgs),
    /// Amplitude under random subdivision sequences
    Invariance(cmd::invariance::InvarianceArgs),
    /// Lattice propagator by transfer matrix
    Path(cmd::path::PathArgs),
    /// Tube concentration around the classical path across hbar
    Concentrate(cmd::concentrate::ConcentrateArgs),
    /// Classify a boundary state against class states
    Classify(cmd::classify::ClassifyArgs),
    /// Fit coherent class states to a labeled dataset
    Train(cmd::train::TrainArgs),
    /// Training under permuted labels
    RandomLabels(cmd::random_labels::RandomLabelsArgs),
    /// Capacity grid or semiclassical perceptron check
    Sweep(cmd::sweep::SweepArgs),
    /// Check an input or config file
    Validate(cmd::validate::ValidateArgs),
}

fn dispatch(c: &Command, ctx: &Ctx) -> Result<String, Diagnostic> {
    match c {
        Command::Groups(a) => cmd::groups::run(a, ctx),
        Command::Bf(a) => cmd::bf::run(a, ctx),
        Command::Invariance(a) => cmd::invariance::run(a, ctx),
        Command::Path(a) => cmd::path::run(a, ctx),
        Command::Concentrate(a) => cmd::concentrate::run(a, ctx),
        Command::Classify(a) => cmd::classify::run(a, ctx),
        Command::Train(a) => cmd::train::run(a, ctx),
        Command::RandomLabels(a) => cmd::random_labels::run(a, ctx),
        Command::Sweep(a) => cmd::sweep::run(a, ctx),
        Command::Validate(a) => cmd::validate::run(a, ctx),
    }
}

fn run(cli: &Cli) -> Result<String, Diagnostic> {
    if cli.threads == Some(0) {
        return Err(diag::usage("`--threads` must be at least 1"));
    }
    let config = cli.config.as_deref().map(config::load).transpose()?;
    let ctx = Ctx {
        out: cli.out.clone(),
        config,
    };
    tqnn::exec::with_threads(cli.threads, || dispatch(&cli.command, &ctx))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let d = diag::usage(e.kind().to_string()).with_details(vec![e.to_string().trim_end().to_string()]);
            let _ = e.print();
            eprintln!("{}", serde_json::to_string(&d).unwrap());
            return ExitCode::from(d.exit_code());
        }
    };
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(d) => {
            println!("error: {}", d.message);
            eprintln!("{}", serde_json::to_string(&d).unwrap());
            ExitCode::from(d.exit_code())
        }
    }
}
