use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ptrgeo::dataset::Task;
use ptrgeo::decode::Constraint;
use ptrgeo::nn::Arch;
use ptrgeo::tsp::Solver;

mod data;
mod eval;
mod generate;
mod manifest;
mod plot;
mod train;

#[derive(Parser, Debug)]
#[command(name = "ptrgeo", version, about = "Pointer networks on planar point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a labelled dataset.
    Generate(GenerateArgs),
    /// Train a sequence model.
    Train(TrainArgs),
    /// Evaluate a checkpoint or a classical solver.
    Eval(EvalArgs),
    /// Render an example (and optionally a prediction) as SVG.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long)]
    pub task: Task,
    /// Fixed point count (shorthand for equal --n-min and --n-max).
    #[arg(long, conflicts_with_all = ["n_min", "n_max"])]
    pub n: Option<usize>,
    #[arg(long, requires = "n_max")]
    pub n_min: Option<usize>,
    #[arg(long, requires = "n_min")]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value = "optimal")]
    pub solver: Solver,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long, default_value = "ptrnet")]
    pub arch: Arch,
    #[arg(long)]
    pub data: PathBuf,
    /// Task of the data file; read from its manifest when omitted.
    #[arg(long)]
    pub task: Option<Task>,
    /// Checkpoint to write.
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 256)]
    pub hidden: usize,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 128)]
    pub batch: usize,
    #[arg(long, default_value_t = 1.0)]
    pub lr: f64,
    #[arg(long, default_value_t = 2.0)]
    pub clip: f64,
    #[arg(long, default_value_t = 0.08)]
    pub init_range: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub checkpoint_every: usize,
    /// Print a log line every this many steps.
    #[arg(long, default_value_t = 10)]
    pub log_every: usize,
    /// Also write "step loss grad_norm" lines to this file.
    #[arg(long)]
    pub loss_log: Option<PathBuf>,
    /// Overwrite an existing checkpoint.
    #[arg(long, conflicts_with = "resume")]
    pub force: bool,
    /// Continue from the existing checkpoint at --output.
    #[arg(long)]
    pub resume: bool,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub task: Option<Task>,
    #[arg(long, conflicts_with = "solver", required_unless_present = "solver")]
    pub checkpoint: Option<PathBuf>,
    #[arg(long)]
    pub solver: Option<Solver>,
    #[arg(long, default_value_t = 1)]
    pub beam: usize,
    #[arg(long, default_value = "none")]
    pub constraint: Constraint,
    /// Write per-example results as TSV.
    #[arg(long)]
    pub per_example: Option<PathBuf>,
    /// Also write the summary report here.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub task: Option<Task>,
    /// 0-based example index.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Per-example evaluation file whose prediction is drawn on top.
    #[arg(long)]
    pub detail: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

fn main() -> ExitCode {
    ptrgeo::parallel::init_from_env();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate::run(&a),
        Command::Train(a) => train::run(&a),
        Command::Eval(a) => eval::run(&a),
        Command::Plot(a) => plot::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
