use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qipa_core::graph::WeightedGraph;
use qipa_core::harness::{
    self, parse_oracle, Command, HarnessError, InputSource, ModeSelection, RunConfig, RunOutcome, RunRequest,
    ScanState, WriteOptions,
};
use qipa_core::power::OracleFunction;
use qipa_core::separation::SeparationConstants;

const EXIT_ENVIRONMENT: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qipa",
    version,
    about = "Iterative power algorithm analysis and varQITE/QIPA2 comparisons"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Spectrum, separation conditions and the recommended upscaling factor.
    Analyze(RunArgs),
    /// Iterations-to-majority of an oracle, empirical and closed form.
    Power(RunArgs),
    /// varQITE and QIPA2 trajectories from shared initial parameters.
    Compare(RunArgs),
    /// Variance, Δ and error floor of αH over a list of α.
    ErrorScan(RunArgs),
    /// Print a seeded random graph as JSON.
    RandomGraph {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 11)]
        max_weight: u32,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-run the request recorded in a manifest.
    Replay {
        manifest: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        no_timestamp: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// Edge list (`u v w` per line) or JSON graph.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// JSON `{"n", "lambda1", "lambda2"}` for the degenerate-rest model.
    #[arg(long)]
    spectrum: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    dtau: f64,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// varqite, qipa2 or both.
    #[arg(long, default_value = "both")]
    mode: ModeSelection,
    /// Ansatz entangling layers.
    #[arg(long, default_value_t = 2)]
    layers: usize,
    #[arg(long, default_value_t = 1e-8)]
    regularization: f64,
    /// identity, exp:DT or doubleexp:DT.
    #[arg(long, default_value = "exp:1", value_parser = parse_oracle)]
    oracle: OracleFunction,
    #[arg(long, default_value_t = 100_000)]
    max_iter: u64,
    /// Comma-separated α values for error-scan; defaults to 1, 2, 4, ..., 1024.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// State for the error expressions: ansatz or exact.
    #[arg(long, default_value = "ansatz")]
    state: ScanState,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Omit the generation-time comment from SVG files.
    #[arg(long)]
    no_timestamp: bool,
}

impl RunArgs {
    fn request(&self, command: Command) -> RunRequest {
        let input = match (&self.input.graph, &self.input.spectrum) {
            (Some(g), _) => InputSource::Graph(g.clone()),
            (None, Some(s)) => InputSource::Spectrum(s.clone()),
            (None, None) => unreachable!("clap enforces one input"),
        };
        let defaults = RunConfig::default();
        let config = RunConfig {
            alpha: self.alpha,
            dtau: self.dtau,
            dt: self.dt,
            steps: self.steps,
            mode: self.mode,
            layers: self.layers,
            regularization: self.regularization,
            constants: SeparationConstants {
                c: self.c,
                d: self.d,
                k: self.k,
            },
            oracle: self.oracle,
            max_iter: self.max_iter,
            alphas: self.alphas.clone().unwrap_or(defaults.alphas),
            state: self.state,
        };
        RunRequest {
            command,
            input,
            seed: self.seed,
            config,
        }
    }

    fn options(&self) -> WriteOptions {
        WriteOptions {
            timestamp: !self.no_timestamp,
        }
    }
}

fn execute(cli: Cli) -> Result<RunOutcome, HarnessError> {
    let (command, args) = match cli.command {
        Cmd::Analyze(a) => (Command::Analyze, a),
        Cmd::Power(a) => (Command::Power, a),
        Cmd::Compare(a) => (Command::Compare, a),
        Cmd::ErrorScan(a) => (Command::ErrorScan, a),
        Cmd::RandomGraph { .. } => unreachable!("handled in main"),
        Cmd::Replay {
            manifest,
            out,
            no_timestamp,
        } => {
            return harness::replay(
                &manifest,
                &out,
                WriteOptions {
                    timestamp: !no_timestamp,
                },
            );
        }
    };
    harness::run(&args.request(command), &args.out, args.options())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Cmd::RandomGraph {
        nodes,
        max_weight,
        density,
        seed,
    } = cli.command
    {
        return match WeightedGraph::random(nodes, max_weight, density, seed) {
            Ok(g) => {
                println!("{}", g.to_json());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_INPUT)
            }
        };
    }
    match execute(cli) {
        Ok(outcome) => {
            for name in &outcome.manifest.outputs {
                println!("{}", outcome.out_dir.join(name).display());
            }
            if outcome.budget_exceeded {
                eprintln!("iteration budget exceeded");
                ExitCode::from(EXIT_BUDGET)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() {
                EXIT_INPUT
            } else {
                EXIT_ENVIRONMENT
            })
        }
    }
}
