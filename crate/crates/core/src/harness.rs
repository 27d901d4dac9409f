//! File-level experiment runs: each command reads a graph or spectrum file,
//! writes JSON/CSV/SVG artifacts into an output directory and records a
//! manifest from which the run can be replayed byte for byte.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error_model::{alpha_blowup_scan, BlowupRow};
use crate::graph::WeightedGraph;
use crate::ising::{IsingHamiltonian, SpectrumSummary};
use crate::plot::{LinePlot, Series};
use crate::power::{
    closed_form_majority_count, degenerate_rest_spectrum, iterations_to_majority, kappa_bounds, IterationBoundEstimate,
    MajorityOutcome, OracleFunction,
};
use crate::separation::{check_inequality_system, minimal_upscale_alpha, ConditionReport, SeparationConstants};
use crate::statevector::{AnsatzSpec, DiagonalObservable};
use crate::variational::{run_evolution_from, EvolutionConfig, EvolutionMode, Trajectory, TrajectoryStatus};

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRAJECTORY_HEADER: [&str; 7] = [
    "step",
    "time",
    "energy",
    "solution_prob",
    "step_error",
    "bures_cum",
    "bures_exact",
];
pub const SCAN_HEADER: [&str; 5] = ["alpha", "var", "delta", "qipa_floor", "dt_used"];
/// Relative distance to the ground energy counted as converged by `compare`.
pub const CONVERGENCE_TOLERANCE: f64 = 0.02;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] crate::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Input(String),
}

impl HarnessError {
    /// Whether the failure stems from the user's input rather than the environment.
    pub fn is_input_error(&self) -> bool {
        match self {
            HarnessError::Io { source, .. } => source.kind() == std::io::ErrorKind::NotFound,
            HarnessError::Csv(_) => false,
            _ => true,
        }
    }
}

pub type HarnessResult<T> = std::result::Result<T, HarnessError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Analyze,
    Power,
    Compare,
    ErrorScan,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Power => "power",
            Command::Compare => "compare",
            Command::ErrorScan => "error_scan",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    Graph(PathBuf),
    Spectrum(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModeSelection {
    VarQite,
    Qipa2,
    #[default]
    Both,
}

impl ModeSelection {
    pub fn modes(&self) -> Vec<EvolutionMode> {
        match self {
            ModeSelection::VarQite => vec![EvolutionMode::VarQite],
            ModeSelection::Qipa2 => vec![EvolutionMode::Qipa2],
            ModeSelection::Both => vec![EvolutionMode::VarQite, EvolutionMode::Qipa2],
        }
    }
}

impl FromStr for ModeSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "varqite" => Ok(ModeSelection::VarQite),
            "qipa2" => Ok(ModeSelection::Qipa2),
            "both" => Ok(ModeSelection::Both),
            _ => Err(format!("unknown mode {s:?}; expected varqite, qipa2 or both")),
        }
    }
}

/// State on which the error expressions of `error_scan` are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScanState {
    /// The ansatz state at the seeded initial parameters.
    #[default]
    Ansatz,
    /// That state evolved exactly by `e^{-H τ}` with `τ = steps * dtau`.
    Exact,
}

impl FromStr for ScanState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ansatz" => Ok(ScanState::Ansatz),
            "exact" => Ok(ScanState::Exact),
            _ => Err(format!("unknown state {s:?}; expected ansatz or exact")),
        }
    }
}

/// Parses `identity`, `exp:DT` or `doubleexp:DT` (`DT` defaults to 1).
pub fn parse_oracle(text: &str) -> Result<OracleFunction, String> {
    let (kind, dt) = match text.split_once(':') {
        Some((k, v)) => (k, v.parse::<f64>().map_err(|e| format!("bad oracle step {v:?}: {e}"))?),
        None => (text, 1.0),
    };
    let oracle = match kind {
        "identity" => OracleFunction::Identity,
        "exp" => OracleFunction::Exp { dt },
        "doubleexp" | "double_exp" => OracleFunction::DoubleExp { dt },
        _ => return Err(format!("unknown oracle {kind:?}; expected identity, exp or doubleexp")),
    };
    oracle.validate().map_err(|e| e.to_string())?;
    Ok(oracle)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub alpha: f64,
    pub dtau: f64,
    pub dt: f64,
    pub steps: usize,
    pub mode: ModeSelection,
    pub layers: usize,
    pub regularization: f64,
    pub constants: SeparationConstants,
    pub oracle: OracleFunction,
    pub max_iter: u64,
    pub alphas: Vec<f64>,
    pub state: ScanState,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            dtau: 0.01,
            dt: 0.01,
            steps: 100,
            mode: ModeSelection::Both,
            layers: 2,
            regularization: 1e-8,
            constants: SeparationConstants::default(),
            oracle: OracleFunction::Exp { dt: 1.0 },
            max_iter: 100_000,
            alphas: (0..=10).map(|m| 2f64.powi(m)).collect(),
            state: ScanState::Ansatz,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRequest {
    pub command: Command,
    pub input: InputSource,
    pub seed: u64,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: u32,
    pub command: Command,
    pub inputs: InputSource,
    pub seed: u64,
    pub config: RunConfig,
    pub tool_version: String,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn request(&self) -> RunRequest {
        RunRequest {
            command: self.command,
            input: self.inputs.clone(),
            seed: self.seed,
            config: self.config.clone(),
        }
    }

    pub fn load(path: &Path) -> HarnessResult<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let manifest: Self = serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        if manifest.schema != SCHEMA_VERSION {
            return Err(HarnessError::Input(format!(
                "{}: unsupported manifest schema {}",
                path.display(),
                manifest.schema
            )));
        }
        Ok(manifest)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WriteOptions {
    /// Stamp SVG files with the wall-clock time as a comment.
    pub timestamp: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub out_dir: PathBuf,
    /// Set when an iteration count hit `max_iter`.
    pub budget_exceeded: bool,
}

/// Writes `contents` to a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> HarnessResult<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| HarnessError::Input(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    let mut file = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    file.write_all(contents).map_err(io_err(&tmp))?;
    file.sync_all().map_err(io_err(&tmp))?;
    drop(file);
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// Synthetic spectrum file: `{"n": 10, "lambda1": 1025, "lambda2": 1024}`,
/// read as the degenerate-rest model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub n: u32,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl SpectrumSpec {
    pub fn parse(text: &str) -> Result<Self, String> {
        let spec: Self = serde_json::from_str(text).map_err(|e| format!("line {}: {e}", e.line()))?;
        if spec.n == 0 || spec.n > 63 {
            return Err(format!("n must lie in 1..=63, got {}", spec.n));
        }
        if !(spec.lambda1.is_finite() && spec.lambda2.is_finite()) {
            return Err("eigenvalues must be finite".into());
        }
        Ok(spec)
    }
}

enum Loaded {
    Graph(WeightedGraph),
    Spectrum(SpectrumSpec),
}

fn load_input(input: &InputSource) -> HarnessResult<Loaded> {
    let (path, is_graph) = match input {
        InputSource::Graph(p) => (p, true),
        InputSource::Spectrum(p) => (p, false),
    };
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    if is_graph {
        WeightedGraph::parse(&text)
            .map(Loaded::Graph)
            .map_err(|e| HarnessError::Input(format!("{}: {e}", path.display())))
    } else {
        SpectrumSpec::parse(&text)
            .map(Loaded::Spectrum)
            .map_err(|e| HarnessError::Input(format!("{}: {e}", path.display())))
    }
}

fn require_graph(input: &InputSource, command: Command) -> HarnessResult<WeightedGraph> {
    match load_input(input)? {
        Loaded::Graph(g) => Ok(g),
        Loaded::Spectrum(_) => Err(HarnessError::Input(format!("{} needs a graph input", command.name()))),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn timestamp_comment() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix {secs}")
}

struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
    options: WriteOptions,
}

impl OutputDir {
    fn create(root: &Path, options: WriteOptions) -> HarnessResult<Self> {
        fs::create_dir_all(root).map_err(io_err(root))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
            options,
        })
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> HarnessResult<()> {
        write_atomic(&self.root.join(name), contents)?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> HarnessResult<()> {
        self.write(name, to_json(value).as_bytes())
    }

    fn write_plot(&mut self, name: &str, mut plot: LinePlot) -> HarnessResult<()> {
        if self.options.timestamp {
            plot.timestamp = Some(timestamp_comment());
        }
        self.write(name, plot.render().as_bytes())
    }

    fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> HarnessResult<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Input(e.to_string()))?;
        self.write(name, &bytes)
    }
}

/// Runs `request` into `out_dir` and writes its manifest last.
pub fn run(request: &RunRequest, out_dir: &Path, options: WriteOptions) -> HarnessResult<RunOutcome> {
    let mut out = OutputDir::create(out_dir, options)?;
    let budget_exceeded = match request.command {
        Command::Analyze => {
            let report = analyze(&request.input, &request.config)?;
            out.write_json("analysis.json", &report)?;
            false
        }
        Command::Power => {
            let report = power(&request.input, &request.config)?;
            out.write_json("power.json", &report)?;
            report.status == PowerStatus::BudgetExceeded
        }
        Command::Compare => {
            let graph = require_graph(&request.input, request.command)?;
            compare(&graph, request.seed, &request.config, &mut out)?;
            false
        }
        Command::ErrorScan => {
            let graph = require_graph(&request.input, request.command)?;
            error_scan(&graph, request.seed, &request.config, &mut out)?
        }
    };
    let mut outputs = out.written.clone();
    outputs.push(MANIFEST_FILE.to_string());
    let manifest = RunManifest {
        schema: SCHEMA_VERSION,
        command: request.command,
        inputs: request.input.clone(),
        seed: request.seed,
        config: request.config.clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        outputs,
    };
    out.write_json(MANIFEST_FILE, &manifest)?;
    Ok(RunOutcome {
        manifest,
        out_dir: out_dir.to_path_buf(),
        budget_exceeded,
    })
}

/// Re-runs the request recorded in a manifest into `out_dir`.
pub fn replay(manifest_path: &Path, out_dir: &Path, options: WriteOptions) -> HarnessResult<RunOutcome> {
    let manifest = RunManifest::load(manifest_path)?;
    run(&manifest.request(), out_dir, options)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub num_qubits: u32,
    pub constants: SeparationConstants,
    /// Present for graph inputs.
    pub spectrum: Option<SpectrumSummary>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub conditions: ConditionReport,
    pub kappa: Option<IterationBoundEstimate>,
    pub recommended_alpha: f64,
    pub upscaled_lambda1: f64,
    pub upscaled_lambda2: f64,
    pub upscaled_conditions: ConditionReport,
    pub upscaled_kappa: Option<IterationBoundEstimate>,
}

fn kappa_if_ordered(n: u32, l1: f64, l2: f64) -> Option<IterationBoundEstimate> {
    kappa_bounds(n, l1, l2).ok()
}

pub fn analyze(input: &InputSource, config: &RunConfig) -> HarnessResult<AnalysisReport> {
    let consts = config.constants;
    consts.validate()?;
    let (n, spectrum, l1, l2) = match load_input(input)? {
        Loaded::Graph(g) => {
            let s = IsingHamiltonian::from_maxcut(&g)?.brute_force_spectrum()?;
            (s.num_qubits as u32, Some(s.clone()), s.lambda1, s.lambda2)
        }
        Loaded::Spectrum(s) => (s.n, None, s.lambda1, s.lambda2),
    };
    let conditions = check_inequality_system(n, l1, l2, &consts)?;
    let recommended_alpha = if l1 > l2 {
        minimal_upscale_alpha(l1 - l2, n, &consts)?
    } else {
        1.0
    };
    let (ul1, ul2) = (recommended_alpha * l1, recommended_alpha * l2);
    Ok(AnalysisReport {
        schema: SCHEMA_VERSION,
        num_qubits: n,
        constants: consts,
        spectrum,
        lambda1: l1,
        lambda2: l2,
        conditions,
        kappa: kappa_if_ordered(n, l1, l2),
        recommended_alpha,
        upscaled_lambda1: ul1,
        upscaled_lambda2: ul2,
        upscaled_conditions: check_inequality_system(n, ul1, ul2, &consts)?,
        upscaled_kappa: kappa_if_ordered(n, ul1, ul2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerStatus {
    Reached,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerReport {
    pub schema: u32,
    pub num_qubits: u32,
    pub alpha: f64,
    pub oracle: OracleFunction,
    pub max_iter: u64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub empirical: MajorityOutcome,
    /// Count on the degenerate-rest model with the same `lambda1`, `lambda2`;
    /// equals `empirical` for spectrum inputs.
    pub closed_form: Option<u64>,
    pub kappa: Option<IterationBoundEstimate>,
    pub status: PowerStatus,
}

pub fn power(input: &InputSource, config: &RunConfig) -> HarnessResult<PowerReport> {
    config.oracle.validate()?;
    let (n, spectrum, l1, l2) = match load_input(input)? {
        Loaded::Graph(g) => {
            let h = IsingHamiltonian::from_maxcut(&g)?.upscale(config.alpha)?;
            let spectrum = h.maximization_spectrum()?;
            if spectrum.len() < 2 {
                return Err(crate::Error::NoGap.into());
            }
            (h.num_qubits() as u32, spectrum.clone(), spectrum[0].0, spectrum[1].0)
        }
        Loaded::Spectrum(s) => {
            let (l1, l2) = (config.alpha * s.lambda1, config.alpha * s.lambda2);
            (s.n, degenerate_rest_spectrum(s.n, l1, l2)?, l1, l2)
        }
    };
    let empirical = iterations_to_majority(&spectrum, &config.oracle, config.max_iter)?;
    let status = match empirical {
        MajorityOutcome::Reached { .. } => PowerStatus::Reached,
        MajorityOutcome::BudgetExceeded { .. } => PowerStatus::BudgetExceeded,
    };
    Ok(PowerReport {
        schema: SCHEMA_VERSION,
        num_qubits: n,
        alpha: config.alpha,
        oracle: config.oracle,
        max_iter: config.max_iter,
        lambda1: l1,
        lambda2: l2,
        empirical,
        closed_form: closed_form_majority_count(n, l1, l2, &config.oracle).ok(),
        kappa: kappa_if_ordered(n, l1, l2),
        status,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSummary {
    pub mode: EvolutionMode,
    pub steps_to_tolerance: Option<usize>,
    pub final_energy: f64,
    pub final_solution_prob: f64,
    pub bures_cum: f64,
    pub status: TrajectoryStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareSummary {
    pub schema: u32,
    pub num_qubits: usize,
    pub alpha: f64,
    pub ground_energy: f64,
    pub tolerance: f64,
    pub initial_energy: f64,
    pub runs: Vec<ModeSummary>,
}

/// Ansatz, upscaled problem observable and seeded initial parameters shared
/// by every mode of a comparison.
pub fn comparison_setup(
    graph: &WeightedGraph,
    alpha: f64,
    layers: usize,
    seed: u64,
) -> crate::Result<(AnsatzSpec, DiagonalObservable, Vec<f64>)> {
    let h = IsingHamiltonian::from_maxcut(graph)?.upscale(alpha)?;
    let problem = DiagonalObservable::from_hamiltonian(&h)?;
    let spec = AnsatzSpec::new(h.num_qubits(), layers)?;
    let theta0 = spec.initial_parameters(seed);
    Ok((spec, problem, theta0))
}

fn trajectory_rows(t: &Trajectory) -> Vec<Vec<String>> {
    t.records
        .iter()
        .map(|r| {
            vec![
                r.step.to_string(),
                r.time.to_string(),
                r.energy.to_string(),
                r.solution_prob.to_string(),
                r.step_error.to_string(),
                r.bures_cum.to_string(),
                r.bures_exact.to_string(),
            ]
        })
        .collect()
}

fn compare(graph: &WeightedGraph, seed: u64, config: &RunConfig, out: &mut OutputDir) -> HarnessResult<()> {
    let (spec, problem, theta0) = comparison_setup(graph, config.alpha, config.layers, seed)?;
    let ground = problem.min_value();
    let mut plot =
        LinePlot::new(format!("energy, alpha = {}", config.alpha), "step", "energy").with_reference(ground, "ground");
    let mut runs = Vec::new();
    let mut initial_energy = f64::NAN;
    for mode in config.mode.modes() {
        let evo = EvolutionConfig {
            delta_tau: config.dtau,
            delta_t: config.dt,
            num_steps: config.steps,
            regularization: config.regularization,
            mode,
            seed,
        };
        let traj = run_evolution_from(&problem, &spec, &theta0, &evo)?;
        initial_energy = traj.initial_energy;
        out.write_csv(
            &format!("{}.csv", mode.name()),
            &TRAJECTORY_HEADER,
            &trajectory_rows(&traj),
        )?;
        let points = std::iter::once((0.0, traj.initial_energy))
            .chain(traj.records.iter().map(|r| (r.step as f64, r.energy)))
            .collect();
        plot = plot.with_series(Series::new(mode.name(), points));
        runs.push(ModeSummary {
            mode,
            steps_to_tolerance: traj.steps_to_within(ground, CONVERGENCE_TOLERANCE),
            final_energy: traj.final_energy(),
            final_solution_prob: traj
                .records
                .last()
                .map_or(traj.initial_solution_prob, |r| r.solution_prob),
            bures_cum: traj.records.last().map_or(0.0, |r| r.bures_cum),
            status: traj.status.clone(),
        });
    }
    out.write_plot("energy.svg", plot)?;
    out.write_json(
        "summary.json",
        &CompareSummary {
            schema: SCHEMA_VERSION,
            num_qubits: spec.num_qubits,
            alpha: config.alpha,
            ground_energy: ground,
            tolerance: CONVERGENCE_TOLERANCE,
            initial_energy,
            runs,
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    #[serde(flatten)]
    pub errors: BlowupRow,
    /// Iterations-to-majority of the configured oracle on the spectrum of `αH`.
    pub majority: MajorityOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanChecks {
    pub variance_increasing: bool,
    pub delta_increasing: bool,
    /// `Var(αH) == α² Var(H)` bit for bit on every row.
    pub variance_exactly_quadratic: bool,
    pub iterations_non_increasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub schema: u32,
    pub num_qubits: usize,
    pub state: ScanState,
    pub dt: f64,
    pub dtau: f64,
    pub oracle: OracleFunction,
    pub variance_at_unit_alpha: f64,
    pub omitted_term: &'static str,
    pub rows: Vec<ScanRow>,
    pub checks: ScanChecks,
}

fn strictly_increasing(values: impl Iterator<Item = f64>) -> bool {
    let v: Vec<f64> = values.collect();
    v.windows(2).all(|w| w[1] > w[0])
}

/// Error scan plus the paired oracle iteration counts; returns the rows of the
/// joint report.
pub fn scan_report(graph: &WeightedGraph, seed: u64, config: &RunConfig) -> crate::Result<ScanReport> {
    config.oracle.validate()?;
    let (spec, problem, theta0) = comparison_setup(graph, 1.0, config.layers, seed)?;
    let mut state = spec.prepare(&theta0)?;
    if config.state == ScanState::Exact {
        state = state.exact_imaginary_evolution(&problem, config.steps as f64 * config.dtau)?;
    }
    let h = IsingHamiltonian::from_maxcut(graph)?;
    let errors = alpha_blowup_scan(&problem, &state, &config.alphas, config.dt, config.dtau)?;
    let rows = errors
        .into_iter()
        .map(|e| {
            let spectrum = h.upscale(e.alpha)?.maximization_spectrum()?;
            let majority = iterations_to_majority(&spectrum, &config.oracle, config.max_iter)?;
            Ok(ScanRow { errors: e, majority })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let base = state.variance(&problem)?;
    let counts: Vec<u64> = rows
        .iter()
        .map(|r| r.majority.iterations().unwrap_or(u64::MAX))
        .collect();
    let checks = ScanChecks {
        variance_increasing: strictly_increasing(rows.iter().map(|r| r.errors.variance)),
        delta_increasing: strictly_increasing(rows.iter().map(|r| r.errors.delta)),
        variance_exactly_quadratic: rows
            .iter()
            .all(|r| r.errors.variance == r.errors.alpha * r.errors.alpha * base),
        iterations_non_increasing: counts.windows(2).all(|w| w[1] <= w[0]),
    };
    Ok(ScanReport {
        schema: SCHEMA_VERSION,
        num_qubits: spec.num_qubits,
        state: config.state,
        dt: config.dt,
        dtau: config.dtau,
        oracle: config.oracle,
        variance_at_unit_alpha: base,
        omitted_term: crate::error_model::OMITTED_TERM,
        rows,
        checks,
    })
}

fn error_scan(graph: &WeightedGraph, seed: u64, config: &RunConfig, out: &mut OutputDir) -> HarnessResult<bool> {
    let report = scan_report(graph, seed, config)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            let e = &r.errors;
            vec![
                e.alpha.to_string(),
                e.variance.to_string(),
                e.delta.to_string(),
                e.qipa_floor.to_string(),
                e.dt_used.to_string(),
            ]
        })
        .collect();
    out.write_csv("scan.csv", &SCAN_HEADER, &rows)?;

    let series = |label: &str, f: fn(&BlowupRow) -> f64| {
        Series::new(
            label,
            report
                .rows
                .iter()
                .map(|r| (r.errors.alpha.log2(), f(&r.errors)))
                .collect(),
        )
    };
    let plot = LinePlot::new("error growth under upscaling", "log2 alpha", "value")
        .log_y(true)
        .with_series(series("Var(aH)", |e| e.variance))
        .with_series(series("Delta(aH)", |e| e.delta))
        .with_series(series("qipa floor", |e| e.qipa_floor));
    out.write_plot("scan.svg", plot)?;
    out.write_json("scan_report.json", &report)?;
    Ok(report.rows.iter().any(|r| r.majority.iterations().is_none()))
}
