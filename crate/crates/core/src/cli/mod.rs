//! Experiment runner behind the `dgne` binary.
//!
//! `run` executes one configured experiment and writes `trace.csv`,
//! `summary.txt` and a verbatim copy of the config into the output
//! directory. Failures map to exit codes: 2 config, 3 assumption violation,
//! 4 numerical failure, 5 bound violation under hard diagnostics.

mod config;
mod output;

pub use config::{
    parse_config, ConfigError, GameKind, GeometryName, GraphKind, RunConfig, DEFAULT_GNE_TOL,
};
pub use output::{format_float, trace_header, Summary};

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::engine::{multiplier_norms, Engine, EngineError};
use crate::equilibrium::{cournot_closed_form_profile, max_abs_gap, EquilibriumError, GneSequence};
use crate::game::{
    estimate_constants, CournotGame, Game, GameError, SimplexTestGame, SimplexTestParams,
    MIN_CONSTANT_SAMPLES,
};
use crate::graph::GraphError;
use crate::metrics::{
    BoundKind, DiagnosticTracker, DiagnosticsMode, MarginRow, MetricsAccumulator, MetricsError,
    MetricsReport, MARGIN_TOLERANCE,
};

pub const GNE_MAX_ITERS: usize = 200_000;
pub const DEFAULT_OUT_DIR: &str = "dgne-out";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("diagnostics: {0}")]
    BoundViolated(MetricsError),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Assumption(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::BoundViolated(_) => 5,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::InvalidParameter(m) => CliError::Config(ConfigError::Validation(m)),
            GameError::AssumptionViolation(m) => CliError::Assumption(m),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::NumericalFailure => CliError::Numerical(e.to_string()),
            GraphError::DisconnectedGraph | GraphError::DegenerateSpectrum { .. } => {
                CliError::Assumption(e.to_string())
            }
            _ => CliError::Config(ConfigError::Validation(e.to_string())),
        }
    }
}

impl From<EquilibriumError> for CliError {
    fn from(e: EquilibriumError) -> Self {
        match e {
            EquilibriumError::InfeasibleProblem { .. } => CliError::Assumption(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::InvalidSchedule(m) => CliError::Config(ConfigError::Validation(m)),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

/// Command-line overrides for `run`.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub gne_tol: Option<f64>,
    pub hard_diagnostics: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub report: MetricsReport,
    pub summary: Summary,
}

pub fn build_game(config: &RunConfig) -> Result<Box<dyn Game>, CliError> {
    let n = config.game.n_players;
    let horizon = config.run.horizon;
    Ok(match config.game.kind {
        GameKind::Cournot => Box::new(CournotGame::new(n, horizon)?),
        GameKind::SimplexTest => {
            Box::new(SimplexTestGame::new(SimplexTestParams::standard(n, horizon))?)
        }
    })
}

fn diagnostics_mode(config: &RunConfig, options: &RunOptions) -> DiagnosticsMode {
    if options.hard_diagnostics {
        DiagnosticsMode::Hard
    } else if config.run.diagnostics {
        DiagnosticsMode::Record
    } else {
        DiagnosticsMode::Off
    }
}

/// Output directory: `--out`, then `run.out`, then [`DEFAULT_OUT_DIR`].
pub fn resolve_out_dir(config: &RunConfig, options: &RunOptions) -> PathBuf {
    options
        .out
        .clone()
        .or_else(|| config.run.out.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Runs the configured experiment end to end.
pub fn run_experiment(
    config: &RunConfig,
    config_text: &str,
    options: &RunOptions,
) -> Result<RunOutcome, CliError> {
    if let Some(tol) = options.gne_tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(ConfigError::Validation(format!("--gne-tol {tol} must be positive")).into());
        }
    }
    let gne_tol = options.gne_tol.unwrap_or_else(|| config.gne_tol());
    let mode = diagnostics_mode(config, options);
    let game = build_game(config)?;
    let game = game.as_ref();
    let graph = config.build_graph()?;
    let schedule = config.schedule();
    let horizon = config.run.horizon;

    let mut constants = estimate_constants(game, MIN_CONSTANT_SAMPLES, config.run.seed)?;
    constants.l *= config.run.l_scale.unwrap_or(1.0);
    let gne = GneSequence::solve(game, gne_tol, GNE_MAX_ITERS)?;

    let out_dir = resolve_out_dir(config, options);
    fs::create_dir_all(&out_dir)?;
    fs::write(out_dir.join("config.toml"), config_text)?;

    let mut engine = Engine::new(game, &graph, config.geometry.kind.into(), schedule, config.run.seed)?;
    let mut metrics = MetricsAccumulator::new(game.n_players(), game.constraint_dim());
    let mut tracker = DiagnosticTracker::for_graph(&constants, &graph);
    let mut minima = MarginMinima::default();

    let mut csv = BufWriter::new(File::create(out_dir.join("trace.csv"))?);
    writeln!(csv, "{}", trace_header(&game.layout()))?;
    let mut violation: Option<MarginRow> = None;
    for t in 1..=horizon {
        let snap = engine.step()?;
        let actions = snap.action_profile();
        let star = &gne.solutions[t - 1];
        let next = gne.solutions.get(t).map(|s| s.actions.as_slice());
        let round = metrics.push(game, t, &actions, &star.actions, next);

        let (est_min, dual_min) = if mode == DiagnosticsMode::Off {
            (f64::NAN, f64::NAN)
        } else {
            let rows = tracker.push(&snap);
            if violation.is_none() {
                violation = rows.iter().find(|r| r.margin() < -MARGIN_TOLERANCE).copied();
            }
            minima.absorb(&rows)
        };

        let mut fields = vec![
            t.to_string(),
            format_float(snap.sizes.alpha),
            format_float(snap.sizes.beta),
            format_float(snap.sizes.gamma),
        ];
        for (p, lambda_norm) in snap.players.iter().zip(multiplier_norms(&snap.players)) {
            fields.extend(p.own_action.iter().map(|v| format_float(*v)));
            fields.push(format_float(lambda_norm));
        }
        fields.extend(
            [
                round.regret_max,
                round.violation,
                round.path_length,
                star.kkt_residual,
                est_min,
                dual_min,
            ]
            .map(format_float),
        );
        writeln!(csv, "{}", fields.join(","))?;

        if mode == DiagnosticsMode::Hard {
            if let Some(row) = &violation {
                csv.flush()?;
                return Err(CliError::BoundViolated(row.into()));
            }
        }
    }
    csv.flush()?;

    let report = metrics.finish();
    let closed_form_gap = match config.game.kind {
        GameKind::Cournot => Some(
            gne.solutions
                .iter()
                .map(|s| {
                    let cf = cournot_closed_form_profile(game.n_players(), s.t);
                    (s.t, max_abs_gap(&s.actions, &cf))
                })
                .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc }),
        ),
        GameKind::SimplexTest => None,
    };
    let summary = Summary::build(
        config,
        &graph,
        &constants,
        &report,
        &gne,
        gne_tol,
        mode,
        minima.by_kind,
        violation,
        closed_form_gap,
    );
    fs::write(out_dir.join("summary.txt"), summary.to_string())?;
    Ok(RunOutcome {
        out_dir,
        report,
        summary,
    })
}

#[derive(Debug, Default)]
struct MarginMinima {
    by_kind: Vec<(BoundKind, f64)>,
}

impl MarginMinima {
    /// Folds one round's rows in; returns that round's (estimate, dual) minima.
    fn absorb(&mut self, rows: &[MarginRow]) -> (f64, f64) {
        let mut est = f64::INFINITY;
        let mut dual = f64::INFINITY;
        for r in rows {
            let m = r.margin();
            if r.kind == BoundKind::EstimateError {
                est = est.min(m);
            } else if r.kind.is_dual() {
                dual = dual.min(m);
            }
            match self.by_kind.iter_mut().find(|(k, _)| *k == r.kind) {
                Some((_, v)) => *v = v.min(m),
                None => self.by_kind.push((r.kind, m)),
            }
        }
        (est, dual)
    }
}

/// `validate` subcommand: parse and check without running.
pub fn validate_config(path: &Path) -> Result<RunConfig, CliError> {
    let (config, _) = parse_config(path)?;
    build_game(&config)?;
    config.build_graph()?;
    Ok(config)
}

/// `run` subcommand.
pub fn run_from_path(path: &Path, options: &RunOptions) -> Result<RunOutcome, CliError> {
    let (config, text) = parse_config(path)?;
    run_experiment(&config, &text, options)
}
