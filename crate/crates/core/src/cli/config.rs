use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::engine::StepSchedule;
use crate::geometry::GeometryKind;
use crate::graph::{GraphError, GraphTopology};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },
    #[error("invalid configuration: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    Cournot,
    SimplexTest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Ring,
    Path,
    Complete,
    Edges,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryName {
    Euclidean,
    Entropy,
}

impl From<GeometryName> for GeometryKind {
    fn from(g: GeometryName) -> Self {
        match g {
            GeometryName::Euclidean => GeometryKind::Euclidean,
            GeometryName::Entropy => GeometryKind::NegativeEntropy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSection {
    pub kind: GameKind,
    pub n_players: usize,
    pub horizon: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub kind: GraphKind,
    /// 1-based vertex pairs, only for `kind = "edges"`.
    pub edges: Option<Vec<[usize; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub kind: GeometryName,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub a1: f64,
    pub a2: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub horizon: usize,
    pub seed: u64,
    #[serde(default)]
    pub diagnostics: bool,
    pub gne_tol: Option<f64>,
    pub out: Option<PathBuf>,
    /// Multiplies the estimated `L` used by the diagnostics.
    pub l_scale: Option<f64>,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub game: GameSection,
    pub graph: GraphSection,
    pub geometry: GeometrySection,
    pub schedule: ScheduleSection,
    pub run: RunSection,
}

pub const DEFAULT_GNE_TOL: f64 = 1e-8;

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.span().map(|s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Validation(m));
        StepSchedule::power(self.schedule.a1, self.schedule.a2, self.run.horizon.max(1))
            .map_err(|e| ConfigError::Validation(format!("schedule: {e}")))?;
        if self.run.horizon < 1 {
            return bad("run.horizon must be at least 1".into());
        }
        if let Some(h) = self.game.horizon {
            if h != self.run.horizon {
                return bad(format!(
                    "game.horizon = {h} disagrees with run.horizon = {}",
                    self.run.horizon
                ));
            }
        }
        match (self.game.kind, self.geometry.kind) {
            (GameKind::Cournot, GeometryName::Euclidean)
            | (GameKind::SimplexTest, GeometryName::Entropy) => {}
            (g, k) => {
                return bad(format!(
                    "geometry.kind = {k:?} is not supported for game.kind = {g:?}"
                ))
            }
        }
        if self.game.n_players < 2 {
            return bad("game.n_players must be at least 2".into());
        }
        match (self.graph.kind, &self.graph.edges) {
            (GraphKind::Edges, None) => return bad("graph.kind = \"edges\" needs graph.edges".into()),
            (GraphKind::Edges, Some(_)) => {}
            (_, Some(_)) => return bad("graph.edges is only allowed with graph.kind = \"edges\"".into()),
            (_, None) => {}
        }
        if let Some(tol) = self.run.gne_tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return bad(format!("run.gne_tol = {tol} must be positive"));
            }
        }
        if let Some(s) = self.run.l_scale {
            if !(s > 0.0 && s.is_finite()) {
                return bad(format!("run.l_scale = {s} must be positive"));
            }
        }
        Ok(())
    }

    pub fn schedule(&self) -> StepSchedule {
        StepSchedule::power(self.schedule.a1, self.schedule.a2, self.run.horizon)
            .expect("validated at parse time")
    }

    pub fn gne_tol(&self) -> f64 {
        self.run.gne_tol.unwrap_or(DEFAULT_GNE_TOL)
    }

    pub fn build_graph(&self) -> Result<GraphTopology, GraphError> {
        let n = self.game.n_players;
        match self.graph.kind {
            GraphKind::Ring => GraphTopology::ring(n),
            GraphKind::Path => GraphTopology::path(n),
            GraphKind::Complete => GraphTopology::complete(n),
            GraphKind::Edges => {
                let edges: Vec<(usize, usize)> = self
                    .graph
                    .edges
                    .as_deref()
                    .unwrap_or_default()
                    .iter()
                    .map(|&[a, b]| (a.wrapping_sub(1), b.wrapping_sub(1)))
                    .collect();
                GraphTopology::from_edges(n, &edges)
            }
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Reads and validates a config file, returning it with its verbatim text.
pub fn parse_config(path: &Path) -> Result<(RunConfig, String), ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let config = RunConfig::from_toml(&text)?;
    Ok((config, text))
}
