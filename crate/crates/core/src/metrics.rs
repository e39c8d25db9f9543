//! Performance measures and runtime bound diagnostics.
//!
//! * dynamic regret `Reg_i(T) = Σ_t J_{i,t}(x_{i,t}, x*_{−i,t}) − J_{i,t}(x*_t)`
//! * constraint violation `R_g(T) = ‖[Σ_t g_t(x_t)]_+‖`
//! * path length `Φ*_T = Σ_t ‖x*_{t+1} − x*_t‖`
//!
//! Prefix series are produced either streaming ([`MetricsAccumulator`],
//! [`DiagnosticTracker`]) or recomputed from stored profiles.

use std::fmt;

use thiserror::Error;

use crate::engine::{estimate_error, RoundSnapshot, RunTrace};
use crate::game::{aggregate_constraint, ActionLayout, Game, GameConstants};
use crate::graph::GraphTopology;
use crate::vecops::{dist, norm};

/// Margins below this count as violations in hard mode.
pub const MARGIN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("series has {zeros} nonpositive value(s) in the fit window")]
    DegenerateSeries { zeros: usize },
    #[error("fit window needs at least 2 points, series has {len}")]
    TooShort { len: usize },
    #[error("round {t}, player {}: {kind} bound violated (margin {margin:e})", player + 1)]
    BoundViolated {
        t: usize,
        player: usize,
        kind: BoundKind,
        margin: f64,
    },
}

/// `J_{i,t}(x_{i,t}, x*_{−i,t}) − J_{i,t}(x*_t)`.
pub fn regret_increment(game: &dyn Game, t: usize, i: usize, actions: &[f64], gne: &[f64]) -> f64 {
    let layout = game.layout();
    let r = layout.range(i);
    let mut mixed = gne.to_vec();
    mixed[r.clone()].copy_from_slice(&actions[r]);
    game.cost(i, t, &mixed) - game.cost(i, t, gne)
}

/// Prefix sums of player `i`'s dynamic regret. `actions[k]` and `gne[k]`
/// are the stacked profiles of round `k + 1`.
pub fn dynamic_regret(
    game: &dyn Game,
    actions: &[Vec<f64>],
    gne: &[Vec<f64>],
    i: usize,
) -> Result<Vec<f64>, MetricsError> {
    if gne.len() < actions.len() {
        return Err(MetricsError::LengthMismatch(format!(
            "{} rounds of actions but only {} equilibria",
            actions.len(),
            gne.len()
        )));
    }
    let mut total = 0.0;
    Ok(actions
        .iter()
        .zip(gne)
        .enumerate()
        .map(|(k, (x, star))| {
            total += regret_increment(game, k + 1, i, x, star);
            total
        })
        .collect())
}

fn positive_norm(sum: &[f64]) -> f64 {
    sum.iter().map(|v| v.max(0.0).powi(2)).sum::<f64>().sqrt()
}

/// Prefix series `R_g(t)` for `t = 1..T`.
pub fn constraint_violation(game: &dyn Game, actions: &[Vec<f64>]) -> Vec<f64> {
    let mut sum = vec![0.0; game.constraint_dim()];
    actions
        .iter()
        .enumerate()
        .map(|(k, x)| {
            for (s, g) in sum.iter_mut().zip(aggregate_constraint(game, k + 1, x)) {
                *s += g;
            }
            positive_norm(&sum)
        })
        .collect()
}

/// Prefix series `Φ*_t = Σ_{s≤t} ‖x*_{s+1} − x*_s‖` over the given sequence.
/// The last entry equals [`crate::equilibrium::path_length`] of the sequence.
pub fn path_length_prefix(gne: &[Vec<f64>]) -> Vec<f64> {
    let mut total = 0.0;
    (0..gne.len())
        .map(|k| {
            if k + 1 < gne.len() {
                total += dist(&gne[k + 1], &gne[k]);
            }
            total
        })
        .collect()
}

/// Running metrics after one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundMetrics {
    pub t: usize,
    pub regret_max: f64,
    pub violation: f64,
    pub path_length: f64,
}

/// Single-writer streaming accumulator; keeps the prefix series it emits.
#[derive(Debug, Clone)]
pub struct MetricsAccumulator {
    regrets: Vec<f64>,
    constraint_sum: Vec<f64>,
    path: f64,
    t: usize,
    regret_series: Vec<Vec<f64>>,
    violation_series: Vec<f64>,
    path_series: Vec<f64>,
}

impl MetricsAccumulator {
    pub fn new(n_players: usize, constraint_dim: usize) -> Self {
        Self {
            regrets: vec![0.0; n_players],
            constraint_sum: vec![0.0; constraint_dim],
            path: 0.0,
            t: 0,
            regret_series: vec![Vec::new(); n_players],
            violation_series: Vec::new(),
            path_series: Vec::new(),
        }
    }

    /// Adds round `t`. `next_gne` is `x*_{t+1}` (or `None` at the horizon).
    pub fn push(
        &mut self,
        game: &dyn Game,
        t: usize,
        actions: &[f64],
        gne: &[f64],
        next_gne: Option<&[f64]>,
    ) -> RoundMetrics {
        self.t = t;
        for (i, r) in self.regrets.iter_mut().enumerate() {
            *r += regret_increment(game, t, i, actions, gne);
            self.regret_series[i].push(*r);
        }
        for (s, g) in self.constraint_sum.iter_mut().zip(aggregate_constraint(game, t, actions)) {
            *s += g;
        }
        if let Some(next) = next_gne {
            self.path += dist(next, gne);
        }
        let violation = positive_norm(&self.constraint_sum);
        self.violation_series.push(violation);
        self.path_series.push(self.path);
        RoundMetrics {
            t,
            regret_max: self.regret_max(),
            violation,
            path_length: self.path,
        }
    }

    pub fn regret_max(&self) -> f64 {
        self.regrets.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn regrets(&self) -> &[f64] {
        &self.regrets
    }

    pub fn finish(self) -> MetricsReport {
        let regret_max = (0..self.t)
            .map(|k| {
                self.regret_series
                    .iter()
                    .map(|s| s[k])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        MetricsReport {
            regrets: self.regret_series,
            regret_max,
            violation: self.violation_series,
            path_length: self.path_series,
        }
    }
}

/// Prefix series of a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// `regrets[i][t−1] = Reg_i(t)`.
    pub regrets: Vec<Vec<f64>>,
    pub regret_max: Vec<f64>,
    pub violation: Vec<f64>,
    pub path_length: Vec<f64>,
}

impl MetricsReport {
    /// Post-hoc recomputation from stored profiles. `gne` may carry one
    /// extra entry `x*_{T+1}` for the last path-length hop.
    pub fn compute(
        game: &dyn Game,
        actions: &[Vec<f64>],
        gne: &[Vec<f64>],
    ) -> Result<Self, MetricsError> {
        let regrets = (0..game.n_players())
            .map(|i| dynamic_regret(game, actions, gne, i))
            .collect::<Result<Vec<_>, _>>()?;
        let regret_max = (0..actions.len())
            .map(|k| regrets.iter().map(|s| s[k]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        Ok(Self {
            regrets,
            regret_max,
            violation: constraint_violation(game, actions),
            path_length: {
                let mut p = path_length_prefix(&gne[..(actions.len() + 1).min(gne.len())]);
                p.truncate(actions.len());
                p
            },
        })
    }

    pub fn horizon(&self) -> usize {
        self.violation.len()
    }

    /// `max_i Reg_i(t) / t` at round `t`.
    pub fn average_regret_max(&self, t: usize) -> f64 {
        self.regret_max[t - 1] / t as f64
    }

    pub fn average_violation(&self, t: usize) -> f64 {
        self.violation[t - 1] / t as f64
    }
}

/// First index of the fit window for a series of length `len`.
pub fn fit_window_start(len: usize) -> usize {
    len / 2
}

/// Least-squares slope of `ln s_t` against `ln t` over the last half of the
/// series (`t = ⌊T/2⌋+1..T`, with `s_t = series[t−1]`).
pub fn fit_exponent(series: &[f64]) -> Result<f64, MetricsError> {
    let start = fit_window_start(series.len());
    let window = &series[start..];
    if window.len() < 2 {
        return Err(MetricsError::TooShort { len: series.len() });
    }
    let zeros = window.iter().filter(|v| !(**v > 0.0)).count();
    if zeros > 0 {
        return Err(MetricsError::DegenerateSeries { zeros });
    }
    let pts: Vec<(f64, f64)> = window
        .iter()
        .enumerate()
        .map(|(k, v)| (((start + k + 1) as f64).ln(), v.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// Bounds checked per round and player.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// Consensus error: `‖e_{i,t}‖ ≤ 2√(N−1) L Σ_{s<t} σ^s α_{t−s−1}`.
    EstimateError,
    /// Dual norm: `‖λ_{i,t}‖ ≤ L γ_t / β_t`.
    DualNorm,
    /// Mixed dual norm: `‖λ̃_{i,t}‖ ≤ L γ_t / β_t`.
    MixedDualNorm,
    /// Dual consensus: `‖λ̃_{i,t} − λ̄_t‖ ≤ √N F Σ_{s<t} σ_m^s γ²_{t−1−s}`.
    DualConsensus,
    /// `‖λ_{i,t+1} − λ̃_{i,t}‖ ≤ F γ_t²`.
    DualPerturbation,
    /// `‖x_{i,t}‖ ≤ L`.
    ActionNorm,
    /// `‖g_{i,t}(x_{i,t})‖ ≤ L`.
    ConstraintNorm,
}

impl BoundKind {
    pub const ALL: [BoundKind; 7] = [
        BoundKind::EstimateError,
        BoundKind::DualNorm,
        BoundKind::MixedDualNorm,
        BoundKind::DualConsensus,
        BoundKind::DualPerturbation,
        BoundKind::ActionNorm,
        BoundKind::ConstraintNorm,
    ];

    pub fn is_dual(self) -> bool {
        matches!(
            self,
            BoundKind::DualNorm
                | BoundKind::MixedDualNorm
                | BoundKind::DualConsensus
                | BoundKind::DualPerturbation
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            BoundKind::EstimateError => "estimate_error",
            BoundKind::DualNorm => "dual_norm",
            BoundKind::MixedDualNorm => "mixed_dual_norm",
            BoundKind::DualConsensus => "dual_consensus",
            BoundKind::DualPerturbation => "dual_perturbation",
            BoundKind::ActionNorm => "action_norm",
            BoundKind::ConstraintNorm => "constraint_norm",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginRow {
    pub t: usize,
    pub player: usize,
    pub kind: BoundKind,
    pub bound: f64,
    pub observed: f64,
}

impl MarginRow {
    pub fn margin(&self) -> f64 {
        self.bound - self.observed
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MarginTable {
    pub rows: Vec<MarginRow>,
}

impl MarginTable {
    pub fn min_margin(&self, kind: BoundKind) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.kind == kind)
            .map(MarginRow::margin)
            .reduce(f64::min)
    }

    /// First row with margin below `−tol`.
    pub fn first_violation(&self, tol: f64) -> Option<&MarginRow> {
        self.rows.iter().find(|r| r.margin() < -tol)
    }

    pub fn check(&self, tol: f64) -> Result<(), MetricsError> {
        match self.first_violation(tol) {
            Some(r) => Err(r.into()),
            None => Ok(()),
        }
    }
}

impl From<&MarginRow> for MetricsError {
    fn from(r: &MarginRow) -> Self {
        MetricsError::BoundViolated {
            t: r.t,
            player: r.player,
            kind: r.kind,
            margin: r.margin(),
        }
    }
}

/// Whether diagnostics are computed and whether they abort the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticsMode {
    Off,
    Record,
    Hard,
}

/// Streaming evaluator of the per-round bounds. Keeps the two geometric sums
/// `S_t = Σ_{s<t} σ^s α_{t−s−1}` and `C_t = Σ_{s<t} σ_m^s γ²_{t−1−s}` as
/// recurrences (`S_1 = C_1 = 1`).
#[derive(Debug, Clone)]
pub struct DiagnosticTracker {
    l: f64,
    f: f64,
    sigma: f64,
    sigma_m: f64,
    alpha_sum: f64,
    gamma_sum: f64,
}

impl DiagnosticTracker {
    pub fn new(constants: &GameConstants, sigma: f64, sigma_m: f64) -> Self {
        Self {
            l: constants.l,
            f: constants.dual_perturbation_factor(),
            sigma,
            sigma_m,
            alpha_sum: 1.0,
            gamma_sum: 1.0,
        }
    }

    pub fn for_graph(constants: &GameConstants, graph: &GraphTopology) -> Self {
        Self::new(constants, graph.sigma(), graph.sigma_m())
    }

    /// Margin rows of one round, in player-major order.
    pub fn push(&mut self, snap: &RoundSnapshot) -> Vec<MarginRow> {
        let players = &snap.players;
        let n = players.len();
        let layout = ActionLayout::new(players.iter().map(|p| p.own_action.len()));
        let sizes = snap.sizes;
        let dual_cap = self.l * sizes.gamma / sizes.beta;
        let est_bound = 2.0 * ((n - 1) as f64).sqrt() * self.l * self.alpha_sum;
        let consensus_bound = (n as f64).sqrt() * self.f * self.gamma_sum;
        let perturbation_bound = self.f * sizes.gamma * sizes.gamma;

        let m = snap.mixed_multipliers.first().map_or(0, Vec::len);
        let mut mean = vec![0.0; m];
        for p in players {
            for (a, v) in mean.iter_mut().zip(&p.multiplier) {
                *a += v / n as f64;
            }
        }

        let mut rows = Vec::with_capacity(n * BoundKind::ALL.len());
        for (i, p) in players.iter().enumerate() {
            let row = |kind, bound, observed| MarginRow {
                t: snap.t,
                player: i,
                kind,
                bound,
                observed,
            };
            rows.push(row(
                BoundKind::EstimateError,
                est_bound,
                estimate_error(players, i, &layout),
            ));
            rows.push(row(BoundKind::DualNorm, dual_cap, norm(&p.multiplier)));
            rows.push(row(
                BoundKind::MixedDualNorm,
                dual_cap,
                norm(&snap.mixed_multipliers[i]),
            ));
            rows.push(row(
                BoundKind::DualConsensus,
                consensus_bound,
                dist(&snap.mixed_multipliers[i], &mean),
            ));
            rows.push(row(
                BoundKind::DualPerturbation,
                perturbation_bound,
                snap.dual_perturbations[i],
            ));
            rows.push(row(BoundKind::ActionNorm, self.l, norm(&p.own_action)));
            rows.push(row(
                BoundKind::ConstraintNorm,
                self.l,
                norm(&snap.local_constraints[i]),
            ));
        }

        self.alpha_sum = sizes.alpha + self.sigma * self.alpha_sum;
        self.gamma_sum = sizes.gamma * sizes.gamma + self.sigma_m * self.gamma_sum;
        rows
    }
}

/// Margins for every round and player of a finished trace.
pub fn diagnostic_margins(
    trace: &RunTrace,
    constants: &GameConstants,
    graph: &GraphTopology,
) -> MarginTable {
    let mut tracker = DiagnosticTracker::for_graph(constants, graph);
    MarginTable {
        rows: trace.snapshots.iter().flat_map(|s| tracker.push(s)).collect(),
    }
}
