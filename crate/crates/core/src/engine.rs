//! Distributed online primal-dual dynamic mirror descent.
//!
//! Every player `i` keeps its action `x_{i,t} ∈ Ω_i`, estimates `x_{ih,t}` of
//! all other actions and a local multiplier `λ_{i,t} ≥ 0`. One synchronized
//! round reads only the previous round's states and performs, per player:
//!
//! 1. `λ̃_{i,t} = Σ_j a_ij λ_{j,t}`
//! 2. `d = ∇_i J_{i,t}(𝐱_{i,t}) + γ_t ∇g_{i,t}(x_{i,t})ᵀ λ̃_{i,t}`, where
//!    `𝐱_{i,t}` is the estimate vector with `x_{i,t}` in slot `i`
//! 3. `x̃_{i,t+1} = argmin_{x∈Ω_i} α_t⟨x, d⟩ + D_φ(x, x_{i,t})`
//! 4. `x_{i,t+1} = (1 − α_t) x_{i,t} + α_t x̃_{i,t+1}`
//! 5. `b_{i,t+1} = ∇g_{i,t}(x_{i,t})(x̃_{i,t+1} − x_{i,t}) + g_{i,t}(x_{i,t})` and
//!    `λ_{i,t+1} = [λ̃_{i,t} + γ_t(γ_t b_{i,t+1} − β_t λ̃_{i,t})]_+`
//! 6. `x_{ih,t+1} = Σ_k a_ik x_{kh,t}` for `h ≠ i`, with `x_{hh,t} = x_{h,t}`
//!
//! Estimates are plain averages and are never projected onto `Ω_h`.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{
    aggregate_constraint, jacobian_mul, jacobian_transpose_mul, ActionLayout, Game,
};
use crate::geometry::{mirror_step, BregmanGeometry, FeasibleSet, GeometryError, GeometryKind};
use crate::graph::GraphTopology;
use crate::vecops::{all_finite, dist, norm};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid step schedule: {0}")]
    InvalidSchedule(String),
    #[error("game has {game} players but the graph has {graph}")]
    PlayerMismatch { game: usize, graph: usize },
    #[error("round {t}, player {}: {source}", player + 1)]
    Geometry {
        t: usize,
        player: usize,
        #[source]
        source: GeometryError,
    },
    #[error("round {t}, player {}: non-finite {what}", player + 1)]
    NonFiniteState {
        t: usize,
        player: usize,
        what: &'static str,
    },
    #[error("initial actions do not match the game layout")]
    BadInitialActions,
}

/// Step sizes used in one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSizes {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Step-size schedule. Index `t = 0` always returns `α_0 = β_0 = γ_0 = 1`,
/// which only enters the bound sums; rounds use `t ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    /// `α_t = t^{−a1}`, `β_t = (T+1)^{−a2}`, `γ_t = (T+1)^{−(1−a2)}`.
    Power { a1: f64, a2: f64, horizon: usize },
    /// Same sizes every round; for experiments and tests.
    Constant(StepSizes),
}

impl StepSchedule {
    /// Power schedule with `a1 ∈ (0, ½)` and `a2 ∈ (⅔, 1)`.
    pub fn power(a1: f64, a2: f64, horizon: usize) -> Result<Self, EngineError> {
        if !(a1 > 0.0 && a1 < 0.5) {
            return Err(EngineError::InvalidSchedule(format!("a1 = {a1} must lie in (0, 1/2)")));
        }
        if !(a2 > 2.0 / 3.0 && a2 < 1.0) {
            return Err(EngineError::InvalidSchedule(format!("a2 = {a2} must lie in (2/3, 1)")));
        }
        if horizon < 1 {
            return Err(EngineError::InvalidSchedule("horizon must be at least 1".into()));
        }
        Ok(StepSchedule::Power { a1, a2, horizon })
    }

    pub fn constant(alpha: f64, beta: f64, gamma: f64) -> Result<Self, EngineError> {
        if !(alpha > 0.0 && alpha <= 1.0) || !(beta > 0.0) || !(gamma > 0.0 && gamma < 1.0) {
            return Err(EngineError::InvalidSchedule(format!(
                "constant sizes need α ∈ (0,1], β > 0, γ ∈ (0,1); got ({alpha}, {beta}, {gamma})"
            )));
        }
        Ok(StepSchedule::Constant(StepSizes { alpha, beta, gamma }))
    }

    pub fn sizes(&self, t: usize) -> StepSizes {
        if t == 0 {
            return StepSizes {
                alpha: 1.0,
                beta: 1.0,
                gamma: 1.0,
            };
        }
        match *self {
            StepSchedule::Power { a1, a2, horizon } => {
                let tp1 = (horizon + 1) as f64;
                StepSizes {
                    alpha: (t as f64).powf(-a1),
                    beta: tp1.powf(-a2),
                    gamma: tp1.powf(-(1.0 - a2)),
                }
            }
            StepSchedule::Constant(s) => s,
        }
    }
}

/// What player `i` holds between rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerState {
    pub own_action: Vec<f64>,
    /// Stacked estimates of every player's action; the player's own slot is
    /// unused and kept at zero (the own action lives in `own_action`).
    pub estimates: Vec<f64>,
    pub multiplier: Vec<f64>,
}

impl PlayerState {
    /// `𝐱_{i,t}`: the estimate vector with the own action substituted in slot `i`.
    pub fn assemble(&self, i: usize, layout: &ActionLayout) -> Vec<f64> {
        let mut x = self.estimates.clone();
        x[layout.range(i)].copy_from_slice(&self.own_action);
        x
    }
}

/// One completed round: the states it started from plus the per-round
/// intermediates (mixed duals, proposals, local constraint values).
#[derive(Debug, Clone, PartialEq)]
pub struct RoundSnapshot {
    pub t: usize,
    pub sizes: StepSizes,
    /// States at the start of round `t` (`x_{i,t}`, `x_{ih,t}`, `λ_{i,t}`).
    pub players: Vec<PlayerState>,
    /// `λ̃_{i,t}`.
    pub mixed_multipliers: Vec<Vec<f64>>,
    /// `x̃_{i,t+1}`.
    pub proposals: Vec<Vec<f64>>,
    /// `g_{i,t}(x_{i,t})`.
    pub local_constraints: Vec<Vec<f64>>,
    /// `‖λ_{i,t+1} − λ̃_{i,t}‖`.
    pub dual_perturbations: Vec<f64>,
}

impl RoundSnapshot {
    /// Stacked true action profile `x_t`.
    pub fn action_profile(&self) -> Vec<f64> {
        self.players
            .iter()
            .flat_map(|p| p.own_action.iter().copied())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub snapshots: Vec<RoundSnapshot>,
    /// States after the last round (`x_{i,T+1}`, …).
    pub final_states: Vec<PlayerState>,
}

impl RunTrace {
    pub fn horizon(&self) -> usize {
        self.snapshots.len()
    }

    pub fn action_profiles(&self) -> Vec<Vec<f64>> {
        self.snapshots.iter().map(RoundSnapshot::action_profile).collect()
    }
}

/// `λ̃_i = Σ_j a_ij λ_j` over the nonzero weights of row `i`.
pub fn mix_multipliers(states: &[PlayerState], row: &[(usize, f64)]) -> Vec<f64> {
    let m = states[0].multiplier.len();
    let mut out = vec![0.0; m];
    for &(j, a) in row {
        for (o, l) in out.iter_mut().zip(&states[j].multiplier) {
            *o += a * l;
        }
    }
    out
}

/// New estimates of player `i`: for `h ≠ i`, `x_{ih} ← Σ_k a_ik x_{kh}` where
/// `x_{hh}` is `h`'s own action. Slot `i` stays zero.
pub fn consensus_estimates(
    states: &[PlayerState],
    i: usize,
    row: &[(usize, f64)],
    layout: &ActionLayout,
) -> Vec<f64> {
    let mut out = vec![0.0; layout.total()];
    for h in (0..layout.n_players()).filter(|&h| h != i) {
        let r = layout.range(h);
        for &(k, a) in row {
            let source: &[f64] = if k == h {
                &states[k].own_action
            } else {
                &states[k].estimates[r.clone()]
            };
            for (o, v) in out[r.clone()].iter_mut().zip(source) {
                *o += a * v;
            }
        }
    }
    out
}

/// Mirror step and convex-combination update for player `i`.
/// Returns `(x̃_{i,t+1}, x_{i,t+1})`.
#[allow(clippy::too_many_arguments)]
pub fn primal_step(
    game: &dyn Game,
    geometry: &BregmanGeometry,
    i: usize,
    t: usize,
    state: &PlayerState,
    layout: &ActionLayout,
    mixed_multiplier: &[f64],
    sizes: StepSizes,
) -> Result<(Vec<f64>, Vec<f64>), EngineError> {
    let profile = state.assemble(i, layout);
    let gradient = game.partial_gradient(i, t, &profile);
    let m = game.constraint_dim();
    let n_i = state.own_action.len();
    let jac = game.constraint_jacobian(i, t, &state.own_action);
    let penalty = jacobian_transpose_mul(&jac, m, n_i, mixed_multiplier);
    let direction: Vec<f64> = gradient
        .iter()
        .zip(&penalty)
        .map(|(g, p)| g + sizes.gamma * p)
        .collect();
    if !all_finite(&direction) {
        return Err(EngineError::NonFiniteState {
            t,
            player: i,
            what: "primal direction",
        });
    }
    let set = game.feasible_set(i);
    let proposal = mirror_step(geometry, set, &state.own_action, &direction, sizes.alpha)
        .map_err(|source| EngineError::Geometry { t, player: i, source })?;
    let mut next: Vec<f64> = state
        .own_action
        .iter()
        .zip(&proposal)
        .map(|(x, p)| (1.0 - sizes.alpha) * x + sizes.alpha * p)
        .collect();
    set.clean(&mut next);
    Ok((proposal, next))
}

/// Projected dual update. Returns `(λ_{i,t+1}, b_{i,t+1})`.
pub fn dual_step(
    game: &dyn Game,
    i: usize,
    t: usize,
    own_action: &[f64],
    proposal: &[f64],
    mixed_multiplier: &[f64],
    sizes: StepSizes,
) -> Result<(Vec<f64>, Vec<f64>), EngineError> {
    let m = game.constraint_dim();
    let jac = game.constraint_jacobian(i, t, own_action);
    let step: Vec<f64> = proposal.iter().zip(own_action).map(|(p, x)| p - x).collect();
    let linear = jacobian_mul(&jac, m, own_action.len(), &step);
    let b: Vec<f64> = linear
        .iter()
        .zip(game.local_constraint(i, t, own_action))
        .map(|(l, g)| l + g)
        .collect();
    let next: Vec<f64> = mixed_multiplier
        .iter()
        .zip(&b)
        .map(|(l, bv)| (l + sizes.gamma * (sizes.gamma * bv - sizes.beta * l)).max(0.0))
        .collect();
    if !all_finite(&next) {
        return Err(EngineError::NonFiniteState {
            t,
            player: i,
            what: "multiplier",
        });
    }
    Ok((next, b))
}

/// Round loop over a fixed communication graph.
pub struct Engine<'a> {
    game: &'a dyn Game,
    rows: Vec<Vec<(usize, f64)>>,
    geometries: Vec<BregmanGeometry>,
    schedule: StepSchedule,
    layout: ActionLayout,
    states: Vec<PlayerState>,
    t: usize,
}

impl<'a> Engine<'a> {
    /// Initializes `x_{i,1}` uniformly on `Ω_i` from `seed`, zero estimates
    /// and zero multipliers.
    pub fn new(
        game: &'a dyn Game,
        graph: &GraphTopology,
        geometry: GeometryKind,
        schedule: StepSchedule,
        seed: u64,
    ) -> Result<Self, EngineError> {
        if game.n_players() != graph.n_players() {
            return Err(EngineError::PlayerMismatch {
                game: game.n_players(),
                graph: graph.n_players(),
            });
        }
        let rows = (0..graph.n_players())
            .map(|i| graph.neighbors(i).to_vec())
            .collect();
        Self::with_rows(game, rows, geometry, schedule, seed)
    }

    /// Degenerate single-player engine (`a_11 = 1`, no estimates).
    pub fn single_player(
        game: &'a dyn Game,
        geometry: GeometryKind,
        schedule: StepSchedule,
        seed: u64,
    ) -> Result<Self, EngineError> {
        if game.n_players() != 1 {
            return Err(EngineError::PlayerMismatch {
                game: game.n_players(),
                graph: 1,
            });
        }
        Self::with_rows(game, vec![vec![(0, 1.0)]], geometry, schedule, seed)
    }

    fn with_rows(
        game: &'a dyn Game,
        rows: Vec<Vec<(usize, f64)>>,
        geometry: GeometryKind,
        schedule: StepSchedule,
        seed: u64,
    ) -> Result<Self, EngineError> {
        let layout = game.layout();
        let geometries = (0..game.n_players())
            .map(|i| {
                BregmanGeometry::for_set(geometry, game.feasible_set(i))
                    .map_err(|source| EngineError::Geometry { t: 0, player: i, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let states = initial_states(game, &layout, seed);
        Ok(Self {
            game,
            rows,
            geometries,
            schedule,
            layout,
            states,
            t: 1,
        })
    }

    /// Replaces the initial actions (before the first round).
    pub fn set_initial_actions(&mut self, profile: &[f64]) -> Result<(), EngineError> {
        if self.t != 1 || profile.len() != self.layout.total() {
            return Err(EngineError::BadInitialActions);
        }
        for (i, state) in self.states.iter_mut().enumerate() {
            let block = self.layout.block(profile, i);
            if !self.game.feasible_set(i).contains(block, 1e-12) {
                return Err(EngineError::BadInitialActions);
            }
            state.own_action = block.to_vec();
        }
        Ok(())
    }

    /// Index of the next round to run.
    pub fn round(&self) -> usize {
        self.t
    }

    pub fn states(&self) -> &[PlayerState] {
        &self.states
    }

    pub fn layout(&self) -> &ActionLayout {
        &self.layout
    }

    pub fn schedule(&self) -> StepSchedule {
        self.schedule
    }

    /// Runs round `t` and advances to `t + 1`.
    pub fn step(&mut self) -> Result<RoundSnapshot, EngineError> {
        let t = self.t;
        let sizes = self.schedule.sizes(t);
        let prev = &self.states;
        let n_players = prev.len();

        let mut next = Vec::with_capacity(n_players);
        let mut mixed = Vec::with_capacity(n_players);
        let mut proposals = Vec::with_capacity(n_players);
        let mut constraints = Vec::with_capacity(n_players);
        let mut perturbations = Vec::with_capacity(n_players);
        for i in 0..n_players {
            let row = &self.rows[i];
            let state = &prev[i];
            let lambda_mixed = mix_multipliers(prev, row);
            let (proposal, action) = primal_step(
                self.game,
                &self.geometries[i],
                i,
                t,
                state,
                &self.layout,
                &lambda_mixed,
                sizes,
            )?;
            let (multiplier, _) = dual_step(
                self.game,
                i,
                t,
                &state.own_action,
                &proposal,
                &lambda_mixed,
                sizes,
            )?;
            let estimates = consensus_estimates(prev, i, row, &self.layout);
            if !all_finite(&estimates) {
                return Err(EngineError::NonFiniteState {
                    t,
                    player: i,
                    what: "estimates",
                });
            }
            constraints.push(self.game.local_constraint(i, t, &state.own_action));
            perturbations.push(dist(&multiplier, &lambda_mixed));
            next.push(PlayerState {
                own_action: action,
                estimates,
                multiplier,
            });
            mixed.push(lambda_mixed);
            proposals.push(proposal);
        }

        let players = std::mem::replace(&mut self.states, next);
        self.t += 1;
        Ok(RoundSnapshot {
            t,
            sizes,
            players,
            mixed_multipliers: mixed,
            proposals,
            local_constraints: constraints,
            dual_perturbations: perturbations,
        })
    }

    /// Runs the remaining rounds up to the game horizon.
    pub fn run(mut self) -> Result<RunTrace, EngineError> {
        let mut snapshots = Vec::with_capacity(self.game.horizon());
        while self.t <= self.game.horizon() {
            snapshots.push(self.step()?);
        }
        Ok(RunTrace {
            snapshots,
            final_states: self.states,
        })
    }
}

fn initial_states(game: &dyn Game, layout: &ActionLayout, seed: u64) -> Vec<PlayerState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = game.constraint_dim();
    (0..game.n_players())
        .map(|i| PlayerState {
            own_action: game.feasible_set(i).sample(&mut rng),
            estimates: vec![0.0; layout.total()],
            multiplier: vec![0.0; m],
        })
        .collect()
}

/// Runs the distributed algorithm for the whole horizon.
pub fn run(
    game: &dyn Game,
    graph: &GraphTopology,
    geometry: GeometryKind,
    schedule: StepSchedule,
    seed: u64,
) -> Result<RunTrace, EngineError> {
    Engine::new(game, graph, geometry, schedule, seed)?.run()
}

/// Centralized baseline in which every player sees the true joint action,
/// one shared multiplier and the true aggregate constraint:
///
/// `x_{i,t+1} = argmin α_t⟨x, ∇_i J_{i,t}(x_t) + γ_t ∇g_{i,t}(x_{i,t})ᵀλ_t⟩ + D_φ(x, x_{i,t})`,
/// `λ_{t+1} = [λ_t + γ_t(γ_t g_t(x_t) − β_t λ_t)]_+`.
///
/// Initial actions match [`Engine::new`] for the same seed. Snapshots record
/// the true profile as every player's estimates and `λ_t` as every
/// (mixed) multiplier.
pub fn run_full_information(
    game: &dyn Game,
    geometry: GeometryKind,
    schedule: StepSchedule,
    seed: u64,
) -> Result<RunTrace, EngineError> {
    let layout = game.layout();
    let n_players = game.n_players();
    let m = game.constraint_dim();
    let geometries = (0..n_players)
        .map(|i| {
            BregmanGeometry::for_set(geometry, game.feasible_set(i))
                .map_err(|source| EngineError::Geometry { t: 0, player: i, source })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let init = initial_states(game, &layout, seed);
    let mut x: Vec<f64> = init.iter().flat_map(|s| s.own_action.clone()).collect();
    let mut lambda = vec![0.0; m];
    let mut snapshots = Vec::with_capacity(game.horizon());

    let snapshot_states = |x: &[f64], lambda: &[f64]| -> Vec<PlayerState> {
        (0..n_players)
            .map(|i| PlayerState {
                own_action: layout.block(x, i).to_vec(),
                estimates: x.to_vec(),
                multiplier: lambda.to_vec(),
            })
            .collect()
    };

    for t in 1..=game.horizon() {
        let sizes = schedule.sizes(t);
        let mut next = vec![0.0; x.len()];
        let mut local = Vec::with_capacity(n_players);
        for i in 0..n_players {
            let r = layout.range(i);
            let xi = &x[r.clone()];
            let gradient = game.partial_gradient(i, t, &x);
            let jac = game.constraint_jacobian(i, t, xi);
            let penalty = jacobian_transpose_mul(&jac, m, r.len(), &lambda);
            let direction: Vec<f64> = gradient
                .iter()
                .zip(&penalty)
                .map(|(g, p)| g + sizes.gamma * p)
                .collect();
            if !all_finite(&direction) {
                return Err(EngineError::NonFiniteState {
                    t,
                    player: i,
                    what: "primal direction",
                });
            }
            let set: &FeasibleSet = game.feasible_set(i);
            let mut xi_next = mirror_step(&geometries[i], set, xi, &direction, sizes.alpha)
                .map_err(|source| EngineError::Geometry { t, player: i, source })?;
            set.clean(&mut xi_next);
            next[r].copy_from_slice(&xi_next);
            local.push(game.local_constraint(i, t, xi));
        }
        let g = aggregate_constraint(game, t, &x);
        let lambda_next: Vec<f64> = lambda
            .iter()
            .zip(&g)
            .map(|(l, gv)| (l + sizes.gamma * (sizes.gamma * gv - sizes.beta * l)).max(0.0))
            .collect();

        let perturbation = dist(&lambda_next, &lambda);
        snapshots.push(RoundSnapshot {
            t,
            sizes,
            players: snapshot_states(&x, &lambda),
            mixed_multipliers: vec![lambda.clone(); n_players],
            proposals: (0..n_players).map(|i| layout.block(&next, i).to_vec()).collect(),
            local_constraints: local,
            dual_perturbations: vec![perturbation; n_players],
        });
        x = next;
        lambda = lambda_next;
    }
    Ok(RunTrace {
        snapshots,
        final_states: snapshot_states(&x, &lambda),
    })
}

/// `‖e_{i,t}‖`: distance between the other players' estimates of player `i`
/// and `x_{i,t}`.
pub fn estimate_error(players: &[PlayerState], i: usize, layout: &ActionLayout) -> f64 {
    let r = layout.range(i);
    let own = &players[i].own_action;
    let mut sq = 0.0;
    for (h, p) in players.iter().enumerate() {
        if h != i {
            let d = dist(&p.estimates[r.clone()], own);
            sq += d * d;
        }
    }
    sq.sqrt()
}

/// `‖λ_{i,t}‖` for every player.
pub fn multiplier_norms(players: &[PlayerState]) -> Vec<f64> {
    players.iter().map(|p| norm(&p.multiplier)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::CournotGame;

    fn state(action: Vec<f64>, estimates: Vec<f64>, multiplier: Vec<f64>) -> PlayerState {
        PlayerState {
            own_action: action,
            estimates,
            multiplier,
        }
    }

    #[test]
    fn schedule_values_and_ranges() {
        let s = StepSchedule::power(0.2, 0.8, 2000).unwrap();
        let z = s.sizes(0);
        assert_eq!((z.alpha, z.beta, z.gamma), (1.0, 1.0, 1.0));
        let one = s.sizes(1);
        assert_eq!(one.alpha, 1.0);
        assert!((one.beta - 2001f64.powf(-0.8)).abs() < 1e-15);
        assert!((one.gamma - 2001f64.powf(-0.2)).abs() < 1e-15);
        assert!((s.sizes(32).alpha - 0.5).abs() < 1e-12);

        assert!(StepSchedule::power(0.5, 0.8, 10).is_err());
        assert!(StepSchedule::power(0.0, 0.8, 10).is_err());
        assert!(StepSchedule::power(0.2, 2.0 / 3.0, 10).is_err());
        assert!(StepSchedule::power(0.2, 1.0, 10).is_err());
        assert!(StepSchedule::constant(1.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn schedule_invariants_hold_for_all_rounds() {
        let horizon = 500;
        let s = StepSchedule::power(0.3, 0.75, horizon).unwrap();
        for t in 1..=horizon {
            let now = s.sizes(t);
            let next = s.sizes(t + 1);
            assert!(now.gamma > 0.0 && now.gamma < 1.0);
            assert!(now.alpha > 0.0 && now.alpha <= 1.0);
            assert!(next.alpha <= now.alpha);
            assert!(now.gamma / now.beta <= next.gamma / next.beta);
            if t >= 2 {
                let prev = s.sizes(t - 1);
                assert!(1.0 / now.gamma - 1.0 / prev.gamma - now.beta <= 0.0);
            }
        }
    }

    #[test]
    fn consensus_fixed_point() {
        let g = GraphTopology::path(3).unwrap();
        let layout = ActionLayout::new([1, 1, 1]);
        let v = 4.5;
        let states: Vec<_> = (0..3)
            .map(|i| {
                let mut est = vec![v; 3];
                est[i] = 0.0;
                state(vec![v], est, vec![0.0])
            })
            .collect();
        for i in 0..3 {
            let out = consensus_estimates(&states, i, g.neighbors(i), &layout);
            for h in (0..3).filter(|&h| h != i) {
                assert!((out[h] - v).abs() < 1e-15);
            }
            assert_eq!(out[i], 0.0);
        }
    }

    #[test]
    fn consensus_path3_hand_evaluation() {
        // everyone's view of player 3 is (0, 0, 9): players 1 and 2 estimate 0,
        // player 3 holds 9
        let g = GraphTopology::path(3).unwrap();
        let layout = ActionLayout::new([1, 1, 1]);
        let states = vec![
            state(vec![1.0], vec![0.0, 0.0, 0.0], vec![0.0]),
            state(vec![2.0], vec![0.0, 0.0, 0.0], vec![0.0]),
            state(vec![9.0], vec![0.0, 0.0, 0.0], vec![0.0]),
        ];
        let p1 = consensus_estimates(&states, 0, g.neighbors(0), &layout);
        let p2 = consensus_estimates(&states, 1, g.neighbors(1), &layout);
        assert!((p1[2] - 0.0).abs() < 1e-15);
        assert!((p2[2] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn dual_step_hand_evaluation() {
        let game = CournotGame::new(2, 5).unwrap();
        let sizes = StepSizes {
            alpha: 1.0,
            beta: 0.1,
            gamma: 0.5,
        };
        // b = (x̃ − x) + x − b_t = x̃ − b_t; pick x̃ = b_t + 2 so b = 2
        let t = 3;
        let proposal = [CournotGame::local_bound(t) + 2.0];
        let (next, b) = dual_step(&game, 0, t, &[4.0], &proposal, &[1.0], sizes).unwrap();
        assert!((b[0] - 2.0).abs() < 1e-12);
        assert!((next[0] - 1.45).abs() < 1e-12);

        // zero mixed dual and nonpositive b clamp to zero
        let (next, b) = dual_step(&game, 0, t, &[4.0], &[0.0], &[0.0], sizes).unwrap();
        assert!(b[0] <= 0.0);
        assert_eq!(next, vec![0.0]);
    }

    #[test]
    fn primal_step_degenerate_cases() {
        let game = CournotGame::new(2, 5).unwrap();
        let layout = game.layout();
        let geometry = BregmanGeometry::for_set(GeometryKind::Euclidean, game.feasible_set(0)).unwrap();
        let st = state(vec![7.0], vec![0.0, 3.0], vec![0.0]);
        let sizes = StepSizes {
            alpha: 1.0,
            beta: 0.1,
            gamma: 0.5,
        };
        let (proposal, next) =
            primal_step(&game, &geometry, 0, 2, &st, &layout, &[0.0], sizes).unwrap();
        assert_eq!(proposal, next);
    }
}
