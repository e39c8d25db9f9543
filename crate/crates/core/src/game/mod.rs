//! Time-varying games with a separable shared constraint `Σ_i g_{i,t}(x_i) ≤ 0`.
//!
//! A game is a set of deterministic oracles implementing [`Game`]. Joint
//! profiles are passed around as one stacked `&[f64]`; [`ActionLayout`]
//! maps a player to its slice. Oracles are total on ℝⁿ: the engine evaluates
//! them at gossiped estimates that may sit outside the feasible sets.

mod cournot;
mod simplex;

pub use cournot::CournotGame;
pub use simplex::{SimplexTestGame, SimplexTestParams};

use std::ops::Range;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::FeasibleSet;
use crate::vecops::{dist, dot, norm};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("invalid game parameter: {0}")]
    InvalidParameter(String),
    #[error("assumption violated: {0}")]
    AssumptionViolation(String),
}

/// Oracle set of a time-varying game. Round indices `t` start at 1.
pub trait Game: Send + Sync {
    fn name(&self) -> &str;

    fn n_players(&self) -> usize;

    fn horizon(&self) -> usize;

    /// Dimension `m` of the shared constraint.
    fn constraint_dim(&self) -> usize;

    fn feasible_set(&self, i: usize) -> &FeasibleSet;

    fn action_dim(&self, i: usize) -> usize {
        self.feasible_set(i).dim()
    }

    /// `J_{i,t}(x)` at the stacked profile `x`.
    fn cost(&self, i: usize, t: usize, x: &[f64]) -> f64;

    /// `∇_i J_{i,t}(x)`, length `n_i`.
    fn partial_gradient(&self, i: usize, t: usize, x: &[f64]) -> Vec<f64>;

    /// `g_{i,t}(x_i)`, length `m`.
    fn local_constraint(&self, i: usize, t: usize, xi: &[f64]) -> Vec<f64>;

    /// `∇g_{i,t}(x_i)` as a row-major `m × n_i` matrix.
    fn constraint_jacobian(&self, i: usize, t: usize, xi: &[f64]) -> Vec<f64>;

    /// A stacked profile in `Ω_1 × … × Ω_N` with `g_t < 0` strictly.
    fn slater_point(&self, t: usize) -> Vec<f64>;

    /// Closed-form `(L, M)` when the game admits one.
    fn analytic_bounds(&self) -> Option<(f64, f64)> {
        None
    }

    fn layout(&self) -> ActionLayout {
        ActionLayout::new((0..self.n_players()).map(|i| self.action_dim(i)))
    }
}

/// Offsets of each player's block inside a stacked profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionLayout {
    offsets: Vec<usize>,
}

impl ActionLayout {
    pub fn new(dims: impl IntoIterator<Item = usize>) -> Self {
        let mut offsets = vec![0];
        for d in dims {
            let last = *offsets.last().unwrap();
            offsets.push(last + d);
        }
        Self { offsets }
    }

    pub fn n_players(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn dim(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn block<'a>(&self, x: &'a [f64], i: usize) -> &'a [f64] {
        &x[self.range(i)]
    }
}

/// `F_t(x)`: the stacked partial gradients.
pub fn pseudo_gradient(game: &dyn Game, t: usize, x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    for i in 0..game.n_players() {
        out.extend(game.partial_gradient(i, t, x));
    }
    out
}

/// `g_t(x) = Σ_i g_{i,t}(x_i)`.
pub fn aggregate_constraint(game: &dyn Game, t: usize, x: &[f64]) -> Vec<f64> {
    let layout = game.layout();
    let mut total = vec![0.0; game.constraint_dim()];
    for i in 0..game.n_players() {
        for (acc, v) in total
            .iter_mut()
            .zip(game.local_constraint(i, t, layout.block(x, i)))
        {
            *acc += v;
        }
    }
    total
}

/// `Jᵀ λ` for a row-major `m × n` matrix.
pub fn jacobian_transpose_mul(jac: &[f64], m: usize, n: usize, lambda: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for r in 0..m {
        for c in 0..n {
            out[c] += jac[r * n + c] * lambda[r];
        }
    }
    out
}

/// `J v` for a row-major `m × n` matrix.
pub fn jacobian_mul(jac: &[f64], m: usize, n: usize, v: &[f64]) -> Vec<f64> {
    (0..m).map(|r| dot(&jac[r * n..(r + 1) * n], v)).collect()
}

/// Bound and regularity constants of a game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameConstants {
    /// Common bound on `‖x_i‖`, `|J_{i,t}|`, `‖g_{i,t}‖` over the feasible sets.
    pub l: f64,
    /// Common bound on `‖∇_i J_{i,t}‖` and `‖∇g_{i,t}‖`.
    pub m: f64,
    /// Lipschitz constant of each `∇_i J_{i,t}` in the full profile.
    pub h: f64,
    /// Strong monotonicity modulus of `F_t`.
    pub mu: f64,
}

impl GameConstants {
    /// `F = 2LM + 2L`, the per-round bound on the dual perturbation (over γ_t²).
    pub fn dual_perturbation_factor(&self) -> f64 {
        2.0 * self.l * self.m + 2.0 * self.l
    }
}

const SAMPLED_INFLATION: f64 = 1.25;
pub const MIN_CONSTANT_SAMPLES: usize = 10_000;

/// Estimates `(L, M, H, μ)` from seeded samples of feasible profile pairs.
///
/// `L` and `M` come from [`Game::analytic_bounds`] when available and are
/// otherwise sampled maxima inflated by 25%. `H` is an inflated sampled
/// maximum; `μ` is the smallest sampled monotonicity ratio.
pub fn estimate_constants(
    game: &dyn Game,
    samples: usize,
    seed: u64,
) -> Result<GameConstants, GameError> {
    let samples = samples.max(MIN_CONSTANT_SAMPLES);
    let n_players = game.n_players();
    let layout = game.layout();
    let horizon = game.horizon().max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut sup_x: f64 = (0..n_players)
        .map(|i| game.feasible_set(i).radius())
        .fold(0.0, f64::max);
    let mut sup_j: f64 = 0.0;
    let mut sup_g: f64 = 0.0;
    let mut sup_grad: f64 = 0.0;
    let mut sup_jac: f64 = 0.0;
    let mut sup_h: f64 = 0.0;
    let mut min_mu = f64::INFINITY;

    let sample_profile = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let mut x = Vec::with_capacity(layout.total());
        for i in 0..n_players {
            x.extend(game.feasible_set(i).sample(rng));
        }
        x
    };

    for _ in 0..samples {
        let t = rng.gen_range(1..=horizon);
        let x = sample_profile(&mut rng);
        let y = sample_profile(&mut rng);
        let gap = dist(&x, &y);

        let fx = pseudo_gradient(game, t, &x);
        let fy = pseudo_gradient(game, t, &y);
        for i in 0..n_players {
            let r = layout.range(i);
            let xi = &x[r.clone()];
            sup_x = sup_x.max(norm(xi));
            sup_j = sup_j.max(game.cost(i, t, &x).abs());
            sup_g = sup_g.max(norm(&game.local_constraint(i, t, xi)));
            sup_grad = sup_grad.max(norm(&fx[r.clone()]));
            sup_jac = sup_jac.max(norm(&game.constraint_jacobian(i, t, xi)));
            if gap > 1e-12 {
                sup_h = sup_h.max(dist(&fx[r.clone()], &fy[r]) / gap);
            }
        }
        if gap > 1e-12 {
            let diff: Vec<f64> = fx.iter().zip(&fy).map(|(a, b)| a - b).collect();
            let dx: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            min_mu = min_mu.min(dot(&diff, &dx) / (gap * gap));
        }
    }

    if !(min_mu > 0.0) {
        return Err(GameError::AssumptionViolation(format!(
            "pseudo-gradient is not strongly monotone on sampled pairs (mu_hat = {min_mu})"
        )));
    }

    let (l, m) = match game.analytic_bounds() {
        Some(bounds) => bounds,
        None => (
            SAMPLED_INFLATION * sup_x.max(sup_j).max(sup_g),
            SAMPLED_INFLATION * sup_grad.max(sup_jac),
        ),
    };
    Ok(GameConstants {
        l,
        m,
        h: SAMPLED_INFLATION * sup_h,
        mu: min_mu,
    })
}
