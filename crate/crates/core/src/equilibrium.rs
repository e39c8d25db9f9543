//! Centralized reference solution of the per-round variational GNE.
//!
//! The variational GNE `x*_t` solves `F_t(x*)ᵀ(x − x*) ≥ 0` over
//! `Ω_t = {x ∈ Ω_1 × … × Ω_N : g_t(x) ≤ 0}`. It is computed from the KKT
//! saddle operator `G(x, λ) = (F_t(x) + ∇g_t(x)ᵀλ, −g_t(x))` on
//! `Ω × ℝ^m_+` with a projected extragradient iteration whose step is
//! halved until a local Lipschitz test passes. The result carries a KKT
//! certificate: natural-map residual, feasibility and complementarity.

use std::collections::VecDeque;

use thiserror::Error;

use crate::game::{jacobian_transpose_mul, pseudo_gradient, ActionLayout, Game};
use crate::vecops::{all_finite, dist, dot, norm};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    #[error("round {t}: no convergence after {iterations} iterations (KKT residual {residual:e})")]
    NoConvergence {
        t: usize,
        iterations: usize,
        residual: f64,
    },
    #[error("round {t}: no strictly feasible point for the shared constraint")]
    InfeasibleProblem { t: usize },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Initial `(x, λ)`; defaults to `(P_Ω(0), 0)`.
    pub warm_start: Option<(Vec<f64>, Vec<f64>)>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 200_000,
            warm_start: None,
        }
    }
}

/// Variational GNE of one round with its KKT certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct GneSolution {
    pub t: usize,
    pub actions: Vec<f64>,
    pub multiplier: Vec<f64>,
    pub kkt_residual: f64,
    pub iterations: usize,
    /// Residuals of the final (at most 100) iterations, oldest first.
    pub residual_tail: Vec<f64>,
}

// Stop well below the requested tolerance so that distinct starting points
// land within a few multiples of `tol` of each other.
const TARGET_FACTOR: f64 = 1e-2;
const RESIDUAL_FLOOR: f64 = 1e-13;
const LIPSCHITZ_SAFETY: f64 = 0.9;
const MIN_STEP: f64 = 1e-12;
const TAIL_LEN: usize = 100;

struct Saddle<'a> {
    game: &'a dyn Game,
    layout: ActionLayout,
    t: usize,
    m: usize,
}

impl Saddle<'_> {
    fn project(&self, x: &mut [f64], lambda: &mut [f64]) {
        for i in 0..self.game.n_players() {
            let r = self.layout.range(i);
            let p = self.game.feasible_set(i).project(&x[r.clone()]);
            x[r].copy_from_slice(&p);
        }
        for l in lambda.iter_mut() {
            *l = l.max(0.0);
        }
    }

    /// Returns `(F(x) + ∇g(x)ᵀλ, −g(x))`.
    fn operator(&self, x: &[f64], lambda: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut primal = pseudo_gradient(self.game, self.t, x);
        let mut g = vec![0.0; self.m];
        for i in 0..self.game.n_players() {
            let r = self.layout.range(i);
            let xi = &x[r.clone()];
            let n_i = r.len();
            let jac = self.game.constraint_jacobian(i, self.t, xi);
            for (p, v) in primal[r].iter_mut().zip(jacobian_transpose_mul(&jac, self.m, n_i, lambda)) {
                *p += v;
            }
            for (acc, v) in g.iter_mut().zip(self.game.local_constraint(i, self.t, xi)) {
                *acc += v;
            }
        }
        (primal, g.into_iter().map(|v| -v).collect())
    }

    /// KKT residual given the operator value `(primal, neg_g)` at `(x, λ)`.
    fn residual_at(&self, x: &[f64], lambda: &[f64], primal: &[f64], neg_g: &[f64]) -> f64 {
        let mut probe: Vec<f64> = x.iter().zip(primal).map(|(a, b)| a - b).collect();
        let mut dummy = [];
        self.project(&mut probe, &mut dummy);
        let stationarity = dist(x, &probe);
        let infeasibility = norm(&neg_g.iter().map(|v| (-v).max(0.0)).collect::<Vec<_>>());
        let complementarity = dot(lambda, neg_g).abs();
        stationarity.max(infeasibility).max(complementarity)
    }
}

/// Solves for the variational GNE of round `t`.
pub fn solve_vgne(
    game: &dyn Game,
    t: usize,
    options: &SolverOptions,
) -> Result<GneSolution, EquilibriumError> {
    let m = game.constraint_dim();
    let n = game.layout().total();
    check_slater(game, t)?;

    let saddle = Saddle {
        game,
        layout: game.layout(),
        t,
        m,
    };
    let (mut x0, mut l0) = match &options.warm_start {
        Some((x, l)) if x.len() == n && l.len() == m => (x.clone(), l.clone()),
        Some(_) => {
            return Err(EquilibriumError::LengthMismatch(
                "warm start does not match the game dimensions".into(),
            ))
        }
        None => (vec![0.0; n], vec![0.0; m]),
    };
    saddle.project(&mut x0, &mut l0);

    let target = (options.tol * TARGET_FACTOR).max(RESIDUAL_FLOOR);
    let mut step = 1.0;
    'restart: loop {
        let (mut x, mut lambda) = (x0.clone(), l0.clone());
        let (mut gx, mut gl) = saddle.operator(&x, &lambda);
        let mut residual = saddle.residual_at(&x, &lambda, &gx, &gl);
        let start_residual = residual.max(1.0);
        let mut tail = VecDeque::with_capacity(TAIL_LEN);
        for iteration in 0..options.max_iters {
            if residual <= target {
                return Ok(finish(t, x, lambda, residual, iteration, tail));
            }
            // predictor with backtracking on the local Lipschitz ratio
            let (hx, hl) = loop {
                let mut y: Vec<f64> = x.iter().zip(&gx).map(|(a, b)| a - step * b).collect();
                let mut yl: Vec<f64> = lambda.iter().zip(&gl).map(|(a, b)| a - step * b).collect();
                saddle.project(&mut y, &mut yl);
                let (hx, hl) = saddle.operator(&y, &yl);
                let op_gap = (dist(&hx, &gx).powi(2) + dist(&hl, &gl).powi(2)).sqrt();
                let pt_gap = (dist(&y, &x).powi(2) + dist(&yl, &lambda).powi(2)).sqrt();
                if step * op_gap <= LIPSCHITZ_SAFETY * pt_gap || pt_gap == 0.0 {
                    break (hx, hl);
                }
                step *= 0.5;
                if step < MIN_STEP {
                    return Err(EquilibriumError::NoConvergence {
                        t,
                        iterations: iteration,
                        residual,
                    });
                }
            };
            x = x.iter().zip(&hx).map(|(a, b)| a - step * b).collect();
            lambda = lambda.iter().zip(&hl).map(|(a, b)| a - step * b).collect();
            saddle.project(&mut x, &mut lambda);

            (gx, gl) = saddle.operator(&x, &lambda);
            residual = saddle.residual_at(&x, &lambda, &gx, &gl);
            if !residual.is_finite() || !all_finite(&x) || residual > 1e6 * start_residual {
                step *= 0.5;
                continue 'restart;
            }
            if tail.len() == TAIL_LEN {
                tail.pop_front();
            }
            tail.push_back(residual);
        }
        if residual <= options.tol {
            return Ok(finish(t, x, lambda, residual, options.max_iters, tail));
        }
        return Err(EquilibriumError::NoConvergence {
            t,
            iterations: options.max_iters,
            residual,
        });
    }
}

fn finish(
    t: usize,
    actions: Vec<f64>,
    multiplier: Vec<f64>,
    kkt_residual: f64,
    iterations: usize,
    tail: VecDeque<f64>,
) -> GneSolution {
    GneSolution {
        t,
        actions,
        multiplier,
        kkt_residual,
        iterations,
        residual_tail: tail.into_iter().collect(),
    }
}

fn check_slater(game: &dyn Game, t: usize) -> Result<(), EquilibriumError> {
    let x = game.slater_point(t);
    let layout = game.layout();
    let inside = (0..game.n_players())
        .all(|i| game.feasible_set(i).contains(layout.block(&x, i), 0.0));
    let g = crate::game::aggregate_constraint(game, t, &x);
    if inside && g.iter().all(|v| *v < 0.0) {
        Ok(())
    } else {
        Err(EquilibriumError::InfeasibleProblem { t })
    }
}

/// Reference GNE for every round `1..=T`, warm-started round to round.
#[derive(Debug, Clone)]
pub struct GneSequence {
    pub solutions: Vec<GneSolution>,
}

impl GneSequence {
    pub fn solve(game: &dyn Game, tol: f64, max_iters: usize) -> Result<Self, EquilibriumError> {
        let mut solutions: Vec<GneSolution> = Vec::with_capacity(game.horizon());
        for t in 1..=game.horizon() {
            let warm_start = solutions
                .last()
                .map(|s| (s.actions.clone(), s.multiplier.clone()));
            let options = SolverOptions {
                tol,
                max_iters,
                warm_start,
            };
            solutions.push(solve_vgne(game, t, &options)?);
        }
        Ok(Self { solutions })
    }

    pub fn actions(&self) -> Vec<Vec<f64>> {
        self.solutions.iter().map(|s| s.actions.clone()).collect()
    }

    /// `Λ = max_t ‖λ*_t‖` over the sequence.
    pub fn multiplier_bound(&self) -> f64 {
        self.solutions
            .iter()
            .map(|s| norm(&s.multiplier))
            .fold(0.0, f64::max)
    }

    pub fn max_kkt_residual(&self) -> f64 {
        self.solutions
            .iter()
            .map(|s| s.kkt_residual)
            .fold(0.0, f64::max)
    }
}

/// `Σ_t ‖x*_{t+1} − x*_t‖` over consecutive profiles. With `T` profiles and
/// the convention `x*_{T+1} := x*_T` this is the path length up to `T`.
pub fn path_length(sequence: &[Vec<f64>]) -> Result<f64, EquilibriumError> {
    if let Some(first) = sequence.first() {
        if let Some(bad) = sequence.iter().position(|x| x.len() != first.len()) {
            return Err(EquilibriumError::LengthMismatch(format!(
                "profile {bad} has length {}, expected {}",
                sequence[bad].len(),
                first.len()
            )));
        }
    }
    Ok(sequence.windows(2).map(|w| dist(&w[1], &w[0])).sum())
}

/// Published closed-form Cournot reference for firm `i` (1-based):
/// `clip((i − 10)/9 + (10 − i)/2 · sin(t/12), 0, 30)`.
pub fn cournot_closed_form(i: usize, t: usize) -> f64 {
    cournot_closed_form_at_season(i, (t as f64 / 12.0).sin())
}

pub(crate) fn cournot_closed_form_at_season(i: usize, season: f64) -> f64 {
    let firm = i as f64;
    ((firm - 10.0) / 9.0 + (10.0 - firm) / 2.0 * season).clamp(0.0, 30.0)
}

/// Closed-form profile for all `n` firms at round `t`.
pub fn cournot_closed_form_profile(n: usize, t: usize) -> Vec<f64> {
    (1..=n).map(|i| cournot_closed_form(i, t)).collect()
}

/// `∞`-norm gap between two equally sized profiles.
pub fn max_abs_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{CournotGame, SimplexTestGame, SimplexTestParams};
    use crate::geometry::project_simplex;

    #[test]
    fn closed_form_examples() {
        for t in [1, 17, 400] {
            assert_eq!(cournot_closed_form(10, t), 0.0);
        }
        assert_eq!(cournot_closed_form_at_season(19, 0.0), 1.0);
        assert_eq!(cournot_closed_form_at_season(1, 0.0), 0.0);
    }

    #[test]
    fn path_length_examples() {
        let constant = vec![vec![1.0, 2.0]; 5];
        assert_eq!(path_length(&constant).unwrap(), 0.0);
        let hop = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        assert_eq!(path_length(&hop).unwrap(), 1.0);
        assert!(path_length(&[vec![0.0], vec![0.0, 1.0]]).is_err());
        assert_eq!(path_length(&[]).unwrap(), 0.0);
    }

    #[test]
    fn decoupled_simplex_game_is_projection() {
        let mut p = SimplexTestParams::standard(3, 20);
        p.coupling = 0.0;
        p.budget = None;
        p.targets = vec![vec![0.9, 0.4, -0.1], vec![0.2, 0.2, 0.2], vec![1.0, 0.0, 0.0]];
        let game = SimplexTestGame::new(p).unwrap();
        for t in [1, 7, 20] {
            let sol = solve_vgne(&game, t, &SolverOptions::default()).unwrap();
            for i in 0..3 {
                let expected = project_simplex(&game.target(i, t));
                let got = &sol.actions[3 * i..3 * i + 3];
                assert!(max_abs_gap(got, &expected) <= 1e-8, "player {i} t {t}");
            }
            assert!(sol.kkt_residual <= 1e-8);
        }
    }

    #[test]
    fn uniform_targets_give_uniform_equilibrium() {
        let mut p = SimplexTestParams::standard(2, 5);
        p.coupling = 0.0;
        p.budget = None;
        p.drift = 0.0;
        p.targets = vec![vec![1.0 / 3.0; 3]; 2];
        let game = SimplexTestGame::new(p).unwrap();
        let sol = solve_vgne(&game, 1, &SolverOptions::default()).unwrap();
        for v in sol.actions {
            assert!((v - 1.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn active_budget_gets_positive_multiplier() {
        let game = SimplexTestGame::new(SimplexTestParams::standard(6, 50)).unwrap();
        let sol = solve_vgne(&game, 10, &SolverOptions::default()).unwrap();
        assert!(sol.kkt_residual <= 1e-8);
        assert!(sol.multiplier[0] > 0.0);
        let g = crate::game::aggregate_constraint(&game, 10, &sol.actions);
        assert!(g[0].abs() < 1e-8);
    }

    #[test]
    fn cournot_residual_tail_is_monotone() {
        let game = CournotGame::new(20, 50).unwrap();
        let sol = solve_vgne(&game, 25, &SolverOptions::default()).unwrap();
        assert!(sol.residual_tail.len() >= 2);
        for w in sol.residual_tail.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "{:?}", w);
        }
    }

    #[test]
    fn infeasible_budget_is_reported() {
        struct NoSlack(CournotGame);
        impl Game for NoSlack {
            fn name(&self) -> &str {
                "no_slack"
            }
            fn n_players(&self) -> usize {
                self.0.n_players()
            }
            fn horizon(&self) -> usize {
                self.0.horizon()
            }
            fn constraint_dim(&self) -> usize {
                1
            }
            fn feasible_set(&self, i: usize) -> &crate::geometry::FeasibleSet {
                self.0.feasible_set(i)
            }
            fn cost(&self, i: usize, t: usize, x: &[f64]) -> f64 {
                self.0.cost(i, t, x)
            }
            fn partial_gradient(&self, i: usize, t: usize, x: &[f64]) -> Vec<f64> {
                self.0.partial_gradient(i, t, x)
            }
            fn local_constraint(&self, _i: usize, _t: usize, xi: &[f64]) -> Vec<f64> {
                vec![xi[0]]
            }
            fn constraint_jacobian(&self, _i: usize, _t: usize, _xi: &[f64]) -> Vec<f64> {
                vec![1.0]
            }
            fn slater_point(&self, _t: usize) -> Vec<f64> {
                vec![0.0; self.0.n_players()]
            }
        }
        let game = NoSlack(CournotGame::new(3, 5).unwrap());
        assert_eq!(
            solve_vgne(&game, 2, &SolverOptions::default()),
            Err(EquilibriumError::InfeasibleProblem { t: 2 })
        );
    }
}
