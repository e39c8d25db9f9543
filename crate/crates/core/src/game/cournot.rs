use super::{Game, GameError};
use crate::geometry::FeasibleSet;

const CAPACITY_MAX: f64 = 30.0;

/// Time-varying Nash-Cournot market.
///
/// Firm `i` (1-based in the formulas) produces `x_i ∈ [0, 30]` at cost
/// `x_i(sin(t/12) + 1)` and sells at price
/// `22 + i/9 − 0.5·i·sin(t/12) − Σ_j x_j`, so
/// `J_{i,t}(x) = x_i(sin(t/12) + 1) − x_i·price`. The shared market
/// capacity constraint is `Σ_i (x_i − b_{i,t}) ≤ 0` with
/// `b_{i,t} = 10 + sin(t/12)`.
#[derive(Debug, Clone)]
pub struct CournotGame {
    n_players: usize,
    horizon: usize,
    set: FeasibleSet,
}

impl CournotGame {
    pub fn new(n_players: usize, horizon: usize) -> Result<Self, GameError> {
        if n_players < 2 {
            return Err(GameError::InvalidParameter(format!(
                "Cournot game needs at least 2 firms, got {n_players}"
            )));
        }
        if horizon < 1 {
            return Err(GameError::InvalidParameter("horizon must be at least 1".into()));
        }
        Ok(Self {
            n_players,
            horizon,
            set: FeasibleSet::uniform_box(1, 0.0, CAPACITY_MAX).expect("static box"),
        })
    }

    fn season(t: usize) -> f64 {
        (t as f64 / 12.0).sin()
    }

    /// Price intercept `22 + i/9 − 0.5·i·sin(t/12)` for 0-based player `i`.
    fn intercept(i: usize, s: f64) -> f64 {
        let firm = (i + 1) as f64;
        22.0 + firm / 9.0 - 0.5 * firm * s
    }

    /// Local capacity share `b_{i,t}`.
    pub fn local_bound(t: usize) -> f64 {
        10.0 + Self::season(t)
    }

    fn season_range(&self) -> (f64, f64) {
        (1..=self.horizon)
            .map(Self::season)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s), hi.max(s))
            })
    }
}

impl Game for CournotGame {
    fn name(&self) -> &str {
        "cournot"
    }

    fn n_players(&self) -> usize {
        self.n_players
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn constraint_dim(&self) -> usize {
        1
    }

    fn feasible_set(&self, _i: usize) -> &FeasibleSet {
        &self.set
    }

    fn cost(&self, i: usize, t: usize, x: &[f64]) -> f64 {
        let s = Self::season(t);
        let total: f64 = x.iter().sum();
        let price = Self::intercept(i, s) - total;
        x[i] * (s + 1.0) - x[i] * price
    }

    fn partial_gradient(&self, i: usize, t: usize, x: &[f64]) -> Vec<f64> {
        let s = Self::season(t);
        let total: f64 = x.iter().sum();
        vec![s + 1.0 - Self::intercept(i, s) + total + x[i]]
    }

    fn local_constraint(&self, _i: usize, t: usize, xi: &[f64]) -> Vec<f64> {
        vec![capacity_slack(xi[0], Self::season(t))]
    }

    fn constraint_jacobian(&self, _i: usize, _t: usize, _xi: &[f64]) -> Vec<f64> {
        vec![1.0]
    }

    fn slater_point(&self, _t: usize) -> Vec<f64> {
        vec![0.0; self.n_players]
    }

    /// Interval bounds over `[0, 30]^N` and the seasons reached for `t ∈ [T]`.
    ///
    /// With `R = Σ_{j≠i} x_j` and `k(s) = s(1 + 0.5·i) − 21 − i/9`,
    /// `J_i = x_i² + x_i(k(s) + R)` and `∇_i J_i = 2x_i + k(s) + R`.
    /// Both are affine in `(s, R)`; in `x_i` the cost is convex, so its
    /// extremes sit at the box ends or at the vertex `−(k + R)/2`.
    fn analytic_bounds(&self) -> Option<(f64, f64)> {
        let (s_lo, s_hi) = self.season_range();
        let r_hi = CAPACITY_MAX * (self.n_players - 1) as f64;
        let mut sup_cost: f64 = 0.0;
        let mut sup_grad: f64 = 0.0;
        for i in 0..self.n_players {
            let firm = (i + 1) as f64;
            let k = |s: f64| s * (1.0 + 0.5 * firm) - 21.0 - firm / 9.0;
            let c_values = [k(s_lo), k(s_hi), k(s_lo) + r_hi, k(s_hi) + r_hi];
            let mut xs = vec![0.0, CAPACITY_MAX];
            xs.extend(c_values.iter().map(|c| (-c / 2.0).clamp(0.0, CAPACITY_MAX)));
            for &x in &xs {
                for &c in &c_values {
                    sup_cost = sup_cost.max((x * x + x * c).abs());
                }
            }
            for &c in &c_values {
                for x in [0.0, CAPACITY_MAX] {
                    sup_grad = sup_grad.max((2.0 * x + c).abs());
                }
            }
        }
        let sup_constraint = [s_lo, s_hi]
            .iter()
            .flat_map(|s| [0.0, CAPACITY_MAX].map(|x| (x - 10.0 - s).abs()))
            .fold(0.0, f64::max);
        let l = CAPACITY_MAX.max(sup_cost).max(sup_constraint);
        let m = sup_grad.max(1.0);
        Some((l, m))
    }
}

fn capacity_slack(x: f64, season: f64) -> f64 {
    x - (10.0 + season)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{aggregate_constraint, estimate_constants};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gradient_formula_matches_hand_derivation() {
        let game = CournotGame::new(20, 100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let t = rng.gen_range(1..=100);
            let x: Vec<f64> = (0..20).map(|_| rng.gen_range(0.0..30.0)).collect();
            let s = (t as f64 / 12.0).sin();
            let total: f64 = x.iter().sum();
            for i in 0..20 {
                let firm = (i + 1) as f64;
                let expected = s + 1.0 - (22.0 + firm / 9.0 - 0.5 * firm * s) + total + x[i];
                let got = game.partial_gradient(i, t, &x)[0];
                assert!((got - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constraint_example() {
        // no integer t has sin(t/12) = 0.5 exactly
        assert_eq!(capacity_slack(10.0, 0.5), -0.5);
        let game = CournotGame::new(20, 10).unwrap();
        let s = (7.0f64 / 12.0).sin();
        assert!((game.local_constraint(4, 7, &[10.0])[0] + s).abs() < 1e-15);
    }

    #[test]
    fn slater_point_is_strictly_feasible() {
        let game = CournotGame::new(20, 300).unwrap();
        for t in 1..=300 {
            let g = aggregate_constraint(&game, t, &game.slater_point(t));
            assert!(g[0] < 0.0);
            assert!((g[0] + 20.0 * CournotGame::local_bound(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_bounds_dominate_corner_enumeration() {
        let n = 20;
        let game = CournotGame::new(n, 200).unwrap();
        let (l, m) = game.analytic_bounds().unwrap();
        // brute force: own action and every other action at a box corner
        // collapse to (x_i, R) ∈ {0, 30} × {0, 30(N−1)}.
        let mut worst_grad: f64 = 0.0;
        for t in 1..=200 {
            let s = (t as f64 / 12.0).sin();
            for i in 0..n {
                let firm = (i + 1) as f64;
                for xi in [0.0, 30.0] {
                    for r in [0.0, 30.0 * (n - 1) as f64] {
                        let g = s + 1.0 - (22.0 + firm / 9.0 - 0.5 * firm * s) + r + 2.0 * xi;
                        worst_grad = worst_grad.max(g.abs());
                    }
                }
            }
        }
        assert!(m >= worst_grad - 1e-9);
        assert!(m <= worst_grad + 1e-9);
        assert!(l >= 30.0);
        // Σ_j x_j ≤ 600 on the box
        assert!(m < 700.0);
    }

    #[test]
    fn sampled_constants() {
        let game = CournotGame::new(20, 2000).unwrap();
        let c = estimate_constants(&game, 10_000, 11).unwrap();
        assert!(c.mu >= 1.0 - 1e-9, "mu_hat = {}", c.mu);
        assert!(c.h >= (23.0f64).sqrt());
        let (l, m) = game.analytic_bounds().unwrap();
        assert_eq!((c.l, c.m), (l, m));
    }
}
