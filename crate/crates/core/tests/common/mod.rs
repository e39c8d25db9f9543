#![allow(dead_code)]

use dgne::game::Game;
use dgne::geometry::FeasibleSet;

/// `J_i = ½(x_i − c_i(t))²` on `[0, 5]`, with `g_i = x_i − cap`.
/// Players are decoupled in cost; only the shared constraint links them.
pub struct Tracking {
    pub n: usize,
    pub horizon: usize,
    pub cap: f64,
    pub targets: Vec<f64>,
    pub drift: f64,
    set: FeasibleSet,
}

impl Tracking {
    pub fn new(n: usize, horizon: usize, targets: Vec<f64>, drift: f64, cap: f64) -> Self {
        assert_eq!(targets.len(), n);
        Self {
            n,
            horizon,
            cap,
            targets,
            drift,
            set: FeasibleSet::uniform_box(1, 0.0, 5.0).unwrap(),
        }
    }

    pub fn target(&self, i: usize, t: usize) -> f64 {
        self.targets[i] + self.drift * (t as f64 / 7.0).sin()
    }
}

impl Game for Tracking {
    fn name(&self) -> &str {
        "tracking"
    }
    fn n_players(&self) -> usize {
        self.n
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
        0.5 * (x[i] - self.target(i, t)).powi(2)
    }
    fn partial_gradient(&self, i: usize, t: usize, x: &[f64]) -> Vec<f64> {
        vec![x[i] - self.target(i, t)]
    }
    fn local_constraint(&self, _i: usize, _t: usize, xi: &[f64]) -> Vec<f64> {
        vec![xi[0] - self.cap]
    }
    fn constraint_jacobian(&self, _i: usize, _t: usize, _xi: &[f64]) -> Vec<f64> {
        vec![1.0]
    }
    fn slater_point(&self, _t: usize) -> Vec<f64> {
        vec![0.0; self.n]
    }
}

/// Evaluates every oracle of `inner` at the fixed round `t0`.
pub struct Frozen<G> {
    pub inner: G,
    pub t0: usize,
}

impl<G: Game> Game for Frozen<G> {
    fn name(&self) -> &str {
        "frozen"
    }
    fn n_players(&self) -> usize {
        self.inner.n_players()
    }
    fn horizon(&self) -> usize {
        self.inner.horizon()
    }
    fn constraint_dim(&self) -> usize {
        self.inner.constraint_dim()
    }
    fn feasible_set(&self, i: usize) -> &FeasibleSet {
        self.inner.feasible_set(i)
    }
    fn cost(&self, i: usize, _t: usize, x: &[f64]) -> f64 {
        self.inner.cost(i, self.t0, x)
    }
    fn partial_gradient(&self, i: usize, _t: usize, x: &[f64]) -> Vec<f64> {
        self.inner.partial_gradient(i, self.t0, x)
    }
    fn local_constraint(&self, i: usize, _t: usize, xi: &[f64]) -> Vec<f64> {
        self.inner.local_constraint(i, self.t0, xi)
    }
    fn constraint_jacobian(&self, i: usize, _t: usize, xi: &[f64]) -> Vec<f64> {
        self.inner.constraint_jacobian(i, self.t0, xi)
    }
    fn slater_point(&self, _t: usize) -> Vec<f64> {
        self.inner.slater_point(self.t0)
    }
    fn analytic_bounds(&self) -> Option<(f64, f64)> {
        self.inner.analytic_bounds()
    }
}

pub const COURNOT_CONFIG: &str = r#"[game]
kind = "cournot"
n_players = 20

[graph]
kind = "ring"

[geometry]
kind = "euclidean"

[schedule]
a1 = 0.2
a2 = 0.8

[run]
horizon = 2000
seed = 1
diagnostics = true
"#;

pub fn cournot_config_with_horizon(horizon: usize) -> String {
    COURNOT_CONFIG.replace("horizon = 2000", &format!("horizon = {horizon}"))
}
