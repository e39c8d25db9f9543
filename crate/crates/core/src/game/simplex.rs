use super::{Game, GameError};
use crate::geometry::FeasibleSet;

/// Parameters of [`SimplexTestGame`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexTestParams {
    pub n_players: usize,
    pub horizon: usize,
    pub dim: usize,
    /// Spectral norm of the interaction matrix `Q = coupling · P`, where `P`
    /// is the cyclic coordinate shift.
    pub coupling: f64,
    /// Base target `c_i` of every player.
    pub targets: Vec<Vec<f64>>,
    /// Amplitude of the target drift; the drift decays like `1/√t`.
    pub drift: f64,
    /// Shared budget on the first coordinate: `Σ_i x_i[0] ≤ Σ_i r_{i,t}` with
    /// `r_{i,t} = budget + 0.05·sin(t/12)/√t`. `None` makes the constraint
    /// inactive (`g ≡ −1`).
    pub budget: Option<f64>,
}

impl SimplexTestParams {
    /// Three actions per player, mild coupling and an active budget.
    pub fn standard(n_players: usize, horizon: usize) -> Self {
        let base = [0.6, 0.3, 0.1];
        let targets = (0..n_players)
            .map(|i| (0..3).map(|k| base[(k + i) % 3]).collect())
            .collect();
        Self {
            n_players,
            horizon,
            dim: 3,
            coupling: 0.2,
            targets,
            drift: 0.2,
            budget: Some(0.25),
        }
    }
}

const BUDGET_WOBBLE: f64 = 0.05;

/// Quadratic game on probability simplices, used to exercise the entropy
/// geometry:
///
/// `J_{i,t}(x) = ½‖x_i − c_{i,t}‖² + x_iᵀ Q x̄_{−i}`, with `x̄_{−i}` the
/// average of the other players' actions and `g_{i,t}(x_i) = x_i[0] − r_{i,t}`.
///
/// The pseudo-gradient is `(1 − coupling)`-strongly monotone.
#[derive(Debug, Clone)]
pub struct SimplexTestGame {
    params: SimplexTestParams,
    set: FeasibleSet,
}

impl SimplexTestGame {
    pub fn new(params: SimplexTestParams) -> Result<Self, GameError> {
        let p = &params;
        if p.n_players < 1 || p.horizon < 1 || p.dim < 1 {
            return Err(GameError::InvalidParameter(
                "players, horizon and dimension must be positive".into(),
            ));
        }
        if p.targets.len() != p.n_players || p.targets.iter().any(|c| c.len() != p.dim) {
            return Err(GameError::InvalidParameter(
                "one target of length `dim` per player is required".into(),
            ));
        }
        if !(0.0..1.0).contains(&p.coupling) {
            return Err(GameError::AssumptionViolation(format!(
                "coupling {} must lie in [0, 1) for strong monotonicity",
                p.coupling
            )));
        }
        if let Some(budget) = p.budget {
            if p.dim < 2 {
                return Err(GameError::InvalidParameter(
                    "an active budget needs at least 2 actions per player".into(),
                ));
            }
            if budget <= BUDGET_WOBBLE {
                return Err(GameError::AssumptionViolation(format!(
                    "budget {budget} leaves no strictly feasible point"
                )));
            }
        }
        let set = FeasibleSet::simplex(p.dim).map_err(|e| GameError::InvalidParameter(e.to_string()))?;
        Ok(Self { params, set })
    }

    pub fn params(&self) -> &SimplexTestParams {
        &self.params
    }

    /// Time-varying target `c_{i,t}`.
    pub fn target(&self, i: usize, t: usize) -> Vec<f64> {
        let p = &self.params;
        let tf = t as f64;
        let wobble = p.drift * (tf / 12.0 + i as f64).sin() / tf.sqrt();
        let mut c = p.targets[i].clone();
        if p.dim >= 2 {
            c[0] += wobble;
            c[1] -= wobble;
        }
        c
    }

    fn budget_at(&self, t: usize) -> Option<f64> {
        let tf = t as f64;
        self.params
            .budget
            .map(|b| b + BUDGET_WOBBLE * (tf / 12.0).sin() / tf.sqrt())
    }

    /// `Q x̄_{−i}` for a stacked profile.
    fn interaction(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let p = &self.params;
        let d = p.dim;
        let mut avg = vec![0.0; d];
        if p.n_players > 1 {
            for j in (0..p.n_players).filter(|&j| j != i) {
                for k in 0..d {
                    avg[k] += x[j * d + k];
                }
            }
            for v in avg.iter_mut() {
                *v /= (p.n_players - 1) as f64;
            }
        }
        (0..d).map(|k| p.coupling * avg[(k + 1) % d]).collect()
    }
}

impl Game for SimplexTestGame {
    fn name(&self) -> &str {
        "simplex_test"
    }

    fn n_players(&self) -> usize {
        self.params.n_players
    }

    fn horizon(&self) -> usize {
        self.params.horizon
    }

    fn constraint_dim(&self) -> usize {
        1
    }

    fn feasible_set(&self, _i: usize) -> &FeasibleSet {
        &self.set
    }

    fn cost(&self, i: usize, t: usize, x: &[f64]) -> f64 {
        let d = self.params.dim;
        let xi = &x[i * d..(i + 1) * d];
        let c = self.target(i, t);
        let q = self.interaction(i, x);
        let quad: f64 = xi.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
        0.5 * quad + xi.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>()
    }

    fn partial_gradient(&self, i: usize, t: usize, x: &[f64]) -> Vec<f64> {
        let d = self.params.dim;
        let xi = &x[i * d..(i + 1) * d];
        let c = self.target(i, t);
        let q = self.interaction(i, x);
        (0..d).map(|k| xi[k] - c[k] + q[k]).collect()
    }

    fn local_constraint(&self, _i: usize, t: usize, xi: &[f64]) -> Vec<f64> {
        match self.budget_at(t) {
            Some(r) => vec![xi[0] - r],
            None => vec![-1.0],
        }
    }

    fn constraint_jacobian(&self, _i: usize, _t: usize, _xi: &[f64]) -> Vec<f64> {
        let mut row = vec![0.0; self.params.dim];
        if self.params.budget.is_some() {
            row[0] = 1.0;
        }
        row
    }

    /// Every player puts all mass on the last action.
    fn slater_point(&self, _t: usize) -> Vec<f64> {
        let d = self.params.dim;
        let mut x = vec![0.0; d * self.params.n_players];
        for i in 0..self.params.n_players {
            x[i * d + d - 1] = 1.0;
        }
        x
    }
}
