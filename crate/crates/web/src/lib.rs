//! WebAssembly bindings for the browser demo in `www/`.

use dgne::engine::{run, StepSchedule};
use dgne::equilibrium::{cournot_closed_form_profile, solve_vgne, GneSequence, SolverOptions};
use dgne::game::{CournotGame, Game, SimplexTestGame, SimplexTestParams};
use dgne::geometry::{mirror_step, BregmanGeometry, FeasibleSet, GeometryKind};
use dgne::graph::GraphTopology;
use dgne::metrics::MetricsReport;
use wasm_bindgen::prelude::*;

fn js<E: std::fmt::Display>(e: E) -> JsError {
    JsError::new(&e.to_string())
}

fn graph(kind: &str, n: usize) -> Result<GraphTopology, JsError> {
    match kind {
        "ring" => GraphTopology::ring(n).map_err(js),
        "path" => GraphTopology::path(n).map_err(js),
        "complete" => GraphTopology::complete(n).map_err(js),
        other => Err(JsError::new(&format!("unknown graph `{other}`"))),
    }
}

/// Result of one distributed run, as flat per-round series.
#[wasm_bindgen]
pub struct Simulation {
    horizon: usize,
    n_players: usize,
    dims: Vec<usize>,
    actions: Vec<Vec<f64>>,
    gne: Vec<Vec<f64>>,
    report: MetricsReport,
    sigma: f64,
}

#[wasm_bindgen]
impl Simulation {
    /// `game` is `"cournot"` (Euclidean steps) or `"simplex"` (entropic steps).
    #[wasm_bindgen(constructor)]
    pub fn new(
        game: &str,
        graph_kind: &str,
        n_players: usize,
        horizon: usize,
        a1: f64,
        a2: f64,
        seed: u64,
    ) -> Result<Simulation, JsError> {
        let (model, geometry): (Box<dyn Game>, GeometryKind) = match game {
            "cournot" => (Box::new(CournotGame::new(n_players, horizon).map_err(js)?), GeometryKind::Euclidean),
            "simplex" => (
                Box::new(SimplexTestGame::new(SimplexTestParams::standard(n_players, horizon)).map_err(js)?),
                GeometryKind::NegativeEntropy,
            ),
            other => return Err(JsError::new(&format!("unknown game `{other}`"))),
        };
        let topology = graph(graph_kind, n_players)?;
        let schedule = StepSchedule::power(a1, a2, horizon).map_err(js)?;
        let trace = run(model.as_ref(), &topology, geometry, schedule, seed).map_err(js)?;
        let gne = GneSequence::solve(model.as_ref(), 1e-8, 200_000).map_err(js)?.actions();
        let actions = trace.action_profiles();
        let report = MetricsReport::compute(model.as_ref(), &actions, &gne).map_err(js)?;
        Ok(Simulation {
            horizon,
            n_players,
            dims: (0..n_players).map(|i| model.action_dim(i)).collect(),
            actions,
            gne,
            report,
            sigma: topology.sigma(),
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n_players(&self) -> usize {
        self.n_players
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `max_i Reg_i(t)/t` for `t = 1..T`.
    pub fn average_regret(&self) -> Vec<f64> {
        (1..=self.horizon).map(|t| self.report.average_regret_max(t)).collect()
    }

    /// `R_g(t)/t` for `t = 1..T`.
    pub fn average_violation(&self) -> Vec<f64> {
        (1..=self.horizon).map(|t| self.report.average_violation(t)).collect()
    }

    /// First coordinate of player `i`'s action (0-based) in every round.
    pub fn action(&self, i: usize) -> Vec<f64> {
        let start: usize = self.dims[..i.min(self.n_players)].iter().sum();
        self.actions.iter().map(|x| x[start]).collect()
    }

    /// Same coordinate of the reference equilibrium.
    pub fn equilibrium(&self, i: usize) -> Vec<f64> {
        let start: usize = self.dims[..i.min(self.n_players)].iter().sum();
        self.gne.iter().map(|x| x[start]).collect()
    }
}

/// Repeated entropic mirror steps on the simplex with a fixed linear cost.
/// Returns the points flattened row by row, starting with `center`.
#[wasm_bindgen]
pub fn simplex_trajectory(center: Vec<f64>, cost: Vec<f64>, alpha: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    let set = FeasibleSet::simplex(center.len()).map_err(js)?;
    let geometry = BregmanGeometry::for_set(GeometryKind::NegativeEntropy, &set).map_err(js)?;
    let mut x = center;
    let mut out = x.clone();
    for _ in 0..steps {
        x = mirror_step(&geometry, &set, &x, &cost, alpha).map_err(js)?;
        out.extend_from_slice(&x);
    }
    Ok(out)
}

/// Cournot equilibrium of round `t` from the solver, followed by the
/// published closed-form profile, each of length `n_players`.
#[wasm_bindgen]
pub fn cournot_equilibrium(n_players: usize, t: usize) -> Result<Vec<f64>, JsError> {
    let game = CournotGame::new(n_players, t.max(1)).map_err(js)?;
    let solution = solve_vgne(&game, t, &SolverOptions::default()).map_err(js)?;
    let mut out = solution.actions;
    out.extend(cournot_closed_form_profile(n_players, t));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trajectory_stays_on_simplex() {
        let pts = simplex_trajectory(vec![0.2, 0.3, 0.5], vec![1.0, 0.0, -1.0], 0.5, 10).unwrap();
        assert_eq!(pts.len(), 33);
        for p in pts.chunks(3) {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        // mass moves to the cheapest vertex
        assert!(pts[32] > 0.9);
    }

    #[test]
    fn equilibrium_pair_lengths() {
        let v = cournot_equilibrium(20, 100).unwrap();
        assert_eq!(v.len(), 40);
    }

    #[test]
    fn small_simulation() {
        let sim = Simulation::new("cournot", "ring", 5, 40, 0.2, 0.8, 1).unwrap();
        assert_eq!(sim.average_regret().len(), 40);
        assert_eq!(sim.action(4).len(), 40);
        let sim = Simulation::new("simplex", "path", 3, 20, 0.2, 0.8, 1).unwrap();
        assert!(sim.average_violation().iter().all(|v| v.is_finite()));
    }
}
