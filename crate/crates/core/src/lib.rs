//! Decentralized online generalized Nash equilibrium (GNE) seeking.
//!
//! Players of a time-varying game with a shared inequality constraint run a
//! distributed primal-dual dynamic mirror-descent loop: each keeps its own
//! action, gossiped estimates of everyone else's action, and a local copy of
//! the Lagrange multiplier, and only talks to graph neighbours.
//!
//! Module map:
//! - [`graph`]: doubly-stochastic communication weights and their spectral constants.
//! - [`geometry`]: Bregman divergences, feasible sets and the closed-form mirror step.
//! - [`game`]: the game oracle trait, the built-in Nash-Cournot and simplex games,
//!   and bound-constant estimation.
//! - [`equilibrium`]: centralized variational-GNE reference solver.
//! - [`engine`]: the synchronized round loop and step-size schedule.
//! - [`metrics`]: dynamic regret, constraint violation, path length and
//!   runtime checks of the estimate/dual bounds.
//! - [`cli`]: run configuration and the experiment runner behind the `dgne` binary.

pub mod cli;
pub mod engine;
pub mod equilibrium;
pub mod game;
pub mod geometry;
pub mod graph;
pub mod metrics;
mod vecops;

pub use engine::{Engine, PlayerState, RoundSnapshot, RunTrace, StepSchedule};
pub use equilibrium::{solve_vgne, GneSolution, SolverOptions};
pub use game::{CournotGame, Game, GameConstants, SimplexTestGame};
pub use geometry::{BregmanGeometry, FeasibleSet, GeometryKind};
pub use graph::GraphTopology;
