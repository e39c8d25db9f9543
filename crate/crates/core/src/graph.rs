//! Communication topologies for the players.
//!
//! A [`GraphTopology`] holds a symmetric, doubly-stochastic weight matrix with a
//! strictly positive diagonal over a connected undirected graph, together with
//! the two spectral constants that govern how fast gossip averaging forgets
//! its initial disagreement:
//!
//! - `sigma`: the largest eigenvalue magnitude over all principal submatrices
//!   obtained by deleting one row and the matching column;
//! - `sigma_m`: the largest eigenvalue of `A - 11ᵀ/N`.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use thiserror::Error;

const ROW_SUM_TOL: f64 = 1e-12;
const SYM_EIG_TOL: f64 = 1e-10;
const SYM_EIG_MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("a communication graph needs at least 2 players, got {0}")]
    TooFewPlayers(usize),
    #[error("invalid edge ({0}, {1}) on {2} vertices")]
    InvalidEdge(usize, usize, usize),
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("weight matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("weight matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("row {row} sums to {sum}, expected 1")]
    NotStochastic { row: usize, sum: f64 },
    #[error("diagonal weight a_{0}{0} must be positive")]
    NonPositiveDiagonal(usize),
    #[error("weight a_({0},{1}) is negative or not finite")]
    InvalidWeight(usize, usize),
    #[error("degenerate spectrum: sigma = {sigma}, sigma_m = {sigma_m} (both must lie in (0, 1))")]
    DegenerateSpectrum { sigma: f64, sigma_m: f64 },
    #[error("symmetric eigensolver did not converge")]
    NumericalFailure,
}

/// Validated mixing matrix plus its spectral constants. Immutable once built.
#[derive(Debug, Clone)]
pub struct GraphTopology {
    weights: DMatrix<f64>,
    sigma: f64,
    sigma_m: f64,
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl GraphTopology {
    /// Validates `weights` and computes the spectral constants.
    pub fn from_weights(weights: DMatrix<f64>) -> Result<Self, GraphError> {
        validate_weights(&weights)?;
        let (sigma, sigma_m) = spectral_params(&weights)?;
        let n = weights.nrows();
        let neighbors = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| weights[(i, j)] != 0.0)
                    .map(|j| (j, weights[(i, j)]))
                    .collect()
            })
            .collect();
        Ok(Self {
            weights,
            sigma,
            sigma_m,
            neighbors,
        })
    }

    /// Metropolis-Hastings weights on an explicit 0-based edge list.
    pub fn from_edges(n_players: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::from_weights(metropolis_weights(n_players, edges)?)
    }

    pub fn ring(n_players: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (0..n_players).map(|i| (i, (i + 1) % n_players)).collect();
        Self::from_edges(n_players, &edges)
    }

    pub fn path(n_players: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (1..n_players).map(|i| (i - 1, i)).collect();
        Self::from_edges(n_players, &edges)
    }

    /// Complete graph with lazy Metropolis weights `(I + A)/2`.
    ///
    /// Plain Metropolis weights on a complete graph collapse to `11ᵀ/N`,
    /// whose `sigma_m` is zero.
    pub fn complete(n_players: usize) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        for i in 0..n_players {
            for j in (i + 1)..n_players {
                edges.push((i, j));
            }
        }
        let plain = metropolis_weights(n_players, &edges)?;
        let lazy = (DMatrix::identity(n_players, n_players) + plain) * 0.5;
        Self::from_weights(lazy)
    }

    pub fn n_players(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sigma_m(&self) -> f64 {
        self.sigma_m
    }

    /// Nonzero entries of row `i` (including `i` itself) as `(j, a_ij)`.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[i]
    }
}

/// Metropolis-Hastings weights: `a_ij = 1/(1 + max(deg_i, deg_j))` on edges and
/// `a_ii = 1 - Σ_{j≠i} a_ij`. Duplicate edges are merged.
pub fn metropolis_weights(
    n_players: usize,
    edges: &[(usize, usize)],
) -> Result<DMatrix<f64>, GraphError> {
    if n_players < 2 {
        return Err(GraphError::TooFewPlayers(n_players));
    }
    let mut adjacent = vec![vec![false; n_players]; n_players];
    for &(i, j) in edges {
        if i == j || i >= n_players || j >= n_players {
            return Err(GraphError::InvalidEdge(i, j, n_players));
        }
        adjacent[i][j] = true;
        adjacent[j][i] = true;
    }
    if !is_connected(&adjacent) {
        return Err(GraphError::DisconnectedGraph);
    }
    let degree: Vec<usize> = adjacent
        .iter()
        .map(|row| row.iter().filter(|&&e| e).count())
        .collect();

    let mut a = DMatrix::zeros(n_players, n_players);
    for i in 0..n_players {
        for j in 0..n_players {
            if adjacent[i][j] {
                a[(i, j)] = 1.0 / (1 + degree[i].max(degree[j])) as f64;
            }
        }
    }
    for i in 0..n_players {
        let off: f64 = (0..n_players).filter(|&j| j != i).map(|j| a[(i, j)]).sum();
        a[(i, i)] = 1.0 - off;
    }
    Ok(a)
}

/// Returns `(sigma, sigma_m)`, rejecting spectra outside the open unit interval.
pub fn spectral_params(weights: &DMatrix<f64>) -> Result<(f64, f64), GraphError> {
    let n = weights.nrows();
    if n < 2 {
        return Err(GraphError::TooFewPlayers(n));
    }

    let mut sigma: f64 = 0.0;
    for i in 0..n {
        let sub = weights.clone().remove_row(i).remove_column(i);
        let radius = symmetric_eigenvalues(sub)?
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()));
        sigma = sigma.max(radius);
    }

    let centered = weights - DMatrix::from_element(n, n, 1.0 / n as f64);
    let sigma_m = symmetric_eigenvalues(centered)?
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);

    let inside = |v: f64| v > 0.0 && v < 1.0;
    if !inside(sigma) || !inside(sigma_m) {
        return Err(GraphError::DegenerateSpectrum { sigma, sigma_m });
    }
    Ok((sigma, sigma_m))
}

fn symmetric_eigenvalues(m: DMatrix<f64>) -> Result<Vec<f64>, GraphError> {
    m.try_symmetric_eigen(SYM_EIG_TOL, SYM_EIG_MAX_ITERS)
        .map(|e| e.eigenvalues.iter().copied().collect())
        .ok_or(GraphError::NumericalFailure)
}

fn validate_weights(a: &DMatrix<f64>) -> Result<(), GraphError> {
    let (rows, cols) = a.shape();
    if rows != cols {
        return Err(GraphError::NotSquare { rows, cols });
    }
    if rows < 2 {
        return Err(GraphError::TooFewPlayers(rows));
    }
    for i in 0..rows {
        for j in 0..cols {
            let v = a[(i, j)];
            if !v.is_finite() || v < 0.0 {
                return Err(GraphError::InvalidWeight(i, j));
            }
            if v != a[(j, i)] {
                return Err(GraphError::NotSymmetric(i, j));
            }
        }
        if a[(i, i)] <= 0.0 {
            return Err(GraphError::NonPositiveDiagonal(i));
        }
        let sum: f64 = a.row(i).iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(GraphError::NotStochastic { row: i, sum });
        }
    }
    let adjacent: Vec<Vec<bool>> = (0..rows)
        .map(|i| (0..rows).map(|j| i != j && a[(i, j)] > 0.0).collect())
        .collect();
    if !is_connected(&adjacent) {
        return Err(GraphError::DisconnectedGraph);
    }
    Ok(())
}

fn is_connected(adjacent: &[Vec<bool>]) -> bool {
    let n = adjacent.len();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for (w, &edge) in adjacent[v].iter().enumerate() {
            if edge && !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    // Eigenvalues of [[p, q], [q, r]] by the quadratic formula.
    fn eig2(p: f64, q: f64, r: f64) -> (f64, f64) {
        let mean = 0.5 * (p + r);
        let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
        (mean - rad, mean + rad)
    }

    #[test]
    fn path3_metropolis_matches_hand_evaluation() {
        let a = metropolis_weights(3, &[(0, 1), (1, 2)]).unwrap();
        let expected = [
            [2.0 / 3.0, 1.0 / 3.0, 0.0],
            [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            [0.0, 1.0 / 3.0, 2.0 / 3.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!(approx_eq(a[(i, j)], expected[i][j], 1e-15), "({i},{j})");
            }
        }
    }

    #[test]
    fn path3_spectral_constants() {
        let g = GraphTopology::path(3).unwrap();
        assert!(approx_eq(g.sigma_m(), 2.0 / 3.0, 1e-12));

        // Deleting vertex k leaves a 2x2 principal submatrix.
        let third = 1.0 / 3.0;
        let subs = [
            (third, third, 2.0 * third), // delete 0: rows/cols {1, 2}
            (2.0 * third, 0.0, 2.0 * third), // delete 1: rows/cols {0, 2}
            (2.0 * third, third, third), // delete 2: rows/cols {0, 1}
        ];
        let sigma = subs
            .iter()
            .map(|&(p, q, r)| {
                let (lo, hi) = eig2(p, q, r);
                lo.abs().max(hi.abs())
            })
            .fold(0.0, f64::max);
        assert!(approx_eq(g.sigma(), sigma, 1e-12));
    }

    #[test]
    fn k2_is_equal_split_and_degenerate() {
        let a = metropolis_weights(2, &[(0, 1)]).unwrap();
        assert_eq!(a, DMatrix::from_element(2, 2, 0.5));
        assert!(matches!(
            spectral_params(&a),
            Err(GraphError::DegenerateSpectrum { .. })
        ));
        assert!(matches!(
            GraphTopology::from_weights(a),
            Err(GraphError::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn ring20_rows_and_diagonal() {
        let g = GraphTopology::ring(20).unwrap();
        for i in 0..20 {
            let sum: f64 = g.weights().row(i).iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
            assert!(approx_eq(g.weight(i, i), 1.0 / 3.0, 1e-15));
            assert_eq!(g.neighbors(i).len(), 3);
        }
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(
            metropolis_weights(3, &[(0, 0), (1, 2)]),
            Err(GraphError::InvalidEdge(0, 0, 3))
        );
        assert_eq!(
            metropolis_weights(3, &[(0, 3)]),
            Err(GraphError::InvalidEdge(0, 3, 3))
        );
        assert_eq!(
            metropolis_weights(4, &[(0, 1), (2, 3)]),
            Err(GraphError::DisconnectedGraph)
        );
    }

    #[test]
    fn rejects_invalid_raw_matrices() {
        let asym = DMatrix::from_row_slice(2, 2, &[0.6, 0.4, 0.3, 0.7]);
        assert!(matches!(
            GraphTopology::from_weights(asym),
            Err(GraphError::NotSymmetric(..))
        ));
        let not_stochastic = DMatrix::from_row_slice(2, 2, &[0.6, 0.3, 0.3, 0.6]);
        assert!(matches!(
            GraphTopology::from_weights(not_stochastic),
            Err(GraphError::NotStochastic { .. })
        ));
        let zero_diag = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(
            GraphTopology::from_weights(zero_diag).unwrap_err(),
            GraphError::NonPositiveDiagonal(0)
        );
        let disconnected = DMatrix::<f64>::identity(3, 3);
        assert_eq!(
            GraphTopology::from_weights(disconnected).unwrap_err(),
            GraphError::DisconnectedGraph
        );
    }

    #[test]
    fn lazy_complete_graph_is_valid() {
        let g = GraphTopology::complete(5).unwrap();
        assert!(approx_eq(g.sigma_m(), 0.5, 1e-12));
        assert!(g.sigma() < 1.0);
    }
}
