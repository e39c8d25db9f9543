use dgne::game::{CournotGame, Game, SimplexTestGame, SimplexTestParams};
use dgne::geometry::{
    divergence, mirror_step, triangle_identity_residual, BregmanGeometry, FeasibleSet, GeometryKind,
};
use dgne::graph::GraphTopology;
use nalgebra::DVector;
use proptest::prelude::*;

/// Random connected graph: a random spanning tree plus extra edges.
fn connected_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (3usize..12).prop_flat_map(|n| {
        let parents = proptest::collection::vec(any::<prop::sample::Index>(), n - 1);
        let extra = proptest::collection::vec((0..n, 0..n), 0..n);
        (Just(n), parents, extra).prop_map(|(n, parents, extra)| {
            let mut edges: Vec<(usize, usize)> = parents
                .iter()
                .enumerate()
                .map(|(k, p)| (p.index(k + 1), k + 1))
                .collect();
            for (a, b) in extra {
                if a != b && !edges.contains(&(a, b)) && !edges.contains(&(b, a)) {
                    edges.push((a, b));
                }
            }
            (n, edges)
        })
    })
}

fn simplex_point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.01f64..1.0, dim).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn metropolis_weights_are_doubly_stochastic((n, edges) in connected_graph()) {
        let g = match GraphTopology::from_edges(n, &edges) {
            Ok(g) => g,
            // complete graphs have a degenerate spectrum under plain Metropolis
            Err(dgne::graph::GraphError::DegenerateSpectrum { .. }) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let a = g.weights();
        for i in 0..n {
            let row: f64 = (0..n).map(|j| a[(i, j)]).sum();
            prop_assert!((row - 1.0).abs() <= 1e-12);
            prop_assert!(a[(i, i)] > 0.0);
            for j in 0..n {
                prop_assert_eq!(a[(i, j)], a[(j, i)]);
                prop_assert!(a[(i, j)] >= 0.0);
            }
        }
        prop_assert!(g.sigma() > 0.0 && g.sigma() < 1.0);
        prop_assert!(g.sigma_m() > 0.0 && g.sigma_m() < 1.0);
    }

    #[test]
    fn gossip_contracts_disagreement(
        (n, edges) in connected_graph(),
        seed in proptest::collection::vec(-10.0f64..10.0, 12),
    ) {
        let g = match GraphTopology::from_edges(n, &edges) {
            Ok(g) => g,
            Err(_) => return Ok(()),
        };
        let a = g.weights();
        let v = DVector::from_iterator(n, seed.into_iter().take(n));
        let mean = v.mean();
        let centered = |x: &DVector<f64>| x.map(|e| e - mean).norm();
        let start = centered(&v);
        let mut x = v.clone();
        let rate = g.sigma_m();
        prop_assert!((spectral_radius_off_consensus(&g) - rate).abs() <= 1e-12);
        for k in 1..=10 {
            x = a * &x;
            prop_assert!(centered(&x) <= rate.powi(k) * start * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn divergences_dominate_half_squared_distance(
        a in simplex_point(4),
        b in simplex_point(4),
        p in proptest::collection::vec(-5.0f64..5.0, 4),
        q in proptest::collection::vec(-5.0f64..5.0, 4),
    ) {
        let eu = BregmanGeometry::unbounded(GeometryKind::Euclidean, 4);
        let d = dist(&p, &q);
        prop_assert!((divergence(&eu, &p, &q).unwrap() - 0.5 * d * d).abs() <= 1e-12 * (1.0 + d * d));

        let en = BregmanGeometry::unbounded(GeometryKind::NegativeEntropy, 4);
        let kl = divergence(&en, &a, &b).unwrap();
        let l1: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
        let l2 = dist(&a, &b);
        prop_assert!(kl >= 0.5 * l1 * l1 - 1e-12);
        prop_assert!(kl >= 0.5 * l2 * l2 - 1e-12);
        prop_assert!(divergence(&en, &a, &a).unwrap().abs() <= 1e-15);
    }

    #[test]
    fn three_point_identity(
        a in simplex_point(3),
        b in simplex_point(3),
        c in simplex_point(3),
        p in proptest::collection::vec(-5.0f64..5.0, 3),
        q in proptest::collection::vec(-5.0f64..5.0, 3),
        r in proptest::collection::vec(-5.0f64..5.0, 3),
    ) {
        let eu = BregmanGeometry::unbounded(GeometryKind::Euclidean, 3);
        prop_assert!(triangle_identity_residual(&eu, &p, &q, &r).unwrap() <= 1e-10);
        let en = BregmanGeometry::unbounded(GeometryKind::NegativeEntropy, 3);
        prop_assert!(triangle_identity_residual(&en, &a, &b, &c).unwrap() <= 1e-10);
    }

    #[test]
    fn entropy_step_satisfies_optimality(
        center in simplex_point(5),
        d in proptest::collection::vec(-3.0f64..3.0, 5),
        alpha in 0.01f64..2.0,
    ) {
        // x_j ∝ c_j exp(−α d_j) iff α d_j + ln(x_j / c_j) is the same for every j
        let set = FeasibleSet::simplex(5).unwrap();
        let g = BregmanGeometry::for_set(GeometryKind::NegativeEntropy, &set).unwrap();
        let x = mirror_step(&g, &set, &center, &d, alpha).unwrap();
        prop_assert!((x.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let shifts: Vec<f64> = (0..5).map(|j| alpha * d[j] + (x[j] / center[j]).ln()).collect();
        for s in &shifts {
            prop_assert!((s - shifts[0]).abs() <= 1e-9);
        }
    }

    #[test]
    fn box_step_is_projected_gradient(
        center in proptest::collection::vec(-2.0f64..7.0, 3),
        d in proptest::collection::vec(-20.0f64..20.0, 3),
        alpha in 0.001f64..3.0,
    ) {
        let set = FeasibleSet::new_box(vec![0.0, -1.0, 2.0], vec![5.0, 1.0, 2.5]).unwrap();
        let g = BregmanGeometry::for_set(GeometryKind::Euclidean, &set).unwrap();
        let x = mirror_step(&g, &set, &center, &d, alpha).unwrap();
        // variational inequality: ⟨x − (c − αd), y − x⟩ ≥ 0 at the box corners
        for mask in 0..8u32 {
            let y: Vec<f64> = (0..3)
                .map(|k| if mask & (1 << k) != 0 { [5.0, 1.0, 2.5][k] } else { [0.0, -1.0, 2.0][k] })
                .collect();
            let inner: f64 = (0..3).map(|k| (x[k] - (center[k] - alpha * d[k])) * (y[k] - x[k])).sum();
            prop_assert!(inner >= -1e-9);
        }
    }

    #[test]
    fn cournot_gradient_matches_finite_differences(
        x in proptest::collection::vec(0.0f64..30.0, 6),
        t in 1usize..500,
        i in 0usize..6,
    ) {
        let game = CournotGame::new(6, 500).unwrap();
        let h = 1e-6;
        let mut up = x.clone();
        up[i] += h;
        let mut down = x.clone();
        down[i] -= h;
        let fd = (game.cost(i, t, &up) - game.cost(i, t, &down)) / (2.0 * h);
        let g = game.partial_gradient(i, t, &x)[0];
        prop_assert!((fd - g).abs() <= 1e-6 * g.abs().max(1.0));
    }

    #[test]
    fn simplex_game_gradient_matches_finite_differences(
        raw in proptest::collection::vec(simplex_point(3), 4),
        t in 1usize..300,
        i in 0usize..4,
        k in 0usize..3,
    ) {
        let game = SimplexTestGame::new(SimplexTestParams::standard(4, 300)).unwrap();
        let x: Vec<f64> = raw.concat();
        let h = 1e-6;
        let mut up = x.clone();
        up[3 * i + k] += h;
        let mut down = x.clone();
        down[3 * i + k] -= h;
        let fd = (game.cost(i, t, &up) - game.cost(i, t, &down)) / (2.0 * h);
        let g = game.partial_gradient(i, t, &x)[k];
        prop_assert!((fd - g).abs() <= 1e-6 * g.abs().max(1.0));
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn spectral_radius_off_consensus(g: &GraphTopology) -> f64 {
    let n = g.n_players();
    let shifted = g.weights() - nalgebra::DMatrix::from_element(n, n, 1.0 / n as f64);
    shifted
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

#[test]
fn mixing_rate_on_standard_graphs() {
    for g in [
        GraphTopology::ring(20).unwrap(),
        GraphTopology::path(20).unwrap(),
        GraphTopology::complete(7).unwrap(),
        GraphTopology::path(3).unwrap(),
    ] {
        let n = g.n_players();
        assert!((spectral_radius_off_consensus(&g) - g.sigma_m()).abs() < 1e-12);
        let mut x = DVector::from_fn(n, |i, _| ((i * 7 + 3) % 11) as f64 - 4.0);
        let mean = x.mean();
        let start = x.map(|e| e - mean).norm();
        for k in 1..=10 {
            x = g.weights() * &x;
            let now = x.map(|e| e - mean).norm();
            assert!(now <= g.sigma_m().powi(k) * start * (1.0 + 1e-9));
        }
    }
}
