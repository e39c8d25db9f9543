//! Bregman geometry and the closed-form mirror-descent step.
//!
//! Two (mirror map, feasible set) pairs are supported, both with an explicit
//! minimizer for `α⟨x, d⟩ + D_φ(x, center)`:
//!
//! | geometry          | φ(ξ)            | set     | minimizer                         |
//! |-------------------|-----------------|---------|-----------------------------------|
//! | `Euclidean`       | ½‖ξ‖²           | box     | `clip(center − α·d, lo, hi)`      |
//! | `NegativeEntropy` | Σ ξ_j ln ξ_j    | simplex | `x_j ∝ center_j · exp(−α·d_j)`    |
//!
//! Both mirror maps are 1-strongly convex (entropy w.r.t. ℓ1 on the simplex,
//! which dominates the ℓ2 modulus there).

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::vecops::{all_finite, dist, dot};

/// Coordinates of the entropy-step center are floored here before the
/// multiplicative update.
pub const ENTROPY_FLOOR: f64 = 1e-12;

const ENTROPY_K_SAMPLES: usize = 100_000;
const ENTROPY_K_INFLATION: f64 = 2.0;
const ENTROPY_K_SEED: u64 = 0x5eed_b7e6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point outside the domain of the mirror map: {0}")]
    DomainError(String),
    #[error("geometry {geometry:?} is not supported on a {set} set")]
    GeometrySetMismatch { geometry: GeometryKind, set: &'static str },
    #[error("non-finite value in {0}")]
    NonFiniteInput(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid feasible set: {0}")]
    InvalidSet(String),
    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryKind {
    Euclidean,
    NegativeEntropy,
}

/// Compact convex action set of one player.
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Simplex { dim: usize },
}

impl FeasibleSet {
    pub fn new_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, GeometryError> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(GeometryError::InvalidSet(format!(
                "box bounds have lengths {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        if !all_finite(&lo) || !all_finite(&hi) {
            return Err(GeometryError::InvalidSet("box bounds must be finite".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(GeometryError::InvalidSet("box needs lo <= hi".into()));
        }
        Ok(FeasibleSet::Box { lo, hi })
    }

    /// Same interval `[lo, hi]` in every coordinate.
    pub fn uniform_box(dim: usize, lo: f64, hi: f64) -> Result<Self, GeometryError> {
        Self::new_box(vec![lo; dim], vec![hi; dim])
    }

    pub fn simplex(dim: usize) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::InvalidSet("simplex dimension must be positive".into()));
        }
        Ok(FeasibleSet::Simplex { dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Box { lo, .. } => lo.len(),
            FeasibleSet::Simplex { dim } => *dim,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            FeasibleSet::Box { .. } => "box",
            FeasibleSet::Simplex { .. } => "simplex",
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            FeasibleSet::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *v >= l - tol && *v <= h + tol),
            FeasibleSet::Simplex { .. } => {
                x.iter().all(|&v| v >= -tol) && (x.iter().sum::<f64>() - 1.0).abs() <= tol
            }
        }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match self {
            FeasibleSet::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (l, h))| v.clamp(*l, *h))
                .collect(),
            FeasibleSet::Simplex { .. } => project_simplex(x),
        }
    }

    /// `max_{ξ∈Ω} ‖ξ‖`.
    pub fn radius(&self) -> f64 {
        match self {
            FeasibleSet::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| (l * l).max(h * h))
                .sum::<f64>()
                .sqrt(),
            FeasibleSet::Simplex { .. } => 1.0,
        }
    }

    /// `max_{ξ,ζ∈Ω} ‖ξ − ζ‖`.
    pub fn diameter(&self) -> f64 {
        match self {
            FeasibleSet::Box { lo, hi } => dist(lo, hi),
            FeasibleSet::Simplex { dim } if *dim > 1 => std::f64::consts::SQRT_2,
            FeasibleSet::Simplex { .. } => 0.0,
        }
    }

    /// Uniform sample (flat Dirichlet on the simplex).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            FeasibleSet::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| if l == h { *l } else { rng.gen_range(*l..=*h) })
                .collect(),
            FeasibleSet::Simplex { dim } => {
                let e: Vec<f64> = (0..*dim)
                    .map(|_| -(1.0 - rng.gen::<f64>()).ln())
                    .collect();
                let s: f64 = e.iter().sum();
                e.into_iter().map(|v| v / s).collect()
            }
        }
    }

    /// Removes floating-point drift from a point that should lie in the set:
    /// boxes are clipped, simplex points renormalized when the sum drifts
    /// by more than 1e-12.
    pub fn clean(&self, x: &mut [f64]) {
        match self {
            FeasibleSet::Box { lo, hi } => {
                for (v, (l, h)) in x.iter_mut().zip(lo.iter().zip(hi)) {
                    *v = v.clamp(*l, *h);
                }
            }
            FeasibleSet::Simplex { .. } => {
                for v in x.iter_mut() {
                    *v = v.max(0.0);
                }
                let s: f64 = x.iter().sum();
                if (s - 1.0).abs() > 1e-12 && s > 0.0 {
                    for v in x.iter_mut() {
                        *v /= s;
                    }
                }
            }
        }
    }
}

/// Euclidean projection onto the probability simplex (sort-and-threshold).
pub fn project_simplex(x: &[f64]) -> Vec<f64> {
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (cumsum - 1.0) / (k + 1) as f64;
        if v - candidate > 0.0 {
            theta = candidate;
        }
    }
    x.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Mirror map of one player together with the constants the analysis needs.
#[derive(Debug, Clone, PartialEq)]
pub struct BregmanGeometry {
    pub kind: GeometryKind,
    pub dimension: usize,
    /// Strong convexity modulus μ_i of φ.
    pub strong_convexity: f64,
    /// Lipschitz constant K of `D(·, ζ)` on the feasible set in use.
    pub lipschitz_k: f64,
}

impl BregmanGeometry {
    /// Builds the geometry for `set`, rejecting unsupported pairs.
    ///
    /// For boxes `K` is the box diameter. For the entropy/simplex pair `K` is
    /// an inflated empirical maximum over seeded samples; it is a diagnostic
    /// constant only, since KL is not Lipschitz up to the boundary.
    pub fn for_set(kind: GeometryKind, set: &FeasibleSet) -> Result<Self, GeometryError> {
        check_pair(kind, set)?;
        let dimension = set.dim();
        let lipschitz_k = match kind {
            GeometryKind::Euclidean => set.diameter(),
            GeometryKind::NegativeEntropy => entropy_lipschitz_estimate(dimension),
        };
        Ok(Self {
            kind,
            dimension,
            strong_convexity: 1.0,
            lipschitz_k,
        })
    }

    /// Geometry without a set attached (K left at +∞); for divergence evaluation only.
    pub fn unbounded(kind: GeometryKind, dimension: usize) -> Self {
        Self {
            kind,
            dimension,
            strong_convexity: 1.0,
            lipschitz_k: f64::INFINITY,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), GeometryError> {
        if x.len() != self.dimension {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `∇φ(ξ)`.
    pub fn mirror_map_gradient(&self, xi: &[f64]) -> Result<Vec<f64>, GeometryError> {
        self.check_dim(xi)?;
        match self.kind {
            GeometryKind::Euclidean => Ok(xi.to_vec()),
            GeometryKind::NegativeEntropy => {
                require_positive(xi, "gradient point")?;
                Ok(xi.iter().map(|v| v.ln() + 1.0).collect())
            }
        }
    }
}

fn check_pair(kind: GeometryKind, set: &FeasibleSet) -> Result<(), GeometryError> {
    match (kind, set) {
        (GeometryKind::Euclidean, FeasibleSet::Box { .. })
        | (GeometryKind::NegativeEntropy, FeasibleSet::Simplex { .. }) => Ok(()),
        _ => Err(GeometryError::GeometrySetMismatch {
            geometry: kind,
            set: set.name(),
        }),
    }
}

fn require_positive(x: &[f64], what: &str) -> Result<(), GeometryError> {
    if let Some(v) = x.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(GeometryError::DomainError(format!(
            "{what} has non-positive coordinate {v}"
        )));
    }
    Ok(())
}

fn require_nonnegative(x: &[f64], what: &str) -> Result<(), GeometryError> {
    if let Some(v) = x.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(GeometryError::DomainError(format!(
            "{what} has negative coordinate {v}"
        )));
    }
    Ok(())
}

/// Bregman divergence `D_φ(ξ, ζ) = φ(ξ) − φ(ζ) − ⟨∇φ(ζ), ξ − ζ⟩`.
///
/// The entropy case is the generalized KL divergence
/// `Σ ξ_j ln(ξ_j/ζ_j) − Σ ξ_j + Σ ζ_j` with `0 ln 0 = 0`.
pub fn divergence(geometry: &BregmanGeometry, xi: &[f64], zeta: &[f64]) -> Result<f64, GeometryError> {
    geometry.check_dim(xi)?;
    geometry.check_dim(zeta)?;
    match geometry.kind {
        GeometryKind::Euclidean => {
            if !all_finite(xi) || !all_finite(zeta) {
                return Err(GeometryError::NonFiniteInput("divergence arguments"));
            }
            let d = dist(xi, zeta);
            Ok(0.5 * d * d)
        }
        GeometryKind::NegativeEntropy => {
            require_positive(zeta, "zeta")?;
            require_nonnegative(xi, "xi")?;
            Ok(xi
                .iter()
                .zip(zeta)
                .map(|(&p, &q)| {
                    let plogp = if p > 0.0 { p * (p / q).ln() } else { 0.0 };
                    plogp - p + q
                })
                .sum())
        }
    }
}

/// `|⟨ξ−ζ, ∇φ(ζ)−∇φ(θ)⟩ − (D(ξ,θ) − D(ξ,ζ) − D(ζ,θ))|`; zero up to rounding.
pub fn triangle_identity_residual(
    geometry: &BregmanGeometry,
    xi: &[f64],
    zeta: &[f64],
    theta: &[f64],
) -> Result<f64, GeometryError> {
    let grad_zeta = geometry.mirror_map_gradient(zeta)?;
    let grad_theta = geometry.mirror_map_gradient(theta)?;
    let diff: Vec<f64> = xi.iter().zip(zeta).map(|(a, b)| a - b).collect();
    let grad_diff: Vec<f64> = grad_zeta.iter().zip(&grad_theta).map(|(a, b)| a - b).collect();
    let lhs = dot(&diff, &grad_diff);
    let rhs = divergence(geometry, xi, theta)?
        - divergence(geometry, xi, zeta)?
        - divergence(geometry, zeta, theta)?;
    Ok((lhs - rhs).abs())
}

/// Unique minimizer of `α⟨x, d⟩ + D_φ(x, center)` over `set`.
pub fn mirror_step(
    geometry: &BregmanGeometry,
    set: &FeasibleSet,
    center: &[f64],
    linear_term: &[f64],
    alpha: f64,
) -> Result<Vec<f64>, GeometryError> {
    check_pair(geometry.kind, set)?;
    geometry.check_dim(center)?;
    geometry.check_dim(linear_term)?;
    if set.dim() != geometry.dimension {
        return Err(GeometryError::DimensionMismatch {
            expected: geometry.dimension,
            got: set.dim(),
        });
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(GeometryError::InvalidStep(alpha));
    }
    if !all_finite(linear_term) {
        return Err(GeometryError::NonFiniteInput("linear term"));
    }
    if !all_finite(center) {
        return Err(GeometryError::NonFiniteInput("center"));
    }
    match set {
        FeasibleSet::Box { lo, hi } => Ok(center
            .iter()
            .zip(linear_term)
            .zip(lo.iter().zip(hi))
            .map(|((c, d), (l, h))| (c - alpha * d).clamp(*l, *h))
            .collect()),
        FeasibleSet::Simplex { .. } => {
            require_nonnegative(center, "center")?;
            // log-space softmax of ln(center) − α·d
            let logits: Vec<f64> = center
                .iter()
                .zip(linear_term)
                .map(|(c, d)| c.max(ENTROPY_FLOOR).ln() - alpha * d)
                .collect();
            let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let weights: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
            let total: f64 = weights.iter().sum();
            Ok(weights.into_iter().map(|w| w / total).collect())
        }
    }
}

fn entropy_lipschitz_estimate(dim: usize) -> f64 {
    if dim < 2 {
        return 0.0;
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(k) = cache.lock().map(|c| c.get(&dim).copied()).ok().flatten() {
        return k;
    }
    let k = sample_entropy_lipschitz(dim);
    if let Ok(mut c) = cache.lock() {
        c.insert(dim, k);
    }
    k
}

fn sample_entropy_lipschitz(dim: usize) -> f64 {
    let set = FeasibleSet::Simplex { dim };
    let geometry = BregmanGeometry::unbounded(GeometryKind::NegativeEntropy, dim);
    let mut rng = ChaCha8Rng::seed_from_u64(ENTROPY_K_SEED ^ dim as u64);
    let mut worst: f64 = 0.0;
    for _ in 0..ENTROPY_K_SAMPLES {
        let a = set.sample(&mut rng);
        let b = set.sample(&mut rng);
        let mut zeta = set.sample(&mut rng);
        for z in zeta.iter_mut() {
            *z = z.max(ENTROPY_FLOOR);
        }
        let gap = dist(&a, &b);
        if gap < 1e-9 {
            continue;
        }
        let da = divergence(&geometry, &a, &zeta).unwrap_or(0.0);
        let db = divergence(&geometry, &b, &zeta).unwrap_or(0.0);
        worst = worst.max((da - db).abs() / gap);
    }
    ENTROPY_K_INFLATION * worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid(dim: usize) -> BregmanGeometry {
        BregmanGeometry::unbounded(GeometryKind::Euclidean, dim)
    }

    fn entropy(dim: usize) -> BregmanGeometry {
        BregmanGeometry::unbounded(GeometryKind::NegativeEntropy, dim)
    }

    fn objective(g: &BregmanGeometry, x: &[f64], c: &[f64], d: &[f64], alpha: f64) -> f64 {
        alpha * dot(x, d) + divergence(g, x, c).unwrap()
    }

    #[test]
    fn divergence_examples() {
        let g = euclid(2);
        assert_eq!(divergence(&g, &[3.7, -1.2], &[3.7, -1.2]).unwrap(), 0.0);
        assert_eq!(divergence(&g, &[1.0, 0.0], &[0.0, 0.0]).unwrap(), 0.5);

        let expected = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        let kl = divergence(&entropy(2), &[0.5, 0.5], &[0.25, 0.75]).unwrap();
        assert!((kl - expected).abs() < 1e-15);
        assert!((kl - 0.14384).abs() < 1e-5);
    }

    #[test]
    fn entropy_divergence_rejects_nonpositive_zeta() {
        let g = entropy(2);
        assert!(matches!(
            divergence(&g, &[0.5, 0.5], &[1.0, 0.0]),
            Err(GeometryError::DomainError(_))
        ));
        assert!(matches!(
            divergence(&g, &[0.5, 0.5], &[1.5, -0.5]),
            Err(GeometryError::DomainError(_))
        ));
        // zero coordinates of xi are fine
        assert!(divergence(&g, &[1.0, 0.0], &[0.5, 0.5]).is_ok());
    }

    #[test]
    fn mirror_step_box_examples() {
        let set = FeasibleSet::uniform_box(1, 0.0, 30.0).unwrap();
        let g = BregmanGeometry::for_set(GeometryKind::Euclidean, &set).unwrap();
        let x = mirror_step(&g, &set, &[5.0], &[10.0], 0.3).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);

        // grid oracle on [0, 30]
        let best = (0..=300_000)
            .map(|k| k as f64 * 1e-4)
            .min_by(|a, b| {
                objective(&g, &[*a], &[5.0], &[10.0], 0.3)
                    .total_cmp(&objective(&g, &[*b], &[5.0], &[10.0], 0.3))
            })
            .unwrap();
        assert!((best - 2.0).abs() < 1e-4);

        let floor = mirror_step(&g, &set, &[0.0], &[5.0], 1.0).unwrap();
        assert_eq!(floor, vec![0.0]);
    }

    #[test]
    fn mirror_step_simplex_example() {
        let set = FeasibleSet::simplex(2).unwrap();
        let g = BregmanGeometry::for_set(GeometryKind::NegativeEntropy, &set).unwrap();
        let d = [2f64.ln(), 0.0];
        let x = mirror_step(&g, &set, &[0.5, 0.5], &d, 1.0).unwrap();
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((x[1] - 2.0 / 3.0).abs() < 1e-15);

        // grid oracle over the 1-dimensional simplex
        let mut best = (f64::INFINITY, 0.0);
        for k in 1..100_000 {
            let p = k as f64 / 100_000.0;
            let v = objective(&g, &[p, 1.0 - p], &[0.5, 0.5], &d, 1.0);
            if v < best.0 {
                best = (v, p);
            }
        }
        assert!((best.1 - 1.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn mirror_step_errors() {
        let boxed = FeasibleSet::uniform_box(2, 0.0, 1.0).unwrap();
        let simplex = FeasibleSet::simplex(2).unwrap();
        assert!(matches!(
            BregmanGeometry::for_set(GeometryKind::NegativeEntropy, &boxed),
            Err(GeometryError::GeometrySetMismatch { .. })
        ));
        assert!(matches!(
            BregmanGeometry::for_set(GeometryKind::Euclidean, &simplex),
            Err(GeometryError::GeometrySetMismatch { .. })
        ));
        let g = BregmanGeometry::for_set(GeometryKind::Euclidean, &boxed).unwrap();
        assert!(matches!(
            mirror_step(&g, &simplex, &[0.5, 0.5], &[0.0, 0.0], 1.0),
            Err(GeometryError::GeometrySetMismatch { .. })
        ));
        assert_eq!(
            mirror_step(&g, &boxed, &[0.5, 0.5], &[f64::NAN, 0.0], 1.0),
            Err(GeometryError::NonFiniteInput("linear term"))
        );
        assert_eq!(
            mirror_step(&g, &boxed, &[0.5, 0.5], &[0.0, 0.0], 0.0),
            Err(GeometryError::InvalidStep(0.0))
        );
    }

    #[test]
    fn entropy_step_escapes_zero_coordinates() {
        let set = FeasibleSet::simplex(3).unwrap();
        let g = BregmanGeometry::for_set(GeometryKind::NegativeEntropy, &set).unwrap();
        let x = mirror_step(&g, &set, &[1.0, 0.0, 0.0], &[50.0, 0.0, 0.0], 1.0).unwrap();
        assert!(x[1] > 0.0 && x[2] > 0.0);
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_identity_at_uniform_point() {
        let u = [1.0 / 3.0; 3];
        assert_eq!(triangle_identity_residual(&entropy(3), &u, &u, &u).unwrap(), 0.0);
    }

    #[test]
    fn simplex_projection_basics() {
        assert_eq!(project_simplex(&[0.2, 0.3, 0.5]), vec![0.2, 0.3, 0.5]);
        let p = project_simplex(&[2.0, 0.0]);
        assert_eq!(p, vec![1.0, 0.0]);
        let q = project_simplex(&[0.5, 0.5, 0.5]);
        for v in q {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn set_constants() {
        let b = FeasibleSet::uniform_box(1, 0.0, 30.0).unwrap();
        assert_eq!(b.radius(), 30.0);
        assert_eq!(b.diameter(), 30.0);
        let s = FeasibleSet::simplex(3).unwrap();
        assert_eq!(s.radius(), 1.0);
        assert!(FeasibleSet::new_box(vec![1.0], vec![0.0]).is_err());
        let g = BregmanGeometry::for_set(GeometryKind::NegativeEntropy, &s).unwrap();
        assert!(g.lipschitz_k.is_finite() && g.lipschitz_k > 0.0);
    }
}
