//! Delay-coordinate embeddings of observed projection series.
//!
//! From a sequence of observations `ψ_0, ψ_1, ...` (angles on the circle or
//! planar points), form delay vectors
//!
//! ```text
//! Θ_n = (ψ_n, ψ_{n+1}, ..., ψ_{n+K-1})
//! ```
//!
//! with delay count `K`. For almost every smooth observation map of a
//! `d`-torus carrying an irrational rotation, `Θ` is an embedding once
//! `K·D >= 2d + 1`, where `D` is the observation dimension (1 for circle
//! values, 2 for planar). In practice `K` is chosen well above the bound:
//! a larger `K` widens the separation between the integer translates of the
//! lifted angle-difference graph, which is what the offset continuation in
//! [`crate::lift`] relies on.
//!
//! The graph lives in the product space `(observations)^K × R`, metrized by
//! the Euclidean combination of per-component distances (circle distance for
//! angle components, planar Euclidean otherwise) and the plain difference in
//! the lifted-value coordinate.

use thiserror::Error;

use crate::grid::{GridHash, MAX_KEY_DIMS};
use crate::projections::{angle_series, PlanarPoint, ProjectionError, ReferencePoint};
use crate::scalar::Real;
use crate::torus::{circle_distance, mod1};

#[derive(Debug, Error, PartialEq)]
pub enum EmbeddingError {
    #[error("series of length {n} too short for delay count {k}")]
    SeriesTooShort { n: usize, k: usize },
    #[error("K*D = {kd} violates the embedding bound 2d+1 = {need}")]
    DimensionCheck { kd: usize, need: usize },
    #[error("planar observations require a reference point for angle differences")]
    MissingReference,
    #[error("circle observation {index} out of [0,1): {value}")]
    AngleOutOfRange { index: usize, value: f64 },
    #[error("lifted series length {got} does not match cloud length {want}")]
    LiftLengthMismatch { got: usize, want: usize },
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

/// Per-component distance used inside delay vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentMetric {
    Circle,
    Euclidean,
}

/// Observed projection series.
#[derive(Debug, Clone)]
pub enum ObservationSeries<R: Real> {
    /// Angles in `[0, 1)` revolutions.
    Circle(Vec<R>),
    /// Planar points.
    Planar(Vec<PlanarPoint<R>>),
}

impl<R: Real> ObservationSeries<R> {
    pub fn len(&self) -> usize {
        match self {
            ObservationSeries::Circle(v) => v.len(),
            ObservationSeries::Planar(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Observation dimension D.
    pub fn dim(&self) -> usize {
        match self {
            ObservationSeries::Circle(_) => 1,
            ObservationSeries::Planar(_) => 2,
        }
    }
}

/// Delay count plus the checks that make it a valid embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingConfig {
    /// Delay count K.
    pub k: usize,
    pub component_metric: ComponentMetric,
    /// Torus dimension assumed for the `K*D >= 2d+1` check. Zero disables
    /// the check (caller takes responsibility).
    pub d_assumed: usize,
}

impl EmbeddingConfig {
    /// Default for circle-valued observations: K = 7, comfortably above the
    /// bound for d = 1 (which needs 3) and still valid through d = 3.
    pub fn circle(d_assumed: usize) -> Self {
        EmbeddingConfig { k: 7, component_metric: ComponentMetric::Circle, d_assumed }
    }

    /// Default for planar observations: K = 5 (K*D = 10).
    pub fn planar(d_assumed: usize) -> Self {
        EmbeddingConfig { k: 5, component_metric: ComponentMetric::Euclidean, d_assumed }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    fn validate(&self, obs_dim: usize) -> Result<(), EmbeddingError> {
        let kd = self.k * obs_dim;
        let need = 2 * self.d_assumed + 1;
        if kd < need {
            return Err(EmbeddingError::DimensionCheck { kd, need });
        }
        Ok(())
    }
}

/// Delay vectors plus the raw angle differences `Δ_n = φ_{n+1} - φ_n mod 1`
/// they pair with.
///
/// Entry `n` holds the delay vector starting at observation `n` and the
/// angle difference at `n`; the usable length is
/// `min(N - K + 1, N - 1)`.
#[derive(Debug, Clone)]
pub struct DelayCloud<R: Real> {
    obs: ObservationSeries<R>,
    k: usize,
    deltas: Vec<R>,
    len: usize,
}

/// Build the delay cloud for an observation series.
///
/// Circle observations must already lie in `[0, 1)` and supply their own
/// angle differences. Planar observations need `reference` to extract the
/// angle series for the differences; the delay vectors stay planar.
pub fn build_delay_cloud<R: Real>(
    obs: ObservationSeries<R>,
    config: &EmbeddingConfig,
    reference: Option<&ReferencePoint<R>>,
) -> Result<DelayCloud<R>, EmbeddingError> {
    let n = obs.len();
    let k = config.k;
    if n <= k || n < 2 {
        return Err(EmbeddingError::SeriesTooShort { n, k });
    }
    config.validate(obs.dim())?;
    let angles: Vec<R> = match &obs {
        ObservationSeries::Circle(phis) => {
            for (i, &p) in phis.iter().enumerate() {
                if !(p >= R::zero() && p < R::one()) {
                    return Err(EmbeddingError::AngleOutOfRange {
                        index: i,
                        value: p.approx_f64(),
                    });
                }
            }
            phis.clone()
        }
        ObservationSeries::Planar(pts) => {
            let rp = reference.ok_or(EmbeddingError::MissingReference)?;
            angle_series(pts, rp)?
        }
    };
    let deltas: Vec<R> = angles.windows(2).map(|w| mod1(w[1] - w[0])).collect();
    let len = (n - k + 1).min(n - 1);
    Ok(DelayCloud { obs, k, deltas, len })
}

impl<R: Real> DelayCloud<R> {
    /// Number of usable (delay vector, angle difference) pairs.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn observations(&self) -> &ObservationSeries<R> {
        &self.obs
    }

    /// Raw angle differences, aligned with the delay vectors.
    pub fn deltas(&self) -> &[R] {
        &self.deltas[..self.len]
    }

    #[inline]
    pub fn delta(&self, n: usize) -> R {
        self.deltas[n]
    }

    /// Euclidean-combined distance between delay vectors `a` and `b`.
    #[inline]
    pub fn theta_distance(&self, a: usize, b: usize) -> R {
        let mut acc = R::zero();
        match &self.obs {
            ObservationSeries::Circle(v) => {
                for j in 0..self.k {
                    let d = circle_distance(v[a + j], v[b + j]);
                    acc = acc + d * d;
                }
            }
            ObservationSeries::Planar(v) => {
                for j in 0..self.k {
                    let dx = v[a + j].x - v[b + j].x;
                    let dy = v[a + j].y - v[b + j].y;
                    acc = acc + dx * dx + dy * dy;
                }
            }
        }
        acc.sqrt()
    }

    /// Squared Θ-distance, for pruned scans.
    #[inline]
    pub fn theta_distance_sq(&self, a: usize, b: usize) -> R {
        let d = self.theta_distance(a, b);
        d * d
    }

    /// Squared Θ-distance if it stays below `cap_sq`, bailing out early on
    /// the running component sum otherwise.
    #[inline]
    pub fn theta_distance_sq_within(&self, a: usize, b: usize, cap_sq: R) -> Option<R> {
        let mut acc = R::zero();
        match &self.obs {
            ObservationSeries::Circle(v) => {
                for j in 0..self.k {
                    let d = circle_distance(v[a + j], v[b + j]);
                    acc = acc + d * d;
                    if acc >= cap_sq {
                        return None;
                    }
                }
            }
            ObservationSeries::Planar(v) => {
                for j in 0..self.k {
                    let dx = v[a + j].x - v[b + j].x;
                    let dy = v[a + j].y - v[b + j].y;
                    acc = acc + dx * dx + dy * dy;
                    if acc >= cap_sq {
                        return None;
                    }
                }
            }
        }
        Some(acc)
    }

    /// Full graph distance between `(Θ_a, va)` and `(Θ_b, vb)`.
    #[inline]
    pub fn gamma_distance(&self, a: usize, b: usize, va: R, vb: R) -> R {
        let t = self.theta_distance(a, b);
        let dv = vb - va;
        (t * t + dv * dv).sqrt()
    }

    /// Number of scalar coordinates used for grid hashing.
    pub fn key_dims(&self) -> usize {
        match &self.obs {
            ObservationSeries::Circle(_) => self.k.min(MAX_KEY_DIMS),
            ObservationSeries::Planar(_) => (2 * self.k).min(MAX_KEY_DIMS),
        }
    }

    pub fn grid_wraps(&self) -> bool {
        matches!(self.obs, ObservationSeries::Circle(_))
    }

    /// First `key_dims` scalar coordinates of delay vector `n`, as f64.
    pub fn key_coords(&self, n: usize, out: &mut [f64; MAX_KEY_DIMS]) {
        match &self.obs {
            ObservationSeries::Circle(v) => {
                for (j, slot) in out.iter_mut().take(self.key_dims()).enumerate() {
                    *slot = v[n + j].approx_f64();
                }
            }
            ObservationSeries::Planar(v) => {
                for d in 0..self.key_dims() {
                    let p = v[n + d / 2];
                    out[d] = if d % 2 == 0 { p.x.approx_f64() } else { p.y.approx_f64() };
                }
            }
        }
    }

    /// Grid hash over the key coordinates with `cell_size >= delta`, so the
    /// one-cell neighborhood is a superset of every `delta`-ball.
    pub fn build_grid(&self, cell_size: f64) -> GridHash {
        let mut grid = GridHash::new(cell_size, self.key_dims(), self.grid_wraps());
        let mut key = [0f64; MAX_KEY_DIMS];
        for n in 0..self.len {
            self.key_coords(n, &mut key);
            grid.insert(&key[..self.key_dims()], n as u32);
        }
        grid
    }
}

/// A delay vector for the standalone distance entry point.
#[derive(Debug, Clone, Copy)]
pub enum DelayVector<'a, R: Real> {
    Circle(&'a [R]),
    Planar(&'a [PlanarPoint<R>]),
}

/// Distance between two delay vectors: Euclidean norm over per-component
/// distances (circle distance for angle components).
///
/// Panics on length or kind mismatch.
pub fn embedded_distance<R: Real>(u: DelayVector<'_, R>, v: DelayVector<'_, R>) -> R {
    match (u, v) {
        (DelayVector::Circle(a), DelayVector::Circle(b)) => {
            assert_eq!(a.len(), b.len(), "delay vector length mismatch");
            let mut acc = R::zero();
            for (&x, &y) in a.iter().zip(b) {
                let d = circle_distance(x, y);
                acc = acc + d * d;
            }
            acc.sqrt()
        }
        (DelayVector::Planar(a), DelayVector::Planar(b)) => {
            assert_eq!(a.len(), b.len(), "delay vector length mismatch");
            let mut acc = R::zero();
            for (x, y) in a.iter().zip(b) {
                let dx = x.x - y.x;
                let dy = x.y - y.y;
                acc = acc + dx * dx + dy * dy;
            }
            acc.sqrt()
        }
        _ => panic!("cannot mix circle and planar delay vectors"),
    }
}

/// A-posteriori estimate of the separation `ε` between integer translates of
/// the lifted graph.
#[derive(Debug, Clone, Copy)]
pub struct SeparationEstimate<R: Real> {
    /// Minimal distance found between distinct translates.
    pub epsilon: R,
    /// Closest pair of indices.
    pub pair: (usize, usize),
    /// Translate offset at the minimum.
    pub translate: i32,
}

/// Scan all index pairs (including a point against its own translate) and
/// integer offsets `j != 0` for the minimal distance between different
/// translates of the lifted graph `(Θ_n, Δ̂_n)`.
///
/// `lifted` must assign a lifted value to every cloud index. Offsets beyond
/// `|j| = 2` are included only when the lift spread makes them competitive;
/// otherwise they are strictly dominated by the value-coordinate gap.
pub fn estimate_separation<R: Real>(
    cloud: &DelayCloud<R>,
    lifted: &[R],
) -> Result<SeparationEstimate<R>, EmbeddingError> {
    if lifted.len() != cloud.len() {
        return Err(EmbeddingError::LiftLengthMismatch {
            got: lifted.len(),
            want: cloud.len(),
        });
    }
    let spread = {
        let mut lo = lifted[0];
        let mut hi = lifted[0];
        for &v in lifted {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (hi - lo).approx_f64()
    };
    let j_max = 2.max(spread.ceil() as i32 + 1);
    // Baseline: every point against its own translate at distance exactly 1.
    let mut best = R::one();
    let mut best_pair = (0usize, 0usize);
    let mut best_j = 1i32;
    let n = cloud.len();
    for a in 0..n {
        for b in (a + 1)..n {
            let Some(t2) = cloud.theta_distance_sq_within(a, b, best * best) else {
                continue;
            };
            for j in 1..=j_max {
                for sign in [1i32, -1] {
                    let off = R::from_f64_lossy((j * sign) as f64);
                    let dv = lifted[b] + off - lifted[a];
                    let d = (t2 + dv * dv).sqrt();
                    if d < best {
                        best = d;
                        best_pair = (a, b);
                        best_j = j * sign;
                    }
                }
            }
        }
    }
    Ok(SeparationEstimate { epsilon: best, pair: best_pair, translate: best_j })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::rigid_orbit_scalar;

    const GOLDEN: f64 = 0.618033988749894848;

    fn circle_cloud(obs: Vec<f64>, k: usize) -> DelayCloud<f64> {
        // Structural tests use small K; disable the embedding bound there.
        let d_assumed = if k >= 3 { 1 } else { 0 };
        let cfg = EmbeddingConfig { d_assumed, ..EmbeddingConfig::circle(1) }.with_k(k);
        build_delay_cloud(ObservationSeries::Circle(obs), &cfg, None).unwrap()
    }

    #[test]
    fn tiny_cloud_layout() {
        let cloud = circle_cloud(vec![0.1, 0.2, 0.3, 0.4], 2);
        assert_eq!(cloud.len(), 3);
        for (n, want) in [(0, 0.1), (1, 0.1), (2, 0.1)] {
            assert!((cloud.delta(n) - want).abs() < 1e-15);
        }
        // vectors[n][j] == obs[n+j]: distance of adjacent vectors is
        // sqrt(2) * 0.1.
        let d = cloud.theta_distance(0, 1);
        assert!((d - 0.1 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pure_rotation_deltas_constant() {
        for k in [2usize, 5, 9] {
            let obs = rigid_orbit_scalar(GOLDEN, 0.2, 500);
            let cloud = circle_cloud(obs, k);
            for n in 0..cloud.len() {
                assert!(
                    (cloud.delta(n) - GOLDEN).abs() < 1e-14,
                    "k={k} n={n} delta={}",
                    cloud.delta(n)
                );
            }
        }
    }

    #[test]
    fn size_and_dimension_checks() {
        let cfg = EmbeddingConfig::circle(1).with_k(5);
        let short = ObservationSeries::Circle(vec![0.1; 5]);
        assert!(matches!(
            build_delay_cloud(short, &cfg, None),
            Err(EmbeddingError::SeriesTooShort { n: 5, k: 5 })
        ));

        // K*D = 2 < 2*1+1.
        let cfg = EmbeddingConfig::circle(1).with_k(2);
        let obs = ObservationSeries::Circle(vec![0.1, 0.2, 0.3, 0.4]);
        assert!(matches!(
            build_delay_cloud(obs, &cfg, None),
            Err(EmbeddingError::DimensionCheck { kd: 2, need: 3 })
        ));

        let cfg = EmbeddingConfig::planar(1);
        let obs = ObservationSeries::Planar(vec![PlanarPoint::new(0.0, 0.0); 10]);
        assert!(matches!(
            build_delay_cloud(obs, &cfg, None),
            Err(EmbeddingError::MissingReference)
        ));

        let obs = ObservationSeries::Circle(vec![0.1, 1.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]);
        let cfg = EmbeddingConfig::circle(1);
        assert!(matches!(
            build_delay_cloud(obs, &cfg, None),
            Err(EmbeddingError::AngleOutOfRange { index: 1, .. })
        ));
    }

    #[test]
    fn embedded_distance_examples() {
        let u = [0.95, 0.95];
        let v = [0.05, 0.05];
        let d = embedded_distance(DelayVector::Circle(&u), DelayVector::Circle(&v));
        assert!((d - 0.1 * 2f64.sqrt()).abs() < 1e-15);

        let a = [PlanarPoint::new(0.0, 0.0)];
        let b = [PlanarPoint::new(3.0, 4.0)];
        assert_eq!(embedded_distance(DelayVector::Planar(&a), DelayVector::Planar(&b)), 5.0);

        let u = [0.1];
        assert_eq!(embedded_distance(DelayVector::Circle(&u), DelayVector::Circle(&u)), 0.0);
    }

    #[test]
    #[should_panic(expected = "length mismatch")]
    fn embedded_distance_rejects_mismatch() {
        embedded_distance(DelayVector::Circle(&[0.1]), DelayVector::Circle(&[0.1, 0.2]));
    }

    #[test]
    fn metric_axioms_on_sampled_triples() {
        // Deterministic pseudo-random angle series.
        let obs: Vec<f64> = (0..600)
            .map(|i| crate::torus::mod1(0.37 + (i as f64) * 0.754877666 + (i as f64 * 0.1).sin() * 0.2))
            .collect();
        let cloud = circle_cloud(obs, 4);
        let m = cloud.len();
        let mut checked = 0;
        for t in 0..10_000 {
            let a = (t * 7919) % m;
            let b = (t * 104729 + 13) % m;
            let c = (t * 1299709 + 71) % m;
            let dab = cloud.theta_distance(a, b);
            let dba = cloud.theta_distance(b, a);
            assert_eq!(dab, dba);
            let dac = cloud.theta_distance(a, c);
            let dcb = cloud.theta_distance(c, b);
            assert!(dab <= dac + dcb + 1e-12, "triangle violated at ({a},{b},{c})");
            checked += 1;
        }
        assert_eq!(checked, 10_000);
    }

    #[test]
    fn distance_nondecreasing_in_k() {
        let obs = rigid_orbit_scalar(0.754877666, 0.1, 200);
        let mut prev = 0.0;
        for k in [2usize, 4, 6, 8] {
            let cloud = circle_cloud(obs.clone(), k);
            let d = cloud.theta_distance(3, 77);
            assert!(d >= prev - 1e-15, "k={k}: {d} < {prev}");
            prev = d;
        }
    }

    #[test]
    fn pure_rotation_separation_is_exactly_one() {
        let obs = rigid_orbit_scalar(GOLDEN, 0.0, 400);
        let cloud = circle_cloud(obs, 7);
        let lifted: Vec<f64> = cloud.deltas().to_vec(); // constant series
        let sep = estimate_separation(&cloud, &lifted).unwrap();
        assert_eq!(sep.epsilon, 1.0);
        assert_eq!(sep.translate.abs(), 1);
    }

    #[test]
    fn separation_rejects_wrong_length() {
        let cloud = circle_cloud(vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8], 7);
        assert!(matches!(
            estimate_separation(&cloud, &[0.0]),
            Err(EmbeddingError::LiftLengthMismatch { .. })
        ));
    }
}
