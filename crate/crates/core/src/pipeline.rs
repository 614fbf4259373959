//! End-to-end rotation-rate estimation from an observed angle series.
//!
//! The pipeline is: delay cloud -> offset continuation -> weighted average.
//! The one tunable that matters is the continuation radius `delta`; when the
//! caller does not fix it, a pilot run on a prefix of the data estimates the
//! translate separation `ε` and sets `delta = ε/4`, falling back to simple
//! doubling/halving retries when the pilot is too small to connect or flags
//! an ambiguity.

use thiserror::Error;

use crate::birkhoff::{BirkhoffError, WeightParams};
use crate::embedding::{
    build_delay_cloud, estimate_separation, ComponentMetric, DelayCloud, EmbeddingConfig,
    EmbeddingError, ObservationSeries, SeparationEstimate,
};
use crate::lift::{
    continue_lift, rotation_rate, ContinuationParams, LiftError, LiftedSeries, RotationRate,
};
use crate::scalar::Real;
use crate::torus::mod1;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Average(#[from] BirkhoffError),
    #[error("pilot run could not settle on a continuation radius (last delta {0})")]
    PilotFailed(f64),
}

/// Estimation options; `None` fields resolve to data-driven defaults.
#[derive(Debug, Clone, Copy)]
pub struct EstimateOptions {
    /// Delay count; default 7 for circle-valued observations.
    pub k: Option<usize>,
    /// Assumed torus dimension for the embedding bound.
    pub d_assumed: usize,
    /// Continuation radius; default from the pilot separation estimate.
    pub delta: Option<f64>,
    /// Weight exponent for the final average.
    pub p: WeightParams,
    /// Prefix length for the pilot separation scan.
    pub pilot_len: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            k: None,
            d_assumed: 1,
            delta: None,
            p: WeightParams::new(1),
            pilot_len: 4000,
        }
    }
}

/// Everything the estimation produced, including diagnostics.
#[derive(Debug)]
pub struct PipelineReport<R: Real> {
    /// Final rate; `None` when the lift did not complete.
    pub rate: Option<RotationRate<R>>,
    pub lift: LiftedSeries<R>,
    pub cloud: DelayCloud<R>,
    pub k_used: usize,
    pub delta_used: f64,
    /// Pilot separation estimate when a pilot ran.
    pub pilot_separation: Option<SeparationEstimate<R>>,
}

impl<R: Real> PipelineReport<R> {
    pub fn complete(&self) -> bool {
        self.lift.is_complete()
    }
}

/// Default continuation radius when no pilot estimate is available.
pub const DEFAULT_DELTA: f64 = 0.05;

/// Pilot: continue a prefix of the cloud and estimate the translate
/// separation. Returns the validity cap `ε̂/4` and the radius at which the
/// pilot prefix connected.
fn pilot_delta<R: Real>(
    cloud: &DelayCloud<R>,
    opts: &EstimateOptions,
) -> Result<(f64, f64, Option<SeparationEstimate<R>>), PipelineError> {
    let pilot_n = opts.pilot_len.min(cloud.len());
    let mut delta = DEFAULT_DELTA;
    for _ in 0..12 {
        let params = match ContinuationParams::new(delta) {
            Ok(p) => p,
            Err(_) => break,
        };
        match continue_lift_prefix(cloud, pilot_n, &params) {
            Ok(lift) if lift.is_complete() => {
                let lifted = lift.lifted_values()?;
                let sep = estimate_separation_prefix(cloud, pilot_n, &lifted)?;
                let eps = sep.epsilon.approx_f64();
                let cap = (eps / 4.0).clamp(1e-4, 0.45);
                return Ok((cap, delta, Some(sep)));
            }
            Ok(_) => {
                // Prefix not connected at this radius; widen.
                if delta >= 0.449 {
                    break;
                }
                delta = (delta * 2.0).min(0.45);
            }
            Err(LiftError::Ambiguous { .. }) => {
                delta /= 2.0;
                if delta < 1e-5 {
                    break;
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(PipelineError::PilotFailed(delta))
}

fn continue_lift_prefix<R: Real>(
    cloud: &DelayCloud<R>,
    n: usize,
    params: &ContinuationParams,
) -> Result<LiftedSeries<R>, LiftError> {
    if n >= cloud.len() {
        return continue_lift(cloud, params);
    }
    let prefix = truncate_cloud(cloud, n);
    continue_lift(&prefix, params)
}

fn estimate_separation_prefix<R: Real>(
    cloud: &DelayCloud<R>,
    n: usize,
    lifted: &[R],
) -> Result<SeparationEstimate<R>, EmbeddingError> {
    if n >= cloud.len() {
        return estimate_separation(cloud, lifted);
    }
    let prefix = truncate_cloud(cloud, n);
    estimate_separation(&prefix, &lifted[..prefix.len()])
}

fn truncate_cloud<R: Real>(cloud: &DelayCloud<R>, n: usize) -> DelayCloud<R> {
    let k = cloud.k();
    let obs = match cloud.observations() {
        ObservationSeries::Circle(v) => ObservationSeries::Circle(v[..(n + k)].to_vec()),
        ObservationSeries::Planar(v) => ObservationSeries::Planar(v[..(n + k)].to_vec()),
    };
    // d_assumed = 0: the full cloud already passed the bound check.
    let cfg =
        EmbeddingConfig { k, component_metric: ComponentMetric::Circle, d_assumed: 0 };
    build_delay_cloud(obs, &cfg, None).expect("prefix of a valid cloud is valid")
}

/// Estimate the rotation rate of a circle-valued observation series.
pub fn estimate_rate_from_angles<R: Real>(
    angles: Vec<R>,
    opts: &EstimateOptions,
) -> Result<PipelineReport<R>, PipelineError> {
    let k = opts.k.unwrap_or(7);
    let cfg = EmbeddingConfig::circle(opts.d_assumed).with_k(k);
    let cloud = build_delay_cloud(ObservationSeries::Circle(angles), &cfg, None)?;

    let (mut delta_used, cap, pilot_separation) = match opts.delta {
        Some(d) => (d, d, None),
        None => {
            // The full series is denser than the pilot prefix, so its
            // connectivity radius is smaller than the pilot's; start well
            // below it and escalate toward the validity cap only if the
            // component fails to connect. Smaller radii are both faster and
            // farther below the separation.
            let (cap, pilot_complete, sep) = pilot_delta(&cloud, opts)?;
            ((pilot_complete / 8.0).clamp(1e-4, cap), cap, sep)
        }
    };
    let lift = loop {
        let params = ContinuationParams::new(delta_used).map_err(LiftError::from)?;
        let lift = continue_lift(&cloud, &params)?;
        if lift.is_complete() || delta_used >= cap {
            break lift;
        }
        delta_used = (delta_used * 2.0).min(cap);
    };
    let rate = if lift.is_complete() { Some(rotation_rate(&lift, opts.p)?) } else { None };
    Ok(PipelineReport { rate, lift, cloud, k_used: k, delta_used, pilot_separation })
}

/// Re-evaluate a finished estimation at higher precision: recompute the
/// angle differences from a high-precision copy of the same observations and
/// reuse the integer offsets (exact combinatorial data) from the completed
/// lift.
pub fn upgrade_rate<S: Real, R: Real>(
    report: &PipelineReport<R>,
    hi_angles: &[S],
    p: WeightParams,
) -> Result<RotationRate<S>, PipelineError> {
    let m = report.lift.len();
    let deltas: Vec<S> = hi_angles.windows(2).take(m).map(|w| mod1(w[1] - w[0])).collect();
    let lift = report.lift.with_deltas(deltas)?;
    Ok(rotation_rate(&lift, p)?)
}


/// Outcome of winding inference on planar observations.
#[derive(Debug, Clone)]
pub enum WindingInference {
    /// Winding of the underlying closed curve about the reference point,
    /// with the validated base rotation number used for the order
    /// reconstruction.
    Determined { winding: i32, base_rate: f64 },
    /// No candidate base rotation survived validation (non-quasiperiodic
    /// data, d > 1, or too few samples).
    Indeterminate,
}

/// Infer the winding number of the closed curve underlying a planar
/// observation sequence about `reference`, from the sequence alone.
///
/// The observed rate is `W ρ mod 1` for an unknown integer winding `W` and
/// unknown base rotation `ρ`, so the rate alone cannot separate the two.
/// The embedded delay cloud adds the missing structure: its near-return
/// times are the best-approximation denominators of the base `ρ`,
/// independent of `W`. Every candidate factorization `ρ_c` of the rate with
/// `|W| <= 12` is validated in both directions: the observed return times
/// must be small for `ρ_c`, and the denominators predicted by `ρ_c` must be
/// observed as actual near-returns. Surviving candidates reconstruct the
/// curve order (sorting samples by `n ρ_c mod 1`), and the winding is the
/// signed angular turn of the ordered curve; all survivors must agree.
pub fn infer_winding_from_planar(
    points: &[crate::projections::PlanarPoint<f64>],
    reference: &crate::projections::ReferencePoint<f64>,
    report: &PipelineReport<f64>,
) -> WindingInference {
    let Some(rate) = report.rate.as_ref().map(|r| r.rate.approx_f64()) else {
        return WindingInference::Indeterminate;
    };
    let cloud = &report.cloud;
    let n = cloud.len();
    if n < 2_000 {
        return WindingInference::Indeterminate;
    }

    // Averaged embedding distances d(q) over a few anchors, each chosen so
    // a + q stays in range.
    let q_max = (n / 2).min(40_000);
    let mut dist = vec![0.0f64; q_max];
    for q in 1..q_max {
        let top = n - 1 - q;
        let anchors = [0usize, top / 2, top];
        let mut acc = 0.0;
        for &a in &anchors {
            acc += cloud.theta_distance(a, a + q).approx_f64();
        }
        dist[q] = acc / anchors.len() as f64;
    }
    let mut sorted = dist[1..].to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    let near_scale = 0.35 * median;

    // Record-setting return times (candidates for base denominators).
    let mut records: Vec<usize> = Vec::new();
    let mut best = f64::INFINITY;
    for (q, &d) in dist.iter().enumerate().skip(1) {
        if d < best {
            best = d;
            records.push(q);
        }
    }
    let top_records: Vec<usize> =
        records.iter().rev().take(4).copied().filter(|&q| q >= 20).collect();
    if top_records.is_empty() {
        return WindingInference::Indeterminate;
    }

    // Enumerate candidate base rotations (w, j, orientation).
    let mut survivors: Vec<(i32, f64)> = Vec::new();
    for w in 1..=12i32 {
        for j in 0..w {
            for r in [rate, mod1(1.0 - rate)] {
                let cand = mod1((r + j as f64) / w as f64);
                if cand < 1e-6 || cand > 1.0 - 1e-6 {
                    continue;
                }
                if !candidate_consistent(cand, &top_records, &dist, near_scale, q_max) {
                    continue;
                }
                if let Some(wick) = ordered_winding(points, cand, reference) {
                    survivors.push((wick, cand));
                }
            }
        }
    }
    survivors.sort_by(|a, b| a.0.abs().cmp(&b.0.abs()).then(a.1.partial_cmp(&b.1).unwrap()));
    survivors.dedup_by_key(|(w, _)| w.abs());
    match survivors[..] {
        [(winding, base_rate)] => WindingInference::Determined { winding, base_rate },
        _ => WindingInference::Indeterminate,
    }
}

/// Both-direction return-time validation of a candidate base rotation.
fn candidate_consistent(
    cand: f64,
    top_records: &[usize],
    dist: &[f64],
    near_scale: f64,
    q_max: usize,
) -> bool {
    // (i) Observed deep returns must be near-returns of the candidate.
    for &q in top_records {
        let r = mod1(q as f64 * cand);
        if r.min(1.0 - r) > 0.04 {
            return false;
        }
    }
    // (ii) Denominators predicted by the candidate must be observed.
    let mut checked = 0;
    for q in best_denominators(cand, q_max) {
        if q < 50 {
            continue; // embedding distortion dominates the earliest returns
        }
        if dist[q] > near_scale {
            return false;
        }
        checked += 1;
    }
    checked >= 2
}

/// Best-approximation denominators of `x` below `q_max` (continued
/// fraction convergents).
fn best_denominators(x: f64, q_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut q0, mut q1) = (0usize, 1usize);
    let mut frac = mod1(x);
    for _ in 0..64 {
        if frac.abs() < 1e-12 {
            break;
        }
        frac = 1.0 / frac;
        let a = frac.floor();
        frac -= a;
        let q2 = (a as usize).saturating_mul(q1).saturating_add(q0);
        if q2 >= q_max {
            break;
        }
        out.push(q2);
        (q0, q1) = (q1, q2);
    }
    out
}

/// Winding of the curve reconstructed by sorting samples along the
/// candidate base rotation.
fn ordered_winding(
    points: &[crate::projections::PlanarPoint<f64>],
    base: f64,
    reference: &crate::projections::ReferencePoint<f64>,
) -> Option<i32> {
    let n = points.len().min(20_000);
    let mut order: Vec<usize> = (0..n).collect();
    let pos: Vec<f64> = (0..n).map(|i| mod1(i as f64 * base)).collect();
    order.sort_by(|&a, &b| pos[a].partial_cmp(&pos[b]).unwrap());
    let sorted: Vec<crate::projections::PlanarPoint<f64>> =
        order.into_iter().map(|i| points[i]).collect();
    crate::projections::winding_number(&sorted, reference).ok()
}
