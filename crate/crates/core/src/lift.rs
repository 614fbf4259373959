//! Offset continuation: turning circle-valued angle differences into a real
//! lift.
//!
//! The angle differences `Δ_n ∈ [0,1)` of an observed projection are only
//! defined modulo 1; averaging them directly is meaningless once the
//! underlying lift wanders across integer boundaries. The lift assigns each
//! `Δ_n` an integer offset `m_n` so that all points `(Θ_n, Δ_n + m_n)` sit
//! on the same connected component of the family of integer translates of
//! the lifted graph.
//!
//! The continuation works breadth-first: `m_0 = 0` anchors a component, and
//! an assignment spreads from index `n1` to an unassigned neighbor `n2`
//! whenever some integer `k` puts the two graph points within `δ` of each
//! other. When `δ` is below the translate separation `ε`, the choice of `k`
//! is forced and the final assignment is independent of exploration order.
//! Two failure modes are first-class results:
//!
//! * a neighbor pair consistent with two different offsets (or conflicting
//!   with an earlier assignment) means `δ` is too large relative to `ε`;
//! * an exhausted frontier with unassigned indices means the series is too
//!   short to connect the component at this `δ`.
//!
//! The module also carries ground-truth diagnostics used on synthetic data:
//! an order-based lift oracle that uses the (normally unobservable) torus
//! coordinates, and near-return chain analysis showing how knowledge of the
//! lift spreads through little steps between near returns.

use std::collections::VecDeque;

use thiserror::Error;

use crate::birkhoff::{weighted_birkhoff_average, AverageReport, BirkhoffError, WeightParams};
use crate::embedding::{DelayCloud, EmbeddingError};
use crate::grid::MAX_KEY_DIMS;
use crate::scalar::Real;
use crate::torus::{mod1, torus_distance, TorusPoint};

#[derive(Debug, Error, PartialEq)]
pub enum LiftError {
    #[error(
        "ambiguous offset between indices {n1} and {n2}: \
         two integer translates fall within delta (delta >= separation)"
    )]
    Ambiguous { n1: usize, n2: usize },
    #[error("delta must satisfy 0 < delta < 1/2 (got {0})")]
    BadDelta(f64),
    #[error("lift is not complete ({assigned} of {total} assigned)")]
    Incomplete { assigned: usize, total: usize },
    #[error("empty cloud")]
    EmptyCloud,
    #[error("oracle continuity gap at sorted position {position} (|jump| = {jump:.3})")]
    OracleGap { position: usize, jump: f64 },
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Average(#[from] BirkhoffError),
}

/// Continuation controls. `delta` is the match radius in the graph metric.
#[derive(Debug, Clone, Copy)]
pub struct ContinuationParams {
    pub delta: f64,
    /// Cap on frontier pops; a safety valve, generous by default.
    pub max_rounds: usize,
    /// Cap on neighbor candidates examined per pop.
    pub neighbor_budget: usize,
    /// Exhaustive O(N^2) neighbor scan instead of grid hashing. Slow;
    /// retained as the correctness oracle for the grid path.
    pub exhaustive: bool,
}

impl ContinuationParams {
    pub fn new(delta: f64) -> Result<Self, LiftError> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(LiftError::BadDelta(delta));
        }
        Ok(ContinuationParams {
            delta,
            max_rounds: usize::MAX,
            neighbor_budget: usize::MAX,
            exhaustive: false,
        })
    }

    pub fn exhaustive(mut self) -> Self {
        self.exhaustive = true;
        self
    }
}

/// Angle differences with their assigned integer offsets.
#[derive(Debug, Clone)]
pub struct LiftedSeries<R: Real> {
    deltas: Vec<R>,
    offsets: Vec<Option<i32>>,
    assigned: usize,
}

impl<R: Real> LiftedSeries<R> {
    pub fn unassigned(deltas: Vec<R>) -> Self {
        let n = deltas.len();
        LiftedSeries { deltas, offsets: vec![None; n], assigned: 0 }
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn assigned_count(&self) -> usize {
        self.assigned
    }

    pub fn is_complete(&self) -> bool {
        self.assigned == self.deltas.len() && !self.deltas.is_empty()
    }

    /// Fraction of indices connected to the anchor component.
    pub fn connected_fraction(&self) -> f64 {
        if self.deltas.is_empty() {
            return 0.0;
        }
        self.assigned as f64 / self.deltas.len() as f64
    }

    pub fn offset(&self, n: usize) -> Option<i32> {
        self.offsets[n]
    }

    pub fn delta(&self, n: usize) -> R {
        self.deltas[n]
    }

    pub fn deltas(&self) -> &[R] {
        &self.deltas
    }

    /// Lifted value at `n`, if assigned.
    pub fn lifted(&self, n: usize) -> Option<R> {
        self.offsets[n].map(|m| self.deltas[n] + R::from_f64_lossy(m as f64))
    }

    /// All lifted values; errors while any index is unassigned.
    pub fn lifted_values(&self) -> Result<Vec<R>, LiftError> {
        if !self.is_complete() {
            return Err(LiftError::Incomplete {
                assigned: self.assigned,
                total: self.deltas.len(),
            });
        }
        Ok((0..self.deltas.len()).map(|n| self.lifted(n).unwrap()).collect())
    }

    /// `(min, max)` of the lifted values.
    pub fn value_range(&self) -> Result<(R, R), LiftError> {
        let vals = self.lifted_values()?;
        let mut lo = vals[0];
        let mut hi = vals[0];
        for v in vals {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok((lo, hi))
    }

    /// Replace the angle differences with a higher-precision copy of the
    /// same series, keeping the integer offsets. The offsets are exact
    /// combinatorial data, so this upgrades a finished lift to extended
    /// precision without re-running the continuation. Each replacement must
    /// agree with the original to within 1e-9.
    pub fn with_deltas<S: Real>(&self, deltas: Vec<S>) -> Result<LiftedSeries<S>, LiftError> {
        if deltas.len() != self.deltas.len() {
            return Err(LiftError::Incomplete { assigned: deltas.len(), total: self.deltas.len() });
        }
        for (i, d) in deltas.iter().enumerate() {
            let orig = self.deltas[i].approx_f64();
            let diff = (d.approx_f64() - orig).abs();
            let diff = diff.min(1.0 - diff);
            assert!(diff < 1e-9, "replacement delta {i} differs from original by {diff}");
        }
        Ok(LiftedSeries { deltas, offsets: self.offsets.clone(), assigned: self.assigned })
    }

    fn assign(&mut self, n: usize, m: i32) {
        if self.offsets[n].is_none() {
            self.offsets[n] = Some(m);
            self.assigned += 1;
        }
    }
}

/// Frontier discipline; the final assignment is order-independent when
/// `delta < ε`, which the tests assert by comparing both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontierOrder {
    Fifo,
    Lifo,
}

/// Assign integer offsets by breadth-first continuation from index 0.
///
/// Returns the (possibly incomplete) lift; an incomplete lift signals that
/// the series is too short for this `delta`. A detected ambiguity aborts
/// with [`LiftError::Ambiguous`], signalling `delta >= ε`.
pub fn continue_lift<R: Real>(
    cloud: &DelayCloud<R>,
    params: &ContinuationParams,
) -> Result<LiftedSeries<R>, LiftError> {
    continue_lift_ordered(cloud, params, FrontierOrder::Fifo)
}

pub fn continue_lift_ordered<R: Real>(
    cloud: &DelayCloud<R>,
    params: &ContinuationParams,
    order: FrontierOrder,
) -> Result<LiftedSeries<R>, LiftError> {
    if cloud.is_empty() {
        return Err(LiftError::EmptyCloud);
    }
    if !(params.delta > 0.0 && params.delta < 0.5) {
        return Err(LiftError::BadDelta(params.delta));
    }
    let n = cloud.len();
    let delta = R::from_f64_lossy(params.delta);
    let mut lift = LiftedSeries::unassigned(cloud.deltas().to_vec());
    lift.assign(0, 0);

    let grid = if params.exhaustive { None } else { Some(cloud.build_grid(params.delta)) };

    let mut frontier: VecDeque<usize> = VecDeque::new();
    frontier.push_back(0);
    let mut candidates: Vec<u32> = Vec::new();
    let mut key = [0f64; MAX_KEY_DIMS];
    let mut rounds = 0usize;

    while let Some(n1) = match order {
        FrontierOrder::Fifo => frontier.pop_front(),
        FrontierOrder::Lifo => frontier.pop_back(),
    } {
        rounds += 1;
        if rounds > params.max_rounds {
            break;
        }
        let lifted_n1 = lift.lifted(n1).expect("frontier entries are assigned");
        candidates.clear();
        match &grid {
            Some(g) => {
                cloud.key_coords(n1, &mut key);
                g.candidates(&key[..cloud.key_dims()], &mut candidates);
            }
            None => candidates.extend(0..n as u32),
        }
        // Consistency spot-checks against already-assigned neighbors: a
        // bounded number per pop keeps the cost linear while still tripping
        // on interleaved translates, which are pervasive whenever
        // delta >= separation. Exhaustive mode checks every such edge.
        let mut consistency_budget =
            if params.exhaustive { usize::MAX } else { CONSISTENCY_CHECKS_PER_POP };
        let delta_sq = delta * delta;
        for (examined, &c) in candidates.iter().enumerate() {
            if examined >= params.neighbor_budget {
                break;
            }
            let n2 = c as usize;
            if n2 == n1 {
                continue;
            }
            let already = lift.offset(n2);
            if already.is_some() {
                if consistency_budget == 0 {
                    continue;
                }
                consistency_budget -= 1;
            }
            let Some(t2) = cloud.theta_distance_sq_within(n1, n2, delta_sq) else {
                continue;
            };
            // Best integer k re-aligning delta(n2) with the lifted value at
            // n1, plus its nearest competitors.
            let k0 = (lifted_n1 - cloud.delta(n2)).round();
            let mut best: Option<(R, i32)> = None;
            let mut second: Option<R> = None;
            for dk in [-1.0f64, 0.0, 1.0] {
                let k = k0 + R::from_f64_lossy(dk);
                let dv = cloud.delta(n2) + k - lifted_n1;
                let d2 = t2 + dv * dv;
                let ki = k.approx_f64() as i32;
                match best {
                    None => best = Some((d2, ki)),
                    Some((bd, _)) if d2 < bd => {
                        second = Some(bd);
                        best = Some((d2, ki));
                    }
                    Some(_) => match second {
                        None => second = Some(d2),
                        Some(sd) if d2 < sd => second = Some(d2),
                        Some(_) => {}
                    },
                }
            }
            let (bd, bk) = best.expect("three candidates evaluated");
            if bd >= delta_sq {
                continue;
            }
            // With delta < 1/2 the runner-up is at least 1 - delta > delta
            // away, but verify: a violation means the translates interleave.
            if let Some(sd) = second {
                if sd < delta_sq {
                    return Err(LiftError::Ambiguous { n1, n2 });
                }
            }
            match already {
                None => {
                    lift.assign(n2, bk);
                    frontier.push_back(n2);
                }
                Some(existing) if existing != bk => {
                    // A second chain reaches n2 with a different translate.
                    return Err(LiftError::Ambiguous { n1, n2 });
                }
                Some(_) => {}
            }
        }
    }
    Ok(lift)
}

/// Assigned-neighbor consistency verifications per frontier pop in grid
/// mode.
const CONSISTENCY_CHECKS_PER_POP: usize = 8;

/// Rotation rate extracted from a completed lift.
#[derive(Debug, Clone)]
pub struct RotationRate<R: Real> {
    /// Rate reduced to `[0, 1)` revolutions per step.
    pub rate: R,
    /// Unreduced weighted mean of the lifted differences.
    pub raw_mean: R,
    /// Underlying weighted-average report with checkpoints.
    pub report: AverageReport<R>,
}

/// Weighted Birkhoff average of the lifted differences, reduced mod 1.
pub fn rotation_rate<R: Real>(
    lift: &LiftedSeries<R>,
    params: WeightParams,
) -> Result<RotationRate<R>, LiftError> {
    let values = lift.lifted_values()?;
    let report = weighted_birkhoff_average(&values, params)?;
    Ok(RotationRate { rate: mod1(report.value), raw_mean: report.value, report })
}

/// Ground-truth lift for synthetic data: sort (d = 1) or flood-fill (d = 2)
/// by the true torus coordinates, assigning offsets by continuity of the
/// lifted value. The result is valid up to one global integer, which is then
/// gauged so that index 0 has offset 0.
pub fn lift_oracle<R: Real>(
    thetas: &[TorusPoint<R>],
    deltas: &[R],
) -> Result<LiftedSeries<R>, LiftError> {
    assert!(
        thetas.len() >= deltas.len(),
        "need one torus point per angle difference"
    );
    let n = deltas.len();
    if n == 0 {
        return Err(LiftError::EmptyCloud);
    }
    let d = thetas[0].dim();
    let mut lift = LiftedSeries::unassigned(deltas.to_vec());
    match d {
        1 => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| {
                thetas[a].coords()[0]
                    .partial_cmp(&thetas[b].coords()[0])
                    .expect("finite coordinates")
            });
            lift.assign(order[0], 0);
            let mut prev = order[0];
            for (pos, &i) in order.iter().enumerate().skip(1) {
                let prev_lifted = lift.lifted(prev).unwrap();
                let k = (prev_lifted - deltas[i]).round();
                let jump = (deltas[i] + k - prev_lifted).abs().approx_f64();
                if jump >= 0.25 {
                    return Err(LiftError::OracleGap { position: pos, jump });
                }
                lift.assign(i, k.approx_f64() as i32);
                prev = i;
            }
        }
        2 => {
            oracle_flood_fill_2d(thetas, deltas, &mut lift)?;
        }
        other => panic!("lift oracle supports d = 1 or 2, got {other}"),
    }
    // Gauge: offset 0 at index 0.
    let base = lift.offset(0).expect("all assigned");
    if base != 0 {
        for m in lift.offsets.iter_mut() {
            *m = Some(m.unwrap() - base);
        }
    }
    Ok(lift)
}

/// Shortest-edge-first growth over a neighbor graph on the true 2-torus
/// positions, widening the candidate radius until assignment succeeds.
///
/// Steep regions of the lifted value (a reference point close to the curve)
/// are only safe to cross through genuinely nearest neighbors, so edges are
/// consumed in global length order rather than breadth-first.
fn oracle_flood_fill_2d<R: Real>(
    thetas: &[TorusPoint<R>],
    deltas: &[R],
    lift: &mut LiftedSeries<R>,
) -> Result<(), LiftError> {
    use crate::grid::GridHash;
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let n = deltas.len();
    let mut radius = 3.0 / (n as f64).sqrt();
    let mut last_err = LiftError::EmptyCloud;
    while radius <= 0.25 {
        *lift = LiftedSeries::unassigned(lift.deltas.clone());
        let mut grid = GridHash::new(radius, 2, true);
        for (i, th) in thetas.iter().take(n).enumerate() {
            let c = th.coords();
            grid.insert(&[c[0].approx_f64(), c[1].approx_f64()], i as u32);
        }
        lift.assign(0, 0);
        // (length scaled to integer, from, to); shortest edge first.
        let mut heap: BinaryHeap<Reverse<(u64, u32, u32)>> = BinaryHeap::new();
        let mut cands = Vec::new();
        let push_edges = |from: usize,
                              lift: &LiftedSeries<R>,
                              heap: &mut BinaryHeap<Reverse<(u64, u32, u32)>>,
                              cands: &mut Vec<u32>| {
            cands.clear();
            let c = thetas[from].coords();
            grid.candidates(&[c[0].approx_f64(), c[1].approx_f64()], cands);
            for &cj in cands.iter() {
                let j = cj as usize;
                if j == from || lift.offset(j).is_some() {
                    continue;
                }
                let d = torus_distance(&thetas[from], &thetas[j]).approx_f64();
                if d <= radius {
                    heap.push(Reverse(((d * 1e12) as u64, from as u32, cj)));
                }
            }
        };
        push_edges(0, lift, &mut heap, &mut cands);
        let mut worst_jump = 0.0f64;
        while let Some(Reverse((_, from, to))) = heap.pop() {
            let (i, j) = (from as usize, to as usize);
            if lift.offset(j).is_some() {
                continue;
            }
            let li = lift.lifted(i).unwrap();
            let k = (li - deltas[j]).round();
            let jump = (deltas[j] + k - li).abs().approx_f64();
            if jump >= 0.3 {
                // Shorter routes to j may still exist; only record the gap.
                worst_jump = worst_jump.max(jump);
                continue;
            }
            lift.assign(j, k.approx_f64() as i32);
            push_edges(j, lift, &mut heap, &mut cands);
        }
        if lift.is_complete() {
            return Ok(());
        }
        last_err = if worst_jump > 0.0 {
            LiftError::OracleGap { position: lift.assigned_count(), jump: worst_jump }
        } else {
            LiftError::Incomplete { assigned: lift.assigned_count(), total: n }
        };
        radius *= 1.6;
    }
    Err(last_err)
}

/// Near-return chain diagnostics on ground-truth torus coordinates.
#[derive(Debug, Clone)]
pub struct ChainReport {
    /// All return times `σ` with `d(θ_σ, θ_0) < δ₁`, ascending.
    pub sigmas: Vec<usize>,
    /// The witness subset actually used for the chain walk: the shortest
    /// prefix of `sigmas` whose gcd is 1.
    pub selected: Vec<usize>,
    /// gcd of the selected subset is 1.
    pub gcd_ok: bool,
    /// `σ_1 + σ_last < N` for the selected subset.
    pub budget_ok: bool,
    /// Every index in `[0, N)` is reachable by little steps.
    pub reachable: bool,
}

/// Find near returns of a torus orbit and check that little steps between
/// them chain every index in `[0, N)` to index 0.
///
/// The walk uses the two smallest selected return times `σ1 < σ2`: from a
/// reachable index, step down by `σ1` while the index stays non-negative,
/// otherwise step up by `σ2` while staying below `N`; the walk closes back
/// at 0. Extension passes then apply each selected `σ_j` as a little step in
/// both directions, saturatingly, until nothing changes.
pub fn near_return_chain<R: Real>(
    thetas: &[TorusPoint<R>],
    delta1: f64,
    n: usize,
) -> ChainReport {
    assert!(delta1 > 0.0);
    assert!(thetas.len() >= n, "need n torus points");
    let d1 = R::from_f64_lossy(delta1);
    let sigmas: Vec<usize> = (1..n)
        .filter(|&s| torus_distance(&thetas[s], &thetas[0]) < d1)
        .collect();
    if sigmas.is_empty() {
        return ChainReport {
            sigmas,
            selected: Vec::new(),
            gcd_ok: false,
            budget_ok: false,
            reachable: false,
        };
    }
    // Shortest prefix with gcd 1.
    let mut selected = Vec::new();
    let mut g = 0usize;
    for &s in &sigmas {
        selected.push(s);
        g = gcd(g, s);
        if g == 1 {
            break;
        }
    }
    let gcd_ok = g == 1;
    let budget_ok = selected.len() >= 2
        && selected.first().unwrap() + selected.last().unwrap() < n;
    let reachable = gcd_ok && selected.len() >= 2 && chain_reaches_all(&selected, n);
    ChainReport { sigmas, selected, gcd_ok, budget_ok, reachable }
}

fn gcd(a: usize, b: usize) -> usize {
    if a == 0 {
        b
    } else {
        gcd(b % a, a)
    }
}

fn chain_reaches_all(selected: &[usize], n: usize) -> bool {
    let s1 = selected[0];
    let s2 = selected[1];
    if s1 + s2 >= n {
        return false;
    }
    let mut reached = vec![false; n];
    // Closed walk: prefer the small downward step, otherwise jump up.
    reached[0] = true;
    let mut pos = 0usize;
    for _ in 0..(n * selected.len() + n) {
        if pos >= s1 {
            pos -= s1;
        } else {
            if pos + s2 >= n {
                break;
            }
            pos += s2;
        }
        reached[pos] = true;
        if pos == 0 {
            break;
        }
    }
    // Saturating extension passes: each return time is a little step in
    // both directions.
    loop {
        let mut changed = false;
        for &s in selected {
            for i in 0..n.saturating_sub(s) {
                if reached[i] && !reached[i + s] {
                    reached[i + s] = true;
                    changed = true;
                }
            }
            for i in (s..n).rev() {
                if reached[i] && !reached[i - s] {
                    reached[i - s] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    reached.iter().all(|&r| r)
}
