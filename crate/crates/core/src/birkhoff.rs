//! Plain and weighted Birkhoff averages.
//!
//! The time average `(1/N) Σ f(θ_n)` of a smooth observable along a
//! quasiperiodic orbit converges to the space average, but only at O(1/N).
//! Re-weighting the same samples with the C-infinity bump
//!
//! ```text
//! w[p](t) = exp(-1 / (t^p (1-t)^p))   for t in (0,1), else 0
//! ```
//!
//! (all derivatives vanish at t = 0 and t = 1) makes the convergence
//! super-polynomial for smooth observables. The weighted average of a series
//! `f_0 .. f_{N-1}` is `Σ ŵ_{n,N} f_n` with `ŵ_{n,N} = w(n/N) / Σ_j w(j/N)`.
//!
//! Weights depend on N, so checkpointed partial values recompute the weight
//! vector per checkpoint instead of updating incrementally. All reductions
//! are compensated and strictly left-to-right, making results bit-identical
//! between runs.

use thiserror::Error;

use crate::scalar::Real;
use crate::sum::KahanSum;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BirkhoffError {
    #[error("series must be non-empty")]
    EmptySeries,
    #[error("weighted average needs at least 2 samples (got {0})")]
    TooShort(usize),
    #[error("checkpoints must be sorted, distinct, >= 2, and <= series length")]
    BadCheckpoints,
}

/// Exponent of the bump weight; the useful range in practice is p = 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightParams {
    p: u32,
}

impl WeightParams {
    pub fn new(p: u32) -> Self {
        assert!(p >= 1, "weight exponent must be >= 1");
        WeightParams { p }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
}

impl Default for WeightParams {
    fn default() -> Self {
        WeightParams { p: 1 }
    }
}

/// Bump weight `w[p](t)`: zero outside `(0,1)`, maximal at `t = 1/2`.
#[inline]
pub fn weight<R: Real>(t: R, params: WeightParams) -> R {
    if t <= R::zero() || t >= R::one() {
        return R::zero();
    }
    let u = (t.powi(params.p as i32)) * ((R::one() - t).powi(params.p as i32));
    (-u.recip()).exp()
}

/// Weighted average with convergence checkpoints.
#[derive(Debug, Clone)]
pub struct AverageReport<R: Real> {
    /// Final weighted average over the full series.
    pub value: R,
    /// Number of samples used.
    pub n_used: usize,
    /// `(N, value)` at geometrically spaced prefix lengths, strictly
    /// increasing in N and ending at the full length.
    pub partial_values: Vec<(usize, R)>,
}

impl<R: Real> AverageReport<R> {
    /// Spread (max - min) of the checkpoint values with `N > n_used / 10`,
    /// the "last decade". A large spread flags a series whose weighted
    /// average has not settled, e.g. a non-quasiperiodic signal.
    pub fn last_decade_spread(&self) -> R {
        let cut = self.n_used / 10;
        let mut lo = self.value;
        let mut hi = self.value;
        for &(n, v) in &self.partial_values {
            if n > cut {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        hi - lo
    }
}

/// Arithmetic mean with deterministic compensated summation.
pub fn birkhoff_average<R: Real>(values: &[R]) -> Result<R, BirkhoffError> {
    if values.is_empty() {
        return Err(BirkhoffError::EmptySeries);
    }
    Ok(KahanSum::sum_slice(values) / R::from_count(values.len()))
}

/// Weighted average of the first `n` samples. Weights are evaluated at
/// `t = i/n` for `i = 0..n`, so the endpoints carry zero weight.
fn weighted_prefix<R: Real>(values: &[R], n: usize, params: WeightParams) -> R {
    let nr = R::from_count(n);
    let mut num = KahanSum::new();
    let mut den = KahanSum::new();
    for (i, &f) in values[..n].iter().enumerate() {
        let w = weight(R::from_count(i) / nr, params);
        num.add(w * f);
        den.add(w);
    }
    num.value() / den.value()
}

/// Weighted Birkhoff average of the full series, with checkpoints at
/// `N/2^k` (k descending) for the convergence diagnostic.
pub fn weighted_birkhoff_average<R: Real>(
    values: &[R],
    params: WeightParams,
) -> Result<AverageReport<R>, BirkhoffError> {
    let n = values.len();
    if n < 2 {
        return Err(BirkhoffError::TooShort(n));
    }
    let mut checkpoints = Vec::new();
    let mut m = n;
    for _ in 0..10 {
        if m < 2 {
            break;
        }
        checkpoints.push(m);
        m /= 2;
    }
    checkpoints.reverse();
    let partial_values: Vec<(usize, R)> = checkpoints
        .iter()
        .map(|&c| (c, weighted_prefix(values, c, params)))
        .collect();
    let value = partial_values.last().expect("at least one checkpoint").1;
    Ok(AverageReport { value, n_used: n, partial_values })
}

/// Weighted averages at caller-chosen prefix lengths.
pub fn convergence_curve<R: Real>(
    values: &[R],
    params: WeightParams,
    checkpoints: &[usize],
) -> Result<Vec<(usize, R)>, BirkhoffError> {
    if values.is_empty() {
        return Err(BirkhoffError::EmptySeries);
    }
    let sorted = checkpoints.windows(2).all(|w| w[0] < w[1]);
    let in_range = checkpoints.iter().all(|&c| c >= 2 && c <= values.len());
    if !sorted || !in_range || checkpoints.is_empty() {
        return Err(BirkhoffError::BadCheckpoints);
    }
    Ok(checkpoints
        .iter()
        .map(|&c| (c, weighted_prefix(values, c, params)))
        .collect())
}
