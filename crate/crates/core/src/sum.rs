//! Compensated summation primitives.
//!
//! Averaging tolerances in this crate sit near the double-precision limit, so
//! every reduction goes through Kahan-Neumaier compensation with a fixed
//! left-to-right order. Results are bit-reproducible across runs.

use crate::scalar::Real;

/// Kahan-Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<R: Real> {
    sum: R,
    comp: R,
}

impl<R: Real> Default for KahanSum<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> KahanSum<R> {
    #[inline]
    pub fn new() -> Self {
        KahanSum { sum: R::zero(), comp: R::zero() }
    }

    #[inline]
    pub fn add(&mut self, value: R) {
        let t = self.sum + value;
        // Neumaier branch: compensate whichever operand lost bits.
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> R {
        self.sum + self.comp
    }

    /// Compensated sum of a slice, left to right.
    pub fn sum_slice(values: &[R]) -> R {
        let mut acc = Self::new();
        for &v in values {
            acc.add(v);
        }
        acc.value()
    }
}

/// Compensated mod-1 accumulator: repeatedly adds a fixed increment in `[0,1)`
/// and keeps the running fractional part to within a few units in the last
/// place, independent of the step count.
///
/// The state is an unevaluated double-word sum; each step performs an
/// error-free `two_sum` with the increment and an exact wrap by 1, so no
/// rounding error proportional to the step count can build up.
#[derive(Debug, Clone, Copy)]
pub struct Mod1Accumulator<R: Real> {
    hi: R,
    lo: R,
}

impl<R: Real> Mod1Accumulator<R> {
    /// Start at `x0`, which must already lie in `[0, 1)`.
    #[inline]
    pub fn new(x0: R) -> Self {
        Mod1Accumulator { hi: x0, lo: R::zero() }
    }

    /// Advance by `step` (in `[0,1)`) and return the new fractional part.
    #[inline]
    pub fn advance(&mut self, step: R) -> R {
        let (s, e) = two_sum(self.hi, step);
        let mut hi = s;
        let lo = self.lo + e;
        if hi >= R::one() {
            hi = hi - R::one(); // exact by Sterbenz
        }
        // Renormalize.
        let (h, l) = quick_two_sum(hi, lo);
        self.hi = h;
        self.lo = l;
        self.value()
    }

    /// Current fractional part, clamped into `[0, 1)`.
    #[inline]
    pub fn value(&self) -> R {
        let v = self.hi + self.lo;
        if v >= R::one() {
            v - R::one()
        } else if v < R::zero() {
            v + R::one()
        } else {
            v
        }
    }
}

#[inline]
pub(crate) fn two_sum<R: Real>(a: R, b: R) -> (R, R) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
pub(crate) fn quick_two_sum<R: Real>(a: R, b: R) -> (R, R) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive_on_adversarial_input() {
        // 1 + 1e-16 added 1e6 times: naive drops every small term.
        let mut naive = 1.0f64;
        let mut kahan: KahanSum<f64> = KahanSum::new();
        kahan.add(1.0);
        for _ in 0..1_000_000 {
            naive += 1e-16;
            kahan.add(1e-16);
        }
        let exact = 1.0 + 1e-10;
        assert!((kahan.value() - exact).abs() < 1e-22);
        assert!((naive - exact).abs() > 1e-11);
    }

    #[test]
    fn mod1_accumulator_stays_exact_over_many_steps() {
        // Step by exactly 0.375: after 8 steps we are back at 0.
        let mut acc = Mod1Accumulator::new(0.0f64);
        let mut last = 0.0;
        for _ in 0..8000 {
            last = acc.advance(0.375);
        }
        assert_eq!(last, 0.0);
    }
}
