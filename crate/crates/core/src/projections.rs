//! Planar projections of torus orbits and angle extraction.
//!
//! The estimators in this crate never see torus coordinates; they see the
//! image of an orbit under some projection. This module supplies the
//! projection-side toolkit:
//!
//! * Fourier-series closed curves `γ(θ) = Σ_k γ̂_k e^{i 2π k θ}` as planar
//!   test maps;
//! * the circle-valued observation `φ = angle of (γ - P)` about a reference
//!   point `P`, measured in revolutions;
//! * winding numbers of closed curves about `P` (an unbiased rate needs
//!   `|W(P)| = 1`);
//! * scalar delay pairs `(s_{n-1}, s_n)`, which rebuild a planar map from a
//!   single coordinate;
//! * the 3-d torus embedding of a planar curve and the tilted radial
//!   projection used to read off a second, independent angle.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;
use crate::torus::{circle_delta, mod1};

#[derive(Debug, Error, PartialEq)]
pub enum ProjectionError {
    #[error("point coincides with the reference point (distance below 1e-12)")]
    DegeneratePoint,
    #[error("reference point lies on the sampled curve (min distance {min_dist:.3e})")]
    ReferenceOnCurve { min_dist: f64 },
    #[error("curve undersampled for winding estimation (residual {residual:.3e} rev)")]
    Undersampled { residual: f64 },
    #[error("series too short: need at least {need}, got {got}")]
    SeriesTooShort { need: usize, got: usize },
}

/// A point in the projection plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarPoint<R: Real> {
    pub x: R,
    pub y: R,
}

impl<R: Real> PlanarPoint<R> {
    pub fn new(x: R, y: R) -> Self {
        PlanarPoint { x, y }
    }

    #[inline]
    pub fn distance(&self, other: &PlanarPoint<R>) -> R {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Reference point for angle measurement, optionally validated against the
/// sampled curve it will be used with.
#[derive(Debug, Clone)]
pub struct ReferencePoint<R: Real> {
    pub point: PlanarPoint<R>,
    pub expected_winding: Option<i32>,
}

impl<R: Real> ReferencePoint<R> {
    pub fn new(x: R, y: R) -> Self {
        ReferencePoint { point: PlanarPoint::new(x, y), expected_winding: None }
    }

    pub fn with_expected_winding(mut self, w: i32) -> Self {
        self.expected_winding = Some(w);
        self
    }

    /// Reject reference points that sit on (or numerically on) the curve.
    pub fn validated_against(
        self,
        samples: &[PlanarPoint<R>],
    ) -> Result<Self, ProjectionError> {
        let mut min = R::infinity();
        for s in samples {
            min = min.min(self.point.distance(s));
        }
        if min <= R::from_f64_lossy(1e-9) {
            return Err(ProjectionError::ReferenceOnCurve { min_dist: min.approx_f64() });
        }
        Ok(self)
    }
}

/// Closed planar curve given by a finite Fourier series
/// `γ(θ) = Σ γ̂_k z^k`, `z = e^{i 2π θ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCurve<R: Real> {
    /// `(harmonic, coefficient)` pairs.
    coefficients: Vec<(i32, Complex<R>)>,
}

impl<R: Real> FourierCurve<R> {
    pub fn new(coefficients: Vec<(i32, Complex<R>)>) -> Self {
        assert!(!coefficients.is_empty(), "curve needs at least one coefficient");
        assert!(
            coefficients.iter().all(|(_, c)| c.re.is_finite() && c.im.is_finite()),
            "coefficients must be finite"
        );
        FourierCurve { coefficients }
    }

    pub fn coefficients(&self) -> &[(i32, Complex<R>)] {
        &self.coefficients
    }

    /// Evaluate at `θ` (revolutions).
    pub fn eval(&self, theta: R) -> PlanarPoint<R> {
        let two_pi = R::PI() + R::PI();
        let (s, c) = (two_pi * theta).sin_cos();
        let z = Complex::new(c, s);
        // |z| = 1 up to rounding; use the true inverse for negative powers so
        // extended precision is not capped by the norm defect.
        let zinv = z.conj() / Complex::new(z.norm_sqr(), R::zero());
        let mut sum = Complex::new(R::zero(), R::zero());
        for &(k, coeff) in &self.coefficients {
            let zk = match k.cmp(&0) {
                std::cmp::Ordering::Equal => Complex::new(R::one(), R::zero()),
                std::cmp::Ordering::Greater => complex_powu(z, k as u32),
                std::cmp::Ordering::Less => complex_powu(zinv, (-k) as u32),
            };
            sum = sum + coeff * zk;
        }
        PlanarPoint::new(sum.re, sum.im)
    }

    /// Orbit image: `γ(θ_n)` for a scalar angle sequence.
    pub fn eval_series(&self, thetas: &[R]) -> Vec<PlanarPoint<R>> {
        thetas.iter().map(|&t| self.eval(t)).collect()
    }
}

fn complex_powu<R: Real>(z: Complex<R>, mut e: u32) -> Complex<R> {
    let mut base = z;
    let mut acc = Complex::new(R::one(), R::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// Angle of `g` as seen from `p`, in revolutions in `[0, 1)`.
pub fn angle_from_reference<R: Real>(
    g: PlanarPoint<R>,
    p: &ReferencePoint<R>,
) -> Result<R, ProjectionError> {
    let dx = g.x - p.point.x;
    let dy = g.y - p.point.y;
    if dx.abs().max(dy.abs()) < R::from_f64_lossy(1e-12) {
        return Err(ProjectionError::DegeneratePoint);
    }
    let two_pi = R::PI() + R::PI();
    Ok(mod1(dy.atan2(dx) / two_pi))
}

/// Angle series for a whole planar orbit.
pub fn angle_series<R: Real>(
    points: &[PlanarPoint<R>],
    p: &ReferencePoint<R>,
) -> Result<Vec<R>, ProjectionError> {
    points.iter().map(|&g| angle_from_reference(g, p)).collect()
}

/// Winding number of a closed sampled curve about `p`.
///
/// `samples` must traverse the curve once in order, densely enough that
/// consecutive angular steps stay below half a revolution; the closing step
/// from the last sample back to the first is included. The signed angular
/// increments sum to an integer; a rounding residual of 0.01 rev or more is
/// treated as undersampling.
pub fn winding_number<R: Real>(
    samples: &[PlanarPoint<R>],
    p: &ReferencePoint<R>,
) -> Result<i32, ProjectionError> {
    if samples.len() < 3 {
        return Err(ProjectionError::SeriesTooShort { need: 3, got: samples.len() });
    }
    let angles = angle_series(samples, p)?;
    let mut total = R::zero();
    for i in 0..angles.len() {
        let next = angles[(i + 1) % angles.len()];
        total = total + circle_delta(angles[i], next);
    }
    let rounded = total.round();
    let residual = (total - rounded).abs();
    if residual >= R::from_f64_lossy(0.01) {
        return Err(ProjectionError::Undersampled { residual: residual.approx_f64() });
    }
    Ok(rounded.approx_f64() as i32)
}

/// Winding number of a Fourier curve about `p`, sampling the curve uniformly
/// and doubling the density until the estimate is stable.
pub fn winding_of_curve<R: Real>(
    curve: &FourierCurve<R>,
    p: &ReferencePoint<R>,
) -> Result<i32, ProjectionError> {
    let mut n = 1 << 12;
    let mut prev: Option<i32> = None;
    for _ in 0..6 {
        let samples: Vec<PlanarPoint<R>> = (0..n)
            .map(|i| curve.eval(R::from_count(i) / R::from_count(n)))
            .collect();
        match winding_number(&samples, p) {
            Ok(w) => {
                if prev == Some(w) {
                    return Ok(w);
                }
                prev = Some(w);
            }
            Err(ProjectionError::Undersampled { .. }) => prev = None,
            Err(e) => return Err(e),
        }
        n *= 2;
    }
    Err(ProjectionError::Undersampled { residual: f64::NAN })
}

/// Delay pairs `(s_{n-1}, s_n)` of a scalar series: a planar reconstruction
/// from a single observed coordinate.
pub fn delay_pair_series<R: Real>(series: &[R]) -> Result<Vec<PlanarPoint<R>>, ProjectionError> {
    if series.len() < 2 {
        return Err(ProjectionError::SeriesTooShort { need: 2, got: series.len() });
    }
    Ok(series.windows(2).map(|w| PlanarPoint::new(w[0], w[1])).collect())
}

/// Rotate a planar curve around the vertical axis to sweep a 2-torus in R^3:
///
/// ```text
/// f1 = (Re γ(θ) + 2) cos(2π y)
/// f2 = (Re γ(θ) + 2) sin(2π y)
/// f3 = Im γ(θ)
/// ```
///
/// The offset by 2 puts the tube around the f3-axis.
pub fn torus_map_3d<R: Real>(curve: &FourierCurve<R>, theta: R, y: R) -> [R; 3] {
    let g = curve.eval(theta);
    let two_pi = R::PI() + R::PI();
    let (s, c) = (two_pi * y).sin_cos();
    let radial = g.x + R::from_f64_lossy(2.0);
    [radial * c, radial * s, g.y]
}

/// Tilt by `alpha` in the f2-f3 plane, then project to `(r, f3)` where
/// `r = sqrt(h1^2 + h2^2)` of the tilted point. The second output coordinate
/// is the untilted `f3`. Without the tilt the image of a 2-torus degenerates
/// to a curve; a small tilt spreads it into an annulus.
pub fn tilted_radial_projection<R: Real>(f: [R; 3], alpha: R) -> PlanarPoint<R> {
    let (s, c) = alpha.sin_cos();
    let h1 = f[0];
    let h2 = c * f[1] - s * f[2];
    PlanarPoint::new((h1 * h1 + h2 * h2).sqrt(), f[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    /// Quartic test curve with a fish-like self-intersecting image.
    fn fish() -> FourierCurve<f64> {
        FourierCurve::new(vec![
            (-1, Complex64::new(1.4, -2.0)),
            (0, Complex64::new(4.1, 1.34)),
            (1, Complex64::new(-2.0, 2.412)),
            (2, Complex64::new(-2.5, -1.752)),
        ])
    }

    /// Six-petaled test curve `(3/4) z + z^6`.
    fn flower() -> FourierCurve<f64> {
        FourierCurve::new(vec![
            (1, Complex64::new(0.75, 0.0)),
            (6, Complex64::new(1.0, 0.0)),
        ])
    }

    #[test]
    fn eval_fourier_at_known_points() {
        // Sum of the coefficients at theta = 0.
        let g = fish().eval(0.0);
        assert!((g.x - 1.0).abs() < 1e-14 && g.y.abs() < 1e-14);

        let g = flower().eval(0.0);
        assert!((g.x - 1.75).abs() < 1e-14 && g.y.abs() < 1e-14);

        // z = -1: 0.75*(-1) + 1 = 0.25.
        let g = flower().eval(0.5);
        assert!((g.x - 0.25).abs() < 1e-13 && g.y.abs() < 1e-13);
    }

    #[test]
    fn angle_quadrants() {
        let origin = ReferencePoint::new(0.0f64, 0.0);
        assert_eq!(angle_from_reference(PlanarPoint::new(1.0, 0.0), &origin).unwrap(), 0.0);
        assert_eq!(angle_from_reference(PlanarPoint::new(0.0, 1.0), &origin).unwrap(), 0.25);
        assert!(
            (angle_from_reference(PlanarPoint::new(-1.0, -1.0), &origin).unwrap() - 0.625).abs()
                < 1e-15
        );
        assert!(matches!(
            angle_from_reference(PlanarPoint::new(0.0, 0.0), &origin),
            Err(ProjectionError::DegeneratePoint)
        ));
    }

    #[test]
    fn unit_circle_winds_once() {
        let samples: Vec<PlanarPoint<f64>> = (0..1000)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * (i as f64) / 1000.0;
                PlanarPoint::new(t.cos(), t.sin())
            })
            .collect();
        let w = winding_number(&samples, &ReferencePoint::new(0.0, 0.0)).unwrap();
        assert_eq!(w, 1);
        // Clockwise traversal flips the sign.
        let rev: Vec<_> = samples.iter().rev().copied().collect();
        assert_eq!(winding_number(&rev, &ReferencePoint::new(0.0, 0.0)).unwrap(), -1);
    }

    #[test]
    fn squared_circle_winds_twice_inside_zero_outside() {
        // Image of the unit circle under z^2, sampled in curve order.
        let samples: Vec<PlanarPoint<f64>> = (0..2000)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * (i as f64) / 2000.0;
                PlanarPoint::new((2.0 * t).cos(), (2.0 * t).sin())
            })
            .collect();
        assert_eq!(winding_number(&samples, &ReferencePoint::new(0.2, -0.1)).unwrap(), 2);
        assert_eq!(winding_number(&samples, &ReferencePoint::new(3.0, 0.5)).unwrap(), 0);
    }

    #[test]
    fn fish_reference_point_has_unit_winding() {
        let w = winding_of_curve(&fish(), &ReferencePoint::new(8.25, 4.4)).unwrap();
        assert_eq!(w.abs(), 1);
    }

    #[test]
    fn flower_reference_point_has_unit_winding() {
        let w = winding_of_curve(&flower(), &ReferencePoint::new(0.5, 1.5)).unwrap();
        assert_eq!(w.abs(), 1);
    }

    #[test]
    fn winding_stable_under_reference_perturbation() {
        // Any P in the same complement component gives the same winding.
        let curve = fish();
        let w0 = winding_of_curve(&curve, &ReferencePoint::new(8.25, 4.4)).unwrap();
        for i in 0..10 {
            let dx = 0.03 * ((i * 7 % 10) as f64 / 10.0 - 0.45);
            let dy = 0.03 * ((i * 3 % 10) as f64 / 10.0 - 0.45);
            let w = winding_of_curve(&curve, &ReferencePoint::new(8.25 + dx, 4.4 + dy)).unwrap();
            assert_eq!(w, w0);
        }
    }

    #[test]
    fn flower_realizes_winding_magnitudes_1_2_3_6() {
        // Scan probe points across the flower and collect |W| values.
        let curve = flower();
        let samples: Vec<PlanarPoint<f64>> =
            (0..4096).map(|i| curve.eval(i as f64 / 4096.0)).collect();
        let mut seen = std::collections::BTreeSet::new();
        let mut grid = Vec::new();
        for ix in 0..60 {
            for iy in 0..60 {
                grid.push(PlanarPoint::new(
                    -2.0 + 4.0 * (ix as f64 + 0.5) / 60.0,
                    -2.0 + 4.0 * (iy as f64 + 0.5) / 60.0,
                ));
            }
        }
        for p in grid {
            let min_dist =
                samples.iter().map(|s| s.distance(&p)).fold(f64::INFINITY, f64::min);
            if min_dist < 5e-2 {
                continue; // too close to the curve for a reliable estimate
            }
            let rp = ReferencePoint::new(p.x, p.y);
            if let Ok(w) = winding_number(&samples, &rp) {
                seen.insert(w.abs());
            }
        }
        for expect in [1, 2, 3, 6] {
            assert!(seen.contains(&expect), "missing |W| = {expect}; saw {seen:?}");
        }
    }

    #[test]
    fn lifted_angle_increments_sum_to_winding() {
        let curve = fish();
        let p = ReferencePoint::new(8.25, 4.4);
        let n = 20_000;
        let samples: Vec<PlanarPoint<f64>> =
            (0..n).map(|i| curve.eval(i as f64 / n as f64)).collect();
        let angles = angle_series(&samples, &p).unwrap();
        let mut total = 0.0;
        for i in 0..n {
            total += circle_delta(angles[i], angles[(i + 1) % n]);
        }
        let w = winding_number(&samples, &p).unwrap();
        assert!((total - w as f64).abs() < 1e-9);
    }

    #[test]
    fn delay_pairs() {
        let pairs = delay_pair_series(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(pairs, vec![PlanarPoint::new(1.0, 2.0), PlanarPoint::new(2.0, 3.0)]);
        assert!(delay_pair_series(&[1.0]).is_err());
    }

    #[test]
    fn constant_series_degenerates() {
        let pairs = delay_pair_series(&[0.5, 0.5, 0.5]).unwrap();
        assert!(pairs.iter().all(|p| *p == pairs[0]));
        // Any reference collapses to a single angle; winding fails.
        let p = ReferencePoint::new(0.5, 0.5);
        assert!(matches!(
            winding_number(&pairs, &p),
            Err(ProjectionError::SeriesTooShort { .. }) | Err(ProjectionError::DegeneratePoint)
        ));
    }

    #[test]
    fn torus_map_values() {
        let f = torus_map_3d(&flower(), 0.0, 0.0);
        assert!((f[0] - 3.75).abs() < 1e-14 && f[1].abs() < 1e-14 && f[2].abs() < 1e-14);

        let f = torus_map_3d(&fish(), 0.0, 0.0);
        assert!((f[0] - 3.0).abs() < 1e-13 && f[2].abs() < 1e-13);

        // cos(pi/2) = 0 kills f1 at y = 1/4.
        let f = torus_map_3d(&fish(), 0.37, 0.25);
        assert!(f[0].abs() < 1e-13);
    }

    #[test]
    fn torus_tube_clears_the_axis() {
        // min(Re gamma + 2) > 0 for both curves, so the swept torus never
        // touches the f3-axis.
        for curve in [fish(), flower()] {
            let min = (0..10_000)
                .map(|i| curve.eval(i as f64 / 10_000.0).x + 2.0)
                .fold(f64::INFINITY, f64::min);
            assert!(min > 0.0, "tube radius dipped to {min}");
        }
    }

    #[test]
    fn tilted_projection_values() {
        let p = tilted_radial_projection([3.0f64, 4.0, 0.0], 0.0);
        assert!((p.x - 5.0).abs() < 1e-14 && p.y.abs() < 1e-14);

        let p = tilted_radial_projection([0.0f64, 0.0, 1.0], 0.0);
        assert!(p.x.abs() < 1e-14 && (p.y - 1.0).abs() < 1e-14);

        let alpha = 0.05 * std::f64::consts::PI;
        let p = tilted_radial_projection([1.0, 1.0, 1.0], alpha);
        let expect = (1.0 + (alpha.cos() - alpha.sin()).powi(2)).sqrt();
        assert!((p.x - expect).abs() < 1e-14);
        assert!((p.y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reference_validation_rejects_points_on_curve() {
        let curve = flower();
        let samples: Vec<PlanarPoint<f64>> =
            (0..1000).map(|i| curve.eval(i as f64 / 1000.0)).collect();
        let on_curve = curve.eval(0.123);
        assert!(matches!(
            ReferencePoint::new(on_curve.x, on_curve.y).validated_against(&samples),
            Err(ProjectionError::ReferenceOnCurve { .. })
        ));
        assert!(ReferencePoint::new(0.5, 1.5).validated_against(&samples).is_ok());
    }
}
