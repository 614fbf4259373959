//! Shared fixtures: the two self-intersecting test curves and their
//! standard reference points.

use num_complex::Complex64;
use quasirate::projections::{angle_series, FourierCurve, PlanarPoint, ReferencePoint};
use quasirate::torus::rigid_orbit_scalar;

pub const GOLDEN: f64 = 0.618033988749894848;
pub const YRATE: f64 = 0.8660254037844386; // sqrt(3)/2

/// Quartic curve with a fish-shaped, self-intersecting image; the companion
/// reference point (8.25, 4.4) sees it with winding 1.
pub fn fish() -> FourierCurve<f64> {
    FourierCurve::new(vec![
        (-1, Complex64::new(1.4, -2.0)),
        (0, Complex64::new(4.1, 1.34)),
        (1, Complex64::new(-2.0, 2.412)),
        (2, Complex64::new(-2.5, -1.752)),
    ])
}

pub fn fish_reference() -> ReferencePoint<f64> {
    ReferencePoint::new(8.25, 4.4)
}

/// Six-petaled curve `(3/4) z + z^6`; reference point (0.5, 1.5) has
/// winding 1.
pub fn flower() -> FourierCurve<f64> {
    FourierCurve::new(vec![(1, Complex64::new(0.75, 0.0)), (6, Complex64::new(1.0, 0.0))])
}

pub fn flower_reference() -> ReferencePoint<f64> {
    ReferencePoint::new(0.5, 1.5)
}

/// Observed angle series of a curve driven by the golden rotation.
pub fn observed_angles(
    curve: &FourierCurve<f64>,
    reference: &ReferencePoint<f64>,
    n: usize,
) -> Vec<f64> {
    let thetas = rigid_orbit_scalar(GOLDEN, 0.0, n);
    let pts: Vec<PlanarPoint<f64>> = curve.eval_series(&thetas);
    angle_series(&pts, reference).expect("reference point off the curve")
}

/// Fold a rate into its orientation-free representative in `[0, 1/2]`.
pub fn canonical(rate: f64) -> f64 {
    rate.min(quasirate::torus::mod1(1.0 - rate))
}
