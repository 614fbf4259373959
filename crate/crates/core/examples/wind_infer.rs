//! Empirical check of winding inference on the test curves.

use num_complex::Complex64;
use quasirate::pipeline::*;
use quasirate::projections::*;
use quasirate::torus::rigid_orbit_scalar;

const GOLDEN: f64 = 0.6180339887498949;

fn main() {
    let fish = FourierCurve::new(vec![
        (-1, Complex64::new(1.4, -2.0)),
        (0, Complex64::new(4.1, 1.34)),
        (1, Complex64::new(-2.0, 2.412)),
        (2, Complex64::new(-2.5, -1.752)),
    ]);
    let flower =
        FourierCurve::new(vec![(1, Complex64::new(0.75, 0.0)), (6, Complex64::new(1.0, 0.0))]);
    let n = 60_000;
    let thetas = rigid_orbit_scalar(GOLDEN, 0.0, n);
    for (name, curve, rx, ry, delta) in [
        ("fish@P1", &fish, 8.25, 4.4, None),
        ("flower@P1", &flower, 0.5, 1.5, None),
        ("flower@origin(W=6)", &flower, 0.0, 0.0, Some(0.05)),
        ("fish@inside-body(W=?)", &fish, 4.0, 1.0, Some(0.1)),
    ] {
        let pts = curve.eval_series(&thetas);
        let rp = ReferencePoint::new(rx, ry);
        let angles = match angle_series(&pts, &rp) {
            Ok(a) => a,
            Err(e) => {
                println!("{name}: angle error {e}");
                continue;
            }
        };
        let opts = EstimateOptions { delta, ..EstimateOptions::default() };
        match estimate_rate_from_angles(angles, &opts) {
            Ok(report) if report.complete() => {
                let w = infer_winding_from_planar(&pts, &rp, &report);
                println!(
                    "{name}: rate={:.12} inference={:?}",
                    report.rate.as_ref().unwrap().rate,
                    w
                );
            }
            Ok(report) => println!("{name}: incomplete ({:.2})", report.lift.connected_fraction()),
            Err(e) => println!("{name}: pipeline error {e}"),
        }
    }
}
