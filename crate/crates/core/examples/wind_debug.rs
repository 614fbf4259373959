//! Instrumented view of the winding-inference internals.

use num_complex::Complex64;
use quasirate::pipeline::*;
use quasirate::projections::*;
use quasirate::torus::{mod1, rigid_orbit_scalar};

const GOLDEN: f64 = 0.6180339887498949;

fn main() {
    let flower =
        FourierCurve::new(vec![(1, Complex64::new(0.75, 0.0)), (6, Complex64::new(1.0, 0.0))]);
    let n = 60_000;
    let thetas = rigid_orbit_scalar(GOLDEN, 0.0, n);
    let pts = flower.eval_series(&thetas);
    let rp = ReferencePoint::new(0.5, 1.5);
    let angles = angle_series(&pts, &rp).unwrap();
    let report = estimate_rate_from_angles(angles, &EstimateOptions::default()).unwrap();
    let cloud = &report.cloud;
    let m = cloud.len();
    let q_max = (m / 2).min(40_000);
    let mut dist = vec![0.0f64; q_max];
    for q in 1..q_max {
        let top = m - 1 - q;
        let anchors = [0usize, top / 2, top];
        let mut acc = 0.0;
        for &a in &anchors {
            acc += cloud.theta_distance(a, a + q);
        }
        dist[q] = acc / 3.0;
    }
    let mut sorted = dist[1..].to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("median d = {:.4}, 5% = {:.4}", sorted[sorted.len()/2], sorted[sorted.len()/20]);
    let mut records = Vec::new();
    let mut best = f64::INFINITY;
    for (q, &d) in dist.iter().enumerate().skip(1) {
        if d < best { best = d; records.push((q, d)); }
    }
    println!("records: {:?}", &records[records.len().saturating_sub(8)..]);
    // Fibonacci check
    for q in [34usize, 55, 89, 144, 233, 377, 610, 987, 1597, 2584, 4181, 6765, 10946, 17711, 28657] {
        if q < q_max {
            println!("q={q}: theta residue {:.5}, dist {:.4}", {
                let r = mod1(q as f64 * GOLDEN); r.min(1.0 - r)
            }, dist[q]);
        }
    }
}
