//! Initial-condition search for quasiperiodic orbits with a prescribed
//! section rotation number.
//!
//! Starting states live on the surface-of-section `q2 = 0`, `dq2/dt > 0`:
//! the particle sits a distance `r0` to the left of the planet with purely
//! tangential (upward) velocity `v` in the rotating frame,
//!
//! ```text
//! q = (-μ - r0, 0),   q̇ = (0, v)   =>   p = (0, v + q1).
//! ```
//!
//! Along such a one-parameter family the ratio of the two rotation rates
//! varies continuously across nested invariant tori (with plateaus and gaps
//! at resonances). The search scans `v`, keeps evaluations whose weighted
//! averages settle (a quasiperiodicity diagnostic), brackets the target
//! ratio, and bisects. Everything is deterministic given the settings; the
//! seed only jitters the coarse scan offsets.

use crate::birkhoff::WeightParams;
use crate::scalar::Real;

use super::{cr3bp_rotation_rates, AngleCenters, Cr3bpParams, Cr3bpRates, Cr3bpState};

/// Starting state on the section, left of the planet, tangential speed `v`.
pub fn section_state<R: Real>(mu: R, r0: R, v: R) -> Cr3bpState<R> {
    let q1 = -mu - r0;
    Cr3bpState::new(q1, R::zero(), R::zero(), v + q1, R::zero())
}

#[derive(Debug, Clone)]
pub struct SearchSettings {
    /// Section radius (distance from the planet at start).
    pub r0: f64,
    /// Scanned tangential-speed interval.
    pub v_range: (f64, f64),
    /// Coarse scan resolution.
    pub coarse_steps: usize,
    /// Integration horizon per evaluation (time units).
    pub t_pilot: f64,
    /// Integrator step for evaluations.
    pub step_h: f64,
    /// Observation spacing for evaluations.
    pub output_dt: f64,
    /// Target section rotation number in `[0, 1)`.
    pub target: f64,
    /// Acceptable |ratio - target|.
    pub tol: f64,
    pub max_bisections: usize,
    /// Jitters the coarse grid so reruns can explore nearby slices.
    pub seed: u64,
    /// Quasiperiodicity gate for pilot-length evaluations: maximum
    /// last-decade checkpoint spread of either rate, rev per time unit.
    /// Looser than the production flag because short horizons are still
    /// settling.
    pub pilot_spread_limit: f64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings {
            r0: 0.27,
            v_range: (1.25, 1.55),
            coarse_steps: 48,
            t_pilot: 120.0,
            step_h: 2.5e-4,
            output_dt: 1e-3,
            target: 0.0639617287574531,
            tol: 2e-7,
            max_bisections: 60,
            seed: 1,
            pilot_spread_limit: 4e-3,
        }
    }
}

/// One accepted evaluation of the scan.
#[derive(Debug, Clone)]
pub struct SearchEvaluation {
    pub v: f64,
    pub state: Cr3bpState<f64>,
    pub rates: Cr3bpRates<f64>,
    /// `mod1(-rho_phi / rho_theta)`, the quantity matched to the target.
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: SearchEvaluation,
    pub evaluations: usize,
    pub converged: bool,
}

fn evaluate(
    mu: f64,
    settings: &SearchSettings,
    centers: AngleCenters<f64>,
    v: f64,
) -> Option<SearchEvaluation> {
    let params = Cr3bpParams::new(mu, settings.step_h, settings.output_dt).ok()?;
    let state = section_state(mu, settings.r0, v);
    let rates = cr3bp_rotation_rates(
        &state,
        &params,
        settings.t_pilot,
        WeightParams::new(2),
        centers,
        settings.target,
    )
    .ok()?;
    let dt = settings.output_dt;
    let spread = (rates.theta_report.last_decade_spread() / dt)
        .abs()
        .max((rates.phi_report.last_decade_spread() / dt).abs());
    if spread > settings.pilot_spread_limit {
        return None;
    }
    let ratio = crate::torus::mod1(-rates.rho_phi / rates.rho_theta);
    Some(SearchEvaluation { v, state, rates, ratio })
}

/// Scan and bisect for an orbit whose rate ratio matches the target.
///
/// Returns the best evaluation found (converged or not), or `None` when no
/// evaluation in the scan range was quasiperiodic.
pub fn find_matching_orbit(
    mu: f64,
    settings: &SearchSettings,
    centers: AngleCenters<f64>,
) -> Option<SearchOutcome> {
    let mut evaluations = 0usize;
    let mut eval = |v: f64| {
        evaluations += 1;
        evaluate(mu, settings, centers, v)
    };

    // Coarse scan with a seeded sub-cell jitter.
    let (lo, hi) = settings.v_range;
    let steps = settings.coarse_steps.max(2);
    let dv = (hi - lo) / steps as f64;
    let mut rng = settings.seed | 1;
    let mut coarse: Vec<SearchEvaluation> = Vec::new();
    for i in 0..=steps {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        let jitter = if i == 0 || i == steps {
            0.0
        } else {
            ((rng >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 0.2
        };
        let v = lo + (i as f64 + jitter) * dv;
        if let Some(e) = eval(v) {
            coarse.push(e);
        }
    }
    if coarse.is_empty() {
        return None;
    }

    // Bracket the target between consecutive reliable evaluations.
    let diff = |e: &SearchEvaluation| e.ratio - settings.target;
    let mut best = coarse
        .iter()
        .min_by(|a, b| diff(a).abs().partial_cmp(&diff(b).abs()).unwrap())
        .cloned()
        .unwrap();
    let bracket = coarse.windows(2).find(|w| diff(&w[0]) * diff(&w[1]) <= 0.0).map(|w| (w[0].clone(), w[1].clone()));

    let (mut a, mut b) = match bracket {
        Some(pair) => pair,
        None => {
            let converged = diff(&best).abs() <= settings.tol;
            return Some(SearchOutcome { best, evaluations, converged });
        }
    };

    for _ in 0..settings.max_bisections {
        if diff(&best).abs() <= settings.tol {
            break;
        }
        let vm = 0.5 * (a.v + b.v);
        if (b.v - a.v).abs() < 1e-15 {
            break;
        }
        // Nudge past the midpoint when it lands on a non-quasiperiodic
        // sliver (resonance or chaos).
        let mut mid = None;
        for k in 0..5 {
            let offset = (b.v - a.v) * 1e-3 * k as f64;
            if let Some(e) = eval(vm + offset) {
                mid = Some(e);
                break;
            }
        }
        let Some(m) = mid else { break };
        if diff(&m).abs() < diff(&best).abs() {
            best = m.clone();
        }
        if diff(&a) * diff(&m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    let converged = diff(&best).abs() <= settings.tol;
    Some(SearchOutcome { best, evaluations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::PlanarPoint;

    #[test]
    fn section_state_is_on_the_upward_section() {
        let s = section_state(0.1f64, 0.27, 1.4);
        assert_eq!(s.q2, 0.0);
        assert!((s.q1 + 0.37).abs() < 1e-15);
        // dq2/dt = p2 - q1 = v > 0.
        assert!((s.p2 - s.q1 - 1.4).abs() < 1e-15);
        // dq1/dt = p1 + q2 = 0 (tangential start).
        assert_eq!(s.p1 + s.q2, 0.0);
    }

    #[test]
    fn evaluate_accepts_a_quasiperiodic_start() {
        let centers = AngleCenters {
            q_plane: PlanarPoint::new(-0.1, 0.0),
            r_rprime: PlanarPoint::new(0.15, 0.0),
        };
        let settings = SearchSettings { t_pilot: 120.0, ..SearchSettings::default() };
        let e = evaluate(0.1, &settings, centers, 1.4);
        assert!(e.is_some(), "v = 1.4 should be a bounded quasiperiodic orbit");
        let e = e.unwrap();
        assert!(e.rates.rho_theta < -1.0 && e.rates.rho_theta > -4.0);
        assert!(e.ratio > 0.0 && e.ratio < 0.5);
    }
}
