//! Planar circular restricted three-body problem in rotating coordinates.
//!
//! Two massive bodies (planet, mass `1-μ`, fixed at `(-μ, 0)`; moon, mass
//! `μ`, fixed at `(1-μ, 0)`) circle their barycenter; a test particle moves
//! in their field. In the corotating frame the dynamics are Hamiltonian:
//!
//! ```text
//! H = (p1² + p2²)/2 + p1 q2 - p2 q1 - (1-μ)/d_planet - μ/d_moon
//! d_moon²   = (q1 - 1 + μ)² + q2²
//! d_planet² = (q1 + μ)² + q2²
//! ```
//!
//! with `p1 = q̇1 - q2`, `p2 = q̇2 + q1`. Trajectories are integrated with a
//! fixed-step explicit 8th-order Runge-Kutta scheme (Cooper-Verner, 11
//! stages; the tableau is algebraic in `√21`, so it is generated at full
//! precision for any scalar type). Quasiperiodic orbits of this system lie
//! on 2-tori; the two rotation rates are read off by unwrapping continuous
//! angles in two projections:
//!
//! * the position angle about a center near the planet;
//! * the angle in the `(r, dr/dt)` plane, which tracks the radial
//!   oscillation between perigee and apogee.
//!
//! Angles are measured in revolutions; rates are revolutions per time unit
//! and are negative for clockwise motion. The rotating-frame position rate
//! converts to the fixed-star frame by adding `1/(2π)`.

use thiserror::Error;

use crate::birkhoff::{weighted_birkhoff_average, AverageReport, BirkhoffError, WeightParams};
use crate::projections::PlanarPoint;
use crate::scalar::Real;
use crate::torus::mod1;

pub mod search;

/// Identifier of the Runge-Kutta tableau, recorded in run metadata: two
/// same-order tableaus produce bit-different trajectories.
pub const TABLEAU_ID: &str = "cooper-verner-rk8-11";

/// Minimal admissible distance to either primary.
const COLLISION_RADIUS: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum Cr3bpError {
    #[error("collision at t = {t}: distance {dist:.3e} below the guard radius")]
    Collision { t: f64, dist: f64 },
    #[error("mass ratio must satisfy 0 < mu < 1 (got {0})")]
    BadMassRatio(f64),
    #[error("output spacing {output_dt} is not an integer multiple of step {step_h}")]
    BadOutputSpacing { output_dt: f64, step_h: f64 },
    #[error("angle step of {step:.3} rev at sample {index} exceeds the unwrap limit")]
    UndersampledAngle { index: usize, step: f64 },
    #[error("trajectory too short for rate estimation")]
    TooShort,
    #[error(transparent)]
    Average(#[from] BirkhoffError),
}

/// Mass ratio and step configuration.
#[derive(Debug, Clone, Copy)]
pub struct Cr3bpParams<R: Real> {
    pub mu: R,
    pub step_h: R,
    /// Internal steps per emitted state.
    pub substeps: usize,
}

impl<R: Real> Cr3bpParams<R> {
    /// `output_dt` must be an integer multiple of `step_h`.
    pub fn new(mu: R, step_h: R, output_dt: R) -> Result<Self, Cr3bpError> {
        let mu_f = mu.approx_f64();
        if !(mu_f > 0.0 && mu_f < 1.0) {
            return Err(Cr3bpError::BadMassRatio(mu_f));
        }
        let ratio = (output_dt / step_h).approx_f64();
        let substeps = ratio.round();
        if substeps < 1.0 || (ratio - substeps).abs() > 1e-9 * substeps.max(1.0) {
            return Err(Cr3bpError::BadOutputSpacing {
                output_dt: output_dt.approx_f64(),
                step_h: step_h.approx_f64(),
            });
        }
        Ok(Cr3bpParams { mu, step_h, substeps: substeps as usize })
    }

    pub fn output_dt(&self) -> R {
        self.step_h * R::from_count(self.substeps)
    }
}

/// Phase-space state in the rotating frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cr3bpState<R: Real> {
    pub q1: R,
    pub q2: R,
    pub p1: R,
    pub p2: R,
    pub t: R,
}

impl<R: Real> Cr3bpState<R> {
    pub fn new(q1: R, q2: R, p1: R, p2: R, t: R) -> Self {
        Cr3bpState { q1, q2, p1, p2, t }
    }

    #[inline]
    fn coords(&self) -> [R; 4] {
        [self.q1, self.q2, self.p1, self.p2]
    }

    #[inline]
    fn with_coords(&self, y: [R; 4], t: R) -> Self {
        Cr3bpState { q1: y[0], q2: y[1], p1: y[2], p2: y[3], t }
    }

    /// Distances to the moon and the planet.
    #[inline]
    pub fn primary_distances(&self, mu: R) -> (R, R) {
        let dm1 = self.q1 - R::one() + mu;
        let dp1 = self.q1 + mu;
        let q2s = self.q2 * self.q2;
        ((dm1 * dm1 + q2s).sqrt(), (dp1 * dp1 + q2s).sqrt())
    }
}

#[inline]
fn collision_check<R: Real>(y: &[R; 4], mu: R, t: R) -> Result<(R, R), Cr3bpError> {
    let dm1 = y[0] - R::one() + mu;
    let dp1 = y[0] + mu;
    let q2s = y[1] * y[1];
    let d_moon = (dm1 * dm1 + q2s).sqrt();
    let d_planet = (dp1 * dp1 + q2s).sqrt();
    let min = d_moon.min(d_planet).approx_f64();
    if min < COLLISION_RADIUS {
        return Err(Cr3bpError::Collision { t: t.approx_f64(), dist: min });
    }
    Ok((d_moon, d_planet))
}

/// Rotating-frame Hamiltonian (conserved along trajectories).
pub fn hamiltonian<R: Real>(s: &Cr3bpState<R>, params: &Cr3bpParams<R>) -> Result<R, Cr3bpError> {
    let y = s.coords();
    let (d_moon, d_planet) = collision_check(&y, params.mu, s.t)?;
    let half = R::from_f64_lossy(0.5);
    Ok(half * (s.p1 * s.p1 + s.p2 * s.p2) + s.p1 * s.q2 - s.p2 * s.q1
        - (R::one() - params.mu) / d_planet
        - params.mu / d_moon)
}

#[inline]
fn field<R: Real>(y: &[R; 4], mu: R, t: R) -> Result<[R; 4], Cr3bpError> {
    let (d_moon, d_planet) = collision_check(y, mu, t)?;
    let dm3 = d_moon * d_moon * d_moon;
    let dp3 = d_planet * d_planet * d_planet;
    let one_mu = R::one() - mu;
    Ok([
        y[2] + y[1],
        y[3] - y[0],
        y[3] - mu * (y[0] - R::one() + mu) / dm3 - one_mu * (y[0] + mu) / dp3,
        -y[2] - mu * y[1] / dm3 - one_mu * y[1] / dp3,
    ])
}

/// Equations of motion `(q̇, ṗ) = (∂H/∂p, -∂H/∂q)`.
pub fn vector_field<R: Real>(
    s: &Cr3bpState<R>,
    params: &Cr3bpParams<R>,
) -> Result<[R; 4], Cr3bpError> {
    field(&s.coords(), params.mu, s.t)
}

/// Cooper-Verner 11-stage tableau; entries are rationals in `√21`.
struct Rk8Tableau<R: Real> {
    a: [[R; 10]; 11],
    b: [R; 11],
    c: [R; 11],
}

fn tableau<R: Real>() -> Rk8Tableau<R> {
    let s = R::from_f64_lossy(21.0).sqrt();
    let f = |num: f64, snum: f64, den: f64| {
        (R::from_f64_lossy(num) + R::from_f64_lossy(snum) * s) / R::from_f64_lossy(den)
    };
    let z = R::zero();
    let mut a = [[z; 10]; 11];
    a[1][0] = f(1.0, 0.0, 2.0);
    a[2][0] = f(1.0, 0.0, 4.0);
    a[2][1] = f(1.0, 0.0, 4.0);
    a[3][0] = f(1.0, 0.0, 7.0);
    a[3][1] = f(-7.0, -3.0, 98.0);
    a[3][2] = f(21.0, 5.0, 49.0);
    a[4][0] = f(11.0, 1.0, 84.0);
    a[4][2] = f(18.0, 4.0, 63.0);
    a[4][3] = f(21.0, -1.0, 252.0);
    a[5][0] = f(5.0, 1.0, 48.0);
    a[5][2] = f(9.0, 1.0, 36.0);
    a[5][3] = f(-231.0, 14.0, 360.0);
    a[5][4] = f(63.0, -7.0, 80.0);
    a[6][0] = f(10.0, -1.0, 42.0);
    a[6][2] = f(-432.0, 92.0, 315.0);
    a[6][3] = f(633.0, -145.0, 90.0);
    a[6][4] = f(-504.0, 115.0, 70.0);
    a[6][5] = f(63.0, -13.0, 35.0);
    a[7][0] = f(1.0, 0.0, 14.0);
    a[7][4] = f(14.0, -3.0, 126.0);
    a[7][5] = f(13.0, -3.0, 63.0);
    a[7][6] = f(1.0, 0.0, 9.0);
    a[8][0] = f(1.0, 0.0, 32.0);
    a[8][4] = f(91.0, -21.0, 576.0);
    a[8][5] = f(11.0, 0.0, 72.0);
    a[8][6] = f(-385.0, -75.0, 1152.0);
    a[8][7] = f(63.0, 13.0, 128.0);
    a[9][0] = f(1.0, 0.0, 14.0);
    a[9][4] = f(1.0, 0.0, 9.0);
    a[9][5] = f(-733.0, -147.0, 2205.0);
    a[9][6] = f(515.0, 111.0, 504.0);
    a[9][7] = f(-51.0, -11.0, 56.0);
    a[9][8] = f(132.0, 28.0, 245.0);
    a[10][4] = f(-42.0, 7.0, 18.0);
    a[10][5] = f(-18.0, 28.0, 45.0);
    a[10][6] = f(-273.0, -53.0, 72.0);
    a[10][7] = f(301.0, 53.0, 72.0);
    a[10][8] = f(28.0, -28.0, 45.0);
    a[10][9] = f(49.0, -7.0, 18.0);
    let b = [
        f(1.0, 0.0, 20.0),
        z,
        z,
        z,
        z,
        z,
        z,
        f(49.0, 0.0, 180.0),
        f(16.0, 0.0, 45.0),
        f(49.0, 0.0, 180.0),
        f(1.0, 0.0, 20.0),
    ];
    let c = [
        z,
        f(1.0, 0.0, 2.0),
        f(1.0, 0.0, 2.0),
        f(7.0, 1.0, 14.0),
        f(7.0, 1.0, 14.0),
        f(1.0, 0.0, 2.0),
        f(7.0, -1.0, 14.0),
        f(7.0, -1.0, 14.0),
        f(1.0, 0.0, 2.0),
        f(7.0, 1.0, 14.0),
        f(1.0, 0.0, 1.0),
    ];
    Rk8Tableau { a, b, c }
}

/// One explicit RK8 step of size `h` from `y` at time `t`.
fn rk8_step_raw<R: Real>(
    tab: &Rk8Tableau<R>,
    y: &[R; 4],
    t: R,
    h: R,
    mu: R,
) -> Result<[R; 4], Cr3bpError> {
    let mut k = [[R::zero(); 4]; 11];
    k[0] = field(y, mu, t)?;
    for i in 1..11 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(i) {
            let aij = tab.a[i][j];
            if aij != R::zero() {
                for d in 0..4 {
                    yi[d] = yi[d] + h * aij * kj[d];
                }
            }
        }
        k[i] = field(&yi, mu, t + tab.c[i] * h)?;
    }
    let mut out = *y;
    for (i, ki) in k.iter().enumerate() {
        let bi = tab.b[i];
        if bi != R::zero() {
            for d in 0..4 {
                out[d] = out[d] + h * bi * ki[d];
            }
        }
    }
    Ok(out)
}

/// Single RK8 step; exposed for step-size and reversibility studies.
pub fn rk8_step<R: Real>(
    s: &Cr3bpState<R>,
    h: R,
    params: &Cr3bpParams<R>,
) -> Result<Cr3bpState<R>, Cr3bpError> {
    let tab = tableau::<R>();
    let y = rk8_step_raw(&tab, &s.coords(), s.t, h, params.mu)?;
    Ok(s.with_coords(y, s.t + h))
}

/// Integrate from `s0` to `t_end`, emitting states every `substeps` internal
/// steps (the initial state included). Time stamps are reconstructed as
/// `t0 + n*h` rather than accumulated.
pub fn integrate_rk8<R: Real>(
    s0: &Cr3bpState<R>,
    params: &Cr3bpParams<R>,
    t_end: R,
) -> Result<Vec<Cr3bpState<R>>, Cr3bpError> {
    let tab = tableau::<R>();
    let h = params.step_h;
    let total_time = t_end - s0.t;
    let n_steps = (total_time / h).approx_f64().round() as u64;
    let n_out = n_steps / params.substeps as u64;
    let mut out = Vec::with_capacity(n_out as usize + 1);
    out.push(*s0);
    let mut y = s0.coords();
    let mut step: u64 = 0;
    while step < n_steps {
        let t = s0.t + R::from_f64_lossy(step as f64) * h;
        y = rk8_step_raw(&tab, &y, t, h, params.mu)?;
        step += 1;
        if step % params.substeps as u64 == 0 {
            let t_now = s0.t + R::from_f64_lossy(step as f64) * h;
            out.push(s0.with_coords(y, t_now));
        }
    }
    Ok(out)
}

/// Which plane the continuous angle is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleCoordinate {
    /// Position angle of `(q1, q2)` about a center.
    QPlane,
    /// Angle of `(r, dr/dt)` about a center, where `r` is the distance to
    /// the planet.
    RRPrime,
}

/// Project a state into the chosen angle plane.
pub fn angle_plane_point<R: Real>(
    s: &Cr3bpState<R>,
    params: &Cr3bpParams<R>,
    coord: AngleCoordinate,
) -> PlanarPoint<R> {
    match coord {
        AngleCoordinate::QPlane => PlanarPoint::new(s.q1, s.q2),
        AngleCoordinate::RRPrime => {
            let rx = s.q1 + params.mu;
            let r = (rx * rx + s.q2 * s.q2).sqrt();
            let dq1 = s.p1 + s.q2;
            let dq2 = s.p2 - s.q1;
            let rprime = (rx * dq1 + s.q2 * dq2) / r;
            PlanarPoint::new(r, rprime)
        }
    }
}

/// Continuous-time unwrapped angle series (revolutions, real-valued) of a
/// trajectory about `center` in the chosen plane. Each increment must stay
/// below 0.45 rev; larger jumps mean the output spacing cannot resolve the
/// winding and unwrapping would be ambiguous.
pub fn continuous_angle_series<R: Real>(
    states: &[Cr3bpState<R>],
    params: &Cr3bpParams<R>,
    center: PlanarPoint<R>,
    coord: AngleCoordinate,
) -> Result<Vec<R>, Cr3bpError> {
    let two_pi = R::PI() + R::PI();
    let limit = R::from_f64_lossy(0.45);
    let mut out = Vec::with_capacity(states.len());
    let mut prev_wrapped = R::zero();
    let mut lifted = R::zero();
    for (i, s) in states.iter().enumerate() {
        let p = angle_plane_point(s, params, coord);
        let wrapped = mod1((p.y - center.y).atan2(p.x - center.x) / two_pi);
        if i == 0 {
            lifted = wrapped;
        } else {
            let inc = crate::torus::circle_delta(prev_wrapped, wrapped);
            if inc.abs() >= limit {
                return Err(Cr3bpError::UndersampledAngle {
                    index: i,
                    step: inc.abs().approx_f64(),
                });
            }
            lifted = lifted + inc;
        }
        prev_wrapped = wrapped;
        out.push(lifted);
    }
    Ok(out)
}

/// Weighted-average rotation rate of an unwrapped angle series sampled every
/// `dt`: revolutions per time unit, sign included.
pub fn rate_from_unwrapped_series<R: Real>(
    series: &[R],
    dt: R,
    p: WeightParams,
) -> Result<(R, AverageReport<R>), Cr3bpError> {
    if series.len() < 3 {
        return Err(Cr3bpError::TooShort);
    }
    let increments: Vec<R> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let report = weighted_birkhoff_average(&increments, p)?;
    Ok((report.value / dt, report))
}

/// Both rotation rates of a CR3BP trajectory plus the cross-check against an
/// independently computed section rotation number.
#[derive(Debug, Clone)]
pub struct Cr3bpRates<R: Real> {
    /// Position-angle rate (rev per time unit, rotating frame).
    pub rho_theta: R,
    /// Radial-oscillation rate (rev per time unit).
    pub rho_phi: R,
    /// Position rate in the fixed-star frame: `rho_theta + 1/(2π)`.
    pub sidereal_theta: R,
    /// `min over sign of |mod1(±rho_phi/rho_theta) - section_rate|`.
    pub relation_residual: R,
    /// Rotating-frame precession gap `rho_phi - (rho_theta + 1/(2π))`.
    pub precession_gap: R,
    /// False when the weighted averages failed to settle (last-decade spread
    /// above 1e-4 rev per time unit), indicating a non-quasiperiodic orbit.
    pub reliable: bool,
    pub theta_report: AverageReport<R>,
    pub phi_report: AverageReport<R>,
}

/// Centers for the two angle measurements.
#[derive(Debug, Clone, Copy)]
pub struct AngleCenters<R: Real> {
    pub q_plane: PlanarPoint<R>,
    pub r_rprime: PlanarPoint<R>,
}

/// Integrate from `s0` to `t_end` and extract both rotation rates.
///
/// `section_rate` is the reference rotation number of the associated section
/// return map, supplied by configuration; the residual of the identity
/// `section_rate = ±rho_phi/rho_theta mod 1` is the reproducibility
/// cross-check for quasiperiodic orbits.
pub fn cr3bp_rotation_rates<R: Real>(
    s0: &Cr3bpState<R>,
    params: &Cr3bpParams<R>,
    t_end: R,
    p: WeightParams,
    centers: AngleCenters<R>,
    section_rate: R,
) -> Result<Cr3bpRates<R>, Cr3bpError> {
    let states = integrate_rk8(s0, params, t_end)?;
    rates_from_states(&states, params, p, centers, section_rate)
}

/// Rate extraction from an already-integrated trajectory.
pub fn rates_from_states<R: Real>(
    states: &[Cr3bpState<R>],
    params: &Cr3bpParams<R>,
    p: WeightParams,
    centers: AngleCenters<R>,
    section_rate: R,
) -> Result<Cr3bpRates<R>, Cr3bpError> {
    let dt = params.output_dt();
    let theta_series =
        continuous_angle_series(states, params, centers.q_plane, AngleCoordinate::QPlane)?;
    let phi_series =
        continuous_angle_series(states, params, centers.r_rprime, AngleCoordinate::RRPrime)?;
    let (rho_theta, theta_report) = rate_from_unwrapped_series(&theta_series, dt, p)?;
    let (rho_phi, phi_report) = rate_from_unwrapped_series(&phi_series, dt, p)?;

    let ratio = rho_phi / rho_theta;
    let res_plus = residual_mod1(ratio, section_rate);
    let res_minus = residual_mod1(-ratio, section_rate);
    let relation_residual = res_plus.min(res_minus);

    let two_pi = R::PI() + R::PI();
    let sidereal_theta = rho_theta + two_pi.recip();
    let spread_limit = R::from_f64_lossy(1e-4);
    let reliable = (theta_report.last_decade_spread() / dt).abs() < spread_limit
        && (phi_report.last_decade_spread() / dt).abs() < spread_limit;
    Ok(Cr3bpRates {
        rho_theta,
        rho_phi,
        sidereal_theta,
        relation_residual,
        precession_gap: rho_phi - sidereal_theta,
        reliable,
        theta_report,
        phi_report,
    })
}

#[inline]
fn residual_mod1<R: Real>(x: R, target: R) -> R {
    let d = (mod1(x) - target).abs();
    d.min(R::one() - d)
}
