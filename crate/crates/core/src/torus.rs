//! Mod-1 arithmetic, the flat torus metric, rigid-rotation orbits, and
//! unimodular coordinate changes.
//!
//! The torus `T^d = [0,1)^d mod 1` is coordinatized in revolutions: every
//! coordinate is a fraction of a full turn. A rigid rotation advances a point
//! by a fixed vector each step, `θ_{n+1} = θ_n + ρ mod 1`, and all the
//! estimation machinery in this crate ultimately reduces to averages along
//! such orbits.
//!
//! Orbit generation keeps each coordinate in a compensated double-word
//! accumulator so the emitted points carry error of a few ulp regardless of
//! the step count; naive repeated addition would drift linearly and spoil
//! the `1e-12`-level checks downstream.

use smallvec::SmallVec;
use thiserror::Error;

use crate::scalar::Real;
use crate::sum::Mod1Accumulator;

type Coords<R> = SmallVec<[R; 4]>;

/// Reduce into `[0, 1)`. `x - mod1(x)` is an integer up to rounding at the
/// wrap.
///
/// Panics on non-finite input.
#[inline]
pub fn mod1<R: Real>(x: R) -> R {
    assert!(x.is_finite(), "mod1 requires finite input");
    let r = x - x.floor();
    // Rounding can push x - floor(x) to exactly 1 when x is a hair below an
    // integer; fold that back to 0.
    if r >= R::one() {
        R::zero()
    } else {
        r
    }
}

/// Distance on the circle `[0,1) mod 1`: `min(|a-b|, 1-|a-b|)`.
#[inline]
pub fn circle_distance<R: Real>(a: R, b: R) -> R {
    let d = (a - b).abs();
    d.min(R::one() - d)
}

/// Signed circle displacement from `a` to `b`, in `(-1/2, 1/2]`.
#[inline]
pub fn circle_delta<R: Real>(a: R, b: R) -> R {
    let half = R::from_f64_lossy(0.5);
    let d = mod1(b - a);
    if d > half {
        d - R::one()
    } else {
        d
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TorusError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(i64),
    #[error("operation supports d = 2 only (got d = {0})")]
    UnsupportedDimension(usize),
}

/// A point on `T^d`, all coordinates in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint<R: Real> {
    coords: Coords<R>,
}

impl<R: Real> TorusPoint<R> {
    /// Wrap arbitrary coordinates onto the torus.
    pub fn new(coords: &[R]) -> Self {
        assert!(!coords.is_empty(), "torus dimension must be at least 1");
        TorusPoint { coords: coords.iter().map(|&c| mod1(c)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[R] {
        &self.coords
    }

    /// Origin of `T^d`.
    pub fn origin(d: usize) -> Self {
        assert!(d >= 1);
        TorusPoint { coords: (0..d).map(|_| R::zero()).collect() }
    }
}

/// Translation-invariant L1 metric on the torus: the sum of per-coordinate
/// circle distances.
pub fn torus_distance<R: Real>(a: &TorusPoint<R>, b: &TorusPoint<R>) -> R {
    assert_eq!(a.dim(), b.dim(), "torus_distance: dimension mismatch");
    a.coords
        .iter()
        .zip(&b.coords)
        .fold(R::zero(), |acc, (&x, &y)| acc + circle_distance(x, y))
}

/// Per-step rotation vector, coordinates in `[0, 1)` revolutions.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationVector<R: Real> {
    rho: Coords<R>,
}

impl<R: Real> RotationVector<R> {
    pub fn new(rho: &[R]) -> Self {
        assert!(!rho.is_empty(), "rotation vector dimension must be at least 1");
        RotationVector { rho: rho.iter().map(|&c| mod1(c)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.rho.len()
    }

    pub fn coords(&self) -> &[R] {
        &self.rho
    }

    /// Advisory irrationality diagnostic. Quasiperiodicity needs rationally
    /// independent irrational coordinates, which no finite-precision check
    /// can certify; instead we flag coordinates that are suspiciously close
    /// to a fraction with a small denominator. Returns one `(p, q)` witness
    /// per offending coordinate.
    pub fn rational_hazards(&self, max_denominator: u64, tol: R) -> Vec<Option<(i64, u64)>> {
        self.rho
            .iter()
            .map(|&c| nearest_small_fraction(c, max_denominator, tol))
            .collect()
    }

    /// True when no coordinate trips the default diagnostic
    /// (denominators up to 1000, tolerance 1e-12).
    pub fn looks_irrational(&self) -> bool {
        self.rational_hazards(1000, R::from_f64_lossy(1e-12))
            .iter()
            .all(|h| h.is_none())
    }
}

/// Best rational approximation with bounded denominator, via the continued
/// fraction of `x`. Returns `Some((p, q))` when `|x - p/q| < tol`.
fn nearest_small_fraction<R: Real>(x: R, max_den: u64, tol: R) -> Option<(i64, u64)> {
    let x = mod1(x);
    // Convergents p_k/q_k of the continued fraction expansion.
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0u64, x.floor().approx_f64() as i64, 1u64);
    let mut frac = x;
    for _ in 0..64 {
        let err = (x - R::from_f64_lossy(p1 as f64) / R::from_f64_lossy(q1 as f64)).abs();
        if err < tol {
            return Some((p1, q1));
        }
        frac = frac - frac.floor();
        if frac < R::from_f64_lossy(1e-18) {
            break;
        }
        frac = frac.recip();
        let a = frac.floor().approx_f64() as i64;
        let p2 = a * p1 + p0;
        let q2 = (a as u64).saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

/// Iterator over a rigid-rotation orbit `θ_n = θ_0 + n ρ mod 1`.
///
/// Each coordinate runs in a [`Mod1Accumulator`], so the n-th emitted point
/// matches the exact fractional part of `θ_0 + n ρ` to a few ulp for any n.
pub struct RigidOrbit<R: Real> {
    accs: SmallVec<[Mod1Accumulator<R>; 4]>,
    rho: Coords<R>,
    current: Coords<R>,
    emitted_first: bool,
}

impl<R: Real> RigidOrbit<R> {
    pub fn new(rho: &RotationVector<R>, theta0: &TorusPoint<R>) -> Self {
        assert_eq!(rho.dim(), theta0.dim(), "rigid orbit: dimension mismatch");
        RigidOrbit {
            accs: theta0.coords.iter().map(|&c| Mod1Accumulator::new(c)).collect(),
            rho: rho.rho.clone(),
            current: theta0.coords.clone(),
            emitted_first: false,
        }
    }
}

impl<R: Real> Iterator for RigidOrbit<R> {
    type Item = TorusPoint<R>;

    fn next(&mut self) -> Option<TorusPoint<R>> {
        if !self.emitted_first {
            self.emitted_first = true;
            return Some(TorusPoint { coords: self.current.clone() });
        }
        for (acc, &step) in self.accs.iter_mut().zip(&self.rho) {
            acc.advance(step);
        }
        self.current = self.accs.iter().map(|a| a.value()).collect();
        Some(TorusPoint { coords: self.current.clone() })
    }
}

/// First `n_steps + 1` points of the orbit (`θ_0` through `θ_{n_steps}`).
pub fn rigid_orbit<R: Real>(
    rho: &RotationVector<R>,
    theta0: &TorusPoint<R>,
    n_steps: usize,
) -> Vec<TorusPoint<R>> {
    assert!(n_steps >= 1, "rigid_orbit needs at least one step");
    RigidOrbit::new(rho, theta0).take(n_steps + 1).collect()
}

/// Scalar orbit stream for `d = 1`: the first `n` values of
/// `mod1(theta0 + k rho)`.
pub fn rigid_orbit_scalar<R: Real>(rho: R, theta0: R, n: usize) -> Vec<R> {
    let mut acc = Mod1Accumulator::new(mod1(theta0));
    let step = mod1(rho);
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(acc.value());
    for _ in 1..n {
        out.push(acc.advance(step));
    }
    out
}

/// Integer matrix with determinant ±1: a volume-preserving change of torus
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnimodularMatrix {
    d: usize,
    entries: Vec<i64>, // row-major
}

impl UnimodularMatrix {
    pub fn new(d: usize, entries: Vec<i64>) -> Result<Self, TorusError> {
        assert_eq!(entries.len(), d * d, "entry count must be d*d");
        let m = UnimodularMatrix { d, entries };
        let det = m.determinant();
        if det.abs() != 1 {
            return Err(TorusError::NotUnimodular(det));
        }
        Ok(m)
    }

    pub fn identity(d: usize) -> Self {
        let mut entries = vec![0; d * d];
        for i in 0..d {
            entries[i * d + i] = 1;
        }
        UnimodularMatrix { d, entries }
    }

    /// 2x2 shear `[[1, m], [0, 1]]`.
    pub fn upper_shear(m: i64) -> Self {
        UnimodularMatrix { d: 2, entries: vec![1, m, 0, 1] }
    }

    /// 2x2 shear `[[1, 0], [k, 1]]`.
    pub fn lower_shear(k: i64) -> Self {
        UnimodularMatrix { d: 2, entries: vec![1, 0, k, 1] }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.d + j]
    }

    /// Exact integer determinant (cofactor expansion; dimensions here are
    /// small).
    pub fn determinant(&self) -> i64 {
        fn det_rec(d: usize, e: &[i64]) -> i128 {
            if d == 1 {
                return e[0] as i128;
            }
            let mut acc: i128 = 0;
            let mut sign: i128 = 1;
            for col in 0..d {
                let mut minor = Vec::with_capacity((d - 1) * (d - 1));
                for r in 1..d {
                    for c in 0..d {
                        if c != col {
                            minor.push(e[r * d + c]);
                        }
                    }
                }
                acc += sign * (e[col] as i128) * det_rec(d - 1, &minor);
                sign = -sign;
            }
            acc
        }
        det_rec(self.d, &self.entries) as i64
    }

    pub fn matmul(&self, other: &UnimodularMatrix) -> UnimodularMatrix {
        assert_eq!(self.d, other.d);
        let d = self.d;
        let mut entries = vec![0i64; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[i * d + j] = (0..d).map(|k| self.entry(i, k) * other.entry(k, j)).sum();
            }
        }
        UnimodularMatrix { d, entries }
    }
}

/// Apply a unimodular change of coordinates to a rotation vector:
/// `ρ ↦ A ρ mod 1`.
pub fn apply_unimodular<R: Real>(
    a: &UnimodularMatrix,
    rho: &RotationVector<R>,
) -> Result<RotationVector<R>, TorusError> {
    if a.dim() != rho.dim() {
        return Err(TorusError::DimensionMismatch(a.dim(), rho.dim()));
    }
    if a.determinant().abs() != 1 {
        return Err(TorusError::NotUnimodular(a.determinant()));
    }
    let d = a.dim();
    let coords: Coords<R> = (0..d)
        .map(|i| {
            let mut acc = R::zero();
            for j in 0..d {
                // Entries are small integers; reduce each term mod 1 to keep
                // the sum well inside the exactly-representable range.
                acc = mod1(acc + mod1(R::from_f64_lossy(a.entry(i, j) as f64) * rho.rho[j]));
            }
            acc
        })
        .collect();
    Ok(RotationVector { rho: coords })
}

/// Sample the dense family of equivalent rotation vectors
/// `B_m C_k ρ mod 1` for `|m| <= m_bound`, `|k| <= k_bound` (d = 2 only),
/// where `B_m` and `C_k` are the elementary shears.
pub fn representation_samples<R: Real>(
    rho: &RotationVector<R>,
    m_bound: i64,
    k_bound: i64,
) -> Result<Vec<RotationVector<R>>, TorusError> {
    if rho.dim() != 2 {
        return Err(TorusError::UnsupportedDimension(rho.dim()));
    }
    let mut out = Vec::with_capacity(((2 * m_bound + 1) * (2 * k_bound + 1)) as usize);
    for m in -m_bound..=m_bound {
        for k in -k_bound..=k_bound {
            let a = UnimodularMatrix::upper_shear(m).matmul(&UnimodularMatrix::lower_shear(k));
            out.push(apply_unimodular(&a, rho)?);
        }
    }
    Ok(out)
}
