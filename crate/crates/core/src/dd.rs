//! Software double-double arithmetic.
//!
//! A [`Dd`] value is an unevaluated sum `hi + lo` of two `f64`s with
//! `|lo| <= ulp(hi)/2`, giving roughly 32 significant decimal digits. The
//! arithmetic kernels are the classical error-free transformations
//! (`two_sum`, `two_prod` via FMA) with the usual renormalization step.
//!
//! Transcendental functions are built from scratch rather than by correcting
//! `f64` results, because libm only supplies 16 digits:
//!
//! * `exp` reduces by `ln 2`, scales by `2^-9`, runs a short Taylor series
//!   for `e^r - 1`, and squares back up;
//! * `sin`/`cos` reduce modulo `π/2` and evaluate Taylor series on the
//!   reduced argument;
//! * `ln`, `atan2`, `sqrt`, `cbrt` start from the `f64` estimate and apply
//!   one Newton step, which doubles the correct digits.
//!
//! Accuracy is a few units in the last place for arguments of moderate size;
//! argument reduction quality degrades slowly for `|x| >> 1` because `π/2`
//! is only held to double-double precision. The unit tests pin values against
//! externally computed 50-digit references.
//!
//! The type implements `num_traits::Float`, so every generic routine in this
//! crate can run at extended precision by instantiating with `Dd`.

use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};

/// Double-double floating point number: the unevaluated sum `hi + lo`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Requires |a| >= |b| (or a == 0).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    /// Unit roundoff of the format, about `4.93e-32`.
    pub const EPS: f64 = 4.930380657631324e-32; // 2^-104

    const C_PI: Dd = Dd { hi: 3.141592653589793, lo: 1.2246467991473532e-16 };
    const C_PI_2: Dd = Dd { hi: 1.5707963267948966, lo: 6.123233995736766e-17 };
    const C_LN2: Dd = Dd { hi: 0.6931471805599453, lo: 2.3190468138462996e-17 };
    const C_LOG2_E: Dd = Dd { hi: 1.4426950408889634, lo: 2.0355273740931033e-17 };
    const C_FRAC_2_PI: Dd = Dd { hi: 0.6366197723675814, lo: -3.935735335036497e-17 };

    /// Build from components, renormalizing.
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    /// Exact sum of two `f64`s as a double-double.
    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Dd {
        let (s, e) = two_sum(a, b);
        Dd { hi: s, lo: e }
    }

    /// Exact product of two `f64`s as a double-double.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Dd {
        let (p, e) = two_prod(a, b);
        Dd { hi: p, lo: e }
    }

    #[inline]
    fn add_f64(self, b: f64) -> Dd {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd { hi, lo }
    }

    #[inline]
    fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    #[inline]
    fn div_f64(self, b: f64) -> Dd {
        self / Dd::from_f64(b)
    }

    /// Multiply by `2^k` (exact away from overflow/underflow).
    #[inline]
    fn ldexp(self, k: i32) -> Dd {
        let f = libm_exp2i(k);
        Dd { hi: self.hi * f, lo: self.lo * f }
    }

    fn sin_taylor(r: Dd) -> Dd {
        if r.hi == 0.0 {
            return r;
        }
        let x2 = r * r;
        let mut term = r;
        let mut sum = r;
        for k in 1..=24i32 {
            let d = ((2 * k) * (2 * k + 1)) as f64;
            term = -(term * x2).div_f64(d);
            sum += term;
            if term.hi.abs() <= sum.hi.abs() * 2.5e-33 {
                break;
            }
        }
        sum
    }

    fn cos_taylor(r: Dd) -> Dd {
        let x2 = r * r;
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for k in 1..=24i32 {
            let d = ((2 * k - 1) * (2 * k)) as f64;
            term = -(term * x2).div_f64(d);
            sum += term;
            if term.hi.abs() <= 2.5e-33 {
                break;
            }
        }
        sum
    }

    /// `e^r - 1` for small `|r|` (reduced below ~7e-4).
    fn expm1_small(r: Dd) -> Dd {
        let mut term = r;
        let mut sum = r;
        for i in 2..=12i32 {
            term = (term * r).div_f64(i as f64);
            sum += term;
            if term.hi.abs() <= 1e-40 {
                break;
            }
        }
        sum
    }
}

#[inline]
fn libm_exp2i(k: i32) -> f64 {
    // 2^k for |k| within f64 range; exact.
    f64::powi(2.0, k)
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hi.is_nan() {
            return write!(f, "NaN");
        }
        if self.hi.is_infinite() {
            return write!(f, "{}", self.hi);
        }
        if self.hi == 0.0 {
            return write!(f, "0");
        }
        let neg = self.hi < 0.0;
        let a = if neg { -*self } else { *self };
        let mut e10 = a.hi.log10().floor() as i32;
        let mut m = a / Dd::from_f64(10.0).powi(e10);
        // Guard against log10 rounding at decade boundaries.
        if m.hi >= 10.0 {
            m = m.div_f64(10.0);
            e10 += 1;
        } else if m.hi < 1.0 {
            m = m.mul_f64(10.0);
            e10 -= 1;
        }
        // Round in the 32nd digit.
        m = m.add_f64(5e-32);
        if m.hi >= 10.0 {
            m = m.div_f64(10.0);
            e10 += 1;
        }
        let mut digits = String::with_capacity(34);
        for i in 0..32 {
            let d = m.hi.floor().clamp(0.0, 9.0);
            digits.push((b'0' + d as u8) as char);
            if i == 0 {
                digits.push('.');
            }
            m = (m - Dd::from_f64(d)).mul_f64(10.0);
        }
        write!(f, "{}{}e{}", if neg { "-" } else { "" }, digits, e10)
    }
}

impl PartialEq for Dd {
    #[inline]
    fn eq(&self, other: &Dd) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for Dd {
    #[inline]
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, se) = two_sum(self.hi, b.hi);
        let (t, te) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s, se + t);
        let (hi, lo) = quick_two_sum(s1, s2 + te);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return Dd::from_f64(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (s, e) = quick_two_sum(q1, q2);
        let (hi, lo) = quick_two_sum(s, e + q3);
        Dd { hi, lo }
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, b: Dd) -> Dd {
        self - (self / b).trunc() * b
    }
}

macro_rules! impl_assign {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Dd {
            #[inline]
            fn $method(&mut self, rhs: Dd) {
                *self = *self $op rhs;
            }
        }
    };
}
impl_assign!(AddAssign, add_assign, +);
impl_assign!(SubAssign, sub_assign, -);
impl_assign!(MulAssign, mul_assign, *);
impl_assign!(DivAssign, div_assign, /);
impl_assign!(RemAssign, rem_assign, %);

impl Zero for Dd {
    #[inline]
    fn zero() -> Dd {
        Dd::ZERO
    }
    #[inline]
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for Dd {
    #[inline]
    fn one() -> Dd {
        Dd::ONE
    }
}

/// Error from parsing a decimal string into a [`Dd`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdParseError(pub String);

impl fmt::Display for DdParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid double-double literal: {}", self.0)
    }
}

impl std::error::Error for DdParseError {}

impl Num for Dd {
    type FromStrRadixErr = DdParseError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Dd, DdParseError> {
        let err = || DdParseError(s.to_string());
        let bytes = s.as_bytes();
        if bytes.is_empty() {
            return Err(err());
        }
        let mut i = 0;
        let neg = match bytes[0] {
            b'-' => {
                i += 1;
                true
            }
            b'+' => {
                i += 1;
                false
            }
            _ => false,
        };
        let rad = Dd::from_f64(radix as f64);
        let mut acc = Dd::ZERO;
        let mut any = false;
        let mut frac_digits: i32 = 0;
        let mut seen_dot = false;
        let mut exp: i32 = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if c == b'.' {
                if seen_dot {
                    return Err(err());
                }
                seen_dot = true;
                i += 1;
                continue;
            }
            if radix == 10 && (c == b'e' || c == b'E') {
                let tail = &s[i + 1..];
                exp = tail.parse::<i32>().map_err(|_| err())?;
                break;
            }
            let d = (c as char).to_digit(radix).ok_or_else(err)?;
            acc = acc * rad + Dd::from_f64(d as f64);
            if seen_dot {
                frac_digits += 1;
            }
            any = true;
            i += 1;
        }
        if !any {
            return Err(err());
        }
        let scale = exp - frac_digits;
        let mut v = acc * rad.powi(scale);
        if neg {
            v = -v;
        }
        Ok(v)
    }
}

impl ToPrimitive for Dd {
    fn to_i64(&self) -> Option<i64> {
        if !self.hi.is_finite() {
            return None;
        }
        let t = self.trunc();
        if t.hi.abs() >= 9.2e18 {
            let v = (t.hi as i128) + (t.lo as i128);
            return i64::try_from(v).ok();
        }
        Some(t.hi as i64 + t.lo as i64)
    }

    fn to_u64(&self) -> Option<u64> {
        let v = self.to_i64()?;
        if v < 0 {
            None
        } else {
            Some(v as u64)
        }
    }

    fn to_f64(&self) -> Option<f64> {
        Some(self.hi + self.lo)
    }

    fn to_f32(&self) -> Option<f32> {
        Some((self.hi + self.lo) as f32)
    }
}

impl FromPrimitive for Dd {
    fn from_i64(n: i64) -> Option<Dd> {
        let hi = n as f64;
        let rem = (n as i128) - (hi as i128);
        Some(Dd::new(hi, rem as f64))
    }

    fn from_u64(n: u64) -> Option<Dd> {
        let hi = n as f64;
        let rem = (n as i128) - (hi as i128);
        Some(Dd::new(hi, rem as f64))
    }

    fn from_f64(n: f64) -> Option<Dd> {
        Some(Dd::from_f64(n))
    }

    fn from_f32(n: f32) -> Option<Dd> {
        Some(Dd::from_f64(n as f64))
    }
}

impl NumCast for Dd {
    fn from<T: ToPrimitive>(n: T) -> Option<Dd> {
        if let Some(i) = n.to_i64() {
            return Dd::from_i64(i);
        }
        n.to_f64().map(Dd::from_f64)
    }
}

impl Float for Dd {
    fn nan() -> Dd {
        Dd::from_f64(f64::NAN)
    }
    fn infinity() -> Dd {
        Dd::from_f64(f64::INFINITY)
    }
    fn neg_infinity() -> Dd {
        Dd::from_f64(f64::NEG_INFINITY)
    }
    fn neg_zero() -> Dd {
        Dd::from_f64(-0.0)
    }
    fn min_value() -> Dd {
        Dd::from_f64(-f64::MAX)
    }
    fn min_positive_value() -> Dd {
        Dd::from_f64(f64::MIN_POSITIVE)
    }
    fn max_value() -> Dd {
        Dd::from_f64(f64::MAX)
    }
    fn epsilon() -> Dd {
        Dd::from_f64(Dd::EPS)
    }

    fn is_nan(self) -> bool {
        self.hi.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.hi.is_infinite()
    }
    fn is_finite(self) -> bool {
        self.hi.is_finite()
    }
    fn is_normal(self) -> bool {
        self.hi.is_normal()
    }
    fn classify(self) -> FpCategory {
        self.hi.classify()
    }

    fn floor(self) -> Dd {
        let fh = self.hi.floor();
        if fh != self.hi {
            // hi is not an integer; normalization keeps hi+lo on the same side.
            Dd::from_f64(fh)
        } else {
            let (hi, lo) = quick_two_sum(self.hi, self.lo.floor());
            Dd { hi, lo }
        }
    }

    fn ceil(self) -> Dd {
        -((-self).floor())
    }

    fn round(self) -> Dd {
        let t = self.trunc();
        let f = self - t;
        if f.hi.abs() >= 0.5 {
            t + Dd::from_f64(f.hi.signum())
        } else {
            t
        }
    }

    fn trunc(self) -> Dd {
        if self.hi >= 0.0 {
            self.floor()
        } else {
            self.ceil()
        }
    }

    fn fract(self) -> Dd {
        self - self.trunc()
    }

    fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    fn signum(self) -> Dd {
        if self.is_nan() {
            Dd::nan()
        } else if self.hi.is_sign_positive() {
            Dd::ONE
        } else {
            -Dd::ONE
        }
    }

    fn is_sign_positive(self) -> bool {
        self.hi.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.hi.is_sign_negative()
    }

    /// Not a fused operation: rounds after the multiply.
    fn mul_add(self, a: Dd, b: Dd) -> Dd {
        self * a + b
    }

    fn recip(self) -> Dd {
        Dd::ONE / self
    }

    fn powi(self, n: i32) -> Dd {
        if n == 0 {
            return Dd::ONE;
        }
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = (n as i64).unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    fn powf(self, y: Dd) -> Dd {
        if y.is_zero() {
            return Dd::ONE;
        }
        if self.is_zero() {
            return if y.hi > 0.0 { Dd::ZERO } else { Dd::infinity() };
        }
        if self.hi > 0.0 {
            return (y * self.ln()).exp();
        }
        // Negative base: integer exponents only.
        if y == y.trunc() && y.hi.abs() < 2.1e9 {
            self.powi(y.hi as i32)
        } else {
            Dd::nan()
        }
    }

    fn sqrt(self) -> Dd {
        if self.hi < 0.0 {
            return Dd::nan();
        }
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        let y0 = self.hi.sqrt();
        let y = Dd::from_f64(y0);
        let e = self - y * y;
        y + e.mul_f64(0.5 / y0)
    }

    fn exp(self) -> Dd {
        if self.is_nan() {
            return self;
        }
        if self.hi.abs() > 690.0 {
            return Dd::from_f64(self.hi.exp());
        }
        let kf = (self * Dd::C_LOG2_E).hi.round();
        let r = self - Dd::C_LN2.mul_f64(kf);
        let rs = r.ldexp(-9);
        let mut p = Dd::expm1_small(rs);
        for _ in 0..9 {
            p = p * (p + Dd::from_f64(2.0));
        }
        (Dd::ONE + p).ldexp(kf as i32)
    }

    fn exp2(self) -> Dd {
        (self * Dd::C_LN2).exp()
    }

    fn ln(self) -> Dd {
        if self.hi < 0.0 {
            return Dd::nan();
        }
        if self.hi == 0.0 {
            return Dd::neg_infinity();
        }
        if self.hi.is_infinite() {
            return self;
        }
        // One Newton step on exp(y) = x from the f64 estimate.
        let y0 = Dd::from_f64(self.hi.ln());
        y0 + self * (-y0).exp() - Dd::ONE
    }

    fn log(self, base: Dd) -> Dd {
        self.ln() / base.ln()
    }
    fn log2(self) -> Dd {
        self.ln() / Dd::C_LN2
    }
    fn log10(self) -> Dd {
        self.ln() / Dd::from_str_radix("2.302585092994045684017991454684364", 10).unwrap()
    }

    fn max(self, other: Dd) -> Dd {
        if self.is_nan() || other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Dd) -> Dd {
        if self.is_nan() || other < self {
            other
        } else {
            self
        }
    }

    fn abs_sub(self, other: Dd) -> Dd {
        if self <= other {
            Dd::ZERO
        } else {
            self - other
        }
    }

    fn cbrt(self) -> Dd {
        if self.is_zero() {
            return self;
        }
        let y0 = Dd::from_f64(self.hi.cbrt());
        // Newton: y <- y - (y^3 - x)/(3 y^2)
        let y2 = y0 * y0;
        y0 - (y2 * y0 - self) / (y2.mul_f64(3.0))
    }

    fn hypot(self, other: Dd) -> Dd {
        let a = self.abs();
        let b = other.abs();
        let m = a.hi.max(b.hi);
        if m == 0.0 {
            return Dd::ZERO;
        }
        if m > 1e150 || m < 1e-150 {
            let k = m.log2().round() as i32;
            let (sa, sb) = (a.ldexp(-k), b.ldexp(-k));
            return (sa * sa + sb * sb).sqrt().ldexp(k);
        }
        (a * a + b * b).sqrt()
    }

    fn sin(self) -> Dd {
        self.sin_cos().0
    }
    fn cos(self) -> Dd {
        self.sin_cos().1
    }
    fn tan(self) -> Dd {
        let (s, c) = self.sin_cos();
        s / c
    }

    fn asin(self) -> Dd {
        if self.abs() > Dd::ONE {
            return Dd::nan();
        }
        self.atan2((Dd::ONE - self * self).sqrt())
    }

    fn acos(self) -> Dd {
        if self.abs() > Dd::ONE {
            return Dd::nan();
        }
        (Dd::ONE - self * self).sqrt().atan2(self)
    }

    fn atan(self) -> Dd {
        self.atan2(Dd::ONE)
    }

    fn atan2(self, other: Dd) -> Dd {
        let (y, x) = (self, other);
        if y.is_zero() && x.is_zero() {
            return Dd::ZERO;
        }
        if !y.hi.is_finite() || !x.hi.is_finite() {
            return Dd::from_f64(y.hi.atan2(x.hi));
        }
        // Scale by a power of two so the Newton residual is well conditioned.
        let m = x.hi.abs().max(y.hi.abs());
        let k = m.log2().round() as i32;
        let (xs, ys) = (x.ldexp(-k), y.ldexp(-k));
        let z0 = Dd::from_f64(ys.hi.atan2(xs.hi));
        let (s, c) = z0.sin_cos();
        let num = ys * c - xs * s;
        let den = xs * c + ys * s;
        z0 + num / den
    }

    fn sin_cos(self) -> (Dd, Dd) {
        if !self.hi.is_finite() {
            return (Dd::nan(), Dd::nan());
        }
        let t = self * Dd::C_FRAC_2_PI;
        let kf = t.hi.round();
        if kf.abs() >= 4.5e15 {
            // Reduction precision is exhausted; degrade to f64.
            return (Dd::from_f64(self.hi.sin()), Dd::from_f64(self.hi.cos()));
        }
        let r = self - Dd::C_PI_2.mul_f64(kf);
        let s = Dd::sin_taylor(r);
        let c = Dd::cos_taylor(r);
        match (kf as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    fn exp_m1(self) -> Dd {
        if self.hi.abs() < 0.3 {
            let rs = self.ldexp(-9);
            let mut p = Dd::expm1_small(rs);
            for _ in 0..9 {
                p = p * (p + Dd::from_f64(2.0));
            }
            p
        } else {
            self.exp() - Dd::ONE
        }
    }

    fn ln_1p(self) -> Dd {
        (Dd::ONE + self).ln()
    }

    fn sinh(self) -> Dd {
        let p = self.exp_m1();
        let q = (-self).exp_m1();
        (p - q).ldexp(-1)
    }

    fn cosh(self) -> Dd {
        (self.exp() + (-self).exp()).ldexp(-1)
    }

    fn tanh(self) -> Dd {
        let p = self.exp_m1();
        let q = (-self).exp_m1();
        (p - q) / (Dd::from_f64(2.0) + p + q)
    }

    fn asinh(self) -> Dd {
        let a = self.abs();
        let r = (a + (a * a + Dd::ONE).sqrt()).ln();
        if self.hi < 0.0 {
            -r
        } else {
            r
        }
    }

    fn acosh(self) -> Dd {
        (self + (self * self - Dd::ONE).sqrt()).ln()
    }

    fn atanh(self) -> Dd {
        ((Dd::ONE + self) / (Dd::ONE - self)).ln().ldexp(-1)
    }

    fn integer_decode(self) -> (u64, i16, i8) {
        self.hi.integer_decode()
    }

    fn to_degrees(self) -> Dd {
        self * Dd::from_f64(180.0) / Dd::C_PI
    }

    fn to_radians(self) -> Dd {
        self * Dd::C_PI / Dd::from_f64(180.0)
    }
}

impl FloatConst for Dd {
    fn E() -> Dd {
        Dd { hi: 2.718281828459045, lo: 1.4456468917292502e-16 }
    }
    fn FRAC_1_PI() -> Dd {
        Dd { hi: 0.3183098861837907, lo: -1.9678676675182486e-17 }
    }
    fn FRAC_1_SQRT_2() -> Dd {
        Dd { hi: 0.7071067811865476, lo: -4.833646656726457e-17 }
    }
    fn FRAC_2_PI() -> Dd {
        Dd::C_FRAC_2_PI
    }
    fn FRAC_2_SQRT_PI() -> Dd {
        Dd { hi: 1.1283791670955126, lo: 1.533545961316588e-17 }
    }
    fn FRAC_PI_2() -> Dd {
        Dd::C_PI_2
    }
    fn FRAC_PI_3() -> Dd {
        Dd { hi: 1.0471975511965979, lo: -1.072081766451091e-16 }
    }
    fn FRAC_PI_4() -> Dd {
        Dd { hi: 0.7853981633974483, lo: 3.061616997868383e-17 }
    }
    fn FRAC_PI_6() -> Dd {
        Dd { hi: 0.5235987755982989, lo: -5.360408832255455e-17 }
    }
    fn FRAC_PI_8() -> Dd {
        Dd { hi: 0.39269908169872414, lo: 1.5308084989341915e-17 }
    }
    fn LN_10() -> Dd {
        Dd { hi: 2.302585092994046, lo: -2.1707562233822494e-16 }
    }
    fn LN_2() -> Dd {
        Dd::C_LN2
    }
    fn LOG10_E() -> Dd {
        Dd { hi: 0.4342944819032518, lo: 1.098319650216765e-17 }
    }
    fn LOG2_E() -> Dd {
        Dd::C_LOG2_E
    }
    fn PI() -> Dd {
        Dd::C_PI
    }
    fn SQRT_2() -> Dd {
        Dd { hi: 1.4142135623730951, lo: -9.667293313452913e-17 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_dd_close(got: Dd, hi: f64, lo: f64, what: &str) {
        let want = Dd::new(hi, lo);
        let diff = (got - want).abs();
        let scale = want.abs().hi.max(1e-300);
        assert!(
            diff.hi <= scale * 1e-29,
            "{what}: got {got:?}, want {want:?}, rel err {}",
            diff.hi / scale
        );
    }

    #[test]
    fn arithmetic_is_error_free_where_it_should_be() {
        let a = Dd::from_f64(1.0) / Dd::from_f64(3.0);
        let b = a * Dd::from_f64(3.0);
        assert!((b - Dd::ONE).abs().hi < 1e-31);

        // (1e16 + 1) - 1e16 recovers the 1 exactly.
        let big = Dd::from_f64(1e16) + Dd::ONE;
        assert_eq!((big - Dd::from_f64(1e16)).hi, 1.0);
    }

    #[test]
    fn floor_round_trunc() {
        assert_eq!(Dd::from_f64(2.75).floor().hi, 2.0);
        assert_eq!(Dd::from_f64(-2.75).floor().hi, -3.0);
        assert_eq!(Dd::new(3.0, -0.25).trunc().hi, 2.0);
        assert_eq!(Dd::from_f64(-3.5).round().hi, -4.0);
        assert_eq!(Dd::from_f64(3.5).round().hi, 4.0);
        let x = Dd::new(5.0, 3e-17);
        assert_eq!(x.floor().hi, 5.0);
        assert!((x.fract() - Dd::from_f64(3e-17)).abs().hi < 1e-40);
    }

    // Reference values computed with 50-digit decimal arithmetic.
    #[test]
    fn transcendentals_match_reference() {
        let cases: &[(&str, f64, f64, f64, f64)] = &[
            ("sqrt", 0.5, 0.0, 0.7071067811865476, -4.833646656726457e-17),
            ("sqrt", 2.0, 0.0, 1.4142135623730951, -9.667293313452913e-17),
            ("sqrt", 10.0, 0.0, 3.1622776601683795, -1.9078816970716603e-16),
            ("sqrt", 0.001, 0.0, 0.03162277660168379, 2.3070395267954534e-18),
            ("sqrt", 123.456, 0.0, 11.111075555498667, -4.773446557130318e-16),
            ("sqrt", 100000000.0, 0.0, 10000.0, 0.0),
            ("exp", 0.5, 0.0, 1.6487212707001282, -4.731568479435833e-17),
            ("exp", -4.0, 0.0, 0.01831563888873418, 1.6250688994271399e-18),
            ("exp", 1.0, 0.0, 2.718281828459045, 1.4456468917292502e-16),
            ("exp", 0.0078125, 0.0, 1.007843097206448, -6.872774751042842e-17),
            ("exp", -0.75, 0.0, 0.4723665527410147, 1.7984004434373214e-17),
            ("exp", 20.0, 0.0, 485165195.4097903, 4.880277289790406e-10),
            ("ln", 0.5, 0.0, -0.6931471805599453, -2.3190468138462996e-17),
            ("ln", 2.0, 0.0, 0.6931471805599453, 2.3190468138462996e-17),
            ("ln", 1000.0, 0.0, 6.907755278982137, 2.369515526854504e-16),
            ("ln", 0.0078125, 0.0, -4.852030263919617, -2.7335557943175664e-16),
            ("ln", 3.0, 0.0, 1.0986122886681098, -9.07129723500153e-17),
            ("sin", 0.5, 0.0, 0.479425538604203, -5.103969860556013e-18),
            ("cos", 0.5, 0.0, 0.8775825618903728, -4.2623149864279997e-17),
            ("sin", -0.25, 0.0, -0.24740395925452294, 7.53102495590706e-18),
            ("cos", -0.25, 0.0, 0.9689124217106447, 5.071436662403936e-17),
            ("sin", 3.0, 0.0, 0.1411200080598672, 8.577269787017502e-18),
            ("cos", 3.0, 0.0, -0.9899924966004454, -4.2060261566099734e-17),
            ("sin", 6.25, 0.0, -0.03317921654755682, -5.87475042180262e-20),
            ("cos", 6.25, 0.0, 0.9994494182244994, 1.1869597287901431e-17),
            ("sin", 100.0, 0.0, -0.5063656411097588, -3.050947053792115e-18),
            ("cos", 100.0, 0.0, 0.8623188722876839, 4.334809858136501e-17),
            ("sin", -15.5, 0.0, -0.2064674819377966, 1.0126354681013946e-17),
            ("cos", -15.5, 0.0, -0.9784534628188842, 1.6919900715160144e-17),
            ("atan2", 1.0, 1.0, 0.7853981633974483, 3.061616997868383e-17),
            ("atan2", -1.0, 2.0, -0.4636476090008061, -2.2698777452961687e-17),
            ("atan2", 0.5, -0.25, 2.0344439357957027, 2.841996617907152e-17),
            ("atan2", -3.0, -4.0, -2.498091544796509, 4.392407599224622e-18),
            ("atan2", 1e-08, 1.0, 1e-08, -3.3333333333333335e-25),
            ("atan2", 7.25, 0.125, 1.5535566556003668, 1.0363637861762022e-16),
        ];
        for &(func, a, b, hi, lo) in cases {
            let x = Dd::from_f64(a);
            let got = match func {
                "sqrt" => x.sqrt(),
                "exp" => x.exp(),
                "ln" => x.ln(),
                "sin" => x.sin(),
                "cos" => x.cos(),
                "atan2" => x.atan2(Dd::from_f64(b)),
                _ => unreachable!(),
            };
            assert_dd_close(got, hi, lo, &format!("{func}({a}, {b})"));
        }
    }

    #[test]
    fn constants_are_self_consistent() {
        assert!((<Dd as FloatConst>::PI() - <Dd as FloatConst>::FRAC_PI_2().mul_f64(2.0)).abs().hi < 1e-31);
        assert!((<Dd as FloatConst>::LN_2().exp() - Dd::from_f64(2.0)).abs().hi < 1e-30);
        assert!((<Dd as FloatConst>::PI().sin()).abs().hi < 1e-31);
        assert!((<Dd as FloatConst>::SQRT_2() * <Dd as FloatConst>::SQRT_2() - Dd::from_f64(2.0)).abs().hi < 1e-31);
    }

    #[test]
    fn parse_and_display_round_trip() {
        let v = Dd::from_str_radix("0.61803398874989484820458683436563811772", 10).unwrap();
        let golden = (Dd::from_f64(5.0).sqrt() - Dd::ONE).ldexp(-1);
        assert!((v - golden).abs().hi < 1e-30, "parsed {v} vs computed {golden}");

        let s = format!("{golden}");
        let back = Dd::from_str_radix(&s, 10).unwrap();
        assert!((back - golden).abs().hi < 1e-29);

        assert!(Dd::from_str_radix("1.25e3", 10).unwrap() == Dd::from_f64(1250.0));
        assert!(Dd::from_str_radix("", 10).is_err());
        assert!(Dd::from_str_radix("1.2.3", 10).is_err());
    }

    #[test]
    fn conversions() {
        assert_eq!(Dd::from_i64(i64::MAX).unwrap().to_i64(), Some(i64::MAX));
        assert_eq!(Dd::from_f64(2.5).to_f64(), Some(2.5));
        assert_eq!(<Dd as NumCast>::from(7u32).unwrap().hi, 7.0);
    }

    #[test]
    fn comparisons_and_specials() {
        assert!(Dd::new(1.0, 1e-20) > Dd::ONE);
        assert!(Dd::nan().is_nan());
        assert!(Dd::infinity().is_infinite());
        assert_eq!(Dd::from_f64(-3.0).abs().hi, 3.0);
        assert_eq!(Dd::from_f64(0.0).signum().hi, 1.0);
    }

    #[test]
    fn powi_and_powf() {
        let x = Dd::from_f64(3.0);
        assert!((x.powi(7) - Dd::from_f64(2187.0)).abs().hi < 1e-27);
        assert!((x.powi(-2) - Dd::ONE / Dd::from_f64(9.0)).abs().hi < 1e-32);
        let y = Dd::from_f64(2.0).powf(Dd::from_f64(0.5));
        assert!((y - Dd::from_f64(2.0).sqrt()).abs().hi < 1e-31);
    }
}
