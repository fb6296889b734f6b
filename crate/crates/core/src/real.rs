//! Working-precision scalars.
//!
//! The Gram matrices of the monomial-Gaussian basis are exponentially
//! ill-conditioned, so the variational solver is generic over [`Real`] and is
//! normally run in double-double arithmetic ([`Dd`], about 31 significant
//! digits). This module also supplies the double-double transcendental
//! functions the solver needs (`exp`, `ln`, `ln_gamma`).

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

pub use crate::dd::Dd;

/// Scalar type usable by the dense linear algebra in [`crate::linalg`].
pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    /// Unit roundoff of the type.
    const UNIT_ROUNDOFF: f64;
    /// Smallest relative Cholesky pivot `d_j / S_jj` accepted for a
    /// monomial-Gaussian Gram matrix. Rounding in `S` is amplified by the
    /// large alternating coefficients that express one basis function through
    /// the others, so the usable floor sits far above `UNIT_ROUNDOFF`; the
    /// values are set from measured eigenvalue errors.
    const PIVOT_FLOOR: f64;

    fn zero() -> Self;
    fn one() -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn of(x: f64) -> Self;
    fn from_dd(x: Dd) -> Self;
    fn as_f64(self) -> f64;
    fn as_dd(self) -> Dd;
}

impl Real for f64 {
    const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;
    const PIVOT_FLOOR: f64 = 1e-9;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }

    fn of(x: f64) -> Self {
        x
    }
    fn from_dd(x: Dd) -> Self {
        x.hi() + x.lo()
    }
    fn as_f64(self) -> f64 {
        self
    }
    fn as_dd(self) -> Dd {
        Dd::from(self)
    }
}

impl Real for Dd {
    // 2^-104
    const UNIT_ROUNDOFF: f64 = 4.930380657631324e-32;
    const PIVOT_FLOOR: f64 = 1e-19;

    fn zero() -> Self {
        Dd::ZERO
    }
    fn one() -> Self {
        Dd::ONE
    }
    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }
    fn abs(self) -> Self {
        Dd::abs(self)
    }

    fn of(x: f64) -> Self {
        Dd::from(x)
    }
    fn from_dd(x: Dd) -> Self {
        x
    }
    fn as_f64(self) -> f64 {
        self.to_f64()
    }
    fn as_dd(self) -> Dd {
        self
    }
}

/// Exponential in double-double precision.
pub fn exp(x: Dd) -> Dd {
    let hi = x.hi();
    if hi == 0.0 {
        return Dd::from(1.0);
    }
    if hi > 709.0 {
        return Dd::from(f64::INFINITY);
    }
    if hi < -745.0 {
        return Dd::from(0.0);
    }
    let k = (hi / Dd::LN_2.hi()).round();
    // |r| <= ln2/2, then scaled by 1/16 so the Taylor tail is below 1e-34.
    let r = (x - Dd::LN_2 * k) * 0.0625;
    let mut term = r;
    let mut em1 = r;
    for i in 2..=18 {
        term = term * r / (i as f64);
        em1 += term;
        if term.hi().abs() < 1e-36 {
            break;
        }
    }
    // (1 + e)^2 - 1 = e (2 + e), keeping the small quantity explicit.
    for _ in 0..4 {
        em1 = em1 * (em1 + 2.0);
    }
    (em1 + 1.0).ldexp(k as i32)
}

/// Natural logarithm in double-double precision (`x > 0`).
pub fn ln(x: Dd) -> Dd {
    if x.hi() <= 0.0 {
        return Dd::from(f64::NAN);
    }
    let mut y = Dd::from(x.hi().ln());
    for _ in 0..2 {
        y = y + x * exp(-y) - 1.0;
    }
    y
}

// Bernoulli numbers B_2 .. B_30 as exact (numerator, denominator).
const BERNOULLI: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
];

const STIRLING_SHIFT: f64 = 32.0;

/// `ln Γ(x)` for `x > 0` in double-double precision.
///
/// The argument is shifted to `z >= 32` by the recurrence `Γ(x+1) = xΓ(x)`
/// and the Stirling series is summed through the `B_30` term, whose size at
/// `z = 32` is about `1e-38`.
pub fn ln_gamma(x: Dd) -> Dd {
    assert!(x.hi() > 0.0, "ln_gamma needs a positive argument");
    let mut z = x;
    let mut shift_product = Dd::from(1.0);
    while z.hi() < STIRLING_SHIFT {
        shift_product *= z;
        z += 1.0;
    }
    let half_ln_two_pi = ln(Dd::TAU) * 0.5;
    let ln_z = ln(z);
    let mut sum = (z - 0.5) * ln_z - z + half_ln_two_pi;
    let inv_z = Dd::from(1.0) / z;
    let inv_z2 = inv_z * inv_z;
    let mut power = inv_z;
    for (k, &(num, den)) in BERNOULLI.iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        sum += Dd::from(num) / (den * two_k * (two_k - 1.0)) * power;
        power *= inv_z2;
    }
    sum - ln(shift_product)
}

/// `Γ(x)` for `x > 0` in double-double precision.
pub fn gamma(x: Dd) -> Dd {
    exp(ln_gamma(x))
}

/// Decimal rendering of a double-double with `digits` significant digits,
/// in `d.ddd…e±XX` form.
pub fn to_decimal(x: Dd, digits: usize) -> String {
    let digits = digits.max(1);
    let hi = x.hi();
    if hi.is_nan() {
        return "NaN".into();
    }
    if hi.is_infinite() {
        return if hi > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if hi == 0.0 {
        return format!("{:.*}e+00", digits - 1, 0.0);
    }
    let negative = hi < 0.0;
    let mut y = if negative { -x } else { x };
    let mut exponent = y.hi().log10().floor() as i32;
    y = scale_pow10(y, -exponent);
    while y.hi() >= 10.0 {
        y /= 10.0;
        exponent += 1;
    }
    while y.hi() < 1.0 {
        y *= 10.0;
        exponent -= 1;
    }
    let mut out: Vec<u8> = Vec::with_capacity(digits + 1);
    for _ in 0..=digits {
        let mut d = y.hi().floor();
        if (y - d).hi() < 0.0 {
            d -= 1.0;
        }
        let d = d.clamp(0.0, 9.0);
        out.push(d as u8);
        y = (y - d) * 10.0;
    }
    // round half up on the guard digit
    let guard = out.pop().unwrap_or(0);
    if guard >= 5 {
        let mut i = out.len();
        loop {
            if i == 0 {
                out.insert(0, 1);
                out.pop();
                exponent += 1;
                break;
            }
            i -= 1;
            if out[i] == 9 {
                out[i] = 0;
            } else {
                out[i] += 1;
                break;
            }
        }
    }
    let mut s = String::new();
    if negative {
        s.push('-');
    }
    s.push((b'0' + out[0]) as char);
    if out.len() > 1 {
        s.push('.');
        for &d in &out[1..] {
            s.push((b'0' + d) as char);
        }
    }
    let sign = if exponent < 0 { '-' } else { '+' };
    s.push_str(&format!("e{}{:02}", sign, exponent.abs()));
    s
}

fn scale_pow10(x: Dd, k: i32) -> Dd {
    let mut p = Dd::from(1.0);
    for _ in 0..k.unsigned_abs() {
        p *= 10.0;
    }
    if k >= 0 {
        x * p
    } else {
        x / p
    }
}
