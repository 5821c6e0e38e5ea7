//! Arbitrary-precision real and complex scalars.
//!
//! [`BigReal`] wraps an MPFR float whose precision is fixed by the
//! [`PrecisionContext`] it was created from. Binary operations require both
//! operands to carry the same precision and panic otherwise; constructors
//! that accept caller-supplied values check and return
//! [`Error::PrecisionMismatch`] instead.
//!
//! Decimal I/O uses `ceil(bits * log10(2))` significant digits, the format
//! used in every JSON input and output of this crate.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::{Assign, Float};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

const LOG10_2: f64 = 0.301_029_995_663_981_2;

/// Working binary precision shared by every value in a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PrecisionContext {
    bits: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            bits: Self::DEFAULT_BITS,
        }
    }
}

impl PrecisionContext {
    pub const DEFAULT_BITS: u32 = 1024;
    pub const MIN_BITS: u32 = 64;

    pub fn new(bits: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::InvalidPrecision {
                bits,
                min: Self::MIN_BITS,
            });
        }
        Ok(PrecisionContext { bits })
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    /// Significant decimal digits used for serialization.
    pub fn decimal_digits(self) -> usize {
        (self.bits as f64 * LOG10_2).ceil() as usize
    }

    pub fn zero(self) -> BigReal {
        BigReal(Float::new(self.bits))
    }

    pub fn one(self) -> BigReal {
        self.int(1)
    }

    pub fn int(self, n: i64) -> BigReal {
        BigReal(Float::with_val(self.bits, n))
    }

    /// Exact conversion of a binary double (no decimal rounding involved).
    pub fn from_f64(self, x: f64) -> BigReal {
        BigReal(Float::with_val(self.bits, x))
    }

    /// `num / den`, correctly rounded.
    pub fn ratio(self, num: i64, den: i64) -> BigReal {
        let mut f = Float::with_val(self.bits, num);
        f /= den;
        BigReal(f)
    }

    pub fn pi(self) -> BigReal {
        BigReal(Float::with_val(self.bits, Constant::Pi))
    }

    /// `2^exp`.
    pub fn pow2(self, exp: i32) -> BigReal {
        let mut f = Float::with_val(self.bits, 1);
        f <<= exp;
        BigReal(f)
    }

    /// Unit roundoff scale `2^(offset - bits)`, the building block of every
    /// tolerance in the crate.
    pub fn tol(self, offset: i32) -> BigReal {
        self.pow2(offset - self.bits as i32)
    }

    pub fn czero(self) -> BigComplex {
        BigComplex::new(self.zero(), self.zero())
    }

    pub fn cone(self) -> BigComplex {
        BigComplex::new(self.one(), self.zero())
    }

    pub fn imag_unit(self) -> BigComplex {
        BigComplex::new(self.zero(), self.one())
    }

    pub fn complex(self, re: f64, im: f64) -> BigComplex {
        BigComplex::new(self.from_f64(re), self.from_f64(im))
    }

    /// Parses a finite decimal literal (`[+-]digits[.digits][e[+-]digits]`)
    /// correctly rounded to this precision.
    pub fn parse(self, s: &str) -> Result<BigReal> {
        validate_decimal(s)?;
        let parsed = Float::parse(s.trim()).map_err(|_| Error::Parse {
            input: s.to_string(),
            offset: 0,
            reason: "rejected by the decimal converter",
        })?;
        Ok(BigReal(Float::with_val(self.bits, parsed)))
    }

    pub fn parse_complex(self, re: &str, im: &str) -> Result<BigComplex> {
        Ok(BigComplex::new(self.parse(re)?, self.parse(im)?))
    }

    pub fn check(self, x: &BigReal) -> Result<()> {
        if x.prec() != self.bits {
            return Err(Error::PrecisionMismatch {
                expected: self.bits,
                found: x.prec(),
            });
        }
        Ok(())
    }

    pub fn check_complex(self, z: &BigComplex) -> Result<()> {
        self.check(&z.re)?;
        self.check(&z.im)
    }
}

fn validate_decimal(s: &str) -> Result<()> {
    let err = |offset: usize, reason: &'static str| Error::Parse {
        input: s.to_string(),
        offset,
        reason,
    };
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() && b[i].is_ascii_whitespace() {
        i += 1;
    }
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut mantissa_digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        mantissa_digits += i - frac_start;
    }
    if mantissa_digits == 0 {
        return Err(err(i, "expected a digit"));
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return Err(err(i, "expected exponent digits"));
        }
    }
    while i < b.len() && b[i].is_ascii_whitespace() {
        i += 1;
    }
    if i != b.len() {
        return Err(err(i, "unexpected character"));
    }
    Ok(())
}

/// Arbitrary-precision real number.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigReal(pub(crate) Float);

impl BigReal {
    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn ctx(&self) -> PrecisionContext {
        PrecisionContext {
            bits: self.0.prec(),
        }
    }

    pub(crate) fn from_float(f: Float) -> Self {
        BigReal(f)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Base-2 exponent `e` with `2^(e-1) <= |x| < 2^e`; `None` for zero.
    pub fn exponent(&self) -> Option<i32> {
        self.0.get_exp()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn abs(&self) -> BigReal {
        BigReal(self.0.clone().abs())
    }

    pub fn sqr(&self) -> BigReal {
        BigReal(self.0.clone().square())
    }

    pub fn sqrt(&self) -> Result<BigReal> {
        if self.is_negative() {
            return Err(Error::Domain(format!("sqrt of negative {}", self.to_f64())));
        }
        Ok(BigReal(self.0.clone().sqrt()))
    }

    pub fn exp(&self) -> BigReal {
        BigReal(self.0.clone().exp())
    }

    pub fn ln(&self) -> Result<BigReal> {
        if self.0.is_zero() || self.is_negative() {
            return Err(Error::Domain(format!("log of non-positive {}", self.to_f64())));
        }
        Ok(BigReal(self.0.clone().ln()))
    }

    pub fn sin(&self) -> BigReal {
        BigReal(self.0.clone().sin())
    }

    pub fn cos(&self) -> BigReal {
        BigReal(self.0.clone().cos())
    }

    pub fn sin_cos(&self) -> (BigReal, BigReal) {
        let (s, c) = self.0.clone().sin_cos(Float::new(self.prec()));
        (BigReal(s), BigReal(c))
    }

    pub fn sinh_cosh(&self) -> (BigReal, BigReal) {
        let (s, c) = self.0.clone().sinh_cosh(Float::new(self.prec()));
        (BigReal(s), BigReal(c))
    }

    pub fn tan(&self) -> BigReal {
        BigReal(self.0.clone().tan())
    }

    pub fn atan2(&self, x: &BigReal) -> BigReal {
        BigReal(self.0.clone().atan2(&x.0))
    }

    pub fn recip(&self) -> Result<BigReal> {
        if self.0.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(BigReal(self.0.clone().recip()))
    }

    pub fn try_div(&self, rhs: &BigReal) -> Result<BigReal> {
        if rhs.0.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(self / rhs)
    }

    pub fn powi(&self, n: i32) -> BigReal {
        use rug::ops::Pow;
        BigReal(Float::with_val(self.prec(), (&self.0).pow(n)))
    }

    /// `self * 2^e`, exact.
    pub fn mul_2exp(&self, e: i32) -> BigReal {
        let mut f = self.0.clone();
        f <<= e;
        BigReal(f)
    }

    pub fn floor(&self) -> BigReal {
        BigReal(self.0.clone().floor())
    }

    /// Nearest integer (ties away from zero), saturating at the `i64` range.
    pub fn round_to_i64(&self) -> i64 {
        let r = self.0.clone().round();
        let v = r.to_f64();
        if v >= i64::MAX as f64 {
            i64::MAX
        } else if v <= i64::MIN as f64 {
            i64::MIN
        } else {
            v as i64
        }
    }

    pub fn max(self, other: BigReal) -> BigReal {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: BigReal) -> BigReal {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn total_cmp(&self, other: &BigReal) -> Ordering {
        self.0.total_cmp(&other.0)
    }

    /// Decimal string with the context's digit count, e.g. `-3.14159e0`.
    pub fn to_decimal_string(&self) -> String {
        self.to_decimal_digits(self.ctx().decimal_digits())
    }

    pub fn to_decimal_digits(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return "0".to_string();
        }
        let s = self.0.to_string_radix(10, Some(digits.max(1)));
        normalize_exponent(&s)
    }
}

/// MPFR-style output uses `e` for the exponent; make sure the exponent is
/// always present so the format is uniform.
fn normalize_exponent(s: &str) -> String {
    if s.contains('e') {
        s.to_string()
    } else {
        format!("{s}e0")
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_digits(30))
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{}", self.to_decimal_digits(p)),
            None => write!(f, "{}", self.to_decimal_string()),
        }
    }
}

impl Serialize for BigReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_decimal_string())
    }
}

#[inline]
fn same_prec(a: &Float, b: &Float) {
    assert!(
        a.prec() == b.prec(),
        "precision mismatch: {} vs {} bits",
        a.prec(),
        b.prec()
    );
}

macro_rules! real_binop {
    ($Trait:ident, $method:ident, $AssignTrait:ident, $assign:ident) => {
        impl $AssignTrait<&BigReal> for BigReal {
            fn $assign(&mut self, rhs: &BigReal) {
                same_prec(&self.0, &rhs.0);
                self.0.$assign(&rhs.0);
            }
        }
        impl $AssignTrait<BigReal> for BigReal {
            fn $assign(&mut self, rhs: BigReal) {
                self.$assign(&rhs);
            }
        }
        impl $Trait<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                let mut out = self.clone();
                out.$assign(rhs);
                out
            }
        }
        impl $Trait<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                let mut out = self.clone();
                out.$assign(&rhs);
                out
            }
        }
        impl $Trait<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(mut self, rhs: &BigReal) -> BigReal {
                self.$assign(rhs);
                self
            }
        }
        impl $Trait<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(mut self, rhs: BigReal) -> BigReal {
                self.$assign(&rhs);
                self
            }
        }
        impl $AssignTrait<i32> for BigReal {
            fn $assign(&mut self, rhs: i32) {
                self.0.$assign(rhs);
            }
        }
        impl $Trait<i32> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: i32) -> BigReal {
                let mut out = self.clone();
                out.0.$assign(rhs);
                out
            }
        }
        impl $Trait<i32> for BigReal {
            type Output = BigReal;
            fn $method(mut self, rhs: i32) -> BigReal {
                self.0.$assign(rhs);
                self
            }
        }
    };
}

real_binop!(Add, add, AddAssign, add_assign);
real_binop!(Sub, sub, SubAssign, sub_assign);
real_binop!(Mul, mul, MulAssign, mul_assign);
real_binop!(Div, div, DivAssign, div_assign);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0.clone())
    }
}

/// Arbitrary-precision complex number stored as a pair of [`BigReal`].
#[derive(Clone, PartialEq)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        same_prec(&re.0, &im.0);
        BigComplex { re, im }
    }

    pub fn from_real(re: BigReal) -> Self {
        let im = re.ctx().zero();
        BigComplex { re, im }
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.re.ctx()
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(&self) -> BigComplex {
        BigComplex {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn norm_sqr(&self) -> BigReal {
        let mut out = self.re.0.clone().square();
        out += self.im.0.clone().square();
        BigReal(out)
    }

    pub fn abs(&self) -> BigReal {
        BigReal(self.re.0.clone().hypot(&self.im.0))
    }

    pub fn arg(&self) -> BigReal {
        self.im.atan2(&self.re)
    }

    pub fn scale(&self, k: &BigReal) -> BigComplex {
        BigComplex {
            re: &self.re * k,
            im: &self.im * k,
        }
    }

    pub fn scale_i32(&self, k: i32) -> BigComplex {
        BigComplex {
            re: &self.re * k,
            im: &self.im * k,
        }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> BigComplex {
        BigComplex {
            re: -&self.im,
            im: self.re.clone(),
        }
    }

    pub fn mul_2exp(&self, e: i32) -> BigComplex {
        BigComplex {
            re: self.re.mul_2exp(e),
            im: self.im.mul_2exp(e),
        }
    }

    pub fn sqr(&self) -> BigComplex {
        self * self
    }

    pub fn recip(&self) -> Result<BigComplex> {
        if self.is_zero() {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        Ok(self.recip_unchecked())
    }

    fn recip_unchecked(&self) -> BigComplex {
        // Scale by the larger component to avoid overflow in |z|^2.
        let (a, b) = (&self.re, &self.im);
        if a.abs() >= b.abs() {
            let r = b / a;
            let den = a + &(&r * b);
            BigComplex {
                re: BigReal(den.0.clone().recip()),
                im: -(&r / &den),
            }
        } else {
            let r = a / b;
            let den = b + &(&r * a);
            BigComplex {
                re: &r / &den,
                im: -BigReal(den.0.clone().recip()),
            }
        }
    }

    pub fn try_div(&self, rhs: &BigComplex) -> Result<BigComplex> {
        Ok(self * &rhs.recip()?)
    }

    pub fn exp(&self) -> BigComplex {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        BigComplex {
            re: &m * &c,
            im: &m * &s,
        }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Result<BigComplex> {
        if self.is_zero() {
            return Err(Error::Domain("log of zero".into()));
        }
        Ok(BigComplex {
            re: self.abs().ln()?,
            im: self.arg(),
        })
    }

    /// Principal square root (branch cut on the negative real axis).
    pub fn sqrt(&self) -> BigComplex {
        if self.is_zero() {
            return self.ctx().czero();
        }
        let r = self.abs();
        if !self.re.is_negative() {
            let t = ((&r + &self.re).mul_2exp(-1)).sqrt().expect("non-negative");
            let im = &self.im / &t.mul_2exp(1);
            BigComplex { re: t, im }
        } else {
            let t = ((&r - &self.re).mul_2exp(-1)).sqrt().expect("non-negative");
            let re = self.im.abs() / t.mul_2exp(1);
            let im = if self.im.is_negative() { -t } else { t };
            BigComplex { re, im }
        }
    }

    pub fn sin(&self) -> BigComplex {
        let (s, c) = self.re.sin_cos();
        let (sh, ch) = self.im.sinh_cosh();
        BigComplex {
            re: &s * &ch,
            im: &c * &sh,
        }
    }

    pub fn cos(&self) -> BigComplex {
        let (s, c) = self.re.sin_cos();
        let (sh, ch) = self.im.sinh_cosh();
        BigComplex {
            re: &c * &ch,
            im: -(&s * &sh),
        }
    }

    /// `cot z = (sin 2a - i sinh 2b) / (2 (sin^2 a + sinh^2 b))` for
    /// `z = a + ib`; the denominator form avoids cancellation near zero.
    pub fn cot(&self) -> Result<BigComplex> {
        let (s, c) = self.re.sin_cos();
        let (sh, ch) = self.im.sinh_cosh();
        let den = (s.sqr() + sh.sqr()).mul_2exp(1);
        if den.is_zero() {
            return Err(Error::Domain("cot at a multiple of pi".into()));
        }
        // sin 2a = 2 sin a cos a, sinh 2b = 2 sinh b cosh b
        let num_re = (s * c).mul_2exp(1);
        let num_im = (sh * ch).mul_2exp(1);
        Ok(BigComplex {
            re: num_re / &den,
            im: -(num_im / &den),
        })
    }

    pub fn powi(&self, n: i32) -> Result<BigComplex> {
        let mut base = if n < 0 { self.recip()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.ctx().cone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        Ok(acc)
    }

    /// `self += a * b` without temporaries.
    pub fn add_mul(&mut self, a: &BigComplex, b: &BigComplex) {
        same_prec(&self.re.0, &a.re.0);
        same_prec(&self.re.0, &b.re.0);
        self.re.0 += &a.re.0 * &b.re.0;
        self.re.0 -= &a.im.0 * &b.im.0;
        self.im.0 += &a.re.0 * &b.im.0;
        self.im.0 += &a.im.0 * &b.re.0;
    }

    /// `self = a * b`, reusing storage.
    pub fn assign_mul(&mut self, a: &BigComplex, b: &BigComplex) {
        self.re.0.assign(&a.re.0 * &b.re.0);
        self.re.0 -= &a.im.0 * &b.im.0;
        self.im.0.assign(&a.re.0 * &b.im.0);
        self.im.0 += &a.im.0 * &b.re.0;
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}

impl Serialize for BigComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [&self.re, &self.im].serialize(serializer)
    }
}

impl AddAssign<&BigComplex> for BigComplex {
    fn add_assign(&mut self, rhs: &BigComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&BigComplex> for BigComplex {
    fn sub_assign(&mut self, rhs: &BigComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&BigComplex> for BigComplex {
    fn mul_assign(&mut self, rhs: &BigComplex) {
        *self = &*self * rhs;
    }
}

impl Add<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        BigComplex {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        BigComplex {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        let mut out = self.ctx().czero();
        out.assign_mul(self, rhs);
        out
    }
}

impl Div<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    /// Division by zero yields non-finite components; use
    /// [`BigComplex::try_div`] for a checked variant.
    fn div(self, rhs: &BigComplex) -> BigComplex {
        self * &rhs.recip_unchecked()
    }
}

macro_rules! complex_owned_ops {
    ($Trait:ident, $method:ident) => {
        impl $Trait<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                (&self).$method(&rhs)
            }
        }
        impl $Trait<&BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: &BigComplex) -> BigComplex {
                (&self).$method(rhs)
            }
        }
        impl $Trait<BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                self.$method(&rhs)
            }
        }
    };
}

complex_owned_ops!(Add, add);
complex_owned_ops!(Sub, sub);
complex_owned_ops!(Mul, mul);
complex_owned_ops!(Div, div);

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: -&self.re,
            im: -&self.im,
        }
    }
}
