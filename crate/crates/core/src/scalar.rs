//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! Two traits split the arithmetic by what a backend can do exactly:
//!
//! * [`Scalar`] is an ordered field with decimal I/O. Exact rationals,
//!   `f64`, and the multiprecision [`Mp`](crate::Mp) floats all qualify, so
//!   inner products, Gram matrices, the Laguerre basis, and Pick matrices can
//!   be evaluated without rounding when the inputs are rational.
//! * [`Real`] adds the transcendental functions needed for square roots,
//!   pointwise evaluation, roots of unity, and polynomial root finding.
//!
//! Complex values are always [`num_complex::Complex`] over one of these.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Complex number over a scalar backend.
pub type C<T> = Complex<T>;

/// Ordered field with the conversions the crate relies on.
pub trait Scalar:
    Clone + Debug + PartialOrd + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Mantissa bits of the backend, `None` for exact arithmetic.
    fn bits() -> Option<u32>;

    /// Distance from one to the next representable value; zero when exact.
    fn epsilon() -> Self;

    /// Parses a decimal literal such as `-1.25e-3` (rationals also accept `p/q`).
    fn parse_decimal(text: &str) -> Option<Self>;

    /// Deterministic text form that [`Scalar::parse_decimal`] reads back to the same value.
    fn to_decimal(&self) -> String;

    fn is_exact() -> bool {
        Self::bits().is_none()
    }

    /// Converts a double; exact for binary fractions in every backend.
    fn val(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    fn int(v: i64) -> Self {
        Self::from_i64(v).expect("integer literal")
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Scalar with elementary transcendental functions.
pub trait Real: Scalar {
    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn pi() -> Self;
}

impl Scalar for f64 {
    fn bits() -> Option<u32> {
        Some(53)
    }

    fn epsilon() -> Self {
        f64::EPSILON
    }

    fn parse_decimal(text: &str) -> Option<Self> {
        text.trim().parse().ok()
    }

    fn to_decimal(&self) -> String {
        format!("{:.16e}", self)
    }
}

impl Real for f64 {
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
}

impl Scalar for BigRational {
    fn bits() -> Option<u32> {
        None
    }

    fn epsilon() -> Self {
        BigRational::zero()
    }

    fn parse_decimal(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((p, q)) = text.split_once('/') {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            return Some(BigRational::new(p, q));
        }
        parse_decimal_rational(text)
    }

    fn to_decimal(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn val(v: f64) -> Self {
        BigRational::from_float(v).expect("finite literal")
    }
}

/// Exact decimal parse: `[-]digits[.digits][e[-]digits]`.
fn parse_decimal_rational(text: &str) -> Option<BigRational> {
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{}{}", int_part, frac_part).parse().unwrap_or_default();
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    Some(if neg { -value } else { value })
}

/// `|re| + |im|`, a sqrt-free magnitude usable in exact arithmetic.
pub fn abs1<T: Scalar>(z: &C<T>) -> T {
    z.re.abs() + z.im.abs()
}

pub fn cabs<T: Real>(z: &C<T>) -> T {
    z.norm_sqr().sqrt()
}

pub fn cexp<T: Real>(z: &C<T>) -> C<T> {
    let r = z.re.exp();
    C::new(r.clone() * z.im.cos(), r * z.im.sin())
}

/// `x^s` for real `x > 0`.
pub fn real_powc<T: Real>(x: &T, s: &C<T>) -> C<T> {
    let l = x.ln();
    cexp(&C::new(s.re.clone() * l.clone(), s.im.clone() * l))
}

pub fn cpowi<T: Scalar>(z: &C<T>, n: u32) -> C<T> {
    num_traits::pow(z.clone(), n as usize)
}

/// Principal square root.
pub fn csqrt<T: Real>(z: &C<T>) -> C<T> {
    let r = cabs(z);
    if r.is_zero() {
        return C::zero();
    }
    let half = T::val(0.5);
    let re = ((r.clone() + z.re.clone()) * half.clone()).sqrt();
    let im = ((r - z.re.clone()) * half).sqrt();
    if z.im.is_negative() {
        C::new(re, -im)
    } else {
        C::new(re, im)
    }
}

pub fn factorial<T: Scalar>(n: u32) -> T {
    let head = n.min(20) as u64;
    let start = T::from_u64((1..=head).product()).expect("integer literal");
    (head as i64 + 1..=n as i64).fold(start, |acc, k| acc * T::int(k))
}

pub fn binomial<T: Scalar>(n: u32, k: u32) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    (1..=k as i64).fold(T::one(), |acc, i| acc * T::int(n as i64 - k as i64 + i) / T::int(i))
}

/// `(-1)^n` as a scalar.
pub fn sign_pow<T: Scalar>(n: u32) -> T {
    if n.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}

/// `2^(-k)` computed exactly.
pub fn pow2_neg<T: Scalar>(k: u32) -> T {
    let half = T::val(0.5);
    (0..k).fold(T::one(), |acc, _| acc * half.clone())
}

/// Parses `"0.5"`, `"-0.25+1.5i"`, `"2i"`, `"-i"`, `"1e-3-2e-2i"`.
pub fn parse_complex<T: Scalar>(text: &str) -> Option<C<T>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return T::parse_decimal(&s).map(C::from);
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let (re_text, im_text) = match split {
        Some(p) => (&body[..p], &body[p..]),
        None => ("0", body),
    };
    let im = match im_text {
        "" | "+" => T::one(),
        "-" => -T::one(),
        t => T::parse_decimal(t)?,
    };
    Some(C::new(T::parse_decimal(re_text)?, im))
}

/// Inverse of [`parse_complex`]; real values print without an imaginary part.
pub fn complex_to_text<T: Scalar>(z: &C<T>) -> String {
    if z.im.is_zero() {
        return z.re.to_decimal();
    }
    let im = z.im.to_decimal();
    let sep = if im.starts_with('-') { "" } else { "+" };
    if z.re.is_zero() {
        format!("{}i", im)
    } else {
        format!("{}{}{}i", z.re.to_decimal(), sep, im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_forms() {
        let z: C<f64> = parse_complex("-0.25+1.5i").unwrap();
        assert_eq!(z, C::new(-0.25, 1.5));
        assert_eq!(parse_complex::<f64>("0.5").unwrap(), C::new(0.5, 0.0));
        assert_eq!(parse_complex::<f64>("-i").unwrap(), C::new(0.0, -1.0));
        assert_eq!(parse_complex::<f64>("2i").unwrap(), C::new(0.0, 2.0));
        assert_eq!(parse_complex::<f64>("1e-3-2e-2i").unwrap(), C::new(1e-3, -2e-2));
        assert!(parse_complex::<f64>("abc").is_none());
    }

    #[test]
    fn rational_decimal_is_exact() {
        let r = BigRational::parse_decimal("0.1").unwrap();
        assert_eq!(r, BigRational::new(1.into(), 10.into()));
        let r = BigRational::parse_decimal("-2.5e-1").unwrap();
        assert_eq!(r, BigRational::new((-1).into(), 4.into()));
        assert_eq!(BigRational::parse_decimal("3/6").unwrap().to_decimal(), "1/2");
    }

    #[test]
    fn text_round_trip() {
        for v in [0.1, -3.5e-7, 1.0 / 3.0, 12345.678] {
            let z = C::new(v, -v / 7.0);
            let back: C<f64> = parse_complex(&complex_to_text(&z)).unwrap();
            assert_eq!(back, z);
        }
    }

    #[test]
    fn combinatorics() {
        assert_eq!(factorial::<f64>(5), 120.0);
        assert_eq!(binomial::<f64>(6, 2), 15.0);
        assert_eq!(binomial::<BigRational>(10, 7), BigRational::from_integer(120.into()));
        assert_eq!(pow2_neg::<f64>(3), 0.125);
    }

    #[test]
    fn complex_sqrt_branch() {
        let r = csqrt(&C::new(-4.0, 0.0));
        assert!((r - C::new(0.0, 2.0)).norm() < 1e-15);
        let r = csqrt(&C::new(3.0, -4.0));
        assert!((r - C::new(2.0, -1.0)).norm() < 1e-15);
    }
}
