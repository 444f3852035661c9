//! Fixed-precision binary floats backed by MPFR.
//!
//! The precision is a const parameter, so constants produced through
//! `Zero`/`One`/`FromPrimitive` carry the right mantissa width without any
//! runtime context.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use rug::float::Constant;
use rug::Float;

use crate::scalar::{Real, Scalar};

/// Binary float with `BITS` mantissa bits.
#[derive(Clone, PartialEq)]
pub struct Mp<const BITS: u32>(Float);

impl<const BITS: u32> Mp<BITS> {
    fn wrap<V>(v: V) -> Self
    where
        Float: rug::Assign<V>,
    {
        Mp(Float::with_val(BITS, v))
    }

    pub fn inner(&self) -> &Float {
        &self.0
    }
}

impl<const BITS: u32> fmt::Debug for Mp<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal())
    }
}

impl<const BITS: u32> fmt::Display for Mp<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal())
    }
}

impl<const BITS: u32> PartialOrd for Mp<BITS> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl<const BITS: u32> $tr for Mp<BITS> {
            type Output = Self;
            fn $m(self, rhs: Self) -> Self {
                Mp(self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl<const BITS: u32> Rem for Mp<BITS> {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        let q = Float::with_val(BITS, &self.0 / &rhs.0).trunc();
        Mp(self.0 - q * rhs.0)
    }
}

impl<const BITS: u32> Neg for Mp<BITS> {
    type Output = Self;
    fn neg(self) -> Self {
        Mp(-self.0)
    }
}

impl<const BITS: u32> Zero for Mp<BITS> {
    fn zero() -> Self {
        Self::wrap(0)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl<const BITS: u32> One for Mp<BITS> {
    fn one() -> Self {
        Self::wrap(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseMpError;

impl fmt::Display for ParseMpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid float literal")
    }
}

impl std::error::Error for ParseMpError {}

impl<const BITS: u32> Num for Mp<BITS> {
    type FromStrRadixErr = ParseMpError;

    fn from_str_radix(text: &str, radix: u32) -> Result<Self, ParseMpError> {
        Float::parse_radix(text, radix as i32)
            .map(Self::wrap)
            .map_err(|_| ParseMpError)
    }
}

impl<const BITS: u32> Signed for Mp<BITS> {
    fn abs(&self) -> Self {
        Mp(self.0.clone().abs())
    }
    fn abs_sub(&self, other: &Self) -> Self {
        if self <= other {
            Self::zero()
        } else {
            self.clone() - other.clone()
        }
    }
    fn signum(&self) -> Self {
        if self.0.is_zero() {
            Self::zero()
        } else if self.0.is_sign_negative() {
            -Self::one()
        } else {
            Self::one()
        }
    }
    fn is_positive(&self) -> bool {
        !self.0.is_zero() && self.0.is_sign_positive()
    }
    fn is_negative(&self) -> bool {
        !self.0.is_zero() && self.0.is_sign_negative()
    }
}

impl<const BITS: u32> FromPrimitive for Mp<BITS> {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Self::wrap(n))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Self::wrap(n))
    }
    fn from_f64(n: f64) -> Option<Self> {
        n.is_finite().then(|| Self::wrap(n))
    }
}

impl<const BITS: u32> ToPrimitive for Mp<BITS> {
    fn to_i64(&self) -> Option<i64> {
        self.0.to_i32_saturating().map(i64::from)
    }
    fn to_u64(&self) -> Option<u64> {
        self.0.to_u32_saturating().map(u64::from)
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.0.to_f64())
    }
}

impl<const BITS: u32> Scalar for Mp<BITS> {
    fn bits() -> Option<u32> {
        Some(BITS)
    }

    fn epsilon() -> Self {
        Mp(Float::with_val(BITS, 1) >> (BITS - 1))
    }

    fn parse_decimal(text: &str) -> Option<Self> {
        Float::parse(text.trim()).ok().map(Self::wrap)
    }

    fn to_decimal(&self) -> String {
        let digits = (BITS / 3) as usize;
        self.0.to_string_radix(10, Some(digits))
    }
}

impl<const BITS: u32> Real for Mp<BITS> {
    fn sqrt(&self) -> Self {
        Mp(self.0.clone().sqrt())
    }
    fn ln(&self) -> Self {
        Mp(self.0.clone().ln())
    }
    fn exp(&self) -> Self {
        Mp(self.0.clone().exp())
    }
    fn sin(&self) -> Self {
        Mp(self.0.clone().sin())
    }
    fn cos(&self) -> Self {
        Mp(self.0.clone().cos())
    }
    fn pi() -> Self {
        Self::wrap(Constant::Pi)
    }
}
