//! Extended-precision real arithmetic.
//!
//! [`RealP`] wraps an MPFR float whose precision (in bits) is fixed when the
//! value is created. Every operation rounds to nearest-even, so identical
//! inputs at identical precision give bit-identical results. A binary
//! operation between values of different precision rounds to the smaller of
//! the two precisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Smallest working precision accepted by public entry points.
pub const MIN_PRECISION: u32 = 53;

/// Returns `prec` if it is a usable working precision.
pub fn check_precision(prec: u32) -> Result<u32> {
    if prec < MIN_PRECISION {
        Err(Error::InvalidPrecision(prec))
    } else {
        Ok(prec)
    }
}

/// Number of decimal digits emitted for a value carrying `prec` bits.
pub fn decimal_digits(prec: u32) -> usize {
    (f64::from(prec) * std::f64::consts::LOG10_2).ceil() as usize + 2
}

#[derive(Clone, PartialEq, PartialOrd)]
pub struct RealP(Float);

impl RealP {
    /// Nearest value to the decimal string `s` at `prec` bits.
    pub fn parse(s: &str, prec: u32) -> Result<Self> {
        check_precision(prec)?;
        let err = || Error::Parse {
            input: s.to_string(),
        };
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Err(err());
        }
        let parsed = Float::parse(trimmed).map_err(|_| err())?;
        let value = Float::with_val(prec, parsed);
        if !value.is_finite() {
            return Err(err());
        }
        Ok(RealP(value))
    }

    pub fn from_int(v: i64, prec: u32) -> Self {
        RealP(Float::with_val(prec, v))
    }

    /// Exact conversion of a binary64 value, rounded to `prec` if needed.
    pub fn from_f64(v: f64, prec: u32) -> Self {
        RealP(Float::with_val(prec, v))
    }

    pub fn zero(prec: u32) -> Self {
        RealP(Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    pub fn pi(prec: u32) -> Self {
        RealP(Float::with_val(prec, Constant::Pi))
    }

    /// `2^exp` exactly.
    pub fn pow2(exp: i32, prec: u32) -> Self {
        let mut f = Float::with_val(prec, 1);
        f <<= exp;
        RealP(f)
    }

    pub fn from_float(f: Float) -> Self {
        RealP(f)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// The same value rounded to `prec` bits (exact when widening).
    pub fn with_prec(&self, prec: u32) -> Self {
        RealP(Float::with_val(prec, &self.0))
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.0.is_sign_negative() && !self.0.is_zero() {
            return Err(Error::NegativeOperand(self.to_decimal()));
        }
        Ok(RealP(Float::with_val(self.prec(), self.0.sqrt_ref())))
    }

    pub fn abs(&self) -> Self {
        RealP(Float::with_val(self.prec(), self.0.abs_ref()))
    }

    pub fn exp(&self) -> Self {
        RealP(Float::with_val(self.prec(), self.0.exp_ref()))
    }

    pub fn ln(&self) -> Self {
        RealP(Float::with_val(self.prec(), self.0.ln_ref()))
    }

    pub fn gamma(&self) -> Self {
        RealP(Float::with_val(self.prec(), self.0.gamma_ref()))
    }

    pub fn sinh(&self) -> Self {
        RealP(Float::with_val(self.prec(), self.0.sinh_ref()))
    }

    pub fn cosh(&self) -> Self {
        RealP(Float::with_val(self.prec(), self.0.cosh_ref()))
    }

    /// `self^e` for a real exponent (self must be nonnegative).
    pub fn pow(&self, e: &RealP) -> Self {
        let prec = self.prec().min(e.prec());
        RealP(Float::with_val(prec, (&self.0).pow(&e.0)))
    }

    pub fn powi(&self, e: i32) -> Self {
        RealP(Float::with_val(self.prec(), (&self.0).pow(e)))
    }

    pub fn square(&self) -> Self {
        RealP(Float::with_val(self.prec(), self.0.square_ref()))
    }

    pub fn recip(&self) -> Self {
        RealP(Float::with_val(self.prec(), self.0.recip_ref()))
    }

    pub fn max(&self, other: &RealP) -> Self {
        if other > self {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn min(&self, other: &RealP) -> Self {
        if other < self {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Strictly greater than zero.
    pub fn is_positive(&self) -> bool {
        self.0.cmp0() == Some(Ordering::Greater)
    }

    /// Strictly less than zero.
    pub fn is_negative(&self) -> bool {
        self.0.cmp0() == Some(Ordering::Less)
    }

    /// Unit in the last place of `self` at its own precision.
    ///
    /// For zero this is the smallest positive value of the exponent range,
    /// which is never what callers want; they should special-case zero.
    pub fn ulp(&self) -> RealP {
        match self.0.get_exp() {
            Some(e) => Self::pow2(e - self.prec() as i32, self.prec()),
            None => Self::pow2(rug::float::exp_min() - 1, self.prec()),
        }
    }

    /// `|self - other|` measured in units of `self.ulp()`.
    pub fn ulps_from(&self, other: &RealP) -> f64 {
        let diff = (self - other).abs();
        if diff.is_zero() {
            return 0.0;
        }
        let unit = if self.is_zero() { other.ulp() } else { self.ulp() };
        (&diff / &unit).to_f64()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Base-2 logarithm of `|self|` as a binary64 (`-inf` for zero).
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let e = self.0.get_exp().unwrap_or(0);
        let mant = Float::with_val(53, &self.0 >> e).to_f64().abs();
        f64::from(e) + mant.log2()
    }

    /// Decimal rendering with `⌈P·log10 2⌉ + 2` significant digits.
    pub fn to_decimal(&self) -> String {
        self.0.to_string_radix(10, Some(decimal_digits(self.prec())))
    }
}

impl fmt::Display for RealP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl fmt::Debug for RealP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealP[{}]({})", self.prec(), self.to_decimal())
    }
}

impl Serialize for RealP {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_decimal())
    }
}

impl PartialEq<i32> for RealP {
    fn eq(&self, other: &i32) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<i32> for RealP {
    fn partial_cmp(&self, other: &i32) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&RealP> for &RealP {
            type Output = RealP;
            fn $method(self, rhs: &RealP) -> RealP {
                let prec = self.prec().min(rhs.prec());
                RealP(Float::with_val(prec, (&self.0).$method(&rhs.0)))
            }
        }
        impl $trait<RealP> for RealP {
            type Output = RealP;
            fn $method(self, rhs: RealP) -> RealP {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&RealP> for RealP {
            type Output = RealP;
            fn $method(self, rhs: &RealP) -> RealP {
                (&self).$method(rhs)
            }
        }
        impl $trait<RealP> for &RealP {
            type Output = RealP;
            fn $method(self, rhs: RealP) -> RealP {
                self.$method(&rhs)
            }
        }
        impl $trait<i32> for &RealP {
            type Output = RealP;
            fn $method(self, rhs: i32) -> RealP {
                RealP(Float::with_val(self.prec(), (&self.0).$method(rhs)))
            }
        }
        impl $trait<i32> for RealP {
            type Output = RealP;
            fn $method(self, rhs: i32) -> RealP {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for RealP {
    type Output = RealP;
    fn neg(self) -> RealP {
        RealP(-self.0)
    }
}

impl Neg for &RealP {
    type Output = RealP;
    fn neg(self) -> RealP {
        RealP(Float::with_val(self.prec(), -&self.0))
    }
}

/// `Γ(num/den)` at `prec` bits, evaluated with 16 guard bits.
pub fn gamma_rational(num: i64, den: i64, prec: u32) -> RealP {
    let arg = RealP::from_int(num, prec + 16) / RealP::from_int(den, prec + 16);
    arg.gamma().with_prec(prec)
}
