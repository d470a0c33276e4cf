use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact scalar: arbitrary-precision rational.
pub type Exact = BigRational;

/// Approximate scalar: double-precision complex.
pub type Approx = Complex64;

/// Default tolerance for approximate-mode equality.
pub const DEFAULT_EPS: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse scalar from {0:?}")]
pub struct ParseScalarError(pub String);

/// Field element used throughout the library.
///
/// Two implementations exist: [`Exact`] where equality is decidable and
/// every identity is checked with zero tolerance, and [`Approx`] where
/// residuals are compared against a caller-supplied epsilon.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + AddAssign
    + SubAssign
    + for<'a> AddAssign<&'a Self>
    + 'static
{
    /// True for the rational field.
    const EXACT: bool;

    fn from_i64(n: i64) -> Self;

    fn from_bigint(n: &BigInt) -> Self;

    fn from_rational(r: &BigRational) -> Self;

    /// Absolute value as a float, used for residual reporting and pivoting.
    fn magnitude(&self) -> f64;

    /// Zero test: literal in exact mode, `|x| < eps` in approximate mode.
    fn is_negligible(&self, eps: f64) -> bool;

    /// Canonical textual form: lowest-terms `a/b` (or `a`) for rationals,
    /// 17 significant digits for floats.
    fn to_canonical(&self) -> String;

    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError>;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn close_to(&self, other: &Self, eps: f64) -> bool {
        (self.clone() - other).is_negligible(eps)
    }

    /// Integer power by repeated squaring.
    fn powi(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn is_negligible(&self, _eps: f64) -> bool {
        self.is_zero()
    }

    fn to_canonical(&self) -> String {
        // Ratio keeps itself reduced with a positive denominator and
        // prints integers without the `/1`.
        self.to_string()
    }

    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError> {
        let t = s.trim();
        if let Ok(r) = BigRational::from_str(t) {
            return Ok(r);
        }
        parse_decimal(t).ok_or_else(|| ParseScalarError(s.to_string()))
    }
}

/// Decimal literal such as `-0.125` or `3e-2`, read exactly.
fn parse_decimal(t: &str) -> Option<BigRational> {
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(&all).ok()?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(r)
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn from_bigint(n: &BigInt) -> Self {
        Complex64::new(n.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn is_negligible(&self, eps: f64) -> bool {
        self.norm() < eps
    }

    fn to_canonical(&self) -> String {
        if self.im == 0.0 {
            format!("{:.16e}", self.re)
        } else {
            format!("{:.16e}{:+.16e}i", self.re, self.im)
        }
    }

    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError> {
        let t = s.trim();
        let err = || ParseScalarError(s.to_string());
        if let Some(body) = t.strip_suffix('i') {
            // split at the sign that starts the imaginary part
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&k| {
                    (bytes[k] == b'+' || bytes[k] == b'-')
                        && !matches!(bytes[k - 1], b'e' | b'E')
                })
                .ok_or_else(err)?;
            let re = parse_real(&body[..split]).ok_or_else(err)?;
            let im = parse_real(&body[split..]).ok_or_else(err)?;
            return Ok(Complex64::new(re, im));
        }
        parse_real(t).map(|re| Complex64::new(re, 0.0)).ok_or_else(err)
    }
}

fn parse_real(t: &str) -> Option<f64> {
    if let Ok(x) = t.parse::<f64>() {
        return Some(x);
    }
    BigRational::from_str(t).ok().and_then(|r| r.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Exact {
        Exact::parse_scalar(s).unwrap()
    }

    #[test]
    fn rationals_print_in_lowest_terms() {
        assert_eq!(q("2/4").to_canonical(), "1/2");
        assert_eq!(q("6/-4").to_canonical(), "-3/2");
        assert_eq!(q("4/2").to_canonical(), "2");
        assert_eq!(q("0/7").to_canonical(), "0");
    }

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(q("0.25"), Exact::from_ratio(1, 4));
        assert_eq!(q("-1.5e1"), Exact::from_i64(-15));
        assert_eq!(q("3e-2"), Exact::from_ratio(3, 100));
        assert!(Exact::parse_scalar("abc").is_err());
        assert!(Exact::parse_scalar(".").is_err());
    }

    #[test]
    fn complex_round_trip() {
        let z = Complex64::new(0.1, -2.5e-3);
        let s = z.to_canonical();
        assert_eq!(Approx::parse_scalar(&s).unwrap(), z);
        let x = Complex64::new(1.0 / 3.0, 0.0);
        assert_eq!(Approx::parse_scalar(&x.to_canonical()).unwrap(), x);
        assert_eq!(Approx::parse_scalar("1/4").unwrap(), Complex64::new(0.25, 0.0));
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = Exact::from_ratio(-2, 3);
        assert_eq!(x.powi(0), Exact::one());
        assert_eq!(x.powi(5), x.clone() * &x * &x * &x * &x);
    }

    #[test]
    fn exact_zero_ignores_eps() {
        assert!(!Exact::from_ratio(1, 1_000_000_000_000).is_negligible(1.0));
        assert!(Approx::new(1e-12, 0.0).is_negligible(DEFAULT_EPS));
    }
}
