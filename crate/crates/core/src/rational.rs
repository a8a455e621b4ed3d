//! Exact rational quantities.
//!
//! Every capacity, demand, rate, cost and latency is held as an exact
//! rational so that planner totals and validator totals can be compared
//! bit-for-bit. Decimal text is the only external representation.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Maximum number of fractional digits written by [`Q::to_decimal`].
pub const DECIMAL_DIGITS: u32 = 6;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Q(Ratio<i128>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid number `{0}`")]
pub struct ParseQError(pub String);

impl Q {
    pub const ZERO: Q = Q(Ratio::new_raw(0, 1));
    pub const ONE: Q = Q(Ratio::new_raw(1, 1));

    pub fn new(numer: i128, denom: i128) -> Q {
        assert!(denom != 0, "zero denominator");
        Q(Ratio::new(numer, denom))
    }

    pub fn int(v: i64) -> Q {
        Q(Ratio::from_integer(v as i128))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn recip(&self) -> Q {
        Q(self.0.recip())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact conversion of a finite float through its shortest decimal form,
    /// so `0.1_f64` becomes exactly 1/10.
    pub fn from_f64_decimal(v: f64) -> Option<Q> {
        if !v.is_finite() {
            return None;
        }
        format!("{v}").parse().ok()
    }

    /// Decimal text with at most six fractional digits, trailing zeros
    /// trimmed, rounded half away from zero.
    pub fn to_decimal(&self) -> String {
        let scale = 10i128.pow(DECIMAL_DIGITS);
        let n = self.numer();
        let d = self.denom();
        let neg = n < 0;
        let n = n.unsigned_abs();
        let d = d.unsigned_abs();
        let scaled = n * scale as u128;
        let mut q = scaled / d;
        let r = scaled % d;
        if r * 2 >= d {
            q += 1;
        }
        let int_part = q / scale as u128;
        let mut frac = format!("{:0width$}", q % scale as u128, width = DECIMAL_DIGITS as usize);
        while frac.ends_with('0') {
            frac.pop();
        }
        let sign = if neg && q != 0 { "-" } else { "" };
        if frac.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac}")
        }
    }
}

impl From<i64> for Q {
    fn from(v: i64) -> Q {
        Q::int(v)
    }
}

impl FromStr for Q {
    type Err = ParseQError;

    /// Accepts `12`, `-0.25`, `1.5e3`, `2.5E-3` and `1/3`.
    fn from_str(s: &str) -> Result<Q, ParseQError> {
        let err = || ParseQError(s.to_string());
        let t = s.trim();
        if let Some((a, b)) = t.split_once('/') {
            let a: Q = a.parse().map_err(|_| err())?;
            let b: Q = b.parse().map_err(|_| err())?;
            if b.is_zero() {
                return Err(err());
            }
            return Ok(a / b);
        }
        let (mantissa, exp) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
            None => (t, 0),
        };
        let (neg, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (ip, fp) = digits.split_once('.').unwrap_or((digits, ""));
        if ip.is_empty() && fp.is_empty() {
            return Err(err());
        }
        if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        if ip.len() + fp.len() > 30 || exp.abs() > 30 {
            return Err(err());
        }
        let all = format!("{ip}{fp}");
        let mut numer: i128 = if all.is_empty() { 0 } else { all.parse().map_err(|_| err())? };
        if neg {
            numer = -numer;
        }
        let mut value = Ratio::new(numer, 10i128.pow(fp.len() as u32));
        if exp > 0 {
            value *= Ratio::from_integer(10i128.pow(exp as u32));
        } else if exp < 0 {
            value /= Ratio::from_integer(10i128.pow((-exp) as u32));
        }
        Ok(Q(value))
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident, $cm:ident) => {
        impl $tr for Q {
            type Output = Q;
            fn $method(self, rhs: Q) -> Q {
                Q(checked(self.0, rhs.0, |a, b| num_traits::$checked::$cm(&a, &b)))
            }
        }
    };
}

fn checked(
    a: Ratio<i128>,
    b: Ratio<i128>,
    op: impl Fn(Ratio<i128>, Ratio<i128>) -> Option<Ratio<i128>>,
) -> Ratio<i128> {
    op(a, b).expect("rational overflow: quantities exceed i128 range")
}

binop!(Add, add, CheckedAdd, checked_add);
binop!(Sub, sub, CheckedSub, checked_sub);
binop!(Mul, mul, CheckedMul, checked_mul);
binop!(Div, div, CheckedDiv, checked_div);

impl AddAssign for Q {
    fn add_assign(&mut self, rhs: Q) {
        *self = *self + rhs;
    }
}

impl SubAssign for Q {
    fn sub_assign(&mut self, rhs: Q) {
        *self = *self - rhs;
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q(-self.0)
    }
}

impl Sum for Q {
    fn sum<I: Iterator<Item = Q>>(iter: I) -> Q {
        iter.fold(Q::ZERO, |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    #[test]
    fn parses_decimal_forms() {
        assert_eq!(q("0.1"), Q::new(1, 10));
        assert_eq!(q("-2.50"), Q::new(-5, 2));
        assert_eq!(q("1.5e3"), Q::int(1500));
        assert_eq!(q("5E-3"), Q::new(1, 200));
        assert_eq!(q("1/3"), Q::new(1, 3));
        assert_eq!(q(".5"), Q::new(1, 2));
        assert!("abc".parse::<Q>().is_err());
        assert!("1/0".parse::<Q>().is_err());
        assert!("".parse::<Q>().is_err());
    }

    #[test]
    fn decimal_rendering_trims_and_rounds() {
        assert_eq!(Q::int(5).to_decimal(), "5");
        assert_eq!(Q::new(1, 4).to_decimal(), "0.25");
        assert_eq!(Q::new(1, 3).to_decimal(), "0.333333");
        assert_eq!(Q::new(2, 3).to_decimal(), "0.666667");
        assert_eq!(Q::new(-1, 8).to_decimal(), "-0.125");
        assert_eq!(Q::new(1, 10_000_000).to_decimal(), "0");
        assert_eq!(Q::new(-1, 10_000_000).to_decimal(), "0");
    }

    #[test]
    fn float_conversion_is_exact_on_short_decimals() {
        assert_eq!(Q::from_f64_decimal(0.1), Some(Q::new(1, 10)));
        assert_eq!(Q::from_f64_decimal(1e-4), Some(Q::new(1, 10_000)));
        assert_eq!(Q::from_f64_decimal(f64::NAN), None);
    }

    proptest! {
        #[test]
        fn rendered_decimal_reparses_to_a_fixed_point(n in -1_000_000i64..1_000_000, d in 1i64..10_000) {
            let v = Q::new(n as i128, d as i128);
            let once = v.to_decimal();
            let back: Q = once.parse().unwrap();
            prop_assert_eq!(back.to_decimal(), once);
        }
    }
}
