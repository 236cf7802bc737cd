//! Coefficient fields.
//!
//! The symbolic pipeline is generic over a [`Scalar`]. Exact work uses
//! [`Rat`] (arbitrary precision rationals); algebras with irrational
//! structure constants run in a checked floating mode over `f64`.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Rat = BigRational;

/// Magnitude below which an `f64` coefficient is treated as cancellation noise.
pub const F64_NOISE_FLOOR: f64 = 1e-12;

pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + 'static {
    /// True for fields where equality is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_rat(r: &Rat) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Panics on division by zero.
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Canonical text: `p/q` for rationals, shortest round-trip form for floats.
    fn text(&self) -> String;

    fn ratio(n: i64, d: i64) -> Self {
        Self::from_i64(n).div(&Self::from_i64(d))
    }

    fn is_one(&self) -> bool {
        self.sub(&Self::one()).is_zero()
    }

    fn is_negative(&self) -> bool {
        self.to_f64() < 0.0
    }

    /// Rescales a sparse row in place so that elimination stays well behaved.
    ///
    /// Rationals become coprime integers with a positive leading entry;
    /// floats are divided by the leading entry and scrubbed of noise.
    fn normalize_row(row: &mut Vec<(usize, Self)>);

    /// Drop threshold used by sparse elimination.
    fn negligible(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(n: i64) -> Self {
        Rat::from_integer(BigInt::from(n))
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn text(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn normalize_row(row: &mut Vec<(usize, Self)>) {
        row.retain(|(_, v)| !Zero::is_zero(v));
        if row.is_empty() {
            return;
        }
        let mut lcm = BigInt::one();
        for (_, v) in row.iter() {
            lcm = lcm.lcm(v.denom());
        }
        let mut g = BigInt::zero();
        for (_, v) in row.iter() {
            let n = v.numer() * (&lcm / v.denom());
            g = g.gcd(&n);
        }
        if Signed::is_negative(&row[0].1) {
            g = -g;
        }
        let scale = Rat::new(lcm, g);
        for (_, v) in row.iter_mut() {
            *v = &*v * &scale;
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_rat(r: &Rat) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        self.abs() <= F64_NOISE_FLOOR
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        assert!(*other != 0.0, "division by zero");
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn text(&self) -> String {
        format!("{self:?}")
    }

    fn normalize_row(row: &mut Vec<(usize, Self)>) {
        let scale = row.iter().fold(1.0f64, |m, (_, v)| m.max(v.abs()));
        row.retain(|(_, v)| v.abs() > 1e-9 * scale);
        if let Some(&(_, lead)) = row.first() {
            for (_, v) in row.iter_mut() {
                *v /= lead;
            }
        }
    }

    fn negligible(&self) -> bool {
        self.abs() <= 1e-9
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-0.25"` exactly.
pub fn parse_rational(text: &str) -> Result<Rat, Error> {
    let t = text.trim();
    let bad = || Error::Parse(format!("invalid rational {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac);
        let mut n = BigInt::from_str(&digits).map_err(|_| bad())?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rat::new(n, d));
    }
    BigInt::from_str(t).map(Rat::from_integer).map_err(|_| bad())
}

/// Converts a rational to the coefficient field.
pub fn rat<S: Scalar>(n: i64, d: i64) -> S {
    S::ratio(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), Rat::new(1.into(), 2.into()));
        assert_eq!(parse_rational("-7").unwrap(), Rat::from_i64(-7));
        assert_eq!(parse_rational("-0.25").unwrap(), Rat::new((-1).into(), 4.into()));
        assert_eq!(parse_rational(".5").unwrap(), Rat::new(1.into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn rational_text() {
        assert_eq!(Rat::ratio(-3, 4).text(), "-3/4");
        assert_eq!(Rat::from_i64(5).text(), "5");
    }

    #[test]
    fn normalize_rational_row_to_coprime_integers() {
        let mut row = vec![(0, Rat::ratio(-1, 2)), (3, Rat::ratio(3, 4)), (5, Rat::from_i64(0))];
        Rat::normalize_row(&mut row);
        assert_eq!(row, vec![(0, Rat::from_i64(2)), (3, Rat::from_i64(-3))]);
    }

    #[test]
    fn normalize_float_row_divides_by_lead() {
        let mut row = vec![(1, 2.0), (2, 1e-14), (4, -1.0)];
        f64::normalize_row(&mut row);
        assert_eq!(row, vec![(1, 1.0), (4, -0.5)]);
    }
}
