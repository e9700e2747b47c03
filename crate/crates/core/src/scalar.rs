//! The coefficient field Q(√2).
//!
//! Scalars are pairs a + b√2 with a, b arbitrary-precision rationals. All
//! arithmetic is exact; the rational components are always kept in reduced
//! form with positive denominator (the representation is canonical, so
//! structural equality is field equality).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational number, reduced, with positive denominator.
pub type Rational = BigRational;

/// Builds a rational from machine integers. Panics on a zero denominator;
/// callers own that precondition.
pub fn rational(num: i64, den: i64) -> Rational {
    assert!(den != 0, "rational denominator must be nonzero");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// An element a + b√2 of Q(√2).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QSqrt2 {
    /// Rational part a.
    pub rat: Rational,
    /// Coefficient b of √2.
    pub irr: Rational,
}

impl QSqrt2 {
    pub fn new(rat: Rational, irr: Rational) -> Self {
        QSqrt2 { rat, irr }
    }

    pub fn zero() -> Self {
        QSqrt2::default()
    }

    pub fn one() -> Self {
        QSqrt2::from_int(1)
    }

    /// The generator √2 itself.
    pub fn sqrt2() -> Self {
        QSqrt2::new(Rational::zero(), Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        QSqrt2::new(Rational::from(BigInt::from(n)), Rational::zero())
    }

    pub fn from_rational(r: Rational) -> Self {
        QSqrt2::new(r, Rational::zero())
    }

    /// num/den + (inum/iden)√2 from machine integers, for tests and literals.
    pub fn from_parts(num: i64, den: i64, inum: i64, iden: i64) -> Self {
        QSqrt2::new(rational(num, den), rational(inum, iden))
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_zero()
    }

    /// Galois conjugate a - b√2.
    pub fn conj(&self) -> Self {
        QSqrt2::new(self.rat.clone(), -self.irr.clone())
    }

    /// Field norm a² - 2b², a rational. Zero exactly on the zero element,
    /// since √2 is irrational.
    pub fn norm(&self) -> Rational {
        &self.rat * &self.rat - Rational::from(BigInt::from(2)) * &self.irr * &self.irr
    }

    /// Multiplicative inverse, None for zero: (a - b√2)/(a² - 2b²).
    pub fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        debug_assert!(!n.is_zero(), "norm vanishes only at zero");
        Some(QSqrt2::new(&self.rat / &n, -(&self.irr / &n)))
    }

    pub fn scale_rat(&self, r: &Rational) -> Self {
        QSqrt2::new(&self.rat * r, &self.irr * r)
    }
}

impl From<i64> for QSqrt2 {
    fn from(n: i64) -> Self {
        QSqrt2::from_int(n)
    }
}

impl Add for QSqrt2 {
    type Output = QSqrt2;
    fn add(self, rhs: QSqrt2) -> QSqrt2 {
        QSqrt2::new(self.rat + rhs.rat, self.irr + rhs.irr)
    }
}

impl Add for &QSqrt2 {
    type Output = QSqrt2;
    fn add(self, rhs: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.rat + &rhs.rat, &self.irr + &rhs.irr)
    }
}

impl AddAssign<&QSqrt2> for QSqrt2 {
    fn add_assign(&mut self, rhs: &QSqrt2) {
        self.rat += &rhs.rat;
        self.irr += &rhs.irr;
    }
}

impl Sub for QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, rhs: QSqrt2) -> QSqrt2 {
        QSqrt2::new(self.rat - rhs.rat, self.irr - rhs.irr)
    }
}

impl Sub for &QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, rhs: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.rat - &rhs.rat, &self.irr - &rhs.irr)
    }
}

impl SubAssign<&QSqrt2> for QSqrt2 {
    fn sub_assign(&mut self, rhs: &QSqrt2) {
        self.rat -= &rhs.rat;
        self.irr -= &rhs.irr;
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-self.rat, -self.irr)
    }
}

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-self.rat.clone(), -self.irr.clone())
    }
}

impl Mul for QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, rhs: QSqrt2) -> QSqrt2 {
        &self * &rhs
    }
}

// (a + b√2)(c + d√2) = (ac + 2bd) + (ad + bc)√2
impl Mul for &QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, rhs: &QSqrt2) -> QSqrt2 {
        let two = Rational::from(BigInt::from(2));
        QSqrt2::new(
            &self.rat * &rhs.rat + two * &self.irr * &rhs.irr,
            &self.rat * &rhs.irr + &self.irr * &rhs.rat,
        )
    }
}

impl MulAssign<&QSqrt2> for QSqrt2 {
    fn mul_assign(&mut self, rhs: &QSqrt2) {
        *self = &*self * rhs;
    }
}

/// Division panics on a zero divisor; use [`QSqrt2::checked_inv`] when the
/// divisor is not known to be nonzero.
impl Div for &QSqrt2 {
    type Output = QSqrt2;
    fn div(self, rhs: &QSqrt2) -> QSqrt2 {
        let inv = rhs.checked_inv().expect("division by zero in Q(√2)");
        self * &inv
    }
}

impl Div for QSqrt2 {
    type Output = QSqrt2;
    fn div(self, rhs: QSqrt2) -> QSqrt2 {
        &self / &rhs
    }
}

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if !self.rat.is_zero() {
            fmt_rational(&self.rat, f)?;
            if self.irr.is_zero() {
                return Ok(());
            }
            if self.irr.is_positive() {
                write!(f, "+")?;
            }
        }
        // irrational part
        if self.irr.is_one() {
            write!(f, "√2")
        } else if (-self.irr.clone()).is_one() {
            write!(f, "-√2")
        } else {
            fmt_rational(&self.irr, f)?;
            write!(f, "√2")
        }
    }
}

fn parse_plain_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => {
            let n = BigInt::from_str(s).ok()?;
            Some(BigRational::from(n))
        }
    }
}

/// Strips a √2 suffix, accepting the ASCII spellings too.
fn strip_sqrt2(s: &str) -> Option<&str> {
    s.strip_suffix("√2")
        .or_else(|| s.strip_suffix("sqrt2"))
        .or_else(|| s.strip_suffix("r2"))
}

/// Parses "a/b", "a/b+c/d√2", "c/d√2", "√2", "-√2" and the ASCII suffix
/// spellings "sqrt2" / "r2". Whitespace around tokens is ignored.
impl FromStr for QSqrt2 {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(());
        }
        // split into rational part and √2 part at the last top-level +/-
        // that is not a leading sign
        if let Some(body) = strip_sqrt2(&s) {
            // find the sign separating the two parts, scanning from the right,
            // skipping position 0 (a leading sign belongs to the first part)
            let bytes = body.as_bytes();
            let mut split = None;
            for i in (1..bytes.len()).rev() {
                if bytes[i] == b'+' || bytes[i] == b'-' {
                    // not a sign straight after '/' or another sign
                    let prev = bytes[i - 1];
                    if prev != b'/' && prev != b'+' && prev != b'-' {
                        split = Some(i);
                        break;
                    }
                }
            }
            match split {
                Some(i) => {
                    let rat = parse_plain_rational(&body[..i]).ok_or(())?;
                    let sign = if bytes[i] == b'-' { -1 } else { 1 };
                    let tail = &body[i + 1..];
                    let irr = if tail.is_empty() {
                        Rational::one()
                    } else {
                        parse_plain_rational(tail).ok_or(())?
                    };
                    Ok(QSqrt2::new(rat, irr * BigRational::from(BigInt::from(sign))))
                }
                None => {
                    // pure √2 multiple: "√2", "-√2", "3/4√2"
                    let irr = if body.is_empty() {
                        Rational::one()
                    } else if body == "-" {
                        -Rational::one()
                    } else {
                        parse_plain_rational(body).ok_or(())?
                    };
                    Ok(QSqrt2::new(Rational::zero(), irr))
                }
            }
        } else {
            let rat = parse_plain_rational(&s).ok_or(())?;
            Ok(QSqrt2::from_rational(rat))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct QSqrt2Wire {
    rat: [String; 2],
    irr: [String; 2],
}

/// Serialized as {"rat": [num, den], "irr": [num, den]} with decimal string
/// integers, so arbitrary precision survives any JSON reader.
impl Serialize for QSqrt2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        QSqrt2Wire {
            rat: [self.rat.numer().to_string(), self.rat.denom().to_string()],
            irr: [self.irr.numer().to_string(), self.irr.denom().to_string()],
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QSqrt2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = QSqrt2Wire::deserialize(deserializer)?;
        let part = |p: &[String; 2]| -> Result<Rational, D::Error> {
            let n = BigInt::from_str(&p[0]).map_err(D::Error::custom)?;
            let d = BigInt::from_str(&p[1]).map_err(D::Error::custom)?;
            if d.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            Ok(BigRational::new(n, d))
        };
        Ok(QSqrt2::new(part(&wire.rat)?, part(&wire.irr)?))
    }
}
