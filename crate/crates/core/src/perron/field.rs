//! Exact arithmetic in `Q(beta)`, represented as residue polynomials modulo
//! the minimal polynomial of `beta`.
//!
//! Sign and ordering queries evaluate the residue polynomial on a rational
//! isolating interval for `beta`, refining the interval until the answer is
//! decided. Exact zero is decided by the residue polynomial itself, so the
//! refinement loop always terminates.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, RwLock};

use num::traits::{One, Signed, Zero};
use num::{BigInt, BigRational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::poly::{bisect_root, q, sign, Poly, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different number fields")]
    FieldMismatch,
    #[error("coefficient vector has length {got}, field degree is {degree}")]
    BadLength { got: usize, degree: usize },
    #[error("cannot parse rational `{0}`")]
    BadRational(String),
}

/// One refinement level of the isolating interval, with cached powers.
#[derive(Debug)]
struct Level {
    lo_pows: Vec<Q>,
    hi_pows: Vec<Q>,
}

impl Level {
    fn new(lo: &Q, hi: &Q, degree: usize) -> Self {
        let pows = |x: &Q| {
            let mut v = Vec::with_capacity(degree);
            let mut acc = Q::one();
            for _ in 0..degree {
                v.push(acc.clone());
                acc *= x;
            }
            v
        };
        Level { lo_pows: pows(lo), hi_pows: pows(hi) }
    }

    fn lo(&self) -> Q {
        self.lo_pows.get(1).cloned().unwrap_or_else(Q::one)
    }

    fn hi(&self) -> Q {
        self.hi_pows.get(1).cloned().unwrap_or_else(Q::one)
    }
}

/// The field `Q(beta) = Q[x]/(m)` with `beta > 0` the root of `m` isolated
/// by the stored interval.
#[derive(Debug)]
pub struct NumberField {
    min_poly: Poly,
    min_poly_int: Vec<BigInt>,
    degree: usize,
    /// Rational root, when the minimal polynomial is linear.
    rational_root: Option<Q>,
    level: RwLock<Arc<Level>>,
}

impl NumberField {
    /// `min_poly` must be monic, irreducible and have exactly one root in
    /// `(lo, hi]`, with `lo > 0`.
    pub fn new(min_poly_int: Vec<BigInt>, lo: Q, hi: Q) -> Arc<Self> {
        let min_poly = Poly::from_ints(&min_poly_int);
        let degree = min_poly.degree().expect("nonzero minimal polynomial");
        assert!(degree >= 1);
        let rational_root = (degree == 1).then(|| -min_poly.coeffs()[0].clone() / min_poly.coeffs()[1].clone());
        let (lo, hi) = match &rational_root {
            Some(r) => (r.clone(), r.clone()),
            None => (lo, hi),
        };
        let level = Level::new(&lo, &hi, degree.max(2));
        Arc::new(NumberField {
            min_poly,
            min_poly_int,
            degree,
            rational_root,
            level: RwLock::new(Arc::new(level)),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Integer coefficients of the minimal polynomial, low degree first.
    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly_int
    }

    /// Current isolating interval `(lo, hi]`.
    pub fn interval(&self) -> (Q, Q) {
        let level = self.level.read().unwrap().clone();
        (level.lo(), level.hi())
    }

    fn current(&self) -> Arc<Level> {
        self.level.read().unwrap().clone()
    }

    /// Narrows the interval to at most half the width of `seen`, unless
    /// another caller already did.
    fn refine_past(&self, seen: &Arc<Level>) {
        let mut guard = self.level.write().unwrap();
        if !Arc::ptr_eq(&guard, seen) {
            return;
        }
        let (mut lo, mut hi) = (guard.lo(), guard.hi());
        // 16 halvings per round keeps rational sizes modest.
        for _ in 0..16 {
            let (a, b) = bisect_root(&self.min_poly, &lo, &hi);
            lo = a;
            hi = b;
        }
        *guard = Arc::new(Level::new(&lo, &hi, self.degree.max(2)));
    }

    /// Rational enclosure of `a(beta)` on the given level.
    fn enclose(&self, coeffs: &[Q], level: &Level) -> (Q, Q) {
        let (mut lo, mut hi) = (Q::zero(), Q::zero());
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let a = c * &level.lo_pows[k];
            let b = c * &level.hi_pows[k];
            if c.is_positive() {
                lo += a;
                hi += b;
            } else {
                lo += b;
                hi += a;
            }
        }
        (lo, hi)
    }

    fn reduce(&self, p: Poly) -> Vec<Q> {
        let r = p.rem(&self.min_poly);
        let mut v = r.coeffs().to_vec();
        v.resize(self.degree, Q::zero());
        v
    }
}

/// An element of `Q(beta)`.
#[derive(Clone)]
pub struct AlgebraicNumber {
    field: Arc<NumberField>,
    coeffs: Vec<Q>,
}

/// JSON form: `{"poly":["-1","1"], "approx":"0.618033988750"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraicJson {
    pub poly: Vec<String>,
    pub approx: String,
}

impl AlgebraicNumber {
    pub fn from_coeffs(field: &Arc<NumberField>, coeffs: Vec<Q>) -> Result<Self, FieldError> {
        if coeffs.len() > field.degree {
            // Accept longer inputs as polynomials in beta and reduce them.
            let v = field.reduce(Poly::new(coeffs));
            return Ok(AlgebraicNumber { field: field.clone(), coeffs: v });
        }
        let mut coeffs = coeffs;
        coeffs.resize(field.degree, Q::zero());
        Ok(AlgebraicNumber { field: field.clone(), coeffs })
    }

    pub fn rational(field: &Arc<NumberField>, r: Q) -> Self {
        let mut coeffs = vec![Q::zero(); field.degree];
        coeffs[0] = r;
        AlgebraicNumber { field: field.clone(), coeffs }
    }

    pub fn integer(field: &Arc<NumberField>, n: i64) -> Self {
        Self::rational(field, q(n))
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self::integer(field, 0)
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::integer(field, 1)
    }

    /// The generator `beta`.
    pub fn beta(field: &Arc<NumberField>) -> Self {
        AlgebraicNumber { field: field.clone(), coeffs: field.reduce(Poly::new(vec![q(0), q(1)])) }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    /// Residue coefficients, low degree first, length = field degree.
    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    fn same_field(&self, other: &Self) {
        assert!(Arc::ptr_eq(&self.field, &other.field), "operands from different number fields");
    }

    fn with(&self, coeffs: Vec<Q>) -> Self {
        AlgebraicNumber { field: self.field.clone(), coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn inverse(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let (g, s) = Poly::new(self.coeffs.clone()).inverse_mod(&self.field.min_poly);
        assert_eq!(g.degree(), Some(0), "minimal polynomial is not irreducible");
        Ok(self.with(self.field.reduce(s)))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other);
        Ok(self * &other.inverse()?)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, k: i64) -> Result<Self, FieldError> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = AlgebraicNumber::one(&self.field);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Sign of the real number `a(beta)`.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        if self.is_rational() {
            return sign(&self.coeffs[0]);
        }
        if let Some(r) = &self.field.rational_root {
            return sign(&Poly::new(self.coeffs.clone()).eval(r));
        }
        loop {
            let level = self.field.current();
            let (lo, hi) = self.field.enclose(&self.coeffs, &level);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            self.field.refine_past(&level);
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn exact_cmp(&self, other: &Self) -> Ordering {
        match (self - other).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// Rational enclosure `[lo, hi]` of width at most `width`.
    pub fn enclosure(&self, width: &Q) -> (Q, Q) {
        if self.is_rational() {
            return (self.coeffs[0].clone(), self.coeffs[0].clone());
        }
        if let Some(r) = &self.field.rational_root {
            let v = Poly::new(self.coeffs.clone()).eval(r);
            return (v.clone(), v);
        }
        loop {
            let level = self.field.current();
            let (lo, hi) = self.field.enclose(&self.coeffs, &level);
            if &(&hi - &lo) <= width {
                return (lo, hi);
            }
            self.field.refine_past(&level);
        }
    }

    /// Correctly rounded decimal with `digits` fractional digits; exact ties
    /// (possible only for rationals) round away from zero.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = Q::from_integer(BigInt::from(10).pow(digits as u32));
        let half = Q::new(BigInt::one(), BigInt::from(2));
        let round = |x: &Q| -> BigInt {
            if x.is_negative() {
                -((-x) + &half).floor().to_integer()
            } else {
                (x + &half).floor().to_integer()
            }
        };
        let mut width = Q::new(BigInt::one(), BigInt::from(10).pow(digits as u32 + 2));
        let n = loop {
            let (lo, hi) = self.enclosure(&width);
            let (a, b) = (round(&(&lo * &scale)), round(&(&hi * &scale)));
            if a == b {
                break a;
            }
            width /= q(1 << 16);
        };
        format_scaled(&n, digits)
    }

    pub fn to_f64(&self) -> f64 {
        use num::ToPrimitive;
        let (lo, hi) = self.enclosure(&Q::new(BigInt::one(), BigInt::from(1u64 << 60)));
        ((lo + hi) / q(2)).to_f64().unwrap_or(f64::NAN)
    }

    /// Coefficients as strings: `"-1"`, `"1/2"`.
    pub fn poly_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    pub fn to_json(&self, digits: usize) -> AlgebraicJson {
        AlgebraicJson { poly: self.poly_strings(), approx: self.to_decimal(digits) }
    }

    /// Parses a coefficient list such as `["-1","1"]`.
    pub fn from_strings(field: &Arc<NumberField>, poly: &[String]) -> Result<Self, FieldError> {
        let coeffs = poly.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
        Self::from_coeffs(field, coeffs)
    }
}

pub fn parse_rational(s: &str) -> Result<Q, FieldError> {
    let bad = || FieldError::BadRational(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => {
            if let Some((int, frac)) = s.split_once('.') {
                let negative = int.starts_with('-');
                let int_part: BigInt = if int.is_empty() || int == "-" { BigInt::zero() } else { int.parse().map_err(|_| bad())? };
                let frac_digits: BigInt = if frac.is_empty() { BigInt::zero() } else { frac.parse().map_err(|_| bad())? };
                let den = BigInt::from(10).pow(frac.len() as u32);
                let frac_q = Q::new(frac_digits, den);
                let int_q = Q::from_integer(int_part);
                Ok(if negative { int_q - frac_q } else { int_q + frac_q })
            } else {
                Ok(Q::from_integer(s.parse().map_err(|_| bad())?))
            }
        }
    }
}

fn format_scaled(n: &BigInt, digits: usize) -> String {
    let negative = n.is_negative();
    let s = n.abs().to_string();
    let body = if digits == 0 {
        s
    } else {
        let padded = format!("{:0>width$}", s, width = digits + 1);
        let (int, frac) = padded.split_at(padded.len() - digits);
        format!("{int}.{frac}")
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.field, &other.field) && self.coeffs == other.coeffs
    }
}

impl Eq for AlgebraicNumber {}

impl PartialOrd for AlgebraicNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AlgebraicNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        self.exact_cmp(other)
    }
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match k {
                0 => format!("{c}"),
                1 => format!("({c})b"),
                _ => format!("({c})b^{k}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl<'a> Add<&'a AlgebraicNumber> for &'a AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn add(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        self.same_field(rhs);
        self.with(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub<&'a AlgebraicNumber> for &'a AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn sub(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        self.same_field(rhs);
        self.with(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect())
    }
}

impl<'a> Mul<&'a AlgebraicNumber> for &'a AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn mul(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        self.same_field(rhs);
        if self.field.degree == 1 {
            return self.with(vec![&self.coeffs[0] * &rhs.coeffs[0]]);
        }
        let prod = Poly::new(self.coeffs.clone()).mul(&Poly::new(rhs.coeffs.clone()));
        self.with(self.field.reduce(prod))
    }
}

impl Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        self.with(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<AlgebraicNumber> for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $m(self, rhs: AlgebraicNumber) -> AlgebraicNumber {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a AlgebraicNumber> for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $m(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        -&self
    }
}

/// Helper for rationals in tests and parsing.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Arc<NumberField> {
        NumberField::new(vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)], q(1), q(2))
    }

    fn num(f: &Arc<NumberField>, c: &[i64]) -> AlgebraicNumber {
        AlgebraicNumber::from_coeffs(f, c.iter().map(|&v| q(v)).collect()).unwrap()
    }

    #[test]
    fn defining_relation_vanishes() {
        let f = golden();
        let b = AlgebraicNumber::beta(&f);
        let one = AlgebraicNumber::one(&f);
        assert!((&(&b * &b) - &b - one).is_zero());
    }

    #[test]
    fn inverse_of_beta() {
        let f = golden();
        let b = AlgebraicNumber::beta(&f);
        assert_eq!(b.pow(-1).unwrap(), num(&f, &[-1, 1]));
        assert_eq!(b.pow(-2).unwrap(), num(&f, &[2, -1]));
        assert_eq!(b.pow(-3).unwrap(), num(&f, &[-3, 2]));
        assert_eq!(b.pow(0).unwrap(), AlgebraicNumber::one(&f));
        assert_eq!(AlgebraicNumber::zero(&f).inverse(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn comparisons() {
        let f = golden();
        let a = num(&f, &[2, -1]);
        let b = num(&f, &[-1, 1]);
        assert_eq!(a.exact_cmp(&b), Ordering::Less);
        assert!(a.is_positive());
        assert_eq!(num(&f, &[3, -2]).signum(), -1); // 3 - 2*1.618 < 0
        assert_eq!(AlgebraicNumber::zero(&f).signum(), 0);
    }

    #[test]
    fn decimals() {
        let f = golden();
        assert_eq!(AlgebraicNumber::beta(&f).to_decimal(12), "1.618033988750");
        assert_eq!(num(&f, &[-1, 1]).to_decimal(10), "0.6180339887");
        assert_eq!(num(&f, &[1, -1]).to_decimal(3), "-0.618");
        let half = AlgebraicNumber::rational(&f, ratio(1, 2));
        assert_eq!(half.to_decimal(0), "1");
        assert_eq!(AlgebraicNumber::rational(&f, ratio(-1, 8)).to_decimal(2), "-0.13");
        assert_eq!(AlgebraicNumber::rational(&f, ratio(3, 10)).to_decimal(1), "0.3");
    }

    #[test]
    fn rational_field() {
        let f = NumberField::new(vec![BigInt::from(-2), BigInt::from(1)], q(1), q(3));
        let b = AlgebraicNumber::beta(&f);
        assert_eq!(b.coeffs(), &[q(2)]);
        assert_eq!(b.pow(-2).unwrap().coeffs(), &[ratio(1, 4)]);
        assert_eq!(b.to_decimal(3), "2.000");
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("3/10").unwrap(), ratio(3, 10));
        assert_eq!(parse_rational("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_rational("7").unwrap(), q(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
