//! Exponent triples Z = (b, c, σ) and their characteristic numbers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{NlkgError, Result};

/// Exact rational number.
pub type Rational = BigRational;

/// n/d as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer n as an exact rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parse "a/b", "a" or a terminating decimal such as "1.25".
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || NlkgError::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(digits, scale));
    }
    t.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad())
}

/// "a/b", or "a" for integers.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Nearest f64 to a rational (for display only).
pub fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Serialises a rational as its "a/b" string.
pub fn ser_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(q))
}

/// A triple (b, c, σ): b and c are reciprocal time and space integrability
/// exponents, σ a regularity. Raw triples are unrestricted; the unit
/// interval constraints apply only to admissibility queries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ExpTriple {
    #[serde(serialize_with = "ser_rational")]
    pub b: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub c: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub sigma: Rational,
}

/// reg^θ, str^θ and dec^θ of one triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Indices {
    #[serde(serialize_with = "ser_rational")]
    pub reg: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub str: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub dec: Rational,
}

/// The two exponent changes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transform {
    /// (b, c, σ)^s = (b, c, s).
    Regularity(Rational),
    /// (b, c, σ)^{*(s)} = (1 - b, 1 - c, -σ + 2s - 1).
    Dual(Rational),
}

impl ExpTriple {
    pub fn new(b: Rational, c: Rational, sigma: Rational) -> Self {
        Self { b, c, sigma }
    }

    /// Triple from (numerator, denominator) pairs.
    pub fn frac(b: (i64, i64), c: (i64, i64), sigma: (i64, i64)) -> Self {
        Self::new(rat(b.0, b.1), rat(c.0, c.1), rat(sigma.0, sigma.1))
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(&self.b * k, &self.c * k, &self.sigma * k)
    }

    /// reg^θ = σ - (1 - 2θ/d) b - d(c - ½).
    pub fn reg(&self, theta: &Rational, d: usize) -> Rational {
        let dd = int(d as i64);
        let half = rat(1, 2);
        &self.sigma - (Rational::one() - int(2) * theta / &dd) * &self.b - &dd * (&self.c - &half)
    }

    /// str^θ = 2b + (d - 1 + θ)(c - ½).
    pub fn str_(&self, theta: &Rational, d: usize) -> Rational {
        int(2) * &self.b + (int(d as i64 - 1) + theta) * (&self.c - rat(1, 2))
    }

    /// dec^θ = b + (d - 1 + θ)(c - ½).
    pub fn dec(&self, theta: &Rational, d: usize) -> Rational {
        &self.b + (int(d as i64 - 1) + theta) * (&self.c - rat(1, 2))
    }

    pub fn indices(&self, theta: &Rational, d: usize) -> Indices {
        Indices { reg: self.reg(theta, d), str: self.str_(theta, d), dec: self.dec(theta, d) }
    }

    /// Z^s.
    pub fn with_regularity(&self, s: &Rational) -> Self {
        Self::new(self.b.clone(), self.c.clone(), s.clone())
    }

    /// Z^{*(s)}.
    pub fn dual(&self, s: &Rational) -> Self {
        let one = Rational::one();
        Self::new(&one - &self.b, &one - &self.c, -&self.sigma + int(2) * s - one)
    }

    pub fn transform(&self, t: &Transform) -> Self {
        match t {
            Transform::Regularity(s) => self.with_regularity(s),
            Transform::Dual(s) => self.dual(s),
        }
    }

    /// Smallest θ ∈ [0, 1] witnessing s-admissibility: 0 ≤ b ≤ ½,
    /// 0 ≤ c < ½, reg^θ ≤ s and str^θ ≤ 0. The energy endpoint c = ½ is
    /// accepted when b = 0, so that H = (0, ½, 1) qualifies. Both numbers
    /// are affine in θ, so each condition cuts [0, 1] to an interval and
    /// the intersection is computed exactly.
    pub fn admissible_theta(&self, s: &Rational, d: usize) -> Option<Rational> {
        let (zero, one, half) = (Rational::zero(), Rational::one(), rat(1, 2));
        let c_ok = self.c < half || (self.c == half && self.b.is_zero());
        if self.b < zero || self.b > half || self.c < zero || !c_ok {
            return None;
        }
        let (mut lo, mut hi) = (zero.clone(), one.clone());
        // value(θ) = a0 + a1 θ ≤ 0.
        let mut cut = |a0: Rational, a1: Rational| {
            if a1.is_zero() {
                if a0 > zero {
                    hi = int(-1);
                }
            } else {
                let root = -&a0 / &a1;
                if a1.is_positive() {
                    hi = hi.clone().min(root);
                } else {
                    lo = lo.clone().max(root);
                }
            }
        };
        let r0 = self.reg(&zero, d) - s;
        let r1 = self.reg(&one, d) - s - &r0;
        cut(r0, r1);
        let s0 = self.str_(&zero, d);
        let s1 = self.str_(&one, d) - &s0;
        cut(s0, s1);
        (lo <= hi).then_some(lo)
    }

    pub fn is_admissible(&self, s: &Rational, d: usize) -> bool {
        self.admissible_theta(s, d).is_some()
    }
}

impl fmt::Display for ExpTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", fmt_rational(&self.b), fmt_rational(&self.c), fmt_rational(&self.sigma))
    }
}

impl Add for &ExpTriple {
    type Output = ExpTriple;
    fn add(self, o: &ExpTriple) -> ExpTriple {
        ExpTriple::new(&self.b + &o.b, &self.c + &o.c, &self.sigma + &o.sigma)
    }
}

impl Sub for &ExpTriple {
    type Output = ExpTriple;
    fn sub(self, o: &ExpTriple) -> ExpTriple {
        ExpTriple::new(&self.b - &o.b, &self.c - &o.c, &self.sigma - &o.sigma)
    }
}

impl Neg for &ExpTriple {
    type Output = ExpTriple;
    fn neg(self) -> ExpTriple {
        ExpTriple::new(-&self.b, -&self.c, -&self.sigma)
    }
}

impl Mul<&ExpTriple> for &Rational {
    type Output = ExpTriple;
    fn mul(self, z: &ExpTriple) -> ExpTriple {
        z.scale(self)
    }
}
