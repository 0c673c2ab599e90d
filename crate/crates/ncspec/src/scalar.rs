//! Exact scalars: arbitrary-precision rationals and prime-field residues.
//!
//! Prime-field residues are stored as integral rationals in `0..p`, so one
//! matrix type serves both base fields.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as `"p/q"`, or `"p"` when the denominator is one.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

/// Base field of a matrix ring or semisimple algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Rationals,
    Prime(u32),
}

impl Field {
    pub fn tag(&self) -> String {
        match self {
            Field::Rationals => "q".to_string(),
            Field::Prime(p) => format!("f{p}"),
        }
    }

    pub fn from_tag(tag: &str) -> Option<Field> {
        if tag == "q" {
            return Some(Field::Rationals);
        }
        let p: u32 = tag.strip_prefix('f')?.parse().ok()?;
        if is_prime(p as u64) {
            Some(Field::Prime(p))
        } else {
            None
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Field::Prime(_))
    }

    pub fn normalize(&self, x: Q) -> Q {
        match self {
            Field::Rationals => x,
            Field::Prime(p) => {
                let p = BigInt::from(*p);
                // residues only ever hold integers, but reduce a fraction too
                let num = x.numer().mod_floor(&p);
                let den = x.denom().mod_floor(&p);
                let inv = mod_inverse_big(&den, &p).expect("denominator invertible mod p");
                Q::from_integer((num * inv).mod_floor(&p))
            }
        }
    }

    pub fn add(&self, a: &Q, b: &Q) -> Q {
        self.normalize(a + b)
    }

    pub fn sub(&self, a: &Q, b: &Q) -> Q {
        self.normalize(a - b)
    }

    pub fn mul(&self, a: &Q, b: &Q) -> Q {
        self.normalize(a * b)
    }

    pub fn neg(&self, a: &Q) -> Q {
        self.normalize(-a)
    }

    pub fn inv(&self, a: &Q) -> Option<Q> {
        if a.is_zero() {
            return None;
        }
        match self {
            Field::Rationals => Some(a.recip()),
            Field::Prime(p) => {
                let p = BigInt::from(*p);
                mod_inverse_big(a.numer(), &p).map(Q::from_integer)
            }
        }
    }

    /// All field elements, for prime fields only.
    pub fn elements(&self) -> Option<Vec<Q>> {
        match self {
            Field::Rationals => None,
            Field::Prime(p) => Some((0..*p as i64).map(q).collect()),
        }
    }
}

fn mod_inverse_big(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(p);
    if e.gcd.is_one() || (-&e.gcd).is_one() {
        let x = if e.gcd.is_negative() { -e.x } else { e.x };
        Some(x.mod_floor(p))
    } else {
        None
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime-power factorization `n = ∏ p^k`, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut k = 0;
        while n % d == 0 {
            n /= d;
            k += 1;
        }
        if k > 0 {
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn to_i64(x: &Q) -> Option<i64> {
    if x.denom().is_one() {
        x.numer().to_i64()
    } else {
        None
    }
}

pub(crate) fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::SchemaViolation { path: path.to_string(), message: message.into() }
}

pub(crate) fn parse_q_at(path: &str, s: &str) -> Result<Q> {
    parse_q(s).ok_or_else(|| schema(path, format!("not a rational \"p/q\": {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings_round_trip() {
        for (n, d) in [(1, 2), (-3, 4), (5, 1), (0, 7)] {
            let x = q_frac(n, d);
            assert_eq!(parse_q(&fmt_q(&x)), Some(x));
        }
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(fmt_q(&q_frac(6, 4)), "3/2");
    }

    #[test]
    fn prime_field_inverse() {
        let f = Field::Prime(7);
        for a in 1..7 {
            let inv = f.inv(&q(a)).unwrap();
            assert_eq!(f.mul(&q(a), &inv), q(1));
        }
        assert_eq!(f.normalize(q_frac(1, 2)), q(4));
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert!(Field::from_tag("f4").is_none());
        assert_eq!(Field::from_tag("f5"), Some(Field::Prime(5)));
    }
}
