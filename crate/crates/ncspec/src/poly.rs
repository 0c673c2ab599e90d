//! Dense univariate polynomials over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::{fmt_q, q, Q};

/// Coefficients from the constant term upward; never has trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UPoly(Vec<Q>);

impl UPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        UPoly::new(coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn one() -> Self {
        UPoly(vec![q(1)])
    }

    pub fn constant(c: Q) -> Self {
        UPoly::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        UPoly(vec![q(0), q(1)])
    }

    /// `x - c`.
    pub fn linear(c: Q) -> Self {
        UPoly(vec![-c, q(1)])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Q> {
        self.0.last()
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.0.len().max(other.0.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.0.get(i).cloned().unwrap_or_else(Q::zero);
            let b = other.0.get(i).cloned().unwrap_or_else(Q::zero);
            out.push(a + b);
        }
        UPoly::new(out)
    }

    pub fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Q) -> UPoly {
        UPoly::new(self.0.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Q::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }

    pub fn pow(&self, k: u32) -> UPoly {
        (0..k).fold(UPoly::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.lead().unwrap().clone();
        let mut rem = self.0.clone();
        let mut quo = vec![Q::zero(); self.0.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let c = rem.last().unwrap() / &lead;
            for (i, b) in d.0.iter().enumerate() {
                rem[shift + i] -= &c * b;
            }
            quo[shift] = c;
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (UPoly::new(quo), UPoly::new(rem))
    }

    /// True when `self` divides `other`; `0 | g` only for `g = 0`.
    pub fn divides(&self, other: &UPoly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).1.is_zero()
    }

    pub fn monic(&self) -> UPoly {
        match self.lead() {
            None => UPoly::zero(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect())
    }

    /// Monic squarefree part `f / gcd(f, f')`; the zero polynomial maps to
    /// itself and nonzero constants to `1`.
    pub fn squarefree_part(&self) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.0.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    /// Rational roots via the rational-root theorem on the integer-cleared
    /// polynomial.
    pub fn rational_roots(&self) -> Vec<Q> {
        if self.is_constant() {
            return Vec::new();
        }
        let lcm = self.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|c| (c * Q::from_integer(lcm.clone())).to_integer()).collect();
        // strip factors of x so the constant term is nonzero
        let mut roots = Vec::new();
        let start = ints.iter().position(|c| !c.is_zero()).unwrap();
        if start > 0 {
            roots.push(Q::zero());
        }
        let ints = &ints[start..];
        if ints.len() <= 1 {
            return roots;
        }
        let c0 = ints[0].abs();
        let cn = ints[ints.len() - 1].abs();
        let divs = |n: &BigInt| -> Vec<BigInt> {
            let mut out = Vec::new();
            let mut d = BigInt::one();
            while &d * &d <= *n {
                if (n % &d).is_zero() {
                    out.push(d.clone());
                    out.push(n / &d);
                }
                d += 1;
            }
            out
        };
        let mut cands: Vec<Q> = Vec::new();
        for a in divs(&c0) {
            for b in divs(&cn) {
                let r = Q::new(a.clone(), b.clone());
                cands.push(r.clone());
                cands.push(-r);
            }
        }
        cands.sort();
        cands.dedup();
        for r in cands {
            if self.eval(&r).is_zero() {
                roots.push(r);
            }
        }
        roots
    }

    /// Irreducibility over the rationals, decided for degree at most 3;
    /// `None` above that.
    pub fn irreducible_low_degree(&self) -> Option<bool> {
        match self.degree() {
            None | Some(0) => Some(false),
            Some(1) => Some(true),
            Some(2) | Some(3) => Some(self.rational_roots().is_empty()),
            _ => None,
        }
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let coef = if abs.is_one() && i > 0 { String::new() } else { fmt_q(&abs) };
            match i {
                0 => write!(f, "{coef}")?,
                1 => write!(f, "{coef}x")?,
                _ => write!(f, "{coef}x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q_frac;

    #[test]
    fn division_and_gcd() {
        let f = UPoly::from_ints(&[-1, 0, 1]); // x^2 - 1
        let g = UPoly::from_ints(&[-1, 1]); // x - 1
        let (qq, r) = f.div_rem(&g);
        assert_eq!(qq, UPoly::from_ints(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(f.gcd(&UPoly::from_ints(&[1, 1])), UPoly::from_ints(&[1, 1]));
    }

    #[test]
    fn squarefree_part_drops_multiplicity() {
        let a = UPoly::linear(q(1)).pow(3).mul(&UPoly::linear(q(-2)));
        assert_eq!(a.squarefree_part(), UPoly::linear(q(1)).mul(&UPoly::linear(q(-2))));
        assert_eq!(UPoly::constant(q(5)).squarefree_part(), UPoly::one());
    }

    #[test]
    fn low_degree_irreducibility() {
        assert_eq!(UPoly::from_ints(&[1, 0, 1]).irreducible_low_degree(), Some(true));
        assert_eq!(UPoly::from_ints(&[-2, 0, 1]).irreducible_low_degree(), Some(true));
        assert_eq!(UPoly::from_ints(&[-1, 0, 0, 1]).irreducible_low_degree(), Some(false));
        let f = UPoly::new(vec![q_frac(-1, 4), q(0), q(1)]); // x^2 - 1/4
        assert_eq!(f.rational_roots(), vec![q_frac(-1, 2), q_frac(1, 2)]);
        assert_eq!(UPoly::from_ints(&[0, 1, 1, 1, 1]).irreducible_low_degree(), None);
    }

    #[test]
    fn display() {
        assert_eq!(UPoly::from_ints(&[-1, 0, 1]).to_string(), "x^2 - 1");
        assert_eq!(UPoly::new(vec![q_frac(1, 2), q(-3)]).to_string(), "-3x + 1/2");
    }
}
