//! Normal-form arithmetic in skew Laurent polynomial rings
//! `Q_λ[x_1^±, …, x_n^±]` with `x_i x_j = λ(i,j) x_j x_i` for `i < j`.
//!
//! A monomial `x^a` means `x_1^{a_1} x_2^{a_2} ⋯ x_n^{a_n}` in ascending
//! variable order. Products reorder with the twist
//! `x^a · x^b = t(a,b) · x^{a+b}`, `t(a,b) = ∏_{j<i} λ(j,i)^{-a_i b_j}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{fmt_q, q, Q};

pub type Exp = Vec<i64>;

/// The data of a skew Laurent ring: number of variables, the commutation
/// scalars above the diagonal, and which variables may carry negative
/// exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SkewSpec {
    pub nvars: usize,
    /// `lambda[i][j - i - 1] = λ(i, j)` for `i < j` (zero-based).
    pub lambda: Vec<Vec<Q>>,
    pub inverted: BTreeSet<usize>,
}

impl SkewSpec {
    pub fn new(nvars: usize, lambda: Vec<Vec<Q>>, inverted: BTreeSet<usize>) -> Result<Self> {
        let path = |m: String| Error::SchemaViolation { path: "lambda".into(), message: m };
        if nvars < 2 {
            return Err(Error::SchemaViolation { path: "nvars".into(), message: "need at least two variables".into() });
        }
        if lambda.len() != nvars - 1 {
            return Err(path(format!("expected {} rows, got {}", nvars - 1, lambda.len())));
        }
        for (i, row) in lambda.iter().enumerate() {
            if row.len() != nvars - 1 - i {
                return Err(Error::SchemaViolation {
                    path: format!("lambda[{i}]"),
                    message: format!("expected {} entries, got {}", nvars - 1 - i, row.len()),
                });
            }
            if let Some(j) = row.iter().position(|x| x.is_zero()) {
                return Err(Error::SchemaViolation { path: format!("lambda[{i}][{j}]"), message: "entries must be nonzero".into() });
            }
        }
        if let Some(&v) = inverted.iter().find(|&&v| v >= nvars) {
            return Err(Error::SchemaViolation { path: "inverted".into(), message: format!("variable index {v} out of range") });
        }
        Ok(SkewSpec { nvars, lambda, inverted })
    }

    /// Every `λ(i,j)` equal to the same value, nothing inverted.
    pub fn uniform(nvars: usize, lam: Q) -> Self {
        let lambda = (0..nvars.saturating_sub(1)).map(|i| vec![lam.clone(); nvars - 1 - i]).collect();
        SkewSpec::new(nvars, lambda, BTreeSet::new()).expect("uniform table is well formed")
    }

    pub fn with_inverted(&self, inverted: BTreeSet<usize>) -> Self {
        SkewSpec { inverted, ..self.clone() }
    }

    /// `λ(i, j)` for `i < j`, and the reciprocal relation for `i > j`.
    pub fn lambda(&self, i: usize, j: usize) -> Q {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.lambda[i][j - i - 1].clone(),
            Greater => self.lambda[j][i - j - 1].recip(),
            Equal => q(1),
        }
    }

    pub fn is_commutative(&self) -> bool {
        self.lambda.iter().flatten().all(|x| x.is_one())
    }

    /// The reordering scalar `t(a,b)`.
    pub fn twist(&self, a: &[i64], b: &[i64]) -> Q {
        let mut t = q(1);
        for i in 0..self.nvars {
            if a[i] == 0 {
                continue;
            }
            for j in 0..i {
                let e = -a[i] * b[j];
                if e != 0 {
                    t *= pow_q(&self.lambda(j, i), e);
                }
            }
        }
        t
    }

    pub fn admits(&self, exp: &[i64]) -> bool {
        exp.len() == self.nvars && exp.iter().enumerate().all(|(i, &e)| e >= 0 || self.inverted.contains(&i))
    }

    pub fn mul(&self, p: &SkewLaurentPoly, r: &SkewLaurentPoly) -> Result<SkewLaurentPoly> {
        if p.nvars != self.nvars || r.nvars != self.nvars {
            return Err(Error::OwnerMismatch);
        }
        let mut terms: BTreeMap<Exp, Q> = BTreeMap::new();
        for (a, ca) in &p.terms {
            for (b, cb) in &r.terms {
                let sum: Exp = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let c = ca * cb * self.twist(a, b);
                let entry = terms.entry(sum).or_insert_with(Q::zero);
                *entry += c;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(SkewLaurentPoly { nvars: self.nvars, terms })
    }

    /// Two-sided inverse of a scalar multiple of a monomial, when every
    /// negative exponent it needs is allowed.
    pub fn monomial_inverse(&self, p: &SkewLaurentPoly) -> Option<SkewLaurentPoly> {
        let (a, c) = p.as_monomial()?;
        let neg: Exp = a.iter().map(|x| -x).collect();
        if !self.admits(&neg) {
            return None;
        }
        // x^a x^{-a} = t(a,-a); so the inverse is t(a,-a)^{-1} c^{-1} x^{-a}
        let t = self.twist(&a, &neg);
        Some(SkewLaurentPoly::monomial(neg, (c * t).recip()))
    }
}

pub fn pow_q(x: &Q, e: i64) -> Q {
    let base = if e < 0 { x.recip() } else { x.clone() };
    let mut out = q(1);
    for _ in 0..e.unsigned_abs() {
        out *= &base;
    }
    out
}

/// A finite sum of monomials with nonzero rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SkewLaurentPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Exp, Q>,
}

impl SkewLaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        SkewLaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(vec![0; nvars], q(1))
    }

    pub fn monomial(exp: Exp, coef: Q) -> Self {
        let nvars = exp.len();
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(exp, coef);
        }
        SkewLaurentPoly { nvars, terms }
    }

    /// The variable `x_i` (zero-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, q(1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_monomial(&self) -> Option<(Exp, Q)> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            Some((e.clone(), c.clone()))
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::OwnerMismatch);
        }
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(Q::zero);
            *entry += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(SkewLaurentPoly { nvars: self.nvars, terms })
    }

    pub fn neg(&self) -> Self {
        SkewLaurentPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn scale(&self, k: &Q) -> Self {
        if k.is_zero() {
            return Self::zero(self.nvars);
        }
        SkewLaurentPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect() }
    }

    /// Total degree of each term, if they all agree.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<i64>());
        let d = degs.next()?;
        degs.all(|x| x == d).then_some(d)
    }

    pub fn coefficient(&self, e: &[i64]) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }
}

pub fn monomial_label(e: &[i64]) -> String {
    let names: Vec<String> = if e.len() <= 3 {
        ["x", "y", "z"].iter().take(e.len()).map(|s| s.to_string()).collect()
    } else {
        (1..=e.len()).map(|i| format!("x{i}")).collect()
    };
    let parts: Vec<String> = e
        .iter()
        .zip(&names)
        .filter(|(&k, _)| k != 0)
        .map(|(&k, n)| if k == 1 { n.clone() } else { format!("{n}^{k}") })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(" ")
    }
}

impl fmt::Display for SkewLaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let m = monomial_label(e);
                if m == "1" {
                    fmt_q(c)
                } else if c.is_one() {
                    m
                } else {
                    format!("{}*{}", fmt_q(c), m)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q_frac;

    /// Independent oracle: multiply two monomials by literally sliding
    /// variables past each other one transposition at a time.
    fn transposition_product(spec: &SkewSpec, a: &[i64], b: &[i64]) -> (Exp, Q) {
        // write x^a x^b as a word of single variables (nonnegative exponents only)
        let mut word: Vec<usize> = Vec::new();
        for (i, &k) in a.iter().enumerate() {
            word.extend(std::iter::repeat(i).take(k as usize));
        }
        for (i, &k) in b.iter().enumerate() {
            word.extend(std::iter::repeat(i).take(k as usize));
        }
        let mut coef = q(1);
        // bubble sort; swapping adjacent (j, i) with j > i uses x_j x_i = λ(i,j)^{-1} x_i x_j
        let n = word.len();
        for pass in 0..n {
            for k in 0..n.saturating_sub(1 + pass) {
                if word[k] > word[k + 1] {
                    coef *= spec.lambda(word[k + 1], word[k]).recip();
                    word.swap(k, k + 1);
                }
            }
        }
        let mut e = vec![0; a.len()];
        for v in word {
            e[v] += 1;
        }
        (e, coef)
    }

    #[test]
    fn basic_relation_instance() {
        let s = SkewSpec::uniform(2, q(2));
        let x = SkewLaurentPoly::var(2, 0);
        let y = SkewLaurentPoly::var(2, 1);
        let yx = s.mul(&y, &x).unwrap();
        assert_eq!(yx, SkewLaurentPoly::monomial(vec![1, 1], q_frac(1, 2)));
        let xy = s.mul(&x, &y).unwrap();
        let sq = s.mul(&xy, &xy).unwrap();
        assert_eq!(sq, SkewLaurentPoly::monomial(vec![2, 2], q_frac(1, 2)));
    }

    #[test]
    fn twist_matches_transposition_oracle() {
        let spec = SkewSpec::new(3, vec![vec![q(2), q_frac(-1, 3)], vec![q(5)]], BTreeSet::new()).unwrap();
        for a0 in 0..3 {
            for a2 in 0..3 {
                for b1 in 0..3 {
                    for b0 in 0..2 {
                        let a = [a0, 1, a2];
                        let b = [b0, b1, 1];
                        let (e, c) = transposition_product(&spec, &a, &b);
                        let sum: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
                        assert_eq!(e, sum);
                        assert_eq!(spec.twist(&a, &b), c, "a={a:?} b={b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn monomial_inverse_requires_inverted_variables() {
        let s = SkewSpec::uniform(2, q(3));
        let m = SkewLaurentPoly::monomial(vec![1, 2], q(4));
        assert!(s.monomial_inverse(&m).is_none());
        let s2 = s.with_inverted([0, 1].into_iter().collect());
        let inv = s2.monomial_inverse(&m).unwrap();
        assert_eq!(s2.mul(&m, &inv).unwrap(), SkewLaurentPoly::one(2));
        assert_eq!(s2.mul(&inv, &m).unwrap(), SkewLaurentPoly::one(2));
    }

    #[test]
    fn malformed_lambda_rejected() {
        let err = SkewSpec::new(2, vec![vec![q(1), q(2), q(2)]], BTreeSet::new()).unwrap_err();
        assert_eq!(err.name(), "SchemaViolation");
        assert!(SkewSpec::new(2, vec![vec![q(0)]], BTreeSet::new()).is_err());
    }
}
