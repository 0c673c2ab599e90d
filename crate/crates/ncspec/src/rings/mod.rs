//! Exact representations of the supported ring classes and their arithmetic.

mod finite;
mod hom;
mod matrix;

pub use finite::FiniteRing;
pub(crate) use hom::{block_dims, blocks_of, from_blocks};
pub use hom::{hom_compose, hom_validate, CanonicalMap, HomRule, RingHom, ValidatedHom};
pub use matrix::Matrix;

use std::fmt;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::UPoly;
use crate::scalar::Field;
use crate::skewproj::{SkewLaurentPoly, SkewSpec};

/// A ring from the supported classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RingDescriptor {
    Zero,
    /// `Z/n`; `n = 1` is the table form of the zero ring.
    Modular { n: u64 },
    Product { factors: Vec<RingDescriptor> },
    Matrix { base: Field, size: usize },
    Semisimple { base: Field, dims: Vec<usize> },
    /// `Q[x]` with a monic squarefree polynomial inverted (`1` for `Q[x]`).
    Poly { inverted: UPoly },
    SkewLaurent(SkewSpec),
}

/// An element in canonical form. Which ring it belongs to is decided by
/// [`RingDescriptor::owns`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RingElement {
    Zero,
    Residue(u64),
    Tuple(Vec<RingElement>),
    Matrix(Matrix),
    Blocks(Vec<Matrix>),
    /// `num / f^power` where `f` is the inverted polynomial of the ring.
    Fraction { num: UPoly, power: u32 },
    Skew(SkewLaurentPoly),
}

/// The operations accepted by [`ring_eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Mul,
    Neg,
    One,
    Zero,
    Eq,
}

/// Result of [`ring_eval`]: `eq` yields a boolean, everything else an element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalResult {
    Element(RingElement),
    Bool(bool),
}

pub fn ring_eval(r: &RingDescriptor, op: RingOp, args: &[RingElement]) -> Result<EvalResult> {
    let arity = match op {
        RingOp::Add | RingOp::Mul | RingOp::Eq => 2,
        RingOp::Neg => 1,
        RingOp::One | RingOp::Zero => 0,
    };
    if args.len() != arity {
        return Err(Error::ArityMismatch { op: format!("{op:?}").to_lowercase(), expected: arity, got: args.len() });
    }
    for a in args {
        r.check_owns(a)?;
    }
    Ok(match op {
        RingOp::Add => EvalResult::Element(r.add(&args[0], &args[1])),
        RingOp::Mul => EvalResult::Element(r.mul(&args[0], &args[1])),
        RingOp::Neg => EvalResult::Element(r.neg(&args[0])),
        RingOp::One => EvalResult::Element(r.one()),
        RingOp::Zero => EvalResult::Element(r.zero()),
        RingOp::Eq => EvalResult::Bool(args[0] == args[1]),
    })
}

pub fn is_unit(r: &RingDescriptor, x: &RingElement) -> Result<bool> {
    r.check_owns(x)?;
    Ok(r.inverse(x).is_some())
}

pub fn enumerate_elements(r: &RingDescriptor) -> Result<Vec<RingElement>> {
    r.elements().ok_or_else(|| Error::InfiniteRing { ring: r.to_string() })
}

impl RingDescriptor {
    pub fn modular(n: u64) -> Self {
        RingDescriptor::Modular { n }
    }

    /// A product ring; single factors are unwrapped and empty products
    /// rejected.
    pub fn product(mut factors: Vec<RingDescriptor>) -> Result<Self> {
        match factors.len() {
            0 => Err(Error::SchemaViolation { path: "factors".into(), message: "a product needs at least one factor".into() }),
            1 => Ok(factors.pop().unwrap()),
            _ => Ok(RingDescriptor::Product { factors }),
        }
    }

    pub fn matrix(base: Field, size: usize) -> Self {
        RingDescriptor::Matrix { base, size }
    }

    pub fn semisimple(base: Field, dims: Vec<usize>) -> Self {
        RingDescriptor::Semisimple { base, dims }
    }

    pub fn poly() -> Self {
        RingDescriptor::Poly { inverted: UPoly::one() }
    }

    /// Checks the class invariants of a descriptor built by hand.
    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, m: &str| Err(Error::SchemaViolation { path: path.into(), message: m.into() });
        match self {
            RingDescriptor::Modular { n } if *n == 0 => bad("n", "modulus must be positive"),
            RingDescriptor::Product { factors } => {
                if factors.len() < 2 {
                    return bad("factors", "products need at least two factors after normalization");
                }
                factors.iter().try_for_each(|f| f.validate())
            }
            RingDescriptor::Matrix { size, .. } if *size == 0 => bad("size", "size must be positive"),
            RingDescriptor::Semisimple { dims, .. } if dims.is_empty() || dims.contains(&0) => {
                bad("dims", "dims must be a nonempty list of positive integers")
            }
            RingDescriptor::Poly { inverted } => {
                if inverted.is_zero() || inverted.monic() != *inverted || inverted.squarefree_part() != *inverted {
                    bad("inverted", "inverted polynomial must be monic and squarefree")
                } else {
                    Ok(())
                }
            }
            RingDescriptor::SkewLaurent(s) => SkewSpec::new(s.nvars, s.lambda.clone(), s.inverted.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// True for the zero ring in either of its forms.
    pub fn is_zero_ring(&self) -> bool {
        match self {
            RingDescriptor::Zero => true,
            RingDescriptor::Modular { n } => *n == 1,
            RingDescriptor::Product { factors } => factors.iter().all(|f| f.is_zero_ring()),
            _ => false,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            RingDescriptor::Zero | RingDescriptor::Modular { .. } => true,
            RingDescriptor::Product { factors } => factors.iter().all(|f| f.is_finite()),
            RingDescriptor::Matrix { base, .. } | RingDescriptor::Semisimple { base, .. } => base.is_finite(),
            RingDescriptor::Poly { .. } | RingDescriptor::SkewLaurent(_) => false,
        }
    }

    pub fn cardinality(&self) -> Option<u64> {
        match self {
            RingDescriptor::Zero => Some(1),
            RingDescriptor::Modular { n } => Some(*n),
            RingDescriptor::Product { factors } => factors.iter().map(|f| f.cardinality()).product(),
            RingDescriptor::Matrix { base: Field::Prime(p), size } => Some((*p as u64).pow((size * size) as u32)),
            RingDescriptor::Semisimple { base: Field::Prime(p), dims } => {
                Some(dims.iter().map(|d| (*p as u64).pow((d * d) as u32)).product())
            }
            _ => None,
        }
    }

    /// Structural commutativity of the class.
    pub fn is_commutative(&self) -> bool {
        match self {
            RingDescriptor::Zero | RingDescriptor::Modular { .. } | RingDescriptor::Poly { .. } => true,
            RingDescriptor::Product { factors } => factors.iter().all(|f| f.is_commutative()),
            RingDescriptor::Matrix { size, .. } => *size == 1,
            RingDescriptor::Semisimple { dims, .. } => dims.iter().all(|&d| d == 1),
            RingDescriptor::SkewLaurent(s) => s.is_commutative(),
        }
    }

    pub fn zero(&self) -> RingElement {
        match self {
            RingDescriptor::Zero => RingElement::Zero,
            RingDescriptor::Modular { .. } => RingElement::Residue(0),
            RingDescriptor::Product { factors } => RingElement::Tuple(factors.iter().map(|f| f.zero()).collect()),
            RingDescriptor::Matrix { size, .. } => RingElement::Matrix(Matrix::zero(*size)),
            RingDescriptor::Semisimple { dims, .. } => RingElement::Blocks(dims.iter().map(|&d| Matrix::zero(d)).collect()),
            RingDescriptor::Poly { .. } => RingElement::Fraction { num: UPoly::zero(), power: 0 },
            RingDescriptor::SkewLaurent(s) => RingElement::Skew(SkewLaurentPoly::zero(s.nvars)),
        }
    }

    pub fn one(&self) -> RingElement {
        match self {
            RingDescriptor::Zero => RingElement::Zero,
            RingDescriptor::Modular { n } => RingElement::Residue(1 % n),
            RingDescriptor::Product { factors } => RingElement::Tuple(factors.iter().map(|f| f.one()).collect()),
            RingDescriptor::Matrix { size, .. } => RingElement::Matrix(Matrix::identity(*size)),
            RingDescriptor::Semisimple { dims, .. } => RingElement::Blocks(dims.iter().map(|&d| Matrix::identity(d)).collect()),
            RingDescriptor::Poly { .. } => RingElement::Fraction { num: UPoly::one(), power: 0 },
            RingDescriptor::SkewLaurent(s) => RingElement::Skew(SkewLaurentPoly::one(s.nvars)),
        }
    }

    /// Whether `x` is a canonical-form element of this ring.
    pub fn owns(&self, x: &RingElement) -> bool {
        match (self, x) {
            (RingDescriptor::Zero, RingElement::Zero) => true,
            (RingDescriptor::Modular { n }, RingElement::Residue(r)) => r < n,
            (RingDescriptor::Product { factors }, RingElement::Tuple(xs)) => {
                factors.len() == xs.len() && factors.iter().zip(xs).all(|(f, x)| f.owns(x))
            }
            (RingDescriptor::Matrix { base, size }, RingElement::Matrix(m)) => m.well_formed(*size, base),
            (RingDescriptor::Semisimple { base, dims }, RingElement::Blocks(bs)) => {
                dims.len() == bs.len() && dims.iter().zip(bs).all(|(&d, b)| b.well_formed(d, base))
            }
            (RingDescriptor::Poly { inverted }, RingElement::Fraction { num, power }) => {
                *power == 0 || (!inverted.is_constant() && !num.is_zero() && !inverted.divides(num))
            }
            (RingDescriptor::SkewLaurent(s), RingElement::Skew(p)) => {
                p.nvars == s.nvars && p.terms.iter().all(|(e, c)| !c.is_zero() && s.admits(e))
            }
            _ => false,
        }
    }

    pub fn check_owns(&self, x: &RingElement) -> Result<()> {
        if self.owns(x) {
            Ok(())
        } else {
            Err(Error::ElementOwnershipMismatch { ring: self.to_string() })
        }
    }

    pub fn add(&self, a: &RingElement, b: &RingElement) -> RingElement {
        match (self, a, b) {
            (RingDescriptor::Zero, _, _) => RingElement::Zero,
            (RingDescriptor::Modular { n }, RingElement::Residue(x), RingElement::Residue(y)) => RingElement::Residue((x + y) % n),
            (RingDescriptor::Product { factors }, RingElement::Tuple(xs), RingElement::Tuple(ys)) => {
                RingElement::Tuple(factors.iter().zip(xs.iter().zip(ys)).map(|(f, (x, y))| f.add(x, y)).collect())
            }
            (RingDescriptor::Matrix { base, .. }, RingElement::Matrix(x), RingElement::Matrix(y)) => RingElement::Matrix(x.add(y, base)),
            (RingDescriptor::Semisimple { base, .. }, RingElement::Blocks(xs), RingElement::Blocks(ys)) => {
                RingElement::Blocks(xs.iter().zip(ys).map(|(x, y)| x.add(y, base)).collect())
            }
            (RingDescriptor::Poly { inverted }, RingElement::Fraction { num: a, power: k }, RingElement::Fraction { num: b, power: l }) => {
                let m = (*k).max(*l);
                let a2 = a.mul(&inverted.pow(m - k));
                let b2 = b.mul(&inverted.pow(m - l));
                reduce_fraction(inverted, a2.add(&b2), m)
            }
            (RingDescriptor::SkewLaurent(_), RingElement::Skew(x), RingElement::Skew(y)) => {
                RingElement::Skew(x.add(y).expect("owners checked"))
            }
            _ => panic!("add: element does not belong to {self}"),
        }
    }

    pub fn neg(&self, a: &RingElement) -> RingElement {
        match (self, a) {
            (RingDescriptor::Zero, _) => RingElement::Zero,
            (RingDescriptor::Modular { n }, RingElement::Residue(x)) => RingElement::Residue((n - x) % n),
            (RingDescriptor::Product { factors }, RingElement::Tuple(xs)) => {
                RingElement::Tuple(factors.iter().zip(xs).map(|(f, x)| f.neg(x)).collect())
            }
            (RingDescriptor::Matrix { base, .. }, RingElement::Matrix(x)) => RingElement::Matrix(x.neg(base)),
            (RingDescriptor::Semisimple { base, .. }, RingElement::Blocks(xs)) => {
                RingElement::Blocks(xs.iter().map(|x| x.neg(base)).collect())
            }
            (RingDescriptor::Poly { .. }, RingElement::Fraction { num, power }) => RingElement::Fraction { num: num.neg(), power: *power },
            (RingDescriptor::SkewLaurent(_), RingElement::Skew(x)) => RingElement::Skew(x.neg()),
            _ => panic!("neg: element does not belong to {self}"),
        }
    }

    pub fn sub(&self, a: &RingElement, b: &RingElement) -> RingElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        match (self, a, b) {
            (RingDescriptor::Zero, _, _) => RingElement::Zero,
            (RingDescriptor::Modular { n }, RingElement::Residue(x), RingElement::Residue(y)) => {
                RingElement::Residue(((*x as u128 * *y as u128) % *n as u128) as u64)
            }
            (RingDescriptor::Product { factors }, RingElement::Tuple(xs), RingElement::Tuple(ys)) => {
                RingElement::Tuple(factors.iter().zip(xs.iter().zip(ys)).map(|(f, (x, y))| f.mul(x, y)).collect())
            }
            (RingDescriptor::Matrix { base, .. }, RingElement::Matrix(x), RingElement::Matrix(y)) => RingElement::Matrix(x.mul(y, base)),
            (RingDescriptor::Semisimple { base, .. }, RingElement::Blocks(xs), RingElement::Blocks(ys)) => {
                RingElement::Blocks(xs.iter().zip(ys).map(|(x, y)| x.mul(y, base)).collect())
            }
            (RingDescriptor::Poly { inverted }, RingElement::Fraction { num: a, power: k }, RingElement::Fraction { num: b, power: l }) => {
                reduce_fraction(inverted, a.mul(b), k + l)
            }
            (RingDescriptor::SkewLaurent(s), RingElement::Skew(x), RingElement::Skew(y)) => {
                RingElement::Skew(s.mul(x, y).expect("owners checked"))
            }
            _ => panic!("mul: element does not belong to {self}"),
        }
    }

    /// `k · x` for an integer `k ≥ 0`, by repeated doubling.
    pub fn times(&self, k: u64, x: &RingElement) -> RingElement {
        let mut acc = self.zero();
        let mut base = x.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    pub fn pow(&self, x: &RingElement, k: u32) -> RingElement {
        (0..k).fold(self.one(), |acc, _| self.mul(&acc, x))
    }

    /// Two-sided inverse, if one exists.
    pub fn inverse(&self, x: &RingElement) -> Option<RingElement> {
        match (self, x) {
            (RingDescriptor::Zero, _) => Some(RingElement::Zero),
            (RingDescriptor::Modular { n }, RingElement::Residue(r)) => {
                if *n == 1 {
                    return Some(RingElement::Residue(0));
                }
                let e = (*r as i128).extended_gcd(&(*n as i128));
                (e.gcd == 1).then(|| RingElement::Residue(e.x.mod_floor(&(*n as i128)) as u64))
            }
            (RingDescriptor::Product { factors }, RingElement::Tuple(xs)) => {
                let inv: Option<Vec<_>> = factors.iter().zip(xs).map(|(f, x)| f.inverse(x)).collect();
                inv.map(RingElement::Tuple)
            }
            (RingDescriptor::Matrix { base, .. }, RingElement::Matrix(m)) => m.inverse(base).map(RingElement::Matrix),
            (RingDescriptor::Semisimple { base, .. }, RingElement::Blocks(bs)) => {
                let inv: Option<Vec<_>> = bs.iter().map(|b| b.inverse(base)).collect();
                inv.map(RingElement::Blocks)
            }
            (RingDescriptor::Poly { inverted }, RingElement::Fraction { num, power }) => {
                // num must divide a power of the inverted polynomial
                if num.is_zero() {
                    return None;
                }
                let mut rest = num.clone();
                loop {
                    let g = rest.gcd(inverted);
                    if g.is_constant() {
                        break;
                    }
                    rest = rest.div_rem(&g).0;
                }
                if !rest.is_constant() {
                    return None;
                }
                let m = num.degree().unwrap() as u32;
                let cofactor = inverted.pow(m).div_rem(num).0; // f^m / num
                let numer = cofactor.mul(&inverted.pow(*power));
                Some(reduce_fraction(inverted, numer, m))
            }
            (RingDescriptor::SkewLaurent(s), RingElement::Skew(p)) => s.monomial_inverse(p).map(RingElement::Skew),
            _ => None,
        }
    }

    /// Every element of a finite ring in a fixed order.
    pub fn elements(&self) -> Option<Vec<RingElement>> {
        match self {
            RingDescriptor::Zero => Some(vec![RingElement::Zero]),
            RingDescriptor::Modular { n } => Some((0..*n).map(RingElement::Residue).collect()),
            RingDescriptor::Product { factors } => {
                let per: Option<Vec<Vec<RingElement>>> = factors.iter().map(|f| f.elements()).collect();
                let mut out: Vec<Vec<RingElement>> = vec![Vec::new()];
                for opts in per? {
                    out = out
                        .into_iter()
                        .flat_map(|prefix| {
                            opts.iter().map(move |o| {
                                let mut p = prefix.clone();
                                p.push(o.clone());
                                p
                            })
                        })
                        .collect();
                }
                Some(out.into_iter().map(RingElement::Tuple).collect())
            }
            RingDescriptor::Matrix { base, size } => Some(Matrix::enumerate(*size, base)?.into_iter().map(RingElement::Matrix).collect()),
            RingDescriptor::Semisimple { base, dims } => {
                let mut out: Vec<Vec<Matrix>> = vec![Vec::new()];
                for &d in dims {
                    let opts = Matrix::enumerate(d, base)?;
                    out = out
                        .into_iter()
                        .flat_map(|prefix| {
                            opts.iter().map(move |o| {
                                let mut p = prefix.clone();
                                p.push(o.clone());
                                p
                            })
                        })
                        .collect();
                }
                Some(out.into_iter().map(RingElement::Blocks).collect())
            }
            RingDescriptor::Poly { .. } | RingDescriptor::SkewLaurent(_) => None,
        }
    }

    /// Elements whose pairwise sums and products exercise the defining
    /// relations of an infinite class: matrix units, block units, the
    /// variable(s), and a couple of scalars.
    pub fn relation_sample(&self) -> Vec<RingElement> {
        if let Some(all) = self.elements() {
            return all;
        }
        let mut out = vec![self.zero(), self.one()];
        match self {
            RingDescriptor::Matrix { size, .. } => {
                for i in 0..*size {
                    for j in 0..*size {
                        out.push(RingElement::Matrix(Matrix::unit(*size, i, j)));
                    }
                }
            }
            RingDescriptor::Semisimple { dims, .. } => {
                for (b, &d) in dims.iter().enumerate() {
                    for i in 0..d {
                        for j in 0..d {
                            let blocks = dims
                                .iter()
                                .enumerate()
                                .map(|(c, &dd)| if c == b { Matrix::unit(dd, i, j) } else { Matrix::zero(dd) })
                                .collect();
                            out.push(RingElement::Blocks(blocks));
                        }
                    }
                }
            }
            RingDescriptor::Poly { inverted } => {
                out.push(RingElement::Fraction { num: UPoly::x(), power: 0 });
                out.push(RingElement::Fraction { num: UPoly::from_ints(&[2]), power: 0 });
                if !inverted.is_constant() {
                    out.push(RingElement::Fraction { num: UPoly::one(), power: 1 });
                }
            }
            RingDescriptor::SkewLaurent(s) => {
                for i in 0..s.nvars {
                    out.push(RingElement::Skew(SkewLaurentPoly::var(s.nvars, i)));
                    if s.inverted.contains(&i) {
                        let mut e = vec![0; s.nvars];
                        e[i] = -1;
                        out.push(RingElement::Skew(SkewLaurentPoly::monomial(e, crate::scalar::q(1))));
                    }
                }
            }
            _ => {}
        }
        out
    }

    /// Short human-readable rendering of an element.
    pub fn show(&self, x: &RingElement) -> String {
        match (self, x) {
            (RingDescriptor::Poly { inverted }, RingElement::Fraction { num, power }) => {
                if *power == 0 {
                    num.to_string()
                } else if *power == 1 {
                    format!("({num})/({inverted})")
                } else {
                    format!("({num})/({inverted})^{power}")
                }
            }
            _ => x.to_string(),
        }
    }
}

fn reduce_fraction(f: &UPoly, mut num: UPoly, mut power: u32) -> RingElement {
    if num.is_zero() {
        return RingElement::Fraction { num, power: 0 };
    }
    while power > 0 {
        let (quo, rem) = num.div_rem(f);
        if !rem.is_zero() {
            break;
        }
        num = quo;
        power -= 1;
    }
    RingElement::Fraction { num, power }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field = |b: &Field| match b {
            Field::Rationals => "Q".to_string(),
            Field::Prime(p) => format!("F{p}"),
        };
        match self {
            RingDescriptor::Zero => write!(f, "0"),
            RingDescriptor::Modular { n } => write!(f, "Z/{n}"),
            RingDescriptor::Product { factors } => {
                let parts: Vec<String> = factors
                    .iter()
                    .map(|x| if matches!(x, RingDescriptor::Product { .. }) { format!("({x})") } else { x.to_string() })
                    .collect();
                write!(f, "{}", parts.join(" x "))
            }
            RingDescriptor::Matrix { base, size } => write!(f, "M{size}({})", field(base)),
            RingDescriptor::Semisimple { base, dims } => {
                let parts: Vec<String> = dims.iter().map(|d| format!("M{d}({})", field(base))).collect();
                write!(f, "{}", parts.join(" x "))
            }
            RingDescriptor::Poly { inverted } => {
                if inverted.is_constant() {
                    write!(f, "Q[x]")
                } else {
                    write!(f, "Q[x][1/({inverted})]")
                }
            }
            RingDescriptor::SkewLaurent(s) => {
                let vars: Vec<String> = (0..s.nvars)
                    .map(|i| {
                        let mut e = vec![0; s.nvars];
                        e[i] = 1;
                        let name = crate::skewproj::monomial_label(&e);
                        if s.inverted.contains(&i) {
                            format!("{name}^±1")
                        } else {
                            name
                        }
                    })
                    .collect();
                write!(f, "Q_λ[{}]", vars.join(", "))
            }
        }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mat = |m: &Matrix| {
            let rows: Vec<String> = (0..m.n)
                .map(|i| {
                    let r: Vec<String> = (0..m.n).map(|j| crate::scalar::fmt_q(m.get(i, j))).collect();
                    format!("[{}]", r.join(","))
                })
                .collect();
            format!("[{}]", rows.join(","))
        };
        match self {
            RingElement::Zero => write!(f, "0"),
            RingElement::Residue(r) => write!(f, "{r}"),
            RingElement::Tuple(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            RingElement::Matrix(m) => write!(f, "{}", mat(m)),
            RingElement::Blocks(bs) => {
                let parts: Vec<String> = bs.iter().map(mat).collect();
                write!(f, "({})", parts.join(","))
            }
            RingElement::Fraction { num, power } => {
                if *power == 0 {
                    write!(f, "{num}")
                } else {
                    write!(f, "({num})/f^{power}")
                }
            }
            RingElement::Skew(p) => write!(f, "{p}"),
        }
    }
}

impl RingElement {
    pub fn residue(&self) -> Option<u64> {
        match self {
            RingElement::Residue(r) => Some(*r),
            _ => None,
        }
    }
}

/// Convenience for scalar rationals inside polynomial rings.
pub fn poly_element(p: UPoly) -> RingElement {
    RingElement::Fraction { num: p, power: 0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use proptest::prelude::*;

    fn z(n: u64) -> RingDescriptor {
        RingDescriptor::modular(n)
    }

    fn el(r: &RingDescriptor, op: RingOp, args: &[RingElement]) -> RingElement {
        match ring_eval(r, op, args).unwrap() {
            EvalResult::Element(e) => e,
            EvalResult::Bool(_) => panic!("expected element"),
        }
    }

    #[test]
    fn modular_arithmetic_examples() {
        let r = z(6);
        assert_eq!(el(&r, RingOp::Add, &[RingElement::Residue(4), RingElement::Residue(5)]), RingElement::Residue(3));
        assert!(is_unit(&r, &RingElement::Residue(5)).unwrap());
        assert!(!is_unit(&r, &RingElement::Residue(4)).unwrap());
        let x = RingElement::Residue(4);
        assert_eq!(el(&r, RingOp::Mul, &[r.one(), x.clone()]), x);
    }

    #[test]
    fn zero_ring_identity_is_zero() {
        let r = RingDescriptor::Zero;
        assert_eq!(r.one(), r.zero());
        assert!(is_unit(&r, &RingElement::Zero).unwrap());
        assert_eq!(enumerate_elements(&r).unwrap(), vec![RingElement::Zero]);
    }

    #[test]
    fn ownership_and_arity_errors() {
        let r = z(6);
        let e = ring_eval(&r, RingOp::Add, &[RingElement::Residue(7), RingElement::Residue(1)]).unwrap_err();
        assert_eq!(e.name(), "ElementOwnershipMismatch");
        let e = ring_eval(&r, RingOp::Neg, &[]).unwrap_err();
        assert_eq!(e.name(), "ArityMismatch");
    }

    #[test]
    fn enumeration_cardinalities() {
        assert_eq!(enumerate_elements(&z(6)).unwrap().len(), 6);
        assert_eq!(enumerate_elements(&RingDescriptor::matrix(Field::Prime(2), 2)).unwrap().len(), 16);
        let p = RingDescriptor::product(vec![z(2), z(3), RingDescriptor::semisimple(Field::Prime(2), vec![1, 2])]).unwrap();
        assert_eq!(enumerate_elements(&p).unwrap().len() as u64, p.cardinality().unwrap());
        assert_eq!(p.cardinality(), Some(2 * 3 * 2 * 16));
        assert_eq!(enumerate_elements(&RingDescriptor::poly()).unwrap_err().name(), "InfiniteRing");
    }

    #[test]
    fn matrix_units() {
        let r = RingDescriptor::matrix(Field::Rationals, 2);
        let singular = RingElement::Matrix(Matrix::from_rows(vec![vec![q(1), q(0)], vec![q(0), q(0)]]));
        assert!(!is_unit(&r, &singular).unwrap());
        assert!(is_unit(&r, &r.one()).unwrap());
        let s = RingDescriptor::semisimple(Field::Rationals, vec![1, 2]);
        let x = RingElement::Blocks(vec![Matrix::identity(1), Matrix::zero(2)]);
        assert!(!is_unit(&s, &x).unwrap());
    }

    #[test]
    fn poly_localization_units() {
        let f = UPoly::from_ints(&[-1, 0, 1]); // x^2 - 1
        let r = RingDescriptor::Poly { inverted: f.clone() };
        r.validate().unwrap();
        let x_minus_1 = poly_element(UPoly::from_ints(&[-1, 1]));
        assert!(is_unit(&r, &x_minus_1).unwrap());
        let inv = r.inverse(&x_minus_1).unwrap();
        assert_eq!(r.mul(&inv, &x_minus_1), r.one());
        assert!(!is_unit(&r, &poly_element(UPoly::x())).unwrap());
        assert!(is_unit(&RingDescriptor::poly(), &poly_element(UPoly::constant(q(3)))).unwrap());
        assert!(!is_unit(&RingDescriptor::poly(), &poly_element(UPoly::x())).unwrap());
    }

    #[test]
    fn product_normalization() {
        assert_eq!(RingDescriptor::product(vec![z(5)]).unwrap(), z(5));
        assert!(RingDescriptor::product(vec![]).is_err());
    }

    proptest! {
        #[test]
        fn modular_unit_iff_coprime(n in 1u64..60, x in 0u64..60) {
            let x = x % n;
            let r = z(n);
            let brute = (0..n).any(|y| (x * y) % n == 1 % n);
            prop_assert_eq!(is_unit(&r, &RingElement::Residue(x)).unwrap(), brute);
            prop_assert_eq!(brute, num_integer::gcd(x, n) == 1);
        }

        #[test]
        fn units_closed_under_products(n in 1u64..40, a in 0u64..40, b in 0u64..40) {
            let r = z(n);
            let (a, b) = (RingElement::Residue(a % n), RingElement::Residue(b % n));
            if r.inverse(&a).is_some() && r.inverse(&b).is_some() {
                prop_assert!(r.inverse(&r.mul(&a, &b)).is_some());
            }
        }
    }
}
