use serde::{Deserialize, Serialize};

use super::{RingDescriptor, RingElement};
use crate::error::{Error, Result};
use crate::scalar::Q;
use crate::skewproj::SkewLaurentPoly;

/// A map between described rings. Construction does not check the
/// homomorphism laws; [`hom_validate`] does.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingHom {
    pub source: RingDescriptor,
    pub target: RingDescriptor,
    pub rule: HomRule,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HomRule {
    /// Image of every source element (finite sources only).
    Table(Vec<(RingElement, RingElement)>),
    /// Images of the standard generators: `1` for `Z/n`, the unit vectors
    /// for products of cyclic rings, `x` for `Q[x]`, `x_1..x_n` for skew rings.
    Generators(Vec<RingElement>),
    Canonical(CanonicalMap),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CanonicalMap {
    Identity,
    /// The unique map to the zero ring.
    ToZero,
    /// `Z/m → Z/n` for `n | m`, `r ↦ r mod n`.
    Quotient,
    /// Elements carried over unchanged into a ring with more denominators
    /// (polynomial fractions, skew monomial cones).
    Inclusion,
    /// Product onto one factor.
    Projection(usize),
    /// `R → R × ⋯ × R`.
    Diagonal,
    /// `Z/n → eZ/n ≅ Z/m`, `r ↦ e·r`, for an idempotent `e`.
    IdempotentMul(RingElement),
    /// Block rearrangement between matrix-block rings: target block `t` is
    /// source block `k` for `Some(k)` and zero for `None`.
    Components(Vec<Option<usize>>),
    Factorwise(Vec<RingHom>),
    /// Set-theoretic section of a cyclic quotient, `Z/m → Z/n`, `r ↦ r`.
    /// Not additive by itself; used inside composites that are.
    Lift,
    /// `outer ∘ inner`.
    Composite(Box<RingHom>, Box<RingHom>),
}

impl RingHom {
    pub fn new(source: RingDescriptor, target: RingDescriptor, rule: HomRule) -> Self {
        RingHom { source, target, rule }
    }

    pub fn canonical(source: RingDescriptor, target: RingDescriptor, map: CanonicalMap) -> Self {
        RingHom { source, target, rule: HomRule::Canonical(map) }
    }

    pub fn identity(r: &RingDescriptor) -> Self {
        Self::canonical(r.clone(), r.clone(), CanonicalMap::Identity)
    }

    pub fn to_zero(r: &RingDescriptor) -> Self {
        Self::canonical(r.clone(), RingDescriptor::Zero, CanonicalMap::ToZero)
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.rule, HomRule::Canonical(CanonicalMap::Identity))
    }

    pub fn apply(&self, x: &RingElement) -> Result<RingElement> {
        self.source.check_owns(x)?;
        let out = self.apply_unchecked(x)?;
        if !self.target.owns(&out) {
            return Err(Error::NotAHomomorphism { witness: format!("image of {x} is not an element of {}", self.target) });
        }
        Ok(out)
    }

    fn apply_unchecked(&self, x: &RingElement) -> Result<RingElement> {
        let unsupported = || Error::UnsupportedClass { op: "hom apply".into(), ring: format!("{} -> {}", self.source, self.target) };
        match &self.rule {
            HomRule::Table(pairs) => pairs
                .iter()
                .find(|(a, _)| a == x)
                .map(|(_, b)| b.clone())
                .ok_or_else(|| Error::NotAHomomorphism { witness: format!("table has no image for {x}") }),
            HomRule::Generators(gens) => self.apply_generators(gens, x),
            HomRule::Canonical(map) => match map {
                CanonicalMap::Identity => Ok(x.clone()),
                CanonicalMap::ToZero => Ok(self.target.zero()),
                CanonicalMap::Quotient | CanonicalMap::Lift => match (&self.target, x) {
                    (RingDescriptor::Modular { n }, RingElement::Residue(r)) => Ok(RingElement::Residue(r % n)),
                    (t, RingElement::Zero) => Ok(t.zero()),
                    _ => Err(unsupported()),
                },
                CanonicalMap::Inclusion => match (&self.source, &self.target, x) {
                    (RingDescriptor::Poly { inverted: f }, RingDescriptor::Poly { inverted: g }, RingElement::Fraction { num, power }) => {
                        let (cof, rem) = g.div_rem(f);
                        if !rem.is_zero() {
                            return Err(unsupported());
                        }
                        let num = num.mul(&cof.pow(*power));
                        let t = &self.target;
                        // num / g^power, normalized through the ring arithmetic
                        let inv = t.inverse(&RingElement::Fraction { num: g.pow(*power), power: 0 }).ok_or_else(unsupported)?;
                        Ok(t.mul(&RingElement::Fraction { num, power: 0 }, &inv))
                    }
                    (RingDescriptor::SkewLaurent(_), RingDescriptor::SkewLaurent(_), e) => Ok(e.clone()),
                    _ => Err(unsupported()),
                },
                CanonicalMap::Projection(i) => match x {
                    RingElement::Tuple(xs) => xs.get(*i).cloned().ok_or_else(unsupported),
                    _ => Err(unsupported()),
                },
                CanonicalMap::Diagonal => match &self.target {
                    RingDescriptor::Product { factors } => Ok(RingElement::Tuple(vec![x.clone(); factors.len()])),
                    _ => Err(unsupported()),
                },
                CanonicalMap::IdempotentMul(e) => {
                    let ex = self.source.mul(e, x);
                    match (&self.target, ex) {
                        (RingDescriptor::Modular { n }, RingElement::Residue(r)) => Ok(RingElement::Residue(r % n)),
                        (t, _) if t.is_zero_ring() => Ok(t.zero()),
                        (t, ex) if t == &self.source => Ok(ex),
                        _ => Err(unsupported()),
                    }
                }
                CanonicalMap::Components(idx) => {
                    let blocks = blocks_of(x).ok_or_else(unsupported)?;
                    let dims = block_dims(&self.target).ok_or_else(unsupported)?;
                    if dims.len() != idx.len() {
                        return Err(unsupported());
                    }
                    let mut out = Vec::with_capacity(idx.len());
                    for (t, k) in idx.iter().enumerate() {
                        match k {
                            Some(k) => out.push(blocks.get(*k).cloned().ok_or_else(unsupported)?),
                            None => out.push(super::Matrix::zero(dims[t])),
                        }
                    }
                    Ok(from_blocks(&self.target, out))
                }
                CanonicalMap::Factorwise(hs) => match x {
                    RingElement::Tuple(xs) if xs.len() == hs.len() => {
                        let parts: Result<Vec<_>> = hs.iter().zip(xs).map(|(h, x)| h.apply(x)).collect();
                        let parts = parts?;
                        match &self.target {
                            RingDescriptor::Product { .. } => Ok(RingElement::Tuple(parts)),
                            _ => Err(unsupported()),
                        }
                    }
                    _ => Err(unsupported()),
                },
                CanonicalMap::Composite(outer, inner) => outer.apply(&inner.apply(x)?),
            },
        }
    }

    fn apply_generators(&self, gens: &[RingElement], x: &RingElement) -> Result<RingElement> {
        let t = &self.target;
        let unsupported = || Error::UnsupportedClass { op: "generator images".into(), ring: self.source.to_string() };
        match (&self.source, x) {
            (RingDescriptor::Zero, _) => Ok(t.zero()),
            (RingDescriptor::Modular { .. }, RingElement::Residue(r)) => {
                let g = gens.first().ok_or_else(unsupported)?;
                Ok(t.times(*r, g))
            }
            (RingDescriptor::Product { factors }, RingElement::Tuple(xs))
                if factors.iter().all(|f| matches!(f, RingDescriptor::Modular { .. } | RingDescriptor::Zero)) =>
            {
                if gens.len() != factors.len() {
                    return Err(unsupported());
                }
                let mut acc = t.zero();
                for (x, g) in xs.iter().zip(gens) {
                    let k = x.residue().unwrap_or(0);
                    acc = t.add(&acc, &t.times(k, g));
                }
                Ok(acc)
            }
            (RingDescriptor::Poly { inverted }, RingElement::Fraction { num, power }) => {
                let g = gens.first().ok_or_else(unsupported)?;
                let eval = |p: &crate::poly::UPoly| -> Result<RingElement> {
                    let mut acc = t.zero();
                    for c in p.coeffs().iter().rev() {
                        acc = t.mul(&acc, g);
                        acc = t.add(&acc, &scalar(t, c).ok_or_else(unsupported)?);
                    }
                    Ok(acc)
                };
                let top = eval(num)?;
                if *power == 0 {
                    return Ok(top);
                }
                let den = eval(inverted)?;
                let inv = t.inverse(&den).ok_or_else(|| Error::NotAHomomorphism {
                    witness: format!("the inverted polynomial {inverted} maps to the non-unit {den}"),
                })?;
                Ok(t.mul(&top, &t.pow(&inv, *power)))
            }
            (RingDescriptor::SkewLaurent(s), RingElement::Skew(p)) => {
                if gens.len() != s.nvars {
                    return Err(unsupported());
                }
                let mut acc = t.zero();
                for (e, c) in &p.terms {
                    let mut term = scalar(t, c).ok_or_else(unsupported)?;
                    for (i, &k) in e.iter().enumerate() {
                        let base = if k < 0 {
                            t.inverse(&gens[i]).ok_or_else(|| Error::NotAHomomorphism {
                                witness: format!("image of inverted variable {i} is not a unit"),
                            })?
                        } else {
                            gens[i].clone()
                        };
                        term = t.mul(&term, &t.pow(&base, k.unsigned_abs() as u32));
                    }
                    acc = t.add(&acc, &term);
                }
                Ok(acc)
            }
            _ => Err(unsupported()),
        }
    }

    /// Pointwise agreement on every element (finite source) or on the
    /// relation sample (infinite source).
    pub fn agrees_with(&self, other: &RingHom) -> Result<bool> {
        if self.source != other.source || self.target != other.target {
            return Ok(false);
        }
        for x in self.source.relation_sample() {
            if self.apply(&x)? != other.apply(&x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The full table of a hom with finite source.
    pub fn tabulate(&self) -> Result<RingHom> {
        let elems = super::enumerate_elements(&self.source)?;
        let pairs: Result<Vec<_>> = elems.into_iter().map(|x| self.apply(&x).map(|y| (x, y))).collect();
        Ok(RingHom::new(self.source.clone(), self.target.clone(), HomRule::Table(pairs?)))
    }
}

/// The scalar `c·1` in rings that are algebras over the rationals, and the
/// integer image in cyclic rings when the denominator is invertible.
pub(crate) fn scalar(r: &RingDescriptor, c: &Q) -> Option<RingElement> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    match r {
        RingDescriptor::Poly { .. } => Some(RingElement::Fraction { num: crate::poly::UPoly::constant(c.clone()), power: 0 }),
        RingDescriptor::SkewLaurent(s) => Some(RingElement::Skew(SkewLaurentPoly::monomial(vec![0; s.nvars], c.clone()))),
        RingDescriptor::Matrix { base, size } => {
            let mut m = super::Matrix::identity(*size);
            for v in m.entries.iter_mut() {
                *v = base.mul(v, &base.normalize(c.clone()));
            }
            Some(RingElement::Matrix(m))
        }
        RingDescriptor::Zero => Some(RingElement::Zero),
        RingDescriptor::Modular { n } => {
            let n_big = BigInt::from(*n);
            let num = c.numer().mod_floor(&n_big).to_u64()?;
            let den = c.denom().mod_floor(&n_big).to_u64()?;
            let den_inv = r.inverse(&RingElement::Residue(den))?;
            Some(r.mul(&RingElement::Residue(num), &den_inv))
        }
        _ => {
            let one = r.one();
            let blocks = blocks_of(&one)?;
            let base = match r {
                RingDescriptor::Semisimple { base, .. } => base.clone(),
                _ => return None,
            };
            let scaled = blocks
                .into_iter()
                .map(|mut m| {
                    for v in m.entries.iter_mut() {
                        *v = base.mul(v, &base.normalize(c.clone()));
                    }
                    m
                })
                .collect();
            Some(RingElement::Blocks(scaled))
        }
    }
}

pub(crate) fn blocks_of(x: &RingElement) -> Option<Vec<super::Matrix>> {
    match x {
        RingElement::Zero => Some(Vec::new()),
        RingElement::Matrix(m) => Some(vec![m.clone()]),
        RingElement::Blocks(bs) => Some(bs.clone()),
        _ => None,
    }
}

pub(crate) fn block_dims(r: &RingDescriptor) -> Option<Vec<usize>> {
    match r {
        RingDescriptor::Zero => Some(Vec::new()),
        RingDescriptor::Matrix { size, .. } => Some(vec![*size]),
        RingDescriptor::Semisimple { dims, .. } => Some(dims.clone()),
        _ => None,
    }
}

pub(crate) fn from_blocks(r: &RingDescriptor, blocks: Vec<super::Matrix>) -> RingElement {
    match r {
        RingDescriptor::Zero => RingElement::Zero,
        RingDescriptor::Matrix { .. } => RingElement::Matrix(blocks.into_iter().next().expect("one block")),
        _ => RingElement::Blocks(blocks),
    }
}

/// A homomorphism together with a note on how it was checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidatedHom {
    pub hom: RingHom,
    pub certificate: String,
}

/// Checks that `h` preserves `0`, `1`, `+` and `·`, exhaustively for finite
/// sources and on the relation sample otherwise, and that units go to units.
pub fn hom_validate(h: &RingHom) -> Result<ValidatedHom> {
    h.source.validate()?;
    h.target.validate()?;
    let sample = h.source.relation_sample();
    let src = &h.source;
    let tgt = &h.target;
    let one_img = h.apply(&src.one())?;
    if one_img != tgt.one() {
        return Err(Error::IdentityNotPreserved);
    }
    let images: Vec<RingElement> = sample.iter().map(|x| h.apply(x)).collect::<Result<_>>()?;
    for (i, a) in sample.iter().enumerate() {
        for (j, b) in sample.iter().enumerate() {
            let sum = h.apply(&src.add(a, b))?;
            let img_sum = tgt.add(&images[i], &images[j]);
            if sum != img_sum {
                return Err(Error::NotAHomomorphism {
                    witness: format!(
                        "{} + {} = {} maps to {}, but the images add to {}",
                        src.show(a),
                        src.show(b),
                        src.show(&src.add(a, b)),
                        tgt.show(&sum),
                        tgt.show(&img_sum)
                    ),
                });
            }
            let prod = h.apply(&src.mul(a, b))?;
            let img_prod = tgt.mul(&images[i], &images[j]);
            if prod != img_prod {
                return Err(Error::NotAHomomorphism {
                    witness: format!(
                        "{} * {} = {} maps to {}, but the images multiply to {}",
                        src.show(a),
                        src.show(b),
                        src.show(&src.mul(a, b)),
                        tgt.show(&prod),
                        tgt.show(&img_prod)
                    ),
                });
            }
        }
    }
    for (x, fx) in sample.iter().zip(&images) {
        if src.inverse(x).is_some() && tgt.inverse(fx).is_none() {
            return Err(Error::NotAHomomorphism { witness: format!("unit {} maps to non-unit {}", src.show(x), tgt.show(fx)) });
        }
    }
    let certificate = if src.is_finite() {
        format!("exhaustive over all {} elements", sample.len())
    } else {
        format!("checked on {} sample elements covering the defining relations", sample.len())
    };
    Ok(ValidatedHom { hom: h.clone(), certificate })
}

/// `g ∘ f`, validated.
pub fn hom_compose(g: &RingHom, f: &RingHom) -> Result<RingHom> {
    if f.target != g.source {
        return Err(Error::CompositionMismatch { detail: format!("{} is not {}", f.target, g.source) });
    }
    let composite = if f.is_identity() {
        g.clone()
    } else if g.is_identity() {
        f.clone()
    } else {
        RingHom::canonical(f.source.clone(), g.target.clone(), CanonicalMap::Composite(Box::new(g.clone()), Box::new(f.clone())))
    };
    hom_validate(&composite)?;
    Ok(composite)
}
