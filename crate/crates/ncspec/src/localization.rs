//! Universal localization at finite subsets for the supported ring classes.
//!
//! Every localization of a supported ring is presented canonically: finite
//! commutative rings become `eR ≅ Z/m` (componentwise for products), matrix
//! and semisimple rings keep a subset of their simple blocks, `Q[x]` gains a
//! squarefree denominator, and skew Laurent rings gain inverted variables.
//! The [`CellKey`] of a localization identifies it up to canonical
//! isomorphism, which is what the localization semilattice is built from.

use std::collections::{BTreeSet, HashMap};

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::poly::UPoly;
use crate::rings::{block_dims, blocks_of, from_blocks, hom_validate, CanonicalMap, FiniteRing, HomRule, Matrix, RingDescriptor, RingElement, RingHom};
use crate::skewproj::SkewLaurentPoly;

/// Canonical identity of a localization of a fixed ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellKey {
    /// The zero ring has a single localization.
    Trivial,
    /// `Z/n` localized to `eZ/n` for the idempotent `e`.
    Idempotent(u64),
    /// Which simple blocks survive (a matrix ring has one block).
    Blocks(Vec<bool>),
    Factors(Vec<CellKey>),
    /// `Q[x]` with this monic squarefree polynomial inverted.
    Inverted(UPoly),
    /// Skew Laurent ring with these variables inverted.
    Cone(BTreeSet<usize>),
    /// The zero ring, reached from an infinite ring.
    Collapsed,
}

/// `loc(R, E)` with its insertion map and, for each member of `E`, the
/// inverse of its image.
#[derive(Debug, Clone)]
pub struct Localization {
    pub source: RingDescriptor,
    pub subset: Vec<RingElement>,
    pub result: RingDescriptor,
    pub insertion: RingHom,
    pub inverse_witnesses: Vec<(RingElement, RingElement)>,
    pub key: CellKey,
}

impl Localization {
    /// The idempotent `e` with `loc = eR`, for cyclic sources.
    pub fn idempotent(&self) -> Option<u64> {
        match self.key {
            CellKey::Idempotent(e) => Some(e),
            _ => None,
        }
    }
}

pub fn localize(r: &RingDescriptor, subset: &[RingElement]) -> Result<Localization> {
    r.validate()?;
    for x in subset {
        r.check_owns(x)?;
    }
    let (result, map, key) = parts(r, subset)?;
    let insertion = RingHom::canonical(r.clone(), result.clone(), map);
    let mut inverse_witnesses = Vec::with_capacity(subset.len());
    for a in subset {
        let image = insertion.apply(a)?;
        let inv = result.inverse(&image).ok_or_else(|| Error::NotAHomomorphism {
            witness: format!("{} is not inverted by the computed localization of {r}", r.show(a)),
        })?;
        inverse_witnesses.push((a.clone(), inv));
    }
    Ok(Localization { source: r.clone(), subset: subset.to_vec(), result, insertion, inverse_witnesses, key })
}

fn parts(r: &RingDescriptor, subset: &[RingElement]) -> Result<(RingDescriptor, CanonicalMap, CellKey)> {
    use CanonicalMap as M;
    Ok(match r {
        RingDescriptor::Zero => (RingDescriptor::Zero, M::Identity, CellKey::Trivial),
        RingDescriptor::Modular { n } => {
            if *n == 1 {
                return Ok((r.clone(), M::Identity, CellKey::Trivial));
            }
            let f = subset.iter().fold(1u64, |acc, x| mulmod(acc, x.residue().unwrap_or(0), *n));
            let e = idempotent_power(f, *n);
            let m = n / e.gcd(n);
            if e == 1 {
                (r.clone(), M::Identity, CellKey::Idempotent(1))
            } else if m == 1 {
                (RingDescriptor::Zero, M::ToZero, CellKey::Idempotent(0))
            } else {
                (RingDescriptor::modular(m), M::IdempotentMul(RingElement::Residue(e)), CellKey::Idempotent(e))
            }
        }
        RingDescriptor::Product { factors } => {
            let mut results = Vec::new();
            let mut homs = Vec::new();
            let mut keys = Vec::new();
            for (i, f) in factors.iter().enumerate() {
                let proj: Vec<RingElement> = subset
                    .iter()
                    .map(|x| match x {
                        RingElement::Tuple(xs) => xs[i].clone(),
                        _ => unreachable!("ownership checked"),
                    })
                    .collect();
                let (res, map, key) = parts(f, &proj)?;
                homs.push(RingHom::canonical(f.clone(), res.clone(), map));
                results.push(res);
                keys.push(key);
            }
            let key = CellKey::Factors(keys);
            if results.iter().all(|x| x.is_zero_ring()) {
                (RingDescriptor::Zero, M::ToZero, key)
            } else if homs.iter().all(|h| h.is_identity()) {
                (r.clone(), M::Identity, key)
            } else {
                (RingDescriptor::Product { factors: results }, M::Factorwise(homs), key)
            }
        }
        RingDescriptor::Matrix { base, .. } => {
            let all_units = subset.iter().all(|x| matches!(x, RingElement::Matrix(m) if m.is_invertible(base)));
            if all_units {
                (r.clone(), M::Identity, CellKey::Blocks(vec![true]))
            } else {
                (RingDescriptor::Zero, M::ToZero, CellKey::Blocks(vec![false]))
            }
        }
        RingDescriptor::Semisimple { base, dims } => {
            let mask: Vec<bool> = (0..dims.len())
                .map(|j| subset.iter().all(|x| matches!(x, RingElement::Blocks(bs) if bs[j].is_invertible(base))))
                .collect();
            let kept: Vec<usize> = (0..dims.len()).filter(|&j| mask[j]).collect();
            let key = CellKey::Blocks(mask);
            if kept.is_empty() {
                (RingDescriptor::Zero, M::ToZero, key)
            } else if kept.len() == dims.len() {
                (r.clone(), M::Identity, key)
            } else {
                let result = RingDescriptor::semisimple(base.clone(), kept.iter().map(|&j| dims[j]).collect());
                (result, M::Components(kept.into_iter().map(Some).collect()), key)
            }
        }
        RingDescriptor::Poly { inverted } => {
            let mut prod = inverted.clone();
            for x in subset {
                if let RingElement::Fraction { num, .. } = x {
                    prod = prod.mul(num);
                }
            }
            if prod.is_zero() {
                return Ok((RingDescriptor::Zero, M::ToZero, CellKey::Collapsed));
            }
            let g = prod.squarefree_part().monic();
            if &g == inverted {
                (r.clone(), M::Identity, CellKey::Inverted(g))
            } else {
                (RingDescriptor::Poly { inverted: g.clone() }, M::Inclusion, CellKey::Inverted(g))
            }
        }
        RingDescriptor::SkewLaurent(s) => {
            let mut inverted = s.inverted.clone();
            let mut collapsed = false;
            for x in subset {
                let p = match x {
                    RingElement::Skew(p) => p,
                    _ => unreachable!("ownership checked"),
                };
                if p.is_zero() {
                    collapsed = true;
                    continue;
                }
                let (exp, _) = p.as_monomial().ok_or_else(|| Error::NonMonomialSkewSubset { element: p.to_string() })?;
                inverted.extend(exp.iter().enumerate().filter(|(_, &k)| k != 0).map(|(i, _)| i));
            }
            if collapsed {
                (RingDescriptor::Zero, M::ToZero, CellKey::Collapsed)
            } else if inverted == s.inverted {
                (r.clone(), M::Identity, CellKey::Cone(inverted))
            } else {
                (RingDescriptor::SkewLaurent(s.with_inverted(inverted.clone())), M::Inclusion, CellKey::Cone(inverted))
            }
        }
    })
}

fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// The unique idempotent among the powers of `f` modulo `n`.
pub fn idempotent_power(f: u64, n: u64) -> u64 {
    let mut seen: HashMap<u64, u64> = HashMap::new();
    let mut x = f % n;
    let mut k = 1u64;
    let (pre, period) = loop {
        if let Some(&first) = seen.get(&x) {
            break (first, k - first);
        }
        seen.insert(x, k);
        x = mulmod(x, f, n);
        k += 1;
    };
    let j = pre.div_ceil(period) * period;
    let mut e = 1 % n;
    for _ in 0..j {
        e = mulmod(e, f, n);
    }
    e
}

/// `A ⪯ B`: every member of `A` becomes a unit in `loc(R, B)`.
pub fn subset_leq(r: &RingDescriptor, a: &[RingElement], b: &[RingElement]) -> Result<bool> {
    let lb = localize(r, b)?;
    for x in a {
        r.check_owns(x)?;
        if lb.result.inverse(&lb.insertion.apply(x)?).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Structural form of `⪯` on cell keys of the same ring.
pub fn key_leq(r: &RingDescriptor, a: &CellKey, b: &CellKey) -> bool {
    match (r, a, b) {
        (_, _, CellKey::Collapsed) => true,
        (_, CellKey::Collapsed, _) => false,
        (_, CellKey::Trivial, _) => true,
        (RingDescriptor::Modular { n }, CellKey::Idempotent(ea), CellKey::Idempotent(eb)) => mulmod(*ea, *eb, *n) == *eb,
        (_, CellKey::Blocks(ma), CellKey::Blocks(mb)) => mb.iter().zip(ma).all(|(&y, &x)| !y || x),
        (RingDescriptor::Product { factors }, CellKey::Factors(ka), CellKey::Factors(kb)) => {
            factors.iter().zip(ka.iter().zip(kb)).all(|(f, (x, y))| key_leq(f, x, y))
        }
        (_, CellKey::Inverted(f), CellKey::Inverted(g)) => f.divides(g),
        (_, CellKey::Cone(x), CellKey::Cone(y)) => x.is_subset(y),
        _ => false,
    }
}

/// The map `p_BA: loc(R,A) → loc(R,B)` compatible with the insertions.
pub fn connecting_map(r: &RingDescriptor, a: &[RingElement], b: &[RingElement]) -> Result<RingHom> {
    if !subset_leq(r, a, b)? {
        return Err(Error::NotComparable { detail: format!("{} is not below {} in {r}", show_set(r, a), show_set(r, b)) });
    }
    let la = localize(r, a)?;
    let lb = localize(r, b)?;
    connect(&la, &lb)
}

/// `p_BA` from two already computed localizations of the same ring.
pub fn connect(la: &Localization, lb: &Localization) -> Result<RingHom> {
    let map = connect_map(&la.source, &la.key, &la.result, &lb.key, &lb.result)?;
    let h = RingHom::canonical(la.result.clone(), lb.result.clone(), map);
    hom_validate(&h)?;
    for x in la.source.relation_sample() {
        if h.apply(&la.insertion.apply(&x)?)? != lb.insertion.apply(&x)? {
            return Err(Error::NotComparable { detail: format!("connecting map does not fix the image of {x}") });
        }
    }
    Ok(h)
}

fn connect_map(r: &RingDescriptor, ka: &CellKey, ra: &RingDescriptor, kb: &CellKey, rb: &RingDescriptor) -> Result<CanonicalMap> {
    use CanonicalMap as M;
    if ka == kb {
        return Ok(M::Identity);
    }
    if rb.is_zero_ring() {
        return Ok(M::ToZero);
    }
    Ok(match (r, ka, kb, ra, rb) {
        (RingDescriptor::Modular { .. }, _, _, _, _) => M::Quotient,
        (RingDescriptor::Product { factors }, CellKey::Factors(fa), CellKey::Factors(fb), _, _) => {
            let parts_a = factor_results(r, ra);
            let parts_b = factor_results(r, rb);
            let mut homs = Vec::new();
            for (i, f) in factors.iter().enumerate() {
                let m = connect_map(f, &fa[i], &parts_a[i], &fb[i], &parts_b[i])?;
                homs.push(RingHom::canonical(parts_a[i].clone(), parts_b[i].clone(), m));
            }
            M::Factorwise(homs)
        }
        (_, CellKey::Blocks(ma), CellKey::Blocks(mb), _, _) => {
            let za: Vec<usize> = (0..ma.len()).filter(|&j| ma[j]).collect();
            let idx = (0..mb.len()).filter(|&j| mb[j]).map(|j| za.iter().position(|&k| k == j)).collect();
            M::Components(idx)
        }
        (RingDescriptor::Poly { .. }, ..) | (RingDescriptor::SkewLaurent(_), ..) => M::Inclusion,
        _ => return Err(Error::UnsupportedClass { op: "connecting_map".into(), ring: r.to_string() }),
    })
}

/// The per-factor localized rings of a product localization.
fn factor_results(r: &RingDescriptor, result: &RingDescriptor) -> Vec<RingDescriptor> {
    match (r, result) {
        (RingDescriptor::Product { .. }, RingDescriptor::Product { factors }) => factors.clone(),
        (RingDescriptor::Product { factors }, res) if res.is_zero_ring() => vec![RingDescriptor::Zero; factors.len()],
        _ => unreachable!("product localizations are products or zero"),
    }
}

/// A set-theoretic section of a surjective insertion, `loc(R,A) → R`.
pub fn section_of(insertion: &RingHom) -> Result<RingHom> {
    use CanonicalMap as M;
    let (src, tgt) = (insertion.target.clone(), insertion.source.clone());
    let map = match &insertion.rule {
        HomRule::Canonical(M::Identity) => M::Identity,
        HomRule::Canonical(M::ToZero) | HomRule::Canonical(M::Quotient) | HomRule::Canonical(M::IdempotentMul(_)) => M::Lift,
        HomRule::Canonical(M::Factorwise(hs)) => M::Factorwise(hs.iter().map(section_of).collect::<Result<_>>()?),
        HomRule::Canonical(M::Components(idx)) => {
            let n = block_dims(&tgt).map_or(0, |d| d.len());
            M::Components((0..n).map(|j| idx.iter().position(|k| *k == Some(j))).collect())
        }
        _ => return Err(Error::UnsupportedClass { op: "section of localization".into(), ring: tgt.to_string() }),
    };
    Ok(RingHom::canonical(src, tgt, map))
}

/// `θ_A: loc(R,A) → loc(S,θ(A))` with `θ_A ∘ α_A = α_{θ(A)} ∘ θ`.
pub fn induced_map(theta: &RingHom, a: &[RingElement]) -> Result<RingHom> {
    let la = localize(&theta.source, a)?;
    let images: Vec<RingElement> = a.iter().map(|x| theta.apply(x)).collect::<Result<_>>()?;
    let lt = localize(&theta.target, &images)?;
    induced_between(theta, &la, &lt)
}

/// [`induced_map`] for localizations that are already computed.
pub fn induced_between(theta: &RingHom, la: &Localization, lt: &Localization) -> Result<RingHom> {
    let (src, tgt) = (la.result.clone(), lt.result.clone());
    let h = if tgt.is_zero_ring() {
        RingHom::canonical(src, tgt, CanonicalMap::ToZero)
    } else if theta.is_identity() && la.key == lt.key {
        RingHom::canonical(src, tgt, CanonicalMap::Identity)
    } else if let Some(elems) = theta.source.elements() {
        let mut pairs: Vec<(RingElement, RingElement)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for x in elems {
            let y = la.insertion.apply(&x)?;
            if seen.insert(y.clone()) {
                pairs.push((y, lt.insertion.apply(&theta.apply(&x)?)?));
            }
        }
        RingHom::new(src, tgt, HomRule::Table(pairs))
    } else {
        match &la.result {
            RingDescriptor::Poly { .. } => {
                let x = crate::rings::poly_element(UPoly::x());
                RingHom::new(src, tgt, HomRule::Generators(vec![lt.insertion.apply(&theta.apply(&x)?)?]))
            }
            RingDescriptor::SkewLaurent(s) => {
                let gens = (0..s.nvars)
                    .map(|i| lt.insertion.apply(&theta.apply(&RingElement::Skew(SkewLaurentPoly::var(s.nvars, i)))?))
                    .collect::<Result<_>>()?;
                RingHom::new(src, tgt, HomRule::Generators(gens))
            }
            _ => {
                let lift = section_of(&la.insertion)?;
                let inner = RingHom::canonical(la.result.clone(), theta.target.clone(), CanonicalMap::Composite(Box::new(theta.clone()), Box::new(lift)));
                RingHom::canonical(src, tgt, CanonicalMap::Composite(Box::new(lt.insertion.clone()), Box::new(inner)))
            }
        }
    };
    hom_validate(&h)?;
    for x in theta.source.relation_sample() {
        let left = h.apply(&la.insertion.apply(&x)?)?;
        let right = lt.insertion.apply(&theta.apply(&x)?)?;
        if left != right {
            return Err(Error::NotAHomomorphism { witness: format!("induced map square fails at {}", theta.source.show(&x)) });
        }
    }
    Ok(h)
}

/// A square of ring maps
///
/// ```text
///   TL --top--> TR
///   |           |
///  left       right
///   v           v
///   BL -bottom> BR
/// ```
#[derive(Debug, Clone)]
pub struct LocalizationSquare {
    pub top: RingHom,
    pub left: RingHom,
    pub right: RingHom,
    pub bottom: RingHom,
}

impl LocalizationSquare {
    pub fn corners(&self) -> [&RingDescriptor; 4] {
        [&self.top.source, &self.top.target, &self.left.target, &self.right.target]
    }

    fn well_shaped(&self) -> bool {
        self.top.source == self.left.source
            && self.right.source == self.top.target
            && self.bottom.source == self.left.target
            && self.right.target == self.bottom.target
    }

    /// `right ∘ top = bottom ∘ left` on every element (finite corner) or the
    /// relation sample.
    pub fn commutes(&self) -> Result<bool> {
        for x in self.top.source.relation_sample() {
            if self.right.apply(&self.top.apply(&x)?)? != self.bottom.apply(&self.left.apply(&x)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The square formed by `θ_A`, `θ_B` and the two connecting maps.
pub fn localization_square(theta: &RingHom, a: &[RingElement], b: &[RingElement]) -> Result<LocalizationSquare> {
    let (s, t) = (&theta.source, &theta.target);
    if !subset_leq(s, a, b)? {
        return Err(Error::NotComparable { detail: format!("{} is not below {} in {s}", show_set(s, a), show_set(s, b)) });
    }
    let ta: Vec<RingElement> = a.iter().map(|x| theta.apply(x)).collect::<Result<_>>()?;
    let tb: Vec<RingElement> = b.iter().map(|x| theta.apply(x)).collect::<Result<_>>()?;
    let (la, lb) = (localize(s, a)?, localize(s, b)?);
    let (lta, ltb) = (localize(t, &ta)?, localize(t, &tb)?);
    let sq = LocalizationSquare {
        top: induced_between(theta, &la, &lta)?,
        left: connect(&la, &lb)?,
        right: connect(&lta, &ltb)?,
        bottom: induced_between(theta, &lb, &ltb)?,
    };
    if !sq.commutes()? {
        return Err(Error::UnverifiableSquare { detail: "localization square does not commute".into() });
    }
    Ok(sq)
}

/// Whether the square is a pushout, tested against the probe rings when all
/// corners are finite and structurally when every map is a block projection.
pub fn is_pushout(sq: &LocalizationSquare, probes: &[RingDescriptor]) -> Result<bool> {
    if !sq.well_shaped() {
        return Err(Error::CompositionMismatch { detail: "square corners do not match".into() });
    }
    if !sq.commutes()? {
        return Ok(false);
    }
    if sq.corners().iter().all(|c| c.is_finite()) {
        return finite_pushout(sq, probes);
    }
    if let Some(answer) = block_pushout(sq)? {
        return Ok(answer);
    }
    if [&sq.top, &sq.left, &sq.right, &sq.bottom].iter().all(|h| h.is_identity()) {
        return Ok(true);
    }
    Err(Error::UnverifiableSquare { detail: format!("corners {} have no decision procedure", sq.corners().map(|c| c.to_string()).join(", ")) })
}

fn finite_pushout(sq: &LocalizationSquare, probes: &[RingDescriptor]) -> Result<bool> {
    let [tl, tr, bl, br] = sq.corners().map(FiniteRing::new);
    let (tl, tr, bl, br) = (tl?, tr?, bl?, br?);
    let top = tl.table_of(&sq.top, &tr)?;
    let left = tl.table_of(&sq.left, &bl)?;
    let right = tr.table_of(&sq.right, &br)?;
    let bottom = bl.table_of(&sq.bottom, &br)?;
    for probe in probes {
        if !probe.is_finite() {
            return Err(Error::UnverifiableSquare { detail: format!("probe ring {probe} is infinite") });
        }
        let t = FiniteRing::new(probe)?;
        let lambdas = tr.homs_to(&t);
        let mus = bl.homs_to(&t);
        let nus = br.homs_to(&t);
        for lam in &lambdas {
            for mu in &mus {
                if (0..tl.len()).any(|x| lam[top[x]] != mu[left[x]]) {
                    continue;
                }
                let mediating = nus
                    .iter()
                    .filter(|nu| (0..tr.len()).all(|y| nu[right[y]] == lam[y]) && (0..bl.len()).all(|y| nu[bottom[y]] == mu[y]))
                    .count();
                if mediating != 1 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// How a projection between block rings moves blocks, if it is one.
fn block_projection(h: &RingHom) -> Result<Option<Vec<Option<usize>>>> {
    let (Some(sd), Some(td)) = (block_dims(&h.source), block_dims(&h.target)) else {
        return Ok(None);
    };
    let mut out = Vec::with_capacity(sd.len());
    for (i, &d) in sd.iter().enumerate() {
        let unit = |a: usize, b: usize| {
            let blocks = sd.iter().enumerate().map(|(k, &dk)| if k == i { Matrix::unit(dk, a, b) } else { Matrix::zero(dk) }).collect();
            from_blocks(&h.source, blocks)
        };
        let idem = sd.iter().enumerate().map(|(k, &dk)| if k == i { Matrix::identity(dk) } else { Matrix::zero(dk) }).collect();
        let img = blocks_of(&h.apply(&from_blocks(&h.source, idem))?).unwrap_or_default();
        let hit: Vec<usize> = (0..td.len()).filter(|&j| img[j] != Matrix::zero(td[j])).collect();
        match hit.as_slice() {
            [] => out.push(None),
            [j] if td[*j] == d => {
                // the block must be carried over entry by entry
                for a in 0..d {
                    for b in 0..d {
                        let got = blocks_of(&h.apply(&unit(a, b))?).unwrap_or_default();
                        if got.get(*j) != Some(&Matrix::unit(d, a, b)) {
                            return Ok(None);
                        }
                    }
                }
                out.push(Some(*j));
            }
            _ => return Ok(None),
        }
    }
    let mut targets: Vec<usize> = out.iter().flatten().copied().collect();
    targets.sort_unstable();
    targets.dedup();
    if targets.len() != out.iter().flatten().count() || targets.len() != td.len() {
        return Ok(None);
    }
    Ok(Some(out))
}

fn block_pushout(sq: &LocalizationSquare) -> Result<Option<bool>> {
    let maps = [&sq.top, &sq.left, &sq.right, &sq.bottom].map(block_projection);
    let [top, left, right, bottom] = maps;
    let (Some(top), Some(left), Some(right), Some(bottom)) = (top?, left?, right?, bottom?) else {
        return Ok(None);
    };
    // the pushout of two block projections keeps the blocks kept by both
    let mut reached = Vec::new();
    for i in 0..top.len() {
        let via_top = top[i].and_then(|j| right[j]);
        let via_left = left[i].and_then(|j| bottom[j]);
        if via_top != via_left {
            return Ok(Some(false));
        }
        let kept_by_both = top[i].is_some() && left[i].is_some();
        if kept_by_both != via_top.is_some() {
            return Ok(Some(false));
        }
        reached.extend(via_top);
    }
    let br_blocks = block_dims(&sq.right.target).map_or(0, |d| d.len());
    reached.sort_unstable();
    reached.dedup();
    Ok(Some(reached.len() == br_blocks))
}

/// Default probe family for a square: its corners and the zero ring.
pub fn default_probes(sq: &LocalizationSquare) -> Vec<RingDescriptor> {
    let mut out: Vec<RingDescriptor> = sq.corners().into_iter().cloned().collect();
    out.push(RingDescriptor::Zero);
    out.sort();
    out.dedup();
    out
}

pub(crate) fn show_set(r: &RingDescriptor, xs: &[RingElement]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| r.show(x)).collect();
    format!("{{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{hom_compose, RingHom};
    use crate::scalar::{q, Field};
    use proptest::prelude::*;

    fn z(n: u64) -> RingDescriptor {
        RingDescriptor::modular(n)
    }

    fn res(k: u64) -> RingElement {
        RingElement::Residue(k)
    }

    #[test]
    fn trivial_localizations() {
        let r = z(6);
        let l = localize(&r, &[r.one()]).unwrap();
        assert_eq!(l.result, r);
        assert!(l.insertion.is_identity());
        assert!(localize(&r, &[r.zero()]).unwrap().result.is_zero_ring());
    }

    #[test]
    fn z6_at_two_is_z3_via_four() {
        let l = localize(&z(6), &[res(2)]).unwrap();
        assert_eq!(l.result, z(3));
        assert_eq!(l.idempotent(), Some(4));
        assert_eq!(l.insertion.apply(&res(1)).unwrap(), res(1));
        assert_eq!(l.insertion.apply(&res(2)).unwrap(), res(2));
        let (a, w) = &l.inverse_witnesses[0];
        assert_eq!(z(3).mul(&l.insertion.apply(a).unwrap(), w), z(3).one());
    }

    #[test]
    fn singular_matrix_kills_matrix_ring() {
        let r = RingDescriptor::matrix(Field::Rationals, 2);
        let singular = RingElement::Matrix(Matrix::from_rows(vec![vec![q(1), q(0)], vec![q(0), q(0)]]));
        assert!(localize(&r, &[r.one(), singular]).unwrap().result.is_zero_ring());
        assert_eq!(localize(&r, &[r.one()]).unwrap().result, r);
    }

    #[test]
    fn semisimple_keeps_invertible_blocks() {
        let r = RingDescriptor::semisimple(Field::Rationals, vec![1, 2, 1]);
        let x = RingElement::Blocks(vec![Matrix::identity(1), Matrix::zero(2), Matrix::identity(1)]);
        let l = localize(&r, &[x]).unwrap();
        assert_eq!(l.result, RingDescriptor::semisimple(Field::Rationals, vec![1, 1]));
        assert_eq!(l.key, CellKey::Blocks(vec![true, false, true]));
    }

    #[test]
    fn poly_and_skew_localizations() {
        let r = RingDescriptor::poly();
        let h = crate::rings::poly_element(UPoly::from_ints(&[1, 2, 1])); // (x+1)^2
        let l = localize(&r, &[h]).unwrap();
        assert_eq!(l.result, RingDescriptor::Poly { inverted: UPoly::from_ints(&[1, 1]) });

        let s = crate::skewproj::SkewSpec::uniform(2, q(2));
        let sr = RingDescriptor::SkewLaurent(s.clone());
        let x = RingElement::Skew(SkewLaurentPoly::var(2, 0));
        let l = localize(&sr, &[x.clone()]).unwrap();
        assert_eq!(l.key, CellKey::Cone([0].into_iter().collect()));
        let sum = RingElement::Skew(SkewLaurentPoly::var(2, 0).add(&SkewLaurentPoly::var(2, 1)).unwrap());
        assert_eq!(localize(&sr, &[sum]).unwrap_err().name(), "NonMonomialSkewSubset");
        assert!(localize(&sr, &[sr.zero()]).unwrap().result.is_zero_ring());
    }

    #[test]
    fn order_examples() {
        let r = z(6);
        assert!(subset_leq(&r, &[res(2)], &[res(4)]).unwrap());
        assert!(!subset_leq(&r, &[res(2)], &[res(3)]).unwrap());
        for x in 0..6 {
            assert!(subset_leq(&r, &[res(1)], &[res(x)]).unwrap());
            assert!(subset_leq(&r, &[res(x)], &[res(0)]).unwrap());
        }
    }

    #[test]
    fn connecting_map_examples() {
        let r = z(6);
        let p = connecting_map(&r, &[res(2)], &[res(2)]).unwrap();
        assert!(p.is_identity());
        let p = connecting_map(&r, &[res(2)], &[res(0)]).unwrap();
        assert!(p.target.is_zero_ring());
        let p = connecting_map(&r, &[res(1)], &[res(2)]).unwrap();
        let ins = localize(&r, &[res(2)]).unwrap().insertion;
        assert!(p.agrees_with(&ins).unwrap());
        assert_eq!(connecting_map(&r, &[res(2)], &[res(3)]).unwrap_err().name(), "NotComparable");
    }

    #[test]
    fn induced_map_examples() {
        let theta = RingHom::canonical(z(6), z(3), CanonicalMap::Quotient);
        let t = induced_map(&theta, &[res(2)]).unwrap();
        assert_eq!((t.source.clone(), t.target.clone()), (z(3), z(3)));
        assert!(t.agrees_with(&RingHom::identity(&z(3))).unwrap());
        let t0 = induced_map(&theta, &[res(0)]).unwrap();
        assert!(t0.source.is_zero_ring() && t0.target.is_zero_ring());
        let id = RingHom::identity(&z(6));
        assert!(induced_map(&id, &[res(3)]).unwrap().is_identity());
    }

    #[test]
    fn induced_map_over_infinite_block_rings() {
        let a = RingDescriptor::semisimple(Field::Rationals, vec![1, 2]);
        let b = RingDescriptor::matrix(Field::Rationals, 2);
        let proj = RingHom::canonical(a.clone(), b.clone(), CanonicalMap::Components(vec![Some(1)]));
        hom_validate(&proj).unwrap();
        let e2 = RingElement::Blocks(vec![Matrix::zero(1), Matrix::identity(2)]);
        let t = induced_map(&proj, &[e2]).unwrap();
        assert_eq!(t.source, RingDescriptor::semisimple(Field::Rationals, vec![2]));
        assert_eq!(t.target, b);
    }

    #[test]
    fn pushout_examples() {
        let theta = RingHom::canonical(z(6), z(3), CanonicalMap::Quotient);
        let sq = localization_square(&theta, &[res(1)], &[res(2)]).unwrap();
        let probes = vec![z(2), z(3), z(6), RingDescriptor::Zero];
        assert!(is_pushout(&sq, &probes).unwrap());

        let mut broken = sq.clone();
        broken.right = RingHom::to_zero(&broken.right.source);
        broken.bottom = RingHom::to_zero(&broken.bottom.source);
        assert!(!is_pushout(&broken, &probes).unwrap());

        let id = RingHom::identity(&z(6));
        let degenerate = LocalizationSquare { top: id.clone(), left: id.clone(), right: id.clone(), bottom: id };
        assert!(is_pushout(&degenerate, &probes).unwrap());
    }

    #[test]
    fn block_pushout_structural() {
        let a = RingDescriptor::semisimple(Field::Rationals, vec![1, 1]);
        let id = RingHom::identity(&a);
        let e1 = RingElement::Blocks(vec![Matrix::identity(1), Matrix::zero(1)]);
        let sq = localization_square(&id, &[a.one()], &[e1]).unwrap();
        assert!(is_pushout(&sq, &[]).unwrap());
    }

    #[test]
    fn functor_square_on_quotients() {
        let f = RingHom::canonical(z(12), z(6), CanonicalMap::Quotient);
        let g = RingHom::canonical(z(6), z(3), CanonicalMap::Quotient);
        let gf = hom_compose(&g, &f).unwrap();
        for e in 0..12 {
            let lhs = induced_map(&gf, &[res(e)]).unwrap();
            let fe = f.apply(&res(e)).unwrap();
            let rhs = hom_compose(&induced_map(&g, &[fe]).unwrap(), &induced_map(&f, &[res(e)]).unwrap()).unwrap();
            assert!(lhs.agrees_with(&rhs).unwrap(), "e = {e}");
        }
    }

    proptest! {
        #[test]
        fn idempotent_power_is_idempotent_power(n in 1u64..200, f in 0u64..200) {
            let f = f % n;
            let e = idempotent_power(f, n);
            prop_assert_eq!(mulmod(e, e, n), e);
            // e is some power of f
            let mut x = 1 % n;
            let mut found = false;
            for _ in 0..=2 * n {
                if x == e { found = true; break; }
                x = mulmod(x, f, n);
            }
            prop_assert!(found);
        }

        #[test]
        fn key_order_matches_unit_test(n in 2u64..40, a in 0u64..40, b in 0u64..40) {
            let r = z(n);
            let (a, b) = (res(a % n), res(b % n));
            let ka = localize(&r, &[a.clone()]).unwrap().key;
            let kb = localize(&r, &[b.clone()]).unwrap().key;
            prop_assert_eq!(key_leq(&r, &ka, &kb), subset_leq(&r, &[a], &[b]).unwrap());
        }

        #[test]
        fn product_of_subset_gives_same_cell(n in 2u64..40, xs in proptest::collection::vec(0u64..40, 1..4)) {
            let r = z(n);
            let elems: Vec<RingElement> = xs.iter().map(|x| res(x % n)).collect();
            let prod = elems.iter().fold(r.one(), |acc, x| r.mul(&acc, x));
            prop_assert_eq!(localize(&r, &elems).unwrap().key, localize(&r, &[prod]).unwrap().key);
        }

        #[test]
        fn transitivity_of_connecting_maps(a in 0u64..12, b in 0u64..12, c in 0u64..12) {
            let r = z(12);
            let (a, b, c) = ([res(a)], [res(b)], [res(c)]);
            if subset_leq(&r, &a, &b).unwrap() && subset_leq(&r, &b, &c).unwrap() {
                prop_assert!(subset_leq(&r, &a, &c).unwrap());
                let direct = connecting_map(&r, &a, &c).unwrap();
                let via = hom_compose(&connecting_map(&r, &b, &c).unwrap(), &connecting_map(&r, &a, &b).unwrap()).unwrap();
                prop_assert!(direct.agrees_with(&via).unwrap());
            }
        }
    }
}
