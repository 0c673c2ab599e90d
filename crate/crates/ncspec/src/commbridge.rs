//! Prime spectra of finite commutative rings and how they sit inside
//! `NCSpec`, plus the exponential completion `E` of a based space.
//!
//! Exponential points are classes of subsets with equal base signature
//! (the base members containing the subset). Classes are ordered so that
//! the join of `[A]` and `[A']` is `[A ∪ A']`: `[A] ≤ [A']` iff every base
//! member containing `A'` also contains `A`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::latspace::{members, JoinSemilattice, PointSet};
use crate::rings::{FiniteRing, RingDescriptor, RingHom};
use crate::scalar::factorize;
use crate::sheafspec::{ncspec, ncspec_morphism, NCSpecSpace};

fn bit(i: usize) -> PointSet {
    1 << i
}

/// `Spec(R)` for a finite commutative ring, with primes stored as
/// membership vectors over the enumerated elements.
#[derive(Debug, Clone)]
pub struct PrimeSpectrum {
    pub ring: FiniteRing,
    pub primes: Vec<Vec<bool>>,
}

/// Rings up to this size get an exhaustive ideal search.
pub const EXHAUSTIVE_LIMIT: usize = 64;

pub fn spec(r: &RingDescriptor) -> Result<PrimeSpectrum> {
    if !r.is_finite() {
        return Err(Error::InfiniteRing { ring: r.to_string() });
    }
    if !r.is_commutative() {
        return Err(Error::NotCommutative { ring: r.to_string() });
    }
    let ring = FiniteRing::new(r)?;
    let mut primes = match structured_primes(&ring) {
        Some(p) if ring.len() > EXHAUSTIVE_LIMIT => p,
        _ => exhaustive_primes(&ring),
    };
    primes.sort_by_key(|p| (0..p.len()).filter(|&x| p[x]).collect::<Vec<_>>());
    Ok(PrimeSpectrum { ring, primes })
}

/// All ideals by closing under `I ↦ I + (a)`, then the prime ones.
fn exhaustive_primes(r: &FiniteRing) -> Vec<Vec<bool>> {
    let n = r.len();
    let principal: Vec<Vec<bool>> = (0..n)
        .map(|a| {
            let mut m = vec![false; n];
            for x in 0..n {
                m[r.mul(x, a)] = true;
            }
            m
        })
        .collect();
    let sum = |i: &[bool], j: &[bool]| {
        let mut m = vec![false; n];
        for a in (0..n).filter(|&a| i[a]) {
            for b in (0..n).filter(|&b| j[b]) {
                m[r.add(a, b)] = true;
            }
        }
        m
    };
    let mut zero = vec![false; n];
    zero[r.zero] = true;
    let mut ideals = vec![zero];
    let mut k = 0;
    while k < ideals.len() {
        let cur = ideals[k].clone();
        k += 1;
        for a in 0..n {
            if !cur[a] {
                let next = sum(&cur, &principal[a]);
                if !ideals.contains(&next) {
                    ideals.push(next);
                }
            }
        }
    }
    ideals
        .into_iter()
        .filter(|p| !p[r.one] && (0..n).all(|a| p[a] || (0..n).all(|b| p[b] || !p[r.mul(a, b)])))
        .collect()
}

/// Primes of cyclic rings and their products, read off the factorization.
fn structured_primes(r: &FiniteRing) -> Option<Vec<Vec<bool>>> {
    use crate::rings::RingElement;
    let factors: Vec<u64> = match &r.desc {
        RingDescriptor::Modular { n } => vec![*n],
        RingDescriptor::Product { factors } => factors
            .iter()
            .map(|f| match f {
                RingDescriptor::Modular { n } => Some(*n),
                _ => None,
            })
            .collect::<Option<_>>()?,
        _ => return None,
    };
    let single = matches!(r.desc, RingDescriptor::Modular { .. });
    let mut out = Vec::new();
    for (i, &n) in factors.iter().enumerate() {
        for (p, _) in factorize(n) {
            out.push(
                r.elems
                    .iter()
                    .map(|x| match x {
                        RingElement::Residue(v) if single => v % p == 0,
                        RingElement::Tuple(parts) => matches!(parts[i], RingElement::Residue(v) if v % p == 0),
                        _ => false,
                    })
                    .collect(),
            );
        }
    }
    Some(out)
}

impl PrimeSpectrum {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `D(f) = {P : f ∉ P}` for the element with index `f`.
    pub fn d(&self, f: usize) -> PointSet {
        (0..self.len()).filter(|&i| !self.primes[i][f]).fold(0, |s, i| s | bit(i))
    }

    /// A generator if the prime is principal, else its element list.
    pub fn label(&self, i: usize) -> String {
        let r = &self.ring;
        let p = &self.primes[i];
        let principal = (0..r.len()).find(|&g| p[g] && (0..r.len()).all(|x| p[x] == (0..r.len()).any(|y| r.mul(y, g) == x)));
        match principal {
            Some(g) => format!("({})", r.elems[g]),
            None => format!("{{{}}}", (0..r.len()).filter(|&x| p[x]).map(|x| r.elems[x].to_string()).collect::<Vec<_>>().join(", ")),
        }
    }

    /// The distinguished base `{D(f)}` as a based space.
    pub fn based(&self) -> BasedSpace {
        let labels = (0..self.len()).map(|i| self.label(i)).collect();
        BasedSpace::new(labels, (0..self.ring.len()).map(|f| self.d(f)).collect()).expect("distinguished opens form a T0 multiplicative base")
    }

    /// Index of a prime given by membership.
    pub fn position(&self, p: &[bool]) -> Option<usize> {
        self.primes.iter().position(|q| q == p)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring.desc.to_string(),
            "primes": (0..self.len()).map(|i| self.label(i)).collect::<Vec<_>>(),
            "distinguished_opens": (0..self.ring.len()).map(|f| json!({
                "f": self.ring.elems[f].to_string(),
                "primes": members(self.d(f)).map(|i| self.label(i)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// The cells `{R_f : f ∉ U}` for a union of primes `U`, as the matching
/// point of `NCSpec(R)`.
fn point_for_union(sp: &PrimeSpectrum, nc: &NCSpecSpace, union: &[bool]) -> Result<Option<usize>> {
    let mut cells: PointSet = 0;
    for f in (0..sp.ring.len()).filter(|&f| !union[f]) {
        cells |= bit(nc.lattice.cell_of(std::slice::from_ref(&sp.ring.elems[f]))?);
    }
    Ok(nc.space.points.iter().position(|c| c.members == cells))
}

fn union_of(sp: &PrimeSpectrum, set: PointSet) -> Vec<bool> {
    (0..sp.ring.len()).map(|x| members(set).any(|i| sp.primes[i][x])).collect()
}

/// `φ: Spec(R) → NCSpec(R)` with the outcome of every check on it.
#[derive(Debug, Clone)]
pub struct PhiEmbedding {
    pub spec: PrimeSpectrum,
    pub ncspec: NCSpecSpace,
    /// Prime index ↦ point of `NCSpec(R)`.
    pub point_map: Vec<usize>,
    pub preimage_formula: bool,
    pub homeomorphism_onto_image: bool,
    pub comap_isomorphisms: bool,
    pub dense: bool,
}

impl PhiEmbedding {
    pub fn passed(&self) -> bool {
        self.preimage_formula && self.homeomorphism_onto_image && self.comap_isomorphisms && self.dense
    }

    pub fn image(&self) -> PointSet {
        self.point_map.iter().fold(0, |s, &p| s | bit(p))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.spec.ring.desc.to_string(),
            "phi": (0..self.spec.len()).map(|i| json!({
                "prime": self.spec.label(i),
                "point": self.ncspec.point_label(self.point_map[i]),
            })).collect::<Vec<_>>(),
            "preimage_formula": self.preimage_formula,
            "homeomorphism_onto_image": self.homeomorphism_onto_image,
            "comap_isomorphisms": self.comap_isomorphisms,
            "dense": self.dense,
        })
    }
}

pub fn embed_phi(r: &RingDescriptor) -> Result<PhiEmbedding> {
    let sp = spec(r)?;
    let nc = ncspec(r)?;
    let ring = &sp.ring;
    let mut point_map = Vec::with_capacity(sp.len());
    for p in &sp.primes {
        point_map.push(point_for_union(&sp, &nc, p)?.expect("complement of a prime is an irreducible closed set"));
    }
    let image = point_map.iter().fold(0, |s: PointSet, &p| s | bit(p));
    let preimage = |v: PointSet| point_map.iter().enumerate().filter(|(_, &p)| v & bit(p) != 0).fold(0, |s: PointSet, (i, _)| s | bit(i));
    let forward = |d: PointSet| members(d).fold(0, |s: PointSet, i| s | bit(point_map[i]));

    let mut preimage_formula = true;
    let mut homeo = {
        let mut seen = point_map.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == point_map.len()
    };
    let mut comap_iso = true;
    for g in 0..ring.len() {
        let cell = nc.lattice.cell_of(std::slice::from_ref(&ring.elems[g]))?;
        let u = nc.basic_open(cell);
        preimage_formula &= preimage(u) == sp.d(g);
        homeo &= forward(sp.d(g)) == image & u;
        comap_iso &= fraction_ring_matches(ring, g, &nc.lattice.cells[cell].localized)?;
    }
    let gamma = bit(nc.generic);
    let dense = nc.lattice.space().opens().into_iter().map(|o| nc.space.tilde(o)).filter(|&v| v & !gamma != 0).all(|v| v & image != 0);
    Ok(PhiEmbedding { spec: sp, ncspec: nc, point_map, preimage_formula, homeomorphism_onto_image: homeo, comap_isomorphisms: comap_iso, dense })
}

/// The fraction ring `R_f` built from pairs `r/fᵏ` agrees with the
/// localization: both are quotients of `R` by the same ideal and both
/// insertions are onto.
fn fraction_ring_matches(r: &FiniteRing, f: usize, loc: &crate::localization::Localization) -> Result<bool> {
    let n = r.len();
    let mut powers = vec![r.one];
    loop {
        let next = r.mul(*powers.last().unwrap(), f);
        if powers.contains(&next) {
            break;
        }
        powers.push(next);
    }
    // r/fᵃ ~ s/fᵇ iff fᵐ (r fᵇ − s fᵃ) = 0 for some m
    let killed = |x: usize| powers.iter().any(|&p| r.mul(p, x) == r.zero);
    let mut classes: Vec<(usize, usize)> = Vec::new();
    for x in 0..n {
        for &a in &powers {
            let same = |&(y, b): &(usize, usize)| killed(r.add(r.mul(x, b), r.neg(r.mul(y, a))));
            if !classes.iter().any(same) {
                classes.push((x, a));
            }
        }
    }
    let target = FiniteRing::new(&loc.result)?;
    let mut images = vec![false; target.len()];
    for x in 0..n {
        let y = target.idx(&loc.insertion.apply(&r.elems[x])?).expect("insertion lands in the localization");
        images[y] = true;
        if (y == target.zero) != killed(x) {
            return Ok(false);
        }
    }
    let onto_from_r = classes.iter().all(|&(x, a)| (0..n).any(|y| killed(r.add(r.mul(y, a), r.neg(x)))));
    Ok(onto_from_r && images.iter().all(|&b| b) && classes.len() == target.len())
}

/// Unions of primes against irreducible closed sets of `L(R)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnionsReport {
    pub unions: usize,
    pub irreducible_closed: usize,
    pub bijective: bool,
}

pub fn union_of_primes_bijection(r: &RingDescriptor) -> Result<UnionsReport> {
    let sp = spec(r)?;
    let nc = ncspec(r)?;
    let mut unions: Vec<Vec<bool>> = (0..1u64 << sp.len()).map(|s| union_of(&sp, s)).collect();
    unions.sort();
    unions.dedup();
    let mut hit = vec![false; nc.len()];
    let mut bijective = true;
    for u in &unions {
        match point_for_union(&sp, &nc, u)? {
            Some(p) if !hit[p] => hit[p] = true,
            _ => bijective = false,
        }
    }
    bijective &= hit.iter().all(|&b| b);
    Ok(UnionsReport { unions: unions.len(), irreducible_closed: nc.len(), bijective })
}

/// A finite T₀ space with a multiplicative base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasedSpace {
    pub labels: Vec<String>,
    pub base: Vec<PointSet>,
}

impl BasedSpace {
    pub fn new(labels: Vec<String>, mut base: Vec<PointSet>) -> Result<Self> {
        let n = labels.len();
        if n > 20 {
            return Err(Error::UnsupportedClass { op: "based space".into(), ring: format!("{n} points") });
        }
        let full = if n == 0 { 0 } else { PointSet::MAX >> (64 - n) };
        if base.iter().any(|&b| b & !full != 0) {
            return Err(Error::BaseNotMultiplicative { detail: "base member outside the carrier".into() });
        }
        base.sort_unstable();
        base.dedup();
        if !base.contains(&full) {
            return Err(Error::BaseNotMultiplicative { detail: "base does not contain the whole space".into() });
        }
        for &a in &base {
            for &b in &base {
                if !base.contains(&(a & b)) {
                    return Err(Error::BaseNotMultiplicative { detail: format!("{a:b} ∩ {b:b} is not a base member") });
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if base.iter().all(|&s| (s & bit(a) == 0) == (s & bit(b) == 0)) {
                    return Err(Error::NotT0 { a, b });
                }
            }
        }
        Ok(BasedSpace { labels, base })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Base members containing `a`, as a membership vector over the base.
    pub fn signature(&self, a: PointSet) -> Vec<bool> {
        self.base.iter().map(|&b| a & !b == 0).collect()
    }

    /// Whether `f` pulls base members of `to` back to base members.
    pub fn is_t_morphism(&self, f: &[usize], to: &BasedSpace) -> bool {
        f.len() == self.len()
            && f.iter().all(|&y| y < to.len())
            && to.base.iter().all(|&c| {
                let pre = (0..self.len()).filter(|&x| c & bit(f[x]) != 0).fold(0, |s, x| s | bit(x));
                self.base.contains(&pre)
            })
    }
}

/// `E(X)`: subsets of `X` modulo equal signatures.
#[derive(Debug, Clone)]
pub struct ExponentialSpace {
    pub source: BasedSpace,
    pub signatures: Vec<Vec<bool>>,
    /// The largest subset in each class.
    pub largest: Vec<PointSet>,
    /// A smallest subset in each class.
    pub smallest: Vec<PointSet>,
    index: BTreeMap<Vec<bool>, usize>,
    /// `x ↦ [{x}]`.
    pub phi: Vec<usize>,
    pub bottom: usize,
}

pub fn exponential(x: &BasedSpace) -> Result<ExponentialSpace> {
    let x = BasedSpace::new(x.labels.clone(), x.base.clone())?;
    let n = x.len();
    let mut index = BTreeMap::new();
    let mut signatures = Vec::new();
    let mut largest = Vec::new();
    let mut smallest: Vec<PointSet> = Vec::new();
    let mut subsets: Vec<PointSet> = (0..1u64 << n).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    for a in subsets {
        let sig = x.signature(a);
        if !index.contains_key(&sig) {
            let c = signatures.len();
            let inter = x.base.iter().zip(&sig).filter(|(_, &s)| s).fold(PointSet::MAX >> (64 - n.max(1)), |acc, (&b, _)| acc & b);
            largest.push(if n == 0 { 0 } else { inter });
            smallest.push(a);
            index.insert(sig.clone(), c);
            signatures.push(sig);
        }
    }
    let phi = (0..n).map(|i| index[&x.signature(bit(i))]).collect();
    let bottom = index[&x.signature(0)];
    Ok(ExponentialSpace { source: x, signatures, largest, smallest, index, phi, bottom })
}

impl ExponentialSpace {
    pub fn len(&self) -> usize {
        self.signatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signatures.is_empty()
    }

    pub fn class_of(&self, a: PointSet) -> usize {
        self.index[&self.source.signature(a)]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.signatures[b].iter().zip(&self.signatures[a]).all(|(&sb, &sa)| !sb || sa)
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.class_of(self.largest[a] | self.largest[b])
    }

    pub fn label(&self, c: usize) -> String {
        format!("[{{{}}}]", members(self.smallest[c]).map(|i| self.source.labels[i].as_str()).collect::<Vec<_>>().join(","))
    }

    /// `B̃ = {[A] : A ⊆ B}` for the base member with index `j`.
    pub fn base_member(&self, j: usize) -> PointSet {
        (0..self.len()).filter(|&c| self.signatures[c][j]).fold(0, |s, c| s | bit(c))
    }

    /// `E(X)` as a based space in its own right.
    pub fn as_based(&self) -> Result<BasedSpace> {
        let labels = (0..self.len()).map(|c| self.label(c)).collect();
        BasedSpace::new(labels, (0..self.source.base.len()).map(|j| self.base_member(j)).collect())
    }

    pub fn semilattice(&self) -> Result<JoinSemilattice> {
        let n = self.len();
        let leq: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| self.leq(a, b)).collect()).collect();
        JoinSemilattice::from_order((0..n).map(|c| self.label(c)).collect(), &leq)
    }

    pub fn t_semilattice(&self) -> Result<TSemilattice> {
        TSemilattice::new(self.semilattice()?, self.as_based()?.base)
    }

    /// `E(f)`: `[A] ↦ [f(A)]` for a 𝔗-morphism `f` into `to`'s source.
    pub fn map_along(&self, f: &[usize], to: &ExponentialSpace) -> Vec<usize> {
        (0..self.len()).map(|c| to.class_of(members(self.largest[c]).fold(0, |s, x| s | bit(f[x])))).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "points": (0..self.len()).map(|c| self.label(c)).collect::<Vec<_>>(),
            "order": (0..self.len()).map(|a| (0..self.len()).filter(|&b| self.leq(a, b)).map(|b| self.label(b)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "phi": self.phi.iter().map(|&c| self.label(c)).collect::<Vec<_>>(),
        })
    }
}

/// `φ_{E(X)}: E(X) → E(E(X))` is a bijection that matches base members in
/// both directions.
pub fn exp_idempotence_check(x: &BasedSpace) -> Result<bool> {
    let e1 = exponential(x)?;
    let b1 = e1.as_based()?;
    let e2 = exponential(&b1)?;
    let b2 = e2.as_based()?;
    let mut seen = e2.phi.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != e2.len() || e2.len() != e1.len() {
        return Ok(false);
    }
    let image = |s: PointSet| members(s).fold(0, |acc, c| acc | bit(e2.phi[c]));
    Ok(b1.base.iter().all(|&b| b2.base.contains(&image(b))) && b1.is_t_morphism(&e2.phi, &b2))
}

/// A finite join semilattice with a base such that `A ⊆ B` iff
/// `sup A ∈ B` for every subset `A` and base member `B`.
#[derive(Debug, Clone)]
pub struct TSemilattice {
    pub lattice: JoinSemilattice,
    pub based: BasedSpace,
}

impl TSemilattice {
    pub fn new(lattice: JoinSemilattice, base: Vec<PointSet>) -> Result<Self> {
        let based = BasedSpace::new(lattice.labels().to_vec(), base)?;
        let n = lattice.len();
        for a in 0..1u64 << n {
            let sup = lattice.join_all(members(a));
            for &b in &based.base {
                if (a & !b == 0) != (b & bit(sup) != 0) {
                    let names = |s: PointSet| members(s).map(|i| based.labels[i].as_str()).collect::<Vec<_>>().join(",");
                    return Err(Error::NotTComplete { witness: format!("A = {{{}}}, B = {{{}}}, sup A = {}", names(a), names(b), based.labels[sup]) });
                }
            }
        }
        Ok(TSemilattice { lattice, based })
    }
}

/// The factorization `θ̂: E(X) → Y` of a 𝔗-morphism through `φ_X`.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub map: Vec<usize>,
    /// Exhaustive uniqueness verdict; `None` above the search limit.
    pub unique: Option<bool>,
}

/// Carriers up to this size get the exhaustive uniqueness search.
pub const UNIQUENESS_LIMIT: usize = 5;

pub fn exp_factorization(x: &BasedSpace, theta: &[usize], y: &TSemilattice) -> Result<Factorization> {
    if !x.is_t_morphism(theta, &y.based) {
        return Err(Error::NotAHomomorphism { witness: "θ pulls some base member back outside the base".into() });
    }
    let e = exponential(x)?;
    let eb = e.as_based()?;
    let lat = &y.lattice;
    let mut map = vec![usize::MAX; e.len()];
    for a in 0..1u64 << x.len() {
        let s = lat.join_all(members(a).map(|i| theta[i]));
        let c = e.class_of(a);
        assert!(map[c] == usize::MAX || map[c] == s, "sup θ(A) depends only on the class of A");
        map[c] = s;
    }
    let joins_ok = map[e.bottom] == lat.bottom && (0..e.len()).all(|a| (0..e.len()).all(|b| map[e.join(a, b)] == lat.join(map[a], map[b])));
    let through_phi = (0..x.len()).all(|i| map[e.phi[i]] == theta[i]);
    if !joins_ok || !through_phi || !eb.is_t_morphism(&map, &y.based) {
        return Err(Error::NotJoinPreserving { witness: "sup θ(A) fails the factorization checks".into() });
    }
    let unique = (x.len() <= UNIQUENESS_LIMIT).then(|| count_factorizations(&e, &eb, theta, y, 2) == 1);
    Ok(Factorization { map, unique })
}

/// Counts (up to `cap`) join-preserving 𝔗-morphisms `g` with `g ∘ φ = θ`,
/// assigning classes in order of their smallest subset and pruning on every
/// join already decided.
fn count_factorizations(e: &ExponentialSpace, eb: &BasedSpace, theta: &[usize], y: &TSemilattice, cap: usize) -> usize {
    let mut order: Vec<usize> = (0..e.len()).collect();
    order.sort_by_key(|&c| (e.smallest[c].count_ones(), e.smallest[c]));
    let mut forced = vec![None; e.len()];
    for (i, &c) in e.phi.iter().enumerate() {
        forced[c] = Some(theta[i]);
    }
    forced[e.bottom] = Some(y.lattice.bottom);
    let mut g = vec![usize::MAX; e.len()];
    let mut count = 0;
    search(0, &order, &forced, e, eb, y, &mut g, &mut count, cap);
    count
}

#[allow(clippy::too_many_arguments)]
fn search(k: usize, order: &[usize], forced: &[Option<usize>], e: &ExponentialSpace, eb: &BasedSpace, y: &TSemilattice, g: &mut Vec<usize>, count: &mut usize, cap: usize) {
    if *count >= cap {
        return;
    }
    if k == order.len() {
        if eb.is_t_morphism(g, &y.based) {
            *count += 1;
        }
        return;
    }
    let c = order[k];
    let choices: Vec<usize> = match forced[c] {
        Some(v) => vec![v],
        None => (0..y.lattice.len()).collect(),
    };
    for v in choices {
        g[c] = v;
        let consistent = order[..=k].iter().all(|&a| {
            order[..=k].iter().all(|&b| {
                let j = e.join(a, b);
                g[j] == usize::MAX || g[j] == y.lattice.join(g[a], g[b])
            })
        });
        if consistent {
            search(k + 1, order, forced, e, eb, y, g, count, cap);
        }
        g[c] = usize::MAX;
    }
}

/// `γ: E(Spec_B(R)) → NCSpec(R)`, `[A] ↦` the point of `∪_{P ∈ A} P`.
#[derive(Debug, Clone)]
pub struct ExpIsomorphism {
    pub gamma: Vec<usize>,
    pub bijective: bool,
    pub base_matches: bool,
}

impl ExpIsomorphism {
    pub fn passed(&self) -> bool {
        self.bijective && self.base_matches
    }
}

pub fn exp_to_ncspec(sp: &PrimeSpectrum, e: &ExponentialSpace, nc: &NCSpecSpace) -> Result<ExpIsomorphism> {
    let mut gamma = Vec::with_capacity(e.len());
    for c in 0..e.len() {
        match point_for_union(sp, nc, &union_of(sp, e.largest[c]))? {
            Some(p) => gamma.push(p),
            None => return Ok(ExpIsomorphism { gamma, bijective: false, base_matches: false }),
        }
    }
    let mut seen = gamma.clone();
    seen.sort_unstable();
    seen.dedup();
    let bijective = seen.len() == e.len() && e.len() == nc.len();
    let mut base_matches = true;
    for f in 0..sp.ring.len() {
        let j = e.source.base.iter().position(|&b| b == sp.d(f)).expect("D(f) is a base member");
        let image = members(e.base_member(j)).fold(0, |s, c| s | bit(gamma[c]));
        let cell = nc.lattice.cell_of(std::slice::from_ref(&sp.ring.elems[f]))?;
        base_matches &= image == nc.basic_open(cell);
    }
    Ok(ExpIsomorphism { gamma, bijective, base_matches })
}

/// `Spec(θ): Q ↦ θ⁻¹(Q)` as an index map.
pub fn spec_map(theta: &RingHom, source: &PrimeSpectrum, target: &PrimeSpectrum) -> Result<Vec<usize>> {
    let table = source.ring.table_of(theta, &target.ring)?;
    target
        .primes
        .iter()
        .map(|q| {
            let pre: Vec<bool> = table.iter().map(|&y| q[y]).collect();
            source.position(&pre).ok_or_else(|| Error::NotAHomomorphism { witness: "preimage of a prime is not prime".into() })
        })
        .collect()
}

/// Both naturality squares for `θ: R → S` between finite commutative rings:
/// `φ_R ∘ Spec(θ) = θ̂ ∘ φ_S` and `γ_R ∘ E(Spec θ) = θ̂ ∘ γ_S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Naturality {
    pub phi: bool,
    pub gamma: bool,
}

pub fn naturality(theta: &RingHom) -> Result<Naturality> {
    let (er, es) = (embed_phi(&theta.source)?, embed_phi(&theta.target)?);
    let m = ncspec_morphism(theta)?;
    let sm = spec_map(theta, &er.spec, &es.spec)?;
    let phi = (0..es.spec.len()).all(|q| er.point_map[sm[q]] == m.point_map[es.point_map[q]]);
    let (xr, xs) = (exponential(&er.spec.based())?, exponential(&es.spec.based())?);
    let (gr, gs) = (exp_to_ncspec(&er.spec, &xr, &er.ncspec)?, exp_to_ncspec(&es.spec, &xs, &es.ncspec)?);
    let e_theta = xs.map_along(&sm, &xr);
    let gamma = gr.passed() && gs.passed() && (0..xs.len()).all(|c| gr.gamma[e_theta[c]] == m.point_map[gs.gamma[c]]);
    Ok(Naturality { phi, gamma })
}
