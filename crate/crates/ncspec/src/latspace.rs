//! Finite posets with the Alexandrov topology, their soberification, the
//! localization semilattice of a ring, and the point model for `Q[x]`.
//!
//! Subsets of a finite carrier are `u64` bitmasks, so carriers hold at most
//! 64 points.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::localization::{key_leq, localize, CellKey, Localization};
use crate::poly::UPoly;
use crate::rings::{Matrix, RingDescriptor, RingElement};

pub type PointSet = u64;

pub const MAX_POINTS: usize = 64;

fn bit(i: usize) -> PointSet {
    1u64 << i
}

fn all(n: usize) -> PointSet {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn members(s: PointSet) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&i| s & bit(i) != 0)
}

/// A finite poset whose opens are the upper sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlexandrovSpace {
    pub labels: Vec<String>,
    /// `up[x]` is the principal open `U_x = {y : y ≥ x}`.
    pub up: Vec<PointSet>,
    pub down: Vec<PointSet>,
}

impl AlexandrovSpace {
    /// From an order matrix `leq[a][b] = a ≤ b`; checks the partial-order laws.
    pub fn from_order(labels: Vec<String>, leq: &[Vec<bool>]) -> Result<Self> {
        let n = leq.len();
        if n > MAX_POINTS {
            return Err(Error::UnsupportedClass { op: "finite space".into(), ring: format!("{n} points") });
        }
        for a in 0..n {
            if !leq[a][a] {
                return Err(Error::SchemaViolation { path: format!("order[{a}][{a}]"), message: "order must be reflexive".into() });
            }
            for b in 0..n {
                if a != b && leq[a][b] && leq[b][a] {
                    return Err(Error::NotT0 { a, b });
                }
                for c in 0..n {
                    if leq[a][b] && leq[b][c] && !leq[a][c] {
                        return Err(Error::SchemaViolation { path: format!("order[{a}][{c}]"), message: "order must be transitive".into() });
                    }
                }
            }
        }
        let up = (0..n).map(|a| (0..n).filter(|&b| leq[a][b]).fold(0, |s, b| s | bit(b))).collect();
        let down = (0..n).map(|a| (0..n).filter(|&b| leq[b][a]).fold(0, |s, b| s | bit(b))).collect();
        Ok(AlexandrovSpace { labels, up, down })
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn full(&self) -> PointSet {
        all(self.len())
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a] & bit(b) != 0
    }

    pub fn is_open(&self, u: PointSet) -> bool {
        u & !self.full() == 0 && members(u).all(|x| self.up[x] & !u == 0)
    }

    pub fn is_closed(&self, c: PointSet) -> bool {
        c & !self.full() == 0 && members(c).all(|x| self.down[x] & !c == 0)
    }

    pub fn upper_set(&self, seed: PointSet) -> PointSet {
        members(seed).fold(0, |s, x| s | self.up[x])
    }

    pub fn lower_set(&self, seed: PointSet) -> PointSet {
        members(seed).fold(0, |s, x| s | self.down[x])
    }

    /// Whether `u` equals one member of each of its open covers, which on a
    /// finite poset means `u = U_x` for some `x`.
    pub fn is_completely_union_irreducible(&self, u: PointSet) -> Result<bool> {
        if !self.is_open(u) {
            return Err(Error::NotOpen);
        }
        Ok(self.up.contains(&u))
    }

    /// The point `x` with `u = U_x`, if any.
    pub fn principal_point(&self, u: PointSet) -> Option<usize> {
        self.up.iter().position(|&v| v == u)
    }

    /// Nonempty lower sets in which every pair has an upper bound inside.
    fn is_directed_lower(&self, c: PointSet) -> bool {
        c != 0 && self.is_closed(c) && members(c).all(|a| members(c).all(|b| self.up[a] & self.up[b] & c != 0))
    }

    /// All irreducible closed sets. Carriers of at most 16 points are
    /// scanned exhaustively; larger ones use the principal down-sets, which
    /// is what the scan finds on every finite poset.
    pub fn irreducible_closed_sets(&self) -> Vec<IrreducibleClosed> {
        let n = self.len();
        let candidates: Vec<PointSet> = if n <= 16 { (1..=self.full()).filter(|&c| self.is_directed_lower(c)).collect() } else { self.down.clone() };
        let mut out: Vec<IrreducibleClosed> = candidates
            .into_iter()
            .map(|c| {
                let apex = members(c).find(|&x| self.down[x] == c).expect("finite directed lower sets have a maximum");
                IrreducibleClosed { members: c, apex }
            })
            .collect();
        out.sort_by_key(|c| c.apex);
        out
    }

    /// Every open set, for carriers of at most 20 points.
    pub fn opens(&self) -> Vec<PointSet> {
        assert!(self.len() <= 20, "open enumeration is for small carriers");
        (0..=self.full()).filter(|&u| self.is_open(u)).collect()
    }

    pub fn is_t0(&self) -> bool {
        (0..self.len()).all(|a| (0..self.len()).all(|b| a == b || self.up[a] != self.up[b]))
    }

    pub fn soberify(&self) -> SoberSpace {
        let points = self.irreducible_closed_sets();
        let q = (0..self.len()).map(|x| points.iter().position(|c| c.members == self.down[x]).expect("closure of a point is irreducible")).collect();
        let generic = points.iter().position(|c| c.members == self.full());
        SoberSpace { carrier: self.clone(), points, q, generic }
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph {name} {{\n  rankdir=BT;\n");
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("  n{i} [label=\"{}\"];\n", l.replace('"', "\\\"")));
        }
        for (a, b) in hasse(&self.up) {
            out.push_str(&format!("  n{a} -> n{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Covering pairs `a < b` with nothing strictly between.
fn hasse(up: &[PointSet]) -> Vec<(usize, usize)> {
    let n = up.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in members(up[a] & !bit(a)) {
            let between = members(up[a] & !bit(a) & !bit(b)).any(|c| up[c] & bit(b) != 0);
            if !between {
                out.push((a, b));
            }
        }
    }
    out
}

/// A closed set with a unique generic point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IrreducibleClosed {
    pub members: PointSet,
    pub apex: usize,
}

/// The soberification of a finite Alexandrov space.
#[derive(Debug, Clone)]
pub struct SoberSpace {
    pub carrier: AlexandrovSpace,
    pub points: Vec<IrreducibleClosed>,
    /// `q[x]` is the point `↓x`.
    pub q: Vec<usize>,
    pub generic: Option<usize>,
}

impl SoberSpace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Ũ = {C : C ∩ U ≠ ∅}` as a set of points.
    pub fn tilde(&self, u: PointSet) -> PointSet {
        self.points.iter().enumerate().filter(|(_, c)| c.members & u != 0).fold(0, |s, (i, _)| s | bit(i))
    }

    pub fn q_preimage(&self, v: PointSet) -> PointSet {
        self.q.iter().enumerate().filter(|(_, &p)| v & bit(p) != 0).fold(0, |s, (x, _)| s | bit(x))
    }

    /// The opens of `S(X)` are exactly the sets `Ũ`; an open of points is
    /// turned back into the carrier open it came from.
    pub fn untilde(&self, v: PointSet) -> PointSet {
        self.q_preimage(v)
    }

    /// The specialization order on points, `C ≤ C'` iff `C ⊆ C'`.
    pub fn space(&self) -> AlexandrovSpace {
        let n = self.len();
        let leq: Vec<Vec<bool>> = (0..n)
            .map(|a| (0..n).map(|b| self.points[a].members & !self.points[b].members == 0).collect())
            .collect();
        let labels = self.points.iter().map(|c| format!("↓{}", self.carrier.labels[c.apex])).collect();
        AlexandrovSpace::from_order(labels, &leq).expect("inclusion is a partial order")
    }

    /// `q⁻¹(Ũ) = U` for every open `U`, `U ↦ Ũ` preserves unions and
    /// intersections, and `q` is a bijection (small carriers only).
    pub fn check_homeomorphism(&self) -> bool {
        let x = &self.carrier;
        let mut q_sorted = self.q.clone();
        q_sorted.sort_unstable();
        q_sorted.dedup();
        if q_sorted.len() != self.len() {
            return false;
        }
        let opens = x.opens();
        let tildes: Vec<PointSet> = opens.iter().map(|&u| self.tilde(u)).collect();
        let mut distinct = tildes.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != opens.len() {
            return false;
        }
        for (i, &u) in opens.iter().enumerate() {
            if self.q_preimage(tildes[i]) != u {
                return false;
            }
            for &v in &opens {
                if self.tilde(u & v) != tildes[i] & self.tilde(v) || self.tilde(u | v) != tildes[i] | self.tilde(v) {
                    return false;
                }
            }
        }
        true
    }
}

/// A finite join semilattice with a bottom element.
#[derive(Debug, Clone)]
pub struct JoinSemilattice {
    pub space: AlexandrovSpace,
    pub joins: Vec<Vec<usize>>,
    pub bottom: usize,
}

impl JoinSemilattice {
    pub fn from_order(labels: Vec<String>, leq: &[Vec<bool>]) -> Result<Self> {
        let space = AlexandrovSpace::from_order(labels, leq)?;
        let n = space.len();
        let mut joins = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let ub = space.up[a] & space.up[b];
                joins[a][b] = members(ub).find(|&c| space.up[c] == ub).ok_or_else(|| Error::NotComparable {
                    detail: format!("{} and {} have no least upper bound", space.labels[a], space.labels[b]),
                })?;
            }
        }
        let bottom = (0..n).find(|&x| space.up[x] == space.full()).ok_or_else(|| Error::NotComparable { detail: "no bottom element".into() })?;
        Ok(JoinSemilattice { space, joins, bottom })
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.space.leq(a, b)
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.joins[a][b]
    }

    pub fn join_all(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn top(&self) -> usize {
        self.join_all(0..self.len())
    }

    pub fn labels(&self) -> &[String] {
        &self.space.labels
    }
}

/// The map `S(Q) → S(P)`, `C ↦ f⁻¹(C)`, of a join-preserving map `f: P → Q`,
/// recorded on point indices (points of `S(X)` are indexed by their apex).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoberMap {
    pub images: Vec<usize>,
}

pub fn sober_map_from_join_hom(p: &JoinSemilattice, q: &JoinSemilattice, f: &[usize]) -> Result<SoberMap> {
    let n = p.len();
    if f.len() != n || f.iter().any(|&y| y >= q.len()) {
        return Err(Error::SchemaViolation { path: "map".into(), message: "map must send every element of the source into the target".into() });
    }
    if f[p.bottom] != q.bottom {
        return Err(Error::NotJoinPreserving {
            witness: format!("the empty join {} goes to {}, not {}", p.labels()[p.bottom], q.labels()[f[p.bottom]], q.labels()[q.bottom]),
        });
    }
    for a in 0..n {
        for b in 0..n {
            if f[p.join(a, b)] != q.join(f[a], f[b]) {
                return Err(Error::NotJoinPreserving {
                    witness: format!("f({} ∨ {}) = {} but f({}) ∨ f({}) = {}", p.labels()[a], p.labels()[b], q.labels()[f[p.join(a, b)]], p.labels()[a], p.labels()[b], q.labels()[q.join(f[a], f[b])]),
                });
            }
        }
    }
    let mut images = Vec::with_capacity(q.len());
    for y in 0..q.len() {
        let pre: PointSet = (0..n).filter(|&x| q.leq(f[x], y)).fold(0, |s, x| s | bit(x));
        let apex = p.join_all(members(pre));
        if p.space.down[apex] != pre {
            return Err(Error::NotJoinPreserving { witness: format!("preimage of ↓{} is not principal", q.labels()[y]) });
        }
        images.push(apex);
    }
    let map = SoberMap { images };
    // (f̂)⁻¹(Ũ_a) = Ũ_{f(a)}; points of S(Q) are indexed by apex, so Ũ_b has the bits of U_b
    for a in 0..n {
        let pre: PointSet = (0..q.len()).filter(|&y| p.space.up[a] & p.space.down[map.images[y]] != 0).fold(0, |s, y| s | bit(y));
        debug_assert_eq!(pre, q.space.up[f[a]]);
        if pre != q.space.up[f[a]] {
            return Err(Error::NotJoinPreserving { witness: format!("preimage formula fails at {}", p.labels()[a]) });
        }
    }
    Ok(map)
}

/// One element `R_E` of the localization semilattice.
#[derive(Debug, Clone)]
pub struct LocalizationCell {
    pub representative: Vec<RingElement>,
    pub localized: Localization,
    pub label: String,
}

impl LocalizationCell {
    pub fn key(&self) -> &CellKey {
        &self.localized.key
    }
}

/// `L(R)` for a ring with finitely many localizations.
#[derive(Debug, Clone)]
pub struct LocalizationLattice {
    pub ring: RingDescriptor,
    pub cells: Vec<LocalizationCell>,
    pub order: JoinSemilattice,
    pub hasse: Vec<(usize, usize)>,
    pub bottom: usize,
    pub top: usize,
    index: HashMap<CellKey, usize>,
}

/// `L(R)`: materialized for finite-type rings, a query object otherwise.
#[derive(Debug, Clone)]
pub enum Semilattice {
    Finite(LocalizationLattice),
    Lazy(LazyLattice),
}

pub fn build_semilattice(r: &RingDescriptor) -> Result<Semilattice> {
    match r {
        RingDescriptor::Poly { .. } | RingDescriptor::SkewLaurent(_) => Ok(Semilattice::Lazy(LazyLattice { ring: r.clone() })),
        _ => LocalizationLattice::build(r).map(Semilattice::Finite),
    }
}

/// Single elements that reach every localization: all elements of a finite
/// ring, and block idempotents for matrix and semisimple rings over `Q`.
fn cell_candidates(r: &RingDescriptor) -> Option<Vec<RingElement>> {
    if let Some(all) = r.elements() {
        return Some(all);
    }
    match r {
        RingDescriptor::Matrix { .. } => Some(vec![r.zero(), r.one()]),
        RingDescriptor::Semisimple { dims, .. } => {
            let k = dims.len();
            Some(
                (0..1u64 << k)
                    .map(|mask| RingElement::Blocks(dims.iter().enumerate().map(|(j, &d)| if mask & (1 << j) != 0 { Matrix::identity(d) } else { Matrix::zero(d) }).collect()))
                    .collect(),
            )
        }
        RingDescriptor::Product { factors } => {
            let per: Option<Vec<Vec<RingElement>>> = factors.iter().map(cell_candidates).collect();
            let mut out: Vec<Vec<RingElement>> = vec![Vec::new()];
            for opts in per? {
                out = out.into_iter().flat_map(|p| opts.iter().map(move |o| [p.clone(), vec![o.clone()]].concat())).collect();
            }
            Some(out.into_iter().map(RingElement::Tuple).collect())
        }
        _ => None,
    }
}

fn cell_label(r: &RingDescriptor, x: &RingElement) -> String {
    if *x == r.zero() {
        return "R_{0}".into();
    }
    if *x == r.one() {
        return "R_{1}".into();
    }
    if let (RingDescriptor::Semisimple { .. }, RingElement::Blocks(bs)) = (r, x) {
        let idx: Vec<String> = bs.iter().enumerate().filter(|(_, b)| **b != Matrix::zero(b.n)).map(|(j, _)| (j + 1).to_string()).collect();
        return format!("R_{{e{{{}}}}}", idx.join(","));
    }
    format!("R_{{{}}}", r.show(x))
}

impl LocalizationLattice {
    pub fn build(r: &RingDescriptor) -> Result<Self> {
        r.validate()?;
        let candidates = cell_candidates(r).ok_or_else(|| Error::UnsupportedClass { op: "build_semilattice".into(), ring: r.to_string() })?;
        let mut cells: Vec<LocalizationCell> = Vec::new();
        let mut seen: HashMap<CellKey, usize> = HashMap::new();
        for x in candidates {
            let l = localize(r, std::slice::from_ref(&x))?;
            if !seen.contains_key(&l.key) {
                seen.insert(l.key.clone(), cells.len());
                cells.push(LocalizationCell { label: cell_label(r, &x), representative: vec![x], localized: l });
            }
        }
        let n = cells.len();
        if n > MAX_POINTS {
            return Err(Error::UnsupportedClass { op: "build_semilattice".into(), ring: format!("{r} has {n} localizations") });
        }
        // list cells along a linear extension: fewer cells below first
        let below = |i: usize| (0..n).filter(|&j| key_leq(r, cells[j].key(), cells[i].key())).count();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (below(i), i));
        let cells: Vec<LocalizationCell> = order.into_iter().map(|i| cells[i].clone()).collect();
        let index: HashMap<CellKey, usize> = cells.iter().enumerate().map(|(i, c)| (c.key().clone(), i)).collect();
        let leq: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| key_leq(r, cells[a].key(), cells[b].key())).collect()).collect();
        let labels = cells.iter().map(|c| c.label.clone()).collect();
        let order = JoinSemilattice::from_order(labels, &leq)?;
        // joins must be the cells of unions of representatives
        for a in 0..n {
            for b in 0..a {
                let union = [cells[a].representative.clone(), cells[b].representative.clone()].concat();
                let k = localize(r, &union)?.key;
                if index.get(&k) != Some(&order.join(a, b)) {
                    return Err(Error::NotComparable { detail: format!("join of {} and {} is not the cell of their union", cells[a].label, cells[b].label) });
                }
            }
        }
        let hasse = hasse(&order.space.up);
        let bottom = order.bottom;
        let top = order.top();
        Ok(LocalizationLattice { ring: r.clone(), cells, order, hasse, bottom, top, index })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.order.leq(a, b)
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.order.join(a, b)
    }

    pub fn space(&self) -> &AlexandrovSpace {
        &self.order.space
    }

    /// The cell `R_E` of an arbitrary finite subset.
    pub fn cell_of(&self, subset: &[RingElement]) -> Result<usize> {
        let key = localize(&self.ring, subset)?.key;
        self.index.get(&key).copied().ok_or_else(|| Error::NotComparable { detail: "localization not among the cells".into() })
    }

    pub fn find(&self, label: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.label == label)
    }

    pub fn to_dot(&self) -> String {
        self.space().to_dot("L")
    }

    pub fn to_json(&self) -> Value {
        let n = self.len();
        json!({
            "ring": self.ring.to_string(),
            "cells": self.cells.iter().map(|c| json!({
                "label": c.label,
                "representative": c.representative.iter().map(|x| self.ring.show(x)).collect::<Vec<_>>(),
                "localization": c.localized.result.to_string(),
            })).collect::<Vec<_>>(),
            "order": (0..n).map(|a| (0..n).map(|b| u8::from(self.leq(a, b))).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "joins": self.order.joins,
            "hasse": self.hasse,
            "bottom": self.bottom,
            "top": self.top,
        })
    }
}

/// `L(R)` for `Q[x]` (and its localizations) and skew Laurent rings,
/// answered one query at a time.
#[derive(Debug, Clone)]
pub struct LazyLattice {
    pub ring: RingDescriptor,
}

impl LazyLattice {
    pub fn cell(&self, subset: &[RingElement]) -> Result<CellKey> {
        Ok(localize(&self.ring, subset)?.key)
    }

    pub fn leq(&self, a: &[RingElement], b: &[RingElement]) -> Result<bool> {
        Ok(key_leq(&self.ring, &self.cell(a)?, &self.cell(b)?))
    }

    pub fn join(&self, a: &[RingElement], b: &[RingElement]) -> Result<CellKey> {
        self.cell(&[a, b].concat())
    }

    pub fn label(key: &CellKey) -> String {
        match key {
            CellKey::Inverted(f) => format!("R_{{{f}}}"),
            CellKey::Cone(vars) => {
                let names: Vec<String> = vars.iter().map(|&i| (i + 1).to_string()).collect();
                format!("R_{{x{{{}}}}}", names.join(","))
            }
            CellKey::Collapsed => "R_{0}".into(),
            other => format!("{other:?}"),
        }
    }
}

/// `R_h ≤ R_g` in `L(Q[x])`: the squarefree part of `h` divides that of `g`.
pub fn pid_leq(h: &UPoly, g: &UPoly) -> bool {
    h.squarefree_part().divides(&g.squarefree_part())
}

/// The cell of `{h, g}`, as its monic squarefree generator (`0` for `R_0`).
pub fn pid_join(h: &UPoly, g: &UPoly) -> UPoly {
    let p = h.mul(g);
    if p.is_zero() {
        p
    } else {
        p.squarefree_part().monic()
    }
}

/// A point of `NCSpec(Q[x])`: the zero ideal, or a set of maximal ideals
/// given by monic irreducibles (the empty set is the generic point).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PidPoint {
    ZeroIdeal,
    PrimeSet(Vec<UPoly>),
    Generic,
}

impl PidPoint {
    pub fn prime_set(polys: Vec<UPoly>) -> Result<Self> {
        let p = PidPoint::PrimeSet(polys);
        p.check()?;
        Ok(p)
    }

    /// Monic, nonconstant, distinct entries; degree at most 3 is checked
    /// irreducible, higher degrees are taken on trust.
    pub fn check(&self) -> Result<()> {
        if let PidPoint::PrimeSet(ps) = self {
            for (i, p) in ps.iter().enumerate() {
                if p.is_constant() || p.monic() != *p || ps[..i].contains(p) {
                    return Err(Error::NotIrreducibleCertificate { poly: p.to_string() });
                }
                if p.irreducible_low_degree() == Some(false) {
                    return Err(Error::NotIrreducibleCertificate { poly: p.to_string() });
                }
            }
        }
        Ok(())
    }

    pub fn is_generic(&self) -> bool {
        match self {
            PidPoint::Generic => true,
            PidPoint::PrimeSet(ps) => ps.is_empty(),
            PidPoint::ZeroIdeal => false,
        }
    }
}

/// Membership of a point in the basic open `Ũ_f`.
pub fn pid_point_in_open(p: &PidPoint, f: &UPoly) -> Result<bool> {
    p.check()?;
    if f.is_zero() {
        return Ok(p.is_generic());
    }
    Ok(match p {
        PidPoint::ZeroIdeal | PidPoint::Generic => true,
        PidPoint::PrimeSet(ps) => ps.iter().all(|q| !q.divides(f)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localization::subset_leq;
    use crate::scalar::{q, Field};
    use proptest::prelude::*;

    fn chain(n: usize) -> AlexandrovSpace {
        let leq: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| a <= b).collect()).collect();
        AlexandrovSpace::from_order((0..n).map(|i| i.to_string()).collect(), &leq).unwrap()
    }

    fn finite(r: &RingDescriptor) -> LocalizationLattice {
        match build_semilattice(r).unwrap() {
            Semilattice::Finite(l) => l,
            Semilattice::Lazy(_) => panic!("expected a finite lattice"),
        }
    }

    #[test]
    fn z6_diamond() {
        let l = finite(&RingDescriptor::modular(6));
        let labels: Vec<&str> = l.cells.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(labels, ["R_{1}", "R_{2}", "R_{3}", "R_{0}"]);
        let (r2, r3) = (l.find("R_{2}").unwrap(), l.find("R_{3}").unwrap());
        assert!(!l.leq(r2, r3) && !l.leq(r3, r2));
        assert_eq!(l.join(r2, r3), l.top);
        assert_eq!(l.cells[l.bottom].label, "R_{1}");
        assert_eq!(l.hasse.len(), 4);
        let x = l.space();
        assert_eq!(x.upper_set(bit(r2)), bit(r2) | bit(l.top));
        assert!(!x.is_completely_union_irreducible(x.up[r2] | x.up[r3]).unwrap());
        let dot = l.to_dot();
        assert_eq!(dot.matches("->").count(), 4);
    }

    #[test]
    fn small_lattice_sizes() {
        assert_eq!(finite(&RingDescriptor::Zero).len(), 1);
        assert_eq!(finite(&RingDescriptor::matrix(Field::Prime(3), 2)).len(), 2);
        assert_eq!(finite(&RingDescriptor::matrix(Field::Rationals, 3)).len(), 2);
        for dims in [vec![1, 1], vec![1, 2], vec![1, 1, 1]] {
            let k = dims.len();
            let l = finite(&RingDescriptor::semisimple(Field::Rationals, dims));
            assert_eq!(l.len(), 1 << k);
        }
        assert_eq!(finite(&RingDescriptor::modular(30)).len(), 8);
        assert_eq!(finite(&RingDescriptor::modular(4)).len(), 2);
    }

    #[test]
    fn order_agrees_with_subset_leq() {
        for r in [RingDescriptor::modular(12), RingDescriptor::product(vec![RingDescriptor::modular(2), RingDescriptor::modular(4)]).unwrap(), RingDescriptor::matrix(Field::Prime(2), 2)] {
            let l = finite(&r);
            for a in 0..l.len() {
                for b in 0..l.len() {
                    assert_eq!(l.leq(a, b), subset_leq(&r, &l.cells[a].representative, &l.cells[b].representative).unwrap());
                }
            }
        }
    }

    #[test]
    fn topology_examples() {
        let c = chain(3);
        assert_eq!(c.upper_set(0), 0);
        assert_eq!(c.upper_set(bit(1)), bit(1) | bit(2));
        assert_eq!(c.irreducible_closed_sets().len(), 3);
        assert!(!c.is_completely_union_irreducible(0).unwrap());
        assert_eq!(c.is_completely_union_irreducible(bit(0)).unwrap_err(), Error::NotOpen);

        let antichain = AlexandrovSpace::from_order(vec!["a".into(), "b".into()], &[vec![true, false], vec![false, true]]).unwrap();
        let irr = antichain.irreducible_closed_sets();
        assert_eq!(irr.iter().map(|c| c.members).collect::<Vec<_>>(), vec![bit(0), bit(1)]);

        let sier = chain(2).soberify();
        assert_eq!(sier.len(), 2);
        assert!(sier.check_homeomorphism());
    }

    #[test]
    fn sober_z6() {
        let l = finite(&RingDescriptor::modular(6));
        let s = l.space().soberify();
        assert_eq!(s.len(), 4);
        assert_eq!(s.points[s.generic.unwrap()].apex, l.top);
        assert!(s.check_homeomorphism());
    }

    fn diamond() -> JoinSemilattice {
        // 0 < a, b < 1
        let leq = vec![vec![true; 4], vec![false, true, false, true], vec![false, false, true, true], vec![false, false, false, true]];
        JoinSemilattice::from_order(vec!["0".into(), "a".into(), "b".into(), "1".into()], &leq).unwrap()
    }

    fn chain_lattice(n: usize) -> JoinSemilattice {
        let leq: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| a <= b).collect()).collect();
        JoinSemilattice::from_order((0..n).map(|i| i.to_string()).collect(), &leq).unwrap()
    }

    #[test]
    fn sober_maps() {
        let d = diamond();
        let id = sober_map_from_join_hom(&d, &d, &[0, 1, 2, 3]).unwrap();
        assert_eq!(id.images, vec![0, 1, 2, 3]);

        // inclusion of ↓a = {0, a} into the diamond: C ↦ C ∩ ↓a
        let down_a = chain_lattice(2);
        let incl = sober_map_from_join_hom(&down_a, &d, &[0, 1]).unwrap();
        assert_eq!(incl.images, vec![0, 1, 0, 1]);

        let c3 = chain_lattice(3);
        let err = sober_map_from_join_hom(&c3, &c3, &[2, 2, 2]).unwrap_err();
        assert_eq!(err.name(), "NotJoinPreserving");
        // on the diamond, collapsing b onto the bottom breaks a ∨ b
        let err = sober_map_from_join_hom(&d, &d, &[0, 1, 0, 3]).unwrap_err();
        assert_eq!(err.name(), "NotJoinPreserving");
    }

    #[test]
    fn pid_points() {
        let x2m1 = UPoly::from_ints(&[-1, 0, 1]);
        assert!(pid_point_in_open(&PidPoint::Generic, &UPoly::zero()).unwrap());
        assert!(pid_point_in_open(&PidPoint::Generic, &x2m1).unwrap());
        let p = PidPoint::prime_set(vec![UPoly::from_ints(&[-1, 1])]).unwrap();
        assert!(!pid_point_in_open(&p, &x2m1).unwrap());
        assert!(pid_point_in_open(&PidPoint::ZeroIdeal, &UPoly::x()).unwrap());
        assert!(!pid_point_in_open(&PidPoint::ZeroIdeal, &UPoly::zero()).unwrap());
        let bad = PidPoint::PrimeSet(vec![x2m1]);
        assert_eq!(pid_point_in_open(&bad, &UPoly::x()).unwrap_err().name(), "NotIrreducibleCertificate");
        assert!(PidPoint::prime_set(vec![UPoly::from_ints(&[1, 0, 1])]).is_ok()); // x^2 + 1
    }

    #[test]
    fn lazy_lattice_queries() {
        let r = RingDescriptor::poly();
        let l = match build_semilattice(&r).unwrap() {
            Semilattice::Lazy(l) => l,
            _ => panic!(),
        };
        let el = |c: &[i64]| vec![crate::rings::poly_element(UPoly::from_ints(c))];
        assert!(l.leq(&el(&[-1, 1]), &el(&[-1, 0, 1])).unwrap());
        assert!(!l.leq(&el(&[-1, 0, 1]), &el(&[-1, 1])).unwrap());
        assert_eq!(l.join(&el(&[0, 1]), &el(&[0])).unwrap(), CellKey::Collapsed);
        let _ = q(0);
    }

    fn random_poset(n: usize, bits: u64) -> Vec<Vec<bool>> {
        // strictly upper-triangular relation closed transitively
        let mut leq = vec![vec![false; n]; n];
        let mut k = 0;
        for a in 0..n {
            leq[a][a] = true;
            for b in a + 1..n {
                leq[a][b] = bits & (1 << (k % 64)) != 0;
                k += 1;
            }
        }
        for m in 0..n {
            for a in 0..n {
                for b in 0..n {
                    if leq[a][m] && leq[m][b] {
                        leq[a][b] = true;
                    }
                }
            }
        }
        leq
    }

    proptest! {
        #[test]
        fn soberification_is_homeomorphism(n in 1usize..=6, bits in any::<u64>()) {
            let leq = random_poset(n, bits);
            let x = AlexandrovSpace::from_order((0..n).map(|i| i.to_string()).collect(), &leq).unwrap();
            prop_assert!(x.is_t0());
            let s = x.soberify();
            prop_assert_eq!(s.len(), n);
            prop_assert!(s.check_homeomorphism());
            let opens = x.opens();
            for &u in &opens {
                for &v in &opens {
                    prop_assert!(x.is_open(u | v) && x.is_open(u & v));
                }
            }
        }

        #[test]
        fn pid_order_matches_localization(a in proptest::collection::vec(-3i64..=3, 0..4), b in proptest::collection::vec(-3i64..=3, 0..4)) {
            let prod = |roots: &[i64]| roots.iter().fold(UPoly::one(), |acc, &c| acc.mul(&UPoly::linear(q(c))));
            let (h, g) = (prod(&a), prod(&b));
            let r = RingDescriptor::poly();
            let by_law = pid_leq(&h, &g);
            let by_units = subset_leq(&r, &[crate::rings::poly_element(h.clone())], &[crate::rings::poly_element(g.clone())]).unwrap();
            let by_roots = a.iter().all(|c| b.contains(c));
            prop_assert_eq!(by_law, by_units);
            prop_assert_eq!(by_law, by_roots);
        }

        #[test]
        fn join_laws_on_cyclic_lattices(n in 1u64..=30) {
            let l = finite(&RingDescriptor::modular(n));
            for a in 0..l.len() {
                prop_assert_eq!(l.join(a, a), a);
                prop_assert_eq!(l.join(l.bottom, a), a);
                for b in 0..l.len() {
                    prop_assert_eq!(l.join(a, b), l.join(b, a));
                    for c in 0..l.len() {
                        prop_assert_eq!(l.join(l.join(a, b), c), l.join(a, l.join(b, c)));
                    }
                }
            }
        }
    }
}
