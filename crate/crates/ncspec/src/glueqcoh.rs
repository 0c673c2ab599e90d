//! Gluing, Ore sets, and quasicoherent modules over affine spectra of
//! finite rings.
//!
//! Base change along a supported localization is always a quotient:
//! the insertion `α: R → loc(R,E)` is onto with kernel `K`, so
//! `loc(R,E) ⊗_R M = M / KM` with `loc(R,E)` acting through any lift.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::latspace::{members, PointSet};
use crate::localization::{induced_between, localize, Localization};
use crate::rings::{FiniteRing, RingDescriptor, RingElement};
use crate::sheafspec::{ncspec, ncspec_morphism, NCSpecSpace};
use crate::skewproj::SkewLaurentPoly;

fn bit(i: usize) -> PointSet {
    1 << i
}

/// A finite left module, stored as addition and action tables.
#[derive(Debug, Clone)]
pub struct FiniteModule {
    pub ring: FiniteRing,
    pub labels: Vec<String>,
    add: Vec<u32>,
    act: Vec<u32>,
    pub zero: usize,
}

impl FiniteModule {
    pub fn regular(r: &RingDescriptor) -> Result<Self> {
        let ring = FiniteRing::new(r)?;
        let n = ring.len();
        let labels = ring.elems.iter().map(|e| r.show(e)).collect();
        let add = (0..n * n).map(|k| ring.add(k / n, k % n) as u32).collect();
        let act = (0..n * n).map(|k| ring.mul(k / n, k % n) as u32).collect();
        let zero = ring.zero;
        Ok(FiniteModule { ring, labels, add, act, zero })
    }

    pub fn zero_module(r: &RingDescriptor) -> Result<Self> {
        let ring = FiniteRing::new(r)?;
        let act = vec![0; ring.len()];
        Ok(FiniteModule { ring, labels: vec!["0".into()], add: vec![0], act, zero: 0 })
    }

    /// `R / R·gens`.
    pub fn cyclic_quotient(r: &RingDescriptor, gens: &[RingElement]) -> Result<Self> {
        let m = FiniteModule::regular(r)?;
        let idx: Vec<usize> = gens
            .iter()
            .map(|g| m.ring.idx(g).ok_or_else(|| Error::ElementOwnershipMismatch { ring: r.to_string() }))
            .collect::<Result<_>>()?;
        let sub = m.submodule(&idx);
        Ok(m.quotient(&sub).0)
    }

    pub fn direct_sum(&self, other: &FiniteModule) -> Result<Self> {
        if self.ring.desc != other.ring.desc {
            return Err(Error::OwnerMismatch);
        }
        let (a, b) = (self.len(), other.len());
        let n = a * b;
        let pair = |i: usize| (i / b, i % b);
        let labels = (0..n).map(|i| format!("({}, {})", self.labels[i / b], other.labels[i % b])).collect();
        let mut add = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let ((x, y), (u, v)) = (pair(i), pair(j));
                add[i * n + j] = (self.add(x, u) * b + other.add(y, v)) as u32;
            }
        }
        let r = self.ring.len();
        let mut act = vec![0u32; r * n];
        for s in 0..r {
            for i in 0..n {
                let (x, y) = pair(i);
                act[s * n + i] = (self.act(s, x) * b + other.act(s, y)) as u32;
            }
        }
        Ok(FiniteModule { ring: self.ring.clone(), labels, add, act, zero: self.zero * b + other.zero })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.len() + b] as usize
    }

    pub fn act(&self, r: usize, m: usize) -> usize {
        self.act[r * self.len() + m] as usize
    }

    pub fn neg(&self, a: usize) -> usize {
        (0..self.len()).find(|&b| self.add(a, b) == self.zero).expect("additive inverse")
    }

    /// Module axioms, checked on every element.
    pub fn is_valid(&self) -> bool {
        let (n, r) = (self.len(), &self.ring);
        let group = (0..n).all(|a| self.add(a, self.zero) == a && (0..n).any(|b| self.add(a, b) == self.zero))
            && (0..n).all(|a| (0..n).all(|b| self.add(a, b) == self.add(b, a) && (0..n).all(|c| self.add(self.add(a, b), c) == self.add(a, self.add(b, c)))));
        let action = (0..n).all(|m| self.act(r.one, m) == m)
            && (0..r.len()).all(|s| {
                (0..n).all(|a| {
                    (0..n).all(|b| self.act(s, self.add(a, b)) == self.add(self.act(s, a), self.act(s, b)))
                        && (0..r.len()).all(|t| self.act(r.add(s, t), a) == self.add(self.act(s, a), self.act(t, a)) && self.act(r.mul(s, t), a) == self.act(s, self.act(t, a)))
                })
            });
        group && action
    }

    /// The submodule generated by the given elements.
    pub fn submodule(&self, gens: &[usize]) -> Vec<bool> {
        let mut inside = vec![false; self.len()];
        inside[self.zero] = true;
        let mut list = vec![self.zero];
        for &g in gens {
            for s in 0..self.ring.len() {
                let x = self.act(s, g);
                if !inside[x] {
                    inside[x] = true;
                    list.push(x);
                }
            }
        }
        let mut k = 0;
        while k < list.len() {
            let a = list[k];
            k += 1;
            for j in 0..list.len() {
                let c = self.add(a, list[j]);
                if !inside[c] {
                    inside[c] = true;
                    list.push(c);
                }
            }
        }
        inside
    }

    /// `M / N` and the projection `M → M/N`.
    pub fn quotient(&self, sub: &[bool]) -> (FiniteModule, Vec<usize>) {
        let n = self.len();
        let mut class = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for m in 0..n {
            if class[m] == usize::MAX {
                for s in (0..n).filter(|&s| sub[s]) {
                    class[self.add(m, s)] = reps.len();
                }
                reps.push(m);
            }
        }
        let k = reps.len();
        let labels = reps.iter().map(|&m| if k == n { self.labels[m].clone() } else { format!("[{}]", self.labels[m]) }).collect();
        let add = (0..k * k).map(|i| class[self.add(reps[i / k], reps[i % k])] as u32).collect();
        let act = (0..self.ring.len() * k).map(|i| class[self.act(i / k, reps[i % k])] as u32).collect();
        let q = FiniteModule { ring: self.ring.clone(), labels, add, act, zero: class[self.zero] };
        (q, class)
    }

    /// A submodule as a module in its own right, with its inclusion.
    pub fn restrict_to(&self, sub: &[bool]) -> (FiniteModule, Vec<usize>) {
        let incl: Vec<usize> = (0..self.len()).filter(|&m| sub[m]).collect();
        let pos = |m: usize| incl.binary_search(&m).expect("submodule is closed");
        let k = incl.len();
        let labels = incl.iter().map(|&m| self.labels[m].clone()).collect();
        let add = (0..k * k).map(|i| pos(self.add(incl[i / k], incl[i % k])) as u32).collect();
        let act = (0..self.ring.len() * k).map(|i| pos(self.act(i / k, incl[i % k])) as u32).collect();
        let zero = pos(self.zero);
        (FiniteModule { ring: self.ring.clone(), labels, add, act, zero }, incl)
    }

    /// The same group with a new ring acting through `lift`.
    fn over(&self, ring: FiniteRing, lift: &[usize]) -> FiniteModule {
        let n = self.len();
        let act = (0..ring.len() * n).map(|i| self.act(lift[i / n], i % n) as u32).collect();
        FiniteModule { ring, labels: self.labels.clone(), add: self.add.clone(), act, zero: self.zero }
    }

    /// Whether a table is additive and commutes with the action.
    pub fn is_linear(&self, to: &FiniteModule, f: &[usize]) -> bool {
        let n = self.len();
        f.len() == n
            && (0..n).all(|a| (0..n).all(|b| f[self.add(a, b)] == to.add(f[a], f[b])))
            && (0..self.ring.len()).all(|s| (0..n).all(|a| f[self.act(s, a)] == to.act(s, f[a])))
    }

    pub fn kernel(&self, to: &FiniteModule, f: &[usize]) -> Vec<bool> {
        f.iter().map(|&y| y == to.zero).collect()
    }
}

/// `loc(R,E) ⊗_R M` and the map `m ↦ 1 ⊗ m`.
pub fn base_change(l: &Localization, m: &FiniteModule) -> Result<(FiniteModule, Vec<usize>)> {
    let target = FiniteRing::new(&l.result)?;
    let alpha = m.ring.table_of(&l.insertion, &target)?;
    let mut lift = vec![usize::MAX; target.len()];
    for (r, &y) in alpha.iter().enumerate().rev() {
        lift[y] = r;
    }
    if lift.contains(&usize::MAX) {
        return Err(Error::UnsupportedClass { op: "base change along a non-surjective insertion".into(), ring: l.source.to_string() });
    }
    let km: Vec<usize> = (0..m.ring.len()).filter(|&r| alpha[r] == target.zero).flat_map(|k| (0..m.len()).map(move |x| (k, x))).map(|(k, x)| m.act(k, x)).collect();
    let (q, proj) = m.quotient(&m.submodule(&km));
    Ok((q.over(target, &lift), proj))
}

/// The sheaf `M̃` on the basic opens of `NCSpec(R)`.
#[derive(Debug, Clone)]
pub struct TildeModule {
    pub space: NCSpecSpace,
    pub module: FiniteModule,
    /// `M̃(Ũ_E)` for each cell `E`.
    pub pieces: Vec<FiniteModule>,
    /// `M → M̃(Ũ_E)`.
    pub to_piece: Vec<Vec<usize>>,
}

pub fn tilde_module(r: &RingDescriptor, m: &FiniteModule) -> Result<TildeModule> {
    if m.ring.desc != *r {
        return Err(Error::OwnerMismatch);
    }
    if !r.is_finite() {
        return Err(Error::UnsupportedClass { op: "tilde_module".into(), ring: r.to_string() });
    }
    let space = ncspec(r)?;
    let mut pieces = Vec::new();
    let mut to_piece = Vec::new();
    for cell in &space.lattice.cells {
        let (p, map) = base_change(&cell.localized, m)?;
        pieces.push(p);
        to_piece.push(map);
    }
    Ok(TildeModule { space, module: m.clone(), pieces, to_piece })
}

impl TildeModule {
    /// Restriction `M̃(Ũ_a) → M̃(Ũ_b)` for `a ≤ b`, through lifts to `M`.
    pub fn restriction(&self, a: usize, b: usize) -> Result<Vec<usize>> {
        if !self.space.lattice.leq(a, b) {
            return Err(Error::NotComparable { detail: format!("{} is not below {}", self.space.lattice.cells[a].label, self.space.lattice.cells[b].label) });
        }
        let mut table = vec![usize::MAX; self.pieces[a].len()];
        for m in 0..self.module.len() {
            let (x, y) = (self.to_piece[a][m], self.to_piece[b][m]);
            if table[x] != usize::MAX && table[x] != y {
                return Err(Error::NotAHomomorphism { witness: "restriction is not well defined".into() });
            }
            table[x] = y;
        }
        Ok(table)
    }

    /// Identity and composition laws of the restrictions.
    pub fn check_presheaf(&self) -> Result<bool> {
        let lat = &self.space.lattice;
        let n = lat.len();
        let mut res = BTreeMap::new();
        for a in 0..n {
            for b in (0..n).filter(|&b| lat.leq(a, b)) {
                res.insert((a, b), self.restriction(a, b)?);
            }
        }
        for a in 0..n {
            if res[&(a, a)].iter().enumerate().any(|(i, &j)| i != j) {
                return Ok(false);
            }
            for b in (0..n).filter(|&b| lat.leq(a, b)) {
                for c in (0..n).filter(|&c| lat.leq(b, c)) {
                    let (ab, bc, ac) = (&res[&(a, b)], &res[&(b, c)], &res[&(a, c)]);
                    if (0..ab.len()).any(|x| bc[ab[x]] != ac[x]) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    pub fn global_sections(&self) -> &FiniteModule {
        &self.pieces[self.space.lattice.bottom]
    }

    /// The components of `f̃: M̃ → Ñ` on basic opens, each read off `f`.
    pub fn induced(&self, other: &TildeModule, f: &[usize]) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        for c in 0..self.pieces.len() {
            let mut table = vec![usize::MAX; self.pieces[c].len()];
            for m in 0..self.module.len() {
                let (x, y) = (self.to_piece[c][m], other.to_piece[c][f[m]]);
                if table[x] != usize::MAX && table[x] != y {
                    return Err(Error::NotAHomomorphism { witness: format!("f does not descend to {}", self.space.lattice.cells[c].label) });
                }
                table[x] = y;
            }
            out.push(table);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.space.ring.to_string(),
            "module_size": self.module.len(),
            "pieces": self.space.lattice.cells.iter().zip(&self.pieces).map(|(c, p)| json!({
                "open": c.label,
                "ring": c.localized.result.to_string(),
                "size": p.len(),
                "elements": p.labels,
            })).collect::<Vec<_>>(),
        })
    }
}

/// `Γ(M̃) ≅ M` and the rebuilt sheaf of `Γ(M̃)` against `M̃`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundtripReport {
    pub module_size: usize,
    pub gamma_size: usize,
    pub unit_bijective: bool,
    pub reconstruction_matches: bool,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.unit_bijective && self.reconstruction_matches
    }
}

pub fn qcoh_roundtrip(r: &RingDescriptor, m: &FiniteModule) -> Result<RoundtripReport> {
    let t = tilde_module(r, m)?;
    let g = t.global_sections();
    let unit = &t.to_piece[t.space.lattice.bottom];
    let mut seen = unit.clone();
    seen.sort_unstable();
    seen.dedup();
    // the bottom cell localizes at {1}, so its ring is R with the same indexing
    let unit_bijective = seen.len() == m.len() && g.len() == m.len() && g.ring.desc == m.ring.desc && m.is_linear(g, unit);
    let rebuilt = tilde_module(r, g)?;
    let reconstruction_matches = rebuilt.check_presheaf()? && rebuilt.pieces.iter().zip(&t.pieces).all(|(a, b)| a.len() == b.len());
    Ok(RoundtripReport { module_size: m.len(), gamma_size: g.len(), unit_bijective, reconstruction_matches })
}

/// Coherence data `({M_i}, {φ_ij})` over a cover of `NCSpec(R)` by basic
/// opens. Each `φ_ij` acts on `M̃` over the overlap `Ũ_{E_i ∪ E_j}`.
#[derive(Debug, Clone)]
pub struct QcohDatum {
    pub tilde: TildeModule,
    pub charts: Vec<usize>,
    pub phi: BTreeMap<(usize, usize), Vec<usize>>,
}

impl QcohDatum {
    /// The datum obtained by restricting a global module, `φ_ij = id`.
    pub fn from_module(tilde: TildeModule, charts: Vec<usize>) -> Self {
        let mut phi = BTreeMap::new();
        for i in 0..charts.len() {
            for j in 0..charts.len() {
                let o = tilde.space.lattice.join(charts[i], charts[j]);
                phi.insert((i, j), (0..tilde.pieces[o].len()).collect());
            }
        }
        QcohDatum { tilde, charts, phi }
    }

    pub fn overlap(&self, idx: &[usize]) -> usize {
        let lat = &self.tilde.space.lattice;
        idx.iter().fold(lat.bottom, |acc, &i| lat.join(acc, self.charts[i]))
    }
}

/// Violations found by a cocycle check; empty for a valid datum.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleReport {
    pub violations: Vec<String>,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn qcoh_cocycle_check(d: &QcohDatum) -> Result<CocycleReport> {
    let t = &d.tilde;
    let k = d.charts.len();
    let mut v = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let o = d.overlap(&[i, j]);
            let piece = &t.pieces[o];
            let Some(f) = d.phi.get(&(i, j)) else {
                v.push(format!("φ_{i}{j} missing"));
                continue;
            };
            if !piece.is_linear(piece, f) {
                v.push(format!("φ_{i}{j} is not linear over the overlap ring"));
            }
            if i == j && f.iter().enumerate().any(|(x, &y)| x != y) {
                v.push(format!("φ_{i}{i} is not the identity"));
            }
            if let Some(g) = d.phi.get(&(j, i)) {
                if let Some(x) = (0..f.len()).find(|&x| g[f[x]] != x) {
                    v.push(format!("φ_{j}{i} ∘ φ_{i}{j} moves {}", piece.labels[x]));
                }
            }
        }
    }
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                let tri = d.overlap(&[i, j, l]);
                let restrict = |a: usize, b: usize| -> Result<Option<Vec<usize>>> {
                    let o = d.overlap(&[a, b]);
                    let res = t.restriction(o, tri)?;
                    let f = &d.phi[&(a, b)];
                    let mut out = vec![usize::MAX; t.pieces[tri].len()];
                    for x in 0..f.len() {
                        if out[res[x]] != usize::MAX && out[res[x]] != res[f[x]] {
                            return Ok(None);
                        }
                        out[res[x]] = res[f[x]];
                    }
                    Ok(Some(out))
                };
                match (restrict(i, j)?, restrict(j, l)?, restrict(i, l)?) {
                    (Some(ij), Some(jl), Some(il)) => {
                        if let Some(x) = (0..ij.len()).find(|&x| jl[ij[x]] != il[x]) {
                            v.push(format!("φ_{j}{l} φ_{i}{j} ≠ φ_{i}{l} on {}", t.pieces[tri].labels[x]));
                        }
                    }
                    _ => v.push(format!("φ on charts {i},{j},{l} does not restrict to the triple overlap")),
                }
            }
        }
    }
    Ok(CocycleReport { violations: v })
}

/// Which side fractions are written on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Evidence that `⟨E⟩` satisfies the Ore condition: for right sets,
/// `r s' = s r'`; for left sets, `s' r = r' s`.
#[derive(Debug, Clone)]
pub struct OreCertificate {
    pub ring: RingDescriptor,
    pub subset: Vec<RingElement>,
    pub closure_bound: usize,
    pub side: Side,
    /// Size of `⟨E⟩` for finite rings.
    pub closure_size: Option<usize>,
    /// Witnesses `(r, s, r', s')`; the finite case lists one per pair.
    pub witnesses: Vec<(RingElement, RingElement, RingElement, RingElement)>,
    /// Whether the condition was proved for all `r` rather than a sample.
    pub structural: bool,
}

pub fn certify_ore(r: &RingDescriptor, subset: &[RingElement], bound: usize, side: Side) -> Result<OreCertificate> {
    for x in subset {
        r.check_owns(x)?;
    }
    let mut cert = OreCertificate { ring: r.clone(), subset: subset.to_vec(), closure_bound: bound, side, closure_size: None, witnesses: Vec::new(), structural: false };
    if let RingDescriptor::SkewLaurent(spec) = r {
        return skew_ore(spec, subset, cert);
    }
    if !r.is_finite() {
        if r.is_commutative() {
            cert.structural = true;
            return Ok(cert);
        }
        return Err(Error::UnsupportedClass { op: "certify_ore".into(), ring: r.to_string() });
    }
    let fr = FiniteRing::new(r)?;
    let gens: Vec<usize> = subset.iter().map(|x| fr.idx(x).expect("owned element")).collect();
    let mut inside = vec![false; fr.len()];
    inside[fr.one] = true;
    let mut closure = vec![fr.one];
    let mut grew = true;
    for _ in 0..bound {
        grew = false;
        for k in 0..closure.len() {
            for &g in &gens {
                let p = fr.mul(closure[k], g);
                if !inside[p] {
                    inside[p] = true;
                    closure.push(p);
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    if grew {
        return Err(Error::ClosureBoundExceeded { bound });
    }
    cert.closure_size = Some(closure.len());
    let commutative = fr.is_commutative();
    for x in 0..fr.len() {
        for &s in &closure {
            let found = if commutative {
                Some((x, s))
            } else {
                closure.iter().find_map(|&s2| {
                    (0..fr.len())
                        .find(|&x2| match side {
                            Side::Right => fr.mul(x, s2) == fr.mul(s, x2),
                            Side::Left => fr.mul(s2, x) == fr.mul(x2, s),
                        })
                        .map(|x2| (x2, s2))
                })
            };
            match found {
                Some((x2, s2)) => cert.witnesses.push((fr.elems[x].clone(), fr.elems[s].clone(), fr.elems[x2].clone(), fr.elems[s2].clone())),
                None => return Err(Error::OreConditionFails { r: r.show(&fr.elems[x]), s: r.show(&fr.elems[s]) }),
            }
        }
    }
    cert.structural = true;
    Ok(cert)
}

/// Monomial sets: conjugating by a monomial only rescales monomials, so
/// `r' = s⁻¹ r s` (right) or `r' = s r s⁻¹` (left) with `s' = s` always works.
fn skew_ore(spec: &crate::skewproj::SkewSpec, subset: &[RingElement], mut cert: OreCertificate) -> Result<OreCertificate> {
    let full = spec.with_inverted((0..spec.nvars).collect());
    for x in subset {
        let RingElement::Skew(p) = x else { unreachable!("owned by a skew ring") };
        if p.as_monomial().is_none() {
            return Err(Error::NonMonomialSkewSubset { element: p.to_string() });
        }
        let inv = full.monomial_inverse(p).expect("monomials are invertible once every variable is");
        let sample = (0..spec.nvars).map(|i| SkewLaurentPoly::var(spec.nvars, i));
        for r in sample {
            let r2 = match cert.side {
                Side::Right => full.mul(&full.mul(&inv, &r)?, p)?,
                Side::Left => full.mul(&full.mul(p, &r)?, &inv)?,
            };
            debug_assert!(r2.terms.keys().all(|e| spec.admits(e)));
            cert.witnesses.push((RingElement::Skew(r), x.clone(), RingElement::Skew(r2), x.clone()));
        }
    }
    cert.structural = true;
    Ok(cert)
}

/// `Ũ_E ≅ NCSpec(loc(R,E))` for an Ore set `E`.
#[derive(Debug, Clone)]
pub struct ChartIso {
    pub space: NCSpecSpace,
    pub chart: NCSpecSpace,
    pub open: PointSet,
    /// Point of `space` inside `Ũ_E` ↦ point of `chart`.
    pub point_map: BTreeMap<usize, usize>,
    pub bijective: bool,
    pub comaps_invertible: bool,
    pub triangle: bool,
}

impl ChartIso {
    pub fn passed(&self) -> bool {
        self.bijective && self.comaps_invertible && self.triangle
    }
}

pub fn ore_chart_iso(r: &RingDescriptor, subset: &[RingElement]) -> Result<ChartIso> {
    certify_ore(r, subset, 64, Side::Right).map_err(|e| Error::NotOre { detail: e.to_string() })?;
    let l = localize(r, subset)?;
    let space = ncspec(r)?;
    let chart = ncspec(&l.result)?;
    let e = space.lattice.cell_of(subset)?;
    let open = space.basic_open(e);
    let alpha = ncspec_morphism(&l.insertion)?;
    let mut point_map = BTreeMap::new();
    for (q, &p) in alpha.point_map.iter().enumerate() {
        point_map.insert(p, q);
    }
    let image = alpha.point_map.iter().fold(0, |s, &p| s | bit(p));
    let bijective = point_map.len() == chart.len();
    let triangle = image == open;
    let mut comaps_invertible = true;
    for f in members(space.lattice.space().up[e]) {
        let cell = &space.lattice.cells[f];
        let images: Vec<RingElement> = cell.representative.iter().map(|x| l.insertion.apply(x)).collect::<Result<_>>()?;
        let g = chart.lattice.cell_of(&images)?;
        let h = induced_between(&l.insertion, &cell.localized, &chart.lattice.cells[g].localized)?;
        let (src, dst) = (FiniteRing::new(&h.source)?, FiniteRing::new(&h.target)?);
        let table = src.table_of(&h, &dst)?;
        let mut delta = vec![usize::MAX; dst.len()];
        for (x, &y) in table.iter().enumerate() {
            delta[y] = x;
        }
        comaps_invertible &= src.len() == dst.len() && (0..src.len()).all(|x| delta[table[x]] == x);
    }
    Ok(ChartIso { space, chart, open, point_map, bijective, comaps_invertible, triangle })
}

/// Pieces, overlaps `U_{αβ} ⊆ X_α`, and point bijections `φ_{αβ}`.
/// Overlaps missing from the map are empty, except `U_{αα} = X_α`.
#[derive(Debug, Clone)]
pub struct GlueDatum {
    pub pieces: Vec<NCSpecSpace>,
    pub overlaps: BTreeMap<(usize, usize), PointSet>,
    pub isos: BTreeMap<(usize, usize), BTreeMap<usize, usize>>,
}

impl GlueDatum {
    fn overlap(&self, a: usize, b: usize) -> PointSet {
        if a == b {
            self.pieces[a].full()
        } else {
            self.overlaps.get(&(a, b)).copied().unwrap_or(0)
        }
    }

    fn iso(&self, a: usize, b: usize, p: usize) -> Option<usize> {
        if a == b {
            Some(p)
        } else {
            self.isos.get(&(a, b)).and_then(|m| m.get(&p).copied())
        }
    }
}

/// The glued space with its chart embeddings `ψ_α`.
#[derive(Debug, Clone)]
pub struct GluedSpace {
    pub labels: Vec<String>,
    pub opens: Vec<PointSet>,
    pub charts: Vec<Vec<usize>>,
    pub pieces: Vec<NCSpecSpace>,
}

impl GluedSpace {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn chart_preimage(&self, a: usize, v: PointSet) -> PointSet {
        self.charts[a].iter().enumerate().filter(|(_, &g)| v & bit(g) != 0).fold(0, |s, (p, _)| s | bit(p))
    }

    /// Sections over an open lying inside one chart image.
    pub fn sections(&self, v: PointSet) -> Result<RingDescriptor> {
        for (a, chart) in self.charts.iter().enumerate() {
            let image = chart.iter().fold(0, |s, &g| s | bit(g));
            if v & !image == 0 {
                return Ok(self.pieces[a].sections(self.chart_preimage(a, v))?.ring);
            }
        }
        Err(Error::UnsupportedClass { op: "sections across charts".into(), ring: format!("{v:b}") })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "points": self.labels,
            "opens": self.opens.iter().map(|&o| members(o).map(|p| self.labels[p].clone()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "charts": self.charts.iter().map(|c| c.iter().map(|&g| self.labels[g].clone()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

pub fn glue(d: &GlueDatum) -> Result<GluedSpace> {
    let k = d.pieces.len();
    let violation = |w: String| Err(Error::CocycleViolation { witness: w });
    for a in 0..k {
        for b in 0..k {
            let u = d.overlap(a, b);
            if !d.pieces[a].is_open(u) {
                return violation(format!("U_{a}{b} is not open"));
            }
            for p in members(u) {
                let Some(q) = d.iso(a, b, p) else { return violation(format!("φ_{a}{b} undefined at point {p}")) };
                if d.overlap(b, a) & bit(q) == 0 {
                    return violation(format!("φ_{a}{b} sends point {p} outside U_{b}{a}"));
                }
                if d.iso(b, a, q) != Some(p) {
                    return violation(format!("φ_{b}{a} ∘ φ_{a}{b} moves point {p} of piece {a}"));
                }
                for c in 0..k {
                    if d.overlap(a, c) & bit(p) != 0 {
                        let via = (d.overlap(b, c) & bit(q) != 0).then(|| d.iso(b, c, q)).flatten();
                        if via != d.iso(a, c, p) {
                            return violation(format!("φ_{b}{c} ∘ φ_{a}{b} ≠ φ_{a}{c} at point {p} of piece {a}"));
                        }
                    }
                }
            }
            for o in d.pieces[a].lattice.space().opens() {
                let w = d.pieces[a].space.tilde(o);
                if w & !u == 0 {
                    let image = members(w).fold(0, |s, p| s | bit(d.iso(a, b, p).unwrap()));
                    if !d.pieces[b].is_open(image) || d.pieces[a].sections(w)?.ring != d.pieces[b].sections(image)?.ring {
                        return violation(format!("φ_{a}{b} does not match open sets and section rings on {w:b}"));
                    }
                }
            }
        }
    }
    // identify (α, p) with (β, φ_αβ(p))
    let offsets: Vec<usize> = d.pieces.iter().scan(0, |s, p| {
        let o = *s;
        *s += p.len();
        Some(o)
    }).collect();
    let total = offsets.last().map_or(0, |o| o + d.pieces[k - 1].len());
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for a in 0..k {
        for b in 0..k {
            for p in members(d.overlap(a, b)) {
                let (x, y) = (find(&mut parent, offsets[a] + p), find(&mut parent, offsets[b] + d.iso(a, b, p).unwrap()));
                parent[x.max(y)] = x.min(y);
            }
        }
    }
    let mut class_of = vec![usize::MAX; total];
    let mut labels = Vec::new();
    for a in 0..k {
        for p in 0..d.pieces[a].len() {
            let root = find(&mut parent, offsets[a] + p);
            if class_of[root] == usize::MAX {
                class_of[root] = labels.len();
                labels.push(format!("{}@{a}", d.pieces[a].point_label(p)));
            }
        }
    }
    let charts: Vec<Vec<usize>> = (0..k).map(|a| (0..d.pieces[a].len()).map(|p| class_of[find(&mut parent, offsets[a] + p)]).collect()).collect();
    let n = labels.len();
    if n > 20 {
        return Err(Error::UnsupportedClass { op: "glue".into(), ring: format!("{n} glued points") });
    }
    let mut g = GluedSpace { labels, opens: Vec::new(), charts, pieces: d.pieces.clone() };
    g.opens = (0..1u64 << n).filter(|&v| (0..k).all(|a| d.pieces[a].is_open(g.chart_preimage(a, v)))).collect();
    for a in 0..k {
        let mut seen = g.charts[a].clone();
        seen.sort_unstable();
        seen.dedup();
        let injective = seen.len() == g.charts[a].len();
        let open_map = d.pieces[a].lattice.space().opens().into_iter().all(|o| {
            let w = d.pieces[a].space.tilde(o);
            g.opens.contains(&members(w).fold(0, |s, p| s | bit(g.charts[a][p])))
        });
        if !injective || !open_map {
            return violation(format!("ψ_{a} is not an open embedding"));
        }
        for b in 0..k {
            if let Some(p) = members(d.overlap(a, b)).find(|&p| g.charts[a][p] != g.charts[b][d.iso(a, b, p).unwrap()]) {
                return violation(format!("ψ_{a} ≠ ψ_{b} ∘ φ_{a}{b} at point {p}"));
            }
        }
    }
    Ok(g)
}

/// Stalk-level and sheaf-level exactness of `0 → A → B → C → 0` pushed
/// to `NCSpec(R)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactnessReport {
    /// Per point: whether the stalk sequence is exact.
    pub stalks: Vec<(String, bool)>,
    /// Whether `(ker g)~ → B̃ → C̃` is exact on every basic open.
    pub kernel_exact: bool,
}

impl ExactnessReport {
    pub fn some_stalk_not_exact(&self) -> bool {
        self.stalks.iter().any(|(_, ok)| !ok)
    }
}

fn exact_at(f: &[usize], g: &[usize], b: &FiniteModule, c: &FiniteModule) -> bool {
    let image: Vec<bool> = (0..b.len()).map(|y| f.contains(&y)).collect();
    (0..b.len()).all(|y| image[y] == (g[y] == c.zero))
}

pub fn sequence_exactness(r: &RingDescriptor, a: &FiniteModule, b: &FiniteModule, c: &FiniteModule, f: &[usize], g: &[usize]) -> Result<ExactnessReport> {
    if !a.is_linear(b, f) || !b.is_linear(c, g) {
        return Err(Error::NotAHomomorphism { witness: "sequence maps are not module maps".into() });
    }
    let (ta, tb, tc) = (tilde_module(r, a)?, tilde_module(r, b)?, tilde_module(r, c)?);
    let (fs, gs) = (ta.induced(&tb, f)?, tb.induced(&tc, g)?);
    let sp = &tb.space;
    let stalks = (0..sp.len())
        .map(|p| {
            // the smallest basic open around ↓x is Ũ_x
            let x = sp.space.points[p].apex;
            let injective = fs[x].iter().enumerate().all(|(i, &y)| (y == tb.pieces[x].zero) == (i == ta.pieces[x].zero));
            let surjective = (0..tc.pieces[x].len()).all(|z| gs[x].contains(&z));
            (sp.point_label(p), injective && surjective && exact_at(&fs[x], &gs[x], &tb.pieces[x], &tc.pieces[x]))
        })
        .collect();
    let (k, incl) = b.restrict_to(&b.kernel(c, g));
    let tk = tilde_module(r, &k)?;
    let ks = tk.induced(&tb, &incl)?;
    let kernel_exact = (0..sp.lattice.len()).all(|x| exact_at(&ks[x], &gs[x], &tb.pieces[x], &tc.pieces[x]));
    Ok(ExactnessReport { stalks, kernel_exact })
}

/// `0 → 2Z/4 → Z/4 → Z/2 → 0`.
pub fn z4_sequence() -> Result<(RingDescriptor, FiniteModule, FiniteModule, FiniteModule, Vec<usize>, Vec<usize>)> {
    let r = RingDescriptor::modular(4);
    let b = FiniteModule::regular(&r)?;
    let two = RingElement::Residue(2);
    let (a, incl) = b.restrict_to(&b.submodule(&[b.ring.idx(&two).unwrap()]));
    let c = FiniteModule::cyclic_quotient(&r, &[two])?;
    let g: Vec<usize> = (0..b.len()).map(|x| x % 2).collect();
    Ok((r, a, b, c, incl, g))
}

impl ExactnessReport {
    pub fn to_json(&self) -> Value {
        json!({
            "stalks": self.stalks.iter().map(|(p, ok)| json!({"point": p, "exact": ok})).collect::<Vec<_>>(),
            "kernel_exact": self.kernel_exact,
        })
    }
}
