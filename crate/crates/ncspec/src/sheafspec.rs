//! `NCSpec(R)` as a ringed space, the morphisms induced by ring maps, and
//! the decision procedure for prim morphisms.
//!
//! Sections over an open that is not basic are the limit of the basic
//! section rings inside it. Every supported finite-type ring is a product of
//! indecomposable factors ("atoms": prime-power cyclic factors and simple
//! blocks), each localization keeps a subset of them, and restrictions are
//! the projections. The limit therefore keeps the union of the atom sets, and
//! it is realized as the localization at the matching central idempotent.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::latspace::{members, sober_map_from_join_hom, LocalizationLattice, PointSet, Semilattice, SoberSpace};
use crate::localization::{connect, default_probes, induced_between, is_pushout, localize, CellKey, Localization, LocalizationSquare};
use crate::rings::{hom_validate, HomRule, Matrix, RingDescriptor, RingElement, RingHom};
use crate::scalar::factorize;

/// The ringed space `S(L(R))` with its structure sheaf.
#[derive(Debug, Clone)]
pub struct NCSpecSpace {
    pub ring: RingDescriptor,
    pub lattice: LocalizationLattice,
    pub space: SoberSpace,
    pub generic: usize,
}

/// Sections over an open, with the localization realizing them.
#[derive(Debug, Clone)]
pub struct SectionRing {
    pub ring: RingDescriptor,
    pub localization: Localization,
    /// The cell whose basic open this is, if the open is basic.
    pub basic: Option<usize>,
}

pub fn ncspec(r: &RingDescriptor) -> Result<NCSpecSpace> {
    let lattice = match crate::latspace::build_semilattice(r)? {
        Semilattice::Finite(l) => l,
        Semilattice::Lazy(_) => return Err(Error::UnsupportedClass { op: "ncspec".into(), ring: r.to_string() }),
    };
    let space = lattice.space().soberify();
    let generic = space.generic.expect("L(R) has a top element");
    let sp = NCSpecSpace { ring: r.clone(), lattice, space, generic };
    if sp.lattice.cells[sp.lattice.bottom].localized.result != *r {
        return Err(Error::UnsupportedClass { op: "global sections".into(), ring: r.to_string() });
    }
    for c in 0..sp.lattice.len() {
        let u = sp.basic_open(c);
        debug_assert!(u & (1 << sp.generic) != 0, "generic point lies in every nonempty open");
    }
    Ok(sp)
}

impl NCSpecSpace {
    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn full(&self) -> PointSet {
        self.space.tilde(self.lattice.space().full())
    }

    pub fn point_label(&self, p: usize) -> String {
        format!("↓{}", self.lattice.cells[self.space.points[p].apex].label)
    }

    /// `Ũ_E` for the cell `E`.
    pub fn basic_open(&self, cell: usize) -> PointSet {
        self.space.tilde(self.lattice.space().up[cell])
    }

    pub fn is_open(&self, v: PointSet) -> bool {
        let u = self.space.untilde(v);
        self.lattice.space().is_open(u) && self.space.tilde(u) == v
    }

    /// The cell `E` with `v = Ũ_E`, if `v` is basic.
    pub fn basic_cell(&self, v: PointSet) -> Option<usize> {
        self.lattice.space().principal_point(self.space.untilde(v))
    }

    pub fn cell_ring(&self, cell: usize) -> &RingDescriptor {
        &self.lattice.cells[cell].localized.result
    }

    pub fn sections(&self, v: PointSet) -> Result<SectionRing> {
        if !self.is_open(v) {
            return Err(Error::NotOpen);
        }
        let basic = self.basic_cell(v);
        if let Some(c) = basic {
            let l = self.lattice.cells[c].localized.clone();
            return Ok(SectionRing { ring: l.result.clone(), localization: l, basic });
        }
        let r = &self.ring;
        let atoms = members(self.space.untilde(v)).fold(0u64, |s, c| s | key_atoms(r, self.lattice.cells[c].key()));
        let l = localize(r, &[atom_idempotent(r, atoms)])?;
        Ok(SectionRing { ring: l.result.clone(), localization: l, basic })
    }

    /// The restriction `O(V) → O(W)` for `W ⊆ V`.
    pub fn restriction(&self, v: PointSet, w: PointSet) -> Result<RingHom> {
        if w & !v != 0 {
            return Err(Error::NotOpen);
        }
        connect(&self.sections(v)?.localization, &self.sections(w)?.localization)
    }

    /// Every section ring over a basic open, plus the zero ring.
    pub fn section_rings(&self) -> Vec<RingDescriptor> {
        let mut out: Vec<RingDescriptor> = (0..self.lattice.len()).map(|c| self.cell_ring(c).clone()).collect();
        out.push(RingDescriptor::Zero);
        out.sort();
        out.dedup();
        out
    }

    pub fn to_dot(&self) -> String {
        self.space.space().to_dot("NCSpec")
    }

    pub fn to_json(&self) -> Value {
        let sp = self.space.space();
        let n = self.len();
        json!({
            "ring": self.ring.to_string(),
            "points": (0..n).map(|p| self.point_label(p)).collect::<Vec<_>>(),
            "specialization": (0..n).map(|a| (0..n).map(|b| u8::from(sp.leq(a, b))).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "generic": self.point_label(self.generic),
            "basic_opens": (0..self.lattice.len()).map(|c| json!({
                "cell": self.lattice.cells[c].label,
                "points": members(self.basic_open(c)).map(|p| self.point_label(p)).collect::<Vec<_>>(),
                "sections": self.cell_ring(c).to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn atom_count(r: &RingDescriptor) -> usize {
    match r {
        RingDescriptor::Zero => 0,
        RingDescriptor::Modular { n } => factorize(*n).len(),
        RingDescriptor::Matrix { .. } => 1,
        RingDescriptor::Semisimple { dims, .. } => dims.len(),
        RingDescriptor::Product { factors } => factors.iter().map(atom_count).sum(),
        RingDescriptor::Poly { .. } | RingDescriptor::SkewLaurent(_) => 0,
    }
}

/// The atoms kept by the localization with this key, as a bitmask.
fn key_atoms(r: &RingDescriptor, key: &CellKey) -> u64 {
    match (r, key) {
        (RingDescriptor::Modular { n }, CellKey::Idempotent(e)) => factorize(*n)
            .iter()
            .enumerate()
            .filter(|(_, (p, k))| {
                let q = p.pow(*k);
                e % q == 1 % q
            })
            .fold(0, |s, (i, _)| s | 1 << i),
        (_, CellKey::Blocks(mask)) => mask.iter().enumerate().filter(|(_, &b)| b).fold(0, |s, (i, _)| s | 1 << i),
        (RingDescriptor::Product { factors }, CellKey::Factors(keys)) => {
            let mut shift = 0;
            let mut out = 0;
            for (f, k) in factors.iter().zip(keys) {
                out |= key_atoms(f, k) << shift;
                shift += atom_count(f);
            }
            out
        }
        _ => 0,
    }
}

/// The central idempotent that is `1` on the given atoms and `0` elsewhere.
fn atom_idempotent(r: &RingDescriptor, atoms: u64) -> RingElement {
    match r {
        RingDescriptor::Modular { n } => {
            let f = factorize(*n);
            let e = (0..*n)
                .find(|e| {
                    f.iter().enumerate().all(|(i, (p, k))| {
                        let q = p.pow(*k);
                        let want = if atoms & (1 << i) != 0 { 1 % q } else { 0 };
                        e % q == want
                    })
                })
                .expect("Chinese remainder solution");
            RingElement::Residue(e)
        }
        RingDescriptor::Matrix { .. } => {
            if atoms & 1 != 0 {
                r.one()
            } else {
                r.zero()
            }
        }
        RingDescriptor::Semisimple { dims, .. } => RingElement::Blocks(
            dims.iter().enumerate().map(|(j, &d)| if atoms & (1 << j) != 0 { Matrix::identity(d) } else { Matrix::zero(d) }).collect(),
        ),
        RingDescriptor::Product { factors } => {
            let mut shift = 0;
            let mut parts = Vec::new();
            for f in factors {
                let k = atom_count(f);
                parts.push(atom_idempotent(f, (atoms >> shift) & ((1u64 << k) - 1)));
                shift += k;
            }
            RingElement::Tuple(parts)
        }
        _ => r.zero(),
    }
}

/// A morphism of ringed spaces `X → Y` between two spectra, given by its
/// point map and its comaps on the basic opens of `Y`.
#[derive(Debug, Clone)]
pub struct RingedSpaceMorphism {
    pub source: NCSpecSpace,
    pub target: NCSpecSpace,
    /// Point of `source` ↦ point of `target`.
    pub point_map: Vec<usize>,
    /// For each cell `E` of the target lattice, `O_Y(Ũ_E) → O_X(f⁻¹ Ũ_E)`.
    pub comaps: Vec<RingHom>,
}

impl RingedSpaceMorphism {
    pub fn preimage(&self, v: PointSet) -> PointSet {
        self.point_map.iter().enumerate().filter(|(_, &y)| v & (1 << y) != 0).fold(0, |s, (x, _)| s | 1 << x)
    }

    pub fn is_continuous(&self) -> bool {
        (0..self.target.lattice.len()).all(|c| self.source.is_open(self.preimage(self.target.basic_open(c))))
    }

    /// Comaps commute with the restrictions of both sheaves on every nested
    /// pair of basic opens.
    pub fn comaps_commute(&self) -> Result<bool> {
        let (x, y) = (&self.source, &self.target);
        for a in 0..y.lattice.len() {
            for b in 0..y.lattice.len() {
                if a == b || !y.lattice.leq(a, b) {
                    continue;
                }
                let (va, vb) = (y.basic_open(a), y.basic_open(b));
                let sq = LocalizationSquare {
                    top: self.comaps[a].clone(),
                    left: y.restriction(va, vb)?,
                    right: x.restriction(self.preimage(va), self.preimage(vb))?,
                    bottom: self.comaps[b].clone(),
                };
                if !sq.commutes()? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// `(θ̂, θ̂#): NCSpec(S) → NCSpec(R)` for `θ: R → S`.
pub fn ncspec_morphism(theta: &RingHom) -> Result<RingedSpaceMorphism> {
    hom_validate(theta)?;
    let y = ncspec(&theta.source)?;
    let x = ncspec(&theta.target)?;
    let mut t = Vec::with_capacity(y.lattice.len());
    for cell in &y.lattice.cells {
        let image: Vec<RingElement> = cell.representative.iter().map(|e| theta.apply(e)).collect::<Result<_>>()?;
        t.push(x.lattice.cell_of(&image)?);
    }
    let sober = sober_map_from_join_hom(&y.lattice.order, &x.lattice.order, &t)?;
    let point_map = (0..x.len())
        .map(|p| {
            let apex = sober.images[x.space.points[p].apex];
            y.space.points.iter().position(|c| c.apex == apex).expect("point of the target")
        })
        .collect();
    let mut comaps = Vec::with_capacity(y.lattice.len());
    for (c, &tc) in t.iter().enumerate() {
        comaps.push(induced_between(theta, &y.lattice.cells[c].localized, &x.lattice.cells[tc].localized)?);
    }
    let m = RingedSpaceMorphism { source: x, target: y, point_map, comaps };
    for (c, &tc) in t.iter().enumerate() {
        assert_eq!(m.preimage(m.target.basic_open(c)), m.source.basic_open(tc), "preimage of a basic open");
    }
    Ok(m)
}

/// The global-sections comap, which is the ring map a morphism came from.
pub fn recover_hom(m: &RingedSpaceMorphism) -> RingHom {
    m.comaps[m.target.lattice.bottom].clone()
}

/// Failures of `(φθ)^ = θ̂ ∘ φ̂` on points and `(φθ)_E = φ_{θ(E)} ∘ θ_E` on
/// basic opens. Empty when the functor laws hold.
#[derive(Debug, Clone, Default)]
pub struct FunctorialityReport {
    pub failures: Vec<String>,
}

impl FunctorialityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn check_functoriality(theta: &RingHom, phi: &RingHom) -> Result<FunctorialityReport> {
    let composite = crate::rings::hom_compose(phi, theta)?;
    let th = ncspec_morphism(theta)?;
    let ph = ncspec_morphism(phi)?;
    let both = ncspec_morphism(&composite)?;
    let mut failures = Vec::new();
    for p in 0..both.source.len() {
        let direct = both.point_map[p];
        let staged = th.point_map[ph.point_map[p]];
        if direct != staged {
            failures.push(format!("point {} goes to {} directly but {} in stages", both.source.point_label(p), both.target.point_label(direct), both.target.point_label(staged)));
        }
    }
    for c in 0..th.target.lattice.len() {
        let v = th.target.basic_open(c);
        let mid = th.source.basic_cell(th.preimage(v)).expect("preimage of a basic open is basic");
        let staged = crate::rings::hom_compose(&ph.comaps[mid], &th.comaps[c])?;
        if !both.comaps[c].agrees_with(&staged)? {
            failures.push(format!("comaps differ on {}", th.target.lattice.cells[c].label));
        }
    }
    Ok(FunctorialityReport { failures })
}

/// Whether two morphisms have the same point map and pointwise equal comaps.
pub fn same_morphism(a: &RingedSpaceMorphism, b: &RingedSpaceMorphism) -> Result<bool> {
    if a.point_map != b.point_map || a.comaps.len() != b.comaps.len() {
        return Ok(false);
    }
    for (f, g) in a.comaps.iter().zip(&b.comaps) {
        if !f.agrees_with(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The default probe family: every basic section ring of both spaces and 0.
pub fn prim_probes(m: &RingedSpaceMorphism) -> Vec<RingDescriptor> {
    let mut out = m.source.section_rings();
    out.extend(m.target.section_rings());
    out.sort();
    out.dedup();
    out
}

pub fn is_prim(m: &RingedSpaceMorphism, probes: Option<&[RingDescriptor]>) -> Result<bool> {
    is_prim_on(m, m.target.full(), probes)
}

/// Primness of the restriction of `m` over the open `v` of the target.
pub fn is_prim_on(m: &RingedSpaceMorphism, v: PointSet, probes: Option<&[RingDescriptor]>) -> Result<bool> {
    let (x, y) = (&m.source, &m.target);
    if !y.is_open(v) {
        return Err(Error::NotOpen);
    }
    let default;
    let probes = match probes {
        Some(p) => p,
        None => {
            default = prim_probes(m);
            &default
        }
    };
    let inside: Vec<usize> = (0..y.lattice.len()).filter(|&c| y.basic_open(c) & !v == 0).collect();
    // preimages of completely ∪-irreducible opens must stay so
    let mut pre_cells = vec![usize::MAX; y.lattice.len()];
    for &c in &inside {
        match x.basic_cell(m.preimage(y.basic_open(c))) {
            Some(d) => pre_cells[c] = d,
            None => return Ok(false),
        }
    }
    for &a in &inside {
        for &b in &inside {
            if !y.lattice.leq(a, b) {
                continue;
            }
            let (va, vb) = (y.basic_open(a), y.basic_open(b));
            let sq = LocalizationSquare {
                top: m.comaps[a].clone(),
                left: y.restriction(va, vb)?,
                right: connect(&x.lattice.cells[pre_cells[a]].localized, &x.lattice.cells[pre_cells[b]].localized)?,
                bottom: m.comaps[b].clone(),
            };
            let mut family = probes.to_vec();
            family.extend(default_probes(&sq));
            family.sort();
            family.dedup();
            if !is_pushout(&sq, &family)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `is_prim(m)` next to the primness of its restrictions over a cover.
#[derive(Debug, Clone)]
pub struct PrimLocality {
    pub global: bool,
    pub per_open: Vec<bool>,
}

impl PrimLocality {
    pub fn consistent(&self) -> bool {
        self.global == self.per_open.iter().all(|&b| b)
    }
}

pub fn prim_is_local_check(m: &RingedSpaceMorphism, cover: &[PointSet], probes: Option<&[RingDescriptor]>) -> Result<PrimLocality> {
    let y = &m.target;
    if cover.iter().any(|&u| !y.is_open(u)) || cover.iter().fold(0, |s, &u| s | u) != y.full() {
        return Err(Error::NotACover);
    }
    let global = is_prim(m, probes)?;
    let per_open = cover.iter().map(|&u| is_prim_on(m, u, probes)).collect::<Result<_>>()?;
    Ok(PrimLocality { global, per_open })
}

/// Three morphisms of ringed spaces that do not come from ring maps:
/// the identity of `NCSpec(Z/6)` with the comap on `Ũ_{R_{2}}` replaced by
/// zero, the identity of `NCSpec(Z/2 × Z/2)` with the global comap replaced
/// by the swap, and a self-map of `NCSpec(Z/6)` sending `↓R_{3}` to `↓R_{2}`.
pub fn non_prim_examples() -> Result<Vec<(&'static str, RingedSpaceMorphism)>> {
    let z6 = RingDescriptor::modular(6);
    let table = |src: &RingDescriptor, dst: &RingDescriptor, f: &dyn Fn(&RingElement) -> RingElement| -> Result<RingHom> {
        let pairs = crate::rings::enumerate_elements(src)?.into_iter().map(|x| (x.clone(), f(&x))).collect();
        Ok(RingHom::new(src.clone(), dst.clone(), HomRule::Table(pairs)))
    };

    let mut zero_comap = ncspec_morphism(&RingHom::identity(&z6))?;
    let c = zero_comap.target.lattice.find("R_{2}").expect("Z/6 has the cell R_{2}");
    let ring = zero_comap.comaps[c].source.clone();
    zero_comap.comaps[c] = table(&ring, &ring, &|_| ring.zero())?;

    let pair = RingDescriptor::product(vec![RingDescriptor::modular(2), RingDescriptor::modular(2)])?;
    let mut swapped = ncspec_morphism(&RingHom::identity(&pair))?;
    let b = swapped.target.lattice.bottom;
    swapped.comaps[b] = table(&pair, &pair, &|x| match x {
        RingElement::Tuple(v) => RingElement::Tuple(vec![v[1].clone(), v[0].clone()]),
        _ => unreachable!("elements of a product are tuples"),
    })?;

    let mut merged = ncspec_morphism(&RingHom::identity(&z6))?;
    let (r2, r3) = (merged.target.lattice.find("R_{2}").unwrap(), merged.target.lattice.find("R_{3}").unwrap());
    let point = |sp: &NCSpecSpace, apex: usize| sp.space.points.iter().position(|c| c.apex == apex).unwrap();
    let (p2, p3) = (point(&merged.target, r2), point(&merged.source, r3));
    merged.point_map[p3] = p2;
    for c in [r2, r3] {
        let src = merged.comaps[c].source.clone();
        let dst = merged.source.sections(merged.preimage(merged.target.basic_open(c)))?.ring;
        merged.comaps[c] = if dst.is_zero_ring() {
            RingHom::to_zero(&src)
        } else {
            // Z/3 into Z/6 along the idempotent 4; multiplicative but not unital
            table(&src, &dst, &|x| match x {
                RingElement::Residue(r) => RingElement::Residue(4 * r % 6),
                _ => unreachable!(),
            })?
        };
    }
    Ok(vec![("zero comap on R_{2}", zero_comap), ("swapped global comap", swapped), ("merged points", merged)])
}
