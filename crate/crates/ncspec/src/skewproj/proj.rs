//! Charts of the skew projective space, graded modules, their sheaves, and
//! degree-wise global sections.
//!
//! Every chart ring `R_i` sits inside the degree-zero part of the fully
//! inverted Laurent ring, with chart variables `u_p = x_k x_i^{-1}`. The
//! gluing maps `ψ_ij` and the module cocycles `φ_ij` are the identity once
//! elements are written in Laurent coordinates; all the content lies in
//! the scalars picked up when moving between chart and Laurent coordinates.
//!
//! Global sections of `M[d]` are computed inside a truncated region of each
//! chart: Laurent exponents bounded below by `-box` in the inverted
//! directions. Relations are generated in a region deeper by `k_max`
//! before being intersected with the box, which accounts for elements that
//! only die after multiplying by a power of `x_i`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::linalg::Echelon;
use super::poly::{monomial_label, Exp, SkewLaurentPoly, SkewSpec};
use crate::error::{Error, Result};
use crate::glueqcoh::CocycleReport;
use crate::scalar::{fmt_q, Q};

/// Exponent vectors with coordinate-wise lower bounds and total degree `d`,
/// in descending lexicographic order.
pub(crate) fn cone(lower: &[i64], d: i64) -> Vec<Exp> {
    fn rec(k: usize, left: i64, cur: &mut Vec<i64>, lower: &[i64], out: &mut Vec<Exp>) {
        if k + 1 == cur.len() {
            cur[k] = left;
            out.push(cur.iter().zip(lower).map(|(a, l)| a + l).collect());
            return;
        }
        for v in (0..=left).rev() {
            cur[k] = v;
            rec(k + 1, left - v, cur, lower, out);
        }
    }
    let rest = d - lower.iter().sum::<i64>();
    let mut out = Vec::new();
    if rest < 0 {
        return out;
    }
    if lower.is_empty() {
        if rest == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, rest, &mut vec![0; lower.len()], lower, &mut out);
    out
}

/// Degree-`d` monomials of `spec` with every exponent magnitude at most
/// `bound`; only inverted variables may be negative.
pub fn graded_piece_basis(spec: &SkewSpec, d: i64, bound: i64) -> Vec<Exp> {
    let lower: Vec<i64> = (0..spec.nvars).map(|l| if spec.inverted.contains(&l) { -bound } else { 0 }).collect();
    cone(&lower, d).into_iter().filter(|a| a.iter().all(|x| x.abs() <= bound)).collect()
}

fn mono(e: Exp) -> SkewLaurentPoly {
    SkewLaurentPoly::monomial(e, Q::one())
}

fn unit_exp(n: usize, i: usize, k: i64) -> Exp {
    let mut e = vec![0; n];
    e[i] = k;
    e
}

/// `R_i`, with its variables listed by the big-ring variable they replace.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub index: usize,
    /// `u_p = x_{vars[p]} x_i^{-1}`.
    pub vars: Vec<usize>,
    pub ring: SkewSpec,
}

impl Chart {
    pub fn position(&self, k: usize) -> Option<usize> {
        self.vars.iter().position(|&v| v == k)
    }
}

#[derive(Debug, Clone)]
pub struct ProjSpace {
    pub spec: SkewSpec,
    pub charts: Vec<Chart>,
    pub overlaps: Vec<(usize, usize)>,
    pub triples: Vec<(usize, usize, usize)>,
    laurent: SkewSpec,
}

pub fn build_proj(spec: &SkewSpec) -> Result<ProjSpace> {
    if !spec.inverted.is_empty() {
        return Err(Error::SchemaViolation { path: "inverted".into(), message: "Proj is built from a polynomial ring".into() });
    }
    let n = spec.nvars;
    let laurent = spec.with_inverted((0..n).collect());
    let mut charts = Vec::new();
    for i in 0..n {
        let vars: Vec<usize> = (0..n).filter(|&k| k != i).collect();
        let xi_inv = laurent.monomial_inverse(&SkewLaurentPoly::var(n, i)).expect("all variables inverted");
        let u: Vec<SkewLaurentPoly> = vars.iter().map(|&k| laurent.mul(&SkewLaurentPoly::var(n, k), &xi_inv)).collect::<Result<_>>()?;
        let m = vars.len();
        let mut lambda = Vec::new();
        for p in 0..m.saturating_sub(1) {
            let mut row = Vec::new();
            for q in p + 1..m {
                let (pq, _) = laurent.mul(&u[p], &u[q])?.as_monomial().expect("monomial");
                let a = laurent.mul(&u[p], &u[q])?.coefficient(&pq);
                let b = laurent.mul(&u[q], &u[p])?.coefficient(&pq);
                row.push(a / b);
            }
            lambda.push(row);
        }
        // built directly: a chart of P^1 has a single variable
        let ring = SkewSpec { nvars: m, lambda, inverted: BTreeSet::new() };
        charts.push(Chart { index: i, vars, ring });
    }
    let overlaps = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let triples = (0..n).flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k)))).collect();
    Ok(ProjSpace { spec: spec.clone(), charts, overlaps, triples, laurent })
}

impl ProjSpace {
    pub fn nvars(&self) -> usize {
        self.spec.nvars
    }

    pub fn laurent(&self) -> &SkewSpec {
        &self.laurent
    }

    /// `R_i` with the chart variables standing for `x_j` (`j ∈ others`) inverted.
    pub fn overlap_ring(&self, i: usize, others: &[usize]) -> SkewSpec {
        let c = &self.charts[i];
        let inverted = others.iter().filter_map(|&j| c.position(j)).collect();
        c.ring.with_inverted(inverted)
    }

    fn x_pow(&self, i: usize, k: i64) -> SkewLaurentPoly {
        mono(unit_exp(self.nvars(), i, k))
    }

    /// `∏_p u_p^{c_p}` in ascending order, in Laurent coordinates.
    fn chart_monomial(&self, i: usize, c: &[i64]) -> Result<SkewLaurentPoly> {
        let n = self.nvars();
        let xi_inv = self.x_pow(i, -1);
        let mut acc = SkewLaurentPoly::one(n);
        for (p, &k) in self.charts[i].vars.iter().enumerate() {
            let u = self.laurent.mul(&SkewLaurentPoly::var(n, k), &xi_inv)?;
            let base = if c[p] < 0 { self.laurent.monomial_inverse(&u).expect("all variables inverted") } else { u };
            for _ in 0..c[p].unsigned_abs() {
                acc = self.laurent.mul(&acc, &base)?;
            }
        }
        Ok(acc)
    }

    /// Chart coordinates to Laurent coordinates.
    pub fn embed(&self, i: usize, rho: &SkewLaurentPoly) -> Result<SkewLaurentPoly> {
        if rho.nvars != self.charts[i].vars.len() {
            return Err(Error::OwnerMismatch);
        }
        let mut out = SkewLaurentPoly::zero(self.nvars());
        for (c, coef) in &rho.terms {
            out = out.add(&self.chart_monomial(i, c)?.scale(coef))?;
        }
        Ok(out)
    }

    /// Laurent coordinates of a degree-zero element to chart-`i` coordinates.
    pub fn restrict(&self, i: usize, p: &SkewLaurentPoly) -> Result<SkewLaurentPoly> {
        let chart = &self.charts[i];
        let mut out = SkewLaurentPoly::zero(chart.vars.len());
        for (a, coef) in &p.terms {
            if a.iter().sum::<i64>() != 0 {
                return Err(Error::SchemaViolation { path: "element".into(), message: format!("{} is not of degree zero", monomial_label(a)) });
            }
            let c: Exp = chart.vars.iter().map(|&k| a[k]).collect();
            let kappa = self.chart_monomial(i, &c)?.coefficient(a);
            out = out.add(&SkewLaurentPoly::monomial(c, coef / kappa))?;
        }
        Ok(out)
    }

    /// `ψ_ij`: chart `i` coordinates (with `u` for `x_j` inverted) to chart `j` coordinates.
    pub fn psi(&self, i: usize, j: usize, rho: &SkewLaurentPoly) -> Result<SkewLaurentPoly> {
        self.restrict(j, &self.embed(i, rho)?)
    }

    /// Chart monomials with exponents in `[-radius, radius]` at positions
    /// for the charts in `others`, and in `[0, radius]` elsewhere.
    fn sample(&self, i: usize, others: &[usize], radius: i64) -> Vec<SkewLaurentPoly> {
        let chart = &self.charts[i];
        let m = chart.vars.len();
        let mut out = vec![Vec::new()];
        for p in 0..m {
            let lo = if others.contains(&chart.vars[p]) { -radius } else { 0 };
            out = out.into_iter().flat_map(|e: Exp| (lo..=radius).map(move |k| [e.clone(), vec![k]].concat())).collect();
        }
        out.into_iter().map(mono).collect()
    }

    /// Multiplicativity of the chart embeddings, `ψ_ii = id`, `ψ_ji ψ_ij = id`,
    /// multiplicativity of `ψ_ij`, and `ψ_jk ψ_ij = ψ_ik` on sampled monomials.
    pub fn check_cocycles(&self, radius: i64) -> Result<CocycleReport> {
        let n = self.nvars();
        let mut v = Vec::new();
        for i in 0..n {
            let all: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            let ring = self.overlap_ring(i, &all);
            let sample = self.sample(i, &all, radius.min(1));
            for a in &sample {
                for b in &sample {
                    if self.embed(i, &ring.mul(a, b)?)? != self.laurent.mul(&self.embed(i, a)?, &self.embed(i, b)?)? {
                        v.push(format!("chart {i}: embedding is not multiplicative on {a} · {b}"));
                    }
                }
                if self.psi(i, i, a)? != *a {
                    v.push(format!("ψ_{i}{i} moves {a}"));
                }
            }
            for j in (0..n).filter(|&j| j != i) {
                let (ri, rj) = (self.overlap_ring(i, &[j]), self.overlap_ring(j, &[i]));
                let sample = self.sample(i, &[j], radius);
                for a in &sample {
                    let image = self.psi(i, j, a)?;
                    if self.psi(j, i, &image)? != *a {
                        v.push(format!("ψ_{j}{i} ψ_{i}{j} moves {a}"));
                    }
                }
                for a in sample.iter().take(8) {
                    for b in sample.iter().take(8) {
                        if self.psi(i, j, &ri.mul(a, b)?)? != rj.mul(&self.psi(i, j, a)?, &self.psi(i, j, b)?)? {
                            v.push(format!("ψ_{i}{j} is not multiplicative on {a} · {b}"));
                        }
                    }
                }
                for k in (0..n).filter(|&k| k != i && k != j) {
                    for a in self.sample(i, &[j, k], radius) {
                        if self.psi(j, k, &self.psi(i, j, &a)?)? != self.psi(i, k, &a)? {
                            v.push(format!("ψ_{j}{k} ψ_{i}{j} ≠ ψ_{i}{k} on {a}"));
                        }
                    }
                }
            }
        }
        Ok(CocycleReport { violations: v })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "nvars": self.nvars(),
            "charts": self.charts.iter().map(|c| json!({
                "index": c.index,
                "variables": c.vars.iter().map(|&k| format!("{} {}^-1", var_name(self.nvars(), k), var_name(self.nvars(), c.index))).collect::<Vec<_>>(),
                "lambda": c.ring.lambda.iter().map(|r| r.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "overlaps": self.overlaps,
            "triples": self.triples,
        })
    }
}

fn var_name(n: usize, k: usize) -> String {
    monomial_label(&unit_exp(n, k, 1))
}

/// Generators with degrees and homogeneous relation rows over a skew
/// polynomial ring; a row `(r_1, …, r_g)` means `Σ r_k g_k = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedModulePresentation {
    pub spec: SkewSpec,
    pub degrees: Vec<i64>,
    pub relations: Vec<Vec<SkewLaurentPoly>>,
}

impl GradedModulePresentation {
    pub fn new(spec: SkewSpec, degrees: Vec<i64>, relations: Vec<Vec<SkewLaurentPoly>>) -> Result<Self> {
        if !spec.inverted.is_empty() {
            return Err(Error::SchemaViolation { path: "ring.inverted".into(), message: "graded modules live over the polynomial ring".into() });
        }
        for (idx, row) in relations.iter().enumerate() {
            if row.len() != degrees.len() {
                return Err(Error::ArityMismatch { op: format!("relation {idx}"), expected: degrees.len(), got: row.len() });
            }
            let mut seen = BTreeSet::new();
            for (k, p) in row.iter().enumerate() {
                if p.nvars != spec.nvars || !p.terms.keys().all(|e| spec.admits(e)) {
                    return Err(Error::SchemaViolation { path: format!("relations[{idx}][{k}]"), message: "not a polynomial of the ring".into() });
                }
                seen.extend(p.terms.keys().map(|e| e.iter().sum::<i64>() + degrees[k]));
            }
            if seen.len() > 1 {
                return Err(Error::InhomogeneousRelation { index: idx });
            }
        }
        Ok(GradedModulePresentation { spec, degrees, relations })
    }

    pub fn free(spec: &SkewSpec, degrees: Vec<i64>) -> Self {
        GradedModulePresentation { spec: spec.clone(), degrees, relations: Vec::new() }
    }

    /// `R/(x_1, …, x_n)`.
    pub fn irrelevant_quotient(spec: &SkewSpec) -> Self {
        let relations = (0..spec.nvars).map(|l| vec![SkewLaurentPoly::var(spec.nvars, l)]).collect();
        GradedModulePresentation { spec: spec.clone(), degrees: vec![0], relations }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::OwnerMismatch);
        }
        let (a, b) = (self.rank(), other.rank());
        let z = SkewLaurentPoly::zero(self.spec.nvars);
        let mut relations: Vec<Vec<SkewLaurentPoly>> = self.relations.iter().map(|r| [r.clone(), vec![z.clone(); b]].concat()).collect();
        relations.extend(other.relations.iter().map(|r| [vec![z.clone(); a], r.clone()].concat()));
        Ok(GradedModulePresentation { spec: self.spec.clone(), degrees: [self.degrees.clone(), other.degrees.clone()].concat(), relations })
    }

    /// `M(a)`, with `M(a)_d = M_{a+d}`.
    pub fn shift(&self, a: i64) -> Self {
        GradedModulePresentation { degrees: self.degrees.iter().map(|d| d - a).collect(), ..self.clone() }
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn relation_degree(&self, idx: usize) -> Option<i64> {
        self.relations[idx].iter().enumerate().find_map(|(k, p)| p.homogeneous_degree().map(|e| e + self.degrees[k]))
    }

    /// `dim_Q M_d`.
    pub fn dim(&self, d: i64) -> usize {
        let zeros = vec![0; self.spec.nvars];
        let (coords, rels) = relation_span(self, &zeros, 0, d);
        coords.len() - rels.rank()
    }

    pub fn element_degree(&self, m: &[SkewLaurentPoly]) -> Result<Option<i64>> {
        let mut seen = BTreeSet::new();
        for (k, p) in m.iter().enumerate() {
            seen.extend(p.terms.keys().map(|e| e.iter().sum::<i64>() + self.degrees[k]));
        }
        match seen.len() {
            0 => Ok(None),
            1 => Ok(seen.into_iter().next()),
            _ => Err(Error::SchemaViolation { path: "element".into(), message: "not homogeneous".into() }),
        }
    }

    fn show(&self, m: &[SkewLaurentPoly]) -> String {
        if self.rank() == 1 {
            return m[0].to_string();
        }
        let parts: Vec<String> = m.iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(k, p)| format!("({p})·g{}", k + 1)).collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Coordinates `(generator, exponent)` of a truncated free module.
#[derive(Debug, Clone)]
struct Coords {
    list: Vec<(usize, Exp)>,
    index: HashMap<(usize, Exp), usize>,
}

impl Coords {
    fn new(list: Vec<(usize, Exp)>) -> Self {
        let index = list.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        Coords { list, index }
    }

    fn region(m: &GradedModulePresentation, lower: &[i64], d: i64) -> Self {
        Coords::new(m.degrees.iter().enumerate().flat_map(|(k, &delta)| cone(lower, d - delta).into_iter().map(move |a| (k, a))).collect())
    }

    fn len(&self) -> usize {
        self.list.len()
    }

    fn vector(&self, elt: &[SkewLaurentPoly]) -> Option<Vec<Q>> {
        let mut v = vec![Q::zero(); self.len()];
        for (k, p) in elt.iter().enumerate() {
            for (a, c) in &p.terms {
                v[*self.index.get(&(k, a.clone()))?] += c;
            }
        }
        Some(v)
    }

    fn element(&self, v: &[Q], rank: usize, nvars: usize) -> Vec<SkewLaurentPoly> {
        let mut out = vec![SkewLaurentPoly::zero(nvars); rank];
        for ((k, a), c) in self.list.iter().zip(v) {
            if !c.is_zero() {
                out[*k] = out[*k].add(&SkewLaurentPoly::monomial(a.clone(), c.clone())).expect("same ring");
            }
        }
        out
    }
}

/// The relation subspace of the free module over the region `lower`
/// (degree `d`), generated `depth` steps deeper in the negative directions
/// and intersected back with the region.
fn relation_span(m: &GradedModulePresentation, lower: &[i64], depth: i64, d: i64) -> (Coords, Echelon) {
    let inner = Coords::region(m, lower, d);
    let deep: Vec<i64> = lower.iter().map(|&l| if l < 0 { l - depth } else { l }).collect();
    let outer = Coords::region(m, &deep, d);
    let mut list: Vec<(usize, Exp)> = outer.list.into_iter().filter(|c| !inner.index.contains_key(c)).collect();
    let off = list.len();
    list.extend(inner.list.iter().cloned());
    let coords = Coords::new(list);
    let laurent = m.spec.with_inverted((0..m.spec.nvars).collect());
    let mut e = Echelon::new(coords.len());
    for (idx, rel) in m.relations.iter().enumerate() {
        let Some(rd) = m.relation_degree(idx) else { continue };
        for b in cone(&deep, d - rd) {
            let xb = mono(b);
            let prod: Vec<SkewLaurentPoly> = rel.iter().map(|r| laurent.mul(&xb, r).expect("same ring")).collect();
            e.insert(coords.vector(&prod).expect("products stay in the deep region"));
        }
    }
    let kept = e.rows.iter().zip(&e.pivots).filter(|(_, &p)| p >= off).map(|(r, _)| r[off..].to_vec());
    let n_inner = inner.len();
    (inner, Echelon::from_rows(n_inner, kept))
}

/// The linear system whose solutions modulo `T = ⊕ N_i` are `Γ(X, M[d])`.
struct GammaSystem {
    charts: Vec<(Coords, Echelon)>,
    offsets: Vec<usize>,
    total: usize,
    t: Echelon,
    basis: Vec<Vec<Q>>,
}

fn chart_lower(n: usize, inverted: &[usize], bx: i64) -> Vec<i64> {
    (0..n).map(|l| if inverted.contains(&l) { -bx } else { 0 }).collect()
}

fn gamma_system(x: &ProjSpace, m: &GradedModulePresentation, d: i64, bx: i64, depth: i64) -> GammaSystem {
    let n = x.nvars();
    let charts: Vec<(Coords, Echelon)> = (0..n).map(|i| relation_span(m, &chart_lower(n, &[i], bx), depth, d)).collect();
    let mut offsets = Vec::new();
    let mut total = 0;
    for (c, _) in &charts {
        offsets.push(total);
        total += c.len();
    }
    let pairs: Vec<(usize, usize, Coords, Echelon)> = x
        .overlaps
        .iter()
        .map(|&(i, j)| {
            let (c, e) = relation_span(m, &chart_lower(n, &[i, j], bx), depth, d);
            (i, j, c, e)
        })
        .collect();
    let ncols = total + pairs.iter().map(|p| p.3.rank()).sum::<usize>();
    let mut eq = Echelon::new(ncols);
    let mut extra = total;
    for (i, j, c, nij) in &pairs {
        for (idx, coord) in c.list.iter().enumerate() {
            let mut row = vec![Q::zero(); ncols];
            if let Some(&p) = charts[*i].0.index.get(coord) {
                row[offsets[*i] + p] += Q::one();
            }
            if let Some(&p) = charts[*j].0.index.get(coord) {
                row[offsets[*j] + p] -= Q::one();
            }
            for (t, r) in nij.rows.iter().enumerate() {
                row[extra + t] = -r[idx].clone();
            }
            eq.insert(row);
        }
        extra += nij.rank();
    }
    let mut t = Echelon::new(total);
    for (i, (_, ni)) in charts.iter().enumerate() {
        for r in &ni.rows {
            let mut v = vec![Q::zero(); total];
            v[offsets[i]..offsets[i] + r.len()].clone_from_slice(r);
            t.insert(v);
        }
    }
    let mut span = t.clone();
    let basis = eq.nullspace().into_iter().map(|v| v[..total].to_vec()).filter(|v| span.insert(v.clone())).collect();
    GammaSystem { charts, offsets, total, t, basis }
}

impl GammaSystem {
    /// `(m, m, …, m)` for a coordinate of the nonnegative region.
    fn diagonal(&self, coord: &(usize, Exp)) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.total];
        for (i, (c, _)) in self.charts.iter().enumerate() {
            v[self.offsets[i] + c.index[coord]] = Q::one();
        }
        v
    }

    fn chart_component(&self, i: usize, v: &[Q]) -> Vec<Q> {
        v[self.offsets[i]..self.offsets[i] + self.charts[i].0.len()].to_vec()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaDegree {
    pub degree: i64,
    pub dim: usize,
    /// Chart-0 components of a basis.
    pub basis: Vec<String>,
}

/// `Γ(X, M[d])` over a window of degrees, with the truncation used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaTable {
    pub box_bound: i64,
    pub k_max: i64,
    pub degrees: Vec<GammaDegree>,
}

impl GammaTable {
    pub fn dims(&self) -> Vec<usize> {
        self.degrees.iter().map(|g| g.dim).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "box": self.box_bound,
            "k_max": self.k_max,
            "degrees": self.degrees.iter().map(|g| json!({"degree": g.degree, "dim": g.dim, "basis": g.basis})).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{:>6}  {:>4}\n", "degree", "dim");
        for g in &self.degrees {
            s += &format!("{:>6}  {:>4}\n", g.degree, g.dim);
        }
        s
    }
}

fn check_module(x: &ProjSpace, m: &GradedModulePresentation) -> Result<()> {
    if x.spec != m.spec {
        return Err(Error::OwnerMismatch);
    }
    Ok(())
}

fn stable_dim(x: &ProjSpace, m: &GradedModulePresentation, d: i64, bx: i64, k_max: i64) -> Result<GammaSystem> {
    let sys = gamma_system(x, m, d, bx, k_max);
    let wider = gamma_system(x, m, d, bx + 1, k_max + 1);
    if sys.basis.len() != wider.basis.len() {
        return Err(Error::BoxTooSmall { degree: d, before: sys.basis.len(), after: wider.basis.len() });
    }
    Ok(sys)
}

pub fn gamma(x: &ProjSpace, m: &GradedModulePresentation, window: (i64, i64), k_max: i64, bx: i64) -> Result<GammaTable> {
    check_module(x, m)?;
    let mut degrees = Vec::new();
    for d in window.0..=window.1 {
        let sys = stable_dim(x, m, d, bx, k_max)?;
        let basis = sys.basis.iter().map(|v| m.show(&sys.charts[0].0.element(&sys.chart_component(0, v), m.rank(), x.nvars()))).collect();
        degrees.push(GammaDegree { degree: d, dim: sys.basis.len(), basis });
    }
    Ok(GammaTable { box_bound: bx, k_max, degrees })
}

/// `true` if every degree-`bound` monomial kills `elt`. A nonzero element
/// of a free module is never torsion, since the ring is a domain; anything
/// else not yet killed is inconclusive.
pub fn is_torsion(m: &GradedModulePresentation, elt: &[SkewLaurentPoly], bound: usize) -> Result<bool> {
    if elt.len() != m.rank() {
        return Err(Error::ArityMismatch { op: "is_torsion".into(), expected: m.rank(), got: elt.len() });
    }
    let Some(d) = m.element_degree(elt)? else { return Ok(true) };
    let n = m.spec.nvars;
    let zeros = vec![0; n];
    let (coords, rels) = relation_span(m, &zeros, 0, d + bound as i64);
    let (base, base_rels) = relation_span(m, &zeros, 0, d);
    if base_rels.contains(base.vector(elt).expect("element of the module")) {
        return Ok(true);
    }
    let killed = cone(&zeros, bound as i64).into_iter().all(|b| {
        let xb = mono(b);
        let prod: Vec<SkewLaurentPoly> = elt.iter().map(|p| m.spec.mul(&xb, p).expect("same ring")).collect();
        rels.contains(coords.vector(&prod).expect("nonnegative exponents"))
    });
    if killed {
        Ok(true)
    } else if m.relations.is_empty() {
        Ok(false)
    } else {
        Err(Error::BoundInconclusive { bound })
    }
}

/// `γ_M` in one degree.
#[derive(Debug, Clone, PartialEq)]
pub struct SerreDegree {
    pub degree: i64,
    pub module_dim: usize,
    pub gamma_dim: usize,
    pub rank: usize,
    pub kernel: Vec<Vec<SkewLaurentPoly>>,
    /// `None` when the torsion bound was not enough to decide.
    pub kernel_torsion: Option<bool>,
    pub cokernel_dim: usize,
    pub cokernel_torsion: Option<bool>,
}

impl SerreDegree {
    pub fn injective(&self) -> bool {
        self.rank == self.module_dim
    }

    pub fn surjective(&self) -> bool {
        self.rank == self.gamma_dim
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SerreReport {
    pub box_bound: i64,
    pub k_max: i64,
    pub torsion_bound: usize,
    pub degrees: Vec<SerreDegree>,
}

impl SerreReport {
    /// Kernel and cokernel of `γ_M` are torsion in every degree.
    pub fn passed(&self) -> bool {
        self.degrees.iter().all(|g| g.kernel_torsion == Some(true) && g.cokernel_torsion == Some(true))
    }

    pub fn is_isomorphism(&self) -> bool {
        self.degrees.iter().all(|g| g.injective() && g.surjective())
    }

    pub fn to_json(&self, m: &GradedModulePresentation) -> Value {
        json!({
            "box": self.box_bound,
            "k_max": self.k_max,
            "torsion_bound": self.torsion_bound,
            "degrees": self.degrees.iter().map(|g| json!({
                "degree": g.degree,
                "module_dim": g.module_dim,
                "gamma_dim": g.gamma_dim,
                "rank": g.rank,
                "injective": g.injective(),
                "surjective": g.surjective(),
                "kernel": g.kernel.iter().map(|k| m.show(k)).collect::<Vec<_>>(),
                "kernel_torsion": g.kernel_torsion,
                "cokernel_dim": g.cokernel_dim,
                "cokernel_torsion": g.cokernel_torsion,
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn serre_unit(x: &ProjSpace, m: &GradedModulePresentation, window: (i64, i64), k_max: i64, bx: i64, torsion_bound: usize) -> Result<SerreReport> {
    check_module(x, m)?;
    let n = x.nvars();
    let zeros = vec![0; n];
    let images_span = |sys: &GammaSystem, d: i64| -> Echelon {
        let mut e = sys.t.clone();
        for c in Coords::region(m, &zeros, d).list {
            e.insert(sys.diagonal(&c));
        }
        e
    };
    let mut degrees = Vec::new();
    for d in window.0..=window.1 {
        let sys = stable_dim(x, m, d, bx, k_max)?;
        let (plus, plus_rels) = relation_span(m, &zeros, 0, d);
        let module_dim = plus.len() - plus_rels.rank();
        let span = images_span(&sys, d);
        let rank = span.rank() - sys.t.rank();
        // α with Σ α_c (c, …, c) ∈ T, modulo the relations of M_d
        let cols = plus.len() + sys.t.rank();
        let mut a = Echelon::new(cols);
        for row in 0..sys.total {
            let mut r = vec![Q::zero(); cols];
            for (ci, c) in plus.list.iter().enumerate() {
                r[ci] = sys.diagonal(c)[row].clone();
            }
            for (ti, t) in sys.t.rows.iter().enumerate() {
                r[plus.len() + ti] = -t[row].clone();
            }
            a.insert(r);
        }
        let mut kspan = plus_rels.clone();
        let kernel: Vec<Vec<SkewLaurentPoly>> = a
            .nullspace()
            .into_iter()
            .map(|v| v[..plus.len()].to_vec())
            .filter(|v| kspan.insert(v.clone()))
            .map(|v| plus.element(&v, m.rank(), n))
            .collect();
        let mut kernel_torsion = Some(true);
        for k in &kernel {
            match is_torsion(m, k, torsion_bound) {
                Ok(true) => {}
                Ok(false) => kernel_torsion = Some(false),
                Err(Error::BoundInconclusive { .. }) => kernel_torsion = kernel_torsion.and(None),
                Err(e) => return Err(e),
            }
        }
        let mut cspan = span.clone();
        let cokernel: Vec<&Vec<Q>> = sys.basis.iter().filter(|s| cspan.insert((*s).clone())).collect();
        let cokernel_torsion = if cokernel.is_empty() {
            Some(true)
        } else {
            let up = gamma_system(x, m, d + torsion_bound as i64, bx, k_max);
            let up_span = images_span(&up, d + torsion_bound as i64);
            let killed = cokernel.iter().all(|s| {
                cone(&zeros, torsion_bound as i64).into_iter().all(|b| {
                    let mut v = vec![Q::zero(); up.total];
                    for i in 0..n {
                        let (ci, ui) = (&sys.charts[i].0, &up.charts[i].0);
                        for ((k, a), c) in ci.list.iter().zip(&sys.chart_component(i, s)) {
                            if c.is_zero() {
                                continue;
                            }
                            let sum: Exp = a.iter().zip(&b).map(|(p, q)| p + q).collect();
                            let t = x.laurent.twist(&b, a);
                            v[up.offsets[i] + ui.index[&(*k, sum)]] += c * t;
                        }
                    }
                    up_span.contains(v)
                })
            });
            killed.then_some(true)
        };
        degrees.push(SerreDegree { degree: d, module_dim, gamma_dim: sys.basis.len(), rank, kernel, kernel_torsion, cokernel_dim: cokernel.len(), cokernel_torsion });
    }
    Ok(SerreReport { box_bound: bx, k_max, torsion_bound, degrees })
}

/// The chart data `(M̃_i, φ_ij)` of a graded module. Chart-`i` elements of
/// `M[n]` are coefficient vectors `(ρ_k)` over `R_i`, standing for
/// `Σ ρ_k x_i^{n-δ_k} g_k`.
#[derive(Debug, Clone)]
pub struct ModuleSheaf {
    pub proj: ProjSpace,
    pub module: GradedModulePresentation,
    /// Extra scalar applied by `φ_ij`; absent pairs use 1.
    pub scale: BTreeMap<(usize, usize), Q>,
}

pub fn module_sheaf(x: &ProjSpace, m: &GradedModulePresentation) -> Result<ModuleSheaf> {
    check_module(x, m)?;
    let m = GradedModulePresentation::new(m.spec.clone(), m.degrees.clone(), m.relations.clone())?;
    Ok(ModuleSheaf { proj: x.clone(), module: m, scale: BTreeMap::new() })
}

impl ModuleSheaf {
    fn left(&self, xb: &SkewLaurentPoly, w: &[SkewLaurentPoly]) -> Result<Vec<SkewLaurentPoly>> {
        w.iter().map(|p| self.proj.laurent.mul(xb, p)).collect()
    }

    pub fn to_laurent(&self, i: usize, n: i64, v: &[SkewLaurentPoly]) -> Result<Vec<SkewLaurentPoly>> {
        v.iter().zip(&self.module.degrees).map(|(r, &d)| self.proj.laurent.mul(&self.proj.embed(i, r)?, &self.proj.x_pow(i, n - d))).collect()
    }

    pub fn from_laurent(&self, j: usize, n: i64, w: &[SkewLaurentPoly]) -> Result<Vec<SkewLaurentPoly>> {
        w.iter().zip(&self.module.degrees).map(|(p, &d)| self.proj.restrict(j, &self.proj.laurent.mul(p, &self.proj.x_pow(j, d - n))?)).collect()
    }

    /// `φ_ij[n]`.
    pub fn phi(&self, i: usize, j: usize, n: i64, v: &[SkewLaurentPoly]) -> Result<Vec<SkewLaurentPoly>> {
        let out = self.from_laurent(j, n, &self.to_laurent(i, n, v)?)?;
        Ok(match self.scale.get(&(i, j)) {
            Some(s) => out.iter().map(|p| p.scale(s)).collect(),
            None => out,
        })
    }

    fn sample(&self, i: usize, others: &[usize], radius: i64) -> Vec<Vec<SkewLaurentPoly>> {
        let m = self.proj.charts[i].vars.len();
        let r = self.module.rank();
        self.proj
            .sample(i, others, radius)
            .into_iter()
            .flat_map(|rho| {
                (0..r).map(move |k| {
                    let mut v = vec![SkewLaurentPoly::zero(m); r];
                    v[k] = rho.clone();
                    v
                })
            })
            .collect()
    }

    /// `φ_ii = id`, `φ_ji φ_ij = id`, `φ_jk φ_ij = φ_ik`, `ψ_ij`-semilinearity,
    /// and `φ_ij[n](v) = x_i^n φ_ij(x_i^{-n} v)`, on sampled free-module
    /// elements. Relations need no separate check: every `φ` is the
    /// identity in Laurent coordinates up to the recorded scale.
    pub fn cocycle_check(&self, n: i64, radius: i64) -> Result<CocycleReport> {
        let x = &self.proj;
        let charts = x.nvars();
        let mut viol = Vec::new();
        for i in 0..charts {
            for v in self.sample(i, &[], radius) {
                if self.phi(i, i, n, &v)? != v {
                    viol.push(format!("φ_{i}{i}[{n}] moves {}", self.module.show(&v)));
                }
            }
            for j in (0..charts).filter(|&j| j != i) {
                let (ri, rj) = (x.overlap_ring(i, &[j]), x.overlap_ring(j, &[i]));
                let gens: Vec<SkewLaurentPoly> = x.sample(i, &[j], 1).into_iter().filter(|g| g.terms.keys().all(|e| e.iter().map(|a| a.abs()).sum::<i64>() == 1)).collect();
                for v in self.sample(i, &[j], radius) {
                    let image = self.phi(i, j, n, &v)?;
                    if self.phi(j, i, n, &image)? != v {
                        viol.push(format!("φ_{j}{i}[{n}] φ_{i}{j}[{n}] moves {}", self.module.show(&v)));
                    }
                    for g in &gens {
                        let gv: Vec<SkewLaurentPoly> = v.iter().map(|p| ri.mul(g, p)).collect::<Result<_>>()?;
                        let lhs = self.phi(i, j, n, &gv)?;
                        let pg = x.psi(i, j, g)?;
                        let rhs: Vec<SkewLaurentPoly> = image.iter().map(|p| rj.mul(&pg, p)).collect::<Result<_>>()?;
                        if lhs != rhs {
                            viol.push(format!("φ_{i}{j}[{n}] is not ψ_{i}{j}-semilinear at {g}"));
                        }
                    }
                    let w0 = self.left(&x.x_pow(i, -n), &self.to_laurent(i, n, &v)?)?;
                    let via0 = self.phi(i, j, 0, &self.from_laurent(i, 0, &w0)?)?;
                    let back = self.from_laurent(j, n, &self.left(&x.x_pow(i, n), &self.to_laurent(j, 0, &via0)?)?)?;
                    if back != image {
                        viol.push(format!("φ_{i}{j}[{n}] disagrees with x_{i}^{n} φ_{i}{j} x_{i}^{}", -n));
                    }
                }
                for k in (0..charts).filter(|&k| k != i && k != j) {
                    for v in self.sample(i, &[j, k], radius) {
                        if self.phi(j, k, n, &self.phi(i, j, n, &v)?)? != self.phi(i, k, n, &v)? {
                            viol.push(format!("φ_{j}{k}[{n}] φ_{i}{j}[{n}] ≠ φ_{i}{k}[{n}] on {}", self.module.show(&v)));
                        }
                    }
                }
            }
        }
        Ok(CocycleReport { violations: viol })
    }
}

/// `M̃[n]`: chart pieces truncated to the box, with the cocycle report.
#[derive(Debug, Clone)]
pub struct TwistedSheaf {
    pub n: i64,
    pub box_bound: i64,
    pub piece_dims: Vec<usize>,
    /// Monomials spanning a complement of the relations in each chart piece.
    pub piece_bases: Vec<Vec<String>>,
    pub cocycles: CocycleReport,
}

impl TwistedSheaf {
    pub fn is_zero(&self) -> bool {
        self.piece_dims.iter().all(|&d| d == 0)
    }
}

pub fn twist(s: &ModuleSheaf, n: i64, bx: i64, k_max: i64) -> Result<TwistedSheaf> {
    let x = &s.proj;
    let m = &s.module;
    let nv = x.nvars();
    let mut piece_dims = Vec::new();
    let mut piece_bases = Vec::new();
    for i in 0..nv {
        let (coords, rels) = relation_span(m, &chart_lower(nv, &[i], bx), k_max, n);
        let pivots: BTreeSet<usize> = rels.pivots.iter().copied().collect();
        let basis: Vec<String> = coords
            .list
            .iter()
            .enumerate()
            .filter(|(p, _)| !pivots.contains(p))
            .map(|(_, (k, a))| if m.rank() == 1 { monomial_label(a) } else { format!("{}·g{}", monomial_label(a), k + 1) })
            .collect();
        piece_dims.push(basis.len());
        piece_bases.push(basis);
    }
    let cocycles = s.cocycle_check(n, 1)?;
    Ok(TwistedSheaf { n, box_bound: bx, piece_dims, piece_bases, cocycles })
}
