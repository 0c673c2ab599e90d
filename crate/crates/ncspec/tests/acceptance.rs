//! End-to-end acceptance criteria. `criteria_1_to_10` runs every criterion
//! in sequence under its time limit and prints one PASS/FAIL line each.
//! Criterion 10 cannot hold for the supported ring classes and is reported
//! as a known failure; see `z4_sequence_is_exact_at_every_stalk`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use ncspec::commbridge::{
    embed_phi, exp_factorization, exp_idempotence_check, exp_to_ncspec, exponential, naturality, spec, union_of_primes_bijection, BasedSpace,
};
use ncspec::glueqcoh::{sequence_exactness, z4_sequence};
use ncspec::latspace::{build_semilattice, members, pid_leq, pid_point_in_open, PidPoint, Semilattice};
use ncspec::localization::{default_probes, is_pushout, localization_square, localize, CellKey};
use ncspec::poly::UPoly;
use ncspec::rings::{poly_element, CanonicalMap, FiniteRing, RingDescriptor, RingElement, RingHom};
use ncspec::scalar::{q, q_frac, Field};
use ncspec::sheafspec::{
    check_functoriality, is_prim, ncspec, ncspec_morphism, non_prim_examples, prim_is_local_check, recover_hom, same_morphism, RingedSpaceMorphism,
};
use ncspec::skewproj::{build_proj, gamma, module_sheaf, serre_unit, GradedModulePresentation, SkewSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn z(n: u64) -> RingDescriptor {
    if n == 1 {
        RingDescriptor::Zero
    } else {
        RingDescriptor::modular(n)
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

// 1. M2(F3) and M2(Q): two points, sections R on the whole space and 0 on
// the generic point alone.
fn matrix_rings() -> Outcome {
    for base in [Field::Prime(3), Field::Rationals] {
        let r = RingDescriptor::matrix(base, 2);
        let sp = e(ncspec(&r))?;
        check(sp.len() == 2, || format!("{r} has {} points", sp.len()))?;
        check(e(sp.sections(sp.full()))?.ring == r, || format!("O(whole) is not {r}"))?;
        let gamma = 1 << sp.generic;
        check(e(sp.sections(gamma))?.ring.is_zero_ring(), || "O({γ}) is not 0".into())?;
        let res = e(sp.restriction(sp.full(), gamma))?;
        check(res.target.is_zero_ring(), || "restriction does not land in 0".into())?;
    }
    Ok("M2(F3), M2(Q): 2 points, O(whole) = R, O({γ}) = 0".into())
}

fn finite_lattice(r: &RingDescriptor) -> Result<ncspec::latspace::LocalizationLattice, String> {
    match e(build_semilattice(r))? {
        Semilattice::Finite(l) => Ok(l),
        Semilattice::Lazy(_) => Err(format!("{r} has no finite lattice")),
    }
}

// 2. Semisimple rings: L(R) is the subset lattice of the blocks, and
// sections over U are the product of the blocks surviving somewhere in U.
fn semisimple_rings() -> Outcome {
    for dims in [vec![1, 1], vec![1, 2], vec![1, 1, 1]] {
        let k = dims.len();
        let r = RingDescriptor::semisimple(Field::Rationals, dims.clone());
        let l = finite_lattice(&r)?;
        check(l.len() == 1 << k, || format!("{r}: {} cells, expected {}", l.len(), 1 << k))?;
        let kept: Vec<u64> = l
            .cells
            .iter()
            .map(|c| match c.key() {
                CellKey::Blocks(b) => Ok(b.iter().enumerate().filter(|(_, &x)| x).fold(0u64, |s, (i, _)| s | 1 << i)),
                CellKey::Trivial => Ok(0),
                other => Err(format!("unexpected cell {other:?}")),
            })
            .collect::<Result<_, _>>()?;
        check(kept.iter().collect::<BTreeSet<_>>().len() == 1 << k, || format!("{r}: kept block sets are not all distinct"))?;
        for a in 0..l.len() {
            for b in 0..l.len() {
                // inverting more keeps fewer blocks
                check(l.leq(a, b) == (kept[b] & !kept[a] == 0), || format!("{r}: order differs at {} ≤ {}", l.cells[a].label, l.cells[b].label))?;
            }
        }
        let sp = e(ncspec(&r))?;
        for u in sp.space.space().opens() {
            let blocks = members(u).fold(0u64, |s, p| s | kept[sp.space.points[p].apex]);
            let chosen: Vec<usize> = (0..k).filter(|i| blocks & 1 << i != 0).map(|i| dims[i]).collect();
            let expected = if chosen.is_empty() { RingDescriptor::Zero } else { RingDescriptor::semisimple(Field::Rationals, chosen) };
            let got = e(sp.sections(u))?.ring;
            check(got == expected, || format!("{r}: sections over {u:b} are {got}, expected {expected}"))?;
        }
    }
    Ok("dims [1,1], [1,2], [1,1,1]: 2^k cells, O(U) = A_{∪U} on every open".into())
}

// 3. The zero ring.
fn zero_ring() -> Outcome {
    let sp = e(ncspec(&RingDescriptor::Zero))?;
    check(sp.len() == 1, || format!("{} points", sp.len()))?;
    check(e(sp.sections(sp.full()))?.ring.is_zero_ring(), || "nonzero sections".into())?;
    let sources = [
        z(6),
        z(4),
        RingDescriptor::matrix(Field::Prime(2), 2),
        e(RingDescriptor::product(vec![z(2), z(3), z(5)]))?,
        RingDescriptor::semisimple(Field::Prime(2), vec![1, 2]),
    ];
    for r in &sources {
        let m = e(ncspec_morphism(&RingHom::to_zero(r)))?;
        check(m.point_map == vec![m.target.generic], || format!("{r} → 0 does not hit the generic point"))?;
    }
    Ok(format!("one point, zero sections, {} maps R → 0 hit γ", sources.len()))
}

/// A polynomial with a known factorization over a fixed pool of monic
/// irreducibles; exponent vectors give the divisibility oracle.
struct Factored {
    exps: Vec<u32>,
    poly: UPoly,
}

fn irreducible_pool() -> Vec<UPoly> {
    vec![
        UPoly::from_ints(&[0, 1]),
        UPoly::from_ints(&[-1, 1]),
        UPoly::from_ints(&[2, 1]),
        UPoly::from_ints(&[1, 0, 1]),
        UPoly::from_ints(&[1, 1, 1]),
        UPoly::from_ints(&[-2, 0, 1]),
        UPoly::from_ints(&[-2, 0, 0, 1]),
    ]
}

fn random_factored(rng: &mut ChaCha8Rng, pool: &[UPoly]) -> Factored {
    let exps: Vec<u32> = pool.iter().map(|_| if rng.gen_bool(0.4) { rng.gen_range(1..=2) } else { 0 }).collect();
    let poly = pool.iter().zip(&exps).fold(UPoly::constant(q(rng.gen_range(1..=3))), |acc, (p, &k)| acc.mul(&p.pow(k)));
    Factored { exps, poly }
}

// 4. Q[x]: sf-divisibility order and membership of points in basic opens.
fn pid_queries() -> Outcome {
    let pool = irreducible_pool();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let Semilattice::Lazy(lat) = e(build_semilattice(&RingDescriptor::poly()))? else {
        return Err("Q[x] should have a lazy lattice".into());
    };
    for _ in 0..20 {
        let (h, g) = (random_factored(&mut rng, &pool), random_factored(&mut rng, &pool));
        let oracle = h.exps.iter().zip(&g.exps).all(|(&a, &b)| a == 0 || b > 0);
        let got = e(lat.leq(&[poly_element(h.poly.clone())], &[poly_element(g.poly.clone())]))?;
        check(got == oracle, || format!("L(Q[x]) order at ({}) ≤ ({})", h.poly, g.poly))?;
        check(pid_leq(&h.poly, &g.poly) == oracle, || format!("pid_leq at ({}) ≤ ({})", h.poly, g.poly))?;
    }
    check(e(lat.leq(&[poly_element(UPoly::x())], &[poly_element(UPoly::zero())]))?, || "0 is not the top".into())?;
    check(!e(lat.leq(&[poly_element(UPoly::zero())], &[poly_element(UPoly::x())]))?, || "0 ⪯ x".into())?;

    for _ in 0..20 {
        let chosen: Vec<usize> = (0..pool.len()).filter(|_| rng.gen_bool(0.3)).collect();
        let point = e(PidPoint::prime_set(chosen.iter().map(|&i| pool[i].clone()).collect()))?;
        let f = random_factored(&mut rng, &pool);
        let oracle = chosen.iter().all(|&i| f.exps[i] == 0);
        check(e(pid_point_in_open(&point, &f.poly))? == oracle, || format!("{point:?} in Ũ_({})", f.poly))?;
        check(e(pid_point_in_open(&point, &UPoly::zero()))? == chosen.is_empty(), || format!("{point:?} in Ũ_0"))?;
        check(e(pid_point_in_open(&PidPoint::ZeroIdeal, &f.poly))?, || format!("(0) not in Ũ_({})", f.poly))?;
    }
    check(e(pid_point_in_open(&PidPoint::Generic, &UPoly::zero()))?, || "γ not in Ũ_0".into())?;
    check(!e(pid_point_in_open(&PidPoint::ZeroIdeal, &UPoly::zero()))?, || "(0) in Ũ_0".into())?;
    Ok("20 order queries, 20 membership queries, Ũ_0 = {γ}".into())
}

fn bridge_rings() -> Vec<RingDescriptor> {
    vec![z(4), z(6), z(12), z(30), z(5)]
}

// 5. Spec(R) inside NCSpec(R).
fn commutative_bridge() -> Outcome {
    for r in bridge_rings() {
        let u = e(union_of_primes_bijection(&r))?;
        check(u.bijective, || format!("{r}: unions of primes ↔ points fails"))?;
        let phi = e(embed_phi(&r))?;
        check(phi.preimage_formula, || format!("{r}: φ⁻¹(Ũ_g) ≠ D(g)"))?;
        check(phi.homeomorphism_onto_image, || format!("{r}: not a homeomorphism onto the image"))?;
        check(phi.comap_isomorphisms, || format!("{r}: comaps are not isomorphisms"))?;
        check(phi.dense, || format!("{r}: image not dense"))?;
    }
    Ok("Z/4, Z/6, Z/12, Z/30, F5".into())
}

/// A random finite T₀ space with a multiplicative base containing the
/// whole space.
fn random_based(rng: &mut ChaCha8Rng, max: usize) -> BasedSpace {
    loop {
        let n = rng.gen_range(1..=max);
        let full = (1u64 << n) - 1;
        let mut base: BTreeSet<u64> = [full].into();
        for _ in 0..rng.gen_range(0..=n + 1) {
            base.insert(rng.gen::<u64>() & full);
        }
        loop {
            let snapshot: Vec<u64> = base.iter().copied().collect();
            let before = base.len();
            for &a in &snapshot {
                for &b in &snapshot {
                    base.insert(a & b);
                }
            }
            if base.len() == before {
                break;
            }
        }
        let labels = (0..n).map(|i| format!("p{i}")).collect();
        if let Ok(x) = BasedSpace::new(labels, base.into_iter().collect()) {
            return x;
        }
    }
}

// 6. E(Spec_B(R)) ≅ NCSpec_B(R), idempotence of E, unique factorization.
fn exponential_suite() -> Outcome {
    let mut squares = 0;
    for r in bridge_rings() {
        let sp = e(spec(&r))?;
        let ex = e(exponential(&sp.based()))?;
        check(e(exp_to_ncspec(&sp, &ex, &e(ncspec(&r))?))?.passed(), || format!("{r}: E(Spec) ≇ NCSpec"))?;
        check(e(exp_idempotence_check(&sp.based()))?, || format!("{r}: E(E(X)) ≇ E(X)"))?;
        let RingDescriptor::Modular { n } = r else { unreachable!("bridge rings are cyclic") };
        for d in (2..=n).filter(|d| n % d == 0) {
            let theta = RingHom::canonical(z(n), z(d), if d == n { CanonicalMap::Identity } else { CanonicalMap::Quotient });
            let nat = e(naturality(&theta))?;
            check(nat.phi && nat.gamma, || format!("naturality fails for Z/{n} → Z/{d}"))?;
            squares += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let x = random_based(&mut rng, 5);
        check(e(exp_idempotence_check(&x))?, || format!("E not idempotent on {:?}", x.base))?;
    }
    let mut factorizations = 0;
    for _ in 0..8 {
        let x = random_based(&mut rng, 4);
        let ex = e(exponential(&x))?;
        let y = e(ex.t_semilattice())?;
        let n = x.len();
        // θ = φ_X ∘ f for every 𝔗-morphism f: X → X
        for code in 0..n.pow(n as u32) {
            let f: Vec<usize> = (0..n).map(|i| code / n.pow(i as u32) % n).collect();
            if !x.is_t_morphism(&f, &x) {
                continue;
            }
            let theta: Vec<usize> = f.iter().map(|&i| ex.phi[i]).collect();
            let fac = e(exp_factorization(&x, &theta, &y))?;
            check(fac.unique == Some(true), || format!("factorization of {theta:?} not unique on {:?}", x.base))?;
            factorizations += 1;
        }
    }
    Ok(format!("{squares} naturality squares, 10 random idempotence checks, {factorizations} unique factorizations"))
}

fn hom_list(rings: &[RingDescriptor]) -> Result<Vec<RingHom>, String> {
    let finite: Vec<FiniteRing> = rings.iter().map(|r| e(FiniteRing::new(r))).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for a in &finite {
        for b in &finite {
            out.extend(a.homs_to(b).iter().map(|t| a.hom_from_table(b, t)));
        }
    }
    Ok(out)
}

fn preimage_formula(theta: &RingHom, m: &RingedSpaceMorphism) -> Result<bool, String> {
    for (c, cell) in m.target.lattice.cells.iter().enumerate() {
        let image: Vec<RingElement> = cell.representative.iter().map(|x| e(theta.apply(x))).collect::<Result<_, _>>()?;
        let tc = e(m.source.lattice.cell_of(&image))?;
        if m.preimage(m.target.basic_open(c)) != m.source.basic_open(tc) {
            return Ok(false);
        }
    }
    Ok(true)
}

// 7. Functor laws, faithfulness, recovery and primness over Z/m, m ≤ 12.
fn functor_suite() -> Outcome {
    let rings: Vec<RingDescriptor> = (1..=12).map(z).collect();
    let homs = hom_list(&rings)?;
    let morphisms: Vec<RingedSpaceMorphism> = homs.iter().map(|h| e(ncspec_morphism(h))).collect::<Result<_, _>>()?;
    let mut covers = 0;
    for (h, m) in homs.iter().zip(&morphisms) {
        let name = || format!("{} → {}", h.source, h.target);
        check(preimage_formula(h, m)?, || format!("{}: preimage formula", name()))?;
        check(e(recover_hom(m).agrees_with(h))?, || format!("{}: recover_hom", name()))?;
        check(e(is_prim(m, None))?, || format!("{}: induced morphism not prim", name()))?;
        let y = &m.target;
        let basics: Vec<u64> = (0..y.lattice.len()).map(|c| y.basic_open(c)).collect();
        // the bottom point lies only in the whole space, so every cover
        // contains it; pair it with each basic open to test the restrictions
        let mut tested = vec![vec![y.full()]];
        tested.extend(basics.iter().filter(|&&b| b != y.full()).map(|&b| vec![y.full(), b]));
        for cover in &tested {
            check(e(prim_is_local_check(m, cover, None))?.consistent(), || format!("{}: prim locality on {cover:?}", name()))?;
            covers += 1;
        }
    }
    let mut composites = 0;
    for t in &homs {
        for p in homs.iter().filter(|p| p.source == t.target) {
            let rep = e(check_functoriality(t, p))?;
            check(rep.passed(), || format!("functoriality for {} → {} → {}: {:?}", t.source, t.target, p.target, rep.failures))?;
            composites += 1;
        }
    }
    // every pair Z/m → Z/n carries at most one map, so faithfulness is also
    // checked on the endomorphisms of Z/2 × Z/2
    let klein = e(RingDescriptor::product(vec![z(2), z(2)]))?;
    let mut all = homs.clone();
    all.extend(hom_list(std::slice::from_ref(&klein))?);
    let all_m: Vec<RingedSpaceMorphism> = all.iter().map(|h| e(ncspec_morphism(h))).collect::<Result<_, _>>()?;
    let mut pairs = 0;
    for i in 0..all.len() {
        for j in 0..i {
            if all[i].source == all[j].source && all[i].target == all[j].target {
                check(!e(same_morphism(&all_m[i], &all_m[j]))?, || format!("two maps {} → {} give the same morphism", all[i].source, all[i].target))?;
                pairs += 1;
            }
        }
    }
    let crafted = e(non_prim_examples())?;
    for (name, m) in &crafted {
        check(!e(is_prim(m, None))?, || format!("crafted morphism {name:?} passes is_prim"))?;
    }
    Ok(format!("{} maps, {composites} composites, {pairs} faithfulness pairs, {covers} covers, {} crafted failures", homs.len(), crafted.len()))
}

fn small_rings() -> Result<Vec<RingDescriptor>, String> {
    let mut out: Vec<RingDescriptor> = (1..=12).map(z).collect();
    for fs in [vec![2, 2], vec![2, 4], vec![2, 2, 2], vec![3, 3], vec![2, 6], vec![2, 5], vec![2, 3]] {
        out.push(e(RingDescriptor::product(fs.into_iter().map(z).collect()))?);
    }
    out.push(RingDescriptor::semisimple(Field::Prime(3), vec![1, 1]));
    Ok(out)
}

// 8. localize against a brute-force universal property, and pushout squares.
fn localization_suite() -> Outcome {
    let rings = small_rings()?;
    let finite: Vec<FiniteRing> = rings.iter().map(|r| e(FiniteRing::new(r))).collect::<Result<_, _>>()?;
    let mut checked = 0;
    for (r, fr) in rings.iter().zip(&finite) {
        for s in 0..fr.len() {
            let l = e(localize(r, std::slice::from_ref(&fr.elems[s])))?;
            let fl = e(FiniteRing::new(&l.result))?;
            let lambda = e(fr.table_of(&l.insertion, &fl))?;
            check(fl.is_unit(lambda[s]), || format!("{r}: λ({}) is not a unit", r.show(&fr.elems[s])))?;
            for t in &finite {
                let from_l = fl.homs_to(t);
                let composites: Vec<Vec<usize>> = from_l.iter().map(|g| lambda.iter().map(|&x| g[x]).collect()).collect();
                let distinct: BTreeSet<&Vec<usize>> = composites.iter().collect();
                check(distinct.len() == composites.len(), || format!("loc({r}, {}) → {} is not epi", r.show(&fr.elems[s]), t.desc))?;
                for f in fr.homs_to(t) {
                    let through = composites.iter().filter(|c| **c == f).count();
                    let expected = usize::from(t.is_unit(f[s]));
                    check(through == expected, || {
                        format!("{r} at {}: {through} factorizations of a map to {} (expected {expected})", r.show(&fr.elems[s]), t.desc)
                    })?;
                }
            }
            checked += 1;
        }
    }
    let mut squares = 0;
    for theta in hom_list(&rings)? {
        let lat = finite_lattice(&theta.source)?;
        for a in &lat.cells {
            for b in &lat.cells {
                let sq = match localization_square(&theta, &a.representative, &b.representative) {
                    Ok(sq) => sq,
                    Err(ncspec::Error::NotComparable { .. }) => continue,
                    Err(x) => return Err(x.to_string()),
                };
                check(e(is_pushout(&sq, &default_probes(&sq)))?, || format!("square for {} → {} at {} ≤ {} is not a pushout", theta.source, theta.target, a.label, b.label))?;
                squares += 1;
            }
        }
    }
    Ok(format!("{} rings, {checked} singleton localizations, {squares} pushout squares", rings.len()))
}

fn binom(n: i64, k: i64) -> usize {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64) as usize
}

// 9. The skew projective line and plane.
fn skew_proj() -> Outcome {
    for lam in [q(1), q(2), q(-1)] {
        let s = SkewSpec::uniform(2, lam.clone());
        let x = e(build_proj(&s))?;
        let free = GradedModulePresentation::free(&s, vec![0]);
        let dims = e(gamma(&x, &free, (-3, 6), 2, 2))?.dims();
        let expected: Vec<usize> = (-3..=6).map(|d| binom(d + 1, 1)).collect();
        check(dims == expected, || format!("λ = {lam}: dims {dims:?}"))?;
        check(e(serre_unit(&x, &free, (0, 6), 2, 2, 1))?.is_isomorphism(), || format!("λ = {lam}: γ_R not an isomorphism"))?;
        check(e(x.check_cocycles(2))?.passed(), || format!("λ = {lam}: ψ cocycles"))?;
    }
    let generic = e(SkewSpec::new(3, vec![vec![q(2), q_frac(-1, 3)], vec![q(5)]], BTreeSet::new()))?;
    let x3 = e(build_proj(&generic))?;
    let free3 = GradedModulePresentation::free(&generic, vec![0]);
    let dims = e(gamma(&x3, &free3, (2, 3), 2, 2))?.dims();
    check(dims == vec![6, 10], || format!("n = 3: dims {dims:?}"))?;
    check(e(serre_unit(&x3, &free3, (0, 3), 2, 2, 1))?.is_isomorphism(), || "n = 3: γ_R not an isomorphism".into())?;
    check(e(x3.check_cocycles(1))?.passed(), || "n = 3: ψ cocycles".into())?;
    let sheaf = e(module_sheaf(&x3, &GradedModulePresentation::free(&generic, vec![0, 1])))?;
    for n in -1..=2 {
        let rep = e(sheaf.cocycle_check(n, 1))?;
        check(rep.passed(), || format!("φ cocycles at twist {n}: {:?}", rep.violations))?;
    }
    for s in [SkewSpec::uniform(2, q(2)), generic.clone()] {
        let x = e(build_proj(&s))?;
        let tors = GradedModulePresentation::irrelevant_quotient(&s);
        check(e(gamma(&x, &tors, (-2, 4), 2, 2))?.dims().iter().all(|&d| d == 0), || format!("Γ(M̃) ≠ 0 for n = {}", s.nvars))?;
        let rep = e(serre_unit(&x, &tors, (0, 2), 2, 2, 1))?;
        check(rep.degrees.iter().all(|g| g.kernel_torsion == Some(true)), || format!("kernel of γ_M not torsion for n = {}", s.nvars))?;
    }
    for n in [2usize, 3] {
        let flat = e(build_proj(&SkewSpec::uniform(n, q(1))))?;
        let dims = e(gamma(&flat, &GradedModulePresentation::free(&flat.spec, vec![0]), (-1, 4), 2, 2))?.dims();
        let stars: Vec<usize> = (-1..=4).map(|d| binom(d + n as i64 - 1, n as i64 - 1)).collect();
        check(dims == stars, || format!("λ ≡ 1, n = {n}: {dims:?} ≠ {stars:?}"))?;
    }
    Ok("n = 2 for λ ∈ {1, 2, -1}; n = 3 dims 6, 10; torsion, cocycles, commutative counts".into())
}

// 10. A non-exact stalk sequence with exact kernels on Z/4.
fn z4_non_exactness() -> Outcome {
    let (r, a, b, c, f, g) = e(z4_sequence())?;
    let rep = e(sequence_exactness(&r, &a, &b, &c, &f, &g))?;
    check(rep.some_stalk_not_exact() && rep.kernel_exact, || {
        format!("stalks {:?}, kernel exact {}: every localization of Z/4 is flat, so no stalk sequence breaks", rep.stalks, rep.kernel_exact)
    })?;
    Ok("non-exact stalk found".into())
}

struct Criterion {
    id: u32,
    limit: Duration,
    run: fn() -> Outcome,
    /// Why the criterion cannot pass, when it is known not to.
    known_unattainable: Option<&'static str>,
}

fn criteria() -> Vec<Criterion> {
    let s = Duration::from_secs;
    let c = |id, limit, run| Criterion { id, limit, run, known_unattainable: None };
    vec![
        c(1, s(1), matrix_rings),
        c(2, s(1), semisimple_rings),
        c(3, s(1), zero_ring),
        c(4, s(1), pid_queries),
        c(5, s(5), commutative_bridge),
        c(6, s(10), exponential_suite),
        c(7, s(30), functor_suite),
        c(8, s(60), localization_suite),
        c(9, s(60), skew_proj),
        Criterion {
            id: 10,
            limit: s(1),
            run: z4_non_exactness,
            known_unattainable: Some("Z/4 localizes only to Z/4 and 0, both flat, so every stalk sequence is exact"),
        },
    ]
}

fn evaluate(c: &Criterion) -> (bool, String) {
    let start = Instant::now();
    let result = (c.run)();
    let elapsed = start.elapsed();
    match result {
        Ok(detail) if elapsed <= c.limit => (true, format!("{detail} [{:.3}s]", elapsed.as_secs_f64())),
        Ok(detail) => (false, format!("{detail}, but took {:.3}s > {:?}", elapsed.as_secs_f64(), c.limit)),
        Err(why) => (false, format!("{why} [{:.3}s]", elapsed.as_secs_f64())),
    }
}

#[test]
fn criteria_1_to_10() {
    let mut unexpected = Vec::new();
    for c in criteria() {
        let (ok, detail) = evaluate(&c);
        match (ok, c.known_unattainable) {
            (true, _) => println!("criterion {}: PASS  {detail}", c.id),
            (false, Some(reason)) => println!("criterion {}: FAIL  (known unattainable: {reason}) {detail}", c.id),
            (false, None) => {
                println!("criterion {}: FAIL  {detail}", c.id);
                unexpected.push(c.id);
            }
        }
    }
    assert!(unexpected.is_empty(), "failing criteria: {unexpected:?}");
}

#[test]
#[ignore = "unattainable: every supported localization of Z/4 is flat"]
fn criterion_10_non_exact_stalk() {
    let c = criteria().pop().unwrap();
    let (ok, detail) = evaluate(&c);
    assert!(ok, "{detail}");
}

#[test]
fn z4_sequence_is_exact_at_every_stalk() {
    let (r, a, b, c, f, g) = z4_sequence().unwrap();
    let rep = sequence_exactness(&r, &a, &b, &c, &f, &g).unwrap();
    assert_eq!(rep.stalks.len(), 2);
    assert!(rep.stalks.iter().all(|(_, ok)| *ok));
    assert!(rep.kernel_exact);
}
