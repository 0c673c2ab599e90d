use std::collections::HashMap;

use super::{HomRule, RingDescriptor, RingElement, RingHom};
use crate::error::Result;

/// A finite ring with precomputed addition and multiplication tables.
/// Elements are referred to by their index in enumeration order.
#[derive(Debug, Clone)]
pub struct FiniteRing {
    pub desc: RingDescriptor,
    pub elems: Vec<RingElement>,
    index: HashMap<RingElement, usize>,
    add: Vec<u32>,
    mul: Vec<u32>,
    pub zero: usize,
    pub one: usize,
}

impl FiniteRing {
    pub fn new(desc: &RingDescriptor) -> Result<Self> {
        let elems = super::enumerate_elements(desc)?;
        let index: HashMap<RingElement, usize> = elems.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let n = elems.len();
        let mut add = vec![0u32; n * n];
        let mut mul = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                add[i * n + j] = index[&desc.add(&elems[i], &elems[j])] as u32;
                mul[i * n + j] = index[&desc.mul(&elems[i], &elems[j])] as u32;
            }
        }
        let zero = index[&desc.zero()];
        let one = index[&desc.one()];
        Ok(FiniteRing { desc: desc.clone(), elems, index, add, mul, zero, one })
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn idx(&self, x: &RingElement) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.len() + b] as usize
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.len() + b] as usize
    }

    pub fn neg(&self, a: usize) -> usize {
        (0..self.len()).find(|&b| self.add(a, b) == self.zero).expect("additive inverse")
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_unit(&self, a: usize) -> bool {
        (0..self.len()).any(|b| self.mul(a, b) == self.one && self.mul(b, a) == self.one)
    }

    /// Smallest subring containing the given elements.
    pub fn subring_closure(&self, gens: &[usize]) -> Vec<bool> {
        let n = self.len();
        let mut inside = vec![false; n];
        let mut list = vec![self.zero, self.one];
        list.extend_from_slice(gens);
        list.sort_unstable();
        list.dedup();
        for &g in &list {
            inside[g] = true;
        }
        let mut frontier = 0;
        while frontier < list.len() {
            let a = list[frontier];
            frontier += 1;
            let snapshot = list.len();
            for k in 0..snapshot {
                let b = list[k];
                for c in [self.add(a, b), self.mul(a, b), self.mul(b, a)] {
                    if !inside[c] {
                        inside[c] = true;
                        list.push(c);
                    }
                }
            }
        }
        inside
    }

    /// A small set of elements generating the ring.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut inside = self.subring_closure(&gens);
        while let Some(x) = (0..self.len()).find(|&x| !inside[x]) {
            gens.push(x);
            inside = self.subring_closure(&gens);
        }
        gens
    }

    /// Every unital ring homomorphism `self → target`, as index tables.
    pub fn homs_to(&self, target: &FiniteRing) -> Vec<Vec<usize>> {
        let gens = self.generators();
        let mut out = Vec::new();
        let m = target.len();
        let mut choice = vec![0usize; gens.len()];
        loop {
            if let Some(table) = self.extend(target, &gens, &choice) {
                out.push(table);
            }
            // odometer over generator images
            let mut k = 0;
            loop {
                if k == choice.len() {
                    out.sort();
                    out.dedup();
                    return out;
                }
                choice[k] += 1;
                if choice[k] < m {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }

    /// Extends generator images to a full table, or reports a clash.
    fn extend(&self, target: &FiniteRing, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
        const UNSET: usize = usize::MAX;
        let n = self.len();
        let mut map = vec![UNSET; n];
        let mut known = Vec::new();
        let set = |map: &mut Vec<usize>, known: &mut Vec<usize>, a: usize, b: usize| -> bool {
            if map[a] == UNSET {
                map[a] = b;
                known.push(a);
                true
            } else {
                map[a] == b
            }
        };
        if !set(&mut map, &mut known, self.zero, target.zero) || !set(&mut map, &mut known, self.one, target.one) {
            return None;
        }
        for (&g, &img) in gens.iter().zip(images) {
            if !set(&mut map, &mut known, g, img) {
                return None;
            }
        }
        let mut frontier = 0;
        while frontier < known.len() {
            let a = known[frontier];
            frontier += 1;
            for k in 0..known.len() {
                let b = known[k];
                let pairs = [
                    (self.add(a, b), target.add(map[a], map[b])),
                    (self.mul(a, b), target.mul(map[a], map[b])),
                    (self.mul(b, a), target.mul(map[b], map[a])),
                ];
                for (x, y) in pairs {
                    if !set(&mut map, &mut known, x, y) {
                        return None;
                    }
                }
            }
        }
        if map.contains(&UNSET) {
            return None;
        }
        // closure only guarantees consistency along the generated pairs; recheck fully
        for a in 0..n {
            for b in 0..n {
                if map[self.add(a, b)] != target.add(map[a], map[b]) || map[self.mul(a, b)] != target.mul(map[a], map[b]) {
                    return None;
                }
            }
        }
        Some(map)
    }

    /// Index table of a described hom whose source is this ring.
    pub fn table_of(&self, h: &RingHom, target: &FiniteRing) -> Result<Vec<usize>> {
        self.elems
            .iter()
            .map(|x| {
                let y = h.apply(x)?;
                target.idx(&y).ok_or_else(|| crate::error::Error::ElementOwnershipMismatch { ring: target.desc.to_string() })
            })
            .collect()
    }

    /// Turns an index table back into a described hom.
    pub fn hom_from_table(&self, target: &FiniteRing, table: &[usize]) -> RingHom {
        let pairs = self.elems.iter().cloned().zip(table.iter().map(|&j| target.elems[j].clone())).collect();
        RingHom::new(self.desc.clone(), target.desc.clone(), HomRule::Table(pairs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    fn fr(d: RingDescriptor) -> FiniteRing {
        FiniteRing::new(&d).unwrap()
    }

    #[test]
    fn cyclic_hom_counts() {
        // unital homs Z/m -> Z/n exist exactly when n | m, and are unique
        for m in 1..=12u64 {
            for n in 1..=12u64 {
                let count = fr(RingDescriptor::modular(m)).homs_to(&fr(RingDescriptor::modular(n))).len();
                assert_eq!(count, usize::from(m % n == 0), "Z/{m} -> Z/{n}");
            }
        }
    }

    #[test]
    fn product_has_swap_automorphism() {
        let p = fr(RingDescriptor::product(vec![RingDescriptor::modular(2), RingDescriptor::modular(2)]).unwrap());
        // (1,0) may go to any of the four idempotents; two of the maps are bijective
        let ends = p.homs_to(&p);
        assert_eq!(ends.len(), 4);
        let bijective = ends.iter().filter(|t| {
            let mut s = (*t).clone();
            s.sort_unstable();
            s.dedup();
            s.len() == 4
        });
        assert_eq!(bijective.count(), 2);
        assert_eq!(p.homs_to(&fr(RingDescriptor::modular(2))).len(), 2);
    }

    #[test]
    fn matrix_ring_is_generated_and_noncommutative() {
        let m = fr(RingDescriptor::matrix(Field::Prime(2), 2));
        assert!(!m.is_commutative());
        assert_eq!(m.subring_closure(&m.generators()).iter().filter(|&&b| b).count(), 16);
        // M2(F2) has no unital map to F2
        assert!(m.homs_to(&fr(RingDescriptor::modular(2))).is_empty());
        assert_eq!(m.homs_to(&m).len(), 6); // inner automorphisms: |PGL2(F2)| = 6
    }
}
