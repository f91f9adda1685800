//! Subgroups as bitsets over parent-group element indices, full lattice
//! enumeration, and the set-level predicates the violation search prunes on.
//!
//! Enumeration seeds with every cyclic subgroup, then repeatedly joins
//! members with cyclic generators until nothing new appears. Every subgroup
//! is generated by its cyclic subgroups, so the fixpoint contains the whole
//! lattice; a join strictly at least doubles the order, which keeps every
//! stored generating set logarithmic in the group order.

use std::collections::HashMap;

use thiserror::Error;

use crate::group::CayleyGroup;

pub const DEFAULT_LATTICE_CAP: usize = 100_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("subgroup belongs to a different parent group")]
    ParentMismatch,
    #[error("lattice too large: more than {cap} subgroups (stopped at {reached})")]
    TooLarge { cap: usize, reached: usize },
}

/// A subgroup of a materialized group, stored as a bitset of element indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubgroupSet {
    parent_tag: u64,
    parent_order: usize,
    bits: Vec<u64>,
    order: usize,
}

impl std::fmt::Debug for SubgroupSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SubgroupSet(order {} of {}; {{", self.order, self.parent_order)?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if i >= 12 {
                write!(f, "…")?;
                break;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}})")
    }
}

impl SubgroupSet {
    fn empty(parent: &CayleyGroup) -> SubgroupSet {
        SubgroupSet {
            parent_tag: parent.tag(),
            parent_order: parent.order(),
            bits: vec![0; parent.order().div_ceil(64)],
            order: 0,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn parent_order(&self) -> usize {
        self.parent_order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn is_full(&self) -> bool {
        self.order == self.parent_order
    }

    pub fn contains(&self, x: u32) -> bool {
        self.bits[x as usize / 64] >> (x % 64) & 1 == 1
    }

    fn insert(&mut self, x: u32) {
        let w = &mut self.bits[x as usize / 64];
        if *w >> (x % 64) & 1 == 0 {
            *w |= 1 << (x % 64);
            self.order += 1;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            (0..64)
                .filter(move |b| word >> b & 1 == 1)
                .map(move |b| (w * 64 + b) as u32)
        })
    }

    pub fn matches_parent(&self, group: &CayleyGroup) -> bool {
        self.parent_tag == group.tag() && self.parent_order == group.order()
    }

    fn check_same_parent(&self, other: &SubgroupSet) -> Result<(), LatticeError> {
        if self.parent_tag != other.parent_tag || self.parent_order != other.parent_order {
            return Err(LatticeError::ParentMismatch);
        }
        Ok(())
    }

    /// Bitwise AND; the intersection of two subgroups is a subgroup.
    pub fn intersect(&self, other: &SubgroupSet) -> Result<SubgroupSet, LatticeError> {
        self.check_same_parent(other)?;
        let bits: Vec<u64> = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a & b)
            .collect();
        let order = bits.iter().map(|w| w.count_ones() as usize).sum();
        Ok(SubgroupSet {
            parent_tag: self.parent_tag,
            parent_order: self.parent_order,
            bits,
            order,
        })
    }

    pub fn intersection_order(&self, other: &SubgroupSet) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset_of(&self, other: &SubgroupSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn bit_words(&self) -> &[u64] {
        &self.bits
    }

    /// Structural check: contains the identity, closed under multiplication
    /// and inverse.
    pub fn is_subgroup_of(&self, group: &CayleyGroup) -> bool {
        if !self.matches_parent(group) || !self.contains(group.identity()) {
            return false;
        }
        let members: Vec<u32> = self.iter().collect();
        members.iter().all(|&x| self.contains(group.inv_of(x)))
            && members
                .iter()
                .all(|&x| members.iter().all(|&y| self.contains(group.mul(x, y))))
    }
}

/// Rebuilds a subgroup bitset from raw words, for cache reloads.
pub fn subgroup_from_words(
    group: &CayleyGroup,
    words: Vec<u64>,
) -> Result<SubgroupSet, LatticeError> {
    if words.len() != group.order().div_ceil(64) {
        return Err(LatticeError::ParentMismatch);
    }
    let order = words.iter().map(|w| w.count_ones() as usize).sum();
    Ok(SubgroupSet {
        parent_tag: group.tag(),
        parent_order: group.order(),
        bits: words,
        order,
    })
}

/// ⟨gens⟩ inside the group, by breadth-first closure over the Cayley table.
pub fn subgroup_closure(group: &CayleyGroup, gens: &[u32]) -> SubgroupSet {
    let mut set = SubgroupSet::empty(group);
    set.insert(group.identity());
    let mut queue: Vec<u32> = vec![group.identity()];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for &g in gens {
            let y = group.mul(x, g);
            if !set.contains(y) {
                set.insert(y);
                queue.push(y);
            }
        }
    }
    set
}

/// A small generating set derived greedily: repeatedly adjoin the smallest
/// element outside the closure so far. Deterministic, at most log₂|H| steps.
pub fn generating_set(group: &CayleyGroup, sub: &SubgroupSet) -> Vec<u32> {
    let mut gens: Vec<u32> = Vec::new();
    let mut closed = subgroup_closure(group, &gens);
    while closed.order() < sub.order() {
        let next = sub
            .iter()
            .find(|&x| !closed.contains(x))
            .expect("closure is strictly smaller");
        gens.push(next);
        closed = subgroup_closure(group, &gens);
    }
    gens
}

/// H^g = {g⁻¹hg}.
pub fn conjugate_subgroup(group: &CayleyGroup, sub: &SubgroupSet, g: u32) -> SubgroupSet {
    let mut out = SubgroupSet::empty(group);
    for h in sub.iter() {
        out.insert(group.conjugate(h, g));
    }
    out
}

/// True iff H^g = H for every g.
pub fn is_normal(group: &CayleyGroup, sub: &SubgroupSet) -> bool {
    for g in group.elements() {
        for h in sub.iter() {
            if !sub.contains(group.conjugate(h, g)) {
                return false;
            }
        }
    }
    true
}

/// True iff the element set HK equals KH, i.e. HK is a subgroup. Decided by
/// comparing |⟨H ∪ K⟩| with |H||K|/|H∩K|: the join always contains the set
/// product, with equality exactly when the product is already closed.
pub fn set_product_closed(
    group: &CayleyGroup,
    h: &SubgroupSet,
    k: &SubgroupSet,
) -> Result<bool, LatticeError> {
    h.check_same_parent(k)?;
    if !h.matches_parent(group) {
        return Err(LatticeError::ParentMismatch);
    }
    let product_size = h.order() * k.order() / h.intersection_order(k);
    let mut gens = generating_set(group, h);
    gens.extend(generating_set(group, k));
    Ok(subgroup_closure(group, &gens).order() == product_size)
}

/// The full subgroup lattice, deduplicated and canonically ordered
/// (by order, then by bitset).
#[derive(Debug)]
pub struct SubgroupLattice {
    parent_tag: u64,
    parent_order: usize,
    members: Vec<SubgroupSet>,
    generator_sets: Vec<Vec<u32>>,
    index: HashMap<Vec<u64>, usize>,
}

impl SubgroupLattice {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[SubgroupSet] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &SubgroupSet {
        &self.members[i]
    }

    /// Canonical small generating set of member `i` (element indices).
    pub fn generators(&self, i: usize) -> &[u32] {
        &self.generator_sets[i]
    }

    pub fn index_of(&self, sub: &SubgroupSet) -> Option<usize> {
        if sub.parent_tag != self.parent_tag {
            return None;
        }
        self.index.get(&sub.bits).copied()
    }

    pub fn matches_parent(&self, group: &CayleyGroup) -> bool {
        self.parent_tag == group.tag() && self.parent_order == group.order()
    }

    /// Reassembles a lattice from stored members (cache reload path).
    pub fn from_members(group: &CayleyGroup, members: Vec<SubgroupSet>) -> SubgroupLattice {
        let generator_sets = members
            .iter()
            .map(|m| generating_set(group, m))
            .collect();
        let index = members
            .iter()
            .enumerate()
            .map(|(i, m)| (m.bits.clone(), i))
            .collect();
        SubgroupLattice {
            parent_tag: group.tag(),
            parent_order: group.order(),
            members,
            generator_sets,
            index,
        }
    }
}

/// Enumerates every subgroup: seed with all cyclic subgroups, then close
/// under joins with cyclic generators until a fixpoint.
pub fn all_subgroups(group: &CayleyGroup) -> Result<SubgroupLattice, LatticeError> {
    all_subgroups_capped(group, DEFAULT_LATTICE_CAP)
}

pub fn all_subgroups_capped(
    group: &CayleyGroup,
    cap: usize,
) -> Result<SubgroupLattice, LatticeError> {
    struct Entry {
        sub: SubgroupSet,
        gens: Vec<u32>,
    }

    let mut cyclic: Vec<(SubgroupSet, u32)> = Vec::new();
    let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();
    for x in group.elements() {
        let sub = subgroup_closure(group, &[x]);
        if seen.insert(sub.bits.clone(), ()).is_none() {
            cyclic.push((sub, x));
        }
    }

    let mut entries: Vec<Entry> = Vec::new();
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    for (sub, x) in &cyclic {
        if !index.contains_key(&sub.bits) {
            index.insert(sub.bits.clone(), entries.len());
            let gens = if sub.is_trivial() { vec![] } else { vec![*x] };
            entries.push(Entry {
                sub: sub.clone(),
                gens,
            });
        }
    }

    let mut head = 0;
    while head < entries.len() {
        for (csub, cgen) in &cyclic {
            let cgen = *cgen;
            if csub.is_trivial() || entries[head].sub.contains(cgen) {
                continue;
            }
            let mut gens = entries[head].gens.clone();
            gens.push(cgen);
            let join = subgroup_closure(group, &gens);
            if !index.contains_key(&join.bits) {
                if entries.len() >= cap {
                    return Err(LatticeError::TooLarge {
                        cap,
                        reached: entries.len() + 1,
                    });
                }
                index.insert(join.bits.clone(), entries.len());
                entries.push(Entry { sub: join, gens });
            }
        }
        head += 1;
    }

    let mut members: Vec<SubgroupSet> = entries.into_iter().map(|e| e.sub).collect();
    members.sort_by(|a, b| a.order.cmp(&b.order).then_with(|| a.bits.cmp(&b.bits)));
    Ok(SubgroupLattice::from_members(group, members))
}

/// Lexicographically minimal representative of a 4-tuple under the label
/// symmetry {1↔2} × {3↔4}.
pub fn klein_canonical(t: [usize; 4]) -> [usize; 4] {
    [
        t[0].min(t[1]),
        t[0].max(t[1]),
        t[2].min(t[3]),
        t[2].max(t[3]),
    ]
}

/// Partitions tuples into conjugacy orbits: two tuples are equivalent when
/// some group element conjugates one onto the other componentwise, up to the
/// {1↔2} × {3↔4} label symmetry. Brute force over all conjugators.
pub fn tuple_conjugacy_orbits(
    group: &CayleyGroup,
    lattice: &SubgroupLattice,
    tuples: &[[usize; 4]],
) -> Result<Vec<Vec<usize>>, LatticeError> {
    if !lattice.matches_parent(group) {
        return Err(LatticeError::ParentMismatch);
    }
    let position: HashMap<[usize; 4], usize> = tuples
        .iter()
        .enumerate()
        .map(|(i, t)| (klein_canonical(*t), i))
        .collect();

    let mut parent: Vec<usize> = (0..tuples.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for (ti, t) in tuples.iter().enumerate() {
        for g in group.elements() {
            let mut image = [0usize; 4];
            let mut known = true;
            for (c, &m) in t.iter().enumerate() {
                let conj = conjugate_subgroup(group, lattice.member(m), g);
                match lattice.index_of(&conj) {
                    Some(idx) => image[c] = idx,
                    None => {
                        known = false;
                        break;
                    }
                }
            }
            if !known {
                continue;
            }
            if let Some(&tj) = position.get(&klein_canonical(image)) {
                let (a, b) = (find(&mut parent, ti), find(&mut parent, tj));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }

    let mut orbits: Vec<Vec<usize>> = Vec::new();
    let mut root_to_orbit: HashMap<usize, usize> = HashMap::new();
    for i in 0..tuples.len() {
        let r = find(&mut parent, i);
        let slot = *root_to_orbit.entry(r).or_insert_with(|| {
            orbits.push(Vec::new());
            orbits.len() - 1
        });
        orbits[slot].push(i);
    }
    Ok(orbits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{CayleyGroup, DEFAULT_ORDER_CAP};
    use crate::perm::{self, Permutation};

    fn build(gens: Vec<Permutation>, spec: &str) -> CayleyGroup {
        CayleyGroup::from_generators(&gens, spec, DEFAULT_ORDER_CAP).unwrap()
    }

    fn s5_with_elements() -> (CayleyGroup, Vec<Permutation>) {
        CayleyGroup::from_generators_with_elements(
            &perm::symmetric_generators(5),
            "S5",
            DEFAULT_ORDER_CAP,
        )
        .unwrap()
    }

    fn index_of(elems: &[Permutation], text: &str, degree: usize) -> u32 {
        let target = Permutation::parse(text, degree).unwrap();
        elems.iter().position(|e| *e == target).unwrap() as u32
    }

    /// Independent oracle: enumerate all identity-containing subsets of each
    /// divisor cardinality and keep the closed ones.
    fn brute_force_subgroup_count(group: &CayleyGroup) -> usize {
        let n = group.order();
        let divisors: Vec<usize> = (1..=n).filter(|d| n % d == 0).collect();
        let mut count = 0usize;
        for &d in &divisors {
            // choose d-1 non-identity elements
            let mut chosen: Vec<u32> = Vec::with_capacity(d);
            count += choose_and_check(group, &mut chosen, 1, d - 1);
        }
        count
    }

    fn choose_and_check(group: &CayleyGroup, chosen: &mut Vec<u32>, from: usize, left: usize) -> usize {
        if left == 0 {
            let mut sub = SubgroupSet::empty(group);
            sub.insert(group.identity());
            for &x in chosen.iter() {
                sub.insert(x);
            }
            return usize::from(sub.is_subgroup_of(group));
        }
        let mut total = 0;
        for x in from..=group.order() - left {
            chosen.push(x as u32);
            total += choose_and_check(group, chosen, x + 1, left - 1);
            chosen.pop();
        }
        total
    }

    #[test]
    fn counts_match_brute_force_for_small_groups() {
        for (gens, spec) in [
            (perm::symmetric_generators(3), "S3"),
            (perm::dihedral_generators(8).unwrap(), "D8"),
            (perm::cyclic_generators(12), "Z12"),
            (perm::dihedral_generators(12).unwrap(), "D12"),
        ] {
            let g = build(gens, spec);
            let lat = all_subgroups(&g).unwrap();
            assert_eq!(lat.len(), brute_force_subgroup_count(&g), "{spec}");
        }
    }

    #[test]
    fn brute_force_agreement_at_order_24() {
        let g = build(perm::symmetric_generators(4), "S4");
        let lat = all_subgroups(&g).unwrap();
        assert_eq!(lat.len(), 30);
        assert_eq!(brute_force_subgroup_count(&g), 30);
    }

    #[test]
    fn known_lattice_sizes() {
        assert_eq!(all_subgroups(&build(perm::symmetric_generators(3), "S3")).unwrap().len(), 6);
        assert_eq!(
            all_subgroups(&build(vec![Permutation::identity(1)], "Z1")).unwrap().len(),
            1
        );
        assert_eq!(
            all_subgroups(&build(perm::dihedral_generators(24).unwrap(), "D24")).unwrap().len(),
            34
        );
        assert_eq!(all_subgroups(&build(perm::cyclic_generators(12), "Z12")).unwrap().len(), 6);
    }

    #[test]
    fn every_member_is_a_subgroup_with_dividing_order() {
        let g = build(perm::symmetric_generators(4), "S4");
        let lat = all_subgroups(&g).unwrap();
        for m in lat.members() {
            assert!(m.is_subgroup_of(&g));
            assert_eq!(g.order() % m.order(), 0);
        }
        // canonical order: nondecreasing orders, trivial first, full last
        assert!(lat.members().windows(2).all(|w| w[0].order() <= w[1].order()));
        assert!(lat.member(0).is_trivial());
        assert!(lat.member(lat.len() - 1).is_full());
    }

    #[test]
    fn lattice_is_join_closed_and_contains_all_cyclics() {
        let g = build(perm::symmetric_generators(4), "S4");
        let lat = all_subgroups(&g).unwrap();
        for x in g.elements() {
            assert!(lat.index_of(&subgroup_closure(&g, &[x])).is_some());
        }
        for i in 0..lat.len() {
            for j in i..lat.len() {
                let mut gens = lat.generators(i).to_vec();
                gens.extend_from_slice(lat.generators(j));
                let join = subgroup_closure(&g, &gens);
                assert!(lat.index_of(&join).is_some());
            }
        }
    }

    #[test]
    fn intersection_examples_from_s5() {
        let (g, elems) = s5_with_elements();
        let sub = |texts: &[&str]| {
            let gens: Vec<u32> = texts.iter().map(|t| index_of(&elems, t, 5)).collect();
            subgroup_closure(&g, &gens)
        };
        let g2 = sub(&["(1,2,3,4,5)", "(1,4,3,5)"]);
        let g3 = sub(&["(2,3)", "(1,3,4,2)"]);
        let g4 = sub(&["(2,4)", "(1,2,5,4)"]);
        assert_eq!(g2.order(), 20);
        assert_eq!(g3.order(), 8);

        let g23 = g2.intersect(&g3).unwrap();
        assert_eq!(g23.order(), 4);
        assert_eq!(g23, sub(&["(1,3,4,2)"]));

        let g34 = g3.intersect(&g4).unwrap();
        assert_eq!(g34.order(), 1);

        assert_eq!(g2.intersect(&g2).unwrap(), g2);
    }

    #[test]
    fn intersect_rejects_foreign_parents() {
        let a = build(perm::symmetric_generators(3), "S3");
        let b = build(perm::cyclic_generators(6), "Z6");
        let ha = subgroup_closure(&a, &[1]);
        let hb = subgroup_closure(&b, &[1]);
        assert_eq!(ha.intersect(&hb), Err(LatticeError::ParentMismatch));
    }

    #[test]
    fn normality() {
        let (g, elems) = s5_with_elements();
        let full = subgroup_closure(&g, &(0..g.order() as u32).collect::<Vec<_>>());
        assert!(is_normal(&g, &full));

        // A5 = index-2 subgroup generated by 3-cycles
        let a5 = subgroup_closure(
            &g,
            &[index_of(&elems, "(1,2,3)", 5), index_of(&elems, "(3,4,5)", 5)],
        );
        assert_eq!(a5.order(), 60);
        assert!(is_normal(&g, &a5));

        let (s3g, s3elems) = CayleyGroup::from_generators_with_elements(
            &perm::symmetric_generators(3),
            "S3",
            DEFAULT_ORDER_CAP,
        )
        .unwrap();
        let refl = subgroup_closure(&s3g, &[index_of(&s3elems, "(1,2)", 3)]);
        assert!(!is_normal(&s3g, &refl));
    }

    #[test]
    fn product_closure() {
        let (g, elems) = s5_with_elements();
        let sub = |texts: &[&str]| {
            let gens: Vec<u32> = texts.iter().map(|t| index_of(&elems, t, 5)).collect();
            subgroup_closure(&g, &gens)
        };
        // H ≤ K makes HK = K.
        let h = sub(&["(1,2,3)"]);
        let k = sub(&["(1,2,3)", "(1,2)"]);
        assert!(set_product_closed(&g, &h, &k).unwrap());
        assert!(set_product_closed(&g, &h, &h).unwrap());

        // A normal factor always yields a closed product: A3 inside S3 ⊂ S5.
        let a3 = sub(&["(1,2,3)"]);
        let c2 = sub(&["(1,2)"]);
        assert!(set_product_closed(&g, &a3, &c2).unwrap());
        assert!(set_product_closed(&g, &c2, &a3).unwrap());

        // The headline pair must NOT be product-closed.
        let g1 = sub(&["(3,4,5)", "(1,2)(4,5)"]);
        let g2 = sub(&["(1,2,3,4,5)", "(1,4,3,5)"]);
        assert!(!set_product_closed(&g, &g1, &g2).unwrap());

        // |HK|·|H∩K| = |H|·|K| as sets, closed or not.
        for (x, y) in [(&g1, &g2), (&a3, &c2), (&h, &k)] {
            let mut product = SubgroupSet::empty(&g);
            for a in x.iter() {
                for b in y.iter() {
                    product.insert(g.mul(a, b));
                }
            }
            assert_eq!(
                product.order() * x.intersection_order(y),
                x.order() * y.order()
            );
        }
    }

    #[test]
    fn conjugate_subgroups_and_orbits() {
        let (g, elems) = s5_with_elements();
        let g3 = subgroup_closure(
            &g,
            &[index_of(&elems, "(2,3)", 5), index_of(&elems, "(1,3,4,2)", 5)],
        );
        let g4 = subgroup_closure(
            &g,
            &[index_of(&elems, "(2,4)", 5), index_of(&elems, "(1,2,5,4)", 5)],
        );
        let by = index_of(&elems, "(3,4,5)", 5);
        assert_eq!(conjugate_subgroup(&g, &g3, by), g4);
        assert_eq!(
            conjugate_subgroup(&g, &g3, g.identity()),
            g3
        );
    }

    #[test]
    fn generating_sets_are_small_and_regenerate() {
        let g = build(perm::symmetric_generators(4), "S4");
        let lat = all_subgroups(&g).unwrap();
        for i in 0..lat.len() {
            let gens = lat.generators(i);
            assert!(gens.len() <= 5);
            assert_eq!(&subgroup_closure(&g, gens), lat.member(i));
        }
    }

    #[test]
    fn lattice_cap_aborts_with_count() {
        let g = build(perm::symmetric_generators(4), "S4");
        match all_subgroups_capped(&g, 10) {
            Err(LatticeError::TooLarge { cap: 10, reached }) => assert!(reached > 10),
            other => panic!("unexpected: {other:?}"),
        }
    }
}
