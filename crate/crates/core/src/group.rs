//! Representation-independent finite groups, materialized as Cayley tables.
//!
//! A concrete representation (permutations, projective matrices, …) only has
//! to supply composition, inversion and a display label; everything built on
//! top of a [`CayleyGroup`] works on element indices. Element 0 is always the
//! identity, and indices are assigned by breadth-first closure from the
//! identity with right-multiplication by the generators in their given order,
//! so a fixed generator list always produces the same tables.

use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

/// Largest group the engine will materialize; |G|² table cells stay desk-sized.
pub const DEFAULT_ORDER_CAP: usize = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("generator list is empty")]
    NoGenerators,
    #[error("group too large: closure exceeded the cap of {cap} elements")]
    TooLarge { cap: usize },
    #[error("incompatible generators: {0}")]
    Incompatible(String),
}

/// What a representation must provide to be materialized.
pub trait ConcreteElement: Clone + Eq + Hash {
    fn identity_like(&self) -> Self;
    /// The group operation. For permutations this is left-to-right action.
    fn compose(&self, other: &Self) -> Self;
    fn invert(&self) -> Self;
    fn label(&self) -> String;
    /// Whether two elements live in the same representation (same degree,
    /// same field and shape, …).
    fn compatible(&self, other: &Self) -> bool;
}

/// A finite group as multiplication and inverse tables over element indices.
pub struct CayleyGroup {
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    labels: Vec<String>,
    spec: String,
    tag: u64,
    abelian: bool,
}

impl std::fmt::Debug for CayleyGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CayleyGroup({:?}, order {})", self.spec, self.order)
    }
}


impl CayleyGroup {
    /// Closes the generators under composition and fills the tables.
    pub fn from_generators<E: ConcreteElement>(
        generators: &[E],
        spec: &str,
        cap: usize,
    ) -> Result<CayleyGroup, GroupError> {
        Self::from_generators_with_elements(generators, spec, cap).map(|(g, _)| g)
    }

    /// Like [`CayleyGroup::from_generators`], additionally returning the
    /// concrete elements in index order.
    pub fn from_generators_with_elements<E: ConcreteElement>(
        generators: &[E],
        spec: &str,
        cap: usize,
    ) -> Result<(CayleyGroup, Vec<E>), GroupError> {
        if generators.is_empty() {
            return Err(GroupError::NoGenerators);
        }
        for g in &generators[1..] {
            if !generators[0].compatible(g) {
                return Err(GroupError::Incompatible(
                    "all generators must share one representation".into(),
                ));
            }
        }

        let identity = generators[0].identity_like();
        let mut elements: Vec<E> = vec![identity.clone()];
        let mut index: HashMap<E, u32> = HashMap::new();
        index.insert(identity, 0);

        let mut head = 0usize;
        while head < elements.len() {
            for g in generators {
                let next = elements[head].compose(g);
                if !index.contains_key(&next) {
                    if elements.len() >= cap {
                        return Err(GroupError::TooLarge { cap });
                    }
                    index.insert(next.clone(), elements.len() as u32);
                    elements.push(next);
                }
            }
            head += 1;
        }

        let order = elements.len();
        let mut mul = vec![0u32; order * order];
        for a in 0..order {
            for b in 0..order {
                let prod = elements[a].compose(&elements[b]);
                mul[a * order + b] = index[&prod];
            }
        }
        let inv: Vec<u32> = elements.iter().map(|e| index[&e.invert()]).collect();
        let labels: Vec<String> = elements.iter().map(|e| e.label()).collect();

        let mut abelian = true;
        'outer: for a in 0..order {
            for b in (a + 1)..order {
                if mul[a * order + b] != mul[b * order + a] {
                    abelian = false;
                    break 'outer;
                }
            }
        }

        let group = CayleyGroup {
            order,
            mul,
            inv,
            labels,
            spec: spec.to_string(),
            tag: tag_for(spec, order),
            abelian,
        };
        debug_assert!(group.validate().is_ok());
        Ok((group, elements))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        0
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.order + b as usize]
    }

    pub fn inv_of(&self, x: u32) -> u32 {
        self.inv[x as usize]
    }

    pub fn label(&self, x: u32) -> &str {
        &self.labels[x as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    /// Identifies the (spec, order) pair a subgroup bitset belongs to.
    pub fn tag(&self) -> u64 {
        self.tag
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.order as u32
    }

    /// x^e by repeated multiplication.
    pub fn pow(&self, x: u32, e: u64) -> u32 {
        let mut acc = self.identity();
        for _ in 0..e {
            acc = self.mul(acc, x);
        }
        acc
    }

    /// Least m ≥ 1 with x^m = identity; divides the group order.
    pub fn element_order(&self, x: u32) -> usize {
        let mut acc = x;
        let mut m = 1usize;
        while acc != 0 {
            acc = self.mul(acc, x);
            m += 1;
        }
        m
    }

    /// x^g = g⁻¹xg.
    pub fn conjugate(&self, x: u32, g: u32) -> u32 {
        self.mul(self.mul(self.inv_of(g), x), g)
    }

    /// Structural self-check: Latin square, identity row/column, inverses,
    /// and associativity (exhaustive up to order 200, sampled above).
    pub fn validate(&self) -> Result<(), String> {
        let n = self.order;
        if n == 0 {
            return Err("empty group".into());
        }
        let mut seen = vec![false; n];
        for a in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for b in 0..n {
                let v = self.mul[a * n + b] as usize;
                if seen[v] {
                    return Err(format!("row {a} is not a permutation"));
                }
                seen[v] = true;
            }
            seen.iter_mut().for_each(|s| *s = false);
            for b in 0..n {
                let v = self.mul[b * n + a] as usize;
                if seen[v] {
                    return Err(format!("column {a} is not a permutation"));
                }
                seen[v] = true;
            }
        }
        for x in 0..n as u32 {
            if self.mul(0, x) != x || self.mul(x, 0) != x {
                return Err(format!("identity fails at {x}"));
            }
            if self.mul(x, self.inv_of(x)) != 0 || self.mul(self.inv_of(x), x) != 0 {
                return Err(format!("inverse fails at {x}"));
            }
        }
        if n <= 200 {
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    let ab = self.mul(a, b);
                    for c in 0..n as u32 {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return Err(format!("associativity fails at ({a},{b},{c})"));
                        }
                    }
                }
            }
        } else {
            let mut state = self.tag | 1;
            let mut next = || {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                (state >> 33) as u32 % n as u32
            };
            for _ in 0..100_000 {
                let (a, b, c) = (next(), next(), next());
                if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                    return Err(format!("associativity fails at ({a},{b},{c})"));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn tag_for(spec: &str, order: usize) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for byte in spec.bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h ^ (order as u64).wrapping_mul(0x9e3779b97f4a7c15)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{self, Permutation};

    fn s(text: &str, degree: usize) -> Permutation {
        Permutation::parse(text, degree).unwrap()
    }

    fn build(gens: Vec<Permutation>, spec: &str) -> CayleyGroup {
        CayleyGroup::from_generators(&gens, spec, DEFAULT_ORDER_CAP).unwrap()
    }

    /// Brute-force closure over explicit element sets, independent of the
    /// BFS path: repeatedly multiply all pairs until nothing new appears.
    fn naive_closure(gens: &[Permutation]) -> usize {
        use std::collections::HashSet;
        let mut set: HashSet<Permutation> = HashSet::new();
        set.insert(gens[0].identity_like());
        for g in gens {
            set.insert(g.clone());
        }
        loop {
            let mut fresh = Vec::new();
            for a in &set {
                for b in &set {
                    let c = a.compose(b);
                    if !set.contains(&c) {
                        fresh.push(c);
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            set.extend(fresh);
        }
        set.len()
    }

    #[test]
    fn closure_orders() {
        let g20 = build(vec![s("(1,2,3,4,5)", 5), s("(1,4,3,5)", 5)], "g20");
        assert_eq!(g20.order(), 20);

        let trivial = build(vec![Permutation::identity(5)], "triv");
        assert_eq!(trivial.order(), 1);

        let gens = vec![s("(1,2)", 3), s("(1,2,3)", 3)];
        assert_eq!(naive_closure(&gens), 6);
        assert_eq!(build(gens, "S3").order(), 6);
    }

    #[test]
    fn catalog_orders_match_formulas() {
        let fact = |n: usize| (1..=n).product::<usize>();
        for n in 1..=7 {
            assert_eq!(
                build(perm::symmetric_generators(n), &format!("S{n}")).order(),
                fact(n),
                "S{n}"
            );
            assert_eq!(
                build(perm::cyclic_generators(n), &format!("Z{n}")).order(),
                n,
                "Z{n}"
            );
            assert_eq!(
                build(perm::dihedral_generators(2 * n).unwrap(), &format!("D{}", 2 * n)).order(),
                2 * n,
                "D{}",
                2 * n
            );
        }
    }

    #[test]
    fn construction_is_deterministic() {
        let gens = vec![s("(1,2)", 5), s("(1,2,3,4,5)", 5)];
        let a = build(gens.clone(), "S5");
        let b = build(gens, "S5");
        assert_eq!(a.mul, b.mul);
        assert_eq!(a.inv, b.inv);
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.tag(), b.tag());
    }

    #[test]
    fn validation_passes_for_catalog_groups() {
        for g in [
            build(perm::symmetric_generators(4), "S4"),
            build(perm::dihedral_generators(12).unwrap(), "D12"),
            build(perm::cyclic_generators(9), "Z9"),
        ] {
            g.validate().unwrap();
        }
    }

    #[test]
    fn element_orders() {
        let s5 = build(perm::symmetric_generators(5), "S5");
        assert_eq!(s5.element_order(s5.identity()), 1);
        for x in s5.elements() {
            assert_eq!(s5.order() % s5.element_order(x), 0);
        }
        // (1,3,4,2) squares to (1,4)(3,2) and has order 4.
        let (_, elems) = CayleyGroup::from_generators_with_elements(
            &[s("(1,3,4,2)", 5)],
            "c4",
            DEFAULT_ORDER_CAP,
        )
        .unwrap();
        assert_eq!(elems.len(), 4);
    }

    #[test]
    fn conjugation_preserves_order_and_matches_labels() {
        let (s5, elems) = CayleyGroup::from_generators_with_elements(
            &perm::symmetric_generators(5),
            "S5",
            DEFAULT_ORDER_CAP,
        )
        .unwrap();
        let find = |text: &str| {
            let target = s(text, 5);
            elems.iter().position(|e| *e == target).unwrap() as u32
        };
        let x = find("(1,3,4,2)");
        let g = find("(3,4,5)");
        assert_eq!(s5.conjugate(x, g), find("(1,4,5,2)"));
        for e in s5.elements().take(30) {
            assert_eq!(s5.element_order(s5.conjugate(x, e)), s5.element_order(x));
            assert_eq!(s5.conjugate(e, s5.identity()), e);
        }

        let z6 = build(perm::cyclic_generators(6), "Z6");
        assert!(z6.is_abelian());
        for x in z6.elements() {
            for g in z6.elements() {
                assert_eq!(z6.conjugate(x, g), x);
            }
        }
        assert!(!s5.is_abelian());
    }

    #[test]
    fn cap_and_precondition_errors() {
        assert!(matches!(
            CayleyGroup::from_generators(&perm::symmetric_generators(8), "S8", 10_000),
            Err(GroupError::TooLarge { cap: 10_000 })
        ));
        let empty: Vec<Permutation> = Vec::new();
        assert!(matches!(
            CayleyGroup::from_generators(&empty, "none", 10),
            Err(GroupError::NoGenerators)
        ));
        assert!(matches!(
            CayleyGroup::from_generators(&[s("(1,2)", 2), s("(1,2)", 3)], "mixed", 10),
            Err(GroupError::Incompatible(_))
        ));
    }
}
