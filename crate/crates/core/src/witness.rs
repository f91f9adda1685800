//! The explicit PGL(2,p) violating configuration and its verification.
//!
//! For an odd prime p, with t the smallest primitive root mod p and
//! s = t⁻¹, the projective images of
//!
//! ```text
//! A = [[1,0],[1,1]]   B = [[1,0],[0,t]]   C = [[1,(p−1)/2],[2,0]]
//! B₁ = (B^((p−1)/2))^(A^k₁)   B₃ = B^(A^k₃)   B₄ = B^(A^k₄)
//! ```
//!
//! with k₁ = −1, k₃ = 0, k₄ = −2 generate the four subgroups
//!
//! ```text
//! G₁ = ⟨c̄, b̄₁⟩   G₂ = ⟨ā, b̄⟩   G₃ = ⟨b̄₁c̄², b̄₃⟩   G₄ = ⟨b̄₁c̄, b̄₄⟩
//! ```
//!
//! whose order products give LHS = 6p(p−1), RHS = 8(p−1)² and a deficit of
//! exactly 2(p−1)(4−p): a violation for every p ≥ 5 and a near miss at p = 3.
//! Everything here is verified inside the materialized Cayley table, and the
//! subgroups are cross-checked against independently constructed element
//! lists so a transcription slip in either route cannot go unnoticed.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{find_primitive_root, Field, FieldError};
use crate::group::{CayleyGroup, GroupError};
use crate::ingleton::{
    group_vector, ingleton_integer_test, search_violations, IngletonError, IngletonTest,
    SearchOutcome,
};
use crate::lattice::{
    all_subgroups, conjugate_subgroup, subgroup_closure, LatticeError, SubgroupSet,
};
use crate::projective::{pgl2_group, pgl2_order, ProjError, ProjMat2};

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("p must be an odd prime, got {0}")]
    NotOddPrime(u32),
    #[error("structural mismatch: {0}")]
    Structural(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Proj(#[from] ProjError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Ingleton(#[from] IngletonError),
}

/// Construction parameters and the six projective matrices.
#[derive(Clone)]
pub struct WitnessConfig {
    pub p: u32,
    pub t: u32,
    pub s: u32,
    pub k1: i64,
    pub k3: i64,
    pub k4: i64,
    pub a: ProjMat2,
    pub b: ProjMat2,
    pub c: ProjMat2,
    pub b1: ProjMat2,
    pub b3: ProjMat2,
    pub b4: ProjMat2,
}

pub struct Witness {
    pub config: WitnessConfig,
    pub group: CayleyGroup,
    pub idx_a: u32,
    pub idx_b: u32,
    pub idx_c: u32,
    pub idx_b1: u32,
    pub idx_b3: u32,
    pub idx_b4: u32,
    pub subgroups: [SubgroupSet; 4],
    element_index: HashMap<ProjMat2, u32>,
    field: Arc<Field>,
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Builds the parameter matrices for arbitrary k₁, k₃, k₄ (used by the
/// perturbation tests; the real construction fixes them below).
pub fn build_config(p: u32, k1: i64, k3: i64, k4: i64) -> Result<WitnessConfig, WitnessError> {
    if p < 3 || !is_prime(p) {
        return Err(WitnessError::NotOddPrime(p));
    }
    let field = Field::new(p)?;
    let t_elem = find_primitive_root(&field)?;
    let t = t_elem.index();
    let s = t_elem.inv().index();

    let half = ((p - 1) / 2) as i64;
    let a = ProjMat2::from_ints(&field, [[1, 0], [1, 1]])?;
    let b = ProjMat2::from_ints(&field, [[1, 0], [0, t as i64]])?;
    let c = ProjMat2::from_ints(&field, [[1, half], [2, 0]])?;
    let b1 = b.pow(half).conj_by(&a.pow(k1));
    let b3 = b.conj_by(&a.pow(k3));
    let b4 = b.conj_by(&a.pow(k4));

    Ok(WitnessConfig {
        p,
        t,
        s,
        k1,
        k3,
        k4,
        a,
        b,
        c,
        b1,
        b3,
        b4,
    })
}

/// The canonical parameters: k₁ = −1, k₃ = 0, k₄ = −2 (so k₃−k₁ ≡ k₁−k₄).
pub fn build_witness(p: u32, cap: usize) -> Result<Witness, WitnessError> {
    let config = build_config(p, -1, 0, -2)?;
    let field = config.a.field().clone();

    // Closed entrywise forms; the conjugation route above must agree.
    let t = config.t as i64;
    for (name, built, closed) in [
        ("b1", &config.b1, ProjMat2::from_ints(&field, [[1, 0], [2, -1]])?),
        ("b3", &config.b3, config.b.clone()),
        (
            "b4",
            &config.b4,
            ProjMat2::from_ints(&field, [[1, 0], [2 * (1 - t), t]])?,
        ),
    ] {
        if *built != closed {
            return Err(WitnessError::Structural(format!(
                "{name}: conjugation form {} differs from entrywise form {}",
                built.label(),
                closed.label()
            )));
        }
    }

    let (group, elements) = pgl2_group(p, cap)?;
    let element_index: HashMap<ProjMat2, u32> = elements
        .into_iter()
        .enumerate()
        .map(|(i, e)| (e, i as u32))
        .collect();
    let at = |m: &ProjMat2| element_index[m];

    let (idx_a, idx_b, idx_c) = (at(&config.a), at(&config.b), at(&config.c));
    let (idx_b1, idx_b3, idx_b4) = (at(&config.b1), at(&config.b3), at(&config.b4));

    let b1c2 = group.mul(idx_b1, group.pow(idx_c, 2));
    let b1c = group.mul(idx_b1, idx_c);
    let subgroups = [
        subgroup_closure(&group, &[idx_c, idx_b1]),
        subgroup_closure(&group, &[idx_a, idx_b]),
        subgroup_closure(&group, &[b1c2, idx_b3]),
        subgroup_closure(&group, &[b1c, idx_b4]),
    ];

    let expected = [
        6u64,
        (p as u64) * (p as u64 - 1),
        2 * (p as u64 - 1),
        2 * (p as u64 - 1),
    ];
    for (i, (sub, want)) in subgroups.iter().zip(expected).enumerate() {
        if sub.order() as u64 != want {
            return Err(WitnessError::Structural(format!(
                "|G{}| = {}, expected {}",
                i + 1,
                sub.order(),
                want
            )));
        }
    }

    Ok(Witness {
        config,
        group,
        idx_a,
        idx_b,
        idx_c,
        idx_b1,
        idx_b3,
        idx_b4,
        subgroups,
        element_index,
        field,
    })
}

impl Witness {
    pub fn index_of(&self, m: &ProjMat2) -> Option<u32> {
        self.element_index.get(m).copied()
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }
}

#[derive(Clone, Debug)]
pub struct RelationReport {
    /// (relation, holds) in a fixed order.
    pub relations: Vec<(String, bool)>,
    pub order_a: usize,
    pub order_b: usize,
    pub order_c: usize,
    pub orders_ok: bool,
    pub all_hold: bool,
}

/// Checks the six defining relations and the element orders inside the
/// Cayley table: a^p = b^(p−1) = c³ = 1, a^b = a^s, (cb₁)² = 1, b₃^c·b₄ = 1.
pub fn verify_presentation_relations(
    group: &CayleyGroup,
    config: &WitnessConfig,
    idx: (u32, u32, u32, u32, u32, u32),
) -> RelationReport {
    let (a, b, c, b1, b3, b4) = idx;
    let p = config.p as u64;
    let e = group.identity();

    let cb1 = group.mul(c, b1);
    let relations = vec![
        ("a^p = 1".to_string(), group.pow(a, p) == e),
        ("b^(p-1) = 1".to_string(), group.pow(b, p - 1) == e),
        ("c^3 = 1".to_string(), group.pow(c, 3) == e),
        (
            "a^b = a^s".to_string(),
            group.conjugate(a, b) == group.pow(a, config.s as u64),
        ),
        ("(c b1)^2 = 1".to_string(), group.mul(cb1, cb1) == e),
        (
            "b3^c b4 = 1".to_string(),
            group.mul(group.conjugate(b3, c), b4) == e,
        ),
    ];
    let order_a = group.element_order(a);
    let order_b = group.element_order(b);
    let order_c = group.element_order(c);
    let orders_ok =
        order_a == p as usize && order_b == (p - 1) as usize && order_c == 3;
    let all_hold = relations.iter().all(|(_, ok)| *ok) && orders_ok;
    RelationReport {
        relations,
        order_a,
        order_b,
        order_c,
        orders_ok,
        all_hold,
    }
}

#[derive(Clone, Debug)]
pub struct FlowerReport {
    pub core_order: usize,
    pub petal_size: usize,
    pub petal_count: usize,
    pub core_normal: bool,
    pub petal_in_ambient: bool,
    pub trivial_core_meet: bool,
    pub petals_pairwise_trivial: bool,
    pub covers_ambient: bool,
    pub covered: usize,
    pub ok: bool,
}

/// Checks the flower structure of `ambient`: the conjugates of `petal` by
/// elements of the normal subgroup `core` must meet pairwise only at the
/// identity and, together with the core, cover the ambient subgroup exactly.
pub fn verify_flower(
    group: &CayleyGroup,
    ambient: &SubgroupSet,
    core: &SubgroupSet,
    petal: &SubgroupSet,
) -> Result<FlowerReport, LatticeError> {
    let core_in = core.is_subset_of(ambient);
    let petal_in = petal.is_subset_of(ambient);
    let trivial_core_meet = core.intersection_order(petal) == 1;

    let mut core_normal = core_in;
    if core_normal {
        'outer: for g in ambient.iter() {
            for x in core.iter() {
                if !core.contains(group.conjugate(x, g)) {
                    core_normal = false;
                    break 'outer;
                }
            }
        }
    }

    let petals: Vec<SubgroupSet> = core
        .iter()
        .map(|g| conjugate_subgroup(group, petal, g))
        .collect();
    let mut pairwise = true;
    for i in 0..petals.len() {
        for j in (i + 1)..petals.len() {
            if petals[i].intersection_order(&petals[j]) != 1 {
                pairwise = false;
            }
        }
    }

    let mut covered_words: Vec<u64> = core.bit_words().to_vec();
    for petal in &petals {
        for (w, word) in petal.bit_words().iter().enumerate() {
            covered_words[w] |= word;
        }
    }
    let covered: usize = covered_words.iter().map(|w| w.count_ones() as usize).sum();
    let covers = covered_words == ambient.bit_words() && covered == ambient.order();

    let ok = core_in && petal_in && trivial_core_meet && core_normal && pairwise && covers;
    Ok(FlowerReport {
        core_order: core.order(),
        petal_size: petal.order(),
        petal_count: petals.len(),
        core_normal,
        petal_in_ambient: petal_in,
        trivial_core_meet,
        petals_pairwise_trivial: pairwise,
        covers_ambient: covers,
        covered,
        ok,
    })
}

/// |⟨ā, b̄, c̄⟩| must be the whole group, (p−1)p(p+1).
pub fn verify_generation(w: &Witness) -> bool {
    let closure = subgroup_closure(&w.group, &[w.idx_a, w.idx_b, w.idx_c]);
    closure.order() == w.group.order()
        && w.group.order() as u64 == pgl2_order(w.config.p as u64)
}

/// Rebuilds each subgroup from entrywise element lists (independent of the
/// generator closures) and compares.
pub fn verify_explicit_forms(w: &Witness) -> Result<(), WitnessError> {
    let p = w.config.p as i64;
    let t = w.config.t as i64;
    let field = &w.field;
    let half = (p - 1) / 2;

    let mut t_pow = vec![1i64; (p - 1) as usize];
    for k in 1..t_pow.len() {
        t_pow[k] = (t_pow[k - 1] * t).rem_euclid(p);
    }
    let t_inv_pow = |k: usize| t_pow[(t_pow.len() - k % t_pow.len()) % t_pow.len()];

    let expect = |label: &str, sub: &SubgroupSet, mats: Vec<ProjMat2>| -> Result<(), WitnessError> {
        let mut seen = vec![false; w.group.order()];
        for m in &mats {
            let idx = w
                .index_of(m)
                .ok_or_else(|| WitnessError::Structural(format!("{label}: {} not in group", m.label())))?;
            seen[idx as usize] = true;
        }
        let as_set: Vec<u32> = seen
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| i as u32)
            .collect();
        let matches = as_set.len() == sub.order() && as_set.iter().all(|&i| sub.contains(i));
        if !matches {
            return Err(WitnessError::Structural(format!(
                "{label}: explicit element list ({} elements) differs from closure ({})",
                as_set.len(),
                sub.order()
            )));
        }
        Ok(())
    };

    let m = |rows: [[i64; 2]; 2]| ProjMat2::from_ints(field, rows).map_err(WitnessError::from);

    let g1 = vec![
        ProjMat2::identity(field),
        m([[1, half], [2, 0]])?,
        m([[0, half], [2, -1]])?,
        m([[1, 0], [2, -1]])?,
        m([[1, half], [0, -1]])?,
        m([[0, half], [-2, 0]])?,
    ];
    expect("G1", &w.subgroups[0], g1)?;

    let mut g2 = Vec::new();
    for alpha in 0..p {
        for beta in 1..p {
            g2.push(m([[1, 0], [alpha, beta]])?);
        }
    }
    expect("G2 (lower triangular)", &w.subgroups[1], g2)?;

    let mut g3 = Vec::new();
    let mut g4 = Vec::new();
    for k in 0..(p - 1) as usize {
        g3.push(m([[1, 0], [0, t_pow[k]]])?);
        g3.push(m([[0, (half * t_pow[k]).rem_euclid(p)], [-2, 0]])?);
        g4.push(m([[1, 0], [2 * (1 - t_pow[k]), t_pow[k]]])?);
        g4.push(m([[1, half], [2 * (1 - t_inv_pow(k)), -1]])?);
    }
    expect("G3", &w.subgroups[2], g3)?;
    expect("G4", &w.subgroups[3], g4)?;
    Ok(())
}

/// The twelve order assertions plus the product formulas.
#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub p: u32,
    pub t: u32,
    pub s: u32,
    pub group_order: u64,
    pub relations: RelationReport,
    pub flower: FlowerReport,
    pub generation: bool,
    pub explicit_forms_ok: bool,
    pub subgroup_orders: [u64; 4],
    pub pair_orders: [u64; 6],
    pub triple_orders: [u64; 2],
    pub test: IngletonTest,
    pub deficit_formula: i128,
    pub violated: bool,
    pub matrices: Vec<(String, String)>,
    /// First violated assertion, if any.
    pub first_failure: Option<String>,
    pub ok: bool,
}

pub fn witness_report(p: u32, cap: usize) -> Result<WitnessReport, WitnessError> {
    let w = build_witness(p, cap)?;
    let pd = p as u64;
    let relations = verify_presentation_relations(
        &w.group,
        &w.config,
        (w.idx_a, w.idx_b, w.idx_c, w.idx_b1, w.idx_b3, w.idx_b4),
    );
    let core = subgroup_closure(&w.group, &[w.idx_a]);
    let petal = subgroup_closure(&w.group, &[w.idx_b]);
    let flower = verify_flower(&w.group, &w.subgroups[1], &core, &petal)?;
    let generation = verify_generation(&w);
    let explicit = verify_explicit_forms(&w);

    let subs: Vec<&SubgroupSet> = w.subgroups.iter().collect();
    let v = group_vector(&w.group, &subs)?;
    let test = ingleton_integer_test(&v)?;

    let subgroup_orders = [v.order_of(1), v.order_of(2), v.order_of(4), v.order_of(8)];
    let pair_orders = [
        v.order_of(3),
        v.order_of(5),
        v.order_of(9),
        v.order_of(6),
        v.order_of(10),
        v.order_of(12),
    ];
    let triple_orders = [v.order_of(7), v.order_of(11)];

    let mut first_failure: Option<String> = None;
    let mut check = |name: &str, ok: bool| {
        if !ok && first_failure.is_none() {
            first_failure = Some(name.to_string());
        }
    };

    check("relations", relations.all_hold);
    check("flower", flower.ok);
    check("generation", generation);
    check(
        "explicit element lists",
        explicit.is_ok(),
    );
    check("|G1| = 6", subgroup_orders[0] == 6);
    check("|G2| = p(p-1)", subgroup_orders[1] == pd * (pd - 1));
    check("|G3| = 2(p-1)", subgroup_orders[2] == 2 * (pd - 1));
    check("|G4| = 2(p-1)", subgroup_orders[3] == 2 * (pd - 1));
    check("|G12| = 2", pair_orders[0] == 2);
    check("|G13| = 2", pair_orders[1] == 2);
    check("|G14| = 2", pair_orders[2] == 2);
    check("|G23| = p-1", pair_orders[3] == pd - 1);
    check("|G24| = p-1", pair_orders[4] == pd - 1);
    check("|G34| = 1", pair_orders[5] == 1);
    check("|G123| = 1", triple_orders[0] == 1);
    check("|G124| = 1", triple_orders[1] == 1);
    check("lhs = 6p(p-1)", test.lhs == 6 * pd as u128 * (pd - 1) as u128);
    check(
        "rhs = 8(p-1)^2",
        test.rhs == 8 * (pd - 1) as u128 * (pd - 1) as u128,
    );
    let deficit_formula = 2 * (pd as i128 - 1) * (4 - pd as i128);
    check("deficit = 2(p-1)(4-p)", test.deficit == deficit_formula);
    check("violated iff p >= 5", test.violated == (p >= 5));

    let matrices = vec![
        ("a".to_string(), w.config.a.label()),
        ("b".to_string(), w.config.b.label()),
        ("c".to_string(), w.config.c.label()),
        ("b1".to_string(), w.config.b1.label()),
        ("b3".to_string(), w.config.b3.label()),
        ("b4".to_string(), w.config.b4.label()),
    ];

    let ok = first_failure.is_none();
    Ok(WitnessReport {
        p,
        t: w.config.t,
        s: w.config.s,
        group_order: w.group.order() as u64,
        relations,
        flower,
        generation,
        explicit_forms_ok: explicit.is_ok(),
        subgroup_orders,
        pair_orders,
        triple_orders,
        test,
        deficit_formula,
        violated: test.violated,
        matrices,
        first_failure,
        ok,
    })
}

/// Full lattice search over PGL(2,q); the long-running path for prime powers.
pub struct ScanOutcome {
    pub q: u32,
    pub group_order: u64,
    pub subgroup_count: usize,
    pub outcome: SearchOutcome,
}

pub fn prime_power_scan(q: u32, cap: usize) -> Result<ScanOutcome, WitnessError> {
    let (group, _) = pgl2_group(q, cap)?;
    let lattice = all_subgroups(&group)?;
    let outcome = search_violations(&group, &lattice, true)?;
    Ok(ScanOutcome {
        q,
        group_order: group.order() as u64,
        subgroup_count: lattice.len(),
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_ORDER_CAP;
    use crate::perm::Permutation;

    #[test]
    fn config_matrices_for_p5() {
        let c = build_config(5, -1, 0, -2).unwrap();
        assert_eq!((c.t, c.s), (2, 3));
        assert_eq!(c.a.label(), "[[1,0],[1,1]]");
        assert_eq!(c.b.label(), "[[1,0],[0,2]]");
        assert_eq!(c.c.label(), "[[1,2],[2,0]]");
        assert_eq!(c.b1.label(), "[[1,0],[2,4]]");
        assert_eq!(c.b3.label(), "[[1,0],[0,2]]");
        assert_eq!(c.b4.label(), "[[1,0],[3,2]]");
    }

    #[test]
    fn rejects_non_odd_primes() {
        assert!(matches!(build_config(2, -1, 0, -2), Err(WitnessError::NotOddPrime(2))));
        assert!(matches!(build_config(9, -1, 0, -2), Err(WitnessError::NotOddPrime(9))));
        assert!(matches!(build_witness(15, DEFAULT_ORDER_CAP), Err(WitnessError::NotOddPrime(15))));
    }

    #[test]
    fn witness_p5_matches_the_s5_numbers() {
        let r = witness_report(5, DEFAULT_ORDER_CAP).unwrap();
        assert!(r.ok, "first failure: {:?}", r.first_failure);
        assert_eq!(r.group_order, 120);
        assert_eq!(r.subgroup_orders, [6, 20, 8, 8]);
        assert_eq!(r.pair_orders, [2, 2, 2, 4, 4, 1]);
        assert_eq!(r.triple_orders, [1, 1]);
        assert_eq!((r.test.lhs, r.test.rhs, r.test.deficit), (120, 128, -8));
        assert!(r.violated);
    }

    #[test]
    fn witness_p3_is_the_negative_control() {
        let r = witness_report(3, DEFAULT_ORDER_CAP).unwrap();
        assert!(r.ok, "first failure: {:?}", r.first_failure);
        assert_eq!((r.test.lhs, r.test.rhs, r.test.deficit), (36, 32, 4));
        assert!(!r.violated);
        assert_eq!(r.flower.petal_size, 2);
    }

    #[test]
    fn perturbed_k1_breaks_the_involution_relation() {
        let config = build_config(5, 0, 0, -2).unwrap();
        let (group, elements) = pgl2_group(5, DEFAULT_ORDER_CAP).unwrap();
        let index: HashMap<ProjMat2, u32> = elements
            .into_iter()
            .enumerate()
            .map(|(i, e)| (e, i as u32))
            .collect();
        let report = verify_presentation_relations(
            &group,
            &config,
            (
                index[&config.a],
                index[&config.b],
                index[&config.c],
                index[&config.b1],
                index[&config.b3],
                index[&config.b4],
            ),
        );
        let cb1 = report
            .relations
            .iter()
            .find(|(name, _)| name == "(c b1)^2 = 1")
            .unwrap();
        assert!(!cb1.1, "k1 = 0 must break (c b1)^2 = 1");
    }

    #[test]
    fn generation_needs_c() {
        let w = build_witness(5, DEFAULT_ORDER_CAP).unwrap();
        assert!(verify_generation(&w));
        let ab_only = subgroup_closure(&w.group, &[w.idx_a, w.idx_b]);
        assert_eq!(ab_only.order() as u64, 5 * 4);
        assert_eq!(ab_only, w.subgroups[1]);
    }

    #[test]
    fn flower_fails_when_the_acting_order_is_too_small() {
        // Z8 ⋊ Z4 with b acting as multiplication by 3 (an involution on Z8):
        // the petals must overlap because |b| = 4 exceeds the action order 2.
        let a = Permutation::parse("(1,2,3,4,5,6,7,8)", 12).unwrap();
        let b = Permutation::parse("(2,4)(3,7)(6,8)(9,10,11,12)", 12).unwrap();
        let (g, elems) = CayleyGroup::from_generators_with_elements(
            &[a.clone(), b.clone()],
            "perm[12]: (1,2,3,4,5,6,7,8);(2,4)(3,7)(6,8)(9,10,11,12)",
            DEFAULT_ORDER_CAP,
        )
        .unwrap();
        assert_eq!(g.order(), 32);
        let ia = elems.iter().position(|e| *e == a).unwrap() as u32;
        let ib = elems.iter().position(|e| *e == b).unwrap() as u32;
        assert_eq!(g.element_order(ib), 4);
        let ambient = subgroup_closure(&g, &[ia, ib]);
        let core = subgroup_closure(&g, &[ia]);
        let petal = subgroup_closure(&g, &[ib]);
        let report = verify_flower(&g, &ambient, &core, &petal).unwrap();
        assert!(!report.petals_pairwise_trivial);
        assert!(!report.ok);
    }

    #[test]
    fn deficit_formula_for_p13() {
        let r = witness_report(13, DEFAULT_ORDER_CAP).unwrap();
        assert!(r.ok, "first failure: {:?}", r.first_failure);
        assert_eq!(r.test.deficit, -216);
        assert_eq!(r.deficit_formula, 2 * 12 * (4 - 13));
    }
}
