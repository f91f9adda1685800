//! Group-characterizable vectors and the Ingleton violation machinery.
//!
//! For subgroups G₁..G₄ of G the inequality can be decided two ways:
//!
//! * order form, exact integers:
//!   |G₁||G₂||G₃₄||G₁₂₃||G₁₂₄| ≥ |G₁₂||G₁₃||G₁₄||G₂₃||G₂₄|,
//!   violated when the left product is strictly smaller;
//! * entropy form over h_α = log₂(|G|/|G_α|):
//!   h₁₂+h₁₃+h₁₄+h₂₃+h₂₄ − (h₁+h₂+h₃₄+h₁₂₃+h₁₂₄) ≥ 0,
//!   equivalently r₁₃,₁₄ + r₂₃,₂₄ + r₁₃₄,₂₃₄ − r₁₂₃,₁₂₄ ≥ 0 with
//!   r_{α,β} = h_α + h_β − h_{α∩β} − h_{α∪β}.
//!
//! All decisions are taken on the integer form; the log forms exist for
//! diagnostics and agree in sign. The exhaustive search scans unordered pairs
//! {G₁,G₂} × {G₃,G₄}, which enumerates each orbit of the label symmetry
//! {1↔2} × {3↔4} exactly once, and prunes with seven conditions that each
//! guarantee the inequality holds.

use rayon::prelude::*;
use thiserror::Error;

use crate::group::CayleyGroup;
use crate::lattice::{
    is_normal, klein_canonical, set_product_closed, LatticeError, SubgroupLattice, SubgroupSet,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IngletonError {
    #[error("expected {expected} subgroups, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("subgroup count {0} out of range 1..=8")]
    ArityOutOfRange(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("lattice too large for the pair tables: {subgroups} subgroups")]
    SearchTooLarge { subgroups: usize },
}

/// The 2ⁿ−1 intersection orders of n chosen subgroups, plus |G|.
/// `alpha_orders[mask-1]` is |∩_{i∈mask} G_i| for each nonempty bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupVector {
    n: usize,
    group_order: u64,
    alpha_orders: Vec<u64>,
}

impl GroupVector {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group_order(&self) -> u64 {
        self.group_order
    }

    pub fn order_of(&self, mask: u32) -> u64 {
        self.alpha_orders[mask as usize - 1]
    }

    pub fn alpha_orders(&self) -> &[u64] {
        &self.alpha_orders
    }

    pub fn from_parts(group_order: u64, alpha_orders: Vec<u64>, n: usize) -> GroupVector {
        assert_eq!(alpha_orders.len(), (1 << n) - 1);
        GroupVector {
            n,
            group_order,
            alpha_orders,
        }
    }

    /// h_α = log₂(|G|/|G_α|) for every nonempty α.
    pub fn entropy_vector(&self) -> Vec<f64> {
        self.alpha_orders
            .iter()
            .map(|&o| (self.group_order as f64).log2() - (o as f64).log2())
            .collect()
    }
}

/// Cascaded bitset intersections over all nonempty subsets of the chosen
/// subgroups.
pub fn group_vector(
    group: &CayleyGroup,
    chosen: &[&SubgroupSet],
) -> Result<GroupVector, IngletonError> {
    let n = chosen.len();
    if n == 0 || n > 8 {
        return Err(IngletonError::ArityOutOfRange(n));
    }
    for sub in chosen {
        if !sub.matches_parent(group) {
            return Err(LatticeError::ParentMismatch.into());
        }
    }
    let total = 1usize << n;
    let mut cascades: Vec<SubgroupSet> = Vec::with_capacity(total - 1);
    for mask in 1..total {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let sub = if rest == 0 {
            chosen[low].clone()
        } else {
            cascades[rest - 1].intersect(chosen[low])?
        };
        cascades.push(sub);
    }
    Ok(GroupVector {
        n,
        group_order: group.order() as u64,
        alpha_orders: cascades.iter().map(|s| s.order() as u64).collect(),
    })
}

/// Outcome of the exact order-form test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IngletonTest {
    pub lhs: u128,
    pub rhs: u128,
    pub deficit: i128,
    pub violated: bool,
}

const M1: u32 = 0b0001;
const M2: u32 = 0b0010;
const M3: u32 = 0b0100;
const M4: u32 = 0b1000;

/// Exact integer products; no floating point anywhere near the decision.
pub fn ingleton_integer_test(v: &GroupVector) -> Result<IngletonTest, IngletonError> {
    if v.n != 4 {
        return Err(IngletonError::WrongArity {
            expected: 4,
            got: v.n,
        });
    }
    let o = |mask: u32| v.order_of(mask) as u128;
    let lhs = o(M1) * o(M2) * o(M3 | M4) * o(M1 | M2 | M3) * o(M1 | M2 | M4);
    let rhs = o(M1 | M2) * o(M1 | M3) * o(M1 | M4) * o(M2 | M3) * o(M2 | M4);
    Ok(IngletonTest {
        lhs,
        rhs,
        deficit: lhs as i128 - rhs as i128,
        violated: lhs < rhs,
    })
}

fn h(hv: &[f64], mask: u32) -> f64 {
    hv[mask as usize - 1]
}

/// Entropy-form slack; negative exactly when the order form is violated.
pub fn ingleton_entropy_slack(hv: &[f64]) -> f64 {
    assert!(hv.len() >= 15, "need all 15 joint entropies of 4 variables");
    h(hv, M1 | M2) + h(hv, M1 | M3) + h(hv, M1 | M4) + h(hv, M2 | M3) + h(hv, M2 | M4)
        - (h(hv, M1) + h(hv, M2) + h(hv, M3 | M4) + h(hv, M1 | M2 | M3) + h(hv, M1 | M2 | M4))
}

/// Submodularity excess r_{α,β} = h_α + h_β − h_{α∩β} − h_{α∪β}; nonnegative
/// for every entropy vector. `h_empty` is 0 by convention.
pub fn r_excess(hv: &[f64], alpha: u32, beta: u32) -> f64 {
    let meet = alpha & beta;
    let meet_h = if meet == 0 { 0.0 } else { h(hv, meet) };
    h(hv, alpha) + h(hv, beta) - meet_h - h(hv, alpha | beta)
}

/// The same slack computed through the submodularity rewrite
/// r₁₃,₁₄ + r₂₃,₂₄ + r₁₃₄,₂₃₄ − r₁₂₃,₁₂₄.
pub fn ingleton_r_slack(hv: &[f64]) -> f64 {
    r_excess(hv, M1 | M3, M1 | M4) + r_excess(hv, M2 | M3, M2 | M4)
        + r_excess(hv, M1 | M3 | M4, M2 | M3 | M4)
        - r_excess(hv, M1 | M2 | M3, M1 | M2 | M4)
}

/// Sanity warnings for externally supplied entropy vectors: monotonicity and
/// submodularity. Empty for every group-derived vector.
pub fn entropy_vector_warnings(hv: &[f64], n: usize) -> Vec<String> {
    let mut out = Vec::new();
    let total = (1u32 << n) - 1;
    for alpha in 1..=total {
        for beta in 1..=total {
            if alpha & beta == alpha && h(hv, alpha) > h(hv, beta) + 1e-12 {
                out.push(format!("not monotone at ({alpha:b},{beta:b})"));
            }
            if r_excess(hv, alpha, beta) < -1e-12 {
                out.push(format!("not submodular at ({alpha:b},{beta:b})"));
            }
        }
    }
    out
}

/// The five-variable inequality
/// 2H(E|A) + 2H(E|B) + I(A;B|C) + I(A;B|D) + I(C;D) ≥ H(E),
/// evaluated as a slack on a 5-subgroup vector with roles (A,B,C,D,E) =
/// (bit 0, …, bit 4). Nonnegative on every group-derived vector.
pub fn five_var_slack(v: &GroupVector) -> Result<f64, IngletonError> {
    if v.n != 5 {
        return Err(IngletonError::WrongArity {
            expected: 5,
            got: v.n,
        });
    }
    let hv = v.entropy_vector();
    Ok(five_var_slack_from_entropies(&hv))
}

pub fn five_var_slack_from_entropies(hv: &[f64]) -> f64 {
    assert!(hv.len() >= 31, "need all 31 joint entropies of 5 variables");
    let (a, b, c, d, e) = (1u32, 2, 4, 8, 16);
    let cond = |x: u32, given: u32| h(hv, x | given) - h(hv, given);
    let cond_mi = |x: u32, y: u32, given: u32| {
        h(hv, x | given) + h(hv, y | given) - h(hv, given) - h(hv, x | y | given)
    };
    let mi = |x: u32, y: u32| h(hv, x) + h(hv, y) - h(hv, x | y);
    2.0 * cond(e, a) + 2.0 * cond(e, b) + cond_mi(a, b, c) + cond_mi(a, b, d) + mi(c, d)
        - h(hv, e)
}

/// The seven conditions, each of which forces the inequality to hold for a
/// 4-tuple. Numbering follows the pruning rules' usual presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    /// C1: the ambient group is abelian.
    Abelian,
    /// C2: every Gᵢ is normal in G.
    AllNormal,
    /// C3: G₁G₂ = G₂G₁ (the set product is a subgroup).
    ProductClosed,
    /// C4: some Gᵢ is trivial or the whole group.
    TrivialOrFull,
    /// C5: Gᵢ = Gⱼ for distinct positions i ≠ j.
    RepeatedSubgroup,
    /// C6: G₁ ∩ G₂ = 1.
    TrivialMeet12,
    /// C7: Gᵢ ≤ Gⱼ for distinct positions i ≠ j.
    NestedPair,
}

impl Condition {
    pub const ALL: [Condition; 7] = [
        Condition::Abelian,
        Condition::AllNormal,
        Condition::ProductClosed,
        Condition::TrivialOrFull,
        Condition::RepeatedSubgroup,
        Condition::TrivialMeet12,
        Condition::NestedPair,
    ];

    pub fn short_name(&self) -> &'static str {
        match self {
            Condition::Abelian => "C1",
            Condition::AllNormal => "C2",
            Condition::ProductClosed => "C3",
            Condition::TrivialOrFull => "C4",
            Condition::RepeatedSubgroup => "C5",
            Condition::TrivialMeet12 => "C6",
            Condition::NestedPair => "C7",
        }
    }
}

/// Which of the seven conditions a 4-tuple satisfies. C3 looks only at the
/// {1,2} pair and C6 only at the {1,2} intersection; C5 and C7 range over all
/// distinct positions; C4 over any single position.
pub fn condition_profile(
    group: &CayleyGroup,
    tuple: [&SubgroupSet; 4],
) -> Result<Vec<Condition>, IngletonError> {
    for sub in tuple {
        if !sub.matches_parent(group) {
            return Err(LatticeError::ParentMismatch.into());
        }
    }
    let mut out = Vec::new();
    if group.is_abelian() {
        out.push(Condition::Abelian);
    }
    if tuple.iter().all(|s| is_normal(group, s)) {
        out.push(Condition::AllNormal);
    }
    if set_product_closed(group, tuple[0], tuple[1])? {
        out.push(Condition::ProductClosed);
    }
    if tuple.iter().any(|s| s.is_trivial() || s.is_full()) {
        out.push(Condition::TrivialOrFull);
    }
    let mut repeated = false;
    let mut nested = false;
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            if tuple[i] == tuple[j] {
                repeated = true;
            }
            if tuple[i].is_subset_of(tuple[j]) {
                nested = true;
            }
        }
    }
    if repeated {
        out.push(Condition::RepeatedSubgroup);
    }
    if tuple[0].intersection_order(tuple[1]) == 1 {
        out.push(Condition::TrivialMeet12);
    }
    if nested {
        out.push(Condition::NestedPair);
    }
    Ok(out)
}

/// One violating 4-tuple of lattice indices, in canonical label order
/// (i₁ ≤ i₂ and i₃ ≤ i₄).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ViolationRecord {
    pub indices: [usize; 4],
    pub lhs: u128,
    pub rhs: u128,
    pub deficit: i128,
    pub canonical: bool,
}

impl ViolationRecord {
    /// Number of distinct ordered tuples in the {1↔2}×{3↔4} orbit.
    pub fn orbit_size(&self) -> u64 {
        let first = if self.indices[0] == self.indices[1] { 1 } else { 2 };
        let second = if self.indices[2] == self.indices[3] { 1 } else { 2 };
        first * second
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub outer_pairs: u64,
    pub outer_survivors: u64,
    pub tuples_tested: u64,
    pub pruned_trivial_or_full: u64,
    pub pruned_repeated: u64,
    pub pruned_nested: u64,
    pub pruned_trivial_meet: u64,
    pub pruned_product_closed: u64,
}

#[derive(Debug)]
pub struct SearchOutcome {
    /// Violations in canonical form, sorted by (i₁,i₂,i₃,i₄).
    pub records: Vec<ViolationRecord>,
    pub raw_count: u64,
    pub pruned: bool,
    /// Set when the whole scan was skipped by a global condition.
    pub skipped_globally: Option<Condition>,
    pub stats: SearchStats,
}

impl SearchOutcome {
    pub fn canonical_count(&self) -> usize {
        self.records.len()
    }
}

struct PairTables {
    len: usize,
    inter: Vec<u32>,
    subset: Vec<bool>,
}

impl PairTables {
    fn build(lattice: &SubgroupLattice) -> PairTables {
        let len = lattice.len();
        let mut inter = vec![0u32; len * len];
        let mut subset = vec![false; len * len];
        for i in 0..len {
            for j in 0..len {
                let m = lattice.member(i).intersection_order(lattice.member(j));
                inter[i * len + j] = m as u32;
                subset[i * len + j] = m == lattice.member(i).order();
            }
        }
        PairTables { len, inter, subset }
    }

    #[inline]
    fn inter(&self, i: usize, j: usize) -> u64 {
        self.inter[i * self.len + j] as u64
    }

    #[inline]
    fn nested(&self, i: usize, j: usize) -> bool {
        self.subset[i * self.len + j] || self.subset[j * self.len + i]
    }
}

const PAIR_TABLE_LIMIT: usize = 4096;

/// Exhaustive scan of unordered pairs {G₁,G₂} × unordered pairs {G₃,G₄}.
/// With `prune` the seven conditions cut the scan (cheapest first: order and
/// containment, then the {1,2} intersection, then product closure, with the
/// global abelian/all-normal skip up front); without it every tuple gets the
/// full integer test. Both modes return the same violation set.
pub fn search_violations(
    group: &CayleyGroup,
    lattice: &SubgroupLattice,
    prune: bool,
) -> Result<SearchOutcome, IngletonError> {
    if !lattice.matches_parent(group) {
        return Err(LatticeError::ParentMismatch.into());
    }
    let len = lattice.len();
    if len > PAIR_TABLE_LIMIT {
        return Err(IngletonError::SearchTooLarge { subgroups: len });
    }

    if prune {
        if group.is_abelian() {
            return Ok(SearchOutcome {
                records: Vec::new(),
                raw_count: 0,
                pruned: true,
                skipped_globally: Some(Condition::Abelian),
                stats: SearchStats::default(),
            });
        }
        if lattice.members().iter().all(|m| is_normal(group, m)) {
            return Ok(SearchOutcome {
                records: Vec::new(),
                raw_count: 0,
                pruned: true,
                skipped_globally: Some(Condition::AllNormal),
                stats: SearchStats::default(),
            });
        }
    }

    let tables = PairTables::build(lattice);
    let orders: Vec<u64> = lattice.members().iter().map(|m| m.order() as u64).collect();
    let group_order = group.order() as u64;

    let pairs: Vec<(u32, u32)> = (0..len as u32)
        .flat_map(|a| (a..len as u32).map(move |b| (a, b)))
        .collect();

    // Inner-eligible pairs under the position-local cuts (C4, C5, C7 on
    // {3,4}); the unpruned scan keeps everything.
    let inner: Vec<(u32, u32)> = if prune {
        pairs
            .iter()
            .copied()
            .filter(|&(c, d)| {
                let (c, d) = (c as usize, d as usize);
                c != d
                    && orders[c] > 1
                    && orders[d] > 1
                    && orders[c] < group_order
                    && orders[d] < group_order
                    && !tables.nested(c, d)
            })
            .collect()
    } else {
        pairs.clone()
    };

    let per_pair: Vec<(Vec<ViolationRecord>, SearchStats)> = pairs
        .par_iter()
        .map(|&(a32, b32)| {
            let (a, b) = (a32 as usize, b32 as usize);
            let mut stats = SearchStats {
                outer_pairs: 1,
                ..SearchStats::default()
            };
            let mut records = Vec::new();

            if prune {
                if a == b {
                    stats.pruned_repeated += 1;
                    return (records, stats);
                }
                if orders[a] == 1 || orders[b] == 1 || orders[a] == group_order
                    || orders[b] == group_order
                {
                    stats.pruned_trivial_or_full += 1;
                    return (records, stats);
                }
                if tables.nested(a, b) {
                    stats.pruned_nested += 1;
                    return (records, stats);
                }
                if tables.inter(a, b) == 1 {
                    stats.pruned_trivial_meet += 1;
                    return (records, stats);
                }
                if set_product_closed(group, lattice.member(a), lattice.member(b))
                    .expect("same parent")
                {
                    stats.pruned_product_closed += 1;
                    return (records, stats);
                }
            }
            stats.outer_survivors = 1;

            let ab = lattice
                .member(a)
                .intersect(lattice.member(b))
                .expect("same parent");
            let lhs_base = orders[a] as u128 * orders[b] as u128;
            let rhs_base = tables.inter(a, b) as u128;

            for &(c32, d32) in &inner {
                let (c, d) = (c32 as usize, d32 as usize);
                if prune {
                    if a == c || a == d || b == c || b == d {
                        stats.pruned_repeated += 1;
                        continue;
                    }
                    if tables.nested(a, c)
                        || tables.nested(a, d)
                        || tables.nested(b, c)
                        || tables.nested(b, d)
                    {
                        stats.pruned_nested += 1;
                        continue;
                    }
                }
                stats.tuples_tested += 1;

                let g123 = ab.intersection_order(lattice.member(c)) as u128;
                let g124 = ab.intersection_order(lattice.member(d)) as u128;
                let lhs = lhs_base * tables.inter(c, d) as u128 * g123 * g124;
                let rhs = rhs_base
                    * tables.inter(a, c) as u128
                    * tables.inter(a, d) as u128
                    * tables.inter(b, c) as u128
                    * tables.inter(b, d) as u128;
                if lhs < rhs {
                    records.push(ViolationRecord {
                        indices: klein_canonical([a, b, c, d]),
                        lhs,
                        rhs,
                        deficit: lhs as i128 - rhs as i128,
                        canonical: true,
                    });
                }
            }
            (records, stats)
        })
        .collect();

    let mut records: Vec<ViolationRecord> = Vec::new();
    let mut stats = SearchStats::default();
    for (mut recs, s) in per_pair {
        records.append(&mut recs);
        stats.outer_pairs += s.outer_pairs;
        stats.outer_survivors += s.outer_survivors;
        stats.tuples_tested += s.tuples_tested;
        stats.pruned_trivial_or_full += s.pruned_trivial_or_full;
        stats.pruned_repeated += s.pruned_repeated;
        stats.pruned_nested += s.pruned_nested;
        stats.pruned_trivial_meet += s.pruned_trivial_meet;
        stats.pruned_product_closed += s.pruned_product_closed;
    }
    records.sort_by_key(|r| r.indices);
    let raw_count = records.iter().map(|r| r.orbit_size()).sum();

    Ok(SearchOutcome {
        records,
        raw_count,
        pruned: prune,
        skipped_globally: None,
        stats,
    })
}
