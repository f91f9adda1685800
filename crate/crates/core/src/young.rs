//! The bridge between distributions and groups.
//!
//! A rational distribution with T·pᵢ integral has the block-permutation
//! subgroup of S_T of order ∏(T·pᵢ)!, and (1/T)·log₂(T!/∏(T·pᵢ)!) is a lower
//! approximation of the entropy that tightens as T grows. The coset oracle at
//! the bottom tabulates the exact joint distribution of coset labels
//! X_i = ΛG_i for uniform Λ and checks it against log₂(|G|/|G_α|).

use std::collections::HashMap;

use num::bigint::BigUint;
use num::rational::Ratio;
use num::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::group::CayleyGroup;
use crate::ingleton::GroupVector;
use crate::lattice::{LatticeError, SubgroupSet};
use crate::perm::{symmetric_generators, Permutation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum YoungError {
    #[error("masses must be positive and sum to exactly 1 (sum = {0})")]
    NotADistribution(String),
    #[error("T*p is not an integer at index {index}: T = {t}, p = {mass}")]
    NonIntegralCount { index: usize, t: u64, mass: String },
    #[error("invalid rational {0:?}")]
    BadRational(String),
    #[error("materialized path supports T <= {cap}, got {t}")]
    TooLarge { t: u64, cap: u64 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A probability distribution with exact rational masses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    masses: Vec<Ratio<u64>>,
}

impl Distribution {
    pub fn new(masses: Vec<Ratio<u64>>) -> Result<Distribution, YoungError> {
        let sum: Ratio<u64> = masses.iter().sum();
        if masses.is_empty() || masses.iter().any(|m| m.is_zero()) || !sum.is_one() {
            return Err(YoungError::NotADistribution(format!("{sum}")));
        }
        Ok(Distribution { masses })
    }

    /// Parses a comma-separated list of rationals like `1/2,1/4,1/4`.
    pub fn parse(text: &str) -> Result<Distribution, YoungError> {
        let masses = text
            .split(',')
            .map(|part| {
                let part = part.trim();
                let (num, den) = match part.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (part, "1"),
                };
                let n: u64 = num
                    .parse()
                    .map_err(|_| YoungError::BadRational(part.to_string()))?;
                let d: u64 = den
                    .parse()
                    .map_err(|_| YoungError::BadRational(part.to_string()))?;
                if d == 0 {
                    return Err(YoungError::BadRational(part.to_string()));
                }
                Ok(Ratio::new(n, d))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Distribution::new(masses)
    }

    pub fn masses(&self) -> &[Ratio<u64>] {
        &self.masses
    }

    pub fn support(&self) -> usize {
        self.masses.len()
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        self.masses
            .iter()
            .map(|m| {
                let p = *m.numer() as f64 / *m.denom() as f64;
                -p * p.log2()
            })
            .sum()
    }

    /// The counts T·pᵢ, or an error naming the first non-integral index.
    pub fn counts(&self, t: u64) -> Result<Vec<u64>, YoungError> {
        self.masses
            .iter()
            .enumerate()
            .map(|(index, m)| {
                let scaled = m * Ratio::from_integer(t);
                if scaled.is_integer() {
                    Ok(scaled.to_integer())
                } else {
                    Err(YoungError::NonIntegralCount {
                        index,
                        t,
                        mass: format!("{m}"),
                    })
                }
            })
            .collect()
    }
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// log₂ of a positive big integer, via its leading 64 bits.
pub fn log2_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return n.to_u64().unwrap().to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().unwrap();
    (top as f64).log2() + shift as f64
}

/// The exact multinomial T! / ∏(T·pᵢ)!.
pub fn multinomial(d: &Distribution, t: u64) -> Result<BigUint, YoungError> {
    let counts = d.counts(t)?;
    let denom: BigUint = counts.iter().map(|&c| factorial(c)).product();
    Ok(factorial(t) / denom)
}

/// (1/T)·log₂ of the multinomial: a lower approximation of the entropy,
/// within (N−1)·log₂(T+1)/T of it.
pub fn young_approx_entropy(d: &Distribution, t: u64) -> Result<f64, YoungError> {
    Ok(log2_biguint(&multinomial(d, t)?) / t as f64)
}

/// Order of the block-permutation subgroup, ∏(T·pᵢ)!.
pub fn young_subgroup_order(d: &Distribution, t: u64) -> Result<BigUint, YoungError> {
    Ok(d.counts(t)?.iter().map(|&c| factorial(c)).product())
}

const MATERIALIZE_CAP: u64 = 8;

/// Materializes S_T and the block-permutation subgroup by explicit closure
/// and packages them as a single-subgroup vector. Cross-checks the closure
/// orders against the factorial formulas.
pub fn young_subgroup_vector(d: &Distribution, t: u64) -> Result<GroupVector, YoungError> {
    if t > MATERIALIZE_CAP {
        return Err(YoungError::TooLarge {
            t,
            cap: MATERIALIZE_CAP,
        });
    }
    let counts = d.counts(t)?;
    let degree = t as usize;

    let ambient = closure_size(&symmetric_generators(degree));
    let t_factorial = factorial(t)
        .to_u64()
        .expect("8! fits comfortably in u64");
    assert_eq!(ambient as u64, t_factorial, "S_T closure disagrees with T!");

    // Block generators: for each block of consecutive points, a transposition
    // and a full block cycle.
    let mut gens: Vec<Permutation> = Vec::new();
    let mut start = 1usize; // 1-based point
    for &c in &counts {
        let c = c as usize;
        if c >= 2 {
            let swap = format!("({},{})", start, start + 1);
            gens.push(Permutation::parse(&swap, degree).unwrap());
            if c > 2 {
                let cycle: Vec<String> = (start..start + c).map(|p| p.to_string()).collect();
                let text = format!("({})", cycle.join(","));
                gens.push(Permutation::parse(&text, degree).unwrap());
            }
        }
        start += c;
    }
    if gens.is_empty() {
        gens.push(Permutation::identity(degree));
    }
    let sub_order = closure_size(&gens) as u64;
    let formula = young_subgroup_order(d, t)?
        .to_u64()
        .expect("subgroup of S_8 fits in u64");
    assert_eq!(sub_order, formula, "closure disagrees with the factorial formula");

    let v = GroupVector::from_parts(t_factorial, vec![sub_order], 1);
    let h1 = v.entropy_vector()[0];
    let approx = young_approx_entropy(d, t)?;
    assert!(
        (h1 - t as f64 * approx).abs() <= 1e-9,
        "h1 = {h1} vs T*approx = {}",
        t as f64 * approx
    );
    Ok(v)
}

fn closure_size(gens: &[Permutation]) -> usize {
    use std::collections::HashSet;
    let mut set: HashSet<Permutation> = HashSet::new();
    let identity = Permutation::identity(gens[0].degree());
    let mut queue = vec![identity.clone()];
    set.insert(identity);
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head].clone();
        head += 1;
        for g in gens {
            let y = x.compose(g);
            if set.insert(y.clone()) {
                queue.push(y);
            }
        }
    }
    set.len()
}

/// Exact Shannon entropy (bits) of the joint coset labels (ΛG_i : i ∈ α)
/// for Λ uniform on G, by explicit tabulation. Must equal log₂(|G|/|G_α|).
pub fn coset_entropy_oracle(
    group: &CayleyGroup,
    chosen: &[&SubgroupSet],
    alpha_mask: u32,
) -> Result<f64, YoungError> {
    assert!(alpha_mask != 0, "alpha must be a nonempty subset");
    for sub in chosen {
        if !sub.matches_parent(group) {
            return Err(LatticeError::ParentMismatch.into());
        }
    }
    let picked: Vec<&SubgroupSet> = chosen
        .iter()
        .enumerate()
        .filter(|(i, _)| alpha_mask >> i & 1 == 1)
        .map(|(_, s)| *s)
        .collect();
    assert!(
        alpha_mask < (1 << chosen.len()),
        "alpha refers to a missing subgroup"
    );

    let members: Vec<Vec<u32>> = picked.iter().map(|s| s.iter().collect()).collect();
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    for lam in group.elements() {
        // Canonical coset id: the minimal element index of ΛG_i.
        let label: Vec<u32> = members
            .iter()
            .map(|ms| ms.iter().map(|&h| group.mul(lam, h)).min().unwrap())
            .collect();
        *counts.entry(label).or_insert(0) += 1;
    }
    let n = group.order() as f64;
    Ok(counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum())
}
