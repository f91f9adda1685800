//! Arithmetic in the finite fields 𝔽_q for small prime powers q = p^k.
//!
//! Elements are indices into precomputed operation tables. The index encodes
//! the coefficient vector of the residue polynomial in base p, constant term
//! first, reduced modulo the lexicographically smallest monic irreducible of
//! degree k (so each q has exactly one field object up to equality).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("q must be a prime power >= 2, got {0}")]
    NotPrimePower(u32),
    #[error("field too large: q = {0} exceeds 256")]
    TooLarge(u32),
    #[error("no primitive root exists for q = {0} < 3")]
    NoPrimitiveRoot(u32),
}

pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, constant term first, length k+1. Empty for k = 1.
    irreducible: Vec<u32>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl Field {
    pub fn new(q: u32) -> Result<Arc<Field>, FieldError> {
        if q < 2 {
            return Err(FieldError::NotPrimePower(q));
        }
        if q > 256 {
            return Err(FieldError::TooLarge(q));
        }
        let p = (2..=q).find(|d| q % d == 0).unwrap();
        let mut k = 0u32;
        let mut m = q;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        if m != 1 {
            return Err(FieldError::NotPrimePower(q));
        }

        let irreducible = if k == 1 {
            Vec::new()
        } else {
            smallest_irreducible(p, k)
        };

        let qu = q as usize;
        let mut add = vec![0u16; qu * qu];
        let mut mul = vec![0u16; qu * qu];
        for a in 0..q {
            for b in 0..q {
                let ad = digits(a, p, k);
                let bd = digits(b, p, k);
                let sum: Vec<u32> = ad.iter().zip(&bd).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = index_of(&sum, p) as u16;
                let prod = poly_mul_mod(&ad, &bd, &irreducible, p, k);
                mul[(a * q + b) as usize] = index_of(&prod, p) as u16;
            }
        }
        let mut neg = vec![0u16; qu];
        let mut inv = vec![0u16; qu];
        for a in 0..q {
            neg[a as usize] = (0..q)
                .find(|&b| add[(a * q + b) as usize] == 0)
                .unwrap() as u16;
            if a != 0 {
                inv[a as usize] = (1..q)
                    .find(|&b| mul[(a * q + b) as usize] == 1)
                    .expect("nonzero element has an inverse") as u16;
            }
        }

        Ok(Arc::new(Field {
            p,
            k,
            q,
            irreducible,
            add,
            mul,
            neg,
            inv,
        }))
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn extension_degree(&self) -> u32 {
        self.k
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    pub fn irreducible(&self) -> &[u32] {
        &self.irreducible
    }

    pub fn same_field(&self, other: &Field) -> bool {
        self.p == other.p && self.k == other.k
    }
}

/// One element of 𝔽_q, carrying its field.
#[derive(Clone)]
pub struct FieldElem {
    field: Arc<Field>,
    idx: u16,
}

impl FieldElem {
    pub fn zero(field: &Arc<Field>) -> Self {
        FieldElem {
            field: field.clone(),
            idx: 0,
        }
    }

    pub fn one(field: &Arc<Field>) -> Self {
        FieldElem {
            field: field.clone(),
            idx: 1,
        }
    }

    pub fn from_index(field: &Arc<Field>, idx: u32) -> Self {
        assert!(idx < field.q);
        FieldElem {
            field: field.clone(),
            idx: idx as u16,
        }
    }

    /// Embeds an integer via reduction mod p (constant polynomial).
    pub fn from_int(field: &Arc<Field>, value: i64) -> Self {
        let r = value.rem_euclid(field.p as i64) as u16;
        FieldElem {
            field: field.clone(),
            idx: r,
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn index(&self) -> u32 {
        self.idx as u32
    }

    /// Coefficients of the residue polynomial, constant term first.
    pub fn coeffs(&self) -> Vec<u32> {
        digits(self.idx as u32, self.field.p, self.field.k)
    }

    pub fn is_zero(&self) -> bool {
        self.idx == 0
    }

    pub fn add(&self, other: &FieldElem) -> FieldElem {
        self.binop(other, &self.field.add)
    }

    pub fn sub(&self, other: &FieldElem) -> FieldElem {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElem) -> FieldElem {
        self.binop(other, &self.field.mul)
    }

    pub fn neg(&self) -> FieldElem {
        FieldElem {
            field: self.field.clone(),
            idx: self.field.neg[self.idx as usize],
        }
    }

    pub fn inv(&self) -> FieldElem {
        assert!(!self.is_zero(), "zero has no multiplicative inverse");
        FieldElem {
            field: self.field.clone(),
            idx: self.field.inv[self.idx as usize],
        }
    }

    pub fn pow(&self, e: u64) -> FieldElem {
        let mut acc = FieldElem::one(&self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Order in the multiplicative group; element must be nonzero.
    pub fn multiplicative_order(&self) -> u32 {
        assert!(!self.is_zero());
        let mut acc = self.clone();
        let mut m = 1u32;
        while acc.idx != 1 {
            acc = acc.mul(self);
            m += 1;
        }
        m
    }

    fn binop(&self, other: &FieldElem, table: &[u16]) -> FieldElem {
        assert!(
            self.field.same_field(&other.field),
            "elements from different fields"
        );
        FieldElem {
            field: self.field.clone(),
            idx: table[self.idx as usize * self.field.q as usize + other.idx as usize],
        }
    }

    pub fn label(&self) -> String {
        if self.field.k == 1 {
            return self.idx.to_string();
        }
        let coeffs = self.coeffs();
        let mut terms: Vec<String> = Vec::new();
        for i in (0..coeffs.len()).rev() {
            let c = coeffs[i];
            if c == 0 {
                continue;
            }
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, 1) => "x".into(),
                (_, 1) => format!("{c}x"),
                (1, _) => format!("x^{i}"),
                (_, _) => format!("{c}x^{i}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field) && self.idx == other.idx
    }
}

impl Eq for FieldElem {}

impl std::hash::Hash for FieldElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.field.p, self.field.k, self.idx).hash(state);
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}∈F{}", self.label(), self.field.q)
    }
}

/// Smallest generator of 𝔽_q^× in coefficient-lexicographic order
/// (plain integer order 1..p-1 when q is prime).
pub fn find_primitive_root(field: &Arc<Field>) -> Result<FieldElem, FieldError> {
    if field.q < 3 {
        return Err(FieldError::NoPrimitiveRoot(field.q));
    }
    for idx in lex_order(field.p, field.k) {
        if idx == 0 {
            continue;
        }
        let e = FieldElem::from_index(field, idx);
        if e.multiplicative_order() == field.q - 1 {
            return Ok(e);
        }
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}

/// Element indices sorted by coefficient vectors lexicographically,
/// constant term most significant.
fn lex_order(p: u32, k: u32) -> Vec<u32> {
    let q = p.pow(k);
    let mut order: Vec<u32> = (0..q).collect();
    order.sort_by_key(|&idx| digits(idx, p, k));
    order
}

fn digits(idx: u32, p: u32, k: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(k as usize);
    let mut r = idx;
    for _ in 0..k {
        v.push(r % p);
        r /= p;
    }
    v
}

fn index_of(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Product of two residues, reduced by the monic modulus (constant-first).
fn poly_mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32, k: u32) -> Vec<u32> {
    let k = k as usize;
    if modulus.is_empty() {
        // k == 1: plain mod-p multiplication.
        return vec![(a[0] * b[0]) % p];
    }
    let mut prod = vec![0u32; 2 * k - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // Reduce using x^k = -(modulus without leading term).
    for d in (k..prod.len()).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        for (i, &m) in modulus[..k].iter().enumerate() {
            let sub = (c * m) % p;
            prod[d - k + i] = (prod[d - k + i] + p - sub) % p;
        }
    }
    prod.truncate(k);
    prod
}

fn poly_rem(dividend: &[u32], divisor: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = dividend.to_vec();
    let dd = divisor.len() - 1;
    let lead_inv = mod_inverse(divisor[dd], p);
    while r.len() > dd {
        let c = *r.last().unwrap();
        if c != 0 {
            let f = (c * lead_inv) % p;
            let shift = r.len() - 1 - dd;
            for (i, &m) in divisor.iter().enumerate() {
                let sub = (f * m) % p;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    r
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    (1..p).find(|&b| (a * b) % p == 1).expect("p prime, a != 0")
}

fn is_zero_poly(v: &[u32]) -> bool {
    v.iter().all(|&c| c == 0)
}

/// Lexicographically smallest monic irreducible of degree k over 𝔽_p,
/// comparing coefficient vectors constant term first.
fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    let k = k as usize;
    let count = (p as u64).pow(k as u32);
    for rank in 0..count {
        // Decode rank as big-endian digits so c0 varies slowest.
        let mut c = vec![0u32; k];
        let mut r = rank;
        for i in (0..k).rev() {
            c[i] = (r % p as u64) as u32;
            r /= p as u64;
        }
        let mut poly = c.clone();
        poly.push(1);
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    if poly[0] == 0 {
        return false; // divisible by x
    }
    // Trial division by every monic polynomial of degree 1..=deg/2.
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for rank in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut r = rank;
            for _ in 0..d {
                divisor.push((r % p as u64) as u32);
                r /= p as u64;
            }
            divisor.push(1);
            if is_zero_poly(&poly_rem(poly, &divisor, p)) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recognizes_prime_powers() {
        for q in [2u32, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 25, 27] {
            assert!(Field::new(q).is_ok(), "q={q}");
        }
        for q in [0u32, 1, 6, 10, 12, 15, 18] {
            assert!(matches!(Field::new(q), Err(FieldError::NotPrimePower(_))), "q={q}");
        }
        assert!(matches!(Field::new(512), Err(FieldError::TooLarge(_))));
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(Field::new(4).unwrap().irreducible(), &[1, 1, 1]); // x²+x+1
        assert_eq!(Field::new(9).unwrap().irreducible(), &[1, 0, 1]); // x²+1
        assert_eq!(Field::new(8).unwrap().irreducible(), &[1, 0, 1, 1]); // x³+x²+1
    }

    #[test]
    fn field_axioms_hold_exhaustively() {
        for q in [2u32, 3, 4, 5, 7, 8, 9, 16] {
            let f = Field::new(q).unwrap();
            let el = |i: u32| FieldElem::from_index(&f, i);
            for a in 0..q {
                let ea = el(a);
                assert_eq!(ea.add(&el(0)), ea, "additive identity, q={q}");
                assert_eq!(ea.mul(&el(1)), ea, "multiplicative identity, q={q}");
                assert!(ea.add(&ea.neg()).is_zero());
                if a != 0 {
                    assert_eq!(ea.mul(&ea.inv()).index(), 1);
                    assert_eq!(ea.pow((q - 1) as u64).index(), 1, "x^(q-1)=1, q={q}");
                }
                for b in 0..q {
                    let eb = el(b);
                    assert_eq!(ea.add(&eb), eb.add(&ea));
                    assert_eq!(ea.mul(&eb), eb.mul(&ea));
                    for c in 0..q {
                        let ec = el(c);
                        assert_eq!(ea.add(&eb).add(&ec), ea.add(&eb.add(&ec)));
                        assert_eq!(ea.mul(&eb).mul(&ec), ea.mul(&eb.mul(&ec)));
                        assert_eq!(
                            ea.mul(&eb.add(&ec)),
                            ea.mul(&eb).add(&ea.mul(&ec)),
                            "distributivity, q={q}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicative_group_is_cyclic() {
        for q in [3u32, 4, 5, 7, 8, 9, 16] {
            let f = Field::new(q).unwrap();
            let root = find_primitive_root(&f).unwrap();
            assert_eq!(root.multiplicative_order(), q - 1, "q={q}");
        }
    }

    #[test]
    fn primitive_roots_for_small_primes() {
        let root = |q: u32| find_primitive_root(&Field::new(q).unwrap()).unwrap().index();
        assert_eq!(root(5), 2); // powers of 2 mod 5: 2,4,3,1
        assert_eq!(root(7), 3); // powers of 3 mod 7: 3,2,6,4,5,1
        assert_eq!(root(3), 2);
        assert!(matches!(
            find_primitive_root(&Field::new(2).unwrap()),
            Err(FieldError::NoPrimitiveRoot(2))
        ));
    }

    #[test]
    fn integer_embedding_handles_negatives() {
        let f = Field::new(7).unwrap();
        assert_eq!(FieldElem::from_int(&f, -1).index(), 6);
        assert_eq!(FieldElem::from_int(&f, -9).index(), 5);
        assert_eq!(FieldElem::from_int(&f, 14).index(), 0);
    }

    #[test]
    fn labels() {
        let f9 = Field::new(9).unwrap();
        assert_eq!(FieldElem::from_index(&f9, 0).label(), "0");
        assert_eq!(FieldElem::from_index(&f9, 2).label(), "2");
        assert_eq!(FieldElem::from_index(&f9, 3).label(), "x");
        assert_eq!(FieldElem::from_index(&f9, 5).label(), "x+2");
        assert_eq!(FieldElem::from_index(&f9, 7).label(), "2x+1");
        let f5 = Field::new(5).unwrap();
        assert_eq!(FieldElem::from_index(&f5, 4).label(), "4");
    }
}
