//! 2×2 matrix groups over 𝔽_q: GL(2,q) elements and the canonical
//! representatives used for PGL(2,q).
//!
//! Two invertible matrices represent the same PGL element exactly when one is
//! a nonzero scalar multiple of the other; scaling so the first nonzero
//! row-major entry equals 1 picks a unique representative, which turns coset
//! equality into plain entry equality.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{Field, FieldElem, FieldError};
use crate::group::{CayleyGroup, ConcreteElement, GroupError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProjError {
    #[error("matrix is singular")]
    Singular,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// An invertible 2×2 matrix over 𝔽_q, entries row-major.
#[derive(Clone)]
pub struct Mat2 {
    field: Arc<Field>,
    entries: [u16; 4],
}

impl Mat2 {
    pub fn new(entries: [FieldElem; 4]) -> Mat2 {
        let field = entries[0].field().clone();
        assert!(entries.iter().all(|e| e.field().same_field(&field)));
        Mat2 {
            entries: [
                entries[0].index() as u16,
                entries[1].index() as u16,
                entries[2].index() as u16,
                entries[3].index() as u16,
            ],
            field,
        }
    }

    pub fn from_ints(field: &Arc<Field>, rows: [[i64; 2]; 2]) -> Mat2 {
        Mat2::new([
            FieldElem::from_int(field, rows[0][0]),
            FieldElem::from_int(field, rows[0][1]),
            FieldElem::from_int(field, rows[1][0]),
            FieldElem::from_int(field, rows[1][1]),
        ])
    }

    pub fn identity(field: &Arc<Field>) -> Mat2 {
        Mat2::from_ints(field, [[1, 0], [0, 1]])
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn entry(&self, row: usize, col: usize) -> FieldElem {
        FieldElem::from_index(&self.field, self.entries[2 * row + col] as u32)
    }

    pub fn det(&self) -> FieldElem {
        let [a, b, c, d] = [
            self.entry(0, 0),
            self.entry(0, 1),
            self.entry(1, 0),
            self.entry(1, 1),
        ];
        a.mul(&d).sub(&b.mul(&c))
    }

    pub fn matmul(&self, other: &Mat2) -> Mat2 {
        assert!(self.field.same_field(&other.field));
        let s = |i: usize| FieldElem::from_index(&self.field, self.entries[i] as u32);
        let o = |i: usize| FieldElem::from_index(&self.field, other.entries[i] as u32);
        Mat2::new([
            s(0).mul(&o(0)).add(&s(1).mul(&o(2))),
            s(0).mul(&o(1)).add(&s(1).mul(&o(3))),
            s(2).mul(&o(0)).add(&s(3).mul(&o(2))),
            s(2).mul(&o(1)).add(&s(3).mul(&o(3))),
        ])
    }

    pub fn try_inverse(&self) -> Result<Mat2, ProjError> {
        let det = self.det();
        if det.is_zero() {
            return Err(ProjError::Singular);
        }
        let di = det.inv();
        Ok(Mat2::new([
            self.entry(1, 1).mul(&di),
            self.entry(0, 1).neg().mul(&di),
            self.entry(1, 0).neg().mul(&di),
            self.entry(0, 0).mul(&di),
        ]))
    }

    pub fn scale(&self, s: &FieldElem) -> Mat2 {
        Mat2::new([
            self.entry(0, 0).mul(s),
            self.entry(0, 1).mul(s),
            self.entry(1, 0).mul(s),
            self.entry(1, 1).mul(s),
        ])
    }

    pub fn label(&self) -> String {
        format!(
            "[[{},{}],[{},{}]]",
            self.entry(0, 0).label(),
            self.entry(0, 1).label(),
            self.entry(1, 0).label(),
            self.entry(1, 1).label()
        )
    }
}

impl PartialEq for Mat2 {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field) && self.entries == other.entries
    }
}

impl Eq for Mat2 {}

impl std::hash::Hash for Mat2 {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (
            self.field.characteristic(),
            self.field.extension_degree(),
            self.entries,
        )
            .hash(state);
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl ConcreteElement for Mat2 {
    fn identity_like(&self) -> Self {
        Mat2::identity(&self.field)
    }

    fn compose(&self, other: &Self) -> Self {
        self.matmul(other)
    }

    fn invert(&self) -> Self {
        self.try_inverse().expect("group elements are invertible")
    }

    fn label(&self) -> String {
        Mat2::label(self)
    }

    fn compatible(&self, other: &Self) -> bool {
        self.field.same_field(&other.field)
    }
}

/// A PGL(2,q) element as its canonical GL representative: the first nonzero
/// row-major entry equals 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjMat2 {
    inner: Mat2,
}

impl ProjMat2 {
    /// Canonicalizes an invertible matrix; idempotent.
    pub fn new(m: Mat2) -> Result<ProjMat2, ProjError> {
        if m.det().is_zero() {
            return Err(ProjError::Singular);
        }
        let first = (0..4)
            .map(|i| FieldElem::from_index(&m.field, m.entries[i] as u32))
            .find(|e| !e.is_zero())
            .expect("an invertible matrix has a nonzero entry");
        Ok(ProjMat2 {
            inner: m.scale(&first.inv()),
        })
    }

    pub fn from_ints(field: &Arc<Field>, rows: [[i64; 2]; 2]) -> Result<ProjMat2, ProjError> {
        ProjMat2::new(Mat2::from_ints(field, rows))
    }

    pub fn identity(field: &Arc<Field>) -> ProjMat2 {
        ProjMat2 {
            inner: Mat2::identity(field),
        }
    }

    pub fn representative(&self) -> &Mat2 {
        &self.inner
    }

    pub fn field(&self) -> &Arc<Field> {
        self.inner.field()
    }

    pub fn mul(&self, other: &ProjMat2) -> ProjMat2 {
        ProjMat2::new(self.inner.matmul(&other.inner)).expect("product of invertibles")
    }

    pub fn inverse(&self) -> ProjMat2 {
        ProjMat2::new(self.inner.try_inverse().expect("invertible")).unwrap()
    }

    /// Integer power, negative exponents via the inverse.
    pub fn pow(&self, e: i64) -> ProjMat2 {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = ProjMat2::identity(self.field());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// self^g = g⁻¹ · self · g.
    pub fn conj_by(&self, g: &ProjMat2) -> ProjMat2 {
        g.inverse().mul(self).mul(g)
    }

    pub fn label(&self) -> String {
        self.inner.label()
    }
}

impl fmt::Debug for ProjMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl ConcreteElement for ProjMat2 {
    fn identity_like(&self) -> Self {
        ProjMat2::identity(self.field())
    }

    fn compose(&self, other: &Self) -> Self {
        self.mul(other)
    }

    fn invert(&self) -> Self {
        self.inverse()
    }

    fn label(&self) -> String {
        ProjMat2::label(self)
    }

    fn compatible(&self, other: &Self) -> bool {
        self.field().same_field(other.field())
    }
}

/// All invertible matrices, ordered lexicographically by entry indices.
pub fn gl2_elements(field: &Arc<Field>) -> Vec<Mat2> {
    let q = field.size();
    let mut out = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    let m = Mat2 {
                        field: field.clone(),
                        entries: [a as u16, b as u16, c as u16, d as u16],
                    };
                    if !m.det().is_zero() {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// All canonical projective representatives, in the same ordering.
pub fn pgl2_elements(field: &Arc<Field>) -> Vec<ProjMat2> {
    gl2_elements(field)
        .into_iter()
        .filter(|m| {
            m.entries
                .iter()
                .find(|&&e| e != 0)
                .map(|&e| e == 1)
                .unwrap_or(false)
        })
        .map(|m| ProjMat2 { inner: m })
        .collect()
}

pub fn gl2_order(q: u64) -> u64 {
    (q * q - 1) * (q * q - q)
}

pub fn pgl2_order(q: u64) -> u64 {
    (q - 1) * q * (q + 1)
}

/// Materializes GL(2,q) from its full element set.
pub fn gl2_group(q: u32, cap: usize) -> Result<(CayleyGroup, Vec<Mat2>), ProjError> {
    let field = Field::new(q)?;
    if gl2_order(q as u64) > cap as u64 {
        return Err(GroupError::TooLarge { cap }.into());
    }
    let elems = gl2_elements(&field);
    let (group, ordered) =
        CayleyGroup::from_generators_with_elements(&elems, &format!("GL(2,{q})"), cap)?;
    Ok((group, ordered))
}

/// Materializes PGL(2,q) from its full set of canonical representatives.
pub fn pgl2_group(q: u32, cap: usize) -> Result<(CayleyGroup, Vec<ProjMat2>), ProjError> {
    let field = Field::new(q)?;
    if pgl2_order(q as u64) > cap as u64 {
        return Err(GroupError::TooLarge { cap }.into());
    }
    let elems = pgl2_elements(&field);
    let (group, ordered) =
        CayleyGroup::from_generators_with_elements(&elems, &format!("PGL(2,{q})"), cap)?;
    Ok((group, ordered))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_ORDER_CAP;
    use proptest::prelude::*;

    #[test]
    fn canonicalization_examples() {
        let f5 = Field::new(5).unwrap();
        let already = ProjMat2::from_ints(&f5, [[1, 2], [0, 1]]).unwrap();
        assert_eq!(ProjMat2::new(already.representative().clone()).unwrap(), already);

        // [[2,4],[0,2]] over F5 scales by 2⁻¹ = 3 to [[1,2],[0,1]].
        let m = ProjMat2::from_ints(&f5, [[2, 4], [0, 2]]).unwrap();
        assert_eq!(m, ProjMat2::from_ints(&f5, [[1, 2], [0, 1]]).unwrap());

        // Scalar matrices canonicalize to the identity.
        let scalar = ProjMat2::from_ints(&f5, [[4, 0], [0, 4]]).unwrap();
        assert_eq!(scalar, ProjMat2::identity(&f5));

        assert!(matches!(
            ProjMat2::from_ints(&f5, [[1, 2], [2, 4]]),
            Err(ProjError::Singular)
        ));
    }

    #[test]
    fn cube_of_c_is_projectively_trivial() {
        for p in [5u32, 7, 11, 13] {
            let f = Field::new(p).unwrap();
            let c = ProjMat2::from_ints(&f, [[1, (p as i64 - 1) / 2], [2, 0]]).unwrap();
            assert_eq!(c.pow(3), ProjMat2::identity(&f), "p={p}");
            assert_ne!(c.pow(2), ProjMat2::identity(&f));
        }
    }

    #[test]
    fn group_orders_match_formulas() {
        let (gl2_2, _) = gl2_group(2, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(gl2_2.order(), 6);
        let (pgl2_4, _) = pgl2_group(4, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(pgl2_4.order(), 60);
        let (pgl2_5, _) = pgl2_group(5, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(pgl2_5.order(), 120);

        for q in [2u32, 3, 4, 5, 7] {
            let (gl, _) = gl2_group(q, DEFAULT_ORDER_CAP).unwrap();
            let (pgl, _) = pgl2_group(q, DEFAULT_ORDER_CAP).unwrap();
            assert_eq!(gl.order() as u64, gl2_order(q as u64));
            assert_eq!(pgl.order() as u64, pgl2_order(q as u64));
            assert_eq!(pgl.order() as u64, gl.order() as u64 / (q as u64 - 1));
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            pgl2_group(23, DEFAULT_ORDER_CAP),
            Err(ProjError::Group(GroupError::TooLarge { .. }))
        ));
        assert!(matches!(
            gl2_group(11, DEFAULT_ORDER_CAP),
            Err(ProjError::Group(GroupError::TooLarge { .. }))
        ));
    }

    proptest! {
        #[test]
        fn canonicalization_respects_multiplication(
            q in prop::sample::select(vec![2u32, 3, 4, 5, 7, 9]),
            raw in proptest::collection::vec(0u32..64, 8),
        ) {
            let f = Field::new(q).unwrap();
            let m = Mat2::new([
                FieldElem::from_index(&f, raw[0] % q),
                FieldElem::from_index(&f, raw[1] % q),
                FieldElem::from_index(&f, raw[2] % q),
                FieldElem::from_index(&f, raw[3] % q),
            ]);
            let n = Mat2::new([
                FieldElem::from_index(&f, raw[4] % q),
                FieldElem::from_index(&f, raw[5] % q),
                FieldElem::from_index(&f, raw[6] % q),
                FieldElem::from_index(&f, raw[7] % q),
            ]);
            prop_assume!(!m.det().is_zero() && !n.det().is_zero());
            let lhs = ProjMat2::new(m.matmul(&n)).unwrap();
            let rhs = ProjMat2::new(m.clone()).unwrap().mul(&ProjMat2::new(n.clone()).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
