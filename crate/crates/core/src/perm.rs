//! Permutations with cycle-notation I/O, plus generator sets for the
//! catalog families `S<n>`, `D<2n>` and `Z<n>`.
//!
//! Points are 1-based in all input and output, 0-based in storage.
//! Composition is left-to-right: `a.compose(&b)` is the permutation that
//! applies `a` first and `b` second. Under this convention the conjugate
//! `x^g = g⁻¹xg` relabels the points of `x` through `g`, which is the
//! convention the rest of the crate relies on.

use std::fmt;

use thiserror::Error;

use crate::group::ConcreteElement;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("parse error at byte {pos}: point {point} out of range 1..={degree}")]
    OutOfRange { pos: usize, point: usize, degree: usize },
    #[error("parse error at byte {pos}: point {point} repeated within one cycle")]
    Repeated { pos: usize, point: usize },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("dihedral family needs a positive even order, got {0}")]
    BadDihedralOrder(usize),
}

/// A permutation of `{1, …, degree}` stored as an image table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            image: (0..degree as u32).collect(),
        }
    }

    /// Builds the single cycle over the given 0-based points.
    fn from_cycle(points: &[u32], degree: usize) -> Self {
        let mut p = Permutation::identity(degree);
        for w in points.windows(2) {
            p.image[w[0] as usize] = w[1];
        }
        if points.len() > 1 {
            p.image[points[points.len() - 1] as usize] = points[0];
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &m)| i as u32 == m)
    }

    /// 1-based image of a 1-based point.
    pub fn image_of(&self, point: usize) -> usize {
        self.image[point - 1] as usize + 1
    }

    /// Left-to-right composition: apply `self`, then `other`.
    ///
    /// Panics on degree mismatch; use [`Permutation::try_compose`] when the
    /// degrees are not already known to agree.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(
            self.degree(),
            other.degree(),
            "cannot compose permutations of different degrees"
        );
        Permutation {
            image: self
                .image
                .iter()
                .map(|&m| other.image[m as usize])
                .collect(),
        }
    }

    pub fn try_compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.compose(other))
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0u32; self.degree()];
        for (i, &m) in self.image.iter().enumerate() {
            image[m as usize] = i as u32;
        }
        Permutation { image }
    }

    /// Parses cycle notation. Grammar: `cycle*` or exactly `"()"`, with
    /// `cycle := "(" int ("," int)+ ")"` and whitespace ignored between
    /// tokens. Cycles need not be disjoint; they compose left-to-right.
    pub fn parse(text: &str, degree: usize) -> Result<Permutation, PermError> {
        let b = text.as_bytes();
        let mut i = 0usize;
        let mut acc = Permutation::identity(degree);
        let mut tokens = 0usize;
        let mut empty_at: Option<usize> = None;

        skip_ws(b, &mut i);
        while i < b.len() {
            if b[i] != b'(' {
                return Err(PermError::Parse {
                    pos: i,
                    msg: "expected '('".into(),
                });
            }
            let open = i;
            i += 1;
            skip_ws(b, &mut i);
            if i < b.len() && b[i] == b')' {
                i += 1;
                empty_at.get_or_insert(open);
                tokens += 1;
                skip_ws(b, &mut i);
                continue;
            }
            let mut cycle: Vec<u32> = Vec::new();
            loop {
                skip_ws(b, &mut i);
                let start = i;
                let point = parse_uint(b, &mut i).ok_or_else(|| PermError::Parse {
                    pos: start,
                    msg: "expected a point".into(),
                })?;
                if point < 1 || point > degree {
                    return Err(PermError::OutOfRange {
                        pos: start,
                        point,
                        degree,
                    });
                }
                let p0 = (point - 1) as u32;
                if cycle.contains(&p0) {
                    return Err(PermError::Repeated { pos: start, point });
                }
                cycle.push(p0);
                skip_ws(b, &mut i);
                match b.get(i) {
                    Some(b',') => i += 1,
                    Some(b')') => {
                        i += 1;
                        break;
                    }
                    Some(_) => {
                        return Err(PermError::Parse {
                            pos: i,
                            msg: "expected ',' or ')'".into(),
                        })
                    }
                    None => {
                        return Err(PermError::Parse {
                            pos: i,
                            msg: "unclosed cycle".into(),
                        })
                    }
                }
            }
            if cycle.len() < 2 {
                return Err(PermError::Parse {
                    pos: open,
                    msg: "a cycle needs at least two points".into(),
                });
            }
            acc = acc.compose(&Permutation::from_cycle(&cycle, degree));
            tokens += 1;
            skip_ws(b, &mut i);
        }
        if let Some(pos) = empty_at {
            if tokens != 1 {
                return Err(PermError::Parse {
                    pos,
                    msg: "\"()\" must stand alone".into(),
                });
            }
        }
        Ok(acc)
    }

    /// Disjoint-cycle form, cycles sorted by smallest moved point; the
    /// identity prints as `()`.
    pub fn cycle_notation(&self) -> String {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.image[start] as usize == start {
                continue;
            }
            out.push('(');
            let mut p = start;
            let mut first = true;
            loop {
                seen[p] = true;
                if !first {
                    out.push(',');
                }
                out.push_str(&(p + 1).to_string());
                first = false;
                p = self.image[p] as usize;
                if p == start {
                    break;
                }
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycle_notation())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.cycle_notation(), self.degree())
    }
}

impl ConcreteElement for Permutation {
    fn identity_like(&self) -> Self {
        Permutation::identity(self.degree())
    }

    fn compose(&self, other: &Self) -> Self {
        Permutation::compose(self, other)
    }

    fn invert(&self) -> Self {
        self.inverse()
    }

    fn label(&self) -> String {
        self.cycle_notation()
    }

    fn compatible(&self, other: &Self) -> bool {
        self.degree() == other.degree()
    }
}

fn skip_ws(b: &[u8], i: &mut usize) {
    while *i < b.len() && b[*i].is_ascii_whitespace() {
        *i += 1;
    }
}

fn parse_uint(b: &[u8], i: &mut usize) -> Option<usize> {
    let start = *i;
    while *i < b.len() && b[*i].is_ascii_digit() {
        *i += 1;
    }
    if *i == start {
        return None;
    }
    std::str::from_utf8(&b[start..*i]).ok()?.parse().ok()
}

fn full_cycle(n: usize) -> Permutation {
    Permutation::from_cycle(&(0..n as u32).collect::<Vec<_>>(), n)
}

/// Standard generators of `S_n`: the transposition `(1,2)` and the n-cycle.
pub fn symmetric_generators(n: usize) -> Vec<Permutation> {
    assert!(n >= 1, "S_n needs n >= 1");
    match n {
        1 => vec![Permutation::identity(1)],
        2 => vec![Permutation::from_cycle(&[0, 1], 2)],
        _ => vec![Permutation::from_cycle(&[0, 1], n), full_cycle(n)],
    }
}

/// Standard generators of the cyclic group of order `n` as the n-cycle.
pub fn cyclic_generators(n: usize) -> Vec<Permutation> {
    assert!(n >= 1, "Z_n needs n >= 1");
    if n == 1 {
        vec![Permutation::identity(1)]
    } else {
        vec![full_cycle(n)]
    }
}

/// Generators of the dihedral group of the given (even) order: the rotation
/// `(1,…,n)` and the reflection fixing point 1. The degenerate orders 2 and 4
/// have no faithful action on 1 resp. 2 points, so they use `(1,2)` and
/// `(1,2)`,`(3,4)` instead.
pub fn dihedral_generators(order: usize) -> Result<Vec<Permutation>, PermError> {
    if order == 0 || order % 2 != 0 {
        return Err(PermError::BadDihedralOrder(order));
    }
    let n = order / 2;
    Ok(match n {
        1 => vec![Permutation::from_cycle(&[0, 1], 2)],
        2 => vec![
            Permutation::from_cycle(&[0, 1], 4),
            Permutation::from_cycle(&[2, 3], 4),
        ],
        _ => {
            let mut image: Vec<u32> = (0..n as u32).collect();
            for j in 1..n {
                image[j] = (n - j) as u32;
            }
            vec![full_cycle(n), Permutation { image }]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(text: &str, degree: usize) -> Permutation {
        Permutation::parse(text, degree).unwrap()
    }

    #[test]
    fn parses_a_three_cycle() {
        let c = p("(3,4,5)", 5);
        assert_eq!(c.image_of(3), 4);
        assert_eq!(c.image_of(4), 5);
        assert_eq!(c.image_of(5), 3);
        assert_eq!(c.image_of(1), 1);
        assert_eq!(c.image_of(2), 2);
    }

    #[test]
    fn parses_the_identity_and_empty() {
        assert!(p("()", 5).is_identity());
        assert!(p("", 5).is_identity());
        assert!(p("   ", 5).is_identity());
    }

    #[test]
    fn parses_disjoint_cycles() {
        let x = p("(1,2)(4,5)", 5);
        assert_eq!(x.image_of(1), 2);
        assert_eq!(x.image_of(2), 1);
        assert_eq!(x.image_of(4), 5);
        assert_eq!(x.image_of(5), 4);
        assert_eq!(x.image_of(3), 3);
        assert!(x.compose(&x).is_identity());
    }

    #[test]
    fn non_disjoint_cycles_compose_left_to_right() {
        // (1,2) then (1,3): 1->2, 2->1->3, 3->1.
        let x = p("(1,2)(1,3)", 3);
        assert_eq!(x.image_of(1), 2);
        assert_eq!(x.image_of(2), 3);
        assert_eq!(x.image_of(3), 1);
    }

    #[test]
    fn parse_errors_carry_positions() {
        match Permutation::parse("(1,2)(3,9)", 5) {
            Err(PermError::OutOfRange { pos, point, degree }) => {
                assert_eq!((pos, point, degree), (8, 9, 5));
            }
            other => panic!("unexpected: {other:?}"),
        }
        match Permutation::parse("(1,2,1)", 5) {
            Err(PermError::Repeated { pos, point }) => assert_eq!((pos, point), (5, 1)),
            other => panic!("unexpected: {other:?}"),
        }
        match Permutation::parse("(1,2", 5) {
            Err(PermError::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected: {other:?}"),
        }
        match Permutation::parse("(3)", 5) {
            Err(PermError::Parse { pos, .. }) => assert_eq!(pos, 0),
            other => panic!("unexpected: {other:?}"),
        }
        assert!(Permutation::parse("()(1,2)", 5).is_err());
        assert!(Permutation::parse("x", 5).is_err());
    }

    #[test]
    fn compose_and_inverse() {
        let c = p("(3,4,5)", 5);
        assert!(c.compose(&c).compose(&c).is_identity());
        let t = p("(1,2)", 5);
        assert!(t.compose(&t).is_identity());
        let a = p("(1,3,4,2)", 5);
        assert!(a.compose(&a.inverse()).is_identity());
        assert_eq!(a.compose(&Permutation::identity(5)), a);
    }

    #[test]
    fn conjugation_relabels_points() {
        // g⁻¹xg with x=(1,3,4,2), g=(3,4,5) relabels the cycle through g.
        let x = p("(1,3,4,2)", 5);
        let g = p("(3,4,5)", 5);
        let conj = g.inverse().compose(&x).compose(&g);
        assert_eq!(conj, p("(1,4,5,2)", 5));
        assert_eq!(conj, p("(1,2,5,4)", 5).inverse());
    }

    #[test]
    fn cycle_notation_is_sorted_and_round_trips() {
        let x = p("(4,5)(1,2)", 5);
        assert_eq!(x.cycle_notation(), "(1,2)(4,5)");
        assert_eq!(Permutation::identity(3).cycle_notation(), "()");
        let degree = 6;
        let y = p("(2,6,3)(1,4)", degree);
        assert_eq!(Permutation::parse(&y.cycle_notation(), degree).unwrap(), y);
    }

    #[test]
    fn catalog_generator_shapes() {
        assert_eq!(symmetric_generators(5).len(), 2);
        assert_eq!(symmetric_generators(1)[0].degree(), 1);
        assert_eq!(cyclic_generators(7)[0].cycle_notation(), "(1,2,3,4,5,6,7)");
        let d8 = dihedral_generators(8).unwrap();
        assert_eq!(d8[0].cycle_notation(), "(1,2,3,4)");
        assert_eq!(d8[1].cycle_notation(), "(2,4)");
        assert!(dihedral_generators(7).is_err());
        assert!(dihedral_generators(0).is_err());
    }

    proptest! {
        #[test]
        fn format_then_parse_round_trips(
            image in (1usize..=8)
                .prop_flat_map(|d| Just((0..d as u32).collect::<Vec<u32>>()).prop_shuffle())
        ) {
            let q = Permutation { image };
            let text = q.cycle_notation();
            prop_assert_eq!(Permutation::parse(&text, q.degree()).unwrap(), q);
        }

        #[test]
        fn composition_is_associative(
            a in Just((0..7u32).collect::<Vec<u32>>()).prop_shuffle(),
            b in Just((0..7u32).collect::<Vec<u32>>()).prop_shuffle(),
            c in Just((0..7u32).collect::<Vec<u32>>()).prop_shuffle(),
        ) {
            let (a, b, c) = (Permutation { image: a }, Permutation { image: b }, Permutation { image: c });
            prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
            prop_assert!(a.compose(&a.inverse()).is_identity());
        }
    }
}
