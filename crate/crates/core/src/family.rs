//! Group families behind a common trait, registered by name and selected at
//! runtime from a textual spec.
//!
//! Accepted spec forms:
//!
//! * `S<n>`: symmetric group of degree n
//! * `D<2n>`: dihedral group of order 2n
//! * `Z<n>`: cyclic group of order n
//! * `GL(2,<q>)`: invertible 2×2 matrices over 𝔽_q
//! * `PGL(2,<q>)`: the projective quotient
//! * `perm[<degree>]: <cycles>;<cycles>;...`: explicit permutation generators

use thiserror::Error;

use crate::group::{CayleyGroup, GroupError};
use crate::field::FieldError;
use crate::perm::{self, PermError, Permutation};
use crate::projective::{self, ProjError};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("unrecognized group spec {spec:?}; known families: {known}")]
    UnknownSpec { spec: String, known: String },
    #[error("invalid group spec at byte {pos}: {msg}")]
    Invalid { pos: usize, msg: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<ProjError> for FamilyError {
    fn from(e: ProjError) -> Self {
        match e {
            ProjError::Group(g) => FamilyError::Group(g),
            ProjError::Field(f) => FamilyError::Field(f),
            ProjError::Singular => FamilyError::Invalid {
                pos: 0,
                msg: "singular matrix".into(),
            },
        }
    }
}

/// One constructible family of groups. `matches` decides whether a spec
/// belongs to this family; `build` then owns all parsing and construction.
pub trait GroupFamily: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn matches(&self, spec: &str) -> bool;
    fn build(&self, spec: &str, cap: usize) -> Result<CayleyGroup, FamilyError>;
}

fn parse_suffix_number(spec: &str, prefix: &str) -> Result<usize, FamilyError> {
    let digits = &spec[prefix.len()..];
    digits.parse().map_err(|_| FamilyError::Invalid {
        pos: prefix.len(),
        msg: format!("expected a number after {prefix:?}"),
    })
}

fn prefix_number_matches(spec: &str, prefix: &str) -> bool {
    spec.len() > prefix.len()
        && spec.starts_with(prefix)
        && spec[prefix.len()..].bytes().all(|b| b.is_ascii_digit())
}

struct Symmetric;

impl GroupFamily for Symmetric {
    fn name(&self) -> &'static str {
        "S"
    }
    fn describe(&self) -> &'static str {
        "symmetric group S<n> on n points"
    }
    fn matches(&self, spec: &str) -> bool {
        prefix_number_matches(spec, "S")
    }
    fn build(&self, spec: &str, cap: usize) -> Result<CayleyGroup, FamilyError> {
        let n = parse_suffix_number(spec, "S")?;
        if n == 0 {
            return Err(FamilyError::Invalid {
                pos: 1,
                msg: "S<n> needs n >= 1".into(),
            });
        }
        Ok(CayleyGroup::from_generators(
            &perm::symmetric_generators(n),
            spec,
            cap,
        )?)
    }
}

struct Dihedral;

impl GroupFamily for Dihedral {
    fn name(&self) -> &'static str {
        "D"
    }
    fn describe(&self) -> &'static str {
        "dihedral group D<2n> of order 2n"
    }
    fn matches(&self, spec: &str) -> bool {
        prefix_number_matches(spec, "D")
    }
    fn build(&self, spec: &str, cap: usize) -> Result<CayleyGroup, FamilyError> {
        let order = parse_suffix_number(spec, "D")?;
        Ok(CayleyGroup::from_generators(
            &perm::dihedral_generators(order)?,
            spec,
            cap,
        )?)
    }
}

struct Cyclic;

impl GroupFamily for Cyclic {
    fn name(&self) -> &'static str {
        "Z"
    }
    fn describe(&self) -> &'static str {
        "cyclic group Z<n> of order n"
    }
    fn matches(&self, spec: &str) -> bool {
        prefix_number_matches(spec, "Z")
    }
    fn build(&self, spec: &str, cap: usize) -> Result<CayleyGroup, FamilyError> {
        let n = parse_suffix_number(spec, "Z")?;
        if n == 0 {
            return Err(FamilyError::Invalid {
                pos: 1,
                msg: "Z<n> needs n >= 1".into(),
            });
        }
        Ok(CayleyGroup::from_generators(
            &perm::cyclic_generators(n),
            spec,
            cap,
        )?)
    }
}

fn parse_matrix_arg(spec: &str, prefix: &str) -> Result<u32, FamilyError> {
    let inner = &spec[prefix.len()..];
    let Some(rest) = inner.strip_suffix(')') else {
        return Err(FamilyError::Invalid {
            pos: spec.len(),
            msg: "expected closing ')'".into(),
        });
    };
    rest.trim().parse().map_err(|_| FamilyError::Invalid {
        pos: prefix.len(),
        msg: "expected a prime power".into(),
    })
}

struct GeneralLinear;

impl GroupFamily for GeneralLinear {
    fn name(&self) -> &'static str {
        "GL"
    }
    fn describe(&self) -> &'static str {
        "general linear group GL(2,<q>) over F_q"
    }
    fn matches(&self, spec: &str) -> bool {
        spec.starts_with("GL(2,")
    }
    fn build(&self, spec: &str, cap: usize) -> Result<CayleyGroup, FamilyError> {
        let q = parse_matrix_arg(spec, "GL(2,")?;
        let (group, _) = projective::gl2_group(q, cap)?;
        Ok(group)
    }
}

struct ProjectiveGeneralLinear;

impl GroupFamily for ProjectiveGeneralLinear {
    fn name(&self) -> &'static str {
        "PGL"
    }
    fn describe(&self) -> &'static str {
        "projective general linear group PGL(2,<q>) over F_q"
    }
    fn matches(&self, spec: &str) -> bool {
        spec.starts_with("PGL(2,")
    }
    fn build(&self, spec: &str, cap: usize) -> Result<CayleyGroup, FamilyError> {
        let q = parse_matrix_arg(spec, "PGL(2,")?;
        let (group, _) = projective::pgl2_group(q, cap)?;
        Ok(group)
    }
}

struct ExplicitPerm;

const EXPLICIT_DEGREE_CAP: usize = 1024;

impl GroupFamily for ExplicitPerm {
    fn name(&self) -> &'static str {
        "perm"
    }
    fn describe(&self) -> &'static str {
        "explicit generators: perm[<degree>]: <cycles>;<cycles>;..."
    }
    fn matches(&self, spec: &str) -> bool {
        spec.starts_with("perm[")
    }
    fn build(&self, spec: &str, cap: usize) -> Result<CayleyGroup, FamilyError> {
        let inner = &spec["perm[".len()..];
        let close = inner.find(']').ok_or(FamilyError::Invalid {
            pos: spec.len(),
            msg: "expected ']' after the degree".into(),
        })?;
        let degree: usize = inner[..close].trim().parse().map_err(|_| FamilyError::Invalid {
            pos: "perm[".len(),
            msg: "expected a degree".into(),
        })?;
        if degree == 0 || degree > EXPLICIT_DEGREE_CAP {
            return Err(FamilyError::Invalid {
                pos: "perm[".len(),
                msg: format!("degree must be in 1..={EXPLICIT_DEGREE_CAP}"),
            });
        }
        let after = &inner[close + 1..];
        let Some(body) = after.trim_start().strip_prefix(':') else {
            return Err(FamilyError::Invalid {
                pos: "perm[".len() + close + 1,
                msg: "expected ':' after the degree".into(),
            });
        };
        let body_offset = spec.len() - body.len();
        let mut gens: Vec<Permutation> = Vec::new();
        let mut offset = body_offset;
        for piece in body.split(';') {
            match Permutation::parse(piece, degree) {
                Ok(p) => gens.push(p),
                Err(e) => {
                    // Re-anchor parse positions to the whole spec string.
                    return Err(match e {
                        PermError::Parse { pos, msg } => FamilyError::Invalid {
                            pos: offset + pos,
                            msg,
                        },
                        PermError::OutOfRange { pos, point, degree } => FamilyError::Invalid {
                            pos: offset + pos,
                            msg: format!("point {point} out of range 1..={degree}"),
                        },
                        PermError::Repeated { pos, point } => FamilyError::Invalid {
                            pos: offset + pos,
                            msg: format!("point {point} repeated within one cycle"),
                        },
                        other => FamilyError::Perm(other),
                    });
                }
            }
            offset += piece.len() + 1;
        }
        if gens.is_empty() {
            gens.push(Permutation::identity(degree));
        }
        Ok(CayleyGroup::from_generators(&gens, spec, cap)?)
    }
}

/// Name-indexed registry of the families the engine can build.
pub struct FamilyRegistry {
    entries: Vec<Box<dyn GroupFamily>>,
}

impl FamilyRegistry {
    /// All built-in families.
    pub fn standard() -> FamilyRegistry {
        let mut reg = FamilyRegistry {
            entries: Vec::new(),
        };
        reg.register(Box::new(Symmetric));
        reg.register(Box::new(Dihedral));
        reg.register(Box::new(Cyclic));
        reg.register(Box::new(GeneralLinear));
        reg.register(Box::new(ProjectiveGeneralLinear));
        reg.register(Box::new(ExplicitPerm));
        reg
    }

    pub fn register(&mut self, family: Box<dyn GroupFamily>) {
        self.entries.push(family);
    }

    pub fn families(&self) -> impl Iterator<Item = &dyn GroupFamily> {
        self.entries.iter().map(|b| b.as_ref())
    }

    /// Builds the group named by `spec` with the first matching family.
    pub fn build(&self, spec: &str, cap: usize) -> Result<CayleyGroup, FamilyError> {
        let spec = spec.trim();
        for family in &self.entries {
            if family.matches(spec) {
                return family.build(spec, cap);
            }
        }
        Err(FamilyError::UnknownSpec {
            spec: spec.to_string(),
            known: self
                .entries
                .iter()
                .map(|f| f.name())
                .collect::<Vec<_>>()
                .join(", "),
        })
    }
}
