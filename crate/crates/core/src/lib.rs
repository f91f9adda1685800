//! Finite-group engine for hunting Ingleton-inequality violations.
//!
//! The pipeline: materialize a finite group as a Cayley table
//! ([`group`], with permutation and projective-matrix representations in
//! [`perm`] and [`projective`]), enumerate its full subgroup lattice as
//! bitsets ([`lattice`]), then scan subgroup 4-tuples with exact integer
//! arithmetic for violations of the Ingleton inequality ([`ingleton`]).
//! [`witness`] builds and verifies the explicit PGL(2,p) violating family,
//! and [`young`] holds the entropy-side oracles.

pub mod family;
pub mod field;
pub mod group;
pub mod ingleton;
pub mod lattice;
pub mod perm;
pub mod projective;
pub mod witness;
pub mod young;

pub use family::FamilyRegistry;
pub use group::{CayleyGroup, ConcreteElement, DEFAULT_ORDER_CAP};
pub use lattice::{SubgroupLattice, SubgroupSet};
