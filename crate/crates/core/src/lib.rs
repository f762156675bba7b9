//! Compatible Poisson and pseudo-Riemannian structures.
//!
//! Structures are given by symbolic component fields. Everything downstream
//! works pointwise on first-order jets of those fields: contravariant and
//! covariant Levi-Civita connections, defect tensors, leaf frames, the
//! classification of a structure into the compatibility classes, and
//! submersion checks.

pub mod classify;
pub mod connections;
pub mod error;
pub mod expr;
pub mod fields;
pub mod foliation;
pub mod gallery;
pub mod identities;
pub mod linalg;
pub mod linear;
pub mod structure;
pub mod submersion;

pub use classify::{classify, CheckId, CheckRecord, ClassifyOptions, DefectReport, Expect, Status};
pub use error::{Error, Result};
pub use expr::{Expr, Jet};
pub use fields::Local;
pub use identities::{identity_suite, IdentityReport};
pub use linalg::Mat;
pub use structure::{load_structure, LoadOptions, Structure};
pub use submersion::{submersion_report, SubmersionReport, SubmersionSpec};
