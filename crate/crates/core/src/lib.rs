//! Topological full groups of one-sided irreducible shifts of finite type,
//! realized as colour-preserving almost automorphisms of the unfolding tree.
//!
//! The crate is organized bottom-up:
//!
//! * [`multigraph`]: finite oriented multigraphs and their admissibility predicates.
//! * [`linalg`]: exact integer matrices, determinants and Smith normal form.
//! * [`abelian`]: finitely generated abelian groups and marked isomorphism.
//! * [`shift`]: finite paths, clopen sets and eventually periodic boundary points.
//! * [`homology`]: groupoid homology, homology classes of clopen sets, Matsumoto's criterion.
//! * [`almost_aut`]: prefix exchanges (elements of the colour-preserving group).
//! * [`perm`]: small permutation groups.
//! * [`completion`]: patterns, local prime content and the completion certificate pipeline.
//! * [`certificate`]: the certificate text document and its validator.
//!
//! Data-parallel loops go through [`par`]; disabling the default `parallel`
//! feature makes every one of them sequential.

pub mod abelian;
pub mod almost_aut;
pub mod certificate;
pub mod completion;
pub mod error;
pub mod homology;
pub mod linalg;
pub mod multigraph;
pub mod par;
pub mod perm;
pub mod shift;

pub use error::{Error, Result};
