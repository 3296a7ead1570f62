//! Exact arithmetic for extended affine Weyl groups of type A₁.
//!
//! An extended affine root system of type A₁ with nullity ν is determined by a
//! semilattice S in the radical of the form, and S itself is determined by its
//! supporting class: the collection of subsets J ⊆ {1, …, ν} such that
//! τ_J = Σ_{r∈J} σ_r lands in S. This crate works entirely with that finite
//! combinatorial datum and decides whether the extended affine Weyl group
//! W = W(S) admits the presentation by conjugation, i.e. whether the defining
//! epimorphism Ŵ → W from the abstractly presented group is an isomorphism.
//!
//! The kernel of Ŵ → W is an elementary abelian 2-group whose rank n₀ is the
//! dimension of a GF(2) nullspace attached to the supporting class, so the
//! decision reduces to exact linear algebra over GF(2). Three independent
//! computational models cross-check each other throughout:
//!
//! * [`weyl`]: normal forms (d, n, c) for elements of W itself,
//! * [`hat`]: normal forms (d, n, m, ε) for the presented group Ŵ together
//!   with the epimorphism ψ onto W,
//! * [`rep`]: a faithful integer matrix representation of W on a hyperbolic
//!   extension of the root space, used as ground truth.
//!
//! [`decide`] produces verdict reports, [`integral`] hosts the GF(2) system
//! and a brute-force oracle, and [`enumerate`] sweeps every supporting class
//! of a given rank.

pub mod decide;
pub mod enumerate;
pub mod hat;
pub mod integral;
pub mod rep;
pub mod semilattice;
pub mod weyl;

pub use decide::{decide, DecisionReport, Verdict};
pub use semilattice::{SemilatticeContext, SubsetMask, SupportingClass};
