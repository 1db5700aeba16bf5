//! Exact finite-approximation profinite completions.
//!
//! The crate computes truncated profinite completions of concrete groups as
//! inverse limits over diagrams of finite approximations `(F, φ)`, and checks
//! that for vector spaces over a prime field the completion is the double
//! dual, with the profinite projection matching the canonical injection.
//!
//! Modules, bottom-up:
//!
//! - [`fingroup`]: table groups, finite abelian groups, homomorphisms and
//!   Smith/Hermite normal forms over the integers.
//! - [`fplin`]: linear algebra over `F_p`: RREF, subspaces, annihilators,
//!   quotients and double duals.
//! - [`approx`]: source groups, finite approximations and their diagrams.
//! - [`limit`]: inverse limits of finite diagrams (brute force and fiber
//!   product solvers) and the profinite projection.
//! - [`profinite`]: the comparison map `Ψ : V̂ → V**` and the checks built
//!   on top of it.
//!
//! Everything is exact. With the default `parallel` feature the inner
//! enumeration loops run on rayon; without it they fall back to plain
//! iterators and produce the same output in the same order.

pub mod approx;
mod budget;
mod error;
pub mod fingroup;
pub mod fplin;
pub mod limit;
mod par;
pub mod profinite;
pub mod report;

pub use budget::Budget;
pub use error::{Error, Result};
