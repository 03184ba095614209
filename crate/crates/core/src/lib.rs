//! Skeletal G-crossed braided tensor categories.
//!
//! The crate represents multiplicity-free G-crossed theories by their symbol
//! tables (fusion `N`, `F`, `R`, `U`, `η` and the symmetry action `ρ`), checks
//! their consistency equations, and implements the torsor construction that
//! produces new G-crossed extensions from a 2-cocycle `t ∈ Z²_ρ(G, A)` and a
//! 3-cochain `X ∈ C³(G, U(1))`.
//!
//! Module map:
//! - [`groups`]: finite groups, coefficient modules, cochains, cohomology.
//! - [`category`]: the [`GxTheory`] data model, derived quantities, JSON I/O.
//! - [`consistency`]: pentagon, hexagon, heptagon, η and κ checks, obstruction.
//! - [`torsor`]: the torsor functor and the relative obstruction.
//! - [`equivalence`]: gauge transformations, relabelings, equivalence search.
//! - [`compose`]: composition of torsor functors.
//! - [`constructions`]: SPT theories, gluing, trivial extensions, fixtures.
//! - [`cli`]: the `gxbtc` command-line front end.

pub mod category;
pub mod cli;
pub mod compose;
pub mod consistency;
pub mod constructions;
pub mod equivalence;
mod error;
pub mod groups;
pub mod phase;
pub mod torsor;

pub use category::GxTheory;
pub use error::{Error, Result};
pub use phase::C64;
