//! Finite groups, coefficient modules, cochains and cohomology.

mod cochain;
pub mod cohomology;
mod group;
mod module;
pub mod snf;

pub use cochain::{Cochain, CochainEntry, CochainFile, ModuleCochain, PhaseCochain};
pub use group::{tuples, FiniteGroup};
pub use module::{Coefficients, FiniteModule, U1};
