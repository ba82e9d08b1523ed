//! Many-valued coalgebraic modal logic over finite residuated lattices.
//!
//! Modules, bottom-up: [`algebra`] (truth-value algebras), [`syntax`]
//! (formulas), [`functor`] (finite set functors), [`lifting`] (predicate
//! liftings), [`semantics`] (models and the one-step tower), [`decision`]
//! (validity, satisfiability, consequence) and [`proofkit`] (one-step rules).

pub mod algebra;
pub mod decision;
pub mod error;
pub mod functor;
pub mod lifting;
pub mod proofkit;
pub mod report;
pub mod semantics;
pub mod syntax;

pub use error::{Error, Result};
