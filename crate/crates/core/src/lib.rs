//! Finite-model laboratory for quasi-set theory.
//!
//! * [`universe`]: finite quasi-set universes and the constructive quasi-set
//!   operations (weak pairs, power quasi-sets, quotients, ...).
//! * [`do_model`]: systems of ontologically distinguishable particles, their
//!   axiom checker and the interpretation into a universe.
//! * [`rational_model`]: rationals as M-atoms and nonconvergent Cauchy
//!   sequences as m-atoms.
//! * [`formula`]: the first-order language, its evaluator and the axiom corpus.
//! * [`closure`]: witness closure of a universe.
//! * [`format`]: JSON file formats.

pub mod closure;
pub mod do_model;
pub mod error;
pub mod format;
pub mod formula;
pub mod rational_model;
pub mod universe;

pub use error::{Error, Result, Span};
pub use universe::{
    AtomSort, Entity, EntityHandle, EntityKind, ExtEq, Extension, QSet, QuasiCardinal, Species,
    Universe, UniverseBuilder, DEFAULT_POWER_BOUND,
};
