//! Pretentious distances between multiplicative functions.
//!
//! The crate covers prime sieves and arithmetic functions ([`ntheory`]),
//! Dirichlet characters with exact values ([`characters`]), completely
//! multiplicative functions ([`multfunc`]), the norm and distance machinery
//! ([`distance`]), certified Dirichlet series on `Re s > 1` ([`series`]),
//! verifiers for the resulting inequalities ([`inequalities`]), character
//! sum scans ([`charsums`]) and mean values ([`halasz`]).
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is on and runs sequentially otherwise. Results do not
//! depend on the thread count.

pub mod characters;
pub mod charsums;
pub mod cyclotomic;
pub mod distance;
pub mod error;
pub mod halasz;
pub mod inequalities;
pub mod multfunc;
pub mod ntheory;
pub mod par;
pub mod series;

pub use characters::{DirichletCharacter, UnitValue};
pub use error::{Error, Result};
pub use multfunc::MultiplicativeFunction;
pub use ntheory::{PrimeTable, SieveMode};
