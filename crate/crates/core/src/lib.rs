//! Exact computation in the continuous full group of a one-sided
//! topological Markov shift.
//!
//! Group elements are A-adic tables ([`table::AdicTable`]); their analytic
//! realization as piecewise-linear bijections of `[0,1)` lives in [`pl`],
//! with all breakpoints, slopes and values exact in `Q(beta)` for the Perron
//! eigenvalue `beta` ([`perron`]). [`invariants`] computes the K0 group and
//! related integer invariants of the transition matrix.

pub mod builtin;
pub mod export;
pub mod invariants;
pub mod perron;
pub mod pl;
pub mod random;
pub mod selftest;
pub mod sft;
pub mod table;

pub use perron::{AlgebraicNumber, PerronData};
pub use sft::{EppPoint, Symbol, TransitionMatrix, Word};
pub use table::AdicTable;
