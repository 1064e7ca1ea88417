//! Empirical concentration of measure under ℓp perturbations.
//!
//! The concentration function of a distribution asks for the smallest
//! measure of an ε-expansion over all sets of measure at least α; one minus
//! it bounds the adversarial robustness any classifier with risk ≥ α can
//! reach. Restricting the sets to half spaces makes the expansion exact
//! (another half space) and the search tractable: this crate looks for a
//! half space whose expansion grows slowly, guided by principal components,
//! and reports its expanded measure as an upper bound on concentration.
//!
//! Gaussian distributions have a closed-form answer ([`analytic`]), which
//! is how the estimator is checked.

pub mod analytic;
pub mod data;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod lp;
pub mod rng;
pub mod search;
pub mod spectral;
pub mod types;

pub use error::{Error, Result};
pub use lp::{conjugate, Exponent, LpMetric};
pub use types::{
    CandidateOrigin, ConcentrationEstimate, ConcentrationProblem, Dataset, HalfSpace, TrialReport,
};
