//! Numerical laboratory for finite-dimensional linear 2-normed spaces.
//!
//! The crate models concrete 2-norms (Gram forms and their products),
//! bounded b-linear functionals `T(x, b) = c·x` and their norms, the
//! constructive norm-preserving extension of such functionals, and finite
//! surrogates of the uniform boundedness and weak* convergence criteria.

pub mod axioms;
pub mod ball;
pub mod cli;
pub mod convergence;
pub mod error;
pub mod functional;
pub mod hahn_banach;
pub mod linalg;
pub mod optimize;
pub mod product;
pub mod report;
pub mod sampling;
pub mod seminorm;
pub mod space;
pub mod spec_io;
pub mod subspace;
pub mod tolerance;
pub mod ubp;

pub use error::{Error, Result};
pub use linalg::{vector, Vector};
pub use space::TwoNormSpace;
pub use subspace::Subspace;
