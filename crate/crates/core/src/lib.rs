//! Fractional Newton-type root finders for nonlinear systems `f(x) = 0`
//! over the complex numbers.
//!
//! The main entry points are [`solvers::run`] for a single order `α` and
//! [`sweep::sweep`] for a scan over a grid of orders with root
//! deduplication.

pub mod error;
pub mod expr;
pub mod fracderiv;
pub mod linalg;
pub mod solvers;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
pub use num_complex::Complex64;
