//! Computational laboratory for simultaneous approximation of systems of
//! linear forms at the origin.
//!
//! A point `X` of the cube `[-1/2, 1/2]^{mn}` is ψ-approximable when
//! `|qX|∞ < ψ(|q|∞)` for infinitely many integer `q ≠ 0`. The modules here
//! search for such `q`, decide the Khintchine–Groshev type series criteria,
//! and estimate the measure and dimension of the approximable set.

mod band;
pub mod boxdim;
pub mod error;
pub mod forms;
pub mod manifold;
pub mod measure;
pub mod output;
pub mod search;
pub mod series;
mod shell;

pub use error::{Error, Result};
