//! Principal-series scalar fields on de Sitter space `dS_d`: bulk modes in the conformal
//! chart, their boundary limits, the bulk/boundary kernel and the transform pair, with
//! verification suites that check each identity numerically.

pub mod error;
pub mod geometry;
pub mod holomap;
pub mod modes;
pub mod quadrature;
pub mod report;
pub mod richardson;
pub mod sampling;
pub mod specfun;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
