//! Mahler measures of Laurent polynomials over arbitrary tori, together with
//! the elliptic-curve machinery needed to verify the closed forms they take:
//! L-series values, period lattices, elliptic logarithms and dilogarithms,
//! branch-path analysis and winding numbers.
//!
//! Layering (no cycles):
//!   quadrature -> specfun -> elliptic -> mahler -> paths

pub mod elliptic;
pub mod mahler;
pub mod paths;
pub mod quadrature;
pub mod specfun;
