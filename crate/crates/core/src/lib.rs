//! Both sides of the n-level density identity for the family of quadratic
//! Dirichlet L-functions `L(s, χ_8d)`, `d` odd and squarefree:
//!
//! * [`density`] evaluates the arithmetic combinatorial formula for the
//!   limiting n-level density when `Σ σ_i < 2`, and the family-average limit
//!   of the prime sums it is built from;
//! * [`rmt`] evaluates the symplectic random-matrix prediction
//!   `∫ f(x) det K(x_j, x_k) dx`;
//! * [`empirical`] brute-forces the character sums over the family that the
//!   formula describes, and checks the Poisson-summation identities used to
//!   analyse them;
//! * [`numtheory`], [`combinatorics`], [`testfun`] and [`quadrature`] are the
//!   supporting machinery.

pub mod combinatorics;
pub mod density;
pub mod empirical;
pub mod error;
pub mod numtheory;
pub mod quadrature;
pub mod rmt;
pub mod testfun;

pub use error::{Error, Result};
pub use testfun::{product_transform, FunctionSpec, TestFunction};
