//! harmap: a numerical laboratory for energy-minimizing maps from polyhedral
//! local models with Lipschitz Riemannian metrics into curved metric targets.
//!
//! The crate solves the discrete variational problem (piecewise-linear maps,
//! Gauss-Seidel relaxation through Fréchet means) and measures the
//! regularity quantities that govern such maps: radial energy and boundary
//! moments, the order function, monotonicity ratios, Hölder exponent fits,
//! blow-up homogeneity, and first eigenvalues of links with their predicted
//! exponents.
//!
//! Module map:
//!   - [`target`]: geodesic target spaces (sphere, arc, tree, flat, cone),
//!   - [`cone`]: the metric cone, its geodesics, lift and projection,
//!   - [`comparison`]: randomized oracles for the comparison estimates,
//!   - [`domain`]: local models, Lipschitz metric fields, meshing,
//!   - [`energy`]: the discrete energy and the constrained minimizer,
//!   - [`analytics`]: radial profiles, order, monotonicity, Hölder, blow-ups,
//!   - [`link`]: link graphs, Rayleigh quotients, exponent predictions,
//!   - [`harness`]: experiment configs, CSV artifacts, oracle runner.

// Guards written as !(x > 0) are NaN-rejecting on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod comparison;
pub mod cone;
pub mod domain;
pub mod energy;
pub mod error;
pub mod harness;
pub mod link;
pub mod target;

pub use error::{Error, Result};
