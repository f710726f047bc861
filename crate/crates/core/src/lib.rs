//! Numerical decision procedure for correct solvability in Lp(R) of the
//! Sturm-Liouville equation -(r(x) y'(x))' + q(x) y(x) = f(x).
//!
//! The library builds the local-scale functions d1, d2, phi, psi, h, d of the
//! coefficient pair (r, q), the fundamental system {u, v} of the homogeneous
//! equation, the Green kernel and its Hardy-type boundedness functionals, and
//! combines them into a structural verdict: the equation is either correctly
//! solvable for every p in (1, inf) or for none, and the decision reduces to
//! the boundedness of B = sup h(x) d(x) plus tail positivity of q.
//!
//! Modules follow the pipeline order:
//! - [`expr`]: coefficient expression language and validation
//! - [`quad`]: adaptive quadrature, cumulative tables, tail classification
//! - [`scales`]: local scales, profiles and coverings
//! - [`fss`]: fundamental system, density rho = u v, Green kernel
//! - [`green`]: Green operator application, Hardy functionals, L1 norm
//! - [`criteria`]: certificates (B, A, m(a), theta, q0), necessary conditions,
//!   verdict assembly
//! - [`report`]/[`run`]: JSON report schema, CSV artifacts, CLI driver

pub mod criteria;
pub mod expr;
pub mod fss;
pub mod green;
pub mod presets;
pub mod quad;
pub mod report;
pub mod run;
pub mod scales;
pub mod util;


pub use expr::{parse_expr, CoefficientPair, Expr};

