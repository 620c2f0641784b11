//! Certification of candidate solutions of multiobjective programs
//!
//! ```text
//! minimize f(x) = (f_1(x), ..., f_n(x))  subject to  g_j(x) <= 0, j = 1..m
//! ```
//!
//! against second-order Fritz-John and Kuhn-Tucker conditions, together with
//! first- and second-order Mangasarian-Fromovitz constraint qualifications,
//! sampling probes for generalized convexity, and brute-force Pareto oracles.

pub mod calculus;
pub mod catalog;
pub mod cones;
pub mod cq;
pub mod expr;
pub mod gconvex;
pub mod kkt;
pub mod linalg;
pub mod lp;
pub mod pareto;
pub mod problem;
pub mod tol;

pub use expr::Expr;
pub use problem::{Problem, ProblemFile};
pub use tol::Tolerances;
