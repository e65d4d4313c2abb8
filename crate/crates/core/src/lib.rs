//! Exact and heuristic projections onto central quadrics, and splitting
//! solvers for the intersection of a box and a quadric.

pub mod bench;
pub mod error;
pub mod exact;
pub mod linalg;
pub mod normal_form;
pub mod quadric;
pub mod quasi;
pub mod splitting;
mod serde_util;

pub use error::{Error, Result};
pub use exact::{project_exact, ExactProjector, ProjectionKind, ProjectionOutcome};
pub use normal_form::{denormalize_point, normalize_problem, NormalForm, NormalizedProblem};
pub use quadric::{validate_quadric, Quadric, ValidationReport};
pub use quasi::{line_quadric_intersect, quasi_project, LineIntersection, Select, Variant};
pub use splitting::{
    ap_solve, cartesian_project, check_membership, dr_solve, drf_solve, project_box, restart_flip, solve,
    AxisBox, IterationTrace, Method, ProductSet, SolveOutput, SolverConfig, Termination,
};
