//! Certified isolation of simple real roots of square nonlinear systems.
//!
//! A subdivision solver over dyadic hypercubes: boxes are excluded by an
//! interval sign test, gated by an interval Jacobian determinant test, and
//! confirmed by a preconditioned Miranda test on the faces of the doubled
//! box. All arithmetic is exact on dyadic numbers or outward rounded.

pub mod diagnostics;
pub mod dyadic;
pub mod elementary;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod interval;
pub mod linalg;
pub mod parse;
pub mod predicates;
pub mod report;
pub mod solver;
pub mod system;
pub mod verify;

pub use diagnostics::{
    certify_lambda1, certify_lambda2, certify_lambda3, certify_lambda4, depth_soft_check, estimate_exclusion_margin,
    lambda_hat1, sure_success_check, DepthCheck, ExclusionEstimate, Radius, RootEnclosure, SureSuccessReport,
    TheoryCheck, Trial, TrialTest,
};
pub use dyadic::{Dyadic, Round, RoundingContext, RoundingMode};
pub use error::{DiagnosticsError, EvalError, GeometryError, NumericError, ParseDyadicError, ParseError, SolveError};
pub use expr::Expr;
pub use geometry::{box_faces, dilate_box, AlignedBox, Dilation, Face, Roi};
pub use interval::{interval_metrics, Interval, IntervalMetrics};
pub use linalg::{
    approx_inverse_with_certificate, interval_matrix_det, inverse_norm_bound, CertifiedInverse, DyadicMatrix,
    IntervalMatrix, IntervalVector, Matrix,
};
pub use parse::{parse_source, SystemSource};
pub use predicates::{
    build_preconditioner, test_c0, test_jc, test_jc_strict, test_mk, FaceMargin, Preconditioner, PredicateOutcome,
    Witness,
};
pub use report::{BoxRecord, Endpoint, IsolationReport};
pub use solver::{
    isolate, Fate, IsolationOutput, JacobianMode, OutputBox, PairingEvent, PredicateStats, SolverConfig, SolverStats,
    Status, TraceEntry,
};
pub use system::{eval_point_certified, lipschitz_bound, mean_value, FunctionSystem};
pub use verify::{verify_isolation, VerificationReport, Violation};
