//! Concrete matrix realization of trace polynomials.

pub mod cm;
pub mod eval;
pub mod fit;
pub mod linalg;
pub mod symplectic;

pub use cm::{
    child_seed, rank_residual, sample_cm, sample_cm_with, trace_residual, CMPoint, MatrixPair, SamplerConfig,
};
pub use eval::{evaluate, numeric_bracket, numeric_gradient, CompiledPoly, Evaluator};
pub use fit::{fit_on_points, VarietyFit};
pub use symplectic::symplectic_pullback_residual;
