//! Exact computations with logarithmic forms with values in unitary local
//! systems on a polydisc model, plus a numerical validator for the singular
//! equation `z dg/dz + kappa g = f`.
//!
//! The public API is 0-based throughout: coordinate `i` is `z_{i+1}`.
//! Serialized forms and reports use 1-based indices.

pub mod checks;
pub mod error;
pub mod fixtures;
pub mod koszul;
pub mod linalg;
pub mod logform;
pub mod model;
pub mod ode;
pub mod primitives;
pub mod rational;
pub mod specseq;

pub use error::{Error, Result};
pub use koszul::{build_koszul, koszul_homology, KoszulComplex};
pub use linalg::Matrix;
pub use logform::{
    bracket, dprime, dsecond, dtotal, is_admissible, normal_form, random_form, residue, residue_m, FactorSet, LogForm,
    TermKey, TermView,
};
pub use model::{
    char_sum, restrict_to_stratum, validate_value_module, Character, ModelConfig, StructureConstants, ValidationReport,
    ValueElement, ValueModule,
};
pub use primitives::{monomial_inverse, peel_primitive, solve_dprime, verify_primitive, Truncation};
pub use rational::Rational;
pub use specseq::{
    check_convergence, check_degeneration, direct_sum_page_dims, e_page, from_model, kernel_dprime_description,
    model_summands, total_cohomology, ConvergenceReport, DoubleComplex, Page,
};
