//! Local (derivative) and global (Sobol') sensitivity of the closed-form
//! models.

mod local;
mod model;
pub mod qmc;
mod saltelli;
mod sobol;

pub use local::{
    finite_difference_gradient, finite_difference_hessian, gradient_binary, gradient_deviation, gradient_single,
    hessian_asymmetry, hessian_binary, hessian_single, local_report, LocalSensitivity, DEFAULT_RELATIVE_STEP,
};
pub use model::{CostUnits, EconModel, Matrix, ModelKind, ParameterVector, Target, BINARY_VARIABLES, SINGLE_VARIABLES};
pub use saltelli::{saltelli_sample, RowKind, SaltelliDesign, SaltelliSample, SamplerKind, VariableRange, MIN_BASE_SAMPLES};
pub use sobol::{
    sobol_analyze, sobol_analyze_with, sobol_analyze_with_progress, ConfidenceIntervals, Progress, SobolIndices,
    SobolModel, SobolSettings, SobolSpec, DEFAULT_BOOTSTRAP_RESAMPLES, MIN_ANALYSIS_SAMPLES,
};
