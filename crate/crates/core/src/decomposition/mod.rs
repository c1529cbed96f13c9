//! Low/high frequency splitting of the exact solution, the Taylor expansion
//! of the slow amplitude at `k = 0`, bound checks, and the approximate
//! solution assembled from Hermite coefficients.

pub mod bounds;
pub mod cutoff;
pub mod expansion;
pub mod modes;
pub mod scaling_error;

pub use bounds::{
    data_c_norm, decompose, high_mode_bound_check, lemma_check, lemma_norm, lemma_norm_quadrature, offset_grid,
    recombination_defect, residual_bound_check, BoundReport, DecompositionRow, LemmaCheck,
};
pub use cutoff::{cutoff, cutoff_jet, smooth_step, wait_time, CutoffSpec};
pub use expansion::{
    app_from_taylor, assemble_app, assemble_v_app, assemble_w_app, c_coeff, d_coeff, moment_identity,
    solution_moments, taylor_at_zero, wbar_jets_at_zero, AppSample, ApproxSolution, LowModeExpansion,
};
pub use modes::{heat_jet, in_series_region, vbar, wbar, wbar_any, ModeJets};
pub use scaling_error::{
    error_scaling_experiment, error_scaling_in_window, reduced_coefficients, true_solution_scaling,
    ErrorScalingReport,
};
