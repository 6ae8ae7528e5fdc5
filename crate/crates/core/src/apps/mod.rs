//! Applications of the comparison theorems: Wishart matrices, subsampling of
//! projective designs, sample covariance estimation and sparse subspace
//! injections.

pub mod covariance;
pub mod design;
pub mod sketch;
pub mod wishart;

pub use covariance::{
    gaussian_norm_bound, scov_report, scov_sample_size, sparse_cov_report, sparse_cov_sample_size, sparse_mom,
    ScovPlan, SparseCovProblem, SparseCovReport, SparseVectorLaw,
};
pub use design::{
    check_design, design_residual, design_sampling_plan, design_spec, mub_c2, CheckMode, DesignCheck, DesignPlan,
    DesignSystem, PROBE_MODE_MIN_DIM,
};
pub use sketch::{
    apply_sketch, coherence, injection_lmin, injection_model, make_sketch, practical_sketch_params, sketch_params,
    InjectionReport, SketchParams, SparseSketch,
};
pub use wishart::{wishart_nonexample_report, wishart_report, wishart_spec, wishart_threshold, WishartReport};

/// `ceil(x)` that ignores upward rounding noise of a few ulps.
pub(crate) fn ceil_count(x: f64) -> usize {
    (x * (1.0 - 8.0 * f64::EPSILON)).ceil().max(0.0) as usize
}

pub(crate) fn check_unit_interval(name: &str, x: f64) -> crate::Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        crate::error::invalid(format!("{name} must lie in (0, 1), got {x}"))
    }
}
