//! Monte Carlo and exact-enumeration verification of the comparison inequalities.
//!
//! Every check produces a [`VerificationReport`]: one row per grid point with
//! both sides of the inequality, their standard errors, the threshold the left
//! side must not exceed, and the resulting pass flag. Trials are keyed by
//! `(seed, trial index)` and reduced in index order, so reports do not depend
//! on the number of worker threads. The harness runs in `f64`.

mod checks;
mod figures;
mod lemmas;
mod scenario;
mod spectral;

pub use checks::{verify_poly_moment, verify_tail, verify_trace_mgf};
pub use figures::{emit_figure_data, figure_data, FigureData, FigureKind, FigureParams};
pub use lemmas::{covcm_check, poissonization_check, PoissonOptions, WeightLaw, POISSON_TAIL_MASS};
pub use scenario::{builtin_scenarios, BuiltinScenario, Sampler, Scenario};
pub use spectral::{log_trace_exp, negative_part_trace, trace_exp, OVERFLOW_EXPONENT};

use crate::report::{fmt_g, CsvRecord};

/// Standard errors allowed between the two sides.
pub const SLACK_SIGMAS: f64 = 3.0;

/// How the pass threshold is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slack {
    /// `lhs ≤ rhs + 3·√(se_lhs² + se_rhs²)`.
    ThreeSigma,
    /// Empirical frequency against a closed-form bound: `lhs ≤ rhs + 3·se_lhs`.
    Binomial,
    /// Both sides deterministic: `lhs ≤ rhs`.
    Exact,
}

impl std::fmt::Display for Slack {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Slack::ThreeSigma => "3sigma",
            Slack::Binomial => "binomial-3sigma",
            Slack::Exact => "exact",
        })
    }
}

/// One grid point of a check.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationRow {
    /// Grid coordinate; two-parameter grids join values with `:`.
    pub grid_value: String,
    pub lhs: f64,
    pub lhs_se: f64,
    pub rhs: f64,
    pub rhs_se: f64,
    /// Threshold that `lhs` must not exceed.
    pub bound: f64,
    pub pass: bool,
}

impl VerificationRow {
    pub fn new(grid_value: impl Into<String>, lhs: f64, lhs_se: f64, rhs: f64, rhs_se: f64, slack: Slack) -> Self {
        let bound = match slack {
            Slack::ThreeSigma => rhs + SLACK_SIGMAS * lhs_se.hypot(rhs_se),
            Slack::Binomial => rhs + SLACK_SIGMAS * lhs_se,
            Slack::Exact => rhs,
        };
        VerificationRow { grid_value: grid_value.into(), lhs, lhs_se, rhs, rhs_se, bound, pass: lhs <= bound }
    }
}

impl CsvRecord for VerificationRow {
    fn header() -> Vec<&'static str> {
        vec!["grid_value", "lhs", "lhs_se", "rhs", "rhs_se", "bound", "pass"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.grid_value.clone(),
            fmt_g(self.lhs),
            fmt_g(self.lhs_se),
            fmt_g(self.rhs),
            fmt_g(self.rhs_se),
            fmt_g(self.bound),
            self.pass.to_string(),
        ]
    }
}

/// Outcome of one verification run.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub check: String,
    pub scenario: String,
    pub slack: Slack,
    pub seed: u64,
    pub trials: usize,
    pub rows: Vec<VerificationRow>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    /// One-line summary.
    pub fn summary(&self) -> String {
        format!(
            "{} [{}] seed={} trials={} slack={}: {}/{} grid points pass",
            self.check,
            self.scenario,
            self.seed,
            self.trials,
            self.slack,
            self.rows.len() - self.failures(),
            self.rows.len()
        )
    }
}

/// Mean and standard error.
pub(crate) fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Mean and standard error of `exp(l_i)` from logs, as `(log scale, mean, se)`
/// with the returned mean and se multiplied by `exp(−log scale)`.
pub(crate) fn scaled_exp_mean(logs: &[f64], scale: f64) -> (f64, f64) {
    let xs: Vec<f64> = logs.iter().map(|l| (l - scale).exp()).collect();
    mean_se(&xs)
}
