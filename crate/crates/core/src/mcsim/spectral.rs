use crate::error::Result;
use crate::matcore::SymMatrix;

/// Exponents above this are summed in log space.
pub const OVERFLOW_EXPONENT: f64 = 700.0;

/// `log Tr e^{−θM}` from the eigenvalues of `M`, by a max-shifted sum.
pub fn log_trace_exp(eigs: &[f64], theta: f64) -> f64 {
    let top = eigs.iter().map(|l| -theta * l).fold(f64::NEG_INFINITY, f64::max);
    top + eigs.iter().map(|l| (-theta * l - top).exp()).sum::<f64>().ln()
}

/// `Tr e^{−θM}`; switches to log space when `θ‖M‖` exceeds [`OVERFLOW_EXPONENT`].
pub fn trace_exp(m: &SymMatrix<f64>, theta: f64) -> Result<f64> {
    let eigs = m.eigvals()?;
    let big = eigs.iter().any(|l| (theta * l).abs() > OVERFLOW_EXPONENT);
    Ok(if big { log_trace_exp(&eigs, theta).exp() } else { eigs.iter().map(|l| (-theta * l).exp()).sum() })
}

/// `Tr (M)₋^p = Σ max(−λ, 0)^p`.
pub fn negative_part_trace(eigs: &[f64], p: f64) -> f64 {
    eigs.iter().map(|&l| if l < 0.0 { (-l).powf(p) } else { 0.0 }).sum()
}
