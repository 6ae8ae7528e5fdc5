use rayon::prelude::*;

use crate::compare::{BoundReport, Provenance};
use crate::error::{invalid, Result};
use crate::report::fmt_g;

use super::spectral::{log_trace_exp, negative_part_trace, OVERFLOW_EXPONENT};
use super::{mean_se, scaled_exp_mean, Scenario, Slack, VerificationReport, VerificationRow};

const MIN_TRIALS: usize = 1000;

fn check_factor(factor: f64) -> Result<()> {
    if factor == 1.0 || factor == 2.0 {
        Ok(())
    } else {
        invalid(format!("comparison factor must be 1 or 2, got {factor}"))
    }
}

/// Per-trial spectra of `Y − E Y + Δ` and of `Z + Δ`.
type Spectra = (Vec<Vec<f64>>, Vec<Vec<f64>>);

fn spectra(sc: &Scenario, trials: usize, seed: u64) -> Result<Spectra> {
    let y = (0..trials).into_par_iter().map(|i| sc.centered_trial(seed, i).eigvals()).collect::<Result<Vec<_>>>()?;
    let z = (0..trials).into_par_iter().map(|i| sc.gaussian_trial(seed, i).eigvals()).collect::<Result<Vec<_>>>()?;
    Ok((y, z))
}

fn report(
    check: &str,
    sc: &Scenario,
    slack: Slack,
    seed: u64,
    trials: usize,
    rows: Vec<VerificationRow>,
) -> VerificationReport {
    VerificationReport { check: check.into(), scenario: sc.name.clone(), slack, seed, trials, rows }
}

/// `E Tr e^{−θ(Y − E Y + Δ)} ≤ factor·E Tr e^{−θ(Z + Δ)}` on a θ grid.
///
/// When a trace exponential could overflow, both sides are averaged in log
/// space with a common scale, so the pass flag is unaffected by overflow of
/// the reported values.
pub fn verify_trace_mgf(
    sc: &Scenario,
    thetas: &[f64],
    trials: usize,
    seed: u64,
    factor: f64,
) -> Result<VerificationReport> {
    check_factor(factor)?;
    if trials < MIN_TRIALS {
        return invalid(format!("at least {MIN_TRIALS} trials are required"));
    }
    if thetas.iter().any(|t| !(*t >= 0.0)) {
        return invalid("θ must be nonnegative");
    }
    let (ey, ez) = spectra(sc, trials, seed)?;
    let rows = thetas
        .iter()
        .map(|&theta| {
            let ly: Vec<f64> = ey.iter().map(|e| log_trace_exp(e, theta)).collect();
            let lz: Vec<f64> = ez.iter().map(|e| log_trace_exp(e, theta)).collect();
            let top = ly.iter().chain(&lz).copied().fold(f64::NEG_INFINITY, f64::max);
            if top < OVERFLOW_EXPONENT {
                let direct = |es: &[Vec<f64>]| -> Vec<f64> {
                    es.iter().map(|e| e.iter().map(|l| (-theta * l).exp()).sum()).collect()
                };
                let (my, sy) = mean_se(&direct(&ey));
                let (mz, sz) = mean_se(&direct(&ez));
                return VerificationRow::new(fmt_g(theta), my, sy, factor * mz, factor * sz, Slack::ThreeSigma);
            }
            let scale = top;
            let (my, sy) = scaled_exp_mean(&ly, scale);
            let (mz, sz) = scaled_exp_mean(&lz, scale);
            let mut row = VerificationRow::new(fmt_g(theta), my, sy, factor * mz, factor * sz, Slack::ThreeSigma);
            let f = scale.exp();
            for x in [&mut row.lhs, &mut row.lhs_se, &mut row.rhs, &mut row.rhs_se, &mut row.bound] {
                *x *= f;
            }
            row
        })
        .collect();
    Ok(report("trace-mgf", sc, Slack::ThreeSigma, seed, trials, rows))
}

/// `E Tr(Y − E Y + Δ)₋ᵖ ≤ factor·E Tr(Z + Δ)₋ᵖ` for `p ≥ 4`.
pub fn verify_poly_moment(
    sc: &Scenario,
    ps: &[f64],
    trials: usize,
    seed: u64,
    factor: f64,
) -> Result<VerificationReport> {
    check_factor(factor)?;
    if trials < 2 {
        return invalid("at least two trials are required");
    }
    if let Some(p) = ps.iter().find(|p| !(**p >= 4.0)) {
        return invalid(format!("polynomial moment order {p} is below 4"));
    }
    let (ey, ez) = spectra(sc, trials, seed)?;
    let rows = ps
        .iter()
        .map(|&p| {
            let y: Vec<f64> = ey.iter().map(|e| negative_part_trace(e, p)).collect();
            let z: Vec<f64> = ez.iter().map(|e| negative_part_trace(e, p)).collect();
            let (my, sy) = mean_se(&y);
            let (mz, sz) = mean_se(&z);
            VerificationRow::new(fmt_g(p), my, sy, factor * mz, factor * sz, Slack::ThreeSigma)
        })
        .collect();
    Ok(report("poly-moment", sc, Slack::ThreeSigma, seed, trials, rows))
}

/// `P{λ_min(Y − E Y + Δ) ≤ E λ_min(Z + Δ) − t} ≤ dim_factor·e^{−t²/(2σ*²)}`.
///
/// `E λ_min(Z + Δ)` is estimated from `trials` independent Gaussian draws and
/// lowered by three standard errors before the threshold is formed; the
/// empirical frequency then gets a binomial 3σ allowance.
pub fn verify_tail(sc: &Scenario, ts: &[f64], trials: usize, seed: u64) -> Result<VerificationReport> {
    if trials < 2 {
        return invalid("at least two trials are required");
    }
    if ts.iter().any(|t| !(*t >= 0.0)) {
        return invalid("t must be nonnegative");
    }
    let (ey, ez) = spectra(sc, trials, seed)?;
    let ly: Vec<f64> = ey.iter().map(|e| e[0]).collect();
    let lz: Vec<f64> = ez.iter().map(|e| e[0]).collect();
    let (elmin, se) = mean_se(&lz);
    let bound = BoundReport::new(elmin, se, Provenance::MonteCarlo, sc.sigma_star2(), sc.dim_factor());
    let n = trials as f64;
    let rows = ts
        .iter()
        .map(|&t| {
            let threshold = elmin - 3.0 * se - t;
            let f = ly.iter().filter(|&&l| l <= threshold).count() as f64 / n;
            VerificationRow::new(
                fmt_g(t),
                f,
                (f * (1.0 - f) / n).sqrt(),
                bound.tail_probability(t),
                0.0,
                Slack::Binomial,
            )
        })
        .collect();
    Ok(report("tail", sc, Slack::Binomial, seed, trials, rows))
}
