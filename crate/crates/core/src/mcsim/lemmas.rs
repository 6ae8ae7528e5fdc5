use rayon::prelude::*;

use crate::compare::PSD_TOL;
use crate::error::{check_dim, invalid, Error, Result};
use crate::matcore::SymMatrix;
use crate::report::fmt_g;
use crate::rng::StreamRng;

use super::spectral::log_trace_exp;
use super::{mean_se, Slack, VerificationReport, VerificationRow};

/// Law of a nonnegative scalar weight.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightLaw {
    Constant(f64),
    Bernoulli(f64),
    /// Uniform on `[0, 1]`.
    Uniform,
    Exponential(f64),
    /// `a` with probability `p`, otherwise `b`.
    TwoPoint {
        a: f64,
        b: f64,
        p: f64,
    },
    /// Square of a standard normal.
    ChiSquare1,
}

impl WeightLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            WeightLaw::Constant(c) => c >= 0.0 && c.is_finite(),
            WeightLaw::Bernoulli(p) => (0.0..=1.0).contains(&p),
            WeightLaw::Uniform | WeightLaw::ChiSquare1 => true,
            WeightLaw::Exponential(rate) => rate > 0.0 && rate.is_finite(),
            WeightLaw::TwoPoint { a, b, p } => {
                a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite() && (0.0..=1.0).contains(&p)
            }
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("invalid weight law {self:?}"))
        }
    }

    /// `(E W, E W²)`.
    pub fn moments(&self) -> (f64, f64) {
        match *self {
            WeightLaw::Constant(c) => (c, c * c),
            WeightLaw::Bernoulli(p) => (p, p),
            WeightLaw::Uniform => (0.5, 1.0 / 3.0),
            WeightLaw::Exponential(r) => (1.0 / r, 2.0 / (r * r)),
            WeightLaw::TwoPoint { a, b, p } => (p * a + (1.0 - p) * b, p * a * a + (1.0 - p) * b * b),
            WeightLaw::ChiSquare1 => (1.0, 3.0),
        }
    }

    /// Atoms `(value, probability)` of a finitely supported law.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match *self {
            WeightLaw::Constant(c) => Some(vec![(c, 1.0)]),
            WeightLaw::Bernoulli(p) => Some(vec![(1.0, p), (0.0, 1.0 - p)]),
            WeightLaw::TwoPoint { a, b, p } => Some(vec![(a, p), (b, 1.0 - p)]),
            _ => None,
        }
    }

    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        match *self {
            WeightLaw::Constant(c) => c,
            WeightLaw::Bernoulli(p) => f64::from(u8::from(rng.bernoulli(p))),
            WeightLaw::Uniform => rng.uniform(),
            WeightLaw::Exponential(r) => rng.exponential() / r,
            WeightLaw::TwoPoint { a, b, p } => {
                if rng.bernoulli(p) {
                    a
                } else {
                    b
                }
            }
            WeightLaw::ChiSquare1 => {
                let g = rng.normal();
                g * g
            }
        }
    }
}

/// Parses `constant:c`, `bernoulli:p`, `uniform`, `exponential:rate`,
/// `two-point:a:b:p` or `chi2`.
impl std::str::FromStr for WeightLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let nums = parts[1..]
            .iter()
            .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Validation(format!("bad number {x:?} in law {s:?}"))))
            .collect::<Result<Vec<f64>>>()?;
        let law = match (parts[0], nums.as_slice()) {
            ("constant", [c]) => WeightLaw::Constant(*c),
            ("bernoulli", [p]) => WeightLaw::Bernoulli(*p),
            ("uniform", []) => WeightLaw::Uniform,
            ("exponential", [r]) => WeightLaw::Exponential(*r),
            ("two-point", [a, b, p]) => WeightLaw::TwoPoint { a: *a, b: *b, p: *p },
            ("chi2", []) => WeightLaw::ChiSquare1,
            _ => return invalid(format!("unknown weight law {s:?}")),
        };
        law.validate()?;
        Ok(law)
    }
}

/// `Cov(W, f′(W)) ≤ E[W²]·E[f″(W)]` for `f(w) = e^{b − θw}` over a `θ × b` grid.
///
/// Finitely supported laws are enumerated exactly; others use `trials` draws
/// with delta-method standard errors and the 3σ rule.
pub fn covcm_check(
    law: &WeightLaw,
    thetas: &[f64],
    bs: &[f64],
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    law.validate()?;
    if thetas.iter().any(|t| !(*t >= 0.0)) {
        return invalid("θ must be nonnegative");
    }
    let mut rows = Vec::new();
    let (slack, used_trials) = if let Some(atoms) = law.atoms() {
        let (m1, m2) = law.moments();
        for &theta in thetas {
            for &b in bs {
                let f = |w: f64| (b - theta * w).exp();
                let lhs: f64 = atoms.iter().map(|&(w, p)| p * (w - m1) * (-theta * f(w))).sum();
                let rhs = m2 * atoms.iter().map(|&(w, p)| p * theta * theta * f(w)).sum::<f64>();
                rows.push(VerificationRow::new(
                    format!("{}:{}", fmt_g(theta), fmt_g(b)),
                    lhs,
                    0.0,
                    rhs,
                    0.0,
                    Slack::Exact,
                ));
            }
        }
        (Slack::Exact, 0)
    } else {
        if trials < 2 {
            return invalid("at least two trials are required");
        }
        let ws: Vec<f64> =
            (0..trials).into_par_iter().map(|i| law.sample(&mut StreamRng::new(seed, i as u64))).collect();
        let n = trials as f64;
        let (wbar, _) = mean_se(&ws);
        let w2: Vec<f64> = ws.iter().map(|w| w * w).collect();
        let (m_w2, _) = mean_se(&w2);
        for &theta in thetas {
            for &b in bs {
                let f1: Vec<f64> = ws.iter().map(|w| -theta * (b - theta * w).exp()).collect();
                let f2: Vec<f64> = ws.iter().map(|w| theta * theta * (b - theta * w).exp()).collect();
                let (f1bar, _) = mean_se(&f1);
                let prods: Vec<f64> = ws.iter().zip(&f1).map(|(w, f)| (w - wbar) * (f - f1bar)).collect();
                let (cov_mean, cov_se) = mean_se(&prods);
                let lhs = cov_mean * n / (n - 1.0);
                let (m_f2, _) = mean_se(&f2);
                let var = |xs: &[f64], m: f64| xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
                let cross = w2.iter().zip(&f2).map(|(a, c)| (a - m_w2) * (c - m_f2)).sum::<f64>() / (n - 1.0);
                let rhs_var =
                    (m_f2 * m_f2 * var(&w2, m_w2) + m_w2 * m_w2 * var(&f2, m_f2) + 2.0 * m_w2 * m_f2 * cross) / n;
                rows.push(VerificationRow::new(
                    format!("{}:{}", fmt_g(theta), fmt_g(b)),
                    lhs,
                    cov_se,
                    m_w2 * m_f2,
                    rhs_var.max(0.0).sqrt(),
                    Slack::ThreeSigma,
                ));
            }
        }
        (Slack::ThreeSigma, trials)
    };
    Ok(VerificationReport {
        check: "covariance-lemma".into(),
        scenario: format!("{law:?}"),
        slack,
        seed,
        trials: used_trials,
        rows,
    })
}

/// Default tail mass left out of the truncated Poisson sums.
pub const POISSON_TAIL_MASS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoissonOptions {
    /// Total Poisson probability left out of the truncated sum.
    pub tail_mass: f64,
    /// Largest number of count vectors to enumerate.
    pub max_evaluations: usize,
}

impl Default for PoissonOptions {
    fn default() -> Self {
        PoissonOptions { tail_mass: POISSON_TAIL_MASS, max_evaluations: 5_000_000 }
    }
}

const MAX_PLACEMENTS: usize = 256;

fn poisson_pmf(lambda: f64, upto: usize) -> Vec<f64> {
    let mut p = vec![(-lambda).exp()];
    for r in 1..=upto {
        let prev = p[r - 1];
        p.push(prev * lambda / r as f64);
    }
    p
}

/// Smallest `r` with `P{Poisson(λ) > r} ≤ mass`.
fn poisson_cutoff(lambda: f64, mass: f64) -> usize {
    let mut r = lambda.ceil() as usize;
    loop {
        let pmf = poisson_pmf(lambda, r + 200);
        let tail: f64 = pmf[r + 1..].iter().sum();
        if tail <= mass {
            return r;
        }
        r += 1;
    }
}

/// Exact check of `E Tr e^{−θ(Ŷ − E Ŷ)} ≤ 2·E Tr e^{−θ(X − E X)}` where
/// `Ŷ = Σ δ_i A_i` with multinomial counts of `k` uniform draws from the `n`
/// matrices, and `X = Σ Q_i A_i` with `Q_i ~ Poisson(k/n)` iid.
///
/// The left side enumerates all `n^k` placements. The right side sums over
/// count vectors with every `Q_i ≤ r`, where `r` leaves at most
/// `tail_mass/n` of each Poisson law out; the omitted terms are positive, so
/// the truncated value is a lower bound and the comparison is conservative.
pub fn poissonization_check(
    a_list: &[SymMatrix<f64>],
    k: usize,
    thetas: &[f64],
    opts: PoissonOptions,
) -> Result<VerificationReport> {
    let n = a_list.len();
    if n == 0 || k == 0 {
        return invalid("need at least one matrix and k ≥ 1");
    }
    let placements = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if placements > MAX_PLACEMENTS as u128 {
        return Err(Error::Budget(format!("n^k = {placements} placements exceed {MAX_PLACEMENTS}")));
    }
    let d = a_list[0].dim();
    for (i, a) in a_list.iter().enumerate() {
        check_dim(d, a.dim())?;
        if !a.is_psd(PSD_TOL)? {
            return invalid(format!("matrix {i} is not psd"));
        }
    }
    if thetas.iter().any(|t| !(*t >= 0.0)) {
        return invalid("θ must be nonnegative");
    }
    if !(opts.tail_mass > 0.0 && opts.tail_mass < 1.0) {
        return invalid("tail mass must lie in (0, 1)");
    }
    let lambda = k as f64 / n as f64;
    let field = a_list.iter().fold(a_list[0].field(), |f, a| f.join(a.field()));
    let mut mean = SymMatrix::zeros(d, field);
    for a in a_list {
        mean.axpy(lambda, a)?;
    }
    let combo = |counts: &[usize]| -> Result<Vec<f64>> {
        let mut m = mean.scaled(-1.0);
        for (c, a) in counts.iter().zip(a_list) {
            if *c > 0 {
                m.axpy(*c as f64, a)?;
            }
        }
        m.eigvals()
    };

    let mut lhs_eigs = Vec::with_capacity(placements as usize);
    for code in 0..placements as usize {
        let mut counts = vec![0usize; n];
        let mut c = code;
        for _ in 0..k {
            counts[c % n] += 1;
            c /= n;
        }
        lhs_eigs.push(combo(&counts)?);
    }

    let r = poisson_cutoff(lambda, opts.tail_mass / n as f64);
    let evaluations = ((r + 1) as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if evaluations > opts.max_evaluations as u128 {
        return Err(Error::Budget(format!("{evaluations} Poisson count vectors exceed {}", opts.max_evaluations)));
    }
    let pmf = poisson_pmf(lambda, r);
    let rhs_terms = (0..evaluations as usize)
        .into_par_iter()
        .map(|code| {
            let mut counts = vec![0usize; n];
            let mut c = code;
            let mut w = 1.0;
            for slot in counts.iter_mut() {
                *slot = c % (r + 1);
                w *= pmf[*slot];
                c /= r + 1;
            }
            combo(&counts).map(|e| (w, e))
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = thetas
        .iter()
        .map(|&theta| {
            let lhs = lhs_eigs.iter().map(|e| log_trace_exp(e, theta).exp()).sum::<f64>() / placements as f64;
            let rhs: f64 = rhs_terms.iter().map(|(w, e)| w * log_trace_exp(e, theta).exp()).sum();
            VerificationRow::new(fmt_g(theta), lhs, 0.0, 2.0 * rhs, 0.0, Slack::Exact)
        })
        .collect();
    Ok(VerificationReport {
        check: "poissonization".into(),
        scenario: format!("n={n},k={k},d={d}"),
        slack: Slack::Exact,
        seed: 0,
        trials: 0,
        rows,
    })
}
