//! Sample covariance estimation: the four moment theorem and sparse random vectors.

use crate::compare::{BoundReport, Theorem};
use crate::error::{invalid, Result};
use crate::gaussmodel::{Component, GaussianModel};
use crate::matcore::{Field, SymMatrix};
use crate::rng::StreamRng;
use crate::Scalar;

use super::{ceil_count, check_unit_interval};

/// Sample size for the four moment theorem and the constants behind it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScovPlan {
    pub n: usize,
    /// `E‖Z − E Z‖ ≤ √(12β²d)` for the one-sample comparison model.
    pub norm_bound: f64,
    /// `σ*²(Z) ≤ β²` for the one-sample comparison model.
    pub sigma_star2_bound: f64,
}

/// `√(12β²d)`.
pub fn gaussian_norm_bound(beta: f64, d: usize) -> f64 {
    (12.0 * beta * beta * d as f64).sqrt()
}

/// `n ≥ 24β²·max(d, log(2d/δ))/ε²` samples give `λ_min(K̂_n) > (1 − ε)·λ`
/// along every direction with probability `1 − δ`, when fourth marginal
/// moments are at most `β²` times squared second moments.
pub fn scov_sample_size(beta: f64, d: usize, epsilon: f64, delta: f64) -> Result<ScovPlan> {
    check_unit_interval("ε", epsilon)?;
    check_unit_interval("δ", delta)?;
    if !(beta >= 1.0) || d == 0 {
        return invalid("need β ≥ 1 and d ≥ 1");
    }
    let df = d as f64;
    let n = 24.0 * beta * beta * df.max((2.0 * df / delta).ln()) / (epsilon * epsilon);
    Ok(ScovPlan { n: ceil_count(n), norm_bound: gaussian_norm_bound(beta, d), sigma_star2_bound: beta * beta })
}

/// Iid-theorem report for `K̂_n` under the fourth moment condition:
/// `E λ_min(Z) ≥ 1 − √(12β²d/n)` and `σ*²(Z) ≤ β²/n`.
pub fn scov_report<T: Scalar>(beta: f64, d: usize, n: usize) -> Result<BoundReport<T>> {
    if !(beta >= 1.0) || d == 0 || n == 0 {
        return invalid("need β ≥ 1, d ≥ 1 and n ≥ 1");
    }
    let nf = n as f64;
    let elmin = 1.0 - gaussian_norm_bound(beta, d) / nf.sqrt();
    Ok(BoundReport::analytic(T::lit(elmin), T::lit(beta * beta / nf), Theorem::Iid.dim_factor(d)))
}

/// Sparse random vector `w = √(d/ζ)·(ξ_i ψ_i)` with `ξ_i ~ Bernoulli(ζ/d)`
/// and standardized `ψ` with fourth moment `C`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparseCovProblem {
    pub d: usize,
    pub zeta: f64,
    pub c: f64,
}

impl SparseCovProblem {
    pub fn new(d: usize, zeta: f64, c: f64) -> Result<Self> {
        if d == 0 {
            return invalid("dimension must be positive");
        }
        if !(zeta > 0.0 && zeta <= d as f64) {
            return invalid(format!("sparsity ζ = {zeta} must lie in (0, d = {d}]"));
        }
        if !(c >= 1.0 && c.is_finite()) {
            return invalid(format!("fourth moment C = {c} must be at least 1"));
        }
        Ok(SparseCovProblem { d, zeta, c })
    }

    /// `Cd/ζ`.
    pub fn spike(&self) -> f64 {
        self.c * self.d as f64 / self.zeta
    }

    /// The factor `max(1, 2C log(2d/δ)/ζ)`; the first branch is the linear regime.
    pub fn regime_factor(&self, delta: f64) -> f64 {
        (2.0 * self.c * (2.0 * self.d as f64 / delta).ln() / self.zeta).max(1.0)
    }
}

/// `n ≥ 25d·max(1, 2C log(2d/δ)/ζ)/ε²`.
pub fn sparse_cov_sample_size(p: &SparseCovProblem, epsilon: f64, delta: f64) -> Result<usize> {
    check_unit_interval("ε", epsilon)?;
    check_unit_interval("δ", delta)?;
    Ok(ceil_count(25.0 * p.d as f64 * p.regime_factor(delta) / (epsilon * epsilon)))
}

/// `E(wᵀMw)² = Σ_{i≠j}(2m_ij² + m_ii m_jj) + (Cd/ζ)Σ m_ii²` for real symmetric `M`.
pub fn sparse_mom<T: Scalar>(p: &SparseCovProblem, m: &SymMatrix<T>) -> Result<T> {
    if m.field() != Field::Real {
        return invalid("the sparse covariance second moment is defined for real matrices");
    }
    crate::error::check_dim(p.d, m.dim())?;
    let d = p.d;
    let mut off = T::zero();
    let diag = m.diag();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                let mij = m.get(i, j).re;
                off += T::lit(2.0) * mij * mij + diag[i] * diag[j];
            }
        }
    }
    Ok(off + T::lit(p.spike()) * diag.iter().map(|x| *x * *x).sum::<T>())
}

/// Sampler for the sparse vector `w`.
///
/// `ψ` is `±1` when `C = 1` and otherwise the centered two-point law with unit
/// variance and fourth moment `C`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparseVectorLaw {
    pub problem: SparseCovProblem,
    /// Probability of the positive atom of `ψ`.
    p_pos: f64,
    pos: f64,
    neg: f64,
}

impl SparseVectorLaw {
    pub fn new(problem: SparseCovProblem) -> Self {
        // p(1 − p) = 1/(C + 3) for the two-point law with values √((1−p)/p) and −√(p/(1−p)).
        let q = 1.0 / (problem.c + 3.0);
        let p_pos = 0.5 * (1.0 - (1.0 - 4.0 * q).max(0.0).sqrt());
        SparseVectorLaw { problem, p_pos, pos: ((1.0 - p_pos) / p_pos).sqrt(), neg: -(p_pos / (1.0 - p_pos)).sqrt() }
    }

    /// Values and probabilities of `ψ`.
    pub fn psi_atoms(&self) -> [(f64, f64); 2] {
        [(self.pos, self.p_pos), (self.neg, 1.0 - self.p_pos)]
    }

    pub fn sample(&self, rng: &mut StreamRng) -> Vec<f64> {
        let d = self.problem.d as f64;
        let rate = self.problem.zeta / d;
        let scale = (d / self.problem.zeta).sqrt();
        (0..self.problem.d)
            .map(|_| {
                if rng.bernoulli(rate) {
                    scale * if rng.bernoulli(self.p_pos) { self.pos } else { self.neg }
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// Comparison model for `K̂_n` and its bound.
#[derive(Clone, Debug)]
pub struct SparseCovReport<T: Scalar> {
    /// Sample count required for accuracy `ε` with failure probability `δ`.
    pub n_required: usize,
    pub model: GaussianModel<T>,
    pub bound: BoundReport<T>,
}

/// `Z = I + n^{-1/2}G_goe + n^{-1/2}γI + √(Cd/(ζn))·D` with
/// `E λ_min(Z) ≥ 1 − 2√(d/n) − √(2Cd log d/(ζn))` and `σ*²(Z) ≤ (3 + Cd/ζ)/n`.
pub fn sparse_cov_report<T: Scalar>(
    p: &SparseCovProblem,
    n: usize,
    epsilon: f64,
    delta: f64,
) -> Result<SparseCovReport<T>> {
    if n == 0 {
        return invalid("sample count must be positive");
    }
    let n_required = sparse_cov_sample_size(p, epsilon, delta)?;
    let (d, nf) = (p.d as f64, n as f64);
    let model = GaussianModel::new(SymMatrix::identity(p.d, Field::Real))
        .with(Component::Goe { coeff: T::lit(nf.powf(-0.5)) })?
        .with(Component::Scalar { coeff: T::lit(nf.powf(-0.5)) })?
        .with(Component::Diagonal { coeff: T::lit((p.spike() / nf).sqrt()) })?;
    let elmin = 1.0 - 2.0 * (d / nf).sqrt() - (2.0 * p.spike() * d.ln() / nf).sqrt();
    let s2 = (3.0 + p.spike()) / nf;
    let bound = BoundReport::analytic(T::lit(elmin), T::lit(s2), Theorem::Iid.dim_factor(p.d));
    Ok(SparseCovReport { n_required, model, bound })
}
