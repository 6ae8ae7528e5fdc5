use std::fmt;
use std::sync::Arc;

use crate::apps::{self, DesignSystem, SparseCovProblem, SparseVectorLaw};
use crate::compare::{self, MomentSpec, PsdTerms, Theorem, PSD_TOL};
use crate::error::{check_dim, invalid, Result};
use crate::gaussmodel::GaussianModel;
use crate::matcore::{Field, RectMatrix, SymMatrix};
use crate::rng::{subkey, StreamRng};

use super::lemmas::WeightLaw;

/// Draws one realization of the random psd matrix `Y`.
pub type Sampler = Arc<dyn Fn(&mut StreamRng) -> SymMatrix<f64> + Send + Sync>;

/// A random psd sum `Y`, its expectation, and its centered Gaussian comparison `Z`.
///
/// Checks compare `Y − E Y + Δ` with `Z + Δ`. The shift `Δ` defaults to `E Y`.
#[derive(Clone)]
pub struct Scenario {
    pub name: String,
    sampler: Sampler,
    expected: SymMatrix<f64>,
    gaussian: GaussianModel<f64>,
    theorem: Theorem,
    sigma_star2: f64,
    shift: SymMatrix<f64>,
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scenario")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("theorem", &self.theorem)
            .field("sigma_star2", &self.sigma_star2)
            .finish()
    }
}

impl Scenario {
    /// A user scenario. `expected` must be the exact `E Y`; it is never
    /// estimated from the sampler. `gaussian` is the centered comparison model.
    pub fn custom(
        name: impl Into<String>,
        sampler: Sampler,
        expected: SymMatrix<f64>,
        gaussian: GaussianModel<f64>,
        theorem: Theorem,
    ) -> Result<Self> {
        check_dim(expected.dim(), gaussian.dim())?;
        if gaussian.shift().max_abs() != 0.0 {
            return invalid("the comparison model must be centered");
        }
        if !expected.is_psd(PSD_TOL)? {
            return invalid("E Y of a psd sum must be psd");
        }
        let expected = expected.to_field(gaussian.field())?;
        let sigma_star2 = gaussian.stats()?.sigma_star2;
        Ok(Scenario { name: name.into(), sampler, shift: expected.clone(), expected, gaussian, theorem, sigma_star2 })
    }

    fn from_model(name: &str, sampler: Sampler, model: GaussianModel<f64>, theorem: Theorem) -> Result<Self> {
        let expected = model.shift().clone();
        Self::custom(name, sampler, expected, model.centered(), theorem)
    }

    /// Replaces the default shift `Δ = E Y`.
    pub fn with_shift(mut self, shift: SymMatrix<f64>) -> Result<Self> {
        check_dim(self.dim(), shift.dim())?;
        self.shift = shift.to_field(self.expected.field().join(shift.field()))?;
        Ok(self)
    }

    /// Replaces σ*²(Z) by a proven upper bound.
    pub fn with_sigma_star2(mut self, s: f64) -> Self {
        self.sigma_star2 = s;
        self
    }

    pub fn dim(&self) -> usize {
        self.expected.dim()
    }

    pub fn theorem(&self) -> Theorem {
        self.theorem
    }

    /// 1 for weighted sums, 2 for iid sums.
    pub fn factor(&self) -> f64 {
        match self.theorem {
            Theorem::Weighted => 1.0,
            Theorem::Iid => 2.0,
        }
    }

    pub fn dim_factor(&self) -> f64 {
        self.theorem.dim_factor(self.dim())
    }

    pub fn sigma_star2(&self) -> f64 {
        self.sigma_star2
    }

    pub fn expected(&self) -> &SymMatrix<f64> {
        &self.expected
    }

    pub fn shift(&self) -> &SymMatrix<f64> {
        &self.shift
    }

    /// Centered comparison model `Z`.
    pub fn gaussian(&self) -> &GaussianModel<f64> {
        &self.gaussian
    }

    /// `Z + Δ`.
    pub fn shifted_gaussian(&self) -> GaussianModel<f64> {
        self.gaussian.with_shift(self.shift.clone()).expect("dimensions checked at construction")
    }

    pub fn sample(&self, rng: &mut StreamRng) -> SymMatrix<f64> {
        (self.sampler)(rng)
    }

    /// `Y − E Y + Δ` for trial `i`.
    pub(crate) fn centered_trial(&self, seed: u64, i: usize) -> SymMatrix<f64> {
        let mut rng = StreamRng::new(subkey(seed, 1), i as u64);
        let y = self.sample(&mut rng);
        y.sub(&self.expected).and_then(|m| m.add(&self.shift)).expect("sampler dimension matches E Y")
    }

    /// `Z + Δ` for trial `i`, on a stream independent of the `Y` draws.
    pub(crate) fn gaussian_trial(&self, seed: u64, i: usize) -> SymMatrix<f64> {
        let mut rng = StreamRng::new(subkey(seed, 2), i as u64);
        self.gaussian.sample_with(&mut rng).add(&self.shift).expect("dimensions checked at construction")
    }
}

/// Constructors for the built-in scenarios.
#[derive(Clone, Debug)]
pub enum BuiltinScenario {
    /// `Y = Σ ξ_i A_i`, `ξ_i ~ Bernoulli(p)`, with the given `A_i` or random
    /// psd `A_i` generated from `seed`.
    BernoulliWeighted { d: usize, n: usize, p: f64, matrices: Option<Vec<SymMatrix<f64>>>, seed: u64 },
    /// `Y = Σ_{i≤n} g_i g_iᵀ`.
    Wishart { d: usize, n: usize },
    /// `K̂_n = (1/n)Σ w_i w_iᵀ` for sparse random vectors.
    SparseCovariance { problem: SparseCovProblem, n: usize },
    /// `(ΦQ)ᵀ(ΦQ)` for a fresh sparse sketch each draw.
    SketchGram { q: RectMatrix<f64>, k: usize, zeta: f64 },
    /// `Σ_{i≤n} W_i` as a 1×1 matrix.
    ScalarSum { law: WeightLaw, n: usize },
    /// `Σ ξ_i u_i u_i*`, `ξ_i ~ Bernoulli(s/n)`.
    DesignSubsample { system: DesignSystem<f64>, s: f64 },
}

/// Names of the built-in scenarios, in catalog order.
pub fn builtin_scenarios() -> Vec<&'static str> {
    vec!["bernoulli-weighted", "wishart", "sparse-covariance", "sketch-gram", "scalar-sum", "design-subsample"]
}

/// `B Bᵀ/d` with `B` a `d×d` standard Gaussian matrix from stream `i` of `seed`.
pub(crate) fn random_psd(d: usize, seed: u64, i: u64) -> SymMatrix<f64> {
    let mut rng = StreamRng::new(seed, i);
    let b: Vec<f64> = (0..d * d).map(|_| rng.normal()).collect();
    SymMatrix::from_fn(d, |r, c| (0..d).map(|k| b[r * d + k] * b[c * d + k]).sum::<f64>() / d as f64)
        .expect("symmetric by construction")
}

impl BuiltinScenario {
    pub fn name(&self) -> &'static str {
        match self {
            BuiltinScenario::BernoulliWeighted { .. } => "bernoulli-weighted",
            BuiltinScenario::Wishart { .. } => "wishart",
            BuiltinScenario::SparseCovariance { .. } => "sparse-covariance",
            BuiltinScenario::SketchGram { .. } => "sketch-gram",
            BuiltinScenario::ScalarSum { .. } => "scalar-sum",
            BuiltinScenario::DesignSubsample { .. } => "design-subsample",
        }
    }

    pub fn build(&self) -> Result<Scenario> {
        let name = self.name();
        match self {
            BuiltinScenario::BernoulliWeighted { d, n, p, matrices, seed } => {
                let mats = match matrices {
                    Some(m) => {
                        check_dim(*n, m.len())?;
                        m.clone()
                    }
                    None => (0..*n as u64).map(|i| random_psd(*d, *seed, i)).collect(),
                };
                let spec = MomentSpec::bernoulli(&vec![*p; *n], PsdTerms::General(mats.clone()))?;
                let (p, field, dim) = (*p, mats[0].field(), mats[0].dim());
                let sampler: Sampler = Arc::new(move |rng| {
                    let mut y = SymMatrix::zeros(dim, field);
                    for a in &mats {
                        if rng.bernoulli(p) {
                            y.axpy(1.0, a).expect("same dimension");
                        }
                    }
                    y
                });
                Scenario::from_model(name, sampler, compare::weighted_model(&spec)?, Theorem::Weighted)
            }
            BuiltinScenario::Wishart { d, n } => {
                let rep = apps::wishart_report::<f64>(*d, *n)?;
                let (d, n) = (*d, *n);
                let sampler: Sampler = Arc::new(move |rng| {
                    let mut y = vec![0.0; d * d];
                    let mut g = vec![0.0; d];
                    for _ in 0..n {
                        g.iter_mut().for_each(|x| *x = rng.normal());
                        for r in 0..d {
                            for c in r..d {
                                y[r * d + c] += g[r] * g[c];
                            }
                        }
                    }
                    SymMatrix::from_fn(d, |r, c| if r <= c { y[r * d + c] } else { y[c * d + r] })
                        .expect("symmetric by construction")
                });
                Ok(Scenario::from_model(name, sampler, rep.model, Theorem::Iid)?
                    .with_sigma_star2(rep.bound.sigma_star2))
            }
            BuiltinScenario::SparseCovariance { problem, n } => {
                let rep = apps::sparse_cov_report::<f64>(problem, *n, 0.5, 0.5)?;
                let law = SparseVectorLaw::new(*problem);
                let (d, n) = (problem.d, *n);
                let sampler: Sampler = Arc::new(move |rng| {
                    let mut y = vec![0.0; d * d];
                    for _ in 0..n {
                        let w = law.sample(rng);
                        let nz: Vec<usize> = (0..d).filter(|&i| w[i] != 0.0).collect();
                        for &r in &nz {
                            for &c in &nz {
                                y[r * d + c] += w[r] * w[c] / n as f64;
                            }
                        }
                    }
                    SymMatrix::from_real(d, y).expect("symmetric by construction")
                });
                Ok(Scenario::from_model(name, sampler, rep.model, Theorem::Iid)?
                    .with_sigma_star2(rep.bound.sigma_star2))
            }
            BuiltinScenario::SketchGram { q, k, zeta } => {
                let rep = apps::injection_model::<f64>(q, *k, *zeta)?;
                let (q, k, zeta) = (q.clone(), *k, *zeta);
                let sampler: Sampler = Arc::new(move |rng| {
                    let s = apps::make_sketch::<f64>(k, q.rows(), zeta, rng.next_u64()).expect("validated parameters");
                    apps::apply_sketch(&s, &q).expect("validated shape").gram()
                });
                Ok(Scenario::from_model(name, sampler, rep.model, Theorem::Iid)?
                    .with_sigma_star2(rep.bound.sigma_star2))
            }
            BuiltinScenario::ScalarSum { law, n } => {
                let (m1, m2) = law.moments();
                let spec =
                    MomentSpec::with_matrices(vec![(m1, m2); *n], vec![SymMatrix::identity(1, Field::Real); *n])?;
                let (law, n) = (law.clone(), *n);
                let sampler: Sampler = Arc::new(move |rng| {
                    let s: f64 = (0..n).map(|_| law.sample(rng)).sum();
                    SymMatrix::scalar(1, Field::Real, s)
                });
                Scenario::from_model(name, sampler, compare::weighted_model(&spec)?, Theorem::Weighted)
            }
            BuiltinScenario::DesignSubsample { system, s } => {
                let spec = apps::design_spec(system, *s)?;
                let (system, s) = (system.clone(), *s);
                let sampler: Sampler = Arc::new(move |rng| system.subsample(s, rng).expect("validated rate"));
                Scenario::from_model(name, sampler, compare::weighted_model(&spec)?, Theorem::Weighted)
            }
        }
    }
}
