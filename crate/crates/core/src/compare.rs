//! Bound engines: the weighted and iid comparison theorems, the scalar
//! positive-sum tail, and the coarse matrix baselines they are measured against.

use std::fmt;

use crate::error::{check_dim, invalid, Error, Result};
use crate::gaussmodel::{Component, GaussianModel};
use crate::matcore::{Field, RectMatrix, SymMatrix};
use crate::report::{fmt_g, CsvRecord};
use crate::Scalar;

/// Psd tolerance on inputs: `λ_min ≥ −PSD_TOL·‖A‖`.
pub const PSD_TOL: f64 = 1e-10;

/// Which comparison theorem a bound comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    /// Independent random weights on fixed psd matrices; dimension factor `d`.
    Weighted,
    /// Sum of iid random psd matrices; dimension factor `2d`.
    Iid,
}

impl Theorem {
    /// `d` or `2d`. In dimension one both theorems reduce to the scalar
    /// positive-sum tail, whose prefactor is 1.
    pub fn dim_factor<T: Scalar>(self, d: usize) -> T {
        match (self, d) {
            (_, 1) => T::one(),
            (Theorem::Weighted, _) => T::count(d),
            (Theorem::Iid, _) => T::count(2 * d),
        }
    }
}

/// Where `E λ_min(Z)` comes from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ElminSource<T> {
    /// A known value or a proven lower bound.
    Analytic(T),
    /// Monte Carlo over `trials` draws of `Z`.
    MonteCarlo { trials: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    MonteCarlo,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Analytic => "analytic",
            Provenance::MonteCarlo => "mc",
        })
    }
}

/// Expectation and tail bounds for `λ_min(Y)`.
///
/// `expectation_lb = elmin_z − √(2·sigma_star2·log dim_factor)` and the tail is
/// `t ↦ tail_coefficient·exp(−t²·tail_rate)` with `tail_coefficient = dim_factor`
/// and `tail_rate = 1/(2·sigma_star2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport<T> {
    pub elmin_z: T,
    pub elmin_z_stderr: T,
    pub elmin_provenance: Provenance,
    pub sigma_star2: T,
    pub dim_factor: T,
    pub expectation_lb: T,
    pub tail_coefficient: T,
    pub tail_rate: T,
}

impl<T: Scalar> BoundReport<T> {
    pub fn new(elmin_z: T, elmin_z_stderr: T, elmin_provenance: Provenance, sigma_star2: T, dim_factor: T) -> Self {
        let two = T::lit(2.0);
        let expectation_lb = elmin_z - (two * sigma_star2 * dim_factor.ln()).max(T::zero()).sqrt();
        let tail_rate = if sigma_star2 > T::zero() { T::one() / (two * sigma_star2) } else { T::infinity() };
        BoundReport {
            elmin_z,
            elmin_z_stderr,
            elmin_provenance,
            sigma_star2,
            dim_factor,
            expectation_lb,
            tail_coefficient: dim_factor,
            tail_rate,
        }
    }

    pub fn analytic(elmin_z: T, sigma_star2: T, dim_factor: T) -> Self {
        Self::new(elmin_z, T::zero(), Provenance::Analytic, sigma_star2, dim_factor)
    }

    /// Bound on `P{λ_min(Y) ≤ elmin_z − t}`, unclipped. With zero weak variance
    /// the sum is concentrated: the bound is the coefficient at `t = 0` and 0 beyond.
    pub fn tail(&self, t: T) -> T {
        if self.tail_rate.is_infinite() {
            return if t > T::zero() { T::zero() } else { self.tail_coefficient };
        }
        self.tail_coefficient * (-t * t * self.tail_rate).exp()
    }

    /// `min(1, tail(t))`.
    pub fn tail_probability(&self, t: T) -> T {
        self.tail(t).min(T::one())
    }

    /// Smallest `t` with `tail(t) ≤ p`.
    pub fn deviation_at(&self, p: T) -> T {
        if p >= self.tail_coefficient || self.tail_rate.is_infinite() {
            return T::zero();
        }
        ((self.tail_coefficient / p).ln() / self.tail_rate).sqrt()
    }

    /// Flat `key=value` lines.
    pub fn to_key_values(&self) -> String {
        Self::header().iter().zip(self.record()).map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

impl<T: Scalar> CsvRecord for BoundReport<T> {
    fn header() -> Vec<&'static str> {
        vec![
            "elmin_z",
            "elmin_z_stderr",
            "elmin_provenance",
            "sigma_star2",
            "dim_factor",
            "expectation_lb",
            "tail_coefficient",
            "tail_rate",
        ]
    }

    fn record(&self) -> Vec<String> {
        let f = |x: T| fmt_g(x.as_f64());
        vec![
            f(self.elmin_z),
            f(self.elmin_z_stderr),
            self.elmin_provenance.to_string(),
            f(self.sigma_star2),
            f(self.dim_factor),
            f(self.expectation_lb),
            f(self.tail_coefficient),
            f(self.tail_rate),
        ]
    }
}

/// Resolves an [`ElminSource`] against a model.
pub fn resolve_elmin<T: Scalar>(model: &GaussianModel<T>, source: ElminSource<T>) -> Result<(T, T, Provenance)> {
    match source {
        ElminSource::Analytic(v) => Ok((v, T::zero(), Provenance::Analytic)),
        ElminSource::MonteCarlo { trials, seed } => {
            let e = model.mc_expected_lmin(trials, seed)?;
            Ok((e.estimate, e.stderr, Provenance::MonteCarlo))
        }
    }
}

/// Bound report for a comparison model under the given theorem, with σ*²
/// taken from the model statistics.
pub fn model_bounds<T: Scalar>(
    model: &GaussianModel<T>,
    theorem: Theorem,
    source: ElminSource<T>,
) -> Result<BoundReport<T>> {
    let s = model.stats()?;
    let (e, se, p) = resolve_elmin(model, source)?;
    Ok(BoundReport::new(e, se, p, s.sigma_star2, theorem.dim_factor(model.dim())))
}

/// The fixed psd matrices of a weighted sum.
#[derive(Clone, Debug, PartialEq)]
pub enum PsdTerms<T: Scalar> {
    General(Vec<SymMatrix<T>>),
    /// `A_i = u_i u_i*` with `u_i` the columns.
    RankOne(RectMatrix<T>),
}

/// First two moments of independent nonnegative weights, optionally with the
/// psd matrices they multiply.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSpec<T: Scalar> {
    entries: Vec<(T, T)>,
    terms: Option<PsdTerms<T>>,
}

fn check_moments<T: Scalar>(entries: &[(T, T)]) -> Result<()> {
    for (i, &(m1, m2)) in entries.iter().enumerate() {
        if !(m1.is_finite() && m2.is_finite()) || m1 < T::zero() || m2 < m1 * m1 * (T::one() - T::tol(1e-12)) {
            return invalid(format!("moment pair {i} ({m1}, {m2}) violates m2 ≥ m1² ≥ 0"));
        }
    }
    Ok(())
}

impl<T: Scalar> MomentSpec<T> {
    /// Scalar weights only.
    pub fn scalar(entries: Vec<(T, T)>) -> Result<Self> {
        check_moments(&entries)?;
        Ok(MomentSpec { entries, terms: None })
    }

    /// Weights on general psd matrices.
    pub fn with_matrices(entries: Vec<(T, T)>, matrices: Vec<SymMatrix<T>>) -> Result<Self> {
        check_moments(&entries)?;
        check_dim(entries.len(), matrices.len())?;
        let Some(first) = matrices.first() else { return invalid("no matrices") };
        for (i, a) in matrices.iter().enumerate() {
            check_dim(first.dim(), a.dim())?;
            if !a.is_psd(T::tol(PSD_TOL))? {
                return invalid(format!("matrix {i} is not psd"));
            }
        }
        Ok(MomentSpec { entries, terms: Some(PsdTerms::General(matrices)) })
    }

    /// Weights on rank-one matrices `u_i u_i*`, with `u_i` the columns of `vectors`.
    pub fn with_rank_one(entries: Vec<(T, T)>, vectors: RectMatrix<T>) -> Result<Self> {
        check_moments(&entries)?;
        check_dim(entries.len(), vectors.cols())?;
        Ok(MomentSpec { entries, terms: Some(PsdTerms::RankOne(vectors)) })
    }

    /// Bernoulli(p_i) weights, for which `E W = E W² = p`.
    pub fn bernoulli(probs: &[T], terms: PsdTerms<T>) -> Result<Self> {
        if probs.iter().any(|&p| !(p >= T::zero() && p <= T::one())) {
            return invalid("Bernoulli probabilities must lie in [0, 1]");
        }
        let entries = probs.iter().map(|&p| (p, p)).collect();
        match terms {
            PsdTerms::General(m) => Self::with_matrices(entries, m),
            PsdTerms::RankOne(v) => Self::with_rank_one(entries, v),
        }
    }

    pub fn entries(&self) -> &[(T, T)] {
        &self.entries
    }

    pub fn terms(&self) -> Option<&PsdTerms<T>> {
        self.terms.as_ref()
    }

    /// `L₂ = Σ E W_i²`.
    pub fn l2(&self) -> T {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// `Σ E W_i`.
    pub fn mean(&self) -> T {
        self.entries.iter().map(|e| e.0).sum()
    }

    fn dim_field(&self) -> Result<(usize, Field)> {
        match &self.terms {
            Some(PsdTerms::General(m)) => Ok((m[0].dim(), m.iter().fold(m[0].field(), |f, a| f.join(a.field())))),
            Some(PsdTerms::RankOne(v)) => Ok((v.rows(), v.field())),
            None => invalid("moment spec has no matrices"),
        }
    }

    /// `E Y = Σ E W_i·A_i`.
    pub fn expected_sum(&self) -> Result<SymMatrix<T>> {
        Ok(weighted_model(self)?.shift().clone())
    }

    /// `Σ E W_i²·A_i²`.
    pub fn second_moment_sum(&self) -> Result<SymMatrix<T>> {
        let (d, f) = self.dim_field()?;
        let mut s = SymMatrix::zeros(d, f);
        for (i, a) in self.matrices()?.iter().enumerate() {
            s = s.add_scaled(self.entries[i].1, &a.square())?;
        }
        Ok(s)
    }

    /// The matrices `A_i` in dense form.
    pub fn matrices(&self) -> Result<Vec<SymMatrix<T>>> {
        match &self.terms {
            Some(PsdTerms::General(m)) => Ok(m.clone()),
            Some(PsdTerms::RankOne(v)) => Ok((0..v.cols())
                .map(|k| SymMatrix::outer_complex(&v.column(k)).to_field(v.field()).expect("field-consistent"))
                .collect()),
            None => invalid("moment spec has no matrices"),
        }
    }
}

/// Rank-one factor `A = λ v v*` when `A` has numerical rank at most one.
fn rank_one_factor<T: Scalar>(a: &SymMatrix<T>) -> Result<Option<(T, RectMatrix<T>)>> {
    let e = a.eigen()?;
    let d = a.dim();
    let top = e.values[d - 1];
    if top <= T::zero() {
        return Ok(Some((T::zero(), RectMatrix::identity_columns(d, 1, a.field()))));
    }
    let rest = e.values[..d - 1].iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if rest > T::tol(1e-12) * top {
        return Ok(None);
    }
    let col = e.vectors.column(d - 1);
    let v = RectMatrix::from_complex_columns(&[col])?.to_field(a.field())?;
    Ok(Some((top, v)))
}

/// Gaussian comparison model `Z = Σ X_i A_i`, `X_i ~ N(E W_i, E W_i²)`.
///
/// The series coefficients are `√(E W_i²)·A_i`, stored as a rank-one series
/// when every `A_i` has rank one.
pub fn weighted_model<T: Scalar>(spec: &MomentSpec<T>) -> Result<GaussianModel<T>> {
    let (d, f) = spec.dim_field()?;
    let mut shift = SymMatrix::zeros(d, f);
    let comp = match spec.terms.as_ref().expect("checked by dim_field") {
        PsdTerms::RankOne(v) => {
            for (k, &(m1, _)) in spec.entries.iter().enumerate() {
                shift = shift.add_scaled(m1, &SymMatrix::outer_complex(&v.column(k)).to_field(f)?)?;
            }
            Component::RankOneSeries { weights: spec.entries.iter().map(|e| e.1).collect(), vectors: v.clone() }
        }
        PsdTerms::General(ms) => {
            for (a, &(m1, _)) in ms.iter().zip(&spec.entries) {
                shift = shift.add_scaled(m1, a)?;
            }
            let factors = ms.iter().map(rank_one_factor).collect::<Result<Option<Vec<_>>>>()?;
            match factors {
                Some(fs) => {
                    let weights = fs.iter().zip(&spec.entries).map(|((lam, _), e)| e.1 * *lam * *lam).collect();
                    let cols: Vec<Vec<_>> = fs.iter().map(|(_, v)| v.column(0)).collect();
                    let vectors = RectMatrix::from_complex_columns(&cols)?.to_field(f)?;
                    Component::RankOneSeries { weights, vectors }
                }
                None => Component::GeneralSeries {
                    matrices: ms
                        .iter()
                        .zip(&spec.entries)
                        .map(|(a, e)| a.to_field(f).map(|a| a.scaled(e.1.sqrt())))
                        .collect::<Result<_>>()?,
                },
            }
        }
    };
    GaussianModel::new(shift).with(comp)
}

/// `σ*²(Z) = max_u Σ E W_i²·(u*A_i u)²` and whether the value is exact.
pub fn weighted_sigma_star2<T: Scalar>(spec: &MomentSpec<T>) -> Result<(T, bool)> {
    let s = weighted_model(spec)?.stats()?;
    Ok((s.sigma_star2, s.sigma_star2_is_exact))
}

/// Weighted comparison bound with dimension factor `d`.
pub fn weighted_bounds<T: Scalar>(spec: &MomentSpec<T>, source: ElminSource<T>) -> Result<BoundReport<T>> {
    model_bounds(&weighted_model(spec)?, Theorem::Weighted, source)
}

/// How the variance domination `Var[X] ≥ Mom[W]` is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certification {
    /// Closed-form argument supplied by the caller.
    CallerAsserted,
    /// Checked empirically against samples of `W`; approximate.
    SampleCertified,
}

/// One iid summand `W` described by its mean and a dominating Gaussian part.
#[derive(Clone, Debug)]
pub struct IidSummandSpec<T: Scalar> {
    pub mean: SymMatrix<T>,
    /// Centered Gaussian `X − E X` with `Var[X] ≥ Mom[W]`.
    pub component: GaussianModel<T>,
    pub n: usize,
    pub certification: Certification,
}

/// Number of random test matrices used for sample certification.
pub const CERTIFY_PROBES: usize = 200;

impl<T: Scalar> IidSummandSpec<T> {
    pub fn new(
        mean: SymMatrix<T>,
        component: GaussianModel<T>,
        n: usize,
        certification: Certification,
    ) -> Result<Self> {
        if n == 0 {
            return invalid("copy count n must be at least 1");
        }
        check_dim(mean.dim(), component.dim())?;
        if component.shift().max_abs() != T::zero() {
            return invalid("comparison component must be centered");
        }
        if !mean.is_psd(T::tol(PSD_TOL))? {
            return invalid("mean of a psd summand must be psd");
        }
        let mean = mean.to_field(component.field())?;
        Ok(IidSummandSpec { mean, component, n, certification })
    }

    /// Checks `Var[X](M) ≥ Mom[W](M) − 3·se` on random test matrices using
    /// samples of `W`; marks the spec sample-certified on success.
    pub fn certify_with_samples(mut self, samples: &[SymMatrix<T>], seed: u64) -> Result<Self> {
        if samples.len() < 2 {
            return invalid("certification needs at least two samples");
        }
        let mut rng = crate::rng::StreamRng::new(seed, 0);
        let d = self.mean.dim();
        for probe in 0..CERTIFY_PROBES {
            let m = random_test_matrix::<T>(d, self.component.field(), &mut rng);
            let vals = samples.iter().map(|w| m.trace_inner(w).map(|x| x * x)).collect::<Result<Vec<T>>>()?;
            let est = crate::gaussmodel::McEstimate::from_samples(&vals)?;
            let var = self.component.var_eval(&m)?;
            if var < est.estimate - T::lit(3.0) * est.stderr - T::tol(1e-12) * est.estimate.abs() {
                return Err(Error::Validation(format!(
                    "comparison variance {var} is below the sampled second moment {} on probe {probe}",
                    est.estimate
                )));
            }
        }
        self.certification = Certification::SampleCertified;
        Ok(self)
    }
}

fn random_test_matrix<T: Scalar>(d: usize, f: Field, rng: &mut crate::rng::StreamRng) -> SymMatrix<T> {
    let mut v = vec![num_complex::Complex::new(T::zero(), T::zero()); d * d];
    for i in 0..d {
        v[i * d + i].re = T::lit(rng.normal());
        for j in i + 1..d {
            let im = if f == Field::Complex { T::lit(rng.normal()) } else { T::zero() };
            let z = num_complex::Complex::new(T::lit(rng.normal()), im);
            v[i * d + j] = z;
            v[j * d + i] = z.conj();
        }
    }
    SymMatrix::from_complex(d, v).and_then(|m| m.to_field(f)).expect("Hermitian by construction")
}

/// Comparison model `Z = n·E W + √n·(X − E X)`.
pub fn iid_model<T: Scalar>(spec: &IidSummandSpec<T>) -> Result<GaussianModel<T>> {
    let n = T::count(spec.n);
    spec.component.scaled(n.sqrt()).with_shift(spec.mean.scaled(n))
}

/// iid comparison bound with dimension factor `2d`.
pub fn iid_bounds<T: Scalar>(spec: &IidSummandSpec<T>, source: ElminSource<T>) -> Result<BoundReport<T>> {
    model_bounds(&iid_model(spec)?, Theorem::Iid, source)
}

/// Empirical summand spec: mean is the sample average and the component is
/// the series `Σ γ_j W_j/√m`, whose variance function is the empirical `Mom`.
pub fn iid_model_from_samples<T: Scalar>(samples: &[SymMatrix<T>], n: usize) -> Result<IidSummandSpec<T>> {
    if samples.len() < 2 {
        return invalid("at least two samples are needed");
    }
    let d = samples[0].dim();
    let f = samples.iter().fold(samples[0].field(), |f, s| f.join(s.field()));
    let m = T::count(samples.len());
    let mut mean = SymMatrix::zeros(d, f);
    let mut matrices = Vec::with_capacity(samples.len());
    for (j, w) in samples.iter().enumerate() {
        check_dim(d, w.dim())?;
        if !w.is_psd(T::tol(PSD_TOL))? {
            return invalid(format!("sample {j} is not psd"));
        }
        let w = w.to_field(f)?;
        mean = mean.add_scaled(T::one() / m, &w)?;
        matrices.push(w.scaled(T::one() / m.sqrt()));
    }
    let component = GaussianModel::zero(d, f).with(Component::GeneralSeries { matrices })?;
    IidSummandSpec::new(mean, component, n, Certification::SampleCertified)
}

/// `P{X ≤ E X − t} ≤ exp(−t²/(2L₂))` for `X = Σ W_i` with independent `W_i ≥ 0`.
///
/// With `L₂ = 0` the sum is deterministic and the bound is 0 for every `t > 0`.
pub fn scalar_tail<T: Scalar>(moments: &[(T, T)], t: T) -> Result<T> {
    check_moments(moments)?;
    if !(t >= T::zero()) {
        return invalid("t must be nonnegative");
    }
    let l2: T = moments.iter().map(|m| m.1).sum();
    if l2 == T::zero() {
        return Ok(if t > T::zero() { T::zero() } else { T::one() });
    }
    Ok((-t * t / (T::lit(2.0) * l2)).exp())
}

/// `E e^{−θX} ≤ exp(−θ·Σ E W_i + θ²L₂/2)` for `θ ≥ 0`.
pub fn scalar_mgf_bound<T: Scalar>(moments: &[(T, T)], theta: T) -> Result<T> {
    check_moments(moments)?;
    if !(theta >= T::zero()) {
        return invalid("θ must be nonnegative");
    }
    let m1: T = moments.iter().map(|m| m.0).sum();
    let l2: T = moments.iter().map(|m| m.1).sum();
    Ok((-theta * m1 + theta * theta * l2 / T::lit(2.0)).exp())
}

/// Exponential Paley–Zygmund baseline: `λ_min(E Y) − √(2L₂ log d)` with
/// `L₂ = ‖Σ E W_i²‖`, tail `d·e^{−t²/(2L₂)}`. The report's `sigma_star2` slot
/// carries `L₂`.
pub fn epz_bounds<T: Scalar>(second_moment_sum: &SymMatrix<T>, expected_sum: &SymMatrix<T>) -> Result<BoundReport<T>> {
    check_dim(expected_sum.dim(), second_moment_sum.dim())?;
    if !second_moment_sum.is_psd(T::tol(PSD_TOL))? {
        return invalid("second moment sum must be psd");
    }
    let l2 = second_moment_sum.lambda_max()?.max(T::zero());
    Ok(BoundReport::analytic(expected_sum.lambda_min()?, l2, T::count(expected_sum.dim())))
}

/// Coarse bound `λ_min(E Z) − 2√(2σ²(Z) log(2d))`.
pub fn bern_lb<T: Scalar>(model: &GaussianModel<T>) -> Result<T> {
    let s2 = model.sigma2()?;
    let d = T::count(model.dim());
    Ok(model.shift().lambda_min()? - T::lit(2.0) * (T::lit(2.0) * s2 * (T::lit(2.0) * d).ln()).sqrt())
}
