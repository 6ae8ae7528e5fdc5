//! Random subsystems of complex projective designs.

use num_complex::Complex;

use crate::compare::{BoundReport, MomentSpec, PsdTerms};
use crate::error::{invalid, Result};
use crate::matcore::{Field, RectMatrix, SymMatrix};
use crate::rng::StreamRng;
use crate::Scalar;

use super::check_unit_interval;

/// Above this dimension the order-2 check uses random probes instead of a
/// full basis of `H_d`.
pub const PROBE_MODE_MIN_DIM: usize = 31;

const PROBES: usize = 200;
const PROBE_SEED: u64 = 0xde5196;

/// A finite system of unit vectors, stored as the columns of a `d×n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignSystem<T: Scalar> {
    vectors: RectMatrix<T>,
}

impl<T: Scalar> DesignSystem<T> {
    pub fn new(vectors: RectMatrix<T>) -> Result<Self> {
        if vectors.cols() == 0 || vectors.rows() == 0 {
            return invalid("a design system needs at least one vector");
        }
        for (j, norm) in column_norms_sq(&vectors).into_iter().enumerate() {
            if (norm.sqrt() - T::one()).abs() > T::tol(1e-10) {
                return invalid(format!("vector {j} has norm {}", norm.sqrt()));
            }
        }
        Ok(DesignSystem { vectors })
    }

    pub fn vectors(&self) -> &RectMatrix<T> {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.rows()
    }

    pub fn len(&self) -> usize {
        self.vectors.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Each vector repeated `r` times in a row.
    pub fn replicate(&self, r: usize) -> Result<Self> {
        if r == 0 {
            return invalid("replication count must be positive");
        }
        let cols: Vec<Vec<Complex<T>>> =
            (0..self.len()).flat_map(|j| std::iter::repeat_n(self.vectors.column(j), r)).collect();
        Ok(DesignSystem { vectors: RectMatrix::from_complex_columns(&cols)?.to_field(self.vectors.field())? })
    }

    /// `Y = Σ ξ_i u_i u_i*` with `ξ_i ~ Bernoulli(s/n)` drawn from `rng`.
    pub fn subsample(&self, s: T, rng: &mut StreamRng) -> Result<SymMatrix<T>> {
        let p = (s / T::count(self.len())).as_f64();
        if !(0.0..=1.0).contains(&p) {
            return invalid(format!("sampling rate s/n = {p} must lie in [0, 1]"));
        }
        let d = self.dim();
        let mut y = SymMatrix::zeros(d, self.vectors.field());
        for j in 0..self.len() {
            if rng.bernoulli(p) {
                y.axpy(T::one(), &SymMatrix::outer_complex(&self.vectors.column(j)).to_field(y.field())?)?;
            }
        }
        Ok(y)
    }
}

fn column_norms_sq<T: Scalar>(v: &RectMatrix<T>) -> Vec<T> {
    (0..v.cols()).map(|j| v.column(j).iter().map(|z| z.norm_sqr()).sum()).collect()
}

/// The six vectors of three mutually unbiased bases of `C²`:
/// `e_1, e_2, (e_1 ± e_2)/√2, (e_1 ± i e_2)/√2`.
pub fn mub_c2<T: Scalar>() -> DesignSystem<T> {
    let (o, z, h) = (T::one(), T::zero(), T::FRAC_1_SQRT_2());
    let c = |re: T, im: T| Complex::new(re, im);
    let cols = vec![
        vec![c(o, z), c(z, z)],
        vec![c(z, z), c(o, z)],
        vec![c(h, z), c(h, z)],
        vec![c(h, z), c(-h, z)],
        vec![c(h, z), c(z, h)],
        vec![c(h, z), c(z, -h)],
    ];
    DesignSystem::new(RectMatrix::from_complex_columns(&cols).expect("consistent shape")).expect("unit vectors")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// Exact comparison over an orthonormal basis of `H_d`.
    Basis,
    /// Random Hermitian test matrices.
    Probes,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignCheck<T> {
    pub holds: bool,
    pub residual: T,
    pub mode: CheckMode,
}

/// Projective design residual of arbitrary vectors.
///
/// Order 1: `‖(1/n)Σ u_i u_i* − I/d‖_F`. Order 2 compares the quadratic forms
/// `M ↦ (1/n)Σ |⟨M, u_i u_i*⟩|²` and `M ↦ (‖M‖_F² + (Tr M)²)/(d(d+1))` on
/// `H_d(C)`: in basis mode the residual is the largest entry of the difference
/// of their Gram matrices in an orthonormal basis, which vanishes exactly for
/// a 2-design; in probe mode it is the largest relative gap over random `M`.
pub fn design_residual<T: Scalar>(vectors: &RectMatrix<T>, order: u8) -> Result<(T, CheckMode)> {
    let (d, n) = (vectors.rows(), vectors.cols());
    if d == 0 || n == 0 {
        return invalid("empty vector system");
    }
    let nt = T::count(n);
    match order {
        1 => {
            let mut frame = SymMatrix::zeros(d, Field::Complex);
            for j in 0..n {
                frame.axpy(T::one() / nt, &SymMatrix::outer_complex(&vectors.column(j)))?;
            }
            Ok((frame.shifted(-T::one() / T::count(d)).frobenius_norm(), CheckMode::Basis))
        }
        2 if d < PROBE_MODE_MIN_DIM => Ok((basis_residual(vectors), CheckMode::Basis)),
        2 => Ok((probe_residual(vectors)?, CheckMode::Probes)),
        _ => invalid(format!("design order must be 1 or 2, got {order}")),
    }
}

/// Coordinates of `u u*` in the orthonormal basis
/// `E_jj, (E_jk + E_kj)/√2, i(E_jk − E_kj)/√2` of `H_d(C)`. Only the first
/// `d` basis elements have nonzero trace.
fn hermitian_coordinates<T: Scalar>(u: &[Complex<T>]) -> Vec<T> {
    let d = u.len();
    let r2 = T::SQRT_2();
    let mut c = Vec::with_capacity(d * d);
    for z in u {
        c.push(z.norm_sqr());
    }
    for j in 0..d {
        for k in j + 1..d {
            let p = u[j].conj() * u[k];
            c.push(r2 * p.re);
            c.push(-r2 * p.im);
        }
    }
    c
}

fn basis_residual<T: Scalar>(vectors: &RectMatrix<T>) -> T {
    let (d, n) = (vectors.rows(), vectors.cols());
    let m = d * d;
    let mut q = vec![T::zero(); m * m];
    for j in 0..n {
        let c = hermitian_coordinates(&vectors.column(j));
        for a in 0..m {
            let ca = c[a];
            if ca == T::zero() {
                continue;
            }
            for b in a..m {
                q[a * m + b] += ca * c[b];
            }
        }
    }
    let nt = T::count(n);
    let norm = T::one() / T::count(d * (d + 1));
    let mut worst = T::zero();
    for a in 0..m {
        for b in a..m {
            let trace_a = if a < d { T::one() } else { T::zero() };
            let trace_b = if b < d { T::one() } else { T::zero() };
            let delta = if a == b { T::one() } else { T::zero() };
            let target = (delta + trace_a * trace_b) * norm;
            worst = worst.max((q[a * m + b] / nt - target).abs());
        }
    }
    worst
}

fn probe_residual<T: Scalar>(vectors: &RectMatrix<T>) -> Result<T> {
    let (d, n) = (vectors.rows(), vectors.cols());
    let mut rng = StreamRng::new(PROBE_SEED, 0);
    let cols: Vec<Vec<Complex<T>>> = (0..n).map(|j| vectors.column(j)).collect();
    let mut worst = T::zero();
    for _ in 0..PROBES {
        let mut e = vec![Complex::new(T::zero(), T::zero()); d * d];
        for i in 0..d {
            e[i * d + i] = Complex::new(T::lit(rng.normal()), T::zero());
            for j in i + 1..d {
                let z = Complex::new(T::lit(rng.normal()), T::lit(rng.normal())) * T::FRAC_1_SQRT_2();
                e[i * d + j] = z;
                e[j * d + i] = z.conj();
            }
        }
        let m = SymMatrix::from_complex(d, e)?;
        let lhs = cols.iter().map(|u| m.quad_form(u).map(|x| x * x)).sum::<Result<T>>()? / T::count(n);
        let fro = m.frobenius_sq();
        let target = (fro + m.trace() * m.trace()) / T::count(d * (d + 1));
        worst = worst.max((lhs - target).abs() / fro);
    }
    Ok(worst)
}

pub fn check_design<T: Scalar>(sys: &DesignSystem<T>, order: u8, tol: T) -> Result<DesignCheck<T>> {
    let (residual, mode) = design_residual(sys.vectors(), order)?;
    Ok(DesignCheck { holds: residual <= tol, residual, mode })
}

/// Sample size for subsampling a projective design so that the subsystem
/// spans with probability at least `1 − δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignPlan {
    pub order: u8,
    pub d: usize,
    pub delta: f64,
    /// Required average number of sampled vectors (real-valued).
    pub s: f64,
}

impl DesignPlan {
    pub fn required_samples(&self) -> usize {
        super::ceil_count(self.s)
    }

    /// Oversampling `β = s/d`.
    pub fn beta(&self) -> f64 {
        self.s / self.d as f64
    }

    /// Order 1: `P{λ_min(Y) = 0} ≤ d·e^{−β}`.
    pub fn failure_bound(&self, beta: f64) -> f64 {
        self.d as f64 * (-beta).exp()
    }

    /// Order 2: `P{λ_min(Y) ≤ β − 2√β − t} ≤ d·e^{−t²d/(4β)}`.
    pub fn tail(&self, beta: f64, t: f64) -> f64 {
        let d = self.d as f64;
        d * (-t * t * d / (4.0 * beta)).exp()
    }

    /// `E λ_min(Z) > β − 2√β` for the order-2 comparison model.
    pub fn elmin_lower(beta: f64) -> f64 {
        beta - 2.0 * beta.sqrt()
    }

    /// `σ*²(Z) < 2β/d` for the order-2 comparison model.
    pub fn sigma_star2_upper(&self, beta: f64) -> f64 {
        2.0 * beta / self.d as f64
    }

    /// Weighted-theorem report for the order-2 model at oversampling `β`.
    pub fn report<T: Scalar>(&self, beta: f64) -> BoundReport<T> {
        BoundReport::analytic(
            T::lit(Self::elmin_lower(beta)),
            T::lit(self.sigma_star2_upper(beta)),
            crate::compare::Theorem::Weighted.dim_factor(self.d),
        )
    }
}

/// Order 1: `s = d·log(d/δ)`. Order 2: `s = 4(√d + √log(d/δ))²`.
pub fn design_sampling_plan(d: usize, delta: f64, order: u8) -> Result<DesignPlan> {
    check_unit_interval("δ", delta)?;
    if d == 0 {
        return invalid("dimension must be positive");
    }
    let df = d as f64;
    let l = (df / delta).ln();
    let s = match order {
        1 => df * l,
        2 => 4.0 * (df.sqrt() + l.sqrt()).powi(2),
        _ => return invalid(format!("design order must be 1 or 2, got {order}")),
    };
    Ok(DesignPlan { order, d, delta, s })
}

/// Bernoulli(s/n) weights on the rank-one matrices `u_i u_i*`.
pub fn design_spec<T: Scalar>(sys: &DesignSystem<T>, s: T) -> Result<MomentSpec<T>> {
    let p = s / T::count(sys.len());
    MomentSpec::bernoulli(&vec![p; sys.len()], PsdTerms::RankOne(sys.vectors().clone()))
}
