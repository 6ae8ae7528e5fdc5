//! Sparse random sketches as subspace injections.

use rayon::prelude::*;

use crate::compare::{BoundReport, Theorem};
use crate::error::{check_dim, invalid, Error, Result};
use crate::gaussmodel::{Component, GaussianModel};
use crate::matcore::{Field, RectMatrix, SymMatrix};
use crate::rng::StreamRng;
use crate::Scalar;

use super::{ceil_count, check_unit_interval};

const ORTHONORMAL_TOL: f64 = 1e-8;

fn check_orthonormal<T: Scalar>(q: &RectMatrix<T>) -> Result<()> {
    if q.cols() == 0 || q.cols() > q.rows() {
        return invalid(format!("expected a tall orthonormal matrix, got {}×{}", q.rows(), q.cols()));
    }
    let err = q.orthonormality_error();
    if err > T::tol(ORTHONORMAL_TOL) {
        return invalid(format!("columns are not orthonormal (‖Q*Q − I‖ = {err})"));
    }
    Ok(())
}

/// Coherence `μ(Q) = max_i ‖e_iᵀQ‖²` of an orthonormal `n×d` matrix; lies in `[d/n, 1]`.
pub fn coherence<T: Scalar>(q: &RectMatrix<T>) -> Result<T> {
    check_orthonormal(q)?;
    let mu = q.row_norms_sq().into_iter().fold(T::zero(), T::max);
    let lo = T::count(q.cols()) / T::count(q.rows());
    let slack = T::tol(ORTHONORMAL_TOL);
    if mu < lo - slack || mu > T::one() + slack {
        return invalid(format!("coherence {mu} outside [{lo}, 1]"));
    }
    Ok(mu)
}

/// Embedding dimension `k` and sparsity `ζ` of a sparse sketch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SketchParams {
    pub k: usize,
    pub zeta: f64,
    /// Whether the pair is backed by the injection theorem.
    pub certified: bool,
}

/// Smallest `k ≥ 16·max(d, 6 log(2d/δ))/ε²` and `ζ = 32μ log(2d/δ)/ε²`.
pub fn sketch_params(d: usize, mu: f64, epsilon: f64, delta: f64) -> Result<SketchParams> {
    check_unit_interval("ε", epsilon)?;
    check_unit_interval("δ", delta)?;
    if d == 0 || !(mu > 0.0 && mu <= 1.0) {
        return invalid("need d ≥ 1 and coherence in (0, 1]");
    }
    let l = (2.0 * d as f64 / delta).ln();
    let e2 = epsilon * epsilon;
    let k = ceil_count(16.0 * (d as f64).max(6.0 * l) / e2);
    let zeta = 32.0 * mu * l / e2;
    if zeta > k as f64 {
        return invalid(format!(
            "required sparsity ζ = {zeta} exceeds k = {k}; use a larger ε or a less coherent subspace"
        ));
    }
    Ok(SketchParams { k, zeta, certified: true })
}

/// The empirical preset `k = 2d`, `ζ = 8` (capped at `k`). Not certified.
pub fn practical_sketch_params(d: usize) -> SketchParams {
    let k = 2 * d.max(1);
    SketchParams { k, zeta: 8f64.min(k as f64), certified: false }
}

/// `k×n` matrix with iid entries `ξψ/√ζ`, `ξ ~ Bernoulli(ζ/k)`, `ψ = ±1`,
/// stored column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSketch<T: Scalar> {
    k: usize,
    n: usize,
    zeta: T,
    seed: u64,
    col_start: Vec<usize>,
    rows: Vec<u32>,
    values: Vec<T>,
}

impl<T: Scalar> SparseSketch<T> {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn zeta(&self) -> T {
        self.zeta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(row, col, value)` in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n).flat_map(move |j| {
            (self.col_start[j]..self.col_start[j + 1]).map(move |p| (self.rows[p] as usize, j, self.values[p]))
        })
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> RectMatrix<T> {
        let mut e = vec![T::zero(); self.k * self.n];
        for (r, c, v) in self.triplets() {
            e[r * self.n + c] = v;
        }
        RectMatrix::from_real(self.k, self.n, e).expect("consistent shape")
    }
}

/// Draws a sparse sketch. Column `j` reads random stream `j` of `seed` and
/// finds its nonzero rows by geometric skips.
pub fn make_sketch<T: Scalar>(k: usize, n: usize, zeta: f64, seed: u64) -> Result<SparseSketch<T>> {
    if k == 0 || n == 0 {
        return invalid("sketch dimensions must be positive");
    }
    if k > u32::MAX as usize {
        return Err(Error::Budget(format!("embedding dimension {k} exceeds the row index range")));
    }
    if !(zeta > 0.0 && zeta <= k as f64) {
        return invalid(format!("sparsity ζ = {zeta} must lie in (0, k = {k}]"));
    }
    let p = zeta / k as f64;
    let value = T::one() / T::lit(zeta).sqrt();
    let columns: Vec<Vec<(u32, T)>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut rng = StreamRng::new(seed, j as u64);
            let mut out = Vec::new();
            let mut r = rng.geometric(p);
            while r < k as u64 {
                let v = if rng.sign() > 0.0 { value } else { -value };
                out.push((r as u32, v));
                r = r.saturating_add(1).saturating_add(rng.geometric(p));
            }
            out
        })
        .collect();
    let mut col_start = Vec::with_capacity(n + 1);
    col_start.push(0);
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for col in columns {
        for (r, v) in col {
            rows.push(r);
            values.push(v);
        }
        col_start.push(rows.len());
    }
    Ok(SparseSketch { k, n, zeta: T::lit(zeta), seed, col_start, rows, values })
}

/// `ΦQ` for an `n×d` matrix `Q`, accumulated row by row of `Q`.
pub fn apply_sketch<T: Scalar>(s: &SparseSketch<T>, q: &RectMatrix<T>) -> Result<RectMatrix<T>> {
    check_dim(s.n, q.rows())?;
    let d = q.cols();
    match q.field() {
        Field::Real => {
            let qe = q.real_entries().expect("real field");
            let mut out = vec![T::zero(); s.k * d];
            for j in 0..s.n {
                let src = &qe[j * d..(j + 1) * d];
                for p in s.col_start[j]..s.col_start[j + 1] {
                    let (r, v) = (s.rows[p] as usize, s.values[p]);
                    for (o, x) in out[r * d..(r + 1) * d].iter_mut().zip(src) {
                        *o += v * *x;
                    }
                }
            }
            RectMatrix::from_real(s.k, d, out)
        }
        Field::Complex => {
            let qe = q.complex_entries().expect("complex field");
            let mut out = vec![num_complex::Complex::new(T::zero(), T::zero()); s.k * d];
            for j in 0..s.n {
                let src = &qe[j * d..(j + 1) * d];
                for p in s.col_start[j]..s.col_start[j + 1] {
                    let (r, v) = (s.rows[p] as usize, s.values[p]);
                    for (o, x) in out[r * d..(r + 1) * d].iter_mut().zip(src) {
                        *o += *x * v;
                    }
                }
            }
            RectMatrix::from_complex(s.k, d, out)
        }
    }
}

/// `λ_min((ΦQ)*(ΦQ))`.
pub fn injection_lmin<T: Scalar>(q: &RectMatrix<T>, s: &SparseSketch<T>) -> Result<T> {
    apply_sketch(s, q)?.gram().lambda_min()
}

/// Comparison model for `(ΦQ)ᵀ(ΦQ)` and its bound.
#[derive(Clone, Debug)]
pub struct InjectionReport<T: Scalar> {
    pub model: GaussianModel<T>,
    pub bound: BoundReport<T>,
    pub coherence: T,
    /// `σ²(QᵀD_nQ) ≤ μ(Q)`.
    pub compressed_sigma2_bound: T,
    /// `E λ_max(QᵀD_nQ) ≤ √(2μ(Q) log d)`.
    pub compressed_khinchin: T,
}

/// `Z = I + k^{-1/2}G_goe + γk^{-1/2}I + ζ^{-1/2}QᵀD_nQ` with
/// `E λ_min(Z) ≥ 1 − 2√(d/k) − √(2μ log d/ζ)` and `σ*²(Z) ≤ 3/k + μ/ζ`.
pub fn injection_model<T: Scalar>(q: &RectMatrix<T>, k: usize, zeta: f64) -> Result<InjectionReport<T>> {
    if q.field() != Field::Real {
        return Err(Error::FieldMismatch("the sparse injection model is real".into()));
    }
    if k == 0 || !(zeta > 0.0) {
        return invalid("need k ≥ 1 and ζ > 0");
    }
    let mu = coherence(q)?;
    let d = q.cols();
    let (kt, zt, dt) = (T::count(k), T::lit(zeta), T::count(d));
    let model = GaussianModel::new(SymMatrix::identity(d, Field::Real))
        .with(Component::Goe { coeff: kt.sqrt().recip() })?
        .with(Component::Scalar { coeff: kt.sqrt().recip() })?
        .with(Component::CompressedDiagonal { q: q.scaled(zt.sqrt().recip()) })?;
    let two = T::lit(2.0);
    let elmin = T::one() - two * (dt / kt).sqrt() - (two * mu * dt.ln() / zt).sqrt();
    let s2 = T::lit(3.0) / kt + mu / zt;
    Ok(InjectionReport {
        model,
        bound: BoundReport::analytic(elmin, s2, Theorem::Iid.dim_factor(d)),
        coherence: mu,
        compressed_sigma2_bound: mu,
        compressed_khinchin: (two * mu * dt.ln()).sqrt(),
    })
}
