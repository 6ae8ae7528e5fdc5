//! Self-adjoint Gaussian random matrices `Z = Δ + Σ γ_i H_i`.
//!
//! A [`GaussianModel`] is a fixed shift plus a list of independent centered
//! components. Each component has a structured representation so that sampling,
//! variance functions and the statistics σ² and σ*² can use closed forms.

mod descriptor;
mod stats;

use num_complex::Complex;
use rayon::prelude::*;

pub use descriptor::{parse_descriptor, read_descriptor, ModelDescriptor};
pub use stats::{khinchin, weak_variance_estimate, ModelStats, ESTIMATOR_RESTARTS};

use crate::error::{check_dim, invalid, Error, Result};
use crate::matcore::{dot, with_entries, Elem, Entries, Field, RectMatrix, SymMatrix};
use crate::rng::StreamRng;
use crate::Scalar;

/// One independent centered part of a Gaussian model.
#[derive(Clone, Debug, PartialEq)]
pub enum Component<T: Scalar> {
    /// `c·γ·I`.
    Scalar { coeff: T },
    /// `c·Σ γ_i E_ii`.
    Diagonal { coeff: T },
    /// `c·G_goe`; real models only.
    Goe { coeff: T },
    /// `c·G_gue`; complex models only.
    Gue { coeff: T },
    /// `Σ γ_i √w_i u_i u_i*` with `u_i` the columns of `vectors`.
    RankOneSeries { weights: Vec<T>, vectors: RectMatrix<T> },
    /// `Σ γ_i H_i`.
    GeneralSeries { matrices: Vec<SymMatrix<T>> },
    /// `q* D_n q` for an `n×d` matrix `q` and standard Gaussian diagonal `D_n`.
    CompressedDiagonal { q: RectMatrix<T> },
}

impl<T: Scalar> Component<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Component::Scalar { .. } => "scalar",
            Component::Diagonal { .. } => "diagonal",
            Component::Goe { .. } => "goe",
            Component::Gue { .. } => "gue",
            Component::RankOneSeries { .. } => "rank1",
            Component::GeneralSeries { .. } => "series",
            Component::CompressedDiagonal { .. } => "compressed",
        }
    }

    /// Number of independent standard normals consumed per sample.
    fn draws(&self, d: usize) -> usize {
        match self {
            Component::Scalar { .. } => 1,
            Component::Diagonal { .. } => d,
            Component::Goe { .. } => d * (d + 1) / 2,
            Component::Gue { .. } => d * d,
            Component::RankOneSeries { weights, .. } => weights.len(),
            Component::GeneralSeries { matrices } => matrices.len(),
            Component::CompressedDiagonal { q } => q.rows(),
        }
    }
}

/// Law of a self-adjoint Gaussian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianModel<T: Scalar> {
    shift: SymMatrix<T>,
    components: Vec<Component<T>>,
}

/// Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate<T> {
    pub estimate: T,
    pub stderr: T,
    pub trials: usize,
}

impl<T: Scalar> McEstimate<T> {
    /// Sample mean and standard error of `xs` (at least two values).
    pub fn from_samples(xs: &[T]) -> Result<Self> {
        if xs.len() < 2 {
            return invalid("at least two samples are needed for a standard error");
        }
        let n = T::count(xs.len());
        let mean = xs.iter().copied().sum::<T>() / n;
        let var = xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / (n - T::one());
        Ok(McEstimate { estimate: mean, stderr: (var / n).sqrt(), trials: xs.len() })
    }
}

impl<T: Scalar> GaussianModel<T> {
    /// Deterministic model `Z = shift`.
    pub fn new(shift: SymMatrix<T>) -> Self {
        GaussianModel { shift, components: Vec::new() }
    }

    pub fn zero(dim: usize, field: Field) -> Self {
        Self::new(SymMatrix::zeros(dim, field))
    }

    /// Adds an independent component after validating it against the model.
    pub fn with(mut self, c: Component<T>) -> Result<Self> {
        let c = self.conform(c)?;
        self.components.push(c);
        Ok(self)
    }

    pub fn with_all(self, cs: impl IntoIterator<Item = Component<T>>) -> Result<Self> {
        cs.into_iter().try_fold(self, |m, c| m.with(c))
    }

    fn conform(&self, c: Component<T>) -> Result<Component<T>> {
        let (d, f) = (self.dim(), self.field());
        let finite = |x: T| if x.is_finite() { Ok(()) } else { invalid("non-finite coefficient") };
        Ok(match c {
            Component::Scalar { coeff } | Component::Diagonal { coeff } => {
                finite(coeff)?;
                c
            }
            Component::Goe { coeff } => {
                finite(coeff)?;
                if f != Field::Real {
                    return Err(Error::FieldMismatch("GOE component requires a real model".into()));
                }
                c
            }
            Component::Gue { coeff } => {
                finite(coeff)?;
                if f != Field::Complex {
                    return Err(Error::FieldMismatch("GUE component requires a complex model".into()));
                }
                c
            }
            Component::RankOneSeries { weights, vectors } => {
                check_dim(d, vectors.rows())?;
                check_dim(vectors.cols(), weights.len())?;
                if weights.iter().any(|&w| !(w >= T::zero()) || !w.is_finite()) {
                    return invalid("rank-one series weights must be finite and nonnegative");
                }
                Component::RankOneSeries { weights, vectors: vectors.to_field(f)? }
            }
            Component::GeneralSeries { matrices } => {
                let matrices = matrices
                    .into_iter()
                    .map(|h| {
                        check_dim(d, h.dim())?;
                        h.to_field(f)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Component::GeneralSeries { matrices }
            }
            Component::CompressedDiagonal { q } => {
                check_dim(d, q.cols())?;
                Component::CompressedDiagonal { q: q.to_field(f)? }
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.shift.dim()
    }

    pub fn field(&self) -> Field {
        self.shift.field()
    }

    /// `Δ = E Z`.
    pub fn shift(&self) -> &SymMatrix<T> {
        &self.shift
    }

    pub fn components(&self) -> &[Component<T>] {
        &self.components
    }

    /// Same components with a different shift.
    pub fn with_shift(&self, shift: SymMatrix<T>) -> Result<Self> {
        check_dim(self.dim(), shift.dim())?;
        Ok(GaussianModel { shift: shift.to_field(self.field())?, components: self.components.clone() })
    }

    /// The centered part `Z − E Z`.
    pub fn centered(&self) -> Self {
        GaussianModel { shift: SymMatrix::zeros(self.dim(), self.field()), components: self.components.clone() }
    }

    /// Law of `a·Z` for real `a`.
    pub fn scaled(&self, a: T) -> Self {
        let r = a.abs().sqrt();
        let components = self
            .components
            .iter()
            .map(|c| match c {
                Component::Scalar { coeff } => Component::Scalar { coeff: *coeff * a },
                Component::Diagonal { coeff } => Component::Diagonal { coeff: *coeff * a },
                Component::Goe { coeff } => Component::Goe { coeff: *coeff * a },
                Component::Gue { coeff } => Component::Gue { coeff: *coeff * a },
                Component::RankOneSeries { weights, vectors } => Component::RankOneSeries {
                    weights: weights.iter().map(|&w| w * a * a).collect(),
                    vectors: vectors.clone(),
                },
                Component::GeneralSeries { matrices } => {
                    Component::GeneralSeries { matrices: matrices.iter().map(|h| h.scaled(a)).collect() }
                }
                Component::CompressedDiagonal { q } => Component::CompressedDiagonal { q: q.scaled(r) },
            })
            .collect();
        GaussianModel { shift: self.shift.scaled(a), components }
    }

    /// Law of the sum of independent draws from `self` and `other`.
    pub fn add_independent(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field(), other.field())));
        }
        Ok(GaussianModel {
            shift: self.shift.add(&other.shift)?,
            components: self.components.iter().chain(&other.components).cloned().collect(),
        })
    }

    /// Coefficient matrices `H_i` of the equivalent Gaussian series.
    pub fn series_matrices(&self) -> Vec<SymMatrix<T>> {
        let (d, f) = (self.dim(), self.field());
        let mut out = Vec::new();
        for c in &self.components {
            match c {
                Component::Scalar { coeff } => out.push(SymMatrix::scalar(d, f, *coeff)),
                Component::Diagonal { coeff } => {
                    out.extend((0..d).map(|i| SymMatrix::basis_diag(d, f, i).scaled(*coeff)))
                }
                Component::Goe { coeff } => {
                    let s2 = T::SQRT_2();
                    for i in 0..d {
                        out.push(SymMatrix::basis_diag(d, f, i).scaled(*coeff * s2));
                        for j in i + 1..d {
                            out.push(sym_pair(d, f, i, j, Complex::new(*coeff, T::zero())));
                        }
                    }
                }
                Component::Gue { coeff } => {
                    let a = *coeff / T::SQRT_2();
                    for i in 0..d {
                        out.push(SymMatrix::basis_diag(d, f, i).scaled(*coeff));
                        for j in i + 1..d {
                            out.push(sym_pair(d, f, i, j, Complex::new(a, T::zero())));
                            out.push(sym_pair(d, f, i, j, Complex::new(T::zero(), a)));
                        }
                    }
                }
                Component::RankOneSeries { weights, vectors } => {
                    for (k, &w) in weights.iter().enumerate() {
                        let u = vectors.column(k);
                        out.push(SymMatrix::outer_complex(&u).to_field(f).expect("field-conformed").scaled(w.sqrt()));
                    }
                }
                Component::GeneralSeries { matrices } => out.extend(matrices.iter().cloned()),
                Component::CompressedDiagonal { q } => {
                    for i in 0..q.rows() {
                        let v: Vec<Complex<T>> = (0..d).map(|j| q.get(i, j).conj()).collect();
                        out.push(SymMatrix::outer_complex(&v).to_field(f).expect("field-conformed"));
                    }
                }
            }
        }
        out
    }

    /// Law of `k* Z k`.
    ///
    /// GOE, GUE and scalar components are carried through only when `k` has
    /// orthonormal columns; otherwise `expand` must be set, which rewrites them
    /// as general series with `O(d²)` terms.
    pub fn congruence(&self, k: &RectMatrix<T>, expand: bool) -> Result<Self> {
        if k.rows() != self.dim() {
            return invalid(format!("transform needs {} rows, found {}", self.dim(), k.rows()));
        }
        let f = self.field().join(k.field());
        let k = k.to_field(f)?;
        let orthonormal = k.is_orthonormal(T::tol(1e-10));
        let c = k.cols();
        let mut out = GaussianModel::new(self.shift.congruence(&k)?);
        let kadj = k.adjoint();
        for comp in &self.components {
            let mapped = match comp {
                Component::Scalar { .. } | Component::Goe { .. } | Component::Gue { .. } if orthonormal => {
                    match comp {
                        Component::Goe { coeff } if f == Field::Complex => {
                            // A real GOE seen through a complex isometry is no longer GOE.
                            if !expand {
                                return invalid("GOE under a complex transform needs explicit expansion");
                            }
                            expand_congruence(&[self.single(comp)], &k, c)?
                        }
                        _ => vec![comp.clone()],
                    }
                }
                Component::Scalar { .. } | Component::Goe { .. } | Component::Gue { .. } => {
                    if !expand {
                        return invalid(format!(
                            "{} component under a non-orthonormal transform needs explicit expansion",
                            comp.kind()
                        ));
                    }
                    expand_congruence(&[self.single(comp)], &k, c)?
                }
                Component::Diagonal { coeff } => {
                    vec![Component::CompressedDiagonal { q: k.scaled(coeff.abs().sqrt()) }]
                }
                Component::CompressedDiagonal { q } => {
                    vec![Component::CompressedDiagonal { q: q.to_field(f)?.matmul(&k)? }]
                }
                Component::RankOneSeries { weights, vectors } => vec![Component::RankOneSeries {
                    weights: weights.clone(),
                    vectors: kadj.matmul(&vectors.to_field(f)?)?,
                }],
                Component::GeneralSeries { matrices } => vec![Component::GeneralSeries {
                    matrices: matrices.iter().map(|h| h.congruence(&k)).collect::<Result<_>>()?,
                }],
            };
            out = out.with_all(mapped)?;
        }
        Ok(out)
    }

    fn single(&self, c: &Component<T>) -> Self {
        GaussianModel { shift: SymMatrix::zeros(self.dim(), self.field()), components: vec![c.clone()] }
    }

    /// One draw, reading normals from `rng`.
    pub fn sample_with(&self, rng: &mut StreamRng) -> SymMatrix<T> {
        let mut acc = self.shift.data.clone();
        with_entries!(&mut acc, a => self.accumulate(a, rng));
        SymMatrix::from_entries_repair(self.dim(), acc)
    }

    /// One draw keyed by `seed`; equal seeds give bit-identical matrices.
    pub fn sample(&self, seed: u64) -> SymMatrix<T> {
        self.sample_with(&mut StreamRng::new(seed, 0))
    }

    fn accumulate<E: Elem<T>>(&self, a: &mut [E], rng: &mut StreamRng) {
        let d = self.dim();
        let mut g = || T::lit(rng.normal());
        for c in &self.components {
            match c {
                Component::Scalar { coeff } => {
                    let x = E::from_re(*coeff * g());
                    (0..d).for_each(|i| a[i * d + i] += x);
                }
                Component::Diagonal { coeff } => (0..d).for_each(|i| a[i * d + i] += E::from_re(*coeff * g())),
                Component::Goe { coeff } => {
                    let s2 = T::SQRT_2();
                    for i in 0..d {
                        a[i * d + i] += E::from_re(*coeff * s2 * g());
                        for j in i + 1..d {
                            let x = E::from_re(*coeff * g());
                            a[i * d + j] += x;
                            a[j * d + i] += x;
                        }
                    }
                }
                Component::Gue { coeff } => {
                    let h = *coeff / T::SQRT_2();
                    for i in 0..d {
                        a[i * d + i] += E::from_re(*coeff * g());
                        for j in i + 1..d {
                            let (x, y) = (g(), g());
                            let z = E::from_complex(Complex::new(h * x, h * y));
                            a[i * d + j] += z;
                            a[j * d + i] += z.conj();
                        }
                    }
                }
                Component::RankOneSeries { weights, vectors } => {
                    let u = vectors.elems::<E>();
                    let m = weights.len();
                    for (k, &w) in weights.iter().enumerate() {
                        let s = w.sqrt() * g();
                        rank_one_update(a, d, s, (0..d).map(|r| u[r * m + k]));
                    }
                }
                Component::GeneralSeries { matrices } => {
                    for h in matrices {
                        let s = g();
                        for (x, &y) in a.iter_mut().zip(h.elems::<E>()) {
                            *x += y.scale(s);
                        }
                    }
                }
                Component::CompressedDiagonal { q } => {
                    for i in 0..q.rows() {
                        let s = g();
                        rank_one_update(a, d, s, q.row_elems::<E>(i).iter().map(|x| x.conj()));
                    }
                }
            }
        }
    }

    /// `Var⟨M, Z⟩`.
    pub fn var_eval(&self, m: &SymMatrix<T>) -> Result<T> {
        check_dim(self.dim(), m.dim())?;
        // For a real model only the real part of M pairs with Z.
        let m = match self.field() {
            Field::Real => m.real_part(),
            Field::Complex => m.to_field(Field::Complex)?,
        };
        let mut total = T::zero();
        with_entries!(&m.data, mv => {
            for c in &self.components {
                total += self.component_var(c, &m, mv)?;
            }
        });
        Ok(total)
    }

    fn component_var<E: Elem<T>>(&self, c: &Component<T>, m: &SymMatrix<T>, mv: &[E]) -> Result<T> {
        let d = self.dim();
        let sq = |x: T| x * x;
        Ok(match c {
            Component::Scalar { coeff } => sq(*coeff * m.trace()),
            Component::Diagonal { coeff } => sq(*coeff) * m.diag().iter().map(|&x| x * x).sum::<T>(),
            Component::Goe { coeff } => T::lit(2.0) * sq(*coeff) * m.frobenius_sq(),
            Component::Gue { coeff } => sq(*coeff) * m.frobenius_sq(),
            Component::RankOneSeries { weights, vectors } => {
                let mut s = T::zero();
                for (k, &w) in weights.iter().enumerate() {
                    let u = vectors.column_elems::<E>(k);
                    s += w * sq(quad(mv, d, &u));
                }
                s
            }
            Component::GeneralSeries { matrices } => {
                let mut s = T::zero();
                for h in matrices {
                    s += sq(m.trace_inner(h)?);
                }
                s
            }
            Component::CompressedDiagonal { q } => {
                let mut s = T::zero();
                for i in 0..q.rows() {
                    let v: Vec<E> = q.row_elems::<E>(i).iter().map(|x| x.conj()).collect();
                    s += sq(quad(mv, d, &v));
                }
                s
            }
        })
    }

    /// Monte Carlo estimate of `E λ_min(Z)`. Trial `i` uses stream `i` of `seed`,
    /// so the result does not depend on the number of worker threads.
    pub fn mc_expected_lmin(&self, trials: usize, seed: u64) -> Result<McEstimate<T>> {
        if trials < 2 {
            return invalid("at least two trials are needed");
        }
        let xs = (0..trials as u64)
            .into_par_iter()
            .map(|i| self.sample_with(&mut StreamRng::new(seed, i)).lambda_min())
            .collect::<Result<Vec<T>>>()?;
        McEstimate::from_samples(&xs)
    }

    /// Total number of standard normals one sample consumes.
    pub fn draws_per_sample(&self) -> usize {
        self.components.iter().map(|c| c.draws(self.dim())).sum()
    }
}

fn quad<T: Scalar, E: Elem<T>>(m: &[E], d: usize, u: &[E]) -> T {
    let mut s = E::zero();
    for i in 0..d {
        s += u[i].conj() * dot::<T, E>(&conj_row(&m[i * d..(i + 1) * d]), u);
    }
    s.re()
}

fn conj_row<T: Scalar, E: Elem<T>>(r: &[E]) -> Vec<E> {
    r.iter().map(|x| x.conj()).collect()
}

/// `a += s·v v*`.
fn rank_one_update<T: Scalar, E: Elem<T>>(a: &mut [E], d: usize, s: T, v: impl Iterator<Item = E>) {
    let v: Vec<E> = v.collect();
    for r in 0..d {
        if v[r] == E::zero() {
            continue;
        }
        let vr = v[r].scale(s);
        for c in 0..d {
            a[r * d + c] += vr * v[c].conj();
        }
    }
}

/// `c·(E_ij + E_ji)` with complex `c` placed at `(i, j)` and its conjugate at `(j, i)`.
fn sym_pair<T: Scalar>(d: usize, f: Field, i: usize, j: usize, c: Complex<T>) -> SymMatrix<T> {
    let mut v = vec![Complex::new(T::zero(), T::zero()); d * d];
    v[i * d + j] = c;
    v[j * d + i] = c.conj();
    SymMatrix::from_entries_repair(d, Entries::Complex(v)).to_field(f).expect("real when c is real")
}

fn expand_congruence<T: Scalar>(parts: &[GaussianModel<T>], k: &RectMatrix<T>, _c: usize) -> Result<Vec<Component<T>>> {
    let mut matrices = Vec::new();
    for p in parts {
        for h in p.series_matrices() {
            matrices.push(h.congruence(k)?);
        }
    }
    Ok(vec![Component::GeneralSeries { matrices }])
}
