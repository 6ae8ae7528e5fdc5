use num_complex::Complex;

use super::{dot, matmul_raw, with_entries, Elem, Entries, Field, RectMatrix};
use crate::error::{check_dim, invalid, Error, Result};
use crate::Scalar;

/// Relative drift from self-adjointness tolerated (and repaired) on construction.
pub const SELF_ADJOINT_TOL: f64 = 1e-12;

/// Dense self-adjoint matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<T: Scalar> {
    dim: usize,
    pub(crate) data: Entries<T>,
}

/// Eigen-decomposition with ascending values; `vectors` holds one eigenvector per column.
#[derive(Clone, Debug)]
pub struct Eigen<T: Scalar> {
    pub values: Vec<T>,
    pub vectors: RectMatrix<T>,
}

fn symmetrize<T: Scalar, E: Elem<T>>(n: usize, a: &mut [E]) {
    let half = T::lit(0.5);
    for i in 0..n {
        a[i * n + i] = E::from_re(a[i * n + i].re());
        for j in i + 1..n {
            let v = (a[i * n + j] + a[j * n + i].conj()).scale(half);
            a[i * n + j] = v;
            a[j * n + i] = v.conj();
        }
    }
}

fn adjoint_drift<T: Scalar, E: Elem<T>>(n: usize, a: &[E]) -> (T, T) {
    let mut drift = T::zero();
    let mut scale = T::zero();
    for i in 0..n {
        for j in 0..n {
            let d = (a[i * n + j] - a[j * n + i].conj()).abs_sq().sqrt();
            drift = drift.max(d);
            scale = scale.max(a[i * n + j].abs_sq().sqrt());
        }
    }
    (drift, scale)
}

fn quad<T: Scalar, E: Elem<T>>(n: usize, a: &[E], u: &[E]) -> T {
    let mut s = E::zero();
    for i in 0..n {
        let mut r = E::zero();
        for j in 0..n {
            r += a[i * n + j] * u[j];
        }
        s += u[i].conj() * r;
    }
    s.re()
}

impl<T: Scalar> SymMatrix<T> {
    pub(crate) fn from_entries(dim: usize, data: Entries<T>) -> Result<Self> {
        if dim == 0 {
            return invalid("matrix dimension must be at least 1");
        }
        check_dim(dim * dim, data.len())?;
        if !data.is_finite() {
            return invalid("matrix has non-finite entries");
        }
        let mut data = data;
        let (drift, scale) = with_entries!(&data, v => adjoint_drift(dim, v));
        if drift > T::tol(SELF_ADJOINT_TOL) * scale {
            return invalid(format!("matrix is not self-adjoint (drift {} relative to max entry {})", drift, scale));
        }
        with_entries!(&mut data, v => symmetrize(dim, v));
        Ok(SymMatrix { dim, data })
    }

    /// Builds from raw entries that are self-adjoint up to rounding; repairs without checking.
    pub(crate) fn from_entries_repair(dim: usize, mut data: Entries<T>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        with_entries!(&mut data, v => symmetrize(dim, v));
        SymMatrix { dim, data }
    }

    pub(crate) fn from_elems<E: Elem<T>>(dim: usize, v: Vec<E>) -> Self {
        Self::from_entries_repair(dim, E::wrap(v))
    }

    /// Row-major real symmetric matrix.
    pub fn from_real(dim: usize, entries: Vec<T>) -> Result<Self> {
        Self::from_entries(dim, Entries::Real(entries))
    }

    /// Row-major complex Hermitian matrix.
    pub fn from_complex(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        Self::from_entries(dim, Entries::Complex(entries))
    }

    /// Real matrix with entries `f(i, j)`.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> T) -> Result<Self> {
        let v = (0..dim * dim).map(|k| f(k / dim.max(1), k % dim.max(1))).collect();
        Self::from_real(dim, v)
    }

    pub fn zeros(dim: usize, field: Field) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        SymMatrix { dim, data: Entries::zeros(dim * dim, field) }
    }

    pub fn identity(dim: usize, field: Field) -> Self {
        Self::scalar(dim, field, T::one())
    }

    /// `c·I`.
    pub fn scalar(dim: usize, field: Field, c: T) -> Self {
        Self::from_diag(field, &vec![c; dim])
    }

    pub fn from_diag(field: Field, diag: &[T]) -> Self {
        let d = diag.len();
        let mut m = Self::zeros(d, field);
        for (i, &x) in diag.iter().enumerate() {
            m.set_re(i, i, x);
        }
        m
    }

    /// Standard basis matrix `E_ii`.
    pub fn basis_diag(dim: usize, field: Field, i: usize) -> Self {
        let mut m = Self::zeros(dim, field);
        m.set_re(i, i, T::one());
        m
    }

    /// `v vᵀ` for a real vector.
    pub fn outer(v: &[T]) -> Self {
        Self::outer_elems(v)
    }

    /// `v v*` for a complex vector.
    pub fn outer_complex(v: &[Complex<T>]) -> Self {
        Self::outer_elems(v)
    }

    pub(crate) fn outer_elems<E: Elem<T>>(v: &[E]) -> Self {
        let n = v.len();
        let mut a = vec![E::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = v[i] * v[j].conj();
            }
        }
        Self::from_elems(n, a)
    }

    fn set_re(&mut self, i: usize, j: usize, x: T) {
        let n = self.dim;
        match &mut self.data {
            Entries::Real(v) => v[i * n + j] = x,
            Entries::Complex(v) => v[i * n + j] = Complex::new(x, T::zero()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> Field {
        self.data.field()
    }

    /// Entry `(i, j)` as a complex number.
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data.get(i * self.dim + j)
    }

    pub fn real_entries(&self) -> Option<&[T]> {
        <T as Elem<T>>::view(&self.data)
    }

    pub fn complex_entries(&self) -> Option<&[Complex<T>]> {
        <Complex<T> as Elem<T>>::view(&self.data)
    }

    /// Entries promoted to complex, row-major.
    pub fn to_complex_entries(&self) -> Vec<Complex<T>> {
        self.data.promote()
    }

    pub(crate) fn elems<E: Elem<T>>(&self) -> &[E] {
        E::view(&self.data).expect("matrix field does not match the requested element type")
    }

    /// Converts to `field`. Complex to real fails unless the imaginary part is negligible.
    pub fn to_field(&self, field: Field) -> Result<Self> {
        Ok(SymMatrix { dim: self.dim, data: self.data.to_field(field, T::tol(1e-12))? })
    }

    /// Real part `(M + M̄)/2`, a real symmetric matrix.
    pub fn real_part(&self) -> Self {
        match &self.data {
            Entries::Real(_) => self.clone(),
            Entries::Complex(v) => SymMatrix { dim: self.dim, data: Entries::Real(v.iter().map(|z| z.re).collect()) },
        }
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    pub fn trace(&self) -> T {
        self.diag().into_iter().sum()
    }

    pub fn frobenius_sq(&self) -> T {
        with_entries!(&self.data, v => super::norm_sq::<T, _>(v))
    }

    pub fn frobenius_norm(&self) -> T {
        self.frobenius_sq().sqrt()
    }

    pub fn max_abs(&self) -> T {
        with_entries!(&self.data, v => max_modulus(v))
    }

    /// Largest modulus of an off-diagonal entry.
    pub fn max_off_diagonal(&self) -> T {
        let n = self.dim;
        let mut m = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.get(i, j).norm());
                }
            }
        }
        m
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        check_dim(self.dim, other.dim)?;
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field(), other.field())));
        }
        Ok(())
    }

    /// Promotes both operands to their common field.
    fn aligned(&self, other: &Self) -> Result<(Self, Self)> {
        check_dim(self.dim, other.dim)?;
        let f = self.field().join(other.field());
        Ok((self.to_field(f)?, other.to_field(f)?))
    }

    /// `Tr[self* other]`.
    pub fn trace_inner(&self, other: &Self) -> Result<T> {
        let (a, b) = self.aligned(other)?;
        Ok(match (&a.data, &b.data) {
            (Entries::Real(x), Entries::Real(y)) => dot::<T, T>(x, y),
            (Entries::Complex(x), Entries::Complex(y)) => dot::<T, Complex<T>>(x, y).re,
            _ => unreachable!(),
        })
    }

    /// `self + c·other`, promoting to the common field.
    pub fn add_scaled(&self, c: T, other: &Self) -> Result<Self> {
        let (mut a, b) = self.aligned(other)?;
        a.axpy(c, &b)?;
        Ok(a)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(T::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(-T::one(), other)
    }

    /// In place `self += c·other`; fields must match.
    pub fn axpy(&mut self, c: T, other: &Self) -> Result<()> {
        self.same_shape(other)?;
        match (&mut self.data, &other.data) {
            (Entries::Real(x), Entries::Real(y)) => x.iter_mut().zip(y).for_each(|(a, &b)| *a += b * c),
            (Entries::Complex(x), Entries::Complex(y)) => x.iter_mut().zip(y).for_each(|(a, &b)| *a += b.scale(c)),
            _ => unreachable!(),
        }
        Ok(())
    }

    pub fn scaled(&self, c: T) -> Self {
        let mut out = self.clone();
        with_entries!(&mut out.data, v => scale_all(v, c));
        out
    }

    /// `self + c·I`.
    pub fn shifted(&self, c: T) -> Self {
        let mut out = self.clone();
        let n = self.dim;
        with_entries!(&mut out.data, v => add_diag(v, n, c));
        out
    }

    /// `M²`.
    pub fn square(&self) -> Self {
        let n = self.dim;
        let data = with_entries!(&self.data, v => <_ as Elem<T>>::wrap(matmul_raw(v, n, n, v, n)));
        Self::from_entries_repair(n, data)
    }

    /// `u* M u` for a real vector.
    pub fn quad_form_real(&self, u: &[T]) -> Result<T> {
        check_dim(self.dim, u.len())?;
        Ok(match &self.data {
            Entries::Real(v) => quad(self.dim, v, u),
            Entries::Complex(v) => {
                let uc: Vec<Complex<T>> = u.iter().map(|&x| Complex::new(x, T::zero())).collect();
                quad(self.dim, v, &uc)
            }
        })
    }

    /// `u* M u` for a complex vector.
    pub fn quad_form(&self, u: &[Complex<T>]) -> Result<T> {
        check_dim(self.dim, u.len())?;
        let data = self.data.promote();
        Ok(quad(self.dim, &data, u))
    }

    /// Eigenvalues in ascending order.
    pub fn eigvals(&self) -> Result<Vec<T>> {
        let n = self.dim;
        let mut vals = with_entries!(&self.data, v => eig_values(n, v)).ok_or(Error::NoConvergence(n))?;
        if vals.iter().any(|x| !x.is_finite()) {
            return Err(Error::NoConvergence(n));
        }
        vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        Ok(vals)
    }

    /// Eigenvalues in ascending order with matching orthonormal eigenvectors.
    pub fn eigen(&self) -> Result<Eigen<T>> {
        let n = self.dim;
        with_entries!(&self.data, v => eigen_sorted(n, v))
    }

    pub fn lambda_min(&self) -> Result<T> {
        Ok(self.eigvals()?[0])
    }

    pub fn lambda_max(&self) -> Result<T> {
        Ok(*self.eigvals()?.last().expect("dim >= 1"))
    }

    /// Spectral norm `max |λ|`.
    pub fn spectral_norm(&self) -> Result<T> {
        let v = self.eigvals()?;
        Ok(v[0].abs().max(v[v.len() - 1].abs()))
    }

    /// True when `λ_min ≥ −rel_tol·‖M‖`.
    pub fn is_psd(&self, rel_tol: T) -> Result<bool> {
        let v = self.eigvals()?;
        let scale = v[0].abs().max(v[v.len() - 1].abs());
        Ok(v[0] >= -rel_tol * scale)
    }

    /// `f(M)` through the eigen-decomposition.
    pub fn map_spectrum(&self, f: impl Fn(T) -> T) -> Result<Self> {
        let e = self.eigen()?;
        let n = self.dim;
        let fl: Vec<T> = e.values.iter().map(|&x| f(x)).collect();
        let data = with_entries!(&e.vectors.data, v => <_ as Elem<T>>::wrap(recompose(v, &fl, n)));
        Ok(Self::from_entries_repair(n, data))
    }

    /// `k* M k`; result has dimension `k.cols()`.
    pub fn congruence(&self, k: &RectMatrix<T>) -> Result<Self> {
        if k.rows() != self.dim {
            return invalid(format!("congruence needs {} rows in the transform, found {}", self.dim, k.rows()));
        }
        let f = self.field().join(k.field());
        let m = self.to_field(f)?;
        let k = k.to_field(f)?;
        let (n, c) = (self.dim, k.cols());
        let data = match (&m.data, &k.data) {
            (Entries::Real(a), Entries::Real(q)) => Entries::Real(congruence_raw(a, q, n, c)),
            (Entries::Complex(a), Entries::Complex(q)) => Entries::Complex(congruence_raw(a, q, n, c)),
            _ => unreachable!(),
        };
        Ok(Self::from_entries_repair(c, data))
    }

    /// Whether `self` and `other` commute within `tol·‖self‖_F·‖other‖_F`.
    pub fn commutes_with(&self, other: &Self, tol: T) -> Result<bool> {
        let (a, b) = self.aligned(other)?;
        let n = self.dim;
        let diff = match (&a.data, &b.data) {
            (Entries::Real(x), Entries::Real(y)) => commutator_norm(x, y, n),
            (Entries::Complex(x), Entries::Complex(y)) => commutator_norm(x, y, n),
            _ => unreachable!(),
        };
        Ok(diff <= tol * a.frobenius_norm() * b.frobenius_norm())
    }
}

fn commutator_norm<T: Scalar, E: Elem<T>>(x: &[E], y: &[E], n: usize) -> T {
    let xy = matmul_raw(x, n, n, y, n);
    let yx = matmul_raw(y, n, n, x, n);
    xy.iter().zip(&yx).fold(T::zero(), |s, (&a, &b)| s + (a - b).abs_sq()).sqrt()
}

fn congruence_raw<T: Scalar, E: Elem<T>>(a: &[E], q: &[E], n: usize, c: usize) -> Vec<E> {
    let aq = matmul_raw(a, n, n, q, c);
    let mut out = vec![E::zero(); c * c];
    for r in 0..n {
        for i in 0..c {
            let qri = q[r * c + i].conj();
            if qri == E::zero() {
                continue;
            }
            for j in 0..c {
                out[i * c + j] += qri * aq[r * c + j];
            }
        }
    }
    out
}

fn eigen_sorted<T: Scalar, E: Elem<T>>(n: usize, a: &[E]) -> Result<Eigen<T>> {
    let (vals, vecs) = E::eig(n, a, true).ok_or(Error::NoConvergence(n))?;
    let vecs = vecs.ok_or(Error::NoConvergence(n))?;
    if vals.iter().any(|x| !x.is_finite()) {
        return Err(Error::NoConvergence(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| vals[i]).collect();
    let mut sorted = vec![E::zero(); n * n];
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            sorted[r * n + new] = vecs[r * n + old];
        }
    }
    Ok(Eigen { values, vectors: RectMatrix::from_elems(n, n, sorted) })
}

fn scale_all<T: Scalar, E: Elem<T>>(v: &mut [E], c: T) {
    v.iter_mut().for_each(|x| *x = x.scale(c));
}

fn add_diag<T: Scalar, E: Elem<T>>(v: &mut [E], n: usize, c: T) {
    (0..n).for_each(|i| v[i * n + i] += E::from_re(c));
}

fn max_modulus<T: Scalar, E: Elem<T>>(v: &[E]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs_sq().sqrt()))
}

fn eig_values<T: Scalar, E: Elem<T>>(n: usize, v: &[E]) -> Option<Vec<T>> {
    E::eig(n, v, false).map(|r| r.0)
}

/// `V diag(f) V*`.
fn recompose<T: Scalar, E: Elem<T>>(v: &[E], f: &[T], n: usize) -> Vec<E> {
    let mut out = vec![E::zero(); n * n];
    for (k, &fk) in f.iter().enumerate() {
        for i in 0..n {
            let vik = v[i * n + k].scale(fk);
            for j in 0..n {
                out[i * n + j] += vik * v[j * n + k].conj();
            }
        }
    }
    out
}
