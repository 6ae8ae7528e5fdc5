use num_complex::Complex;

use super::{dot, matmul_raw, norm_sq, with_entries, Elem, Entries, Field, SymMatrix};
use crate::error::{check_dim, invalid, Result};
use crate::rng::StreamRng;
use crate::Scalar;

/// Dense rectangular matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RectMatrix<T: Scalar> {
    rows: usize,
    cols: usize,
    pub(crate) data: Entries<T>,
}

impl<T: Scalar> RectMatrix<T> {
    fn from_entries(rows: usize, cols: usize, data: Entries<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid("matrix shape must be at least 1x1");
        }
        check_dim(rows * cols, data.len())?;
        if !data.is_finite() {
            return invalid("matrix has non-finite entries");
        }
        Ok(RectMatrix { rows, cols, data })
    }

    pub(crate) fn from_elems<E: Elem<T>>(rows: usize, cols: usize, v: Vec<E>) -> Self {
        debug_assert_eq!(v.len(), rows * cols);
        RectMatrix { rows, cols, data: E::wrap(v) }
    }

    pub fn from_real(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self> {
        Self::from_entries(rows, cols, Entries::Real(entries))
    }

    pub fn from_complex(rows: usize, cols: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        Self::from_entries(rows, cols, Entries::Complex(entries))
    }

    /// Real matrix whose columns are the given vectors.
    pub fn from_real_columns(columns: &[Vec<T>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return invalid("columns have unequal lengths");
        }
        let mut v = vec![T::zero(); rows * cols];
        for (j, c) in columns.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                v[i * cols + j] = x;
            }
        }
        Self::from_real(rows, cols, v)
    }

    /// Complex matrix whose columns are the given vectors.
    pub fn from_complex_columns(columns: &[Vec<Complex<T>>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return invalid("columns have unequal lengths");
        }
        let mut v = vec![Complex::new(T::zero(), T::zero()); rows * cols];
        for (j, c) in columns.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                v[i * cols + j] = x;
            }
        }
        Self::from_complex(rows, cols, v)
    }

    pub fn zeros(rows: usize, cols: usize, field: Field) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix shape must be at least 1x1");
        RectMatrix { rows, cols, data: Entries::zeros(rows * cols, field) }
    }

    /// The first `cols` columns of `I_rows`.
    pub fn identity_columns(rows: usize, cols: usize, field: Field) -> Self {
        let mut m = Self::zeros(rows, cols, field);
        for i in 0..rows.min(cols) {
            match &mut m.data {
                Entries::Real(v) => v[i * cols + i] = T::one(),
                Entries::Complex(v) => v[i * cols + i] = Complex::new(T::one(), T::zero()),
            }
        }
        m
    }

    /// Square matrix with the same entries as `m`.
    pub fn from_sym(m: &SymMatrix<T>) -> Self {
        RectMatrix { rows: m.dim(), cols: m.dim(), data: m.data.clone() }
    }

    /// Haar-distributed `rows×cols` matrix with orthonormal columns.
    pub fn random_orthonormal(rows: usize, cols: usize, field: Field, seed: u64) -> Result<Self> {
        if cols > rows {
            return invalid(format!("cannot fit {cols} orthonormal columns in dimension {rows}"));
        }
        let mut rng = StreamRng::new(seed, 0);
        let mut m = Self::zeros(rows, cols, field);
        match &mut m.data {
            Entries::Real(v) => v.iter_mut().for_each(|x| *x = T::lit(rng.normal())),
            Entries::Complex(v) => {
                v.iter_mut().for_each(|x| *x = Complex::new(T::lit(rng.normal()), T::lit(rng.normal())))
            }
        }
        with_entries!(&mut m.data, v => orthonormalize_columns(v, rows, cols))?;
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.data.field()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data.get(i * self.cols + j)
    }

    pub fn real_entries(&self) -> Option<&[T]> {
        <T as Elem<T>>::view(&self.data)
    }

    pub fn complex_entries(&self) -> Option<&[Complex<T>]> {
        <Complex<T> as Elem<T>>::view(&self.data)
    }

    pub fn to_complex_entries(&self) -> Vec<Complex<T>> {
        self.data.promote()
    }

    pub(crate) fn elems<E: Elem<T>>(&self) -> &[E] {
        E::view(&self.data).expect("matrix field does not match the requested element type")
    }

    pub fn to_field(&self, field: Field) -> Result<Self> {
        Ok(RectMatrix { rows: self.rows, cols: self.cols, data: self.data.to_field(field, T::tol(1e-12))? })
    }

    /// Column `j` promoted to complex.
    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub(crate) fn column_elems<E: Elem<T>>(&self, j: usize) -> Vec<E> {
        let v = self.elems::<E>();
        (0..self.rows).map(|i| v[i * self.cols + j]).collect()
    }

    pub(crate) fn row_elems<E: Elem<T>>(&self, i: usize) -> &[E] {
        &self.elems::<E>()[i * self.cols..(i + 1) * self.cols]
    }

    pub fn scaled(&self, c: T) -> Self {
        let mut out = self.clone();
        with_entries!(&mut out.data, v => scale_all(v, c));
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let (r, c) = (self.rows, self.cols);
        let data = with_entries!(&self.data, v => <_ as Elem<T>>::wrap(adjoint_raw(v, r, c)));
        RectMatrix { rows: c, cols: r, data }
    }

    /// `self · other`, promoting to the common field.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return invalid(format!("cannot multiply {}x{} by {}x{}", self.rows, self.cols, other.rows, other.cols));
        }
        let f = self.field().join(other.field());
        let (a, b) = (self.to_field(f)?, other.to_field(f)?);
        let data = match (&a.data, &b.data) {
            (Entries::Real(x), Entries::Real(y)) => Entries::Real(matmul_raw(x, a.rows, a.cols, y, b.cols)),
            (Entries::Complex(x), Entries::Complex(y)) => Entries::Complex(matmul_raw(x, a.rows, a.cols, y, b.cols)),
            _ => unreachable!(),
        };
        Ok(RectMatrix { rows: a.rows, cols: b.cols, data })
    }

    /// `self* self`.
    pub fn gram(&self) -> SymMatrix<T> {
        let (r, c) = (self.rows, self.cols);
        let data = with_entries!(&self.data, v => <_ as Elem<T>>::wrap(gram_raw(v, r, c)));
        SymMatrix::from_entries_repair(c, data)
    }

    /// Squared Euclidean norm of every row.
    pub fn row_norms_sq(&self) -> Vec<T> {
        let c = self.cols;
        with_entries!(&self.data, v => row_norms(v, c))
    }

    /// `max |(Q*Q − I)_ij|`.
    pub fn orthonormality_error(&self) -> T {
        let g = self.gram();
        let c = self.cols;
        let mut err = T::zero();
        for i in 0..c {
            for j in 0..c {
                let target = if i == j { T::one() } else { T::zero() };
                let z = g.get(i, j);
                err = err.max((z.re - target).abs().max(z.im.abs()));
            }
        }
        err
    }

    pub fn is_orthonormal(&self, tol: T) -> bool {
        self.orthonormality_error() <= tol
    }
}

fn adjoint_raw<T: Scalar, E: Elem<T>>(v: &[E], r: usize, c: usize) -> Vec<E> {
    let mut out = vec![E::zero(); r * c];
    for i in 0..r {
        for j in 0..c {
            out[j * r + i] = v[i * c + j].conj();
        }
    }
    out
}

pub(crate) fn gram_raw<T: Scalar, E: Elem<T>>(v: &[E], r: usize, c: usize) -> Vec<E> {
    let mut out = vec![E::zero(); c * c];
    for k in 0..r {
        let row = &v[k * c..(k + 1) * c];
        for i in 0..c {
            let a = row[i].conj();
            if a == E::zero() {
                continue;
            }
            for j in 0..c {
                out[i * c + j] += a * row[j];
            }
        }
    }
    out
}

/// Modified Gram–Schmidt with one reorthogonalization pass.
fn orthonormalize_columns<T: Scalar, E: Elem<T>>(v: &mut [E], rows: usize, cols: usize) -> Result<()> {
    let mut colv: Vec<Vec<E>> = (0..cols).map(|j| (0..rows).map(|i| v[i * cols + j]).collect()).collect();
    for j in 0..cols {
        for _ in 0..2 {
            for k in 0..j {
                let (done, rest) = colv.split_at_mut(j);
                let p = dot::<T, E>(&done[k], &rest[0]);
                for (x, &q) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= q * p;
                }
            }
        }
        let nrm = norm_sq::<T, E>(&colv[j]).sqrt();
        if nrm <= T::epsilon() {
            return invalid("columns are numerically dependent");
        }
        colv[j].iter_mut().for_each(|x| *x = x.scale(T::one() / nrm));
    }
    for (j, c) in colv.iter().enumerate() {
        for (i, &x) in c.iter().enumerate() {
            v[i * cols + j] = x;
        }
    }
    Ok(())
}

fn scale_all<T: Scalar, E: Elem<T>>(v: &mut [E], c: T) {
    v.iter_mut().for_each(|x| *x = x.scale(c));
}

fn row_norms<T: Scalar, E: Elem<T>>(v: &[E], c: usize) -> Vec<T> {
    v.chunks(c).map(norm_sq::<T, E>).collect()
}
