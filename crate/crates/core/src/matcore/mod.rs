//! Dense self-adjoint and rectangular matrices over the real or complex field.
//!
//! Self-adjoint matrices are the carrier for every random matrix in the crate.
//! Entries are stored row-major; complex entries as interleaved `(re, im)` pairs.

mod elem;
mod io;
mod rect;
mod sym;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

pub(crate) use elem::{dot, norm_sq, Elem};
pub(crate) use io::parse_complex as io_parse_complex;
pub use io::{read_rect_csv, read_sym_csv, write_rect_csv, write_sym_csv};
pub use rect::RectMatrix;
pub use sym::{Eigen, SymMatrix};

use crate::error::{Error, Result};
use crate::Scalar;

/// Scalar field of a matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// The smallest field containing both.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Complex || other == Field::Complex {
            Field::Complex
        } else {
            Field::Real
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Real => "real",
            Field::Complex => "complex",
        })
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            other => Err(Error::Validation(format!("unknown field `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Entries<T: Scalar> {
    Real(Vec<T>),
    Complex(Vec<Complex<T>>),
}

impl<T: Scalar> Entries<T> {
    pub(crate) fn zeros(len: usize, field: Field) -> Self {
        match field {
            Field::Real => Entries::Real(vec![T::zero(); len]),
            Field::Complex => Entries::Complex(vec![Complex::new(T::zero(), T::zero()); len]),
        }
    }

    pub(crate) fn field(&self) -> Field {
        match self {
            Entries::Real(_) => Field::Real,
            Entries::Complex(_) => Field::Complex,
        }
    }

    pub(crate) fn len(&self) -> usize {
        match self {
            Entries::Real(v) => v.len(),
            Entries::Complex(v) => v.len(),
        }
    }

    pub(crate) fn get(&self, idx: usize) -> Complex<T> {
        match self {
            Entries::Real(v) => Complex::new(v[idx], T::zero()),
            Entries::Complex(v) => v[idx],
        }
    }

    pub(crate) fn promote(&self) -> Vec<Complex<T>> {
        match self {
            Entries::Real(v) => v.iter().map(|&x| Complex::new(x, T::zero())).collect(),
            Entries::Complex(v) => v.clone(),
        }
    }

    /// Converts to `field`; complex to real requires negligible imaginary parts.
    pub(crate) fn to_field(&self, field: Field, tol: T) -> Result<Self> {
        match (self, field) {
            (Entries::Real(v), Field::Real) => Ok(Entries::Real(v.clone())),
            (_, Field::Complex) => Ok(Entries::Complex(self.promote())),
            (Entries::Complex(v), Field::Real) => {
                let scale = v.iter().fold(T::zero(), |m, z| m.max(z.norm()));
                if v.iter().any(|z| z.im.abs() > tol * scale.max(T::one())) {
                    return Err(Error::FieldMismatch("matrix has nonzero imaginary entries".into()));
                }
                Ok(Entries::Real(v.iter().map(|z| z.re).collect()))
            }
        }
    }

    pub(crate) fn is_finite(&self) -> bool {
        match self {
            Entries::Real(v) => v.iter().all(|x| x.is_finite()),
            Entries::Complex(v) => v.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
        }
    }
}

/// Runs a generic kernel on whichever element type `$e` holds.
macro_rules! with_entries {
    ($e:expr, $v:ident => $body:expr) => {
        match $e {
            $crate::matcore::Entries::Real($v) => $body,
            $crate::matcore::Entries::Complex($v) => $body,
        }
    };
}
pub(crate) use with_entries;

/// Row-major product of an `r×m` and an `m×c` matrix.
pub(crate) fn matmul_raw<T: Scalar, E: Elem<T>>(a: &[E], r: usize, m: usize, b: &[E], c: usize) -> Vec<E> {
    let mut out = vec![E::zero(); r * c];
    for i in 0..r {
        let orow = &mut out[i * c..(i + 1) * c];
        for k in 0..m {
            let aik = a[i * m + k];
            if aik == E::zero() {
                continue;
            }
            let brow = &b[k * c..(k + 1) * c];
            for (o, &bkj) in orow.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    out
}

/// Ascending eigenvalues of `m`.
pub fn sym_eigvals<T: Scalar>(m: &SymMatrix<T>) -> Result<Vec<T>> {
    m.eigvals()
}

/// Trace inner product `Tr[a* b]`.
pub fn trace_inner<T: Scalar>(a: &SymMatrix<T>, b: &SymMatrix<T>) -> Result<T> {
    a.trace_inner(b)
}

/// `k* m k`.
pub fn congruence<T: Scalar>(k: &RectMatrix<T>, m: &SymMatrix<T>) -> Result<SymMatrix<T>> {
    m.congruence(k)
}
