use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;

use super::{Entries, Field};
use crate::Scalar;

/// Storage element of a matrix over either field. Lets kernels be written once.
pub(crate) trait Elem<T: Scalar>:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + 'static
{
    const FIELD: Field;

    fn zero() -> Self;
    fn from_re(x: T) -> Self;
    /// Projects a complex value onto this field (drops the imaginary part for reals).
    fn from_complex(z: Complex<T>) -> Self;
    fn re(self) -> T;
    fn conj(self) -> Self;
    fn abs_sq(self) -> T;
    fn scale(self, c: T) -> Self;

    fn view(e: &Entries<T>) -> Option<&[Self]>;
    fn wrap(v: Vec<Self>) -> Entries<T>;

    /// Eigenvalues (unsorted) and optionally row-major eigenvector columns.
    #[allow(clippy::type_complexity)]
    fn eig(n: usize, a: &[Self], vectors: bool) -> Option<(Vec<T>, Option<Vec<Self>>)>;
}

impl<T: Scalar> Elem<T> for T {
    const FIELD: Field = Field::Real;

    #[inline]
    fn zero() -> Self {
        T::zero()
    }
    #[inline]
    fn from_re(x: T) -> Self {
        x
    }
    #[inline]
    fn from_complex(z: Complex<T>) -> Self {
        z.re
    }
    #[inline]
    fn re(self) -> T {
        self
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn abs_sq(self) -> T {
        self * self
    }
    #[inline]
    fn scale(self, c: T) -> Self {
        self * c
    }
    fn view(e: &Entries<T>) -> Option<&[Self]> {
        match e {
            Entries::Real(v) => Some(v),
            Entries::Complex(_) => None,
        }
    }
    fn wrap(v: Vec<Self>) -> Entries<T> {
        Entries::Real(v)
    }
    fn eig(n: usize, a: &[Self], vectors: bool) -> Option<(Vec<T>, Option<Vec<Self>>)> {
        T::eig_real(n, a, vectors)
    }
}

impl<T: Scalar> Elem<T> for Complex<T> {
    const FIELD: Field = Field::Complex;

    #[inline]
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    #[inline]
    fn from_re(x: T) -> Self {
        Complex::new(x, T::zero())
    }
    #[inline]
    fn from_complex(z: Complex<T>) -> Self {
        z
    }
    #[inline]
    fn re(self) -> T {
        self.re
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    #[inline]
    fn abs_sq(self) -> T {
        self.norm_sqr()
    }
    #[inline]
    fn scale(self, c: T) -> Self {
        Complex::new(self.re * c, self.im * c)
    }
    fn view(e: &Entries<T>) -> Option<&[Self]> {
        match e {
            Entries::Complex(v) => Some(v),
            Entries::Real(_) => None,
        }
    }
    fn wrap(v: Vec<Self>) -> Entries<T> {
        Entries::Complex(v)
    }
    fn eig(n: usize, a: &[Self], vectors: bool) -> Option<(Vec<T>, Option<Vec<Self>>)> {
        T::eig_complex(n, a, vectors)
    }
}

/// Conjugate-linear inner product `Σ conj(a_i) b_i`.
#[inline]
pub(crate) fn dot<T: Scalar, E: Elem<T>>(a: &[E], b: &[E]) -> E {
    let mut s = E::zero();
    for (&x, &y) in a.iter().zip(b) {
        s += x.conj() * y;
    }
    s
}

#[inline]
pub(crate) fn norm_sq<T: Scalar, E: Elem<T>>(a: &[E]) -> T {
    a.iter().fold(T::zero(), |s, &x| s + x.abs_sq())
}
