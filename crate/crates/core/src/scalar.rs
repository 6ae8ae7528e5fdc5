use std::fmt::{Debug, Display};
use std::iter::Sum;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point type the library is generic over.
///
/// Implemented for `f32` and `f64`. The dense Hermitian eigensolver is routed
/// through this trait so the generic code never has to name a linear algebra
/// backend.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64;

    /// `base`, floored at a small multiple of the type's machine epsilon.
    fn tol(base: f64) -> Self {
        Self::lit(base.max(64.0 * Self::epsilon().as_f64()))
    }

    fn count(n: usize) -> Self {
        Self::lit(n as f64)
    }

    /// Eigen-decomposition of a real symmetric row-major matrix.
    /// Values come back unsorted.
    #[doc(hidden)]
    fn eig_real(n: usize, a: &[Self], vectors: bool) -> Option<(Vec<Self>, Option<Vec<Self>>)>;

    /// Eigen-decomposition of a complex Hermitian row-major matrix.
    #[doc(hidden)]
    #[allow(clippy::type_complexity)]
    fn eig_complex(n: usize, a: &[Complex<Self>], vectors: bool) -> Option<(Vec<Self>, Option<Vec<Complex<Self>>>)>;
}

const MAX_SWEEPS_PER_DIM: usize = 200;

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }

            fn eig_real(n: usize, a: &[Self], vectors: bool) -> Option<(Vec<Self>, Option<Vec<Self>>)> {
                let m = DMatrix::<$t>::from_row_slice(n, n, a);
                if !vectors {
                    return Some((m.symmetric_eigenvalues().as_slice().to_vec(), None));
                }
                let max_iter = MAX_SWEEPS_PER_DIM * n.max(1);
                let e = SymmetricEigen::try_new(m, <$t>::EPSILON, max_iter)?;
                let v = e.eigenvectors.transpose();
                Some((e.eigenvalues.as_slice().to_vec(), Some(v.as_slice().to_vec())))
            }

            fn eig_complex(
                n: usize,
                a: &[Complex<Self>],
                vectors: bool,
            ) -> Option<(Vec<Self>, Option<Vec<Complex<Self>>>)> {
                let m = DMatrix::<Complex<$t>>::from_row_slice(n, n, a);
                if !vectors {
                    return Some((m.symmetric_eigenvalues().as_slice().to_vec(), None));
                }
                let max_iter = MAX_SWEEPS_PER_DIM * n.max(1);
                let e = SymmetricEigen::try_new(m, <$t>::EPSILON, max_iter)?;
                let v = e.eigenvectors.transpose();
                Some((e.eigenvalues.as_slice().to_vec(), Some(v.as_slice().to_vec())))
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);
