//! Minimum eigenvalue of a real Wishart matrix `Y = Σ g_i g_iᵀ`.

use crate::compare::{BoundReport, Certification, IidSummandSpec, Theorem};
use crate::error::{invalid, Result};
use crate::gaussmodel::{Component, GaussianModel};
use crate::matcore::{Field, SymMatrix};
use crate::Scalar;

/// Comparison model and bound for a Wishart matrix.
#[derive(Clone, Debug)]
pub struct WishartReport<T: Scalar> {
    pub d: usize,
    pub n: usize,
    pub model: GaussianModel<T>,
    pub bound: BoundReport<T>,
}

impl<T: Scalar> WishartReport<T> {
    /// Aspect ratio `ϱ = d/n`.
    pub fn aspect_ratio(&self) -> T {
        T::count(self.d) / T::count(self.n)
    }

    /// `expectation_lb / n`.
    pub fn rescaled_bound(&self) -> T {
        self.bound.expectation_lb / T::count(self.n)
    }

    /// Limit `1 − 2√ϱ` of the rescaled bound at fixed aspect ratio.
    pub fn rescaled_limit(&self) -> T {
        T::one() - T::lit(2.0) * self.aspect_ratio().sqrt()
    }

    /// Almost sure limit `1 − 2√ϱ + ϱ` of `λ_min(Y/n)`.
    pub fn bai_yin_limit(&self) -> T {
        let r = self.aspect_ratio();
        T::one() - T::lit(2.0) * r.sqrt() + r
    }
}

fn check(d: usize, n: usize) -> Result<()> {
    if d == 0 || n == 0 {
        return invalid("Wishart dimension and sample count must be positive");
    }
    Ok(())
}

/// One summand `g gᵀ` as an iid spec: mean `I`, dominating Gaussian
/// `γ·I + G_goe` whose variance `(Tr M)² + 2‖M‖_F²` equals `Mom[g gᵀ]`.
pub fn wishart_spec<T: Scalar>(d: usize, n: usize) -> Result<IidSummandSpec<T>> {
    check(d, n)?;
    let component = GaussianModel::zero(d, Field::Real)
        .with(Component::Goe { coeff: T::one() })?
        .with(Component::Scalar { coeff: T::one() })?;
    IidSummandSpec::new(SymMatrix::identity(d, Field::Real), component, n, Certification::CallerAsserted)
}

/// `Z = n·I + γ√n·I + √n·G_goe` with `E λ_min(Z) ≥ n − 2√(dn)` and `σ*²(Z) = 3n`.
pub fn wishart_report<T: Scalar>(d: usize, n: usize) -> Result<WishartReport<T>> {
    let model = crate::compare::iid_model(&wishart_spec::<T>(d, n)?)?;
    let (dt, nt) = (T::count(d), T::count(n));
    let elmin = nt - T::lit(2.0) * (dt * nt).sqrt();
    let bound = BoundReport::analytic(elmin, T::lit(3.0) * nt, Theorem::Iid.dim_factor(d));
    Ok(WishartReport { d, n, model, bound })
}

/// The whole Wishart matrix treated as a single summand:
/// `Z = n·I + γn·I + √n·G_goe`, `σ*²(Z) = n² + 2n`. The resulting bound is
/// negative for every `d ≥ 2`.
pub fn wishart_nonexample_report<T: Scalar>(d: usize, n: usize) -> Result<WishartReport<T>> {
    check(d, n)?;
    let (dt, nt) = (T::count(d), T::count(n));
    let model = GaussianModel::new(SymMatrix::scalar(d, Field::Real, nt))
        .with(Component::Goe { coeff: nt.sqrt() })?
        .with(Component::Scalar { coeff: nt })?;
    let elmin = nt - T::lit(2.0) * (dt * nt).sqrt();
    let bound = BoundReport::analytic(elmin, nt * nt + T::lit(2.0) * nt, Theorem::Iid.dim_factor(d));
    Ok(WishartReport { d, n, model, bound })
}

/// `(2√d + √(6 log 2d))²`: the Wishart bound is positive above this sample count.
pub fn wishart_threshold(d: usize) -> f64 {
    let d = d as f64;
    (2.0 * d.sqrt() + (6.0 * (2.0 * d).ln()).sqrt()).powi(2)
}
