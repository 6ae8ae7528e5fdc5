use super::{Component, GaussianModel};
use crate::error::Result;
use crate::matcore::{dot, norm_sq, with_entries, Elem, Entries, SymMatrix};
use crate::rng::StreamRng;
use crate::Scalar;

/// Random restarts used by the weak-variance estimator.
pub const ESTIMATOR_RESTARTS: usize = 32;
const ESTIMATOR_SEED: u64 = 0x005e_ed0f_5167_u64;
const ESTIMATOR_MAX_STEPS: usize = 2000;
const ESTIMATOR_REL_IMPROVEMENT: f64 = 1e-10;
/// Above this many `d³` flops the commuting-basis test is skipped.
const COMMUTE_BUDGET: f64 = 4e9;

/// Summary statistics of a Gaussian model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelStats<T> {
    /// Matrix variance `‖E(Z − EZ)²‖`.
    pub sigma2: T,
    /// Weak variance `max_{‖u‖=1} Var[u*Zu]`, or an upper bound for it when
    /// combined across components, or an estimate when no closed form applies.
    pub sigma_star2: T,
    pub sigma_star2_is_exact: bool,
    /// Matrix Khinchin bound `√(2σ² log d)`.
    pub khinchin: T,
    pub dim: usize,
}

/// `√(2σ² log d)`.
pub fn khinchin<T: Scalar>(sigma2: T, d: usize) -> T {
    (T::lit(2.0) * sigma2 * T::count(d).ln()).sqrt()
}

/// Coefficient of one series term: either `w·v v*` or a dense matrix.
enum Term<T: Scalar, E> {
    Rank1(T, Vec<E>),
    Full(Vec<E>),
}

impl<T: Scalar, E: Elem<T>> Term<T, E> {
    /// Returns `u* H u` and accumulates `(u* H u)·H u` into `g`.
    fn eval(&self, u: &[E], g: Option<&mut [E]>) -> T {
        match self {
            Term::Rank1(w, v) => {
                let p = dot::<T, E>(v, u);
                let s = *w * p.abs_sq();
                if let Some(g) = g {
                    let c = p.scale(*w * s);
                    g.iter_mut().zip(v).for_each(|(x, &y)| *x += y * c);
                }
                s
            }
            Term::Full(h) => {
                let d = u.len();
                let hu: Vec<E> = (0..d)
                    .map(|i| h[i * d..(i + 1) * d].iter().zip(u).fold(E::zero(), |s, (&a, &b)| s + a * b))
                    .collect();
                let s = dot::<T, E>(u, &hu).re();
                if let Some(g) = g {
                    g.iter_mut().zip(&hu).for_each(|(x, &y)| *x += y.scale(s));
                }
                s
            }
        }
    }

    fn diag(&self, d: usize) -> Option<Vec<T>> {
        match self {
            Term::Rank1(w, v) => {
                let nz = v.iter().filter(|x| x.abs_sq() > T::zero()).count();
                (nz <= 1).then(|| v.iter().map(|x| *w * x.abs_sq()).collect())
            }
            Term::Full(h) => {
                let scale = h.iter().fold(T::zero(), |m, x| m.max(x.abs_sq()));
                let off = (0..d * d).filter(|k| k / d != k % d).fold(T::zero(), |m, k| m.max(h[k].abs_sq()));
                (off <= T::tol(1e-24) * scale).then(|| (0..d).map(|i| h[i * d + i].re()).collect())
            }
        }
    }

    fn dense(&self, d: usize) -> Vec<E> {
        match self {
            Term::Full(h) => h.clone(),
            Term::Rank1(w, v) => {
                let mut h = vec![E::zero(); d * d];
                for i in 0..d {
                    for j in 0..d {
                        h[i * d + j] = (v[i] * v[j].conj()).scale(*w);
                    }
                }
                h
            }
        }
    }
}

/// Max over basis vectors `j` of `Σ_i h_ij²`: the exact weak variance when every
/// term is diagonal in a common basis with diagonal `h_i`.
fn vertex_max<T: Scalar>(diags: &[Vec<T>], d: usize) -> T {
    (0..d).map(|j| diags.iter().map(|h| h[j] * h[j]).sum::<T>()).fold(T::zero(), T::max)
}

fn series_weak_variance<T: Scalar, E: Elem<T>>(terms: &[Term<T, E>], d: usize) -> Result<(T, bool)> {
    if terms.is_empty() {
        return Ok((T::zero(), true));
    }
    if let Some(diags) = terms.iter().map(|t| t.diag(d)).collect::<Option<Vec<_>>>() {
        return Ok((vertex_max(&diags, d), true));
    }
    if (terms.len() as f64) * (d as f64).powi(3) <= COMMUTE_BUDGET {
        if let Some(diags) = common_eigenbasis_diagonals(terms, d)? {
            return Ok((vertex_max(&diags, d), true));
        }
    }
    Ok((ascend(terms, d), false))
}

/// Diagonals of every term in the eigenbasis of a random combination, provided
/// that basis diagonalizes all of them.
fn common_eigenbasis_diagonals<T: Scalar, E: Elem<T>>(terms: &[Term<T, E>], d: usize) -> Result<Option<Vec<Vec<T>>>> {
    let mut rng = StreamRng::new(ESTIMATOR_SEED, 1);
    let mut r = vec![E::zero(); d * d];
    let dense: Vec<Vec<E>> = terms.iter().map(|t| t.dense(d)).collect();
    for h in &dense {
        let c = T::lit(rng.normal());
        r.iter_mut().zip(h).for_each(|(x, &y)| *x += y.scale(c));
    }
    let e = SymMatrix::from_elems(d, r).eigen()?;
    let v = e.vectors.to_field(E::FIELD)?;
    let mut diags = Vec::with_capacity(terms.len());
    for h in dense {
        let hm = SymMatrix::from_elems(d, h);
        let t = hm.congruence(&v)?;
        if t.max_off_diagonal() > T::tol(1e-10) * hm.frobenius_norm().max(T::min_positive_value()) {
            return Ok(None);
        }
        diags.push(t.diag());
    }
    Ok(Some(diags))
}

fn value<T: Scalar, E: Elem<T>>(terms: &[Term<T, E>], u: &[E]) -> T {
    terms
        .iter()
        .map(|t| {
            let s = t.eval(u, None);
            s * s
        })
        .sum()
}

fn normalize<T: Scalar, E: Elem<T>>(u: &mut [E]) -> bool {
    let n = norm_sq::<T, E>(u).sqrt();
    if !(n > T::zero()) || !n.is_finite() {
        return false;
    }
    u.iter_mut().for_each(|x| *x = x.scale(T::one() / n));
    true
}

/// Projected gradient ascent of `Σ (u*H_i u)²` on the unit sphere, multi-start.
fn ascend<T: Scalar, E: Elem<T>>(terms: &[Term<T, E>], d: usize) -> T {
    let mut rng = StreamRng::new(ESTIMATOR_SEED, 0);
    let mut best = T::zero();
    let mut starts: Vec<Vec<E>> = Vec::new();
    if d <= ESTIMATOR_RESTARTS {
        for j in 0..d {
            let mut e = vec![E::zero(); d];
            e[j] = E::from_re(T::one());
            starts.push(e);
        }
    }
    for _ in 0..ESTIMATOR_RESTARTS {
        let mut u: Vec<E> = (0..d)
            .map(|_| {
                let z = num_complex::Complex::new(T::lit(rng.normal()), T::lit(rng.normal()));
                E::from_complex(z)
            })
            .collect();
        if normalize(&mut u) {
            starts.push(u);
        }
    }
    let tol = T::tol(ESTIMATOR_REL_IMPROVEMENT);
    for mut u in starts {
        let mut v = value(terms, &u);
        let mut eta = T::lit(0.5);
        for _ in 0..ESTIMATOR_MAX_STEPS {
            let mut g = vec![E::zero(); d];
            for t in terms {
                t.eval(&u, Some(&mut g));
            }
            let radial = dot::<T, E>(&u, &g);
            g.iter_mut().zip(&u).for_each(|(x, &y)| *x -= y * radial);
            let gn = norm_sq::<T, E>(&g).sqrt();
            if !(gn > T::epsilon() * v.max(T::min_positive_value())) {
                break;
            }
            let mut improved = false;
            while eta > T::lit(1e-14) {
                let mut w: Vec<E> = u.iter().zip(&g).map(|(&a, &b)| a + b.scale(eta / gn)).collect();
                if !normalize(&mut w) {
                    break;
                }
                let vw = value(terms, &w);
                if vw > v {
                    let rel = (vw - v) / vw;
                    u = w;
                    v = vw;
                    eta = (eta * T::lit(2.0)).min(T::one());
                    improved = rel >= tol;
                    if !improved {
                        eta = T::zero();
                    }
                    break;
                }
                eta *= T::lit(0.5);
            }
            if !improved {
                break;
            }
        }
        best = best.max(v);
    }
    best
}

/// Multi-start estimate of `max_{‖u‖=1} Σ (u*H_i u)²` for arbitrary `H_i`.
/// The result is the best value found, so it never exceeds the true maximum
/// by more than rounding.
pub fn weak_variance_estimate<T: Scalar>(matrices: &[SymMatrix<T>]) -> T {
    let Some(first) = matrices.first() else { return T::zero() };
    let (d, f) = (first.dim(), matrices.iter().fold(first.field(), |f, m| f.join(m.field())));
    let promoted: Vec<SymMatrix<T>> = matrices.iter().map(|m| m.to_field(f).expect("widening")).collect();
    match f {
        crate::Field::Real => {
            let terms: Vec<Term<T, T>> = promoted.iter().map(|m| Term::Full(m.elems::<T>().to_vec())).collect();
            ascend(&terms, d)
        }
        crate::Field::Complex => {
            let terms: Vec<Term<T, num_complex::Complex<T>>> =
                promoted.iter().map(|m| Term::Full(m.elems().to_vec())).collect();
            ascend(&terms, d)
        }
    }
}

impl<T: Scalar> GaussianModel<T> {
    /// `E(Z − EZ)²`.
    pub fn variance_matrix(&self) -> SymMatrix<T> {
        let (d, f) = (self.dim(), self.field());
        let mut data = Entries::zeros(d * d, f);
        with_entries!(&mut data, acc => {
            for c in self.components() {
                self.add_component_variance(c, acc);
            }
        });
        SymMatrix::from_entries_repair(d, data)
    }

    fn add_component_variance<E: Elem<T>>(&self, c: &Component<T>, acc: &mut [E]) {
        let d = self.dim();
        let add_id = |acc: &mut [E], s: T| (0..d).for_each(|i| acc[i * d + i] += E::from_re(s));
        let add_outer = |acc: &mut [E], s: T, v: &[E]| {
            for i in 0..d {
                for j in 0..d {
                    acc[i * d + j] += (v[i] * v[j].conj()).scale(s);
                }
            }
        };
        match c {
            Component::Scalar { coeff } | Component::Diagonal { coeff } => add_id(acc, *coeff * *coeff),
            Component::Goe { coeff } => add_id(acc, *coeff * *coeff * T::count(d + 1)),
            Component::Gue { coeff } => add_id(acc, *coeff * *coeff * T::count(d)),
            Component::RankOneSeries { weights, vectors } => {
                for (k, &w) in weights.iter().enumerate() {
                    let u = vectors.column_elems::<E>(k);
                    add_outer(acc, w * norm_sq::<T, E>(&u), &u);
                }
            }
            Component::GeneralSeries { matrices } => {
                for h in matrices {
                    let h2 = h.square();
                    acc.iter_mut().zip(h2.elems::<E>()).for_each(|(x, &y)| *x += y);
                }
            }
            Component::CompressedDiagonal { q } => {
                for i in 0..q.rows() {
                    let v: Vec<E> = q.row_elems::<E>(i).iter().map(|x| x.conj()).collect();
                    add_outer(acc, norm_sq::<T, E>(&v), &v);
                }
            }
        }
    }

    /// `σ²(Z)`.
    pub fn sigma2(&self) -> Result<T> {
        Ok(self.variance_matrix().lambda_max()?.max(T::zero()))
    }

    /// Weak variance of one component and whether the value is exact.
    pub fn component_weak_variance(&self, c: &Component<T>) -> Result<(T, bool)> {
        let d = self.dim();
        match self.field() {
            crate::Field::Real => component_weak_variance::<T, T>(c, d),
            crate::Field::Complex => component_weak_variance::<T, num_complex::Complex<T>>(c, d),
        }
    }

    /// σ², σ*² and the Khinchin bound.
    ///
    /// σ*² is summed over components, which bounds the weak variance of the
    /// sum from above; it is flagged exact only for a single component with a
    /// closed form.
    pub fn stats(&self) -> Result<ModelStats<T>> {
        let sigma2 = self.sigma2()?;
        let mut sigma_star2 = T::zero();
        let mut exact = true;
        for c in self.components() {
            let (v, e) = self.component_weak_variance(c)?;
            sigma_star2 += v;
            exact &= e;
        }
        let exact = exact && self.components().len() <= 1;
        Ok(ModelStats {
            sigma2,
            sigma_star2,
            sigma_star2_is_exact: exact,
            khinchin: khinchin(sigma2, self.dim()),
            dim: self.dim(),
        })
    }
}

fn component_weak_variance<T: Scalar, E: Elem<T>>(c: &Component<T>, d: usize) -> Result<(T, bool)> {
    let sq = |x: T| x * x;
    match c {
        Component::Scalar { coeff } | Component::Diagonal { coeff } | Component::Gue { coeff } => {
            Ok((sq(*coeff), true))
        }
        Component::Goe { coeff } => Ok((T::lit(2.0) * sq(*coeff), true)),
        Component::RankOneSeries { weights, vectors } => {
            let cols: Vec<(T, Vec<E>)> = weights
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > T::zero())
                .map(|(k, &w)| (w, vectors.column_elems::<E>(k)))
                .filter(|(_, u)| norm_sq::<T, E>(u) > T::zero())
                .collect();
            if mutually_orthogonal(&cols) {
                let v = cols.iter().map(|(w, u)| *w * sq(norm_sq::<T, E>(u))).fold(T::zero(), T::max);
                return Ok((v, true));
            }
            let terms: Vec<Term<T, E>> = cols.into_iter().map(|(w, u)| Term::Rank1(w.sqrt(), u)).collect();
            series_weak_variance(&terms, d)
        }
        Component::GeneralSeries { matrices } => {
            let terms: Vec<Term<T, E>> = matrices.iter().map(|h| Term::Full(h.elems::<E>().to_vec())).collect();
            series_weak_variance(&terms, d)
        }
        Component::CompressedDiagonal { q } => {
            let terms: Vec<Term<T, E>> = (0..q.rows())
                .map(|i| Term::Rank1(T::one(), q.row_elems::<E>(i).iter().map(|x| x.conj()).collect()))
                .filter(|t| matches!(t, Term::Rank1(_, v) if norm_sq::<T, E>(v) > T::zero()))
                .collect();
            series_weak_variance(&terms, d)
        }
    }
}

fn mutually_orthogonal<T: Scalar, E: Elem<T>>(cols: &[(T, Vec<E>)]) -> bool {
    let d = cols.first().map_or(0, |c| c.1.len());
    if cols.len() > d {
        return false;
    }
    let norms: Vec<T> = cols.iter().map(|c| norm_sq::<T, E>(&c.1).sqrt()).collect();
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            let ip = dot::<T, E>(&cols[i].1, &cols[j].1).abs_sq().sqrt();
            if ip > T::tol(1e-10) * norms[i] * norms[j] {
                return false;
            }
        }
    }
    true
}
