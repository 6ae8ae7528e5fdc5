#![allow(dead_code)]

use num_complex::Complex;
use psdc::rng::StreamRng;
use psdc::{RectMatrix, SymMatrix};

pub fn random_sym(d: usize, seed: u64) -> SymMatrix<f64> {
    let mut r = StreamRng::new(seed, 0);
    let mut a = vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let x = r.normal();
            a[i * d + j] = x;
            a[j * d + i] = x;
        }
    }
    SymMatrix::from_real(d, a).unwrap()
}

pub fn random_herm(d: usize, seed: u64) -> SymMatrix<f64> {
    let mut r = StreamRng::new(seed, 1);
    let mut a = vec![Complex::new(0.0, 0.0); d * d];
    for i in 0..d {
        a[i * d + i] = Complex::new(r.normal(), 0.0);
        for j in i + 1..d {
            let z = Complex::new(r.normal(), r.normal());
            a[i * d + j] = z;
            a[j * d + i] = z.conj();
        }
    }
    SymMatrix::from_complex(d, a).unwrap()
}

/// `B Bᵀ / d` with `B` standard Gaussian.
pub fn random_psd(d: usize, seed: u64) -> SymMatrix<f64> {
    let mut r = StreamRng::new(seed, 2);
    let b: Vec<f64> = (0..d * d).map(|_| r.normal()).collect();
    RectMatrix::from_real(d, d, b).unwrap().adjoint().gram().scaled(1.0 / d as f64)
}

pub fn random_unit(d: usize, r: &mut StreamRng) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| r.normal()).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Number of eigenvalues strictly below `x`, from the inertia of `A − xI`
/// (Sylvester's law; LDL* pivots of a Hermitian matrix are real).
pub fn count_below(m: &SymMatrix<f64>, x: f64) -> usize {
    let d = m.dim();
    let mut a: Vec<Complex<f64>> = m.to_complex_entries();
    for i in 0..d {
        a[i * d + i] -= x;
    }
    let mut neg = 0;
    for k in 0..d {
        let mut p = a[k * d + k].re;
        if p == 0.0 {
            p = -1e-300;
        }
        if p < 0.0 {
            neg += 1;
        }
        for i in k + 1..d {
            let l = a[i * d + k] / p;
            for j in k + 1..d {
                let akj = a[k * d + j];
                a[i * d + j] -= l * akj;
            }
        }
    }
    neg
}

/// All eigenvalues by bisection on the inertia count.
pub fn bisection_eigvals(m: &SymMatrix<f64>) -> Vec<f64> {
    let d = m.dim();
    let r = (0..d).map(|i| (0..d).map(|j| m.get(i, j).norm()).sum::<f64>()).fold(0.0, f64::max) + 1.0;
    (0..d)
        .map(|k| {
            let (mut lo, mut hi) = (-r, r);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(m, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}
