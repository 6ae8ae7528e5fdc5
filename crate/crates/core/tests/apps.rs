mod common;

use approx::assert_relative_eq;
use num_complex::Complex;
use proptest::prelude::*;
use psdc::apps::*;
use psdc::compare::{weighted_model, Theorem};
use psdc::rng::StreamRng;
use psdc::{Field, RectMatrix, SymMatrix};

use common::{mean_se, random_sym, random_unit};

#[test]
fn wishart_reports_analytic_statistics() {
    for (d, n) in [(1, 1), (3, 10), (40, 900)] {
        let r = wishart_report::<f64>(d, n).unwrap();
        assert_eq!(r.bound.sigma_star2, 3.0 * n as f64);
        assert_eq!(r.bound.dim_factor, Theorem::Iid.dim_factor::<f64>(d));
        assert_relative_eq!(r.bound.elmin_z, n as f64 - 2.0 * ((d * n) as f64).sqrt(), max_relative = 1e-14);
    }
    let r = wishart_report::<f64>(100, 10_000).unwrap();
    assert!((r.bound.expectation_lb - 7436.2).abs() < 0.1);
    assert_relative_eq!(r.rescaled_limit(), 1.0 - 2.0 * 0.1, max_relative = 1e-14);
    assert!(wishart_report::<f64>(0, 4).is_err());
}

#[test]
fn wishart_nontriviality_threshold() {
    let th = wishart_threshold(4);
    assert_relative_eq!(th, (4.0 + (6.0 * 8f64.ln()).sqrt()).powi(2), max_relative = 1e-14);
    assert!((th - 56.73).abs() < 0.01);
    assert!(wishart_report::<f64>(4, 57).unwrap().bound.expectation_lb > 0.0);
    assert!(wishart_report::<f64>(4, 56).unwrap().bound.expectation_lb < 0.0);
}

#[test]
fn wishart_nonexample_values() {
    let r = wishart_nonexample_report::<f64>(2, 2).unwrap();
    assert_eq!(r.bound.sigma_star2, 8.0);
    // 2 − 4 − 2√(2(1 + 2/2)·log 4)
    let direct = 2.0 - 4.0 - 2.0 * (4.0 * 4f64.ln()).sqrt();
    assert_relative_eq!(r.bound.expectation_lb, direct, max_relative = 1e-12);
    assert!((r.bound.expectation_lb + 6.71).abs() < 0.01);
    let big = wishart_nonexample_report::<f64>(100, 10_000).unwrap();
    assert_eq!(big.bound.sigma_star2, 1e8 + 2e4);
    assert!(big.bound.expectation_lb < 0.0);
    let st = big.model.stats().unwrap();
    assert_relative_eq!(st.sigma_star2, 1e8 + 2e4, max_relative = 1e-12);
}

#[test]
fn wishart_bound_below_bai_yin_limit() {
    for rho in [0.01, 0.04] {
        for n in [2_500usize, 10_000, 40_000] {
            let d = (rho * n as f64).round() as usize;
            let r = wishart_report::<f64>(d, n).unwrap();
            assert!(r.rescaled_bound() <= r.bai_yin_limit());
            assert!(r.rescaled_bound() <= r.rescaled_limit());
        }
    }
}

#[test]
fn wishart_single_precision_agrees() {
    let a = wishart_report::<f64>(30, 2000).unwrap().bound;
    let b = wishart_report::<f32>(30, 2000).unwrap().bound;
    assert_relative_eq!(a.expectation_lb, f64::from(b.expectation_lb), max_relative = 1e-5);
}

fn repeated_standard_basis() -> RectMatrix<f64> {
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    RectMatrix::from_complex_columns(&[vec![one, zero], vec![zero, one], vec![one, zero], vec![zero, one]]).unwrap()
}

/// The order-2 residual over the spanning set `E_jj, Re E_jk, Im E_jk`.
fn naive_order2_residual(v: &RectMatrix<f64>) -> f64 {
    let (d, n) = (v.rows(), v.cols());
    let mut probes = Vec::new();
    let c = |re: f64, im: f64| Complex::new(re, im);
    for j in 0..d {
        for k in j..d {
            let mut e = vec![c(0.0, 0.0); d * d];
            if j == k {
                e[j * d + j] = c(1.0, 0.0);
                probes.push(e);
                continue;
            }
            e[j * d + k] = c(1.0, 0.0);
            e[k * d + j] = c(1.0, 0.0);
            probes.push(e.clone());
            e[j * d + k] = c(0.0, 1.0);
            e[k * d + j] = c(0.0, -1.0);
            probes.push(e);
        }
    }
    probes
        .into_iter()
        .map(|e| {
            let m = SymMatrix::from_complex(d, e).unwrap();
            let lhs: f64 = (0..n).map(|i| m.quad_form(&v.column(i)).unwrap().powi(2)).sum::<f64>() / n as f64;
            let rhs = (m.frobenius_sq() + m.trace().powi(2)) / (d * (d + 1)) as f64;
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn repeated_basis_is_a_frame_but_not_a_two_design() {
    let sys = DesignSystem::new(repeated_standard_basis()).unwrap();
    assert!(check_design(&sys, 1, 1e-12).unwrap().holds);
    let c2 = check_design(&sys, 2, 1e-9).unwrap();
    assert!(!c2.holds);
    assert_eq!(c2.mode, CheckMode::Basis);
    assert!(naive_order2_residual(sys.vectors()) > 0.1);
}

#[test]
fn mutually_unbiased_bases_form_a_two_design() {
    let sys = mub_c2::<f64>();
    assert_eq!((sys.dim(), sys.len()), (2, 6));
    let c = check_design(&sys, 2, 1e-12).unwrap();
    assert!(c.holds, "{}", c.residual);
    assert!(naive_order2_residual(sys.vectors()) < 1e-14);
    assert!(check_design(&sys, 1, 1e-12).unwrap().holds);
    let rep = sys.replicate(3).unwrap();
    assert_eq!(rep.len(), 18);
    assert!(check_design(&rep, 2, 1e-12).unwrap().holds);
}

#[test]
fn scaled_system_is_not_a_frame() {
    let v = mub_c2::<f64>().vectors().scaled(0.9);
    assert!(DesignSystem::new(v.clone()).is_err());
    let (r, _) = design_residual(&v, 1).unwrap();
    assert!(r > 1e-3);
}

#[test]
fn large_dimension_uses_probes() {
    let d = PROBE_MODE_MIN_DIM;
    let sys = DesignSystem::new(RectMatrix::<f64>::identity_columns(d, d, Field::Complex)).unwrap();
    let c = check_design(&sys, 2, 1e-9).unwrap();
    assert_eq!(c.mode, CheckMode::Probes);
    assert!(!c.holds);
    assert!(check_design(&sys, 1, 1e-12).unwrap().holds);
}

#[test]
fn design_sample_sizes() {
    let p2 = design_sampling_plan(4, 0.05, 2).unwrap();
    assert_relative_eq!(p2.s, 4.0 * (2.0 + 80f64.ln().sqrt()).powi(2), max_relative = 1e-14);
    assert!((p2.s - 67.02).abs() < 0.01);
    let p1 = design_sampling_plan(4, 0.05, 1).unwrap();
    assert!((p1.s - 17.53).abs() < 0.01);
    assert_eq!(p1.required_samples(), 18);
    assert_relative_eq!(p1.failure_bound(3.0), 4.0 * (-3.0f64).exp());
    assert_eq!(DesignPlan::elmin_lower(16.0), 8.0);
    assert!(design_sampling_plan(4, 1.0, 2).is_err());
    assert!(design_sampling_plan(4, 0.1, 3).is_err());
}

#[test]
fn design_tail_at_the_edge() {
    let plan = design_sampling_plan(2, 0.1, 2).unwrap();
    let beta = 16.0;
    let t = beta - 2.0 * f64::sqrt(beta);
    assert_relative_eq!(plan.tail(beta, t), 2.0 * (-2.0f64).exp(), max_relative = 1e-14);
    let r = plan.report::<f64>(beta);
    assert_relative_eq!(r.tail(t), plan.tail(beta, t), max_relative = 1e-14);
}

#[test]
fn design_comparison_model() {
    let sys = mub_c2::<f64>();
    let s = 4.0;
    let beta = s / 2.0;
    let z = weighted_model(&design_spec(&sys, s).unwrap()).unwrap();
    assert!(z.shift().sub(&SymMatrix::scalar(2, Field::Complex, beta)).unwrap().max_abs() < 1e-12);
    let st = z.stats().unwrap();
    let plan = design_sampling_plan(2, 0.1, 2).unwrap();
    assert!(st.sigma_star2 < plan.sigma_star2_upper(beta));
    assert_relative_eq!(st.sigma_star2, 2.0 * beta / 3.0, max_relative = 1e-6);
    let mc = z.mc_expected_lmin(20_000, 3).unwrap();
    assert!(mc.estimate + 3.0 * mc.stderr > DesignPlan::elmin_lower(beta));
}

#[test]
fn design_subsample_mean() {
    let sys = mub_c2::<f64>().replicate(4).unwrap();
    let s = 10.0;
    let mut acc = SymMatrix::zeros(2, Field::Complex);
    let trials = 4000;
    for i in 0..trials {
        let y = sys.subsample(s, &mut StreamRng::new(9, i)).unwrap();
        acc.axpy(1.0 / trials as f64, &y).unwrap();
    }
    assert!(acc.sub(&SymMatrix::scalar(2, Field::Complex, 5.0)).unwrap().max_abs() < 0.15);
    assert!(mub_c2::<f64>().subsample(7.0, &mut StreamRng::new(1, 0)).is_err());
}

#[test]
fn sample_covariance_sizes() {
    let p = scov_sample_size(2.0, 100, 0.5, 0.01).unwrap();
    assert_eq!(p.n, 38_400);
    assert_eq!(p.sigma_star2_bound, 4.0);
    let q = scov_sample_size(1.0, 1, 1.0 - 1e-9, 0.5).unwrap();
    assert_eq!(q.n, 34);
    assert_eq!(gaussian_norm_bound(1.0, 12), 12.0);
    assert!(scov_sample_size(0.5, 10, 0.5, 0.1).is_err());
    assert!(scov_sample_size(2.0, 10, 0.0, 0.1).is_err());
}

#[test]
fn scov_report_tail_at_the_planned_size() {
    let (beta, d, eps, delta) = (2.0, 100, 0.5, 0.01);
    let n = scov_sample_size(beta, d, eps, delta).unwrap().n;
    let r = scov_report::<f64>(beta, d, n).unwrap();
    assert_relative_eq!(r.elmin_z, 1.0 - (12.0 * 4.0 * 100.0 / n as f64).sqrt(), max_relative = 1e-14);
    assert_eq!(r.dim_factor, 200.0);
    let t = eps / 12f64.sqrt();
    assert_relative_eq!(r.tail(t), 200.0 * (-(n as f64) * eps * eps / 96.0).exp(), max_relative = 1e-12);
    assert!(r.tail(t) <= delta);
    assert!(scov_report::<f64>(0.5, d, n).is_err());
}

#[test]
fn sparse_covariance_report() {
    let p = SparseCovProblem::new(100, 8.0, 3.0).unwrap();
    let direct = 25.0 * 100.0 * (2.0 * 3.0 * (2000f64).ln() / 8.0) / 0.25;
    assert!((direct - 57_006.8).abs() < 0.1);
    assert_eq!(sparse_cov_sample_size(&p, 0.5, 0.1).unwrap(), 57_007);
    let n = 60_000;
    let r = sparse_cov_report::<f64>(&p, n, 0.5, 0.1).unwrap();
    assert_eq!(r.n_required, 57_007);
    let nf = n as f64;
    assert_relative_eq!(r.bound.sigma_star2, (3.0 + 37.5) / nf, max_relative = 1e-14);
    let elmin = 1.0 - 2.0 * (100.0 / nf).sqrt() - (2.0 * 37.5 * 100f64.ln() / nf).sqrt();
    assert_relative_eq!(r.bound.elmin_z, elmin, max_relative = 1e-14);
    assert!(r.model.stats().unwrap().sigma_star2 <= r.bound.sigma_star2 * (1.0 + 1e-12));
    assert!(SparseCovProblem::new(10, 11.0, 1.0).is_err());
    assert!(SparseCovProblem::new(10, 2.0, 0.5).is_err());
}

#[test]
fn sparse_mom_at_identity() {
    let p = SparseCovProblem::new(6, 2.0, 3.0).unwrap();
    let i = SymMatrix::<f64>::identity(6, Field::Real);
    assert_relative_eq!(sparse_mom(&p, &i).unwrap(), 30.0 + 3.0 * 36.0 / 2.0, max_relative = 1e-14);
}

#[test]
fn sparse_regime_branches() {
    let d = 100;
    let delta = 0.1;
    let crossover = 2.0 * (2.0 * d as f64 / delta).ln();
    let dense = SparseCovProblem::new(d, crossover * 1.5, 1.0).unwrap();
    let sparse = SparseCovProblem::new(d, crossover / 1.5, 1.0).unwrap();
    assert_eq!(dense.regime_factor(delta), 1.0);
    assert!((sparse.regime_factor(delta) - 1.5).abs() < 1e-12);
    assert_eq!(sparse_cov_sample_size(&dense, 0.5, delta).unwrap(), 10_000);
    let at = SparseCovProblem::new(d, crossover, 1.0).unwrap();
    assert!((at.regime_factor(delta) - 1.0).abs() < 1e-12);
}

#[test]
fn sparse_vector_law_moments() {
    for c in [1.0, 3.0, 7.0] {
        let law = SparseVectorLaw::new(SparseCovProblem::new(5, 2.0, c).unwrap());
        let atoms = law.psi_atoms();
        let m = |k: i32| atoms.iter().map(|(v, p)| p * v.powi(k)).sum::<f64>();
        assert!(m(1).abs() < 1e-12);
        assert_relative_eq!(m(2), 1.0, max_relative = 1e-12);
        assert_relative_eq!(m(4), c, max_relative = 1e-10);
    }
}

#[test]
fn sparse_mom_matches_sampling() {
    let p = SparseCovProblem::new(10, 3.0, 1.0).unwrap();
    let law = SparseVectorLaw::new(p);
    let draws: Vec<Vec<f64>> = (0..100_000).map(|i| law.sample(&mut StreamRng::new(21, i))).collect();
    for s in 0..10 {
        let m = random_sym(10, 100 + s);
        let vals: Vec<f64> = draws.iter().map(|w| m.quad_form_real(w).unwrap().powi(2)).collect();
        let (est, se) = mean_se(&vals);
        let exact = sparse_mom(&p, &m).unwrap();
        assert!((est - exact).abs() < 5.0 * se, "probe {s}: {est} ± {se} vs {exact}");
    }
}

fn balanced(n: usize, d: usize) -> RectMatrix<f64> {
    let block = n / d;
    let cols: Vec<Vec<f64>> = (0..d)
        .map(|j| (0..n).map(|i| if i / block == j { (block as f64).powf(-0.5) } else { 0.0 }).collect())
        .collect();
    RectMatrix::from_real_columns(&cols).unwrap()
}

#[test]
fn coherence_examples() {
    assert_eq!(coherence(&RectMatrix::<f64>::identity_columns(10, 3, Field::Real)).unwrap(), 1.0);
    let h = 0.5f64.sqrt().powi(3);
    let cols = vec![vec![h; 8], (0..8).map(|i| if i % 2 == 0 { h } else { -h }).collect()];
    let q = RectMatrix::from_real_columns(&cols).unwrap();
    assert_relative_eq!(coherence(&q).unwrap(), 0.25, max_relative = 1e-12);
    let q = RectMatrix::<f64>::random_orthonormal(200, 10, Field::Real, 1).unwrap();
    let scan = (0..200).map(|i| (0..10).map(|j| q.get(i, j).norm_sqr()).sum::<f64>()).fold(0.0, f64::max);
    assert_relative_eq!(coherence(&q).unwrap(), scan, max_relative = 1e-14);
    assert!(coherence(&q.scaled(1.1)).is_err());
}

#[test]
fn sketch_parameter_examples() {
    let p = sketch_params(20, 0.05, 0.5, 0.1).unwrap();
    assert_eq!(p.k, 2301);
    assert!((p.zeta - 38.345).abs() < 1e-3);
    assert!(p.certified);
    assert_eq!(sketch_params(1000, 0.01, 0.5, 0.1).unwrap().k, 64_000);
    let small = sketch_params(20, 2e-4, 0.5, 0.1).unwrap();
    assert!((small.zeta - 0.1534).abs() < 1e-4);
    assert!((small.zeta * 1e5 - 15_340.0).abs() < 10.0);
    let worst = sketch_params(1, 1.0, 0.05, 0.1).unwrap();
    assert!(worst.zeta <= worst.k as f64);
    assert!(sketch_params(10, 1.5, 0.5, 0.1).is_err());
    let prac = practical_sketch_params(10);
    assert_eq!((prac.k, prac.zeta, prac.certified), (20, 8.0, false));
}

#[test]
fn sketch_structure() {
    let (k, n, zeta) = (50, 4000, 6.0);
    let s = make_sketch::<f64>(k, n, zeta, 3).unwrap();
    let mean = zeta * n as f64;
    let sd = (n as f64 * k as f64 * (zeta / k as f64) * (1.0 - zeta / k as f64)).sqrt();
    assert!((s.nnz() as f64 - mean).abs() < 4.0 * sd);
    let v = 1.0 / zeta.sqrt();
    assert!(s.triplets().all(|(r, c, x)| r < k && c < n && (x == v || x == -v)));
    assert_eq!(s, make_sketch::<f64>(k, n, zeta, 3).unwrap());
    assert!(make_sketch::<f64>(5, 10, 6.0, 0).is_err());
}

#[test]
fn dense_sketch_preserves_norm() {
    let k = 16;
    let e1: Vec<f64> = (0..30).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
    let q = RectMatrix::from_real_columns(&[e1]).unwrap();
    let vals: Vec<f64> = (0..10_000)
        .map(|seed| {
            let s = make_sketch::<f64>(k, 30, k as f64, seed).unwrap();
            apply_sketch(&s, &q).unwrap().gram().get(0, 0).re
        })
        .collect();
    let (m, se) = mean_se(&vals);
    assert!((m - 1.0).abs() <= 4.0 * se + 1e-12);
}

#[test]
fn sketch_apply_matches_dense_multiply() {
    let s = make_sketch::<f64>(12, 40, 3.0, 8).unwrap();
    let q = RectMatrix::<f64>::random_orthonormal(40, 4, Field::Real, 2).unwrap();
    let fast = apply_sketch(&s, &q).unwrap();
    let slow = s.to_dense().matmul(&q).unwrap();
    for i in 0..12 {
        for j in 0..4 {
            assert!((fast.get(i, j) - slow.get(i, j)).norm() < 1e-12);
        }
    }
    let e: Vec<f64> = (0..40).map(|i| if i == 5 { 1.0 } else { 0.0 }).collect();
    let q1 = RectMatrix::from_real_columns(&[e]).unwrap();
    let dense = s.to_dense();
    let direct = (0..12).map(|i| dense.get(i, 5).re.powi(2)).sum::<f64>();
    assert_relative_eq!(injection_lmin(&q1, &s).unwrap(), direct, max_relative = 1e-12);
    let qc = q.to_field(Field::Complex).unwrap();
    let fc = apply_sketch(&s, &qc).unwrap();
    assert!((fc.get(3, 2) - fast.get(3, 2)).norm() < 1e-12);
}

#[test]
fn sketch_is_an_isometry_on_average() {
    let (k, n, zeta) = (16, 30, 4.0);
    let sketches: Vec<_> = (0..2000).map(|seed| make_sketch::<f64>(k, n, zeta, seed).unwrap()).collect();
    let mut r = StreamRng::new(4, 0);
    for _ in 0..20 {
        let u = random_unit(n, &mut r);
        let q = RectMatrix::from_real_columns(&[u]).unwrap();
        let vals: Vec<f64> = sketches.iter().map(|s| apply_sketch(s, &q).unwrap().gram().get(0, 0).re).collect();
        let (m, se) = mean_se(&vals);
        assert!((m - 1.0).abs() < 4.0 * se, "{m} ± {se}");
    }
}

#[test]
fn injection_model_examples() {
    let q = balanced(400, 20);
    assert_relative_eq!(coherence(&q).unwrap(), 0.05, max_relative = 1e-12);
    let r = injection_model::<f64>(&q, 2301, 38.35).unwrap();
    assert!((r.bound.elmin_z - 0.725).abs() < 1e-3);
    assert!((r.bound.sigma_star2 - 0.00261).abs() < 1e-5);
    assert_eq!(r.compressed_sigma2_bound, r.coherence);
    let aligned = RectMatrix::<f64>::identity_columns(30, 3, Field::Real);
    let a = injection_model::<f64>(&aligned, 10, 2.0).unwrap();
    assert_eq!(a.coherence, 1.0);
    let compressed = psdc::gaussmodel::GaussianModel::zero(3, Field::Real)
        .with(psdc::gaussmodel::Component::CompressedDiagonal { q: aligned.clone() })
        .unwrap();
    assert_relative_eq!(compressed.sigma2().unwrap(), 1.0, max_relative = 1e-12);
    assert!(injection_model::<f64>(&aligned.to_field(Field::Complex).unwrap(), 10, 2.0).is_err());
}

#[test]
fn injection_model_statistics_hold() {
    let q = RectMatrix::<f64>::random_orthonormal(120, 4, Field::Real, 6).unwrap();
    let r = injection_model::<f64>(&q, 40, 6.0).unwrap();
    let mc = r.model.mc_expected_lmin(4000, 1).unwrap();
    assert!(mc.estimate >= r.bound.elmin_z - 3.0 * mc.stderr);
    let st = r.model.stats().unwrap();
    assert!(st.sigma_star2 <= r.bound.sigma_star2 * (1.0 + 1e-9), "{} > {}", st.sigma_star2, r.bound.sigma_star2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scov_size_monotone(beta in 1.0..4.0f64, d in 1usize..300, eps in 0.05..0.9f64, delta in 0.01..0.9f64, bump in 1.01..2.0f64) {
        let base = scov_sample_size(beta, d, eps, delta).unwrap().n;
        prop_assert!(scov_sample_size(beta * bump, d, eps, delta).unwrap().n >= base);
        prop_assert!(scov_sample_size(beta, d + 1, eps, delta).unwrap().n >= base);
        prop_assert!(scov_sample_size(beta, d, (eps * bump).min(0.99), delta).unwrap().n <= base);
        prop_assert!(scov_sample_size(beta, d, eps, (delta * bump).min(0.99)).unwrap().n <= base);
    }

    #[test]
    fn sparse_size_monotone(d in 2usize..300, zf in 0.05..1.0f64, c in 1.0..6.0f64, eps in 0.05..0.9f64, delta in 0.01..0.9f64, bump in 1.01..2.0f64) {
        let p = SparseCovProblem::new(d, zf * d as f64, c).unwrap();
        let base = sparse_cov_sample_size(&p, eps, delta).unwrap();
        let pc = SparseCovProblem::new(d, p.zeta, c * bump).unwrap();
        prop_assert!(sparse_cov_sample_size(&pc, eps, delta).unwrap() >= base);
        let pd = SparseCovProblem::new(d + 1, p.zeta, c).unwrap();
        prop_assert!(sparse_cov_sample_size(&pd, eps, delta).unwrap() >= base);
        prop_assert!(sparse_cov_sample_size(&p, (eps * bump).min(0.99), delta).unwrap() <= base);
        prop_assert!(sparse_cov_sample_size(&p, eps, (delta * bump).min(0.99)).unwrap() <= base);
    }

    #[test]
    fn sketch_params_monotone(d in 1usize..500, mu in 0.001..0.5f64, eps in 0.3..0.9f64, delta in 0.01..0.9f64, bump in 1.01..2.0f64) {
        let base = sketch_params(d, mu, eps, delta).unwrap();
        let bigger_d = sketch_params(d + 1, mu, eps, delta).unwrap();
        prop_assert!(bigger_d.k >= base.k && bigger_d.zeta >= base.zeta);
        if let Ok(m) = sketch_params(d, (mu * bump).min(1.0), eps, delta) {
            prop_assert!(m.zeta >= base.zeta && m.k == base.k);
        }
        let e = sketch_params(d, mu, (eps * bump).min(0.99), delta).unwrap();
        prop_assert!(e.k <= base.k && e.zeta <= base.zeta);
        let l = sketch_params(d, mu, eps, (delta * bump).min(0.99)).unwrap();
        prop_assert!(l.k <= base.k && l.zeta <= base.zeta);
    }

    #[test]
    fn design_size_monotone(d in 1usize..500, delta in 0.01..0.9f64, bump in 1.01..2.0f64, order in 1u8..=2) {
        let base = design_sampling_plan(d, delta, order).unwrap().s;
        prop_assert!(design_sampling_plan(d + 1, delta, order).unwrap().s >= base);
        prop_assert!(design_sampling_plan(d, (delta * bump).min(0.99), order).unwrap().s <= base);
    }

    #[test]
    fn two_design_implies_frame(seed in 0u64..200, n in 2usize..9) {
        let mut r = StreamRng::new(seed, 0);
        let cols: Vec<Vec<Complex<f64>>> = (0..n)
            .map(|_| {
                let v: Vec<Complex<f64>> = (0..2).map(|_| Complex::new(r.normal(), r.normal())).collect();
                let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                v.into_iter().map(|z| z / s).collect()
            })
            .collect();
        let sys = DesignSystem::new(RectMatrix::from_complex_columns(&cols).unwrap()).unwrap();
        let mub = mub_c2::<f64>();
        for s in [&sys, &mub] {
            if check_design(s, 2, 1e-9).unwrap().holds {
                prop_assert!(check_design(s, 1, 1e-6).unwrap().holds);
            }
        }
        // Each spanning probe has coordinate 1-norm at most √2 in the orthonormal basis.
        let (r2, _) = design_residual(sys.vectors(), 2).unwrap();
        prop_assert!(naive_order2_residual(sys.vectors()) <= 2.0 * r2 + 1e-12);
    }
}
