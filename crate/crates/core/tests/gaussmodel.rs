mod common;

use common::*;
use num_complex::Complex;
use proptest::prelude::*;
use psdc::gaussmodel::{parse_descriptor, Component, GaussianModel};
use psdc::rng::StreamRng;
use psdc::{Error, Field, RectMatrix, SymMatrix};

fn goe(d: usize, c: f64) -> GaussianModel<f64> {
    GaussianModel::zero(d, Field::Real).with(Component::Goe { coeff: c }).unwrap()
}

fn gue(d: usize, c: f64) -> GaussianModel<f64> {
    GaussianModel::zero(d, Field::Complex).with(Component::Gue { coeff: c }).unwrap()
}

fn one(d: usize, f: Field, c: Component<f64>) -> GaussianModel<f64> {
    GaussianModel::zero(d, f).with(c).unwrap()
}

/// One model per component type, dimension 3.
fn zoo() -> Vec<(&'static str, GaussianModel<f64>)> {
    let d = 3;
    let mut r = StreamRng::new(44, 0);
    let vecs = RectMatrix::from_real(d, 4, (0..12).map(|_| r.normal()).collect()).unwrap();
    let q = RectMatrix::from_real(5, d, (0..15).map(|_| r.normal()).collect()).unwrap();
    let hs = vec![random_sym(d, 1), random_sym(d, 2)];
    let cq = RectMatrix::from_complex(4, d, (0..12).map(|_| Complex::new(r.normal(), r.normal())).collect()).unwrap();
    vec![
        ("scalar", one(d, Field::Real, Component::Scalar { coeff: 1.5 })),
        ("diagonal", one(d, Field::Real, Component::Diagonal { coeff: 0.7 })),
        ("goe", goe(d, 1.2)),
        ("gue", gue(d, 0.8)),
        ("rank1", one(d, Field::Real, Component::RankOneSeries { weights: vec![0.5, 1.0, 2.0, 0.1], vectors: vecs })),
        ("series", one(d, Field::Real, Component::GeneralSeries { matrices: hs })),
        ("compressed", one(d, Field::Real, Component::CompressedDiagonal { q })),
        ("compressed-complex", one(d, Field::Complex, Component::CompressedDiagonal { q: cq })),
        ("diagonal-complex", one(d, Field::Complex, Component::Diagonal { coeff: 1.1 })),
    ]
}

fn random_test(d: usize, f: Field, seed: u64) -> SymMatrix<f64> {
    match f {
        Field::Real => random_sym(d, seed),
        Field::Complex => random_herm(d, seed),
    }
}

#[test]
fn shift_only_model_samples_its_shift() {
    let delta = random_sym(4, 3);
    let m = GaussianModel::new(delta.clone());
    for seed in 0..5 {
        assert_eq!(m.sample(seed), delta);
    }
}

#[test]
fn samples_are_reproducible() {
    let m = goe(6, 1.0).add_independent(&one(6, Field::Real, Component::Scalar { coeff: 2.0 })).unwrap();
    assert_eq!(m.sample(9), m.sample(9));
    assert_ne!(m.sample(9), m.sample(10));
}

#[test]
fn ensemble_field_is_validated() {
    let e = GaussianModel::<f64>::zero(3, Field::Complex).with(Component::Goe { coeff: 1.0 });
    assert!(matches!(e, Err(Error::FieldMismatch(_))));
    let e = GaussianModel::<f64>::zero(3, Field::Real).with(Component::Gue { coeff: 1.0 });
    assert!(matches!(e, Err(Error::FieldMismatch(_))));
    let bad = RectMatrix::identity_columns(3, 1, Field::Real);
    let e =
        GaussianModel::<f64>::zero(3, Field::Real).with(Component::RankOneSeries { weights: vec![-1.0], vectors: bad });
    assert!(e.is_err());
    let e =
        GaussianModel::<f64>::zero(3, Field::Real).with(Component::GeneralSeries { matrices: vec![random_sym(2, 1)] });
    assert!(matches!(e, Err(Error::DimensionMismatch { .. })));
}

#[test]
fn goe_entry_variances() {
    let d = 50;
    let m = goe(d, 1.0);
    let (mut diag, mut off) = (Vec::new(), Vec::new());
    for seed in 0..2000 {
        let s = m.sample(seed);
        let e = s.real_entries().unwrap();
        for i in 0..d {
            diag.push(e[i * d + i]);
            for j in i + 1..d {
                off.push(e[i * d + j]);
            }
        }
    }
    let var = |xs: &[f64]| xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
    let (vd, vo) = (var(&diag), var(&off));
    assert!((vd - 2.0).abs() < 3.0 * 2.0 * (2.0 / diag.len() as f64).sqrt(), "{vd}");
    assert!((vo - 1.0).abs() < 3.0 * (2.0 / off.len() as f64).sqrt(), "{vo}");
}

#[test]
fn diagonal_component_has_no_off_diagonal_mass() {
    let m = one(3, Field::Real, Component::Diagonal { coeff: 1.0 });
    for seed in 0..200 {
        assert_eq!(m.sample(seed).max_off_diagonal(), 0.0);
    }
}

#[test]
fn variance_function_examples() {
    let m = random_sym(4, 8);
    let s = one(4, Field::Real, Component::Scalar { coeff: 1.0 });
    assert!((s.var_eval(&m).unwrap() - m.trace().powi(2)).abs() < 1e-12);
    let h = random_herm(4, 8);
    assert!((gue(4, 1.0).var_eval(&h).unwrap() - h.frobenius_sq()).abs() < 1e-12);
    let e11 = SymMatrix::basis_diag(2, Field::Real, 0);
    assert_eq!(goe(2, 1.0).var_eval(&e11).unwrap(), 2.0);
}

#[test]
fn variance_function_matches_sampled_variance() {
    let n = 100_000;
    for (name, model) in zoo() {
        let d = model.dim();
        let samples: Vec<SymMatrix<f64>> = (0..n as u64).map(|s| model.sample(s)).collect();
        for k in 0..20 {
            let m = random_test(d, model.field(), 1000 + k);
            let xs: Vec<f64> = samples.iter().map(|z| m.trace_inner(z).unwrap()).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n as f64;
            let se = ((m4 - var * var) / n as f64).sqrt();
            let want = model.var_eval(&m).unwrap();
            assert!((var - want).abs() < 4.0 * se, "{name} probe {k}: sampled {var} vs {want} (se {se})");
        }
    }
}

#[test]
fn series_expansion_preserves_variance_function() {
    for (name, model) in zoo() {
        let expanded = GaussianModel::new(model.shift().clone())
            .with(Component::GeneralSeries { matrices: model.series_matrices() })
            .unwrap();
        for k in 0..10 {
            let m = random_test(model.dim(), model.field(), 50 + k);
            let (a, b) = (model.var_eval(&m).unwrap(), expanded.var_eval(&m).unwrap());
            assert!((a - b).abs() < 1e-10 * a.max(1.0), "{name}: {a} vs {b}");
        }
        let (s1, s2) = (model.sigma2().unwrap(), expanded.sigma2().unwrap());
        assert!((s1 - s2).abs() < 1e-10 * s1.max(1.0), "{name}: sigma2 {s1} vs {s2}");
    }
}

#[test]
fn ensemble_statistics() {
    let s = goe(4, 1.0).stats().unwrap();
    assert_eq!((s.sigma2, s.sigma_star2, s.sigma_star2_is_exact), (5.0, 2.0, true));
    let s = gue(7, 1.0).stats().unwrap();
    assert!((s.sigma2 - 7.0).abs() < 1e-12 && s.sigma_star2 == 1.0);
    let s = one(8, Field::Real, Component::Diagonal { coeff: 1.0 }).stats().unwrap();
    assert!((s.khinchin - (2.0 * 8f64.ln()).sqrt()).abs() < 1e-12);
    assert!((s.khinchin - 2.039).abs() < 1e-3);
    let s = one(3, Field::Real, Component::Scalar { coeff: 3.0 }).stats().unwrap();
    assert_eq!((s.sigma2, s.sigma_star2), (9.0, 9.0));
}

#[test]
fn orthogonal_rank_one_closed_form() {
    let q = RectMatrix::<f64>::random_orthonormal(5, 3, Field::Real, 3).unwrap();
    let m = one(5, Field::Real, Component::RankOneSeries { weights: vec![0.2, 1.7, 0.9], vectors: q.scaled(2.0) });
    let s = m.stats().unwrap();
    assert!(s.sigma_star2_is_exact);
    assert!((s.sigma_star2 - 1.7 * 16.0).abs() < 1e-10);
}

#[test]
fn commuting_series_is_exact() {
    let q = RectMatrix::<f64>::random_orthonormal(4, 4, Field::Real, 5).unwrap();
    let diags = [[1.0, 2.0, -1.0, 0.5], [0.0, 1.0, 3.0, 1.0], [2.0, 0.0, 0.0, -2.0]];
    let hs: Vec<SymMatrix<f64>> =
        diags.iter().map(|d| SymMatrix::from_diag(Field::Real, d).congruence(&q.adjoint()).unwrap()).collect();
    let s = one(4, Field::Real, Component::GeneralSeries { matrices: hs }).stats().unwrap();
    let want = (0..4).map(|j| diags.iter().map(|d| d[j] * d[j]).sum::<f64>()).fold(0.0, f64::max);
    assert!(s.sigma_star2_is_exact);
    assert!((s.sigma_star2 - want).abs() < 1e-9, "{} vs {want}", s.sigma_star2);
}

/// Grid search over the real unit circle and the complex 2-sphere.
fn grid_weak_variance(hs: &[SymMatrix<f64>]) -> f64 {
    let mut best: f64 = 0.0;
    let n = 800;
    for a in 0..=n {
        let t = std::f64::consts::FRAC_PI_2 * a as f64 / n as f64;
        for b in 0..if hs[0].field() == Field::Complex { 200 } else { 1 } {
            let p = 2.0 * std::f64::consts::PI * b as f64 / 200.0;
            let u = [Complex::new(t.cos(), 0.0), Complex::from_polar(t.sin(), p)];
            for sgn in [1.0, -1.0] {
                let u = [u[0], u[1] * sgn];
                let v: f64 = hs.iter().map(|h| h.quad_form(&u).unwrap().powi(2)).sum();
                best = best.max(v);
            }
        }
    }
    best
}

#[test]
fn weak_variance_estimator_matches_grid_search() {
    for seed in 0..6 {
        let hs = vec![random_sym(2, seed), random_sym(2, seed + 100), random_sym(2, seed + 200)];
        let m = one(2, Field::Real, Component::GeneralSeries { matrices: hs.clone() });
        let s = m.stats().unwrap();
        let g = grid_weak_variance(&hs);
        assert!(!s.sigma_star2_is_exact);
        assert!(
            s.sigma_star2 >= g * (1.0 - 1e-6) && s.sigma_star2 <= g * (1.0 + 1e-3),
            "seed {seed}: {} vs {g}",
            s.sigma_star2
        );
    }
    let hs = vec![random_herm(2, 1), random_herm(2, 2)];
    let m = one(2, Field::Complex, Component::GeneralSeries { matrices: hs.clone() });
    let s = m.stats().unwrap();
    let g = grid_weak_variance(&hs);
    assert!(s.sigma_star2 >= g * (1.0 - 1e-4) && s.sigma_star2 <= g * (1.0 + 1e-3), "{} vs {g}", s.sigma_star2);
}

#[test]
fn congruence_examples() {
    let m = goe(5, 1.0).add_independent(&one(5, Field::Real, Component::Scalar { coeff: 0.5 })).unwrap();
    let same = m.congruence(&RectMatrix::identity_columns(5, 5, Field::Real), false).unwrap();
    for k in 0..20 {
        let t = random_sym(5, k);
        assert!((m.var_eval(&t).unwrap() - same.var_eval(&t).unwrap()).abs() < 1e-10);
    }

    let q = RectMatrix::<f64>::random_orthonormal(5, 2, Field::Real, 1).unwrap();
    let small = goe(5, 1.0).congruence(&q, false).unwrap();
    assert_eq!(small.dim(), 2);
    let t = random_sym(2, 4);
    assert!((small.var_eval(&t).unwrap() - 2.0 * t.frobenius_sq()).abs() < 1e-12);

    let k = RectMatrix::identity_columns(3, 2, Field::Real);
    let c = one(3, Field::Real, Component::Diagonal { coeff: 1.0 }).congruence(&k, false).unwrap();
    assert!(matches!(c.components()[0], Component::CompressedDiagonal { .. }));
    let t = SymMatrix::from_real(2, vec![1.5, 0.3, 0.3, -2.0]).unwrap();
    assert!((c.var_eval(&t).unwrap() - (1.5f64.powi(2) + 4.0)).abs() < 1e-12);
    let n = 100_000;
    let xs: Vec<f64> = (0..n).map(|s| t.trace_inner(&c.sample(s)).unwrap()).collect();
    let (mean, _) = mean_se(&xs);
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!((var - 6.25).abs() < 4.0 * 6.25 * (2.0 / n as f64).sqrt());
}

#[test]
fn congruence_refuses_silent_expansion() {
    let k = RectMatrix::from_real(3, 2, vec![1.0, 0.0, 1.0, 1.0, 0.0, 2.0]).unwrap();
    assert!(goe(3, 1.0).congruence(&k, false).is_err());
    let expanded = goe(3, 1.0).congruence(&k, true).unwrap();
    let direct = |m: &SymMatrix<f64>| goe(3, 1.0).var_eval(&m.congruence(&k.adjoint()).unwrap()).unwrap();
    for s in 0..10 {
        let t = random_sym(2, s);
        assert!((expanded.var_eval(&t).unwrap() - direct(&t)).abs() < 1e-10);
    }
}

#[test]
fn expected_lmin_examples() {
    let m = GaussianModel::new(SymMatrix::<f64>::from_diag(Field::Real, &[1.0, 2.0]));
    let e = m.mc_expected_lmin(100, 0).unwrap();
    assert_eq!((e.estimate, e.stderr), (1.0, 0.0));

    let e = goe(100, 1.0).mc_expected_lmin(2000, 1).unwrap();
    assert!(e.estimate >= -20.0 && e.estimate <= -17.0, "{e:?}");

    let e = one(3, Field::Real, Component::Scalar { coeff: 1.0 }).mc_expected_lmin(4000, 2).unwrap();
    assert!(e.estimate.abs() < 3.0 * e.stderr, "{e:?}");
    assert!(m.mc_expected_lmin(1, 0).is_err());
}

#[test]
fn expected_lmin_is_independent_of_worker_count() {
    let m = goe(8, 1.0);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| m.mc_expected_lmin(3000, 5).unwrap())
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
}

#[test]
fn independent_sum_examples() {
    let a = goe(4, 1.0);
    let z = a.add_independent(&GaussianModel::zero(4, Field::Real)).unwrap();
    assert_eq!(z, a);
    let b = a.add_independent(&one(4, Field::Real, Component::Scalar { coeff: 1.0 })).unwrap();
    let m = random_sym(4, 6);
    let want = 2.0 * m.frobenius_sq() + m.trace().powi(2);
    assert!((b.var_eval(&m).unwrap() - want).abs() < 1e-10);
    assert!(a.add_independent(&gue(4, 1.0)).is_err());
    assert!(a.add_independent(&goe(3, 1.0)).is_err());
}

#[test]
fn matrix_variance_is_subadditive() {
    let zoo = zoo();
    let real: Vec<_> = zoo.iter().filter(|(_, m)| m.field() == Field::Real).map(|(_, m)| m.clone()).collect();
    let mut count = 0;
    for (i, a) in real.iter().enumerate() {
        for b in &real[i..] {
            let (sa, sb) = (a.sigma2().unwrap(), b.sigma2().unwrap());
            let sab = a.add_independent(b).unwrap().sigma2().unwrap();
            assert!(sab <= (sa + sb) * (1.0 + 1e-12));
            count += 1;
        }
    }
    assert!(count >= 10);
}

#[test]
fn khinchin_sandwich() {
    for model in [goe(10, 1.0), gue(10, 1.0), one(10, Field::Real, Component::Diagonal { coeff: 1.0 })] {
        let s = model.stats().unwrap();
        let d = model.dim() as f64;
        let xs: Vec<f64> = (0..4000).map(|k| model.sample(k).lambda_max().unwrap()).collect();
        let (m, se) = mean_se(&xs);
        let lo = (2.0 / std::f64::consts::PI * s.sigma2).sqrt();
        let hi = (2.0 * s.sigma2 * (2.0 * d).ln()).sqrt();
        assert!(m >= lo - 3.0 * se && m <= hi + 3.0 * se, "{m} not in [{lo}, {hi}]");
    }
}

#[test]
fn monotonicity_in_variance() {
    let a = goe(5, 0.5);
    let b = a.add_independent(&one(5, Field::Real, Component::Diagonal { coeff: 0.6 })).unwrap();
    let stat = |m: &GaussianModel<f64>, f: &dyn Fn(&SymMatrix<f64>) -> f64| {
        let xs: Vec<f64> = (0..20_000).map(|k| f(&m.sample(k + 7_000_000))).collect();
        mean_se(&xs)
    };
    let lmax = |z: &SymMatrix<f64>| z.lambda_max().unwrap();
    let trexp = |z: &SymMatrix<f64>| z.eigvals().unwrap().iter().map(|l| (-l).exp()).sum::<f64>();
    for f in [&lmax as &dyn Fn(&SymMatrix<f64>) -> f64, &trexp] {
        let (ma, sa) = stat(&a, f);
        let (mb, sb) = stat(&b, f);
        assert!(ma <= mb + 3.0 * (sa * sa + sb * sb).sqrt(), "{ma} > {mb}");
    }
}

#[test]
fn gaussian_concentration_of_lmin() {
    for model in [goe(6, 0.3), gue(5, 0.4)] {
        let s = model.stats().unwrap();
        let n = 40_000;
        let xs: Vec<f64> = (0..n).map(|k| model.sample(k).lambda_min().unwrap()).collect();
        let (m, _) = mean_se(&xs);
        for theta in [-1.0, -0.5, 0.5, 1.0] {
            let ys: Vec<f64> = xs.iter().map(|x| (theta * (x - m)).exp()).collect();
            let (mgf, se) = mean_se(&ys);
            let bound = (theta * theta * s.sigma_star2 / 2.0).exp();
            assert!(mgf <= bound * (1.0 + 4.0 * se), "θ={theta}: {mgf} > {bound}");
        }
    }
}

#[test]
fn goe_orthogonal_invariance() {
    let d = 4;
    let m = goe(d, 1.0);
    let q = RectMatrix::<f64>::random_orthonormal(d, d, Field::Real, 77).unwrap();
    let n = 20_000;
    let mut plain = vec![0.0; d * d];
    let mut rotated = vec![0.0; d * d];
    for k in 0..n {
        let g = m.sample(k);
        let r = g.congruence(&q).unwrap();
        for i in 0..d * d {
            plain[i] += g.real_entries().unwrap()[i].powi(2) / n as f64;
            rotated[i] += r.real_entries().unwrap()[i].powi(2) / n as f64;
        }
    }
    for i in 0..d * d {
        let want = if i / d == i % d { 2.0 } else { 1.0 };
        let se = want * (2.0 / n as f64).sqrt();
        assert!((plain[i] - want).abs() < 4.0 * se && (rotated[i] - want).abs() < 4.0 * se);
    }
}

#[test]
fn single_precision_models() {
    let m = GaussianModel::<f32>::zero(4, Field::Real).with(Component::Goe { coeff: 1.0 }).unwrap();
    let s = m.stats().unwrap();
    assert!((s.sigma2 - 5.0).abs() < 1e-5 && s.sigma_star2 == 2.0);
    assert!(m.sample(1).lambda_min().unwrap().is_finite());
}

#[test]
fn descriptor_files() {
    let dir = tempfile::tempdir().unwrap();
    let h = random_sym(3, 1);
    psdc::matcore::write_sym_csv(&h, dir.path().join("h.csv")).unwrap();
    let text = "\
# test model
dim = 3
field = real
shift = diag 1, 2, 3
component = goe 0.5
component = rank1 2 : 1, 0, 0
component = rank1 3 : 0, 1, 0
component = series file h.csv
theorem = iid
elmin = mc 100 4
";
    let desc = parse_descriptor::<f64>(text, dir.path()).unwrap();
    assert_eq!(desc.model.components().len(), 3);
    assert_eq!(desc.theorem, psdc::compare::Theorem::Iid);
    let m = random_sym(3, 9);
    let want = 0.5f64.powi(2) * 2.0 * m.frobenius_sq()
        + 2.0 * m.get(0, 0).re.powi(2)
        + 3.0 * m.get(1, 1).re.powi(2)
        + m.trace_inner(&h).unwrap().powi(2);
    assert!((desc.model.var_eval(&m).unwrap() - want).abs() < 1e-10);
    assert_eq!(desc.model.shift().diag(), vec![1.0, 2.0, 3.0]);

    for (bad, line) in [("dim = 2\ncomponent = goe x\n", 2), ("dim = 2\nbogus = 1\n", 2), ("field = real\n", 1)] {
        match parse_descriptor::<f64>(bad, dir.path()) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{bad}"),
            other => panic!("{bad}: {other:?}"),
        }
    }
    assert!(parse_descriptor::<f64>("dim = 2\nfield = complex\ncomponent = goe 1\n", dir.path()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weak_variance_sandwich(seed in any::<u64>(), d in 2usize..6, kind in 0usize..5, c in 0.1f64..3.0) {
        let comp = match kind {
            0 => Component::Goe { coeff: c },
            1 => Component::Scalar { coeff: c },
            2 => Component::Diagonal { coeff: c },
            3 => Component::RankOneSeries {
                weights: vec![c, 1.0],
                vectors: RectMatrix::random_orthonormal(d, 2, Field::Real, seed).unwrap(),
            },
            _ => Component::CompressedDiagonal { q: RectMatrix::identity_columns(d + 2, d, Field::Real).scaled(c) },
        };
        let s = one(d, Field::Real, comp).stats().unwrap();
        prop_assert!(s.sigma_star2_is_exact);
        prop_assert!(s.sigma_star2 <= s.sigma2 * (1.0 + 1e-12) + 1e-12);
        prop_assert!(s.sigma2 <= d as f64 * s.sigma_star2 * (1.0 + 1e-12) + 1e-12);
    }
}

#[test]
fn rank_one_series_weak_variance_matches_dense_form() {
    let mut r = StreamRng::new(31, 0);
    let (d, n) = (3, 6);
    let cols: Vec<Vec<f64>> = (0..n).map(|_| random_unit(d, &mut r)).collect();
    let weights: Vec<f64> = (0..n).map(|i| 0.2 + 0.3 * i as f64).collect();
    let vectors = RectMatrix::from_real_columns(&cols).unwrap();
    let rank_one = one(d, Field::Real, Component::RankOneSeries { weights: weights.clone(), vectors });
    let matrices = cols.iter().zip(&weights).map(|(u, w)| SymMatrix::outer(u).scaled(w.sqrt())).collect();
    let dense = one(d, Field::Real, Component::GeneralSeries { matrices });
    let a = rank_one.stats().unwrap().sigma_star2;
    let b = dense.stats().unwrap().sigma_star2;
    assert!((a - b).abs() < 1e-6 * b, "{a} vs {b}");
}
