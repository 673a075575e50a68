use std::f64::consts::PI;
use std::io::Write;

use fracspec::analysis::{
    compactness_report, diamagnetic_check, fractional_apply, interpolation_norm, lp_interpolation_check,
    tail_mass_check, truncation_modulus,
};
use fracspec::extension::FracOrder;
use fracspec::operators::{
    build_backend, magnetic_spectrum, synthesize, BackendSpec, GroundFunction, MagneticGrid,
};
use fracspec::reference::sqrtm_denman_beavers;
use fracspec::specfun::erfc;
use fracspec::suite::energy_backends;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

// mpmath erfc(2)
const ERFC_2: f64 = 0.004677734981047265837930743632747071389108;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normals(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(r)).collect()
}

fn interval(modes: usize) -> fracspec::operators::Spectrum {
    build_backend(&BackendSpec::interval_analytic(PI, modes)).unwrap()
}

#[test]
fn interpolation_norm_examples() {
    let sp = interval(2);
    let f = synthesize(&[1.0, 1.0], &sp).unwrap();
    assert!((interpolation_norm(&sp, 0.5, &f).unwrap() - 3f64.sqrt()).abs() < 1e-14);
    assert!((interpolation_norm(&sp, 0.0, &f).unwrap() - sp.l2_norm(&f.values)).abs() < 1e-13);
    assert!(interpolation_norm(&sp, -0.1, &f).is_err());
    assert!(interpolation_norm(&sp, 2.01, &f).is_err());
}

#[test]
fn interpolation_norm_lower_bound() {
    let mut r = rng(1);
    for spec in energy_backends() {
        let sp = build_backend(&spec).unwrap();
        let lam1 = sp.eigenvalues()[0];
        for _ in 0..100 {
            let f = synthesize(&normals(&mut r, 10), &sp).unwrap();
            let sigma: f64 = r.random_range(0.0..2.0);
            let lhs = interpolation_norm(&sp, sigma, &f).unwrap().powi(2);
            let y = sp.l2_norm(&f.values).powi(2);
            assert!(lhs >= lam1.powf(sigma) * y * (1.0 - 1e-12), "{:?}", spec.kind);
        }
    }
}

#[test]
fn fractional_apply_composes() {
    let sp = interval(20);
    let f = synthesize(&normals(&mut rng(2), 20), &sp).unwrap();
    for (s, t) in [(0.2, 0.3), (0.45, 0.5), (0.1, 0.85)] {
        let a = FracOrder::new(s).unwrap();
        let b = FracOrder::new(t).unwrap();
        let ab = FracOrder::new(s + t).unwrap();
        let twice = fractional_apply(&sp, &b, &fractional_apply(&sp, &a, &f).unwrap()).unwrap();
        let once = fractional_apply(&sp, &ab, &f).unwrap();
        let scale = once.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (x, y) in twice.values.iter().zip(&once.values) {
            assert!((x - y).abs() < 1e-10 * scale.max(1.0));
        }
    }
}

#[test]
fn fractional_apply_is_linear() {
    let sp = build_backend(&BackendSpec::box2d_fd(1.0, 8)).unwrap();
    let mut r = rng(3);
    let a = normals(&mut r, 12);
    let b = normals(&mut r, 12);
    let combo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.5 * x - y).collect();
    let o = FracOrder::new(0.4).unwrap();
    let apply = |c: &[f64]| fractional_apply(&sp, &o, &synthesize(c, &sp).unwrap()).unwrap().values;
    let (fa, fb, fc) = (apply(&a), apply(&b), apply(&combo));
    let scale = fc.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..fc.len() {
        assert!((fc[i] - 2.5 * fa[i] + fb[i]).abs() < 1e-11 * scale);
    }
}

#[test]
fn square_root_matches_denman_beavers() {
    let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, -0.7, 0.5, -0.7, 2.0]);
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "%%MatrixMarket matrix coordinate real symmetric").unwrap();
    writeln!(file, "3 3 6").unwrap();
    for i in 0..3 {
        for j in 0..=i {
            writeln!(file, "{} {} {}", i + 1, j + 1, m[(i, j)]).unwrap();
        }
    }
    file.flush().unwrap();
    let sp = build_backend(&BackendSpec::matrix_file(file.path())).unwrap();
    let root = sqrtm_denman_beavers(&m).unwrap();
    assert!((&root * &root - &m).amax() < 1e-12);
    let half = FracOrder::new(0.5).unwrap();
    for f in [[1.0, 0.0, 0.0], [0.3, -1.2, 2.0], [1.0, 1.0, 1.0]] {
        let got = fractional_apply(&sp, &half, &synthesize_from_values(&sp, &f)).unwrap();
        let want = &root * DVector::from_row_slice(&f);
        for i in 0..3 {
            assert!((got.values[i] - want[i]).abs() < 1e-8);
        }
    }
}

fn synthesize_from_values(sp: &fracspec::operators::Spectrum, v: &[f64]) -> GroundFunction {
    fracspec::operators::project(&GroundFunction::from_values(v.to_vec()), sp).unwrap()
}

#[test]
fn truncation_examples() {
    let sp = interval(3);
    assert_eq!(sp.eigenvalues().len(), 3);
    let half = FracOrder::new(0.5).unwrap();
    let e = truncation_modulus(&sp, &half, 2, 0).unwrap();
    assert!((e.modulus - 0.5773502691896258).abs() < 1e-12);
    assert!((e.bound - 0.5773502691896258).abs() < 1e-12);
    let first = truncation_modulus(&sp, &half, 0, 0).unwrap();
    assert!((first.modulus - 1.0).abs() < 1e-15);
    assert!(truncation_modulus(&sp, &half, 3, 0).is_err());
}

#[test]
fn truncation_law_on_interval() {
    let sp = interval(30);
    for s in [0.25, 0.5, 0.75] {
        let o = FracOrder::new(s).unwrap();
        let rep = compactness_report(&sp, &o, 11).unwrap();
        assert_eq!(rep.entries.len(), 30);
        assert!(rep.is_non_increasing());
        assert!(rep.witness_defect() < 1e-12);
        assert!(rep.monte_carlo_excess() <= 1e-12);
        for e in &rep.entries {
            let law = ((e.rank + 1) as f64).powf(-s);
            assert!((e.modulus - law).abs() < 1e-12, "s={s} rank={}", e.rank);
            assert!(e.monte_carlo_max > 0.0);
        }
        let m = rep.moduli();
        assert!(m.windows(2).all(|w| w[1] < w[0]));
        assert!((m[29] - 30f64.powf(-s)).abs() < 1e-12);
    }
}

#[test]
fn truncation_is_seed_deterministic() {
    let sp = interval(10);
    let o = FracOrder::new(0.3).unwrap();
    let a = truncation_modulus(&sp, &o, 4, 9).unwrap();
    let b = truncation_modulus(&sp, &o, 4, 9).unwrap();
    assert_eq!(a, b);
}

#[test]
fn embedding_bound_every_backend() {
    let mut r = rng(4);
    for spec in energy_backends() {
        let sp = build_backend(&spec).unwrap();
        let lam1 = sp.eigenvalues()[0];
        for s in [0.1, 0.5, 0.9] {
            for _ in 0..20 {
                let f = synthesize(&normals(&mut r, 10), &sp).unwrap();
                let norm = interpolation_norm(&sp, s, &f).unwrap();
                assert!(sp.l2_norm(&f.values) <= lam1.powf(-s / 2.0) * norm * (1.0 + 1e-12));
            }
        }
    }
    let sp = magnetic_spectrum(&BackendSpec::magnetic_fd(3.0, 8, 0.3)).unwrap();
    let lam1 = sp.eigenvalues()[0];
    for _ in 0..20 {
        let raw = normals(&mut r, 20);
        let c: Vec<Complex64> = raw.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
        let f = synthesize(&c, &sp).unwrap();
        let norm = interpolation_norm(&sp, 0.5, &f).unwrap();
        assert!(sp.l2_norm(&f.values) <= lam1.powf(-0.25) * norm * (1.0 + 1e-12));
    }
}

#[test]
fn ground_state_tail() {
    // 2 sits midway between grid nodes so the tail sum is a midpoint rule
    let sp = build_backend(&BackendSpec::oscillator_fd(12.0, 2405).with_modes(4)).unwrap();
    let f = synthesize(&[1.0], &sp).unwrap();
    let tm = tail_mass_check(&sp, &f, 2.0).unwrap();
    assert!((tm.tail - ERFC_2).abs() < 1e-3 * ERFC_2, "tail={}", tm.tail);
    assert!((erfc(2.0) - ERFC_2).abs() < 1e-15);
    assert!((tm.bound - 0.25).abs() < 1e-4);
    assert!(tm.holds());

    let sp = build_backend(&BackendSpec::oscillator_analytic(30)).unwrap();
    let f = synthesize(&[1.0], &sp).unwrap();
    let tm = tail_mass_check(&sp, &f, 2.0).unwrap();
    assert!((tm.energy - 1.0).abs() < 1e-12);
    assert!((tm.bound - 0.25).abs() < 1e-12);
    assert!(tm.holds());
}

#[test]
fn tail_vanishes_at_domain_edge() {
    let sp = build_backend(&BackendSpec::oscillator_fd(10.0, 800)).unwrap();
    let f = synthesize(&normals(&mut rng(5), 5), &sp).unwrap();
    let tm = tail_mass_check(&sp, &f, sp.extent()).unwrap();
    assert_eq!(tm.tail, 0.0);
    let near = tail_mass_check(&sp, &f, 0.99 * sp.extent()).unwrap();
    assert!(near.tail < 1e-30);
    assert!(tail_mass_check(&sp, &f, 1.01 * sp.extent()).is_err());
    assert!(tail_mass_check(&sp, &f, 0.0).is_err());
}

#[test]
fn tail_needs_oscillator() {
    let sp = interval(5);
    let f = synthesize(&[1.0], &sp).unwrap();
    assert!(tail_mass_check(&sp, &f, 1.0).is_err());
}

#[test]
fn tail_random_combinations() {
    let mut r = rng(6);
    for spec in [BackendSpec::oscillator_analytic(40), BackendSpec::oscillator_fd(12.0, 1000).with_modes(10)] {
        let sp = build_backend(&spec).unwrap();
        for i in 0..100 {
            let f = synthesize(&normals(&mut r, 10), &sp).unwrap();
            let radius = [1.0, 1.5, 2.0, 3.0][i % 4];
            let tm = tail_mass_check(&sp, &f, radius).unwrap();
            assert!(tm.holds(), "{:?} R={radius} {tm:?}", spec.kind);
        }
    }
}

#[test]
fn holder_equality_cases() {
    let sp = build_backend(&BackendSpec::interval_fd(1.0, 40)).unwrap();
    let ones = GroundFunction::from_values(vec![1.0; 40]);
    for q in [3.0, 4.0, 10.0] {
        let c = lp_interpolation_check(&ones, q, &sp).unwrap();
        assert!((c.lhs - c.rhs).abs() < 1e-12 * c.rhs);
        assert!(c.holds(1e-12));
    }
    let f = synthesize(&normals(&mut rng(7), 5), &sp).unwrap();
    let c = lp_interpolation_check(&f, 2.0, &sp).unwrap();
    assert_eq!(c.t, 0.0);
    assert!((c.lhs - c.rhs).abs() < 1e-14 * c.rhs);
    assert!((c.lhs - sp.l2_norm(&f.values)).abs() < 1e-12);
    assert!(lp_interpolation_check(&f, 1.5, &sp).is_err());
    assert!(lp_interpolation_check(&f, f64::INFINITY, &sp).is_err());
}

#[test]
fn holder_random_samples() {
    let mut r = rng(8);
    let specs = [
        BackendSpec::oscillator_fd(12.0, 600),
        BackendSpec::box2d_fd(1.0, 12),
        BackendSpec::grushin_fd(2.0, 12, 1.0),
    ];
    for spec in specs {
        let sp = build_backend(&spec).unwrap();
        let p = sp.critical_exponent();
        for i in 0..100 {
            let f = synthesize(&normals(&mut r, 10), &sp).unwrap();
            let q = if p.is_finite() { 2.0 + (p - 2.0) * (i as f64 + 0.5) / 100.0 } else { [3.0, 4.0, 6.0][i % 3] };
            let c = lp_interpolation_check(&f, q, &sp).unwrap();
            assert!(c.holds(1e-12), "{:?} q={q} {c:?}", spec.kind);
        }
    }
}

#[test]
fn diamagnetic_examples() {
    let grid = MagneticGrid::landau(5, 6.0, 0.0);
    let u: Vec<Complex64> = (0..25).map(|i| Complex64::new(1.0 + i as f64 * 0.1, 0.0)).collect();
    let d = diamagnetic_check(&grid, &u).unwrap();
    assert!((d.q0 - d.qa).abs() < 1e-12);

    let grid = MagneticGrid::landau(5, 6.0, 0.7);
    let mut u = vec![Complex64::new(0.0, 0.0); 25];
    let node = 12;
    u[node] = Complex64::new(0.6, -0.8);
    let d = diamagnetic_check(&grid, &u).unwrap();
    assert!((d.qa - grid.degree(node) as f64).abs() < 1e-14);
    assert!((d.q0 - grid.degree(node) as f64).abs() < 1e-14);

    assert!(diamagnetic_check(&grid, &u[..24]).is_err());
}

#[test]
fn diamagnetic_random_samples() {
    let mut r = rng(9);
    for _ in 0..1000 {
        let flux: f64 = r.random_range(-PI..PI);
        let grid = MagneticGrid::landau(6, 7.0, flux);
        let u: Vec<Complex64> = (0..36)
            .map(|_| Complex64::new(StandardNormal.sample(&mut r), StandardNormal.sample(&mut r)))
            .collect();
        let d = diamagnetic_check(&grid, &u).unwrap();
        assert!(d.holds(1e-12), "{d:?}");
    }
}
