use approx::assert_relative_eq;
use dampedwig::quadrature::{integrate_2d, Tolerance};
use dampedwig::{
    evolve, noise_form, propagator, propagator_between, thermal_state, DerivedParams, Gaussian2D,
    ModelParams,
};
use nalgebra::{Matrix2, SymmetricEigen, Vector2};
use proptest::prelude::*;

fn thermal(dd: f64, b: f64) -> DerivedParams {
    ModelParams::thermal_dimensionless(dd, b).derive().unwrap()
}

fn rel(a: &Matrix2<f64>, b: &Matrix2<f64>) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

#[test]
fn zero_time_kernel_is_delta() {
    let p = propagator(&thermal(5.0, 0.05), 0.0).unwrap();
    assert!(p.is_delta());
    assert_eq!(p.flow.canonical(), Matrix2::identity());
    assert!(p.transition_density(0.0, 0.0, 0.0, 0.0).is_err());
    let q = noise_form(&thermal(5.0, 0.05), 0.0).unwrap();
    assert_eq!(q.q, Matrix2::zeros());
}

#[test]
fn kernel_mass_by_quadrature() {
    let cases = [
        (thermal(5.0, 0.05), 1.0),
        (thermal(5.0, 0.05), 10.0),
        (thermal(10.0, 0.1), 7.0),
        (thermal(1000.0, 0.02), 3.0),
    ];
    for (d, t) in cases {
        let p = propagator(&d, t).unwrap();
        let (x0, y0) = (0.4, -1.1);
        let k = p.kernel_from(x0, y0);
        let sx = k.cov[(0, 0)].sqrt();
        let sy = k.cov[(1, 1)].sqrt();
        let q = integrate_2d(
            |x, y| p.transition_density(x0, y0, x, y).unwrap(),
            (k.mean.x - 12.0 * sx, k.mean.x + 12.0 * sx),
            (k.mean.y - 12.0 * sy, k.mean.y + 12.0 * sy),
            Tolerance::absolute(1e-13),
        )
        .unwrap();
        assert!((q.value - 1.0).abs() < 1e-12, "t={t}: mass {}", q.value);
    }
}

#[test]
fn chapman_kolmogorov_algebraic() {
    let d = thermal(5.0, 0.05);
    for &(s, u, t) in &[(0.0, 1.0, 3.0), (2.0, 2.5, 40.0), (0.0, 30.0, 100.0)] {
        let joined = propagator_between(&d, s, u)
            .unwrap()
            .then(&propagator_between(&d, u, t).unwrap());
        let direct = propagator_between(&d, s, t).unwrap();
        assert!(rel(&joined.covariance, &direct.covariance) < 1e-12);
        assert!(rel(&joined.flow.canonical(), &direct.flow.canonical()) < 1e-12);
    }
}

#[test]
fn chapman_kolmogorov_by_integration() {
    let d = thermal(5.0, 0.1);
    let (s, u, t) = (0.5, 1.7, 3.0);
    let first = propagator_between(&d, s, u).unwrap();
    let second = propagator_between(&d, u, t).unwrap();
    let direct = propagator_between(&d, s, t).unwrap();
    let (x0, y0) = (0.8, 0.2);
    let mid = first.kernel_from(x0, y0);
    let (sx, sy) = (mid.cov[(0, 0)].sqrt(), mid.cov[(1, 1)].sqrt());
    for &(x, y) in &[(0.5, 0.5), (-1.0, 2.0), (2.0, -0.3)] {
        let q = integrate_2d(
            |zx, zy| second.transition_density(zx, zy, x, y).unwrap() * mid.density(zx, zy),
            (mid.mean.x - 12.0 * sx, mid.mean.x + 12.0 * sx),
            (mid.mean.y - 12.0 * sy, mid.mean.y + 12.0 * sy),
            Tolerance::new(1e-14, 1e-11),
        )
        .unwrap();
        let expect = direct.transition_density(x0, y0, x, y).unwrap();
        assert_relative_eq!(q.value, expect, max_relative = 1e-9);
    }
}

#[test]
fn covariance_semidefinite_on_dense_grid() {
    for d in [thermal(5.0, 0.05), thermal(1000.0, 0.02), thermal(2.0, 1.9)] {
        for i in 0..1000 {
            let t = 1e-4 * 1.012f64.powi(i);
            let p = propagator(&d, t).unwrap();
            let eig = SymmetricEigen::new(p.covariance).eigenvalues;
            let scale = eig.abs().max();
            assert!(eig.min() >= -1e-14 * scale, "t={t}: {eig}");
            let q = noise_form(&d, t).unwrap().q;
            let eq = SymmetricEigen::new(q).eigenvalues;
            assert!(eq.min() >= -1e-14 * eq.abs().max());
        }
    }
}

#[test]
fn thermal_limit_of_propagator() {
    let d = thermal(5.0, 0.05);
    for &(bt, tol) in &[(10.0, 1e-3), (30.0, 1e-10)] {
        let t = bt / d.model.beta;
        let evolved = evolve(&Gaussian2D::ground_state(), &d, t).unwrap();
        let target = thermal_state(&d, t).unwrap();
        assert!(rel(&evolved.cov, &target.cov) < tol, "bt={bt}");
        assert!(evolved.physical_mean(&d).norm() < 1e-12);
        let phys = evolved.physical_cov(&d);
        assert!((phys[(0, 0)] - 2.5).abs() < 2.5 * tol && (phys[(1, 1)] - 2.5).abs() < 2.5 * tol);
    }
}

#[test]
fn friction_to_zero_is_continuous() {
    let base = ModelParams::dimensionless(5.0, 0.0, 0.25);
    let at0 = propagator(&base.derive().unwrap(), 7.0).unwrap();
    let mut last = f64::INFINITY;
    for &b in &[1e-3, 1e-4, 1e-5, 1e-6] {
        let p = propagator(&base.with_beta(b).derive().unwrap(), 7.0).unwrap();
        let gap = rel(&p.covariance, &at0.covariance);
        assert!(gap < last);
        last = gap;
    }
    assert!(last < 1e-5);
}

#[test]
fn displaced_mean_decays_with_half_rate() {
    let d = thermal(5.0, 0.05);
    let start = Gaussian2D::coherent(0.0, 2.0);
    for k in 1..=20 {
        let tau = 2.0 * std::f64::consts::PI * k as f64 / d.frequency_ratio();
        let m = evolve(&start, &d, d.time_from_tau(tau))
            .unwrap()
            .physical_mean(&d);
        assert_relative_eq!(m.y, 2.0 * (-0.025 * tau).exp(), max_relative = 1e-12);
    }
}

fn arb_state() -> impl Strategy<Value = Gaussian2D> {
    (
        -3.0f64..3.0,
        -3.0f64..3.0,
        0.01f64..3.0,
        0.01f64..3.0,
        -0.95f64..0.95,
        0.1f64..5.0,
    )
        .prop_map(|(x, y, a, c, r, m)| {
            let off = r * (a * c).sqrt();
            Gaussian2D::new(Vector2::new(x, y), Matrix2::new(a, off, off, c), 0.0)
                .unwrap()
                .with_mass(m)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_keeps_mass_and_definiteness(state in arb_state(), b in 0.0f64..1.0, dd in 0.0f64..50.0, t in 0.0f64..60.0) {
        let d = thermal(dd, b);
        let out = evolve(&state, &d, t).unwrap();
        prop_assert_eq!(out.log_mass, state.log_mass);
        prop_assert!(out.cov.determinant() >= 0.0);
        prop_assert!(out.cov[(0, 0)] >= 0.0 && out.cov[(1, 1)] >= 0.0);
        prop_assert!((out.epoch - d.tau(t)).abs() < 1e-12 * (1.0 + d.tau(t)));
    }

    #[test]
    fn evolution_composes(state in arb_state(), b in 0.0f64..1.0, t1 in 0.0f64..20.0, t2 in 0.0f64..20.0) {
        let d = thermal(5.0, b);
        let two = evolve(&evolve(&state, &d, t1).unwrap(), &d, t2).unwrap();
        let one = evolve(&state, &d, t1 + t2).unwrap();
        prop_assert!(rel(&two.cov, &one.cov) < 1e-10);
        prop_assert!((two.mean - one.mean).norm() <= 1e-10 * (1.0 + one.mean.norm()));
    }
}
