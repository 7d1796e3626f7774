//! Closed-form kernels against contour quadrature and spatial integrals.

use proptest::prelude::*;
use std::f64::consts::PI;
use zerorange_core::kernels::{
    eigenfunction_psi, heat_kernel, heat_kernel_at, partition_function, transition_density, Coupling, Method,
    PairGeometry, SpatialPoint,
};
use zerorange_core::quad::Quadrature;

fn g(v: f64) -> Coupling {
    Coupling::from(v)
}

fn closed(gamma: f64, t: f64, x: &SpatialPoint, y: &SpatialPoint) -> f64 {
    heat_kernel(g(gamma), t, x, y, Method::ClosedForm).unwrap().value
}

#[test]
fn closed_form_within_quadrature_error_on_grid() {
    let mut worst: f64 = 0.0;
    for &gamma in &[-2.0, -0.5, 0.0, 0.5, 2.0] {
        for &t in &[0.1, 1.0, 10.0] {
            for &r1 in &[0.1f64, 1.0, 5.0] {
                for &r2 in &[0.1f64, 1.0, 5.0] {
                    for d in [(r1 - r2).abs() + 0.01, (r1 + r2) * 0.99] {
                        let geo = PairGeometry::new(r1, r2, d).unwrap();
                        let c = heat_kernel_at(g(gamma), t, &geo, Method::ClosedForm).unwrap().value;
                        let q = heat_kernel_at(g(gamma), t, &geo, Method::Quadrature).unwrap();
                        assert!((c - q.value).abs() <= q.error_estimate, "{gamma} {t} {geo:?}: {c:e} vs {q:?}");
                        worst = worst.max((c - q.value).abs() / c);
                    }
                }
            }
        }
    }
    assert!(worst <= 1e-8);
}

#[test]
fn kernel_positive_including_strong_repulsion() {
    for &gamma in &[-5.0, -1.0, 0.0, 1.0, 3.0] {
        for &t in &[1e-3, 0.1, 1.0, 10.0, 100.0] {
            for &r1 in &[1e-3f64, 0.1, 1.0, 5.0] {
                for &r2 in &[1e-3f64, 0.5, 5.0] {
                    for d in [(r1 - r2).abs(), 0.5 * ((r1 - r2).abs() + r1 + r2), r1 + r2] {
                        let geo = PairGeometry::new(r1, r2, d).unwrap();
                        let v = heat_kernel_at(g(gamma), t, &geo, Method::ClosedForm).unwrap().value;
                        let underflow = d * d / (2.0 * t) > 700.0;
                        assert!(v > 0.0 || (underflow && v >= 0.0), "{gamma} {t} {geo:?}: {v}");
                    }
                }
            }
        }
    }
}

fn spatial_mass(gamma: f64, t: f64, r: f64) -> f64 {
    let x = SpatialPoint::on_axis(r);
    let q = Quadrature::new(0.0, 1e-11).with_max_segments(4000);
    q.integrate_axisymmetric(
        |rho, c| closed(gamma, t, &x, &SpatialPoint::from_polar(rho, c, 0.0)),
        &[0.0, r, r + 10.0 * t.sqrt()],
    )
    .unwrap()
    .value
}

#[test]
fn partition_function_three_ways() {
    for &gamma in &[-1.0, 0.0, 1.0] {
        for &t in &[0.5, 2.0] {
            for &r in &[0.5, 2.0] {
                let c = partition_function(g(gamma), t, r, Method::ClosedForm).unwrap().value;
                let q = partition_function(g(gamma), t, r, Method::Quadrature).unwrap().value;
                let s = spatial_mass(gamma, t, r);
                assert!((c - q).abs() <= 1e-6 * c, "{gamma} {t} {r}: {c} vs {q}");
                assert!((c - s).abs() <= 1e-6 * c, "{gamma} {t} {r}: {c} vs {s}");
            }
        }
    }
}

fn chapman_kolmogorov_gap(gamma: f64, s: f64, t: f64) -> f64 {
    let x = SpatialPoint::on_axis(1.0);
    let y = SpatialPoint::from_polar(0.8, -1.0, 0.0);
    let q = Quadrature::new(0.0, 1e-10).with_max_segments(4000);
    let conv = q
        .integrate_axisymmetric(
            |rho, c| {
                let z = SpatialPoint::from_polar(rho, c, 0.0);
                closed(gamma, s, &x, &z) * closed(gamma, t, &z, &y)
            },
            &[0.0, 0.8, 1.0, 8.0],
        )
        .unwrap()
        .value;
    let direct = closed(gamma, s + t, &x, &y);
    (conv - direct).abs() / direct
}

#[test]
fn chapman_kolmogorov() {
    for &(gamma, s, t) in &[(-1.0, 0.5, 0.5), (0.0, 0.5, 1.0), (1.0, 0.3, 0.7)] {
        let gap = chapman_kolmogorov_gap(gamma, s, t);
        assert!(gap <= 1e-4, "{gamma} {s} {t}: {gap:e}");
    }
}

#[test]
fn transition_density_normalised_and_stationary() {
    let q = Quadrature::new(0.0, 1e-11).with_max_segments(4000);
    let x = SpatialPoint::on_axis(1.0);
    let mass = q
        .integrate_axisymmetric(
            |rho, c| transition_density(1.0, &x, &SpatialPoint::from_polar(rho, c, 0.0)).unwrap().value,
            &[0.0, 1.0, 12.0],
        )
        .unwrap()
        .value;
    assert!((mass - 1.0).abs() <= 1e-6, "{mass}");

    let one = g(1.0);
    let y = SpatialPoint::on_axis(1.0);
    let pushed = q
        .integrate_axisymmetric(
            |rho, c| {
                let x = SpatialPoint::from_polar(rho, c, 0.0);
                let p = eigenfunction_psi(one, rho).unwrap();
                p * p * transition_density(0.5, &x, &y).unwrap().value
            },
            &[0.0, 1.0, 12.0],
        )
        .unwrap()
        .value;
    let target = eigenfunction_psi(one, 1.0).unwrap().powi(2);
    assert!((pushed - target).abs() <= 1e-5 * target, "{pushed} vs {target}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heat_kernel_self_similar(gamma in -3.0f64..3.0, t in 0.05f64..5.0, r1 in 0.05f64..4.0, r2 in 0.05f64..4.0,
                                s in 0.0f64..1.0, a in 0.25f64..9.0) {
        let d = (r1 - r2).abs() + s * (r1 + r2 - (r1 - r2).abs());
        let geo = PairGeometry::new(r1, r2, d).unwrap();
        let k = a.sqrt();
        let big = PairGeometry { r1: k * r1, r2: k * r2, d: k * d };
        let lhs = heat_kernel_at(g(gamma), a * t, &big, Method::ClosedForm).unwrap().value;
        let rhs = heat_kernel_at(g(gamma * k), t, &geo, Method::ClosedForm).unwrap().value / a.powf(1.5);
        prop_assume!(rhs > 1e-280);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn partition_function_self_similar_and_positive(gamma in -3.0f64..3.0, t in 0.05f64..4.0, r in 0.05f64..4.0, a in 0.25f64..4.0) {
        let k = a.sqrt();
        let lhs = partition_function(g(gamma), a * t, k * r, Method::ClosedForm).unwrap().value;
        let rhs = partition_function(g(gamma * k), t, r, Method::ClosedForm).unwrap().value;
        prop_assert!(lhs > 0.0);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * rhs, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn heat_kernel_symmetric(gamma in -3.0f64..3.0, t in 0.05f64..5.0, r1 in 0.05f64..4.0, r2 in 0.05f64..4.0,
                             c1 in -1.0f64..1.0, c2 in -1.0f64..1.0, phi in 0.0f64..std::f64::consts::TAU) {
        let x = SpatialPoint::from_polar(r1, c1, 0.0);
        let y = SpatialPoint::from_polar(r2, c2, phi);
        prop_assert_eq!(closed(gamma, t, &x, &y), closed(gamma, t, &y, &x));
    }

    #[test]
    fn closed_form_matches_quadrature(gamma in -3.0f64..3.0, t in 0.05f64..5.0, r1 in 0.05f64..4.0, r2 in 0.05f64..4.0, s in 0.01f64..1.0) {
        let d = (r1 - r2).abs() + s * (r1 + r2 - (r1 - r2).abs());
        let geo = PairGeometry::new(r1, r2, d).unwrap();
        let c = heat_kernel_at(g(gamma), t, &geo, Method::ClosedForm).unwrap().value;
        let q = heat_kernel_at(g(gamma), t, &geo, Method::Quadrature).unwrap();
        prop_assert!((c - q.value).abs() <= 1e-9 * c, "{} vs {:?}", c, q);
    }
}

#[test]
fn unit_sphere_is_pi_four() {
    // sanity for the integration helper used above
    let q = Quadrature::new(0.0, 1e-12);
    let v = q.integrate_axisymmetric(|rho, _| if rho <= 1.0 { 1.0 } else { 0.0 }, &[0.0, 1.0]).unwrap().value;
    assert!((v - 4.0 * PI / 3.0).abs() < 1e-10);
}
