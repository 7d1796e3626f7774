use zerorange_core::kernels::{Coupling, SpatialPoint};
use zerorange_core::sampler::*;

// Exact values from a Talbot inversion of the resolvent of the
// radial problem at 30 digits.
const SHALLOW: f64 = 1.223_687_338_032_628_3; // ε=0.5, γ=−1, T=1, |x|=0.75
const GUIDED_SHORT: f64 = 2.907_898_467_593_881_8; // ε=0.1, γ=1, T=0.5, |x|=0.3
const GUIDED_LONG: f64 = 5.584_595_320_840_322_5; // ε=0.1, γ=1, T=4, |x|=1

fn maxwell_cdf(x: f64) -> f64 {
    libm::erf(x / 2f64.sqrt()) - (2.0 / core::f64::consts::PI).sqrt() * x * (-0.5 * x * x).exp()
}

fn ks(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn empty_well_leaves_brownian_motion() {
    let pot = SmoothedPotential::new(0.2, Coupling::from(1.0)).unwrap().without_well();
    let horizon = 2.0;
    let fk = sample_feynman_kac(&pot, horizon, &SpatialPoint::origin(), 100_000, 0.01, RngStream::new(1, 0)).unwrap();
    assert!(fk.log_weights.iter().all(|&l| l == 0.0));
    assert_eq!(fk.partition_estimate().0, 1.0);
    let radii = fk.endpoints.iter().map(|p| p.radius / horizon.sqrt()).collect();
    let d = ks(radii, maxwell_cdf);
    assert!(d <= 0.02, "KS {d}");
}

#[test]
fn plain_weights_match_the_exact_partition_function() {
    let pot = SmoothedPotential::new(0.5, Coupling::from(-1.0)).unwrap();
    let fk = sample_feynman_kac(&pot, 1.0, &SpatialPoint::on_axis(0.75), 100_000, 0.25 / 64.0, RngStream::new(1, 0))
        .unwrap();
    let (z, se) = fk.partition_estimate();
    assert!((z - SHALLOW).abs() <= 4.0 * se, "{z} ± {se}");
}

#[test]
fn halving_the_step_is_consistent() {
    let pot = SmoothedPotential::new(0.5, Coupling::from(-1.0)).unwrap();
    let start = SpatialPoint::on_axis(0.75);
    let coarse = sample_feynman_kac(&pot, 1.0, &start, 100_000, 0.25 / 32.0, RngStream::new(1, 1)).unwrap();
    let fine = sample_feynman_kac(&pot, 1.0, &start, 100_000, 0.25 / 64.0, RngStream::new(1, 2)).unwrap();
    let (a, sa) = coarse.partition_estimate();
    let (b, sb) = fine.partition_estimate();
    assert!((a - b).abs() <= 4.0 * (sa * sa + sb * sb).sqrt(), "{a} vs {b}");
}

#[test]
fn oversized_steps_are_refused() {
    let pot = SmoothedPotential::new(0.1, Coupling::from(1.0)).unwrap();
    let err = sample_feynman_kac(&pot, 1.0, &SpatialPoint::on_axis(1.0), 10, 0.01, RngStream::new(1, 0));
    assert!(err.is_err());
}

#[test]
fn guided_weights_match_the_exact_partition_function() {
    let pot = SmoothedPotential::new(0.1, Coupling::from(1.0)).unwrap();
    for (horizon, r0, exact) in [(0.5, 0.3, GUIDED_SHORT), (4.0, 1.0, GUIDED_LONG)] {
        let fk = sample_feynman_kac_guided(
            &pot,
            horizon,
            &SpatialPoint::on_axis(r0),
            20_000,
            0.01 / 16.0,
            RngStream::new(1, 0),
        )
        .unwrap();
        let (z, se) = fk.partition_estimate();
        assert!((z - exact).abs() <= 4.0 * se, "T={horizon}: {z} ± {se}");
    }
}

#[test]
fn guided_needs_a_bound_state() {
    let pot = SmoothedPotential::new(0.1, Coupling::from(-1.0)).unwrap();
    assert!(sample_feynman_kac_guided(&pot, 1.0, &SpatialPoint::on_axis(1.0), 10, 1e-4, RngStream::new(1, 0)).is_err());
}
