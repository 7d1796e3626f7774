//! Endpoint laws: the compound-Gaussian density `q_κ` of the critical
//! regime with its mixing density `v_κ`, and the globular and bulk laws
//! of the attractive regime.
//!
//! With `δ = 1` for `κ > 0` and `0` otherwise,
//!
//! ```text
//! D(κ)    = 2√2 ∫₀^∞ (1 - e^{-σ²})/(σ² + κ²/2) dσ + δ·4π(e^{κ²/2} - 1)/κ
//! v_κ(τ)  = [2∫₀^∞ √(2σ) e^{-σ(1-τ)}/(2σ + κ²) dσ + δ·2πκ e^{κ²(1-τ)/2}] / D(κ)
//! q_κ(y)  = ∫₀¹ (2πτ)^{-3/2} e^{-|y|²/2τ} v_κ(τ) dτ
//! ```
//!
//! For `κ > 0` numerator and `D` both carry `e^{κ²/2}`; it is divided out
//! of both before anything is exponentiated.

use crate::error::{Error, Result};
use crate::kernels::SpatialPoint;
use crate::quad::{gauss_legendre, Quadrature};
use crate::specfun::{erfc, SQRT_2PI};
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};
#[allow(unused_imports)]
use num_traits::Float;

/// The limit `κ` of `γ(T)√T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaParam {
    pub kappa: f64,
}

impl KappaParam {
    pub fn new(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::Domain("kappa must be finite"));
        }
        Ok(Self { kappa })
    }
}

impl From<f64> for KappaParam {
    fn from(kappa: f64) -> Self {
        Self { kappa }
    }
}

fn quadrature() -> Quadrature {
    Quadrature::new(0.0, 1e-13).with_max_segments(4000)
}

/// `e^{-κ²/2}` for `κ > 0`, else 1.
fn scale(kappa: f64) -> f64 {
    if kappa > 0.0 {
        (-0.5 * kappa * kappa).exp()
    } else {
        1.0
    }
}

/// `D(κ)·scale(κ)`.
fn normalization_scaled(kappa: f64) -> Result<f64> {
    let c2 = 0.5 * kappa * kappa;
    let body = quadrature()
        .integrate_to_infinity(
            |s| {
                let s2 = s * s;
                if s2 + c2 == 0.0 {
                    1.0
                } else {
                    -(-s2).exp_m1() / (s2 + c2)
                }
            },
            0.0,
        )?
        .value;
    let mut d = 2.0 * SQRT_2 * body * scale(kappa);
    if kappa > 0.0 {
        d += 4.0 * PI * -(-c2).exp_m1() / kappa;
    }
    Ok(d)
}

/// The real normaliser `D(κ) > 0` of the mixing density.
pub fn normalization_d(kappa: KappaParam) -> Result<f64> {
    let k = kappa.kappa;
    let d = normalization_scaled(k)? / scale(k);
    if !d.is_finite() {
        return Err(Error::Overflow("normalization D"));
    }
    Ok(d)
}

/// Numerator of `v_κ` at `b = 1 - τ`, times `scale(κ)`. The σ-integral is
/// taken in `σ = w²/b`, which leaves `x² e^{-x²}/(2x² + κ² b)`.
fn numerator_scaled(kappa: f64, b: f64) -> Result<f64> {
    let e = kappa * kappa * b;
    let knee = (0.5 * e).sqrt();
    let mut points = alloc::vec![0.0];
    if knee > 0.0 && knee < 9.0 {
        points.push(knee);
    }
    points.push(9.0);
    let body = quadrature()
        .integrate_pieces(
            |x| {
                let x2 = x * x;
                if x2 + e == 0.0 {
                    0.5
                } else {
                    x2 * (-x2).exp() / (2.0 * x2 + e)
                }
            },
            &points,
        )?
        .value;
    let mut n = 4.0 * SQRT_2 * body / b.sqrt() * scale(kappa);
    if kappa > 0.0 {
        // e^{κ²b/2}·e^{-κ²/2} = e^{-κ²τ/2}
        n += 2.0 * PI * kappa * (-0.5 * kappa * kappa * (1.0 - b)).exp();
    }
    Ok(n)
}

fn mixing_at_complement(kappa: f64, b: f64, d_scaled: f64) -> Result<f64> {
    Ok(numerator_scaled(kappa, b)? / d_scaled)
}

/// Mixing density `v_κ(τ)` for `0 < τ < 1`.
pub fn mixing_density_v(kappa: KappaParam, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Domain("mixing density is defined on (0, 1)"));
    }
    let k = kappa.kappa;
    mixing_at_complement(k, 1.0 - tau, normalization_scaled(k)?)
}

/// `(2πτ)^{-3/2} e^{-ρ²/2τ}`.
fn gaussian(rho: f64, tau: f64) -> f64 {
    (-rho * rho / (2.0 * tau)).exp() / (2.0 * PI * tau).powf(1.5)
}

/// Compound-Gaussian endpoint density `q_κ(y)` by adaptive quadrature:
/// directly in `τ` on `(0, 1/2]`, where the Gaussian peaks near
/// `τ = |y|²/3`, and in `τ = 1 - w²` on `[1/2, 1)`, where `v_κ` may blow up.
pub fn endpoint_density_q(kappa: KappaParam, y: &SpatialPoint) -> Result<f64> {
    if y.is_origin() {
        return Err(Error::Domain("endpoint density is evaluated off the origin"));
    }
    let k = kappa.kappa;
    let rho = y.radius;
    let d_scaled = normalization_scaled(k)?;
    let mut failure = None;
    let mut eval = |b: f64| -> f64 {
        if failure.is_some() {
            return 0.0;
        }
        match mixing_at_complement(k, b, d_scaled) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    let peak = rho * rho / 3.0;
    let mut points = alloc::vec![0.0];
    for p in [peak / 8.0, peak, 4.0 * peak] {
        if p < 0.5 {
            points.push(p);
        }
    }
    points.push(0.5);
    let q = quadrature();
    let early = q.integrate_pieces(|t| if t == 0.0 { 0.0 } else { gaussian(rho, t) * eval(1.0 - t) }, &points)?;
    let late = q.integrate(
        |w| if w == 0.0 { 0.0 } else { 2.0 * w * gaussian(rho, (1.0 - w) * (1.0 + w)) * eval(w * w) },
        0.0,
        0.5f64.sqrt(),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(early.value + late.value)
}

/// CDF of `|Z|` for a standard Gaussian `Z` in R³ (the chi law with three
/// degrees of freedom).
pub fn maxwell_cdf(x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    let erf = 1.0 - erfc(x / SQRT_2);
    (erf - (2.0 / PI).sqrt() * x * (-0.5 * x * x).exp()).clamp(0.0, 1.0)
}

/// `v_κ` tabulated on a composite Gauss–Legendre rule in `w = √(1-τ)`,
/// graded towards `τ = 0`, for fast evaluation of `q_κ` and of the CDF of
/// `|Y|`.
#[derive(Debug, Clone)]
pub struct MixingDensity {
    pub kappa: KappaParam,
    /// Mixing times `τ_i`, decreasing.
    pub tau: Vec<f64>,
    /// `v_κ(τ_i)`.
    pub values: Vec<f64>,
    /// Weights with `Σ weights_i·g(τ_i) ≈ ∫₀¹ g(τ) v_κ(τ) dτ`.
    pub weights: Vec<f64>,
    /// `|Σ weights_i - 1|`.
    pub normalization_residual: f64,
}

const PANEL_NODES: usize = 16;
const PANELS: usize = 40;

impl MixingDensity {
    pub fn new(kappa: KappaParam) -> Result<Self> {
        let k = kappa.kappa;
        let d_scaled = normalization_scaled(k)?;
        let (x, w) = gauss_legendre(PANEL_NODES);
        // w-panels [0, 1/2], [1/2, 3/4], ... so that τ ≈ 2(1 - w) halves
        let mut edges = alloc::vec![0.0];
        for j in 1..PANELS {
            edges.push(1.0 - 0.5f64.powi(j as i32));
        }
        edges.push(1.0);
        let mut tau = Vec::with_capacity(PANELS * PANEL_NODES);
        let mut values = Vec::with_capacity(PANELS * PANEL_NODES);
        let mut weights = Vec::with_capacity(PANELS * PANEL_NODES);
        for p in edges.windows(2) {
            let (lo, hi) = (p[0], p[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (xi, wi) in x.iter().zip(&w) {
                let s = mid + half * xi;
                let b = s * s;
                // 1 - w² evaluated as (1 - w)(1 + w) to keep τ accurate near 0
                let t = (1.0 - s) * (1.0 + s);
                let v = mixing_at_complement(k, b, d_scaled)?;
                tau.push(t);
                values.push(v);
                weights.push(wi * half * 2.0 * s * v);
            }
        }
        let mass: f64 = weights.iter().sum();
        Ok(Self { kappa, tau, values, weights, normalization_residual: (mass - 1.0).abs() })
    }

    /// Tabulated `q_κ` at radius `rho > 0`.
    pub fn density(&self, rho: f64) -> f64 {
        self.tau.iter().zip(&self.weights).map(|(&t, &w)| w * gaussian(rho, t)).sum()
    }

    /// Density of `|Y|` at `rho`.
    pub fn radial_density(&self, rho: f64) -> f64 {
        4.0 * PI * rho * rho * self.density(rho)
    }

    /// `P(|Y| ≤ rho)`.
    pub fn radial_cdf(&self, rho: f64) -> f64 {
        if !(rho > 0.0) {
            return 0.0;
        }
        let c: f64 = self.tau.iter().zip(&self.weights).map(|(&t, &w)| w * maxwell_cdf(rho / t.sqrt())).sum();
        c.clamp(0.0, 1.0)
    }
}

/// Globular endpoint density `ψ_1(y)/‖ψ_1‖_{L¹} = e^{-|y|}/(4π|y|)`.
pub fn globular_endpoint_density(y: &SpatialPoint) -> Result<f64> {
    if y.is_origin() {
        return Err(Error::Domain("globular density is evaluated off the origin"));
    }
    let r = y.radius;
    Ok((-r).exp() / (2.0 * SQRT_2PI * SQRT_2PI * r))
}

/// Radial law of the globular endpoint, `ρ e^{-ρ}`.
pub fn globular_radial_density(rho: f64) -> f64 {
    if rho <= 0.0 {
        0.0
    } else {
        rho * (-rho).exp()
    }
}

pub fn globular_radial_cdf(rho: f64) -> f64 {
    if rho <= 0.0 {
        0.0
    } else {
        // 1 - (1 + ρ)e^{-ρ}, kept accurate for small ρ
        -(-rho).exp_m1() - rho * (-rho).exp()
    }
}

/// Radial law `2e^{-2ρ}` of the stationary density `ψ_1²`.
pub fn stationary_radial_cdf(rho: f64) -> f64 {
    if rho <= 0.0 {
        0.0
    } else {
        -(-2.0 * rho).exp_m1()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{origin_ratio, Coupling};
    use crate::specfun::erfcx;

    fn k(v: f64) -> KappaParam {
        KappaParam { kappa: v }
    }

    fn d_closed(kappa: f64) -> f64 {
        if kappa == 0.0 {
            return 2.0 * SQRT_2PI;
        }
        2.0 * PI * (erfcx(-kappa / SQRT_2).unwrap() - 1.0) / kappa
    }

    #[test]
    fn normalization_values() {
        assert!((normalization_d(k(0.0)).unwrap() - 2.0 * SQRT_2PI).abs() < 1e-10);
        // high-precision quadrature of the defining integral
        assert!((normalization_d(k(1.0)).unwrap() - 11.148167459967265726).abs() < 1e-12);
        assert!((normalization_d(k(-1.0)).unwrap() - 2.9960955469314330398).abs() < 1e-12);
        assert!((normalization_d(k(2.5)).unwrap() - 111.18002787698523537).abs() < 1e-10);
        for &kappa in &[-30.0, -5.0, -0.3, 0.01, 0.7, 4.0, 12.0] {
            let d = normalization_d(k(kappa)).unwrap();
            assert!(d > 0.0);
            assert!((d / d_closed(kappa) - 1.0).abs() < 1e-11, "{kappa}: {d} vs {}", d_closed(kappa));
        }
    }

    #[test]
    fn mixing_values() {
        assert!((mixing_density_v(k(0.0), 0.75).unwrap() - 1.0).abs() < 1e-12);
        assert!((mixing_density_v(k(1.0), 0.5).unwrap() - 0.86816323010403963771).abs() < 1e-12);
        assert!((mixing_density_v(k(-2.0), 0.3).unwrap() - 0.28492673466034100457).abs() < 1e-12);
        assert!((mixing_density_v(k(3.0), 0.9).unwrap() - 0.08658343443143441878).abs() < 1e-12);
        assert!(mixing_density_v(k(0.0), 1.0).is_err());
        assert!(mixing_density_v(k(0.0), 0.0).is_err());
    }

    #[test]
    fn mixing_matches_erfcx_form() {
        // ∫₀^∞ w² e^{-bw²}/(w² + c²) dw = √π/(2√b) - (πc/2) erfcx(c√b)
        for &kappa in &[-2.0, -0.5, 0.5, 1.5] {
            for &tau in &[0.05, 0.4, 0.95] {
                let b = 1.0 - tau;
                let c = kappa.abs() / SQRT_2;
                let integral = PI.sqrt() / (2.0 * b.sqrt()) - 0.5 * PI * c * erfcx(c * b.sqrt()).unwrap();
                let mut num = 2.0 * SQRT_2 * integral;
                if kappa > 0.0 {
                    num += 2.0 * PI * kappa * (0.5 * kappa * kappa * b).exp();
                }
                let exact = num / d_closed(kappa);
                let v = mixing_density_v(k(kappa), tau).unwrap();
                assert!((v - exact).abs() < 1e-10 * exact, "{kappa} {tau}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn mixing_zero_kappa_closed_form() {
        for i in 1..100 {
            let tau = i as f64 / 100.0;
            let v = mixing_density_v(k(0.0), tau).unwrap();
            assert!((v - 0.5 / (1.0 - tau).sqrt()).abs() < 1e-8);
        }
    }

    fn integral_of_v(kappa: f64) -> f64 {
        let d = normalization_scaled(kappa).unwrap();
        quadrature()
            .integrate(
                |w| if w == 0.0 { 0.0 } else { 2.0 * w * mixing_at_complement(kappa, w * w, d).unwrap() },
                0.0,
                1.0,
            )
            .unwrap()
            .value
    }

    #[test]
    fn mixing_normalised_and_positive() {
        for &kappa in &[-5.0, -2.0, -1.0, 0.0, 1.0, 2.0, 5.0] {
            let mass = integral_of_v(kappa);
            assert!((mass - 1.0).abs() < 1e-6, "{kappa}: {mass}");
            for i in 0..100 {
                let tau = (i as f64 + 0.5) / 100.0;
                assert!(mixing_density_v(k(kappa), tau).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn tail_mass_vanishes_at_one() {
        // u(τ) = ∫_τ¹ v, u(0) = 1, decreasing to u(1) = 0
        let kappa = 1.3;
        let d = normalization_scaled(kappa).unwrap();
        let u = |tau: f64| {
            quadrature()
                .integrate(
                    |w| if w == 0.0 { 0.0 } else { 2.0 * w * mixing_at_complement(kappa, w * w, d).unwrap() },
                    0.0,
                    (1.0 - tau).sqrt(),
                )
                .unwrap()
                .value
        };
        assert!((u(0.0) - 1.0).abs() < 1e-10);
        let mut last = 1.0 + 1e-12;
        for i in 1..=20 {
            let v = u(i as f64 / 20.0);
            assert!(v < last);
            last = v;
        }
        assert_eq!(u(1.0), 0.0);
    }

    #[test]
    fn endpoint_density_values() {
        let cases =
            [(0.0, 1.0, 0.048266176315010298), (-1.0, 0.3, 0.18463404845601768), (2.0, 2.0, 0.0022416615309873085)];
        for &(kappa, rho, exact) in &cases {
            let q = endpoint_density_q(k(kappa), &SpatialPoint::on_axis(rho)).unwrap();
            assert!((q - exact).abs() < 1e-10 * exact, "{kappa} {rho}: {q} vs {exact}");
        }
    }

    #[test]
    fn endpoint_density_is_origin_limit() {
        for &kappa in &[-1.0, 0.0, 2.0] {
            for &rho in &[0.3, 1.0, 2.0] {
                let y = SpatialPoint::on_axis(rho);
                let q = endpoint_density_q(k(kappa), &y).unwrap();
                let o = origin_ratio(Coupling::from(kappa), 1.0, 1.0, &y).unwrap();
                assert!((q - o).abs() <= 1e-6 * o, "{kappa} {rho}: {q} vs {o}");
            }
        }
    }

    #[test]
    fn endpoint_density_mass_and_shape() {
        let q = Quadrature::new(0.0, 1e-10);
        let mass = q
            .integrate_to_infinity(
                |r| {
                    if r == 0.0 {
                        0.0
                    } else {
                        4.0 * PI * r * r * endpoint_density_q(k(0.0), &SpatialPoint::on_axis(r)).unwrap()
                    }
                },
                0.0,
            )
            .unwrap()
            .value;
        assert!((mass - 1.0).abs() < 1e-6, "{mass}");
        let mut last = f64::INFINITY;
        for i in 1..30 {
            let v = endpoint_density_q(k(0.5), &SpatialPoint::on_axis(0.1 * i as f64)).unwrap();
            assert!(v < last);
            last = v;
        }
        // towards the standard Gaussian as κ → -∞; ratios from a 30-digit oracle
        let gauss = (2.0 * PI).powf(-1.5) * (-0.5f64).exp();
        let mut last = f64::INFINITY;
        for &(kappa, ratio) in &[(-20.0, 1.0365312920001192), (-50.0, 1.0154140986277897), (-100.0, 1.0078426755860165)]
        {
            let r = endpoint_density_q(k(kappa), &SpatialPoint::on_axis(1.0)).unwrap() / gauss;
            assert!((r - ratio).abs() < 1e-9, "{kappa}: {r} vs {ratio}");
            assert!(r - 1.0 < last);
            last = r - 1.0;
        }
        assert!(last < 0.01);
    }

    #[test]
    fn endpoint_density_continuous_in_kappa() {
        let y = SpatialPoint::on_axis(0.8);
        let base = endpoint_density_q(k(0.4), &y).unwrap();
        let g1 = (endpoint_density_q(k(0.41), &y).unwrap() - base).abs();
        let g2 = (endpoint_density_q(k(0.401), &y).unwrap() - base).abs();
        assert!(g2 < g1 && g1 < 1e-2 * base);
    }

    #[test]
    fn tabulated_law_matches_adaptive() {
        for &kappa in &[-1.0, 0.0, 2.0] {
            let m = MixingDensity::new(k(kappa)).unwrap();
            assert!(m.normalization_residual < 1e-10, "{}", m.normalization_residual);
            for &rho in &[0.05, 0.3, 1.0, 2.5] {
                let exact = endpoint_density_q(k(kappa), &SpatialPoint::on_axis(rho)).unwrap();
                assert!((m.density(rho) / exact - 1.0).abs() < 1e-8, "{kappa} {rho}");
            }
            let q = Quadrature::new(0.0, 1e-12);
            for &rho in &[0.2, 0.7, 1.5] {
                let direct = q.integrate(|r| m.radial_density(r), 0.0, rho).unwrap().value;
                assert!((direct - m.radial_cdf(rho)).abs() < 1e-9);
            }
            assert!((m.radial_cdf(12.0) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn maxwell_law() {
        let q = Quadrature::new(0.0, 1e-13);
        let density = |x: f64| (2.0 / PI).sqrt() * x * x * (-0.5 * x * x).exp();
        for &x in &[0.1, 1.0, 2.3, 5.0] {
            let direct = q.integrate(density, 0.0, x).unwrap().value;
            assert!((direct - maxwell_cdf(x)).abs() < 1e-14);
        }
        assert_eq!(maxwell_cdf(0.0), 0.0);
    }

    #[test]
    fn globular_law() {
        assert!((globular_radial_density(1.0) - (-1.0f64).exp()).abs() < 1e-16);
        let q = Quadrature::new(0.0, 1e-13);
        let mass = q
            .integrate_to_infinity(
                |r| {
                    if r == 0.0 {
                        0.0
                    } else {
                        4.0 * PI * r * r * globular_endpoint_density(&SpatialPoint::on_axis(r)).unwrap()
                    }
                },
                0.0,
            )
            .unwrap()
            .value;
        assert!((mass - 1.0).abs() < 1e-12);
        // mode of ρe^{-ρ} at 1
        let h = 1e-4;
        assert!(globular_radial_density(1.0) > globular_radial_density(1.0 - h));
        assert!(globular_radial_density(1.0) > globular_radial_density(1.0 + h));
        let psi = crate::kernels::eigenfunction_psi(Coupling::from(1.0), 0.7).unwrap();
        let g = globular_endpoint_density(&SpatialPoint::on_axis(0.7)).unwrap();
        assert!((g - psi / (2.0 * SQRT_2PI)).abs() < 1e-16);
        for &r in &[1e-6, 0.5, 3.0] {
            let c = q.integrate(globular_radial_density, 0.0, r).unwrap().value;
            assert!((c - globular_radial_cdf(r)).abs() < 1e-14);
        }
        assert!(globular_endpoint_density(&SpatialPoint::origin()).is_err());
    }
}
