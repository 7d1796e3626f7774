//! Resolvent, heat kernel and partition function of the point-interaction
//! Laplacian `L_γ` in three dimensions.
//!
//! Every kernel has a closed form built on the bracket
//!
//! ```text
//! F_u(t) = e^{-u²/2t}/√(2πt) + (γ/2)·e^{γ²t/2-γu}·erfc(u/√(2t) - γ√(t/2))
//! ```
//!
//! which is the inverse transform of `e^{-√(2λ)u}/(√(2λ)-γ)`, and a
//! quadrature route that inverts the transform numerically. The closed
//! forms are what the sampler uses; the quadrature route exists to check
//! them.

use crate::error::{Error, Result};
use crate::laplace::{invert_laplace_scaled, sqrt_2lambda, ContourSpec, ExpScaled};
use crate::quad::{Integral, Quadrature};
use crate::specfun::{erfc, erfcx, erfcx_pos, free_heat_kernel, free_heat_kernel_unchecked, SQRT_2PI};
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// A point of R³ stored as radius and unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialPoint {
    pub radius: f64,
    pub direction: [f64; 3],
}

const AXIS: [f64; 3] = [0.0, 0.0, 1.0];

impl SpatialPoint {
    /// Fails unless `radius ≥ 0` and `|direction| = 1` to 1e-12.
    pub fn new(radius: f64, direction: [f64; 3]) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::Domain("radius must be finite and non-negative"));
        }
        let norm = dot(&direction, &direction).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain("direction must be a unit vector"));
        }
        Ok(Self { radius, direction })
    }

    /// The point at `radius` on the positive third axis.
    pub fn on_axis(radius: f64) -> Self {
        Self { radius, direction: AXIS }
    }

    pub fn origin() -> Self {
        Self::on_axis(0.0)
    }

    /// The point at `radius` whose direction has polar cosine `cos_theta`
    /// and azimuth `phi` about the third axis.
    pub fn from_polar(radius: f64, cos_theta: f64, phi: f64) -> Self {
        let c = cos_theta.clamp(-1.0, 1.0);
        let s = (1.0 - c * c).max(0.0).sqrt();
        Self { radius, direction: [s * phi.cos(), s * phi.sin(), c] }
    }

    pub fn from_cartesian(v: [f64; 3]) -> Self {
        let r = dot(&v, &v).sqrt();
        if r == 0.0 {
            return Self::origin();
        }
        Self { radius: r, direction: [v[0] / r, v[1] / r, v[2] / r] }
    }

    pub fn cartesian(&self) -> [f64; 3] {
        let r = self.radius;
        [r * self.direction[0], r * self.direction[1], r * self.direction[2]]
    }

    pub fn is_origin(&self) -> bool {
        self.radius == 0.0
    }

    /// Cosine of the angle between the two directions.
    pub fn cos_angle(&self, other: &Self) -> f64 {
        dot(&self.direction, &other.direction).clamp(-1.0, 1.0)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let a = self.cartesian();
        let b = other.cartesian();
        let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
        dot(&d, &d).sqrt()
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// The reduced geometry `(r₁, r₂, |x-y|)` of a pair of points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry {
    pub r1: f64,
    pub r2: f64,
    pub d: f64,
}

impl PairGeometry {
    /// Fails unless `|r₁-r₂| ≤ d ≤ r₁+r₂` up to rounding.
    pub fn new(r1: f64, r2: f64, d: f64) -> Result<Self> {
        if !(r1 >= 0.0 && r2 >= 0.0 && d >= 0.0) || !(r1 + r2 + d).is_finite() {
            return Err(Error::Domain("lengths must be finite and non-negative"));
        }
        let slack = 1e-12 * (r1 + r2);
        if d < (r1 - r2).abs() - slack || d > r1 + r2 + slack {
            return Err(Error::Domain("lengths violate the triangle inequality"));
        }
        Ok(Self { r1, r2, d })
    }

    pub fn of(x: &SpatialPoint, y: &SpatialPoint) -> Self {
        Self { r1: x.radius, r2: y.radius, d: x.distance(y) }
    }

    /// `r₁ + r₂`, the length of the path through the origin.
    pub fn via_origin(&self) -> f64 {
        self.r1 + self.r2
    }
}

/// The coupling `γ` (inverse length) selecting the extension `L_γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub gamma: f64,
}

impl Coupling {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::Domain("coupling must be finite"));
        }
        Ok(Self { gamma })
    }
}

impl From<f64> for Coupling {
    fn from(gamma: f64) -> Self {
        Self { gamma }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
}

impl KernelValue {
    fn closed(value: f64) -> Self {
        Self { value, method: Method::ClosedForm, error_estimate: 0.0 }
    }
}

/// The bracket `F_u(t)`, i.e. the inverse transform of
/// `e^{-√(2λ)u}/(√(2λ)-γ)`.
///
/// With `z = u/√(2t) - γ√(t/2)` one has `z² = u²/2t - γu + γ²t/2`, so for
/// `z ≥ 0` the erfc product equals `e^{-u²/2t}·erfcx(z)` and nothing can
/// overflow. The result is positive whenever `γ ≤ 0`.
pub fn bracket(gamma: f64, t: f64, u: f64) -> f64 {
    bracket_shifted(gamma, t, u, 0.0)
}

/// `F_u(t)·e^{shift}`, with the shift folded into the exponents.
fn bracket_shifted(gamma: f64, t: f64, u: f64, shift: f64) -> f64 {
    let gauss = (shift - u * u / (2.0 * t)).exp();
    let lead = 1.0 / (2.0 * PI * t).sqrt();
    if gamma == 0.0 {
        return gauss * lead;
    }
    let z = u / (2.0 * t).sqrt() - gamma * (0.5 * t).sqrt();
    if z >= 0.0 {
        gauss * (lead + 0.5 * gamma * erfcx_pos(z))
    } else {
        gauss * lead + 0.5 * gamma * (shift + 0.5 * gamma * gamma * t - gamma * u).exp() * erfc(z)
    }
}

/// `∫₀^T F_0(s) ds = (erfcx(-γ√(T/2)) - 1)/γ`, with the `γ → 0` limit
/// `√(2T/π)`.
pub fn origin_bracket_integral(gamma: f64, horizon: f64) -> Result<f64> {
    let x = gamma * (0.5 * horizon).sqrt();
    if x.abs() < 0.5 {
        // (erfcx(-x) - 1)/x = Σ_{n≥1} x^{n-1}/Γ(n/2 + 1)
        let mut gamma_fn = [1.0, PI.sqrt()];
        let mut sum = 0.0;
        let mut power = 1.0;
        for n in 1..48 {
            let slot = n % 2;
            gamma_fn[slot] *= n as f64 / 2.0;
            sum += power / gamma_fn[slot];
            power *= x;
        }
        return Ok(sum * (0.5 * horizon).sqrt());
    }
    Ok((erfcx(-x)? - 1.0) / gamma)
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain("time must be positive and finite"));
    }
    Ok(())
}

fn finite(v: f64, what: &'static str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(what))
    }
}

/// Kernel of `(λ - L_γ)^{-1}`:
/// `e^{-√(2λ)d}/(2πd) + e^{-√(2λ)(r₁+r₂)}/((√(2λ)-γ)·2π r₁ r₂)`.
pub fn resolvent_kernel(lambda: Complex64, gamma: Coupling, x: &SpatialPoint, y: &SpatialPoint) -> Result<Complex64> {
    if x.is_origin() || y.is_origin() {
        return Err(Error::Domain("resolvent kernel is not defined at the origin"));
    }
    let g = PairGeometry::of(x, y);
    if g.d == 0.0 {
        return Err(Error::Coincidence);
    }
    let gamma = gamma.gamma;
    if (lambda.im == 0.0 && lambda.re <= 0.0) || (gamma > 0.0 && lambda == Complex64::new(0.5 * gamma * gamma, 0.0)) {
        return Err(Error::Spectrum);
    }
    let k = sqrt_2lambda(lambda);
    let free = (-k * g.d).exp() / (2.0 * PI * g.d);
    let point = (-k * g.via_origin()).exp() / ((k - gamma) * (2.0 * PI * (g.r1 * g.r2)));
    Ok(free + point)
}

/// Normalised ground state `ψ_γ(r) = √γ e^{-γr}/(√(2π) r)` of `L_γ`,
/// with eigenvalue `γ²/2`.
pub fn eigenfunction_psi(gamma: Coupling, r: f64) -> Result<f64> {
    let gamma = gamma.gamma;
    if !(gamma > 0.0) {
        return Err(Error::Domain("the ground state exists only for positive coupling"));
    }
    if !(r > 0.0) {
        return Err(Error::Domain("radius must be positive"));
    }
    Ok(gamma.sqrt() * (-gamma * r).exp() / (SQRT_2PI * r))
}

/// Contour for inverting `e^{-√(2λ)u}·G(λ)` at time `t`: the abscissa
/// sits at the saddle `u²/2t²` of `λt - √(2λ)u`, but at least `1/t` to
/// the right of every singularity.
pub fn saddle_contour(gamma: f64, t: f64, u: f64) -> ContourSpec {
    let mut a = (u * u / (2.0 * t * t)).max(1.0 / t);
    let mut singular = alloc::vec![Complex64::new(0.0, 0.0)];
    if gamma > 0.0 {
        let pole = 0.5 * gamma * gamma;
        a = a.max(pole + 1.0 / t);
        singular.push(Complex64::new(pole, 0.0));
    }
    ContourSpec::ray_pair(a).with_singularities(&singular)
}

/// Numerical inverse of `e^{-√(2λ)u}/(√(2λ)-γ)`, optionally divided by `λ`.
fn invert_bracket(gamma: f64, t: f64, u: f64, over_lambda: bool) -> Result<crate::laplace::QuadratureResult> {
    let spec = saddle_contour(gamma, t, u);
    invert_laplace_scaled(
        |lambda| {
            let k = sqrt_2lambda(lambda);
            let mut factor = (k - gamma).inv();
            if over_lambda {
                factor /= lambda;
            }
            ExpScaled { exponent: -k * u, factor }
        },
        t,
        &spec,
    )
}

/// Heat kernel `p̄_γ(t, x, y)` of `L_γ`.
pub fn heat_kernel(gamma: Coupling, t: f64, x: &SpatialPoint, y: &SpatialPoint, method: Method) -> Result<KernelValue> {
    heat_kernel_at(gamma, t, &PairGeometry::of(x, y), method)
}

/// [`heat_kernel`] on a reduced geometry.
///
/// The quadrature route inverts the free and the point-interaction parts
/// separately, each on its own saddle contour, and needs `d > 0`.
pub fn heat_kernel_at(gamma: Coupling, t: f64, g: &PairGeometry, method: Method) -> Result<KernelValue> {
    check_time(t)?;
    if !(g.r1 > 0.0 && g.r2 > 0.0) {
        return Err(Error::Domain("heat kernel needs both points off the origin"));
    }
    match method {
        Method::ClosedForm => {
            let v = free_heat_kernel_unchecked(t, g.d)
                + bracket(gamma.gamma, t, g.via_origin()) / (2.0 * PI * (g.r1 * g.r2));
            Ok(KernelValue::closed(finite(v, "heat kernel")?))
        }
        Method::Quadrature => {
            if g.d == 0.0 {
                return Err(Error::Coincidence);
            }
            let d = g.d;
            let free_spec = saddle_contour(0.0, t, d);
            let free = invert_laplace_scaled(
                |lambda| ExpScaled {
                    exponent: -sqrt_2lambda(lambda) * d,
                    factor: Complex64::new(1.0 / (2.0 * PI * d), 0.0),
                },
                t,
                &free_spec,
            )?;
            let point = invert_bracket(gamma.gamma, t, g.via_origin(), false)?;
            let scale = 1.0 / (2.0 * PI * (g.r1 * g.r2));
            Ok(KernelValue {
                value: free.value + point.value * scale,
                method,
                error_estimate: free.error_estimate + point.error_estimate * scale,
            })
        }
    }
}

/// `∫₀^t F_r(s) ds` by adaptive quadrature in `w = √s`.
pub fn bracket_time_integral(gamma: f64, t: f64, r: f64) -> Result<Integral> {
    check_time(t)?;
    let top = t.sqrt();
    let mut points = alloc::vec![0.0];
    for p in [0.25 * r, r, 4.0 * r] {
        if p > 0.0 && p < top {
            points.push(p);
        }
    }
    points.push(top);
    let q = Quadrature::new(0.0, 1e-13);
    let res = q.integrate_pieces(|w| if w == 0.0 { 0.0 } else { 2.0 * w * bracket(gamma, w * w, r) }, &points)?;
    finite(res.value, "bracket integral")?;
    Ok(res)
}

/// Partition function `Z̄_γ(t, r)`, the total mass of `p̄_γ(t, x, ·)` for
/// `|x| = r`.
pub fn partition_function(gamma: Coupling, t: f64, r: f64, method: Method) -> Result<KernelValue> {
    check_time(t)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain("partition function needs a positive radius"));
    }
    match method {
        Method::ClosedForm => {
            let i = bracket_time_integral(gamma.gamma, t, r)?;
            Ok(KernelValue { value: 1.0 + i.value / r, method, error_estimate: i.error / r })
        }
        Method::Quadrature => {
            // transform 1/λ + e^{-√(2λ)r}/(λ r (√(2λ)-γ)), one inversion per term
            let unit_spec = ContourSpec::ray_pair(1.0 / t).with_singularities(&[Complex64::new(0.0, 0.0)]);
            let unit = invert_laplace_scaled(|lambda| ExpScaled::plain(lambda.inv()), t, &unit_spec)?;
            let point = invert_bracket(gamma.gamma, t, r, true)?;
            Ok(KernelValue {
                value: unit.value + point.value / r,
                method,
                error_estimate: unit.error_estimate + point.error_estimate / r,
            })
        }
    }
}

/// Transition density of the bulk process,
/// `r(t,x,y) = p̄_1(t,x,y)·ψ_1(y)/ψ_1(x)·e^{-t/2}`.
pub fn transition_density(t: f64, x: &SpatialPoint, y: &SpatialPoint) -> Result<KernelValue> {
    check_time(t)?;
    if x.is_origin() || y.is_origin() {
        return Err(Error::Domain("transition density needs both points off the origin"));
    }
    let g = PairGeometry::of(x, y);
    // ψ_1(y)/ψ_1(x)·e^{-t/2} = (r₁/r₂)·e^{r₁-r₂-t/2}, merged into the exponents
    let shift = g.r1 - g.r2 - 0.5 * t;
    let free = (shift - g.d * g.d / (2.0 * t)).exp() / (2.0 * PI * t).powf(1.5);
    let point = bracket_shifted(1.0, t, g.via_origin(), shift) / (2.0 * PI * (g.r1 * g.r2));
    Ok(KernelValue::closed(finite((free + point) * (g.r1 / g.r2), "transition density")?))
}

/// Leading large-`t` terms `(e^{t/2}ψ_1(x)ψ_1(y), e^{t/2}‖ψ_1‖_{L¹}ψ_1(x))`
/// of `p̄_1(t,x,y)` and `Z̄_1(t,|x|)`.
pub fn asymptotic_leading(t: f64, x: &SpatialPoint, y: &SpatialPoint) -> Result<(f64, f64)> {
    check_time(t)?;
    let one = Coupling { gamma: 1.0 };
    let px = eigenfunction_psi(one, x.radius)?;
    let py = eigenfunction_psi(one, y.radius)?;
    let growth = (0.5 * t).exp();
    Ok((growth * px * py, growth * 2.0 * SQRT_2PI * px))
}

/// `lim_{|x|→0} p̄_γ(t,x,y)/Z̄_γ(T,x) = [F_{|y|}(t)/(2π|y|)] / ∫₀^T F_0`.
pub fn origin_ratio(gamma: Coupling, t: f64, horizon: f64, y: &SpatialPoint) -> Result<f64> {
    check_time(t)?;
    if !(horizon >= t) || !horizon.is_finite() {
        return Err(Error::Domain("horizon must not precede the time"));
    }
    if y.is_origin() {
        return Err(Error::Domain("origin ratio needs the target off the origin"));
    }
    let num = bracket(gamma.gamma, t, y.radius) / (2.0 * PI * y.radius);
    let den = origin_bracket_integral(gamma.gamma, horizon)?;
    finite(num / den, "origin ratio")
}

/// Relative residual of the forward equation `∂_t r = M* r` for the bulk
/// transition density, where
/// `M* f = ½Δf + ρ^{-2} ∂_ρ(ρ² (1 + 1/ρ) f)` acts on the target point.
///
/// The target runs over `radii × cosines`, the cosine being taken
/// against the direction of `x`. Derivatives are fourth-order central
/// differences. Returns `max|∂_t r - M* r| / max|∂_t r|`.
pub fn forward_equation_residual(t: f64, x: &SpatialPoint, radii: &[f64], cosines: &[f64]) -> Result<f64> {
    check_time(t)?;
    if x.is_origin() {
        return Err(Error::Domain("forward residual needs a start off the origin"));
    }
    let start = SpatialPoint::on_axis(x.radius);
    let r = |s: f64, rho: f64, c: f64| -> Result<f64> {
        Ok(transition_density(s, &start, &SpatialPoint::from_polar(rho, c, 0.0))?.value)
    };
    let d1 = |f: &dyn Fn(f64) -> Result<f64>, z: f64, h: f64| -> Result<f64> {
        Ok((-f(z + 2.0 * h)? + 8.0 * f(z + h)? - 8.0 * f(z - h)? + f(z - 2.0 * h)?) / (12.0 * h))
    };
    let d2 = |f: &dyn Fn(f64) -> Result<f64>, z: f64, h: f64| -> Result<f64> {
        Ok((-f(z + 2.0 * h)? + 16.0 * f(z + h)? - 30.0 * f(z)? + 16.0 * f(z - h)? - f(z - 2.0 * h)?) / (12.0 * h * h))
    };
    let ht = 1e-2 * t.min(1.0);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &rho in radii {
        if !(rho > 0.0) {
            return Err(Error::Domain("forward residual grid must avoid the origin"));
        }
        let hr = 1e-2 * rho.min(1.0);
        for &c in cosines {
            if !(c.abs() < 1.0) {
                return Err(Error::Domain("cosines must lie strictly inside (-1, 1)"));
            }
            let hc = 1e-2 * (1.0 - c.abs()).min(0.5);
            let dt = d1(&|s| r(s, rho, c), t, ht)?;
            let radial = d2(&|p| r(t, p, c), rho, hr)? + 2.0 / rho * d1(&|p| r(t, p, c), rho, hr)?;
            let angular = d1(&|z| Ok((1.0 - z * z) * d1(&|w| r(t, rho, w), z, hc)?), c, hc)? / (rho * rho);
            let drift = d1(&|p| Ok((p * p + p) * r(t, p, c)?), rho, hr)? / (rho * rho);
            let res = dt - (0.5 * (radial + angular) + drift);
            worst = worst.max(res.abs());
            scale = scale.max(dt.abs());
        }
    }
    if scale == 0.0 {
        return Err(Error::Domain("time derivative vanishes on the whole grid"));
    }
    Ok(worst / scale)
}

/// Free heat kernel between two points, checked.
pub fn free_kernel(t: f64, x: &SpatialPoint, y: &SpatialPoint) -> Result<f64> {
    free_heat_kernel(t, x.distance(y))
}
