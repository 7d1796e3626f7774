//! Numerical inversion of Laplace transforms along a Bromwich contour.
//!
//! The default contour is the pair of rays leaving the abscissa `a` at
//! angles `±3π/4`, i.e. forming `π/4` with the ray `[a, -∞)`. Along it
//! `exp(λ t)` decays exponentially, so the contour integral converges
//! absolutely. Each ray is parametrised by `s = exp(x - exp(-x))`, which
//! turns the half-line into the whole real line with doubly exponential
//! decay at both ends; the trapezoidal rule in `x` then converges
//! geometrically and is refined by halving the step.
//!
//! The vertical line `Re λ = a` is kept for cross-checks. There the
//! integrand only oscillates, so it is integrated half-period by
//! half-period and the partial sums are accelerated with Wynn's epsilon
//! algorithm.
//!
//! Square roots use the principal branch (`Re sqrt ≥ 0`, cut on the
//! negative real axis), so `exp(-sqrt(2λ) r)` decays for every `λ` on
//! either contour.

use crate::error::{Error, Result};
use crate::quad::Quadrature;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Geometry of the integration contour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourShape {
    /// The line `Re λ = a`.
    Vertical,
    /// Two rays from `a` at angles `±3π/4`.
    RayPair,
}

/// Integration contour plus the singularities it must keep to its left.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourSpec {
    pub abscissa: f64,
    pub shape: ContourShape,
    /// Largest distance from the abscissa that is integrated. Infinite
    /// means the ray is cut once the integrand has decayed below `e^-42`
    /// of its peak along the ray.
    pub truncation: f64,
    /// Trapezoidal nodes per ray on the coarsest level (ray pair), or
    /// the minimum number of half periods summed (vertical).
    pub nodes: usize,
    pub singularities: Vec<Complex64>,
}

impl ContourSpec {
    pub fn ray_pair(abscissa: f64) -> Self {
        Self { abscissa, shape: ContourShape::RayPair, truncation: f64::INFINITY, nodes: 32, singularities: Vec::new() }
    }

    pub fn vertical(abscissa: f64) -> Self {
        Self {
            abscissa,
            shape: ContourShape::Vertical,
            truncation: f64::INFINITY,
            nodes: 16,
            singularities: Vec::new(),
        }
    }

    pub fn with_singularities(mut self, singularities: &[Complex64]) -> Self {
        self.singularities = singularities.to_vec();
        self
    }

    pub fn with_truncation(mut self, radius: f64) -> Self {
        self.truncation = radius;
        self
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    /// Checks the invariants: finite abscissa, at least 16 nodes, positive
    /// truncation, and every declared singularity strictly to the left.
    pub fn validate(&self) -> Result<()> {
        if !self.abscissa.is_finite() {
            return Err(Error::Config("contour abscissa must be finite"));
        }
        if self.nodes < 16 {
            return Err(Error::Config("contour needs at least 16 nodes"));
        }
        if !(self.truncation > 0.0) {
            return Err(Error::Config("truncation radius must be positive"));
        }
        let a = self.abscissa;
        for c in &self.singularities {
            let scale = 1.0 + c.norm() + a.abs();
            let on_or_right = match self.shape {
                ContourShape::Vertical => {
                    if (c.re - a).abs() <= 1e-12 * scale {
                        return Err(Error::PoleOnContour);
                    }
                    c.re > a
                }
                ContourShape::RayPair => {
                    // signed horizontal offset from the ray with the same imaginary part
                    let offset = c.re - (a - c.im.abs());
                    if offset.abs() <= 1e-12 * scale {
                        return Err(Error::PoleOnContour);
                    }
                    offset > 0.0
                }
            };
            if on_or_right {
                return Err(Error::Domain("singularity to the right of the contour"));
            }
        }
        Ok(())
    }
}

/// Transform value in the form `factor * exp(exponent)`, so that large
/// exponents can be combined with `λ t` before exponentiation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpScaled {
    pub exponent: Complex64,
    pub factor: Complex64,
}

impl ExpScaled {
    pub fn plain(value: Complex64) -> Self {
        Self { exponent: Complex64::new(0.0, 0.0), factor: value }
    }
}

/// Result of a contour quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute difference between the two finest refinement levels,
    /// floored at the round-off level of the sum.
    pub error_estimate: f64,
    pub nodes_used: usize,
    /// Imaginary part of the computed integral.
    pub imaginary: f64,
}

/// `sqrt(2 λ)` on the principal branch.
#[inline]
pub fn sqrt_2lambda(lambda: Complex64) -> Complex64 {
    (lambda * 2.0).sqrt()
}

const REL_TOL: f64 = 1e-13;
const MAX_LEVELS: usize = 10;
const X_LOW: f64 = -4.5;

/// `(1/2πi) ∫_Γ e^{λt} F(λ) dλ` for a plain transform.
pub fn invert_laplace<F>(f: F, t: f64, contour: &ContourSpec) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Complex64,
{
    invert_laplace_scaled(|z| ExpScaled::plain(f(z)), t, contour)
}

/// As [`invert_laplace`], with the transform in exponent/factor form.
pub fn invert_laplace_scaled<F>(f: F, t: f64, contour: &ContourSpec) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> ExpScaled,
{
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain("inversion time must be positive"));
    }
    contour.validate()?;
    let result = match contour.shape {
        ContourShape::RayPair => ray_pair(&f, t, contour)?,
        ContourShape::Vertical => vertical(&f, t, contour)?,
    };
    if result.imaginary.abs() > result.error_estimate.max(1e-12 * result.value.abs()) {
        return Err(Error::Domain("inverse transform is not real: transform lacks conjugate symmetry"));
    }
    Ok(result)
}

#[inline]
fn integrand<F: Fn(Complex64) -> ExpScaled>(f: &F, lambda: Complex64, t: f64) -> Complex64 {
    integrand_with_exponent(f, lambda, t).0
}

/// Integrand value and the modulus of its total exponent; `exp(z)`
/// inherits a relative round-off of order `ε|z|` from the argument.
#[inline]
fn integrand_with_exponent<F: Fn(Complex64) -> ExpScaled>(f: &F, lambda: Complex64, t: f64) -> (Complex64, f64) {
    let v = f(lambda);
    if v.factor == Complex64::new(0.0, 0.0) {
        return (v.factor, 0.0);
    }
    let z = v.exponent + lambda * t;
    (v.factor * z.exp(), z.norm())
}

/// Solves `x - exp(-x) = ln r` for the ray parameter map.
fn ray_parameter_for(radius: f64) -> f64 {
    let target = radius.ln();
    let mut x = target.max(X_LOW + 1.0);
    for _ in 0..60 {
        let e = (-x).exp();
        let step = (x - e - target) / (1.0 + e);
        x -= step;
        if step.abs() < 1e-14 {
            break;
        }
    }
    x
}

/// Distance along the rays beyond which `|s e^{λt} F(λ)|` stays below
/// `e^-42` of its largest value.
fn decay_radius<F: Fn(Complex64) -> ExpScaled>(f: &F, a: f64, t: f64, up: Complex64) -> f64 {
    let log_magnitude = |s: f64| -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for dir in [up, up.conj()] {
            let lambda = Complex64::new(a, 0.0) + dir * s;
            let v = f(lambda);
            let m = v.factor.norm();
            if m > 0.0 {
                worst = worst.max(m.ln() + (v.exponent + lambda * t).re + s.ln());
            }
        }
        worst
    };
    let mut s = 1e-6 * (a.abs() + 1.0 / t);
    let mut peak = f64::NEG_INFINITY;
    for _ in 0..4000 {
        let l = log_magnitude(s);
        if l.is_nan() {
            break;
        }
        peak = peak.max(l);
        if l < peak - 42.0 && s * t > 1.0 {
            return s;
        }
        s *= 1.25;
    }
    s
}

fn ray_pair<F: Fn(Complex64) -> ExpScaled>(f: &F, t: f64, spec: &ContourSpec) -> Result<QuadratureResult> {
    let a = spec.abscissa;
    let up = Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    let down = up.conj();
    let radius = if spec.truncation.is_finite() { spec.truncation } else { decay_radius(f, a, t, up) };
    let x_high = ray_parameter_for(radius);
    let width = x_high - X_LOW;

    // contribution of one parameter node: both rays, with the Jacobian
    let node = |x: f64| -> (Complex64, f64) {
        let e = (-x).exp();
        let s = (x - e).exp();
        let jac = s * (1.0 + e);
        let (v_up, z_up) = integrand_with_exponent(f, Complex64::new(a, 0.0) + up * s, t);
        let (v_down, z_down) = integrand_with_exponent(f, Complex64::new(a, 0.0) + down * s, t);
        let g = (v_up * up - v_down * down) * jac;
        let weight = (v_up.norm() * (1.0 + z_up) + v_down.norm() * (1.0 + z_down)) * jac;
        (g, weight)
    };

    let mut n = spec.nodes;
    let mut h = width / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for j in 0..=n {
        let (g, m) = node(X_LOW + j as f64 * h);
        let w = if j == 0 || j == n { 0.5 } else { 1.0 };
        sum += g * w;
        magnitude += m * w;
    }
    let scale = 1.0 / (2.0 * PI);
    let to_value = |s: Complex64, h: f64| -> Complex64 {
        // (1/2πi) * s * h
        Complex64::new(s.im, -s.re) * (h * scale)
    };
    let mut current = to_value(sum, h);
    let mut diffs: Vec<f64> = Vec::new();
    for _level in 0..MAX_LEVELS {
        let mut added = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let (g, m) = node(X_LOW + (j as f64 + 0.5) * h);
            added += g;
            magnitude += m;
        }
        sum += added;
        n *= 2;
        h *= 0.5;
        let next = to_value(sum, h);
        if !next.re.is_finite() || !next.im.is_finite() {
            return Err(Error::NonConvergence { estimate: next.re, error: f64::INFINITY });
        }
        let diff = (next - current).norm();
        current = next;
        diffs.push(diff);
        let floor = 16.0 * f64::EPSILON * magnitude * h * scale;
        let tol = (REL_TOL * current.norm()).max(floor);
        if diffs.len() >= 2 && diff <= tol {
            return Ok(QuadratureResult {
                value: current.re,
                error_estimate: diff.max(floor),
                nodes_used: 2 * (n + 1),
                imaginary: current.im,
            });
        }
    }
    let k = diffs.len();
    let (last, prev) = (diffs[k - 1], diffs[k - 2]);
    if last > 0.5 * prev {
        return Err(Error::NonConvergence { estimate: current.re, error: last });
    }
    let floor = 16.0 * f64::EPSILON * magnitude * h * scale;
    Ok(QuadratureResult {
        value: current.re,
        error_estimate: last.max(floor),
        nodes_used: 2 * (n + 1),
        imaginary: current.im,
    })
}

/// Wynn's epsilon algorithm; returns the last two even-column estimates.
fn wynn_epsilon(partial: &[f64]) -> (f64, f64) {
    let n = partial.len();
    let mut prev: Vec<f64> = alloc::vec![0.0; n + 1];
    let mut cur: Vec<f64> = partial.to_vec();
    let mut best = (partial[n - 1], if n > 1 { partial[n - 2] } else { partial[n - 1] });
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            let base = if col == 0 { 0.0 } else { prev[i + 1] };
            if d == 0.0 {
                next.push(f64::INFINITY);
            } else {
                next.push(base + 1.0 / d);
            }
        }
        col += 1;
        prev = cur;
        cur = next;
        if col % 2 == 0 && cur.len() >= 2 && cur.iter().all(|v| v.is_finite()) {
            let m = cur.len();
            best = (cur[m - 1], cur[m - 2]);
        }
    }
    best
}

fn vertical<F: Fn(Complex64) -> ExpScaled>(f: &F, t: f64, spec: &ContourSpec) -> Result<QuadratureResult> {
    let a = spec.abscissa;
    let half_period = PI / t;
    let max_pieces = if spec.truncation.is_finite() {
        ((spec.truncation / half_period).ceil() as usize).max(spec.nodes)
    } else {
        4000
    };
    let quad = Quadrature::new(0.0, 1e-14).with_max_segments(200);
    let g = |y: f64| -> f64 {
        let lp = Complex64::new(a, y);
        let lm = Complex64::new(a, -y);
        (integrand(f, lp, t) + integrand(f, lm, t)).re
    };
    let gi = |y: f64| -> f64 {
        let lp = Complex64::new(a, y);
        let lm = Complex64::new(a, -y);
        (integrand(f, lp, t) + integrand(f, lm, t)).im
    };
    let mut partial: Vec<f64> = Vec::new();
    let mut partial_im = 0.0;
    let mut total = 0.0;
    let mut magnitude: f64 = 0.0;
    let mut evaluations = 0;
    let mut last_diffs = (f64::INFINITY, f64::INFINITY);
    for k in 0..max_pieces {
        let y0 = k as f64 * half_period;
        let piece = quad.integrate(g, y0, y0 + half_period)?;
        let piece_im = quad.integrate(gi, y0, y0 + half_period)?;
        evaluations += piece.evaluations + piece_im.evaluations;
        total += piece.value;
        partial_im += piece_im.value;
        magnitude = magnitude.max(total.abs());
        partial.push(total);
        if partial.len() >= spec.nodes {
            // keep the table short; the tail is what matters
            let window = &partial[partial.len().saturating_sub(24)..];
            let (e1, e0) = wynn_epsilon(window);
            let diff = (e1 - e0).abs();
            let floor = 64.0 * f64::EPSILON * magnitude;
            if diff.max(last_diffs.0) <= (REL_TOL * 10.0 * e1.abs()).max(floor) {
                let scale = 1.0 / (2.0 * PI);
                return Ok(QuadratureResult {
                    value: e1 * scale,
                    error_estimate: diff.max(last_diffs.0).max(floor) * scale,
                    nodes_used: evaluations,
                    imaginary: partial_im * scale,
                });
            }
            last_diffs = (diff, last_diffs.0);
        }
    }
    let window = &partial[partial.len().saturating_sub(24)..];
    let (e1, e0) = wynn_epsilon(window);
    let diff = (e1 - e0).abs();
    if !(diff <= 0.5 * last_diffs.1) {
        return Err(Error::NonConvergence { estimate: e1 / (2.0 * PI), error: diff / (2.0 * PI) });
    }
    Ok(QuadratureResult {
        value: e1 / (2.0 * PI),
        error_estimate: diff / (2.0 * PI),
        nodes_used: evaluations,
        imaginary: partial_im / (2.0 * PI),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_of_one_over_lambda_is_one() {
        let spec = ContourSpec::ray_pair(1.0).with_singularities(&[c(0.0, 0.0)]);
        let r = invert_laplace(|z| z.inv(), 3.0, &spec).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12, "{r:?}");
        assert!(r.imaginary.abs() <= r.error_estimate);
    }

    #[test]
    fn simple_pole_gives_exponential() {
        let spec = ContourSpec::ray_pair(1.0).with_singularities(&[c(0.5, 0.0)]);
        let r = invert_laplace(|z| (z - 0.5).inv(), 2.0, &spec).unwrap();
        assert!((r.value - 1f64.exp()).abs() < 1e-12 * 1f64.exp(), "{r:?}");
    }

    #[test]
    fn vertical_line_matches_simple_pole() {
        let spec = ContourSpec::vertical(1.0).with_singularities(&[c(0.5, 0.0)]);
        let r = invert_laplace(|z| (z - 0.5).inv(), 2.0, &spec).unwrap();
        assert!((r.value - 1f64.exp()).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn branch_point_transform() {
        // L^{-1}[1/sqrt(2λ)](t) = 1/sqrt(2πt)
        let spec = ContourSpec::ray_pair(0.7).with_singularities(&[c(0.0, 0.0)]);
        let t = 1.3;
        let r = invert_laplace(|z| sqrt_2lambda(z).inv(), t, &spec).unwrap();
        let exact = 1.0 / (2.0 * PI * t).sqrt();
        assert!((r.value - exact).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn pole_on_contour_is_rejected() {
        let spec = ContourSpec::ray_pair(1.0).with_singularities(&[c(0.5, 0.5)]);
        assert_eq!(spec.validate(), Err(Error::PoleOnContour));
        let spec = ContourSpec::vertical(1.0).with_singularities(&[c(1.0, 3.0)]);
        assert_eq!(spec.validate(), Err(Error::PoleOnContour));
        let spec = ContourSpec::ray_pair(1.0).with_singularities(&[c(2.0, 0.0)]);
        assert!(matches!(spec.validate(), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(ContourSpec::ray_pair(1.0).with_nodes(8).validate().is_err());
        assert!(ContourSpec::ray_pair(1.0).with_truncation(0.0).validate().is_err());
        let spec = ContourSpec::ray_pair(1.0);
        assert!(invert_laplace(|z| z.inv(), 0.0, &spec).is_err());
    }

    #[test]
    fn non_real_transform_is_flagged() {
        let spec = ContourSpec::ray_pair(1.0).with_singularities(&[c(0.0, 0.0)]);
        let r = invert_laplace(|z| c(0.0, 1.0) * z.inv(), 1.0, &spec);
        assert!(r.is_err());
    }
}
