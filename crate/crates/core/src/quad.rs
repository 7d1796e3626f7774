//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite and
//! half-infinite intervals.

use crate::error::{Error, Result};
use alloc::collections::BinaryHeap;
use core::cmp::Ordering;
#[allow(unused_imports)]
use num_traits::Float;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Value and absolute error estimate of a definite integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kron += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    // QUADPACK error heuristic
    let mean = 0.5 * kron;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let asc = asc * half.abs();
    let value = kron * half;
    let mut error = ((kron - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    Segment { a, b, value, error }
}

/// Tolerances and limits for the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { abs_tol: 0.0, rel_tol: 1e-12, max_segments: 2000 }
    }
}

impl Quadrature {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }

    pub fn with_max_segments(mut self, n: usize) -> Self {
        self.max_segments = n;
        self
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Integral> {
        self.integrate_pieces(f, &[a, b])
    }

    /// Integrates over consecutive segments `[p0, p1], [p1, p2], ...`,
    /// which lets callers place break points at known features.
    pub fn integrate_pieces<F: FnMut(f64) -> f64>(&self, mut f: F, points: &[f64]) -> Result<Integral> {
        if points.len() < 2 {
            return Err(Error::Domain("quadrature needs at least one segment"));
        }
        let mut heap = BinaryHeap::new();
        let mut value = 0.0;
        let mut error = 0.0;
        for w in points.windows(2) {
            if w[0] == w[1] {
                continue;
            }
            let seg = kronrod(&mut f, w[0], w[1]);
            value += seg.value;
            error += seg.error;
            heap.push(seg);
        }
        let mut evaluations = 15 * heap.len();
        loop {
            if !value.is_finite() {
                return Err(Error::NonConvergence { estimate: value, error });
            }
            let tol = self.abs_tol.max(self.rel_tol * value.abs());
            if error <= tol {
                break;
            }
            if heap.len() >= self.max_segments {
                // a remaining error dominated by round-off is accepted
                if error <= 50.0 * f64::EPSILON * heap.iter().map(|s| s.value.abs()).sum::<f64>() {
                    break;
                }
                return Err(Error::NonConvergence { estimate: value, error });
            }
            let worst = match heap.pop() {
                Some(s) => s,
                None => break,
            };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
                // interval can no longer be split in floating point
                heap.push(Segment { error: 0.0, ..worst });
                error -= worst.error;
                continue;
            }
            let left = kronrod(&mut f, worst.a, mid);
            let right = kronrod(&mut f, mid, worst.b);
            evaluations += 30;
            value += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            // re-sum periodically to shed accumulated cancellation
            if heap.len() % 64 == 0 {
                value = heap.iter().map(|s| s.value).sum();
                error = heap.iter().map(|s| s.error).sum();
            }
        }
        let value = heap.iter().map(|s| s.value).sum();
        let error = heap.iter().map(|s| s.error).sum();
        Ok(Integral { value, error, evaluations })
    }

    /// Integrates `f` over `[a, inf)` through the map `x = a + u / (1 - u)`.
    pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64) -> Result<Integral> {
        self.integrate(
            |u| {
                let w = 1.0 - u;
                let v = f(a + u / w);
                if v == 0.0 {
                    0.0
                } else {
                    v / (w * w)
                }
            },
            0.0,
            1.0,
        )
    }
}

impl Quadrature {
    /// `2π ∫₀^∞ ρ² ∫₋₁¹ f(ρ, c) dc dρ`, the integral over R³ of a function
    /// of radius and polar cosine. The radial integral is split at
    /// `radial_points` (which must start at 0) and continued to infinity
    /// from the last one. The error adds the outer estimate to the
    /// largest inner relative error times the value, which is only
    /// meaningful for integrands of one sign.
    pub fn integrate_axisymmetric<F: FnMut(f64, f64) -> f64>(
        &self,
        mut f: F,
        radial_points: &[f64],
    ) -> Result<Integral> {
        if radial_points.is_empty() {
            return Err(Error::Domain("axisymmetric quadrature needs radial break points"));
        }
        let mut inner_rel: f64 = 0.0;
        let mut evaluations = 0;
        let mut failure = None;
        let mut shell = |rho: f64| -> f64 {
            if rho == 0.0 || failure.is_some() {
                return 0.0;
            }
            match self.integrate(|c| f(rho, c), -1.0, 1.0) {
                Ok(r) => {
                    evaluations += r.evaluations;
                    if r.value != 0.0 {
                        inner_rel = inner_rel.max(r.error / r.value.abs());
                    }
                    2.0 * core::f64::consts::PI * rho * rho * r.value
                }
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        };
        let mut total = Integral { value: 0.0, error: 0.0, evaluations: 0 };
        if radial_points.len() >= 2 {
            let body = self.integrate_pieces(&mut shell, radial_points)?;
            total.value += body.value;
            total.error += body.error;
        }
        let tail = self.integrate_to_infinity(&mut shell, radial_points[radial_points.len() - 1])?;
        total.value += tail.value;
        total.error += tail.error;
        if let Some(e) = failure {
            return Err(e);
        }
        total.error += inner_rel * total.value.abs();
        total.evaluations = evaluations;
        Ok(total)
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (alloc::vec::Vec<f64>, alloc::vec::Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
