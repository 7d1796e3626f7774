//! Sequential sampling of polymer paths, Feynman–Kac sampling under
//! smoothed wells, and the s-wave ground state of those wells.
//!
//! A step of the polymer chain from `x` to `y` over `Δt` has density
//! proportional to `p̄_γ(Δt,x,y)·Z̄_γ(T-t_k,|y|)`. Integrating the free
//! part over the angle to `x` gives the radial law in closed form:
//!
//! ```text
//! g(ρ) = [φ(ρ-r₀)(1 - e^{-2r₀ρ/Δt}) + 2F_{r₀+ρ}(Δt)]·(ρ + h(ρ)) / (r₀·Z̄(T-t_{k-1}, r₀))
//! ```
//!
//! with `φ` the one-dimensional heat kernel and `h(ρ) = ρ(Z̄-1) = ∫₀^s F_ρ`.
//! Given the radius, the cosine to `x` is a mixture of the uniform law
//! (point part) and the law `∝ e^{βc}`, `β = r₀ρ/Δt` (free part), both
//! inverted exactly.

use crate::error::{Error, Result};
use crate::kernels::{
    bracket, bracket_time_integral, heat_kernel, origin_bracket_integral, origin_ratio, partition_function, Coupling,
    Method, SpatialPoint,
};
use crate::quad::Quadrature;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A seed together with a stream id of the ChaCha8 generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// The stream of replica `index` below this one. Replicas of distinct
    /// parents never collide while `index < 2³²`.
    pub fn replica(&self, index: u64) -> Self {
        Self { seed: self.seed, stream: (self.stream << 32) | (index & 0xffff_ffff) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    /// Nodes of each radial inverse-CDF table.
    pub radial_nodes: usize,
    /// Fixed upper end of the radial tables; chosen per step when `None`.
    pub radial_max: Option<f64>,
    /// Nodes of each interpolation table of `Z̄` in the radius.
    pub zbar_nodes: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { radial_nodes: 2048, radial_max: None, zbar_nodes: 4096 }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes < 64 || self.zbar_nodes < 64 {
            return Err(Error::Config("grids need at least 64 nodes"));
        }
        if let Some(r) = self.radial_max {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::Config("radial maximum must be positive and finite"));
            }
        }
        Ok(())
    }
}

/// One sampled path on its time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    /// `t₀ = 0` followed by the grid.
    pub times: Vec<f64>,
    pub positions: Vec<SpatialPoint>,
    pub seed: u64,
    pub stream: u64,
    pub gamma: Coupling,
    pub horizon: f64,
}

impl PathSample {
    pub fn endpoint(&self) -> &SpatialPoint {
        self.positions.last().expect("a path holds its start")
    }
}

/// `h(ρ) = ∫₀^s F_ρ` on a uniform radial grid, interpolated by cubics.
#[derive(Debug, Clone)]
struct BracketTable {
    spacing: f64,
    values: Vec<f64>,
}

impl BracketTable {
    fn new(gamma: f64, span: f64, nodes: usize) -> Result<Self> {
        if span == 0.0 {
            return Ok(Self { spacing: 1.0, values: Vec::new() });
        }
        let mut reach = 12.0 * span.sqrt();
        if gamma > 0.0 {
            reach += 0.5 * gamma * span + 35.0 / gamma;
        }
        let spacing = reach / (nodes - 1) as f64;
        let mut values = Vec::with_capacity(nodes);
        values.push(origin_bracket_integral(gamma, span)?);
        for i in 1..nodes {
            values.push(bracket_time_integral(gamma, span, i as f64 * spacing)?.value);
        }
        Ok(Self { spacing, values })
    }

    fn h(&self, rho: f64) -> f64 {
        let n = self.values.len();
        if n == 0 {
            return 0.0;
        }
        let x = rho / self.spacing;
        if x >= (n - 1) as f64 {
            return 0.0;
        }
        let i = (x as usize).clamp(1, n - 3);
        let t = x - i as f64;
        let v = &self.values[i - 1..i + 3];
        let a = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let b = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let c = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let d = (t + 1.0) * t * (t - 1.0) / 6.0;
        a * v[0] + b * v[1] + c * v[2] + d * v[3]
    }

    /// `ρ·Z̄(s, ρ)`.
    fn weight(&self, rho: f64) -> f64 {
        rho + self.h(rho)
    }
}

/// Piecewise-linear density on a uniform grid with its exact CDF.
#[derive(Debug, Clone)]
struct RadialTable {
    lo: f64,
    spacing: f64,
    density: Vec<f64>,
    cumulative: Vec<f64>,
}

impl RadialTable {
    fn build<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64, nodes: usize) -> Self {
        let spacing = (hi - lo) / (nodes - 1) as f64;
        let density: Vec<f64> = (0..nodes).map(|i| g(lo + i as f64 * spacing).max(0.0)).collect();
        let mut cumulative = Vec::with_capacity(nodes);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in density.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * spacing;
            cumulative.push(acc);
        }
        Self { lo, spacing, density, cumulative }
    }

    fn mass(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn sample(&self, u: f64) -> f64 {
        let target = u * self.mass();
        let n = self.cumulative.len();
        let i = self.cumulative.partition_point(|&c| c <= target).clamp(1, n - 1) - 1;
        let rest = target - self.cumulative[i];
        let g0 = self.density[i];
        let slope = (self.density[i + 1] - g0) / self.spacing;
        let root = (g0 * g0 + 2.0 * slope * rest).max(0.0).sqrt();
        let s = if g0 + root > 0.0 { 2.0 * rest / (g0 + root) } else { 0.0 };
        self.lo + i as f64 * self.spacing + s.min(self.spacing)
    }
}

/// Interval outside of which `g` stays below `1e-16` of its maximum on a
/// coarse scan of `[lo, hi]`.
fn support<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64) -> (f64, f64) {
    const SCAN: usize = 257;
    let spacing = (hi - lo) / (SCAN - 1) as f64;
    let values: Vec<f64> = (0..SCAN).map(|i| g(lo + i as f64 * spacing)).collect();
    let peak = values.iter().cloned().fold(0.0, f64::max);
    let floor = 1e-16 * peak;
    let first = values.iter().position(|&v| v > floor).unwrap_or(0);
    let last = values.iter().rposition(|&v| v > floor).unwrap_or(SCAN - 1);
    (lo + first.saturating_sub(1) as f64 * spacing, lo + (last + 1).min(SCAN - 1) as f64 * spacing)
}

/// Radial law of one step of the chain.
#[derive(Debug, Clone, Copy)]
pub struct StepLaw<'a> {
    gamma: f64,
    dt: f64,
    from: f64,
    next: &'a BracketTable,
    norm: f64,
}

impl StepLaw<'_> {
    /// Density of `|x_k|` at `rho`.
    pub fn density(&self, rho: f64) -> f64 {
        if rho < 0.0 {
            return 0.0;
        }
        if self.from == 0.0 {
            return 2.0 * bracket(self.gamma, self.dt, rho) * self.next.weight(rho) / self.norm;
        }
        let (free, point) = self.parts(rho);
        (free + point) * self.next.weight(rho) / (self.from * self.norm)
    }

    /// Free and point-interaction parts of the angular mass at `rho`.
    fn parts(&self, rho: f64) -> (f64, f64) {
        let (r0, dt) = (self.from, self.dt);
        let diff = rho - r0;
        let free = (-diff * diff / (2.0 * dt)).exp() / (2.0 * PI * dt).sqrt() * -(-2.0 * r0 * rho / dt).exp_m1();
        (free, 2.0 * bracket(self.gamma, dt, r0 + rho))
    }

    /// `P(|x_k| ≤ rho)` by adaptive quadrature of [`StepLaw::density`].
    pub fn cdf(&self, rho: f64) -> Result<f64> {
        if rho <= 0.0 {
            return Ok(0.0);
        }
        let scale = self.dt.sqrt();
        let mut points = alloc::vec![0.0];
        for p in [self.from - scale, self.from, self.from + scale] {
            if p > 0.0 && p < rho {
                points.push(p);
            }
        }
        points.push(rho);
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q = Quadrature::new(1e-14, 1e-11).with_max_segments(2000);
        Ok(q.integrate_pieces(|r| self.density(r), &points)?.value.min(1.0))
    }

    fn auto_range(&self) -> (f64, f64) {
        let mut hi = self.from + 12.0 * self.dt.sqrt();
        if self.gamma > 0.0 {
            hi += 40.0 / self.gamma;
        }
        support(&|r| self.density(r), 0.0, hi)
    }
}

/// Everything about a time grid that does not depend on the path: the
/// `Z̄` tables of every level.
#[derive(Debug, Clone)]
pub struct PathPlan {
    gamma: Coupling,
    horizon: f64,
    times: Vec<f64>,
    levels: Vec<BracketTable>,
    config: SamplerConfig,
    first: Option<(SpatialPoint, RadialTable)>,
}

fn check_grid(horizon: f64, times: &[f64]) -> Result<()> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Domain("horizon must be positive and finite"));
    }
    if times.is_empty() {
        return Err(Error::Grid("empty time grid"));
    }
    let mut last = 0.0;
    for &t in times {
        if !(t > last) {
            return Err(Error::Grid("times must increase strictly from zero"));
        }
        last = t;
    }
    if last > horizon {
        return Err(Error::Grid("times must not exceed the horizon"));
    }
    Ok(())
}

impl PathPlan {
    pub fn new(gamma: Coupling, horizon: f64, times: &[f64], config: SamplerConfig) -> Result<Self> {
        config.validate()?;
        check_grid(horizon, times)?;
        let levels = times
            .iter()
            .map(|&t| BracketTable::new(gamma.gamma, (horizon - t).max(0.0), config.zbar_nodes))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { gamma, horizon, times: times.to_vec(), levels, config, first: None })
    }

    /// Prebuilds the first-step table for paths started at `start`.
    pub fn with_start(mut self, start: &SpatialPoint) -> Result<Self> {
        let law = self.step_law(0, start.radius)?;
        let table = self.table(&law)?;
        self.first = Some((*start, table));
        Ok(self)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Law of `|x_k|` (`k` counting grid times from zero) given
    /// `|x_{k-1}| = from`; `from = 0` is the origin start and is allowed
    /// only for `k = 0`.
    pub fn step_law(&self, k: usize, from: f64) -> Result<StepLaw<'_>> {
        if k >= self.times.len() {
            return Err(Error::Grid("step index beyond the grid"));
        }
        if !(from >= 0.0) || !from.is_finite() {
            return Err(Error::Domain("radius must be finite and non-negative"));
        }
        let gamma = self.gamma.gamma;
        let before = if k == 0 { 0.0 } else { self.times[k - 1] };
        let norm = if from == 0.0 {
            if k != 0 {
                return Err(Error::Domain("only the first step may leave the origin"));
            }
            origin_bracket_integral(gamma, self.horizon)?
        } else if k == 0 {
            partition_function(self.gamma, self.horizon, from, Method::ClosedForm)?.value
        } else {
            self.levels[k - 1].weight(from) / from
        };
        Ok(StepLaw { gamma, dt: self.times[k] - before, from, next: &self.levels[k], norm })
    }

    fn table(&self, law: &StepLaw<'_>) -> Result<RadialTable> {
        let (lo, hi) = match self.config.radial_max {
            Some(hi) => (0.0, hi),
            None => law.auto_range(),
        };
        let table = RadialTable::build(&|r| law.density(r), lo, hi, self.config.radial_nodes);
        let deviation = table.mass() - 1.0;
        if !(deviation.abs() <= 1e-3) {
            return Err(Error::TableResolution { deviation });
        }
        Ok(table)
    }

    /// Samples one path started at `start`.
    pub fn sample(&self, start: &SpatialPoint, rng: RngStream) -> Result<PathSample> {
        let mut gen = rng.rng();
        let mut positions = Vec::with_capacity(self.times.len() + 1);
        positions.push(*start);
        let mut current = *start;
        for k in 0..self.times.len() {
            let law = self.step_law(k, current.radius)?;
            let owned;
            let table = match &self.first {
                Some((s, t)) if k == 0 && s.radius == start.radius => t,
                _ => {
                    owned = self.table(&law)?;
                    &owned
                }
            };
            let rho = table.sample(1.0 - gen.random::<f64>()).max(f64::MIN_POSITIVE);
            let u_mix: f64 = gen.random();
            let u_cos = 1.0 - gen.random::<f64>();
            let phi = 2.0 * PI * gen.random::<f64>();
            let c = if current.is_origin() {
                2.0 * u_cos - 1.0
            } else {
                let (free, point) = law.parts(rho);
                if u_mix * (free + point) < free {
                    let beta = current.radius * rho / law.dt;
                    if beta < 1e-12 {
                        2.0 * u_cos - 1.0
                    } else {
                        (1.0 + (u_cos * (-2.0 * beta).exp_m1()).ln_1p() / beta).clamp(-1.0, 1.0)
                    }
                } else {
                    2.0 * u_cos - 1.0
                }
            };
            current = rotate(&current, rho, c, phi);
            positions.push(current);
        }
        let mut times = Vec::with_capacity(self.times.len() + 1);
        times.push(0.0);
        times.extend_from_slice(&self.times);
        Ok(PathSample {
            times,
            positions,
            seed: rng.seed,
            stream: rng.stream,
            gamma: self.gamma,
            horizon: self.horizon,
        })
    }
}

/// The point at `radius` whose direction makes cosine `c` with that of
/// `from` and azimuth `phi` about it.
fn rotate(from: &SpatialPoint, radius: f64, c: f64, phi: f64) -> SpatialPoint {
    let e = from.direction;
    let helper = if e[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let mut a = cross(&helper, &e);
    let na = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    a = [a[0] / na, a[1] / na, a[2] / na];
    let b = cross(&e, &a);
    let s = (1.0 - c * c).max(0.0).sqrt();
    let (sp, cp) = phi.sin_cos();
    let mut d = [0.0; 3];
    for i in 0..3 {
        d[i] = c * e[i] + s * (cp * a[i] + sp * b[i]);
    }
    let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    SpatialPoint { radius, direction: [d[0] / n, d[1] / n, d[2] / n] }
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Samples one path of the Gibbs measure with horizon `horizon` on `grid`.
pub fn sample_polymer_path(
    gamma: Coupling,
    horizon: f64,
    start: &SpatialPoint,
    grid: &[f64],
    config: SamplerConfig,
    rng: RngStream,
) -> Result<PathSample> {
    PathPlan::new(gamma, horizon, grid, config)?.sample(start, rng)
}

/// Joint density of `(ω(t₁), …, ω(t_n))` under the Gibbs measure with
/// horizon `horizon` started at `start`.
pub fn finite_dim_density(
    gamma: Coupling,
    horizon: f64,
    start: &SpatialPoint,
    times: &[f64],
    points: &[SpatialPoint],
) -> Result<f64> {
    check_grid(horizon, times)?;
    if points.len() != times.len() {
        return Err(Error::Domain("one point per grid time"));
    }
    if points.iter().any(SpatialPoint::is_origin) {
        return Err(Error::Domain("grid points must avoid the origin"));
    }
    let mut value = if start.is_origin() {
        origin_ratio(gamma, times[0], horizon, &points[0])?
    } else {
        heat_kernel(gamma, times[0], start, &points[0], Method::ClosedForm)?.value
            / partition_function(gamma, horizon, start.radius, Method::ClosedForm)?.value
    };
    for k in 1..times.len() {
        value *= heat_kernel(gamma, times[k] - times[k - 1], &points[k - 1], &points[k], Method::ClosedForm)?.value;
    }
    let rest = horizon - times[times.len() - 1];
    if rest > 0.0 {
        value *= partition_function(gamma, rest, points[points.len() - 1].radius, Method::ClosedForm)?.value;
    }
    Ok(value)
}

/// The well `v_γ^ε = (π²/8ε² + γ/ε)·1_{|x|≤ε}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedPotential {
    pub epsilon: f64,
    pub gamma: Coupling,
    pub amplitude: f64,
}

impl SmoothedPotential {
    pub fn new(epsilon: f64, gamma: Coupling) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::Domain("well radius must be positive"));
        }
        let amplitude = PI * PI / (8.0 * epsilon * epsilon) + gamma.gamma / epsilon;
        Ok(Self { epsilon, gamma, amplitude })
    }

    /// The same support with the amplitude set to zero.
    pub fn without_well(self) -> Self {
        Self { amplitude: 0.0, ..self }
    }

    /// `‖1_{|x|≤1}‖_{L¹}`, the mass of the unscaled profile.
    pub const PROFILE_MASS: f64 = 4.0 * PI / 3.0;

    pub fn value(&self, radius: f64) -> f64 {
        if radius <= self.epsilon {
            self.amplitude
        } else {
            0.0
        }
    }
}

/// Endpoints of Feynman–Kac paths with their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEndpoints {
    pub endpoints: Vec<SpatialPoint>,
    pub log_weights: Vec<f64>,
    /// Common log-factor multiplying every weight.
    pub log_scale: f64,
}

impl WeightedEndpoints {
    /// Weights normalised to sum to one.
    pub fn normalized_weights(&self) -> Vec<f64> {
        let top = self.log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = self.log_weights.iter().map(|&l| (l - top).exp()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    }

    /// Weight average with its standard error, estimating the partition
    /// function.
    pub fn partition_estimate(&self) -> (f64, f64) {
        let n = self.log_weights.len() as f64;
        let top = self.log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = self.log_weights.iter().map(|&l| (l - top).exp()).collect();
        let mean = w.iter().sum::<f64>() / n;
        let var = w.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
        let scale = (top + self.log_scale).exp();
        (mean * scale, (var / n).sqrt() * scale)
    }

    /// Kish effective sample size of the weights.
    pub fn effective_size(&self) -> f64 {
        let w = self.normalized_weights();
        1.0 / w.iter().map(|v| v * v).sum::<f64>()
    }
}

fn check_fk(pot: &SmoothedPotential, horizon: f64, n_paths: usize, step: f64) -> Result<()> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Domain("horizon must be positive and finite"));
    }
    if n_paths == 0 || n_paths > u32::MAX as usize {
        return Err(Error::Config("path count must lie in [1, 2³²]"));
    }
    let bound = 0.25 * pot.epsilon * pot.epsilon;
    if !(step > 0.0) || step > bound {
        return Err(Error::StepTooLarge { step, bound });
    }
    Ok(())
}

fn norm3(p: &[f64; 3]) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

/// Simulates `n_paths` Brownian paths over `[0, horizon]` and weights
/// each by `exp(Σ v(ω(t_i))·Δt_i)`.
///
/// Within `8√step` of the well the path moves in steps of `step`.
/// Farther out the step grows to `(distance/8)²`, so that the chance of
/// touching the well unseen during one step is below `e^{-32}`; the
/// potential vanishes there, so the weight is unaffected.
pub fn sample_feynman_kac(
    pot: &SmoothedPotential,
    horizon: f64,
    start: &SpatialPoint,
    n_paths: usize,
    step: f64,
    rng: RngStream,
) -> Result<WeightedEndpoints> {
    check_fk(pot, horizon, n_paths, step)?;
    let near = pot.epsilon + 8.0 * step.sqrt();
    let coarse = horizon / 16.0;
    let mut endpoints = Vec::with_capacity(n_paths);
    let mut log_weights = Vec::with_capacity(n_paths);
    for i in 0..n_paths {
        let mut gen = rng.replica(i as u64).rng();
        let mut p = start.cartesian();
        let mut t = 0.0;
        let mut log_w = 0.0;
        while t < horizon {
            let r = norm3(&p);
            let mut h = if r <= near {
                step
            } else {
                let reach = (r - pot.epsilon) / 8.0;
                (reach * reach).clamp(step, coarse)
            };
            h = h.min(horizon - t);
            log_w += pot.value(r) * h;
            let root = h.sqrt();
            for x in p.iter_mut() {
                let z: f64 = gen.sample(StandardNormal);
                *x += root * z;
            }
            t += h;
        }
        endpoints.push(SpatialPoint::from_cartesian(p));
        log_weights.push(log_w);
    }
    Ok(WeightedEndpoints { endpoints, log_weights, log_scale: 0.0 })
}

/// The s-wave ground state of a well with a bound state.
#[derive(Debug, Clone, Copy)]
struct GroundState {
    epsilon: f64,
    k: f64,
    kappa: f64,
    lambda: f64,
}

impl GroundState {
    fn of(pot: &SmoothedPotential) -> Result<Option<Self>> {
        Ok(radial_ground_state(pot)?.map(|lambda| Self {
            epsilon: pot.epsilon,
            k: (2.0 * (pot.amplitude - lambda)).sqrt(),
            kappa: (2.0 * lambda).sqrt(),
            lambda,
        }))
    }

    /// `ln ψ(r)`, normalised so that `ψ(ε) = 1/ε`.
    fn ln_psi(&self, r: f64) -> f64 {
        if r < self.epsilon {
            let kr = self.k * r;
            let ratio = if kr < 1e-4 { self.k * (1.0 - kr * kr / 6.0) } else { kr.sin() / r };
            (ratio / (self.k * self.epsilon).sin()).ln()
        } else {
            -self.kappa * (r - self.epsilon) - r.ln()
        }
    }

    /// Radial component of `∇ ln ψ`.
    fn drift(&self, r: f64) -> f64 {
        if r < self.epsilon {
            let kr = self.k * r;
            if kr < 1e-4 {
                -self.k * kr / 3.0
            } else {
                self.k / kr.tan() - 1.0 / r
            }
        } else {
            -self.kappa - 1.0 / r
        }
    }
}

/// Feynman–Kac sampling through the ground-state transform of the well.
///
/// With `½Δψ + vψ = λψ`, the Feynman–Kac expectation
/// `E_x[e^{∫v} f(ω_T)]` equals `ψ(x)e^{λT}·E_x[f(X_T)/ψ(X_T)]`, where `X`
/// solves `dX = ∇ln ψ(X)dt + dB`. The paths of `X` are simulated by Euler
/// steps of length `step` within `8√step` of the well, growing to
/// `(r/8)²` (at most `horizon/16`) farther out; each path carries the
/// single weight `1/ψ(X_T)`. Fails when the well has no bound state.
pub fn sample_feynman_kac_guided(
    pot: &SmoothedPotential,
    horizon: f64,
    start: &SpatialPoint,
    n_paths: usize,
    step: f64,
    rng: RngStream,
) -> Result<WeightedEndpoints> {
    check_fk(pot, horizon, n_paths, step)?;
    if start.is_origin() {
        return Err(Error::Domain("guided sampling starts off the origin"));
    }
    let ground = GroundState::of(pot)?.ok_or(Error::Domain("the well has no bound state"))?;
    let near = pot.epsilon + 8.0 * step.sqrt();
    let coarse = horizon / 16.0;
    let mut endpoints = Vec::with_capacity(n_paths);
    let mut log_weights = Vec::with_capacity(n_paths);
    for i in 0..n_paths {
        let mut gen = rng.replica(i as u64).rng();
        let mut p = start.cartesian();
        let mut t = 0.0;
        while t < horizon {
            let r = norm3(&p);
            let mut h = if r <= near {
                step
            } else {
                let reach = r / 8.0;
                (reach * reach).clamp(step, coarse)
            };
            h = h.min(horizon - t);
            let b = if r > 0.0 { ground.drift(r) * h / r } else { 0.0 };
            let root = h.sqrt();
            for x in p.iter_mut() {
                let z: f64 = gen.sample(StandardNormal);
                *x += b * *x + root * z;
            }
            t += h;
        }
        let end = SpatialPoint::from_cartesian(p);
        log_weights.push(-ground.ln_psi(end.radius));
        endpoints.push(end);
    }
    let log_scale = ground.ln_psi(start.radius) + ground.lambda * horizon;
    Ok(WeightedEndpoints { endpoints, log_weights, log_scale })
}

/// Binding energy `λ > 0` of the s-wave ground state of `½Δ + v_γ^ε`, or
/// `None` when there is no bound state.
///
/// Inside the well the radial function is `sin(kr)` with
/// `k = √(2(W-λ))`, outside `e^{-√(2λ)r}`; the ground state is the root of
/// `k·cot(kε) + √(2λ)` on the branch `kε ∈ (π/2, π)`, found by bisection.
pub fn radial_ground_state(pot: &SmoothedPotential) -> Result<Option<f64>> {
    let eps = pot.epsilon;
    if !(eps > 0.0) {
        return Err(Error::Domain("well radius must be positive"));
    }
    let w = pot.amplitude;
    let mismatch = |lambda: f64| {
        let k = (2.0 * (w - lambda)).sqrt();
        k * (k * eps).cos() / (k * eps).sin() + (2.0 * lambda).sqrt()
    };
    let mut hi = w - PI * PI / (8.0 * eps * eps);
    if !(hi > 0.0) {
        return Ok(None);
    }
    let mut lo = (w - PI * PI / (2.0 * eps * eps)).max(0.0);
    if lo == 0.0 && mismatch(0.0) >= 0.0 {
        return Ok(None);
    }
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if mismatch(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
