//! The six experiments and the checks each one reports.

use crate::config::{ExperimentConfig, ExperimentId};
use crate::error::{DriverError, Result};
use crate::report::{ExperimentReport, Value};
use crate::stats::{ks_statistic, weighted_ks_statistic, RadialSample};
use std::f64::consts::PI;
use std::time::Instant;
use zerorange_core::densities::{
    endpoint_density_q, globular_radial_cdf, maxwell_cdf, mixing_density_v, stationary_radial_cdf, KappaParam,
    MixingDensity,
};
use zerorange_core::kernels::{
    eigenfunction_psi, forward_equation_residual, heat_kernel, heat_kernel_at, origin_ratio, partition_function,
    transition_density, Coupling, Method, PairGeometry, SpatialPoint,
};
use zerorange_core::quad::Quadrature;
use zerorange_core::sampler::{
    radial_ground_state, sample_feynman_kac_guided, PathPlan, RngStream, SamplerConfig, SmoothedPotential,
};
use zerorange_core::specfun::SQRT_2PI;

/// Runs the experiment described by `cfg`. Deterministic given the seed,
/// apart from the wall time.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let clock = Instant::now();
    let mut report = ExperimentReport::new(cfg.id.name());
    match cfg.id {
        ExperimentId::KernelSelftest => kernel_selftest(cfg, &mut report)?,
        ExperimentId::GlobularEndpoint => globular_endpoint(cfg, &mut report)?,
        ExperimentId::BulkStationary => bulk_stationary(cfg, &mut report)?,
        ExperimentId::CriticalEndpoint => critical_endpoint(cfg, &mut report)?,
        ExperimentId::DiffusiveScaling => diffusive_scaling(cfg, &mut report)?,
        ExperimentId::SmoothedLimit => smoothed_limit(cfg, &mut report)?,
    }
    report.wall_time_s = clock.elapsed().as_secs_f64();
    Ok(report)
}

/// Runs the experiment and writes its report to `cfg.out`, or to
/// standard output when no path is set.
pub fn execute(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if let Some(path) = &cfg.out {
        // fail on a missing directory before spending the run time
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(std::path::Path::new("."));
        if !dir.is_dir() {
            let source = std::io::Error::new(std::io::ErrorKind::NotFound, "no such directory");
            return Err(DriverError::Output { path: path.display().to_string(), source });
        }
    }
    let report = run_experiment(cfg)?;
    match &cfg.out {
        Some(path) => report.write_to(cfg.format, path)?,
        None => report.write(cfg.format, std::io::stdout().lock())?,
    }
    Ok(report)
}

fn invalid(msg: String) -> DriverError {
    DriverError::Config(msg)
}

/// Rejects the fields an experiment does not take.
fn refuse(cfg: &ExperimentConfig, gamma: bool, kappa: bool, horizon: bool, paths: bool, grid: bool) -> Result<()> {
    let given = [
        ("gamma", gamma && cfg.gamma.is_some()),
        ("kappa", kappa && cfg.kappa.is_some()),
        ("T", horizon && cfg.horizon.is_some()),
        ("n_paths", paths && cfg.n_paths.is_some()),
        ("grid", grid && cfg.grid.is_some()),
    ];
    match given.iter().find(|(_, bad)| *bad) {
        Some((name, _)) => Err(invalid(format!("`{name}` does not apply to {}", cfg.id))),
        None => Ok(()),
    }
}

fn paths(cfg: &ExperimentConfig, default: usize) -> Result<usize> {
    let n = cfg.n_paths.unwrap_or(default);
    if n < 1000 {
        return Err(invalid(format!("{} needs at least 1000 paths, got {n}", cfg.id)));
    }
    Ok(n)
}

fn grid(cfg: &ExperimentConfig, default: usize) -> Result<usize> {
    match cfg.grid.unwrap_or(default) {
        0 => Err(invalid("grid must be at least 1".into())),
        g => Ok(g),
    }
}

fn horizon(cfg: &ExperimentConfig, default: f64) -> Result<f64> {
    let t = cfg.horizon.unwrap_or(default);
    if !(t > 0.0) {
        return Err(invalid(format!("T must be positive, got {t}")));
    }
    Ok(t)
}

fn uniform_grid(horizon: f64, steps: usize) -> Vec<f64> {
    (1..=steps).map(|j| horizon * j as f64 / steps as f64).collect()
}

/// Samples `n` paths on `plan` from `start` and collects the radii at the
/// grid positions `pick` (indices into the grid, counting the start as 0).
/// Path `i` always uses replica `i` of `rng`, whatever the number of
/// workers.
fn sample_radii(
    plan: &PathPlan,
    start: &SpatialPoint,
    n: usize,
    rng: RngStream,
    pick: &[usize],
) -> Result<Vec<RadialSample>> {
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get()).min(n).max(1);
    let chunk = n.div_ceil(workers);
    let shards: Vec<Result<Vec<Vec<f64>>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    let mut out = vec![Vec::with_capacity(chunk); pick.len()];
                    for i in (w * chunk)..((w + 1) * chunk).min(n) {
                        let path = plan.sample(start, rng.replica(i as u64))?;
                        for (slot, &k) in out.iter_mut().zip(pick) {
                            slot.push(path.positions[k].radius);
                        }
                    }
                    Ok(out)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sampling worker panicked")).collect()
    });
    let mut merged = vec![RadialSample::default(); pick.len()];
    for shard in shards {
        for (m, part) in merged.iter_mut().zip(shard?) {
            *m = std::mem::take(m).merge(RadialSample::new(part));
        }
    }
    Ok(merged)
}

fn kernel_selftest(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    refuse(cfg, true, true, true, true, true)?;

    let closed = |gamma: f64, t: f64, x: &SpatialPoint, y: &SpatialPoint| -> Result<f64> {
        Ok(heat_kernel(Coupling::from(gamma), t, x, y, Method::ClosedForm)?.value)
    };

    let mut worst: f64 = 0.0;
    let mut outside_estimate = 0usize;
    for gamma in [-2.0, -0.5, 0.0, 0.5, 2.0] {
        for t in [0.1, 1.0, 10.0] {
            for r1 in [0.1f64, 1.0, 5.0] {
                for r2 in [0.1f64, 1.0, 5.0] {
                    for d in [(r1 - r2).abs() + 0.01, (r1 + r2) * 0.99] {
                        let geo = PairGeometry::new(r1, r2, d)?;
                        let c = heat_kernel_at(Coupling::from(gamma), t, &geo, Method::ClosedForm)?.value;
                        let q = heat_kernel_at(Coupling::from(gamma), t, &geo, Method::Quadrature)?;
                        worst = worst.max((c - q.value).abs() / c);
                        if (c - q.value).abs() > q.error_estimate {
                            outside_estimate += 1;
                        }
                    }
                }
            }
        }
    }
    report.stat("kernel_max_rel_error", worst);
    report.stat("kernel_outside_error_estimate", outside_estimate as f64);
    report.check_at_most(1, "kernel_oracle", worst, 1e-8);

    let fine = Quadrature::new(0.0, 1e-11).with_max_segments(4000);
    let mut gap: f64 = 0.0;
    for gamma in [-1.0, 0.0, 1.0] {
        for t in [0.5, 2.0] {
            for r in [0.5, 2.0] {
                let c = partition_function(Coupling::from(gamma), t, r, Method::ClosedForm)?.value;
                let q = partition_function(Coupling::from(gamma), t, r, Method::Quadrature)?.value;
                let x = SpatialPoint::on_axis(r);
                let s = axisymmetric(&fine, |y| closed(gamma, t, &x, y), &[0.0, r, r + 10.0 * t.sqrt()])?;
                gap = gap.max((c - q).abs() / c).max((c - s).abs() / c);
            }
        }
    }
    report.stat("zbar_max_rel_gap", gap);
    report.check_at_most(2, "zbar_three_way", gap, 1e-6);

    let ck = Quadrature::new(0.0, 1e-10).with_max_segments(4000);
    let mut residual: f64 = 0.0;
    for (gamma, s, t) in [(-1.0, 0.5, 0.5), (0.0, 0.5, 1.0), (1.0, 0.3, 0.7)] {
        let x = SpatialPoint::on_axis(1.0);
        let y = SpatialPoint::from_polar(0.8, -1.0, 0.0);
        let conv =
            axisymmetric(&ck, |z| Ok(closed(gamma, s, &x, z)? * closed(gamma, t, z, &y)?), &[0.0, 0.8, 1.0, 8.0])?;
        let direct = closed(gamma, s + t, &x, &y)?;
        residual = residual.max((conv - direct).abs() / direct);
    }
    report.stat("chapman_kolmogorov_max_residual", residual);
    report.check_at_most(3, "semigroup", residual, 1e-4);

    let tight = Quadrature::new(0.0, 1e-14);
    let one = Coupling::from(1.0);
    let l2 = tight.integrate_to_infinity(|r| 4.0 * PI * r * r * psi_or_zero(one, r).powi(2), 0.0)?.value;
    let l1 = tight.integrate_to_infinity(|r| 4.0 * PI * r * r * psi_or_zero(one, r), 0.0)?.value;
    let l2_err = report.stat("psi_l2_error", (l2 - 1.0).abs());
    let l1_err = report.stat("psi_l1_rel_error", (l1 - 2.0 * SQRT_2PI).abs() / (2.0 * SQRT_2PI));
    report.check(4, "psi_norms", format!("{l2_err:.3e}, {l1_err:.3e} <= 1e-12"), l2_err <= 1e-12 && l1_err <= 1e-12);

    let x = SpatialPoint::on_axis(1.0);
    let mass = axisymmetric(&fine, |y| Ok(transition_density(1.0, &x, y)?.value), &[0.0, 1.0, 12.0])?;
    let y = SpatialPoint::on_axis(1.0);
    let pushed = axisymmetric(
        &fine,
        |x| Ok(psi_or_zero(one, x.radius).powi(2) * transition_density(0.5, x, &y)?.value),
        &[0.0, 1.0, 12.0],
    )?;
    let target = eigenfunction_psi(one, 1.0)?.powi(2);
    let mass_err = report.stat("transition_mass_error", (mass - 1.0).abs());
    let stat_res = report.stat("stationarity_rel_residual", (pushed - target).abs() / target);
    report.check(
        5,
        "transition_density",
        format!("{mass_err:.3e} <= 1e-6, {stat_res:.3e} <= 1e-5"),
        mass_err <= 1e-6 && stat_res <= 1e-5,
    );

    let mut min_v = f64::INFINITY;
    let mut mass_gap: f64 = 0.0;
    let unit = Quadrature::new(0.0, 1e-12).with_max_segments(4000);
    for kappa in [-5.0, -1.0, 0.0, 1.0, 5.0] {
        let k = KappaParam::new(kappa)?;
        for i in 0..100 {
            min_v = min_v.min(mixing_density_v(k, (i as f64 + 0.5) / 100.0)?);
        }
        // τ = 1 - w² absorbs the inverse square-root edge at τ = 1
        let mut failure = None;
        let total = unit
            .integrate(
                |w| {
                    let tau = (1.0 - w) * (1.0 + w);
                    if w == 0.0 || tau <= 0.0 || tau >= 1.0 {
                        return 0.0;
                    }
                    mixing_density_v(k, tau).map(|v| 2.0 * w * v).unwrap_or_else(|e| {
                        failure = Some(e);
                        0.0
                    })
                },
                0.0,
                1.0,
            )?
            .value;
        if let Some(e) = failure {
            return Err(e.into());
        }
        mass_gap = mass_gap.max((total - 1.0).abs());
    }
    let mut v0_gap: f64 = 0.0;
    for i in 0..100 {
        let tau = (i as f64 + 0.5) / 100.0;
        let exact = 0.5 / (1.0 - tau).sqrt();
        v0_gap = v0_gap.max((mixing_density_v(KappaParam::new(0.0)?, tau)? - exact).abs() / exact);
    }
    report.stat("mixing_min_value", min_v);
    report.stat("mixing_max_mass_error", mass_gap);
    report.stat("mixing_zero_kappa_rel_error", v0_gap);
    report.check(
        6,
        "mixing_density",
        format!("min {min_v:.3e} > 0, {mass_gap:.3e} <= 1e-6, {v0_gap:.3e} <= 1e-8"),
        min_v > 0.0 && mass_gap <= 1e-6 && v0_gap <= 1e-8,
    );

    let mut cross: f64 = 0.0;
    for kappa in [-1.0, 0.0, 2.0] {
        for rho in [0.3, 1.0, 2.0] {
            let y = SpatialPoint::on_axis(rho);
            let q = endpoint_density_q(KappaParam::new(kappa)?, &y)?;
            let o = origin_ratio(Coupling::from(kappa), 1.0, 1.0, &y)?;
            cross = cross.max((q - o).abs() / o);
        }
    }
    report.stat("endpoint_origin_max_rel_error", cross);
    report.check_at_most(7, "compound_gaussian_cross", cross, 1e-6);

    let radii: Vec<f64> = (0..20).map(|i| 0.2 + 3.8 * i as f64 / 19.0).collect();
    let cosines = [-0.9, -0.3, 0.0, 0.4, 0.95];
    let fwd = forward_equation_residual(1.0, &SpatialPoint::on_axis(1.0), &radii, &cosines)?;
    report.stat("forward_equation_residual", fwd);
    report.check_at_most(13, "forward_equation", fwd, 1e-3);
    Ok(())
}

fn psi_or_zero(gamma: Coupling, r: f64) -> f64 {
    if r > 0.0 {
        eigenfunction_psi(gamma, r).unwrap_or(0.0)
    } else {
        0.0
    }
}

/// `∫ f(y) dy` for `f` symmetric about the z-axis.
fn axisymmetric(q: &Quadrature, f: impl Fn(&SpatialPoint) -> Result<f64>, radial: &[f64]) -> Result<f64> {
    let mut failure = None;
    let v = q.integrate_axisymmetric(
        |rho, c| {
            if failure.is_some() {
                return 0.0;
            }
            match f(&SpatialPoint::from_polar(rho, c, 0.0)) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        radial,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(v.value),
    }
}

fn positive_gamma(cfg: &ExperimentConfig) -> Result<f64> {
    let gamma = cfg.gamma.unwrap_or(1.0);
    if !(gamma > 0.0) {
        return Err(invalid(format!("{} needs gamma > 0, got {gamma}", cfg.id)));
    }
    Ok(gamma)
}

fn common_params(report: &mut ExperimentReport, cfg: &ExperimentConfig, horizon: f64, n: usize, grid: usize) {
    report.param("T", Value::Real(horizon));
    report.param("n_paths", Value::Int(n as i64));
    report.param("seed", Value::Int(cfg.seed as i64));
    report.param("grid", Value::Int(grid as i64));
}

fn globular_endpoint(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    refuse(cfg, false, true, false, false, false)?;
    let gamma = positive_gamma(cfg)?;
    let t = horizon(cfg, 30.0)?;
    let n = paths(cfg, 100_000)?;
    let steps = grid(cfg, 1)?;
    report.param("gamma", Value::Real(gamma));
    common_params(report, cfg, t, n, steps);

    let start = SpatialPoint::on_axis(1.0);
    let plan = PathPlan::new(Coupling::from(gamma), t, &uniform_grid(t, steps), SamplerConfig::default())?
        .with_start(&start)?;
    let mut radii = sample_radii(&plan, &start, n, RngStream::new(cfg.seed, 0), &[steps])?.remove(0);
    let ks = ks_statistic(radii.values(), |r| globular_radial_cdf(gamma * r))?;
    report.stat("mean_endpoint_radius", radii.summary().mean);
    report.stat("endpoint_ks", ks);
    report.check_at_most(8, "globular_endpoint_ks", ks, 0.02);
    Ok(())
}

fn bulk_stationary(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    refuse(cfg, false, true, false, false, false)?;
    let gamma = positive_gamma(cfg)?;
    let t = horizon(cfg, 30.0)?;
    let n = paths(cfg, 10_000)?;
    let window_steps = grid(cfg, 2)?;
    let s = 0.5 * t;
    let window = 1.0 / (gamma * gamma);
    if s + window >= t {
        return Err(invalid(format!("the window [T/2, T/2 + 1/γ²] must end before T = {t}")));
    }
    report.param("gamma", Value::Real(gamma));
    common_params(report, cfg, t, n, window_steps);
    report.param("S", Value::Real(s));

    let mut times: Vec<f64> = (0..=window_steps).map(|j| s + window * j as f64 / window_steps as f64).collect();
    times.push(t);
    let pick: Vec<usize> = (1..=window_steps + 1).collect();
    let start = SpatialPoint::on_axis(1.0);
    let plan = PathPlan::new(Coupling::from(gamma), t, &times, SamplerConfig::default())?.with_start(&start)?;
    let samples = sample_radii(&plan, &start, n, RngStream::new(cfg.seed, 0), &pick)?;
    let mut worst: f64 = 0.0;
    for (j, mut radii) in samples.into_iter().enumerate() {
        let ks = ks_statistic(radii.values(), |r| stationary_radial_cdf(gamma * r))?;
        report.stat(&format!("window_ks_{j}"), ks);
        worst = worst.max(ks);
    }
    report.stat("window_ks_max", worst);
    report.check_at_most(9, "bulk_stationary_ks", worst, 0.03);
    Ok(())
}

fn critical_endpoint(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    refuse(cfg, true, false, false, false, false)?;
    let kappa = cfg.kappa.unwrap_or(0.0);
    let t = horizon(cfg, 1.0)?;
    let n = paths(cfg, 100_000)?;
    let steps = grid(cfg, 1)?;
    let gamma = kappa / t.sqrt();
    report.param("kappa", Value::Real(kappa));
    common_params(report, cfg, t, n, steps);

    let law = MixingDensity::new(KappaParam::new(kappa)?)?;
    let start = SpatialPoint::origin();
    let plan = PathPlan::new(Coupling::from(gamma), t, &uniform_grid(t, steps), SamplerConfig::default())?
        .with_start(&start)?;
    let mut radii = sample_radii(&plan, &start, n, RngStream::new(cfg.seed, 0), &[steps])?.remove(0);
    let root = t.sqrt();
    let ks = ks_statistic(radii.values(), |r| law.radial_cdf(r / root))?;
    report.stat("mixing_table_residual", law.normalization_residual);
    report.stat("endpoint_ks", ks);
    report.check_at_most(10, "critical_endpoint_ks", ks, 0.02);
    Ok(())
}

fn diffusive_scaling(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    refuse(cfg, false, true, false, false, false)?;
    let gamma = cfg.gamma.unwrap_or(-1.0);
    if !(gamma < 0.0) {
        return Err(invalid(format!("diffusive-scaling needs gamma < 0, got {gamma}")));
    }
    let t = horizon(cfg, 160.0)?;
    let n = paths(cfg, 10_000)?;
    let steps = grid(cfg, 1)?;
    report.param("gamma", Value::Real(gamma));
    common_params(report, cfg, t, n, steps);

    let start = SpatialPoint::on_axis(1.0);
    let sweep = [t / 16.0, t / 4.0, t];
    let mut ks = Vec::new();
    for (j, &h) in sweep.iter().enumerate() {
        let plan = PathPlan::new(Coupling::from(gamma), h, &uniform_grid(h, steps), SamplerConfig::default())?
            .with_start(&start)?;
        let mut radii = sample_radii(&plan, &start, n, RngStream::new(cfg.seed, j as u64), &[steps])?.remove(0);
        let root = h.sqrt();
        let d = ks_statistic(radii.values(), |r| maxwell_cdf(r / root))?;
        ks.push(report.stat(&format!("maxwell_ks_T{}", fmt_time(h)), d));
    }
    let decreasing = ks.windows(2).all(|w| w[1] < w[0]);
    report.check(11, "diffusive_ks_decreasing", format!("{:.4} > {:.4} > {:.4}", ks[0], ks[1], ks[2]), decreasing);
    report.check_at_most(11, "diffusive_ks_final", ks[2], 0.03);
    Ok(())
}

fn fmt_time(t: f64) -> String {
    if t.fract() == 0.0 {
        format!("{t:.0}")
    } else {
        format!("{t}")
    }
}

/// Radial CDF of the endpoint under the point-interaction Gibbs measure
/// started at radius `r0`, tabulated with cubic Hermite pieces.
struct EndpointCdf {
    spacing: f64,
    cdf: Vec<f64>,
    density: Vec<f64>,
}

impl EndpointCdf {
    fn new(gamma: f64, horizon: f64, r0: f64) -> Result<Self> {
        let plan = PathPlan::new(Coupling::from(gamma), horizon, &[horizon], SamplerConfig::default())?;
        let law = plan.step_law(0, r0)?;
        let mut reach = r0 + 12.0 * horizon.sqrt();
        if gamma > 0.0 {
            reach += gamma * horizon + 40.0 / gamma;
        }
        let spacing = 0.02;
        let nodes = (reach / spacing).ceil() as usize + 1;
        let q = Quadrature::new(1e-16, 1e-13);
        let mut cdf = Vec::with_capacity(nodes);
        let mut density = Vec::with_capacity(nodes);
        let mut acc = 0.0;
        for i in 0..nodes {
            let r = i as f64 * spacing;
            if i > 0 {
                acc += q.integrate(|x| law.density(x), r - spacing, r)?.value;
            }
            cdf.push(acc);
            density.push(law.density(r));
        }
        Ok(Self { spacing, cdf, density })
    }

    fn mass(&self) -> f64 {
        *self.cdf.last().unwrap()
    }

    fn at(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return 0.0;
        }
        let x = r / self.spacing;
        let i = x.floor() as usize;
        if i + 1 >= self.cdf.len() {
            return 1.0;
        }
        let s = x - i as f64;
        let h = self.spacing;
        let (f0, f1) = (self.cdf[i], self.cdf[i + 1]);
        let (d0, d1) = (self.density[i] * h, self.density[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let v =
            (2.0 * s3 - 3.0 * s2 + 1.0) * f0 + (s3 - 2.0 * s2 + s) * d0 + (-2.0 * s3 + 3.0 * s2) * f1 + (s3 - s2) * d1;
        v.clamp(0.0, 1.0)
    }
}

pub const WELL_RADII: [f64; 3] = [0.1, 0.05, 0.025];

fn smoothed_limit(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    refuse(cfg, false, true, false, false, false)?;
    let gamma = positive_gamma(cfg)?;
    let t = horizon(cfg, 4.0)?;
    let n = paths(cfg, 10_000)?;
    let refine = grid(cfg, 16)?;
    if refine < 4 {
        return Err(invalid("smoothed-limit needs grid >= 4 (step ε²/grid)".into()));
    }
    report.param("gamma", Value::Real(gamma));
    common_params(report, cfg, t, n, refine);

    let mut gaps = Vec::new();
    let mut repulsive_bound = 0usize;
    for &eps in &WELL_RADII {
        let pot = SmoothedPotential::new(eps, Coupling::from(gamma))?;
        let lambda = radial_ground_state(&pot)?
            .ok_or_else(|| invalid(format!("no bound state at ε = {eps}; is the well attractive?")))?;
        gaps.push(report.stat(&format!("ground_state_gap_eps{eps}"), (lambda - 0.5 * gamma * gamma).abs()));
        if radial_ground_state(&SmoothedPotential::new(eps, Coupling::from(-gamma))?)?.is_some() {
            repulsive_bound += 1;
        }
    }
    report.stat("repulsive_bound_states", repulsive_bound as f64);

    let r0 = 1.0;
    let limit = EndpointCdf::new(gamma, t, r0)?;
    report.stat("limit_table_mass_error", (limit.mass() - 1.0).abs());
    let start = SpatialPoint::on_axis(r0);
    let mut ks = Vec::new();
    for (j, &eps) in WELL_RADII.iter().enumerate() {
        let pot = SmoothedPotential::new(eps, Coupling::from(gamma))?;
        let fk = sample_feynman_kac_guided(
            &pot,
            t,
            &start,
            n,
            eps * eps / refine as f64,
            RngStream::new(cfg.seed, j as u64),
        )?;
        let radii: Vec<f64> = fk.endpoints.iter().map(|p| p.radius).collect();
        let d = weighted_ks_statistic(&radii, &fk.normalized_weights(), |r| limit.at(r))?;
        report.stat(&format!("fk_effective_size_eps{eps}"), fk.effective_size());
        ks.push(report.stat(&format!("fk_endpoint_ks_eps{eps}"), d));
    }

    let strictly_down = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    report.check(
        12,
        "ground_state_gap_decreasing",
        format!("{:.4e} > {:.4e} > {:.4e}", gaps[0], gaps[1], gaps[2]),
        strictly_down(&gaps),
    );
    report.check(
        12,
        "fk_endpoint_ks_decreasing",
        format!("{:.4} > {:.4} > {:.4}", ks[0], ks[1], ks[2]),
        strictly_down(&ks),
    );
    report.check(12, "no_repulsive_bound_state", format!("{repulsive_bound} bound states"), repulsive_bound == 0);
    Ok(())
}
