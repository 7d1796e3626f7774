//! Goodness-of-fit statistics and mergeable sample summaries.

use crate::error::{DriverError, Result};

/// Sup-distance between the empirical CDF of `samples` and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(DriverError::Degenerate("KS needs at least two samples"));
    }
    let mut xs = samples.to_vec();
    sort(&mut xs)?;
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        // ties move the empirical CDF in one jump
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        d = d.max((f - i as f64 / n).abs()).max((f - (j + 1) as f64 / n).abs());
        i = j + 1;
    }
    Ok(d)
}

/// KS distance for a weighted sample; weights need not be normalised.
pub fn weighted_ks_statistic(samples: &[f64], weights: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.len() < 2 || samples.len() != weights.len() {
        return Err(DriverError::Degenerate("weighted KS needs two or more samples with one weight each"));
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(DriverError::Degenerate("weights must be finite and non-negative"));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(DriverError::Degenerate("weights sum to zero"));
    }
    let mut idx: Vec<usize> = (0..samples.len()).collect();
    if samples.iter().any(|x| x.is_nan()) {
        return Err(DriverError::Degenerate("NaN sample"));
    }
    idx.sort_by(|&a, &b| samples[a].total_cmp(&samples[b]));
    let mut below = 0.0;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let x = samples[idx[i]];
        let f = cdf(x);
        let mut mass = 0.0;
        while i < idx.len() && samples[idx[i]] == x {
            mass += weights[idx[i]];
            i += 1;
        }
        d = d.max((f - below / total).abs());
        below += mass;
        d = d.max((f - below / total).abs());
    }
    Ok(d)
}

/// Two-sample KS distance.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return Err(DriverError::Degenerate("KS needs at least two samples on each side"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    sort(&mut a)?;
    sort(&mut b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

fn sort(xs: &mut [f64]) -> Result<()> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(DriverError::Degenerate("NaN sample"));
    }
    xs.sort_by(f64::total_cmp);
    Ok(())
}

/// Count, mean, spread and range of a sample, mergeable across shards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: u64,
    pub mean: f64,
    /// Sum of squared deviations from the mean.
    pub m2: f64,
    pub min: f64,
    pub max: f64,
}

impl Default for Summary {
    fn default() -> Self {
        Self { count: 0, mean: 0.0, m2: 0.0, min: f64::INFINITY, max: f64::NEG_INFINITY }
    }
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        xs.iter().fold(Self::default(), |mut s, &x| {
            s.push(x);
            s
        })
    }

    pub fn push(&mut self, x: f64) {
        self.merge(&Self { count: 1, mean: x, m2: 0.0, min: x, max: x });
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}

/// Radii collected from independent replicas, merged in any order into
/// the same sorted sample.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RadialSample {
    values: Vec<f64>,
    sorted: bool,
}

impl RadialSample {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values, sorted: false }
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.values.extend(other.values);
        self.sorted = false;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&mut self) -> &[f64] {
        if !self.sorted {
            self.values.sort_by(f64::total_cmp);
            self.sorted = true;
        }
        &self.values
    }

    pub fn summary(&self) -> Summary {
        Summary::of(&self.values)
    }
}
