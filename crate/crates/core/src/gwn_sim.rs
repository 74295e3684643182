//! Discretized Gaussian white noise observations and pointwise risk.
//!
//! The model `dY = f(x) dx + n^{-1/2} dW` on `[0, 1]` is observed through
//! `m` bin averages `Ȳ_j ~ N(f̄_j, m/n)`, independent across bins, where `f̄_j`
//! is the average of `f` over `[j/m, (j+1)/m)`. Replicate `r` draws its noise
//! from RNG stream `(seed, r)` only, so results do not depend on scheduling.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holder::{grid_point, GridFunction, KernelSpec};
use crate::instance::stream_rng;
use crate::numeric::{compensated_sum, fmt17, folded_normal_mean, median};

/// Number of batches behind every Monte Carlo standard error.
pub const BATCHES: usize = 20;
/// Fewer replicates than this leave standard errors as NaN.
pub const MIN_REPLICATES_FOR_SE: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: f64,
    pub m: usize,
    pub replicates: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(n: f64, m: usize, replicates: usize, seed: u64) -> Result<Self> {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidArgument(format!("noise level n = {n} must be positive")));
        }
        if m < 2 {
            return Err(Error::InvalidArgument(format!("need m >= 2 bins, got {m}")));
        }
        if replicates < 1 {
            return Err(Error::InvalidArgument("need at least one replicate".into()));
        }
        Ok(Self { n, m, replicates, seed })
    }

    /// Per-bin noise variance `m/n`.
    pub fn bin_variance(&self) -> f64 {
        self.m as f64 / self.n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub bin_means: Vec<f64>,
}

/// Replicate `replicate` of the bin-mean observation given exact bin averages.
pub fn observe(bin_averages: &[f64], cfg: &SimConfig, replicate: u64) -> Observation {
    let mut rng = stream_rng(cfg.seed, replicate);
    let sd = cfg.bin_variance().sqrt();
    Observation {
        bin_means: bin_averages
            .iter()
            .map(|mu| {
                let z: f64 = rng.sample(StandardNormal);
                mu + sd * z
            })
            .collect(),
    }
}

/// Replicates `0..cfg.replicates` of the observation of `f` (resampled to
/// `cfg.m` bins).
pub fn simulate<'a>(f: &GridFunction, cfg: &'a SimConfig) -> impl Iterator<Item = Observation> + 'a {
    let averages = f.bin_averages(cfg.m);
    (0..cfg.replicates as u64).map(move |r| observe(&averages, cfg, r))
}

/// Any map from an observation to an estimate of `f(x₀)`.
pub trait PointEstimator: Sync {
    fn id(&self) -> String;
    fn x0(&self) -> f64;
    fn estimate(&self, obs: &Observation) -> f64;
    /// The weight representation, for estimators that are linear in `Ȳ`.
    fn as_linear(&self) -> Option<&EstimatorSpec> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    LinearKernel,
    Custom,
}

/// Linear estimator `Σ_j w_j Ȳ_j` with weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    pub x0: f64,
    pub h: f64,
    pub kernel: Option<KernelSpec>,
    pub weights: Vec<f64>,
}

fn normalize_weights(raw: Vec<f64>) -> Result<Vec<f64>> {
    let total = compensated_sum(raw.iter().copied());
    if total == 0.0 || !total.is_finite() {
        return Err(Error::InvalidArgument(
            "estimator weights vanish on every bin".into(),
        ));
    }
    Ok(raw.into_iter().map(|w| w / total).collect())
}

impl EstimatorSpec {
    /// Weights `w_j ∝ K((x_j − x₀)/h)` on the `m` bin centers.
    pub fn linear_kernel(x0: f64, h: f64, kernel: &KernelSpec, m: usize) -> Result<Self> {
        if !(h >= 1.0 / m as f64) {
            return Err(Error::InvalidArgument(format!(
                "bandwidth h = {h} is below one bin (1/m = {})",
                1.0 / m as f64
            )));
        }
        let raw = (0..m).map(|j| kernel.value((grid_point(j, m) - x0) / h)).collect();
        Ok(Self {
            kind: EstimatorKind::LinearKernel,
            x0,
            h,
            kernel: Some(*kernel),
            weights: normalize_weights(raw)?,
        })
    }

    /// Arbitrary weights, normalized to sum to one.
    pub fn custom(x0: f64, weights: Vec<f64>) -> Result<Self> {
        Ok(Self {
            kind: EstimatorKind::Custom,
            x0,
            h: f64::NAN,
            kernel: None,
            weights: normalize_weights(weights)?,
        })
    }

    pub fn sum_sq_weights(&self) -> f64 {
        compensated_sum(self.weights.iter().map(|w| w * w))
    }
}

impl PointEstimator for EstimatorSpec {
    fn id(&self) -> String {
        match self.kind {
            EstimatorKind::LinearKernel => format!("kernel_h{}", fmt17(self.h)),
            EstimatorKind::Custom => "custom_linear".into(),
        }
    }

    fn x0(&self) -> f64 {
        self.x0
    }

    fn estimate(&self, obs: &Observation) -> f64 {
        compensated_sum(self.weights.iter().zip(&obs.bin_means).map(|(w, y)| w * y))
    }

    fn as_linear(&self) -> Option<&EstimatorSpec> {
        Some(self)
    }
}

pub fn linear_estimate(obs: &Observation, est: &EstimatorSpec) -> Result<f64> {
    if obs.bin_means.len() != est.weights.len() {
        return Err(Error::LengthMismatch(est.weights.len(), obs.bin_means.len()));
    }
    Ok(est.estimate(obs))
}

/// Median of the bin means whose centers lie within `h` of `x₀`: a nonlinear
/// estimator for which mean and median centerings differ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalMedian {
    pub x0: f64,
    pub h: f64,
    bins: Vec<usize>,
}

impl LocalMedian {
    pub fn new(x0: f64, h: f64, m: usize) -> Result<Self> {
        let bins: Vec<usize> = (0..m).filter(|&j| (grid_point(j, m) - x0).abs() < h).collect();
        if bins.is_empty() {
            return Err(Error::InvalidArgument(format!("window of half-width {h} holds no bin")));
        }
        Ok(Self { x0, h, bins })
    }
}

impl PointEstimator for LocalMedian {
    fn id(&self) -> String {
        format!("local_median_h{}", fmt17(self.h))
    }

    fn x0(&self) -> f64 {
        self.x0
    }

    fn estimate(&self, obs: &Observation) -> f64 {
        let vals: Vec<f64> = self.bins.iter().map(|&j| obs.bin_means[j]).collect();
        median(&vals)
    }
}

/// Ignores the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimator {
    pub x0: f64,
    pub value: f64,
}

impl PointEstimator for ConstantEstimator {
    fn id(&self) -> String {
        format!("constant_{}", fmt17(self.value))
    }

    fn x0(&self) -> f64 {
        self.x0
    }

    fn estimate(&self, _obs: &Observation) -> f64 {
        self.value
    }
}

/// Point value with a standard error (zero on the exact path, NaN when too
/// few replicates were drawn).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, se: 0.0 }
    }

    /// `|value − target| ≤ k·se`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.se
    }
}

/// Bias is stored as `E[f̂(x₀)] − f(x₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub mean: Estimate,
    pub bias: Estimate,
    /// `Med[f̂(x₀)] − f(x₀)`.
    pub median_bias: Estimate,
    /// `E|f̂ − E f̂|`.
    pub mad_mean: Estimate,
    /// `E|f̂ − Med f̂|`.
    pub mad_median: Estimate,
    pub variance: Estimate,
    /// `mad_mean / √variance`.
    pub mad_to_sd: Estimate,
    /// `E|f̂ − f(x₀)|`.
    pub abs_risk: Estimate,
    pub exact: bool,
    pub replicates: usize,
}

/// Exact risk of a linear estimator: `f̂(x₀) ~ N(Σ w_j f̄_j, (m/n) Σ w_j²)`, so
/// the mean and median coincide and both MADs equal `√(2/π)·sd`.
pub fn exact_linear_risk(
    est: &dyn PointEstimator,
    f: &GridFunction,
    cfg: &SimConfig,
) -> Result<RiskEstimate> {
    let lin = est
        .as_linear()
        .ok_or_else(|| Error::Unsupported(format!("exact risk of nonlinear estimator {}", est.id())))?;
    if lin.weights.len() != cfg.m {
        return Err(Error::LengthMismatch(cfg.m, lin.weights.len()));
    }
    let averages = f.bin_averages(cfg.m);
    let mean = compensated_sum(lin.weights.iter().zip(&averages).map(|(w, a)| w * a));
    let truth = f.value(lin.x0);
    let variance = cfg.bin_variance() * lin.sum_sq_weights();
    let sd = variance.sqrt();
    let mad = (2.0 / std::f64::consts::PI).sqrt() * sd;
    let bias = mean - truth;
    Ok(RiskEstimate {
        mean: Estimate::exact(mean),
        bias: Estimate::exact(bias),
        median_bias: Estimate::exact(bias),
        mad_mean: Estimate::exact(mad),
        mad_median: Estimate::exact(mad),
        variance: Estimate::exact(variance),
        mad_to_sd: Estimate::exact((2.0 / std::f64::consts::PI).sqrt()),
        abs_risk: Estimate::exact(folded_normal_mean(bias, sd)),
        exact: true,
        replicates: 0,
    })
}

struct SampleStats {
    mean: f64,
    median: f64,
    mad_mean: f64,
    mad_median: f64,
    variance: f64,
    abs_risk: f64,
}

fn sample_stats(xs: &[f64], truth: f64) -> SampleStats {
    let k = xs.len() as f64;
    let mean = compensated_sum(xs.iter().copied()) / k;
    let med = median(xs);
    let variance = if xs.len() > 1 {
        compensated_sum(xs.iter().map(|x| (x - mean) * (x - mean))) / (k - 1.0)
    } else {
        0.0
    };
    SampleStats {
        mean,
        median: med,
        mad_mean: compensated_sum(xs.iter().map(|x| (x - mean).abs())) / k,
        mad_median: compensated_sum(xs.iter().map(|x| (x - med).abs())) / k,
        variance,
        abs_risk: compensated_sum(xs.iter().map(|x| (x - truth).abs())) / k,
    }
}

fn batch_se(values: &[f64]) -> f64 {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
    (var / k).sqrt()
}

fn ratio(mad: f64, variance: f64) -> f64 {
    if variance > 0.0 {
        mad / variance.sqrt()
    } else {
        0.0
    }
}

/// Summary of Monte Carlo draws `xs` of an estimator of `truth`, with
/// 20-batch-means standard errors.
pub fn summarize_draws(xs: &[f64], truth: f64) -> RiskEstimate {
    let full = sample_stats(xs, truth);
    let se = |stat: &dyn Fn(&SampleStats) -> f64| -> f64 {
        if xs.len() < MIN_REPLICATES_FOR_SE {
            return f64::NAN;
        }
        let size = xs.len() / BATCHES;
        let per_batch: Vec<f64> = (0..BATCHES)
            .map(|b| stat(&sample_stats(&xs[b * size..(b + 1) * size], truth)))
            .collect();
        batch_se(&per_batch)
    };
    let est = |value: f64, stat: &dyn Fn(&SampleStats) -> f64| Estimate { value, se: se(stat) };
    RiskEstimate {
        mean: est(full.mean, &|s| s.mean),
        bias: est(full.mean - truth, &|s| s.mean),
        median_bias: est(full.median - truth, &|s| s.median),
        mad_mean: est(full.mad_mean, &|s| s.mad_mean),
        mad_median: est(full.mad_median, &|s| s.mad_median),
        variance: est(full.variance, &|s| s.variance),
        mad_to_sd: est(ratio(full.mad_mean, full.variance), &|s| ratio(s.mad_mean, s.variance)),
        abs_risk: est(full.abs_risk, &|s| s.abs_risk),
        exact: false,
        replicates: xs.len(),
    }
}

/// Monte Carlo risk of several estimators on shared replicates.
pub fn mc_risk_many(
    estimators: &[&dyn PointEstimator],
    f: &GridFunction,
    cfg: &SimConfig,
) -> Vec<RiskEstimate> {
    let averages = f.bin_averages(cfg.m);
    let draws: Vec<Vec<f64>> = (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let obs = observe(&averages, cfg, r);
            estimators.iter().map(|e| e.estimate(&obs)).collect()
        })
        .collect();
    estimators
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let xs: Vec<f64> = draws.iter().map(|row| row[i]).collect();
            summarize_draws(&xs, f.value(e.x0()))
        })
        .collect()
}

pub fn mc_risk(est: &dyn PointEstimator, f: &GridFunction, cfg: &SimConfig) -> RiskEstimate {
    mc_risk_many(&[est], f, cfg).pop().expect("one estimator in, one risk out")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RiskPath {
    Exact,
    MonteCarlo,
}

/// A labeled regression function of a finite family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub label: String,
    pub f: GridFunction,
}

/// Family-sup values (over the members supplied, not the whole Hölder ball).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRisk {
    pub members: Vec<(String, RiskEstimate)>,
    pub sup_bias: f64,
    pub sup_bias_member: String,
    pub sup_median_bias: f64,
    pub sup_mad_mean: f64,
    pub sup_mad_mean_member: String,
    pub sup_mad_median: f64,
    pub sup_mad_median_member: String,
    pub sup_abs_risk: f64,
}

fn argmax<'a>(values: impl Iterator<Item = (&'a str, f64)>) -> (String, f64) {
    let mut best = (String::new(), f64::NEG_INFINITY);
    for (label, v) in values {
        if v > best.1 {
            best = (label.to_string(), v);
        }
    }
    best
}

/// Combines per-member risks into family-sup values.
pub fn family_sup(members: Vec<(String, RiskEstimate)>) -> Result<FamilyRisk> {
    if members.is_empty() {
        return Err(Error::InvalidArgument("family is empty".into()));
    }
    let pick = |g: fn(&RiskEstimate) -> f64| argmax(members.iter().map(|(l, r)| (l.as_str(), g(r))));
    let (sup_bias_member, sup_bias) = pick(|r| r.bias.value.abs());
    let (_, sup_median_bias) = pick(|r| r.median_bias.value.abs());
    let (sup_mad_mean_member, sup_mad_mean) = pick(|r| r.mad_mean.value);
    let (sup_mad_median_member, sup_mad_median) = pick(|r| r.mad_median.value);
    let (_, sup_abs_risk) = pick(|r| r.abs_risk.value);
    Ok(FamilyRisk {
        members,
        sup_bias,
        sup_bias_member,
        sup_median_bias,
        sup_mad_mean,
        sup_mad_mean_member,
        sup_mad_median,
        sup_mad_median_member,
        sup_abs_risk,
    })
}

pub fn worst_case_over_family(
    est: &dyn PointEstimator,
    family: &[FamilyMember],
    cfg: &SimConfig,
    path: RiskPath,
) -> Result<FamilyRisk> {
    let members = family
        .iter()
        .map(|m| {
            let r = match path {
                RiskPath::Exact => exact_linear_risk(est, &m.f, cfg)?,
                RiskPath::MonteCarlo => mc_risk(est, &m.f, cfg),
            };
            Ok((m.label.clone(), r))
        })
        .collect::<Result<Vec<_>>>()?;
    family_sup(members)
}

/// One CSV row: estimator id, f id, n, h, then each quantity with its se.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskRow {
    pub estimator_id: String,
    pub f_id: String,
    pub n: f64,
    pub h: f64,
    pub risk: RiskEstimate,
}

impl RiskRow {
    pub const CSV_HEADER: &'static str =
        "estimator_id,f_id,n,h,bias,bias_se,mad_mean,mad_mean_se,mad_median,mad_median_se,variance,variance_se";

    pub fn to_csv(&self) -> String {
        let r = &self.risk;
        [
            self.estimator_id.clone(),
            self.f_id.clone(),
            fmt17(self.n),
            fmt17(self.h),
            fmt17(r.bias.value),
            fmt17(r.bias.se),
            fmt17(r.mad_mean.value),
            fmt17(r.mad_mean.se),
            fmt17(r.mad_median.value),
            fmt17(r.mad_median.se),
            fmt17(r.variance.value),
            fmt17(r.variance.se),
        ]
        .join(",")
    }
}
