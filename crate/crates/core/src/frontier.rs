//! Bias–MAD frontier in the white noise model.
//!
//! For an estimator of `f(x₀)` whose worst-case bias over the Hölder ball
//! stays below `(C/n)^{β/(2β+1)}`, the worst-case mean absolute deviation is
//! at least `c·ψ_n` with `ψ_n = n^{−β/(2β+1)}` and
//!
//! ```text
//! c = (1/5)·exp(−(2/V)^{1/β}·C·‖K‖₂²)·C^{β/(2β+1)},     V = R/‖K‖_β.
//! ```
//!
//! The lower bound comes from lemma 2 applied to `P = P_{f_{±1}}`, `Q = P_0`
//! with `f_θ = θ·V·r_n^β·K((x − x₀)/r_n)`. The experiment here evaluates every
//! linear kernel estimator of a bandwidth grid on that three-member family and
//! checks the bound on the members; the reported suprema are family-sup
//! values, which lower-bound the suprema over the whole ball.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::InequalityReport;
use crate::error::{Error, Result};
use crate::gwn_sim::{
    exact_linear_risk, family_sup, mc_risk_many, EstimatorSpec, FamilyMember, FamilyRisk,
    PointEstimator, RiskEstimate, RiskRow, SimConfig, MIN_REPLICATES_FOR_SE,
};
use crate::holder::{
    build_family_member, bump_kernel, family_bandwidth, n_for_bandwidth, FamilySpec, KernelSpec,
};
use crate::numeric::ols_slope;

/// Compliance is `sup|bias| ≤ budget·(1 − COMPLIANCE_MARGIN)`.
pub const COMPLIANCE_MARGIN: f64 = 1e-9;
/// Standard errors allowed on the Monte Carlo path.
pub const MC_SE_MULTIPLIER: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierSpec {
    pub beta: f64,
    pub radius: f64,
    pub c_const: f64,
    pub x0: f64,
    pub kernel: KernelSpec,
    pub v: f64,
}

impl FrontierSpec {
    /// Uses the bump kernel for both the family and the estimators.
    pub fn new(beta: f64, radius: f64, c_const: f64, x0: f64) -> Result<Self> {
        if !(radius > 0.0 && c_const > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need R, C > 0 (R = {radius}, C = {c_const})"
            )));
        }
        if !(x0 > 0.0 && x0 < 1.0) {
            return Err(Error::InvalidArgument(format!("x0 = {x0} must lie in (0, 1)")));
        }
        let kernel = bump_kernel(beta)?;
        Ok(Self {
            beta,
            radius,
            c_const,
            x0,
            kernel,
            v: radius / kernel.holder_norm,
        })
    }

    /// `β/(2β+1)`.
    pub fn rate_exponent(&self) -> f64 {
        self.beta / (2.0 * self.beta + 1.0)
    }

    pub fn r_n(&self, n: f64) -> f64 {
        family_bandwidth(self.beta, self.v, self.c_const, n)
    }

    pub fn bias_budget(&self, n: f64) -> f64 {
        (self.c_const / n).powf(self.rate_exponent())
    }

    pub fn family(&self, n: f64, theta: f64) -> Result<FamilySpec> {
        FamilySpec::new(&self.kernel, self.radius, self.c_const, n, theta, self.x0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Constants {
    pub c: f64,
    /// Smallest `n` with `r_n ≤ min(x₀, 1 − x₀)`.
    pub n_min: f64,
    /// Smallest `n` with `r_n ≤ 1`, where the family enters the Hölder ball.
    pub n_min_holder: f64,
}

pub fn theorem1_constants(spec: &FrontierSpec) -> Theorem1Constants {
    let exponent = (2.0 / spec.v).powf(1.0 / spec.beta) * spec.c_const * spec.kernel.l2_norm_sq;
    Theorem1Constants {
        c: 0.2 * (-exponent).exp() * spec.c_const.powf(spec.rate_exponent()),
        n_min: n_for_bandwidth(spec.beta, spec.v, spec.c_const, spec.x0.min(1.0 - spec.x0)),
        n_min_holder: n_for_bandwidth(spec.beta, spec.v, spec.c_const, 1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub n: f64,
    pub psi_n: f64,
    pub bias_budget: f64,
    pub mad_lower: f64,
    pub r_n: f64,
    pub valid: bool,
}

pub fn mad_frontier(spec: &FrontierSpec, n_values: &[f64]) -> Result<Vec<FrontierPoint>> {
    let consts = theorem1_constants(spec);
    n_values
        .iter()
        .map(|&n| {
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::InvalidArgument(format!("n = {n} must be positive")));
            }
            let psi_n = n.powf(-spec.rate_exponent());
            Ok(FrontierPoint {
                n,
                psi_n,
                bias_budget: spec.bias_budget(n),
                mad_lower: consts.c * psi_n,
                r_n: spec.r_n(n),
                valid: n >= consts.n_min,
            })
        })
        .collect()
}

/// Lemma 2 with the white noise Hellinger distance:
/// `(1/5)·exp(−(n/4)‖f − g‖²)·|u − v| ≤ E_f|X − u| ∨ E_g|X − v|`.
pub fn check_gwn_lemma2(
    name: &str,
    dist_sq: f64,
    n: f64,
    u: f64,
    v: f64,
    mad_f_about_u: f64,
    mad_g_about_v: f64,
) -> InequalityReport {
    let lhs = 0.2 * (-0.25 * n * dist_sq).exp() * (u - v).abs();
    InequalityReport::new(name, lhs, mad_f_about_u.max(mad_g_about_v))
        .with("dist_sq", dist_sq)
        .with("n", n)
        .with("u", u)
        .with("v", v)
}

/// One bandwidth of the experiment at one `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorCell {
    pub estimator_id: String,
    /// Bandwidth in units of `n^{−1/(2β+1)}`.
    pub multiplier: f64,
    pub h: f64,
    pub exact: FamilyRisk,
    pub mc: Option<FamilyRisk>,
    pub compliant: bool,
    pub compliant_median: bool,
    /// `!compliant || sup MAD ≥ c·ψ_n` on the exact path.
    pub frontier_holds: bool,
    pub frontier_median_holds: bool,
    /// The same check on the Monte Carlo path, with `4·se` slack.
    pub frontier_holds_mc: Option<bool>,
    /// Lemma 2 instantiated with `P = P_{f_{+1}}` and `P = P_{f_{−1}}` against `Q = P_0`.
    pub lemma2_plus: InequalityReport,
    pub lemma2_minus: InequalityReport,
    /// Member picked by the sign of `E_0 f̂(x₀)`.
    pub adversarial_member: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub point: FrontierPoint,
    pub m: usize,
    pub replicates: usize,
    pub seed: u64,
    pub cells: Vec<EstimatorCell>,
    pub violations: Vec<String>,
}

impl ExperimentResult {
    /// Smallest family-sup MAD (mean-centered, exact path) among compliant estimators.
    pub fn best_compliant_mad(&self) -> Option<f64> {
        self.cells
            .iter()
            .filter(|c| c.compliant)
            .map(|c| c.exact.sup_mad_mean)
            .fold(None, |best, v| Some(best.map_or(v, |b: f64| b.min(v))))
    }

    pub fn rows(&self) -> Vec<RiskRow> {
        let mut rows = Vec::new();
        for cell in &self.cells {
            for family in std::iter::once(&cell.exact).chain(cell.mc.as_ref()) {
                for (label, risk) in &family.members {
                    rows.push(RiskRow {
                        estimator_id: cell.estimator_id.clone(),
                        f_id: label.clone(),
                        n: self.point.n,
                        h: cell.h,
                        risk: *risk,
                    });
                }
            }
        }
        rows
    }
}

pub const FAMILY_LABELS: [&str; 3] = ["f_minus1", "f_0", "f_plus1"];

/// `{f_{−1}, f_0, f_{+1}}` sampled on `m` cell centers.
pub fn build_family(spec: &FrontierSpec, n: f64, m: usize) -> Result<Vec<FamilyMember>> {
    [-1.0, 0.0, 1.0]
        .iter()
        .zip(FAMILY_LABELS)
        .map(|(&theta, label)| {
            Ok(FamilyMember {
                label: label.into(),
                f: build_family_member(&spec.family(n, theta)?, &spec.kernel, m)?,
            })
        })
        .collect()
}

fn risk_of<'a>(family: &'a FamilyRisk, label: &str) -> &'a RiskEstimate {
    &family
        .members
        .iter()
        .find(|(l, _)| l == label)
        .expect("family member present")
        .1
}

/// Evaluates every bandwidth multiplier at the noise level `cfg.n`.
///
/// Requires `r_n ≤ 1` so the family lies in the Hölder ball; `point.valid`
/// additionally records `n ≥ N`, where the bump support is inside `[0, 1]`.
/// The Monte Carlo path runs when `cfg.replicates ≥ 100`.
pub fn run_tradeoff_experiment(
    spec: &FrontierSpec,
    cfg: &SimConfig,
    multipliers: &[f64],
) -> Result<ExperimentResult> {
    if multipliers.is_empty() {
        return Err(Error::InvalidArgument("bandwidth grid is empty".into()));
    }
    let n = cfg.n;
    let point = mad_frontier(spec, &[n])?[0];
    if point.r_n > 1.0 {
        return Err(Error::BandwidthTooLarge {
            r_n: point.r_n,
            limit: 1.0,
            n_min: theorem1_constants(spec).n_min_holder,
        });
    }
    let family = build_family(spec, n, cfg.m)?;
    let plus_norm = family[2].f.l2_norm_sq();
    let minus_norm = family[0].f.l2_norm_sq();
    let unit = n.powf(-1.0 / (2.0 * spec.beta + 1.0));
    let estimators = multipliers
        .iter()
        .map(|&k| EstimatorSpec::linear_kernel(spec.x0, k * unit, &spec.kernel, cfg.m))
        .collect::<Result<Vec<_>>>()?;

    let run_mc = cfg.replicates >= MIN_REPLICATES_FOR_SE;
    let mc_by_member: Option<Vec<Vec<RiskEstimate>>> = run_mc.then(|| {
        let dyn_ests: Vec<&dyn PointEstimator> =
            estimators.iter().map(|e| e as &dyn PointEstimator).collect();
        family
            .iter()
            .map(|member| mc_risk_many(&dyn_ests, &member.f, cfg))
            .collect()
    });

    let threshold = point.bias_budget * (1.0 - COMPLIANCE_MARGIN);
    let mut violations = Vec::new();
    let mut cells = Vec::with_capacity(estimators.len());
    for (i, (est, &multiplier)) in estimators.iter().zip(multipliers).enumerate() {
        let exact = family_sup(
            family
                .iter()
                .map(|m| Ok((m.label.clone(), exact_linear_risk(est, &m.f, cfg)?)))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let mc = match &mc_by_member {
            Some(per_member) => Some(family_sup(
                family
                    .iter()
                    .zip(per_member)
                    .map(|(m, risks)| (m.label.clone(), risks[i]))
                    .collect(),
            )?),
            None => None,
        };

        let compliant = exact.sup_bias <= threshold;
        let compliant_median = exact.sup_median_bias <= threshold;
        let frontier_holds = !compliant || exact.sup_mad_mean >= point.mad_lower;
        let frontier_median_holds = !compliant_median || exact.sup_mad_median >= point.mad_lower;
        let frontier_holds_mc = mc.as_ref().map(|fam| {
            let sup_member = risk_of(fam, &fam.sup_mad_mean_member);
            !compliant
                || fam.sup_mad_mean + MC_SE_MULTIPLIER * sup_member.mad_mean.se >= point.mad_lower
        });

        let zero = risk_of(&exact, "f_0");
        let plus = risk_of(&exact, "f_plus1");
        let minus = risk_of(&exact, "f_minus1");
        let lemma2_plus = check_gwn_lemma2(
            "gwn_lemma2_plus",
            plus_norm,
            n,
            plus.mean.value,
            zero.mean.value,
            plus.mad_mean.value,
            zero.mad_mean.value,
        );
        let lemma2_minus = check_gwn_lemma2(
            "gwn_lemma2_minus",
            minus_norm,
            n,
            minus.mean.value,
            zero.mean.value,
            minus.mad_mean.value,
            zero.mad_mean.value,
        );
        let adversarial_member = if zero.mean.value < 0.0 { "f_plus1" } else { "f_minus1" };

        let id = est.id();
        if !frontier_holds {
            violations.push(format!("n={n} {id}: sup MAD below c·psi_n"));
        }
        if !frontier_median_holds {
            violations.push(format!("n={n} {id}: sup median-MAD below c·psi_n"));
        }
        if frontier_holds_mc == Some(false) {
            violations.push(format!("n={n} {id}: Monte Carlo sup MAD below c·psi_n"));
        }
        for r in [&lemma2_plus, &lemma2_minus] {
            if !r.holds {
                violations.push(format!("n={n} {id}: {} fails", r.name));
            }
        }
        cells.push(EstimatorCell {
            estimator_id: id,
            multiplier,
            h: est.h,
            exact,
            mc,
            compliant,
            compliant_median,
            frontier_holds,
            frontier_median_holds,
            frontier_holds_mc,
            lemma2_plus,
            lemma2_minus,
            adversarial_member: adversarial_member.into(),
        });
    }
    Ok(ExperimentResult {
        point,
        m: cfg.m,
        replicates: cfg.replicates,
        seed: cfg.seed,
        cells,
        violations,
    })
}

/// Runs the experiment at every `n`, cells in parallel and merged in `n` order.
pub fn run_sweep(
    spec: &FrontierSpec,
    n_values: &[f64],
    m: usize,
    replicates: usize,
    seed: u64,
    multipliers: &[f64],
) -> Result<Vec<ExperimentResult>> {
    n_values
        .par_iter()
        .map(|&n| run_tradeoff_experiment(spec, &SimConfig::new(n, m, replicates, seed)?, multipliers))
        .collect()
}

/// Log–log slope of the per-`n` best compliant family-sup MAD against `n`;
/// `None` when fewer than two `n` have a compliant estimator.
pub fn rate_slope(results: &[ExperimentResult]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = results
        .iter()
        .filter_map(|r| r.best_compliant_mad().map(|mad| (r.point.n.ln(), mad.ln())))
        .unzip();
    (x.len() >= 2).then(|| ols_slope(&x, &y))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaxCell {
    pub estimator_id: String,
    pub n: f64,
    pub sup_mad: f64,
    pub sup_bias: f64,
    pub sup_risk: f64,
    /// `sup risk − sup |bias|`.
    pub risk_minus_bias: f64,
    /// `sup |bias| − sup risk`.
    pub bias_minus_risk: f64,
    pub displays_hold: bool,
    pub compliant: bool,
    pub theorem_bound: f64,
    /// Both triangle-inequality displays fall below `c·ψ_n`.
    pub minimax_uninformative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaxReport {
    pub cells: Vec<MinimaxCell>,
    pub all_displays_hold: bool,
}

/// The two triangle-inequality lower bounds on the family-sup MAD obtained
/// from the worst-case absolute risk and bias, next to the frontier value.
pub fn minimax_comparison(results: &[ExperimentResult]) -> MinimaxReport {
    let mut cells = Vec::new();
    for r in results {
        for cell in &r.cells {
            let f = &cell.exact;
            let risk_minus_bias = f.sup_abs_risk - f.sup_bias;
            let bias_minus_risk = f.sup_bias - f.sup_abs_risk;
            let tol = 1e-12 * 1f64.max(f.sup_abs_risk);
            cells.push(MinimaxCell {
                estimator_id: cell.estimator_id.clone(),
                n: r.point.n,
                sup_mad: f.sup_mad_mean,
                sup_bias: f.sup_bias,
                sup_risk: f.sup_abs_risk,
                risk_minus_bias,
                bias_minus_risk,
                displays_hold: risk_minus_bias <= f.sup_mad_mean + tol
                    && bias_minus_risk <= f.sup_mad_mean + tol,
                compliant: cell.compliant,
                theorem_bound: r.point.mad_lower,
                minimax_uninformative: risk_minus_bias.max(bias_minus_risk) < r.point.mad_lower,
            });
        }
    }
    let all_displays_hold = cells.iter().all(|c| c.displays_hold);
    MinimaxReport { cells, all_displays_hold }
}
