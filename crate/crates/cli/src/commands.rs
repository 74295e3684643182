//! Subcommand bodies. Each returns its report and the number of violations;
//! files are written through [`OutDir`].

use std::path::Path;

use anyhow::{bail, Result};
use madbound::bounds::{
    check_cauchy_schwarz_step, check_lemma1_variance, check_lemma2, check_lemma2_chain,
    check_lemma3_first, check_quadratic_chain, check_special_case_means, lemma2_chain_quantities,
    InequalityReport,
};
use madbound::frontier::{
    mad_frontier, minimax_comparison, rate_slope, run_sweep, theorem1_constants, ExperimentResult,
    FrontierPoint, FrontierSpec, MinimaxReport, Theorem1Constants, FAMILY_LABELS,
};
use madbound::gwn_sim::{
    exact_linear_risk, mc_risk_many, ConstantEstimator, EstimatorSpec, LocalMedian,
    PointEstimator, RiskRow, SimConfig, MIN_REPLICATES_FOR_SE,
};
use madbound::instance::{random_instance, random_rao_blackwell_instance, stream_rng};
use madbound::numeric::fmt17;
use madbound::witness::{
    rao_blackwell_check, tightness_search, tightness_witness, RaoBlackwellReport, SearchConfig,
    SearchOutcome, WitnessReport,
};
use madbound::{DiscreteMeasure, FiniteRV};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, ModelParams, RunConfig};
use crate::output::{bool_cell, render_table, report_csv_row, Meta, OutDir, REPORT_CSV_HEADER};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub violations: usize,
    pub files: Vec<std::path::PathBuf>,
}

pub fn dispatch(name: &str, cfg: &RunConfig) -> Result<Outcome> {
    let meta = Meta::new(cfg.hash_for(name), cfg.seed);
    let mut out = OutDir::create(Path::new(&cfg.out), meta)?;
    out.write_raw(&format!("{name}.config.toml"), &cfg.to_toml())?;
    let violations = match name {
        "check-inequalities" => check_inequalities(cfg, &mut out)?,
        "tightness-search" => search(cfg, &mut out)?,
        "rao-blackwell" => rao_blackwell(cfg, &mut out)?,
        "gwn-experiment" => gwn_experiment(cfg, &mut out)?,
        "frontier" => frontier(cfg, &mut out)?,
        "kernel-constants" => kernel_constants(cfg, &mut out)?,
        other => bail!("unknown subcommand `{other}`"),
    };
    Ok(Outcome {
        violations,
        files: out.written,
    })
}

/// Aggregate of one named check over many instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub evaluated: usize,
    pub violations: usize,
    /// Instances where the check holds trivially (zero left side by convention).
    pub vacuous: usize,
    /// Report with the smallest relative slack.
    pub worst: Option<InequalityReport>,
    pub worst_trial: Option<usize>,
}

/// Ordering key for the worst case: degenerate `0 ≤ 0` reports rank last.
fn worst_key(r: &InequalityReport) -> (bool, f64) {
    let degenerate = r.lhs == 0.0 && r.rhs == 0.0;
    (degenerate, r.slack / 1f64.max(r.lhs.abs()).max(r.rhs.abs()))
}

fn summarize(name: &str, results: impl Iterator<Item = (usize, InequalityReport, bool)>) -> CheckSummary {
    let mut s = CheckSummary {
        name: name.into(),
        evaluated: 0,
        violations: 0,
        vacuous: 0,
        worst: None,
        worst_trial: None,
    };
    for (trial, report, vacuous) in results {
        s.evaluated += 1;
        s.vacuous += usize::from(vacuous);
        s.violations += usize::from(!report.holds);
        let better = s
            .worst
            .as_ref()
            .is_none_or(|w| worst_key(&report).partial_cmp(&worst_key(w)) == Some(std::cmp::Ordering::Less));
        if better {
            s.worst = Some(report);
            s.worst_trial = Some(trial);
        }
    }
    s
}

fn summary_csv_rows(checks: &[CheckSummary]) -> Vec<String> {
    checks
        .iter()
        .filter_map(|c| {
            c.worst.as_ref().map(|w| {
                format!(
                    "{},{},{},{}",
                    report_csv_row(w).replacen(&w.name, &c.name, 1),
                    c.evaluated,
                    c.violations,
                    c.vacuous
                )
            })
        })
        .collect()
}

fn print_summary_table(checks: &[CheckSummary]) {
    let worst: Vec<InequalityReport> = checks
        .iter()
        .filter_map(|c| {
            c.worst.clone().map(|mut w| {
                w.name = c.name.clone();
                w.holds = c.violations == 0;
                w
            })
        })
        .collect();
    print!("{}", render_table(&worst.iter().collect::<Vec<_>>()));
}

/// Maximum MAD of the witness against its literal or doubled bound.
pub fn witness_report_as_inequality(w: &WitnessReport, adjusted: bool) -> InequalityReport {
    let (name, key) = if adjusted {
        ("lemma3_second_adjusted", "adjusted_bound")
    } else {
        ("lemma3_second_literal", "literal_bound")
    };
    if w.vacuous {
        return InequalityReport::new(name, 0.0, 0.0);
    }
    let worst = w.details["mad_p"].max(w.details["mad_q"]);
    let mut r = InequalityReport::new(name, worst, w.details[key])
        .with("p_j_star", w.details["p_j_star"])
        .with("q_j_star", w.details["q_j_star"])
        .with("lr_max_norm", w.details["lr_max_norm"]);
    r.holds = if adjusted { w.adjusted_bound_holds } else { w.literal_bound_holds };
    r
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiteralCase {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub max_mad: f64,
    pub literal_bound: f64,
    pub adjusted_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiteralReport {
    pub pinned: LiteralCase,
    pub pinned_literal_holds: bool,
    pub grid_points: usize,
    pub literal_failures: usize,
    pub adjusted_failures: usize,
    /// First grid failures of the literal bound, in grid order.
    pub counterexamples: Vec<LiteralCase>,
}

const MAX_LISTED_COUNTEREXAMPLES: usize = 20;

fn two_point(p: f64) -> DiscreteMeasure {
    DiscreteMeasure::from_probs(vec![p, 1.0 - p]).expect("two-point measure")
}

fn literal_case(p: &DiscreteMeasure, q: &DiscreteMeasure) -> Result<(LiteralCase, WitnessReport)> {
    let w = tightness_witness(p, q)?;
    let get = |k: &str| w.details.get(k).copied().unwrap_or(0.0);
    Ok((
        LiteralCase {
            p: p.probs().to_vec(),
            q: q.probs().to_vec(),
            max_mad: get("mad_p").max(get("mad_q")),
            literal_bound: get("literal_bound"),
            adjusted_bound: get("adjusted_bound"),
        },
        w,
    ))
}

/// Literal and doubled second bound of lemma 3: the pinned pair plus the
/// two-point grid `p, q ∈ {0.01, …, 0.99}`.
pub fn lemma3_literal_report() -> Result<LiteralReport> {
    let p = DiscreteMeasure::from_probs(vec![0.7, 0.3])?;
    let q = DiscreteMeasure::from_probs(vec![0.6, 0.4])?;
    let (pinned, pinned_w) = literal_case(&p, &q)?;
    let mut report = LiteralReport {
        pinned,
        pinned_literal_holds: pinned_w.literal_bound_holds,
        grid_points: 0,
        literal_failures: 0,
        adjusted_failures: 0,
        counterexamples: Vec::new(),
    };
    for i in 1..=99 {
        for j in 1..=99 {
            let (case, w) = literal_case(&two_point(i as f64 / 100.0), &two_point(j as f64 / 100.0))?;
            report.grid_points += 1;
            if !w.adjusted_bound_holds {
                report.adjusted_failures += 1;
            }
            if !w.literal_bound_holds {
                report.literal_failures += 1;
                if report.counterexamples.len() < MAX_LISTED_COUNTEREXAMPLES {
                    report.counterexamples.push(case);
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckInequalitiesReport {
    pub trials: usize,
    pub max_space: usize,
    pub checks: Vec<CheckSummary>,
    pub lemma3_literal: Option<LiteralReport>,
    pub violations: usize,
}

const SUITE_CHECKS: [&str; 10] = [
    "lemma2",
    "cauchy_schwarz_step",
    "lemma2_chain_premise",
    "quadratic_root_bound",
    "sqrt_lower_bound",
    "lemma2_means",
    "lemma1_variance",
    "lemma3_first",
    "lemma3_second_adjusted",
    "lemma3_second_literal",
];

/// Every check on the instance of stream `trial`; the flag marks vacuous holds.
pub fn trial_reports(
    seed: u64,
    trial: usize,
    max_space: usize,
    with_literal: bool,
) -> Result<Vec<(InequalityReport, bool)>> {
    let mut rng = stream_rng(seed, trial as u64);
    let size = rng.random_range(2..=max_space);
    let full = rng.random_bool(0.75);
    let inst = random_instance(&mut rng, size, full);
    let (p, q, x, u, v) = (&inst.p, &inst.q, &inst.x, inst.u, inst.v);
    let chain = lemma2_chain_quantities(p, q, x, u, v)?;
    let (root, sqrt) = check_quadratic_chain(chain.a, chain.b, chain.d)?;
    let root_vacuous = root.context["premise"] == 0.0;
    let lemma1 = check_lemma1_variance(p, q, x)?;
    let lemma1_vacuous = lemma1.context["H2"] == 0.0;
    let lemma3 = check_lemma3_first(p, q, x)?;
    let norm = lemma3.context["lr_min_norm"];
    let lemma3_vacuous = norm == 0.0 || norm.is_infinite();
    let witness = tightness_witness(p, q)?;
    let mut out = vec![
        (check_lemma2(p, q, x, u, v)?, false),
        (check_cauchy_schwarz_step(p, q, x, u, v)?, false),
        (check_lemma2_chain(p, q, x, u, v)?, false),
        (root, root_vacuous),
        (sqrt, false),
        (check_special_case_means(p, q, x)?, false),
        (lemma1, lemma1_vacuous),
        (lemma3, lemma3_vacuous),
        (witness_report_as_inequality(&witness, true), witness.vacuous),
    ];
    if with_literal {
        out.push((witness_report_as_inequality(&witness, false), witness.vacuous));
    }
    Ok(out)
}

pub fn run_check_inequalities(
    seed: u64,
    trials: usize,
    max_space: usize,
    d_grid: usize,
    with_literal: bool,
) -> Result<CheckInequalitiesReport> {
    if max_space < 2 {
        bail!("max_space must be at least 2, got {max_space}");
    }
    if d_grid < 2 {
        bail!("d_grid must be at least 2, got {d_grid}");
    }
    let per_trial: Vec<Vec<(InequalityReport, bool)>> = (0..trials)
        .into_par_iter()
        .map(|t| trial_reports(seed, t, max_space, with_literal))
        .collect::<Result<_>>()?;
    let names = if with_literal { &SUITE_CHECKS[..] } else { &SUITE_CHECKS[..9] };
    let mut checks: Vec<CheckSummary> = names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            summarize(
                name,
                per_trial
                    .iter()
                    .enumerate()
                    .map(|(t, reports)| (t, reports[k].0.clone(), reports[k].1)),
            )
        })
        .collect();
    let grid = (0..d_grid)
        .map(|i| {
            let d = i as f64 / (d_grid - 1) as f64;
            check_quadratic_chain(0.0, 0.0, d).map(|(_, r)| (i, r, false))
        })
        .collect::<madbound::Result<Vec<_>>>()?;
    checks.push(summarize("sqrt_lower_bound_grid", grid.into_iter()));

    let lemma3_literal = if with_literal { Some(lemma3_literal_report()?) } else { None };
    let violations = checks.iter().map(|c| c.violations).sum::<usize>()
        + lemma3_literal
            .as_ref()
            .map_or(0, |l| usize::from(!l.pinned_literal_holds) + l.literal_failures + l.adjusted_failures);
    Ok(CheckInequalitiesReport {
        trials,
        max_space,
        checks,
        lemma3_literal,
        violations,
    })
}

fn check_inequalities(cfg: &RunConfig, out: &mut OutDir) -> Result<usize> {
    let s = &cfg.check_inequalities;
    let report =
        run_check_inequalities(cfg.seed, s.trials, s.max_space, s.d_grid, s.include_lemma3_literal)?;
    print_summary_table(&report.checks);
    if let Some(l) = &report.lemma3_literal {
        println!(
            "lemma3 literal bound: pinned P=(0.7,0.3) Q=(0.6,0.4) max MAD {} vs bound {} ({}); \
             grid failures literal {} / adjusted {} of {}",
            fmt17(l.pinned.max_mad),
            fmt17(l.pinned.literal_bound),
            if l.pinned_literal_holds { "holds" } else { "fails" },
            l.literal_failures,
            l.adjusted_failures,
            l.grid_points
        );
    }
    match cfg.format {
        Format::Json => out.write_json("check-inequalities.json", &report)?,
        Format::Csv => out.write_csv(
            "check-inequalities.csv",
            &format!("{REPORT_CSV_HEADER},evaluated,violations,vacuous"),
            &summary_csv_rows(&report.checks),
        )?,
    }
    Ok(report.violations)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub config: SearchConfig,
    pub outcome: SearchOutcome,
    /// Lemma 2 at the best instance.
    pub check: InequalityReport,
}

pub fn run_search(cfg: &RunConfig) -> Result<SearchReport> {
    let s = &cfg.tightness_search;
    let mut sc = SearchConfig::new(s.space_size, s.iterations, cfg.seed);
    sc.restarts = s.restarts;
    let outcome = tightness_search(&sc)?;
    let b = &outcome.best;
    let check = check_lemma2(&b.p, &b.q, &b.x, b.u, b.v)?;
    Ok(SearchReport {
        config: sc,
        outcome,
        check,
    })
}

fn search(cfg: &RunConfig, out: &mut OutDir) -> Result<usize> {
    let report = run_search(cfg)?;
    let o = &report.outcome;
    println!(
        "best ratio {} (H2 {}, restart {}, {} evaluations)",
        fmt17(o.best_ratio),
        fmt17(o.best_h2),
        o.best_restart,
        o.evaluations
    );
    println!("P = {:?}", o.best.p.probs());
    println!("Q = {:?}", o.best.q.probs());
    println!("X = {:?}, u = {}, v = {}", o.best.x.values(), o.best.u, o.best.v);
    print!("{}", render_table(&[&report.check]));
    match cfg.format {
        Format::Json => out.write_json("tightness-search.json", &report)?,
        Format::Csv => {
            let rows: Vec<String> = o
                .trace
                .iter()
                .map(|t| format!("{},{},{}", t.restart, t.iteration, fmt17(t.ratio)))
                .collect();
            out.write_csv("tightness-search.csv", "restart,iteration,ratio", &rows)?;
        }
    }
    Ok(usize::from(!report.check.holds))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaoBlackwellSuite {
    pub trials: usize,
    pub rejected: usize,
    pub mean_failures: usize,
    pub mad_failures: usize,
    pub max_mean_drift: f64,
    /// Largest MAD increase (negative when every MAD decreased).
    pub max_mad_increase: f64,
    pub pinned: RaoBlackwellReport,
    pub violations: usize,
}

/// `X = (1, 2, 3)`, `A = {1, 3}`, `P` uniform, `Q = (1/4, 1/2, 1/4)`.
pub fn pinned_rao_blackwell() -> Result<RaoBlackwellReport> {
    let p = DiscreteMeasure::uniform(3)?;
    let q = DiscreteMeasure::from_probs(vec![0.25, 0.5, 0.25])?;
    let x = FiniteRV::new(vec![1.0, 2.0, 3.0]);
    Ok(rao_blackwell_check(&x, &[0, 2], &p, &q)?)
}

pub fn run_rao_blackwell(seed: u64, trials: usize, max_space: usize) -> Result<RaoBlackwellSuite> {
    if max_space < 2 {
        bail!("max_space must be at least 2, got {max_space}");
    }
    let results: Vec<Option<RaoBlackwellReport>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64);
            let size = rng.random_range(2..=max_space);
            let (inst, subset) = random_rao_blackwell_instance(&mut rng, size);
            rao_blackwell_check(&inst.x, &subset, &inst.p, &inst.q).ok()
        })
        .collect();
    let pinned = pinned_rao_blackwell()?;
    let mut suite = RaoBlackwellSuite {
        trials,
        rejected: 0,
        mean_failures: 0,
        mad_failures: 0,
        max_mean_drift: 0.0,
        max_mad_increase: f64::NEG_INFINITY,
        pinned,
        violations: 0,
    };
    for r in &results {
        let Some(r) = r else {
            suite.rejected += 1;
            continue;
        };
        suite.mean_failures += usize::from(!r.means_preserved);
        suite.mad_failures += usize::from(!r.mads_nonincreasing);
        let drift = (r.mean_p[0] - r.mean_p[1]).abs().max((r.mean_q[0] - r.mean_q[1]).abs());
        suite.max_mean_drift = suite.max_mean_drift.max(drift);
        let increase = (r.mad_p[1] - r.mad_p[0]).max(r.mad_q[1] - r.mad_q[0]);
        suite.max_mad_increase = suite.max_mad_increase.max(increase);
    }
    let pinned_ok = suite.pinned.means_preserved
        && suite.pinned.mads_nonincreasing
        && suite.pinned.mad_p[1] < suite.pinned.mad_p[0];
    suite.violations = suite.mean_failures + suite.mad_failures + usize::from(!pinned_ok);
    Ok(suite)
}

fn rao_blackwell(cfg: &RunConfig, out: &mut OutDir) -> Result<usize> {
    let s = &cfg.rao_blackwell;
    let suite = run_rao_blackwell(cfg.seed, s.trials, s.max_space)?;
    println!(
        "{} trials, {} rejected, {} mean failures, {} MAD failures, max mean drift {}",
        suite.trials, suite.rejected, suite.mean_failures, suite.mad_failures, suite.max_mean_drift
    );
    println!(
        "pinned: MAD under P {} -> {}",
        fmt17(suite.pinned.mad_p[0]),
        fmt17(suite.pinned.mad_p[1])
    );
    match cfg.format {
        Format::Json => out.write_json("rao-blackwell.json", &suite)?,
        Format::Csv => out.write_csv(
            "rao-blackwell.csv",
            "trials,rejected,mean_failures,mad_failures,max_mean_drift,max_mad_increase",
            &[format!(
                "{},{},{},{},{},{}",
                suite.trials,
                suite.rejected,
                suite.mean_failures,
                suite.mad_failures,
                fmt17(suite.max_mean_drift),
                fmt17(suite.max_mad_increase)
            )],
        )?,
    }
    Ok(suite.violations)
}

fn frontier_spec(m: &ModelParams) -> Result<FrontierSpec> {
    Ok(FrontierSpec::new(m.beta, m.radius, m.c_const, m.x0)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MadIdentityCheck {
    pub estimator_id: String,
    pub f_id: String,
    pub ratio: f64,
    pub se: f64,
    pub target: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GwnReport {
    pub n: f64,
    pub m: usize,
    pub replicates: usize,
    pub constants: Theorem1Constants,
    pub point: FrontierPoint,
    pub rows: Vec<RiskRow>,
    pub paths: Vec<String>,
    /// Monte Carlo `mad_mean/sd` of each linear estimator against `√(2/π)`.
    pub mad_identity: Vec<MadIdentityCheck>,
    pub violations: usize,
}

pub fn run_gwn_experiment(cfg: &RunConfig) -> Result<GwnReport> {
    let g = &cfg.gwn_experiment;
    let spec = frontier_spec(&g.model)?;
    let sim = SimConfig::new(g.n, g.model.m, g.model.replicates, cfg.seed)?;
    let point = mad_frontier(&spec, &[g.n])?[0];
    let family = madbound::frontier::build_family(&spec, g.n, g.model.m)?;
    let unit = g.n.powf(-1.0 / (2.0 * spec.beta + 1.0));
    let linear = g
        .model
        .bandwidths
        .iter()
        .map(|k| EstimatorSpec::linear_kernel(spec.x0, k * unit, &spec.kernel, g.model.m))
        .collect::<madbound::Result<Vec<_>>>()?;
    let median = LocalMedian::new(spec.x0, 2.0 * unit, g.model.m)?;
    let constant = ConstantEstimator { x0: spec.x0, value: 0.0 };
    let mut all: Vec<&dyn PointEstimator> = linear.iter().map(|e| e as &dyn PointEstimator).collect();
    all.push(&median);
    all.push(&constant);

    let mut rows = Vec::new();
    let mut paths = Vec::new();
    for member in &family {
        for est in &linear {
            rows.push(RiskRow {
                estimator_id: est.id(),
                f_id: member.label.clone(),
                n: g.n,
                h: est.h,
                risk: exact_linear_risk(est, &member.f, &sim)?,
            });
            paths.push("exact".into());
        }
    }
    let mut mad_identity = Vec::new();
    if g.model.replicates > 0 {
        let target = (2.0 / std::f64::consts::PI).sqrt();
        for member in &family {
            let risks = mc_risk_many(&all, &member.f, &sim);
            for (k, (est, risk)) in all.iter().zip(risks).enumerate() {
                let h = if k < linear.len() {
                    linear[k].h
                } else if k == linear.len() {
                    median.h
                } else {
                    0.0
                };
                if k < linear.len() && g.model.replicates >= MIN_REPLICATES_FOR_SE {
                    mad_identity.push(MadIdentityCheck {
                        estimator_id: est.id(),
                        f_id: member.label.clone(),
                        ratio: risk.mad_to_sd.value,
                        se: risk.mad_to_sd.se,
                        target,
                        holds: risk.mad_to_sd.within(target, 4.0),
                    });
                }
                rows.push(RiskRow {
                    estimator_id: est.id(),
                    f_id: member.label.clone(),
                    n: g.n,
                    h,
                    risk,
                });
                paths.push("mc".into());
            }
        }
    }
    let violations = mad_identity.iter().filter(|c| !c.holds).count();
    Ok(GwnReport {
        n: g.n,
        m: g.model.m,
        replicates: g.model.replicates,
        constants: theorem1_constants(&spec),
        point,
        rows,
        paths,
        mad_identity,
        violations,
    })
}

fn risk_rows_csv(rows: &[RiskRow], paths: &[String]) -> Vec<String> {
    rows.iter()
        .zip(paths)
        .map(|(r, p)| format!("{p},{}", r.to_csv()))
        .collect()
}

fn gwn_experiment(cfg: &RunConfig, out: &mut OutDir) -> Result<usize> {
    let report = run_gwn_experiment(cfg)?;
    println!(
        "n = {}, m = {}, replicates = {}, bias budget {}, MAD frontier {}",
        report.n,
        report.m,
        report.replicates,
        fmt17(report.point.bias_budget),
        fmt17(report.point.mad_lower)
    );
    for c in &report.mad_identity {
        println!(
            "{:<40} {:<9} mad/sd {:.6} (se {:.2e}) {}",
            c.estimator_id,
            c.f_id,
            c.ratio,
            c.se,
            if c.holds { "ok" } else { "OUTSIDE 4 se" }
        );
    }
    match cfg.format {
        Format::Json => out.write_json("gwn-experiment.json", &report)?,
        Format::Csv => out.write_csv(
            "gwn-experiment.csv",
            &format!("path,{}", RiskRow::CSV_HEADER),
            &risk_rows_csv(&report.rows, &report.paths),
        )?,
    }
    Ok(report.violations)
}

/// One (n, bandwidth) cell of the frontier summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierCellSummary {
    pub n: f64,
    pub estimator_id: String,
    pub multiplier: f64,
    pub h: f64,
    pub sup_bias: f64,
    pub sup_mad_mean: f64,
    pub sup_mad_median: f64,
    pub sup_mad_mean_mc: Option<f64>,
    pub compliant: bool,
    pub frontier_holds: bool,
    pub frontier_median_holds: bool,
    pub frontier_holds_mc: Option<bool>,
    pub lemma2_plus: InequalityReport,
    pub lemma2_minus: InequalityReport,
    pub adversarial_member: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelSummary {
    pub beta: f64,
    pub l2_norm_sq: f64,
    pub holder_norm: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierSummary {
    pub c: f64,
    #[serde(rename = "N")]
    pub n_min: f64,
    pub n_min_holder: f64,
    pub kernel: KernelSummary,
    pub rate_exponent: f64,
    pub rate_slope: Option<f64>,
    pub frontier: Vec<FrontierPoint>,
    pub best_compliant: Vec<Option<f64>>,
    pub cells: Vec<FrontierCellSummary>,
    pub minimax: MinimaxReport,
    pub violations: Vec<String>,
}

pub fn run_frontier(cfg: &RunConfig) -> Result<(FrontierSummary, Vec<ExperimentResult>)> {
    let f = &cfg.frontier;
    let spec = frontier_spec(&f.model)?;
    let consts = theorem1_constants(&spec);
    let results = run_sweep(
        &spec,
        &f.n_list,
        f.model.m,
        f.model.replicates,
        cfg.seed,
        &f.model.bandwidths,
    )?;
    let mut cells = Vec::new();
    for r in &results {
        for c in &r.cells {
            cells.push(FrontierCellSummary {
                n: r.point.n,
                estimator_id: c.estimator_id.clone(),
                multiplier: c.multiplier,
                h: c.h,
                sup_bias: c.exact.sup_bias,
                sup_mad_mean: c.exact.sup_mad_mean,
                sup_mad_median: c.exact.sup_mad_median,
                sup_mad_mean_mc: c.mc.as_ref().map(|m| m.sup_mad_mean),
                compliant: c.compliant,
                frontier_holds: c.frontier_holds,
                frontier_median_holds: c.frontier_median_holds,
                frontier_holds_mc: c.frontier_holds_mc,
                lemma2_plus: c.lemma2_plus.clone(),
                lemma2_minus: c.lemma2_minus.clone(),
                adversarial_member: c.adversarial_member.clone(),
            });
        }
    }
    let minimax = minimax_comparison(&results);
    let mut violations: Vec<String> = results.iter().flat_map(|r| r.violations.clone()).collect();
    if !minimax.all_displays_hold {
        violations.push("a triangle-inequality display fails".into());
    }
    let summary = FrontierSummary {
        c: consts.c,
        n_min: consts.n_min,
        n_min_holder: consts.n_min_holder,
        kernel: KernelSummary {
            beta: spec.beta,
            l2_norm_sq: spec.kernel.l2_norm_sq,
            holder_norm: spec.kernel.holder_norm,
            v: spec.v,
        },
        rate_exponent: spec.rate_exponent(),
        rate_slope: rate_slope(&results),
        frontier: results.iter().map(|r| r.point).collect(),
        best_compliant: results.iter().map(|r| r.best_compliant_mad()).collect(),
        cells,
        minimax,
        violations,
    };
    Ok((summary, results))
}

pub const FRONTIER_CSV_HEADER: &str = "n,estimator_id,multiplier,h,path,sup_bias,sup_mad_mean,\
sup_mad_median,bias_budget,mad_lower,compliant,frontier_holds";

fn frontier_csv_rows(results: &[ExperimentResult]) -> Vec<String> {
    let mut rows = Vec::new();
    for r in results {
        for c in &r.cells {
            let mut push = |path: &str, fam: &madbound::gwn_sim::FamilyRisk, holds: bool| {
                rows.push(format!(
                    "{},{},{},{},{path},{},{},{},{},{},{},{}",
                    fmt17(r.point.n),
                    c.estimator_id,
                    fmt17(c.multiplier),
                    fmt17(c.h),
                    fmt17(fam.sup_bias),
                    fmt17(fam.sup_mad_mean),
                    fmt17(fam.sup_mad_median),
                    fmt17(r.point.bias_budget),
                    fmt17(r.point.mad_lower),
                    bool_cell(c.compliant),
                    bool_cell(holds)
                ));
            };
            push("exact", &c.exact, c.frontier_holds);
            if let (Some(mc), Some(h)) = (&c.mc, c.frontier_holds_mc) {
                push("mc", mc, h);
            }
        }
    }
    rows
}

fn frontier_risk_rows(results: &[ExperimentResult]) -> Vec<String> {
    let mut rows = Vec::new();
    for r in results {
        for c in &r.cells {
            for (path, fam) in std::iter::once(("exact", &c.exact)).chain(c.mc.as_ref().map(|m| ("mc", m))) {
                for label in FAMILY_LABELS {
                    let risk = fam
                        .members
                        .iter()
                        .find(|(l, _)| l == label)
                        .map(|(_, risk)| *risk)
                        .expect("family member present");
                    let row = RiskRow {
                        estimator_id: c.estimator_id.clone(),
                        f_id: label.into(),
                        n: r.point.n,
                        h: c.h,
                        risk,
                    };
                    rows.push(format!("{path},{}", row.to_csv()));
                }
            }
        }
    }
    rows
}

fn frontier(cfg: &RunConfig, out: &mut OutDir) -> Result<usize> {
    let (summary, results) = run_frontier(cfg)?;
    println!(
        "kernel: |K|_2^2 = {}, |K|_C^beta = {}, V = {}",
        fmt17(summary.kernel.l2_norm_sq),
        fmt17(summary.kernel.holder_norm),
        fmt17(summary.kernel.v)
    );
    println!("c = {}, N = {}", fmt17(summary.c), fmt17(summary.n_min));
    println!("{:>8}  {:>12}  {:>12}  {:>12}  valid", "n", "bias_budget", "mad_lower", "best_mad");
    for (p, best) in summary.frontier.iter().zip(&summary.best_compliant) {
        println!(
            "{:>8}  {:>12.6e}  {:>12.6e}  {:>12}  {}",
            p.n,
            p.bias_budget,
            p.mad_lower,
            best.map_or("-".into(), |b| format!("{b:.6e}")),
            p.valid
        );
    }
    if let Some(s) = summary.rate_slope {
        println!("log-log slope of best compliant sup MAD: {s:.4}");
    }
    out.write_csv("frontier.csv", FRONTIER_CSV_HEADER, &frontier_csv_rows(&results))?;
    out.write_csv(
        "frontier_risks.csv",
        &format!("path,{}", RiskRow::CSV_HEADER),
        &frontier_risk_rows(&results),
    )?;
    out.write_json("frontier.json", &summary)?;
    for v in &summary.violations {
        eprintln!("violation: {v}");
    }
    Ok(summary.violations.len())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelConstantsReport {
    pub kernel: KernelSummary,
    pub radius: f64,
    pub c_const: f64,
    pub x0: f64,
    pub constants: Theorem1Constants,
}

pub fn run_kernel_constants(cfg: &RunConfig) -> Result<KernelConstantsReport> {
    let k = &cfg.kernel_constants;
    let spec = FrontierSpec::new(k.beta, k.radius, k.c_const, k.x0)?;
    Ok(KernelConstantsReport {
        kernel: KernelSummary {
            beta: spec.beta,
            l2_norm_sq: spec.kernel.l2_norm_sq,
            holder_norm: spec.kernel.holder_norm,
            v: spec.v,
        },
        radius: k.radius,
        c_const: k.c_const,
        x0: k.x0,
        constants: theorem1_constants(&spec),
    })
}

fn kernel_constants(cfg: &RunConfig, out: &mut OutDir) -> Result<usize> {
    let r = run_kernel_constants(cfg)?;
    let pairs = [
        ("beta", r.kernel.beta),
        ("l2_norm_sq", r.kernel.l2_norm_sq),
        ("holder_norm", r.kernel.holder_norm),
        ("V", r.kernel.v),
        ("c", r.constants.c),
        ("N", r.constants.n_min),
        ("N_holder", r.constants.n_min_holder),
    ];
    for (k, v) in pairs {
        println!("{k:<12} {}", fmt17(v));
    }
    match cfg.format {
        Format::Json => out.write_json("kernel-constants.json", &r)?,
        Format::Csv => out.write_csv(
            "kernel-constants.csv",
            "key,value",
            &pairs.iter().map(|(k, v)| format!("{k},{}", fmt17(*v))).collect::<Vec<_>>(),
        )?,
    }
    Ok(0)
}
