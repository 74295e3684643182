//! Constructive witnesses on finite spaces: the indicator variable attaining
//! the likelihood-ratio bound, the conditional-mean (Rao–Blackwell style)
//! reduction of MAD, the constant variable that makes the lemma 2 bound tight
//! up to a constant, and a randomized search for tight lemma 2 instances.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{check_lemma2, InequalityReport, REL_TOL};
use crate::error::{Error, Result};
use crate::instance::{random_instance, stream_rng, Instance};
use crate::measure::{hellinger_sq_discrete, lr_max_ratios, DiscreteMeasure, FiniteRV};

/// Tolerance on `|E_P[X | A] − E_Q[X | A]|`, relative to `max(1, |E_P[X | A]|)`.
pub const CONDITIONAL_MEAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub witness: FiniteRV,
    pub selected_atom: Option<usize>,
    /// `P = Q` on every atom: the ratio norm is zero and there is nothing to witness.
    pub vacuous: bool,
    /// `MAD_P ∨ MAD_Q ≤ |p* − q*| / ‖(p−q)/(p∨q)‖_∞`.
    pub literal_bound_holds: bool,
    /// The same with the right side doubled.
    pub adjusted_bound_holds: bool,
    pub details: BTreeMap<String, f64>,
}

/// Indicator of the atom maximizing `|p_j − q_j| / max(p_j, q_j)` (lowest
/// index on ties), with both MADs and both candidate bounds.
///
/// The mean-centered MAD of an indicator under weight `p` is `2p(1 − p)`, so
/// the literal bound `max(p*, q*)` can fail while `2·max(p*, q*)` always holds.
pub fn tightness_witness(p: &DiscreteMeasure, q: &DiscreteMeasure) -> Result<WitnessReport> {
    let ratios = lr_max_ratios(p, q)?;
    let mut best = 0usize;
    for (j, &r) in ratios.iter().enumerate() {
        if r > ratios[best] {
            best = j;
        }
    }
    let norm = ratios[best];
    if norm == 0.0 {
        return Ok(WitnessReport {
            witness: FiniteRV::constant(0.0, p.len()),
            selected_atom: None,
            vacuous: true,
            literal_bound_holds: true,
            adjusted_bound_holds: true,
            details: BTreeMap::new(),
        });
    }
    let x = FiniteRV::indicator(best, p.len());
    let (pj, qj) = (p.probs()[best], q.probs()[best]);
    let mad_p = p.mad(&x)?;
    let mad_q = q.mad(&x)?;
    let worst = mad_p.max(mad_q);
    let literal = (pj - qj).abs() / norm;
    let adjusted = 2.0 * literal;
    let tol = |b: f64| REL_TOL * 1f64.max(b).max(worst);

    let mut details = BTreeMap::new();
    details.insert("j_star".into(), best as f64);
    details.insert("p_j_star".into(), pj);
    details.insert("q_j_star".into(), qj);
    details.insert("lr_max_norm".into(), norm);
    details.insert("mad_p".into(), mad_p);
    details.insert("mad_q".into(), mad_q);
    details.insert("literal_bound".into(), literal);
    details.insert("adjusted_bound".into(), adjusted);

    Ok(WitnessReport {
        witness: x,
        selected_atom: Some(best),
        vacuous: false,
        literal_bound_holds: worst <= literal + tol(literal),
        adjusted_bound_holds: worst <= adjusted + tol(adjusted),
        details,
    })
}

fn normalize_subset(subset: &[usize], len: usize) -> Result<Vec<usize>> {
    let set: BTreeSet<usize> = subset.iter().copied().collect();
    if let Some(&j) = set.iter().find(|&&j| j >= len) {
        return Err(Error::InvalidArgument(format!("atom {j} out of range for {len} atoms")));
    }
    Ok(set.into_iter().collect())
}

fn conditional_mean(m: &DiscreteMeasure, x: &FiniteRV, subset: &[usize]) -> Result<(f64, f64)> {
    let mass = m.mass(subset)?;
    let weighted = crate::numeric::compensated_sum(
        subset.iter().map(|&j| m.probs()[j] * x.values()[j]),
    );
    Ok((mass, if mass > 0.0 { weighted / mass } else { 0.0 }))
}

/// Replaces `X` on the atom set `A` by its conditional mean `E_P[X | A]`.
///
/// Requires `P(A) > 0`, `Q(A) > 0`, and `E_P[X | A] = E_Q[X | A]` (within
/// [`CONDITIONAL_MEAN_TOL`]); then both means are preserved and neither MAD
/// increases.
pub fn rao_blackwell_reduce(
    x: &FiniteRV,
    subset: &[usize],
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
) -> Result<FiniteRV> {
    p.ensure_same_atoms(q)?;
    if x.len() != p.len() {
        return Err(Error::LengthMismatch(p.len(), x.len()));
    }
    let subset = normalize_subset(subset, p.len())?;
    let (mass_p, mean_p) = conditional_mean(p, x, &subset)?;
    let (mass_q, mean_q) = conditional_mean(q, x, &subset)?;
    if mass_p <= 0.0 || mass_q <= 0.0 {
        return Err(Error::Precondition(format!(
            "event has zero probability (P(A) = {mass_p}, Q(A) = {mass_q})"
        )));
    }
    if (mean_p - mean_q).abs() > CONDITIONAL_MEAN_TOL * 1f64.max(mean_p.abs()) {
        return Err(Error::Precondition(format!(
            "conditional means differ: E_P[X|A] = {mean_p}, E_Q[X|A] = {mean_q}"
        )));
    }
    let mut values = x.values().to_vec();
    for &j in &subset {
        values[j] = mean_p;
    }
    Ok(FiniteRV::new(values))
}

/// Before/after moments of a Rao–Blackwell reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaoBlackwellReport {
    pub reduced: FiniteRV,
    pub mean_p: [f64; 2],
    pub mean_q: [f64; 2],
    pub mad_p: [f64; 2],
    pub mad_q: [f64; 2],
    pub means_preserved: bool,
    pub mads_nonincreasing: bool,
}

pub fn rao_blackwell_check(
    x: &FiniteRV,
    subset: &[usize],
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
) -> Result<RaoBlackwellReport> {
    let reduced = rao_blackwell_reduce(x, subset, p, q)?;
    let mean_p = [p.expect(x)?, p.expect(&reduced)?];
    let mean_q = [q.expect(x)?, q.expect(&reduced)?];
    let mad_p = [p.mad(x)?, p.mad(&reduced)?];
    let mad_q = [q.mad(x)?, q.mad(&reduced)?];
    let scale = x.values().iter().fold(1f64, |s, v| s.max(v.abs()));
    let means_preserved = (mean_p[0] - mean_p[1]).abs() <= 1e-12 * scale
        && (mean_q[0] - mean_q[1]).abs() <= 1e-12 * scale;
    let mads_nonincreasing =
        mad_p[1] <= mad_p[0] + REL_TOL * scale && mad_q[1] <= mad_q[0] + REL_TOL * scale;
    Ok(RaoBlackwellReport {
        reduced,
        mean_p,
        mean_q,
        mad_p,
        mad_q,
        means_preserved,
        mads_nonincreasing,
    })
}

/// Lemma 2 at `X ≡ v`: the attained ratio `rhs/lhs` equals `5/(1 − H²)²`,
/// recorded in the context as `ratio`.
pub fn near_tightness_example(
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
    u: f64,
    v: f64,
) -> Result<InequalityReport> {
    let h2 = hellinger_sq_discrete(p, q)?;
    if h2 >= 1.0 {
        return Err(Error::Precondition("requires H(P, Q) < 1".into()));
    }
    if u == v {
        return Err(Error::Precondition("requires u != v; the ratio is 0/0".into()));
    }
    let x = FiniteRV::constant(v, p.len());
    let report = check_lemma2(p, q, &x, u, v)?;
    let ratio = report.rhs / report.lhs;
    Ok(report.with("ratio", ratio).with("predicted_ratio", 5.0 / (1.0 - h2).powi(2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub space_size: usize,
    pub iterations: u64,
    pub restarts: u64,
    pub seed: u64,
}

impl SearchConfig {
    pub const MAX_SPACE: usize = 50;

    pub fn new(space_size: usize, iterations: u64, seed: u64) -> Self {
        Self {
            space_size,
            iterations,
            restarts: 8,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub restart: u64,
    pub iteration: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best: Instance,
    /// `lhs/rhs` of lemma 2 at `best`.
    pub best_ratio: f64,
    pub best_h2: f64,
    pub best_restart: u64,
    /// Largest ratio over every evaluated instance, accepted or not.
    pub max_visited_ratio: f64,
    pub evaluations: u64,
    /// Best-so-far improvements, ordered by restart then iteration.
    pub trace: Vec<TracePoint>,
}

/// Search state: measures kept as log-weights so that perturbations stay on
/// the simplex.
#[derive(Clone)]
struct State {
    logp: Vec<f64>,
    logq: Vec<f64>,
    x: Vec<f64>,
    u: f64,
    v: f64,
}

const VALUE_BOUND: f64 = 1e3;
const LOG_BOUND: f64 = 60.0;

impl State {
    fn from_instance(inst: &Instance) -> Self {
        let logs = |m: &DiscreteMeasure| m.probs().iter().map(|p| p.ln().max(-LOG_BOUND)).collect();
        Self {
            logp: logs(&inst.p),
            logq: logs(&inst.q),
            x: inst.x.values().to_vec(),
            u: inst.u,
            v: inst.v,
        }
    }

    fn to_instance(&self) -> Instance {
        let soft = |l: &[f64]| {
            let top = l.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = l.iter().map(|x| (x - top).exp()).collect();
            DiscreteMeasure::from_unnormalized(&w).expect("softmax weights are valid")
        };
        Instance {
            p: soft(&self.logp),
            q: soft(&self.logq),
            x: FiniteRV::new(self.x.clone()),
            u: self.u,
            v: self.v,
        }
    }

    fn coordinates(&self) -> usize {
        3 * self.x.len() + 2
    }

    fn perturb(&mut self, coord: usize, step: f64) {
        let k = self.x.len();
        match coord {
            c if c < k => self.logp[c] = (self.logp[c] + step).clamp(-LOG_BOUND, LOG_BOUND),
            c if c < 2 * k => {
                self.logq[c - k] = (self.logq[c - k] + step).clamp(-LOG_BOUND, LOG_BOUND)
            }
            c if c < 3 * k => {
                self.x[c - 2 * k] = (self.x[c - 2 * k] + step).clamp(-VALUE_BOUND, VALUE_BOUND)
            }
            c if c == 3 * k => self.u = (self.u + step).clamp(-VALUE_BOUND, VALUE_BOUND),
            _ => self.v = (self.v + step).clamp(-VALUE_BOUND, VALUE_BOUND),
        }
    }
}

fn lemma2_ratio(inst: &Instance) -> f64 {
    check_lemma2(&inst.p, &inst.q, &inst.x, inst.u, inst.v)
        .expect("search instances are aligned")
        .ratio()
}

struct RestartResult {
    best: Instance,
    best_ratio: f64,
    max_visited: f64,
    evaluations: u64,
    trace: Vec<TracePoint>,
}

fn run_restart(cfg: &SearchConfig, restart: u64, iterations: u64) -> RestartResult {
    let mut rng = stream_rng(cfg.seed, restart);
    let init = random_instance(&mut rng, cfg.space_size, true);
    let mut state = State::from_instance(&init);
    let mut current = state.to_instance();
    let mut ratio = lemma2_ratio(&current);
    let mut max_visited = ratio;
    let mut trace = vec![TracePoint { restart, iteration: 0, ratio }];
    let mut step = 1.0_f64;
    for it in 1..=iterations {
        let coord = rng.random_range(0..state.coordinates());
        let z: f64 = rng.sample(StandardNormal);
        let mut proposal = state.clone();
        proposal.perturb(coord, step * z);
        let inst = proposal.to_instance();
        let r = lemma2_ratio(&inst);
        max_visited = max_visited.max(r);
        if r >= ratio {
            if r > ratio {
                trace.push(TracePoint { restart, iteration: it, ratio: r });
            }
            state = proposal;
            current = inst;
            ratio = r;
            step = (step * 1.1).min(5.0);
        } else {
            step = (step * 0.98).max(1e-6);
        }
    }
    RestartResult {
        best: current,
        best_ratio: ratio,
        max_visited,
        evaluations: iterations + 1,
        trace,
    }
}

/// Random restarts with coordinate-wise Gaussian hill climbing, maximizing
/// `lhs/rhs` of lemma 2 over `(P, Q, X, u, v)`.
///
/// `iterations` is the total number of proposals, split evenly across the
/// restarts; with zero iterations only the first restart's initial instance
/// is evaluated. Restart `r` draws from RNG stream `(seed, r)` and restarts run
/// in parallel; the merge keeps the largest ratio, lowest restart on ties.
pub fn tightness_search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    if cfg.space_size < 2 || cfg.space_size > SearchConfig::MAX_SPACE {
        return Err(Error::InvalidArgument(format!(
            "space size {} outside [2, {}]",
            cfg.space_size,
            SearchConfig::MAX_SPACE
        )));
    }
    let active = if cfg.iterations == 0 {
        1
    } else {
        cfg.restarts.max(1).min(cfg.iterations)
    };
    let base = cfg.iterations / active;
    let extra = cfg.iterations % active;
    let results: Vec<RestartResult> = (0..active)
        .into_par_iter()
        .map(|r| run_restart(cfg, r, base + u64::from(r < extra)))
        .collect();

    let mut best_idx = 0;
    for (i, r) in results.iter().enumerate() {
        if r.best_ratio > results[best_idx].best_ratio {
            best_idx = i;
        }
    }
    let max_visited_ratio = results.iter().map(|r| r.max_visited).fold(0.0, f64::max);
    let evaluations = results.iter().map(|r| r.evaluations).sum();
    let trace = results.iter().flat_map(|r| r.trace.iter().cloned()).collect();
    let winner = &results[best_idx];
    let best_h2 = hellinger_sq_discrete(&winner.best.p, &winner.best.q)?;
    Ok(SearchOutcome {
        best: winner.best.clone(),
        best_ratio: winner.best_ratio,
        best_h2,
        best_restart: best_idx as u64,
        max_visited_ratio,
        evaluations,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::from_probs(p.to_vec()).unwrap()
    }

    #[test]
    fn witness_equality_case() {
        let w = tightness_witness(&m(&[0.9, 0.1]), &m(&[0.5, 0.5])).unwrap();
        assert_eq!(w.selected_atom, Some(1));
        assert!((w.details["mad_p"] - 0.18).abs() < 1e-15);
        assert!((w.details["mad_q"] - 0.5).abs() < 1e-15);
        assert!((w.details["literal_bound"] - 0.5).abs() < 1e-15);
        assert!(w.literal_bound_holds);
        assert!(w.adjusted_bound_holds);
    }

    #[test]
    fn witness_literal_counterexample() {
        let w = tightness_witness(&m(&[0.7, 0.3]), &m(&[0.6, 0.4])).unwrap();
        assert_eq!(w.selected_atom, Some(1));
        assert!((w.details["mad_p"] - 0.42).abs() < 1e-15);
        assert!((w.details["mad_q"] - 0.48).abs() < 1e-15);
        assert!((w.details["literal_bound"] - 0.4).abs() < 1e-15);
        assert!((w.details["adjusted_bound"] - 0.8).abs() < 1e-15);
        assert!(!w.literal_bound_holds);
        assert!(w.adjusted_bound_holds);
        assert_eq!(w.witness.values(), &[0.0, 1.0]);
    }

    #[test]
    fn witness_vacuous_when_equal() {
        let p = m(&[0.2, 0.8]);
        let w = tightness_witness(&p, &p).unwrap();
        assert!(w.vacuous);
        assert_eq!(w.selected_atom, None);
    }

    #[test]
    fn witness_ties_pick_lowest_index() {
        // Ratios 0.5, 0.5, 0.
        let w = tightness_witness(&m(&[0.5, 0.25, 0.25]), &m(&[0.25, 0.5, 0.25])).unwrap();
        assert_eq!(w.selected_atom, Some(0));
    }

    #[test]
    fn rao_blackwell_three_atoms() {
        let x = FiniteRV::new(vec![1.0, 2.0, 3.0]);
        let p = DiscreteMeasure::uniform(3).unwrap();
        let q = m(&[0.25, 0.5, 0.25]);
        let r = rao_blackwell_check(&x, &[0, 2], &p, &q).unwrap();
        assert_eq!(r.reduced.values(), &[2.0, 2.0, 2.0]);
        assert!((r.mad_p[0] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.mad_p[1], 0.0);
        assert!((r.mean_p[1] - 2.0).abs() < 1e-15 && (r.mean_q[1] - 2.0).abs() < 1e-15);
        assert!(r.means_preserved && r.mads_nonincreasing);
    }

    #[test]
    fn rao_blackwell_full_collapse() {
        let x = FiniteRV::new(vec![1.0, 2.0, 3.0]);
        let p = DiscreteMeasure::uniform(3).unwrap();
        let q = m(&[0.25, 0.5, 0.25]);
        let r = rao_blackwell_check(&x, &[0, 1, 2], &p, &q).unwrap();
        assert_eq!(r.reduced.values(), &[2.0, 2.0, 2.0]);
        assert_eq!(r.mad_p[1], 0.0);
    }

    #[test]
    fn rao_blackwell_rejects_bad_events() {
        let x = FiniteRV::new(vec![1.0, 2.0, 3.0]);
        let p = DiscreteMeasure::uniform(3).unwrap();
        let q = m(&[0.25, 0.5, 0.25]);
        assert!(matches!(rao_blackwell_reduce(&x, &[], &p, &q), Err(Error::Precondition(_))));
        assert!(matches!(rao_blackwell_reduce(&x, &[0, 1], &p, &q), Err(Error::Precondition(_))));
        let q0 = m(&[0.0, 1.0, 0.0]);
        assert!(matches!(rao_blackwell_reduce(&x, &[0, 2], &p, &q0), Err(Error::Precondition(_))));
        assert!(rao_blackwell_reduce(&x, &[5], &p, &q).is_err());
    }

    #[test]
    fn near_tightness_ratios() {
        let p = m(&[0.3, 0.7]);
        let r = near_tightness_example(&p, &p, 1.0, 0.0).unwrap();
        assert!((r.context["ratio"] - 5.0).abs() < 1e-12);

        // H² = 0.5: P = (1, 0), Q = (1/4, 3/4).
        let r = near_tightness_example(&m(&[1.0, 0.0]), &m(&[0.25, 0.75]), 1.0, 0.0).unwrap();
        assert!((r.lhs - 0.05).abs() < 1e-15);
        assert!((r.rhs - 1.0).abs() < 1e-15);
        assert!((r.context["ratio"] - 20.0).abs() < 1e-12);

        let close = near_tightness_example(&m(&[1.0, 0.0]), &m(&[1e-6, 1.0 - 1e-6]), 1.0, 0.0)
            .unwrap();
        assert!(close.context["ratio"] > 1e6);
        assert!(near_tightness_example(&m(&[1.0, 0.0]), &m(&[0.0, 1.0]), 1.0, 0.0).is_err());
    }

    #[test]
    fn search_with_zero_iterations_returns_initial_instance() {
        let cfg = SearchConfig::new(2, 0, 1);
        let out = tightness_search(&cfg).unwrap();
        let mut rng = stream_rng(1, 0);
        let init = random_instance(&mut rng, 2, true);
        let expected = lemma2_ratio(&State::from_instance(&init).to_instance());
        assert_eq!(out.best_ratio, expected);
        assert_eq!(out.evaluations, 1);
    }

    #[test]
    fn search_is_deterministic() {
        let cfg = SearchConfig::new(3, 2_000, 11);
        assert_eq!(tightness_search(&cfg).unwrap(), tightness_search(&cfg).unwrap());
    }

    #[test]
    fn search_rejects_large_spaces() {
        assert!(tightness_search(&SearchConfig::new(51, 10, 0)).is_err());
        assert!(tightness_search(&SearchConfig::new(1, 10, 0)).is_err());
    }
}
