//! Left- and right-hand sides of the change-of-expectation inequalities,
//! evaluated exactly on finite spaces.
//!
//! Every check returns an [`InequalityReport`] claiming `lhs ≤ rhs`. A report
//! holds when `rhs − lhs ≥ −tol` with `tol = 1e−12·max(1, |lhs|, |rhs|)`.
//!
//! | check | lhs | rhs |
//! |-------|-----|-----|
//! | [`check_lemma2`] | `(1/5)(1 − H²)²·|u − v|` | `E_P|X − u| ∨ E_Q|X − v|` |
//! | [`check_cauchy_schwarz_step`] | `(1 − H²)·|u − v|` | `√(E_P|X−u|·E_Q|X−u|) + √(E_P|X−v|·E_Q|X−v|)` |
//! | [`check_special_case_means`] | lemma 2 with `u = E_P X`, `v = E_Q X` | |
//! | [`check_lemma1_variance`] | `(ΔE)²/(4 − 2H²)·(1/H − H)²` | `Var_P X + Var_Q X` |
//! | [`check_lemma3_first`] | `(1 − H²)/‖(p−q)/(p∧q)‖_∞ · |ΔE|` | `MAD_P ∨ MAD_Q` |

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{hellinger_sq_discrete, lr_ratio_norms, DiscreteMeasure, FiniteRV};

/// Relative tolerance used by every report.
pub const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub tol: f64,
    pub context: BTreeMap<String, f64>,
}

impl InequalityReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let tol = REL_TOL * 1f64.max(lhs.abs()).max(rhs.abs());
        let slack = rhs - lhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            slack,
            holds: slack >= -tol,
            tol,
            context: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.context.insert(key.to_string(), value);
        self
    }

    /// `lhs / rhs`, with `0/0 = 0`.
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

fn ensure_pair(p: &DiscreteMeasure, q: &DiscreteMeasure, x: &FiniteRV) -> Result<()> {
    p.ensure_same_atoms(q)?;
    if x.len() != p.len() {
        return Err(Error::LengthMismatch(p.len(), x.len()));
    }
    Ok(())
}

/// `(1/5)(1 − H²)²·|u − v| ≤ E_P|X − u| ∨ E_Q|X − v|`.
pub fn check_lemma2(
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
    x: &FiniteRV,
    u: f64,
    v: f64,
) -> Result<InequalityReport> {
    ensure_pair(p, q, x)?;
    let h2 = hellinger_sq_discrete(p, q)?;
    let mad_p = p.mad_about(x, u)?;
    let mad_q = q.mad_about(x, v)?;
    let lhs = 0.2 * (1.0 - h2).powi(2) * (u - v).abs();
    Ok(InequalityReport::new("lemma2", lhs, mad_p.max(mad_q))
        .with("H2", h2)
        .with("u", u)
        .with("v", v)
        .with("mad_p_u", mad_p)
        .with("mad_q_v", mad_q))
}

/// The triangle plus Cauchy–Schwarz step in the proof of lemma 2.
pub fn check_cauchy_schwarz_step(
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
    x: &FiniteRV,
    u: f64,
    v: f64,
) -> Result<InequalityReport> {
    ensure_pair(p, q, x)?;
    let h2 = hellinger_sq_discrete(p, q)?;
    let pu = p.mad_about(x, u)?;
    let qu = q.mad_about(x, u)?;
    let pv = p.mad_about(x, v)?;
    let qv = q.mad_about(x, v)?;
    let lhs = (1.0 - h2) * (u - v).abs();
    let rhs = (pu * qu).sqrt() + (pv * qv).sqrt();
    Ok(InequalityReport::new("cauchy_schwarz_step", lhs, rhs)
        .with("H2", h2)
        .with("u", u)
        .with("v", v))
}

/// The substituted quantities `a = E_P|X−v| ∨ E_Q|X−u|`, `b = |u − v|`,
/// `d = 1 − H²` of the lemma 2 proof.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainQuantities {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

pub fn lemma2_chain_quantities(
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
    x: &FiniteRV,
    u: f64,
    v: f64,
) -> Result<ChainQuantities> {
    ensure_pair(p, q, x)?;
    let h2 = hellinger_sq_discrete(p, q)?;
    Ok(ChainQuantities {
        a: p.mad_about(x, v)?.max(q.mad_about(x, u)?),
        b: (u - v).abs(),
        d: 1.0 - h2,
    })
}

/// `d·b ≤ 2√(a² + ab)` on the substituted quantities of a lemma 2 instance.
pub fn check_lemma2_chain(
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
    x: &FiniteRV,
    u: f64,
    v: f64,
) -> Result<InequalityReport> {
    let ChainQuantities { a, b, d } = lemma2_chain_quantities(p, q, x, u, v)?;
    Ok(
        InequalityReport::new("lemma2_chain_premise", d * b, 2.0 * (a * a + a * b).sqrt())
            .with("a", a)
            .with("b", b)
            .with("d", d),
    )
}

/// The two algebraic steps closing the lemma 2 proof.
///
/// The first report checks the implication `d·b ≤ 2√(a² + ab) ⇒
/// a ≥ b(√(1+d²) − 1)/2`; when the premise fails the report is vacuous
/// (`lhs = 0`, context `premise = 0`). The second checks
/// `√(1+d²) − 1 ≥ 2d²/5`.
pub fn check_quadratic_chain(
    a: f64,
    b: f64,
    d: f64,
) -> Result<(InequalityReport, InequalityReport)> {
    if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("need a, b >= 0, got a = {a}, b = {b}")));
    }
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::InvalidArgument(format!("need d in [0, 1], got {d}")));
    }
    let root = (1.0 + d * d).sqrt() - 1.0;
    let premise_lhs = d * b;
    let premise_rhs = 2.0 * (a * a + a * b).sqrt();
    let premise_tol = REL_TOL * 1f64.max(premise_lhs).max(premise_rhs);
    let premise = premise_lhs <= premise_rhs + premise_tol;
    let implied = if premise { b * root / 2.0 } else { 0.0 };
    let first = InequalityReport::new("quadratic_root_bound", implied, a)
        .with("a", a)
        .with("b", b)
        .with("d", d)
        .with("premise", if premise { 1.0 } else { 0.0 });
    let second = InequalityReport::new("sqrt_lower_bound", 0.4 * d * d, root).with("d", d);
    Ok((first, second))
}

/// Lemma 2 centered at the two means.
pub fn check_special_case_means(
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
    x: &FiniteRV,
) -> Result<InequalityReport> {
    ensure_pair(p, q, x)?;
    let u = p.expect(x)?;
    let v = q.expect(x)?;
    let mut report = check_lemma2(p, q, x, u, v)?;
    report.name = "lemma2_means".into();
    Ok(report)
}

/// Variance version: `(ΔE)²/(4 − 2H²)·(1/H − H)² ≤ Var_P X + Var_Q X`.
/// Returns `lhs = 0` when `H = 0`.
pub fn check_lemma1_variance(
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
    x: &FiniteRV,
) -> Result<InequalityReport> {
    ensure_pair(p, q, x)?;
    let h2 = hellinger_sq_discrete(p, q)?;
    let h = h2.sqrt();
    let gap = p.expect(x)? - q.expect(x)?;
    let lhs = if h == 0.0 {
        0.0
    } else {
        gap * gap / (4.0 - 2.0 * h2) * (1.0 / h - h).powi(2)
    };
    let rhs = p.variance(x)? + q.variance(x)?;
    Ok(InequalityReport::new("lemma1_variance", lhs, rhs)
        .with("H2", h2)
        .with("mean_gap", gap))
}

/// `(1 − H²)/‖(p−q)/(p∧q)‖_∞ · |E_P X − E_Q X| ≤ MAD_P ∨ MAD_Q`.
///
/// The left side is `0` when the ratio norm is infinite (supports differ) or
/// zero (`P = Q`).
pub fn check_lemma3_first(
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
    x: &FiniteRV,
) -> Result<InequalityReport> {
    ensure_pair(p, q, x)?;
    let div = lr_ratio_norms(p, q)?;
    let gap = (p.expect(x)? - q.expect(x)?).abs();
    let lhs = if div.lr_min_norm == 0.0 || div.lr_min_norm.is_infinite() {
        0.0
    } else {
        (1.0 - div.hellinger_sq) / div.lr_min_norm * gap
    };
    let rhs = p.mad(x)?.max(q.mad(x)?);
    Ok(InequalityReport::new("lemma3_first", lhs, rhs)
        .with("H2", div.hellinger_sq)
        .with("lr_min_norm", div.lr_min_norm)
        .with("mean_gap", gap))
}

/// Lower bound on the worst-case variance implied by the variance inequality
/// for two parameters `theta_gap` apart, when both biases are at most
/// `bias_budget`:
/// `((1/4)·gap² / (4 − 2H²))·(1/H − H)² / 2`.
pub fn variance_tradeoff_bound(theta_gap: f64, hellinger: f64, bias_budget: f64) -> Result<f64> {
    if !(hellinger > 0.0 && hellinger < 1.0) {
        return Err(Error::Precondition(format!(
            "Hellinger distance must lie in (0, 1), got {hellinger}"
        )));
    }
    if !(bias_budget >= 0.0) {
        return Err(Error::Precondition(format!("bias budget {bias_budget} is negative")));
    }
    if theta_gap.abs() < 4.0 * bias_budget {
        return Err(Error::Precondition(format!(
            "|theta_gap| = {} is below 4 x bias budget = {}",
            theta_gap.abs(),
            4.0 * bias_budget
        )));
    }
    let h2 = hellinger * hellinger;
    Ok(0.25 * theta_gap * theta_gap / (4.0 - 2.0 * h2) * (1.0 / hellinger - hellinger).powi(2) / 2.0)
}
