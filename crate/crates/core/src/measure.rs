//! Finite probability measures, real random variables on them, and Hellinger
//! divergences (discrete, Gaussian location, product Gaussian, white noise).
//!
//! Two measures are comparable only when they carry the same atom sequence;
//! the dominating measure is the counting measure on that sequence and is
//! never materialized.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holder::GridFunction;
use crate::numeric::compensated_sum;

const NORMALIZATION_TOL: f64 = 1e-12;

/// A probability measure on a finite, labeled set of atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct DiscreteMeasure {
    atoms: Vec<String>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    atoms: Vec<String>,
    probs: Vec<f64>,
}

impl TryFrom<RawMeasure> for DiscreteMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        DiscreteMeasure::new(raw.atoms, raw.probs)
    }
}

impl From<DiscreteMeasure> for RawMeasure {
    fn from(m: DiscreteMeasure) -> Self {
        RawMeasure {
            atoms: m.atoms,
            probs: m.probs,
        }
    }
}

impl DiscreteMeasure {
    /// Validates weights (non-negative, summing to one within `1e-12`, unique
    /// atoms) and renormalizes them once.
    pub fn new(atoms: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Empty);
        }
        if atoms.len() != probs.len() {
            return Err(Error::LengthMismatch(atoms.len(), probs.len()));
        }
        let mut seen = HashSet::with_capacity(atoms.len());
        for a in &atoms {
            if !seen.insert(a.as_str()) {
                return Err(Error::DuplicateAtom(a.clone()));
            }
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(total));
        }
        let probs = probs.into_iter().map(|p| p / total).collect();
        Ok(Self { atoms, probs })
    }

    /// Measure on atoms labeled `"0"`, `"1"`, ... .
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let atoms = (0..probs.len()).map(|i| i.to_string()).collect();
        Self::new(atoms, probs)
    }

    /// Normalizes arbitrary non-negative weights before validation.
    pub fn from_unnormalized(weights: &[f64]) -> Result<Self> {
        let total = compensated_sum(weights.iter().copied());
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::NotNormalized(total));
        }
        Self::from_probs(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Empty);
        }
        Self::from_probs(vec![1.0 / size as f64; size])
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn ensure_same_atoms(&self, other: &DiscreteMeasure) -> Result<()> {
        if self.atoms != other.atoms {
            return Err(Error::AtomMismatch);
        }
        Ok(())
    }

    fn ensure_aligned(&self, x: &FiniteRV) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::LengthMismatch(self.len(), x.len()));
        }
        Ok(())
    }

    /// `E[X]`.
    pub fn expect(&self, x: &FiniteRV) -> Result<f64> {
        self.ensure_aligned(x)?;
        Ok(compensated_sum(
            self.probs.iter().zip(&x.0).map(|(p, v)| p * v),
        ))
    }

    /// `E|X - center|`.
    pub fn mad_about(&self, x: &FiniteRV, center: f64) -> Result<f64> {
        self.ensure_aligned(x)?;
        Ok(compensated_sum(
            self.probs
                .iter()
                .zip(&x.0)
                .map(|(p, v)| p * (v - center).abs()),
        ))
    }

    /// Mean-centered MAD, `E|X - E[X]|`.
    pub fn mad(&self, x: &FiniteRV) -> Result<f64> {
        let mean = self.expect(x)?;
        self.mad_about(x, mean)
    }

    pub fn variance(&self, x: &FiniteRV) -> Result<f64> {
        let mean = self.expect(x)?;
        Ok(compensated_sum(
            self.probs
                .iter()
                .zip(&x.0)
                .map(|(p, v)| p * (v - mean) * (v - mean)),
        ))
    }

    /// Mass of a set of atom indices.
    pub fn mass(&self, subset: &[usize]) -> Result<f64> {
        for &j in subset {
            if j >= self.len() {
                return Err(Error::InvalidArgument(format!(
                    "atom index {j} out of range for {} atoms",
                    self.len()
                )));
            }
        }
        Ok(compensated_sum(subset.iter().map(|&j| self.probs[j])))
    }
}

/// A real random variable on a finite space: one value per atom, aligned by
/// index with the measure it is evaluated under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteRV(pub Vec<f64>);

impl FiniteRV {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn constant(value: f64, len: usize) -> Self {
        Self(vec![value; len])
    }

    /// Indicator of atom `j`.
    pub fn indicator(j: usize, len: usize) -> Self {
        let mut values = vec![0.0; len];
        values[j] = 1.0;
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Squared Hellinger distance together with the two likelihood-ratio sup norms
/// `‖(p−q)/(p∧q)‖_∞` and `‖(p−q)/(p∨q)‖_∞` (with `0/0 = 0`, `x/0 = ∞`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub hellinger_sq: f64,
    pub lr_min_norm: f64,
    pub lr_max_norm: f64,
}

/// `H²(P,Q) = 1 − Σ √(p_j q_j)`, clamped to `[0, 1]`.
pub fn hellinger_sq_discrete(p: &DiscreteMeasure, q: &DiscreteMeasure) -> Result<f64> {
    p.ensure_same_atoms(q)?;
    Ok(hellinger_sq_from_weights(p.probs(), q.probs()))
}

/// `½Σ(√p − √q)²`, which equals `1 − Σ√(pq)` on normalized weights but keeps
/// full relative precision when `P ≈ Q`.
pub(crate) fn hellinger_sq_from_weights(p: &[f64], q: &[f64]) -> f64 {
    let half_sq = 0.5 * compensated_sum(p.iter().zip(q).map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2)));
    half_sq.clamp(0.0, 1.0)
}

/// Squared Hellinger distance between `N(θ, 1)` and `N(θ', 1)` with
/// `θ − θ' = delta`: `1 − exp(−delta²/8)`.
pub fn hellinger_sq_gaussian_location(delta: f64) -> f64 {
    (-(-delta * delta / 8.0).exp_m1()).clamp(0.0, 1.0)
}

/// Squared Hellinger distance of two white noise experiments with noise level
/// `n`: `1 − exp(−(n/8)‖f − g‖₂²)`, the norm taken by grid quadrature.
pub fn hellinger_sq_gwn(f: &GridFunction, g: &GridFunction, n: f64) -> Result<f64> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise level n = {n} must be positive")));
    }
    let dist_sq = f.l2_dist_sq(g)?;
    Ok(hellinger_sq_from_l2(dist_sq, n))
}

pub(crate) fn hellinger_sq_from_l2(dist_sq: f64, n: f64) -> f64 {
    (-(-n / 8.0 * dist_sq).exp_m1()).clamp(0.0, 1.0)
}

/// Squared Hellinger distance of two Gaussian vectors with independent
/// coordinates and common variance.
pub fn hellinger_sq_product_gaussian(means1: &[f64], means2: &[f64], variance: f64) -> Result<f64> {
    if means1.len() != means2.len() {
        return Err(Error::LengthMismatch(means1.len(), means2.len()));
    }
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::InvalidArgument(format!("variance {variance} must be positive")));
    }
    let ss = compensated_sum(means1.iter().zip(means2).map(|(a, b)| (a - b) * (a - b)));
    Ok((-(-ss / (8.0 * variance)).exp_m1()).clamp(0.0, 1.0))
}

/// `|a − b| / d` with `0/0 = 0` and `x/0 = ∞`.
fn ratio_zero_convention(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Atom-wise `|p_j − q_j| / max(p_j, q_j)` with `0/0 = 0`.
pub fn lr_max_ratios(p: &DiscreteMeasure, q: &DiscreteMeasure) -> Result<Vec<f64>> {
    p.ensure_same_atoms(q)?;
    Ok(p.probs()
        .iter()
        .zip(q.probs())
        .map(|(&a, &b)| ratio_zero_convention((a - b).abs(), a.max(b)))
        .collect())
}

pub fn lr_ratio_norms(p: &DiscreteMeasure, q: &DiscreteMeasure) -> Result<DivergenceReport> {
    p.ensure_same_atoms(q)?;
    let mut lr_min_norm = 0.0_f64;
    let mut lr_max_norm = 0.0_f64;
    for (&a, &b) in p.probs().iter().zip(q.probs()) {
        let diff = (a - b).abs();
        lr_min_norm = lr_min_norm.max(ratio_zero_convention(diff, a.min(b)));
        lr_max_norm = lr_max_norm.max(ratio_zero_convention(diff, a.max(b)));
    }
    Ok(DivergenceReport {
        hellinger_sq: hellinger_sq_from_weights(p.probs(), q.probs()),
        lr_min_norm,
        lr_max_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::from_probs(p.to_vec()).unwrap()
    }

    #[test]
    fn construction_rejects_bad_weights() {
        assert!(matches!(
            DiscreteMeasure::from_probs(vec![0.5, 0.6]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            DiscreteMeasure::from_probs(vec![1.5, -0.5]),
            Err(Error::InvalidWeight { index: 1, .. })
        ));
        assert!(matches!(
            DiscreteMeasure::new(vec!["a".into(), "a".into()], vec![0.5, 0.5]),
            Err(Error::DuplicateAtom(_))
        ));
        assert!(matches!(DiscreteMeasure::from_probs(vec![]), Err(Error::Empty)));
    }

    #[test]
    fn json_shape_round_trips() {
        let p = DiscreteMeasure::new(vec!["x".into(), "y".into()], vec![0.25, 0.75]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"atoms":["x","y"],"probs":[0.25,0.75]}"#);
        let back: DiscreteMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"atoms":["x","y"],"probs":[0.25,0.25]}"#;
        assert!(serde_json::from_str::<DiscreteMeasure>(bad).is_err());
    }

    #[test]
    fn hellinger_discrete_examples() {
        let p = m(&[0.3, 0.2, 0.5]);
        assert_eq!(hellinger_sq_discrete(&p, &p).unwrap(), 0.0);
        assert_eq!(hellinger_sq_discrete(&m(&[1.0, 0.0]), &m(&[0.0, 1.0])).unwrap(), 1.0);
        let h = hellinger_sq_discrete(&m(&[0.9, 0.1]), &m(&[0.5, 0.5])).unwrap();
        let expected = 1.0 - (0.45_f64.sqrt() + 0.05_f64.sqrt());
        assert!((h - expected).abs() < 1e-15);
        assert!((h - 0.105573).abs() < 1e-6);
    }

    #[test]
    fn hellinger_equals_half_squared_root_difference() {
        let p = m(&[0.1, 0.6, 0.3]);
        let q = m(&[0.4, 0.4, 0.2]);
        let half: f64 = 0.5
            * p.probs()
                .iter()
                .zip(q.probs())
                .map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2))
                .sum::<f64>();
        assert!((hellinger_sq_discrete(&p, &q).unwrap() - half).abs() < 1e-15);
    }

    #[test]
    fn mismatched_atoms_are_rejected() {
        let p = DiscreteMeasure::new(vec!["a".into(), "b".into()], vec![0.5, 0.5]).unwrap();
        let q = DiscreteMeasure::new(vec!["a".into(), "c".into()], vec![0.5, 0.5]).unwrap();
        assert_eq!(hellinger_sq_discrete(&p, &q), Err(Error::AtomMismatch));
        assert_eq!(lr_ratio_norms(&p, &q), Err(Error::AtomMismatch));
    }

    #[test]
    fn gaussian_location_closed_form() {
        assert_eq!(hellinger_sq_gaussian_location(0.0), 0.0);
        assert!((hellinger_sq_gaussian_location(2.0) - (1.0 - (-0.5_f64).exp())).abs() < 1e-16);
        assert!((hellinger_sq_gaussian_location(2.0) - 0.393469).abs() < 1e-6);
        assert_eq!(hellinger_sq_gaussian_location(1e3), 1.0);
    }

    // Hellinger integral of two unit-variance Gaussian densities, composite
    // Simpson on [-40, 40].
    fn gaussian_hellinger_quadrature(delta: f64) -> f64 {
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let f = |x: f64| (phi(x) * phi(x - delta)).sqrt();
        let (a, b, k) = (-40.0, 40.0, 200_000usize);
        let h = (b - a) / k as f64;
        let mut s = f(a) + f(b);
        for i in 1..k {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        1.0 - s * h / 3.0
    }

    #[test]
    fn gaussian_location_matches_quadrature() {
        for &delta in &[0.5, 2.0, 4.0] {
            let q = gaussian_hellinger_quadrature(delta);
            assert!((q - hellinger_sq_gaussian_location(delta)).abs() < 1e-10, "delta {delta}");
        }
    }

    #[test]
    fn product_gaussian_examples() {
        assert_eq!(hellinger_sq_product_gaussian(&[1.0, 2.0], &[1.0, 2.0], 3.0).unwrap(), 0.0);
        let h = hellinger_sq_product_gaussian(&[2.0], &[0.0], 1.0).unwrap();
        assert!((h - hellinger_sq_gaussian_location(2.0)).abs() < 1e-16);
        // rescaling the gap by 1/sqrt(variance)
        let h4 = hellinger_sq_product_gaussian(&[3.0], &[1.0], 4.0).unwrap();
        assert!((h4 - hellinger_sq_gaussian_location(1.0)).abs() < 1e-16);
        assert!(matches!(
            hellinger_sq_product_gaussian(&[1.0], &[1.0, 2.0], 1.0),
            Err(Error::LengthMismatch(1, 2))
        ));
    }

    #[test]
    fn gwn_closed_form() {
        let f = GridFunction::from_fn(64, |_| 1.0).unwrap();
        let g = GridFunction::from_fn(64, |_| 0.0).unwrap();
        assert_eq!(hellinger_sq_gwn(&f, &f, 8.0).unwrap(), 0.0);
        let h = hellinger_sq_gwn(&f, &g, 8.0).unwrap();
        assert!((h - (1.0 - (-1.0_f64).exp())).abs() < 1e-15);
        assert!((h - 0.632121).abs() < 1e-6);
        let g32 = GridFunction::from_fn(32, |_| 0.0).unwrap();
        assert!(matches!(hellinger_sq_gwn(&f, &g32, 1.0), Err(Error::GridMismatch(64, 32))));
    }

    #[test]
    fn ratio_norm_examples() {
        let p = m(&[0.3, 0.7]);
        let r = lr_ratio_norms(&p, &p).unwrap();
        assert_eq!((r.lr_min_norm, r.lr_max_norm), (0.0, 0.0));

        let r = lr_ratio_norms(&m(&[0.9, 0.1]), &m(&[0.5, 0.5])).unwrap();
        assert!((r.lr_min_norm - 4.0).abs() < 1e-12);
        assert!((r.lr_max_norm - 0.8).abs() < 1e-12);

        let r = lr_ratio_norms(&m(&[1.0, 0.0]), &m(&[0.5, 0.5])).unwrap();
        assert_eq!(r.lr_min_norm, f64::INFINITY);
        assert_eq!(r.lr_max_norm, 1.0);
    }

    #[test]
    fn zero_zero_atoms_contribute_nothing() {
        let r = lr_ratio_norms(&m(&[0.5, 0.5, 0.0]), &m(&[0.5, 0.5, 0.0])).unwrap();
        assert_eq!(r.lr_min_norm, 0.0);
        assert_eq!(r.lr_max_norm, 0.0);
    }

    #[test]
    fn moments() {
        let p = m(&[0.9, 0.1]);
        let x = FiniteRV::new(vec![0.0, 1.0]);
        assert!((p.expect(&x).unwrap() - 0.1).abs() < 1e-16);
        assert!((p.mad(&x).unwrap() - 0.18).abs() < 1e-15);
        assert!((p.variance(&x).unwrap() - 0.09).abs() < 1e-15);
        assert!(matches!(
            p.expect(&FiniteRV::new(vec![1.0])),
            Err(Error::LengthMismatch(2, 1))
        ));
    }
}
