//! Random finite instances `(P, Q, X, u, v)` for the randomized inequality
//! suites and the tightness search.

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::measure::{DiscreteMeasure, FiniteRV};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub p: DiscreteMeasure,
    pub q: DiscreteMeasure,
    pub x: FiniteRV,
    pub u: f64,
    pub v: f64,
}

/// RNG for stream `stream` of `seed`; independent streams never overlap.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw from the probability simplex (flat Dirichlet). When
/// `full_support` is false, each atom is zeroed with probability 1/4 (at least
/// one atom always keeps mass).
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, size: usize, full_support: bool) -> Vec<f64> {
    assert!(size >= 1);
    let mut w: Vec<f64> = (0..size)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    if !full_support {
        let keep = rng.random_range(0..size);
        for (j, wj) in w.iter_mut().enumerate() {
            if j != keep && rng.random::<f64>() < 0.25 {
                *wj = 0.0;
            }
        }
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

pub fn random_measure<R: Rng + ?Sized>(rng: &mut R, size: usize, full_support: bool) -> DiscreteMeasure {
    // Renormalization inside `from_unnormalized` absorbs the round-off of the
    // division above.
    DiscreteMeasure::from_unnormalized(&random_simplex(rng, size, full_support))
        .expect("simplex draw is a valid measure")
}

/// Random instance on `size` atoms with `X ∈ [−10, 10]^size` and
/// `u, v ∈ [−10, 10]`.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, size: usize, full_support: bool) -> Instance {
    let p = random_measure(rng, size, full_support);
    let q = random_measure(rng, size, full_support);
    let x = FiniteRV::new((0..size).map(|_| rng.random_range(-10.0..=10.0)).collect());
    let u = rng.random_range(-10.0..=10.0);
    let v = rng.random_range(-10.0..=10.0);
    Instance { p, q, x, u, v }
}

/// Instance plus an atom set `A` with `P(A), Q(A) > 0` and
/// `E_P[X | A] = E_Q[X | A]`: `A` is drawn first (at least two atoms), then one
/// value of `X` on `A` is solved for so the conditional means agree.
pub fn random_rao_blackwell_instance<R: Rng + ?Sized>(rng: &mut R, size: usize) -> (Instance, Vec<usize>) {
    assert!(size >= 2);
    let mut inst = random_instance(rng, size, true);
    let mut subset: Vec<usize> = (0..size).filter(|_| rng.random_bool(0.5)).collect();
    while subset.len() < 2 {
        let j = rng.random_range(0..size);
        if !subset.contains(&j) {
            subset.push(j);
        }
    }
    subset.sort_unstable();
    let (p, q) = (inst.p.probs(), inst.q.probs());
    let mass_p: f64 = subset.iter().map(|&j| p[j]).sum();
    let mass_q: f64 = subset.iter().map(|&j| q[j]).sum();
    // E_P[X|A] − E_Q[X|A] is affine in x_j with slope p_j/P(A) − q_j/Q(A).
    let slope = |j: usize| p[j] / mass_p - q[j] / mass_q;
    let pivot = *subset
        .iter()
        .max_by(|&&a, &&b| slope(a).abs().total_cmp(&slope(b).abs()))
        .expect("subset is nonempty");
    if slope(pivot).abs() > 1e-9 {
        let x = &mut inst.x.0;
        x[pivot] = 0.0;
        let gap: f64 = subset.iter().map(|&j| slope(j) * x[j]).sum();
        x[pivot] = -gap / slope(pivot);
    }
    (inst, subset)
}
