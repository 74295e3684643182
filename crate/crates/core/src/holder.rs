//! Functions on a uniform grid of `[0, 1]`, the compactly supported bump
//! kernel, Hölder norms, and the two-point family `f_θ = θ·V·r^β·K((x − x₀)/r)`.
//!
//! The Hölder norm of order `β` with `k` the largest integer strictly below
//! `β` is
//!
//! ```text
//! ‖f‖_β = Σ_{ℓ ≤ k} ‖f^(ℓ)‖_∞ + sup_{x ≠ y} |f^(k)(x) − f^(k)(y)| / |x − y|^(β − k)
//! ```
//!
//! On a grid every term is a supremum over finitely many points, so grid
//! norms are lower estimates of the norm of the underlying function.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, fmt17};

/// Values at the cell centers `x_j = (j + ½)/m`, `j = 0..m`, read as a
/// piecewise-linear function that is constant beyond the outermost centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 points, got {}",
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value at grid point {j}")));
        }
        Ok(Self { values })
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..m).map(|j| f(grid_point(j, m))).collect())
    }

    pub fn zeros(m: usize) -> Result<Self> {
        Self::new(vec![0.0; m])
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn x(&self, j: usize) -> f64 {
        grid_point(j, self.m())
    }

    fn ensure_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.m() != other.m() {
            return Err(Error::GridMismatch(self.m(), other.m()));
        }
        Ok(())
    }

    /// Piecewise-linear interpolant.
    pub fn value(&self, x: f64) -> f64 {
        let m = self.m();
        let t = x * m as f64 - 0.5;
        if t <= 0.0 {
            return self.values[0];
        }
        if t >= (m - 1) as f64 {
            return self.values[m - 1];
        }
        let j = t.floor() as usize;
        let frac = t - j as f64;
        self.values[j] + frac * (self.values[j + 1] - self.values[j])
    }

    /// `∫_0^x` of the interpolant.
    fn antiderivative(&self, x: f64, node_integrals: &[f64]) -> f64 {
        let m = self.m();
        let h = 1.0 / m as f64;
        let first = 0.5 * h;
        if x <= first {
            return x * self.values[0];
        }
        let last = (m as f64 - 0.5) * h;
        if x >= last {
            return node_integrals[m - 1] + (x - last) * self.values[m - 1];
        }
        let t = (x - first) / h;
        let j = (t.floor() as usize).min(m - 2);
        let s = t - j as f64;
        let (a, b) = (self.values[j], self.values[j + 1]);
        node_integrals[j] + h * (a * s + 0.5 * (b - a) * s * s)
    }

    /// Exact averages of the interpolant over `bins` equal cells of `[0, 1]`.
    pub fn bin_averages(&self, bins: usize) -> Vec<f64> {
        let m = self.m();
        let h = 1.0 / m as f64;
        let mut node_integrals = Vec::with_capacity(m);
        node_integrals.push(0.5 * h * self.values[0]);
        for j in 1..m {
            let prev = node_integrals[j - 1];
            node_integrals.push(prev + 0.5 * h * (self.values[j - 1] + self.values[j]));
        }
        let width = 1.0 / bins as f64;
        let mut lo = 0.0;
        (0..bins)
            .map(|k| {
                let hi = self.antiderivative((k + 1) as f64 * width, &node_integrals);
                let avg = (hi - lo) / width;
                lo = hi;
                avg
            })
            .collect()
    }

    /// Midpoint-rule `‖f‖₂²`.
    pub fn l2_norm_sq(&self) -> f64 {
        compensated_sum(self.values.iter().map(|v| v * v)) / self.m() as f64
    }

    pub fn l2_dist_sq(&self, other: &GridFunction) -> Result<f64> {
        self.ensure_same_grid(other)?;
        Ok(compensated_sum(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b) * (a - b)),
        ) / self.m() as f64)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.ensure_same_grid(other)?;
        GridFunction::new(self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect())
    }

    pub fn scaled(&self, factor: f64) -> GridFunction {
        GridFunction {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |s, v| s.max(v.abs()))
    }

    /// `x,value` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value\n");
        for (j, v) in self.values.iter().enumerate() {
            out.push_str(&fmt17(self.x(j)));
            out.push(',');
            out.push_str(&fmt17(*v));
            out.push('\n');
        }
        out
    }

    /// Parses the output of [`GridFunction::to_csv`]; the `x` column is checked
    /// against the cell centers.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        match rows.next() {
            Some(h) if h.trim() == "x,value" => {}
            _ => return Err(Error::InvalidArgument("missing `x,value` header".into())),
        }
        let parsed: Vec<(f64, f64)> = rows
            .enumerate()
            .map(|(i, line)| {
                let mut cols = line.split(',');
                let parse = |c: Option<&str>| {
                    c.and_then(|s| s.trim().parse::<f64>().ok()).ok_or_else(|| {
                        Error::InvalidArgument(format!("malformed row {}: `{line}`", i + 2))
                    })
                };
                Ok((parse(cols.next())?, parse(cols.next())?))
            })
            .collect::<Result<_>>()?;
        let m = parsed.len();
        for (j, (x, _)) in parsed.iter().enumerate() {
            if (x - grid_point(j, m)).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "row {j}: x = {x} is not the cell center {}",
                    grid_point(j, m)
                )));
            }
        }
        GridFunction::new(parsed.into_iter().map(|(_, v)| v).collect())
    }
}

pub fn grid_point(j: usize, m: usize) -> f64 {
    (j as f64 + 0.5) / m as f64
}

/// Largest integer strictly smaller than `beta`.
pub fn holder_floor(beta: f64) -> usize {
    (beta.ceil() as usize).saturating_sub(1)
}

const BUMP_SUPPORT: f64 = 1.0;

/// `K(x) = exp(1 − 1/(1 − x²))` on `(−1, 1)`, zero elsewhere, with its
/// cached `‖K‖₂²` and Hölder norm for the configured `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub beta: f64,
    pub support_radius: f64,
    pub l2_norm_sq: f64,
    pub holder_norm: f64,
}

impl KernelSpec {
    pub fn value(&self, x: f64) -> f64 {
        bump_derivative(x, 0)
    }

    pub fn derivative(&self, x: f64, order: usize) -> f64 {
        bump_derivative(x, order)
    }
}

/// `K^(order)(x)` for `order ≤ 2`.
fn bump_derivative(x: f64, order: usize) -> f64 {
    if x.abs() >= BUMP_SUPPORT {
        return 0.0;
    }
    let s = 1.0 - x * x;
    let k = (1.0 - 1.0 / s).exp();
    match order {
        0 => k,
        1 => -2.0 * x * k / (s * s),
        2 => k * (4.0 * x * x / s.powi(4) - 2.0 / (s * s) - 8.0 * x * x / s.powi(3)),
        _ => panic!("bump derivative of order {order} not implemented"),
    }
}

/// Builds the bump kernel and computes its norms for smoothness `beta`.
pub fn bump_kernel(beta: f64) -> Result<KernelSpec> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta = {beta} must be positive")));
    }
    if holder_floor(beta) > 2 {
        return Err(Error::Unsupported(format!(
            "kernel Hölder norm for beta = {beta} > 3"
        )));
    }
    let l2 = quadrature::double_exponential::integrate(|x| bump_derivative(x, 0).powi(2), -1.0, 1.0, 1e-15)
        .integral;
    Ok(KernelSpec {
        beta,
        support_radius: BUMP_SUPPORT,
        l2_norm_sq: l2,
        holder_norm: bump_holder_norm(beta),
    })
}

/// `sup |K'|` is attained where `K'' = 0`, i.e. at `x² = 1/√3`.
fn bump_first_derivative_sup() -> f64 {
    bump_derivative(3f64.powf(-0.25), 1).abs()
}

/// Dense sampling of `|g|` on the support, refined by golden-section search
/// around the best sample.
fn dense_sup(g: impl Fn(f64) -> f64) -> f64 {
    const N: usize = 20_000;
    let step = 2.0 / N as f64;
    let (mut best_x, mut best) = (0.0, 0.0);
    for i in 0..=N {
        let x = -1.0 + i as f64 * step;
        let v = g(x).abs();
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let (mut a, mut b) = ((best_x - step).max(-1.0), (best_x + step).min(1.0));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if g(c).abs() > g(d).abs() {
            b = d;
        } else {
            a = c;
        }
    }
    best.max(g(0.5 * (a + b)).abs())
}

/// `sup |g(x) − g(y)| / |x − y|^alpha` over a dense grid of `[−1, 1]`; `g`
/// vanishes outside, so pairs leaving the support never do better.
fn dense_holder_quotient(g: impl Fn(f64) -> f64 + Sync, alpha: f64) -> f64 {
    if alpha >= 1.0 {
        const N: usize = 200_000;
        let step = 2.0 / N as f64;
        let vals: Vec<f64> = (0..=N).map(|i| g(-1.0 + i as f64 * step)).collect();
        return vals.windows(2).fold(0.0, |s, w| s.max((w[1] - w[0]).abs() / step));
    }
    const N: usize = 2_000;
    let step = 2.0 / N as f64;
    let vals: Vec<f64> = (0..=N).map(|i| g(-1.0 + i as f64 * step)).collect();
    (0..=N)
        .into_par_iter()
        .map(|i| {
            let mut best = 0.0_f64;
            for j in (i + 1)..=N {
                let dist = (j - i) as f64 * step;
                best = best.max((vals[j] - vals[i]).abs() / dist.powf(alpha));
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

fn bump_holder_norm(beta: f64) -> f64 {
    let k = holder_floor(beta);
    let alpha = beta - k as f64;
    let sup = |order: usize| match order {
        0 => 1.0,
        1 => bump_first_derivative_sup(),
        _ => dense_sup(|x| bump_derivative(x, 2)),
    };
    let derivative_terms: f64 = (0..=k).map(sup).sum();
    let quotient = if alpha >= 1.0 && k < 2 {
        // Lipschitz constant of K^(k) is sup |K^(k+1)|.
        sup(k + 1)
    } else {
        dense_holder_quotient(|x| bump_derivative(x, k), alpha)
    };
    derivative_terms + quotient
}

/// Central differences in the interior, one-sided at the two ends.
fn grid_derivative(values: &[f64], spacing: f64) -> Vec<f64> {
    let m = values.len();
    (0..m)
        .map(|j| match j {
            0 => (values[1] - values[0]) / spacing,
            j if j == m - 1 => (values[m - 1] - values[m - 2]) / spacing,
            j => (values[j + 1] - values[j - 1]) / (2.0 * spacing),
        })
        .collect()
}

fn grid_holder_quotient(values: &[f64], spacing: f64, alpha: f64) -> f64 {
    if alpha >= 1.0 {
        // Every chord slope is an average of adjacent slopes.
        return values
            .windows(2)
            .fold(0.0, |s, w| s.max((w[1] - w[0]).abs() / spacing));
    }
    let m = values.len();
    (0..m)
        .into_par_iter()
        .map(|i| {
            let mut best = 0.0_f64;
            for j in (i + 1)..m {
                let dist = (j - i) as f64 * spacing;
                best = best.max((values[j] - values[i]).abs() / dist.powf(alpha));
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Grid estimate of the Hölder norm on `[0, 1]`; a lower estimate of the
/// norm of the function the grid samples. Supports `0 < β ≤ 2`.
pub fn holder_norm(f: &GridFunction, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("beta = {beta} must be positive")));
    }
    if beta > 2.0 {
        return Err(Error::Unsupported(format!("grid Hölder norm for beta = {beta} > 2")));
    }
    let k = holder_floor(beta);
    let alpha = beta - k as f64;
    let spacing = 1.0 / f.m() as f64;
    let mut derivative = f.values().to_vec();
    let mut total = f.sup_norm();
    for _ in 0..k {
        derivative = grid_derivative(&derivative, spacing);
        total += derivative.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    }
    Ok(total + grid_holder_quotient(&derivative, spacing, alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderBallCheck {
    pub inside: bool,
    pub norm: f64,
    /// `R − norm`.
    pub margin: f64,
}

pub fn check_in_holder_ball(f: &GridFunction, beta: f64, radius: f64) -> Result<HolderBallCheck> {
    let norm = holder_norm(f, beta)?;
    Ok(HolderBallCheck {
        inside: norm <= radius,
        norm,
        margin: radius - norm,
    })
}

/// One member `f_θ` of the two-point family at noise level `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub beta: f64,
    pub radius: f64,
    pub c_const: f64,
    pub n: f64,
    /// `R / ‖K‖_β`.
    pub v: f64,
    /// `(2/V)^{1/β} (C/n)^{1/(2β+1)}`.
    pub r_n: f64,
    pub theta: f64,
    pub x0: f64,
}

impl FamilySpec {
    pub fn new(
        kernel: &KernelSpec,
        radius: f64,
        c_const: f64,
        n: f64,
        theta: f64,
        x0: f64,
    ) -> Result<Self> {
        if !(radius > 0.0 && c_const > 0.0 && n > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need R, C, n > 0 (R = {radius}, C = {c_const}, n = {n})"
            )));
        }
        if theta.abs() > 1.0 {
            return Err(Error::InvalidArgument(format!("|theta| = {} > 1", theta.abs())));
        }
        if !(0.0..=1.0).contains(&x0) {
            return Err(Error::InvalidArgument(format!("x0 = {x0} outside [0, 1]")));
        }
        let beta = kernel.beta;
        let v = radius / kernel.holder_norm;
        Ok(Self {
            beta,
            radius,
            c_const,
            n,
            v,
            r_n: family_bandwidth(beta, v, c_const, n),
            theta,
            x0,
        })
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        if theta.abs() > 1.0 {
            return Err(Error::InvalidArgument(format!("|theta| = {} > 1", theta.abs())));
        }
        Ok(Self { theta, ..*self })
    }

    /// Analytic value `θ·V·r_n^β·K((x − x₀)/r_n)`.
    pub fn value(&self, kernel: &KernelSpec, x: f64) -> f64 {
        self.theta * (self.v * self.r_n.powf(self.beta) * kernel.value((x - self.x0) / self.r_n))
    }

    /// `f_θ(x₀) = θ·V·r_n^β`.
    pub fn peak(&self) -> f64 {
        self.theta * self.v * self.r_n.powf(self.beta)
    }

    /// Smallest `n` with `r_n ≤ limit`.
    pub fn n_for_bandwidth(&self, limit: f64) -> f64 {
        n_for_bandwidth(self.beta, self.v, self.c_const, limit)
    }

    /// `∫ f_θ² = θ²·V²·r_n^{2β+1}·‖K‖₂²` when the support lies in `[0, 1]`.
    pub fn l2_norm_sq(&self, kernel: &KernelSpec) -> f64 {
        self.theta.powi(2) * self.v.powi(2) * self.r_n.powf(2.0 * self.beta + 1.0) * kernel.l2_norm_sq
    }

    pub fn support_inside(&self) -> bool {
        self.r_n <= self.x0.min(1.0 - self.x0)
    }
}

pub fn family_bandwidth(beta: f64, v: f64, c_const: f64, n: f64) -> f64 {
    (2.0 / v).powf(1.0 / beta) * (c_const / n).powf(1.0 / (2.0 * beta + 1.0))
}

pub fn n_for_bandwidth(beta: f64, v: f64, c_const: f64, limit: f64) -> f64 {
    c_const * (2.0 / v).powf((2.0 * beta + 1.0) / beta) * limit.powf(-(2.0 * beta + 1.0))
}

/// Samples `f_θ` at the `m` cell centers. Requires `r_n ≤ 1`.
pub fn build_family_member(spec: &FamilySpec, kernel: &KernelSpec, m: usize) -> Result<GridFunction> {
    if spec.r_n > 1.0 {
        return Err(Error::BandwidthTooLarge {
            r_n: spec.r_n,
            limit: 1.0,
            n_min: spec.n_for_bandwidth(1.0),
        });
    }
    GridFunction::from_fn(m, |x| spec.value(kernel, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_is_strict() {
        assert_eq!(holder_floor(1.0), 0);
        assert_eq!(holder_floor(0.5), 0);
        assert_eq!(holder_floor(1.5), 1);
        assert_eq!(holder_floor(2.0), 1);
        assert_eq!(holder_floor(2.1), 2);
    }

    #[test]
    fn grid_requires_two_points() {
        assert!(GridFunction::new(vec![1.0]).is_err());
        assert!(GridFunction::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn interpolation_and_extrapolation() {
        let f = GridFunction::new(vec![0.0, 1.0, 4.0, 9.0]).unwrap();
        assert_eq!(f.value(0.125), 0.0);
        assert_eq!(f.value(0.0), 0.0);
        assert_eq!(f.value(1.0), 9.0);
        assert!((f.value(0.25) - 0.5).abs() < 1e-15);
        assert!((f.value(0.75) - 6.5).abs() < 1e-15);
    }

    #[test]
    fn bin_averages_of_linear_function() {
        let f = GridFunction::from_fn(8, |x| 2.0 * x).unwrap();
        // Inside the outer half-cells the interpolant is exactly 2x.
        let avgs = f.bin_averages(8);
        for (j, a) in avgs.iter().enumerate().skip(1).take(6) {
            assert!((a - 2.0 * grid_point(j, 8)).abs() < 1e-14, "bin {j}");
        }
        // Averages preserve the integral.
        let total: f64 = f.bin_averages(5).iter().sum::<f64>() / 5.0;
        let total_fine: f64 = f.bin_averages(40).iter().sum::<f64>() / 40.0;
        assert!((total - total_fine).abs() < 1e-14);
    }

    #[test]
    fn holder_norm_of_constant() {
        let f = GridFunction::from_fn(50, |_| -3.0).unwrap();
        assert_eq!(holder_norm(&f, 1.0).unwrap(), 3.0);
        assert_eq!(holder_norm(&f, 0.5).unwrap(), 3.0);
        assert!(holder_norm(&f, 2.5).is_err());
    }

    #[test]
    fn holder_norm_of_identity_converges_to_two() {
        let mut prev = 0.0;
        for &m in &[8usize, 64, 512, 4096] {
            let f = GridFunction::from_fn(m, |x| x).unwrap();
            let n = holder_norm(&f, 1.0).unwrap();
            assert!(n <= 2.0 + 1e-12 && n >= prev);
            prev = n;
        }
        assert!((prev - 2.0).abs() < 1e-3);
    }

    #[test]
    fn holder_ball_membership() {
        let z = GridFunction::zeros(16).unwrap();
        let c = check_in_holder_ball(&z, 1.0, 1.5).unwrap();
        assert!(c.inside);
        assert_eq!(c.margin, 1.5);
        let big = GridFunction::from_fn(16, |_| 2.0).unwrap();
        assert!(!check_in_holder_ball(&big, 1.0, 1.0).unwrap().inside);
    }

    #[test]
    fn bump_basic_values() {
        let k = bump_kernel(1.0).unwrap();
        assert_eq!(k.value(0.0), 1.0);
        assert_eq!(k.value(1.0), 0.0);
        assert_eq!(k.value(-1.0), 0.0);
        assert_eq!(k.value(3.0), 0.0);
        assert!(k.l2_norm_sq > 0.0 && k.l2_norm_sq.is_finite());
        assert!(bump_kernel(0.0).is_err());
        assert!(bump_kernel(3.5).is_err());
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let h = 1e-5;
        for &x in &[-0.9, -0.5, 0.0, 0.3, 0.76, 0.95] {
            let d1 = (bump_derivative(x + h, 0) - bump_derivative(x - h, 0)) / (2.0 * h);
            let d2 = (bump_derivative(x + h, 1) - bump_derivative(x - h, 1)) / (2.0 * h);
            assert!((d1 - bump_derivative(x, 1)).abs() < 1e-6 * (1.0 + d1.abs()), "K' at {x}");
            assert!((d2 - bump_derivative(x, 2)).abs() < 1e-5 * (1.0 + d2.abs()), "K'' at {x}");
        }
    }

    #[test]
    fn family_member_is_linear_in_theta() {
        let k = bump_kernel(1.0).unwrap();
        let one = FamilySpec::new(&k, 1.0, 1.0, 4096.0, 1.0, 0.5).unwrap();
        let f1 = build_family_member(&one, &k, 256).unwrap();
        for &t in &[-1.0, -0.3, 0.0, 0.6] {
            let ft = build_family_member(&one.with_theta(t).unwrap(), &k, 256).unwrap();
            for (a, b) in ft.values().iter().zip(f1.values()) {
                assert_eq!(*a, t * b);
            }
        }
        let zero = build_family_member(&one.with_theta(0.0).unwrap(), &k, 64).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn family_peak_is_twice_budget() {
        let k = bump_kernel(1.0).unwrap();
        let spec = FamilySpec::new(&k, 1.0, 1.0, 4096.0, 1.0, 0.5).unwrap();
        let budget = (1.0_f64 / 4096.0).powf(1.0 / 3.0);
        assert!((spec.peak() - 2.0 * budget).abs() < 1e-14);
        assert_eq!(spec.value(&k, 0.5), spec.peak());
    }

    #[test]
    fn family_requires_small_bandwidth() {
        let k = bump_kernel(1.0).unwrap();
        let spec = FamilySpec::new(&k, 1.0, 1.0, 10.0, 1.0, 0.5).unwrap();
        match build_family_member(&spec, &k, 64) {
            Err(Error::BandwidthTooLarge { n_min, .. }) => {
                let ok = FamilySpec::new(&k, 1.0, 1.0, n_min * (1.0 + 1e-12), 1.0, 0.5).unwrap();
                assert!(ok.r_n <= 1.0);
            }
            other => panic!("expected BandwidthTooLarge, got {other:?}"),
        }
        assert!(FamilySpec::new(&k, 1.0, 1.0, 10.0, 1.5, 0.5).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let f = GridFunction::from_fn(7, |x| (3.0 * x).sin() / 3.0).unwrap();
        let back = GridFunction::from_csv(&f.to_csv()).unwrap();
        assert_eq!(back, f);
        assert!(GridFunction::from_csv("a,b\n0.1,2\n").is_err());
    }
}
