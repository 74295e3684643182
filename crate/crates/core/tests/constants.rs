//! Kernel and frontier constants against oracles written independently of the
//! library's quadrature and closed forms.

use madbound::frontier::{mad_frontier, theorem1_constants, FrontierSpec};
use madbound::holder::bump_kernel;

fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
    h * (0.5 * f(a) + inner + 0.5 * f(b))
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn l2_norm_matches_trapezoid_and_simpson() {
    let k = bump_kernel(1.0).unwrap();
    let trap = trapezoid(|x| bump(x).powi(2), -1.0, 1.0, 1_000_000);
    let simp = simpson(|x| bump(x).powi(2), -1.0, 1.0, 200_000);
    assert!((k.l2_norm_sq - trap).abs() <= 1e-8 * trap, "{} vs {trap}", k.l2_norm_sq);
    assert!((k.l2_norm_sq - simp).abs() <= 1e-8 * simp, "{} vs {simp}", k.l2_norm_sq);
}

#[test]
fn c1_norm_matches_dense_sampling() {
    let k = bump_kernel(1.0).unwrap();
    // Central differences of the closed form on a dense grid.
    let steps = 2_000_000;
    let h = 2.0 / steps as f64;
    let mut sup_d = 0f64;
    for i in 1..steps {
        let x = -1.0 + i as f64 * h;
        sup_d = sup_d.max(((bump(x + 1e-7) - bump(x - 1e-7)) / 2e-7).abs());
    }
    let oracle = 1.0 + sup_d;
    assert!((k.holder_norm - oracle).abs() < 1e-6, "{} vs {oracle}", k.holder_norm);
}

#[test]
fn pinned_kernel_constants() {
    let k = bump_kernel(1.0).unwrap();
    assert!((k.l2_norm_sq - 0.983_380_812_912_726).abs() < 1e-12);
    assert!((k.holder_norm - 3.170_357_085_710_339).abs() < 1e-12);
}

#[test]
fn c_and_n_match_independent_plugging() {
    // β = R = C = 1, x₀ = 1/2: the proof's final display evaluated from the
    // oracle kernel constants.
    let l2 = trapezoid(|x| bump(x).powi(2), -1.0, 1.0, 1_000_000);
    let x_star = 3f64.powf(-0.25);
    let s = 1.0 - x_star * x_star;
    let norm = 1.0 + 2.0 * x_star * bump(x_star) / (s * s);
    let v = 1.0 / norm;
    let c_oracle = 0.2 * (-(2.0 / v) * l2).exp();
    let n_oracle = (2.0 / v).powi(3) * 0.5f64.powi(-3);

    let spec = FrontierSpec::new(1.0, 1.0, 1.0, 0.5).unwrap();
    let k = theorem1_constants(&spec);
    assert!((k.c - c_oracle).abs() <= 1e-7 * c_oracle, "{} vs {c_oracle}", k.c);
    assert!((k.n_min - n_oracle).abs() <= 1e-7 * n_oracle, "{} vs {n_oracle}", k.n_min);

    // Goldens.
    assert!((k.c - 3.917_939_207_533_103e-4).abs() < 1e-15);
    assert!((k.n_min - 2_039.409_866_780_893).abs() < 1e-9);
}

#[test]
fn frontier_at_pinned_n() {
    let spec = FrontierSpec::new(1.0, 1.0, 1.0, 0.5).unwrap();
    let k = theorem1_constants(&spec);
    let p = mad_frontier(&spec, &[8.0 * 8.0 * 8.0 * 8.0]).unwrap()[0];
    assert!((p.psi_n - 1.0 / 16.0).abs() < 1e-15);
    assert!((p.mad_lower - k.c / 16.0).abs() < 1e-18);
}
