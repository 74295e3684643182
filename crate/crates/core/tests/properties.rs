use madbound::bounds::{
    check_cauchy_schwarz_step, check_lemma1_variance, check_lemma2, check_lemma2_chain,
    check_lemma3_first, check_quadratic_chain, check_special_case_means, lemma2_chain_quantities,
};
use madbound::holder::{holder_norm, GridFunction};
use madbound::measure::{hellinger_sq_discrete, lr_ratio_norms};
use madbound::witness::{rao_blackwell_check, tightness_witness};
use madbound::{DiscreteMeasure, FiniteRV};
use proptest::prelude::*;

/// Two measures on a common space of 2 to 20 atoms (zeros allowed), a
/// random variable, and two centers.
fn instance() -> impl Strategy<Value = (DiscreteMeasure, DiscreteMeasure, FiniteRV, f64, f64)> {
    (2usize..=20).prop_flat_map(|k| {
        let weights = prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0..1.0f64], k);
        (
            weights.clone(),
            weights,
            prop::collection::vec(-10.0..10.0f64, k),
            -10.0..10.0f64,
            -10.0..10.0f64,
        )
            .prop_filter_map("weights vanish", |(p, q, x, u, v)| {
                let p = DiscreteMeasure::from_unnormalized(&p).ok()?;
                let q = DiscreteMeasure::from_unnormalized(&q).ok()?;
                Some((p, q, FiniteRV::new(x), u, v))
            })
    })
}

fn full_support_pair() -> impl Strategy<Value = (DiscreteMeasure, DiscreteMeasure, FiniteRV)> {
    (2usize..=20).prop_flat_map(|k| {
        (
            prop::collection::vec(0.01..1.0f64, k),
            prop::collection::vec(0.01..1.0f64, k),
            prop::collection::vec(-10.0..10.0f64, k),
        )
            .prop_map(|(p, q, x)| {
                (
                    DiscreteMeasure::from_unnormalized(&p).unwrap(),
                    DiscreteMeasure::from_unnormalized(&q).unwrap(),
                    FiniteRV::new(x),
                )
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn hellinger_is_a_bounded_symmetric_metric(
        (p, q, _, _, _) in instance(),
        w in prop::collection::vec(0.0..1.0f64, 20),
    ) {
        let r = DiscreteMeasure::from_unnormalized(&w[..p.len()]);
        prop_assume!(r.is_ok());
        let r = r.unwrap();
        let pq = hellinger_sq_discrete(&p, &q).unwrap();
        let qp = hellinger_sq_discrete(&q, &p).unwrap();
        prop_assert!((0.0..=1.0).contains(&pq));
        prop_assert_eq!(pq, qp);
        prop_assert!(hellinger_sq_discrete(&p, &p).unwrap() <= 1e-15);
        let pr = hellinger_sq_discrete(&p, &r).unwrap();
        let rq = hellinger_sq_discrete(&r, &q).unwrap();
        prop_assert!(pq.sqrt() <= pr.sqrt() + rq.sqrt() + 1e-12);
    }

    #[test]
    fn lemma2_holds((p, q, x, u, v) in instance()) {
        let r = check_lemma2(&p, &q, &x, u, v).unwrap();
        prop_assert!(r.holds, "{:?}", r);
    }

    #[test]
    fn lemma2_proof_chain_holds((p, q, x, u, v) in instance()) {
        prop_assert!(check_cauchy_schwarz_step(&p, &q, &x, u, v).unwrap().holds);
        prop_assert!(check_lemma2_chain(&p, &q, &x, u, v).unwrap().holds);
        let c = lemma2_chain_quantities(&p, &q, &x, u, v).unwrap();
        let (root, sqrt) = check_quadratic_chain(c.a, c.b, c.d).unwrap();
        prop_assert!(root.holds && sqrt.holds);
        prop_assert_eq!(root.context["premise"], 1.0);
    }

    #[test]
    fn lemma2_invariant_under_swapping_roles((p, q, x, u, v) in instance()) {
        let a = check_lemma2(&p, &q, &x, u, v).unwrap();
        let b = check_lemma2(&q, &p, &x, v, u).unwrap();
        prop_assert!((a.lhs - b.lhs).abs() <= 1e-15 * a.lhs.max(1.0));
        prop_assert_eq!(a.rhs, b.rhs);
    }

    #[test]
    fn lemma2_at_means_and_lemma1_hold((p, q, x, _, _) in instance()) {
        prop_assert!(check_special_case_means(&p, &q, &x).unwrap().holds);
        let r = check_lemma1_variance(&p, &q, &x).unwrap();
        prop_assert!(r.holds, "{:?}", r);
    }

    #[test]
    fn lemma3_first_holds_on_full_support((p, q, x) in full_support_pair()) {
        let r = check_lemma3_first(&p, &q, &x).unwrap();
        prop_assert!(r.holds, "{:?}", r);
    }

    #[test]
    fn lemma3_first_trivial_when_supports_differ((p, q, x, _, _) in instance()) {
        let norms = lr_ratio_norms(&p, &q).unwrap();
        let r = check_lemma3_first(&p, &q, &x).unwrap();
        if norms.lr_min_norm.is_infinite() {
            prop_assert_eq!(r.lhs, 0.0);
        }
        prop_assert!(r.holds);
    }

    #[test]
    fn adjusted_witness_bound_holds((p, q, _, _, _) in instance()) {
        let w = tightness_witness(&p, &q).unwrap();
        prop_assert!(w.adjusted_bound_holds, "{:?}", w);
        if let Some(j) = w.selected_atom {
            let pj = p.probs()[j];
            prop_assert!((w.details["mad_p"] - 2.0 * pj * (1.0 - pj)).abs() < 1e-12);
        }
    }

    #[test]
    fn sqrt_lower_bound_on_unit_interval(d in 0.0..=1.0f64) {
        let (_, r) = check_quadratic_chain(0.0, 0.0, d).unwrap();
        prop_assert!(r.holds);
    }

    #[test]
    fn rao_blackwell_preserves_means_and_shrinks_mads(
        (p, q, x) in full_support_pair(),
        mask in prop::collection::vec(any::<bool>(), 20),
    ) {
        let k = p.len();
        let mut subset: Vec<usize> = (0..k).filter(|&j| mask[j]).collect();
        if subset.len() < 2 {
            subset = vec![0, 1];
        }
        // Make E_P[X | A] = E_Q[X | A] by giving Q the conditional law of P on A.
        let mass_p: f64 = subset.iter().map(|&j| p.probs()[j]).sum();
        let mass_q: f64 = subset.iter().map(|&j| q.probs()[j]).sum();
        let mut qw = q.probs().to_vec();
        for &j in &subset {
            qw[j] = p.probs()[j] / mass_p * mass_q;
        }
        let q = DiscreteMeasure::from_unnormalized(&qw).unwrap();
        let r = rao_blackwell_check(&x, &subset, &p, &q).unwrap();
        prop_assert!(r.means_preserved && r.mads_nonincreasing, "{:?}", r);
    }

    #[test]
    fn holder_norm_monotone_under_triadic_refinement(
        beta in 0.1..=1.0f64,
        freq in 0.5..6.0f64,
        phase in 0.0..6.3f64,
        m in 4usize..40,
    ) {
        let f = |x: f64| (freq * x + phase).sin() + 0.3 * (x - 0.4).abs().sqrt();
        let coarse = holder_norm(&GridFunction::from_fn(m, f).unwrap(), beta).unwrap();
        let fine = holder_norm(&GridFunction::from_fn(3 * m, f).unwrap(), beta).unwrap();
        prop_assert!(fine >= coarse - 1e-12, "{fine} < {coarse}");
    }
}

#[test]
fn indicator_moments_on_p_grid() {
    for i in 0..=100 {
        let p = i as f64 / 100.0;
        let m = DiscreteMeasure::from_probs(vec![p, 1.0 - p]).unwrap();
        let x = FiniteRV::indicator(0, 2);
        assert!((m.expect(&x).unwrap() - p).abs() < 1e-15);
        assert!((m.mad(&x).unwrap() - 2.0 * p * (1.0 - p)).abs() < 1e-15);
    }
}

#[test]
fn lemma1_on_nearly_equal_measures() {
    // Exact slack is +1.2e-11 relative; `1 − Σ√(pq)` loses it to cancellation.
    let p = DiscreteMeasure::from_probs(vec![0.49991095051170076, 0.5000890494882994]).unwrap();
    let q = DiscreteMeasure::from_probs(vec![0.49812040452036516, 0.5018795954796348]).unwrap();
    let x = FiniteRV::new(vec![8.841549751027422, 0.3629456194572356]);
    let h2 = hellinger_sq_discrete(&p, &q).unwrap();
    assert!((h2 / 1.6030349710823822e-6 - 1.0).abs() < 1e-12, "{h2}");
    let r = check_lemma1_variance(&p, &q, &x).unwrap();
    assert!(r.slack > 0.0, "{r:?}");
}
