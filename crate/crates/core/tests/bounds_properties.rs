use pipegate::bounds::{
    evaluate, max_model_time, min_extra_ratio, min_validator_time, Headroom, PipelineConfig, Verdict,
};
use pipegate::metrics::ClassifierSpec;
use pipegate::scalar::exact;
use pipegate::Exact;
use proptest::prelude::*;

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

#[derive(Debug, Clone, Copy)]
struct Setup {
    pi: f64,
    n: f64,
    r_v: f64,
    tau_v: f64,
    r_m: f64,
    p_m: f64,
}

fn setup() -> impl Strategy<Value = Setup> {
    (
        0.01..0.9_f64,
        1.0..1e6_f64,
        0.05..=1.0_f64,
        0.01..1e4_f64,
        0.05..=1.0_f64,
        0.0..1.0_f64,
    )
        .prop_map(|(pi, n, r_v, tau_v, r_m, headroom)| Setup {
            pi,
            n,
            r_v,
            tau_v,
            r_m,
            // Strictly between π and 1.
            p_m: pi + (1.0 - pi) * (0.001 + 0.998 * headroom),
        })
}

fn pipeline(s: &Setup, tau_m: f64) -> PipelineConfig<f64> {
    PipelineConfig {
        prevalence: s.pi,
        n: s.n,
        validator: ClassifierSpec::new(1.0, s.r_v)
            .and_then(|v| v.with_latency(s.tau_v))
            .unwrap(),
        screener: ClassifierSpec::new(s.p_m, s.r_m)
            .and_then(|m| m.with_latency(tau_m))
            .unwrap(),
    }
}

fn relaxed(s: &Setup) -> f64 {
    max_model_time(s.tau_v, s.r_m, s.p_m, s.pi, None)
        .unwrap()
        .available()
        .unwrap()
        .relaxed
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn both_requirements_bind_at_the_bounds(s in setup()) {
        let extra = min_extra_ratio(s.r_m).unwrap();
        let bound = max_model_time(s.tau_v, s.r_m, s.p_m, s.pi, Some(extra)).unwrap().available().unwrap();
        let tau_m = bound.tight.unwrap();
        prop_assume!(tau_m >= 0.0);
        let report = evaluate(&pipeline(&s, tau_m), extra).unwrap();
        prop_assert!(rel_close(report.augmented_tp, report.baseline_tp, 1e-9));
        prop_assert!(rel_close(report.augmented_time, report.baseline_time, 1e-9));
        prop_assert_eq!(report.verdict, Verdict::Boundary);
    }

    #[test]
    fn tight_never_exceeds_relaxed_beyond_minimum(s in setup(), more in 0.0..2.0_f64) {
        let extra = min_extra_ratio(s.r_m).unwrap() + more;
        let bound = max_model_time(s.tau_v, s.r_m, s.p_m, s.pi, Some(extra)).unwrap().available().unwrap();
        prop_assert!(bound.tight.unwrap() <= bound.relaxed * (1.0 + 1e-12));
    }

    #[test]
    fn time_budget_never_exceeds_validator_time(s in setup()) {
        let extra = min_extra_ratio(s.r_m).unwrap();
        let bound = max_model_time(s.tau_v, s.r_m, s.p_m, s.pi, Some(extra)).unwrap().available().unwrap();
        prop_assert!(bound.tight.unwrap() <= s.tau_v);
        prop_assert!(bound.relaxed <= s.tau_v);
    }

    #[test]
    fn min_extra_ratio_decreases_with_recall(a in 0.01..0.99_f64, step in 0.001..1.0_f64) {
        let b = a + (1.0 - a) * step;
        prop_assert!(min_extra_ratio(a).unwrap() > min_extra_ratio(b).unwrap());
    }

    #[test]
    fn budget_grows_with_validator_time(s in setup(), factor in 1.01..10.0_f64) {
        let slower = Setup { tau_v: s.tau_v * factor, ..s };
        prop_assert!(relaxed(&slower) > relaxed(&s));
    }

    #[test]
    fn budget_grows_with_precision(s in setup(), bump in 0.01..1.0_f64) {
        let better = Setup { p_m: s.p_m + (1.0 - s.p_m) * bump, ..s };
        prop_assume!(better.p_m > s.p_m);
        prop_assert!(relaxed(&better) > relaxed(&s));
    }

    #[test]
    fn budget_shrinks_with_prevalence(s in setup(), shrink in 0.01..0.99_f64) {
        let lower = Setup { pi: s.pi * shrink, ..s };
        prop_assert!(relaxed(&lower) > relaxed(&s));
    }

    #[test]
    fn min_validator_time_inverts_relaxed_budget(s in setup(), tau_m in 0.01..1e3_f64) {
        let floor = min_validator_time(tau_m, s.r_m, s.p_m, s.pi).unwrap().available().unwrap();
        let at_floor = Setup { tau_v: floor, ..s };
        prop_assert!(rel_close(relaxed(&at_floor), tau_m, 1e-9));
    }

    #[test]
    fn no_headroom_means_no_convenience(s in setup(), tau_m in 0.001..1e3_f64, extra in 0.0..3.0_f64) {
        let flat = Setup { p_m: s.pi, ..s };
        let report = evaluate(&pipeline(&flat, tau_m), extra).unwrap();
        let rejected = matches!(report.verdict, Verdict::NotConvenient { .. });
        prop_assert!(rejected);
    }
}

#[test]
fn exact_boundary_is_exact() {
    let pi: Exact = exact(38, 100);
    let r_m = exact(95, 100);
    let p_m = exact(9371, 10_000);
    let tau_v = exact(2704, 100);
    let extra = min_extra_ratio(r_m).unwrap();
    assert_eq!(extra, exact(1, 19));
    let bound = match max_model_time(tau_v, r_m, p_m, pi, Some(extra)).unwrap() {
        Headroom::Available(b) => b,
        Headroom::Exhausted => unreachable!(),
    };
    assert_eq!(bound.tight, Some(bound.relaxed));
}
