//! Acceptance gate: one PASS/FAIL line per criterion, each with its runtime
//! budget. Exits non-zero if any criterion fails.
//!
//! 1. Bayes-estimated detector FPRs reproduce within ±0.005.
//! 2. Fixed-model planning results (VulDeePecker, VulDeePecker on ReVeal).
//! 3. Latency-budget grid: 28 cells within 5% (10% for the CodeJIT rows).
//! 4. Boundary identity over ≥1,000 random configurations.
//! 5. Simulation agrees with the closed forms for all seven detectors.
//! 6. Detector inversion equals the swapped-label oracle on ≥10,000 triples.
//! 7. `simulate` JSON is byte-identical across runs and worker counts.
//! 8. Wall-clock viability of the real detectors is out of reach here.

use pipegate::bounds::{self, Headroom, PipelineConfig};
use pipegate::catalog::builtin_catalog;
use pipegate::metrics::{
    counts_from_rates, invert_detector_precision, precision_at_prevalence, swap_labels, ClassifierSpec,
};
use pipegate::scalar::exact;
use pipegate::simulate::{EmpiricalVerdict, PrecisionMode, Runner, SimConfig};
use pipegate_cli::output::OutputRecord;
use pipegate_cli::run;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

const SEED: u64 = 20_240_601;

struct Verdict {
    pass: bool,
    detail: String,
}

fn reproduce_rows() -> OutputRecord {
    let out = run(["pipegate", "reproduce", "--format", "json"]);
    serde_json::from_str(&out.stdout).expect("reproduce emits JSON")
}

/// Checks the `reproduce` rows whose quantity starts with `prefix`.
fn reproduce_section(prefix: &str, expected_rows: usize) -> Verdict {
    let record = reproduce_rows();
    let rows: Vec<_> = record
        .results
        .iter()
        .filter(|r| r.quantity.starts_with(prefix))
        .collect();
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| r.ok != Some(true))
        .map(|r| {
            format!(
                "{}/{} {:.4} vs {} ({:+.1}%)",
                r.item,
                r.quantity,
                r.value.unwrap_or(f64::NAN),
                r.reference.unwrap_or(f64::NAN),
                100.0 * r.rel_error.unwrap_or(f64::NAN)
            )
        })
        .collect();
    Verdict {
        pass: rows.len() == expected_rows && failed.is_empty(),
        detail: if failed.is_empty() {
            format!("{}/{} within tolerance", rows.len(), expected_rows)
        } else {
            format!(
                "{} of {} out of tolerance: {}",
                failed.len(),
                rows.len(),
                failed.join("; ")
            )
        },
    }
}

fn criterion_1() -> Verdict {
    reproduce_section("bayes_fpr", 5)
}

fn criterion_2() -> Verdict {
    let record = reproduce_rows();
    let rows: Vec<_> = record
        .results
        .iter()
        .filter(|r| r.quantity == "min_validator_time" || r.quantity == "min_extra_ratio")
        .collect();
    let summary: Vec<String> = rows
        .iter()
        .map(|r| {
            let value = r.value.unwrap_or(f64::NAN);
            let shown = if r.quantity == "min_validator_time" {
                format!("{:.2} min", value / 60.0)
            } else {
                format!("{:.2}%", value * 100.0)
            };
            format!(
                "{} {} {}{}",
                r.item,
                r.quantity,
                shown,
                if r.ok == Some(true) { "" } else { " (FAIL)" }
            )
        })
        .collect();
    Verdict {
        pass: rows.len() == 4 && rows.iter().all(|r| r.ok == Some(true)),
        detail: summary.join("; "),
    }
}

fn criterion_3() -> Verdict {
    reproduce_section("max_model_time_", 28)
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let configs = 2_000;
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..configs {
        let pi = rng.gen_range(0.01..0.95);
        let p_m = pi + (1.0 - pi) * rng.gen_range(0.001..0.999);
        let r_m = rng.gen_range(0.05..=1.0);
        let r_v = rng.gen_range(0.05..=1.0);
        let tau_v = 10f64.powf(rng.gen_range(-2.0..4.0));
        let n = 10f64.powf(rng.gen_range(0.0..7.0));
        let delta = bounds::min_extra_ratio(r_m).unwrap();
        let tau_m = match bounds::max_model_time(tau_v, r_m, p_m, pi, Some(delta)).unwrap() {
            Headroom::Available(b) => b.tight.unwrap(),
            Headroom::Exhausted => unreachable!("P_M > π by construction"),
        };
        let config = PipelineConfig {
            prevalence: pi,
            n,
            validator: ClassifierSpec::new(1.0, r_v).unwrap().with_latency(tau_v).unwrap(),
            screener: ClassifierSpec::new(p_m, r_m)
                .unwrap()
                .with_latency(tau_m.max(0.0))
                .unwrap(),
        };
        let report = bounds::evaluate(&config, delta).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
        let gap = rel(report.augmented_tp, report.baseline_tp).max(rel(report.augmented_time, report.baseline_time));
        worst = worst.max(gap);
        if gap > 1e-9 {
            failures += 1;
        }
    }
    Verdict {
        pass: failures == 0,
        detail: format!("{configs} configs, {failures} beyond 1e-9, worst relative gap {worst:.2e}"),
    }
}

fn criterion_5() -> Verdict {
    let catalog = builtin_catalog();
    let bench = catalog.benchmark.unwrap();
    let runner = Runner::default();
    let mut runs = 0;
    let mut resolved = 0;
    let mut problems = Vec::new();
    for record in &catalog.models {
        let screener = record.screener().unwrap();
        // LineVul publishes no latency; one second sits inside its budget
        // for some benchmark columns and outside for others.
        let tau_m = record.spec.latency.unwrap_or(1.0);
        for (column, tau_v) in bench.times.columns() {
            let mut cfg = SimConfig::new(bench.prevalence, screener.rates(), 1.0, tau_m, tau_v);
            cfg.n = 100_000;
            cfg.trials = 100;
            cfg.seed = SEED;
            cfg.precision_mode = PrecisionMode::PrevalenceConsistent;
            let cfg = cfg.with_extra_ratio(0.1);
            let outcome = runner.compare(&cfg).unwrap();
            runs += 1;
            let a = outcome.agreement;
            for (name, ok) in [
                ("baseline_tp", a.baseline_tp),
                ("augmented_tp", a.augmented_tp),
                ("survivors", a.survivors),
                ("baseline_time", a.baseline_time),
                ("augmented_time", a.augmented_time),
            ] {
                if !ok {
                    problems.push(format!("{}/{column} {name}", record.name));
                }
            }
            if outcome.analytic_resolved != EmpiricalVerdict::Inconclusive {
                resolved += 1;
            }
            if outcome.verdict_agrees == Some(false) {
                problems.push(format!(
                    "{}/{column} verdict {} vs {}",
                    record.name,
                    outcome.analytic_verdict.label(),
                    outcome.empirical_verdict.label()
                ));
            }
        }
    }
    Verdict {
        pass: problems.is_empty(),
        detail: format!(
            "{runs} runs x 5 means, {resolved} verdicts beyond 3 SE{}",
            if problems.is_empty() {
                ", all matched".to_string()
            } else {
                format!("; mismatches: {}", problems.join(", "))
            }
        ),
    }
}

/// Perturbation of the inverted precision caused by rounding its input to
/// f64: `ε · |∂P_M/∂P|` with a small safety factor.
fn input_rounding_bound(precision: f64, inverted: f64) -> f64 {
    4.0 * f64::EPSILON * inverted * (1.0 - inverted) / (precision * (1.0 - precision))
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let triples = 20_000;
    let mut worst: f64 = 0.0;
    let mut conditioned = 0;
    let mut failures = 0;
    let mut skipped = 0;
    for _ in 0..triples {
        let pi: f64 = rng.gen_range(0.001..0.999);
        let recall: f64 = rng.gen_range(0.001..=1.0);
        let far: f64 = rng.gen_range(0.0..0.999);
        let implied = precision_at_prevalence(recall, far, pi).unwrap();
        if implied == 1.0 && far > 0.0 {
            // Rounded to certainty; the inversion is undefined there.
            skipped += 1;
            continue;
        }
        let oracle = swap_labels(counts_from_rates(recall, far, pi, 1.0).unwrap())
            .precision()
            .unwrap();
        let inverted = invert_detector_precision(implied, recall, far).unwrap();
        let diff = (inverted - oracle).abs();
        worst = worst.max(diff);
        if diff > 1e-12 {
            if diff <= input_rounding_bound(implied, inverted) {
                conditioned += 1;
            } else {
                failures += 1;
            }
        }
    }

    // The same identity with no rounding at all.
    let mut exact_mismatches = 0;
    let exact_triples = 10_000;
    for _ in 0..exact_triples {
        let pi = exact(rng.gen_range(1..1_000_000), 1_000_000);
        let recall = exact(rng.gen_range(1..=1_000_000), 1_000_000);
        let far = exact(rng.gen_range(0..999_000), 1_000_000);
        let implied = precision_at_prevalence(recall, far, pi).unwrap();
        let oracle = swap_labels(counts_from_rates(recall, far, pi, exact(1, 1)).unwrap())
            .precision()
            .unwrap();
        if invert_detector_precision(implied, recall, far).unwrap() != oracle {
            exact_mismatches += 1;
        }
    }

    Verdict {
        pass: failures == 0 && exact_mismatches == 0 && triples - skipped >= 10_000,
        detail: format!(
            "f64: {} triples, worst |difference| {worst:.2e}, {conditioned} above 1e-12 within the \
             input-rounding bound, {failures} unexplained; exact: {exact_mismatches} of {exact_triples} differ",
            triples - skipped
        ),
    }
}

fn criterion_7() -> Verdict {
    let args = [
        "pipegate",
        "simulate",
        "--model",
        "VulDeePecker",
        "--tau-v",
        "600",
        "--delta-ratio",
        "0.06",
        "--seed",
        "42",
        "--format",
        "json",
    ];
    let with_workers = |workers: &str| {
        let mut full = args.to_vec();
        full.extend(["--workers", workers]);
        run(full).stdout
    };
    let first = run(args).stdout;
    let second = run(args).stdout;
    let single = with_workers("1");
    let many = with_workers("8");
    let checks = [
        ("repeat", first == second),
        ("1 worker", single == first),
        ("8 workers", many == first),
    ];
    Verdict {
        pass: !first.is_empty() && checks.iter().all(|(_, ok)| *ok),
        detail: checks
            .iter()
            .map(|(name, ok)| format!("{name}: {}", if *ok { "identical" } else { "DIFFERENT" }))
            .collect::<Vec<_>>()
            .join(", ")
            + &format!(" ({} bytes)", first.len()),
    }
}

fn main() {
    let criteria: [(u8, &str, Duration, fn() -> Verdict); 7] = [
        (1, "Bayes FPR reproduction", Duration::from_secs(1), criterion_1),
        (2, "fixed-model reproduction", Duration::from_secs(1), criterion_2),
        (
            3,
            "latency-budget grid reproduction",
            Duration::from_secs(1),
            criterion_3,
        ),
        (4, "boundary identity", Duration::from_secs(5), criterion_4),
        (5, "simulation vs closed forms", Duration::from_secs(60), criterion_5),
        (
            6,
            "inversion vs swapped-label oracle",
            Duration::from_secs(5),
            criterion_6,
        ),
        (7, "simulate determinism", Duration::from_secs(30), criterion_7),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let verdict = check();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= budget;
        let pass = verdict.pass && in_budget;
        failed += usize::from(!pass);
        println!(
            "criterion {id} {}: {name}: {} [{:.2}s of {}s{}]",
            if pass { "PASS" } else { "FAIL" },
            verdict.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_budget { "" } else { ", over budget" }
        );
    }
    println!(
        "criterion 8 NOTE: wall-clock viability of the published detectors concerns external systems; \
         only the closed-form budgets of criterion 3 are checked"
    );
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
