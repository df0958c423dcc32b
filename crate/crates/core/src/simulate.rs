//! Seeded Monte Carlo oracle for the pipeline model.
//!
//! Patches are abstract Bernoulli-labelled items. Each trial draws a fresh
//! population, pushes it through the baseline pipeline (`V` only) and the
//! augmented one (`M` then `V`), and records true-patch counts, screener
//! survivors and elapsed time. Latencies are constant per item.
//!
//! # Reproducibility
//!
//! Every trial owns an independent ChaCha8 stream: the generator is seeded
//! with `ChaCha8Rng::seed_from_u64(seed)` and then moved to stream
//! `2 * trial` (baseline) or `2 * trial + 1` (augmented). Uniforms are
//! `rand` 0.8's `Standard` `f64` samples. Each patch consumes a fixed number
//! of uniforms (two in the baseline, three in the augmented pipeline)
//! regardless of outcome, so runs that differ only in a rate share their
//! random numbers. Per-trial results are collected in trial order before
//! reduction, which makes the outcome independent of the worker count.
//! [`RNG_ID`] names this scheme and is echoed in every outcome.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, Constraint, Verdict};
use crate::error::{ModelError, Result};
use crate::metrics::RateTriple;
use crate::scalar::approx_eq_rel;

/// Identity of the random stream layout. Part of the output contract: golden
/// outcomes are only comparable between runs that report the same id.
pub const RNG_ID: &str = "chacha8-v1 (rand_chacha 0.3, seed_from_u64, stream 2t|2t+1, rand 0.8 f64)";

pub const DEFAULT_TRIALS: u32 = 100;
pub const DEFAULT_N: u64 = 100_000;

/// Number of standard errors separating a real difference from noise.
pub const SE_MULTIPLIER: f64 = 3.0;

/// Which screener precision the closed-form side of a comparison uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecisionMode {
    /// The precision obtained from the published detector triple, as the
    /// survivor formula is usually applied.
    #[default]
    AsPublished,
    /// The precision implied by the screener's rates at the pipeline prevalence.
    PrevalenceConsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub prevalence: f64,
    pub n: u64,
    pub extra: u64,
    pub screener: RateTriple<f64>,
    /// `tpr` is the validator recall; `fpr` is the chance a bad patch passes.
    pub validator: RateTriple<f64>,
    pub screener_latency: f64,
    pub validator_latency: f64,
    pub trials: u32,
    pub seed: u64,
    pub precision_mode: PrecisionMode,
    /// Screener precision used in [`PrecisionMode::AsPublished`].
    pub published_precision: Option<f64>,
}

impl SimConfig {
    /// Config with default `n`, trials and seed, no extra candidates and a
    /// validator that passes no bad patch. Without a published precision the
    /// closed forms run in [`PrecisionMode::PrevalenceConsistent`].
    pub fn new(
        prevalence: f64,
        screener: RateTriple<f64>,
        validator_recall: f64,
        screener_latency: f64,
        validator_latency: f64,
    ) -> Self {
        SimConfig {
            prevalence,
            n: DEFAULT_N,
            extra: 0,
            screener,
            validator: RateTriple {
                tpr: validator_recall,
                fpr: 0.0,
            },
            screener_latency,
            validator_latency,
            trials: DEFAULT_TRIALS,
            seed: 0,
            precision_mode: PrecisionMode::PrevalenceConsistent,
            published_precision: None,
        }
    }

    /// Switches to [`PrecisionMode::AsPublished`] with the given screener precision.
    pub fn with_published_precision(mut self, precision: f64) -> Self {
        self.published_precision = Some(precision);
        self.precision_mode = PrecisionMode::AsPublished;
        self
    }

    /// Sets `extra` to `round(n · ratio)`.
    pub fn with_extra_ratio(mut self, ratio: f64) -> Self {
        self.extra = (self.n as f64 * ratio).round() as u64;
        self
    }

    pub fn total(&self) -> u64 {
        self.n + self.extra
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(ModelError::InvalidConfig(msg.to_string()));
        if !(self.prevalence > 0.0 && self.prevalence < 1.0) {
            return bad("prevalence must lie in (0, 1)");
        }
        for (name, rate) in [
            ("screener tpr", self.screener.tpr),
            ("screener fpr", self.screener.fpr),
            ("validator recall", self.validator.tpr),
            ("validator fpr", self.validator.fpr),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(ModelError::InvalidConfig(format!("{name} must lie in [0, 1]")));
            }
        }
        if self.n == 0 {
            return bad("n must be at least 1");
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        for (name, latency) in [
            ("screener latency", self.screener_latency),
            ("validator latency", self.validator_latency),
        ] {
            if !(latency.is_finite() && latency >= 0.0) {
                return Err(ModelError::InvalidConfig(format!("{name} must be finite and >= 0")));
            }
        }
        if let Some(p) = self.published_precision {
            if !(p > 0.0 && p <= 1.0) {
                return bad("published precision must lie in (0, 1]");
            }
        }
        if self.precision_mode == PrecisionMode::AsPublished && self.published_precision.is_none() {
            return bad("as-published mode needs a published screener precision");
        }
        Ok(())
    }

    /// Screener precision the closed forms are evaluated with.
    pub fn analytic_precision(&self) -> Result<f64> {
        match self.precision_mode {
            PrecisionMode::AsPublished => self.published_precision.ok_or_else(|| {
                ModelError::InvalidConfig("as-published mode needs a published screener precision".into())
            }),
            PrecisionMode::PrevalenceConsistent => self.screener.precision_at(self.prevalence),
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Reduces the samples in the given order.
    pub fn from_samples(samples: &[f64]) -> Self {
        let k = samples.len();
        if k == 0 {
            return Estimate {
                mean: f64::NAN,
                std_error: f64::NAN,
            };
        }
        let mean = samples.iter().sum::<f64>() / k as f64;
        if k == 1 {
            return Estimate { mean, std_error: 0.0 };
        }
        let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
        let variance = ss / (k - 1) as f64;
        Estimate {
            mean,
            std_error: (variance / k as f64).sqrt(),
        }
    }

    /// True when `expected` lies within [`SE_MULTIPLIER`] standard errors of
    /// the mean. Zero-variance estimates must match to rounding.
    pub fn agrees_with(&self, expected: f64) -> bool {
        if approx_eq_rel(self.mean, expected, bounds::BOUNDARY_TOLERANCE) {
            return true;
        }
        (self.mean - expected).abs() <= SE_MULTIPLIER * self.std_error
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct BaselineTrial {
    tp: u64,
    false_accepts: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct AugmentedTrial {
    screener_tp: u64,
    screener_fp: u64,
    tp: u64,
    false_accepts: u64,
}

impl AugmentedTrial {
    fn survivors(&self) -> u64 {
        self.screener_tp + self.screener_fp
    }
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn baseline_trial(cfg: &SimConfig, trial: u64) -> BaselineTrial {
    let mut rng = trial_rng(cfg.seed, 2 * trial);
    let mut out = BaselineTrial::default();
    for _ in 0..cfg.n {
        let good = rng.gen::<f64>() < cfg.prevalence;
        let u_validate = rng.gen::<f64>();
        if good {
            if u_validate < cfg.validator.tpr {
                out.tp += 1;
            }
        } else if u_validate < cfg.validator.fpr {
            out.false_accepts += 1;
        }
    }
    out
}

fn augmented_trial(cfg: &SimConfig, trial: u64) -> AugmentedTrial {
    let mut rng = trial_rng(cfg.seed, 2 * trial + 1);
    let mut out = AugmentedTrial::default();
    for _ in 0..cfg.total() {
        let good = rng.gen::<f64>() < cfg.prevalence;
        let u_screen = rng.gen::<f64>();
        let u_validate = rng.gen::<f64>();
        if good {
            if u_screen < cfg.screener.tpr {
                out.screener_tp += 1;
                if u_validate < cfg.validator.tpr {
                    out.tp += 1;
                }
            }
        } else if u_screen < cfg.screener.fpr {
            out.screener_fp += 1;
            if u_validate < cfg.validator.fpr {
                out.false_accepts += 1;
            }
        }
    }
    out
}

/// How trials are spread over threads. Results never depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Runner {
    workers: usize,
}

impl Default for Runner {
    fn default() -> Self {
        Runner {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub tp: Estimate,
    pub time: Estimate,
    /// Bad patches the validator let through.
    pub false_accepts: Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentedSummary {
    pub tp: Estimate,
    pub survivors: Estimate,
    pub time: Estimate,
    pub false_accepts: Estimate,
    /// Per-trial `TP_M / (TP_M + FP_M)` over trials with at least one survivor.
    pub screener_precision: Option<Estimate>,
}

/// Closed-form predictions for the quantities the simulator measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    pub screener_precision: f64,
    pub baseline_tp: f64,
    pub augmented_tp: f64,
    pub survivors: f64,
    pub baseline_time: f64,
    pub augmented_time: f64,
}

impl Expectations {
    pub fn for_config(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let pi = cfg.prevalence;
        let n = cfg.n as f64;
        let total = cfg.total() as f64;
        let r_m = cfg.screener.tpr;
        let baseline_tp = bounds::baseline_tp(pi, n, cfg.validator.tpr)?;
        let augmented_tp = bounds::augmented_tp(pi, total, r_m, cfg.validator.tpr)?;
        let baseline_time = bounds::baseline_time(n, cfg.validator_latency)?;
        let (screener_precision, survivors) = match cfg.precision_mode {
            PrecisionMode::AsPublished => {
                let p_m = cfg.analytic_precision()?;
                (p_m, bounds::ml_survivors(pi, total, r_m, p_m)?)
            }
            PrecisionMode::PrevalenceConsistent => {
                // Same as the survivor formula with the consistent precision,
                // but stays defined when the screener passes nothing.
                let p_m = cfg.analytic_precision().unwrap_or(f64::NAN);
                let survivors = (pi * r_m + (1.0 - pi) * cfg.screener.fpr) * total;
                (p_m, survivors)
            }
        };
        let augmented_time = cfg.screener_latency * total + cfg.validator_latency * survivors;
        Ok(Expectations {
            screener_precision,
            baseline_tp,
            augmented_tp,
            survivors,
            baseline_time,
            augmented_time,
        })
    }

    pub fn verdict(&self) -> Verdict {
        bounds::judge(
            self.baseline_tp,
            self.augmented_tp,
            self.baseline_time,
            self.augmented_time,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agreement {
    pub baseline_tp: bool,
    pub augmented_tp: bool,
    pub survivors: bool,
    pub baseline_time: bool,
    pub augmented_time: bool,
}

impl Agreement {
    pub fn all(&self) -> bool {
        self.baseline_tp && self.augmented_tp && self.survivors && self.baseline_time && self.augmented_time
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EmpiricalVerdict {
    Convenient,
    NotConvenient {
        violated: Constraint,
    },
    /// At least one requirement is within noise and none is clearly violated.
    Inconclusive,
}

impl EmpiricalVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            EmpiricalVerdict::Convenient => "convenient",
            EmpiricalVerdict::NotConvenient { .. } => "not-convenient",
            EmpiricalVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Signal {
    Holds,
    Violated,
    Noise,
}

fn signal(margin: f64, scale: f64, std_error: f64) -> Signal {
    if margin.abs() <= bounds::BOUNDARY_TOLERANCE * scale.abs() || margin.abs() <= SE_MULTIPLIER * std_error {
        Signal::Noise
    } else if margin > 0.0 {
        Signal::Holds
    } else {
        Signal::Violated
    }
}

fn combine(throughput: Signal, time: Signal) -> EmpiricalVerdict {
    match (throughput, time) {
        (Signal::Violated, Signal::Violated) => EmpiricalVerdict::NotConvenient {
            violated: Constraint::Both,
        },
        (Signal::Violated, _) => EmpiricalVerdict::NotConvenient {
            violated: Constraint::Throughput,
        },
        (_, Signal::Violated) => EmpiricalVerdict::NotConvenient {
            violated: Constraint::Time,
        },
        (Signal::Holds, Signal::Holds) => EmpiricalVerdict::Convenient,
        _ => EmpiricalVerdict::Inconclusive,
    }
}

/// Both pipelines simulated side by side with their closed-form predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub rng: String,
    pub trials: u32,
    pub precision_mode: PrecisionMode,
    pub baseline_tp: Estimate,
    pub augmented_tp: Estimate,
    pub survivors: Estimate,
    pub baseline_time: Estimate,
    pub augmented_time: Estimate,
    pub baseline_false_accepts: Estimate,
    pub augmented_false_accepts: Estimate,
    pub expected: Expectations,
    pub agreement: Agreement,
    pub analytic_verdict: Verdict,
    /// The analytic verdict when its margins exceed the simulation noise,
    /// otherwise inconclusive.
    pub analytic_resolved: EmpiricalVerdict,
    pub empirical_verdict: EmpiricalVerdict,
    /// `None` when the analytic margins are within noise.
    pub verdict_agrees: Option<bool>,
}

/// Empirical screener precision next to its two closed-form readings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionProbe {
    pub empirical: Estimate,
    pub prevalence_consistent: f64,
    pub as_published: Option<f64>,
    pub agrees: bool,
}

impl Runner {
    pub fn sequential() -> Self {
        Runner { workers: 1 }
    }

    pub fn with_workers(workers: usize) -> Self {
        Runner {
            workers: workers.max(1),
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    fn map_trials<R, F>(&self, trials: u32, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(u64) -> R + Sync + Send,
    {
        if self.workers == 1 {
            return (0..u64::from(trials)).map(f).collect();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(self.workers).build() {
            Ok(pool) => pool.install(|| (0..u64::from(trials)).into_par_iter().map(&f).collect()),
            Err(_) => (0..u64::from(trials)).map(f).collect(),
        }
    }

    pub fn run_baseline(&self, cfg: &SimConfig) -> Result<BaselineSummary> {
        cfg.validate()?;
        let trials = self.map_trials(cfg.trials, |t| baseline_trial(cfg, t));
        let tp: Vec<f64> = trials.iter().map(|t| t.tp as f64).collect();
        let false_accepts: Vec<f64> = trials.iter().map(|t| t.false_accepts as f64).collect();
        let time = cfg.n as f64 * cfg.validator_latency;
        Ok(BaselineSummary {
            tp: Estimate::from_samples(&tp),
            false_accepts: Estimate::from_samples(&false_accepts),
            time: Estimate::from_samples(&vec![time; trials.len()]),
        })
    }

    pub fn run_augmented(&self, cfg: &SimConfig) -> Result<AugmentedSummary> {
        cfg.validate()?;
        let trials = self.map_trials(cfg.trials, |t| augmented_trial(cfg, t));
        let screen_time = cfg.screener_latency * cfg.total() as f64;
        let tp: Vec<f64> = trials.iter().map(|t| t.tp as f64).collect();
        let survivors: Vec<f64> = trials.iter().map(|t| t.survivors() as f64).collect();
        let false_accepts: Vec<f64> = trials.iter().map(|t| t.false_accepts as f64).collect();
        let time: Vec<f64> = trials
            .iter()
            .map(|t| screen_time + cfg.validator_latency * t.survivors() as f64)
            .collect();
        let precision: Vec<f64> = trials
            .iter()
            .filter(|t| t.survivors() > 0)
            .map(|t| t.screener_tp as f64 / t.survivors() as f64)
            .collect();
        Ok(AugmentedSummary {
            tp: Estimate::from_samples(&tp),
            survivors: Estimate::from_samples(&survivors),
            time: Estimate::from_samples(&time),
            false_accepts: Estimate::from_samples(&false_accepts),
            screener_precision: (!precision.is_empty()).then(|| Estimate::from_samples(&precision)),
        })
    }

    pub fn compare(&self, cfg: &SimConfig) -> Result<SimOutcome> {
        let expected = Expectations::for_config(cfg)?;
        let base = self.run_baseline(cfg)?;
        let aug = self.run_augmented(cfg)?;

        let tp_se = base.tp.std_error.hypot(aug.tp.std_error);
        let time_se = base.time.std_error.hypot(aug.time.std_error);
        let empirical_verdict = combine(
            signal(aug.tp.mean - base.tp.mean, base.tp.mean, tp_se),
            signal(base.time.mean - aug.time.mean, base.time.mean, time_se),
        );
        let analytic_resolved = combine(
            signal(
                expected.augmented_tp - expected.baseline_tp,
                expected.baseline_tp,
                tp_se,
            ),
            signal(
                expected.baseline_time - expected.augmented_time,
                expected.baseline_time,
                time_se,
            ),
        );
        let verdict_agrees = match analytic_resolved {
            EmpiricalVerdict::Inconclusive => None,
            resolved => Some(resolved == empirical_verdict),
        };

        Ok(SimOutcome {
            rng: RNG_ID.to_string(),
            trials: cfg.trials,
            precision_mode: cfg.precision_mode,
            agreement: Agreement {
                baseline_tp: base.tp.agrees_with(expected.baseline_tp),
                augmented_tp: aug.tp.agrees_with(expected.augmented_tp),
                survivors: aug.survivors.agrees_with(expected.survivors),
                baseline_time: base.time.agrees_with(expected.baseline_time),
                augmented_time: aug.time.agrees_with(expected.augmented_time),
            },
            baseline_tp: base.tp,
            augmented_tp: aug.tp,
            survivors: aug.survivors,
            baseline_time: base.time,
            augmented_time: aug.time,
            baseline_false_accepts: base.false_accepts,
            augmented_false_accepts: aug.false_accepts,
            analytic_verdict: expected.verdict(),
            analytic_resolved,
            empirical_verdict,
            verdict_agrees,
            expected,
        })
    }

    pub fn survivor_precision_probe(&self, cfg: &SimConfig) -> Result<PrecisionProbe> {
        let prevalence_consistent = cfg.screener.precision_at(cfg.prevalence)?;
        let aug = self.run_augmented(cfg)?;
        let empirical = aug.screener_precision.ok_or(ModelError::UndefinedPrecision)?;
        Ok(PrecisionProbe {
            empirical,
            prevalence_consistent,
            as_published: cfg.published_precision,
            agrees: empirical.agrees_with(prevalence_consistent),
        })
    }
}

pub fn run_baseline(cfg: &SimConfig) -> Result<BaselineSummary> {
    Runner::default().run_baseline(cfg)
}

pub fn run_augmented(cfg: &SimConfig) -> Result<AugmentedSummary> {
    Runner::default().run_augmented(cfg)
}

pub fn compare(cfg: &SimConfig) -> Result<SimOutcome> {
    Runner::default().compare(cfg)
}

pub fn survivor_precision_probe(cfg: &SimConfig) -> Result<PrecisionProbe> {
    Runner::default().survivor_precision_probe(cfg)
}
