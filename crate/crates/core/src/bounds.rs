//! Linear-cost model of a validator `V` with an optional ML screener `M` in
//! front of it.
//!
//! The baseline pipeline sends `n` candidates straight to `V`. The augmented
//! pipeline asks the generator for `n + Δn` candidates, runs `M` on all of
//! them and `V` only on `M`'s survivors. All counts are expectations and are
//! never rounded here.
//!
//! ```text
//! baseline TP     = R_V · π · n                 baseline time  = τ_V · n
//! survivors       = R_M · π · N / P_M           augmented time = (τ_M + τ_V · (R_M / P_M) · π) · N
//! augmented TP    = R_V · R_M · π · N           with N = n + Δn
//! ```
//!
//! Requiring the augmented pipeline to lose no true patches and take no more
//! time gives
//!
//! ```text
//! Δn / n ≥ 1 / R_M − 1
//! τ_M ≤ τ_V · (n / (n + Δn) − (R_M / P_M) · π) ≤ τ_V · (R_M / P_M) · (P_M − π)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::metrics::{check_half_open_unit, check_non_negative, check_open_unit, check_unit, ClassifierSpec};
use crate::scalar::{approx_eq_rel, Scalar};

/// Relative tolerance under which the two sides of a requirement count as equal.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

pub fn baseline_tp<T: Scalar>(prevalence: T, n: T, validator_recall: T) -> Result<T> {
    check_open_unit(prevalence, "prevalence")?;
    check_non_negative(n, "n")?;
    check_unit(validator_recall, "validator recall")?;
    Ok(validator_recall * prevalence * n)
}

pub fn baseline_time<T: Scalar>(n: T, validator_latency: T) -> Result<T> {
    check_non_negative(n, "n")?;
    check_non_negative(validator_latency, "validator latency")?;
    Ok(n * validator_latency)
}

/// Expected number of candidates that pass the screener (`TP_M + FP_M`).
pub fn ml_survivors<T: Scalar>(prevalence: T, n_total: T, screener_recall: T, screener_precision: T) -> Result<T> {
    check_open_unit(prevalence, "prevalence")?;
    check_non_negative(n_total, "n_total")?;
    check_unit(screener_recall, "screener recall")?;
    check_half_open_unit(screener_precision, "screener precision")?;
    Ok(screener_recall * prevalence * n_total / screener_precision)
}

pub fn augmented_time<T: Scalar>(
    prevalence: T,
    n_total: T,
    screener_latency: T,
    validator_latency: T,
    screener_recall: T,
    screener_precision: T,
) -> Result<T> {
    check_non_negative(screener_latency, "screener latency")?;
    check_non_negative(validator_latency, "validator latency")?;
    let survivors = ml_survivors(prevalence, n_total, screener_recall, screener_precision)?;
    Ok(screener_latency * n_total + validator_latency * survivors)
}

pub fn augmented_tp<T: Scalar>(prevalence: T, n_total: T, screener_recall: T, validator_recall: T) -> Result<T> {
    check_open_unit(prevalence, "prevalence")?;
    check_non_negative(n_total, "n_total")?;
    check_unit(screener_recall, "screener recall")?;
    check_unit(validator_recall, "validator recall")?;
    Ok(validator_recall * screener_recall * prevalence * n_total)
}

/// Smallest `Δn / n` that keeps the true-patch throughput: `1 / R_M − 1`.
pub fn min_extra_ratio<T: Scalar>(screener_recall: T) -> Result<T> {
    check_half_open_unit(screener_recall, "screener recall")?;
    Ok(T::one() / screener_recall - T::one())
}

/// Outcome of a planning query that only has an answer when the screener's
/// precision beats the generator's prevalence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum Headroom<V> {
    Available(V),
    /// `P_M` does not exceed `π`: the screener cannot pay for itself.
    Exhausted,
}

impl<V> Headroom<V> {
    pub fn available(self) -> Option<V> {
        match self {
            Headroom::Available(v) => Some(v),
            Headroom::Exhausted => None,
        }
    }

    pub fn is_available(&self) -> bool {
        matches!(self, Headroom::Available(_))
    }
}

/// Screener latency budget in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelTimeBound<T> {
    /// `τ_V · (R_M / P_M) · (P_M − π)`; the tight bound at the minimum `Δn / n`.
    pub relaxed: T,
    /// `τ_V · (1 / (1 + Δn/n) − (R_M / P_M) · π)` for the requested `Δn / n`.
    /// Negative when even a free screener could not keep the time down.
    pub tight: Option<T>,
}

/// Largest per-item screener latency that keeps the augmented pipeline no
/// slower than the baseline. `P_M == π` yields a zero budget; `P_M < π` has
/// no budget at all.
pub fn max_model_time<T: Scalar>(
    validator_latency: T,
    screener_recall: T,
    screener_precision: T,
    prevalence: T,
    delta_ratio: Option<T>,
) -> Result<Headroom<ModelTimeBound<T>>> {
    check_non_negative(validator_latency, "validator latency")?;
    check_half_open_unit(screener_recall, "screener recall")?;
    check_half_open_unit(screener_precision, "screener precision")?;
    check_open_unit(prevalence, "prevalence")?;
    if let Some(delta) = delta_ratio {
        check_non_negative(delta, "delta ratio")?;
    }
    if screener_precision < prevalence {
        return Ok(Headroom::Exhausted);
    }
    let pass_ratio = screener_recall / screener_precision;
    let relaxed = validator_latency * pass_ratio * (screener_precision - prevalence);
    let tight = delta_ratio.map(|delta| validator_latency * (T::one() / (T::one() + delta) - pass_ratio * prevalence));
    Ok(Headroom::Available(ModelTimeBound { relaxed, tight }))
}

/// Slowest validator for which a screener of latency `τ_M` breaks even:
/// `τ_M / ((R_M / P_M) · (P_M − π))`.
pub fn min_validator_time<T: Scalar>(
    screener_latency: T,
    screener_recall: T,
    screener_precision: T,
    prevalence: T,
) -> Result<Headroom<T>> {
    check_non_negative(screener_latency, "screener latency")?;
    check_half_open_unit(screener_recall, "screener recall")?;
    check_half_open_unit(screener_precision, "screener precision")?;
    check_open_unit(prevalence, "prevalence")?;
    if screener_precision <= prevalence {
        return Ok(Headroom::Exhausted);
    }
    let per_unit = screener_recall / screener_precision * (screener_precision - prevalence);
    Ok(Headroom::Available(screener_latency / per_unit))
}

/// Which of the two requirements (no fewer true patches, no more time).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Throughput,
    Time,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Both requirements hold and at least one strictly. `tight` names a
    /// requirement met with equality, if any.
    Convenient {
        tight: Option<Constraint>,
    },
    /// Both requirements hold with equality.
    Boundary,
    NotConvenient {
        violated: Constraint,
    },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Convenient { .. } => "convenient",
            Verdict::Boundary => "boundary",
            Verdict::NotConvenient { .. } => "not-convenient",
        }
    }

    pub fn is_convenient(&self) -> bool {
        matches!(self, Verdict::Convenient { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Strict,
    Equal,
    Violated,
}

fn side<T: Scalar>(better: T, reference: T) -> Side {
    if approx_eq_rel(better, reference, T::lit(BOUNDARY_TOLERANCE)) {
        Side::Equal
    } else if better > reference {
        Side::Strict
    } else {
        Side::Violated
    }
}

/// Applies the two requirements to a pair of (baseline, augmented) outcomes.
pub fn judge<T: Scalar>(baseline_tp: T, augmented_tp: T, baseline_time: T, augmented_time: T) -> Verdict {
    let throughput = side(augmented_tp, baseline_tp);
    let time = side(baseline_time, augmented_time);
    match (throughput, time) {
        (Side::Violated, Side::Violated) => Verdict::NotConvenient {
            violated: Constraint::Both,
        },
        (Side::Violated, _) => Verdict::NotConvenient {
            violated: Constraint::Throughput,
        },
        (_, Side::Violated) => Verdict::NotConvenient {
            violated: Constraint::Time,
        },
        (Side::Equal, Side::Equal) => Verdict::Boundary,
        (Side::Equal, Side::Strict) => Verdict::Convenient {
            tight: Some(Constraint::Throughput),
        },
        (Side::Strict, Side::Equal) => Verdict::Convenient {
            tight: Some(Constraint::Time),
        },
        (Side::Strict, Side::Strict) => Verdict::Convenient { tight: None },
    }
}

/// A baseline validator and a candidate screener for it.
///
/// The validator needs recall and latency; the screener carries screener-side
/// metrics (already inverted if it came from a vulnerability detector).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig<T> {
    /// Share of good patches among generated candidates.
    pub prevalence: T,
    /// Baseline number of candidates.
    pub n: T,
    pub validator: ClassifierSpec<T>,
    pub screener: ClassifierSpec<T>,
}

impl<T: Scalar> PipelineConfig<T> {
    pub fn validate(&self) -> Result<()> {
        check_open_unit(self.prevalence, "prevalence")?;
        if self.n <= T::zero() {
            return Err(ModelError::range("n", "> 0"));
        }
        self.validator.validate()?;
        self.screener.validate()?;
        check_half_open_unit(self.validator.recall, "validator recall")?;
        match self.validator.latency {
            Some(latency) if latency > T::zero() => {}
            Some(_) => return Err(ModelError::range("validator latency", "> 0")),
            None => return Err(ModelError::LatencyUnknown("validator".into())),
        }
        Ok(())
    }

    fn validator_latency(&self) -> Result<T> {
        self.validator
            .latency
            .ok_or_else(|| ModelError::LatencyUnknown("validator".into()))
    }

    fn screener_latency(&self) -> Result<T> {
        self.screener
            .latency
            .ok_or_else(|| ModelError::LatencyUnknown("screener".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport<T> {
    pub delta_ratio: T,
    pub min_extra_ratio: T,
    /// `None` when the screener has no precision headroom.
    pub max_model_time_tight: Option<T>,
    pub max_model_time_relaxed: Option<T>,
    pub min_validator_time: Option<T>,
    pub baseline_tp: T,
    pub augmented_tp: T,
    pub baseline_time: T,
    pub augmented_time: T,
    pub verdict: Verdict,
}

/// Evaluates both requirements for `config` with `Δn / n = delta_ratio`.
pub fn evaluate<T: Scalar>(config: &PipelineConfig<T>, delta_ratio: T) -> Result<BoundsReport<T>> {
    config.validate()?;
    check_non_negative(delta_ratio, "delta ratio")?;
    let tau_v = config.validator_latency()?;
    let tau_m = config.screener_latency()?;
    let pi = config.prevalence;
    let (r_m, p_m) = (config.screener.recall, config.screener.precision);
    let n_total = config.n * (T::one() + delta_ratio);

    let base_tp = baseline_tp(pi, config.n, config.validator.recall)?;
    let base_time = baseline_time(config.n, tau_v)?;
    let aug_tp = augmented_tp(pi, n_total, r_m, config.validator.recall)?;
    let aug_time = augmented_time(pi, n_total, tau_m, tau_v, r_m, p_m)?;

    let min_extra = if r_m > T::zero() {
        min_extra_ratio(r_m)?
    } else {
        return Err(ModelError::range("screener recall", "(0, 1]"));
    };
    let budget = max_model_time(tau_v, r_m, p_m, pi, Some(delta_ratio))?.available();
    let floor = min_validator_time(tau_m, r_m, p_m, pi)?.available();

    Ok(BoundsReport {
        delta_ratio,
        min_extra_ratio: min_extra,
        max_model_time_tight: budget.and_then(|b| b.tight),
        max_model_time_relaxed: budget.map(|b| b.relaxed),
        min_validator_time: floor,
        baseline_tp: base_tp,
        augmented_tp: aug_tp,
        baseline_time: base_time,
        augmented_time: aug_time,
        verdict: judge(base_tp, aug_tp, base_time, aug_time),
    })
}
