//! Confusion-matrix algebra.
//!
//! Conversions among precision, recall, false-positive rate and prevalence,
//! Bayes-rule completion of a missing FPR, and the label inversion that turns
//! a published vulnerability detector ("vulnerable" is positive) into a patch
//! screener ("good patch" is positive).
//!
//! Inputs that sit exactly on 0 or 1 are routed to their closed forms instead
//! of the generic quotient so that no 0/0 is ever evaluated.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::scalar::Scalar;

/// Absolute tolerance when checking that a published (P, R, FPR, prevalence)
/// quadruple is self-consistent. Published figures are rounded to two decimals.
pub const CONSISTENCY_TOLERANCE: f64 = 0.02;

pub(crate) fn check_unit<T: Scalar>(value: T, param: &'static str) -> Result<T> {
    if value >= T::zero() && value <= T::one() {
        Ok(value)
    } else {
        Err(ModelError::range(param, "[0, 1]"))
    }
}

pub(crate) fn check_open_unit<T: Scalar>(value: T, param: &'static str) -> Result<T> {
    if value > T::zero() && value < T::one() {
        Ok(value)
    } else {
        Err(ModelError::range(param, "(0, 1)"))
    }
}

pub(crate) fn check_half_open_unit<T: Scalar>(value: T, param: &'static str) -> Result<T> {
    if value > T::zero() && value <= T::one() {
        Ok(value)
    } else {
        Err(ModelError::range(param, "(0, 1]"))
    }
}

pub(crate) fn check_non_negative<T: Scalar>(value: T, param: &'static str) -> Result<T> {
    if value >= T::zero() {
        Ok(value)
    } else {
        Err(ModelError::range(param, ">= 0"))
    }
}

/// Expected (possibly fractional) confusion-matrix counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionCounts<T> {
    pub tp: T,
    pub fp: T,
    #[serde(rename = "fn")]
    pub fn_: T,
    pub tn: T,
}

impl<T: Scalar> ConfusionCounts<T> {
    pub fn new(tp: T, fp: T, fn_: T, tn: T) -> Result<Self> {
        check_non_negative(tp, "tp")?;
        check_non_negative(fp, "fp")?;
        check_non_negative(fn_, "fn")?;
        check_non_negative(tn, "tn")?;
        Ok(ConfusionCounts { tp, fp, fn_, tn })
    }

    pub fn total(&self) -> T {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn precision(&self) -> Result<T> {
        let predicted = self.tp + self.fp;
        if predicted == T::zero() {
            return Err(ModelError::UndefinedPrecision);
        }
        Ok(self.tp / predicted)
    }

    pub fn recall(&self) -> Result<T> {
        let positives = self.tp + self.fn_;
        if positives == T::zero() {
            return Err(ModelError::Inconsistent("recall undefined without positives"));
        }
        Ok(self.tp / positives)
    }

    pub fn fpr(&self) -> Result<T> {
        let negatives = self.fp + self.tn;
        if negatives == T::zero() {
            return Err(ModelError::Inconsistent("fpr undefined without negatives"));
        }
        Ok(self.fp / negatives)
    }

    pub fn prevalence(&self) -> Result<T> {
        let total = self.total();
        if total == T::zero() {
            return Err(ModelError::range("total", "> 0"));
        }
        Ok((self.tp + self.fn_) / total)
    }
}

/// Prevalence-free description of a binary classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTriple<T> {
    pub tpr: T,
    pub fpr: T,
}

impl<T: Scalar> RateTriple<T> {
    pub fn new(tpr: T, fpr: T) -> Result<Self> {
        Ok(RateTriple {
            tpr: check_unit(tpr, "tpr")?,
            fpr: check_unit(fpr, "fpr")?,
        })
    }

    /// Rates of the screener obtained by running a detector with flipped labels.
    pub fn screener_from_detector(detector_recall: T, detector_fpr: T) -> Result<Self> {
        RateTriple::new(
            invert_detector_recall(detector_fpr)?,
            invert_detector_fpr(detector_recall)?,
        )
    }

    pub fn precision_at(&self, prevalence: T) -> Result<T> {
        precision_at_prevalence(self.tpr, self.fpr, prevalence)
    }
}

/// Published metrics of one binary classifier.
///
/// `fpr`, `latency` and `eval_prevalence` are optional because most sources
/// leave at least one of them out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec<T> {
    pub precision: T,
    pub recall: T,
    pub fpr: Option<T>,
    /// Seconds per classified item.
    pub latency: Option<T>,
    pub eval_prevalence: Option<T>,
}

impl<T: Scalar> ClassifierSpec<T> {
    pub fn new(precision: T, recall: T) -> Result<Self> {
        let spec = ClassifierSpec {
            precision,
            recall,
            fpr: None,
            latency: None,
            eval_prevalence: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_fpr(mut self, fpr: T) -> Result<Self> {
        self.fpr = Some(fpr);
        self.validate()?;
        Ok(self)
    }

    pub fn with_latency(mut self, seconds: T) -> Result<Self> {
        self.latency = Some(seconds);
        self.validate()?;
        Ok(self)
    }

    pub fn with_eval_prevalence(mut self, prevalence: T) -> Result<Self> {
        self.eval_prevalence = Some(prevalence);
        self.validate()?;
        Ok(self)
    }

    /// Range checks for every present field.
    pub fn validate(&self) -> Result<()> {
        check_half_open_unit(self.precision, "precision")?;
        check_unit(self.recall, "recall")?;
        if let Some(fpr) = self.fpr {
            check_unit(fpr, "fpr")?;
        }
        if let Some(latency) = self.latency {
            check_non_negative(latency, "latency")?;
        }
        if let Some(prevalence) = self.eval_prevalence {
            check_open_unit(prevalence, "prevalence")?;
        }
        Ok(())
    }

    /// `|P - P(π_eval, R, FPR)|` when all four metrics are present.
    pub fn consistency_gap(&self) -> Option<T> {
        let fpr = self.fpr?;
        let prevalence = self.eval_prevalence?;
        let implied = precision_at_prevalence(self.recall, fpr, prevalence).ok()?;
        Some((self.precision - implied).abs())
    }

    pub fn is_consistent(&self, tolerance: T) -> bool {
        self.consistency_gap().is_none_or(|gap| gap <= tolerance)
    }

    /// The FPR if reported, otherwise its Bayes-rule estimate from the
    /// evaluation prevalence.
    pub fn fpr_or_estimate(&self) -> Result<T> {
        match (self.fpr, self.eval_prevalence) {
            (Some(fpr), _) => Ok(fpr),
            (None, Some(prevalence)) => bayes_fpr(self.precision, self.recall, prevalence),
            (None, None) => Err(ModelError::Inconsistent(
                "fpr missing and no evaluation prevalence to estimate it",
            )),
        }
    }
}

/// Screener-side metrics derived from a detector spec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenerMetrics<T> {
    /// Precision from the published (P, R, FPR) triple, evaluated as written.
    pub precision: T,
    pub recall: T,
    pub fpr: T,
}

impl<T: Scalar> ScreenerMetrics<T> {
    pub fn rates(&self) -> RateTriple<T> {
        RateTriple {
            tpr: self.recall,
            fpr: self.fpr,
        }
    }

    /// Precision implied by the screener's rates at `prevalence`. Differs from
    /// [`ScreenerMetrics::precision`] whenever the published triple does not
    /// hold at that prevalence.
    pub fn precision_at(&self, prevalence: T) -> Result<T> {
        self.rates().precision_at(prevalence)
    }
}

/// Inverts a detector spec into the screener metrics. The FPR is completed by
/// Bayes' rule when absent.
pub fn invert_detector<T: Scalar>(detector: &ClassifierSpec<T>) -> Result<ScreenerMetrics<T>> {
    let fpr = detector.fpr_or_estimate()?;
    Ok(ScreenerMetrics {
        precision: invert_detector_precision(detector.precision, detector.recall, fpr)?,
        recall: invert_detector_recall(fpr)?,
        fpr: invert_detector_fpr(detector.recall)?,
    })
}

/// FPR implied by precision, recall and prevalence:
/// `π·R·(1 − P) / (P·(1 − π))`.
pub fn bayes_fpr<T: Scalar>(precision: T, recall: T, prevalence: T) -> Result<T> {
    check_half_open_unit(precision, "precision")?;
    check_unit(recall, "recall")?;
    check_open_unit(prevalence, "prevalence")?;
    if precision == T::one() || recall == T::zero() {
        return Ok(T::zero());
    }
    Ok(prevalence * recall * (T::one() - precision) / (precision * (T::one() - prevalence)))
}

/// Expected counts of a classifier with the given rates applied to `total`
/// items at `prevalence`.
pub fn counts_from_rates<T: Scalar>(tpr: T, fpr: T, prevalence: T, total: T) -> Result<ConfusionCounts<T>> {
    check_unit(tpr, "tpr")?;
    check_unit(fpr, "fpr")?;
    check_open_unit(prevalence, "prevalence")?;
    if total <= T::zero() {
        return Err(ModelError::range("total", "> 0"));
    }
    let positives = prevalence * total;
    let negatives = (T::one() - prevalence) * total;
    Ok(ConfusionCounts {
        tp: tpr * positives,
        fp: fpr * negatives,
        fn_: (T::one() - tpr) * positives,
        tn: (T::one() - fpr) * negatives,
    })
}

/// Exchanges the positive and negative class.
pub fn swap_labels<T: Copy>(counts: ConfusionCounts<T>) -> ConfusionCounts<T> {
    ConfusionCounts {
        tp: counts.tn,
        fp: counts.fn_,
        fn_: counts.fp,
        tn: counts.tp,
    }
}

/// Precision of the flipped classifier computed from the detector's published
/// precision, recall and FPR:
///
/// ```text
/// P_M = 1 / (1 + FPR·P·(1 − R) / ((1 − FPR)·(1 − P)·R))
/// ```
///
/// The triple is used as given, even when it is not consistent at any single
/// prevalence. Use [`precision_at_prevalence`] on the flipped rates for the
/// prevalence-consistent alternative.
pub fn invert_detector_precision<T: Scalar>(precision: T, recall: T, fpr: T) -> Result<T> {
    check_half_open_unit(precision, "precision")?;
    check_half_open_unit(recall, "recall")?;
    check_unit(fpr, "fpr")?;
    if fpr == T::one() {
        return Err(ModelError::range("fpr", "[0, 1)"));
    }
    if precision == T::one() && fpr > T::zero() {
        return Err(ModelError::Inconsistent(
            "perfect precision with a nonzero false-positive rate",
        ));
    }
    if recall == T::one() || fpr == T::zero() {
        return Ok(T::one());
    }
    let one = T::one();
    let odds_against = fpr * precision * (one - recall) / ((one - fpr) * (one - precision) * recall);
    Ok(one / (one + odds_against))
}

/// Recall of the flipped classifier: `1 − FPR_detector`.
pub fn invert_detector_recall<T: Scalar>(detector_fpr: T) -> Result<T> {
    Ok(T::one() - check_unit(detector_fpr, "fpr")?)
}

/// FPR of the flipped classifier: `1 − R_detector`.
pub fn invert_detector_fpr<T: Scalar>(detector_recall: T) -> Result<T> {
    Ok(T::one() - check_unit(detector_recall, "recall")?)
}

/// `π·tpr / (π·tpr + (1 − π)·fpr)`.
pub fn precision_at_prevalence<T: Scalar>(tpr: T, fpr: T, prevalence: T) -> Result<T> {
    check_unit(tpr, "tpr")?;
    check_unit(fpr, "fpr")?;
    check_open_unit(prevalence, "prevalence")?;
    if tpr == T::zero() && fpr == T::zero() {
        return Err(ModelError::UndefinedPrecision);
    }
    if fpr == T::zero() {
        return Ok(T::one());
    }
    if tpr == T::zero() {
        return Ok(T::zero());
    }
    let hits = prevalence * tpr;
    Ok(hits / (hits + (T::one() - prevalence) * fpr))
}
