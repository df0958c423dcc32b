//! Published detector metrics and validator timings.
//!
//! The built-in catalog carries seven vulnerability detectors together with
//! the Vul4J test-suite timing quartiles and the APR4Vul good-patch
//! prevalence. User catalogs are JSON documents:
//!
//! ```json
//! {
//!   "models": [
//!     {"name": "LineVul", "source": "...", "precision": 0.97, "recall": 0.86,
//!      "fpr": 0.002, "fpr_kind": "bayes_estimated",
//!      "latency_seconds": 1.0, "latency_kind": "lower_bound", "prevalence": 0.06}
//!   ],
//!   "benchmark": {"q25": 9.17, "median": 27.04, "q75": 74.5, "mean": 337.83, "prevalence": 0.38}
//! }
//! ```
//!
//! `fpr`, `fpr_kind`, `latency_seconds`, `latency_kind` and `benchmark` are
//! optional; unknown fields are rejected. A missing `fpr` is completed by
//! Bayes' rule from precision, recall and the evaluation prevalence.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ModelError;
use crate::metrics::{bayes_fpr, invert_detector, ClassifierSpec, ScreenerMetrics, CONSISTENCY_TOLERANCE};

/// Largest allowed gap between a stated Bayes-estimated FPR and the value
/// recomputed from its own row (published FPRs carry 2-3 decimals).
pub const BAYES_ROUNDING_TOLERANCE: f64 = 0.005;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed catalog at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid {field} for {model}: {reason}")]
    Validation {
        model: String,
        field: &'static str,
        reason: String,
    },
    #[error("duplicate model name {0:?}")]
    DuplicateName(String),
}

impl CatalogError {
    fn invalid(model: &str, field: &'static str, reason: impl Into<String>) -> Self {
        CatalogError::Validation {
            model: model.to_string(),
            field,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FprProvenance {
    Reported,
    BayesEstimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatencyProvenance {
    /// End-to-end time including conversion of source code into model input.
    ReportedWithPreprocessing,
    /// Query time only; the real per-patch cost is at least this.
    LowerBound,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub name: String,
    pub source: String,
    pub spec: ClassifierSpec<f64>,
    pub fpr_provenance: FprProvenance,
    pub latency_provenance: LatencyProvenance,
}

impl ModelRecord {
    /// Screener-side metrics of the detector used with flipped labels.
    pub fn screener(&self) -> Result<ScreenerMetrics<f64>, ModelError> {
        invert_detector(&self.spec)
    }

    pub fn latency(&self) -> Result<f64, ModelError> {
        self.spec
            .latency
            .ok_or_else(|| ModelError::LatencyUnknown(self.name.clone()))
    }

    /// Results built on a lower-bound latency overstate the screener's merit.
    pub fn is_optimistic(&self) -> bool {
        self.latency_provenance == LatencyProvenance::LowerBound
    }
}

/// Test-suite execution time statistics, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkTimes {
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub mean: f64,
}

impl BenchmarkTimes {
    pub fn columns(&self) -> [(&'static str, f64); 4] {
        [
            ("q25", self.q25),
            ("median", self.median),
            ("q75", self.q75),
            ("mean", self.mean),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Benchmark {
    pub times: BenchmarkTimes,
    /// Share of good patches among generated candidates.
    pub prevalence: f64,
}

/// A catalog-level warning that does not prevent loading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogWarning {
    pub model: String,
    /// `|P − P(π_eval, R, FPR)|`.
    pub consistency_gap: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Catalog {
    pub models: Vec<ModelRecord>,
    pub benchmark: Option<Benchmark>,
}

/// Lower-cases and drops everything but letters and digits, so that
/// `"CodeJIT-FastRGCN"` and `"codejit fastrgcn"` name the same model.
fn normalize(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

impl Catalog {
    pub fn lookup(&self, name: &str) -> Option<&ModelRecord> {
        let key = normalize(name);
        self.models.iter().find(|m| normalize(&m.name) == key)
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn to_file(&self) -> CatalogFile {
        CatalogFile {
            models: self.models.iter().map(ModelEntry::from).collect(),
            benchmark: self.benchmark.map(|b| BenchmarkEntry {
                q25: b.times.q25,
                median: b.times.median,
                q75: b.times.q75,
                mean: b.times.mean,
                prevalence: b.prevalence,
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("catalog serializes")
    }

    /// Consistency warnings for every record whose (P, R, FPR, π_eval) do not
    /// agree within [`CONSISTENCY_TOLERANCE`].
    pub fn warnings(&self) -> Vec<CatalogWarning> {
        self.models
            .iter()
            .filter_map(|m| {
                let gap = m.spec.consistency_gap()?;
                (gap > CONSISTENCY_TOLERANCE).then(|| CatalogWarning {
                    model: m.name.clone(),
                    consistency_gap: gap,
                    message: format!(
                        "precision differs by {gap:.4} from the value implied by recall, fpr and prevalence"
                    ),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatencyKind {
    Reported,
    LowerBound,
}

/// Serialized form of one catalog row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    pub name: String,
    pub source: String,
    pub precision: f64,
    pub recall: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fpr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fpr_kind: Option<FprProvenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_kind: Option<LatencyKind>,
    pub prevalence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkEntry {
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub mean: f64,
    pub prevalence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogFile {
    pub models: Vec<ModelEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<BenchmarkEntry>,
}

impl From<&ModelRecord> for ModelEntry {
    fn from(record: &ModelRecord) -> Self {
        let spec = &record.spec;
        ModelEntry {
            name: record.name.clone(),
            source: record.source.clone(),
            precision: spec.precision,
            recall: spec.recall,
            fpr: spec.fpr,
            fpr_kind: Some(record.fpr_provenance),
            latency_seconds: spec.latency,
            latency_kind: match record.latency_provenance {
                LatencyProvenance::ReportedWithPreprocessing => Some(LatencyKind::Reported),
                LatencyProvenance::LowerBound => Some(LatencyKind::LowerBound),
                LatencyProvenance::Unknown => None,
            },
            prevalence: spec.eval_prevalence.unwrap_or(f64::NAN),
        }
    }
}

fn unit(model: &str, field: &'static str, value: f64, lo_open: bool, hi_open: bool) -> Result<f64, CatalogError> {
    let lo_ok = if lo_open { value > 0.0 } else { value >= 0.0 };
    let hi_ok = if hi_open { value < 1.0 } else { value <= 1.0 };
    if lo_ok && hi_ok {
        Ok(value)
    } else {
        let range = match (lo_open, hi_open) {
            (true, true) => "(0, 1)",
            (true, false) => "(0, 1]",
            (false, true) => "[0, 1)",
            (false, false) => "[0, 1]",
        };
        Err(CatalogError::invalid(
            model,
            field,
            format!("{value} is outside {range}"),
        ))
    }
}

impl ModelEntry {
    pub fn into_record(self) -> Result<ModelRecord, CatalogError> {
        let name = self.name.trim().to_string();
        if name.is_empty() {
            return Err(CatalogError::invalid("<unnamed>", "name", "must not be empty"));
        }
        let precision = unit(&name, "precision", self.precision, true, false)?;
        let recall = unit(&name, "recall", self.recall, false, false)?;
        let prevalence = unit(&name, "prevalence", self.prevalence, true, true)?;

        let (fpr, fpr_provenance) = match (self.fpr, self.fpr_kind) {
            (Some(fpr), kind) => {
                let fpr = unit(&name, "fpr", fpr, false, false)?;
                let kind = kind.unwrap_or(FprProvenance::Reported);
                if kind == FprProvenance::BayesEstimated {
                    let recomputed = bayes_fpr(precision, recall, prevalence)
                        .map_err(|e| CatalogError::invalid(&name, "fpr", e.to_string()))?;
                    if (recomputed - fpr).abs() > BAYES_ROUNDING_TOLERANCE {
                        return Err(CatalogError::invalid(
                            &name,
                            "fpr",
                            format!("stated Bayes estimate {fpr} differs from recomputed {recomputed:.4}"),
                        ));
                    }
                }
                (fpr, kind)
            }
            (None, Some(FprProvenance::Reported)) => {
                return Err(CatalogError::invalid(&name, "fpr_kind", "reported fpr is missing"));
            }
            (None, _) => {
                let estimate = bayes_fpr(precision, recall, prevalence)
                    .map_err(|e| CatalogError::invalid(&name, "fpr", e.to_string()))?;
                let estimate = unit(&name, "fpr", estimate, false, false).map_err(|_| {
                    CatalogError::invalid(
                        &name,
                        "fpr",
                        format!(
                            "Bayes estimate {estimate:.4} is not a rate; precision, recall and prevalence disagree"
                        ),
                    )
                })?;
                (estimate, FprProvenance::BayesEstimated)
            }
        };

        let (latency, latency_provenance) = match (self.latency_seconds, self.latency_kind) {
            (Some(seconds), kind) => {
                if !(seconds.is_finite() && seconds >= 0.0) {
                    return Err(CatalogError::invalid(
                        &name,
                        "latency_seconds",
                        format!("{seconds} is negative"),
                    ));
                }
                let provenance = match kind.unwrap_or(LatencyKind::Reported) {
                    LatencyKind::Reported => LatencyProvenance::ReportedWithPreprocessing,
                    LatencyKind::LowerBound => LatencyProvenance::LowerBound,
                };
                (Some(seconds), provenance)
            }
            (None, Some(_)) => {
                return Err(CatalogError::invalid(
                    &name,
                    "latency_kind",
                    "given without latency_seconds",
                ));
            }
            (None, None) => (None, LatencyProvenance::Unknown),
        };

        Ok(ModelRecord {
            name,
            source: self.source,
            spec: ClassifierSpec {
                precision,
                recall,
                fpr: Some(fpr),
                latency,
                eval_prevalence: Some(prevalence),
            },
            fpr_provenance,
            latency_provenance,
        })
    }
}

impl BenchmarkEntry {
    pub fn into_benchmark(self) -> Result<Benchmark, CatalogError> {
        let field = "benchmark";
        let times = BenchmarkTimes {
            q25: self.q25,
            median: self.median,
            q75: self.q75,
            mean: self.mean,
        };
        for (name, value) in times.columns() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(CatalogError::invalid(
                    field,
                    "times",
                    format!("{name} = {value} is negative"),
                ));
            }
        }
        if !(times.q25 <= times.median && times.median <= times.q75) {
            return Err(CatalogError::invalid(
                field,
                "times",
                "quartiles must satisfy q25 <= median <= q75",
            ));
        }
        if times.mean <= 0.0 {
            return Err(CatalogError::invalid(field, "mean", "must be positive"));
        }
        let prevalence = unit(field, "prevalence", self.prevalence, true, true)?;
        Ok(Benchmark { times, prevalence })
    }
}

impl CatalogFile {
    pub fn into_catalog(self) -> Result<Catalog, CatalogError> {
        let mut catalog = Catalog::default();
        for entry in self.models {
            let record = entry.into_record()?;
            if catalog.lookup(&record.name).is_some() {
                return Err(CatalogError::DuplicateName(record.name));
            }
            catalog.models.push(record);
        }
        catalog.benchmark = self.benchmark.map(BenchmarkEntry::into_benchmark).transpose()?;
        Ok(catalog)
    }
}

/// Parses a catalog document. Consistency problems come back as warnings.
pub fn parse_catalog(json: &str) -> Result<(Catalog, Vec<CatalogWarning>), CatalogError> {
    let file: CatalogFile = serde_json::from_str(json).map_err(|e| CatalogError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let catalog = file.into_catalog()?;
    let warnings = catalog.warnings();
    Ok((catalog, warnings))
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<(Catalog, Vec<CatalogWarning>), CatalogError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_catalog(&text)
}

struct Row {
    name: &'static str,
    source: &'static str,
    latency: Option<(f64, LatencyProvenance)>,
    precision: f64,
    recall: f64,
    fpr: f64,
    fpr_provenance: FprProvenance,
    prevalence: f64,
}

use FprProvenance::{BayesEstimated, Reported};
use LatencyProvenance::{LowerBound, ReportedWithPreprocessing};

// Starred FPRs are the published Bayes estimates, kept at their printed precision.
const BUILTIN_ROWS: [Row; 7] = [
    Row {
        name: "VulDeePecker",
        source: "Li et al., VulDeePecker, NDSS 2018",
        latency: Some((156.0, ReportedWithPreprocessing)),
        precision: 0.87,
        recall: 0.84,
        fpr: 0.05,
        fpr_provenance: Reported,
        prevalence: 0.29,
    },
    Row {
        name: "VulDeePecker on ReVeal",
        source: "Chakraborty et al., ReVeal evaluation, TSE 2022",
        latency: Some((156.0, ReportedWithPreprocessing)),
        precision: 0.11,
        recall: 0.14,
        fpr: 0.11,
        fpr_provenance: BayesEstimated,
        prevalence: 0.09,
    },
    Row {
        name: "IVDetect on ReVeal",
        source: "Chakraborty et al., ReVeal evaluation, TSE 2022",
        latency: Some((1.5, LowerBound)),
        precision: 0.39,
        recall: 0.52,
        fpr: 0.08,
        fpr_provenance: BayesEstimated,
        prevalence: 0.09,
    },
    Row {
        name: "LineVul",
        source: "Fu and Tantithamthavorn, LineVul, MSR 2022",
        latency: None,
        precision: 0.97,
        recall: 0.86,
        fpr: 0.002,
        fpr_provenance: BayesEstimated,
        prevalence: 0.06,
    },
    Row {
        name: "LineVD",
        source: "Hin et al., LineVD, MSR 2022",
        latency: Some((1.0, LowerBound)),
        precision: 0.27,
        recall: 0.53,
        fpr: 0.09,
        fpr_provenance: BayesEstimated,
        prevalence: 0.06,
    },
    Row {
        name: "CodeJIT FastRGCN",
        source: "Nguyen et al., CodeJIT, 2024",
        latency: Some((0.75, LowerBound)),
        precision: 0.77,
        recall: 0.71,
        fpr: 0.22,
        fpr_provenance: Reported,
        prevalence: 0.5,
    },
    Row {
        name: "CodeJIT RGCN",
        source: "Nguyen et al., CodeJIT, 2024",
        latency: Some((1.42, LowerBound)),
        precision: 0.78,
        recall: 0.70,
        fpr: 0.20,
        fpr_provenance: BayesEstimated,
        prevalence: 0.5,
    },
];

/// The seven published detectors, in table order.
pub fn builtin_models() -> Vec<ModelRecord> {
    BUILTIN_ROWS
        .iter()
        .map(|row| ModelRecord {
            name: row.name.to_string(),
            source: row.source.to_string(),
            spec: ClassifierSpec {
                precision: row.precision,
                recall: row.recall,
                fpr: Some(row.fpr),
                latency: row.latency.map(|(s, _)| s),
                eval_prevalence: Some(row.prevalence),
            },
            fpr_provenance: row.fpr_provenance,
            latency_provenance: row.latency.map_or(LatencyProvenance::Unknown, |(_, p)| p),
        })
        .collect()
}

/// Vul4J test-suite timings and the APR4Vul prevalence (30 good of 78).
pub fn builtin_benchmark() -> Benchmark {
    Benchmark {
        times: BenchmarkTimes {
            q25: 9.17,
            median: 27.04,
            q75: 74.5,
            mean: 337.83,
        },
        prevalence: 0.38,
    }
}

pub fn builtin_catalog() -> Catalog {
    Catalog {
        models: builtin_models(),
        benchmark: Some(builtin_benchmark()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_lookups() {
        let c = builtin_catalog();
        assert_eq!(c.models.len(), 7);
        assert_eq!(c.lookup("LineVul").unwrap().spec.precision, 0.97);
        assert_eq!(
            c.lookup("VulDeePecker").unwrap().latency_provenance,
            LatencyProvenance::ReportedWithPreprocessing
        );
        let fast = c.lookup("CodeJIT FastRGCN").unwrap();
        assert_eq!(fast.spec.fpr, Some(0.22));
        assert_eq!(fast.fpr_provenance, FprProvenance::Reported);
        assert!(c.lookup("codejit-fastrgcn").is_some());
        assert!(c.lookup("VulDeePecker on Reveal").is_some());
        assert!(c.lookup("nope").is_none());
        assert!(c.lookup("LineVul").unwrap().latency().is_err());
        assert!(c.lookup("LineVD").unwrap().is_optimistic());
    }

    #[test]
    fn builtin_benchmark_values() {
        let b = builtin_benchmark();
        assert_eq!(b.times.q25, 9.17);
        assert_eq!(b.prevalence, 0.38);
        assert_eq!(b.times.mean, 337.83);
    }

    #[test]
    fn builtin_starred_rows_reproduce() {
        for m in builtin_models() {
            if m.fpr_provenance == FprProvenance::BayesEstimated {
                let p = &m.spec;
                let fpr = bayes_fpr(p.precision, p.recall, p.eval_prevalence.unwrap()).unwrap();
                assert!((fpr - p.fpr.unwrap()).abs() <= BAYES_ROUNDING_TOLERANCE, "{}", m.name);
            }
        }
    }

    #[test]
    fn builtin_has_no_consistency_warnings() {
        assert!(builtin_catalog().warnings().is_empty());
    }

    #[test]
    fn missing_fpr_is_bayes_completed() {
        let json = r#"{"models":[{"name":"LineVul","source":"x","precision":0.97,"recall":0.86,"prevalence":0.06}]}"#;
        let (c, warnings) = parse_catalog(json).unwrap();
        assert!(warnings.is_empty());
        let m = &c.models[0];
        assert_eq!(m.fpr_provenance, FprProvenance::BayesEstimated);
        assert!((m.spec.fpr.unwrap() - 0.0017).abs() < 1e-4);
        assert_eq!(m.latency_provenance, LatencyProvenance::Unknown);
    }

    #[test]
    fn out_of_range_precision_names_the_field() {
        let json = r#"{"models":[{"name":"X","source":"x","precision":1.3,"recall":0.5,"prevalence":0.1}]}"#;
        match parse_catalog(json) {
            Err(CatalogError::Validation { field, model, .. }) => {
                assert_eq!(field, "precision");
                assert_eq!(model, "X");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_model_list() {
        let (c, w) = parse_catalog(r#"{"models":[]}"#).unwrap();
        assert!(c.is_empty());
        assert!(w.is_empty());
        assert_eq!(c.benchmark, None);
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_catalog("{\n  \"models\": [\n    {\"name\": }\n]}") {
            Err(CatalogError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let json =
            r#"{"models":[{"name":"X","source":"x","precision":0.5,"recall":0.5,"prevalence":0.1,"recal":0.3}]}"#;
        assert!(matches!(parse_catalog(json), Err(CatalogError::Parse { .. })));
        assert!(matches!(
            parse_catalog(r#"{"modles":[]}"#),
            Err(CatalogError::Parse { .. })
        ));
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let json = r#"{"models":[
            {"name":"A","source":"x","precision":0.5,"recall":0.5,"fpr":0.1,"prevalence":0.1},
            {"name":"a","source":"y","precision":0.6,"recall":0.5,"fpr":0.1,"prevalence":0.1}]}"#;
        assert!(matches!(parse_catalog(json), Err(CatalogError::DuplicateName(n)) if n == "a"));
    }

    #[test]
    fn stated_bayes_estimate_must_match_its_row() {
        let json = r#"{"models":[{"name":"X","source":"x","precision":0.97,"recall":0.86,"fpr":0.05,"fpr_kind":"bayes_estimated","prevalence":0.06}]}"#;
        assert!(matches!(
            parse_catalog(json),
            Err(CatalogError::Validation { field: "fpr", .. })
        ));
    }

    #[test]
    fn inconsistent_row_loads_with_warning() {
        let json = r#"{"models":[{"name":"X","source":"x","precision":0.5,"recall":0.9,"fpr":0.01,"prevalence":0.3}]}"#;
        let (c, w) = parse_catalog(json).unwrap();
        assert_eq!(c.models.len(), 1);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].model, "X");
        assert!(w[0].consistency_gap > CONSISTENCY_TOLERANCE);
    }

    #[test]
    fn latency_kind_without_latency() {
        let json = r#"{"models":[{"name":"X","source":"x","precision":0.5,"recall":0.5,"fpr":0.1,"latency_kind":"lower_bound","prevalence":0.1}]}"#;
        assert!(matches!(
            parse_catalog(json),
            Err(CatalogError::Validation {
                field: "latency_kind",
                ..
            })
        ));
    }

    #[test]
    fn benchmark_quartiles_are_ordered() {
        let json = r#"{"models":[],"benchmark":{"q25":10,"median":5,"q75":20,"mean":9,"prevalence":0.4}}"#;
        assert!(matches!(
            parse_catalog(json),
            Err(CatalogError::Validation { field: "times", .. })
        ));
    }

    #[test]
    fn builtin_serializes_and_reparses() {
        let c = builtin_catalog();
        let (back, _) = parse_catalog(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn load_reports_missing_file() {
        assert!(matches!(
            load_catalog("/nonexistent/catalog.json"),
            Err(CatalogError::Io { .. })
        ));
    }
}
