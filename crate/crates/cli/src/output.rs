//! The record every command produces, and its three renderings.
//!
//! CSV carries only the results table, one row per quantity, with the
//! [`CSV_HEADER`] columns in that order. JSON carries the whole record.
//! Machine formats keep seconds and full precision; the text table rounds to
//! three significant figures and switches to minutes above two minutes.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const CSV_HEADER: [&str; 12] = [
    "item",
    "quantity",
    "value",
    "std_error",
    "unit",
    "provenance",
    "optimistic",
    "reference",
    "rel_error",
    "tolerance",
    "ok",
    "note",
];

/// Display threshold for switching seconds to minutes.
const MINUTES_ABOVE: f64 = 120.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

/// Where a number came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Published value, taken as given.
    Reported,
    /// Completed from precision, recall and prevalence by Bayes' rule.
    BayesEstimated,
    /// Published as a lower bound ("≥ 1.5 s").
    LowerBound,
    /// Built-in constant of the tool (benchmark statistics, defaults).
    Builtin,
    /// Given on the command line or in a user catalog.
    User,
    /// Computed from inputs that are all reported or user-given.
    Derived,
    /// Computed from at least one Bayes-estimated input.
    DerivedFromEstimate,
    /// Monte Carlo estimate.
    Simulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    Seconds,
    /// Dimensionless share, rendered as a percentage.
    Ratio,
    Probability,
    Count,
    None,
}

impl Unit {
    fn csv(self) -> &'static str {
        match self {
            Unit::Seconds => "seconds",
            Unit::Ratio => "ratio",
            Unit::Probability => "probability",
            Unit::Count => "count",
            Unit::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputValue {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Input {
    pub name: String,
    pub value: InputValue,
    pub unit: Unit,
    pub provenance: Provenance,
}

impl Input {
    pub fn number(name: &str, value: f64, unit: Unit, provenance: Provenance) -> Self {
        Input {
            name: name.to_string(),
            value: InputValue::Number(value),
            unit,
            provenance,
        }
    }

    pub fn text(name: &str, value: impl Into<String>, provenance: Provenance) -> Self {
        Input {
            name: name.to_string(),
            value: InputValue::Text(value.into()),
            unit: Unit::None,
            provenance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceKind {
    /// `|value − reference| ≤ tolerance`, in the row's unit.
    Absolute,
    /// `|value − reference| ≤ tolerance · |reference|`.
    Relative,
    /// `|value − reference| ≤ tolerance · std_error`.
    StandardErrors,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub kind: ToleranceKind,
    pub value: f64,
}

impl Tolerance {
    pub fn absolute(value: f64) -> Self {
        Tolerance {
            kind: ToleranceKind::Absolute,
            value,
        }
    }

    pub fn relative(value: f64) -> Self {
        Tolerance {
            kind: ToleranceKind::Relative,
            value,
        }
    }

    pub fn standard_errors(value: f64) -> Self {
        Tolerance {
            kind: ToleranceKind::StandardErrors,
            value,
        }
    }

    fn describe(&self, unit: Unit) -> String {
        match (self.kind, unit) {
            (ToleranceKind::Relative, _) => format!("±{}%", sig3(self.value * 100.0)),
            (ToleranceKind::StandardErrors, _) => format!("±{} SE", sig3(self.value)),
            (ToleranceKind::Absolute, Unit::Ratio) => format!("±{} pp", sig3(self.value * 100.0)),
            (ToleranceKind::Absolute, unit) => format!("±{}", format_value(self.value, unit)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub item: String,
    pub quantity: String,
    /// `None` for textual results (verdicts) and for quantities with no answer.
    pub value: Option<f64>,
    pub std_error: Option<f64>,
    pub unit: Unit,
    pub provenance: Provenance,
    /// Set when the value rests on a lower-bound latency.
    pub optimistic: bool,
    pub reference: Option<f64>,
    pub rel_error: Option<f64>,
    pub tolerance: Option<Tolerance>,
    pub ok: Option<bool>,
    pub note: Option<String>,
}

impl Row {
    pub fn new(item: &str, quantity: &str, value: f64, unit: Unit, provenance: Provenance) -> Self {
        Row {
            item: item.to_string(),
            quantity: quantity.to_string(),
            value: Some(value),
            std_error: None,
            unit,
            provenance,
            optimistic: false,
            reference: None,
            rel_error: None,
            tolerance: None,
            ok: None,
            note: None,
        }
    }

    pub fn text(item: &str, quantity: &str, note: impl Into<String>, provenance: Provenance) -> Self {
        Row {
            value: None,
            note: Some(note.into()),
            unit: Unit::None,
            ..Row::new(item, quantity, 0.0, Unit::None, provenance)
        }
    }

    pub fn optimistic(mut self, optimistic: bool) -> Self {
        self.optimistic = optimistic;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Compares the value against `reference` and records the outcome.
    pub fn check(mut self, reference: f64, tolerance: Tolerance) -> Self {
        let value = self.value.unwrap_or(f64::NAN);
        let diff = (value - reference).abs();
        let ok = match tolerance.kind {
            ToleranceKind::Absolute => diff <= tolerance.value,
            ToleranceKind::Relative => diff <= tolerance.value * reference.abs(),
            ToleranceKind::StandardErrors => {
                diff <= tolerance.value * self.std_error.unwrap_or(0.0)
                    || diff <= pipegate::bounds::BOUNDARY_TOLERANCE * reference.abs()
            }
        };
        self.reference = Some(reference);
        self.rel_error = (reference != 0.0).then(|| (value - reference) / reference);
        self.tolerance = Some(tolerance);
        self.ok = Some(ok);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    #[default]
    Ok,
    /// A reproduction or verdict check failed.
    Regression,
}

/// How the text table lays out results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    #[default]
    Rows,
    /// One line per item, one column per quantity.
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: Vec<Input>,
    pub results: Vec<Row>,
    pub warnings: Vec<String>,
    pub status: Status,
    pub layout: Layout,
}

impl OutputRecord {
    pub fn new(command: &str) -> Self {
        OutputRecord {
            command: command.to_string(),
            inputs: Vec::new(),
            results: Vec::new(),
            warnings: Vec::new(),
            status: Status::Ok,
            layout: Layout::Rows,
        }
    }

    pub fn input(&mut self, input: Input) {
        self.inputs.push(input);
    }

    pub fn push(&mut self, row: Row) {
        self.results.push(row);
    }

    /// Marks the record as a regression if any checked row failed.
    pub fn settle_checks(&mut self) {
        if self.results.iter().any(|r| r.ok == Some(false)) {
            self.status = Status::Regression;
        }
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut out = serde_json::to_string_pretty(self).expect("output record serializes");
                out.push('\n');
                out
            }
            Format::Csv => self.to_csv(),
            Format::Table => self.to_table(),
        }
    }

    fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(CSV_HEADER).expect("in-memory write");
        for row in &self.results {
            let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let flag = |v: Option<bool>| v.map(|b| b.to_string()).unwrap_or_default();
            let tolerance = row
                .tolerance
                .map(|t| {
                    let kind = match t.kind {
                        ToleranceKind::Absolute => "absolute",
                        ToleranceKind::Relative => "relative",
                        ToleranceKind::StandardErrors => "standard_errors",
                    };
                    format!("{kind}:{}", t.value)
                })
                .unwrap_or_default();
            let provenance = serde_json::to_value(row.provenance).expect("provenance serializes");
            writer
                .write_record([
                    row.item.clone(),
                    row.quantity.clone(),
                    num(row.value),
                    num(row.std_error),
                    row.unit.csv().to_string(),
                    provenance.as_str().unwrap_or_default().to_string(),
                    row.optimistic.to_string(),
                    num(row.reference),
                    num(row.rel_error),
                    tolerance,
                    flag(row.ok),
                    row.note.clone().unwrap_or_default(),
                ])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "pipegate {}", self.command);
        for input in &self.inputs {
            let value = match &input.value {
                InputValue::Number(x) => format_value(*x, input.unit),
                InputValue::Text(s) => s.clone(),
            };
            let _ = writeln!(
                out,
                "  {} = {} [{}]",
                input.name,
                value,
                provenance_label(input.provenance)
            );
        }
        out.push('\n');
        let table = match self.layout {
            Layout::Rows => self.rows_table(),
            Layout::Grid => self.grid_table(),
        };
        out.push_str(&align(&table));
        if self.results.iter().any(|r| r.optimistic) {
            out.push_str("\n* optimistic: rests on a lower-bound latency\n");
        }
        for warning in &self.warnings {
            let _ = writeln!(out, "warning: {warning}");
        }
        if self.status == Status::Regression {
            out.push_str("status: regression\n");
        }
        out
    }

    fn rows_table(&self) -> Vec<Vec<String>> {
        let checked = self.results.iter().any(|r| r.reference.is_some());
        let mut header = vec!["item", "quantity", "value"];
        if checked {
            header.extend(["reference", "error", "tolerance", "ok"]);
        }
        header.extend(["provenance", "note"]);
        let mut table = vec![header.into_iter().map(String::from).collect::<Vec<_>>()];
        for row in &self.results {
            let mut line = vec![row.item.clone(), row.quantity.clone(), cell(row)];
            if checked {
                line.push(row.reference.map(|r| format_value(r, row.unit)).unwrap_or_default());
                line.push(row.rel_error.map(signed_percent).unwrap_or_default());
                line.push(row.tolerance.map(|t| t.describe(row.unit)).unwrap_or_default());
                line.push(match row.ok {
                    Some(true) => "pass".into(),
                    Some(false) => "FAIL".into(),
                    None => String::new(),
                });
            }
            line.push(provenance_label(row.provenance).to_string());
            // Textual results already show their note as the value.
            line.push(row.value.and(row.note.clone()).unwrap_or_default());
            table.push(line);
        }
        table
    }

    fn grid_table(&self) -> Vec<Vec<String>> {
        let mut items: Vec<&str> = Vec::new();
        let mut columns: Vec<&str> = Vec::new();
        for row in &self.results {
            if !items.contains(&row.item.as_str()) {
                items.push(&row.item);
            }
            if !columns.contains(&row.quantity.as_str()) {
                columns.push(&row.quantity);
            }
        }
        let mut header = vec![String::new()];
        header.extend(columns.iter().map(|c| c.to_string()));
        header.push("provenance".into());
        let mut table = vec![header];
        for item in items {
            let rows: Vec<&Row> = self.results.iter().filter(|r| r.item == item).collect();
            let mut line = vec![item.to_string()];
            for column in &columns {
                line.push(
                    rows.iter()
                        .find(|r| r.quantity == *column)
                        .map(|r| cell(r))
                        .unwrap_or_default(),
                );
            }
            line.push(
                rows.first()
                    .map(|r| provenance_label(r.provenance))
                    .unwrap_or_default()
                    .to_string(),
            );
            table.push(line);
        }
        table
    }
}

fn cell(row: &Row) -> String {
    let mut text = match (row.value, row.std_error) {
        (Some(v), Some(se)) => format!("{} ± {}", format_value(v, row.unit), format_value(se, row.unit)),
        (Some(v), None) => format_value(v, row.unit),
        (None, _) => row
            .note
            .clone()
            .map(|n| n.replace(' ', "-"))
            .unwrap_or_else(|| "-".into()),
    };
    if row.optimistic {
        text.push('*');
    }
    text
}

fn provenance_label(p: Provenance) -> &'static str {
    match p {
        Provenance::Reported => "reported",
        Provenance::BayesEstimated => "bayes-estimated",
        Provenance::LowerBound => "lower-bound",
        Provenance::Builtin => "builtin",
        Provenance::User => "user",
        Provenance::Derived => "derived",
        Provenance::DerivedFromEstimate => "derived (bayes-estimated input)",
        Provenance::Simulated => "simulated",
    }
}

fn align(table: &[Vec<String>]) -> String {
    let columns = table.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            table
                .iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in table {
        let mut line = String::new();
        for (c, text) in row.iter().enumerate() {
            let _ = write!(line, "{text:<width$}  ", width = widths[c]);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Rounds to three significant figures and prints without exponent.
pub fn sig3(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.2e}").parse().expect("formatted float reparses");
    let magnitude = rounded.abs().log10().floor() as i32;
    let decimals = (2 - magnitude).max(0) as usize;
    format!("{rounded:.decimals$}")
}

pub fn format_value(x: f64, unit: Unit) -> String {
    match unit {
        Unit::Seconds if x.abs() > MINUTES_ABOVE => format!("{} min", sig3(x / 60.0)),
        Unit::Seconds => format!("{} s", sig3(x)),
        Unit::Ratio => format!("{}%", sig3(x * 100.0)),
        _ => sig3(x),
    }
}

fn signed_percent(x: f64) -> String {
    let text = sig3(x * 100.0);
    if x >= 0.0 {
        format!("+{text}%")
    } else {
        format!("{text}%")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_significant_figures() {
        assert_eq!(sig3(4.6037), "4.60");
        assert_eq!(sig3(27_514.88), "27500");
        assert_eq!(sig3(0.0017), "0.00170");
        assert_eq!(sig3(999.6), "1000");
        assert_eq!(sig3(-0.0211), "-0.0211");
        assert_eq!(sig3(0.0), "0");
    }

    #[test]
    fn seconds_switch_to_minutes() {
        assert_eq!(format_value(276.22, Unit::Seconds), "4.60 min");
        assert_eq!(format_value(120.0, Unit::Seconds), "120 s");
        assert_eq!(format_value(5.2336, Unit::Seconds), "5.23 s");
        assert_eq!(format_value(0.0526, Unit::Ratio), "5.26%");
    }

    #[test]
    fn tolerance_checks() {
        let row = Row::new("m", "q", 1.04, Unit::Seconds, Provenance::Derived);
        assert_eq!(row.clone().check(1.0, Tolerance::relative(0.05)).ok, Some(true));
        assert_eq!(row.clone().check(1.0, Tolerance::relative(0.03)).ok, Some(false));
        assert_eq!(row.check(1.0, Tolerance::absolute(0.05)).ok, Some(true));
    }

    #[test]
    fn failed_check_marks_regression() {
        let mut record = OutputRecord::new("x");
        record.push(Row::new("m", "q", 2.0, Unit::Count, Provenance::Derived).check(1.0, Tolerance::relative(0.1)));
        assert_eq!(record.status, Status::Ok);
        record.settle_checks();
        assert_eq!(record.status, Status::Regression);
    }

    #[test]
    fn csv_header_is_stable() {
        let record = OutputRecord::new("x");
        assert_eq!(record.render(Format::Csv).trim_end(), CSV_HEADER.join(","));
    }
}
