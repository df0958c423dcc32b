use crate::output::{Input, Layout, OutputRecord, Provenance, Row, Status, Tolerance, Unit};
use crate::{BoundsArgs, CliError, Context, InvertArgs, LimitsArgs, ModelArgs, SimulateArgs};
use pipegate::bounds::{self, Headroom, PipelineConfig};
use pipegate::catalog::{load_catalog, Benchmark, FprProvenance, LatencyProvenance, ModelEntry, ModelRecord};
use pipegate::metrics::{ClassifierSpec, RateTriple, ScreenerMetrics};
use pipegate::simulate::{self, PrecisionMode, Runner, SimConfig};
use pipegate::ModelError;
use std::path::Path;

/// A detector together with how its numbers were obtained.
struct Resolved {
    record: ModelRecord,
    user: bool,
}

impl Resolved {
    fn name(&self) -> &str {
        &self.record.name
    }

    fn base_provenance(&self) -> Provenance {
        if self.user {
            Provenance::User
        } else {
            Provenance::Reported
        }
    }

    fn fpr_provenance(&self) -> Provenance {
        match self.record.fpr_provenance {
            FprProvenance::BayesEstimated => Provenance::BayesEstimated,
            FprProvenance::Reported => self.base_provenance(),
        }
    }

    /// Provenance of anything computed from the FPR.
    fn derived(&self) -> Provenance {
        derived_from(&self.record)
    }

    fn latency(&self) -> Option<(f64, Provenance, bool)> {
        let seconds = self.record.spec.latency?;
        let provenance = match self.record.latency_provenance {
            LatencyProvenance::LowerBound => Provenance::LowerBound,
            _ => self.base_provenance(),
        };
        Some((seconds, provenance, self.record.is_optimistic()))
    }

    fn echo(&self, out: &mut OutputRecord) {
        let base = self.base_provenance();
        let spec = &self.record.spec;
        out.input(Input::text("model", self.name(), base));
        out.input(Input::number(
            "detector_precision",
            spec.precision,
            Unit::Probability,
            base,
        ));
        out.input(Input::number("detector_recall", spec.recall, Unit::Probability, base));
        if let Some(fpr) = spec.fpr {
            out.input(Input::number(
                "detector_fpr",
                fpr,
                Unit::Probability,
                self.fpr_provenance(),
            ));
        }
        if let Some(pi) = spec.eval_prevalence {
            out.input(Input::number("eval_prevalence", pi, Unit::Probability, base));
        }
    }
}

fn derived_from(record: &ModelRecord) -> Provenance {
    match record.fpr_provenance {
        FprProvenance::BayesEstimated => Provenance::DerivedFromEstimate,
        FprProvenance::Reported => Provenance::Derived,
    }
}

fn resolve_model(ctx: &Context, args: &ModelArgs) -> Result<Resolved, CliError> {
    if let Some(name) = &args.model {
        if let Some(record) = ctx.catalog.lookup(name) {
            return Ok(Resolved {
                record: record.clone(),
                user: ctx.user_catalog,
            });
        }
        if Path::new(name).is_file() {
            let (catalog, _) = load_catalog(name)?;
            return match catalog.models.as_slice() {
                [record] => Ok(Resolved {
                    record: record.clone(),
                    user: true,
                }),
                models => Err(CliError::Invalid(format!(
                    "{name} holds {} models; pass it as --catalog and pick one with --model",
                    models.len()
                ))),
            };
        }
        let known: Vec<&str> = ctx.catalog.models.iter().map(|m| m.name.as_str()).collect();
        return Err(CliError::UnknownModel {
            name: name.clone(),
            known: known.join(", "),
        });
    }
    match (args.precision, args.recall, args.eval_prevalence) {
        (Some(precision), Some(recall), Some(prevalence)) => {
            let entry = ModelEntry {
                name: "inline".into(),
                source: "command line".into(),
                precision,
                recall,
                fpr: args.fpr,
                fpr_kind: args.fpr.map(|_| FprProvenance::Reported),
                latency_seconds: args.latency,
                latency_kind: None,
                prevalence,
            };
            Ok(Resolved {
                record: entry.into_record()?,
                user: true,
            })
        }
        _ => Err(CliError::Invalid(
            "name a model with --model, or give --precision, --recall and --eval-prevalence".into(),
        )),
    }
}

fn attach_warnings(ctx: &Context, out: &mut OutputRecord, model: Option<&str>) {
    for warning in &ctx.warnings {
        if model.is_none_or(|m| m == warning.model) {
            out.warn(format!("{}: {}", warning.model, warning.message));
        }
    }
}

fn benchmark(ctx: &Context) -> Result<Benchmark, CliError> {
    ctx.catalog
        .benchmark
        .ok_or_else(|| CliError::Invalid("no benchmark available".into()))
}

/// `--pi` if given, else the benchmark prevalence.
fn prevalence(ctx: &Context, pi: Option<f64>, out: &mut OutputRecord) -> Result<f64, CliError> {
    let (value, provenance) = match pi {
        Some(pi) => (pi, Provenance::User),
        None => (benchmark(ctx)?.prevalence, Provenance::Builtin),
    };
    if !(value > 0.0 && value < 1.0) {
        return Err(ModelError::range("prevalence", "(0, 1)").into());
    }
    out.input(Input::number("pi", value, Unit::Probability, provenance));
    Ok(value)
}

fn mode_name(mode: PrecisionMode) -> &'static str {
    match mode {
        PrecisionMode::AsPublished => "as-published",
        PrecisionMode::PrevalenceConsistent => "prevalence-consistent",
    }
}

fn screener_precision(screener: &ScreenerMetrics<f64>, mode: PrecisionMode, pi: f64) -> Result<f64, ModelError> {
    match mode {
        PrecisionMode::AsPublished => Ok(screener.precision),
        PrecisionMode::PrevalenceConsistent => screener.precision_at(pi),
    }
}

pub(crate) fn invert(ctx: &Context, args: &InvertArgs) -> Result<OutputRecord, CliError> {
    let mut out = OutputRecord::new("invert");
    let model = resolve_model(ctx, &args.model)?;
    model.echo(&mut out);
    let pi = prevalence(ctx, args.pi, &mut out)?;
    let screener = model.record.screener()?;
    let name = model.name();
    let derived = model.derived();

    out.push(
        Row::new(
            name,
            "screener_precision",
            screener.precision,
            Unit::Probability,
            derived,
        )
        .note("as published"),
    );
    let recall_provenance = match model.record.fpr_provenance {
        FprProvenance::BayesEstimated => Provenance::DerivedFromEstimate,
        FprProvenance::Reported => Provenance::Derived,
    };
    out.push(Row::new(
        name,
        "screener_recall",
        screener.recall,
        Unit::Probability,
        recall_provenance,
    ));
    out.push(Row::new(
        name,
        "screener_fpr",
        screener.fpr,
        Unit::Probability,
        Provenance::Derived,
    ));
    out.push(
        Row::new(
            name,
            "screener_precision_at_pi",
            screener.precision_at(pi)?,
            Unit::Probability,
            derived,
        )
        .note("prevalence-consistent"),
    );
    attach_warnings(ctx, &mut out, Some(name));
    Ok(out)
}

pub(crate) fn bounds(ctx: &Context, args: &BoundsArgs) -> Result<OutputRecord, CliError> {
    let mut out = OutputRecord::new("bounds");
    let model = resolve_model(ctx, &args.model)?;
    model.echo(&mut out);
    let pi = prevalence(ctx, args.pi, &mut out)?;
    let mode = PrecisionMode::from(args.precision_mode);
    out.input(Input::text("precision_mode", mode_name(mode), Provenance::User));
    let name = model.name().to_string();
    let derived = model.derived();

    let tau_m = match args.tau_m {
        Some(t) => Some((t, Provenance::User, false)),
        None => model.latency(),
    };
    if tau_m.is_none() && args.tau_v.is_none() {
        return Err(CliError::Invalid(format!(
            "latency unknown for {name}; pass --tau-m or --tau-v"
        )));
    }
    if let Some((t, provenance, _)) = tau_m {
        out.input(Input::number("tau_m", t, Unit::Seconds, provenance));
    }
    if let Some(t) = args.tau_v {
        out.input(Input::number("tau_v", t, Unit::Seconds, Provenance::User));
    }

    let screener = model.record.screener()?;
    let (r_m, p_m) = (screener.recall, screener_precision(&screener, mode, pi)?);
    if p_m <= pi {
        return Err(CliError::Invalid(format!(
            "no precision headroom: screener precision {p_m:.4} does not exceed prevalence {pi}; \
             {name} is not convenient at any latency"
        )));
    }

    let min_extra = bounds::min_extra_ratio(r_m)?;
    let delta = args.delta_ratio.unwrap_or(min_extra);
    out.input(Input::number(
        "delta_ratio",
        delta,
        Unit::Ratio,
        if args.delta_ratio.is_some() {
            Provenance::User
        } else {
            derived
        },
    ));
    out.push(Row::new(&name, "min_extra_ratio", min_extra, Unit::Ratio, derived));

    if let Some((t, _, optimistic)) = tau_m {
        if let Headroom::Available(floor) = bounds::min_validator_time(t, r_m, p_m, pi)? {
            out.push(Row::new(&name, "min_validator_time", floor, Unit::Seconds, derived).optimistic(optimistic));
        }
    }
    if let Some(tau_v) = args.tau_v {
        if let Headroom::Available(bound) = bounds::max_model_time(tau_v, r_m, p_m, pi, Some(delta))? {
            out.push(Row::new(
                &name,
                "max_model_time_relaxed",
                bound.relaxed,
                Unit::Seconds,
                derived,
            ));
            if let Some(tight) = bound.tight {
                out.push(
                    Row::new(&name, "max_model_time_tight", tight, Unit::Seconds, derived)
                        .note(format!("at delta_ratio {delta}")),
                );
            }
        }
    }

    if let (Some((t, _, optimistic)), Some(tau_v)) = (tau_m, args.tau_v) {
        let config = PipelineConfig {
            prevalence: pi,
            n: args.n,
            validator: ClassifierSpec::new(1.0, args.validator_recall)?.with_latency(tau_v)?,
            screener: ClassifierSpec::new(p_m, r_m)?.with_latency(t)?,
        };
        let report = bounds::evaluate(&config, delta)?;
        for (quantity, value, unit) in [
            ("baseline_tp", report.baseline_tp, Unit::Count),
            ("augmented_tp", report.augmented_tp, Unit::Count),
            ("baseline_time", report.baseline_time, Unit::Seconds),
            ("augmented_time", report.augmented_time, Unit::Seconds),
        ] {
            out.push(Row::new(&name, quantity, value, unit, derived).optimistic(optimistic));
        }
        out.push(Row::text(&name, "verdict", report.verdict.label(), derived).optimistic(optimistic));
    }
    attach_warnings(ctx, &mut out, Some(&name));
    Ok(out)
}

pub(crate) fn limits(ctx: &Context, args: &LimitsArgs) -> Result<OutputRecord, CliError> {
    let mut out = OutputRecord::new("limits");
    out.layout = Layout::Grid;
    let (bench, provenance) = if args.benchmark == "builtin" {
        (
            benchmark(ctx)?,
            if ctx.user_catalog {
                Provenance::User
            } else {
                Provenance::Builtin
            },
        )
    } else {
        let (catalog, _) = load_catalog(&args.benchmark)?;
        let bench = catalog
            .benchmark
            .ok_or_else(|| CliError::Invalid(format!("{} has no benchmark section", args.benchmark)))?;
        (bench, Provenance::User)
    };
    out.input(Input::text("benchmark", &args.benchmark, provenance));
    for (column, seconds) in bench.times.columns() {
        out.input(Input::number(
            &format!("tau_v_{column}"),
            seconds,
            Unit::Seconds,
            provenance,
        ));
    }
    let pi = match args.pi {
        Some(_) => prevalence(ctx, args.pi, &mut out)?,
        None => {
            out.input(Input::number("pi", bench.prevalence, Unit::Probability, provenance));
            bench.prevalence
        }
    };
    let mode = PrecisionMode::from(args.precision_mode);
    out.input(Input::text("precision_mode", mode_name(mode), Provenance::User));

    for record in &ctx.catalog.models {
        let screener = record
            .screener()
            .map_err(|e| CliError::Invalid(format!("{}: {e}", record.name)))?;
        let p_m = screener_precision(&screener, mode, pi)?;
        let derived = derived_from(record);
        for (column, tau_v) in bench.times.columns() {
            let row = match bounds::max_model_time(tau_v, screener.recall, p_m, pi, None)? {
                Headroom::Available(bound) => Row::new(&record.name, column, bound.relaxed, Unit::Seconds, derived),
                Headroom::Exhausted => Row::text(&record.name, column, "no headroom", derived),
            };
            out.push(row);
        }
    }
    attach_warnings(ctx, &mut out, None);
    Ok(out)
}

pub(crate) fn simulate(ctx: &Context, args: &SimulateArgs) -> Result<OutputRecord, CliError> {
    let mut out = OutputRecord::new("simulate");
    let (name, rates, published, tau_m_default, derived) = match (args.screener_tpr, args.screener_fpr) {
        (Some(tpr), Some(fpr)) => {
            out.input(Input::text("model", "rates", Provenance::User));
            (
                "screener".to_string(),
                RateTriple::new(tpr, fpr)?,
                None,
                None,
                Provenance::Derived,
            )
        }
        _ => {
            let model = resolve_model(ctx, &args.model)?;
            model.echo(&mut out);
            let screener = model.record.screener()?;
            (
                model.name().to_string(),
                screener.rates(),
                Some(screener.precision),
                model.latency(),
                model.derived(),
            )
        }
    };
    out.input(Input::number("screener_tpr", rates.tpr, Unit::Probability, derived));
    out.input(Input::number("screener_fpr", rates.fpr, Unit::Probability, derived));

    let pi = prevalence(ctx, args.pi, &mut out)?;
    let (tau_m, tau_m_provenance, optimistic) = match (args.tau_m, tau_m_default) {
        (Some(t), _) => (t, Provenance::User, false),
        (None, Some(latency)) => latency,
        (None, None) => {
            return Err(CliError::Invalid(format!("latency unknown for {name}; pass --tau-m")));
        }
    };
    let mode = match (args.precision_mode.map(PrecisionMode::from), published) {
        (Some(PrecisionMode::AsPublished), None) => {
            return Err(CliError::Invalid(
                "as-published precision needs a detector; raw rates have none".into(),
            ));
        }
        (Some(mode), _) => mode,
        (None, Some(_)) => PrecisionMode::AsPublished,
        (None, None) => PrecisionMode::PrevalenceConsistent,
    };

    let mut cfg = SimConfig::new(pi, rates, args.validator_recall, tau_m, args.tau_v);
    cfg.n = args.n;
    cfg.trials = args.trials;
    cfg.seed = args.seed;
    cfg.validator.fpr = args.validator_fpr;
    cfg.published_precision = published;
    cfg.precision_mode = mode;
    cfg = match (args.extra, args.delta_ratio) {
        (Some(extra), _) => SimConfig { extra, ..cfg },
        (None, Some(ratio)) if ratio.is_finite() && ratio >= 0.0 => cfg.with_extra_ratio(ratio),
        (None, Some(_)) => return Err(ModelError::range("delta ratio", ">= 0").into()),
        (None, None) => cfg,
    };

    out.input(Input::number("n", cfg.n as f64, Unit::Count, Provenance::User));
    out.input(Input::number("extra", cfg.extra as f64, Unit::Count, Provenance::User));
    out.input(Input::number("tau_m", tau_m, Unit::Seconds, tau_m_provenance));
    out.input(Input::number("tau_v", args.tau_v, Unit::Seconds, Provenance::User));
    out.input(Input::number(
        "validator_recall",
        args.validator_recall,
        Unit::Probability,
        Provenance::User,
    ));
    out.input(Input::number(
        "validator_fpr",
        args.validator_fpr,
        Unit::Probability,
        Provenance::User,
    ));
    out.input(Input::number(
        "trials",
        f64::from(cfg.trials),
        Unit::Count,
        Provenance::User,
    ));
    // Text, so 64-bit seeds survive JSON readers that parse numbers as doubles.
    out.input(Input::text("seed", cfg.seed.to_string(), Provenance::User));
    out.input(Input::text("rng", simulate::RNG_ID, Provenance::Builtin));
    out.input(Input::text("precision_mode", mode_name(mode), Provenance::User));

    let runner = args.workers.map_or_else(Runner::default, Runner::with_workers);
    let outcome = runner.compare(&cfg)?;
    let expected = outcome.expected;

    let simulated = |quantity: &str, estimate: simulate::Estimate, unit: Unit, reference: f64, agrees: bool| {
        let mut row = Row::new(&name, quantity, estimate.mean, unit, Provenance::Simulated);
        row.std_error = Some(estimate.std_error);
        let mut row = row.check(reference, Tolerance::standard_errors(simulate::SE_MULTIPLIER));
        row.ok = Some(agrees);
        row.optimistic(optimistic && unit == Unit::Seconds)
    };
    let flags = outcome.agreement;
    let false_accepts = |estimate: simulate::Estimate, reference: f64| (reference, estimate.agrees_with(reference));
    let (base_fa, base_fa_ok) = false_accepts(
        outcome.baseline_false_accepts,
        (1.0 - pi) * args.validator_fpr * cfg.n as f64,
    );
    let (aug_fa, aug_fa_ok) = false_accepts(
        outcome.augmented_false_accepts,
        (1.0 - pi) * rates.fpr * args.validator_fpr * cfg.total() as f64,
    );
    let rows = [
        (
            "baseline_tp",
            outcome.baseline_tp,
            Unit::Count,
            expected.baseline_tp,
            flags.baseline_tp,
        ),
        (
            "augmented_tp",
            outcome.augmented_tp,
            Unit::Count,
            expected.augmented_tp,
            flags.augmented_tp,
        ),
        (
            "survivors",
            outcome.survivors,
            Unit::Count,
            expected.survivors,
            flags.survivors,
        ),
        (
            "baseline_time",
            outcome.baseline_time,
            Unit::Seconds,
            expected.baseline_time,
            flags.baseline_time,
        ),
        (
            "augmented_time",
            outcome.augmented_time,
            Unit::Seconds,
            expected.augmented_time,
            flags.augmented_time,
        ),
        (
            "baseline_false_accepts",
            outcome.baseline_false_accepts,
            Unit::Count,
            base_fa,
            base_fa_ok,
        ),
        (
            "augmented_false_accepts",
            outcome.augmented_false_accepts,
            Unit::Count,
            aug_fa,
            aug_fa_ok,
        ),
    ];
    for (quantity, estimate, unit, reference, agrees) in rows {
        out.push(simulated(quantity, estimate, unit, reference, agrees));
        if !agrees {
            out.warn(format!(
                "{quantity} lies more than {} standard errors from its closed form",
                simulate::SE_MULTIPLIER
            ));
        }
    }
    if expected.screener_precision.is_finite() {
        out.push(
            Row::new(
                &name,
                "screener_precision",
                expected.screener_precision,
                Unit::Probability,
                derived,
            )
            .note(mode_name(mode)),
        );
    }
    out.push(Row::text(&name, "analytic_verdict", outcome.analytic_verdict.label(), derived).optimistic(optimistic));
    out.push(Row::text(
        &name,
        "empirical_verdict",
        outcome.empirical_verdict.label(),
        Provenance::Simulated,
    ));
    let mut agreement = Row::text(
        &name,
        "verdict_agreement",
        match outcome.verdict_agrees {
            Some(true) => "agree",
            Some(false) => "disagree",
            None => "within noise",
        },
        Provenance::Simulated,
    );
    agreement.ok = outcome.verdict_agrees;
    out.push(agreement);
    if outcome.verdict_agrees == Some(false) {
        out.status = Status::Regression;
    }
    if published.is_some() && mode == PrecisionMode::AsPublished {
        out.warn(
            "as-published screener precision does not hold at pi; survivor and time expectations \
             use it anyway (see --precision-mode prevalence-consistent)",
        );
    }
    Ok(out)
}
