use std::path::Path;
use std::time::{Duration, Instant};

use obstruct::cpoly::VarStyle;
use obstruct::groebner::{
    buchberger, contains_one, verify_certificate, Budget, BudgetKind, GbOptions, GbStats, GroebnerBasis, GroebnerError,
    MembershipOutcome,
};
use obstruct::identity::{mini_system, mini_vars, verify_appendix, IdentityError, MiniCase, ReferenceSystem};
use obstruct::{FieldSpec, MonomialOrder, ObstructionSystem, OrderKind, ParamPoly, VarList, Verdict};
use serde_json::{json, Value};
use thiserror::Error;

use crate::input::{infer_vars, parse_system, InputError};
use crate::report::{Entry, EntryStatus, RunReport, StatsReport, Status};
use crate::script::{self, field_flag, ExportFormat};
use crate::{
    BasisArgs, BenchArgs, CheckArgs, Command, Expect, GenerateArgs, MiniArgs, MiniCaseArg, VerifyArgs,
    DEFAULT_BUDGET_SECS, DEFAULT_PRIMES,
};

/// Failures that prevent a command from producing a report (exit code 2).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("reference data not found: {0}")]
    MissingData(String),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

/// What a command hands back to the shell.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    /// Human-readable summary.
    pub text: String,
    /// An artifact destined for standard output (then the summary goes to stderr).
    pub stdout: Option<String>,
}

impl Outcome {
    fn new(report: RunReport, text: String) -> Self {
        Outcome { report, text, stdout: None }
    }
}

pub fn run_command(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Generate(a) => generate(a),
        Command::VerifyAppendix(a) => verify(a),
        Command::Check(a) => check(a),
        Command::BenchOrders(a) => bench_orders(a),
        Command::Mini(a) => mini(a),
        Command::Basis(a) => basis(a),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })
}

fn budget_duration(secs: Option<f64>) -> Result<Duration, CliError> {
    let s = secs.unwrap_or(DEFAULT_BUDGET_SECS);
    Duration::try_from_secs_f64(s).map_err(|_| CliError::Usage(format!("invalid budget `{s}` (expected seconds ≥ 0)")))
}

fn seconds(d: Duration) -> String {
    format!("{:.3} s", d.as_secs_f64())
}

pub fn generate(a: &GenerateArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let system = ObstructionSystem::generate(a.field)?;
    let export = script::export(&system, &ReferenceSystem::bundled(), a.format, a.order)?;

    let format = match a.format {
        ExportFormat::Internal => "internal",
        ExportFormat::Script => "script",
    };
    let mut report = RunReport::new("generate");
    report
        .param("format", format)
        .param("field", field_flag(a.field))
        .param("order", a.order.script_name())
        .param("out", a.out.as_ref().map(|p| p.display().to_string()));
    report.detail("polynomials", system.len()).detail("reordered", export.reordered.clone());

    let destination = match &a.out {
        Some(path) => {
            std::fs::write(path, &export.text)
                .map_err(|source| CliError::Write { path: path.display().to_string(), source })?;
            report.artifacts.push(path.display().to_string());
            path.display().to_string()
        }
        None => "standard output".to_string(),
    };
    report.timings.total_seconds = started.elapsed().as_secs_f64();

    let mut text = format!(
        "wrote {} polynomials ({format}, {}, {}) to {destination}",
        system.len(),
        a.field,
        a.order.script_name()
    );
    if !export.reordered.is_empty() {
        text.push_str(&format!("\nnote: {} polynomial(s) differ from the reference listing", export.reordered.len()));
    }
    let mut outcome = Outcome::new(report, text);
    if a.out.is_none() {
        outcome.stdout = Some(export.text);
    }
    Ok(outcome)
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let mut report = RunReport::new("verify-appendix");
    report.param("data", a.data.as_ref().map(|p| p.display().to_string()));

    let reference = match &a.data {
        None => Ok(ReferenceSystem::bundled()),
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                    return Err(CliError::MissingData(path.display().to_string()))
                }
                Err(source) => return Err(CliError::Read { path: path.display().to_string(), source }),
            };
            ReferenceSystem::parse(&text)
        }
    };
    let generated = ObstructionSystem::generate(FieldSpec::Rationals)?;
    let compared = reference.and_then(|r| {
        let polys = r.polys(FieldSpec::Rationals)?;
        verify_appendix(generated.polys(), &polys).map(|rep| (rep, polys))
    });

    let (text, entry_verdict) = match compared {
        Ok((rep, reference)) => {
            let mut text = format!("appendix: {}/{} polynomials match", rep.matched, rep.total);
            let mut diffs = Vec::new();
            for m in &rep.mismatches {
                let (g, r) = (&generated.polys()[m.index - 1], &reference[m.index - 1]);
                let difference = g.sub(r).map(|d| d.render(VarStyle::Internal)).unwrap_or_default();
                text.push_str(&format!(
                    "\nf{}:\n  generated:  {}\n  reference:  {}\n  difference: {difference}",
                    m.index, m.generated, m.reference
                ));
                diffs.push(json!({
                    "index": m.index,
                    "generated": m.generated,
                    "reference": m.reference,
                    "difference": difference,
                }));
            }
            report.detail("total", rep.total).detail("matched", rep.matched).detail("mismatches", diffs);
            report.set_status(if rep.all_match() { Status::Ok } else { Status::Mismatch });
            (text, if rep.all_match() { "match" } else { "mismatch" })
        }
        Err(e) => {
            report.detail("error", e.to_string());
            report.set_status(Status::Mismatch);
            (format!("appendix: reference data rejected: {e}"), "mismatch")
        }
    };
    let elapsed = started.elapsed();
    report.verdicts.push(Entry::completed("appendix", entry_verdict, elapsed));
    report.timings.total_seconds = elapsed.as_secs_f64();
    Ok(Outcome::new(report, format!("{text}\nelapsed: {}", seconds(elapsed))))
}

/// A Gröbner run folded into a report entry.
struct RunResult {
    entry: Entry,
    outcome: Option<MembershipOutcome>,
    budget_kind: Option<BudgetKind>,
}

fn entry_for(label: String, field: FieldSpec, order: OrderKind, stats: &GbStats) -> Entry {
    Entry {
        label,
        status: EntryStatus::Completed,
        verdict: None,
        field: Some(field_flag(field)),
        order: Some(order.script_name().to_string()),
        basis_size: None,
        stats: Some(StatsReport::from(stats)),
        elapsed_seconds: stats.elapsed.as_secs_f64(),
    }
}

fn membership(label: String, polys: Vec<ParamPoly>, order: OrderKind, opts: &GbOptions) -> Result<RunResult, CliError> {
    let field = polys.first().map(|p| p.field()).ok_or(GroebnerError::EmptyIdeal)?;
    let nvars = polys[0].nvars();
    let ideal = obstruct::Ideal::new(polys, MonomialOrder::new(order, nvars))?;
    match contains_one(&ideal, opts) {
        Ok(out) => {
            let mut entry = entry_for(label, field, order, &out.basis.stats);
            entry.verdict = Some(out.verdict.to_string());
            entry.basis_size = Some(out.basis.len());
            Ok(RunResult { entry, outcome: Some(out), budget_kind: None })
        }
        Err(GroebnerError::BudgetExceeded { kind, stats }) => {
            let mut entry = entry_for(label, field, order, &stats);
            entry.status = EntryStatus::BudgetExceeded;
            Ok(RunResult { entry, outcome: None, budget_kind: Some(kind) })
        }
        Err(e) => Err(e.into()),
    }
}

pub fn check(a: &CheckArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let wall = budget_duration(a.budget)?;
    let fields: Vec<FieldSpec> =
        if a.sweep { DEFAULT_PRIMES.iter().map(|&p| FieldSpec::Prime(p)).collect() } else { vec![a.field] };
    let whole = a.subsystem.as_ref().is_none_or(|r| *r == (1..=obstruct::identity::SYSTEM_SIZE));
    let expect = a.expect.unwrap_or(if whole { Expect::Unit } else { Expect::Any });
    let opts = GbOptions {
        strategy: a.strategy,
        cofactors: a.cofactors,
        budget: Budget { wall: Some(wall), max_pairs: None, max_sugar: a.max_degree },
    };

    let mut report = RunReport::new("check");
    report
        .param("fields", fields.iter().map(|f| field_flag(*f)).collect::<Vec<_>>())
        .param("order", a.order.script_name())
        .param("subsystem", a.subsystem.as_ref().map(|r| format!("{}..{}", r.start(), r.end())))
        .param("cofactors", a.cofactors)
        .param("budget_seconds", wall.as_secs_f64())
        .param("max_degree", a.max_degree)
        .param("strategy", a.strategy.to_string())
        .param(
            "expect",
            match expect {
                Expect::Unit => "unit",
                Expect::Proper => "proper",
                Expect::Any => "any",
            },
        );

    let mut status = Status::Ok;
    let mut lines = Vec::new();
    let mut certificates = Vec::new();
    for &field in &fields {
        let system = ObstructionSystem::generate(field)?;
        let (label, polys) = match &a.subsystem {
            Some(r) => (format!("f{}..f{}", r.start(), r.end()), system.subsystem(r.clone())),
            None => ("f1..f128".to_string(), system.polys().to_vec()),
        };
        let run = membership(label.clone(), polys.clone(), a.order, &opts)?;
        let mut line = format!("{label} over {field} ({}): ", a.order.script_name());
        match (&run.outcome, run.budget_kind) {
            (Some(out), _) => {
                let matches = match expect {
                    Expect::Unit => out.verdict == Verdict::UnitIdeal,
                    Expect::Proper => out.verdict == Verdict::ProperIdeal,
                    Expect::Any => true,
                };
                if !matches {
                    status = status.worst(Status::Mismatch);
                }
                line.push_str(&format!(
                    "{} — basis size {}, {} pairs processed, {} + {} skipped (product, chain), {}",
                    out.verdict,
                    out.basis.len(),
                    out.basis.stats.pairs_processed,
                    out.basis.stats.skipped_product,
                    out.basis.stats.skipped_chain,
                    seconds(out.basis.stats.elapsed)
                ));
                if let Some(cert) = &out.certificate {
                    let ok = verify_certificate(cert, &polys)?;
                    if !ok {
                        status = status.worst(Status::Mismatch);
                    }
                    let degree = cert.cofactors.iter().filter_map(ParamPoly::total_degree).max();
                    line.push_str(&format!(
                        "\n  certificate: {} (max cofactor degree {})",
                        if ok { "verified" } else { "INVALID" },
                        degree.map_or("-".to_string(), |d| d.to_string())
                    ));
                    certificates.push(json!({
                        "field": field_flag(field),
                        "verified": ok,
                        "max_cofactor_degree": degree,
                        "nonzero_cofactors": cert.cofactors.iter().filter(|c| !c.is_zero()).count(),
                    }));
                }
            }
            (None, kind) => {
                status = status.worst(Status::BudgetExceeded);
                let kind = kind.map_or("unknown".to_string(), |k| k.to_string());
                line.push_str(&format!(
                    "budget exceeded ({kind}) after {} pairs, {}",
                    run.entry.stats.as_ref().map_or(0, |s| s.pairs_processed),
                    seconds(Duration::from_secs_f64(run.entry.elapsed_seconds))
                ));
            }
        }
        lines.push(line);
        report.verdicts.push(run.entry);
    }
    if a.cofactors {
        report.detail("certificates", certificates);
    }
    report.set_status(status);
    report.timings.total_seconds = started.elapsed().as_secs_f64();
    Ok(Outcome::new(report, lines.join("\n")))
}

pub fn bench_orders(a: &BenchArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let wall = budget_duration(Some(a.budget_per_order))?;
    let system = ObstructionSystem::generate(a.field)?;
    let opts = GbOptions { strategy: a.strategy, budget: Budget::wall(wall), ..GbOptions::default() };

    let mut report = RunReport::new("bench-orders");
    report
        .param("field", field_flag(a.field))
        .param("budget_per_order_seconds", wall.as_secs_f64())
        .param("strategy", a.strategy.to_string());

    let mut rows =
        vec![format!("{:<6} {:<10} {:<12} {:>10} {:>8}", "order", "completed", "verdict", "elapsed", "pairs")];
    let mut fastest: Option<(f64, &str)> = None;
    for order in [OrderKind::DegRevLex, OrderKind::DegLex, OrderKind::Lex] {
        let run = membership(order.script_name().to_string(), system.polys().to_vec(), order, &opts)?;
        let e = &run.entry;
        let done = e.status == EntryStatus::Completed;
        if done && fastest.is_none_or(|(t, _)| e.elapsed_seconds < t) {
            fastest = Some((e.elapsed_seconds, order.script_name()));
        }
        rows.push(format!(
            "{:<6} {:<10} {:<12} {:>8.3} s {:>8}",
            order.script_name(),
            if done { "yes" } else { "no" },
            e.verdict.as_deref().unwrap_or("-"),
            e.elapsed_seconds,
            e.stats.as_ref().map_or(0, |s| s.pairs_processed)
        ));
        report.verdicts.push(run.entry);
    }
    report.detail("fastest", fastest.map(|(_, o)| o));
    report.timings.total_seconds = started.elapsed().as_secs_f64();
    let mut text = rows.join("\n");
    text.push_str(&format!("\nfastest completed order: {}", fastest.map_or("none", |(_, o)| o)));
    Ok(Outcome::new(report, text))
}

/// The unique common root when every basis element has the form `v − c`.
pub fn linear_root(basis: &GroebnerBasis, vars: &VarList) -> Option<Vec<(String, String)>> {
    let mut values: Vec<Option<String>> = vec![None; vars.len()];
    for p in &basis.elements {
        if p.total_degree() != Some(1) || p.num_terms() > 2 {
            return None;
        }
        let (lead, lc) = p.leading_term(&basis.order)?;
        let var = (0..vars.len()).find(|&i| lead.get(i) == 1)?;
        if !lc.is_one() || values[var].is_some() {
            return None;
        }
        values[var] = Some(p.field().neg(&p.constant_term()).to_string());
    }
    values.into_iter().enumerate().map(|(i, v)| Some((vars.name(i).to_string(), v?))).collect()
}

pub fn mini(a: &MiniArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let case = match a.case {
        MiniCaseArg::Commutative => MiniCase::Commutative,
    };
    let vars = mini_vars();
    let inputs = mini_system(case);
    let order = MonomialOrder::new(OrderKind::Lex, vars.len());
    let gb = buchberger(&obstruct::Ideal::new(inputs.clone(), order.clone())?, &GbOptions::default())?;

    let render = |p: &ParamPoly| p.render_in(&order, VarStyle::Internal);
    let input_text: Vec<String> = inputs.iter().map(render).collect();
    let basis_text: Vec<String> = gb.elements.iter().map(render).collect();
    let root = linear_root(&gb, &vars);
    let verdict = if gb.is_unit() { Verdict::UnitIdeal } else { Verdict::ProperIdeal };

    let mut report = RunReport::new("mini");
    report.param("case", "commutative").param("field", "q").param("order", "lp");
    report
        .detail("variables", vars.names().to_vec())
        .detail("symbols", json!({"lam": "λ", "lamp": "λ′"}))
        .detail("inputs", input_text.clone())
        .detail("basis", basis_text.clone())
        .detail(
            "root",
            root.as_ref()
                .map(|r| r.iter().map(|(k, v)| (k.clone(), Value::from(v.clone()))).collect::<serde_json::Map<_, _>>()),
        );
    let mut entry = entry_for("commutative".into(), FieldSpec::Rationals, OrderKind::Lex, &gb.stats);
    entry.verdict = Some(verdict.to_string());
    entry.basis_size = Some(gb.len());
    report.verdicts.push(entry);
    report.timings.total_seconds = started.elapsed().as_secs_f64();

    let mut text = format!("inputs: {}\nbasis (lp, Q):\n", input_text.join(", "));
    for b in &basis_text {
        text.push_str(&format!("  {b}\n"));
    }
    match &root {
        Some(r) => text.push_str(&format!(
            "root: {}\n",
            r.iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join(", ")
        )),
        None => text.push_str("root: not a single point\n"),
    }
    text.push_str(&format!("verdict: {verdict}"));
    Ok(Outcome::new(report, text))
}

pub fn basis(a: &BasisArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let wall = budget_duration(a.budget)?;
    let text = read(&a.input)?;
    let vars = match &a.vars {
        Some(names) => {
            VarList::new(names.iter().map(|n| n.trim().to_string())).map_err(|e| CliError::Usage(e.to_string()))?
        }
        None => infer_vars(&text)?,
    };
    let polys = parse_system(&text, a.field, vars.clone())?;
    let order = MonomialOrder::new(a.order, vars.len());
    let opts = GbOptions { strategy: a.strategy, budget: Budget::wall(wall), ..GbOptions::default() };

    let mut report = RunReport::new("basis");
    report
        .param("input", a.input.display().to_string())
        .param("field", field_flag(a.field))
        .param("order", a.order.script_name())
        .param("budget_seconds", wall.as_secs_f64())
        .param("strategy", a.strategy.to_string());
    report.detail("variables", vars.names().to_vec()).detail("generators", polys.len());

    let out = match buchberger(&obstruct::Ideal::new(polys, order.clone())?, &opts) {
        Ok(gb) => {
            let verdict = if gb.is_unit() { Verdict::UnitIdeal } else { Verdict::ProperIdeal };
            let lines: Vec<String> = gb.elements.iter().map(|p| p.render_in(&order, VarStyle::Internal)).collect();
            let mut entry = entry_for("input".into(), a.field, a.order, &gb.stats);
            entry.verdict = Some(verdict.to_string());
            entry.basis_size = Some(gb.len());
            report.verdicts.push(entry);
            report.detail("basis", lines.clone());
            let mut text = lines.join("\n");
            text.push_str(&format!(
                "\n# {} element(s), {verdict}, {} pairs processed, {}",
                gb.len(),
                gb.stats.pairs_processed,
                seconds(gb.stats.elapsed)
            ));
            text
        }
        Err(GroebnerError::BudgetExceeded { kind, stats }) => {
            let mut entry = entry_for("input".into(), a.field, a.order, &stats);
            entry.status = EntryStatus::BudgetExceeded;
            report.verdicts.push(entry);
            report.set_status(Status::BudgetExceeded);
            format!("budget exceeded ({kind}) after {} pairs", stats.pairs_processed)
        }
        Err(e) => return Err(e.into()),
    };
    report.timings.total_seconds = started.elapsed().as_secs_f64();
    Ok(Outcome::new(report, out))
}
