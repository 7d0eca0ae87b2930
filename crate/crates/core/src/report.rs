//! Rendering of [`DecisionReport`]s.
//!
//! JSON output is pretty-printed with fields in declaration order, so equal
//! reports render to identical bytes.

use std::fmt::Write as _;

use crate::pipeline::{DecisionReport, Diagnostic};

pub fn to_json(report: &DecisionReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

fn vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", parts.join(", "))
}

fn labelled(out: &mut String, labels: &[String], rows: &[Vec<f64>], head: &[String]) {
    let width = labels.iter().chain(head).map(|l| l.len()).max().unwrap_or(0).max(6);
    write!(out, "  {:width$}", "").unwrap();
    for h in head {
        write!(out, "  {h:>width$}").unwrap();
    }
    out.push('\n');
    for (l, row) in labels.iter().zip(rows) {
        write!(out, "  {l:width$}").unwrap();
        for v in row {
            write!(out, "  {v:>width$.4}").unwrap();
        }
        out.push('\n');
    }
}

fn diagnostic(d: &Diagnostic) -> String {
    match d {
        Diagnostic::Override { stage } => format!("override: {stage} taken from the scenario"),
        Diagnostic::RenormalizedRow { row, sum } => {
            format!("renormalized: transition row {row} summed to {sum:.4}")
        }
        Diagnostic::PinnedTransition { from, to } => format!("pinned: transition {from} -> {to} fixed at 0"),
        Diagnostic::UnnormalizedPeriod { period, sum } => {
            format!("period {period}: weights sum to {sum:.4}, not 1")
        }
        Diagnostic::EntropyFloor { attribute, expert } => {
            format!("entropy floor: expert {expert} under {attribute}")
        }
        Diagnostic::PaperLiteral { attribute, constant } => {
            format!("paper-literal: inner deviation constant {constant} under {attribute}")
        }
        Diagnostic::NoIndirectPath { attribute } => {
            format!("no indirect path: fewer than 3 alternatives under {attribute}")
        }
        Diagnostic::Solver { stage, status } => format!("solver: {stage} finished as {status:?}"),
        Diagnostic::Tie { alternatives, value } => {
            format!("tie: {} at {value:.4}, ranked by index", alternatives.join(", "))
        }
    }
}

/// Human-readable summary.
pub fn to_text(report: &DecisionReport) -> String {
    let mut out = String::new();
    let periods: Vec<String> = (1..=report.period_weights.periods())
        .map(|t| format!("t={t}"))
        .collect();
    if let Some(m) = &report.transition_matrix {
        out.push_str("Transition matrix\n");
        labelled(&mut out, &report.attributes, m.rows(), &report.attributes);
        out.push('\n');
    }
    writeln!(out, "Attribute weights by period ({} scheme)", report.scheme).unwrap();
    labelled(&mut out, &periods, report.period_weights.rows(), &report.attributes);

    for a in &report.attribute_reports {
        write!(out, "\n{}\n", a.attribute).unwrap();
        if let Some(w) = &a.expert_weights {
            writeln!(out, "  outer weights    {}", vector(&w.outer)).unwrap();
            writeln!(out, "  inner weights    {}", vector(&w.inner)).unwrap();
            writeln!(out, "  trust weights    {}", vector(&w.trust)).unwrap();
            writeln!(
                out,
                "  expert weights   {}  (alpha {}, beta {}, gamma {})",
                vector(&w.blended),
                w.alpha,
                w.beta,
                w.gamma
            )
            .unwrap();
        }
        if let Some(p) = &a.priority_vector {
            writeln!(out, "  priorities       {}", vector(p)).unwrap();
        }
    }

    if let Some(u) = &report.comparable_values {
        out.push_str("\nComparable values\n");
        for (name, v) in report.alternatives.iter().zip(u) {
            writeln!(out, "  {name}  {v:.4}").unwrap();
        }
    }
    if let Some(r) = &report.ranking {
        let names: Vec<&str> = r.iter().map(|x| x.alternative.as_str()).collect();
        writeln!(out, "\nRanking: {}", names.join(" > ")).unwrap();
    }
    for c in &report.plts_comparison {
        write!(
            out,
            "\nInterval vs discrete evidence ({})\n  interval  {}  min gap {:.4}, range {:.4}\n  discrete  {}  min gap {:.4}, range {:.4}\n",
            c.attribute,
            vector(&c.interval),
            c.interval_min_gap,
            c.interval_range,
            vector(&c.discrete),
            c.discrete_min_gap,
            c.discrete_range
        )
        .unwrap();
    }
    if !report.diagnostics.is_empty() {
        out.push_str("\nDiagnostics\n");
        for d in &report.diagnostics {
            writeln!(out, "  {}", diagnostic(d)).unwrap();
        }
    }
    out
}
