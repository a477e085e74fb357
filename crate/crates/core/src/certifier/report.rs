//! Text, JSON and markdown renderings of a [`Certificate`]. Every renderer
//! reads only the certificate itself, so a deserialized certificate renders
//! identically to the freshly computed one.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Certificate, ConditionResult, ConstantRow, ExactValue, Verdict};
use crate::exact::{render_decimal, TEXT_DIGITS};
use crate::published::PublishedClaim;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
    Markdown,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(format!("unknown format {other:?} (expected text, json or markdown)")),
        }
    }
}

pub fn render(c: &Certificate, format: Format) -> String {
    match format {
        Format::Text => render_text(c),
        Format::Json => {
            let mut s = c.to_json();
            s.push('\n');
            s
        }
        Format::Markdown => render_markdown(c),
    }
}

fn value_cell(c: &ConditionResult) -> String {
    c.exact.as_ref().map_or_else(|| "—".to_string(), |v| v.to_string())
}

fn decimal_cell(v: Option<&ExactValue>) -> String {
    v.map_or_else(|| "—".to_string(), |v| v.decimal_marked(TEXT_DIGITS))
}

fn claim_cells(p: Option<&PublishedClaim>) -> (String, String) {
    match p {
        Some(p) => (p.printed.clone(), if p.matches { "match".into() } else { "MISMATCH".into() }),
        None => ("—".into(), "—".into()),
    }
}

fn constant_decimal(row: &ConstantRow) -> String {
    match (&row.exact, &row.bracket) {
        (Some(v), _) => v.decimal_marked(TEXT_DIGITS),
        (None, Some(b)) => b.render(TEXT_DIGITS).value,
        (None, None) => row.decimal.clone(),
    }
}

fn verdict_line(c: &Certificate) -> String {
    match (&c.verdict, &c.first_failure) {
        (Verdict::Pass, _) => "PASS".into(),
        (Verdict::Fail, Some(id)) => format!("FAIL (first failing condition: {id})"),
        (Verdict::Fail, None) => "FAIL".into(),
    }
}

pub fn render_text(c: &Certificate) -> String {
    let p = &c.params;
    let mut s = String::new();
    let _ = writeln!(s, "{}", c.tool_version);
    let _ = writeln!(
        s,
        "n = {}  ε = {}  a = {}  α = {}  k = {}  β = {}  strictness = {:?}  theta rule = {}",
        p.n, p.eps, p.a, p.alpha, p.k, p.beta, p.strictness, p.theta_rule
    );
    let _ = writeln!(s);
    let _ = writeln!(s, "{:<4} {:<14} {:<22} {}", "id", "status", "decimal", "condition");
    for cond in &c.conditions {
        let _ = writeln!(
            s,
            "{:<4} {:<14} {:<22} {}",
            cond.id,
            cond.status.label(),
            decimal_cell(cond.exact.as_ref()),
            cond.title
        );
        if let Some(v) = &cond.exact {
            let _ = writeln!(s, "     exact: {v}");
        }
        if let Some(pc) = &cond.published {
            let (pr, m) = claim_cells(Some(pc));
            let _ = writeln!(s, "     printed: {pr} ({m})");
        }
        for n in &cond.notes {
            let _ = writeln!(s, "     {n}");
        }
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "{:<14} {:<22} {:<10} {:<9} {}", "constant", "decimal", "printed", "flag", "exact");
    for row in &c.constants {
        let (pr, m) = claim_cells(row.published.as_ref());
        let exact = row.exact.as_ref().map_or_else(
            || row.bracket.as_ref().map_or(String::new(), |b| format!("[{}, {}]", render_decimal(&b.lo, TEXT_DIGITS), render_decimal(&b.hi, TEXT_DIGITS))),
            |v| v.to_string(),
        );
        let _ = writeln!(s, "{:<14} {:<22} {:<10} {:<9} {}", row.symbol, constant_decimal(row), pr, m, exact);
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "verdict: {}", verdict_line(c));
    s
}

pub fn render_markdown(c: &Certificate) -> String {
    let p = &c.params;
    let mut s = String::new();
    let _ = writeln!(s, "# Certificate, n = {}", p.n);
    let _ = writeln!(s);
    let _ = writeln!(s, "Generated by {}.", c.tool_version);
    let _ = writeln!(s);
    let _ = writeln!(s, "| parameter | value |");
    let _ = writeln!(s, "|---|---|");
    for (k, v) in [
        ("n", p.n.to_string()),
        ("ε", p.eps.to_string()),
        ("a", p.a.to_string()),
        ("α", p.alpha.to_string()),
        ("k", p.k.to_string()),
        ("β", p.beta.to_string()),
        ("strictness", format!("{:?}", p.strictness)),
        ("theta rule", p.theta_rule.to_string()),
    ] {
        let _ = writeln!(s, "| {k} | {v} |");
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "## Conditions");
    let _ = writeln!(s);
    let _ = writeln!(s, "| id | condition | status | exact | decimal | printed | flag |");
    let _ = writeln!(s, "|---|---|---|---|---|---|---|");
    for cond in &c.conditions {
        let (pr, m) = claim_cells(cond.published.as_ref());
        let status = if cond.exact.is_none() && cond.checks.is_empty() {
            cond.notes.first().cloned().unwrap_or_else(|| cond.status.label().into())
        } else {
            cond.status.label().into()
        };
        let _ = writeln!(
            s,
            "| {} | {} | {} | `{}` | {} | {} | {} |",
            cond.id,
            cond.title,
            status,
            value_cell(cond),
            decimal_cell(cond.exact.as_ref()),
            pr,
            m
        );
    }
    let notes: Vec<_> = c
        .conditions
        .iter()
        .flat_map(|cond| cond.notes.iter().map(move |n| (cond.id.as_str(), n)))
        .collect();
    if !notes.is_empty() {
        let _ = writeln!(s);
        for (id, n) in notes {
            let _ = writeln!(s, "- {id}: {n}");
        }
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "## Printed values against exact values");
    let _ = writeln!(s);
    let _ = writeln!(s, "| constant | exact | decimal | printed | flag |");
    let _ = writeln!(s, "|---|---|---|---|---|");
    for row in &c.constants {
        let (pr, m) = claim_cells(row.published.as_ref());
        let exact = row.exact.as_ref().map_or_else(|| "bracketed".to_string(), |v| format!("`{v}`"));
        let _ = writeln!(s, "| {} | {} | {} | {} | {} |", row.symbol, exact, constant_decimal(row), pr, m);
    }
    if let Some(sm) = &c.s_matrix {
        let _ = writeln!(s);
        let _ = writeln!(s, "## S matrix");
        let _ = writeln!(s);
        let _ = writeln!(s, "| entry | value |");
        let _ = writeln!(s, "|---|---|");
        for i in 0..3 {
            for j in i..3 {
                let _ = writeln!(s, "| s{}{} | `{}` |", i + 1, j + 1, sm.matrix.get(i, j));
            }
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "| quantity | value |");
        let _ = writeln!(s, "|---|---|");
        for (i, m) in sm.leading_minors.iter().enumerate() {
            let _ = writeln!(s, "| Δ{} | {} |", i + 1, m.decimal_marked(TEXT_DIGITS));
        }
        let _ = writeln!(s, "| det(S) | {} |", sm.det_bareiss.decimal_marked(TEXT_DIGITS));
        let _ = writeln!(s, "| det(S), cofactor path | {} |", sm.det_cofactor.decimal_marked(TEXT_DIGITS));
        let _ = writeln!(s, "| classification | {:?} |", sm.classification);
        let _ = writeln!(s, "| strict verdict | {} |", if sm.strict_accepts { "pass" } else { "fail" });
        let _ = writeln!(s, "| semidefinite verdict | {} |", if sm.semidefinite_accepts { "pass" } else { "fail" });
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "**Verdict: {}**", verdict_line(c));
    s
}
