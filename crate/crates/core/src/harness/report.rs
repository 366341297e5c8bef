use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::indices::PointResidue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

/// A symbolic identity or structural condition and whether it held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEntry {
    pub chart: String,
    pub point: String,
    pub residue: String,
    pub cluster: bool,
}

impl From<&PointResidue> for PointEntry {
    fn from(p: &PointResidue) -> Self {
        PointEntry { chart: p.chart.clone(), point: p.point.clone(), residue: p.residue.clone(), cluster: p.cluster }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectReport {
    pub name: String,
    pub kind: String,
    pub summary: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub points: Vec<PointEntry>,
    pub sum: Option<String>,
    pub expected: Option<String>,
    pub verdict: Verdict,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationSummary {
    pub adapted: bool,
    pub splitting: bool,
    pub two_splitting: bool,
    pub comfortable: bool,
    pub two_linearizable: bool,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub model: String,
    pub description: String,
    pub classification: Option<ClassificationSummary>,
    /// The atlas was rewritten by a splitting correction before the run.
    pub corrected: bool,
    /// Classification of the declared atlas when a correction was applied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub before_correction: Option<ClassificationSummary>,
    pub degree: Option<String>,
    pub objects: Vec<ObjectReport>,
    pub verdict: Verdict,
    pub reason: Option<String>,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn row(out: &mut String, cols: &[&str], widths: &[usize]) {
    let cells: Vec<String> = cols.iter().zip(widths).map(|(c, w)| format!("{:<w$}", c, w = *w)).collect();
    let _ = writeln!(out, "  {}", cells.join("  ").trim_end());
}

/// Human-readable report with aligned point tables.
pub fn render_text(r: &VerificationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {}  [{}]  {} ms", r.model, r.verdict, r.elapsed_ms);
    if !r.description.is_empty() {
        let _ = writeln!(out, "  {}", r.description);
    }
    if let Some(c) = &r.before_correction {
        let _ = writeln!(
            out,
            "  declared atlas: adapted={} splitting={} 2-splitting={} comfortable={} 2-linearizable={}",
            c.adapted, c.splitting, c.two_splitting, c.comfortable, c.two_linearizable
        );
    }
    if let Some(c) = &r.classification {
        let _ = writeln!(
            out,
            "  atlas: adapted={} splitting={} 2-splitting={} comfortable={} 2-linearizable={}{}",
            c.adapted,
            c.splitting,
            c.two_splitting,
            c.comfortable,
            c.two_linearizable,
            if r.corrected { " (after splitting correction)" } else { "" }
        );
    }
    if let Some(d) = &r.degree {
        let _ = writeln!(out, "  normal bundle degree: {}", d);
    }
    if let Some(why) = &r.reason {
        let _ = writeln!(out, "  reason: {}", why);
    }
    for o in &r.objects {
        let _ = writeln!(out, "  {} {}  [{}]", o.kind, o.name, o.verdict);
        for (k, v) in &o.summary {
            let _ = writeln!(out, "    {}: {}", k, v);
        }
        for c in &o.checks {
            let _ = writeln!(out, "    [{}] {}{}", if c.passed { "ok" } else { "!!" }, c.name, if c.detail.is_empty() { String::new() } else { format!(": {}", c.detail) });
        }
        if !o.points.is_empty() {
            let head = ["chart", "point", "residue"];
            let mut w = head.map(|h| h.len());
            for p in &o.points {
                w[0] = w[0].max(p.chart.len());
                w[1] = w[1].max(p.point.len() + if p.cluster { 10 } else { 0 });
                w[2] = w[2].max(p.residue.len());
            }
            row(&mut out, &["  chart", "point", "residue"], &[w[0] + 2, w[1], w[2]]);
            for p in &o.points {
                let pt = if p.cluster { format!("{} (summed)", p.point) } else { p.point.clone() };
                row(&mut out, &[&format!("  {}", p.chart), &pt, &p.residue], &[w[0] + 2, w[1], w[2]]);
            }
        }
        if let Some(s) = &o.sum {
            let _ = writeln!(out, "    sum = {}   expected = {}", s, o.expected.as_deref().unwrap_or("-"));
        }
        if let Some(why) = &o.reason {
            let _ = writeln!(out, "    reason: {}", why);
        }
    }
    out
}
