//! Report bundles and their CSV / plain-text rendering.

use std::fmt::Write as _;

use opseq::lab::PropertyCheck;

pub const CSV_HEADER: &str = "n,norm_residual,strong_residual_max,weak_residual_max,flag";

/// One record per index `n` (or per trial).
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: usize,
    pub norm: f64,
    pub strong: f64,
    pub weak: f64,
    /// Free-form token without commas or line breaks.
    pub flag: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub checks: Vec<PropertyCheck>,
    /// Informational lines (verdicts, counts) that carry no pass/fail.
    pub notes: Vec<String>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(PropertyCheck::ok)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &PropertyCheck> {
        self.checks.iter().filter(|c| !c.ok())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportBundle {
    pub header: Vec<String>,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

fn number(x: f64) -> String {
    // 17 significant digits round-trip every f64.
    format!("{x:.16e}")
}

fn sanitize(flag: &str) -> String {
    flag.chars()
        .map(|c| {
            if c == ',' || c == '\n' || c == '\r' {
                ';'
            } else {
                c
            }
        })
        .collect()
}

/// The CSV table: header line plus one line per row, LF-terminated.
pub fn emit_csv(bundle: &ReportBundle) -> String {
    let mut out = String::with_capacity(64 * (bundle.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &bundle.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            number(r.norm),
            number(r.strong),
            number(r.weak),
            sanitize(&r.flag)
        );
    }
    out
}

pub fn check_line(c: &PropertyCheck) -> String {
    let status = if c.passed { "pass" } else { "fail" };
    let mut line = format!("{}: {status}", c.name);
    if !c.passed {
        let _ = write!(line, " (violations {}", c.violations);
        if let Some(first) = c.first_violation.filter(|_| c.violations > 0) {
            let _ = write!(line, ", first at n = {first}");
        }
        let _ = write!(line, ", worst excess {})", number(c.worst_excess));
    }
    if !c.asserted {
        line.push_str(" [reported only]");
    }
    line
}

/// Header block, CSV table and summary block; comment lines start with `# `.
pub fn render(bundle: &ReportBundle) -> String {
    let mut out = String::new();
    for h in &bundle.header {
        let _ = writeln!(out, "# {h}");
    }
    out.push_str(&emit_csv(bundle));
    out.push_str("# summary\n");
    for c in &bundle.summary.checks {
        let _ = writeln!(out, "# {}", check_line(c));
    }
    for note in &bundle.summary.notes {
        let _ = writeln!(out, "# {note}");
    }
    let _ = writeln!(
        out,
        "# result: {}",
        if bundle.summary.passed() {
            "pass"
        } else {
            "fail"
        }
    );
    out
}
