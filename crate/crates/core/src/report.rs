//! Verification reports: one entry per checked identity.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "qgd-report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub check: String,
    pub module: String,
    /// Name of the identity or property being checked.
    pub anchor: String,
    pub params: BTreeMap<String, String>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub witnesses: Vec<String>,
}

impl Entry {
    /// Entry that passes iff `residual ≤ tolerance` (non-finite residuals fail).
    pub fn new(module: &str, check: &str, anchor: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            check: check.to_string(),
            module: module.to_string(),
            anchor: anchor.to_string(),
            params: BTreeMap::new(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
            witnesses: Vec::new(),
        }
    }

    /// Boolean check with no natural residual.
    pub fn flag(module: &str, check: &str, anchor: &str, pass: bool) -> Self {
        let mut e = Self::new(module, check, anchor, if pass { 0.0 } else { 1.0 }, 0.0);
        e.pass = pass;
        e
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn witness(mut self, w: impl Into<String>) -> Self {
        self.witnesses.push(w.into());
        self
    }

    /// Overrides the pass flag (for checks whose verdict is not `residual ≤ tol`).
    pub fn with_pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub entries: Vec<Entry>,
}

#[derive(Serialize)]
struct Document<'a> {
    schema: &'a str,
    timestamp: u64,
    pass: bool,
    entries: &'a [Entry],
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, e: Entry) {
        self.entries.push(e);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.entries.extend(other.entries);
    }

    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn get(&self, check: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.check == check)
    }

    /// Largest residual among entries whose check name starts with `prefix`.
    pub fn max_residual(&self, prefix: &str) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.check.starts_with(prefix))
            .map(|e| e.residual)
            .fold(0.0, f64::max)
    }

    /// Tags every entry with an extra parameter (e.g. the quantum group name).
    pub fn tag(mut self, key: &str, value: &str) -> Self {
        for e in &mut self.entries {
            e.params.insert(key.to_string(), value.to_string());
        }
        self
    }

    pub fn to_json(&self, timestamp: u64) -> String {
        let doc = Document {
            schema: SCHEMA,
            timestamp,
            pass: self.pass(),
            entries: &self.entries,
        };
        serde_json::to_string_pretty(&doc).expect("report serialization cannot fail")
    }

    /// One table per module, in order of first appearance.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "# Verification report ({SCHEMA})\n\nOverall: **{verdict}**");
        let mut modules: Vec<&str> = Vec::new();
        for e in &self.entries {
            if !modules.contains(&e.module.as_str()) {
                modules.push(&e.module);
            }
        }
        for m in modules {
            let _ = writeln!(out, "\n## {m}\n");
            let _ = writeln!(out, "| check | identity | params | residual | tolerance | result |");
            let _ = writeln!(out, "|---|---|---|---|---|---|");
            for e in self.entries.iter().filter(|e| e.module == m) {
                let params = e
                    .params
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(", ");
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {:.3e} | {:.3e} | {} |",
                    e.check,
                    e.anchor,
                    params,
                    e.residual,
                    e.tolerance,
                    if e.pass { "pass" } else { "FAIL" }
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_has_header() {
        let r = VerificationReport::new();
        let v: serde_json::Value = serde_json::from_str(&r.to_json(0)).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["pass"], true);
        assert_eq!(v["entries"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn failure_propagates() {
        let mut r = VerificationReport::new();
        r.push(Entry::new("hopf", "a", "x", 1e-12, 1e-10));
        r.push(Entry::new("hopf", "b", "y", 1e-3, 1e-10));
        let v: serde_json::Value = serde_json::from_str(&r.to_json(0)).unwrap();
        assert_eq!(v["pass"], false);
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn nan_residual_fails() {
        assert!(!Entry::new("m", "c", "a", f64::NAN, 1.0).pass);
    }

    #[test]
    fn markdown_golden() {
        let mut r = VerificationReport::new();
        r.push(Entry::new("hopf", "coassociativity", "(Δ⊗id)Δ = (id⊗Δ)Δ", 1.5e-13, 1e-10).param("group", "Z2"));
        r.push(Entry::new("conv", "haar_invariance", "h∘R_μ = h", 2.0e-3, 1e-9));
        let want = "# Verification report (qgd-report/1)\n\nOverall: **FAIL**\n\
\n## hopf\n\n| check | identity | params | residual | tolerance | result |\n|---|---|---|---|---|---|\n\
| coassociativity | (Δ⊗id)Δ = (id⊗Δ)Δ | group=Z2 | 1.500e-13 | 1.000e-10 | pass |\n\
\n## conv\n\n| check | identity | params | residual | tolerance | result |\n|---|---|---|---|---|---|\n\
| haar_invariance | h∘R_μ = h |  | 2.000e-3 | 1.000e-9 | FAIL |\n";
        assert_eq!(r.to_markdown(), want);
    }
}
