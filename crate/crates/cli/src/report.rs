//! Estimate reports: a `key=value` text file plus a JSON sibling with the
//! same stem. Neither contains timestamps or host details, so identical
//! inputs give identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use concentrate::{ConcentrationEstimate, HalfSpace, TrialReport};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct DatasetInfo {
    pub source: String,
    pub m: usize,
    pub n: usize,
}

/// Shape of a half-space normal.
#[derive(Debug, Serialize)]
pub struct WeightSummary {
    pub nonzero: usize,
    pub l1: f64,
    pub linf: f64,
    pub argmax: usize,
}

impl WeightSummary {
    pub fn of(h: &HalfSpace) -> Self {
        let w = h.w();
        let argmax = (0..w.len()).fold(0, |b, j| if w[j].abs() > w[b].abs() { j } else { b });
        Self {
            nonzero: w.iter().filter(|v| **v != 0.0).count(),
            l1: w.iter().map(|v| v.abs()).sum(),
            linf: w[argmax].abs(),
            argmax,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TrialEntry {
    pub trial: usize,
    pub split_seed: u64,
    pub train_risk: f64,
    pub train_adv_risk: f64,
    pub test_risk: f64,
    pub test_adv_risk: f64,
    pub b: f64,
    pub w_summary: WeightSummary,
    pub component: usize,
    pub exponent: Option<u32>,
    pub negated: bool,
    pub w: Vec<f64>,
}

impl TrialEntry {
    pub fn new(trial: usize, split_seed: u64, e: &ConcentrationEstimate) -> Self {
        Self {
            trial,
            split_seed,
            train_risk: e.train_risk,
            train_adv_risk: e.train_adv_risk,
            test_risk: e.test_risk,
            test_adv_risk: e.test_adv_risk,
            b: e.half_space.b(),
            w_summary: WeightSummary::of(&e.half_space),
            component: e.origin.component,
            exponent: e.origin.exponent,
            negated: e.origin.negated,
            w: e.half_space.w().to_vec(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub mean_test_risk: f64,
    pub std_test_risk: f64,
    pub mean_test_adv_risk: f64,
    pub std_test_adv_risk: f64,
    /// One minus the mean test adversarial risk.
    pub intrinsic_robustness: f64,
}

impl Summary {
    pub fn of(r: &TrialReport) -> Self {
        Self {
            mean_test_risk: r.mean_test_risk,
            std_test_risk: r.std_test_risk,
            mean_test_adv_risk: r.mean_test_adv_risk,
            std_test_adv_risk: r.std_test_adv_risk,
            intrinsic_robustness: 1.0 - r.mean_test_adv_risk,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EstimateReport<F: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub flags: F,
    pub dataset: DatasetInfo,
    pub trials: Vec<TrialEntry>,
    pub summary: Summary,
}

impl<F: Serialize> EstimateReport<F> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Flattened `key=value` lines; flags come from the JSON form so the
    /// two files never disagree.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {} {} report", self.tool, self.command);
        let _ = writeln!(out, "version={}", self.version);
        let flags = serde_json::to_value(&self.flags).expect("flags serialize");
        flatten("flag", &flags, &mut out);
        let _ = writeln!(out, "dataset.source={}", self.dataset.source);
        let _ = writeln!(out, "dataset.m={}", self.dataset.m);
        let _ = writeln!(out, "dataset.n={}", self.dataset.n);
        for t in &self.trials {
            let p = format!("trial.{}", t.trial);
            let _ = writeln!(out, "{p}.split_seed={}", t.split_seed);
            let _ = writeln!(out, "{p}.train_risk={}", t.train_risk);
            let _ = writeln!(out, "{p}.train_adv_risk={}", t.train_adv_risk);
            let _ = writeln!(out, "{p}.test_risk={}", t.test_risk);
            let _ = writeln!(out, "{p}.test_adv_risk={}", t.test_adv_risk);
            let _ = writeln!(out, "{p}.b={}", t.b);
            let _ = writeln!(out, "{p}.w_nonzero={}", t.w_summary.nonzero);
            let _ = writeln!(out, "{p}.w_l1={}", t.w_summary.l1);
            let _ = writeln!(out, "{p}.w_linf={}", t.w_summary.linf);
            let _ = writeln!(out, "{p}.w_argmax={}", t.w_summary.argmax);
            let exp = t.exponent.map_or("axis".to_string(), |s| s.to_string());
            let sign = if t.negated { "-" } else { "+" };
            let _ = writeln!(out, "{p}.candidate=pc{}/s={exp}/{sign}", t.component);
        }
        let s = &self.summary;
        let _ = writeln!(out, "mean_test_risk={}", s.mean_test_risk);
        let _ = writeln!(out, "std_test_risk={}", s.std_test_risk);
        let _ = writeln!(out, "mean_test_adv_risk={}", s.mean_test_adv_risk);
        let _ = writeln!(out, "std_test_adv_risk={}", s.std_test_adv_risk);
        let _ = writeln!(out, "intrinsic_robustness={}", s.intrinsic_robustness);
        let _ = writeln!(
            out,
            "test_risk_pct={:.2} ± {:.2}",
            100.0 * s.mean_test_risk,
            100.0 * s.std_test_risk
        );
        let _ = writeln!(
            out,
            "test_adv_risk_pct={:.2} ± {:.2}",
            100.0 * s.mean_test_adv_risk,
            100.0 * s.std_test_adv_risk
        );
        out
    }
}

fn flatten(prefix: &str, v: &serde_json::Value, out: &mut String) {
    use serde_json::Value;
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&format!("{prefix}.{k}"), v, out);
            }
        }
        Value::Array(items) if items.iter().all(|i| !i.is_object()) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            let _ = writeln!(out, "{prefix}={}", joined.join(","));
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, out);
            }
        }
        other => {
            let _ = writeln!(out, "{prefix}={}", scalar(other));
        }
    }
}

fn scalar(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `(text path, json path)` for an `--out` argument.
pub fn output_paths(out: &Path) -> (PathBuf, PathBuf) {
    if out.extension().is_some_and(|e| e == "json") {
        (out.with_extension("txt"), out.to_path_buf())
    } else {
        (out.to_path_buf(), out.with_extension("json"))
    }
}

pub fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}
