//! Report plumbing shared by the command-line verbs: a reproducibility
//! manifest embedded in every report, and text renderings derived from the
//! same data that the machine-readable JSON carries (the JSON is always a
//! superset of the text).

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::env::Environment;
use crate::population::ValidationReport;
use crate::scalar::Scalar;
use crate::stability::{
    ConditionCheck, EfficiencyCheckReport, HighestTypeReport, StabilityStatus, StabilityVerdict,
};

/// Everything needed to reproduce a run: the verb, the input paths, a hash
/// of the resolved environment, the flags, and the sampling seed.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub environment_hash: Option<String>,
    pub flags: BTreeMap<String, String>,
    pub seed: u64,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: Vec::new(),
            environment_hash: None,
            flags: BTreeMap::new(),
            seed,
        }
    }

    pub fn input(mut self, path: impl Into<String>) -> Self {
        self.inputs.push(path.into());
        self
    }

    pub fn flag(mut self, key: &str, value: impl ToString) -> Self {
        self.flags.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_environment(mut self, env: &Environment) -> Self {
        self.environment_hash = Some(environment_hash(env));
        self
    }
}

/// SHA-256 over the canonical JSON form of the environment.
pub fn environment_hash(env: &Environment) -> String {
    let json = crate::io::environment_to_json(env).to_string();
    let mut hasher = Sha256::new();
    hasher.update(json.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// A report: manifest plus verb-specific payload, serialized as one JSON
/// object.
#[derive(Clone, Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub manifest: RunManifest,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(manifest: RunManifest, body: T) -> Self {
        Report { manifest, body }
    }

    pub fn to_json(&self) -> String {
        let mut out =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        out.push('\n');
        out
    }
}

pub fn render_condition(c: &ConditionCheck) -> String {
    let margin = c
        .margin
        .as_ref()
        .map(|m| format!(" (margin {m})"))
        .unwrap_or_default();
    format!(
        "  [{}] {}{}",
        if c.passed { "pass" } else { "FAIL" },
        c.name,
        margin
    )
}

pub fn render_verdict(v: &StabilityVerdict) -> String {
    let mut out = String::new();
    out.push_str(&format!("verdict: {}\n", status_label(v.status)));
    for c in &v.conditions {
        out.push_str(&render_condition(c));
        out.push('\n');
    }
    if let Some(w) = &v.witness {
        match w {
            crate::stability::Witness::Direction(d) => {
                let rendered: Vec<String> = d.iter().map(Scalar::render).collect();
                out.push_str(&format!("witness direction: [{}]\n", rendered.join(", ")));
            }
            crate::stability::Witness::Scenario(s) => {
                let summary = s.summary();
                let mutants: Vec<String> = summary
                    .mutants
                    .iter()
                    .map(|(n, l)| format!("{n} (level {l})"))
                    .collect();
                out.push_str(&format!(
                    "witness scenario `{}`: mutants {}; first-order gain {}, tie-break {}\n",
                    summary.label,
                    mutants.join(", "),
                    summary.first_order_gain,
                    summary.tie_break_gain
                ));
            }
            crate::stability::Witness::Note(n) => {
                out.push_str(&format!("witness: {n}\n"));
            }
        }
    }
    for n in &v.notes {
        out.push_str(&format!("note: {n}\n"));
    }
    out
}

pub fn status_label(s: StabilityStatus) -> &'static str {
    match s {
        StabilityStatus::CertifiedStable => "certified-stable",
        StabilityStatus::Refuted => "refuted",
        StabilityStatus::Inconclusive => "inconclusive",
    }
}

pub fn exit_code_for(status: StabilityStatus) -> i32 {
    match status {
        StabilityStatus::CertifiedStable => 0,
        StabilityStatus::Refuted => 1,
        StabilityStatus::Inconclusive => 2,
    }
}

pub fn render_validation(report: &ValidationReport) -> String {
    let mut out = String::new();
    if report.valid {
        out.push_str("configuration: valid\n");
    } else {
        out.push_str("configuration: INVALID\n");
        for v in &report.violations {
            let magnitude = v
                .magnitude
                .as_ref()
                .map(|m| format!(" by {m}"))
                .unwrap_or_default();
            out.push_str(&format!(
                "  {:?} play of `{}` vs `{}`: {}{}\n",
                v.mode, v.of, v.vs, v.condition, magnitude
            ));
        }
    }
    for (mode, of, vs) in &report.auto_completed {
        out.push_str(&format!(
            "  auto-completed {mode:?} play of `{of}` vs `{vs}`\n"
        ));
    }
    out
}

pub fn render_highest_type_report(report: &HighestTypeReport) -> String {
    let mut out = format!(
        "highest-type conditions (level {}): {}\n",
        report.highest_level,
        if report.pass { "pass" } else { "FAIL" }
    );
    for t in &report.per_type {
        out.push_str(&format!(" type `{}`\n", t.type_name));
        out.push_str(&render_condition(&t.efficient_self_play));
        out.push('\n');
        for (lower, c) in &t.deception_fitness {
            out.push_str(&format!("  vs `{lower}`:{}\n", &render_condition(c)[2..]));
        }
        for (lower, c) in &t.lower_type_bound {
            out.push_str(&format!("  vs `{lower}`:{}\n", &render_condition(c)[2..]));
        }
    }
    out
}

pub fn render_efficiency_check(report: &EfficiencyCheckReport) -> String {
    let mut out = String::new();
    if report.no_stable_configuration_exists {
        out.push_str("efficiency check: no symmetric efficient profile — no configuration of this game can be stable\n");
        if let Some(r) = &report.reason {
            out.push_str(&format!("  {r}\n"));
        }
        return out;
    }
    if !report.applicable {
        out.push_str(&format!(
            "efficiency check: inconclusive ({})\n",
            report.reason.as_deref().unwrap_or("not applicable")
        ));
        return out;
    }
    out.push_str(&format!(
        "efficiency check: {}\n",
        if report.pass { "pass" } else { "FAIL" }
    ));
    for (of, vs, mode) in &report.deviations {
        out.push_str(&format!(
            "  {mode:?} play of `{of}` vs `{vs}` is not the efficient action\n"
        ));
    }
    for w in &report.witnesses {
        let independent = w
            .independent_value
            .as_ref()
            .map(|v| format!(" (independent route: {v})"))
            .unwrap_or_default();
        out.push_str(&format!(
            "  instability direction `{}` vs `{}`: quadratic form {}{}\n",
            w.type_i, w.type_j, w.quadratic_form, independent
        ));
    }
    out
}
