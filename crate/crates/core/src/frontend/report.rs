//! Human- and machine-readable check reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::system_file::SystemFile;
use crate::analysis::{analysis, Readings};
use crate::conditions::{ConditionId, Verdict, VariantLedger, Witness};
use crate::expr::RationalForm;
use crate::jet::OdeSystem;
use crate::numeric::OracleReport;
use crate::tensor::{Shape, Tensor};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    /// Randomized zero tests only; verdicts are probable.
    NumericOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemInfo {
    pub name: Option<String>,
    pub m: usize,
    pub rhs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub conformal: bool,
    pub probable: bool,
    pub failing: Vec<ConditionId>,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub id: ConditionId,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantDump {
    pub shape: Shape,
    /// Row-major entries as canonical rational functions.
    pub entries: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub system: SystemInfo,
    pub mode: Mode,
    pub seed: u64,
    pub readings: Readings,
    pub verdict: VerdictSummary,
    pub conditions: Vec<ConditionSummary>,
    pub ledger: Option<VariantLedger>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariants: Option<BTreeMap<String, InvariantDump>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    /// Wall-clock seconds per phase; absent unless requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn new<F>(file: &SystemFile, verdict: &Verdict<F>, mode: Mode, seed: u64, readings: Readings) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo { name: env!("CARGO_PKG_NAME").into(), version: env!("CARGO_PKG_VERSION").into() },
            system: SystemInfo {
                name: file.name.clone(),
                m: file.m,
                rhs: file.rhs.iter().map(|r| r.text.clone()).collect(),
            },
            mode,
            seed,
            readings,
            verdict: VerdictSummary {
                conformal: verdict.conformal,
                probable: mode == Mode::NumericOnly,
                failing: verdict.failing(),
                text: verdict.text(),
            },
            conditions: verdict
                .conditions
                .iter()
                .map(|c| ConditionSummary { id: c.id, passed: c.passed, witness: c.witness.clone() })
                .collect(),
            ledger: verdict.ledger.clone(),
            invariants: None,
            oracle: None,
            timings: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let name = self.system.name.as_deref().unwrap_or("system");
        out += &format!("{name} (m = {})\n", self.system.m);
        for (i, f) in self.system.rhs.iter().enumerate() {
            out += &format!("  f{} = {f}\n", i + 1);
        }
        for c in &self.conditions {
            let label = match c.id {
                ConditionId::Rank => "rank of I4".to_string(),
                id => format!("condition {id}"),
            };
            out += &format!("  {label:<12} {}\n", if c.passed { "ok" } else { "FAILED" });
            if let Some(w) = &c.witness {
                let idx: Vec<String> = w.index.iter().map(|i| i.to_string()).collect();
                out += &format!("    entry ({}) = {} at {}\n", idx.join(","), w.value, w.point);
            }
        }
        if let Some(o) = &self.oracle {
            out += &format!(
                "  oracle: {} ({} trajectories, {} skipped, tolerance {:e})\n",
                if o.passed { "circles" } else { "not circles" },
                o.trajectories.len(),
                o.skipped(),
                o.tolerance
            );
        }
        if let Some(inv) = &self.invariants {
            for (k, d) in inv {
                out += &format!("  {k}:\n");
                for e in &d.entries {
                    out += &format!("    {e}\n");
                }
            }
        }
        if let Some(t) = &self.timings {
            for (k, v) in t {
                out += &format!("  time {k}: {v:.3}s\n");
            }
        }
        let prefix = if self.verdict.probable { "probably: " } else { "" };
        out += &format!("{prefix}{}\n", self.verdict.text);
        out
    }
}

fn dump(t: &Tensor<RationalForm>) -> InvariantDump {
    InvariantDump { shape: t.shape(), entries: t.entries().iter().map(|e| e.to_string()).collect() }
}

/// `I2`, `W2`, `W3` and `I4` under the given readings.
pub fn invariant_dump(sys: &OdeSystem, r: &Readings) -> BTreeMap<String, InvariantDump> {
    let a = analysis(sys);
    BTreeMap::from([
        ("I2".to_string(), dump(a.i2())),
        ("W2".to_string(), dump(a.w2())),
        ("W3".to_string(), dump(a.w3(r.cube))),
        ("I4".to_string(), dump(a.i4(r.i4, r.hm2))),
    ])
}
