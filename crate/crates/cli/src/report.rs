//! Machine-readable run reports.
//!
//! Every command produces one [`RunReport`]. Apart from `timings` and the
//! per-entry `elapsed_seconds`, two runs with the same flags serialize to the
//! same JSON. The shape is pinned by `schema/run_report.schema.json`.

use std::collections::BTreeMap;
use std::time::Duration;

use obstruct::groebner::GbStats;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// The published JSON schema, bundled so that consumers can fetch it from the binary.
pub const SCHEMA: &str = include_str!("../schema/run_report.schema.json");

/// Process exit codes. Stable across releases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Exit 0: the run produced the expected verdict.
    Ok,
    /// Exit 1: a conformance check or an expected verdict failed.
    Mismatch,
    /// Exit 2: bad flags, unreadable input or missing data.
    Usage,
    /// Exit 3: a wall-clock, pair-count or degree budget ran out.
    BudgetExceeded,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Mismatch => 1,
            Status::Usage => 2,
            Status::BudgetExceeded => 3,
        }
    }

    /// The more severe of two statuses; a budget overrun outranks a mismatch
    /// because the mismatch may be an artifact of the truncated run.
    pub fn worst(self, other: Status) -> Status {
        let rank = |s: Status| match s {
            Status::Ok => 0,
            Status::Mismatch => 1,
            Status::BudgetExceeded => 2,
            Status::Usage => 3,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo { name: "obstruct".into(), version: env!("CARGO_PKG_VERSION").into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryStatus {
    Completed,
    BudgetExceeded,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsReport {
    pub pairs_created: u64,
    pub pairs_processed: u64,
    pub skipped_product: u64,
    pub skipped_chain: u64,
    pub skipped_degree: u64,
    pub zero_reductions: u64,
    pub reduction_steps: u64,
    pub max_pair_degree: u32,
    pub max_basis: usize,
}

impl From<&GbStats> for StatsReport {
    fn from(s: &GbStats) -> Self {
        StatsReport {
            pairs_created: s.pairs_created,
            pairs_processed: s.pairs_processed,
            skipped_product: s.skipped_product,
            skipped_chain: s.skipped_chain,
            skipped_degree: s.skipped_degree,
            zero_reductions: s.zero_reductions,
            reduction_steps: s.reduction_steps,
            max_pair_degree: s.max_pair_degree,
            max_basis: s.max_basis,
        }
    }
}

/// One verdict-bearing unit of work: a Gröbner run, an appendix comparison, ...
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub label: String,
    pub status: EntryStatus,
    /// `UnitIdeal`, `ProperIdeal`, `match`, `mismatch`; absent when the budget ran out.
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<StatsReport>,
    pub elapsed_seconds: f64,
}

impl Entry {
    pub fn completed(label: impl Into<String>, verdict: impl Into<String>, elapsed: Duration) -> Self {
        Entry {
            label: label.into(),
            status: EntryStatus::Completed,
            verdict: Some(verdict.into()),
            field: None,
            order: None,
            basis_size: None,
            stats: None,
            elapsed_seconds: elapsed.as_secs_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub status: Status,
    pub exit_code: u8,
    pub verdicts: Vec<Entry>,
    pub timings: Timings,
    pub artifacts: Vec<String>,
    /// Command-specific payload (mismatch diffs, basis listings, benchmark table, ...).
    pub details: BTreeMap<String, Value>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo::current(),
            command: command.into(),
            parameters: BTreeMap::new(),
            status: Status::Ok,
            exit_code: 0,
            verdicts: Vec::new(),
            timings: Timings { total_seconds: 0.0 },
            artifacts: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.into(), value.into());
        self
    }

    pub fn detail(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.details.insert(key.into(), value.into());
        self
    }

    pub fn set_status(&mut self, status: Status) {
        self.status = status;
        self.exit_code = status.exit_code();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers and strings")
    }

    /// A copy with every timing field zeroed, for determinism checks.
    pub fn without_timings(&self) -> RunReport {
        let mut r = self.clone();
        r.timings.total_seconds = 0.0;
        for e in &mut r.verdicts {
            e.elapsed_seconds = 0.0;
        }
        r
    }
}
