//! Run reports and their JSON form.

use std::fs;
use std::io;
use std::path::Path;

use propbridge_core::{Verdict, VerdictKind};
use serde::Serialize;

use crate::runner::RunConfig;

pub const REPORT_VERSION: u32 = 1;

/// One property's result within a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub name: String,
    pub backend: String,
    pub verdict: Verdict,
    pub duration_ms: u64,
    pub waived: bool,
    pub waiver_reason: Option<String>,
}

impl Entry {
    /// Not PassSampled and not Proved.
    pub fn is_failing(&self) -> bool {
        matches!(
            self.verdict,
            Verdict::Falsified(_) | Verdict::Unknown { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub run_id: String,
    pub timestamp: String,
    pub config: RunConfig,
    pub entries: Vec<Entry>,
    pub stale_waivers: Vec<String>,
    pub unused_waivers: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub passed: u64,
    pub proved: u64,
    pub falsified: u64,
    pub unknown: u64,
    pub waived: u64,
}

impl RunReport {
    /// Waived entries count only as waived, so the totals add up to the
    /// number of entries.
    pub fn totals(&self) -> Totals {
        let mut t = Totals::default();
        for e in &self.entries {
            let slot = if e.waived {
                &mut t.waived
            } else {
                match e.verdict.kind() {
                    VerdictKind::PassSampled => &mut t.passed,
                    VerdictKind::Proved => &mut t.proved,
                    VerdictKind::Falsified => &mut t.falsified,
                    VerdictKind::Unknown => &mut t.unknown,
                }
            };
            *slot += 1;
        }
        t
    }

    /// 1 on any unwaived falsification; 2 on unwaived unknowns under
    /// `strict`; 0 otherwise.
    pub fn exit_code(&self, strict: bool) -> i32 {
        let t = self.totals();
        if t.falsified > 0 {
            1
        } else if strict && t.unknown > 0 {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let doc = ReportJson {
            version: REPORT_VERSION,
            run_id: &self.run_id,
            timestamp: &self.timestamp,
            config: &self.config,
            results: self.entries.iter().map(ResultJson::from).collect(),
            totals: self.totals(),
            stale_waivers: &self.stale_waivers,
            unused_waivers: &self.unused_waivers,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report values always serialize");
        s.push('\n');
        s
    }
}

pub fn write_report(report: &RunReport, path: &Path) -> io::Result<()> {
    fs::write(path, report.to_json())
}

/// The `n` slowest entries as (name, backend, duration), slowest first and
/// ties by name.
pub fn profile_report(report: &RunReport, n: usize) -> Vec<(String, String, u64)> {
    let mut rows: Vec<_> = report
        .entries
        .iter()
        .map(|e| (e.name.clone(), e.backend.clone(), e.duration_ms))
        .collect();
    rows.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| a.0.cmp(&b.0)));
    rows.truncate(n);
    rows
}

#[derive(Serialize)]
struct ReportJson<'a> {
    version: u32,
    run_id: &'a str,
    timestamp: &'a str,
    config: &'a RunConfig,
    results: Vec<ResultJson<'a>>,
    totals: Totals,
    stale_waivers: &'a [String],
    unused_waivers: &'a [String],
}

#[derive(Serialize)]
struct ResultJson<'a> {
    name: &'a str,
    backend: &'a str,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cases: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<CounterexampleJson>,
    duration_ms: u64,
    waived: bool,
    vacuity_warning: bool,
}

#[derive(Serialize)]
struct CounterexampleJson {
    original: String,
    shrunk: String,
    seed: Option<u64>,
    case_index: Option<u64>,
}

impl<'a> From<&'a Entry> for ResultJson<'a> {
    fn from(e: &'a Entry) -> Self {
        let (cases, counterexample) = match &e.verdict {
            Verdict::PassSampled { cases } => (Some(*cases), None),
            Verdict::Proved { count, .. } => (Some(*count), None),
            Verdict::Unknown { count, .. } => (*count, None),
            Verdict::Falsified(c) => (
                None,
                Some(CounterexampleJson {
                    original: c.original.to_string(),
                    shrunk: c.shrunk.to_string(),
                    seed: c.seed,
                    case_index: c.case_index,
                }),
            ),
        };
        ResultJson {
            name: &e.name,
            backend: &e.backend,
            verdict: e.verdict.kind().as_str(),
            reason: e.verdict.reason().map(|r| r.as_str()),
            cases,
            counterexample,
            duration_ms: e.duration_ms,
            waived: e.waived,
            vacuity_warning: e.verdict.is_vacuous(),
        }
    }
}
