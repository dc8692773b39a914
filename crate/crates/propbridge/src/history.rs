//! Append-only run history and flaky-verdict detection.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::report::RunReport;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub run_id: String,
    pub timestamp: String,
    pub code_fingerprint: String,
    pub config_hash: String,
    pub property: String,
    pub backend: String,
    pub verdict: String,
    pub duration_ms: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HistoryUpdate {
    pub flaky: Vec<String>,
    /// One message per unreadable line.
    pub warnings: Vec<String>,
}

pub fn records_for(report: &RunReport) -> Vec<HistoryRecord> {
    let hash = report.config.config_hash();
    report
        .entries
        .iter()
        .map(|e| HistoryRecord {
            run_id: report.run_id.clone(),
            timestamp: report.timestamp.clone(),
            code_fingerprint: report.config.code_fingerprint.clone(),
            config_hash: hash.clone(),
            property: e.name.clone(),
            backend: e.backend.clone(),
            verdict: e.verdict.kind().as_str().to_string(),
            duration_ms: e.duration_ms,
        })
        .collect()
}

/// All readable records; corrupt lines are skipped and reported.
pub fn read_history(path: &Path) -> io::Result<(Vec<HistoryRecord>, Vec<String>)> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok((Vec::new(), Vec::new())),
        Err(e) => return Err(e),
    };
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(r) => records.push(r),
            Err(e) => warnings.push(format!(
                "{}:{}: skipping corrupt history line: {e}",
                path.display(),
                i + 1
            )),
        }
    }
    Ok((records, warnings))
}

/// Properties among `names` whose verdict kind differs between at least two
/// runs that share `fingerprint` and `config_hash`.
pub fn flaky_properties(
    records: &[HistoryRecord],
    fingerprint: &str,
    config_hash: &str,
    names: &BTreeSet<String>,
) -> Vec<String> {
    let mut kinds: BTreeMap<&str, BTreeMap<&str, &str>> = BTreeMap::new();
    for r in records {
        if r.code_fingerprint == fingerprint
            && r.config_hash == config_hash
            && names.contains(&r.property)
        {
            kinds
                .entry(&r.property)
                .or_default()
                .insert(&r.run_id, &r.verdict);
        }
    }
    kinds
        .into_iter()
        .filter(|(_, runs)| runs.values().collect::<BTreeSet<_>>().len() >= 2)
        .map(|(p, _)| p.to_string())
        .collect()
}

/// Append this run's records, then scan the whole file for flaky
/// properties of this run.
pub fn update_history(path: &Path, report: &RunReport) -> io::Result<HistoryUpdate> {
    let mut out = String::new();
    for r in records_for(report) {
        out.push_str(&serde_json::to_string(&r).expect("records always serialize"));
        out.push('\n');
    }
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(out.as_bytes())?;
    drop(f);

    let (records, warnings) = read_history(path)?;
    let names = report.entries.iter().map(|e| e.name.clone()).collect();
    let flaky = flaky_properties(
        &records,
        &report.config.code_fingerprint,
        &report.config.config_hash(),
        &names,
    );
    Ok(HistoryUpdate { flaky, warnings })
}
