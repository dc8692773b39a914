//! Expiring suppressions of non-passing verdicts.

use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use globset::Glob;
use serde::Deserialize;

use crate::config::ConfigError;
use crate::registry::RegistryError;
use crate::report::RunReport;

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Waiver {
    pub glob: String,
    pub reason: String,
    /// Last day on which the waiver applies.
    pub expires: NaiveDate,
}

impl Waiver {
    pub fn is_expired(&self, today: NaiveDate) -> bool {
        self.expires < today
    }
}

pub fn parse_waivers(text: &str) -> Result<Vec<Waiver>, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn load_waivers(path: &Path) -> Result<Vec<Waiver>, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::io(path, e))?;
    parse_waivers(&text).map_err(|e| ConfigError::Malformed {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Mark matching non-passing entries as waived. Expired waivers are listed
/// as stale; live waivers that waived nothing are listed as unused. Verdicts
/// themselves are never touched.
pub fn apply_waivers(
    report: &mut RunReport,
    waivers: &[Waiver],
    today: NaiveDate,
) -> Result<(), RegistryError> {
    for w in waivers {
        if w.is_expired(today) {
            report.stale_waivers.push(w.glob.clone());
            continue;
        }
        let matcher = Glob::new(&w.glob)
            .map_err(|e| RegistryError::BadGlob {
                glob: w.glob.clone(),
                message: e.kind().to_string(),
            })?
            .compile_matcher();
        let mut used = false;
        for e in report.entries.iter_mut() {
            if e.is_failing() && matcher.is_match(&e.name) {
                used = true;
                if !e.waived {
                    e.waived = true;
                    e.waiver_reason = Some(w.reason.clone());
                }
            }
        }
        if !used {
            report.unused_waivers.push(w.glob.clone());
        }
    }
    Ok(())
}
