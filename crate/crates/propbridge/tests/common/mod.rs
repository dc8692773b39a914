#![allow(dead_code)]

use std::path::Path;
use std::process::Command;

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Run the `propbridge` binary built for this test run.
pub fn cli(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_propbridge"))
        .args(args)
        .output()
        .expect("binary runs");
    Output {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn path_arg(flag: &str, p: &Path) -> String {
    format!("--{flag}={}", p.display())
}

/// Report JSON with the fields that legitimately differ between runs
/// blanked out.
pub fn normalized(report: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(report).expect("report is JSON");
    v["run_id"] = "".into();
    v["timestamp"] = "".into();
    for r in v["results"].as_array_mut().unwrap() {
        r["duration_ms"] = 0.into();
    }
    v
}
