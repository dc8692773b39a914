//! Backend dispatch, deadlines, ensembles and whole-suite runs.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{mpsc, Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use propbridge_core::exhaustive::DEFAULT_BUDGET;
use propbridge_core::fuzz::DEFAULT_CASES;
use propbridge_core::interrupt::{Halt, Interrupt};
use propbridge_core::pattern::DEFAULT_REPETITION_CAP;
use propbridge_core::solver::SolverConfig;
use propbridge_core::{
    run_exhaustive, run_fuzz, run_symbolic, ExhaustiveConfig, FuzzConfig, Property, SymbolicConfig,
    UnknownReason, Verdict,
};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::guard;
use crate::registry::{Registry, RegistryError};
use crate::report::{Entry, RunReport};

pub const DEFAULT_TIMEOUT_MS: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Fuzz,
    Exhaustive,
    Symbolic,
    Ensemble,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Fuzz => "fuzz",
            Backend::Exhaustive => "exhaustive",
            Backend::Symbolic => "symbolic",
            Backend::Ensemble => "ensemble",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "fuzz" => Backend::Fuzz,
            "exhaustive" => Backend::Exhaustive,
            "symbolic" => Backend::Symbolic,
            "ensemble" => Backend::Ensemble,
            other => {
                return Err(format!(
                    "unknown backend `{other}` (expected fuzz, exhaustive, symbolic or ensemble)"
                ))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub backend: Backend,
    pub seed: u64,
    pub cases: u64,
    pub budget: u64,
    pub timeout_ms: u64,
    pub repetition_cap: u32,
    pub filter: Option<String>,
    pub code_fingerprint: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: Backend::Fuzz,
            seed: 0,
            cases: DEFAULT_CASES,
            budget: DEFAULT_BUDGET,
            timeout_ms: DEFAULT_TIMEOUT_MS,
            repetition_cap: DEFAULT_REPETITION_CAP,
            filter: None,
            code_fingerprint: "unknown".into(),
        }
    }
}

impl RunConfig {
    /// Name of the first count that is zero, if any.
    pub fn zero_count(&self) -> Option<&'static str> {
        [
            ("cases", self.cases),
            ("budget", self.budget),
            ("timeout_ms", self.timeout_ms),
            ("repetition_cap", u64::from(self.repetition_cap)),
        ]
        .into_iter()
        .find(|(_, v)| *v == 0)
        .map(|(k, _)| k)
    }

    /// Hash of the settings that can change a verdict: 16 hex digits of the
    /// SHA-256 of their canonical text. Selection and fingerprint are left out.
    pub fn config_hash(&self) -> String {
        let canonical = format!(
            "backend={};seed={};cases={};budget={};timeout_ms={};repetition_cap={}",
            self.backend, self.seed, self.cases, self.budget, self.timeout_ms, self.repetition_cap
        );
        let digest = Sha256::digest(canonical.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_ms)
    }
}

/// Wall-clock deadline plus an optional shared stop flag.
#[derive(Clone, Debug, Default)]
pub struct Deadline {
    end: Option<Instant>,
    stop: Option<Arc<AtomicBool>>,
}

impl Deadline {
    pub fn at(end: Instant) -> Self {
        Deadline {
            end: Some(end),
            stop: None,
        }
    }

    pub fn after(d: Duration) -> Self {
        Self::at(Instant::now() + d)
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn with_stop(mut self, stop: Arc<AtomicBool>) -> Self {
        self.stop = Some(stop);
        self
    }
}

impl Interrupt for Deadline {
    fn poll(&self) -> Option<Halt> {
        if self
            .stop
            .as_ref()
            .is_some_and(|s| s.load(Ordering::Relaxed))
        {
            return Some(Halt::Cancelled);
        }
        match self.end {
            Some(end) if Instant::now() >= end => Some(Halt::Timeout),
            _ => None,
        }
    }
}

/// One way of checking a property.
pub trait Checker: Send + Sync {
    fn id(&self) -> &str;
    fn check(&self, prop: &Property, cfg: &RunConfig, interrupt: &dyn Interrupt) -> Verdict;
}

pub struct FuzzChecker;
pub struct ExhaustiveChecker;
pub struct SymbolicChecker;

impl Checker for FuzzChecker {
    fn id(&self) -> &str {
        "fuzz"
    }

    fn check(&self, prop: &Property, cfg: &RunConfig, interrupt: &dyn Interrupt) -> Verdict {
        let fc = FuzzConfig {
            cases: cfg.cases,
            seed: cfg.seed,
        };
        run_fuzz(prop, &fc, interrupt)
    }
}

impl Checker for ExhaustiveChecker {
    fn id(&self) -> &str {
        "exhaustive"
    }

    fn check(&self, prop: &Property, cfg: &RunConfig, interrupt: &dyn Interrupt) -> Verdict {
        run_exhaustive(prop, &ExhaustiveConfig { budget: cfg.budget }, interrupt)
    }
}

impl Checker for SymbolicChecker {
    fn id(&self) -> &str {
        "symbolic"
    }

    fn check(&self, prop: &Property, cfg: &RunConfig, interrupt: &dyn Interrupt) -> Verdict {
        let sc = SymbolicConfig {
            solver: SolverConfig {
                seed: cfg.seed,
                ..SolverConfig::default()
            },
        };
        run_symbolic(prop, &sc, interrupt)
    }
}

/// Ensemble members in the default order: cheapest proof attempt first.
pub fn default_ensemble() -> [&'static dyn Checker; 3] {
    [&SymbolicChecker, &ExhaustiveChecker, &FuzzChecker]
}

pub fn checker(backend: Backend) -> Option<&'static dyn Checker> {
    match backend {
        Backend::Fuzz => Some(&FuzzChecker),
        Backend::Exhaustive => Some(&ExhaustiveChecker),
        Backend::Symbolic => Some(&SymbolicChecker),
        Backend::Ensemble => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("inconsistent backends on `{property}`: {proved} proved it but {falsified} falsified it")]
pub struct InconsistentBackends {
    pub property: String,
    pub proved: String,
    pub falsified: String,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Inconsistent(#[from] InconsistentBackends),
}

/// Run one checker, turning a panic outside the predicate into Unknown.
fn guarded_check(
    c: &dyn Checker,
    prop: &Property,
    cfg: &RunConfig,
    interrupt: &dyn Interrupt,
) -> Verdict {
    guard::catch(|| c.check(prop, cfg, interrupt)).unwrap_or_else(|msg| {
        Verdict::unknown(
            UnknownReason::Unsupported,
            format!("{} panicked: {msg}", c.id()),
            None,
        )
    })
}

#[derive(Clone, Debug)]
pub struct EnsembleOutcome {
    /// Id of the backend whose verdict was taken.
    pub backend: String,
    pub verdict: Verdict,
    /// Every backend's verdict, in completion order.
    pub all: Vec<(String, Verdict)>,
}

fn pick_indefinite(all: &[(String, Verdict)], order: &[&dyn Checker]) -> usize {
    let rank = |i: usize| {
        let id = &all[i].0;
        let pos = order
            .iter()
            .position(|c| c.id() == id)
            .unwrap_or(usize::MAX);
        match &all[i].1 {
            Verdict::PassSampled { .. } => (0, 0, pos),
            v => (1, 4 - v.reason().map_or(0, |r| r.informativeness()), pos),
        }
    };
    (0..all.len())
        .min_by_key(|&i| rank(i))
        .expect("ensemble ran at least one backend")
}

/// Race `checkers` on `prop`. The first definitive verdict wins and the
/// others are told to stop. Completed definitive verdicts are then
/// cross-checked for agreement.
pub fn run_ensemble(
    prop: &Property,
    checkers: &[&dyn Checker],
    cfg: &RunConfig,
    deadline: Option<Instant>,
) -> Result<EnsembleOutcome, InconsistentBackends> {
    run_ensemble_with_stop(
        prop,
        checkers,
        cfg,
        deadline,
        Arc::new(AtomicBool::new(false)),
    )
}

/// As [`run_ensemble`], with a caller-owned stop flag.
pub fn run_ensemble_with_stop(
    prop: &Property,
    checkers: &[&dyn Checker],
    cfg: &RunConfig,
    deadline: Option<Instant>,
    stop: Arc<AtomicBool>,
) -> Result<EnsembleOutcome, InconsistentBackends> {
    assert!(
        checkers.len() >= 2,
        "an ensemble needs at least two backends"
    );
    let (tx, rx) = mpsc::channel();
    let all: Vec<(String, Verdict)> = thread::scope(|s| {
        for &c in checkers {
            let tx = tx.clone();
            let stop = Arc::clone(&stop);
            s.spawn(move || {
                let d = Deadline {
                    end: deadline,
                    stop: Some(Arc::clone(&stop)),
                };
                let v = guarded_check(c, prop, cfg, &d);
                if v.is_definitive() {
                    stop.store(true, Ordering::Relaxed);
                }
                let _ = tx.send((c.id().to_string(), v));
            });
        }
        drop(tx);
        rx.iter().collect()
    });

    let proved = all
        .iter()
        .find(|(_, v)| matches!(v, Verdict::Proved { .. }));
    let falsified = all.iter().find(|(_, v)| matches!(v, Verdict::Falsified(_)));
    if let (Some((p, _)), Some((f, _))) = (proved, falsified) {
        return Err(InconsistentBackends {
            property: prop.name().to_string(),
            proved: p.clone(),
            falsified: f.clone(),
        });
    }
    let winner = all
        .iter()
        .position(|(_, v)| v.is_definitive())
        .unwrap_or_else(|| pick_indefinite(&all, checkers));
    Ok(EnsembleOutcome {
        backend: all[winner].0.clone(),
        verdict: all[winner].1.clone(),
        all,
    })
}

/// Apply the run-wide settings that live on the strategy.
fn prepare(prop: &Property, cfg: &RunConfig) -> Property {
    if cfg.repetition_cap == DEFAULT_REPETITION_CAP {
        prop.clone()
    } else {
        prop.clone()
            .with_strategy(prop.strategy().with_repetition_cap(cfg.repetition_cap))
    }
}

/// Check one property under `cfg` with its own deadline.
pub fn check_property(prop: &Property, cfg: &RunConfig) -> Result<Entry, InconsistentBackends> {
    let prop = prepare(prop, cfg);
    let start = Instant::now();
    let end = start + cfg.timeout();
    let (backend, verdict) = match checker(cfg.backend) {
        Some(c) => (
            c.id().to_string(),
            guarded_check(c, &prop, cfg, &Deadline::at(end)),
        ),
        None => {
            let out = run_ensemble(&prop, &default_ensemble(), cfg, Some(end))?;
            (out.backend, out.verdict)
        }
    };
    Ok(Entry {
        name: prop.name().to_string(),
        backend,
        verdict,
        duration_ms: u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX),
        waived: false,
        waiver_reason: None,
    })
}

fn workers(n: usize) -> usize {
    thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(n)
        .max(1)
}

/// Run every selected property. Properties run concurrently; entries come
/// back ordered by name. Waivers are applied by the caller.
pub fn run_suite(
    registry: &Registry,
    cfg: &RunConfig,
    run_id: String,
    timestamp: String,
) -> Result<RunReport, RunError> {
    let selected = registry.select(cfg.filter.as_deref())?;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Result<Entry, InconsistentBackends>>> = Mutex::new(Vec::new());
    thread::scope(|s| {
        for _ in 0..workers(selected.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(prop) = selected.get(i) else { break };
                let r = check_property(prop, cfg);
                results
                    .lock()
                    .expect("no worker panics holding the lock")
                    .push(r);
            });
        }
    });
    let mut entries = results
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(RunReport {
        run_id,
        timestamp,
        config: cfg.clone(),
        entries,
        stale_waivers: Vec::new(),
        unused_waivers: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use propbridge_core::{just, u32_range, Bool, Method};

    struct Fixed(&'static str, Verdict);

    impl Checker for Fixed {
        fn id(&self) -> &str {
            self.0
        }

        fn check(&self, _: &Property, _: &RunConfig, _: &dyn Interrupt) -> Verdict {
            self.1.clone()
        }
    }

    fn trivial() -> Property {
        Property::new("t", just(0i64), |_| Ok(Bool::Lit(true))).unwrap()
    }

    #[test]
    fn config_hash_is_stable_and_sensitive() {
        let a = RunConfig::default();
        assert_eq!(a.config_hash().len(), 16);
        assert_eq!(a.config_hash(), RunConfig::default().config_hash());
        let b = RunConfig {
            seed: 1,
            ..RunConfig::default()
        };
        assert_ne!(a.config_hash(), b.config_hash());
        let c = RunConfig {
            filter: Some("x*".into()),
            code_fingerprint: "abc".into(),
            ..RunConfig::default()
        };
        assert_eq!(a.config_hash(), c.config_hash());
    }

    #[test]
    fn indefinite_preference() {
        let pass = Fixed("a", Verdict::PassSampled { cases: 3 });
        let und = Fixed("b", Verdict::unknown(UnknownReason::Undecided, "", None));
        let out = run_ensemble(&trivial(), &[&und, &pass], &RunConfig::default(), None).unwrap();
        assert_eq!(out.backend, "a");

        let tmo = Fixed("c", Verdict::unknown(UnknownReason::Timeout, "", None));
        let uns = Fixed("d", Verdict::unknown(UnknownReason::Unsupported, "", None));
        let bud = Fixed(
            "e",
            Verdict::unknown(UnknownReason::BudgetExceeded, "", None),
        );
        let out =
            run_ensemble(&trivial(), &[&uns, &tmo, &bud], &RunConfig::default(), None).unwrap();
        assert_eq!(out.backend, "e");
        let out =
            run_ensemble(&trivial(), &[&uns, &und, &bud], &RunConfig::default(), None).unwrap();
        assert_eq!(out.backend, "b");
        let out = run_ensemble(&trivial(), &[&uns, &tmo], &RunConfig::default(), None).unwrap();
        assert_eq!(out.backend, "c");
    }

    #[test]
    fn proved_beats_pass_sampled() {
        let p = Property::new("small", u32_range(0, 9).unwrap(), |t| Ok(t.int()?.lt(10))).unwrap();
        let out = run_ensemble(
            &p,
            &[&FuzzChecker, &ExhaustiveChecker],
            &RunConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!(
            out.verdict,
            Verdict::Proved {
                method: Method::Exhaustive,
                count: 10,
                vacuous: false
            }
        );
    }

    #[test]
    fn deadline_polls_stop_flag_first() {
        let stop = Arc::new(AtomicBool::new(false));
        let d = Deadline::none().with_stop(Arc::clone(&stop));
        assert_eq!(d.poll(), None);
        stop.store(true, Ordering::Relaxed);
        assert_eq!(d.poll(), Some(Halt::Cancelled));
        assert_eq!(Deadline::after(Duration::ZERO).poll(), Some(Halt::Timeout));
    }
}
