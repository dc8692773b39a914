//! Racing backends: agreement checking, preference and cancellation.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use propbridge::corpus;
use propbridge::runner::{
    check_property, default_ensemble, run_ensemble, run_ensemble_with_stop, Backend, Checker,
    Deadline, ExhaustiveChecker, FuzzChecker, RunConfig, SymbolicChecker,
};
use propbridge_core::{
    run_exhaustive, run_fuzz, u32_range, ExhaustiveConfig, FuzzConfig, Interrupt, Method, Property,
    UnknownReason, Verdict,
};

/// Claims a proof after a pause, whatever the property and whatever the
/// stop flag says.
struct LyingProver;

impl Checker for LyingProver {
    fn id(&self) -> &str {
        "lying"
    }

    fn check(&self, _: &Property, _: &RunConfig, _: &dyn Interrupt) -> Verdict {
        thread::sleep(Duration::from_millis(50));
        Verdict::Proved {
            method: Method::Exhaustive,
            count: 1,
            vacuous: false,
        }
    }
}

#[test]
fn injected_bug_is_caught() {
    let prop = corpus::multiply_mutated();
    let cfg = RunConfig::default();
    for _ in 0..5 {
        let err = run_ensemble(&prop, &[&LyingProver, &SymbolicChecker], &cfg, None).unwrap_err();
        assert_eq!(err.property, "multiply_mutated");
        assert_eq!(err.proved, "lying");
        assert_eq!(err.falsified, "symbolic");
    }
}

#[test]
fn corpus_never_trips_the_agreement_check() {
    let cfg = RunConfig {
        backend: Backend::Ensemble,
        ..RunConfig::default()
    };
    for p in corpus::properties() {
        let out =
            run_ensemble(&p, &default_ensemble(), &cfg, None).unwrap_or_else(|e| panic!("{e}"));
        assert_eq!(out.all.len(), 3);
        assert!(check_property(&p, &cfg).is_ok());
    }
}

#[test]
fn proof_beats_sampling() {
    let cfg = RunConfig::default();
    let p = corpus::multiply();
    let out = run_ensemble(&p, &[&FuzzChecker, &ExhaustiveChecker], &cfg, None).unwrap();
    assert!(
        matches!(out.verdict, Verdict::Proved { .. }),
        "{}",
        out.verdict
    );
    assert_eq!(out.backend, "exhaustive");
}

#[test]
fn indefinite_results_prefer_sampling_then_informative_unknowns() {
    let cfg = RunConfig::default();
    // Too wide to enumerate, symbolic runs out of boxes, sampling passes.
    let p = corpus::properties()
        .into_iter()
        .find(|p| p.name() == "add_commutes")
        .unwrap();
    let out = run_ensemble(&p, &default_ensemble(), &cfg, None).unwrap();
    assert!(
        matches!(out.verdict, Verdict::PassSampled { .. }),
        "{}",
        out.verdict
    );

    // Without fuzz: Undecided outranks BudgetExceeded.
    let out = run_ensemble(&p, &[&ExhaustiveChecker, &SymbolicChecker], &cfg, None).unwrap();
    assert_eq!(
        out.verdict.reason(),
        Some(UnknownReason::Undecided),
        "{}",
        out.verdict
    );
}

/// Counts predicate evaluations made after `stop` was raised. The flag is
/// raised from inside the predicate after `trigger` evaluations.
fn counting_property(stop: Arc<AtomicBool>, trigger: u64) -> (Property, Arc<AtomicU64>) {
    let seen = Arc::new(AtomicU64::new(0));
    let late = Arc::new(AtomicU64::new(0));
    let late_out = Arc::clone(&late);
    let prop = Property::new("counting", u32_range(0, 999_999).unwrap(), move |t| {
        let x = t.int()?;
        if stop.load(Ordering::SeqCst) {
            late.fetch_add(1, Ordering::SeqCst);
        } else if seen.fetch_add(1, Ordering::SeqCst) + 1 == trigger {
            stop.store(true, Ordering::SeqCst);
        }
        Ok(x.ge(0))
    })
    .unwrap();
    (prop, late_out)
}

#[test]
fn exhaustive_stops_within_one_poll_interval() {
    for trigger in [1, 500, 1024, 1025, 5000] {
        let stop = Arc::new(AtomicBool::new(false));
        let (prop, late) = counting_property(Arc::clone(&stop), trigger);
        let d = Deadline::none().with_stop(Arc::clone(&stop));
        let v = run_exhaustive(&prop, &ExhaustiveConfig::default(), &d);
        assert_eq!(v.reason(), Some(UnknownReason::Timeout), "{v}");
        assert!(
            late.load(Ordering::SeqCst) <= 1024,
            "trigger {trigger}: {late:?}"
        );
    }
}

#[test]
fn fuzz_stops_within_one_case() {
    let stop = Arc::new(AtomicBool::new(false));
    let (prop, late) = counting_property(Arc::clone(&stop), 10);
    let d = Deadline::none().with_stop(Arc::clone(&stop));
    let v = run_fuzz(
        &prop,
        &FuzzConfig {
            cases: 256,
            seed: 0,
        },
        &d,
    );
    assert_eq!(v.reason(), Some(UnknownReason::Timeout), "{v}");
    assert!(late.load(Ordering::SeqCst) <= 1);
}

#[test]
fn external_cancellation_of_an_ensemble() {
    let stop = Arc::new(AtomicBool::new(false));
    let late = Arc::new(AtomicU64::new(0));
    let slow = Property::new("slow", u32_range(0, 999_999).unwrap(), {
        let stop = Arc::clone(&stop);
        let late = Arc::clone(&late);
        move |t| {
            if stop.load(Ordering::SeqCst) {
                late.fetch_add(1, Ordering::SeqCst);
            }
            thread::sleep(Duration::from_micros(20));
            Ok(t.int()?.ge(0))
        }
    })
    .unwrap();
    let flag = Arc::clone(&stop);
    let canceller = thread::spawn(move || {
        thread::sleep(Duration::from_millis(50));
        flag.store(true, Ordering::SeqCst);
    });
    let start = Instant::now();
    let cfg = RunConfig::default();
    let out = run_ensemble_with_stop(&slow, &[&ExhaustiveChecker, &FuzzChecker], &cfg, None, stop)
        .unwrap();
    canceller.join().unwrap();
    assert!(start.elapsed() < Duration::from_secs(5));
    assert!(!out.verdict.is_definitive(), "{}", out.verdict);
    // One poll interval for exhaustive plus at most one case for fuzz.
    assert!(late.load(Ordering::SeqCst) <= 1024 + 1, "{late:?}");
}

#[test]
fn deadline_yields_timeout() {
    let cfg = RunConfig {
        backend: Backend::Exhaustive,
        timeout_ms: 1,
        ..RunConfig::default()
    };
    let e = check_property(&corpus::multiply(), &cfg).unwrap();
    assert_eq!(
        e.verdict.reason(),
        Some(UnknownReason::Timeout),
        "{}",
        e.verdict
    );
}
