//! Acceptance suite. Prints one PASS or FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{cli, normalized, path_arg};
use propbridge::corpus::{self, PATTERNS};
use propbridge::history::update_history;
use propbridge::report::{Entry, RunReport};
use propbridge::runner::{
    check_property, default_ensemble, run_ensemble, Backend, Checker, RunConfig, SymbolicChecker,
};
use propbridge_core::interval::{concrete_eval, concrete_truth, interval_eval, truth_eval, Truth3};
use propbridge_core::pattern::parse_pattern;
use propbridge_core::solver::{solve, SolveOutcome, SolverConfig};
use propbridge_core::symbolize::{symbolize, SymContext};
use propbridge_core::{
    cardinality, enumerate, generate, i64_range, pattern_strategy, run_fuzz, tuple_of, Bool,
    FuzzConfig, Gen, Interrupt, Method, Never, PrngState, Property, Strategy, UnknownReason, Value,
    Verdict, VerdictKind,
};
use propbridge_oracles::exprgen;
use propbridge_oracles::matcher::full_match;
use propbridge_oracles::{brute, splitmix};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn config(backend: Backend, seed: u64) -> RunConfig {
    RunConfig {
        backend,
        seed,
        ..RunConfig::default()
    }
}

fn verdict(p: &Property, backend: Backend, seed: u64) -> Verdict {
    check_property(p, &config(backend, seed))
        .expect("single backend")
        .verdict
}

fn pair(a: i128, b: i128) -> Value {
    Value::Tuple(vec![Value::Int(a), Value::Int(b)])
}

fn golden_harness() -> Outcome {
    let registry = corpus::registry();
    let p = registry
        .get("multiply")
        .ok_or("multiply is not registered")?;

    let fuzz = verdict(p, Backend::Fuzz, 42);
    ensure!(
        fuzz == Verdict::PassSampled { cases: 256 },
        "fuzz gave {fuzz}"
    );

    let start = Instant::now();
    let ex = verdict(p, Backend::Exhaustive, 0);
    let ex_time = start.elapsed();
    let want = Verdict::Proved {
        method: Method::Exhaustive,
        count: 1_000_000,
        vacuous: false,
    };
    ensure!(ex == want, "exhaustive gave {ex}");
    ensure!(
        ex_time <= Duration::from_secs(60),
        "exhaustive took {ex_time:?}"
    );

    let start = Instant::now();
    let sym = verdict(p, Backend::Symbolic, 0);
    let sym_time = start.elapsed();
    ensure!(
        matches!(
            sym,
            Verdict::Proved {
                method: Method::Symbolic,
                vacuous: false,
                ..
            }
        ),
        "symbolic gave {sym}"
    );
    ensure!(
        sym_time <= Duration::from_secs(1),
        "symbolic took {sym_time:?}"
    );

    let cases = symbolize(p.strategy(), &mut SymContext::new()).map_err(|u| u.0)?;
    ensure!(cases.len() == 1, "{} symbolic cases", cases.len());
    let case = &cases[0];
    let Ok(Bool::Sym(goal)) = p.apply(&case.term) else {
        return Err("predicate did not stay symbolic".into());
    };
    let out = solve(
        &goal,
        &case.hypothesis(),
        &case.region,
        &SolverConfig::default(),
        &Never,
    );
    ensure!(
        matches!(
            out,
            SolveOutcome::Proved {
                splits: 0,
                vacuous: false,
                ..
            }
        ),
        "solver gave {out:?}"
    );
    Ok(format!(
        "fuzz {fuzz}; exhaustive {ex} in {:.2}s; symbolic {sym}, 0 splits, in {:.1}ms",
        ex_time.as_secs_f64(),
        sym_time.as_secs_f64() * 1e3
    ))
}

fn mutated_harness() -> Outcome {
    let p = corpus::multiply_mutated();
    let mut failing = Vec::new();
    for a in 1..=1000i128 {
        for b in 1..=1000i128 {
            if a * b >= 1_000_000 {
                failing.push((a, b));
            }
        }
    }
    ensure!(failing == [(1000, 1000)], "brute force found {failing:?}");
    for backend in [Backend::Exhaustive, Backend::Symbolic] {
        let v = verdict(&p, backend, 0);
        let c = v
            .counterexample()
            .ok_or_else(|| format!("{backend} gave {v}"))?;
        ensure!(
            c.shrunk == pair(1000, 1000),
            "{backend} shrunk to {}",
            c.shrunk
        );
    }
    for seed in [0, 42] {
        let v = verdict(&p, Backend::Fuzz, seed);
        ensure!(
            v == Verdict::PassSampled { cases: 256 },
            "fuzz seed {seed} gave {v}"
        );
    }
    Ok("exhaustive and symbolic find (1000, 1000), the unique failure; fuzz misses it".into())
}

/// Claims every property proved.
struct LyingProver;

impl Checker for LyingProver {
    fn id(&self) -> &str {
        "lying"
    }

    fn check(&self, _: &Property, _: &RunConfig, _: &dyn Interrupt) -> Verdict {
        std::thread::sleep(Duration::from_millis(20));
        Verdict::Proved {
            method: Method::Exhaustive,
            count: 1,
            vacuous: false,
        }
    }
}

fn backend_agreement() -> Outcome {
    let props = corpus::properties();
    ensure!(props.len() >= 20, "corpus has {} properties", props.len());
    let mut kinds_seen = BTreeSet::new();
    for p in &props {
        let mut verdicts = vec![
            ("exhaustive".to_string(), verdict(p, Backend::Exhaustive, 0)),
            ("symbolic".to_string(), verdict(p, Backend::Symbolic, 0)),
        ];
        for seed in [0, 1, 42] {
            verdicts.push((format!("fuzz/{seed}"), verdict(p, Backend::Fuzz, seed)));
        }
        let proved: Vec<_> = verdicts
            .iter()
            .filter(|(_, v)| v.kind() == VerdictKind::Proved)
            .collect();
        let falsified: Vec<_> = verdicts
            .iter()
            .filter(|(_, v)| v.kind() == VerdictKind::Falsified)
            .collect();
        ensure!(
            proved.is_empty() || falsified.is_empty(),
            "{}: proved by {} but falsified by {}",
            p.name(),
            proved[0].0,
            falsified[0].0
        );
        for (_, v) in &verdicts {
            kinds_seen.insert(match v {
                Verdict::Unknown {
                    reason: UnknownReason::Unsupported,
                    ..
                } => "unsupported",
                v => v.kind().as_str(),
            });
        }
        run_ensemble(p, &default_ensemble(), &config(Backend::Ensemble, 0), None)
            .map_err(|e| format!("ensemble on a correct corpus: {e}"))?;
    }
    for k in ["proved", "falsified", "unsupported"] {
        ensure!(kinds_seen.contains(k), "corpus has no {k} verdicts");
    }
    let fixture = corpus::multiply_mutated();
    let caught = run_ensemble(
        &fixture,
        &[&LyingProver, &SymbolicChecker],
        &RunConfig::default(),
        None,
    );
    ensure!(
        caught.is_err(),
        "injected bug went unnoticed: {:?}",
        caught.map(|o| o.verdict)
    );
    Ok(format!(
        "{} properties x 5 runs agree; ensemble clean on corpus; injected bug caught",
        props.len()
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut strategies: Vec<(String, Strategy)> = corpus::properties()
        .iter()
        .map(|p| (p.name().to_string(), p.strategy().clone()))
        .collect();
    for pat in PATTERNS {
        strategies.push((format!("pattern {pat}"), pattern_strategy(pat).unwrap()));
    }
    let mut checked = 0;
    for (name, s) in &strategies {
        if s.has_filter() {
            continue;
        }
        let Some(n) = cardinality(s).finite().filter(|&n| n <= 10_000) else {
            continue;
        };
        let listed: Vec<Value> = enumerate(s, None)
            .map_err(|e| format!("{name}: {e}"))?
            .collect::<Result<_, _>>()
            .map_err(|e| format!("{name}: {e}"))?;
        ensure!(
            listed.len() as u64 == n,
            "{name}: {} values, cardinality {n}",
            listed.len()
        );
        let want: BTreeSet<Value> = brute::values(s).into_iter().collect();
        let got: BTreeSet<Value> = listed.into_iter().collect();
        ensure!(got == want, "{name}: enumeration and brute force differ");
        checked += 1;
    }
    ensure!(checked >= 10, "only {checked} strategies were small enough");
    Ok(format!(
        "{checked} filter-free strategies match the brute-force oracle"
    ))
}

fn interval_soundness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2024);
    let (mut evaluated, mut refused, mut definite) = (0u64, 0u64, 0u64);
    for i in 0..100_000 {
        let vars = rng.random_range(1..=3);
        let e = exprgen::expr(&mut rng, 6, vars);
        let b = exprgen::random_box(&mut rng, vars);
        match interval_eval(&e, &b) {
            Ok(iv) => {
                evaluated += 1;
                let mut points: Vec<_> = (0..4)
                    .map(|_| exprgen::random_point(&mut rng, &b))
                    .collect();
                points.push(exprgen::corner(&b, false));
                points.push(exprgen::corner(&b, true));
                for pt in &points {
                    match concrete_eval(&e, pt) {
                        Ok(v) => ensure!(iv.contains(&v), "expression {i}: {v} outside {iv}"),
                        Err(err) => {
                            return Err(format!("expression {i}: {err} inside accepted box"))
                        }
                    }
                }
            }
            Err(_) => refused += 1,
        }

        let p = exprgen::predicate(&mut rng, 3, vars);
        let want = match truth_eval(&p, &b) {
            Ok(Truth3::True) => true,
            Ok(Truth3::False) => false,
            _ => continue,
        };
        definite += 1;
        for _ in 0..100 {
            let pt = exprgen::random_point(&mut rng, &b);
            if let Ok(got) = concrete_truth(&p, &pt) {
                ensure!(
                    got == want,
                    "predicate {i}: interval said {want}, point says {got}"
                );
            }
        }
    }
    Ok(format!(
        "100000 expressions: {evaluated} enclosed, {refused} refused (divisor may be zero); \
         {definite} definite predicates agree on 100 samples each"
    ))
}

fn determinism_and_replay() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut replayed = 0;
    for (backend, seed) in [
        ("fuzz", 0),
        ("fuzz", 7),
        ("fuzz", 42),
        ("exhaustive", 0),
        ("symbolic", 0),
    ] {
        let mut docs = Vec::new();
        let mut raw = String::new();
        for run in 0..2 {
            let report = dir.path().join(format!("{backend}-{seed}-{run}.json"));
            let b = format!("--backend={backend}");
            let s = format!("--seed={seed}");
            let o = cli(&["run", &b, &s, &path_arg("report", &report)]);
            ensure!(o.code != 3, "run failed: {}", o.stderr);
            raw = fs::read_to_string(&report).map_err(|e| e.to_string())?;
            docs.push(normalized(&raw));
        }
        ensure!(docs[0] == docs[1], "{backend} seed {seed}: reports differ");

        let v: serde_json::Value = serde_json::from_str(&raw).unwrap();
        for r in v["results"].as_array().unwrap() {
            let cx = &r["counterexample"];
            let Some(seed) = cx["seed"].as_u64() else {
                continue;
            };
            let name = r["name"].as_str().unwrap();
            let o = cli(&[
                "replay",
                &format!("--property={name}"),
                &format!("--seed={seed}"),
            ]);
            let line = format!("shrunk: {}", cx["shrunk"].as_str().unwrap());
            ensure!(
                o.stdout.lines().any(|l| l == line),
                "replay of {name} seed {seed} printed {:?}, expected {line:?}",
                o.stdout
            );
            replayed += 1;
        }
    }
    ensure!(replayed > 0, "no seeded falsification to replay");
    Ok(format!(
        "5 report pairs identical after normalisation; {replayed} replays byte-identical"
    ))
}

fn shrink_minimality() -> Outcome {
    let mut rng = StdRng::seed_from_u64(77);
    for i in 0..50u64 {
        let lo = rng.random_range(-1000i64..=1000);
        let (prop, lows) = if i % 2 == 0 {
            let hi = lo + rng.random_range(10i64..=3000);
            let t = lo + rng.random_range(0..=(hi - lo) * 9 / 10);
            let p = Property::new(format!("t{i}"), i64_range(lo, hi).unwrap(), move |x| {
                Ok(x.int()?.lt(t))
            })
            .unwrap();
            (p, vec![lo as i128])
        } else {
            let hi = lo + rng.random_range(10i64..=60);
            let (t1, t2) = (rng.random_range(lo..=hi - 5), rng.random_range(lo..=hi - 5));
            let s = tuple_of(vec![i64_range(lo, hi).unwrap(), i64_range(lo, hi).unwrap()]);
            let p = Property::new(format!("t{i}"), s, move |x| {
                Ok(x.int_at(0)?.lt(t1) | x.int_at(1)?.lt(t2))
            })
            .unwrap();
            (p, vec![lo as i128, lo as i128])
        };
        let complexity = |v: &Value| -> i128 {
            match v {
                Value::Int(x) => x - lows[0],
                Value::Tuple(items) => items
                    .iter()
                    .zip(&lows)
                    .map(|(x, l)| x.as_int().unwrap() - l)
                    .sum(),
                _ => unreachable!(),
            }
        };
        let minimum = brute::values(prop.strategy())
            .into_iter()
            .filter(|v| prop.evaluate(v).failed())
            .min_by_key(|v| complexity(v))
            .ok_or("no failing value")?;
        let v = run_fuzz(
            &prop,
            &FuzzConfig {
                cases: 1000,
                seed: i,
            },
            &Never,
        );
        let c = v
            .counterexample()
            .ok_or_else(|| format!("threshold {i}: {v}"))?;
        ensure!(
            c.shrunk == minimum,
            "threshold {i}: shrunk to {}, minimum is {minimum}",
            c.shrunk
        );
    }
    Ok("50 thresholds shrink to the brute-force minimum".into())
}

fn prng_conformance() -> Outcome {
    let mut r = PrngState::new(0);
    let first = [r.next_u64(), r.next_u64()];
    ensure!(first == splitmix::SEED_ZERO, "seed 0 gave {first:x?}");
    for seed in [0, 1, 42, u64::MAX] {
        let mut r = PrngState::new(seed);
        let ours: Vec<u64> = (0..10_000).map(|_| r.next_u64()).collect();
        ensure!(
            ours == splitmix::sequence(seed, 10_000),
            "seed {seed} diverges from reference"
        );
    }
    Ok(format!(
        "seed 0 -> {:#018x}, {:#018x}; 4 seeds x 10000 outputs match",
        first[0], first[1]
    ))
}

fn report_with(seed: u64, run_id: &str, multiply: Verdict) -> RunReport {
    let entry = |name: &str, verdict: Verdict| Entry {
        name: name.into(),
        backend: "symbolic".into(),
        verdict,
        duration_ms: 1,
        waived: false,
        waiver_reason: None,
    };
    let proved = Verdict::Proved {
        method: Method::Symbolic,
        count: 1,
        vacuous: false,
    };
    RunReport {
        run_id: run_id.into(),
        timestamp: "2026-10-15T00:00:00Z".into(),
        config: RunConfig {
            backend: Backend::Symbolic,
            seed,
            code_fingerprint: "fixed".into(),
            ..RunConfig::default()
        },
        entries: vec![entry("multiply", multiply), entry("square_nonneg", proved)],
        stale_waivers: vec![],
        unused_waivers: vec![],
    }
}

fn flakiness_tracking() -> Outcome {
    let proved = Verdict::Proved {
        method: Method::Symbolic,
        count: 1,
        vacuous: false,
    };
    let timeout = Verdict::unknown(UnknownReason::Timeout, "deadline exceeded", None);
    let script = [proved.clone(), timeout, proved];

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let same = dir.path().join("same.jsonl");
    let mut flags = Vec::new();
    for (i, v) in script.iter().enumerate() {
        let u = update_history(&same, &report_with(0, &format!("run{i}"), v.clone()))
            .map_err(|e| e.to_string())?;
        flags.push(u.flaky);
    }
    ensure!(flags[0].is_empty(), "first run flagged {:?}", flags[0]);
    ensure!(flags[2] == ["multiply"], "third run flagged {:?}", flags[2]);

    let varied = dir.path().join("varied.jsonl");
    for (i, v) in script.iter().enumerate() {
        let u = update_history(
            &varied,
            &report_with(i as u64, &format!("run{i}"), v.clone()),
        )
        .map_err(|e| e.to_string())?;
        ensure!(
            u.flaky.is_empty(),
            "distinct config hashes flagged {:?}",
            u.flaky
        );
    }
    Ok("exactly `multiply` flagged; distinct config hashes flag nothing".into())
}

fn pattern_strategy_check() -> Outcome {
    let s = pattern_strategy("[ab]{2}").unwrap();
    let got: BTreeSet<String> = enumerate(&s, None)
        .unwrap()
        .map(|v| v.unwrap().as_str().unwrap().to_string())
        .collect();
    let want: BTreeSet<String> = ["aa", "ab", "ba", "bb"].map(String::from).into();
    ensure!(got == want, "[ab]{{2}} enumerated {got:?}");

    let mut checked = 0;
    for pat in PATTERNS {
        let ast = parse_pattern(pat).map_err(|e| format!("{pat}: {e}"))?;
        let s = pattern_strategy(pat).unwrap();
        let mut gen = Gen::new(checked as u64);
        for _ in 0..500 {
            let v = generate(&s, &mut gen)
                .map_err(|e| e.to_string())?
                .into_current();
            let text = v.as_str().ok_or("non-string value")?;
            ensure!(
                full_match(&ast, text),
                "{pat} generated {text:?}, which does not match"
            );
            checked += 1;
        }
    }
    Ok(format!(
        "[ab]{{2}} = {{aa, ab, ba, bb}}; {checked} generated strings match their pattern"
    ))
}

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let criteria: [Criterion; 10] = [
        (
            "golden harness: three backends, three verdicts",
            golden_harness,
        ),
        ("mutated harness: (1000, 1000)", mutated_harness),
        ("backend agreement", backend_agreement),
        ("enumeration matches brute force", oracle_equivalence),
        ("interval soundness", interval_soundness),
        ("determinism and replay", determinism_and_replay),
        ("shrink minimality", shrink_minimality),
        ("SplitMix64 conformance", prng_conformance),
        ("flakiness tracking", flakiness_tracking),
        ("pattern strategy", pattern_strategy_check),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
