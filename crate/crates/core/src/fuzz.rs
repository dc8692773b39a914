//! Random sampling with greedy shrinking.

use alloc::boxed::Box;
use alloc::string::{String, ToString};

use crate::interrupt::{Halt, Interrupt};
use crate::property::{Evaluation, Property};
use crate::strategy::StrategyError;
use crate::tree::{generate, Gen, ValueTree};
use crate::value::Value;
use crate::verdict::{Counterexample, UnknownReason, Verdict};

pub const DEFAULT_CASES: u64 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub cases: u64,
    pub seed: u64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            cases: DEFAULT_CASES,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shrunk {
    pub value: Value,
    pub message: String,
    /// Accepted shrink steps.
    pub steps: u64,
    pub evaluations: u64,
    /// False when the deadline cut the descent short.
    pub complete: bool,
}

/// Greedy descent: move to the first candidate that still fails, until no
/// candidate does. `message` is the failure message of `failing`.
pub fn shrink_failure(
    prop: &Property,
    failing: ValueTree,
    message: String,
    interrupt: &dyn Interrupt,
) -> Shrunk {
    let mut best = failing;
    let mut best_msg = message;
    let mut steps = 0;
    let mut evaluations = 0;
    'descend: loop {
        for candidate in best.candidates() {
            if interrupt.poll().is_some() {
                return Shrunk {
                    value: best.into_current(),
                    message: best_msg,
                    steps,
                    evaluations,
                    complete: false,
                };
            }
            evaluations += 1;
            if let Evaluation::Fail(msg) = prop.evaluate(candidate.current()) {
                best = candidate;
                best_msg = msg;
                steps += 1;
                continue 'descend;
            }
        }
        break;
    }
    Shrunk {
        value: best.into_current(),
        message: best_msg,
        steps,
        evaluations,
        complete: true,
    }
}

fn halted(halt: Halt, completed: u64) -> Verdict {
    let detail = match halt {
        Halt::Timeout => "deadline exceeded",
        Halt::Cancelled => "cancelled",
    };
    Verdict::unknown(UnknownReason::Timeout, detail, Some(completed))
}

pub(crate) fn generation_failure(e: StrategyError) -> Verdict {
    match e {
        StrategyError::RejectionExhausted { label } => {
            Verdict::unknown(UnknownReason::FilterExhausted, label, None)
        }
        other => Verdict::unknown(UnknownReason::Unsupported, other.to_string(), None),
    }
}

/// Check `cfg.cases` independent draws. The verdict is a pure function of the
/// property, the seed, the case count and whether the deadline fired.
pub fn run_fuzz(prop: &Property, cfg: &FuzzConfig, interrupt: &dyn Interrupt) -> Verdict {
    let mut gen = Gen::for_run(cfg.seed, cfg.cases);
    for case in 0..cfg.cases {
        if let Some(h) = interrupt.poll() {
            return halted(h, case);
        }
        let tree = match generate(prop.strategy(), &mut gen) {
            Ok(t) => t,
            Err(e) => return generation_failure(e),
        };
        if let Evaluation::Fail(msg) = prop.evaluate(tree.current()) {
            let original = tree.current().clone();
            let shrunk = shrink_failure(prop, tree, msg, interrupt);
            return Verdict::Falsified(Box::new(Counterexample {
                original,
                shrunk: shrunk.value,
                seed: Some(cfg.seed),
                case_index: Some(case),
                message: shrunk.message,
                shrink_incomplete: !shrunk.complete,
            }));
        }
    }
    Verdict::PassSampled { cases: cfg.cases }
}
