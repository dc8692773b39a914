//! Proof by complete enumeration of a finite domain.

use alloc::boxed::Box;
use alloc::format;

use crate::enumerate::trees;
use crate::fuzz::{generation_failure, shrink_failure};
use crate::interrupt::{Halt, Interrupt, POLL_INTERVAL};
use crate::property::{Evaluation, Property};
use crate::strategy::{base_cardinality, cardinality, Cardinality, StrategyError};
use crate::tree::ValueTree;
use crate::verdict::{Counterexample, Method, UnknownReason, Verdict};

pub const DEFAULT_BUDGET: u64 = 1 << 20;

/// Base-domain items a filtered strategy may traverse, per unit of budget.
pub const FILTER_TRAVERSAL_FACTOR: u64 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExhaustiveConfig {
    /// Maximum predicate evaluations.
    pub budget: u64,
}

impl Default for ExhaustiveConfig {
    fn default() -> Self {
        ExhaustiveConfig {
            budget: DEFAULT_BUDGET,
        }
    }
}

fn over_budget(card: Cardinality, budget: u64) -> Verdict {
    let detail = match card {
        Cardinality::Finite(n) => format!("domain has {n} values, budget is {budget}"),
        Cardinality::TooLarge => format!("domain exceeds 2^63 values, budget is {budget}"),
        Cardinality::Unknown => format!("domain size unknown, budget is {budget}"),
    };
    Verdict::unknown(UnknownReason::BudgetExceeded, detail, card.finite())
}

pub fn run_exhaustive(
    prop: &Property,
    cfg: &ExhaustiveConfig,
    interrupt: &dyn Interrupt,
) -> Verdict {
    let budget = cfg.budget.max(1);
    let s = prop.strategy();
    if s.has_filter() {
        let base = base_cardinality(s);
        match base.finite() {
            Some(n) if n <= budget.saturating_mul(FILTER_TRAVERSAL_FACTOR) => {}
            _ => return over_budget(base, budget),
        }
    } else {
        let card = cardinality(s);
        match card.finite() {
            Some(n) if n <= budget => {}
            _ => return over_budget(card, budget),
        }
    }
    check_all(prop, trees(s), budget, interrupt)
}

/// Evaluate the predicate on every tree of `items`, in order. Exposed so
/// callers can drive the check with a different enumeration order.
pub fn check_all<I>(prop: &Property, items: I, budget: u64, interrupt: &dyn Interrupt) -> Verdict
where
    I: IntoIterator<Item = Result<ValueTree, StrategyError>>,
{
    let mut evaluated: u64 = 0;
    for item in items {
        if evaluated.is_multiple_of(POLL_INTERVAL) {
            if let Some(h) = interrupt.poll() {
                let detail = match h {
                    Halt::Timeout => "deadline exceeded",
                    Halt::Cancelled => "cancelled",
                };
                return Verdict::unknown(UnknownReason::Timeout, detail, Some(evaluated));
            }
        }
        let tree = match item {
            Ok(t) => t,
            Err(StrategyError::NotEnumerable) => {
                return over_budget(Cardinality::TooLarge, budget);
            }
            Err(e) => return generation_failure(e),
        };
        if evaluated == budget {
            return Verdict::unknown(
                UnknownReason::BudgetExceeded,
                format!("more than {budget} accepted values"),
                None,
            );
        }
        let index = evaluated;
        evaluated += 1;
        if let Evaluation::Fail(msg) = prop.evaluate(tree.current()) {
            let original = tree.current().clone();
            let shrunk = shrink_failure(prop, tree, msg, interrupt);
            return Verdict::Falsified(Box::new(Counterexample {
                original,
                shrunk: shrunk.value,
                seed: None,
                case_index: Some(index),
                message: shrunk.message,
                shrink_incomplete: !shrunk.complete,
            }));
        }
    }
    Verdict::Proved {
        method: Method::Exhaustive,
        count: evaluated,
        vacuous: evaluated == 0,
    }
}
