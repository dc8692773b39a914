//! Verification by running the predicate on symbolic inputs.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};

use crate::carrier::{Bool, Fault};
use crate::expr::SymBool;
use crate::interrupt::Interrupt;
use crate::interval::Valuation;
use crate::property::{Evaluation, Property};
use crate::solver::{solve, SolveOutcome, SolverConfig, UndecidedReason};
use crate::symbolize::{symbolize, SymContext, SymbolicCase};
use crate::value::Value;
use crate::verdict::{Counterexample, Method, UnknownReason, Verdict};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SymbolicConfig {
    pub solver: SolverConfig,
}

enum Goal {
    Assert(SymBool),
    /// The predicate faulted regardless of the symbolic inputs.
    Fault(Fault),
}

fn goal_of(prop: &Property, case: &SymbolicCase) -> Goal {
    match prop.apply(&case.term) {
        Ok(Bool::Lit(b)) => Goal::Assert(SymBool::Const(b)),
        Ok(Bool::Sym(s)) => Goal::Assert(s),
        Ok(Bool::Fault(f)) | Err(f) => Goal::Fault(f),
    }
}

/// Concrete input for `valuation`, if it really fails the predicate.
fn confirm(prop: &Property, case: &SymbolicCase, valuation: &Valuation) -> Option<(Value, String)> {
    let value = case.template.instantiate(valuation)?;
    match prop.evaluate(&value) {
        Evaluation::Fail(msg) => Some((value, msg)),
        Evaluation::Pass => None,
    }
}

fn falsified(value: Value, message: String) -> Verdict {
    Verdict::Falsified(Box::new(Counterexample {
        original: value.clone(),
        shrunk: value,
        seed: None,
        case_index: None,
        message,
        shrink_incomplete: false,
    }))
}

pub fn run_symbolic(prop: &Property, cfg: &SymbolicConfig, interrupt: &dyn Interrupt) -> Verdict {
    let cases = match symbolize(prop.strategy(), &mut SymContext::new()) {
        Ok(c) => c,
        Err(u) => return Verdict::unknown(UnknownReason::Unsupported, u.0, None),
    };
    let mut boxes = 0u64;
    let mut vacuous = true;
    let mut pending: Option<Verdict> = None;
    for case in &cases {
        let goal = match goal_of(prop, case) {
            Goal::Assert(g) => g,
            Goal::Fault(fault) => {
                // Confirm at the lowest corner before blaming the predicate.
                let corner: Valuation = {
                    let mut v = Valuation::new();
                    for (id, iv) in case.region.iter() {
                        v.insert(*id, iv.lo().clone());
                    }
                    v
                };
                if !matches!(fault, Fault::Unsupported(_)) {
                    if let Some((value, msg)) = confirm(prop, case, &corner) {
                        return falsified(value, msg);
                    }
                }
                pending.get_or_insert(Verdict::unknown(
                    UnknownReason::Unsupported,
                    fault.to_string(),
                    None,
                ));
                continue;
            }
        };
        let solver = SolverConfig {
            box_budget: cfg.solver.box_budget.saturating_sub(boxes).max(1),
            ..cfg.solver
        };
        let out = solve(&goal, &case.hypothesis(), &case.region, &solver, interrupt);
        boxes += out.boxes();
        match out {
            SolveOutcome::Proved { vacuous: v, .. } => vacuous &= v,
            SolveOutcome::Witness { valuation, .. } => match confirm(prop, case, &valuation) {
                Some((value, msg)) => return falsified(value, msg),
                None => {
                    pending.get_or_insert(Verdict::unknown(
                        UnknownReason::Undecided,
                        format!("solver witness {valuation} did not reproduce concretely"),
                        None,
                    ));
                }
            },
            SolveOutcome::Undecided { reason, .. } => {
                let verdict = match reason {
                    UndecidedReason::Budget => Verdict::unknown(
                        UnknownReason::Undecided,
                        format!("box budget of {} exhausted", cfg.solver.box_budget),
                        Some(boxes),
                    ),
                    UndecidedReason::Timeout => {
                        return Verdict::unknown(
                            UnknownReason::Timeout,
                            "deadline exceeded",
                            Some(boxes),
                        );
                    }
                    UndecidedReason::Unsupported(e) => {
                        Verdict::unknown(UnknownReason::Unsupported, e.to_string(), None)
                    }
                };
                pending.get_or_insert(verdict);
            }
        }
    }
    pending.unwrap_or(Verdict::Proved {
        method: Method::Symbolic,
        count: boxes,
        vacuous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::Int;
    use crate::interrupt::Never;
    use crate::strategy::{just, list_of, one_of, tuple_of, u32_range};
    use alloc::vec;

    fn multiply(bound: i64, strict: bool) -> Property {
        let s = tuple_of(vec![
            u32_range(1, 1000).unwrap(),
            u32_range(1, 1000).unwrap(),
        ]);
        Property::new("m", s, move |t| {
            let c = t.int_at(0)? * t.int_at(1)?;
            Ok(if strict {
                c.lt(bound)
            } else {
                c.ge(1) & c.le(bound)
            })
        })
        .unwrap()
    }

    #[test]
    fn multiply_is_proved() {
        let v = run_symbolic(
            &multiply(1_000_000, false),
            &SymbolicConfig::default(),
            &Never,
        );
        assert_eq!(
            v,
            Verdict::Proved {
                method: Method::Symbolic,
                count: 1,
                vacuous: false
            }
        );
    }

    #[test]
    fn mutated_multiply_is_refuted_at_the_corner() {
        let v = run_symbolic(
            &multiply(1_000_000, true),
            &SymbolicConfig::default(),
            &Never,
        );
        let c = v.counterexample().unwrap();
        assert_eq!(
            c.shrunk,
            Value::Tuple(vec![Value::Int(1000), Value::Int(1000)])
        );
        assert_eq!((c.seed, c.case_index), (None, None));
    }

    #[test]
    fn host_branching_traps() {
        let p = Property::new("b", u32_range(0, 10).unwrap(), |t| {
            let x = t.int()?;
            Ok(if x.gt(5).decide()? {
                x.lt(100)
            } else {
                x.ge(0)
            })
        })
        .unwrap();
        let v = run_symbolic(&p, &SymbolicConfig::default(), &Never);
        assert_eq!(v.reason(), Some(UnknownReason::Unsupported));
    }

    #[test]
    fn lists_are_unsupported() {
        let p = Property::new(
            "l",
            list_of(u32_range(0, 1).unwrap(), 0, 3).unwrap(),
            |_| Ok(Bool::Lit(true)),
        )
        .unwrap();
        let v = run_symbolic(&p, &SymbolicConfig::default(), &Never);
        assert_eq!(v.reason(), Some(UnknownReason::Unsupported));
    }

    #[test]
    fn one_of_boxes_all_need_proof() {
        let s = one_of(vec![
            u32_range(0, 9).unwrap(),
            just(50i64),
            u32_range(20, 29).unwrap(),
        ])
        .unwrap();
        let p = Property::new("o", s, |t| Ok(t.int()?.not_equals(50))).unwrap();
        let v = run_symbolic(&p, &SymbolicConfig::default(), &Never);
        assert_eq!(v.counterexample().unwrap().shrunk, Value::Int(50));
    }

    #[test]
    fn constant_division_fault_is_confirmed() {
        let p = Property::new("z", u32_range(0, 9).unwrap(), |t| {
            Ok((t.int()? + (Int::lit(1) / 0)).ge(0))
        })
        .unwrap();
        let v = run_symbolic(&p, &SymbolicConfig::default(), &Never);
        assert_eq!(v.counterexample().unwrap().shrunk, Value::Int(0));
    }

    #[test]
    fn empty_refinement_is_vacuous() {
        let s = u32_range(0, 9)
            .unwrap()
            .filter_carrier("big", |t| match t.int() {
                Ok(x) => x.gt(100),
                Err(e) => Bool::Fault(e),
            });
        let p = Property::new("v", s, |_| Ok(Bool::Lit(false))).unwrap();
        let v = run_symbolic(&p, &SymbolicConfig::default(), &Never);
        assert!(v.is_vacuous(), "{v:?}");
    }
}
