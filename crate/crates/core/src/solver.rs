//! Interval branch-and-prune over integer boxes.

use alloc::vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::expr::SymBool;
use crate::interrupt::{Halt, Interrupt, Never};
use crate::interval::{concrete_truth, truth_eval, IntervalBox, IntervalError, Truth3, Valuation};
use crate::rng::PrngState;

pub const DEFAULT_BOX_BUDGET: u64 = 100_000;
pub const DEFAULT_SAMPLES: u32 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Boxes processed before giving up.
    pub box_budget: u64,
    /// Concrete points tried from the leftover boxes once the budget or the
    /// deadline runs out.
    pub samples: u32,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            box_budget: DEFAULT_BOX_BUDGET,
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UndecidedReason {
    Budget,
    Timeout,
    Unsupported(IntervalError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Proved {
        boxes: u64,
        splits: u64,
        /// Every box was discharged because the hypothesis was false there.
        vacuous: bool,
    },
    /// A concretely confirmed point where the hypothesis holds and the goal
    /// does not.
    Witness {
        valuation: Valuation,
        boxes: u64,
        splits: u64,
    },
    Undecided {
        reason: UndecidedReason,
        boxes: u64,
        splits: u64,
    },
}

impl SolveOutcome {
    pub fn boxes(&self) -> u64 {
        match self {
            SolveOutcome::Proved { boxes, .. }
            | SolveOutcome::Witness { boxes, .. }
            | SolveOutcome::Undecided { boxes, .. } => *boxes,
        }
    }
}

/// Prove `p` over every point of `b`, with no hypothesis and no deadline.
pub fn branch_and_prune(p: &SymBool, b: &IntervalBox, budget: u64) -> SolveOutcome {
    let cfg = SolverConfig {
        box_budget: budget,
        ..SolverConfig::default()
    };
    solve(p, &SymBool::Const(true), b, &cfg, &Never)
}

/// Does `hyp` hold and `goal` fail at `v`? Evaluation errors count as no.
fn refutes(goal: &SymBool, hyp: &SymBool, v: &Valuation) -> bool {
    matches!(concrete_truth(hyp, v), Ok(true)) && matches!(concrete_truth(goal, v), Ok(false))
}

/// Prove `hyp -> goal` for every point of `region`, or find a point where it
/// fails.
pub fn solve(
    goal: &SymBool,
    hyp: &SymBool,
    region: &IntervalBox,
    cfg: &SolverConfig,
    interrupt: &dyn Interrupt,
) -> SolveOutcome {
    let mut work = vec![region.clone()];
    let mut boxes = 0;
    let mut splits = 0;
    let mut satisfiable = false;
    let unsupported = |e, boxes, splits| SolveOutcome::Undecided {
        reason: UndecidedReason::Unsupported(e),
        boxes,
        splits,
    };

    while let Some(b) = work.pop() {
        let stop = if boxes >= cfg.box_budget.max(1) {
            Some(UndecidedReason::Budget)
        } else {
            interrupt.poll().map(|h| match h {
                Halt::Timeout | Halt::Cancelled => UndecidedReason::Timeout,
            })
        };
        if let Some(reason) = stop {
            work.push(b);
            if let Some(valuation) = sample(goal, hyp, &work, cfg) {
                return SolveOutcome::Witness {
                    valuation,
                    boxes,
                    splits,
                };
            }
            return SolveOutcome::Undecided {
                reason,
                boxes,
                splits,
            };
        }
        boxes += 1;

        let h = match truth_eval(hyp, &b) {
            Ok(t) => t,
            Err(e) => return unsupported(e, boxes, splits),
        };
        if h == Truth3::False {
            continue;
        }
        let g = match truth_eval(goal, &b) {
            Ok(t) => t,
            Err(e) => return unsupported(e, boxes, splits),
        };
        match (h, g) {
            (_, Truth3::True) => {
                satisfiable = true;
                continue;
            }
            (Truth3::True, Truth3::False) => {
                let mid = b.midpoint();
                if refutes(goal, hyp, &mid) {
                    return SolveOutcome::Witness {
                        valuation: mid,
                        boxes,
                        splits,
                    };
                }
            }
            _ => {}
        }
        if b.is_point() {
            let v = b.midpoint();
            match concrete_truth(hyp, &v) {
                Ok(false) => {}
                _ if refutes(goal, hyp, &v) => {
                    return SolveOutcome::Witness {
                        valuation: v,
                        boxes,
                        splits,
                    };
                }
                _ => satisfiable = true,
            }
            continue;
        }
        if let Some((low, high)) = b.split() {
            splits += 1;
            work.push(high);
            work.push(low);
        }
    }
    SolveOutcome::Proved {
        boxes,
        splits,
        vacuous: !satisfiable,
    }
}

fn pick(rng: &mut PrngState, lo: &BigInt, hi: &BigInt) -> BigInt {
    match (lo.to_i128(), hi.to_i128()) {
        (Some(l), Some(h)) => rng.uniform_in(l, h).into(),
        _ => lo.clone(),
    }
}

fn sample(
    goal: &SymBool,
    hyp: &SymBool,
    work: &[IntervalBox],
    cfg: &SolverConfig,
) -> Option<Valuation> {
    if work.is_empty() {
        return None;
    }
    let mut rng = PrngState::new(cfg.seed);
    for _ in 0..cfg.samples {
        let b = &work[rng.index(work.len())];
        let mut v = Valuation::new();
        for (id, iv) in b.iter() {
            v.insert(*id, pick(&mut rng, iv.lo(), iv.hi()));
        }
        if refutes(goal, hyp, &v) {
            return Some(v);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{CmpOp, SourceLoc, SymExpr, VarId};
    use crate::interrupt::PollLimit;
    use crate::interval::Interval;

    fn paper_box() -> IntervalBox {
        IntervalBox::new()
            .with(VarId(0), Interval::new(1, 1000))
            .with(VarId(1), Interval::new(1, 1000))
    }

    fn product() -> SymExpr {
        SymExpr::mul(SymExpr::var(0), SymExpr::var(1))
    }

    #[test]
    fn multiply_proves_in_one_box() {
        let c = product();
        let p = SymBool::and(
            SymExpr::constant(1).cmp(CmpOp::Le, c.clone()),
            c.cmp(CmpOp::Le, SymExpr::constant(1_000_000)),
        );
        assert_eq!(
            branch_and_prune(&p, &paper_box(), DEFAULT_BOX_BUDGET),
            SolveOutcome::Proved {
                boxes: 1,
                splits: 0,
                vacuous: false
            }
        );
    }

    #[test]
    fn mutated_multiply_has_corner_witness() {
        let p = product().cmp(CmpOp::Lt, SymExpr::constant(1_000_000));
        match branch_and_prune(&p, &paper_box(), DEFAULT_BOX_BUDGET) {
            SolveOutcome::Witness { valuation, .. } => {
                assert_eq!(
                    valuation,
                    Valuation::new().with(VarId(0), 1000).with(VarId(1), 1000)
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_true_is_one_box() {
        let out = branch_and_prune(&SymBool::Const(true), &paper_box(), 1);
        assert!(matches!(out, SolveOutcome::Proved { boxes: 1, .. }));
    }

    #[test]
    fn straddling_divisor_is_unsupported() {
        let d = SymExpr::div(SymExpr::constant(10), SymExpr::var(0), SourceLoc::UNKNOWN);
        let p = d.cmp(CmpOp::Lt, SymExpr::constant(100));
        let b = IntervalBox::new().with(VarId(0), Interval::new(-1, 1));
        assert!(matches!(
            branch_and_prune(&p, &b, 100),
            SolveOutcome::Undecided {
                reason: UndecidedReason::Unsupported(IntervalError::DivMaybeZero(_)),
                ..
            }
        ));
    }

    #[test]
    fn budget_falls_back_to_sampling() {
        // x*x != 2500 fails only at x = 50 within [0, 10^6]; too few boxes
        // to isolate it and too few samples to hit it.
        let sq = SymExpr::mul(SymExpr::var(0), SymExpr::var(0));
        let p = sq.cmp(CmpOp::Ne, SymExpr::constant(2500));
        let b = IntervalBox::new().with(VarId(0), Interval::new(0, 1_000_000));
        let out = branch_and_prune(&p, &b, 3);
        assert!(matches!(
            out,
            SolveOutcome::Undecided {
                reason: UndecidedReason::Budget,
                boxes: 3,
                ..
            }
        ));
        // x != 0 on [0, 3] with one box: sampling finds 0.
        let p = SymExpr::var(0).cmp(CmpOp::Ne, SymExpr::constant(0));
        let b = IntervalBox::new().with(VarId(0), Interval::new(0, 3));
        assert!(matches!(
            branch_and_prune(&p, &b, 1),
            SolveOutcome::Witness { .. }
        ));
    }

    #[test]
    fn deadline_is_timeout() {
        let sq = SymExpr::mul(SymExpr::var(0), SymExpr::var(0));
        let p = sq.cmp(CmpOp::Ne, SymExpr::constant(2500));
        let b = IntervalBox::new().with(VarId(0), Interval::new(0, 1_000_000));
        let out = solve(
            &p,
            &SymBool::Const(true),
            &b,
            &SolverConfig {
                samples: 0,
                ..Default::default()
            },
            &PollLimit::new(2),
        );
        assert!(matches!(
            out,
            SolveOutcome::Undecided {
                reason: UndecidedReason::Timeout,
                boxes: 2,
                ..
            }
        ));
    }

    #[test]
    fn hypotheses_refine_and_detect_vacuity() {
        let x = SymExpr::var(0);
        let b = IntervalBox::new().with(VarId(0), Interval::new(-100, 100));
        // x > 0 -> x * x > 0
        let hyp = x.clone().cmp(CmpOp::Gt, SymExpr::constant(0));
        let goal = SymExpr::mul(x.clone(), x.clone()).cmp(CmpOp::Gt, SymExpr::constant(0));
        let out = solve(&goal, &hyp, &b, &SolverConfig::default(), &Never);
        assert!(
            matches!(out, SolveOutcome::Proved { vacuous: false, .. }),
            "{out:?}"
        );
        // x > 100 is never true: the claim holds vacuously.
        let hyp = x.clone().cmp(CmpOp::Gt, SymExpr::constant(100));
        let out = solve(
            &SymBool::Const(false),
            &hyp,
            &b,
            &SolverConfig::default(),
            &Never,
        );
        assert!(matches!(
            out,
            SolveOutcome::Proved {
                vacuous: true,
                boxes: 1,
                ..
            }
        ));
        // Witnesses respect the hypothesis.
        let hyp = x.clone().cmp(CmpOp::Ge, SymExpr::constant(10));
        let goal = x.clone().cmp(CmpOp::Lt, SymExpr::constant(10));
        match solve(&goal, &hyp, &b, &SolverConfig::default(), &Never) {
            SolveOutcome::Witness { valuation, .. } => {
                let v = valuation.get(VarId(0)).unwrap();
                assert!(*v >= BigInt::from(10));
            }
            other => panic!("{other:?}"),
        }
    }
}
