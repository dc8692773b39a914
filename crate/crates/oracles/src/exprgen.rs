//! Random integer expressions, predicates and boxes.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use propbridge_core::expr::{CmpOp, SourceLoc, SymBool, SymExpr, VarId};
use propbridge_core::interval::{Interval, IntervalBox, Valuation};
use rand::rngs::StdRng;
use rand::Rng;

const OPS: [CmpOp; 6] = [
    CmpOp::Lt,
    CmpOp::Le,
    CmpOp::Eq,
    CmpOp::Ne,
    CmpOp::Gt,
    CmpOp::Ge,
];

/// An expression of depth at most `depth` over variables `0..vars`.
pub fn expr(rng: &mut StdRng, depth: usize, vars: u32) -> SymExpr {
    if depth <= 1 || rng.random_bool(0.25) {
        return if rng.random_bool(0.6) {
            SymExpr::var(rng.random_range(0..vars))
        } else {
            SymExpr::constant(rng.random_range(-20i64..=20))
        };
    }
    let a = expr(rng, depth - 1, vars);
    match rng.random_range(0..6) {
        0 => SymExpr::add(a, expr(rng, depth - 1, vars)),
        1 => SymExpr::sub(a, expr(rng, depth - 1, vars)),
        2 => SymExpr::mul(a, expr(rng, depth - 1, vars)),
        3 => SymExpr::div(a, expr(rng, depth - 1, vars), SourceLoc::caller()),
        4 => SymExpr::rem(a, expr(rng, depth - 1, vars), SourceLoc::caller()),
        _ => SymExpr::neg(a),
    }
}

/// A predicate built from comparisons of random expressions.
pub fn predicate(rng: &mut StdRng, depth: usize, vars: u32) -> SymBool {
    if depth <= 1 || rng.random_bool(0.5) {
        let op = OPS[rng.random_range(0..OPS.len())];
        let d = depth.clamp(1, 4);
        return expr(rng, d, vars).cmp(op, expr(rng, d, vars));
    }
    match rng.random_range(0..3) {
        0 => SymBool::and(
            predicate(rng, depth - 1, vars),
            predicate(rng, depth - 1, vars),
        ),
        1 => SymBool::or(
            predicate(rng, depth - 1, vars),
            predicate(rng, depth - 1, vars),
        ),
        _ => SymBool::not(predicate(rng, depth - 1, vars)),
    }
}

pub fn random_box(rng: &mut StdRng, vars: u32) -> IntervalBox {
    let mut b = IntervalBox::new();
    for v in 0..vars {
        let lo = rng.random_range(-50i64..=50);
        let width = if rng.random_bool(0.2) {
            0
        } else {
            rng.random_range(0i64..=40)
        };
        b.insert(VarId(v), Interval::new(lo, lo + width));
    }
    b
}

fn bound(i: &BigInt) -> i64 {
    i.to_i64().expect("generated boxes are small")
}

pub fn random_point(rng: &mut StdRng, b: &IntervalBox) -> Valuation {
    let mut v = Valuation::new();
    for (id, iv) in b.iter() {
        v.insert(*id, rng.random_range(bound(iv.lo())..=bound(iv.hi())));
    }
    v
}

/// The corner with every variable at its lower (or upper) bound.
pub fn corner(b: &IntervalBox, upper: bool) -> Valuation {
    let mut v = Valuation::new();
    for (id, iv) in b.iter() {
        v.insert(
            *id,
            if upper {
                iv.hi().clone()
            } else {
                iv.lo().clone()
            },
        );
    }
    v
}
