//! Property strategies and three checking backends: random sampling with
//! shrinking, exhaustive enumeration, and symbolic interval proof.
//!
//! The crate is `no_std` with `alloc`. Clocks, threads and IO live in the
//! `propbridge` crate; here, deadlines arrive through [`Interrupt`].

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod carrier;
pub mod enumerate;
pub mod exhaustive;
pub mod expr;
pub mod fuzz;
pub mod interrupt;
pub mod interval;
pub mod pattern;
pub mod property;
pub mod rng;
pub mod solver;
pub mod strategy;
pub mod symbolic;
pub mod symbolize;
pub mod tree;
pub mod value;
pub mod verdict;

pub use carrier::{Bool, Fault, Int, Term};
pub use enumerate::{enumerate, Enumeration};
pub use exhaustive::{run_exhaustive, ExhaustiveConfig};
pub use fuzz::{run_fuzz, shrink_failure, FuzzConfig, Shrunk};
pub use interrupt::{Halt, Interrupt, Never};
pub use pattern::{pattern_strategy, pattern_strategy_with_cap, ParseError};
pub use property::{Evaluation, Property, PropertyError};
pub use rng::PrngState;
pub use strategy::{
    base_cardinality, booleans, cardinality, filter, filter_carrier, i32_range, i64_range,
    int_range, just, list_of, map, map_carrier, one_of, optional_of, ordered_map_of, tuple_of,
    u32_range, u64_range, u8_range, Cardinality, ConstructionError, Strategy, StrategyError,
    StrategyView, Width,
};
pub use symbolic::{run_symbolic, SymbolicConfig};
pub use tree::{generate, simplest_tree, Gen, ValueTree};
pub use value::Value;
pub use verdict::{Counterexample, Method, UnknownReason, Verdict, VerdictKind};
