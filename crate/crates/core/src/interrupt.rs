//! Cooperative stop signals. The core never reads a clock; callers supply an
//! [`Interrupt`] that backends poll between evaluations and solver boxes.

use core::cell::Cell;
use core::sync::atomic::{AtomicBool, Ordering};

/// Predicate evaluations between two polls in the exhaustive backend.
pub const POLL_INTERVAL: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Halt {
    Timeout,
    Cancelled,
}

pub trait Interrupt {
    fn poll(&self) -> Option<Halt>;
}

/// Never stops.
#[derive(Clone, Copy, Debug, Default)]
pub struct Never;

impl Interrupt for Never {
    fn poll(&self) -> Option<Halt> {
        None
    }
}

impl Interrupt for AtomicBool {
    fn poll(&self) -> Option<Halt> {
        self.load(Ordering::Relaxed).then_some(Halt::Cancelled)
    }
}

impl<T: Interrupt + ?Sized> Interrupt for &T {
    fn poll(&self) -> Option<Halt> {
        (**self).poll()
    }
}

/// Times out after a fixed number of polls. Deterministic stand-in for a
/// wall-clock deadline in tests.
#[derive(Debug)]
pub struct PollLimit {
    remaining: Cell<u64>,
}

impl PollLimit {
    pub fn new(polls: u64) -> Self {
        PollLimit {
            remaining: Cell::new(polls),
        }
    }
}

impl Interrupt for PollLimit {
    fn poll(&self) -> Option<Halt> {
        let left = self.remaining.get();
        if left == 0 {
            return Some(Halt::Timeout);
        }
        self.remaining.set(left - 1);
        None
    }
}
