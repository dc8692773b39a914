//! SplitMix64, the only source of randomness in the crate.
//!
//! Every generated value, shrink and solver sample is a pure function of the
//! seed, so any reported seed replays bit-exactly on any platform.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrngState {
    state: u64,
}

impl PrngState {
    pub const fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub const fn state(&self) -> u64 {
        self.state
    }

    /// Advance the state and return the next 64-bit output.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `[lo, hi]` by bitmask-and-reject.
    ///
    /// At least one draw is always consumed, even for singleton ranges. The
    /// span `hi - lo` must fit in 64 bits, which holds for every declared
    /// integer width.
    pub fn uniform_in(&mut self, lo: i128, hi: i128) -> i128 {
        assert!(lo <= hi, "uniform_in: empty range [{lo}, {hi}]");
        let span = (hi - lo) as u128;
        assert!(span <= u64::MAX as u128, "uniform_in: span exceeds 64 bits");
        let span = span as u64;
        let mask = match span.checked_add(1) {
            Some(count) => count.next_power_of_two().wrapping_sub(1),
            None => u64::MAX,
        };
        loop {
            let draw = self.next_u64() & mask;
            if draw <= span {
                return lo + draw as i128;
            }
        }
    }

    /// Uniform index in `0..len`. `len` must be nonzero.
    pub fn index(&mut self, len: usize) -> usize {
        self.uniform_in(0, len as i128 - 1) as usize
    }
}

/// Functional form of one SplitMix64 step.
pub fn prng_next(st: PrngState) -> (PrngState, u64) {
    let mut next = st;
    let out = next.next_u64();
    (next, out)
}

/// Functional form of [`PrngState::uniform_in`].
pub fn uniform_in(st: PrngState, lo: i128, hi: i128) -> (PrngState, i128) {
    let mut next = st;
    let out = next.uniform_in(lo, hi);
    (next, out)
}
