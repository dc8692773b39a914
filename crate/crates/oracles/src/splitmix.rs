//! SplitMix64 transcribed from Vigna's public-domain C reference.

pub struct SplitMix64 {
    x: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { x: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.x = self.x.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.x;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}

/// First two outputs for seed 0, as published with the reference.
pub const SEED_ZERO: [u64; 2] = [0xe220a8397b1dcdaf, 0x6e789e6aa1b965f4];

pub fn sequence(seed: u64, n: usize) -> Vec<u64> {
    let mut g = SplitMix64::new(seed);
    (0..n).map(|_| g.next_u64()).collect()
}
