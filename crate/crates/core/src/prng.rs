/// xorshift64* generator. Seed 0 is remapped so the state is never zero.
#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

const ZERO_SEED: u64 = 0x9E37_79B9_7F4A_7C15;
const MULTIPLIER: u64 = 0x2545_F491_4F6C_DD1D;

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let state = if seed == 0 { ZERO_SEED } else { seed };
        Self { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(MULTIPLIER)
    }

    /// Top bit of the next output.
    pub fn next_bit(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Uniform-ish value in `[0, bound)` by multiply-high; no rejection step.
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "below(0)");
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize
    }

    /// True with probability 2^-k (the top k bits are all zero).
    pub fn one_in_pow2(&mut self, k: u32) -> bool {
        k == 0 || self.next_u64() >> (64 - k) == 0
    }
}
