//! SplitMix64, specified bit-for-bit so sample sequences reproduce across
//! platforms and implementations.
//!
//! ```text
//! state  <- state + 0x9E3779B97F4A7C15            (wrapping)
//! z      <- state
//! z      <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9 (wrapping)
//! z      <- (z XOR (z >> 27)) * 0x94D049BB133111EB (wrapping)
//! output <- z XOR (z >> 31)
//! ```
//!
//! Uniform reals in `[0, 1)` are `(output >> 11) * 2^-53`.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Independent stream for `(seed, stream)`; used to give every sample
    /// point and check its own generator.
    pub fn derive(seed: u64, stream: u64) -> Self {
        let mut outer = SplitMix64::new(stream);
        SplitMix64::new(seed ^ outer.next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Integer in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}
