//! Small deterministic RNG used by the simulators and estimators.
//!
//! Everything that consumes randomness in this crate is driven by a `u64`
//! seed through this generator, so any run is reproducible bit-for-bit on
//! any platform. Parallel or reordered trial execution stays reproducible
//! because each trial derives its own stream with [`derive_seed`].

/// SplitMix64 finalizer. Good enough mixing for seed derivation.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent stream seed from a base seed and a stream label.
///
/// Used to give every Monte Carlo trial its own generator so results do not
/// depend on evaluation order.
#[inline]
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ mix64(stream ^ 0xA076_1D64_78BD_642F))
}

/// Deterministic pseudo-random generator (SplitMix64 sequence).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeterministicRng {
    state: u64,
}

impl DeterministicRng {
    pub fn from_seed(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Child generator for an independent labelled stream.
    pub fn derive(&self, stream: u64) -> Self {
        Self::from_seed(derive_seed(self.state, stream))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `[0, bound)`. Unbiased (Lemire rejection).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below(0) is meaningless");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            let wide = (x as u128) * (bound as u128);
            if (wide as u64) >= threshold {
                return (wide >> 64) as u64;
            }
        }
    }

    pub fn fill_bytes(&mut self, out: &mut [u8]) {
        for chunk in out.chunks_mut(8) {
            let v = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&v[..chunk.len()]);
        }
    }

    pub fn bytes32(&mut self) -> [u8; 32] {
        let mut out = [0u8; 32];
        self.fill_bytes(&mut out);
        out
    }

    /// Uniform sample of `m` distinct values from `1..=n`, returned sorted.
    ///
    /// Partial Fisher-Yates; every m-subset is equally likely.
    pub fn sample_lanes(&mut self, n: u16, m: u16) -> Vec<u16> {
        assert!(m <= n);
        let mut pool: Vec<u16> = (1..=n).collect();
        for i in 0..m as usize {
            let j = i + self.below((n as usize - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(m as usize);
        pool.sort_unstable();
        pool
    }
}
