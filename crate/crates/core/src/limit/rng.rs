//! Counter-based pseudo-random draws and exact inverse-CDF sampling.
//!
//! Every draw is a pure function of `(seed, replication, coordinate)`,
//! so simulations do not depend on evaluation order or thread count.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Finalizer from splitmix64.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// The uniform 64-bit draw for one coordinate of one replication.
pub(crate) fn keyed_u64(seed: u64, replication: u64, coordinate: u64) -> u64 {
    // Chain the key parts through the finalizer with distinct odd
    // multipliers so nearby keys fan out.
    let mut h = mix64(seed ^ 0x9e37_79b9_7f4a_7c15);
    h = mix64(h ^ replication.wrapping_mul(0xd134_2543_de82_ef95));
    mix64(h ^ coordinate.wrapping_mul(0xda94_2042_e4dd_58b5))
}

/// Inverse-CDF sampler with exact rational thresholds.
///
/// Threshold `j` is `ceil(F_j * 2^64)` for the cumulative probability
/// `F_j`; a draw `v` selects the first index whose threshold exceeds it.
/// Zero-probability indices get zero-width slots and are never drawn.
pub(crate) struct TableSampler {
    thresholds: Vec<u128>,
}

impl TableSampler {
    pub(crate) fn new(probs: &[BigRational]) -> TableSampler {
        let two64: BigInt = BigInt::one() << 64u32;
        let mut acc = BigRational::zero();
        let thresholds = probs
            .iter()
            .map(|p| {
                acc += p;
                let ceil: BigInt = (acc.numer() * &two64 + acc.denom() - 1) / acc.denom();
                ceil.to_u128()
                    .expect("cumulative probabilities stay within 2^64")
            })
            .collect();
        TableSampler { thresholds }
    }

    pub(crate) fn sample(&self, v: u64) -> usize {
        let v = v as u128;
        let i = self.thresholds.partition_point(|&c| c <= v);
        debug_assert!(i < self.thresholds.len(), "final threshold must be 2^64");
        i
    }
}
