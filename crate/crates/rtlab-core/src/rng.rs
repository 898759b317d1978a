//! Counter-based deterministic randomness.
//!
//! Every random decision in the crate is a pure function of
//! `(seed, stream, index)`. There is no mutable generator state, so decisions
//! do not depend on enumeration order, thread schedule, or platform, and any
//! single decision can be recomputed in isolation. Same seed, same bits.

/// Independent decision streams. Keying decisions by stream keeps unrelated
/// draws (line sampling vs. coloring vs. probing) from colliding even when
//  they share an index space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    LineKeep = 1,
    PointKeep = 2,
    ColorIsolation = 3,
    ColorClass = 4,
    ProbeShuffle = 5,
    DrcSample = 6,
    SeedDerive = 7,
    CellQ = 8,
    Stage = 9,
    GraphSample = 10,
    Tuple = 11,
    Retry = 12,
}

const PHI: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The raw 64-bit word for decision `(seed, stream, index)`.
#[inline]
pub fn word(seed: u64, stream: Stream, index: u64) -> u64 {
    let s = mix(seed.wrapping_add(PHI.wrapping_mul(stream as u64)));
    mix(s.wrapping_add(PHI.wrapping_mul(index).wrapping_add(PHI)))
}

/// Uniform draw in `[0, 1)` with 53 bits of precision.
#[inline]
pub fn unit_f64(seed: u64, stream: Stream, index: u64) -> f64 {
    (word(seed, stream, index) >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Uniform draw in `[0, n)`. Fixed-point multiply; the bias of at most
/// `n / 2^64` is far below anything our statistical checks can see.
#[inline]
pub fn uniform_below(seed: u64, stream: Stream, index: u64, n: u64) -> u64 {
    debug_assert!(n > 0);
    ((word(seed, stream, index) as u128 * n as u128) >> 64) as u64
}

/// Derives a child seed; used for per-stage substreams in pipelines.
#[inline]
pub fn derive_seed(seed: u64, stream: Stream, index: u64) -> u64 {
    word(seed, stream, index)
}

/// Packs two 32-bit coordinates into one decision index.
#[inline]
pub fn pair_index(a: u32, b: u32) -> u64 {
    ((a as u64) << 32) | b as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_are_reproducible_and_stream_separated() {
        assert_eq!(word(42, Stream::LineKeep, 7), word(42, Stream::LineKeep, 7));
        assert_ne!(word(42, Stream::LineKeep, 7), word(42, Stream::PointKeep, 7));
        assert_ne!(word(42, Stream::LineKeep, 7), word(43, Stream::LineKeep, 7));
        assert_ne!(word(42, Stream::LineKeep, 7), word(42, Stream::LineKeep, 8));
    }

    #[test]
    fn unit_f64_in_range_and_roughly_uniform() {
        let mut sum = 0.0;
        for i in 0..10_000 {
            let u = unit_f64(1, Stream::Tuple, i);
            assert!((0.0..1.0).contains(&u));
            sum += u;
        }
        let mean = sum / 10_000.0;
        // 5 sigma of the mean of 10k uniforms is ~0.0144.
        assert!((mean - 0.5).abs() < 0.015, "mean {mean}");
    }

    #[test]
    fn uniform_below_covers_all_residues() {
        let mut seen = [false; 7];
        for i in 0..1000 {
            seen[uniform_below(3, Stream::ColorClass, i, 7) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn fixed_words_pinned_for_cross_platform_stability() {
        // Frozen values: a change here means previously persisted artifacts
        // would no longer replay bit-identically.
        assert_eq!(word(0, Stream::LineKeep, 0), PINNED_WORD_0);
        assert_eq!(word(12345, Stream::ColorClass, 678), PINNED_WORD_1);
    }

    const PINNED_WORD_0: u64 = 0xa706_dd2f_4d19_7e6f;
    const PINNED_WORD_1: u64 = 0x59f3_b3a2_05ed_5da6;
}
