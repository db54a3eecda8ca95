//! Reproducible random-number streams.
//!
//! Every stochastic operation derives its randomness from a `(master seed,
//! stream index)` pair. Stream `i` of seed `s` is ChaCha8 seeded with `s`
//! on stream `i`, so trials are independent by construction and a run is
//! bit-reproducible no matter how trials are scheduled across threads.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// RNG for one trial (or other unit of independent work).
pub fn trial_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Up to 64 independent Bernoulli(p) bits in the low `lanes` bits.
///
/// Compares a per-lane uniform against `p` digit by digit: one random word
/// settles one binary digit of every undecided lane, so a draw costs about
/// `log2(lanes) + 2` words — and exactly one word when `p = 0.5`. The
/// per-lane law is Bernoulli(p) exactly (for the dyadic value the `f64`
/// holds), not a fixed-precision approximation.
pub fn bernoulli_mask<R: RngCore>(rng: &mut R, p: f64, lanes: u32) -> u64 {
    debug_assert!((1..=64).contains(&lanes));
    let lane_mask = if lanes == 64 { !0 } else { (1u64 << lanes) - 1 };
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return lane_mask;
    }
    let mut result = 0u64;
    let mut undecided = lane_mask;
    let mut rest = p;
    while rest > 0.0 && undecided != 0 {
        rest *= 2.0;
        let digit = rest >= 1.0;
        if digit {
            rest -= 1.0;
        }
        let word = rng.next_u64();
        if digit {
            // uniform digit 0 < p digit 1: decided below p.
            result |= undecided & !word;
            undecided &= word;
        } else {
            // uniform digit 1 > p digit 0: decided above p.
            undecided &= !word;
        }
    }
    // Lanes still undecided matched every digit of p; the uniform's tail is
    // then >= p's (all-zero) tail, so they fall on the "no success" side.
    result & lane_mask
}

/// Combines a sub-experiment index with a trial index into a stream id.
///
/// Sweeps and grid runs give each grid point its own `hi` so that trials
/// at different grid points never share coins.
pub fn stream_id(hi: u32, trial: u64) -> u64 {
    debug_assert!(trial < 1 << 32, "trial index must fit in 32 bits");
    (u64::from(hi) << 32) | trial
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::RngCore;

    #[test]
    fn same_seed_same_stream_is_identical() {
        let mut a = trial_rng(42, 7);
        let mut b = trial_rng(42, 7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn different_streams_differ() {
        let mut a = trial_rng(42, 0);
        let mut b = trial_rng(42, 1);
        let same = (0..16).filter(|_| a.next_u64() == b.next_u64()).count();
        assert!(same < 16);
    }

    #[test]
    fn stream_ids_do_not_collide() {
        assert_ne!(stream_id(1, 0), stream_id(0, 1 << 32 >> 1));
        assert_eq!(stream_id(0, 5), 5);
        assert_eq!(stream_id(2, 3), (2u64 << 32) | 3);
    }

    #[test]
    fn bernoulli_mask_degenerate_probabilities() {
        let mut rng = trial_rng(0, 0);
        assert_eq!(bernoulli_mask(&mut rng, 0.0, 64), 0);
        assert_eq!(bernoulli_mask(&mut rng, 1.0, 10), (1 << 10) - 1);
    }

    #[test]
    fn bernoulli_mask_respects_lane_count() {
        let mut rng = trial_rng(3, 1);
        for _ in 0..500 {
            assert_eq!(bernoulli_mask(&mut rng, 0.7, 9) & !0x1ff, 0);
        }
    }

    #[test]
    fn bernoulli_mask_frequency_matches_p() {
        // 6.4e5 bits per p; 5 sigma of a Bernoulli mean is ~3e-3 here.
        let mut rng = trial_rng(11, 0);
        for p in [0.5, 0.25, 0.3, 0.05, 0.9, 1.0 / 3.0] {
            let draws = 10_000;
            let ones: u64 = (0..draws)
                .map(|_| bernoulli_mask(&mut rng, p, 64).count_ones() as u64)
                .sum();
            let freq = ones as f64 / (64.0 * draws as f64);
            let sigma = (p * (1.0 - p) / (64.0 * draws as f64)).sqrt();
            assert!(
                (freq - p).abs() < 5.0 * sigma,
                "p={p} freq={freq} sigma={sigma}"
            );
        }
    }

    #[test]
    fn bernoulli_mask_half_consumes_one_word() {
        let mut a = trial_rng(8, 2);
        let mut b = trial_rng(8, 2);
        let mask = bernoulli_mask(&mut a, 0.5, 64);
        assert_eq!(mask, !b.next_u64());
        assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn bernoulli_mask_lanes_are_independent() {
        // Correlation between adjacent lanes over many draws stays near 0.
        let mut rng = trial_rng(13, 0);
        let draws = 20_000;
        let (mut n1, mut n2, mut n12) = (0u64, 0u64, 0u64);
        for _ in 0..draws {
            let m = bernoulli_mask(&mut rng, 0.3, 2);
            n1 += m & 1;
            n2 += (m >> 1) & 1;
            n12 += u64::from(m == 3);
        }
        let (f1, f2, f12) = (
            n1 as f64 / draws as f64,
            n2 as f64 / draws as f64,
            n12 as f64 / draws as f64,
        );
        assert!((f12 - f1 * f2).abs() < 0.01, "f1={f1} f2={f2} f12={f12}");
    }
}
