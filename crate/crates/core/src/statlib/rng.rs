use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Seedable, counter-based random stream.
///
/// Backed by ChaCha8, whose 64-bit stream selector gives non-overlapping
/// substreams for every `(seed, stream)` pair. All derived values use
/// integer-only transitions, so streams are identical on every platform
/// (including `wasm32`).
#[derive(Debug, Clone)]
pub struct Rng {
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n` by rejection; `n` must be nonzero.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "Rng::below requires n > 0");
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return v % n;
            }
        }
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// Standard normal draw by inversion.
    pub fn normal(&mut self) -> f64 {
        loop {
            let u = self.next_f64();
            if u > 0.0 {
                return super::normal_ppf(u).unwrap_or(0.0);
            }
        }
    }
}

/// Mix several small keys into one stream id.
pub fn stream_id(keys: &[u64]) -> u64 {
    // splitmix64 finalizer over a running fold
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for &k in keys {
        h ^= k.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(h << 6).wrapping_add(h >> 2);
        h = (h ^ (h >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = Rng::new(42);
        let mut b = Rng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn substreams_differ() {
        let mut a = Rng::substream(7, 0);
        let mut b = Rng::substream(7, 1);
        let va: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let vb: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        assert_ne!(va, vb);
    }

    #[test]
    fn frozen_first_draws() {
        // Guards cross-platform and cross-version stream stability.
        let mut r = Rng::new(0);
        assert_eq!(r.next_u64(), 13080132717333068652);
        assert_eq!(r.next_u64(), 8594738769458413623);
        assert_eq!(Rng::new(123).next_f64(), 0.8534720742383689);
        assert_eq!(Rng::substream(7, 3).below(1000), 449);
    }

    #[test]
    fn below_is_in_range_and_covers() {
        let mut r = Rng::new(3);
        let mut seen = [false; 7];
        for _ in 0..1000 {
            let v = r.below(7) as usize;
            seen[v] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn shuffle_is_permutation() {
        let mut r = Rng::new(9);
        let mut v: Vec<usize> = (0..50).collect();
        r.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
        assert_ne!(v, sorted);
    }

    #[test]
    fn stream_ids_spread() {
        assert_ne!(stream_id(&[0, 1]), stream_id(&[1, 0]));
        assert_ne!(stream_id(&[0]), stream_id(&[0, 0]));
    }
}
