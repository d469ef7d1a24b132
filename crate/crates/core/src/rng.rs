//! Counter-based pseudo-random streams.
//!
//! A stream is a 64-bit key. Its `i`-th output word (`i = 0, 1, 2, …`) is
//!
//! ```text
//! word(key, i) = mix(key + (i + 1) · γ)              (wrapping arithmetic)
//! mix(x):  x ^= x >> 30; x *= 0xbf58476d1ce4e5b9;
//!          x ^= x >> 27; x *= 0x94d049bb133111eb;
//!          x ^= x >> 31
//! γ = 0x9e3779b97f4a7c15
//! ```
//!
//! which is SplitMix64 read as a function of the counter. The root stream of
//! a seed has `key = seed`; child stream `id` of a stream with key `k` has
//! key `mix(k ^ mix(id · γ + 0x632be59bd9b4e019))`.
//!
//! Uniform doubles use the top 53 bits: `u = (word >> 11) · 2⁻⁵³ ∈ [0, 1)`;
//! the open-interval variant adds half a step, `((word >> 11) + ½) · 2⁻⁵³`.

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const CHILD_SALT: u64 = 0x632b_e59b_d9b4_e019;
const UNIT: f64 = 1.0 / (1u64 << 53) as f64;

pub fn mix(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { key: seed, counter: 0 }
    }

    /// Independent child stream `id`; does not advance `self`.
    pub fn substream(&self, id: u64) -> Self {
        let child = mix(self.key ^ mix(id.wrapping_mul(GAMMA).wrapping_add(CHILD_SALT)));
        CounterRng { key: child, counter: 0 }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Output word `index`, independent of the current position.
    pub fn word_at(&self, index: u64) -> u64 {
        mix(self.key.wrapping_add(index.wrapping_add(1).wrapping_mul(GAMMA)))
    }

    pub fn next_u64(&mut self) -> u64 {
        let w = self.word_at(self.counter);
        self.counter += 1;
        w
    }

    /// Uniform on `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * UNIT
    }

    /// Uniform on `[lo, hi]` (closed up to rounding of `hi`).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform on the open interval `(lo, hi)`.
    pub fn uniform_open(&mut self, lo: f64, hi: f64) -> f64 {
        let u = ((self.next_u64() >> 11) as f64 + 0.5) * UNIT;
        lo + (hi - lo) * u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_stream_matches_splitmix64() {
        // Reference SplitMix64 outputs for seed 1234567.
        let mut state: u64 = 1234567;
        let mut reference = || {
            state = state.wrapping_add(GAMMA);
            mix(state)
        };
        let mut rng = CounterRng::new(1234567);
        for _ in 0..5 {
            assert_eq!(rng.next_u64(), reference());
        }
        assert_eq!(CounterRng::new(1234567).word_at(0), 6457827717110365317);
    }

    #[test]
    fn random_access_and_determinism() {
        let mut a = CounterRng::new(42).substream(7);
        let b = CounterRng::new(42).substream(7);
        for i in 0..10 {
            assert_eq!(a.next_u64(), b.word_at(i));
        }
        assert_ne!(CounterRng::new(42).substream(7).key(), CounterRng::new(42).substream(8).key());
        assert_ne!(CounterRng::new(42).substream(7).key(), CounterRng::new(43).substream(7).key());
    }

    #[test]
    fn uniform_ranges() {
        let mut rng = CounterRng::new(3);
        for _ in 0..10_000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
            let v = rng.uniform_open(-15.0, 15.0);
            assert!(v > -15.0 && v < 15.0);
        }
    }
}
