//! Reproducible randomness: one master seed, named sub-streams.
//!
//! Every stochastic routine in the crate draws from a [`SeedTree`]. A tree is
//! built from a single `u64` master seed; each named stream is an independent
//! ChaCha12 generator whose seed is derived from the master seed and the
//! stream name. Streams are also *index-addressable*: the uniform variate
//! attached to integer index `i` is the same no matter how much of the stream
//! was consumed before, which keeps coupled simulations aligned when
//! truncation orders change.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// Indices below `-INDEX_OFFSET` are not addressable; linear-process
/// truncation orders stay far under this.
const INDEX_OFFSET: i64 = 1 << 20;

const fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Deterministic fan-out of a master seed into named sub-streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTree {
    master: u64,
}

impl SeedTree {
    pub fn new(master: u64) -> Self {
        SeedTree { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// Independent stream for `name`. Equal names give identical streams;
    /// distinct names give streams with unrelated ChaCha keys.
    pub fn stream(&self, name: &str) -> Stream {
        let seed = splitmix64(self.master ^ fnv1a(name.as_bytes()));
        Stream::from_seed(seed)
    }

    /// Derived tree for replication `index`, independent of the parent's
    /// streams and of other indices.
    pub fn child(&self, index: u64) -> SeedTree {
        SeedTree {
            master: splitmix64(self.master ^ splitmix64(index ^ 0xA076_1D64_78BD_642F)),
        }
    }
}

/// One named sub-stream: sequential or index-addressed uniform variates.
#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha12Rng,
}

impl Stream {
    fn from_seed(seed: u64) -> Self {
        Stream {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// Next uniform in the open interval (0, 1).
    pub fn next_uniform(&mut self) -> f64 {
        u64_to_open_unit(self.rng.next_u64())
    }

    /// Uniform attached to integer index `i` (may be negative down to
    /// `-2^20`). Independent of draw history.
    pub fn uniform_at(&mut self, index: i64) -> f64 {
        self.seek(index);
        self.next_uniform()
    }

    /// Next standard Gaussian (Box–Muller, cosine branch; two uniforms per
    /// draw).
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Uniforms for the contiguous index range `lo..hi`.
    pub fn uniforms_in(&mut self, lo: i64, hi: i64) -> Vec<f64> {
        assert!(lo <= hi, "empty or inverted index range");
        self.seek(lo);
        (lo..hi).map(|_| self.next_uniform()).collect()
    }

    fn seek(&mut self, index: i64) {
        let pos = index + INDEX_OFFSET;
        assert!(pos >= 0, "stream index below addressable range");
        // One u64 (two 32-bit words) per index.
        self.rng.set_word_pos(2 * pos as u128);
    }
}

/// Map a `u64` onto the strictly open unit interval. The +0.5 offset keeps
/// 0 and 1 unreachable so quantile transforms never hit an endpoint; 52 bits
/// keep both extremes exactly representable.
pub fn u64_to_open_unit(x: u64) -> f64 {
    ((x >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_name_same_stream() {
        let tree = SeedTree::new(42);
        let a: Vec<f64> = (0..8).map(|_| tree.stream("x").next_uniform()).collect();
        let b: Vec<f64> = (0..8).map(|_| tree.stream("x").next_uniform()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_names_distinct_streams() {
        let tree = SeedTree::new(42);
        let a = tree.stream("x").next_uniform();
        let b = tree.stream("y").next_uniform();
        assert_ne!(a, b);
    }

    #[test]
    fn indexed_access_matches_sequential() {
        let tree = SeedTree::new(7);
        let mut s = tree.stream("perturbation");
        let seq = s.uniforms_in(0, 16);
        for (i, &v) in seq.iter().enumerate() {
            assert_eq!(tree.stream("perturbation").uniform_at(i as i64), v);
        }
    }

    #[test]
    fn indexed_access_is_history_free() {
        let tree = SeedTree::new(9);
        let mut s = tree.stream("a");
        let direct = s.uniform_at(-5);
        s.uniforms_in(0, 100);
        assert_eq!(s.uniform_at(-5), direct);
    }

    #[test]
    fn negative_indices_extend_the_stream() {
        let tree = SeedTree::new(3);
        let mut s = tree.stream("a");
        let lo = s.uniforms_in(-4, 0);
        let hi = s.uniforms_in(0, 4);
        assert_eq!(lo.len(), 4);
        for v in lo.iter().chain(hi.iter()) {
            assert!(*v > 0.0 && *v < 1.0);
        }
        assert_ne!(lo, hi);
    }

    #[test]
    fn children_are_independent() {
        let tree = SeedTree::new(1);
        let a = tree.child(0).stream("x").next_uniform();
        let b = tree.child(1).stream("x").next_uniform();
        assert_ne!(a, b);
    }

    #[test]
    fn open_unit_endpoints_unreachable() {
        assert!(u64_to_open_unit(0) > 0.0);
        assert!(u64_to_open_unit(u64::MAX) < 1.0);
    }

    #[test]
    fn gaussian_moments_match_standard_normal() {
        let mut s = SeedTree::new(11).stream("gauss");
        let n = 200_000;
        let draws: Vec<f64> = (0..n).map(|_| s.next_gaussian()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
        let frac_above_2 = draws.iter().filter(|v| **v > 2.0).count() as f64 / n as f64;
        assert!((frac_above_2 - 0.02275).abs() < 0.002, "tail {frac_above_2}");
    }
}
