//! Counter-based randomness.
//!
//! Edge labels are a pure function of `(seed, edge id)` so that any trial can be
//! replayed, sharded or re-ordered without changing a single bit.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform label in `[0, 1)` of edge `e` under stream `seed`.
#[inline]
pub fn edge_label(seed: u64, e: u32) -> f64 {
    let key = mix64(seed.wrapping_mul(GOLDEN) ^ 0x5DEE_CE66_D1CE_4E5B);
    to_unit(mix64(key ^ (e as u64 + 1).wrapping_mul(GOLDEN)))
}

/// Per-edge labels of one percolation sample, evaluated lazily.
///
/// An edge is open at parameter `p` iff its label is `< p`, so `p = 0` closes
/// everything and `p = 1` opens everything, and the samples are monotone in `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeLabelSample {
    pub seed: u64,
}

impl EdgeLabelSample {
    pub fn new(seed: u64) -> Self {
        EdgeLabelSample { seed }
    }

    /// Stream used by trial `t` of an experiment seeded with `seed`.
    pub fn for_trial(seed: u64, t: u64) -> Self {
        EdgeLabelSample { seed: seed.wrapping_add(t) }
    }

    #[inline]
    pub fn label(&self, e: u32) -> f64 {
        edge_label(self.seed, e)
    }

    #[inline]
    pub fn is_open(&self, e: u32, p: f64) -> bool {
        self.label(e) < p
    }

    /// Materialise labels for edges `0..edge_count`.
    pub fn to_vec(&self, edge_count: usize) -> Vec<f64> {
        (0..edge_count as u32).map(|e| self.label(e)).collect()
    }
}

pub fn sample_labels(g: &crate::graph::Graph, seed: u64) -> EdgeLabelSample {
    let _ = g;
    EdgeLabelSample::new(seed)
}

/// Small sequential generator (SplitMix64) for random test instances,
/// bootstrap resampling and the like.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    pub fn next_f64(&mut self) -> f64 {
        to_unit(self.next_u64())
    }

    /// Uniform integer in `0..n` (n > 0), via Lemire's multiply-shift.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}
