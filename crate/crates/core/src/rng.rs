// SPDX-License-Identifier: Apache-2.0

//! Seed streams.
//!
//! Every random draw descends from one root seed. A sub-stream is addressed
//! by a label and an index; the pair is hashed into the 64-bit ChaCha stream
//! id, so `(root, label, index)` fixes the stream completely. Monte-Carlo
//! work is cut into fixed-size chunks, chunk `c` drawing from index `c`, and
//! partial results are merged in chunk order. The thread count therefore
//! never changes a result.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples per Monte-Carlo chunk.
pub const CHUNK: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedStreams {
    root: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

impl SeedStreams {
    pub fn new(root: u64) -> Self {
        Self { root }
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn stream(&self, label: &str, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.root);
        rng.set_stream(splitmix64(fnv1a(label) ^ splitmix64(index)));
        rng
    }

    /// A child family, e.g. one per system inside a scenario.
    pub fn child(&self, label: &str) -> SeedStreams {
        SeedStreams::new(splitmix64(self.root ^ fnv1a(label)))
    }

    /// Runs `work(rng, count)` over `total` samples split into [`CHUNK`]-sized
    /// pieces, in parallel, returning the per-chunk results in chunk order.
    pub fn chunked<T, F>(&self, label: &str, total: usize, work: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
    {
        let chunks = total.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let count = CHUNK.min(total - c * CHUNK);
                let mut rng = self.stream(label, c as u64);
                work(&mut rng, count)
            })
            .collect()
    }
}

/// Running mean and variance (Welford) with an order-preserving merge.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MeanAcc {
    count: u64,
    mean: f64,
    m2: f64,
}

impl MeanAcc {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &MeanAcc) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
    }

    pub fn merged(parts: &[MeanAcc]) -> MeanAcc {
        let mut acc = MeanAcc::default();
        for p in parts {
            acc.merge(p);
        }
        acc
    }
}
