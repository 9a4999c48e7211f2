use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::par::Execution;
use crate::rng;

/// Samples per Monte Carlo chunk.
pub const MC_CHUNK: usize = 512;

/// Running mean / variance (Welford), mergeable across chunks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct McStats {
    pub count: usize,
    pub mean: f64,
    m2: f64,
}

impl McStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. pairwise merge.
    pub fn merge(self, other: McStats) -> McStats {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        McStats { count, mean, m2 }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Averages `draw` over `samples` draws in seeded chunks.
pub fn mc_estimate<F>(samples: usize, seed: u64, exec: Execution, draw: F) -> Result<McStats>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Send + Sync,
{
    let chunks = samples.div_ceil(MC_CHUNK);
    let per_chunk = exec.map_indexed(chunks, |c| {
        let mut rng = rng::stream(seed, c as u64);
        let len = MC_CHUNK.min(samples - c * MC_CHUNK);
        let mut stats = McStats::default();
        for _ in 0..len {
            stats.push(draw(&mut rng)?);
        }
        Ok(stats)
    });
    per_chunk
        .into_iter()
        .try_fold(McStats::default(), |acc, s: Result<McStats>| Ok(acc.merge(s?)))
}
