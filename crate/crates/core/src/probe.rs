//! Monte Carlo probes over random directions.
//!
//! Samples are drawn in fixed-size chunks, chunk `k` from stream `k` of the
//! seed, so the result does not depend on how chunks are scheduled.

use crate::exec::Execution;
use crate::linalg::CVector;
use crate::random::Sampler;

const CHUNK: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeExtrema {
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

/// Extrema of `value(f)` over `samples` random unit vectors in `C^dim`.
pub fn sample_extrema<F>(dim: usize, samples: usize, seed: u64, exec: Execution, value: F) -> ProbeExtrema
where
    F: Fn(&CVector) -> f64 + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts = exec.map_range(chunks, |k| {
        let mut s = Sampler::stream(seed, k as u64);
        let n = CHUNK.min(samples - k * CHUNK);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..n {
            let v = s.vector(dim).into_inner();
            let norm = v.norm();
            if norm == 0.0 {
                continue;
            }
            let x = value(&(v / crate::linalg::c(norm)));
            lo = lo.min(x);
            hi = hi.max(x);
        }
        (lo, hi)
    });
    let (min, max) = parts
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (lo, hi)| (a.min(lo), b.max(hi)));
    ProbeExtrema { min, max, samples }
}
