//! Monte Carlo tails of sums.

use rayon::prelude::*;

use crate::dist::SemiRvDistribution;
use crate::error::{Error, Result};
use crate::rng::UniformStream;
use crate::stats::ProportionEstimate;

pub(crate) const BLOCK: usize = 1 << 16;

/// Estimate of `P(X1 + ... + Xn > x)` with a Wilson 95% interval.
pub fn mc_conv_tail(
    ds: &[SemiRvDistribution],
    x: f64,
    sample_count: usize,
    seed: u64,
) -> Result<ProportionEstimate> {
    if sample_count < 10_000 {
        return Err(Error::Precondition(format!(
            "at least 10^4 samples are required, got {sample_count}"
        )));
    }
    if ds.is_empty() || ds.len() > 1 << 16 {
        return Err(Error::Precondition(
            "between 1 and 65536 distributions are required".into(),
        ));
    }
    let blocks = sample_count.div_ceil(BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let n = BLOCK.min(sample_count - b * BLOCK);
            let mut streams: Vec<UniformStream> = (0..ds.len())
                .map(|i| UniformStream::new(seed, ((b as u64) << 16) | i as u64))
                .collect();
            let mut hits = 0u64;
            for _ in 0..n {
                let mut total = 0.0;
                for (d, s) in ds.iter().zip(streams.iter_mut()) {
                    total += d.tail_inverse(s.next_open01());
                }
                if total > x {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    Ok(ProportionEstimate::from_counts(
        hits,
        sample_count as u64,
        seed,
    ))
}
