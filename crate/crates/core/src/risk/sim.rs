use rayon::prelude::*;

use super::model::{NegativePart, RiskModelConfig};
use crate::error::{Error, Result};
use crate::oracle::BLOCK;
use crate::rng::UniformStream;
use crate::stats::ProportionEstimate;

/// Wilson estimate of a finite-time ruin probability.
pub type RuinEstimate = ProportionEstimate;

/// Discounted aggregate loss `S_n` and running maximum `M_n = max_{0<=k<=n} S_k` of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub s_n: f64,
    pub m_n: f64,
}

/// `psi(x, horizon)` with the companion estimate of `P(S_horizon > x)` on the same draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuinReport {
    pub x: f64,
    pub horizon: usize,
    pub psi: RuinEstimate,
    pub sn: ProportionEstimate,
}

/// Simulates `count` paths of block `block`, calling `visit(S_h, M_h)` at horizon `h` of each path.
///
/// Every path consumes the draws of all `n` periods, so shorter horizons share their prefix.
fn run_block(
    config: &RiskModelConfig,
    seed: u64,
    block: usize,
    count: usize,
    horizon: usize,
    mut visit: impl FnMut(f64, f64),
) {
    let mut rng = UniformStream::new(seed, block as u64);
    let n = config.n();
    let neg = config.negative_part();
    for _ in 0..count {
        let (mut s, mut m, mut discount) = (0.0f64, 0.0f64, 1.0f64);
        let (mut s_h, mut m_h) = (0.0, 0.0);
        for i in 0..n {
            let ux = rng.next_open01();
            let uy = rng.next_open01();
            let x = match neg {
                NegativePart::None => config.insurance()[i].tail_inverse(ux).exp(),
                NegativePart::ShiftedExp { rate, mass } => {
                    let sel = rng.next_open01();
                    if sel < mass {
                        ux.ln() / rate
                    } else {
                        config.insurance()[i].tail_inverse(ux).exp()
                    }
                }
            };
            discount *= config.financial()[i].tail_inverse(uy).exp();
            s += x * discount;
            m = m.max(s);
            if i + 1 == horizon {
                s_h = s;
                m_h = m;
            }
        }
        visit(s_h, m_h);
    }
}

fn check_count(sample_count: usize) -> Result<()> {
    if sample_count == 0 {
        return Err(Error::Precondition(
            "sample count must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Per-path `(S_n, M_n)`, deterministic per seed.
pub fn simulate_paths(
    config: &RiskModelConfig,
    sample_count: usize,
    seed: u64,
) -> Result<Vec<PathSample>> {
    check_count(sample_count)?;
    let n = config.n();
    let blocks = sample_count.div_ceil(BLOCK);
    let parts: Vec<Vec<PathSample>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = BLOCK.min(sample_count - b * BLOCK);
            let mut out = Vec::with_capacity(count);
            run_block(config, seed, b, count, n, |s_n, m_n| {
                out.push(PathSample { s_n, m_n })
            });
            out
        })
        .collect();
    Ok(parts.concat())
}

/// Ruin and `S_horizon` tail estimates at every `x` from one set of paths.
pub fn ruin_mc_grid(
    config: &RiskModelConfig,
    xs: &[f64],
    horizon: usize,
    sample_count: usize,
    seed: u64,
) -> Result<Vec<RuinReport>> {
    check_count(sample_count)?;
    if horizon == 0 || horizon > config.n() {
        return Err(Error::Precondition(format!(
            "horizon must lie in 1..={}, got {horizon}",
            config.n()
        )));
    }
    if let Some(&x) = xs.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::Domain(format!(
            "initial capital must be positive, got {x}"
        )));
    }
    let blocks = sample_count.div_ceil(BLOCK);
    let counts: Vec<(Vec<u64>, Vec<u64>)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = BLOCK.min(sample_count - b * BLOCK);
            let mut psi = vec![0u64; xs.len()];
            let mut sn = vec![0u64; xs.len()];
            run_block(config, seed, b, count, horizon, |s, m| {
                for (j, &x) in xs.iter().enumerate() {
                    psi[j] += (m > x) as u64;
                    sn[j] += (s > x) as u64;
                }
            });
            (psi, sn)
        })
        .collect();
    let mut psi = vec![0u64; xs.len()];
    let mut sn = vec![0u64; xs.len()];
    for (p, s) in &counts {
        for j in 0..xs.len() {
            psi[j] += p[j];
            sn[j] += s[j];
        }
    }
    let total = sample_count as u64;
    Ok(xs
        .iter()
        .enumerate()
        .map(|(j, &x)| RuinReport {
            x,
            horizon,
            psi: RuinEstimate::from_counts(psi[j], total, seed),
            sn: ProportionEstimate::from_counts(sn[j], total, seed),
        })
        .collect())
}

/// Wilson estimate of `psi(x, horizon) = P(M_horizon > x)`.
pub fn ruin_mc(
    config: &RiskModelConfig,
    x: f64,
    horizon: usize,
    sample_count: usize,
    seed: u64,
) -> Result<RuinReport> {
    Ok(ruin_mc_grid(config, &[x], horizon, sample_count, seed)?[0])
}
