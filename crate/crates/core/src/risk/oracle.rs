use super::model::{NegativePart, RiskModelConfig};
use crate::dist::SemiRvDistribution;
use crate::error::{Error, Result};
use crate::oracle::{convolve, TailBracket};
use crate::quad::NeumaierSum;
use crate::scaled::Scaled;

const MAX_CELLS: usize = 1 << 15;

/// Log-domain grid with step `step` on `[0, ln max(x)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskGridPlan {
    pub step: f64,
    pub max_relative_width: Option<f64>,
}

impl RiskGridPlan {
    pub fn new(step: f64) -> Self {
        RiskGridPlan {
            step,
            max_relative_width: None,
        }
    }

    pub fn with_max_relative_width(mut self, width: f64) -> Self {
        self.max_relative_width = Some(width);
        self
    }
}

impl Default for RiskGridPlan {
    fn default() -> Self {
        RiskGridPlan::new(1.0 / 1024.0)
    }
}

/// Point masses at `ln`-values `k h`, `k = 0..=K`, plus the mass beyond `K h`.
#[derive(Debug, Clone)]
struct Chain {
    mass: Vec<f64>,
    overflow: f64,
}

impl Chain {
    fn inside(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Mass strictly above `t`.
    fn tail(&self, t: f64, step: f64) -> f64 {
        let first = if t < 0.0 {
            0
        } else {
            (t / step).floor() as usize + 1
        };
        let mut s = NeumaierSum::new();
        for &m in self.mass.iter().skip(first) {
            s.add(m);
        }
        s.add(self.overflow);
        s.value().min(1.0)
    }
}

/// Stochastic lower and upper discretizations of a log-domain variable.
fn discretize(d: &SemiRvDistribution, step: f64, k_max: usize) -> (Chain, Chain) {
    let tail = |k: usize| d.tail(k as f64 * step);
    let mut cell = vec![0.0; k_max + 1];
    cell[0] = 1.0 - tail(0);
    let mut prev = tail(0);
    for (k, c) in cell.iter_mut().enumerate().skip(1) {
        let cur = tail(k);
        *c = if prev > 0.0 && cur > 0.0 {
            prev * -(cur.ln() - prev.ln()).exp_m1()
        } else {
            prev - cur
        };
        prev = cur;
    }
    let upper = Chain {
        mass: cell.clone(),
        overflow: prev,
    };
    let mut lower = vec![0.0; k_max + 1];
    lower[0] = cell[0];
    for k in 1..=k_max {
        lower[k - 1] += cell[k];
    }
    lower[k_max] += prev;
    (
        Chain {
            mass: lower,
            overflow: 0.0,
        },
        upper,
    )
}

/// Law of `e^a * e^b` on the grid.
fn product(a: &Chain, b: &Chain) -> Chain {
    let k_max = a.mass.len() - 1;
    let conv = convolve(&a.mass, &b.mass);
    let beyond: f64 = conv[k_max + 1..].iter().sum();
    Chain {
        mass: conv[..=k_max].to_vec(),
        overflow: a.overflow * (b.inside() + b.overflow) + a.inside() * b.overflow + beyond,
    }
}

/// Law of `e^a + e^b`, rounding `ln` of each sum down (`round_up = false`) or up.
fn sum(a: &Chain, b: &Chain, step: f64, round_up: bool) -> Chain {
    let k_max = a.mass.len() - 1;
    let offsets: Vec<usize> = (0..=k_max)
        .map(|d| {
            let v = (-(d as f64) * step).exp().ln_1p() / step;
            if round_up {
                (v - 1e-9).ceil() as usize
            } else {
                (v - 1e-9).floor().max(0.0) as usize
            }
        })
        .collect();
    let mut out = vec![0.0; 2 * k_max + offsets[0] + 2];
    for (i, &p) in a.mass.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (j, &q) in b.mass.iter().enumerate() {
            let idx = if i >= j {
                i + offsets[i - j]
            } else {
                j + offsets[j - i]
            };
            out[idx] += p * q;
        }
    }
    let beyond: f64 = out[k_max + 1..].iter().sum();
    out.truncate(k_max + 1);
    Chain {
        mass: out,
        overflow: a.overflow * (b.inside() + b.overflow) + a.inside() * b.overflow + beyond,
    }
}

/// Bracketed `P(S_n > x)` from the backward recursion `T <- Y (X + T)` on a log grid.
///
/// Lower and upper chains round every value down and up to grid points, so the true
/// tail lies between the two chain tails.
pub fn sn_tail_oracle_grid(
    config: &RiskModelConfig,
    x_grid: &[f64],
    plan: &RiskGridPlan,
) -> Result<Vec<TailBracket>> {
    if config.negative_part() != NegativePart::None {
        return Err(Error::UnsupportedCase(
            "the grid recursion covers positive insurance risks only".into(),
        ));
    }
    if config.n() > 6 {
        return Err(Error::Precondition(format!(
            "horizon at most 6 is supported, got {}",
            config.n()
        )));
    }
    if !(plan.step > 0.0 && plan.step.is_finite()) {
        return Err(Error::Precondition(format!(
            "grid step must be positive, got {}",
            plan.step
        )));
    }
    if x_grid.is_empty() || x_grid.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(
            "x grid must be nonempty with positive finite values".into(),
        ));
    }
    let t_max = x_grid.iter().map(|x| x.ln()).fold(0.0, f64::max);
    let k_max = (t_max / plan.step).ceil() as usize + 1;
    if k_max > MAX_CELLS {
        return Err(Error::Precondition(format!(
            "{k_max} cells exceed the limit of {MAX_CELLS}; increase the step"
        )));
    }
    let n = config.n();
    let xs: Vec<(Chain, Chain)> = config
        .insurance()
        .iter()
        .map(|d| discretize(d, plan.step, k_max))
        .collect();
    let ys: Vec<(Chain, Chain)> = config
        .financial()
        .iter()
        .map(|d| discretize(d, plan.step, k_max))
        .collect();
    let mut lo = product(&ys[n - 1].0, &xs[n - 1].0);
    let mut hi = product(&ys[n - 1].1, &xs[n - 1].1);
    for k in (0..n - 1).rev() {
        lo = product(&ys[k].0, &sum(&xs[k].0, &lo, plan.step, false));
        hi = product(&ys[k].1, &sum(&xs[k].1, &hi, plan.step, true));
    }
    let out: Vec<TailBracket> = x_grid
        .iter()
        .map(|&x| TailBracket {
            x,
            lower: Scaled::from_f64(lo.tail(x.ln(), plan.step)),
            upper: Scaled::from_f64(hi.tail(x.ln(), plan.step)),
        })
        .collect();
    if let Some(limit) = plan.max_relative_width {
        if let Some(b) = out.iter().find(|b| b.relative_width() > limit) {
            return Err(Error::Accuracy {
                context: format!("risk grid bracket at x = {} (step {})", b.x, plan.step),
                achieved: b.relative_width(),
                requested: limit,
            });
        }
    }
    Ok(out)
}
