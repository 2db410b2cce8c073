//! Discretized convolution with two-sided Stieltjes brackets.
//!
//! Each variable is split into cells `[j h, (j + 1) h)`. Placing every cell's
//! mass at its left edge gives a stochastically smaller variable, placing it at
//! the right edge a larger one, so the two read-outs bracket the true tail.
//! Masses are tilted by `e^{tau j h}` with `tau` the smallest `alpha`, which
//! keeps deep tails representable.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::dist::{Kind, SemiRvDistribution};
use crate::error::{Error, Result};
use crate::quad::NeumaierSum;
use crate::scaled::Scaled;

const DIRECT_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryRule {
    /// Cell mass placed at the left edge (lower bracket).
    MassToCell,
    /// Cell mass placed at the right edge (upper bracket).
    MassToRightEdge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConvolutionPlan {
    pub step: f64,
    pub x_max: f64,
    pub boundary: BoundaryRule,
    /// Largest accepted `(upper - lower) / midpoint`; `None` accepts any width.
    pub max_relative_width: Option<f64>,
}

impl GridConvolutionPlan {
    pub fn new(step: f64, x_max: f64) -> Self {
        GridConvolutionPlan {
            step,
            x_max,
            boundary: BoundaryRule::MassToCell,
            max_relative_width: None,
        }
    }

    pub fn with_max_relative_width(mut self, width: f64) -> Self {
        self.max_relative_width = Some(width);
        self
    }

    /// Index of the last cell; `step * (cells) >= x_max`.
    pub fn last_cell(&self) -> usize {
        (self.x_max / self.step).ceil() as usize
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0)
            || !(self.x_max > 0.0)
            || !self.step.is_finite()
            || !self.x_max.is_finite()
        {
            return Err(Error::Precondition(format!(
                "grid step and x_max must be positive, got {} and {}",
                self.step, self.x_max
            )));
        }
        Ok(())
    }
}

/// A tail value known to lie in `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBracket {
    pub x: f64,
    pub lower: Scaled,
    pub upper: Scaled,
}

impl TailBracket {
    pub fn midpoint(&self) -> Scaled {
        self.lower.add(&self.upper).times(0.5)
    }

    /// `(upper - lower) / midpoint`.
    pub fn relative_width(&self) -> f64 {
        let mid = self.midpoint();
        (self.upper.ratio(&mid) - self.lower.ratio(&mid)).abs()
    }

    pub fn contains(&self, value: &Scaled) -> bool {
        self.lower.ln() <= value.ln() && value.ln() <= self.upper.ln()
    }
}

/// Tilted cell masses of one variable on `0..=K`, plus the tilted mass beyond `K`.
#[derive(Debug, Clone)]
pub struct CellMasses {
    pub tilt: f64,
    pub step: f64,
    /// `P(X in [j h, (j + 1) h)) e^{tilt j h}`.
    pub masses: Vec<f64>,
    /// `P(X >= (K + 1) h) e^{tilt K h}`.
    pub overflow: f64,
}

impl CellMasses {
    /// Untilted total, which equals one up to rounding.
    pub fn total_mass(&self) -> f64 {
        let mut s = NeumaierSum::new();
        for (j, m) in self.masses.iter().enumerate() {
            s.add(m * (-self.tilt * j as f64 * self.step).exp());
        }
        let k = self.masses.len() - 1;
        s.add(self.overflow * (-self.tilt * k as f64 * self.step).exp());
        s.value()
    }
}

/// `ln P(X >= a)` for a continuous distribution.
fn ln_survival_closed(d: &SemiRvDistribution, a: f64) -> f64 {
    if a <= d.x0() {
        0.0
    } else {
        d.log_kernel(a).min(0.0)
    }
}

pub fn discretize(
    d: &SemiRvDistribution,
    plan: &GridConvolutionPlan,
    tilt: f64,
) -> Result<CellMasses> {
    plan.validate()?;
    if d.kind() != Kind::Continuous {
        return Err(Error::Usage(
            "grid convolution needs continuous distributions".into(),
        ));
    }
    let h = plan.step;
    let k = plan.last_cell();
    let masses = (0..=k)
        .map(|j| {
            let a = j as f64 * h;
            let b = (j + 1) as f64 * h;
            let la = ln_survival_closed(d, a);
            let lb = ln_survival_closed(d, b);
            if lb >= la {
                return 0.0;
            }
            (la + tilt * a).exp() * -(lb - la).exp_m1()
        })
        .collect();
    let overflow = (ln_survival_closed(d, (k + 1) as f64 * h) + tilt * k as f64 * h).exp();
    Ok(CellMasses {
        tilt,
        step: h,
        masses,
        overflow,
    })
}

fn convolve_direct(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn fft_length(min_len: usize) -> usize {
    let mut best = min_len.next_power_of_two();
    let mut p3 = 1usize;
    while p3 < best {
        let mut n = p3;
        while n < min_len {
            n *= 2;
        }
        best = best.min(n);
        p3 *= 3;
    }
    best
}

/// Linear convolution of two nonnegative real sequences via one complex FFT pair.
fn convolve_fft(a: &[f64], b: &[f64]) -> Vec<f64> {
    let out_len = a.len() + b.len() - 1;
    let len = fft_length(out_len);
    let mut buf = vec![Complex::new(0.0, 0.0); len];
    for (i, &x) in a.iter().enumerate() {
        buf[i].re = x;
    }
    for (i, &y) in b.iter().enumerate() {
        buf[i].im = y;
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    // Split the packed transform into the two real transforms and multiply.
    for k in 0..=len / 2 {
        let m = (len - k) % len;
        let zk = buf[k];
        let zm = buf[m].conj();
        let ak = (zk + zm) * 0.5;
        let bk = (zk - zm) * Complex::new(0.0, -0.5);
        let pk = ak * bk;
        buf[k] = pk;
        buf[m] = pk.conj();
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    let scale = 1.0 / len as f64;
    buf[..out_len]
        .iter()
        .map(|z| (z.re * scale).max(0.0))
        .collect()
}

pub(crate) fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.len().max(b.len()) < DIRECT_LIMIT {
        convolve_direct(a, b)
    } else {
        convolve_fft(a, b)
    }
}

/// Law of the lower-bracket sum on the grid.
#[derive(Debug, Clone)]
pub struct GridConvolution {
    plan: GridConvolutionPlan,
    count: usize,
    sum: CellMasses,
}

impl GridConvolution {
    pub fn new(ds: &[SemiRvDistribution], plan: GridConvolutionPlan) -> Result<Self> {
        plan.validate()?;
        if ds.is_empty() {
            return Err(Error::Precondition(
                "at least one distribution is required".into(),
            ));
        }
        let tilt = ds.iter().map(|d| d.alpha()).fold(f64::INFINITY, f64::min);
        let h = plan.step;
        let k = plan.last_cell();
        let mut sum = discretize(&ds[0], &plan, tilt)?;
        for d in &ds[1..] {
            let next = discretize(d, &plan, tilt)?;
            let full = convolve(&sum.masses, &next.masses);
            let ref_shift = |j: usize| (-tilt * (j - k) as f64 * h).exp();
            let mut overflow = NeumaierSum::new();
            overflow.add(sum.overflow);
            overflow.add(next.overflow);
            overflow.add(-sum.overflow * next.overflow * (-tilt * k as f64 * h).exp());
            for (j, v) in full.iter().enumerate().skip(k + 1) {
                overflow.add(v * ref_shift(j));
            }
            sum = CellMasses {
                tilt,
                step: h,
                masses: full[..=k].to_vec(),
                overflow: overflow.value().max(0.0),
            };
        }
        Ok(GridConvolution {
            plan,
            count: ds.len(),
            sum,
        })
    }

    /// Tail of the sum at `x` under one boundary rule.
    pub fn tail(&self, x: f64, rule: BoundaryRule) -> Scaled {
        let h = self.plan.step;
        let tilt = self.sum.tilt;
        let k = self.sum.masses.len() - 1;
        let shift = match rule {
            BoundaryRule::MassToCell => 0,
            BoundaryRule::MassToRightEdge => self.count as i64,
        };
        // Cells J count when (J + shift) h > x.
        let first = ((x / h).floor() as i64 + 1 - shift).max(0) as usize;
        let mut s = NeumaierSum::new();
        for j in first..=k {
            s.add(self.sum.masses[j] * (-tilt * (j as f64 * h - x)).exp());
        }
        s.add(self.sum.overflow * (-tilt * (k as f64 * h - x)).exp());
        Scaled::new(s.value(), -tilt * x)
    }

    pub fn bracket(&self, x: f64) -> TailBracket {
        TailBracket {
            x,
            lower: self.tail(x, BoundaryRule::MassToCell),
            upper: self.tail(x, BoundaryRule::MassToRightEdge),
        }
    }
}

/// Bracketed tails `P(X1 + ... + Xn > x)` on `x_grid`.
pub fn conv_tail_n_grid(
    ds: &[SemiRvDistribution],
    plan: &GridConvolutionPlan,
    x_grid: &[f64],
) -> Result<Vec<TailBracket>> {
    let x_top = x_grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let offsets: f64 = ds.iter().map(|d| d.x0()).sum();
    if plan.x_max < x_top + offsets {
        return Err(Error::Precondition(format!(
            "x_max = {} must cover max(x) + sum of cutoffs = {}",
            plan.x_max,
            x_top + offsets
        )));
    }
    let conv = GridConvolution::new(ds, *plan)?;
    let out: Vec<TailBracket> = x_grid.iter().map(|&x| conv.bracket(x)).collect();
    if let Some(limit) = plan.max_relative_width {
        if let Some(b) = out.iter().find(|b| b.relative_width() > limit) {
            return Err(Error::Accuracy {
                context: format!(
                    "grid bracket at x = {} (use a smaller step than {})",
                    b.x, plan.step
                ),
                achieved: b.relative_width(),
                requested: limit,
            });
        }
    }
    Ok(out)
}
