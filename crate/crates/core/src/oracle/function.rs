//! Function convolutions `f1 ⊗ f2 (x) = int_0^x f1(x - y) f2(y) dy` and their n-fold iterates.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interp::UniformCubic;
use crate::quad::{integrate, partition, QuadSettings};
use crate::scaled::Scaled;
use crate::special::ln_gamma;
use crate::tailfn::{geometric_seeds, TailFunctionSpec};

const PAIR_REL_TOL: f64 = 1e-9;
const TABLE_REL_TOL: f64 = 1e-11;
const RICHARDSON_TOL: f64 = 1e-6;
const INITIAL_DU: f64 = 1.0 / 32.0;
const MIN_DU: f64 = 1.0 / 1024.0;

/// `int_0^x exp(ln_a(x - y) + ln_b(y)) dy` with the integrand normalized by its largest probe value.
pub(crate) fn log_convolve<A, B>(
    ln_a: A,
    ln_b: B,
    breaks_a: &[f64],
    breaks_b: &[f64],
    x: f64,
    rel_tol: f64,
) -> Result<Scaled>
where
    A: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    if x <= 0.0 {
        return Ok(Scaled::ZERO);
    }
    let log_integrand = |y: f64| ln_a(x - y) + ln_b(y);
    let mut ln_ref = f64::NEG_INFINITY;
    for i in 0..=32 {
        ln_ref = ln_ref.max(log_integrand(x * i as f64 / 32.0));
    }
    for &b in breaks_b.iter().chain(breaks_a.iter()) {
        if b > 0.0 && b < x {
            ln_ref = ln_ref.max(log_integrand(b)).max(log_integrand(x - b));
        }
    }
    if ln_ref == f64::NEG_INFINITY {
        return Ok(Scaled::ZERO);
    }
    let mut extra: Vec<f64> = breaks_b.to_vec();
    extra.extend(breaks_a.iter().map(|b| x - b));
    extra.push(0.5 * x);
    extra.extend(geometric_seeds(0.0, x));
    extra.extend(geometric_seeds(x, 0.0));
    let pts = partition(0.0, x, extra);
    let integrand = |y: f64| {
        let v = log_integrand(y) - ln_ref;
        if v.is_nan() {
            0.0
        } else {
            v.exp()
        }
    };
    let r = integrate(integrand, &pts, QuadSettings::with_rel_tol(rel_tol))?;
    Ok(Scaled::new(r.value, ln_ref))
}

/// `f1 ⊗ f2 (x)` in scaled form.
pub fn function_convolve_scaled(
    f1: &TailFunctionSpec,
    f2: &TailFunctionSpec,
    x: f64,
) -> Result<Scaled> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "x must be finite and nonnegative, got {x}"
        )));
    }
    log_convolve(
        |t| f1.ln_f(t),
        |t| f2.ln_f(t),
        &f1.breakpoints(x),
        &f2.breakpoints(x),
        x,
        PAIR_REL_TOL,
    )
}

/// `f1 ⊗ f2 (x)`.
pub fn function_convolve(f1: &TailFunctionSpec, f2: &TailFunctionSpec, x: f64) -> Result<f64> {
    finite_value(function_convolve_scaled(f1, f2, x)?)
}

fn finite_value(s: Scaled) -> Result<f64> {
    let v = s.value();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!(
            "value exp({}) is outside the f64 range",
            s.ln()
        )))
    }
}

/// Iterated convolutions tabulated on `u = ln(1 + y)`.
///
/// Level `m` (the convolution of the first `m` functions, `m >= 2`) is stored as
/// `ln(g_m(y) / y^{m-1})`, which stays bounded at the origin.
pub(crate) struct ConvolutionTable {
    du: f64,
    levels: Vec<UniformCubic>,
}

impl ConvolutionTable {
    /// Tabulates levels `2..=depth` on `[0, y_max]`.
    pub(crate) fn build(
        fs: &[TailFunctionSpec],
        depth: usize,
        y_max: f64,
        du: f64,
    ) -> Result<Self> {
        assert!(depth >= 2 && depth <= fs.len());
        let nodes = ((y_max.ln_1p() / du).ceil() as usize).max(4) + 1;
        let ys: Vec<f64> = (0..nodes).map(|j| (j as f64 * du).exp_m1()).collect();
        let mut table = ConvolutionTable {
            du,
            levels: Vec::new(),
        };
        let mut ln_prod_at_zero = fs[0].ln_f(0.0);
        for m in 2..=depth {
            let next = &fs[m - 1];
            ln_prod_at_zero += next.ln_f(0.0);
            let values: Result<Vec<f64>> = ys
                .par_iter()
                .enumerate()
                .map(|(j, &y)| {
                    if j == 0 {
                        return Ok(ln_prod_at_zero - ln_gamma(m as f64)?);
                    }
                    let g = if m == 2 {
                        log_convolve(
                            |t| fs[0].ln_f(t),
                            |t| next.ln_f(t),
                            &fs[0].breakpoints(y),
                            &next.breakpoints(y),
                            y,
                            TABLE_REL_TOL,
                        )?
                    } else {
                        log_convolve(
                            |t| table.ln_level(m - 1, t),
                            |t| next.ln_f(t),
                            &[],
                            &next.breakpoints(y),
                            y,
                            TABLE_REL_TOL,
                        )?
                    };
                    Ok(g.ln() - (m - 1) as f64 * y.ln())
                })
                .collect();
            table.levels.push(UniformCubic::new(0.0, du, values?));
        }
        Ok(table)
    }

    /// `ln g_m(y)`; `-inf` at `y <= 0`.
    pub(crate) fn ln_level(&self, m: usize, y: f64) -> f64 {
        if y <= 0.0 {
            return f64::NEG_INFINITY;
        }
        (m - 1) as f64 * y.ln() + self.levels[m - 2].eval(y.ln_1p())
    }

    pub(crate) fn du(&self) -> f64 {
        self.du
    }
}

/// Repeats `compute(du)` with halved steps until two successive results agree to `RICHARDSON_TOL`.
pub(crate) fn refine_until_stable<F>(context: &str, mut compute: F) -> Result<Scaled>
where
    F: FnMut(f64) -> Result<Scaled>,
{
    let mut du = INITIAL_DU;
    let mut prev = compute(du)?;
    loop {
        du *= 0.5;
        let next = compute(du)?;
        let rel = (prev.ratio(&next) - 1.0).abs();
        if rel <= RICHARDSON_TOL || (prev.mantissa() == 0.0 && next.mantissa() == 0.0) {
            return Ok(next);
        }
        if du <= MIN_DU {
            return Err(Error::Accuracy {
                context: context.into(),
                achieved: rel,
                requested: RICHARDSON_TOL,
            });
        }
        prev = next;
    }
}

/// `f1 ⊗ ... ⊗ fn (x)` in scaled form.
pub fn function_convolve_n_scaled(fs: &[TailFunctionSpec], x: f64) -> Result<Scaled> {
    if fs.len() < 2 {
        return Err(Error::Precondition(
            "at least two functions are required".into(),
        ));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "x must be finite and nonnegative, got {x}"
        )));
    }
    if fs.len() == 2 {
        return function_convolve_scaled(&fs[0], &fs[1], x);
    }
    if x == 0.0 {
        return Ok(Scaled::ZERO);
    }
    let n = fs.len();
    refine_until_stable("iterated function convolution", |du| {
        let table = ConvolutionTable::build(fs, n - 1, x, du)?;
        let last = &fs[n - 1];
        log_convolve(
            |t| table.ln_level(n - 1, t),
            |t| last.ln_f(t),
            &[],
            &last.breakpoints(x),
            x,
            TABLE_REL_TOL,
        )
    })
}

/// `f1 ⊗ ... ⊗ fn (x)`.
pub fn function_convolve_n(fs: &[TailFunctionSpec], x: f64) -> Result<f64> {
    finite_value(function_convolve_n_scaled(fs, x)?)
}

/// `int_0^x (f1 ⊗ ... ⊗ fn)(y) dy`, with `n = 1` giving `f1^I(x)`.
pub fn convolution_integral_scaled(fs: &[TailFunctionSpec], x: f64) -> Result<Scaled> {
    match fs.len() {
        0 => Err(Error::Precondition(
            "at least one function is required".into(),
        )),
        1 => fs[0].f_integral_scaled(x),
        n => {
            if x <= 0.0 {
                return Ok(Scaled::ZERO);
            }
            refine_until_stable("integrated function convolution", |du| {
                let table = ConvolutionTable::build(fs, n, x, du)?;
                let u_max = x.ln_1p();
                let log_integrand = |u: f64| table.ln_level(n, u.exp_m1()) + u;
                let nodes = (u_max / table.du()).ceil() as usize;
                let mut ln_ref = f64::NEG_INFINITY;
                for j in 1..=nodes {
                    ln_ref = ln_ref.max(log_integrand((j as f64 * table.du()).min(u_max)));
                }
                let pts = partition(
                    0.0,
                    u_max,
                    (1..nodes).step_by(8).map(|j| j as f64 * table.du()),
                );
                let r = integrate(
                    |u| (log_integrand(u) - ln_ref).exp(),
                    &pts,
                    QuadSettings::with_rel_tol(TABLE_REL_TOL),
                )?;
                Ok(Scaled::new(r.value, ln_ref))
            })
        }
    }
}
