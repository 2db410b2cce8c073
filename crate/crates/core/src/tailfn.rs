//! Parameterized families of positive functions `f` with `V(x) = e^{-alpha x} f(x)`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::quad::{integrate, partition, QuadSettings};
use crate::scaled::Scaled;

const LN4: f64 = std::f64::consts::LN_2 * 2.0;

fn one() -> f64 {
    1.0
}

fn zero() -> f64 {
    0.0
}

/// Parameters of a function built from the Karamata representation
/// `f(x) = c(x) exp(int_a^x eps(y) dy)`, with
/// `c(x) = c0 + c1 e^{-c_rate x}` and `eps(y) = eps_scale (eps_shift + y)^{-eps_power}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KaramataParams {
    #[serde(default = "one")]
    pub c0: f64,
    #[serde(default = "zero")]
    pub c1: f64,
    #[serde(default = "one")]
    pub c_rate: f64,
    pub eps_scale: f64,
    #[serde(default = "one")]
    pub eps_shift: f64,
    #[serde(default = "one")]
    pub eps_power: f64,
    #[serde(default = "zero")]
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Family {
    /// `f(x) = c`.
    Constant {
        #[serde(default = "one")]
        c: f64,
    },
    /// `f(x) = c (1 + x)^gamma`.
    LogPower {
        gamma: f64,
        #[serde(default = "one")]
        c: f64,
    },
    /// `f(x) = c (ln(e + x))^gamma`.
    LogLogPower {
        gamma: f64,
        #[serde(default = "one")]
        c: f64,
    },
    /// `f(x) = exp(c x^beta + d)` with `c > 0`, `0 < beta < 1`.
    ExpPower {
        c: f64,
        beta: f64,
        d: f64,
    },
    /// Sawtooth with `f(x)/x` oscillating between 1 and 2 on every period `[4^k, 4^{k+1})`.
    PiecewiseOscillating {
        #[serde(default = "one")]
        scale: f64,
    },
    KaramataBuilt(KaramataParams),
}

/// Regular-variation index of `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RvIndex {
    Index(f64),
    NotRegularlyVarying,
}

impl RvIndex {
    pub fn value(&self) -> Option<f64> {
        match self {
            RvIndex::Index(g) => Some(*g),
            RvIndex::NotRegularlyVarying => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct TailFunctionSpec {
    family: Family,
    lattice: bool,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    #[serde(flatten)]
    family: Family,
    #[serde(default)]
    lattice: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma_index: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    divergent_integral: Option<Value>,
}

impl TryFrom<RawSpec> for TailFunctionSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        TailFunctionSpec::new(raw.family, raw.lattice)
    }
}

impl From<TailFunctionSpec> for RawSpec {
    fn from(spec: TailFunctionSpec) -> Self {
        let gamma_index = match spec.gamma_index() {
            RvIndex::Index(g) => serde_json::json!(g),
            RvIndex::NotRegularlyVarying => serde_json::json!("not_regularly_varying"),
        };
        RawSpec {
            family: spec.family,
            lattice: spec.lattice,
            gamma_index: Some(gamma_index),
            divergent_integral: Some(Value::Bool(spec.divergent_integral())),
        }
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "parameter {name} is not finite: {v}"
        )))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    check_finite(name, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "parameter {name} must be positive, got {v}"
        )))
    }
}

impl TailFunctionSpec {
    pub fn new(family: Family, lattice: bool) -> Result<Self> {
        match family {
            Family::Constant { c } => check_positive("c", c)?,
            Family::LogPower { gamma, c } | Family::LogLogPower { gamma, c } => {
                check_finite("gamma", gamma)?;
                check_positive("c", c)?;
            }
            Family::ExpPower { c, beta, d } => {
                check_positive("c", c)?;
                check_finite("d", d)?;
                check_finite("beta", beta)?;
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(Error::InvalidSpec(format!(
                        "beta must lie in (0, 1), got {beta}"
                    )));
                }
            }
            Family::PiecewiseOscillating { scale } => check_positive("scale", scale)?,
            Family::KaramataBuilt(p) => {
                check_positive("c0", p.c0)?;
                check_finite("c1", p.c1)?;
                check_positive("c_rate", p.c_rate)?;
                check_finite("eps_scale", p.eps_scale)?;
                check_positive("eps_shift", p.eps_shift)?;
                check_positive("eps_power", p.eps_power)?;
                check_finite("a", p.a)?;
                if p.a < 0.0 {
                    return Err(Error::InvalidSpec(format!(
                        "a must be nonnegative, got {}",
                        p.a
                    )));
                }
                if p.c0 + p.c1 <= 0.0 {
                    return Err(Error::InvalidSpec("c0 + c1 must be positive".into()));
                }
            }
        }
        Ok(TailFunctionSpec { family, lattice })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(Family::Constant { c }, false)
    }

    pub fn log_power(gamma: f64, c: f64) -> Result<Self> {
        Self::new(Family::LogPower { gamma, c }, false)
    }

    pub fn log_log_power(gamma: f64, c: f64) -> Result<Self> {
        Self::new(Family::LogLogPower { gamma, c }, false)
    }

    pub fn exp_power(c: f64, beta: f64, d: f64) -> Result<Self> {
        Self::new(Family::ExpPower { c, beta, d }, false)
    }

    pub fn piecewise_oscillating(scale: f64) -> Result<Self> {
        Self::new(Family::PiecewiseOscillating { scale }, false)
    }

    pub fn karamata(params: KaramataParams) -> Result<Self> {
        Self::new(Family::KaramataBuilt(params), false)
    }

    pub fn with_lattice(mut self, lattice: bool) -> Self {
        self.lattice = lattice;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn lattice(&self) -> bool {
        self.lattice
    }

    /// Exact regular-variation index, declared per family.
    pub fn gamma_index(&self) -> RvIndex {
        match self.family {
            Family::Constant { .. } => RvIndex::Index(0.0),
            Family::LogPower { gamma, .. } => RvIndex::Index(gamma),
            Family::LogLogPower { .. } => RvIndex::Index(0.0),
            Family::ExpPower { .. } | Family::PiecewiseOscillating { .. } => {
                RvIndex::NotRegularlyVarying
            }
            Family::KaramataBuilt(p) => {
                if p.eps_power > 1.0 || p.eps_scale == 0.0 {
                    RvIndex::Index(0.0)
                } else if p.eps_power == 1.0 {
                    RvIndex::Index(p.eps_scale)
                } else {
                    RvIndex::NotRegularlyVarying
                }
            }
        }
    }

    /// Whether `int_0^inf f = inf`, declared per family.
    pub fn divergent_integral(&self) -> bool {
        match self.family {
            Family::Constant { .. }
            | Family::LogLogPower { .. }
            | Family::ExpPower { .. }
            | Family::PiecewiseOscillating { .. } => true,
            Family::LogPower { gamma, .. } => gamma >= -1.0,
            Family::KaramataBuilt(p) => {
                if p.eps_power > 1.0 || p.eps_scale == 0.0 {
                    true
                } else if p.eps_power == 1.0 {
                    p.eps_scale >= -1.0
                } else {
                    p.eps_scale > 0.0
                }
            }
        }
    }

    pub fn is_regularly_varying(&self) -> bool {
        matches!(self.gamma_index(), RvIndex::Index(_))
    }

    fn karamata_eps_integral(p: &KaramataParams, x: f64) -> f64 {
        if x == p.a {
            return 0.0;
        }
        let (lo, hi, sign) = if x > p.a {
            (p.a, x, 1.0)
        } else {
            (x, p.a, -1.0)
        };
        let eps = |y: f64| p.eps_scale * (p.eps_shift + y).powf(-p.eps_power);
        let pts = partition(lo, hi, geometric_seeds(lo, hi));
        let settings = QuadSettings {
            rel_tol: 1e-13,
            abs_tol: 1e-15,
            ..Default::default()
        };
        match integrate(eps, &pts, settings) {
            Ok(r) => sign * r.value,
            Err(Error::Accuracy { .. }) => {
                let loose = QuadSettings::with_rel_tol(1e-10);
                sign * integrate(eps, &pts, loose)
                    .map(|r| r.value)
                    .unwrap_or(f64::NAN)
            }
            Err(_) => f64::NAN,
        }
    }

    /// `ln f(x)` for `x >= 0`; always finite for validated specs.
    pub fn ln_f(&self, x: f64) -> f64 {
        match self.family {
            Family::Constant { c } => c.ln(),
            Family::LogPower { gamma, c } => c.ln() + gamma * x.ln_1p(),
            Family::LogLogPower { gamma, c } => {
                c.ln() + gamma * (std::f64::consts::E + x).ln().ln()
            }
            Family::ExpPower { c, beta, d } => c * x.powf(beta) + d,
            Family::PiecewiseOscillating { scale } => (scale * sawtooth(x).0).ln(),
            Family::KaramataBuilt(p) => {
                (p.c0 + p.c1 * (-p.c_rate * x).exp()).ln() + Self::karamata_eps_integral(&p, x)
            }
        }
    }

    /// `f'(x) / f(x)`; right derivative at breakpoints, `+inf` for ExpPower at 0.
    pub fn ln_f_derivative(&self, x: f64) -> f64 {
        match self.family {
            Family::Constant { .. } => 0.0,
            Family::LogPower { gamma, .. } => gamma / (1.0 + x),
            Family::LogLogPower { gamma, .. } => {
                let s = std::f64::consts::E + x;
                gamma / (s * s.ln())
            }
            Family::ExpPower { c, beta, .. } => {
                if x == 0.0 {
                    f64::INFINITY
                } else {
                    c * beta * x.powf(beta - 1.0)
                }
            }
            Family::PiecewiseOscillating { .. } => {
                let (value, slope) = sawtooth(x);
                slope / value
            }
            Family::KaramataBuilt(p) => {
                let e = (-p.c_rate * x).exp();
                let c = p.c0 + p.c1 * e;
                -p.c1 * p.c_rate * e / c + p.eps_scale * (p.eps_shift + x).powf(-p.eps_power)
            }
        }
    }

    fn check_x(x: f64) -> Result<()> {
        if x >= 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "f is defined for finite x >= 0, got {x}"
            )))
        }
    }

    pub fn eval_f(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        let v = match self.family {
            Family::Constant { c } => c,
            Family::LogPower { gamma, c } => c * (1.0 + x).powf(gamma),
            Family::LogLogPower { gamma, c } => c * (std::f64::consts::E + x).ln().powf(gamma),
            Family::PiecewiseOscillating { scale } => scale * sawtooth(x).0,
            _ => self.ln_f(x).exp(),
        };
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::Domain(format!("f({x}) is outside the f64 range")))
        }
    }

    pub fn eval_f_prime(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        if let Family::PiecewiseOscillating { scale } = self.family {
            if let Some((left, right)) = sawtooth_kink(x) {
                return Err(Error::OneSidedDerivative {
                    x,
                    left: left * scale,
                    right: right * scale,
                });
            }
        }
        if matches!(self.family, Family::ExpPower { .. }) && x == 0.0 {
            return Err(Error::Domain(
                "ExpPower has an infinite derivative at 0".into(),
            ));
        }
        match self.family {
            Family::Constant { .. } => Ok(0.0),
            Family::LogPower { gamma, c } => Ok(c * gamma * (1.0 + x).powf(gamma - 1.0)),
            Family::PiecewiseOscillating { scale } => Ok(scale * sawtooth(x).1),
            _ => Ok(self.eval_f(x)? * self.ln_f_derivative(x)),
        }
    }

    /// Kinks of `f` in `(0, x_max]`.
    pub fn breakpoints(&self, x_max: f64) -> Vec<f64> {
        match self.family {
            Family::PiecewiseOscillating { .. } => {
                let mut out = Vec::new();
                if x_max >= 1.0 {
                    out.push(1.0);
                }
                let mut p = 1.0;
                while p <= x_max {
                    for m in [2.0, 2.5, 3.0, 4.0] {
                        let b = m * p;
                        if b <= x_max {
                            out.push(b);
                        }
                    }
                    p *= 4.0;
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// `f^I(x) = int_0^x f` in scaled form.
    pub fn f_integral_scaled(&self, x: f64) -> Result<Scaled> {
        Self::check_x(x)?;
        if x == 0.0 {
            return Ok(Scaled::ZERO);
        }
        match self.family {
            Family::Constant { c } => Ok(Scaled::from_f64(c * x)),
            Family::LogPower { gamma, c } => {
                let l = x.ln_1p();
                let g1 = gamma + 1.0;
                if g1 == 0.0 {
                    Ok(Scaled::from_f64(c * l))
                } else if g1 * l < 700.0 {
                    Ok(Scaled::from_f64(c * (g1 * l).exp_m1() / g1))
                } else {
                    let m = -(-g1 * l).exp_m1() / g1;
                    Ok(Scaled::new(c * m, g1 * l))
                }
            }
            _ => {
                let ln_ref = self.ln_f(x).max(self.ln_f(0.0)).max(self.ln_f(0.5 * x));
                let mut extra = self.breakpoints(x);
                extra.push(0.5 * x);
                extra.extend(geometric_seeds(0.0, x));
                let pts = partition(0.0, x, extra);
                let r = integrate(
                    |y| (self.ln_f(y) - ln_ref).exp(),
                    &pts,
                    QuadSettings::with_rel_tol(1e-10),
                )?;
                Ok(Scaled::new(r.value, ln_ref))
            }
        }
    }

    pub fn f_integral(&self, x: f64) -> Result<f64> {
        let s = self.f_integral_scaled(x)?;
        let v = s.value();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("f^I({x}) is outside the f64 range")))
        }
    }

    /// `log(f(x t) / f(x)) / log t` for every `x` in the grid.
    pub fn rv_index_estimate(&self, t: f64, x_grid: &[f64]) -> Result<Vec<f64>> {
        if !(t > 1.0) {
            return Err(Error::Domain(format!("t must exceed 1, got {t}")));
        }
        if x_grid.is_empty() {
            return Err(Error::Domain("empty grid".into()));
        }
        x_grid
            .iter()
            .map(|&x| {
                if !(x > 0.0) {
                    return Err(Error::Domain(format!(
                        "grid points must be positive, got {x}"
                    )));
                }
                Self::check_x(x * t)?;
                Ok((self.ln_f(x * t) - self.ln_f(x)) / t.ln())
            })
            .collect()
    }

    /// `x f(x) / f^I(x)`.
    pub fn karamata_ratio(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("x must be positive, got {x}")));
        }
        if !self.divergent_integral() {
            return Err(Error::Domain(
                "the Karamata ratio limit needs a divergent integral".into(),
            ));
        }
        let fi = self.f_integral_scaled(x)?;
        match (self.eval_f(x), fi.value()) {
            (Ok(f), v) if v.is_finite() && v > 0.0 => Ok(x * f / v),
            _ => Ok(x * Scaled::from_ln(self.ln_f(x)).ratio(&fi)),
        }
    }
}

/// Seeds `hi - (hi - lo) 2^{-k}` that resolve mass concentrated near the upper end.
pub(crate) fn geometric_seeds(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    (1..=24).map(move |k| hi - (hi - lo) * 0.5f64.powi(k))
}

fn period_start(x: f64) -> f64 {
    let mut k = (x.ln() / LN4).floor() as i32;
    while 4f64.powi(k + 1) <= x {
        k += 1;
    }
    while 4f64.powi(k) > x {
        k -= 1;
    }
    4f64.powi(k)
}

/// Unscaled sawtooth value and right derivative.
fn sawtooth(x: f64) -> (f64, f64) {
    if x < 1.0 {
        return (2.0, 0.0);
    }
    let p = period_start(x);
    let r = x / p;
    if r < 2.0 {
        (2.0 * x, 2.0)
    } else if r < 2.5 {
        (10.0 * p - 3.0 * x, -3.0)
    } else if r < 3.0 {
        (x, 1.0)
    } else {
        (5.0 * x - 12.0 * p, 5.0)
    }
}

/// One-sided derivatives of the sawtooth when `x` is a kink.
fn sawtooth_kink(x: f64) -> Option<(f64, f64)> {
    if x < 1.0 {
        return None;
    }
    if x == 1.0 {
        return Some((0.0, 2.0));
    }
    let p = period_start(x);
    let r = x / p;
    if r == 1.0 {
        Some((5.0, 2.0))
    } else if r == 2.0 {
        Some((2.0, -3.0))
    } else if r == 2.5 {
        Some((-3.0, 1.0))
    } else if r == 3.0 {
        Some((1.0, 5.0))
    } else {
        None
    }
}
