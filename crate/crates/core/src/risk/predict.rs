use serde::{Deserialize, Serialize};

use super::model::RiskModelConfig;
use crate::asym::ln_closed_form;
use crate::error::{Error, Result};
use crate::oracle::function_convolve_n_scaled;
use crate::scaled::Scaled;
use crate::special::ln_gamma;
use crate::tailfn::TailFunctionSpec;

/// A prediction of `P(S_n > x)`, flagged when the dominance diagnostics fail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskPrediction {
    pub value: Scaled,
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Thm32Case {
    I,
    Ii,
    Iii,
    Iv,
}

impl Thm32Case {
    pub fn name(&self) -> &'static str {
        match self {
            Thm32Case::I => "i",
            Thm32Case::Ii => "ii",
            Thm32Case::Iii => "iii",
            Thm32Case::Iv => "iv",
        }
    }
}

/// Ratios `f_a(t) / (f_b ⊗ ...)(t)` on the diagnostic grid for one `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSequence {
    pub k: usize,
    pub ratios: Vec<f64>,
    pub decreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub t_grid: Vec<f64>,
    /// `f_1 / (f_k ⊗ f*_2 ⊗ ... ⊗ f*_k)` for `k = 2..=n`.
    pub first_vs_chain: Vec<RatioSequence>,
    /// `f_{k-1} / (f_k ⊗ f*_k)` for `k = 2..=n`.
    pub previous_vs_pair: Vec<RatioSequence>,
}

impl DominanceReport {
    pub fn passes(&self) -> bool {
        self.first_vs_chain
            .iter()
            .chain(&self.previous_vs_pair)
            .all(|s| s.decreasing)
    }
}

fn log_argument(x: f64) -> Result<f64> {
    if !(x > 1.0 && x.is_finite()) {
        return Err(Error::Domain(format!("x must exceed 1, got {x}")));
    }
    Ok(x.ln())
}

fn check_log(t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!(
            "ln x must be positive and finite, got {t}"
        )));
    }
    Ok(t)
}

/// `alpha^n x^{-alpha}` times the positive-part weight of `X_n`, in log form.
fn ln_prefactor(config: &RiskModelConfig, t: f64) -> f64 {
    let alpha = config.alpha();
    config.n() as f64 * alpha.ln() - alpha * t + config.negative_part().positive_mass().ln()
}

/// `[f_n, f*_1, ..., f*_n]`.
fn kernel_specs(config: &RiskModelConfig) -> Vec<TailFunctionSpec> {
    let n = config.n();
    let mut fs = vec![config.insurance_f(n - 1)];
    fs.extend((0..n).map(|i| config.financial_f(i)));
    fs
}

fn strictly_decreasing_tail_half(values: &[f64]) -> bool {
    let start = values.len() / 2;
    values[start.min(values.len().saturating_sub(2))..]
        .windows(2)
        .all(|w| w[1] < w[0])
}

/// Finite-grid diagnostics for the two dominance conditions.
pub fn check_dominance_conditions(
    config: &RiskModelConfig,
    t_grid: &[f64],
) -> Result<DominanceReport> {
    if t_grid.len() < 2 || t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid[0] <= 0.0 {
        return Err(Error::Precondition(
            "t grid must be strictly ascending, positive and have at least two points".into(),
        ));
    }
    let n = config.n();
    let sequence =
        |k: usize, num: TailFunctionSpec, fs: Vec<TailFunctionSpec>| -> Result<RatioSequence> {
            let ratios = t_grid
                .iter()
                .map(|&t| {
                    let denom = function_convolve_n_scaled(&fs, t)?;
                    Ok(Scaled::from_ln(num.ln_f(t)).ratio(&denom))
                })
                .collect::<Result<Vec<f64>>>()?;
            let decreasing = strictly_decreasing_tail_half(&ratios);
            Ok(RatioSequence {
                k,
                ratios,
                decreasing,
            })
        };
    let mut first_vs_chain = Vec::new();
    let mut previous_vs_pair = Vec::new();
    for k in 2..=n {
        let mut chain = vec![config.insurance_f(k - 1)];
        chain.extend((1..k).map(|i| config.financial_f(i)));
        first_vs_chain.push(sequence(k, config.insurance_f(0), chain)?);
        previous_vs_pair.push(sequence(
            k,
            config.insurance_f(k - 2),
            vec![config.insurance_f(k - 1), config.financial_f(k - 1)],
        )?);
    }
    Ok(DominanceReport {
        t_grid: t_grid.to_vec(),
        first_vs_chain,
        previous_vs_pair,
    })
}

/// Geometric diagnostic grid `t 2^{-7}, ..., t / 2, t`.
fn default_t_grid(t: f64) -> Vec<f64> {
    (0..8).rev().map(|j| t * 0.5f64.powi(j)).collect()
}

/// `alpha^n x^{-alpha} (f_n ⊗ f*_1 ⊗ ... ⊗ f*_n)(ln x)`.
pub fn predict_thm31(config: &RiskModelConfig, x: f64) -> Result<RiskPrediction> {
    predict_thm31_ln(config, log_argument(x)?)
}

/// `predict_thm31` at `x = e^t`, for capitals beyond the `f64` range.
pub fn predict_thm31_ln(config: &RiskModelConfig, t: f64) -> Result<RiskPrediction> {
    let t = check_log(t)?;
    let conv = function_convolve_n_scaled(&kernel_specs(config), t)?;
    let flagged =
        config.n() > 1 && !check_dominance_conditions(config, &default_t_grid(t))?.passes();
    Ok(RiskPrediction {
        value: conv.times_exp(ln_prefactor(config, t)),
        flagged,
    })
}

fn declared(f: &TailFunctionSpec) -> Option<f64> {
    match f.gamma_index() {
        crate::tailfn::RvIndex::Index(g) if g >= -1.0 && f.divergent_integral() => Some(g),
        _ => None,
    }
}

fn index_groups(config: &RiskModelConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = config.n();
    let collect = |fs: Vec<TailFunctionSpec>, role: &str| -> Result<Vec<f64>> {
        fs.iter()
            .map(|f| {
                declared(f).ok_or_else(|| {
                    Error::WrongCase(format!(
                        "{role} tails need regularly varying f with index >= -1, got {:?}",
                        f.family()
                    ))
                })
            })
            .collect()
    };
    Ok((
        collect((0..n).map(|i| config.insurance_f(i)).collect(), "insurance")?,
        collect((0..n).map(|i| config.financial_f(i)).collect(), "financial")?,
    ))
}

/// Case selected from declared indices; configurations splitting the financial indices
/// between `-1` and above are rejected.
pub fn classify_thm32(config: &RiskModelConfig) -> Result<Thm32Case> {
    let (ins, fin) = index_groups(config)?;
    let all = |v: &[f64], minus_one: bool| v.iter().all(|&g| (g == -1.0) == minus_one);
    match (
        all(&ins, false),
        all(&ins, true),
        all(&fin, false),
        all(&fin, true),
    ) {
        (true, _, true, _) => Ok(Thm32Case::I),
        (_, true, _, true) => Ok(Thm32Case::Ii),
        (_, true, true, _) => Ok(Thm32Case::Iii),
        (true, _, _, true) => Ok(Thm32Case::Iv),
        _ => Err(Error::UnsupportedCase(
            "indices split within a group; no closed form is provided for this configuration"
                .into(),
        )),
    }
}

/// Closed forms in `t = ln x`:
/// i `t^n f_n prod f*_i prod_j B(...)`, ii `f_n prod f*^I + f_n^I sum_i f*_i prod_{j != i} f*^I_j`,
/// iii `t^{n-1} f_n^I prod f*_i prod_j B(...)`, iv `f_n prod f*^I_i`; each times `alpha^n x^{-alpha}`.
pub fn predict_thm32(config: &RiskModelConfig, x: f64, case: Thm32Case) -> Result<Scaled> {
    predict_thm32_ln(config, log_argument(x)?, case)
}

/// `predict_thm32` at `x = e^t`.
pub fn predict_thm32_ln(config: &RiskModelConfig, t: f64, case: Thm32Case) -> Result<Scaled> {
    let t = check_log(t)?;
    let actual = classify_thm32(config).map_err(|e| match e {
        Error::UnsupportedCase(m) => Error::WrongCase(m),
        other => other,
    })?;
    if actual != case {
        return Err(Error::WrongCase(format!(
            "declared indices select case {}, not {}",
            actual.name(),
            case.name()
        )));
    }
    let fs = kernel_specs(config);
    let gammas: Vec<f64> = fs.iter().map(|f| declared(f).unwrap_or(f64::NAN)).collect();
    Ok(Scaled::from_ln(
        ln_prefactor(config, t) + ln_closed_form(&fs, &gammas, t)?,
    ))
}

/// Gamma-quotient form with `f_i(t) = t^{g*-1} l*_i(t)` and `f*_i(t) = t^{g_i-1} l_i(t)`:
/// `alpha^n Gamma(g*) prod Gamma(g_i) / Gamma(g_bar) l*_n(t) t^{g_bar-1} x^{-alpha} prod l_i(t)`.
pub fn predict_theorem_a(config: &RiskModelConfig, x: f64) -> Result<Scaled> {
    predict_theorem_a_ln(config, log_argument(x)?)
}

/// `predict_theorem_a` at `x = e^t`.
pub fn predict_theorem_a_ln(config: &RiskModelConfig, t: f64) -> Result<Scaled> {
    let t = check_log(t)?;
    let (ins, fin) = index_groups(config)?;
    let g_star = ins[0] + 1.0;
    if ins.iter().any(|&g| g != ins[0]) || g_star <= 0.0 || fin.iter().any(|&g| g <= -1.0) {
        return Err(Error::WrongCase(
            "needs one shared insurance index above -1 and financial indices above -1".into(),
        ));
    }
    let gs: Vec<f64> = fin.iter().map(|g| g + 1.0).collect();
    let g_bar = g_star + gs.iter().sum::<f64>();
    let n = config.n();
    let ln_t = t.ln();
    let mut ln = ln_prefactor(config, t) + ln_gamma(g_star)? - ln_gamma(g_bar)?;
    ln += config.insurance_f(n - 1).ln_f(t) - (g_star - 1.0) * ln_t;
    ln += (g_bar - 1.0) * ln_t;
    for (i, &g) in gs.iter().enumerate() {
        ln += ln_gamma(g)? + config.financial_f(i).ln_f(t) - (g - 1.0) * ln_t;
    }
    Ok(Scaled::from_ln(ln))
}
