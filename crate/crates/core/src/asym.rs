//! Asymptotic predictors for convolution tails and their dispatcher.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::dist::{ClassTag, SemiRvDistribution};
use crate::error::{Error, Result};
use crate::oracle::function_convolve_n_scaled;
use crate::quad::{integrate, partition, QuadSettings};
use crate::scaled::Scaled;
use crate::special::ln_beta;
use crate::tailfn::{geometric_seeds, RvIndex, TailFunctionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseTag {
    Thm11General,
    #[serde(rename = "Thm12_AllAboveMinus1")]
    Thm12AllAboveMinus1,
    #[serde(rename = "Thm12_AllMinus1")]
    Thm12AllMinus1,
    #[serde(rename = "Thm12_Mixed")]
    Thm12Mixed,
    #[serde(rename = "Lemma22_i")]
    Lemma22I,
    #[serde(rename = "Lemma22_ii")]
    Lemma22II,
    #[serde(rename = "Lemma22_iii")]
    Lemma22III,
    Prop41,
    Prop42Envelope,
}

impl CaseTag {
    pub const ALL: [CaseTag; 9] = [
        CaseTag::Thm11General,
        CaseTag::Thm12AllAboveMinus1,
        CaseTag::Thm12AllMinus1,
        CaseTag::Thm12Mixed,
        CaseTag::Lemma22I,
        CaseTag::Lemma22II,
        CaseTag::Lemma22III,
        CaseTag::Prop41,
        CaseTag::Prop42Envelope,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CaseTag::Thm11General => "Thm11General",
            CaseTag::Thm12AllAboveMinus1 => "Thm12_AllAboveMinus1",
            CaseTag::Thm12AllMinus1 => "Thm12_AllMinus1",
            CaseTag::Thm12Mixed => "Thm12_Mixed",
            CaseTag::Lemma22I => "Lemma22_i",
            CaseTag::Lemma22II => "Lemma22_ii",
            CaseTag::Lemma22III => "Lemma22_iii",
            CaseTag::Prop41 => "Prop41",
            CaseTag::Prop42Envelope => "Prop42Envelope",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `ln(a^{n-1})` for `m` lattice members among `n`.
fn ln_a_power(alpha: f64, m: usize, n: usize) -> f64 {
    let ln_lattice = alpha.exp_m1().ln();
    if m == n {
        (n as f64 - 1.0) * ln_lattice
    } else {
        m as f64 * ln_lattice + (n - m - 1) as f64 * alpha.ln()
    }
}

/// The constant `a`: `alpha` without lattice members, `e^alpha - 1` when all are lattice,
/// `(e^alpha - 1)^{m/(n-1)} alpha^{(n-m-1)/(n-1)}` otherwise.
pub fn lattice_mix_constant(alpha: f64, m_lattice: usize, n_total: usize) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if n_total == 0 || m_lattice > n_total {
        return Err(Error::Domain(format!(
            "need 0 <= m <= n and n >= 1, got m = {m_lattice}, n = {n_total}"
        )));
    }
    if m_lattice == 0 {
        return Ok(alpha);
    }
    if m_lattice == n_total {
        return Ok(alpha.exp_m1());
    }
    if n_total < 2 {
        return Err(Error::Domain(
            "a mixed ensemble needs at least two members".into(),
        ));
    }
    Ok((ln_a_power(alpha, m_lattice, n_total) / (n_total - 1) as f64).exp())
}

/// Shared `alpha` of an ensemble with divergent integrals.
fn common_alpha(ds: &[SemiRvDistribution]) -> Result<f64> {
    let first = ds
        .first()
        .ok_or_else(|| Error::Precondition("empty ensemble".into()))?
        .alpha();
    if ds.iter().any(|d| d.alpha() != first) {
        return Err(Error::UnsupportedCase(
            "members have different alpha; the cross-alpha dominance reduction is not supported"
                .into(),
        ));
    }
    if let Some(d) = ds
        .iter()
        .find(|d| matches!(d.class_tag(), ClassTag::L2 { .. }))
    {
        return Err(Error::UnsupportedCase(format!(
            "member with {:?} has int_0^inf f(y) dy < inf (class L2); these predictors need a divergent integral",
            d.f().family()
        )));
    }
    Ok(first)
}

fn ln_a_for(ds: &[SemiRvDistribution], alpha: f64) -> f64 {
    let m = ds.iter().filter(|d| d.is_lattice()).count();
    ln_a_power(alpha, m, ds.len())
}

fn declared_gammas(ds: &[SemiRvDistribution]) -> Result<Vec<f64>> {
    ds.iter()
        .map(|d| {
            d.class_tag().gamma().ok_or_else(|| {
                Error::WrongCase(format!(
                    "closed forms need regularly varying f with index >= -1, got class {}",
                    d.class_tag().name()
                ))
            })
        })
        .collect()
}

fn require_at_least_two(ds: &[SemiRvDistribution]) -> Result<()> {
    if ds.len() < 2 {
        return Err(Error::Precondition(
            "at least two distributions are required".into(),
        ));
    }
    Ok(())
}

/// `a^{n-1} e^{-alpha x} (f1 ⊗ ... ⊗ fn)(x)`.
pub fn predict_thm11_scaled(ds: &[SemiRvDistribution], x: f64) -> Result<Scaled> {
    require_at_least_two(ds)?;
    let alpha = common_alpha(ds)?;
    let conv = function_convolve_n_scaled(&specs(ds), x)?;
    Ok(conv.times_exp(ln_a_for(ds, alpha) - alpha * x))
}

pub fn predict_thm11(ds: &[SemiRvDistribution], x: f64) -> Result<f64> {
    Ok(predict_thm11_scaled(ds, x)?.value())
}

/// `sum_j ln B(sum_{k<=j} g_k + j, g_{j+1} + 1)` over consecutive members of `gammas`.
fn ln_beta_chain(gammas: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    let mut partial = 0.0;
    for j in 1..gammas.len() {
        partial += gammas[j - 1];
        acc += ln_beta(partial + j as f64, gammas[j] + 1.0)?;
    }
    Ok(acc)
}

/// Log of the closed-form convolution asymptote of `f_1 ⊗ ... ⊗ f_k (x)` from declared indices:
/// the sum-of-products form when all equal `-1`, otherwise
/// `x^{k-1-m} prod_{above} f_i(x) * Beta chain(above) * prod_{-1} f_r^I(x)` with `m` members at `-1`.
pub(crate) fn ln_closed_form(fs: &[TailFunctionSpec], gammas: &[f64], x: f64) -> Result<f64> {
    let (minus_one, above): (Vec<usize>, Vec<usize>) =
        (0..fs.len()).partition(|&i| gammas[i] == -1.0);
    if above.is_empty() {
        return Ok(ln_sum_f_times_other_integrals(fs, x)?.ln());
    }
    let mut ln = (fs.len() - 1 - minus_one.len()) as f64 * x.ln();
    for &i in &above {
        ln += fs[i].ln_f(x);
    }
    let above_gammas: Vec<f64> = above.iter().map(|&i| gammas[i]).collect();
    ln += ln_beta_chain(&above_gammas)?;
    for &r in &minus_one {
        ln += fs[r].f_integral_scaled(x)?.ln();
    }
    Ok(ln)
}

fn specs(ds: &[SemiRvDistribution]) -> Vec<TailFunctionSpec> {
    ds.iter().map(|d| *d.f()).collect()
}

/// Case with every index above `-1`:
/// `prod_j B(sum_{k<=j} g_k + j, g_{j+1} + 1) a^n e^{-alpha x} x^n prod f_i(x)`.
pub fn predict_thm12_case_i_scaled(ds: &[SemiRvDistribution], x: f64) -> Result<Scaled> {
    require_at_least_two(ds)?;
    let alpha = common_alpha(ds)?;
    let gammas = declared_gammas(ds)?;
    if gammas.iter().any(|&g| g <= -1.0) {
        return Err(Error::WrongCase(
            "an index equals -1; use the -1 or mixed case".into(),
        ));
    }
    let ln = ln_a_for(ds, alpha) - alpha * x + ln_closed_form(&specs(ds), &gammas, x)?;
    Ok(Scaled::from_ln(ln))
}

pub fn predict_thm12_case_i(ds: &[SemiRvDistribution], x: f64) -> Result<f64> {
    Ok(predict_thm12_case_i_scaled(ds, x)?.value())
}

/// `sum_i f_i(x) prod_{j != i} f_j^I(x)` in log form, for functions given by specs.
fn ln_sum_f_times_other_integrals(fs: &[TailFunctionSpec], x: f64) -> Result<Scaled> {
    let ln_f: Vec<f64> = fs.iter().map(|f| f.ln_f(x)).collect();
    let ln_fi: Vec<f64> = fs
        .iter()
        .map(|f| f.f_integral_scaled(x).map(|s| s.ln()))
        .collect::<Result<_>>()?;
    let total_fi: f64 = ln_fi.iter().sum();
    let mut sum = Scaled::ZERO;
    for i in 0..fs.len() {
        sum = sum.add(&Scaled::from_ln(ln_f[i] + total_fi - ln_fi[i]));
    }
    Ok(sum)
}

/// Case with every index equal to `-1`: `a^n e^{-alpha x} sum_i f_i(x) prod_{j != i} f_j^I(x)`.
pub fn predict_thm12_case_ii_scaled(ds: &[SemiRvDistribution], x: f64) -> Result<Scaled> {
    require_at_least_two(ds)?;
    let alpha = common_alpha(ds)?;
    let gammas = declared_gammas(ds)?;
    if gammas.iter().any(|&g| g != -1.0) {
        return Err(Error::WrongCase("every index must equal -1".into()));
    }
    let ln = ln_a_for(ds, alpha) - alpha * x + ln_closed_form(&specs(ds), &gammas, x)?;
    Ok(Scaled::from_ln(ln))
}

pub fn predict_thm12_case_ii(ds: &[SemiRvDistribution], x: f64) -> Result<f64> {
    Ok(predict_thm12_case_ii_scaled(ds, x)?.value())
}

/// Identical members with index `-1`: `(n+1) a^n e^{-alpha x} f(x) (f^I(x))^n`.
pub fn predict_thm12_case_ii_identical_scaled(
    d: &SemiRvDistribution,
    count: usize,
    x: f64,
) -> Result<Scaled> {
    let ds = vec![d.clone(); count];
    require_at_least_two(&ds)?;
    let alpha = common_alpha(&ds)?;
    if declared_gammas(&ds)?[0] != -1.0 {
        return Err(Error::WrongCase("the index must equal -1".into()));
    }
    let n = (count - 1) as f64;
    let ln = (count as f64).ln() + ln_a_for(&ds, alpha) - alpha * x
        + d.f().ln_f(x)
        + n * d.f().f_integral_scaled(x)?.ln();
    Ok(Scaled::from_ln(ln))
}

/// Mixed case. Members with index `-1` are moved to the front (keeping order);
/// with `m` of them the prediction is
/// `a^n e^{-alpha x} x^{n-m} prod_{i>m} f_i(x) prod_{j=m+1}^n B(...) prod_{r<=m} f_r^I(x)`.
pub fn predict_thm12_case_iii_scaled(ds: &[SemiRvDistribution], x: f64) -> Result<Scaled> {
    require_at_least_two(ds)?;
    let alpha = common_alpha(ds)?;
    let gammas = declared_gammas(ds)?;
    if gammas.iter().all(|&g| g == -1.0) {
        return Err(Error::WrongCase(
            "every index equals -1; use the all -1 case".into(),
        ));
    }
    let ln = ln_a_for(ds, alpha) - alpha * x + ln_closed_form(&specs(ds), &gammas, x)?;
    Ok(Scaled::from_ln(ln))
}

pub fn predict_thm12_case_iii(ds: &[SemiRvDistribution], x: f64) -> Result<f64> {
    Ok(predict_thm12_case_iii_scaled(ds, x)?.value())
}

/// Pairwise function-level prediction of `f1 ⊗ f2 (x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPrediction {
    pub case_tag: CaseTag,
    pub value: f64,
}

fn declared_rv_gamma(f: &TailFunctionSpec) -> Result<f64> {
    match f.gamma_index() {
        RvIndex::Index(g) if g >= -1.0 && f.divergent_integral() => Ok(g),
        _ => Err(Error::WrongCase(format!(
            "pairwise forms need regularly varying f with index >= -1 and a divergent integral, got {:?}",
            f.family()
        ))),
    }
}

/// Lemma-level forms: `x f1 f2 B(g1+1, g2+1)`, `f1 f2^I + f2 f1^I`, or `f2 f1^I` (with `g1 = -1 < g2`).
pub fn predict_lemma22(
    f1: &TailFunctionSpec,
    f2: &TailFunctionSpec,
    x: f64,
) -> Result<PairPrediction> {
    let g1 = declared_rv_gamma(f1)?;
    let g2 = declared_rv_gamma(f2)?;
    let (case_tag, ln) = match (g1 == -1.0, g2 == -1.0) {
        (false, false) => (
            CaseTag::Lemma22I,
            x.ln() + f1.ln_f(x) + f2.ln_f(x) + ln_beta(g1 + 1.0, g2 + 1.0)?,
        ),
        (true, true) => (
            CaseTag::Lemma22II,
            ln_sum_f_times_other_integrals(&[*f1, *f2], x)?.ln(),
        ),
        (true, false) => (
            CaseTag::Lemma22III,
            f2.ln_f(x) + f1.f_integral_scaled(x)?.ln(),
        ),
        (false, true) => (
            CaseTag::Lemma22III,
            f1.ln_f(x) + f2.f_integral_scaled(x)?.ln(),
        ),
    };
    Ok(PairPrediction {
        case_tag,
        value: ln.exp(),
    })
}

/// `(int_0^x g_n, prod f_i^I(x))` for functions of index `-1`.
pub fn gn_integral_product_check(fs: &[TailFunctionSpec], x: f64) -> Result<(f64, f64)> {
    for f in fs {
        if f.gamma_index() != RvIndex::Index(-1.0) {
            return Err(Error::WrongCase(format!(
                "the integral product identity needs index -1, got {:?}",
                f.family()
            )));
        }
    }
    if fs.len() == 1 {
        let v = fs[0].f_integral(x)?;
        return Ok((v, v));
    }
    let lhs = crate::oracle::convolution_integral_scaled(fs, x)?;
    let mut rhs = 0.0;
    for f in fs {
        rhs += f.f_integral_scaled(x)?.ln();
    }
    Ok((lhs.value(), rhs.exp()))
}

/// Integrand `exp(C x^beta ((1 - t)^beta + t^beta))` of the two-fold exp-power form.
pub fn prop41_kernel(c: f64, beta: f64, x: f64, t: f64) -> f64 {
    (c * x.powf(beta) * ((1.0 - t).powf(beta) + t.powf(beta))).exp()
}

/// Prediction for `n_fold` i.i.d. variables with `f(x) = exp(C x^beta + D)`.
///
/// Two-fold: `alpha x e^{-alpha x + 2D} int_0^1 exp(C x^beta ((1-t)^beta + t^beta)) dt`.
/// Higher folds evaluate `alpha^{n-1} e^{-alpha x} f^{⊗n}(x)` by iterated quadrature.
pub fn predict_prop41_scaled(
    alpha: f64,
    c: f64,
    d: f64,
    beta: f64,
    n_fold: usize,
    x: f64,
) -> Result<Scaled> {
    let f = TailFunctionSpec::exp_power(c, beta, d)?;
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if n_fold < 2 {
        return Err(Error::Precondition("n_fold must be at least 2".into()));
    }
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    if n_fold == 2 {
        let peak = c * x.powf(beta) * 2f64.powf(1.0 - beta);
        let mut extra = vec![0.5];
        extra.extend(geometric_seeds(0.0, 0.5));
        extra.extend(geometric_seeds(1.0, 0.5));
        let pts = partition(0.0, 1.0, extra);
        let r = integrate(
            |t| (c * x.powf(beta) * ((1.0 - t).powf(beta) + t.powf(beta)) - peak).exp(),
            &pts,
            QuadSettings::with_rel_tol(1e-12),
        )?;
        return Ok(Scaled::new(
            alpha * x * r.value,
            -alpha * x + 2.0 * d + peak,
        ));
    }
    let fs = vec![f; n_fold];
    let conv = function_convolve_n_scaled(&fs, x)?;
    Ok(conv.times_exp((n_fold - 1) as f64 * alpha.ln() - alpha * x))
}

pub fn predict_prop41(alpha: f64, c: f64, d: f64, beta: f64, n_fold: usize, x: f64) -> Result<f64> {
    Ok(predict_prop41_scaled(alpha, c, d, beta, n_fold, x)?.value())
}

/// A member of an envelope ensemble: `c f0 <= f <= d f0` eventually.
#[derive(Debug, Clone)]
pub struct EnvelopeMember {
    pub dist: SemiRvDistribution,
    pub f0: TailFunctionSpec,
    pub c: f64,
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub lower: Scaled,
    pub center: Scaled,
    pub upper: Scaled,
}

impl Envelope {
    pub fn contains(&self, value: &Scaled) -> bool {
        self.lower.ln() <= value.ln() && value.ln() <= self.upper.ln()
    }
}

/// `[prod c_i, prod d_i] * center`, the center being the all-above-`-1` form evaluated on the `f0`'s.
pub fn envelope_prop42(members: &[EnvelopeMember], x: f64) -> Result<Envelope> {
    if members.len() < 2 {
        return Err(Error::Precondition(
            "at least two members are required".into(),
        ));
    }
    let ds: Vec<SemiRvDistribution> = members.iter().map(|m| m.dist.clone()).collect();
    let alpha = common_alpha(&ds)?;
    let mut gammas = Vec::with_capacity(members.len());
    let mut ln_c = 0.0;
    let mut ln_d = 0.0;
    let mut ln_f0 = 0.0;
    for m in members {
        if !(m.c > 0.0) || !(m.c <= m.d) || !m.d.is_finite() {
            return Err(Error::InvalidBounds(format!(
                "need 0 < c <= d, got c = {}, d = {}",
                m.c, m.d
            )));
        }
        match m.f0.gamma_index() {
            RvIndex::Index(g) if g > -1.0 => gammas.push(g),
            _ => {
                return Err(Error::WrongCase(
                    "envelope centers need regularly varying f0 with index > -1".into(),
                ))
            }
        }
        ln_c += m.c.ln();
        ln_d += m.d.ln();
        ln_f0 += m.f0.ln_f(x);
    }
    let n = members.len() - 1;
    let ln_center =
        ln_a_for(&ds, alpha) - alpha * x + n as f64 * x.ln() + ln_f0 + ln_beta_chain(&gammas)?;
    Ok(Envelope {
        lower: Scaled::from_ln(ln_center + ln_c),
        center: Scaled::from_ln(ln_center),
        upper: Scaled::from_ln(ln_center + ln_d),
    })
}

/// A dispatched prediction for an ensemble of distributions.
#[derive(Debug, Clone)]
pub struct AsymptoticPrediction {
    pub case_tag: CaseTag,
    pub a_constant: f64,
    /// Ensemble mixes lattice and non-lattice members; compare at integer `x` plus an offset.
    pub mixed_lattice: bool,
    members: Vec<SemiRvDistribution>,
}

impl AsymptoticPrediction {
    pub fn evaluate_scaled(&self, x: f64) -> Result<Scaled> {
        match self.case_tag {
            CaseTag::Thm11General => predict_thm11_scaled(&self.members, x),
            CaseTag::Thm12AllAboveMinus1 => predict_thm12_case_i_scaled(&self.members, x),
            CaseTag::Thm12AllMinus1 => predict_thm12_case_ii_scaled(&self.members, x),
            CaseTag::Thm12Mixed => predict_thm12_case_iii_scaled(&self.members, x),
            other => Err(Error::UnsupportedCase(format!(
                "{other} is not produced by the dispatcher"
            ))),
        }
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        Ok(self.evaluate_scaled(x)?.value())
    }

    pub fn members(&self) -> &[SemiRvDistribution] {
        &self.members
    }

    /// CSV rows `x, predicted, case_tag, a_constant`.
    pub fn write_csv<W: Write>(&self, xs: &[f64], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "predicted", "case_tag", "a_constant"])?;
        for &x in xs {
            let v = self.evaluate(x)?;
            w.write_record([
                format!("{x:.16e}"),
                format!("{v:.16e}"),
                self.case_tag.name().to_string(),
                format!("{:.16e}", self.a_constant),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Selects the predictor from exact class tags and declared indices.
pub fn classify_and_predict(ds: &[SemiRvDistribution]) -> Result<AsymptoticPrediction> {
    require_at_least_two(ds)?;
    let alpha = common_alpha(ds)?;
    let m = ds.iter().filter(|d| d.is_lattice()).count();
    let a_constant = lattice_mix_constant(alpha, m, ds.len())?;
    let case_tag = if ds
        .iter()
        .any(|d| matches!(d.class_tag(), ClassTag::L1Not11 { .. }))
    {
        CaseTag::Thm11General
    } else {
        let gammas = declared_gammas(ds)?;
        if gammas.iter().all(|&g| g > -1.0) {
            CaseTag::Thm12AllAboveMinus1
        } else if gammas.iter().all(|&g| g == -1.0) {
            CaseTag::Thm12AllMinus1
        } else {
            CaseTag::Thm12Mixed
        }
    };
    Ok(AsymptoticPrediction {
        case_tag,
        a_constant,
        mixed_lattice: m > 0 && m < ds.len(),
        members: ds.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp1() -> SemiRvDistribution {
        SemiRvDistribution::exponential(1.0).unwrap()
    }

    fn log_power(g: f64) -> SemiRvDistribution {
        SemiRvDistribution::continuous(1.0, TailFunctionSpec::log_power(g, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn lattice_constant_examples() {
        assert_eq!(lattice_mix_constant(1.0, 0, 3).unwrap(), 1.0);
        assert!((lattice_mix_constant(std::f64::consts::LN_2, 2, 2).unwrap() - 1.0).abs() < 1e-15);
        let mixed = lattice_mix_constant(1.0, 1, 3).unwrap();
        assert!((mixed - (std::f64::consts::E - 1.0).sqrt()).abs() < 1e-14);
        assert!(lattice_mix_constant(1.0, 2, 1).is_err());
    }

    #[test]
    fn thm11_examples() {
        let v = predict_thm11(&[exp1(), exp1()], 10.0).unwrap();
        assert!((v / (10.0 * (-10.0f64).exp()) - 1.0).abs() < 1e-9);
        let v = predict_thm11(&[exp1(), log_power(1.0)], 10.0).unwrap();
        assert!((v / (60.0 * (-10.0f64).exp()) - 1.0).abs() < 1e-9);
        let g = SemiRvDistribution::geometric(std::f64::consts::LN_2).unwrap();
        let v = predict_thm11(&[g.clone(), g], 10.0).unwrap();
        assert!((v / (10.0 * 2f64.powi(-10)) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn case_i_examples() {
        let v = predict_thm12_case_i(&[exp1(), exp1(), exp1()], 20.0).unwrap();
        assert!((v / (200.0 * (-20.0f64).exp()) - 1.0).abs() < 1e-12);
        let x: f64 = 9.0;
        let v = predict_thm12_case_i(&[log_power(1.0), log_power(1.0)], x).unwrap();
        assert!((v / (x * (1.0 + x).powi(2) * (-x).exp() / 6.0) - 1.0).abs() < 1e-12);
        assert!(matches!(
            predict_thm12_case_i(&[log_power(-1.0), exp1()], 5.0),
            Err(Error::WrongCase(_))
        ));
    }

    #[test]
    fn case_ii_example() {
        let x: f64 = 30.0;
        let v = predict_thm12_case_ii(&[log_power(-1.0), log_power(-1.0)], x).unwrap();
        let expected = 2.0 * (-x).exp() * x.ln_1p() / (1.0 + x);
        assert!((v / expected - 1.0).abs() < 1e-13);
        let ds = vec![log_power(-1.0); 3];
        let a = predict_thm12_case_ii_scaled(&ds, x).unwrap();
        let b = predict_thm12_case_ii_identical_scaled(&ds[0], 3, x).unwrap();
        assert!((a.ratio(&b) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn case_iii_collapses_to_case_i() {
        let ds = [log_power(0.5), exp1(), log_power(2.0)];
        for k in 1..=20 {
            let x = 5.0 * k as f64;
            let a = predict_thm12_case_iii(&ds, x).unwrap();
            let b = predict_thm12_case_i(&ds, x).unwrap();
            assert!((a / b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn case_iii_pair_example() {
        let x: f64 = 50.0;
        let v = predict_thm12_case_iii(&[log_power(-1.0), log_power(0.0)], x).unwrap();
        assert!((v / ((-x).exp() * x.ln_1p()) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn lemma_examples() {
        let c = TailFunctionSpec::constant(1.0).unwrap();
        let p = predict_lemma22(&c, &c, 7.0).unwrap();
        assert_eq!(p.case_tag, CaseTag::Lemma22I);
        assert!((p.value - 7.0).abs() < 1e-12);
        let inv = TailFunctionSpec::log_power(-1.0, 1.0).unwrap();
        let p = predict_lemma22(&inv, &inv, 1e4).unwrap();
        assert_eq!(p.case_tag, CaseTag::Lemma22II);
        assert!((p.value / (2.0 * 1e4f64.ln_1p() / (1.0 + 1e4)) - 1.0).abs() < 1e-13);
        let sq = TailFunctionSpec::log_power(2.0, 1.0).unwrap();
        let p = predict_lemma22(&inv, &sq, 1e3).unwrap();
        assert_eq!(p.case_tag, CaseTag::Lemma22III);
        assert!((p.value / (1001f64.powi(2) * 1e3f64.ln_1p()) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn prop41_small_c_limit() {
        let x = 30.0;
        let v = predict_prop41(1.0, 1e-9, -1.0, 0.5, 2, x).unwrap();
        let expected = x * (-x - 2.0f64).exp();
        assert!((v / expected - 1.0).abs() < 1e-7);
    }

    #[test]
    fn prop41_kernel_is_symmetric() {
        for &t in &[0.01, 0.2, 0.37, 0.5] {
            let a = prop41_kernel(1.0, 0.5, 100.0, t);
            let b = prop41_kernel(1.0, 0.5, 100.0, 1.0 - t);
            assert!((a / b - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn prop41_matches_thm11() {
        let d = SemiRvDistribution::continuous(
            1.0,
            TailFunctionSpec::exp_power(1.0, 0.5, -1.0).unwrap(),
        )
        .unwrap();
        let x = 60.0;
        let a = predict_prop41_scaled(1.0, 1.0, -1.0, 0.5, 2, x).unwrap();
        let b = predict_thm11_scaled(&[d.clone(), d], x).unwrap();
        assert!((a.ratio(&b) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn envelope_degenerate_and_width() {
        let f0 = TailFunctionSpec::log_power(1.0, 1.0).unwrap();
        let d = log_power(1.0);
        let m = EnvelopeMember {
            dist: d.clone(),
            f0,
            c: 1.0,
            d: 1.0,
        };
        let e = envelope_prop42(&[m.clone(), m.clone()], 12.0).unwrap();
        let c = predict_thm12_case_i_scaled(&[d.clone(), d], 12.0).unwrap();
        assert!((e.center.ratio(&c) - 1.0).abs() < 1e-13);
        assert!((e.lower.ratio(&e.upper) - 1.0).abs() < 1e-15);
        let wide = EnvelopeMember {
            c: 1.0,
            d: 2.0,
            ..m.clone()
        };
        let e = envelope_prop42(&[wide.clone(), wide], 12.0).unwrap();
        assert!((e.upper.ratio(&e.lower) - 4.0).abs() < 1e-12);
        let bad = EnvelopeMember {
            c: 3.0,
            d: 2.0,
            ..m.clone()
        };
        assert!(matches!(
            envelope_prop42(&[bad, m], 1.0),
            Err(Error::InvalidBounds(_))
        ));
    }

    #[test]
    fn dispatcher() {
        assert_eq!(
            classify_and_predict(&[exp1(), exp1()]).unwrap().case_tag,
            CaseTag::Thm12AllAboveMinus1
        );
        assert_eq!(
            classify_and_predict(&[log_power(-1.0), log_power(-1.0)])
                .unwrap()
                .case_tag,
            CaseTag::Thm12AllMinus1
        );
        assert_eq!(
            classify_and_predict(&[log_power(-1.0), exp1()])
                .unwrap()
                .case_tag,
            CaseTag::Thm12Mixed
        );
        let ep = SemiRvDistribution::continuous(
            1.0,
            TailFunctionSpec::exp_power(1.0, 0.5, -1.0).unwrap(),
        )
        .unwrap();
        assert_eq!(
            classify_and_predict(&[ep.clone(), ep]).unwrap().case_tag,
            CaseTag::Thm11General
        );
        assert!(matches!(
            classify_and_predict(&[log_power(-2.0), exp1()]),
            Err(Error::UnsupportedCase(_))
        ));
        let e2 = SemiRvDistribution::exponential(2.0).unwrap();
        assert!(matches!(
            classify_and_predict(&[exp1(), e2]),
            Err(Error::UnsupportedCase(_))
        ));
    }
}
