//! Named oracle and predictor methods over study inputs.

use serde::{Deserialize, Serialize};

use crate::asym::{
    classify_and_predict, envelope_prop42, predict_lemma22, predict_prop41_scaled,
    predict_thm11_scaled, predict_thm12_case_i_scaled, predict_thm12_case_ii_scaled,
    predict_thm12_case_iii_scaled, CaseTag, EnvelopeMember,
};
use crate::dist::SemiRvDistribution;
use crate::error::{Error, Result};
use crate::oracle::{
    conv_tail_2_scaled, conv_tail_n_grid, convolution_integral_scaled, function_convolve_n_scaled,
    lattice_conv_tail_scaled, mc_conv_tail, GridConvolutionPlan,
};
use crate::risk::{
    predict_theorem_a, predict_thm31, predict_thm32, ruin_mc_grid, sn_tail_oracle_grid,
    RiskGridPlan, RiskModelConfig, Thm32Case,
};
use crate::scaled::Scaled;
use crate::stats::ProportionEstimate;
use crate::tailfn::{Family, TailFunctionSpec};

/// One envelope member as written in a config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeInput {
    pub distribution: SemiRvDistribution,
    pub f0: TailFunctionSpec,
    pub c: f64,
    pub d: f64,
}

/// What a study operates on.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyInputs {
    Distributions(Vec<SemiRvDistribution>),
    Functions(Vec<TailFunctionSpec>),
    Envelope(Vec<EnvelopeInput>),
    Risk(RiskModelConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskQuantity {
    /// `P(S_n > x)`.
    #[default]
    Sn,
    /// `P(M_n > x)`.
    Psi,
}

/// Reference value of the compared quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum OracleMethod {
    /// Two-fold tail by quadrature or exact summation.
    #[serde(rename = "conv_tail_2")]
    ConvTail2,
    /// Lattice tail by exact pmf convolution.
    LatticeExact,
    /// `e^{-alpha x} sum_{j<n} (alpha x)^j / j!` for `n` exponential members.
    ErlangClosedForm,
    /// Bracketed grid convolution; the midpoint is reported.
    Grid {
        step: f64,
    },
    MonteCarlo {
        samples: usize,
    },
    /// `f_1 ⊗ ... ⊗ f_n (x)`.
    FunctionConvolve,
    /// `int_0^x (f_1 ⊗ ... ⊗ f_n)`.
    ConvolutionIntegral,
    RiskMonteCarlo {
        samples: usize,
        #[serde(default)]
        quantity: RiskQuantity,
    },
    RiskGrid {
        step: f64,
    },
}

/// Asymptotic prediction compared against the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum PredictorMethod {
    Thm11,
    Thm12CaseI,
    Thm12CaseIi,
    Thm12CaseIii,
    /// Case chosen from class tags.
    Dispatch,
    Lemma22,
    /// Product of running integrals.
    IntegralProduct,
    Prop41,
    Prop42Envelope,
    Thm31,
    Thm32 {
        case: Thm32Case,
    },
    TheoremA,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: Scaled,
    /// Error bound relative to `value`.
    pub rel_error: f64,
    pub interval: Option<ProportionEstimate>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictorValue {
    pub value: Scaled,
    pub envelope: Option<(Scaled, Scaled)>,
    pub flagged: bool,
}

fn distributions(inputs: &StudyInputs) -> Result<Vec<SemiRvDistribution>> {
    match inputs {
        StudyInputs::Distributions(ds) => Ok(ds.clone()),
        StudyInputs::Envelope(ms) => Ok(ms.iter().map(|m| m.distribution.clone()).collect()),
        _ => Err(Error::Usage("this method needs distribution inputs".into())),
    }
}

fn functions(inputs: &StudyInputs) -> Result<&[TailFunctionSpec]> {
    match inputs {
        StudyInputs::Functions(fs) => Ok(fs),
        _ => Err(Error::Usage("this method needs function inputs".into())),
    }
}

fn risk(inputs: &StudyInputs) -> Result<&RiskModelConfig> {
    match inputs {
        StudyInputs::Risk(c) => Ok(c),
        _ => Err(Error::Usage("this method needs a risk model input".into())),
    }
}

fn exact(value: Scaled, rel_error: f64) -> OracleValue {
    OracleValue {
        value,
        rel_error,
        interval: None,
    }
}

fn from_estimate(e: ProportionEstimate) -> OracleValue {
    let rel_error = if e.point > 0.0 {
        e.half_width() / e.point
    } else {
        f64::INFINITY
    };
    OracleValue {
        value: Scaled::from_f64(e.point),
        rel_error,
        interval: Some(e),
    }
}

fn erlang_tail(ds: &[SemiRvDistribution], x: f64) -> Result<Scaled> {
    let alpha = ds[0].alpha();
    let unit = |d: &SemiRvDistribution| {
        !d.is_lattice()
            && d.alpha() == alpha
            && matches!(d.f().family(), Family::Constant { c } if *c == 1.0)
    };
    if !ds.iter().all(unit) {
        return Err(Error::Usage(
            "the Erlang closed form needs identical exponential members".into(),
        ));
    }
    if x <= 0.0 {
        return Ok(Scaled::from_f64(1.0));
    }
    let ax = alpha * x;
    let mut sum = Scaled::ZERO;
    let mut ln_term = 0.0;
    for j in 0..ds.len() {
        if j > 0 {
            ln_term += ax.ln() - (j as f64).ln();
        }
        sum = sum.add(&Scaled::from_ln(ln_term));
    }
    Ok(sum.times_exp(-ax))
}

/// Oracle values on the whole grid; Monte Carlo methods derive per-point seeds from `seed`.
pub fn evaluate_oracle(
    method: &OracleMethod,
    inputs: &StudyInputs,
    xs: &[f64],
    seed: u64,
) -> Result<Vec<OracleValue>> {
    match *method {
        OracleMethod::ConvTail2 => {
            let ds = distributions(inputs)?;
            if ds.len() != 2 {
                return Err(Error::Usage(
                    "conv_tail_2 needs exactly two distributions".into(),
                ));
            }
            xs.iter()
                .map(|&x| Ok(exact(conv_tail_2_scaled(&ds[0], &ds[1], x)?, 1e-10)))
                .collect()
        }
        OracleMethod::LatticeExact => {
            let ds = distributions(inputs)?;
            xs.iter()
                .map(|&x| {
                    if x.fract() != 0.0 {
                        return Err(Error::Domain(format!(
                            "lattice oracle needs integer x, got {x}"
                        )));
                    }
                    Ok(exact(lattice_conv_tail_scaled(&ds, x as i64)?, 1e-13))
                })
                .collect()
        }
        OracleMethod::ErlangClosedForm => {
            let ds = distributions(inputs)?;
            xs.iter()
                .map(|&x| Ok(exact(erlang_tail(&ds, x)?, 1e-14)))
                .collect()
        }
        OracleMethod::Grid { step } => {
            let ds = distributions(inputs)?;
            let x_top = xs.iter().cloned().fold(0.0, f64::max);
            let offsets: f64 = ds.iter().map(|d| d.x0()).sum();
            let plan = GridConvolutionPlan::new(step, x_top + offsets + step);
            Ok(conv_tail_n_grid(&ds, &plan, xs)?
                .into_iter()
                .map(|b| exact(b.midpoint(), 0.5 * b.relative_width()))
                .collect())
        }
        OracleMethod::MonteCarlo { samples } => {
            let ds = distributions(inputs)?;
            xs.iter()
                .enumerate()
                .map(|(i, &x)| {
                    Ok(from_estimate(mc_conv_tail(
                        &ds,
                        x,
                        samples,
                        seed.wrapping_add(i as u64),
                    )?))
                })
                .collect()
        }
        OracleMethod::FunctionConvolve => {
            let fs = functions(inputs)?;
            xs.iter()
                .map(|&x| Ok(exact(function_convolve_n_scaled(fs, x)?, 1e-8)))
                .collect()
        }
        OracleMethod::ConvolutionIntegral => {
            let fs = functions(inputs)?;
            xs.iter()
                .map(|&x| Ok(exact(convolution_integral_scaled(fs, x)?, 1e-6)))
                .collect()
        }
        OracleMethod::RiskMonteCarlo { samples, quantity } => {
            let c = risk(inputs)?;
            Ok(ruin_mc_grid(c, xs, c.n(), samples, seed)?
                .into_iter()
                .map(|r| {
                    from_estimate(match quantity {
                        RiskQuantity::Sn => r.sn,
                        RiskQuantity::Psi => r.psi,
                    })
                })
                .collect())
        }
        OracleMethod::RiskGrid { step } => {
            let c = risk(inputs)?;
            Ok(sn_tail_oracle_grid(c, xs, &RiskGridPlan::new(step))?
                .into_iter()
                .map(|b| exact(b.midpoint(), 0.5 * b.relative_width()))
                .collect())
        }
    }
}

fn plain(value: Scaled) -> PredictorValue {
    PredictorValue {
        value,
        envelope: None,
        flagged: false,
    }
}

fn envelope_members(inputs: &StudyInputs) -> Result<Vec<EnvelopeMember>> {
    match inputs {
        StudyInputs::Envelope(ms) => Ok(ms
            .iter()
            .map(|m| EnvelopeMember {
                dist: m.distribution.clone(),
                f0: m.f0,
                c: m.c,
                d: m.d,
            })
            .collect()),
        _ => Err(Error::Usage(
            "the envelope predictor needs envelope inputs".into(),
        )),
    }
}

fn exp_power_params(ds: &[SemiRvDistribution]) -> Result<(f64, f64, f64, f64)> {
    let first = ds
        .first()
        .ok_or_else(|| Error::Precondition("empty ensemble".into()))?;
    match *first.f().family() {
        Family::ExpPower { c, beta, d }
            if ds
                .iter()
                .all(|m| m.f() == first.f() && m.alpha() == first.alpha() && !m.is_lattice()) =>
        {
            Ok((first.alpha(), c, d, beta))
        }
        _ => Err(Error::Usage(
            "the exp-power predictor needs identical non-lattice exp-power members".into(),
        )),
    }
}

/// Label of the asymptotic form a predictor applies to these inputs.
pub fn predictor_tag(method: &PredictorMethod, inputs: &StudyInputs) -> Result<String> {
    let tag = match method {
        PredictorMethod::Thm11 => CaseTag::Thm11General.name().to_string(),
        PredictorMethod::Thm12CaseI => CaseTag::Thm12AllAboveMinus1.name().to_string(),
        PredictorMethod::Thm12CaseIi => CaseTag::Thm12AllMinus1.name().to_string(),
        PredictorMethod::Thm12CaseIii => CaseTag::Thm12Mixed.name().to_string(),
        PredictorMethod::Dispatch => classify_and_predict(&distributions(inputs)?)?
            .case_tag
            .name()
            .to_string(),
        PredictorMethod::Lemma22 => {
            let fs = functions(inputs)?;
            if fs.len() != 2 {
                return Err(Error::Usage(
                    "pairwise forms need exactly two functions".into(),
                ));
            }
            predict_lemma22(&fs[0], &fs[1], 1.0)?
                .case_tag
                .name()
                .to_string()
        }
        PredictorMethod::IntegralProduct => "Lemma23".to_string(),
        PredictorMethod::Prop41 => CaseTag::Prop41.name().to_string(),
        PredictorMethod::Prop42Envelope => CaseTag::Prop42Envelope.name().to_string(),
        PredictorMethod::Thm31 => "Thm31".to_string(),
        PredictorMethod::Thm32 { case } => format!("Thm32_{}", case.name()),
        PredictorMethod::TheoremA => "TheoremA".to_string(),
    };
    Ok(tag)
}

pub fn evaluate_predictor(
    method: &PredictorMethod,
    inputs: &StudyInputs,
    x: f64,
) -> Result<PredictorValue> {
    match *method {
        PredictorMethod::Thm11 => Ok(plain(predict_thm11_scaled(&distributions(inputs)?, x)?)),
        PredictorMethod::Thm12CaseI => Ok(plain(predict_thm12_case_i_scaled(
            &distributions(inputs)?,
            x,
        )?)),
        PredictorMethod::Thm12CaseIi => Ok(plain(predict_thm12_case_ii_scaled(
            &distributions(inputs)?,
            x,
        )?)),
        PredictorMethod::Thm12CaseIii => Ok(plain(predict_thm12_case_iii_scaled(
            &distributions(inputs)?,
            x,
        )?)),
        PredictorMethod::Dispatch => Ok(plain(
            classify_and_predict(&distributions(inputs)?)?.evaluate_scaled(x)?,
        )),
        PredictorMethod::Lemma22 => {
            let fs = functions(inputs)?;
            if fs.len() != 2 {
                return Err(Error::Usage(
                    "pairwise forms need exactly two functions".into(),
                ));
            }
            Ok(plain(Scaled::from_f64(
                predict_lemma22(&fs[0], &fs[1], x)?.value,
            )))
        }
        PredictorMethod::IntegralProduct => {
            let fs = functions(inputs)?;
            let mut ln = 0.0;
            for f in fs {
                if f.gamma_index() != crate::tailfn::RvIndex::Index(-1.0) {
                    return Err(Error::WrongCase(
                        "the integral product needs index -1 functions".into(),
                    ));
                }
                ln += f.f_integral_scaled(x)?.ln();
            }
            Ok(plain(Scaled::from_ln(ln)))
        }
        PredictorMethod::Prop41 => {
            let ds = distributions(inputs)?;
            let (alpha, c, d, beta) = exp_power_params(&ds)?;
            Ok(plain(predict_prop41_scaled(
                alpha,
                c,
                d,
                beta,
                ds.len(),
                x,
            )?))
        }
        PredictorMethod::Prop42Envelope => {
            let e = envelope_prop42(&envelope_members(inputs)?, x)?;
            Ok(PredictorValue {
                value: e.center,
                envelope: Some((e.lower, e.upper)),
                flagged: false,
            })
        }
        PredictorMethod::Thm31 => {
            let p = predict_thm31(risk(inputs)?, x)?;
            Ok(PredictorValue {
                value: p.value,
                envelope: None,
                flagged: p.flagged,
            })
        }
        PredictorMethod::Thm32 { case } => Ok(plain(predict_thm32(risk(inputs)?, x, case)?)),
        PredictorMethod::TheoremA => Ok(plain(predict_theorem_a(risk(inputs)?, x)?)),
    }
}
