use std::io::Write;

use super::model::RiskModelConfig;
use super::predict::{classify_thm32, predict_theorem_a, predict_thm31, predict_thm32};
use super::sim::{ruin_mc_grid, RuinEstimate};
use crate::error::Result;
use crate::stats::ProportionEstimate;

/// One row of a ruin study: Monte Carlo estimates next to every applicable predictor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuinStudyRow {
    pub x: f64,
    pub horizon: usize,
    pub psi: RuinEstimate,
    pub sn: ProportionEstimate,
    pub thm31: f64,
    pub thm31_flagged: bool,
    pub thm32: Option<f64>,
    pub theorem_a: Option<f64>,
}

/// Monte Carlo ruin and `S_n` tails with predictions at each `x` (horizon `n`).
pub fn ruin_study(
    config: &RiskModelConfig,
    xs: &[f64],
    sample_count: usize,
    seed: u64,
) -> Result<Vec<RuinStudyRow>> {
    let horizon = config.n();
    let reports = ruin_mc_grid(config, xs, horizon, sample_count, seed)?;
    let case = classify_thm32(config).ok();
    reports
        .into_iter()
        .map(|r| {
            let p31 = predict_thm31(config, r.x)?;
            let thm32 = match case {
                Some(c) => Some(predict_thm32(config, r.x, c)?.value()),
                None => None,
            };
            Ok(RuinStudyRow {
                x: r.x,
                horizon,
                psi: r.psi,
                sn: r.sn,
                thm31: p31.value.value(),
                thm31_flagged: p31.flagged,
                thm32,
                theorem_a: predict_theorem_a(config, r.x).ok().map(|s| s.value()),
            })
        })
        .collect()
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// CSV with one row per `x`; inapplicable predictors are left empty.
pub fn write_ruin_csv<W: Write>(rows: &[RuinStudyRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "x",
        "horizon",
        "psi_mc",
        "ci_low",
        "ci_high",
        "sn_mc",
        "sn_ci_low",
        "sn_ci_high",
        "predict_thm31",
        "predict_thm32",
        "predict_theoremA",
        "psi_over_thm31",
        "sn_over_thm31",
        "thm31_flagged",
    ])?;
    for r in rows {
        w.write_record([
            num(r.x),
            r.horizon.to_string(),
            num(r.psi.point),
            num(r.psi.ci_low),
            num(r.psi.ci_high),
            num(r.sn.point),
            num(r.sn.ci_low),
            num(r.sn.ci_high),
            num(r.thm31),
            opt(r.thm32),
            opt(r.theorem_a),
            num(r.psi.point / r.thm31),
            num(r.sn.point / r.thm31),
            r.thm31_flagged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
