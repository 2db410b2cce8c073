//! Ratio studies: oracle against predictor on an x-grid.

use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::methods::{
    evaluate_oracle, evaluate_predictor, predictor_tag, OracleMethod, PredictorMethod, StudyInputs,
};
use crate::error::{Error, Result};
use crate::scaled::Scaled;

/// Rows whose oracle error bound exceeds this fraction of the value are excluded from the trend.
pub const FLAG_THRESHOLD: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    ConvergingTo1,
    Inconclusive,
    Diverging,
}

impl Trend {
    pub fn name(&self) -> &'static str {
        match self {
            Trend::ConvergingTo1 => "converging_to1",
            Trend::Inconclusive => "inconclusive",
            Trend::Diverging => "diverging",
        }
    }
}

/// Classifies a sequence of `|ratio - 1|` values.
///
/// Converging when the last `max(3, ceil(len / 2))` values are nonincreasing and the final
/// value is below half the first; diverging when they are nondecreasing and the final value
/// exceeds twice the first.
pub fn classify_trend(deviations: &[f64]) -> Trend {
    let len = deviations.len();
    if len < 3 || deviations.iter().any(|d| !d.is_finite()) {
        return Trend::Inconclusive;
    }
    let window = &deviations[len - 3.max(len.div_ceil(2)).min(len)..];
    let (first, last) = (deviations[0], deviations[len - 1]);
    if window.windows(2).all(|w| w[1] <= w[0]) && last < first / 2.0 {
        Trend::ConvergingTo1
    } else if window.windows(2).all(|w| w[1] >= w[0]) && last > 2.0 * first {
        Trend::Diverging
    } else {
        Trend::Inconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRow {
    pub x: f64,
    pub oracle: Scaled,
    /// Absolute error bound divided by the oracle value.
    pub oracle_rel_error: f64,
    pub predicted: Scaled,
    pub ratio: f64,
    /// Excluded from the trend because the oracle error is too large.
    pub flagged: bool,
    /// The predictor's own diagnostics failed.
    pub predictor_flagged: bool,
    pub envelope: Option<(Scaled, Scaled)>,
}

impl RatioRow {
    pub fn oracle_error_bound(&self) -> f64 {
        self.oracle_rel_error * self.oracle.value()
    }

    /// Oracle inside `[lower, upper]`, widened by its own error bound.
    pub fn within_envelope(&self) -> Option<bool> {
        self.envelope.map(|(lo, hi)| {
            let v = self.oracle.ln();
            let slack = self.oracle_rel_error.ln_1p();
            v + slack >= lo.ln() && v - slack <= hi.ln()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyMetadata {
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    pub x_offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioStudyReport {
    pub predictor_tag: String,
    pub rows: Vec<RatioRow>,
    pub trend: Trend,
    pub metadata: StudyMetadata,
}

impl RatioStudyReport {
    fn unflagged(&self) -> impl Iterator<Item = &RatioRow> {
        self.rows.iter().filter(|r| !r.flagged)
    }

    /// `|ratio - 1|` over unflagged rows.
    pub fn deviations(&self) -> Vec<f64> {
        self.unflagged().map(|r| (r.ratio - 1.0).abs()).collect()
    }

    pub fn final_deviation(&self) -> Option<f64> {
        self.deviations().last().copied()
    }

    pub fn row_at(&self, x: f64) -> Option<&RatioRow> {
        self.rows
            .iter()
            .min_by(|a, b| (a.x - x).abs().total_cmp(&(b.x - x).abs()))
            .filter(|r| (r.x - x).abs() <= 1e-9 * x.abs().max(1.0))
    }

    /// CSV with 17 significant digits; `ln` columns keep deep tails readable.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "x",
            "oracle_value",
            "oracle_error_bound",
            "predicted_value",
            "ratio",
            "ln_oracle",
            "ln_predicted",
            "flagged",
            "predictor_flagged",
            "ln_envelope_lower",
            "ln_envelope_upper",
        ])?;
        let num = |v: f64| format!("{v:.16e}");
        for r in &self.rows {
            let (lo, hi) = match r.envelope {
                Some((lo, hi)) => (num(lo.ln()), num(hi.ln())),
                None => (String::new(), String::new()),
            };
            w.write_record([
                num(r.x),
                num(r.oracle.value()),
                num(r.oracle_error_bound()),
                num(r.predicted.value()),
                num(r.ratio),
                num(r.oracle.ln()),
                num(r.predicted.ln()),
                r.flagged.to_string(),
                r.predictor_flagged.to_string(),
                lo,
                hi,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Everything a study needs besides its name and assertions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyDefinition {
    pub inputs: StudyInputs,
    pub oracle: OracleMethod,
    pub predictor: PredictorMethod,
}

pub fn hash_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn check_grid(x_grid: &[f64]) -> Result<()> {
    if x_grid.len() < 5 {
        return Err(Error::Precondition(format!(
            "x grid needs at least 5 points, got {}",
            x_grid.len()
        )));
    }
    if x_grid.iter().any(|x| !x.is_finite()) || x_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition(
            "x grid must be finite and strictly ascending".into(),
        ));
    }
    Ok(())
}

/// Evaluates oracle and predictor at every `x + x_offset` and classifies the ratio trend.
pub fn run_ratio_study(
    oracle: &OracleMethod,
    predictor: &PredictorMethod,
    inputs: &StudyInputs,
    x_grid: &[f64],
    x_offset: f64,
    seed: u64,
) -> Result<RatioStudyReport> {
    check_grid(x_grid)?;
    let xs: Vec<f64> = x_grid.iter().map(|x| x + x_offset).collect();
    let tag = predictor_tag(predictor, inputs)?;
    let oracle_values = evaluate_oracle(oracle, inputs, &xs, seed)?;
    let mut rows = Vec::with_capacity(xs.len());
    for (&x, o) in xs.iter().zip(&oracle_values) {
        let p = evaluate_predictor(predictor, inputs, x)?;
        rows.push(RatioRow {
            x,
            oracle: o.value,
            oracle_rel_error: o.rel_error,
            predicted: p.value,
            ratio: o.value.ratio(&p.value),
            flagged: !(o.rel_error <= FLAG_THRESHOLD),
            predictor_flagged: p.flagged,
            envelope: p.envelope,
        });
    }
    let definition = StudyDefinition {
        inputs: inputs.clone(),
        oracle: *oracle,
        predictor: *predictor,
    };
    let mut report = RatioStudyReport {
        predictor_tag: tag,
        rows,
        trend: Trend::Inconclusive,
        metadata: StudyMetadata {
            config_hash: hash_hex(&serde_json::to_vec(&definition)?),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            x_offset,
        },
    };
    report.trend = classify_trend(&report.deviations());
    Ok(report)
}
