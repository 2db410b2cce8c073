//! Study configuration files.

use serde::{Deserialize, Serialize};

use super::methods::{OracleMethod, PredictorMethod, StudyInputs};
use super::report::{RatioStudyReport, Trend};
use crate::error::{Error, Result};

/// Evaluation points of a study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XGrid {
    Values(Vec<f64>),
    Linear {
        start: f64,
        step: f64,
        count: usize,
    },
    /// `start, start * factor, ...`.
    Geometric {
        start: f64,
        factor: f64,
        count: usize,
    },
    /// Geometric from `start` to `end` inclusive.
    GeometricRange {
        start: f64,
        end: f64,
        count: usize,
    },
    /// `x = e^t` with `t` geometric from `start` to `end` inclusive.
    ExpGeometric {
        start: f64,
        end: f64,
        count: usize,
    },
}

fn geometric_range(start: f64, end: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![start; count];
    }
    let r = (end / start).ln() / (count - 1) as f64;
    (0..count)
        .map(|i| match i {
            0 => start,
            i if i == count - 1 => end,
            i => start * (r * i as f64).exp(),
        })
        .collect()
}

impl XGrid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            XGrid::Values(v) => v.clone(),
            XGrid::Linear { start, step, count } => {
                (0..*count).map(|i| start + step * i as f64).collect()
            }
            XGrid::Geometric {
                start,
                factor,
                count,
            } => (0..*count).map(|i| start * factor.powi(i as i32)).collect(),
            XGrid::GeometricRange { start, end, count } => geometric_range(*start, *end, *count),
            XGrid::ExpGeometric { start, end, count } => geometric_range(*start, *end, *count)
                .into_iter()
                .map(f64::exp)
                .collect(),
        }
    }
}

/// A declared expectation about a finished study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assertion {
    Trend(Trend),
    TrendIn(Vec<Trend>),
    /// Final unflagged `|ratio - 1|` below the bound.
    FinalDeviationBelow(f64),
    /// `|ratio - 1| <= tolerance` at grid point `x`.
    RatioWithin {
        x: f64,
        tolerance: f64,
    },
    /// Final unflagged `|ratio - 1|` below the first.
    CloserAtEnd,
    /// Every oracle value lies inside the predicted envelope.
    EnvelopeContains,
}

impl Assertion {
    /// `None` when the assertion holds, otherwise a description of the failure.
    pub fn check(&self, report: &RatioStudyReport) -> Option<String> {
        let dev = report.deviations();
        match self {
            Assertion::Trend(t) => (report.trend != *t)
                .then(|| format!("trend {} != {}", report.trend.name(), t.name())),
            Assertion::TrendIn(ts) => (!ts.contains(&report.trend)).then(|| {
                format!(
                    "trend {} not among the accepted trends",
                    report.trend.name()
                )
            }),
            Assertion::FinalDeviationBelow(b) => match dev.last() {
                Some(d) if d < b => None,
                Some(d) => Some(format!("final |ratio - 1| = {d:.6e} >= {b:.6e}")),
                None => Some("no unflagged rows".into()),
            },
            Assertion::RatioWithin { x, tolerance } => match report.row_at(*x) {
                Some(r) if (r.ratio - 1.0).abs() <= *tolerance => None,
                Some(r) => Some(format!(
                    "|ratio - 1| = {:.6e} at x = {x} exceeds {tolerance:.6e}",
                    (r.ratio - 1.0).abs()
                )),
                None => Some(format!("x = {x} is not on the grid")),
            },
            Assertion::CloserAtEnd => match (dev.first(), dev.last()) {
                (Some(a), Some(b)) if dev.len() >= 2 && b < a => None,
                _ => Some("final |ratio - 1| is not below the first".into()),
            },
            Assertion::EnvelopeContains => {
                let outside: Vec<String> = report
                    .rows
                    .iter()
                    .filter(|r| r.within_envelope() != Some(true))
                    .map(|r| format!("{}", r.x))
                    .collect();
                (!outside.is_empty())
                    .then(|| format!("oracle outside the envelope at x = {}", outside.join(", ")))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySpec {
    pub name: String,
    pub inputs: StudyInputs,
    pub oracle: OracleMethod,
    pub predictor: PredictorMethod,
    pub x_grid: XGrid,
    /// Added to every grid point, e.g. to compare mixed lattice ensembles off the integers.
    #[serde(default)]
    pub x_offset: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    #[serde(default)]
    pub seed: u64,
    pub studies: Vec<StudySpec>,
}

impl StudyConfig {
    /// Parses and validates; errors carry the JSON path, line and column.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: StudyConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::InvalidSpec(format!("at `{path}`: {}", e.into_inner()))
        })?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.studies.is_empty() {
            return Err(Error::InvalidSpec(
                "at `studies`: at least one study is required".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for (i, s) in self.studies.iter().enumerate() {
            let ok = !s.name.is_empty()
                && s.name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
            if !ok {
                return Err(Error::InvalidSpec(format!(
                    "at `studies[{i}].name`: names use letters, digits, '_' and '-', got {:?}",
                    s.name
                )));
            }
            if !seen.insert(s.name.as_str()) {
                return Err(Error::InvalidSpec(format!(
                    "at `studies[{i}].name`: duplicate name {:?}",
                    s.name
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(
            XGrid::Geometric {
                start: 10.0,
                factor: 2.0,
                count: 3
            }
            .points(),
            vec![10.0, 20.0, 40.0]
        );
        let r = XGrid::GeometricRange {
            start: 4.0,
            end: 9.0,
            count: 5,
        }
        .points();
        assert_eq!(r[4], 9.0);
        assert!((r[2] - 6.0).abs() < 1e-12);
        assert_eq!(
            XGrid::Linear {
                start: 1.0,
                step: 0.5,
                count: 3
            }
            .points(),
            vec![1.0, 1.5, 2.0]
        );
    }

    #[test]
    fn diagnostics_name_the_field() {
        let text = r#"{"studies": [{"name": "a", "inputs": {"functions": [{"family": "nope", "params": {}}]},
            "oracle": {"method": "function_convolve"}, "predictor": {"method": "lemma22"},
            "x_grid": {"values": [1, 2, 3, 4, 5]}}]}"#;
        let msg = StudyConfig::from_json_str(text).unwrap_err().to_string();
        assert!(msg.contains("studies[0].inputs"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
    }
}
