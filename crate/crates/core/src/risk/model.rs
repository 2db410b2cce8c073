use serde::{Deserialize, Serialize};

use crate::dist::{ClassTag, SemiRvDistribution};
use crate::error::{Error, Result};
use crate::tailfn::TailFunctionSpec;

/// Law of `X_i` on `(-inf, 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativePart {
    /// `X_i >= 1` almost surely.
    #[default]
    None,
    /// With probability `mass`, `X_i = -E` where `E ~ Exp(rate)`; otherwise the log-domain draw.
    ShiftedExp { rate: f64, mass: f64 },
}

impl NegativePart {
    /// Probability that `X_i` is drawn from the positive part.
    pub fn positive_mass(&self) -> f64 {
        match *self {
            NegativePart::None => 1.0,
            NegativePart::ShiftedExp { mass, .. } => 1.0 - mass,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRiskConfig {
    n: usize,
    alpha: f64,
    insurance: Vec<TailFunctionSpec>,
    financial: Vec<TailFunctionSpec>,
    #[serde(default)]
    negative_part: NegativePart,
}

/// Horizon `n` with per-period tails `P(X_i > x) = min(1, x^-alpha f_i(ln x))` and
/// `P(Y_i > y) = min(1, y^-alpha f*_i(ln y))`, `x, y >= 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawRiskConfig", into = "RawRiskConfig")]
pub struct RiskModelConfig {
    alpha: f64,
    negative_part: NegativePart,
    insurance: Vec<SemiRvDistribution>,
    financial: Vec<SemiRvDistribution>,
}

impl TryFrom<RawRiskConfig> for RiskModelConfig {
    type Error = Error;

    fn try_from(raw: RawRiskConfig) -> Result<Self> {
        RiskModelConfig::new(
            raw.n,
            raw.alpha,
            raw.insurance,
            raw.financial,
            raw.negative_part,
        )
    }
}

impl From<RiskModelConfig> for RawRiskConfig {
    fn from(c: RiskModelConfig) -> Self {
        RawRiskConfig {
            n: c.n(),
            alpha: c.alpha,
            insurance: c.insurance.iter().map(|d| *d.f()).collect(),
            financial: c.financial.iter().map(|d| *d.f()).collect(),
            negative_part: c.negative_part,
        }
    }
}

fn log_domain(alpha: f64, f: TailFunctionSpec, role: &str, i: usize) -> Result<SemiRvDistribution> {
    if f.lattice() {
        return Err(Error::InvalidSpec(format!(
            "{role}[{i}]: risk model tails must be non-lattice"
        )));
    }
    let d = SemiRvDistribution::continuous(alpha, f)
        .map_err(|e| Error::InvalidSpec(format!("{role}[{i}]: {e}")))?;
    if matches!(d.class_tag(), ClassTag::L2 { .. }) {
        return Err(Error::InvalidSpec(format!(
            "{role}[{i}]: f must have a divergent integral"
        )));
    }
    Ok(d)
}

impl RiskModelConfig {
    pub fn new(
        n: usize,
        alpha: f64,
        insurance: Vec<TailFunctionSpec>,
        financial: Vec<TailFunctionSpec>,
        negative_part: NegativePart,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("horizon n must be positive".into()));
        }
        if insurance.len() != n || financial.len() != n {
            return Err(Error::InvalidSpec(format!(
                "expected {n} insurance and {n} financial tails, got {} and {}",
                insurance.len(),
                financial.len()
            )));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if let NegativePart::ShiftedExp { rate, mass } = negative_part {
            if !(rate > 0.0 && rate.is_finite()) || !(0.0..1.0).contains(&mass) {
                return Err(Error::InvalidSpec(format!(
                    "shifted_exp needs rate > 0 and mass in [0, 1), got rate = {rate}, mass = {mass}"
                )));
            }
        }
        let insurance = insurance
            .into_iter()
            .enumerate()
            .map(|(i, f)| log_domain(alpha, f, "insurance", i))
            .collect::<Result<_>>()?;
        let financial = financial
            .into_iter()
            .enumerate()
            .map(|(i, f)| log_domain(alpha, f, "financial", i))
            .collect::<Result<_>>()?;
        Ok(RiskModelConfig {
            alpha,
            negative_part,
            insurance,
            financial,
        })
    }

    /// All `2n` functions constant equal to one.
    pub fn all_constant(n: usize, alpha: f64) -> Result<Self> {
        let c = TailFunctionSpec::constant(1.0)?;
        RiskModelConfig::new(n, alpha, vec![c; n], vec![c; n], NegativePart::None)
    }

    pub fn with_negative_part(self, negative_part: NegativePart) -> Result<Self> {
        let raw: RawRiskConfig = self.into();
        RiskModelConfig::new(
            raw.n,
            raw.alpha,
            raw.insurance,
            raw.financial,
            negative_part,
        )
    }

    pub fn n(&self) -> usize {
        self.insurance.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn negative_part(&self) -> NegativePart {
        self.negative_part
    }

    /// Laws of `ln X_i` on the positive part.
    pub fn insurance(&self) -> &[SemiRvDistribution] {
        &self.insurance
    }

    /// Laws of `ln Y_i`.
    pub fn financial(&self) -> &[SemiRvDistribution] {
        &self.financial
    }

    pub fn insurance_f(&self, i: usize) -> TailFunctionSpec {
        *self.insurance[i].f()
    }

    pub fn financial_f(&self, i: usize) -> TailFunctionSpec {
        *self.financial[i].f()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(s);
        serde_path_to_error::deserialize(de).map_err(|e| Error::InvalidSpec(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let text = r#"{"n": 2, "alpha": 1.0,
            "insurance": [{"family": "constant", "params": {"c": 1.0}}, {"family": "constant", "params": {"c": 1.0}}],
            "financial": [{"family": "log_power", "params": {"gamma": 1.0}}, {"family": "constant", "params": {"c": 1.0}}],
            "negative_part": {"shifted_exp": {"rate": 2.0, "mass": 0.25}}}"#;
        let c = RiskModelConfig::from_json_str(text).unwrap();
        assert_eq!(c.n(), 2);
        assert_eq!(c.negative_part().positive_mass(), 0.75);
        let back = RiskModelConfig::from_json_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back.financial_f(0), c.financial_f(0));
    }

    #[test]
    fn rejects_bad_configs() {
        let c = TailFunctionSpec::constant(1.0).unwrap();
        assert!(RiskModelConfig::new(2, 1.0, vec![c], vec![c, c], NegativePart::None).is_err());
        let l2 = TailFunctionSpec::log_power(-2.0, 1.0).unwrap();
        assert!(RiskModelConfig::new(1, 1.0, vec![l2], vec![c], NegativePart::None).is_err());
        let bad = NegativePart::ShiftedExp {
            rate: 1.0,
            mass: 1.0,
        };
        assert!(RiskModelConfig::new(1, 1.0, vec![c], vec![c], bad).is_err());
        assert!(RiskModelConfig::from_json_str(
            r#"{"n": 1, "alpha": 1, "insurance": [], "financial": [], "extra": 1}"#
        )
        .is_err());
    }
}
