//! Identity suite run by `semirv selfcheck`.

use crate::asym::{
    envelope_prop42, lattice_mix_constant, predict_thm12_case_i_scaled,
    predict_thm12_case_iii_scaled, EnvelopeMember,
};
use crate::dist::SemiRvDistribution;
use crate::error::Result;
use crate::oracle::{conv_tail_2, lattice_conv_tail};
use crate::risk::{predict_theorem_a, predict_thm32, NegativePart, RiskModelConfig, Thm32Case};
use crate::rng::UniformStream;
use crate::tailfn::TailFunctionSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Largest relative deviation seen.
    pub worst: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfCheckReport {
    pub checks: Vec<CheckResult>,
}

impl SelfCheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &'static str, tolerance: f64, deviations: Result<Vec<f64>>) -> CheckResult {
    match deviations {
        Ok(d) => {
            let worst = d.iter().cloned().fold(0.0, f64::max);
            CheckResult {
                name,
                passed: d.iter().all(|v| v.is_finite()) && worst <= tolerance,
                worst,
                tolerance,
            }
        }
        Err(_) => CheckResult {
            name,
            passed: false,
            worst: f64::INFINITY,
            tolerance,
        },
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Random risk configurations with indices `g - 1`, `g` in `(0, 3]`, horizon at most 4.
pub fn telescoping_deviations(tuples: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = UniformStream::new(seed, 0);
    let mut out = Vec::with_capacity(tuples);
    for _ in 0..tuples {
        let n = 1 + (rng.next_open01() * 4.0) as usize;
        let g_star = 3.0 * rng.next_open01();
        let ins = TailFunctionSpec::log_power(g_star - 1.0, 1.0)?;
        let fin = (0..n)
            .map(|_| TailFunctionSpec::log_power(3.0 * rng.next_open01() - 1.0, 1.0))
            .collect::<Result<Vec<_>>>()?;
        let config = RiskModelConfig::new(n, 1.0, vec![ins; n], fin, NegativePart::None)?;
        let x = (20.0 + 80.0 * rng.next_open01()).exp();
        let a = predict_theorem_a(&config, x)?;
        let b = predict_thm32(&config, x, Thm32Case::I)?;
        out.push((a.ratio(&b) - 1.0).abs());
    }
    Ok(out)
}

fn case_collapse() -> Result<Vec<f64>> {
    let ds = [
        SemiRvDistribution::continuous(1.0, TailFunctionSpec::log_power(0.5, 1.0)?)?,
        SemiRvDistribution::exponential(1.0)?,
        SemiRvDistribution::continuous(1.0, TailFunctionSpec::log_power(2.0, 1.0)?)?,
    ];
    (1..=20)
        .map(|k| {
            let x = 5.0 * k as f64;
            let a = predict_thm12_case_iii_scaled(&ds, x)?;
            let b = predict_thm12_case_i_scaled(&ds, x)?;
            Ok((a.ratio(&b) - 1.0).abs())
        })
        .collect()
}

fn degenerate_envelope() -> Result<Vec<f64>> {
    let d = SemiRvDistribution::continuous(1.0, TailFunctionSpec::log_power(1.0, 1.0)?)?;
    let m = EnvelopeMember {
        dist: d.clone(),
        f0: *d.f(),
        c: 1.0,
        d: 1.0,
    };
    [10.0, 100.0, 1000.0]
        .iter()
        .map(|&x| {
            let e = envelope_prop42(&[m.clone(), m.clone()], x)?;
            let c = predict_thm12_case_i_scaled(&[d.clone(), d.clone()], x)?;
            Ok((e.lower.ratio(&c) - 1.0)
                .abs()
                .max((e.upper.ratio(&c) - 1.0).abs()))
        })
        .collect()
}

fn erlang_golden() -> Result<Vec<f64>> {
    let e = SemiRvDistribution::exponential(1.0)?;
    [5.0f64, 10.0, 20.0, 40.0]
        .iter()
        .map(|&x| Ok(rel(conv_tail_2(&e, &e, x)?, (1.0 + x) * (-x).exp())))
        .collect()
}

fn geometric_golden() -> Result<Vec<f64>> {
    let g = SemiRvDistribution::geometric(std::f64::consts::LN_2)?;
    [1i64, 10, 64, 128]
        .iter()
        .map(|&k| {
            Ok(rel(
                lattice_conv_tail(&[g.clone(), g.clone()], k)?,
                (k + 1) as f64 * 0.5f64.powi(k as i32),
            ))
        })
        .collect()
}

fn lattice_constant() -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for n in 2..=6usize {
        for m in 0..=n {
            let alpha = 0.7;
            let a = lattice_mix_constant(alpha, m, n)?;
            let expected = if m == n {
                alpha.exp_m1().powi(n as i32 - 1)
            } else {
                alpha.exp_m1().powi(m as i32) * alpha.powi((n - m - 1) as i32)
            };
            out.push(rel(a.powi(n as i32 - 1), expected));
        }
    }
    Ok(out)
}

pub fn selfcheck() -> SelfCheckReport {
    SelfCheckReport {
        checks: vec![
            check(
                "beta_gamma_telescoping",
                1e-10,
                telescoping_deviations(20, 2024),
            ),
            check("mixed_case_collapse", 1e-12, case_collapse()),
            check("degenerate_envelope", 1e-12, degenerate_envelope()),
            check("erlang_two_fold", 1e-9, erlang_golden()),
            check("geometric_two_fold", 1e-12, geometric_golden()),
            check("lattice_constant", 1e-12, lattice_constant()),
        ],
    }
}
