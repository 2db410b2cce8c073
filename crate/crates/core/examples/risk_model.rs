//! Discounted aggregate losses: ruin by Monte Carlo, the grid recursion, and predictors.

use semirv::risk::{
    check_dominance_conditions, classify_thm32, predict_theorem_a, predict_thm31, predict_thm32,
    ruin_mc, simulate_paths, sn_tail_oracle_grid, NegativePart, RiskGridPlan, RiskModelConfig,
};
use semirv::{Result, TailFunctionSpec};

fn main() -> Result<()> {
    let config = RiskModelConfig::all_constant(2, 1.0)?;
    let x = 6f64.exp();

    let ruin = ruin_mc(&config, x, 2, 1_000_000, 2024)?;
    println!(
        "psi(e^6, 2) = {:.6} [{:.6}, {:.6}], P(S_2 > e^6) = {:.6}",
        ruin.psi.point, ruin.psi.ci_low, ruin.psi.ci_high, ruin.sn.point
    );
    let b = sn_tail_oracle_grid(&config, &[x], &RiskGridPlan::new(1.0 / 1024.0))?[0];
    println!(
        "grid recursion bracket: [{:.6}, {:.6}]",
        b.lower.value(),
        b.upper.value()
    );

    let p31 = predict_thm31(&config, x)?;
    let case = classify_thm32(&config)?;
    println!(
        "predictions at e^6: general {:.6} (flagged {}), case {} {:.6}, gamma quotient {:.6}",
        p31.value.value(),
        p31.flagged,
        case.name(),
        predict_thm32(&config, x, case)?.value(),
        predict_theorem_a(&config, x)?.value()
    );

    let report = check_dominance_conditions(&config, &[2.0, 4.0, 8.0, 16.0])?;
    println!("dominance diagnostics pass: {}", report.passes());

    let with_losses = RiskModelConfig::new(
        3,
        1.0,
        vec![TailFunctionSpec::constant(1.0)?; 3],
        vec![TailFunctionSpec::log_power(0.5, 1.0)?; 3],
        NegativePart::ShiftedExp {
            rate: 1.0,
            mass: 0.3,
        },
    )?;
    let paths = simulate_paths(&with_losses, 5, 1)?;
    for p in &paths {
        println!("S_3 = {:>12.4}  M_3 = {:>12.4}", p.s_n, p.m_n);
    }
    println!("{}", serde_json::to_string(&with_losses)?);
    Ok(())
}
