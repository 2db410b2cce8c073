//! Families of `f`, their indices, running integrals and Karamata ratios.

use semirv::{KaramataParams, Result, RvIndex, TailFunctionSpec};

fn main() -> Result<()> {
    let families = [
        ("constant", TailFunctionSpec::constant(1.0)?),
        ("log_power(1)", TailFunctionSpec::log_power(1.0, 1.0)?),
        ("log_power(-1)", TailFunctionSpec::log_power(-1.0, 1.0)?),
        (
            "log_log_power(2)",
            TailFunctionSpec::log_log_power(2.0, 1.0)?,
        ),
        ("exp_power", TailFunctionSpec::exp_power(1.0, 0.5, -1.0)?),
        ("sawtooth", TailFunctionSpec::piecewise_oscillating(1.0)?),
        (
            "karamata",
            TailFunctionSpec::karamata(KaramataParams {
                c0: 1.0,
                c1: 0.5,
                c_rate: 1.0,
                eps_scale: 0.5,
                eps_shift: 1.0,
                eps_power: 1.0,
                a: 0.0,
            })?,
        ),
    ];
    println!(
        "{:<18} {:>8} {:>10} {:>14} {:>14} {:>12}",
        "family", "index", "divergent", "f(100)", "f^I(100)", "x f / f^I"
    );
    for (name, f) in &families {
        let index = match f.gamma_index() {
            RvIndex::Index(g) => format!("{g}"),
            RvIndex::NotRegularlyVarying => "-".to_string(),
        };
        let ratio = f
            .karamata_ratio(100.0)
            .map(|r| format!("{r:.6}"))
            .unwrap_or_else(|_| "-".into());
        println!(
            "{:<18} {:>8} {:>10} {:>14.6e} {:>14.6e} {:>12}",
            name,
            index,
            f.divergent_integral(),
            f.eval_f(100.0)?,
            f.f_integral(100.0)?,
            ratio
        );
    }
    let lp = TailFunctionSpec::log_power(1.0, 1.0)?;
    let estimates = lp.rv_index_estimate(2.0, &[10.0, 1e3, 1e5])?;
    println!("index estimates of (1 + x) with t = 2: {estimates:?}");
    println!("spec as JSON: {}", serde_json::to_string(&lp)?);
    Ok(())
}
