//! Building distributions, evaluating tails, and sampling by inverse transform.

use semirv::{Result, SemiRvDistribution, TailFunctionSpec};

fn main() -> Result<()> {
    let exp = SemiRvDistribution::exponential(1.0)?;
    let geo = SemiRvDistribution::geometric(std::f64::consts::LN_2)?;
    let lp = SemiRvDistribution::continuous(1.0, TailFunctionSpec::log_power(1.0, 1.0)?)?;
    let ep = SemiRvDistribution::continuous(1.0, TailFunctionSpec::exp_power(1.0, 0.5, -1.0)?)?;

    for (name, d) in [("exp(1)", &exp), ("log_power(1)", &lp), ("exp_power", &ep)] {
        println!(
            "{name:<14} class {:<10} x0 {:.6} atom {:.6} tail(10) {:.6e} density(10) {:.6e} median {:.6}",
            d.class_tag().name(),
            d.x0(),
            d.head_atom(),
            d.tail(10.0),
            d.density(10.0)?,
            d.quantile(0.5)?
        );
    }
    println!(
        "geometric(ln 2): pmf(3) = {}, tail(3) = {}",
        geo.pmf(3)?,
        geo.tail(3.0)
    );

    let batch = lp.sample(42, 0, 100_000)?;
    let mean = batch.values.iter().sum::<f64>() / batch.values.len() as f64;
    println!(
        "log_power(1) sample mean over {} draws: {mean:.4}",
        batch.values.len()
    );

    let mut csv = Vec::new();
    exp.sample(7, 3, 5)?.write_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    println!("{}", serde_json::to_string(&ep)?);
    Ok(())
}
