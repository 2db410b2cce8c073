//! Oracle against predictor on a grid, with the convergence trend.

use semirv::harness::{run_ratio_study, OracleMethod, PredictorMethod, StudyInputs};
use semirv::{Result, SemiRvDistribution};

fn main() -> Result<()> {
    let e = SemiRvDistribution::exponential(1.0)?;
    let inputs = StudyInputs::Distributions(vec![e.clone(), e]);
    let xs: Vec<f64> = (0..6).map(|k| 10.0 * 2f64.powi(k)).collect();
    let report = run_ratio_study(
        &OracleMethod::ConvTail2,
        &PredictorMethod::Thm12CaseI,
        &inputs,
        &xs,
        0.0,
        1,
    )?;
    println!(
        "predictor {} trend {}",
        report.predictor_tag,
        report.trend.name()
    );
    for r in &report.rows {
        println!(
            "x = {:>6}  oracle {:.6e}  predicted {:.6e}  ratio {:.6}",
            r.x,
            r.oracle.value(),
            r.predicted.value(),
            r.ratio
        );
    }
    report.write_csv(std::io::stdout().lock())?;

    let mc = run_ratio_study(
        &OracleMethod::MonteCarlo { samples: 200_000 },
        &PredictorMethod::Dispatch,
        &inputs,
        &[2.0, 4.0, 8.0, 12.0, 16.0],
        0.0,
        99,
    )?;
    for r in &mc.rows {
        println!(
            "x = {:>4}  relative error bound {:.3}  flagged {}",
            r.x, r.oracle_rel_error, r.flagged
        );
    }
    println!("Monte Carlo trend: {}", mc.trend.name());
    Ok(())
}
