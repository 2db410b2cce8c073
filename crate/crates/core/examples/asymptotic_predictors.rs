//! Asymptotic forms of convolution tails and the dispatcher that selects them.

use semirv::asym::{
    classify_and_predict, envelope_prop42, gn_integral_product_check, lattice_mix_constant,
    predict_lemma22, predict_prop41, EnvelopeMember,
};
use semirv::oracle::conv_tail_2;
use semirv::{Result, SemiRvDistribution, TailFunctionSpec};

fn main() -> Result<()> {
    let inv = TailFunctionSpec::log_power(-1.0, 1.0)?;
    let ensembles = [
        ("two exp(1)", vec![SemiRvDistribution::exponential(1.0)?; 2]),
        (
            "two 1/(1+x)",
            vec![SemiRvDistribution::continuous(1.0, inv)?; 2],
        ),
        (
            "mixed indices",
            vec![
                SemiRvDistribution::continuous(1.0, inv)?,
                SemiRvDistribution::continuous(1.0, TailFunctionSpec::log_power(0.0, 1.0)?)?,
            ],
        ),
        (
            "exp-power pair",
            vec![
                SemiRvDistribution::continuous(1.0, TailFunctionSpec::exp_power(1.0, 0.5, -1.0)?)?;
                2
            ],
        ),
    ];
    for (name, ds) in &ensembles {
        let p = classify_and_predict(ds)?;
        let x = 200.0;
        let exact = conv_tail_2(&ds[0], &ds[1], x)?;
        println!(
            "{name:<16} {:<22} a = {:.4}  oracle/predicted at {x} = {:.6}",
            p.case_tag.name(),
            p.a_constant,
            exact / p.evaluate(x)?
        );
    }

    println!(
        "a for one lattice member among three at alpha = 1: {:.5}",
        lattice_mix_constant(1.0, 1, 3)?
    );

    let sq = TailFunctionSpec::log_power(2.0, 1.0)?;
    let pair = predict_lemma22(&inv, &sq, 1e3)?;
    println!(
        "pairwise form {} at 1e3: {:.6e}",
        pair.case_tag.name(),
        pair.value
    );

    let (lhs, rhs) = gn_integral_product_check(&[inv, inv], 1e4)?;
    println!(
        "integral of g_2 vs product of integrals at 1e4: {lhs:.6} / {rhs:.6} = {:.4}",
        lhs / rhs
    );

    println!(
        "exp-power two-fold form at x = 400: {:.6e}",
        predict_prop41(1.0, 1.0, -1.0, 0.5, 2, 400.0)?
    );

    let saw = SemiRvDistribution::continuous(2.0, TailFunctionSpec::piecewise_oscillating(1.0)?)?;
    let member = EnvelopeMember {
        dist: saw,
        f0: TailFunctionSpec::log_power(1.0, 1.0)?,
        c: 1.0,
        d: 2.0,
    };
    let e = envelope_prop42(&[member.clone(), member], 3072.0)?;
    println!(
        "envelope at 3072: ln lower {:.4}, ln center {:.4}, ln upper {:.4}",
        e.lower.ln(),
        e.center.ln(),
        e.upper.ln()
    );

    let p = classify_and_predict(&ensembles[0].1)?;
    p.write_csv(&[10.0, 20.0, 40.0], std::io::stdout().lock())?;
    Ok(())
}
