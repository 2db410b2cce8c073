//! Exact and bracketed convolution tails by quadrature, summation, grids and Monte Carlo.

use semirv::oracle::{
    conv_tail_2, conv_tail_n_grid, function_convolve, function_convolve_n, lattice_conv_tail,
    mc_conv_tail, GridConvolutionPlan,
};
use semirv::{Result, SemiRvDistribution, TailFunctionSpec};

fn main() -> Result<()> {
    let e = SemiRvDistribution::exponential(1.0)?;
    for x in [5.0f64, 10.0, 20.0, 40.0] {
        let q = conv_tail_2(&e, &e, x)?;
        println!(
            "P(E1 + E2 > {x:>4}) = {q:.12e}  closed form {:.12e}",
            (1.0 + x) * (-x).exp()
        );
    }

    let g = SemiRvDistribution::geometric(std::f64::consts::LN_2)?;
    let k = 128;
    println!(
        "geometric pair at k = {k}: {:.12e} vs (k + 1) 2^-k = {:.12e}",
        lattice_conv_tail(&[g.clone(), g], k)?,
        (k + 1) as f64 * 0.5f64.powi(k as i32)
    );

    let three = [e.clone(), e.clone(), e.clone()];
    let plan = GridConvolutionPlan::new(1.0 / 256.0, 30.0);
    for b in conv_tail_n_grid(&three, &plan, &[5.0, 10.0, 20.0])? {
        println!(
            "grid bracket at x = {:>4}: [{:.8e}, {:.8e}] width {:.2e}",
            b.x,
            b.lower.value(),
            b.upper.value(),
            b.relative_width()
        );
    }

    let mc = mc_conv_tail(&[e.clone(), e], 5.0, 1_000_000, 7)?;
    println!(
        "Monte Carlo at x = 5: {:.6} in [{:.6}, {:.6}]",
        mc.point, mc.ci_low, mc.ci_high
    );

    let one = TailFunctionSpec::constant(1.0)?;
    let lp = TailFunctionSpec::log_power(1.0, 1.0)?;
    println!(
        "(1 ⊗ (1 + y))(10) = {:.10}",
        function_convolve(&one, &lp, 10.0)?
    );
    println!(
        "(1 ⊗ 1 ⊗ 1)(10) = {:.10}",
        function_convolve_n(&[one, one, one], 10.0)?
    );
    Ok(())
}
