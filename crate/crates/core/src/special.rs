//! Log-gamma and beta functions.

use crate::error::{Error, Result};

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_741_780_329_736_406;

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2
                        * (1.0 / 1260.0
                            + inv2
                                * (-1.0 / 1680.0
                                    + inv2
                                        * (1.0 / 1188.0
                                            + inv2 * (-691.0 / 360_360.0 + inv2 / 156.0))))));
    (x - 0.5) * x.ln() - x + HALF_LN_TWO_PI + series
}

/// `ln Gamma(x)` for `x > 0`.
///
/// Stirling series for `x >= 10`, upward recurrence below.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x >= 10.0 {
        return Ok(stirling(x));
    }
    let shift = (10.0 - x).ceil();
    let mut product = 1.0;
    let mut ln_product = 0.0;
    let mut y = x;
    for _ in 0..shift as usize {
        product *= y;
        if product > 1e280 {
            ln_product += product.ln();
            product = 1.0;
        }
        y += 1.0;
    }
    ln_product += product.ln();
    Ok(stirling(y) - ln_product)
}

pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    Ok(ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?)
}

/// `B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)` for `a, b > 0`.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    Ok(ln_beta(a, b)?.exp())
}
