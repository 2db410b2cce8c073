//! Exact tails of sums of two or more independent variables.

use crate::dist::{Kind, SemiRvDistribution};
use crate::error::{Error, Result};
use crate::quad::{integrate, partition, NeumaierSum, QuadSettings};
use crate::scaled::Scaled;
use crate::tailfn::geometric_seeds;

const TAIL_REL_TOL: f64 = 1e-13;
const TAIL_REL_TOL_FALLBACK: f64 = 1e-11;

fn integrate_robust<F: Fn(f64) -> f64>(f: F, pts: &[f64]) -> Result<f64> {
    match integrate(&f, pts, QuadSettings::with_rel_tol(TAIL_REL_TOL)) {
        Ok(r) => Ok(r.value),
        Err(Error::Accuracy { .. }) => {
            Ok(integrate(&f, pts, QuadSettings::with_rel_tol(TAIL_REL_TOL_FALLBACK))?.value)
        }
        Err(e) => Err(e),
    }
}

/// Sum of `exp(terms)` returned as a scaled value.
fn log_sum(terms: &[f64]) -> Scaled {
    let ln_ref = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if ln_ref == f64::NEG_INFINITY {
        return Scaled::ZERO;
    }
    let mut s = NeumaierSum::new();
    for t in terms {
        s.add((t - ln_ref).exp());
    }
    Scaled::new(s.value(), ln_ref)
}

/// `P(A + B > x)` for two continuous variables, conditioning on `B`.
fn continuous_pair(a: &SemiRvDistribution, b: &SemiRvDistribution, x: f64) -> Result<Scaled> {
    let tilt = a.alpha().min(b.alpha()) * x;
    let upper = b.x0().max(x - a.x0());
    let mut terms = Vec::with_capacity(3);
    if b.head_atom() > 0.0 {
        terms.push(b.head_atom().ln() + a.ln_tail(x - b.x0()) + tilt);
    }
    terms.push(b.ln_tail(upper) + tilt);
    let mut total = log_sum(&terms);
    if upper > b.x0() {
        let log_integrand = |y: f64| a.ln_tail(x - y) + b.ln_density_unchecked(y) + tilt;
        let lo = b.x0();
        let mut ln_ref = f64::NEG_INFINITY;
        for i in 0..=32 {
            ln_ref = ln_ref.max(log_integrand(lo + (upper - lo) * i as f64 / 32.0));
        }
        if ln_ref > f64::NEG_INFINITY {
            let mut extra = b.f().breakpoints(upper);
            extra.extend(a.f().breakpoints(x).iter().map(|p| x - p));
            extra.push(0.5 * (lo + upper));
            extra.extend(geometric_seeds(lo, upper));
            extra.extend(geometric_seeds(upper, lo));
            let pts = partition(lo, upper, extra);
            let v = integrate_robust(
                |y| {
                    let e = log_integrand(y) - ln_ref;
                    if e.is_nan() {
                        0.0
                    } else {
                        e.exp()
                    }
                },
                &pts,
            )?;
            total = total.add(&Scaled::new(v, ln_ref));
        }
    }
    Ok(total.times_exp(-tilt))
}

/// `P(L + C > x)` with `L` lattice and `C` continuous: exact outer sum over `L`.
fn lattice_continuous_pair(l: &SemiRvDistribution, c: &SemiRvDistribution, x: f64) -> Scaled {
    let tilt = l.alpha().min(c.alpha()) * x;
    let k_max = x.floor() as i64;
    let mut terms: Vec<f64> = (l.first_support_point()..=k_max)
        .map(|j| l.ln_pmf_unchecked(j) + c.ln_tail(x - j as f64) + tilt)
        .collect();
    terms.push(l.ln_tail(x) + tilt);
    log_sum(&terms).times_exp(-tilt)
}

/// `P(X1 + X2 > x)` in scaled form.
pub fn conv_tail_2_scaled(
    d1: &SemiRvDistribution,
    d2: &SemiRvDistribution,
    x: f64,
) -> Result<Scaled> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("x must be finite, got {x}")));
    }
    if x < 0.0 {
        return Ok(Scaled::from_f64(1.0));
    }
    match (d1.kind(), d2.kind()) {
        (Kind::Continuous, Kind::Continuous) => {
            if d1.alpha() <= d2.alpha() {
                continuous_pair(d1, d2, x)
            } else {
                continuous_pair(d2, d1, x)
            }
        }
        (Kind::Lattice, Kind::Continuous) => Ok(lattice_continuous_pair(d1, d2, x)),
        (Kind::Continuous, Kind::Lattice) => Ok(lattice_continuous_pair(d2, d1, x)),
        (Kind::Lattice, Kind::Lattice) => {
            lattice_conv_tail_scaled(&[d1.clone(), d2.clone()], x.floor() as i64)
        }
    }
}

/// `P(X1 + X2 > x)`.
pub fn conv_tail_2(d1: &SemiRvDistribution, d2: &SemiRvDistribution, x: f64) -> Result<f64> {
    Ok(conv_tail_2_scaled(d1, d2, x)?.value().min(1.0))
}

/// `P(X1 + ... + Xn > k)` for lattice variables by exact pmf convolution.
pub fn lattice_conv_tail_scaled(ds: &[SemiRvDistribution], k: i64) -> Result<Scaled> {
    if ds.is_empty() {
        return Err(Error::Precondition(
            "at least one distribution is required".into(),
        ));
    }
    if let Some(d) = ds.iter().find(|d| !d.is_lattice()) {
        return Err(Error::Usage(format!(
            "lattice convolution needs lattice inputs, got {:?}",
            d.kind()
        )));
    }
    if k < 0 {
        return Ok(Scaled::from_f64(1.0));
    }
    let tau = ds.iter().map(|d| d.alpha()).fold(f64::INFINITY, f64::min);
    let size = k as usize + 1;
    let tilted_pmf = |d: &SemiRvDistribution| -> Vec<f64> {
        (0..size)
            .map(|j| (d.ln_pmf_unchecked(j as i64) + tau * j as f64).exp())
            .collect()
    };
    let tilted_tail =
        |d: &SemiRvDistribution, j: usize| (d.ln_tail(j as f64) + tau * j as f64).exp();
    let mut pmf = tilted_pmf(&ds[0]);
    let mut tail_k = tilted_tail(&ds[0], k as usize);
    for d in &ds[1..] {
        let next_pmf = tilted_pmf(d);
        let next_tail: Vec<f64> = (0..size).map(|j| tilted_tail(d, j)).collect();
        let mut acc = NeumaierSum::new();
        acc.add(tail_k);
        for j in 0..size {
            acc.add(pmf[j] * next_tail[size - 1 - j]);
        }
        tail_k = acc.value();
        let mut conv = vec![0.0; size];
        for (i, slot) in conv.iter_mut().enumerate() {
            let mut s = NeumaierSum::new();
            for j in 0..=i {
                s.add(pmf[j] * next_pmf[i - j]);
            }
            *slot = s.value();
        }
        pmf = conv;
    }
    Ok(Scaled::new(tail_k, -tau * k as f64))
}

/// `P(X1 + ... + Xn > k)` for lattice variables.
pub fn lattice_conv_tail(ds: &[SemiRvDistribution], k: i64) -> Result<f64> {
    Ok(lattice_conv_tail_scaled(ds, k)?.value().min(1.0))
}
