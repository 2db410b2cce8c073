//! Scalar root finding on a bracket.

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Newton iteration kept inside a sign-change bracket, falling back to bisection.
///
/// `fdf` returns the function value and its derivative.
pub fn newton_bracketed<F: FnMut(f64) -> (f64, f64)>(
    mut fdf: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
) -> f64 {
    let (flo, _) = fdf(lo);
    if flo == 0.0 {
        return lo;
    }
    let (fhi, _) = fdf(hi);
    if fhi == 0.0 {
        return hi;
    }
    let lo_positive = flo > 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = fdf(x);
        if fx == 0.0 {
            return x;
        }
        if (fx > 0.0) == lo_positive {
            lo = x;
        } else {
            hi = x;
        }
        let tol = xtol.max(4.0 * f64::EPSILON * x.abs());
        if hi - lo <= tol {
            return 0.5 * (lo + hi);
        }
        let step = fx / dfx;
        let candidate = x - step;
        if step.is_finite() && candidate > lo && candidate < hi {
            if step.abs() <= tol {
                return candidate;
            }
            x = candidate;
        } else {
            x = 0.5 * (lo + hi);
        }
    }
    x
}
