//! Monotonicity-preserving cubic Hermite interpolation on a uniform grid.

#[derive(Debug, Clone)]
pub struct UniformCubic {
    start: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl UniformCubic {
    /// Builds the interpolant through `values[i]` at `start + i * step`.
    ///
    /// Needs at least two nodes. Slopes come from five-point differences in the
    /// interior and are limited so that monotone data stays monotone.
    pub fn new(start: f64, step: f64, values: Vec<f64>) -> Self {
        let n = values.len();
        assert!(n >= 2, "at least two nodes are required");
        let mut slopes = vec![0.0; n];
        if n == 2 {
            let d = (values[1] - values[0]) / step;
            slopes[0] = d;
            slopes[1] = d;
        } else if n < 5 {
            slopes[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * step);
            slopes[n - 1] =
                (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * step);
            for i in 1..n - 1 {
                slopes[i] = (values[i + 1] - values[i - 1]) / (2.0 * step);
            }
        } else {
            let y = &values;
            let d = 12.0 * step;
            slopes[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / d;
            slopes[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) / d;
            slopes[n - 1] = (25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] - 16.0 * y[n - 4]
                + 3.0 * y[n - 5])
                / d;
            slopes[n - 2] = (3.0 * y[n - 1] + 10.0 * y[n - 2] - 18.0 * y[n - 3] + 6.0 * y[n - 4]
                - y[n - 5])
                / d;
            for i in 2..n - 2 {
                slopes[i] = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / d;
            }
        }
        for i in 0..n - 1 {
            let delta = (values[i + 1] - values[i]) / step;
            if delta == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            if slopes[i] * delta < 0.0 {
                slopes[i] = 0.0;
            }
            if slopes[i + 1] * delta < 0.0 {
                slopes[i + 1] = 0.0;
            }
            let a = slopes[i] / delta;
            let b = slopes[i + 1] / delta;
            let r2 = a * a + b * b;
            if r2 > 9.0 {
                let tau = 3.0 / r2.sqrt();
                slopes[i] = tau * a * delta;
                slopes[i + 1] = tau * b * delta;
            }
        }
        UniformCubic {
            start,
            step,
            values,
            slopes,
        }
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    /// Evaluates at `u`, clamped to the grid range.
    pub fn eval(&self, u: f64) -> f64 {
        let n = self.values.len();
        let pos = ((u - self.start) / self.step).clamp(0.0, (n - 1) as f64);
        let i = (pos.floor() as usize).min(n - 2);
        let t = pos - i as f64;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[i]
            + h10 * self.step * self.slopes[i]
            + h01 * self.values[i + 1]
            + h11 * self.step * self.slopes[i + 1]
    }
}
