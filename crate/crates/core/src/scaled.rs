//! Values carried as `mantissa * exp(ln_scale)`.
//!
//! Convolution tails of `L(alpha)` distributions decay like `exp(-alpha x)`
//! and leave the `f64` range long before the asymptotics become interesting.
//! Every oracle and predictor therefore factors out an explicit exponential
//! scale and returns a [`Scaled`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    mantissa: f64,
    ln_scale: f64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        mantissa: 0.0,
        ln_scale: 0.0,
    };

    pub fn new(mantissa: f64, ln_scale: f64) -> Self {
        Scaled { mantissa, ln_scale }
    }

    pub fn from_f64(value: f64) -> Self {
        Scaled::new(value, 0.0)
    }

    pub fn from_ln(ln_value: f64) -> Self {
        if ln_value == f64::NEG_INFINITY {
            Scaled::ZERO
        } else {
            Scaled::new(1.0, ln_value)
        }
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn ln_scale(&self) -> f64 {
        self.ln_scale
    }

    /// Natural log of the represented value; `-inf` for zero.
    pub fn ln(&self) -> f64 {
        self.mantissa.ln() + self.ln_scale
    }

    /// The represented value as a plain `f64` (may underflow to zero).
    pub fn value(&self) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        if self.ln_scale == 0.0 {
            return self.mantissa;
        }
        let direct = self.mantissa * self.ln_scale.exp();
        if direct.is_finite() && direct != 0.0 && direct.abs() >= f64::MIN_POSITIVE {
            direct
        } else {
            (self.mantissa.abs().ln() + self.ln_scale).exp() * self.mantissa.signum()
        }
    }

    /// Value relative to `exp(ln_ref)`, i.e. `self / exp(ln_ref)`.
    pub fn relative_to(&self, ln_ref: f64) -> f64 {
        self.mantissa * (self.ln_scale - ln_ref).exp()
    }

    pub fn times_exp(self, ln_factor: f64) -> Self {
        Scaled::new(self.mantissa, self.ln_scale + ln_factor)
    }

    pub fn times(self, factor: f64) -> Self {
        Scaled::new(self.mantissa * factor, self.ln_scale)
    }

    /// `self / other` as a plain number.
    pub fn ratio(&self, other: &Scaled) -> f64 {
        (self.mantissa / other.mantissa) * (self.ln_scale - other.ln_scale).exp()
    }

    pub fn add(&self, other: &Scaled) -> Scaled {
        if self.mantissa == 0.0 {
            return *other;
        }
        if other.mantissa == 0.0 {
            return *self;
        }
        let ln_scale = self.ln_scale.max(other.ln_scale);
        Scaled::new(
            self.relative_to(ln_scale) + other.relative_to(ln_scale),
            ln_scale,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.mantissa.is_finite() && self.ln_scale.is_finite()
    }

    /// Moves the magnitude of the mantissa into the scale.
    pub fn normalized(&self) -> Scaled {
        if self.mantissa == 0.0 || !self.mantissa.is_finite() {
            return *self;
        }
        let shift = self.mantissa.abs().ln();
        Scaled::new(self.mantissa.signum(), self.ln_scale + shift)
    }

    pub fn partial_cmp_value(&self, other: &Scaled) -> Option<Ordering> {
        match (self.mantissa == 0.0, other.mantissa == 0.0) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => 0.0.partial_cmp(&other.mantissa),
            (false, true) => self.mantissa.partial_cmp(&0.0),
            _ => self.ln().partial_cmp(&other.ln()),
        }
    }
}

impl Mul for Scaled {
    type Output = Scaled;

    fn mul(self, rhs: Scaled) -> Scaled {
        Scaled::new(self.mantissa * rhs.mantissa, self.ln_scale + rhs.ln_scale)
    }
}

impl fmt::Display for Scaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.value();
        if v != 0.0 || self.mantissa == 0.0 {
            write!(f, "{v:e}")
        } else {
            write!(f, "exp({:.6})", self.ln())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_survives_underflow() {
        let a = Scaled::new(3.0, -5000.0);
        let b = Scaled::new(1.5, -5000.0 - 2.0_f64.ln());
        assert_eq!(a.value(), 0.0);
        assert!((a.ratio(&b) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn add_aligns_scales() {
        let a = Scaled::new(1.0, -800.0);
        let b = Scaled::new(2.0, -801.0);
        let s = a.add(&b);
        let expected = 1.0 + 2.0 * (-1.0f64).exp();
        assert!((s.relative_to(-800.0) - expected).abs() < 1e-14);
    }

    #[test]
    fn ln_of_zero() {
        assert_eq!(Scaled::ZERO.ln(), f64::NEG_INFINITY);
        assert_eq!(Scaled::from_ln(f64::NEG_INFINITY).value(), 0.0);
    }
}
