//! Distributions with tail `min(1, e^{-alpha x} f(x))`, continuous or lattice.

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, partition, NeumaierSum, QuadSettings};
use crate::rng::UniformStream;
use crate::solve::{bisect, newton_bracketed};
use crate::tailfn::{Family, RvIndex, TailFunctionSpec};

const CACHE_SIZE: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Continuous,
    Lattice,
}

/// Membership in the exponential-tail subclasses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassTag {
    /// Divergent `int f` with `f` regularly varying of index `gamma >= -1`.
    L11 { alpha: f64, gamma: f64 },
    /// Divergent `int f`, `f` not regularly varying.
    L1Not11 { alpha: f64 },
    /// Convergent `int f`.
    L2 { alpha: f64 },
}

impl ClassTag {
    pub fn name(&self) -> &'static str {
        match self {
            ClassTag::L11 { .. } => "L11",
            ClassTag::L1Not11 { .. } => "L1_not_11",
            ClassTag::L2 { .. } => "L2",
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match self {
            ClassTag::L11 { gamma, .. } => Some(*gamma),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct SemiRvDistribution {
    alpha: f64,
    f: TailFunctionSpec,
    kind: Kind,
    x0: f64,
    atom: f64,
    class_tag: ClassTag,
    quantile_cache: Arc<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistribution {
    alpha: f64,
    f: TailFunctionSpec,
    kind: Kind,
}

impl TryFrom<RawDistribution> for SemiRvDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        SemiRvDistribution::new(raw.alpha, raw.f, raw.kind)
    }
}

impl From<SemiRvDistribution> for RawDistribution {
    fn from(d: SemiRvDistribution) -> Self {
        RawDistribution {
            alpha: d.alpha,
            f: d.f,
            kind: d.kind,
        }
    }
}

/// A batch of draws with its generator coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub seed: u64,
    pub stream_id: u64,
}

impl SampleBatch {
    /// Single-column CSV preceded by a `# seed=..., stream=...` comment line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# seed={}, stream={}", self.seed, self.stream_id)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["value"])?;
        for v in &self.values {
            w.write_record([format!("{v:.16e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Left end of the range on which `-alpha x + ln f(x)` is nonincreasing, when known in closed form.
fn analytic_monotone_start(alpha: f64, f: &TailFunctionSpec) -> Option<f64> {
    match *f.family() {
        Family::Constant { .. } => Some(0.0),
        Family::LogPower { gamma, .. } => Some((gamma / alpha - 1.0).max(0.0)),
        Family::LogLogPower { gamma, .. } => {
            let target = gamma / alpha;
            let e = std::f64::consts::E;
            if target <= e {
                Some(0.0)
            } else {
                let g = |x: f64| (e + x) * (e + x).ln() - target;
                let mut hi = target;
                while g(hi) < 0.0 {
                    hi *= 2.0;
                }
                Some(bisect(g, 0.0, hi, 1e-14 * hi))
            }
        }
        Family::ExpPower { c, beta, .. } => Some((c * beta / alpha).powf(1.0 / (1.0 - beta))),
        _ => None,
    }
}

/// Smallest `x` beyond which `alpha f - f' > 0`, for the sawtooth family.
fn sawtooth_monotone_start(alpha: f64) -> f64 {
    // Per period p = 4^k: (value at left end / p, slope, right end / p).
    const SEGMENTS: [(f64, f64, f64); 4] = [
        (2.0, 2.0, 2.0),
        (4.0, -3.0, 2.5),
        (2.5, 1.0, 3.0),
        (3.0, 5.0, 4.0),
    ];
    let mut last_bad = 0.0;
    let mut p = 1.0f64;
    loop {
        let mut any_bad = false;
        for &(value, slope, end) in &SEGMENTS {
            if slope > 0.0 && alpha * value * p <= slope {
                any_bad = true;
                last_bad = end * p;
            }
        }
        if !any_bad {
            return last_bad;
        }
        p *= 4.0;
    }
}

/// Grid-plus-envelope search for the Karamata-built family.
fn karamata_monotone_start(alpha: f64, f: &TailFunctionSpec) -> f64 {
    let p = match f.family() {
        Family::KaramataBuilt(p) => *p,
        _ => unreachable!(),
    };
    let min_c = p.c0.min(p.c0 + p.c1);
    let envelope = |x: f64| {
        p.c1.abs() * p.c_rate * (-p.c_rate * x).exp() / min_c
            + p.eps_scale.max(0.0) * (p.eps_shift + x).powf(-p.eps_power)
    };
    let mut x_env = 1.0;
    while envelope(x_env) >= alpha {
        x_env *= 2.0;
    }
    let x_end = x_env.max(100.0);
    let n = 20_000;
    let mut last_bad: Option<f64> = None;
    for i in 0..=n {
        let x = x_end * i as f64 / n as f64;
        if alpha - f.ln_f_derivative(x) <= 0.0 {
            last_bad = Some(x_end * (i + 1) as f64 / n as f64);
        }
    }
    last_bad.unwrap_or(0.0)
}

impl SemiRvDistribution {
    /// Builds the distribution with the maximal tail `min(1, e^{-alpha x} f(x))`.
    pub fn new(alpha: f64, f: TailFunctionSpec, kind: Kind) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        let f = f.with_lattice(kind == Kind::Lattice);
        let h = |x: f64| -alpha * x + f.ln_f(x);
        let (x_m, strict) = match analytic_monotone_start(alpha, &f) {
            Some(x) => (x, false),
            None => match f.family() {
                Family::PiecewiseOscillating { .. } => (sawtooth_monotone_start(alpha), true),
                _ => (karamata_monotone_start(alpha, &f), true),
            },
        };
        let h_m = h(x_m);
        let (x0, atom) = if h_m >= 0.0 {
            let mut hi = (2.0 * x_m).max(1.0);
            while h(hi) > 0.0 {
                hi *= 2.0;
            }
            let root = bisect(h, x_m, hi, 0.0);
            (root, 0.0)
        } else {
            if strict && x_m > 0.0 {
                return Err(Error::InvalidConstruction {
                    x: x_m,
                    reason: format!(
                        "e^(-alpha x) f(x) increases just below x = {x_m} although it is already below 1; \
                         alpha = {alpha} is too small for this f"
                    ),
                });
            }
            (x_m, -h_m.exp_m1())
        };
        let class_tag = if !f.divergent_integral() {
            ClassTag::L2 { alpha }
        } else {
            match f.gamma_index() {
                RvIndex::Index(gamma) if gamma >= -1.0 => ClassTag::L11 { alpha, gamma },
                RvIndex::Index(_) => ClassTag::L2 { alpha },
                RvIndex::NotRegularlyVarying => ClassTag::L1Not11 { alpha },
            }
        };
        let mut d = SemiRvDistribution {
            alpha,
            f,
            kind,
            x0,
            atom,
            class_tag,
            quantile_cache: Arc::new(Vec::new()),
        };
        let cache: Vec<f64> = (0..CACHE_SIZE)
            .map(|i| {
                let v = 1.0 - i as f64 / CACHE_SIZE as f64;
                d.continuous_inverse(v, None)
            })
            .collect();
        d.quantile_cache = Arc::new(cache);
        Ok(d)
    }

    pub fn continuous(alpha: f64, f: TailFunctionSpec) -> Result<Self> {
        Self::new(alpha, f, Kind::Continuous)
    }

    pub fn lattice(alpha: f64, f: TailFunctionSpec) -> Result<Self> {
        Self::new(alpha, f, Kind::Lattice)
    }

    /// `Exp(rate)`.
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::continuous(rate, TailFunctionSpec::constant(1.0)?)
    }

    /// Geometric law on `{1, 2, ...}` with `P(X > k) = e^{-alpha k}`.
    pub fn geometric(alpha: f64) -> Result<Self> {
        Self::lattice(alpha, TailFunctionSpec::constant(1.0)?)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn f(&self) -> &TailFunctionSpec {
        &self.f
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_lattice(&self) -> bool {
        self.kind == Kind::Lattice
    }

    /// Head cutoff.
    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Mass at the head cutoff `x0` for continuous kind (zero unless `e^{-alpha x0} f(x0) < 1`).
    pub fn head_atom(&self) -> f64 {
        if self.kind == Kind::Continuous {
            self.atom
        } else {
            0.0
        }
    }

    /// First integer of the lattice support.
    pub fn first_support_point(&self) -> i64 {
        self.x0.ceil() as i64
    }

    pub fn class_tag(&self) -> ClassTag {
        self.class_tag
    }

    /// `-alpha x + ln f(x)`, the log of the unclipped tail formula.
    pub fn log_kernel(&self, x: f64) -> f64 {
        -self.alpha * x + self.f.ln_f(x)
    }

    /// `ln P(X > x)`.
    pub fn ln_tail(&self, x: f64) -> f64 {
        match self.kind {
            Kind::Continuous => {
                if x < self.x0 {
                    0.0
                } else if x == self.x0 {
                    (-self.atom).ln_1p()
                } else {
                    self.log_kernel(x).min(0.0)
                }
            }
            Kind::Lattice => {
                let k = x.floor();
                if k < self.x0 {
                    0.0
                } else {
                    self.log_kernel(k).min(0.0)
                }
            }
        }
    }

    pub fn tail(&self, x: f64) -> f64 {
        self.ln_tail(x).exp()
    }

    fn require(&self, kind: Kind, op: &str) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "{op} requires a {kind:?} distribution"
            )))
        }
    }

    /// `ln v(x)` of the absolutely continuous part; `-inf` below `x0`.
    pub fn ln_density_unchecked(&self, x: f64) -> f64 {
        if x < self.x0 {
            return f64::NEG_INFINITY;
        }
        let g = self.alpha - self.f.ln_f_derivative(x);
        if g <= 0.0 {
            return f64::NEG_INFINITY;
        }
        self.log_kernel(x) + g.ln()
    }

    pub fn ln_density(&self, x: f64) -> Result<f64> {
        self.require(Kind::Continuous, "density")?;
        Ok(self.ln_density_unchecked(x))
    }

    /// `v(x) = e^{-alpha x} (alpha f(x) - f'(x))` for `x >= x0`, zero below.
    pub fn density(&self, x: f64) -> Result<f64> {
        Ok(self.ln_density(x)?.exp())
    }

    /// `ln P(X = k)`.
    pub fn ln_pmf_unchecked(&self, k: i64) -> f64 {
        let k0 = self.first_support_point();
        if k < k0 {
            return f64::NEG_INFINITY;
        }
        let hk = self.log_kernel(k as f64).min(0.0);
        if k == k0 {
            return (-hk.exp_m1()).ln();
        }
        let hprev = self.log_kernel((k - 1) as f64).min(0.0);
        let d = hk - hprev;
        if d >= 0.0 {
            return f64::NEG_INFINITY;
        }
        hprev + (-d.exp_m1()).ln()
    }

    pub fn ln_pmf(&self, k: i64) -> Result<f64> {
        self.require(Kind::Lattice, "pmf")?;
        Ok(self.ln_pmf_unchecked(k))
    }

    /// `P(X = k) = tail(k - 1) - tail(k)`.
    pub fn pmf(&self, k: i64) -> Result<f64> {
        Ok(self.ln_pmf(k)?.exp())
    }

    /// Smallest `x` in the continuous extension with `tail(x) <= v`.
    fn continuous_inverse(&self, v: f64, cache: Option<&[f64]>) -> f64 {
        let ln_v = v.ln();
        let h = |x: f64| self.log_kernel(x);
        if x_le(ln_v, h(self.x0).min(0.0), self.atom) {
            return self.x0;
        }
        let (mut lo, mut hi) = (self.x0, f64::NAN);
        if let Some(c) = cache.filter(|c| !c.is_empty()) {
            let u = 1.0 - v;
            let i = ((u * CACHE_SIZE as f64).floor() as usize).min(CACHE_SIZE - 1);
            if h(c[i]) >= ln_v {
                lo = c[i];
            }
            if i + 1 < CACHE_SIZE && h(c[i + 1]) <= ln_v {
                hi = c[i + 1];
            }
        }
        if hi.is_nan() {
            let mut step = lo.abs().max(1.0);
            hi = lo + step;
            while h(hi) > ln_v {
                lo = hi;
                step *= 2.0;
                hi = lo + step;
            }
        }
        let alpha = self.alpha;
        newton_bracketed(
            |x| (h(x) - ln_v, -alpha + self.f.ln_f_derivative(x)),
            lo,
            hi,
            1e-12,
        )
    }

    /// `inf { x : tail(x) <= v }` for `v` in `(0, 1)`.
    pub fn tail_inverse(&self, v: f64) -> f64 {
        let xc = self.continuous_inverse(v, Some(&self.quantile_cache));
        match self.kind {
            Kind::Continuous => xc,
            Kind::Lattice => {
                let k0 = self.first_support_point();
                let mut k = (xc.ceil() as i64).max(k0);
                while k > k0 && self.tail((k - 1) as f64) <= v {
                    k -= 1;
                }
                while self.tail(k as f64) > v {
                    k += 1;
                }
                k as f64
            }
        }
    }

    /// `x` with `tail(x) = 1 - u`; the integer quantile for lattice kind.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!(
                "quantile level must lie in (0, 1), got {u}"
            )));
        }
        Ok(self.tail_inverse(1.0 - u))
    }

    /// Inverse-transform draws from stream `(seed, stream_id)`.
    pub fn sample(&self, seed: u64, stream_id: u64, count: usize) -> Result<SampleBatch> {
        if count == 0 {
            return Err(Error::Precondition(
                "sample count must be at least 1".into(),
            ));
        }
        let mut rng = UniformStream::new(seed, stream_id);
        let values = (0..count)
            .map(|_| self.tail_inverse(rng.next_open01()))
            .collect();
        Ok(SampleBatch {
            values,
            seed,
            stream_id,
        })
    }

    /// `int_{x0}^s e^{alpha y} dV(y)`, counting the head atom.
    pub fn exp_moment_partial(&self, s: f64) -> Result<f64> {
        if !(s > self.x0) {
            return Err(Error::Domain(format!(
                "s = {s} must exceed x0 = {}",
                self.x0
            )));
        }
        match self.kind {
            Kind::Continuous => {
                let ln_ref = self.f.ln_f(s).max(self.f.ln_f(self.x0));
                let mut extra = self.f.breakpoints(s);
                extra.push(0.5 * (self.x0 + s));
                let pts = partition(self.x0, s, extra);
                let r = integrate(
                    |y| {
                        let g = self.alpha - self.f.ln_f_derivative(y);
                        (self.f.ln_f(y) - ln_ref).exp() * g.max(0.0)
                    },
                    &pts,
                    QuadSettings::with_rel_tol(1e-10),
                )?;
                let atom_part = if self.atom > 0.0 {
                    (self.alpha * self.x0 + self.atom.ln() - ln_ref).exp()
                } else {
                    0.0
                };
                Ok((r.value + atom_part) * ln_ref.exp())
            }
            Kind::Lattice => {
                let mut sum = NeumaierSum::new();
                for k in self.first_support_point()..=(s.floor() as i64) {
                    sum.add((self.alpha * k as f64 + self.ln_pmf_unchecked(k)).exp());
                }
                Ok(sum.value())
            }
        }
    }
}

/// Whether level `ln_v` is reached at the cutoff, i.e. `v >= tail(x0)`.
fn x_le(ln_v: f64, h0: f64, atom: f64) -> bool {
    if atom > 0.0 {
        ln_v >= h0
    } else {
        ln_v >= 0.0
    }
}
