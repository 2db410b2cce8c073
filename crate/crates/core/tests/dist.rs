use std::f64::consts::LN_2;

use semirv::quad::{integrate, partition, QuadSettings};
use semirv::{ClassTag, Error, Kind, SemiRvDistribution, TailFunctionSpec};

fn log_power(gamma: f64) -> TailFunctionSpec {
    TailFunctionSpec::log_power(gamma, 1.0).unwrap()
}

fn references() -> Vec<SemiRvDistribution> {
    vec![
        SemiRvDistribution::exponential(1.0).unwrap(),
        SemiRvDistribution::continuous(1.0, log_power(1.0)).unwrap(),
        SemiRvDistribution::continuous(1.0, log_power(-1.0)).unwrap(),
        SemiRvDistribution::continuous(0.5, log_power(2.5)).unwrap(),
        SemiRvDistribution::continuous(1.0, TailFunctionSpec::exp_power(0.1, 0.5, 0.0).unwrap())
            .unwrap(),
        SemiRvDistribution::continuous(2.0, TailFunctionSpec::piecewise_oscillating(1.0).unwrap())
            .unwrap(),
    ]
}

fn lattices() -> Vec<SemiRvDistribution> {
    vec![
        SemiRvDistribution::geometric(LN_2).unwrap(),
        SemiRvDistribution::lattice(1.0, log_power(1.0)).unwrap(),
        SemiRvDistribution::lattice(0.7, log_power(-1.0)).unwrap(),
    ]
}

#[test]
fn construction_examples() {
    let e = SemiRvDistribution::exponential(1.0).unwrap();
    assert_eq!(e.x0(), 0.0);
    assert!((e.tail(3.0) - (-3.0f64).exp()).abs() < 1e-16);
    let g = SemiRvDistribution::geometric(LN_2).unwrap();
    for k in 1..30 {
        assert!((g.tail(k as f64) - 2f64.powi(-k)).abs() < 1e-16);
        assert!((g.pmf(k as i64).unwrap() - 2f64.powi(-k)).abs() < 1e-16);
    }
    assert!((g.pmf(4).unwrap() - 0.0625).abs() < 1e-16);
}

#[test]
fn linear_f_has_no_head_cutoff() {
    // e^{-x}(1 + x) is at most 1 and decreasing on [0, inf), so the cutoff is the origin.
    let d = SemiRvDistribution::continuous(1.0, log_power(1.0)).unwrap();
    assert_eq!(d.x0(), 0.0);
    assert!(d.tail(1.14619) < 1.0);
    assert!((d.density(5.0).unwrap() - 5.0 * (-5.0f64).exp()).abs() < 1e-15);
}

#[test]
fn kind_mismatch_is_a_usage_error() {
    let e = SemiRvDistribution::exponential(1.0).unwrap();
    assert!(matches!(e.pmf(3), Err(Error::Usage(_))));
    let g = SemiRvDistribution::geometric(LN_2).unwrap();
    assert!(matches!(g.density(3.0), Err(Error::Usage(_))));
}

#[test]
fn too_small_alpha_is_rejected() {
    let saw = TailFunctionSpec::piecewise_oscillating(1.0).unwrap();
    assert!(matches!(
        SemiRvDistribution::continuous(1.0, saw),
        Err(Error::InvalidConstruction { .. })
    ));
    assert!(SemiRvDistribution::continuous(0.0, log_power(0.0)).is_err());
}

#[test]
fn tails_are_monotone_and_bounded() {
    for d in references().iter().chain(lattices().iter()) {
        let top = d.x0() + 60.0 / d.alpha();
        let mut prev = 1.0;
        for i in 0..10_000 {
            let x = -1.0 + (top + 1.0) * i as f64 / 9_999.0;
            let t = d.tail(x);
            assert!((0.0..=1.0).contains(&t));
            assert!(t <= prev, "{:?} at {x}", d.f().family());
            prev = t;
        }
        assert_eq!(d.tail(d.x0() - 0.5), 1.0);
    }
}

#[test]
fn densities_integrate_to_one() {
    for d in references() {
        let lo = d.x0();
        let hi = lo + 200.0 / d.alpha();
        let mut extra = d.f().breakpoints(hi);
        extra.extend((1..64).map(|k| lo + (hi - lo) * k as f64 / 64.0));
        let pts = partition(lo, hi, extra);
        let r = integrate(
            |y| d.density(y).unwrap(),
            &pts,
            QuadSettings::with_rel_tol(1e-12),
        )
        .unwrap();
        let total = r.value + d.tail(hi) + d.head_atom();
        assert!((total - 1.0).abs() < 1e-9, "{:?}: {total}", d.f().family());
        for i in 1..200 {
            assert!(d.density(lo + i as f64 * 0.37).unwrap() >= 0.0);
        }
    }
}

#[test]
fn pmfs_sum_to_one() {
    for d in lattices() {
        let k_max = (200.0 / d.alpha()).floor() as i64;
        let s: f64 = (0..=k_max).map(|k| d.pmf(k).unwrap()).sum();
        let bound = 2.0 * (-d.alpha() * k_max as f64).exp() * d.f().eval_f(k_max as f64).unwrap();
        assert!(
            (1.0 - s).abs() < bound.max(1e-12),
            "{:?}: {s}",
            d.f().family()
        );
        assert!((0..50).all(|k| d.pmf(k).unwrap() >= 0.0));
    }
}

#[test]
fn quantile_examples() {
    let e = SemiRvDistribution::exponential(1.0).unwrap();
    assert!((e.quantile(1.0 - (-2.0f64).exp()).unwrap() - 2.0).abs() < 1e-12);
    let g = SemiRvDistribution::geometric(LN_2).unwrap();
    assert_eq!(g.quantile(0.75).unwrap(), 2.0);
    let d = SemiRvDistribution::continuous(1.0, log_power(1.0)).unwrap();
    let q = d.quantile(0.5).unwrap();
    assert!(((-q).exp() * (1.0 + q) - 0.5).abs() < 1e-14);
    assert!((q - 1.678_346_990_016_66).abs() < 1e-9);
    assert!(e.quantile(0.0).is_err() && e.quantile(1.0).is_err());
}

#[test]
fn quantile_inverts_tail() {
    for d in references() {
        for &u in &[0.01, 0.1, 0.5, 0.9, 0.999] {
            let x = d.quantile(u).unwrap();
            assert!(
                (d.tail(x) - (1.0 - u)).abs() < 1e-10,
                "{:?} at u = {u}",
                d.f().family()
            );
        }
    }
    for d in lattices() {
        for &u in &[0.01, 0.1, 0.5, 0.9, 0.999] {
            let k = d.quantile(u).unwrap();
            assert!(d.tail(k) <= 1.0 - u && d.tail(k - 1.0) > 1.0 - u);
        }
    }
}

#[test]
fn class_tags() {
    assert!(matches!(
        SemiRvDistribution::continuous(1.0, log_power(0.5)).unwrap().class_tag(),
        ClassTag::L11 { gamma, .. } if gamma == 0.5
    ));
    assert!(matches!(
        SemiRvDistribution::continuous(1.0, log_power(-1.0)).unwrap().class_tag(),
        ClassTag::L11 { gamma, .. } if gamma == -1.0
    ));
    let ep = TailFunctionSpec::exp_power(1.0, 0.5, -1.0).unwrap();
    assert!(matches!(
        SemiRvDistribution::continuous(1.0, ep).unwrap().class_tag(),
        ClassTag::L1Not11 { .. }
    ));
    assert!(matches!(
        SemiRvDistribution::continuous(1.0, log_power(-2.0))
            .unwrap()
            .class_tag(),
        ClassTag::L2 { .. }
    ));
}

fn ks_distance(d: &SemiRvDistribution, mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut worst: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let cdf = 1.0 - d.tail(x);
        worst = worst
            .max((cdf - i as f64 / n).abs())
            .max(((i + 1) as f64 / n - cdf).abs());
    }
    worst
}

#[test]
fn samples_pass_kolmogorov_smirnov() {
    let ds = references();
    for d in &ds[..3] {
        let batch = d.sample(7, 3, 100_000).unwrap();
        let ks = ks_distance(d, batch.values);
        assert!(ks < 0.006, "{:?}: {ks}", d.f().family());
    }
}

#[test]
fn sampling_examples() {
    let e = SemiRvDistribution::exponential(1.0).unwrap();
    let b = e.sample(42, 0, 1_000_000).unwrap();
    let mean = b.values.iter().sum::<f64>() / b.values.len() as f64;
    assert!((mean - 1.0).abs() < 4e-3, "{mean}");
    let g = SemiRvDistribution::geometric(LN_2).unwrap();
    let b = g.sample(42, 0, 1_000_000).unwrap();
    let ones = b.values.iter().filter(|&&v| v == 1.0).count() as f64 / 1e6;
    assert!((ones - 0.5).abs() < 0.002, "{ones}");
}

#[test]
fn sampling_is_deterministic() {
    for d in references() {
        let a = d.sample(11, 5, 1000).unwrap();
        let b = d.sample(11, 5, 1000).unwrap();
        let c = d.sample(11, 6, 1000).unwrap();
        assert_eq!(a.values, b.values);
        assert_ne!(a.values, c.values);
    }
    let mut out = Vec::new();
    SemiRvDistribution::exponential(1.0)
        .unwrap()
        .sample(3, 4, 2)
        .unwrap()
        .write_csv(&mut out)
        .unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# seed=3, stream=4");
    assert_eq!(lines[1], "value");
    assert_eq!(lines.len(), 4);
}

#[test]
fn exp_moment_examples() {
    let e = SemiRvDistribution::exponential(1.0).unwrap();
    assert!((e.exp_moment_partial(10.0).unwrap() - 10.0).abs() < 1e-9);
    let g = SemiRvDistribution::geometric(LN_2).unwrap();
    assert!((g.exp_moment_partial(20.0).unwrap() - 20.0).abs() < 1e-12);
}

#[test]
fn exp_moment_grows_like_the_integral() {
    for &g in &[-1.0, -0.5, 0.0, 1.0, 2.0] {
        let d = SemiRvDistribution::continuous(1.0, log_power(g)).unwrap();
        for &s in &[50.0, 100.0, 200.0, 500.0] {
            let r = d.exp_moment_partial(s).unwrap() / d.f().f_integral(s).unwrap();
            assert!((0.125..=4.0).contains(&r), "gamma = {g}, s = {s}: {r}");
        }
    }
}

#[test]
fn json_round_trip() {
    let text = r#"{"alpha": 1.0, "f": {"family": "log_power", "params": {"gamma": 1.0}}, "kind": "lattice"}"#;
    let d: SemiRvDistribution = serde_json::from_str(text).unwrap();
    assert_eq!(d.kind(), Kind::Lattice);
    assert!(d.f().lattice());
    let back: SemiRvDistribution =
        serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
    assert_eq!(back.tail(7.0), d.tail(7.0));
}
