use semirv::risk::{
    check_dominance_conditions, classify_thm32, predict_theorem_a, predict_theorem_a_ln,
    predict_thm31, predict_thm31_ln, predict_thm32, predict_thm32_ln, ruin_mc_grid, ruin_study,
    simulate_paths, sn_tail_oracle_grid, write_ruin_csv, NegativePart, RiskGridPlan,
    RiskModelConfig, Thm32Case,
};
use semirv::{Error, TailFunctionSpec};

fn c() -> TailFunctionSpec {
    TailFunctionSpec::constant(1.0).unwrap()
}

fn lp(g: f64) -> TailFunctionSpec {
    TailFunctionSpec::log_power(g, 1.0).unwrap()
}

fn cfg(ins: Vec<TailFunctionSpec>, fin: Vec<TailFunctionSpec>) -> RiskModelConfig {
    RiskModelConfig::new(ins.len(), 1.0, ins, fin, NegativePart::None).unwrap()
}

#[test]
fn config_validation() {
    assert!(RiskModelConfig::new(0, 1.0, vec![], vec![], NegativePart::None).is_err());
    assert!(RiskModelConfig::new(2, 1.0, vec![c()], vec![c(), c()], NegativePart::None).is_err());
    assert!(RiskModelConfig::new(1, 1.0, vec![lp(-2.0)], vec![c()], NegativePart::None).is_err());
    assert!(RiskModelConfig::new(
        1,
        1.0,
        vec![c().with_lattice(true)],
        vec![c()],
        NegativePart::None
    )
    .is_err());
    let bad_mass = NegativePart::ShiftedExp {
        rate: 1.0,
        mass: 1.0,
    };
    assert!(RiskModelConfig::new(1, 1.0, vec![c()], vec![c()], bad_mass).is_err());
    let text = r#"{"n": 2, "alpha": 1.0,
        "insurance": [{"family": "constant", "params": {}}, {"family": "log_power", "params": {"gamma": 1.0}}],
        "financial": [{"family": "constant", "params": {}}, {"family": "constant", "params": {"c": 1.0}}],
        "negative_part": {"shifted_exp": {"rate": 2.0, "mass": 0.25}}}"#;
    let config = RiskModelConfig::from_json_str(text).unwrap();
    assert_eq!(config.n(), 2);
    assert_eq!(config.negative_part().positive_mass(), 0.75);
    let typo = text.replace("\"alpha\"", "\"alhpa\"");
    assert!(RiskModelConfig::from_json_str(&typo).is_err());
}

#[test]
fn running_maximum_dominates_partial_sum() {
    let configs = [
        RiskModelConfig::all_constant(3, 1.0).unwrap(),
        cfg(vec![lp(1.0), c()], vec![lp(-1.0), c()]),
        RiskModelConfig::all_constant(4, 1.0)
            .unwrap()
            .with_negative_part(NegativePart::ShiftedExp {
                rate: 0.5,
                mass: 0.5,
            })
            .unwrap(),
    ];
    for config in &configs {
        for p in simulate_paths(config, 50_000, 9).unwrap() {
            assert!(p.m_n >= p.s_n.max(0.0));
        }
    }
}

#[test]
fn ruin_estimates_are_monotone_on_common_seeds() {
    let config = RiskModelConfig::all_constant(3, 1.0)
        .unwrap()
        .with_negative_part(NegativePart::ShiftedExp {
            rate: 1.0,
            mass: 0.3,
        })
        .unwrap();
    let xs: Vec<f64> = (1..=8).map(|k| (k as f64).exp()).collect();
    let by_horizon: Vec<Vec<f64>> = (1..=3)
        .map(|h| {
            ruin_mc_grid(&config, &xs, h, 200_000, 4)
                .unwrap()
                .iter()
                .map(|r| r.psi.point)
                .collect()
        })
        .collect();
    for row in &by_horizon {
        assert!(row.windows(2).all(|w| w[1] <= w[0]));
    }
    for j in 0..xs.len() {
        assert!(by_horizon[0][j] <= by_horizon[1][j] && by_horizon[1][j] <= by_horizon[2][j]);
    }
    for r in ruin_mc_grid(&config, &xs, 3, 200_000, 5).unwrap() {
        assert!(r.psi.point >= r.sn.point - 2.0 * (r.psi.half_width() + r.sn.half_width()));
    }
}

#[test]
fn consecutive_partial_sums_separate() {
    let config = RiskModelConfig::all_constant(3, 1.0).unwrap();
    let xs: Vec<f64> = (2..=6).map(|t| (t as f64).exp()).collect();
    let tail = |h: usize| -> Vec<f64> {
        ruin_mc_grid(&config, &xs, h, 1_000_000, 77)
            .unwrap()
            .iter()
            .map(|r| r.sn.point)
            .collect()
    };
    let (s1, s2, s3) = (tail(1), tail(2), tail(3));
    for (a, b) in [(&s1, &s2), (&s2, &s3)] {
        let r: Vec<f64> = a.iter().zip(b.iter()).map(|(p, q)| p / q).collect();
        assert!(r.windows(2).all(|w| w[1] < w[0]), "{r:?}");
    }
}

#[test]
fn single_period_closed_form() {
    // ln S_1 = ln X + ln Y is Erlang(2, 1), so P(S_1 > x) = (1 + ln x) / x.
    let config = RiskModelConfig::all_constant(1, 1.0).unwrap();
    let xs = [2.0f64, 10.0, 100.0, 1e3];
    let b = sn_tail_oracle_grid(&config, &xs, &RiskGridPlan::new(1.0 / 512.0)).unwrap();
    for (br, &x) in b.iter().zip(&xs) {
        let exact = (1.0 + x.ln()) / x;
        assert!(
            br.lower.value() <= exact * (1.0 + 1e-12) && exact <= br.upper.value() * (1.0 + 1e-12)
        );
        assert!(br.relative_width() < 0.01);
    }
}

#[test]
fn grid_and_monte_carlo_agree() {
    let configs = [
        RiskModelConfig::all_constant(1, 1.0).unwrap(),
        cfg(vec![lp(1.0), c()], vec![c(), lp(0.5)]),
        RiskModelConfig::all_constant(3, 1.0).unwrap(),
    ];
    let xs: Vec<f64> = [1.0, 2.5, 4.0].iter().map(|t: &f64| t.exp()).collect();
    for (i, config) in configs.iter().enumerate() {
        let brackets = sn_tail_oracle_grid(config, &xs, &RiskGridPlan::new(1.0 / 256.0)).unwrap();
        let mc = ruin_mc_grid(config, &xs, config.n(), 1_000_000, 31 + i as u64).unwrap();
        for (br, r) in brackets.iter().zip(&mc) {
            let slack = 2.0 * r.sn.half_width();
            assert!(
                r.sn.point + slack >= br.lower.value() && r.sn.point - slack <= br.upper.value(),
                "config {i} at x = {}: {:?} vs [{}, {}]",
                r.x,
                r.sn,
                br.lower.value(),
                br.upper.value()
            );
        }
    }
}

#[test]
fn grid_oracle_rejects_unsupported_inputs() {
    let neg = RiskModelConfig::all_constant(2, 1.0)
        .unwrap()
        .with_negative_part(NegativePart::ShiftedExp {
            rate: 1.0,
            mass: 0.2,
        })
        .unwrap();
    assert!(matches!(
        sn_tail_oracle_grid(&neg, &[10.0], &RiskGridPlan::default()),
        Err(Error::UnsupportedCase(_))
    ));
    let long = RiskModelConfig::all_constant(7, 1.0).unwrap();
    assert!(matches!(
        sn_tail_oracle_grid(&long, &[10.0], &RiskGridPlan::default()),
        Err(Error::Precondition(_))
    ));
    let config = RiskModelConfig::all_constant(2, 1.0).unwrap();
    assert!(sn_tail_oracle_grid(&config, &[1e30], &RiskGridPlan::new(1e-3)).is_err());
    let strict = RiskGridPlan::new(0.25).with_max_relative_width(1e-6);
    assert!(matches!(
        sn_tail_oracle_grid(&config, &[100.0], &strict),
        Err(Error::Accuracy { .. })
    ));
}

#[test]
fn general_and_closed_forms_coincide_for_constants() {
    for n in 1..=4 {
        let config = RiskModelConfig::all_constant(n, 1.0).unwrap();
        for &x in &[1e2, 1e4, 1e8] {
            let a = predict_thm31(&config, x).unwrap();
            let b = predict_thm32(&config, x, Thm32Case::I).unwrap();
            assert!((a.value.ratio(&b) - 1.0).abs() < 1e-12, "n = {n}, x = {x}");
            assert!(!a.flagged);
        }
    }
}

#[test]
fn general_and_closed_forms_agree_for_log_powers() {
    let config = cfg(vec![lp(1.0), lp(0.5)], vec![lp(0.0), lp(2.0)]);
    assert_eq!(classify_thm32(&config).unwrap(), Thm32Case::I);
    let a = predict_thm31_ln(&config, 1e3).unwrap().value;
    let b = predict_thm32_ln(&config, 1e3, Thm32Case::I).unwrap();
    assert!((a.ratio(&b) - 1.0).abs() < 0.02, "{}", a.ratio(&b));
}

#[test]
fn index_minus_one_cases_converge_logarithmically() {
    let configs = [
        (
            cfg(vec![lp(-1.0), lp(-1.0)], vec![lp(-1.0), lp(-1.0)]),
            Thm32Case::Ii,
        ),
        (
            cfg(vec![lp(-1.0), lp(-1.0)], vec![lp(1.0), lp(0.5)]),
            Thm32Case::Iii,
        ),
        (
            cfg(vec![lp(1.0), lp(0.0)], vec![lp(-1.0), lp(-1.0)]),
            Thm32Case::Iv,
        ),
    ];
    for (config, case) in &configs {
        assert_eq!(classify_thm32(config).unwrap(), *case);
        let dev: Vec<f64> = [1e2, 1e3, 1e4, 1e5, 1e6]
            .iter()
            .map(|&t| {
                let a = predict_thm31_ln(config, t).unwrap().value;
                (a.ratio(&predict_thm32_ln(config, t, *case).unwrap()) - 1.0).abs()
            })
            .collect();
        assert!(
            dev.windows(2).all(|w| w[1] < w[0]),
            "case {}: {dev:?}",
            case.name()
        );
        assert!(dev[4] < 0.15, "case {}: {dev:?}", case.name());
    }
}

#[test]
fn case_selection_errors() {
    let config = cfg(vec![lp(1.0), lp(0.5)], vec![lp(0.0), lp(2.0)]);
    assert!(matches!(
        predict_thm32(&config, 100.0, Thm32Case::Ii),
        Err(Error::WrongCase(_))
    ));
    let split = cfg(vec![lp(1.0), lp(-1.0)], vec![lp(0.0), lp(2.0)]);
    assert!(matches!(
        classify_thm32(&split),
        Err(Error::UnsupportedCase(_))
    ));
    assert!(matches!(
        predict_thm32(&split, 100.0, Thm32Case::I),
        Err(Error::WrongCase(_))
    ));
    assert!(predict_thm31(&config, 0.5).is_err());
    let ep = TailFunctionSpec::exp_power(0.1, 0.5, 0.0).unwrap();
    let general = cfg(vec![ep, c()], vec![c(), c()]);
    assert!(matches!(classify_thm32(&general), Err(Error::WrongCase(_))));
    assert!(predict_thm31(&general, 1e6).unwrap().value.is_finite());
}

#[test]
fn theorem_a_telescopes_to_the_closed_form() {
    for (ins, fin) in [
        (0.5, vec![0.2, 1.5, 2.0]),
        (2.0, vec![1.0, 1.0]),
        (0.1, vec![0.3, 0.7, 1.9, 2.9]),
    ] {
        let n = fin.len();
        let config = cfg(
            vec![lp(ins - 1.0); n],
            fin.iter().map(|&g| lp(g - 1.0)).collect(),
        );
        for &x in &[1e3, 1e10, 1e40] {
            let a = predict_theorem_a(&config, x).unwrap();
            let b = predict_thm32(&config, x, Thm32Case::I).unwrap();
            assert!((a.ratio(&b) - 1.0).abs() < 1e-10);
        }
        for &t in &[1e3, 1e6] {
            let a = predict_theorem_a_ln(&config, t).unwrap();
            let b = predict_thm32_ln(&config, t, Thm32Case::I).unwrap();
            assert!((a.ratio(&b) - 1.0).abs() < 1e-10);
        }
    }
    let mixed = cfg(vec![lp(1.0), lp(0.0)], vec![c(), c()]);
    assert!(matches!(
        predict_theorem_a(&mixed, 1e3),
        Err(Error::WrongCase(_))
    ));
}

#[test]
fn negative_part_scales_predictions() {
    let base = RiskModelConfig::all_constant(2, 1.0).unwrap();
    let neg = base
        .clone()
        .with_negative_part(NegativePart::ShiftedExp {
            rate: 1.0,
            mass: 0.4,
        })
        .unwrap();
    let x = 1e4;
    let a = predict_thm31(&base, x).unwrap().value;
    let b = predict_thm31(&neg, x).unwrap().value;
    assert!((b.ratio(&a) - 0.6).abs() < 1e-12);
}

#[test]
fn dominance_diagnostics() {
    let config = RiskModelConfig::all_constant(3, 1.0).unwrap();
    let t: Vec<f64> = (0..8).map(|j| 2f64.powi(j)).collect();
    let report = check_dominance_conditions(&config, &t).unwrap();
    assert!(report.passes());
    assert_eq!(report.first_vs_chain.len(), 2);
    // A heavier first insurance tail than the chain breaks the first condition.
    let heavy = cfg(vec![lp(4.0), c()], vec![c(), c()]);
    assert!(!check_dominance_conditions(&heavy, &t).unwrap().passes());
    assert!(predict_thm31(&heavy, 1e3).unwrap().flagged);
    assert!(check_dominance_conditions(&config, &[2.0, 1.0]).is_err());
}

#[test]
fn ruin_study_csv() {
    let config = RiskModelConfig::all_constant(2, 1.0).unwrap();
    let xs = [20.0, 50.0];
    let rows = ruin_study(&config, &xs, 100_000, 3).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows
        .iter()
        .all(|r| r.thm32.is_some() && r.theorem_a.is_some()));
    let mut out = Vec::new();
    write_ruin_csv(&rows, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 14);
    assert_eq!(&header[..3], &["x", "horizon", "psi_mc"]);
    assert!(header.contains(&"predict_theoremA"));
    let again = ruin_study(&config, &xs, 100_000, 3).unwrap();
    assert_eq!(rows, again);
}
