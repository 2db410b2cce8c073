use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use semirv::asym::CaseTag;
use semirv::harness::{
    classify_trend, predictor_tag, run_config_file, run_ratio_study, selfcheck, Assertion, OracleMethod,
    PredictorMethod, RunOptions, StudyConfig, StudyInputs, Trend, SEED_ENV,
};
use semirv::{Error, SemiRvDistribution};

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn bundled() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    v.sort();
    v
}

fn run(path: &Path, out: &Path, parallel: bool, seed: Option<u64>) -> semirv::harness::RunOutcome {
    run_config_file(
        path,
        &RunOptions {
            out_dir: out.to_path_buf(),
            parallel,
            seed,
        },
    )
}

fn csvs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn trend_rule() {
    assert_eq!(classify_trend(&[0.4, 0.3, 0.2, 0.1, 0.05]), Trend::ConvergingTo1);
    assert_eq!(classify_trend(&[0.01, 0.02, 0.04, 0.08]), Trend::Diverging);
    assert_eq!(classify_trend(&[0.1, 0.3, 0.05, 0.2]), Trend::Inconclusive);
    assert_eq!(classify_trend(&[0.1, 0.05]), Trend::Inconclusive);
    // Only the trailing half must be monotone.
    assert_eq!(classify_trend(&[0.5, 0.9, 0.4, 0.3, 0.2, 0.1]), Trend::ConvergingTo1);
    assert_eq!(classify_trend(&[0.01, 0.9, 0.5, 0.3, 0.2, 0.1]), Trend::Inconclusive);
    assert_eq!(classify_trend(&[0.4, 0.3, 0.25]), Trend::Inconclusive);
}

#[test]
fn every_case_has_a_bundled_config() {
    let mut tags = BTreeSet::new();
    for path in bundled() {
        let config = StudyConfig::from_json_str(&fs::read_to_string(&path).unwrap()).unwrap();
        for s in &config.studies {
            tags.insert(predictor_tag(&s.predictor, &s.inputs).unwrap());
        }
    }
    let mut required: Vec<String> = CaseTag::ALL.iter().map(|t| t.name().to_string()).collect();
    required.extend(["Lemma23", "Thm31", "Thm32_i", "TheoremA"].map(String::from));
    for r in &required {
        assert!(tags.contains(r), "no bundled config exercises {r}; have {tags:?}");
    }
}

#[test]
fn bundled_configs_pass_and_rerun_identically() {
    let tmp = tempfile::tempdir().unwrap();
    for path in bundled() {
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        let (a, b) = (tmp.path().join(format!("{name}_a")), tmp.path().join(format!("{name}_b")));
        let first = run(&path, &a, false, None);
        let expected = if name == "documented_failure" { 1 } else { 0 };
        assert_eq!(first.exit_code, expected, "{name}: {:?}", first.messages);
        let second = run(&path, &b, false, None);
        assert_eq!(second.exit_code, expected);
        let (ca, cb) = (csvs(&a), csvs(&b));
        assert!(!ca.is_empty());
        assert_eq!(ca, cb, "{name}");
        let manifest: serde_json::Value = serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["studies"].as_array().unwrap().len(), ca.len());
        assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn parallel_runs_match_serial_runs() {
    let tmp = tempfile::tempdir().unwrap();
    for file in ["mixed.json", "lemma22.json", "risk.json"] {
        let path = configs_dir().join(file);
        let (a, b) = (tmp.path().join(format!("{file}_s")), tmp.path().join(format!("{file}_p")));
        assert_eq!(run(&path, &a, false, Some(5)).exit_code, run(&path, &b, true, Some(5)).exit_code);
        assert_eq!(csvs(&a), csvs(&b), "{file}");
    }
}

#[test]
fn seeds_are_assigned_per_study() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&configs_dir().join("risk.json"), tmp.path(), false, Some(100));
    let m = out.manifest.unwrap();
    assert_eq!(m.base_seed, 100);
    assert_eq!(m.seed_source, "command line");
    let seeds: Vec<u64> = m.studies.iter().map(|s| s.seed).collect();
    assert_eq!(seeds, vec![100, 101, 102]);
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn schema_errors_exit_two_with_a_location() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(configs_dir().join("erlang.json")).unwrap();
    let unknown = write(tmp.path(), "unknown.json", &text.replacen("\"constant\"", "\"konstant\"", 1));
    let out = run(&unknown, &tmp.path().join("o1"), false, None);
    assert_eq!(out.exit_code, 2);
    assert!(out.messages[0].contains("studies[0].inputs"), "{:?}", out.messages);
    let typo = write(tmp.path(), "typo.json", &text.replace("\"x_grid\"", "\"xgrid\""));
    assert_eq!(run(&typo, &tmp.path().join("o2"), false, None).exit_code, 2);
    let missing = tmp.path().join("missing.json");
    assert_eq!(run(&missing, &tmp.path().join("o3"), false, None).exit_code, 2);
    let bad_name = write(tmp.path(), "bad_name.json", &text.replace("\"erlang\"", "\"../erlang\""));
    assert_eq!(run(&bad_name, &tmp.path().join("o4"), false, None).exit_code, 2);
}

#[test]
fn study_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(configs_dir().join("erlang.json")).unwrap();
    // A predictor that refuses these inputs.
    let wrong = write(tmp.path(), "wrong.json", &text.replace("\"thm12_case_i\"", "\"thm12_case_ii\""));
    let out = run(&wrong, &tmp.path().join("o"), false, None);
    assert_eq!(out.exit_code, 1);
    assert!(out.messages[0].contains("wrong case"), "{:?}", out.messages);
}

#[test]
fn assertions_report_failures() {
    let e = SemiRvDistribution::exponential(1.0).unwrap();
    let inputs = StudyInputs::Distributions(vec![e.clone(), e]);
    let xs: Vec<f64> = (1..=6).map(|k| 10.0 * k as f64).collect();
    let report = run_ratio_study(&OracleMethod::ErlangClosedForm, &PredictorMethod::Thm12CaseI, &inputs, &xs, 0.0, 1).unwrap();
    assert_eq!(report.trend, Trend::ConvergingTo1);
    assert!(Assertion::Trend(Trend::ConvergingTo1).check(&report).is_none());
    assert!(Assertion::CloserAtEnd.check(&report).is_none());
    assert!(Assertion::FinalDeviationBelow(0.02).check(&report).is_none());
    assert!(Assertion::FinalDeviationBelow(0.01).check(&report).is_some());
    assert!(Assertion::RatioWithin { x: 10.0, tolerance: 1e-6 }.check(&report).is_some());
    assert!(Assertion::RatioWithin { x: 11.0, tolerance: 1.0 }.check(&report).is_some());
    assert!(Assertion::EnvelopeContains.check(&report).is_some());
    let r = report.row_at(60.0).unwrap();
    assert!((r.ratio - 61.0 / 60.0).abs() < 1e-12);
}

#[test]
fn ratio_study_preconditions() {
    let e = SemiRvDistribution::exponential(1.0).unwrap();
    let inputs = StudyInputs::Distributions(vec![e.clone(), e]);
    let run = |xs: &[f64]| run_ratio_study(&OracleMethod::ConvTail2, &PredictorMethod::Dispatch, &inputs, xs, 0.0, 1);
    assert!(matches!(run(&[1.0, 2.0, 3.0, 4.0]), Err(Error::Precondition(_))));
    assert!(matches!(run(&[1.0, 2.0, 3.0, 5.0, 4.0]), Err(Error::Precondition(_))));
    assert!(run(&[1.0, 2.0, 3.0, 4.0, 5.0]).is_ok());
    let funcs = StudyInputs::Functions(vec![]);
    assert!(run_ratio_study(&OracleMethod::ConvTail2, &PredictorMethod::Dispatch, &funcs, &[1.0, 2.0, 3.0, 4.0, 5.0], 0.0, 1).is_err());
}

#[test]
fn monte_carlo_rows_are_flagged_when_noisy() {
    let e = SemiRvDistribution::exponential(1.0).unwrap();
    let inputs = StudyInputs::Distributions(vec![e.clone(), e]);
    let xs = [2.0, 4.0, 8.0, 12.0, 16.0];
    let report = run_ratio_study(&OracleMethod::MonteCarlo { samples: 100_000 }, &PredictorMethod::Dispatch, &inputs, &xs, 0.0, 3).unwrap();
    assert!(report.rows[0].oracle_rel_error < 0.25 && !report.rows[0].flagged);
    assert!(report.rows[4].flagged);
    let mut out = Vec::new();
    report.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("x,oracle_value,oracle_error_bound,predicted_value,ratio,"));
}

#[test]
fn selfcheck_passes() {
    let r = selfcheck();
    assert!(r.passed(), "{:?}", r.checks);
    assert!(r.checks.len() >= 5);
}

fn cli() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_semirv"));
    c.env_remove(SEED_ENV);
    c
}

#[test]
fn cli_exit_codes_and_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = cli()
        .args(["study", configs_dir().join("erlang.json").to_str().unwrap(), "--out"])
        .arg(tmp.path().join("ok"))
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(csvs(&tmp.path().join("ok")).len(), 1);
    let bad = cli()
        .args(["study", configs_dir().join("documented_failure.json").to_str().unwrap(), "--out"])
        .arg(tmp.path().join("bad"))
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let text = fs::read_to_string(configs_dir().join("erlang.json")).unwrap();
    let unknown = write(tmp.path(), "unknown.json", &text.replacen("\"constant\"", "\"no_such_family\"", 1));
    let out = cli().args(["study", unknown.to_str().unwrap(), "--out"]).arg(tmp.path().join("u")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_family"));
    let check = cli().arg("selfcheck").output().unwrap();
    assert_eq!(check.status.code(), Some(0));
}

#[test]
fn cli_seed_environment_variable() {
    let tmp = tempfile::tempdir().unwrap();
    let path = configs_dir().join("risk.json");
    let out = cli()
        .env(SEED_ENV, "4242")
        .args(["study", path.to_str().unwrap(), "--out"])
        .arg(tmp.path().join("env"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("env/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["base_seed"], 4242);
    assert_eq!(m["seed_source"], SEED_ENV);
    let out = cli()
        .env(SEED_ENV, "4242")
        .args(["study", path.to_str().unwrap(), "--seed", "7", "--out"])
        .arg(tmp.path().join("flag"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("flag/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["base_seed"], 7);
    let out = cli().env(SEED_ENV, "abc").args(["study", path.to_str().unwrap(), "--out"]).arg(tmp.path().join("x")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_predict_and_ruin() {
    let tmp = tempfile::tempdir().unwrap();
    let dists = write(
        tmp.path(),
        "d.json",
        r#"[{"alpha": 1.0, "f": {"family": "constant", "params": {}}, "kind": "continuous"},
            {"alpha": 1.0, "f": {"family": "constant", "params": {}}, "kind": "continuous"}]"#,
    );
    let out = cli().args(["predict", "--dists", dists.to_str().unwrap(), "--x-grid", "10:40:3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(1).unwrap().contains("Thm12_AllAboveMinus1"));
    let risk = write(
        tmp.path(),
        "r.json",
        r#"{"n": 1, "alpha": 1.0, "insurance": [{"family": "constant", "params": {}}],
            "financial": [{"family": "constant", "params": {}}]}"#,
    );
    let out = cli()
        .args(["ruin", "--config", risk.to_str().unwrap(), "--x-grid", "10:100:2", "--samples", "20000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
    let out = cli().args(["predict", "--dists", dists.to_str().unwrap(), "--x-grid", "10:40"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
