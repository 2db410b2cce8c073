//! Ratio studies, config files and the self-check suite.

mod config;
mod methods;
mod report;
mod run;
mod selfcheck;

pub use config::{Assertion, StudyConfig, StudySpec, XGrid};
pub use methods::{
    evaluate_oracle, evaluate_predictor, predictor_tag, EnvelopeInput, OracleMethod, OracleValue,
    PredictorMethod, PredictorValue, RiskQuantity, StudyInputs,
};
pub use report::{
    classify_trend, hash_hex, run_ratio_study, RatioRow, RatioStudyReport, StudyDefinition,
    StudyMetadata, Trend, FLAG_THRESHOLD,
};
pub use run::{run_config_file, Manifest, RunOptions, RunOutcome, StudyRecord, SEED_ENV};
pub use selfcheck::{selfcheck, telescoping_deviations, CheckResult, SelfCheckReport};
