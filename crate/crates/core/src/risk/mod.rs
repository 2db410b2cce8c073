//! Discrete-time risk model with insurance and financial risks.

mod model;
mod oracle;
mod predict;
mod sim;
mod study;

pub use model::{NegativePart, RiskModelConfig};
pub use oracle::{sn_tail_oracle_grid, RiskGridPlan};
pub use predict::{
    check_dominance_conditions, classify_thm32, predict_theorem_a, predict_theorem_a_ln,
    predict_thm31, predict_thm31_ln, predict_thm32, predict_thm32_ln, DominanceReport,
    RatioSequence, RiskPrediction, Thm32Case,
};
pub use sim::{ruin_mc, ruin_mc_grid, simulate_paths, PathSample, RuinEstimate, RuinReport};
pub use study::{ruin_study, write_ruin_csv, RuinStudyRow};
