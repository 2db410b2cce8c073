//! Convolution tails, asymptotic predictors and ruin probabilities for
//! distributions with tails `e^{-alpha x} f(x)`.

pub mod asym;
pub mod dist;
pub mod error;
pub mod harness;
pub mod interp;
pub mod oracle;
pub mod quad;
pub mod risk;
pub mod rng;
pub mod scaled;
pub mod solve;
pub mod special;
pub mod stats;
pub mod tailfn;

pub use dist::{ClassTag, Kind, SampleBatch, SemiRvDistribution};
pub use error::{Error, Result};
pub use scaled::Scaled;
pub use tailfn::{Family, KaramataParams, RvIndex, TailFunctionSpec};
