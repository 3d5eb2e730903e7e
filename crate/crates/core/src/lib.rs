pub mod data;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod planner;
pub mod quadrature;
pub mod stable;
pub mod wealth;
pub mod withdrawal;

pub use error::{Error, Result};
pub use stable::{NumericConfig, SharpeRatio, StableParams};
pub use wealth::{ARule, BoundParams, ContinuousBound, Schedule};
pub use withdrawal::{StandardQuantile, StarBound, WithdrawalPlan};
