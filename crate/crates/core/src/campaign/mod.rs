//! Verification campaigns: enumerate configurations, run every helper/stale
//! choice over many updated messages, and report exact counts.
//!
//! Work is split into (choice, message-range) chunks that run in parallel.
//! Randomness is keyed by `(seed, configuration, case)`, so reports do not
//! depend on scheduling.

mod presets;
mod report;
mod runner;
mod spec;

use thiserror::Error;

pub use presets::{preset, PRESETS};
pub use report::{
    emit_report, write_report, CampaignReport, ConfigRecord, ConfigTiming, ConverseCheck, ConverseRecord, FailureItem,
    NoiseRecord, ReportFormat, Timing, Totals, SCHEMA_VERSION,
};
pub use runner::{
    case_messages, case_rng, run_campaign, run_campaign_with_fault, run_converse_suite, run_noise_suite, FaultInjection,
};
pub use spec::{
    CampaignSpec, ConfigSpec, HelperPolicy, MessagePolicy, NoiseSpec, OracleChoice, DEFAULT_BUDGET,
    DEFAULT_FAILURE_CAP, DEFAULT_RANDOM_COUNT,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CampaignError {
    #[error("invalid campaign: {0}")]
    Config(String),
    #[error("{label}: exhaustive enumeration of {messages} messages exceeds the budget of {budget}")]
    Budget { label: String, messages: u128, budget: u64 },
    #[error("{label}: {msg}")]
    Build { label: String, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}
