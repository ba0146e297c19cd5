//! Application calculators: ABP profiles, hidden-variable simulation of the
//! quantum correlations, and communication bounds.

mod abp;
mod comm;
mod hidden;
mod quantum;

pub use abp::{abp_profile, abp_profile_with_budget, AbpProfile, LevelProfile};
pub use comm::{
    comm_report, comm_table, dcc_exact_2party, default_d_values, power_threshold_crossing,
    CommBoundReport, CommCrossCheck, MAX_DCC_SIDE,
};
pub use hidden::{
    hv_model_from_factorization, hv_sample, quantum_distribution, tv_threshold,
    HiddenVariableModel, SampleReport, FLOAT_MODEL_TOLERANCE,
};
pub use quantum::{
    quantum_report, row_split_factorization, QuantumOutcome, QuantumReport, SimulationSummary,
};
