//! Quantum and classical random walks on the integer line with absorbing
//! boundaries, glassy step-length disorder, generating-function series for
//! absorption statistics, and spreading-exponent estimation.
//!
//! The `examples/` directory holds one runnable program per capability; the
//! `walklab` binary exposes the same workflows on the command line.

// `!(x > 0.0)` is used on purpose so that NaN takes the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod commands;
pub mod disorder;
pub mod ensemble;
pub mod error;
pub mod lattice;
pub mod raabe;
pub mod series;
pub mod walk;

pub use classical::{
    classical_avg_time_partial, classical_first_passage, classical_total_absorption,
    run_classical, ClassicalRun, ClassicalRunConfig,
};
pub use disorder::{
    realization_seed, sample_realization, table_two_presets, DisorderPreset, DisorderSampler,
    DisorderSpec, Dispersion, Moments, Realization,
};
pub use ensemble::{
    disorder_avg_absorb_time, disorder_avg_sigma, ensemble_exponent, finite_horizon_avg_time,
    fit_exponent, AveragedCurve, Engine, EnsembleConfig, FitResult,
};
pub use error::{Error, Result};
pub use lattice::{ClassicalState, PositionDistribution, QuantumState, WalkerState};
pub use raabe::{raabe_estimate, PositiveSeries, RaabeReport, Verdict};
pub use series::{
    absorption_probabilities, absorption_summary, absorption_table, avg_absorb_time,
    generating_function, total_absorption, AbsorptionSummary, PowerSeries, StartCoin, TailModel,
};
pub use walk::{
    run_quantum, AbsorberConfig, AbsorptionRecord, CoinKind, CoinOperator, CoinState,
    HadamardVariant, QuantumRun, StepLengths, WalkRunConfig,
};
