//! Loss-tolerant Bell measurements on parity-encoded photonic qubits and the
//! cost of one-way repeater chains built from them.
//!
//! * [`code`]: code parameters and Bell-state decompositions
//! * [`bm`]: physical and logical Bell measurement, sampling and exhaustive checks
//! * [`analytics`]: closed-form and exact success probabilities
//! * [`chain`]: lossy channels, repeater chains and the cost optimizer
//! * [`optics`]: Fock-space model of the linear-optics measurement

pub mod analytics;
pub mod bm;
pub mod chain;
pub mod code;
pub mod error;
pub mod optics;

pub use analytics::{
    bm_success_probability, bm_success_probability_exact, max_loss, n_combinatorial, p_mu,
    p_mu_direct, perfect_bm_success_probability, reconstruct_p_from_pmu, PMuTable,
};
pub use bm::{
    audit_soundness, decode_logical, enumerate_exact, enumerate_exact_average, enumerate_profile,
    physical_bm, sample_bm, sample_bm_average, Apparatus, FailureReason, InputState, LogicalBmResult,
    LossPattern, PhysicalOutcome, SampleSummary,
};
pub use chain::{
    chain_success, cost, effective_eta, optimize, ChainConfig, ChainResult, LossChannel, Optimum,
    SearchSpace,
};
pub use optics::{classify_patterns, PatternTable};
pub use code::{expand_block_bell, expand_logical_bell, index_set, BellIndex, CodeParams, ParityVector};
pub use error::{Error, Result};

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
