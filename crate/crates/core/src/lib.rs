//! Optimal binary signaling for a two-sensor Gaussian multiple-access
//! detection network.
//!
//! Two sensors observe a binary source through independent binary
//! symmetric channels and transmit amplitude pairs simultaneously over a
//! shared additive-Gaussian channel. This crate computes the MAP decision
//! regions of the receiver exactly, evaluates the resulting error
//! probability in closed form, finds the cap-constrained optimal power
//! allocation, and cross-checks everything with a seeded Monte Carlo
//! simulator that also covers orthogonal-signaling baselines.
//!
//! ```
//! use macsig::{optimal_allocation, Case, ModelParams};
//!
//! let params = ModelParams::new(0.4, 0.01, 0.05, 1.0, 1.0, 1.0)?;
//! let alloc = optimal_allocation(&params)?;
//! assert_eq!(alloc.case, Case::III);
//! // Sensor 2 backs off to an interior optimum below its power cap.
//! assert!(alloc.p2_star < 1.0 && !alloc.p2_capped);
//! # Ok::<(), macsig::Error>(())
//! ```

pub mod boundary;
pub mod errors;
pub mod model;
pub mod pe;
pub mod rng;
pub mod sim;
pub mod sweep;

pub use boundary::{
    bracket_functions, find_boundaries, p2_tilde, w_sign_eval, BoundarySet, BracketFunctions,
    WCoefficients,
};
pub use errors::{Error, Result};
pub use model::{
    AsymFactors, BarCoefficients, Case, Classification, ConditionalProbs, JointConstellation,
    ModelParams, SYMBOLS,
};
pub use pe::{
    error_probability, error_upper_bound, g_h_split, high_snr_limit, optimal_allocation,
    q_function, stable_sum, AllocationResult, ErrorBreakdown, Policy,
};
pub use rng::{mix_seed, RngStream};
pub use sim::{
    simulate, simulate_mac, simulate_orthogonal, Scheme, SimConfig, SimReport, BLOCK_TRIALS,
};
pub use sweep::{
    region_map, region_to_csv, region_to_json, render_region, render_sweep, run_sweep,
    sweep_to_csv, sweep_to_json, AxisVar, GridAxis, OutputFormat, RegionCell, RegionMapSpec,
    RowStatus, SchemeSel, SweepRow, SweepSpec,
};
