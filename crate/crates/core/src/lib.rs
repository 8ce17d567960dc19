//! Fault-tolerance numerics for GKP-encoded measurement-based quantum computation
//! on finitely squeezed continuous-variable cluster states.
//!
//! The crate follows the shift-error matrix of a GKP qubit through the measurement
//! schedules that implement the Clifford gates `I`, `P`, `F` and `CZ`, turns the
//! resulting correction variances into logical error probabilities, solves for the
//! squeezing needed to reach a given fault-tolerance threshold, and evaluates the
//! error and success probabilities of preparing magic states by photon counting.
//!
//! | module | what it does |
//! |--------|--------------|
//! | [`gaussian_core`] | exact symbolic error matrices and symplectic maps |
//! | [`cluster_gates`] | per-gate measurement schedules and propagation traces |
//! | [`threshold`] | `p_err`, squeezing threshold rows, error-rate curve |
//! | [`shift_mc`] | seeded Monte Carlo of explicit shift trajectories |
//! | [`magic_distill`] | mod-4 photon-counting Wigner sums |
//! | [`cli`] | the `gkp-cluster` command line |
//!
//! Runnable walkthroughs live in the crate's `examples/` directory:
//!
//! ```bash
//! cargo run --release --example squeezing_thresholds
//! cargo run --release --example noise_evolution
//! cargo run --release --example error_curve
//! cargo run --release --example monte_carlo_check
//! cargo run --release --example magic_state_counting
//! ```
//!
//! ```
//! use gkp_cluster::threshold::sigma2_for_threshold;
//!
//! let row = sigma2_for_threshold(1e-6).unwrap();
//! assert!((row.squeezing_db - 20.5).abs() < 0.05);
//! ```

pub mod cli;
pub mod cluster_gates;
pub mod error;
pub mod gaussian_core;
pub mod magic_distill;
pub mod shift_mc;
pub mod threshold;

pub use cluster_gates::{Gate, GateSchedule, PropagationTrace};
pub use error::{Error, Result};
pub use gaussian_core::{NoiseForm, NoiseModel, SymbolicCovariance, SymplecticMap};
pub use magic_distill::{DistillationConfig, DistillationResult};
pub use shift_mc::{CountConvention, MCConfig, MCResult};
pub use threshold::{CurvePoint, ThresholdRow};
