//! Spin-j matter waves guided along curved atom fibers.
//!
//! The wave vector follows the guide tangent, so a helicity eigenstate picks up
//! a geometric phase `m * Omega(t)` set by the solid angle its direction sweeps.
//! This crate samples the wave-vector track, propagates the spin state, builds
//! the closed-form solution and checks the two against each other.

pub mod analytic_solution;
pub mod error;
pub mod evolution;
pub mod guide_geometry;
pub mod scenario;
pub mod spin_algebra;
pub mod tolerances;
pub mod verification;

pub use analytic_solution::{AnalyticSolution, HelicityWeights};
pub use error::{FiberError, Result};
pub use evolution::{propagate, EvolutionReport, QuantumState};
pub use guide_geometry::{sample_track, FrameChoice, GuidePath, PathShape, TrackOptions, WaveVectorTrack};
pub use spin_algebra::{expm_skew, make_spin_rep, HalfInt, SpinRepresentation, UnitaryMatrix};
pub use tolerances::Tolerances;
