//! Simulation of linear-optical teleportation of entangled coherent states.
//!
//! Two engines are provided. [`coherent`] keeps states as exact finite
//! superpositions of coherent-state products; [`fock`] is a dense truncated
//! photon-number engine used as an independent oracle and for the few
//! protocols that leave the coherent-state manifold.

pub mod analysis;
pub mod coherent;
pub mod error;
pub mod fock;
pub mod measurement;
pub mod protocols;
pub mod report;

pub use num_complex::Complex64;

pub use analysis::{
    alpha_grid, concurrence_closed_form, concurrence_pure, success_prob_closed_form, Bipartition, ChannelSign,
    ClosedFormCurve, PartitionKind,
};
pub use coherent::{coherent_overlap, fock_amplitude, CoherentSuperposition, CoherentTerm};
pub use error::{Error, Result};
pub use fock::{cutoff_for, fidelity, BeamSplitter, DensityMatrix, FockState};
pub use measurement::MeasurementOutcome;
pub use protocols::{
    build_cat, build_channel, build_ecs, channel_limit_fidelity, parity_oracle, prepare_channel_via_bs,
    small_alpha_teleport, teleport_ecs, ChannelSpec, EcsSpec, Engine, OutcomeKind, ParityModel, TeleportOptions,
    TeleportReport,
};
