//! State preparation, the teleportation protocol, and its limiting cases.

pub mod parity;
pub mod scan;
pub mod small_alpha;
pub mod states;
pub mod teleport;

pub use parity::{even_parity_probability, parity_oracle, AtomState, Parity, ParityBranch, ParityMeasurement, ParityModel};
pub use scan::{scan_concurrence, scan_success};
pub use small_alpha::{channel_limit_fidelity, channel_limit_fidelity_exact, limit_channel, limit_input, small_alpha_branches, small_alpha_teleport};
pub use states::{
    build_cat, build_channel, build_ecs, channel_layout, input_layout, prepare_channel_fock,
    prepare_channel_via_bs, ChannelSpec, EcsSpec,
};
pub use teleport::{
    apply_correction_and_classify, classify, closed_form_reference, disentangle_input, max_probability_gap,
    teleport_branches, teleport_branches_fock, teleport_ecs, Branch, Engine, OutcomeClass, OutcomeKind,
    OutcomeRecord, ReportParams, TeleportOptions, TeleportReport,
};
