//! Group actions, induced structures and orbit-map certificates.

mod action;

pub use action::{parse_action, ActionRule, ActionSpec};
mod checks;

pub use checks::{
    bounded_sets_agree, cobounded_check, coarse_action_certificate, commuting_equivalence, induced_structure_first,
    induced_structure_second, mesh, CONTROLLED_SAMPLE, point_finite_check, stabilizer_window, uniformly_bornologous_action_check,
    AgreementPolicy, InducedStructure, SetTrace, DEFAULT_MESH_CAP,
};
