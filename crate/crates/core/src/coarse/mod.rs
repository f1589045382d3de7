//! Families, controlled sets and coarse structures evaluated on windows.

mod controlled;
mod family;
mod structure;
mod window;

pub use controlled::{compose_controlled, controlled_to_family, family_to_controlled, ControlledSet};
pub use family::{refines, star, star_family, FiniteFamily, ParamFamily, Refinement};
pub use structure::CoarseStructureSpec;
pub use window::{membership_window, side_witness, Counterexample, Membership, Side, Trace, Witness};
