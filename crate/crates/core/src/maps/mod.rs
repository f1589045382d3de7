//! Maps between catalog spaces and their coarse certificates.

mod checks;
pub(crate) mod mapping;

pub use checks::{
    check_bornologous, check_close, check_coarsely_proper, compare_structures, image_param,
    pullback_structure_equality, structure_distance, surjective_equivalence_check, MapWindow, MARGIN,
};
pub use mapping::{parse_map, preimage_family, MapRule, Mapping, PreimageIndex};
