//! Catalog groups with exact normal forms and Cayley-ball enumeration.

mod ball;
mod element;
mod hom;
mod spec;

pub use ball::{
    ball, ball_with_cap, conjugacy_trace, conjugacy_window, element_cap, set_element_cap, Ball, DEFAULT_ELEMENT_CAP,
};
pub use element::Element;
pub use hom::Hom;
pub(crate) use spec::Cursor;
pub use spec::{parse_group_spec, GroupKind, GroupSpec, MAX_RANK};
