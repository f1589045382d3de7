use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use super::family::FiniteFamily;
use super::window::Side;
use crate::actions::ActionSpec;
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::maps::{Mapping, PreimageIndex};

/// A coarse structure, given by the witness set it assigns to a family.
///
/// A family is uniformly bounded when its witness sets stay inside one
/// finite set as the window grows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoarseStructureSpec {
    /// Witness `{u^-1 v}`.
    LeftGroup(GroupSpec),
    /// Witness `{u v^-1}`.
    RightGroup(GroupSpec),
    /// Families refining `{g . F . U}` for finite `F`.
    ActionInduced { action: ActionSpec, bounded: Vec<Element> },
    /// On the source of `map`: a family is bounded iff its image is.
    Pullback { map: Mapping, inner: Box<CoarseStructureSpec> },
    /// On the target of `map`: a family is bounded iff its preimage is.
    Transported { map: Mapping, inner: Box<CoarseStructureSpec> },
}

impl CoarseStructureSpec {
    pub fn side(side: Side, group: &GroupSpec) -> Self {
        match side {
            Side::Left => Self::LeftGroup(group.clone()),
            Side::Right => Self::RightGroup(group.clone()),
        }
    }

    pub fn action_induced(action: &ActionSpec, bounded: &[Element]) -> Result<Self> {
        if bounded.is_empty() {
            return Err(Error::Precondition("the generating bounded set is empty".into()));
        }
        for u in bounded {
            action.space().validate(u)?;
        }
        let bounded: BTreeSet<Element> = bounded.iter().cloned().collect();
        Ok(Self::ActionInduced { action: action.clone(), bounded: bounded.into_iter().collect() })
    }

    pub fn pullback(map: &Mapping, inner: CoarseStructureSpec) -> Result<Self> {
        if inner.space() != map.target() {
            return Err(Error::SpaceMismatch { expected: map.target().to_string(), found: inner.space().to_string() });
        }
        Ok(Self::Pullback { map: map.clone(), inner: Box::new(inner) })
    }

    pub fn transported(map: &Mapping, inner: CoarseStructureSpec) -> Result<Self> {
        if inner.space() != map.source() {
            return Err(Error::SpaceMismatch { expected: map.source().to_string(), found: inner.space().to_string() });
        }
        Ok(Self::Transported { map: map.clone(), inner: Box::new(inner) })
    }

    /// The set the structure lives on.
    pub fn space(&self) -> &GroupSpec {
        match self {
            Self::LeftGroup(g) | Self::RightGroup(g) => g,
            Self::ActionInduced { action, .. } => action.space(),
            Self::Pullback { map, .. } => map.source(),
            Self::Transported { map, .. } => map.target(),
        }
    }

    /// The witness set of `fam`, in canonical order.
    ///
    /// `radius` sizes the search windows of rules that cannot be inverted
    /// exactly (window-searched carriers, preimages).
    pub fn witness_set(&self, fam: &FiniteFamily, radius: usize) -> Result<Vec<Element>> {
        fam.ensure_space(self.space())?;
        let mut out = BTreeSet::new();
        match self {
            Self::LeftGroup(g) => {
                for m in fam.members() {
                    for u in m {
                        let ui = g.inv(u);
                        out.extend(m.iter().map(|v| g.op(&ui, v)));
                    }
                }
            }
            Self::RightGroup(g) => {
                for m in fam.members() {
                    for v in m {
                        let vi = g.inv(v);
                        out.extend(m.iter().map(|u| g.op(u, &vi)));
                    }
                }
            }
            Self::ActionInduced { action, bounded } => {
                let g = action.group();
                out.insert(g.identity());
                for m in fam.members().iter().filter(|m| m.len() > 1) {
                    let mut carriers = BTreeSet::new();
                    for b in m {
                        let ks = action.carriers(b, bounded, radius + b.length() + 1)?;
                        if ks.is_empty() {
                            return Err(Error::Precondition(format!("{b} is not covered by G.U under {action}")));
                        }
                        carriers.extend(ks);
                    }
                    for k in &carriers {
                        let ki = g.inv(k);
                        out.extend(carriers.iter().map(|l| g.op(&ki, l)));
                    }
                }
            }
            Self::Pullback { map, inner } => return inner.witness_set(&map.image_family(fam)?, radius),
            Self::Transported { map, inner } => {
                let reach = fam.members().iter().flatten().map(Element::length).max().unwrap_or(0);
                let index = PreimageIndex::new(map, map.preimage_radius(reach))?;
                return inner.witness_set(&index.preimage_family(map.source(), fam), radius);
            }
        }
        Ok(out.into_iter().collect())
    }
}

impl fmt::Display for CoarseStructureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LeftGroup(g) => write!(f, "C_l({g})"),
            Self::RightGroup(g) => write!(f, "C_r({g})"),
            Self::ActionInduced { action, bounded } => {
                let u: Vec<String> = bounded.iter().map(Element::to_string).collect();
                write!(f, "C_G({action}; U={{{}}})", u.join(", "))
            }
            Self::Pullback { map, inner } => write!(f, "pullback({inner} along {map})"),
            Self::Transported { map, inner } => write!(f, "transport({inner} along {map})"),
        }
    }
}

impl Serialize for CoarseStructureSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
