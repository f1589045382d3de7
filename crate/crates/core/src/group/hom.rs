use std::fmt;

use super::element::Element;
use super::spec::{GroupKind, GroupSpec};
use crate::error::{Error, Result};

/// Injective homomorphisms between catalog groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Hom {
    Identity,
    /// `Z -> DihInf`, `n -> x^n`.
    DihedralInclusion,
    /// `Z -> Z`, `n -> k n` with `k != 0`.
    Scale(i64),
}

impl Hom {
    /// Checks that the homomorphism is defined between the given groups.
    pub fn check(&self, source: &GroupSpec, target: &GroupSpec) -> Result<()> {
        let ok = match self {
            Hom::Identity => source == target,
            Hom::DihedralInclusion => {
                source.kind() == &GroupKind::FreeAbelian(1) && target.kind() == &GroupKind::DihInf
            }
            Hom::Scale(k) => {
                *k != 0
                    && source.kind() == &GroupKind::FreeAbelian(1)
                    && target.kind() == &GroupKind::FreeAbelian(1)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                expected: format!("domain/codomain of {self}"),
                found: format!("{source} -> {target}"),
            })
        }
    }

    pub fn apply(&self, g: &Element) -> Element {
        match self {
            Hom::Identity => g.clone(),
            Hom::DihedralInclusion => {
                Element::dihedral(g.as_integer().expect("inclusion is defined on Z"), false)
            }
            Hom::Scale(k) => Element::integer(k * g.as_integer().expect("scale is defined on Z")),
        }
    }

    /// The unique preimage of `y`, if any.
    pub fn preimage(&self, y: &Element) -> Option<Element> {
        match self {
            Hom::Identity => Some(y.clone()),
            Hom::DihedralInclusion => match y {
                Element::Dihedral { shift, flip: false } => Some(Element::integer(*shift)),
                _ => None,
            },
            Hom::Scale(k) => {
                let n = y.as_integer()?;
                (n % k == 0).then(|| Element::integer(n / k))
            }
        }
    }
}

impl fmt::Display for Hom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hom::Identity => write!(f, "id"),
            Hom::DihedralInclusion => write!(f, "x^n"),
            Hom::Scale(k) => write!(f, "{k}n"),
        }
    }
}
