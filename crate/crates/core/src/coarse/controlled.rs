use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::family::FiniteFamily;
use crate::error::Result;
use crate::group::{Element, GroupSpec};

/// A window-restricted subset of `X x X`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ControlledSet {
    #[serde(skip)]
    space: GroupSpec,
    pairs: BTreeSet<(Element, Element)>,
}

impl ControlledSet {
    pub fn new(space: &GroupSpec, pairs: impl IntoIterator<Item = (Element, Element)>) -> Self {
        Self { space: space.clone(), pairs: pairs.into_iter().collect() }
    }

    pub fn diagonal(space: &GroupSpec, points: impl IntoIterator<Item = Element>) -> Self {
        Self::new(space, points.into_iter().map(|p| (p.clone(), p)))
    }

    pub fn space(&self) -> &GroupSpec {
        &self.space
    }

    pub fn pairs(&self) -> &BTreeSet<(Element, Element)> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, x: &Element, y: &Element) -> bool {
        self.pairs.contains(&(x.clone(), y.clone()))
    }

    pub fn is_superset_of(&self, other: &ControlledSet) -> bool {
        other.pairs.is_subset(&self.pairs)
    }

    /// `E ∪ E^-1 ∪ Δ`, the diagonal taken over points occurring in `E`.
    pub fn symmetrized(&self) -> Self {
        let mut pairs = self.pairs.clone();
        for (x, y) in &self.pairs {
            pairs.insert((y.clone(), x.clone()));
            pairs.insert((x.clone(), x.clone()));
            pairs.insert((y.clone(), y.clone()));
        }
        Self { space: self.space.clone(), pairs }
    }
}

/// All ordered pairs within members: `⋃ B × B`.
pub fn family_to_controlled(fam: &FiniteFamily) -> ControlledSet {
    let pairs = fam
        .members()
        .iter()
        .flat_map(|m| m.iter().flat_map(move |x| m.iter().map(move |y| (x.clone(), y.clone()))));
    ControlledSet::new(fam.space(), pairs)
}

/// The family `{{x, y} : (x, y) ∈ E}`.
pub fn controlled_to_family(e: &ControlledSet) -> FiniteFamily {
    FiniteFamily::collect(e.space(), e.pairs().iter().map(|(x, y)| [x.clone(), y.clone()]))
}

/// `E1 ∘ E2 = {(x, z) : (x, y) ∈ E1, (y, z) ∈ E2}`.
pub fn compose_controlled(e1: &ControlledSet, e2: &ControlledSet) -> Result<ControlledSet> {
    if e1.space() != e2.space() {
        return Err(crate::Error::SpaceMismatch {
            expected: e1.space().to_string(),
            found: e2.space().to_string(),
        });
    }
    let mut out_of: BTreeMap<&Element, Vec<&Element>> = BTreeMap::new();
    for (y, z) in e2.pairs() {
        out_of.entry(y).or_default().push(z);
    }
    let mut pairs = BTreeSet::new();
    for (x, y) in e1.pairs() {
        if let Some(zs) = out_of.get(y) {
            for z in zs {
                pairs.insert((x.clone(), (*z).clone()));
            }
        }
    }
    Ok(ControlledSet { space: e1.space().clone(), pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> GroupSpec {
        GroupSpec::integers()
    }

    fn n(k: i64) -> Element {
        Element::integer(k)
    }

    fn pairs(v: &[(i64, i64)]) -> ControlledSet {
        ControlledSet::new(&z(), v.iter().map(|&(a, b)| (n(a), n(b))))
    }

    #[test]
    fn family_to_controlled_examples() {
        let f = FiniteFamily::new(&z(), [vec![n(0), n(1)]]).unwrap();
        assert_eq!(family_to_controlled(&f), pairs(&[(0, 0), (0, 1), (1, 0), (1, 1)]));
        assert!(family_to_controlled(&FiniteFamily::empty(&z())).is_empty());
        let f = FiniteFamily::new(&z(), [vec![n(4)], vec![n(9)]]).unwrap();
        assert_eq!(family_to_controlled(&f), pairs(&[(4, 4), (9, 9)]));
    }

    #[test]
    fn controlled_to_family_examples() {
        let f = controlled_to_family(&pairs(&[(0, 1)]));
        assert_eq!(f, FiniteFamily::new(&z(), [vec![n(0), n(1)]]).unwrap());
        let f = controlled_to_family(&ControlledSet::diagonal(&z(), [n(2), n(3)]));
        assert_eq!(f, FiniteFamily::new(&z(), [vec![n(2)], vec![n(3)]]).unwrap());
        let f = controlled_to_family(&pairs(&[(0, 2), (2, 5)]));
        assert_eq!(f, FiniteFamily::new(&z(), [vec![n(0), n(2)], vec![n(2), n(5)]]).unwrap());
    }

    #[test]
    fn composition_examples() {
        let e = pairs(&[(0, 1), (1, 3), (3, 3)]);
        let diag = ControlledSet::diagonal(&z(), (-5..=5).map(n));
        assert_eq!(compose_controlled(&e, &diag).unwrap(), e);
        assert_eq!(compose_controlled(&pairs(&[(0, 1)]), &pairs(&[(1, 2)])).unwrap(), pairs(&[(0, 2)]));
        let shift = pairs(&[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(compose_controlled(&shift, &shift).unwrap(), pairs(&[(0, 2), (1, 3), (2, 4)]));
    }

    #[test]
    fn composition_space_mismatch() {
        let d = ControlledSet::diagonal(&GroupSpec::dihedral(), []);
        assert!(compose_controlled(&pairs(&[(0, 1)]), &d).is_err());
    }
}
