use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::family::{FiniteFamily, ParamFamily};
use super::structure::CoarseStructureSpec;
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};

/// Sizes indexed by radius.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Trace(BTreeMap<usize, usize>);

impl Trace {
    /// Trace with `sizes[r]` at radius `r`.
    pub fn from_sizes(sizes: &[usize]) -> Self {
        Self(sizes.iter().copied().enumerate().collect())
    }

    pub fn push(&mut self, radius: usize, size: usize) {
        self.0.insert(radius, size);
    }

    pub fn get(&self, radius: usize) -> Option<usize> {
        self.0.get(&radius).copied()
    }

    pub fn entries(&self) -> &BTreeMap<usize, usize> {
        &self.0
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.0.values().copied().collect()
    }

    pub fn max_radius(&self) -> usize {
        self.0.keys().next_back().copied().unwrap_or(0)
    }

    pub fn last(&self) -> Option<usize> {
        self.0.values().next_back().copied()
    }

    pub fn max(&self) -> usize {
        self.0.values().copied().max().unwrap_or(0)
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.sizes().windows(2).all(|w| w[0] <= w[1])
    }

    /// Number of final radii inspected by the stability rule.
    pub fn tail_len(&self) -> usize {
        self.max_radius().div_ceil(2).max(1)
    }

    /// Constant over the final `max(ceil(R/2), 1)` radii.
    pub fn is_stable(&self) -> bool {
        let sizes = self.sizes();
        let k = self.tail_len().min(sizes.len());
        sizes[sizes.len() - k..].windows(2).all(|w| w[0] == w[1])
    }

    /// Strictly increasing over the final `max(ceil(R/2), 1)` radii.
    pub fn is_growing(&self) -> bool {
        let sizes = self.sizes();
        let k = (self.tail_len() + 1).min(sizes.len());
        k >= 2 && sizes[sizes.len() - k..].windows(2).all(|w| w[0] < w[1])
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.values().map(usize::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A finite set certifying uniform boundedness at the largest radius.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub structure: String,
    pub elements: Vec<Element>,
    pub trace: Trace,
}

/// A family whose witness sets keep growing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub structure: String,
    pub family: String,
    pub trace: Trace,
    /// Witness set at the largest radius.
    pub elements: Vec<Element>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Membership {
    Bounded(Witness),
    Unbounded(Counterexample),
}

impl Membership {
    pub fn is_bounded(&self) -> bool {
        matches!(self, Membership::Bounded(_))
    }

    pub fn trace(&self) -> &Trace {
        match self {
            Membership::Bounded(w) => &w.trace,
            Membership::Unbounded(c) => &c.trace,
        }
    }

    pub fn elements(&self) -> &[Element] {
        match self {
            Membership::Bounded(w) => &w.elements,
            Membership::Unbounded(c) => &c.elements,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// `{u^-1 v}` (left) or `{u v^-1}` (right) over pairs inside members.
pub fn side_witness(side: Side, group: &GroupSpec, fam: &FiniteFamily) -> Result<Witness> {
    fam.ensure_space(group)?;
    let spec = match side {
        Side::Left => CoarseStructureSpec::LeftGroup(group.clone()),
        Side::Right => CoarseStructureSpec::RightGroup(group.clone()),
    };
    let elements = spec.witness_set(fam, 0)?;
    let trace = Trace::from_sizes(&[elements.len()]);
    Ok(Witness { structure: spec.to_string(), elements, trace })
}

/// Evaluates `fam` at every radius `0..=radius` against `spec`.
///
/// A trace that is constant over the final `ceil(R/2)` radii yields a
/// [`Witness`]; anything else is reported as a [`Counterexample`].
pub fn membership_window(spec: &CoarseStructureSpec, fam: &ParamFamily, radius: usize) -> Result<Membership> {
    if fam.space() != spec.space() {
        return Err(Error::SpaceMismatch { expected: spec.space().to_string(), found: fam.space().to_string() });
    }
    let mut trace = Trace::default();
    let mut elements = Vec::new();
    let mut previous: Option<FiniteFamily> = None;
    for r in 0..=radius {
        let f = fam.at(r)?;
        if let Some(p) = &previous {
            if !p.is_subfamily_of(&f) {
                return Err(Error::Precondition(format!("family `{}` is not monotone at radius {r}", fam.tag())));
            }
        }
        elements = spec.witness_set(&f, r)?;
        trace.push(r, elements.len());
        previous = Some(f);
    }
    let structure = spec.to_string();
    Ok(if trace.is_stable() {
        Membership::Bounded(Witness { structure, elements, trace })
    } else {
        Membership::Unbounded(Counterexample { structure, family: fam.tag().to_string(), trace, elements })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stability_rule() {
        assert!(Trace::from_sizes(&[1, 3, 3, 3, 3]).is_stable());
        assert!(!Trace::from_sizes(&[1, 2, 3, 4, 5]).is_stable());
        assert!(Trace::from_sizes(&[1, 2, 3, 4, 5]).is_growing());
        assert!(Trace::from_sizes(&[4]).is_stable());
        let t = Trace::from_sizes(&[1, 3, 5]);
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"0":1,"1":3,"2":5}"#);
    }

    #[test]
    fn integer_differences() {
        let z = GroupSpec::integers();
        let fam = FiniteFamily::new(
            &z,
            [vec![Element::integer(0), Element::integer(3)], vec![Element::integer(10), Element::integer(13)]],
        )
        .unwrap();
        let w = side_witness(Side::Left, &z, &fam).unwrap();
        assert_eq!(w.elements, vec![Element::integer(0), Element::integer(3), Element::integer(-3)]);
        assert!(side_witness(Side::Left, &GroupSpec::dihedral(), &fam).is_err());
    }
}
