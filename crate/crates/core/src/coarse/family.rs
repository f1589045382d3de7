use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};

/// A finite list of finite subsets of a space, canonically sorted.
///
/// Members are deduplicated and sorted; empty members are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteFamily {
    space: GroupSpec,
    members: Vec<Vec<Element>>,
}

impl FiniteFamily {
    /// Builds a family, checking every element against `space`.
    pub fn new<M, I>(space: &GroupSpec, members: M) -> Result<Self>
    where
        M: IntoIterator<Item = I>,
        I: IntoIterator<Item = Element>,
    {
        let fam = Self::collect(space, members);
        for m in &fam.members {
            for e in m {
                space.validate(e)?;
            }
        }
        Ok(fam)
    }

    /// Builds a family from elements already known to be valid.
    pub(crate) fn collect<M, I>(space: &GroupSpec, members: M) -> Self
    where
        M: IntoIterator<Item = I>,
        I: IntoIterator<Item = Element>,
    {
        let sets: BTreeSet<Vec<Element>> = members
            .into_iter()
            .map(|m| m.into_iter().collect::<BTreeSet<_>>().into_iter().collect::<Vec<_>>())
            .filter(|m| !m.is_empty())
            .collect();
        Self { space: space.clone(), members: sets.into_iter().collect() }
    }

    pub fn empty(space: &GroupSpec) -> Self {
        Self { space: space.clone(), members: Vec::new() }
    }

    pub fn space(&self) -> &GroupSpec {
        &self.space
    }

    pub fn members(&self) -> &[Vec<Element>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_member(&self, m: &[Element]) -> bool {
        self.members.binary_search_by(|x| x.as_slice().cmp(m)).is_ok()
    }

    /// `true` when every member of `self` is also a member of `other`.
    pub fn is_subfamily_of(&self, other: &FiniteFamily) -> bool {
        self.members.iter().all(|m| other.contains_member(m))
    }

    pub fn map_members(&self, space: &GroupSpec, f: impl Fn(&Element) -> Element) -> Self {
        Self::collect(space, self.members.iter().map(|m| m.iter().map(&f).collect::<Vec<_>>()))
    }

    /// Parses a JSON array of arrays of element strings.
    pub fn from_json(space: &GroupSpec, text: &str) -> Result<Self> {
        let raw: Vec<Vec<String>> =
            serde_json::from_str(text).map_err(|e| Error::parse(e.column().saturating_sub(1), e.to_string()))?;
        let mut members = Vec::with_capacity(raw.len());
        for m in raw {
            let mut set = Vec::with_capacity(m.len());
            for s in m {
                set.push(space.parse_element(&s)?);
            }
            members.push(set);
        }
        Self::new(space, members)
    }

    pub(crate) fn ensure_space(&self, space: &GroupSpec) -> Result<()> {
        if &self.space != space {
            return Err(Error::SpaceMismatch { expected: space.to_string(), found: self.space.to_string() });
        }
        Ok(())
    }
}

impl Serialize for FiniteFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.members.serialize(serializer)
    }
}

type FamilyFn = dyn Fn(usize) -> Result<FiniteFamily> + Send + Sync;

/// A radius-indexed generator of finite families, monotone in the radius.
#[derive(Clone)]
pub struct ParamFamily {
    tag: String,
    space: GroupSpec,
    generate: Arc<FamilyFn>,
}

impl ParamFamily {
    pub fn new(
        tag: impl Into<String>,
        space: &GroupSpec,
        generate: impl Fn(usize) -> Result<FiniteFamily> + Send + Sync + 'static,
    ) -> Self {
        Self { tag: tag.into(), space: space.clone(), generate: Arc::new(generate) }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn space(&self) -> &GroupSpec {
        &self.space
    }

    pub fn at(&self, r: usize) -> Result<FiniteFamily> {
        let fam = (self.generate)(r)?;
        fam.ensure_space(&self.space)?;
        Ok(fam)
    }

    /// A constant family, for one-off evaluations.
    pub fn constant(tag: impl Into<String>, fam: FiniteFamily) -> Self {
        let space = fam.space.clone();
        Self::new(tag, &space, move |_| Ok(fam.clone()))
    }

    pub fn retag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }
}

impl fmt::Debug for ParamFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamFamily").field("tag", &self.tag).field("space", &self.space).finish()
    }
}

/// `St(B, fam)`: `B` together with every member of `fam` meeting `B`.
pub fn star(b: &[Element], fam: &FiniteFamily) -> Vec<Element> {
    let base: BTreeSet<&Element> = b.iter().collect();
    let mut out: BTreeSet<Element> = b.iter().cloned().collect();
    for m in fam.members() {
        if m.iter().any(|e| base.contains(e)) {
            out.extend(m.iter().cloned());
        }
    }
    out.into_iter().collect()
}

/// Memberwise star of `f1` against `f2`.
pub fn star_family(f1: &FiniteFamily, f2: &FiniteFamily) -> Result<FiniteFamily> {
    f2.ensure_space(f1.space())?;
    let index = MemberIndex::new(f2);
    let members = f1.members().iter().map(|b| {
        let mut out: BTreeSet<Element> = b.iter().cloned().collect();
        for i in index.meeting(b) {
            out.extend(f2.members()[i].iter().cloned());
        }
        out.into_iter().collect::<Vec<_>>()
    });
    Ok(FiniteFamily::collect(f1.space(), members))
}

/// Element -> indices of members containing it.
struct MemberIndex(HashMap<Element, Vec<usize>>);

impl MemberIndex {
    fn new(fam: &FiniteFamily) -> Self {
        let mut map: HashMap<Element, Vec<usize>> = HashMap::new();
        for (i, m) in fam.members().iter().enumerate() {
            for e in m {
                map.entry(e.clone()).or_default().push(i);
            }
        }
        Self(map)
    }

    fn containing(&self, e: &Element) -> &[usize] {
        self.0.get(e).map_or(&[], Vec::as_slice)
    }

    fn meeting(&self, b: &[Element]) -> BTreeSet<usize> {
        b.iter().flat_map(|e| self.containing(e).iter().copied()).collect()
    }
}

/// Outcome of [`refines`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refinement {
    pub holds: bool,
    /// For every member of the finer family, the index of the first
    /// containing member of the coarser one (`None` when skipped or absent).
    pub assignment: Vec<Option<usize>>,
    /// First member that is contained in no member of the coarser family.
    pub failure: Option<Vec<Element>>,
}

/// Whether every member of `f1` lies in some member of `f2`.
///
/// With `ignore_singletons`, one-point members are exempt.
pub fn refines(f1: &FiniteFamily, f2: &FiniteFamily, ignore_singletons: bool) -> Refinement {
    let index = MemberIndex::new(f2);
    let mut assignment = Vec::with_capacity(f1.len());
    let mut failure = None;
    for b in f1.members() {
        if ignore_singletons && b.len() <= 1 {
            assignment.push(None);
            continue;
        }
        let found = index
            .containing(&b[0])
            .iter()
            .copied()
            .find(|&i| {
                let m = &f2.members()[i];
                b.iter().all(|e| m.binary_search(e).is_ok())
            });
        if found.is_none() && failure.is_none() {
            failure = Some(b.clone());
        }
        assignment.push(found);
    }
    Refinement { holds: failure.is_none(), assignment, failure }
}
