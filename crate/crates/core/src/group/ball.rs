use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use super::element::Element;
use super::spec::GroupSpec;
use crate::error::{Error, Result};

/// Default cap on the number of elements in one ball.
pub const DEFAULT_ELEMENT_CAP: usize = 1_000_000;

/// A BFS-complete Cayley ball, listed layer by layer in shortlex order.
#[derive(Debug, Clone)]
pub struct Ball {
    group: GroupSpec,
    radius: usize,
    elements: Vec<Element>,
    /// `layer_ends[r]` is the number of elements of length `<= r`.
    layer_ends: Vec<usize>,
    lengths: HashMap<Element, usize>,
}

impl Ball {
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements of length at most `r`; a prefix of [`Ball::elements`].
    pub fn within(&self, r: usize) -> &[Element] {
        let r = r.min(self.radius);
        &self.elements[..self.layer_ends[r]]
    }

    /// Elements of length exactly `r`.
    pub fn layer(&self, r: usize) -> &[Element] {
        if r > self.radius {
            return &[];
        }
        let start = if r == 0 { 0 } else { self.layer_ends[r - 1] };
        &self.elements[start..self.layer_ends[r]]
    }

    pub fn length_of(&self, g: &Element) -> Option<usize> {
        self.lengths.get(g).copied()
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.lengths.contains_key(g)
    }
}

/// Enumerates `Ball(radius)` for the default generators by breadth-first
/// search, failing rather than truncating once `cap` elements are exceeded.
pub fn ball_with_cap(group: &GroupSpec, radius: usize, cap: usize) -> Result<Ball> {
    let identity = group.identity();
    let mut elements = vec![identity.clone()];
    let mut lengths = HashMap::from([(identity.clone(), 0)]);
    let mut layer_ends = vec![1];
    let mut frontier = vec![identity];
    for r in 1..=radius {
        let mut next: HashSet<Element> = HashSet::new();
        for g in &frontier {
            for s in group.generators() {
                let h = group.op(g, s);
                if !lengths.contains_key(&h) {
                    next.insert(h);
                }
            }
        }
        if elements.len() + next.len() > cap {
            return Err(Error::ResourceLimit { what: format!("Ball({radius}) of {group}"), cap });
        }
        let mut layer: Vec<Element> = next.into_iter().collect();
        layer.sort();
        for h in &layer {
            lengths.insert(h.clone(), r);
        }
        elements.extend(layer.iter().cloned());
        layer_ends.push(elements.len());
        frontier = layer;
    }
    Ok(Ball { group: group.clone(), radius, elements, layer_ends, lengths })
}

static ELEMENT_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_ELEMENT_CAP);

/// Sets the cap used by [`ball`] for the rest of the process.
pub fn set_element_cap(cap: usize) {
    ELEMENT_CAP.store(cap.max(1), Ordering::Relaxed);
}

pub fn element_cap() -> usize {
    ELEMENT_CAP.load(Ordering::Relaxed)
}

pub fn ball(group: &GroupSpec, radius: usize) -> Result<Ball> {
    ball_with_cap(group, radius, element_cap())
}

/// `{h^-1 a h : h in Ball(radius)}` in canonical order.
pub fn conjugacy_window(group: &GroupSpec, a: &Element, radius: usize) -> Result<Vec<Element>> {
    let b = ball(group, radius)?;
    Ok(conjugacy_window_in(group, a, b.elements()).into_iter().collect())
}

pub(crate) fn conjugacy_window_in(group: &GroupSpec, a: &Element, conjugators: &[Element]) -> BTreeSet<Element> {
    conjugators.iter().map(|h| group.conjugate(a, h)).collect()
}

/// Sizes of the conjugacy window at every radius `0..=radius`.
pub fn conjugacy_trace(group: &GroupSpec, a: &Element, ball: &Ball, radius: usize) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    let mut sizes = Vec::with_capacity(radius + 1);
    for r in 0..=radius.min(ball.radius()) {
        for h in ball.layer(r) {
            seen.insert(group.conjugate(a, h));
        }
        sizes.push(seen.len());
    }
    sizes
}
