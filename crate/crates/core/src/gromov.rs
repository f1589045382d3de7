//! Function-space windows for transferring an action along a coarse
//! equivalence `alpha: G -> H`.
//!
//! The transfer sets `c`, `d` and the cover `E` are computed on a window,
//! and the tables `beta: Ball_G(r) -> H` satisfying the transfer conditions
//! are enumerated exhaustively.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::actions::mesh;
use crate::battery::BatteryConfig;
use crate::coarse::Trace;
use crate::error::{Error, Result};
use crate::group::{ball, Element, GroupSpec};
use crate::maps::{check_bornologous, check_coarsely_proper, MapWindow, Mapping};

/// Largest cover `E` tried before giving up.
pub const DEFAULT_COVER_CAP: usize = 64;
/// Largest candidate product an enumeration may face.
pub const DEFAULT_EXPLOSION_CAP: u128 = 1_000_000;

/// A window-minimal transfer set with its growth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferSet {
    pub set: Vec<Element>,
    pub image: Vec<Element>,
    pub trace: Trace,
    pub stable: bool,
}

fn sorted(set: impl IntoIterator<Item = Element>) -> Vec<Element> {
    set.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

/// `c_r(F) = {alpha(u)^-1 alpha(v) : u, v in Ball(r), u^-1 v in F}` for `r <= R`.
pub fn transfer_c(alpha: &Mapping, f: &[Element], radius: usize) -> Result<TransferSet> {
    let (g, h) = (alpha.source(), alpha.target());
    for e in f {
        g.validate(e)?;
    }
    let b = ball(g, radius)?;
    let mut image = BTreeSet::new();
    let mut trace = Trace::default();
    for r in 0..=radius {
        for u in b.within(r) {
            for e in f {
                let v = g.op(u, e);
                if v.length() <= r {
                    image.insert(h.left_quotient(&alpha.apply(u)?, &alpha.apply(&v)?));
                }
            }
        }
        trace.push(r, image.len());
    }
    let stable = trace.is_stable();
    Ok(TransferSet { set: sorted(f.iter().cloned()), image: image.into_iter().collect(), trace, stable })
}

/// `d_r(F) = {u^-1 v : u, v in Ball(r), alpha(u)^-1 alpha(v) in F}` for `r <= R`.
pub fn transfer_d(alpha: &Mapping, f: &[Element], radius: usize) -> Result<TransferSet> {
    let (g, h) = (alpha.source(), alpha.target());
    for e in f {
        h.validate(e)?;
    }
    let wanted: BTreeSet<&Element> = f.iter().collect();
    let b = ball(g, radius)?;
    let values: Vec<Element> = b.elements().iter().map(|u| alpha.apply(u)).collect::<Result<_>>()?;
    let mut image = BTreeSet::new();
    let mut trace = Trace::default();
    let mut seen = 0;
    for r in 0..=radius {
        let upto = b.within(r).len();
        for p in 0..upto {
            for q in (0..upto).filter(|&q| p >= seen || q >= seen) {
                if wanted.contains(&h.left_quotient(&values[p], &values[q])) {
                    image.insert(g.left_quotient(&b.elements()[p], &b.elements()[q]));
                }
            }
        }
        seen = upto;
        trace.push(r, image.len());
    }
    let stable = trace.is_stable();
    Ok(TransferSet { set: sorted(f.iter().cloned()), image: image.into_iter().collect(), trace, stable })
}

fn require_coarse(alpha: &MapWindow, radius: usize) -> Result<()> {
    let born = check_bornologous(alpha, &BatteryConfig::default().for_spec(&alpha.source)?, radius)?;
    if !born.pass {
        return Err(Error::Precondition(format!("{} is not bornologous on the window", alpha.map)));
    }
    if !check_coarsely_proper(alpha, radius)?.pass {
        return Err(Error::Precondition(format!("{} is not coarsely proper on the window", alpha.map)));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferSets {
    /// Present when `F` lies in the source group.
    pub c: Option<TransferSet>,
    /// Present when `F` lies in the target group.
    pub d: Option<TransferSet>,
}

/// `c(F)` and `d(F)` for a map that is bornologous and coarsely proper.
pub fn compute_transfer_sets(alpha: &MapWindow, f: &[Element], radius: usize) -> Result<TransferSets> {
    require_coarse(alpha, radius)?;
    let in_source = f.iter().all(|e| alpha.map.source().validate(e).is_ok());
    let in_target = f.iter().all(|e| alpha.map.target().validate(e).is_ok());
    if !in_source && !in_target {
        return Err(Error::MalformedElement {
            group: format!("{} or {}", alpha.map.source(), alpha.map.target()),
            detail: "F must lie in the source or the target group".into(),
        });
    }
    Ok(TransferSets {
        c: if in_source { Some(transfer_c(&alpha.map, f, radius)?) } else { None },
        d: if in_target { Some(transfer_d(&alpha.map, f, radius)?) } else { None },
    })
}

/// `E` with `Ball_H(R) <= alpha(Ball_G(R')).E`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cover {
    pub elements: Vec<Element>,
    pub cover_radius: usize,
    pub mesh: usize,
}

/// Greedy cover: the least uncovered point of `Ball_H(R)` adds the least
/// `alpha(g)^-1 y` over `g in Ball_G(2R + 2)`; `R'` is then the least radius
/// that still covers.
pub fn compute_cover_constant(alpha: &MapWindow, radius: usize, cap: usize) -> Result<Cover> {
    require_coarse(alpha, radius)?;
    let (g, h) = (alpha.map.source(), alpha.map.target());
    let search = ball(g, 2 * radius + 2)?;
    let images: Vec<Element> = search.elements().iter().map(|u| alpha.map.apply(u)).collect::<Result<_>>()?;
    let lengths: BTreeMap<&Element, usize> =
        images.iter().zip(search.elements()).rev().map(|(y, u)| (y, u.length())).collect();
    let mut e: Vec<Element> = Vec::new();
    let covered = |e: &[Element], y: &Element| e.iter().any(|k| lengths.contains_key(&h.right_quotient(y, k)));
    for y in ball(h, radius)?.elements() {
        if covered(&e, y) {
            continue;
        }
        if e.len() == cap {
            return Err(Error::CoverFailure { cap, detail: format!("{y} is still uncovered") });
        }
        let best = images.iter().map(|a| h.left_quotient(a, y)).min().expect("search ball is nonempty");
        e.push(best);
    }
    e.sort();
    let mut cover_radius = 0;
    for y in ball(h, radius)?.elements() {
        let need = e
            .iter()
            .filter_map(|k| lengths.get(&h.right_quotient(y, k)).copied())
            .min()
            .expect("every point was covered");
        cover_radius = cover_radius.max(need);
    }
    Ok(Cover { mesh: mesh(h, &e), elements: e, cover_radius })
}

/// Extra elements added to `c(F)` for every `f` in `F`, closed under
/// inversion: padding `f` by `p` also pads `f^-1` by `p^-1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Padding {
    extra: BTreeMap<Element, BTreeSet<Element>>,
}

impl Padding {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn symmetric(g: &GroupSpec, h: &GroupSpec, pads: &[(Element, Vec<Element>)]) -> Result<Self> {
        let mut extra: BTreeMap<Element, BTreeSet<Element>> = BTreeMap::new();
        for (f, ps) in pads {
            g.validate(f)?;
            for p in ps {
                h.validate(p)?;
                extra.entry(f.clone()).or_default().insert(p.clone());
                extra.entry(g.inv(f)).or_default().insert(h.inv(p));
            }
        }
        Ok(Self { extra })
    }

    pub fn is_empty(&self) -> bool {
        self.extra.is_empty()
    }

    fn apply(&self, f: &[Element], image: &mut Vec<Element>) {
        let mut all: BTreeSet<Element> = image.drain(..).collect();
        for e in f {
            if let Some(p) = self.extra.get(e) {
                all.extend(p.iter().cloned());
            }
        }
        image.extend(all);
    }
}

/// All subsets of `Ball(2)` with at most three elements, then the generator
/// singletons not already present.
pub fn f_battery(group: &GroupSpec) -> Result<Vec<Vec<Element>>> {
    let b = ball(group, 2)?;
    let e = b.elements();
    let mut out = Vec::new();
    for i in 0..e.len() {
        out.push(vec![e[i].clone()]);
        for j in i + 1..e.len() {
            out.push(sorted([e[i].clone(), e[j].clone()]));
            for k in j + 1..e.len() {
                out.push(sorted([e[i].clone(), e[j].clone(), e[k].clone()]));
            }
        }
    }
    for s in group.generators() {
        let single = vec![s.clone()];
        if !out.contains(&single) {
            out.push(single);
        }
    }
    Ok(out)
}

/// The transfer tables over the `F`-batteries of both groups, and the cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferData {
    pub alpha: MapWindow,
    pub radius: usize,
    pub c_table: Vec<TransferSet>,
    pub d_table: Vec<TransferSet>,
    pub cover: Cover,
    pub padding: Padding,
    #[serde(skip)]
    c_index: BTreeMap<Vec<Element>, usize>,
}

impl TransferData {
    pub fn compute(alpha: MapWindow, radius: usize, padding: Padding) -> Result<Self> {
        require_coarse(&alpha, radius)?;
        let cover = compute_cover_constant(&alpha, radius, DEFAULT_COVER_CAP)?;
        let mut c_table = Vec::new();
        for f in f_battery(alpha.map.source())? {
            let mut t = transfer_c(&alpha.map, &f, radius)?;
            padding.apply(&f, &mut t.image);
            c_table.push(t);
        }
        let d_table =
            f_battery(alpha.map.target())?.iter().map(|f| transfer_d(&alpha.map, f, radius)).collect::<Result<_>>()?;
        let c_index = c_table.iter().enumerate().map(|(i, t)| (t.set.clone(), i)).collect();
        Ok(Self { alpha, radius, c_table, d_table, cover, padding, c_index })
    }

    pub fn source(&self) -> &GroupSpec {
        self.alpha.map.source()
    }

    pub fn target(&self) -> &GroupSpec {
        self.alpha.map.target()
    }

    /// The tabulated `c(F)`, if `F` is in the battery.
    pub fn c(&self, f: &[Element]) -> Option<&[Element]> {
        self.c_index.get(&sorted(f.iter().cloned())).map(|&i| self.c_table[i].image.as_slice())
    }

    pub fn d(&self, f: &[Element]) -> Option<&[Element]> {
        let f = sorted(f.iter().cloned());
        self.d_table.iter().find(|t| t.set == f).map(|t| t.image.as_slice())
    }

    /// The tabulated `alpha` itself, as a window.
    pub fn alpha_window(&self, r: usize) -> Result<BetaWindow> {
        let table = self.alpha.map.tabulate(r)?;
        BetaWindow::new(self.source(), self.target(), r, table)
    }
}

/// A table `beta: Ball_G(r) -> H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BetaWindow {
    #[serde(skip)]
    source: GroupSpec,
    #[serde(skip)]
    target: GroupSpec,
    pub radius: usize,
    pub pin: Element,
    pub table: BTreeMap<Element, Element>,
}

impl BetaWindow {
    pub fn new(source: &GroupSpec, target: &GroupSpec, radius: usize, table: BTreeMap<Element, Element>) -> Result<Self> {
        let domain = ball(source, radius)?;
        if domain.len() != table.len() || domain.elements().iter().any(|g| !table.contains_key(g)) {
            return Err(Error::Precondition(format!("table is not total on Ball({radius}) of {source}")));
        }
        for v in table.values() {
            target.validate(v)?;
        }
        let pin = table[&source.identity()].clone();
        Ok(Self { source: source.clone(), target: target.clone(), radius, pin, table })
    }

    /// The constant table with value `h`.
    pub fn constant(source: &GroupSpec, target: &GroupSpec, radius: usize, h: &Element) -> Result<Self> {
        let table = ball(source, radius)?.elements().iter().map(|g| (g.clone(), h.clone())).collect();
        Self::new(source, target, radius, table)
    }

    pub fn at(&self, g: &Element) -> Option<&Element> {
        self.table.get(g)
    }
}

/// Pass/fail of one transfer condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub condition: u8,
    pub pass: bool,
    /// First offending pair `(u, v)` of the domain, or the uncovered point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Vec<Element>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BetaVerdict {
    pub conditions: Vec<ConditionResult>,
}

impl BetaVerdict {
    pub fn pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn condition(&self, n: u8) -> &ConditionResult {
        &self.conditions[usize::from(n - 1)]
    }
}

fn pairs_violating(beta: &BetaWindow, td: &TransferData, first: bool) -> Option<Vec<Element>> {
    let (g, h) = (&beta.source, &beta.target);
    let dom: Vec<(&Element, &Element)> = beta.table.iter().collect();
    for &(u, bu) in &dom {
        for &(v, bv) in &dom {
            let (du, dv) = (g.left_quotient(u, v), h.left_quotient(bu, bv));
            let bad = if first {
                td.c_table.iter().any(|t| t.set.contains(&du) && t.image.binary_search(&dv).is_err())
            } else {
                td.d_table.iter().any(|t| t.set.contains(&dv) && t.image.binary_search(&du).is_err())
            };
            if bad {
                return Some(vec![u.clone(), v.clone()]);
            }
        }
    }
    None
}

/// Conditions on the window:
/// (1) `u^-1 v in F` implies `beta(u)^-1 beta(v) in c(F)`,
/// (2) `beta(u)^-1 beta(v) in F` implies `u^-1 v in d(F)`,
/// (3) `beta(1).Ball_H(r - mesh(E)) <= beta(Ball_G(r)).E`.
pub fn beta_window_check(beta: &BetaWindow, td: &TransferData) -> Result<BetaVerdict> {
    if &beta.source != td.source() || &beta.target != td.target() {
        return Err(Error::SpaceMismatch {
            expected: format!("{} -> {}", td.source(), td.target()),
            found: format!("{} -> {}", beta.source, beta.target),
        });
    }
    let mut conditions = Vec::new();
    for (n, first) in [(1, true), (2, false)] {
        let violation = pairs_violating(beta, td, first);
        conditions.push(ConditionResult { condition: n, pass: violation.is_none(), violation, note: None });
    }
    let h = &beta.target;
    let e = &td.cover.elements;
    let third = match beta.radius.checked_sub(td.cover.mesh) {
        None => ConditionResult {
            condition: 3,
            pass: true,
            violation: None,
            note: Some(format!("window radius {} is below mesh(E) = {}", beta.radius, td.cover.mesh)),
        },
        Some(k) => {
            let reach: BTreeSet<Element> = beta.table.values().flat_map(|b| e.iter().map(|x| h.op(b, x))).collect();
            let missing = ball(h, k)?.elements().iter().map(|y| h.op(&beta.pin, y)).find(|y| !reach.contains(y));
            ConditionResult { condition: 3, pass: missing.is_none(), violation: missing.map(|y| vec![y]), note: None }
        }
    };
    conditions.push(third);
    Ok(BetaVerdict { conditions })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Enumeration {
    pub radius: usize,
    pub pin: Element,
    pub count: usize,
    pub candidates: u128,
    pub windows: Vec<BetaWindow>,
}

/// Every `beta` on `Ball_G(r)` with `beta(1) = pin` satisfying conditions
/// (1) and (2). Points are assigned in ball order, each from
/// `beta(parent).c({s})` where `s` is the last letter of its geodesic.
pub fn enumerate_beta_windows(td: &TransferData, r: usize, pin: &Element, cap: u128) -> Result<Enumeration> {
    if r > td.radius {
        return Err(Error::WindowOverflow(format!("radius {r} exceeds the transfer radius {}", td.radius)));
    }
    let (g, h) = (td.source(), td.target());
    h.validate(pin)?;
    let dom = ball(g, r)?;
    let letters: Vec<Element> = g.generators().iter().flat_map(|s| [s.clone(), g.inv(s)]).collect();
    let mut steps: Vec<(usize, Vec<Element>)> = Vec::new();
    let mut candidates: u128 = 1;
    for w in &dom.elements()[1..] {
        let (s, parent) = letters
            .iter()
            .find_map(|s| {
                let p = g.right_quotient(w, s);
                (p.length() + 1 == w.length()).then_some((s, p))
            })
            .expect("every nonidentity element has a geodesic parent");
        let step = td.c(std::slice::from_ref(s)).expect("generator singletons are in the battery").to_vec();
        candidates = candidates.saturating_mul(step.len() as u128);
        let p = dom.elements().iter().position(|e| e == &parent).expect("parent is in the ball");
        steps.push((p, step));
    }
    if candidates > cap {
        return Err(Error::ExplosionGuard { candidates, cap });
    }
    let c_rules: Vec<(&[Element], &[Element])> =
        td.c_table.iter().map(|t| (t.set.as_slice(), t.image.as_slice())).collect();
    let d_rules: Vec<(&[Element], &[Element])> =
        td.d_table.iter().map(|t| (t.set.as_slice(), t.image.as_slice())).collect();
    let consistent = |values: &[Element], i: usize| {
        let w = &dom.elements()[i];
        (0..=i).all(|j| {
            let u = &dom.elements()[j];
            [(u, w, &values[j], &values[i]), (w, u, &values[i], &values[j])].into_iter().all(|(a, b, x, y)| {
                let (dg, dh) = (g.left_quotient(a, b), h.left_quotient(x, y));
                c_rules.iter().all(|(f, c)| !f.contains(&dg) || c.binary_search(&dh).is_ok())
                    && d_rules.iter().all(|(f, d)| !f.contains(&dh) || d.binary_search(&dg).is_ok())
            })
        })
    };
    let mut found = Vec::new();
    let mut values = vec![pin.clone()];
    if consistent(&values, 0) {
        extend(&mut values, &steps, h, &consistent, &mut found);
    }
    let windows = found
        .into_iter()
        .map(|vals: Vec<Element>| {
            let table = dom.elements().iter().cloned().zip(vals).collect();
            BetaWindow::new(g, h, r, table)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Enumeration { radius: r, pin: pin.clone(), count: windows.len(), candidates, windows })
}

fn extend(
    values: &mut Vec<Element>,
    steps: &[(usize, Vec<Element>)],
    h: &GroupSpec,
    consistent: &dyn Fn(&[Element], usize) -> bool,
    found: &mut Vec<Vec<Element>>,
) {
    let i = values.len();
    let Some((parent, step)) = steps.get(i - 1) else {
        found.push(values.clone());
        return;
    };
    let mut seen = BTreeSet::new();
    for s in step {
        let v = h.op(&values[*parent], s);
        if !seen.insert(v.clone()) {
            continue;
        }
        values.push(v);
        if consistent(values, i) {
            extend(values, steps, h, consistent, found);
        }
        values.pop();
    }
}

/// `(g.beta)(x) = beta(g x)` on `Ball(r - |g|)`.
pub fn beta_act_g(g: &Element, beta: &BetaWindow) -> Result<BetaWindow> {
    let src = &beta.source;
    src.validate(g)?;
    let r = beta.radius.checked_sub(g.length()).ok_or_else(|| {
        Error::WindowUnderflow(format!("|{g}| = {} exceeds the window radius {}", g.length(), beta.radius))
    })?;
    let table = ball(src, r)?
        .elements()
        .iter()
        .map(|x| (x.clone(), beta.table[&src.op(g, x)].clone()))
        .collect();
    BetaWindow::new(src, &beta.target, r, table)
}

/// `(h.beta)(x) = h beta(x)`.
pub fn beta_act_h(h: &Element, beta: &BetaWindow) -> Result<BetaWindow> {
    beta.target.validate(h)?;
    let table = beta.table.iter().map(|(x, y)| (x.clone(), beta.target.op(h, y))).collect();
    BetaWindow::new(&beta.source, &beta.target, beta.radius, table)
}

/// `h.(g.beta)`.
pub fn beta_actions(g: &Element, h: &Element, beta: &BetaWindow) -> Result<BetaWindow> {
    beta_act_h(h, &beta_act_g(g, beta)?)
}

/// Whether `g.(h.beta)` and `h.(g.beta)` are the same table.
pub fn actions_commute(g: &Element, h: &Element, beta: &BetaWindow) -> Result<bool> {
    Ok(beta_act_g(g, &beta_act_h(h, beta)?)? == beta_actions(g, h, beta)?)
}

/// `{g in Ball(r) : (g.beta)(1) = beta(1)}` and whether it lies in `d({1_H})`.
pub fn pin_stabilizer(beta: &BetaWindow, td: &TransferData) -> (Vec<Element>, bool) {
    let stab: Vec<Element> = beta.table.iter().filter(|(_, y)| **y == beta.pin).map(|(x, _)| x.clone()).collect();
    let one = [td.target().identity()];
    let inside = td.d(&one).is_some_and(|d| stab.iter().all(|g| d.binary_search(g).is_ok()));
    (stab, inside)
}
