use std::collections::BTreeMap;

use serde::Serialize;

use super::mapping::{Mapping, PreimageIndex};
use crate::battery::BatteryConfig;
use crate::cert::{Certificate, Finding};
use crate::coarse::{membership_window, CoarseStructureSpec, Counterexample, Membership, ParamFamily, Trace, Witness};
use crate::error::{Error, Result};
use crate::group::{ball, Element, GroupSpec};

/// Extra radius kept around evaluated windows, so battery members built at
/// radius `r` (which reach `r + 2`) stay inside tabulated data.
pub const MARGIN: usize = 4;

/// A map together with the structures on its source and target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapWindow {
    pub map: Mapping,
    pub source: CoarseStructureSpec,
    pub target: CoarseStructureSpec,
}

impl MapWindow {
    pub fn new(map: Mapping, source: CoarseStructureSpec, target: CoarseStructureSpec) -> Result<Self> {
        for (spec, space) in [(&source, map.source()), (&target, map.target())] {
            if spec.space() != space {
                return Err(Error::SpaceMismatch { expected: space.to_string(), found: spec.space().to_string() });
            }
        }
        Ok(Self { map, source, target })
    }

    /// Left structures on both ends.
    pub fn left(map: Mapping) -> Self {
        let (s, t) = (map.source().clone(), map.target().clone());
        Self { map, source: CoarseStructureSpec::LeftGroup(s), target: CoarseStructureSpec::LeftGroup(t) }
    }
}

/// Word distance in the metric matching the structure: `|a^-1 b|`, or
/// `|a b^-1|` for right structures.
pub fn structure_distance(spec: &CoarseStructureSpec, a: &Element, b: &Element) -> usize {
    let g = spec.space();
    match spec {
        CoarseStructureSpec::RightGroup(_) => g.right_quotient(a, b).length(),
        _ => g.left_quotient(a, b).length(),
    }
}

/// `r -> f(fam(r))`
pub fn image_param(map: &Mapping, fam: &ParamFamily) -> ParamFamily {
    let (m, f) = (map.clone(), fam.clone());
    ParamFamily::new(format!("image of {} under {map}", fam.tag()), map.target(), move |r| m.image_family(&f.at(r)?))
}

fn preimage_param(index: &PreimageIndex, source: &GroupSpec, map: &Mapping, fam: &ParamFamily) -> ParamFamily {
    let (ix, s, f) = (index.clone(), source.clone(), fam.clone());
    ParamFamily::new(format!("preimage of {} under {map}", fam.tag()), source, move |r| {
        Ok(ix.preimage_family(&s, &f.at(r)?))
    })
}

/// `r -> {{f(s), g(s)} : s in Ball(r)}`
fn pair_param(tag: String, f: &Mapping, g: &Mapping) -> ParamFamily {
    let (f, g) = (f.clone(), g.clone());
    let target = f.target().clone();
    ParamFamily::new(tag, &target.clone(), move |r| {
        let b = ball(f.source(), r)?;
        let members =
            b.elements().iter().map(|s| Ok(vec![f.apply(s)?, g.apply(s)?])).collect::<Result<Vec<_>>>()?;
        Ok(crate::coarse::FiniteFamily::collect(&target, members))
    })
}

fn ensure_bounded(spec: &CoarseStructureSpec, fam: &ParamFamily, radius: usize) -> Result<()> {
    if !membership_window(spec, fam, radius)?.is_bounded() {
        return Err(Error::Precondition(format!("battery family `{}` is not bounded in {spec}", fam.tag())));
    }
    Ok(())
}

/// Images of bounded source families must be bounded in the target.
pub fn check_bornologous(m: &MapWindow, battery: &[ParamFamily], radius: usize) -> Result<Certificate> {
    let mut cert = Certificate::new("bornologous", radius);
    cert.put("map", &m.map);
    for fam in battery {
        ensure_bounded(&m.source, fam, radius)?;
        let img = image_param(&m.map, fam);
        let out = membership_window(&m.target, &img, radius)?;
        cert.expect_bounded(Finding::new(&img, &m.target, out));
    }
    Ok(cert)
}

/// Preimages of the balls `f(1).Ball(k)`, `k <= 2`, must have stabilizing
/// size inside growing source windows.
pub fn check_coarsely_proper(m: &MapWindow, radius: usize) -> Result<Certificate> {
    let mut cert = Certificate::new("coarsely-proper", radius);
    cert.put("map", &m.map);
    let (x, y) = (m.map.source(), m.map.target());
    let center = m.map.apply(&x.identity())?;
    let window = ball(x, radius)?;
    let images: Vec<Element> = window.elements().iter().map(|s| m.map.apply(s)).collect::<Result<_>>()?;
    for k in 0..=2 {
        let u: std::collections::BTreeSet<Element> =
            ball(y, k)?.elements().iter().map(|b| y.op(&center, b)).collect();
        let mut trace = Trace::default();
        let mut hits = Vec::new();
        let mut next = 0;
        for r in 0..=radius {
            let end = window.within(r).len();
            for (s, img) in window.elements()[next..end].iter().zip(&images[next..end]) {
                if u.contains(img) {
                    hits.push(s.clone());
                }
            }
            next = end;
            trace.push(r, hits.len());
        }
        let tag = format!("preimage of f(1).Ball({k})");
        let structure = m.source.to_string();
        let outcome = if trace.is_stable() {
            Membership::Bounded(Witness { structure: structure.clone(), elements: hits, trace })
        } else {
            Membership::Unbounded(Counterexample { structure: structure.clone(), family: tag.clone(), trace, elements: hits })
        };
        cert.expect_bounded(Finding { family: tag, structure, outcome });
    }
    Ok(cert)
}

/// `{{f(s), g(s)}}` must be uniformly bounded in the common target.
pub fn check_close(m1: &MapWindow, m2: &MapWindow, radius: usize) -> Result<Certificate> {
    if m1.map.source() != m2.map.source() || m1.target != m2.target {
        return Err(Error::SpaceMismatch {
            expected: format!("{} -> {}", m1.map.source(), m1.target),
            found: format!("{} -> {}", m2.map.source(), m2.target),
        });
    }
    let mut cert = Certificate::new("close", radius);
    let fam = pair_param(format!("{{{{f(s), g(s)}}}} f={} g={}", m1.map, m2.map), &m1.map, &m2.map);
    let out = membership_window(&m1.target, &fam, radius)?;
    let displacement = ball(m1.map.source(), radius)?
        .elements()
        .iter()
        .map(|s| Ok(structure_distance(&m1.target, &m1.map.apply(s)?, &m2.map.apply(s)?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    cert.put("displacement", displacement);
    cert.expect_bounded(Finding::new(&fam, &m1.target, out));
    Ok(cert)
}

/// Checks that the target window is covered and returns the preimage index.
fn covered_index(map: &Mapping, radius: usize) -> Result<PreimageIndex> {
    let reach = radius + MARGIN;
    let index = PreimageIndex::new(map, map.preimage_radius(reach).max(reach))?;
    for y in ball(map.target(), reach)?.elements() {
        if index.select(y).is_none() {
            return Err(Error::SurjectivityViolation { element: y.to_string(), radius: index.radius() });
        }
    }
    Ok(index)
}

/// Coarse-equivalence certificate for a map that is surjective on windows.
///
/// Builds the canonical selection `g` (BFS-least preimage) and checks that
/// `f` is bornologous and coarsely proper, that preimages of bounded target
/// families are bounded, that `g` is bornologous, and that `f g`, `g f` are
/// close to the identities.
pub fn surjective_equivalence_check(m: &MapWindow, radius: usize, batteries: &BatteryConfig) -> Result<Certificate> {
    let (x, y) = (m.map.source(), m.map.target());
    let index = covered_index(&m.map, radius)?;
    let reach = radius + MARGIN;

    let mut table = BTreeMap::new();
    for t in ball(y, reach)?.elements() {
        table.insert(t.clone(), index.select(t).expect("window is covered").clone());
    }
    for s in ball(x, reach)?.elements() {
        let t = m.map.apply(s)?;
        if let std::collections::btree_map::Entry::Vacant(slot) = table.entry(t) {
            let sel = index.select(slot.key()).expect("s is a preimage inside the index ball").clone();
            slot.insert(sel);
        }
    }
    let selection = Mapping::table(y, x, format!("selection of {}", m.map), table.clone())?;

    let mut cert = Certificate::new("surjective-equivalence", radius);
    cert.put("map", &m.map);
    let shown: BTreeMap<&Element, &Element> = table.iter().filter(|(t, _)| t.length() <= radius).collect();
    cert.put("selection", shown);

    let src_battery = batteries.for_spec(&m.source)?;
    let tgt_battery = batteries.for_spec(&m.target)?;
    cert.add_part(check_bornologous(m, &src_battery, radius)?);
    cert.add_part(check_coarsely_proper(m, radius)?);

    let mut pre = Certificate::new("preimages-bounded", radius);
    for fam in &tgt_battery {
        ensure_bounded(&m.target, fam, radius)?;
        let p = preimage_param(&index, x, &m.map, fam);
        let out = membership_window(&m.source, &p, radius)?;
        pre.expect_bounded(Finding::new(&p, &m.source, out));
    }
    cert.add_part(pre);

    let back = MapWindow::new(selection.clone(), m.target.clone(), m.source.clone())?;
    let mut born = check_bornologous(&back, &tgt_battery, radius)?;
    born.check = "selection-bornologous".into();
    cert.add_part(born);

    let fg = selection.clone().then(m.map.clone())?;
    let mut c1 = check_close(
        &MapWindow::new(fg, m.target.clone(), m.target.clone())?,
        &MapWindow::new(Mapping::identity(y), m.target.clone(), m.target.clone())?,
        radius,
    )?;
    c1.check = "close(f.g, id)".into();
    let gf = m.map.clone().then(selection)?;
    let mut c2 = check_close(
        &MapWindow::new(gf, m.source.clone(), m.source.clone())?,
        &MapWindow::new(Mapping::identity(x), m.source.clone(), m.source.clone())?,
        radius,
    )?;
    c2.check = "close(g.f, id)".into();
    let disp = |c: &Certificate| c.get("displacement").cloned().unwrap_or_default();
    cert.put("displacement", BTreeMap::from([("f.g", disp(&c1)), ("g.f", disp(&c2))]));
    cert.add_part(c1);
    cert.add_part(c2);
    Ok(cert)
}

/// Compares two structures on the same target through a surjective map:
/// every battery family of one structure is pulled back, pushed forward
/// again (which must return it unchanged) and tested in the other.
pub fn pullback_structure_equality(
    map: &Mapping,
    spec1: &CoarseStructureSpec,
    spec2: &CoarseStructureSpec,
    radius: usize,
    batteries: &BatteryConfig,
) -> Result<Certificate> {
    for spec in [spec1, spec2] {
        if spec.space() != map.target() {
            return Err(Error::SpaceMismatch { expected: map.target().to_string(), found: spec.space().to_string() });
        }
    }
    let index = covered_index(map, radius)?;
    let mut cert = Certificate::new("pullback-equality", radius);
    cert.put("map", map);
    for (a, b) in [(spec1, spec2), (spec2, spec1)] {
        let pulled = CoarseStructureSpec::pullback(map, b.clone())?;
        for fam in batteries.for_spec(a)? {
            ensure_bounded(a, &fam, radius)?;
            for r in 0..=radius {
                let f = fam.at(r)?;
                let back = map.image_family(&index.preimage_family(map.source(), &f))?;
                if back != f {
                    return Err(Error::Precondition(format!(
                        "f(f^-1(B)) differs from B for `{}` at radius {r}",
                        fam.tag()
                    )));
                }
            }
            let p = preimage_param(&index, map.source(), map, &fam);
            let out = membership_window(&pulled, &p, radius)?;
            if !out.is_bounded() && cert.pass {
                cert.put("separating-family", fam.tag());
            }
            cert.expect_bounded(Finding::new(&p, &pulled, out));
        }
    }
    Ok(cert)
}

/// EQUAL when every battery family of either structure is bounded in both.
pub fn compare_structures(
    spec1: &CoarseStructureSpec,
    spec2: &CoarseStructureSpec,
    battery: &[ParamFamily],
    radius: usize,
) -> Result<Certificate> {
    if spec1.space() != spec2.space() {
        return Err(Error::SpaceMismatch { expected: spec1.space().to_string(), found: spec2.space().to_string() });
    }
    let mut cert = Certificate::new("compare-structures", radius);
    for fam in battery {
        let a = membership_window(spec1, fam, radius)?;
        let b = membership_window(spec2, fam, radius)?;
        if a.is_bounded() != b.is_bounded() && cert.pass {
            cert.put("separating-family", fam.tag());
            cert.pass = false;
        }
        cert.findings.push(Finding::new(fam, spec1, a));
        cert.findings.push(Finding::new(fam, spec2, b));
    }
    Ok(cert)
}
