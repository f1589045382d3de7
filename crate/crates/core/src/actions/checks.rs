use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::action::ActionSpec;
use crate::battery::BatteryConfig;
use crate::cert::{Certificate, Finding};
use crate::coarse::{
    compose_controlled, controlled_to_family, family_to_controlled, membership_window, refines, star_family,
    CoarseStructureSpec, ControlledSet, FiniteFamily, ParamFamily, Trace,
};
use crate::error::{Error, Result};
use crate::group::{ball, Element, GroupSpec};
use crate::maps::{
    check_bornologous, check_close, check_coarsely_proper, surjective_equivalence_check, MapWindow, Mapping, MARGIN,
};

/// Largest mesh the cobounded search may give its bounded set.
pub const DEFAULT_MESH_CAP: usize = 4;

/// Radius of the family sample whose `E o E o E o E` is translated.
pub const CONTROLLED_SAMPLE: usize = 2;

/// A window set with its size at every radius.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetTrace {
    pub elements: Vec<Element>,
    pub trace: Trace,
    pub stable: bool,
}

fn group_elements_where(
    group: &GroupSpec,
    radius: usize,
    mut keep: impl FnMut(&Element) -> bool,
) -> Result<SetTrace> {
    let b = ball(group, radius)?;
    let mut elements = Vec::new();
    let mut trace = Trace::default();
    for r in 0..=radius {
        elements.extend(b.layer(r).iter().filter(|g| keep(g)).cloned());
        trace.push(r, elements.len());
    }
    let stable = trace.is_stable();
    Ok(SetTrace { elements, trace, stable })
}

/// `{g in Ball(R) : U meets g.U}`
pub fn stabilizer_window(a: &ActionSpec, u: &[Element], radius: usize) -> Result<SetTrace> {
    let set: BTreeSet<&Element> = u.iter().collect();
    group_elements_where(a.group(), radius, |g| u.iter().any(|p| set.contains(&a.act(g, p))))
}

/// `{g in Ball(R) : x in g.U}`
pub fn point_finite_check(a: &ActionSpec, u: &[Element], x: &Element, radius: usize) -> Result<SetTrace> {
    group_elements_where(a.group(), radius, |g| u.iter().any(|p| &a.act(g, p) == x))
}

/// Largest distance `|u^-1 v|` between points of a set.
pub fn mesh(space: &GroupSpec, set: &[Element]) -> usize {
    set.iter()
        .flat_map(|u| set.iter().map(move |v| space.left_quotient(u, v).length()))
        .max()
        .unwrap_or(0)
}

fn translated_family(a: &ActionSpec, fam: &ParamFamily) -> ParamFamily {
    let (act, f) = (a.clone(), fam.clone());
    ParamFamily::new(format!("G.({})", fam.tag()), a.space(), move |r| {
        let base = f.at(r)?;
        let b = ball(act.group(), r)?;
        let members = b
            .elements()
            .iter()
            .flat_map(|g| base.members().iter().map(|m| act.act_on_set(g, m)).collect::<Vec<_>>());
        Ok(FiniteFamily::collect(act.space(), members.collect::<Vec<_>>()))
    })
}

fn translated_controlled(a: &ActionSpec, fam: &ParamFamily) -> ParamFamily {
    let (act, f) = (a.clone(), fam.clone());
    ParamFamily::new(format!("G.(E o E o E o E) for {}", fam.tag()), a.space(), move |r| {
        let e = family_to_controlled(&f.at(r.min(CONTROLLED_SAMPLE))?);
        let e2 = compose_controlled(&e, &e)?;
        let e4 = compose_controlled(&e2, &e2)?;
        let b = ball(act.group(), r)?;
        let pairs = b.elements().iter().flat_map(|g| {
            let act = &act;
            e4.pairs().iter().map(move |(x, y)| (act.act(g, x), act.act(g, y)))
        });
        Ok(controlled_to_family(&ControlledSet::new(act.space(), pairs.collect::<Vec<_>>())))
    })
}

/// The action is by uniformly bornologous maps when `G.B` is bounded for
/// every bounded family `B`. Both the family route and the controlled-set
/// route (`E o E o E o E` for `E` the sample at radius
/// [`CONTROLLED_SAMPLE`], translated by `G`) are evaluated over the whole
/// battery and their verdicts must agree.
pub fn uniformly_bornologous_action_check(
    a: &ActionSpec,
    spec: &CoarseStructureSpec,
    battery: &[ParamFamily],
    radius: usize,
) -> Result<Certificate> {
    if spec.space() != a.space() {
        return Err(Error::SpaceMismatch { expected: a.space().to_string(), found: spec.space().to_string() });
    }
    let mut cert = Certificate::new("uniformly-bornologous", radius);
    cert.put("action", a);
    let mut routes = [true; 2];
    for fam in battery {
        if !membership_window(spec, fam, radius)?.is_bounded() {
            return Err(Error::Precondition(format!("battery family `{}` is not bounded in {spec}", fam.tag())));
        }
        let direct = translated_family(a, fam);
        let d = membership_window(spec, &direct, radius)?;
        let controlled = translated_controlled(a, fam);
        let c = membership_window(spec, &controlled, radius)?;
        routes[0] &= d.is_bounded();
        routes[1] &= c.is_bounded();
        cert.expect_bounded(Finding::new(&direct, spec, d));
        cert.expect_bounded(Finding::new(&controlled, spec, c));
    }
    cert.put("family-route", routes[0]);
    cert.put("controlled-route", routes[1]);
    if routes[0] != routes[1] {
        cert.fail("the family and controlled routes reach different verdicts");
    }
    Ok(cert)
}

struct CoverSearch {
    bounded: Vec<Element>,
    mesh: usize,
    constant: usize,
    uncovered: Option<Element>,
}

fn cover_search(a: &ActionSpec, x0: &Element, radius: usize, mesh_cap: usize) -> Result<CoverSearch> {
    let space = a.space();
    let window = ball(space, radius)?;
    let mut u = vec![x0.clone()];
    for y in window.elements() {
        if a.carriers(y, &u, radius)?.is_empty() {
            u.push(y.clone());
            u.sort();
            if mesh(space, &u) > mesh_cap {
                return Ok(CoverSearch { mesh: mesh(space, &u), bounded: u, constant: 0, uncovered: Some(y.clone()) });
            }
        }
    }
    let mut constant = 0;
    for y in window.elements() {
        let k = a.carriers(y, &u, radius)?.into_iter().next().expect("window is covered");
        constant = constant.max(k.length().saturating_sub(y.length()));
    }
    Ok(CoverSearch { mesh: mesh(space, &u), bounded: u, constant, uncovered: None })
}

/// Greedy search for `U` with `Ball(r) <= Ball(r + c).U`: start from the
/// base point and add the least uncovered point while the mesh allows it.
pub fn cobounded_check(a: &ActionSpec, radius: usize, mesh_cap: usize) -> Result<Certificate> {
    cobounded_from(a, &a.space().identity(), radius, mesh_cap).map(|(c, _)| c)
}

fn cobounded_from(
    a: &ActionSpec,
    x0: &Element,
    radius: usize,
    mesh_cap: usize,
) -> Result<(Certificate, Vec<Element>)> {
    let s = cover_search(a, x0, radius, mesh_cap)?;
    let mut cert = Certificate::new("cobounded", radius);
    cert.put("action", a);
    cert.put("U", &s.bounded);
    cert.put("mesh", s.mesh);
    cert.put("mesh-cap", mesh_cap);
    if let Some(y) = &s.uncovered {
        cert.fail(format!("covering {y} pushes the mesh of U past {mesh_cap}"));
    } else {
        cert.put("c", s.constant);
    }
    Ok((cert, s.bounded))
}

/// The structure on the space making the orbit map `g -> g.x0` a coarse
/// equivalence from the left structure of the group.
pub fn induced_structure_first(
    a: &ActionSpec,
    x0: &Element,
    radius: usize,
    batteries: &BatteryConfig,
) -> Result<(CoarseStructureSpec, Certificate)> {
    a.space().validate(x0)?;
    let stab = stabilizer_window(a, std::slice::from_ref(x0), radius)?;
    if !stab.stable {
        return Err(Error::Precondition(format!("the stabilizer of {x0} is infinite (trace {})", stab.trace)));
    }
    for y in ball(a.space(), radius + MARGIN)?.elements() {
        if a.carriers(y, std::slice::from_ref(x0), radius + MARGIN)?.is_empty() {
            return Err(Error::Precondition(format!("the action is not transitive: {y} is not in G.{x0}")));
        }
    }
    let orbit = Mapping::orbit(a, x0)?;
    let left = CoarseStructureSpec::LeftGroup(a.group().clone());
    let spec = CoarseStructureSpec::transported(&orbit, left.clone())?;
    let mut cert = surjective_equivalence_check(&MapWindow::new(orbit, left, spec.clone())?, radius, batteries)?;
    cert.check = "induced-structure-first".into();
    cert.put("stabilizer", &stab);
    Ok((spec, cert))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InducedStructure {
    pub action: ActionSpec,
    pub bounded: Vec<Element>,
    pub spec: CoarseStructureSpec,
    pub stabilizer: SetTrace,
}

/// The structure whose uniformly bounded families are those refining
/// `{g.V}` for `V` a finite union of translates of `U`.
pub fn induced_structure_second(a: &ActionSpec, u: &[Element], radius: usize) -> Result<InducedStructure> {
    let spec = CoarseStructureSpec::action_induced(a, u)?;
    for y in ball(a.space(), radius)?.elements() {
        if a.carriers(y, u, radius)?.is_empty() {
            return Err(Error::Precondition(format!("G.U misses {y}")));
        }
    }
    let stabilizer = stabilizer_window(a, u, radius)?;
    if !stabilizer.stable {
        return Err(Error::Precondition(format!("{{g : U meets g.U}} keeps growing (trace {})", stabilizer.trace)));
    }
    let CoarseStructureSpec::ActionInduced { bounded, .. } = &spec else { unreachable!() };
    Ok(InducedStructure { action: a.clone(), bounded: bounded.clone(), spec, stabilizer })
}

/// Whether every window `Ball(r)` of the space is bounded in both structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AgreementPolicy {
    /// Both structures must produce a finite witness.
    Plain,
    /// Also require the witness meshes to differ by at most `slack`.
    MeshWeighted { slack: usize },
}

pub fn bounded_sets_agree(
    s1: &CoarseStructureSpec,
    s2: &CoarseStructureSpec,
    radius: usize,
    policy: AgreementPolicy,
) -> Result<Certificate> {
    if s1.space() != s2.space() {
        return Err(Error::SpaceMismatch { expected: s1.space().to_string(), found: s2.space().to_string() });
    }
    let mut cert = Certificate::new("bounded-sets-agree", radius);
    cert.put("policy", policy);
    let window = ball(s1.space(), radius)?;
    let (mut t1, mut t2) = (Trace::default(), Trace::default());
    for r in 0..=radius {
        let fam = FiniteFamily::collect(s1.space(), [window.within(r).to_vec()]);
        let mut meshes = [0; 2];
        for (i, (s, t)) in [(s1, &mut t1), (s2, &mut t2)].into_iter().enumerate() {
            match s.witness_set(&fam, r) {
                Ok(w) => {
                    meshes[i] = w.iter().map(Element::length).max().unwrap_or(0);
                    t.push(r, w.len());
                }
                Err(e @ Error::Precondition(_)) => {
                    cert.fail(format!("Ball({r}) is not bounded in {s}: {e}"));
                }
                Err(e) => return Err(e),
            }
        }
        if let AgreementPolicy::MeshWeighted { slack } = policy {
            if meshes[0].abs_diff(meshes[1]) > slack {
                cert.fail(format!("witness meshes {} and {} differ by more than {slack} at radius {r}", meshes[0], meshes[1]));
            }
        }
    }
    cert.put("traces", BTreeMap::from([(s1.to_string(), t1), (s2.to_string(), t2)]));
    Ok(cert)
}

/// Coarsely proper, cobounded and uniformly bornologous, plus the orbit-map
/// equivalence and the refinement of bounded families by `{g.F.U}`.
pub fn coarse_action_certificate(
    a: &ActionSpec,
    spec: &CoarseStructureSpec,
    x0: &Element,
    radius: usize,
    batteries: &BatteryConfig,
) -> Result<Certificate> {
    a.space().validate(x0)?;
    let mut cert = Certificate::new("coarse-action", radius);
    cert.put("action", a);
    cert.put("structure", spec);

    let (cob, u) = cobounded_from(a, x0, radius, DEFAULT_MESH_CAP)?;
    let covered = cob.pass;
    cert.add_part(cob);

    let mut proper = Certificate::new("coarsely-proper-action", radius);
    let stab = stabilizer_window(a, &u, radius)?;
    let point = point_finite_check(a, &u, x0, radius)?;
    if !stab.stable {
        proper.fail(format!("{{g : U meets g.U}} grows: {}", stab.trace));
    }
    if !point.stable {
        proper.fail(format!("{{g : x0 in g.U}} grows: {}", point.trace));
    }
    proper.put("stabilizer", &stab);
    proper.put("point-finite", &point);
    cert.add_part(proper);

    let battery = batteries.for_spec(spec)?;
    cert.add_part(uniformly_bornologous_action_check(a, spec, &battery, radius)?);
    if !cert.pass || !covered {
        return Ok(cert);
    }

    let left = CoarseStructureSpec::LeftGroup(a.group().clone());
    let orbit = Mapping::orbit(a, x0)?;
    let orbit_window = MapWindow::new(orbit.clone(), left.clone(), spec.clone())?;
    let transitive = ball(a.space(), radius + MARGIN)?
        .elements()
        .iter()
        .map(|y| a.carriers(y, std::slice::from_ref(x0), radius + MARGIN).map(|k| !k.is_empty()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|b| b);
    if transitive {
        let mut eq = surjective_equivalence_check(&orbit_window, radius, batteries)?;
        eq.check = "orbit-map-equivalence".into();
        cert.add_part(eq);
    } else {
        cert.add_part(orbit_equivalence_via_carriers(a, spec, &orbit_window, &u, radius, batteries)?);
    }
    cert.add_part(orbit_cover_refinement(a, &u, &battery, radius)?);
    Ok(cert)
}

/// Coarse equivalence of a non-surjective orbit map, with the least carrier
/// of each point as coarse inverse.
fn orbit_equivalence_via_carriers(
    a: &ActionSpec,
    spec: &CoarseStructureSpec,
    orbit_window: &MapWindow,
    u: &[Element],
    radius: usize,
    batteries: &BatteryConfig,
) -> Result<Certificate> {
    let left = orbit_window.source.clone();
    let (g, x) = (a.group(), a.space());
    let inverse = Mapping::carrier(a, u, 2 * (radius + MARGIN))?;
    let back = MapWindow::new(inverse.clone(), spec.clone(), left.clone())?;
    let mut cert = Certificate::new("orbit-map-equivalence", radius);
    cert.note("orbit map is not onto; the least carrier of each point is used as coarse inverse");
    let shown: BTreeMap<Element, Element> = inverse.tabulate(radius)?;
    cert.put("coarse-inverse", shown);

    cert.add_part(check_bornologous(orbit_window, &batteries.for_spec(&left)?, radius)?);
    let mut inv_born = check_bornologous(&back, &batteries.for_spec(spec)?, radius)?;
    inv_born.check = "inverse-bornologous".into();
    cert.add_part(inv_born);
    cert.add_part(check_coarsely_proper(orbit_window, radius)?);
    let mut inv_proper = check_coarsely_proper(&back, radius)?;
    inv_proper.check = "inverse-coarsely-proper".into();
    cert.add_part(inv_proper);

    let there = orbit_window.map.clone().then(inverse.clone())?;
    let mut c1 =
        check_close(&MapWindow::new(there, left.clone(), left.clone())?, &MapWindow::left(Mapping::identity(g)), radius)?;
    c1.check = "close(inverse.orbit, id)".into();
    let back_again = inverse.then(orbit_window.map.clone())?;
    let mut c2 = check_close(
        &MapWindow::new(back_again, spec.clone(), spec.clone())?,
        &MapWindow::new(Mapping::identity(x), spec.clone(), spec.clone())?,
        radius,
    )?;
    c2.check = "close(orbit.inverse, id)".into();
    let disp = |c: &Certificate| c.get("displacement").cloned().unwrap_or_default();
    cert.put("displacement", BTreeMap::from([("inverse.orbit", disp(&c1)), ("orbit.inverse", disp(&c2))]));
    cert.add_part(c1);
    cert.add_part(c2);
    Ok(cert)
}

/// Every bounded battery family refines `{k.F.U}` where `F` is its witness
/// in the structure induced by `U`.
fn orbit_cover_refinement(a: &ActionSpec, u: &[Element], battery: &[ParamFamily], radius: usize) -> Result<Certificate> {
    let induced = CoarseStructureSpec::action_induced(a, u)?;
    let mut cert = Certificate::new("refines-orbit-cover", radius);
    for fam in battery {
        let out = membership_window(&induced, fam, radius)?;
        let f = fam.at(radius)?;
        let w = induced.witness_set(&f, radius)?;
        let fu: Vec<Element> = w.iter().flat_map(|k| a.act_on_set(k, u)).collect::<BTreeSet<_>>().into_iter().collect();
        let mut cover = Vec::new();
        for m in f.members().iter().filter(|m| m.len() > 1) {
            let k = a.carriers(&m[0], u, radius + m[0].length() + 1)?.into_iter().next();
            let k = k.ok_or_else(|| Error::Precondition(format!("{} is not covered by G.U", m[0])))?;
            cover.push(a.act_on_set(&k, &fu));
        }
        let cover = FiniteFamily::collect(a.space(), cover);
        let r = refines(&f, &cover, true);
        if !r.holds {
            cert.fail(format!("`{}` does not refine {{k.F.U}} at {:?}", fam.tag(), r.failure));
        }
        cert.expect_bounded(Finding::new(fam, &induced, out));
    }
    Ok(cert)
}

/// Two commuting actions on one space with a common bounded `U`: builds
/// `psi(h)` = least `g1` with `h^-1.x0 in g1.U` and `phi` symmetrically,
/// then certifies both are coarse equivalences inverse to each other.
pub fn commuting_equivalence(
    a1: &ActionSpec,
    a2: &ActionSpec,
    u: &[Element],
    x0: &Element,
    radius: usize,
    batteries: &BatteryConfig,
) -> Result<Certificate> {
    if a1.space() != a2.space() {
        return Err(Error::SpaceMismatch { expected: a1.space().to_string(), found: a2.space().to_string() });
    }
    let (g1, g2, x) = (a1.group(), a2.group(), a1.space());
    let b1 = ball(g1, 3)?;
    let b2 = ball(g2, 3)?;
    for p in ball(x, 3)?.elements() {
        for g in b1.elements() {
            for h in b2.elements() {
                if a1.act(g, &a2.act(h, p)) != a2.act(h, &a1.act(g, p)) {
                    return Err(Error::CommutativityViolation { g: g.to_string(), h: h.to_string(), x: p.to_string() });
                }
            }
        }
    }
    let s1 = CoarseStructureSpec::action_induced(a1, u)?;
    let s2 = CoarseStructureSpec::action_induced(a2, u)?;
    let mut cert = Certificate::new("commuting-equivalence", radius);
    cert.put("left", a1);
    cert.put("right", a2);
    cert.put("U", u);
    cert.put("x0", x0);
    let mut c1 = coarse_action_certificate(a1, &s1, x0, radius, batteries)?;
    c1.check = "coarse-action-1".into();
    let mut c2 = coarse_action_certificate(a2, &s2, x0, radius, batteries)?;
    c2.check = "coarse-action-2".into();
    cert.add_part(c1);
    cert.add_part(c2);
    cert.add_part(bounded_sets_agree(&s1, &s2, radius, AgreementPolicy::Plain)?);

    let search = 2 * (radius + MARGIN) + mesh(x, u);
    let psi = Mapping::co_orbit(a2, x0)?.then(Mapping::carrier(a1, u, search)?)?;
    let phi = Mapping::co_orbit(a1, x0)?.then(Mapping::carrier(a2, u, search)?)?;
    cert.put("psi", psi.tabulate(radius)?);
    cert.put("phi", phi.tabulate(radius)?);

    let l1 = CoarseStructureSpec::LeftGroup(g1.clone());
    let l2 = CoarseStructureSpec::LeftGroup(g2.clone());
    let mut pb = check_bornologous(&MapWindow::new(psi.clone(), l2.clone(), l1.clone())?, &batteries.for_spec(&l2)?, radius)?;
    pb.check = "psi-bornologous".into();
    cert.add_part(pb);
    let mut fb = check_bornologous(&MapWindow::new(phi.clone(), l1.clone(), l2.clone())?, &batteries.for_spec(&l1)?, radius)?;
    fb.check = "phi-bornologous".into();
    cert.add_part(fb);

    let psi_phi = phi.clone().then(psi.clone())?;
    let phi_psi = psi.then(phi)?;
    let mut k1 = check_close(&MapWindow::left(psi_phi.clone()), &MapWindow::left(Mapping::identity(g1)), radius)?;
    k1.check = "close(psi.phi, id)".into();
    let mut k2 = check_close(&MapWindow::left(phi_psi.clone()), &MapWindow::left(Mapping::identity(g2)), radius)?;
    k2.check = "close(phi.psi, id)".into();
    cert.add_part(k1);
    cert.add_part(k2);

    cert.add_part(star_bound(a1, &psi_phi, u, x0, radius, "psi.phi")?);
    cert.add_part(star_bound(a2, &phi_psi, u, x0, radius, "phi.psi")?);
    Ok(cert)
}

/// `{{g.x0, s(g).x0}}` must refine `St({g.U}, {g.U})`.
fn star_bound(a: &ActionSpec, s: &Mapping, u: &[Element], x0: &Element, radius: usize, name: &str) -> Result<Certificate> {
    let mut cert = Certificate::new(format!("star-refinement({name})"), radius);
    let window = ball(a.group(), radius)?;
    let pairs = window
        .elements()
        .iter()
        .map(|g| Ok(vec![a.act(g, x0), a.act(&s.apply(g)?, x0)]))
        .collect::<Result<Vec<_>>>()?;
    let pairs = FiniteFamily::collect(a.space(), pairs);
    let translates = ball(a.group(), radius + MARGIN)?;
    let cover = FiniteFamily::collect(a.space(), translates.elements().iter().map(|g| a.act_on_set(g, u)));
    let star = star_family(&cover, &cover)?;
    let r = refines(&pairs, &star, true);
    if !r.holds {
        cert.fail(format!("{:?} lies in no member of St({{g.U}}, {{g.U}})", r.failure));
    }
    cert.put("nontrivial-pairs", pairs.members().iter().filter(|m| m.len() > 1).count());
    Ok(cert)
}
