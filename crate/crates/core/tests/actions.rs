mod common;

use std::collections::BTreeSet;

use coarsekit::actions::{
    bounded_sets_agree, cobounded_check, coarse_action_certificate, commuting_equivalence, induced_structure_first,
    induced_structure_second, parse_action, point_finite_check, stabilizer_window, uniformly_bornologous_action_check,
    ActionSpec, AgreementPolicy, DEFAULT_MESH_CAP,
};
use coarsekit::battery::{edge_family, left_multiples, left_translates, right_multiples, BatteryConfig};
use coarsekit::coarse::{membership_window, CoarseStructureSpec, FiniteFamily, ParamFamily, Side};
use coarsekit::group::{ball, Element, GroupSpec};
use coarsekit::Error;
use common::*;

fn quick() -> BatteryConfig {
    BatteryConfig { seed: 9, random: 4 }
}

fn inclusion_action() -> ActionSpec {
    parse_action("left(Z->DihInf via x^n)").unwrap()
}

fn dih(text: &str) -> Element {
    GroupSpec::dihedral().parse_element(text).unwrap()
}

#[test]
fn stabilizers_and_point_counts() {
    let d = GroupSpec::dihedral();
    let s = stabilizer_window(&ActionSpec::left(&d), &[d.identity()], 8).unwrap();
    assert!(s.stable);
    assert_eq!(s.elements, [d.identity()]);

    let i = inclusion_action();
    let s = stabilizer_window(&i, &[dih("1"), dih("t")], 8).unwrap();
    assert_eq!(s.elements, [z(0)]);
    assert!(s.trace.sizes().iter().all(|&n| n == 1));

    let zz = GroupSpec::integers();
    let trivial = ActionSpec::trivial(&zz, &zz);
    let s = stabilizer_window(&trivial, &[z(0)], 8).unwrap();
    assert_eq!(s.trace.sizes(), (0..=8).map(|r| 2 * r + 1).collect::<Vec<_>>());
    assert!(!s.stable);

    let p = point_finite_check(&ActionSpec::left(&zz), &[z(0), z(1)], &z(0), 8).unwrap();
    assert!(p.stable);
    assert_eq!(p.elements.len(), 2);
    let p = point_finite_check(&trivial, &[z(0)], &z(0), 8).unwrap();
    assert!(!p.stable);
    assert_eq!(p.trace.sizes(), (0..=8).map(|r| 2 * r + 1).collect::<Vec<_>>());
    let p = point_finite_check(&i, &[dih("1"), dih("t")], &dih("t"), 8).unwrap();
    assert!(p.stable);
    assert_eq!(p.elements, [z(0)]);
}

#[test]
fn uniformly_bornologous_examples() {
    for g in [GroupSpec::integers(), GroupSpec::dihedral(), GroupSpec::free_abelian(2).unwrap()] {
        let cl = CoarseStructureSpec::side(Side::Left, &g);
        let battery = quick().for_spec(&cl).unwrap();
        let cert = uniformly_bornologous_action_check(&ActionSpec::left(&g), &cl, &battery, 6).unwrap();
        assert!(cert.pass, "{g}");
        assert_eq!(cert.get("family-route"), cert.get("controlled-route"));
        // translating by the group leaves the left witness as it was
        let edges = membership_window(&cl, &edge_family(Side::Left, &g), 6).unwrap();
        let moved = cert.finding(&format!("{{g.B}} B in {}", edge_family(Side::Left, &g).tag()));
        if let Some(f) = moved {
            assert_eq!(f.outcome.elements(), edges.elements());
        }
    }

    let d = GroupSpec::dihedral();
    let cr = CoarseStructureSpec::side(Side::Right, &d);
    let single = FiniteFamily::new(&d, [vec![dih("1"), dih("t")]]).unwrap();
    let battery = [ParamFamily::constant("{{1,t}}", single)];
    let cert = uniformly_bornologous_action_check(&ActionSpec::left(&d), &cr, &battery, 8).unwrap();
    assert!(!cert.pass);
    let fail = cert.first_failure().unwrap();
    assert!(fail.outcome.trace().is_growing());
    // {g t g^-1} over Ball(8)
    let oracle: BTreeSet<Element> =
        ball(&d, 8).unwrap().elements().iter().flat_map(|g| [d.identity(), d.op(&d.op(g, &dih("t")), &d.inv(g))]).collect();
    assert_eq!(fail.outcome.elements().iter().cloned().collect::<BTreeSet<_>>(), oracle);

    // right translations are uniformly bornologous for the right structure
    let battery = quick().for_spec(&cr).unwrap();
    assert!(uniformly_bornologous_action_check(&ActionSpec::right(&d), &cr, &battery, 6).unwrap().pass);
    let cl = CoarseStructureSpec::side(Side::Left, &d);
    assert!(matches!(
        uniformly_bornologous_action_check(&ActionSpec::left(&GroupSpec::integers()), &cl, &battery, 4),
        Err(Error::SpaceMismatch { .. })
    ));
}

#[test]
fn cobounded_examples() {
    let zz = GroupSpec::integers();
    let cert = cobounded_check(&ActionSpec::left(&zz), 8, DEFAULT_MESH_CAP).unwrap();
    assert!(cert.pass);
    assert_eq!(cert.get("U").unwrap(), &serde_json::json!(["0"]));
    assert_eq!(cert.get("c").unwrap(), 0);

    let cert = cobounded_check(&inclusion_action(), 8, DEFAULT_MESH_CAP).unwrap();
    assert!(cert.pass);
    assert_eq!(cert.get("U").unwrap(), &serde_json::json!(["1", "t"]));
    assert!(cert.get("c").unwrap().as_u64().unwrap() <= 1);
    // Dih = <x> u <x>t: every w is x^n or x^n t, so w lies in n.U with |n| <= |w|
    for w in ball(&GroupSpec::dihedral(), 8).unwrap().elements() {
        let Element::Dihedral { shift, .. } = w else { unreachable!() };
        assert!(shift.unsigned_abs() as usize <= w.length());
    }

    let cert = cobounded_check(&ActionSpec::trivial(&zz, &zz), 8, DEFAULT_MESH_CAP).unwrap();
    assert!(!cert.pass);
    assert!(cert.get("c").is_none());
}

#[test]
fn induced_structures() {
    let zz = GroupSpec::integers();
    let (spec, cert) = induced_structure_first(&ActionSpec::left(&zz), &z(0), 6, &quick()).unwrap();
    assert!(cert.pass);
    let edges = left_translates(&zz, &[z(0), z(1)]);
    let far = left_translates(&zz, &[z(0), z(3)]);
    for fam in [&edges, &far] {
        let a = membership_window(&spec, fam, 6).unwrap();
        let b = membership_window(&CoarseStructureSpec::LeftGroup(zz.clone()), fam, 6).unwrap();
        assert_eq!(a.is_bounded(), b.is_bounded());
    }
    let d = GroupSpec::dihedral();
    let (_, cert) = induced_structure_first(&ActionSpec::left(&d), &d.identity(), 6, &quick()).unwrap();
    assert!(cert.pass);
    let one = GroupSpec::trivial();
    let point = ActionSpec::trivial(&zz, &one);
    assert!(matches!(induced_structure_first(&point, &one.identity(), 6, &quick()), Err(Error::Precondition(_))));
    assert!(matches!(
        induced_structure_first(&inclusion_action(), &d.identity(), 6, &quick()),
        Err(Error::Precondition(_))
    ));

    let second = induced_structure_second(&ActionSpec::left(&zz), &[z(0)], 8).unwrap();
    let cl = CoarseStructureSpec::LeftGroup(zz.clone());
    for fam in quick().for_spec(&cl).unwrap().iter().chain([&edges, &far]) {
        assert_eq!(
            membership_window(&second.spec, fam, 8).unwrap().is_bounded(),
            membership_window(&cl, fam, 8).unwrap().is_bounded(),
            "{}",
            fam.tag()
        );
    }

    let i = induced_structure_second(&inclusion_action(), &[dih("1"), dih("t")], 8).unwrap();
    let t = dih("t");
    assert!(membership_window(&i.spec, &right_multiples(&d, &t), 8).unwrap().is_bounded());
    assert!(!membership_window(&i.spec, &left_multiples(&d, &t), 8).unwrap().is_bounded());
    assert!(matches!(
        induced_structure_second(&ActionSpec::trivial(&zz, &zz), &[z(0)], 6),
        Err(Error::Precondition(_))
    ));
}

/// The two structures on `DihInf` coming from `x^n` acting on the left and
/// the right have the same bounded sets but disagree on `{{g, t.g}}`.
#[test]
fn two_structures_on_the_dihedral_group() {
    let u = [dih("1"), dih("t")];
    let left = induced_structure_second(&inclusion_action(), &u, 8).unwrap();
    let right = induced_structure_second(&parse_action("right(Z->DihInf via x^n)").unwrap(), &u, 8).unwrap();
    let agree = bounded_sets_agree(&left.spec, &right.spec, 8, AgreementPolicy::Plain).unwrap();
    assert!(agree.pass);
    let weighted = bounded_sets_agree(&left.spec, &right.spec, 8, AgreementPolicy::MeshWeighted { slack: 1 }).unwrap();
    assert!(weighted.pass);
    let fam = left_multiples(&GroupSpec::dihedral(), &dih("t"));
    let a = membership_window(&left.spec, &fam, 8).unwrap();
    let b = membership_window(&right.spec, &fam, 8).unwrap();
    assert_ne!(a.is_bounded(), b.is_bounded());
}

#[test]
fn coarse_action_examples() {
    let d = GroupSpec::dihedral();
    let cl = CoarseStructureSpec::LeftGroup(d.clone());
    let cert = coarse_action_certificate(&ActionSpec::left(&d), &cl, &d.identity(), 6, &quick()).unwrap();
    assert!(cert.pass);
    let eq = cert.part("orbit-map-equivalence").unwrap();
    for (y, x) in eq.get("selection").unwrap().as_object().unwrap() {
        assert_eq!(y, x.as_str().unwrap());
    }

    let cert = coarse_action_certificate(&inclusion_action(), &cl, &d.identity(), 6, &quick()).unwrap();
    assert!(cert.pass, "{cert:#?}");
    let eq = cert.part("orbit-map-equivalence").unwrap();
    assert!(eq.get("displacement").unwrap()["orbit.inverse"].as_u64().unwrap() <= 1);
    assert_eq!(eq.get("displacement").unwrap()["inverse.orbit"], 0);
    for (w, n) in eq.get("coarse-inverse").unwrap().as_object().unwrap() {
        let Element::Dihedral { shift, .. } = d.parse_element(w).unwrap() else { unreachable!() };
        assert_eq!(n.as_str().unwrap().parse::<i64>().unwrap(), shift);
    }

    let zz = GroupSpec::integers();
    let cert =
        coarse_action_certificate(&ActionSpec::trivial(&zz, &zz), &CoarseStructureSpec::LeftGroup(zz.clone()), &z(0), 6, &quick())
            .unwrap();
    assert!(!cert.pass);
    assert!(!cert.part("coarsely-proper-action").unwrap().pass);
    assert!(cert.part("orbit-map-equivalence").is_none());
}

#[test]
fn commuting_examples() {
    let d = GroupSpec::dihedral();
    let u = [dih("1"), dih("t")];
    let right = ActionSpec::right(&d);
    for r in [4, 8] {
        let cert = commuting_equivalence(&inclusion_action(), &right, &u, &d.identity(), r, &quick()).unwrap();
        assert!(cert.pass, "R={r}");
        for part in ["star-refinement(psi.phi)", "star-refinement(phi.psi)", "close(psi.phi, id)", "close(phi.psi, id)"] {
            assert!(cert.part(part).unwrap().pass, "{part}");
        }
    }

    let zz = GroupSpec::integers();
    let cert = commuting_equivalence(&ActionSpec::left(&zz), &ActionSpec::right(&zz), &[z(0)], &z(0), 6, &quick())
        .unwrap();
    assert!(cert.pass);
    let psi = cert.get("psi").unwrap().as_object().unwrap();
    let phi = cert.get("phi").unwrap().as_object().unwrap();
    for (h, g) in psi {
        // h^-1 . 0 = 0 + h for the right action written on the left
        assert_eq!(h, g.as_str().unwrap());
        assert_eq!(phi[g.as_str().unwrap()].as_str().unwrap(), h);
    }

    let one = GroupSpec::trivial();
    let point = ActionSpec::left(&one);
    let cert = commuting_equivalence(&point, &point, &[one.identity()], &one.identity(), 4, &quick()).unwrap();
    assert!(cert.pass);

    let e = commuting_equivalence(&ActionSpec::left(&d), &ActionSpec::left(&d), &u, &d.identity(), 4, &quick());
    assert!(matches!(e, Err(Error::CommutativityViolation { .. })));
}

const ACTIONS: [&str; 9] = [
    "left(Z)",
    "right(Z)",
    "left(DihInf)",
    "right(DihInf)",
    "left(Z->DihInf via x^n)",
    "right(Z->DihInf via x^n)",
    "trivial(Z on Z)",
    "left(Z^2)",
    "left(product(Z,Zmod(3)))",
];

/// `r -> {U_a(B) : a in A, A in fam_G(r)}`, `U_a(B)` the union of `a.B`:
/// multiplication applied to products of the singleton and edge families of
/// the group with the generator edges of the space.
fn multiplication_battery(a: &ActionSpec, side: Side) -> Vec<ParamFamily> {
    let g = a.group().clone();
    let singletons = ParamFamily::new("singletons", &g, {
        let g = g.clone();
        move |r| FiniteFamily::new(&g, ball(&g, r)?.elements().iter().map(|x| vec![x.clone()]))
    });
    [singletons, edge_family(Side::Left, &g)]
        .into_iter()
        .map(|groups| {
            let (act, space_edges) = (a.clone(), edge_family(side, a.space()));
            ParamFamily::new(format!("mult({})", groups.tag()), a.space(), move |r| {
                let bs = space_edges.at(r)?;
                let gs = groups.at(r)?;
                let members = gs.members().iter().flat_map(|fa| {
                    bs.members()
                        .iter()
                        .map(|b| fa.iter().flat_map(|k| act.act_on_set(k, b)).collect::<Vec<_>>())
                        .collect::<Vec<_>>()
                });
                FiniteFamily::new(act.space(), members.collect::<Vec<_>>())
            })
        })
        .collect()
}

#[test]
fn bornologous_multiplication_gives_uniform_bornology() {
    let mut exercised = 0;
    for text in ACTIONS {
        let a = parse_action(text).unwrap();
        for side in [Side::Left, Side::Right] {
            let spec = CoarseStructureSpec::side(side, a.space());
            let mult = multiplication_battery(&a, side)
                .iter()
                .all(|f| membership_window(&spec, f, 8).unwrap().is_bounded());
            let battery = quick().for_spec(&spec).unwrap();
            let ub = uniformly_bornologous_action_check(&a, &spec, &battery, 8).unwrap();
            if mult {
                exercised += 1;
                assert!(ub.pass, "{text} on {spec}");
            }
        }
    }
    assert!(exercised >= 6, "{exercised}");
}

/// For uniformly bornologous actions, finite point counts and finite
/// stabilizers come together.
#[test]
fn point_finite_iff_finite_stabilizer() {
    for text in ACTIONS {
        let a = parse_action(text).unwrap();
        let spec = CoarseStructureSpec::side(Side::Left, a.space());
        let battery = quick().for_spec(&spec).unwrap();
        if !uniformly_bornologous_action_check(&a, &spec, &battery, 6).unwrap().pass {
            continue;
        }
        let x = a.space();
        let unit = ball(x, 1).unwrap();
        for u in [vec![x.identity()], unit.elements().to_vec()] {
            let stab = stabilizer_window(&a, &u, 8).unwrap().stable;
            let points =
                unit.elements().iter().all(|p| point_finite_check(&a, &u, p, 8).unwrap().stable);
            assert_eq!(stab, points, "{text} U={u:?}");
        }
    }
}
