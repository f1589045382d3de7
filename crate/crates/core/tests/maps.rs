mod common;

use coarsekit::battery::{left_translates, BatteryConfig};
use coarsekit::coarse::{membership_window, CoarseStructureSpec, Membership, Side};
use coarsekit::group::GroupSpec;
use coarsekit::maps::{
    check_bornologous, check_close, check_coarsely_proper, parse_map, pullback_structure_equality,
    surjective_equivalence_check, MapWindow, Mapping,
};
use coarsekit::Error;
use common::props;
use common::*;
use proptest::prelude::*;

fn left(text: &str) -> MapWindow {
    MapWindow::left(parse_map(text).unwrap())
}

fn quick() -> BatteryConfig {
    BatteryConfig { seed: 5, random: 4 }
}

#[test]
fn bornologous_examples() {
    let zz = GroupSpec::integers();
    let edges = [left_translates(&zz, &[z(0), z(1)])];
    assert!(check_bornologous(&left("identity(Z)"), &edges, 8).unwrap().pass);

    let cert = check_bornologous(&left("inclusion(Z->DihInf)"), &edges, 8).unwrap();
    assert!(cert.pass);
    assert_eq!(names(cert.findings[0].outcome.elements()), ["1", "x", "x^-1"]);

    let cert = check_bornologous(&left("square(Z)"), &edges, 8).unwrap();
    assert!(!cert.pass);
    let Membership::Unbounded(c) = &cert.findings[0].outcome else { panic!("square map should fail") };
    assert!(c.trace.is_growing());
    // (n+1)^2 - n^2 = 2n + 1 for |n| <= 8
    let oracle: std::collections::BTreeSet<i64> =
        (-8..=8).flat_map(|n: i64| [0, 2 * n + 1, -(2 * n + 1)]).collect();
    let found: std::collections::BTreeSet<i64> = c.elements.iter().map(|e| e.as_integer().unwrap()).collect();
    assert_eq!(found, oracle);

    let d = GroupSpec::dihedral();
    let wrong = [left_translates(&d, &[d.identity()])];
    assert!(matches!(check_bornologous(&left("identity(Z)"), &wrong, 4), Err(Error::SpaceMismatch { .. })));
}

#[test]
fn properness_examples() {
    assert!(check_coarsely_proper(&left("scale(Z,2)"), 8).unwrap().pass);
    assert!(check_coarsely_proper(&left("inclusion(Z->DihInf)"), 8).unwrap().pass);
    let cert = check_coarsely_proper(&left("constant(Z->Z,0)"), 8).unwrap();
    assert!(!cert.pass);
    let sizes = cert.findings[0].outcome.trace().sizes();
    assert_eq!(sizes, (0..=8).map(|r| 2 * r + 1).collect::<Vec<_>>());
}

#[test]
fn closeness_examples() {
    let cert = check_close(&left("identity(Z)"), &left("translate(Z,5)"), 8).unwrap();
    assert!(cert.pass);
    assert!(cert.findings[0].outcome.elements().iter().all(|e| [0, 5, -5].contains(&e.as_integer().unwrap())));
    assert_eq!(cert.get("displacement").unwrap(), 5);

    let cert = check_close(&left("identity(Z)"), &left("negate(Z)"), 8).unwrap();
    assert!(!cert.pass);
    assert!(cert.findings[0].outcome.trace().is_growing());

    let cert = check_close(&left("identity(DihInf)"), &left("rtranslate(DihInf,t)"), 8).unwrap();
    assert!(cert.pass);
    assert_eq!(names(cert.findings[0].outcome.elements()), ["1", "t"]);

    // w -> t.w is not close to the identity for the left structure
    let cert = check_close(&left("identity(DihInf)"), &left("translate(DihInf,t)"), 8).unwrap();
    assert!(!cert.pass);
    assert!(matches!(
        check_close(&left("identity(Z)"), &left("identity(DihInf)"), 4),
        Err(Error::SpaceMismatch { .. })
    ));
}

#[test]
fn surjective_equivalences() {
    let cert = surjective_equivalence_check(&left("floordiv(Z,2)"), 8, &quick()).unwrap();
    assert!(cert.pass, "{cert:#?}");
    let sel = cert.get("selection").unwrap().as_object().unwrap();
    for (y, x) in sel {
        let y: i64 = y.parse().unwrap();
        // the BFS-least of {2y, 2y + 1}
        let expected = if y >= 0 { 2 * y } else { 2 * y + 1 };
        assert_eq!(x.as_str().unwrap().parse::<i64>().unwrap(), expected);
    }
    assert!(cert.get("displacement").unwrap()["g.f"].as_u64().unwrap() <= 1);

    let cert = surjective_equivalence_check(&left("reduce(Z->Zmod(6))"), 8, &quick()).unwrap();
    assert!(!cert.pass);
    let proper = cert.part("coarsely-proper").unwrap();
    assert!(!proper.pass);
    assert!(!proper.first_failure().unwrap().outcome.trace().is_stable());

    let cert = surjective_equivalence_check(&left("identity(DihInf)"), 6, &quick()).unwrap();
    assert!(cert.pass);
    for (y, x) in cert.get("selection").unwrap().as_object().unwrap() {
        assert_eq!(y, x.as_str().unwrap());
    }

    assert!(matches!(
        surjective_equivalence_check(&left("inclusion(Z->DihInf)"), 4, &quick()),
        Err(Error::SurjectivityViolation { .. })
    ));
}

/// A passing certificate's selection is itself bornologous and both
/// composites are close to the identities.
#[test]
fn selection_coherence() {
    for text in ["floordiv(Z,2)", "identity(Z^2)", "translate(DihInf,x)", "rtranslate(DihInf,t)", "negate(Z)"] {
        let cert = surjective_equivalence_check(&left(text), 8, &quick()).unwrap();
        assert!(cert.pass, "{text}");
        for part in ["bornologous", "selection-bornologous", "close(f.g, id)", "close(g.f, id)"] {
            assert!(cert.part(part).unwrap().pass, "{text}: {part}");
        }
    }
}

#[test]
fn pullback_equality() {
    let zz = GroupSpec::integers();
    let l = CoarseStructureSpec::LeftGroup(zz.clone());
    let id = Mapping::identity(&zz);
    assert!(pullback_structure_equality(&id, &l, &l, 6, &quick()).unwrap().pass);
    let half = parse_map("floordiv(Z,2)").unwrap();
    assert!(pullback_structure_equality(&half, &l, &l, 8, &quick()).unwrap().pass);

    let d = GroupSpec::dihedral();
    let inc = parse_map("inclusion(Z->DihInf)").unwrap();
    let (dl, dr) = (CoarseStructureSpec::side(Side::Left, &d), CoarseStructureSpec::side(Side::Right, &d));
    assert!(matches!(
        pullback_structure_equality(&inc, &dl, &dr, 4, &quick()),
        Err(Error::SurjectivityViolation { .. })
    ));
    // both pullbacks along i agree on Z while the structures on DihInf differ
    let edges = left_translates(&zz, &[z(0), z(1)]);
    for spec in [&dl, &dr] {
        let pulled = CoarseStructureSpec::pullback(&inc, spec.clone()).unwrap();
        assert!(membership_window(&pulled, &edges, 8).unwrap().is_bounded());
    }
    let t = d.parse_element("t").unwrap();
    let tfam = coarsekit::battery::left_multiples(&d, &t);
    assert!(!membership_window(&dl, &tfam, 8).unwrap().is_bounded());
    assert!(membership_window(&dr, &tfam, 8).unwrap().is_bounded());
}

#[test]
fn composition_of_bornologous_maps() {
    let zz = GroupSpec::integers();
    let f = parse_map("scale(Z,2)").unwrap();
    let g = parse_map("inclusion(Z->DihInf)").unwrap();
    let edges = vec![left_translates(&zz, &[z(0), z(1)]), left_translates(&zz, &[z(-1), z(2)])];
    assert!(check_bornologous(&MapWindow::left(f.clone()), &edges, 8).unwrap().pass);
    let composed = MapWindow::left(f.then(g).unwrap());
    assert!(check_bornologous(&composed, &edges, 8).unwrap().pass);
}

fn translate(k: i64) -> MapWindow {
    MapWindow::left(parse_map(&format!("translate(Z,{k})")).unwrap())
}

proptest! {
    #![proptest_config(props::config(201))]

    /// Closeness is symmetric, and `(f, g)`, `(g, h)` close gives `(f, h)`
    /// close with displacement at most the sum.
    #[test]
    fn closeness_is_symmetric_and_transitive(a in -6i64..6, b in -6i64..6, c in -6i64..6) {
        let (f, g, h) = (translate(a), translate(b), translate(c));
        let fg = check_close(&f, &g, 4).unwrap();
        let gf = check_close(&g, &f, 4).unwrap();
        prop_assert_eq!(fg.pass, gf.pass);
        prop_assert_eq!(fg.get("displacement"), gf.get("displacement"));
        let gh = check_close(&g, &h, 4).unwrap();
        let fh = check_close(&f, &h, 4).unwrap();
        prop_assert!(fg.pass && gh.pass && fh.pass);
        let d = |c: &coarsekit::cert::Certificate| c.get("displacement").unwrap().as_u64().unwrap();
        prop_assert!(d(&fh) <= d(&fg) + d(&gh));
        let w: Vec<i64> = fh.findings[0].outcome.elements().iter().map(|e| e.as_integer().unwrap()).collect();
        prop_assert!(w.iter().all(|n| n.unsigned_abs() <= d(&fg) + d(&gh)));
    }
}

