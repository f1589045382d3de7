//! Left versus right coarse structures on a group.

use serde::Serialize;

use crate::battery::{edge_family, left_multiples, right_multiples, right_translates, BatteryConfig};
use crate::coarse::{membership_window, CoarseStructureSpec, Membership, Side, Trace};
use crate::error::{Error, Result};
use crate::group::{ball, conjugacy_trace, Element, GroupSpec};
use crate::maps::{
    compare_structures, image_param, pullback_structure_equality, structure_distance, surjective_equivalence_check,
    MapWindow, Mapping,
};
use crate::report::{CheckRecord, Verdict};

fn require_radius(radius: usize, min: usize) -> Result<()> {
    if radius < min {
        return Err(Error::Precondition(format!("radius must be at least {min}, got {radius}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FcVerdict {
    pub pass: bool,
    /// Largest conjugacy window seen.
    pub bound: usize,
    /// First element whose conjugacy window does not stabilize.
    pub witness: Option<Element>,
    pub trace: Option<Trace>,
    pub tested: usize,
}

/// Conjugacy windows of every `a` in `Ball(ceil(R/2))`, conjugators up to `R`.
pub fn fc_test(group: &GroupSpec, radius: usize) -> Result<FcVerdict> {
    require_radius(radius, 2)?;
    let conjugators = ball(group, radius)?;
    let mut bound = 0;
    let elements = conjugators.within(radius.div_ceil(2));
    for a in elements {
        let trace = Trace::from_sizes(&conjugacy_trace(group, a, &conjugators, radius));
        if !trace.is_stable() {
            return Ok(FcVerdict {
                pass: false,
                bound: bound.max(trace.max()),
                witness: Some(a.clone()),
                trace: Some(trace),
                tested: elements.len(),
            });
        }
        bound = bound.max(trace.max());
    }
    Ok(FcVerdict { pass: true, bound, witness: None, trace: None, tested: elements.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareVerdict {
    pub equal: bool,
    /// Family bounded in one structure and not the other.
    pub family: Option<String>,
    pub left: Option<Membership>,
    pub right: Option<Membership>,
    pub tested: usize,
}

/// Runs `{{g, a.g}}` against the left structure and `{{g, g.a}}` against the
/// right one for `a` in `Ball(ceil(R/2))`.
pub fn compare_left_right(group: &GroupSpec, radius: usize) -> Result<CompareVerdict> {
    require_radius(radius, 2)?;
    let left = CoarseStructureSpec::LeftGroup(group.clone());
    let right = CoarseStructureSpec::RightGroup(group.clone());
    let elements = ball(group, radius.div_ceil(2))?;
    let mut tested = 0;
    for a in elements.elements() {
        for (fam, probe) in [(left_multiples(group, a), &left), (right_multiples(group, a), &right)] {
            tested += 1;
            let out = membership_window(probe, &fam, radius)?;
            if !out.is_bounded() {
                let other = if probe == &left { &right } else { &left };
                let other_out = membership_window(other, &fam, radius)?;
                let (l, r) = if probe == &left { (out, other_out) } else { (other_out, out) };
                return Ok(CompareVerdict {
                    equal: false,
                    family: Some(fam.tag().to_string()),
                    left: Some(l),
                    right: Some(r),
                    tested,
                });
            }
        }
    }
    Ok(CompareVerdict { equal: true, family: None, left: None, right: None, tested })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultVerdict {
    pub pass: bool,
    /// The finite set `F` whose image family `{F.g}` is unbounded.
    pub set: Option<Vec<Element>>,
    pub outcome: Option<Membership>,
    pub tested: usize,
}

/// Multiplication `G x G -> G` applied to the product families `{F x {g}}`,
/// with `F = {1, a}` for `a` in `Ball(2)` and `F = Ball(2)`; the images
/// `{F.g}` must be bounded in the left structure.
pub fn multiplication_bornologous_check(group: &GroupSpec, radius: usize) -> Result<MultVerdict> {
    require_radius(radius, 2)?;
    let left = CoarseStructureSpec::LeftGroup(group.clone());
    let b2 = ball(group, 2)?;
    let mut sets: Vec<Vec<Element>> = b2.elements().iter().map(|a| vec![group.identity(), a.clone()]).collect();
    sets.push(b2.elements().to_vec());
    let mut tested = 0;
    for set in sets {
        tested += 1;
        let out = membership_window(&left, &right_translates(group, &set), radius)?;
        if !out.is_bounded() {
            let mut set = set;
            set.dedup();
            return Ok(MultVerdict { pass: false, set: Some(set), outcome: Some(out), tested });
        }
    }
    Ok(MultVerdict { pass: true, set: None, outcome: None, tested })
}

/// Everything the infinite dihedral group demonstrates, as report records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DihedralDemo {
    pub records: Vec<CheckRecord>,
    /// Every record came out as the construction predicts.
    pub reproduced: bool,
}

/// The inclusion `n -> x^n`, the left/right comparison and the
/// non-surjectivity example on `DihInf`.
pub fn dihedral_demo(radius: usize, batteries: &BatteryConfig) -> Result<DihedralDemo> {
    require_radius(radius, 4)?;
    let z = GroupSpec::integers();
    let d = GroupSpec::dihedral();
    let inclusion = Mapping::inclusion();
    let mut records = Vec::new();
    let mut reproduced = true;

    // both structures, through the nearest-point projection
    let window = ball(&d, radius)?;
    for side in [Side::Left, Side::Right] {
        let spec = CoarseStructureSpec::side(side, &d);
        let rho = Mapping::projection(side);
        let cert = surjective_equivalence_check(
            &MapWindow::new(rho.clone(), spec.clone(), CoarseStructureSpec::LeftGroup(z.clone()))?,
            radius,
            batteries,
        )?;
        let selection_is_inclusion = ball(&z, radius)?.elements().iter().all(|n| {
            let y = inclusion.apply(n).expect("inclusion is total");
            cert.get("selection").and_then(|t| t.get(n.to_string())) == Some(&serde_json::json!(y.to_string()))
        });
        let covering = window
            .elements()
            .iter()
            .map(|w| {
                let n = rho.apply(w).expect("projection is total");
                structure_distance(&spec, w, &inclusion.apply(&n).expect("inclusion is total"))
            })
            .max()
            .unwrap_or(0);
        let edges = membership_window(&spec, &image_param(&inclusion, &edge_family(Side::Left, &z)), radius)?;
        let ok = cert.pass && selection_is_inclusion && covering <= 1 && edges.is_bounded() && edges.elements().len() <= 3;
        reproduced &= ok;
        records.push(
            CheckRecord::new(format!("inclusion-equivalence-{side}"), &d, radius, Verdict::pass_fail(ok))
                .witness(edges.elements())
                .trace(edges.trace().clone())
                .note(format!("coarse inverse: nearest point of <x> in the {side} word metric"))
                .note(format!("its BFS-least selection is n -> x^n: {selection_is_inclusion}"))
                .note(format!("every element of Ball({radius}) lies within distance {covering} of the image"))
                .details(&cert),
        );
    }

    // left and right structures differ
    let cmp = compare_left_right(&d, radius)?;
    reproduced &= !cmp.equal;
    let mut rec = CheckRecord::new("compare-lr", &d, radius, Verdict::equal_differ(cmp.equal));
    if let Some(r) = &cmp.right {
        rec = rec.witness(r.elements());
    }
    if let Some(l) = &cmp.left {
        rec = rec.trace(l.trace().clone());
    }
    if let Some(f) = &cmp.family {
        rec = rec.note(format!("family {f}: right witness stabilizes, left trace grows"));
    }
    records.push(rec.details(&cmp));

    // surjectivity cannot be dropped
    let cl = CoarseStructureSpec::LeftGroup(d.clone());
    let cr = CoarseStructureSpec::RightGroup(d.clone());
    match pullback_structure_equality(&inclusion, &cl, &cr, radius, batteries) {
        Err(e @ Error::SurjectivityViolation { .. }) => {
            records.push(
                CheckRecord::new("pullback-equality-precondition", &d, radius, Verdict::Fail)
                    .note("the inclusion is not surjective, so equal pullbacks say nothing about the targets")
                    .details(std::collections::BTreeMap::from([("code", e.code()), ("message", &e.to_string())])),
            );
        }
        Err(e) => return Err(e),
        Ok(_) => {
            reproduced = false;
            records.push(CheckRecord::new("pullback-equality-precondition", &d, radius, Verdict::Pass));
        }
    }
    let pl = CoarseStructureSpec::pullback(&inclusion, cl)?;
    let pr = CoarseStructureSpec::pullback(&inclusion, cr)?;
    let battery = crate::battery::group_battery(Side::Left, &z, batteries.seed, batteries.random)?;
    let agree = compare_structures(&pl, &pr, &battery, radius)?;
    reproduced &= agree.pass;
    records.push(
        CheckRecord::new("pullbacks-on-Z", &z, radius, Verdict::equal_differ(agree.pass))
            .note("both pullbacks along n -> x^n agree on Z while C_l(DihInf) and C_r(DihInf) differ"),
    );

    // which conjugacy class is infinite
    let conj = ball(&d, radius)?;
    let x = d.parse_element("x")?;
    let t = d.parse_element("t")?;
    let tx = Trace::from_sizes(&conjugacy_trace(&d, &x, &conj, radius));
    let tt = Trace::from_sizes(&conjugacy_trace(&d, &t, &conj, radius));
    reproduced &= tx.is_stable() && tt.is_growing();
    records.push(
        CheckRecord::new("conjugacy-class-of-t", &d, radius, Verdict::pass_fail(!tt.is_stable()))
            .witness(&t)
            .trace(tt)
            .note(format!("class of x has size {} (x and x^-1) and is finite", tx.max()))
            .note("the infinite class is that of t, {x^2k t}; the FC failure is witnessed by t, not x"),
    );
    Ok(DihedralDemo { records, reproduced })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fc_on_small_groups() {
        let v = fc_test(&GroupSpec::free_abelian(2).unwrap(), 8).unwrap();
        assert!(v.pass);
        assert_eq!(v.bound, 1);
        let v = fc_test(&GroupSpec::dihedral(), 8).unwrap();
        assert_eq!(v.witness.unwrap().to_string(), "t");
        assert_eq!(v.trace.unwrap().sizes()[..5], [1, 3, 5, 7, 9]);
        assert!(fc_test(&GroupSpec::integers(), 1).is_err());
    }

    #[test]
    fn finite_group_structures_agree() {
        let g = GroupSpec::cyclic(6).unwrap();
        assert!(compare_left_right(&g, 6).unwrap().equal);
        assert!(multiplication_bornologous_check(&g, 6).unwrap().pass);
    }

    #[test]
    fn dihedral_multiplication_fails_on_t() {
        let v = multiplication_bornologous_check(&GroupSpec::dihedral(), 8).unwrap();
        assert!(!v.pass);
        assert_eq!(v.set.unwrap().iter().map(Element::to_string).collect::<Vec<_>>(), ["1", "t"]);
    }
}
