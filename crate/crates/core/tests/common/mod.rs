//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use coarsekit::group::{Element, GroupSpec};

/// Rewrites a word over `x`, `X` (= x^-1), `t` with
/// `xX, Xx, tt -> ""`, `tx -> Xt`, `tX -> xt` until no rule applies.
pub fn dih_rewrite(word: &str) -> String {
    const RULES: [(&str, &str); 5] = [("xX", ""), ("Xx", ""), ("tt", ""), ("tx", "Xt"), ("tX", "xt")];
    let mut w = word.to_string();
    loop {
        let Some((at, (lhs, rhs))) = RULES.iter().filter_map(|r| w.find(r.0).map(|i| (i, *r))).min() else {
            return w;
        };
        w.replace_range(at..at + lhs.len(), rhs);
    }
}

/// `(shift, flip)` of a rewritten word.
pub fn dih_normal(word: &str) -> (i64, bool) {
    let w = dih_rewrite(word);
    let shift = w.chars().filter(|&c| c == 'x').count() as i64 - w.chars().filter(|&c| c == 'X').count() as i64;
    (shift, w.ends_with('t'))
}

pub fn dih_word(shift: i64, flip: bool) -> String {
    let letter = if shift >= 0 { "x" } else { "X" };
    letter.repeat(shift.unsigned_abs() as usize) + if flip { "t" } else { "" }
}

pub fn dih_element(n: (i64, bool)) -> Element {
    Element::dihedral(n.0, n.1)
}

fn words(alphabet: &[char], len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..len {
        frontier = frontier
            .iter()
            .flat_map(|w| alphabet.iter().map(move |c| format!("{w}{c}")))
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

/// Distinct normal forms of all words of length at most `r`.
pub fn dih_ball(r: usize) -> BTreeSet<(i64, bool)> {
    words(&['x', 'X', 't'], r).iter().map(|w| dih_normal(w)).collect()
}

/// Free reduction of a word over `a, A, b, B`.
pub fn free_reduce(word: &str) -> String {
    let mut out: Vec<char> = Vec::new();
    for c in word.chars() {
        match out.last() {
            Some(&p) if p != c && p.eq_ignore_ascii_case(&c) => {
                out.pop();
            }
            _ => out.push(c),
        }
    }
    out.into_iter().collect()
}

pub fn free_ball(r: usize) -> BTreeSet<String> {
    words(&['a', 'A', 'b', 'B'], r).iter().map(|w| free_reduce(w)).collect()
}

/// `{h^-1 a h : |h| <= r}` in normal-form pairs.
pub fn dih_conjugates(a: (i64, bool), r: usize) -> BTreeSet<(i64, bool)> {
    let aw = dih_word(a.0, a.1);
    dih_ball(r)
        .into_iter()
        .map(|h| {
            let hw = dih_word(h.0, h.1);
            let inv = dih_inverse_word(&hw);
            dih_normal(&format!("{inv}{aw}{hw}"))
        })
        .collect()
}

pub fn dih_inverse_word(w: &str) -> String {
    w.chars()
        .rev()
        .map(|c| match c {
            'x' => 'X',
            'X' => 'x',
            c => c,
        })
        .collect()
}

/// Subsets of `-2..=2` with one to three elements.
pub fn z_battery() -> Vec<Vec<i64>> {
    let e: Vec<i64> = (-2..=2).collect();
    let mut out = Vec::new();
    for i in 0..e.len() {
        out.push(vec![e[i]]);
        for j in i + 1..e.len() {
            out.push(vec![e[i], e[j]]);
            for k in j + 1..e.len() {
                out.push(vec![e[i], e[j], e[k]]);
            }
        }
    }
    out
}

/// Transfer sets of `alpha: Z -> Z` on `[-r, r]` by direct formula.
pub fn z_c(alpha: fn(i64) -> i64, f: &[i64], r: i64, pads: &[(i64, i64)]) -> BTreeSet<i64> {
    let mut c: BTreeSet<i64> = BTreeSet::new();
    for u in -r..=r {
        for v in -r..=r {
            if f.contains(&(v - u)) {
                c.insert(alpha(v) - alpha(u));
            }
        }
    }
    for &(p, q) in pads {
        if f.contains(&p) {
            c.insert(q);
        }
        if f.contains(&-p) {
            c.insert(-q);
        }
    }
    c
}

pub fn z_d(alpha: fn(i64) -> i64, f: &[i64], r: i64) -> BTreeSet<i64> {
    let mut d = BTreeSet::new();
    for u in -r..=r {
        for v in -r..=r {
            if f.contains(&(alpha(v) - alpha(u))) {
                d.insert(v - u);
            }
        }
    }
    d
}

/// Every table `[-r, r] -> [pin - span, pin + span]` with `beta(0) = pin`
/// meeting both transfer conditions over the subsets of `-2..=2`.
pub fn z_beta_count(alpha: fn(i64) -> i64, transfer_radius: i64, pads: &[(i64, i64)], r: i64, pin: i64, span: i64) -> usize {
    let battery = z_battery();
    let cs: Vec<(Vec<i64>, BTreeSet<i64>)> =
        battery.iter().map(|f| (f.clone(), z_c(alpha, f, transfer_radius, pads))).collect();
    let ds: Vec<(Vec<i64>, BTreeSet<i64>)> =
        battery.iter().map(|f| (f.clone(), z_d(alpha, f, transfer_radius))).collect();
    let dom: Vec<i64> = (-r..=r).filter(|&x| x != 0).collect();
    let values: Vec<i64> = (pin - span..=pin + span).collect();
    let mut count = 0;
    let mut idx = vec![0usize; dom.len()];
    loop {
        let mut beta = vec![(0i64, pin)];
        beta.extend(dom.iter().zip(&idx).map(|(&x, &i)| (x, values[i])));
        let ok = beta.iter().all(|&(u, bu)| {
            beta.iter().all(|&(v, bv)| {
                cs.iter().all(|(f, c)| !f.contains(&(v - u)) || c.contains(&(bv - bu)))
                    && ds.iter().all(|(f, d)| !f.contains(&(bv - bu)) || d.contains(&(v - u)))
            })
        });
        count += usize::from(ok);
        let mut k = 0;
        loop {
            if k == idx.len() {
                return count;
            }
            idx[k] += 1;
            if idx[k] < values.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub fn z(n: i64) -> Element {
    Element::integer(n)
}

pub fn names(set: &[Element]) -> Vec<String> {
    set.iter().map(Element::to_string).collect()
}

pub fn parse_all(g: &GroupSpec, names: &[&str]) -> Vec<Element> {
    names.iter().map(|n| g.parse_element(n).unwrap()).collect()
}

pub mod props {
    //! Property bodies shared by the proptest suites and the acceptance run.

    use std::collections::BTreeSet;
    use std::sync::OnceLock;

    use coarsekit::actions::{parse_action, ActionSpec};
    use coarsekit::coarse::{
        controlled_to_family, family_to_controlled, refines, side_witness, star_family, ControlledSet, FiniteFamily,
        Side,
    };
    use coarsekit::group::{ball, Element, GroupSpec};
    use coarsekit::maps::Mapping;
    use proptest::prelude::*;
    use proptest::test_runner::{Config, RngSeed};

    pub const CASES: u32 = 1000;

    pub fn config(seed: u64) -> Config {
        Config { cases: CASES, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..Config::default() }
    }

    pub struct Entry {
        pub group: GroupSpec,
        pub small: Vec<Element>,
        pub translations: Vec<Element>,
    }

    /// `Z, Z^2, DihInf, F(2), Zmod(6)` with `Ball(2)` and `Ball(4)`.
    pub fn catalog() -> &'static [Entry] {
        static CATALOG: OnceLock<Vec<Entry>> = OnceLock::new();
        CATALOG.get_or_init(|| {
            [
                GroupSpec::integers(),
                GroupSpec::free_abelian(2).unwrap(),
                GroupSpec::dihedral(),
                GroupSpec::free(2).unwrap(),
                GroupSpec::cyclic(6).unwrap(),
            ]
            .into_iter()
            .map(|g| Entry {
                small: ball(&g, 2).unwrap().elements().to_vec(),
                translations: ball(&g, 4).unwrap().elements().to_vec(),
                group: g,
            })
            .collect()
        })
    }

    #[derive(Debug, Clone)]
    pub struct FamCase {
        pub group: usize,
        pub members: Vec<Vec<usize>>,
        pub shift: usize,
    }

    pub fn fam_case() -> impl Strategy<Value = FamCase> {
        (0..5usize, proptest::collection::vec(proptest::collection::vec(0..64usize, 1..4), 0..5), 0..256usize)
            .prop_map(|(group, members, shift)| FamCase { group, members, shift })
    }

    impl FamCase {
        pub fn entry(&self) -> &'static Entry {
            &catalog()[self.group]
        }

        pub fn sets(&self) -> Vec<Vec<Element>> {
            let small = &self.entry().small;
            self.members.iter().map(|m| m.iter().map(|&i| small[i % small.len()].clone()).collect()).collect()
        }

        pub fn family(&self) -> FiniteFamily {
            FiniteFamily::new(&self.entry().group, self.sets()).unwrap()
        }

        pub fn g(&self) -> Element {
            let t = &self.entry().translations;
            t[self.shift % t.len()].clone()
        }
    }

    fn witness(side: Side, g: &GroupSpec, sets: Vec<Vec<Element>>) -> Vec<Element> {
        side_witness(side, g, &FiniteFamily::new(g, sets).unwrap()).unwrap().elements
    }

    /// Left witnesses are invariant under `B -> g.B`, right ones under `B -> B.g`.
    pub fn translation_invariance(c: &FamCase) -> Result<(), String> {
        let grp = &c.entry().group;
        let g = c.g();
        let base_l = witness(Side::Left, grp, c.sets());
        let base_r = witness(Side::Right, grp, c.sets());
        let left: Vec<Vec<Element>> = c.sets().iter().map(|b| b.iter().map(|e| grp.op(&g, e)).collect()).collect();
        let right: Vec<Vec<Element>> = c.sets().iter().map(|b| b.iter().map(|e| grp.op(e, &g)).collect()).collect();
        if witness(Side::Left, grp, left) != base_l {
            return Err(format!("left witness moved under {g}.B in {grp}"));
        }
        if witness(Side::Right, grp, right) != base_r {
            return Err(format!("right witness moved under B.{g} in {grp}"));
        }
        if grp.is_abelian() && base_l != base_r {
            return Err(format!("left and right witnesses differ in abelian {grp}"));
        }
        Ok(())
    }

    /// `witness_left(B) = witness_right(B^-1)`.
    pub fn inversion_duality(c: &FamCase) -> Result<(), String> {
        let grp = &c.entry().group;
        let inverted: Vec<Vec<Element>> = c.sets().iter().map(|b| b.iter().map(|e| grp.inv(e)).collect()).collect();
        let l = witness(Side::Left, grp, c.sets());
        let r = witness(Side::Right, grp, inverted);
        if l != r {
            return Err(format!("{l:?} != {r:?} in {grp}"));
        }
        Ok(())
    }

    /// `E <= F2C(C2F(E))`, `C2F(F2C(B))` refines `St(B, B)`, witnesses survive
    /// the round trip, and `B <= St(B, fam)`.
    pub fn round_trip(c: &FamCase) -> Result<(), String> {
        let grp = &c.entry().group;
        let fam = c.family();
        let e = family_to_controlled(&fam);
        let back = controlled_to_family(&e);
        if !family_to_controlled(&back).is_superset_of(&e) {
            return Err("F2C(C2F(E)) misses a pair of E".into());
        }
        let raw: Vec<(Element, Element)> = c
            .sets()
            .iter()
            .zip(c.sets().iter().rev())
            .flat_map(|(a, b)| a.iter().cloned().zip(b.iter().cloned()).collect::<Vec<_>>())
            .collect();
        let loose = ControlledSet::new(grp, raw);
        if !family_to_controlled(&controlled_to_family(&loose)).is_superset_of(&loose) {
            return Err("F2C(C2F(E)) misses a pair of an arbitrary E".into());
        }
        let st = star_family(&fam, &fam).unwrap();
        if !refines(&back, &st, false).holds {
            return Err("C2F(F2C(B)) does not refine St(B, B)".into());
        }
        for side in [Side::Left, Side::Right] {
            let a = side_witness(side, grp, &fam).unwrap().elements;
            let b = side_witness(side, grp, &back).unwrap().elements;
            if a != b {
                return Err(format!("{side} witness changed by the round trip"));
            }
        }
        for b in fam.members() {
            let s: BTreeSet<_> = coarsekit::coarse::star(b, &fam).into_iter().collect();
            if !b.iter().all(|e| s.contains(e)) {
                return Err("B is not inside St(B, fam)".into());
            }
        }
        Ok(())
    }

    /// Action, base point, group window and the points it must cover.
    pub type Orbit = (ActionSpec, Element, Vec<Element>, Vec<Element>);

    /// Orbit maps onto their spaces, with the window they are restricted to.
    pub fn orbit_catalog() -> &'static [Orbit] {
        static ORBITS: OnceLock<Vec<Orbit>> = OnceLock::new();
        ORBITS.get_or_init(|| {
            ["table(Z on 3: 1 2 0 | 2 0 1)", "right(DihInf)", "left(Z^2)", "table(Z on 4: 1 2 3 0 | 3 0 1 2)"]
                .iter()
                .map(|text| {
                    let a = parse_action(text).unwrap();
                    let x0 = a.space().identity();
                    let domain = ball(a.group(), 4).unwrap().elements().to_vec();
                    let points = ball(a.space(), 2).unwrap().elements().to_vec();
                    (a, x0, domain, points)
                })
                .collect()
        })
    }

    #[derive(Debug, Clone)]
    pub struct StarCase {
        pub action: usize,
        pub first: Vec<Vec<usize>>,
        pub second: Vec<Vec<usize>>,
    }

    pub fn star_case() -> impl Strategy<Value = StarCase> {
        let fam = || proptest::collection::vec(proptest::collection::vec(0..64usize, 1..4), 0..5);
        (0..4usize, fam(), fam()).prop_map(|(action, first, second)| StarCase { action, first, second })
    }

    /// `gamma^-1(St(B1, B2)) = St(gamma^-1 B1, gamma^-1 B2)` for the orbit map
    /// `gamma(g) = g.x0` restricted to a window that covers the points used.
    pub fn orbit_star_identity(c: &StarCase) -> Result<(), String> {
        let (a, x0, domain, points) = &orbit_catalog()[c.action];
        let gamma = Mapping::orbit(a, x0).unwrap();
        let image: Vec<Element> = domain.iter().map(|g| gamma.apply(g).unwrap()).collect();
        let pre = |b: &[Element]| -> Vec<Element> {
            domain.iter().zip(&image).filter(|(_, y)| b.contains(y)).map(|(g, _)| g.clone()).collect()
        };
        let pick = |ms: &[Vec<usize>]| -> Vec<Vec<Element>> {
            ms.iter().map(|m| m.iter().map(|&i| points[i % points.len()].clone()).collect()).collect()
        };
        let (b1, b2) = (pick(&c.first), pick(&c.second));
        let (x, g) = (a.space(), a.group());
        let f1 = FiniteFamily::new(x, b1.clone()).unwrap();
        let f2 = FiniteFamily::new(x, b2.clone()).unwrap();
        let lhs_members: Vec<Vec<Element>> = star_family(&f1, &f2).unwrap().members().iter().map(|m| pre(m)).collect();
        let lhs = FiniteFamily::new(g, lhs_members).unwrap();
        let p1 = FiniteFamily::new(g, f1.members().iter().map(|m| pre(m)).collect::<Vec<_>>()).unwrap();
        let p2 = FiniteFamily::new(g, f2.members().iter().map(|m| pre(m)).collect::<Vec<_>>()).unwrap();
        let rhs = star_family(&p1, &p2).unwrap();
        if lhs != rhs {
            return Err(format!("star identity fails for {a}: {:?} vs {:?}", lhs.members(), rhs.members()));
        }
        Ok(())
    }
}
