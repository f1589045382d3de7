use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{ball, parse_group_spec, Cursor, Element, GroupKind, GroupSpec, Hom};

/// Radius of the ball on which the action axioms are verified.
const AXIOM_CHECK_RADIUS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ActionRule {
    /// `g . w = h(g) w`
    LeftTranslation(Hom),
    /// `g . w = w h(g)^-1`, a right action written as a left one.
    RightTranslation(Hom),
    Trivial,
    /// One permutation of the points `0..n` of `Zmod(n)` per generator.
    Table(Vec<Vec<u64>>),
}

/// A left action of a catalog group on the underlying set of another.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionSpec {
    group: GroupSpec,
    space: GroupSpec,
    rule: ActionRule,
}

impl ActionSpec {
    /// Builds the action and verifies `(g1 g2).x = g1.(g2.x)` and `1.x = x`
    /// on `Ball(3) x Ball(3) x window`.
    pub fn new(group: GroupSpec, space: GroupSpec, rule: ActionRule) -> Result<Self> {
        match &rule {
            ActionRule::LeftTranslation(h) | ActionRule::RightTranslation(h) => h.check(&group, &space)?,
            ActionRule::Trivial => {}
            ActionRule::Table(perms) => {
                let GroupKind::CyclicMod(n) = *space.kind() else {
                    return Err(Error::Precondition(format!("table actions act on Zmod(n), not {space}")));
                };
                if perms.len() != group.generators().len() {
                    return Err(Error::NotAnAction(format!(
                        "{} permutations given for {} generators",
                        perms.len(),
                        group.generators().len()
                    )));
                }
                for p in perms {
                    let image: BTreeSet<u64> = p.iter().copied().collect();
                    if p.len() as u64 != n || image.len() as u64 != n || image.iter().any(|&v| v >= n) {
                        return Err(Error::NotAnAction(format!("{p:?} is not a permutation of 0..{n}")));
                    }
                }
            }
        }
        let action = Self { group, space, rule };
        action.verify_axioms()?;
        Ok(action)
    }

    /// Left translation of a group on itself.
    pub fn left(group: &GroupSpec) -> Self {
        Self { group: group.clone(), space: group.clone(), rule: ActionRule::LeftTranslation(Hom::Identity) }
    }

    /// Right translation of a group on itself, `g . w = w g^-1`.
    pub fn right(group: &GroupSpec) -> Self {
        Self { group: group.clone(), space: group.clone(), rule: ActionRule::RightTranslation(Hom::Identity) }
    }

    pub fn left_via(group: &GroupSpec, space: &GroupSpec, hom: Hom) -> Result<Self> {
        Self::new(group.clone(), space.clone(), ActionRule::LeftTranslation(hom))
    }

    pub fn right_via(group: &GroupSpec, space: &GroupSpec, hom: Hom) -> Result<Self> {
        Self::new(group.clone(), space.clone(), ActionRule::RightTranslation(hom))
    }

    pub fn trivial(group: &GroupSpec, space: &GroupSpec) -> Self {
        Self { group: group.clone(), space: space.clone(), rule: ActionRule::Trivial }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn space(&self) -> &GroupSpec {
        &self.space
    }

    pub fn rule(&self) -> &ActionRule {
        &self.rule
    }

    pub fn act(&self, g: &Element, x: &Element) -> Element {
        match &self.rule {
            ActionRule::LeftTranslation(h) => self.space.op(&h.apply(g), x),
            ActionRule::RightTranslation(h) => self.space.op(x, &self.space.inv(&h.apply(g))),
            ActionRule::Trivial => x.clone(),
            ActionRule::Table(perms) => {
                let Element::Residue { value, modulus } = x else {
                    panic!("table action applied to {x:?}");
                };
                let word = self.group.geodesic_word(g);
                let value = word.iter().rev().fold(*value, |v, &s| perms[s][v as usize]);
                Element::Residue { value, modulus: *modulus }
            }
        }
    }

    pub fn act_on_set(&self, g: &Element, set: &[Element]) -> Vec<Element> {
        let out: BTreeSet<Element> = set.iter().map(|x| self.act(g, x)).collect();
        out.into_iter().collect()
    }

    /// Whether [`ActionSpec::carriers`] is exact rather than window-limited.
    pub fn has_exact_carriers(&self) -> bool {
        matches!(self.rule, ActionRule::LeftTranslation(_) | ActionRule::RightTranslation(_))
    }

    /// `{k in G : y in k . U}` in canonical order.
    ///
    /// Exact for translation actions; other rules search `Ball(search_radius)`.
    pub fn carriers(&self, y: &Element, u: &[Element], search_radius: usize) -> Result<Vec<Element>> {
        let mut out = BTreeSet::new();
        match &self.rule {
            ActionRule::LeftTranslation(h) => {
                for p in u {
                    if let Some(k) = h.preimage(&self.space.right_quotient(y, p)) {
                        out.insert(k);
                    }
                }
            }
            ActionRule::RightTranslation(h) => {
                for p in u {
                    if let Some(k) = h.preimage(&self.space.left_quotient(y, p)) {
                        out.insert(k);
                    }
                }
            }
            ActionRule::Trivial | ActionRule::Table(_) => {
                let members: BTreeSet<&Element> = u.iter().collect();
                let b = ball(&self.group, search_radius)?;
                for k in b.elements() {
                    if members.contains(&self.act(&self.group.inv(k), y)) {
                        out.insert(k.clone());
                    }
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Checks the action axioms on a window.
    pub fn verify_axioms(&self) -> Result<()> {
        let gs = ball(&self.group, AXIOM_CHECK_RADIUS)?;
        let xs = ball(&self.space, AXIOM_CHECK_RADIUS)?;
        let id = self.group.identity();
        for x in xs.elements() {
            if &self.act(&id, x) != x {
                return Err(Error::NotAnAction(format!("identity moves {x}")));
            }
            for g1 in gs.elements() {
                let g1x = self.act(g1, x);
                for g2 in gs.elements() {
                    let lhs = self.act(&self.group.op(g2, g1), x);
                    let rhs = self.act(g2, &g1x);
                    if lhs != rhs {
                        return Err(Error::NotAnAction(format!("({g2})({g1}).{x} = {lhs} but {g2}.({g1}.{x}) = {rhs}")));
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for ActionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (g, x) = (&self.group, &self.space);
        match &self.rule {
            ActionRule::LeftTranslation(Hom::Identity) => write!(f, "left({g})"),
            ActionRule::RightTranslation(Hom::Identity) => write!(f, "right({g})"),
            ActionRule::LeftTranslation(h) => write!(f, "left({g}->{x} via {h})"),
            ActionRule::RightTranslation(h) => write!(f, "right({g}->{x} via {h})"),
            ActionRule::Trivial => write!(f, "trivial({g} on {x})"),
            ActionRule::Table(perms) => {
                let n = match x.kind() {
                    GroupKind::CyclicMod(n) => *n,
                    _ => 0,
                };
                write!(f, "table({g} on {n}:")?;
                for (i, p) in perms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " |")?;
                    }
                    for v in p {
                        write!(f, " {v}")?;
                    }
                }
                write!(f, ")")
            }
        }
    }
}

impl Serialize for ActionSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for ActionSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_action(text)
    }
}

/// Parses action catalog strings:
///
/// * `left(G)`, `right(G)`: translations of `G` on itself;
/// * `left(G->X via HOM)`, `right(G->X via HOM)` with `HOM` one of `id`,
///   `x^n` (`Z -> DihInf`), `kn` (`Z -> Z`);
/// * `trivial(G on X)`;
/// * `table(G on n: p1 | p2 | ...)`, one permutation of `0..n` per generator.
pub fn parse_action(text: &str) -> Result<ActionSpec> {
    let mut p = Cursor::new(text.trim());
    let kind = p.ident();
    p.skip_ws();
    p.expect('(')?;
    let inner_start = p.pos;
    let close = text.trim().rfind(')').ok_or_else(|| Error::parse(text.len(), "missing `)`"))?;
    if close < inner_start || close + 1 != text.trim().len() {
        return Err(Error::parse(close, "unbalanced action description"));
    }
    let inner = &text.trim()[inner_start..close];
    let at = |e: Error| match e {
        Error::Parse { pos, msg } => Error::parse(pos + inner_start, msg),
        other => other,
    };
    match kind {
        "left" | "right" => {
            let (group, space, hom) = match inner.split_once("->") {
                None => {
                    let g = parse_group_spec(inner).map_err(at)?;
                    (g.clone(), g, Hom::Identity)
                }
                Some((g, rest)) => {
                    let (x, hom) = rest
                        .split_once(" via ")
                        .ok_or_else(|| Error::parse(inner_start, "expected `G->X via HOM`"))?;
                    (parse_group_spec(g).map_err(at)?, parse_group_spec(x).map_err(at)?, parse_hom(hom.trim())?)
                }
            };
            if kind == "left" {
                ActionSpec::left_via(&group, &space, hom)
            } else {
                ActionSpec::right_via(&group, &space, hom)
            }
        }
        "trivial" => {
            let (g, x) = inner
                .split_once(" on ")
                .ok_or_else(|| Error::parse(inner_start, "expected `G on X`"))?;
            Ok(ActionSpec::trivial(&parse_group_spec(g).map_err(at)?, &parse_group_spec(x).map_err(at)?))
        }
        "table" => {
            let (g, rest) = inner
                .split_once(" on ")
                .ok_or_else(|| Error::parse(inner_start, "expected `G on n: perms`"))?;
            let (n, perms) = rest
                .split_once(':')
                .ok_or_else(|| Error::parse(inner_start, "expected `:` before permutations"))?;
            let n: u64 = n.trim().parse().map_err(|_| Error::parse(inner_start, "expected point count"))?;
            let perms = perms
                .split('|')
                .map(|p| {
                    p.split_whitespace()
                        .map(|v| v.parse::<u64>().map_err(|_| Error::parse(inner_start, format!("bad point `{v}`"))))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            ActionSpec::new(parse_group_spec(g).map_err(at)?, GroupSpec::cyclic(n)?, ActionRule::Table(perms))
        }
        other => Err(Error::parse(0, format!("unknown action kind `{other}`"))),
    }
}

fn parse_hom(text: &str) -> Result<Hom> {
    match text {
        "id" => Ok(Hom::Identity),
        "x^n" => Ok(Hom::DihedralInclusion),
        _ => {
            let k = text
                .strip_suffix('n')
                .and_then(|k| if k.is_empty() { Some(1) } else if k == "-" { Some(-1) } else { k.parse().ok() })
                .ok_or_else(|| Error::parse(0, format!("unknown homomorphism `{text}`")))?;
            Ok(Hom::Scale(k))
        }
    }
}
