use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::actions::{ActionRule, ActionSpec};
use crate::coarse::{FiniteFamily, Side};
use crate::error::{Error, Result};
use crate::group::{ball, parse_group_spec, Element, GroupKind, GroupSpec, Hom};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapRule {
    Identity,
    /// `x -> e x`
    TranslateLeft(Element),
    /// `x -> x e`
    TranslateRight(Element),
    Hom(Hom),
    /// `n -> floor(n / k)` on `Z`.
    FloorDiv(i64),
    /// `x -> x^-1`, negation on abelian groups.
    Inverse,
    /// `n -> n^2` on `Z`.
    Square,
    Constant(Element),
    /// `Z -> Zmod(n)`
    Reduce,
    /// Nearest point of `<x>` in `DihInf`, for the left or right word metric.
    Projection(Side),
    Table { label: String, entries: Arc<BTreeMap<Element, Element>> },
    /// `g -> g . base`
    Orbit { action: ActionSpec, base: Element },
    /// `g -> g^-1 . base`
    CoOrbit { action: ActionSpec, base: Element },
    /// `y -> ` least `k` with `y in k . U`.
    Carrier { action: ActionSpec, bounded: Vec<Element>, search: usize },
    /// Apply the first map, then the second.
    Compose(Box<Mapping>, Box<Mapping>),
}

/// A map between the underlying sets of two catalog groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mapping {
    source: GroupSpec,
    target: GroupSpec,
    rule: MapRule,
}

fn mismatch(expected: impl fmt::Display, found: impl fmt::Display) -> Error {
    Error::SpaceMismatch { expected: expected.to_string(), found: found.to_string() }
}

fn require_integers(g: &GroupSpec) -> Result<()> {
    if g.kind() != &GroupKind::FreeAbelian(1) {
        return Err(mismatch("Z", g));
    }
    Ok(())
}

impl Mapping {
    pub fn new(source: GroupSpec, target: GroupSpec, rule: MapRule) -> Result<Self> {
        let same = |s: &GroupSpec, t: &GroupSpec| if s == t { Ok(()) } else { Err(mismatch(s, t)) };
        match &rule {
            MapRule::Identity | MapRule::Inverse => same(&source, &target)?,
            MapRule::Square => {
                require_integers(&source)?;
                require_integers(&target)?;
            }
            MapRule::TranslateLeft(e) | MapRule::TranslateRight(e) => {
                same(&source, &target)?;
                source.validate(e)?;
            }
            MapRule::Hom(h) => h.check(&source, &target)?,
            MapRule::FloorDiv(k) => {
                require_integers(&source)?;
                require_integers(&target)?;
                if *k < 1 {
                    return Err(Error::Precondition(format!("floor division by {k}")));
                }
            }
            MapRule::Constant(e) => target.validate(e)?,
            MapRule::Reduce => {
                require_integers(&source)?;
                if !matches!(target.kind(), GroupKind::CyclicMod(_)) {
                    return Err(mismatch("Zmod(n)", &target));
                }
            }
            MapRule::Projection(_) => {
                same(&source, &GroupSpec::dihedral())?;
                require_integers(&target)?;
            }
            MapRule::Table { entries, .. } => {
                for (k, v) in entries.iter() {
                    source.validate(k)?;
                    target.validate(v)?;
                }
            }
            MapRule::Orbit { action, base } | MapRule::CoOrbit { action, base } => {
                same(action.group(), &source)?;
                same(action.space(), &target)?;
                target.validate(base)?;
            }
            MapRule::Carrier { action, bounded, .. } => {
                same(action.space(), &source)?;
                same(action.group(), &target)?;
                if bounded.is_empty() {
                    return Err(Error::Precondition("carrier map needs a nonempty bounded set".into()));
                }
                for u in bounded {
                    source.validate(u)?;
                }
            }
            MapRule::Compose(f, g) => {
                same(&f.target, &g.source)?;
                same(&f.source, &source)?;
                same(&g.target, &target)?;
            }
        }
        Ok(Self { source, target, rule })
    }

    pub fn identity(group: &GroupSpec) -> Self {
        Self { source: group.clone(), target: group.clone(), rule: MapRule::Identity }
    }

    pub fn hom(source: &GroupSpec, target: &GroupSpec, hom: Hom) -> Result<Self> {
        Self::new(source.clone(), target.clone(), MapRule::Hom(hom))
    }

    /// `n -> x^n`
    pub fn inclusion() -> Self {
        Self { source: GroupSpec::integers(), target: GroupSpec::dihedral(), rule: MapRule::Hom(Hom::DihedralInclusion) }
    }

    pub fn projection(side: Side) -> Self {
        Self { source: GroupSpec::dihedral(), target: GroupSpec::integers(), rule: MapRule::Projection(side) }
    }

    pub fn table(
        source: &GroupSpec,
        target: &GroupSpec,
        label: impl Into<String>,
        entries: BTreeMap<Element, Element>,
    ) -> Result<Self> {
        Self::new(source.clone(), target.clone(), MapRule::Table { label: label.into(), entries: Arc::new(entries) })
    }

    pub fn orbit(action: &ActionSpec, base: &Element) -> Result<Self> {
        Self::new(
            action.group().clone(),
            action.space().clone(),
            MapRule::Orbit { action: action.clone(), base: base.clone() },
        )
    }

    pub fn co_orbit(action: &ActionSpec, base: &Element) -> Result<Self> {
        Self::new(
            action.group().clone(),
            action.space().clone(),
            MapRule::CoOrbit { action: action.clone(), base: base.clone() },
        )
    }

    pub fn carrier(action: &ActionSpec, bounded: &[Element], search: usize) -> Result<Self> {
        Self::new(
            action.space().clone(),
            action.group().clone(),
            MapRule::Carrier { action: action.clone(), bounded: bounded.to_vec(), search },
        )
    }

    /// `second . first`
    pub fn then(self, second: Mapping) -> Result<Self> {
        let (source, target) = (self.source.clone(), second.target.clone());
        Self::new(source, target, MapRule::Compose(Box::new(self), Box::new(second)))
    }

    pub fn source(&self) -> &GroupSpec {
        &self.source
    }

    pub fn target(&self) -> &GroupSpec {
        &self.target
    }

    pub fn rule(&self) -> &MapRule {
        &self.rule
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        let (s, t) = (&self.source, &self.target);
        Ok(match &self.rule {
            MapRule::Identity => x.clone(),
            MapRule::TranslateLeft(e) => s.op(e, x),
            MapRule::TranslateRight(e) => s.op(x, e),
            MapRule::Hom(h) => h.apply(x),
            MapRule::FloorDiv(k) => Element::integer(integer(x)?.div_euclid(*k)),
            MapRule::Inverse => s.inv(x),
            MapRule::Square => {
                let n = integer(x)?;
                Element::integer(n.checked_mul(n).ok_or_else(|| Error::ResourceLimit { what: "square".into(), cap: i64::MAX as usize })?)
            }
            MapRule::Constant(e) => e.clone(),
            MapRule::Reduce => {
                let GroupKind::CyclicMod(m) = *t.kind() else { unreachable!("checked at construction") };
                Element::Residue { value: integer(x)?.rem_euclid(m as i64) as u64, modulus: m }
            }
            MapRule::Projection(side) => match (side, x) {
                (_, Element::Dihedral { shift, flip: false }) | (Side::Left, Element::Dihedral { shift, .. }) => {
                    Element::integer(*shift)
                }
                (Side::Right, Element::Dihedral { shift, flip: true }) => Element::integer(-shift),
                _ => return Err(Error::MalformedElement { group: s.to_string(), detail: format!("{x:?}") }),
            },
            MapRule::Table { label, entries } => entries
                .get(x)
                .cloned()
                .ok_or_else(|| Error::WindowOverflow(format!("{x} is outside the table `{label}`")))?,
            MapRule::Orbit { action, base } => action.act(x, base),
            MapRule::CoOrbit { action, base } => action.act(&s.inv(x), base),
            MapRule::Carrier { action, bounded, search } => {
                action.carriers(x, bounded, *search)?.into_iter().next().ok_or_else(|| {
                    Error::SearchFailure(format!("no k in Ball({search}) of {t} with {x} in k.U"))
                })?
            }
            MapRule::Compose(f, g) => g.apply(&f.apply(x)?)?,
        })
    }

    /// A source radius containing every preimage of `Ball(r)` in the target,
    /// for the maps in the catalog that are coarsely proper.
    pub fn preimage_radius(&self, r: usize) -> usize {
        match &self.rule {
            MapRule::Identity | MapRule::Inverse | MapRule::Square | MapRule::Hom(_) => r,
            MapRule::Constant(_) | MapRule::Reduce => r,
            MapRule::TranslateLeft(e) | MapRule::TranslateRight(e) => r + e.length(),
            MapRule::FloorDiv(k) => (*k as usize) * (r + 1),
            MapRule::Projection(_) => r + 1,
            MapRule::Table { entries, .. } => entries.keys().map(Element::length).max().unwrap_or(0),
            MapRule::Orbit { base, .. } | MapRule::CoOrbit { base, .. } => r + base.length() + 1,
            MapRule::Carrier { action, bounded, .. } => {
                let stretch = match action.rule() {
                    ActionRule::LeftTranslation(Hom::Scale(k)) | ActionRule::RightTranslation(Hom::Scale(k)) => {
                        k.unsigned_abs() as usize
                    }
                    _ => 1,
                };
                stretch * r + bounded.iter().map(Element::length).max().unwrap_or(0) + 1
            }
            MapRule::Compose(f, g) => f.preimage_radius(g.preimage_radius(r)),
        }
    }

    /// The map as a table on `Ball(radius)` of the source.
    pub fn tabulate(&self, radius: usize) -> Result<BTreeMap<Element, Element>> {
        ball(&self.source, radius)?.elements().iter().map(|x| Ok((x.clone(), self.apply(x)?))).collect()
    }

    pub fn image_family(&self, fam: &FiniteFamily) -> Result<FiniteFamily> {
        fam.ensure_space(&self.source)?;
        let members = fam
            .members()
            .iter()
            .map(|m| m.iter().map(|x| self.apply(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteFamily::collect(&self.target, members))
    }
}

fn integer(x: &Element) -> Result<i64> {
    x.as_integer().ok_or_else(|| Error::MalformedElement { group: "Z".into(), detail: format!("{x:?}") })
}

/// Preimages of target points inside a source ball, BFS-least first.
#[derive(Debug, Clone)]
pub struct PreimageIndex {
    radius: usize,
    index: HashMap<Element, Vec<Element>>,
}

impl PreimageIndex {
    pub fn new(map: &Mapping, radius: usize) -> Result<Self> {
        let mut index: HashMap<Element, Vec<Element>> = HashMap::new();
        for x in ball(map.source(), radius)?.elements() {
            index.entry(map.apply(x)?).or_default().push(x.clone());
        }
        Ok(Self { radius, index })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn preimages(&self, y: &Element) -> &[Element] {
        self.index.get(y).map_or(&[], Vec::as_slice)
    }

    /// Canonical selection: the BFS-least preimage.
    pub fn select(&self, y: &Element) -> Option<&Element> {
        self.preimages(y).first()
    }

    pub fn preimage_family(&self, space: &GroupSpec, fam: &FiniteFamily) -> FiniteFamily {
        FiniteFamily::collect(
            space,
            fam.members().iter().map(|m| m.iter().flat_map(|y| self.preimages(y).iter().cloned()).collect::<Vec<_>>()),
        )
    }
}

/// `f^-1(fam)` restricted to a source ball large enough for `fam`.
pub fn preimage_family(map: &Mapping, fam: &FiniteFamily) -> Result<FiniteFamily> {
    fam.ensure_space(map.target())?;
    let reach = fam.members().iter().flatten().map(Element::length).max().unwrap_or(0);
    Ok(PreimageIndex::new(map, map.preimage_radius(reach))?.preimage_family(map.source(), fam))
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (s, t) = (&self.source, &self.target);
        match &self.rule {
            MapRule::Identity => write!(f, "identity({s})"),
            MapRule::TranslateLeft(e) => write!(f, "translate({s},{e})"),
            MapRule::TranslateRight(e) => write!(f, "rtranslate({s},{e})"),
            MapRule::Hom(Hom::Identity) => write!(f, "identity({s})"),
            MapRule::Hom(Hom::DihedralInclusion) => write!(f, "inclusion({s}->{t})"),
            MapRule::Hom(Hom::Scale(k)) => write!(f, "scale({s},{k})"),
            MapRule::FloorDiv(k) => write!(f, "floordiv({s},{k})"),
            MapRule::Inverse => write!(f, "negate({s})"),
            MapRule::Square => write!(f, "square({s})"),
            MapRule::Constant(e) => write!(f, "constant({s}->{t},{e})"),
            MapRule::Reduce => write!(f, "reduce({s}->{t})"),
            MapRule::Projection(side) => write!(f, "projection({s}->{t},{side})"),
            MapRule::Table { label, .. } => write!(f, "table({label})"),
            MapRule::Orbit { action, base } => write!(f, "orbit({action},{base})"),
            MapRule::CoOrbit { action, base } => write!(f, "coorbit({action},{base})"),
            MapRule::Carrier { action, bounded, .. } => {
                let u: Vec<String> = bounded.iter().map(Element::to_string).collect();
                write!(f, "carrier({action},{{{}}})", u.join(", "))
            }
            MapRule::Compose(a, b) => write!(f, "compose({a};{b})"),
        }
    }
}

impl Serialize for Mapping {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for Mapping {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_map(text)
    }
}

/// Splits on `sep` outside parentheses.
pub(crate) fn split_top(text: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&text[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

/// Parses map catalog strings such as `inclusion(Z->DihInf)`,
/// `floordiv(Z,2)`, `translate(Z,5)`, `negate(Z)`, `square(Z)`,
/// `scale(Z,2)`, `constant(Z->Z,0)`, `reduce(Z->Zmod(6))`,
/// `projection(DihInf->Z,left)`, `rtranslate(DihInf,t)`, `identity(G)`.
pub fn parse_map(text: &str) -> Result<Mapping> {
    let text = text.trim();
    let open = text.find('(').ok_or_else(|| Error::parse(text.len(), "expected `(`"))?;
    if !text.ends_with(')') {
        return Err(Error::parse(text.len(), "expected `)` at end of map"));
    }
    let name = text[..open].trim();
    let args = split_top(&text[open + 1..text.len() - 1], ',');
    let arg = |i: usize| {
        args.get(i).map(|a| a.trim()).ok_or_else(|| Error::parse(open + 1, format!("`{name}` needs {} arguments", i + 1)))
    };
    let arrow = |a: &str| -> Result<(GroupSpec, GroupSpec)> {
        let (s, t) = a.split_once("->").ok_or_else(|| Error::parse(open + 1, "expected `G->H`"))?;
        Ok((parse_group_spec(s.trim())?, parse_group_spec(t.trim())?))
    };
    let int = |a: &str| -> Result<i64> { a.parse().map_err(|_| Error::parse(open + 1, format!("expected integer, got `{a}`"))) };
    let expected_args = match name {
        "identity" | "negate" | "square" | "inclusion" | "reduce" => 1,
        _ => 2,
    };
    if args.len() != expected_args {
        return Err(Error::parse(open + 1, format!("`{name}` takes {expected_args} argument(s)")));
    }
    match name {
        "identity" => Ok(Mapping::identity(&parse_group_spec(arg(0)?)?)),
        "negate" | "square" => {
            let g = parse_group_spec(arg(0)?)?;
            Mapping::new(g.clone(), g, if name == "negate" { MapRule::Inverse } else { MapRule::Square })
        }
        "inclusion" => {
            let (s, t) = arrow(arg(0)?)?;
            Mapping::hom(&s, &t, Hom::DihedralInclusion)
        }
        "reduce" => {
            let (s, t) = arrow(arg(0)?)?;
            Mapping::new(s, t, MapRule::Reduce)
        }
        "translate" | "rtranslate" => {
            let g = parse_group_spec(arg(0)?)?;
            let e = g.parse_element(arg(1)?)?;
            let rule = if name == "translate" { MapRule::TranslateLeft(e) } else { MapRule::TranslateRight(e) };
            Mapping::new(g.clone(), g, rule)
        }
        "scale" => {
            let g = parse_group_spec(arg(0)?)?;
            Mapping::hom(&g, &g, Hom::Scale(int(arg(1)?)?))
        }
        "floordiv" => {
            let g = parse_group_spec(arg(0)?)?;
            Mapping::new(g.clone(), g, MapRule::FloorDiv(int(arg(1)?)?))
        }
        "constant" => {
            let (s, t) = arrow(arg(0)?)?;
            let e = t.parse_element(arg(1)?)?;
            Mapping::new(s, t, MapRule::Constant(e))
        }
        "projection" => {
            let (s, t) = arrow(arg(0)?)?;
            let side = match arg(1)? {
                "left" => Side::Left,
                "right" => Side::Right,
                other => return Err(Error::parse(open + 1, format!("expected left|right, got `{other}`"))),
            };
            Mapping::new(s, t, MapRule::Projection(side))
        }
        other => Err(Error::parse(0, format!("unknown map `{other}`"))),
    }
}
