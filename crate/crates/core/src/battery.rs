//! Test batteries: radius-indexed families known to be bounded in a structure.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::actions::ActionSpec;
use crate::coarse::{CoarseStructureSpec, FiniteFamily, ParamFamily, Side};
use crate::error::{Error, Result};
use crate::group::{ball, Element, GroupSpec};
use crate::maps::mapping::split_top;

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Seeded random families per structure in the default battery.
pub const RANDOM_FAMILIES: usize = 32;

/// Seed and size of the random part of every default battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BatteryConfig {
    pub seed: u64,
    pub random: usize,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, random: RANDOM_FAMILIES }
    }
}

impl BatteryConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn for_spec(&self, spec: &CoarseStructureSpec) -> Result<Vec<ParamFamily>> {
        battery_with(spec, self.seed, self.random)
    }
}

/// Random member shapes available to each random family.
const POOL: usize = 4;

fn names(set: &[Element]) -> String {
    let v: Vec<String> = set.iter().map(Element::to_string).collect();
    format!("{{{}}}", v.join(", "))
}

/// `r -> {g . F : g in Ball(r)}`
pub fn left_translates(group: &GroupSpec, set: &[Element]) -> ParamFamily {
    let (g, f) = (group.clone(), set.to_vec());
    ParamFamily::new(format!("{{g.F}} F={}", names(set)), group, move |r| {
        let b = ball(&g, r)?;
        Ok(FiniteFamily::collect(&g, b.elements().iter().map(|x| f.iter().map(|s| g.op(x, s)).collect::<Vec<_>>())))
    })
}

/// `r -> {F . g : g in Ball(r)}`
pub fn right_translates(group: &GroupSpec, set: &[Element]) -> ParamFamily {
    let (g, f) = (group.clone(), set.to_vec());
    ParamFamily::new(format!("{{F.g}} F={}", names(set)), group, move |r| {
        let b = ball(&g, r)?;
        Ok(FiniteFamily::collect(&g, b.elements().iter().map(|x| f.iter().map(|s| g.op(s, x)).collect::<Vec<_>>())))
    })
}

/// `r -> {{g, a.g} : g in Ball(r)}`
pub fn left_multiples(group: &GroupSpec, a: &Element) -> ParamFamily {
    right_translates(group, &[group.identity(), a.clone()]).retag(format!("{{{{g, a.g}}}} a={a}"))
}

/// `r -> {{g, g.a} : g in Ball(r)}`
pub fn right_multiples(group: &GroupSpec, a: &Element) -> ParamFamily {
    left_translates(group, &[group.identity(), a.clone()]).retag(format!("{{{{g, g.a}}}} a={a}"))
}

/// Generator edges `{{g, g.s}}` (left) or `{{g, s.g}}` (right).
pub fn edge_family(side: Side, group: &GroupSpec) -> ParamFamily {
    let g = group.clone();
    ParamFamily::new(format!("{side} generator edges"), group, move |r| {
        let b = ball(&g, r)?;
        let members = b.elements().iter().flat_map(|x| {
            let g = &g;
            g.generators().iter().map(move |s| match side {
                Side::Left => vec![x.clone(), g.op(x, s)],
                Side::Right => vec![x.clone(), g.op(s, x)],
            })
        });
        Ok(FiniteFamily::collect(&g, members.collect::<Vec<_>>()))
    })
}

/// `r -> {a . B : a in Ball_G(r)}` for an action.
pub fn action_translates(action: &ActionSpec, set: &[Element]) -> ParamFamily {
    let (a, f) = (action.clone(), set.to_vec());
    ParamFamily::new(format!("{{g.B}} B={}", names(set)), action.space(), move |r| {
        let b = ball(a.group(), r)?;
        Ok(FiniteFamily::collect(a.space(), b.elements().iter().map(|g| a.act_on_set(g, &f))))
    })
}

fn fnv1a(parts: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for p in parts {
        for &b in *p {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Seeded families of mesh at most 2: every `g` carries a translate of one
/// of a few random subsets of `Ball(1)`, picked by hashing `(seed, index, g)`.
/// The identity carries all of them, so witnesses are complete at radius 0.
pub fn random_families(side: Side, group: &GroupSpec, seed: u64, count: usize) -> Result<Vec<ParamFamily>> {
    let unit: Vec<Element> = ball(group, 1)?.elements().to_vec();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let pool: Vec<Vec<Element>> = (0..POOL)
            .map(|_| {
                let k = rng.gen_range(1..=unit.len().min(3));
                unit.choose_multiple(&mut rng, k).cloned().collect()
            })
            .collect();
        let g = group.clone();
        let tag = format!("{side} random #{i} seed={seed}");
        out.push(ParamFamily::new(tag, group, move |r| {
            let b = ball(&g, r)?;
            let members = b.elements().iter().map(|x| {
                let h = fnv1a(&[&seed.to_le_bytes(), &(i as u64).to_le_bytes(), x.to_string().as_bytes()]);
                let shape = &pool[(h % POOL as u64) as usize];
                shape
                    .iter()
                    .map(|s| match side {
                        Side::Left => g.op(x, s),
                        Side::Right => g.op(s, x),
                    })
                    .collect::<Vec<_>>()
            });
            Ok(FiniteFamily::collect(&g, pool.iter().cloned().chain(members).collect::<Vec<_>>()))
        }));
    }
    Ok(out)
}

/// Generator edges plus `count` seeded random families.
pub fn group_battery(side: Side, group: &GroupSpec, seed: u64, count: usize) -> Result<Vec<ParamFamily>> {
    let mut out = vec![edge_family(side, group)];
    out.extend(random_families(side, group, seed, count)?);
    Ok(out)
}

/// The default battery of families bounded in `spec`.
pub fn default_battery(spec: &CoarseStructureSpec, seed: u64) -> Result<Vec<ParamFamily>> {
    battery_with(spec, seed, RANDOM_FAMILIES)
}

/// [`default_battery`] with a chosen number of random families.
pub fn battery_with(spec: &CoarseStructureSpec, seed: u64, count: usize) -> Result<Vec<ParamFamily>> {
    match spec {
        CoarseStructureSpec::LeftGroup(g) => group_battery(Side::Left, g, seed, count),
        CoarseStructureSpec::RightGroup(g) => group_battery(Side::Right, g, seed, count),
        CoarseStructureSpec::ActionInduced { action, bounded } => {
            let mut out = vec![action_translates(action, bounded)];
            for s in action.group().generators() {
                let mut set = bounded.clone();
                set.extend(action.act_on_set(s, bounded));
                set.sort();
                set.dedup();
                out.push(action_translates(action, &set));
            }
            Ok(out)
        }
        CoarseStructureSpec::Pullback { map, .. } => group_battery(Side::Left, map.source(), seed, count),
        CoarseStructureSpec::Transported { map, inner } => Ok(battery_with(inner, seed, count)?
            .into_iter()
            .map(|fam| {
                let m = map.clone();
                let tag = format!("image of {} under {map}", fam.tag());
                ParamFamily::new(tag, map.target(), move |r| m.image_family(&fam.at(r)?))
            })
            .collect()),
    }
}

/// Parses a named family over `group`: `left-mult(a)`, `right-mult(a)`,
/// `left-translates(a,b,..)`, `right-translates(a,b,..)`, `edges(left)`,
/// `edges(right)`, or a constant JSON family `[["1","t"],["x"]]`.
pub fn parse_family(group: &GroupSpec, text: &str) -> Result<ParamFamily> {
    let text = text.trim();
    if text.starts_with('[') {
        let fam = FiniteFamily::from_json(group, text)?;
        return Ok(ParamFamily::constant(text, fam));
    }
    let open = text.find('(').filter(|_| text.ends_with(')'));
    let open = open.ok_or_else(|| Error::parse(0, format!("expected name(args), got `{text}`")))?;
    let inner = &text[open + 1..text.len() - 1];
    let elements = || -> Result<Vec<Element>> {
        split_top(inner, ',').into_iter().map(|s| group.parse_element(s.trim())).collect()
    };
    let one = || -> Result<Element> {
        match elements()?.as_slice() {
            [a] => Ok(a.clone()),
            _ => Err(Error::parse(open + 1, "expected exactly one element")),
        }
    };
    match &text[..open] {
        "left-mult" => Ok(left_multiples(group, &one()?)),
        "right-mult" => Ok(right_multiples(group, &one()?)),
        "left-translates" => Ok(left_translates(group, &elements()?)),
        "right-translates" => Ok(right_translates(group, &elements()?)),
        "edges" => match inner.trim() {
            "left" => Ok(edge_family(Side::Left, group)),
            "right" => Ok(edge_family(Side::Right, group)),
            other => Err(Error::parse(open + 1, format!("expected left or right, got `{other}`"))),
        },
        other => Err(Error::parse(0, format!("unknown family `{other}`"))),
    }
}
