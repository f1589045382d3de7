use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

/// Letters of leaf groups stay below this bound, so product factors can
/// be offset without colliding.
const LEAF_LETTER_BOUND: u64 = 256;

/// An element of a catalog group, stored in its unique normal form.
///
/// Equality is structural. The total order is shortlex on the geodesic
/// normal-form word over the ordered generator list of the group, which is
/// the BFS-layer order with a lexicographic tie-break.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Element {
    /// Integer tuple of `Z^n`.
    Abelian(Vec<i64>),
    /// Freely reduced word; letter `k > 0` is generator `k`, `-k` its inverse.
    Free(Vec<i32>),
    /// `x^shift` followed by `t` when `flip` is set.
    Dihedral { shift: i64, flip: bool },
    /// Residue class `value mod modulus`, with `0 <= value < modulus`.
    Residue { value: u64, modulus: u64 },
    Pair(Box<Element>, Box<Element>),
}

impl Element {
    pub fn integer(n: i64) -> Self {
        Element::Abelian(vec![n])
    }

    pub fn dihedral(shift: i64, flip: bool) -> Self {
        Element::Dihedral { shift, flip }
    }

    pub fn pair(a: Element, b: Element) -> Self {
        Element::Pair(Box::new(a), Box::new(b))
    }

    /// The single coordinate of an element of `Z`.
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Element::Abelian(v) if v.len() == 1 => Some(v[0]),
            _ => None,
        }
    }

    /// Length of the geodesic normal-form word.
    pub fn length(&self) -> usize {
        match self {
            Element::Abelian(v) => v.iter().map(|c| c.unsigned_abs() as usize).sum(),
            Element::Free(w) => w.len(),
            Element::Dihedral { shift, flip } => shift.unsigned_abs() as usize + usize::from(*flip),
            Element::Residue { value, modulus } => (*value).min(modulus - value) as usize,
            Element::Pair(a, b) => a.length() + b.length(),
        }
    }

    fn letter_bound(&self) -> u64 {
        match self {
            Element::Pair(a, b) => a.letter_bound() + b.letter_bound(),
            _ => LEAF_LETTER_BOUND,
        }
    }

    /// Shortlex-least geodesic word, as letter codes increasing with the
    /// generator order.
    pub(crate) fn letters(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.length());
        self.push_letters(0, &mut out);
        out
    }

    fn push_letters(&self, offset: u64, out: &mut Vec<u64>) {
        match self {
            Element::Abelian(v) => {
                for (i, &c) in v.iter().enumerate() {
                    let letter = 2 * i as u64 + u64::from(c < 0);
                    out.extend(std::iter::repeat_n(offset + letter, c.unsigned_abs() as usize));
                }
            }
            Element::Free(w) => {
                out.extend(w.iter().map(|&l| {
                    let idx = (l.unsigned_abs() - 1) as u64;
                    offset + 2 * idx + u64::from(l < 0)
                }));
            }
            Element::Dihedral { shift, flip } => {
                let letter = if *shift >= 0 { 0 } else { 1 };
                out.extend(std::iter::repeat_n(offset + letter, shift.unsigned_abs() as usize));
                if *flip {
                    out.push(offset + 2);
                }
            }
            Element::Residue { value, modulus } => {
                let up = *value;
                let down = modulus - value;
                if up <= down {
                    out.extend(std::iter::repeat_n(offset, up as usize));
                } else {
                    out.extend(std::iter::repeat_n(offset + 1, down as usize));
                }
            }
            Element::Pair(a, b) => {
                a.push_letters(offset, out);
                b.push_letters(offset + a.letter_bound(), out);
            }
        }
    }

    /// Structural comparison, used only to break ties between elements of
    /// different groups (which never share a set in practice).
    fn structural_cmp(&self, other: &Self) -> Ordering {
        use Element::*;
        match (self, other) {
            (Abelian(a), Abelian(b)) => a.cmp(b),
            (Free(a), Free(b)) => a.cmp(b),
            (Dihedral { shift: a, flip: f }, Dihedral { shift: b, flip: g }) => (f, a).cmp(&(g, b)),
            (Residue { value: a, modulus: m }, Residue { value: b, modulus: n }) => (m, a).cmp(&(n, b)),
            (Pair(a1, a2), Pair(b1, b2)) => a1.structural_cmp(b1).then_with(|| a2.structural_cmp(b2)),
            _ => self.variant_rank().cmp(&other.variant_rank()),
        }
    }

    fn variant_rank(&self) -> u8 {
        match self {
            Element::Abelian(_) => 0,
            Element::Free(_) => 1,
            Element::Dihedral { .. } => 2,
            Element::Residue { .. } => 3,
            Element::Pair(..) => 4,
        }
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.length()
            .cmp(&other.length())
            .then_with(|| self.letters().cmp(&other.letters()))
            .then_with(|| self.structural_cmp(other))
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, letter: char, exp: i64) -> fmt::Result {
    if exp == 1 {
        write!(f, "{letter}")
    } else {
        write!(f, "{letter}^{exp}")
    }
}

fn free_letter(idx: u32) -> char {
    (b'a' + idx as u8) as char
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Abelian(v) if v.len() == 1 => write!(f, "{}", v[0]),
            Element::Abelian(v) => {
                write!(f, "(")?;
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            Element::Free(w) => {
                if w.is_empty() {
                    return write!(f, "1");
                }
                let mut first = true;
                let mut i = 0;
                while i < w.len() {
                    let base = w[i].unsigned_abs();
                    let sign: i64 = if w[i] > 0 { 1 } else { -1 };
                    let mut j = i;
                    while j < w.len() && w[j] == w[i] {
                        j += 1;
                    }
                    if !first {
                        write!(f, " ")?;
                    }
                    first = false;
                    write_power(f, free_letter(base - 1), sign * (j - i) as i64)?;
                    i = j;
                }
                Ok(())
            }
            Element::Dihedral { shift, flip } => match (*shift, *flip) {
                (0, false) => write!(f, "1"),
                (0, true) => write!(f, "t"),
                (n, false) => write_power(f, 'x', n),
                (n, true) => {
                    write_power(f, 'x', n)?;
                    write!(f, " t")
                }
            },
            Element::Residue { value, .. } => write!(f, "{value}"),
            Element::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
