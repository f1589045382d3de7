use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::element::Element;
use crate::error::{Error, Result};

/// Largest rank accepted for `Z^n` and `F(n)`.
pub const MAX_RANK: usize = 26;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupKind {
    FreeAbelian(usize),
    Free(usize),
    DihInf,
    CyclicMod(u64),
    Product(Box<GroupSpec>, Box<GroupSpec>),
}

/// A catalog group with its default inverse-closed generating set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    kind: GroupKind,
    generators: Vec<Element>,
}

impl GroupSpec {
    pub fn free_abelian(rank: usize) -> Result<Self> {
        check_rank("Z^n", rank)?;
        let mut generators = Vec::with_capacity(2 * rank);
        for i in 0..rank {
            for sign in [1, -1] {
                let mut v = vec![0; rank];
                v[i] = sign;
                generators.push(Element::Abelian(v));
            }
        }
        Ok(Self { kind: GroupKind::FreeAbelian(rank), generators })
    }

    pub fn integers() -> Self {
        Self::free_abelian(1).expect("rank 1 is valid")
    }

    pub fn free(rank: usize) -> Result<Self> {
        check_rank("F(n)", rank)?;
        let generators = (1..=rank as i32)
            .flat_map(|k| [Element::Free(vec![k]), Element::Free(vec![-k])])
            .collect();
        Ok(Self { kind: GroupKind::Free(rank), generators })
    }

    /// `<x, t | t^-1 x t = x^-1, t^2 = 1>` generated by `x, x^-1, t`.
    pub fn dihedral() -> Self {
        Self {
            kind: GroupKind::DihInf,
            generators: vec![
                Element::dihedral(1, false),
                Element::dihedral(-1, false),
                Element::dihedral(0, true),
            ],
        }
    }

    pub fn cyclic(modulus: u64) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::UnsupportedRank { group: "Zmod(n)".into(), rank: modulus as i64 });
        }
        let mut generators = Vec::new();
        if modulus > 1 {
            generators.push(Element::Residue { value: 1, modulus });
        }
        if modulus > 2 {
            generators.push(Element::Residue { value: modulus - 1, modulus });
        }
        Ok(Self { kind: GroupKind::CyclicMod(modulus), generators })
    }

    /// The one-point group `Zmod(1)`.
    pub fn trivial() -> Self {
        Self::cyclic(1).expect("modulus 1 is valid")
    }

    pub fn product(a: GroupSpec, b: GroupSpec) -> Self {
        let mut generators = Vec::with_capacity(a.generators.len() + b.generators.len());
        let (ea, eb) = (a.identity(), b.identity());
        for s in &a.generators {
            generators.push(Element::pair(s.clone(), eb.clone()));
        }
        for s in &b.generators {
            generators.push(Element::pair(ea.clone(), s.clone()));
        }
        Self { kind: GroupKind::Product(Box::new(a), Box::new(b)), generators }
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn is_abelian(&self) -> bool {
        match &self.kind {
            GroupKind::FreeAbelian(_) | GroupKind::CyclicMod(_) => true,
            GroupKind::Free(rank) => *rank == 1,
            GroupKind::DihInf => false,
            GroupKind::Product(a, b) => a.is_abelian() && b.is_abelian(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.kind {
            GroupKind::CyclicMod(_) => true,
            GroupKind::Product(a, b) => a.is_finite() && b.is_finite(),
            _ => false,
        }
    }

    pub fn identity(&self) -> Element {
        match &self.kind {
            GroupKind::FreeAbelian(n) => Element::Abelian(vec![0; *n]),
            GroupKind::Free(_) => Element::Free(Vec::new()),
            GroupKind::DihInf => Element::dihedral(0, false),
            GroupKind::CyclicMod(m) => Element::Residue { value: 0, modulus: *m },
            GroupKind::Product(a, b) => Element::pair(a.identity(), b.identity()),
        }
    }

    /// Group law on normal forms. Inputs are assumed valid; use
    /// [`GroupSpec::multiply`] for checked input.
    pub fn op(&self, a: &Element, b: &Element) -> Element {
        match (&self.kind, a, b) {
            (GroupKind::FreeAbelian(_), Element::Abelian(u), Element::Abelian(v)) => {
                Element::Abelian(u.iter().zip(v).map(|(x, y)| x + y).collect())
            }
            (GroupKind::Free(_), Element::Free(u), Element::Free(v)) => {
                let mut w = u.clone();
                for &l in v {
                    if w.last() == Some(&-l) {
                        w.pop();
                    } else {
                        w.push(l);
                    }
                }
                Element::Free(w)
            }
            // t x^k = x^-k t
            (
                GroupKind::DihInf,
                Element::Dihedral { shift: a, flip: f },
                Element::Dihedral { shift: b, flip: g },
            ) => Element::Dihedral { shift: if *f { a - b } else { a + b }, flip: f ^ g },
            (GroupKind::CyclicMod(m), Element::Residue { value: a, .. }, Element::Residue { value: b, .. }) => {
                Element::Residue { value: ((*a as u128 + *b as u128) % *m as u128) as u64, modulus: *m }
            }
            (GroupKind::Product(ga, gb), Element::Pair(a1, a2), Element::Pair(b1, b2)) => {
                Element::pair(ga.op(a1, b1), gb.op(a2, b2))
            }
            _ => panic!("element kinds do not match group {self}: {a:?}, {b:?}"),
        }
    }

    pub fn inv(&self, a: &Element) -> Element {
        match (&self.kind, a) {
            (GroupKind::FreeAbelian(_), Element::Abelian(v)) => Element::Abelian(v.iter().map(|c| -c).collect()),
            (GroupKind::Free(_), Element::Free(w)) => Element::Free(w.iter().rev().map(|l| -l).collect()),
            (GroupKind::DihInf, Element::Dihedral { shift, flip }) => {
                // x^n t is an involution
                if *flip {
                    a.clone()
                } else {
                    Element::dihedral(-shift, false)
                }
            }
            (GroupKind::CyclicMod(m), Element::Residue { value, .. }) => {
                Element::Residue { value: (m - value) % m, modulus: *m }
            }
            (GroupKind::Product(ga, gb), Element::Pair(x, y)) => Element::pair(ga.inv(x), gb.inv(y)),
            _ => panic!("element kind does not match group {self}: {a:?}"),
        }
    }

    /// `a^-1 b`
    pub fn left_quotient(&self, a: &Element, b: &Element) -> Element {
        self.op(&self.inv(a), b)
    }

    /// `a b^-1`
    pub fn right_quotient(&self, a: &Element, b: &Element) -> Element {
        self.op(a, &self.inv(b))
    }

    /// `h^-1 a h`
    pub fn conjugate(&self, a: &Element, h: &Element) -> Element {
        self.op(&self.op(&self.inv(h), a), h)
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(self.op(a, b))
    }

    pub fn invert(&self, a: &Element) -> Result<Element> {
        self.validate(a)?;
        Ok(self.inv(a))
    }

    pub fn power(&self, a: &Element, n: i64) -> Element {
        let base = if n < 0 { self.inv(a) } else { a.clone() };
        let mut acc = self.identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.op(&acc, &base);
        }
        acc
    }

    /// Checks that `e` is a normal form of this group.
    pub fn validate(&self, e: &Element) -> Result<()> {
        let bad = |detail: String| Err(Error::MalformedElement { group: self.to_string(), detail });
        match (&self.kind, e) {
            (GroupKind::FreeAbelian(n), Element::Abelian(v)) => {
                if v.len() != *n {
                    return bad(format!("expected {n} coordinates, got {}", v.len()));
                }
                Ok(())
            }
            (GroupKind::Free(rank), Element::Free(w)) => {
                for (i, &l) in w.iter().enumerate() {
                    if l == 0 || l.unsigned_abs() as usize > *rank {
                        return bad(format!("letter {l} outside rank {rank}"));
                    }
                    if i > 0 && w[i - 1] == -l {
                        return bad(format!("word not freely reduced at position {i}"));
                    }
                }
                Ok(())
            }
            (GroupKind::DihInf, Element::Dihedral { .. }) => Ok(()),
            (GroupKind::CyclicMod(m), Element::Residue { value, modulus }) => {
                if modulus != m || value >= m {
                    return bad(format!("residue {value} mod {modulus} not reduced mod {m}"));
                }
                Ok(())
            }
            (GroupKind::Product(a, b), Element::Pair(x, y)) => {
                a.validate(x)?;
                b.validate(y)
            }
            _ => bad(format!("{e:?} is not an element of this group")),
        }
    }

    /// Geodesic word length for the default generating set.
    pub fn word_length(&self, g: &Element) -> usize {
        g.length()
    }

    /// Shortlex-least geodesic word as indices into [`GroupSpec::generators`].
    pub fn geodesic_word(&self, g: &Element) -> Vec<usize> {
        match (&self.kind, g) {
            (GroupKind::Product(a, b), Element::Pair(x, y)) => {
                let mut w = a.geodesic_word(x);
                let offset = a.generators.len();
                w.extend(b.geodesic_word(y).into_iter().map(|i| i + offset));
                w
            }
            _ => g.letters().into_iter().map(|l| l as usize).collect(),
        }
    }

    /// Parses an element string such as `x^-3 t`, `(2,5)`, `a b^-1`.
    ///
    /// Words need not be reduced; the result is the normal form of the product.
    pub fn parse_element(&self, text: &str) -> Result<Element> {
        let mut p = Cursor::new(text);
        let e = self.parse_element_at(&mut p)?;
        p.skip_ws();
        if !p.at_end() {
            return Err(Error::parse(p.pos, "trailing input after element"));
        }
        Ok(e)
    }

    fn parse_element_at(&self, p: &mut Cursor<'_>) -> Result<Element> {
        p.skip_ws();
        match &self.kind {
            GroupKind::FreeAbelian(1) => Ok(Element::integer(p.integer()?)),
            GroupKind::FreeAbelian(n) => {
                p.expect('(')?;
                let mut v = Vec::with_capacity(*n);
                loop {
                    p.skip_ws();
                    v.push(p.integer()?);
                    p.skip_ws();
                    if p.eat(',') {
                        continue;
                    }
                    p.expect(')')?;
                    break;
                }
                if v.len() != *n {
                    return Err(Error::parse(p.pos, format!("expected {n} coordinates, got {}", v.len())));
                }
                Ok(Element::Abelian(v))
            }
            GroupKind::CyclicMod(m) => {
                let n = p.integer()?;
                Ok(Element::Residue { value: n.rem_euclid(*m as i64) as u64, modulus: *m })
            }
            GroupKind::Free(rank) => {
                let rank = *rank;
                self.parse_word(p, |c| {
                    let idx = (c as u8).checked_sub(b'a')? as usize;
                    (c.is_ascii_lowercase() && idx < rank).then(|| Element::Free(vec![idx as i32 + 1]))
                })
            }
            GroupKind::DihInf => self.parse_word(p, |c| match c {
                'x' => Some(Element::dihedral(1, false)),
                't' => Some(Element::dihedral(0, true)),
                _ => None,
            }),
            GroupKind::Product(a, b) => {
                p.expect('(')?;
                let x = a.parse_element_at(p)?;
                p.skip_ws();
                p.expect(',')?;
                let y = b.parse_element_at(p)?;
                p.skip_ws();
                p.expect(')')?;
                Ok(Element::pair(x, y))
            }
        }
    }

    fn parse_word(&self, p: &mut Cursor<'_>, letter: impl Fn(char) -> Option<Element>) -> Result<Element> {
        p.skip_ws();
        if p.eat('1') {
            return Ok(self.identity());
        }
        let mut acc = self.identity();
        let mut any = false;
        loop {
            p.skip_ws();
            let Some(c) = p.peek() else { break };
            let Some(gen) = letter(c) else { break };
            p.bump();
            let exp = if p.eat('^') { p.integer()? } else { 1 };
            acc = self.op(&acc, &self.power(&gen, exp));
            any = true;
        }
        if !any {
            return Err(Error::parse(p.pos, format!("expected a word in the generators of {self}")));
        }
        Ok(acc)
    }
}

fn check_rank(group: &str, rank: usize) -> Result<()> {
    if !(1..=MAX_RANK).contains(&rank) {
        return Err(Error::UnsupportedRank { group: group.into(), rank: rank as i64 });
    }
    Ok(())
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GroupKind::FreeAbelian(1) => write!(f, "Z"),
            GroupKind::FreeAbelian(n) => write!(f, "Z^{n}"),
            GroupKind::Free(n) => write!(f, "F({n})"),
            GroupKind::DihInf => write!(f, "DihInf"),
            GroupKind::CyclicMod(n) => write!(f, "Zmod({n})"),
            GroupKind::Product(a, b) => write!(f, "product({a},{b})"),
        }
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_group_spec(text)
    }
}

/// Parses `Z | Z^n | F(n) | DihInf | Zmod(n) | product(spec,spec)`.
pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    let mut p = Cursor::new(text);
    let g = parse_spec_at(&mut p)?;
    p.skip_ws();
    if !p.at_end() {
        return Err(Error::parse(p.pos, "trailing input after group description"));
    }
    Ok(g)
}

fn parse_spec_at(p: &mut Cursor<'_>) -> Result<GroupSpec> {
    p.skip_ws();
    let start = p.pos;
    let ident = p.ident();
    match ident {
        "Z" => {
            if p.eat('^') {
                let at = p.pos;
                let n = p.integer()?;
                if n < 1 || n as usize > MAX_RANK {
                    return Err(Error::UnsupportedRank { group: format!("Z^{n} (position {at})"), rank: n });
                }
                GroupSpec::free_abelian(n as usize)
            } else {
                Ok(GroupSpec::integers())
            }
        }
        "F" => {
            let n = p.parenthesized_integer()?;
            if n < 1 || n as usize > MAX_RANK {
                return Err(Error::UnsupportedRank { group: "F(n)".into(), rank: n });
            }
            GroupSpec::free(n as usize)
        }
        "Zmod" => {
            let n = p.parenthesized_integer()?;
            if n < 1 {
                return Err(Error::UnsupportedRank { group: "Zmod(n)".into(), rank: n });
            }
            GroupSpec::cyclic(n as u64)
        }
        "DihInf" => Ok(GroupSpec::dihedral()),
        "product" => {
            p.skip_ws();
            p.expect('(')?;
            let a = parse_spec_at(p)?;
            p.skip_ws();
            p.expect(',')?;
            let b = parse_spec_at(p)?;
            p.skip_ws();
            p.expect(')')?;
            Ok(GroupSpec::product(a, b))
        }
        "" => Err(Error::parse(start, "expected a group name")),
        other => Err(Error::parse(start, format!("unknown group `{other}`"))),
    }
}

/// Byte cursor shared by the small recursive-descent parsers in this crate.
pub(crate) struct Cursor<'a> {
    text: &'a str,
    pub(crate) pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Self { text, pos: 0 }
    }

    pub(crate) fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub(crate) fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.peek().map_or_else(|| "end of input".to_string(), |c| format!("`{c}`"));
            Err(Error::parse(self.pos, format!("expected `{c}`, found {found}")))
        }
    }

    pub(crate) fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        &self.text[start..self.pos]
    }

    pub(crate) fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        if self.peek() == Some('-') || self.peek() == Some('+') {
            self.bump();
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| Error::parse(start, "expected an integer"))
    }

    fn parenthesized_integer(&mut self) -> Result<i64> {
        self.skip_ws();
        self.expect('(')?;
        self.skip_ws();
        let n = self.integer()?;
        self.skip_ws();
        self.expect(')')?;
        Ok(n)
    }
}
