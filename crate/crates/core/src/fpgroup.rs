//! Words in free groups, finite presentations with peripheral pairs, and Fox calculus.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FpError {
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("malformed exponent in token {0:?}")]
    MalformedExponent(String),
    #[error("zero exponent in token {0:?}")]
    ZeroExponent(String),
    #[error("generator index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("duplicate or empty generator name {0:?}")]
    BadGeneratorName(String),
    #[error("presentation has no peripheral pairs")]
    NoPeripherals,
}

/// Freely reduced word as a list of (generator index, nonzero exponent) syllables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<(usize, i64)>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn gen(g: usize) -> Self {
        Word(vec![(g, 1)])
    }

    pub fn power_of(g: usize, e: i64) -> Self {
        Word::from_syllables(vec![(g, e)])
    }

    /// Builds a word from arbitrary syllables, reducing freely.
    pub fn from_syllables(syl: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut out: Vec<(usize, i64)> = Vec::new();
        for (g, e) in syl {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some((h, f)) if *h == g => {
                    *f += e;
                    if *f == 0 {
                        out.pop();
                    }
                }
                _ => out.push((g, e)),
            }
        }
        Word(out)
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Letters g^(±1) in order.
    pub fn letters(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.0.iter().flat_map(|&(g, e)| std::iter::repeat_n((g, e.signum()), e.unsigned_abs() as usize))
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::from_syllables(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.mul(b).mul(&a.inverse()).mul(&b.inverse())
    }

    /// Conjugates away matching first/last syllables.
    pub fn cyclically_reduced(&self) -> Word {
        let mut s = self.0.clone();
        loop {
            if s.len() < 2 {
                break;
            }
            let (g0, e0) = s[0];
            let (g1, e1) = s[s.len() - 1];
            if g0 != g1 {
                break;
            }
            s.pop();
            s[0] = (g0, e0 + e1);
            if s[0].1 == 0 {
                s.remove(0);
            }
        }
        Word(s)
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|&(g, _)| g).max()
    }

    pub fn exponent_sum(&self, g: usize) -> i64 {
        self.0.iter().filter(|(h, _)| *h == g).map(|(_, e)| e).sum()
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, &(g, e)) in self.word.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            let name = self.names.get(g).map(String::as_str).unwrap_or("?");
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Parses whitespace-separated tokens `name` or `name^k`.
pub fn parse_word(text: &str, names: &[String]) -> Result<Word, FpError> {
    let mut syl = Vec::new();
    for tok in text.split_whitespace() {
        let (name, exp) = match tok.split_once('^') {
            None => (tok, 1),
            Some((n, e)) => {
                let e: i64 = e.parse().map_err(|_| FpError::MalformedExponent(tok.to_string()))?;
                if e == 0 {
                    return Err(FpError::ZeroExponent(tok.to_string()));
                }
                (n, e)
            }
        };
        let g = names.iter().position(|n| n == name).ok_or_else(|| FpError::UnknownGenerator(name.to_string()))?;
        syl.push((g, exp));
    }
    Ok(Word::from_syllables(syl))
}

/// Element of ℤ[F] as a sparse map word → coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupRingElem(BTreeMap<Word, i64>);

impl GroupRingElem {
    pub fn zero() -> Self {
        GroupRingElem(BTreeMap::new())
    }

    pub fn one() -> Self {
        Self::from_word(Word::identity(), 1)
    }

    pub fn from_word(w: Word, c: i64) -> Self {
        let mut out = Self::zero();
        out.add_term(w, c);
        out
    }

    pub fn add_term(&mut self, w: Word, c: i64) {
        if c == 0 {
            return;
        }
        match self.0.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.0.iter().map(|(w, &c)| (w, c))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &GroupRingElem) -> GroupRingElem {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> GroupRingElem {
        GroupRingElem(self.0.iter().map(|(w, &c)| (w.clone(), -c)).collect())
    }

    pub fn sub(&self, other: &GroupRingElem) -> GroupRingElem {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &GroupRingElem) -> GroupRingElem {
        let mut out = GroupRingElem::zero();
        for (u, a) in self.terms() {
            for (v, b) in other.terms() {
                out.add_term(u.mul(v), a * b);
            }
        }
        out
    }

    pub fn left_mul_word(&self, w: &Word) -> GroupRingElem {
        GroupRingElem(self.0.iter().map(|(u, &c)| (w.mul(u), c)).collect())
    }

    /// Augmentation ε(Σ cᵢwᵢ) = Σ cᵢ.
    pub fn augmentation(&self) -> i64 {
        self.0.values().sum()
    }
}

/// Fox derivative ∂w/∂g.
pub fn fox_derivative(w: &Word, g: usize) -> GroupRingElem {
    let mut out = GroupRingElem::zero();
    let mut prefix = Word::identity();
    for (h, e) in w.letters() {
        let next = prefix.mul(&Word::from_syllables([(h, e)]));
        if h == g {
            if e > 0 {
                out.add_term(prefix.clone(), 1);
            } else {
                out.add_term(next.clone(), -1);
            }
        }
        prefix = next;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Peripheral {
    pub meridian: Word,
    pub longitude: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generator_names: Vec<String>,
    relators: Vec<Word>,
    peripherals: Vec<Peripheral>,
}

impl Presentation {
    /// Validates indices and cyclically reduces relators (with a warning when that changes them).
    pub fn new(
        generator_names: Vec<String>,
        relators: Vec<Word>,
        peripherals: Vec<Peripheral>,
    ) -> Result<Self, FpError> {
        let mut seen = std::collections::BTreeSet::new();
        for n in &generator_names {
            let valid = !n.is_empty() && !n.contains(char::is_whitespace) && !n.contains('^');
            if !valid || !seen.insert(n.clone()) {
                return Err(FpError::BadGeneratorName(n.clone()));
            }
        }
        let n = generator_names.len();
        let check = |w: &Word| match w.max_generator() {
            Some(g) if g >= n => Err(FpError::IndexOutOfRange(g)),
            _ => Ok(()),
        };
        let mut reduced = Vec::with_capacity(relators.len());
        for r in relators {
            check(&r)?;
            let c = r.cyclically_reduced();
            if c != r {
                log::warn!(
                    "relator {} cyclically reduced to {}",
                    r.display(&generator_names),
                    c.display(&generator_names)
                );
            }
            reduced.push(c);
        }
        for p in &peripherals {
            check(&p.meridian)?;
            check(&p.longitude)?;
        }
        Ok(Presentation { generator_names, relators: reduced, peripherals })
    }

    pub fn parse(generators: &[&str], relators: &[&str], peripherals: &[(&str, &str)]) -> Result<Self, FpError> {
        let names: Vec<String> = generators.iter().map(|s| s.to_string()).collect();
        let rels = relators.iter().map(|r| parse_word(r, &names)).collect::<Result<Vec<_>, _>>()?;
        let per = peripherals
            .iter()
            .map(|(m, l)| Ok(Peripheral { meridian: parse_word(m, &names)?, longitude: parse_word(l, &names)? }))
            .collect::<Result<Vec<_>, FpError>>()?;
        Presentation::new(names, rels, per)
    }

    /// ⟨m, l ∣ m l m⁻¹ l⁻¹⟩ with the pair (m, l) as its single peripheral.
    pub fn torus() -> Self {
        let m = Word::gen(0);
        let l = Word::gen(1);
        Presentation {
            generator_names: vec!["m".into(), "l".into()],
            relators: vec![Word::commutator(&m, &l)],
            peripherals: vec![Peripheral { meridian: m, longitude: l }],
        }
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn num_generators(&self) -> usize {
        self.generator_names.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn peripherals(&self) -> &[Peripheral] {
        &self.peripherals
    }

    pub fn num_cusps(&self) -> usize {
        self.peripherals.len()
    }

    pub fn with_peripheral(&self, cusp: usize, p: Peripheral) -> Self {
        let mut out = self.clone();
        out.peripherals[cusp] = p;
        out
    }

    pub fn word_string(&self, w: &Word) -> String {
        w.display(&self.generator_names).to_string()
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, FpError> {
        parse_word(text, &self.generator_names)
    }
}
