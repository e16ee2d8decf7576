//! Words in the free group on two generators `a`, `b`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    /// 0 for `a`, 1 for `b`.
    pub fn generator(self) -> usize {
        match self {
            Letter::A | Letter::AInv => 0,
            Letter::B | Letter::BInv => 1,
        }
    }

    pub fn exponent(self) -> i64 {
        match self {
            Letter::A | Letter::B => 1,
            Letter::AInv | Letter::BInv => -1,
        }
    }

    pub fn from_parts(generator: usize, positive: bool) -> Letter {
        match (generator, positive) {
            (0, true) => Letter::A,
            (0, false) => Letter::AInv,
            (_, true) => Letter::B,
            (_, false) => Letter::BInv,
        }
    }

    /// Character in a two-letter alphabet where upper case marks inverses.
    pub fn to_char_in(self, alphabet: [char; 2]) -> char {
        let c = alphabet[self.generator()];
        if self.exponent() > 0 {
            c.to_ascii_lowercase()
        } else {
            c.to_ascii_uppercase()
        }
    }
}

/// A reduced word; construction through [`Word::parse`] or [`Word::from_letters`]
/// enforces freely-reduced form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Accepts an already reduced sequence.
    pub fn from_letters(letters: Vec<Letter>) -> Result<Self> {
        if letters.windows(2).any(|w| w[0] == w[1].inverse()) {
            return Err(Error::NotReduced);
        }
        Ok(Self { letters })
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self { letters: out }
    }

    /// Parses a string over the alphabet `[lower, lower]`, upper case for inverses.
    /// Whitespace and `*`/`.` separators are ignored.
    pub fn parse_in(s: &str, alphabet: [char; 2]) -> Result<Self> {
        let mut letters = Vec::new();
        for ch in s.chars() {
            if ch.is_whitespace() || ch == '*' || ch == '.' {
                continue;
            }
            let lower = ch.to_ascii_lowercase();
            let gen = alphabet
                .iter()
                .position(|&c| c == lower)
                .ok_or_else(|| Error::Parse(format!("unexpected letter {ch:?}")))?;
            letters.push(Letter::from_parts(gen, ch.is_ascii_lowercase()));
        }
        Self::from_letters(letters)
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::parse_in(s, ['a', 'b'])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    /// Reduced product `self * rhs`.
    pub fn concat(&self, rhs: &Word) -> Word {
        Word::reduce(self.letters.iter().chain(rhs.letters.iter()).copied())
    }

    /// `generator^exponent` as a word.
    pub fn power(generator: usize, exponent: i64) -> Word {
        let l = Letter::from_parts(generator, exponent > 0);
        Word { letters: vec![l; exponent.unsigned_abs() as usize] }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(f), Some(l)) if self.letters.len() > 1 => *f != l.inverse(),
            _ => true,
        }
    }

    /// Splits `w = c u c^-1` with `u` cyclically reduced; returns `(u, c)`.
    pub fn cyclically_reduce(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut k = 0;
        while 2 * k + 1 < l.len() && l[k] == l[l.len() - 1 - k].inverse() {
            k += 1;
        }
        let core = Word { letters: l[k..l.len() - k].to_vec() };
        let conj = Word { letters: l[..k].to_vec() };
        (core, conj)
    }

    /// Maximal runs of one generator as `(generator, exponent)` pairs, left to right.
    pub fn syllables(&self) -> Vec<(usize, i64)> {
        let mut out: Vec<(usize, i64)> = Vec::new();
        for l in &self.letters {
            match out.last_mut() {
                Some((g, e)) if *g == l.generator() => *e += l.exponent(),
                _ => out.push((l.generator(), l.exponent())),
            }
        }
        out
    }

    /// Renders over a custom alphabet, e.g. `['f', 'g']`.
    pub fn render(&self, alphabet: [char; 2]) -> String {
        self.letters.iter().map(|l| l.to_char_in(alphabet)).collect()
    }

    /// Substitutes a word for each generator and freely reduces.
    pub fn substitute(&self, images: [&Word; 2]) -> Word {
        let inv = [images[0].inverse(), images[1].inverse()];
        let mut out = Vec::new();
        for l in &self.letters {
            let w = if l.exponent() > 0 { images[l.generator()] } else { &inv[l.generator()] };
            out.extend_from_slice(&w.letters);
        }
        Word::reduce(out)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        write!(f, "{}", self.render(['a', 'b']))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.render(['a', 'b']).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Number of reduced words of length exactly `len` on two generators.
pub fn reduced_word_count(len: usize) -> u128 {
    if len == 0 {
        1
    } else {
        4 * 3u128.saturating_pow(len as u32 - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclic_reduction_examples() {
        let (u, c) = Word::parse("abA").unwrap().cyclically_reduce();
        assert_eq!((u.to_string(), c.to_string()), ("b".into(), "a".into()));
        let (u, c) = Word::parse("ab").unwrap().cyclically_reduce();
        assert_eq!((u.to_string(), c.to_string()), ("ab".into(), "1".into()));
        let (u, c) = Word::parse("Ababa").unwrap().cyclically_reduce();
        assert_eq!((u.to_string(), c.to_string()), ("bab".into(), "A".into()));
    }

    #[test]
    fn rejects_unreduced() {
        assert_eq!(Word::parse("aA"), Err(Error::NotReduced));
        assert!(Word::parse("ax").is_err());
    }

    #[test]
    fn syllables_and_render() {
        let w = Word::parse("aaBab").unwrap();
        assert_eq!(w.syllables(), vec![(0, 2), (1, -1), (0, 1), (1, 1)]);
        assert_eq!(w.render(['f', 'g']), "ffGfg");
        assert_eq!(Word::power(1, -3).to_string(), "BBB");
    }

    fn letters() -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec(prop::sample::select(Letter::ALL.to_vec()), 0..30)
    }

    proptest! {
        #[test]
        fn cyclic_reduction_is_a_conjugation(raw in letters()) {
            let w = Word::reduce(raw);
            let (u, c) = w.cyclically_reduce();
            prop_assert!(u.is_cyclically_reduced());
            prop_assert_eq!(c.concat(&u).concat(&c.inverse()), w);
        }

        #[test]
        fn inverse_cancels(raw in letters()) {
            let w = Word::reduce(raw);
            prop_assert!(w.concat(&w.inverse()).is_empty());
        }
    }
}
