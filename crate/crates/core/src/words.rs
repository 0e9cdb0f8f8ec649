//! Free group word calculus.
//!
//! Letters are signed generator indices: `+i` is `x_i`, `-i` is `x_i^{-1}`,
//! with `i` in `1..=rank`. A [`Word`] is always freely reduced.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Group;

/// Generator names for the text format. Uppercase is the inverse.
pub const ALPHABET: &[u8; 26] = b"xyzabcdefghijklmnopqrstuvw";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    rank: usize,
    letters: Vec<i32>,
}

impl Word {
    pub fn identity(rank: usize) -> Self {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    /// Freely reduces `raw`. Fails on a zero or out-of-range letter.
    pub fn reduce<I>(rank: usize, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = i32>,
    {
        if rank == 0 {
            return Err(Error::InvalidLetter { letter: 0, rank });
        }
        let mut letters: Vec<i32> = Vec::new();
        for l in raw {
            if l == 0 || l.unsigned_abs() as usize > rank {
                return Err(Error::InvalidLetter {
                    letter: l as i64,
                    rank,
                });
            }
            if letters.last() == Some(&-l) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Ok(Word { rank, letters })
    }

    /// `x_gen^exp` as a word.
    pub fn generator_power(rank: usize, gen: usize, exp: i64) -> Result<Self> {
        let l = if exp < 0 { -(gen as i32) } else { gen as i32 };
        Word::reduce(rank, std::iter::repeat_n(l, exp.unsigned_abs() as usize))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Result<Word> {
        check_rank(self, other)?;
        let mut out = self.clone();
        out.append_reduced(&other.letters);
        Ok(out)
    }

    fn append_reduced(&mut self, tail: &[i32]) {
        for &l in tail {
            if self.letters.last() == Some(&-l) {
                self.letters.pop();
            } else {
                self.letters.push(l);
            }
        }
    }

    pub fn pow(&self, exp: i64) -> Word {
        let base = if exp < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.rank);
        for _ in 0..exp.unsigned_abs() {
            out.append_reduced(&base.letters);
        }
        out
    }

    /// `s^{-1} self s`.
    pub fn conjugate_by(&self, s: &Word) -> Result<Word> {
        s.inverse().mul(self)?.mul(s)
    }

    /// Exponent sum of each generator, indexed `0..rank`.
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut sums = vec![0i64; self.rank];
        for &l in &self.letters {
            sums[l.unsigned_abs() as usize - 1] += l.signum() as i64;
        }
        sums
    }

    /// Parses either the letter format (`xyXY`, rank ≤ 26) or a JSON array
    /// of signed indices. `1` and the empty string are the identity.
    /// The rank defaults to `max(2, largest index used)`.
    pub fn parse(text: &str, rank: Option<usize>) -> Result<Word> {
        let text = text.trim();
        let raw: Vec<i32> = if text.starts_with('[') {
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("word array: {e}")))?
        } else if text.is_empty() || text == "1" {
            Vec::new()
        } else {
            text.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| {
                    let lower = c.to_ascii_lowercase() as u8;
                    let idx = ALPHABET
                        .iter()
                        .position(|&a| a == lower)
                        .ok_or_else(|| Error::Parse(format!("unknown word letter {c:?}")))?;
                    let g = idx as i32 + 1;
                    Ok(if c.is_ascii_uppercase() { -g } else { g })
                })
                .collect::<Result<_>>()?
        };
        let used = raw.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
        let rank = rank.unwrap_or_else(|| used.max(2));
        Word::reduce(rank, raw)
    }

    pub fn to_json_array(&self) -> String {
        serde_json::to_string(&self.letters).expect("integer array serializes")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        if self.rank > ALPHABET.len() {
            return f.write_str(&self.to_json_array());
        }
        for &l in &self.letters {
            let c = ALPHABET[l.unsigned_abs() as usize - 1] as char;
            let c = if l < 0 { c.to_ascii_uppercase() } else { c };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn check_rank(u: &Word, v: &Word) -> Result<()> {
    if u.rank != v.rank {
        return Err(Error::RankMismatch {
            left: u.rank,
            right: v.rank,
        });
    }
    Ok(())
}

/// Evaluates the word map `w(g_1, ..., g_k)` left to right.
pub fn evaluate<G: Group>(w: &Word, images: &[G::Elem], group: &G) -> Result<G::Elem> {
    if images.len() != w.rank {
        return Err(Error::RankMismatch {
            left: w.rank,
            right: images.len(),
        });
    }
    let inverses: Vec<G::Elem> = images.iter().map(|g| group.inv(g)).collect();
    let mut acc = group.identity();
    for &l in &w.letters {
        let i = l.unsigned_abs() as usize - 1;
        let g = if l > 0 { &images[i] } else { &inverses[i] };
        group.mul_assign(&mut acc, g);
    }
    Ok(acc)
}

/// `[u, v] = u v u^{-1} v^{-1}`, reduced.
pub fn commutator(u: &Word, v: &Word) -> Result<Word> {
    check_rank(u, v)?;
    let mut out = u.clone();
    out.append_reduced(&v.letters);
    out.append_reduced(&u.inverse().letters);
    out.append_reduced(&v.inverse().letters);
    Ok(out)
}

pub fn is_prime(n: u64) -> bool {
    crate::schedule::primes::is_prime(n as u128)
}

/// The law `[[y x^{p-1} y^{-1}, x^p], x^{p+1}]` of `PSL2(p)`; reduced length `8p + 6`.
pub fn explicit_psl2_law(p: u64) -> Result<Word> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let p = p as i64;
    let x = |e: i64| Word::generator_power(2, 1, e);
    let y = Word::generator_power(2, 2, 1)?;
    let conj = y.mul(&x(p - 1)?)?.mul(&y.inverse())?;
    let inner = commutator(&conj, &x(p)?)?;
    commutator(&inner, &x(p + 1)?)
}

/// The rank-8 word `wbar([[x1,x2],[x3,x4]], [[x5,x6],[x7,x8]])`.
pub fn v_word(wbar: &Word) -> Result<Word> {
    if wbar.rank != 2 {
        return Err(Error::RankMismatch {
            left: wbar.rank,
            right: 2,
        });
    }
    if wbar.is_identity() {
        return Err(Error::TrivialWord);
    }
    let g = |i: usize| Word::generator_power(8, i, 1);
    let double = |a: usize| -> Result<Word> {
        commutator(
            &commutator(&g(a)?, &g(a + 1)?)?,
            &commutator(&g(a + 2)?, &g(a + 3)?)?,
        )
    };
    let images = [double(1)?, double(5)?];
    evaluate(wbar, &images, &FreeGroup::new(8))
}

/// Substitutes the given words for the generators of `w`.
pub fn substitute(w: &Word, images: &[Word]) -> Result<Word> {
    let rank = images.first().map(|i| i.rank).unwrap_or(1);
    evaluate(w, images, &FreeGroup::new(rank))
}

/// Free group of the given rank, as a [`Group`].
#[derive(Clone, Copy, Debug)]
pub struct FreeGroup {
    rank: usize,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Self {
        FreeGroup { rank }
    }
}

impl Group for FreeGroup {
    type Elem = Word;

    fn identity(&self) -> Word {
        Word::identity(self.rank)
    }

    fn mul(&self, a: &Word, b: &Word) -> Word {
        let mut out = a.clone();
        out.append_reduced(&b.letters);
        out
    }

    fn mul_assign(&self, acc: &mut Word, rhs: &Word) {
        acc.append_reduced(&rhs.letters);
    }

    fn inv(&self, a: &Word) -> Word {
        a.inverse()
    }
}

/// Letter at position `k` of the enumeration order `x1 < x1^-1 < x2 < ...`.
fn key_letter(k: usize) -> i32 {
    let g = (k / 2 + 1) as i32;
    if k % 2 == 1 {
        -g
    } else {
        g
    }
}

/// Every nontrivial reduced word of length `1..=max_len`, ordered by length
/// and then lexicographically with `x1 < x1^-1 < x2 < x2^-1 < ...`.
pub fn enumerate_reduced(rank: usize, max_len: usize) -> ReducedWords {
    ReducedWords {
        rank,
        max_len,
        current: Vec::new(),
    }
}

pub struct ReducedWords {
    rank: usize,
    max_len: usize,
    current: Vec<usize>,
}

impl ReducedWords {
    fn allowed(&self, prev: Option<usize>, k: usize) -> bool {
        match prev {
            Some(p) => key_letter(p) != -key_letter(k),
            None => true,
        }
    }

    /// Fills positions `from..` with the smallest admissible keys.
    fn fill_min(&mut self, from: usize) {
        for i in from..self.current.len() {
            let prev = if i == 0 { None } else { Some(self.current[i - 1]) };
            let k = (0..2 * self.rank)
                .find(|&k| self.allowed(prev, k))
                .expect("rank >= 1 always leaves an admissible letter");
            self.current[i] = k;
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.current.len();
        for i in (0..n).rev() {
            let prev = if i == 0 { None } else { Some(self.current[i - 1]) };
            let next = (self.current[i] + 1..2 * self.rank).find(|&k| self.allowed(prev, k));
            if let Some(k) = next {
                self.current[i] = k;
                self.fill_min(i + 1);
                return true;
            }
        }
        false
    }
}

impl Iterator for ReducedWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.rank == 0 {
            return None;
        }
        let stepped = !self.current.is_empty() && self.advance();
        if !stepped {
            let len = self.current.len() + 1;
            if len > self.max_len {
                return None;
            }
            self.current = vec![0; len];
            self.fill_min(0);
        }
        Some(Word {
            rank: self.rank,
            letters: self.current.iter().map(|&k| key_letter(k)).collect(),
        })
    }
}

/// Number of nontrivial reduced words of length `1..=max_len` in rank `rank`.
pub fn reduced_word_count(rank: usize, max_len: usize) -> u128 {
    let r = rank as u128;
    (1..=max_len as u32)
        .map(|l| 2 * r * (2 * r - 1).pow(l - 1))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, Some(2)).unwrap()
    }

    #[test]
    fn reduce_cancels() {
        let r = Word::reduce(2, [1, -1, 2]).unwrap();
        assert_eq!(r, w("y"));
        assert_eq!(r.len(), 1);
        assert!(Word::reduce(2, []).unwrap().is_identity());
        assert_eq!(
            Word::reduce(2, [3]),
            Err(Error::InvalidLetter { letter: 3, rank: 2 })
        );
        assert!(Word::reduce(2, [0]).is_err());
    }

    #[test]
    fn explicit_law_unreduced_and_reduced_lengths() {
        // [[y x^4 y^-1, x^5], x^6] written out letter by letter.
        let p = 5usize;
        let mut raw = vec![];
        let conj: Vec<i32> = std::iter::once(2)
            .chain(std::iter::repeat_n(1, p - 1))
            .chain(std::iter::once(-2))
            .collect();
        let conj_inv: Vec<i32> = conj.iter().rev().map(|l| -l).collect();
        let mut inner = conj.clone();
        inner.extend(std::iter::repeat_n(1, p));
        inner.extend(conj_inv);
        inner.extend(std::iter::repeat_n(-1, p));
        let inner_inv: Vec<i32> = inner.iter().rev().map(|l| -l).collect();
        raw.extend(inner.iter().copied());
        raw.extend(std::iter::repeat_n(1, p + 1));
        raw.extend(inner_inv);
        raw.extend(std::iter::repeat_n(-1, p + 1));
        assert_eq!(raw.len(), 10 * p + 6);
        let reduced = Word::reduce(2, raw).unwrap();
        assert_eq!(reduced.len(), 46);
        assert_eq!(reduced, explicit_psl2_law(5).unwrap());
    }

    #[test]
    fn explicit_law_lengths() {
        for (p, len) in [(2, 22), (5, 46), (7, 62), (11, 94), (13, 110)] {
            assert_eq!(explicit_psl2_law(p).unwrap().len(), len);
        }
        assert_eq!(explicit_psl2_law(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn commutators() {
        let c = commutator(&w("x"), &w("y")).unwrap();
        assert_eq!(c.to_string(), "xyXY");
        assert!(commutator(&c, &c).unwrap().is_identity());
        let nrf = commutator(&c, &commutator(&w("y"), &w("X")).unwrap()).unwrap();
        assert!(!nrf.is_identity());
        assert_eq!(nrf.len(), 14);
        assert!(commutator(&w("x"), &Word::identity(3)).is_err());
    }

    #[test]
    fn v_word_lengths() {
        let v = v_word(&w("x")).unwrap();
        assert_eq!(v.len(), 16);
        assert_eq!(v.rank(), 8);
        let v2 = v_word(&w("xy")).unwrap();
        assert_eq!(v2.len(), 32);
        assert_eq!(v_word(&Word::identity(2)), Err(Error::TrivialWord));
    }

    #[test]
    fn enumeration_counts_and_order() {
        let one: Vec<String> = enumerate_reduced(2, 1).map(|w| w.to_string()).collect();
        assert_eq!(one, ["x", "X", "y", "Y"]);
        assert_eq!(enumerate_reduced(2, 2).count(), 16);
        assert_eq!(enumerate_reduced(2, 3).count(), 52);
        assert_eq!(reduced_word_count(2, 3), 52);
        assert_eq!(enumerate_reduced(3, 4).count() as u128, reduced_word_count(3, 4));
        let two: Vec<String> = enumerate_reduced(2, 2)
            .skip(4)
            .take(3)
            .map(|w| w.to_string())
            .collect();
        assert_eq!(two, ["xx", "xy", "xY"]);
        let mut seen = std::collections::HashSet::new();
        for word in enumerate_reduced(2, 4) {
            assert!(seen.insert(word.clone()));
            assert_eq!(Word::reduce(2, word.letters().iter().copied()).unwrap(), word);
        }
        assert_eq!(enumerate_reduced(2, 0).count(), 0);
    }

    #[test]
    fn parse_formats() {
        assert_eq!(Word::parse("[1,-2]", None).unwrap(), w("xY"));
        assert_eq!(Word::parse("1", None).unwrap(), Word::identity(2));
        let big = Word::parse("[8,-3]", None).unwrap();
        assert_eq!(big.rank(), 8);
        assert_eq!(big.to_string(), "eZ");
        assert!(Word::parse("x!", None).is_err());
        assert!(Word::parse("z", Some(2)).is_err());
    }
}
