//! Lazy arithmetic in `Δ = ⊕_n PSL2(p_n)^{W_n}`.
//!
//! Elements are formal products of the distinguished generators `g_n, h_n`.
//! Levels commute, so the canonical form sorts factors by level (stably) and
//! freely reduces each level's syllables. A component `(n, w)` is evaluated
//! through the witness bank: `g_n` and `h_n` have `w`-component `(g^w, h^w)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::laws::LawCertificate;
use crate::psl2::{Psl2, Psl2Elem, WitnessBank};
use crate::schedule::Schedule;
use crate::words::{enumerate_reduced, evaluate, Word};

/// Which distinguished generator: `g` (carried by `ĝ`) or `h` (by `ĥ`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gen {
    G,
    H,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeltaFactor {
    pub level: usize,
    pub gen: Gen,
    pub exp: i64,
}

/// A canonical formal product in `Δ`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DeltaWord {
    factors: Vec<DeltaFactor>,
    /// Number of raw factors this value was built from.
    #[serde(skip)]
    supplied: usize,
}

impl PartialEq for DeltaWord {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
    }
}

impl Eq for DeltaWord {}

impl DeltaWord {
    pub fn identity() -> Self {
        DeltaWord::default()
    }

    pub fn generator(level: usize, gen: Gen, exp: i64) -> Self {
        DeltaWord::from_factors(vec![DeltaFactor { level, gen, exp }])
    }

    pub fn from_factors(mut raw: Vec<DeltaFactor>) -> Self {
        let supplied = raw.len();
        raw.sort_by_key(|f| f.level);
        let mut out: Vec<DeltaFactor> = Vec::with_capacity(raw.len());
        for f in raw {
            if f.exp == 0 {
                continue;
            }
            match out.last_mut() {
                Some(top) if top.level == f.level && top.gen == f.gen => {
                    top.exp += f.exp;
                    if top.exp == 0 {
                        out.pop();
                    }
                }
                _ => out.push(f),
            }
        }
        DeltaWord { factors: out, supplied }
    }

    pub fn factors(&self) -> &[DeltaFactor] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn levels(&self) -> BTreeSet<usize> {
        self.factors.iter().map(|f| f.level).collect()
    }

    fn syllables(&self, level: usize) -> impl Iterator<Item = &DeltaFactor> {
        self.factors.iter().filter(move |f| f.level == level)
    }

    /// Length of the level's reduced word in `g, h`.
    pub fn level_len(&self, level: usize) -> u128 {
        self.syllables(level).map(|f| f.exp.unsigned_abs() as u128).sum()
    }

    /// The level's reduced word with `g -> x`, `h -> y`.
    pub fn level_word(&self, level: usize) -> Word {
        let letters = self.syllables(level).flat_map(|f| {
            let l = match f.gen {
                Gen::G => 1,
                Gen::H => 2,
            };
            let l = if f.exp < 0 { -l } else { l };
            std::iter::repeat_n(l, f.exp.unsigned_abs() as usize)
        });
        Word::reduce(2, letters.collect::<Vec<_>>()).expect("letters are in range")
    }

    pub fn inverse(&self) -> DeltaWord {
        let mut f: Vec<DeltaFactor> = self
            .factors
            .iter()
            .rev()
            .map(|f| DeltaFactor { exp: -f.exp, ..*f })
            .collect();
        // Reversal keeps levels grouped but descending; re-sort stably.
        f.sort_by_key(|x| x.level);
        DeltaWord {
            supplied: f.len(),
            factors: f,
        }
    }
}

impl std::fmt::Display for DeltaWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let g = match x.gen {
                Gen::G => 'g',
                Gen::H => 'h',
            };
            write!(f, "{g}{}^{}", x.level, x.exp)?;
        }
        Ok(())
    }
}

/// `Δ` as an abstract group of formal products.
#[derive(Clone, Copy, Debug, Default)]
pub struct DeltaGroup;

impl Group for DeltaGroup {
    type Elem = DeltaWord;

    fn identity(&self) -> DeltaWord {
        DeltaWord::identity()
    }

    fn mul(&self, a: &DeltaWord, b: &DeltaWord) -> DeltaWord {
        let mut raw = a.factors.clone();
        raw.extend_from_slice(&b.factors);
        DeltaWord::from_factors(raw)
    }

    fn inv(&self, a: &DeltaWord) -> DeltaWord {
        a.inverse()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum IdentityReason {
    /// No factors at all.
    EmptyProduct,
    /// Factors were present but every level cancelled: single-generator
    /// levels had zero net exponent and mixed levels reduced freely.
    ZeroNetExponents,
    /// Each argument lives in levels on which a certified law vanishes.
    LawByConstruction { levels: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeltaVerdict {
    NonIdentity {
        level: usize,
        word: Word,
        value: Psl2Elem,
    },
    IdentityCertified(IdentityReason),
    IdentityWindowOnly {
        levels_checked: Vec<usize>,
        components_checked: usize,
    },
}

impl DeltaVerdict {
    pub fn is_non_identity(&self) -> bool {
        matches!(self, DeltaVerdict::NonIdentity { .. })
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, DeltaVerdict::IdentityCertified(_))
    }
}

/// Component evaluation in `Δ` for a given schedule and witness bank.
#[derive(Clone, Copy)]
pub struct Delta<'a> {
    schedule: &'a Schedule,
    bank: &'a WitnessBank,
}

impl<'a> Delta<'a> {
    pub fn new(schedule: &'a Schedule, bank: &'a WitnessBank) -> Self {
        Delta { schedule, bank }
    }

    pub fn schedule(&self) -> &'a Schedule {
        self.schedule
    }

    pub fn bank(&self) -> &'a WitnessBank {
        self.bank
    }

    /// Longest word in `W_n`: the largest `l` with `3l < p_n - 1`.
    pub fn max_w_len(&self, level: usize) -> Result<u128> {
        Ok((self.schedule.prime(level)? - 2) / 3)
    }

    pub fn in_w(&self, level: usize, w: &Word) -> Result<bool> {
        Ok(w.rank() == 2 && !w.is_identity() && w.len() as u128 <= self.max_w_len(level)?)
    }

    /// The `(level, w)` component of `x`.
    pub fn component(&self, x: &DeltaWord, level: usize, w: &Word) -> Result<Psl2Elem> {
        let p = self.schedule.prime_u64(level)?;
        if !self.in_w(level, w)? {
            return Err(Error::NotInW {
                word: w.to_string(),
                level,
                limit_num: p - 1,
            });
        }
        let group = Psl2::new(p)?;
        let (g, h) = self.bank.witness(p, w)?;
        let mut acc = group.identity();
        for f in x.syllables(level) {
            let base = match f.gen {
                Gen::G => &g,
                Gen::H => &h,
            };
            acc = group.mul(&acc, &group.pow(base, f.exp));
        }
        Ok(acc)
    }

    /// Default audit words at a level: every reduced word of length
    /// `<= min(3, max |W_n|)`.
    pub fn default_audit_words(&self, level: usize) -> Result<Vec<Word>> {
        let len = self.max_w_len(level)?.min(3) as usize;
        Ok(enumerate_reduced(2, len).collect())
    }

    /// Three-valued identity test. Candidate components per level are the
    /// level's own reduced word (when it lies in `W_n`), the default audit
    /// words, and `extra` words that fit.
    pub fn identity(&self, x: &DeltaWord, extra: &[Word]) -> Result<DeltaVerdict> {
        if x.is_empty() {
            return Ok(DeltaVerdict::IdentityCertified(if x.supplied == 0 {
                IdentityReason::EmptyProduct
            } else {
                IdentityReason::ZeroNetExponents
            }));
        }
        let mut components = 0usize;
        let levels: Vec<usize> = x.levels().into_iter().collect();
        for &level in &levels {
            let max = self.max_w_len(level)?;
            let mut candidates: Vec<Word> = Vec::new();
            if x.level_len(level) <= max {
                candidates.push(x.level_word(level));
            }
            candidates.extend(self.default_audit_words(level)?);
            candidates.extend(extra.iter().filter(|w| w.rank() == 2 && !w.is_identity() && w.len() as u128 <= max).cloned());
            let mut seen = BTreeSet::new();
            for w in candidates {
                if !seen.insert(w.clone()) {
                    continue;
                }
                components += 1;
                let value = self.component(x, level, &w)?;
                if !value.is_identity() {
                    return Ok(DeltaVerdict::NonIdentity { level, word: w, value });
                }
            }
        }
        Ok(DeltaVerdict::IdentityWindowOnly {
            levels_checked: levels,
            components_checked: components,
        })
    }

    /// Verdict for `law(args)`: certified outright when every argument is
    /// supported on levels the law certificate covers; otherwise the flat
    /// product is tested.
    pub fn law_image_identity(&self, law: &LawCertificate, args: &[DeltaWord], extra: &[Word]) -> Result<DeltaVerdict> {
        let levels: BTreeSet<usize> = args.iter().flat_map(|a| a.levels()).collect();
        if levels.iter().all(|&l| law.covers(l)) {
            return Ok(DeltaVerdict::IdentityCertified(IdentityReason::LawByConstruction {
                levels: levels.into_iter().collect(),
            }));
        }
        let flat = evaluate(&law.word, args, &DeltaGroup)?;
        self.identity(&flat, extra)
    }

    /// Re-evaluates a non-identity verdict from scratch.
    pub fn recheck(&self, x: &DeltaWord, verdict: &DeltaVerdict) -> Result<bool> {
        match verdict {
            DeltaVerdict::NonIdentity { level, word, value } => {
                let v = self.component(x, *level, word)?;
                Ok(v == *value && !v.is_identity())
            }
            _ => Ok(true),
        }
    }
}
