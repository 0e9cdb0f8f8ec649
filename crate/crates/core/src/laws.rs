//! Combining laws so that vanishing sets union, with tracked length bounds.
//!
//! The combinator is `[u^s, v]` for the shortest conjugator `s` making the
//! result freely nontrivial. If `u` or `v` vanishes on a tuple then so does
//! the commutator, in every group, so containment is structural.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Budget;
use crate::error::{Error, Result};
use crate::psl2::{law_check, Psl2, Psl2Table, TABLE_LIMIT};
use crate::schedule::{Mode, Schedule};
use crate::words::{commutator, enumerate_reduced, explicit_psl2_law, Word};

/// Default radius of the conjugator ball searched by [`combine_pair`].
pub const DEFAULT_RADIUS: usize = 4;

fn check_pair(u: &Word, v: &Word) -> Result<()> {
    if u.rank() != v.rank() {
        return Err(Error::RankMismatch {
            left: u.rank(),
            right: v.rank(),
        });
    }
    if u.is_identity() || v.is_identity() {
        return Err(Error::TrivialWord);
    }
    Ok(())
}

/// `[u^s, v]` for the first conjugator `s` in enumeration order that makes
/// it nontrivial; `|w| <= 64 max(|u|, |v|)` is enforced.
pub fn combine_pair(u: &Word, v: &Word) -> Result<Word> {
    combine_pair_with_radius(u, v, DEFAULT_RADIUS)
}

pub fn combine_pair_with_radius(u: &Word, v: &Word, radius: usize) -> Result<Word> {
    check_pair(u, v)?;
    let rank = u.rank();
    let bound = 64 * u.len().max(v.len()) as u128;
    let accept = |w: Word| -> Result<Word> {
        if w.len() as u128 > bound {
            return Err(Error::BoundViolated {
                what: "combine_pair: 64 max(|u|, |v|)",
                achieved: w.len() as u128,
                bound,
            });
        }
        Ok(w)
    };
    let ball = || std::iter::once(Word::identity(rank)).chain(enumerate_reduced(rank, radius));
    for s in ball() {
        let w = commutator(&u.conjugate_by(&s)?, v)?;
        if !w.is_identity() {
            return accept(w);
        }
    }
    // Only reachable if u^s and v commute for every s in the ball, which
    // cannot happen for nontrivial words of rank >= 2; kept for totality.
    for s in ball() {
        let us = u.conjugate_by(&s)?;
        for t in enumerate_reduced(rank, radius.min(2)) {
            let w = commutator(&us, &v.conjugate_by(&t)?)?;
            if !w.is_identity() {
                return accept(w);
            }
        }
    }
    Err(Error::CombineFailed {
        radius,
        left: u.to_string(),
        right: v.to_string(),
    })
}

/// Outcome of a combination with its length accounting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombineReport {
    pub word: Word,
    pub length: usize,
    pub bound: u128,
    pub bound_ok: bool,
}

/// Balanced binary tree of [`combine_pair`]; the result vanishes wherever
/// any input does. Fails if `|w| > 16 m^2 max |w_i|`.
pub fn combine_many(ws: &[Word]) -> Result<CombineReport> {
    let first = ws.first().ok_or(Error::TrivialWord)?;
    for w in ws {
        if w.rank() != first.rank() {
            return Err(Error::RankMismatch {
                left: first.rank(),
                right: w.rank(),
            });
        }
        if w.is_identity() {
            return Err(Error::TrivialWord);
        }
    }
    let m = ws.len() as u128;
    let max_len = ws.iter().map(Word::len).max().unwrap_or(0) as u128;
    let bound = 16 * m * m * max_len;
    let mut level: Vec<Word> = ws.to_vec();
    while level.len() > 1 {
        level = level
            .par_chunks(2)
            .map(|c| match c {
                [a, b] => combine_pair(a, b),
                [a] => Ok(a.clone()),
                _ => unreachable!("chunks of two"),
            })
            .collect::<Result<Vec<_>>>()?;
    }
    let word = level.pop().expect("non-empty input");
    let length = word.len();
    if length as u128 > bound {
        return Err(Error::BoundViolated {
            what: "combine_many: 16 m^2 max |w_i|",
            achieved: length as u128,
            bound,
        });
    }
    Ok(CombineReport {
        word,
        length,
        bound,
        bound_ok: true,
    })
}

/// The tower `w_1 = law(p_1)`, `w_n = combine_pair(w_{n-1}, law(p_n))`, with
/// `|w_n| < 3072 L(n) + 1408` enforced.
pub fn iterated_law(schedule: &Schedule, n: usize) -> Result<CombineReport> {
    if n == 0 || n > schedule.n_max() {
        return Err(Error::PrefixExceeded(format!(
            "level {n} outside schedule prefix 1..={}",
            schedule.n_max()
        )));
    }
    for m in 1..=n {
        let (l, p) = (schedule.l(m)?, schedule.prime(m)?);
        if l.checked_mul(3).is_none_or(|x| x >= p - 1) {
            return Err(Error::ScheduleUnfit {
                m,
                reason: format!("L({m}) = {l} is not below (p_{m} - 1)/3 with p_{m} = {p}"),
            });
        }
        if m < n {
            let next = schedule.l(m + 1)?;
            if l.checked_mul(64).and_then(|x| x.checked_add(29)).is_none_or(|b| next < b) {
                return Err(Error::ScheduleUnfit {
                    m,
                    reason: format!("L({}) = {next} < 64 L({m}) + 29", m + 1),
                });
            }
        }
    }
    let mut w = explicit_psl2_law(schedule.prime_u64(1)?)?;
    for m in 2..=n {
        w = combine_pair(&w, &explicit_psl2_law(schedule.prime_u64(m)?)?)?;
    }
    let bound = schedule
        .l(n)?
        .checked_mul(3072)
        .and_then(|x| x.checked_add(1408))
        .ok_or(Error::Overflow("3072 L(n) + 1408"))?;
    let length = w.len();
    if length as u128 >= bound {
        return Err(Error::BoundViolated {
            what: "iterated_law: 3072 L(n) + 1408",
            achieved: length as u128,
            bound,
        });
    }
    Ok(CombineReport {
        word: w,
        length,
        bound,
        bound_ok: true,
    })
}

/// A law of `PSL2(p_i)` for every level `i <= n` of a schedule: the tower for
/// fast and slow schedules, and the one-shot tree otherwise (the latter keeps
/// desk-scale words short when `L` grows slowly).
pub fn schedule_law(schedule: &Schedule, n: usize) -> Result<CombineReport> {
    match schedule.mode {
        Mode::Fast | Mode::Slow | Mode::Faster => iterated_law(schedule, n),
        Mode::Minimal | Mode::Custom => {
            if n == 0 || n > schedule.n_max() {
                return Err(Error::PrefixExceeded(format!(
                    "level {n} outside schedule prefix 1..={}",
                    schedule.n_max()
                )));
            }
            let laws = (1..=n)
                .map(|m| explicit_psl2_law(schedule.prime_u64(m)?))
                .collect::<Result<Vec<_>>>()?;
            combine_many(&laws)
        }
    }
}

/// A finite group small enough to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SmallGroup {
    Psl2(u64),
}

impl std::str::FromStr for SmallGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().strip_prefix("psl2:") {
            Some(p) => p
                .parse::<u64>()
                .map(SmallGroup::Psl2)
                .map_err(|_| Error::Parse(format!("bad prime in {s:?}"))),
            None => Err(Error::Parse(format!("group spec must be psl2:P, got {s:?}"))),
        }
    }
}

/// Brute-force oracle: on every tuple of `G^k`, if some `w_i` vanishes then
/// `w` vanishes.
pub fn vanishing_containment_check(w: &Word, ws: &[Word], group: SmallGroup, budget: &Budget) -> Result<bool> {
    match group {
        SmallGroup::Psl2(p) => {
            let order = Psl2::new(p)?.order();
            if order > TABLE_LIMIT {
                return Err(Error::BudgetExceeded {
                    what: "vanishing containment group order",
                    needed: order,
                    limit: TABLE_LIMIT,
                });
            }
            Psl2Table::build(p, budget)?.vanishing_contains(w, ws)
        }
    }
}

/// How a law was confirmed on one level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawMethod {
    /// Exhaustive evaluation over `PSL2(p)^2`.
    Exhaustive,
    /// Containment through the combinator, seeded by the explicit law of
    /// `PSL2(p)`; used when the group is too large to enumerate.
    Construction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelLaw {
    pub level: usize,
    pub prime: u64,
    pub method: LawMethod,
}

/// A word known to be a law of `PSL2(p_i)` (hence of any power of it) for
/// each listed level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawCertificate {
    pub word: Word,
    pub levels: Vec<LevelLaw>,
}

impl LawCertificate {
    /// Certifies [`schedule_law`] for levels `1..=n`, checking exhaustively
    /// wherever the group fits the table limit and the tuple budget.
    pub fn for_schedule(schedule: &Schedule, n: usize, budget: &Budget) -> Result<Self> {
        let word = schedule_law(schedule, n)?.word;
        let mut levels = Vec::with_capacity(n);
        for level in 1..=n {
            let prime = schedule.prime_u64(level)?;
            let order = Psl2::new(prime)?.order();
            let method = if order <= TABLE_LIMIT && order * order <= budget.max_tuples {
                if !law_check(&word, prime, budget)?.is_law {
                    return Err(Error::CertificateFailed(format!(
                        "combined law fails on PSL2({prime}) at level {level}"
                    )));
                }
                LawMethod::Exhaustive
            } else {
                LawMethod::Construction
            };
            levels.push(LevelLaw { level, prime, method });
        }
        Ok(LawCertificate { word, levels })
    }

    pub fn covers(&self, level: usize) -> bool {
        self.levels.iter().any(|l| l.level == level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, Some(2)).unwrap()
    }

    #[test]
    fn combine_equal_generators_uses_a_conjugator() {
        let c = combine_pair(&w("x"), &w("x")).unwrap();
        assert!(!c.is_identity());
        assert!(c.len() <= 64);
        // s = x commutes with x, so the first useful conjugator is y.
        assert_eq!(c, commutator(&w("x").conjugate_by(&w("y")).unwrap(), &w("x")).unwrap());
    }

    #[test]
    fn combine_commutator_and_square() {
        let u = w("xyXY");
        let v = w("xx");
        let c = combine_pair(&u, &v).unwrap();
        assert!(c.len() <= 256);
        let g = SmallGroup::Psl2(3);
        assert!(vanishing_containment_check(&c, &[u, v], g, &Budget::default()).unwrap());
    }

    #[test]
    fn containment_oracle_examples() {
        let b = Budget::default();
        let g = SmallGroup::Psl2(5);
        assert!(vanishing_containment_check(&w("xyXY"), &[w("x")], g, &b).unwrap());
        assert!(!vanishing_containment_check(&w("x"), &[w("y")], g, &b).unwrap());
        assert_eq!("psl2:7".parse::<SmallGroup>().unwrap(), SmallGroup::Psl2(7));
        assert!("s3".parse::<SmallGroup>().is_err());
    }

    #[test]
    fn combine_many_shapes() {
        let one = combine_many(&[w("xy")]).unwrap();
        assert_eq!(one.word, w("xy"));
        let two = combine_many(&[w("xy"), w("xx")]).unwrap();
        assert_eq!(two.word, combine_pair(&w("xy"), &w("xx")).unwrap());
        assert!(combine_many(&[]).is_err());
        assert!(combine_many(&[w("x"), Word::identity(2)]).is_err());
    }

    #[test]
    fn tower_first_level_is_the_explicit_law() {
        let s = Schedule::custom(vec![1, 94, 6045]).unwrap();
        let r = iterated_law(&s, 1).unwrap();
        assert_eq!(r.length, 46);
        assert_eq!(r.bound, 3072 + 1408);
        let bad = Schedule::minimal(3).unwrap();
        assert!(matches!(iterated_law(&bad, 2), Err(Error::ScheduleUnfit { m: 1, .. })));
    }
}
