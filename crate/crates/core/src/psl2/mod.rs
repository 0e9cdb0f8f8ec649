//! Exact arithmetic in `PSL2(p)`, exhaustive law checking and shortest-law search.

mod table;
mod witness;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Budget;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::words::{enumerate_reduced, evaluate, is_prime, reduced_word_count, Word};

pub use table::Psl2Table;
pub use witness::{nonlaw_witness, WitnessBank, WitnessPolicy, DEFAULT_SEED};

/// Largest group for which an explicit multiplication table is built.
pub const TABLE_LIMIT: u128 = 2_500;

/// An element of `PSL2(p)`: a unimodular matrix `[[a, b], [c, d]]` mod `±I`.
///
/// Stored in canonical form: for odd `p` the first nonzero entry in the scan
/// order `a, b, c, d` lies in `1..=(p-1)/2`. Equality is entrywise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Psl2Elem {
    p: u64,
    a: u64,
    b: u64,
    c: u64,
    d: u64,
}

impl Psl2Elem {
    /// Builds the class of `[[a, b], [c, d]]`; entries are reduced mod `p`.
    pub fn make(p: u64, a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let r = |x: i64| x.rem_euclid(p as i64) as u64;
        let (a, b, c, d) = (r(a), r(b), r(c), r(d));
        let det = sub_mod(mul_mod(a, d, p), mul_mod(b, c, p), p);
        if det != 1 % p {
            return Err(Error::NotUnimodular { p, a, b, c, d, det });
        }
        Ok(Self::canonical(p, a, b, c, d))
    }

    pub fn identity(p: u64) -> Self {
        Psl2Elem {
            p,
            a: 1,
            b: 0,
            c: 0,
            d: 1,
        }
    }

    fn canonical(p: u64, a: u64, b: u64, c: u64, d: u64) -> Self {
        let e = Psl2Elem { p, a, b, c, d };
        if p == 2 {
            return e;
        }
        let lead = [a, b, c, d].into_iter().find(|&x| x != 0).unwrap_or(0);
        if lead > (p - 1) / 2 {
            Psl2Elem {
                p,
                a: neg_mod(a, p),
                b: neg_mod(b, p),
                c: neg_mod(c, p),
                d: neg_mod(d, p),
            }
        } else {
            e
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn entries(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.p)
    }

    pub fn mul(&self, o: &Psl2Elem) -> Psl2Elem {
        debug_assert_eq!(self.p, o.p);
        let p = self.p;
        let m = |x, y, z, w| add_mod(mul_mod(x, y, p), mul_mod(z, w, p), p);
        Self::canonical(
            p,
            m(self.a, o.a, self.b, o.c),
            m(self.a, o.b, self.b, o.d),
            m(self.c, o.a, self.d, o.c),
            m(self.c, o.b, self.d, o.d),
        )
    }

    pub fn inverse(&self) -> Psl2Elem {
        let p = self.p;
        Self::canonical(p, self.d, neg_mod(self.b, p), neg_mod(self.c, p), self.a)
    }

    /// Least `n >= 1` with `g^n = e`.
    pub fn order(&self) -> u64 {
        let mut acc = *self;
        let mut n = 1;
        while !acc.is_identity() {
            acc = acc.mul(self);
            n += 1;
        }
        n
    }
}

impl fmt::Display for Psl2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]] mod {}", self.a, self.b, self.c, self.d, self.p)
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    add_mod(a, p - b % p, p)
}

fn neg_mod(a: u64, p: u64) -> u64 {
    (p - a % p) % p
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "{a} not invertible mod {p}");
    s0.rem_euclid(p as i128) as u64
}

/// `PSL2(p)` with matrix arithmetic, as a [`Group`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Psl2 {
    p: u64,
}

impl Psl2 {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Psl2 { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `p(p^2 - 1) / gcd(2, p - 1)`.
    pub fn order(&self) -> u128 {
        let p = self.p as u128;
        let n = p * (p * p - 1);
        if p == 2 {
            n
        } else {
            n / 2
        }
    }

    /// Builds an element from `(a, b, c)` with `a != 0`, solving for `d`.
    pub(crate) fn from_abc(&self, a: u64, b: u64, c: u64) -> Psl2Elem {
        let p = self.p;
        let d = mul_mod(add_mod(1, mul_mod(b, c, p), p), inv_mod(a, p), p);
        Psl2Elem::canonical(p, a, b, c, d)
    }

    /// Builds an element with `a = 0`: `c = -b^{-1}`, `d` free.
    pub(crate) fn from_bd(&self, b: u64, d: u64) -> Psl2Elem {
        let p = self.p;
        Psl2Elem::canonical(p, 0, b, neg_mod(inv_mod(b, p), p), d)
    }
}

impl Group for Psl2 {
    type Elem = Psl2Elem;

    fn identity(&self) -> Psl2Elem {
        Psl2Elem::identity(self.p)
    }

    fn mul(&self, a: &Psl2Elem, b: &Psl2Elem) -> Psl2Elem {
        a.mul(b)
    }

    fn inv(&self, a: &Psl2Elem) -> Psl2Elem {
        a.inverse()
    }

    fn is_identity(&self, a: &Psl2Elem) -> bool {
        a.is_identity()
    }
}

pub fn element_order(g: &Psl2Elem) -> u64 {
    g.order()
}

/// All elements of `PSL2(p)`, each canonical representative exactly once.
pub fn enumerate_group(p: u64, budget: &Budget) -> Result<Vec<Psl2Elem>> {
    let group = Psl2::new(p)?;
    let size = group.order();
    if size > budget.max_elems {
        return Err(Error::BudgetExceeded {
            what: "PSL2 enumeration",
            needed: size,
            limit: budget.max_elems,
        });
    }
    let mut out = Vec::with_capacity(size as usize);
    let keep = |e: Psl2Elem, raw: [u64; 4], out: &mut Vec<Psl2Elem>| {
        if e.entries() == raw {
            out.push(e);
        }
    };
    for a in 1..p {
        for b in 0..p {
            for c in 0..p {
                let d = mul_mod(add_mod(1, mul_mod(b, c, p), p), inv_mod(a, p), p);
                keep(group.from_abc(a, b, c), [a, b, c, d], &mut out);
            }
        }
    }
    for b in 1..p {
        for d in 0..p {
            let e = group.from_bd(b, d);
            keep(e, [0, b, neg_mod(inv_mod(b, p), p), d], &mut out);
        }
    }
    debug_assert_eq!(out.len() as u128, size);
    Ok(out)
}

/// Outcome of an exhaustive law check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawCheck {
    pub is_law: bool,
    /// Tuples visited in lexicographic order up to and including the first
    /// witness (all of them when the word is a law).
    pub checked_tuples: u128,
    pub witness: Option<Vec<Psl2Elem>>,
}

/// Whether `w` vanishes on every tuple of `PSL2(p)^rank`.
pub fn is_law_exhaustive(w: &Word, p: u64, budget: &Budget) -> Result<bool> {
    Ok(law_check(w, p, budget)?.is_law)
}

pub fn law_check(w: &Word, p: u64, budget: &Budget) -> Result<LawCheck> {
    if w.is_identity() {
        return Err(Error::TrivialWord);
    }
    let group = Psl2::new(p)?;
    let size = group.order();
    let k = w.rank() as u32;
    let tuples = size
        .checked_pow(k)
        .filter(|&t| t <= budget.max_tuples)
        .ok_or(Error::BudgetExceeded {
            what: "law check tuples",
            needed: size.saturating_pow(k),
            limit: budget.max_tuples,
        })?;
    if size <= TABLE_LIMIT {
        Psl2Table::build(p, budget)?.law_check(w)
    } else {
        law_check_matrix(w, p, budget, tuples)
    }
}

fn law_check_matrix(w: &Word, p: u64, budget: &Budget, tuples: u128) -> Result<LawCheck> {
    let group = Psl2::new(p)?;
    let elems = enumerate_group(p, budget)?;
    let n = elems.len();
    let k = w.rank();
    let decode = |mut idx: usize| -> Vec<Psl2Elem> {
        let mut t = vec![elems[0]; k];
        for slot in t.iter_mut().rev() {
            *slot = elems[idx % n];
            idx /= n;
        }
        t
    };
    let first = (0..tuples as usize).into_par_iter().find_first(|&idx| {
        let v = evaluate(w, &decode(idx), &group).expect("rank matches");
        !v.is_identity()
    });
    Ok(match first {
        None => LawCheck {
            is_law: true,
            checked_tuples: tuples,
            witness: None,
        },
        Some(idx) => LawCheck {
            is_law: false,
            checked_tuples: idx as u128 + 1,
            witness: Some(decode(idx)),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShortestLaw {
    pub law: Option<Word>,
    pub words_checked: u128,
    pub checked_tuples: u128,
}

/// The first rank-2 law of length `<= max_len` in enumeration order.
pub fn shortest_law_search(p: u64, max_len: usize, budget: &Budget) -> Result<ShortestLaw> {
    let words = reduced_word_count(2, max_len);
    if words > budget.max_words {
        return Err(Error::BudgetExceeded {
            what: "shortest-law words",
            needed: words,
            limit: budget.max_words,
        });
    }
    let table = if Psl2::new(p)?.order() <= TABLE_LIMIT {
        Some(Psl2Table::build(p, budget)?)
    } else {
        None
    };
    let mut out = ShortestLaw {
        law: None,
        words_checked: 0,
        checked_tuples: 0,
    };
    for w in enumerate_reduced(2, max_len) {
        out.words_checked += 1;
        let check = match &table {
            Some(t) => t.law_check(&w)?,
            None => law_check(&w, p, budget)?,
        };
        out.checked_tuples += check.checked_tuples;
        if check.is_law {
            out.law = Some(w);
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{commutator, explicit_psl2_law};

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn make_and_canonical_sign() {
        assert!(Psl2Elem::make(5, 1, 0, 0, 1).unwrap().is_identity());
        assert!(Psl2Elem::make(5, -1, 0, 0, -1).unwrap().is_identity());
        assert_eq!(Psl2Elem::make(5, 2, 0, 0, 3).unwrap().entries(), [2, 0, 0, 3]);
        assert_eq!(Psl2Elem::make(5, 3, 0, 0, 2).unwrap().entries(), [2, 0, 0, 3]);
        assert!(matches!(
            Psl2Elem::make(5, 2, 0, 0, 2),
            Err(Error::NotUnimodular { .. })
        ));
        assert_eq!(Psl2Elem::make(6, 1, 0, 0, 1), Err(Error::NotPrime(6)));
        let g = Psl2Elem::make(2, 1, 1, 0, 1).unwrap();
        assert_eq!(g.entries(), [1, 1, 0, 1]);
    }

    #[test]
    fn orders() {
        assert_eq!(Psl2Elem::identity(5).order(), 1);
        assert_eq!(Psl2Elem::make(5, 1, 1, 0, 1).unwrap().order(), 5);
    }

    #[test]
    fn group_sizes() {
        assert_eq!(enumerate_group(2, &b()).unwrap().len(), 6);
        assert_eq!(enumerate_group(3, &b()).unwrap().len(), 12);
        assert_eq!(enumerate_group(5, &b()).unwrap().len(), 60);
        assert_eq!(enumerate_group(7, &b()).unwrap().len(), 168);
        assert_eq!(enumerate_group(11, &b()).unwrap().len(), 660);
        let small = Budget {
            max_elems: 100,
            ..b()
        };
        assert!(matches!(
            enumerate_group(7, &small),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn enumeration_has_no_duplicates_and_is_closed() {
        let elems = enumerate_group(7, &b()).unwrap();
        let set: std::collections::HashSet<_> = elems.iter().copied().collect();
        assert_eq!(set.len(), elems.len());
        for g in elems.iter().step_by(7) {
            for h in elems.iter().step_by(5) {
                assert!(set.contains(&g.mul(h)));
            }
            assert!(g.mul(&g.inverse()).is_identity());
        }
    }

    #[test]
    fn order_divisibility() {
        for p in [5u64, 7, 11, 13] {
            for g in enumerate_group(p, &b()).unwrap() {
                let n = g.order();
                assert!((p - 1) % n == 0 || p % n == 0 || (p + 1) % n == 0, "p={p} {g}");
            }
        }
    }

    #[test]
    fn law_checks() {
        let w5 = explicit_psl2_law(5).unwrap();
        assert!(is_law_exhaustive(&w5, 5, &b()).unwrap());
        let c = commutator(&Word::parse("x", None).unwrap(), &Word::parse("y", None).unwrap())
            .unwrap();
        let check = law_check(&c, 5, &b()).unwrap();
        assert!(!check.is_law);
        let wit = check.witness.unwrap();
        assert!(!wit[0].mul(&wit[1]).mul(&wit[0].inverse()).mul(&wit[1].inverse()).is_identity());
        assert!(!is_law_exhaustive(&w5, 7, &b()).unwrap());
        // x^2 vanishes on PSL2(2) ≅ S3 only for involutions, so it is not a law.
        assert!(!is_law_exhaustive(&Word::parse("xx", None).unwrap(), 2, &b()).unwrap());
        assert!(is_law_exhaustive(&Word::parse("xxxxxx", None).unwrap(), 2, &b()).unwrap());
    }

    #[test]
    fn matrix_and_table_paths_agree() {
        let w = Word::parse("xyXYxxY", None).unwrap();
        let tiny = Budget { ..b() };
        let via_table = law_check(&w, 7, &tiny).unwrap();
        let via_matrix = law_check_matrix(&w, 7, &tiny, 168 * 168).unwrap();
        assert_eq!(via_table, via_matrix);
        let elems = enumerate_group(7, &b()).unwrap();
        let g = Psl2::new(7).unwrap();
        let mut idx = 0u128;
        let mut brute = None;
        'outer: for x in &elems {
            for y in &elems {
                idx += 1;
                if !evaluate(&w, &[*x, *y], &g).unwrap().is_identity() {
                    brute = Some(vec![*x, *y]);
                    break 'outer;
                }
            }
        }
        assert_eq!(via_table.witness, brute);
        assert_eq!(via_table.checked_tuples, idx);
    }

    #[test]
    fn shortest_laws() {
        assert_eq!(shortest_law_search(5, 1, &b()).unwrap().law, None);
        let s3 = shortest_law_search(2, 6, &b()).unwrap();
        let law = s3.law.expect("S3 has a law of length <= 6");
        assert!(is_law_exhaustive(&law, 2, &b()).unwrap());
    }
}
