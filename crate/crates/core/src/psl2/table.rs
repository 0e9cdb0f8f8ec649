use std::collections::HashMap;

use rayon::prelude::*;

use super::{enumerate_group, LawCheck, Psl2Elem, TABLE_LIMIT};
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::words::Word;

/// `PSL2(p)` with elements numbered `0..n` and a full multiplication table.
///
/// Index 0 is not necessarily the identity; use [`Psl2Table::identity_index`].
#[derive(Clone, Debug)]
pub struct Psl2Table {
    p: u64,
    elems: Vec<Psl2Elem>,
    index: HashMap<Psl2Elem, u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
    identity: u32,
    max_tuples: u128,
}

impl Psl2Table {
    pub fn build(p: u64, budget: &Budget) -> Result<Self> {
        let elems = enumerate_group(p, budget)?;
        let n = elems.len();
        if n as u128 > TABLE_LIMIT {
            return Err(Error::BudgetExceeded {
                what: "PSL2 multiplication table",
                needed: n as u128,
                limit: TABLE_LIMIT,
            });
        }
        let index: HashMap<Psl2Elem, u32> =
            elems.iter().enumerate().map(|(i, e)| (*e, i as u32)).collect();
        let mul: Vec<u32> = (0..n * n)
            .into_par_iter()
            .map(|ij| index[&elems[ij / n].mul(&elems[ij % n])])
            .collect();
        let inv = elems.iter().map(|e| index[&e.inverse()]).collect();
        let identity = index[&Psl2Elem::identity(p)];
        Ok(Psl2Table {
            p,
            elems,
            index,
            mul,
            inv,
            identity,
            max_tuples: budget.max_tuples,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn element(&self, i: u32) -> Psl2Elem {
        self.elems[i as usize]
    }

    pub fn elements(&self) -> &[Psl2Elem] {
        &self.elems
    }

    pub fn index_of(&self, e: &Psl2Elem) -> Option<u32> {
        self.index.get(e).copied()
    }

    pub fn identity_index(&self) -> u32 {
        self.identity
    }

    /// Evaluates `w` on a tuple of element indices.
    pub fn eval_indices(&self, w: &Word, tuple: &[u32]) -> u32 {
        let n = self.elems.len();
        let mut acc = self.identity as usize;
        for &l in w.letters() {
            let g = tuple[l.unsigned_abs() as usize - 1];
            let g = if l > 0 { g } else { self.inv[g as usize] };
            acc = self.mul[acc * n + g as usize] as usize;
        }
        acc as u32
    }

    /// Exhaustive law check over `PSL2(p)^rank` in lexicographic tuple order.
    pub fn law_check(&self, w: &Word) -> Result<LawCheck> {
        if w.is_identity() {
            return Err(Error::TrivialWord);
        }
        let n = self.elems.len();
        let k = w.rank();
        let tuples = (n as u128)
            .checked_pow(k as u32)
            .filter(|&t| t <= self.max_tuples)
            .ok_or(Error::BudgetExceeded {
                what: "law check tuples",
                needed: (n as u128).saturating_pow(k as u32),
                limit: self.max_tuples,
            })?;
        let decode = |mut idx: usize| -> Vec<u32> {
            let mut t = vec![0u32; k];
            for slot in t.iter_mut().rev() {
                *slot = (idx % n) as u32;
                idx /= n;
            }
            t
        };
        let first = (0..tuples as usize)
            .into_par_iter()
            .find_first(|&idx| self.eval_indices(w, &decode(idx)) != self.identity);
        Ok(match first {
            None => LawCheck {
                is_law: true,
                checked_tuples: tuples,
                witness: None,
            },
            Some(idx) => LawCheck {
                is_law: false,
                checked_tuples: idx as u128 + 1,
                witness: Some(decode(idx).iter().map(|&i| self.element(i)).collect()),
            },
        })
    }

    /// Whether `w` vanishes on every tuple on which some word of `ws` vanishes.
    pub fn vanishing_contains(&self, w: &Word, ws: &[Word]) -> Result<bool> {
        let k = w.rank();
        for u in ws {
            if u.rank() != k {
                return Err(Error::RankMismatch {
                    left: k,
                    right: u.rank(),
                });
            }
        }
        let n = self.elems.len();
        let tuples = (n as u128)
            .checked_pow(k as u32)
            .filter(|&t| t <= self.max_tuples)
            .ok_or(Error::BudgetExceeded {
                what: "vanishing containment tuples",
                needed: (n as u128).saturating_pow(k as u32),
                limit: self.max_tuples,
            })?;
        let ok = (0..tuples as usize).into_par_iter().all(|mut idx| {
            let mut t = vec![0u32; k];
            for slot in t.iter_mut().rev() {
                *slot = (idx % n) as u32;
                idx /= n;
            }
            let vanishes_somewhere = ws.iter().any(|u| self.eval_indices(u, &t) == self.identity);
            !vanishes_somewhere || self.eval_indices(w, &t) == self.identity
        });
        Ok(ok)
    }
}

impl Group for Psl2Table {
    type Elem = u32;

    fn identity(&self) -> u32 {
        self.identity
    }

    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.mul[*a as usize * self.elems.len() + *b as usize]
    }

    fn inv(&self, a: &u32) -> u32 {
        self.inv[*a as usize]
    }
}
