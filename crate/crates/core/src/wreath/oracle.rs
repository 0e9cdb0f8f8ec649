//! Brute-force model of `Δ Wr Z` on a window of coordinates, used to check
//! the normal-form arithmetic independently.
//!
//! An element is `(f, a)` with `f` stored on `[lo, hi]` as raw factor lists,
//! and `(f, a)(g, b) = (m ↦ f(m) g(m + a), a + b)`.

use std::collections::BTreeMap;

use super::Letter;
use crate::delta::{DeltaFactor, DeltaWord, Gen};
use crate::error::{Error, Result};
use crate::schedule::Schedule;

#[derive(Clone, Debug)]
pub struct WindowedElement {
    lo: i64,
    hi: i64,
    coords: BTreeMap<i64, Vec<DeltaFactor>>,
    shift: i64,
}

impl WindowedElement {
    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// Canonical value at coordinate `m`, which must lie in the window.
    pub fn coordinate(&self, m: i64) -> DeltaWord {
        assert!((self.lo..=self.hi).contains(&m), "coordinate {m} outside window");
        DeltaWord::from_factors(self.coords.get(&m).cloned().unwrap_or_default())
    }
}

/// Evaluates letter sequences by explicit multiplication of functions.
pub struct WindowOracle<'a> {
    schedule: &'a Schedule,
    lo: i64,
    hi: i64,
}

impl<'a> WindowOracle<'a> {
    pub fn new(schedule: &'a Schedule, lo: i64, hi: i64) -> Self {
        WindowOracle { schedule, lo, hi }
    }

    /// Linear scan of the raw table; errors past the last entry.
    fn level_at(&self, gen: Gen, j: i64) -> Result<Option<usize>> {
        let table = match gen {
            Gen::G => &self.schedule.p,
            Gen::H => &self.schedule.q,
        };
        if j < 0 {
            return Ok(None);
        }
        if j as u128 > *table.last().expect("schedules are non-empty") {
            return Err(Error::PrefixExceeded(format!("oracle lookup {j}")));
        }
        Ok(table.iter().position(|&v| v == j as u128).map(|i| i + 1))
    }

    pub fn identity(&self) -> WindowedElement {
        WindowedElement {
            lo: self.lo,
            hi: self.hi,
            coords: BTreeMap::new(),
            shift: 0,
        }
    }

    /// Right multiplication by one letter.
    pub fn push(&self, x: &mut WindowedElement, l: Letter) -> Result<()> {
        match l {
            Letter::T(s) => x.shift += s as i64,
            Letter::Gen(gen, s) => {
                for m in self.lo..=self.hi {
                    if let Some(level) = self.level_at(gen, m + x.shift)? {
                        x.coords.entry(m).or_default().push(DeltaFactor {
                            level,
                            gen,
                            exp: s as i64,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, letters: &[Letter]) -> Result<WindowedElement> {
        let mut x = self.identity();
        for &l in letters {
            self.push(&mut x, l)?;
        }
        Ok(x)
    }
}
