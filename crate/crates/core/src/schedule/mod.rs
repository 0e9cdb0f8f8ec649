//! Sparse schedules: the data `(L, p, q, (p_n), T)` that drives one sparse
//! wreath product, plus the growth-function algebra used to plan them.

mod function;
pub mod primes;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use function::{pseudo_inverse, FunctionSpec};
pub use primes::{is_prime, prime_for};

/// How many entries of a growth function are checked when a hypothesis of
/// the form `f(Mn) >= c f(n)` must be witnessed on a finite prefix.
pub const DEFAULT_HYPOTHESIS_PREFIX: u128 = 256;

/// Largest range over which `check_sparse` is run when computing flags.
pub const SPARSE_FLAG_RANGE: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Fast,
    Slow,
    Minimal,
    Custom,
    Faster,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Fast => "fast",
            Mode::Slow => "slow",
            Mode::Minimal => "minimal",
            Mode::Custom => "custom",
            Mode::Faster => "faster",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Mode::Fast),
            "slow" => Ok(Mode::Slow),
            "minimal" => Ok(Mode::Minimal),
            "custom" => Ok(Mode::Custom),
            "faster" => Ok(Mode::Faster),
            _ => Err(Error::Parse(format!("unknown schedule mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    /// `p(1) = q(1) = 0` and the sparse recurrence inequalities hold.
    pub recurrence_ok: bool,
    /// `L(m+1) >= 64 L(m) + 29` for every `m < n_max`.
    pub window_ok: bool,
    /// `check_sparse` passes on the table (capped at [`SPARSE_FLAG_RANGE`]).
    pub sparse_ok: bool,
    /// Every `p_n` is prime with `3L(n)+1 < p_n < 6L(n)+2`.
    pub bertrand_ok: bool,
    /// `L` is positive and non-decreasing.
    pub l_monotone: bool,
}

/// Finite prefix of a schedule. Tables are 1-indexed through the accessors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n_max: usize,
    #[serde(rename = "T")]
    pub t: u128,
    pub mode: Mode,
    #[serde(rename = "L")]
    pub l: Vec<u128>,
    pub p: Vec<u128>,
    pub q: Vec<u128>,
    pub primes: Vec<u128>,
    pub flags: Flags,
}

fn at(table: &[u128], n: usize) -> Result<u128> {
    if n == 0 || n > table.len() {
        return Err(Error::InsufficientTable {
            needed: n as u128,
            have: table.len(),
        });
    }
    Ok(table[n - 1])
}

fn checked_pow(base: u128, exp: usize) -> Result<u128> {
    let e = u32::try_from(exp).map_err(|_| Error::Overflow("power"))?;
    base.checked_pow(e).ok_or(Error::Overflow("power"))
}

fn mul3(x: u128) -> Result<u128> {
    x.checked_mul(3).ok_or(Error::Overflow("3x"))
}

/// `p(1) = q(1) = 0`, `p(n+1) = p(n)+q(n)+1`, `q(n+1) = p(n+1)+q(n)+1`.
pub fn minimal_pq(n_max: usize) -> (Vec<u128>, Vec<u128>) {
    let mut p = Vec::with_capacity(n_max);
    let mut q = Vec::with_capacity(n_max);
    for n in 0..n_max {
        if n == 0 {
            p.push(0);
            q.push(0);
        } else {
            let pn = p[n - 1] + q[n - 1] + 1;
            p.push(pn);
            q.push(pn + q[n - 1] + 1);
        }
    }
    (p, q)
}

/// Quadruple enumeration of the two sparseness properties over `1..=range`:
/// (a) for `r` in `{p, q}`, `r(j)-r(k) = r(l)-r(i)` forces `i=k, j=l` or
/// `j=k, i=l`; (b) `q(j)-p(k) = q(l)-p(i)` forces `i=k, j=l`.
pub fn check_sparse(p: &[u128], q: &[u128], range: usize) -> bool {
    let range = range.min(p.len()).min(q.len());
    let p = &p[..range];
    let q = &q[..range];
    // Differences are compared as sums to stay unsigned.
    let collide_a = |r: &[u128]| {
        (0..range).into_par_iter().any(|i| {
            for j in 0..range {
                for k in 0..range {
                    for l in 0..range {
                        if r[j] + r[i] == r[l] + r[k] && !((i == k && j == l) || (j == k && i == l)) {
                            return true;
                        }
                    }
                }
            }
            false
        })
    };
    if collide_a(p) || collide_a(q) {
        return false;
    }
    !(0..range).into_par_iter().any(|i| {
        for j in 0..range {
            for k in 0..range {
                for l in 0..range {
                    if q[j] + p[i] == q[l] + p[k] && !(i == k && j == l) {
                        return true;
                    }
                }
            }
        }
        false
    })
}

/// `F1(l) <= K F2(K l)` for all `l <= range`.
pub fn preceq_check(f1: &[u128], f2: &[u128], k: u128, range: usize) -> Result<bool> {
    let kr = (range as u128)
        .checked_mul(k)
        .ok_or(Error::Overflow("K * range"))?;
    if f2.len() < kr as usize {
        return Err(Error::InsufficientTable {
            needed: kr,
            have: f2.len(),
        });
    }
    if f1.len() < range {
        return Err(Error::InsufficientTable {
            needed: range as u128,
            have: f1.len(),
        });
    }
    for l in 1..=range {
        let rhs = f2[(k as usize) * l - 1]
            .checked_mul(k)
            .ok_or(Error::Overflow("K * F2"))?;
        if f1[l - 1] > rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First `n <= prefix` with `f(m n) < c f(n)`, or `None` if the inequality
/// holds on the whole prefix. Table-backed functions shrink the prefix to
/// their domain.
pub fn first_scaling_failure(f: &FunctionSpec, m: u128, c: u128, prefix: u128) -> Result<Option<u128>> {
    let prefix = match f.domain_limit() {
        Some(len) => prefix.min(len / m.max(1)),
        None => prefix,
    };
    for n in 1..=prefix {
        let lhs = f.eval(m.checked_mul(n).ok_or(Error::Overflow("M * n"))?)?;
        let rhs = f.eval(n)?.checked_mul(c).ok_or(Error::Overflow("c * f(n)"))?;
        if lhs < rhs {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

impl Schedule {
    /// Assembles a schedule from its tables, computing primes and flags.
    pub fn from_tables(mode: Mode, t: u128, l: Vec<u128>, p: Vec<u128>, q: Vec<u128>) -> Result<Self> {
        let n_max = l.len();
        if n_max == 0 {
            return Err(Error::ScheduleUnfit {
                m: 0,
                reason: "empty schedule".into(),
            });
        }
        if p.len() != n_max || q.len() != n_max {
            return Err(Error::ScheduleUnfit {
                m: p.len().min(q.len()) + 1,
                reason: format!("tables disagree in length: L {}, p {}, q {}", n_max, p.len(), q.len()),
            });
        }
        if let Some(i) = l.iter().position(|&x| x == 0) {
            return Err(Error::ScheduleUnfit {
                m: i + 1,
                reason: "L must be positive".into(),
            });
        }
        let primes = l.iter().map(|&x| prime_for(x)).collect::<Result<Vec<_>>>()?;
        let mut s = Schedule {
            name: None,
            n_max,
            t,
            mode,
            l,
            p,
            q,
            primes,
            flags: Flags::default(),
        };
        s.flags = s.compute_flags();
        Ok(s)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// The tiny audit schedule `L = (1, 2)`, `p = (0, 3)`, `q = (0, 9)`.
    pub fn tiny() -> Self {
        Schedule::from_tables(Mode::Custom, 1, vec![1, 2], vec![0, 3], vec![0, 9])
            .expect("tiny schedule is well formed")
            .with_name("tiny")
    }

    /// Minimal `p, q` with `L(n) = n`.
    pub fn minimal(n_max: usize) -> Result<Self> {
        let (p, q) = minimal_pq(n_max);
        let l = (1..=n_max as u128).collect();
        Schedule::from_tables(Mode::Minimal, 1, l, p, q)
    }

    /// Caller-supplied `L` with minimal `p, q`.
    pub fn custom(l: Vec<u128>) -> Result<Self> {
        let (p, q) = minimal_pq(l.len());
        Schedule::from_tables(Mode::Custom, 1, l, p, q)
    }

    /// `L(m) = T^m`, `p(m) = f(T^{m+1})`, `q(m) = 3 f(T^{m+1})` for `m >= 2`,
    /// after witnessing `f(Mn) >= 9 f(n)` on the prefix and `T >= max(M, 65)`.
    pub fn fast(f: &FunctionSpec, m_const: u128, t: u128, n_max: usize) -> Result<Self> {
        if t < m_const.max(65) {
            return Err(Error::ScheduleUnfit {
                m: 0,
                reason: format!("T = {t} must be at least max(M, 65) = {}", m_const.max(65)),
            });
        }
        if let Some(n) = first_scaling_failure(f, m_const, 9, DEFAULT_HYPOTHESIS_PREFIX)? {
            return Err(Error::ScheduleUnfit {
                m: n as usize,
                reason: format!("f({m_const} n) < 9 f(n) at n = {n}"),
            });
        }
        let mut l = Vec::with_capacity(n_max);
        let mut p = Vec::with_capacity(n_max);
        let mut q = Vec::with_capacity(n_max);
        for m in 1..=n_max {
            l.push(checked_pow(t, m)?);
            if m == 1 {
                p.push(0);
                q.push(0);
            } else {
                let v = f.eval(checked_pow(t, m + 1)?)?;
                p.push(v);
                q.push(mul3(v)?);
            }
        }
        Schedule::from_tables(Mode::Fast, t, l, p, q)
    }

    /// `L(m) = g(T^m)`, `p(m) = T^m`, `q(m) = 3 T^m` for `m >= 2`, after
    /// witnessing `g(Mn) >= 93 g(n)` on the prefix and `T >= max(M, 9)`.
    /// `g` defaults to the upper pseudo-inverse of `f`.
    pub fn slow(f: &FunctionSpec, g: Option<&FunctionSpec>, m_const: u128, t: u128, n_max: usize) -> Result<Self> {
        let g = match g {
            Some(g) => g.clone(),
            None => f.upper_inverse()?,
        };
        if t < m_const.max(9) {
            return Err(Error::ScheduleUnfit {
                m: 0,
                reason: format!("T = {t} must be at least max(M, 9) = {}", m_const.max(9)),
            });
        }
        if let Some(n) = first_scaling_failure(&g, m_const, 93, DEFAULT_HYPOTHESIS_PREFIX)? {
            return Err(Error::ScheduleUnfit {
                m: n as usize,
                reason: format!("g({m_const} n) < 93 g(n) at n = {n}"),
            });
        }
        for n in 1..=DEFAULT_HYPOTHESIS_PREFIX.min(g.domain_limit().unwrap_or(u128::MAX)) {
            let gn = g.eval(n)?;
            if f.domain_limit().is_none_or(|len| gn <= len) && f.eval(gn)? != n {
                return Err(Error::ScheduleUnfit {
                    m: n as usize,
                    reason: format!("f(g({n})) != {n}"),
                });
            }
        }
        let mut l = Vec::with_capacity(n_max);
        let mut p = Vec::with_capacity(n_max);
        let mut q = Vec::with_capacity(n_max);
        for m in 1..=n_max {
            let tm = checked_pow(t, m)?;
            l.push(g.eval(tm)?);
            if m == 1 {
                p.push(0);
                q.push(0);
            } else {
                p.push(tm);
                q.push(mul3(tm)?);
            }
        }
        Schedule::from_tables(Mode::Slow, t, l, p, q)
    }

    /// `L(1) = 1`, `L(m+1) = 64 L(m) + 29`, with `p` minimal and `q` the
    /// least value satisfying both the recurrence and `(q(m)-p(m))/2 >= f(L(m+1))`
    /// for `m >= 2`.
    pub fn faster(f: &FunctionSpec, n_max: usize) -> Result<Self> {
        let mut l: Vec<u128> = Vec::with_capacity(n_max + 1);
        l.push(1);
        for m in 1..=n_max {
            let next = l[m - 1]
                .checked_mul(64)
                .and_then(|x| x.checked_add(29))
                .ok_or(Error::Overflow("64 L + 29"))?;
            l.push(next);
        }
        let mut p = vec![0u128];
        let mut q = vec![0u128];
        for m in 2..=n_max {
            let pm = p[m - 2] + q[m - 2] + 1;
            let need = f
                .eval(l[m])?
                .checked_mul(2)
                .and_then(|x| x.checked_add(pm))
                .ok_or(Error::Overflow("p + 2 f(L)"))?;
            let qm = (pm + q[m - 2] + 1).max(need);
            p.push(pm);
            q.push(qm);
        }
        l.truncate(n_max);
        Schedule::from_tables(Mode::Faster, 64, l, p, q)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn l(&self, n: usize) -> Result<u128> {
        at(&self.l, n)
    }

    pub fn p(&self, n: usize) -> Result<u128> {
        at(&self.p, n)
    }

    pub fn q(&self, n: usize) -> Result<u128> {
        at(&self.q, n)
    }

    pub fn prime(&self, n: usize) -> Result<u128> {
        at(&self.primes, n)
    }

    /// `q(n) - p(n)`.
    pub fn gap(&self, n: usize) -> Result<u128> {
        let (p, q) = (self.p(n)?, self.q(n)?);
        q.checked_sub(p).ok_or_else(|| Error::ScheduleUnfit {
            m: n,
            reason: "q(n) < p(n)".into(),
        })
    }

    /// Prime of level `n` as a machine word, as needed for PSL2 arithmetic.
    pub fn prime_u64(&self, n: usize) -> Result<u64> {
        u64::try_from(self.prime(n)?).map_err(|_| Error::Overflow("prime exceeds u64"))
    }

    pub fn id(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!("{}-T{}-n{}", self.mode, self.t, self.n_max),
        }
    }

    pub fn recurrence_holds(&self) -> bool {
        if self.p.first() != Some(&0) || self.q.first() != Some(&0) {
            return false;
        }
        (1..self.n_max).all(|i| {
            let (p0, q0, p1, q1) = (self.p[i - 1], self.q[i - 1], self.p[i], self.q[i]);
            p1 >= p0 + q0 + 1 && q1 >= p1 + q0 + 1
        })
    }

    pub fn window_holds(&self) -> bool {
        self.l
            .windows(2)
            .all(|w| w[0].checked_mul(64).and_then(|x| x.checked_add(29)).is_some_and(|b| w[1] >= b))
    }

    pub fn bertrand_holds(&self) -> bool {
        self.l.iter().zip(&self.primes).all(|(&l, &p)| {
            let lo = l.checked_mul(3).and_then(|x| x.checked_add(1));
            let hi = l.checked_mul(6).and_then(|x| x.checked_add(2));
            matches!((lo, hi), (Some(lo), Some(hi)) if lo < p && p < hi) && is_prime(p)
        })
    }

    fn compute_flags(&self) -> Flags {
        Flags {
            recurrence_ok: self.recurrence_holds(),
            window_ok: self.window_holds(),
            sparse_ok: check_sparse(&self.p, &self.q, self.n_max.min(SPARSE_FLAG_RANGE)),
            bertrand_ok: self.bertrand_holds(),
            l_monotone: self.l.first().is_some_and(|&x| x > 0) && self.l.windows(2).all(|w| w[0] <= w[1]),
        }
    }

    /// Recomputes the flags and reports every invariant that fails.
    pub fn validate(&self) -> ScheduleReport {
        let mut problems = Vec::new();
        let lens = [self.l.len(), self.p.len(), self.q.len(), self.primes.len()];
        if lens.iter().any(|&x| x != self.n_max) {
            problems.push(format!("table lengths {lens:?} differ from n_max {}", self.n_max));
            return ScheduleReport {
                flags: Flags::default(),
                stored_flags_match: false,
                problems,
            };
        }
        let flags = self.compute_flags();
        if !flags.recurrence_ok {
            problems.push("p/q recurrence fails".into());
        }
        if !flags.sparse_ok {
            problems.push("sparseness properties fail".into());
        }
        if !flags.bertrand_ok {
            problems.push("a prime lies outside 3L+1 < p < 6L+2 or is composite".into());
        }
        if !flags.l_monotone {
            problems.push("L is not positive and non-decreasing".into());
        }
        for n in 1..=self.n_max {
            let (p, q) = (self.p[n - 1], self.q[n - 1]);
            if q < p {
                problems.push(format!("q({n}) < p({n})"));
            } else if n > 1 && q - p < self.q[n - 2].saturating_sub(self.p[n - 2]) {
                problems.push(format!("q - p decreases at {n}"));
            }
        }
        ScheduleReport {
            stored_flags_match: flags == self.flags,
            flags,
            problems,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub flags: Flags,
    pub stored_flags_match: bool,
    pub problems: Vec<String>,
}

impl ScheduleReport {
    /// Window growth is a hypothesis of specific theorems, not an invariant
    /// of every schedule, so it does not count against validity.
    pub fn is_valid(&self) -> bool {
        self.problems.is_empty()
    }
}
