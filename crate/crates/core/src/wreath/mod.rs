//! The sparse wreath product `Γ(L) = <ĝ, ĥ, t> <= Δ Wr Z`.
//!
//! An element is `(θ, t^a)` with `θ` a formal product of factors
//! `(ĝ^α)^{t^β}` or `(ĥ^α)^{t^β}`. Convention: `(ĝ^α)^{t^β}` contributes
//! `ĝ(m - β)^α` to coordinate `m`, so the word `t^{-k} ĝ t^k` has `β = k`.
//! `ĝ(p(n)) = g_n`, `ĥ(q(n)) = h_n`, and both are trivial elsewhere.

pub mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::delta::{Delta, DeltaFactor, DeltaVerdict, DeltaWord, Gen};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::laws::LawCertificate;
use crate::schedule::Schedule;
use crate::words::evaluate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WreathFactor {
    pub gen: Gen,
    pub exp: i64,
    pub shift: i64,
}

/// A letter of `S = {ĝ, ĥ, t}` or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    Gen(Gen, i8),
    T(i8),
}

pub const LETTERS: [Letter; 6] = [
    Letter::Gen(Gen::G, 1),
    Letter::Gen(Gen::G, -1),
    Letter::Gen(Gen::H, 1),
    Letter::Gen(Gen::H, -1),
    Letter::T(1),
    Letter::T(-1),
];

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (base, sign) = match self {
            Letter::Gen(Gen::G, s) => ("ĝ", *s),
            Letter::Gen(Gen::H, s) => ("ĥ", *s),
            Letter::T(s) => ("t", *s),
        };
        f.write_str(base)?;
        if sign < 0 {
            f.write_str("⁻¹")?;
        }
        Ok(())
    }
}

/// Parses a word over `{ĝ, ĥ, t}`. `g`/`ĝ`, `h`/`ĥ`, `t` are generators;
/// `G`, `H`, `T` or a trailing `⁻¹` (or `^-1`) invert a letter.
pub fn parse_letters(text: &str) -> Result<Vec<Letter>> {
    let mut out: Vec<Letter> = Vec::new();
    let mut rest = text;
    while let Some(c) = rest.chars().next() {
        let mut step = c.len_utf8();
        let letter = match c {
            'g' | 'ĝ' => Some(Letter::Gen(Gen::G, 1)),
            'G' => Some(Letter::Gen(Gen::G, -1)),
            'h' | 'ĥ' => Some(Letter::Gen(Gen::H, 1)),
            'H' => Some(Letter::Gen(Gen::H, -1)),
            't' => Some(Letter::T(1)),
            'T' => Some(Letter::T(-1)),
            '\u{0302}' => None,
            c if c.is_whitespace() || c == '·' || c == '*' => None,
            '⁻' | '^' => {
                let suffix = if rest.starts_with("⁻¹") {
                    "⁻¹"
                } else if rest.starts_with("^-1") {
                    "^-1"
                } else {
                    return Err(Error::Parse(format!("bad exponent in {text:?}")));
                };
                step = suffix.len();
                match out.last_mut() {
                    Some(Letter::Gen(_, s)) | Some(Letter::T(s)) => *s = -*s,
                    None => return Err(Error::Parse(format!("dangling inverse in {text:?}"))),
                }
                None
            }
            other => {
                return Err(Error::InvalidLetter {
                    letter: other as i64,
                    rank: 3,
                })
            }
        };
        out.extend(letter);
        rest = &rest[step..];
    }
    Ok(out)
}

/// Element of `Γ(L)` as a factor list plus net shift, with an upper bound
/// on its word length in `S`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WreathNormalForm {
    factors: Vec<WreathFactor>,
    net_shift: i64,
    length_bound: u64,
}

impl WreathNormalForm {
    pub fn identity() -> Self {
        WreathNormalForm::default()
    }

    pub fn letter(l: Letter) -> Self {
        let mut x = WreathNormalForm::identity();
        x.push_letter(l);
        x
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut x = WreathNormalForm::identity();
        for &l in letters {
            x.push_letter(l);
        }
        x
    }

    /// `word_to_nf`: parse and fold letters left to right.
    pub fn parse(text: &str) -> Result<Self> {
        Ok(WreathNormalForm::from_letters(&parse_letters(text)?))
    }

    /// `ĝ^{t^β}` or `ĥ^{t^β}` with its natural length bound `2|β| + 1`.
    pub fn shifted(gen: Gen, exp: i64, shift: i64) -> Self {
        let mut x = WreathNormalForm::identity();
        x.push_factor(WreathFactor { gen, exp, shift });
        x.length_bound = 2 * shift.unsigned_abs() + exp.unsigned_abs();
        x
    }

    pub fn push_letter(&mut self, l: Letter) {
        match l {
            Letter::Gen(gen, s) => self.push_factor(WreathFactor {
                gen,
                exp: s as i64,
                shift: -self.net_shift,
            }),
            Letter::T(s) => self.net_shift += s as i64,
        }
        self.length_bound += 1;
    }

    fn push_factor(&mut self, f: WreathFactor) {
        if f.exp == 0 {
            return;
        }
        match self.factors.last_mut() {
            Some(top) if top.gen == f.gen && top.shift == f.shift => {
                top.exp += f.exp;
                if top.exp == 0 {
                    self.factors.pop();
                }
            }
            _ => self.factors.push(f),
        }
    }

    pub fn factors(&self) -> &[WreathFactor] {
        &self.factors
    }

    pub fn net_shift(&self) -> i64 {
        self.net_shift
    }

    pub fn length_bound(&self) -> u64 {
        self.length_bound
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty() && self.net_shift == 0
    }

    /// `max |β|` over factors, 0 when there are none.
    pub fn maximal_shift(&self) -> u64 {
        self.factors.iter().map(|f| f.shift.unsigned_abs()).max().unwrap_or(0)
    }

    /// `nf_mul`: `y`'s shifts move by `-x.net_shift`.
    pub fn mul(&self, y: &WreathNormalForm) -> WreathNormalForm {
        let mut out = self.clone();
        out.mul_assign(y);
        out
    }

    pub fn mul_assign(&mut self, y: &WreathNormalForm) {
        let a = self.net_shift;
        for f in &y.factors {
            self.push_factor(WreathFactor {
                shift: f.shift - a,
                ..*f
            });
        }
        self.net_shift += y.net_shift;
        self.length_bound = self.length_bound.saturating_add(y.length_bound);
    }

    pub fn inverse(&self) -> WreathNormalForm {
        let a = self.net_shift;
        WreathNormalForm {
            factors: self
                .factors
                .iter()
                .rev()
                .map(|f| WreathFactor {
                    gen: f.gen,
                    exp: -f.exp,
                    shift: f.shift + a,
                })
                .collect(),
            net_shift: -a,
            length_bound: self.length_bound,
        }
    }

    /// Net exponent of each class `(kind, β)`.
    pub fn class_exponents(&self) -> BTreeMap<(Gen, i64), i64> {
        let mut m = BTreeMap::new();
        for f in &self.factors {
            *m.entry((f.gen, f.shift)).or_insert(0) += f.exp;
        }
        m
    }
}

impl fmt::Display for WreathNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for x in &self.factors {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let g = match x.gen {
                Gen::G => "ĝ",
                Gen::H => "ĥ",
            };
            write!(f, "({g}^{})^(t^{})", x.exp, x.shift)?;
        }
        if self.net_shift != 0 || first {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "t^{}", self.net_shift)?;
        }
        Ok(())
    }
}

/// `Γ(L)` as an abstract group; multiplication does not depend on `L`.
#[derive(Clone, Copy, Debug, Default)]
pub struct WreathGroup;

impl Group for WreathGroup {
    type Elem = WreathNormalForm;

    fn identity(&self) -> WreathNormalForm {
        WreathNormalForm::identity()
    }

    fn mul(&self, a: &WreathNormalForm, b: &WreathNormalForm) -> WreathNormalForm {
        a.mul(b)
    }

    fn mul_assign(&self, acc: &mut WreathNormalForm, rhs: &WreathNormalForm) {
        acc.mul_assign(rhs);
    }

    fn inv(&self, a: &WreathNormalForm) -> WreathNormalForm {
        a.inverse()
    }

    fn is_identity(&self, a: &WreathNormalForm) -> bool {
        a.factors.is_empty() && a.net_shift == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NonIdentityReason {
    NetShift { shift: i64 },
    Coordinate { coord: i64, verdict: DeltaVerdict },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum WreathIdentityReason {
    /// No factors and no shift.
    EmptyNormalForm,
    /// Every in-window coordinate is certified and the tail criterion holds
    /// from `threshold` on.
    Tail { threshold: usize, coordinates_checked: usize },
    /// Law image: every argument coordinate lies in certified levels and the
    /// arguments satisfy the tail criterion from `threshold` on.
    LawImage { threshold: usize, coordinates_checked: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WreathVerdict {
    NonIdentity(NonIdentityReason),
    IdentityCertified(WreathIdentityReason),
    IdentityWindowOnly { coordinates_checked: usize, undecided: Vec<i64> },
}

impl WreathVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, WreathVerdict::IdentityCertified(_))
    }

    pub fn is_non_identity(&self) -> bool {
        matches!(self, WreathVerdict::NonIdentity(_))
    }
}

/// Coordinates and identity testing of `Γ(L)` for a fixed schedule.
#[derive(Clone, Copy)]
pub struct SparseWreath<'a> {
    schedule: &'a Schedule,
}

impl<'a> SparseWreath<'a> {
    /// Requires strictly increasing `p` and `q`, so image lookups are exact.
    pub fn new(schedule: &'a Schedule) -> Result<Self> {
        for (name, t) in [("p", &schedule.p), ("q", &schedule.q)] {
            if let Some(i) = t.windows(2).position(|w| w[0] >= w[1]) {
                return Err(Error::ScheduleUnfit {
                    m: i + 2,
                    reason: format!("{name} is not strictly increasing"),
                });
            }
        }
        Ok(SparseWreath { schedule })
    }

    pub fn schedule(&self) -> &'a Schedule {
        self.schedule
    }

    /// Level `n` with `table(n) = j`, if any. Past the prefix the sparse
    /// recurrence still rules out the gap before the next entry.
    fn level_of(&self, gen: Gen, j: i64) -> Result<Option<usize>> {
        if j < 0 {
            return Ok(None);
        }
        let s = self.schedule;
        let table = match gen {
            Gen::G => &s.p,
            Gen::H => &s.q,
        };
        let j = j as u128;
        let last = *table.last().expect("schedules are non-empty");
        if j <= last {
            return Ok(table.binary_search(&j).ok().map(|i| i + 1));
        }
        let (pn, qn) = (*s.p.last().unwrap(), *s.q.last().unwrap());
        // p(n+1) >= p(n) + q(n) + 1 and q(n+1) >= p(n+1) + q(n) + 1.
        let safe = match gen {
            Gen::G => pn + qn,
            Gen::H => pn + 2 * qn + 1,
        };
        if s.flags.recurrence_ok && j <= safe {
            return Ok(None);
        }
        Err(Error::PrefixExceeded(format!(
            "coordinate lookup {j} beyond the {} table prefix (n_max = {})",
            match gen {
                Gen::G => "p",
                Gen::H => "q",
            },
            s.n_max
        )))
    }

    /// `θ(m)` as a formal product in `Δ`.
    pub fn coordinate_eval(&self, x: &WreathNormalForm, m: i64) -> Result<DeltaWord> {
        let mut raw = Vec::new();
        for f in &x.factors {
            if let Some(level) = self.level_of(f.gen, m - f.shift)? {
                raw.push(DeltaFactor {
                    level,
                    gen: f.gen,
                    exp: f.exp,
                });
            }
        }
        Ok(DeltaWord::from_factors(raw))
    }

    fn check_window(&self, window: usize) -> Result<()> {
        if window > self.schedule.n_max {
            return Err(Error::PrefixExceeded(format!(
                "window {window} exceeds n_max {}",
                self.schedule.n_max
            )));
        }
        Ok(())
    }

    /// `{β + p(n)}` for `ĝ` factors and `{β + q(n)}` for `ĥ` factors,
    /// `n <= window`: a superset of the support restricted to the window.
    pub fn support_candidates(&self, x: &WreathNormalForm, window: usize) -> Result<BTreeSet<i64>> {
        self.check_window(window)?;
        let s = self.schedule;
        let mut out = BTreeSet::new();
        for f in &x.factors {
            let table = match f.gen {
                Gen::G => &s.p,
                Gen::H => &s.q,
            };
            for &v in &table[..window] {
                out.insert(f.shift + v as i64);
            }
        }
        Ok(out)
    }

    /// Least `n0 >= 2` with `p(n0 - 1) > 2B` and `q(n0) - p(n0) > 2B`.
    ///
    /// Given the sparse recurrence, from level `n0` on every coordinate meets
    /// factors of a single class `(kind, β)`, so its value is the class's
    /// net power of one generator.
    pub fn tail_threshold(&self, max_shift: u64) -> Result<usize> {
        let s = self.schedule;
        if !s.flags.recurrence_ok {
            return Err(Error::ScheduleUnfit {
                m: 0,
                reason: "tail criterion needs the sparse recurrence".into(),
            });
        }
        let two_b = 2 * max_shift as u128;
        for n in 2..=s.n_max {
            if s.p[n - 2] > two_b && s.q[n - 1] - s.p[n - 1] > two_b {
                return Ok(n);
            }
        }
        Err(Error::PrefixExceeded(format!(
            "no tail threshold for maximal shift {max_shift} within n_max {}",
            s.n_max
        )))
    }

    /// Three-valued identity test over levels `1..=window`.
    pub fn identity_test(&self, x: &WreathNormalForm, window: usize, delta: &Delta) -> Result<WreathVerdict> {
        self.check_window(window)?;
        if x.net_shift != 0 {
            return Ok(WreathVerdict::NonIdentity(NonIdentityReason::NetShift { shift: x.net_shift }));
        }
        if x.factors.is_empty() {
            return Ok(WreathVerdict::IdentityCertified(WreathIdentityReason::EmptyNormalForm));
        }
        let candidates = self.support_candidates(x, window)?;
        let mut undecided = Vec::new();
        for &m in &candidates {
            let d = self.coordinate_eval(x, m)?;
            match delta.identity(&d, &[])? {
                v @ DeltaVerdict::NonIdentity { .. } => {
                    return Ok(WreathVerdict::NonIdentity(NonIdentityReason::Coordinate { coord: m, verdict: v }));
                }
                DeltaVerdict::IdentityCertified(_) => {}
                DeltaVerdict::IdentityWindowOnly { .. } => undecided.push(m),
            }
        }
        let classes_cancel = x.class_exponents().values().all(|&e| e == 0);
        if undecided.is_empty() && classes_cancel {
            let threshold = self.tail_threshold(x.maximal_shift())?;
            if threshold <= window {
                return Ok(WreathVerdict::IdentityCertified(WreathIdentityReason::Tail {
                    threshold,
                    coordinates_checked: candidates.len(),
                }));
            }
        }
        Ok(WreathVerdict::IdentityWindowOnly {
            coordinates_checked: candidates.len(),
            undecided,
        })
    }

    /// Identity test for `law(args)`. The flat product is tested first; if
    /// that is inconclusive and every argument has net shift 0, each
    /// coordinate is `law(args(m))`, which vanishes when the arguments'
    /// coordinates lie in levels the law certificate covers.
    pub fn identity_test_law_image(
        &self,
        law: &LawCertificate,
        args: &[WreathNormalForm],
        window: usize,
        delta: &Delta,
    ) -> Result<WreathVerdict> {
        let flat = evaluate(&law.word, args, &WreathGroup)?;
        let verdict = self.identity_test(&flat, window, delta)?;
        if !matches!(verdict, WreathVerdict::IdentityWindowOnly { .. }) {
            return Ok(verdict);
        }
        if args.iter().any(|a| a.net_shift != 0) {
            return Ok(verdict);
        }
        let mut candidates = BTreeSet::new();
        for a in args {
            candidates.extend(self.support_candidates(a, window)?);
        }
        let mut undecided = Vec::new();
        for &m in &candidates {
            let coords = args.iter().map(|a| self.coordinate_eval(a, m)).collect::<Result<Vec<_>>>()?;
            match delta.law_image_identity(law, &coords, &[])? {
                v @ DeltaVerdict::NonIdentity { .. } => {
                    return Ok(WreathVerdict::NonIdentity(NonIdentityReason::Coordinate { coord: m, verdict: v }));
                }
                DeltaVerdict::IdentityCertified(_) => {}
                DeltaVerdict::IdentityWindowOnly { .. } => undecided.push(m),
            }
        }
        let classes_cancel = args.iter().all(|a| a.class_exponents().values().all(|&e| e == 0));
        let b = args.iter().map(WreathNormalForm::maximal_shift).max().unwrap_or(0);
        if undecided.is_empty() && classes_cancel {
            let threshold = self.tail_threshold(b)?;
            if threshold <= window {
                return Ok(WreathVerdict::IdentityCertified(WreathIdentityReason::LawImage {
                    threshold,
                    coordinates_checked: candidates.len(),
                }));
            }
        }
        Ok(WreathVerdict::IdentityWindowOnly {
            coordinates_checked: candidates.len(),
            undecided,
        })
    }
}

/// For all distinct pairs among `ĝ^{t^a}`, `ĥ^{t^b}` with `|a|, |b| <= shift_range`,
/// the supports restricted to levels `1..=window` meet in at most one point.
pub fn support_intersection_check(schedule: &Schedule, shift_range: i64, window: usize) -> Result<bool> {
    Ok(support_intersection_violation(schedule, shift_range, window)?.is_none())
}

/// The first pair whose windowed supports meet twice or more, if any.
pub fn support_intersection_violation(
    schedule: &Schedule,
    shift_range: i64,
    window: usize,
) -> Result<Option<((Gen, i64), (Gen, i64), usize)>> {
    if window > schedule.n_max {
        return Err(Error::PrefixExceeded(format!(
            "window {window} exceeds n_max {}",
            schedule.n_max
        )));
    }
    let mut elems = Vec::new();
    for gen in [Gen::G, Gen::H] {
        for a in -shift_range..=shift_range {
            let table = match gen {
                Gen::G => &schedule.p,
                Gen::H => &schedule.q,
            };
            let support: BTreeSet<i64> = table[..window].iter().map(|&v| v as i64 + a).collect();
            elems.push(((gen, a), support));
        }
    }
    for i in 0..elems.len() {
        for j in i + 1..elems.len() {
            let common = elems[i].1.intersection(&elems[j].1).count();
            if common > 1 {
                return Ok(Some((elems[i].0, elems[j].0, common)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psl2::WitnessBank;

    #[test]
    fn parsing_and_shift_convention() {
        let x = WreathNormalForm::parse("t⁻¹ĝt").unwrap();
        assert_eq!(x.factors(), &[WreathFactor { gen: Gen::G, exp: 1, shift: 1 }]);
        assert_eq!(x.net_shift(), 0);
        assert_eq!(x.length_bound(), 3);
        let k = WreathNormalForm::parse("TTTgttt").unwrap();
        assert_eq!(k.factors()[0].shift, 3);
        assert_eq!(k.length_bound(), 7);
        let t = WreathNormalForm::parse("t").unwrap();
        assert!(t.factors().is_empty());
        assert_eq!(t.net_shift(), 1);
        let gh = WreathNormalForm::parse("ĝĥ").unwrap();
        assert_eq!(gh.factors().len(), 2);
        assert!(gh.factors().iter().all(|f| f.shift == 0));
        assert_eq!(WreathNormalForm::parse("g^-1").unwrap(), WreathNormalForm::parse("G").unwrap());
        assert!(WreathNormalForm::parse("gx").is_err());
    }

    #[test]
    fn multiplication_translates_shifts() {
        let t = WreathNormalForm::parse("t").unwrap();
        let g = WreathNormalForm::parse("g").unwrap();
        let tg = t.mul(&g);
        assert_eq!(tg.factors(), &[WreathFactor { gen: Gen::G, exp: 1, shift: -1 }]);
        assert_eq!(tg.net_shift(), 1);
        assert_eq!(tg, WreathNormalForm::parse("tg").unwrap());
        let x = WreathNormalForm::parse("tgTTh").unwrap();
        assert!(WreathGroup.is_identity(&x.mul(&x.inverse())));
        assert!(WreathGroup.is_identity(&x.inverse().mul(&x)));
        assert_eq!(x.mul(&WreathNormalForm::identity()), x);
    }

    #[test]
    fn commutator_has_zero_net_shift() {
        let x = WreathNormalForm::parse("ttg").unwrap();
        let y = WreathNormalForm::parse("hT").unwrap();
        let c = WreathGroup.commutator(&x, &y);
        assert_eq!(c.net_shift(), 0);
        assert!(c.maximal_shift() <= x.length_bound() + y.length_bound());
    }

    #[test]
    fn coordinates() {
        let s = Schedule::minimal(8).unwrap();
        let w = SparseWreath::new(&s).unwrap();
        let g = WreathNormalForm::parse("g").unwrap();
        assert_eq!(w.coordinate_eval(&g, 12).unwrap(), DeltaWord::generator(4, Gen::G, 1));
        assert!(w.coordinate_eval(&g, 5).unwrap().is_empty());
        let d = (s.q[1] - s.p[1]) as i64;
        let x = WreathGroup.commutator(&WreathNormalForm::shifted(Gen::G, 1, d), &WreathNormalForm::parse("h").unwrap());
        let c = w.coordinate_eval(&x, s.q[1] as i64).unwrap();
        let expect = crate::delta::DeltaGroup.commutator(
            &DeltaWord::generator(2, Gen::G, 1),
            &DeltaWord::generator(2, Gen::H, 1),
        );
        assert_eq!(c, expect);
        let cands = w.support_candidates(&g, 3).unwrap();
        assert_eq!(cands.into_iter().collect::<Vec<_>>(), vec![0, 1, 4]);
        assert!(w.support_candidates(&WreathNormalForm::identity(), 3).unwrap().is_empty());
    }

    #[test]
    fn identity_verdicts() {
        let s = Schedule::minimal(10).unwrap();
        let bank = WitnessBank::default();
        let delta = Delta::new(&s, &bank);
        let w = SparseWreath::new(&s).unwrap();
        let e = WreathNormalForm::identity();
        assert!(w.identity_test(&e, 5, &delta).unwrap().is_certified());
        let g = WreathNormalForm::parse("g").unwrap();
        match w.identity_test(&g, 5, &delta).unwrap() {
            WreathVerdict::NonIdentity(NonIdentityReason::Coordinate { coord, .. }) => assert_eq!(coord, 0),
            other => panic!("unexpected {other:?}"),
        }
        let cancel = WreathNormalForm::parse("gG").unwrap();
        assert!(w.identity_test(&cancel, 5, &delta).unwrap().is_certified());
        let t = WreathNormalForm::parse("t").unwrap();
        assert!(w.identity_test(&t, 5, &delta).unwrap().is_non_identity());
        // [ĝ, t^{-1} ĝ t] cancels class-wise; the tail needs p(n0-1) > 2.
        let x = WreathGroup.commutator(&g, &WreathNormalForm::parse("Tgt").unwrap());
        match w.identity_test(&x, 6, &delta).unwrap() {
            WreathVerdict::IdentityCertified(WreathIdentityReason::Tail { threshold, .. }) => assert_eq!(threshold, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn support_sparseness() {
        let s = Schedule::minimal(10).unwrap();
        assert!(support_intersection_check(&s, 20, 8).unwrap());
        let broken = Schedule::from_tables(
            crate::schedule::Mode::Custom,
            1,
            vec![1, 2, 3],
            vec![0, 1, 4],
            vec![0, 1, 4],
        )
        .unwrap();
        assert!(!support_intersection_check(&broken, 0, 3).unwrap());
    }
}
