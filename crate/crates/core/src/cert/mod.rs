//! Growth certificates: upper witnesses for `χ`, exhaustive lower-bound
//! audits, the constants inequalities, schedule planners, the growth table
//! and the non-residual-finiteness witness.

mod audit;
mod plan;

pub use audit::{audit_tuple_count, chi_lower_audit, double_commutators, AuditOutcome, LowerAudit, VerdictCounts};
pub use plan::{plan, Plan, PlanMode};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::delta::{Delta, DeltaGroup, DeltaWord, Gen};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::psl2::{Psl2, WitnessBank};
use crate::schedule::{FunctionSpec, Schedule};
use crate::words::{commutator, enumerate_reduced, evaluate, Word};
use crate::wreath::{SparseWreath, WreathGroup, WreathNormalForm};

/// `2(q(n) - p(n) + 1)`, the length of the pair `(ĝ^{t^{q(n)-p(n)}}, ĥ)`.
pub fn upper_bound(schedule: &Schedule, n: usize) -> Result<u128> {
    schedule
        .gap(n)?
        .checked_add(1)
        .and_then(|x| x.checked_mul(2))
        .ok_or(Error::Overflow("2 (q - p + 1)"))
}

/// One verified upper witness: `v(ĝ^{t^d}, ĥ)(q(n)) = v(g_n, h_n) != e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperWitness {
    pub word: String,
    pub level: usize,
    pub coordinate: u128,
    pub shift: u128,
    pub bound: u128,
    /// `w(g^w, h^w)` in `PSL2(p_n)`, as `[a, b, c, d]`.
    pub component: [u64; 4],
}

/// `χ(v) <= 2(q(n) - p(n) + 1)` for one word, by evaluation in `Γ(L)`.
pub fn chi_upper(v: &Word, schedule: &Schedule, n: usize, bank: &WitnessBank) -> Result<UpperWitness> {
    if v.rank() != 2 {
        return Err(Error::RankMismatch {
            left: v.rank(),
            right: 2,
        });
    }
    if v.is_identity() {
        return Err(Error::TrivialWord);
    }
    let l = schedule.l(n)?;
    if v.len() as u128 > l {
        return Err(Error::ScheduleUnfit {
            m: n,
            reason: format!("|v| = {} exceeds L({n}) = {l}", v.len()),
        });
    }
    let d = schedule.gap(n)?;
    let shift = i64::try_from(d).map_err(|_| Error::Overflow("shift q(n) - p(n)"))?;
    let coord = schedule.q(n)?;
    let wreath = SparseWreath::new(schedule)?;
    let pair = [
        WreathNormalForm::shifted(Gen::G, 1, shift),
        WreathNormalForm::parse("ĥ")?,
    ];
    let image = evaluate(v, &pair, &WreathGroup)?;
    let value = wreath.coordinate_eval(&image, coord as i64)?;
    let expect = evaluate(
        v,
        &[DeltaWord::generator(n, Gen::G, 1), DeltaWord::generator(n, Gen::H, 1)],
        &DeltaGroup,
    )?;
    if value != expect {
        return Err(Error::CertificateFailed(format!(
            "coordinate {coord} of v(ĝ^(t^{d}), ĥ) is {value}, expected {expect}"
        )));
    }
    let delta = Delta::new(schedule, bank);
    let component = delta.component(&value, n, v)?;
    // Independent recomputation straight from the witness pair.
    let p = schedule.prime_u64(n)?;
    let (g, h) = bank.witness(p, v)?;
    let direct = evaluate(v, &[g, h], &Psl2::new(p)?)?;
    if component.is_identity() || direct != component {
        return Err(Error::CertificateFailed(format!(
            "{v} does not survive at level {n} (PSL2({p})); witness table or schedule is corrupt"
        )));
    }
    Ok(UpperWitness {
        word: v.to_string(),
        level: n,
        coordinate: coord,
        shift: d,
        bound: upper_bound(schedule, n)?,
        component: component.entries(),
    })
}

/// Upper certificate over every nontrivial rank-2 word of length `<= max_len`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperCertificate {
    pub bound: u128,
    pub witness_pair: String,
    pub witness_length_bounds: [u128; 2],
    pub max_word_len: usize,
    pub words_verified: usize,
    pub coordinate: u128,
}

pub fn chi_upper_all(schedule: &Schedule, n: usize, max_len: usize, bank: &WitnessBank) -> Result<UpperCertificate> {
    let words: Vec<Word> = enumerate_reduced(2, max_len).collect();
    let verified = words
        .par_iter()
        .map(|v| chi_upper(v, schedule, n, bank))
        .collect::<Result<Vec<_>>>()?;
    let d = schedule.gap(n)?;
    Ok(UpperCertificate {
        bound: upper_bound(schedule, n)?,
        witness_pair: format!("(ĝ^(t^{d}), ĥ)"),
        witness_length_bounds: [2 * d + 1, 1],
        max_word_len: max_len,
        words_verified: verified.len(),
        coordinate: schedule.q(n)?,
    })
}

/// Per-`m` outcome of the two constants inequalities. Inequality (i) is
/// compared doubled: `K (q(Km) - p(Km)) >= 2 f(L(m+1))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantsRow {
    pub m: usize,
    pub i_lhs_doubled: Option<u128>,
    pub i_rhs_doubled: Option<u128>,
    pub i_ok: Option<bool>,
    pub ii_lhs: u128,
    pub ii_rhs: u128,
    pub ii_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantsReport {
    #[serde(rename = "K")]
    pub k: u128,
    #[serde(rename = "C")]
    pub c: u128,
    pub m_max: usize,
    pub rows: Vec<ConstantsRow>,
    pub i_ok: bool,
    pub ii_ok: bool,
    pub ok: bool,
}

/// Checks `(i) K (q(Km) - p(Km))/2 >= f(L(m+1))` for `2 <= m <= m_max` and
/// `(ii) C f(C L(m)) >= 2 (q(m+1) - p(m+1) + 1)` for `1 <= m <= m_max`.
///
/// Level 1 has `q(1) = p(1) = 0` by construction, so (i) is only read from
/// `m = 2`; the equivalence it feeds is asymptotic.
pub fn equiv_constants_check(schedule: &Schedule, f: &FunctionSpec, k: u128, c: u128, m_max: usize) -> Result<ConstantsReport> {
    let needed = (k.saturating_mul(m_max as u128)).max(m_max as u128 + 1);
    if m_max > 0 && needed > schedule.n_max() as u128 {
        return Err(Error::InsufficientTable {
            needed,
            have: schedule.n_max(),
        });
    }
    let mut rows = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let (i_lhs, i_rhs, i_ok) = if m >= 2 {
            let km = (k * m as u128) as usize;
            let lhs = schedule.gap(km)?.checked_mul(k).ok_or(Error::Overflow("K (q - p)"))?;
            let rhs = f
                .eval(schedule.l(m + 1)?)?
                .checked_mul(2)
                .ok_or(Error::Overflow("2 f(L)"))?;
            (Some(lhs), Some(rhs), Some(lhs >= rhs))
        } else {
            (None, None, None)
        };
        let cl = schedule.l(m)?.checked_mul(c).ok_or(Error::Overflow("C L(m)"))?;
        let ii_lhs = f.eval(cl)?.checked_mul(c).ok_or(Error::Overflow("C f(C L(m))"))?;
        let ii_rhs = upper_bound(schedule, m + 1)?;
        rows.push(ConstantsRow {
            m,
            i_lhs_doubled: i_lhs,
            i_rhs_doubled: i_rhs,
            i_ok,
            ii_lhs,
            ii_rhs,
            ii_ok: ii_lhs >= ii_rhs,
        });
    }
    let i_ok = rows.iter().all(|r| r.i_ok != Some(false));
    let ii_ok = rows.iter().all(|r| r.ii_ok);
    Ok(ConstantsReport {
        k,
        c,
        m_max,
        rows,
        i_ok,
        ii_ok,
        ok: i_ok && ii_ok,
    })
}

/// Everything known about one level of one schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthCertificate {
    pub schedule: String,
    pub n: usize,
    pub upper: Option<UpperCertificate>,
    pub lower_audit: Option<LowerAudit>,
    pub constants: Option<ConstantsReport>,
    pub verdict_counts: Option<VerdictCounts>,
}

impl GrowthCertificate {
    pub fn new(schedule: &Schedule, n: usize) -> Self {
        GrowthCertificate {
            schedule: schedule.id(),
            n,
            upper: None,
            lower_audit: None,
            constants: None,
            verdict_counts: None,
        }
    }

    /// Upper bound is exactly `2(q(n) - p(n) + 1)`, the audit budget is
    /// strictly below `(q(n) - p(n))/2`, and the two never contradict.
    pub fn check(&self, schedule: &Schedule) -> Result<()> {
        let gap = schedule.gap(self.n)?;
        if let Some(u) = &self.upper {
            if u.bound != upper_bound(schedule, self.n)? {
                return Err(Error::CertificateFailed(format!("upper bound {} is not 2(q - p + 1)", u.bound)));
            }
        }
        if let Some(a) = &self.lower_audit {
            if 2 * a.budget as u128 >= gap {
                return Err(Error::CertificateFailed(format!(
                    "audit budget {} is not below (q - p)/2 = {gap}/2",
                    a.budget
                )));
            }
            if let Some(u) = &self.upper {
                if a.budget as u128 >= u.bound {
                    return Err(Error::CertificateFailed("audit budget reaches the upper bound".into()));
                }
            }
        }
        Ok(())
    }
}

/// One row of the growth table, indexed by level `j = m + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub m: usize,
    pub level: usize,
    #[serde(rename = "L")]
    pub l: u128,
    pub upper_bound: u128,
    pub lower_target: String,
    pub audit: String,
}

fn half(x: u128) -> String {
    if x % 2 == 0 {
        (x / 2).to_string()
    } else {
        format!("{}.5", x / 2)
    }
}

/// Rows `(m, L(m+1), 2(q(m+1) - p(m+1) + 1), (q(m+1) - p(m+1))/2, audit)`
/// for levels `1..=n_max`.
pub fn growth_table(schedule: &Schedule, n_max: usize, audits: &[LowerAudit]) -> Result<Vec<GrowthRow>> {
    if n_max > schedule.n_max() {
        return Err(Error::InsufficientTable {
            needed: n_max as u128,
            have: schedule.n_max(),
        });
    }
    (1..=n_max)
        .map(|j| {
            let gap = schedule.gap(j)?;
            let audit = match audits.iter().find(|a| a.level == j) {
                Some(a) if a.all_vanished => format!("vanished (budget {}, {} tuples)", a.budget, a.tuples_enumerated),
                Some(a) => format!("failed (budget {})", a.budget),
                None if gap == 0 => "vacuous".to_string(),
                None => "not run".to_string(),
            };
            Ok(GrowthRow {
                m: j - 1,
                level: j,
                l: schedule.l(j)?,
                upper_bound: upper_bound(schedule, j)?,
                lower_target: half(gap),
                audit,
            })
        })
        .collect()
}

/// The word `[[x,y],[y,x^-1]]`, of length 14.
pub fn not_rf_word() -> Word {
    let g = |t: &str| Word::parse(t, Some(2)).expect("fixed letters parse");
    let xy = commutator(&g("x"), &g("y")).expect("same rank");
    let yx = commutator(&g("y"), &g("X")).expect("same rank");
    commutator(&xy, &yx).expect("same rank")
}

/// Record showing `Γ(L)` contains `Δ̄ wr Z` with `Δ̄` non-abelian.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotRfWitness {
    pub level: usize,
    #[serde(rename = "L")]
    pub l: u128,
    pub prime: u128,
    pub coordinate: u128,
    pub word: String,
    pub window: usize,
    pub candidates_checked: usize,
    pub support: Vec<i64>,
    pub g_bar: String,
    pub h_bar: String,
    pub commutator: String,
    pub component: [u64; 4],
    pub criterion: String,
}

/// `ḡ = [ĝ^{t^d}, ĥ]` and `h̄ = [ĥ, (ĝ^{t^d})^{-1}]` with `d = q(j) - p(j)`,
/// `j` the least level with `L(j) >= 16`.
pub fn not_rf_witness(schedule: &Schedule, bank: &WitnessBank, window: Option<usize>) -> Result<NotRfWitness> {
    let j = (1..=schedule.n_max())
        .find(|&j| schedule.l[j - 1] >= 16)
        .ok_or_else(|| Error::PrefixExceeded("no level with L(j) >= 16 in the schedule prefix".into()))?;
    let window = window.unwrap_or(schedule.n_max());
    let w = not_rf_word();
    let d = i64::try_from(schedule.gap(j)?).map_err(|_| Error::Overflow("shift"))?;
    let a = WreathNormalForm::shifted(Gen::G, 1, d);
    let h = WreathNormalForm::parse("ĥ")?;
    let g_bar = WreathGroup.commutator(&a, &h);
    let h_bar = WreathGroup.commutator(&h, &a.inverse());
    let wreath = SparseWreath::new(schedule)?;
    let delta = Delta::new(schedule, bank);
    let q_j = schedule.q(j)? as i64;
    let mut support = Vec::new();
    let mut checked = 0;
    for x in [&g_bar, &h_bar] {
        for m in wreath.support_candidates(x, window)? {
            checked += 1;
            let value = wreath.coordinate_eval(x, m)?;
            if m == q_j {
                continue;
            }
            if !delta.identity(&value, &[])?.is_certified() {
                support.push(m);
            }
        }
    }
    support.push(q_j);
    support.sort_unstable();
    support.dedup();
    if support != [q_j] {
        return Err(Error::CertificateFailed(format!(
            "supports of ḡ, h̄ within window {window} are {support:?}, not {{{q_j}}}"
        )));
    }
    let gv = wreath.coordinate_eval(&g_bar, q_j)?;
    let hv = wreath.coordinate_eval(&h_bar, q_j)?;
    let comm = DeltaGroup.commutator(&gv, &hv);
    let expect = evaluate(
        &w,
        &[DeltaWord::generator(j, Gen::G, 1), DeltaWord::generator(j, Gen::H, 1)],
        &DeltaGroup,
    )?;
    if comm != expect {
        return Err(Error::CertificateFailed(format!(
            "[ḡ(q(j)), h̄(q(j))] = {comm} differs from w(g_j, h_j) = {expect}"
        )));
    }
    let component = delta.component(&comm, j, &w)?;
    if component.is_identity() {
        return Err(Error::CertificateFailed(format!("w(g_{j}, h_{j}) vanishes on the witness component")));
    }
    Ok(NotRfWitness {
        level: j,
        l: schedule.l(j)?,
        prime: schedule.prime(j)?,
        coordinate: q_j as u128,
        word: w.to_string(),
        window,
        candidates_checked: checked,
        support,
        g_bar: g_bar.to_string(),
        h_bar: h_bar.to_string(),
        commutator: comm.to_string(),
        component: component.entries(),
        criterion: "Δ̄ = <ḡ(q(j)), h̄(q(j))> is non-abelian and <ḡ, h̄, t> = Δ̄ wr Z; a restricted wreath product \
                    with non-abelian base and infinite top group is not residually finite"
            .into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::Mode;

    fn w(s: &str) -> Word {
        Word::parse(s, Some(2)).unwrap()
    }

    #[test]
    fn upper_witnesses_on_tiny() {
        let s = Schedule::tiny();
        let bank = WitnessBank::default();
        let one = chi_upper(&w("x"), &s, 1, &bank).unwrap();
        assert_eq!(one.bound, 2);
        assert_eq!(one.shift, 0);
        let two = chi_upper(&w("xyXY"), &s, 2, &bank);
        // |[x,y]| = 4 > L(2) = 2.
        assert!(matches!(two, Err(Error::ScheduleUnfit { .. })));
        let c = chi_upper(&w("xY"), &s, 2, &bank).unwrap();
        assert_eq!((c.bound, c.coordinate, c.shift), (14, 9, 6));
        let all = chi_upper_all(&s, 2, 2, &bank).unwrap();
        assert_eq!(all.words_verified, 16);
        assert_eq!(all.witness_length_bounds, [13, 1]);
        assert!(matches!(chi_upper(&Word::identity(2), &s, 2, &bank), Err(Error::TrivialWord)));
    }

    #[test]
    fn commutator_upper_witness_on_a_wider_schedule() {
        let s = Schedule::custom(vec![1, 4, 16]).unwrap();
        let bank = WitnessBank::default();
        let c = chi_upper(&w("xyXY"), &s, 2, &bank).unwrap();
        assert_eq!(c.bound, upper_bound(&s, 2).unwrap());
    }

    #[test]
    fn constants_on_fast_and_slow_schedules() {
        let id = FunctionSpec::pow(1, 1).unwrap();
        let fast = Schedule::fast(&id, 9, 65, 7).unwrap();
        let r = equiv_constants_check(&fast, &id, 1, 4 * 65 * 65, 6).unwrap();
        assert!(r.ok, "{r:?}");
        assert_eq!(r.rows[1].i_lhs_doubled, r.rows[1].i_rhs_doubled);
        let bad = equiv_constants_check(&fast, &id, 1, 1, 6).unwrap();
        assert!(!bad.ii_ok && !bad.rows[0].ii_ok);
        let sqrt = FunctionSpec::pow(1, 2).unwrap();
        let slow = Schedule::slow(&sqrt, None, 10, 10, 10).unwrap();
        assert!(equiv_constants_check(&slow, &sqrt, 2, 50, 5).unwrap().ok);
        assert!(matches!(
            equiv_constants_check(&slow, &sqrt, 2, 50, 6),
            Err(Error::InsufficientTable { needed: 12, have: 10 })
        ));
    }

    #[test]
    fn growth_table_rows() {
        let rows = growth_table(&Schedule::tiny(), 2, &[]).unwrap();
        assert_eq!(rows.iter().map(|r| r.upper_bound).collect::<Vec<_>>(), vec![2, 14]);
        assert_eq!(rows[0].audit, "vacuous");
        assert_eq!(rows[1].lower_target, "3");
        let id = FunctionSpec::pow(1, 1).unwrap();
        let fast = Schedule::fast(&id, 9, 65, 4).unwrap();
        let rows = growth_table(&fast, 4, &[]).unwrap();
        for r in &rows[1..] {
            assert_eq!(r.upper_bound, 4 * 65u128.pow(r.level as u32 + 1) + 2);
        }
        assert!(rows.windows(2).all(|p| p[0].upper_bound <= p[1].upper_bound));
        assert_eq!(growth_table(&fast, 1, &[]).unwrap().len(), 1);
        assert_eq!(half(21), "10.5");
    }

    #[test]
    fn not_rf_witness_on_custom_schedule() {
        let s = Schedule::custom(vec![1, 2, 16, 32, 64]).unwrap();
        let bank = WitnessBank::default();
        let rec = not_rf_witness(&s, &bank, Some(4)).unwrap();
        assert_eq!((rec.level, rec.prime), (3, 53));
        assert_eq!(rec.support, vec![s.q[2] as i64]);
        assert_eq!(not_rf_word().len(), 14);
        let small = Schedule::minimal(5).unwrap();
        assert!(matches!(not_rf_witness(&small, &bank, None), Err(Error::PrefixExceeded(_))));
    }

    #[test]
    fn audit_budget_zero_and_precondition() {
        let s = Schedule::tiny();
        let bank = WitnessBank::default();
        let limits = crate::Budget::default();
        let a = chi_lower_audit(&s, 1, 0, &limits, &bank);
        assert!(matches!(a, Err(Error::BoundViolated { .. })));
        let a = chi_lower_audit(&s, 2, 0, &limits, &bank).unwrap();
        assert_eq!(a.tuples_enumerated, 1);
        assert!(a.all_vanished);
        assert_eq!(a.verdicts.empty_normal_form, 1);
        assert!(chi_lower_audit(&s, 2, 3, &limits, &bank).is_err());
        let mut cert = GrowthCertificate::new(&s, 2);
        cert.lower_audit = Some(a);
        cert.upper = Some(chi_upper_all(&s, 2, 2, &bank).unwrap());
        cert.check(&s).unwrap();
        assert_eq!(s.mode, Mode::Custom);
    }
}
