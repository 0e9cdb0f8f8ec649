//! Exhaustive lower-bound audit over bounded-length 8-tuples of `Γ(L)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Budget;
use crate::delta::Delta;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::laws::{LawCertificate, LevelLaw};
use crate::psl2::WitnessBank;
use crate::schedule::Schedule;
use crate::wreath::{
    Letter, SparseWreath, WreathGroup, WreathIdentityReason, WreathNormalForm, WreathVerdict, LETTERS,
};

/// Outcome class of one audited tuple. Kinds are counted separately.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditOutcome {
    EmptyNormalForm,
    Tail,
    LawImage,
    /// Window-only verdict with no candidate coordinates at all.
    WindowOnlyEmpty,
    WindowOnly,
    NonIdentity,
    PrefixExceeded,
}

impl AuditOutcome {
    pub fn vanished(self) -> bool {
        matches!(
            self,
            AuditOutcome::EmptyNormalForm | AuditOutcome::Tail | AuditOutcome::LawImage | AuditOutcome::WindowOnlyEmpty
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub empty_normal_form: u64,
    pub tail: u64,
    pub law_image: u64,
    pub window_only_empty: u64,
    pub window_only: u64,
    pub non_identity: u64,
    pub prefix_exceeded: u64,
}

impl VerdictCounts {
    fn add(&mut self, o: AuditOutcome) {
        let slot = match o {
            AuditOutcome::EmptyNormalForm => &mut self.empty_normal_form,
            AuditOutcome::Tail => &mut self.tail,
            AuditOutcome::LawImage => &mut self.law_image,
            AuditOutcome::WindowOnlyEmpty => &mut self.window_only_empty,
            AuditOutcome::WindowOnly => &mut self.window_only,
            AuditOutcome::NonIdentity => &mut self.non_identity,
            AuditOutcome::PrefixExceeded => &mut self.prefix_exceeded,
        };
        *slot += 1;
    }

    fn merge(mut self, o: VerdictCounts) -> VerdictCounts {
        self.empty_normal_form += o.empty_normal_form;
        self.tail += o.tail;
        self.law_image += o.law_image;
        self.window_only_empty += o.window_only_empty;
        self.window_only += o.window_only;
        self.non_identity += o.non_identity;
        self.prefix_exceeded += o.prefix_exceeded;
        self
    }

    pub fn total(&self) -> u64 {
        self.empty_normal_form
            + self.tail
            + self.law_image
            + self.window_only_empty
            + self.window_only
            + self.non_identity
            + self.prefix_exceeded
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerAudit {
    pub level: usize,
    pub budget: usize,
    pub window: usize,
    pub tuples_enumerated: u64,
    pub tuples_expected: u128,
    pub all_vanished: bool,
    pub law_length: usize,
    pub law_levels: Vec<LevelLaw>,
    pub verdicts: VerdictCounts,
    /// Letter strings of the first tuple that did not vanish, if any.
    pub first_failure: Option<Vec<String>>,
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of 8-tuples of generator strings with total length `<= budget`:
/// `Σ_l 6^l C(l+7, 7)`.
pub fn audit_tuple_count(budget: usize) -> u128 {
    (0..=budget as u32)
        .map(|l| 6u128.pow(l) * binomial(l as u128 + 7, 7))
        .sum()
}

/// Ordered ways to write `total` as 8 non-negative parts.
fn compositions(total: usize) -> Vec<[usize; 8]> {
    fn go(i: usize, left: usize, cur: &mut [usize; 8], out: &mut Vec<[usize; 8]>) {
        if i == 7 {
            cur[7] = left;
            out.push(*cur);
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            go(i + 1, left - k, cur, out);
        }
    }
    let mut out = Vec::new();
    go(0, total, &mut [0; 8], &mut out);
    out
}

/// The tuple with slot lengths `comp` and letters given by the base-6
/// digits of `index`.
fn decode(comp: &[usize; 8], mut index: u64) -> [Vec<Letter>; 8] {
    let mut out: [Vec<Letter>; 8] = Default::default();
    for (slot, &k) in out.iter_mut().zip(comp) {
        for _ in 0..k {
            slot.push(LETTERS[(index % 6) as usize]);
            index /= 6;
        }
    }
    out
}

/// `(z_1234, z_5678)` with `z_abcd = [[z_a, z_b], [z_c, z_d]]`.
pub fn double_commutators(z: &[WreathNormalForm; 8]) -> [WreathNormalForm; 2] {
    let c = |a: &WreathNormalForm, b: &WreathNormalForm| WreathGroup.commutator(a, b);
    [
        c(&c(&z[0], &z[1]), &c(&z[2], &z[3])),
        c(&c(&z[4], &z[5]), &c(&z[6], &z[7])),
    ]
}

fn classify(v: Result<WreathVerdict>) -> Result<AuditOutcome> {
    Ok(match v {
        Ok(WreathVerdict::NonIdentity(_)) => AuditOutcome::NonIdentity,
        Ok(WreathVerdict::IdentityCertified(r)) => match r {
            WreathIdentityReason::EmptyNormalForm => AuditOutcome::EmptyNormalForm,
            WreathIdentityReason::Tail { .. } => AuditOutcome::Tail,
            WreathIdentityReason::LawImage { .. } => AuditOutcome::LawImage,
        },
        Ok(WreathVerdict::IdentityWindowOnly {
            coordinates_checked: 0, ..
        }) => AuditOutcome::WindowOnlyEmpty,
        Ok(WreathVerdict::IdentityWindowOnly { .. }) => AuditOutcome::WindowOnly,
        Err(Error::PrefixExceeded(_)) => AuditOutcome::PrefixExceeded,
        Err(e) => return Err(e),
    })
}

/// Evaluates `v_n(z) = w̄_n(z_1234, z_5678)` on every 8-tuple of generator
/// strings of total length `<= budget` and records each identity verdict.
/// Requires `budget < (q(n) - p(n))/2`.
pub fn chi_lower_audit(schedule: &Schedule, n: usize, budget: usize, limits: &Budget, bank: &WitnessBank) -> Result<LowerAudit> {
    let gap = schedule.gap(n)?;
    if 2 * budget as u128 >= gap {
        return Err(Error::BoundViolated {
            what: "audit budget must be below (q(n) - p(n))/2",
            achieved: budget as u128,
            bound: gap / 2,
        });
    }
    let expected = audit_tuple_count(budget);
    if expected > limits.max_audit_tuples {
        return Err(Error::BudgetExceeded {
            what: "audit tuples",
            needed: expected,
            limit: limits.max_audit_tuples,
        });
    }
    let law = LawCertificate::for_schedule(schedule, n, limits)?;
    let wreath = SparseWreath::new(schedule)?;
    let delta = Delta::new(schedule, bank);
    let window = schedule.n_max();
    let jobs: Vec<(usize, [usize; 8])> = (0..=budget)
        .flat_map(|l| compositions(l).into_iter().map(move |c| (l, c)))
        .collect();
    let results: Vec<(VerdictCounts, Option<Vec<String>>)> = jobs
        .par_iter()
        .map(|(l, comp)| -> Result<(VerdictCounts, Option<Vec<String>>)> {
            let mut counts = VerdictCounts::default();
            let mut failure = None;
            for index in 0..6u64.pow(*l as u32) {
                let letters = decode(comp, index);
                let z = letters.clone().map(|s| WreathNormalForm::from_letters(&s));
                let args = double_commutators(&z);
                let outcome = classify(wreath.identity_test_law_image(&law, &args, window, &delta))?;
                if !outcome.vanished() && failure.is_none() {
                    failure = Some(
                        letters
                            .iter()
                            .map(|s| s.iter().map(ToString::to_string).collect::<String>())
                            .collect(),
                    );
                }
                counts.add(outcome);
            }
            Ok((counts, failure))
        })
        .collect::<Result<_>>()?;
    let mut verdicts = VerdictCounts::default();
    let mut first_failure = None;
    for (c, f) in results {
        verdicts = verdicts.merge(c);
        if first_failure.is_none() {
            first_failure = f;
        }
    }
    let enumerated = verdicts.total();
    Ok(LowerAudit {
        level: n,
        budget,
        window,
        tuples_enumerated: enumerated,
        tuples_expected: expected,
        all_vanished: first_failure.is_none() && enumerated as u128 == expected,
        law_length: law.word.len(),
        law_levels: law.levels,
        verdicts,
        first_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_counts() {
        assert_eq!(audit_tuple_count(0), 1);
        assert_eq!(audit_tuple_count(1), 49);
        assert_eq!(audit_tuple_count(2), 1 + 48 + 288 + 1008);
        for b in 0..=3 {
            let direct: u128 = (0..=b).map(|l| compositions(l).len() as u128 * 6u128.pow(l as u32)).sum();
            assert_eq!(direct, audit_tuple_count(b));
        }
    }

    #[test]
    fn decode_fills_slots_in_order() {
        let t = decode(&[1, 0, 0, 0, 0, 0, 0, 1], 6 * 4 + 1);
        assert_eq!(t[0], vec![LETTERS[1]]);
        assert_eq!(t[7], vec![LETTERS[4]]);
        assert!(t[1..7].iter().all(Vec::is_empty));
    }
}
