//! The desk-scale acceptance suite: twelve checks with one verdict line each.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cert::{chi_lower_audit, chi_upper_all, equiv_constants_check, not_rf_witness};
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::laws::{combine_pair, iterated_law, vanishing_containment_check, SmallGroup};
use crate::psl2::{enumerate_group, is_law_exhaustive, nonlaw_witness, WitnessBank, DEFAULT_SEED};
use crate::schedule::{check_sparse, minimal_pq, FunctionSpec, Schedule};
use crate::words::{enumerate_reduced, explicit_psl2_law, Word};
use crate::wreath::oracle::WindowOracle;
use crate::wreath::{Letter, SparseWreath, WreathGroup, WreathNormalForm, LETTERS};

pub const CRITERIA: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {}: {} ({} ms)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed_ms
        )
    }
}

/// Shared state for one suite run.
pub struct Suite {
    pub seed: u64,
    pub budget: Budget,
    pub bank: WitnessBank,
}

impl Default for Suite {
    fn default() -> Self {
        Suite::new(DEFAULT_SEED, Budget::default())
    }
}

/// Outcome of one check: pass flag and a one-line summary.
type Check = Result<(bool, String)>;

impl Suite {
    pub fn new(seed: u64, budget: Budget) -> Self {
        let policy = crate::psl2::WitnessPolicy {
            seed,
            ..Default::default()
        };
        Suite {
            seed,
            budget,
            bank: WitnessBank::new(policy, budget),
        }
    }

    pub fn name(id: usize) -> &'static str {
        match id {
            1 => "explicit law lengths",
            2 => "law verification",
            3 => "no short laws in PSL2(13)",
            4 => "pair combination",
            5 => "law tower",
            6 => "sparse schedule",
            7 => "support sparseness",
            8 => "upper certificate",
            9 => "lower audit",
            10 => "constants",
            11 => "non-residual-finiteness witness",
            12 => "oracle equivalence",
            _ => "unknown",
        }
    }

    pub fn run(&self, id: usize) -> CriterionResult {
        let start = Instant::now();
        let outcome = match id {
            1 => self.explicit_law_lengths(),
            2 => self.law_verification(),
            3 => self.no_short_laws(),
            4 => self.pair_combination(),
            5 => self.law_tower(),
            6 => self.sparse_schedule(),
            7 => self.support_sparseness(),
            8 => self.upper_certificate(),
            9 => self.lower_audit(),
            10 => self.constants(),
            11 => self.not_rf(),
            12 => self.oracle_equivalence(),
            _ => Err(Error::Parse(format!("no criterion {id}"))),
        };
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        CriterionResult {
            id,
            name: Suite::name(id).to_string(),
            passed,
            detail,
            elapsed_ms: start.elapsed().as_millis(),
        }
    }

    pub fn run_all(&self) -> Vec<CriterionResult> {
        (1..=CRITERIA).map(|id| self.run(id)).collect()
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn explicit_law_lengths(&self) -> Check {
        let mut lens = Vec::new();
        for p in [5u64, 7, 11, 13] {
            lens.push((p, explicit_psl2_law(p)?.len()));
        }
        let ok = lens.iter().all(|&(p, l)| l as u64 == 8 * p + 6);
        Ok((ok, format!("(p, |w|) = {lens:?}")))
    }

    fn law_verification(&self) -> Check {
        let mut laws = Vec::new();
        for p in [5u64, 7, 11] {
            laws.push(is_law_exhaustive(&explicit_psl2_law(p)?, p, &self.budget)?);
        }
        let mut orders_ok = true;
        for p in [5u64, 7, 11, 13] {
            orders_ok &= enumerate_group(p, &self.budget)?.par_iter().all(|g| {
                let o = g.order();
                (p - 1) % o == 0 || p % o == 0 || (p + 1) % o == 0
            });
        }
        let ok = laws.iter().all(|&b| b) && orders_ok;
        Ok((ok, format!("laws on p = 5, 7, 11: {laws:?}; element orders divide p-1, p or p+1: {orders_ok}")))
    }

    fn no_short_laws(&self) -> Check {
        let words: Vec<Word> = enumerate_reduced(2, 3).collect();
        let policy = *self.bank.policy();
        let witnessed = words
            .par_iter()
            .filter(|w| nonlaw_witness(w, 13, &policy, &self.budget).is_ok())
            .count();
        Ok((
            words.len() == 52 && witnessed == 52,
            format!("{witnessed} of {} words of length < 4 have witnesses", words.len()),
        ))
    }

    fn pair_combination(&self) -> Check {
        let mut rng = self.rng(4);
        let mut worst = 0f64;
        let mut failures = Vec::new();
        for i in 0..20 {
            let u = random_word(&mut rng, 8);
            let v = random_word(&mut rng, 8);
            let c = combine_pair(&u, &v)?;
            let bound = 64 * u.len().max(v.len());
            worst = worst.max(c.len() as f64 / bound as f64);
            let contains = vanishing_containment_check(&c, &[u.clone(), v.clone()], SmallGroup::Psl2(3), &self.budget)?;
            if c.is_identity() || c.len() > bound || !contains {
                failures.push(i);
            }
        }
        Ok((
            failures.is_empty(),
            format!("20 pairs, failures {failures:?}, max |w| / (64 max) = {worst:.3}"),
        ))
    }

    fn law_tower(&self) -> Check {
        let s = Schedule::custom(vec![1, 94, 6045])?;
        let mut lengths = Vec::new();
        let mut bounds_ok = true;
        for n in 1..=3 {
            let r = iterated_law(&s, n)?;
            bounds_ok &= (r.length as u128) < r.bound;
            lengths.push((r.length, r.bound));
        }
        let w2 = iterated_law(&s, 2)?.word;
        let on5 = is_law_exhaustive(&w2, 5, &self.budget)?;
        let on11 = is_law_exhaustive(&w2, 11, &self.budget)?;
        Ok((
            bounds_ok && on5 && on11,
            format!(
                "primes {:?}, (|w_n|, 3072 L(n) + 1408) = {lengths:?}; w_2 law on PSL2(5): {on5}, on PSL2(11): {on11}",
                s.primes
            ),
        ))
    }

    fn sparse_schedule(&self) -> Check {
        let (p, q) = minimal_pq(5);
        let tables = p == [0, 1, 4, 12, 33] && q == [0, 2, 7, 20, 54];
        let (p12, q12) = minimal_pq(12);
        let sparse = check_sparse(&p12, &q12, 12);
        let s = Schedule::minimal(20)?;
        let bertrand = s.bertrand_holds();
        Ok((
            tables && sparse && bertrand,
            format!("minimal_pq(5) = {p:?}/{q:?}; sparse on 12 levels: {sparse}; 3L+1 < p_n < 6L+2 for n <= 20: {bertrand}"),
        ))
    }

    fn support_sparseness(&self) -> Check {
        let s = Schedule::minimal(8)?;
        let ok = crate::wreath::support_intersection_check(&s, 20, 8)?;
        Ok((ok, format!("shift range 20, window 8: at most one common point: {ok}")))
    }

    fn upper_certificate(&self) -> Check {
        let s = Schedule::tiny();
        let u = chi_upper_all(&s, 2, 2, &self.bank)?;
        Ok((
            u.words_verified == 16 && u.bound == 14,
            format!("{} words verified at coordinate {}, bound {}", u.words_verified, u.coordinate, u.bound),
        ))
    }

    fn lower_audit(&self) -> Check {
        let s = Schedule::tiny();
        let a = chi_lower_audit(&s, 2, 2, &self.budget, &self.bank)?;
        let mut rng = self.rng(9);
        let mut shift_ok = 0;
        for _ in 0..200 {
            let x = random_wreath(&mut rng, 12);
            let y = random_wreath(&mut rng, 12);
            let c = WreathGroup.commutator(&x, &y);
            if c.net_shift() == 0 && c.maximal_shift() <= x.length_bound() + y.length_bound() {
                shift_ok += 1;
            }
        }
        Ok((
            a.tuples_enumerated == 1345 && a.all_vanished && shift_ok == 200,
            format!(
                "{} tuples, all vanished: {}, verdicts {:?}; maximal shift bound on {shift_ok}/200 pairs",
                a.tuples_enumerated, a.all_vanished, a.verdicts
            ),
        ))
    }

    fn constants(&self) -> Check {
        let id = FunctionSpec::pow(1, 1)?;
        let fast = Schedule::fast(&id, 9, 65, 7)?;
        let rf = equiv_constants_check(&fast, &id, 1, 4 * 65 * 65, 6)?;
        let sqrt = FunctionSpec::pow(1, 2)?;
        let slow = Schedule::slow(&sqrt, None, 10, 10, 10)?;
        let rs = equiv_constants_check(&slow, &sqrt, 2, 50, 5)?;
        Ok((
            rf.ok && rs.ok,
            format!(
                "fast T=65 K=1 C=16900 m<=6: (i) {} (ii) {}; slow T=10 K=2 C=50 m<=5: (i) {} (ii) {}",
                rf.i_ok, rf.ii_ok, rs.i_ok, rs.ii_ok
            ),
        ))
    }

    fn not_rf(&self) -> Check {
        let s = Schedule::custom(vec![1, 2, 16, 32, 64])?;
        let r = not_rf_witness(&s, &self.bank, Some(4))?;
        Ok((
            r.prime == 53 && r.support == [r.coordinate as i64],
            format!(
                "level {} (L = {}, p = {}), support {:?} over {} candidates, component {:?}",
                r.level, r.l, r.prime, r.support, r.candidates_checked, r.component
            ),
        ))
    }

    fn oracle_equivalence(&self) -> Check {
        let s = Schedule::minimal(12)?;
        let wreath = SparseWreath::new(&s)?;
        let (lo, hi) = (-12i64, s.q[7] as i64 + 12);
        let oracle = WindowOracle::new(&s, lo, hi);
        let mut rng = self.rng(12);
        let words: Vec<Vec<Letter>> = (0..500)
            .map(|_| {
                let len = rng.random_range(0..=12);
                (0..len).map(|_| LETTERS[rng.random_range(0..6)]).collect()
            })
            .collect();
        let mismatches = words
            .par_iter()
            .map(|letters| -> Result<bool> {
                let o = oracle.eval(letters)?;
                let nf = WreathNormalForm::from_letters(letters);
                if o.shift() != nf.net_shift() {
                    return Ok(true);
                }
                for m in lo..=hi {
                    if o.coordinate(m) != wreath.coordinate_eval(&nf, m)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|&bad| bad)
            .count();
        Ok((
            mismatches == 0,
            format!("500 words, coordinates {lo}..={hi}, mismatches {mismatches}"),
        ))
    }
}

/// A nontrivial reduced rank-2 word of length `1..=max_len` before reduction.
pub fn random_word(rng: &mut impl Rng, max_len: usize) -> Word {
    loop {
        let len = rng.random_range(1..=max_len);
        let raw: Vec<i32> = (0..len)
            .map(|_| {
                let g = rng.random_range(1..=2);
                if rng.random_bool(0.5) {
                    g
                } else {
                    -g
                }
            })
            .collect();
        let w = Word::reduce(2, raw).expect("letters are in range");
        if !w.is_identity() {
            return w;
        }
    }
}

/// A wreath element from a uniformly random letter string of length `<= max_len`.
pub fn random_wreath(rng: &mut impl Rng, max_len: usize) -> WreathNormalForm {
    let len = rng.random_range(0..=max_len);
    let letters: Vec<Letter> = (0..len).map(|_| LETTERS[rng.random_range(0..6)]).collect();
    WreathNormalForm::from_letters(&letters)
}
