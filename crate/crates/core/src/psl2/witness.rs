//! Non-law witnesses and the memoized witness tables behind `g_{L(n)}, h_{L(n)}`.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{enumerate_group, Psl2, Psl2Elem};
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::words::{evaluate, Word};

pub const DEFAULT_SEED: u64 = 0x1a57_1e55;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessPolicy {
    pub seed: u64,
    /// Pseudorandom pairs tried before the exhaustive fallback scan.
    pub random_attempts: usize,
}

impl Default for WitnessPolicy {
    fn default() -> Self {
        WitnessPolicy {
            seed: DEFAULT_SEED,
            random_attempts: 10_000,
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream seed for one `(p, word)` search; stable across runs and platforms.
fn stream_seed(seed: u64, p: u64, w: &Word) -> u64 {
    let mut h = splitmix(seed ^ p);
    for &l in w.letters() {
        h = splitmix(h ^ (l as i64 as u64));
    }
    h
}

fn random_elem(group: &Psl2, rng: &mut ChaCha8Rng) -> Psl2Elem {
    let p = group.p();
    let a = rng.random_range(0..p);
    if a != 0 {
        group.from_abc(a, rng.random_range(0..p), rng.random_range(0..p))
    } else {
        group.from_bd(rng.random_range(1..p), rng.random_range(0..p))
    }
}

/// A pair `(g, h)` with `w(g, h) != e`.
///
/// Seeded pseudorandom pairs first, then a full scan of `PSL2(p)^2` when the
/// group is within budget. The result depends only on `(policy.seed, p, w)`.
pub fn nonlaw_witness(
    w: &Word,
    p: u64,
    policy: &WitnessPolicy,
    budget: &Budget,
) -> Result<(Psl2Elem, Psl2Elem)> {
    if w.rank() != 2 {
        return Err(Error::RankMismatch {
            left: w.rank(),
            right: 2,
        });
    }
    let group = Psl2::new(p)?;
    let not_found = || Error::WitnessNotFound {
        word: w.to_string(),
        p,
    };
    if w.is_identity() {
        return Err(not_found());
    }
    let works = |g: &Psl2Elem, h: &Psl2Elem| {
        !evaluate(w, &[*g, *h], &group)
            .expect("rank checked")
            .is_identity()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(policy.seed, p, w));
    for _ in 0..policy.random_attempts {
        let g = random_elem(&group, &mut rng);
        let h = random_elem(&group, &mut rng);
        if works(&g, &h) {
            return Ok((g, h));
        }
    }
    let elems = match enumerate_group(p, budget) {
        Ok(e) => e,
        Err(Error::BudgetExceeded { .. }) => return Err(not_found()),
        Err(e) => return Err(e),
    };
    for g in &elems {
        for h in &elems {
            if works(g, h) {
                return Ok((*g, *h));
            }
        }
    }
    Err(not_found())
}

type Pair = (Psl2Elem, Psl2Elem);

/// Memoized witnesses keyed by `(p, word)`, shareable across threads.
///
/// Each entry is computed on demand. Concurrent misses on the same key may
/// both run the search; the search is deterministic, so they agree.
#[derive(Debug, Default)]
pub struct WitnessBank {
    policy: WitnessPolicy,
    budget: Budget,
    memo: RwLock<HashMap<(u64, Word), Pair>>,
}

#[derive(Serialize, Deserialize)]
struct StoredWitness {
    p: u64,
    word: Vec<i32>,
    g: [u64; 4],
    h: [u64; 4],
}

impl WitnessBank {
    pub fn new(policy: WitnessPolicy, budget: Budget) -> Self {
        WitnessBank {
            policy,
            budget,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn policy(&self) -> &WitnessPolicy {
        &self.policy
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    pub fn len(&self) -> usize {
        self.memo.read().expect("witness memo poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The witness pair `(g^w, h^w)` for `w` in `PSL2(p)`.
    pub fn witness(&self, p: u64, w: &Word) -> Result<Pair> {
        let key = (p, w.clone());
        if let Some(pair) = self.memo.read().expect("witness memo poisoned").get(&key) {
            return Ok(*pair);
        }
        let pair = nonlaw_witness(w, p, &self.policy, &self.budget)?;
        let mut memo = self.memo.write().expect("witness memo poisoned");
        Ok(*memo.entry(key).or_insert(pair))
    }

    fn cache_file(&self, dir: &Path) -> PathBuf {
        dir.join(format!(
            "witnesses-seed{:x}-r{}.json",
            self.policy.seed, self.policy.random_attempts
        ))
    }

    /// Writes every memoized entry as JSON, sorted by key.
    pub fn save_to_dir(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let memo = self.memo.read().expect("witness memo poisoned");
        let mut entries: Vec<StoredWitness> = memo
            .iter()
            .map(|((p, w), (g, h))| StoredWitness {
                p: *p,
                word: w.letters().to_vec(),
                g: g.entries(),
                h: h.entries(),
            })
            .collect();
        entries.sort_by(|a, b| (a.p, &a.word).cmp(&(b.p, &b.word)));
        let path = self.cache_file(dir);
        std::fs::write(&path, serde_json::to_string_pretty(&entries)?)?;
        Ok(path)
    }

    /// Loads entries saved under the same policy. Every entry is re-verified
    /// before it is trusted. Returns the number of entries loaded.
    pub fn load_from_dir(&self, dir: &Path) -> Result<usize> {
        let path = self.cache_file(dir);
        if !path.exists() {
            return Ok(0);
        }
        let entries: Vec<StoredWitness> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let mut memo = self.memo.write().expect("witness memo poisoned");
        let mut loaded = 0;
        for e in entries {
            let w = Word::reduce(2, e.word)?;
            let mk = |m: [u64; 4]| {
                Psl2Elem::make(e.p, m[0] as i64, m[1] as i64, m[2] as i64, m[3] as i64)
            };
            let (g, h) = (mk(e.g)?, mk(e.h)?);
            let group = Psl2::new(e.p)?;
            if evaluate(&w, &[g, h], &group)?.is_identity() {
                return Err(Error::CertificateFailed(format!(
                    "cached witness for {w} in PSL2({}) does not witness",
                    e.p
                )));
            }
            memo.insert((e.p, w), (g, h));
            loaded += 1;
        }
        Ok(loaded)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, Some(2)).unwrap()
    }

    #[test]
    fn witnesses_are_sound_and_deterministic() {
        let pol = WitnessPolicy::default();
        let b = Budget::default();
        for (word, p) in [("x", 5), ("xyXY", 5), ("xyXy", 11), ("xxyy", 53)] {
            let (g, h) = nonlaw_witness(&w(word), p, &pol, &b).unwrap();
            let group = Psl2::new(p).unwrap();
            assert!(!evaluate(&w(word), &[g, h], &group).unwrap().is_identity());
            assert_eq!(nonlaw_witness(&w(word), p, &pol, &b).unwrap(), (g, h));
        }
    }

    #[test]
    fn law_has_no_witness() {
        let pol = WitnessPolicy {
            random_attempts: 50,
            ..Default::default()
        };
        let law = crate::words::explicit_psl2_law(5).unwrap();
        assert!(matches!(
            nonlaw_witness(&law, 5, &pol, &Budget::default()),
            Err(Error::WitnessNotFound { .. })
        ));
    }

    #[test]
    fn fallback_scan_finds_witness() {
        let pol = WitnessPolicy {
            random_attempts: 0,
            ..Default::default()
        };
        let (g, h) = nonlaw_witness(&w("xyXY"), 5, &pol, &Budget::default()).unwrap();
        assert_ne!(g.mul(&h), h.mul(&g));
    }

    #[test]
    fn bank_memoizes_and_persists() {
        let bank = WitnessBank::new(WitnessPolicy::default(), Budget::default());
        let a = bank.witness(11, &w("xy")).unwrap();
        assert_eq!(bank.witness(11, &w("xy")).unwrap(), a);
        assert_eq!(bank.len(), 1);
        let dir = tempfile::tempdir().unwrap();
        bank.save_to_dir(dir.path()).unwrap();
        let fresh = WitnessBank::new(WitnessPolicy::default(), Budget::default());
        assert_eq!(fresh.load_from_dir(dir.path()).unwrap(), 1);
        assert_eq!(fresh.witness(11, &w("xy")).unwrap(), a);
    }

    #[test]
    fn bank_is_shareable() {
        let bank = std::sync::Arc::new(WitnessBank::default());
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let bank = bank.clone();
                std::thread::spawn(move || bank.witness(13, &w("xxY")).unwrap())
            })
            .collect();
        let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(results.windows(2).all(|p| p[0] == p[1]));
    }
}
