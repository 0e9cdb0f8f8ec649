//! Resource budgets for exhaustive computations.

/// Environment variable overriding [`Budget::max_elems`].
pub const BUDGET_ELEMS_ENV: &str = "LAWLESS_LAB_BUDGET_ELEMS";
/// Environment variable naming a directory for persisted witness tables.
pub const CACHE_DIR_ENV: &str = "LAWLESS_LAB_CACHE_DIR";

/// `|PSL2(31)|`, the default enumeration cap.
pub const DEFAULT_MAX_ELEMS: u128 = 29_760;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest group that may be enumerated element by element.
    pub max_elems: u128,
    /// Largest number of tuples an exhaustive law check may visit.
    pub max_tuples: u128,
    /// Largest number of words a shortest-law search may test.
    pub max_words: u128,
    /// Largest number of 8-tuples a lower-bound audit may visit.
    pub max_audit_tuples: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_elems: DEFAULT_MAX_ELEMS,
            max_tuples: 1_000_000_000,
            max_words: 10_000_000,
            max_audit_tuples: 50_000_000,
        }
    }
}

impl Budget {
    /// Defaults, with `max_elems` taken from the environment when set.
    pub fn from_env() -> Self {
        let mut b = Budget::default();
        if let Some(v) = std::env::var(BUDGET_ELEMS_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u128>().ok())
        {
            b.max_elems = v;
        }
        b
    }
}
