//! Planners: from a target growth function to a schedule with constants.

use serde::{Deserialize, Serialize};

use super::{equiv_constants_check, ConstantsReport};
use crate::error::{Error, Result};
use crate::schedule::{first_scaling_failure, FunctionSpec, Schedule, DEFAULT_HYPOTHESIS_PREFIX};

/// Largest scaling constant tried when searching for `M`.
const MAX_SCALE: u128 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanMode {
    Faster,
    Fast,
    Slow,
}

impl std::str::FromStr for PlanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "faster" => Ok(PlanMode::Faster),
            "fast" => Ok(PlanMode::Fast),
            "slow" => Ok(PlanMode::Slow),
            _ => Err(Error::Parse(format!("plan mode must be faster, fast or slow, got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub mode: PlanMode,
    pub f: String,
    /// The function whose scaling was witnessed: `f` itself, or `g` in slow mode.
    pub scaled: String,
    #[serde(rename = "M")]
    pub m: Option<u128>,
    #[serde(rename = "T")]
    pub t: u128,
    #[serde(rename = "K")]
    pub k: Option<u128>,
    #[serde(rename = "C")]
    pub c: Option<u128>,
    pub route: String,
    pub verified: Vec<String>,
    pub constants: Option<ConstantsReport>,
    pub schedule: Schedule,
}

/// Smallest `M` in `2..=MAX_SCALE` with `h(Mn) >= ratio h(n)` on the prefix.
fn direct_scale(h: &FunctionSpec, ratio: u128) -> Result<Option<u128>> {
    for m in 2..=MAX_SCALE {
        if first_scaling_failure(h, m, ratio, DEFAULT_HYPOTHESIS_PREFIX)?.is_none() {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

fn hypothesis_failed(h: &FunctionSpec, ratio: u128) -> Result<Error> {
    let n = first_scaling_failure(h, MAX_SCALE, ratio, DEFAULT_HYPOTHESIS_PREFIX)?.unwrap_or(1);
    Ok(Error::HypothesisFailed {
        n,
        reason: format!("{h}(M n) >= {ratio} {h}(n) fails for every M <= {MAX_SCALE}"),
    })
}

fn least_power_reaching(m: u128, target: u128) -> u32 {
    let mut k = 1;
    while m.pow(k) < target {
        k += 1;
    }
    k
}

/// Builds a schedule for `f` and verifies the inequalities its mode needs on
/// the prefix `1..=n_max`.
pub fn plan(f: &FunctionSpec, mode: PlanMode, n_max: usize) -> Result<Plan> {
    let prefix = DEFAULT_HYPOTHESIS_PREFIX.min(f.domain_limit().unwrap_or(u128::MAX));
    if let Some(n) = f.first_decrease(prefix)? {
        return Err(Error::HypothesisFailed {
            n,
            reason: format!("f({}) < f({n}): f is not non-decreasing", n + 1),
        });
    }
    let mut verified = vec![format!("f non-decreasing on 1..={prefix}")];
    match mode {
        PlanMode::Fast => {
            let (m, route) = match direct_scale(f, 9)? {
                Some(m) => (m, format!("f(M n) >= 9 f(n) with M = {m}")),
                None => fast_corollary(f)?,
            };
            verified.push(format!("{route} on n <= {DEFAULT_HYPOTHESIS_PREFIX}"));
            let t = m.max(65);
            let schedule = Schedule::fast(f, m, t, n_max)?;
            verified.push(format!("L(m) = {t}^m satisfies L(m+1) >= 64 L(m) + 29"));
            let (k, c) = (1, 4 * t * t);
            let constants = checked_constants(&schedule, f, k, c, n_max.saturating_sub(1), &mut verified)?;
            Ok(Plan {
                mode,
                f: f.to_string(),
                scaled: f.to_string(),
                m: Some(m),
                t,
                k: Some(k),
                c: Some(c),
                route,
                verified,
                constants: Some(constants),
                schedule,
            })
        }
        PlanMode::Slow => {
            let g = f.lower_inverse().map_err(|e| match e {
                Error::NotSurjective(v) => Error::HypothesisFailed {
                    n: v,
                    reason: format!("f misses the value {v}, so f(g(n)) = n has no solution g"),
                },
                other => other,
            })?;
            let (m, route) = match direct_scale(&g, 93)? {
                Some(m) => (m, format!("g(M n) >= 93 g(n) with g = f_*, M = {m}")),
                None => slow_corollary(f, &g)?,
            };
            verified.push(format!("{route} on n <= {DEFAULT_HYPOTHESIS_PREFIX}"));
            verified.push(format!("f(g(n)) = n on n <= {DEFAULT_HYPOTHESIS_PREFIX}"));
            let t = m.max(9);
            let schedule = Schedule::slow(f, Some(&g), m, t, n_max)?;
            let (k, c) = (2, 5 * t);
            let m_max = (n_max / 2).min(n_max.saturating_sub(1));
            let constants = checked_constants(&schedule, f, k, c, m_max, &mut verified)?;
            Ok(Plan {
                mode,
                f: f.to_string(),
                scaled: g.to_string(),
                m: Some(m),
                t,
                k: Some(k),
                c: Some(c),
                route,
                verified,
                constants: Some(constants),
                schedule,
            })
        }
        PlanMode::Faster => {
            let schedule = Schedule::faster(f, n_max)?;
            let mut next_l = schedule.l(n_max)?;
            next_l = next_l
                .checked_mul(64)
                .and_then(|x| x.checked_add(29))
                .ok_or(Error::Overflow("64 L + 29"))?;
            for m in 2..=n_max {
                let l_next = if m < n_max { schedule.l(m + 1)? } else { next_l };
                let need = f.eval(l_next)?.checked_mul(2).ok_or(Error::Overflow("2 f(L)"))?;
                if schedule.gap(m)? < need {
                    return Err(Error::CertificateFailed(format!("(q(m) - p(m))/2 < f(L(m+1)) at m = {m}")));
                }
            }
            verified.push(format!("(q(m) - p(m))/2 >= f(L(m+1)) for 2 <= m <= {n_max}"));
            verified.push("L(m+1) = 64 L(m) + 29".into());
            Ok(Plan {
                mode,
                f: f.to_string(),
                scaled: f.to_string(),
                m: None,
                t: schedule.t,
                k: None,
                c: None,
                route: "minimal p, q raised to meet (q(m) - p(m))/2 >= f(L(m+1))".into(),
                verified,
                constants: None,
                schedule,
            })
        }
    }
}

fn checked_constants(
    schedule: &Schedule,
    f: &FunctionSpec,
    k: u128,
    c: u128,
    m_max: usize,
    verified: &mut Vec<String>,
) -> Result<ConstantsReport> {
    let report = equiv_constants_check(schedule, f, k, c, m_max)?;
    if !report.ok {
        return Err(Error::CertificateFailed(format!(
            "constants K = {k}, C = {c} fail on the prefix: (i) {}, (ii) {}",
            report.i_ok, report.ii_ok
        )));
    }
    verified.push(format!("(i) K (q(Km) - p(Km))/2 >= f(L(m+1)) for 2 <= m <= {m_max}, K = {k}"));
    verified.push(format!("(ii) C f(C L(m)) >= 2 (q(m+1) - p(m+1) + 1) for 1 <= m <= {m_max}, C = {c}"));
    Ok(report)
}

/// `f(Mn) >= M f(n)` with `M^k >= 9` gives `f(M^k n) >= 9 f(n)`.
fn fast_corollary(f: &FunctionSpec) -> Result<(u128, String)> {
    for m in 2..=64u128 {
        if first_scaling_failure(f, m, m, DEFAULT_HYPOTHESIS_PREFIX)?.is_none() {
            let k = least_power_reaching(m, 9);
            let mk = m.pow(k);
            if first_scaling_failure(f, mk, 9, DEFAULT_HYPOTHESIS_PREFIX)?.is_none() {
                return Ok((mk, format!("f(M n) >= M f(n) with M = {m}, so f({mk} n) >= 9 f(n)")));
            }
        }
    }
    Err(hypothesis_failed(f, 9)?)
}

/// `f(Mn) <= M f(n)` with `M^k >= 93` gives `f_*((M+1)^k n) >= 93 f_*(n)`.
fn slow_corollary(f: &FunctionSpec, g: &FunctionSpec) -> Result<(u128, String)> {
    for m in 2..=64u128 {
        let sub = (1..=DEFAULT_HYPOTHESIS_PREFIX).try_fold(true, |ok, n| -> Result<bool> {
            Ok(ok && f.eval(m * n)? <= m * f.eval(n)?)
        })?;
        if sub {
            let k = least_power_reaching(m, 93);
            let mk = (m + 1).pow(k);
            if first_scaling_failure(g, mk, 93, DEFAULT_HYPOTHESIS_PREFIX)?.is_none() {
                return Ok((mk, format!("f(M n) <= M f(n) with M = {m}, so f_*({mk} n) >= 93 f_*(n)")));
            }
        }
    }
    Err(hypothesis_failed(g, 93)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_plan_for_three_halves() {
        let f = FunctionSpec::parse("pow:1.5").unwrap();
        let plan = plan(&f, PlanMode::Fast, 4).unwrap();
        assert_eq!(plan.t, 65);
        assert!(plan.m.unwrap() <= 9);
        assert!(plan.constants.unwrap().ok);
        assert!(plan.schedule.flags.recurrence_ok);
    }

    #[test]
    fn slow_plan_for_square_root() {
        let f = FunctionSpec::parse("pow:1/2").unwrap();
        let plan = plan(&f, PlanMode::Slow, 4).unwrap();
        assert_eq!(plan.m, Some(11));
        assert_eq!(plan.c, Some(55));
        assert!(plan.constants.unwrap().ok);
    }

    #[test]
    fn faster_plan_meets_its_inequality() {
        let f = FunctionSpec::parse("pow:2").unwrap();
        let plan = plan(&f, PlanMode::Faster, 4).unwrap();
        assert!(plan.schedule.flags.recurrence_ok);
        assert_eq!(plan.schedule.l, vec![1, 93, 5981, 382813]);
    }

    #[test]
    fn decreasing_tables_are_rejected() {
        let f = FunctionSpec::Table { values: vec![1, 2, 3, 2, 5] };
        for mode in [PlanMode::Fast, PlanMode::Slow, PlanMode::Faster] {
            assert!(matches!(plan(&f, mode, 3), Err(Error::HypothesisFailed { n: 3, .. })));
        }
    }

    #[test]
    fn superlinear_functions_have_no_slow_plan() {
        let f = FunctionSpec::parse("pow:2").unwrap();
        assert!(matches!(plan(&f, PlanMode::Slow, 3), Err(Error::HypothesisFailed { .. })));
    }
}
