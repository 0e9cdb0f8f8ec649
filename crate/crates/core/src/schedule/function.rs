//! Growth functions `f : N -> N` given exactly: monomials `ceil(n^λ)` with
//! rational `λ`, their pseudo-inverses in closed form, or explicit tables.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// `ceil(n^(num/den))`.
    Pow { num: u32, den: u32 },
    /// `min f^{-1}(n)` for `f = ceil(n^(num/den))`, `num <= den`.
    PowLowerInverse { num: u32, den: u32 },
    /// `max f^{-1}(n)` for `f = ceil(n^(num/den))`, `num <= den`.
    PowUpperInverse { num: u32, den: u32 },
    /// `f(n) = values[n - 1]` on the prefix `1..=values.len()`.
    Table { values: Vec<u128> },
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn big_to_u128(x: BigUint) -> Result<u128> {
    x.to_u128().ok_or(Error::Overflow("function value"))
}

fn floor_root(x: &BigUint, k: u32) -> BigUint {
    if k == 1 {
        x.clone()
    } else {
        x.nth_root(k)
    }
}

fn ceil_root(x: &BigUint, k: u32) -> BigUint {
    let r = floor_root(x, k);
    if r.pow(k) == *x {
        r
    } else {
        r + 1u32
    }
}

impl FunctionSpec {
    pub fn pow(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::Parse("exponent must be a positive rational".into()));
        }
        let g = gcd(num, den);
        Ok(FunctionSpec::Pow {
            num: num / g,
            den: den / g,
        })
    }

    /// Parses `pow:NUM[/NUM]` (decimals allowed, e.g. `pow:1.5`),
    /// `table:[1,2,...]` or `table:@path` (a JSON array).
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(rest) = text.strip_prefix("pow:") {
            let (n, d) = match rest.split_once('/') {
                Some((n, d)) => (parse_decimal(n)?, parse_decimal(d)?),
                None => (parse_decimal(rest)?, (1, 1)),
            };
            // (n.0 / n.1) / (d.0 / d.1)
            let num = n.0.checked_mul(d.1);
            let den = n.1.checked_mul(d.0);
            match (num, den) {
                (Some(num), Some(den)) => {
                    let g = gcd(num, den).max(1);
                    FunctionSpec::pow(num / g, den / g)
                }
                _ => Err(Error::Parse(format!("exponent too large: {rest}"))),
            }
        } else if let Some(rest) = text.strip_prefix("table:") {
            let body = if let Some(path) = rest.strip_prefix('@') {
                std::fs::read_to_string(path)?
            } else {
                rest.to_string()
            };
            let values: Vec<u128> = serde_json::from_str(&body)?;
            Ok(FunctionSpec::Table { values })
        } else {
            Err(Error::Parse(format!(
                "function spec must be pow:NUM[/NUM] or table:..., got {text:?}"
            )))
        }
    }

    pub fn eval(&self, n: u128) -> Result<u128> {
        match self {
            FunctionSpec::Pow { num, den } => {
                let x = BigUint::from(n).pow(*num);
                big_to_u128(ceil_root(&x, *den))
            }
            FunctionSpec::PowUpperInverse { num, den } => {
                let x = BigUint::from(n).pow(*den);
                big_to_u128(floor_root(&x, *num))
            }
            FunctionSpec::PowLowerInverse { num, den } => {
                if n == 0 {
                    return Ok(0);
                }
                let x = BigUint::from(n - 1).pow(*den);
                big_to_u128(floor_root(&x, *num) + BigUint::one())
            }
            FunctionSpec::Table { values } => {
                if n == 0 {
                    return Ok(0);
                }
                usize::try_from(n - 1)
                    .ok()
                    .and_then(|i| values.get(i))
                    .copied()
                    .ok_or(Error::InsufficientTable {
                        needed: n,
                        have: values.len(),
                    })
            }
        }
    }

    /// The largest argument this function can be evaluated at, if bounded.
    pub fn domain_limit(&self) -> Option<u128> {
        match self {
            FunctionSpec::Table { values } => Some(values.len() as u128),
            _ => None,
        }
    }

    /// `f_*(n) = min f^{-1}(n)`.
    pub fn lower_inverse(&self) -> Result<FunctionSpec> {
        match self {
            FunctionSpec::Pow { num, den } if num <= den => Ok(FunctionSpec::PowLowerInverse {
                num: *num,
                den: *den,
            }),
            FunctionSpec::Table { values } => Ok(FunctionSpec::Table {
                values: pseudo_inverse(values)?.0,
            }),
            _ => Err(Error::NotSurjective(self.first_missing_value())),
        }
    }

    /// `f^*(n) = max f^{-1}(n)`.
    pub fn upper_inverse(&self) -> Result<FunctionSpec> {
        match self {
            FunctionSpec::Pow { num, den } if num <= den => Ok(FunctionSpec::PowUpperInverse {
                num: *num,
                den: *den,
            }),
            FunctionSpec::Table { values } => Ok(FunctionSpec::Table {
                values: pseudo_inverse(values)?.1,
            }),
            _ => Err(Error::NotSurjective(self.first_missing_value())),
        }
    }

    fn first_missing_value(&self) -> u128 {
        let mut prev = 0u128;
        for n in 1..=4096u128 {
            match self.eval(n) {
                Ok(v) if v > prev + 1 => return prev + 1,
                Ok(v) => prev = v,
                Err(_) => break,
            }
        }
        prev + 1
    }

    /// First `n < len` with `f(n + 1) < f(n)`, scanning `1..=len`.
    pub fn first_decrease(&self, len: u128) -> Result<Option<u128>> {
        let mut prev = self.eval(1)?;
        for n in 2..=len {
            let v = self.eval(n)?;
            if v < prev {
                return Ok(Some(n - 1));
            }
            prev = v;
        }
        Ok(None)
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Pow { num, den } if *den == 1 => write!(f, "pow:{num}"),
            FunctionSpec::Pow { num, den } => write!(f, "pow:{num}/{den}"),
            FunctionSpec::PowLowerInverse { num, den } => write!(f, "lower_inverse(pow:{num}/{den})"),
            FunctionSpec::PowUpperInverse { num, den } => write!(f, "upper_inverse(pow:{num}/{den})"),
            FunctionSpec::Table { values } => write!(f, "table[{}]", values.len()),
        }
    }
}

/// Parses a non-negative decimal into a fraction `(numerator, denominator)`.
fn parse_decimal(s: &str) -> Result<(u32, u32)> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad exponent {s:?}"));
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let den = 10u32.checked_pow(frac.len() as u32).ok_or_else(bad)?;
    let digits = format!("{int}{frac}");
    let num: u32 = digits.parse().map_err(|_| bad())?;
    Ok((num, den))
}

/// Tables `(f_*, f^*)` of the minimal and maximal preimages of each value.
///
/// Only values whose preimage run closes inside the table are reported, i.e.
/// `1..f(len)`, so `f^*` is exact. Fails when a value in that range is missed.
pub fn pseudo_inverse(values: &[u128]) -> Result<(Vec<u128>, Vec<u128>)> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let Some(&last) = values.last() else {
        return Ok((lower, upper));
    };
    for (i, w) in values.windows(2).enumerate() {
        if w[1] < w[0] {
            return Err(Error::HypothesisFailed {
                n: i as u128 + 1,
                reason: "function decreases".into(),
            });
        }
    }
    let mut idx = 0usize;
    for v in 1..last {
        while idx < values.len() && values[idx] < v {
            idx += 1;
        }
        if idx == values.len() || values[idx] != v {
            return Err(Error::NotSurjective(v));
        }
        lower.push(idx as u128 + 1);
        let mut end = idx;
        while end + 1 < values.len() && values[end + 1] == v {
            end += 1;
        }
        upper.push(end as u128 + 1);
        idx = end;
    }
    Ok((lower, upper))
}
