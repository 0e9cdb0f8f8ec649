//! Subcommand handlers. Each returns whether the run passed its own check.

use std::io::Write;
use std::path::{Path, PathBuf};

use lawless_core::cert::{
    self, chi_lower_audit, chi_upper, chi_upper_all, equiv_constants_check, growth_table, not_rf_witness,
    GrowthCertificate, LowerAudit, PlanMode,
};
use lawless_core::config::CACHE_DIR_ENV;
use lawless_core::delta::Delta;
use lawless_core::laws::{combine_many, combine_pair, iterated_law, CombineReport};
use lawless_core::psl2::{law_check, shortest_law_search, WitnessPolicy};
use lawless_core::schedule::first_scaling_failure;
use lawless_core::suite::Suite;
use lawless_core::words::{explicit_psl2_law, reduced_word_count};
use lawless_core::wreath::support_intersection_violation;
use lawless_core::{
    Budget, Error, FunctionSpec, Psl2Elem, Result, Schedule, SparseWreath, WitnessBank, Word, WreathNormalForm,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::{
    CertCmd, Command, CombineMode, Global, Inverse, LawsCmd, Profile, Psl2Cmd, ScheduleCmd, WreathCmd,
};

/// Ratio the fast schedule needs from `f(Mn) >= ratio f(n)`.
const FAST_RATIO: u128 = 9;
/// Ratio the slow schedule needs from `g(Mn) >= ratio g(n)`.
const SLOW_RATIO: u128 = 93;
/// Prefix on which a scaling constant is searched for.
const SCALE_PREFIX: u128 = 256;

/// Rebuilds every object with its keys in sorted order, whatever map type
/// `serde_json` was compiled with.
fn sorted(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Map::new();
            for (k, v) in entries {
                out.insert(k, sorted(v));
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(sorted).collect()),
        other => other,
    }
}

fn render<T: Serialize>(report: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(&sorted(serde_json::to_value(report)?))?)
}

fn emit_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let mut body = text.to_string();
            if !body.ends_with('\n') {
                body.push('\n');
            }
            std::fs::write(path, body)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{}", text.trim_end()) {
                // A closed reader (e.g. `| head`) is not a failure of the run.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(())
}

fn emit<T: Serialize>(report: &T, out: Option<&Path>) -> Result<()> {
    emit_text(&render(report)?, out)
}

fn load_schedule(path: &Path) -> Result<Schedule> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Schedule::from_json(&text)
}

fn parse_elem(p: u64, text: &str) -> Result<Psl2Elem> {
    let parts: Vec<i64> = text
        .split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|e| Error::Parse(format!("matrix entry {s:?}: {e}"))))
        .collect::<Result<_>>()?;
    match parts[..] {
        [a, b, c, d] => Psl2Elem::make(p, a, b, c, d),
        _ => Err(Error::Parse(format!("expected a,b,c,d, got {text:?}"))),
    }
}

fn parse_rank2(text: &str) -> Result<Word> {
    Word::parse(text, Some(2))
}

fn combine_json(r: &CombineReport) -> Value {
    json!({
        "word": r.word.to_string(),
        "letters": r.word.letters(),
        "length": r.length,
        "bound": r.bound,
        "bound_ok": r.bound_ok,
    })
}

pub fn run(command: Command, global: &Global) -> Result<bool> {
    let budget = Budget::from_env();
    let policy = WitnessPolicy {
        seed: global.seed,
        ..Default::default()
    };
    let bank = WitnessBank::new(policy, budget);
    let cache = std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from);
    if let Some(dir) = &cache {
        bank.load_from_dir(dir)?;
    }
    let out = global.out.as_deref();
    let ok = match command {
        Command::Psl2(c) => psl2(c, &budget, out)?,
        Command::Laws(c) => laws(c, out)?,
        Command::Schedule(c) => schedule(c, out)?,
        Command::Wreath(c) => wreath(c, &bank, out)?,
        Command::Cert(c) => certs(c, &budget, &bank, out)?,
        Command::VerifyAll { profile } => verify_all(profile, global.seed, budget, out)?,
    };
    if let Some(dir) = &cache {
        if !bank.is_empty() {
            bank.save_to_dir(dir)?;
        }
    }
    Ok(ok)
}

fn psl2(c: Psl2Cmd, budget: &Budget, out: Option<&Path>) -> Result<bool> {
    match c {
        Psl2Cmd::Order { p, elem } => {
            let g = parse_elem(p, &elem)?;
            emit(&json!({ "p": p, "elem": g.entries(), "order": g.order() }), out)?;
        }
        Psl2Cmd::IsLaw { p, word } => {
            let w = if word == "explicit" {
                explicit_psl2_law(p)?
            } else {
                Word::parse(&word, None)?
            };
            let check = law_check(&w, p, budget)?;
            let witness = check
                .witness
                .as_ref()
                .map(|t| t.iter().map(Psl2Elem::entries).collect::<Vec<_>>());
            emit(
                &json!({
                    "p": p,
                    "word": w.to_string(),
                    "length": w.len(),
                    "is_law": check.is_law,
                    "checked_tuples": check.checked_tuples,
                    "witness": witness,
                }),
                out,
            )?;
        }
        Psl2Cmd::ShortestLaw { p, max_len } => {
            let s = shortest_law_search(p, max_len, budget)?;
            emit(
                &json!({
                    "p": p,
                    "max_len": max_len,
                    "law": s.law.as_ref().map(Word::to_string),
                    "length": s.law.as_ref().map(Word::len),
                    "words_checked": s.words_checked,
                    "checked_tuples": s.checked_tuples,
                }),
                out,
            )?;
        }
    }
    Ok(true)
}

fn read_words(path: &Path) -> Result<Vec<Word>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let items: Vec<Value> = serde_json::from_str(&text)?;
    let words = items
        .iter()
        .map(|v| match v {
            Value::String(s) => Word::parse(s, None),
            Value::Array(_) => Word::parse(&v.to_string(), None),
            _ => Err(Error::Parse(format!("word must be a string or an integer array, got {v}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    // Lift every word to the largest rank present.
    let rank = words.iter().map(Word::rank).max().unwrap_or(2);
    words
        .into_iter()
        .map(|w| Word::reduce(rank, w.letters().to_vec()))
        .collect()
}

fn laws(c: LawsCmd, out: Option<&Path>) -> Result<bool> {
    match c {
        LawsCmd::Combine { words, mode } => {
            let ws = read_words(&words)?;
            let report = match mode {
                CombineMode::Tree => combine_many(&ws)?,
                CombineMode::Pair => {
                    let [u, v] = &ws[..] else {
                        return Err(Error::Parse(format!("pair mode needs exactly 2 words, got {}", ws.len())));
                    };
                    let word = combine_pair(u, v)?;
                    let bound = 64 * u.len().max(v.len()) as u128;
                    let length = word.len();
                    CombineReport {
                        word,
                        length,
                        bound,
                        bound_ok: length as u128 <= bound,
                    }
                }
            };
            emit(&combine_json(&report), out)?;
            Ok(report.bound_ok)
        }
        LawsCmd::Tower { schedule, n } => {
            let s = load_schedule(&schedule)?;
            let report = iterated_law(&s, n)?;
            let mut v = combine_json(&report);
            v["n"] = json!(n);
            v["schedule"] = json!(s.id());
            emit(&v, out)?;
            Ok(report.bound_ok)
        }
    }
}

fn need_f(f: Option<String>) -> Result<FunctionSpec> {
    FunctionSpec::parse(&f.ok_or_else(|| Error::Parse("--f is required for this mode".into()))?)
}

/// Smallest `M <= limit` with `h(Mn) >= ratio h(n)` on the search prefix.
fn scaling_constant(h: &FunctionSpec, ratio: u128, limit: u128) -> Result<u128> {
    for m in 2..=limit.max(2) {
        if first_scaling_failure(h, m, ratio, SCALE_PREFIX)?.is_none() {
            return Ok(m);
        }
    }
    let n = first_scaling_failure(h, limit.max(2), ratio, SCALE_PREFIX)?.unwrap_or(1);
    Err(Error::HypothesisFailed {
        n,
        reason: format!("{h}(M n) >= {ratio} {h}(n) fails for every M <= {}", limit.max(2)),
    })
}

#[allow(clippy::too_many_arguments)]
fn build_schedule(
    mode: &str,
    n: usize,
    f: Option<String>,
    t: Option<u128>,
    m: Option<u128>,
    l: Option<String>,
    g: Inverse,
) -> Result<Schedule> {
    match mode {
        "minimal" => Schedule::minimal(n),
        "tiny" => Ok(Schedule::tiny()),
        "custom" => {
            let text = l.ok_or_else(|| Error::Parse("--L is required for custom schedules".into()))?;
            let values = text
                .split(',')
                .map(|s| s.trim().parse::<u128>().map_err(|e| Error::Parse(format!("L value {s:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            Schedule::custom(values)
        }
        "faster" => Schedule::faster(&need_f(f)?, n),
        "fast" => {
            let f = need_f(f)?;
            match (m, t) {
                (None, None) => Ok(cert::plan(&f, PlanMode::Fast, n)?.schedule),
                _ => {
                    let m = match m {
                        Some(m) => m,
                        None => scaling_constant(&f, FAST_RATIO, t.unwrap_or(2))?,
                    };
                    Schedule::fast(&f, m, t.unwrap_or(m.max(65)), n)
                }
            }
        }
        "slow" => {
            let f = need_f(f)?;
            match (m, t) {
                (None, None) => Ok(cert::plan(&f, PlanMode::Slow, n)?.schedule),
                _ => {
                    let gf = match g {
                        Inverse::Lower => f.lower_inverse()?,
                        Inverse::Upper => f.upper_inverse()?,
                    };
                    let m = match m {
                        Some(m) => m,
                        None => scaling_constant(&gf, SLOW_RATIO, t.unwrap_or(2))?,
                    };
                    Schedule::slow(&f, Some(&gf), m, t.unwrap_or(m.max(9)), n)
                }
            }
        }
        other => Err(Error::Parse(format!(
            "schedule mode must be minimal, fast, slow, faster, custom or tiny, got {other:?}"
        ))),
    }
}

fn schedule(c: ScheduleCmd, out: Option<&Path>) -> Result<bool> {
    match c {
        ScheduleCmd::Build {
            mode,
            n,
            f,
            t,
            m,
            l,
            g,
            name,
        } => {
            let mut s = build_schedule(&mode, n, f, t, m, l, g)?;
            if let Some(name) = name {
                s = s.with_name(name);
            }
            emit(&s, out)?;
            Ok(true)
        }
        ScheduleCmd::Check { path } => {
            let s = load_schedule(&path)?;
            let report = s.validate();
            let ok = report.is_valid() && report.stored_flags_match;
            let mut v = serde_json::to_value(&report)?;
            v["schedule"] = json!(s.id());
            v["valid"] = json!(ok);
            emit(&v, out)?;
            Ok(ok)
        }
    }
}

fn wreath(c: WreathCmd, bank: &WitnessBank, out: Option<&Path>) -> Result<bool> {
    match c {
        WreathCmd::Eval { schedule, word, coord } => {
            let s = load_schedule(&schedule)?;
            let x = WreathNormalForm::parse(&word)?;
            let sw = SparseWreath::new(&s)?;
            let value = sw.coordinate_eval(&x, coord)?;
            let verdict = Delta::new(&s, bank).identity(&value, &[])?;
            emit(
                &json!({
                    "word": word,
                    "normal_form": x.to_string(),
                    "factors": x.factors(),
                    "net_shift": x.net_shift(),
                    "length_bound": x.length_bound(),
                    "maximal_shift": x.maximal_shift(),
                    "coordinate": coord,
                    "value": value.factors(),
                    "levels": value.levels(),
                    "verdict": verdict,
                }),
                out,
            )?;
            Ok(true)
        }
        WreathCmd::CheckSupports {
            schedule,
            shift_range,
            window,
        } => {
            let s = load_schedule(&schedule)?;
            let violation = support_intersection_violation(&s, shift_range, window)?;
            let detail = violation.as_ref().map(|((g1, a), (g2, b), count)| {
                json!({
                    "first": { "gen": g1, "shift": a },
                    "second": { "gen": g2, "shift": b },
                    "common_points": count,
                })
            });
            emit(
                &json!({
                    "schedule": s.id(),
                    "shift_range": shift_range,
                    "window": window,
                    "ok": violation.is_none(),
                    "violation": detail,
                }),
                out,
            )?;
            Ok(violation.is_none())
        }
    }
}

fn certs(c: CertCmd, budget: &Budget, bank: &WitnessBank, out: Option<&Path>) -> Result<bool> {
    match c {
        CertCmd::Upper {
            schedule,
            n,
            all_words_up_to,
            word,
        } => {
            let s = load_schedule(&schedule)?;
            if let Some(w) = word {
                emit(&chi_upper(&parse_rank2(&w)?, &s, n, bank)?, out)?;
                return Ok(true);
            }
            let max_len = match all_words_up_to {
                Some(len) => len,
                None => usize::try_from(s.l(n)?).map_err(|_| Error::Overflow("L(n)"))?,
            };
            let count = reduced_word_count(2, max_len);
            if count > budget.max_words {
                return Err(Error::BudgetExceeded {
                    what: "upper certificate words",
                    needed: count,
                    limit: budget.max_words,
                });
            }
            let mut certificate = GrowthCertificate::new(&s, n);
            certificate.upper = Some(chi_upper_all(&s, n, max_len, bank)?);
            certificate.check(&s)?;
            emit(&certificate, out)?;
            Ok(true)
        }
        CertCmd::Audit { schedule, n, budget: b } => {
            let s = load_schedule(&schedule)?;
            let audit = chi_lower_audit(&s, n, b, budget, bank)?;
            let ok = audit.all_vanished;
            let mut certificate = GrowthCertificate::new(&s, n);
            certificate.verdict_counts = Some(audit.verdicts.clone());
            certificate.lower_audit = Some(audit);
            if ok {
                certificate.check(&s)?;
            }
            emit(&certificate, out)?;
            Ok(ok)
        }
        CertCmd::Constants {
            schedule,
            f,
            k,
            c,
            m_max,
        } => {
            let s = load_schedule(&schedule)?;
            let f = FunctionSpec::parse(&f)?;
            let report = equiv_constants_check(&s, &f, k, c, m_max)?;
            let ok = report.ok;
            let mut certificate = GrowthCertificate::new(&s, s.n_max());
            certificate.constants = Some(report);
            emit(&certificate, out)?;
            Ok(ok)
        }
        CertCmd::Plan { f, mode, n } => {
            let f = FunctionSpec::parse(&f)?;
            let plan = cert::plan(&f, mode.parse()?, n)?;
            emit(&plan, out)?;
            Ok(true)
        }
        CertCmd::NotRf { schedule, window } => {
            let s = load_schedule(&schedule)?;
            emit(&not_rf_witness(&s, bank, window)?, out)?;
            Ok(true)
        }
        CertCmd::Table {
            schedule,
            n_max,
            budget: audit_budget,
        } => {
            let s = load_schedule(&schedule)?;
            let n_max = n_max.unwrap_or(s.n_max());
            let mut audits: Vec<LowerAudit> = Vec::new();
            if let Some(b) = audit_budget {
                for j in 1..=n_max {
                    if 2 * b as u128 >= s.gap(j)? {
                        continue;
                    }
                    audits.push(chi_lower_audit(&s, j, b, budget, bank)?);
                }
            }
            let rows = growth_table(&s, n_max, &audits)?;
            let mut writer = csv::Writer::from_writer(Vec::new());
            for row in &rows {
                writer
                    .serialize(row)
                    .map_err(|e| Error::Io(format!("csv: {e}")))?;
            }
            let bytes = writer.into_inner().map_err(|e| Error::Io(format!("csv: {e}")))?;
            emit_text(&String::from_utf8_lossy(&bytes), out)?;
            Ok(audits.iter().all(|a| a.all_vanished))
        }
    }
}

fn verify_all(profile: Profile, seed: u64, budget: Budget, out: Option<&Path>) -> Result<bool> {
    let Profile::Desk = profile;
    let suite = Suite::new(seed, budget);
    let results = suite.run_all();
    for r in &results {
        eprintln!("{}", r.line());
    }
    let failed: Vec<usize> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    emit(
        &json!({
            "profile": "desk",
            "seed": seed,
            "passed": results.len() - failed.len(),
            "total": results.len(),
            "failed": failed,
            "results": results,
        }),
        out,
    )?;
    Ok(failed.is_empty())
}
