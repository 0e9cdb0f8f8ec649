//! Shared fixtures for the criterion benches.

use lawless_core::{Schedule, Word, WreathNormalForm};

/// A wreath word of about `4 * reps` letters with shifts up to `reps`.
pub fn wreath_fixture(reps: usize) -> WreathNormalForm {
    let mut text = String::new();
    for i in 0..reps {
        text.push_str(if i % 3 == 0 { "ĝtĥ" } else { "ĥTĝ⁻¹t" });
    }
    WreathNormalForm::parse(&text).expect("fixture parses")
}

/// Two short rank-2 words that are not laws of any `PSL2(p)`.
pub fn word_pair() -> (Word, Word) {
    (
        Word::parse("xyXY", Some(2)).expect("fixture parses"),
        Word::parse("xxyXyy", Some(2)).expect("fixture parses"),
    )
}

pub fn tiny_schedule() -> Schedule {
    Schedule::tiny()
}
