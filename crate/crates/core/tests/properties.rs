use lawless_core::delta::{Delta, DeltaGroup, DeltaWord};
use lawless_core::laws::{combine_pair, vanishing_containment_check, SmallGroup};
use lawless_core::psl2::{enumerate_group, Psl2, Psl2Elem};
use lawless_core::schedule::{check_sparse, Mode};
use lawless_core::words::{evaluate, FreeGroup};
use lawless_core::wreath::oracle::WindowOracle;
use lawless_core::wreath::{support_intersection_check, Letter, WreathVerdict, LETTERS};
use lawless_core::{Budget, FunctionSpec, Group, Schedule, SparseWreath, WitnessBank, Word, WreathGroup, WreathNormalForm};
use proptest::prelude::*;

fn raw_word(rank: i32, max: usize) -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec((1..=rank, any::<bool>()).prop_map(|(g, s)| if s { g } else { -g }), 0..max)
}

fn letters(max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..6usize).prop_map(|i| LETTERS[i]), 0..=max)
}

fn elem(p: u64) -> impl Strategy<Value = Psl2Elem> {
    let elems = enumerate_group(p, &Budget::default()).unwrap();
    (0..elems.len()).prop_map(move |i| elems[i])
}

/// Sparse tables: minimal recurrence plus random slack.
fn sparse_tables() -> impl Strategy<Value = (Vec<u128>, Vec<u128>)> {
    prop::collection::vec((0u128..5, 0u128..5), 1..9).prop_map(|slack| {
        let (mut p, mut q) = (vec![0u128], vec![0u128]);
        for (a, b) in slack {
            let (pl, ql) = (*p.last().unwrap(), *q.last().unwrap());
            let pn = pl + ql + 1 + a;
            p.push(pn);
            q.push(pn + ql + 1 + b);
        }
        (p, q)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reduction_is_idempotent_and_free(raw in raw_word(3, 24)) {
        let w = Word::reduce(3, raw.clone()).unwrap();
        prop_assert_eq!(Word::reduce(3, w.letters().to_vec()).unwrap(), w.clone());
        prop_assert!(w.letters().windows(2).all(|p| p[0] != -p[1]));
        prop_assert_eq!(w.exponent_sums(), Word::reduce(3, raw).unwrap().exponent_sums());
        prop_assert!(w.mul(&w.inverse()).unwrap().is_identity());
    }

    #[test]
    fn evaluation_is_a_homomorphism(u in raw_word(2, 16), v in raw_word(2, 16), g in elem(7), h in elem(7)) {
        let group = Psl2::new(7).unwrap();
        let (u, v) = (Word::reduce(2, u).unwrap(), Word::reduce(2, v).unwrap());
        let uv = evaluate(&u.mul(&v).unwrap(), &[g, h], &group).unwrap();
        let split = group.mul(&evaluate(&u, &[g, h], &group).unwrap(), &evaluate(&v, &[g, h], &group).unwrap());
        prop_assert_eq!(uv, split);
        prop_assert_eq!(evaluate(&u, &[g, h], &group).unwrap().mul(&evaluate(&u.inverse(), &[g, h], &group).unwrap()), Psl2Elem::identity(7));
    }

    #[test]
    fn free_group_substitution_matches_direct_evaluation(u in raw_word(2, 10), a in raw_word(2, 6), b in raw_word(2, 6), g in elem(5), h in elem(5)) {
        let group = Psl2::new(5).unwrap();
        let u = Word::reduce(2, u).unwrap();
        let (a, b) = (Word::reduce(2, a).unwrap(), Word::reduce(2, b).unwrap());
        let composed = evaluate(&u, &[a.clone(), b.clone()], &FreeGroup::new(2)).unwrap();
        let images = [evaluate(&a, &[g, h], &group).unwrap(), evaluate(&b, &[g, h], &group).unwrap()];
        prop_assert_eq!(evaluate(&composed, &[g, h], &group).unwrap(), evaluate(&u, &images, &group).unwrap());
    }

    #[test]
    fn wreath_multiplication_is_associative(x in letters(8), y in letters(8), z in letters(8)) {
        let (x, y, z) = (WreathNormalForm::from_letters(&x), WreathNormalForm::from_letters(&y), WreathNormalForm::from_letters(&z));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert!(WreathGroup.is_identity(&x.mul(&x.inverse())));
        let xy = x.mul(&y);
        prop_assert!(xy.maximal_shift() <= x.maximal_shift().max(y.maximal_shift() + x.net_shift().unsigned_abs()));
    }

    #[test]
    fn commutators_have_zero_shift_and_bounded_maximal_shift(x in letters(12), y in letters(12)) {
        let (x, y) = (WreathNormalForm::from_letters(&x), WreathNormalForm::from_letters(&y));
        let c = WreathGroup.commutator(&x, &y);
        prop_assert_eq!(c.net_shift(), 0);
        prop_assert!(c.maximal_shift() <= x.length_bound() + y.length_bound());
    }

    #[test]
    fn normal_forms_agree_with_the_oracle(ls in letters(12)) {
        let s = Schedule::minimal(10).unwrap();
        let w = SparseWreath::new(&s).unwrap();
        let oracle = WindowOracle::new(&s, -14, 160);
        let o = oracle.eval(&ls).unwrap();
        let nf = WreathNormalForm::from_letters(&ls);
        prop_assert_eq!(o.shift(), nf.net_shift());
        for m in -14..=160 {
            prop_assert_eq!(o.coordinate(m), w.coordinate_eval(&nf, m).unwrap());
        }
    }

    #[test]
    fn commutator_support_lies_in_both_supports(x in letters(8), y in letters(8)) {
        let s = Schedule::minimal(10).unwrap();
        let w = SparseWreath::new(&s).unwrap();
        let level = |l: Vec<Letter>| {
            let mut f = WreathNormalForm::from_letters(&l);
            let back = Letter::T(if f.net_shift() > 0 { -1 } else { 1 });
            while f.net_shift() != 0 {
                f.push_letter(back);
            }
            f
        };
        let (f1, f2) = (level(x), level(y));
        let c = WreathGroup.commutator(&f1, &f2);
        for m in w.support_candidates(&c, 6).unwrap() {
            if !w.coordinate_eval(&c, m).unwrap().is_empty() {
                prop_assert!(!w.coordinate_eval(&f1, m).unwrap().is_empty());
                prop_assert!(!w.coordinate_eval(&f2, m).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn sparse_recurrence_implies_sparseness((p, q) in sparse_tables()) {
        prop_assert!(check_sparse(&p, &q, p.len()));
        let l = (1..=p.len() as u128).collect();
        let s = Schedule::from_tables(Mode::Custom, 1, l, p.clone(), q).unwrap();
        prop_assert!(s.flags.recurrence_ok);
        prop_assert!(support_intersection_check(&s, 6, p.len()).unwrap());
    }

    #[test]
    fn monomial_pseudo_inverses(num in 1u32..4, extra in 0u32..4, n in 1u128..5000) {
        let f = FunctionSpec::pow(num, num + extra).unwrap();
        let (lo, hi) = (f.lower_inverse().unwrap(), f.upper_inverse().unwrap());
        prop_assert_eq!(f.eval(lo.eval(n).unwrap()).unwrap(), n);
        prop_assert_eq!(f.eval(hi.eval(n).unwrap()).unwrap(), n);
        prop_assert!(lo.eval(n).unwrap() <= hi.eval(n).unwrap());
        prop_assert!(f.eval(hi.eval(n).unwrap() + 1).unwrap() > n);
        if lo.eval(n).unwrap() > 1 {
            prop_assert!(f.eval(lo.eval(n).unwrap() - 1).unwrap() < n);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn combined_words_contain_both_vanishing_sets(u in raw_word(2, 7), v in raw_word(2, 7)) {
        let (u, v) = (Word::reduce(2, u).unwrap(), Word::reduce(2, v).unwrap());
        prop_assume!(!u.is_identity() && !v.is_identity());
        let c = combine_pair(&u, &v).unwrap();
        prop_assert!(!c.is_identity());
        prop_assert!(c.len() <= 64 * u.len().max(v.len()));
        prop_assert!(vanishing_containment_check(&c, &[u, v], SmallGroup::Psl2(3), &Budget::default()).unwrap());
    }

    /// Whenever the identity test certifies, no coordinate in a wide window
    /// carries a detectable non-identity component.
    #[test]
    fn certified_identities_survive_a_window_scan(ls in letters(10)) {
        let s = Schedule::minimal(9).unwrap();
        let bank = WitnessBank::default();
        let delta = Delta::new(&s, &bank);
        let w = SparseWreath::new(&s).unwrap();
        let x = WreathNormalForm::from_letters(&ls);
        let x = WreathGroup.commutator(&x, &WreathNormalForm::parse("TgtG").unwrap());
        let verdict = w.identity_test(&x, 8, &delta);
        if let Ok(WreathVerdict::IdentityCertified(_)) = verdict {
            for m in -12..=(s.q[7] as i64 + 12) {
                let v = delta.identity(&w.coordinate_eval(&x, m).unwrap(), &[]).unwrap();
                prop_assert!(!v.is_non_identity(), "coordinate {} is non-identity", m);
            }
        }
    }
}

#[test]
fn delta_commutators_are_formal() {
    let g = DeltaWord::generator(2, lawless_core::delta::Gen::G, 1);
    let h = DeltaWord::generator(2, lawless_core::delta::Gen::H, 1);
    let c = DeltaGroup.commutator(&g, &h);
    assert_eq!(c.factors().len(), 4);
    assert!(DeltaGroup.commutator(&g, &g).is_empty());
}
