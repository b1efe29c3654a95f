use proptest::prelude::*;

use sftgroup::builtin;
use sftgroup::perron::PerronData;
use sftgroup::pl::{self, PlMap};
use sftgroup::random::{random_point, random_table, rng};
use sftgroup::sft::{EppPoint, TransitionMatrix, Word};
use sftgroup::AdicTable;

fn matrix(i: usize) -> TransitionMatrix {
    builtin::matrices().swap_remove(i).1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_points_are_stable(mi in 0usize..5, seed: u64, k in 0usize..6) {
        let a = matrix(mi);
        let x = random_point(&a, &mut rng(seed), 4, 4);
        let again = EppPoint::new(&a, x.preamble().clone(), x.cycle().clone()).unwrap();
        prop_assert_eq!(&again, &x);
        // Unrolling the cycle into the preamble names the same point.
        let cut = x.preamble().len() + k;
        let cycle = x.shift(cut).prefix(x.cycle().len() * 2);
        prop_assert_eq!(EppPoint::new(&a, x.prefix(cut), cycle).unwrap(), x);
    }

    #[test]
    fn action_is_a_group_action(mi in 0usize..5, s1: u64, s2: u64, px: u64) {
        let a = matrix(mi);
        let t = random_table(&a, s1, 3).unwrap();
        let u = random_table(&a, s2, 3).unwrap();
        let x = random_point(&a, &mut rng(px), 3, 3);
        prop_assert_eq!(t.compose(&u).unwrap().apply(&x), t.apply(&u.apply(&x)));
        prop_assert_eq!(t.inverse().apply(&t.apply(&x)), x);
    }

    #[test]
    fn words_inside_a_row_move_by_prefix_replacement(mi in 0usize..5, seed: u64, len in 4usize..7) {
        let a = matrix(mi);
        let t = random_table(&a, seed, 3).unwrap();
        for w in a.words(len) {
            let image = t.apply_word(&w).unwrap();
            let back = t.inverse().apply_word(&image).unwrap();
            prop_assert_eq!(back, w);
        }
    }

    #[test]
    fn pl_inverse_and_kms_mass(mi in 0usize..5, seed: u64) {
        let a = matrix(mi);
        let pd = PerronData::compute(&a).unwrap();
        let t = random_table(&a, seed, 3).unwrap();
        let f = PlMap::from_table(&pd, &t).unwrap();
        let g = f.inverse(&pd).unwrap();
        for x in f.sample_points(2) {
            prop_assert_eq!(g.eval(&f.eval(&x).unwrap()).unwrap(), x);
        }
        prop_assert_eq!(pl::kms_expectation(&pd, &pl::derivative(&pd, &t)).unwrap(), pd.one());
        prop_assert_eq!(f.to_table().reduce(), t.reduce());
    }
}

#[test]
fn identity_is_neutral() {
    for (_, a) in builtin::matrices() {
        let id = AdicTable::identity(&a);
        for seed in 0..20 {
            let t = random_table(&a, seed, 3).unwrap();
            assert!(t.compose(&id).unwrap().equivalent(&t).unwrap());
            assert!(id.compose(&t).unwrap().equivalent(&t).unwrap());
        }
        assert_eq!(id.apply_word(&Word(vec![1])), Some(Word(vec![1])));
    }
}
