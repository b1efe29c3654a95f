//! Greedy sibling merging against an exhaustive search for the fewest rows.

use sftgroup::builtin;
use sftgroup::random::random_table;
use sftgroup::sft::{TransitionMatrix, Word};
use sftgroup::AdicTable;

/// Fewest rows of any table equivalent to `t`. With every domain of `t` at
/// depth at most `d`, some minimal table has no cylinder deeper than `d`, and
/// a cylinder is a row exactly when `t` is one prefix replacement on it.
fn brute_force_min(a: &TransitionMatrix, t: &AdicTable) -> usize {
    let d = t.depth();
    a.symbols().map(|s| min_rows(a, t, &Word(vec![s]), d)).sum()
}

fn min_rows(a: &TransitionMatrix, t: &AdicTable, nu: &Word, d: usize) -> usize {
    if is_block(a, t, nu, d) {
        return 1;
    }
    assert!(nu.len() < d, "a depth-{d} cylinder always lies in one row");
    a.successors(nu.last().unwrap()).map(|s| min_rows(a, t, &nu.pushed(s), d)).sum()
}

fn is_block(a: &TransitionMatrix, t: &AdicTable, nu: &Word, d: usize) -> bool {
    let mut stem: Option<Word> = None;
    for tail in a.continuations(nu, d - nu.len()) {
        let image = t.apply_word(&nu.concat(&tail)).expect("depth-d words lie in a row");
        if image.len() <= tail.len() || !tail.is_suffix_of(&image) {
            return false;
        }
        let mu = image.prefix(image.len() - tail.len());
        match &stem {
            None => stem = Some(mu),
            Some(s) if *s != mu => return false,
            _ => {}
        }
    }
    let mu = stem.expect("every cylinder has an extension");
    a.same_row(nu.last().unwrap(), mu.last().unwrap())
}

trait Suffix {
    fn is_suffix_of(&self, other: &Word) -> bool;
}

impl Suffix for Word {
    fn is_suffix_of(&self, other: &Word) -> bool {
        other.0.ends_with(&self.0)
    }
}

#[test]
fn greedy_reduction_attains_the_minimum() {
    let mut checked = 0;
    for (mi, (name, a)) in builtin::matrices().into_iter().enumerate() {
        for seed in 0..60u64 {
            let s = seed + 1000 * mi as u64;
            let t = random_table(&a, s, 3).unwrap();
            let u = random_table(&a, s + 500, 2).unwrap();
            let candidates = [t.clone(), t.compose_uniform(&u).unwrap(), t.expand_to_depth(t.depth() + 1).unwrap()];
            for c in candidates {
                let reduced = c.reduce();
                assert!(reduced.equivalent(&c).unwrap());
                assert_eq!(
                    reduced.len(),
                    brute_force_min(&a, &c),
                    "{name}, seed {s}: greedy reduction is not minimal for {c:?}"
                );
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 5 * 60 * 3);
}

#[test]
fn reduction_is_a_class_invariant() {
    for (_, a) in builtin::matrices() {
        for seed in 0..40 {
            let t = random_table(&a, seed, 3).unwrap();
            let r = t.reduce();
            assert_eq!(r.reduce(), r);
            assert_eq!(t.expand_to_depth(t.depth() + 1).unwrap().reduce(), r);
            for i in 0..t.len() {
                assert_eq!(t.expand_row(i).unwrap().reduce(), r);
            }
        }
    }
}
