//! Seeded generators for tables and eventually periodic points.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sft::{EppPoint, Symbol, TransitionMatrix, Word};
use crate::table::{AdicTable, OrderClass, Row, TableError};

const MAX_ATTEMPTS: usize = 2000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random complete prefix-tree partition of `X_A` with words of length at
/// most `max_depth`, listed in lexicographic order.
pub fn random_partition<R: Rng>(a: &TransitionMatrix, rng: &mut R, max_depth: usize) -> Vec<Word> {
    fn grow<R: Rng>(a: &TransitionMatrix, rng: &mut R, w: Word, max_depth: usize, out: &mut Vec<Word>) {
        if w.len() >= max_depth || rng.gen_bool(0.5) {
            out.push(w);
            return;
        }
        let last = w.last().expect("nonempty");
        for j in a.successors(last).collect::<Vec<_>>() {
            grow(a, rng, w.pushed(j), max_depth, out);
        }
    }
    let mut out = Vec::new();
    for j in a.symbols() {
        grow(a, rng, Word(vec![j]), max_depth.max(1), &mut out);
    }
    out
}

fn classes(a: &TransitionMatrix, words: &[Word]) -> Vec<Symbol> {
    words.iter().map(|w| a.follower_class(w.last().unwrap())).collect()
}

fn sorted(mut v: Vec<Symbol>) -> Vec<Symbol> {
    v.sort_unstable();
    v
}

/// A random table whose domain and range partitions have depth at most
/// `max_depth`; deterministic per seed.
pub fn random_table(a: &TransitionMatrix, seed: u64, max_depth: usize) -> Result<AdicTable, TableError> {
    random_table_in(a, seed, max_depth, OrderClass::General)
}

/// As [`random_table`], restricted to the order-preserving subgroup
/// (`OrderPreserving`), the cyclically order-preserving subgroup
/// (`CyclicOrderPreserving`) or unrestricted (`General`).
pub fn random_table_in(
    a: &TransitionMatrix,
    seed: u64,
    max_depth: usize,
    class: OrderClass,
) -> Result<AdicTable, TableError> {
    let mut rng = rng(seed);
    let max_depth = max_depth.max(1);
    for _ in 0..MAX_ATTEMPTS {
        let domain = random_partition(a, &mut rng, max_depth);
        let dclass = classes(a, &domain);
        // The range partition is drawn until its follower classes can be
        // matched with the domain's.
        for _ in 0..64 {
            let range = random_partition(a, &mut rng, max_depth);
            if range.len() != domain.len() {
                continue;
            }
            let rclass = classes(a, &range);
            let rows = match class {
                OrderClass::OrderPreserving => {
                    if rclass != dclass {
                        continue;
                    }
                    domain.iter().cloned().zip(range.iter().cloned()).map(|(d, r)| Row::new(d, r)).collect()
                }
                OrderClass::CyclicOrderPreserving => {
                    let m = domain.len();
                    let shifts: Vec<usize> =
                        (0..m).filter(|&k| (0..m).all(|i| dclass[i] == rclass[(i + k) % m])).collect();
                    let Some(&k) = shifts.choose(&mut rng) else { continue };
                    (0..m).map(|i| Row::new(domain[i].clone(), range[(i + k) % m].clone())).collect()
                }
                OrderClass::General => {
                    if sorted(dclass.clone()) != sorted(rclass.clone()) {
                        continue;
                    }
                    let mut pool: BTreeMap<Symbol, Vec<Word>> = BTreeMap::new();
                    for (w, c) in range.iter().zip(&rclass) {
                        pool.entry(*c).or_default().push(w.clone());
                    }
                    for v in pool.values_mut() {
                        v.sort();
                        v.shuffle(&mut rng);
                    }
                    domain
                        .iter()
                        .zip(&dclass)
                        .map(|(d, c)| Row::new(d.clone(), pool.get_mut(c).unwrap().pop().unwrap()))
                        .collect()
                }
            };
            return AdicTable::new(a, rows);
        }
    }
    Err(TableError::GenerationFailed(MAX_ATTEMPTS))
}

/// A random admissible word of length `len` starting after `prev`.
fn random_walk<R: Rng>(a: &TransitionMatrix, rng: &mut R, prev: Option<Symbol>, len: usize) -> Word {
    let mut v = Vec::with_capacity(len);
    let mut cur = prev;
    for _ in 0..len {
        let choices: Vec<Symbol> = match cur {
            None => a.symbols().collect(),
            Some(s) => a.successors(s).collect(),
        };
        let s = *choices.choose(rng).expect("no zero rows");
        v.push(s);
        cur = Some(s);
    }
    Word(v)
}

/// A random eventually periodic point with preamble length at most
/// `max_preamble` and cycle length in `1..=max_cycle` (before
/// canonicalization).
pub fn random_point<R: Rng>(a: &TransitionMatrix, rng: &mut R, max_preamble: usize, max_cycle: usize) -> EppPoint {
    loop {
        let plen = rng.gen_range(0..=max_preamble);
        let clen = rng.gen_range(1..=max_cycle.max(1));
        let pre = random_walk(a, rng, None, plen);
        let cycle = random_walk(a, rng, pre.last(), clen);
        if let Ok(x) = EppPoint::new(a, pre, cycle) {
            return x;
        }
    }
}

/// Every eventually periodic point with preamble length at most
/// `max_preamble` and cycle length at most `max_cycle`, deduplicated by
/// canonical form.
pub fn all_points(a: &TransitionMatrix, max_preamble: usize, max_cycle: usize) -> Vec<EppPoint> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for plen in 0..=max_preamble {
        for pre in a.words(plen) {
            for clen in 1..=max_cycle {
                for cycle in a.continuations(&pre, clen) {
                    if let Ok(x) = EppPoint::new(a, pre.clone(), cycle) {
                        if seen.insert(x.clone()) {
                            out.push(x);
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn deterministic_and_valid() {
        for a in builtin::matrices().into_iter().map(|(_, a)| a) {
            for seed in 0..40 {
                let t = random_table(&a, seed, 3).unwrap();
                assert_eq!(t, random_table(&a, seed, 3).unwrap());
                assert!(AdicTable::new(&a, t.rows().to_vec()).is_ok());
                assert!(t.compose(&t.inverse()).unwrap().equivalent(&AdicTable::identity(&a)).unwrap());
            }
        }
    }

    #[test]
    fn depth_one_full_shift_is_a_permutation() {
        let a = builtin::full_shift(2);
        let t = random_table(&a, 2, 1).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.rows().iter().all(|r| r.domain.len() == 1 && r.range.len() == 1));
    }

    #[test]
    fn ordered_generators_hit_their_class() {
        for a in builtin::matrices().into_iter().map(|(_, a)| a) {
            for seed in 0..30 {
                let f = random_table_in(&a, seed, 3, OrderClass::OrderPreserving).unwrap();
                assert_eq!(f.classify_order(), OrderClass::OrderPreserving);
                let t = random_table_in(&a, seed, 3, OrderClass::CyclicOrderPreserving).unwrap();
                assert_ne!(t.classify_order(), OrderClass::General);
            }
        }
    }

    #[test]
    fn points_are_canonical() {
        let a = builtin::fibonacci();
        let mut r = rng(7);
        for _ in 0..100 {
            let x = random_point(&a, &mut r, 4, 3);
            assert_eq!(EppPoint::canonical(x.preamble().clone(), x.cycle().clone()), x);
        }
        let all = all_points(&a, 2, 2);
        // cycles: 1, 12, 21; preambles up to 2 symbols
        assert!(all.len() > 5);
    }
}
