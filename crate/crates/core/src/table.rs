//! A-adic tables: finite presentations of elements of the continuous full
//! group. A table lists rows `(domain -> range)`; the element maps each
//! point `domain . t` to `range . t`. Tables are always stored sorted by the
//! domain column.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sft::{EppPoint, SftError, Symbol, TransitionMatrix, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    Domain,
    Range,
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Column::Domain => write!(f, "domain"),
            Column::Range => write!(f, "range"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error(transparent)]
    Sft(#[from] SftError),
    #[error("table has no rows")]
    Empty,
    #[error("{column} column is not a partition: {detail}")]
    NotPartition { column: Column, detail: String },
    #[error("row {row}: follower sets of {domain} and {range} differ")]
    FollowerMismatch { row: usize, domain: Word, range: Word },
    #[error("row index {index} out of range (table has {len} rows)")]
    BadRowIndex { index: usize, len: usize },
    #[error("depth {depth} is below the table's domain depth {required}")]
    DepthTooSmall { depth: usize, required: usize },
    #[error("tables are over different transition matrices")]
    MatrixMismatch,
    #[error("random table generation failed after {0} attempts")]
    GenerationFailed(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Row {
    pub domain: Word,
    pub range: Word,
}

impl Row {
    pub fn new(domain: Word, range: Word) -> Self {
        Row { domain, range }
    }

    /// `|domain| - |range|`: the exponent of the derivative on this row.
    pub fn exponent(&self) -> i64 {
        self.domain.len() as i64 - self.range.len() as i64
    }
}

/// Table JSON: `{"rows":[{"domain":[1],"range":[2,1]}, ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdicTable {
    matrix: TransitionMatrix,
    rows: Vec<Row>,
}

/// Position of a table with respect to the order-preserving subgroups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderClass {
    OrderPreserving,
    CyclicOrderPreserving,
    General,
}

/// The cocycle `d(x) = |domain| - |range|` as a step function on the domain
/// cylinders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CocycleSteps {
    pub steps: Vec<(Word, i64)>,
}

impl CocycleSteps {
    /// Value on the cylinder of `w`, which must lie inside one step.
    pub fn value_on(&self, w: &Word) -> Option<i64> {
        self.steps.iter().find(|(v, _)| v.is_prefix_of(w)).map(|(_, d)| *d)
    }

    pub fn at_point(&self, x: &EppPoint) -> Option<i64> {
        self.steps.iter().find(|(v, _)| x.starts_with(v)).map(|(_, d)| *d)
    }
}

/// Checks that the words form a partition of `X_A` into cylinders: no word
/// is a prefix of another and every node of the prefix tree is either a
/// selected word or has all its allowed successors covered.
pub fn check_partition(a: &TransitionMatrix, words: &[&Word]) -> Result<(), String> {
    if words.iter().any(|w| w.is_empty()) {
        return Err("contains the empty word".into());
    }
    fn covers(a: &TransitionMatrix, prefix: &[Symbol], words: &[&[Symbol]]) -> Result<(), String> {
        let depth = prefix.len();
        if words.iter().any(|w| w.len() == depth) {
            if words.len() > 1 {
                return Err(format!("{} is a prefix of another word", Word::from(prefix)));
            }
            return Ok(());
        }
        let succ: Vec<Symbol> = match prefix.last() {
            None => a.symbols().collect(),
            Some(&s) => a.successors(s).collect(),
        };
        let mut groups: BTreeMap<Symbol, Vec<&[Symbol]>> = BTreeMap::new();
        for w in words {
            groups.entry(w[depth]).or_default().push(w);
        }
        for j in succ {
            let mut child = prefix.to_vec();
            child.push(j);
            match groups.get(&j) {
                None => return Err(format!("cylinder of {} is not covered", Word(child))),
                Some(g) => covers(a, &child, g)?,
            }
        }
        Ok(())
    }
    let slices: Vec<&[Symbol]> = words.iter().map(|w| w.as_slice()).collect();
    covers(a, &[], &slices)
}

impl AdicTable {
    /// Validates rows and sorts them by domain.
    pub fn new(matrix: &TransitionMatrix, rows: Vec<Row>) -> Result<Self, TableError> {
        if rows.is_empty() {
            return Err(TableError::Empty);
        }
        for row in &rows {
            if row.domain.is_empty() || row.range.is_empty() {
                return Err(SftError::EmptyWord.into());
            }
            matrix.check_word(&row.domain)?;
            matrix.check_word(&row.range)?;
        }
        let mut rows = rows;
        rows.sort();
        for (i, row) in rows.iter().enumerate() {
            if !matrix.follower_equal(&row.domain, &row.range)? {
                return Err(TableError::FollowerMismatch {
                    row: i + 1,
                    domain: row.domain.clone(),
                    range: row.range.clone(),
                });
            }
        }
        for column in [Column::Domain, Column::Range] {
            let words: Vec<&Word> = rows
                .iter()
                .map(|r| if column == Column::Domain { &r.domain } else { &r.range })
                .collect();
            check_partition(matrix, &words).map_err(|detail| TableError::NotPartition { column, detail })?;
        }
        Ok(AdicTable { matrix: matrix.clone(), rows })
    }

    /// Builds from rows already known to be valid; sorts only.
    pub(crate) fn from_valid(matrix: &TransitionMatrix, mut rows: Vec<Row>) -> Self {
        rows.sort();
        debug_assert!(AdicTable::new(matrix, rows.clone()).is_ok());
        AdicTable { matrix: matrix.clone(), rows }
    }

    pub fn from_json(matrix: &TransitionMatrix, json: &TableJson) -> Result<Self, TableError> {
        Self::new(matrix, json.rows.clone())
    }

    pub fn to_json(&self) -> TableJson {
        TableJson { rows: self.rows.clone() }
    }

    /// The identity: rows `(j -> j)` for every symbol.
    pub fn identity(matrix: &TransitionMatrix) -> Self {
        let rows = matrix.symbols().map(|j| Row::new(Word(vec![j]), Word(vec![j]))).collect();
        AdicTable { matrix: matrix.clone(), rows }
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Domain depth: the longest domain word.
    pub fn depth(&self) -> usize {
        self.rows.iter().map(|r| r.domain.len()).max().unwrap_or(0)
    }

    /// Longest range word.
    pub fn range_depth(&self) -> usize {
        self.rows.iter().map(|r| r.range.len()).max().unwrap_or(0)
    }

    fn same_matrix(&self, other: &AdicTable) -> Result<(), TableError> {
        if self.matrix == other.matrix {
            Ok(())
        } else {
            Err(TableError::MatrixMismatch)
        }
    }

    /// Replaces row `index` (0-based) by its complete family of one-symbol
    /// extensions.
    pub fn expand_row(&self, index: usize) -> Result<AdicTable, TableError> {
        let row = self
            .rows
            .get(index)
            .ok_or(TableError::BadRowIndex { index, len: self.rows.len() })?;
        let last = row.domain.last().expect("nonempty");
        let children: Vec<Row> = self
            .matrix
            .successors(last)
            .map(|j| Row::new(row.domain.pushed(j), row.range.pushed(j)))
            .collect();
        let mut rows = self.rows.clone();
        rows.splice(index..=index, children);
        Ok(AdicTable { matrix: self.matrix.clone(), rows })
    }

    /// Equivalent table whose domain column is exactly `B_depth(X_A)`.
    pub fn expand_to_depth(&self, depth: usize) -> Result<AdicTable, TableError> {
        let required = self.depth();
        if depth < required {
            return Err(TableError::DepthTooSmall { depth, required });
        }
        let mut rows = Vec::new();
        for row in &self.rows {
            for eta in self.matrix.continuations(&row.domain, depth - row.domain.len()) {
                rows.push(Row::new(row.domain.concat(&eta), row.range.concat(&eta)));
            }
        }
        Ok(AdicTable { matrix: self.matrix.clone(), rows })
    }

    /// Whether both tables present the same group element.
    pub fn equivalent(&self, other: &AdicTable) -> Result<bool, TableError> {
        self.same_matrix(other)?;
        let depth = self.depth().max(other.depth());
        Ok(self.expand_to_depth(depth)?.rows == other.expand_to_depth(depth)?.rows)
    }

    /// Merges complete sibling families `(stem . a -> stem' . a)` back into
    /// `(stem -> stem')` until no family is left.
    pub fn reduce(&self) -> AdicTable {
        let a = &self.matrix;
        let mut rows = self.rows.clone();
        loop {
            let mut families: BTreeMap<(Word, Word), Vec<usize>> = BTreeMap::new();
            for (i, row) in rows.iter().enumerate() {
                let (d, r) = (&row.domain, &row.range);
                if d.len() < 2 || r.len() < 2 || d.last() != r.last() {
                    continue;
                }
                families
                    .entry((d.prefix(d.len() - 1), r.prefix(r.len() - 1)))
                    .or_default()
                    .push(i);
            }
            let mut merged: Vec<(Vec<usize>, Row)> = Vec::new();
            for ((dstem, rstem), members) in families {
                let dlast = dstem.last().expect("nonempty stem");
                let rlast = rstem.last().expect("nonempty stem");
                if !a.same_row(dlast, rlast) {
                    continue;
                }
                let mut got: Vec<Symbol> = members.iter().map(|&i| rows[i].domain.last().unwrap()).collect();
                got.sort_unstable();
                let want: Vec<Symbol> = a.successors(dlast).collect();
                if got == want {
                    merged.push((members, Row::new(dstem, rstem)));
                }
            }
            if merged.is_empty() {
                break;
            }
            let mut drop = vec![false; rows.len()];
            for (members, _) in &merged {
                for &i in members {
                    drop[i] = true;
                }
            }
            let mut next: Vec<Row> = rows
                .into_iter()
                .zip(drop)
                .filter(|(_, d)| !d)
                .map(|(r, _)| r)
                .collect();
            next.extend(merged.into_iter().map(|(_, r)| r));
            next.sort();
            rows = next;
        }
        AdicTable { matrix: self.matrix.clone(), rows }
    }

    /// Table of the product `self o other` (apply `other` first), reduced.
    pub fn compose(&self, other: &AdicTable) -> Result<AdicTable, TableError> {
        self.same_matrix(other)?;
        let mut rows = Vec::new();
        for inner in &other.rows {
            for outer in &self.rows {
                if inner.range.is_prefix_of(&outer.domain) {
                    let w = outer.domain.suffix_from(inner.range.len());
                    rows.push(Row::new(inner.domain.concat(&w), outer.range.clone()));
                } else if outer.domain.is_prefix_of(&inner.range) {
                    let w = inner.range.suffix_from(outer.domain.len());
                    rows.push(Row::new(inner.domain.clone(), outer.range.concat(&w)));
                }
            }
        }
        Ok(AdicTable::new(&self.matrix, rows)?.reduce())
    }

    /// Swaps the two columns.
    pub fn inverse(&self) -> AdicTable {
        let rows = self
            .rows
            .iter()
            .map(|r| Row::new(r.range.clone(), r.domain.clone()))
            .collect();
        AdicTable::from_valid(&self.matrix, rows)
    }

    /// The row whose domain cylinder contains `x`.
    pub fn row_of(&self, x: &EppPoint) -> &Row {
        self.rows
            .iter()
            .find(|r| x.starts_with(&r.domain))
            .expect("domain column partitions X_A")
    }

    /// Row whose domain cylinder contains the cylinder of `w`, if any.
    pub fn row_containing(&self, w: &Word) -> Option<&Row> {
        self.rows.iter().find(|r| r.domain.is_prefix_of(w))
    }

    /// The action on an eventually periodic point.
    pub fn apply(&self, x: &EppPoint) -> EppPoint {
        let row = self.row_of(x);
        x.shift(row.domain.len()).prepend(&row.range)
    }

    /// Image of the cylinder word `w`, when `w` lies inside one domain
    /// cylinder.
    pub fn apply_word(&self, w: &Word) -> Option<Word> {
        let row = self.row_containing(w)?;
        Some(row.range.concat(&w.suffix_from(row.domain.len())))
    }

    pub fn cocycle(&self) -> CocycleSteps {
        CocycleSteps { steps: self.rows.iter().map(|r| (r.domain.clone(), r.exponent())).collect() }
    }

    pub fn classify_order(&self) -> OrderClass {
        let ranges: Vec<&Word> = self.rows.iter().map(|r| &r.range).collect();
        let increasing_from = |k: usize| {
            let m = ranges.len();
            (0..m - 1).all(|i| ranges[(k + i) % m] < ranges[(k + i + 1) % m])
        };
        if increasing_from(0) {
            OrderClass::OrderPreserving
        } else if (1..ranges.len()).any(increasing_from) {
            OrderClass::CyclicOrderPreserving
        } else {
            OrderClass::General
        }
    }

    /// Product via the uniform-depth construction: expand `other` until its
    /// range words are at least as long as `self`'s domain depth, then look
    /// each range word up in `self`. Kept as an independent check on
    /// [`AdicTable::compose`].
    pub fn compose_uniform(&self, other: &AdicTable) -> Result<AdicTable, TableError> {
        self.same_matrix(other)?;
        let depth = other.depth() + self.depth();
        let inner = other.expand_to_depth(depth)?;
        let rows = inner
            .rows
            .iter()
            .map(|r| {
                let outer = self.row_containing(&r.range).expect("range longer than outer depth");
                Row::new(r.domain.clone(), outer.range.concat(&r.range.suffix_from(outer.domain.len())))
            })
            .collect();
        AdicTable::new(&self.matrix, rows)
    }
}

impl fmt::Display for AdicTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rows.iter().map(|r| format!("{} -> {}", r.domain, r.range)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> TransitionMatrix {
        TransitionMatrix::new(&[vec![1, 1], vec![1, 0]]).unwrap()
    }

    fn full(n: usize) -> TransitionMatrix {
        TransitionMatrix::new(&vec![vec![1; n]; n]).unwrap()
    }

    fn w(v: &[Symbol]) -> Word {
        Word(v.to_vec())
    }

    fn table(a: &TransitionMatrix, rows: &[(&[Symbol], &[Symbol])]) -> Result<AdicTable, TableError> {
        AdicTable::new(a, rows.iter().map(|(d, r)| Row::new(w(d), w(r))).collect())
    }

    fn swap() -> AdicTable {
        table(&fib(), &[(&[1], &[2, 1]), (&[2, 1], &[1])]).unwrap()
    }

    fn x0() -> AdicTable {
        table(&full(2), &[(&[1, 1], &[1]), (&[1, 2], &[2, 1]), (&[2], &[2, 2])]).unwrap()
    }

    fn pairs(t: &AdicTable) -> Vec<(Vec<Symbol>, Vec<Symbol>)> {
        t.rows().iter().map(|r| (r.domain.0.clone(), r.range.0.clone())).collect()
    }

    #[test]
    fn validation() {
        assert_eq!(swap().len(), 2);
        assert_eq!(x0().len(), 3);
        assert!(matches!(
            table(&fib(), &[(&[1], &[2]), (&[2], &[1])]),
            Err(TableError::FollowerMismatch { .. })
        ));
        assert!(matches!(
            table(&full(2), &[(&[1], &[1]), (&[1, 2], &[2])]),
            Err(TableError::NotPartition { column: Column::Domain, .. })
        ));
        assert!(matches!(
            table(&full(2), &[(&[1], &[1]), (&[2], &[1])]),
            Err(TableError::NotPartition { column: Column::Range, .. })
        ));
        assert!(matches!(
            table(&fib(), &[(&[1], &[1]), (&[2, 2], &[2])]),
            Err(TableError::Sft(SftError::Inadmissible { .. }))
        ));
        assert!(matches!(table(&full(2), &[(&[1], &[1])]), Err(TableError::NotPartition { .. })));
    }

    #[test]
    fn identity_rows() {
        assert_eq!(pairs(&AdicTable::identity(&full(2))), vec![(vec![1], vec![1]), (vec![2], vec![2])]);
        assert_eq!(AdicTable::identity(&full(4)).len(), 4);
    }

    #[test]
    fn row_expansion() {
        let s = swap();
        assert_eq!(
            pairs(&s.expand_row(0).unwrap()),
            vec![(vec![1, 1], vec![2, 1, 1]), (vec![1, 2], vec![2, 1, 2]), (vec![2, 1], vec![1])]
        );
        assert_eq!(
            pairs(&s.expand_row(1).unwrap()),
            vec![(vec![1], vec![2, 1]), (vec![2, 1, 1], vec![1, 1]), (vec![2, 1, 2], vec![1, 2])]
        );
        assert_eq!(
            pairs(&AdicTable::identity(&full(2)).expand_row(0).unwrap()),
            vec![(vec![1, 1], vec![1, 1]), (vec![1, 2], vec![1, 2]), (vec![2], vec![2])]
        );
        assert!(matches!(s.expand_row(5), Err(TableError::BadRowIndex { .. })));
    }

    #[test]
    fn depth_expansion() {
        let s = swap().expand_to_depth(2).unwrap();
        assert_eq!(
            pairs(&s),
            vec![(vec![1, 1], vec![2, 1, 1]), (vec![1, 2], vec![2, 1, 2]), (vec![2, 1], vec![1])]
        );
        assert_eq!(AdicTable::identity(&full(2)).expand_to_depth(2).unwrap().len(), 4);
        assert_eq!(
            pairs(&AdicTable::identity(&fib()).expand_to_depth(2).unwrap()),
            vec![(vec![1, 1], vec![1, 1]), (vec![1, 2], vec![1, 2]), (vec![2, 1], vec![2, 1])]
        );
        assert!(matches!(swap().expand_to_depth(1), Err(TableError::DepthTooSmall { .. })));
    }

    #[test]
    fn equivalence() {
        let s = swap();
        assert!(s.equivalent(&s.expand_row(0).unwrap()).unwrap());
        assert!(!s.equivalent(&AdicTable::identity(&fib())).unwrap());
        assert!(x0().equivalent(&x0().expand_row(2).unwrap()).unwrap());
        assert_eq!(s.equivalent(&x0()), Err(TableError::MatrixMismatch));
    }

    #[test]
    fn reduction() {
        let s = swap();
        assert_eq!(s.expand_row(0).unwrap().reduce(), s);
        let id = AdicTable::identity(&full(2));
        assert_eq!(id.expand_to_depth(3).unwrap().reduce(), id);
        assert_eq!(x0().reduce(), x0());
        // (2 -> 1) in the golden mean shift is the single-child family of (21 -> 11)
        let fid = AdicTable::identity(&fib());
        assert_eq!(fid.expand_to_depth(4).unwrap().reduce(), fid);
    }

    #[test]
    fn products() {
        let s = swap();
        let fid = AdicTable::identity(&fib());
        let ss = s.compose(&s).unwrap();
        assert!(ss.equivalent(&fid).unwrap());
        assert_eq!(ss, fid);
        assert!(s.compose(&fid).unwrap().equivalent(&s).unwrap());
        let id2 = AdicTable::identity(&full(2));
        assert_eq!(x0().compose(&x0().inverse()).unwrap(), id2);
        assert!(x0().compose(&x0()).unwrap().equivalent(&x0().compose_uniform(&x0()).unwrap()).unwrap());
    }

    #[test]
    fn inverses() {
        let s = swap();
        assert_eq!(s.inverse(), s);
        assert_eq!(AdicTable::identity(&fib()).inverse(), AdicTable::identity(&fib()));
        assert_eq!(x0().inverse().inverse(), x0());
    }

    #[test]
    fn action() {
        let a = fib();
        let s = swap();
        let x = EppPoint::new(&a, Word::empty(), w(&[1, 2])).unwrap();
        let y = s.apply(&x);
        assert_eq!((y.preamble(), y.cycle()), (&Word::empty(), &w(&[2, 1])));
        let x = EppPoint::new(&a, w(&[2]), w(&[1])).unwrap();
        let y = s.apply(&x);
        assert_eq!((y.preamble(), y.cycle()), (&Word::empty(), &w(&[1])));
        assert_eq!(AdicTable::identity(&a).apply(&x), x);
    }

    #[test]
    fn cocycles() {
        assert_eq!(swap().cocycle().steps, vec![(w(&[1]), -1), (w(&[2, 1]), 1)]);
        assert!(AdicTable::identity(&full(3)).cocycle().steps.iter().all(|(_, d)| *d == 0));
        assert_eq!(x0().cocycle().steps, vec![(w(&[1, 1]), 1), (w(&[1, 2]), 0), (w(&[2]), -1)]);
    }

    #[test]
    fn order_classes() {
        assert_eq!(x0().classify_order(), OrderClass::OrderPreserving);
        assert_eq!(swap().classify_order(), OrderClass::CyclicOrderPreserving);
        let g = table(&full(2), &[(&[1, 1], &[1, 2]), (&[1, 2], &[2, 1]), (&[2, 1], &[1, 1]), (&[2, 2], &[2, 2])])
            .unwrap();
        assert_eq!(g.classify_order(), OrderClass::General);
    }
}
