//! Alphabet, transition matrices, admissible words and eventually periodic
//! points of a one-sided topological Markov shift.
//!
//! Symbols are 1-based throughout: the alphabet of an `n x n` matrix is
//! `{1, ..., n}`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Symbol = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SftError {
    #[error("matrix must be at least 2x2, got n = {0}")]
    TooSmall(usize),
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("entry ({row},{col}) = {value} is not 0 or 1")]
    NotZeroOne { row: usize, col: usize, value: i64 },
    #[error("row {0} is identically zero")]
    ZeroRow(usize),
    #[error("column {0} is identically zero")]
    ZeroColumn(usize),
    #[error("matrix is reducible: {to} is not reachable from {from}")]
    Reducible { from: usize, to: usize },
    #[error("condition (I) fails: an irreducible permutation matrix gives a finite shift space")]
    ConditionI,
    #[error("symbol {symbol} is outside the alphabet 1..={n}")]
    BadSymbol { symbol: Symbol, n: usize },
    #[error("word {word} is not admissible: transition {from} -> {to} is forbidden")]
    Inadmissible { word: Word, from: Symbol, to: Symbol },
    #[error("the empty word is not allowed here")]
    EmptyWord,
    #[error("eventually periodic point needs a nonempty cycle")]
    EmptyCycle,
}

/// Matrix JSON as exchanged on the wire: `{"n": 2, "rows": [[1,1],[1,0]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub rows: Vec<Vec<i64>>,
}

/// A validated irreducible zero-one matrix satisfying condition (I).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransitionMatrix {
    n: usize,
    entries: Vec<bool>,
}

impl TransitionMatrix {
    /// Validates a square zero-one array.
    pub fn new(rows: &[Vec<i64>]) -> Result<Self, SftError> {
        let n = rows.len();
        if n < 2 {
            return Err(SftError::TooSmall(n));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(SftError::NotSquare { row: i + 1, len: row.len(), n });
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => entries.push(false),
                    1 => entries.push(true),
                    _ => return Err(SftError::NotZeroOne { row: i + 1, col: j + 1, value: v }),
                }
            }
        }
        let m = TransitionMatrix { n, entries };
        m.check()?;
        Ok(m)
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self, SftError> {
        if json.rows.len() != json.n {
            return Err(SftError::NotSquare { row: 0, len: json.rows.len(), n: json.n });
        }
        Self::new(&json.rows)
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson { n: self.n, rows: self.rows() }
    }

    fn check(&self) -> Result<(), SftError> {
        let n = self.n;
        for i in 1..=n {
            if (1..=n).all(|j| !self.allowed(i as Symbol, j as Symbol)) {
                return Err(SftError::ZeroRow(i));
            }
        }
        for j in 1..=n {
            if (1..=n).all(|i| !self.allowed(i as Symbol, j as Symbol)) {
                return Err(SftError::ZeroColumn(j));
            }
        }
        // Reachability closure from every vertex.
        for from in 0..n {
            let mut seen = vec![false; n];
            let mut stack = vec![from];
            while let Some(v) = stack.pop() {
                for w in 0..n {
                    if self.entries[v * n + w] && !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            if let Some(to) = seen.iter().position(|s| !s) {
                return Err(SftError::Reducible { from: from + 1, to: to + 1 });
            }
        }
        let permutation = (0..n).all(|i| self.out_degree((i + 1) as Symbol) == 1);
        if permutation {
            return Err(SftError::ConditionI);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn allowed(&self, from: Symbol, to: Symbol) -> bool {
        let (i, j) = (from as usize - 1, to as usize - 1);
        self.entries[i * self.n + j]
    }

    pub fn entry(&self, from: Symbol, to: Symbol) -> i64 {
        self.allowed(from, to) as i64
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (1..=self.n as Symbol)
            .map(|i| (1..=self.n as Symbol).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + Clone {
        1..=self.n as Symbol
    }

    /// Allowed successors of `s` in increasing order.
    pub fn successors(&self, s: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols().filter(move |&j| self.allowed(s, j))
    }

    pub fn out_degree(&self, s: Symbol) -> usize {
        self.successors(s).count()
    }

    /// Two symbols have the same follower set iff their rows agree.
    pub fn same_row(&self, a: Symbol, b: Symbol) -> bool {
        let n = self.n;
        let (a, b) = (a as usize - 1, b as usize - 1);
        self.entries[a * n..(a + 1) * n] == self.entries[b * n..(b + 1) * n]
    }

    /// Index of the follower class of `s`: the smallest symbol with the same row.
    pub fn follower_class(&self, s: Symbol) -> Symbol {
        self.symbols().find(|&t| self.same_row(s, t)).unwrap_or(s)
    }

    pub fn check_symbol(&self, s: Symbol) -> Result<(), SftError> {
        if s == 0 || s as usize > self.n {
            Err(SftError::BadSymbol { symbol: s, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn check_word(&self, w: &Word) -> Result<(), SftError> {
        for &s in w.iter() {
            self.check_symbol(s)?;
        }
        for pair in w.0.windows(2) {
            if !self.allowed(pair[0], pair[1]) {
                return Err(SftError::Inadmissible { word: w.clone(), from: pair[0], to: pair[1] });
            }
        }
        Ok(())
    }

    pub fn is_admissible(&self, w: &Word) -> bool {
        self.check_word(w).is_ok()
    }

    /// All admissible continuations `eta` of length `len` such that `w . eta`
    /// is admissible, in lexicographic order. For the empty `w` these are the
    /// words of length `len`.
    pub fn continuations(&self, w: &Word, len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            let mut next = Vec::new();
            for eta in &out {
                let last = eta.last().or_else(|| w.last());
                for j in self.symbols() {
                    if last.is_none_or(|l| self.allowed(l, j)) {
                        next.push(eta.pushed(j));
                    }
                }
            }
            out = next;
        }
        out
    }

    /// `B_m(X_A)` in lexicographic order.
    pub fn words(&self, m: usize) -> Vec<Word> {
        self.continuations(&Word::empty(), m)
    }

    /// Whether the follower sets of `mu` and `nu` coincide.
    pub fn follower_equal(&self, mu: &Word, nu: &Word) -> Result<bool, SftError> {
        let (a, b) = match (mu.last(), nu.last()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(SftError::EmptyWord),
        };
        self.check_word(mu)?;
        self.check_word(nu)?;
        Ok(self.same_row(a, b))
    }

    fn extend(&self, w: &Word, pick: impl Fn(&Self, Symbol) -> Symbol) -> Result<EppPoint, SftError> {
        self.check_word(w)?;
        let mut cur = w.last().ok_or(SftError::EmptyWord)?;
        // The successor choice depends only on the current symbol, so the
        // orbit of `cur` enters a cycle within n steps.
        let mut tail: Vec<Symbol> = Vec::new();
        let mut first_seen = vec![usize::MAX; self.n + 1];
        loop {
            let next = pick(self, cur);
            if first_seen[next as usize] != usize::MAX {
                let start = first_seen[next as usize];
                let mut preamble = w.0.clone();
                preamble.extend_from_slice(&tail[..start]);
                let cycle = tail[start..].to_vec();
                return EppPoint::new(self, Word(preamble), Word(cycle));
            }
            first_seen[next as usize] = tail.len();
            tail.push(next);
            cur = next;
        }
    }

    /// Extends `w` forever by always choosing the smallest allowed successor.
    pub fn min_extension(&self, w: &Word) -> Result<EppPoint, SftError> {
        self.extend(w, |m, s| m.successors(s).next().expect("no zero rows"))
    }

    /// Extends `w` forever by always choosing the largest allowed successor.
    pub fn max_extension(&self, w: &Word) -> Result<EppPoint, SftError> {
        self.extend(w, |m, s| m.successors(s).last().expect("no zero rows"))
    }
}

impl fmt::Display for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// A finite word over the alphabet. JSON form: `[1,2,1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<Symbol> {
        self.0.last().copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Symbol> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.0
    }

    pub fn pushed(&self, s: Symbol) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(s);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Drops the first `k` symbols.
    pub fn suffix_from(&self, k: usize) -> Word {
        Word(self.0[k..].to_vec())
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k].to_vec())
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl From<&[Symbol]> for Word {
    fn from(v: &[Symbol]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Relative position of two words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WordOrder {
    Less,
    Greater,
    ProperPrefixOfSecond,
    ProperPrefixOfFirst,
    Equal,
}

/// Compares two words; `Less`/`Greater` only when the cylinders are disjoint.
pub fn word_order(mu: &Word, nu: &Word) -> WordOrder {
    for (a, b) in mu.iter().zip(nu.iter()) {
        match a.cmp(b) {
            Ordering::Less => return WordOrder::Less,
            Ordering::Greater => return WordOrder::Greater,
            Ordering::Equal => {}
        }
    }
    match mu.len().cmp(&nu.len()) {
        Ordering::Less => WordOrder::ProperPrefixOfSecond,
        Ordering::Greater => WordOrder::ProperPrefixOfFirst,
        Ordering::Equal => WordOrder::Equal,
    }
}

/// Point JSON: `{"preamble":[2],"cycle":[1]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EppJson {
    pub preamble: Vec<Symbol>,
    pub cycle: Vec<Symbol>,
}

/// An eventually periodic point `preamble . cycle . cycle . ...` of `X_A`,
/// kept in canonical form: primitive cycle and earliest period start.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EppPoint {
    preamble: Word,
    cycle: Word,
}

impl EppPoint {
    /// Validates admissibility against `a` and canonicalizes.
    pub fn new(a: &TransitionMatrix, preamble: Word, cycle: Word) -> Result<Self, SftError> {
        if cycle.is_empty() {
            return Err(SftError::EmptyCycle);
        }
        a.check_word(&preamble.concat(&cycle).concat(&cycle))?;
        Ok(Self::canonical(preamble, cycle))
    }

    pub fn from_json(a: &TransitionMatrix, json: &EppJson) -> Result<Self, SftError> {
        Self::new(a, Word(json.preamble.clone()), Word(json.cycle.clone()))
    }

    pub fn to_json(&self) -> EppJson {
        EppJson { preamble: self.preamble.0.clone(), cycle: self.cycle.0.clone() }
    }

    /// Canonical form without an admissibility check.
    pub fn canonical(preamble: Word, cycle: Word) -> Self {
        assert!(!cycle.is_empty(), "cycle must be nonempty");
        let mut c = cycle.0;
        let len = c.len();
        if let Some(d) = (1..=len).find(|&d| len.is_multiple_of(d) && (0..len).all(|i| c[i] == c[i % d])) {
            c.truncate(d);
        }
        let mut p = preamble.0;
        while let Some(&last) = p.last() {
            if last != *c.last().unwrap() {
                break;
            }
            p.pop();
            c.rotate_right(1);
        }
        EppPoint { preamble: Word(p), cycle: Word(c) }
    }

    pub fn preamble(&self) -> &Word {
        &self.preamble
    }

    pub fn cycle(&self) -> &Word {
        &self.cycle
    }

    /// The coordinate `x_{i+1}` (0-based index `i`).
    pub fn symbol(&self, i: usize) -> Symbol {
        let p = self.preamble.len();
        if i < p {
            self.preamble.0[i]
        } else {
            self.cycle.0[(i - p) % self.cycle.len()]
        }
    }

    /// `(x_1, ..., x_m)`.
    pub fn prefix(&self, m: usize) -> Word {
        Word((0..m).map(|i| self.symbol(i)).collect())
    }

    /// `sigma^k(x)`.
    pub fn shift(&self, k: usize) -> EppPoint {
        let p = self.preamble.len();
        if k <= p {
            return EppPoint { preamble: self.preamble.suffix_from(k), cycle: self.cycle.clone() };
        }
        let mut c = self.cycle.0.clone();
        let r = (k - p) % c.len();
        c.rotate_left(r);
        EppPoint { preamble: Word::empty(), cycle: Word(c) }
    }

    /// `w . x`, canonicalized.
    pub fn prepend(&self, w: &Word) -> EppPoint {
        EppPoint::canonical(w.concat(&self.preamble), self.cycle.clone())
    }

    pub fn starts_with(&self, w: &Word) -> bool {
        w.iter().enumerate().all(|(i, &s)| self.symbol(i) == s)
    }

    /// Lexicographic order of the infinite sequences.
    pub fn cmp_lex(&self, other: &EppPoint) -> Ordering {
        let bound = self.preamble.len()
            + other.preamble.len()
            + num::integer::lcm(self.cycle.len(), other.cycle.len());
        for i in 0..bound {
            match self.symbol(i).cmp(&other.symbol(i)) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }

    /// Whether the point is periodic from the start.
    pub fn is_periodic(&self) -> bool {
        self.preamble.is_empty()
    }
}

impl fmt::Display for EppPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pre: String = self.preamble.iter().map(|s| format!("{s} ")).collect();
        let cyc: Vec<String> = self.cycle.iter().map(|s| s.to_string()).collect();
        write!(f, "{pre}({})^inf", cyc.join(" "))
    }
}
