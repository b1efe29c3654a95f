//! The analytic side: A-adic piecewise-linear bijections of `[0,1)`, the
//! interval maps `f_A` and `g_i`, the semiconjugacy `rho` from eventually
//! periodic points to `[0,1]`, and the derivative cocycle `D = beta^d`.

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::perron::{AlgebraicJson, AlgebraicNumber, PerronData, PerronError};
use crate::sft::{EppPoint, Symbol, TransitionMatrix, Word};
use crate::table::{AdicTable, Row, TableError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlError {
    #[error("argument {0} lies outside [0,1)")]
    OutOfDomain(String),
    #[error("argument {value} lies outside the domain of g_{symbol}")]
    OutsideJ { symbol: Symbol, value: String },
    #[error("symbol {0} is outside the alphabet")]
    BadSymbol(Symbol),
    #[error("semiconjugacy check failed at {point}: {detail}")]
    Semiconjugacy { point: String, detail: String },
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Perron(#[from] PerronError),
}

/// One linear piece: `[x_lo, x_hi)` maps onto `[l(range), r(range))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub domain: Word,
    pub range: Word,
    pub x_lo: AlgebraicNumber,
    pub x_hi: AlgebraicNumber,
    pub y_lo: AlgebraicNumber,
    /// `|domain| - |range|`; the slope is `beta^exponent`.
    pub exponent: i64,
    pub slope: AlgebraicNumber,
}

impl Piece {
    pub fn y_hi(&self) -> AlgebraicNumber {
        &self.y_lo + &(&self.slope * &(&self.x_hi - &self.x_lo))
    }

    fn at(&self, t: &AlgebraicNumber) -> AlgebraicNumber {
        &self.y_lo + &(&self.slope * &(t - &self.x_lo))
    }
}

/// A word-decorated A-adic PL function. Pieces are in domain order;
/// `permutation[k]` is the position of piece `k`'s range interval in the
/// left-to-right order of range intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlMap {
    matrix: TransitionMatrix,
    pieces: Vec<Piece>,
    permutation: Vec<usize>,
}

impl PlMap {
    /// Realizes a table: `I_domain` maps linearly onto `I_range` with slope
    /// `beta^(|domain| - |range|)`.
    pub fn from_table(pd: &PerronData, t: &AdicTable) -> Result<Self, PlError> {
        let mut pieces = Vec::with_capacity(t.len());
        for row in t.rows() {
            let (x_lo, x_hi) = pd.interval(&row.domain)?;
            let y_lo = pd.endpoint_l(&row.range)?;
            let exponent = row.exponent();
            pieces.push(Piece {
                domain: row.domain.clone(),
                range: row.range.clone(),
                x_lo,
                x_hi,
                y_lo,
                exponent,
                slope: pd.beta_pow(exponent),
            });
        }
        let mut order: Vec<usize> = (0..pieces.len()).collect();
        order.sort_by(|&a, &b| pieces[a].range.cmp(&pieces[b].range));
        let mut permutation = vec![0; pieces.len()];
        for (pos, &k) in order.iter().enumerate() {
            permutation[k] = pos;
        }
        Ok(PlMap { matrix: t.matrix().clone(), pieces, permutation })
    }

    /// Projects the word decoration back to a table.
    pub fn to_table(&self) -> AdicTable {
        let rows = self.pieces.iter().map(|p| Row::new(p.domain.clone(), p.range.clone())).collect();
        AdicTable::new(&self.matrix, rows).expect("pieces carry a valid table")
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }

    /// Index of the piece whose half-open interval contains `t`.
    pub fn piece_index(&self, t: &AlgebraicNumber) -> Result<usize, PlError> {
        if t.is_negative() || t.exact_cmp(&AlgebraicNumber::one(t.field())) != Ordering::Less {
            return Err(PlError::OutOfDomain(t.to_decimal(12)));
        }
        // last piece with x_lo <= t
        let k = self.pieces.partition_point(|p| p.x_lo.exact_cmp(t) != Ordering::Greater);
        Ok(k - 1)
    }

    /// Right-continuous evaluation.
    pub fn eval(&self, t: &AlgebraicNumber) -> Result<AlgebraicNumber, PlError> {
        Ok(self.pieces[self.piece_index(t)?].at(t))
    }

    /// Slope of the piece containing `t`.
    pub fn slope_at(&self, t: &AlgebraicNumber) -> Result<&AlgebraicNumber, PlError> {
        Ok(&self.pieces[self.piece_index(t)?].slope)
    }

    /// `f o g`, through the table product.
    pub fn compose(pd: &PerronData, f: &PlMap, g: &PlMap) -> Result<PlMap, PlError> {
        let t = f.to_table().compose(&g.to_table())?;
        PlMap::from_table(pd, &t)
    }

    pub fn inverse(&self, pd: &PerronData) -> Result<PlMap, PlError> {
        PlMap::from_table(pd, &self.to_table().inverse())
    }

    /// Breakpoints `x_lo` of every piece but the first.
    pub fn breakpoints(&self) -> Vec<AlgebraicNumber> {
        self.pieces.iter().skip(1).map(|p| p.x_lo.clone()).collect()
    }

    /// Ten evenly spaced exact sample points in each piece.
    pub fn sample_points(&self, per_piece: usize) -> Vec<AlgebraicNumber> {
        let mut out = Vec::new();
        for p in &self.pieces {
            let width = &p.x_hi - &p.x_lo;
            for k in 0..per_piece {
                let frac = AlgebraicNumber::rational(
                    width.field(),
                    num::BigRational::new((k as i64).into(), (per_piece as i64).into()),
                );
                out.push(&p.x_lo + &(&frac * &width));
            }
        }
        out
    }
}

/// Locates `t` among the cylinder intervals of length-one words.
fn symbol_interval(pd: &PerronData, t: &AlgebraicNumber) -> Result<Symbol, PlError> {
    let a = pd.matrix();
    if t.is_negative() {
        return Err(PlError::OutOfDomain(t.to_decimal(12)));
    }
    for i in a.symbols() {
        let r = pd.endpoint_r(&Word(vec![i]))?;
        if t.exact_cmp(&r) == Ordering::Less {
            return Ok(i);
        }
    }
    Err(PlError::OutOfDomain(t.to_decimal(12)))
}

/// `f_A(t) = beta (t - l(I_ij)) + l(I_j)` for `t` in `I_ij`.
pub fn eval_fa(pd: &PerronData, t: &AlgebraicNumber) -> Result<AlgebraicNumber, PlError> {
    let a = pd.matrix();
    let i = symbol_interval(pd, t)?;
    for j in a.successors(i) {
        let (lo, hi) = pd.interval(&Word(vec![i, j]))?;
        if t.exact_cmp(&hi) == Ordering::Less {
            let lj = pd.endpoint_l(&Word(vec![j]))?;
            return Ok(&(pd.beta() * &(t - &lo)) + &lj);
        }
    }
    unreachable!("I_i is the union of its I_ij")
}

/// `g_i(t) = (t - l(I_j)) / beta + l(I_ij)` for `t` in `I_j` with `A(i,j) = 1`.
pub fn eval_gi(pd: &PerronData, i: Symbol, t: &AlgebraicNumber) -> Result<AlgebraicNumber, PlError> {
    let a = pd.matrix();
    if a.check_symbol(i).is_err() {
        return Err(PlError::BadSymbol(i));
    }
    let j = symbol_interval(pd, t)?;
    if !a.allowed(i, j) {
        return Err(PlError::OutsideJ { symbol: i, value: t.to_decimal(12) });
    }
    let lj = pd.endpoint_l(&Word(vec![j]))?;
    let lij = pd.endpoint_l(&Word(vec![i, j]))?;
    Ok(&(pd.beta_inv() * &(t - &lj)) + &lij)
}

/// `rho(x) = sum_{n >= 0} beta^{-n} c_n`, summed exactly: the preamble part
/// directly and the periodic tail as one period times `(1 - beta^{-P})^{-1}`.
pub fn rho(pd: &PerronData, x: &EppPoint) -> AlgebraicNumber {
    // c_n depends on (x_n, x_{n+1}); it is periodic in n once x_n is in the cycle.
    let head = x.preamble().len() + 1;
    let period = x.cycle().len();
    let term = |n: usize| -> AlgebraicNumber {
        let from = if n == 0 { None } else { Some(x.symbol(n - 1)) };
        let c = pd.step_mass(from, x.symbol(n));
        &pd.beta_pow(-(n as i64)) * c
    };
    let finite = (0..head).fold(pd.zero(), |acc, n| &acc + &term(n));
    let one_period = (head..head + period).fold(pd.zero(), |acc, n| &acc + &term(n));
    let denom = &pd.one() - &pd.beta_pow(-(period as i64));
    &finite + &(&one_period * &denom.inverse().expect("beta > 1"))
}

/// Breakpoint values `C = {l(domain_i) : i >= 2}` and the points
/// `S = {domain_i min-extended}`.
#[derive(Debug, Clone)]
pub struct SingularSets {
    pub breakpoints: Vec<AlgebraicNumber>,
    pub points: Vec<EppPoint>,
}

pub fn singular_sets(pd: &PerronData, t: &AdicTable) -> Result<SingularSets, PlError> {
    let a = pd.matrix();
    let mut breakpoints = Vec::new();
    let mut points = Vec::new();
    for (i, row) in t.rows().iter().enumerate() {
        if i > 0 {
            breakpoints.push(pd.endpoint_l(&row.domain)?);
        }
        points.push(a.min_extension(&row.domain).map_err(PerronError::from)?);
    }
    Ok(SingularSets { breakpoints, points })
}

/// A function constant on the cylinders of a partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepFunction {
    pub steps: Vec<(Word, AlgebraicNumber)>,
}

impl StepFunction {
    pub fn value_on(&self, w: &Word) -> Option<&AlgebraicNumber> {
        self.steps.iter().find(|(v, _)| v.is_prefix_of(w)).map(|(_, d)| d)
    }

    pub fn at_point(&self, x: &EppPoint) -> Option<&AlgebraicNumber> {
        self.steps.iter().find(|(v, _)| x.starts_with(v)).map(|(_, d)| d)
    }

    pub fn depth(&self) -> usize {
        self.steps.iter().map(|(w, _)| w.len()).max().unwrap_or(0)
    }

    /// Values on every word of length `depth` (at least the step depth).
    pub fn at_depth(&self, a: &TransitionMatrix, depth: usize) -> Vec<(Word, AlgebraicNumber)> {
        a.words(depth)
            .into_iter()
            .map(|w| {
                let v = self.value_on(&w).expect("steps partition X_A").clone();
                (w, v)
            })
            .collect()
    }
}

/// `D_T = beta^{|domain| - |range|}` row by row.
pub fn derivative(pd: &PerronData, t: &AdicTable) -> StepFunction {
    StepFunction {
        steps: t.rows().iter().map(|r| (r.domain.clone(), pd.beta_pow(r.exponent()))).collect(),
    }
}

/// `phi(D) = sum over steps of value * phi(S_w S_w^*)`.
pub fn kms_expectation(pd: &PerronData, d: &StepFunction) -> Result<AlgebraicNumber, PlError> {
    let mut acc = pd.zero();
    for (w, v) in &d.steps {
        acc = &acc + &(v * &pd.kms_weight(w)?);
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SemiconjugacyOutcome {
    Verified,
    SkippedSingular,
}

/// Checks `f_T(rho(x)) = rho(T(x))` and that the slope of `f_T` at
/// `rho(x)` is `beta^{d_T(x)}`.
///
/// Points with `rho(x)` a breakpoint of `f_T`, or `0`, or `1`, are skipped:
/// `rho` identifies the maximal point of one cylinder with the minimal point
/// of the next, and `f_T` is only right-continuous there. For the golden mean
/// swap table, `x = (12)^inf` maps to the breakpoint `beta - 1` from the left.
pub fn check_semiconjugacy(pd: &PerronData, t: &AdicTable, x: &EppPoint) -> Result<SemiconjugacyOutcome, PlError> {
    let f = PlMap::from_table(pd, t)?;
    check_semiconjugacy_with(pd, t, &f, x)
}

/// As [`check_semiconjugacy`] with a precomputed realization of `t`.
pub fn check_semiconjugacy_with(
    pd: &PerronData,
    t: &AdicTable,
    f: &PlMap,
    x: &EppPoint,
) -> Result<SemiconjugacyOutcome, PlError> {
    let r = rho(pd, x);
    let one = pd.one();
    if r.is_zero() || r == one || f.breakpoints().contains(&r) {
        return Ok(SemiconjugacyOutcome::SkippedSingular);
    }
    let lhs = f.eval(&r)?;
    let rhs = rho(pd, &t.apply(x));
    if lhs != rhs {
        return Err(PlError::Semiconjugacy {
            point: x.to_string(),
            detail: format!("f_T(rho(x)) = {lhs} but rho(T(x)) = {rhs}"),
        });
    }
    let slope = f.slope_at(&r)?;
    let d = t.cocycle().at_point(x).expect("domain column partitions X_A");
    let expected = pd.beta_pow(d);
    if *slope != expected {
        return Err(PlError::Semiconjugacy {
            point: x.to_string(),
            detail: format!("slope {slope} differs from beta^{d} = {expected}"),
        });
    }
    Ok(SemiconjugacyOutcome::Verified)
}

#[derive(Debug, Clone, Serialize)]
pub struct PieceJson {
    pub domain: Word,
    pub range: Word,
    pub x_lo: AlgebraicJson,
    pub x_hi: AlgebraicJson,
    pub y_lo: AlgebraicJson,
    pub slope_exponent: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlJson {
    pub pieces: Vec<PieceJson>,
    pub permutation: Vec<usize>,
}

impl PlMap {
    pub fn to_json(&self, digits: usize) -> PlJson {
        PlJson {
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceJson {
                    domain: p.domain.clone(),
                    range: p.range.clone(),
                    x_lo: p.x_lo.to_json(digits),
                    x_hi: p.x_hi.to_json(digits),
                    y_lo: p.y_lo.to_json(digits),
                    slope_exponent: p.exponent,
                })
                .collect(),
            permutation: self.permutation.clone(),
        }
    }
}
