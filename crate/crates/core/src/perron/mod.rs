//! The Perron eigenvalue `beta` of the transition matrix, the normalized
//! positive eigenvector `p`, cylinder weights and interval endpoints, all
//! exact in `Q(beta)`.

pub mod field;
pub mod poly;

use std::sync::Arc;

use num::traits::{One, ToPrimitive};
use num::BigInt;
use serde::Serialize;
use thiserror::Error;

pub use field::{AlgebraicJson, AlgebraicNumber, FieldError, NumberField};
use poly::{bisect_root, characteristic_polynomial, factor_containing, isolate_largest_root, Poly, Sturm, Q};

use crate::sft::{SftError, Symbol, TransitionMatrix, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PerronError {
    #[error("spectral radius is not greater than one")]
    BetaNotAboveOne,
    #[error("Perron eigenvector is not positive at index {0}")]
    NotPositive(usize),
    #[error("eigenspace of beta is not one-dimensional")]
    DegenerateEigenspace,
    #[error(transparent)]
    Sft(#[from] SftError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Exact Perron data of a validated transition matrix.
#[derive(Debug, Clone)]
pub struct PerronData {
    matrix: TransitionMatrix,
    field: Arc<NumberField>,
    beta: AlgebraicNumber,
    beta_inv: AlgebraicNumber,
    p: Vec<AlgebraicNumber>,
    /// `prefix_p[s][j] = sum of p_k over k < j with A(s, k) = 1`, for
    /// `s = 0` (no predecessor) and each symbol `s`.
    prefix_p: Vec<Vec<AlgebraicNumber>>,
}

impl PerronData {
    pub fn compute(a: &TransitionMatrix) -> Result<Self, PerronError> {
        let charpoly = characteristic_polynomial(&a.rows());
        let f = Poly::from_ints(&charpoly).square_free();
        let roots = f.complex_roots();
        let target = (0..roots.len())
            .filter(|&i| roots[i].im.abs() < 1e-7)
            .max_by(|&i, &j| roots[i].re.total_cmp(&roots[j].re))
            .ok_or(PerronError::BetaNotAboveOne)?;
        let m = factor_containing(&f, &roots, target);
        let m_int = m.to_integers().expect("monic factor of a monic integer polynomial is integral");

        // Certify that the largest real root of m is the spectral radius:
        // exactly one root of the full characteristic polynomial lies in
        // (lo, bound], and it is the root of m in (lo, hi].
        let sturm = Sturm::new(&f);
        let bound = f.root_bound();
        let one = Q::one();
        let (lo, hi) = if m.degree() == Some(1) {
            let r = -m.coeffs()[0].clone();
            if r <= one {
                return Err(PerronError::BetaNotAboveOne);
            }
            let mut lo = &r - &one;
            while sturm.count(&lo, &bound) > 1 {
                lo = (&lo + &r) / Q::from_integer(BigInt::from(2));
            }
            (lo, r)
        } else {
            let (mut lo, mut hi) = isolate_largest_root(&m).ok_or(PerronError::BetaNotAboveOne)?;
            let tight = Q::new(BigInt::one(), BigInt::from(1u64 << 40));
            while lo < one || &hi - &lo > tight || sturm.count(&lo, &bound) > 1 {
                if hi <= one {
                    return Err(PerronError::BetaNotAboveOne);
                }
                let (a, b) = bisect_root(&m, &lo, &hi);
                lo = a;
                hi = b;
            }
            (lo, hi)
        };
        assert_eq!(sturm.count(&lo, &bound), 1, "factor does not carry the spectral radius");
        let field = NumberField::new(m_int, lo, hi);
        let beta = AlgebraicNumber::beta(&field);
        let p = perron_vector(a, &field, &beta)?;
        let beta_inv = beta.inverse()?;
        let zero = AlgebraicNumber::zero(&field);
        let n = a.n();
        let mut prefix_p = Vec::with_capacity(n + 1);
        for s in 0..=n as Symbol {
            let mut row = Vec::with_capacity(n + 1);
            let mut acc = zero.clone();
            row.push(zero.clone()); // index 0 unused
            for j in 1..=n as Symbol {
                row.push(acc.clone());
                if s == 0 || a.allowed(s, j) {
                    acc = &acc + &p[j as usize - 1];
                }
            }
            prefix_p.push(row);
        }
        Ok(PerronData { matrix: a.clone(), field, beta, beta_inv, p, prefix_p })
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn beta(&self) -> &AlgebraicNumber {
        &self.beta
    }

    pub fn beta_inv(&self) -> &AlgebraicNumber {
        &self.beta_inv
    }

    /// `beta^k` for any integer `k`.
    pub fn beta_pow(&self, k: i64) -> AlgebraicNumber {
        if k >= 0 {
            self.beta.pow(k).expect("nonnegative power")
        } else {
            self.beta_inv.pow(-k).expect("nonnegative power")
        }
    }

    /// The normalized Perron eigenvector, `p[j-1] = p_j`.
    pub fn p(&self) -> &[AlgebraicNumber] {
        &self.p
    }

    pub fn min_poly(&self) -> &[BigInt] {
        self.field.min_poly()
    }

    pub fn zero(&self) -> AlgebraicNumber {
        AlgebraicNumber::zero(&self.field)
    }

    pub fn one(&self) -> AlgebraicNumber {
        AlgebraicNumber::one(&self.field)
    }

    pub fn rational(&self, r: Q) -> AlgebraicNumber {
        AlgebraicNumber::rational(&self.field, r)
    }

    /// `sum of p_j over j < to with A(from, j) = 1`; `from = None` drops the
    /// transition constraint.
    fn partial_p(&self, from: Option<Symbol>, to: Symbol) -> &AlgebraicNumber {
        &self.prefix_p[from.unwrap_or(0) as usize][to as usize]
    }

    /// The cylinder weight `phi(S_mu S_mu^*) = beta^{-n} sum_j A(mu_n, j) p_j`.
    pub fn kms_weight(&self, mu: &Word) -> Result<AlgebraicNumber, PerronError> {
        self.matrix.check_word(mu)?;
        let last = mu.last().ok_or(SftError::EmptyWord)?;
        let n = mu.len() as i64;
        let row_sum = self
            .matrix
            .successors(last)
            .fold(self.zero(), |acc, j| &acc + &self.p[j as usize - 1]);
        Ok(&self.beta_pow(-n) * &row_sum)
    }

    /// Left endpoint `l(mu)` of the interval `I_mu`, via the incremental
    /// recursion over prefixes.
    pub fn endpoint_l(&self, mu: &Word) -> Result<AlgebraicNumber, PerronError> {
        self.matrix.check_word(mu)?;
        if mu.is_empty() {
            return Err(SftError::EmptyWord.into());
        }
        let mut acc = self.zero();
        let mut scale = self.one();
        let mut prev: Option<Symbol> = None;
        for &s in mu.iter() {
            let c = self.partial_p(prev, s);
            acc = &acc + &(&scale * c);
            scale = &scale * &self.beta_inv;
            prev = Some(s);
        }
        Ok(acc)
    }

    /// Right endpoint `r(mu) = l(mu) + phi(S_mu S_mu^*)`.
    pub fn endpoint_r(&self, mu: &Word) -> Result<AlgebraicNumber, PerronError> {
        Ok(&self.endpoint_l(mu)? + &self.kms_weight(mu)?)
    }

    /// Both endpoints of `I_mu`.
    pub fn interval(&self, mu: &Word) -> Result<(AlgebraicNumber, AlgebraicNumber), PerronError> {
        let l = self.endpoint_l(mu)?;
        let r = &l + &self.kms_weight(mu)?;
        Ok((l, r))
    }

    /// `c_n`: the contribution of step `n` to the series for `rho`, i.e. the
    /// `p`-mass of allowed symbols below `to` after `from`.
    pub(crate) fn step_mass(&self, from: Option<Symbol>, to: Symbol) -> &AlgebraicNumber {
        self.partial_p(from, to)
    }

    /// Lower bound `min_j p_j * beta^{-n}` separating distinct endpoints of
    /// words of length `n`.
    pub fn separation_bound(&self, n: usize) -> AlgebraicNumber {
        let min_p = self.p.iter().min().expect("n >= 2").clone();
        &min_p * &self.beta_pow(-(n as i64))
    }

    pub fn to_json(&self, digits: usize) -> PerronJson {
        let (lo, hi) = self.field.interval();
        PerronJson {
            min_poly: self.min_poly().iter().map(|c| c.to_i64().unwrap_or(i64::MAX)).collect(),
            beta_approx: self.beta.to_decimal(digits),
            beta_interval: [lo.to_string(), hi.to_string()],
            p: self.p.iter().map(|x| x.to_json(digits)).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PerronJson {
    pub min_poly: Vec<i64>,
    pub beta_approx: String,
    pub beta_interval: [String; 2],
    pub p: Vec<AlgebraicJson>,
}

/// Solves `(A - beta I) p = 0` over `Q(beta)` and normalizes `sum p = 1`.
fn perron_vector(
    a: &TransitionMatrix,
    field: &Arc<NumberField>,
    beta: &AlgebraicNumber,
) -> Result<Vec<AlgebraicNumber>, PerronError> {
    let n = a.n();
    let mut m: Vec<Vec<AlgebraicNumber>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = AlgebraicNumber::integer(field, a.entry(i as Symbol + 1, j as Symbol + 1));
                    if i == j {
                        &e - beta
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    // Reduced row echelon form.
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(pr) = (row..n).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = m[row][col].inverse()?;
        for c in 0..n {
            m[row][c] = &m[row][c] * &inv;
        }
        for r in 0..n {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..n {
                    let t = &factor * &m[row][c];
                    m[r][c] = &m[r][c] - &t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if pivots.len() != n - 1 {
        return Err(PerronError::DegenerateEigenspace);
    }
    let free = (0..n).find(|c| !pivots.contains(c)).expect("one free column");
    let mut v = vec![AlgebraicNumber::zero(field); n];
    v[free] = AlgebraicNumber::one(field);
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = -&m[r][free];
    }
    let total = v.iter().fold(AlgebraicNumber::zero(field), |acc, x| &acc + x);
    let inv = total.inverse()?;
    let v: Vec<AlgebraicNumber> = v.iter().map(|x| x * &inv).collect();
    for (i, x) in v.iter().enumerate() {
        if !x.is_positive() {
            return Err(PerronError::NotPositive(i + 1));
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perron::field::ratio;
    use crate::perron::poly::q;

    fn fib() -> PerronData {
        PerronData::compute(&TransitionMatrix::new(&[vec![1, 1], vec![1, 0]]).unwrap()).unwrap()
    }

    fn full(n: usize) -> PerronData {
        PerronData::compute(&TransitionMatrix::new(&vec![vec![1; n]; n]).unwrap()).unwrap()
    }

    fn num(pd: &PerronData, c: &[i64]) -> AlgebraicNumber {
        AlgebraicNumber::from_coeffs(pd.field(), c.iter().map(|&v| q(v)).collect()).unwrap()
    }

    fn w(v: &[Symbol]) -> Word {
        Word(v.to_vec())
    }

    #[test]
    fn full_shifts() {
        for n in 2..=4 {
            let pd = full(n);
            assert_eq!(pd.min_poly(), &[BigInt::from(-(n as i64)), BigInt::from(1)]);
            assert_eq!(pd.beta(), &pd.rational(q(n as i64)));
            for pj in pd.p() {
                assert_eq!(pj, &pd.rational(ratio(1, n as i64)));
            }
        }
    }

    #[test]
    fn fibonacci() {
        let pd = fib();
        assert_eq!(pd.min_poly(), &[BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]);
        assert_eq!(pd.p()[0], num(&pd, &[-1, 1]));
        assert_eq!(pd.p()[1], num(&pd, &[2, -1]));
        assert_eq!(pd.beta().to_decimal(12), "1.618033988750");
    }

    #[test]
    fn weights() {
        let pd = fib();
        assert_eq!(pd.kms_weight(&w(&[1, 1])).unwrap(), num(&pd, &[2, -1]));
        assert_eq!(pd.kms_weight(&w(&[1, 2])).unwrap(), num(&pd, &[-3, 2]));
        assert_eq!(pd.kms_weight(&w(&[2])).unwrap(), pd.p()[1]);
        let f2 = full(2);
        assert_eq!(f2.kms_weight(&w(&[2, 1])).unwrap(), f2.rational(ratio(1, 4)));
        assert!(pd.kms_weight(&Word::empty()).is_err());
        assert!(pd.kms_weight(&w(&[2, 2])).is_err());
    }

    #[test]
    fn endpoints() {
        let pd = fib();
        assert_eq!(pd.interval(&w(&[2])).unwrap(), (num(&pd, &[-1, 1]), pd.one()));
        assert_eq!(pd.interval(&w(&[1, 2])).unwrap(), (num(&pd, &[2, -1]), num(&pd, &[-1, 1])));
        let f2 = full(2);
        assert_eq!(
            f2.interval(&w(&[1, 2])).unwrap(),
            (f2.rational(ratio(1, 4)), f2.rational(ratio(1, 2)))
        );
        assert!(pd.endpoint_l(&Word::empty()).is_err());
    }

    #[test]
    fn endpoint_matches_defining_sum() {
        // l(mu) = sum of weights of same-length words below mu
        let a = TransitionMatrix::new(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap();
        let pd = PerronData::compute(&a).unwrap();
        for n in 1..=4 {
            let words = a.words(n);
            let mut acc = pd.zero();
            for mu in &words {
                assert_eq!(pd.endpoint_l(mu).unwrap(), acc);
                acc = &acc + &pd.kms_weight(mu).unwrap();
            }
            assert_eq!(acc, pd.one());
        }
    }

    #[test]
    fn eigen_equation_holds() {
        let a = TransitionMatrix::new(&[vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 1]]).unwrap();
        let pd = PerronData::compute(&a).unwrap();
        let p = pd.p();
        for i in 1..=3 {
            let lhs = a.successors(i).fold(pd.zero(), |acc, j| &acc + &p[j as usize - 1]);
            assert_eq!(lhs, pd.beta() * &p[i as usize - 1]);
        }
        let sum = p.iter().fold(pd.zero(), |acc, x| &acc + x);
        assert_eq!(sum, pd.one());
    }

    #[test]
    fn reducible_charpoly_picks_right_factor() {
        // charpoly x^4 - 4x^2: beta = 2 sits next to the root -2 and a double 0
        let a = TransitionMatrix::new(&[vec![0, 1, 0, 1], vec![1, 0, 1, 0], vec![0, 1, 0, 1], vec![1, 0, 1, 0]]);
        let pd = PerronData::compute(&a.unwrap()).unwrap();
        assert_eq!(pd.beta(), &pd.rational(q(2)));
        let ones = pd.p().iter().fold(pd.zero(), |acc, x| &acc + x);
        assert_eq!(ones, pd.one());
    }
}
