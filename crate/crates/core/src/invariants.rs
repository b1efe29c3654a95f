//! Integer invariants of the transition matrix: Smith normal form, the group
//! `K0 = Z^N / (I - A^t) Z^N`, `det(I - A)` and the simplicity criterion.

use num::traits::{One, Signed, Zero};
use num::{BigInt, Integer};
use serde::Serialize;

use crate::sft::TransitionMatrix;

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn to_big(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(BigInt::zero(), |acc, t| acc + &a[i][t] * &b[t][j]))
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `U * M * V = D` with `U`, `V` unimodular and `D` diagonal with each
/// diagonal entry dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.len().min(self.d.first().map_or(0, |r| r.len()));
        (0..k).map(|i| self.d[i][i].clone()).collect()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut d = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);

    fn swap_cols(a: &mut IntMatrix, i: usize, j: usize) {
        for r in a.iter_mut() {
            r.swap(i, j);
        }
    }
    // row_i <- row_i - q row_j
    fn row_sub(a: &mut IntMatrix, i: usize, j: usize, q: &BigInt) {
        let rj = a[j].clone();
        for (x, y) in a[i].iter_mut().zip(rj) {
            *x -= q * y;
        }
    }
    fn col_sub(a: &mut IntMatrix, i: usize, j: usize, q: &BigInt) {
        for r in a.iter_mut() {
            let y = r[j].clone();
            r[i] -= q * y;
        }
    }

    for t in 0..rows.min(cols) {
        // Pivot: smallest nonzero absolute value in the remaining block.
        loop {
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| !d[i][j].is_zero())
                .min_by_key(|&(i, j)| d[i][j].abs());
            let Some((pi, pj)) = pivot else { break };
            d.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut v, t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                let q = d[i][t].div_floor(&d[t][t]);
                if !q.is_zero() {
                    row_sub(&mut d, i, t, &q);
                    row_sub(&mut u, i, t, &q);
                }
                if !d[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = d[t][j].div_floor(&d[t][t]);
                if !q.is_zero() {
                    col_sub(&mut d, j, t, &q);
                    col_sub(&mut v, j, t, &q);
                }
                if !d[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold any entry not divisible by the pivot into row t.
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !d[i][j].is_multiple_of(&d[t][t]));
            match bad {
                Some((i, _)) => {
                    let minus_one = -BigInt::one();
                    row_sub(&mut d, t, i, &minus_one);
                    row_sub(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    SmithForm { d, u, v }
}

/// A finitely generated abelian group `Z^free_rank + sum Z/torsion_i`, with
/// `torsion_1 | torsion_2 | ...` and every `torsion_i >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn from_diagonal(diag: &[BigInt]) -> Self {
        AbelianGroup {
            free_rank: diag.iter().filter(|d| d.is_zero()).count(),
            torsion: diag.iter().filter(|d| d.abs() > BigInt::one()).map(|d| d.abs()).collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// A finitely generated abelian group is 2-divisible iff it is finite of
    /// odd order.
    pub fn is_two_divisible(&self) -> bool {
        self.free_rank == 0 && self.torsion.iter().all(|d| d.is_odd())
    }

    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().fold(BigInt::one(), |acc, d| acc * d))
    }
}

/// `I - A^t`.
pub fn id_minus_transpose(a: &TransitionMatrix) -> IntMatrix {
    let n = a.n();
    let rows = a.rows();
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64 - rows[j][i])).collect())
        .collect()
}

pub fn k0_group(a: &TransitionMatrix) -> AbelianGroup {
    AbelianGroup::from_diagonal(&smith_normal_form(&id_minus_transpose(a)).diagonal())
}

/// `det(I - A)`.
pub fn det_id_minus_a(a: &TransitionMatrix) -> BigInt {
    let n = a.n();
    let rows = a.rows();
    let m: IntMatrix = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64 - rows[i][j])).collect())
        .collect();
    determinant(&m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Simplicity {
    Simple,
    NotSimple,
}

/// The group is simple iff `K0` is 2-divisible.
pub fn simplicity_verdict(a: &TransitionMatrix) -> Simplicity {
    if k0_group(a).is_two_divisible() {
        Simplicity::Simple
    } else {
        Simplicity::NotSimple
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// The groups are certainly not isomorphic.
    Distinguished,
    /// K0 and `det(I - A)` agree. This does not decide isomorphism: the
    /// position of the unit class in K0 is not compared.
    NecessaryConditionsPass,
}

pub fn compare_invariants(a: &TransitionMatrix, b: &TransitionMatrix) -> Comparison {
    if k0_group(a) != k0_group(b) || det_id_minus_a(a) != det_id_minus_a(b) {
        Comparison::Distinguished
    } else {
        Comparison::NecessaryConditionsPass
    }
}

/// `{"free_rank":0, "torsion":[2], "det_id_minus_A":-1, "simple":false}`.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantsJson {
    pub free_rank: usize,
    pub torsion: Vec<i64>,
    #[serde(rename = "det_id_minus_A")]
    pub det_id_minus_a: i64,
    pub simple: bool,
}

pub fn invariants_json(a: &TransitionMatrix) -> InvariantsJson {
    use num::ToPrimitive;
    let k0 = k0_group(a);
    InvariantsJson {
        free_rank: k0.free_rank,
        torsion: k0.torsion.iter().map(|d| d.to_i64().unwrap_or(i64::MAX)).collect(),
        det_id_minus_a: det_id_minus_a(a).to_i64().unwrap_or(i64::MAX),
        simple: simplicity_verdict(a) == Simplicity::Simple,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn big(m: &[&[i64]]) -> IntMatrix {
        m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    fn check(m: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(m);
        assert_eq!(mat_mul(&mat_mul(&s.u, m), &s.v), s.d);
        assert_eq!(determinant(&s.u).abs(), BigInt::one());
        assert_eq!(determinant(&s.v).abs(), BigInt::one());
        let diag = s.diagonal();
        for (i, row) in s.d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j {
                    assert!(x.is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            assert!(w[0].is_zero() && w[1].is_zero() || !w[0].is_zero() && w[1].is_multiple_of(&w[0]));
        }
        s
    }

    #[test]
    fn snf_examples() {
        let one = BigInt::one;
        assert_eq!(check(&big(&[&[0, -1], &[-1, 1]])).diagonal(), vec![one(), one()]);
        assert_eq!(check(&big(&[&[2, 0], &[0, 2]])).diagonal(), vec![BigInt::from(2), BigInt::from(2)]);
        assert_eq!(check(&big(&[&[0, 0], &[0, 0]])).diagonal(), vec![BigInt::zero(), BigInt::zero()]);
        assert_eq!(check(&big(&[&[2, 0], &[0, 3]])).diagonal(), vec![one(), BigInt::from(6)]);
        check(&big(&[&[4, 6, 2], &[8, 3, 1], &[0, 5, 7]]));
        check(&big(&[&[1, 2, 3], &[4, 5, 6]]));
    }

    #[test]
    fn k0_examples() {
        let fib = builtin::fibonacci();
        assert!(k0_group(&fib).is_trivial());
        assert_eq!(det_id_minus_a(&fib), BigInt::from(-1));
        assert_eq!(simplicity_verdict(&fib), Simplicity::Simple);
        let f2 = builtin::full_shift(2);
        assert!(k0_group(&f2).is_trivial());
        assert_eq!(simplicity_verdict(&f2), Simplicity::Simple);
        let f3 = builtin::full_shift(3);
        assert_eq!(k0_group(&f3), AbelianGroup { free_rank: 0, torsion: vec![BigInt::from(2)] });
        assert_eq!(simplicity_verdict(&f3), Simplicity::NotSimple);
        assert_eq!(det_id_minus_a(&f3), BigInt::from(-2));
    }

    #[test]
    fn comparisons() {
        let (fib, f2, f3) = (builtin::fibonacci(), builtin::full_shift(2), builtin::full_shift(3));
        assert_eq!(compare_invariants(&fib, &f2), Comparison::NecessaryConditionsPass);
        assert_eq!(compare_invariants(&f2, &f3), Comparison::Distinguished);
        assert_eq!(compare_invariants(&f3, &f3), Comparison::NecessaryConditionsPass);
    }

    #[test]
    fn json_shape() {
        let j = serde_json::to_string(&invariants_json(&builtin::full_shift(3))).unwrap();
        assert_eq!(j, r#"{"free_rank":0,"torsion":[2],"det_id_minus_A":-2,"simple":false}"#);
    }
}
