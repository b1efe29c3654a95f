//! Dense univariate polynomials over `Q`, coefficients stored low degree first.

use num::complex::Complex64;
use num::traits::{One, Signed, ToPrimitive, Zero};
use num::{BigInt, BigRational};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(Vec<Q>);

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn from_ints(coeffs: &[BigInt]) -> Self {
        Poly::new(coeffs.iter().map(|c| Q::from_integer(c.clone())).collect())
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    /// `x - r`.
    pub fn linear_root(r: Q) -> Self {
        Poly(vec![-r, Q::one()])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Q {
        self.0.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let z = Q::zero();
        Poly::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&z) + other.0.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Q::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &Q) -> Poly {
        Poly::new(self.0.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lead().recip();
        self.scale(&inv)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.lead().recip();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); r.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &r[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    r[k + j] -= &c * dj;
                }
            }
            quot[k] = c;
        }
        r.truncate(dd);
        (Poly::new(quot), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s)` with `s * self = g (mod m)`, `g` the monic gcd.
    pub fn inverse_mod(&self, m: &Poly) -> (Poly, Poly) {
        let (mut r0, mut r1) = (m.clone(), self.rem(m));
        let (mut s0, mut s1) = (Poly::zero(), Poly::constant(Q::one()));
        while !r1.is_zero() {
            let (qt, r) = r0.div_rem(&r1);
            let s = s0.sub(&qt.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        let lead = r0.lead();
        if lead.is_zero() {
            return (Poly::zero(), Poly::zero());
        }
        let inv = lead.recip();
        (r0.scale(&inv), s0.scale(&inv))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * q(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn square_free(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Integer coefficients if every coefficient is integral.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.0
            .iter()
            .map(|c| if c.is_integer() { Some(c.to_integer()) } else { None })
            .collect()
    }

    fn sign_at(&self, x: &Q) -> i32 {
        sign(&self.eval(x))
    }

    /// Sturm chain of a square-free polynomial.
    pub fn sturm_chain(&self) -> Vec<Poly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].rem(&chain[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            chain.push(r);
        }
        chain
    }

    /// Cauchy bound: every root has absolute value below this.
    pub fn root_bound(&self) -> Q {
        let lead = self.lead().abs();
        let m = self.0[..self.0.len() - 1]
            .iter()
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(Q::zero);
        m + Q::one()
    }

    /// Numerical complex roots by Aberth iteration (square-free input).
    pub fn complex_roots(&self) -> Vec<Complex64> {
        let n = match self.degree() {
            Some(0) | None => return Vec::new(),
            Some(n) => n,
        };
        let p = self.monic();
        let dp = p.derivative();
        let radius = p.root_bound().to_f64().unwrap_or(2.0);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64;
                Complex64::from_polar(radius * 0.7, angle)
            })
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let pz = p.eval_f64(z[i]);
                if pz.norm() == 0.0 {
                    continue;
                }
                let ratio = pz / dp.eval_f64(z[i]);
                let repulsion: Complex64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                    .sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                z[i] -= step;
                moved = moved.max(step.norm());
            }
            if moved < 1e-15 {
                break;
            }
        }
        z
    }
}

pub fn sign(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Sturm sequence with precomputed chain.
pub struct Sturm {
    chain: Vec<Poly>,
}

impl Sturm {
    pub fn new(p: &Poly) -> Self {
        Sturm { chain: p.sturm_chain() }
    }

    fn variations(&self, x: &Q) -> usize {
        let signs: Vec<i32> = self.chain.iter().map(|p| p.sign_at(x)).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count(&self, a: &Q, b: &Q) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// Isolates the largest real root of a square-free polynomial: returns
/// `(lo, hi)` with exactly one root in `(lo, hi]` and none above `hi`.
pub fn isolate_largest_root(p: &Poly) -> Option<(Q, Q)> {
    let sturm = Sturm::new(p);
    let bound = p.root_bound();
    let mut lo = -bound.clone();
    let mut hi = bound;
    if sturm.count(&lo, &hi) == 0 {
        return None;
    }
    while sturm.count(&lo, &hi) > 1 {
        let mid = (&lo + &hi) / q(2);
        if sturm.count(&mid, &hi) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo, hi))
}

/// Halves `(lo, hi]` around the unique root of `p` it contains.
pub fn bisect_root(p: &Poly, lo: &Q, hi: &Q) -> (Q, Q) {
    let mid = (lo + hi) / q(2);
    let s_mid = p.sign_at(&mid);
    if s_mid == 0 {
        return (mid.clone(), mid);
    }
    let s_hi = p.sign_at(hi);
    if s_hi == 0 || s_mid != s_hi {
        (mid, hi.clone())
    } else {
        (lo.clone(), mid)
    }
}

/// Finds the monic integer factor of the monic square-free integer polynomial
/// `p` that has the root `target` (an index into `roots`), by trying products
/// over root subsets in increasing size. Each candidate is certified by exact
/// division, so the result is always an exact divisor; the smallest exact
/// divisor containing the target root is irreducible.
pub fn factor_containing(p: &Poly, roots: &[Complex64], target: usize) -> Poly {
    let others: Vec<usize> = (0..roots.len()).filter(|&i| i != target).collect();
    let k = others.len();
    for size in 0..=k {
        let mut subsets = Vec::new();
        combinations(k, size, &mut Vec::new(), 0, &mut subsets);
        for subset in subsets {
            let mut c = vec![Complex64::new(1.0, 0.0)];
            let chosen = std::iter::once(target).chain(subset.iter().map(|&i| others[i]));
            for r in chosen.map(|i| roots[i]) {
                let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
                for (i, ci) in c.iter().enumerate() {
                    next[i + 1] += ci;
                    next[i] -= ci * r;
                }
                c = next;
            }
            let close = c
                .iter()
                .all(|z| z.im.abs() < 1e-6 && (z.re - z.re.round()).abs() < 1e-6);
            if !close {
                continue;
            }
            let cand = Poly::new(c.iter().map(|z| q(z.re.round() as i64)).collect());
            if p.rem(&cand).is_zero() {
                return cand;
            }
        }
    }
    p.clone()
}

fn combinations(n: usize, k: usize, cur: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        combinations(n, k, cur, i + 1, out);
        cur.pop();
    }
}

/// Characteristic polynomial `det(xI - M)` of an integer matrix
/// (Faddeev-LeVerrier; every division is exact).
pub fn characteristic_polynomial(m: &[Vec<i64>]) -> Vec<BigInt> {
    let n = m.len();
    let a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut mk: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    let mut c_prev = BigInt::one();
    for k in 1..=n {
        // M_k = A * M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigInt::zero();
                for t in 0..n {
                    s += &a[i][t] * &mk[t][j];
                }
                next[i][j] = s;
            }
            next[i][i] += &c_prev;
        }
        mk = next;
        let mut trace = BigInt::zero();
        for i in 0..n {
            for t in 0..n {
                trace += &a[i][t] * &mk[t][i];
            }
        }
        let c = -trace / BigInt::from(k as i64);
        coeffs[n - k] = c.clone();
        c_prev = c;
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&v| q(v)).collect())
    }

    #[test]
    fn charpoly_small() {
        let cp = characteristic_polynomial(&[vec![1, 1], vec![1, 0]]);
        assert_eq!(cp, vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]);
        let cp = characteristic_polynomial(&[vec![1, 1, 1], vec![1, 1, 1], vec![1, 1, 1]]);
        assert_eq!(cp, vec![BigInt::from(0), BigInt::from(0), BigInt::from(-3), BigInt::from(1)]);
    }

    #[test]
    fn charpoly_matches_cofactor_expansion() {
        // det(xI - M) at x = 0..4 against a direct 3x3 determinant
        let m = vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 1]];
        let cp = Poly::from_ints(&characteristic_polynomial(&m));
        for x in 0..5i64 {
            let b: Vec<Vec<i64>> = (0..3)
                .map(|i| (0..3).map(|j| if i == j { x - m[i][j] } else { -m[i][j] }).collect())
                .collect();
            let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
                - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
                + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
            assert_eq!(cp.eval(&q(x)), q(det));
        }
    }

    #[test]
    fn division_and_gcd() {
        let a = p(&[-1, 0, 1]); // x^2 - 1
        let b = p(&[1, 1]);
        let (qt, r) = a.div_rem(&b);
        assert_eq!(qt, p(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&p(&[-1, 1]).mul(&p(&[2, 1]))), p(&[-1, 1]));
        assert_eq!(p(&[0, 0, 1, 1]).square_free(), p(&[0, 1, 1]));
    }

    #[test]
    fn modular_inverse() {
        let m = p(&[-1, -1, 1]);
        let (g, s) = p(&[0, 1]).inverse_mod(&m);
        assert_eq!(g, p(&[1]));
        assert_eq!(s, p(&[-1, 1]));
    }

    #[test]
    fn sturm_counts_and_isolation() {
        let f = p(&[0, -3, 0, 1]); // x^3 - 3x, roots 0, +-sqrt 3
        let s = Sturm::new(&f);
        assert_eq!(s.count(&q(-10), &q(10)), 3);
        assert_eq!(s.count(&q(-1), &q(1)), 1);
        let (lo, hi) = isolate_largest_root(&f).unwrap();
        assert_eq!(s.count(&lo, &hi), 1);
        assert_eq!(s.count(&hi, &q(100)), 0);
        assert!(lo < q(2) && hi > q(1));
    }

    #[test]
    fn factor_search() {
        // (x^2 - x - 1)(x + 2)(x^2 + 1)
        let f = p(&[-1, -1, 1]).mul(&p(&[2, 1])).mul(&p(&[1, 0, 1]));
        let roots = f.complex_roots();
        let target = (0..roots.len())
            .filter(|&i| roots[i].im.abs() < 1e-9)
            .max_by(|&a, &b| roots[a].re.partial_cmp(&roots[b].re).unwrap())
            .unwrap();
        assert_eq!(factor_containing(&f, &roots, target), p(&[-1, -1, 1]));
    }
}
