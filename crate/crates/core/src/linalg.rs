//! Small exact linear algebra: Bareiss determinants over the integers and
//! Gaussian elimination over any exact field.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Q;

/// Minimal field interface used by the elimination routines.
pub trait ExactField: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_exact(&self) -> bool;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn div_ref(&self, o: &Self) -> Self;
}

impl ExactField for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn is_zero_exact(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
}

/// Determinant of a square integer matrix (fraction-free Bareiss).
pub fn int_det(rows: &[Vec<i64>]) -> BigInt {
    let m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    bigint_det(m)
}

pub fn bigint_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Determinant over an exact field by Gaussian elimination.
pub fn det<F: ExactField>(rows: &[Vec<F>]) -> F {
    let n = rows.len();
    assert!(n > 0, "determinant of an empty matrix");
    let mut m = rows.to_vec();
    let mut acc = m[0][0].one_like();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero_exact()) else {
            return m[0][0].zero_like();
        };
        if p != k {
            m.swap(p, k);
            acc = acc.zero_like().sub_ref(&acc);
        }
        let pivot = m[k][k].clone();
        acc = acc.mul_ref(&pivot);
        for i in k + 1..n {
            if m[i][k].is_zero_exact() {
                continue;
            }
            let f = m[i][k].div_ref(&pivot);
            for j in k..n {
                let t = f.mul_ref(&m[k][j]);
                m[i][j] = m[i][j].sub_ref(&t);
            }
        }
    }
    acc
}

/// Solves `a x = b` for square nonsingular `a`; `None` if singular.
pub fn solve<F: ExactField>(a: &[Vec<F>], b: &[F]) -> Option<Vec<F>> {
    let n = a.len();
    let mut m: Vec<Vec<F>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    gauss_jordan(&mut m, n)?;
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

/// Inverse of a square matrix; `None` if singular.
pub fn inverse<F: ExactField>(a: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = a.len();
    let mut m: Vec<Vec<F>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { row[0].one_like() } else { row[0].zero_like() });
            }
            r
        })
        .collect();
    gauss_jordan(&mut m, n)?;
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn gauss_jordan<F: ExactField>(m: &mut [Vec<F>], n: usize) -> Option<()> {
    let width = m[0].len();
    for k in 0..n {
        let p = (k..n).find(|&i| !m[i][k].is_zero_exact())?;
        m.swap(p, k);
        let pivot = m[k][k].clone();
        for j in k..width {
            m[k][j] = m[k][j].div_ref(&pivot);
        }
        for i in 0..n {
            if i == k || m[i][k].is_zero_exact() {
                continue;
            }
            let f = m[i][k].clone();
            for j in k..width {
                let t = f.mul_ref(&m[k][j]);
                m[i][j] = m[i][j].sub_ref(&t);
            }
        }
    }
    Some(())
}

/// Rank of a set of rational vectors.
pub fn rank_q(vectors: &[Vec<Q>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mut m = vectors.to_vec();
    let cols = m[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, rank);
        for i in rank + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[rank][c];
            for j in c..cols {
                let t = &f * &m[rank][j];
                m[i][j] -= t;
            }
        }
        rank += 1;
    }
    rank
}

/// Affine dimension of a finite point set (−1 for the empty set).
pub fn affine_dim_q(points: &[Vec<Q>]) -> isize {
    let Some(first) = points.first() else {
        return -1;
    };
    let diffs: Vec<Vec<Q>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    rank_q(&diffs) as isize
}

pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Divides by the gcd of the entries. Zero vectors are returned unchanged.
pub fn primitive(v: &[i64]) -> (Vec<i64>, i64) {
    let g = gcd_slice(v);
    if g == 0 {
        return (v.to_vec(), 0);
    }
    (v.iter().map(|x| x / g).collect(), g)
}

pub fn dot_i(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// Integer vector orthogonal to `n - 1` independent integer vectors in
/// dimension `n` (generalized cross product), made primitive.
pub fn integer_normal(rows: &[Vec<i64>]) -> Option<Vec<i64>> {
    let n = rows.first()?.len();
    debug_assert_eq!(rows.len(), n - 1);
    let mut normal = Vec::with_capacity(n);
    for k in 0..n {
        let minor: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        let d = int_det(&minor);
        let d = if k % 2 == 0 { d } else { -d };
        normal.push(d);
    }
    let g = normal.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return None;
    }
    normal
        .into_iter()
        .map(|x| i64::try_from(x / &g).ok())
        .collect()
}

/// Picks a maximal affinely independent subset (indices), greedily.
pub fn affine_basis_indices(points: &[Vec<i64>]) -> Vec<usize> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let mut chosen = vec![0usize];
    let mut diffs: Vec<Vec<Q>> = Vec::new();
    for (i, p) in points.iter().enumerate().skip(1) {
        let d: Vec<Q> = p
            .iter()
            .zip(first)
            .map(|(a, b)| Q::from_integer(BigInt::from(a - b)))
            .collect();
        diffs.push(d);
        if rank_q(&diffs) == diffs.len() {
            chosen.push(i);
        } else {
            diffs.pop();
        }
    }
    chosen
}

pub fn abs_big(x: BigInt) -> BigInt {
    x.abs()
}
