//! Dense rational polynomials, coefficients stored low degree first.

use num_traits::{Signed, Zero};

use crate::rational::{q, Q};

pub(crate) fn trim(mut p: Vec<Q>) -> Vec<Q> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub(crate) fn eval(p: &[Q], x: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

pub(crate) fn derivative(p: &[Q]) -> Vec<Q> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * q(k as i64))
        .collect()
}

/// Remainder of `a` divided by nonzero `b`.
pub(crate) fn rem(a: &[Q], b: &[Q]) -> Vec<Q> {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let lead = b.last().expect("division by zero polynomial").clone();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            let t = &f * c;
            r[i + shift] -= t;
        }
        r.pop();
        r = trim(r);
    }
    r
}

pub(crate) fn gcd(a: &[Q], b: &[Q]) -> Vec<Q> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

pub(crate) fn sturm_sequence(p: &[Q]) -> Vec<Vec<Q>> {
    let mut seq = vec![trim(p.to_vec()), trim(derivative(p))];
    loop {
        let n = seq.len();
        if seq[n - 1].is_empty() {
            seq.pop();
            break;
        }
        let r: Vec<Q> = rem(&seq[n - 2], &seq[n - 1]).into_iter().map(|c| -c).collect();
        if r.is_empty() {
            break;
        }
        seq.push(r);
    }
    seq
}

pub(crate) fn sign_changes(seq: &[Vec<Q>], x: &Q) -> usize {
    let signs: Vec<bool> = seq
        .iter()
        .map(|p| eval(p, x))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Coefficients of `p(m + t)` as a polynomial in `t`.
pub(crate) fn taylor_shift(p: &[Q], m: &Q) -> Vec<Q> {
    let mut c = p.to_vec();
    let n = c.len();
    for k in 0..n {
        for i in (k..n.saturating_sub(1)).rev() {
            let t = &c[i + 1] * m;
            c[i] += t;
        }
    }
    c
}
