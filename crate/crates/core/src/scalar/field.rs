//! Totally real number fields of degree 2 or 3 with isolated real roots.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{mid, q, to_f64, Q};

/// Initial isolating-interval width is at most `2^-ROOT_BITS`.
const ROOT_BITS: u32 = 96;
const MAX_REFINE: usize = 4000;

/// `Q(θ)` for a monic irreducible integer polynomial whose roots are all real.
///
/// Roots are indexed in ascending order. Each root is carried as an open
/// interval `(lo, hi)` with rational endpoints on which the minimal polynomial
/// changes sign exactly once.
#[derive(Clone)]
pub struct NumberField {
    minpoly: Vec<BigInt>,
    poly_q: Vec<Q>,
    roots: Vec<(Q, Q)>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({})", self.minpoly_string())
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly
    }
}

impl NumberField {
    /// `coeffs` low degree first, monic, degree 2 or 3.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        let degree = coeffs.len().saturating_sub(1);
        if !(2..=3).contains(&degree) {
            return Err(Error::InvalidPolynomial(format!(
                "degree {degree} not supported (need 2 or 3)"
            )));
        }
        if !coeffs[degree].is_one() {
            return Err(Error::InvalidPolynomial("polynomial is not monic".into()));
        }
        let poly_q: Vec<Q> = coeffs.iter().map(|c| Q::from_integer(c.clone())).collect();
        let shown = minpoly_to_string(&coeffs);
        let g = poly::gcd(&poly_q, &poly::derivative(&poly_q));
        if g.len() > 1 {
            return Err(Error::Reducible(format!("{shown} has a repeated root")));
        }
        let bound = Q::from_integer(
            coeffs[..degree]
                .iter()
                .map(|c| c.abs())
                .max()
                .unwrap_or_default()
                + BigInt::one(),
        );
        let seq = poly::sturm_sequence(&poly_q);
        let count = |a: &Q, b: &Q| poly::sign_changes(&seq, a) - poly::sign_changes(&seq, b);
        let lo = -bound.clone();
        let total = count(&lo, &bound);
        if total != degree {
            return Err(Error::NotTotallyReal(format!(
                "{shown} has {total} real roots out of {degree}"
            )));
        }
        let mut roots = Vec::new();
        let mut stack = vec![(lo, bound)];
        while let Some((a, b)) = stack.pop() {
            match count(&a, &b) {
                0 => {}
                1 => roots.push((a, b)),
                _ => {
                    let m = mid(&a, &b);
                    if poly::eval(&poly_q, &m).is_zero() {
                        return Err(Error::Reducible(format!("{shown} has rational root {m}")));
                    }
                    stack.push((a, m.clone()));
                    stack.push((m, b));
                }
            }
        }
        roots.sort_by(|x, y| x.0.cmp(&y.0));
        let mut field = NumberField { minpoly: coeffs, poly_q, roots };
        // Endpoints of the counting intervals may themselves be roots (half-open
        // Sturm counts); nudge them off by refining with strict sign changes.
        for i in 0..field.roots.len() {
            let (a, b) = field.roots[i].clone();
            let (a, b) = field.strict_interval(a, b)?;
            let tight = field.refine_to(a, b, ROOT_BITS)?;
            field.roots[i] = tight;
        }
        // A rational root of a monic integer cubic or quadratic is an integer.
        for (a, b) in &field.roots {
            let mut k = a.ceil();
            while &k <= b {
                if poly::eval(&field.poly_q, &k).is_zero() {
                    return Err(Error::Reducible(format!("{shown} has integer root {k}")));
                }
                k += Q::one();
            }
        }
        Ok(field)
    }

    /// Parses strings such as `x^3+x^2-2x-1` or `x^2 - 2*x - 1`.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(parse_poly(s)?)
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn minpoly(&self) -> &[BigInt] {
        &self.minpoly
    }

    pub fn minpoly_string(&self) -> String {
        minpoly_to_string(&self.minpoly)
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn root_interval(&self, i: usize) -> &(Q, Q) {
        &self.roots[i]
    }

    /// Discriminant of the minimal polynomial (degree 2 or 3).
    pub fn discriminant(&self) -> BigInt {
        let c = &self.minpoly;
        match self.degree() {
            2 => &c[1] * &c[1] - BigInt::from(4) * &c[0],
            _ => {
                // x^3 + a x^2 + b x + c
                let (a, b, cc) = (&c[2], &c[1], &c[0]);
                let t1 = a * a * b * b;
                let t2 = BigInt::from(4) * b * b * b;
                let t3 = BigInt::from(4) * a * a * a * cc;
                let t4 = BigInt::from(27) * cc * cc;
                let t5 = BigInt::from(18) * a * b * cc;
                t1 - t2 - t3 - t4 + t5
            }
        }
    }

    pub fn zero(&self) -> Vec<Q> {
        vec![Q::zero(); self.degree()]
    }

    pub fn from_q(&self, x: Q) -> Vec<Q> {
        let mut v = self.zero();
        v[0] = x;
        v
    }

    /// The generator θ.
    pub fn generator(&self) -> Vec<Q> {
        let mut v = self.zero();
        v[1] = Q::one();
        v
    }

    pub fn add(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn scale(&self, a: &[Q], s: &Q) -> Vec<Q> {
        a.iter().map(|x| x * s).collect()
    }

    pub fn mul(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let d = self.degree();
        let mut prod = vec![Q::zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        for k in (d..prod.len()).rev() {
            let c = std::mem::take(&mut prod[k]);
            if c.is_zero() {
                continue;
            }
            for i in 0..d {
                prod[k - d + i] -= &c * &self.poly_q[i];
            }
        }
        prod.truncate(d);
        prod
    }

    pub fn pow(&self, a: &[Q], e: u32) -> Vec<Q> {
        let mut acc = self.from_q(Q::one());
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// Matrix of multiplication by `a` in the power basis; column `j` holds `a·θ^j`.
    pub fn mult_matrix(&self, a: &[Q]) -> Vec<Vec<Q>> {
        let d = self.degree();
        let cols: Vec<Vec<Q>> = (0..d)
            .map(|j| {
                let mut e = self.zero();
                e[j] = Q::one();
                self.mul(a, &e)
            })
            .collect();
        (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect()
    }

    pub fn norm(&self, a: &[Q]) -> Q {
        linalg::det(&self.mult_matrix(a))
    }

    pub fn trace(&self, a: &[Q]) -> Q {
        let m = self.mult_matrix(a);
        (0..self.degree()).map(|i| m[i][i].clone()).sum()
    }

    pub fn inv(&self, a: &[Q]) -> Option<Vec<Q>> {
        linalg::solve(&self.mult_matrix(a), &self.from_q(Q::one()))
    }

    /// Sign of the image of `a` under the embedding at root `root`.
    ///
    /// Exact: the Taylor remainder bound on the current root interval decides the
    /// sign, otherwise the interval is bisected. Terminates because a nonzero
    /// element never vanishes at a root of an irreducible minimal polynomial.
    pub fn sign_at(&self, a: &[Q], root: usize) -> Ordering {
        if a.iter().all(|c| c.is_zero()) {
            return Ordering::Equal;
        }
        let (mut lo, mut hi) = self.roots[root].clone();
        for _ in 0..MAX_REFINE {
            let m = mid(&lo, &hi);
            let h = (&hi - &lo) / q(2);
            let t = poly::taylor_shift(a, &m);
            let mut bound = Q::zero();
            let mut hp = h.clone();
            for c in &t[1..] {
                bound += c.abs() * &hp;
                hp *= &h;
            }
            if t[0].abs() > bound {
                return if t[0].is_positive() { Ordering::Greater } else { Ordering::Less };
            }
            (lo, hi) = self.bisect(lo, hi);
        }
        panic!("sign determination did not terminate for a nonzero element");
    }

    /// Rational approximation of the embedding of `a` with error below `2^-bits`
    /// (for elements of moderate height).
    pub fn approx_at(&self, a: &[Q], root: usize, bits: u32) -> Q {
        let (lo, hi) = self.root_approx_interval(root, bits + 8 + self.height_bits(a));
        poly::eval(a, &mid(&lo, &hi))
    }

    pub fn to_f64_at(&self, a: &[Q], root: usize) -> f64 {
        to_f64(&self.approx_at(a, root, 64))
    }

    pub fn root_approx_interval(&self, root: usize, bits: u32) -> (Q, Q) {
        let (lo, hi) = self.roots[root].clone();
        self.refine_to(lo, hi, bits).expect("isolating interval stays valid")
    }

    fn height_bits(&self, a: &[Q]) -> u32 {
        let max = a
            .iter()
            .map(|c| c.abs().ceil().to_integer().bits())
            .max()
            .unwrap_or(0);
        let root = self
            .roots
            .iter()
            .map(|(l, h)| l.abs().max(h.abs()).ceil().to_integer().bits())
            .max()
            .unwrap_or(0);
        (max + root * self.degree() as u64 + 4).min(4096) as u32
    }

    fn sign_poly(&self, x: &Q) -> Ordering {
        poly::eval(&self.poly_q, x).cmp(&Q::zero())
    }

    fn bisect(&self, lo: Q, hi: Q) -> (Q, Q) {
        let m = mid(&lo, &hi);
        let s_lo = self.sign_poly(&lo);
        let s_m = self.sign_poly(&m);
        if s_m == Ordering::Equal {
            // Impossible for irreducible polynomials of degree >= 2.
            panic!("rational root found during refinement");
        }
        if s_m == s_lo {
            (m, hi)
        } else {
            (lo, m)
        }
    }

    fn strict_interval(&self, a: Q, b: Q) -> Result<(Q, Q)> {
        // (a, b] contains exactly one root; make both endpoints non-roots.
        let mut hi = b;
        if self.sign_poly(&hi) == Ordering::Equal {
            return Err(Error::Reducible(format!("rational root {hi}")));
        }
        let mut lo = a;
        if self.sign_poly(&lo) == Ordering::Equal {
            return Err(Error::Reducible(format!("rational root {lo}")));
        }
        if self.sign_poly(&lo) == self.sign_poly(&hi) {
            // Cannot happen for a simple root strictly inside (lo, hi].
            let m = mid(&lo, &hi);
            lo = m.clone();
            hi = hi.max(m);
        }
        Ok((lo, hi))
    }

    fn refine_to(&self, mut lo: Q, mut hi: Q, bits: u32) -> Result<(Q, Q)> {
        let target = Q::new(BigInt::one(), BigInt::one() << bits);
        while &hi - &lo > target {
            (lo, hi) = self.bisect(lo, hi);
        }
        Ok((lo, hi))
    }

    /// Floating approximation of root `i`.
    pub fn root_f64(&self, i: usize) -> f64 {
        let (lo, hi) = &self.roots[i];
        to_f64(&mid(lo, hi))
    }
}

pub fn minpoly_to_string(c: &[BigInt]) -> String {
    let mut s = String::new();
    for (k, coef) in c.iter().enumerate().rev() {
        if coef.is_zero() {
            continue;
        }
        let neg = coef.is_negative();
        let abs = coef.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push(if neg { '-' } else { '+' });
        }
        let show_coef = !abs.is_one() || k == 0;
        if show_coef {
            s.push_str(&abs.to_string());
        }
        match k {
            0 => {}
            1 => s.push('x'),
            _ => s.push_str(&format!("x^{k}")),
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Parses a univariate integer polynomial in `x`.
pub fn parse_poly(s: &str) -> Result<Vec<BigInt>> {
    let bad = |m: &str| Error::Parse(format!("bad polynomial {s:?}: {m}"));
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(bad("empty"));
    }
    let mut terms = Vec::new();
    let mut cur = String::new();
    for (i, ch) in cleaned.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    terms.push(cur);
    let mut coeffs: Vec<BigInt> = Vec::new();
    for t in terms {
        let (sign, body) = match t.strip_prefix('-') {
            Some(b) => (-1, b),
            None => (1, t.strip_prefix('+').unwrap_or(&t)),
        };
        let (coef, power) = match body.find('x') {
            None => (body.to_string(), 0usize),
            Some(pos) => {
                let c = body[..pos].trim_end_matches('*');
                let rest = &body[pos + 1..];
                let p = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .ok_or_else(|| bad("expected ^"))?
                        .parse::<usize>()
                        .map_err(|_| bad("bad exponent"))?
                };
                (if c.is_empty() { "1".to_string() } else { c.to_string() }, p)
            }
        };
        let c: BigInt = coef.parse().map_err(|_| bad("bad coefficient"))?;
        if coeffs.len() <= power {
            coeffs.resize(power + 1, BigInt::zero());
        }
        coeffs[power] += c * sign;
    }
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    Ok(coeffs)
}

/// Convenience for tests and fixtures.
pub fn poly_from_i64(c: &[i64]) -> Vec<BigInt> {
    c.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heptagonal() -> NumberField {
        NumberField::parse("x^3+x^2-2x-1").unwrap()
    }

    #[test]
    fn parses_and_isolates_roots() {
        let f = heptagonal();
        assert_eq!(f.discriminant(), BigInt::from(49));
        let r: Vec<f64> = (0..3).map(|i| f.root_f64(i)).collect();
        let want = [
            2.0 * (6.0 * std::f64::consts::PI / 7.0).cos(),
            2.0 * (4.0 * std::f64::consts::PI / 7.0).cos(),
            2.0 * (2.0 * std::f64::consts::PI / 7.0).cos(),
        ];
        for (a, b) in r.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(f.minpoly_string(), "x^3+x^2-2x-1");
    }

    #[test]
    fn rejects_bad_polynomials() {
        assert!(matches!(NumberField::parse("x^3-2"), Err(Error::NotTotallyReal(_))));
        assert!(matches!(NumberField::parse("x^3-x"), Err(Error::Reducible(_))));
        assert!(matches!(NumberField::parse("x^2-4"), Err(Error::Reducible(_))));
        assert!(matches!(NumberField::parse("2x^2-1"), Err(Error::InvalidPolynomial(_))));
        assert!(NumberField::parse("x^3+x+").is_err());
    }

    #[test]
    fn unit_norms_and_signs() {
        let f = heptagonal();
        let t = f.generator();
        assert_eq!(f.norm(&t), q(1));
        assert_eq!(f.trace(&t), q(-1));
        let inv = f.inv(&t).unwrap();
        assert_eq!(f.mul(&t, &inv), f.from_q(q(1)));
        // θ - 1 at the three roots: all roots are below 1.3, the largest ≈ 1.247
        let tm1 = f.sub(&t, &f.from_q(q(1)));
        assert_eq!(f.sign_at(&tm1, 2), Ordering::Greater);
        assert_eq!(f.sign_at(&tm1, 1), Ordering::Less);
        assert_eq!(f.sign_at(&f.zero(), 1), Ordering::Equal);
    }

    #[test]
    fn sign_of_tiny_element_needs_refinement() {
        // x^2 - 2: 1393/985 approximates sqrt 2 to about 3.6e-7
        let f = NumberField::parse("x^2-2").unwrap();
        let e = vec![Q::new(BigInt::from(-1393), BigInt::from(985)), q(1)];
        assert_eq!(f.sign_at(&e, 1), Ordering::Greater);
        assert_eq!(f.sign_at(&e, 0), Ordering::Less);
    }
}
