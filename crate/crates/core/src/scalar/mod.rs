//! Exact real scalars: rationals, or elements of a totally real field of
//! degree 2 or 3 evaluated at one chosen real embedding.

mod field;
pub(crate) mod poly;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use field::{minpoly_to_string, parse_poly, poly_from_i64, NumberField};

use crate::linalg::ExactField;
use crate::rational::{exact_nth_root, format_q, q, to_f64, Q};

/// An element of `Q(θ)` read through the embedding `θ ↦ root`.
#[derive(Clone, Debug)]
pub struct Alg {
    pub field: Arc<NumberField>,
    pub root: usize,
    pub coeffs: Vec<Q>,
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Rational(Q),
    Algebraic(Alg),
}

impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Rational(q(n))
    }

    pub fn zero() -> Self {
        Scalar::Rational(Q::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(Q::one())
    }

    /// Builds a field element, collapsing to a rational when possible.
    pub fn algebraic(field: Arc<NumberField>, root: usize, coeffs: Vec<Q>) -> Self {
        assert_eq!(coeffs.len(), field.degree());
        assert!(root < field.num_roots());
        if coeffs[1..].iter().all(|c| c.is_zero()) {
            return Scalar::Rational(coeffs[0].clone());
        }
        Scalar::Algebraic(Alg { field, root, coeffs })
    }

    /// The generator θ of `field` at root `root`.
    pub fn generator(field: &Arc<NumberField>, root: usize) -> Self {
        Scalar::algebraic(field.clone(), root, field.generator())
    }

    /// `√g` for a positive rational `g`, exact: rational if `g` is a square,
    /// otherwise the positive root of `x² − pq` divided by `q`.
    pub fn sqrt_rational(g: &Q) -> Self {
        assert!(g.is_positive(), "square root of a nonpositive rational");
        if let Some(r) = exact_nth_root(g, 2) {
            return Scalar::Rational(r);
        }
        let pq = g.numer() * g.denom();
        let field = Arc::new(
            NumberField::new(vec![-pq, BigInt::zero(), BigInt::one()])
                .expect("x^2 - m with m not a square is irreducible"),
        );
        let inv_den = Q::new(BigInt::one(), g.denom().clone());
        Scalar::algebraic(field, 1, vec![Q::zero(), inv_den])
    }

    pub fn as_rational(&self) -> Option<&Q> {
        match self {
            Scalar::Rational(x) => Some(x),
            Scalar::Algebraic(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rational(_))
    }

    /// Field and embedding index, if algebraic.
    pub fn field(&self) -> Option<(&Arc<NumberField>, usize)> {
        match self {
            Scalar::Rational(_) => None,
            Scalar::Algebraic(a) => Some((&a.field, a.root)),
        }
    }

    pub fn signum(&self) -> Ordering {
        match self {
            Scalar::Rational(x) => x.cmp(&Q::zero()),
            Scalar::Algebraic(a) => a.field.sign_at(&a.coeffs, a.root),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(x) => x.is_zero(),
            Scalar::Algebraic(_) => false,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Scalar {
        &Scalar::one() / self
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(x) => to_f64(x),
            Scalar::Algebraic(a) => a.field.to_f64_at(&a.coeffs, a.root),
        }
    }

    /// Rational approximation within `2^-bits`.
    pub fn approx(&self, bits: u32) -> Q {
        match self {
            Scalar::Rational(x) => x.clone(),
            Scalar::Algebraic(a) => a.field.approx_at(&a.coeffs, a.root, bits),
        }
    }

    pub fn floor(&self) -> BigInt {
        match self {
            Scalar::Rational(x) => x.floor().to_integer(),
            Scalar::Algebraic(_) => {
                let guess = self.approx(32).floor().to_integer();
                let mut k = guess;
                while *self < Scalar::Rational(Q::from_integer(k.clone())) {
                    k -= 1;
                }
                while *self >= Scalar::Rational(Q::from_integer(&k + 1)) {
                    k += 1;
                }
                k
            }
        }
    }

    fn combine(&self, o: &Scalar, op: impl Fn(&NumberField, &[Q], &[Q]) -> Vec<Q>) -> Scalar {
        let (field, root) = match (self, o) {
            (Scalar::Algebraic(a), Scalar::Algebraic(b)) => {
                assert!(
                    a.root == b.root && (Arc::ptr_eq(&a.field, &b.field) || a.field == b.field),
                    "mixing scalars from different embeddings"
                );
                (a.field.clone(), a.root)
            }
            (Scalar::Algebraic(a), _) | (_, Scalar::Algebraic(a)) => (a.field.clone(), a.root),
            _ => unreachable!(),
        };
        let lift = |s: &Scalar| match s {
            Scalar::Rational(x) => field.from_q(x.clone()),
            Scalar::Algebraic(a) => a.coeffs.clone(),
        };
        let c = op(&field, &lift(self), &lift(o));
        Scalar::algebraic(field, root, c)
    }
}

impl From<Q> for Scalar {
    fn from(x: Q) -> Self {
        Scalar::Rational(x)
    }
}

impl From<i64> for Scalar {
    fn from(x: i64) -> Self {
        Scalar::int(x)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(x) => write!(f, "{}", format_q(x)),
            Scalar::Algebraic(a) => {
                let parts: Vec<String> = a.coeffs.iter().map(format_q).collect();
                write!(
                    f,
                    "[{}] at root {} of {}",
                    parts.join(", "),
                    a.root,
                    a.field.minpoly_string()
                )
            }
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Self) -> bool {
        match (self, o) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            (Scalar::Algebraic(a), Scalar::Algebraic(b)) => {
                a.root == b.root && a.field == b.field && a.coeffs == b.coeffs
            }
            _ => false,
        }
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Scalar {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self, o) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.cmp(b),
            _ => (self - o).signum(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(x) => Scalar::Rational(-x),
            Scalar::Algebraic(a) => Scalar::Algebraic(Alg {
                field: a.field.clone(),
                root: a.root,
                coeffs: a.coeffs.iter().map(|c| -c).collect(),
            }),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            _ => self.combine(o, |f, a, b| f.add(a, b)),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            _ => self.combine(o, |f, a, b| f.sub(a, b)),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Rational(r), Scalar::Algebraic(x)) | (Scalar::Algebraic(x), Scalar::Rational(r)) => {
                Scalar::algebraic(x.field.clone(), x.root, x.field.scale(&x.coeffs, r))
            }
            _ => self.combine(o, |f, a, b| f.mul(a, b)),
        }
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (_, Scalar::Rational(b)) => {
                assert!(!b.is_zero(), "division by zero");
                self * &Scalar::Rational(b.recip())
            }
            (_, Scalar::Algebraic(b)) => {
                let inv = b.field.inv(&b.coeffs).expect("nonzero field element is invertible");
                self * &Scalar::algebraic(b.field.clone(), b.root, inv)
            }
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl ExactField for Scalar {
    fn zero_like(&self) -> Self {
        Scalar::zero()
    }
    fn one_like(&self) -> Self {
        Scalar::one()
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    fn golden() -> Scalar {
        let f = Arc::new(NumberField::parse("x^2+x-1").unwrap());
        Scalar::generator(&f, 1)
    }

    #[test]
    fn golden_arithmetic() {
        let a = golden();
        assert!((a.to_f64() - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        // a^2 + a = 1
        assert_eq!(&(&a * &a) + &a, Scalar::one());
        assert_eq!((&Scalar::one() / &a) - a.clone(), Scalar::one());
        assert!(a > Scalar::Rational(qf(61, 100)));
        assert!(a < Scalar::Rational(qf(62, 100)));
        assert_eq!(a.floor(), BigInt::zero());
        assert_eq!(a.recip().floor(), BigInt::one());
    }

    #[test]
    fn square_roots() {
        assert_eq!(Scalar::sqrt_rational(&q(49)), Scalar::int(7));
        let s = Scalar::sqrt_rational(&qf(2, 3));
        assert_eq!(&s * &s, Scalar::Rational(qf(2, 3)));
        assert!(s.is_positive());
    }

    #[test]
    fn approximations_are_tight() {
        let a = golden();
        let x = a.approx(100);
        let err = &x * &x + &x - q(1);
        assert!(err.abs() < Q::new(BigInt::one(), BigInt::one() << 95usize));
    }
}
