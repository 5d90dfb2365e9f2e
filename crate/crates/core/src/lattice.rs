//! Lattices with exact bases, their duals, orthant reflections and
//! serialization.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{best_convergent, exact_nth_root, format_q, parse_q, q, Q};
use crate::scalar::{NumberField, Scalar};

pub const LATTICE_SCHEMA: &str = "klein.lattice/1";

/// Shear used to push the axis points of `Λ_α` into the open quadrant.
/// Parses an `α` specification: `p/q`, `golden` (`(√5 − 1)/2`), `sqrt2m1`
/// (`√2 − 1`), or `minpoly@[lo,hi]` selecting the unique real root in the
/// interval.
pub fn parse_alpha(spec: &str) -> Result<Scalar> {
    let spec = spec.trim();
    match spec {
        "golden" => return parse_alpha("x^2+x-1@[0,1]"),
        "sqrt2m1" => return parse_alpha("x^2+2x-1@[0,1]"),
        _ => {}
    }
    if let Some((poly, interval)) = spec.split_once('@') {
        let inner = interval
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("bad root interval {interval:?}")))?;
        let (lo, hi) = inner
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad root interval {interval:?}")))?;
        let bound = |x: &str| -> Result<f64> {
            x.trim().parse::<f64>().or_else(|_| parse_q(x.trim()).map(|v| crate::rational::to_f64(&v)))
                .map_err(|_| Error::Parse(format!("bad bound {x:?}")))
        };
        let (lo, hi) = (bound(lo)?, bound(hi)?);
        let field = Arc::new(NumberField::parse(poly)?);
        let hits: Vec<usize> = (0..field.num_roots())
            .filter(|&i| (lo..=hi).contains(&field.root_f64(i)))
            .collect();
        return match hits.as_slice() {
            [i] => Ok(Scalar::generator(&field, *i)),
            _ => Err(Error::Parse(format!("{} roots in [{lo}, {hi}]", hits.len()))),
        };
    }
    Ok(Scalar::Rational(parse_q(spec)?))
}

pub fn alpha_shear() -> Q {
    Q::new(BigInt::one(), BigInt::one() << 40usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    RationalRandom,
    FromAlpha,
    CubicField,
    Custom,
}

/// Basis `x_i = s_i · σ_i(Σ_j c_j ξ_j)` where `σ_i` is the embedding at the
/// `i`-th real root.
#[derive(Clone, Debug)]
pub struct GaloisBasis {
    pub field: Arc<NumberField>,
    /// `ξ_j` in the power basis of the field.
    pub columns: Vec<Vec<Q>>,
    pub signs: Vec<i8>,
}

impl GaloisBasis {
    fn element(&self, c: &[i64]) -> Vec<Q> {
        let mut acc = self.field.zero();
        for (cj, xi) in c.iter().zip(&self.columns) {
            if *cj != 0 {
                acc = self.field.add(&acc, &self.field.scale(xi, &q(*cj)));
            }
        }
        acc
    }

    fn trace_gram(&self) -> Vec<Vec<Q>> {
        let f = &self.field;
        self.columns
            .iter()
            .map(|a| self.columns.iter().map(|b| f.trace(&f.mul(a, b))).collect())
            .collect()
    }

    fn entry(&self, i: usize, j: usize) -> Scalar {
        let c = self.field.scale(&self.columns[j], &q(self.signs[i] as i64));
        Scalar::algebraic(self.field.clone(), i, c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePoint {
    pub coeffs: Vec<i64>,
    pub ambient: Vec<Scalar>,
}

/// A full-rank lattice `{B c : c ∈ Zⁿ}`.
///
/// The stored basis has `|det| = scale`; when `|det|` has an exact rational
/// `n`-th root the basis is rescaled so that `scale = 1`, otherwise the raw
/// basis is kept and normalized quantities are divided by `scale`.
#[derive(Clone, Debug)]
pub struct Lattice {
    basis: Vec<Vec<Scalar>>,
    scale: Scalar,
    galois: Option<GaloisBasis>,
    provenance: Provenance,
    seed: Option<u64>,
    approx: Vec<Vec<f64>>,
}

fn check_compatible(basis: &[Vec<Scalar>]) -> Result<()> {
    let mut seen: Option<(&Arc<NumberField>, usize)> = None;
    for s in basis.iter().flatten() {
        if let Some((f, r)) = s.field() {
            match seen {
                None => seen = Some((f, r)),
                Some((g, t)) if (Arc::ptr_eq(f, g) || **f == **g) && r == t => {}
                _ => {
                    return Err(Error::Precondition(
                        "basis entries must share one field embedding".into(),
                    ))
                }
            }
        }
    }
    Ok(())
}

impl Lattice {
    /// Validates and normalizes a basis given as rows (`x = B c`).
    pub fn from_basis(raw: Vec<Vec<Scalar>>, provenance: Provenance) -> Result<Self> {
        let n = raw.len();
        if n < 2 || raw.iter().any(|r| r.len() != n) {
            return Err(Error::UnsupportedDimension(n));
        }
        check_compatible(&raw)?;
        let det = linalg::det(&raw);
        if det.is_zero() {
            return Err(Error::DegenerateBasis);
        }
        let abs = det.abs();
        let root = abs.as_rational().and_then(|d| exact_nth_root(d, n as u32));
        let (basis, scale) = match root {
            Some(r) => {
                let r = Scalar::Rational(r);
                let b = raw.iter().map(|row| row.iter().map(|x| x / &r).collect()).collect();
                (b, Scalar::one())
            }
            None => (raw, abs),
        };
        Ok(Self::assemble(basis, scale, None, provenance))
    }

    pub fn from_rational_rows(rows: &[Vec<Q>], provenance: Provenance) -> Result<Self> {
        Self::from_basis(
            rows.iter()
                .map(|r| r.iter().cloned().map(Scalar::Rational).collect())
                .collect(),
            provenance,
        )
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let rows: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        Self::from_rational_rows(&rows, Provenance::Custom)
    }

    pub fn identity(n: usize) -> Self {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        Self::from_int_rows(&rows).expect("identity is nonsingular")
    }

    /// Lattice of the module spanned by `columns` under all real embeddings.
    pub fn from_galois(
        field: Arc<NumberField>,
        columns: Vec<Vec<Q>>,
        signs: Vec<i8>,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = field.degree();
        if columns.len() != n || signs.len() != n || signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::Precondition("galois basis shape mismatch".into()));
        }
        let mut g = GaloisBasis { field, columns, signs };
        let gram_det = linalg::det(&g.trace_gram());
        if gram_det.is_zero() {
            return Err(Error::DegenerateBasis);
        }
        // det(B)^2 = det(Tr(ξ_j ξ_l))
        let d = Scalar::sqrt_rational(&gram_det.abs());
        let scale = match d.as_rational().and_then(|d| exact_nth_root(d, n as u32)) {
            Some(r) => {
                g.columns = g.columns.iter().map(|c| g.field.scale(c, &r.recip())).collect();
                Scalar::one()
            }
            None => d,
        };
        let basis = (0..n).map(|i| (0..n).map(|j| g.entry(i, j)).collect()).collect();
        Ok(Self::assemble(basis, scale, Some(g), provenance))
    }

    /// Embeddings of the power basis `1, θ, …, θⁿ⁻¹` of `Z[θ]`.
    pub fn from_number_field(field: Arc<NumberField>) -> Result<Self> {
        let n = field.degree();
        let columns = (0..n)
            .map(|j| {
                let mut e = field.zero();
                e[j] = Q::one();
                e
            })
            .collect();
        Self::from_galois(field, columns, vec![1; n], Provenance::CubicField)
    }

    pub fn from_cubic_field(minpoly: &str) -> Result<Self> {
        let field = NumberField::parse(minpoly)?;
        if field.degree() != 3 {
            return Err(Error::InvalidPolynomial("expected a cubic".into()));
        }
        Self::from_number_field(Arc::new(field))
    }

    /// The lattice with basis vectors `(1, 1 − α)` and `(0, 1)`.
    pub fn from_alpha(alpha: &Scalar) -> Result<Self> {
        if !alpha.is_positive() || *alpha >= Scalar::one() {
            return Err(Error::AlphaOutOfRange);
        }
        let basis = vec![
            vec![Scalar::one(), Scalar::zero()],
            vec![&Scalar::one() - alpha, Scalar::one()],
        ];
        Self::from_basis(basis, Provenance::FromAlpha)
    }

    /// `S · Λ_α` with the unimodular shear `S = [[1, ε], [ε, 1 + ε²]]`,
    /// `ε = 2⁻⁴⁰`. Within windows far below `1/ε` its open-quadrant points
    /// are exactly the images of the closed-quadrant points of `Λ_α`.
    pub fn alpha_sail_lattice(alpha: &Scalar) -> Result<Self> {
        let base = Self::from_alpha(alpha)?;
        let e = alpha_shear();
        let s = [
            [Q::one(), e.clone()],
            [e.clone(), Q::one() + &e * &e],
        ];
        let b = &base.basis;
        let rows = (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| {
                        let a = &b[0][j] * &Scalar::Rational(s[i][0].clone());
                        let c = &b[1][j] * &Scalar::Rational(s[i][1].clone());
                        &a + &c
                    })
                    .collect()
            })
            .collect();
        Self::from_basis(rows, Provenance::FromAlpha)
    }

    /// Random determinant-one rational lattice `L · U` with unit-triangular
    /// factors whose entries are convergents (denominator ≤ 10⁶) of uniform
    /// reals in `(−1, 1)`.
    pub fn random_rational(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || best_convergent(rng.gen_range(-1.0..1.0), 1_000_000);
        let mut l = vec![vec![Q::zero(); n]; n];
        let mut u = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            l[i][i] = Q::one();
            u[i][i] = Q::one();
            for j in 0..i {
                l[i][j] = draw();
            }
            for j in i + 1..n {
                u[i][j] = draw();
            }
        }
        let rows: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| &l[i][k] * &u[k][j]).sum())
                    .collect()
            })
            .collect();
        let mut lat = Self::from_rational_rows(&rows, Provenance::RationalRandom)
            .expect("unit triangular factors are unimodular");
        lat.seed = Some(seed);
        lat
    }

    fn assemble(
        basis: Vec<Vec<Scalar>>,
        scale: Scalar,
        galois: Option<GaloisBasis>,
        provenance: Provenance,
    ) -> Self {
        let approx = basis
            .iter()
            .map(|r| r.iter().map(Scalar::to_f64).collect())
            .collect();
        Lattice { basis, scale, galois, provenance, seed: None, approx }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn approx_basis(&self) -> &[Vec<f64>] {
        &self.approx
    }

    /// `|det|` of the stored basis (1 when normalized exactly).
    pub fn scale(&self) -> &Scalar {
        &self.scale
    }

    pub fn galois(&self) -> Option<&GaloisBasis> {
        self.galois.as_ref()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    /// Inverse-transpose basis; pairs with this basis to the identity.
    pub fn dual(&self) -> Lattice {
        match &self.galois {
            Some(g) => {
                let gi = linalg::inverse(&g.trace_gram()).expect("nondegenerate trace form");
                let n = g.columns.len();
                let cols = (0..n)
                    .map(|k| {
                        let mut acc = g.field.zero();
                        for l in 0..n {
                            acc = g.field.add(&acc, &g.field.scale(&g.columns[l], &gi[l][k]));
                        }
                        acc
                    })
                    .collect();
                let mut d = Self::from_galois(g.field.clone(), cols, g.signs.clone(), self.provenance)
                    .expect("dual of a valid basis");
                d.seed = self.seed;
                d
            }
            None => {
                let inv = linalg::inverse(&self.basis).expect("nonsingular basis");
                let n = self.dim();
                let t = (0..n).map(|i| (0..n).map(|j| inv[j][i].clone()).collect()).collect();
                let scale = self.scale.recip();
                let mut d = Self::assemble(t, scale, None, self.provenance);
                d.seed = self.seed;
                d
            }
        }
    }

    /// Reflects ambient coordinate `i` by `sigma[i]`.
    pub fn orthant_reflect(&self, sigma: &[i8]) -> Lattice {
        assert_eq!(sigma.len(), self.dim());
        assert!(sigma.iter().all(|s| s.abs() == 1), "orthant signs must be ±1");
        let basis = self
            .basis
            .iter()
            .zip(sigma)
            .map(|(row, &s)| {
                row.iter()
                    .map(|x| if s < 0 { -x } else { x.clone() })
                    .collect()
            })
            .collect();
        let galois = self.galois.as_ref().map(|g| GaloisBasis {
            field: g.field.clone(),
            columns: g.columns.clone(),
            signs: g.signs.iter().zip(sigma).map(|(a, b)| a * b).collect(),
        });
        let mut l = Self::assemble(basis, self.scale.clone(), galois, self.provenance);
        l.seed = self.seed;
        l
    }

    /// Multiplies ambient coordinate `i` by `lambda[i] > 0`.
    pub fn diagonal_rescale(&self, lambda: &[Q]) -> Result<Lattice> {
        if self.galois.is_some() {
            return Err(Error::Precondition(
                "diagonal rescaling of a field-embedding basis".into(),
            ));
        }
        if lambda.len() != self.dim() || lambda.iter().any(|l| !l.is_positive()) {
            return Err(Error::Precondition("rescale factors must be positive".into()));
        }
        let basis = self
            .basis
            .iter()
            .zip(lambda)
            .map(|(row, l)| row.iter().map(|x| x * &Scalar::Rational(l.clone())).collect())
            .collect();
        let mut out = Self::from_basis(basis, self.provenance)?;
        out.seed = self.seed;
        Ok(out)
    }

    /// Same lattice in the basis `B · U` for a unimodular integer `U`.
    pub fn change_basis(&self, u: &[Vec<i64>]) -> Result<Lattice> {
        let n = self.dim();
        if linalg::int_det(u).abs() != BigInt::one() {
            return Err(Error::NotUnimodular);
        }
        let mut out = match &self.galois {
            Some(g) => {
                let cols = (0..n)
                    .map(|k| {
                        let c: Vec<i64> = (0..n).map(|j| u[j][k]).collect();
                        g.element(&c)
                    })
                    .collect();
                Self::from_galois(g.field.clone(), cols, g.signs.clone(), self.provenance)?
            }
            None => {
                let basis = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|k| {
                                (0..n).fold(Scalar::zero(), |acc, j| {
                                    &acc + &(&self.basis[i][j] * &Scalar::int(u[j][k]))
                                })
                            })
                            .collect()
                    })
                    .collect();
                Self::from_basis(basis, self.provenance)?
            }
        };
        out.seed = self.seed;
        Ok(out)
    }

    pub fn coordinate(&self, c: &[i64], i: usize) -> Scalar {
        self.basis[i]
            .iter()
            .zip(c)
            .filter(|(_, &cj)| cj != 0)
            .fold(Scalar::zero(), |acc, (b, &cj)| &acc + &(b * &Scalar::int(cj)))
    }

    pub fn ambient(&self, c: &[i64]) -> Vec<Scalar> {
        (0..self.dim()).map(|i| self.coordinate(c, i)).collect()
    }

    pub fn ambient_f64(&self, c: &[i64]) -> Vec<f64> {
        self.approx
            .iter()
            .map(|row| row.iter().zip(c).map(|(b, &x)| b * x as f64).sum())
            .collect()
    }

    pub fn point(&self, c: &[i64]) -> LatticePoint {
        LatticePoint { coeffs: c.to_vec(), ambient: self.ambient(c) }
    }

    /// Exact comparison of coordinate `i` of `B c` with `bound`, filtered by
    /// floating point when the gap is large.
    pub fn cmp_coord(&self, c: &[i64], i: usize, bound: &Q, bound_f: f64) -> Ordering {
        let row = &self.approx[i];
        let mut val = -bound_f;
        let mut mag = bound_f.abs();
        for (b, &x) in row.iter().zip(c) {
            let t = b * x as f64;
            val += t;
            mag += t.abs();
        }
        let err = 1e-11 * mag + 1e-300;
        if val > err {
            Ordering::Greater
        } else if val < -err {
            Ordering::Less
        } else {
            (&self.coordinate(c, i) - &Scalar::Rational(bound.clone())).signum()
        }
    }

    pub fn coord_sign(&self, c: &[i64], i: usize) -> Ordering {
        self.cmp_coord(c, i, &Q::zero(), 0.0)
    }

    /// `x₁ ⋯ xₙ` of `B c` for the stored (unnormalized) basis.
    pub fn phi_raw(&self, c: &[i64]) -> Scalar {
        match &self.galois {
            Some(g) => {
                let norm = g.field.norm(&g.element(c));
                let sign: i64 = g.signs.iter().map(|&s| s as i64).product();
                Scalar::Rational(norm * q(sign))
            }
            None => self
                .ambient(c)
                .iter()
                .fold(Scalar::one(), |acc, x| &acc * x),
        }
    }

    /// `φ` of the point in the determinant-one normalization.
    pub fn phi(&self, c: &[i64]) -> Scalar {
        &self.phi_raw(c) / &self.scale
    }

    pub fn phi_f64(&self, c: &[i64]) -> f64 {
        self.ambient_f64(c).iter().product::<f64>() / self.scale.to_f64()
    }

    /// Coefficient-space matrix of multiplication by `unit` (field lattices).
    pub fn unit_action(&self, unit: &[Q]) -> Result<Vec<Vec<i64>>> {
        let g = self
            .galois
            .as_ref()
            .ok_or_else(|| Error::Precondition("not a field lattice".into()))?;
        let n = g.columns.len();
        // columns of C are ξ_j in the power basis
        let c: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| g.columns[j][i].clone()).collect()).collect();
        let mut out = vec![vec![0i64; n]; n];
        for j in 0..n {
            let image = g.field.mul(unit, &g.columns[j]);
            let coeffs = linalg::solve(&c, &image).ok_or(Error::DegenerateBasis)?;
            for i in 0..n {
                if !coeffs[i].is_integer() {
                    return Err(Error::Precondition("unit does not preserve the lattice".into()));
                }
                out[i][j] = i64::try_from(coeffs[i].to_integer())
                    .map_err(|_| Error::Precondition("unit action overflows".into()))?;
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------- JSON

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FieldDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minpoly: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_intervals: Option<Vec<[String; 2]>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LatticeDoc {
    pub schema: String,
    pub dim: usize,
    pub field: FieldDoc,
    /// `matrix`: rows of the basis; `galois`: generators `ξ_j` whose real
    /// embeddings (times `signs`) form the basis rows.
    pub embedding: String,
    pub basis: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<i8>>,
    pub provenance: Provenance,
    pub seed: Option<u64>,
}

fn field_doc(field: &NumberField, root: Option<usize>) -> FieldDoc {
    let kind = if field.degree() == 2 { "quadratic" } else { "cubic" };
    FieldDoc {
        kind: kind.into(),
        minpoly: Some(field.minpoly_string()),
        root,
        root_intervals: Some(
            (0..field.num_roots())
                .map(|i| {
                    let (a, b) = field.root_interval(i);
                    [format_q(a), format_q(b)]
                })
                .collect(),
        ),
    }
}

fn coeff_array(c: &[Q]) -> Value {
    Value::Array(c.iter().map(|x| Value::String(format_q(x))).collect())
}

fn parse_coeffs(v: &Value, degree: usize) -> Result<Vec<Q>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected coefficient array".into()))?;
    if arr.len() != degree {
        return Err(Error::Parse("coefficient array has wrong length".into()));
    }
    arr.iter()
        .map(|x| parse_q(x.as_str().ok_or_else(|| Error::Parse("expected \"p/q\"".into()))?))
        .collect()
}

fn load_field(doc: &FieldDoc) -> Result<Arc<NumberField>> {
    let poly = doc
        .minpoly
        .as_deref()
        .ok_or_else(|| Error::Parse("field without minpoly".into()))?;
    let field = NumberField::parse(poly)?;
    if let Some(ivs) = &doc.root_intervals {
        if ivs.len() != field.num_roots() {
            return Err(Error::Parse("root interval count mismatch".into()));
        }
        for (i, [a, b]) in ivs.iter().enumerate() {
            let (a, b) = (parse_q(a)?, parse_q(b)?);
            let (lo, hi) = field.root_interval(i);
            if a > *hi || b < *lo {
                return Err(Error::Parse(format!("root interval {i} does not match")));
            }
        }
    }
    Ok(Arc::new(field))
}

impl Lattice {
    pub fn to_doc(&self) -> LatticeDoc {
        let n = self.dim();
        let (field, embedding, basis, signs) = match &self.galois {
            Some(g) => (
                field_doc(&g.field, None),
                "galois",
                g.columns.iter().map(|c| coeff_array(c)).collect(),
                Some(g.signs.clone()),
            ),
            None => {
                let found = self.basis.iter().flatten().find_map(|s| s.field());
                match found {
                    Some((f, root)) => {
                        let rows = self
                            .basis
                            .iter()
                            .map(|row| {
                                Value::Array(
                                    row.iter()
                                        .map(|s| match s {
                                            Scalar::Rational(x) => coeff_array(&f.from_q(x.clone())),
                                            Scalar::Algebraic(a) => coeff_array(&a.coeffs),
                                        })
                                        .collect(),
                                )
                            })
                            .collect();
                        (field_doc(f, Some(root)), "matrix", rows, None)
                    }
                    None => {
                        let rows = self
                            .basis
                            .iter()
                            .map(|row| {
                                Value::Array(
                                    row.iter()
                                        .map(|s| Value::String(format_q(s.as_rational().unwrap())))
                                        .collect(),
                                )
                            })
                            .collect();
                        let fd = FieldDoc {
                            kind: "rational".into(),
                            minpoly: None,
                            root: None,
                            root_intervals: None,
                        };
                        (fd, "matrix", rows, None)
                    }
                }
            }
        };
        LatticeDoc {
            schema: LATTICE_SCHEMA.into(),
            dim: n,
            field,
            embedding: embedding.into(),
            basis,
            signs,
            provenance: self.provenance,
            seed: self.seed,
        }
    }

    pub fn from_doc(doc: &LatticeDoc) -> Result<Self> {
        if doc.schema != LATTICE_SCHEMA {
            return Err(Error::Parse(format!("unknown schema {:?}", doc.schema)));
        }
        let n = doc.dim;
        if doc.basis.len() != n {
            return Err(Error::Parse("basis size does not match dim".into()));
        }
        let lat = match (doc.field.kind.as_str(), doc.embedding.as_str()) {
            ("rational", "matrix") => {
                let rows = doc
                    .basis
                    .iter()
                    .map(|r| {
                        let r = r.as_array().ok_or_else(|| Error::Parse("expected row".into()))?;
                        if r.len() != n {
                            return Err(Error::Parse("row length does not match dim".into()));
                        }
                        r.iter()
                            .map(|x| parse_q(x.as_str().ok_or_else(|| Error::Parse("expected \"p/q\"".into()))?))
                            .collect::<Result<Vec<Q>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::from_rational_rows(&rows, doc.provenance)?
            }
            ("quadratic" | "cubic", "matrix") => {
                let field = load_field(&doc.field)?;
                let root = doc.field.root.ok_or_else(|| Error::Parse("missing root index".into()))?;
                if root >= field.num_roots() {
                    return Err(Error::Parse("root index out of range".into()));
                }
                let rows = doc
                    .basis
                    .iter()
                    .map(|r| {
                        let r = r.as_array().ok_or_else(|| Error::Parse("expected row".into()))?;
                        if r.len() != n {
                            return Err(Error::Parse("row length does not match dim".into()));
                        }
                        r.iter()
                            .map(|x| {
                                Ok(Scalar::algebraic(field.clone(), root, parse_coeffs(x, field.degree())?))
                            })
                            .collect::<Result<Vec<Scalar>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::from_basis(rows, doc.provenance)?
            }
            ("quadratic" | "cubic", "galois") => {
                let field = load_field(&doc.field)?;
                if field.degree() != n {
                    return Err(Error::Parse("field degree does not match dim".into()));
                }
                let cols = doc
                    .basis
                    .iter()
                    .map(|c| parse_coeffs(c, n))
                    .collect::<Result<Vec<_>>>()?;
                let signs = doc.signs.clone().unwrap_or_else(|| vec![1; n]);
                Self::from_galois(field, cols, signs, doc.provenance)?
            }
            (k, e) => return Err(Error::Parse(format!("unsupported field/embedding {k}/{e}"))),
        };
        Ok(lat.with_seed(doc.seed))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: LatticeDoc = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(&doc)
    }
}
