//! Determinant invariants of facets and edge stars, and the two-dimensional
//! correspondence between Klein polygons and continued fractions.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{self, gcd_slice, int_det, primitive};
use crate::rational::Q;
use crate::sail::{build_sail_patch, EdgeStar, Facet, SailOptions, SailPatch};
use crate::scalar::Scalar;

/// Largest vector count accepted by subset-determinant sums.
pub const SUBSET_CAP: usize = 24;

fn subsets(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..=m - (k - cur.len()) {
            cur.push(i);
            go(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    if k <= m {
        go(0, m, k, &mut Vec::with_capacity(k), &mut f);
    }
}

fn check_count(m: usize, n: usize) -> Result<()> {
    if m < n {
        return Err(Error::TooFewVectors { needed: n, got: m });
    }
    if m > SUBSET_CAP {
        return Err(Error::TooManyVectors { cap: SUBSET_CAP, got: m });
    }
    Ok(())
}

/// `Σ |det(v_{i₁}, …, v_{iₙ})|` over all `n`-subsets of integer vectors.
pub fn subset_det_sum(vectors: &[Vec<i64>]) -> Result<BigInt> {
    let n = vectors.first().map_or(0, Vec::len);
    check_count(vectors.len(), n.max(1))?;
    let mut sum = BigInt::zero();
    subsets(vectors.len(), n, |idx| {
        let rows: Vec<Vec<i64>> = idx.iter().map(|&i| vectors[i].clone()).collect();
        sum += int_det(&rows).abs();
    });
    Ok(sum)
}

/// Determinant of a face given by its vertex coefficient vectors.
pub fn det_facet_coeffs(vertices: &[Vec<i64>]) -> Result<BigInt> {
    subset_det_sum(vertices)
}

/// `det F` of a certified facet of a patch.
pub fn det_facet(patch: &SailPatch, facet: &Facet) -> Result<BigInt> {
    if !facet.certified {
        return Err(Error::IncompleteFace);
    }
    det_facet_coeffs(&patch.vertex_coeffs(facet))
}

/// `det St_v` of a complete edge star.
pub fn det_edge_star(star: &EdgeStar) -> Result<BigInt> {
    if !star.complete {
        return Err(Error::IncompleteStar);
    }
    subset_det_sum(&star.vectors)
}

/// Mixed volume of the segments `[0, xᵢ]`, equal to the volume of their
/// Minkowski sum.
pub fn mixed_volume_segments(xs: &[Vec<Scalar>]) -> Result<Scalar> {
    let n = xs.first().map_or(0, Vec::len);
    if xs.len() < n {
        return Err(Error::TooFewVectors { needed: n, got: xs.len() });
    }
    let mut sum = Scalar::zero();
    subsets(xs.len(), n, |idx| {
        let rows: Vec<Vec<Scalar>> = idx.iter().map(|&i| xs[i].clone()).collect();
        sum = &sum + &linalg::det(&rows).abs();
    });
    Ok(sum)
}

/// `det S(F)` for the section of the facet hyperplane `⟨w, c⟩ = D` by the
/// positive orthant: `Dⁿ / φ(u)` where `u` is the ambient functional of `w`
/// in the determinant-one normalization.
pub fn det_sf(lat: &Lattice, w: &[i64], d: i64) -> Result<Scalar> {
    let dual = lat.dual();
    if (0..lat.dim()).any(|i| dual.coord_sign(w, i) != std::cmp::Ordering::Greater) {
        return Err(Error::Precondition("facet normal has a nonpositive ambient entry".into()));
    }
    if d <= 0 {
        return Err(Error::ThroughOrigin);
    }
    let dn = Scalar::Rational(Q::from_integer(BigInt::from(d).pow(lat.dim() as u32)));
    Ok(&dn / &dual.phi(w))
}

/// Number of lattice steps along the segment `[a, b]`.
pub fn integer_length(a: &[i64], b: &[i64]) -> Result<i64> {
    let diff: Vec<i64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    match gcd_slice(&diff) {
        0 => Err(Error::ZeroSegment),
        g => Ok(g),
    }
}

/// Index of the sublattice spanned by the primitive directions of two edges.
pub fn integer_angle(r1: &[i64], r2: &[i64]) -> Result<i64> {
    if r1.iter().all(|&x| x == 0) || r2.iter().all(|&x| x == 0) {
        return Err(Error::ZeroSegment);
    }
    let (p1, p2) = (primitive(r1).0, primitive(r2).0);
    let d = int_det(&[p1, p2]).abs();
    if d.is_zero() {
        return Err(Error::ParallelEdges);
    }
    i64::try_from(d).map_err(|_| Error::Precondition("angle overflow".into()))
}

/// Partial quotients `[a₀; a₁, …]`, at most `max_terms` of them.
pub fn continued_fraction(alpha: &Scalar, max_terms: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut x = alpha.clone();
    while out.len() < max_terms {
        let a = x.floor();
        let frac = &x - &Scalar::Rational(Q::from_integer(a.clone()));
        out.push(a);
        if frac.is_zero() {
            break;
        }
        x = frac.recip();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfMatch {
    /// Index `k` of the partial quotient `a_k`.
    pub index: usize,
    pub expected: String,
    pub observed: i64,
    /// `"length"` for edges (odd `k`), `"angle"` for vertices (even `k`).
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfReport {
    pub quotients: Vec<String>,
    pub aligned: Vec<CfMatch>,
    pub all_match: bool,
}

/// Walks the certified part of the `Λ_α` sail from its leftmost vertex and
/// compares edge lengths and vertex angles with the partial quotients.
pub fn cf_correspondence(alpha: &Scalar, t: &Q, opts: &SailOptions) -> Result<CfReport> {
    let lat = Lattice::alpha_sail_lattice(alpha)?;
    let patch = build_sail_patch(&lat, t, opts)?;
    let cf = continued_fraction(alpha, 96);
    let observed = walk_polygon(&patch);
    let aligned: Vec<CfMatch> = observed
        .iter()
        .enumerate()
        .take_while(|(k, _)| k + 1 < cf.len())
        .map(|(k, &(obs, kind))| CfMatch {
            index: k + 1,
            expected: cf[k + 1].to_string(),
            observed: obs,
            kind: kind.into(),
        })
        .collect();
    if aligned.len() < 3 {
        return Err(Error::WindowTooSmall(format!(
            "only {} partial quotients readable in the window",
            aligned.len()
        )));
    }
    let all_match = aligned.iter().all(|m| m.expected == m.observed.to_string());
    Ok(CfReport { quotients: cf.iter().map(|a| a.to_string()).collect(), aligned, all_match })
}

/// Alternating edge lengths and vertex angles of a 2D patch, from the vertex
/// with the smallest first coordinate, until the first uncertified edge or
/// incomplete vertex star.
pub fn walk_polygon(patch: &SailPatch) -> Vec<(i64, &'static str)> {
    let mut out = Vec::new();
    if patch.dim() != 2 || patch.vertices.is_empty() {
        return out;
    }
    let x1 = |v: usize| patch.lattice.ambient_f64(&patch.vertices[v])[0];
    let mut order: Vec<usize> = (0..patch.vertices.len()).collect();
    order.sort_by(|&a, &b| x1(a).total_cmp(&x1(b)));
    let next_edge = |v: usize| {
        patch.edges.iter().find_map(|&(a, b)| {
            let other = if a == v { b } else if b == v { a } else { return None };
            (x1(other) > x1(v)).then_some(other)
        })
    };
    let mut v = order[0];
    let mut prev: Option<usize> = None;
    while let Some(w) = next_edge(v) {
        if let Some(p) = prev {
            if !patch.star_complete[v] {
                break;
            }
            let r1: Vec<i64> = patch.vertices[p].iter().zip(&patch.vertices[v]).map(|(a, b)| a - b).collect();
            let r2: Vec<i64> = patch.vertices[w].iter().zip(&patch.vertices[v]).map(|(a, b)| a - b).collect();
            match integer_angle(&r1, &r2) {
                Ok(a) => out.push((a, "angle")),
                Err(_) => break,
            }
        }
        match integer_length(&patch.vertices[v], &patch.vertices[w]) {
            Ok(l) => out.push((l, "length")),
            Err(_) => break,
        }
        prev = Some(v);
        v = w;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetDet {
    pub facet: usize,
    pub det: String,
    pub intdist: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarDet {
    pub vertex: usize,
    pub det: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetReport {
    pub facets: Vec<FacetDet>,
    pub stars: Vec<StarDet>,
    pub max_facet_det: Option<String>,
    pub max_star_det: Option<String>,
    /// Occurrences of each facet determinant.
    pub facet_histogram: BTreeMap<String, usize>,
    pub star_histogram: BTreeMap<String, usize>,
}

impl DetReport {
    pub fn from_patch(patch: &SailPatch) -> Result<Self> {
        let mut facets = Vec::new();
        let mut fmax: Option<BigInt> = None;
        let mut fh = BTreeMap::new();
        for (i, f) in patch.certified_facets() {
            let d = det_facet(patch, f)?;
            *fh.entry(d.to_string()).or_insert(0) += 1;
            fmax = Some(fmax.map_or(d.clone(), |m: BigInt| m.max(d.clone())));
            facets.push(FacetDet { facet: i, det: d.to_string(), intdist: f.intdist });
        }
        let mut stars = Vec::new();
        let mut smax: Option<BigInt> = None;
        let mut sh = BTreeMap::new();
        for v in 0..patch.vertices.len() {
            let Ok(star) = patch.edge_star(v) else { continue };
            if !star.complete {
                continue;
            }
            let d = det_edge_star(&star)?;
            *sh.entry(d.to_string()).or_insert(0) += 1;
            smax = Some(smax.map_or(d.clone(), |m: BigInt| m.max(d.clone())));
            stars.push(StarDet { vertex: v, det: d.to_string() });
        }
        Ok(DetReport {
            facets,
            stars,
            max_facet_det: fmax.map(|d| d.to_string()),
            max_star_det: smax.map(|d| d.to_string()),
            facet_histogram: fh,
            star_histogram: sh,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// One row per facet and per complete star: `kind,index,det`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,index,det\n");
        for f in &self.facets {
            let _ = writeln!(s, "facet,{},{}", f.facet, f.det);
        }
        for v in &self.stars {
            let _ = writeln!(s, "star,{},{}", v.vertex, v.det);
        }
        s
    }
}

/// Largest certified facet determinant, if any.
pub fn max_facet_det(patch: &SailPatch) -> Option<BigInt> {
    patch
        .certified_facets()
        .filter_map(|(_, f)| det_facet(patch, f).ok())
        .max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};
    use num_traits::One;
    use crate::scalar::NumberField;
    use std::sync::Arc;

    #[test]
    fn subset_sums() {
        let e = |v: &[i64]| v.to_vec();
        assert_eq!(det_facet_coeffs(&[e(&[1, 0, 0]), e(&[0, 1, 0]), e(&[0, 0, 1])]).unwrap(), BigInt::one());
        assert_eq!(det_facet_coeffs(&[e(&[1, 0]), e(&[-1, 1])]).unwrap(), BigInt::one());
        let star = EdgeStar {
            center: 0,
            vectors: vec![e(&[1, 0, 0]), e(&[0, 1, 0]), e(&[0, 0, 1]), e(&[1, 1, 1])],
            complete: true,
        };
        assert_eq!(det_edge_star(&star).unwrap(), BigInt::from(4));
        let cut = EdgeStar { complete: false, ..star };
        assert_eq!(det_edge_star(&cut), Err(Error::IncompleteStar));
        assert!(matches!(det_facet_coeffs(&[e(&[1, 0, 0])]), Err(Error::TooFewVectors { .. })));
    }

    #[test]
    fn mixed_volumes() {
        let s = |v: &[i64]| v.iter().map(|&x| Scalar::int(x)).collect::<Vec<_>>();
        assert_eq!(mixed_volume_segments(&[s(&[1, 0]), s(&[0, 1]), s(&[1, 1])]).unwrap(), Scalar::int(3));
        assert_eq!(mixed_volume_segments(&[s(&[1, 0]), s(&[0, 1])]).unwrap(), Scalar::int(1));
    }

    #[test]
    fn lengths_and_angles() {
        assert_eq!(integer_length(&[0, 0], &[2, 0]).unwrap(), 2);
        assert_eq!(integer_length(&[0, 0], &[3, 6]).unwrap(), 3);
        assert_eq!(integer_length(&[1, 1], &[1, 1]), Err(Error::ZeroSegment));
        assert_eq!(integer_angle(&[1, 0], &[0, 1]).unwrap(), 1);
        assert_eq!(integer_angle(&[1, 0], &[1, 2]).unwrap(), 2);
        assert_eq!(integer_angle(&[1, 0], &[-2, 0]), Err(Error::ParallelEdges));
    }

    #[test]
    fn continued_fractions() {
        let cf = continued_fraction(&Scalar::Rational(qf(7, 16)), 10);
        assert_eq!(cf, vec![0, 2, 3, 2].into_iter().map(BigInt::from).collect::<Vec<_>>());
        let f = Arc::new(NumberField::parse("x^2 + 2x - 1").unwrap());
        let s = Scalar::generator(&f, 1);
        let cf = continued_fraction(&s, 8);
        assert_eq!(cf[0], BigInt::zero());
        assert!(cf[1..].iter().all(|a| *a == BigInt::from(2)));
    }

    #[test]
    fn simplex_section() {
        assert_eq!(det_sf(&Lattice::identity(3), &[1, 1, 1], 1).unwrap(), Scalar::int(1));
        assert_eq!(det_sf(&Lattice::identity(2), &[1, 2], 2).unwrap(), Scalar::int(2));
        assert!(det_sf(&Lattice::identity(2), &[1, 0], 1).is_err());
    }

    #[test]
    fn seven_sixteenths_walk() {
        let r = cf_correspondence(&Scalar::Rational(qf(7, 16)), &q(40), &SailOptions::default()).unwrap();
        let obs: Vec<i64> = r.aligned.iter().map(|m| m.observed).collect();
        assert_eq!(obs, vec![2, 3, 2]);
        assert!(r.all_match);
    }
}
