//! Norm-minimum estimates over windows, the `T₀` box comparison, and an
//! audit setting determinant maxima over all orthants against the norm
//! minimum.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::determinants::{det_edge_star, det_facet};
use crate::enumerate::{box_points, enumerate, Polytope, Step};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::rational::{format_q, Q};
use crate::report::Verdict;
use crate::sail::{build_sail_patch, SailOptions, SailPatch};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormEstimate {
    /// `min |φ(x)|` over nonzero lattice points of `Q(T)`.
    pub value: Scalar,
    pub witness: Vec<i64>,
    pub points: usize,
}

/// Exact minimum of `|φ|` over the nonzero lattice points of the open cube
/// `max |xᵢ| < T`. Candidates are shortlisted in floating point and decided
/// exactly.
pub fn norm_minimum_estimate(lat: &Lattice, t: &Q, budget: usize) -> Result<NormEstimate> {
    let pts = box_points(lat, t, budget)?;
    if pts.is_empty() {
        return Err(Error::WindowTooSmall("no lattice points in the window".into()));
    }
    let approx: Vec<f64> = pts.iter().map(|c| lat.phi_f64(c).abs()).collect();
    let best = approx.iter().cloned().fold(f64::INFINITY, f64::min);
    let cutoff = best * (1.0 + 1e-6) + 1e-12;
    let mut min: Option<(Scalar, &Vec<i64>)> = None;
    for (c, &a) in pts.iter().zip(&approx) {
        if a > cutoff {
            continue;
        }
        let p = lat.phi(c).abs();
        if min.as_ref().map_or(true, |(m, _)| p < *m) {
            min = Some((p, c));
        }
    }
    let (value, witness) = min.expect("nonempty shortlist");
    Ok(NormEstimate { value, witness: witness.clone(), points: pts.len() })
}

/// Minimum of `φ` over the certified vertices of a patch.
pub fn vertex_phi_inf(patch: &SailPatch) -> Result<Scalar> {
    (0..patch.vertices.len())
        .filter(|&v| patch.vertex_certified[v])
        .map(|v| patch.lattice.phi(&patch.vertices[v]))
        .min()
        .ok_or(Error::EmptyPatch)
}

/// Compares `T` with `T₀ = n^{−1/2} (det F)^{1/n}` through
/// `T^{2n} nⁿ` versus `(det F)²`.
pub fn t0_compare(t: &Q, det_f: &BigInt, n: usize) -> Ordering {
    let lhs = t.abs().pow(2 * n as i32) * Q::from_integer(BigInt::from(n).pow(n as u32));
    let rhs = Q::from_integer(det_f * det_f);
    lhs.cmp(&rhs)
}

/// Box claim for one facet, in the hyperbolically rotated frame where the
/// facet's normal is parallel to the orthant bisector: no nonzero lattice
/// point of the orthant has every rotated coordinate `uᵢ xᵢ / λ` below `T₀`,
/// where `λⁿ = φ(u)`. Returns the offending coefficient vectors.
pub fn box_property_witnesses(
    lat: &Lattice,
    w: &[i64],
    det_f: &BigInt,
    budget: usize,
) -> Result<Vec<Vec<i64>>> {
    let n = lat.dim();
    let dual = lat.dual();
    let u: Vec<Scalar> = dual.ambient(w);
    if u.iter().any(|x| !x.is_positive()) {
        return Err(Error::Precondition("facet normal has a nonpositive ambient entry".into()));
    }
    // (uᵢ xᵢ)^{2n} nⁿ < (det F)² φ(u)² (s s*)², all in raw coordinates
    let ss = lat.scale() * dual.scale();
    let phi_u = dual.phi(w);
    let rhs = &(&Scalar::Rational(Q::from_integer(det_f * det_f)) * &(&phi_u * &phi_u)) * &(&ss * &ss);
    let nn = Scalar::Rational(Q::from_integer(BigInt::from(n).pow(n as u32)));
    let bound_f = (rhs.to_f64() / nn.to_f64()).powf(1.0 / (2.0 * n as f64));
    let hi: Vec<Option<f64>> = u.iter().map(|ui| Some(bound_f / ui.to_f64() * (1.0 + 1e-9))).collect();
    let poly = Polytope::lattice_box(lat, &vec![Some(0.0); n], &hi);
    let order: Vec<usize> = (0..n).collect();
    enumerate(&poly, &order, budget, |c| {
        if (0..n).any(|i| lat.coord_sign(c, i) != Ordering::Greater) {
            return Step::Skip;
        }
        let inside = (0..n).all(|i| {
            let p = &u[i] * &lat.coordinate(c, i);
            &p.pow(2 * n as u32) * &nn < rhs
        });
        if inside {
            Step::Take
        } else {
            Step::Skip
        }
    })
}

/// Box claim over every certified facet of a patch.
pub fn check_box_property(patch: &SailPatch, budget: usize) -> Verdict {
    let mut out = Verdict::default();
    for (i, f) in patch.certified_facets() {
        let Ok(d) = det_facet(patch, f) else {
            out.skip();
            continue;
        };
        match box_property_witnesses(&patch.lattice, &f.normal, &d, budget) {
            Ok(w) => out.record(w.is_empty(), || format!("facet {i} (det {d}): points {w:?}")),
            Err(_) => out.skip(),
        }
    }
    out
}

/// Sign vectors of the orthants up to central symmetry (first sign `+1`).
pub fn orthant_representatives(n: usize) -> Vec<Vec<i8>> {
    (0..1usize << (n - 1))
        .map(|m| {
            std::iter::once(1)
                .chain((0..n - 1).map(|k| if m >> k & 1 == 1 { -1 } else { 1 }))
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthantAudit {
    pub signs: Vec<i8>,
    pub max_facet_det: Option<String>,
    pub max_star_det: Option<String>,
    pub facets: usize,
    pub certified_facets: usize,
    pub vertices: usize,
    pub complete_vertices: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub window: String,
    pub orthants: Vec<OrthantAudit>,
    /// Largest certified facet determinant over all orthants.
    pub max_facet_det: Option<String>,
    /// Positive orthant only.
    pub positive_max_facet_det: Option<String>,
    pub positive_max_star_det: Option<String>,
    pub norm_minimum_estimate: String,
    pub norm_minimum_approx: f64,
    pub vertex_phi_inf: Option<String>,
    pub note: String,
}

fn max_big(xs: impl Iterator<Item = BigInt>) -> Option<BigInt> {
    xs.max()
}

fn audit_orthant(lat: &Lattice, signs: &[i8], t: &Q, opts: &SailOptions) -> Result<(OrthantAudit, SailPatch)> {
    let refl = lat.orthant_reflect(signs);
    let patch = build_sail_patch(&refl, t, opts)?;
    let fmax = max_big(patch.certified_facets().filter_map(|(_, f)| det_facet(&patch, f).ok()));
    let smax = max_big(
        (0..patch.vertices.len())
            .filter_map(|v| patch.edge_star(v).ok())
            .filter(|s| s.complete)
            .filter_map(|s| det_edge_star(&s).ok()),
    );
    let audit = OrthantAudit {
        signs: signs.to_vec(),
        max_facet_det: fmax.map(|d| d.to_string()),
        max_star_det: smax.map(|d| d.to_string()),
        facets: patch.facets.len(),
        certified_facets: patch.certified_facets().count(),
        vertices: patch.vertices.len(),
        complete_vertices: patch.star_complete.iter().filter(|&&c| c).count(),
    };
    Ok((audit, patch))
}

/// Sails of all orthants up to central symmetry, with determinant maxima and
/// the norm-minimum estimate on the same window.
pub fn orthant_audit(lat: &Lattice, t: &Q, opts: &SailOptions) -> Result<AuditReport> {
    let reps = orthant_representatives(lat.dim());
    let results: Vec<(OrthantAudit, SailPatch)> =
        reps.par_iter().map(|s| audit_orthant(lat, s, t, opts)).collect::<Result<_>>()?;
    let parse = |s: &Option<String>| s.as_ref().map(|x| x.parse::<BigInt>().expect("integer"));
    let max_all = results.iter().filter_map(|(a, _)| parse(&a.max_facet_det)).max();
    let (pos, pos_patch) = &results[0];
    let norm = norm_minimum_estimate(lat, t, opts.budget)?;
    Ok(AuditReport {
        window: format_q(t),
        orthants: results.iter().map(|(a, _)| a.clone()).collect(),
        max_facet_det: max_all.map(|d| d.to_string()),
        positive_max_facet_det: pos.max_facet_det.clone(),
        positive_max_star_det: pos.max_star_det.clone(),
        norm_minimum_estimate: norm.value.to_string(),
        norm_minimum_approx: norm.value.to_f64(),
        vertex_phi_inf: vertex_phi_inf(pos_patch).ok().map(|v| v.to_string()),
        note: "orthants are identified with their negatives; the estimate is an upper bound on the norm minimum".into(),
    })
}

impl AuditReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Determinant maxima, for comparing two windows.
    pub fn maxima(&self) -> (Option<String>, Option<String>, Option<String>) {
        (self.max_facet_det.clone(), self.positive_max_facet_det.clone(), self.positive_max_star_det.clone())
    }
}

/// `T₀ⁿ` as an exact rational power is generally irrational; this is `T₀`
/// to double precision, for reports only.
pub fn t0_approx(det_f: &BigInt, n: usize) -> f64 {
    let d: f64 = det_f.to_string().parse().unwrap_or(f64::INFINITY);
    d.powf(1.0 / n as f64) / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    #[test]
    fn t0_examples() {
        assert_eq!(t0_compare(&q(1), &BigInt::from(1), 2), Ordering::Greater);
        assert_eq!(t0_compare(&q(2), &BigInt::from(8), 2), Ordering::Equal);
        assert_eq!(t0_compare(&qf(1, 2), &BigInt::from(1), 2), Ordering::Less);
        assert!((t0_approx(&BigInt::from(8), 2) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn orthant_sets() {
        assert_eq!(orthant_representatives(2), vec![vec![1, 1], vec![1, -1]]);
        assert_eq!(orthant_representatives(3).len(), 4);
    }

    #[test]
    fn identity_norm_is_zero() {
        let e = norm_minimum_estimate(&Lattice::identity(2), &q(3), 10_000).unwrap();
        assert_eq!(e.value, Scalar::zero());
    }

    #[test]
    fn cubic_norm_minimum() {
        let lat = Lattice::from_cubic_field("x^3 + x^2 - 2x - 1").unwrap();
        let e = norm_minimum_estimate(&lat, &q(10), 1_000_000).unwrap();
        assert_eq!(e.value, Scalar::Rational(qf(1, 7)));
        let patch = build_sail_patch(&lat, &q(20), &SailOptions::default()).unwrap();
        assert_eq!(vertex_phi_inf(&patch).unwrap(), Scalar::Rational(qf(1, 7)));
    }
}
