//! Logarithmic projection of a sail onto `ℝ^{n−1}` and measurements of the
//! resulting cell partition. Everything here is floating point and meant for
//! diagnostics; nothing feeds back into the exact modules.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::determinants::det_sf;
use crate::error::{Error, Result};
use crate::rational::ln_q;
use crate::sail::SailPatch;
use crate::scalar::Scalar;

/// Bits of precision used before taking logarithms.
pub const LOG_BITS: u32 = 96;
/// Shared-vertex consistency tolerance.
pub const CONSISTENCY_TOL: f64 = 1e-9;
/// Tolerance for matching translated cells.
pub const TRANSLATION_TOL: f64 = 1e-6;
/// Samples per cell edge.
pub const EDGE_SAMPLES: usize = 16;

/// `π_log(x) = (ln xᵢ − ln φ(x) / n)_{i<n}` for a point with positive coordinates.
pub fn pi_log(x: &[Scalar]) -> Result<Vec<f64>> {
    if x.iter().any(|xi| !xi.is_positive()) {
        return Err(Error::Precondition("π_log needs strictly positive coordinates".into()));
    }
    let logs: Vec<f64> = x.iter().map(|xi| ln_q(&xi.approx(LOG_BITS))).collect();
    Ok(project_logs(&logs))
}

fn project_logs(logs: &[f64]) -> Vec<f64> {
    let n = logs.len();
    let mean = logs.iter().sum::<f64>() / n as f64;
    logs[..n - 1].iter().map(|l| l - mean).collect()
}

/// `π_log` of a float point with positive coordinates.
pub fn pi_log_f64(x: &[f64]) -> Vec<f64> {
    project_logs(&x.iter().map(|v| v.ln()).collect::<Vec<_>>())
}

/// Radial projection onto the surface `φ = 1`.
pub fn pi_radial(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let phi: f64 = x.iter().product();
    let s = phi.powf(-1.0 / n);
    x.iter().map(|v| v * s).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogCell {
    pub facet: usize,
    /// Coefficient vectors of the facet's vertices, in cyclic order.
    pub coeffs: Vec<Vec<i64>>,
    /// Images of the facet vertices, aligned with `coeffs`.
    pub vertices: Vec<Vec<f64>>,
    /// Closed boundary polyline with [`EDGE_SAMPLES`] points per edge.
    pub boundary: Vec<Vec<f64>>,
    pub centroid: Vec<f64>,
    pub radius: f64,
    /// All vertices of the facet have complete stars.
    pub interior: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogProjection {
    pub cells: Vec<LogCell>,
    /// Largest disagreement between images of a vertex shared by two cells.
    pub max_shared_discrepancy: f64,
    pub shared_pairs: usize,
}

fn project_facet(patch: &SailPatch, fi: usize) -> Result<LogCell> {
    let f = &patch.facets[fi];
    let lat = &patch.lattice;
    let vertices: Vec<Vec<f64>> =
        f.vertices.iter().map(|&v| pi_log(&lat.ambient(&patch.vertices[v]))).collect::<Result<_>>()?;
    let amb: Vec<Vec<f64>> = f.vertices.iter().map(|&v| lat.ambient_f64(&patch.vertices[v])).collect();
    let k = amb.len();
    let edges = if k == 2 { 1 } else { k };
    let mut boundary = Vec::with_capacity(edges * EDGE_SAMPLES);
    for e in 0..edges {
        let (a, b) = (&amb[e], &amb[(e + 1) % k]);
        for s in 0..EDGE_SAMPLES {
            let t = s as f64 / EDGE_SAMPLES as f64;
            let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect();
            boundary.push(if s == 0 { vertices[e].clone() } else { pi_log_f64(&p) });
        }
    }
    if k == 2 {
        boundary.push(vertices[1].clone());
    }
    let dim = vertices[0].len();
    let centroid: Vec<f64> =
        (0..dim).map(|j| boundary.iter().map(|p| p[j]).sum::<f64>() / boundary.len() as f64).collect();
    let radius = boundary.iter().map(|p| dist(p, &centroid)).fold(0.0, f64::max);
    let coeffs: Vec<Vec<i64>> = f.vertices.iter().map(|&v| patch.vertices[v].clone()).collect();
    Ok(LogCell {
        facet: fi,
        coeffs,
        vertices,
        boundary,
        centroid,
        radius,
        interior: f.vertices.iter().all(|&v| patch.star_complete[v]),
    })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// One cell per certified facet.
pub fn project_patch(patch: &SailPatch) -> Result<LogProjection> {
    let ids: Vec<usize> = patch.certified_facets().map(|(i, _)| i).collect();
    let cells: Vec<LogCell> = ids.par_iter().map(|&i| project_facet(patch, i)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for (a, ca) in cells.iter().enumerate() {
        for cb in &cells[a + 1..] {
            for (ia, c) in ca.coeffs.iter().enumerate() {
                if let Some(ib) = cb.coeffs.iter().position(|d| d == c) {
                    worst = worst.max(dist(&ca.vertices[ia], &cb.vertices[ib]));
                    pairs += 1;
                }
            }
        }
    }
    Ok(LogProjection { cells, max_shared_discrepancy: worst, shared_pairs: pairs })
}

fn point_in_cell(p: &[f64], cell: &LogCell) -> bool {
    match p.len() {
        1 => {
            let (lo, hi) = cell.boundary.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), q| (a.min(q[0]), b.max(q[0])));
            p[0] >= lo && p[0] <= hi
        }
        _ => {
            let poly = &cell.boundary;
            let mut inside = false;
            let mut j = poly.len() - 1;
            for i in 0..poly.len() {
                let (a, b) = (&poly[i], &poly[j]);
                if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0] {
                    inside = !inside;
                }
                j = i;
            }
            inside
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub interior_cells: usize,
    pub max_cell_radius: f64,
    /// `D′ = 2 · max radius`.
    pub covering_radius_estimate: f64,
    pub grid_centers: usize,
    /// Every grid ball of radius `D′` contains a whole cell.
    pub grid_ok: bool,
}

/// Maximal interior circumradius and the covering estimate `D′`, checked on
/// a grid of centers inside the interior cells.
pub fn cell_covering_radius(cells: &[LogCell]) -> Result<CoverReport> {
    let interior: Vec<&LogCell> = cells.iter().filter(|c| c.interior).collect();
    if interior.is_empty() {
        return Err(Error::NoInteriorCells);
    }
    let r = interior.iter().map(|c| c.radius).fold(0.0, f64::max);
    let dprime = 2.0 * r;
    let dim = interior[0].centroid.len();
    let pitch = (r / 4.0).max(1e-6);
    let (mut lo, mut hi) = (vec![f64::INFINITY; dim], vec![f64::NEG_INFINITY; dim]);
    for c in &interior {
        for p in &c.boundary {
            for j in 0..dim {
                lo[j] = lo[j].min(p[j]);
                hi[j] = hi[j].max(p[j]);
            }
        }
    }
    let steps: Vec<usize> = (0..dim).map(|j| ((hi[j] - lo[j]) / pitch).ceil() as usize + 1).collect();
    let total: usize = steps.iter().product();
    let mut centers = 0;
    let mut ok = true;
    for idx in 0..total.min(1 << 20) {
        let mut rem = idx;
        let p: Vec<f64> = (0..dim)
            .map(|j| {
                let k = rem % steps[j];
                rem /= steps[j];
                lo[j] + k as f64 * pitch
            })
            .collect();
        if !interior.iter().any(|c| point_in_cell(&p, c)) {
            continue;
        }
        centers += 1;
        let covered = interior
            .iter()
            .any(|c| c.boundary.iter().all(|q| dist(q, &p) <= dprime + CONSISTENCY_TOL));
        ok &= covered;
    }
    Ok(CoverReport {
        interior_cells: interior.len(),
        max_cell_radius: r,
        covering_radius_estimate: dprime,
        grid_centers: centers,
        grid_ok: ok,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiBoundsReport {
    pub min_vertex_phi: String,
    pub min_vertex_phi_approx: f64,
    pub max_sample_phi_approx: f64,
    pub max_det_sf_approx: f64,
    pub samples: usize,
    /// `φ(x) < det S(F)` at every sample of every certified facet.
    pub samples_below_det_sf: bool,
}

/// Exact `φ` at sampled rational points of the certified facets, compared
/// against `det S(F)`, plus the minimum of `φ` over certified vertices.
pub fn check_phi_bounds(patch: &SailPatch) -> Result<PhiBoundsReport> {
    let lat = &patch.lattice;
    let n = patch.dim();
    let mut min_v: Option<Scalar> = None;
    for (v, c) in patch.vertices.iter().enumerate() {
        if patch.vertex_certified[v] {
            let p = lat.phi(c);
            if min_v.as_ref().map_or(true, |m| p < *m) {
                min_v = Some(p);
            }
        }
    }
    let min_v = min_v.ok_or(Error::EmptyPatch)?;
    let rows: Vec<(usize, bool, f64, f64)> = patch
        .certified_facets()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(_, f)| {
            let sf = det_sf(lat, &f.normal, f.intdist)?;
            let verts = patch.vertex_coeffs(f);
            let k = verts.len();
            let mut weights: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
            weights.push(vec![1; k]);
            for i in 0..k {
                weights.push((0..k).map(|j| if j == i { 3 } else { 1 }).collect());
            }
            let mut ok = true;
            let mut max_phi = f64::NEG_INFINITY;
            for wgt in &weights {
                let m: i64 = wgt.iter().sum();
                let c: Vec<i64> = (0..n).map(|i| verts.iter().zip(wgt).map(|(v, w)| v[i] * w).sum()).collect();
                let scale = Scalar::Rational(crate::rational::Q::from_integer(BigInt::from(m).pow(n as u32)));
                let phi = &lat.phi(&c) / &scale;
                ok &= phi.cmp(&sf) == Ordering::Less;
                max_phi = max_phi.max(phi.to_f64());
            }
            Ok((weights.len(), ok, max_phi, sf.to_f64()))
        })
        .collect::<Result<_>>()?;
    Ok(PhiBoundsReport {
        min_vertex_phi: min_v.to_string(),
        min_vertex_phi_approx: min_v.to_f64(),
        max_sample_phi_approx: rows.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max),
        max_det_sf_approx: rows.iter().map(|r| r.3).fold(f64::NEG_INFINITY, f64::max),
        samples: rows.iter().map(|r| r.0).sum(),
        samples_below_det_sf: rows.iter().all(|r| r.1),
    })
}

/// Common translation taking the cells of `a` onto the matching cells of
/// `b` (matched by coefficient vertex sets), if one exists within tolerance.
pub fn translation_between(a: &[LogCell], b: &[LogCell]) -> Option<(Vec<f64>, usize)> {
    let key = |c: &LogCell| {
        let mut k = c.coeffs.clone();
        k.sort();
        k
    };
    let mut shift: Option<Vec<f64>> = None;
    let mut matched = 0;
    for ca in a {
        let ka = key(ca);
        let Some(cb) = b.iter().find(|c| key(c) == ka) else { continue };
        for (c, pa) in ca.coeffs.iter().zip(&ca.vertices) {
            let j = cb.coeffs.iter().position(|d| d == c)?;
            let d: Vec<f64> = cb.vertices[j].iter().zip(pa).map(|(x, y)| x - y).collect();
            match &shift {
                None => shift = Some(d),
                Some(s) if dist(s, &d) > TRANSLATION_TOL => return None,
                Some(_) => {}
            }
        }
        matched += 1;
    }
    shift.map(|s| (s, matched))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogSummary {
    pub cells: usize,
    pub max_cell_radius: f64,
    pub covering_radius_estimate: Option<f64>,
    pub min_vertex_phi: String,
    pub max_sample_phi: f64,
    pub max_shared_discrepancy: f64,
    pub consistency_tolerance: f64,
    pub translation_tolerance: f64,
    pub edge_samples: usize,
}

impl LogProjection {
    /// `cell,facet,vertex,coordinates…`
    pub fn to_csv(&self) -> String {
        let mut s = String::from("cell,facet,vertex,coords\n");
        for (i, c) in self.cells.iter().enumerate() {
            for (j, p) in c.vertices.iter().enumerate() {
                let coords: Vec<String> = p.iter().map(|x| format!("{x:.12e}")).collect();
                let _ = writeln!(s, "{i},{},{j},{}", c.facet, coords.join(";"));
            }
        }
        s
    }

    pub fn summary(&self, phi: &PhiBoundsReport) -> LogSummary {
        LogSummary {
            cells: self.cells.len(),
            max_cell_radius: self.cells.iter().map(|c| c.radius).fold(0.0, f64::max),
            covering_radius_estimate: cell_covering_radius(&self.cells).ok().map(|r| r.covering_radius_estimate),
            min_vertex_phi: phi.min_vertex_phi.clone(),
            max_sample_phi: phi.max_sample_phi_approx,
            max_shared_discrepancy: self.max_shared_discrepancy,
            consistency_tolerance: CONSISTENCY_TOL,
            translation_tolerance: TRANSLATION_TOL,
            edge_samples: EDGE_SAMPLES,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::rational::{q, qf};
    use crate::sail::{build_sail_patch, SailOptions};

    #[test]
    fn projection_basics() {
        let one = vec![Scalar::one(); 3];
        assert!(pi_log(&one).unwrap().iter().all(|v| v.abs() < 1e-15));
        let x = [std::f64::consts::E, 1.0 / std::f64::consts::E];
        assert!((pi_log_f64(&x)[0] - 1.0).abs() < 1e-12);
        let a = [Scalar::Rational(qf(3, 7)), Scalar::Rational(qf(11, 2))];
        let b: Vec<Scalar> = a.iter().map(|v| v * &Scalar::Rational(q(5))).collect();
        assert!((pi_log(&a).unwrap()[0] - pi_log(&b).unwrap()[0]).abs() < 1e-14);
        assert!(pi_log(&[Scalar::one(), Scalar::zero()]).is_err());
        let r = pi_radial(&[2.0, 3.0, 0.25]);
        assert!((r.iter().product::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_cells_and_phi() {
        let lat = Lattice::from_cubic_field("x^3 + x^2 - 2x - 1").unwrap();
        let patch = build_sail_patch(&lat, &q(40), &SailOptions::default()).unwrap();
        let proj = project_patch(&patch).unwrap();
        assert_eq!(proj.cells.len(), patch.certified_facets().count());
        assert!(proj.max_shared_discrepancy < CONSISTENCY_TOL);
        let cover = cell_covering_radius(&proj.cells).unwrap();
        assert!(cover.grid_ok);
        let phi = check_phi_bounds(&patch).unwrap();
        assert_eq!(phi.min_vertex_phi, "1/7");
        assert!(phi.samples_below_det_sf);
    }
}
