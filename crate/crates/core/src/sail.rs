//! Certified finite patches of the Klein polyhedron of the positive orthant.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::{default_budget, enumerate, Polytope, Step};
use crate::error::{Error, Result};
use crate::hull::hull;
use crate::lattice::{Lattice, LatticeDoc};
use crate::linalg::{self, dot_i, integer_normal, primitive};
use crate::rational::{format_q, parse_q, to_f64, Q};

pub const PATCH_SCHEMA: &str = "klein.patch/1";

#[derive(Clone, Debug)]
pub struct SailOptions {
    pub budget: usize,
    /// Abort when the window contains lattice points on coordinate hyperplanes.
    pub require_irrational: bool,
}

impl Default for SailOptions {
    fn default() -> Self {
        SailOptions { budget: default_budget(), require_irrational: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    /// Indices into [`SailPatch::vertices`], in cyclic order.
    pub vertices: Vec<usize>,
    /// Primitive integer functional `w` on coefficient space.
    pub normal: Vec<i64>,
    /// Integer distance `D = ⟨w, c⟩` on the facet.
    pub intdist: i64,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeStar {
    pub center: usize,
    /// Primitive coefficient vectors of the sail edges at the center.
    pub vectors: Vec<Vec<i64>>,
    pub complete: bool,
}

#[derive(Clone, Debug)]
pub struct SailPatch {
    pub lattice: Lattice,
    pub window: Q,
    /// Coefficient vectors, sorted lexicographically.
    pub vertices: Vec<Vec<i64>>,
    /// Hull facets with strictly positive normal, certified or not.
    pub facets: Vec<Facet>,
    /// Sail edges (vertex index pairs, smaller index first) of certified facets.
    pub edges: Vec<(usize, usize)>,
    pub vertex_certified: Vec<bool>,
    /// Every window-hull facet through the vertex is certified.
    pub star_complete: Vec<bool>,
    /// Facets (indices into `facets`) containing each vertex.
    pub vertex_facets: Vec<Vec<usize>>,
}

/// Result of scanning the window for points on coordinate hyperplanes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrationalityVerdict {
    pub irrational_in_window: bool,
    pub witnesses: Vec<Vec<i64>>,
}

/// Nonzero lattice points of `Q(T)` with some zero coordinate.
pub fn irrationality_check(lat: &Lattice, t: &Q, budget: usize) -> Result<IrrationalityVerdict> {
    if !t.is_positive() {
        return Err(Error::NonPositiveWindow);
    }
    let n = lat.dim();
    let tf = to_f64(t);
    let mut found = BTreeSet::new();
    for i in 0..n {
        let row_norm: f64 = lat.approx_basis()[i].iter().map(|x| x.abs()).sum();
        let eta = 1e-7 * (1.0 + tf * row_norm);
        let mut lo = vec![Some(-tf); n];
        let mut hi = vec![Some(tf); n];
        lo[i] = Some(-eta);
        hi[i] = Some(eta);
        let poly = Polytope::lattice_box(lat, &lo, &hi);
        let order: Vec<usize> = (0..n).collect();
        let neg = -t.clone();
        let pts = enumerate(&poly, &order, budget, |c| {
            if c.iter().all(|&x| x == 0) || lat.coord_sign(c, i) != Ordering::Equal {
                return Step::Skip;
            }
            let inside = (0..n).all(|j| {
                lat.cmp_coord(c, j, &neg, -tf) == Ordering::Greater
                    && lat.cmp_coord(c, j, t, tf) == Ordering::Less
            });
            if inside {
                Step::Take
            } else {
                Step::Skip
            }
        })?;
        found.extend(pts);
    }
    let witnesses: Vec<Vec<i64>> = found.into_iter().collect();
    Ok(IrrationalityVerdict { irrational_in_window: witnesses.is_empty(), witnesses })
}

/// Index of a basis column with all coordinates strictly positive.
pub fn positive_column(lat: &Lattice) -> Option<usize> {
    let n = lat.dim();
    (0..n).find(|&j| {
        let mut e = vec![0i64; n];
        e[j] = 1;
        (0..n).all(|i| lat.coord_sign(&e, i) == Ordering::Greater)
    })
}

fn level_order(n: usize, last: Option<usize>) -> Vec<usize> {
    match last {
        Some(j) => (0..n).filter(|&k| k != j).chain(std::iter::once(j)).collect(),
        None => (0..n).collect(),
    }
}

/// Window points of the open orthant, keeping only the lowest point on each
/// line parallel to a strictly positive basis column (the others are
/// dominated and cannot lie on the sail).
pub fn window_candidates(lat: &Lattice, t: &Q, budget: usize) -> Result<Vec<Vec<i64>>> {
    let n = lat.dim();
    let tf = to_f64(t);
    let poly = Polytope::orthant_window(lat, t);
    let pos = positive_column(lat);
    let order = level_order(n, pos);
    let mut pts = enumerate(&poly, &order, budget, |c| {
        if (0..n).any(|i| lat.coord_sign(c, i) != Ordering::Greater) {
            return Step::Skip;
        }
        let inside = (0..n).all(|i| lat.cmp_coord(c, i, t, tf) == Ordering::Less);
        match (inside, pos.is_some()) {
            (true, true) => Step::TakeAndStop,
            (true, false) => Step::Take,
            (false, true) => Step::Stop,
            (false, false) => Step::Skip,
        }
    })?;
    pts.sort();
    Ok(pts)
}

/// Points not dominated coordinatewise by another point of the set. Close
/// calls are kept, so the result is a superset of the exact minimal set.
pub fn pareto_minimal(lat: &Lattice, pts: &[Vec<i64>], t: &Q) -> Vec<Vec<i64>> {
    let n = lat.dim();
    let tol = 1e-9 * (1.0 + to_f64(t));
    let amb: Vec<Vec<f64>> = pts.iter().map(|c| lat.ambient_f64(c)).collect();
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| amb[a][0].partial_cmp(&amb[b][0]).unwrap_or(Ordering::Equal));
    let mut keep = Vec::new();
    match n {
        2 => {
            let mut best = f64::INFINITY;
            let mut pending = 0usize;
            let mut best_committed = f64::INFINITY;
            for (k, &i) in idx.iter().enumerate() {
                while pending < k && amb[idx[pending]][0] < amb[i][0] - tol {
                    best_committed = best_committed.min(amb[idx[pending]][1]);
                    pending += 1;
                }
                if amb[i][1] < best_committed - tol {
                    keep.push(i);
                }
                best = best.min(amb[i][1]);
            }
            let _ = best;
        }
        3 => {
            // staircase over (x2, x3): keys increasing, values decreasing
            let key = |x: f64| x.to_bits();
            let mut stair: BTreeMap<u64, f64> = BTreeMap::new();
            let mut pending = 0usize;
            for (k, &i) in idx.iter().enumerate() {
                while pending < k && amb[idx[pending]][0] < amb[i][0] - tol {
                    let j = idx[pending];
                    let (y, z) = (amb[j][1], amb[j][2]);
                    let dominated = stair.range(..key(y)).next_back().is_some_and(|(_, &w)| w <= z);
                    if !dominated {
                        let remove: Vec<u64> = stair
                            .range(key(y)..)
                            .take_while(|(_, &w)| w >= z)
                            .map(|(&kk, _)| kk)
                            .collect();
                        for kk in remove {
                            stair.remove(&kk);
                        }
                        stair.insert(key(y), z);
                    }
                    pending += 1;
                }
                let (y, z) = (amb[i][1], amb[i][2]);
                let dominated = stair
                    .range(..key(y - tol))
                    .next_back()
                    .is_some_and(|(_, &w)| w < z - tol);
                if !dominated {
                    keep.push(i);
                }
            }
        }
        _ => keep = idx.clone(),
    }
    keep.sort();
    keep.into_iter().map(|i| pts[i].clone()).collect()
}

/// Primitive functional `w` and integer distance `D > 0` of the hyperplane
/// through the given coefficient vectors.
pub fn facet_support(vertices: &[Vec<i64>]) -> Result<(Vec<i64>, i64)> {
    let n = vertices.first().ok_or(Error::TooFewVectors { needed: 1, got: 0 })?.len();
    let basis = linalg::affine_basis_indices(vertices);
    if basis.len() != n {
        return Err(Error::TooFewVectors { needed: n, got: basis.len() });
    }
    let o = &vertices[basis[0]];
    let diffs: Vec<Vec<i64>> = basis[1..]
        .iter()
        .map(|&i| vertices[i].iter().zip(o).map(|(a, b)| a - b).collect())
        .collect();
    let w = integer_normal(&diffs).ok_or(Error::DegenerateBasis)?;
    let d = dot_i(&w, o);
    if d == 0 {
        return Err(Error::ThroughOrigin);
    }
    if vertices.iter().any(|v| dot_i(&w, v) != d) {
        return Err(Error::Precondition("vertices are not coplanar".into()));
    }
    let (w, d) = if d < 0 { (w.iter().map(|x| -x).collect(), -d) } else { (w, d) };
    Ok((w, i64::try_from(d).map_err(|_| Error::Precondition("distance overflow".into()))?))
}

/// Sign pattern of the ambient functional of `w` (a dual-lattice point).
fn normal_signs(dual: &Lattice, w: &[i64]) -> Vec<Ordering> {
    (0..dual.dim()).map(|i| dual.coord_sign(w, i)).collect()
}

/// Certification of a positive-normal facet: no lattice point of the open
/// orthant has `⟨w, c⟩ < D`, and every point with `⟨w, c⟩ = D` lies in the
/// window. `Ok(false)` when the region is too large to scan.
pub fn certify_facet(lat: &Lattice, w: &[i64], d: i64, t: &Q, budget: usize) -> bool {
    let n = lat.dim();
    let tf = to_f64(t);
    let mut poly = Polytope::new(n);
    for row in lat.approx_basis() {
        poly.push(row.iter().map(|x| -x).collect(), 0.0);
    }
    poly.push(w.iter().map(|&x| x as f64).collect(), d as f64);
    let pos = positive_column(lat);
    let order = level_order(n, pos);
    let mut ok = true;
    let res = enumerate(&poly, &order, budget, |c| {
        if (0..n).any(|i| lat.coord_sign(c, i) != Ordering::Greater) {
            return Step::Skip;
        }
        let v = dot_i(w, c);
        if v < d as i128 {
            ok = false;
            return Step::Halt;
        }
        if v == d as i128 && (0..n).any(|i| lat.cmp_coord(c, i, t, tf) != Ordering::Less) {
            ok = false;
            return Step::Halt;
        }
        if pos.is_some() {
            Step::Stop
        } else {
            Step::Skip
        }
    });
    res.is_ok() && ok
}

/// Builds the certified patch of the positive-orthant sail inside `(0, T)ⁿ`.
pub fn build_sail_patch(lat: &Lattice, t: &Q, opts: &SailOptions) -> Result<SailPatch> {
    if !t.is_positive() {
        return Err(Error::NonPositiveWindow);
    }
    let n = lat.dim();
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    if opts.require_irrational {
        let v = irrationality_check(lat, t, opts.budget)?;
        if !v.irrational_in_window {
            return Err(Error::NotIrrational { witnesses: v.witnesses.len() });
        }
    }
    let cands = window_candidates(lat, t, opts.budget)?;
    let pts = pareto_minimal(lat, &cands, t);
    let dual = lat.dual();
    let h = if pts.len() > n { hull(&pts) } else { Default::default() };

    struct Raw {
        verts: Vec<usize>,
        w: Vec<i64>,
        d: i64,
        positive: bool,
    }
    let mut raw = Vec::new();
    for f in &h.facets {
        let positive = if f.offset > 0 {
            let s = normal_signs(&dual, &f.normal);
            if s.iter().all(|&x| x == Ordering::Greater) {
                true
            } else if s.iter().all(|&x| x != Ordering::Less) {
                return Err(Error::UnboundedFace(f.normal.clone()));
            } else {
                false
            }
        } else {
            false
        };
        raw.push(Raw { verts: f.vertices.clone(), w: f.normal.clone(), d: f.offset, positive });
    }
    let certified: Vec<bool> = raw
        .par_iter()
        .map(|r| r.positive && certify_facet(lat, &r.w, r.d, t, opts.budget))
        .collect();

    // vertices of positive facets, lexicographic
    let mut vset: BTreeSet<Vec<i64>> = BTreeSet::new();
    for r in raw.iter().filter(|r| r.positive) {
        for &v in &r.verts {
            vset.insert(pts[v].clone());
        }
    }
    let vertices: Vec<Vec<i64>> = vset.into_iter().collect();
    let index = |c: &Vec<i64>| vertices.binary_search(c).ok();

    let mut facets: Vec<Facet> = raw
        .iter()
        .zip(&certified)
        .filter(|(r, _)| r.positive)
        .map(|(r, &cert)| Facet {
            vertices: r.verts.iter().map(|&v| index(&pts[v]).unwrap()).collect(),
            normal: r.w.clone(),
            intdist: r.d,
            certified: cert,
        })
        .collect();
    facets.sort_by(|a, b| {
        let mut ka = a.vertices.clone();
        ka.sort();
        let mut kb = b.vertices.clone();
        kb.sort();
        ka.cmp(&kb)
    });

    let nv = vertices.len();
    let mut vertex_facets = vec![Vec::new(); nv];
    let mut vertex_certified = vec![false; nv];
    for (fi, f) in facets.iter().enumerate() {
        for &v in &f.vertices {
            vertex_facets[v].push(fi);
            if f.certified {
                vertex_certified[v] = true;
            }
        }
    }
    // completeness: every window-hull facet through the vertex is certified
    let mut star_complete = vertex_certified.clone();
    for (r, &cert) in raw.iter().zip(&certified) {
        if cert {
            continue;
        }
        for &v in &r.verts {
            if let Some(i) = index(&pts[v]) {
                star_complete[i] = false;
            }
        }
    }
    let mut eset = BTreeSet::new();
    for f in facets.iter().filter(|f| f.certified) {
        let k = f.vertices.len();
        if n == 2 {
            let (a, b) = (f.vertices[0], f.vertices[1]);
            eset.insert((a.min(b), a.max(b)));
        } else {
            for i in 0..k {
                let (a, b) = (f.vertices[i], f.vertices[(i + 1) % k]);
                eset.insert((a.min(b), a.max(b)));
            }
        }
    }
    Ok(SailPatch {
        lattice: lat.clone(),
        window: t.clone(),
        vertices,
        facets,
        edges: eset.into_iter().collect(),
        vertex_certified,
        star_complete,
        vertex_facets,
    })
}

impl SailPatch {
    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn certified_facets(&self) -> impl Iterator<Item = (usize, &Facet)> {
        self.facets.iter().enumerate().filter(|(_, f)| f.certified)
    }

    pub fn vertex_coeffs(&self, f: &Facet) -> Vec<Vec<i64>> {
        f.vertices.iter().map(|&v| self.vertices[v].clone()).collect()
    }

    pub fn find_vertex(&self, c: &[i64]) -> Option<usize> {
        self.vertices.binary_search_by(|v| v.as_slice().cmp(c)).ok()
    }

    /// Primitive edge vectors at a certified vertex.
    pub fn edge_star(&self, v: usize) -> Result<EdgeStar> {
        if v >= self.vertices.len() || !self.vertex_certified[v] {
            return Err(Error::NotCertified(v));
        }
        let c = &self.vertices[v];
        let mut vectors: Vec<Vec<i64>> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                let other = if a == v { b } else if b == v { a } else { return None };
                let d: Vec<i64> = self.vertices[other].iter().zip(c).map(|(x, y)| x - y).collect();
                Some(primitive(&d).0)
            })
            .collect();
        vectors.sort();
        Ok(EdgeStar { center: v, vectors, complete: self.star_complete[v] })
    }

    /// Certified facet whose vertex set equals `coeffs` (in any order).
    pub fn find_facet(&self, coeffs: &[Vec<i64>]) -> Option<usize> {
        let mut want: Vec<usize> = coeffs.iter().map(|c| self.find_vertex(c)).collect::<Option<_>>()?;
        want.sort();
        self.facets.iter().position(|f| {
            let mut have = f.vertices.clone();
            have.sort();
            have == want
        })
    }

    /// Whether a coefficient vector lies in the open window.
    pub fn in_window(&self, c: &[i64]) -> bool {
        let tf = to_f64(&self.window);
        (0..self.dim()).all(|i| {
            self.lattice.coord_sign(c, i) == Ordering::Greater
                && self.lattice.cmp_coord(c, i, &self.window, tf) == Ordering::Less
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicityReport {
    pub checked: usize,
    pub matched: usize,
    pub skipped_out_of_window: usize,
    pub failures: Vec<usize>,
}

impl PeriodicityReport {
    pub fn verdict(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that `U` maps each certified facet whose image stays in the window
/// onto a certified facet with the same determinant and integer distance.
pub fn detect_periodicity(patch: &SailPatch, u: &[Vec<i64>]) -> Result<PeriodicityReport> {
    let n = patch.dim();
    if u.len() != n || u.iter().any(|r| r.len() != n) || linalg::int_det(u).abs() != BigInt::one() {
        return Err(Error::NotUnimodular);
    }
    let apply = |c: &[i64]| -> Vec<i64> { (0..n).map(|i| (0..n).map(|j| u[i][j] * c[j]).sum()).collect() };
    let mut rep = PeriodicityReport { checked: 0, matched: 0, skipped_out_of_window: 0, failures: Vec::new() };
    for (fi, f) in patch.certified_facets() {
        let image: Vec<Vec<i64>> = patch.vertex_coeffs(f).iter().map(|c| apply(c)).collect();
        if !image.iter().all(|c| patch.in_window(c)) {
            rep.skipped_out_of_window += 1;
            continue;
        }
        rep.checked += 1;
        let ok = patch.find_facet(&image).is_some_and(|g| {
            let g = &patch.facets[g];
            g.certified
                && g.intdist == f.intdist
                && crate::determinants::det_facet_coeffs(&patch.vertex_coeffs(g)).ok()
                    == crate::determinants::det_facet_coeffs(&patch.vertex_coeffs(f)).ok()
        });
        if ok {
            rep.matched += 1;
        } else {
            rep.failures.push(fi);
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------- JSON

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VertexDoc {
    pub coeffs: Vec<i64>,
    pub certified: bool,
    pub complete: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FacetDoc {
    pub vertices: Vec<usize>,
    pub w: Vec<i64>,
    pub d: i64,
    pub certified: bool,
    pub det: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StarDoc {
    pub vertex: usize,
    pub vectors: Vec<Vec<i64>>,
    pub complete: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PatchDoc {
    pub schema: String,
    pub lattice: LatticeDoc,
    pub window: String,
    pub vertices: Vec<VertexDoc>,
    pub facets: Vec<FacetDoc>,
    pub edges: Vec<(usize, usize)>,
    pub stars: Vec<StarDoc>,
}

impl SailPatch {
    pub fn to_doc(&self) -> PatchDoc {
        let facets = self
            .facets
            .iter()
            .map(|f| FacetDoc {
                vertices: f.vertices.clone(),
                w: f.normal.clone(),
                d: f.intdist,
                certified: f.certified,
                det: crate::determinants::det_facet_coeffs(&self.vertex_coeffs(f))
                    .map(|d| d.to_string())
                    .unwrap_or_default(),
            })
            .collect();
        let stars = (0..self.vertices.len())
            .filter_map(|v| self.edge_star(v).ok())
            .map(|s| StarDoc { vertex: s.center, vectors: s.vectors, complete: s.complete })
            .collect();
        PatchDoc {
            schema: PATCH_SCHEMA.into(),
            lattice: self.lattice.to_doc(),
            window: format_q(&self.window),
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(i, c)| VertexDoc {
                    coeffs: c.clone(),
                    certified: self.vertex_certified[i],
                    complete: self.star_complete[i],
                })
                .collect(),
            facets,
            edges: self.edges.clone(),
            stars,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("serializable")
    }

    /// Rebuilds the patch from its lattice and window and checks that the
    /// recorded faces agree.
    pub fn from_doc(doc: &PatchDoc, opts: &SailOptions) -> Result<Self> {
        if doc.schema != PATCH_SCHEMA {
            return Err(Error::Parse(format!("unknown schema {:?}", doc.schema)));
        }
        let lat = Lattice::from_doc(&doc.lattice)?;
        let t = parse_q(&doc.window)?;
        let patch = build_sail_patch(&lat, &t, opts)?;
        if patch.to_doc() != *doc {
            return Err(Error::Parse("patch does not match its recomputation".into()));
        }
        Ok(patch)
    }

    pub fn from_json(s: &str, opts: &SailOptions) -> Result<Self> {
        let doc: PatchDoc = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(&doc, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};
    use crate::scalar::Scalar;

    #[test]
    fn support_of_simple_facets() {
        let e = |v: &[i64]| v.to_vec();
        assert_eq!(
            facet_support(&[e(&[1, 0, 0]), e(&[0, 1, 0]), e(&[0, 0, 1])]).unwrap(),
            (vec![1, 1, 1], 1)
        );
        assert_eq!(
            facet_support(&[e(&[1, 0, 0]), e(&[0, 1, 0]), e(&[1, 1, 2])]).unwrap(),
            (vec![2, 2, -1], 2)
        );
        assert_eq!(facet_support(&[e(&[1, 0]), e(&[0, 1])]).unwrap(), (vec![1, 1], 1));
        assert_eq!(facet_support(&[e(&[1, 0]), e(&[-1, 0])]), Err(Error::ThroughOrigin));
    }

    #[test]
    fn identity_fails_irrationality() {
        let v = irrationality_check(&Lattice::identity(2), &q(10), 100_000).unwrap();
        assert!(!v.irrational_in_window);
        assert!(v.witnesses.contains(&vec![1, 0]));
    }

    #[test]
    fn literal_alpha_lattice_has_axis_point() {
        let a = Scalar::Rational(qf(355 - 339, 113));
        let v = irrationality_check(&Lattice::from_alpha(&a).unwrap(), &q(100), 100_000).unwrap();
        assert!(v.witnesses.contains(&vec![0, 1]));
        let v = irrationality_check(&Lattice::alpha_sail_lattice(&a).unwrap(), &q(100), 100_000).unwrap();
        assert!(v.irrational_in_window);
    }

    #[test]
    fn alpha_seven_sixteenths() {
        let a = Scalar::Rational(qf(7, 16));
        let lat = Lattice::alpha_sail_lattice(&a).unwrap();
        let p = build_sail_patch(&lat, &q(40), &SailOptions::default()).unwrap();
        let cert: Vec<Vec<Vec<i64>>> = p.certified_facets().map(|(_, f)| p.vertex_coeffs(f)).collect();
        assert!(cert.contains(&vec![vec![0, 1], vec![2, -1]]) || cert.contains(&vec![vec![2, -1], vec![0, 1]]));
        assert!(cert.iter().any(|f| f.contains(&vec![16, -9]) && f.contains(&vec![2, -1])));
        assert_eq!(cert.len(), 2);
    }
}
