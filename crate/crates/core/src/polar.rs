//! The polar polyhedron `K° = {x : ⟨x, y⟩ ≥ 1 for all y ∈ K}` of a sail,
//! built face by face from a certified patch, and the checks relating it to
//! the dual sail.
//!
//! Polar points are stored in dual-basis coefficients: the pairing of a dual
//! coefficient vector with a primal one is the ambient inner product in the
//! determinant-one normalization.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::determinants::{det_edge_star, det_facet};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{self, affine_dim_q};
use crate::rational::{best_convergent, format_q, is_int, to_f64, Q};
use crate::report::Verdict;
use crate::sail::{build_sail_patch, irrationality_check, SailOptions, SailPatch};
use crate::scalar::Scalar;

fn qi(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

fn pair(u: &[Q], c: &[i64]) -> Q {
    u.iter().zip(c).map(|(a, &b)| a * qi(b)).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarVertex {
    /// Index of the source facet in the patch.
    pub facet: usize,
    /// Dual-lattice functional of the facet.
    pub w: Vec<i64>,
    pub d: i64,
    /// `w / D` in dual-basis coefficients.
    pub coeffs: Vec<Q>,
}

impl PolarVertex {
    /// Whether the polar vertex itself is a dual-lattice point.
    pub fn in_dual_lattice(&self) -> bool {
        self.coeffs.iter().all(is_int)
    }

    /// Whether `D · u` is a dual-lattice point.
    pub fn scaled_in_dual_lattice(&self) -> bool {
        self.coeffs.iter().all(|c| is_int(&(c * qi(self.d))))
    }

    /// Ambient coordinates in the determinant-one normalization.
    pub fn ambient(&self, lat: &Lattice) -> Vec<Scalar> {
        let dual = lat.dual();
        let n = lat.dim();
        let root = match dual.scale().as_rational().and_then(|s| crate::rational::exact_nth_root(s, n as u32)) {
            Some(r) => Scalar::Rational(r),
            None => Scalar::Rational(best_convergent(dual.scale().to_f64().powf(1.0 / n as f64), 1 << 40)),
        };
        let dq = Scalar::Rational(qi(self.d));
        dual.ambient(&self.w).iter().map(|x| &(x / &root) / &dq).collect()
    }
}

/// `u_F = w / D` for a certified facet.
pub fn polar_vertex_of_facet(patch: &SailPatch, facet: usize) -> Result<PolarVertex> {
    let f = patch.facets.get(facet).ok_or(Error::NotCertified(facet))?;
    if !f.certified {
        return Err(Error::NotCertified(facet));
    }
    let coeffs: Vec<Q> = f.normal.iter().map(|&x| Q::new(BigInt::from(x), BigInt::from(f.intdist))).collect();
    let v = PolarVertex { facet, w: f.normal.clone(), d: f.intdist, coeffs };
    debug_assert!(v.scaled_in_dual_lattice());
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "kebab-case")]
pub enum SourceFace {
    Vertex(usize),
    Edge(usize, usize),
    Facet(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarFace {
    pub source: SourceFace,
    /// Dimension of the polar face.
    pub dim: usize,
    /// Indices into [`PolarPatch::vertices`].
    pub vertices: Vec<usize>,
    pub complete: bool,
}

#[derive(Clone, Debug)]
pub struct PolarPatch {
    pub source: SailPatch,
    pub vertices: Vec<PolarVertex>,
    /// Polar vertex index of each patch facet (certified facets only).
    pub vertex_of_facet: Vec<Option<usize>>,
    pub faces: Vec<PolarFace>,
}

/// Sail faces (vertex-index sets) of a patch, with completeness flags.
fn source_faces(patch: &SailPatch) -> Vec<(SourceFace, Vec<usize>, bool)> {
    let mut out = Vec::new();
    for v in 0..patch.vertices.len() {
        if patch.vertex_certified[v] {
            out.push((SourceFace::Vertex(v), vec![v], patch.star_complete[v]));
        }
    }
    if patch.dim() == 3 {
        for &(a, b) in &patch.edges {
            out.push((SourceFace::Edge(a, b), vec![a, b], patch.star_complete[a] && patch.star_complete[b]));
        }
    }
    for (i, f) in patch.certified_facets() {
        let mut vs = f.vertices.clone();
        vs.sort();
        out.push((SourceFace::Facet(i), vs, true));
    }
    out
}

/// Builds `K°` through the inclusion-reversing face bijection: a sail face
/// `G` maps to the polar face spanned by `u_F` over certified facets `F ⊇ G`.
pub fn build_polar_patch(patch: &SailPatch) -> Result<PolarPatch> {
    if patch.certified_facets().next().is_none() {
        return Err(Error::EmptyPatch);
    }
    let mut vertices = Vec::new();
    let mut vertex_of_facet = vec![None; patch.facets.len()];
    for (i, _) in patch.certified_facets() {
        vertex_of_facet[i] = Some(vertices.len());
        vertices.push(polar_vertex_of_facet(patch, i)?);
    }
    let n = patch.dim();
    let faces = source_faces(patch)
        .into_iter()
        .map(|(src, vs, complete)| {
            let mut pv: Vec<usize> = patch
                .certified_facets()
                .filter(|(_, f)| vs.iter().all(|v| f.vertices.contains(v)))
                .map(|(i, _)| vertex_of_facet[i].unwrap())
                .collect();
            pv.sort();
            let src_dim = match src {
                SourceFace::Vertex(_) => 0,
                SourceFace::Edge(..) => 1,
                SourceFace::Facet(_) => n - 1,
            };
            PolarFace { source: src, dim: n - 1 - src_dim, vertices: pv, complete }
        })
        .collect();
    Ok(PolarPatch { source: patch.clone(), vertices, vertex_of_facet, faces })
}

impl PolarPatch {
    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    /// Polar facet `F_v°` of a sail vertex.
    pub fn facet_of_vertex(&self, v: usize) -> Option<&PolarFace> {
        self.faces.iter().find(|f| f.source == SourceFace::Vertex(v))
    }

    /// Defining property: `⟨u_F, y⟩ = 1` on `F` and `≥ 1` at other certified vertices.
    pub fn check_defining_property(&self) -> Verdict {
        let mut out = Verdict::default();
        for pv in &self.vertices {
            let f = &self.source.facets[pv.facet];
            for (v, c) in self.source.vertices.iter().enumerate() {
                if !self.source.vertex_certified[v] {
                    continue;
                }
                let val = pair(&pv.coeffs, c);
                let ok = if f.vertices.contains(&v) { val.is_one() } else { val >= Q::one() };
                out.record(ok, || format!("facet {} vertex {v}: pairing {}", pv.facet, format_q(&val)));
            }
        }
        out
    }

    /// Polar face dimension equals `n − 1 − dim G` for complete faces.
    pub fn check_dimensions(&self) -> Verdict {
        let mut out = Verdict::default();
        for f in &self.faces {
            if !f.complete {
                out.skip();
                continue;
            }
            let pts: Vec<Vec<Q>> = f.vertices.iter().map(|&i| self.vertices[i].coeffs.clone()).collect();
            let d = affine_dim_q(&pts);
            out.record(d == f.dim as isize, || format!("{:?}: polar dim {d}, expected {}", f.source, f.dim));
        }
        out
    }

    /// `G ⊆ H ⟺ H° ⊆ G°` over all pairs of complete faces.
    pub fn check_inclusion_reversal(&self) -> Verdict {
        let mut out = Verdict::default();
        let faces = source_faces(&self.source);
        let complete: Vec<(&Vec<usize>, &PolarFace)> = faces
            .iter()
            .zip(&self.faces)
            .filter(|((_, _, c), _)| *c)
            .map(|((_, vs, _), pf)| (vs, pf))
            .collect();
        out.skipped_incomplete = faces.len() - complete.len();
        for (g, gp) in &complete {
            let gp_set: BTreeSet<usize> = gp.vertices.iter().copied().collect();
            for (h, hp) in &complete {
                let sub = g.iter().all(|v| h.contains(v));
                let polar_sub = hp.vertices.iter().all(|v| gp_set.contains(v));
                out.record(sub == polar_sub, || format!("{:?} vs {:?}", gp.source, hp.source));
            }
        }
        out
    }

    /// `|certified faces of dim k| = |complete polar faces of dim n−1−k|`.
    pub fn check_bijection_counts(&self) -> Verdict {
        let mut out = Verdict::default();
        let n = self.dim();
        for k in 0..n {
            let src = self.faces.iter().filter(|f| f.dim == n - 1 - k).count();
            let polar = self.faces.iter().filter(|f| f.dim == n - 1 - k && !f.vertices.is_empty()).count();
            out.record(src == polar, || format!("dimension {k}: {src} faces, {polar} polar faces"));
        }
        out
    }

    pub fn to_doc(&self) -> PolarDoc {
        let lat = &self.source.lattice;
        PolarDoc {
            schema: POLAR_SCHEMA.into(),
            vertices: self
                .vertices
                .iter()
                .map(|v| PolarVertexDoc {
                    facet: v.facet,
                    w: v.w.clone(),
                    d: v.d,
                    coeffs: v.coeffs.iter().map(format_q).collect(),
                    ambient_approx: v.ambient(lat).iter().map(Scalar::to_f64).collect(),
                })
                .collect(),
            faces: self
                .faces
                .iter()
                .map(|f| PolarFaceDoc {
                    source: f.source.clone(),
                    dim: f.dim,
                    vertices: f.vertices.clone(),
                    complete: f.complete,
                    det: (f.complete && f.dim == self.dim() - 1)
                        .then(|| det_polar_facet(self, f).ok().map(|d| format_q(&d)))
                        .flatten(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("serializable")
    }
}

pub const POLAR_SCHEMA: &str = "klein.polar/1";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolarVertexDoc {
    pub facet: usize,
    pub w: Vec<i64>,
    pub d: i64,
    pub coeffs: Vec<String>,
    pub ambient_approx: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolarFaceDoc {
    pub source: SourceFace,
    pub dim: usize,
    pub vertices: Vec<usize>,
    pub complete: bool,
    pub det: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolarDoc {
    pub schema: String,
    pub vertices: Vec<PolarVertexDoc>,
    pub faces: Vec<PolarFaceDoc>,
}

/// Sum over `n`-subsets of the polar face's vertices of `|det|`.
pub fn det_polar_facet(polar: &PolarPatch, face: &PolarFace) -> Result<Q> {
    if !face.complete {
        return Err(Error::IncompleteFace);
    }
    let vs: Vec<Vec<Q>> = face.vertices.iter().map(|&i| polar.vertices[i].coeffs.clone()).collect();
    subset_det_sum_q(&vs)
}

/// `Σ |det|` over `n`-subsets of rational vectors.
pub fn subset_det_sum_q(vs: &[Vec<Q>]) -> Result<Q> {
    let n = vs.first().map_or(0, Vec::len);
    if vs.len() < n || n == 0 {
        return Err(Error::TooFewVectors { needed: n.max(1), got: vs.len() });
    }
    if vs.len() > crate::determinants::SUBSET_CAP {
        return Err(Error::TooManyVectors { cap: crate::determinants::SUBSET_CAP, got: vs.len() });
    }
    let mut sum = Q::zero();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let rows: Vec<Vec<Q>> = idx.iter().map(|&i| vs[i].clone()).collect();
        sum += linalg::det(&rows).abs();
        let Some(k) = (0..n).rev().find(|&k| idx[k] < vs.len() - n + k) else { break };
        idx[k] += 1;
        for j in k + 1..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(sum)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarBoundRow {
    pub vertex: usize,
    pub polar_det: String,
    pub star_det: String,
    pub holds: bool,
}

/// `det F_v° ≤ (det St_v)^{n−1}` at one vertex.
pub fn check_polar_facet_bound(polar: &PolarPatch, v: usize) -> Result<PolarBoundRow> {
    let patch = &polar.source;
    let star = patch.edge_star(v)?;
    let st = det_edge_star(&star)?;
    let face = polar.facet_of_vertex(v).ok_or(Error::NotCertified(v))?;
    let fd = det_polar_facet(polar, face)?;
    let bound = Q::from_integer(st.pow(patch.dim() as u32 - 1));
    Ok(PolarBoundRow { vertex: v, polar_det: format_q(&fd), star_det: st.to_string(), holds: fd <= bound })
}

/// The polar facet bound at every complete vertex of the patch.
pub fn check_polar_facet_bounds(polar: &PolarPatch) -> (Verdict, Vec<PolarBoundRow>) {
    let mut out = Verdict::default();
    let mut rows = Vec::new();
    for v in 0..polar.source.vertices.len() {
        match check_polar_facet_bound(polar, v) {
            Ok(r) => {
                out.record(r.holds, || format!("vertex {v}: {} > {}^(n-1)", r.polar_det, r.star_det));
                rows.push(r);
            }
            Err(_) => out.skip(),
        }
    }
    (out, rows)
}

/// Both sides of the simplicial identity
/// `|det(w₁,…,wₙ)| = |det(r₁,…,rₙ)|^{n−1} / ∏ det Fᵢ`
/// where `Fᵢ = conv({v, v+r₁, …, v+rₙ} ∖ {v+rᵢ})` and `⟨wᵢ, ·⟩ = 1` on `Fᵢ`.
pub fn simplicial_polar_identity(rs: &[Vec<Q>], v: &[Q]) -> Result<(Q, Q)> {
    let n = rs.len();
    if n < 2 || rs.iter().any(|r| r.len() != n) || v.len() != n {
        return Err(Error::UnsupportedDimension(n));
    }
    // v = Σ λᵢ rᵢ  ⇔  Rᵀ λ = v with rᵢ as rows of R
    let rt: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| rs[j][i].clone()).collect()).collect();
    let lambda = linalg::solve(&rt, v).ok_or(Error::DegenerateBasis)?;
    if lambda.iter().any(|l| !l.is_positive()) {
        return Err(Error::Precondition("v must have positive coordinates in the r-basis".into()));
    }
    let mut ws = Vec::with_capacity(n);
    let mut prod = Q::one();
    for i in 0..n {
        let mut pts = vec![v.to_vec()];
        for (j, r) in rs.iter().enumerate() {
            if j != i {
                pts.push(v.iter().zip(r).map(|(a, b)| a + b).collect());
            }
        }
        let w = linalg::solve(&pts, &vec![Q::one(); n]).ok_or(Error::DegenerateBasis)?;
        prod *= linalg::det(&pts).abs();
        ws.push(w);
    }
    let lhs = linalg::det(&ws).abs();
    let rdet = linalg::det(rs).abs();
    let mut num = Q::one();
    for _ in 0..n - 1 {
        num *= &rdet;
    }
    Ok((lhs, num / prod))
}

/// Half-space consistency on window data: every polar vertex satisfies all
/// certified vertex constraints, and random points violate a vertex
/// constraint exactly when they violate a facet-vertex constraint.
pub fn check_halfspace_reconstruction(polar: &PolarPatch, samples: usize, seed: u64) -> Verdict {
    let patch = &polar.source;
    let n = patch.dim();
    let mut out = Verdict::default();
    let verts: Vec<&Vec<i64>> = (0..patch.vertices.len())
        .filter(|&v| patch.vertex_certified[v])
        .map(|v| &patch.vertices[v])
        .collect();
    let facet_pts: BTreeSet<&Vec<i64>> = patch
        .certified_facets()
        .flat_map(|(_, f)| f.vertices.iter().map(|&v| &patch.vertices[v]))
        .collect();
    for pv in &polar.vertices {
        let ok = verts.iter().all(|c| pair(&pv.coeffs, c) >= Q::one());
        out.record(ok, || format!("polar vertex of facet {} leaves K'", pv.facet));
    }
    out.record(verts.iter().all(|c| pair(&vec![Q::zero(); n], c) < Q::one()), || "origin accepted".into());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        // random convex combination of polar vertices, pushed in or out
        let mut x = vec![Q::zero(); n];
        let mut total = Q::zero();
        for pv in &polar.vertices {
            let wgt = Q::new(BigInt::from(rng.gen_range(0..8)), BigInt::one());
            for (xi, ci) in x.iter_mut().zip(&pv.coeffs) {
                *xi += &wgt * ci;
            }
            total += wgt;
        }
        if total.is_zero() {
            continue;
        }
        let stretch = Q::new(BigInt::from(rng.gen_range(50..150)), BigInt::from(100));
        let x: Vec<Q> = x.iter().map(|xi| xi / &total * &stretch).collect();
        let by_vertices = verts.iter().any(|c| pair(&x, c) < Q::one());
        let by_facets = facet_pts.iter().any(|c| pair(&x, c) < Q::one());
        out.record(by_vertices == by_facets, || {
            format!("sample {:?}", x.iter().map(format_q).collect::<Vec<_>>())
        });
    }
    out
}

/// Facet centroids lie in the hull of their vertices, witnessed by exact
/// barycentric coordinates in a fan simplex.
pub fn check_convex_hull_of_vertices(patch: &SailPatch) -> Verdict {
    let n = patch.dim();
    let mut out = Verdict::default();
    for (i, f) in patch.certified_facets() {
        let vs: Vec<Vec<Q>> = f.vertices.iter().map(|&v| patch.vertices[v].iter().map(|&x| qi(x)).collect()).collect();
        let k = Q::from_integer(BigInt::from(vs.len()));
        let centroid: Vec<Q> = (0..n).map(|j| vs.iter().map(|v| v[j].clone()).sum::<Q>() / &k).collect();
        let simplices: Vec<Vec<usize>> = if n == 2 {
            vec![vec![0, 1]]
        } else {
            (1..vs.len() - 1).map(|j| vec![0, j, j + 1]).collect()
        };
        let inside = simplices.iter().any(|s| {
            let rows: Vec<Vec<Q>> = (0..n).map(|r| s.iter().map(|&j| vs[j][r].clone()).collect()).collect();
            linalg::solve(&rows, &centroid).is_some_and(|lam| {
                lam.iter().all(|l| !l.is_negative()) && lam.iter().sum::<Q>().is_one()
            })
        });
        out.record(inside, || format!("facet {i} centroid"));
    }
    out
}

/// Window for the dual lattice covering the same normalized box.
pub fn dual_window(lat: &Lattice, t: &Q) -> Q {
    let n = lat.dim() as f64;
    let s = lat.scale().to_f64();
    let sd = lat.dual().scale().to_f64();
    if (s - 1.0).abs() < 1e-15 && (sd - 1.0).abs() < 1e-15 {
        return t.clone();
    }
    best_convergent(to_f64(t) * (sd / s).powf(1.0 / n), 1000)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualSailReport {
    pub pairing: Verdict,
    /// Only for `n = 2`: polar vertices and dual-sail vertices agree on the
    /// common range.
    pub planar_equality: Option<Verdict>,
    pub dual_window: String,
}

/// `K* ⊆ K°`: every certified vertex of the dual sail pairs to at least 1
/// with every certified vertex of the sail.
pub fn check_kast_in_kcirc(lat: &Lattice, t: &Q, opts: &SailOptions) -> Result<DualSailReport> {
    let dual = lat.dual();
    let td = dual_window(lat, t);
    for (l, w) in [(lat, t), (&dual, &td)] {
        let v = irrationality_check(l, w, opts.budget)?;
        if !v.irrational_in_window {
            return Err(Error::NotIrrational { witnesses: v.witnesses.len() });
        }
    }
    let patch = build_sail_patch(lat, t, opts)?;
    let dpatch = build_sail_patch(&dual, &td, opts)?;
    let mut pairing = Verdict::default();
    let kv: Vec<&Vec<i64>> = (0..patch.vertices.len()).filter(|&v| patch.vertex_certified[v]).map(|v| &patch.vertices[v]).collect();
    for (j, y) in dpatch.vertices.iter().enumerate() {
        if !dpatch.vertex_certified[j] {
            continue;
        }
        for x in &kv {
            let p = linalg::dot_i(y, x);
            pairing.record(p >= 1, || format!("dual vertex {y:?} with {x:?}: {p}"));
        }
    }
    let planar_equality = (lat.dim() == 2).then(|| compare_planar(&patch, &dpatch, &dual));
    Ok(DualSailReport { pairing, planar_equality, dual_window: format_q(&td) })
}

fn compare_planar(patch: &SailPatch, dpatch: &SailPatch, dual: &Lattice) -> Verdict {
    let mut out = Verdict::default();
    let polar: BTreeSet<Vec<i64>> = patch
        .certified_facets()
        .filter(|(_, f)| f.intdist == 1)
        .map(|(_, f)| f.normal.clone())
        .collect();
    let dverts: BTreeSet<Vec<i64>> = (0..dpatch.vertices.len())
        .filter(|&v| dpatch.vertex_certified[v])
        .map(|v| dpatch.vertices[v].clone())
        .collect();
    let x1 = |c: &Vec<i64>| dual.ambient_f64(c)[0];
    let range = |s: &BTreeSet<Vec<i64>>| {
        s.iter().map(x1).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)))
    };
    let (a0, a1) = range(&polar);
    let (b0, b1) = range(&dverts);
    let (lo, hi) = (a0.max(b0), a1.min(b1));
    let eps = 1e-9 * (1.0 + hi.abs());
    let within = |c: &&Vec<i64>| x1(c) >= lo - eps && x1(c) <= hi + eps;
    let pa: BTreeSet<&Vec<i64>> = polar.iter().filter(within).collect();
    let pb: BTreeSet<&Vec<i64>> = dverts.iter().filter(within).collect();
    out.record(lo <= hi && !pa.is_empty(), || "empty common range".into());
    for y in pa.symmetric_difference(&pb) {
        out.record(false, || format!("{y:?} in only one of K° and K*"));
    }
    out.checked += pa.intersection(&pb).count();
    out.passed += pa.intersection(&pb).count();
    out
}

/// Certified facet determinants paired with the polar data, for reports.
pub fn facet_dets(polar: &PolarPatch) -> Vec<(usize, BigInt)> {
    polar
        .vertices
        .iter()
        .filter_map(|pv| det_facet(&polar.source, &polar.source.facets[pv.facet]).ok().map(|d| (pv.facet, d)))
        .collect()
}
