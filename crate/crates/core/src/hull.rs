//! Convex hulls of integer point sets in dimension 2 and 3 with exact
//! integer predicates. Coplanar triangles are merged into polygonal facets.

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A facet `{p : ⟨normal, p⟩ = offset}` with the hull on the side `≥ offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullFacet {
    pub normal: Vec<i64>,
    pub offset: i64,
    /// Extreme points of the facet (indices into the input), in cyclic order.
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct Hull {
    /// Affine dimension of the input.
    pub dim: usize,
    pub facets: Vec<HullFacet>,
}

fn cross2(o: &[i64], a: &[i64], b: &[i64]) -> i128 {
    (a[0] - o[0]) as i128 * (b[1] - o[1]) as i128 - (a[1] - o[1]) as i128 * (b[0] - o[0]) as i128
}

fn sub3(a: &[i64], b: &[i64]) -> [i128; 3] {
    [
        (a[0] - b[0]) as i128,
        (a[1] - b[1]) as i128,
        (a[2] - b[2]) as i128,
    ]
}

fn cross3(u: [i128; 3], v: [i128; 3]) -> [i128; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn dot3(u: [i128; 3], v: [i128; 3]) -> i128 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn orient3(a: &[i64], b: &[i64], c: &[i64], p: &[i64]) -> i128 {
    dot3(cross3(sub3(b, a), sub3(c, a)), sub3(p, a))
}

/// Counter-clockwise convex polygon of 2D points (indices), collinear points
/// dropped. Fewer than three output points means the input is degenerate.
pub fn convex_polygon_2d(points: &[Vec<i64>], idx: &[usize]) -> Vec<usize> {
    let mut ids: Vec<usize> = idx.to_vec();
    ids.sort_by(|&a, &b| points[a].cmp(&points[b]));
    ids.dedup_by(|a, b| points[*a] == points[*b]);
    if ids.len() < 3 {
        return ids;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &ids {
        while lower.len() >= 2
            && cross2(&points[lower[lower.len() - 2]], &points[lower[lower.len() - 1]], &points[i]) <= 0
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in ids.iter().rev() {
        while upper.len() >= 2
            && cross2(&points[upper[upper.len() - 2]], &points[upper[upper.len() - 1]], &points[i]) <= 0
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Hull of points in `Z²`.
pub fn hull_2d(points: &[Vec<i64>]) -> Hull {
    let all: Vec<usize> = (0..points.len()).collect();
    let poly = convex_polygon_2d(points, &all);
    let mut hull = Hull::default();
    if poly.len() < 2 {
        hull.dim = poly.len().saturating_sub(1);
        return hull;
    }
    if poly.len() == 2 {
        // collinear input: the segment, seen from both sides
        hull.dim = 1;
        let (a, b) = (poly[0], poly[1]);
        for (s, t) in [(a, b), (b, a)] {
            let (pa, pb) = (&points[s], &points[t]);
            let (w, _) = crate::linalg::primitive(&[-(pb[1] - pa[1]), pb[0] - pa[0]]);
            let offset = w[0] * pa[0] + w[1] * pa[1];
            hull.facets.push(HullFacet { normal: w, offset, vertices: vec![s, t] });
        }
        return hull;
    }
    hull.dim = 2;
    for k in 0..poly.len() {
        let (s, t) = (poly[k], poly[(k + 1) % poly.len()]);
        let (pa, pb) = (&points[s], &points[t]);
        // interior lies to the left of a counter-clockwise edge
        let (w, _) = crate::linalg::primitive(&[-(pb[1] - pa[1]), pb[0] - pa[0]]);
        let offset = w[0] * pa[0] + w[1] * pa[1];
        hull.facets.push(HullFacet { normal: w, offset, vertices: vec![s, t] });
    }
    hull
}

/// Hull of points in `Z³` by randomized incremental insertion.
pub fn hull_3d(points: &[Vec<i64>]) -> Hull {
    let mut hull = Hull::default();
    let Some(start) = initial_simplex(points) else {
        hull.dim = affine_dim(points);
        return hull;
    };
    hull.dim = 3;
    let [a, b, c, d] = start;
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let mut alive: Vec<bool> = Vec::new();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    let add_face = |f: [usize; 3],
                        faces: &mut Vec<[usize; 3]>,
                        alive: &mut Vec<bool>,
                        edges: &mut HashMap<(usize, usize), usize>| {
        let id = faces.len();
        faces.push(f);
        alive.push(true);
        for k in 0..3 {
            edges.insert((f[k], f[(k + 1) % 3]), id);
        }
    };
    let base = if orient3(&points[a], &points[b], &points[c], &points[d]) > 0 {
        [a, c, b]
    } else {
        [a, b, c]
    };
    add_face(base, &mut faces, &mut alive, &mut edges);
    for k in 0..3 {
        let (u, v) = (base[k], base[(k + 1) % 3]);
        add_face([v, u, d], &mut faces, &mut alive, &mut edges);
    }

    let mut rest: Vec<usize> = (0..points.len()).filter(|i| !start.contains(i)).collect();
    rest.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5a11));
    for p in rest {
        let pp = &points[p];
        let visible: Vec<usize> = (0..faces.len())
            .filter(|&f| alive[f] && {
                let [x, y, z] = faces[f];
                orient3(&points[x], &points[y], &points[z], pp) > 0
            })
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut is_visible = vec![false; faces.len()];
        for &f in &visible {
            is_visible[f] = true;
        }
        let mut horizon = Vec::new();
        for &f in &visible {
            let fv = faces[f];
            for k in 0..3 {
                let (u, v) = (fv[k], fv[(k + 1) % 3]);
                let across = edges.get(&(v, u)).copied();
                if across.map_or(true, |g| !is_visible[g]) {
                    horizon.push((u, v));
                }
            }
        }
        for &f in &visible {
            alive[f] = false;
            let fv = faces[f];
            for k in 0..3 {
                let key = (fv[k], fv[(k + 1) % 3]);
                if edges.get(&key) == Some(&f) {
                    edges.remove(&key);
                }
            }
        }
        for (u, v) in horizon {
            add_face([u, v, p], &mut faces, &mut alive, &mut edges);
        }
    }

    // merge coplanar triangles
    let mut planes: BTreeMap<(Vec<i64>, i64), Vec<usize>> = BTreeMap::new();
    for (f, fv) in faces.iter().enumerate() {
        if !alive[f] {
            continue;
        }
        let [x, y, z] = *fv;
        let n = cross3(sub3(&points[y], &points[x]), sub3(&points[z], &points[x]));
        let g = n.iter().fold(0i128, |g, v| g.gcd(v));
        // outward normal n; hull side is ⟨−n, p⟩ ≥ ⟨−n, x⟩
        let w: Vec<i64> = n.iter().map(|v| i64::try_from(-v / g).expect("normal overflow")).collect();
        let offset = w.iter().zip(&points[x]).map(|(a, b)| a * b).sum::<i64>();
        let entry = planes.entry((w, offset)).or_default();
        entry.extend_from_slice(fv);
    }
    for ((w, offset), mut verts) in planes {
        verts.sort_unstable();
        verts.dedup();
        let drop = (0..3).max_by_key(|&k| w[k].abs()).unwrap();
        let keep: Vec<usize> = (0..3).filter(|&k| k != drop).collect();
        let proj: Vec<Vec<i64>> = points.iter().map(|p| vec![p[keep[0]], p[keep[1]]]).collect();
        let poly = convex_polygon_2d(&proj, &verts);
        hull.facets.push(HullFacet { normal: w, offset, vertices: poly });
    }
    hull
}

fn affine_dim(points: &[Vec<i64>]) -> usize {
    let idx = crate::linalg::affine_basis_indices(points);
    idx.len().saturating_sub(1)
}

fn initial_simplex(points: &[Vec<i64>]) -> Option<[usize; 4]> {
    let a = 0;
    let b = (1..points.len()).find(|&i| points[i] != points[a])?;
    let ab = sub3(&points[b], &points[a]);
    let c = (1..points.len()).find(|&i| cross3(ab, sub3(&points[i], &points[a])) != [0, 0, 0])?;
    let d = (1..points.len())
        .find(|&i| orient3(&points[a], &points[b], &points[c], &points[i]) != 0)?;
    Some([a, b, c, d])
}

/// Hull in dimension 2 or 3.
pub fn hull(points: &[Vec<i64>]) -> Hull {
    match points.first().map(Vec::len) {
        Some(2) => hull_2d(points),
        Some(3) => hull_3d(points),
        None => Hull::default(),
        Some(n) => panic!("hull in dimension {n} is not supported"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_supporting(points: &[Vec<i64>], h: &Hull) {
        for f in &h.facets {
            for p in points {
                let v: i64 = f.normal.iter().zip(p).map(|(a, b)| a * b).sum();
                assert!(v >= f.offset, "point {p:?} below facet {f:?}");
            }
            for &v in &f.vertices {
                let x: i64 = f.normal.iter().zip(&points[v]).map(|(a, b)| a * b).sum();
                assert_eq!(x, f.offset);
            }
        }
    }

    #[test]
    fn square_with_interior_and_collinear_points() {
        let pts: Vec<Vec<i64>> = vec![
            vec![0, 0], vec![2, 0], vec![2, 2], vec![0, 2], vec![1, 1], vec![1, 0],
        ];
        let h = hull_2d(&pts);
        assert_eq!(h.dim, 2);
        assert_eq!(h.facets.len(), 4);
        check_supporting(&pts, &h);
    }

    #[test]
    fn cube_has_six_square_facets() {
        let mut pts = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    pts.push(vec![x, y, z]);
                }
            }
        }
        let h = hull_3d(&pts);
        assert_eq!(h.facets.len(), 6);
        for f in &h.facets {
            assert_eq!(f.vertices.len(), 4);
        }
        check_supporting(&pts, &h);
    }

    #[test]
    fn octahedron_and_degenerate_inputs() {
        let pts: Vec<Vec<i64>> = vec![
            vec![1, 0, 0], vec![-1, 0, 0], vec![0, 1, 0], vec![0, -1, 0], vec![0, 0, 1], vec![0, 0, -1],
            vec![0, 0, 0],
        ];
        let h = hull_3d(&pts);
        assert_eq!(h.facets.len(), 8);
        check_supporting(&pts, &h);
        let flat: Vec<Vec<i64>> = vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1]];
        let h = hull_3d(&flat);
        assert_eq!(h.dim, 2);
        assert!(h.facets.is_empty());
    }
}
