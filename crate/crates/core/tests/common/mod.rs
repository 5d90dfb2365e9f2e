//! Independent oracles shared by the integration tests. None of these call
//! into the hull or enumeration code of the library.

#![allow(dead_code)]

use klein_core::rational::Q;
use klein_core::{Lattice, Scalar};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;

pub fn qi(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

/// Every coefficient vector in `[-r, r]ⁿ`.
pub fn coefficient_box(n: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-r..=r).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Exact ambient coordinates by direct summation over the basis rows.
pub fn ambient(lat: &Lattice, c: &[i64]) -> Vec<Scalar> {
    lat.basis()
        .iter()
        .map(|row| row.iter().zip(c).fold(Scalar::zero(), |acc, (b, &x)| &acc + &(b * &Scalar::int(x))))
        .collect()
}

pub fn in_open_window(lat: &Lattice, c: &[i64], t: &Q) -> bool {
    let tt = Scalar::Rational(t.clone());
    ambient(lat, c).iter().all(|x| x.is_positive() && x.cmp(&tt) == Ordering::Less)
}

fn cross2(o: &[Q], a: &[Q], b: &[Q]) -> Q {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Convex polygon (counter-clockwise) by monotone chain over rationals.
pub fn polygon(points: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut p = points.to_vec();
    p.sort();
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut lower: Vec<Vec<Q>> = Vec::new();
    for x in &p {
        while lower.len() >= 2 && cross2(&lower[lower.len() - 2], &lower[lower.len() - 1], x) <= Q::zero() {
            lower.pop();
        }
        lower.push(x.clone());
    }
    let mut upper: Vec<Vec<Q>> = Vec::new();
    for x in p.iter().rev() {
        while upper.len() >= 2 && cross2(&upper[upper.len() - 2], &upper[upper.len() - 1], x) <= Q::zero() {
            upper.pop();
        }
        upper.push(x.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub fn polygon_area(poly: &[Vec<Q>]) -> Q {
    let k = poly.len();
    let mut s = Q::zero();
    for i in 0..k {
        let (a, b) = (&poly[i], &poly[(i + 1) % k]);
        s += &a[0] * &b[1] - &a[1] * &b[0];
    }
    s.abs() / qi(2)
}

fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn cross3(u: &[Q], v: &[Q]) -> Vec<Q> {
    vec![
        &u[1] * &v[2] - &u[2] * &v[1],
        &u[2] * &v[0] - &u[0] * &v[2],
        &u[0] * &v[1] - &u[1] * &v[0],
    ]
}

fn dot(u: &[Q], v: &[Q]) -> Q {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Volume of the convex hull of rational points in dimension 2 or 3 by
/// brute-force supporting-plane search and pyramid decomposition.
pub fn hull_volume(points: &[Vec<Q>]) -> Q {
    match points[0].len() {
        2 => polygon_area(&polygon(points)),
        3 => {
            let m = points.len();
            let centroid: Vec<Q> = (0..3).map(|j| points.iter().map(|p| p[j].clone()).sum::<Q>() / qi(m as i64)).collect();
            let mut seen: Vec<(Vec<Q>, Q)> = Vec::new();
            let mut vol = Q::zero();
            for i in 0..m {
                for j in i + 1..m {
                    for k in j + 1..m {
                        let nrm = cross3(&sub(&points[j], &points[i]), &sub(&points[k], &points[i]));
                        if nrm.iter().all(Zero::is_zero) {
                            continue;
                        }
                        let off = dot(&nrm, &points[i]);
                        let (mut above, mut below) = (false, false);
                        for p in points {
                            match dot(&nrm, p).cmp(&off) {
                                Ordering::Greater => above = true,
                                Ordering::Less => below = true,
                                Ordering::Equal => {}
                            }
                            if above && below {
                                break;
                            }
                        }
                        let (nrm, off) = match (above, below) {
                            (true, true) => continue,
                            (_, false) => (nrm, off),
                            (false, true) => (nrm.iter().map(|x| -x).collect(), -off),
                        };
                        // normalize so the first nonzero entry is ±1
                        let lead = nrm.iter().find(|x| !x.is_zero()).unwrap().abs();
                        let key: Vec<Q> = nrm.iter().map(|x| x / &lead).collect();
                        let koff = &off / &lead;
                        if seen.iter().any(|(a, b)| *a == key && *b == koff) {
                            continue;
                        }
                        seen.push((key.clone(), koff.clone()));
                        let on: Vec<&Vec<Q>> = points.iter().filter(|p| dot(&key, p) == koff).collect();
                        let drop = (0..3).max_by(|&a, &b| key[a].abs().cmp(&key[b].abs())).unwrap();
                        let proj: Vec<Vec<Q>> = on
                            .iter()
                            .map(|p| (0..3).filter(|&a| a != drop).map(|a| p[a].clone()).collect())
                            .collect();
                        let area = polygon_area(&polygon(&proj));
                        let h = (dot(&key, &centroid) - &koff).abs();
                        vol += h * area / key[drop].abs() / qi(3);
                    }
                }
            }
            vol
        }
        n => panic!("dimension {n}"),
    }
}

/// Determinant by fraction-exact Gaussian elimination.
pub fn det_q(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Q::from_integer(1.into());
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Q::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            let f = &a[r][col] / &a[col][col];
            for k in col..n {
                let t = &f * &a[col][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

/// Solves `M x = b` by Cramer's rule.
pub fn cramer(m: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let d = det_q(m);
    if d.is_zero() {
        return None;
    }
    let n = m.len();
    Some(
        (0..n)
            .map(|j| {
                let mj: Vec<Vec<Q>> = (0..n)
                    .map(|i| (0..n).map(|k| if k == j { b[i].clone() } else { m[i][k].clone() }).collect())
                    .collect();
                det_q(&mj) / &d
            })
            .collect(),
    )
}

/// Inverse of a small float matrix by Gauss-Jordan with partial pivoting.
pub fn inverse_f64(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().cloned().chain((0..n).map(|j| if i == j { 1.0 } else { 0.0 })).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(p, col);
        let piv = a[col][col];
        for v in a[col].iter_mut() {
            *v /= piv;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                let row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(row) {
                    *x -= f * y;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Float basis rows of a lattice, taken from the exact entries.
pub fn basis_f64(lat: &Lattice) -> Vec<Vec<f64>> {
    lat.basis().iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect()
}

/// Every integer vector with `lo[i] ≤ cᵢ ≤ hi[i]`.
pub fn integer_range(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for (&a, &b) in lo.iter().zip(hi) {
        out = out
            .into_iter()
            .flat_map(|v| {
                (a..=b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Lattice points `c` with `x = Bc` in the open positive orthant, every
/// coordinate below `t`, and `w·c < d`. Scans the coefficient box around the
/// simplex `{x ≥ 0, ⟨u, x⟩ ≤ d}` where `u = B⁻ᵀ w`. Returns `None` if that
/// box has more than `cap` points.
pub fn points_below_facet(lat: &Lattice, w: &[i64], d: i64, t: &Q, cap: usize) -> Option<Vec<Vec<i64>>> {
    let n = lat.dim();
    let b = basis_f64(lat);
    let binv = inverse_f64(&b);
    // u_j = Σ_i binv[i][j] w_i
    let u: Vec<f64> = (0..n).map(|j| (0..n).map(|i| binv[i][j] * w[i] as f64).sum()).collect();
    if u.iter().any(|&x| x <= 0.0) {
        return None;
    }
    let mut lo = vec![0i64; n];
    let mut hi = vec![0i64; n];
    for k in 0..n {
        let corner = d as f64 / u[k];
        for i in 0..n {
            let c = binv[i][k] * corner;
            lo[i] = lo[i].min(c.floor() as i64 - 1);
            hi[i] = hi[i].max(c.ceil() as i64 + 1);
        }
    }
    // the window cube gives a second box; keep the tighter side of each
    let tf = klein_core::rational::to_f64(t);
    for i in 0..n {
        let up: f64 = binv[i].iter().map(|&x| x.max(0.0) * tf).sum();
        let down: f64 = binv[i].iter().map(|&x| x.min(0.0) * tf).sum();
        lo[i] = lo[i].max(down.floor() as i64 - 1);
        hi[i] = hi[i].min(up.ceil() as i64 + 1);
    }
    let size: f64 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as f64).product();
    if size > cap as f64 {
        return None;
    }
    let tt = Scalar::Rational(t.clone());
    let hits = integer_range(&lo, &hi)
        .into_iter()
        .filter(|c| w.iter().zip(c).map(|(a, b)| a * b).sum::<i64>() < d)
        .filter(|c| {
            let x: Vec<f64> = (0..n).map(|i| (0..n).map(|j| b[i][j] * c[j] as f64).sum()).collect();
            x.iter().all(|&v| v > -1e-6)
        })
        .filter(|c| ambient(lat, c).iter().all(|x| x.is_positive() && x.cmp(&tt) == Ordering::Less))
        .collect();
    Some(hits)
}

pub const CUBIC: &str = "x^3 + x^2 - 2x - 1";

/// The lattices and windows every structural check runs over.
pub fn test_lattices() -> Vec<(String, Lattice, Q)> {
    use klein_core::lattice::parse_alpha;
    use klein_core::rational::q;
    let mut out = Vec::new();
    for (name, t) in [("sqrt2m1", 200), ("golden", 100), ("7/16", 40)] {
        let a = parse_alpha(name).unwrap();
        out.push((format!("alpha {name}"), Lattice::alpha_sail_lattice(&a).unwrap(), q(t)));
    }
    out.push(("cubic disc 49".into(), Lattice::from_cubic_field(CUBIC).unwrap(), q(40)));
    for seed in 0..4 {
        out.push((format!("random 3d seed {seed}"), Lattice::random_rational(3, seed), q(50)));
    }
    out
}

fn random_q(rng: &mut ChaCha8Rng, span: i64) -> Q {
    Q::new(BigInt::from(rng.gen_range(-span..=span)), BigInt::from(rng.gen_range(1..=4)))
}

pub fn zonotope_vertices(xs: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = xs[0].len();
    let mut pts: Vec<Vec<Q>> = (0..1usize << xs.len())
        .map(|mask| {
            (0..n)
                .map(|j| xs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, x)| x[j].clone()).sum())
                .collect()
        })
        .collect();
    pts.sort();
    pts.dedup();
    pts
}

/// Zonotope instances with a nonzero volume.
pub fn zonotope_instances(count: usize, seed: u64) -> Vec<Vec<Vec<Q>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(2..=3);
        let m = rng.gen_range(n..=6);
        let xs: Vec<Vec<Q>> = (0..m).map(|_| (0..n).map(|_| random_q(&mut rng, 5)).collect()).collect();
        let full: Vec<Vec<Q>> = xs[..n].to_vec();
        if !det_q(&full).is_zero() {
            out.push(xs);
        }
    }
    out
}

fn add(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Both sides of the simplicial identity, by Cramer's rule throughout.
pub fn identity_sides(rs: &[Vec<Q>], v: &[Q]) -> (Q, Q) {
    let n = rs.len();
    let mut ws = Vec::new();
    let mut prod = qi(1);
    for i in 0..n {
        let mut pts = vec![v.to_vec()];
        pts.extend((0..n).filter(|&j| j != i).map(|j| add(v, &rs[j])));
        ws.push(cramer(&pts, &vec![qi(1); n]).unwrap());
        prod *= det_q(&pts).abs();
    }
    let lhs = det_q(&ws).abs();
    let rhs = det_q(rs).abs().pow(n as i32 - 1) / prod;
    (lhs, rhs)
}

pub fn simplicial_instances(count: usize, seed: u64) -> Vec<(Vec<Vec<Q>>, Vec<Q>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = 2 + out.len() % 3;
        let rs: Vec<Vec<Q>> = (0..n).map(|_| (0..n).map(|_| random_q(&mut rng, 6)).collect()).collect();
        if det_q(&rs).is_zero() {
            continue;
        }
        let lambda: Vec<Q> = (0..n).map(|_| Q::new(BigInt::from(rng.gen_range(1..=9)), BigInt::from(rng.gen_range(1..=5)))).collect();
        let v: Vec<Q> = (0..n).map(|j| rs.iter().zip(&lambda).map(|(r, l)| &r[j] * l).sum()).collect();
        // the facet simplices must be nondegenerate for the right side to exist
        let degenerate = (0..n).any(|i| {
            let mut pts = vec![v.clone()];
            pts.extend((0..n).filter(|&j| j != i).map(|j| add(&v, &rs[j])));
            det_q(&pts).is_zero()
        });
        if !degenerate {
            out.push((rs, v));
        }
    }
    out
}

