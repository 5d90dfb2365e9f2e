//! Integer points of a bounded polytope `{c : g·c ≤ h}` in coefficient space.
//!
//! The polytope is held in floating point and only used to bound the search
//! level by level (with conservative widening); every candidate is handed to
//! an exact filter supplied by the caller.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::rational::{to_f64, Q};

pub const DEFAULT_BUDGET: usize = 1_000_000;
pub const BUDGET_ENV: &str = "KLEIN_POINT_BUDGET";

/// Budget from the environment, falling back to [`DEFAULT_BUDGET`].
pub fn default_budget() -> usize {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Clone, Debug)]
pub struct Polytope {
    pub n: usize,
    pub rows: Vec<(Vec<f64>, f64)>,
}

/// What the exact filter decided about a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Skip,
    Take,
    /// Take the point and ignore the rest of the current line.
    TakeAndStop,
    /// Ignore the rest of the current line.
    Stop,
    /// End the whole enumeration.
    Halt,
}

impl Polytope {
    pub fn new(n: usize) -> Self {
        Polytope { n, rows: Vec::new() }
    }

    pub fn push(&mut self, g: Vec<f64>, h: f64) {
        debug_assert_eq!(g.len(), self.n);
        self.rows.push((g, h));
    }

    /// `lo_i ≤ (B c)_i ≤ hi_i` for every coordinate with a given bound.
    pub fn lattice_box(lat: &Lattice, lo: &[Option<f64>], hi: &[Option<f64>]) -> Self {
        let mut p = Polytope::new(lat.dim());
        for (i, row) in lat.approx_basis().iter().enumerate() {
            if let Some(l) = lo[i] {
                p.push(row.iter().map(|x| -x).collect(), -l);
            }
            if let Some(h) = hi[i] {
                p.push(row.clone(), h);
            }
        }
        p
    }

    /// The open box `(0, T)ⁿ` in ambient coordinates.
    pub fn orthant_window(lat: &Lattice, t: &Q) -> Self {
        let n = lat.dim();
        let tf = to_f64(t);
        Self::lattice_box(lat, &vec![Some(0.0); n], &vec![Some(tf); n])
    }

    /// The open cube `(−T, T)ⁿ`.
    pub fn centered_box(lat: &Lattice, t: &Q) -> Self {
        let n = lat.dim();
        let tf = to_f64(t);
        Self::lattice_box(lat, &vec![Some(-tf); n], &vec![Some(tf); n])
    }

    /// Range of variable `v` over the slice with `fixed` variables set.
    fn range(&self, fixed: &[(usize, i64)], free: &[usize], v: usize) -> Option<(i64, i64)> {
        let reduced: Vec<(Vec<f64>, f64)> = self
            .rows
            .iter()
            .map(|(g, h)| {
                let shift: f64 = fixed.iter().map(|&(j, x)| g[j] * x as f64).sum();
                (free.iter().map(|&j| g[j]).collect(), h - shift)
            })
            .collect();
        let pos = free.iter().position(|&j| j == v).unwrap();
        let (lo, hi) = if free.len() == 1 {
            interval(&reduced)?
        } else {
            vertex_range(&reduced, free.len(), pos)?
        };
        let slack = 1e-7 * (1.0 + lo.abs().max(hi.abs()));
        let lo = (lo - slack).ceil();
        let hi = (hi + slack).floor();
        if lo > hi {
            return None;
        }
        if lo.abs() > 9.0e15 || hi.abs() > 9.0e15 {
            return Some((i64::MIN, i64::MAX));
        }
        Some((lo as i64, hi as i64))
    }
}

fn interval(rows: &[(Vec<f64>, f64)]) -> Option<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (g, h) in rows {
        let a = g[0];
        let tol = 1e-9 * (1.0 + h.abs());
        if a.abs() < 1e-300 {
            if *h < -tol {
                return None;
            }
        } else if a > 0.0 {
            hi = hi.min(h / a);
        } else {
            lo = lo.max(h / a);
        }
    }
    let tol = 1e-9 * (1.0 + lo.abs().max(hi.abs()).min(1e300));
    if lo > hi + tol {
        return None;
    }
    Some((lo, hi))
}

/// Min and max of coordinate `pos` over `{y : g·y ≤ h}` by enumerating
/// vertices (systems of `r` tight constraints).
fn vertex_range(rows: &[(Vec<f64>, f64)], r: usize, pos: usize) -> Option<(f64, f64)> {
    let m = rows.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        if let Some(y) = solve_tight(rows, &idx, r) {
            let feasible = rows.iter().all(|(g, h)| {
                let lhs: f64 = g.iter().zip(&y).map(|(a, b)| a * b).sum();
                let scale: f64 = g.iter().zip(&y).map(|(a, b)| (a * b).abs()).sum::<f64>() + h.abs();
                lhs <= h + 1e-7 * (1.0 + scale)
            });
            if feasible {
                lo = lo.min(y[pos]);
                hi = hi.max(y[pos]);
            }
        }
        // next combination
        let mut k = r;
        loop {
            if k == 0 {
                return (lo <= hi).then_some((lo, hi));
            }
            k -= 1;
            if idx[k] < m - r + k {
                idx[k] += 1;
                for t in k + 1..r {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn solve_tight(rows: &[(Vec<f64>, f64)], idx: &[usize], r: usize) -> Option<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| {
            let mut row = rows[i].0.clone();
            row.push(rows[i].1);
            row
        })
        .collect();
    let norm: f64 = a.iter().flat_map(|r| r[..r.len() - 1].iter()).fold(0.0, |m, x| m.max(x.abs()));
    for k in 0..r {
        let p = (k..r).max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap_or(Ordering::Equal))?;
        if a[p][k].abs() <= 1e-12 * norm {
            return None;
        }
        a.swap(p, k);
        for i in 0..r {
            if i != k {
                let f = a[i][k] / a[k][k];
                for j in k..=r {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
    }
    Some((0..r).map(|i| a[i][r] / a[i][i]).collect())
}

/// Visits candidate integer points level by level in `order`; `filter`
/// decides each candidate. Counts every visited node against `budget`.
pub fn enumerate<F>(poly: &Polytope, order: &[usize], budget: usize, mut filter: F) -> Result<Vec<Vec<i64>>>
where
    F: FnMut(&[i64]) -> Step,
{
    let n = poly.n;
    assert_eq!(order.len(), n);
    let mut out = Vec::new();
    let mut c = vec![0i64; n];
    let mut visited = 0usize;
    recurse(poly, order, 0, &mut c, &mut visited, budget, &mut filter, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    poly: &Polytope,
    order: &[usize],
    level: usize,
    c: &mut [i64],
    visited: &mut usize,
    budget: usize,
    filter: &mut F,
    out: &mut Vec<Vec<i64>>,
) -> Result<bool>
where
    F: FnMut(&[i64]) -> Step,
{
    let n = poly.n;
    let fixed: Vec<(usize, i64)> = order[..level].iter().map(|&j| (j, c[j])).collect();
    let v = order[level];
    let Some((lo, hi)) = poly.range(&fixed, &order[level..], v) else {
        return Ok(false);
    };
    if lo == i64::MIN || hi == i64::MAX || (hi as i128 - lo as i128) >= budget as i128 {
        return Err(Error::BudgetExceeded { budget });
    }
    for x in lo..=hi {
        *visited += 1;
        if *visited > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        c[v] = x;
        if level + 1 < n {
            if recurse(poly, order, level + 1, c, visited, budget, filter, out)? {
                return Ok(true);
            }
        } else {
            match filter(c) {
                Step::Skip => {}
                Step::Take => out.push(c.to_vec()),
                Step::TakeAndStop => {
                    out.push(c.to_vec());
                    break;
                }
                Step::Stop => break,
                Step::Halt => return Ok(true),
            }
        }
    }
    c[v] = 0;
    Ok(false)
}

/// All nonzero lattice points with every coordinate in the open interval
/// `(0, T)`, sorted lexicographically by coefficients.
pub fn orthant_points(lat: &Lattice, t: &Q, budget: usize) -> Result<Vec<Vec<i64>>> {
    if *t <= Q::from_integer(0.into()) {
        return Err(Error::NonPositiveWindow);
    }
    let poly = Polytope::orthant_window(lat, t);
    let order: Vec<usize> = (0..lat.dim()).collect();
    let tf = to_f64(t);
    let mut pts = enumerate(&poly, &order, budget, |c| {
        let inside = (0..c.len()).all(|i| {
            lat.coord_sign(c, i) == Ordering::Greater && lat.cmp_coord(c, i, t, tf) == Ordering::Less
        });
        if inside {
            Step::Take
        } else {
            Step::Skip
        }
    })?;
    pts.sort();
    Ok(pts)
}

/// Nonzero lattice points with `max |x_i| < T`.
pub fn box_points(lat: &Lattice, t: &Q, budget: usize) -> Result<Vec<Vec<i64>>> {
    if *t <= Q::from_integer(0.into()) {
        return Err(Error::NonPositiveWindow);
    }
    let poly = Polytope::centered_box(lat, t);
    let order: Vec<usize> = (0..lat.dim()).collect();
    let tf = to_f64(t);
    let neg = -t.clone();
    let mut pts = enumerate(&poly, &order, budget, |c| {
        if c.iter().all(|&x| x == 0) {
            return Step::Skip;
        }
        let inside = (0..c.len()).all(|i| {
            lat.cmp_coord(c, i, &neg, -tf) == Ordering::Greater
                && lat.cmp_coord(c, i, t, tf) == Ordering::Less
        });
        if inside {
            Step::Take
        } else {
            Step::Skip
        }
    })?;
    pts.sort();
    Ok(pts)
}
