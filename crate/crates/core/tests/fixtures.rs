//! Frozen instances found by search, pinned so regressions show up as
//! changed numbers.

mod common;

use klein_core::determinants::det_facet;
use klein_core::normmin::{box_property_witnesses, norm_minimum_estimate, t0_compare};
use klein_core::polar::polar_vertex_of_facet;
use klein_core::rational::q;
use klein_core::sail::{build_sail_patch, SailOptions};
use klein_core::Lattice;
use num_bigint::BigInt;
use num_traits::Signed;
use std::cmp::Ordering;

#[test]
fn facet_at_integer_distance_two() {
    let lat = Lattice::random_rational(3, 0);
    let patch = build_sail_patch(&lat, &q(30), &SailOptions::default()).unwrap();
    let (i, f) = patch.certified_facets().find(|(_, f)| f.normal == [5, 12, -9]).expect("fixture facet");
    assert_eq!(f.intdist, 2);
    let mut vs = patch.vertex_coeffs(f);
    vs.sort();
    assert_eq!(vs, vec![vec![-5, 15, 17], vec![-2, 7, 8], vec![1, 2, 3]]);
    for v in &vs {
        assert_eq!(v.iter().zip(&f.normal).map(|(a, b)| a * b).sum::<i64>(), 2);
    }
    let pv = polar_vertex_of_facet(&patch, i).unwrap();
    assert!(pv.scaled_in_dual_lattice());
    assert!(!pv.in_dual_lattice());
    let ds: Vec<i64> = patch.certified_facets().map(|(_, f)| f.intdist).collect();
    assert!(ds.contains(&3) && ds.contains(&4));
}

/// A random lattice where a certified facet of determinant 8 has one of its
/// own vertices inside the rotated box of side `T₀`.
#[test]
fn box_claim_counterexample() {
    let lat = Lattice::random_rational(3, 2);
    let patch = build_sail_patch(&lat, &q(50), &SailOptions::default()).unwrap();
    let f = &patch.facets[2];
    assert!(f.certified);
    assert_eq!(f.intdist, 1);
    let d = det_facet(&patch, f).unwrap();
    assert_eq!(d, BigInt::from(8));
    let w = box_property_witnesses(&lat, &f.normal, &d, 1_000_000).unwrap();
    assert_eq!(w, vec![vec![-8, 11, -3], vec![-3, 4, 0], vec![0, 0, 1]]);
    let verts = patch.vertex_coeffs(f);
    assert!(verts.contains(&vec![0, 0, 1]) && verts.contains(&vec![-8, 11, -3]));

    // independent float check in the rotated frame
    let binv = common::inverse_f64(&common::basis_f64(&lat));
    let u: Vec<f64> = (0..3).map(|j| (0..3).map(|i| binv[i][j] * f.normal[i] as f64).sum()).collect();
    let lambda = (u[0] * u[1] * u[2]).cbrt();
    let x = lat.ambient_f64(&[0, 0, 1]);
    let t0 = 8f64.cbrt() / 3f64.sqrt();
    for i in 0..3 {
        assert!(u[i] * x[i] / lambda < t0, "coordinate {i}");
    }
}

#[test]
fn t0_comparison_is_exact_at_the_boundary() {
    // T₀ = 2 exactly when n = 2 and det F = 8
    assert_eq!(t0_compare(&q(2), &BigInt::from(8), 2), Ordering::Equal);
    assert_eq!(t0_compare(&klein_core::rational::qf(199, 100), &BigInt::from(8), 2), Ordering::Less);
}

/// Minimum of `|x₁⋯xₙ|` over the nonzero points of the open cube, by a full
/// scan of the coefficient box that covers it.
fn brute_norm_minimum(lat: &Lattice, t: i64) -> f64 {
    let n = lat.dim();
    let b = common::basis_f64(lat);
    let binv = common::inverse_f64(&b);
    let r: Vec<i64> = (0..n).map(|i| (t as f64 * binv[i].iter().map(|x| x.abs()).sum::<f64>()).ceil() as i64 + 1).collect();
    let lo: Vec<i64> = r.iter().map(|x| -x).collect();
    let mut best: Option<(f64, Vec<i64>)> = None;
    for c in common::integer_range(&lo, &r) {
        if c.iter().all(|&x| x == 0) {
            continue;
        }
        let x: Vec<f64> = (0..n).map(|i| (0..n).map(|j| b[i][j] * c[j] as f64).sum()).collect();
        if x.iter().any(|v| v.abs() > t as f64 + 1e-6) {
            continue;
        }
        let p = x.iter().product::<f64>().abs();
        if best.as_ref().map_or(true, |(m, _)| p < *m) {
            best = Some((p, c));
        }
    }
    best.unwrap().0
}

#[test]
fn norm_minimum_matches_full_scan() {
    let golden = Lattice::alpha_sail_lattice(&klein_core::lattice::parse_alpha("golden").unwrap()).unwrap();
    let cubic = Lattice::from_cubic_field(common::CUBIC).unwrap();
    for (lat, t) in [(golden, 100), (cubic, 10), (Lattice::random_rational(3, 1), 8)] {
        let est = norm_minimum_estimate(&lat, &q(t), 10_000_000).unwrap();
        let raw = brute_norm_minimum(&lat, t);
        // the estimate is reported in the determinant-one normalization
        let scaled = est.value.to_f64() * lat.scale().to_f64();
        assert!((scaled - raw).abs() <= 1e-9 * raw.max(1e-30), "{scaled} vs {raw}");
    }
}
