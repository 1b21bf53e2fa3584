use std::f64::consts::PI;

use sfd::sim::{bessel_j0, bessel_j1, bessel_y0, bessel_y1, hankel2_0, SpecialError};

struct Row {
    x: f64,
    j0: f64,
    y0: f64,
    j1: f64,
    y1: f64,
}

fn reference() -> Vec<Row> {
    include_str!("fixtures/bessel_ref.txt")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let v: Vec<f64> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            Row { x: v[0], j0: v[1], y0: v[2], j1: v[3], y1: v[4] }
        })
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `J_0(x) = (1/pi) int_0^pi cos(x sin t) dt`; the integrand is smooth and periodic, so the
/// midpoint rule converges geometrically once the node count exceeds `x`.
fn j0_quadrature(x: f64) -> f64 {
    let n = 2 * (x as usize + 64);
    let h = PI / n as f64;
    (0..n).map(|i| (x * ((i as f64 + 0.5) * h).sin()).cos()).sum::<f64>() / n as f64
}

#[test]
fn table_has_thousand_log_spaced_points() {
    let rows = reference();
    assert_eq!(rows.len(), 1000);
    assert_eq!(rows[0].x, 1e-3);
    assert!((rows[999].x - 200.0).abs() < 1e-12);
}

#[test]
fn j0_y0_match_high_precision_table() {
    let mut worst = (0.0_f64, 0.0_f64);
    for r in reference() {
        worst.0 = worst.0.max(rel(bessel_j0(r.x), r.j0));
        worst.1 = worst.1.max(rel(bessel_y0(r.x).unwrap(), r.y0));
    }
    assert!(worst.0 < 1e-8, "J0 worst relative error {:e}", worst.0);
    assert!(worst.1 < 1e-8, "Y0 worst relative error {:e}", worst.1);
}

#[test]
fn j1_y1_match_high_precision_table() {
    for r in reference() {
        assert!(rel(bessel_j1(r.x), r.j1) < 1e-8, "J1({})", r.x);
        assert!(rel(bessel_y1(r.x).unwrap(), r.y1) < 1e-8, "Y1({})", r.x);
    }
}

#[test]
fn j0_matches_quadrature() {
    for r in reference().iter().step_by(7) {
        let q = j0_quadrature(r.x);
        assert!((bessel_j0(r.x) - q).abs() < 1e-13, "x = {}: {} vs {}", r.x, bessel_j0(r.x), q);
    }
}

#[test]
fn wronskian() {
    for r in reference() {
        let x = r.x;
        let w = bessel_j1(x) * bessel_y0(x).unwrap() - bessel_j0(x) * bessel_y1(x).unwrap();
        let want = 2.0 / (PI * x);
        assert!(rel(w, want) < 1e-8, "x = {x}: {w} vs {want}");
    }
}

#[test]
fn parity_and_domain() {
    for x in [0.3, 4.0, 31.0] {
        assert_eq!(bessel_j0(-x), bessel_j0(x));
        assert_eq!(bessel_j1(-x), -bessel_j1(x));
    }
    assert_eq!(bessel_j0(0.0), 1.0);
    assert_eq!(bessel_j1(0.0), 0.0);
    assert_eq!(bessel_y0(0.0), Err(SpecialError::Domain(0.0)));
    assert!(bessel_y1(-1.0).is_err());
    assert!(hankel2_0(f64::NAN).is_err());
}

#[test]
fn hankel_is_j_minus_i_y() {
    for x in [1e-2, 1.0, 24.99, 25.0, 150.0] {
        let h = hankel2_0(x).unwrap();
        assert_eq!(h.re, bessel_j0(x));
        assert_eq!(h.im, -bessel_y0(x).unwrap());
    }
}

#[test]
fn large_argument_envelope() {
    // |H0(2)(x)|^2 -> 2 / (pi x) (1 - 1/(8x^2) + ...)
    for x in [50.0, 120.0, 200.0] {
        let m2 = hankel2_0(x).unwrap().norm_sqr();
        let want = 2.0 / (PI * x) * (1.0 - 1.0 / (8.0 * x * x));
        assert!(rel(m2, want) < 1e-6);
    }
}

#[test]
fn first_j0_zero_from_quadrature_bisection() {
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if j0_quadrature(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x0 = 0.5 * (lo + hi);
    assert!((x0 - 2.404825557695773).abs() < 1e-12);
    assert!(bessel_j0(x0).abs() < 1e-13);
    assert_eq!(bessel_j0(0.0), 1.0);
}

#[test]
fn hankel_matches_leading_asymptotic_at_fifty() {
    let x = 50.0;
    let h = hankel2_0(x).unwrap();
    let lead = num_complex::Complex64::from_polar((2.0 / (PI * x)).sqrt(), -(x - PI / 4.0));
    assert!((h.norm() / lead.norm() - 1.0).abs() < 0.01);
    let dphase = (h / lead).arg();
    assert!(dphase.abs() < 0.01, "phase offset {dphase}");
}
