use neurobif::bifpoint::BifKind;
use neurobif::equilibria::*;
use neurobif::linalg::{bialternate, det, eigen, Matrix};
use neurobif::model::System;
use neurobif::{Jr, Wc};

fn census<S: System<f64>>(m: &S, range: (f64, f64), n: usize) -> (usize, usize, usize) {
    let r = codim1_report(m, range, n).unwrap();
    assert!(unexplained_stability_changes(&r).is_empty(), "{:?}", unexplained_stability_changes(&r));
    (r.count(BifKind::SaddleNode), r.count(BifKind::HopfSubcritical), r.count(BifKind::HopfSupercritical))
}

fn jr(j: f64) -> Jr {
    let mut m = Jr::default();
    m.set_param("j", j).unwrap();
    m
}

#[test]
fn jr_census_over_j() {
    assert_eq!(census(&jr(4.0), (-12.0, 20.0), 2000), (0, 0, 0));
    assert_eq!(census(&jr(8.0), (-12.0, 20.0), 2000), (2, 0, 0));
    assert_eq!(census(&jr(11.0), (-12.0, 20.0), 2000), (2, 1, 0));
    assert_eq!(census(&jr(12.285), (-12.0, 20.0), 2000), (2, 1, 2));
    assert_eq!(census(&jr(14.0), (-12.0, 20.0), 2000), (2, 0, 1));
}

#[test]
fn wc_low_coupling_has_no_bifurcations() {
    let mut m = Wc::default();
    m.set_param("j", 5.0).unwrap();
    assert_eq!(census(&m, (-12.0, 25.0), 3000), (0, 0, 0));
}

#[test]
fn reported_points_zero_their_test_functions() {
    let m = jr(12.285);
    let tol = Codim1Tolerances::default();
    let grid: Vec<f64> = (0..2000).map(|k| -12.0 + 32.0 * k as f64 / 1999.0).collect();
    for s in locate_saddle_nodes(&m, &grid, &tol) {
        let scale = det(&jacobian_at(&m, s.x + 1e-3)).abs();
        assert!(sn_test(&m, s.x).abs() < 1e-6 * scale.max(1.0));
        assert!(s.transversality.abs() > 1e-6 && s.quadratic.abs() > 1e-6);
    }
    for h in locate_hopf(&m, &grid, &tol) {
        let sp = eigen(&jacobian_at(&m, h.x)).unwrap();
        let k = critical_pair(&sp, &tol).expect("pure imaginary pair");
        assert!((sp.values[k].im - h.omega).abs() < 1e-6);
        assert!(h.transversality.abs() > 1e-6);
    }
}

#[test]
fn neutral_saddle_is_not_hopf() {
    // eigenvalues +1 and -1 zero the bialternate determinant but give no
    // pure imaginary pair
    let j: Matrix<f64> = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
    assert!(det(&bialternate(&j)).abs() < 1e-14);
    let sp = eigen(&j).unwrap();
    assert!(critical_pair(&sp, &Codim1Tolerances::default()).is_none());
}
