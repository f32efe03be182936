use neurobif::cycles::{integrate, IntegratorOptions, Record};
use neurobif::linalg::diff::fd_jacobian;
use neurobif::model::{
    jr_to_physical, jr_to_reduced, reduce_jr, reduce_wc, sigmoid, sigmoid_prime, wc_to_physical, wc_to_reduced,
    DbtParams, JrOriginal, JrParams, PhysicalJrParams, PhysicalWcParams, System, VectorField, WcOriginal, WcParams,
};
use proptest::prelude::*;

fn rel_fro(a: &neurobif::linalg::Matrix<f64>, b: &neurobif::linalg::Matrix<f64>) -> f64 {
    let diff: f64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    diff / b.norm_fro().max(1e-300)
}

fn jacobian_matches<S: System<f64>>(m: &S, x: &[f64]) -> f64 {
    let fd = fd_jacobian(|y| Ok(m.eval_vec(y)), x, 1e-6).unwrap();
    rel_fro(&fd, &m.jacobian(x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sigmoid_derivative_identity(x in -40.0f64..40.0, lnk in -3.0f64..6.0) {
        let k0 = lnk.exp();
        let s = sigmoid(x, k0).unwrap();
        prop_assert!(s > 0.0 && s <= 1.0);
        prop_assert_eq!(sigmoid_prime(x, k0).unwrap(), s * (1.0 - s));
    }

    #[test]
    fn sigmoid_is_increasing(x in -30.0f64..30.0, dx in 1e-3f64..5.0) {
        let k0 = 3.36f64.exp();
        prop_assert!(sigmoid(x + dx, k0).unwrap() > sigmoid(x, k0).unwrap());
    }

    #[test]
    fn jr_jacobian_matches_finite_differences(x in prop::collection::vec(-5.0f64..5.0, 6), j in 0.0f64..20.0) {
        let p = JrParams { j, ..JrParams::default() };
        prop_assert!(jacobian_matches(&p, &x) < 1e-5);
    }

    #[test]
    fn wc_jacobian_matches_finite_differences(x in prop::collection::vec(-5.0f64..5.0, 10), j in 0.0f64..20.0) {
        let p = WcParams { j, ..WcParams::default() };
        prop_assert!(jacobian_matches(&p, &x) < 1e-5);
    }

    #[test]
    fn dbt_jacobian_matches_finite_differences(
        x in prop::collection::vec(-5.0f64..5.0, 2),
        beta in -2.0f64..2.0,
        gamma in -2.0f64..2.0,
        neg in any::<bool>(),
    ) {
        let p = DbtParams { alpha: 0.3, beta, gamma, sign: if neg { -1.0 } else { 1.0 } };
        prop_assert!(jacobian_matches(&p, &x) < 1e-5);
    }

    #[test]
    fn jr_equilibria_zero_the_field(x in -15.0f64..25.0, j in 0.0f64..20.0, g in 1.0f64..30.0, d in 0.1f64..2.0) {
        let mut p = JrParams { j, g, d, ..JrParams::default() };
        let (s, pin) = p.equilibrium(x);
        p.p = pin;
        let f = p.eval_vec(&s);
        prop_assert!(f.iter().all(|v| v.abs() <= 1e-10));
    }

    #[test]
    fn wc_equilibria_zero_the_field(x in -15.0f64..25.0, j in 0.0f64..20.0) {
        let mut p = WcParams { j, ..WcParams::default() };
        let (s, pin) = p.equilibrium(x);
        p.p = pin;
        prop_assert!(p.eval_vec(&s).iter().all(|v| v.abs() <= 1e-10));
        prop_assert!(s[5..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn jr_state_map_round_trip(y in prop::collection::vec(-50.0f64..50.0, 6)) {
        let ph = PhysicalJrParams::default();
        let back = jr_to_physical(&ph, &jr_to_reduced(&ph, &y));
        for (a, b) in y.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn wc_state_map_round_trip(y in prop::collection::vec(-50.0f64..50.0, 10)) {
        let ph = PhysicalWcParams::default();
        let back = wc_to_physical(&ph, &wc_to_reduced(&ph, &y));
        for (a, b) in y.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}

#[test]
fn input_curve_saturation_limits() {
    let p = JrParams::<f64>::default();
    let [a1, a2, a3, a4] = p.alpha;
    let s = |x: f64| 1.0 / (1.0 + p.k0 * (-x).exp());
    let lo = (a4 * p.g / p.d) * p.j * s(0.0) - a2 * p.j * s(0.0);
    let hi = (a4 * p.g / p.d) * p.j * s(a3 * p.j) - a2 * p.j * s(a1 * p.j);
    let (_, p_lo) = p.equilibrium(-60.0);
    let (_, p_hi) = p.equilibrium(80.0);
    assert!((p_lo + 60.0 - lo).abs() < 1e-9);
    assert!((p_hi - 80.0 - hi).abs() < 1e-9);
}

fn max_mapped_deviation<R, O>(
    reduced: &R,
    original: &O,
    y0: &[f64],
    to_reduced: impl Fn(&[f64]) -> Vec<f64>,
    a: f64,
) -> f64
where
    R: VectorField<f64>,
    O: VectorField<f64>,
{
    let tau_end = 50.0;
    let dtau = 0.25;
    let s0 = to_reduced(y0);
    let red = integrate(reduced, &s0, (0.0, tau_end), &IntegratorOptions::with_tol(1e-11).record(Record::Every(dtau)))
        .unwrap();
    let orig = integrate(
        original,
        y0,
        (0.0, tau_end / a),
        &IntegratorOptions::with_tol(1e-11).record(Record::Every(dtau / a)),
    )
    .unwrap();
    assert_eq!(red.states.len(), orig.states.len());
    let mut worst = 0.0f64;
    for (sr, so) in red.states.iter().zip(&orig.states) {
        let mapped = to_reduced(so);
        for (u, v) in sr.iter().zip(&mapped) {
            worst = worst.max((u - v).abs());
        }
    }
    worst
}

#[test]
fn jr_reduced_matches_original() {
    let ph = PhysicalJrParams { p: 220.0, ..PhysicalJrParams::default() };
    let reduced = reduce_jr(&ph);
    let y0 = [0.02, 5.0, 10.0, 0.5, -20.0, 30.0];
    let worst = max_mapped_deviation(&reduced, &JrOriginal(ph), &y0, |y| jr_to_reduced(&ph, y), ph.rate_a);
    assert!(worst < 1e-6, "max deviation {worst:e}");
}

#[test]
fn wc_reduced_matches_original() {
    let mut ph = PhysicalWcParams::default();
    ph.base.p = 250.0;
    let reduced = reduce_wc(&ph);
    let y0 = [0.02, 5.0, 10.0, 3.0, 0.1, 0.5, -20.0, 30.0, 4.0, -1.0];
    let worst = max_mapped_deviation(&reduced, &WcOriginal(ph), &y0, |y| wc_to_reduced(&ph, y), ph.base.rate_a);
    assert!(worst < 1e-6, "max deviation {worst:e}");
}
