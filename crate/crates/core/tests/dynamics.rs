use floquet_raman::dynamics::{
    hamiltonian_at, lab_frame_check, propagate_state, propagate_unitary, DriveParams, Integrator, Scheme,
};
use floquet_raman::floquet::eigenbasis;
use floquet_raman::units::{mhz, us};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

fn operating_point() -> DriveParams {
    DriveParams::from_mhz(10.03, 9.67, 2.37, 6.985).unwrap()
}

/// Independent reference: piecewise-constant Hamiltonian at the substep
/// midpoint, closed-form `exp(−i h·σ dt)`, fixed steps per drive period.
fn brute_force_p0(p: &DriveParams, c0: C64, c1: C64, t1: f64, steps_per_period: usize) -> f64 {
    let period = 2.0 * PI / p.omega;
    let n = ((t1 / period) * steps_per_period as f64).ceil() as usize;
    let dt = t1 / n as f64;
    let (mut a, mut b) = (c0, c1);
    let i = C64::i();
    for k in 0..n {
        let t = (k as f64 + 0.5) * dt;
        let hx = p.delta_x / 2.0 + p.amp_a * (p.omega * t).sin();
        let hz = p.delta_z / 2.0;
        let norm = hx.hypot(hz);
        let (s, c) = (norm * dt).sin_cos();
        let (nx, nz) = (hx / norm, hz / norm);
        // exp(−iθ n·σ) = cos θ − i sin θ (nx σx + nz σz)
        let u00 = C64::new(c, 0.0) - i * s * nz;
        let u11 = C64::new(c, 0.0) + i * s * nz;
        let u01 = -i * s * nx;
        (a, b) = (u00 * a + u01 * b, u01 * a + u11 * b);
    }
    a.norm_sqr()
}

#[test]
fn matches_fine_step_reference() {
    let p = operating_point();
    let theta = p.delta_x.atan2(p.delta_z);
    let (c0, c1) = (C64::new((theta / 2.0).cos(), 0.0), C64::new((theta / 2.0).sin(), 0.0));
    let reference = brute_force_p0(&p, c0, c1, us(1.0), 10_000);
    let plus = eigenbasis(&p).unwrap().plus;
    let ours = propagate_state(&plus, &p, 0.0, us(1.0), 1e-10).unwrap().p0();
    assert!((ours - reference).abs() < 1e-6, "{ours} vs {reference}");
}

#[test]
fn hamiltonian_is_hermitian_and_traceless() {
    let p = operating_point().with_phase_modulation(mhz(4.35 * 7.343), mhz(7.343)).unwrap();
    for k in 0..50 {
        let h = hamiltonian_at(&p, k as f64 * 3.7e-9).matrix;
        assert!(h.hermiticity_defect() < 1e-12 * p.omega0());
        assert!(h.trace().norm() < 1e-12 * p.omega0());
    }
}

#[test]
fn static_eigenvalues_match_closed_form() {
    let p = DriveParams::from_mhz(10.0, 10.0, 0.0, 1.0).unwrap();
    let h = hamiltonian_at(&p, 0.3e-6).matrix;
    let eig = h.eig_normal();
    let expected = mhz(7.0710678118654755);
    let mut ev: Vec<f64> = eig.iter().map(|(l, _)| l.re).collect();
    ev.sort_by(f64::total_cmp);
    assert!((ev[0] + expected).abs() < 1e-6 * expected);
    assert!((ev[1] - expected).abs() < 1e-6 * expected);
}

#[test]
fn time_reversal_returns_start_state() {
    let p = operating_point();
    let u = propagate_unitary(&p, us(0.1), us(0.9), 1e-10).unwrap();
    let psi = eigenbasis(&p).unwrap().minus;
    let back = u.inverse().apply(&u.apply(&psi));
    assert!(back.distance(&psi) < 1e-8);
}

#[test]
fn half_period_composition() {
    let p = operating_point();
    let t = 2.0 * PI / p.omega;
    let whole = propagate_unitary(&p, 0.0, t, 1e-11).unwrap();
    let halves =
        propagate_unitary(&p, 0.0, t / 2.0, 1e-11).unwrap().then(&propagate_unitary(&p, t / 2.0, t, 1e-11).unwrap()).unwrap();
    assert!((whole.u - halves.u).frobenius_norm() < 1e-8);
}

/// Fitted exponent of the error under step halving, against a much finer
/// run of the same scheme.
fn observed_order(scheme: Scheme, coarse: usize) -> f64 {
    let p = operating_point();
    let t1 = 2.0 * PI / p.omega;
    let integ = Integrator::new(1e-12).with_scheme(scheme);
    let reference = integ.fixed(&p, 0.0, t1, coarse * 64);
    let errs: Vec<f64> =
        [coarse, coarse * 2, coarse * 4].iter().map(|&n| (integ.fixed(&p, 0.0, t1, n) - reference).frobenius_norm()).collect();
    let slope = |a: f64, b: f64| (a / b).log2();
    0.5 * (slope(errs[0], errs[1]) + slope(errs[1], errs[2]))
}

#[test]
fn midpoint_converges_at_second_order() {
    let order = observed_order(Scheme::Midpoint, 16);
    assert!((order - Scheme::Midpoint.order() as f64).abs() < 0.3, "observed {order}");
}

#[test]
fn magnus_converges_at_fourth_order() {
    let order = observed_order(Scheme::Magnus4, 8);
    assert!((order - Scheme::Magnus4.order() as f64).abs() < 0.3, "observed {order}");
}

#[test]
fn modulation_is_continuous_at_zero_depth() {
    let p = operating_point();
    let nu = mhz(7.343);
    let plus = eigenbasis(&p).unwrap().plus;
    let plain = propagate_state(&plus, &p, 0.0, us(0.5), 1e-11).unwrap().p0();
    let tiny = p.with_phase_modulation(1e-9 * nu, nu).unwrap();
    let modulated = propagate_state(&plus, &tiny, 0.0, us(0.5), 1e-11).unwrap().p0();
    assert!((plain - modulated).abs() < 1e-6);
}

#[test]
fn rwa_residual_shrinks_with_carrier() {
    let p = operating_point();
    let residuals: Vec<f64> = [1445.8, 2891.6, 5783.2, 11566.4]
        .into_iter()
        .map(|f| lab_frame_check(&p, mhz(f), us(0.5)).unwrap())
        .collect();
    assert!(residuals[0] < 0.02);
    assert!(residuals.windows(2).all(|w| w[1] < w[0]), "{residuals:?}");
}

#[test]
fn diagonal_hamiltonian_has_no_rwa_residual() {
    let p = DriveParams::from_mhz(10.0, 0.0, 0.0, 7.0).unwrap();
    assert!(lab_frame_check(&p, mhz(1445.8), us(0.5)).unwrap() < 1e-9);
}
