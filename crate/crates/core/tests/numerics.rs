mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64 as C64;
use wallcross_core::numerics::{e1_scaled, gamma, integrate_ray, least_squares, ln_gamma, polygamma, rel_err};
use wallcross_core::rational::qvec;
use wallcross_core::resummation::{convergence_report, watson_validate, WatsonModel};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[test]
fn gamma_reference_values() {
    let c = |x: f64, y: f64| C64::new(x, y);
    assert!(rel_err(gamma(c(0.5, 0.0)).unwrap(), c(PI.sqrt(), 0.0)) < 1e-14);
    assert!(rel_err(gamma(c(5.0, 0.0)).unwrap(), c(24.0, 0.0)) < 1e-14);
    assert!(rel_err(gamma(c(1.0, 1.0)).unwrap(), c(0.498_015_668_118_356, -0.154_949_828_301_811)) < 1e-13);
    assert!(rel_err(gamma(c(-0.5, 0.0)).unwrap(), c(-2.0 * PI.sqrt(), 0.0)) < 1e-13);
    // ln Γ(100) = ln 99!
    let ln99: f64 = (1..100).map(|k| (k as f64).ln()).sum();
    assert!((ln_gamma(c(100.0, 0.0)).unwrap().re - ln99).abs() < 1e-10);
    assert!(gamma(c(-2.0, 0.0)).is_err());
}

#[test]
fn polygamma_reference_values() {
    let one = C64::new(1.0, 0.0);
    assert!((polygamma(0, one).unwrap().re + EULER_GAMMA).abs() < 1e-14);
    assert!((polygamma(1, one).unwrap().re - PI * PI / 6.0).abs() < 1e-13);
    assert!((polygamma(2, one).unwrap().re + 2.404_113_806_319_188_5).abs() < 1e-12);
    // ψ(1/2) = −γ − 2 ln 2
    let half = polygamma(0, C64::new(0.5, 0.0)).unwrap().re;
    assert!((half + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-14);
}

#[test]
fn exponential_integral_and_ray_quadrature() {
    // e E_1(1)
    let v = e1_scaled(C64::new(1.0, 0.0)).unwrap();
    assert!((v.re - 0.596_347_362_323_194).abs() < 1e-13);
    // ∫_0^∞ e^{-t} dt along a tilted ray
    let i = integrate_ray(|t| (-t).exp(), 0.3, 1e-13).unwrap();
    assert!(rel_err(i, C64::new(1.0, 0.0)) < 1e-12);
}

#[test]
fn least_squares_recovers_overdetermined_solution() {
    let a: Vec<Vec<C64>> = (0..6).map(|i| (0..3).map(|j| C64::new(((i * 7 + j * 3) % 5) as f64 + 1.0, (i + j) as f64 * 0.1)).collect()).collect();
    let x = [C64::new(1.0, -2.0), C64::new(0.5, 0.0), C64::new(-3.0, 1.0)];
    let b: Vec<C64> = a.iter().map(|row| row.iter().zip(&x).map(|(p, q)| p * q).sum()).collect();
    let ls = least_squares(&a, &b, 1e-12).unwrap();
    assert_eq!(ls.rank, 3);
    for (u, v) in ls.solution.iter().zip(&x) {
        assert!((u - v).norm() < 1e-12);
    }
}

#[test]
fn watson_euler_model() {
    let s = watson_validate(&WatsonModel::euler(120), &[10.0, 20.0, 40.0], 0.0, 1e-13).unwrap();
    for w in &s {
        assert!(w.rel_err_closed.unwrap() <= 1e-9, "u = {}", w.u);
        assert!(w.signature, "u = {}", w.u);
        // the truncation error sits at the size of the smallest term
        assert!(w.rel_err_truncation <= 2.0 * w.expected_scale + 1e-15, "u = {}", w.u);
    }
    assert!(s[1].rel_err_truncation <= 1e-6 && s[2].rel_err_truncation <= 1e-6);
    // at u = 10 the smallest term is ~ e^{-10}: 1e-6 is out of reach
    assert!(s[0].expected_scale > 1e-6);
}

#[test]
fn convergence_dichotomy() {
    let s = setup(&fixture_a());
    let rep = convergence_report(&s.data, &s.wall, &qvec(&[0, 0]), C64::new(1.0, 0.0)).unwrap();
    assert!(rep.plus.tends_to_zero());
    assert!(rep.minus.diverges());
    assert!((rep.locus_ratio - rep.locus_symbol).norm() < 1e-6);
    let b = setup(&fixture_b());
    let rep = convergence_report(&b.data, &b.wall, &qvec(&[0, 0]), C64::new(0.0, 1.0)).unwrap();
    assert!(rep.plus.tends_to_zero());
    assert!(rep.minus.diverges());
}
