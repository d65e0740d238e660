//! Worked examples checked against independently computed values.

mod common;

use common::*;
use num_complex::Complex64;
use optaylor::contour::{cauchy_coefficient, choose_contour, matrix_function_resolvent};
use optaylor::expansion::{convergence_profile, expand, matrix_taylor_oracle};
use optaylor::lemma::{coefficient_from_b, path_coefficient_b, BMethod};
use optaylor::{
    coefficient_a, divided_difference, Contour64, ExpansionOptions, Function64, Matrix64, NodeList,
    Perturbation64, QuadratureOptions, Spectrum64, Strategy,
};

fn quad() -> QuadratureOptions<f64> {
    QuadratureOptions::default()
}

#[test]
fn exp_over_log_spaced_nodes() {
    // nodes 0, a, 2a with a = ln 2 and values 1, 2, 4: the Lagrange form
    // collapses to 1/(2a²) - 2/a² + 4/(2a²) = 1/(2a²)
    let a = std::f64::consts::LN_2;
    let expected = 0.5 / (a * a);
    let nodes = vec![r(0.0), r(a), r(2.0 * a)];
    let f = Function64::exp();
    let rec = divided_difference(&f, &NodeList::new(nodes.clone())).unwrap();
    assert!(rel(rec, r(expected)) < 1e-12);
    let l = Spectrum64::new(nodes.clone()).unwrap();
    let contour = choose_contour(&l, &f, 0.0, &quad()).unwrap();
    let q = cauchy_coefficient(&f, &nodes, &contour, &quad()).unwrap();
    assert!(rel(q, rec) < 1e-9);
}

#[test]
fn lemma_coefficient_matches_recurrence_for_quartic() {
    // f[1,2,3] of x^4 is the complete homogeneous polynomial
    // h_2(1,2,3) = 1 + 4 + 9 + 2 + 3 + 6 = 25
    let l = spectrum(&[1.0, 2.0, 3.0]);
    let f = Function64::monomial(4);
    let from_b = coefficient_from_b(&f, &l, &[0, 1, 2], 2, 10).unwrap();
    let a = coefficient_a(&f, &l, &[0, 1, 2]).unwrap();
    assert!(rel(from_b, r(25.0)) < 1e-14);
    assert!(rel(a, r(25.0)) < 1e-14);
}

#[test]
fn exp_coefficient_three_ways() {
    let l = spectrum(&[0.1, 0.4, 0.9]);
    let f = Function64::exp();
    let dd = coefficient_a(&f, &l, &[0, 1, 2]).unwrap();
    let lagrange = lagrange_dd(|z| z.exp(), l.values());
    assert!(rel(dd, lagrange) < 1e-12);
    let contour = choose_contour(&l, &f, 0.0, &quad()).unwrap();
    let q = cauchy_coefficient(&f, l.values(), &contour, &quad()).unwrap();
    assert!(rel(q, dd) < 1e-9);
    let from_b = coefficient_from_b(&f, &l, &[0, 1, 2], 2, 200).unwrap();
    assert!(rel(from_b, dd) < 1e-10);
}

#[test]
fn b_coefficient_brute_force_triple_sum() {
    // B^(3,λ,6) over path (0,2,1,3), written out as explicit loops
    let lv = [1.5_f64, -0.7, 2.2, 0.9];
    let path = [0usize, 2, 1, 3];
    let x: Vec<f64> = path.iter().map(|&i| lv[i]).collect();
    let n = 6;
    let mut brute = 0.0;
    for q in 0..n {
        for q1 in q + 1..n {
            for q2 in q1 + 1..n {
                brute += (x[1] / x[0]).powi(q2) * (x[2] / x[1]).powi(q1) * (x[3] / x[2]).powi(q);
            }
        }
    }
    brute /= x[0] * x[1] * x[2];
    let l = spectrum(&lv);
    for m in [BMethod::NestedSum, BMethod::Recurrence] {
        let v = path_coefficient_b(&l, &path, 3, n as u32, m).unwrap().value;
        assert!(rel(v, r(brute)) < 1e-13, "{m:?}");
    }
}

#[test]
fn expansion_of_exp_matches_taylor_oracle() {
    let mut g = rng(11);
    let l = spectrum(&[0.1, 0.5, 0.9]);
    let tau = perturbation_with_norm(&mut g, 3, 0.05);
    let f = Function64::exp();
    let res = expand(&f, &l, &tau, 6, &ExpansionOptions::default()).unwrap();
    let m = &l.to_matrix() + tau.matrix();
    let oracle = matrix_taylor_oracle(&f, &m, 1e-17).unwrap();
    assert!(res.truncated_sum.max_abs_diff(&oracle) < 1e-9);
}

#[test]
fn log_taylor_oracle_agrees_with_resolvent() {
    let f = Function64::log();
    let m = Matrix64::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => r(1.0),
        (1, 1) => r(1.2),
        (0, 1) => c(0.03, 0.01),
        _ => r(-0.02),
    });
    let taylor = matrix_taylor_oracle(&f, &m, 1e-12).unwrap();
    let l = spectrum(&[1.0, 1.2]);
    let contour = choose_contour(&l, &f, 0.05, &quad()).unwrap();
    let res = matrix_function_resolvent(&f, &m, &contour, &quad()).unwrap();
    assert!(taylor.max_abs_diff(&res) < 1e-10);
}

#[test]
fn exp_resolvent_matches_taylor_on_random_matrix() {
    let mut g = rng(5);
    let f = Function64::exp();
    let raw = random_complex_matrix(&mut g, 3, 1.0);
    let m = raw.scale(r(0.9 / raw.frobenius_norm()));
    let taylor = matrix_taylor_oracle(&f, &m, 1e-17).unwrap();
    let contour = Contour64::new(r(0.0), 1.25, 64).unwrap();
    let res = matrix_function_resolvent(&f, &m, &contour, &quad()).unwrap();
    assert!(taylor.max_abs_diff(&res) < 1e-10);
}

#[test]
fn profile_slopes_for_exp_and_sine() {
    let mut g = rng(3);
    let l = spectrum(&[0.1, 0.5, 0.9]);
    let tau = perturbation_with_norm(&mut g, 3, 0.1);
    let scales = [1.0, 0.5, 0.25, 0.125];
    let p = convergence_profile(&Function64::exp(), &l, &tau, 2, &scales, &ExpansionOptions::default()).unwrap();
    let s2 = p.slopes[1].unwrap();
    assert!((2.6..=3.4).contains(&s2), "slope {s2}");

    let l2 = Spectrum64::new(separated_points(&mut g, 2, 1.0, 0.3)).unwrap();
    let tau2 = perturbation_with_norm(&mut g, 2, 0.1);
    let p = convergence_profile(&Function64::sin(), &l2, &tau2, 1, &scales, &ExpansionOptions::default()).unwrap();
    let s1 = p.slopes[0].unwrap();
    assert!((1.7..=2.3).contains(&s1), "slope {s1}");

    let p = convergence_profile(&Function64::monomial(2), &l, &tau, 2, &scales, &ExpansionOptions::default()).unwrap();
    assert!(p.slopes[1].is_none(), "order-2 truncation of x² is exact");
}

#[test]
fn identity_function_has_only_first_order() {
    let mut g = rng(8);
    let l = Spectrum64::new(separated_points(&mut g, 3, 2.0, 0.2)).unwrap();
    let tau = Perturbation64::new(random_complex_matrix(&mut g, 3, 1.0)).unwrap();
    for strategy in [Strategy::PathSum, Strategy::Quadrature] {
        let opts = ExpansionOptions {
            stop_rtol: None,
            ..ExpansionOptions::with_strategy(strategy)
        };
        let res = expand(&Function64::monomial(1), &l, &tau, 3, &opts).unwrap();
        assert!(res.terms[1].max_abs_diff(tau.matrix()) < 1e-11);
        assert!(res.terms[2].max_abs() < 1e-11 && res.terms[3].max_abs() < 1e-11);
    }
}

#[test]
fn confluent_spectrum_expansion_matches_oracle() {
    // repeated eigenvalues force the Hermite branch in the path sum
    let mut g = rng(21);
    let l = spectrum(&[0.3, 0.3, -0.4]);
    let tau = perturbation_with_norm(&mut g, 3, 0.1);
    let f = Function64::cos();
    let m = &l.to_matrix() + tau.matrix();
    let oracle = matrix_taylor_oracle(&f, &m, 1e-17).unwrap();
    for strategy in [Strategy::PathSum, Strategy::Quadrature] {
        let res = expand(&f, &l, &tau, 8, &ExpansionOptions::with_strategy(strategy)).unwrap();
        assert!(res.truncated_sum.max_abs_diff(&oracle) < 1e-9, "{strategy}");
    }
}

#[test]
fn f32_instantiation_works() {
    use optaylor::{Function32, Spectrum32};
    let l = Spectrum32::from_real(&[0.5, 1.5]).unwrap();
    let d = coefficient_a(&Function32::monomial(2), &l, &[0, 1]).unwrap();
    assert!((d.re - 2.0).abs() < 1e-6);
    let _: Complex64 = r(0.0);
}
