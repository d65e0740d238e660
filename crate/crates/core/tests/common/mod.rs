#![allow(dead_code)]

use num_complex::Complex64;
use optaylor::{Matrix64, Perturbation64, Spectrum64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Lagrange form `Σ_j f(x_j) / Π_{k≠j} (x_j - x_k)` for distinct nodes.
pub fn lagrange_dd(f: impl Fn(Complex64) -> Complex64, xs: &[Complex64]) -> Complex64 {
    xs.iter()
        .enumerate()
        .map(|(j, &xj)| {
            let denom = xs
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .fold(c(1.0, 0.0), |acc, (_, &xk)| acc * (xj - xk));
            f(xj) / denom
        })
        .sum()
}

/// Random complex points in a disk of radius `radius`, pairwise separated by `min_sep`.
pub fn separated_points(rng: &mut ChaCha8Rng, n: usize, radius: f64, min_sep: f64) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = Vec::with_capacity(n);
    while pts.len() < n {
        let z = Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
        if pts.iter().all(|&p| (p - z).norm() >= min_sep) {
            pts.push(z);
        }
    }
    pts
}

/// Real distinct values with `|x|` in `[lo, hi]`, random sign, pairwise separated.
pub fn separated_reals(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64, min_sep: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = Vec::with_capacity(n);
    while pts.len() < n {
        let mag = rng.gen_range(lo..hi);
        let x = if rng.gen::<bool>() { mag } else { -mag };
        if pts.iter().all(|&p| (p - x).abs() >= min_sep) {
            pts.push(x);
        }
    }
    pts
}

pub fn random_real_matrix(rng: &mut ChaCha8Rng, n: usize, bound: f64) -> Matrix64 {
    Matrix64::from_fn(n, n, |_, _| r(rng.gen_range(-bound..bound)))
}

pub fn random_complex_matrix(rng: &mut ChaCha8Rng, n: usize, bound: f64) -> Matrix64 {
    Matrix64::from_fn(n, n, |_, _| c(rng.gen_range(-bound..bound), rng.gen_range(-bound..bound)))
}

/// Random perturbation rescaled to the given Frobenius norm.
pub fn perturbation_with_norm(rng: &mut ChaCha8Rng, n: usize, norm: f64) -> Perturbation64 {
    let m = random_complex_matrix(rng, n, 1.0);
    let s = norm / m.frobenius_norm();
    Perturbation64::new(m.scale(r(s))).unwrap()
}

pub fn spectrum(values: &[f64]) -> Spectrum64 {
    Spectrum64::from_real(values).unwrap()
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}
