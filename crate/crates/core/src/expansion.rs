//! Order-by-order assembly of `f(λ + τ)`.
//!
//! The order-`n` term has `(i, p)` entry
//! `Σ_{m_1..m_{n-1}} f[λ_i, λ_m1, ..., λ_p] τ_{i m1} ... τ_{m_{n-1} p}`.
//! [`Strategy::PathSum`] enumerates the `N^{n-1}` interior paths per entry;
//! [`Strategy::Quadrature`] evaluates the whole term as one contour integral
//! of resolvent products, which costs polynomially in `n`.

use std::fmt;

use crate::contour::{
    choose_contour, matrix_function_resolvent, resolvent_term, Contour, QuadratureOptions,
};
use crate::divided::coefficient_a;
use crate::error::{Error, Result};
use crate::function::AnalyticFunction;
use crate::matrix::CMatrix;
use crate::scalar::{cone, czero, Real, C};
use crate::spectrum::{perturbed_matrix, DiagonalSpectrum, PerturbationMatrix};

/// Default cap on `Σ_n N^{n+1}` for the path-sum strategy.
pub const DEFAULT_WORK_CAP: f64 = 1e7;

/// Term cap of [`matrix_taylor_oracle`].
pub const ORACLE_MAX_TERMS: usize = 10_000;

/// The oracle's shifted matrix must have Frobenius norm below this fraction
/// of `f`'s Taylor radius.
pub const ORACLE_RADIUS_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    PathSum,
    #[default]
    Quadrature,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::PathSum => "path-sum",
            Strategy::Quadrature => "quadrature",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionOptions<T> {
    pub strategy: Strategy,
    pub quadrature: QuadratureOptions<T>,
    /// Stop once a term's Frobenius norm drops below this multiple of
    /// `‖terms[0]‖_F`. `None` always computes every order up to `n_max`.
    pub stop_rtol: Option<T>,
    /// Path-sum work cap.
    pub work_cap: f64,
}

impl<T: Real> Default for ExpansionOptions<T> {
    fn default() -> Self {
        Self {
            strategy: Strategy::default(),
            quadrature: QuadratureOptions::default(),
            stop_rtol: Some(T::lit(1e-14)),
            work_cap: DEFAULT_WORK_CAP,
        }
    }
}

impl<T: Real> ExpansionOptions<T> {
    pub fn with_strategy(strategy: Strategy) -> Self {
        Self {
            strategy,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionResult<T> {
    /// `terms[0] = diag(f(λ_i))`, then orders 1, 2, ...
    pub terms: Vec<CMatrix<T>>,
    pub truncated_sum: CMatrix<T>,
    /// Frobenius norm of each term.
    pub term_norms: Vec<T>,
    pub strategy: Strategy,
    /// Whether the last computed term fell below the stopping threshold.
    pub converged: bool,
    /// Contour used by the quadrature strategy.
    pub contour: Option<Contour<T>>,
}

impl<T: Real> ExpansionResult<T> {
    /// Highest order present.
    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    /// Sum of terms `0..=n` (all terms if `n` exceeds the computed order).
    pub fn partial_sum(&self, n: usize) -> CMatrix<T> {
        let dim = self.truncated_sum.rows();
        self.terms
            .iter()
            .take(n + 1)
            .fold(CMatrix::zeros(dim, dim), |acc, t| &acc + t)
    }
}

/// Estimated number of scalar path terms for orders `1..=n_max`.
pub fn path_sum_work(dim: usize, n_max: usize) -> f64 {
    (1..=n_max).map(|n| (dim as f64).powi(n as i32 + 1)).sum()
}

/// Order-`n` term by explicit summation over index paths.
pub fn path_sum_term<T: Real>(
    f: &AnalyticFunction<T>,
    lambda: &DiagonalSpectrum<T>,
    tau: &PerturbationMatrix<T>,
    n: usize,
) -> Result<CMatrix<T>> {
    tau.check_against(lambda)?;
    if n == 0 {
        return Err(Error::Dimension("path-sum terms start at order 1".into()));
    }
    let dim = lambda.len();
    let t = tau.matrix();
    let mut out = CMatrix::zeros(dim, dim);
    let mut path = vec![0usize; n + 1];
    for i in 0..dim {
        for p in 0..dim {
            path[0] = i;
            path[n] = p;
            let mut interior = vec![0usize; n - 1];
            let mut acc = czero();
            loop {
                path[1..n].copy_from_slice(&interior);
                let weight = path
                    .windows(2)
                    .fold(cone(), |w: C<T>, e| w * t[(e[0], e[1])]);
                if weight != czero() {
                    acc = acc + coefficient_a(f, lambda, &path)? * weight;
                }
                // odometer over interior indices
                let mut pos = interior.len();
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    interior[pos] += 1;
                    if interior[pos] < dim {
                        break;
                    }
                    interior[pos] = 0;
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                }
                if interior.is_empty() || pos == usize::MAX {
                    break;
                }
            }
            out[(i, p)] = acc;
        }
    }
    Ok(out)
}

/// Expands `f(λ + τ)` through order `n_max`.
pub fn expand<T: Real>(
    f: &AnalyticFunction<T>,
    lambda: &DiagonalSpectrum<T>,
    tau: &PerturbationMatrix<T>,
    n_max: usize,
    opts: &ExpansionOptions<T>,
) -> Result<ExpansionResult<T>> {
    tau.check_against(lambda)?;
    if n_max == 0 {
        return Err(Error::Dimension("expansion order must be at least 1".into()));
    }
    let dim = lambda.len();
    let contour = match opts.strategy {
        Strategy::PathSum => {
            let estimated = path_sum_work(dim, n_max);
            if estimated > opts.work_cap {
                return Err(Error::Budget {
                    estimated,
                    cap: opts.work_cap,
                });
            }
            None
        }
        Strategy::Quadrature => Some(choose_contour(
            lambda,
            f,
            tau.frobenius_norm(),
            &opts.quadrature,
        )?),
    };

    let diag: Vec<C<T>> = lambda
        .values()
        .iter()
        .map(|&l| f.eval(l))
        .collect::<Result<_>>()?;
    let zeroth = CMatrix::from_diagonal(&diag);
    let stop_tol = opts.stop_rtol.map(|rtol| {
        (rtol * zeroth.frobenius_norm()).max(T::lit(1e-300).max(T::min_positive_value()))
    });

    let mut terms = vec![zeroth.clone()];
    let mut term_norms = vec![zeroth.frobenius_norm()];
    let mut truncated_sum = zeroth;
    let mut converged = false;
    for n in 1..=n_max {
        let term = match &contour {
            None => path_sum_term(f, lambda, tau, n)?,
            Some(c) => resolvent_term(f, lambda, tau, n, c, &opts.quadrature)?,
        };
        let norm = term.frobenius_norm();
        truncated_sum = &truncated_sum + &term;
        terms.push(term);
        term_norms.push(norm);
        if stop_tol.is_some_and(|tol| norm < tol) {
            converged = true;
            break;
        }
    }
    Ok(ExpansionResult {
        terms,
        truncated_sum,
        term_norms,
        strategy: opts.strategy,
        converged,
        contour,
    })
}

/// Dense ground truth `Σ_k f^(k)(c)/k! (M - cI)^k` with `c = trace(M)/N`.
///
/// Summation stops once three consecutive terms have max-abs entry below
/// `tol`. Non-entire `f` requires `‖M - cI‖_F < 0.9 ×` the Taylor radius at `c`.
pub fn matrix_taylor_oracle<T: Real>(f: &AnalyticFunction<T>, m: &CMatrix<T>, tol: T) -> Result<CMatrix<T>> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::Dimension(format!("oracle needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    let dim = m.rows();
    let center = m.trace() / T::from_usize_lossy(dim);
    let shifted = m - &CMatrix::from_diagonal(&vec![center; dim]);
    let norm = shifted.frobenius_norm();
    let radius = f.taylor_radius(center);
    if !f.is_entire() && (norm.is_nan() || norm >= T::lit(ORACLE_RADIUS_FRACTION) * radius) {
        return Err(Error::Radius {
            norm: norm.to_f64().unwrap_or(f64::NAN),
            radius: radius.to_f64().unwrap_or(f64::NAN),
        });
    }

    let mut power = CMatrix::identity(dim);
    let mut sum = CMatrix::zeros(dim, dim);
    let mut below = 0;
    for k in 0..ORACLE_MAX_TERMS {
        let coef = f.taylor_coefficient(k as u32, center)?;
        let term = power.scale(coef);
        sum.axpy(cone(), &term);
        if !sum.is_finite() {
            return Err(Error::Convergence("matrix Taylor series overflowed".into()));
        }
        if k > 0 && term.max_abs() < tol {
            below += 1;
            if below >= 3 {
                return Ok(sum);
            }
        } else {
            below = 0;
        }
        power = &power * &shifted;
    }
    Err(Error::Convergence(format!(
        "matrix Taylor series not below {tol} after {ORACLE_MAX_TERMS} terms"
    )))
}

/// Which dense reference produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Taylor,
    Resolvent,
}

impl fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReferenceKind::Taylor => "matrix-taylor",
            ReferenceKind::Resolvent => "resolvent-quadrature",
        })
    }
}

/// `f(λ + τ)` from the Taylor oracle when its precondition holds, otherwise
/// from resolvent quadrature on a contour enclosing `λ` inflated by `‖τ‖_F`.
pub fn reference_matrix_function<T: Real>(
    f: &AnalyticFunction<T>,
    lambda: &DiagonalSpectrum<T>,
    tau: &PerturbationMatrix<T>,
    taylor_tol: T,
    quadrature: &QuadratureOptions<T>,
) -> Result<(CMatrix<T>, ReferenceKind)> {
    let m = perturbed_matrix(lambda, tau)?;
    match matrix_taylor_oracle(f, &m, taylor_tol) {
        Ok(v) => Ok((v, ReferenceKind::Taylor)),
        Err(Error::Radius { .. }) => {
            let contour = choose_contour(lambda, f, tau.frobenius_norm(), quadrature)?;
            let v = matrix_function_resolvent(f, &m, &contour, quadrature)?;
            Ok((v, ReferenceKind::Resolvent))
        }
        Err(e) => Err(e),
    }
}

/// Truncation errors of the expansion of `f(λ + sτ)` against the dense reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceProfile<T> {
    pub scales: Vec<T>,
    /// `errors[n - 1][j]`: max-abs error of the order-`n` truncation at `scales[j]`.
    pub errors: Vec<Vec<T>>,
    /// Least-squares slope of `ln(error)` against `ln(s)` per order; `None`
    /// when the truncation is exact to rounding at every scale.
    pub slopes: Vec<Option<T>>,
    pub reference: ReferenceKind,
}

/// Absolute error floor (relative to the reference's size) under which a
/// truncation counts as exact.
pub const EXACT_FLOOR: f64 = 1e-13;

pub fn convergence_profile<T: Real>(
    f: &AnalyticFunction<T>,
    lambda: &DiagonalSpectrum<T>,
    tau: &PerturbationMatrix<T>,
    n_max: usize,
    scales: &[T],
    opts: &ExpansionOptions<T>,
) -> Result<ConvergenceProfile<T>> {
    if scales.is_empty() || scales.iter().any(|&s| s <= T::zero() || !s.is_finite()) {
        return Err(Error::Domain("scales must be positive and finite".into()));
    }
    let full = ExpansionOptions {
        stop_rtol: None,
        ..*opts
    };
    let mut errors = vec![Vec::with_capacity(scales.len()); n_max];
    let mut reference = ReferenceKind::Taylor;
    let mut ref_size = T::zero();
    for &s in scales {
        let tau_s = tau.scaled(s);
        let result = expand(f, lambda, &tau_s, n_max, &full)?;
        let (exact, kind) =
            reference_matrix_function(f, lambda, &tau_s, T::lit(1e-17), &opts.quadrature)?;
        if kind == ReferenceKind::Resolvent {
            reference = kind;
        }
        ref_size = ref_size.max(exact.max_abs());
        let mut partial = result.terms[0].clone();
        for (n, errs) in errors.iter_mut().enumerate() {
            partial = &partial + &result.terms[n + 1];
            errs.push(partial.max_abs_diff(&exact));
        }
    }
    let floor = T::lit(EXACT_FLOOR) * T::one().max(ref_size);
    let log_s: Vec<T> = scales.iter().map(|s| s.ln()).collect();
    let slopes = errors
        .iter()
        .map(|errs| {
            if errs.iter().all(|&e| e <= floor) || scales.len() < 2 {
                None
            } else {
                let log_e: Vec<T> = errs.iter().map(|&e| e.max(T::min_positive_value()).ln()).collect();
                Some(least_squares_slope(&log_s, &log_e))
            }
        })
        .collect();
    Ok(ConvergenceProfile {
        scales: scales.to_vec(),
        errors,
        slopes,
        reference,
    })
}

fn least_squares_slope<T: Real>(x: &[T], y: &[T]) -> T {
    let n = T::from_usize_lossy(x.len());
    let mx = x.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = y.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (sxy, sxx) = x.iter().zip(y).fold((T::zero(), T::zero()), |(sxy, sxx), (&a, &b)| {
        (sxy + (a - mx) * (b - my), sxx + (a - mx) * (a - mx))
    });
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    type F = AnalyticFunction<f64>;
    type S = DiagonalSpectrum<f64>;
    type P = PerturbationMatrix<f64>;
    type M = CMatrix<f64>;

    fn real_scalar(x: f64) -> C<f64> {
        Complex::new(x, 0.0)
    }

    fn swap2() -> P {
        P::new(M::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap()
    }

    #[test]
    fn zero_perturbation() {
        let l = S::from_real(&[0.3, -1.2, 2.0]).unwrap();
        for strategy in [Strategy::PathSum, Strategy::Quadrature] {
            let r = expand(&F::sin(), &l, &P::zeros(3), 5, &ExpansionOptions::with_strategy(strategy)).unwrap();
            assert!(r.converged);
            assert_eq!(r.terms.len(), 2);
            assert_eq!(r.term_norms[1], 0.0);
            for i in 0..3 {
                assert_eq!(r.terms[0][(i, i)], l.values()[i].sin());
            }
        }
    }

    #[test]
    fn square_of_two_by_two() {
        let l = S::from_real(&[1.0, 2.0]).unwrap();
        let tau = swap2();
        let want1 = M::from_real_rows(&[&[0.0, 3.0], &[3.0, 0.0]]);
        let full = (&l.to_matrix() + tau.matrix()).pow(2);
        for strategy in [Strategy::PathSum, Strategy::Quadrature] {
            let opts = ExpansionOptions {
                stop_rtol: None,
                ..ExpansionOptions::with_strategy(strategy)
            };
            let r = expand(&F::monomial(2), &l, &tau, 3, &opts).unwrap();
            assert!(r.terms[1].max_abs_diff(&want1) < 1e-12);
            assert!(r.terms[2].max_abs_diff(&M::identity(2)) < 1e-12);
            assert!(r.terms[3].max_abs() < 1e-12);
            assert!(r.truncated_sum.max_abs_diff(&full) < 1e-12);
        }
    }

    #[test]
    fn truncated_sum_is_sum_of_terms() {
        let l = S::from_real(&[0.1, 0.5]).unwrap();
        let tau = swap2().scaled(0.05);
        let r = expand(&F::exp(), &l, &tau, 4, &ExpansionOptions::default()).unwrap();
        assert!(r.partial_sum(r.order()).max_abs_diff(&r.truncated_sum) == 0.0);
    }

    #[test]
    fn path_sum_budget() {
        let l = S::from_real(&[1.0; 7]).unwrap();
        let opts = ExpansionOptions {
            work_cap: 1e3,
            ..ExpansionOptions::with_strategy(Strategy::PathSum)
        };
        assert!(matches!(
            expand(&F::exp(), &l, &P::zeros(7), 4, &opts),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn oracle_examples() {
        let c = real_scalar(0.7);
        let m = M::from_diagonal(&[c, c]);
        let v = matrix_taylor_oracle(&F::cos(), &m, 1e-15).unwrap();
        assert!(v.max_abs_diff(&M::from_diagonal(&[c.cos(), c.cos()])) < 1e-16);

        let n = M::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let e = matrix_taylor_oracle(&F::exp(), &n, 1e-14).unwrap();
        assert_eq!(e, M::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]));
    }

    #[test]
    fn oracle_radius_precondition() {
        let m = M::from_real_rows(&[&[0.1, 0.0], &[0.0, 2.0]]);
        assert!(matches!(
            matrix_taylor_oracle(&F::log(), &m, 1e-12),
            Err(Error::Radius { .. })
        ));
    }

    #[test]
    fn reference_falls_back_to_resolvent() {
        // ‖λ - 3I‖_F = 2√2 exceeds 0.9 × 3, but a circle around 3 of radius
        // 2.5 still clears the cut
        let l = S::from_real(&[1.0, 5.0]).unwrap();
        let (v, kind) =
            reference_matrix_function(&F::log(), &l, &P::zeros(2), 1e-15, &QuadratureOptions::default())
                .unwrap();
        assert_eq!(kind, ReferenceKind::Resolvent);
        let want = M::from_diagonal(&[real_scalar(0.0), real_scalar(5f64.ln())]);
        assert!(v.max_abs_diff(&want) < 1e-10);
    }

    #[test]
    fn slope_fit_on_exact_power_law() {
        let x: Vec<f64> = [1.0f64, 0.5, 0.25].iter().map(|v| v.ln()).collect();
        let y: Vec<f64> = [1.0f64, 0.5, 0.25].iter().map(|v| (3.0 * v.ln()) + 2.0).collect();
        assert!((least_squares_slope(&x, &y) - 3.0).abs() < 1e-14);
    }
}
