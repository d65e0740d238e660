//! Exact expansion of `(λ + τ)^p` in the matrices
//! `[ε_q]_{ip} = (λ_p / λ_i)^q τ_{ip} / λ_i`, and the path coefficients `B`
//! that turn it into expansion coefficients for power series `f`.
//!
//! This is the slow, enumerative route. It only exists to cross-check the
//! divided-difference and quadrature coefficients, so it enumerates the
//! ordered index sums literally.

use crate::divided::are_confluent;
use crate::error::{Error, Result};
use crate::function::AnalyticFunction;
use crate::matrix::CMatrix;
use crate::scalar::{cone, cpowu, czero, Real, C};
use crate::spectrum::{DiagonalSpectrum, PerturbationMatrix};

/// Default cap on enumerated scalar terms per call.
pub const DEFAULT_WORK_CAP: f64 = 1e7;

/// Relative tolerance used by [`coefficient_from_b`] to decide that the
/// power-series tail is negligible.
pub const SERIES_RTOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonMatrix<T> {
    q: u32,
    entries: CMatrix<T>,
}

impl<T: Real> EpsilonMatrix<T> {
    pub fn new(lambda: &DiagonalSpectrum<T>, tau: &PerturbationMatrix<T>, q: u32) -> Result<Self> {
        tau.check_against(lambda)?;
        require_nonzero(lambda)?;
        let l = lambda.values();
        let entries = CMatrix::from_fn(l.len(), l.len(), |i, p| {
            cpowu(l[p] / l[i], q as u64) * tau[(i, p)] / l[i]
        });
        Ok(Self { q, entries })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn entries(&self) -> &CMatrix<T> {
        &self.entries
    }
}

fn require_nonzero<T: Real>(lambda: &DiagonalSpectrum<T>) -> Result<()> {
    match lambda.first_zero() {
        Some(index) => Err(Error::ZeroEigenvalue { index }),
        None => Ok(()),
    }
}

fn binomial_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `λ^p (1 + Σ_q ε_q + Σ_{q<q1} ε_{q1} ε_q + ...)`, keeping products of at
/// most `max_k` factors. With `max_k >= p` this is `(λ + τ)^p`.
pub fn expand_monomial_lemma<T: Real>(
    lambda: &DiagonalSpectrum<T>,
    tau: &PerturbationMatrix<T>,
    p: u32,
    max_k: u32,
) -> Result<CMatrix<T>> {
    expand_monomial_lemma_capped(lambda, tau, p, max_k, DEFAULT_WORK_CAP)
}

pub fn expand_monomial_lemma_capped<T: Real>(
    lambda: &DiagonalSpectrum<T>,
    tau: &PerturbationMatrix<T>,
    p: u32,
    max_k: u32,
    work_cap: f64,
) -> Result<CMatrix<T>> {
    tau.check_against(lambda)?;
    require_nonzero(lambda)?;
    let n = lambda.len();
    // products with more than p factors have an empty index range
    let max_k = max_k.min(p);
    let estimated: f64 = (1..=max_k as u64)
        .map(|k| binomial_f64(p as u64, k) * (n as f64).powi(k as i32 + 1))
        .sum();
    if estimated > work_cap {
        return Err(Error::Budget {
            estimated,
            cap: work_cap,
        });
    }

    let eps: Vec<CMatrix<T>> = (0..p)
        .map(|q| EpsilonMatrix::new(lambda, tau, q).map(|e| e.entries))
        .collect::<Result<_>>()?;

    // Depth-first over strictly decreasing subscripts q_{k-1} > ... > q_1 > q,
    // extending each product on the right.
    fn walk<T: Real>(
        eps: &[CMatrix<T>],
        prefix: &CMatrix<T>,
        last: usize,
        depth: u32,
        max_k: u32,
        total: &mut CMatrix<T>,
    ) {
        total.axpy(cone(), prefix);
        if depth == max_k {
            return;
        }
        for q in 0..last {
            let next = prefix * &eps[q];
            walk(eps, &next, q, depth + 1, max_k, total);
        }
    }

    let mut total = CMatrix::identity(n);
    if max_k > 0 {
        for (q, e) in eps.iter().enumerate() {
            walk(&eps, e, q, 1, max_k, &mut total);
        }
    }
    let lambda_p: Vec<C<T>> = lambda.values().iter().map(|&l| cpowu(l, p as u64)).collect();
    Ok(total.scale_rows(&lambda_p))
}

/// Checks `λ ε_{q1} ... ε_{qr} λ == λ² ε_{q1+1} ... ε_{qr+1}` entrywise,
/// relative to the largest entry of either side.
pub fn conjugation_identity_check<T: Real>(
    lambda: &DiagonalSpectrum<T>,
    tau: &PerturbationMatrix<T>,
    qs: &[u32],
) -> Result<bool> {
    tau.check_against(lambda)?;
    require_nonzero(lambda)?;
    let n = lambda.len();
    let l = lambda.values();
    let mut lhs = CMatrix::identity(n);
    let mut rhs = CMatrix::identity(n);
    for &q in qs {
        lhs = &lhs * EpsilonMatrix::new(lambda, tau, q)?.entries();
        rhs = &rhs * EpsilonMatrix::new(lambda, tau, q + 1)?.entries();
    }
    let lhs = lhs.scale_rows(l).scale_cols(l);
    let l2: Vec<C<T>> = l.iter().map(|&x| x * x).collect();
    let rhs = rhs.scale_rows(&l2);
    let scale = lhs.max_abs().max(rhs.max_abs());
    Ok(lhs.max_abs_diff(&rhs) <= T::lit(1e-12) * scale)
}

/// How [`path_coefficient_b`] evaluates `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BMethod {
    /// Literal ordered sum over `0 <= q < q_1 < ... < q_{k-1} <= n - 1`.
    NestedSum,
    /// `B^(k+1)_{i,m1,rest} = (B^(k)_{i,rest} - (λ_m1/λ_i)^n B^(k)_{m1,rest}) / (λ_i - λ_m1)`,
    /// dropping to the nested sum at `k = 1` and wherever `λ_i`, `λ_m1` are confluent.
    Recurrence,
}

/// `B^(k, λ, n)` along a fixed index path of `k + 1` indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathCoefficientB<T> {
    pub k: usize,
    pub n: u32,
    pub value: C<T>,
}

pub fn path_coefficient_b<T: Real>(
    lambda: &DiagonalSpectrum<T>,
    path: &[usize],
    k: usize,
    n: u32,
    method: BMethod,
) -> Result<PathCoefficientB<T>> {
    if k == 0 || path.len() != k + 1 {
        return Err(Error::Dimension(format!(
            "B coefficient of order k = {k} needs a path of k + 1 indices, got {}",
            path.len()
        )));
    }
    let x = lambda.nodes_along(path)?;
    if let Some(pos) = x.iter().position(|z| z.re == T::zero() && z.im == T::zero()) {
        return Err(Error::ZeroEigenvalue { index: path[pos] });
    }
    let value = match method {
        BMethod::NestedSum => b_nested(&x, n, DEFAULT_WORK_CAP)?,
        BMethod::Recurrence => b_recurrence(&x, n)?,
    };
    Ok(PathCoefficientB { k, n, value })
}

/// Ratio `x_{j+1}/x_j` carries the `(k-1-j)`-th smallest summation index.
fn b_nested<T: Real>(x: &[C<T>], n: u32, work_cap: f64) -> Result<C<T>> {
    let k = x.len() - 1;
    if (n as usize) < k {
        return Ok(czero());
    }
    let estimated = binomial_f64(n as u64, k as u64) * k as f64;
    if estimated > work_cap {
        return Err(Error::Budget {
            estimated,
            cap: work_cap,
        });
    }
    let n = n as usize;
    let powers: Vec<Vec<C<T>>> = (0..k)
        .map(|j| {
            let r = x[j + 1] / x[j];
            let mut v = Vec::with_capacity(n);
            let mut acc = cone();
            for _ in 0..n {
                v.push(acc);
                acc = acc * r;
            }
            v
        })
        .collect();

    // ascending combination q[0] < q[1] < ... < q[k-1]
    let mut q: Vec<usize> = (0..k).collect();
    let mut sum: C<T> = czero();
    loop {
        let term = (0..k).fold(cone::<T>(), |acc, j| acc * powers[j][q[k - 1 - j]]);
        sum = sum + term;
        let mut pos = k;
        while pos > 0 && q[pos - 1] == n - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        q[pos - 1] += 1;
        for j in pos..k {
            q[j] = q[j - 1] + 1;
        }
    }
    let denom = x[..k].iter().fold(cone::<T>(), |acc, &z| acc * z);
    Ok(sum / denom)
}

fn b_recurrence<T: Real>(x: &[C<T>], n: u32) -> Result<C<T>> {
    if (n as usize) < x.len() - 1 {
        return Ok(czero());
    }
    if x.len() == 2 || are_confluent(x[0], x[1]) {
        return b_nested(x, n, DEFAULT_WORK_CAP);
    }
    let mut first = Vec::with_capacity(x.len() - 1);
    first.push(x[0]);
    first.extend_from_slice(&x[2..]);
    let second = &x[1..];
    let a = b_recurrence(&first, n)?;
    let b = b_recurrence(second, n)?;
    Ok((a - cpowu(x[1] / x[0], n as u64) * b) / (x[0] - x[1]))
}

/// `A^(k) = Σ_n f^(n)(0)/n! · λ_i^n · B^(k, λ, n)` along `path`.
///
/// Polynomial kinds sum exactly up to their degree. Other kinds sum up to
/// `n_max` and fail with a convergence error unless two consecutive terms
/// have dropped below `1e-14` of the partial sum.
pub fn coefficient_from_b<T: Real>(
    f: &AnalyticFunction<T>,
    lambda: &DiagonalSpectrum<T>,
    path: &[usize],
    k: usize,
    n_max: u32,
) -> Result<C<T>> {
    let x = lambda.nodes_along(path)?;
    let zero = C::new(T::zero(), T::zero());
    let (last, exact) = match f.polynomial_degree() {
        Some(d) => (d as u32, true),
        None => (n_max, false),
    };
    let mut sum = czero();
    let mut small_run = 0;
    for n in 0..=last {
        let coef = f.taylor_coefficient(n, zero)?;
        let term = if (n as usize) < k || coef == zero {
            // B vanishes below k; still validate the path
            if n == 0 {
                path_coefficient_b(lambda, path, k, 0, BMethod::NestedSum)?;
            }
            zero
        } else {
            let b = path_coefficient_b(lambda, path, k, n, BMethod::Recurrence)?.value;
            coef * cpowu(x[0], n as u64) * b
        };
        sum = sum + term;
        if !exact && n as usize > k {
            if term.norm() <= T::lit(SERIES_RTOL) * sum.norm() {
                small_run += 1;
                if small_run >= 2 {
                    return Ok(sum);
                }
            } else {
                small_run = 0;
            }
        }
    }
    if exact {
        Ok(sum)
    } else {
        Err(Error::Convergence(format!(
            "power series for {f} along path {path:?} not converged after {n_max} terms"
        )))
    }
}
