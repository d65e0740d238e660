//! Cauchy integrals on a circle by the trapezoidal rule.
//!
//! With nodes `z_j = c + r e^{iθ_j}`, `(1/2πi) ∮ g(z) dz` is approximated by
//! `(1/N) Σ g(z_j) (z_j - c)`. For integrands analytic in an annulus around
//! the circle the error decays geometrically in `N`; the node count doubles
//! (reusing earlier nodes) until successive estimates agree.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::function::{Analyticity, AnalyticFunction};
use crate::matrix::CMatrix;
use crate::scalar::{czero, Real, C};
use crate::spectrum::{DiagonalSpectrum, PerturbationMatrix};

/// Every enclosed point must satisfy `|z - center| <= MARGIN * radius`.
pub const MARGIN: f64 = 0.8;

/// Shifted matrices with a 1-norm condition estimate above this are singular.
pub const MAX_CONDITION: f64 = 1e14;

/// Nodes closer than `radius * POLE_GUARD` to a pole trigger a half-step rotation.
pub const POLE_GUARD: f64 = 1e-6;

/// Smallest enclosure radius used when the spectrum collapses to a point,
/// relative to `max(1, |center|)`.
const MIN_SPREAD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions<T> {
    /// Radius as a multiple of the spectral enclosure.
    pub radius_factor: T,
    pub initial_nodes: usize,
    pub max_nodes: usize,
    /// Successive estimates must agree to `tol * (1 + |estimate|)`.
    pub tol: T,
}

impl<T: Real> Default for QuadratureOptions<T> {
    fn default() -> Self {
        Self {
            radius_factor: T::lit(1.25),
            initial_nodes: 64,
            max_nodes: 4096,
            tol: T::lit(1e-12),
        }
    }
}

/// Circular contour `|z - center| = radius` sampled at `node_count` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour<T> {
    pub center: C<T>,
    pub radius: T,
    /// Initial trapezoidal node count (a power of two).
    pub node_count: usize,
}

impl<T: Real> Contour<T> {
    pub fn new(center: C<T>, radius: T, node_count: usize) -> Result<Self> {
        if radius <= T::zero() || !radius.is_finite() {
            return Err(Error::Contour(format!("radius must be positive and finite, got {radius}")));
        }
        if node_count == 0 || !node_count.is_power_of_two() {
            return Err(Error::Contour(format!(
                "node count must be a power of two, got {node_count}"
            )));
        }
        Ok(Self {
            center,
            radius,
            node_count,
        })
    }

    /// Ratio `|z - center| / radius`.
    pub fn margin_ratio(&self, z: C<T>) -> T {
        (z - self.center).norm() / self.radius
    }

    pub fn strictly_encloses(&self, z: C<T>) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// Whether the closed disk is free of `f`'s excluded set.
    pub fn avoids(&self, analyticity: &Analyticity<T>) -> bool {
        self.radius < analyticity.distance(self.center)
    }

    fn check_integrand_domain(&self, f: &AnalyticFunction<T>) -> Result<()> {
        if self.avoids(&f.analyticity()) {
            Ok(())
        } else {
            Err(Error::Contour(format!(
                "circle |z - {}| = {} meets the excluded set of {f}",
                self.center, self.radius
            )))
        }
    }

    fn check_encloses(&self, points: &[C<T>]) -> Result<()> {
        match points.iter().find(|&&z| !self.strictly_encloses(z)) {
            Some(z) => Err(Error::Contour(format!(
                "point {z} is not strictly inside |z - {}| = {}",
                self.center, self.radius
            ))),
            None => Ok(()),
        }
    }
}

/// Picks a circle around the spectrum (inflated by `tau_norm`) that keeps
/// every eigenvalue of `λ + τ` within `0.8 * radius` of the center and the
/// whole disk clear of `f`'s excluded set.
pub fn choose_contour<T: Real>(
    lambda: &DiagonalSpectrum<T>,
    f: &AnalyticFunction<T>,
    tau_norm: T,
    opts: &QuadratureOptions<T>,
) -> Result<Contour<T>> {
    if tau_norm < T::zero() || !tau_norm.is_finite() {
        return Err(Error::Contour(format!("invalid perturbation norm {tau_norm}")));
    }
    if opts.radius_factor < T::one() / T::lit(MARGIN) {
        return Err(Error::Contour(format!(
            "radius factor {} is below the margin limit {}",
            opts.radius_factor,
            1.0 / MARGIN
        )));
    }
    let points = lambda.values();
    let analyticity = f.analyticity();
    if let Some(z) = points
        .iter()
        .find(|&&z| analyticity.distance(z) <= tau_norm)
    {
        return Err(Error::Contour(format!(
            "eigenvalue {z} lies within {tau_norm} of the excluded set of {f}"
        )));
    }

    let enclosure = |c: C<T>| {
        points
            .iter()
            .fold(T::zero(), |acc, &z| acc.max((z - c).norm()))
            + tau_norm
    };
    let inv_margin = T::one() / T::lit(MARGIN);
    let candidate = |c: C<T>| -> Option<T> {
        let scale = T::one().max(c.norm());
        let e = enclosure(c);
        let need = inv_margin * e.max(T::lit(1e-8) * scale);
        let want = opts.radius_factor * e.max(T::lit(MIN_SPREAD) * scale);
        let d = analyticity.distance(c);
        if want < d {
            Some(want)
        } else if need < d {
            Some(need + (d - need) * T::lit(0.5))
        } else {
            None
        }
    };

    let mean = lambda.mean();
    let make = |c, r| Contour::new(c, r, opts.initial_nodes);
    if let Some(r) = candidate(mean) {
        return make(mean, r);
    }
    // Slide the center away from the nearest excluded point.
    let away = match analyticity.nearest_point(mean) {
        Some(p) if (mean - p).norm() > T::zero() => (mean - p) / (mean - p).norm(),
        _ => Complex::new(T::one(), T::zero()),
    };
    let step = enclosure(mean).max(T::lit(MIN_SPREAD)) / T::lit(16.0);
    for j in 1..=320 {
        let c = mean + away * (step * T::from_usize_lossy(j));
        if let Some(r) = candidate(c) {
            return make(c, r);
        }
    }
    Err(Error::Contour(format!(
        "no circle encloses the spectrum with margin {MARGIN} while avoiding the excluded set of {f}"
    )))
}

/// Quadrature values that can be accumulated and compared.
pub trait QuadValue<T: Real>: Clone {
    fn add_scaled(&mut self, w: C<T>, other: &Self);
    fn scaled(&self, s: T) -> Self;
    /// Max-abs distance.
    fn distance(&self, other: &Self) -> T;
    /// Max-abs size.
    fn size(&self) -> T;
}

impl<T: Real> QuadValue<T> for C<T> {
    fn add_scaled(&mut self, w: C<T>, other: &Self) {
        *self = *self + w * *other;
    }
    fn scaled(&self, s: T) -> Self {
        *self * s
    }
    fn distance(&self, other: &Self) -> T {
        (*self - *other).norm()
    }
    fn size(&self) -> T {
        self.norm()
    }
}

impl<T: Real> QuadValue<T> for CMatrix<T> {
    fn add_scaled(&mut self, w: C<T>, other: &Self) {
        self.axpy(w, other);
    }
    fn scaled(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }
    fn distance(&self, other: &Self) -> T {
        self.max_abs_diff(other)
    }
    fn size(&self) -> T {
        self.max_abs()
    }
}

/// Converged quadrature value with its doubling history.
#[derive(Debug, Clone)]
pub struct QuadratureReport<V, T> {
    pub value: V,
    /// Node count of the returned estimate.
    pub nodes: usize,
    /// `(N, |S_N - S_{N/2}|)` for every doubling performed.
    pub history: Vec<(usize, T)>,
}

/// Trapezoidal rule for `(1/2πi) ∮ g(z) dz` with node doubling.
/// `poles` only feed the node-proximity guard.
pub fn integrate<T, V, G>(
    contour: &Contour<T>,
    opts: &QuadratureOptions<T>,
    poles: &[C<T>],
    zero: V,
    mut g: G,
) -> Result<QuadratureReport<V, T>>
where
    T: Real,
    V: QuadValue<T>,
    G: FnMut(C<T>) -> Result<V>,
{
    let max_nodes = opts.max_nodes.max(contour.node_count);
    if !max_nodes.is_power_of_two() {
        return Err(Error::Contour(format!("max node count {max_nodes} is not a power of two")));
    }
    let two_pi = T::PI() + T::PI();
    let node = |theta: T| contour.center + Complex::from_polar(contour.radius, theta);

    // All levels are subsets of the finest grid, so guarding it guards them all.
    let guard = contour.radius * T::lit(POLE_GUARD);
    let finest = T::from_usize_lossy(max_nodes);
    let too_close = |phase: T| {
        (0..max_nodes).any(|j| {
            let z = node(phase + two_pi * T::from_usize_lossy(j) / finest);
            poles.iter().any(|&p| (z - p).norm() < guard)
        })
    };
    let phase = if !poles.is_empty() && too_close(T::zero()) {
        T::PI() / finest
    } else {
        T::zero()
    };

    let mut accumulate = |sum: &mut V, count: usize, offset: T, stride: usize| -> Result<()> {
        let total = T::from_usize_lossy(count * stride);
        for j in 0..count {
            let theta = phase + two_pi * (T::from_usize_lossy(j * stride) + offset) / total;
            let z = node(theta);
            let gz = g(z)?;
            sum.add_scaled(z - contour.center, &gz);
        }
        Ok(())
    };

    let mut n = contour.node_count;
    let mut sum = zero;
    accumulate(&mut sum, n, T::zero(), 1)?;
    let mut estimate = sum.scaled(T::one() / T::from_usize_lossy(n));
    let mut history = Vec::new();
    while n < max_nodes {
        // odd nodes of the 2n grid
        accumulate(&mut sum, n, T::lit(0.5), 1)?;
        n *= 2;
        let next = sum.scaled(T::one() / T::from_usize_lossy(n));
        let diff = next.distance(&estimate);
        history.push((n, diff));
        estimate = next;
        if diff <= opts.tol * (T::one() + estimate.size()) {
            return Ok(QuadratureReport {
                value: estimate,
                nodes: n,
                history,
            });
        }
    }
    Err(Error::Convergence(format!(
        "trapezoidal rule did not reach tolerance {} with {} nodes (last change {})",
        opts.tol,
        n,
        history.last().map_or(T::nan(), |h| h.1)
    )))
}

/// `(1/2πi) ∮ f(z) / Π_j (z - pole_j) dz`, i.e. the divided difference of
/// `f` over the poles (with multiplicity).
pub fn cauchy_coefficient<T: Real>(
    f: &AnalyticFunction<T>,
    poles: &[C<T>],
    contour: &Contour<T>,
    opts: &QuadratureOptions<T>,
) -> Result<C<T>> {
    cauchy_coefficient_report(f, poles, contour, opts).map(|r| r.value)
}

pub fn cauchy_coefficient_report<T: Real>(
    f: &AnalyticFunction<T>,
    poles: &[C<T>],
    contour: &Contour<T>,
    opts: &QuadratureOptions<T>,
) -> Result<QuadratureReport<C<T>, T>> {
    contour.check_encloses(poles)?;
    contour.check_integrand_domain(f)?;
    integrate(contour, opts, poles, czero(), |z| {
        let denom = poles.iter().fold(Complex::new(T::one(), T::zero()), |acc, &p| acc * (z - p));
        Ok(f.eval(z)? / denom)
    })
}

/// Order-`n` Dyson term `(1/2πi) ∮ f(z) R(z) (τ R(z))^n dz` with the diagonal
/// resolvent `R(z) = diag(1 / (z - λ_i))`.
pub fn resolvent_term<T: Real>(
    f: &AnalyticFunction<T>,
    lambda: &DiagonalSpectrum<T>,
    tau: &PerturbationMatrix<T>,
    n: usize,
    contour: &Contour<T>,
    opts: &QuadratureOptions<T>,
) -> Result<CMatrix<T>> {
    tau.check_against(lambda)?;
    let poles = lambda.values();
    contour.check_encloses(poles)?;
    contour.check_integrand_domain(f)?;
    let dim = lambda.len();
    let report = integrate(contour, opts, poles, CMatrix::zeros(dim, dim), |z| {
        let r: Vec<C<T>> = poles.iter().map(|&l| (z - l).inv()).collect();
        let mut m = CMatrix::from_diagonal(&r);
        for _ in 0..n {
            m = (&m * tau.matrix()).scale_cols(&r);
        }
        Ok(m.scale(f.eval(z)?))
    })?;
    Ok(report.value)
}

/// `f(M) = (1/2πi) ∮ f(z) (zI - M)^{-1} dz` with a dense solve at every node.
/// The caller guarantees the contour encloses the spectrum of `M`.
pub fn matrix_function_resolvent<T: Real>(
    f: &AnalyticFunction<T>,
    m: &CMatrix<T>,
    contour: &Contour<T>,
    opts: &QuadratureOptions<T>,
) -> Result<CMatrix<T>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("matrix is {}x{}", m.rows(), m.cols())));
    }
    contour.check_integrand_domain(f)?;
    let dim = m.rows();
    let mut node = 0usize;
    let report = integrate(contour, opts, &[], CMatrix::zeros(dim, dim), |z| {
        let shifted = &CMatrix::from_diagonal(&vec![z; dim]) - m;
        let (inv, cond) = shifted.inverse_with_condition();
        let index = node;
        node += 1;
        match inv {
            Some(inv) if cond <= T::lit(MAX_CONDITION) => Ok(inv.scale(f.eval(z)?)),
            _ => Err(Error::Solve {
                node: index,
                condition: cond.to_f64().unwrap_or(f64::INFINITY),
            }),
        }
    })?;
    Ok(report.value)
}
