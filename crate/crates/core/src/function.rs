//! Catalog of scalar analytic functions with exact derivative access.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cone, cpowu, czero, is_finite, Real, C};
use crate::text::{format_complex, parse_complex, split_top_level};

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind<T> {
    Exponential,
    Sine,
    Cosine,
    /// Principal branch, cut along the closed negative real axis.
    Logarithm,
    /// `x^p`.
    Monomial(u32),
    /// `c0 + c1 x + c2 x^2 + ...`.
    Polynomial(Vec<C<T>>),
    /// `1 / (x - a)`.
    ReciprocalShift(C<T>),
}

/// Where a function fails to be analytic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Analyticity<T> {
    Entire,
    /// The closed ray `(-inf, 0]`.
    NegativeRealCut,
    Pole(C<T>),
}

impl<T: Real> Analyticity<T> {
    /// Whether `z` lies in the excluded set.
    pub fn excludes(&self, z: C<T>) -> bool {
        match *self {
            Analyticity::Entire => false,
            Analyticity::NegativeRealCut => z.im == T::zero() && z.re <= T::zero(),
            Analyticity::Pole(a) => z == a,
        }
    }

    /// Distance from `z` to the excluded set (infinite for entire functions).
    pub fn distance(&self, z: C<T>) -> T {
        match *self {
            Analyticity::Entire => T::infinity(),
            Analyticity::NegativeRealCut => {
                if z.re >= T::zero() {
                    z.norm()
                } else {
                    z.im.abs()
                }
            }
            Analyticity::Pole(a) => (z - a).norm(),
        }
    }

    /// Point of the excluded set nearest to `z`.
    pub fn nearest_point(&self, z: C<T>) -> Option<C<T>> {
        match *self {
            Analyticity::Entire => None,
            Analyticity::NegativeRealCut => Some(Complex::new(z.re.min(T::zero()), T::zero())),
            Analyticity::Pole(a) => Some(a),
        }
    }
}

/// A scalar function `f` together with its analyticity domain.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticFunction<T> {
    kind: FunctionKind<T>,
}

impl<T: Real> AnalyticFunction<T> {
    pub fn exp() -> Self {
        Self {
            kind: FunctionKind::Exponential,
        }
    }

    pub fn sin() -> Self {
        Self {
            kind: FunctionKind::Sine,
        }
    }

    pub fn cos() -> Self {
        Self {
            kind: FunctionKind::Cosine,
        }
    }

    pub fn log() -> Self {
        Self {
            kind: FunctionKind::Logarithm,
        }
    }

    pub fn monomial(p: u32) -> Self {
        Self {
            kind: FunctionKind::Monomial(p),
        }
    }

    pub fn polynomial(coeffs: Vec<C<T>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("polynomial needs at least one coefficient".into()));
        }
        if !coeffs.iter().all(|&c| is_finite(c)) {
            return Err(Error::Domain("polynomial coefficients must be finite".into()));
        }
        Ok(Self {
            kind: FunctionKind::Polynomial(coeffs),
        })
    }

    pub fn reciprocal_shift(a: C<T>) -> Self {
        Self {
            kind: FunctionKind::ReciprocalShift(a),
        }
    }

    pub fn kind(&self) -> &FunctionKind<T> {
        &self.kind
    }

    pub fn analyticity(&self) -> Analyticity<T> {
        match self.kind {
            FunctionKind::Logarithm => Analyticity::NegativeRealCut,
            FunctionKind::ReciprocalShift(a) => Analyticity::Pole(a),
            _ => Analyticity::Entire,
        }
    }

    pub fn is_entire(&self) -> bool {
        matches!(self.analyticity(), Analyticity::Entire)
    }

    /// Degree for monomials and polynomials, `None` for transcendental kinds.
    pub fn polynomial_degree(&self) -> Option<usize> {
        match &self.kind {
            FunctionKind::Monomial(p) => Some(*p as usize),
            FunctionKind::Polynomial(c) => Some(c.len() - 1),
            _ => None,
        }
    }

    /// Coefficients in the monomial basis, for the polynomial kinds.
    pub fn polynomial_coefficients(&self) -> Option<Vec<C<T>>> {
        match &self.kind {
            FunctionKind::Monomial(p) => {
                let mut c = vec![czero(); *p as usize + 1];
                c[*p as usize] = cone();
                Some(c)
            }
            FunctionKind::Polynomial(c) => Some(c.clone()),
            _ => None,
        }
    }

    /// `alpha * f + beta * g` for polynomial-kind `f`, `g`.
    pub fn linear_combination(alpha: C<T>, f: &Self, beta: C<T>, g: &Self) -> Result<Self> {
        let (a, b) = match (f.polynomial_coefficients(), g.polynomial_coefficients()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Domain(
                    "linear combinations are limited to polynomial kinds".into(),
                ))
            }
        };
        let len = a.len().max(b.len());
        let coeffs = (0..len)
            .map(|j| {
                let x = a.get(j).copied().unwrap_or_else(czero);
                let y = b.get(j).copied().unwrap_or_else(czero);
                alpha * x + beta * y
            })
            .collect();
        Self::polynomial(coeffs)
    }

    /// Whether `f` maps the real axis (minus its excluded set) into the reals.
    pub fn is_real_on_real_axis(&self) -> bool {
        match &self.kind {
            FunctionKind::Polynomial(c) => c.iter().all(|z| z.im == T::zero()),
            FunctionKind::ReciprocalShift(a) => a.im == T::zero(),
            _ => true,
        }
    }

    pub fn check_domain(&self, z: C<T>) -> Result<()> {
        if !is_finite(z) {
            return Err(Error::Domain(format!("non-finite argument {z}")));
        }
        if self.analyticity().excludes(z) {
            return Err(Error::Domain(format!(
                "{} is not analytic at {}",
                self,
                format_complex(z)
            )));
        }
        Ok(())
    }

    pub fn eval(&self, z: C<T>) -> Result<C<T>> {
        self.eval_derivative(0, z)
    }

    /// `f^(k)(z)` in closed form.
    pub fn eval_derivative(&self, k: u32, z: C<T>) -> Result<C<T>> {
        self.check_domain(z)?;
        Ok(match &self.kind {
            FunctionKind::Exponential => z.exp(),
            FunctionKind::Sine => match k % 4 {
                0 => z.sin(),
                1 => z.cos(),
                2 => -z.sin(),
                _ => -z.cos(),
            },
            FunctionKind::Cosine => match k % 4 {
                0 => z.cos(),
                1 => -z.sin(),
                2 => -z.cos(),
                _ => z.sin(),
            },
            FunctionKind::Logarithm => {
                if k == 0 {
                    z.ln()
                } else {
                    // (-1)^(k-1) (k-1)! / z^k
                    let sign = if k % 2 == 1 { T::one() } else { -T::one() };
                    let num = factorial::<T>(k - 1) * sign;
                    cpowu(z, k as u64).inv() * num
                }
            }
            FunctionKind::Monomial(p) => {
                if k > *p {
                    czero()
                } else {
                    cpowu(z, (*p - k) as u64) * falling_factorial::<T>(*p, k)
                }
            }
            FunctionKind::Polynomial(coeffs) => {
                let k = k as usize;
                if k >= coeffs.len() {
                    czero()
                } else {
                    coeffs[k..]
                        .iter()
                        .enumerate()
                        .rev()
                        .fold(czero(), |acc, (off, &c)| {
                            acc * z + c * falling_factorial::<T>((off + k) as u32, k as u32)
                        })
                }
            }
            FunctionKind::ReciprocalShift(a) => {
                let sign = if k.is_multiple_of(2) { T::one() } else { -T::one() };
                cpowu(z - *a, k as u64 + 1).inv() * (factorial::<T>(k) * sign)
            }
        })
    }

    /// `f^(n)(c) / n!`, evaluated in a form that does not overflow for large `n`.
    pub fn taylor_coefficient(&self, n: u32, c: C<T>) -> Result<C<T>> {
        self.check_domain(c)?;
        Ok(match &self.kind {
            FunctionKind::Exponential | FunctionKind::Sine | FunctionKind::Cosine => {
                self.eval_derivative(n % 4, c)? * inv_factorial::<T>(n)
            }
            FunctionKind::Logarithm => {
                if n == 0 {
                    c.ln()
                } else {
                    let sign = if n % 2 == 1 { T::one() } else { -T::one() };
                    (cpowu(c, n as u64) * T::from_usize_lossy(n as usize)).inv() * sign
                }
            }
            FunctionKind::Monomial(p) => {
                if n > *p {
                    czero()
                } else {
                    cpowu(c, (*p - n) as u64) * binomial::<T>(*p, n)
                }
            }
            FunctionKind::Polynomial(coeffs) => {
                let n = n as usize;
                if n >= coeffs.len() {
                    czero()
                } else {
                    coeffs[n..]
                        .iter()
                        .enumerate()
                        .rev()
                        .fold(czero(), |acc, (off, &a)| {
                            acc * c + a * binomial::<T>((off + n) as u32, n as u32)
                        })
                }
            }
            FunctionKind::ReciprocalShift(a) => {
                let sign = if n.is_multiple_of(2) { T::one() } else { -T::one() };
                cpowu(c - *a, n as u64 + 1).inv() * sign
            }
        })
    }

    /// Radius of the disk around `c` on which the Taylor series at `c`
    /// converges to this (principal-branch) function.
    pub fn taylor_radius(&self, c: C<T>) -> T {
        self.analyticity().distance(c)
    }

    /// Parses `exp`, `sin`, `cos`, `log`, `pow:<p>`, `poly:<c0>,<c1>,...`, `recip:<a>`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse {
            line: 1,
            token: 1,
            message: msg,
        };
        let spec = spec.trim();
        let (head, arg) = match spec.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (spec, None),
        };
        match (head, arg) {
            ("exp", None) => Ok(Self::exp()),
            ("sin", None) => Ok(Self::sin()),
            ("cos", None) => Ok(Self::cos()),
            ("log", None) => Ok(Self::log()),
            ("pow", Some(p)) => p
                .trim()
                .parse::<u32>()
                .map(Self::monomial)
                .map_err(|_| bad(format!("invalid monomial degree `{p}`"))),
            ("poly", Some(list)) => {
                let coeffs = split_top_level(list)
                    .into_iter()
                    .map(parse_complex::<T>)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(bad)?;
                Self::polynomial(coeffs)
            }
            ("recip", Some(a)) => parse_complex::<T>(a).map(Self::reciprocal_shift).map_err(bad),
            _ => Err(bad(format!("unknown function spec `{spec}`"))),
        }
    }
}

impl<T: Real> fmt::Display for AnalyticFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FunctionKind::Exponential => write!(f, "exp"),
            FunctionKind::Sine => write!(f, "sin"),
            FunctionKind::Cosine => write!(f, "cos"),
            FunctionKind::Logarithm => write!(f, "log"),
            FunctionKind::Monomial(p) => write!(f, "pow:{p}"),
            FunctionKind::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|&z| format_complex(z)).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            FunctionKind::ReciprocalShift(a) => write!(f, "recip:{}", format_complex(*a)),
        }
    }
}

pub(crate) fn factorial<T: Real>(k: u32) -> T {
    (2..=k).fold(T::one(), |acc, j| acc * T::from_usize_lossy(j as usize))
}

fn inv_factorial<T: Real>(k: u32) -> T {
    (2..=k).fold(T::one(), |acc, j| acc / T::from_usize_lossy(j as usize))
}

/// `p! / (p - k)!`.
fn falling_factorial<T: Real>(p: u32, k: u32) -> T {
    (p - k + 1..=p).fold(T::one(), |acc, j| acc * T::from_usize_lossy(j as usize))
}

fn binomial<T: Real>(p: u32, k: u32) -> T {
    let k = k.min(p - k);
    (0..k).fold(T::one(), |acc, j| {
        acc * T::from_usize_lossy((p - j) as usize) / T::from_usize_lossy((j + 1) as usize)
    })
}
