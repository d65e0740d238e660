//! Taylor expansion of `f(λ + τ)` around a diagonal matrix `λ`.
//!
//! The order-`n` term has entries
//! `Σ A(λ_i, λ_m1, ..., λ_p) τ_{i m1} τ_{m1 m2} ... τ_{m_{n-1} p}`
//! where `A` is the divided difference of `f` over the eigenvalues along the
//! index path. The coefficients are available three ways:
//!
//! * [`divided`]: the difference-quotient recurrence, with derivative limits
//!   for confluent eigenvalues;
//! * [`contour`]: trapezoidal quadrature of Cauchy integrals on a circle;
//! * [`lemma`]: exact expansion of `(λ + τ)^p` in the `ε_q` matrices, used as
//!   an oracle for monomials and polynomials.
//!
//! [`expansion`] assembles the series order by order and carries a dense
//! matrix-Taylor oracle. Everything is generic over the real type (`f32` or
//! `f64`); the aliases below fix `f64`.

pub mod contour;
pub mod divided;
pub mod error;
pub mod expansion;
pub mod function;
pub mod lemma;
pub mod matrix;
pub mod scalar;
pub mod spectrum;
pub mod text;

pub use contour::{Contour, QuadratureOptions};
pub use divided::{coefficient_a, coefficient_a1, divided_difference, NodeList};
pub use error::{Error, Result};
pub use expansion::{ExpansionOptions, ExpansionResult, Strategy};
pub use function::{Analyticity, AnalyticFunction, FunctionKind};
pub use matrix::CMatrix;
pub use scalar::Real;
pub use spectrum::{DiagonalSpectrum, PerturbationMatrix};

pub type Complex64 = num_complex::Complex<f64>;
pub type Matrix64 = CMatrix<f64>;
pub type Spectrum64 = DiagonalSpectrum<f64>;
pub type Perturbation64 = PerturbationMatrix<f64>;
pub type Function64 = AnalyticFunction<f64>;
pub type Contour64 = Contour<f64>;
pub type Expansion64 = ExpansionResult<f64>;

pub type Matrix32 = CMatrix<f32>;
pub type Spectrum32 = DiagonalSpectrum<f32>;
pub type Function32 = AnalyticFunction<f32>;
