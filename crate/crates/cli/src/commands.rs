use std::fmt::Write as _;

use optaylor::contour::{cauchy_coefficient, choose_contour};
use optaylor::expansion::{convergence_profile, expand, reference_matrix_function};
use optaylor::lemma::{coefficient_from_b, expand_monomial_lemma};
use optaylor::text::{format_complex_sci, split_top_level};
use optaylor::{
    divided_difference, Complex64, Error, ExpansionOptions, FunctionKind, Matrix64, NodeList,
    Perturbation64, Result, Spectrum64, Strategy,
};

use crate::problem::format_problem;
use crate::{CliError, Settings};

/// Largest dimension and order accepted by `verify`.
pub const VERIFY_MAX_DIM: usize = 6;
pub const VERIFY_MAX_ORDER: usize = 4;

/// Absolute Taylor-oracle tolerance, relative to `max(1, max |f(λ_i)|)`.
const ORACLE_TOL: f64 = 1e-17;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub text: String,
    /// Whether every numerical check met the acceptance tolerance.
    pub passed: bool,
}

impl Report {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else {
            2
        }
    }
}

fn sci(x: f64) -> String {
    format!("{x:.15e}")
}

fn short(x: f64) -> String {
    format!("{x:.3e}")
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn header(out: &mut String, command: &str, s: &Settings, lambda: &Spectrum64, tau: &Perturbation64) {
    let _ = writeln!(out, "optaylor {command}");
    let _ = writeln!(out, "function: {}", s.function);
    let _ = writeln!(out, "order: {}", s.order);
    out.push_str("--- problem ---\n");
    out.push_str(&format_problem(lambda, tau));
    out.push_str("--- end problem ---\n");
}

fn write_matrix(out: &mut String, m: &Matrix64) {
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|&z| format_complex_sci(z)).collect();
        let _ = writeln!(out, "  {}", row.join(" "));
    }
}

fn oracle_tol(lambda: &Spectrum64, s: &Settings) -> Result<f64> {
    let scale = lambda
        .values()
        .iter()
        .map(|&l| s.function.eval(l).map(|v| v.norm()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(1.0_f64, f64::max);
    Ok(ORACLE_TOL * scale)
}

pub fn cmd_expand(lambda: &Spectrum64, tau: &Perturbation64, s: &Settings) -> Result<Report> {
    let result = expand(&s.function, lambda, tau, s.order, &s.options)?;
    let (reference, kind) = reference_matrix_function(
        &s.function,
        lambda,
        tau,
        oracle_tol(lambda, s)?,
        &s.options.quadrature,
    )?;
    let error = result.truncated_sum.max_abs_diff(&reference);
    let passed = error <= s.accept_tol;

    let mut out = String::new();
    header(&mut out, "expand", s, lambda, tau);
    let _ = writeln!(out, "strategy: {}", result.strategy);
    if let Some(c) = &result.contour {
        let _ = writeln!(
            out,
            "contour: center {} radius {} initial nodes {}",
            format_complex_sci(c.center),
            sci(c.radius),
            c.node_count
        );
    }
    out.push_str("term norms (Frobenius):\n");
    for (n, norm) in result.term_norms.iter().enumerate() {
        let _ = writeln!(out, "  order {n:>3}  {}", sci(*norm));
    }
    if result.order() < s.order {
        let _ = writeln!(
            out,
            "  orders {}..={} not computed: order {} fell below the stopping threshold",
            result.order() + 1,
            s.order,
            result.order()
        );
    }
    out.push_str("truncated sum:\n");
    write_matrix(&mut out, &result.truncated_sum);
    let _ = writeln!(out, "reference: {kind}");
    let _ = writeln!(out, "oracle max-abs error: {}", short(error));
    let _ = writeln!(out, "accept tol: {}", short(s.accept_tol));
    let _ = writeln!(out, "converged: {}", result.converged);
    let _ = writeln!(out, "result: {}", verdict(passed));
    Ok(Report { text: out, passed })
}

fn parse_path(spec: &str, dim: usize) -> Result<Vec<usize>> {
    let parts = split_top_level(spec);
    let mut path = Vec::with_capacity(parts.len());
    for (k, part) in parts.iter().enumerate() {
        let idx: usize = part.trim().parse().map_err(|_| Error::Parse {
            line: 1,
            token: k + 1,
            message: format!("--path entry `{}` is not an index", part.trim()),
        })?;
        if idx >= dim {
            return Err(Error::Dimension(format!("--path index {idx} out of range for N = {dim}")));
        }
        path.push(idx);
    }
    if path.is_empty() {
        return Err(Error::Parse {
            line: 1,
            token: 1,
            message: "--path is empty".into(),
        });
    }
    Ok(path)
}

fn relative_gap(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

pub fn cmd_coeffs(lambda: &Spectrum64, tau: &Perturbation64, s: &Settings, path_spec: &str) -> Result<Report> {
    let path = parse_path(path_spec, lambda.len())?;
    let nodes = NodeList::from_path(lambda, &path)?;
    let dd = divided_difference(&s.function, &nodes)?;
    let contour = choose_contour(lambda, &s.function, 0.0, &s.options.quadrature)?;
    let quad = cauchy_coefficient(&s.function, nodes.nodes(), &contour, &s.options.quadrature)?;

    let k = path.len() - 1;
    let lemma = match s.function.polynomial_degree() {
        None => Err("coefficient sum needs a polynomial function".to_string()),
        Some(_) if k == 0 => Err("path has a single index".to_string()),
        Some(_) => coefficient_from_b(&s.function, lambda, &path, k, 0).map_err(|e| e.to_string()),
    };

    let quad_gap = relative_gap(dd, quad);
    let lemma_gap = lemma.as_ref().ok().map(|&v| relative_gap(dd, v));
    let passed = quad_gap <= s.accept_tol && lemma_gap.is_none_or(|g| g <= s.accept_tol);

    let mut out = String::new();
    header(&mut out, "coeffs", s, lambda, tau);
    let indices: Vec<String> = path.iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "path: {}", indices.join(","));
    let node_text: Vec<String> = nodes.nodes().iter().map(|&z| format_complex_sci(z)).collect();
    let _ = writeln!(out, "nodes: {}", node_text.join(" "));
    let _ = writeln!(out, "confluence groups: {}", nodes.groups().len());
    let _ = writeln!(out, "divided difference: {}", format_complex_sci(dd));
    let _ = writeln!(
        out,
        "quadrature:         {}  (center {} radius {})",
        format_complex_sci(quad),
        format_complex_sci(contour.center),
        sci(contour.radius)
    );
    match &lemma {
        Ok(v) => {
            let _ = writeln!(out, "B-coefficient sum:  {}", format_complex_sci(*v));
        }
        Err(reason) => {
            let _ = writeln!(out, "B-coefficient sum:  skipped ({reason})");
        }
    }
    let _ = writeln!(out, "relative gap quadrature: {}", short(quad_gap));
    if let Some(g) = lemma_gap {
        let _ = writeln!(out, "relative gap B-coefficient sum: {}", short(g));
    }
    let _ = writeln!(out, "accept tol: {}", short(s.accept_tol));
    let _ = writeln!(out, "result: {}", verdict(passed));
    Ok(Report { text: out, passed })
}

pub fn cmd_verify(lambda: &Spectrum64, tau: &Perturbation64, s: &Settings) -> Result<Report, CliError> {
    let dim = lambda.len();
    if dim > VERIFY_MAX_DIM || s.order > VERIFY_MAX_ORDER {
        return Err(CliError::VerifyBudget { dim, order: s.order });
    }
    let full = ExpansionOptions {
        stop_rtol: None,
        ..s.options
    };
    let path_sum = expand(
        &s.function,
        lambda,
        tau,
        s.order,
        &ExpansionOptions {
            strategy: Strategy::PathSum,
            ..full
        },
    )?;
    let quadrature = expand(
        &s.function,
        lambda,
        tau,
        s.order,
        &ExpansionOptions {
            strategy: Strategy::Quadrature,
            ..full
        },
    )?;
    let (reference, kind) = reference_matrix_function(
        &s.function,
        lambda,
        tau,
        oracle_tol(lambda, s)?,
        &s.options.quadrature,
    )?;
    let lemma = match (s.function.kind(), lambda.first_zero()) {
        (FunctionKind::Monomial(p), None) => Ok(expand_monomial_lemma(lambda, tau, *p, s.order as u32)?),
        (FunctionKind::Monomial(_), Some(i)) => Err(format!("λ_{i} is zero")),
        _ => Err("function is not pow:p".to_string()),
    };

    let mut methods: Vec<(String, &Matrix64)> = vec![
        ("path-sum".into(), &path_sum.truncated_sum),
        ("quadrature".into(), &quadrature.truncated_sum),
    ];
    if let Ok(m) = &lemma {
        methods.push(("lemma".into(), m));
    }
    methods.push((format!("reference ({kind})"), &reference));

    let termwise = path_sum
        .terms
        .iter()
        .zip(&quadrature.terms)
        .map(|(a, b)| a.max_abs_diff(b))
        .fold(0.0_f64, f64::max);
    let mut rows = vec![("path-sum vs quadrature, per term".to_string(), termwise)];
    for a in 0..methods.len() {
        for b in a + 1..methods.len() {
            rows.push((
                format!("{} vs {}", methods[a].0, methods[b].0),
                methods[a].1.max_abs_diff(methods[b].1),
            ));
        }
    }
    let passed = rows.iter().all(|(_, d)| *d <= s.accept_tol);

    let mut out = String::new();
    header(&mut out, "verify", s, lambda, tau);
    match &lemma {
        Ok(_) => out.push_str("lemma: included\n"),
        Err(reason) => {
            let _ = writeln!(out, "lemma: skipped ({reason})");
        }
    }
    out.push_str("truncated sums are compared through the requested order\n");
    let width = rows.iter().map(|(name, _)| name.chars().count()).max().unwrap_or(0);
    out.push_str("max-abs discrepancies:\n");
    for (name, d) in &rows {
        let pad = width - name.chars().count();
        let mark = if *d <= s.accept_tol { "ok" } else { "FAIL" };
        let _ = writeln!(out, "  {name}{}  {}  {mark}", " ".repeat(pad), short(*d));
    }
    let _ = writeln!(out, "accept tol: {}", short(s.accept_tol));
    let _ = writeln!(out, "result: {}", verdict(passed));
    Ok(Report { text: out, passed })
}

/// Parses `--scales`: comma-separated positive numbers or `a/b` fractions.
pub fn parse_scales(spec: &str) -> Result<Vec<f64>> {
    let bad = |k: usize, item: &str| Error::Parse {
        line: 1,
        token: k + 1,
        message: format!("--scales entry `{item}` is not a positive number"),
    };
    spec.split(',')
        .enumerate()
        .map(|(k, raw)| {
            let item = raw.trim();
            let value = match item.split_once('/') {
                Some((a, b)) => {
                    let a: f64 = a.trim().parse().map_err(|_| bad(k, item))?;
                    let b: f64 = b.trim().parse().map_err(|_| bad(k, item))?;
                    a / b
                }
                None => item.parse().map_err(|_| bad(k, item))?,
            };
            if value > 0.0 && value.is_finite() {
                Ok(value)
            } else {
                Err(bad(k, item))
            }
        })
        .collect()
}

pub fn cmd_convergence(lambda: &Spectrum64, tau: &Perturbation64, s: &Settings, scales: &[f64]) -> Result<Report> {
    let profile = convergence_profile(&s.function, lambda, tau, s.order, scales, &s.options)?;

    let mut out = String::new();
    header(&mut out, "convergence", s, lambda, tau);
    let _ = writeln!(out, "strategy: {}", s.options.strategy);
    let _ = writeln!(out, "reference: {}", profile.reference);
    out.push_str("max-abs truncation error:\n");
    let _ = write!(out, "  {:>5}", "order");
    for &sc in scales {
        let _ = write!(out, "  {:>12}", format!("s={}", short(sc)));
    }
    let _ = writeln!(out, "  {:>8}", "slope");
    for (n, errs) in profile.errors.iter().enumerate() {
        let _ = write!(out, "  {:>5}", n + 1);
        for &e in errs {
            let _ = write!(out, "  {:>12}", short(e));
        }
        let slope = match profile.slopes[n] {
            Some(v) => format!("{v:.3}"),
            None => "exact".to_string(),
        };
        let _ = writeln!(out, "  {slope:>8}");
    }
    Ok(Report { text: out, passed: true })
}
