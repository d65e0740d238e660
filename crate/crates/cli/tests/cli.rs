use std::path::PathBuf;
use std::process::Command;

use assert_cmd::prelude::*;
use num_complex::Complex64;
use optaylor::{Error, Matrix64, Perturbation64, Spectrum64};
use optaylor_cli::{format_problem, parse_problem, parse_scales};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_str()
        .unwrap()
        .to_owned()
}

fn run(args: &[&str]) -> (String, String, i32) {
    let out = Command::cargo_bin("optaylor").unwrap().args(args).output().unwrap();
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap(),
    )
}

fn discrepancies(report: &str) -> Vec<f64> {
    report
        .lines()
        .skip_while(|l| *l != "max-abs discrepancies:")
        .skip(1)
        .take_while(|l| l.starts_with("  "))
        .map(|l| {
            let fields: Vec<&str> = l.split_whitespace().collect();
            fields[fields.len() - 2].parse().unwrap()
        })
        .collect()
}

#[test]
fn documented_problem_files() {
    let (l, t) = parse_problem("2\n1 2\n0 0.5\n0.5 0\n").unwrap();
    assert_eq!(l, Spectrum64::from_real(&[1.0, 2.0]).unwrap());
    assert_eq!(t, Perturbation64::new(Matrix64::from_real_rows(&[&[0.0, 0.5], &[0.5, 0.0]])).unwrap());

    let (l, t) = parse_problem("1\n(0,1)\n0\n").unwrap();
    assert_eq!(l.values(), &[Complex64::new(0.0, 1.0)]);
    assert_eq!(t, Perturbation64::zeros(1));

    assert!(matches!(parse_problem("2\n1 2\n0 0.5\n"), Err(Error::Parse { .. })));
}

#[test]
fn echo_section_reparses_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let n = rng.gen_range(1..=5);
        let draw = |rng: &mut ChaCha8Rng| {
            let scale = 10f64.powi(rng.gen_range(-12..12));
            let re = rng.gen_range(-1.0..1.0) * scale;
            let im = if rng.gen::<bool>() { 0.0 } else { rng.gen_range(-1.0..1.0) * scale };
            Complex64::new(re, im)
        };
        let lambda = Spectrum64::new((0..n).map(|_| draw(&mut rng)).collect()).unwrap();
        let tau = Perturbation64::new(Matrix64::from_fn(n, n, |_, _| draw(&mut rng))).unwrap();
        let text = format_problem(&lambda, &tau);
        assert_eq!(parse_problem(&text).unwrap(), (lambda, tau));
    }

    let (report, _, _) = run(&["expand", &fixture("distinct_nonzero.txt"), "--f", "exp", "--order", "2"]);
    let echo: String = report
        .lines()
        .skip_while(|l| *l != "--- problem ---")
        .skip(1)
        .take_while(|l| *l != "--- end problem ---")
        .map(|l| format!("{l}\n"))
        .collect();
    let original = std::fs::read_to_string(fixture("distinct_nonzero.txt")).unwrap();
    assert_eq!(parse_problem(&echo).unwrap(), parse_problem(&original).unwrap());
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["verify", "distinct_nonzero.txt", "--f", "pow:4", "--order", "4"],
        vec!["convergence", "two_by_two.txt", "--f", "exp", "--order", "3"],
        vec!["coeffs", "repeated.txt", "--f", "sin", "--path", "0,1,2,0"],
    ] {
        let path = fixture(args[1]);
        let mut args = args.clone();
        args[1] = &path;
        assert_eq!(run(&args), run(&args));
    }
}

#[test]
fn verify_four_way_agreement_for_monomials() {
    let (out, _, code) = run(&["verify", &fixture("distinct_nonzero.txt"), "--f", "pow:4", "--order", "4"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("lemma: included"));
    let d = discrepancies(&out);
    assert_eq!(d.len(), 7);
    assert!(d.iter().all(|&x| x < 1e-10), "{d:?}");
}

#[test]
fn verify_skips_lemma_for_repeated_spectrum_and_exp() {
    let (out, _, code) = run(&["verify", &fixture("repeated.txt"), "--f", "exp", "--order", "3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("lemma: skipped"));
    assert!(!out.contains(" lemma "));
    assert_eq!(discrepancies(&out).len(), 4);
}

#[test]
fn verify_rejects_large_problems() {
    let (out, err, code) = run(&["verify", &fixture("seven.txt"), "--f", "exp", "--order", "3"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("budget"));
    assert_eq!(err.lines().count(), 1);

    let (_, err, code) = run(&["verify", &fixture("two_by_two.txt"), "--f", "exp", "--order", "5"]);
    assert_eq!(code, 1);
    assert!(err.contains("budget"));
}

#[test]
fn verify_flags_truncation_above_tolerance() {
    let (out, _, code) = run(&["verify", &fixture("two_by_two.txt"), "--f", "exp", "--order", "1"]);
    assert_eq!(code, 2);
    assert!(out.contains("result: FAIL"));
}

#[test]
fn expand_exit_code_two_on_oracle_disagreement() {
    let (out, _, code) = run(&["expand", &fixture("two_by_two.txt"), "--f", "exp", "--order", "2"]);
    assert_eq!(code, 2);
    assert!(out.contains("result: FAIL"));
    let (_, _, code) = run(&[
        "expand",
        &fixture("two_by_two.txt"),
        "--f",
        "exp",
        "--order",
        "2",
        "--accept-tol",
        "1",
    ]);
    assert_eq!(code, 0);
}

fn slopes(report: &str) -> Vec<String> {
    report
        .lines()
        .skip_while(|l| *l != "max-abs truncation error:")
        .skip(2)
        .map(|l| l.split_whitespace().last().unwrap().to_owned())
        .collect()
}

#[test]
fn convergence_reports_exact_for_polynomials() {
    let (out, _, code) = run(&["convergence", &fixture("two_by_two.txt"), "--f", "pow:2", "--order", "2"]);
    assert_eq!(code, 0);
    assert_eq!(slopes(&out)[1], "exact");
}

#[test]
fn convergence_slopes_for_exp() {
    let (out, _, code) = run(&[
        "convergence",
        &fixture("two_by_two.txt"),
        "--f",
        "exp",
        "--order",
        "3",
        "--scales",
        "1,1/2,1/4,1/8",
    ]);
    assert_eq!(code, 0);
    let s: Vec<f64> = slopes(&out).iter().map(|v| v.parse().unwrap()).collect();
    for (k, v) in s.iter().enumerate() {
        assert!((v - (k + 2) as f64).abs() < 0.1, "{s:?}");
    }
}

#[test]
fn malformed_scales_are_parse_errors() {
    for bad in ["1,x", "1,,0.5", "0,1", "1/0", "-1"] {
        assert!(matches!(parse_scales(bad), Err(Error::Parse { .. })), "{bad}");
        let (_, err, code) = run(&["convergence", &fixture("two_by_two.txt"), "--f", "exp", "--scales", bad]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error: parse error"), "{err}");
    }
    assert_eq!(parse_scales("1, 1/2 ,0.25").unwrap(), vec![1.0, 0.5, 0.25]);
}

#[test]
fn coeffs_agree_across_methods() {
    let (out, _, code) = run(&["coeffs", &fixture("distinct_nonzero.txt"), "--f", "pow:5", "--path", "0,1,2,0"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("B-coefficient sum:  ("));
    let (out, _, code) = run(&["coeffs", &fixture("repeated.txt"), "--f", "exp", "--path", "0,1,0"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("confluence groups: 1"));
    assert!(out.contains("B-coefficient sum:  skipped"));
}

#[test]
fn operational_errors_exit_one() {
    let two = fixture("two_by_two.txt");
    let cases: Vec<Vec<&str>> = vec![
        vec!["expand", "/nonexistent/problem.txt", "--f", "exp"],
        vec!["expand", &two, "--f", "tan"],
        vec!["expand", &two, "--f", "exp", "--order", "0"],
        vec!["expand", &two, "--f", "exp", "--quad-nodes", "48"],
        vec!["coeffs", &two, "--f", "exp", "--path", "0,5"],
        vec!["coeffs", &two, "--f", "exp", "--path", "0,a"],
        vec!["expand", &two],
        vec!["frobnicate"],
    ];
    for args in cases {
        let (out, err, code) = run(&args);
        assert_eq!(code, 1, "{args:?}");
        assert!(out.is_empty(), "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn malformed_problem_file_reports_position() {
    let dir = std::env::temp_dir().join(format!("optaylor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.txt");
    std::fs::write(&path, "2\n1 2\n0 0.5\n0.5 oops\n").unwrap();
    let (_, err, code) = run(&["expand", path.to_str().unwrap(), "--f", "exp"]);
    assert_eq!(code, 1);
    assert!(err.contains("line 4, token 2"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}
