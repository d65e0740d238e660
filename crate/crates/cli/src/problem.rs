//! Problem files: a dimension header, then `N` diagonal entries, then the
//! `N × N` perturbation in row-major order. Scalars are `x` or `(re,im)`,
//! separated by whitespace; `#` comments run to the end of the line.

use optaylor::text::{format_complex, parse_complex};
use optaylor::{Error, Matrix64, Perturbation64, Result, Spectrum64};

#[derive(Debug, Clone, PartialEq)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    index: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token<'_>>> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let bytes = line.as_bytes();
        let mut index = 0;
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i].is_ascii_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            let mut depth = 0i32;
            while i < bytes.len() && (depth > 0 || !bytes[i].is_ascii_whitespace()) {
                match bytes[i] {
                    b'(' => depth += 1,
                    b')' => depth -= 1,
                    _ => {}
                }
                i += 1;
            }
            index += 1;
            if depth != 0 {
                return Err(Error::Parse {
                    line: ln + 1,
                    token: index,
                    message: "unbalanced parentheses".into(),
                });
            }
            out.push(Token {
                text: &line[start..i],
                line: ln + 1,
                index,
            });
        }
    }
    Ok(out)
}

pub fn parse_problem(text: &str) -> Result<(Spectrum64, Perturbation64)> {
    let tokens = tokenize(text)?;
    let header = tokens.first().ok_or_else(|| Error::Parse {
        line: 1,
        token: 1,
        message: "empty problem file".into(),
    })?;
    let n: usize = header.text.parse().map_err(|_| Error::Parse {
        line: header.line,
        token: header.index,
        message: format!("dimension must be a positive integer, got `{}`", header.text),
    })?;
    if n == 0 {
        return Err(Error::Dimension("dimension must be at least 1".into()));
    }
    let expected = n
        .checked_mul(n)
        .and_then(|nn| nn.checked_add(n))
        .ok_or_else(|| Error::Dimension(format!("dimension {n} is too large")))?;
    let body = &tokens[1..];
    if body.len() < expected {
        let last_line = text.lines().count();
        return Err(Error::Parse {
            line: last_line + 1,
            token: 1,
            message: format!(
                "unexpected end of input: expected {expected} scalars for N = {n}, found {}",
                body.len()
            ),
        });
    }
    if let Some(extra) = body.get(expected) {
        return Err(Error::Parse {
            line: extra.line,
            token: extra.index,
            message: format!("trailing token `{}` after {expected} scalars", extra.text),
        });
    }
    let values = body
        .iter()
        .map(|t| {
            parse_complex::<f64>(t.text).map_err(|message| Error::Parse {
                line: t.line,
                token: t.index,
                message,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lambda = Spectrum64::new(values[..n].to_vec())?;
    let tau = Perturbation64::new(Matrix64::from_row_major(n, n, values[n..].to_vec())?)?;
    Ok((lambda, tau))
}

/// Writes a problem in the file format; the output re-parses to identical values.
pub fn format_problem(lambda: &Spectrum64, tau: &Perturbation64) -> String {
    let n = lambda.len();
    let mut out = format!("{n}\n");
    let diag: Vec<String> = lambda.values().iter().map(|&z| format_complex(z)).collect();
    out.push_str(&diag.join(" "));
    out.push('\n');
    for i in 0..n {
        let row: Vec<String> = tau.row(i).iter().map(|&z| format_complex(z)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
