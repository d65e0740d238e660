//! Text forms of complex scalars: a bare decimal for reals, `(re,im)` otherwise.

use num_complex::Complex;

use crate::scalar::{Real, C};

/// Parses `x` or `(re,im)`. Whitespace inside the parentheses is allowed.
pub fn parse_complex<T: Real>(token: &str) -> Result<C<T>, String> {
    let t = token.trim();
    if let Some(inner) = t.strip_prefix('(') {
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| format!("unterminated complex literal `{t}`"))?;
        let mut parts = inner.split(',');
        let (re, im) = match (parts.next(), parts.next(), parts.next()) {
            (Some(re), Some(im), None) => (re, im),
            _ => return Err(format!("complex literal `{t}` must be `(re,im)`")),
        };
        Ok(Complex::new(parse_real(re)?, parse_real(im)?))
    } else {
        Ok(Complex::new(parse_real(t)?, T::zero()))
    }
}

fn parse_real<T: Real>(s: &str) -> Result<T, String> {
    let s = s.trim();
    let v: f64 = s.parse().map_err(|_| format!("invalid number `{s}`"))?;
    if !v.is_finite() {
        return Err(format!("non-finite number `{s}`"));
    }
    Ok(T::lit(v))
}

/// Shortest round-trip form: bare decimal when the imaginary part is zero.
pub fn format_complex<T: Real>(z: C<T>) -> String {
    if z.im == T::zero() {
        format!("{}", z.re)
    } else {
        format!("({},{})", z.re, z.im)
    }
}

/// Fixed 16-significant-digit form used in reports.
pub fn format_complex_sci<T: Real>(z: C<T>) -> String {
    format!("({:+.15e},{:+.15e})", z.re, z.im)
}

/// Splits on commas that are not nested inside parentheses.
pub fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}
