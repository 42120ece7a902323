//! Shared helpers for the `coef*tail + ...` text forms.

use crate::scalar::{split_signed_terms, Scalar};

/// Render a sum of `coef*tail` terms. Single-term coefficients are written
/// inline with their sign pulled out, longer ones are parenthesized.
pub(crate) fn fmt_sum<'a, I>(terms: I) -> String
where
    I: IntoIterator<Item = (&'a Scalar, String)>,
{
    let mut out = String::new();
    for (coef, tail) in terms {
        let first = out.is_empty();
        let (neg, body) = match coef.as_monomial() {
            Some((e, c)) => {
                let neg = c < &num_traits::Zero::zero();
                let mag = if neg { -c.clone() } else { c.clone() };
                let mag = Scalar::monomial(mag, e);
                let head = if mag.is_one() { String::new() } else { mag.to_string() };
                (neg, join(&head, &tail))
            }
            None => (false, join(&format!("({coef})"), &tail)),
        };
        match (first, neg) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn join(head: &str, tail: &str) -> String {
    match (head.is_empty(), tail.is_empty()) {
        (true, true) => "1".to_string(),
        (true, false) => tail.to_string(),
        (false, true) => head.to_string(),
        (false, false) => format!("{head}*{tail}"),
    }
}

fn split_factors(term: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in term.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            '*' if depth == 0 => {
                out.push(&term[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&term[start..]);
    out
}

/// Parse a signed sum whose terms are `*`-separated factors. Factors accepted
/// by `tail` are collected, the rest multiply into the coefficient.
pub(crate) fn parse_sum<T>(
    text: &str,
    tail: impl Fn(&str) -> Option<T>,
) -> Result<Vec<(Scalar, Vec<T>)>, String> {
    if text.trim() == "0" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (neg, term) in split_signed_terms(text)? {
        let mut coef = Scalar::one();
        let mut parts = Vec::new();
        for factor in split_factors(&term) {
            if factor.is_empty() {
                return Err(format!("empty factor in {term:?}"));
            }
            if let Some(t) = tail(factor) {
                parts.push(t);
            } else {
                let c: Scalar = factor.parse().map_err(|e| format!("{e}"))?;
                coef = coef * c;
            }
        }
        if neg {
            coef = -coef;
        }
        out.push((coef, parts));
    }
    Ok(out)
}

/// Parse `name^k` or `name[k]` style integer suffixes.
pub(crate) fn strip_int_suffix(s: &str, prefix: &str) -> Option<i64> {
    s.strip_prefix(prefix)?.parse().ok()
}
