//! Text form of operators, one term per line:
//!
//! ```text
//! 1.5 * X0 Z3 Y7
//! (0,-2) * Y1
//! -0.25 * I
//! ```

use num_complex::Complex64;

use super::local::LocalOperator;
use super::pauli::{Letter, PauliString};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {}: {msg}", line + 1))
}

fn format_coeff(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("({},{})", c.re, c.im)
    }
}

fn parse_coeff(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let (re, im) = inner.split_once(',')?;
        Some(Complex64::new(re.trim().parse().ok()?, im.trim().parse().ok()?))
    } else {
        Some(Complex64::new(s.parse().ok()?, 0.0))
    }
}

pub fn format_operator(o: &LocalOperator) -> String {
    let mut out = String::new();
    for (c, p) in o.terms() {
        out.push_str(&format_coeff(*c));
        out.push_str(" * ");
        out.push_str(&p.to_string());
        out.push('\n');
    }
    out
}

/// Parses a single string such as `X0 Z3 Y7` or `I`.
pub fn parse_pauli(n_sites: usize, s: &str) -> Result<PauliString> {
    let s = s.trim();
    if s == "I" {
        return PauliString::identity(n_sites);
    }
    let mut letters = Vec::new();
    for tok in s.split_whitespace() {
        let mut chars = tok.chars();
        let l = chars
            .next()
            .and_then(Letter::from_symbol)
            .ok_or_else(|| Error::Parse(format!("bad token '{tok}'")))?;
        let site: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Parse(format!("bad site in '{tok}'")))?;
        if l != Letter::I {
            letters.push((site, l));
        }
    }
    PauliString::from_letters(n_sites, &letters).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_operator(n_sites: usize, text: &str) -> Result<LocalOperator> {
    let mut terms = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (coeff, string) = line
            .rsplit_once('*')
            .ok_or_else(|| parse_err(i, "expected '<coefficient> * <string>'"))?;
        let c = parse_coeff(coeff).ok_or_else(|| parse_err(i, format!("bad coefficient '{coeff}'")))?;
        let p = parse_pauli(n_sites, string).map_err(|e| parse_err(i, e))?;
        terms.push((c, p));
    }
    LocalOperator::new(n_sites, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let o = parse_operator(8, "1.5 * X0 Z3 Y7").unwrap();
        assert_eq!(o.terms().len(), 1);
        let (c, p) = o.terms()[0];
        assert_eq!(c, Complex64::new(1.5, 0.0));
        assert_eq!(p.letter(0), Letter::X);
        assert_eq!(p.letter(3), Letter::Z);
        assert_eq!(p.letter(7), Letter::Y);
        assert_eq!(format_operator(&o), "1.5 * X0 Z3 Y7\n");
    }

    #[test]
    fn complex_and_identity_terms() {
        let text = "-0.25 * I\n(0,-2) * Y1\n";
        let o = parse_operator(2, text).unwrap();
        let back = parse_operator(2, &format_operator(&o)).unwrap();
        assert_eq!(o, back);
    }

    #[test]
    fn malformed_input_reports_line() {
        let e = parse_operator(2, "1 * X0\n2 * Q1").unwrap_err();
        assert!(e.to_string().contains("line 2"));
        assert!(parse_operator(2, "1 * X5").is_err());
    }
}
