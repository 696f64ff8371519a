//! Canonical text form: `3*x*y*z - x^2 - 2*x*y`.

use num_traits::{One, Signed, Zero};

use super::{Monomial, Poly, PolyError};
use crate::linalg::{parse_rat, Rat};

/// `x, y, z, w` for up to four variables, `x1 … xd` otherwise.
pub fn variable_names(nvars: usize) -> Vec<String> {
    if nvars <= 4 {
        ["x", "y", "z", "w"][..nvars].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=nvars).map(|i| format!("x{i}")).collect()
    }
}

fn render_monomial(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, name) in names.iter().enumerate() {
        match m.exponent(i) {
            0 => {}
            1 => parts.push(name.clone()),
            e => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

pub(super) fn render(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let names = variable_names(p.nvars());
    let mut out = String::new();
    for (k, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let a = c.abs();
        if m.degree() == 0 {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&render_monomial(m, &names));
        } else {
            out.push_str(&format!("{a}*{}", render_monomial(m, &names)));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
}

fn tokenize(s: &str) -> Result<Vec<Token>, PolyError> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1
            }
            '-' => {
                out.push(Token::Minus);
                i += 1
            }
            '*' => {
                out.push(Token::Star);
                i += 1
            }
            '^' => {
                out.push(Token::Caret);
                i += 1
            }
            '/' => {
                out.push(Token::Slash);
                i += 1
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Token::Num(cs[start..i].iter().collect()));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push(Token::Ident(cs[start..i].iter().collect()));
            }
            other => return Err(PolyError::Parse(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

/// Parses the canonical text form (integer or `p/q` coefficients).
pub fn parse_poly(s: &str, nvars: usize) -> Result<Poly, PolyError> {
    let names = variable_names(nvars);
    let toks = tokenize(s)?;
    let mut pos = 0;
    let mut result = Poly::zero(nvars);
    let mut first = true;
    if toks.is_empty() {
        return Err(PolyError::Parse("empty input".into()));
    }
    while pos < toks.len() {
        let mut negative = false;
        match toks.get(pos) {
            Some(Token::Plus) => pos += 1,
            Some(Token::Minus) => {
                negative = true;
                pos += 1
            }
            _ if first => {}
            other => return Err(PolyError::Parse(format!("expected + or -, found {other:?}"))),
        }
        first = false;
        let mut coeff = Rat::one();
        let mut exps = vec![0u32; nvars];
        loop {
            match toks.get(pos) {
                Some(Token::Num(n)) => {
                    pos += 1;
                    let mut text = n.clone();
                    if toks.get(pos) == Some(&Token::Slash) {
                        match toks.get(pos + 1) {
                            Some(Token::Num(d)) => {
                                text = format!("{n}/{d}");
                                pos += 2;
                            }
                            _ => return Err(PolyError::Parse("dangling '/'".into())),
                        }
                    }
                    coeff *= parse_rat(&text).map_err(|e| PolyError::Parse(e.to_string()))?;
                }
                Some(Token::Ident(v)) => {
                    pos += 1;
                    let idx = names
                        .iter()
                        .position(|n| n == v)
                        .ok_or_else(|| PolyError::Parse(format!("unknown variable {v:?}")))?;
                    let mut e = 1u32;
                    if toks.get(pos) == Some(&Token::Caret) {
                        match toks.get(pos + 1) {
                            Some(Token::Num(k)) => {
                                e = k.parse().map_err(|_| PolyError::Parse(format!("bad exponent {k}")))?;
                                pos += 2;
                            }
                            _ => return Err(PolyError::Parse("dangling '^'".into())),
                        }
                    }
                    exps[idx] += e;
                }
                other => return Err(PolyError::Parse(format!("expected factor, found {other:?}"))),
            }
            if toks.get(pos) == Some(&Token::Star) {
                pos += 1;
            } else {
                break;
            }
        }
        if negative {
            coeff = -coeff;
        }
        if !coeff.is_zero() {
            result.add_assign_ref(&Poly::from_terms(nvars, [(exps, coeff)]));
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frac;

    #[test]
    fn render_forms() {
        let p = parse_poly("-x^2 + 3*x*y*z - 2*x*y", 3).unwrap();
        assert_eq!(p.to_string(), "3*x*y*z - x^2 - 2*x*y");
        assert_eq!(parse_poly("4", 3).unwrap().to_string(), "4");
        assert_eq!(parse_poly("3*z - 4", 3).unwrap().to_string(), "3*z - 4");
        assert_eq!(Poly::zero(2).to_string(), "0");
        assert_eq!(parse_poly("x1*x5^2", 5).unwrap().to_string(), "x1*x5^2");
        assert_eq!(parse_poly("4/3*x", 1).unwrap().to_string(), "4/3*x");
        assert_eq!(parse_poly("4/3*x", 1).unwrap().coefficient(&[1]), frac(4, 3));
    }

    #[test]
    fn parse_errors() {
        assert!(parse_poly("x + q", 3).is_err());
        assert!(parse_poly("", 3).is_err());
        assert!(parse_poly("x^", 3).is_err());
        assert!(parse_poly("x y", 3).is_err());
        assert!(parse_poly("w", 3).is_err());
    }
}
