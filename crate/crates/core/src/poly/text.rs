//! Hand-writable polynomial syntax: `+ - * / ^`, parentheses, integer and
//! rational literals, variables, and roots of unity `w<q>` for prime powers q.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed};

use super::monomial::{Monomial, MonomialOrder};
use super::polynomial::MultivariatePolynomial;
use crate::arithmetic::{format_rational, CyclotomicField, PrimePower, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(num_bigint::BigInt),
    Ident(String),
    Op(char),
}

fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token::Num(text.parse().expect("digits")));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || matches!(chars[i], '_' | '.' | '#')) {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return parse_err(format!("unexpected character {c:?} in polynomial"));
        }
    }
    Ok(out)
}

/// `w<q>` names a root of unity unless it is a declared variable.
fn root_name(name: &str) -> Option<u64> {
    let digits = name.strip_prefix('w')?;
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    vars: Arc<Vec<String>>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MultivariatePolynomial> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultivariatePolynomial> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                let Some(c) = d.as_constant() else {
                    return parse_err("division by a non-constant polynomial");
                };
                if c.is_zero() {
                    return parse_err("division by zero in polynomial");
                }
                acc = acc.scale(&c.inverse()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MultivariatePolynomial> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<MultivariatePolynomial> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Token::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
                    Ok(base.pow(e))
                }
                _ => parse_err("expected a nonnegative integer exponent after '^'"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultivariatePolynomial> {
        match self.peek().cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(MultivariatePolynomial::from_rational(self.vars.clone(), Rational::from_integer(n)))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    return Ok(MultivariatePolynomial::var(self.vars.clone(), i));
                }
                if let Some(order) = root_name(&name) {
                    let sort = PrimePower::from_modulus(order)
                        .map_err(|_| Error::Parse(format!("{name}: roots of unity need a prime-power order")))?;
                    let field = CyclotomicField::new(&[sort])?;
                    return Ok(MultivariatePolynomial::constant(self.vars.clone(), field.omega_power(sort, 1)?));
                }
                parse_err(format!("unknown variable {name:?}"))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return parse_err("missing ')'");
                }
                Ok(inner)
            }
            Some(t) => parse_err(format!("unexpected token {t:?}")),
            None => parse_err("unexpected end of polynomial"),
        }
    }
}

/// Parses a polynomial. Without an explicit variable list, variables are
/// taken in order of first appearance.
pub fn parse_polynomial(text: &str, vars: Option<&[String]>) -> Result<MultivariatePolynomial> {
    let tokens = tokenize(text)?;
    let vars = match vars {
        Some(v) => v.to_vec(),
        None => {
            let mut seen: Vec<String> = Vec::new();
            for t in &tokens {
                if let Token::Ident(name) = t {
                    if root_name(name).is_none() && !seen.contains(name) {
                        seen.push(name.clone());
                    }
                }
            }
            seen
        }
    };
    let mut parser = Parser { tokens, pos: 0, vars: Arc::new(vars) };
    if parser.tokens.is_empty() {
        return parse_err("empty polynomial");
    }
    let p = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return parse_err(format!("trailing input at token {:?}", parser.tokens[parser.pos]));
    }
    Ok(p)
}

fn monomial_text(m: &Monomial, vars: &[String]) -> Vec<String> {
    m.0.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { vars[i].clone() } else { format!("{}^{}", vars[i], e) })
        .collect()
}

impl fmt::Display for MultivariatePolynomial {
    /// Terms in descending grlex order; the output parses back to the same polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.sorted_terms(&MonomialOrder::grlex()).into_iter().enumerate() {
            let atoms = monomial_text(m, self.vars());
            let (negative, coef) = match c.to_rational() {
                Some(r) => {
                    let neg = r.is_negative();
                    let mag = r.abs();
                    let text = if mag.is_one() && !atoms.is_empty() { String::new() } else { format_rational(&mag) };
                    (neg, text)
                }
                None if c.num_terms() == 1 => {
                    let s = c.to_string();
                    match s.strip_prefix('-') {
                        Some(rest) => (true, rest.to_string()),
                        None => (false, s),
                    }
                }
                None => (false, format!("({c})")),
            };
            if n == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            match (coef.is_empty(), atoms.is_empty()) {
                (true, _) => write!(f, "{}", atoms.join("*"))?,
                (false, true) => write!(f, "{coef}")?,
                (false, false) => write!(f, "{}*{}", coef, atoms.join("*"))?,
            }
        }
        Ok(())
    }
}

impl MultivariatePolynomial {
    pub fn parse(text: &str, vars: &[String]) -> Result<Self> {
        parse_polynomial(text, Some(vars))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::rat;

    #[test]
    fn parse_and_print() {
        let p = parse_polynomial("x^2*y - 3/2*y + 1", None).unwrap();
        assert_eq!(p.vars(), &["x".to_string(), "y".to_string()]);
        assert_eq!(p.degree(), Some(3));
        assert_eq!(p.to_string(), "x^2*y - 3/2*y + 1");
        let back = parse_polynomial(&p.to_string(), Some(p.vars())).unwrap();
        assert_eq!(back, p);
        let v = p.evaluate_rational(&[rat(2, 1), rat(1, 1)]).unwrap();
        assert_eq!(v, rat(7, 2));
    }

    #[test]
    fn roots_of_unity() {
        let p = parse_polynomial("w4^2 + 1", Some(&[])).unwrap();
        assert!(p.is_zero());
        let p = parse_polynomial("(1 + w3)*x - w4*y", None).unwrap();
        let back = parse_polynomial(&p.to_string(), Some(p.vars())).unwrap();
        assert_eq!(back, p);
        assert!(parse_polynomial("w6", None).is_err());
    }

    #[test]
    fn malformed_input() {
        for bad in ["", "x +", "(x", "x / y", "x ^ y", "x $ 2", "1/0"] {
            assert!(parse_polynomial(bad, None).is_err(), "{bad}");
        }
        let vars = vec!["x".to_string()];
        assert!(parse_polynomial("y", Some(&vars)).is_err());
    }
}
