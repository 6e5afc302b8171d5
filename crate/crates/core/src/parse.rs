//! Text front end for Laurent polynomials.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = ("+" | "-") unary | power ;
//! power    = atom [ "^" exponent ] ;
//! exponent = [ "+" | "-" ] integer | "(" [ "+" | "-" ] integer ")" ;
//! atom     = integer | identifier | "(" expr ")" ;
//! integer  = digit { digit } ;
//! identifier = letter { letter | digit | "_" } ;
//! ```
//!
//! Division is only allowed by a single nonzero term, and negative powers only
//! of single terms, so every expression denotes a Laurent polynomial.
//! Rational literals are written as integer quotients, e.g. `2/3*x^2`.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::laurent::LaurentPolynomial;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown variable `{name}` at byte {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("division by a non-monomial at byte {pos}")]
    NonMonomialDivisor { pos: usize },
    #[error("division by zero at byte {pos}")]
    DivisionByZero { pos: usize },
    #[error("negative power of a non-monomial at byte {pos}")]
    NegativePowerOfSum { pos: usize },
    #[error("exponent out of range at byte {pos}")]
    ExponentOverflow { pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = i + 1;
            while let Some(&(j, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = j + 1;
                chars.next();
            }
            tokens.push((Tok::Int(src[i..end].parse().expect("digits")), i));
        } else if c.is_ascii_alphabetic() {
            let mut end = i + 1;
            while let Some(&(j, d)) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                end = j + 1;
                chars.next();
            }
            tokens.push((Tok::Ident(src[i..end].to_string()), i));
        } else if "+-*/^()".contains(c) {
            tokens.push((Tok::Op(c), i));
        } else if c == '\u{2212}' {
            tokens.push((Tok::Op('-'), i));
        } else {
            return Err(ParseError::Syntax {
                pos: i,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    tokens.push((Tok::End, src.len()));
    Ok(tokens)
}

struct Parser<'v> {
    tokens: Vec<(Tok, usize)>,
    at: usize,
    vars: &'v [&'v str],
}

impl<'v> Parser<'v> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].0
    }

    fn pos(&self) -> usize {
        self.tokens[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn expect_op(&mut self, op: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Op(op) {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::Syntax {
                pos: self.pos(),
                message: format!("expected `{op}`"),
            })
        }
    }

    fn arity(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<LaurentPolynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LaurentPolynomial, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Op('/') => {
                    let pos = self.pos();
                    self.bump();
                    let divisor = self.unary()?;
                    acc = &acc * &invert_monomial(&divisor, pos)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<LaurentPolynomial, ParseError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(-&self.unary()?)
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<LaurentPolynomial, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        let pos = self.pos();
        self.bump();
        let k = self.exponent()?;
        if k >= 0 {
            let k = u32::try_from(k).map_err(|_| ParseError::ExponentOverflow { pos })?;
            Ok(base.pow(k))
        } else {
            let (e, c) = match base.as_monomial() {
                Some((e, c)) => (e.clone(), c.clone()),
                None if base.is_zero() => return Err(ParseError::DivisionByZero { pos }),
                None => return Err(ParseError::NegativePowerOfSum { pos }),
            };
            let k_abs = u32::try_from(-k).map_err(|_| ParseError::ExponentOverflow { pos })?;
            let coeff = Rational::one() / num_traits::pow(c, k_abs as usize);
            Ok(LaurentPolynomial::monomial(coeff, e.scaled(k)))
        }
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let parenthesized = *self.peek() == Tok::Op('(');
        if parenthesized {
            self.bump();
        }
        let mut sign = 1i64;
        match self.peek() {
            Tok::Op('-') => {
                sign = -1;
                self.bump();
            }
            Tok::Op('+') => {
                self.bump();
            }
            _ => {}
        }
        let (tok, pos) = self.bump();
        let value = match tok {
            Tok::Int(v) => v
                .to_i64()
                .filter(|v| *v <= i32::MAX as i64)
                .ok_or(ParseError::ExponentOverflow { pos })?,
            _ => {
                return Err(ParseError::Syntax {
                    pos,
                    message: "expected integer exponent".into(),
                })
            }
        };
        if parenthesized {
            self.expect_op(')')?;
        }
        Ok(sign * value)
    }

    fn atom(&mut self) -> Result<LaurentPolynomial, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Int(v) => Ok(LaurentPolynomial::constant(self.arity(), Rational::from_integer(v))),
            Tok::Ident(name) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => Ok(LaurentPolynomial::variable(self.arity(), i)),
                None => Err(ParseError::UnknownVariable { name, pos }),
            },
            Tok::Op('(') => {
                let inner = self.expr()?;
                self.expect_op(')')?;
                Ok(inner)
            }
            Tok::End => Err(ParseError::Syntax {
                pos,
                message: "unexpected end of input".into(),
            }),
            Tok::Op(c) => Err(ParseError::Syntax {
                pos,
                message: format!("unexpected `{c}`"),
            }),
        }
    }
}

fn invert_monomial(p: &LaurentPolynomial, pos: usize) -> Result<LaurentPolynomial, ParseError> {
    if p.is_zero() {
        return Err(ParseError::DivisionByZero { pos });
    }
    let (e, c) = p.as_monomial().ok_or(ParseError::NonMonomialDivisor { pos })?;
    Ok(LaurentPolynomial::monomial(Rational::one() / c, -e))
}

/// Parses `text` as a Laurent polynomial in the ordered variables `vars`.
pub fn parse_laurent(text: &str, vars: &[&str]) -> Result<LaurentPolynomial, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, at: 0, vars };
    let out = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(ParseError::Syntax {
            pos: parser.pos(),
            message: "trailing input".into(),
        });
    }
    debug_assert!(out.terms().all(|(e, c)| e.arity() == vars.len() && !num_traits::Zero::is_zero(c)));
    Ok(out)
}

/// Distinct identifiers of `text`, sorted alphabetically. Used when no explicit
/// variable list is supplied.
pub fn scan_variables(text: &str) -> Result<Vec<String>, ParseError> {
    let mut names: Vec<String> = lex(text)?
        .into_iter()
        .filter_map(|(t, _)| match t {
            Tok::Ident(s) => Some(s),
            _ => None,
        })
        .collect();
    names.sort();
    names.dedup();
    Ok(names)
}

/// Convenience for tests and the CLI: parse with the default names for `arity`.
pub fn parse_with_default_vars(text: &str, arity: usize) -> Result<LaurentPolynomial, ParseError> {
    let names = crate::laurent::default_variable_names(arity);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    parse_laurent(text, &refs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::ExponentVector;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn ev(v: &[i64]) -> ExponentVector {
        ExponentVector(v.to_vec())
    }

    #[test]
    fn mirror_of_p2() {
        let f = parse_laurent("x + y + x^-1*y^-1", &["x", "y"]).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.coefficient(&ev(&[1, 0])), int(1));
        assert_eq!(f.coefficient(&ev(&[0, 1])), int(1));
        assert_eq!(f.coefficient(&ev(&[-1, -1])), int(1));
    }

    #[test]
    fn cancellation_and_literals() {
        assert!(parse_laurent("x - x", &["x"]).unwrap().is_zero());
        let f = parse_laurent("2/3*x^2", &["x"]).unwrap();
        assert_eq!(f, LaurentPolynomial::monomial(rat(2, 3), ev(&[2])));
    }

    #[test]
    fn division_and_parenthesized_powers() {
        let a = parse_laurent("x + 1/(x*y) + y", &["x", "y"]).unwrap();
        let b = parse_laurent("x + y + x^(-1)*y^-1", &["x", "y"]).unwrap();
        assert_eq!(a, b);
        let c = parse_laurent("(x + y)^2 - x^2 - y^2", &["x", "y"]).unwrap();
        assert_eq!(c, LaurentPolynomial::monomial(int(2), ev(&[1, 1])));
        let d = parse_laurent("(2*x)^-2", &["x"]).unwrap();
        assert_eq!(d, LaurentPolynomial::monomial(rat(1, 4), ev(&[-2])));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_laurent("x + z", &["x", "y"]),
            Err(ParseError::UnknownVariable { name: "z".into(), pos: 4 })
        );
        assert!(matches!(parse_laurent("x +", &["x"]), Err(ParseError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_laurent("x $ y", &["x", "y"]), Err(ParseError::Syntax { pos: 2, .. })));
        assert_eq!(
            parse_laurent("1/(x+1)", &["x"]),
            Err(ParseError::NonMonomialDivisor { pos: 1 })
        );
        assert_eq!(parse_laurent("x/0", &["x"]), Err(ParseError::DivisionByZero { pos: 1 }));
        assert_eq!(
            parse_laurent("(x+1)^-1", &["x"]),
            Err(ParseError::NegativePowerOfSum { pos: 5 })
        );
        assert!(matches!(parse_laurent("x^y", &["x", "y"]), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_laurent("x y", &["x", "y"]), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn unicode_minus_is_accepted() {
        let f = parse_laurent("x \u{2212} 1", &["x"]).unwrap();
        assert_eq!(f.coefficient(&ev(&[0])), int(-1));
    }

    #[test]
    fn variable_scan() {
        assert_eq!(scan_variables("y + x^-1*y").unwrap(), vec!["x", "y"]);
    }

    fn small_poly() -> impl Strategy<Value = LaurentPolynomial> {
        prop::collection::vec(((-3i64..=3, -3i64..=3), (-9i64..=9, 1i64..=5)), 0..7).prop_map(|terms| {
            LaurentPolynomial::from_terms(
                2,
                terms.into_iter().map(|((a, b), (n, d))| (ev(&[a, b]), rat(n, d))),
            )
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in small_poly()) {
            let text = f.to_expr(&["x", "y"]);
            let back = parse_laurent(&text, &["x", "y"]).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(back.to_expr(&["x", "y"]), text);
        }

        #[test]
        fn log_derivative_is_linear(f in small_poly(), g in small_poly(), i in 0usize..2) {
            let lhs = (&f + &g).log_derivative(i);
            let rhs = &f.log_derivative(i) + &g.log_derivative(i);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn log_derivative_kills_exactly_constant_direction(f in small_poly(), i in 0usize..2) {
            let d = f.log_derivative(i);
            for (e, _) in f.terms() {
                prop_assert_eq!(num_traits::Zero::is_zero(&d.coefficient(e)), e[i] == 0);
            }
        }
    }
}
