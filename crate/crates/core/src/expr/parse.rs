//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' exponent)?
//! exponent:= ['-' | '+'] INTEGER | '(' ['-' | '+'] INTEGER ')'
//! primary := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Chart names become coordinates, `pi` is the constant, the function names
//! are `sin cos exp ln sqrt atan2`, and any other identifier is a parameter.
//! Decimal literals are read as exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Func, Rational, ScalarExpr};
use crate::chart::Chart;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let err = |message: String| Error::Parse {
            line: start.0,
            column: start.1,
            message,
        };
        let tok = if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let begin = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit: String = chars[begin..i].iter().collect();
            column += i - begin;
            Tok::Num(decimal(&lit).ok_or_else(|| err(format!("malformed number `{lit}`")))?)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let begin = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            column += i - begin;
            Tok::Ident(chars[begin..i].iter().collect())
        } else if "+-*/^(),".contains(c) {
            i += 1;
            column += 1;
            Tok::Op(c)
        } else {
            return Err(err(format!("unexpected character `{c}`")));
        };
        out.push(Token {
            tok,
            line: start.0,
            column: start.1,
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

/// Exact value of a decimal literal such as `12`, `0.25` or `1.5e-3`.
fn decimal(lit: &str) -> Option<BigRational> {
    let (mantissa, exp) = match lit.find(['e', 'E']) {
        Some(p) => (&lit[..p], lit[p + 1..].parse::<i32>().ok()?),
        None => (lit, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() { return None } else { digits.parse().ok()? };
    if exp.abs() > 400 {
        return None;
    }
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    Some(if shift >= 0 {
        BigRational::from_integer(n * scale)
    } else {
        BigRational::new(n, scale)
    })
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    chart: &'a Chart,
    depth: usize,
}

const MAX_DEPTH: usize = 256;
const MAX_EXPONENT: i64 = 64;

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn error_here(&self, message: impl Into<String>) -> Error {
        let t = &self.toks[self.pos];
        Error::Parse {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error_here(format!("expected `{c}`, found {}", describe(self.peek()))))
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error_here("expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<ScalarExpr> {
        self.enter()?;
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(-self.term()?);
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(ScalarExpr::sum(terms))
    }

    fn term(&mut self) -> Result<ScalarExpr> {
        let mut acc = self.unary()?;
        let mut factors = Vec::new();
        loop {
            if self.eat('*') {
                factors.push(self.unary()?);
            } else if self.eat('/') {
                let den = self.unary()?;
                factors.insert(0, acc);
                acc = ScalarExpr::quotient(ScalarExpr::product(std::mem::take(&mut factors)), den);
            } else {
                break;
            }
        }
        if factors.is_empty() {
            Ok(acc)
        } else {
            factors.insert(0, acc);
            Ok(ScalarExpr::product(factors))
        }
    }

    fn unary(&mut self) -> Result<ScalarExpr> {
        self.enter()?;
        let out = if self.eat('-') {
            -self.unary()?
        } else if self.eat('+') {
            self.unary()?
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(out)
    }

    fn power(&mut self) -> Result<ScalarExpr> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let negative = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let k = match self.peek().clone() {
            Tok::Num(n) if n.is_integer() => {
                let v: i64 = n
                    .to_integer()
                    .try_into()
                    .ok()
                    .filter(|v: &i64| *v <= MAX_EXPONENT)
                    .ok_or_else(|| self.error_here("exponent too large"))?;
                self.bump();
                if negative { -v } else { v }
            }
            other => {
                return Err(self.error_here(format!(
                    "exponent must be an integer literal, found {}",
                    describe(&other)
                )))
            }
        };
        if paren {
            self.expect(')')?;
        }
        Ok(base.powi(k))
    }

    fn primary(&mut self) -> Result<ScalarExpr> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(ScalarExpr::constant(Rational::new(n)))
            }
            Tok::Op('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.pos;
                self.bump();
                if *self.peek() == Tok::Op('(') {
                    let Some(func) = Func::from_name(&name) else {
                        self.pos = at;
                        return Err(self.error_here(format!("unknown function `{name}`")));
                    };
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    if args.len() != func.arity() {
                        self.pos = at;
                        return Err(self.error_here(format!(
                            "`{name}` takes {} argument(s), got {}",
                            func.arity(),
                            args.len()
                        )));
                    }
                    return Ok(ScalarExpr::apply(func, args));
                }
                if let Some(k) = self.chart.index_of(&name) {
                    Ok(ScalarExpr::coord(k))
                } else if name == "pi" {
                    Ok(ScalarExpr::pi())
                } else if Func::from_name(&name).is_some() {
                    self.pos = at;
                    Err(self.error_here(format!("function `{name}` needs an argument list")))
                } else {
                    Ok(ScalarExpr::param(&name))
                }
            }
            other => Err(self.error_here(format!("expected an operand, found {}", describe(&other)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number `{n}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

/// Parse an expression against a chart. The result is not simplified.
pub fn parse_expr(text: &str, chart: &Chart) -> Result<ScalarExpr> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        chart,
        depth: 0,
    };
    if *p.peek() == Tok::End {
        return Err(p.error_here("empty expression"));
    }
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error_here(format!("unexpected {}", describe(p.peek()))));
    }
    Ok(e)
}
