//! Recursive-descent parser for classical observables.
//!
//! ```text
//! expr     := ['-'] term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := var ['^' uint] | rational | '(' expr ')'
//! rational := int ['/' uint]
//! ```
//!
//! Variables: `x y z px py pz`, `x1 x2 x3 p1 p2 p3`, and `p` for `px`.
//! The dimension is the highest index that survives simplification.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::opalgebra::Monomial;
use crate::quantizer::ClassicalPoly;

/// A parsed observable together with its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableExpr {
    pub source: String,
    pub poly: ClassicalPoly,
}

impl ObservableExpr {
    pub fn parse(source: &str) -> Result<Self> {
        Ok(ObservableExpr {
            source: source.to_string(),
            poly: parse_observable(source)?,
        })
    }

    pub fn dims(&self) -> usize {
        self.poly.dims()
    }
}

pub fn parse_observable(text: &str) -> Result<ClassicalPoly> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, end: text.chars().count() + 1 };
    let ast = p.expr()?;
    if let Some(tok) = p.peek() {
        return Err(err(tok.col, format!("unexpected {}", tok.kind.describe())));
    }
    let poly = ast.eval(ast.max_dim().map_or(1, |d| d + 1));
    // variables that cancel do not count
    Ok(poly.with_dims(poly.used_dims().max(1)).expect("unused dimensions dropped"))
}

fn err(column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        column,
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Int(BigInt),
    Var { momentum: bool, dim: usize },
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Kind {
    fn describe(&self) -> String {
        match self {
            Kind::Int(n) => format!("number {n}"),
            Kind::Var { .. } => "variable".into(),
            Kind::Plus => "'+'".into(),
            Kind::Minus => "'-'".into(),
            Kind::Star => "'*'".into(),
            Kind::Slash => "'/'".into(),
            Kind::Caret => "'^'".into(),
            Kind::LParen => "'('".into(),
            Kind::RParen => "')'".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: Kind,
    col: usize,
}

fn variable(name: &str) -> Option<(bool, usize)> {
    Some(match name {
        "x" | "x1" => (false, 0),
        "y" | "x2" => (false, 1),
        "z" | "x3" => (false, 2),
        "p" | "px" | "p1" => (true, 0),
        "py" | "p2" => (true, 1),
        "pz" | "p3" => (true, 2),
        _ => return None,
    })
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token {
                kind: Kind::Int(s.parse().expect("digits")),
                col,
            });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            let (momentum, dim) = variable(&name).ok_or_else(|| err(col, format!("unknown variable '{name}'")))?;
            out.push(Token {
                kind: Kind::Var { momentum, dim },
                col,
            });
            continue;
        }
        let kind = match c {
            '+' => Kind::Plus,
            '-' => Kind::Minus,
            '*' => Kind::Star,
            '/' => Kind::Slash,
            '^' => Kind::Caret,
            '(' => Kind::LParen,
            ')' => Kind::RParen,
            _ => return Err(err(col, format!("unexpected character '{c}'"))),
        };
        out.push(Token { kind, col });
        i += 1;
    }
    Ok(out)
}

enum Ast {
    Const(BigRational),
    Var { momentum: bool, dim: usize, power: u32 },
    Sum(Vec<(bool, Ast)>),
    Product(Vec<Ast>),
}

impl Ast {
    fn max_dim(&self) -> Option<usize> {
        match self {
            Ast::Const(_) => None,
            Ast::Var { dim, .. } => Some(*dim),
            Ast::Sum(items) => items.iter().filter_map(|(_, a)| a.max_dim()).max(),
            Ast::Product(items) => items.iter().filter_map(Ast::max_dim).max(),
        }
    }

    fn eval(&self, dims: usize) -> ClassicalPoly {
        match self {
            Ast::Const(c) => ClassicalPoly::constant(dims, c.clone()),
            Ast::Var { momentum, dim, power } => {
                let mut m = Monomial::one(dims);
                if *momentum {
                    m.p[*dim] = *power;
                } else {
                    m.x[*dim] = *power;
                }
                ClassicalPoly::term(m, BigRational::from_integer(1.into()))
            }
            Ast::Sum(items) => items.iter().fold(ClassicalPoly::zero(dims), |acc, (neg, a)| {
                let v = a.eval(dims);
                if *neg {
                    acc.sub(&v).expect("same dims")
                } else {
                    acc.add(&v).expect("same dims")
                }
            }),
            Ast::Product(items) => items.iter().fold(
                ClassicalPoly::constant(dims, BigRational::from_integer(1.into())),
                |acc, a| acc.mul(&a.eval(dims)).expect("same dims"),
            ),
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, kind: &Kind) -> bool {
        if self.peek().is_some_and(|t| &t.kind == kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn col(&self) -> usize {
        self.peek().map_or(self.end, |t| t.col)
    }

    fn expr(&mut self) -> Result<Ast> {
        let neg = self.eat(&Kind::Minus);
        let mut items = vec![(neg, self.term()?)];
        loop {
            if self.eat(&Kind::Plus) {
                items.push((false, self.term()?));
            } else if self.eat(&Kind::Minus) {
                items.push((true, self.term()?));
            } else {
                break;
            }
        }
        Ok(Ast::Sum(items))
    }

    fn term(&mut self) -> Result<Ast> {
        let mut items = vec![self.factor()?];
        while self.eat(&Kind::Star) {
            items.push(self.factor()?);
        }
        Ok(Ast::Product(items))
    }

    fn uint(&mut self, what: &str) -> Result<BigInt> {
        let col = self.col();
        match self.next() {
            Some(Token { kind: Kind::Int(n), .. }) => Ok(n),
            Some(t) => Err(err(t.col, format!("expected {what}, found {}", t.kind.describe()))),
            None => Err(err(col, format!("expected {what}, found end of input"))),
        }
    }

    fn factor(&mut self) -> Result<Ast> {
        let col = self.col();
        let Some(tok) = self.next() else {
            return Err(err(col, "expected a factor, found end of input"));
        };
        match tok.kind {
            Kind::Var { momentum, dim } => {
                let mut power = 1;
                if self.eat(&Kind::Caret) {
                    let col = self.col();
                    let e = self.uint("an exponent")?;
                    power = u32::try_from(e).map_err(|_| err(col, "exponent too large"))?;
                }
                Ok(Ast::Var { momentum, dim, power })
            }
            Kind::Int(n) => {
                let mut value = BigRational::from_integer(n);
                if self.eat(&Kind::Slash) {
                    let col = self.col();
                    let d = self.uint("a denominator")?;
                    if d.is_zero() {
                        return Err(err(col, "zero denominator"));
                    }
                    value /= BigRational::from_integer(d);
                }
                if self.peek().is_some_and(|t| t.kind == Kind::Caret) {
                    return Err(err(self.col(), "powers of numbers are not supported"));
                }
                Ok(Ast::Const(value))
            }
            Kind::LParen => {
                let inner = self.expr()?;
                if !self.eat(&Kind::RParen) {
                    return Err(err(self.col(), "expected ')'"));
                }
                if self.peek().is_some_and(|t| t.kind == Kind::Caret) {
                    return Err(err(
                        self.col(),
                        "powers of parenthesized expressions are not supported; expand the product",
                    ));
                }
                Ok(inner)
            }
            other => Err(err(tok.col, format!("expected a factor, found {}", other.describe()))),
        }
    }
}
