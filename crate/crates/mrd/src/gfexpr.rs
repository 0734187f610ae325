//! A small expression language for describing generating functions in text,
//! e.g. `(1-sqrt(1-4*t))/(2*t)` or `revert(t/(1+3*t+t^2))`.
//!
//! The grammar ([`GRAMMAR`]) is deliberately tiny: rational arithmetic on
//! series in `t`, integer powers, formal roots, and a handful of named
//! series and operators ([`BUILTINS`]). Parsing reports the exact byte
//! offset of every failure together with what would have been accepted
//! there.
//!
//! Evaluation is truncation-aware. Some operations lose known coefficients
//! (dividing by `t` shifts everything down; roots at positive valuation
//! cost a fraction of the order), so a request for order `N` first
//! evaluates at `N`, and on a shortfall or a truncation-sensitive failure
//! retries at progressively padded working orders before giving up. The
//! returned series is always exactly order `N`.

use crate::rational::{binomial, Rational};
use crate::series::{Series, SeriesError};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

/// The surface grammar, as accepted by [`parse`].
pub const GRAMMAR: &str = "\
expr   := term (('+'|'-') term)*
term   := factor (('*'|'/') factor)*
factor := atom ('^' int)?
atom   := int | 't' | '(' expr ')' | '-' atom | name '(' args ')' | 'sqrt' ('[' int ']')? '(' expr ')'
";

/// Named series and operators: `(name, arity, summary)`.
pub const BUILTINS: &[(&str, usize, &str)] = &[
    ("catalan", 0, "Catalan number series 1, 1, 2, 5, 14, ..."),
    ("schroeder_small", 0, "small Schroeder series 1, 1, 3, 11, 45, ..."),
    ("schroeder_large", 0, "large Schroeder series 1, 2, 6, 22, 90, ..."),
    ("fuss", 1, "fuss(l): fixed point of F = 1 + t*F^l"),
    ("revert", 1, "compositional inverse of a series with valuation one"),
    ("subst", 2, "subst(f, g): substitute g (with g(0) = 0) into f"),
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GfError {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },

    #[error("unknown function `{name}` at byte {position}")]
    UnknownFunction { name: String, position: usize },

    #[error("arity error at byte {position}: `{name}` takes {expected} argument(s), got {got}")]
    Arity { name: String, position: usize, expected: usize, got: usize },

    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Parsed expression tree. Parentheses disappear during parsing; operator
/// structure is explicit. Integer literals are unsigned at parse time
/// (a leading `-` becomes [`Expr::Neg`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    T,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    /// `sqrt[k](e)`; `k = 2` prints without the bracket.
    Root(u32, Box<Expr>),
    Call(String, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

struct Lexed {
    toks: Vec<(Tok, usize)>,
    end: usize,
}

fn lex(src: &str) -> Result<Lexed, GfError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                toks.push((Tok::Int(text.parse().expect("digit run parses")), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            }
            b'+' => { toks.push((Tok::Plus, i)); i += 1 }
            b'-' => { toks.push((Tok::Minus, i)); i += 1 }
            b'*' => { toks.push((Tok::Star, i)); i += 1 }
            b'/' => { toks.push((Tok::Slash, i)); i += 1 }
            b'^' => { toks.push((Tok::Caret, i)); i += 1 }
            b'(' => { toks.push((Tok::LParen, i)); i += 1 }
            b')' => { toks.push((Tok::RParen, i)); i += 1 }
            b'[' => { toks.push((Tok::LBracket, i)); i += 1 }
            b']' => { toks.push((Tok::RBracket, i)); i += 1 }
            b',' => { toks.push((Tok::Comma, i)); i += 1 }
            _ => {
                return Err(GfError::Syntax {
                    position: i,
                    expected: "a digit, a letter, or one of `+ - * / ^ ( ) [ ] ,`".into(),
                })
            }
        }
    }
    Ok(Lexed { toks, end: src.len() })
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
    end: usize,
}

const ATOM_EXPECTED: &str = "an integer, `t`, a name, `(`, `-`, or `sqrt`";

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|&(_, p)| p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|(t, _)| t.clone());
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), GfError> {
        if self.peek() == Some(&tok) {
            self.i += 1;
            Ok(())
        } else {
            Err(GfError::Syntax { position: self.pos(), expected: expected.into() })
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, GfError> {
        let mut lhs = self.parse_term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.i += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.parse_term()?));
                }
                Some(Tok::Minus) => {
                    self.i += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.parse_term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr, GfError> {
        let mut lhs = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.i += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.parse_factor()?));
                }
                Some(Tok::Slash) => {
                    self.i += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.parse_factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Expr, GfError> {
        let base = self.parse_atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.i += 1;
        let negative = if self.peek() == Some(&Tok::Minus) {
            self.i += 1;
            true
        } else {
            false
        };
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => {
                let mag = n.to_i64().ok_or_else(|| GfError::Syntax {
                    position: pos,
                    expected: "an integer exponent within machine range".into(),
                })?;
                Ok(Expr::Pow(Box::new(base), if negative { -mag } else { mag }))
            }
            _ => Err(GfError::Syntax { position: pos, expected: "an integer exponent".into() }),
        }
    }

    fn parse_atom(&mut self) -> Result<Expr, GfError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(Expr::Int(n)),
            Some(Tok::Minus) => Ok(Expr::Neg(Box::new(self.parse_atom()?))),
            Some(Tok::LParen) => {
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) if name == "t" => Ok(Expr::T),
            Some(Tok::Ident(name)) if name == "sqrt" => self.parse_root(),
            Some(Tok::Ident(name)) => self.parse_call(name, pos),
            _ => Err(GfError::Syntax { position: pos, expected: ATOM_EXPECTED.into() }),
        }
    }

    fn parse_root(&mut self) -> Result<Expr, GfError> {
        let mut degree = 2;
        let had_bracket = self.peek() == Some(&Tok::LBracket);
        if had_bracket {
            self.i += 1;
            let pos = self.pos();
            let n = match self.bump() {
                Some(Tok::Int(n)) => n,
                _ => return Err(GfError::Syntax { position: pos, expected: "an integer".into() }),
            };
            self.expect(Tok::RBracket, "`]`")?;
            degree = match n.to_u32() {
                Some(d) if d >= 1 => d,
                _ => {
                    return Err(GfError::Syntax {
                        position: pos,
                        expected: "a positive root degree".into(),
                    })
                }
            };
        }
        self.expect(Tok::LParen, if had_bracket { "`(`" } else { "`[` or `(`" })?;
        let inner = self.parse_expr()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(Expr::Root(degree, Box::new(inner)))
    }

    fn parse_call(&mut self, name: String, name_pos: usize) -> Result<Expr, GfError> {
        let arity = match BUILTINS.iter().find(|(n, _, _)| *n == name) {
            Some(&(_, arity, _)) => arity,
            None => return Err(GfError::UnknownFunction { name, position: name_pos }),
        };
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        let mut arg_positions = Vec::new();
        if self.peek() != Some(&Tok::RParen) {
            loop {
                arg_positions.push(self.pos());
                args.push(self.parse_expr()?);
                match self.peek() {
                    Some(Tok::Comma) => {
                        self.i += 1;
                    }
                    Some(Tok::RParen) => break,
                    _ => {
                        return Err(GfError::Syntax {
                            position: self.pos(),
                            expected: "`,` or `)`".into(),
                        })
                    }
                }
            }
        }
        self.i += 1; // the `)` just peeked
        if args.len() != arity {
            return Err(GfError::Arity { name, position: name_pos, expected: arity, got: args.len() });
        }
        if name == "fuss" {
            match &args[0] {
                Expr::Int(n) if n >= &BigInt::one() && n.to_u32().is_some() => {}
                _ => {
                    return Err(GfError::Syntax {
                        position: arg_positions[0],
                        expected: "a positive integer argument to `fuss`".into(),
                    })
                }
            }
        }
        Ok(Expr::Call(name, args))
    }
}

/// Parse one expression spanning the whole input.
pub fn parse(src: &str) -> Result<Expr, GfError> {
    let lexed = lex(src)?;
    let mut p = Parser { toks: lexed.toks, i: 0, end: lexed.end };
    let expr = p.parse_expr()?;
    if p.i != p.toks.len() {
        return Err(GfError::Syntax { position: p.pos(), expected: "end of input".into() });
    }
    Ok(expr)
}

// Printing: the output must reparse to the identical tree. Binary operators
// are left associative, so a right child at the same precedence needs
// parentheses; `^` and `-` take single atoms, so any structured operand
// gets wrapped.

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Pow(..) => 3,
        Expr::Int(_) | Expr::T | Expr::Neg(_) | Expr::Root(..) | Expr::Call(..) => 4,
    }
}

fn atom_str(e: &Expr) -> String {
    if prec(e) == 4 {
        pretty(e)
    } else {
        format!("({})", pretty(e))
    }
}

fn pretty_side(e: &Expr, parent: u8, right: bool) -> String {
    let p = prec(e);
    if p < parent || (p == parent && right) {
        format!("({})", pretty(e))
    } else {
        pretty(e)
    }
}

/// Render the tree in minimal-parenthesis form; `parse(&pretty(e)) == e`.
pub fn pretty(e: &Expr) -> String {
    match e {
        Expr::Int(n) => n.to_string(),
        Expr::T => "t".to_string(),
        Expr::Neg(x) => format!("-{}", atom_str(x)),
        Expr::Add(l, r) => format!("{} + {}", pretty_side(l, 1, false), pretty_side(r, 1, true)),
        Expr::Sub(l, r) => format!("{} - {}", pretty_side(l, 1, false), pretty_side(r, 1, true)),
        Expr::Mul(l, r) => format!("{}*{}", pretty_side(l, 2, false), pretty_side(r, 2, true)),
        Expr::Div(l, r) => format!("{}/{}", pretty_side(l, 2, false), pretty_side(r, 2, true)),
        Expr::Pow(b, e) => format!("{}^{}", atom_str(b), e),
        Expr::Root(2, x) => format!("sqrt({})", pretty(x)),
        Expr::Root(k, x) => format!("sqrt[{k}]({})", pretty(x)),
        Expr::Call(name, args) => {
            let rendered: Vec<String> = args.iter().map(pretty).collect();
            format!("{name}({})", rendered.join(", "))
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", pretty(self))
    }
}

/// Working orders tried by [`eval`]: the requested order plus each padding
/// in turn, to absorb order lost to division by powers of `t`, shifted
/// roots, and similar.
const PADDINGS: [usize; 5] = [0, 4, 16, 64, 256];

/// Evaluate to a series of exactly the requested truncation order.
///
/// Internally evaluates at padded working orders (see [`PADDINGS`]) until
/// the result covers the request, because subexpressions may lose order or
/// need more terms before a valuation becomes visible. A failure that
/// survives the largest padding is reported as-is.
pub fn eval(expr: &Expr, order: usize) -> Result<Series, GfError> {
    let mut last: Option<GfError> = None;
    for pad in PADDINGS {
        match eval_at(expr, order + pad) {
            Ok(s) if s.order() >= order => return Ok(s.truncated(order)),
            Ok(s) => {
                last = Some(
                    SeriesError::InsufficientTruncation { needed: order, have: s.order() }.into(),
                )
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one padding attempted"))
}

/// Parse and evaluate in one step.
pub fn eval_str(src: &str, order: usize) -> Result<Series, GfError> {
    eval(&parse(src)?, order)
}

fn eval_at(expr: &Expr, order: usize) -> Result<Series, GfError> {
    match expr {
        Expr::Int(n) => Ok(Series::constant(Rational::from_integer(n.clone()), order)),
        Expr::T => Ok(Series::t(order)),
        Expr::Neg(x) => Ok(eval_at(x, order)?.neg()),
        Expr::Add(l, r) => Ok(eval_at(l, order)?.add(&eval_at(r, order)?)),
        Expr::Sub(l, r) => Ok(eval_at(l, order)?.sub(&eval_at(r, order)?)),
        Expr::Mul(l, r) => Ok(eval_at(l, order)?.mul(&eval_at(r, order)?)),
        Expr::Div(l, r) => Ok(eval_at(l, order)?.div(&eval_at(r, order)?)?),
        Expr::Pow(b, e) => Ok(eval_at(b, order)?.pow_i(*e)?),
        Expr::Root(k, x) => Ok(eval_at(x, order)?.ell_root(*k as usize)?),
        Expr::Call(name, args) => match name.as_str() {
            "catalan" => Ok(catalan_series(order)),
            "schroeder_small" => Ok(schroeder_small_series(order)),
            "schroeder_large" => Ok(schroeder_large_series(order)),
            "fuss" => {
                let ell = match &args[0] {
                    Expr::Int(n) => n.to_u32().expect("validated at parse") as usize,
                    _ => unreachable!("validated at parse"),
                };
                Ok(fuss_series(ell, order))
            }
            "revert" => Ok(eval_at(&args[0], order)?.comp_inverse()?),
            "subst" => {
                let f = eval_at(&args[0], order)?;
                let g = eval_at(&args[1], order)?;
                Ok(f.compose(&g)?)
            }
            _ => unreachable!("validated at parse"),
        },
    }
}

/// Catalan numbers `C(2n, n) / (n + 1)` as a series.
pub fn catalan_series(order: usize) -> Series {
    Series::from_coeffs(
        (0..=order)
            .map(|n| {
                Rational::new(binomial(&BigInt::from(2 * n as i64), n), BigInt::from(n as i64 + 1))
            })
            .collect(),
    )
}

fn schroeder_discriminant(order: usize) -> Series {
    let mut coeffs = vec![Rational::zero(); order + 1];
    coeffs[0] = Rational::one();
    if order >= 1 {
        coeffs[1] = Rational::from_integer((-6).into());
    }
    if order >= 2 {
        coeffs[2] = Rational::one();
    }
    Series::from_coeffs(coeffs).ell_root(2).expect("1 - 6t + t^2 has a unit constant term")
}

/// Small Schroeder numbers 1, 1, 3, 11, 45, ...
pub fn schroeder_small_series(order: usize) -> Series {
    let disc = schroeder_discriminant(order + 1);
    let num = Series::t(order + 1).add_scalar(&Rational::one()).sub(&disc);
    num.div(&Series::monomial(Rational::from_integer(4.into()), 1, order + 1))
        .expect("numerator has valuation at least one")
}

/// Large Schroeder numbers 1, 2, 6, 22, 90, ...
pub fn schroeder_large_series(order: usize) -> Series {
    let disc = schroeder_discriminant(order + 1);
    let num = Series::t(order + 1).neg().add_scalar(&Rational::one()).sub(&disc);
    num.div(&Series::monomial(Rational::from_integer(2.into()), 1, order + 1))
        .expect("numerator has valuation at least one")
}

/// The unique series fixed point of `F = 1 + t*F^ell` (Fuss numbers of
/// order `ell`; `ell = 2` gives the Catalan numbers, `ell = 1` the
/// geometric series).
pub fn fuss_series(ell: usize, order: usize) -> Series {
    assert!(ell >= 1, "the fixed point needs a positive power");
    let mut f = Series::one(order);
    // each pass extends agreement with the fixed point by one order
    for _ in 0..order {
        f = f.pow(ell).mul_t_pow(1).truncated(order).add_scalar(&Rational::one());
    }
    f
}
