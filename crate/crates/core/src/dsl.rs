//! Scalar expression language for curvature, torsion, and warping profiles.
//!
//! Expressions are univariate in the arc-length parameter `s`. The grammar
//! covers decimal literals, the constant `pi`, the variable `s`, the unary
//! functions `sqrt`, `sin`, `cos`, `tan`, `exp`, `ln`, the four arithmetic
//! operators with unary minus, and `^` with an integer or rational literal
//! exponent. Trees are never simplified: [`differentiate`] produces the exact
//! structural derivative, so repeated differentiation is trustworthy up to
//! floating-point evaluation error and nothing else.

use std::fmt;

use thiserror::Error;

/// Rational exponent of a power node, kept in lowest terms with a positive
/// denominator so differentiation can decrement it without rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exponent {
    num: i64,
    den: i64,
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Exponent {
    /// Builds a normalized rational exponent. Returns `None` when `den` is 0.
    pub fn new(num: i64, den: i64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let sign = if den < 0 { -1 } else { 1 };
        let num = num * sign;
        let den = den * sign;
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        Some(Exponent {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(n: i64) -> Self {
        Exponent { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// The exponent lowered by one, as used by the power rule.
    pub fn decrement(&self) -> Exponent {
        Exponent::new(self.num - self.den, self.den).expect("denominator stays nonzero")
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            if self.num < 0 {
                write!(out, "(-{})", -self.num)
            } else {
                write!(out, "{}", self.num)
            }
        } else {
            write!(out, "({}/{})", self.num, self.den)
        }
    }
}

/// Expression tree over the single variable `s`.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionExpr {
    Const(f64),
    Var,
    Neg(Box<FunctionExpr>),
    Sum(Box<FunctionExpr>, Box<FunctionExpr>),
    Diff(Box<FunctionExpr>, Box<FunctionExpr>),
    Product(Box<FunctionExpr>, Box<FunctionExpr>),
    Quotient(Box<FunctionExpr>, Box<FunctionExpr>),
    Pow(Box<FunctionExpr>, Exponent),
    Sqrt(Box<FunctionExpr>),
    Sin(Box<FunctionExpr>),
    Cos(Box<FunctionExpr>),
    Tan(Box<FunctionExpr>),
    Exp(Box<FunctionExpr>),
    Ln(Box<FunctionExpr>),
}

/// Evaluation failure at a concrete parameter value. The `node` field holds
/// the offending subexpression rendered in grammar syntax.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("division by zero in `{node}` at s = {s}")]
    DivisionByZero { node: String, s: f64 },
    #[error("square root of negative value {value} in `{node}` at s = {s}")]
    SqrtOfNegative { node: String, s: f64, value: f64 },
    #[error("logarithm of non-positive value {value} in `{node}` at s = {s}")]
    LnOfNonPositive { node: String, s: f64, value: f64 },
    #[error("negative base {value} under fractional exponent in `{node}` at s = {s}")]
    FractionalPowerOfNegative { node: String, s: f64, value: f64 },
    #[error("zero base under negative exponent in `{node}` at s = {s}")]
    NegativePowerOfZero { node: String, s: f64 },
    #[error("non-finite result in `{node}` at s = {s}")]
    NonFinite { node: String, s: f64 },
}

impl DomainError {
    /// The parameter value the evaluation failed at.
    pub fn at(&self) -> f64 {
        match self {
            DomainError::DivisionByZero { s, .. }
            | DomainError::SqrtOfNegative { s, .. }
            | DomainError::LnOfNonPositive { s, .. }
            | DomainError::FractionalPowerOfNegative { s, .. }
            | DomainError::NegativePowerOfZero { s, .. }
            | DomainError::NonFinite { s, .. } => *s,
        }
    }
}

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
    pub expected: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "parse error at byte {}: {}", self.offset, self.message)?;
        if let Some(expected) = &self.expected {
            write!(out, " (expected {expected})")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

fn fmt_number(out: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v < 0.0 {
        // The parser never produces a negative literal, so negated constants
        // print in the form it would have produced them from.
        write!(out, "(-{})", -v)
    } else {
        write!(out, "{v}")
    }
}

impl fmt::Display for FunctionExpr {
    /// Fully parenthesized rendering in the grammar syntax. Parsing the
    /// output of a parser-produced tree returns a structurally equal tree.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionExpr::Const(v) => fmt_number(out, *v),
            FunctionExpr::Var => write!(out, "s"),
            FunctionExpr::Neg(a) => write!(out, "(-{a})"),
            FunctionExpr::Sum(a, b) => write!(out, "({a} + {b})"),
            FunctionExpr::Diff(a, b) => write!(out, "({a} - {b})"),
            FunctionExpr::Product(a, b) => write!(out, "({a} * {b})"),
            FunctionExpr::Quotient(a, b) => write!(out, "({a} / {b})"),
            FunctionExpr::Pow(a, p) => write!(out, "({a}^{p})"),
            FunctionExpr::Sqrt(a) => write!(out, "sqrt({a})"),
            FunctionExpr::Sin(a) => write!(out, "sin({a})"),
            FunctionExpr::Cos(a) => write!(out, "cos({a})"),
            FunctionExpr::Tan(a) => write!(out, "tan({a})"),
            FunctionExpr::Exp(a) => write!(out, "exp({a})"),
            FunctionExpr::Ln(a) => write!(out, "ln({a})"),
        }
    }
}

/// Constructor-style rendering of the tree shape, one node per constructor.
pub fn tree_string(expr: &FunctionExpr) -> String {
    match expr {
        FunctionExpr::Const(v) => format!("Const {v}"),
        FunctionExpr::Var => "Var s".to_string(),
        FunctionExpr::Neg(a) => format!("Neg({})", tree_string(a)),
        FunctionExpr::Sum(a, b) => format!("Sum({}, {})", tree_string(a), tree_string(b)),
        FunctionExpr::Diff(a, b) => format!("Diff({}, {})", tree_string(a), tree_string(b)),
        FunctionExpr::Product(a, b) => {
            format!("Product({}, {})", tree_string(a), tree_string(b))
        }
        FunctionExpr::Quotient(a, b) => {
            format!("Quotient({}, {})", tree_string(a), tree_string(b))
        }
        FunctionExpr::Pow(a, p) => format!("Pow({}, {})", tree_string(a), p),
        FunctionExpr::Sqrt(a) => format!("Sqrt({})", tree_string(a)),
        FunctionExpr::Sin(a) => format!("Sin({})", tree_string(a)),
        FunctionExpr::Cos(a) => format!("Cos({})", tree_string(a)),
        FunctionExpr::Tan(a) => format!("Tan({})", tree_string(a)),
        FunctionExpr::Exp(a) => format!("Exp({})", tree_string(a)),
        FunctionExpr::Ln(a) => format!("Ln({})", tree_string(a)),
    }
}

fn boxed(e: FunctionExpr) -> Box<FunctionExpr> {
    Box::new(e)
}

fn sum(a: FunctionExpr, b: FunctionExpr) -> FunctionExpr {
    FunctionExpr::Sum(boxed(a), boxed(b))
}

fn diff(a: FunctionExpr, b: FunctionExpr) -> FunctionExpr {
    FunctionExpr::Diff(boxed(a), boxed(b))
}

fn product(a: FunctionExpr, b: FunctionExpr) -> FunctionExpr {
    FunctionExpr::Product(boxed(a), boxed(b))
}

fn quotient(a: FunctionExpr, b: FunctionExpr) -> FunctionExpr {
    FunctionExpr::Quotient(boxed(a), boxed(b))
}

/// Exact structural derivative with respect to `s`. No simplification is
/// performed; zero factors stay in the tree and evaluate to zero.
pub fn differentiate(expr: &FunctionExpr) -> FunctionExpr {
    use FunctionExpr::*;
    match expr {
        Const(_) => Const(0.0),
        Var => Const(1.0),
        Neg(a) => Neg(boxed(differentiate(a))),
        Sum(a, b) => sum(differentiate(a), differentiate(b)),
        Diff(a, b) => diff(differentiate(a), differentiate(b)),
        Product(a, b) => sum(
            product(differentiate(a), (**b).clone()),
            product((**a).clone(), differentiate(b)),
        ),
        Quotient(a, b) => quotient(
            diff(
                product(differentiate(a), (**b).clone()),
                product((**a).clone(), differentiate(b)),
            ),
            Pow(b.clone(), Exponent::integer(2)),
        ),
        Pow(a, p) => product(
            product(Const(p.value()), Pow(a.clone(), p.decrement())),
            differentiate(a),
        ),
        Sqrt(a) => quotient(
            differentiate(a),
            product(Const(2.0), Sqrt(a.clone())),
        ),
        Sin(a) => product(Cos(a.clone()), differentiate(a)),
        Cos(a) => Neg(boxed(product(Sin(a.clone()), differentiate(a)))),
        Tan(a) => quotient(
            differentiate(a),
            Pow(boxed(Cos(a.clone())), Exponent::integer(2)),
        ),
        Exp(a) => product(Exp(a.clone()), differentiate(a)),
        Ln(a) => quotient(differentiate(a), (**a).clone()),
    }
}

fn check_finite(v: f64, expr: &FunctionExpr, s: f64) -> Result<f64, DomainError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DomainError::NonFinite {
            node: expr.to_string(),
            s,
        })
    }
}

fn eval_pow(base: f64, p: Exponent, expr: &FunctionExpr, s: f64) -> Result<f64, DomainError> {
    if base == 0.0 && p.value() < 0.0 {
        return Err(DomainError::NegativePowerOfZero {
            node: expr.to_string(),
            s,
        });
    }
    if p.is_integer() {
        let n = p.num();
        let v = if let Ok(n32) = i32::try_from(n) {
            base.powi(n32)
        } else {
            // Out of i32 range; fall back to the magnitude with an explicit
            // sign so negative bases stay correct.
            let mag = base.abs().powf(n as f64);
            if base < 0.0 && n % 2 != 0 {
                -mag
            } else {
                mag
            }
        };
        return check_finite(v, expr, s);
    }
    if base < 0.0 {
        return Err(DomainError::FractionalPowerOfNegative {
            node: expr.to_string(),
            s,
            value: base,
        });
    }
    check_finite(base.powf(p.value()), expr, s)
}

/// Evaluates the expression at `s`, reporting the offending node on any
/// domain failure or non-finite intermediate.
pub fn eval(expr: &FunctionExpr, s: f64) -> Result<f64, DomainError> {
    use FunctionExpr::*;
    let v = match expr {
        Const(v) => *v,
        Var => s,
        Neg(a) => -eval(a, s)?,
        Sum(a, b) => eval(a, s)? + eval(b, s)?,
        Diff(a, b) => eval(a, s)? - eval(b, s)?,
        Product(a, b) => eval(a, s)? * eval(b, s)?,
        Quotient(a, b) => {
            let den = eval(b, s)?;
            if den == 0.0 {
                return Err(DomainError::DivisionByZero {
                    node: expr.to_string(),
                    s,
                });
            }
            eval(a, s)? / den
        }
        Pow(a, p) => return eval_pow(eval(a, s)?, *p, expr, s),
        Sqrt(a) => {
            let v = eval(a, s)?;
            if v < 0.0 {
                return Err(DomainError::SqrtOfNegative {
                    node: expr.to_string(),
                    s,
                    value: v,
                });
            }
            v.sqrt()
        }
        Sin(a) => eval(a, s)?.sin(),
        Cos(a) => eval(a, s)?.cos(),
        Tan(a) => eval(a, s)?.tan(),
        Exp(a) => eval(a, s)?.exp(),
        Ln(a) => {
            let v = eval(a, s)?;
            if v <= 0.0 {
                return Err(DomainError::LnOfNonPositive {
                    node: expr.to_string(),
                    s,
                    value: v,
                });
            }
            v.ln()
        }
    };
    check_finite(v, expr, s)
}

/// Collects the arguments of every `tan` node in the tree. Grid scanners use
/// this to skip samples that land too close to a tangent pole.
pub fn tan_arguments(expr: &FunctionExpr) -> Vec<&FunctionExpr> {
    let mut args = Vec::new();
    collect_tan_arguments(expr, &mut args);
    args
}

fn collect_tan_arguments<'a>(expr: &'a FunctionExpr, args: &mut Vec<&'a FunctionExpr>) {
    use FunctionExpr::*;
    match expr {
        Const(_) | Var => {}
        Neg(a) | Pow(a, _) | Sqrt(a) | Sin(a) | Cos(a) | Exp(a) | Ln(a) => {
            collect_tan_arguments(a, args)
        }
        Tan(a) => {
            args.push(a);
            collect_tan_arguments(a, args);
        }
        Sum(a, b) | Diff(a, b) | Product(a, b) | Quotient(a, b) => {
            collect_tan_arguments(a, args);
            collect_tan_arguments(b, args);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, raw: String },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num { raw, .. } => format!("number `{raw}`"),
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Plus => "`+`".to_string(),
            Tok::Minus => "`-`".to_string(),
            Tok::Star => "`*`".to_string(),
            Tok::Slash => "`/`".to_string(),
            Tok::Caret => "`^`".to_string(),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
        }
    }
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                toks.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            b'/' => {
                toks.push((i, Tok::Slash));
                i += 1;
            }
            b'^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            b'(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    if i >= bytes.len() || !bytes[i].is_ascii_digit() {
                        return Err(ParseError {
                            offset: i,
                            message: "digits must follow a decimal point".to_string(),
                            expected: Some("digit".to_string()),
                        });
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let raw = &input[start..i];
                let value = raw.parse::<f64>().map_err(|_| ParseError {
                    offset: start,
                    message: format!("invalid number literal `{raw}`"),
                    expected: None,
                })?;
                toks.push((
                    start,
                    Tok::Num {
                        value,
                        raw: raw.to_string(),
                    },
                ));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Ident(input[start..i].to_string())));
            }
            _ => {
                return Err(ParseError {
                    offset: i,
                    message: format!("unexpected character `{}`", &input[i..i + 1]),
                    expected: None,
                });
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn advance(&mut self) -> Option<Tok> {
        let tok = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn err(&self, message: impl Into<String>, expected: Option<&str>) -> ParseError {
        ParseError {
            offset: self.offset(),
            message: message.into(),
            expected: expected.map(str::to_string),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(())
            }
            Some(tok) => Err(self.err(format!("found {}", tok.describe()), Some("`)`"))),
            None => Err(self.err("unexpected end of input", Some("`)`"))),
        }
    }

    fn expr(&mut self) -> Result<FunctionExpr, ParseError> {
        let mut node = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    node = sum(node, self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    node = diff(node, self.term()?);
                }
                _ => return Ok(node),
            }
        }
    }

    fn term(&mut self) -> Result<FunctionExpr, ParseError> {
        let mut node = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    node = product(node, self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    node = quotient(node, self.unary()?);
                }
                _ => return Ok(node),
            }
        }
    }

    fn unary(&mut self) -> Result<FunctionExpr, ParseError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.pos += 1;
            Ok(FunctionExpr::Neg(boxed(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<FunctionExpr, ParseError> {
        let mut node = self.atom()?;
        while matches!(self.peek(), Some(Tok::Caret)) {
            self.pos += 1;
            let exponent = self.exponent()?;
            node = FunctionExpr::Pow(boxed(node), exponent);
        }
        Ok(node)
    }

    fn integer_literal(&mut self, context: &str) -> Result<i64, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num { raw, .. }) => {
                if raw.bytes().all(|b| b.is_ascii_digit()) {
                    let n = raw.parse::<i64>().map_err(|_| {
                        self.err(format!("{context} `{raw}` out of range"), None)
                    })?;
                    self.pos += 1;
                    Ok(n)
                } else {
                    Err(self.err(
                        format!("{context} must be an integer, found `{raw}`"),
                        Some("integer literal"),
                    ))
                }
            }
            Some(tok) => Err(self.err(
                format!("{context} missing, found {}", tok.describe()),
                Some("integer literal"),
            )),
            None => Err(self.err("unexpected end of input", Some("integer literal"))),
        }
    }

    /// Exponent forms: `2`, `-2`, `(3)`, `(-3)`, `(3/2)`, `(-3/2)`.
    fn exponent(&mut self) -> Result<Exponent, ParseError> {
        match self.peek() {
            Some(Tok::Num { .. }) => {
                let n = self.integer_literal("exponent")?;
                Ok(Exponent::integer(n))
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                let n = self.integer_literal("exponent")?;
                Ok(Exponent::integer(-n))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let negative = if matches!(self.peek(), Some(Tok::Minus)) {
                    self.pos += 1;
                    true
                } else {
                    false
                };
                let num = self.integer_literal("exponent numerator")?;
                let den = if matches!(self.peek(), Some(Tok::Slash)) {
                    self.pos += 1;
                    let den = self.integer_literal("exponent denominator")?;
                    if den == 0 {
                        return Err(self.err("exponent denominator is zero", None));
                    }
                    den
                } else {
                    1
                };
                self.expect_rparen()?;
                let num = if negative { -num } else { num };
                Ok(Exponent::new(num, den).expect("denominator checked nonzero"))
            }
            Some(tok) => Err(self.err(
                format!("exponent must be a literal, found {}", tok.describe()),
                Some("integer or parenthesized rational"),
            )),
            None => Err(self.err(
                "unexpected end of input",
                Some("integer or parenthesized rational"),
            )),
        }
    }

    fn atom(&mut self) -> Result<FunctionExpr, ParseError> {
        let offset = self.offset();
        match self.advance() {
            Some(Tok::Num { value, .. }) => Ok(FunctionExpr::Const(value)),
            Some(Tok::LParen) => {
                let node = self.expr()?;
                self.expect_rparen()?;
                Ok(node)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "s" => Ok(FunctionExpr::Var),
                "pi" => Ok(FunctionExpr::Const(std::f64::consts::PI)),
                "sqrt" | "sin" | "cos" | "tan" | "exp" | "ln" => {
                    match self.peek() {
                        Some(Tok::LParen) => {
                            self.pos += 1;
                        }
                        _ => {
                            return Err(self.err(
                                format!("function `{name}` must be applied with parentheses"),
                                Some("`(`"),
                            ));
                        }
                    }
                    let arg = boxed(self.expr()?);
                    self.expect_rparen()?;
                    Ok(match name.as_str() {
                        "sqrt" => FunctionExpr::Sqrt(arg),
                        "sin" => FunctionExpr::Sin(arg),
                        "cos" => FunctionExpr::Cos(arg),
                        "tan" => FunctionExpr::Tan(arg),
                        "exp" => FunctionExpr::Exp(arg),
                        _ => FunctionExpr::Ln(arg),
                    })
                }
                _ => Err(ParseError {
                    offset,
                    message: format!("unknown identifier `{name}`"),
                    expected: Some("one of `s`, `pi`, `sqrt`, `sin`, `cos`, `tan`, `exp`, `ln`".to_string()),
                }),
            },
            Some(tok) => Err(ParseError {
                offset,
                message: format!("found {}", tok.describe()),
                expected: Some("number, `s`, `pi`, function call, or `(`".to_string()),
            }),
            None => Err(ParseError {
                offset,
                message: "unexpected end of input".to_string(),
                expected: Some("number, `s`, `pi`, function call, or `(`".to_string()),
            }),
        }
    }
}

/// Parses an expression in the profile grammar.
pub fn parse(input: &str) -> Result<FunctionExpr, ParseError> {
    let toks = lex(input)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: input.len(),
    };
    let node = parser.expr()?;
    if let Some(tok) = parser.peek() {
        let message = format!("trailing input: found {}", tok.describe());
        return Err(parser.err(message, Some("end of input")));
    }
    Ok(node)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parsed(input: &str) -> FunctionExpr {
        parse(input).unwrap_or_else(|e| panic!("parse `{input}`: {e}"))
    }

    #[test]
    fn parses_quotient_tree_shape() {
        let tree = parsed("9/(2*s)");
        assert_eq!(tree_string(&tree), "Quotient(Const 9, Product(Const 2, Var s))");
    }

    #[test]
    fn multiplication_binds_tighter_than_addition() {
        let tree = parsed("2*s^2 + 1");
        assert_eq!(
            tree_string(&tree),
            "Sum(Product(Const 2, Pow(Var s, 2)), Const 1)"
        );
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let tree = parsed("-s^2");
        assert_eq!(tree_string(&tree), "Neg(Pow(Var s, 2))");
        assert_eq!(eval(&tree, 3.0).unwrap(), -9.0);
    }

    #[test]
    fn unary_minus_after_operator() {
        let tree = parsed("2 * -s");
        assert_eq!(eval(&tree, 3.0).unwrap(), -6.0);
    }

    #[test]
    fn pi_is_a_constant() {
        let tree = parsed("sin(pi/2)");
        assert!((eval(&tree, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rational_exponent_round_trip() {
        let tree = parsed("s^(-3/2)");
        assert_eq!(tree_string(&tree), "Pow(Var s, (-3/2))");
        let printed = tree.to_string();
        assert_eq!(parsed(&printed), tree);
        assert!((eval(&tree, 4.0).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn negative_integer_exponent_without_parens() {
        let tree = parsed("s^-2");
        assert!((eval(&tree, 2.0).unwrap() - 0.25).abs() < 1e-16);
    }

    #[test]
    fn stacked_exponents_apply_left_to_right() {
        // (s^2)^3 = s^6 under left association.
        let tree = parsed("s^2^3");
        assert_eq!(eval(&tree, 2.0).unwrap(), 64.0);
    }

    #[test]
    fn rejects_variable_exponent() {
        let err = parse("s^s").unwrap_err();
        assert_eq!(err.offset, 2);
        assert!(err.message.contains("exponent must be a literal"));
    }

    #[test]
    fn rejects_fractional_literal_exponent() {
        let err = parse("s^2.5").unwrap_err();
        assert!(err.message.contains("must be an integer"));
    }

    #[test]
    fn reports_offset_of_unclosed_call() {
        let err = parse("tan(").unwrap_err();
        assert_eq!(err.offset, 4);
    }

    #[test]
    fn reports_unknown_identifier() {
        let err = parse("foo(2)").unwrap_err();
        assert_eq!(err.offset, 0);
        assert!(err.message.contains("unknown identifier `foo`"));
    }

    #[test]
    fn reports_trailing_input() {
        let err = parse("s s").unwrap_err();
        assert_eq!(err.offset, 2);
        assert!(err.message.contains("trailing input"));
    }

    #[test]
    fn division_by_zero_names_the_node() {
        let tree = parsed("1/s");
        let err = eval(&tree, 0.0).unwrap_err();
        assert_eq!(
            err,
            DomainError::DivisionByZero {
                node: "(1 / s)".to_string(),
                s: 0.0
            }
        );
    }

    #[test]
    fn sqrt_of_negative_names_the_node() {
        let tree = parsed("sqrt(s - 2)");
        let err = eval(&tree, 1.0).unwrap_err();
        match err {
            DomainError::SqrtOfNegative { value, s, .. } => {
                assert_eq!(value, -1.0);
                assert_eq!(s, 1.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ln_requires_positive_argument() {
        let tree = parsed("ln(s)");
        assert!(matches!(
            eval(&tree, 0.0),
            Err(DomainError::LnOfNonPositive { .. })
        ));
    }

    #[test]
    fn fractional_power_of_negative_base_fails() {
        let tree = parsed("s^(1/2)");
        assert!(matches!(
            eval(&tree, -1.0),
            Err(DomainError::FractionalPowerOfNegative { .. })
        ));
    }

    #[test]
    fn integer_power_of_negative_base_keeps_sign() {
        let tree = parsed("s^3");
        assert_eq!(eval(&tree, -2.0).unwrap(), -8.0);
    }

    #[test]
    fn overflow_is_reported_as_non_finite() {
        let tree = parsed("exp(s)");
        assert!(matches!(
            eval(&tree, 1000.0),
            Err(DomainError::NonFinite { .. })
        ));
    }

    #[test]
    fn derivative_of_inverse_square_root_profile() {
        // d/ds sqrt(5)/s = -sqrt(5)/s^2.
        let tree = parsed("sqrt(5)/s");
        let d = differentiate(&tree);
        let got = eval(&d, 2.0).unwrap();
        let want = -(5.0_f64.sqrt()) / 4.0;
        assert!((got - want).abs() <= 1e-15 * want.abs());
    }

    #[test]
    fn derivative_chain_rule_through_sine() {
        let tree = parsed("sin(2*s)");
        let d = differentiate(&tree);
        let got = eval(&d, 0.7).unwrap();
        let want = 2.0 * (1.4_f64).cos();
        assert!((got - want).abs() <= 1e-15);
    }

    #[test]
    fn derivative_of_rational_power() {
        let tree = parsed("s^(3/2)");
        let d = differentiate(&tree);
        let got = eval(&d, 4.0).unwrap();
        assert!((got - 3.0).abs() <= 1e-15);
    }

    #[test]
    fn derivative_of_tangent_squares_the_secant() {
        let tree = parsed("tan(s)");
        let d = differentiate(&tree);
        let s = 0.3_f64;
        let want = 1.0 / (s.cos() * s.cos());
        assert!((eval(&d, s).unwrap() - want).abs() <= 1e-14);
    }

    #[test]
    fn display_round_trips_parser_shaped_trees() {
        for input in [
            "9/(2*s)",
            "sqrt(5)/s",
            "(1/sqrt(2))*tan((0 - s)/sqrt(2))",
            "-(s + 3)*cos(s^2)",
            "exp(s)/ln(s + 2)",
            "s^(-3/2) + pi",
        ] {
            let tree = parsed(input);
            let printed = tree.to_string();
            assert_eq!(parsed(&printed), tree, "round trip failed for `{input}`");
        }
    }

    #[test]
    fn tan_arguments_are_collected_from_nested_trees() {
        let tree = parsed("tan(s/2) + 3*tan(tan(s))");
        let args = tan_arguments(&tree);
        assert_eq!(args.len(), 3);
    }
}
