//! A small arithmetic expression language for scenario files.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          (right associative)
//! atom    := number | x<k> | name | func '(' sum ')' | '(' sum ')'
//! func    := sin | cos | sqrt
//! ```
//!
//! Variables are `x1 .. xn`; other names must be bound constants (`pi` is
//! always bound).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Denominators at or below this magnitude raise [`EvalError::DivisionByZero`].
pub const DIVISION_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// A bound constant, kept by name so it renders back unchanged.
    Named(String, f64),
    /// 1-based coordinate index.
    Var(usize),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {}", expected.join(" or "))]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by {0:e}")]
    DivisionByZero(f64),
    #[error("variable x{index} is not bound (dimension {dimension})")]
    UnboundVariable { index: usize, dimension: usize },
    #[error("{0} is outside the function domain")]
    Domain(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot differentiate {0} symbolically")]
pub struct DerivativeError(pub String);

/// Parses with only `pi` bound.
pub fn parse_expression(text: &str) -> Result<Expr, SyntaxError> {
    parse_with_constants(text, &BTreeMap::new())
}

pub fn parse_with_constants(text: &str, constants: &BTreeMap<String, f64>) -> Result<Expr, SyntaxError> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
        constants,
    };
    let expr = parser.sum()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error(&["operator", "end of input"]));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    constants: &'a BTreeMap<String, f64>,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        SyntaxError {
            offset: self.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), SyntaxError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&[&format!("'{}'", byte as char)]))
        }
    }

    fn sum(&mut self) -> Result<Expr, SyntaxError> {
        let mut left = self.product()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinaryOp::Add,
                Some(b'-') => BinaryOp::Sub,
                _ => return Ok(left),
            };
            self.pos += 1;
            let right = self.product()?;
            left = Expr::Binary(op, Box::new(left), Box::new(right));
        }
    }

    fn product(&mut self) -> Result<Expr, SyntaxError> {
        let mut left = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinaryOp::Mul,
                Some(b'/') => BinaryOp::Div,
                _ => return Ok(left),
            };
            self.pos += 1;
            let right = self.unary()?;
            left = Expr::Binary(op, Box::new(left), Box::new(right));
        }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        const ATOM: &[&str] = &["number", "variable", "constant", "function", "'('"];
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            _ => Err(self.error(ATOM)),
        }
    }

    fn number(&mut self) -> Result<Expr, SyntaxError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos > s
        };
        let mut any = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            any |= digits(self);
        }
        if !any {
            self.pos = start;
            return Err(self.error(&["number"]));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if !digits(self) {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        text.parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| SyntaxError {
                offset: start,
                expected: vec!["number".into()],
            })
    }

    fn identifier(&mut self) -> Result<Expr, SyntaxError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        let func = match name {
            "sin" => Some(UnaryOp::Sin),
            "cos" => Some(UnaryOp::Cos),
            "sqrt" => Some(UnaryOp::Sqrt),
            _ => None,
        };
        if let Some(op) = func {
            self.expect(b'(')?;
            let arg = self.sum()?;
            self.expect(b')')?;
            return Ok(Expr::Unary(op, Box::new(arg)));
        }
        if let Some(value) = self.constants.get(name) {
            return Ok(Expr::Named(name.to_string(), *value));
        }
        if name == "pi" {
            return Ok(Expr::Named("pi".into(), std::f64::consts::PI));
        }
        if let Some(index) = name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
            if index >= 1 && !name[1..].starts_with('0') {
                return Ok(Expr::Var(index));
            }
        }
        Err(SyntaxError {
            offset: start,
            expected: vec!["variable x1..xn".into(), "bound constant".into(), "function".into()],
        })
    }
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
        Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
        Expr::Unary(UnaryOp::Neg, _) => 3,
        Expr::Binary(BinaryOp::Pow, ..) => 4,
        Expr::Const(c) if *c < 0.0 || c.is_sign_negative() => 3,
        _ => 5,
    }
}

struct Wrapped<'a>(&'a Expr, bool);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Renders with the fewest parentheses that parse back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Named(name, _) => write!(f, "{name}"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Unary(UnaryOp::Neg, a) => write!(f, "-{}", Wrapped(a, precedence(a) < 3)),
            Expr::Unary(op, a) => {
                let name = match op {
                    UnaryOp::Sin => "sin",
                    UnaryOp::Cos => "cos",
                    _ => "sqrt",
                };
                write!(f, "{name}({a})")
            }
            Expr::Binary(BinaryOp::Pow, a, b) => {
                write!(f, "{}^{}", Wrapped(a, precedence(a) <= 4), Wrapped(b, precedence(b) < 3))
            }
            Expr::Binary(op, a, b) => {
                let (p, sym) = match op {
                    BinaryOp::Add => (1, "+"),
                    BinaryOp::Sub => (1, "-"),
                    BinaryOp::Mul => (2, "*"),
                    _ => (2, "/"),
                };
                write!(f, "{}{sym}{}", Wrapped(a, precedence(a) < p), Wrapped(b, precedence(b) <= p))
            }
        }
    }
}

impl Expr {
    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Const(c) | Expr::Named(_, c) => *c,
            Expr::Var(i) => *x.get(i - 1).ok_or(EvalError::UnboundVariable {
                index: *i,
                dimension: x.len(),
            })?,
            Expr::Unary(op, a) => {
                let v = a.eval(x)?;
                match op {
                    UnaryOp::Neg => -v,
                    UnaryOp::Sin => v.sin(),
                    UnaryOp::Cos => v.cos(),
                    UnaryOp::Sqrt if v < 0.0 => return Err(EvalError::Domain(format!("sqrt({v})"))),
                    UnaryOp::Sqrt => v.sqrt(),
                }
            }
            Expr::Binary(op, a, b) => {
                let (u, v) = (a.eval(x)?, b.eval(x)?);
                match op {
                    BinaryOp::Add => u + v,
                    BinaryOp::Sub => u - v,
                    BinaryOp::Mul => u * v,
                    BinaryOp::Div if v.abs() <= DIVISION_GUARD => return Err(EvalError::DivisionByZero(v)),
                    BinaryOp::Div => u / v,
                    BinaryOp::Pow => {
                        let r = u.powf(v);
                        if r.is_nan() && !u.is_nan() && !v.is_nan() {
                            return Err(EvalError::Domain(format!("{u}^{v}")));
                        }
                        r
                    }
                }
            }
        })
    }

    /// Value, or NaN where evaluation fails.
    pub fn eval_or_nan(&self, x: &[f64]) -> f64 {
        self.eval(x).unwrap_or(f64::NAN)
    }

    /// Largest variable index used (0 when constant).
    pub fn max_variable(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Named(..) => 0,
            Expr::Var(i) => *i,
            Expr::Unary(_, a) => a.max_variable(),
            Expr::Binary(_, a, b) => a.max_variable().max(b.max_variable()),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.max_variable() == 0
    }

    /// Symbolic partial derivative with respect to `x<var>`.
    pub fn derivative(&self, var: usize) -> Result<Expr, DerivativeError> {
        use BinaryOp::*;
        Ok(match self {
            Expr::Const(_) | Expr::Named(..) => Expr::Const(0.0),
            Expr::Var(i) => Expr::Const(if *i == var { 1.0 } else { 0.0 }),
            Expr::Unary(op, a) => {
                let da = a.derivative(var)?;
                let a = (**a).clone();
                match op {
                    UnaryOp::Neg => neg(da),
                    UnaryOp::Sin => mul(Expr::Unary(UnaryOp::Cos, Box::new(a)), da),
                    UnaryOp::Cos => neg(mul(Expr::Unary(UnaryOp::Sin, Box::new(a)), da)),
                    UnaryOp::Sqrt => div(da, mul(Expr::Const(2.0), Expr::Unary(UnaryOp::Sqrt, Box::new(a)))),
                }
            }
            Expr::Binary(op, a, b) => {
                let (da, db) = (a.derivative(var)?, b.derivative(var)?);
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    Add => add(da, db),
                    Sub => sub(da, db),
                    Mul => add(mul(da, b), mul(a, db)),
                    Div => div(sub(mul(da, b.clone()), mul(a, db)), mul(b.clone(), b)),
                    Pow => {
                        if !b.is_constant() {
                            return Err(DerivativeError(self.to_string()));
                        }
                        let lowered = binary(Pow, a, sub(b.clone(), Expr::Const(1.0)));
                        mul(mul(b, lowered), da)
                    }
                }
            }
        })
    }
}

fn is_const(e: &Expr, value: f64) -> bool {
    matches!(e, Expr::Const(c) if *c == value)
}

fn binary(op: BinaryOp, a: Expr, b: Expr) -> Expr {
    Expr::Binary(op, Box::new(a), Box::new(b))
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(0.0) => Expr::Const(0.0),
        a => Expr::Unary(UnaryOp::Neg, Box::new(a)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (is_const(&a, 0.0), is_const(&b, 0.0)) {
        (true, _) => b,
        (_, true) => a,
        _ => binary(BinaryOp::Add, a, b),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (is_const(&a, 0.0), is_const(&b, 0.0)) {
        (_, true) => a,
        (true, _) => neg(b),
        _ => binary(BinaryOp::Sub, a, b),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) || is_const(&b, 0.0) {
        Expr::Const(0.0)
    } else if is_const(&a, 1.0) {
        b
    } else if is_const(&b, 1.0) {
        a
    } else {
        binary(BinaryOp::Mul, a, b)
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) {
        Expr::Const(0.0)
    } else if is_const(&b, 1.0) {
        a
    } else {
        binary(BinaryOp::Div, a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(i: usize) -> Box<Expr> {
        Box::new(Expr::Var(i))
    }

    #[test]
    fn parses_function_of_sum() {
        let e = parse_expression("sin(x1+x3)").unwrap();
        assert_eq!(
            e,
            Expr::Unary(UnaryOp::Sin, Box::new(Expr::Binary(BinaryOp::Add, var(1), var(3))))
        );
    }

    #[test]
    fn named_constant_and_power() {
        let constants = BTreeMap::from([("t".to_string(), 0.5)]);
        let e = parse_with_constants("1+t^2", &constants).unwrap();
        let t = Box::new(Expr::Named("t".into(), 0.5));
        assert_eq!(
            e,
            Expr::Binary(
                BinaryOp::Add,
                Box::new(Expr::Const(1.0)),
                Box::new(Expr::Binary(BinaryOp::Pow, t, Box::new(Expr::Const(2.0))))
            )
        );
        assert_eq!(e.eval(&[]).unwrap(), 1.25);
    }

    #[test]
    fn syntax_error_offset() {
        let err = parse_expression("x1+*x2").unwrap_err();
        assert_eq!(err.offset, 3);
        assert!(parse_expression("x1 x2").is_err());
        assert!(parse_expression("y1").is_err());
        assert!(parse_expression("x0").is_err());
        assert!(parse_expression("sin x1").is_err());
        assert_eq!(parse_expression("(x1").unwrap_err().offset, 3);
    }

    #[test]
    fn precedence_and_associativity() {
        let x = [2.0, 3.0];
        let ev = |s: &str| parse_expression(s).unwrap().eval(&x).unwrap();
        assert_eq!(ev("-x1^2"), -4.0);
        assert_eq!(ev("2^3^2"), 512.0);
        assert_eq!(ev("x2-x1-1"), 0.0);
        assert_eq!(ev("x2/x1/2"), 0.75);
        assert_eq!(ev("2^-1"), 0.5);
        assert_eq!(ev("1 + 2 * 3"), 7.0);
        assert_eq!(ev("1.5e1 + .5"), 15.5);
    }

    #[test]
    fn division_guard() {
        let e = parse_expression("1/(x1-x1)").unwrap();
        assert!(matches!(e.eval(&[1.0]), Err(EvalError::DivisionByZero(_))));
        assert!(e.eval_or_nan(&[1.0]).is_nan());
        assert!(matches!(
            parse_expression("x3").unwrap().eval(&[1.0]),
            Err(EvalError::UnboundVariable { index: 3, .. })
        ));
    }

    #[test]
    fn render_round_trips() {
        for s in ["-x1^2", "(-x1)^2", "2^3^2", "(2^3)^2", "x1-(x2-x3)", "x1/(x2*x3)", "-(x1+x2)", "--x1", "sqrt(x1)*cos(pi*x2)"] {
            let e = parse_expression(s).unwrap();
            assert_eq!(parse_expression(&e.to_string()).unwrap(), e, "{s} -> {e}");
        }
    }

    #[test]
    fn symbolic_derivatives_match_differences() {
        let x = [0.3, -0.7, 0.4];
        for s in ["sin(x1+x3)", "x1*x2^2 - cos(x3)/x2", "sqrt(x1^2+x2^2+x3^2)", "-x2*x1^3"] {
            let e = parse_expression(s).unwrap();
            for v in 1..=3 {
                let d = e.derivative(v).unwrap().eval(&x).unwrap();
                let h = 1e-6;
                let mut xp = x;
                let mut xm = x;
                xp[v - 1] += h;
                xm[v - 1] -= h;
                let fd = (e.eval(&xp).unwrap() - e.eval(&xm).unwrap()) / (2.0 * h);
                assert!((d - fd).abs() < 1e-8, "{s} d/dx{v}: {d} vs {fd}");
            }
        }
        assert!(parse_expression("x1^x2").unwrap().derivative(1).is_err());
    }
}
