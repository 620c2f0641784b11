//! Scalar expressions over `s` real variables.
//!
//! Problem functions are written in a small ASCII language (see [`parser`])
//! and stored as immutable trees. Evaluation is plain IEEE double arithmetic,
//! except that domain violations (log of a non-positive number, division by
//! zero, and so on) are reported as errors instead of producing NaN.

mod parser;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use parser::ParseError;

/// One-argument operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Abs,
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
}

/// Two-argument operations. `Min` and `Max` are written as calls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Min,
    Max,
}

impl UnaryOp {
    pub(crate) fn call_name(self) -> Option<&'static str> {
        match self {
            UnaryOp::Neg => None,
            UnaryOp::Abs => Some("abs"),
            UnaryOp::Sqrt => Some("sqrt"),
            UnaryOp::Exp => Some("exp"),
            UnaryOp::Log => Some("log"),
            UnaryOp::Sin => Some("sin"),
            UnaryOp::Cos => Some("cos"),
        }
    }
}

/// Expression tree node. Variables are referenced by index.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Unary(UnaryOp, Box<Node>),
    Binary(BinaryOp, Box<Node>, Box<Node>),
}

impl Node {
    pub fn unary(op: UnaryOp, arg: Node) -> Node {
        Node::Unary(op, Box::new(arg))
    }

    pub fn binary(op: BinaryOp, lhs: Node, rhs: Node) -> Node {
        Node::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Largest variable index referenced plus one (0 for constant trees).
    pub fn min_arity(&self) -> usize {
        match self {
            Node::Const(_) => 0,
            Node::Var(i) => i + 1,
            Node::Unary(_, a) => a.min_arity(),
            Node::Binary(_, a, b) => a.min_arity().max(b.min_arity()),
        }
    }

    /// Renders the subtree with the given variable names.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        write_node(self, names, 0, &mut out);
        out
    }

    fn eval_inner(&self, x: &[f64], names: &[String]) -> Result<f64, EvalError> {
        let value = match self {
            Node::Const(c) => *c,
            Node::Var(i) => x[*i],
            Node::Unary(op, a) => {
                let a = a.eval_inner(x, names)?;
                let r = match op {
                    UnaryOp::Neg => Ok(-a),
                    UnaryOp::Abs => Ok(a.abs()),
                    UnaryOp::Sqrt if a < 0.0 => Err("square root of a negative number"),
                    UnaryOp::Sqrt => Ok(a.sqrt()),
                    UnaryOp::Exp => Ok(a.exp()),
                    UnaryOp::Log if a <= 0.0 => Err("logarithm of a non-positive number"),
                    UnaryOp::Log => Ok(a.ln()),
                    UnaryOp::Sin => Ok(a.sin()),
                    UnaryOp::Cos => Ok(a.cos()),
                };
                r.map_err(|reason| EvalError::domain(self, names, reason))?
            }
            Node::Binary(op, a, b) => {
                let a = a.eval_inner(x, names)?;
                let b = b.eval_inner(x, names)?;
                let r = match op {
                    BinaryOp::Add => Ok(a + b),
                    BinaryOp::Sub => Ok(a - b),
                    BinaryOp::Mul => Ok(a * b),
                    BinaryOp::Div if b == 0.0 => Err("division by zero"),
                    BinaryOp::Div => Ok(a / b),
                    BinaryOp::Pow => real_pow(a, b),
                    BinaryOp::Min => Ok(a.min(b)),
                    BinaryOp::Max => Ok(a.max(b)),
                };
                r.map_err(|reason| EvalError::domain(self, names, reason))?
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(EvalError::domain(self, names, "non-finite result"))
        }
    }
}

/// Real power. Integer exponents work for bases of any sign; other exponents
/// need a positive base.
pub(crate) fn real_pow(base: f64, exp: f64) -> Result<f64, &'static str> {
    if is_integer(exp) {
        if base == 0.0 && exp < 0.0 {
            return Err("zero raised to a negative power");
        }
        if exp.abs() <= i32::MAX as f64 {
            Ok(base.powi(exp as i32))
        } else {
            let magnitude = base.abs().powf(exp);
            let odd = (exp / 2.0).fract() != 0.0;
            Ok(if base < 0.0 && odd { -magnitude } else { magnitude })
        }
    } else if base > 0.0 {
        Ok(base.powf(exp))
    } else {
        Err("non-integer power of a non-positive base")
    }
}

pub(crate) fn is_integer(v: f64) -> bool {
    v.is_finite() && v.fract() == 0.0
}

/// Evaluation failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("point has dimension {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("domain violation in `{node}`: {reason}")]
    Domain { node: String, reason: &'static str },
    #[error("not differentiable here: `{node}` sits at its kink")]
    NonDifferentiable { node: String },
}

impl EvalError {
    pub(crate) fn domain(node: &Node, names: &[String], reason: &'static str) -> Self {
        EvalError::Domain {
            node: node.render(names),
            reason,
        }
    }
}

/// A parsed scalar function of `vars.len()` variables.
#[derive(Debug, Clone)]
pub struct Expr {
    root: Node,
    vars: Arc<[String]>,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.vars == other.vars
    }
}

impl Expr {
    /// Parses `text` over the named variables.
    pub fn parse<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<Expr, ParseError> {
        let names: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        parser::validate_names(&names)?;
        let root = parser::parse(text, &names)?;
        Ok(Expr {
            root,
            vars: names.into(),
        })
    }

    /// Wraps an existing tree. Fails if the tree references a variable
    /// outside `vars`.
    pub fn from_node<S: AsRef<str>>(root: Node, vars: &[S]) -> Result<Expr, ParseError> {
        let names: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        parser::validate_names(&names)?;
        if root.min_arity() > names.len() {
            return Err(ParseError::UnknownIdent {
                offset: 0,
                name: format!("variable #{}", root.min_arity()),
            });
        }
        Ok(Expr {
            root,
            vars: names.into(),
        })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Number of variables `s`.
    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        self.check_dim(x)?;
        self.root.eval_inner(x, &self.vars)
    }

    pub(crate) fn check_dim(&self, x: &[f64]) -> Result<(), EvalError> {
        if x.len() != self.dim() {
            return Err(EvalError::Dimension {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.root.render(&self.vars))
    }
}

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Const(c) if *c < 0.0 || c.is_sign_negative() => PREC_NEG,
        Node::Const(_) | Node::Var(_) => PREC_ATOM,
        Node::Unary(UnaryOp::Neg, _) => PREC_NEG,
        Node::Unary(_, _) => PREC_ATOM,
        Node::Binary(op, _, _) => match op {
            BinaryOp::Add | BinaryOp::Sub => PREC_ADD,
            BinaryOp::Mul | BinaryOp::Div => PREC_MUL,
            BinaryOp::Pow => PREC_POW,
            BinaryOp::Min | BinaryOp::Max => PREC_ATOM,
        },
    }
}

fn write_number(v: f64, out: &mut String) {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        out.push_str(&format!("{}", v as i64));
    } else {
        out.push_str(&format!("{v:?}"));
    }
}

fn write_node(node: &Node, names: &[String], min_prec: u8, out: &mut String) {
    let wrap = precedence(node) < min_prec;
    if wrap {
        out.push('(');
    }
    match node {
        Node::Const(c) => write_number(*c, out),
        Node::Var(i) => match names.get(*i) {
            Some(name) => out.push_str(name),
            None => out.push_str(&format!("x{}", i + 1)),
        },
        Node::Unary(UnaryOp::Neg, a) => {
            out.push('-');
            write_node(a, names, PREC_POW, out);
        }
        Node::Unary(op, a) => {
            out.push_str(op.call_name().unwrap_or("?"));
            out.push('(');
            write_node(a, names, 0, out);
            out.push(')');
        }
        Node::Binary(op @ (BinaryOp::Min | BinaryOp::Max), a, b) => {
            out.push_str(if *op == BinaryOp::Min { "min(" } else { "max(" });
            write_node(a, names, 0, out);
            out.push_str(", ");
            write_node(b, names, 0, out);
            out.push(')');
        }
        Node::Binary(op, a, b) => {
            let (sym, lp, rp) = match op {
                BinaryOp::Add => (" + ", PREC_ADD, PREC_MUL),
                BinaryOp::Sub => (" - ", PREC_ADD, PREC_MUL),
                BinaryOp::Mul => (" * ", PREC_MUL, PREC_NEG),
                BinaryOp::Div => (" / ", PREC_MUL, PREC_NEG),
                _ => ("^", PREC_ATOM, PREC_NEG),
            };
            write_node(a, names, lp, out);
            out.push_str(sym);
            write_node(b, names, rp, out);
        }
    }
    if wrap {
        out.push(')');
    }
}
