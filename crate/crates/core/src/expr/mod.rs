//! Closed-form scalar expressions of the coordinates, with exact first and
//! second derivatives via second-order forward jets.
//!
//! Grammar (also documented in the README):
//!
//! ```text
//! expr   = term { ("+" | "-") term } ;
//! term   = unary { ("*" | "/") unary } ;
//! unary  = "-" unary | power ;
//! power  = atom [ "^" unary ] ;              (right associative)
//! atom   = number | ident | "(" expr ")" | func "(" expr ")" ;
//! func   = "sin" | "cos" | "tan" | "exp" | "log" | "sqrt"
//!        | "sinh" | "cosh" | "tanh" ;
//! ```
//!
//! Identifiers `x0 .. x(n-1)` are coordinate variables; any other identifier
//! must be a declared parameter, which is substituted by its numeric value at
//! parse time.

mod jet;
mod parse;

pub use jet::Jet2;
pub use parse::{parse, parse_with_params};

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }
}

/// Abstract syntax tree of a scalar expression in the coordinates.
///
/// Immutable after construction; evaluation is pure.
#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Const(f64),
    Var(usize),
    Neg(Box<Expression>),
    Binary(BinOp, Box<Expression>, Box<Expression>),
    Apply(Func, Box<Expression>),
}

impl Expression {
    pub fn constant(v: f64) -> Expression {
        Expression::Const(v)
    }

    pub fn var(index: usize) -> Expression {
        Expression::Var(index)
    }

    pub fn pow(self, rhs: Expression) -> Expression {
        Expression::Binary(BinOp::Pow, Box::new(self), Box::new(rhs))
    }

    pub fn apply(func: Func, arg: Expression) -> Expression {
        Expression::Apply(func, Box::new(arg))
    }

    /// Scale by a constant; `1.0` is a no-op.
    pub fn scaled(self, factor: f64) -> Expression {
        if factor == 1.0 {
            self
        } else {
            Expression::constant(factor) * self
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expression::Const(_) => None,
            Expression::Var(i) => Some(*i),
            Expression::Neg(e) => e.max_var(),
            Expression::Apply(_, e) => e.max_var(),
            Expression::Binary(_, a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (Some(x), None) | (None, Some(x)) => Some(x),
                (None, None) => None,
            },
        }
    }

    pub fn check_dimension(&self, dim: usize) -> Result<()> {
        if let Some(i) = self.max_var() {
            if i >= dim {
                return Err(Error::VarOutOfRange { index: i, dim });
            }
        }
        Ok(())
    }

    /// Evaluate the value only (no derivatives).
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            Expression::Const(c) => *c,
            Expression::Var(i) => {
                if *i >= x.len() {
                    return Err(Error::VarOutOfRange {
                        index: *i,
                        dim: x.len(),
                    });
                }
                x[*i]
            }
            Expression::Neg(e) => -e.eval(x)?,
            Expression::Apply(f, e) => jet::apply_func_value(*f, e.eval(x)?)?,
            Expression::Binary(op, a, b) => {
                let av = a.eval(x)?;
                match op {
                    BinOp::Add => av + b.eval(x)?,
                    BinOp::Sub => av - b.eval(x)?,
                    BinOp::Mul => av * b.eval(x)?,
                    BinOp::Div => {
                        let bv = b.eval(x)?;
                        if bv == 0.0 {
                            return Err(Error::DivisionByZero);
                        }
                        av / bv
                    }
                    BinOp::Pow => {
                        if let Some(k) = int_exponent(b) {
                            jet::powi_value(av, k)?
                        } else {
                            let bv = b.eval(x)?;
                            if av <= 0.0 {
                                return Err(Error::MathDomain(format!(
                                    "power base {av} must be positive for non-integer exponent"
                                )));
                            }
                            av.powf(bv)
                        }
                    }
                }
            }
        })
    }

    /// Evaluate value, gradient and Hessian.
    pub fn eval_jet2(&self, x: &[f64]) -> Result<Jet2> {
        jet::eval_jet2(self, x)
    }
}

/// Integer exponent if the exponent node is a literal with integral value.
pub(crate) fn int_exponent(e: &Expression) -> Option<i32> {
    if let Expression::Const(c) = e {
        if c.fract() == 0.0 && c.abs() <= i32::MAX as f64 {
            return Some(*c as i32);
        }
    }
    None
}

// Precedence levels used for printing: higher binds tighter.
fn precedence(e: &Expression) -> u8 {
    match e {
        Expression::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => 1,
        Expression::Const(_) | Expression::Var(_) | Expression::Apply(..) => 4,
        Expression::Neg(_) => 1,
        Expression::Binary(BinOp::Add | BinOp::Sub, ..) => 0,
        Expression::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        Expression::Binary(BinOp::Pow, ..) => 3,
    }
}

fn fmt_child(f: &mut fmt::Formatter<'_>, e: &Expression, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expression {
    /// Prints a form that re-parses to a structurally identical tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Const(c) => write!(f, "{c:?}"),
            Expression::Var(i) => write!(f, "x{i}"),
            Expression::Neg(e) => {
                // unary minus binds tighter than * and /, so anything below
                // power level needs parentheses
                write!(f, "-")?;
                fmt_child(f, e, 3)
            }
            Expression::Apply(func, e) => write!(f, "{}({e})", func.name()),
            Expression::Binary(op, a, b) => match op {
                BinOp::Add => {
                    fmt_child(f, a, 0)?;
                    write!(f, " + ")?;
                    fmt_child(f, b, 1)
                }
                BinOp::Sub => {
                    fmt_child(f, a, 0)?;
                    write!(f, " - ")?;
                    fmt_child(f, b, 1)
                }
                BinOp::Mul => {
                    fmt_child(f, a, 2)?;
                    write!(f, "*")?;
                    fmt_child(f, b, 3)
                }
                BinOp::Div => {
                    fmt_child(f, a, 2)?;
                    write!(f, "/")?;
                    fmt_child(f, b, 3)
                }
                BinOp::Pow => {
                    fmt_child(f, a, 4)?;
                    write!(f, "^")?;
                    // the exponent slot parses as a unary: negations, powers
                    // and atoms are consumed whole, sums and products are not
                    let p = precedence(b);
                    if p == 0 || p == 2 {
                        write!(f, "({b})")
                    } else {
                        write!(f, "{b}")
                    }
                }
            },
        }
    }
}

impl std::ops::Add for Expression {
    type Output = Expression;
    fn add(self, rhs: Expression) -> Expression {
        Expression::Binary(BinOp::Add, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for Expression {
    type Output = Expression;
    fn sub(self, rhs: Expression) -> Expression {
        Expression::Binary(BinOp::Sub, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for Expression {
    type Output = Expression;
    fn mul(self, rhs: Expression) -> Expression {
        Expression::Binary(BinOp::Mul, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Div for Expression {
    type Output = Expression;
    fn div(self, rhs: Expression) -> Expression {
        Expression::Binary(BinOp::Div, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Neg for Expression {
    type Output = Expression;
    /// Literals fold to negative constants, matching what the parser builds.
    fn neg(self) -> Expression {
        match self {
            Expression::Const(c) => Expression::Const(-c),
            other => Expression::Neg(Box::new(other)),
        }
    }
}

/// Parameter table used when parsing catalog and config expressions.
pub type Params = BTreeMap<String, f64>;
