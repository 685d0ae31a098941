//! Second-order forward jets: value, gradient and Hessian propagated
//! together through the expression tree. Derivatives are exact to roundoff.

use super::{int_exponent, BinOp, Expression, Func};
use crate::error::{Error, Result};

/// Value, gradient and Hessian of a scalar function at a point.
///
/// The Hessian is stored densely but only the upper triangle is ever
/// computed; the mirror entry is assigned from the same f64, so
/// `hess(b, c) == hess(c, b)` holds bitwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

impl Jet2 {
    pub fn constant(n: usize, value: f64) -> Jet2 {
        Jet2 {
            value,
            grad: vec![0.0; n],
            hess: vec![0.0; n * n],
        }
    }

    /// Seed jet for coordinate `index`.
    pub fn variable(n: usize, index: usize, value: f64) -> Jet2 {
        let mut j = Jet2::constant(n, value);
        j.grad[index] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn grad(&self, b: usize) -> f64 {
        self.grad[b]
    }

    pub fn grad_slice(&self) -> &[f64] {
        &self.grad
    }

    pub fn hess(&self, b: usize, c: usize) -> f64 {
        self.hess[b * self.dim() + c]
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|v| v.is_finite())
            && self.hess.iter().all(|v| v.is_finite())
    }

    fn set_sym(&mut self, b: usize, c: usize, v: f64) {
        let n = self.dim();
        self.hess[b * n + c] = v;
        self.hess[c * n + b] = v;
    }

    fn binary(a: &Jet2, b: &Jet2, mut f: impl FnMut(&Jet2, &Jet2, usize, usize) -> f64) -> Jet2 {
        let n = a.dim();
        let mut out = Jet2::constant(n, 0.0);
        for i in 0..n {
            for j in i..n {
                out.set_sym(i, j, f(a, b, i, j));
            }
        }
        out
    }

    pub fn add(&self, rhs: &Jet2) -> Jet2 {
        let n = self.dim();
        let mut out = Jet2::binary(self, rhs, |a, b, i, j| a.hess(i, j) + b.hess(i, j));
        out.value = self.value + rhs.value;
        for i in 0..n {
            out.grad[i] = self.grad[i] + rhs.grad[i];
        }
        out
    }

    pub fn sub(&self, rhs: &Jet2) -> Jet2 {
        let n = self.dim();
        let mut out = Jet2::binary(self, rhs, |a, b, i, j| a.hess(i, j) - b.hess(i, j));
        out.value = self.value - rhs.value;
        for i in 0..n {
            out.grad[i] = self.grad[i] - rhs.grad[i];
        }
        out
    }

    pub fn mul(&self, rhs: &Jet2) -> Jet2 {
        let n = self.dim();
        let mut out = Jet2::binary(self, rhs, |a, b, i, j| {
            a.hess(i, j) * b.value
                + a.grad[i] * b.grad[j]
                + a.grad[j] * b.grad[i]
                + a.value * b.hess(i, j)
        });
        out.value = self.value * rhs.value;
        for i in 0..n {
            out.grad[i] = self.grad[i] * rhs.value + self.value * rhs.grad[i];
        }
        out
    }

    pub fn div(&self, rhs: &Jet2) -> Result<Jet2> {
        if rhs.value == 0.0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.dim();
        let mut out = Jet2::constant(n, self.value / rhs.value);
        for i in 0..n {
            out.grad[i] = (self.grad[i] - out.value * rhs.grad[i]) / rhs.value;
        }
        for i in 0..n {
            for j in i..n {
                let v = (self.hess(i, j)
                    - out.grad[i] * rhs.grad[j]
                    - out.grad[j] * rhs.grad[i]
                    - out.value * rhs.hess(i, j))
                    / rhs.value;
                out.set_sym(i, j, v);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Jet2 {
        Jet2 {
            value: -self.value,
            grad: self.grad.iter().map(|v| -v).collect(),
            hess: self.hess.iter().map(|v| -v).collect(),
        }
    }

    /// Chain rule for a scalar function with first and second derivatives
    /// `d1 = f'(value)` and `d2 = f''(value)`.
    pub fn chain(&self, value: f64, d1: f64, d2: f64) -> Jet2 {
        let n = self.dim();
        let mut out = Jet2::constant(n, value);
        for i in 0..n {
            out.grad[i] = d1 * self.grad[i];
        }
        for i in 0..n {
            for j in i..n {
                out.set_sym(i, j, d2 * self.grad[i] * self.grad[j] + d1 * self.hess(i, j));
            }
        }
        out
    }

    /// Integer power by repeated multiplication; exact for any base.
    pub fn powi(&self, k: i32) -> Result<Jet2> {
        let n = self.dim();
        if k == 0 {
            return Ok(Jet2::constant(n, 1.0));
        }
        if k < 0 {
            let positive = self.powi(-k)?;
            return Jet2::constant(n, 1.0).div(&positive);
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.mul(self);
        }
        Ok(acc)
    }
}

pub(crate) fn apply_func_value(f: Func, u: f64) -> Result<f64> {
    Ok(match f {
        Func::Sin => u.sin(),
        Func::Cos => u.cos(),
        Func::Tan => u.tan(),
        Func::Exp => u.exp(),
        Func::Log => {
            if u <= 0.0 {
                return Err(Error::MathDomain(format!("log of non-positive value {u}")));
            }
            u.ln()
        }
        Func::Sqrt => {
            if u < 0.0 {
                return Err(Error::MathDomain(format!("sqrt of negative value {u}")));
            }
            u.sqrt()
        }
        Func::Sinh => u.sinh(),
        Func::Cosh => u.cosh(),
        Func::Tanh => u.tanh(),
    })
}

fn apply_func(f: Func, arg: &Jet2) -> Result<Jet2> {
    let u = arg.value;
    let (v, d1, d2) = match f {
        Func::Sin => (u.sin(), u.cos(), -u.sin()),
        Func::Cos => (u.cos(), -u.sin(), -u.cos()),
        Func::Tan => {
            let t = u.tan();
            let sec2 = 1.0 + t * t;
            (t, sec2, 2.0 * t * sec2)
        }
        Func::Exp => {
            let e = u.exp();
            (e, e, e)
        }
        Func::Log => {
            if u <= 0.0 {
                return Err(Error::MathDomain(format!("log of non-positive value {u}")));
            }
            (u.ln(), 1.0 / u, -1.0 / (u * u))
        }
        Func::Sqrt => {
            if u < 0.0 {
                return Err(Error::MathDomain(format!("sqrt of negative value {u}")));
            }
            if u == 0.0 {
                return Err(Error::MathDomain(
                    "sqrt derivative undefined at zero".into(),
                ));
            }
            let s = u.sqrt();
            (s, 0.5 / s, -0.25 / (s * u))
        }
        Func::Sinh => (u.sinh(), u.cosh(), u.sinh()),
        Func::Cosh => (u.cosh(), u.sinh(), u.cosh()),
        Func::Tanh => {
            let t = u.tanh();
            let sech2 = 1.0 - t * t;
            (t, sech2, -2.0 * t * sech2)
        }
    };
    Ok(arg.chain(v, d1, d2))
}

pub(crate) fn powi_value(base: f64, k: i32) -> Result<f64> {
    if k < 0 && base == 0.0 {
        return Err(Error::DivisionByZero);
    }
    Ok(base.powi(k))
}

pub(crate) fn eval_jet2(e: &Expression, x: &[f64]) -> Result<Jet2> {
    let n = x.len();
    Ok(match e {
        Expression::Const(c) => Jet2::constant(n, *c),
        Expression::Var(i) => {
            if *i >= n {
                return Err(Error::VarOutOfRange { index: *i, dim: n });
            }
            Jet2::variable(n, *i, x[*i])
        }
        Expression::Neg(inner) => eval_jet2(inner, x)?.neg(),
        Expression::Apply(f, inner) => apply_func(*f, &eval_jet2(inner, x)?)?,
        Expression::Binary(op, a, b) => {
            let ja = eval_jet2(a, x)?;
            match op {
                BinOp::Add => ja.add(&eval_jet2(b, x)?),
                BinOp::Sub => ja.sub(&eval_jet2(b, x)?),
                BinOp::Mul => ja.mul(&eval_jet2(b, x)?),
                BinOp::Div => ja.div(&eval_jet2(b, x)?)?,
                BinOp::Pow => {
                    if let Some(k) = int_exponent(b) {
                        ja.powi(k)?
                    } else {
                        // a^b = exp(b log a), requires a > 0
                        let jb = eval_jet2(b, x)?;
                        if ja.value <= 0.0 {
                            return Err(Error::MathDomain(format!(
                                "power base {} must be positive for non-integer exponent",
                                ja.value
                            )));
                        }
                        apply_func(Func::Exp, &jb.mul(&apply_func(Func::Log, &ja)?))?
                    }
                }
            }
        }
    })
}
