use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use super::jet::{jet_compose, Jet};
use crate::error::{Error, Result};

type DerivativeFn = dyn Fn(f64, usize) -> Result<Vec<f64>> + Send + Sync;

/// A user-supplied scalar function usable as a leaf of an [`Expr`].
///
/// The evaluator returns `(g(x), g'(x), ..., g^(order)(x))`.
#[derive(Clone)]
pub struct NamedFn {
    name: String,
    eval: Arc<DerivativeFn>,
}

impl NamedFn {
    pub fn new<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64, usize) -> Result<Vec<f64>> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn derivatives(&self, x: f64, order: usize) -> Result<Vec<f64>> {
        let d = (self.eval)(x, order)?;
        if d.len() < order + 1 {
            return Err(Error::InsufficientOrder {
                have: d.len().saturating_sub(1),
                need: order,
            });
        }
        Ok(d)
    }
}

impl fmt::Debug for NamedFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NamedFn({})", self.name)
    }
}

/// Closed-form scalar expression in one variable `z`.
#[derive(Clone, Debug)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Power with a real exponent.
    Pow(Box<Expr>, f64),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    /// Odd-integer root, real on negative arguments.
    Root(Box<Expr>, u32),
    Call(NamedFn, Box<Expr>),
}

impl Expr {
    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    pub fn ln(self) -> Expr {
        Expr::Ln(Box::new(self))
    }

    pub fn sin(self) -> Expr {
        Expr::Sin(Box::new(self))
    }

    pub fn cos(self) -> Expr {
        Expr::Cos(Box::new(self))
    }

    pub fn powf(self, r: f64) -> Expr {
        Expr::Pow(Box::new(self), r)
    }

    pub fn powi(self, n: i32) -> Expr {
        Expr::Pow(Box::new(self), n as f64)
    }

    pub fn sqrt(self) -> Expr {
        self.powf(0.5)
    }

    pub fn root(self, n: u32) -> Expr {
        Expr::Root(Box::new(self), n)
    }

    pub fn call(f: NamedFn, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// Replaces every occurrence of the variable by `inner`, i.e. builds `self ∘ inner`.
    pub fn substitute(&self, inner: &Expr) -> Expr {
        let sub = |e: &Expr| Box::new(e.substitute(inner));
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var => inner.clone(),
            Expr::Neg(a) => Expr::Neg(sub(a)),
            Expr::Add(a, b) => Expr::Add(sub(a), sub(b)),
            Expr::Sub(a, b) => Expr::Sub(sub(a), sub(b)),
            Expr::Mul(a, b) => Expr::Mul(sub(a), sub(b)),
            Expr::Div(a, b) => Expr::Div(sub(a), sub(b)),
            Expr::Pow(a, r) => Expr::Pow(sub(a), *r),
            Expr::Exp(a) => Expr::Exp(sub(a)),
            Expr::Ln(a) => Expr::Ln(sub(a)),
            Expr::Sin(a) => Expr::Sin(sub(a)),
            Expr::Cos(a) => Expr::Cos(sub(a)),
            Expr::Root(a, n) => Expr::Root(sub(a), *n),
            Expr::Call(f, a) => Expr::Call(f.clone(), sub(a)),
        }
    }

    pub fn depends_on_var(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var => true,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.depends_on_var() || b.depends_on_var()
            }
            Expr::Neg(a)
            | Expr::Pow(a, _)
            | Expr::Exp(a)
            | Expr::Ln(a)
            | Expr::Sin(a)
            | Expr::Cos(a)
            | Expr::Root(a, _)
            | Expr::Call(_, a) => a.depends_on_var(),
        }
    }

    /// Pointwise value, with the same domain guards as [`Expr::jet`].
    pub fn eval(&self, z: f64) -> Result<f64> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var => z,
            Expr::Neg(a) => -a.eval(z)?,
            Expr::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Expr::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            Expr::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Expr::Div(a, b) => {
                let den = b.eval(z)?;
                if den == 0.0 {
                    return Err(Error::domain("division by zero", z));
                }
                a.eval(z)? / den
            }
            Expr::Pow(a, r) => {
                let base = a.eval(z)?;
                if r.fract() == 0.0 && r.abs() < i32::MAX as f64 {
                    if base == 0.0 && *r < 0.0 {
                        return Err(Error::domain("negative power of zero", z));
                    }
                    base.powi(*r as i32)
                } else {
                    if base < 0.0 {
                        return Err(Error::domain(
                            format!("fractional power {r} of negative base {base}"),
                            z,
                        ));
                    }
                    base.powf(*r)
                }
            }
            Expr::Exp(a) => a.eval(z)?.exp(),
            Expr::Ln(a) => {
                let x = a.eval(z)?;
                if x <= 0.0 {
                    return Err(Error::domain(format!("logarithm of non-positive value {x}"), z));
                }
                x.ln()
            }
            Expr::Sin(a) => a.eval(z)?.sin(),
            Expr::Cos(a) => a.eval(z)?.cos(),
            Expr::Root(a, n) => {
                if n % 2 == 0 {
                    return Err(Error::InvalidParameter(format!("root index {n} must be odd")));
                }
                let x = a.eval(z)?;
                x.signum() * x.abs().powf(1.0 / *n as f64)
            }
            Expr::Call(f, a) => f.derivatives(a.eval(z)?, 0)?[0],
        };
        if !v.is_finite() {
            return Err(Error::domain("non-finite value", z));
        }
        Ok(v)
    }

    /// Exact derivatives up to `order` by truncated Taylor propagation.
    pub fn jet(&self, z: f64, order: usize) -> Result<Jet> {
        let j = match self {
            Expr::Const(c) => Jet::constant(z, *c, order),
            Expr::Var => Jet::variable(z, order),
            Expr::Neg(a) => -a.jet(z, order)?,
            Expr::Add(a, b) => a.jet(z, order)?.try_add(&b.jet(z, order)?)?,
            Expr::Sub(a, b) => a.jet(z, order)?.try_sub(&b.jet(z, order)?)?,
            Expr::Mul(a, b) => a.jet(z, order)?.try_mul(&b.jet(z, order)?)?,
            Expr::Div(a, b) => a.jet(z, order)?.try_div(&b.jet(z, order)?)?,
            Expr::Pow(a, r) => a.jet(z, order)?.powf(*r)?,
            Expr::Exp(a) => a.jet(z, order)?.exp(),
            Expr::Ln(a) => a.jet(z, order)?.ln()?,
            Expr::Sin(a) => a.jet(z, order)?.sin(),
            Expr::Cos(a) => a.jet(z, order)?.cos(),
            Expr::Root(a, n) => a.jet(z, order)?.root(*n)?,
            Expr::Call(f, a) => {
                let inner = a.jet(z, order)?;
                let x = inner.value();
                let outer = Jet::new(x, &f.derivatives(x, order)?[..=order])?;
                jet_compose(&outer, &inner)?
            }
        };
        if !j.is_finite() {
            return Err(Error::domain("non-finite derivative", z));
        }
        Ok(j)
    }
}

/// Evaluates `expr` and its first `order` derivatives at `z`.
pub fn jet_eval(expr: &Expr, z: f64, order: usize) -> Result<Jet> {
    expr.jet(z, order)
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Expr::Const(c)
    }
}

macro_rules! expr_binop {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl $trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(self), Box::new(rhs))
            }
        }
        impl $trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$variant(Box::new(self), Box::new(Expr::Const(rhs)))
            }
        }
        impl $trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(Expr::Const(self)), Box::new(rhs))
            }
        }
    };
}

expr_binop!(Add, add, Add);
expr_binop!(Sub, sub, Sub);
expr_binop!(Mul, mul, Mul);
expr_binop!(Div, div, Div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

fn fmt_const(c: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c < 0.0 {
        write!(f, "({c:?})")
    } else {
        write!(f, "{c:?}")
    }
}

/// Fully parenthesized form, readable back by [`super::parse_expr`].
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => fmt_const(*c, f),
            Expr::Var => write!(f, "z"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, r) => {
                write!(f, "({a}^")?;
                fmt_const(*r, f)?;
                write!(f, ")")
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Ln(a) => write!(f, "ln({a})"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Root(a, n) => write!(f, "root({a}, {n})"),
            Expr::Call(g, a) => write!(f, "{}({a})", g.name()),
        }
    }
}
