//! Parameter expressions.

use std::collections::HashMap;

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
    Ln,
    Sqrt,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sqrt => x.sqrt(),
        }
    }
}

/// An arithmetic expression over real literals, `pi` and formal gate
/// parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamExpr {
    Num(f64),
    Pi,
    Ident(String),
    Neg(Box<ParamExpr>),
    Binary(BinOp, Box<ParamExpr>, Box<ParamExpr>),
    Call(Func, Box<ParamExpr>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound identifier `{0}`")]
    UnboundIdentifier(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("expression evaluates to a non-finite value")]
    NonFiniteResult,
}

impl ParamExpr {
    /// Evaluate with the given formal-parameter bindings.
    pub fn eval(&self, bindings: &HashMap<String, f64>) -> Result<f64, EvalError> {
        let v = self.eval_inner(bindings)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFiniteResult)
        }
    }

    fn eval_inner(&self, bindings: &HashMap<String, f64>) -> Result<f64, EvalError> {
        Ok(match self {
            ParamExpr::Num(v) => *v,
            ParamExpr::Pi => std::f64::consts::PI,
            ParamExpr::Ident(name) => *bindings
                .get(name)
                .ok_or_else(|| EvalError::UnboundIdentifier(name.clone()))?,
            ParamExpr::Neg(e) => -e.eval_inner(bindings)?,
            ParamExpr::Call(f, e) => f.apply(e.eval_inner(bindings)?),
            ParamExpr::Binary(op, l, r) => {
                let l = l.eval_inner(bindings)?;
                let r = r.eval_inner(bindings)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        l / r
                    }
                    BinOp::Pow => l.powf(r),
                }
            }
        })
    }
}

/// Evaluate `e` under `bindings`. Free-function form of [`ParamExpr::eval`].
pub fn eval_param(e: &ParamExpr, bindings: &HashMap<String, f64>) -> Result<f64, EvalError> {
    e.eval(bindings)
}
