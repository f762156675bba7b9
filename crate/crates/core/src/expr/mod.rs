//! Scalar expressions over chart coordinates.
//!
//! The language is plain infix: `+ - * /`, `^` (or `**`) with a constant
//! exponent, unary minus, parentheses, and the functions `sin cos exp log
//! sqrt abs`. `^` is right-associative and binds tighter than unary minus,
//! so `-x^2` is `-(x^2)`. Implicit multiplication is not accepted.
//!
//! Expressions evaluate over any [`Scalar`]; evaluating on [`Jet`]s yields
//! exact first partial derivatives.

mod jet;
mod parse;
mod scalar;

use std::fmt;

pub use jet::{Jet, MAX_DIM};
pub use parse::{parse_expr, ParseError};
pub use scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Expression tree. Coordinates are referenced by index into the chart.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Coord(usize),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("{op} undefined or nonsmooth at argument {value}")]
    Domain { op: &'static str, value: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("expression references coordinate #{index} but the point has dimension {dim}")]
    Dimension { index: usize, dim: usize },
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn coord(i: usize) -> Expr {
        Expr::Coord(i)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 1.0)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    // Smart constructors. They fold constants so that trees built in code and
    // trees produced by the parser share one canonical form.

    pub fn neg(e: Expr) -> Expr {
        match e {
            Expr::Const(c) => Expr::Const(-c),
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        Expr::Binary(BinOp::Add, Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if b.is_zero() {
            return a;
        }
        if a.is_zero() {
            return Expr::neg(b);
        }
        Expr::Binary(BinOp::Sub, Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            return Expr::Const(0.0);
        }
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        Expr::Binary(BinOp::Mul, Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            return Expr::Const(0.0);
        }
        if b.is_one() {
            return a;
        }
        Expr::Binary(BinOp::Div, Box::new(a), Box::new(b))
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    pub fn pow(base: Expr, exponent: f64) -> Expr {
        if exponent == 1.0 {
            return base;
        }
        if exponent == 0.0 {
            return Expr::Const(1.0);
        }
        Expr::Pow(Box::new(base), exponent)
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Coord(i) => Some(*i),
            Expr::Neg(a) | Expr::Call(_, a) | Expr::Pow(a, _) => a.max_coord(),
            Expr::Binary(_, a, b) => match (a.max_coord(), b.max_coord()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, None) => x,
                (None, y) => y,
            },
        }
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> Result<S, EvalError> {
        match self {
            Expr::Const(c) => Ok(S::from_f64(*c)),
            Expr::Coord(i) => x.get(*i).copied().ok_or(EvalError::Dimension {
                index: *i,
                dim: x.len(),
            }),
            Expr::Neg(a) => Ok(-a.eval(x)?),
            Expr::Binary(op, a, b) => {
                let u = a.eval(x)?;
                let v = b.eval(x)?;
                Ok(match op {
                    BinOp::Add => u + v,
                    BinOp::Sub => u - v,
                    BinOp::Mul => u * v,
                    BinOp::Div => {
                        if v.value() == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        u / v
                    }
                })
            }
            Expr::Call(f, a) => {
                let u = a.eval(x)?;
                let val = u.value();
                let domain = |op| EvalError::Domain { op, value: val };
                Ok(match f {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Exp => u.exp(),
                    Func::Log => {
                        if val <= 0.0 {
                            return Err(domain("log"));
                        }
                        u.ln()
                    }
                    Func::Sqrt => {
                        if val < 0.0 || (S::DIFFERENTIATED && val == 0.0) {
                            return Err(domain("sqrt"));
                        }
                        u.sqrt()
                    }
                    Func::Abs => {
                        if S::DIFFERENTIATED && val == 0.0 {
                            return Err(domain("abs"));
                        }
                        u.abs()
                    }
                })
            }
            Expr::Pow(a, e) => {
                let u = a.eval(x)?;
                let val = u.value();
                let e = *e;
                if e.fract() == 0.0 && e.abs() < i32::MAX as f64 {
                    if e < 0.0 && val == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    Ok(u.powi(e as i32))
                } else {
                    if val < 0.0 {
                        return Err(EvalError::Domain {
                            op: "pow",
                            value: val,
                        });
                    }
                    if val == 0.0 {
                        if e < 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        if S::DIFFERENTIATED && e < 1.0 {
                            return Err(EvalError::Domain {
                                op: "pow",
                                value: val,
                            });
                        }
                    }
                    Ok(u.powf(e))
                }
            }
        }
    }

    /// Value and exact first partials at `p`.
    pub fn eval_jet(&self, p: &[f64]) -> Result<Jet, EvalError> {
        let x = Jet::point(p);
        let mut j = self.eval(&x)?;
        if j.dim() < p.len() {
            // constant expressions carry no partials; pad to the chart
            let mut partials = vec![0.0; p.len()];
            partials[..j.dim()].copy_from_slice(j.partials());
            j = Jet::from_parts(j.value(), &partials);
        }
        Ok(j)
    }

    /// Symbolic partial derivative with respect to coordinate `k`.
    ///
    /// Only trivial constant folding is applied. Used where a field is built
    /// from the differential of an expression (gradients of Casimirs,
    /// pullbacks of coordinate forms), so that its own first derivatives
    /// remain available through jets.
    pub fn derivative(&self, k: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Coord(i) => Expr::Const(if *i == k { 1.0 } else { 0.0 }),
            Expr::Neg(a) => Expr::neg(a.derivative(k)),
            Expr::Binary(op, a, b) => {
                let da = a.derivative(k);
                let db = b.derivative(k);
                match op {
                    BinOp::Add => Expr::add(da, db),
                    BinOp::Sub => Expr::sub(da, db),
                    BinOp::Mul => Expr::add(
                        Expr::mul(da, (**b).clone()),
                        Expr::mul((**a).clone(), db),
                    ),
                    BinOp::Div => Expr::sub(
                        Expr::div(da, (**b).clone()),
                        Expr::div(Expr::mul((**a).clone(), db), Expr::pow((**b).clone(), 2.0)),
                    ),
                }
            }
            Expr::Call(f, a) => {
                let da = a.derivative(k);
                if da.is_zero() {
                    return Expr::Const(0.0);
                }
                let a = (**a).clone();
                let outer = match f {
                    Func::Sin => Expr::call(Func::Cos, a),
                    Func::Cos => Expr::neg(Expr::call(Func::Sin, a)),
                    Func::Exp => Expr::call(Func::Exp, a),
                    Func::Log => return Expr::div(da, a),
                    Func::Sqrt => {
                        return Expr::div(da, Expr::mul(Expr::Const(2.0), Expr::call(Func::Sqrt, a)))
                    }
                    Func::Abs => Expr::div(a.clone(), Expr::call(Func::Abs, a)),
                };
                Expr::mul(outer, da)
            }
            Expr::Pow(a, e) => {
                let da = a.derivative(k);
                Expr::mul(
                    Expr::mul(Expr::Const(*e), Expr::pow((**a).clone(), e - 1.0)),
                    da,
                )
            }
        }
    }

    /// Print using coordinate names; `parse_expr(print(e)) == e` for trees in
    /// canonical form.
    pub fn to_source(&self, coords: &[String]) -> String {
        let mut out = String::new();
        self.write(&mut out, coords);
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, _, _) => op.precedence(),
            Expr::Neg(_) => 3,
            Expr::Pow(_, _) => 4,
            _ => 5,
        }
    }

    fn write(&self, out: &mut String, coords: &[String]) {
        match self {
            Expr::Const(c) => {
                if *c < 0.0 {
                    out.push_str(&format!("(-{:?})", -c));
                } else {
                    out.push_str(&format!("{c:?}"));
                }
            }
            Expr::Coord(i) => match coords.get(*i) {
                Some(name) => out.push_str(name),
                None => out.push_str(&format!("x{}", i + 1)),
            },
            Expr::Neg(a) => {
                out.push('-');
                a.write_wrapped(out, coords, a.precedence() < 4);
            }
            Expr::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write(out, coords);
                out.push(')');
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                a.write_wrapped(out, coords, a.precedence() < p);
                out.push(' ');
                out.push_str(op.symbol());
                out.push(' ');
                b.write_wrapped(out, coords, b.precedence() <= p);
            }
            Expr::Pow(a, e) => {
                a.write_wrapped(out, coords, a.precedence() < 5);
                out.push('^');
                if *e < 0.0 {
                    out.push_str(&format!("(-{:?})", -e));
                } else {
                    out.push_str(&format!("{e:?}"));
                }
            }
        }
    }

    fn write_wrapped(&self, out: &mut String, coords: &[String], wrap: bool) {
        if wrap {
            out.push('(');
            self.write(out, coords);
            out.push(')');
        } else {
            self.write(out, coords);
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_source(&[]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    #[test]
    fn polynomial_jet() {
        let e = parse_expr("x^2+y^2", &xyz()).unwrap();
        let j = e.eval_jet(&[1.0, 2.0, 0.0]).unwrap();
        assert_eq!(j.value(), 5.0);
        assert_eq!(j.partials(), &[2.0, 4.0, 0.0]);
    }

    #[test]
    fn sine_at_origin() {
        let e = parse_expr("sin(x)", &xyz()).unwrap();
        let j = e.eval_jet(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(j.value(), 0.0);
        assert_eq!(j.partials(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn constant_jet_is_padded() {
        let e = parse_expr("3", &xyz()).unwrap();
        let j = e.eval_jet(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(j.partials(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn domain_errors() {
        let c = xyz();
        let p = [-1.0, 0.0, 0.0];
        assert!(matches!(
            parse_expr("log(x)", &c).unwrap().eval_jet(&p),
            Err(EvalError::Domain { op: "log", .. })
        ));
        assert!(matches!(
            parse_expr("sqrt(x)", &c).unwrap().eval_jet(&p),
            Err(EvalError::Domain { op: "sqrt", .. })
        ));
        assert_eq!(
            parse_expr("1/y", &c).unwrap().eval_jet(&p),
            Err(EvalError::DivisionByZero)
        );
        // nonsmooth points are errors for jets but fine for plain values
        let abs = parse_expr("abs(y)", &c).unwrap();
        assert!(matches!(abs.eval_jet(&p), Err(EvalError::Domain { op: "abs", .. })));
        assert_eq!(abs.eval(&p).unwrap(), 0.0);
    }

    #[test]
    fn symbolic_derivative_matches_jet() {
        let c = xyz();
        let e = parse_expr("x*sin(y)/(1+z^2) + sqrt(x^2+y^2+z^2) - exp(-x*z)", &c).unwrap();
        let p = [0.4, -0.7, 1.3];
        let j = e.eval_jet(&p).unwrap();
        for k in 0..3 {
            let d = e.derivative(k).eval(&p).unwrap();
            assert!((d - j.d(k)).abs() < 1e-13, "k={k}: {d} vs {}", j.d(k));
        }
    }

    #[test]
    fn printer_round_trips() {
        let c = xyz();
        for src in [
            "x^2+y^2-z^2",
            "-x^2",
            "(-x)^2",
            "x - (y - z)",
            "x/(y*z)",
            "-(x*y)",
            "2^3^2",
            "x^(-2)",
            "sqrt(abs(x)) * -3",
            "1e-10 * exp(-x)",
        ] {
            let e = parse_expr(src, &c).unwrap();
            let printed = e.to_source(&c);
            let back = parse_expr(&printed, &c).unwrap();
            assert_eq!(e, back, "{src} -> {printed}");
        }
    }
}
