//! Symbolic expressions over the double-null variables `(z, w, zt, wt)`.
//!
//! Grammar (EBNF):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = atom [ "^" integer ] ;
//! atom    = number | "i" | variable | function "(" expr ")"
//!         | parameter | "(" expr ")" ;
//! variable  = "z" | "w" | "zt" | "wt" ;
//! function  = "exp" | "log" | "sqrt" | "conj" ;
//! parameter = identifier (any other identifier; bound to a real constant) ;
//! number    = decimal literal, e.g. 2, 0.5, 1e-3 ;
//! integer   = optionally signed decimal integer ;
//! ```
//!
//! Exponents are integers only. `conj` is expanded structurally at
//! construction time: it conjugates literals, swaps `z <-> zt` and
//! `w <-> wt`, and distributes through all operations (parameters are real
//! by convention). `log` and `sqrt` use principal branches; evaluation at
//! a nonpositive real argument of `log`/negative real of `sqrt`, or a zero
//! denominator, is reported as a singular-evaluation error.
//!
//! The four variables are mutually independent for differentiation; the
//! real-slice identification `zt = conj(z)` happens only at evaluation.

mod parse;

pub use parse::{parse, ParseError};

use num_complex::Complex64;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

pub type C = Complex64;

/// The four double-null variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Z = 0,
    W = 1,
    Zt = 2,
    Wt = 3,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::Z, Var::W, Var::Zt, Var::Wt];

    pub fn name(self) -> &'static str {
        match self {
            Var::Z => "z",
            Var::W => "w",
            Var::Zt => "zt",
            Var::Wt => "wt",
        }
    }

    /// The variable this one maps to under complex conjugation.
    pub fn conj(self) -> Var {
        match self {
            Var::Z => Var::Zt,
            Var::Zt => Var::Z,
            Var::W => Var::Wt,
            Var::Wt => Var::W,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug)]
pub enum Node {
    Lit(C),
    Var(Var),
    Param(String),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Neg(Expr),
    Pow(Expr, i32),
    Exp(Expr),
    Log(Expr),
    Sqrt(Expr),
}

/// Reference-counted expression tree. Shared subtrees are evaluated once per
/// point thanks to pointer-keyed caching in [`Expr::eval_cached`].
#[derive(Clone)]
pub struct Expr(Arc<Node>);

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EvalError {
    #[error("unbound parameter `{0}`")]
    UnboundParam(String),
    #[error("singular evaluation: {what} at {part}")]
    Singular { what: &'static str, part: String },
}

/// Values of the four variables at a point of (complexified) double-null
/// space. On the real slice `vals[2] = conj(vals[0])`, `vals[3] = conj(vals[1])`.
pub type VarVals = [C; 4];

pub type Params = HashMap<String, f64>;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

impl Expr {
    fn new(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn lit(v: C) -> Expr {
        Expr::new(Node::Lit(v))
    }

    pub fn real(v: f64) -> Expr {
        Expr::lit(c(v))
    }

    pub fn zero() -> Expr {
        Expr::real(0.0)
    }

    pub fn one() -> Expr {
        Expr::real(1.0)
    }

    pub fn i() -> Expr {
        Expr::lit(C::new(0.0, 1.0))
    }

    pub fn var(v: Var) -> Expr {
        Expr::new(Node::Var(v))
    }

    pub fn z() -> Expr {
        Expr::var(Var::Z)
    }
    pub fn w() -> Expr {
        Expr::var(Var::W)
    }
    pub fn zt() -> Expr {
        Expr::var(Var::Zt)
    }
    pub fn wt() -> Expr {
        Expr::var(Var::Wt)
    }

    pub fn param(name: &str) -> Expr {
        Expr::new(Node::Param(name.to_string()))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Lit(v) if v.re == 0.0 && v.im == 0.0)
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Node::Lit(v) if v.re == 1.0 && v.im == 0.0)
    }

    pub fn add(&self, rhs: &Expr) -> Expr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if let (Node::Lit(a), Node::Lit(b)) = (self.node(), rhs.node()) {
            return Expr::lit(a + b);
        }
        Expr::new(Node::Add(self.clone(), rhs.clone()))
    }

    pub fn sub(&self, rhs: &Expr) -> Expr {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.neg();
        }
        if let (Node::Lit(a), Node::Lit(b)) = (self.node(), rhs.node()) {
            return Expr::lit(a - b);
        }
        if Arc::ptr_eq(&self.0, &rhs.0) {
            return Expr::zero();
        }
        Expr::new(Node::Sub(self.clone(), rhs.clone()))
    }

    pub fn mul(&self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.is_one() {
            return rhs.clone();
        }
        if rhs.is_one() {
            return self.clone();
        }
        if let (Node::Lit(a), Node::Lit(b)) = (self.node(), rhs.node()) {
            return Expr::lit(a * b);
        }
        Expr::new(Node::Mul(self.clone(), rhs.clone()))
    }

    pub fn div(&self, rhs: &Expr) -> Expr {
        if rhs.is_one() {
            return self.clone();
        }
        if self.is_zero() {
            return Expr::zero();
        }
        if let (Node::Lit(a), Node::Lit(b)) = (self.node(), rhs.node()) {
            if b.norm_sqr() != 0.0 {
                return Expr::lit(a / b);
            }
        }
        Expr::new(Node::Div(self.clone(), rhs.clone()))
    }

    pub fn neg(&self) -> Expr {
        match self.node() {
            Node::Lit(v) => Expr::lit(-v),
            Node::Neg(e) => e.clone(),
            _ => Expr::new(Node::Neg(self.clone())),
        }
    }

    pub fn pow(&self, n: i32) -> Expr {
        match n {
            0 => Expr::one(),
            1 => self.clone(),
            _ => {
                if let Node::Lit(v) = self.node() {
                    return Expr::lit(v.powi(n));
                }
                Expr::new(Node::Pow(self.clone(), n))
            }
        }
    }

    pub fn exp(&self) -> Expr {
        if self.is_zero() {
            return Expr::one();
        }
        Expr::new(Node::Exp(self.clone()))
    }

    pub fn log(&self) -> Expr {
        if self.is_one() {
            return Expr::zero();
        }
        Expr::new(Node::Log(self.clone()))
    }

    pub fn sqrt(&self) -> Expr {
        Expr::new(Node::Sqrt(self.clone()))
    }

    /// Structural complex conjugation: conjugates literals, swaps variables
    /// with their conjugates, leaves (real) parameters fixed and distributes
    /// through every operation.
    pub fn conj(&self) -> Expr {
        match self.node() {
            Node::Lit(v) => Expr::lit(v.conj()),
            Node::Var(v) => Expr::var(v.conj()),
            Node::Param(p) => Expr::param(p),
            Node::Add(a, b) => a.conj().add(&b.conj()),
            Node::Sub(a, b) => a.conj().sub(&b.conj()),
            Node::Mul(a, b) => a.conj().mul(&b.conj()),
            Node::Div(a, b) => a.conj().div(&b.conj()),
            Node::Neg(a) => a.conj().neg(),
            Node::Pow(a, n) => a.conj().pow(*n),
            Node::Exp(a) => a.conj().exp(),
            Node::Log(a) => a.conj().log(),
            Node::Sqrt(a) => a.conj().sqrt(),
        }
    }

    /// Wirtinger derivative with respect to one of the four independent
    /// variables.
    pub fn diff(&self, v: Var) -> Expr {
        match self.node() {
            Node::Lit(_) | Node::Param(_) => Expr::zero(),
            Node::Var(u) => {
                if *u == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(a, b) => a.diff(v).add(&b.diff(v)),
            Node::Sub(a, b) => a.diff(v).sub(&b.diff(v)),
            Node::Mul(a, b) => a.diff(v).mul(b).add(&a.mul(&b.diff(v))),
            Node::Div(a, b) => {
                // (a/b)' = a'/b - a b' / b^2
                let da = a.diff(v);
                let db = b.diff(v);
                if db.is_zero() {
                    return da.div(b);
                }
                da.div(b).sub(&a.mul(&db).div(&b.pow(2)))
            }
            Node::Neg(a) => a.diff(v).neg(),
            Node::Pow(a, n) => {
                let da = a.diff(v);
                if da.is_zero() {
                    return Expr::zero();
                }
                Expr::real(*n as f64).mul(&a.pow(n - 1)).mul(&da)
            }
            Node::Exp(a) => self.clone().mul(&a.diff(v)),
            Node::Log(a) => a.diff(v).div(a),
            Node::Sqrt(a) => {
                let da = a.diff(v);
                if da.is_zero() {
                    return Expr::zero();
                }
                da.div(&Expr::real(2.0).mul(self))
            }
        }
    }

    /// Substitute numeric values for parameters, folding them into literals.
    pub fn bind_params(&self, params: &Params) -> Expr {
        match self.node() {
            Node::Lit(_) | Node::Var(_) => self.clone(),
            Node::Param(p) => match params.get(p) {
                Some(v) => Expr::real(*v),
                None => self.clone(),
            },
            Node::Add(a, b) => a.bind_params(params).add(&b.bind_params(params)),
            Node::Sub(a, b) => a.bind_params(params).sub(&b.bind_params(params)),
            Node::Mul(a, b) => a.bind_params(params).mul(&b.bind_params(params)),
            Node::Div(a, b) => a.bind_params(params).div(&b.bind_params(params)),
            Node::Neg(a) => a.bind_params(params).neg(),
            Node::Pow(a, n) => a.bind_params(params).pow(*n),
            Node::Exp(a) => a.bind_params(params).exp(),
            Node::Log(a) => a.bind_params(params).log(),
            Node::Sqrt(a) => a.bind_params(params).sqrt(),
        }
    }

    /// List unbound parameter names.
    pub fn params(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_params(&self, out: &mut Vec<String>) {
        match self.node() {
            Node::Param(p) => out.push(p.clone()),
            Node::Lit(_) | Node::Var(_) => {}
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            Node::Neg(a) | Node::Pow(a, _) | Node::Exp(a) | Node::Log(a) | Node::Sqrt(a) => {
                a.collect_params(out)
            }
        }
    }

    pub fn eval(&self, vals: &VarVals) -> Result<C, EvalError> {
        let mut cache = HashMap::new();
        self.eval_cached(vals, &mut cache)
    }

    /// Evaluate with a pointer-keyed cache so shared subtrees are visited
    /// once. The cache must not be reused across points.
    pub fn eval_cached(
        &self,
        vals: &VarVals,
        cache: &mut HashMap<*const Node, C>,
    ) -> Result<C, EvalError> {
        let key = Arc::as_ptr(&self.0);
        if let Some(v) = cache.get(&key) {
            return Ok(*v);
        }
        let v = match self.node() {
            Node::Lit(v) => *v,
            Node::Var(u) => vals[u.index()],
            Node::Param(p) => return Err(EvalError::UnboundParam(p.clone())),
            Node::Add(a, b) => a.eval_cached(vals, cache)? + b.eval_cached(vals, cache)?,
            Node::Sub(a, b) => a.eval_cached(vals, cache)? - b.eval_cached(vals, cache)?,
            Node::Mul(a, b) => a.eval_cached(vals, cache)? * b.eval_cached(vals, cache)?,
            Node::Div(a, b) => {
                let den = b.eval_cached(vals, cache)?;
                if den.norm_sqr() == 0.0 {
                    return Err(EvalError::Singular {
                        what: "division by zero",
                        part: trunc(&b.to_string()),
                    });
                }
                a.eval_cached(vals, cache)? / den
            }
            Node::Neg(a) => -a.eval_cached(vals, cache)?,
            Node::Pow(a, n) => a.eval_cached(vals, cache)?.powi(*n),
            Node::Exp(a) => a.eval_cached(vals, cache)?.exp(),
            Node::Log(a) => {
                let v = a.eval_cached(vals, cache)?;
                if v.im == 0.0 && v.re <= 0.0 {
                    return Err(EvalError::Singular {
                        what: "log branch point or cut",
                        part: trunc(&a.to_string()),
                    });
                }
                v.ln()
            }
            Node::Sqrt(a) => {
                let v = a.eval_cached(vals, cache)?;
                if v.im == 0.0 && v.re < 0.0 {
                    return Err(EvalError::Singular {
                        what: "sqrt branch cut",
                        part: trunc(&a.to_string()),
                    });
                }
                v.sqrt()
            }
        };
        cache.insert(key, v);
        Ok(v)
    }
}

fn trunc(s: &str) -> String {
    if s.len() > 60 {
        format!("{}...", &s[..60])
    } else {
        s.to_string()
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (self.node(), other.node()) {
            (Node::Lit(a), Node::Lit(b)) => a == b,
            (Node::Var(a), Node::Var(b)) => a == b,
            (Node::Param(a), Node::Param(b)) => a == b,
            (Node::Add(a1, b1), Node::Add(a2, b2))
            | (Node::Sub(a1, b1), Node::Sub(a2, b2))
            | (Node::Mul(a1, b1), Node::Mul(a2, b2))
            | (Node::Div(a1, b1), Node::Div(a2, b2)) => a1 == a2 && b1 == b2,
            (Node::Neg(a), Node::Neg(b))
            | (Node::Exp(a), Node::Exp(b))
            | (Node::Log(a), Node::Log(b))
            | (Node::Sqrt(a), Node::Sqrt(b)) => a == b,
            (Node::Pow(a, n), Node::Pow(b, m)) => n == m && a == b,
            _ => false,
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized, re-parseable rendering.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Lit(v) => {
                if v.im == 0.0 {
                    if v.re < 0.0 {
                        write!(f, "({:?})", v.re)
                    } else {
                        write!(f, "{:?}", v.re)
                    }
                } else if v.re == 0.0 {
                    write!(f, "({:?}*i)", v.im)
                } else {
                    write!(f, "({:?}+{:?}*i)", v.re, v.im)
                }
            }
            Node::Var(v) => write!(f, "{}", v.name()),
            Node::Param(p) => write!(f, "{}", p),
            Node::Add(a, b) => write!(f, "({}+{})", a, b),
            Node::Sub(a, b) => write!(f, "({}-{})", a, b),
            Node::Mul(a, b) => write!(f, "({}*{})", a, b),
            Node::Div(a, b) => write!(f, "({}/{})", a, b),
            Node::Neg(a) => write!(f, "(-{})", a),
            Node::Pow(a, n) => {
                if *n < 0 {
                    write!(f, "({}^({}))", a, n)
                } else {
                    write!(f, "({}^{})", a, n)
                }
            }
            Node::Exp(a) => write!(f, "exp({})", a),
            Node::Log(a) => write!(f, "log({})", a),
            Node::Sqrt(a) => write!(f, "sqrt({})", a),
        }
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$method(self, rhs)
            }
        }
        impl std::ops::$trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$method(&self, &rhs)
            }
        }
    };
}
impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);
impl_binop!(Div, div);

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}
impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

/// Shorthand: `rho^2 = z*zt + w*wt`.
pub fn rho2() -> Expr {
    Expr::z().mul(&Expr::zt()).add(&Expr::w().mul(&Expr::wt()))
}

#[cfg(test)]
mod tests;
