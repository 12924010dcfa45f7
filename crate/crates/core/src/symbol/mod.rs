//! Analytic symbols on the unit disk.
//!
//! A symbol is an immutable expression tree in the single variable `z`
//! built from complex constants, the four field operations, integer
//! powers, `exp` and the principal branch of `log`. Trees are shared
//! through [`Arc`], so derivatives and compositions reuse subtrees
//! instead of copying them.

mod diff;
mod parse;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::disk::DiskGrid;

pub use parse::{parse_symbol, ParseError};

/// One node of an analytic expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(Complex64),
    Var,
    Neg(Arc<Node>),
    Add(Arc<Node>, Arc<Node>),
    Sub(Arc<Node>, Arc<Node>),
    Mul(Arc<Node>, Arc<Node>),
    Div(Arc<Node>, Arc<Node>),
    Pow(Arc<Node>, i32),
    Exp(Arc<Node>),
    Log(Arc<Node>),
}

/// Failure to evaluate a symbol at a point of the disk.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at z = {0}")]
    DivisionByZero(Complex64),
    #[error("logarithm of zero at z = {0}")]
    LogOfZero(Complex64),
    #[error("non-finite value at z = {0}")]
    NonFinite(Complex64),
}

impl EvalError {
    pub fn point(&self) -> Complex64 {
        match *self {
            EvalError::DivisionByZero(z) | EvalError::LogOfZero(z) | EvalError::NonFinite(z) => z,
        }
    }
}

/// An analytic function on the unit disk given as an expression tree.
#[derive(Debug, Clone)]
pub struct AnalyticSymbol {
    root: Arc<Node>,
    source_text: String,
}

impl AnalyticSymbol {
    pub fn from_node(root: Arc<Node>) -> Self {
        AnalyticSymbol {
            root,
            source_text: String::new(),
        }
    }

    pub(crate) fn with_source(root: Arc<Node>, source_text: &str) -> Self {
        AnalyticSymbol {
            root,
            source_text: source_text.to_string(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_node(Arc::new(Node::Const(c)))
    }

    pub fn identity() -> Self {
        Self::from_node(Arc::new(Node::Var))
    }

    pub fn root(&self) -> &Arc<Node> {
        &self.root
    }

    /// Text the symbol was parsed from; empty for programmatically built trees.
    pub fn source_text(&self) -> &str {
        &self.source_text
    }

    /// Returns the constant value if the tree folded to a single constant.
    pub fn as_constant(&self) -> Option<Complex64> {
        match *self.root {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64, EvalError> {
        eval_node(&self.root, z)
    }

    pub fn derivative(&self) -> AnalyticSymbol {
        AnalyticSymbol::from_node(diff::differentiate(&self.root))
    }

    /// `self ∘ inner`: every occurrence of `z` is replaced by `inner`.
    pub fn compose(&self, inner: &AnalyticSymbol) -> AnalyticSymbol {
        AnalyticSymbol::from_node(substitute(&self.root, &inner.root))
    }

    pub fn mul(&self, other: &AnalyticSymbol) -> AnalyticSymbol {
        AnalyticSymbol::from_node(build::mul(self.root.clone(), other.root.clone()))
    }

    pub fn sub(&self, other: &AnalyticSymbol) -> AnalyticSymbol {
        AnalyticSymbol::from_node(build::sub(self.root.clone(), other.root.clone()))
    }

    pub fn scale(&self, c: Complex64) -> AnalyticSymbol {
        AnalyticSymbol::from_node(build::mul(build::constant(c), self.root.clone()))
    }

    pub fn powi(&self, n: i32) -> AnalyticSymbol {
        AnalyticSymbol::from_node(build::pow(self.root.clone(), n))
    }

    /// Number of nodes, counting shared subtrees once per reference.
    pub fn size(&self) -> usize {
        fn count(n: &Node) -> usize {
            match n {
                Node::Const(_) | Node::Var => 1,
                Node::Neg(a) | Node::Pow(a, _) | Node::Exp(a) | Node::Log(a) => 1 + count(a),
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    1 + count(a) + count(b)
                }
            }
        }
        count(&self.root)
    }
}

impl fmt::Display for AnalyticSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(&self.root, f)
    }
}

fn eval_node(node: &Node, z: Complex64) -> Result<Complex64, EvalError> {
    let v = match node {
        Node::Const(c) => *c,
        Node::Var => z,
        Node::Neg(a) => -eval_node(a, z)?,
        Node::Add(a, b) => eval_node(a, z)? + eval_node(b, z)?,
        Node::Sub(a, b) => eval_node(a, z)? - eval_node(b, z)?,
        Node::Mul(a, b) => eval_node(a, z)? * eval_node(b, z)?,
        Node::Div(a, b) => {
            let num = eval_node(a, z)?;
            let den = eval_node(b, z)?;
            if den.norm_sqr() == 0.0 {
                return Err(EvalError::DivisionByZero(z));
            }
            num / den
        }
        Node::Pow(a, n) => {
            let base = eval_node(a, z)?;
            if *n < 0 && base.norm_sqr() == 0.0 {
                return Err(EvalError::DivisionByZero(z));
            }
            int_pow(base, *n)
        }
        Node::Exp(a) => eval_node(a, z)?.exp(),
        Node::Log(a) => {
            let w = eval_node(a, z)?;
            if w.norm_sqr() == 0.0 {
                return Err(EvalError::LogOfZero(z));
            }
            w.ln()
        }
    };
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite(z))
    }
}

/// Integer power by repeated squaring.
pub(crate) fn int_pow(base: Complex64, n: i32) -> Complex64 {
    let mut e = n.unsigned_abs();
    let mut acc = Complex64::new(1.0, 0.0);
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    if n < 0 {
        acc.inv()
    } else {
        acc
    }
}

fn substitute(node: &Arc<Node>, inner: &Arc<Node>) -> Arc<Node> {
    match node.as_ref() {
        Node::Const(_) => node.clone(),
        Node::Var => inner.clone(),
        Node::Neg(a) => build::neg(substitute(a, inner)),
        Node::Add(a, b) => build::add(substitute(a, inner), substitute(b, inner)),
        Node::Sub(a, b) => build::sub(substitute(a, inner), substitute(b, inner)),
        Node::Mul(a, b) => build::mul(substitute(a, inner), substitute(b, inner)),
        Node::Div(a, b) => build::div(substitute(a, inner), substitute(b, inner)),
        Node::Pow(a, n) => build::pow(substitute(a, inner), *n),
        Node::Exp(a) => build::exp(substitute(a, inner)),
        Node::Log(a) => build::log(substitute(a, inner)),
    }
}

fn write_const(c: Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // `{:?}` on f64 is the shortest representation that round-trips.
    match (c.re == 0.0, c.im == 0.0) {
        (_, true) => write!(f, "({:?})", c.re),
        (true, false) => write!(f, "({:?}*i)", c.im),
        (false, false) => write!(f, "({:?}+{:?}*i)", c.re, c.im),
    }
}

fn write_node(node: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match node {
        Node::Const(c) => write_const(*c, f),
        Node::Var => write!(f, "z"),
        Node::Neg(a) => {
            write!(f, "(-")?;
            write_node(a, f)?;
            write!(f, ")")
        }
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            let op = match node {
                Node::Add(..) => "+",
                Node::Sub(..) => "-",
                Node::Mul(..) => "*",
                _ => "/",
            };
            write!(f, "(")?;
            write_node(a, f)?;
            write!(f, "{op}")?;
            write_node(b, f)?;
            write!(f, ")")
        }
        Node::Pow(a, n) => {
            write!(f, "(")?;
            write_node(a, f)?;
            write!(f, "^{n})")
        }
        Node::Exp(a) => {
            write!(f, "exp(")?;
            write_node(a, f)?;
            write!(f, ")")
        }
        Node::Log(a) => {
            write!(f, "log(")?;
            write_node(a, f)?;
            write!(f, ")")
        }
    }
}

/// Smart constructors with constant folding and the obvious identities.
pub mod build {
    use super::*;

    fn zero() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn konst(n: &Node) -> Option<Complex64> {
        match *n {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn constant(c: Complex64) -> Arc<Node> {
        Arc::new(Node::Const(c))
    }

    pub fn real(x: f64) -> Arc<Node> {
        constant(Complex64::new(x, 0.0))
    }

    pub fn var() -> Arc<Node> {
        Arc::new(Node::Var)
    }

    pub fn neg(a: Arc<Node>) -> Arc<Node> {
        match a.as_ref() {
            Node::Const(c) => constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Arc::new(Node::Neg(a)),
        }
    }

    pub fn add(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
        match (konst(&a), konst(&b)) {
            (Some(x), Some(y)) => constant(x + y),
            (Some(x), None) if x == zero() => b,
            (None, Some(y)) if y == zero() => a,
            _ => Arc::new(Node::Add(a, b)),
        }
    }

    pub fn sub(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
        match (konst(&a), konst(&b)) {
            (Some(x), Some(y)) => constant(x - y),
            (Some(x), None) if x == zero() => neg(b),
            (None, Some(y)) if y == zero() => a,
            _ => Arc::new(Node::Sub(a, b)),
        }
    }

    pub fn mul(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
        match (konst(&a), konst(&b)) {
            (Some(x), Some(y)) => constant(x * y),
            (Some(x), None) | (None, Some(x)) if x == zero() => constant(zero()),
            (Some(x), None) if x == one() => b,
            (None, Some(y)) if y == one() => a,
            _ => Arc::new(Node::Mul(a, b)),
        }
    }

    pub fn div(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
        match (konst(&a), konst(&b)) {
            (Some(x), Some(y)) if y != zero() => constant(x / y),
            (Some(x), None) if x == zero() => constant(zero()),
            (None, Some(y)) if y == one() => a,
            _ => Arc::new(Node::Div(a, b)),
        }
    }

    pub fn pow(a: Arc<Node>, n: i32) -> Arc<Node> {
        match (konst(&a), n) {
            (_, 0) => constant(one()),
            (_, 1) => a,
            (Some(x), n) if n > 0 || x != zero() => constant(int_pow(x, n)),
            _ => Arc::new(Node::Pow(a, n)),
        }
    }

    pub fn exp(a: Arc<Node>) -> Arc<Node> {
        match konst(&a) {
            Some(x) => constant(x.exp()),
            None => Arc::new(Node::Exp(a)),
        }
    }

    pub fn log(a: Arc<Node>) -> Arc<Node> {
        match konst(&a) {
            Some(x) if x != zero() => constant(x.ln()),
            _ => Arc::new(Node::Log(a)),
        }
    }
}

/// Outcome of probing `|φ|` over a grid.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SelfMapCheck {
    pub max_abs_observed: f64,
    pub witness: Complex64,
    pub passed: bool,
}

/// Checks that `|φ(z)| < 1` at every grid point.
pub fn validate_self_map(sym: &AnalyticSymbol, grid: &DiskGrid) -> Result<SelfMapCheck, EvalError> {
    let mut best = SelfMapCheck {
        max_abs_observed: 0.0,
        witness: Complex64::new(0.0, 0.0),
        passed: true,
    };
    for ring in 0..grid.radii.len() {
        for k in 0..grid.angle_counts[ring] {
            let z = grid.point(ring, k);
            let m = sym.evaluate(z)?.norm();
            if m > best.max_abs_observed || (best.max_abs_observed == 0.0 && ring == 0 && k == 0) {
                best.max_abs_observed = m;
                best.witness = z;
            }
            if m >= 1.0 {
                best.passed = false;
            }
        }
    }
    Ok(best)
}
