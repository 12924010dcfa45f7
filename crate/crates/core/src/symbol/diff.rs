//! Structural differentiation with respect to `z`.

use std::sync::Arc;

use super::{build, Node};

pub(super) fn differentiate(node: &Arc<Node>) -> Arc<Node> {
    match node.as_ref() {
        Node::Const(_) => build::real(0.0),
        Node::Var => build::real(1.0),
        Node::Neg(a) => build::neg(differentiate(a)),
        Node::Add(a, b) => build::add(differentiate(a), differentiate(b)),
        Node::Sub(a, b) => build::sub(differentiate(a), differentiate(b)),
        Node::Mul(a, b) => build::add(
            build::mul(differentiate(a), b.clone()),
            build::mul(a.clone(), differentiate(b)),
        ),
        Node::Div(a, b) => {
            let num = build::sub(
                build::mul(differentiate(a), b.clone()),
                build::mul(a.clone(), differentiate(b)),
            );
            build::div(num, build::pow(b.clone(), 2))
        }
        Node::Pow(a, n) => build::mul(
            build::mul(build::real(*n as f64), build::pow(a.clone(), n - 1)),
            differentiate(a),
        ),
        Node::Exp(a) => build::mul(differentiate(a), node.clone()),
        Node::Log(a) => build::div(differentiate(a), a.clone()),
    }
}
