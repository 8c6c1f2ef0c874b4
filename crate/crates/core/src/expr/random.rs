//! Random expressions that are defined and smooth on all of `ℝⁿ`.
//!
//! Every partial function is guarded: `log` and `sqrt` only ever see
//! `1 + u²`, divisions are by `1 + u²`, and `exp` is applied to a bounded
//! argument. Used for derivative cross-checks.

use alloc::string::String;
use alloc::vec;

use super::{Ast, BinaryOp, Function, ScalarField};
use crate::rng::SplitMix64;

fn one_plus_square(u: Ast) -> Ast {
    Ast::binary(
        BinaryOp::Add,
        Ast::number(1.0),
        Ast::binary(BinaryOp::Pow, u, Ast::number(2.0)),
    )
}

fn leaf(rng: &mut SplitMix64, dim: usize) -> Ast {
    if rng.below(3) == 0 {
        let k = rng.below(41) as f64 - 20.0;
        Ast::number(k / 10.0)
    } else {
        Ast::variable(rng.below(dim as u64) as usize)
    }
}

fn node(rng: &mut SplitMix64, dim: usize, depth: u32) -> Ast {
    if depth == 0 {
        return leaf(rng, dim);
    }
    let sub = |rng: &mut SplitMix64| node(rng, dim, depth - 1);
    match rng.below(10) {
        0 => Ast::binary(BinaryOp::Add, sub(rng), sub(rng)),
        1 => Ast::binary(BinaryOp::Sub, sub(rng), sub(rng)),
        2 | 3 => Ast::binary(BinaryOp::Mul, sub(rng), sub(rng)),
        4 => Ast::binary(BinaryOp::Div, sub(rng), one_plus_square(sub(rng))),
        5 => Ast::call(Function::Sin, vec![sub(rng)]),
        6 => Ast::call(Function::Cos, vec![sub(rng)]),
        7 => Ast::call(
            Function::Exp,
            vec![Ast::call(Function::Sin, vec![sub(rng)])],
        ),
        8 => Ast::call(Function::Log, vec![one_plus_square(sub(rng))]),
        _ => Ast::call(Function::Sqrt, vec![one_plus_square(sub(rng))]),
    }
}

/// A random everywhere-defined field of nesting depth at most `depth`.
pub fn random_field(rng: &mut SplitMix64, coordinates: &[String], depth: u32) -> ScalarField {
    let ast = node(rng, coordinates.len().max(1), depth);
    ScalarField::from_ast(ast, coordinates).expect("variables drawn from the coordinate list")
}
