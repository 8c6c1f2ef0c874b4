//! Scalar-field expressions over chart coordinates.
//!
//! Metric entries, vector-field components and conformal factors are all
//! written in this language and evaluated to [`Jet2`] values. The grammar
//! is:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | coordinate | function '(' args ')' | '(' expr ')'
//! ```
//!
//! Functions: `exp`, `log`, `sin`, `cos`, `sqrt` (one argument) and `pow`
//! (two arguments, same as `^`).

mod ast;
mod parser;
pub mod random;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use ast::{Ast, BinaryOp, Function, NodeKind, Span};

use crate::error::{Error, Result};
use crate::jet::{apply, Jet2, JetOp, Scalar, MAX_DIM};

/// Default coordinate names for a chart of dimension `n`.
pub fn default_coordinates(n: usize) -> Vec<String> {
    ["x", "y", "z", "w"]
        .iter()
        .take(n)
        .map(|s| s.to_string())
        .collect()
}

/// An expression bound to a list of coordinate names.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    ast: Ast,
    coordinates: Vec<String>,
}

impl ScalarField {
    pub fn parse(source: &str, coordinates: &[String]) -> Result<ScalarField> {
        if coordinates.is_empty() || coordinates.len() > MAX_DIM {
            return Err(Error::UnsupportedDimension(coordinates.len()));
        }
        let ast = parser::parse_ast(source, coordinates)?;
        Ok(ScalarField {
            ast,
            coordinates: coordinates.to_vec(),
        })
    }

    pub fn from_ast(ast: Ast, coordinates: &[String]) -> Result<ScalarField> {
        if coordinates.is_empty() || coordinates.len() > MAX_DIM {
            return Err(Error::UnsupportedDimension(coordinates.len()));
        }
        if let Some(i) = ast.max_variable() {
            if i >= coordinates.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    dim: coordinates.len(),
                });
            }
        }
        Ok(ScalarField {
            ast,
            coordinates: coordinates.to_vec(),
        })
    }

    pub fn constant(v: f64, coordinates: &[String]) -> Result<ScalarField> {
        ScalarField::from_ast(Ast::number(v), coordinates)
    }

    pub fn ast(&self) -> &Ast {
        &self.ast
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coordinates
    }

    pub fn dim(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_constant(&self) -> bool {
        self.ast.is_constant()
    }

    /// Value and first/second partial derivatives at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<Jet2> {
        self.check_point(x)?;
        let vars = Jet2::variables(x)?;
        eval_node(&self.ast, &vars, &self.coordinates)
    }

    /// Plain value at `x`; shares the tree walk but none of the derivative
    /// rules of [`eval`](Self::eval).
    pub fn eval_value(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        eval_node(&self.ast, x, &self.coordinates)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.coordinates.len() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "point has {} coordinates, field expects {}",
                x.len(),
                self.coordinates.len()
            )));
        }
        Ok(())
    }

    /// `self * other` as a composed field.
    pub fn mul(&self, other: &ScalarField) -> Result<ScalarField> {
        self.combine(BinaryOp::Mul, other)
    }

    pub fn combine(&self, op: BinaryOp, other: &ScalarField) -> Result<ScalarField> {
        if self.coordinates != other.coordinates {
            return Err(Error::DimensionMismatch(alloc::format!(
                "coordinates {:?} and {:?} differ",
                self.coordinates,
                other.coordinates
            )));
        }
        Ok(ScalarField {
            ast: Ast::binary(op, self.ast.clone(), other.ast.clone()),
            coordinates: self.coordinates.clone(),
        })
    }

    /// `f(self)` for a one-argument function.
    pub fn apply(&self, f: Function) -> ScalarField {
        ScalarField {
            ast: Ast::call(f, vec![self.ast.clone()]),
            coordinates: self.coordinates.clone(),
        }
    }

    pub fn scaled(&self, k: f64) -> ScalarField {
        ScalarField {
            ast: Ast::binary(BinaryOp::Mul, Ast::number(k), self.ast.clone()),
            coordinates: self.coordinates.clone(),
        }
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ast.display(&self.coordinates))
    }
}

fn domain_error(err: Error, node: &Ast, coordinates: &[String]) -> Error {
    match err {
        Error::Domain { op, value } => Error::EvalDomain {
            op,
            value,
            expr: node.display(coordinates).to_string(),
        },
        other => other,
    }
}

fn eval_node<T: Scalar>(node: &Ast, vars: &[T], coordinates: &[String]) -> Result<T> {
    let out = match &node.kind {
        NodeKind::Number(v) => Ok(T::constant(*v)),
        NodeKind::Variable(i) => vars.get(*i).copied().ok_or(Error::IndexOutOfRange {
            index: *i,
            dim: vars.len(),
        }),
        NodeKind::Neg(a) => apply(JetOp::Neg, eval_node(a, vars, coordinates)?, None),
        NodeKind::Binary(op, a, b) => {
            let a = eval_node(a, vars, coordinates)?;
            let b = eval_node(b, vars, coordinates)?;
            let op = match op {
                BinaryOp::Add => JetOp::Add,
                BinaryOp::Sub => JetOp::Sub,
                BinaryOp::Mul => JetOp::Mul,
                BinaryOp::Div => JetOp::Div,
                BinaryOp::Pow => JetOp::Pow,
            };
            apply(op, a, Some(b))
        }
        NodeKind::Call(func, args) => {
            let a = eval_node(&args[0], vars, coordinates)?;
            let op = match func {
                Function::Exp => JetOp::Exp,
                Function::Log => JetOp::Log,
                Function::Sin => JetOp::Sin,
                Function::Cos => JetOp::Cos,
                Function::Sqrt => JetOp::Sqrt,
                Function::Pow => {
                    let b = eval_node(&args[1], vars, coordinates)?;
                    return apply(JetOp::Pow, a, Some(b))
                        .map_err(|e| domain_error(e, node, coordinates));
                }
            };
            apply(op, a, None)
        }
    };
    out.map_err(|e| domain_error(e, node, coordinates))
}
