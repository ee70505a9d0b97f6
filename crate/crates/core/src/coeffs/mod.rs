//! Exact rationals and affine coefficient expressions.

mod expr;
mod rational;

use alloc::string::String;

pub use expr::{collect_names, parse_binding, parse_coeff, parse_relation, CoeffExpr, Symbol, Target};
pub use rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoeffError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("nonlinear expression: {0}")]
    Nonlinear(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("floating-point literal `{0}` is not allowed; write a fraction")]
    FloatLiteral(String),
}
