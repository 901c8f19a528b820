//! Text input: expressions with spans, and problem files.

mod ast;
mod convert;
mod parse;
mod problem;

pub use ast::{decimal_text, pretty_print, Ast, AstKind, BinOp, SourceSpan};
pub use convert::{identifiers, parse_expr, to_expr, ConvertError};
pub use parse::{parse_expression, ParseError};
pub use problem::{parse_problem, parse_rational, pretty_print_problem, rational_text, ProblemError, ProblemKind, ProblemSpec};
