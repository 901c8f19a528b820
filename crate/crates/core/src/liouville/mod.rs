//! Symbolic expressions over ℚ(i,√d) with exp, log, arctan, circular and
//! hyperbolic functions, plus the calculus needed to build and check
//! Liouvillian solutions.

mod diff;
mod eval;
mod expr;
mod hyper;
mod integrate;
mod print;
mod rewrite;
mod simplify;

pub use diff::differentiate;
pub use eval::{bind, eval_complex, Bindings, EvalError};
pub use expr::{Expr, Func, LiouvilleExpr, Node};
pub use hyper::{is_zero_exact, monomial_count, poly_to_expr, rational_to_expr, to_rational};
pub use integrate::{exp_integral, integrate_rational, integrate_time};
pub use rewrite::{linear_arguments, pair_to_expr, rational_gcd, Family, Pair, RewriteError, TrigRewrite};
pub use simplify::{expand, same_form, simplify};
