//! Truncated-Taylor jets, closed-form expressions, the Schwarzian derivative
//! and a finite-difference oracle.

mod expr;
mod fd;
mod jet;
mod parse;

pub use expr::{jet_eval, Expr, NamedFn};
pub use fd::{agrees_with, fd_derivatives, FD_STEP, FD_TOLERANCE};
pub use jet::{jet_compose, schwarzian, Jet, CRITICAL_THRESHOLD, DEFAULT_ORDER};
pub use parse::parse_expr;
