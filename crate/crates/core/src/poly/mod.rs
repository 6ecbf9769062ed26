mod division;
mod monomial;
mod ops;
mod polynomial;
mod text;

pub use division::{buchberger_check, divide, reduce, s_polynomial, BuchbergerFailure, BuchbergerReport, Division};
pub use monomial::{Monomial, MonomialOrder, OrderKind};
pub use ops::{interpolate, reduce_periodic, substitute_reduce, DEFAULT_TERM_GUARD};
pub use polynomial::MultivariatePolynomial;
pub use text::parse_polynomial;
