//! Normal forms in the Weyl and q-Weyl algebras, their actions on functions
//! by difference, q-difference and differential operators, series
//! coefficients by exact oracles and by residue functionals, Liouville-type
//! diagnostics and Charlier polynomials.

pub type C64 = num_complex::Complex64;

pub mod algebra;
pub mod charlier;
pub mod coefficients;
pub mod function;
pub mod liouville;
pub mod numfmt;
pub mod parse;
pub mod quadrature;
pub mod semantics;
pub mod series;

pub use algebra::{AlgebraError, AlgebraParams, LaurentPoly, WeylElement};
pub use coefficients::{CoefficientError, CoefficientSeries, Method, NewtonOptions};
pub use function::{AnalyticFunction, Domain, EvalError, Expr, Function};
pub use parse::{parse_expr, parse_function, parse_weyl, parse_weyl_expr, ParseError, WeylExpr};
pub use quadrature::{Circle, ContourSpec, VerticalLine, WeightSign};
pub use semantics::{ModelKind, ModelSemantics};
