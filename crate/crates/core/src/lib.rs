//! Exact symbolic engine for affine connections: tensor calculus, affine
//! Szabo operators and their characteristic polynomials, the locally
//! homogeneous Type A / Type B surface families, and (twisted) Riemannian
//! extensions on the cotangent bundle.

pub mod error;
pub mod extension;
pub mod homogeneous;
pub mod symexpr;
pub mod szabo;
pub mod tensorcalc;

pub use error::{ExprError, GeometryError, GeometryResult};
pub use symexpr::{format_expr, parse_expr, Poly, RatFn, Rational, VarId, VarKind, VarTable};
pub use szabo::{CharPolyCoeffs, SzaboMatrix};
pub use tensorcalc::{Connection, TensorField};
