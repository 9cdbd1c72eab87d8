//! Exact scalar, polynomial, series and linear-algebra kernels.

pub mod bipoly;
pub mod interp;
pub mod linalg;
pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod registry;
pub mod ring;
pub mod series;

pub use bipoly::BiPoly;
pub use interp::{interpolate_weighted_poly, weighted_monomials, WeightedInterpolator};
pub use linalg::{rank_rational, solve_linear_exact, LinearSolution, RationalOperator};
pub use poly::{poly_eval_subst, Monomial, MultiPoly};
pub use ratfunc::RationalFunction;
pub use rational::{format_rational, int, parse_rational, rat, Rational};
pub use registry::{VarKind, VarRegistry};
pub use ring::{Field, FractionField, IntegralDomain, Ring};
pub use series::{series_implicit_solve, TruncatedSeries};
