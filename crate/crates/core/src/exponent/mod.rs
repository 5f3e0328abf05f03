//! Exact exponent calculus: bounds written as maxima of monomials in
//! x, D, E, H, K, L, X, M, N with rational exponents.
//!
//! Expressions are parsed from text such as `x^{1/6}*D^{329/570}` or
//! `(x^2 D^7)^{1/12}`; comma-separated terms form a [`BoundExpr`]. Exponents
//! are written `^{p/q}` or `^n`, and `x^{eps}` marks an ε factor.

mod calc;
mod monomial;
mod rational;

pub use calc::{
    affine_in, balance_two_terms, dominance_check, floor_pipeline, lwy_first_term, max_over_interval,
    minimax_balance, side_condition_holds, side_condition_threshold, substitute, type_one_balanced,
    type_one_bound, type_two_terms, Affine, Balance, BalanceOutcome, Dominance, FloorPipeline, ParamRange,
    TwoTermBalance, TypeOneBalance,
};
pub use monomial::{check_variable, BoundExpr, ExponentPair, Monomial, VARIABLES};
pub use rational::Rational;
