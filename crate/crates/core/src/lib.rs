//! Exponentiation from precomputed Vandermonde cofactor sums.
//!
//! For pairwise distinct nodes `P_1..P_k` with coefficients
//! `C_j = 1 / prod_{i != j} (P_i - P_j)`, every base `a` outside the node
//! set satisfies
//!
//! ```text
//!   a^n = [sum_j P_j^n C_j / (P_j - a)] / [sum_j C_j / (P_j - a)],   0 <= n < k.
//! ```
//!
//! The coefficients and node powers do not depend on `a`, so they are
//! computed once ([`node_table`]); each evaluation is then `k` independent
//! summands, two balanced reductions and one division ([`evaluator`]).

pub mod determinant;
pub mod evaluator;
pub mod field;
pub mod node_table;
pub mod special_forms;
pub mod table_file;
pub mod verification;

pub use evaluator::{
    cost_report, eval_power, eval_power_with, eval_shifted, par_tree_reduce, tree_reduce,
    CostModel, CostReport, EvalError, EvalOutcome, Schedule,
};
pub use field::{
    make_field, AnyField, ComplexField, Field, FieldDescriptor, FieldError, PrimeField,
    RationalField,
};
pub use node_table::{cofactor_column_k, vandermonde_det, NodeTable, TableError};
pub use special_forms::{
    binomial_form_eval, make_roots_context, partial_fraction_eval, product_form_eval,
    roots_unity_eval, FormError, RootsOfUnityContext,
};
pub use table_file::{deserialize_table, serialize_table, AnyTable};
