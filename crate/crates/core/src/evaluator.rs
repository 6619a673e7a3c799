//! Computes `a^n` as a ratio of two sums over precomputed nodes:
//!
//! ```text
//!   a^n = sum_j P_j^n C_j / (P_j - a)  /  sum_j C_j / (P_j - a)     (0 <= n < k)
//! ```
//!
//! Evaluation follows three steps: independent per-node summands, a
//! balanced binary reduction of each sum, and a single final division.

use num_rational::Rational64;
use rayon::prelude::*;
use thiserror::Error;

use crate::field::{Field, FieldError};
use crate::node_table::NodeTable;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    /// `node` is 1-based.
    #[error("base coincides with node {node}")]
    BaseCollidesWithNode { node: usize },
    #[error("exponent {n} is outside [0, {max}]")]
    ExponentOutOfRange { n: usize, max: usize },
    #[error("denominator sum is numerically singular")]
    NearSingularDenominator,
    #[error("denominator sum vanished")]
    ZeroDenominator,
    #[error("scale factor must be nonzero")]
    ZeroScale,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// How the summand and reduction steps are scheduled. Both produce
/// bit-identical results because the pairing order is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    #[default]
    Sequential,
    /// Runs on the current rayon pool.
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutcome<E> {
    pub value: E,
    pub numerator: E,
    pub denominator: E,
    pub numerator_summands: Vec<E>,
    pub denominator_summands: Vec<E>,
    pub reduction_depth: usize,
    pub division_count: usize,
}

/// Below this many terms a parallel reduction runs inline.
const PAR_SPLIT_MIN: usize = 512;

fn reduce_rec<F: Field>(field: &F, xs: &[F::Elem], parallel: bool) -> (F::Elem, usize) {
    let m = xs.len();
    if m == 1 {
        return (xs[0].clone(), 0);
    }
    let (left, right) = xs.split_at(m.div_ceil(2));
    let ((l, dl), (r, dr)) = if parallel && m >= PAR_SPLIT_MIN {
        rayon::join(
            || reduce_rec(field, left, true),
            || reduce_rec(field, right, true),
        )
    } else {
        (
            reduce_rec(field, left, false),
            reduce_rec(field, right, false),
        )
    };
    (field.add(&l, &r), dl.max(dr) + 1)
}

/// Balanced binary sum: the first `ceil(m/2)` terms are reduced against the
/// rest, recursively. Returns the sum and the instrumented tree depth,
/// which is `ceil(log2 m)`.
///
/// Panics on an empty slice.
pub fn tree_reduce<F: Field>(field: &F, xs: &[F::Elem]) -> (F::Elem, usize) {
    assert!(!xs.is_empty(), "tree_reduce needs at least one term");
    reduce_rec(field, xs, false)
}

/// Same pairing as [`tree_reduce`], with independent halves joined on the
/// rayon pool.
pub fn par_tree_reduce<F: Field>(field: &F, xs: &[F::Elem]) -> (F::Elem, usize) {
    assert!(!xs.is_empty(), "tree_reduce needs at least one term");
    reduce_rec(field, xs, true)
}

fn collision<F: Field>(field: &F, nodes: &[F::Elem], a: &F::Elem) -> Result<(), EvalError> {
    match nodes.iter().position(|p| field.equals(p, a)) {
        Some(j) => Err(EvalError::BaseCollidesWithNode { node: j + 1 }),
        None => Ok(()),
    }
}

/// `(P_j^n C_j / (P_j - a), C_j / (P_j - a))`
fn node_summand<F: Field>(
    field: &F,
    node: &F::Elem,
    node_power: &F::Elem,
    coeff: &F::Elem,
    a: &F::Elem,
) -> Result<(F::Elem, F::Elem), FieldError> {
    let den = field.mul(coeff, &field.inverse(&field.sub(node, a))?);
    let num = field.mul(node_power, &den);
    Ok((num, den))
}

fn ratio<F: Field>(
    field: &F,
    numerator_summands: Vec<F::Elem>,
    denominator_summands: Vec<F::Elem>,
    schedule: Schedule,
) -> Result<EvalOutcome<F::Elem>, EvalError> {
    let reduce = |xs: &[F::Elem]| match schedule {
        Schedule::Sequential => tree_reduce(field, xs),
        Schedule::Parallel => par_tree_reduce(field, xs),
    };
    let ((numerator, depth), (denominator, _)) = match schedule {
        Schedule::Sequential => (reduce(&numerator_summands), reduce(&denominator_summands)),
        Schedule::Parallel => rayon::join(
            || reduce(&numerator_summands),
            || reduce(&denominator_summands),
        ),
    };
    if field.negligible(&denominator, &denominator_summands) {
        return Err(if field.is_exact() {
            EvalError::ZeroDenominator
        } else {
            EvalError::NearSingularDenominator
        });
    }
    let value = field.div(&numerator, &denominator)?;
    Ok(EvalOutcome {
        value,
        numerator,
        denominator,
        numerator_summands,
        denominator_summands,
        reduction_depth: depth,
        division_count: 1,
    })
}

/// `a^n` for `0 <= n <= k-1`, single-threaded.
pub fn eval_power<F: Field>(
    table: &NodeTable<F>,
    a: &F::Elem,
    n: usize,
) -> Result<EvalOutcome<F::Elem>, EvalError> {
    eval_power_with(table, a, n, Schedule::Sequential)
}

pub fn eval_power_with<F: Field>(
    table: &NodeTable<F>,
    a: &F::Elem,
    n: usize,
    schedule: Schedule,
) -> Result<EvalOutcome<F::Elem>, EvalError> {
    let k = table.k();
    if n >= k {
        return Err(EvalError::ExponentOutOfRange { n, max: k - 1 });
    }
    let field = table.field();
    collision(field, table.nodes(), a)?;

    let summand = |j: usize| {
        node_summand(
            field,
            &table.nodes()[j],
            table.power(j, n),
            &table.coeffs()[j],
            a,
        )
    };
    let pairs: Vec<(F::Elem, F::Elem)> = match schedule {
        Schedule::Sequential => (0..k).map(summand).collect::<Result<_, _>>()?,
        Schedule::Parallel => (0..k)
            .into_par_iter()
            .map(summand)
            .collect::<Result<_, _>>()?,
    };
    let (num, den): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    ratio(field, num, den, schedule)
}

/// `a^(k-1)` over the shifted and scaled nodes `Q_j = alpha + beta * P_j`,
/// reusing the table's coefficients unchanged. Rescaling the nodes only
/// multiplies every `C_j` by `beta^(1-k)`, which cancels in the ratio.
pub fn eval_shifted<F: Field>(
    table: &NodeTable<F>,
    alpha: &F::Elem,
    beta: &F::Elem,
    a: &F::Elem,
) -> Result<F::Elem, EvalError> {
    let field = table.field();
    if field.is_zero(beta) {
        return Err(EvalError::ZeroScale);
    }
    let shifted: Vec<F::Elem> = table
        .nodes()
        .iter()
        .map(|p| field.add(alpha, &field.mul(beta, p)))
        .collect();
    collision(field, &shifted, a)?;
    let top = (table.k() - 1) as u64;
    let (num, den): (Vec<_>, Vec<_>) = shifted
        .iter()
        .zip(table.coeffs())
        .map(|(q, c)| node_summand(field, q, &field.pow(q, top), c, a))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .unzip();
    Ok(ratio(field, num, den, Schedule::Sequential)?.value)
}

/// Relative per-operation costs for the step model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub add: Rational64,
    pub mul: Rational64,
    pub div: Rational64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            add: Rational64::from_integer(1),
            mul: Rational64::from_integer(1),
            div: Rational64::from_integer(1),
        }
    }
}

/// Modeled operation counts for both methods. It reports, it does not rank.
#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub k: usize,
    pub n: u64,
    /// Per node: one subtraction, one inversion, two multiplications.
    pub vexp_local_ops: usize,
    pub vexp_reduction_depth: usize,
    pub vexp_divisions: usize,
    pub binexp_multiplications: u64,
    pub costs: CostModel,
    /// Critical path: local step, then `depth` additions, then one division.
    pub vexp_modeled_cost: Rational64,
    pub binexp_modeled_cost: Rational64,
}

pub const LOCAL_OPS_PER_NODE: usize = 4;

pub fn ceil_log2(m: usize) -> usize {
    if m <= 1 {
        0
    } else {
        (usize::BITS - (m - 1).leading_zeros()) as usize
    }
}

/// Squarings plus non-leading multiplications of left-to-right binary
/// exponentiation: `floor(log2 n) + popcount(n) - 1`.
pub fn binexp_multiplications(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    (63 - n.leading_zeros() as u64) + n.count_ones() as u64 - 1
}

pub fn cost_report(k: usize, n: u64, costs: CostModel) -> Result<CostReport, EvalError> {
    if k < 2 || n == 0 || n >= k as u64 {
        return Err(EvalError::ExponentOutOfRange {
            n: n as usize,
            max: k.saturating_sub(1),
        });
    }
    let depth = ceil_log2(k);
    let mults = binexp_multiplications(n);
    let local = costs.add + costs.div + costs.mul * 2;
    let vexp_modeled_cost = local + costs.add * depth as i64 + costs.div;
    let binexp_modeled_cost = costs.mul * mults as i64;
    Ok(CostReport {
        k,
        n,
        vexp_local_ops: LOCAL_OPS_PER_NODE,
        vexp_reduction_depth: depth,
        vexp_divisions: 1,
        binexp_multiplications: mults,
        costs,
        vexp_modeled_cost,
        binexp_modeled_cost,
    })
}
