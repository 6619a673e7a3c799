//! Specialised node choices: consecutive integers (binomial weights) and
//! roots of unity plus one extra node, together with the partial-fraction
//! and product identities for `a^m - 1`.

use thiserror::Error;

use crate::evaluator::tree_reduce;
use crate::field::{Field, FieldError};
use crate::node_table::{NodeTable, TableError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormError {
    /// `node` is 1-based.
    #[error("base coincides with node {node}")]
    BaseCollidesWithNode { node: usize },
    #[error("characteristic {p} is too small for {k} consecutive nodes")]
    CharacteristicTooSmall { p: u64, k: usize },
    #[error("need at least {min} nodes, got {got}")]
    OrderTooSmall { min: usize, got: usize },
    #[error("the field has no {m} distinct {m}-th roots of unity")]
    NoRootsOfUnity { m: usize },
    #[error("denominator sum is numerically singular")]
    NearSingularDenominator,
    #[error("a^m = 1: the base is a root of unity")]
    SingularInput,
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Sign attached to the binomial weight of node `j`. The two choices differ
/// by a global `(-1)^k` that cancels in the ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignConvention {
    /// `(-1)^j`
    #[default]
    Alternating,
    /// `(-1)^(k-j)`
    FromTop,
}

/// Row `r` of Pascal's triangle, built by additions inside the field.
fn binomial_row<F: Field>(field: &F, r: usize) -> Vec<F::Elem> {
    let mut row = vec![field.one()];
    for _ in 0..r {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(field.one());
        for w in row.windows(2) {
            next.push(field.add(&w[0], &w[1]));
        }
        next.push(field.one());
        row = next;
    }
    row
}

/// `a^(k-1)` with nodes `1..=k` and weights `(-1)^j binom(k-1, j-1)`.
pub fn binomial_form_eval<F: Field>(
    field: &F,
    k: usize,
    a: &F::Elem,
) -> Result<F::Elem, FormError> {
    binomial_form_eval_signed(field, k, a, SignConvention::Alternating)
}

pub fn binomial_form_eval_signed<F: Field>(
    field: &F,
    k: usize,
    a: &F::Elem,
    sign: SignConvention,
) -> Result<F::Elem, FormError> {
    if k < 2 {
        return Err(FormError::OrderTooSmall { min: 2, got: k });
    }
    let p = field.characteristic();
    if p != 0 && p <= k as u64 {
        return Err(FormError::CharacteristicTooSmall { p, k });
    }
    let nodes: Vec<F::Elem> = (1..=k).map(|j| field.from_integer(j as i128)).collect();
    if let Some(j) = nodes.iter().position(|x| field.equals(x, a)) {
        return Err(FormError::BaseCollidesWithNode { node: j + 1 });
    }
    let binom = binomial_row(field, k - 1);
    let top = (k - 1) as u64;
    let mut num = Vec::with_capacity(k);
    let mut den = Vec::with_capacity(k);
    for (idx, node) in nodes.iter().enumerate() {
        let j = idx + 1;
        let exponent = match sign {
            SignConvention::Alternating => j,
            SignConvention::FromTop => k - j,
        };
        let weight = if exponent % 2 == 0 {
            binom[idx].clone()
        } else {
            field.neg(&binom[idx])
        };
        let d = field.div(&weight, &field.sub(node, a))?;
        num.push(field.mul(&field.pow(node, top), &d));
        den.push(d);
    }
    let (n, _) = tree_reduce(field, &num);
    let (d, _) = tree_reduce(field, &den);
    if field.negligible(&d, &den) {
        return Err(FormError::NearSingularDenominator);
    }
    Ok(field.div(&n, &d)?)
}

/// The `m`-th roots of unity `e_1..e_m` plus one extra node, with the
/// coefficient table built over all `m + 1` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RootsOfUnityContext<F: Field> {
    m: usize,
    table: NodeTable<F>,
    /// `1 / prod_{j != i} (e_i - e_j)`
    pole_weights: Vec<F::Elem>,
}

impl<F: Field> RootsOfUnityContext<F> {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of nodes, `m + 1`.
    pub fn k(&self) -> usize {
        self.m + 1
    }

    pub fn roots(&self) -> &[F::Elem] {
        &self.table.nodes()[..self.m]
    }

    pub fn extra_node(&self) -> &F::Elem {
        &self.table.nodes()[self.m]
    }

    /// Coefficient of the extra node; `(-1)^k` when the extra node is zero.
    pub fn c_k(&self) -> &F::Elem {
        &self.table.coeffs()[self.m]
    }

    pub fn table(&self) -> &NodeTable<F> {
        &self.table
    }

    pub fn field(&self) -> &F {
        self.table.field()
    }

    fn root_index(&self, a: &F::Elem) -> Option<usize> {
        let field = self.field();
        self.roots().iter().position(|e| field.equals(e, a))
    }
}

/// Roots of unity of order `m` with the extra node fixed at zero.
pub fn make_roots_context<F: Field>(
    field: &F,
    m: usize,
) -> Result<RootsOfUnityContext<F>, FormError> {
    make_roots_context_with_extra(field, m, field.zero())
}

pub fn make_roots_context_with_extra<F: Field>(
    field: &F,
    m: usize,
    extra_node: F::Elem,
) -> Result<RootsOfUnityContext<F>, FormError> {
    if m == 0 {
        return Err(FormError::OrderTooSmall { min: 1, got: 0 });
    }
    let roots = field
        .roots_of_unity(m)
        .ok_or(FormError::NoRootsOfUnity { m })?;
    let pole_weights = (0..m)
        .map(|i| {
            let prod = roots
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(field.one(), |acc, (_, e)| {
                    field.mul(&acc, &field.sub(&roots[i], e))
                });
            field.inverse(&prod)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut nodes = roots;
    nodes.push(extra_node);
    let table = NodeTable::build(field.clone(), nodes)?;
    Ok(RootsOfUnityContext {
        m,
        table,
        pole_weights,
    })
}

/// `a^m - 1` from the roots-of-unity nodes.
///
/// With the extra node at zero this is `(-1)^k / sum_j e_j C_j / (e_j - a)`,
/// using `sum C_j = 0` to eliminate the extra node's term. For a nonzero
/// extra node `x` the general form `(-1)^m / ((x - a) * sum_j C_j / (P_j - a))`
/// is used instead.
pub fn roots_unity_eval<F: Field>(
    ctx: &RootsOfUnityContext<F>,
    a: &F::Elem,
) -> Result<F::Elem, FormError> {
    let field = ctx.field();
    if let Some(j) = ctx.root_index(a) {
        return Err(FormError::BaseCollidesWithNode { node: j + 1 });
    }
    let extra = ctx.extra_node();
    if field.equals(extra, a) {
        return Err(FormError::BaseCollidesWithNode { node: ctx.k() });
    }
    let coeffs = ctx.table.coeffs();
    let sign = |even: bool| {
        if even {
            field.one()
        } else {
            field.neg(&field.one())
        }
    };

    if field.is_zero(extra) {
        let terms = ctx
            .roots()
            .iter()
            .zip(coeffs)
            .map(|(e, c)| field.div(&field.mul(e, c), &field.sub(e, a)))
            .collect::<Result<Vec<_>, _>>()?;
        let (s, _) = tree_reduce(field, &terms);
        if field.negligible(&s, &terms) {
            return Err(FormError::NearSingularDenominator);
        }
        Ok(field.div(&sign(ctx.k() % 2 == 0), &s)?)
    } else {
        let terms = ctx
            .table
            .nodes()
            .iter()
            .zip(coeffs)
            .map(|(p, c)| field.div(c, &field.sub(p, a)))
            .collect::<Result<Vec<_>, _>>()?;
        let (d, _) = tree_reduce(field, &terms);
        if field.negligible(&d, &terms) {
            return Err(FormError::NearSingularDenominator);
        }
        let scaled = field.mul(&field.sub(extra, a), &d);
        Ok(field.div(&sign(ctx.m % 2 == 0), &scaled)?)
    }
}

/// `1 / (a^m - 1)` as a sum of simple poles at the roots of unity.
pub fn partial_fraction_eval<F: Field>(
    ctx: &RootsOfUnityContext<F>,
    a: &F::Elem,
) -> Result<F::Elem, FormError> {
    let field = ctx.field();
    if ctx.root_index(a).is_some() {
        return Err(FormError::SingularInput);
    }
    let terms = ctx
        .roots()
        .iter()
        .zip(&ctx.pole_weights)
        .map(|(e, w)| field.div(w, &field.sub(a, e)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(tree_reduce(field, &terms).0)
}

/// `prod_i (a - e_i)`, which equals `a^m - 1`.
pub fn product_form_eval<F: Field>(ctx: &RootsOfUnityContext<F>, a: &F::Elem) -> F::Elem {
    let field = ctx.field();
    ctx.roots()
        .iter()
        .fold(field.one(), |acc, e| field.mul(&acc, &field.sub(a, e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ComplexField, PrimeField, RationalField};
    use num_complex::Complex64;
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn binomial_examples() {
        let f = RationalField;
        assert_eq!(binomial_row(&f, 2), vec![q(1), q(2), q(1)]);
        assert_eq!(binomial_form_eval(&f, 3, &q(5)).unwrap(), q(25));
        assert_eq!(binomial_form_eval(&f, 2, &q(7)).unwrap(), q(7));
        assert_eq!(
            binomial_form_eval(&f, 3, &q(2)).unwrap_err(),
            FormError::BaseCollidesWithNode { node: 2 }
        );
        let z5 = PrimeField::new(5).unwrap();
        assert_eq!(
            binomial_form_eval(&z5, 6, &2).unwrap_err(),
            FormError::CharacteristicTooSmall { p: 5, k: 6 }
        );
        // p = 7 > k = 6: nodes 1..6 distinct, 5! invertible
        let z7 = PrimeField::new(7).unwrap();
        assert_eq!(binomial_form_eval(&z7, 6, &0).unwrap(), 0);
    }

    #[test]
    fn binomial_sign_conventions_agree() {
        let f = RationalField;
        for k in 2..=9 {
            let a = BigRational::new((-7).into(), 3.into());
            assert_eq!(
                binomial_form_eval_signed(&f, k, &a, SignConvention::Alternating).unwrap(),
                binomial_form_eval_signed(&f, k, &a, SignConvention::FromTop).unwrap(),
            );
        }
    }

    #[test]
    fn roots_context_examples() {
        let c = ComplexField::default();
        let ctx = make_roots_context(&c, 2).unwrap();
        assert!(c.equals(&ctx.roots()[0], &c.one()));
        assert!(c.equals(&ctx.roots()[1], &c.from_integer(-1)));

        let z7 = PrimeField::new(7).unwrap();
        let ctx = make_roots_context(&z7, 3).unwrap();
        let mut roots = ctx.roots().to_vec();
        roots.sort();
        assert_eq!(roots, vec![1, 2, 4]);
        // k = 4
        assert_eq!(*ctx.c_k(), 1);
        assert_eq!(
            make_roots_context(&z7, 5).unwrap_err(),
            FormError::NoRootsOfUnity { m: 5 }
        );
    }

    #[test]
    fn extra_node_coefficient_sign() {
        let z13 = PrimeField::new(13).unwrap();
        for m in [1, 2, 3, 4, 6, 12] {
            let ctx = make_roots_context(&z13, m).unwrap();
            let expected = if (m + 1) % 2 == 0 { 1 } else { 12 };
            assert_eq!(*ctx.c_k(), expected, "m = {m}");
        }
    }

    #[test]
    fn roots_eval_examples() {
        let c = ComplexField::default();
        let ctx = make_roots_context(&c, 2).unwrap();
        let v = roots_unity_eval(&ctx, &Complex64::new(3.0, 0.0)).unwrap();
        assert!((v - Complex64::new(8.0, 0.0)).norm() <= 1e-9 * 8.0);

        let z7 = PrimeField::new(7).unwrap();
        let ctx = make_roots_context(&z7, 3).unwrap();
        assert_eq!(roots_unity_eval(&ctx, &3).unwrap(), 5);
        assert_eq!(z7.sub(&z7.pow(&3, 3), &1), 5);
        let root = ctx.roots()[1];
        assert_eq!(
            roots_unity_eval(&ctx, &root).unwrap_err(),
            FormError::BaseCollidesWithNode { node: 2 }
        );
        assert_eq!(
            roots_unity_eval(&ctx, &0).unwrap_err(),
            FormError::BaseCollidesWithNode { node: 4 }
        );
    }

    #[test]
    fn nonzero_extra_node() {
        let z13 = PrimeField::new(13).unwrap();
        let ctx = make_roots_context_with_extra(&z13, 4, 7).unwrap();
        for a in [0u64, 2, 3, 6, 9, 11] {
            let want = z13.sub(&z13.pow(&a, 4), &1);
            assert_eq!(roots_unity_eval(&ctx, &a).unwrap(), want, "a = {a}");
        }
        // 5 is a 4th root of unity mod 13
        assert!(matches!(
            make_roots_context_with_extra(&z13, 4, 5),
            Err(FormError::Table(TableError::DuplicateNodes { .. }))
        ));
    }

    #[test]
    fn partial_fraction_examples() {
        let c = ComplexField::default();
        let ctx = make_roots_context(&c, 2).unwrap();
        let v = partial_fraction_eval(&ctx, &Complex64::new(3.0, 0.0)).unwrap();
        assert!((v - Complex64::new(0.125, 0.0)).norm() <= 1e-12);
        assert_eq!(
            partial_fraction_eval(&ctx, &Complex64::new(1.0, 0.0)).unwrap_err(),
            FormError::SingularInput
        );

        let z7 = PrimeField::new(7).unwrap();
        let ctx = make_roots_context(&z7, 3).unwrap();
        assert_eq!(
            partial_fraction_eval(&ctx, &3).unwrap(),
            z7.inverse(&5).unwrap()
        );
        assert_eq!(partial_fraction_eval(&ctx, &3).unwrap(), 3);
    }

    #[test]
    fn product_form_examples() {
        let c = ComplexField::default();
        let ctx = make_roots_context(&c, 2).unwrap();
        let v = product_form_eval(&ctx, &Complex64::new(3.0, 0.0));
        assert!(c.equals(&v, &c.from_integer(8)));

        let z7 = PrimeField::new(7).unwrap();
        let ctx = make_roots_context(&z7, 3).unwrap();
        assert_eq!(product_form_eval(&ctx, &3), 5);
        let e1 = ctx.roots()[0];
        assert_eq!(product_form_eval(&ctx, &e1), 0);
    }
}
