//! Brute-force determinants. These never use the Vandermonde product
//! formula, so they can serve as oracles for it.

use crate::field::Field;

/// Row-major square matrix.
pub type Matrix<E> = Vec<Vec<E>>;

/// Row `j` is `[1, P_j, P_j^2, ..., P_j^(k-1)]`.
pub fn vandermonde_matrix<F: Field>(field: &F, nodes: &[F::Elem]) -> Matrix<F::Elem> {
    let k = nodes.len();
    nodes
        .iter()
        .map(|p| {
            let mut row = Vec::with_capacity(k);
            let mut acc = field.one();
            for _ in 0..k {
                row.push(acc.clone());
                acc = field.mul(&acc, p);
            }
            row
        })
        .collect()
}

/// Matrix with row `row` and column `col` deleted.
pub fn minor<E: Clone>(m: &[Vec<E>], row: usize, col: usize) -> Matrix<E> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

/// Laplace expansion along the first row. Exponential cost; meant for n <= 4.
pub fn det_cofactor<F: Field>(field: &F, m: &[Vec<F::Elem>]) -> F::Elem {
    let n = m.len();
    match n {
        0 => field.one(),
        1 => m[0][0].clone(),
        2 => field.sub(
            &field.mul(&m[0][0], &m[1][1]),
            &field.mul(&m[0][1], &m[1][0]),
        ),
        _ => {
            let mut acc = field.zero();
            for col in 0..n {
                let term = field.mul(&m[0][col], &det_cofactor(field, &minor(m, 0, col)));
                acc = if col % 2 == 0 {
                    field.add(&acc, &term)
                } else {
                    field.sub(&acc, &term)
                };
            }
            acc
        }
    }
}

/// Fraction-free (Bareiss) elimination with row pivoting.
pub fn det_bareiss<F: Field>(field: &F, m: &[Vec<F::Elem>]) -> F::Elem {
    let n = m.len();
    if n == 0 {
        return field.one();
    }
    let mut a: Matrix<F::Elem> = m.to_vec();
    let mut prev = field.one();
    let mut negate = false;
    for k in 0..n - 1 {
        let Some(pivot) = (k..n).find(|&r| !field.is_zero(&a[r][k])) else {
            return field.zero();
        };
        if pivot != k {
            a.swap(pivot, k);
            negate = !negate;
        }
        let prev_inv = field
            .inverse(&prev)
            .expect("Bareiss pivots are nonzero by construction");
        for i in k + 1..n {
            for j in k + 1..n {
                let cross = field.sub(
                    &field.mul(&a[i][j], &a[k][k]),
                    &field.mul(&a[i][k], &a[k][j]),
                );
                a[i][j] = field.mul(&cross, &prev_inv);
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        field.neg(&d)
    } else {
        d
    }
}

/// Cofactor expansion up to 4x4, Bareiss above.
pub fn det<F: Field>(field: &F, m: &[Vec<F::Elem>]) -> F::Elem {
    if m.len() <= 4 {
        det_cofactor(field, m)
    } else {
        det_bareiss(field, m)
    }
}
