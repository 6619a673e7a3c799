//! Precomputed node data: nodes `P_j`, coefficients
//! `C_j = 1 / prod_{i != j} (P_i - P_j)` and the power grid `P_j^n`.

use thiserror::Error;

use crate::determinant::{det, minor, vandermonde_matrix};
use crate::field::{Field, FieldError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("a node table needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    /// 1-based positions of the colliding nodes.
    #[error("nodes {first} and {second} coincide")]
    DuplicateNodes { first: usize, second: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("malformed table file at line {line}: {message}")]
    MalformedTableFile { line: usize, message: String },
    #[error("table invariant violated: {0}")]
    InvariantViolation(String),
}

/// Returns the first colliding pair (1-based), if any.
pub fn find_duplicate<F: Field>(field: &F, nodes: &[F::Elem]) -> Option<(usize, usize)> {
    for j in 0..nodes.len() {
        for i in 0..j {
            if field.equals(&nodes[i], &nodes[j]) {
                return Some((i + 1, j + 1));
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeTable<F: Field> {
    field: F,
    nodes: Vec<F::Elem>,
    coeffs: Vec<F::Elem>,
    /// `powers[j][n] = P_j^n` for `0 <= n < k`.
    powers: Vec<Vec<F::Elem>>,
}

impl<F: Field> NodeTable<F> {
    pub fn build(field: F, nodes: Vec<F::Elem>) -> Result<Self, TableError> {
        if nodes.len() < 2 {
            return Err(TableError::TooFewNodes(nodes.len()));
        }
        if let Some((first, second)) = find_duplicate(&field, &nodes) {
            return Err(TableError::DuplicateNodes { first, second });
        }
        let coeffs = nodes
            .iter()
            .enumerate()
            .map(|(j, _)| field.inverse(&difference_product(&field, &nodes, j)))
            .collect::<Result<Vec<_>, _>>()?;
        let powers = power_grid(&field, &nodes);
        Ok(NodeTable {
            field,
            nodes,
            coeffs,
            powers,
        })
    }

    /// Assembles a table from stored nodes and coefficients, re-checking
    /// distinctness and `C_j * prod_{i != j}(P_i - P_j) = 1` for every `j`.
    pub fn from_parts(
        field: F,
        nodes: Vec<F::Elem>,
        coeffs: Vec<F::Elem>,
    ) -> Result<Self, TableError> {
        if nodes.len() < 2 {
            return Err(TableError::TooFewNodes(nodes.len()));
        }
        if coeffs.len() != nodes.len() {
            return Err(TableError::InvariantViolation(format!(
                "{} nodes but {} coefficients",
                nodes.len(),
                coeffs.len()
            )));
        }
        if let Some((first, second)) = find_duplicate(&field, &nodes) {
            return Err(TableError::InvariantViolation(format!(
                "nodes {first} and {second} coincide"
            )));
        }
        for (j, c) in coeffs.iter().enumerate() {
            let check = field.mul(c, &difference_product(&field, &nodes, j));
            if !field.equals(&check, &field.one()) {
                return Err(TableError::InvariantViolation(format!(
                    "coefficient {} is {} but the nodes require {}",
                    j + 1,
                    field.encode(c),
                    field.encode(&field.inverse(&difference_product(&field, &nodes, j))?),
                )));
            }
        }
        let powers = power_grid(&field, &nodes);
        Ok(NodeTable {
            field,
            nodes,
            coeffs,
            powers,
        })
    }

    /// Copy with coefficient `j` replaced, skipping every invariant check.
    /// Used for fault injection.
    pub(crate) fn with_coeff_unchecked(&self, j: usize, c: F::Elem) -> Self {
        let mut t = self.clone();
        t.coeffs[j] = c;
        t
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[F::Elem] {
        &self.nodes
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn powers(&self) -> &[Vec<F::Elem>] {
        &self.powers
    }

    pub fn power(&self, j: usize, n: usize) -> &F::Elem {
        &self.powers[j][n]
    }
}

/// `prod_{i != j} (P_i - P_j)`.
pub fn difference_product<F: Field>(field: &F, nodes: &[F::Elem], j: usize) -> F::Elem {
    nodes
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j)
        .fold(field.one(), |acc, (_, p)| {
            field.mul(&acc, &field.sub(p, &nodes[j]))
        })
}

fn power_grid<F: Field>(field: &F, nodes: &[F::Elem]) -> Vec<Vec<F::Elem>> {
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

/// `prod_{i<j} (P_j - P_i)`; zero exactly when two nodes coincide.
pub fn vandermonde_det<F: Field>(field: &F, nodes: &[F::Elem]) -> F::Elem {
    let mut acc = field.one();
    for j in 0..nodes.len() {
        for i in 0..j {
            acc = field.mul(&acc, &field.sub(&nodes[j], &nodes[i]));
        }
    }
    acc
}

/// Signed cofactor of entry `(j, k)` of the Vandermonde matrix (last
/// column), by brute-force determinant of the minor. `j` is 0-based.
pub fn cofactor_column_k<F: Field>(field: &F, nodes: &[F::Elem], j: usize) -> F::Elem {
    let k = nodes.len();
    assert!(j < k, "row index {j} out of range for {k} nodes");
    let v = vandermonde_matrix(field, nodes);
    let m = det(field, &minor(&v, j, k - 1));
    // 1-based sign (-1)^((j+1) + k)
    if (j + 1 + k) % 2 == 0 {
        m
    } else {
        field.neg(&m)
    }
}
