//! Line-oriented text format for node tables.
//!
//! ```text
//! vexp-table v1
//! field prime 7
//! k 3
//! node 1
//! node 2
//! node 3
//! coeff 4
//! coeff 6
//! coeff 4
//! ```
//!
//! The power grid is not stored; it is rebuilt on load, and every table
//! invariant is re-verified.

use crate::field::{
    make_field, AnyField, ComplexField, Field, FieldDescriptor, PrimeField, RationalField,
};
use crate::node_table::{NodeTable, TableError};

pub const HEADER: &str = "vexp-table v1";

/// A table whose field was only known at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyTable {
    Prime(NodeTable<PrimeField>),
    Rational(NodeTable<RationalField>),
    Complex(NodeTable<ComplexField>),
}

impl AnyTable {
    pub fn k(&self) -> usize {
        match self {
            AnyTable::Prime(t) => t.k(),
            AnyTable::Rational(t) => t.k(),
            AnyTable::Complex(t) => t.k(),
        }
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        match self {
            AnyTable::Prime(t) => t.field().descriptor(),
            AnyTable::Rational(t) => t.field().descriptor(),
            AnyTable::Complex(t) => t.field().descriptor(),
        }
    }

    pub fn serialize(&self) -> String {
        match self {
            AnyTable::Prime(t) => serialize_table(t),
            AnyTable::Rational(t) => serialize_table(t),
            AnyTable::Complex(t) => serialize_table(t),
        }
    }
}

impl From<NodeTable<PrimeField>> for AnyTable {
    fn from(t: NodeTable<PrimeField>) -> Self {
        AnyTable::Prime(t)
    }
}

impl From<NodeTable<RationalField>> for AnyTable {
    fn from(t: NodeTable<RationalField>) -> Self {
        AnyTable::Rational(t)
    }
}

impl From<NodeTable<ComplexField>> for AnyTable {
    fn from(t: NodeTable<ComplexField>) -> Self {
        AnyTable::Complex(t)
    }
}

fn field_line(d: FieldDescriptor) -> String {
    match d {
        FieldDescriptor::Prime { p } => format!("field prime {p}"),
        FieldDescriptor::Rational => "field rational".to_string(),
        FieldDescriptor::Complex { tolerance } => format!("field complex {tolerance:e}"),
    }
}

pub fn serialize_table<F: Field>(t: &NodeTable<F>) -> String {
    let field = t.field();
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    out.push_str(&field_line(field.descriptor()));
    out.push('\n');
    out.push_str(&format!("k {}\n", t.k()));
    for p in t.nodes() {
        out.push_str(&format!("node {}\n", field.encode(p)));
    }
    for c in t.coeffs() {
        out.push_str(&format!("coeff {}\n", field.encode(c)));
    }
    out
}

fn malformed(line: usize, message: impl Into<String>) -> TableError {
    TableError::MalformedTableFile {
        line,
        message: message.into(),
    }
}

struct RawTable<'a> {
    descriptor: FieldDescriptor,
    /// (line number, canonical text)
    nodes: Vec<(usize, &'a str)>,
    coeffs: Vec<(usize, &'a str)>,
}

fn parse_field_line(line_no: usize, rest: &str) -> Result<FieldDescriptor, TableError> {
    let words: Vec<&str> = rest.split_whitespace().collect();
    match words.as_slice() {
        ["prime", p] => p
            .parse()
            .map(|p| FieldDescriptor::Prime { p })
            .map_err(|_| malformed(line_no, format!("bad modulus {p:?}"))),
        ["rational"] => Ok(FieldDescriptor::Rational),
        ["complex"] => Ok(FieldDescriptor::Complex {
            tolerance: crate::field::DEFAULT_COMPLEX_TOLERANCE,
        }),
        ["complex", tol] => tol
            .parse()
            .map(|tolerance| FieldDescriptor::Complex { tolerance })
            .map_err(|_| malformed(line_no, format!("bad tolerance {tol:?}"))),
        _ => Err(malformed(line_no, format!("unknown field spec {rest:?}"))),
    }
}

fn split_raw(text: &str) -> Result<RawTable<'_>, TableError> {
    let eof_line = text.lines().count() + 1;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| malformed(eof_line, format!("unexpected end of file, expected {what}")))
    };

    let (n, header) = next("header")?;
    if header.trim_end() != HEADER {
        return Err(malformed(n, format!("expected header {HEADER:?}")));
    }
    let (n, field) = next("field line")?;
    let rest = field
        .strip_prefix("field ")
        .ok_or_else(|| malformed(n, "expected `field <kind> [param]`"))?;
    let descriptor = parse_field_line(n, rest)?;

    let (n, kline) = next("k line")?;
    let k: usize = kline
        .strip_prefix("k ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| malformed(n, "expected `k <int>`"))?;

    let mut take = |tag: &str| -> Result<Vec<(usize, &str)>, TableError> {
        (0..k)
            .map(|_| {
                let (n, l) = next(tag)?;
                l.strip_prefix(tag)
                    .and_then(|s| s.strip_prefix(' '))
                    .map(|s| (n, s.trim()))
                    .ok_or_else(|| malformed(n, format!("expected `{tag} <value>`")))
            })
            .collect()
    };
    let nodes = take("node")?;
    let coeffs = take("coeff")?;

    for (n, l) in lines {
        if !l.trim().is_empty() {
            return Err(malformed(n, "trailing content after coefficients"));
        }
    }
    Ok(RawTable {
        descriptor,
        nodes,
        coeffs,
    })
}

fn decode_typed<F: Field>(field: F, raw: &RawTable<'_>) -> Result<NodeTable<F>, TableError> {
    let decode = |items: &[(usize, &str)]| -> Result<Vec<F::Elem>, TableError> {
        items
            .iter()
            .map(|(n, s)| field.decode(s).map_err(|e| malformed(*n, e.to_string())))
            .collect()
    };
    let nodes = decode(&raw.nodes)?;
    let coeffs = decode(&raw.coeffs)?;
    NodeTable::from_parts(field, nodes, coeffs)
}

/// Parses a table file and re-verifies all invariants.
pub fn deserialize_table(text: &str) -> Result<AnyTable, TableError> {
    let raw = split_raw(text)?;
    match make_field(raw.descriptor).map_err(|e| malformed(2, e.to_string()))? {
        AnyField::Prime(f) => decode_typed(f, &raw).map(AnyTable::Prime),
        AnyField::Rational(f) => decode_typed(f, &raw).map(AnyTable::Rational),
        AnyField::Complex(f) => decode_typed(f, &raw).map(AnyTable::Complex),
    }
}
