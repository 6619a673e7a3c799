//! Field backends.
//!
//! Every identity in this crate is written against the [`Field`] trait so it
//! can be checked exactly (prime fields, rationals) and in floating point
//! (complex doubles) with the same code path.

mod complex;
mod primality;
mod prime;
mod rational;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use complex::{ComplexField, DEFAULT_COMPLEX_TOLERANCE};
pub use primality::is_prime;
pub use prime::{PrimeField, MAX_MODULUS};
pub use rational::RationalField;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not a prime >= 3")]
    CompositeModulus(u64),
    #[error("modulus {0} is not below 2^62")]
    ModulusTooLarge(u64),
    #[error("complex tolerance {0} must lie strictly between 0 and 1")]
    BadTolerance(f64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {input:?} as a {kind} element: {reason}")]
    Parse {
        kind: &'static str,
        input: String,
        reason: String,
    },
    #[error("cannot parse field descriptor {0:?}")]
    BadDescriptor(String),
}

/// Which field a table or computation lives in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldDescriptor {
    Prime {
        p: u64,
    },
    Rational,
    /// Relative equality tolerance, strictly inside (0, 1).
    Complex {
        tolerance: f64,
    },
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Prime { p } => write!(f, "prime:{p}"),
            FieldDescriptor::Rational => f.write_str("rational"),
            FieldDescriptor::Complex { tolerance } => write!(f, "complex:{tolerance:e}"),
        }
    }
}

impl FromStr for FieldDescriptor {
    type Err = FieldError;

    /// Accepts `prime:<p>`, `rational`, `complex` or `complex:<tolerance>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FieldError::BadDescriptor(s.to_string());
        let (kind, param) = match s.split_once(':') {
            Some((kind, param)) => (kind, Some(param)),
            None => (s, None),
        };
        match (kind, param) {
            ("prime", Some(p)) => Ok(FieldDescriptor::Prime {
                p: p.parse().map_err(|_| bad())?,
            }),
            ("rational", None) => Ok(FieldDescriptor::Rational),
            ("complex", None) => Ok(FieldDescriptor::Complex {
                tolerance: DEFAULT_COMPLEX_TOLERANCE,
            }),
            ("complex", Some(t)) => Ok(FieldDescriptor::Complex {
                tolerance: t.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

/// Arithmetic over one field. Elements are plain values; the field object
/// carries whatever parameters (modulus, tolerance) the operations need.
pub trait Field: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn descriptor(&self) -> FieldDescriptor;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Image of an integer under the canonical ring map Z -> F.
    fn from_integer(&self, m: i128) -> Self::Elem;

    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn neg(&self, x: &Self::Elem) -> Self::Elem;
    fn inverse(&self, x: &Self::Elem) -> Result<Self::Elem, FieldError>;

    /// Field equality. Exact for prime and rational backends, relative
    /// tolerance for complex.
    fn equals(&self, x: &Self::Elem, y: &Self::Elem) -> bool;

    /// Whether `x` should be treated as zero when it arose as a sum of
    /// `parts`. Exact backends ignore `parts`.
    fn negligible(&self, x: &Self::Elem, _parts: &[Self::Elem]) -> bool {
        self.is_zero(x)
    }

    fn is_exact(&self) -> bool {
        true
    }

    /// 0 for characteristic-zero fields.
    fn characteristic(&self) -> u64;

    /// All `m`-th roots of unity, or `None` when the field lacks `m` of them.
    fn roots_of_unity(&self, m: usize) -> Option<Vec<Self::Elem>>;

    fn encode(&self, x: &Self::Elem) -> String;
    fn decode(&self, s: &str) -> Result<Self::Elem, FieldError>;

    fn is_zero(&self, x: &Self::Elem) -> bool {
        self.equals(x, &self.zero())
    }

    fn div(&self, x: &Self::Elem, y: &Self::Elem) -> Result<Self::Elem, FieldError> {
        Ok(self.mul(x, &self.inverse(y)?))
    }

    /// Square-and-multiply. Used as the reference answer for every
    /// exponentiation identity; `0^0 = 1`.
    fn pow(&self, a: &Self::Elem, n: u64) -> Self::Elem {
        let mut result = self.one();
        let mut base = a.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    /// Left-to-right sequential sum.
    fn sum<'a, I>(&self, xs: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        xs.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    fn product<'a, I>(&self, xs: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        xs.into_iter().fold(self.one(), |acc, x| self.mul(&acc, x))
    }
}

/// A field chosen at runtime from a [`FieldDescriptor`].
#[derive(Debug, Clone)]
pub enum AnyField {
    Prime(PrimeField),
    Rational(RationalField),
    Complex(ComplexField),
}

impl AnyField {
    pub fn descriptor(&self) -> FieldDescriptor {
        match self {
            AnyField::Prime(f) => f.descriptor(),
            AnyField::Rational(f) => f.descriptor(),
            AnyField::Complex(f) => f.descriptor(),
        }
    }
}

/// Validates a descriptor and returns the matching backend.
pub fn make_field(descriptor: FieldDescriptor) -> Result<AnyField, FieldError> {
    match descriptor {
        FieldDescriptor::Prime { p } => PrimeField::new(p).map(AnyField::Prime),
        FieldDescriptor::Rational => Ok(AnyField::Rational(RationalField)),
        FieldDescriptor::Complex { tolerance } => {
            ComplexField::new(tolerance).map(AnyField::Complex)
        }
    }
}
