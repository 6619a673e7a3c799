use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Field, FieldDescriptor, FieldError};

/// Exact arbitrary-precision rationals. `BigRational` keeps values reduced
/// with a positive denominator, which is the canonical form.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RationalField;

impl Field for RationalField {
    type Elem = BigRational;

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Rational
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_integer(&self, m: i128) -> BigRational {
        BigRational::from_integer(BigInt::from(m))
    }

    fn add(&self, x: &BigRational, y: &BigRational) -> BigRational {
        x + y
    }

    fn sub(&self, x: &BigRational, y: &BigRational) -> BigRational {
        x - y
    }

    fn mul(&self, x: &BigRational, y: &BigRational) -> BigRational {
        x * y
    }

    fn neg(&self, x: &BigRational) -> BigRational {
        -x
    }

    fn inverse(&self, x: &BigRational) -> Result<BigRational, FieldError> {
        if x.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(x.recip())
    }

    fn equals(&self, x: &BigRational, y: &BigRational) -> bool {
        x == y
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn roots_of_unity(&self, m: usize) -> Option<Vec<BigRational>> {
        match m {
            1 => Some(vec![self.one()]),
            2 => Some(vec![self.one(), -self.one()]),
            _ => None,
        }
    }

    /// `num/den`, or just `num` when the denominator is 1.
    fn encode(&self, x: &BigRational) -> String {
        x.to_string()
    }

    fn decode(&self, s: &str) -> Result<BigRational, FieldError> {
        let err = |reason: &str| FieldError::Parse {
            kind: "rational",
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
        let den: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
        if den.is_zero() {
            return Err(err("zero denominator"));
        }
        if !den.is_positive() {
            return Err(err("denominator must be positive"));
        }
        Ok(BigRational::new(num, den))
    }
}
