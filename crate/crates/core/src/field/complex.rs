use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{Field, FieldDescriptor, FieldError};

pub const DEFAULT_COMPLEX_TOLERANCE: f64 = 1e-9;

/// Complex doubles with relative equality
/// `|x - y| <= tol * max(1, |x|, |y|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexField {
    tolerance: f64,
}

impl ComplexField {
    pub fn new(tolerance: f64) -> Result<Self, FieldError> {
        if !(tolerance > 0.0 && tolerance < 1.0) {
            return Err(FieldError::BadTolerance(tolerance));
        }
        Ok(ComplexField { tolerance })
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

impl Default for ComplexField {
    fn default() -> Self {
        ComplexField {
            tolerance: DEFAULT_COMPLEX_TOLERANCE,
        }
    }
}

// -0.0 and 0.0 share one canonical form.
fn canon(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

impl Field for ComplexField {
    type Elem = Complex64;

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Complex {
            tolerance: self.tolerance,
        }
    }

    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn one(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn from_integer(&self, m: i128) -> Complex64 {
        Complex64::new(m as f64, 0.0)
    }

    fn add(&self, x: &Complex64, y: &Complex64) -> Complex64 {
        x + y
    }

    fn sub(&self, x: &Complex64, y: &Complex64) -> Complex64 {
        x - y
    }

    fn mul(&self, x: &Complex64, y: &Complex64) -> Complex64 {
        x * y
    }

    fn neg(&self, x: &Complex64) -> Complex64 {
        -x
    }

    fn inverse(&self, x: &Complex64) -> Result<Complex64, FieldError> {
        if x.re == 0.0 && x.im == 0.0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(x.inv())
    }

    fn equals(&self, x: &Complex64, y: &Complex64) -> bool {
        let scale = 1f64.max(x.norm()).max(y.norm());
        (x - y).norm() <= self.tolerance * scale
    }

    /// Near-singular when `|x| < tol * max |part|`.
    fn negligible(&self, x: &Complex64, parts: &[Complex64]) -> bool {
        let scale = parts.iter().map(|p| p.norm()).fold(0.0, f64::max);
        x.norm() < self.tolerance * scale || (x.re == 0.0 && x.im == 0.0)
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn roots_of_unity(&self, m: usize) -> Option<Vec<Complex64>> {
        if m == 0 {
            return None;
        }
        Some(
            (0..m)
                .map(|j| {
                    let theta = TAU * j as f64 / m as f64;
                    Complex64::new(theta.cos(), theta.sin())
                })
                .collect(),
        )
    }

    /// `re,im`, each in shortest round-trip decimal.
    fn encode(&self, x: &Complex64) -> String {
        format!("{},{}", canon(x.re), canon(x.im))
    }

    fn decode(&self, s: &str) -> Result<Complex64, FieldError> {
        let err = |reason: &str| FieldError::Parse {
            kind: "complex",
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (re, im) = s.trim().split_once(',').unwrap_or((s.trim(), "0"));
        let re: f64 = re.trim().parse().map_err(|_| err("bad real part"))?;
        let im: f64 = im.trim().parse().map_err(|_| err("bad imaginary part"))?;
        if !re.is_finite() || !im.is_finite() {
            return Err(err("components must be finite"));
        }
        Ok(Complex64::new(canon(re), canon(im)))
    }
}
