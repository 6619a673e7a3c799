use super::primality::is_prime;
use super::{Field, FieldDescriptor, FieldError};

/// Moduli must stay below this bound so that products fit in `u128`.
pub const MAX_MODULUS: u64 = 1 << 62;

/// The prime field Z/pZ. Elements are residues in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= MAX_MODULUS {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if p < 3 || !is_prime(p) {
            return Err(FieldError::CompositeModulus(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Extended Euclid on (x, p); returns the Bezout coefficient of x.
    fn ext_gcd_inverse(&self, x: u64) -> Option<u64> {
        let (mut r0, mut r1) = (self.p as i128, x as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        if r0 != 1 {
            return None;
        }
        Some(t0.rem_euclid(self.p as i128) as u64)
    }
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Field for PrimeField {
    type Elem = u64;

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Prime { p: self.p }
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn from_integer(&self, m: i128) -> u64 {
        m.rem_euclid(self.p as i128) as u64
    }

    fn add(&self, x: &u64, y: &u64) -> u64 {
        let s = x + y;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn sub(&self, x: &u64, y: &u64) -> u64 {
        if x >= y {
            x - y
        } else {
            x + self.p - y
        }
    }

    fn mul(&self, x: &u64, y: &u64) -> u64 {
        ((*x as u128 * *y as u128) % self.p as u128) as u64
    }

    fn neg(&self, x: &u64) -> u64 {
        if *x == 0 {
            0
        } else {
            self.p - x
        }
    }

    fn inverse(&self, x: &u64) -> Result<u64, FieldError> {
        if *x == 0 {
            return Err(FieldError::DivisionByZero);
        }
        self.ext_gcd_inverse(*x).ok_or(FieldError::DivisionByZero)
    }

    fn equals(&self, x: &u64, y: &u64) -> bool {
        x == y
    }

    fn characteristic(&self) -> u64 {
        self.p
    }

    /// Finds an element of exact order `m` by raising 2, 3, 4, ... to the
    /// power (p-1)/m and testing against every prime factor of `m`.
    fn roots_of_unity(&self, m: usize) -> Option<Vec<u64>> {
        let m64 = m as u64;
        if m == 0 || (self.p - 1) % m64 != 0 {
            return None;
        }
        let cofactor = (self.p - 1) / m64;
        let factors = distinct_prime_factors(m64);
        let generator = (2..self.p).find_map(|x| {
            let y = self.pow(&x, cofactor);
            factors
                .iter()
                .all(|q| self.pow(&y, m64 / q) != 1)
                .then_some(y)
        })?;
        let mut roots = Vec::with_capacity(m);
        let mut acc = 1;
        for _ in 0..m {
            roots.push(acc);
            acc = self.mul(&acc, &generator);
        }
        Some(roots)
    }

    fn encode(&self, x: &u64) -> String {
        x.to_string()
    }

    fn decode(&self, s: &str) -> Result<u64, FieldError> {
        let err = |reason: &str| FieldError::Parse {
            kind: "prime-field",
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let v: u64 = s.trim().parse().map_err(|_| err("not a decimal residue"))?;
        if v >= self.p {
            return Err(err("residue not below the modulus"));
        }
        Ok(v)
    }
}
