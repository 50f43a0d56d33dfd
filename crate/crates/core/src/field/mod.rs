//! Exact arithmetic and linear algebra over prime fields `F_q`.
//!
//! Elements are plain `u32` values kept in `[0, q)`. The modulus is assumed to
//! be at most `2^15`, so any product fits in a `u32` and long dot products can
//! be accumulated in a `u64` before a single reduction.

mod matrix;

pub use matrix::FieldMatrix;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported modulus.
pub const MAX_MODULUS: u32 = 1 << 15;

/// A field element. Always reduced into `[0, q)` by the owning [`PrimeField`].
pub type Elem = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("modulus {0} exceeds the supported maximum {MAX_MODULUS}")]
    ModulusTooLarge(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("shape error: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("linear system has no solution")]
    NoSolution,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

/// The prime field `F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    q: u32,
}

impl TryFrom<u32> for PrimeField {
    type Error = FieldError;

    fn try_from(q: u32) -> Result<Self, Self::Error> {
        PrimeField::new(q)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.q
    }
}

/// Trial-division primality test.
pub fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    if q.is_multiple_of(2) {
        return q == 2;
    }
    let mut d = 3u32;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    pub fn new(q: u32) -> Result<Self, FieldError> {
        if q > MAX_MODULUS {
            return Err(FieldError::ModulusTooLarge(q));
        }
        if !is_prime(q) {
            return Err(FieldError::NotPrime(q));
        }
        Ok(PrimeField { q })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.q
    }

    /// Reduces an arbitrary signed integer into the field.
    #[inline]
    pub fn from_i64(self, v: i64) -> Elem {
        v.rem_euclid(self.q as i64) as Elem
    }

    /// Reduces an arbitrary unsigned integer into the field.
    #[inline]
    pub fn reduce(self, v: u64) -> Elem {
        (v % self.q as u64) as Elem
    }

    #[inline]
    pub fn add(self, a: Elem, b: Elem) -> Elem {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: Elem, b: Elem) -> Elem {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(self, a: Elem) -> Elem {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(self, a: Elem, b: Elem) -> Elem {
        (a * b) % self.q
    }

    pub fn pow(self, base: Elem, mut exp: u64) -> Elem {
        let mut acc = 1 % self.q;
        let mut b = base % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(self, a: Elem) -> Result<Elem, FieldError> {
        if a.is_multiple_of(self.q) {
            return Err(FieldError::DivisionByZero);
        }
        let (mut old_r, mut r) = (a as i64, self.q as i64);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let quot = old_r / r;
            (old_r, r) = (r, old_r - quot * r);
            (old_s, s) = (s, old_s - quot * s);
        }
        Ok(self.from_i64(old_s))
    }

    pub fn div(self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `Σ a_i b_i` with a single final reduction.
    #[inline]
    pub fn dot(self, a: &[Elem], b: &[Elem]) -> Elem {
        debug_assert_eq!(a.len(), b.len());
        let acc: u64 = a.iter().zip(b).map(|(&x, &y)| (x * y) as u64).sum();
        self.reduce(acc)
    }

    /// Componentwise sum of two vectors.
    pub fn add_vec(self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }

    /// Componentwise difference of two vectors.
    pub fn sub_vec(self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        a.iter().zip(b).map(|(&x, &y)| self.sub(x, y)).collect()
    }

    /// Builds a Vandermonde matrix with entry `(r, j) = points[j]^r`.
    pub fn vandermonde(self, points: &[Elem], num_rows: usize) -> Result<FieldMatrix, FieldError> {
        FieldMatrix::vandermonde(self, points, num_rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_examples() {
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(f7.mul(3, 5), 1);
        assert_eq!(f7.inv(3).unwrap(), 5);
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(f5.neg(2), 3);
        assert_eq!(f5.neg(0), 0);
        assert_eq!(f5.sub(1, 3), 3);
        assert_eq!(f5.pow(2, 4), 1);
        assert_eq!(f5.pow(0, 0), 1);
        assert_eq!(f5.div(1, 2).unwrap(), 3);
    }

    #[test]
    fn inverse_of_zero_fails() {
        let f = PrimeField::new(11).unwrap();
        assert_eq!(f.inv(0), Err(FieldError::DivisionByZero));
        assert_eq!(f.div(4, 0), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn primality() {
        assert!(PrimeField::new(2).is_ok());
        assert_eq!(PrimeField::new(1), Err(FieldError::NotPrime(1)));
        assert_eq!(PrimeField::new(9), Err(FieldError::NotPrime(9)));
        assert!(PrimeField::new(32749).is_ok());
        assert_eq!(PrimeField::new(40009), Err(FieldError::ModulusTooLarge(40009)));
        let primes: Vec<u32> = (0..30).filter(|&q| is_prime(q)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn serde_rejects_composite_modulus() {
        let ok: PrimeField = serde_json::from_str("13").unwrap();
        assert_eq!(ok.modulus(), 13);
        assert!(serde_json::from_str::<PrimeField>("12").is_err());
    }

    fn field_and_triple() -> impl Strategy<Value = (PrimeField, u32, u32, u32)> {
        prop::sample::select(vec![2u32, 3, 5, 7, 11, 13, 101, 7919, 32749]).prop_flat_map(|q| {
            (Just(PrimeField::new(q).unwrap()), 0..q, 0..q, 0..q)
        })
    }

    proptest! {
        #[test]
        fn field_axioms((f, a, b, c) in field_and_triple()) {
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, f.neg(a)), 0);
            prop_assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                // Fermat's little theorem as an independent route.
                prop_assert_eq!(f.inv(a).unwrap(), f.pow(a, f.modulus() as u64 - 2));
            }
        }
    }
}
