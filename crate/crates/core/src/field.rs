//! Arithmetic in prime fields of odd characteristic.
//!
//! Elements are plain `u32` residues in `[0, p)`; a [`PrimeField`] value
//! carries the modulus and does the arithmetic. Keeping residues unboxed lets
//! the elimination kernels in [`crate::linalg`] work on flat `u32` buffers.

use thiserror::Error;

/// Largest supported modulus (exclusive). Products of two residues must fit
/// in a `u64` with room for lazy accumulation.
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus 2 is not supported: the base field must have odd characteristic")]
    EvenCharacteristic,
    #[error("modulus {0} is too large (must be below 2^31)")]
    TooLarge(u64),
}

/// The prime field `F_p` for an odd prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if p >= MAX_MODULUS {
            return Err(FieldError::TooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Self { p: p as u32 })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// `a + b * c`
    #[inline]
    pub fn mul_add(self, a: u32, b: u32, c: u32) -> u32 {
        ((a as u64 + b as u64 * c as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.p) {
            None
        } else {
            Some(self.pow(a, self.p as u64 - 2))
        }
    }

    /// The inverse of 2, which exists because `p` is odd.
    #[inline]
    pub fn half(self) -> u32 {
        self.p.div_ceil(2)
    }

    /// Reduces an arbitrary signed integer into `[0, p)`.
    pub fn from_i64(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn reduce(self, v: u64) -> u32 {
        (v % self.p as u64) as u32
    }

    /// Number of points of `F_p^n`, or `None` on overflow.
    pub fn point_count(self, n: usize) -> Option<u64> {
        (self.p as u64).checked_pow(u32::try_from(n).ok()?)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Enumerates every vector of `F_p^n` in counter order: coordinate 0 is the
/// fastest-moving digit, so `(1, 0)` precedes `(0, 1)`.
///
/// Exhaustive searches in this crate report the first hit in this order.
pub struct PointCounter {
    p: u32,
    current: Vec<u32>,
    done: bool,
}

impl PointCounter {
    pub fn new(field: PrimeField, n: usize) -> Self {
        Self {
            p: field.modulus(),
            current: vec![0; n],
            done: false,
        }
    }

    /// Same enumeration with the zero vector skipped.
    pub fn nonzero(field: PrimeField, n: usize) -> impl Iterator<Item = Vec<u32>> {
        Self::new(field, n).filter(|v| v.iter().any(|&x| x != 0))
    }
}

impl Iterator for PointCounter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let mut i = 0;
        loop {
            if i == self.current.len() {
                self.done = true;
                break;
            }
            self.current[i] += 1;
            if self.current[i] < self.p {
                break;
            }
            self.current[i] = 0;
            i += 1;
        }
        Some(out)
    }
}
