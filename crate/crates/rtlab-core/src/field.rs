//! Prime-field arithmetic and prime scanning.

use crate::error::{Error, Result};

/// Deterministic primality check by trial division. All orders in this crate
/// are small (at most a few thousand), so this is never a bottleneck.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime `>= ceil(x)`.
pub fn next_prime_at_least(x: f64) -> u64 {
    let mut n = if x <= 2.0 { 2 } else { x.ceil() as u64 };
    loop {
        if is_prime(n) {
            return n;
        }
        n += 1;
    }
}

/// GF(q) for prime q, elements canonically in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    modulus: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(PrimeField { modulus: q })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.modulus
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.modulus - b % self.modulus) % self.modulus
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.modulus
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.modulus - a % self.modulus) % self.modulus
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        base %= self.modulus;
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat; `a` must be nonzero mod q.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if a % self.modulus == 0 {
            return Err(Error::BadParam("inverse of zero".into()));
        }
        Ok(self.pow(a, self.modulus - 2))
    }
}
