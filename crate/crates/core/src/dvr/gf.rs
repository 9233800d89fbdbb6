//! Finite fields `F_q`, `q = p^k`, with log/antilog tables.
//!
//! An element is encoded as the integer whose base-`p` digits are the
//! coefficients of its representative polynomial modulo a fixed primitive
//! polynomial of degree `k`.

use crate::error::{Error, Result};

#[derive(Debug)]
pub struct GaloisField {
    p: u32,
    k: u32,
    q: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// Largest field size supported by the table representation.
pub const MAX_FIELD_SIZE: u64 = 1 << 16;

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^k` with `p` prime, if possible.
pub(crate) fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while q % p != 0 {
        p += 1;
    }
    if !is_prime(p) {
        return None;
    }
    let mut k = 0u32;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

impl GaloisField {
    pub fn new(q: u64) -> Result<Self> {
        let (p, k) = prime_power(q)
            .ok_or_else(|| Error::InvalidConfig(format!("{q} is not a prime power")))?;
        if q > MAX_FIELD_SIZE {
            return Err(Error::InvalidConfig(format!(
                "field size {q} exceeds supported maximum {MAX_FIELD_SIZE}"
            )));
        }
        let (p, q) = (p as u32, q as u32);
        // Search monic degree-k polynomials for one in which x generates the
        // multiplicative group. Candidates are enumerated by their lower
        // coefficients in increasing encoded order, so the choice is fixed.
        for low in 0..q {
            let modulus = digits(low, p, k);
            if let Some(exp) = powers_of_x(p, k, &modulus) {
                let mut log = vec![0u32; q as usize];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                return Ok(GaloisField { p, k, q, exp, log });
            }
        }
        Err(Error::InvalidConfig(format!(
            "no primitive polynomial found for q = {q}"
        )))
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    /// The class of the polynomial variable, a generator of `F_q^*`.
    pub fn generator(&self) -> u32 {
        self.exp[1 % (self.q as usize - 1).max(1)]
    }

    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.k == 1 {
            return (self.p - a) % self.p;
        }
        let mut a = a;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.k {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q - 1;
        self.exp[((self.log[a as usize] + self.log[b as usize]) % n) as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in F_q");
        let n = self.q - 1;
        self.exp[((n - self.log[a as usize]) % n) as usize]
    }
}

fn digits(mut n: u32, p: u32, k: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        out.push(n % p);
        n /= p;
    }
    out
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Returns the table of `x^i mod f` for `f = x^k + modulus` when `x` has full
/// multiplicative order, and `None` otherwise.
fn powers_of_x(p: u32, k: u32, modulus: &[u32]) -> Option<Vec<u32>> {
    let q = p.pow(k);
    let n = (q - 1) as usize;
    let mut cur = vec![0u32; k as usize];
    cur[0] = 1;
    let mut exp = Vec::with_capacity(n);
    let mut seen = vec![false; q as usize];
    for _ in 0..n {
        let e = encode(&cur, p);
        if e == 0 || seen[e as usize] {
            return None;
        }
        seen[e as usize] = true;
        exp.push(e);
        // multiply by x and reduce with x^k = -modulus
        let top = cur[k as usize - 1];
        for i in (1..k as usize).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        for i in 0..k as usize {
            cur[i] = (cur[i] + (p - top % p) * modulus[i]) % p;
        }
    }
    (encode(&cur, p) == 1).then_some(exp)
}
