//! The base discrete valuation ring `O`, its fraction field `K`, and exact
//! linear algebra over them.
//!
//! Two models are supported: `Z` localized at a prime `p` (elements are
//! rationals whose denominator is prime to `p`) and `F_q[t]` localized at
//! `(t)` (rational functions regular at `t = 0`). Elements of `K` are carried
//! in the same [`Scalar`] type; membership in `O` is a valuation test.

pub mod gf;
mod matrix;
mod module;
pub mod ratfn;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use gf::GaloisField;
use ratfn::RatFn;

pub use matrix::{Mat, Smith};
pub use module::{
    fitting_ideal, o_module_from_presentation, order_ideal, subquotient, FinOModule, IdealO,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DvrKind {
    PAdic { p: u64 },
    PowerSeries { q: u64 },
}

/// Context object for the base ring. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Dvr {
    kind: DvrKind,
    prime: BigInt,
    field: Option<Arc<GaloisField>>,
}

impl PartialEq for Dvr {
    fn eq(&self, o: &Self) -> bool {
        self.kind == o.kind
    }
}

impl Eq for Dvr {}

impl Dvr {
    pub fn p_adic(p: u64) -> Result<Self> {
        if !gf::is_prime(p) {
            return Err(Error::InvalidConfig(format!("{p} is not prime")));
        }
        Ok(Dvr {
            kind: DvrKind::PAdic { p },
            prime: BigInt::from(p),
            field: None,
        })
    }

    pub fn power_series(q: u64) -> Result<Self> {
        let field = GaloisField::new(q)?;
        Ok(Dvr {
            kind: DvrKind::PowerSeries { q },
            prime: BigInt::from(field.characteristic()),
            field: Some(Arc::new(field)),
        })
    }

    pub fn kind(&self) -> DvrKind {
        self.kind
    }

    /// Residue characteristic.
    pub fn characteristic(&self) -> u64 {
        self.prime.to_u64().unwrap_or(0)
    }

    pub fn zero(&self) -> Scalar {
        self.from_int(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        match &self.field {
            None => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            Some(f) => Scalar::F(RatFn::from_const(f.clone(), f.from_int(n))),
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match &self.field {
            None => Scalar::Q(BigRational::from_integer(n.clone())),
            Some(f) => {
                let r = n.mod_floor(&BigInt::from(f.characteristic()));
                Scalar::F(RatFn::from_const(f.clone(), r.to_u32().unwrap_or(0)))
            }
        }
    }

    /// The uniformizer: `p` for `Z_(p)`, `t` for `F_q[t]_(t)`.
    pub fn uniformizer(&self) -> Scalar {
        self.pi_pow(1)
    }

    pub fn pi_pow(&self, e: u32) -> Scalar {
        match &self.field {
            None => Scalar::Q(BigRational::from_integer(self.prime.pow(e))),
            Some(f) => Scalar::F(RatFn::t_power(f.clone(), e)),
        }
    }

    /// Generator of the residue field `F_q` (power-series rings with `q`
    /// a proper prime power only).
    pub fn field_generator(&self) -> Option<Scalar> {
        let f = self.field.as_ref()?;
        (f.degree() > 1).then(|| Scalar::F(RatFn::from_const(f.clone(), f.generator())))
    }

    /// Valuation of an element of `K`; `None` encodes infinity.
    pub fn valuation(&self, a: &Scalar) -> Option<i64> {
        match a {
            Scalar::Q(r) => {
                if r.is_zero() {
                    return None;
                }
                Some(int_val(r.numer(), &self.prime) - int_val(r.denom(), &self.prime))
            }
            Scalar::F(f) => f.valuation(),
        }
    }

    pub fn is_integral(&self, a: &Scalar) -> bool {
        self.valuation(a).is_none_or(|v| v >= 0)
    }

    pub fn is_unit(&self, a: &Scalar) -> bool {
        self.valuation(a) == Some(0)
    }

    /// Writes a nonzero `a` as `u * pi^v` and returns `(u, v)`.
    pub fn split(&self, a: &Scalar) -> (Scalar, i64) {
        let v = self.valuation(a).expect("split of zero");
        let u = if v >= 0 {
            a.div(&self.pi_pow(v as u32))
        } else {
            a.mul(&self.pi_pow((-v) as u32))
        };
        (u, v)
    }

    /// Canonical representative of an integral `a` modulo `pi^prec`.
    ///
    /// For `Z_(p)` this is the integer in `[0, p^prec)`; for `F_q[t]_(t)`
    /// the truncated `t`-adic expansion.
    pub fn reduce_mod_pi_pow(&self, a: &Scalar, prec: u32) -> Scalar {
        if prec == 0 || a.is_zero() {
            return self.zero();
        }
        match a {
            Scalar::Q(r) => {
                let m = self.prime.pow(prec);
                let inv = mod_inverse(&r.denom().mod_floor(&m), &m)
                    .expect("denominator of an integral element is a unit");
                let rep = (r.numer().mod_floor(&m) * inv).mod_floor(&m);
                Scalar::Q(BigRational::from_integer(rep))
            }
            Scalar::F(f) => Scalar::F(f.truncate(prec)),
        }
    }

    /// Checks that `a` lies in `O`.
    pub fn require_integral(&self, a: &Scalar) -> Result<()> {
        if self.is_integral(a) {
            Ok(())
        } else {
            Err(Error::NonIntegralEntry(a.to_string()))
        }
    }
}

fn int_val(n: &BigInt, p: &BigInt) -> i64 {
    if n.is_zero() {
        return 0;
    }
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// An element of the fraction field `K`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    F(RatFn),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::F(f) => f.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_one(),
            Scalar::F(f) => f.is_one(),
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::F(a), Scalar::F(b)) => Scalar::F(a.add(b)),
            _ => panic!("mixed scalar kinds"),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a - b),
            (Scalar::F(a), Scalar::F(b)) => Scalar::F(a.sub(b)),
            _ => panic!("mixed scalar kinds"),
        }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::F(a), Scalar::F(b)) => Scalar::F(a.mul(b)),
            _ => panic!("mixed scalar kinds"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::F(a) => Scalar::F(a.neg()),
        }
    }

    pub fn inv(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(a.recip()),
            Scalar::F(a) => Scalar::F(a.inv()),
        }
    }

    /// Division in `K`. Panics on division by zero.
    pub fn div(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a / b),
            (Scalar::F(a), Scalar::F(b)) => Scalar::F(a.mul(&b.inv())),
            _ => panic!("mixed scalar kinds"),
        }
    }

    /// Integer value, when the element is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Q(r) if r.is_integer() => r.numer().to_i64(),
            _ => None,
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar::add(self, o)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar::sub(self, o)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        Scalar::mul(self, o)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(r) => write!(f, "{r}"),
            Scalar::F(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_adic_valuations() {
        let o = Dvr::p_adic(5).unwrap();
        let x = Scalar::Q(BigRational::new(50.into(), 3.into()));
        assert_eq!(o.valuation(&x), Some(2));
        let y = Scalar::Q(BigRational::new(3.into(), 25.into()));
        assert_eq!(o.valuation(&y), Some(-2));
        assert!(!o.is_integral(&y));
        assert_eq!(o.valuation(&o.zero()), None);
        let (u, v) = o.split(&x);
        assert_eq!(v, 2);
        assert!(o.is_unit(&u));
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(Dvr::p_adic(6).is_err());
        assert!(Dvr::power_series(12).is_err());
        assert!(Dvr::power_series(9).is_ok());
    }

    #[test]
    fn canonical_residues() {
        let o = Dvr::p_adic(3).unwrap();
        let half = o.one().div(&o.from_int(2));
        // 1/2 = 5 mod 9
        assert_eq!(o.reduce_mod_pi_pow(&half, 2), o.from_int(5));
        let s = Dvr::power_series(2).unwrap();
        let u = s.one().add(&s.uniformizer());
        let r = s.reduce_mod_pi_pow(&s.one().div(&u), 3);
        // 1/(1+t) = 1 + t + t^2 mod t^3 in characteristic 2
        let expect = s.one().add(&s.uniformizer()).add(&s.pi_pow(2));
        assert_eq!(r, expect);
    }
}
