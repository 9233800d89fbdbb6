//! Rational functions over a finite field, the fraction field of `F_q[t]`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::gf::GaloisField;

/// Dense polynomial over `F_q`, little-endian, no trailing zeros.
type FqPoly = Vec<u32>;

fn trim(mut a: FqPoly) -> FqPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn padd(f: &GaloisField, a: &[u32], b: &[u32]) -> FqPoly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| f.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
        .collect();
    trim(out)
}

fn pneg(f: &GaloisField, a: &[u32]) -> FqPoly {
    a.iter().map(|&c| f.neg(c)).collect()
}

fn pmul(f: &GaloisField, a: &[u32], b: &[u32]) -> FqPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

fn pscale(f: &GaloisField, a: &[u32], c: u32) -> FqPoly {
    trim(a.iter().map(|&x| f.mul(x, c)).collect())
}

fn pdivrem(f: &GaloisField, a: &[u32], b: &[u32]) -> (FqPoly, FqPoly) {
    assert!(!b.is_empty(), "polynomial division by zero");
    let mut rem = a.to_vec();
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let inv_lead = f.inv(*b.last().unwrap());
    let mut quot = vec![0u32; rem.len() - b.len() + 1];
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let c = f.mul(*rem.last().unwrap(), inv_lead);
        quot[shift] = c;
        for (j, &bj) in b.iter().enumerate() {
            rem[shift + j] = f.sub(rem[shift + j], f.mul(c, bj));
        }
        rem = trim(rem);
    }
    (trim(quot), rem)
}

fn pgcd(f: &GaloisField, a: &[u32], b: &[u32]) -> FqPoly {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let (_, r) = pdivrem(f, &a, &b);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        pscale(f, &a, f.inv(lead))
    } else {
        a
    }
}

fn low_order(a: &[u32]) -> usize {
    a.iter().position(|&c| c != 0).unwrap_or(0)
}

/// A reduced fraction `num / den` with `den` monic.
#[derive(Clone)]
pub struct RatFn {
    field: Arc<GaloisField>,
    num: FqPoly,
    den: FqPoly,
}

impl RatFn {
    pub fn new(field: Arc<GaloisField>, num: Vec<u32>, den: Vec<u32>) -> Self {
        let (num, den) = (trim(num), trim(den));
        assert!(!den.is_empty(), "rational function with zero denominator");
        let mut r = RatFn { field, num, den };
        r.normalize();
        r
    }

    pub fn from_const(field: Arc<GaloisField>, c: u32) -> Self {
        RatFn::new(field, vec![c], vec![1])
    }

    pub fn t_power(field: Arc<GaloisField>, e: u32) -> Self {
        let mut num = vec![0u32; e as usize + 1];
        num[e as usize] = 1;
        RatFn::new(field, num, vec![1])
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    fn normalize(&mut self) {
        let f = &self.field;
        if self.num.is_empty() {
            self.den = vec![1];
            return;
        }
        let g = pgcd(f, &self.num, &self.den);
        if g.len() > 1 {
            self.num = pdivrem(f, &self.num, &g).0;
            self.den = pdivrem(f, &self.den, &g).0;
        }
        let lead = *self.den.last().unwrap();
        if lead != 1 {
            let inv = f.inv(lead);
            self.num = pscale(f, &self.num, inv);
            self.den = pscale(f, &self.den, inv);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.num == [1] && self.den == [1]
    }

    /// `t`-adic valuation; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(low_order(&self.num) as i64 - low_order(&self.den) as i64)
    }

    pub fn add(&self, o: &RatFn) -> RatFn {
        let f = &self.field;
        let num = padd(f, &pmul(f, &self.num, &o.den), &pmul(f, &o.num, &self.den));
        RatFn::new(self.field.clone(), num, pmul(f, &self.den, &o.den))
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            field: self.field.clone(),
            num: pneg(&self.field, &self.num),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RatFn) -> RatFn {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFn) -> RatFn {
        let f = &self.field;
        RatFn::new(
            self.field.clone(),
            pmul(f, &self.num, &o.num),
            pmul(f, &self.den, &o.den),
        )
    }

    pub fn inv(&self) -> RatFn {
        assert!(!self.is_zero(), "inverse of zero");
        RatFn::new(self.field.clone(), self.den.clone(), self.num.clone())
    }

    /// Truncation of the `t`-adic expansion below `t^prec`; requires
    /// non-negative valuation.
    pub fn truncate(&self, prec: u32) -> RatFn {
        let f = &self.field;
        let n = prec as usize;
        // den(0) != 0 for integral elements after normalization.
        let d0_inv = f.inv(self.den[0]);
        let mut series = vec![0u32; n];
        let mut rem: Vec<u32> = (0..n).map(|i| *self.num.get(i).unwrap_or(&0)).collect();
        for i in 0..n {
            let c = f.mul(rem[i], d0_inv);
            series[i] = c;
            if c != 0 {
                for (j, &dj) in self.den.iter().enumerate() {
                    if i + j < n {
                        rem[i + j] = f.sub(rem[i + j], f.mul(c, dj));
                    }
                }
            }
        }
        RatFn::new(self.field.clone(), series, vec![1])
    }

    fn fmt_poly(&self, a: &[u32], out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in a.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(out, " + ")?;
            }
            first = false;
            let coeff = fmt_coeff(&self.field, c);
            match (i, c == 1) {
                (0, _) => write!(out, "{coeff}")?,
                (1, true) => write!(out, "pi")?,
                (1, false) => write!(out, "{coeff}*pi")?,
                (_, true) => write!(out, "pi^{i}")?,
                (_, false) => write!(out, "{coeff}*pi^{i}")?,
            }
        }
        if first {
            write!(out, "0")?;
        }
        Ok(())
    }
}

fn fmt_coeff(f: &GaloisField, c: u32) -> String {
    if f.degree() == 1 {
        return c.to_string();
    }
    // base-p digits as a polynomial in the field generator `gf`
    let p = f.characteristic();
    let mut parts = Vec::new();
    let mut n = c;
    let mut i = 0;
    while n > 0 {
        let d = n % p;
        if d != 0 {
            parts.push(match i {
                0 => d.to_string(),
                1 if d == 1 => "gf".to_string(),
                1 => format!("{d}*gf"),
                _ if d == 1 => format!("gf^{i}"),
                _ => format!("{d}*gf^{i}"),
            });
        }
        n /= p;
        i += 1;
    }
    parts.reverse();
    format!("({})", parts.join(" + "))
}

impl PartialEq for RatFn {
    fn eq(&self, o: &Self) -> bool {
        self.num == o.num && self.den == o.den
    }
}

impl Eq for RatFn {}

impl Hash for RatFn {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.num.hash(h);
        self.den.hash(h);
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == [1] {
            return self.fmt_poly(&self.num, f);
        }
        write!(f, "(")?;
        self.fmt_poly(&self.num, f)?;
        write!(f, ")/(")?;
        self.fmt_poly(&self.den, f)?;
        write!(f, ")")
    }
}
