//! Polynomials over `O` (coefficients may lie in `K` where that is
//! meaningful), matrices of polynomials, and the standard-basis engine.
//!
//! Terms of a [`Poly`] are stored in descending graded reverse
//! lexicographic order with no zero coefficients. The uniformizer is a
//! scalar, never a variable.

mod groebner;
mod order;
mod parse;
mod submodule;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::dvr::{Dvr, Scalar};
use crate::error::{Error, Result};

pub use groebner::{Bounds, StdBasis, DEFAULT_DEGREE_BOUND, DEFAULT_VALUATION_BOUND};
pub use order::MonomialOrder;
pub use parse::{parse_poly, parse_scalar};
pub use submodule::{syzygy_module, taylor_division, QuotientRing, Submodule, TaylorExpansion};

/// Exponent vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial(SmallVec<[u32; 8]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Monomial::one(nvars);
        m.0[i] = 1;
        m
    }

    pub fn from_exponents(e: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(e))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    /// `o / self`; caller guarantees divisibility.
    pub fn quotient_of(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| b - a).collect())
    }

    pub fn lcm(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, o: &Monomial) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Global degree reverse lexicographic comparison.
    pub fn cmp_grevlex(&self, o: &Monomial) -> Ordering {
        match self.degree().cmp(&o.degree()) {
            Ordering::Equal => revlex(self, o),
            c => c,
        }
    }
}

/// Reverse lexicographic tie-break: the monomial with the smaller exponent
/// in the last differing variable is larger.
pub(crate) fn revlex(a: &Monomial, b: &Monomial) -> Ordering {
    for (x, y) in a.0.iter().zip(&b.0).rev() {
        if x != y {
            return y.cmp(x);
        }
    }
    Ordering::Equal
}

/// A polynomial in a fixed number of variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(Monomial, Scalar)>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        Poly::monomial(Monomial::one(nvars), c)
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let nvars = m.nvars();
        if c.is_zero() {
            return Poly::zero(nvars);
        }
        Poly {
            nvars,
            terms: vec![(m, c)],
        }
    }

    pub fn var(o: &Dvr, nvars: usize, i: usize) -> Self {
        Poly::monomial(Monomial::var(nvars, i), o.one())
    }

    /// Builds a polynomial from arbitrary terms, combining duplicates.
    pub fn from_terms(nvars: usize, mut terms: Vec<(Monomial, Scalar)>) -> Self {
        terms.sort_by(|a, b| b.0.cmp_grevlex(&a.0));
        let mut out: Vec<(Monomial, Scalar)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = lc.add(&c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { nvars, terms: out }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self, o: &Dvr) -> Option<Scalar> {
        match self.terms.as_slice() {
            [] => Some(o.zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        self.combine(o, false)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.combine(o, true)
    }

    fn combine(&self, o: &Poly, negate: bool) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < o.terms.len() {
            let ord = match (self.terms.get(i), o.terms.get(j)) {
                (Some(a), Some(b)) => a.0.cmp_grevlex(&b.0),
                (Some(_), None) => Ordering::Greater,
                _ => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let (m, c) = &o.terms[j];
                    out.push((m.clone(), if negate { c.neg() } else { c.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        self.terms[i].1.sub(&o.terms[j].1)
                    } else {
                        self.terms[i].1.add(&o.terms[j].1)
                    };
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Poly {
            nvars: self.nvars,
            terms: out,
        }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.mul(c))).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(a, b)| (a.mul(m), b.mul(c)))
                .collect(),
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut acc = Poly::zero(self.nvars);
        for (m, c) in &o.terms {
            acc = acc.add(&self.mul_term(m, c));
        }
        acc
    }

    pub fn pow(&self, o: &Dvr, e: u32) -> Poly {
        let mut acc = Poly::constant(self.nvars, o.one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Evaluation at a point of `K^n`.
    pub fn eval(&self, o: &Dvr, point: &[Scalar]) -> Scalar {
        let mut acc = o.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                for _ in 0..e {
                    t = t.mul(x);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn derivative(&self, o: &Dvr, i: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exponents()[i] > 0)
            .map(|(m, c)| {
                let mut e = m.0.clone();
                let k = e[i];
                e[i] -= 1;
                (Monomial(e), c.mul(&o.from_int(k as i64)))
            })
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Poly::from_terms(self.nvars, terms)
    }

    /// Substitutes `images[i]` for the `i`-th variable; the images live in
    /// a ring with `target_nvars` variables.
    pub fn substitute(&self, o: &Dvr, images: &[Poly], target_nvars: usize) -> Poly {
        let mut acc = Poly::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target_nvars, c.clone());
            for (img, &e) in images.iter().zip(m.exponents()) {
                for _ in 0..e {
                    t = t.mul(img);
                }
            }
            acc = acc.add(&t);
        }
        let _ = o;
        acc
    }

    /// Adds `extra` trailing variables.
    pub fn extend_vars(&self, extra: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.0.clone();
                e.extend(std::iter::repeat_n(0, extra));
                (Monomial(e), c.clone())
            })
            .collect();
        Poly {
            nvars: self.nvars + extra,
            terms,
        }
    }

    /// Smallest coefficient valuation, `None` for zero.
    pub fn min_valuation(&self, o: &Dvr) -> Option<i64> {
        self.terms.iter().filter_map(|(_, c)| o.valuation(c)).min()
    }

    pub fn require_integral(&self, o: &Dvr) -> Result<()> {
        self.terms.iter().try_for_each(|(_, c)| o.require_integral(c))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", display_poly(self, &names))
    }
}

/// Renders a polynomial with the given variable names.
pub fn display_poly(p: &Poly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms.iter().enumerate() {
        let mut factors: Vec<String> = Vec::new();
        for (i, &e) in m.exponents().iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(names[i].clone()),
                _ => factors.push(format!("{}^{e}", names[i])),
            }
        }
        let cs = c.to_string();
        let (neg, body) = match cs.strip_prefix('-') {
            Some(rest) if !rest.contains([' ', '+']) => (true, rest.to_string()),
            _ => (false, cs),
        };
        let coeff_needs_parens = body.contains([' ', '+', '-']) && !body.starts_with('(');
        let body = if coeff_needs_parens {
            format!("({body})")
        } else {
            body
        };
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if factors.is_empty() {
            out.push_str(&body);
        } else if body == "1" {
            out.push_str(&factors.join("*"));
        } else {
            out.push_str(&body);
            out.push('*');
            out.push_str(&factors.join("*"));
        }
    }
    out
}

/// Dense matrix of polynomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMat {
    rows: usize,
    cols: usize,
    nvars: usize,
    data: Vec<Poly>,
}

impl PolyMat {
    pub fn zeros(nvars: usize, rows: usize, cols: usize) -> Self {
        PolyMat {
            rows,
            cols,
            nvars,
            data: vec![Poly::zero(nvars); rows * cols],
        }
    }

    pub fn identity(o: &Dvr, nvars: usize, n: usize) -> Self {
        let mut m = PolyMat::zeros(nvars, n, n);
        for i in 0..n {
            m[(i, i)] = Poly::constant(nvars, o.one());
        }
        m
    }

    pub fn from_fn(
        nvars: usize,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Poly,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        PolyMat {
            rows,
            cols,
            nvars,
            data,
        }
    }

    /// Matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(nvars: usize, rows: usize, cols: &[Vec<Poly>]) -> Self {
        PolyMat::from_fn(nvars, rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn column(&self, j: usize) -> Vec<Poly> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Poly>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Poly> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    pub fn transpose(&self) -> PolyMat {
        PolyMat::from_fn(self.nvars, self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, b: &PolyMat) -> PolyMat {
        assert_eq!(self.cols, b.rows, "polynomial matrix product mismatch");
        PolyMat::from_fn(self.nvars, self.rows, b.cols, |i, j| {
            let mut acc = Poly::zero(self.nvars);
            for k in 0..self.cols {
                let (a, c) = (&self[(i, k)], &b[(k, j)]);
                if !a.is_zero() && !c.is_zero() {
                    acc = acc.add(&a.mul(c));
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[Poly]) -> Vec<Poly> {
        assert_eq!(self.cols, v.len(), "polynomial matrix-vector mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Poly::zero(self.nvars);
                for (k, x) in v.iter().enumerate() {
                    let a = &self[(i, k)];
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc.add(&a.mul(x));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn hcat(&self, b: &PolyMat) -> PolyMat {
        assert_eq!(self.rows, b.rows, "hcat row mismatch");
        PolyMat::from_fn(self.nvars, self.rows, self.cols + b.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[(i, j - self.cols)].clone()
            }
        })
    }

    /// Entrywise evaluation at a point.
    pub fn eval(&self, o: &Dvr, point: &[Scalar]) -> crate::dvr::Mat {
        crate::dvr::Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].eval(o, point))
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> PolyMat {
        PolyMat {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Kronecker product with an identity: `self ⊗ I_n`.
    pub fn kron_identity_right(&self, o: &Dvr, n: usize) -> PolyMat {
        PolyMat::from_fn(self.nvars, self.rows * n, self.cols * n, |i, j| {
            if i % n == j % n {
                self[(i / n, j / n)].clone()
            } else {
                let _ = o;
                Poly::zero(self.nvars)
            }
        })
    }

    /// `I_n ⊗ self`.
    pub fn kron_identity_left(&self, n: usize) -> PolyMat {
        let (r, c) = (self.rows, self.cols);
        PolyMat::from_fn(self.nvars, r * n, c * n, |i, j| {
            if i / r == j / c {
                self[(i % r, j % c)].clone()
            } else {
                Poly::zero(self.nvars)
            }
        })
    }
}

impl std::ops::Index<(usize, usize)> for PolyMat {
    type Output = Poly;
    fn index(&self, (i, j): (usize, usize)) -> &Poly {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for PolyMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Poly {
        &mut self.data[i * self.cols + j]
    }
}

/// Variable names plus the base ring.
#[derive(Clone, Debug)]
pub struct PolyRing {
    dvr: Dvr,
    vars: Arc<[String]>,
}

impl PolyRing {
    pub fn new(dvr: Dvr, vars: Vec<String>) -> Result<Self> {
        for (i, v) in vars.iter().enumerate() {
            let valid = v
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid || v == "pi" || v == "gf" {
                return Err(Error::InvalidConfig(format!("invalid variable name {v:?}")));
            }
            if vars[..i].contains(v) {
                return Err(Error::InvalidConfig(format!("duplicate variable {v}")));
            }
        }
        Ok(PolyRing {
            dvr,
            vars: vars.into(),
        })
    }

    pub fn dvr(&self) -> &Dvr {
        &self.dvr
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn var(&self, i: usize) -> Poly {
        Poly::var(&self.dvr, self.nvars(), i)
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(self.nvars())
    }

    pub fn one(&self) -> Poly {
        self.constant(self.dvr.one())
    }

    pub fn constant(&self, c: Scalar) -> Poly {
        Poly::constant(self.nvars(), c)
    }

    pub fn parse(&self, s: &str) -> Result<Poly> {
        parse_poly(self, s)
    }

    pub fn show(&self, p: &Poly) -> String {
        display_poly(p, &self.vars)
    }

    /// The ring with extra variables appended.
    pub fn with_extra_vars(&self, extra: &[String]) -> Result<PolyRing> {
        let mut v = self.vars.to_vec();
        v.extend(extra.iter().cloned());
        PolyRing::new(self.dvr.clone(), v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> PolyRing {
        PolyRing::new(Dvr::p_adic(5).unwrap(), vec!["x".into(), "y".into()]).unwrap()
    }

    #[test]
    fn arithmetic_round_trip() {
        let r = ring();
        let f = r.parse("x*(x - pi^2) + 3*y").unwrap();
        let g = r.parse("x^2 - 25*x + 3*y").unwrap();
        assert_eq!(f, g);
        assert!(f.sub(&g).is_zero());
        assert_eq!(r.show(&f), "x^2 - 25*x + 3*y");
    }

    #[test]
    fn evaluation_and_derivative() {
        let r = ring();
        let o = r.dvr().clone();
        let f = r.parse("x^2*y - pi*x").unwrap();
        let v = f.eval(&o, &[o.from_int(2), o.from_int(3)]);
        assert_eq!(v, o.from_int(2));
        assert_eq!(f.derivative(&o, 0), r.parse("2*x*y - 5").unwrap());
        assert_eq!(f.derivative(&o, 1), r.parse("x^2").unwrap());
    }

    #[test]
    fn grevlex_order() {
        let a = Monomial::from_exponents(&[2, 0]);
        let b = Monomial::from_exponents(&[1, 1]);
        let c = Monomial::from_exponents(&[0, 2]);
        assert_eq!(a.cmp_grevlex(&b), Ordering::Greater);
        assert_eq!(b.cmp_grevlex(&c), Ordering::Greater);
        assert_eq!(c.cmp_grevlex(&Monomial::from_exponents(&[1, 0])), Ordering::Greater);
    }

    #[test]
    fn substitution() {
        let r = ring();
        let o = r.dvr().clone();
        let f = r.parse("x*y").unwrap();
        let g = f.substitute(&o, &[r.parse("x + 1").unwrap(), r.parse("y").unwrap()], 2);
        assert_eq!(g, r.parse("x*y + y").unwrap());
    }
}
