//! Linear algebra over a quotient `A = R/I`: submodule membership with
//! cofactors, syzygies, and Taylor division at a point.

use std::sync::Arc;

use super::groebner::{Bounds, StdBasis, Vect};
use super::{MonomialOrder, Poly, PolyMat, PolyRing};
use crate::dvr::{Dvr, Scalar};
use crate::error::{Error, Result};

/// `A = R/I` with a cached strong basis of `I` in the global order.
#[derive(Clone, Debug)]
pub struct QuotientRing {
    ring: PolyRing,
    relations: Vec<Poly>,
    basis: Arc<StdBasis>,
    bounds: Bounds,
}

impl QuotientRing {
    pub fn new(ring: PolyRing, relations: Vec<Poly>, bounds: Bounds) -> Result<Self> {
        let basis = StdBasis::ideal(
            ring.dvr(),
            ring.nvars(),
            &relations,
            MonomialOrder::GlobalDegRevLex,
            bounds,
        )?;
        Ok(QuotientRing {
            ring,
            relations,
            basis: Arc::new(basis),
            bounds,
        })
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn dvr(&self) -> &Dvr {
        self.ring.dvr()
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    pub fn basis(&self) -> &StdBasis {
        &self.basis
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn reduce(&self, f: &Poly) -> Poly {
        self.basis
            .normal_form(f)
            .expect("global normal forms do not fail")
    }

    pub fn is_zero(&self, f: &Poly) -> bool {
        self.reduce(f).is_zero()
    }

    pub fn reduce_mat(&self, m: &PolyMat) -> PolyMat {
        m.map(|p| self.reduce(p))
    }

    /// The same ring with more relations.
    pub fn with_relations(&self, extra: &[Poly]) -> Result<QuotientRing> {
        let mut rels = self.relations.clone();
        rels.extend(extra.iter().cloned());
        QuotientRing::new(self.ring.clone(), rels, self.bounds)
    }
}

/// The submodule of `A^rows` generated by the columns of a matrix, with an
/// extended standard basis that records how each basis element is built
/// from the generators.
#[derive(Clone, Debug)]
pub struct Submodule {
    q: QuotientRing,
    rows: usize,
    gens: usize,
    ext: StdBasis,
}

impl Submodule {
    pub fn new(q: &QuotientRing, m: &PolyMat) -> Result<Self> {
        let (r, s) = (m.nrows(), m.ncols());
        let n = q.nvars();
        let zero = Poly::zero(n);
        let mut vecs: Vec<Vec<Poly>> = Vec::new();
        for k in 0..s {
            let mut v = vec![zero.clone(); r + s];
            for i in 0..r {
                v[i] = q.reduce(&m[(i, k)]);
            }
            v[r + k] = Poly::constant(n, q.dvr().one());
            vecs.push(v);
        }
        // I * A^(r+s): keeps both blocks reduced modulo the relations
        for f in q.basis().polys() {
            for i in 0..r + s {
                let mut v = vec![zero.clone(); r + s];
                v[i] = f.clone();
                vecs.push(v);
            }
        }
        let ext = StdBasis::module(
            q.dvr(),
            n,
            r + s,
            &vecs,
            MonomialOrder::GlobalDegRevLex,
            q.bounds(),
        )?;
        Ok(Submodule {
            q: q.clone(),
            rows: r,
            gens: s,
            ext,
        })
    }

    pub fn quotient_ring(&self) -> &QuotientRing {
        &self.q
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn generator_count(&self) -> usize {
        self.gens
    }

    fn reduce_extended(&self, v: &[Poly]) -> Result<(Vec<Poly>, Vec<Poly>)> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let n = self.q.nvars();
        let mut full: Vec<Poly> = v.to_vec();
        full.extend(std::iter::repeat_n(Poly::zero(n), self.gens));
        let x = Vect::from_polys(self.ext.order(), &full);
        let red = self.ext.reduce_vect(x, false);
        let mut polys = red.to_polys(n, self.rows + self.gens);
        let ext = polys.split_off(self.rows);
        Ok((polys, ext))
    }

    /// Membership of `v` in the submodule (modulo `I`).
    pub fn contains(&self, v: &[Poly]) -> Result<bool> {
        Ok(self.reduce_extended(v)?.0.iter().all(Poly::is_zero))
    }

    /// Cofactors `c` with `v = sum c_k * column_k` in `A^rows`, when `v`
    /// lies in the submodule.
    pub fn lift(&self, v: &[Poly]) -> Result<Option<Vec<Poly>>> {
        let (main, ext) = self.reduce_extended(v)?;
        if !main.iter().all(Poly::is_zero) {
            return Ok(None);
        }
        Ok(Some(ext.iter().map(|p| self.q.reduce(&p.neg())).collect()))
    }

    /// Generators of `{a in A^gens : sum a_k * column_k = 0}`.
    pub fn syzygies(&self) -> Vec<Vec<Poly>> {
        let r = self.rows;
        let mut out: Vec<Vec<Poly>> = Vec::new();
        for (lt, v) in self.ext.leading_terms().into_iter().zip(self.ext.vectors()) {
            if lt.0 < r {
                continue;
            }
            let syz: Vec<Poly> = v[r..].iter().map(|p| self.q.reduce(p)).collect();
            if syz.iter().any(|p| !p.is_zero()) && !out.contains(&syz) {
                out.push(syz);
            }
        }
        out
    }
}

/// Generators (as columns) of the syzygies over `A` of the columns of `m`.
/// Every returned column is checked to be a syzygy.
pub fn syzygy_module(q: &QuotientRing, m: &PolyMat) -> Result<PolyMat> {
    let sub = Submodule::new(q, m)?;
    let syz = sub.syzygies();
    let out = PolyMat::from_columns(q.nvars(), m.ncols(), &syz);
    let check = q.reduce_mat(&m.mul(&out));
    if !check.is_zero() {
        return Err(Error::InternalInvariantViolation(
            "syzygy fails to annihilate the matrix".into(),
        ));
    }
    Ok(out)
}

/// `f = sum g_i * (x_i - a_i) + r` with `r = f(a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaylorExpansion {
    pub coeffs: Vec<Poly>,
    pub remainder: Scalar,
}

/// Divides `f` by the linear forms `x_i - a_i`, eliminating `x_1` first.
pub fn taylor_division(o: &Dvr, f: &Poly, point: &[Scalar]) -> TaylorExpansion {
    let n = f.nvars();
    assert_eq!(point.len(), n, "taylor division point has wrong dimension");
    let mut rest = f.clone();
    let mut coeffs = Vec::with_capacity(n);
    for (i, a) in point.iter().enumerate() {
        let mut g_terms = Vec::new();
        let mut next_terms = Vec::new();
        for (m, c) in rest.terms() {
            let e = m.exponents()[i];
            let mut base = m.exponents().to_vec();
            base[i] = 0;
            // x^e = a^e + (x - a) * sum_{j<e} x^j a^(e-1-j)
            let mut apow = vec![o.one()];
            for _ in 0..e {
                let last = apow.last().unwrap().mul(a);
                apow.push(last);
            }
            for j in 0..e {
                let mut ex = base.clone();
                ex[i] = j;
                let coeff = c.mul(&apow[(e - 1 - j) as usize]);
                if !coeff.is_zero() {
                    g_terms.push((super::Monomial::from_exponents(&ex), coeff));
                }
            }
            let coeff = c.mul(&apow[e as usize]);
            if !coeff.is_zero() {
                next_terms.push((super::Monomial::from_exponents(&base), coeff));
            }
        }
        coeffs.push(Poly::from_terms(n, g_terms));
        rest = Poly::from_terms(n, next_terms);
    }
    let remainder = rest.as_constant(o).expect("all variables eliminated");
    TaylorExpansion { coeffs, remainder }
}
