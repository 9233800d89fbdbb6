//! Strong standard bases over the valuation ring.
//!
//! A term `c * m * e_k` is divisible by `d * n * e_k` when `n | m` and
//! `v(d) <= v(c)`. Because the coefficient ring is a valuation ring, the
//! ideal of leading coefficients of any set of terms is generated by one of
//! them, so S-pairs alone (no gcd pairs) give a strong basis.
//!
//! Global orders run Buchberger's algorithm with the Gebauer-Möller pair
//! update. Local orders use Mora's ecart-driven weak normal form.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::order::{cmp_pot, MonomialOrder, Term};
use super::{Monomial, Poly};
use crate::dvr::{Dvr, Scalar};
use crate::error::{Error, Result};

pub const DEFAULT_DEGREE_BOUND: u32 = 24;
pub const DEFAULT_VALUATION_BOUND: u32 = 64;

/// Search caps. Exceeding one is an error, never a silent truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub degree: u32,
    pub valuation: u32,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            degree: DEFAULT_DEGREE_BOUND,
            valuation: DEFAULT_VALUATION_BOUND,
        }
    }
}

/// Sparse module element, terms sorted descending in the position-over-term
/// order; no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Vect {
    pub terms: Vec<(Term, Scalar)>,
}

impl Vect {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> &(Term, Scalar) {
        &self.terms[0]
    }

    pub fn from_polys(order: MonomialOrder, comps: &[Poly]) -> Self {
        let mut terms: Vec<(Term, Scalar)> = Vec::new();
        for (k, p) in comps.iter().enumerate() {
            for (m, c) in p.terms() {
                terms.push((
                    Term {
                        comp: k as u32,
                        mon: m.clone(),
                    },
                    c.clone(),
                ));
            }
        }
        terms.sort_by(|a, b| cmp_pot(order, &b.0, &a.0));
        Vect { terms }
    }

    pub fn to_polys(&self, nvars: usize, rank: usize) -> Vec<Poly> {
        let mut buckets: Vec<Vec<(Monomial, Scalar)>> = vec![Vec::new(); rank];
        for (t, c) in &self.terms {
            buckets[t.comp as usize].push((t.mon.clone(), c.clone()));
        }
        buckets
            .into_iter()
            .map(|b| Poly::from_terms(nvars, b))
            .collect()
    }

    pub fn scale(&self, c: &Scalar) -> Vect {
        Vect {
            terms: self
                .terms
                .iter()
                .map(|(t, a)| (t.clone(), a.mul(c)))
                .collect(),
        }
    }

    /// `self - c * m * g`.
    pub fn sub_mul(&self, order: MonomialOrder, c: &Scalar, m: &Monomial, g: &Vect) -> Vect {
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let shifted = g.terms.iter().map(|(t, a)| {
            (
                Term {
                    comp: t.comp,
                    mon: t.mon.mul(m),
                },
                a.mul(c),
            )
        });
        let mut i = 0;
        for (t, a) in shifted {
            while i < self.terms.len() && cmp_pot(order, &self.terms[i].0, &t) == Ordering::Greater {
                out.push(self.terms[i].clone());
                i += 1;
            }
            if i < self.terms.len() && self.terms[i].0 == t {
                let d = self.terms[i].1.sub(&a);
                if !d.is_zero() {
                    out.push((t, d));
                }
                i += 1;
            } else {
                out.push((t, a.neg()));
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        Vect { terms: out }
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.iter().map(|(t, _)| t.mon.degree()).max().unwrap_or(0)
    }

    /// `max degree - lead degree`.
    fn ecart(&self) -> u32 {
        self.max_degree() - self.lead().0.mon.degree()
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Elem {
    pub v: Vect,
    pub lead_val: u32,
}

impl Elem {
    fn lead_term(&self) -> &Term {
        &self.v.lead().0
    }
}

/// Does the term `(t, val)` divide `(u, wal)`?
fn term_divides(t: &Term, val: u32, u: &Term, wal: u32) -> bool {
    t.comp == u.comp && val <= wal && t.mon.divides(&u.mon)
}

fn normalize_lead(o: &Dvr, v: Vect) -> (Vect, u32) {
    let (unit, val) = o.split(&v.lead().1);
    let v = if unit.is_one() {
        v
    } else {
        v.scale(&unit.inv())
    };
    (v, val as u32)
}

fn coeff_val(o: &Dvr, c: &Scalar) -> u32 {
    o.valuation(c).expect("nonzero coefficient") as u32
}

/// A strong standard basis of a submodule of `R^rank` (an ideal when
/// `rank == 1`).
#[derive(Clone, Debug)]
pub struct StdBasis {
    dvr: Dvr,
    nvars: usize,
    rank: usize,
    order: MonomialOrder,
    elems: Vec<Elem>,
    bounds: Bounds,
}

impl StdBasis {
    /// Strong standard basis of the ideal generated by `gens`.
    pub fn ideal(
        o: &Dvr,
        nvars: usize,
        gens: &[Poly],
        order: MonomialOrder,
        bounds: Bounds,
    ) -> Result<StdBasis> {
        let vs: Vec<Vec<Poly>> = gens.iter().map(|g| vec![g.clone()]).collect();
        StdBasis::module(o, nvars, 1, &vs, order, bounds)
    }

    /// Strong standard basis of the submodule of `R^rank` generated by the
    /// given vectors.
    pub fn module(
        o: &Dvr,
        nvars: usize,
        rank: usize,
        gens: &[Vec<Poly>],
        order: MonomialOrder,
        bounds: Bounds,
    ) -> Result<StdBasis> {
        let mut input = Vec::with_capacity(gens.len());
        for g in gens {
            if g.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: g.len(),
                });
            }
            for p in g {
                p.require_integral(o)?;
            }
            let v = Vect::from_polys(order, g);
            if !v.is_zero() {
                input.push(v);
            }
        }
        let elems = match order {
            MonomialOrder::GlobalDegRevLex => buchberger(o, order, rank == 1, input, bounds)?,
            MonomialOrder::LocalDegRevLex => mora_basis(o, order, input, bounds)?,
        };
        Ok(StdBasis {
            dvr: o.clone(),
            nvars,
            rank,
            order,
            elems,
            bounds,
        })
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn dvr(&self) -> &Dvr {
        &self.dvr
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Basis elements of an ideal basis as polynomials.
    pub fn polys(&self) -> Vec<Poly> {
        assert_eq!(self.rank, 1, "polys() on a module basis");
        self.vectors().into_iter().map(|mut v| v.remove(0)).collect()
    }

    pub fn vectors(&self) -> Vec<Vec<Poly>> {
        self.elems
            .iter()
            .map(|e| e.v.to_polys(self.nvars, self.rank))
            .collect()
    }

    /// Leading terms as (component, monomial, coefficient valuation).
    pub fn leading_terms(&self) -> Vec<(usize, Monomial, u32)> {
        self.elems
            .iter()
            .map(|e| (e.lead_term().comp as usize, e.lead_term().mon.clone(), e.lead_val))
            .collect()
    }

    /// True when the basis contains a unit of the (localized) ring.
    pub fn is_unit_ideal(&self) -> bool {
        self.elems
            .iter()
            .any(|e| e.lead_val == 0 && e.lead_term().mon.is_one())
    }

    /// Minimal leading-coefficient valuation over basis elements whose
    /// leading term divides `(comp, m)`, if any.
    pub fn staircase_valuation(&self, comp: usize, m: &Monomial) -> Option<u32> {
        self.elems
            .iter()
            .filter(|e| e.lead_term().comp as usize == comp && e.lead_term().mon.divides(m))
            .map(|e| e.lead_val)
            .min()
    }

    pub fn normal_form(&self, f: &Poly) -> Result<Poly> {
        assert_eq!(self.rank, 1, "normal_form on a module basis");
        Ok(self.reduce(&[f.clone()], false)?.remove(0))
    }

    /// Normal form whose coefficients are canonical residues modulo the
    /// leading-coefficient valuation of the staircase at each monomial; two
    /// polynomials are congruent modulo the ideal iff these agree. Global
    /// orders only.
    pub fn canonical_form(&self, f: &Poly) -> Result<Poly> {
        assert_eq!(self.rank, 1, "canonical_form on a module basis");
        Ok(self.reduce(&[f.clone()], true)?.remove(0))
    }

    pub fn contains(&self, f: &Poly) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Normal form of a vector.
    pub fn reduce(&self, f: &[Poly], canonical: bool) -> Result<Vec<Poly>> {
        if f.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: f.len(),
            });
        }
        let v = Vect::from_polys(self.order, f);
        let r = match self.order {
            MonomialOrder::GlobalDegRevLex => {
                full_reduce(&self.dvr, self.order, &self.elems, v, canonical)
            }
            MonomialOrder::LocalDegRevLex => {
                mora_nf(&self.dvr, self.order, &self.elems, v, self.bounds)?
            }
        };
        Ok(r.to_polys(self.nvars, self.rank))
    }

    pub(crate) fn reduce_vect(&self, v: Vect, canonical: bool) -> Vect {
        debug_assert!(self.order.is_global());
        full_reduce(&self.dvr, self.order, &self.elems, v, canonical)
    }

    /// Checks the S-pair criterion on the final basis. Used in tests.
    pub fn verify(&self) -> Result<bool> {
        for i in 0..self.elems.len() {
            for j in i + 1..self.elems.len() {
                let (a, b) = (&self.elems[i], &self.elems[j]);
                if a.lead_term().comp != b.lead_term().comp {
                    continue;
                }
                let s = spoly(self.order, a, b);
                let r = match self.order {
                    MonomialOrder::GlobalDegRevLex => {
                        full_reduce(&self.dvr, self.order, &self.elems, s, false)
                    }
                    MonomialOrder::LocalDegRevLex => {
                        mora_nf(&self.dvr, self.order, &self.elems, s, self.bounds)?
                    }
                };
                if !r.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn spoly(order: MonomialOrder, a: &Elem, b: &Elem) -> Vect {
    let (ta, tb) = (a.lead_term(), b.lead_term());
    let l = ta.mon.lcm(&tb.mon);
    let (ma, mb) = (ta.mon.quotient_of(&l), tb.mon.quotient_of(&l));
    let (ca, cb) = (&a.v.lead().1, &b.v.lead().1);
    // scale the element with the smaller leading valuation
    if a.lead_val <= b.lead_val {
        let f = cb.div(ca);
        shifted(&b.v, &mb).sub_mul(order, &f, &ma, &a.v)
    } else {
        let f = ca.div(cb);
        shifted(&a.v, &ma).sub_mul(order, &f, &mb, &b.v)
    }
}

fn shifted(v: &Vect, m: &Monomial) -> Vect {
    Vect {
        terms: v
            .terms
            .iter()
            .map(|(t, c)| {
                (
                    Term {
                        comp: t.comp,
                        mon: t.mon.mul(m),
                    },
                    c.clone(),
                )
            })
            .collect(),
    }
}

/// Finds the first reducer of the term `(t, c)`.
fn find_reducer<'a>(o: &Dvr, elems: &'a [Elem], t: &Term, c: &Scalar) -> Option<&'a Elem> {
    let v = coeff_val(o, c);
    elems
        .iter()
        .find(|e| term_divides(e.lead_term(), e.lead_val, t, v))
}

/// Full reduction for global orders: the leading term is reduced until
/// irreducible, then moved to the result, and so on down the tail.
fn full_reduce(o: &Dvr, order: MonomialOrder, elems: &[Elem], mut p: Vect, canonical: bool) -> Vect {
    let mut done: Vec<(Term, Scalar)> = Vec::new();
    while !p.is_zero() {
        let (t, c) = p.lead().clone();
        if let Some(g) = find_reducer(o, elems, &t, &c) {
            let m = g.lead_term().mon.quotient_of(&t.mon);
            let f = c.div(&g.v.lead().1);
            p = p.sub_mul(order, &f, &m, &g.v);
            continue;
        }
        if canonical {
            // reduce the coefficient to its residue modulo the staircase power
            let best = elems
                .iter()
                .filter(|e| e.lead_term().comp == t.comp && e.lead_term().mon.divides(&t.mon))
                .min_by_key(|e| e.lead_val);
            if let Some(g) = best {
                let r = o.reduce_mod_pi_pow(&c, g.lead_val);
                let q = c.sub(&r);
                if !q.is_zero() {
                    let m = g.lead_term().mon.quotient_of(&t.mon);
                    let f = q.div(&g.v.lead().1);
                    p = p.sub_mul(order, &f, &m, &g.v);
                    // the lead of p is now r * t (or gone when r = 0)
                    if p.terms.first().map(|x| &x.0) != Some(&t) {
                        continue;
                    }
                }
            }
        }
        let lead = p.terms.remove(0);
        done.push(lead);
    }
    Vect { terms: done }
}

/// Buchberger's algorithm with the Gebauer-Möller update. Elements made
/// redundant by a later leading term are kept as pair partners for pairs
/// already queued but do not generate new pairs.
fn buchberger(
    o: &Dvr,
    order: MonomialOrder,
    is_ideal: bool,
    input: Vec<Vect>,
    bounds: Bounds,
) -> Result<Vec<Elem>> {
    let mut all: Vec<Elem> = Vec::new();
    let mut active: Vec<bool> = Vec::new();
    // pairs keyed by (lcm degree, j, i) for a deterministic normal strategy
    let mut pairs: BTreeSet<(u32, usize, usize)> = BTreeSet::new();
    let mut todo: std::collections::VecDeque<Vect> = input.into();

    loop {
        let h = if let Some(v) = todo.pop_front() {
            v
        } else if let Some(&key) = pairs.iter().next() {
            pairs.remove(&key);
            let (_, j, i) = key;
            spoly(order, &all[i], &all[j])
        } else {
            break;
        };
        let reducers: Vec<Elem> = all
            .iter()
            .zip(&active)
            .filter(|(_, &a)| a)
            .map(|(e, _)| e.clone())
            .collect();
        let h = full_reduce(o, order, &reducers, h, false);
        if h.is_zero() {
            continue;
        }
        let (h, lead_val) = normalize_lead(o, h);
        if h.max_degree() > bounds.degree {
            return Err(Error::DegreeBoundExceeded(bounds.degree));
        }
        if lead_val > bounds.valuation {
            return Err(Error::ValuationBoundExceeded(bounds.valuation));
        }
        let new = Elem { v: h, lead_val };
        let k = all.len();
        let nt = new.lead_term().clone();

        // Gebauer-Möller: drop queued pairs whose lcm the new lead divides
        // strictly away from both partners.
        let stale: Vec<(u32, usize, usize)> = pairs
            .iter()
            .filter(|&&(_, j, i)| {
                let (a, b) = (&all[i], &all[j]);
                let lij = lcm_term(a, b);
                if !term_divides(&nt, new.lead_val, &lij.0, lij.1) {
                    return false;
                }
                lcm_term(a, &new) != lij && lcm_term(b, &new) != lij
            })
            .copied()
            .collect();
        for s in stale {
            pairs.remove(&s);
        }

        // new pairs, filtered by the chain criterion among themselves
        let mut cands: Vec<(usize, (Term, u32))> = Vec::new();
        for (i, e) in all.iter().enumerate() {
            if !active[i] || e.lead_term().comp != nt.comp {
                continue;
            }
            cands.push((i, lcm_term(e, &new)));
        }
        let mut keep: Vec<(usize, (Term, u32))> = Vec::new();
        for (idx, (i, l)) in cands.iter().enumerate() {
            // skip if another candidate's lcm properly divides this one
            let dominated = cands.iter().enumerate().any(|(jdx, (_, l2))| {
                jdx != idx
                    && term_divides(&l2.0, l2.1, &l.0, l.1)
                    && (l2 != l || jdx < idx)
            });
            if dominated {
                continue;
            }
            let e = &all[*i];
            if is_ideal
                && (e.lead_val == 0 || new.lead_val == 0)
                && e.lead_term().mon.is_coprime(&nt.mon)
            {
                continue;
            }
            keep.push((*i, l.clone()));
        }
        for (i, l) in keep {
            pairs.insert((l.0.mon.degree(), k, i));
        }

        for (i, e) in all.iter().enumerate() {
            if active[i] && term_divides(&nt, new.lead_val, e.lead_term(), e.lead_val) {
                active[i] = false;
            }
        }
        all.push(new);
        active.push(true);
    }

    let mut basis: Vec<Elem> = all
        .into_iter()
        .zip(active)
        .filter_map(|(e, a)| a.then_some(e))
        .collect();
    // tail-reduce each element against the others
    for i in 0..basis.len() {
        let others: Vec<Elem> = basis
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, e)| e.clone())
            .collect();
        let v = basis[i].v.clone();
        let lead = v.terms[0].clone();
        let tail = Vect {
            terms: v.terms[1..].to_vec(),
        };
        let mut t = full_reduce(o, order, &others, tail, false);
        t.terms.insert(0, lead);
        basis[i].v = t;
    }
    basis.sort_by(|a, b| cmp_pot(order, b.lead_term(), a.lead_term()).then(a.lead_val.cmp(&b.lead_val)));
    Ok(basis)
}

fn lcm_term(a: &Elem, b: &Elem) -> (Term, u32) {
    (
        Term {
            comp: a.lead_term().comp,
            mon: a.lead_term().mon.lcm(&b.lead_term().mon),
        },
        a.lead_val.max(b.lead_val),
    )
}

/// Mora's weak normal form for local orders. The result `h` satisfies
/// `u * f = h + (combination of basis elements)` with `u` a unit of the
/// localization.
fn mora_nf(o: &Dvr, order: MonomialOrder, elems: &[Elem], f: Vect, bounds: Bounds) -> Result<Vect> {
    let mut t: Vec<Elem> = elems.to_vec();
    let mut h = f;
    let mut steps = 0usize;
    while !h.is_zero() {
        steps += 1;
        if steps > 100_000 || h.lead().0.mon.degree() > bounds.degree {
            return Err(Error::DegreeBoundExceeded(bounds.degree));
        }
        let (lt, lc) = h.lead().clone();
        let v = coeff_val(o, &lc);
        let best = t
            .iter()
            .filter(|e| term_divides(e.lead_term(), e.lead_val, &lt, v))
            .min_by_key(|e| e.v.ecart());
        let Some(g) = best.cloned() else {
            return Ok(h);
        };
        if g.v.ecart() > h.ecart() {
            let (hn, hv) = normalize_lead(o, h.clone());
            t.push(Elem { v: hn, lead_val: hv });
        }
        let m = g.lead_term().mon.quotient_of(&lt.mon);
        h = h.sub_mul(order, &lc.div(&g.v.lead().1), &m, &g.v);
    }
    Ok(h)
}

fn mora_basis(o: &Dvr, order: MonomialOrder, input: Vec<Vect>, bounds: Bounds) -> Result<Vec<Elem>> {
    let mut basis: Vec<Elem> = Vec::new();
    let mut queue: std::collections::VecDeque<Vect> = input.into();
    let mut pairs: BTreeSet<(u32, usize, usize)> = BTreeSet::new();
    loop {
        let h = if let Some(v) = queue.pop_front() {
            v
        } else if let Some(&key) = pairs.iter().next() {
            pairs.remove(&key);
            spoly(order, &basis[key.2], &basis[key.1])
        } else {
            break;
        };
        let h = mora_nf(o, order, &basis, h, bounds)?;
        if h.is_zero() {
            continue;
        }
        let (h, lead_val) = normalize_lead(o, h);
        if lead_val > bounds.valuation {
            return Err(Error::ValuationBoundExceeded(bounds.valuation));
        }
        let new = Elem { v: h, lead_val };
        let k = basis.len();
        for (i, e) in basis.iter().enumerate() {
            if e.lead_term().comp == new.lead_term().comp {
                let l = lcm_term(e, &new);
                pairs.insert((l.0.mon.degree(), k, i));
            }
        }
        basis.push(new);
        if basis.len() > 4096 {
            return Err(Error::DegreeBoundExceeded(bounds.degree));
        }
    }
    // drop elements whose leading term another element divides
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            if i != j && keep[j] {
                let (a, b) = (&basis[j], &basis[i]);
                if term_divides(a.lead_term(), a.lead_val, b.lead_term(), b.lead_val)
                    && (a.lead_term() != b.lead_term() || a.lead_val != b.lead_val || j < i)
                {
                    keep[i] = false;
                    break;
                }
            }
        }
    }
    Ok(basis
        .into_iter()
        .zip(keep)
        .filter_map(|(e, k)| k.then_some(e))
        .collect())
}
