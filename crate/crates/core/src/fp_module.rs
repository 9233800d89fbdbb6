//! Finitely presented modules `M = coker(P)` over an augmented algebra,
//! where `P` is a `g x s` matrix over `A` whose columns are relations.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::AugmentedAlgebra;
use crate::dvr::{o_module_from_presentation, subquotient, Dvr, FinOModule, Mat};
use crate::error::{Error, Result};
use crate::poly::{syzygy_module, Monomial, MonomialOrder, Poly, PolyMat, StdBasis};

#[derive(Clone, Debug)]
pub struct FpModule {
    alg: Arc<AugmentedAlgebra>,
    pres: PolyMat,
    asserted_depth: Option<u32>,
    asserted_mcm: bool,
}

/// `M/pM` over `O` and `mu = rank tfree(M/pM)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModP {
    pub quotient: FinOModule,
    pub mu: usize,
}

/// A basis `phi_s` of `Hom_O(M/pM, O)` (rows, on the generators of `M`)
/// with elements `m_s` of `M` (columns) such that `phi_s(m_t) = delta_st`.
#[derive(Clone, Debug)]
pub struct DualBasis {
    pub functionals: Mat,
    pub dual: Mat,
}

impl FpModule {
    /// `coker(pres)`; entries are reduced modulo the relations of `A`.
    pub fn new(alg: Arc<AugmentedAlgebra>, pres: PolyMat) -> Result<Self> {
        if pres.nvars() != alg.nvars() {
            return Err(Error::DimensionMismatch {
                expected: alg.nvars(),
                found: pres.nvars(),
            });
        }
        for p in pres.entries() {
            p.require_integral(alg.dvr())?;
        }
        let pres = alg.quotient().reduce_mat(&pres);
        Ok(FpModule {
            alg,
            pres,
            asserted_depth: None,
            asserted_mcm: false,
        })
    }

    pub fn free(alg: Arc<AugmentedAlgebra>, rank: usize) -> Self {
        let n = alg.nvars();
        FpModule {
            alg,
            pres: PolyMat::zeros(n, rank, 0),
            asserted_depth: None,
            asserted_mcm: false,
        }
    }

    /// `M = A`.
    pub fn ring(alg: Arc<AugmentedAlgebra>) -> Self {
        FpModule::free(alg, 1)
    }

    /// `M = A/p = O`.
    pub fn residue(alg: Arc<AugmentedAlgebra>) -> Self {
        let gens = alg.p_generators();
        let pres = PolyMat::from_fn(alg.nvars(), 1, gens.len(), |_, j| gens[j].clone());
        FpModule::new(alg, pres).expect("generators of p are integral")
    }

    pub fn with_assertions(mut self, depth: Option<u32>, mcm: bool) -> Self {
        self.asserted_depth = depth;
        self.asserted_mcm = mcm;
        self
    }

    pub fn algebra(&self) -> &Arc<AugmentedAlgebra> {
        &self.alg
    }

    pub fn presentation(&self) -> &PolyMat {
        &self.pres
    }

    pub fn generator_count(&self) -> usize {
        self.pres.nrows()
    }

    pub fn asserted_depth(&self) -> Option<u32> {
        self.asserted_depth
    }

    pub fn asserted_mcm(&self) -> bool {
        self.asserted_mcm
    }

    /// Block-diagonal presentation of `M (+) N`.
    pub fn direct_sum(&self, other: &FpModule) -> Result<FpModule> {
        let (g1, s1) = (self.pres.nrows(), self.pres.ncols());
        let (g2, s2) = (other.pres.nrows(), other.pres.ncols());
        let n = self.alg.nvars();
        let pres = PolyMat::from_fn(n, g1 + g2, s1 + s2, |i, j| match (i < g1, j < s1) {
            (true, true) => self.pres[(i, j)].clone(),
            (false, false) => other.pres[(i - g1, j - s1)].clone(),
            _ => Poly::zero(n),
        });
        let depth = match (self.asserted_depth, other.asserted_depth) {
            (Some(a), Some(b)) => Some(a.min(b)),
            _ => None,
        };
        Ok(FpModule::new(self.alg.clone(), pres)?
            .with_assertions(depth, self.asserted_mcm && other.asserted_mcm))
    }

    /// `M/fM`.
    pub fn quotient_by(&self, f: &Poly) -> Result<FpModule> {
        let n = self.alg.nvars();
        let g = self.generator_count();
        let extra = PolyMat::from_fn(n, g, g, |i, j| if i == j { f.clone() } else { Poly::zero(n) });
        FpModule::new(self.alg.clone(), self.pres.hcat(&extra))
    }

    /// The same presentation over another algebra on the same variables.
    pub fn over(&self, alg: Arc<AugmentedAlgebra>) -> Result<FpModule> {
        Ok(FpModule::new(alg, self.pres.clone())?.with_assertions(self.asserted_depth, self.asserted_mcm))
    }

    /// `lambda(P)`: a presentation of `M/pM` over `O`.
    pub fn lambda_presentation(&self) -> Mat {
        self.alg.lambda_mat(&self.pres)
    }

    pub fn reduce_mod_p(&self) -> Result<ModP> {
        let quotient = o_module_from_presentation(self.alg.dvr(), &self.lambda_presentation())?;
        Ok(ModP {
            mu: quotient.free_rank(),
            quotient,
        })
    }

    /// Functionals from the rows of `U` past the rank in `U lambda(P) V = D`,
    /// dual elements from the matching columns of `U^{-1}`.
    pub fn dual_basis(&self) -> Result<DualBasis> {
        let o = self.alg.dvr();
        let lp = self.lambda_presentation();
        let g = lp.nrows();
        let s = lp.smith(o)?;
        let functionals = s.u.select_rows(s.rank..g);
        let dual = s.u_inv.select_cols(s.rank..g);
        if !functionals.mul(o, &lp).is_zero() {
            return Err(Error::InternalInvariantViolation(
                "functional does not vanish on a relation".into(),
            ));
        }
        Ok(DualBasis { functionals, dual })
    }

    /// An `O`-basis of `Hom_A(M, O)`, as rows of values on the generators.
    pub fn hom_to_o_generators(&self) -> Result<Vec<Vec<crate::dvr::Scalar>>> {
        let d = self.dual_basis()?;
        Ok((0..d.functionals.nrows())
            .map(|i| d.functionals.row(i).to_vec())
            .collect())
    }

    /// `M` as an `O`-module when it is module-finite.
    pub fn o_structure(&self) -> Result<OFinite> {
        OFinite::new(self)
    }

    /// `M[J] = {x in M : J x = 0}` as an `O`-module.
    pub fn torsion_submodule(&self, j: &[Poly]) -> Result<FinOModule> {
        let of = self.o_structure()?;
        let k = of.torsion_generators(j)?;
        subquotient(self.alg.dvr(), &k.hcat(&of.relations), &of.relations)
    }
}

/// A module-finite `M` as `O^S / Rel`, where `S` are the standard terms of
/// `im P + I A^g` that no unit-led basis element divides.
#[derive(Clone, Debug)]
pub struct OFinite {
    dvr: Dvr,
    g: usize,
    nvars: usize,
    terms: Vec<(usize, Monomial)>,
    index: HashMap<(usize, Monomial), usize>,
    basis: StdBasis,
    pub relations: Mat,
}

/// Cap on the number of standard terms.
const MAX_STANDARD_TERMS: usize = 4096;

impl OFinite {
    fn new(m: &FpModule) -> Result<OFinite> {
        let alg = &m.alg;
        let o = alg.dvr().clone();
        let n = alg.nvars();
        let g = m.generator_count();
        let mut gens: Vec<Vec<Poly>> = m.pres.columns();
        for f in alg.quotient().basis().polys() {
            for i in 0..g {
                let mut v = vec![Poly::zero(n); g];
                v[i] = f.clone();
                gens.push(v);
            }
        }
        let basis = StdBasis::module(
            &o,
            n,
            g,
            &gens,
            MonomialOrder::GlobalDegRevLex,
            alg.bounds(),
        )?;
        let leads = basis.leading_terms();
        let standard = |comp: usize, mon: &Monomial| {
            !leads
                .iter()
                .any(|(c, lm, v)| *c == comp && *v == 0 && lm.divides(mon))
        };
        let mut terms: Vec<(usize, Monomial)> = Vec::new();
        for comp in 0..g {
            let mut layer: Vec<Monomial> = vec![Monomial::one(n)];
            let mut degree = 0;
            while !layer.is_empty() {
                layer.retain(|m| standard(comp, m));
                if degree > alg.bounds().degree && !layer.is_empty() {
                    return Err(Error::NotFiniteOverBase);
                }
                let mut next: Vec<Monomial> = Vec::new();
                for m in &layer {
                    for i in 0..n {
                        let x = m.mul(&Monomial::var(n, i));
                        if !next.contains(&x) {
                            next.push(x);
                        }
                    }
                }
                terms.extend(layer.drain(..).map(|m| (comp, m)));
                if terms.len() > MAX_STANDARD_TERMS {
                    return Err(Error::NotFiniteOverBase);
                }
                layer = next;
                degree += 1;
            }
        }
        let index: HashMap<(usize, Monomial), usize> =
            terms.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let mut out = OFinite {
            dvr: o.clone(),
            g,
            nvars: n,
            terms,
            index,
            basis,
            relations: Mat::zeros(&o, 0, 0),
        };
        let mut rels: Vec<Vec<crate::dvr::Scalar>> = Vec::new();
        for (comp, mon) in out.terms.clone() {
            let Some(v) = out.basis.staircase_valuation(comp, &mon) else {
                continue;
            };
            let mut vec = vec![Poly::zero(n); g];
            vec[comp] = Poly::monomial(mon.clone(), o.pi_pow(v));
            let mut col = vec![o.zero(); out.terms.len()];
            col[out.index[&(comp, mon)]] = o.pi_pow(v);
            let nf = out.coords(&vec)?;
            for (c, x) in col.iter_mut().zip(nf) {
                *c = c.sub(&x);
            }
            rels.push(col);
        }
        let nt = out.terms.len();
        out.relations = Mat::from_fn(nt, rels.len(), |i, j| rels[j][i].clone());
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn module(&self) -> Result<FinOModule> {
        o_module_from_presentation(&self.dvr, &self.relations)
    }

    /// Coordinates on the standard terms of the canonical normal form.
    pub fn coords(&self, v: &[Poly]) -> Result<Vec<crate::dvr::Scalar>> {
        let red = self.basis.reduce(v, true)?;
        let mut out = vec![self.dvr.zero(); self.terms.len()];
        for (comp, p) in red.iter().enumerate() {
            for (m, c) in p.terms() {
                let i = self.index.get(&(comp, m.clone())).ok_or_else(|| {
                    Error::InternalInvariantViolation("normal form left the standard terms".into())
                })?;
                out[*i] = c.clone();
            }
        }
        Ok(out)
    }

    /// Matrix of multiplication by `f` on the standard terms.
    pub fn mult_matrix(&self, f: &Poly) -> Result<Mat> {
        let nt = self.terms.len();
        let mut cols = Vec::with_capacity(nt);
        for (comp, mon) in &self.terms {
            let mut v = vec![Poly::zero(self.nvars); self.g];
            v[*comp] = f.mul_term(mon, &self.dvr.one());
            cols.push(self.coords(&v)?);
        }
        Ok(Mat::from_fn(nt, nt, |i, j| cols[j][i].clone()))
    }

    /// Lifts to `O^S` of generators of `M[J]`.
    pub fn torsion_generators(&self, j: &[Poly]) -> Result<Mat> {
        let o = &self.dvr;
        let nt = self.terms.len();
        let nr = self.relations.ncols();
        let t = j.len();
        if t == 0 {
            return Ok(Mat::identity(o, nt));
        }
        // [T_1; ..; T_t | -diag(Rel, .., Rel)]
        let mut big = Mat::zeros(o, t * nt, nt + t * nr);
        for (b, f) in j.iter().enumerate() {
            let tm = self.mult_matrix(f)?;
            for r in 0..nt {
                for c in 0..nt {
                    big[(b * nt + r, c)] = tm[(r, c)].clone();
                }
                for c in 0..nr {
                    big[(b * nt + r, nt + b * nr + c)] = self.relations[(r, c)].neg();
                }
            }
        }
        let k = big.kernel_basis(o)?;
        Ok(k.select_rows(0..nt))
    }
}

/// Generators of `A[p] = ann_A(p)`.
pub fn annihilator_of_p(alg: &AugmentedAlgebra) -> Result<Vec<Poly>> {
    let gens = alg.p_generators();
    let col = PolyMat::from_fn(alg.nvars(), gens.len(), 1, |i, _| gens[i].clone());
    let s = syzygy_module(alg.quotient(), &col)?;
    Ok((0..s.ncols()).map(|j| s[(0, j)].clone()).filter(|p| !p.is_zero()).collect())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::algebra::Assertions;
    use crate::dvr::Dvr;
    use crate::poly::{parse_scalar, Bounds, PolyRing};

    pub(crate) fn alg(p: u64, vars: &[&str], rels: &[&str], point: &[&str], c: usize) -> Arc<AugmentedAlgebra> {
        let o = Dvr::p_adic(p).unwrap();
        let r = PolyRing::new(o.clone(), vars.iter().map(|s| s.to_string()).collect()).unwrap();
        let rels = rels.iter().map(|s| r.parse(s).unwrap()).collect();
        let pt = point.iter().map(|s| parse_scalar(&o, s).unwrap()).collect();
        Arc::new(
            AugmentedAlgebra::new(r, rels, pt, c, Assertions::default(), Bounds::default()).unwrap(),
        )
    }

    pub(crate) fn a_n(p: u64, n: u32, at: &str) -> Arc<AugmentedAlgebra> {
        alg(p, &["x"], &[&format!("x*(x - pi^{n})")], &[at], 0)
    }

    #[test]
    fn mod_p_ranks() {
        let a = a_n(5, 2, "0");
        let m = FpModule::ring(a.clone());
        assert_eq!(m.reduce_mod_p().unwrap().mu, 1);
        assert_eq!(m.direct_sum(&m).unwrap().reduce_mod_p().unwrap().mu, 2);
        let o = FpModule::residue(a.clone());
        let mp = o.reduce_mod_p().unwrap();
        assert_eq!((mp.quotient.clone(), mp.mu), (FinOModule::new(vec![], 1), 1));
    }

    #[test]
    fn functionals_vanish_on_relations() {
        let a = a_n(5, 2, "0");
        let r = a.ring().clone();
        let pres = PolyMat::from_fn(1, 2, 1, |i, _| {
            if i == 0 { r.parse("pi").unwrap() } else { r.parse("0").unwrap() }
        });
        let m = FpModule::new(a.clone(), pres).unwrap();
        let d = m.dual_basis().unwrap();
        assert_eq!(d.functionals.nrows(), 1);
        let ev = d.functionals.mul(a.dvr(), &d.dual);
        assert_eq!(ev, Mat::identity(a.dvr(), 1));
        let two = FpModule::free(a.clone(), 2).dual_basis().unwrap();
        assert_eq!(two.functionals.mul(a.dvr(), &two.dual), Mat::identity(a.dvr(), 2));
    }

    #[test]
    fn torsion_in_a_n() {
        for n in 1..4u32 {
            let a = a_n(3, n, "0");
            let m = FpModule::ring(a.clone());
            let of = m.o_structure().unwrap();
            assert_eq!(of.module().unwrap(), FinOModule::new(vec![], 2));
            let mp = m.torsion_submodule(&a.p_generators()).unwrap();
            assert_eq!(mp, FinOModule::new(vec![], 1));
            assert_eq!(m.torsion_submodule(&[]).unwrap(), FinOModule::new(vec![], 2));
            let ann = annihilator_of_p(&a).unwrap();
            assert_eq!(m.torsion_submodule(&ann).unwrap(), FinOModule::new(vec![], 1));
        }
    }

    #[test]
    fn not_module_finite() {
        let a = alg(5, &["x", "y"], &["x*(x - pi)"], &["0", "0"], 1);
        assert!(matches!(
            FpModule::ring(a).o_structure(),
            Err(Error::NotFiniteOverBase)
        ));
    }
}
