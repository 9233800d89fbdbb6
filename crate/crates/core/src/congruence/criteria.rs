//! Numerical criteria, the deformation step, the exterior-algebra check on
//! `tfree Ext(O, O)`, and invariance under surjections.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::{Analyzer, ResolutionConfig, Verdict};
use crate::algebra::AugmentedAlgebra;
use crate::dvr::{IdealO, Scalar};
use crate::error::{Error, Result};
use crate::fp_module::FpModule;
use crate::poly::{syzygy_module, Poly, PolyMat, Submodule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionMode {
    Defect0,
    Wld,
    Iso,
    CotangentIso,
}

impl std::str::FromStr for CriterionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "defect0" => CriterionMode::Defect0,
            "wld" => CriterionMode::Wld,
            "iso" => CriterionMode::Iso,
            "cotangent_iso" | "cotangent-iso" => CriterionMode::CotangentIso,
            _ => return Err(Error::InvalidConfig(format!("unknown criterion mode {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub mode: CriterionMode,
    pub verdict: Verdict,
    pub conditions: BTreeMap<String, bool>,
    pub lengths: BTreeMap<String, Option<u32>>,
    pub notes: Vec<String>,
}

/// `phi: A -> B` on polynomial presentations over the same variables'
/// base ring: `images[i]` is `phi(x_i)` as a polynomial on `B`'s variables.
#[derive(Clone, Debug)]
pub struct RingMap {
    pub images: Vec<Poly>,
}

/// A validated surjection with a section `sigma` on the variables of `B`.
struct Surjection {
    sigma: Vec<Poly>,
}

impl RingMap {
    /// Checks well-definedness, compatibility with the augmentations, and
    /// surjectivity witnessed by `phi(x_i) - y_k` constant in `B`.
    fn validate(&self, a: &AugmentedAlgebra, b: &AugmentedAlgebra) -> Result<Surjection> {
        let o = a.dvr();
        if a.dvr() != b.dvr() {
            return Err(Error::NotASurjection("the base rings differ".into()));
        }
        if self.images.len() != a.nvars() {
            return Err(Error::DimensionMismatch {
                expected: a.nvars(),
                found: self.images.len(),
            });
        }
        let bq = b.quotient();
        for (i, img) in self.images.iter().enumerate() {
            if img.nvars() != b.nvars() {
                return Err(Error::DimensionMismatch {
                    expected: b.nvars(),
                    found: img.nvars(),
                });
            }
            img.require_integral(o)?;
            if b.lambda(img) != a.point()[i] {
                return Err(Error::NotASurjection(format!(
                    "lambda_B(phi({})) differs from lambda_A",
                    a.ring().vars()[i]
                )));
            }
        }
        for f in a.relations() {
            if !bq.is_zero(&f.substitute(o, &self.images, b.nvars())) {
                return Err(Error::NotASurjection(format!(
                    "the relation {} does not map to zero",
                    a.ring().show(f)
                )));
            }
        }
        let mut sigma = Vec::with_capacity(b.nvars());
        for k in 0..b.nvars() {
            let y = b.ring().var(k);
            let hit = self.images.iter().enumerate().find_map(|(i, img)| {
                bq.reduce(&img.sub(&y))
                    .as_constant(o)
                    .map(|c| a.ring().var(i).sub(&a.ring().constant(c)))
            });
            match hit {
                Some(s) => sigma.push(s),
                None => {
                    return Err(Error::NotASurjection(format!(
                        "{} is not hit by a variable",
                        b.ring().vars()[k]
                    )))
                }
            }
        }
        Ok(Surjection { sigma })
    }

    /// A `B`-module `N` viewed over `A` by restriction of scalars.
    pub fn restrict(
        &self,
        a: &Arc<AugmentedAlgebra>,
        n: &FpModule,
    ) -> Result<FpModule> {
        let b = n.algebra();
        let s = self.validate(a, b)?;
        let o = a.dvr();
        let na = a.nvars();
        // ker(O[x] -> B) = (x_j - sigma(phi(x_j))) + sigma(I_B)
        let mut kernel: Vec<Poly> = (0..na)
            .map(|j| {
                let back = self.images[j].substitute(o, &s.sigma, na);
                a.ring().var(j).sub(&back)
            })
            .collect();
        kernel.extend(b.relations().iter().map(|f| f.substitute(o, &s.sigma, na)));
        let kernel: Vec<Poly> = kernel
            .into_iter()
            .map(|f| a.quotient().reduce(&f))
            .filter(|f| !f.is_zero())
            .collect();
        let pb = n.presentation();
        let g = pb.nrows();
        let mut cols: Vec<Vec<Poly>> = pb
            .columns()
            .iter()
            .map(|c| c.iter().map(|p| p.substitute(o, &s.sigma, na)).collect())
            .collect();
        for t in 0..g {
            for f in &kernel {
                let mut v = vec![Poly::zero(na); g];
                v[t] = f.clone();
                cols.push(v);
            }
        }
        Ok(FpModule::new(a.clone(), PolyMat::from_columns(na, g, &cols))?
            .with_assertions(n.asserted_depth(), n.asserted_mcm()))
    }
}

/// Whether `depth_A M >= c + 1` is asserted or, at `c = 0` for `M` finite
/// over `O`, verified as `O`-torsion-freeness of `M`.
fn depth_hypothesis(an: &Analyzer, m: &FpModule, notes: &mut Vec<String>) -> Result<bool> {
    let c = an.codim();
    if m.asserted_mcm() || m.asserted_depth().is_some_and(|d| d as usize > c) {
        notes.push(format!("depth >= {} asserted", c + 1));
        return Ok(true);
    }
    if c == 0 {
        match m.o_structure() {
            Ok(of) => {
                let torsion_free = of.module()?.torsion_exponents().is_empty();
                notes.push(format!(
                    "M is finite over O and {}O-torsion-free, so depth {} 1",
                    if torsion_free { "" } else { "not " },
                    if torsion_free { ">=" } else { "=" },
                ));
                return Ok(torsion_free);
            }
            Err(Error::NotFiniteOverBase) => {}
            Err(e) => return Err(e),
        }
    }
    notes.push(format!("depth >= {} not asserted", c + 1));
    Ok(false)
}

pub fn numerical_criterion(
    an: &Analyzer,
    m: &FpModule,
    mode: CriterionMode,
    extra: Option<(&Analyzer, &RingMap)>,
) -> Result<CriterionReport> {
    let c = an.codim();
    let mut conditions = BTreeMap::new();
    let mut lengths = BTreeMap::new();
    let mut notes = Vec::new();
    let alg = an.algebra();
    let cot = alg.cotangent_invariants()?;
    let phi_len = cot.phi.length();
    lengths.insert("phi_a".to_string(), phi_len);
    let verdict = match mode {
        CriterionMode::Defect0 | CriterionMode::Wld => {
            if mode == CriterionMode::Wld && c != 0 {
                return Err(Error::InconsistentCodim {
                    declared: c,
                    reason: "the Wiles-Lenstra-Diamond criterion is the codimension 0 case".into(),
                });
            }
            let eta = an.eta(m)?.ideal;
            let psi = an.psi(m)?;
            let mu = m.reduce_mod_p()?.mu as u32;
            lengths.insert("psi_m".to_string(), psi.length());
            lengths.insert("mu".to_string(), Some(mu));
            let cond2 = cot.fitt_c == eta;
            let cond3 = phi_len.map(|l| mu * l) == psi.length();
            conditions.insert("fitting_equals_eta".to_string(), cond2);
            conditions.insert("lengths_match".to_string(), cond3);
            let ext = an.ext(m, c)?;
            let tf = ext.structure.torsion_exponents().is_empty();
            conditions.insert("ext_c_torsion_free".to_string(), tf);
            let hyp = depth_hypothesis(an, m, &mut notes)?;
            if !hyp {
                Verdict::HypothesisUnverified
            } else if !tf {
                notes.push("Ext^c(O,M) has torsion, contradicting the depth hypothesis".into());
                Verdict::HypothesisUnverified
            } else if cond2 != cond3 {
                notes.push("the two conditions disagree".into());
                Verdict::HypothesisUnverified
            } else {
                Verdict::from_bool(cond2)
            }
        }
        CriterionMode::Iso | CriterionMode::CotangentIso => {
            let (bn, map) = extra.ok_or_else(|| {
                Error::InvalidConfig("this criterion needs a target algebra and a map".into())
            })?;
            let b = bn.algebra();
            if b.codim() != c {
                return Err(Error::NotSameCodim(c, b.codim()));
            }
            let (rhs, hyp) = if mode == CriterionMode::Iso {
                let nb = map.restrict(alg, &FpModule::ring(b.clone()))?;
                let psi = an.psi(&nb)?;
                lengths.insert("psi_a_of_b".to_string(), psi.length());
                let hyp = alg.assertions().gorenstein && b.assertions().mcm;
                if !hyp {
                    notes.push("needs A Gorenstein and B Cohen-Macaulay (assertions)".into());
                }
                (psi.length(), hyp)
            } else {
                map.validate(alg, b)?;
                let phi_b = b.cotangent_invariants()?.phi.length();
                lengths.insert("phi_b".to_string(), phi_b);
                let hyp = b.assertions().ci;
                if !hyp {
                    notes.push("needs B a complete intersection (assertion)".into());
                }
                (phi_b, hyp)
            };
            let equal = phi_len == rhs;
            conditions.insert("lengths_match".to_string(), equal);
            match (equal, hyp) {
                (false, _) => Verdict::Fails,
                (true, true) => Verdict::Holds,
                (true, false) => Verdict::HypothesisUnverified,
            }
        }
    };
    Ok(CriterionReport {
        mode,
        verdict,
        conditions,
        lengths,
        notes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Deformation {
    #[serde(skip)]
    pub b: Arc<AugmentedAlgebra>,
    #[serde(skip)]
    pub n: FpModule,
    pub eta_a: IdealO,
    pub eta_b: IdealO,
    pub ord_f: IdealO,
    /// `length O/eta_B(N)`.
    pub lhs: Option<u32>,
    /// `length O/eta_A(M) + length O/ord([f])`.
    pub rhs: Option<u32>,
    pub exact_sequence_holds: bool,
    /// False when the zero-divisor search hit the degree bound.
    pub regularity_certified: bool,
}

/// `B = A/(f)`, `N = M/fM`, and the length form of the exact sequence.
pub fn deformation_step(an: &Analyzer, m: &FpModule, f: &Poly) -> Result<Deformation> {
    let alg = an.algebra();
    let c = an.codim();
    if c == 0 {
        return Err(Error::InconsistentCodim {
            declared: 0,
            reason: "a deformation step lowers the codimension".into(),
        });
    }
    let f = alg.quotient().reduce(f);
    let t = alg.symbolic_power_test(&f)?;
    if !t.in_p {
        return Err(Error::NotInAugmentationPrime);
    }
    if t.in_p2_symbolic {
        return Err(Error::InSymbolicSquare);
    }
    let regularity_certified = match nonzerodivisor(alg, m, &f) {
        Ok(true) => true,
        Ok(false) => return Err(Error::ZeroDivisorSuspected),
        Err(Error::DegreeBoundExceeded(_)) => false,
        Err(e) => return Err(e),
    };
    let b = Arc::new(alg.quotient_by(std::slice::from_ref(&f), c - 1)?);
    let n = m.quotient_by(&f)?.over(b.clone())?;
    let bn = Analyzer::new(b.clone(), ResolutionConfig::default());
    let eta_a = an.eta(m)?.ideal;
    let eta_b = bn.eta(&n)?.ideal;
    let lhs = eta_b.colength();
    let rhs = match (eta_a.colength(), t.ord_class.colength()) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    };
    Ok(Deformation {
        b,
        n,
        eta_a,
        eta_b,
        ord_f: t.ord_class,
        exact_sequence_holds: lhs.is_some() && lhs == rhs,
        lhs,
        rhs,
        regularity_certified,
    })
}

/// `f u in im P` implies `u in im P`, over generators of such `u`.
fn nonzerodivisor(alg: &AugmentedAlgebra, m: &FpModule, f: &Poly) -> Result<bool> {
    let q = alg.quotient();
    let g = m.generator_count();
    let n = alg.nvars();
    let p = m.presentation();
    let scaled = PolyMat::from_fn(n, g, g, |i, j| if i == j { f.clone() } else { Poly::zero(n) });
    let syz = syzygy_module(q, &scaled.hcat(p))?;
    let sub = Submodule::new(q, p)?;
    for col in syz.columns() {
        if !sub.contains(&col[..g])? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct SerreReport {
    pub ranks: Vec<usize>,
    pub expected: Vec<usize>,
    /// Whether the product of a basis of `Ext^1` generates `tfree Ext^c`.
    pub products_generate: Option<bool>,
    pub verdict: Verdict,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Ranks of `tfree Ext^i(O, O)` against `binomial(c, i)`, and optionally
/// the Yoneda product of a basis of `Ext^1`.
pub fn serre_check(an: &Analyzer, with_products: bool) -> Result<SerreReport> {
    an.require_regular()?;
    let c = an.codim();
    let res = an.resolution()?;
    let top = res.len().saturating_sub(1);
    let mut ranks = Vec::new();
    let mut expected = Vec::new();
    for i in 0..=top {
        ranks.push(an.ext_oo(i)?.free_rank());
        expected.push(binomial(c, i));
    }
    let products_generate = if with_products {
        Some(products_generate(an)?)
    } else {
        None
    };
    let ok = ranks == expected && products_generate != Some(false);
    Ok(SerreReport {
        ranks,
        expected,
        products_generate,
        verdict: Verdict::from_bool(ok),
    })
}

fn products_generate(an: &Analyzer) -> Result<bool> {
    let alg = &**an.algebra();
    let o = alg.dvr();
    let c = an.codim();
    let res = an.resolution()?;
    res.require(c + 1)?;
    if c == 0 {
        let top = an.ext_oo(0)?;
        let coords = top.base_class(alg, &[o.one()])?;
        return Ok(top.free_part(alg, &coords)?.first().is_some_and(|x| o.is_unit(x)));
    }
    let ext1 = an.ext_oo(1)?;
    if ext1.free_rank() != c {
        return Ok(false);
    }
    let basis: Vec<Vec<Scalar>> = (0..c)
        .map(|k| ext1.free_generator_cocycle_base(alg, k).expect("rank checked"))
        .collect();
    let mut phi = basis[0].clone();
    for (j, y) in basis.iter().enumerate().skip(1) {
        // lift y to alpha_j : F_{j+1} -> F_j and compose
        let alpha = lift_cocycle(alg, &res, y, j)?;
        let la = alg.lambda_mat(&alpha);
        phi = (0..la.ncols())
            .map(|l| (0..la.nrows()).fold(o.zero(), |acc, r| acc.add(&phi[r].mul(&la[(r, l)]))))
            .collect();
    }
    let top = an.ext_oo(c)?;
    let coords = top.base_class(alg, &phi)?;
    let free = top.free_part(alg, &coords)?;
    Ok(free.len() == 1 && o.is_unit(&free[0]))
}

/// The component `F_{j+1} -> F_j` of a chain map lifting the degree-one
/// cocycle `y`.
fn lift_cocycle(
    alg: &AugmentedAlgebra,
    res: &crate::resolution::FreeResolution,
    y: &[Scalar],
    j: usize,
) -> Result<PolyMat> {
    let q = alg.quotient();
    let n = alg.nvars();
    let mut alpha = PolyMat::from_fn(n, 1, y.len(), |_, l| Poly::constant(n, y[l].clone()));
    for k in 1..=j {
        let rhs = q.reduce_mat(&alpha.mul(res.d(k + 1)));
        let sub = Submodule::new(q, res.d(k)).map_err(|e| match e {
            Error::DegreeBoundExceeded(d) => {
                Error::ProductLiftFailed(format!("degree bound {d} reached in degree {k}"))
            }
            e => e,
        })?;
        let mut cols = Vec::with_capacity(rhs.ncols());
        for col in rhs.columns() {
            let lift = sub.lift(&col)?.ok_or_else(|| {
                Error::ProductLiftFailed(format!("no lift through d_{k}"))
            })?;
            cols.push(lift);
        }
        alpha = PolyMat::from_columns(n, res.rank(k), &cols);
    }
    Ok(alpha)
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub eta_source: IdealO,
    pub eta_target: IdealO,
    pub verdict: Verdict,
}

/// `eta_{lambda_A}(N)` against `eta_{lambda_B}(N)` for a surjection
/// `A -> B` and a `B`-module `N`.
pub fn invariance_check(
    source: &Analyzer,
    target: &Analyzer,
    map: &RingMap,
    n: &FpModule,
) -> Result<InvarianceReport> {
    let (ca, cb) = (source.codim(), target.codim());
    if ca != cb {
        return Err(Error::NotSameCodim(ca, cb));
    }
    let na = map.restrict(source.algebra(), n)?;
    let eta_source = source.eta(&na)?.ideal;
    let eta_target = target.eta(n)?.ideal;
    Ok(InvarianceReport {
        eta_source,
        eta_target,
        verdict: Verdict::from_bool(eta_source == eta_target),
    })
}
