//! Congruence ideals `eta`, congruence modules `Psi`, the Künneth defect,
//! and the criteria built on them.
//!
//! `tfree Ext^c_A(O, O)` is identified with `O` through the free generator
//! of its Smith normal form; every `eta` is read against that generator.

mod criteria;
mod ext;
pub mod probe;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use parking_lot::RwLock;
use serde::Serialize;

use crate::algebra::{AugmentedAlgebra, CotangentData};
use crate::dvr::{o_module_from_presentation, FinOModule, IdealO, Mat, Scalar};
use crate::error::{Error, Result};
use crate::fp_module::{annihilator_of_p, FpModule};
use crate::poly::{Poly, PolyMat};
use crate::resolution::{resolve_o, Certification, FreeResolution, Strategy};

pub use criteria::{
    deformation_step, invariance_check, numerical_criterion, serre_check, CriterionMode,
    CriterionReport, Deformation, InvarianceReport, RingMap, SerreReport,
};
pub use ext::{ext_base, ext_module, ExtModule, Representatives};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    HypothesisUnverified,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::HypothesisUnverified => "hypothesis_unverified",
        })
    }
}

/// How to build the resolution of `O`.
#[derive(Clone, Debug)]
pub struct ResolutionConfig {
    pub strategy: Strategy,
    /// Defaults to `c + 2`.
    pub length: Option<usize>,
    pub user: Option<Vec<PolyMat>>,
}

impl Default for ResolutionConfig {
    fn default() -> Self {
        ResolutionConfig {
            strategy: Strategy::Auto,
            length: None,
            user: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Regularity {
    pub regular_at_p: bool,
    pub regular_global: bool,
    pub cotangent_rank: usize,
    pub eta_ring: IdealO,
    pub ext_top_free_rank: usize,
}

/// The pairing of `Ext^c(O, M)` with `Hom_A(M, O)`, valued in
/// `tfree Ext^c(O, O)`.
#[derive(Clone, Debug)]
struct TopPairing {
    /// `mu x k`; entry `(s, j)` pairs the `j`-th representative with `phi_s`.
    matrix: Mat,
    eta: IdealO,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EtaResult {
    pub ideal: IdealO,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KappaDefect {
    pub coker: FinOModule,
    pub coker_ann: IdealO,
    pub diff_identity: bool,
    pub sequence_identity: bool,
    pub mu: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceReport {
    pub codim: usize,
    pub mu: usize,
    pub eta: IdealO,
    pub psi: FinOModule,
    pub phi: FinOModule,
    pub fitt_c: IdealO,
    pub cotangent: FinOModule,
    pub regularity: Regularity,
    pub verdicts: BTreeMap<String, Verdict>,
    pub strategy: Strategy,
    pub certification: Certification,
    pub warnings: Vec<String>,
}

/// Per-algebra memo of the resolution and the `O`-valued Ext modules.
/// Safe to share between threads.
pub struct Analyzer {
    alg: Arc<AugmentedAlgebra>,
    config: ResolutionConfig,
    res: RwLock<Option<Arc<FreeResolution>>>,
    ext_oo: RwLock<HashMap<usize, Arc<ExtModule>>>,
    /// `Ext^c(O, M)` keyed by the presentation of `M`.
    ext_top: RwLock<Vec<(PolyMat, Arc<ExtModule>)>>,
    regularity: RwLock<Option<Regularity>>,
}

impl Analyzer {
    pub fn new(alg: Arc<AugmentedAlgebra>, config: ResolutionConfig) -> Self {
        Analyzer {
            alg,
            config,
            res: RwLock::new(None),
            ext_oo: RwLock::new(HashMap::new()),
            ext_top: RwLock::new(Vec::new()),
            regularity: RwLock::new(None),
        }
    }

    pub fn algebra(&self) -> &Arc<AugmentedAlgebra> {
        &self.alg
    }

    pub fn codim(&self) -> usize {
        self.alg.codim()
    }

    pub fn resolution(&self) -> Result<Arc<FreeResolution>> {
        if let Some(r) = self.res.read().as_ref() {
            return Ok(r.clone());
        }
        let length = self.config.length.unwrap_or(self.codim() + 2);
        let r = Arc::new(resolve_o(
            &self.alg,
            length,
            self.config.strategy,
            self.config.user.as_deref(),
        )?);
        *self.res.write() = Some(r.clone());
        Ok(r)
    }

    /// `Ext^i_A(O, O)`.
    pub fn ext_oo(&self, i: usize) -> Result<Arc<ExtModule>> {
        if let Some(e) = self.ext_oo.read().get(&i) {
            return Ok(e.clone());
        }
        let e = Arc::new(ext_base(&self.alg, &*self.resolution()?, i)?);
        self.ext_oo.write().insert(i, e.clone());
        Ok(e)
    }

    /// `Ext^i_A(O, M)`.
    pub fn ext(&self, m: &FpModule, i: usize) -> Result<ExtModule> {
        self.same_algebra(m)?;
        ext_module(m, &*self.resolution()?, i)
    }

    fn ext_top(&self, m: &FpModule) -> Result<Arc<ExtModule>> {
        self.same_algebra(m)?;
        let key = m.presentation();
        if let Some((_, e)) = self.ext_top.read().iter().find(|(p, _)| p == key) {
            return Ok(e.clone());
        }
        let e = Arc::new(ext_module(m, &*self.resolution()?, self.codim())?);
        self.ext_top.write().push((key.clone(), e.clone()));
        Ok(e)
    }

    fn ext_ring_top(&self) -> Result<Arc<ExtModule>> {
        self.ext_top(&FpModule::ring(self.alg.clone()))
    }

    fn same_algebra(&self, m: &FpModule) -> Result<()> {
        if !Arc::ptr_eq(m.algebra(), &self.alg) {
            return Err(Error::InvalidConfig(
                "module belongs to a different algebra".into(),
            ));
        }
        Ok(())
    }

    /// Pushes every representative of `ext` through every functional of `M`.
    fn top_pairing(&self, m: &FpModule, ext: &ExtModule) -> Result<Option<TopPairing>> {
        let alg = &*self.alg;
        let o = alg.dvr();
        let c = self.codim();
        let top = self.ext_oo(c)?;
        if top.free_rank() != 1 {
            return Ok(None);
        }
        let dual = m.dual_basis()?;
        let phi = &dual.functionals;
        let g = m.generator_count();
        let rc = self.resolution()?.rank(c);
        let Representatives::Module(z) = &ext.representatives else {
            return Err(Error::InternalInvariantViolation("expected module cocycles".into()));
        };
        let k = z.ncols();
        let mu = phi.nrows();
        let mut entries = vec![vec![o.zero(); k]; mu];
        for j in 0..k {
            let lz: Vec<Scalar> = (0..rc * g).map(|r| alg.lambda(&z[(r, j)])).collect();
            for (s, row) in entries.iter_mut().enumerate() {
                let w: Vec<Scalar> = (0..rc)
                    .map(|kk| {
                        (0..g).fold(o.zero(), |acc, t| acc.add(&phi[(s, t)].mul(&lz[kk * g + t])))
                    })
                    .collect();
                let coords = top.base_class(alg, &w)?;
                row[j] = top.free_part(alg, &coords)?[0].clone();
            }
        }
        let matrix = Mat::from_fn(mu, k, |s, j| entries[s][j].clone());
        let eta = match matrix.min_valuation(o) {
            Some(v) => IdealO::Power(v as u32),
            None => IdealO::Zero,
        };
        Ok(Some(TopPairing { matrix, eta }))
    }

    /// `eta_lambda(M)` without the regularity gate; zero when
    /// `tfree Ext^c(O, O)` is not of rank one.
    fn eta_raw(&self, m: &FpModule) -> Result<IdealO> {
        let ext = self.ext_top(m)?;
        Ok(self.top_pairing(m, &ext)?.map_or(IdealO::Zero, |t| t.eta))
    }

    /// The rank test on `p/p^2` cross-checked against `eta(A) != 0`.
    pub fn regularity(&self) -> Result<Regularity> {
        if let Some(r) = self.regularity.read().as_ref() {
            return Ok(r.clone());
        }
        let c = self.codim();
        let rank = self.alg.cotangent_invariants()?.cotangent.free_rank();
        if rank < c {
            return Err(Error::InconsistentCodim {
                declared: c,
                reason: format!("p/p^2 has rank {rank}, below the declared codimension"),
            });
        }
        let top = self.ext_oo(c)?.free_rank();
        let eta = self.eta_raw(&FpModule::ring(self.alg.clone()))?;
        let regular_at_p = rank == c;
        if regular_at_p && eta.is_zero() {
            return Err(Error::InconsistentCodim {
                declared: c,
                reason: format!(
                    "p/p^2 has rank {c} but eta(A) = 0 (tfree Ext^{c}(O,O) has rank {top})"
                ),
            });
        }
        if !regular_at_p && !eta.is_zero() {
            return Err(Error::InconsistentCodim {
                declared: c,
                reason: format!("eta(A) = {eta} is nonzero but p/p^2 has rank {rank} > {c}"),
            });
        }
        let r = Regularity {
            regular_at_p,
            regular_global: regular_at_p && eta.is_unit(),
            cotangent_rank: rank,
            eta_ring: eta,
            ext_top_free_rank: top,
        };
        *self.regularity.write() = Some(r.clone());
        Ok(r)
    }

    /// `eta_lambda(M)`; the zero ideal with a warning when `A` is not
    /// regular at `lambda`.
    pub fn eta(&self, m: &FpModule) -> Result<EtaResult> {
        self.same_algebra(m)?;
        let reg = self.regularity()?;
        if !reg.regular_at_p {
            return Ok(EtaResult {
                ideal: IdealO::Zero,
                warnings: vec![format!(
                    "A is not regular at lambda (p/p^2 has rank {} > {}); eta is zero",
                    reg.cotangent_rank,
                    self.codim()
                )],
            });
        }
        Ok(EtaResult {
            ideal: self.eta_raw(m)?,
            warnings: Vec::new(),
        })
    }

    fn require_regular(&self) -> Result<Regularity> {
        let reg = self.regularity()?;
        if !reg.regular_at_p {
            return Err(Error::InconsistentCodim {
                declared: self.codim(),
                reason: "A is not regular at lambda in the declared codimension".into(),
            });
        }
        Ok(reg)
    }

    /// `Psi_lambda(M)`: the cokernel of `Ext^c(O, M) -> tfree Ext^c(O, M/pM)`.
    pub fn psi(&self, m: &FpModule) -> Result<FinOModule> {
        self.same_algebra(m)?;
        self.require_regular()?;
        let ext = self.ext_top(m)?;
        let t = self.top_pairing(m, &ext)?.ok_or_else(|| {
            Error::InternalInvariantViolation("tfree Ext^c(O,O) is not of rank one".into())
        })?;
        let psi = o_module_from_presentation(self.alg.dvr(), &t.matrix)?;
        if psi.free_rank() != 0 {
            return Err(Error::InternalInvariantViolation(format!(
                "congruence module {psi} is not torsion"
            )));
        }
        Ok(psi)
    }

    /// `kappa_lambda(M)` on torsion-free quotients and its cokernel.
    pub fn kappa_defect(&self, m: &FpModule) -> Result<KappaDefect> {
        self.same_algebra(m)?;
        self.require_regular()?;
        let alg = &*self.alg;
        let o = alg.dvr();
        let c = self.codim();
        let g = m.generator_count();
        let ext_a = self.ext_ring_top()?;
        if ext_a.free_rank() != 1 {
            return Err(Error::InternalInvariantViolation(format!(
                "tfree Ext^{c}(O,A) has rank {}",
                ext_a.free_rank()
            )));
        }
        let zeta = ext_a
            .free_generator_cocycle_module(alg, 0)
            .expect("rank one checked above");
        let ext_m = self.ext_top(m)?;
        let dual = m.dual_basis()?;
        let mu = dual.dual.ncols();
        if ext_m.free_rank() != mu {
            return Err(Error::InternalInvariantViolation(format!(
                "tfree Ext^{c}(O,M) has rank {} but mu = {mu}",
                ext_m.free_rank()
            )));
        }
        let n = alg.nvars();
        let mut cols = Vec::with_capacity(mu);
        for s in 0..mu {
            let ms = dual.dual.column(s);
            let mut v = vec![Poly::zero(n); zeta.len() * g];
            for (k, zk) in zeta.iter().enumerate() {
                for (t, mt) in ms.iter().enumerate() {
                    v[k * g + t] = alg.quotient().reduce(&zk.scale(mt));
                }
            }
            let coords = ext_m.module_class(alg, &v)?;
            cols.push(ext_m.free_part(alg, &coords)?);
        }
        let kmat = Mat::from_fn(mu, mu, |i, j| cols[j][i].clone());
        let coker = o_module_from_presentation(o, &kmat)?;
        if coker.free_rank() != 0 {
            return Err(Error::KappaNotInjective);
        }
        let coker_ann = IdealO::Power(coker.max_exponent());
        let eta_a = self.regularity()?.eta_ring;
        let eta_m = self.eta_raw(m)?;
        let psi_a = self.psi(&FpModule::ring(self.alg.clone()))?;
        let psi_m = self.psi(m)?;
        let len = |x: &FinOModule| x.length().unwrap_or(u32::MAX);
        Ok(KappaDefect {
            diff_identity: eta_a == coker_ann.product(eta_m),
            sequence_identity: len(&psi_m) + len(&coker) == mu as u32 * len(&psi_a),
            coker,
            coker_ann,
            mu,
        })
    }

    /// Full report for one module.
    pub fn report(&self, m: &FpModule) -> Result<CongruenceReport> {
        self.same_algebra(m)?;
        let reg = self.regularity()?;
        let CotangentData {
            cotangent,
            phi,
            fitt_c,
        } = self.alg.cotangent_invariants()?;
        let mu = m.reduce_mod_p()?.mu;
        let eta = self.eta(m)?;
        let mut warnings = eta.warnings.clone();
        warnings.extend(self.alg.notes().iter().cloned());
        let psi = if reg.regular_at_p {
            self.psi(m)?
        } else {
            FinOModule::zero()
        };
        let mut verdicts = BTreeMap::new();
        if reg.regular_at_p {
            if mu == 1 {
                let e1 = psi.torsion_exponents().first().copied().unwrap_or(0);
                if eta.ideal != IdealO::Power(e1) {
                    return Err(Error::InternalInvariantViolation(format!(
                        "eta = {} but the first invariant factor of Psi is pi^{e1}",
                        eta.ideal
                    )));
                }
            }
            let cr = numerical_criterion(self, m, CriterionMode::Defect0, None)?;
            verdicts.insert("defect0".to_string(), cr.verdict);
            if self.codim() == 0 {
                verdicts.insert("wld".to_string(), cr.verdict);
            }
        }
        verdicts.insert("regular_at_p".to_string(), Verdict::from_bool(reg.regular_at_p));
        verdicts.insert("regular_global".to_string(), Verdict::from_bool(reg.regular_global));
        let res = self.resolution()?;
        Ok(CongruenceReport {
            codim: self.codim(),
            mu,
            eta: eta.ideal,
            psi,
            phi,
            fitt_c,
            cotangent,
            regularity: reg,
            verdicts,
            strategy: res.strategy(),
            certification: res.status(),
            warnings,
        })
    }
}

/// `M/(M[p] + M[I])` with `I = A[p]`, for `M` finite over `O` and `c = 0`.
pub fn psi_direct_codim0(m: &FpModule) -> Result<FinOModule> {
    let alg = m.algebra();
    if alg.codim() != 0 {
        return Err(Error::InconsistentCodim {
            declared: alg.codim(),
            reason: "the direct congruence module needs codimension 0".into(),
        });
    }
    let o = alg.dvr();
    let of = m.o_structure()?;
    let kp = of.torsion_generators(&alg.p_generators())?;
    let ki = of.torsion_generators(&annihilator_of_p(alg)?)?;
    o_module_from_presentation(o, &of.relations.hcat(&kp).hcat(&ki))
}

/// `lambda(A[p])`: the image of `Hom_A(O, A) -> Hom_A(O, O)`, which is
/// `eta_lambda(A)` in codimension 0.
pub fn eta_ring_codim0(alg: &AugmentedAlgebra) -> Result<IdealO> {
    let o = alg.dvr();
    Ok(annihilator_of_p(alg)?
        .iter()
        .filter_map(|f| o.valuation(&alg.lambda(f)))
        .min()
        .map_or(IdealO::Zero, |v| IdealO::Power(v as u32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp_module::tests::{a_n, alg};

    fn analyzer(a: Arc<AugmentedAlgebra>) -> Analyzer {
        Analyzer::new(a, ResolutionConfig::default())
    }

    #[test]
    fn ext_of_hypersurface() {
        let a = a_n(5, 3, "0");
        let an = analyzer(a.clone());
        assert_eq!(an.ext_oo(0).unwrap().structure, FinOModule::new(vec![], 1));
        // O -0-> O -(-pi^3)-> O -0-> O
        assert!(an.ext_oo(1).unwrap().structure.is_zero());
        let cfg = ResolutionConfig {
            length: Some(4),
            ..Default::default()
        };
        let an4 = Analyzer::new(a.clone(), cfg);
        assert_eq!(an4.ext_oo(2).unwrap().structure, FinOModule::new(vec![3], 0));
        let e0 = an.ext(&FpModule::ring(a.clone()), 0).unwrap();
        assert_eq!(e0.structure, FinOModule::new(vec![], 1));
        assert!(matches!(
            an.ext_oo(3),
            Err(Error::ResolutionTooShort { needed: 4, .. })
        ));
    }

    #[test]
    fn hypersurface_invariants() {
        for p in [3, 5] {
            for n in 1..=3u32 {
                for at in ["0", &format!("pi^{n}")] {
                    let a = a_n(p, n, at);
                    let an = analyzer(a.clone());
                    let m = FpModule::ring(a.clone());
                    assert_eq!(an.eta(&m).unwrap().ideal, IdealO::Power(n));
                    assert_eq!(an.psi(&m).unwrap(), FinOModule::new(vec![n], 0));
                    assert_eq!(psi_direct_codim0(&m).unwrap(), FinOModule::new(vec![n], 0));
                    assert_eq!(eta_ring_codim0(&a).unwrap(), IdealO::Power(n));
                    let r = an.regularity().unwrap();
                    assert!(r.regular_at_p && !r.regular_global);
                }
            }
        }
    }

    #[test]
    fn regular_ring() {
        let a = alg(5, &["x"], &[], &["0"], 1);
        let an = analyzer(a.clone());
        let m = FpModule::ring(a.clone());
        assert_eq!(an.eta(&m).unwrap().ideal, IdealO::UNIT);
        assert!(an.psi(&m).unwrap().is_zero());
        assert!(an.regularity().unwrap().regular_global);
    }

    #[test]
    fn declared_codim_mismatch() {
        let a = alg(5, &["x"], &["x*(x - pi^2)"], &["0"], 1);
        assert!(matches!(
            analyzer(a).regularity(),
            Err(Error::InconsistentCodim { .. })
        ));
    }

    #[test]
    fn three_branches() {
        let b = alg(5, &["x", "y"], &["x*(x - pi)", "y*(y - pi)", "x*y"], &["0", "0"], 0);
        let an = analyzer(b.clone());
        let m = FpModule::ring(b.clone());
        assert_eq!(an.eta(&m).unwrap().ideal, IdealO::Power(1));
        assert_eq!(an.psi(&m).unwrap(), FinOModule::new(vec![1], 0));
        assert_eq!(psi_direct_codim0(&m).unwrap(), FinOModule::new(vec![1], 0));
    }

    #[test]
    fn depth_zero_example() {
        let a = alg(5, &["x", "y"], &["x*(x - pi)", "x*pi^2", "x*y"], &["0", "0"], 1);
        let an = analyzer(a.clone());
        let m = FpModule::ring(a.clone());
        assert_eq!(an.eta(&m).unwrap().ideal, IdealO::Power(1));
        assert_eq!(a.cotangent_invariants().unwrap().fitt_c, IdealO::Power(1));
    }

    #[test]
    fn kappa_examples() {
        let a = a_n(5, 2, "0");
        let an = analyzer(a.clone());
        let r = FpModule::ring(a.clone());
        let k = an.kappa_defect(&r).unwrap();
        assert!(k.coker_ann.is_unit() && k.diff_identity && k.sequence_identity);
        let k = an.kappa_defect(&r.direct_sum(&r).unwrap()).unwrap();
        assert_eq!((k.mu, k.coker_ann), (2, IdealO::UNIT));
        assert!(k.diff_identity && k.sequence_identity);
        let res = FpModule::residue(a.clone());
        let k = an.kappa_defect(&res).unwrap();
        assert_eq!(k.coker_ann, IdealO::Power(2));
        assert!(k.diff_identity && k.sequence_identity);
        assert_eq!(an.eta(&res).unwrap().ideal, IdealO::UNIT);
    }
}
