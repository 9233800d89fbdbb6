//! Builders and invariant checks shared by the acceptance and property
//! suites. Each check returns `Err(reason)` on a violated invariant.

#![allow(dead_code)]

use std::sync::Arc;

use congruence_core::algebra::{Assertions, AugmentedAlgebra};
use congruence_core::congruence::probe::{instance_rng, random_algebra, random_module, Grammar};
use congruence_core::congruence::{serre_check, Analyzer, ResolutionConfig, Verdict};
use congruence_core::fp_module::FpModule;
use congruence_core::poly::{Bounds, PolyRing};
use congruence_core::resolution::Strategy;
use congruence_core::{Dvr, FinOModule, IdealO};

pub type Check = Result<(), String>;

pub fn algebra_with(
    o: &Dvr,
    vars: &[&str],
    relations: &[&str],
    point: &[&str],
    codim: usize,
    assertions: Assertions,
) -> Arc<AugmentedAlgebra> {
    let ring = PolyRing::new(o.clone(), vars.iter().map(|v| v.to_string()).collect()).unwrap();
    let rels = relations.iter().map(|r| ring.parse(r).unwrap()).collect();
    let pt = point.iter().map(|s| ring.parse(s).unwrap().as_constant(o).unwrap()).collect();
    Arc::new(AugmentedAlgebra::new(ring, rels, pt, codim, assertions, Bounds::default()).unwrap())
}

pub fn algebra(
    o: &Dvr,
    vars: &[&str],
    relations: &[&str],
    point: &[&str],
    codim: usize,
) -> Arc<AugmentedAlgebra> {
    algebra_with(o, vars, relations, point, codim, Assertions::default())
}

/// `A(n) = O[[x]]/(x(x - pi^n))` at `x = point`.
pub fn a_n(o: &Dvr, n: u32, point: &str) -> Arc<AugmentedAlgebra> {
    algebra(o, &["x"], &[&format!("x*(x - pi^{n})")], &[point], 0)
}

pub fn analyzer(alg: &Arc<AugmentedAlgebra>) -> Analyzer {
    Analyzer::new(alg.clone(), ResolutionConfig::default())
}

pub fn analyzer_with(alg: &Arc<AugmentedAlgebra>, strategy: Strategy) -> Analyzer {
    Analyzer::new(
        alg.clone(),
        ResolutionConfig {
            strategy,
            ..ResolutionConfig::default()
        },
    )
}

/// Instance `index` of the generator grammar under `seed`, with a module.
pub fn instance(o: &Dvr, grammar: &Grammar, seed: u64, index: u64) -> (Arc<AugmentedAlgebra>, FpModule) {
    let mut rng = instance_rng(seed, index);
    let inst = random_algebra(o, grammar, &mut rng).unwrap();
    let m = random_module(&inst.alg, &mut rng).unwrap();
    (inst.alg, m)
}

fn merged(a: &FinOModule, b: &FinOModule) -> FinOModule {
    let mut t: Vec<u32> = a.torsion_exponents().to_vec();
    t.extend_from_slice(b.torsion_exponents());
    t.sort_unstable();
    FinOModule::new(t, a.free_rank() + b.free_rank())
}

/// `eta(M (+) N) = eta(M) + eta(N)` and `Psi(M (+) N) = Psi(M) (+) Psi(N)`.
pub fn eta_additive(an: &Analyzer, m: &FpModule, n: &FpModule) -> Check {
    let sum = m.direct_sum(n).map_err(|e| e.to_string())?;
    let (em, en, es) = (eta(an, m)?, eta(an, n)?, eta(an, &sum)?);
    if es != em.sum(en) {
        return Err(format!("eta(M+N) = {es}, eta(M) = {em}, eta(N) = {en}"));
    }
    let (pm, pn, ps) = (psi(an, m)?, psi(an, n)?, psi(an, &sum)?);
    if ps != merged(&pm, &pn) {
        return Err(format!("Psi(M+N) = {ps}, Psi(M) = {pm}, Psi(N) = {pn}"));
    }
    Ok(())
}

pub fn eta(an: &Analyzer, m: &FpModule) -> Result<IdealO, String> {
    an.eta(m).map(|r| r.ideal).map_err(|e| e.to_string())
}

pub fn psi(an: &Analyzer, m: &FpModule) -> Result<FinOModule, String> {
    an.psi(m).map_err(|e| e.to_string())
}

pub fn psi_torsion(an: &Analyzer, m: &FpModule) -> Check {
    let p = psi(an, m)?;
    if p.free_rank() != 0 {
        return Err(format!("Psi = {p} has a free part"));
    }
    Ok(())
}

/// `Fitt_c(p/p^2)` kills `Psi(A)`: its exponent bounds every invariant
/// factor.
pub fn fitting_kills_psi(an: &Analyzer) -> Check {
    let alg = an.algebra();
    let fitt = alg.cotangent_invariants().map_err(|e| e.to_string())?.fitt_c;
    let p = psi(an, &FpModule::ring(alg.clone()))?;
    let top = p.torsion_exponents().iter().copied().max().unwrap_or(0);
    match fitt.exponent() {
        Some(f) if f < top => Err(format!("Fitt_c = {fitt} does not kill Psi = {p}")),
        _ => Ok(()),
    }
}

/// For `mu = 1`, `eta(M)` is generated by the first invariant factor of
/// `Psi(M)`.
pub fn e1_identity(an: &Analyzer, m: &FpModule) -> Result<bool, String> {
    let mu = m.reduce_mod_p().map_err(|e| e.to_string())?.mu;
    if mu != 1 {
        return Ok(false);
    }
    let (e, p) = (eta(an, m)?, psi(an, m)?);
    let e1 = p.torsion_exponents().first().copied().unwrap_or(0);
    if e != IdealO::Power(e1) {
        return Err(format!("eta = {e} but Psi = {p}"));
    }
    Ok(true)
}

/// `kappa(M)` is injective and both length identities hold.
pub fn kappa(an: &Analyzer, m: &FpModule) -> Check {
    let k = an.kappa_defect(m).map_err(|e| e.to_string())?;
    if !k.diff_identity {
        return Err(format!("eta(A) != ann(coker kappa) eta(M); coker = {}", k.coker));
    }
    if !k.sequence_identity {
        return Err(format!("length identity fails; coker = {}", k.coker));
    }
    Ok(())
}

pub fn serre_ranks(an: &Analyzer) -> Check {
    let r = serre_check(an, false).map_err(|e| e.to_string())?;
    if r.verdict != Verdict::Holds {
        return Err(format!("ranks {:?}, expected {:?}", r.ranks, r.expected));
    }
    Ok(())
}

/// `eta` and `Psi` agree between the default strategy and syzygies.
pub fn strategy_independent(alg: &Arc<AugmentedAlgebra>, m: &FpModule) -> Check {
    let a = analyzer(alg);
    let b = analyzer_with(alg, Strategy::Syzygy);
    let (ea, eb) = (eta(&a, m)?, eta(&b, m)?);
    let (pa, pb) = (psi(&a, m)?, psi(&b, m)?);
    if ea != eb || pa != pb {
        return Err(format!("auto: {ea}, {pa}; syzygy: {eb}, {pb}"));
    }
    Ok(())
}
