//! Random algebras in `C_O(c)` from a fixed grammar, and the experiment
//! asking whether `Fitt_c(p/p^2)` is contained in `eta_lambda(A)`.
//!
//! Grammar: each variable is either free (adds one to `c`) or a branch
//! variable with relation `x(x - pi^k)`. Branch variables sent to `0` may
//! also appear in mixed relations `x_i x_j` and scaled relations
//! `pi^k x_i`; a branch variable sent to `pi^k` appears in nothing else.
//! At `lambda` every branch variable is a unit multiple of an idempotent
//! of `A_p`, so `A_p` is the localized polynomial ring in the free
//! variables and `(A, lambda)` lies in `C_O(c)` by construction.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Analyzer, ResolutionConfig};
use crate::algebra::{AugmentedAlgebra, Assertions};
use crate::dvr::{Dvr, IdealO};
use crate::error::Result;
use crate::fp_module::FpModule;
use crate::poly::{Bounds, Poly, PolyMat, PolyRing};

/// Size limits of the grammar.
#[derive(Clone, Copy, Debug)]
pub struct Grammar {
    pub max_vars: usize,
    pub max_free: usize,
    pub max_exponent: u32,
    /// Allow branch variables at the nonzero root.
    pub shifted_points: bool,
}

impl Default for Grammar {
    fn default() -> Self {
        Grammar {
            max_vars: 3,
            max_free: 1,
            max_exponent: 3,
            shifted_points: true,
        }
    }
}

impl Grammar {
    /// Module-finite instances only (`c = 0`).
    pub fn codim0() -> Self {
        Grammar {
            max_free: 0,
            ..Grammar::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub alg: Arc<AugmentedAlgebra>,
    pub relations: Vec<String>,
    pub point: Vec<String>,
}

/// Per-instance generator: stream `index` of the ChaCha generator keyed by
/// `seed`, so instances do not depend on evaluation order.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_algebra(o: &Dvr, grammar: &Grammar, rng: &mut impl Rng) -> Result<Instance> {
    let n = rng.gen_range(1..=grammar.max_vars.max(1));
    let free = rng.gen_range(0..=grammar.max_free.min(n - 1));
    let names: Vec<String> = (0..n).map(|i| format!("x{}", i + 1)).collect();
    let ring = PolyRing::new(o.clone(), names.clone())?;
    let mut kinds: Vec<bool> = (0..n).map(|i| i < free).collect();
    kinds.shuffle(rng);
    let mut rels: Vec<Poly> = Vec::new();
    let mut point = vec![o.zero(); n];
    let mut point_text = vec!["0".to_string(); n];
    let mut at_zero: Vec<usize> = Vec::new();
    for (i, &is_free) in kinds.iter().enumerate() {
        if is_free {
            at_zero.push(i);
            continue;
        }
        let k = rng.gen_range(1..=grammar.max_exponent);
        let x = ring.var(i);
        rels.push(x.mul(&x.sub(&ring.constant(o.pi_pow(k)))));
        if grammar.shifted_points && rng.gen_bool(0.25) {
            point[i] = o.pi_pow(k);
            point_text[i] = format!("pi^{k}");
        } else {
            at_zero.push(i);
        }
    }
    let branch_at_zero: Vec<usize> = at_zero.iter().copied().filter(|&i| !kinds[i]).collect();
    for &i in &branch_at_zero {
        if rng.gen_bool(0.3) {
            let k = rng.gen_range(1..=grammar.max_exponent);
            rels.push(ring.var(i).scale(&o.pi_pow(k)));
        }
        for &j in &at_zero {
            if j != i && (kinds[j] || j > i) && rng.gen_bool(0.35) {
                rels.push(ring.var(i).mul(&ring.var(j)));
            }
        }
    }
    let relations = rels.iter().map(|f| ring.show(f)).collect();
    let alg = AugmentedAlgebra::new(
        ring,
        rels,
        point,
        free,
        Assertions::default(),
        Bounds::default(),
    )?;
    Ok(Instance {
        alg: Arc::new(alg),
        relations,
        point: point_text,
    })
}

/// A small random module: `A`, `O`, `A^2`, or `A/(x_i - a_i)^2`-style
/// cyclic quotients.
pub fn random_module(alg: &Arc<AugmentedAlgebra>, rng: &mut impl Rng) -> Result<FpModule> {
    let n = alg.nvars();
    Ok(match rng.gen_range(0..4) {
        0 => FpModule::ring(alg.clone()),
        1 => FpModule::residue(alg.clone()),
        2 => FpModule::free(alg.clone(), 2),
        _ => {
            let i = rng.gen_range(0..n);
            let g = alg.p_generators()[i].clone();
            FpModule::new(alg.clone(), PolyMat::from_fn(n, 1, 1, |_, _| g.mul(&g)))?
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeInstance {
    pub index: u64,
    pub relations: Vec<String>,
    pub point: Vec<String>,
    pub codim: usize,
    pub fitt_c: IdealO,
    pub eta: IdealO,
    pub contained: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeSummary {
    pub seed: u64,
    pub count: u64,
    pub instances: Vec<ProbeInstance>,
    /// Indices with `Fitt_c` not contained in `eta(A)`.
    pub counterexamples: Vec<u64>,
}

fn probe_one(o: &Dvr, grammar: &Grammar, seed: u64, index: u64) -> Result<ProbeInstance> {
    let mut rng = instance_rng(seed, index);
    let inst = random_algebra(o, grammar, &mut rng)?;
    let an = Analyzer::new(inst.alg.clone(), ResolutionConfig::default());
    let fitt_c = inst.alg.cotangent_invariants()?.fitt_c;
    let eta = an.eta(&FpModule::ring(inst.alg.clone()))?.ideal;
    Ok(ProbeInstance {
        index,
        relations: inst.relations,
        point: inst.point,
        codim: inst.alg.codim(),
        contained: fitt_c.is_contained_in(eta),
        fitt_c,
        eta,
    })
}

/// Runs `count` instances in parallel; the output does not depend on the
/// thread count.
pub fn probe_fitting_question(o: &Dvr, grammar: &Grammar, count: u64, seed: u64) -> Result<ProbeSummary> {
    let instances: Vec<ProbeInstance> = (0..count)
        .into_par_iter()
        .map(|i| probe_one(o, grammar, seed, i))
        .collect::<Result<_>>()?;
    let counterexamples = instances
        .iter()
        .filter(|p| !p.contained)
        .map(|p| p.index)
        .collect();
    Ok(ProbeSummary {
        seed,
        count,
        instances,
        counterexamples,
    })
}
