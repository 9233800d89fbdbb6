//! Initial segments of free resolutions `F_L -> .. -> F_1 -> A -> O`.
//!
//! `d_i` is an `r_{i-1} x r_i` matrix over `A`, and `d_1` is the row of
//! generators `x_i - a_i` of `p` in every constructed resolution. The Tate
//! construction `A<e_1..e_n; y_1..y_m>` with `d(e_i) = x_i - a_i` and
//! `d(y_j) = sum_i h_ji e_i`, where `f_j = sum_i h_ji (x_i - a_i)`, resolves
//! `O` whenever the `f_j` form a regular sequence in the polynomial ring;
//! with `m = 0` it is the Koszul complex.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::algebra::AugmentedAlgebra;
use crate::error::{Error, Result};
use crate::poly::{syzygy_module, taylor_division, Poly, PolyMat, Submodule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Auto,
    Koszul,
    MatrixFactorization,
    Shamash,
    Syzygy,
    File,
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Strategy::Auto,
            "koszul" => Strategy::Koszul,
            "matrix_factorization" | "matrix-factorization" => Strategy::MatrixFactorization,
            "shamash" => Strategy::Shamash,
            "syzygy" => Strategy::Syzygy,
            "file" => Strategy::File,
            _ => return Err(Error::InvalidConfig(format!("unknown strategy {s:?}"))),
        })
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Strategy::Auto => "auto",
            Strategy::Koszul => "koszul",
            Strategy::MatrixFactorization => "matrix_factorization",
            Strategy::Shamash => "shamash",
            Strategy::Syzygy => "syzygy",
            Strategy::File => "file",
        };
        f.write_str(s)
    }
}

/// How exactness of the segment was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Certification {
    /// By a theorem about the construction, or by a complete check.
    Certified,
    /// The exactness check hit the degree bound.
    BoundedSearch { degree: u32 },
    UserSuppliedVerified,
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certification::Certified => f.write_str("certified"),
            Certification::BoundedSearch { degree } => write!(f, "bounded_search(degree {degree})"),
            Certification::UserSuppliedVerified => f.write_str("user_supplied_verified"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FreeResolution {
    diffs: Vec<PolyMat>,
    strategy: Strategy,
    status: Certification,
}

impl FreeResolution {
    /// Number of differentials.
    pub fn len(&self) -> usize {
        self.diffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diffs.is_empty()
    }

    /// `d_i` for `1 <= i <= len`.
    pub fn d(&self, i: usize) -> &PolyMat {
        &self.diffs[i - 1]
    }

    /// `r_i = rank F_i`; `r_0 = 1`.
    pub fn rank(&self, i: usize) -> usize {
        if i == 0 {
            1
        } else {
            self.diffs[i - 1].ncols()
        }
    }

    pub fn ranks(&self) -> Vec<usize> {
        (0..=self.len()).map(|i| self.rank(i)).collect()
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn status(&self) -> Certification {
        self.status
    }

    pub fn differentials(&self) -> &[PolyMat] {
        &self.diffs
    }

    /// Requires `d_1 .. d_needed`.
    pub fn require(&self, needed: usize) -> Result<()> {
        if self.len() < needed {
            return Err(Error::ResolutionTooShort {
                needed,
                available: self.len(),
            });
        }
        Ok(())
    }
}

fn nonzero_relations(alg: &AugmentedAlgebra) -> Vec<Poly> {
    alg.relations().iter().filter(|f| !f.is_zero()).cloned().collect()
}

/// Picks the strategy `auto` resolves to.
pub fn choose_strategy(alg: &AugmentedAlgebra) -> Strategy {
    let rels = nonzero_relations(alg);
    if rels.is_empty() {
        Strategy::Koszul
    } else if rels.len() == 1 {
        Strategy::MatrixFactorization
    } else if alg.assertions().ci {
        Strategy::Shamash
    } else {
        Strategy::Syzygy
    }
}

/// Builds `d_1 .. d_length` and certifies exactness through degree
/// `codim + 1` (or `length - 1` if smaller).
pub fn resolve_o(
    alg: &AugmentedAlgebra,
    length: usize,
    strategy: Strategy,
    user: Option<&[PolyMat]>,
) -> Result<FreeResolution> {
    let strategy = match strategy {
        Strategy::Auto => choose_strategy(alg),
        s => s,
    };
    let rels = nonzero_relations(alg);
    let (diffs, theorem_backed) = match strategy {
        Strategy::Auto => unreachable!(),
        Strategy::Koszul => {
            if !rels.is_empty() {
                return Err(Error::StrategyInapplicable(
                    strategy.to_string(),
                    "the algebra has relations".into(),
                ));
            }
            (tate(alg, &[], length), true)
        }
        Strategy::MatrixFactorization => {
            if rels.len() != 1 {
                return Err(Error::StrategyInapplicable(
                    strategy.to_string(),
                    format!("needs exactly one relation, found {}", rels.len()),
                ));
            }
            (tate(alg, &rels, length), true)
        }
        Strategy::Shamash => {
            if !alg.assertions().ci && rels.len() > 1 {
                return Err(Error::StrategyInapplicable(
                    strategy.to_string(),
                    "complete intersection not asserted".into(),
                ));
            }
            // a single nonzero relation is always a regular element
            (tate(alg, &rels, length), rels.len() <= 1)
        }
        Strategy::Syzygy => (syzygy_chain(alg, length)?, true),
        Strategy::File => {
            let Some(user) = user else {
                return Err(Error::StrategyInapplicable(
                    strategy.to_string(),
                    "no [resolution] section".into(),
                ));
            };
            let mut diffs = Vec::with_capacity(user.len());
            for d in user {
                diffs.push(alg.quotient().reduce_mat(d));
            }
            (diffs, false)
        }
    };
    let mut res = FreeResolution {
        diffs,
        strategy,
        status: Certification::Certified,
    };
    res.status = if theorem_backed {
        check_complex(alg, &res)?;
        Certification::Certified
    } else {
        let through = (alg.codim() + 1).min(res.len().saturating_sub(1));
        let status = verify_resolution(alg, &res, through)?;
        if strategy == Strategy::File && status == Certification::Certified {
            Certification::UserSuppliedVerified
        } else {
            status
        }
    };
    Ok(res)
}

/// `d_i d_{i+1} = 0` modulo `I`, and `d_1` generates `p` inside `p`.
fn check_complex(alg: &AugmentedAlgebra, res: &FreeResolution) -> Result<()> {
    let q = alg.quotient();
    if res.is_empty() {
        return Ok(());
    }
    let d1 = res.d(1);
    if d1.nrows() != 1 {
        return Err(Error::VerificationFailed {
            degree: 1,
            reason: format!("d_1 must have one row, found {}", d1.nrows()),
        });
    }
    for i in 1..res.len() {
        if res.d(i).ncols() != res.d(i + 1).nrows() {
            return Err(Error::VerificationFailed {
                degree: i + 1,
                reason: "differential shapes do not compose".into(),
            });
        }
        if !q.reduce_mat(&res.d(i).mul(res.d(i + 1))).is_zero() {
            return Err(Error::VerificationFailed {
                degree: i,
                reason: format!("d_{i} d_{} is not zero", i + 1),
            });
        }
    }
    if !alg.lambda_mat(d1).is_zero() {
        return Err(Error::VerificationFailed {
            degree: 1,
            reason: "d_1 has an entry outside p".into(),
        });
    }
    let sub = Submodule::new(q, d1)?;
    for g in alg.p_generators() {
        if !sub.contains(&[g])? {
            return Err(Error::VerificationFailed {
                degree: 1,
                reason: "the image of d_1 does not contain p".into(),
            });
        }
    }
    Ok(())
}

/// Exact complex checks plus a syzygy comparison at degrees `1..=through`.
pub fn verify_resolution(
    alg: &AugmentedAlgebra,
    res: &FreeResolution,
    through: usize,
) -> Result<Certification> {
    check_complex(alg, res)?;
    let q = alg.quotient();
    for i in 1..=through.min(res.len().saturating_sub(1)) {
        let step = || -> Result<bool> {
            let syz = syzygy_module(q, res.d(i))?;
            let sub = Submodule::new(q, res.d(i + 1))?;
            for col in syz.columns() {
                if !sub.contains(&col)? {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        match step() {
            Ok(true) => {}
            Ok(false) => {
                return Err(Error::VerificationFailed {
                    degree: i,
                    reason: format!("a syzygy of d_{i} is not in the image of d_{}", i + 1),
                })
            }
            Err(Error::DegreeBoundExceeded(d)) => {
                return Ok(Certification::BoundedSearch { degree: d })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Certification::Certified)
}

fn syzygy_chain(alg: &AugmentedAlgebra, length: usize) -> Result<Vec<PolyMat>> {
    let q = alg.quotient();
    let n = alg.nvars();
    let gens = alg.p_generators();
    let mut diffs = vec![PolyMat::from_fn(n, 1, n, |_, j| gens[j].clone())];
    while diffs.len() < length {
        let mut next = prune(&syzygy_module(q, diffs.last().unwrap())?);
        let last = diffs.last_mut().unwrap();
        while let Some((j, c)) = unit_entry(alg, &next) {
            let (d, n) = drop_generator(alg, last, &next, j, c);
            *last = d;
            next = n;
        }
        diffs.push(next);
    }
    diffs.truncate(length);
    Ok(diffs)
}

/// A `(row, column)` of `m` holding a unit of the local ring.
fn unit_entry(alg: &AugmentedAlgebra, m: &PolyMat) -> Option<(usize, usize)> {
    let o = alg.dvr();
    (0..m.ncols()).find_map(|c| {
        (0..m.nrows()).find(|&j| o.is_unit(&alg.lambda(&m[(j, c)]))).map(|j| (j, c))
    })
}

/// Removes generator `j` of `im(d)`, which column `c` of the syzygies
/// `next` writes as a combination of the others with the unit coefficient
/// `s_j`. The remaining syzygies `s_j t - t_j s` vanish in row `j` and still
/// generate over the local ring.
fn drop_generator(
    alg: &AugmentedAlgebra,
    d: &PolyMat,
    next: &PolyMat,
    j: usize,
    c: usize,
) -> (PolyMat, PolyMat) {
    let q = alg.quotient();
    let keep_rows: Vec<usize> = (0..d.ncols()).filter(|&i| i != j).collect();
    let dcols: Vec<Vec<Poly>> = d
        .columns()
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, col)| col)
        .collect();
    let d2 = PolyMat::from_columns(d.nvars(), d.nrows(), &dcols);
    let s = next.column(c);
    let sj = &s[j];
    let mut cols = Vec::with_capacity(next.ncols());
    for (k, t) in next.columns().into_iter().enumerate() {
        if k == c {
            continue;
        }
        let tj = &t[j];
        let col: Vec<Poly> = keep_rows
            .iter()
            .map(|&i| {
                if tj.is_zero() {
                    t[i].clone()
                } else {
                    q.reduce(&sj.mul(&t[i]).sub(&tj.mul(&s[i])))
                }
            })
            .collect();
        cols.push(col);
    }
    let n2 = prune(&PolyMat::from_columns(d.nvars(), keep_rows.len(), &cols));
    (d2, n2)
}

/// Drops zero columns and columns equal to an earlier one up to sign.
fn prune(m: &PolyMat) -> PolyMat {
    let mut keep: Vec<Vec<Poly>> = Vec::new();
    for c in m.columns() {
        if c.iter().all(Poly::is_zero) {
            continue;
        }
        let neg: Vec<Poly> = c.iter().map(Poly::neg).collect();
        if keep.iter().any(|k| *k == c || *k == neg) {
            continue;
        }
        keep.push(c);
    }
    PolyMat::from_columns(m.nvars(), m.nrows(), &keep)
}

/// Basis element `e_S y^(alpha)` of the Tate complex.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct TateBasis {
    s: Vec<usize>,
    alpha: Vec<u32>,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Exponent vectors of length `m` and total `a`, lexicographically.
fn compositions(m: usize, a: u32) -> Vec<Vec<u32>> {
    if m == 0 {
        return if a == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=a).rev() {
        for mut rest in compositions(m - 1, a - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn tate_basis(n: usize, m: usize, k: usize) -> Vec<TateBasis> {
    let mut out = Vec::new();
    for a in 0..=k / 2 {
        let s = k - 2 * a;
        if s > n {
            continue;
        }
        if m == 0 && a > 0 {
            continue;
        }
        for alpha in compositions(m, a as u32) {
            for set in subsets(n, s) {
                out.push(TateBasis {
                    s: set,
                    alpha: alpha.clone(),
                });
            }
        }
    }
    out
}

fn tate(alg: &AugmentedAlgebra, rels: &[Poly], length: usize) -> Vec<PolyMat> {
    let o = alg.dvr();
    let q = alg.quotient();
    let n = alg.nvars();
    let m = rels.len();
    let gens = alg.p_generators();
    let h: Vec<Vec<Poly>> = rels
        .iter()
        .map(|f| {
            taylor_division(o, f, alg.point())
                .coeffs
                .iter()
                .map(|c| q.reduce(c))
                .collect()
        })
        .collect();
    let mut diffs = Vec::with_capacity(length);
    let mut prev = tate_basis(n, m, 0);
    for k in 1..=length {
        let cur = tate_basis(n, m, k);
        let index: std::collections::HashMap<&TateBasis, usize> =
            prev.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut d = PolyMat::zeros(n, prev.len(), cur.len());
        for (col, b) in cur.iter().enumerate() {
            for (pos, &sj) in b.s.iter().enumerate() {
                let mut s = b.s.clone();
                s.remove(pos);
                let target = TateBasis {
                    s,
                    alpha: b.alpha.clone(),
                };
                let row = index[&target];
                let g = if pos % 2 == 0 { gens[sj].clone() } else { gens[sj].neg() };
                d[(row, col)] = d[(row, col)].add(&g);
            }
            let outer_sign = b.s.len() % 2 == 1;
            for j in 0..m {
                if b.alpha[j] == 0 {
                    continue;
                }
                let mut alpha = b.alpha.clone();
                alpha[j] -= 1;
                for (i, hji) in h[j].iter().enumerate() {
                    if hji.is_zero() || b.s.contains(&i) {
                        continue;
                    }
                    // e_S ^ e_i = (-1)^{#{s in S : s > i}} e_{S + i}
                    let after = b.s.iter().filter(|&&s| s > i).count();
                    let mut s = b.s.clone();
                    s.push(i);
                    s.sort_unstable();
                    let target = TateBasis {
                        s,
                        alpha: alpha.clone(),
                    };
                    let row = index[&target];
                    let negative = outer_sign ^ (after % 2 == 1);
                    let t = if negative { hji.neg() } else { hji.clone() };
                    d[(row, col)] = d[(row, col)].add(&t);
                }
            }
        }
        diffs.push(q.reduce_mat(&d));
        prev = cur;
    }
    diffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp_module::tests::{a_n, alg};

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn koszul_ranks() {
        let a = alg(5, &["x", "y", "z"], &[], &["0", "0", "pi"], 3);
        let r = resolve_o(&a, 4, Strategy::Auto, None).unwrap();
        assert_eq!(r.strategy(), Strategy::Koszul);
        assert_eq!(r.status(), Certification::Certified);
        let ranks: Vec<usize> = (0..=4).map(|i| binom(3, i)).collect();
        assert_eq!(r.ranks(), ranks);
        assert_eq!(verify_resolution(&a, &r, 3).unwrap(), Certification::Certified);
    }

    #[test]
    fn hypersurface_is_periodic() {
        for at in ["0", "pi^2"] {
            let a = a_n(5, 2, at);
            let r = resolve_o(&a, 5, Strategy::Auto, None).unwrap();
            assert_eq!(r.strategy(), Strategy::MatrixFactorization);
            assert_eq!(r.ranks(), vec![1; 6]);
            assert_eq!(verify_resolution(&a, &r, 4).unwrap(), Certification::Certified);
        }
    }

    #[test]
    fn syzygy_strategy_on_depth_zero_ring() {
        let a = alg(5, &["x", "y"], &["x*(x - pi)", "x*pi^2", "x*y"], &["0", "0"], 1);
        let r = resolve_o(&a, 3, Strategy::Auto, None).unwrap();
        assert_eq!(r.strategy(), Strategy::Syzygy);
        assert_eq!(verify_resolution(&a, &r, 2).unwrap(), Certification::Certified);
    }

    #[test]
    fn shamash_for_two_relations() {
        let mut a = (*alg(5, &["x", "y"], &["x*(x - pi)", "y*(y - pi^2)"], &["0", "0"], 0)).clone();
        assert!(resolve_o(&a, 3, Strategy::Shamash, None).is_err());
        a = AugmentedAlgebra::new(
            a.ring().clone(),
            a.relations().to_vec(),
            a.point().to_vec(),
            0,
            crate::algebra::Assertions {
                ci: true,
                ..Default::default()
            },
            a.bounds(),
        )
        .unwrap();
        let r = resolve_o(&a, 4, Strategy::Auto, None).unwrap();
        assert_eq!(r.strategy(), Strategy::Shamash);
        // e: 1, 2, 1 ; y: shifted by 2
        assert_eq!(r.ranks(), vec![1, 2, 3, 4, 5]);
        assert_eq!(r.status(), Certification::Certified);
    }

    #[test]
    fn corrupted_differential_is_rejected() {
        let a = a_n(5, 2, "0");
        let r = resolve_o(&a, 3, Strategy::Auto, None).unwrap();
        let mut diffs = r.differentials().to_vec();
        diffs[1] = diffs[1].map(|p| p.add(&a.ring().var(0)));
        assert!(matches!(
            resolve_o(&a, 3, Strategy::File, Some(&diffs)),
            Err(Error::VerificationFailed { .. })
        ));
        let ok = resolve_o(&a, 3, Strategy::File, Some(r.differentials())).unwrap();
        assert_eq!(ok.status(), Certification::UserSuppliedVerified);
    }
}
