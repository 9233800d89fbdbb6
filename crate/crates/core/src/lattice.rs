//! Congruence modules of a lattice `L` in `V = V_1 (+) V_2`.
//!
//! All computations happen in `L`-coordinates, where `L = O^d`. With
//! `S_i` a basis of `L_i = L ∩ V_i` and `P = [S_1 | S_2]`, the projection
//! `pi_1(L)` in `S_1`-coordinates is spanned by the top rows of `P^{-1}`.

use serde::Serialize;

use crate::dvr::{o_module_from_presentation, Dvr, FinOModule, IdealO, Mat};
use crate::error::{Error, Result};

/// `L` given by a basis (columns) of a `d`-dimensional `K`-space, and
/// spanning sets (columns) of the two summands.
#[derive(Clone, Debug)]
pub struct LatticeSplit {
    pub lattice_basis: Mat,
    pub subspaces: [Mat; 2],
}

/// Bases are columns in the ambient coordinates of `V`.
#[derive(Clone, Debug, Serialize)]
pub struct SplitCongruence {
    #[serde(skip)]
    pub sub: [Mat; 2],
    #[serde(skip)]
    pub proj: [Mat; 2],
    /// `L^1/L_1`, `L/(L_1 (+) L_2)`, `L^2/L_2`.
    pub quotients: [FinOModule; 3],
    pub cong: FinOModule,
}

struct Coords {
    /// Basis of `L_i` in `L`-coordinates.
    s: [Mat; 2],
    ranks: [usize; 2],
}

impl LatticeSplit {
    pub fn new(lattice_basis: Mat, v1: Mat, v2: Mat) -> Result<Self> {
        let d = lattice_basis.nrows();
        if lattice_basis.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: lattice_basis.ncols(),
            });
        }
        for v in [&v1, &v2] {
            if v.nrows() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.nrows(),
                });
            }
        }
        Ok(LatticeSplit {
            lattice_basis,
            subspaces: [v1, v2],
        })
    }

    pub fn dim(&self) -> usize {
        self.lattice_basis.nrows()
    }

    /// The same data with `V_1` and `V_2` exchanged.
    pub fn swapped(&self) -> LatticeSplit {
        LatticeSplit {
            lattice_basis: self.lattice_basis.clone(),
            subspaces: [self.subspaces[1].clone(), self.subspaces[0].clone()],
        }
    }

    fn coords(&self, o: &Dvr) -> Result<Coords> {
        let b_inv = self
            .lattice_basis
            .inverse(o)
            .ok_or(Error::DegenerateLattice)?;
        let mut s = Vec::with_capacity(2);
        let mut ranks = [0; 2];
        for (i, v) in self.subspaces.iter().enumerate() {
            let w = b_inv.mul(o, v);
            let (w, _) = w.normalize_valuation(o);
            let sat = w.saturation_basis(o)?;
            ranks[i] = sat.ncols();
            s.push(sat);
        }
        let s2 = s.pop().unwrap();
        let s1 = s.pop().unwrap();
        Ok(Coords { s: [s1, s2], ranks })
    }

    fn pieces(&self, o: &Dvr) -> Result<Coords> {
        let c = self.coords(o)?;
        let d = self.dim();
        let p = c.s[0].hcat(&c.s[1]);
        if c.ranks[0] + c.ranks[1] != d || p.rank(o) != d {
            return Err(Error::NotADirectSum);
        }
        for s in &c.s {
            if !o_module_from_presentation(o, s)?.torsion_exponents().is_empty() {
                return Err(Error::TorsionQuotient);
            }
        }
        Ok(c)
    }
}

/// `L_i`, `L^i` and the three quotients, each computed from its own matrix.
pub fn split_and_congruence(o: &Dvr, s: &LatticeSplit) -> Result<SplitCongruence> {
    let c = s.pieces(o)?;
    let d = s.dim();
    let p = c.s[0].hcat(&c.s[1]);
    let p_inv = p.inverse(o).ok_or(Error::NotADirectSum)?;
    let middle = o_module_from_presentation(o, &p)?;

    let mut proj = Vec::with_capacity(2);
    let mut outer = Vec::with_capacity(2);
    let mut offset = 0;
    for (i, &r) in c.ranks.iter().enumerate() {
        // pi_i(L) in S_i-coordinates
        let t = p_inv.select_rows(offset..offset + r);
        offset += r;
        let sup = t.column_span_basis(o)?;
        let sup_inv = sup.inverse(o).ok_or_else(|| {
            Error::InternalInvariantViolation("projected lattice lost rank".into())
        })?;
        // L_i = O^r inside L^i; its coordinates in the basis of L^i
        outer.push(o_module_from_presentation(o, &sup_inv)?);
        proj.push(s.lattice_basis.mul(o, &c.s[i]).mul(o, &sup));
    }
    let q2 = outer.pop().unwrap();
    let q1 = outer.pop().unwrap();
    if q1 != middle || q2 != middle {
        return Err(Error::InternalInvariantViolation(format!(
            "congruence quotients disagree: {q1} | {middle} | {q2}"
        )));
    }
    debug_assert_eq!(proj.iter().map(Mat::ncols).sum::<usize>(), d);
    let proj2 = proj.pop().unwrap();
    let proj1 = proj.pop().unwrap();
    Ok(SplitCongruence {
        sub: [
            s.lattice_basis.mul(o, &c.s[0]),
            s.lattice_basis.mul(o, &c.s[1]),
        ],
        proj: [proj1, proj2],
        cong: middle.clone(),
        quotients: [q1, middle, q2],
    })
}

/// `(det <f_i, x_j>)` for bases `x` of `L_1` and `f` of `Hom(L/L_2, O)`.
///
/// `pairing` is a perfect form `G` on `L`-coordinates, identifying `L` with
/// `Hom(L, O)` by `y -> (x -> y^T G x)`; `None` is the canonical pairing on
/// dual coordinates.
pub fn pairing_discriminant(o: &Dvr, s: &LatticeSplit, pairing: Option<&Mat>) -> Result<IdealO> {
    let d = s.dim();
    let c = s.coords(o)?;
    if c.ranks[0] != d - c.ranks[1] {
        return Err(Error::RankMismatch(c.ranks[0], d - c.ranks[1]));
    }
    let c = s.pieces(o)?;
    let g = match pairing {
        Some(g) => {
            if g.nrows() != d || g.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: g.nrows().max(g.ncols()),
                });
            }
            g.require_integral(o)?;
            if !o.is_unit(&g.det(o)) {
                return Err(Error::InvalidConfig("pairing is not perfect over O".into()));
            }
            g.clone()
        }
        None => Mat::identity(o, d),
    };
    // y with y^T G S_2 = 0
    let f = g.mul(o, &c.s[1]).transpose().kernel_basis(o)?;
    let pairing_matrix = f.transpose().mul(o, &g).mul(o, &c.s[0]);
    IdealO::principal(o, &pairing_matrix.det(o))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(o: &Dvr, v: &[i64]) -> Mat {
        Mat::from_fn(v.len(), 1, |i, _| o.from_int(v[i]))
    }

    fn ramanujan(o: &Dvr, k: i64) -> LatticeSplit {
        LatticeSplit::new(Mat::identity(o, 2), col(o, &[1, 0]), col(o, &[1, k])).unwrap()
    }

    #[test]
    fn index_691() {
        let o = Dvr::p_adic(691).unwrap();
        let s = ramanujan(&o, 691);
        let r = split_and_congruence(&o, &s).unwrap();
        assert_eq!(r.cong, FinOModule::new(vec![1], 0));
        assert_eq!(pairing_discriminant(&o, &s, None).unwrap(), IdealO::Power(1));
    }

    #[test]
    fn split_lattice() {
        let o = Dvr::p_adic(5).unwrap();
        let s = LatticeSplit::new(Mat::identity(&o, 2), col(&o, &[1, 0]), col(&o, &[0, 1])).unwrap();
        assert!(split_and_congruence(&o, &s).unwrap().cong.is_zero());
        assert_eq!(pairing_discriminant(&o, &s, None).unwrap(), IdealO::UNIT);
    }

    #[test]
    fn pi_power_example() {
        let o = Dvr::p_adic(3).unwrap();
        for n in 1..5u32 {
            let s = ramanujan(&o, 3i64.pow(n));
            let r = split_and_congruence(&o, &s).unwrap();
            assert_eq!(r.cong, FinOModule::new(vec![n], 0));
            assert_eq!(pairing_discriminant(&o, &s, None).unwrap(), IdealO::Power(n));
        }
    }

    #[test]
    fn errors() {
        let o = Dvr::p_adic(5).unwrap();
        let s = LatticeSplit::new(Mat::identity(&o, 2), col(&o, &[1, 0]), col(&o, &[2, 0])).unwrap();
        assert!(matches!(split_and_congruence(&o, &s), Err(Error::NotADirectSum)));
        let s = LatticeSplit::new(Mat::zeros(&o, 2, 2), col(&o, &[1, 0]), col(&o, &[0, 1])).unwrap();
        assert!(matches!(split_and_congruence(&o, &s), Err(Error::DegenerateLattice)));
        let s = LatticeSplit::new(
            Mat::identity(&o, 3),
            col(&o, &[1, 0, 0]),
            col(&o, &[0, 1, 0]),
        )
        .unwrap();
        assert!(matches!(
            pairing_discriminant(&o, &s, None),
            Err(Error::RankMismatch(1, 2))
        ));
    }

    #[test]
    fn perfect_pairing_gives_same_ideal() {
        let o = Dvr::p_adic(5).unwrap();
        let s = ramanujan(&o, 25);
        let g = Mat::from_ints(&o, &[&[0, 1], &[1, 3]], 2);
        assert_eq!(pairing_discriminant(&o, &s, Some(&g)).unwrap(), IdealO::Power(2));
    }
}
