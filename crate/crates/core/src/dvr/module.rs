use std::fmt;

use serde::{Serialize, Serializer};

use super::{Dvr, Mat, Scalar};
use crate::error::{Error, Result};

/// An ideal of `O`: either zero or `(pi^e)`; `(pi^0)` is the unit ideal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IdealO {
    Zero,
    Power(u32),
}

impl IdealO {
    pub const UNIT: IdealO = IdealO::Power(0);

    pub fn exponent(self) -> Option<u32> {
        match self {
            IdealO::Zero => None,
            IdealO::Power(e) => Some(e),
        }
    }

    pub fn is_zero(self) -> bool {
        self == IdealO::Zero
    }

    pub fn is_unit(self) -> bool {
        self == IdealO::UNIT
    }

    /// Ideal generated by one element of `O`.
    pub fn principal(o: &Dvr, a: &Scalar) -> Result<IdealO> {
        o.require_integral(a)?;
        Ok(match o.valuation(a) {
            None => IdealO::Zero,
            Some(v) => IdealO::Power(v as u32),
        })
    }

    /// Sum of ideals: the smaller exponent wins.
    pub fn sum(self, o: IdealO) -> IdealO {
        match (self, o) {
            (IdealO::Zero, x) | (x, IdealO::Zero) => x,
            (IdealO::Power(a), IdealO::Power(b)) => IdealO::Power(a.min(b)),
        }
    }

    pub fn product(self, o: IdealO) -> IdealO {
        match (self, o) {
            (IdealO::Power(a), IdealO::Power(b)) => IdealO::Power(a + b),
            _ => IdealO::Zero,
        }
    }

    /// `self ⊆ other`.
    pub fn is_contained_in(self, other: IdealO) -> bool {
        match (self, other) {
            (IdealO::Zero, _) => true,
            (_, IdealO::Zero) => false,
            (IdealO::Power(a), IdealO::Power(b)) => a >= b,
        }
    }

    /// `length_O(O / self)`; `None` when infinite.
    pub fn colength(self) -> Option<u32> {
        self.exponent()
    }
}

impl fmt::Display for IdealO {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealO::Zero => write!(f, "(0)"),
            IdealO::Power(0) => write!(f, "(1)"),
            IdealO::Power(e) => write!(f, "(pi^{e})"),
        }
    }
}

impl Serialize for IdealO {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Change of generators from a presentation to invariant-factor form.
///
/// With `U * P * V = D` the Smith form of the presentation `P` (rows are
/// generators), normal-form coordinates of an element `x` given on the
/// presentation generators are `U * x`. The first `units` normal-form
/// generators are trivial, the next `torsion.len()` are torsion, the
/// remaining `free_rank` are free.
#[derive(Clone, Debug)]
pub struct Witness {
    pub to_normal: Mat,
    pub from_normal: Mat,
    pub units: usize,
}

/// A finitely generated `O`-module `⊕ O/(pi^{e_i}) ⊕ O^r`.
#[derive(Clone, Debug)]
pub struct FinOModule {
    torsion: Vec<u32>,
    free_rank: usize,
    witness: Option<Witness>,
}

impl PartialEq for FinOModule {
    fn eq(&self, o: &Self) -> bool {
        self.torsion == o.torsion && self.free_rank == o.free_rank
    }
}

impl Eq for FinOModule {}

impl FinOModule {
    /// Builds a module from its invariants; exponents are sorted and zeros
    /// dropped.
    pub fn new(mut torsion: Vec<u32>, free_rank: usize) -> Self {
        torsion.retain(|&e| e > 0);
        torsion.sort_unstable();
        FinOModule {
            torsion,
            free_rank,
            witness: None,
        }
    }

    pub fn zero() -> Self {
        FinOModule::new(Vec::new(), 0)
    }

    pub fn torsion_exponents(&self) -> &[u32] {
        &self.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    pub fn is_torsion(&self) -> bool {
        self.free_rank == 0
    }

    /// `length_O`, `None` when the module has a free part.
    pub fn length(&self) -> Option<u32> {
        (self.free_rank == 0).then(|| self.torsion.iter().sum())
    }

    /// The torsion submodule.
    pub fn torsion_part(&self) -> FinOModule {
        FinOModule::new(self.torsion.clone(), 0)
    }

    /// Coordinates in the free summand of the normal form of an element
    /// given on the presentation generators.
    pub fn free_coordinates(&self, o: &Dvr, element: &[Scalar]) -> Result<Vec<Scalar>> {
        let w = self.witness.as_ref().ok_or_else(|| {
            Error::InternalInvariantViolation("free coordinates need a module with witnesses".into())
        })?;
        let n = w.to_normal.nrows();
        if element.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: element.len(),
            });
        }
        for a in element {
            o.require_integral(a)?;
        }
        let y = w.to_normal.mul_vec(o, element);
        Ok(y[n - self.free_rank..].to_vec())
    }

    /// Presentation coordinates of the `k`-th free normal-form generator.
    pub fn free_generator(&self, k: usize) -> Option<Vec<Scalar>> {
        let w = self.witness.as_ref()?;
        let n = w.from_normal.nrows();
        (k < self.free_rank).then(|| w.from_normal.column(n - self.free_rank + k))
    }

    /// Largest torsion exponent (the annihilator exponent of the torsion).
    pub fn max_exponent(&self) -> u32 {
        self.torsion.last().copied().unwrap_or(0)
    }

    pub fn direct_sum(&self, o: &FinOModule) -> FinOModule {
        let mut t = self.torsion.clone();
        t.extend_from_slice(&o.torsion);
        FinOModule::new(t, self.free_rank + o.free_rank)
    }

    /// `Fitt_k` computed from the invariant factors.
    pub fn fitting(&self, k: usize) -> IdealO {
        // n generators of which free_rank carry no relation
        let n = self.torsion.len() + self.free_rank;
        if k >= n {
            return IdealO::UNIT;
        }
        if n - k > self.torsion.len() {
            return IdealO::Zero;
        }
        IdealO::Power(self.torsion[..n - k].iter().sum())
    }
}

impl fmt::Display for FinOModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .torsion
            .iter()
            .map(|&e| {
                if e == 1 {
                    "O/pi".to_string()
                } else {
                    format!("O/pi^{e}")
                }
            })
            .collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("O".to_string()),
            r => parts.push(format!("O^{r}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" (+) "))
        }
    }
}

impl Serialize for FinOModule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FinOModule", 3)?;
        st.serialize_field("torsion_exponents", &self.torsion)?;
        st.serialize_field("free_rank", &self.free_rank)?;
        st.serialize_field("text", &self.to_string())?;
        st.end()
    }
}

/// Cokernel of an `O`-matrix whose rows index generators and whose columns
/// are relations, in invariant-factor form with witnesses.
pub fn o_module_from_presentation(o: &Dvr, matrix: &Mat) -> Result<FinOModule> {
    let s = matrix.smith(o)?;
    let units = s.exponents.iter().take_while(|&&e| e == 0).count();
    let torsion = s.exponents[units..].to_vec();
    Ok(FinOModule {
        torsion,
        free_rank: matrix.nrows() - s.rank,
        witness: Some(Witness {
            to_normal: s.u,
            from_normal: s.u_inv,
            units,
        }),
    })
}

/// `Fitt_k` of the module presented by `matrix`: the ideal of
/// `(n-k)`-minors, `n` the number of generators (rows).
pub fn fitting_ideal(o: &Dvr, matrix: &Mat, k: usize) -> Result<IdealO> {
    let n = matrix.nrows();
    if k >= n {
        matrix.require_integral(o)?;
        return Ok(IdealO::UNIT);
    }
    let s = matrix.smith(o)?;
    let need = n - k;
    if need > s.rank {
        return Ok(IdealO::Zero);
    }
    Ok(IdealO::Power(s.exponents[..need].iter().sum()))
}

/// The order ideal `{α(x) : α ∈ Hom_O(U, O)}` of an element given by its
/// coordinates on the presentation generators of `module`.
pub fn order_ideal(o: &Dvr, module: &FinOModule, element: &[Scalar]) -> Result<IdealO> {
    let y = module.free_coordinates(o, element)?;
    Ok(y.iter()
        .filter_map(|a| o.valuation(a))
        .min()
        .map_or(IdealO::Zero, |v| IdealO::Power(v as u32)))
}

/// `span(big) / span(small)` for column sets with `span(small)` contained
/// in `span(big)`.
pub fn subquotient(o: &Dvr, big: &Mat, small: &Mat) -> Result<FinOModule> {
    let basis = big.column_span_basis(o)?;
    let mut coords = Vec::with_capacity(small.ncols());
    for j in 0..small.ncols() {
        let y = basis.solve(o, &small.column(j)).ok_or_else(|| {
            Error::InternalInvariantViolation("subquotient: small lattice not contained".into())
        })?;
        coords.push(y);
    }
    let y = Mat::from_fn(basis.ncols(), small.ncols(), |i, j| coords[j][i].clone());
    o_module_from_presentation(o, &y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o5() -> Dvr {
        Dvr::p_adic(5).unwrap()
    }

    #[test]
    fn empty_relations_give_free_module() {
        let o = o5();
        let m = o_module_from_presentation(&o, &Mat::zeros(&o, 2, 0)).unwrap();
        assert_eq!(m.free_rank(), 2);
        assert!(m.torsion_exponents().is_empty());
    }

    #[test]
    fn diagonal_presentation() {
        let o = o5();
        let m = o_module_from_presentation(&o, &Mat::from_ints(&o, &[&[1, 0], &[0, 25]], 2))
            .unwrap();
        assert_eq!(m.torsion_exponents(), &[2]);
        assert_eq!(m.free_rank(), 0);
        assert_eq!(m.length(), Some(2));
    }

    #[test]
    fn jacobian_of_depth_zero_example() {
        let o = o5();
        let pi = o.uniformizer();
        let j = Mat::from_rows(
            vec![vec![pi.neg(), o.zero()], vec![pi.mul(&pi), o.zero()]],
            2,
        )
        .unwrap();
        let m = o_module_from_presentation(&o, &j).unwrap();
        assert_eq!(m.torsion_exponents(), &[1]);
        assert_eq!(m.free_rank(), 1);
        assert_eq!(fitting_ideal(&o, &j, 1).unwrap(), IdealO::Power(1));
        assert_eq!(m.fitting(1), IdealO::Power(1));
    }

    #[test]
    fn fitting_ideals() {
        let o = o5();
        let d = Mat::from_rows(
            vec![vec![o.pi_pow(1), o.zero()], vec![o.zero(), o.pi_pow(3)]],
            2,
        )
        .unwrap();
        assert_eq!(fitting_ideal(&o, &d, 0).unwrap(), IdealO::Power(4));
        assert_eq!(fitting_ideal(&o, &d, 1).unwrap(), IdealO::Power(1));
        assert_eq!(fitting_ideal(&o, &d, 2).unwrap(), IdealO::UNIT);
        let bad = Mat::from_rows(vec![vec![o.one().div(&o.from_int(5))]], 1).unwrap();
        assert!(matches!(
            fitting_ideal(&o, &bad, 0),
            Err(Error::NonIntegralEntry(_))
        ));
    }

    #[test]
    fn order_ideals() {
        let o = o5();
        // O/pi (+) O on generators g0, g1
        let p = Mat::from_rows(vec![vec![o.pi_pow(1)], vec![o.zero()]], 1).unwrap();
        let m = o_module_from_presentation(&o, &p).unwrap();
        assert_eq!(
            order_ideal(&o, &m, &[o.zero(), o.zero()]).unwrap(),
            IdealO::Zero
        );
        assert_eq!(
            order_ideal(&o, &m, &[o.one(), o.zero()]).unwrap(),
            IdealO::Zero
        );
        assert_eq!(
            order_ideal(&o, &m, &[o.zero(), o.pi_pow(1)]).unwrap(),
            IdealO::Power(1)
        );
        assert!(matches!(
            order_ideal(&o, &m, &[o.one()]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn display_forms() {
        assert_eq!(IdealO::Power(2).to_string(), "(pi^2)");
        assert_eq!(IdealO::UNIT.to_string(), "(1)");
        assert_eq!(IdealO::Zero.to_string(), "(0)");
        assert_eq!(FinOModule::new(vec![2, 1], 1).to_string(), "O/pi (+) O/pi^2 (+) O");
        assert_eq!(FinOModule::zero().to_string(), "0");
    }
}
