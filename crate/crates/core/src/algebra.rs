//! Augmented algebras `(A, lambda)` with `A = O[x_1..x_n]/(f_1..f_m)` and
//! `lambda(x_i) = a_i`, the cotangent module `p/p^2`, and membership tests
//! for `p` and its second symbolic power.

use serde::Serialize;

use crate::dvr::{fitting_ideal, o_module_from_presentation, order_ideal};
use crate::dvr::{Dvr, FinOModule, IdealO, Mat, Scalar};
use crate::error::{Error, Result};
use crate::poly::{taylor_division, Bounds, Poly, PolyMat, PolyRing, QuotientRing};

/// User assertions that the engine cannot decide; they only change how
/// verdicts are labelled.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Assertions {
    pub ci: bool,
    pub dim: Option<usize>,
    pub depth: Option<u32>,
    pub mcm: bool,
    pub gorenstein: bool,
}

#[derive(Clone, Debug)]
pub struct AugmentedAlgebra {
    q: QuotientRing,
    point: Vec<Scalar>,
    codim: usize,
    assertions: Assertions,
    notes: Vec<String>,
}

impl AugmentedAlgebra {
    /// Validates `lambda` exactly and computes the standard basis of `I`.
    pub fn new(
        ring: PolyRing,
        relations: Vec<Poly>,
        point: Vec<Scalar>,
        codim: usize,
        assertions: Assertions,
        bounds: Bounds,
    ) -> Result<Self> {
        let o = ring.dvr().clone();
        if point.len() != ring.nvars() {
            return Err(Error::DimensionMismatch {
                expected: ring.nvars(),
                found: point.len(),
            });
        }
        for (name, a) in ring.vars().iter().zip(&point) {
            o.require_integral(a)?;
            if o.is_unit(a) {
                return Err(Error::NonLocalAugmentation(format!(
                    "{name} maps to the unit {a}"
                )));
            }
        }
        for f in &relations {
            f.require_integral(&o)?;
            let v = f.eval(&o, &point);
            if !v.is_zero() {
                return Err(Error::AugmentationNotWellDefined(format!(
                    "{} evaluates to {v}",
                    ring.show(f)
                )));
            }
        }
        let mut notes = Vec::new();
        if assertions.ci {
            let nonzero = relations.iter().filter(|f| !f.is_zero()).count();
            match assertions.dim {
                Some(d) if nonzero + d != ring.nvars() + 1 => notes.push(format!(
                    "complete intersection asserted, but {nonzero} relations in {} variables \
                     do not cut out dimension {d}",
                    ring.nvars()
                )),
                Some(_) => {}
                None => notes.push(
                    "complete intersection asserted without a dimension; not cross-checked".into(),
                ),
            }
        }
        let q = QuotientRing::new(ring, relations, bounds)?;
        if q.basis().is_unit_ideal() {
            return Err(Error::AugmentationNotWellDefined("the relations generate (1)".into()));
        }
        Ok(AugmentedAlgebra {
            q,
            point,
            codim,
            assertions,
            notes,
        })
    }

    pub fn quotient(&self) -> &QuotientRing {
        &self.q
    }

    pub fn ring(&self) -> &PolyRing {
        self.q.ring()
    }

    pub fn dvr(&self) -> &Dvr {
        self.q.dvr()
    }

    pub fn nvars(&self) -> usize {
        self.q.nvars()
    }

    pub fn relations(&self) -> &[Poly] {
        self.q.relations()
    }

    pub fn point(&self) -> &[Scalar] {
        &self.point
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn assertions(&self) -> &Assertions {
        &self.assertions
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn bounds(&self) -> Bounds {
        self.q.bounds()
    }

    /// Same ring and augmentation with another declared codimension.
    pub fn with_codim(&self, codim: usize) -> AugmentedAlgebra {
        AugmentedAlgebra {
            codim,
            ..self.clone()
        }
    }

    /// `A/(extra)` with the inherited augmentation.
    pub fn quotient_by(&self, extra: &[Poly], codim: usize) -> Result<AugmentedAlgebra> {
        let mut rels = self.relations().to_vec();
        rels.extend(extra.iter().cloned());
        AugmentedAlgebra::new(
            self.ring().clone(),
            rels,
            self.point.clone(),
            codim,
            Assertions::default(),
            self.bounds(),
        )
    }

    /// `lambda(f)`.
    pub fn lambda(&self, f: &Poly) -> Scalar {
        f.eval(self.dvr(), &self.point)
    }

    pub fn lambda_mat(&self, m: &PolyMat) -> Mat {
        m.eval(self.dvr(), &self.point)
    }

    /// `x_i - a_i`, generators of `p`.
    pub fn p_generators(&self) -> Vec<Poly> {
        let r = self.ring();
        (0..self.nvars())
            .map(|i| r.var(i).sub(&r.constant(self.point[i].clone())))
            .collect()
    }

    /// Jacobian at `lambda`: rows are variables, columns are relations.
    pub fn jacobian(&self) -> Mat {
        let o = self.dvr();
        let rels = self.relations();
        Mat::from_fn(self.nvars(), rels.len(), |i, j| {
            rels[j].derivative(o, i).eval(o, &self.point)
        })
    }

    /// `p/p^2` with its torsion part and `Fitt_c`.
    pub fn cotangent_invariants(&self) -> Result<CotangentData> {
        let o = self.dvr();
        let jac = self.jacobian();
        let cotangent = o_module_from_presentation(o, &jac)?;
        let fitt_c = fitting_ideal(o, &jac, self.codim)?;
        Ok(CotangentData {
            phi: cotangent.torsion_part(),
            cotangent,
            fitt_c,
        })
    }

    /// Coordinates of `[f]` in `p/p^2` on the generators `x_i - a_i`.
    pub fn cotangent_class(&self, f: &Poly) -> Vec<Scalar> {
        let t = taylor_division(self.dvr(), f, &self.point);
        t.coeffs.iter().map(|g| self.lambda(g)).collect()
    }

    /// `f in p`, `f in p^(2)`, and the order ideal of `[f]` in `p/p^2`.
    ///
    /// `A_p` is regular, so `f in p^(2)` iff `[f]` is torsion.
    pub fn symbolic_power_test(&self, f: &Poly) -> Result<SymbolicPowerTest> {
        let o = self.dvr();
        let in_p = self.lambda(f).is_zero();
        if !in_p {
            return Ok(SymbolicPowerTest {
                in_p,
                in_p2_symbolic: false,
                ord_class: IdealO::UNIT,
            });
        }
        let cot = o_module_from_presentation(o, &self.jacobian())?;
        let ord = order_ideal(o, &cot, &self.cotangent_class(f))?;
        Ok(SymbolicPowerTest {
            in_p,
            in_p2_symbolic: ord.is_zero(),
            ord_class: ord,
        })
    }

    /// Checks that `A` is local with maximal ideal `(pi, x - a)`: some power
    /// of each `x_i` lies in `I + (pi)`.
    pub fn check_local(&self) -> Result<()> {
        let o = self.dvr();
        let r = self.ring();
        let mut rels = self.relations().to_vec();
        rels.push(r.constant(o.uniformizer()));
        let q = QuotientRing::new(r.clone(), rels, self.bounds())?;
        for i in 0..self.nvars() {
            let mut pow = r.var(i);
            let mut ok = false;
            for _ in 0..self.bounds().degree {
                if q.is_zero(&pow) {
                    ok = true;
                    break;
                }
                pow = q.reduce(&pow.mul(&r.var(i)));
            }
            if !ok {
                return Err(Error::NotLocal(format!(
                    "no power of {} up to degree {} lies in I + (pi)",
                    r.vars()[i],
                    self.bounds().degree
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CotangentData {
    pub cotangent: FinOModule,
    pub phi: FinOModule,
    pub fitt_c: IdealO,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolicPowerTest {
    pub in_p: bool,
    pub in_p2_symbolic: bool,
    pub ord_class: IdealO,
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn alg(p: u64, vars: &[&str], rels: &[&str], point: &[&str], c: usize) -> Result<AugmentedAlgebra> {
        let o = Dvr::p_adic(p).unwrap();
        let r = PolyRing::new(o.clone(), vars.iter().map(|s| s.to_string()).collect()).unwrap();
        let rels = rels.iter().map(|s| r.parse(s).unwrap()).collect();
        let pt = point
            .iter()
            .map(|s| crate::poly::parse_scalar(&o, s).unwrap())
            .collect();
        AugmentedAlgebra::new(r, rels, pt, c, Assertions::default(), Bounds::default())
    }

    #[test]
    fn build_errors() {
        assert!(alg(5, &["x"], &["x*(x - pi^2)"], &["0"], 0).is_ok());
        assert!(matches!(
            alg(5, &["x"], &["x*(x - pi^2)"], &["1"], 0),
            Err(Error::NonLocalAugmentation(_))
        ));
        assert!(matches!(
            alg(5, &["x"], &["x*(x - pi^2)"], &["pi"], 0),
            Err(Error::AugmentationNotWellDefined(_))
        ));
    }

    #[test]
    fn cotangent_examples() {
        for n in 1..4u32 {
            let a = alg(3, &["x"], &[&format!("x*(x - pi^{n})")], &["0"], 0).unwrap();
            let d = a.cotangent_invariants().unwrap();
            assert_eq!(d.cotangent, FinOModule::new(vec![n], 0));
            assert_eq!(d.phi.length(), Some(n));
            assert_eq!(d.fitt_c, IdealO::Power(n));
        }
        let b = alg(5, &["x", "y"], &["x*(x - pi)", "y*(y - pi)", "x*y"], &["0", "0"], 0).unwrap();
        let d = b.cotangent_invariants().unwrap();
        assert_eq!(d.cotangent, FinOModule::new(vec![1, 1], 0));
        let e = alg(5, &["x", "y"], &["x*(x - pi)", "x*pi^2", "x*y"], &["0", "0"], 1).unwrap();
        let d = e.cotangent_invariants().unwrap();
        assert_eq!(d.cotangent, FinOModule::new(vec![1], 1));
        assert_eq!(d.fitt_c, IdealO::Power(1));
    }

    #[test]
    fn symbolic_powers() {
        let a = alg(5, &["x", "y"], &["x*(x - pi^2)"], &["0", "0"], 1).unwrap();
        let r = a.ring().clone();
        let t = a.symbolic_power_test(&r.parse("y").unwrap()).unwrap();
        assert!(t.in_p && !t.in_p2_symbolic);
        assert_eq!(t.ord_class, IdealO::UNIT);
        let t = a.symbolic_power_test(&r.parse("x^2").unwrap()).unwrap();
        assert!(t.in_p && t.in_p2_symbolic);
        assert_eq!(t.ord_class, IdealO::Zero);
        let t = a.symbolic_power_test(&r.parse("1").unwrap()).unwrap();
        assert!(!t.in_p);
        let t = a.symbolic_power_test(&r.parse("y - pi").unwrap()).unwrap();
        assert!(!t.in_p);
    }

    #[test]
    fn locality() {
        let a = alg(5, &["x"], &["x*(x - pi^2)"], &["0"], 0).unwrap();
        assert!(a.check_local().is_ok());
        let b = alg(5, &["x"], &["x*(x - 1)"], &["0"], 0).unwrap();
        assert!(matches!(b.check_local(), Err(Error::NotLocal(_))));
    }
}
