//! Cohomology of `Hom_A(F, M)` for a free resolution `F` of `O`.
//!
//! A degree-`i` cochain with values in `M = coker(P)` (`P` is `g x s`) is a
//! vector in `A^{r_i g}` with entry `k g + t` the `t`-th coordinate of the
//! image of the `k`-th basis element of `F_i`. The coboundary is
//! `d_{i+1}^T ⊗ I_g`; cochains are taken modulo `I_{r_i} ⊗ P`.
//!
//! `Ext^i_A(O, M)` is killed by `p`, so its `A`-presentation `W` on the
//! cocycle generators becomes an `O`-presentation after applying `lambda`.

use crate::algebra::AugmentedAlgebra;
use crate::dvr::{o_module_from_presentation, FinOModule, Mat, Scalar};
use crate::error::{Error, Result};
use crate::fp_module::FpModule;
use crate::poly::{syzygy_module, Poly, PolyMat, Submodule};
use crate::resolution::FreeResolution;

/// Cocycles spanning the cohomology, as columns.
#[derive(Clone, Debug)]
pub enum Representatives {
    /// `O`-valued cochains in `O^{r_i}`.
    Base(Mat),
    /// `M`-valued cochains in `A^{r_i g}`.
    Module(PolyMat),
}

#[derive(Clone, Debug)]
pub struct ExtModule {
    pub degree: usize,
    /// Presented on the representatives, with Smith witnesses.
    pub structure: FinOModule,
    pub representatives: Representatives,
    lift: Option<Submodule>,
}

impl ExtModule {
    pub fn free_rank(&self) -> usize {
        self.structure.free_rank()
    }

    pub fn generator_count(&self) -> usize {
        match &self.representatives {
            Representatives::Base(z) => z.ncols(),
            Representatives::Module(z) => z.ncols(),
        }
    }

    /// Coordinates on the representatives of the class of an `O`-valued
    /// cocycle.
    pub fn base_class(&self, alg: &AugmentedAlgebra, w: &[Scalar]) -> Result<Vec<Scalar>> {
        let Representatives::Base(z) = &self.representatives else {
            return Err(Error::InternalInvariantViolation(
                "base class requested from a module-valued Ext".into(),
            ));
        };
        z.solve(alg.dvr(), w).ok_or_else(|| {
            Error::InternalInvariantViolation("pushed cochain is not a cocycle".into())
        })
    }

    /// Coordinates on the representatives of the class of an `M`-valued
    /// cocycle; `lambda` of the cofactors, as `p` kills the class group.
    pub fn module_class(&self, alg: &AugmentedAlgebra, v: &[Poly]) -> Result<Vec<Scalar>> {
        let k = self.generator_count();
        if k == 0 {
            return Ok(Vec::new());
        }
        let sub = self.lift.as_ref().ok_or_else(|| {
            Error::InternalInvariantViolation("module class requested from a base Ext".into())
        })?;
        let cof = sub.lift(v)?.ok_or_else(|| {
            Error::InternalInvariantViolation("cochain is not a cocycle".into())
        })?;
        Ok(cof[..k].iter().map(|c| alg.lambda(c)).collect())
    }

    /// Free coordinates of a class given on the representatives.
    pub fn free_part(&self, alg: &AugmentedAlgebra, coords: &[Scalar]) -> Result<Vec<Scalar>> {
        self.structure.free_coordinates(alg.dvr(), coords)
    }

    /// A cocycle representing the `k`-th free normal-form generator.
    pub fn free_generator_cocycle_base(&self, alg: &AugmentedAlgebra, k: usize) -> Option<Vec<Scalar>> {
        let Representatives::Base(z) = &self.representatives else {
            return None;
        };
        let c = self.structure.free_generator(k)?;
        let o_cols: Vec<Vec<Scalar>> = (0..z.ncols()).map(|j| z.column(j)).collect();
        let mut out: Vec<Scalar> = vec![alg.dvr().zero(); z.nrows()];
        for (cj, col) in c.iter().zip(&o_cols) {
            for (o, x) in out.iter_mut().zip(col) {
                *o = o.add(&cj.mul(x));
            }
        }
        Some(out)
    }

    /// A cocycle in `A^{r_i g}` representing the `k`-th free generator.
    pub fn free_generator_cocycle_module(&self, alg: &AugmentedAlgebra, k: usize) -> Option<Vec<Poly>> {
        let Representatives::Module(z) = &self.representatives else {
            return None;
        };
        let c = self.structure.free_generator(k)?;
        let n = alg.nvars();
        let mut out = vec![Poly::zero(n); z.nrows()];
        for (j, cj) in c.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o = o.add(&z[(i, j)].scale(cj));
            }
        }
        Some(out.iter().map(|p| alg.quotient().reduce(p)).collect())
    }
}

/// `Ext^i_A(O, O)` from the complex `lambda(d)^T` over `O`.
pub fn ext_base(alg: &AugmentedAlgebra, res: &FreeResolution, i: usize) -> Result<ExtModule> {
    res.require(i + 1)?;
    let o = alg.dvr();
    let next = alg.lambda_mat(res.d(i + 1)).transpose();
    let z = next.kernel_basis(o)?;
    let prev = if i == 0 {
        Mat::zeros(o, 1, 0)
    } else {
        alg.lambda_mat(res.d(i)).transpose()
    };
    let mut coords = Vec::with_capacity(prev.ncols());
    for j in 0..prev.ncols() {
        coords.push(z.solve(o, &prev.column(j)).ok_or_else(|| {
            Error::InternalInvariantViolation(format!("boundary in degree {i} is not a cocycle"))
        })?);
    }
    let y = Mat::from_fn(z.ncols(), prev.ncols(), |r, c| coords[c][r].clone());
    Ok(ExtModule {
        degree: i,
        structure: o_module_from_presentation(o, &y)?,
        representatives: Representatives::Base(z),
        lift: None,
    })
}

fn select_rows(m: &PolyMat, rows: usize) -> PolyMat {
    PolyMat::from_fn(m.nvars(), rows, m.ncols(), |i, j| m[(i, j)].clone())
}

fn drop_trivial_columns(m: &PolyMat) -> PolyMat {
    let mut keep: Vec<Vec<Poly>> = Vec::new();
    for c in m.columns() {
        if c.iter().all(Poly::is_zero) || keep.contains(&c) {
            continue;
        }
        keep.push(c);
    }
    PolyMat::from_columns(m.nvars(), m.nrows(), &keep)
}

/// `Ext^i_A(O, M)` with syzygy kernels over `A`.
pub fn ext_module(m: &FpModule, res: &FreeResolution, i: usize) -> Result<ExtModule> {
    res.require(i + 1)?;
    let alg = m.algebra();
    let q = alg.quotient();
    let o = alg.dvr();
    let n = alg.nvars();
    let g = m.generator_count();
    let p = m.presentation();
    let (ri, rn) = (res.rank(i), res.rank(i + 1));
    if g == 0 || ri == 0 {
        return Ok(ExtModule {
            degree: i,
            structure: o_module_from_presentation(o, &Mat::zeros(o, 0, 0))?,
            representatives: Representatives::Module(PolyMat::zeros(n, ri * g, 0)),
            lift: None,
        });
    }
    let delta = res.d(i + 1).transpose().kron_identity_right(o, g);
    let rel_next = p.kron_identity_left(rn).map(Poly::neg);
    let cocycles = syzygy_module(q, &delta.hcat(&rel_next))?;
    let z = drop_trivial_columns(&select_rows(&cocycles, ri * g));
    let k = z.ncols();
    let boundaries = if i == 0 {
        PolyMat::zeros(n, ri * g, 0)
    } else {
        res.d(i).transpose().kron_identity_right(o, g)
    };
    let big = z.hcat(&boundaries).hcat(&p.kron_identity_left(ri));
    let sub = Submodule::new(q, &big)?;
    let w: Vec<Vec<Poly>> = sub.syzygies().into_iter().map(|mut v| {
        v.truncate(k);
        v
    }).collect();
    let lw = Mat::from_fn(k, w.len(), |r, c| alg.lambda(&w[c][r]));
    Ok(ExtModule {
        degree: i,
        structure: o_module_from_presentation(o, &lw)?,
        representatives: Representatives::Module(z),
        lift: Some(sub),
    })
}
