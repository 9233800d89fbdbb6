//! Problem files: a TOML description of the base ring, an augmented
//! algebra, named modules, an optional resolution and an optional lattice.
//!
//! ```toml
//! [dvr]
//! kind = "p_adic"
//! p = 5
//!
//! [ring]
//! vars = ["x"]
//! relations = ["x*(x - pi^2)"]
//!
//! [augmentation]
//! values = { x = "0" }
//! codim = 0
//!
//! [module.M]
//! presentation = [["x"]]
//! ```
//!
//! Parse errors carry the line and column in the file, including errors
//! inside polynomial strings. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::Arc;

use serde::Deserialize;
use toml::Spanned;

use crate::algebra::{Assertions, AugmentedAlgebra};
use crate::congruence::{ResolutionConfig, RingMap};
use crate::dvr::{Dvr, Mat, Scalar};
use crate::error::{Error, Result};
use crate::fp_module::FpModule;
use crate::lattice::LatticeSplit;
use crate::poly::{parse_poly, parse_scalar, Bounds, Poly, PolyMat, PolyRing};
use crate::resolution::Strategy;

/// Upper bound on the size of a problem file, in bytes.
pub const MAX_FILE_LEN: usize = 1 << 20;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    dvr: RawDvr,
    ring: Option<RawRing>,
    augmentation: Option<RawAugmentation>,
    #[serde(default)]
    module: BTreeMap<String, RawModule>,
    resolution: Option<RawResolution>,
    lattice: Option<RawLattice>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDvr {
    kind: Spanned<String>,
    p: Option<u64>,
    q: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRing {
    vars: Vec<String>,
    #[serde(default)]
    relations: Vec<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAugmentation {
    values: BTreeMap<String, Spanned<String>>,
    codim: usize,
    #[serde(default)]
    ci: bool,
    dim: Option<usize>,
    depth: Option<u32>,
    #[serde(default)]
    mcm: bool,
    #[serde(default)]
    gorenstein: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModule {
    presentation: Spanned<toml::Value>,
    depth: Option<u32>,
    #[serde(default)]
    mcm: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawResolution {
    strategy: Option<Spanned<String>>,
    length: Option<usize>,
    differentials: Option<Vec<Vec<Vec<Spanned<String>>>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    basis: Vec<Vec<Spanned<String>>>,
    v1: Vec<Vec<Spanned<String>>>,
    v2: Vec<Vec<Spanned<String>>>,
    pairing: Option<Vec<Vec<Spanned<String>>>>,
}

/// A lattice `L` in `V_1 (+) V_2` with an optional Gram matrix on `L`.
#[derive(Clone, Debug)]
pub struct LatticeProblem {
    pub split: LatticeSplit,
    pub pairing: Option<Mat>,
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub dvr: Dvr,
    pub algebra: Option<Arc<AugmentedAlgebra>>,
    pub modules: BTreeMap<String, FpModule>,
    pub resolution: ResolutionConfig,
    pub lattice: Option<LatticeProblem>,
}

/// 1-based line and column of a byte offset.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text.as_bytes()[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let start = before.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    let column = String::from_utf8_lossy(&before[start..]).chars().count() + 1;
    (line, column)
}

struct Source<'a> {
    text: &'a str,
}

impl Source<'_> {
    fn error_at(&self, span: &Range<usize>, message: impl Into<String>) -> Error {
        let (line, column) = position(self.text, span.start);
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Moves a parse error inside a quoted string to file coordinates; any
    /// other error is tagged with the string's position.
    fn relocate(&self, span: &Range<usize>, e: Error) -> Error {
        let (line, column) = position(self.text, span.start);
        match e {
            Error::Parse {
                line: l,
                column: c,
                message,
            } => Error::Parse {
                line: line + l - 1,
                column: if l == 1 { column + c } else { c },
                message,
            },
            other => Error::Parse {
                line,
                column,
                message: other.to_string(),
            },
        }
    }

    fn poly(&self, ring: &PolyRing, s: &Spanned<String>) -> Result<Poly> {
        parse_poly(ring, s.get_ref()).map_err(|e| self.relocate(&s.span(), e))
    }

    fn scalar(&self, o: &Dvr, s: &Spanned<String>) -> Result<Scalar> {
        parse_scalar(o, s.get_ref()).map_err(|e| self.relocate(&s.span(), e))
    }

    fn poly_matrix(&self, ring: &PolyRing, rows: &[Vec<Spanned<String>>]) -> Result<PolyMat> {
        let ncols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != ncols {
                let span = row.first().map_or(0..0, |s| s.span());
                return Err(self.error_at(
                    &span,
                    format!("ragged matrix: expected {ncols} entries, found {}", row.len()),
                ));
            }
            entries.push(row.iter().map(|s| self.poly(ring, s)).collect::<Result<Vec<_>>>()?);
        }
        Ok(PolyMat::from_fn(ring.nvars(), rows.len(), ncols, |i, j| {
            entries[i][j].clone()
        }))
    }

    fn scalar_matrix(&self, o: &Dvr, rows: &[Vec<Spanned<String>>]) -> Result<Mat> {
        let ncols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != ncols {
                let span = row.first().map_or(0..0, |s| s.span());
                return Err(self.error_at(
                    &span,
                    format!("ragged matrix: expected {ncols} entries, found {}", row.len()),
                ));
            }
            entries.push(row.iter().map(|s| self.scalar(o, s)).collect::<Result<Vec<_>>>()?);
        }
        Mat::from_rows(entries, ncols)
    }
}

fn build_dvr(src: &Source, raw: &RawDvr) -> Result<Dvr> {
    let span = raw.kind.span();
    let missing = |k: &str| src.error_at(&span, format!("dvr kind needs `{k}`"));
    let stray = |k: &str| src.error_at(&span, format!("`{k}` does not apply to this dvr kind"));
    match raw.kind.get_ref().as_str() {
        "p_adic" => {
            if raw.q.is_some() {
                return Err(stray("q"));
            }
            Dvr::p_adic(raw.p.ok_or_else(|| missing("p"))?).map_err(|e| src.relocate(&span, e))
        }
        "power_series" => {
            if raw.p.is_some() {
                return Err(stray("p"));
            }
            Dvr::power_series(raw.q.ok_or_else(|| missing("q"))?)
                .map_err(|e| src.relocate(&span, e))
        }
        other => Err(src.error_at(
            &span,
            format!("unknown dvr kind {other:?}; expected \"p_adic\" or \"power_series\""),
        )),
    }
}

fn build_algebra(
    src: &Source,
    o: &Dvr,
    ring: &RawRing,
    aug: &RawAugmentation,
    bounds: Bounds,
) -> Result<AugmentedAlgebra> {
    let pr = PolyRing::new(o.clone(), ring.vars.clone())?;
    let relations = ring
        .relations
        .iter()
        .map(|s| src.poly(&pr, s))
        .collect::<Result<Vec<_>>>()?;
    for name in aug.values.keys() {
        if !ring.vars.contains(name) {
            return Err(Error::UnknownName(format!("augmentation value for {name}")));
        }
    }
    let mut point = Vec::with_capacity(ring.vars.len());
    for v in &ring.vars {
        let s = aug
            .values
            .get(v)
            .ok_or_else(|| Error::InvalidConfig(format!("no augmentation value for {v}")))?;
        point.push(src.scalar(o, s)?);
    }
    let assertions = Assertions {
        ci: aug.ci,
        dim: aug.dim,
        depth: aug.depth,
        mcm: aug.mcm,
        gorenstein: aug.gorenstein,
    };
    AugmentedAlgebra::new(pr, relations, point, aug.codim, assertions, bounds)
}

fn build_module(
    src: &Source,
    alg: &Arc<AugmentedAlgebra>,
    name: &str,
    raw: &RawModule,
) -> Result<FpModule> {
    let span = raw.presentation.span();
    let m = match raw.presentation.get_ref() {
        toml::Value::String(s) => {
            let words: Vec<&str> = s.split_whitespace().collect();
            match words.as_slice() {
                ["ring"] => FpModule::ring(alg.clone()),
                ["residue"] => FpModule::residue(alg.clone()),
                ["free", n] => {
                    let rank = n.parse::<usize>().map_err(|_| {
                        src.error_at(&span, format!("module {name}: bad rank {n:?}"))
                    })?;
                    FpModule::free(alg.clone(), rank)
                }
                _ => {
                    return Err(src.error_at(
                        &span,
                        format!(
                            "module {name}: expected a matrix, \"ring\", \"residue\" or \"free N\""
                        ),
                    ))
                }
            }
        }
        toml::Value::Array(rows) => {
            let mut entries: Vec<Vec<Spanned<String>>> = Vec::with_capacity(rows.len());
            for row in rows {
                let toml::Value::Array(row) = row else {
                    return Err(src.error_at(&span, format!("module {name}: rows must be arrays")));
                };
                let mut out = Vec::with_capacity(row.len());
                for e in row {
                    let toml::Value::String(s) = e else {
                        return Err(src.error_at(
                            &span,
                            format!("module {name}: entries must be polynomial strings"),
                        ));
                    };
                    // entries of an inline matrix share the matrix position
                    out.push(Spanned::new(span.clone(), s.clone()));
                }
                entries.push(out);
            }
            let pres = src.poly_matrix(alg.ring(), &entries).map_err(|e| match e {
                Error::Parse {
                    line,
                    column,
                    message,
                } => Error::Parse {
                    line,
                    column,
                    message: format!("module {name}: {message}"),
                },
                other => other,
            })?;
            FpModule::new(alg.clone(), pres)?
        }
        _ => {
            return Err(src.error_at(
                &span,
                format!("module {name}: presentation must be a string or a matrix"),
            ))
        }
    };
    Ok(m.with_assertions(raw.depth, raw.mcm))
}

impl Problem {
    /// Parses a problem file. `bounds` applies to every standard-basis
    /// computation of the algebra.
    pub fn parse(text: &str, bounds: Bounds) -> Result<Problem> {
        if text.len() > MAX_FILE_LEN {
            return Err(Error::parse(1, 1, "problem file too large"));
        }
        let src = Source { text };
        let raw: RawProblem = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| position(text, s.start));
            Error::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        let dvr = build_dvr(&src, &raw.dvr)?;
        let algebra = match (&raw.ring, &raw.augmentation) {
            (Some(r), Some(a)) => Some(Arc::new(build_algebra(&src, &dvr, r, a, bounds)?)),
            (None, None) => None,
            (Some(_), None) => {
                return Err(Error::InvalidConfig("[ring] needs an [augmentation] section".into()))
            }
            (None, Some(_)) => {
                return Err(Error::InvalidConfig("[augmentation] needs a [ring] section".into()))
            }
        };
        let mut modules = BTreeMap::new();
        if !raw.module.is_empty() {
            let alg = algebra
                .as_ref()
                .ok_or_else(|| Error::InvalidConfig("modules need a [ring] section".into()))?;
            for (name, m) in &raw.module {
                modules.insert(name.clone(), build_module(&src, alg, name, m)?);
            }
        }
        let mut resolution = ResolutionConfig::default();
        if let Some(r) = &raw.resolution {
            if let Some(s) = &r.strategy {
                resolution.strategy =
                    s.get_ref().parse().map_err(|e| src.relocate(&s.span(), e))?;
            }
            resolution.length = r.length;
            if let Some(ds) = &r.differentials {
                let alg = algebra.as_ref().ok_or_else(|| {
                    Error::InvalidConfig("differentials need a [ring] section".into())
                })?;
                let mats = ds
                    .iter()
                    .map(|d| src.poly_matrix(alg.ring(), d))
                    .collect::<Result<Vec<_>>>()?;
                if r.strategy.is_none() {
                    resolution.strategy = Strategy::File;
                }
                resolution.user = Some(mats);
            }
        }
        let lattice = match &raw.lattice {
            None => None,
            Some(l) => {
                let basis = src.scalar_matrix(&dvr, &l.basis)?;
                let v1 = src.scalar_matrix(&dvr, &l.v1)?;
                let v2 = src.scalar_matrix(&dvr, &l.v2)?;
                let pairing = l
                    .pairing
                    .as_ref()
                    .map(|p| src.scalar_matrix(&dvr, p))
                    .transpose()?;
                Some(LatticeProblem {
                    split: LatticeSplit::new(basis, v1, v2)?,
                    pairing,
                })
            }
        };
        Ok(Problem {
            dvr,
            algebra,
            modules,
            resolution,
            lattice,
        })
    }

    pub fn algebra(&self) -> Result<&Arc<AugmentedAlgebra>> {
        self.algebra
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("the problem has no [ring] section".into()))
    }

    /// The named module; `ring` and `residue` are always available.
    pub fn module(&self, name: &str) -> Result<FpModule> {
        if let Some(m) = self.modules.get(name) {
            return Ok(m.clone());
        }
        let alg = self.algebra()?;
        match name {
            "ring" => Ok(FpModule::ring(alg.clone())),
            "residue" => Ok(FpModule::residue(alg.clone())),
            _ => Err(Error::UnknownName(format!("module {name}"))),
        }
    }
}

/// Parses `x -> poly, y -> poly` into a map from `source` to `target`.
/// Assignments are separated by commas, semicolons or newlines; every
/// source variable is assigned exactly once.
pub fn parse_map(source: &PolyRing, target: &PolyRing, text: &str) -> Result<RingMap> {
    if text.len() > MAX_FILE_LEN {
        return Err(Error::parse(1, 1, "map too large"));
    }
    let mut images: Vec<Option<Poly>> = vec![None; source.nvars()];
    let mut offset = 0;
    for piece in text.split([',', ';', '\n']) {
        let start = offset;
        offset += piece.len() + 1;
        if piece.trim().is_empty() {
            continue;
        }
        let (line, column) = position(text, start);
        let Some((lhs, rhs)) = piece.split_once("->") else {
            return Err(Error::parse(line, column, "expected `name -> polynomial`"));
        };
        let name = lhs.trim();
        let Some(i) = source.vars().iter().position(|v| v == name) else {
            return Err(Error::parse(line, column, format!("unknown source variable {name:?}")));
        };
        if images[i].is_some() {
            return Err(Error::parse(line, column, format!("{name} assigned twice")));
        }
        let rhs_col = column + lhs.chars().count() + 2;
        let img = parse_poly(target, rhs).map_err(|e| match e {
            Error::Parse {
                line: l,
                column: c,
                message,
            } => Error::Parse {
                line: line + l - 1,
                column: if l == 1 { rhs_col + c - 1 } else { c },
                message,
            },
            other => other,
        })?;
        images[i] = Some(img);
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            p.ok_or_else(|| Error::InvalidConfig(format!("no image for {}", source.vars()[i])))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RingMap { images })
}

#[cfg(test)]
mod tests {
    use super::*;

    const A2: &str = r#"
[dvr]
kind = "p_adic"
p = 5

[ring]
vars = ["x"]
relations = ["x*(x - pi^2)"]

[augmentation]
values = { x = "0" }
codim = 0

[module.M]
presentation = [["x"]]
depth = 1
"#;

    #[test]
    fn parses_a_complete_file() {
        let p = Problem::parse(A2, Bounds::default()).unwrap();
        let alg = p.algebra().unwrap();
        assert_eq!(alg.nvars(), 1);
        assert_eq!(alg.codim(), 0);
        let m = p.module("M").unwrap();
        assert_eq!(m.generator_count(), 1);
        assert_eq!(m.asserted_depth(), Some(1));
        assert!(p.module("ring").is_ok());
        assert!(matches!(p.module("N"), Err(Error::UnknownName(_))));
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let text = A2.replace("codim = 0", "codim = 0\ncodimension = 1");
        match Problem::parse(&text, Bounds::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 13),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn polynomial_errors_point_into_the_file() {
        let text = A2.replace("x*(x - pi^2)", "x*(x - pi^2");
        match Problem::parse(&text, Bounds::default()) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 8);
                assert!(column > 13, "column {column}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lattice_section() {
        let text = r#"
[dvr]
kind = "p_adic"
p = 691

[lattice]
basis = [["1", "0"], ["0", "1"]]
v1 = [["1"], ["1"]]
v2 = [["1"], ["-1"]]
"#;
        let p = Problem::parse(text, Bounds::default()).unwrap();
        let l = p.lattice.unwrap();
        assert_eq!(l.split.dim(), 2);
        assert!(p.algebra.is_none());
    }

    #[test]
    fn maps_round_trip() {
        let o = Dvr::p_adic(3).unwrap();
        let a = PolyRing::new(o.clone(), vec!["x".into(), "y".into()]).unwrap();
        let b = PolyRing::new(o, vec!["x".into()]).unwrap();
        let m = parse_map(&a, &b, "x -> x, y -> 0").unwrap();
        assert_eq!(m.images[0], b.var(0));
        assert!(m.images[1].is_zero());
        assert!(parse_map(&a, &b, "x -> x").is_err());
        assert!(parse_map(&a, &b, "x -> x, x -> 0, y -> 0").is_err());
        match parse_map(&a, &b, "x -> x, y -> (x") {
            Err(Error::Parse { line: 1, column, .. }) => assert!(column >= 13),
            other => panic!("{other:?}"),
        }
    }
}
