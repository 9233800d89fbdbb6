use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use congruence_core::congruence::probe::{probe_fitting_question, Grammar};
use congruence_core::congruence::{
    deformation_step, invariance_check, numerical_criterion, serre_check, Analyzer, CriterionMode,
    Verdict,
};
use congruence_core::lattice::{pairing_discriminant, split_and_congruence};
use congruence_core::poly::{parse_poly, Bounds, DEFAULT_VALUATION_BOUND};
use congruence_core::problem::{parse_map, Problem};
use congruence_core::{Dvr, DvrKind, Error};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Cli, Command, Failure};

pub struct Outcome {
    pub record: Value,
    /// Some verdict of the run is `fails`.
    pub fails: bool,
}

type Run<T> = std::result::Result<T, Failure>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize to plain JSON")
}

struct Loaded {
    path: PathBuf,
    problem: Problem,
}

impl Loaded {
    fn engine<T>(&self, r: congruence_core::Result<T>) -> Run<T> {
        r.map_err(|e| Failure::Engine(Some(self.path.clone()), e))
    }

    fn analyzer(&self, cli: &Cli) -> Run<Analyzer> {
        let alg = self.engine(self.problem.algebra())?.clone();
        let mut config = self.problem.resolution.clone();
        if let Some(s) = &cli.strategy {
            config.strategy = self.engine(s.parse())?;
        }
        if cli.length.is_some() {
            config.length = cli.length;
        }
        Ok(Analyzer::new(alg, config))
    }
}

fn load(cli: &Cli, path: &Path) -> Run<Loaded> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
    let bounds = Bounds {
        degree: cli.degree_bound,
        valuation: DEFAULT_VALUATION_BOUND,
    };
    let problem =
        Problem::parse(&text, bounds).map_err(|e| Failure::Engine(Some(path.to_path_buf()), e))?;
    Ok(Loaded {
        path: path.to_path_buf(),
        problem,
    })
}

fn dvr_name(o: &Dvr) -> String {
    match o.kind() {
        DvrKind::PAdic { p } => format!("Z_({p})"),
        DvrKind::PowerSeries { q } => format!("F_{q}[[t]]"),
    }
}

fn record(command: &str, input: Option<&Loaded>, result: Value) -> Value {
    let mut r = json!({ "command": command, "result": result });
    if let Some(l) = input {
        r["input"] = json!(l.path.display().to_string());
        r["base_ring"] = json!(dvr_name(&l.problem.dvr));
    }
    r
}

fn is_criterion(name: &str) -> bool {
    matches!(name, "defect0" | "wld")
}

pub fn run(cli: &Cli) -> Run<Outcome> {
    match &cli.command {
        Command::Analyze { file, module } => {
            let l = load(cli, file)?;
            let an = l.analyzer(cli)?;
            let names: Vec<String> = match module {
                Some(m) => vec![m.clone()],
                None if l.problem.modules.is_empty() => vec!["ring".into()],
                None => l.problem.modules.keys().cloned().collect(),
            };
            let mut fails = false;
            let mut reports = BTreeMap::new();
            for name in names {
                let m = l.engine(l.problem.module(&name))?;
                let rep = l.engine(an.report(&m))?;
                fails |= rep
                    .verdicts
                    .iter()
                    .any(|(k, v)| is_criterion(k) && *v == Verdict::Fails);
                reports.insert(name, to_value(&rep));
            }
            let reg = l.engine(an.regularity())?;
            let serre = if reg.regular_at_p {
                to_value(&l.engine(serre_check(&an, false))?)
            } else {
                Value::Null
            };
            let result = json!({ "modules": reports, "serre": serre });
            Ok(Outcome {
                record: record("analyze", Some(&l), result),
                fails,
            })
        }
        Command::Eta { file, module } => {
            let l = load(cli, file)?;
            let an = l.analyzer(cli)?;
            let m = l.engine(l.problem.module(module))?;
            let eta = l.engine(an.eta(&m))?;
            Ok(Outcome {
                record: record("eta", Some(&l), json!({ "module": module, "eta": eta })),
                fails: false,
            })
        }
        Command::Psi { file, module } => {
            let l = load(cli, file)?;
            let an = l.analyzer(cli)?;
            let m = l.engine(l.problem.module(module))?;
            let psi = l.engine(an.psi(&m))?;
            let result = json!({ "module": module, "psi": psi, "length": psi.length() });
            Ok(Outcome {
                record: record("psi", Some(&l), result),
                fails: false,
            })
        }
        Command::Phi { file } => {
            let l = load(cli, file)?;
            let alg = l.engine(l.problem.algebra())?;
            let cot = l.engine(alg.cotangent_invariants())?;
            let result = json!({
                "phi": cot.phi,
                "length": cot.phi.length(),
                "cotangent": cot.cotangent,
                "fitt_c": cot.fitt_c,
            });
            Ok(Outcome {
                record: record("phi", Some(&l), result),
                fails: false,
            })
        }
        Command::Criterion {
            file,
            mode,
            module,
            target,
            map,
        } => {
            let l = load(cli, file)?;
            let an = l.analyzer(cli)?;
            let mode: CriterionMode = l.engine(mode.parse())?;
            let m = l.engine(l.problem.module(module))?;
            let rep = match (target, map) {
                (Some(t), Some(map)) => {
                    let tl = load(cli, t)?;
                    let bn = tl.analyzer(cli)?;
                    let ring_map = l.engine(parse_map(
                        an.algebra().ring(),
                        bn.algebra().ring(),
                        map,
                    ))?;
                    l.engine(numerical_criterion(&an, &m, mode, Some((&bn, &ring_map))))?
                }
                (None, None) => l.engine(numerical_criterion(&an, &m, mode, None))?,
                _ => {
                    return Err(Failure::Engine(
                        None,
                        Error::InvalidConfig("--target and --map go together".into()),
                    ))
                }
            };
            Ok(Outcome {
                fails: rep.verdict == Verdict::Fails,
                record: record("criterion", Some(&l), to_value(&rep)),
            })
        }
        Command::Deform {
            file,
            element,
            module,
        } => {
            let l = load(cli, file)?;
            let an = l.analyzer(cli)?;
            let m = l.engine(l.problem.module(module))?;
            let f = parse_poly(an.algebra().ring(), element)
                .map_err(|e| Failure::Engine(None, e))?;
            let d = l.engine(deformation_step(&an, &m, &f))?;
            Ok(Outcome {
                fails: !d.exact_sequence_holds,
                record: record("deform", Some(&l), to_value(&d)),
            })
        }
        Command::Lattice { file } => {
            let l = load(cli, file)?;
            let lp = l.problem.lattice.as_ref().ok_or_else(|| {
                Failure::Engine(
                    Some(l.path.clone()),
                    Error::InvalidConfig("the problem has no [lattice] section".into()),
                )
            })?;
            let o = &l.problem.dvr;
            let sc = l.engine(split_and_congruence(o, &lp.split))?;
            let disc = l.engine(pairing_discriminant(o, &lp.split, lp.pairing.as_ref()))?;
            let fitt0 = sc.cong.fitting(0);
            let result = json!({
                "congruence_module": sc.cong,
                "quotients": sc.quotients,
                "discriminant": disc,
                "fitt_0": fitt0,
                "fitt_0_equals_discriminant": fitt0 == disc,
            });
            Ok(Outcome {
                fails: fitt0 != disc,
                record: record("lattice", Some(&l), result),
            })
        }
        Command::Serre { file, products } => {
            let l = load(cli, file)?;
            let an = l.analyzer(cli)?;
            let rep = l.engine(serre_check(&an, *products))?;
            Ok(Outcome {
                fails: rep.verdict == Verdict::Fails,
                record: record("serre", Some(&l), to_value(&rep)),
            })
        }
        Command::ProbeFittingQuestion { count, p, codim0 } => {
            let o = Dvr::p_adic(*p).map_err(|e| Failure::Engine(None, e))?;
            let grammar = if *codim0 {
                Grammar::codim0()
            } else {
                Grammar::default()
            };
            let summary = probe_fitting_question(&o, &grammar, *count, cli.seed)
                .map_err(|e| Failure::Engine(None, e))?;
            let mut r = record("probe-fitting-question", None, to_value(&summary));
            r["base_ring"] = json!(dvr_name(&o));
            Ok(Outcome {
                record: r,
                fails: false,
            })
        }
        Command::Invariance {
            file,
            target,
            map,
            module,
        } => {
            let l = load(cli, file)?;
            let tl = load(cli, target)?;
            let an = l.analyzer(cli)?;
            let bn = tl.analyzer(cli)?;
            let ring_map =
                l.engine(parse_map(an.algebra().ring(), bn.algebra().ring(), map))?;
            let n = tl.engine(tl.problem.module(module))?;
            let rep = l.engine(invariance_check(&an, &bn, &ring_map, &n))?;
            Ok(Outcome {
                fails: rep.verdict == Verdict::Fails,
                record: record("invariance", Some(&l), to_value(&rep)),
            })
        }
    }
}
