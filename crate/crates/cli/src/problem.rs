//! Problem files: parsing, validation and assembly of the solution to check.

use std::path::Path;

use backlund::chart::{Interval, MoebiusMap, PowerTerm, SolutionEvaluator, StructureF};
use backlund::emden::{
    ef1_backlund, ef1_ladder, ef1_seed, ef2_backlund, ef2_f, ef2_seed, ef2_transformed, EmdenParams, LadderState,
};
use backlund::ermakov::{ep_backlund, ep_general, ep_seed, ErmakovParams};
use backlund::jetcalc::{parse_expr, Expr};
use backlund::verify::{Equation, StructureEquation};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::fail::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    ErmakovPinney,
    #[serde(rename = "emden-fowler-1")]
    EmdenFowler1,
    #[serde(rename = "emden-fowler-2")]
    EmdenFowler2,
    Custom,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub family: Family,
    pub params: Value,
    #[serde(default)]
    pub moebius: Option<[f64; 4]>,
    #[serde(default, rename = "Delta")]
    pub delta: Option<f64>,
    #[serde(default, rename = "K")]
    pub k: Option<f64>,
    #[serde(default)]
    pub steps: Option<Vec<[f64; 2]>>,
    pub domain: [f64; 2],
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub solution: Option<Value>,
}

fn default_grid() -> usize {
    200
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ErmakovSpec {
    alpha: f64,
    k: u32,
    p: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Emden1Spec {
    alpha: f64,
    beta: f64,
    m: i32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Emden2Spec {
    alpha: f64,
    beta: f64,
    m: i32,
    eta: f64,
    gamma: f64,
    delta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermSpec {
    n: i32,
    a: f64,
    g: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CustomSpec {
    terms: Vec<TermSpec>,
    #[serde(default)]
    w: Option<String>,
    f: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Kind {
    Seed,
    General,
    Backlund,
    Ladder,
    Transformed,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExprChoice {
    expr: String,
}

enum Choice {
    Kind(Kind),
    Expr(Expr),
}

/// Command-line replacements for parts of a problem file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub solution_expr: Option<String>,
    pub steps: Option<Vec<(f64, f64)>>,
    pub grid: Option<usize>,
    pub force_ladder: bool,
}

/// A validated problem, ready for the pipelines.
pub struct Problem {
    pub name: String,
    pub family: Family,
    pub domain: Interval,
    pub grid: usize,
    pub solution: SolutionEvaluator,
    pub equation: Box<dyn Equation>,
    pub structure: StructureF,
    /// The transformation map `f`, when the problem defines one.
    pub map: Option<Expr>,
    pub ladder: Option<LadderState>,
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<Problem, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input("", format!("cannot read {}: {e}", path.display())))?;
    let spec = parse(&text)?;
    let fallback = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    assemble(spec, &fallback, overrides)
}

pub fn parse(text: &str) -> Result<ProblemSpec, Failure> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Failure::input(if path == "." { "" } else { &path }, e.into_inner().to_string())
    })
}

fn sub<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T, Failure> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let full = if path == "." {
            prefix.to_string()
        } else {
            format!("{prefix}.{path}")
        };
        Failure::input(&full, e.into_inner().to_string())
    })
}

fn parse_at(src: &str, path: &str) -> Result<Expr, Failure> {
    parse_expr(src).map_err(|e| Failure::input(path, e.to_string()))
}

fn choice(spec: &ProblemSpec, overrides: &Overrides) -> Result<Option<Choice>, Failure> {
    if let Some(src) = &overrides.solution_expr {
        return Ok(Some(Choice::Expr(parse_at(src, "--solution-expr")?)));
    }
    if overrides.force_ladder {
        return Ok(Some(Choice::Kind(Kind::Ladder)));
    }
    match &spec.solution {
        None => Ok(None),
        Some(Value::Object(_)) => {
            let e: ExprChoice = sub(spec.solution.clone().unwrap(), "solution")?;
            Ok(Some(Choice::Expr(parse_at(&e.expr, "solution.expr")?)))
        }
        Some(v) => Ok(Some(Choice::Kind(sub(v.clone(), "solution")?))),
    }
}

/// `Delta` and `K` together, or neither.
fn map_pair(spec: &ProblemSpec) -> Result<Option<(f64, f64)>, Failure> {
    match (spec.delta, spec.k) {
        (Some(d), Some(k)) => Ok(Some((d, k))),
        (None, None) => Ok(None),
        (None, Some(_)) => Err(Failure::input("Delta", "missing; K is given")),
        (Some(_), None) => Err(Failure::input("K", "missing; Delta is given")),
    }
}

/// Fails unless `sol` covers all of `requested`.
fn whole(sol: SolutionEvaluator, requested: Interval) -> Result<SolutionEvaluator, Failure> {
    let got = sol.domain();
    if got.lo == requested.lo && got.hi == requested.hi {
        Ok(sol)
    } else {
        Err(Failure::input(
            "domain",
            format!(
                "the solution is only admissible on [{}, {}], not on [{}, {}]",
                got.lo, got.hi, requested.lo, requested.hi
            ),
        ))
    }
}

fn restrict(sol: SolutionEvaluator, domain: Interval) -> Result<SolutionEvaluator, Failure> {
    sol.restricted(domain)
        .map_err(|e| Failure::input("domain", e.to_string()))
}

fn unsupported(kind: Kind, family: &str) -> Failure {
    Failure::input(
        "solution",
        format!("{kind:?} is not available for {family}").to_lowercase(),
    )
}

pub fn assemble(spec: ProblemSpec, fallback_name: &str, overrides: &Overrides) -> Result<Problem, Failure> {
    let [lo, hi] = spec.domain;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Failure::input("domain", "endpoints must be finite"));
    }
    let domain = Interval::new(lo, hi).map_err(|e| Failure::input("domain", e.to_string()))?;
    let grid = overrides.grid.unwrap_or(spec.grid);
    if grid < 2 {
        return Err(Failure::input("grid", format!("{grid} points, need at least 2")));
    }
    let name = spec.name.clone().unwrap_or_else(|| fallback_name.to_string());
    let choice = choice(&spec, overrides)?;
    let solution_err = |e: backlund::Error| Failure::input("solution", e.to_string());

    let mut ladder = None;
    let (solution, equation, structure, map): (_, Box<dyn Equation>, _, _) = match spec.family {
        Family::ErmakovPinney => {
            let p: ErmakovSpec = sub(spec.params.clone(), "params")?;
            let moebius = match spec.moebius {
                Some(m) => MoebiusMap::from_array(m).map_err(|e| Failure::input("moebius", e.to_string()))?,
                None => MoebiusMap::identity(),
            };
            let params =
                ErmakovParams::new(p.alpha, p.k, p.p, moebius).map_err(|e| Failure::input("params", e.to_string()))?;
            let sol = match choice.unwrap_or(Choice::Kind(Kind::General)) {
                Choice::Expr(e) => SolutionEvaluator::closed(e, domain),
                Choice::Kind(Kind::Seed) => restrict(ep_seed(&params), domain)?,
                Choice::Kind(Kind::General) => whole(ep_general(&params, domain).map_err(solution_err)?, domain)?,
                Choice::Kind(Kind::Backlund) => whole(
                    ep_backlund(&ep_seed(&params), &params, domain).map_err(solution_err)?,
                    domain,
                )?,
                Choice::Kind(k) => return Err(unsupported(k, "ermakov-pinney")),
            };
            (
                sol,
                Box::new(params.equation()),
                params.structure(),
                Some(params.f_expr()),
            )
        }
        Family::EmdenFowler1 => {
            let p: Emden1Spec = sub(spec.params.clone(), "params")?;
            let params =
                EmdenParams::example1(p.alpha, p.beta, p.m).map_err(|e| Failure::input("params", e.to_string()))?;
            let pair = map_pair(&spec)?;
            let steps: Option<Vec<(f64, f64)>> = overrides
                .steps
                .clone()
                .or_else(|| spec.steps.as_ref().map(|s| s.iter().map(|&[d, k]| (d, k)).collect()));
            let seed = || ef1_seed(&params).map_err(|e| Failure::input("params", e.to_string()));
            let default = if steps.is_some() {
                Kind::Ladder
            } else if pair.is_some() {
                Kind::Backlund
            } else {
                Kind::Seed
            };
            let sol = match choice.unwrap_or(Choice::Kind(default)) {
                Choice::Expr(e) => SolutionEvaluator::closed(e, domain),
                Choice::Kind(Kind::Seed) => restrict(seed()?, domain)?,
                Choice::Kind(Kind::Backlund) => {
                    let (d, k) = pair
                        .ok_or_else(|| Failure::input("Delta", "missing; the backlund solution needs Delta and K"))?;
                    whole(ef1_backlund(&seed()?, d, k, domain).map_err(solution_err)?, domain)?
                }
                Choice::Kind(Kind::Ladder) => {
                    let steps = steps
                        .clone()
                        .ok_or_else(|| Failure::input("steps", "missing; the ladder needs a step list"))?;
                    let (state, sol) =
                        ef1_ladder(&params, &steps, domain).map_err(|e| Failure::input("steps", e.to_string()))?;
                    ladder = Some(state);
                    whole(sol, domain)?
                }
                Choice::Kind(k) => return Err(unsupported(k, "emden-fowler-1")),
            };
            let map = match (&ladder, pair) {
                (Some(st), _) => Some(MoebiusMap::new(st.r, 0.0, st.s, st.r).map_err(solution_err)?.to_expr()),
                (None, Some((d, k))) => Some(
                    MoebiusMap::new(d, 0.0, k, d)
                        .map_err(|e| Failure::input("Delta", e.to_string()))?
                        .to_expr(),
                ),
                (None, None) => None,
            };
            (sol, Box::new(params.equation()), params.structure(), map)
        }
        Family::EmdenFowler2 => {
            let p: Emden2Spec = sub(spec.params.clone(), "params")?;
            let params = EmdenParams::new(p.alpha, p.beta, p.m, p.eta, p.gamma, p.delta)
                .map_err(|e| Failure::input("params", e.to_string()))?;
            let pair = map_pair(&spec)?;
            let need = |what: Kind| {
                pair.ok_or_else(|| {
                    Failure::input(
                        "Delta",
                        format!("missing; the {what:?} solution needs Delta and K").to_lowercase(),
                    )
                })
            };
            let seed = || ef2_seed(&params).map_err(|e| Failure::input("params", e.to_string()));
            let default = if pair.is_some() { Kind::Transformed } else { Kind::Seed };
            let sol = match choice.unwrap_or(Choice::Kind(default)) {
                Choice::Expr(e) => SolutionEvaluator::closed(e, domain),
                Choice::Kind(Kind::Seed) => restrict(seed()?, domain)?,
                Choice::Kind(Kind::Backlund) => {
                    let (d, k) = need(Kind::Backlund)?;
                    whole(
                        ef2_backlund(&seed()?, &params, d, k, domain).map_err(solution_err)?,
                        domain,
                    )?
                }
                Choice::Kind(Kind::Transformed) => {
                    let (d, k) = need(Kind::Transformed)?;
                    whole(ef2_transformed(&params, d, k, domain).map_err(solution_err)?, domain)?
                }
                Choice::Kind(k) => return Err(unsupported(k, "emden-fowler-2")),
            };
            let map = match pair {
                Some((d, k)) => Some(ef2_f(&params, d, k).map_err(|e| Failure::input("Delta", e.to_string()))?),
                None => None,
            };
            (sol, Box::new(params.equation()), params.structure(), map)
        }
        Family::Custom => {
            let p: CustomSpec = sub(spec.params.clone(), "params")?;
            let mut terms = Vec::with_capacity(p.terms.len());
            for (i, t) in p.terms.iter().enumerate() {
                terms.push(PowerTerm::new(
                    t.n,
                    t.a,
                    parse_at(&t.g, &format!("params.terms[{i}].g"))?,
                ));
            }
            let w = p.w.as_deref().map(|s| parse_at(s, "params.w")).transpose()?;
            let f = parse_at(&p.f, "params.f")?;
            let structure = StructureF::new(terms, w).map_err(|e| Failure::input("params.terms", e.to_string()))?;
            let sol = match choice {
                Some(Choice::Expr(e)) => SolutionEvaluator::closed(e, domain),
                _ => return Err(Failure::input("solution", "custom problems take {\"expr\": ...}")),
            };
            let eq = StructureEquation::new(structure.clone(), "custom");
            (sol, Box::new(eq), structure, Some(f))
        }
    };

    Ok(Problem {
        name,
        family: spec.family,
        domain,
        grid,
        solution,
        equation,
        structure,
        map,
        ladder,
    })
}
