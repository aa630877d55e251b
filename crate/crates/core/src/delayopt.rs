//! Delay insertion for minimum total earliness.
//!
//! Under durations `f + D` every job time is a max of affine functions of the
//! controllable delays. An [`ArgmaxPattern`] fixes which affine term is the
//! maximum for each (string, job); inside the induced polyhedral region the
//! problem is a linear program. The exact solver enumerates patterns, the
//! heuristic solver re-linearizes around its current point.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::automaton::{Automaton, FiniteLanguage, Word};
use crate::error::{Error, Result};
use crate::jobs::{earliness_string, job_times, JobSet};
use crate::lp::{solve_lp, LpProblem, LpStatus};
use crate::minlang::minimal_sublanguages;
use crate::rational::{format_rational, is_nonnegative, Rational};
use crate::synthesis::{sup_c, SynthesisResult};
use crate::timed::{DurationValuation, ResourceModel, TimedPlant, TransitionId};

pub const DEFAULT_MAX_PATTERNS: usize = 100_000;
const SLP_MAX_ITERATIONS: usize = 50;
const SLP_MAX_ACTIVE: usize = 256;

/// Per-transition extra duration; zero on uncontrollable transitions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DelayVector {
    values: Vec<Rational>,
}

impl DelayVector {
    pub fn zeros(plant: &TimedPlant) -> Self {
        DelayVector {
            values: vec![Rational::from_integer(0); plant.transitions().len()],
        }
    }

    pub fn new(plant: &TimedPlant, values: Vec<Rational>) -> Result<Self> {
        if values.len() != plant.transitions().len() {
            return Err(Error::Model(format!(
                "delay vector has {} entries, plant has {} transitions",
                values.len(),
                plant.transitions().len()
            )));
        }
        for (t, v) in values.iter().enumerate() {
            if !is_nonnegative(v) {
                return Err(Error::Model(format!(
                    "negative delay {} on {}",
                    format_rational(v),
                    plant.transition_label(t)
                )));
            }
            let e = plant.transition(t).event;
            if !plant.events().is_controllable(e) && *v != Rational::from_integer(0) {
                return Err(Error::Model(format!(
                    "uncontrollable transition {} cannot be delayed",
                    plant.transition_label(t)
                )));
            }
        }
        Ok(DelayVector { values })
    }

    /// Expands event-level delays to every transition of the event.
    pub fn from_event_delays(plant: &TimedPlant, delays: &[(usize, Rational)]) -> Result<Self> {
        let mut values = vec![Rational::from_integer(0); plant.transitions().len()];
        for &(e, d) in delays {
            for (t, tr) in plant.transitions().iter().enumerate() {
                if tr.event == e {
                    values[t] = d;
                }
            }
        }
        Self::new(plant, values)
    }

    pub fn get(&self, t: TransitionId) -> Rational {
        self.values.get(t).copied().unwrap_or_else(|| Rational::from_integer(0))
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn total(&self) -> Rational {
        self.values.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Rational::from_integer(0))
    }

    /// Nonzero entries as (transition, delay).
    pub fn support(&self) -> Vec<(TransitionId, Rational)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != Rational::from_integer(0))
            .map(|(t, v)| (t, *v))
            .collect()
    }
}

/// `cᵀD + c₀` over a fixed list of delay variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineExpr {
    pub coeffs: Vec<i64>,
    pub constant: Rational,
}

impl AffineExpr {
    pub fn constant(n: usize, c: Rational) -> Self {
        AffineExpr {
            coeffs: vec![0; n],
            constant: c,
        }
    }

    pub fn eval(&self, d: &[Rational]) -> Rational {
        self.constant
            + self
                .coeffs
                .iter()
                .zip(d)
                .filter(|(c, _)| **c != 0)
                .map(|(c, v)| Rational::from_integer(*c as i128) * v)
                .sum::<Rational>()
    }

    /// True when `self ≤ other` for every `D ≥ 0`.
    fn dominated_by(&self, other: &AffineExpr) -> bool {
        self.constant <= other.constant && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b)
    }

    fn shifted(&self, dur: Rational, var: Option<usize>) -> AffineExpr {
        let mut e = self.clone();
        e.constant += dur;
        if let Some(k) = var {
            e.coeffs[k] += 1;
        }
        e
    }
}

/// Max of affine terms; kept free of dominated terms and sorted.
fn prune(mut terms: Vec<AffineExpr>) -> Vec<AffineExpr> {
    terms.sort();
    terms.dedup();
    let keep: Vec<bool> = (0..terms.len())
        .map(|i| !(0..terms.len()).any(|j| j != i && terms[i].dominated_by(&terms[j])))
        .collect();
    terms.into_iter().zip(keep).filter(|(_, k)| *k).map(|(t, _)| t).collect()
}

/// The controllable transitions used by the strings of a language, in
/// transition order; these are the decision variables.
pub fn delay_variables(plant: &TimedPlant, l: &FiniteLanguage) -> Result<Vec<TransitionId>> {
    let mut vars = BTreeSet::new();
    for w in l.iter() {
        for t in plant.trajectory(w)? {
            if plant.events().is_controllable(plant.transition(t).event) {
                vars.insert(t);
            }
        }
    }
    Ok(vars.into_iter().collect())
}

/// Job times of `s` under `f + D` as maxima of affine terms in the variables
/// `vars`. Runs the contour recurrence with symbolic heights.
pub fn symbolic_job_times(
    plant: &TimedPlant,
    rm: &ResourceModel,
    jobs: &JobSet,
    vars: &[TransitionId],
    s: &[usize],
) -> Result<Vec<Vec<AffineExpr>>> {
    let n = vars.len();
    let zero = AffineExpr::constant(n, Rational::from_integer(0));
    let mut heights = vec![vec![zero.clone()]; rm.len()];
    let mut times = vec![vec![zero]; jobs.len()];
    for (&e, t) in s.iter().zip(plant.trajectory(s)?) {
        let occupied = rm.occupancy(e);
        let level = prune(occupied.iter().flat_map(|&r| heights[r].iter().cloned()).collect());
        let var = vars.binary_search(&t).ok();
        if var.is_none() && plant.events().is_controllable(e) {
            return Err(Error::Contract(format!(
                "transition {} has no delay variable",
                plant.transition_label(t)
            )));
        }
        let top: Vec<AffineExpr> = level.iter().map(|a| a.shifted(plant.duration(t), var)).collect();
        for (r, h) in heights.iter_mut().enumerate() {
            *h = if occupied.contains(&r) {
                top.clone()
            } else {
                prune(h.iter().cloned().chain(level.iter().cloned()).collect())
            };
        }
        let upsilon = prune(heights.iter().flatten().cloned().collect());
        for (i, job) in jobs.jobs().iter().enumerate() {
            if job.contains_event(e) {
                times[i] = upsilon.clone();
            }
        }
    }
    Ok(times)
}

/// One chosen term index per (string, job).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArgmaxPattern {
    pub choice: Vec<Vec<usize>>,
}

/// `coeffs · D ≤ rhs` over the variables of a [`LanguageOptimum`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearIneq {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl LinearIneq {
    pub fn holds(&self, d: &[Rational]) -> bool {
        self.coeffs.iter().zip(d).map(|(a, b)| a * b).sum::<Rational>() <= self.rhs
    }

    pub fn render(&self, names: &[String]) -> String {
        let mut lhs = String::new();
        for (c, name) in self.coeffs.iter().zip(names) {
            if *c == Rational::from_integer(0) {
                continue;
            }
            let neg = *c < Rational::from_integer(0);
            let mag = if neg { -c } else { *c };
            let sign = match (lhs.is_empty(), neg) {
                (true, false) => "",
                (true, true) => "-",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            lhs.push_str(sign);
            if mag != Rational::from_integer(1) {
                lhs.push_str(&format_rational(&mag));
                lhs.push('*');
            }
            lhs.push_str(&format!("D({name})"));
        }
        if lhs.is_empty() {
            lhs.push('0');
        }
        format!("{lhs} <= {}", format_rational(&self.rhs))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    Exact,
    Slp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelayOptions {
    pub mode: SolveMode,
    pub max_patterns: usize,
}

impl Default for DelayOptions {
    fn default() -> Self {
        DelayOptions {
            mode: SolveMode::Exact,
            max_patterns: DEFAULT_MAX_PATTERNS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalRegion {
    pub pattern: ArgmaxPattern,
    /// The optimal part of the pattern's region: region, deadline and
    /// `e ≤ e*` constraints, all over the language's variables.
    pub ineqs: Vec<LinearIneq>,
    pub witness: DelayVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageOptimum {
    pub language: FiniteLanguage,
    pub variables: Vec<TransitionId>,
    pub e_star: Rational,
    pub regions: Vec<OptimalRegion>,
    /// False when the pattern cap forced the heuristic solver.
    pub exact: bool,
}

/// Symbolic data of a language: per string, per job, the affine terms.
struct Problem<'a> {
    jobs: &'a JobSet,
    nv: usize,
    polys: Vec<Vec<Vec<AffineExpr>>>,
}

impl Problem<'_> {
    fn pattern_count(&self) -> Option<usize> {
        self.polys
            .iter()
            .flatten()
            .try_fold(1usize, |acc, p| acc.checked_mul(p.len()))
    }

    /// Patterns whose chosen terms all attain the maximum at `d`, at most `cap`.
    fn active_patterns(&self, d: &[Rational], cap: usize) -> Vec<ArgmaxPattern> {
        let ties: Vec<Vec<Vec<usize>>> = self
            .polys
            .iter()
            .map(|per_job| {
                per_job
                    .iter()
                    .map(|terms| {
                        let vals: Vec<Rational> = terms.iter().map(|t| t.eval(d)).collect();
                        let best = *vals.iter().max().expect("nonempty");
                        (0..vals.len()).filter(|&j| vals[j] == best).collect()
                    })
                    .collect()
            })
            .collect();
        let mut out = vec![ArgmaxPattern { choice: Vec::new() }];
        for per_job in &ties {
            let mut next = Vec::new();
            for pat in &out {
                let mut partial = vec![Vec::new()];
                for options in per_job {
                    partial = partial
                        .into_iter()
                        .flat_map(|row: Vec<usize>| {
                            options.iter().map(move |&o| {
                                let mut r = row.clone();
                                r.push(o);
                                r
                            })
                        })
                        .collect();
                }
                for row in partial {
                    let mut c = pat.choice.clone();
                    c.push(row);
                    next.push(ArgmaxPattern { choice: c });
                    if next.len() >= cap {
                        break;
                    }
                }
                if next.len() >= cap {
                    break;
                }
            }
            out = next;
        }
        out
    }

    /// Constraints of the pattern's LP over `(D, z)`, excluding the objective.
    fn constraints(&self, pat: &ArgmaxPattern) -> Vec<LinearIneq> {
        let nv = self.nv;
        let zero = Rational::from_integer(0);
        let mut out = Vec::new();
        let row = |c: &AffineExpr| -> Vec<Rational> { c.coeffs.iter().map(|&v| Rational::from_integer(v as i128)).collect() };
        for (s, per_job) in self.polys.iter().enumerate() {
            for (i, terms) in per_job.iter().enumerate() {
                let d_i = self.jobs.job(i).deadline();
                let chosen = &terms[pat.choice[s][i]];
                for (j, term) in terms.iter().enumerate() {
                    // every term stays within the deadline
                    let mut coeffs = row(term);
                    coeffs.push(zero);
                    out.push(LinearIneq {
                        coeffs,
                        rhs: d_i - term.constant,
                    });
                    if j != pat.choice[s][i] {
                        // chosen term dominates: term - chosen ≤ 0
                        let mut coeffs: Vec<Rational> = term
                            .coeffs
                            .iter()
                            .zip(&chosen.coeffs)
                            .map(|(a, b)| Rational::from_integer((*a - *b) as i128))
                            .collect();
                        coeffs.push(zero);
                        out.push(LinearIneq {
                            coeffs,
                            rhs: chosen.constant - term.constant,
                        });
                    }
                }
            }
            // Σ_i (d_i − chosen_i) ≤ z
            let mut coeffs = vec![zero; nv + 1];
            let mut rhs = zero;
            for (i, terms) in per_job.iter().enumerate() {
                let chosen = &terms[pat.choice[s][i]];
                for (k, c) in chosen.coeffs.iter().enumerate() {
                    coeffs[k] -= Rational::from_integer(*c as i128);
                }
                rhs += chosen.constant - self.jobs.job(i).deadline();
            }
            coeffs[nv] = Rational::from_integer(-1);
            out.push(LinearIneq { coeffs, rhs });
        }
        out
    }

    /// Solves the pattern's LP. Returns `(e, witness, optimal-region ineqs)`.
    fn solve(&self, pat: &ArgmaxPattern) -> Result<Option<(Rational, Vec<Rational>, Vec<LinearIneq>)>> {
        let nv = self.nv;
        let cons = self.constraints(pat);
        let mut lp = LpProblem::new(nv + 1);
        lp.objective[nv] = Rational::from_integer(1);
        for c in &cons {
            lp.add_le(c.coeffs.clone(), c.rhs);
        }
        let first = solve_lp(&lp)?;
        if first.status != LpStatus::Optimal {
            return Ok(None);
        }
        let e = first.x[nv];
        // among optimal points, least total delay
        let mut cap = vec![Rational::from_integer(0); nv + 1];
        cap[nv] = Rational::from_integer(1);
        lp.add_le(cap, e);
        lp.objective = vec![Rational::from_integer(1); nv + 1];
        lp.objective[nv] = Rational::from_integer(0);
        let second = solve_lp(&lp)?;
        if second.status != LpStatus::Optimal {
            return Err(Error::Contract("lexicographic LP lost feasibility".into()));
        }
        let d = second.x[..nv].to_vec();
        // project z out: every z-row is `a·D − z ≤ b`, i.e. `a·D ≤ b + e` at z = e
        let ineqs = cons
            .into_iter()
            .map(|c| {
                let z = c.coeffs[nv];
                LinearIneq {
                    coeffs: c.coeffs[..nv].to_vec(),
                    rhs: c.rhs - z * e,
                }
            })
            .filter(|c| c.coeffs.iter().any(|v| *v != Rational::from_integer(0)) || c.rhs < Rational::from_integer(0))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Ok(Some((e, d, ineqs)))
    }
}

fn all_patterns(p: &Problem<'_>) -> Vec<ArgmaxPattern> {
    let sizes: Vec<Vec<usize>> = p.polys.iter().map(|pj| pj.iter().map(|t| t.len()).collect()).collect();
    let flat: Vec<usize> = sizes.iter().flatten().copied().collect();
    let mut idx = vec![0usize; flat.len()];
    let mut out = Vec::new();
    loop {
        let mut it = idx.iter();
        let choice = sizes
            .iter()
            .map(|pj| pj.iter().map(|_| *it.next().expect("sized")).collect())
            .collect();
        out.push(ArgmaxPattern { choice });
        let mut k = 0;
        loop {
            if k == flat.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < flat[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `e*(L)` and the optimal delay regions for a finite language `L`.
pub fn optimize_delays_for(
    plant: &TimedPlant,
    rm: &ResourceModel,
    jobs: &JobSet,
    l: &FiniteLanguage,
    opts: DelayOptions,
) -> Result<LanguageOptimum> {
    if l.is_empty() {
        return Err(Error::Contract("cannot optimise delays for an empty language".into()));
    }
    let base = DurationValuation::base(plant);
    for w in l.iter() {
        let times = job_times(plant, rm, jobs, w, base)?;
        if earliness_string(jobs, &times).is_err() || !jobs.jobs().iter().all(|j| j.completed_by(w)) {
            return Err(Error::Contract(format!(
                "string `{}` does not satisfy the jobs at zero delay",
                plant.events().format_word(w)
            )));
        }
    }
    let vars = delay_variables(plant, l)?;
    let polys = l
        .iter()
        .map(|w| symbolic_job_times(plant, rm, jobs, &vars, w))
        .collect::<Result<Vec<_>>>()?;
    let problem = Problem {
        jobs,
        nv: vars.len(),
        polys,
    };
    let count = problem.pattern_count();
    let exact = opts.mode == SolveMode::Exact && count.is_some_and(|c| c <= opts.max_patterns);
    let candidates: Vec<(ArgmaxPattern, Rational, Vec<Rational>, Vec<LinearIneq>)> = if exact {
        let solved = all_patterns(&problem)
            .into_par_iter()
            .map(|pat| Ok(problem.solve(&pat)?.map(|(e, d, q)| (pat, e, d, q))))
            .collect::<Result<Vec<_>>>()?;
        solved.into_iter().flatten().collect()
    } else {
        slp(&problem)?
    };
    let e_star = candidates
        .iter()
        .map(|c| c.1)
        .min()
        .ok_or_else(|| Error::Contract("no feasible delay found".into()))?;
    let mut regions = Vec::new();
    let mut seen = BTreeSet::new();
    for (pattern, e, d, ineqs) in candidates {
        if e != e_star || !seen.insert((ineqs.clone(), d.clone())) {
            continue;
        }
        let mut values = vec![Rational::from_integer(0); plant.transitions().len()];
        for (k, &t) in vars.iter().enumerate() {
            values[t] = d[k];
        }
        regions.push(OptimalRegion {
            pattern,
            ineqs,
            witness: DelayVector::new(plant, values)?,
        });
    }
    Ok(LanguageOptimum {
        language: l.clone(),
        variables: vars,
        e_star,
        regions,
        exact,
    })
}

type Candidate = (ArgmaxPattern, Rational, Vec<Rational>, Vec<LinearIneq>);

/// Sequential linearization from `D = 0` and from a unit spike on each
/// variable. At the current point every pattern active there (all choices
/// among tied maxima) is solved; the search moves to the best witness and
/// stops when no active pattern improves the objective.
fn slp(p: &Problem<'_>) -> Result<Vec<Candidate>> {
    let zero = Rational::from_integer(0);
    let mut starts = vec![vec![zero; p.nv]];
    for k in 0..p.nv {
        let mut d = vec![zero; p.nv];
        d[k] = Rational::from_integer(1);
        starts.push(d);
    }
    let runs = starts
        .into_par_iter()
        .map(|start| {
            let mut d = start;
            let mut best: Option<Candidate> = None;
            for _ in 0..SLP_MAX_ITERATIONS {
                let mut step: Option<Candidate> = None;
                for pat in p.active_patterns(&d, SLP_MAX_ACTIVE) {
                    if let Some((e, x, q)) = p.solve(&pat)? {
                        if step.as_ref().is_none_or(|s| e < s.1) {
                            step = Some((pat, e, x, q));
                        }
                    }
                }
                let Some(step) = step else { break };
                if best.as_ref().is_some_and(|b| step.1 >= b.1) {
                    break;
                }
                d = step.2.clone();
                best = Some(step);
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(runs.into_iter().flatten().collect())
}

/// `supCF` under the given durations: the union of the members of
/// `CL(supC)` that attain the least language earliness. `None` when `supC`
/// is empty.
pub fn sup_cf(
    plant: &TimedPlant,
    rm: &ResourceModel,
    jobs: &JobSet,
    val: DurationValuation<'_>,
) -> Result<Option<(FiniteLanguage, Rational)>> {
    let k = sup_c(plant, rm, jobs, val)?;
    if k.is_empty() {
        return Ok(None);
    }
    let members = minimal_sublanguages(k.automaton(), plant.automaton())?;
    let mut best: Option<(FiniteLanguage, Rational)> = None;
    for m in members.iter() {
        let e = language_earliness(plant, rm, jobs, m, val)?;
        best = match best {
            None => Some((m.clone(), e)),
            Some((_, b)) if e < b => Some((m.clone(), e)),
            Some((l, b)) if e == b => Some((l.union(m), b)),
            keep => keep,
        };
    }
    Ok(best)
}

/// `e(L)`: the largest string earliness over `L`, zero for the empty language.
pub fn language_earliness(
    plant: &TimedPlant,
    rm: &ResourceModel,
    jobs: &JobSet,
    l: &FiniteLanguage,
    val: DurationValuation<'_>,
) -> Result<Rational> {
    let mut worst = Rational::from_integer(0);
    for w in l.iter() {
        let e = earliness_string(jobs, &job_times(plant, rm, jobs, w, val)?)?;
        worst = worst.max(e);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupCfAtOptimum {
    pub delays: DelayVector,
    pub language: FiniteLanguage,
    pub earliness: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalDelayReport {
    pub per_language: Vec<LanguageOptimum>,
    pub optimal_earliness: Rational,
    /// Indices into `per_language` attaining the optimum.
    pub optimal_languages: Vec<usize>,
    /// Distinct optimal witnesses, each with the resulting `supCF`.
    pub optimal_delays: Vec<SupCfAtOptimum>,
}

/// Minimal controllable sublanguages of `k`, each optimized independently.
pub fn optimal_delays(
    plant: &TimedPlant,
    rm: &ResourceModel,
    jobs: &JobSet,
    k: &SynthesisResult,
    opts: DelayOptions,
) -> Result<OptimalDelayReport> {
    if k.is_empty() {
        return Err(Error::Contract("delay optimisation needs a nonempty supervisor".into()));
    }
    let members = minimal_sublanguages(k.automaton(), plant.automaton())?;
    let members: Vec<&FiniteLanguage> = members.iter().collect();
    let per_language = members
        .par_iter()
        .map(|l| optimize_delays_for(plant, rm, jobs, l, opts))
        .collect::<Result<Vec<_>>>()?;
    let optimal_earliness = per_language.iter().map(|o| o.e_star).min().expect("nonempty family");
    let optimal_languages: Vec<usize> = (0..per_language.len())
        .filter(|&i| per_language[i].e_star == optimal_earliness)
        .collect();
    let witnesses: BTreeSet<DelayVector> = optimal_languages
        .iter()
        .flat_map(|&i| per_language[i].regions.iter().map(|r| r.witness.clone()))
        .collect();
    let optimal_delays = witnesses
        .into_par_iter()
        .map(|d| {
            let val = DurationValuation::with_delays(plant, &d);
            let (language, earliness) = sup_cf(plant, rm, jobs, val)?
                .ok_or_else(|| Error::Contract("optimal delay empties the supervisor".into()))?;
            Ok(SupCfAtOptimum {
                delays: d,
                language,
                earliness,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OptimalDelayReport {
        per_language,
        optimal_earliness,
        optimal_languages,
        optimal_delays,
    })
}

/// Strings of an acyclic supervisor as a language.
pub fn language_of(a: &Automaton) -> Result<FiniteLanguage> {
    if !a.is_acyclic() {
        return Err(Error::Contract("supervisor language is infinite".into()));
    }
    Ok(crate::automaton::enumerate_language(a, a.num_states()))
}

/// Numeric job times at `D`, for checking symbolic results.
pub fn numeric_times(
    plant: &TimedPlant,
    rm: &ResourceModel,
    jobs: &JobSet,
    w: &Word,
    d: &DelayVector,
) -> Result<Vec<Rational>> {
    job_times(plant, rm, jobs, w, DurationValuation::with_delays(plant, d))
}
