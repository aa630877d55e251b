//! JSON documents for plants, job sets, problems and reports.
//!
//! Rationals are written as `"p"` or `"p/q"` strings; integers, exact
//! decimals and fractions are all accepted on input.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::automaton::{Automaton, Event, EventId, EventTable};
use crate::delayopt::{DelayOptions, OptimalDelayReport, SolveMode};
use crate::error::{Error, Result};
use crate::jobs::{job_times, JobSet, JobSpec};
use crate::minlang::LanguageFamily;
use crate::rational::{format_rational, serde_str, Rational};
use crate::relax::RelaxationReport;
use crate::synthesis::SynthesisResult;
use crate::timed::{heap_contour, DurationValuation, ResourceModel, TimedPlant, Transition};

/// A rational that serializes as `"p/q"` text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Q(#[serde(with = "serde_str")] pub Rational);

impl From<Rational> for Q {
    fn from(r: Rational) -> Self {
        Q(r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controllable: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: String,
    pub event: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonDoc {
    pub events: Vec<EventDoc>,
    pub states: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
    #[serde(default)]
    pub marked: Vec<String>,
    #[serde(default)]
    pub transitions: Vec<TransitionDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantDoc {
    pub events: Vec<EventDoc>,
    pub states: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
    #[serde(default)]
    pub marked: Vec<String>,
    #[serde(default)]
    pub transitions: Vec<TransitionDoc>,
    /// Pairs of mutually exclusive events; reflexive and symmetric pairs are implied.
    #[serde(default)]
    pub exclusion: Vec<(String, String)>,
    /// Event-level durations, used for transitions without their own.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub durations: BTreeMap<String, Q>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobDoc {
    pub name: String,
    pub alphabet: Vec<String>,
    pub language: AutomatonDoc,
    pub deadline: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSetDoc {
    pub jobs: Vec<JobDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logic: Option<AutomatonDoc>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_patterns: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_jobs: Option<usize>,
}

impl OptionsDoc {
    pub fn delay_options(&self) -> Result<DelayOptions> {
        let mut o = DelayOptions::default();
        if let Some(m) = &self.mode {
            o.mode = parse_mode(m)?;
        }
        if let Some(n) = self.max_patterns {
            o.max_patterns = n;
        }
        Ok(o)
    }
}

pub fn parse_mode(m: &str) -> Result<SolveMode> {
    match m {
        "exact" => Ok(SolveMode::Exact),
        "slp" => Ok(SolveMode::Slp),
        other => Err(Error::Parse(format!("unknown mode `{other}` (expected exact or slp)"))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    pub plant: PlantDoc,
    pub jobs: JobSetDoc,
    #[serde(default, skip_serializing_if = "is_default")]
    pub options: OptionsDoc,
}

fn is_default(o: &OptionsDoc) -> bool {
    *o == OptionsDoc::default()
}

/// A validated problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub plant: TimedPlant,
    pub jobs: JobSet,
    pub options: OptionsDoc,
}

fn event_table(docs: &[EventDoc], defaults: Option<&EventTable>) -> Result<EventTable> {
    let events = docs
        .iter()
        .map(|d| {
            let c = match (d.controllable, defaults.and_then(|t| t.id(&d.name).map(|id| t.is_controllable(id)))) {
                (Some(c), _) => c,
                (None, Some(c)) => c,
                (None, None) => {
                    return Err(Error::Model(format!("event `{}` needs a controllable flag", d.name)));
                }
            };
            Ok(Event::new(d.name.clone(), c))
        })
        .collect::<Result<Vec<_>>>()?;
    EventTable::new(events)
}

fn build_automaton(
    events: EventTable,
    states: &[String],
    initial: &Option<String>,
    marked: &[String],
    transitions: &[TransitionDoc],
) -> Result<Automaton> {
    let mut a = Automaton::new(events);
    let marked: BTreeSet<&str> = marked.iter().map(String::as_str).collect();
    for s in states {
        if a.state_id(s).is_some() {
            return Err(Error::Model(format!("duplicate state `{s}`")));
        }
        a.add_state(s.clone(), marked.contains(s.as_str()));
    }
    let state = |a: &Automaton, s: &str| a.state_id(s).ok_or_else(|| Error::Model(format!("unknown state `{s}`")));
    for m in &marked {
        state(&a, m)?;
    }
    if let Some(i) = initial {
        let x = state(&a, i)?;
        a.set_initial(x)?;
    }
    for t in transitions {
        let x = state(&a, &t.from)?;
        let y = state(&a, &t.to)?;
        let e = a
            .event_table()
            .id(&t.event)
            .ok_or_else(|| Error::Model(format!("unknown event `{}`", t.event)))?;
        a.add_transition(x, e, y)?;
    }
    Ok(a)
}

pub fn automaton_from_doc(doc: &AutomatonDoc, defaults: Option<&EventTable>) -> Result<Automaton> {
    if doc.transitions.iter().any(|t| t.duration.is_some()) {
        return Err(Error::Model("durations are only allowed in the plant".into()));
    }
    build_automaton(
        event_table(&doc.events, defaults)?,
        &doc.states,
        &doc.initial,
        &doc.marked,
        &doc.transitions,
    )
}

fn event_docs(t: &EventTable) -> Vec<EventDoc> {
    t.events()
        .iter()
        .map(|e| EventDoc {
            name: e.name.clone(),
            controllable: Some(e.controllable),
        })
        .collect()
}

pub fn automaton_to_doc(a: &Automaton) -> AutomatonDoc {
    AutomatonDoc {
        events: event_docs(a.event_table()),
        states: a.states().map(|x| a.state_name(x).to_string()).collect(),
        initial: a.initial().map(|x| a.state_name(x).to_string()),
        marked: a.states().filter(|&x| a.is_marked(x)).map(|x| a.state_name(x).to_string()).collect(),
        transitions: a
            .transitions()
            .map(|(x, e, y)| TransitionDoc {
                from: a.state_name(x).to_string(),
                event: a.event_table().name(e).to_string(),
                to: a.state_name(y).to_string(),
                duration: None,
            })
            .collect(),
    }
}

pub fn plant_from_doc(doc: &PlantDoc) -> Result<TimedPlant> {
    let table = event_table(&doc.events, None)?;
    for name in doc.durations.keys() {
        if table.id(name).is_none() {
            return Err(Error::Model(format!("duration given for unknown event `{name}`")));
        }
    }
    let g = build_automaton(table.clone(), &doc.states, &doc.initial, &doc.marked, &doc.transitions)?;
    let mut durations = BTreeMap::new();
    for t in &doc.transitions {
        let from = g.state_id(&t.from).expect("checked");
        let event = table.id(&t.event).expect("checked");
        let d = t
            .duration
            .or_else(|| doc.durations.get(&t.event).copied())
            .ok_or_else(|| Error::Model(format!("no duration for transition ({}, {})", t.from, t.event)))?;
        durations.insert(Transition { from, event }, d.0);
    }
    let mut pairs = Vec::new();
    for (a, b) in &doc.exclusion {
        let id = |n: &str| table.id(n).ok_or_else(|| Error::Model(format!("unknown event `{n}` in exclusion")));
        pairs.push((id(a)?, id(b)?));
    }
    let h = crate::timed::closed_exclusion(&table, &pairs);
    TimedPlant::new(g, &durations, h)
}

pub fn plant_to_doc(p: &TimedPlant) -> PlantDoc {
    let g = p.automaton();
    let t = g.event_table();
    let a = automaton_to_doc(g);
    let transitions = a
        .transitions
        .into_iter()
        .zip(p.transitions())
        .enumerate()
        .map(|(id, (mut d, _))| {
            d.duration = Some(Q(p.duration(id)));
            d
        })
        .collect();
    PlantDoc {
        events: a.events,
        states: a.states,
        initial: a.initial,
        marked: a.marked,
        transitions,
        exclusion: p
            .exclusion()
            .iter()
            .filter(|(x, y)| x < y)
            .map(|&(x, y)| (t.name(x).to_string(), t.name(y).to_string()))
            .collect(),
        durations: BTreeMap::new(),
    }
}

pub fn jobs_from_doc(doc: &JobSetDoc, plant_events: &EventTable) -> Result<JobSet> {
    let mut jobs = Vec::with_capacity(doc.jobs.len());
    for j in &doc.jobs {
        let lang = automaton_from_doc(&j.language, Some(plant_events))?;
        let mut alphabet = BTreeSet::new();
        for n in &j.alphabet {
            let id = plant_events
                .id(n)
                .ok_or_else(|| Error::Model(format!("job `{}` uses unknown event `{n}`", j.name)))?;
            alphabet.insert(id);
        }
        jobs.push(JobSpec::new(j.name.clone(), plant_events, alphabet, lang, j.deadline.0)?);
    }
    let logic = doc
        .logic
        .as_ref()
        .map(|l| automaton_from_doc(l, Some(plant_events)))
        .transpose()?;
    JobSet::new(plant_events, jobs, logic)
}

pub fn jobs_to_doc(jobs: &JobSet) -> JobSetDoc {
    let t = jobs.events();
    JobSetDoc {
        jobs: jobs
            .jobs()
            .iter()
            .map(|j| JobDoc {
                name: j.name().to_string(),
                alphabet: j.alphabet().iter().map(|&e| t.name(e).to_string()).collect(),
                language: automaton_to_doc(j.language()),
                deadline: Q(j.deadline()),
            })
            .collect(),
        logic: jobs.logic().map(automaton_to_doc),
    }
}

impl Problem {
    pub fn from_doc(doc: &ProblemDoc) -> Result<Problem> {
        let plant = plant_from_doc(&doc.plant)?;
        let jobs = jobs_from_doc(&doc.jobs, plant.events())?;
        if let Some(m) = &doc.options.mode {
            parse_mode(m)?;
        }
        Ok(Problem {
            plant,
            jobs,
            options: doc.options.clone(),
        })
    }

    pub fn to_doc(&self) -> ProblemDoc {
        ProblemDoc {
            plant: plant_to_doc(&self.plant),
            jobs: jobs_to_doc(&self.jobs),
            options: self.options.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Problem> {
        Problem::from_doc(&serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_doc())?)
    }

    pub fn load(path: &Path) -> Result<Problem> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Problem::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExecTimeReport {
    pub string: String,
    pub exec_time: Q,
    pub job_times: BTreeMap<String, Q>,
    pub heights: BTreeMap<String, Q>,
}

impl ExecTimeReport {
    /// `υ(s)`, the job times and the final resource heights of `s`.
    pub fn new(plant: &TimedPlant, rm: &ResourceModel, jobs: &JobSet, s: &[EventId]) -> Result<Self> {
        let val = DurationValuation::base(plant);
        let t = plant.events();
        let contour = heap_contour(plant, rm, s, val)?;
        let times = job_times(plant, rm, jobs, s, val)?;
        Ok(ExecTimeReport {
            string: t.format_word(s),
            exec_time: Q(contour.height()),
            job_times: jobs.jobs().iter().zip(times).map(|(j, v)| (j.name().to_string(), Q(v))).collect(),
            heights: contour
                .heights()
                .iter()
                .enumerate()
                .map(|(r, &h)| (rm.resource_label(t, r), Q(h)))
                .collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StringRow {
    pub string: String,
    pub job_times: Vec<Q>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub earliness: Option<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SynthesisReport {
    pub jobs: Vec<String>,
    pub states: usize,
    pub transitions: usize,
    pub empty: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strings: Option<Vec<StringRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub earliness: Option<Q>,
}

impl SynthesisReport {
    pub fn new(r: &SynthesisResult, jobs: &JobSet) -> Self {
        let t = r.automaton().event_table();
        let strings = r.language.as_ref().map(|_| {
            r.strings
                .iter()
                .map(|s| StringRow {
                    string: t.format_word(&s.word),
                    job_times: s.job_times.iter().map(|&v| Q(v)).collect(),
                    earliness: s.earliness.map(Q),
                })
                .collect::<Vec<_>>()
        });
        let earliness = r.language.as_ref().and_then(|_| {
            r.strings
                .iter()
                .map(|s| s.earliness)
                .collect::<Option<Vec<_>>>()
                .map(|v| Q(v.into_iter().max().unwrap_or_else(|| Rational::from_integer(0))))
        });
        SynthesisReport {
            jobs: jobs.jobs().iter().map(|j| j.name().to_string()).collect(),
            states: r.automaton().num_states(),
            transitions: r.automaton().num_transitions(),
            empty: r.is_empty(),
            strings,
            earliness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionDoc {
    pub ineqs: Vec<String>,
    pub witness: BTreeMap<String, Q>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LanguageDoc {
    pub strings: Vec<String>,
    pub e_star: Q,
    pub exact: bool,
    pub regions: Vec<RegionDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OptimalDelayDoc {
    pub delays: BTreeMap<String, Q>,
    pub supcf: Vec<String>,
    pub earliness: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DelayReportDoc {
    pub per_language: Vec<LanguageDoc>,
    pub optimal_earliness: Q,
    pub optimal_languages: Vec<usize>,
    pub optimal_delays: Vec<OptimalDelayDoc>,
}

impl DelayReportDoc {
    pub fn new(r: &OptimalDelayReport, plant: &TimedPlant) -> Self {
        let t = plant.events();
        let per_language = r
            .per_language
            .iter()
            .map(|o| {
                let names: Vec<String> = o.variables.iter().map(|&v| plant.transition_label(v)).collect();
                LanguageDoc {
                    strings: o.language.iter().map(|w| t.format_word(w)).collect(),
                    e_star: Q(o.e_star),
                    exact: o.exact,
                    regions: o
                        .regions
                        .iter()
                        .map(|reg| RegionDoc {
                            ineqs: reg.ineqs.iter().map(|q| q.render(&names)).collect(),
                            witness: o
                                .variables
                                .iter()
                                .map(|&v| (plant.transition_label(v), Q(reg.witness.get(v))))
                                .collect(),
                        })
                        .collect(),
                }
            })
            .collect();
        DelayReportDoc {
            per_language,
            optimal_earliness: Q(r.optimal_earliness),
            optimal_languages: r.optimal_languages.clone(),
            optimal_delays: r
                .optimal_delays
                .iter()
                .map(|o| OptimalDelayDoc {
                    delays: o
                        .delays
                        .support()
                        .into_iter()
                        .map(|(tr, v)| (plant.transition_label(tr), Q(v)))
                        .collect(),
                    supcf: o.language.iter().map(|w| t.format_word(w)).collect(),
                    earliness: Q(o.earliness),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelaxedSetDoc {
    pub jobs: Vec<String>,
    pub states: usize,
    pub transitions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelaxReportDoc {
    pub infeasible: bool,
    pub minimal_sets: Vec<RelaxedSetDoc>,
    pub evaluated: usize,
}

impl RelaxReportDoc {
    pub fn new(r: &RelaxationReport, jobs: &JobSet) -> Self {
        RelaxReportDoc {
            infeasible: r.infeasible,
            minimal_sets: r
                .named_sets(jobs)
                .into_iter()
                .zip(&r.summaries)
                .map(|(names, s)| RelaxedSetDoc {
                    jobs: names,
                    states: s.states,
                    transitions: s.transitions,
                })
                .collect(),
            evaluated: r.evaluated,
        }
    }
}

/// Minimal sublanguages as lists of strings.
pub fn family_doc(f: &LanguageFamily, t: &EventTable) -> Vec<Vec<String>> {
    f.to_names(t)
}

pub fn rational_text(r: &Rational) -> String {
    format_rational(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::int;

    #[test]
    fn problem_round_trip() {
        for fx in [fixtures::serial(), fixtures::job_shop(), fixtures::logic_conflict(), fixtures::cyclic_relax()] {
            let p = Problem {
                plant: fx.plant,
                jobs: fx.jobs,
                options: OptionsDoc::default(),
            };
            let text = p.to_json().unwrap();
            let back = Problem::from_json(&text).unwrap();
            assert_eq!(back, p);
            assert_eq!(back.to_json().unwrap(), text);
        }
    }

    #[test]
    fn event_level_durations_and_defaults() {
        let text = r#"{
          "plant": {
            "events": [{"name": "a", "controllable": true}, {"name": "b", "controllable": false}],
            "states": ["x0", "x1", "x2"], "initial": "x0", "marked": ["x2"],
            "transitions": [{"from": "x0", "event": "a", "to": "x1"},
                            {"from": "x1", "event": "b", "to": "x2", "duration": "7/2"}],
            "exclusion": [["a", "b"]],
            "durations": {"a": 2, "b": "3"}
          },
          "jobs": {"jobs": [
            {"name": "job1", "alphabet": ["a"], "deadline": "4",
             "language": {"events": [{"name": "a"}], "states": ["p", "q"], "initial": "p", "marked": ["q"],
                          "transitions": [{"from": "p", "event": "a", "to": "q"}]}},
            {"name": "job2", "alphabet": ["b"], "deadline": 6.5,
             "language": {"events": [{"name": "b"}], "states": ["p", "q"], "initial": "p", "marked": ["q"],
                          "transitions": [{"from": "p", "event": "b", "to": "q"}]}}
          ]}
        }"#;
        let text = text.replace("6.5", "\"6.5\"");
        let p = Problem::from_json(&text).unwrap();
        assert_eq!(p.plant.duration(0), int(2));
        assert_eq!(p.plant.duration(1), Rational::new(7, 2));
        assert_eq!(p.jobs.job(1).deadline(), Rational::new(13, 2));
        assert!(!p.jobs.job(1).language().event_table().is_controllable(0));
        assert!(p.plant.exclusion().contains(&(1, 0)));
    }

    #[test]
    fn validation_errors() {
        let good = Problem {
            plant: fixtures::serial().plant,
            jobs: fixtures::serial().jobs,
            options: OptionsDoc::default(),
        }
        .to_doc();
        let mut bad = good.clone();
        bad.plant.transitions[0].to = "nowhere".into();
        assert!(matches!(Problem::from_doc(&bad), Err(Error::Model(_))));
        let mut bad = good.clone();
        bad.plant.exclusion.push(("a".into(), "zz".into()));
        assert!(Problem::from_doc(&bad).is_err());
        let mut bad = good.clone();
        bad.jobs.jobs.pop();
        assert!(Problem::from_doc(&bad).is_err());
        let mut bad = good.clone();
        bad.options.mode = Some("fast".into());
        assert!(matches!(Problem::from_doc(&bad), Err(Error::Parse(_))));
        let mut bad = good;
        bad.plant.transitions[0].duration = None;
        assert!(Problem::from_doc(&bad).is_err());
        assert!(Problem::from_json("{").is_err());
    }
}
