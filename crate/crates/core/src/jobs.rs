//! Job requirements with deadlines, job completion times and earliness.

use std::collections::BTreeSet;

use crate::automaton::{natural_projection, Automaton, EventId, EventTable, StateId};
use crate::error::{Error, Result};
use crate::rational::{format_rational, is_positive, Rational};
use crate::timed::{Contour, DurationValuation, ResourceModel, TimedPlant};

/// A job requirement `(E_i, d_i)` over the sub-alphabet `Σ_i`.
///
/// `language` keeps its own event table; `alphabet` is expressed in the
/// plant's event ids. Events of the plant outside `Σ_i` are ignored by the
/// job (the requirement is read through the natural projection `P_i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSpec {
    name: String,
    alphabet: BTreeSet<EventId>,
    language: Automaton,
    local: Vec<Option<EventId>>,
    deadline: Rational,
}

impl JobSpec {
    pub fn new(
        name: impl Into<String>,
        plant_events: &EventTable,
        alphabet: BTreeSet<EventId>,
        language: Automaton,
        deadline: Rational,
    ) -> Result<Self> {
        let name = name.into();
        if alphabet.is_empty() {
            return Err(Error::Model(format!("job `{name}` has an empty alphabet")));
        }
        if let Some(&bad) = alphabet.iter().find(|&&e| e >= plant_events.len()) {
            return Err(Error::Model(format!("job `{name}` uses unknown event id {bad}")));
        }
        if !is_positive(&deadline) {
            return Err(Error::Model(format!(
                "job `{name}` has non-positive deadline {}",
                format_rational(&deadline)
            )));
        }
        let mut local = vec![None; plant_events.len()];
        for ev in language.event_table().events() {
            let id = plant_events
                .id(&ev.name)
                .filter(|id| alphabet.contains(id))
                .ok_or_else(|| {
                    Error::Model(format!("job `{name}` language uses `{}` outside its alphabet", ev.name))
                })?;
            if plant_events.is_controllable(id) != ev.controllable {
                return Err(Error::Model(format!(
                    "job `{name}`: event `{}` has conflicting controllability tags",
                    ev.name
                )));
            }
            local[id] = language.event_table().id(&ev.name);
        }
        Ok(JobSpec {
            name,
            alphabet,
            language,
            local,
            deadline,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &BTreeSet<EventId> {
        &self.alphabet
    }

    pub fn language(&self) -> &Automaton {
        &self.language
    }

    pub fn deadline(&self) -> Rational {
        self.deadline
    }

    pub fn with_deadline(&self, deadline: Rational) -> Result<JobSpec> {
        if !is_positive(&deadline) {
            return Err(Error::Model("deadline must be positive".into()));
        }
        Ok(JobSpec {
            deadline,
            ..self.clone()
        })
    }

    pub fn contains_event(&self, e: EventId) -> bool {
        self.alphabet.contains(&e)
    }

    pub fn initial(&self) -> Option<StateId> {
        self.language.initial()
    }

    /// One step of the requirement automaton read through `P_i`.
    pub fn step(&self, state: StateId, e: EventId) -> Option<StateId> {
        if !self.alphabet.contains(&e) {
            return Some(state);
        }
        self.local[e].and_then(|l| self.language.successor(state, l))
    }

    pub fn accepting(&self, state: StateId) -> bool {
        self.language.is_marked(state)
    }

    /// `P_i(s) ∈ E_i`.
    pub fn completed_by(&self, s: &[EventId]) -> bool {
        let p = natural_projection(s, &self.alphabet);
        let Some(mut x) = self.initial() else { return false };
        for e in p {
            match self.step(x, e) {
                Some(y) => x = y,
                None => return false,
            }
        }
        self.accepting(x)
    }
}

/// The indexed family `E_T` plus the optional general logic requirement `E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSet {
    events: EventTable,
    jobs: Vec<JobSpec>,
    logic: Option<Automaton>,
}

impl JobSet {
    /// `logic` is re-expressed over the plant alphabet; plant events missing
    /// from its table are never accepted by it. The job alphabets must cover
    /// every plant event.
    pub fn new(plant_events: &EventTable, jobs: Vec<JobSpec>, logic: Option<Automaton>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for j in &jobs {
            if !names.insert(j.name.clone()) {
                return Err(Error::Model(format!("duplicate job name `{}`", j.name)));
            }
        }
        let covered: BTreeSet<EventId> = jobs.iter().flat_map(|j| j.alphabet.iter().copied()).collect();
        if let Some(e) = plant_events.ids().find(|e| !covered.contains(e)) {
            return Err(Error::Model(format!(
                "event `{}` belongs to no job alphabet; the job alphabets must cover Σ",
                plant_events.name(e)
            )));
        }
        let logic = logic.map(|l| l.reindexed(plant_events)).transpose()?;
        Ok(JobSet {
            events: plant_events.clone(),
            jobs,
            logic,
        })
    }

    pub fn events(&self) -> &EventTable {
        &self.events
    }

    pub fn jobs(&self) -> &[JobSpec] {
        &self.jobs
    }

    pub fn job(&self, i: usize) -> &JobSpec {
        &self.jobs[i]
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn logic(&self) -> Option<&Automaton> {
        self.logic.as_ref()
    }

    pub fn deadlines(&self) -> Vec<Rational> {
        self.jobs.iter().map(|j| j.deadline).collect()
    }

    pub fn job_index(&self, name: &str) -> Option<usize> {
        self.jobs.iter().position(|j| j.name == name)
    }

    /// Same jobs with new deadlines (same order).
    pub fn with_deadlines(&self, deadlines: &[Rational]) -> Result<JobSet> {
        if deadlines.len() != self.jobs.len() {
            return Err(Error::Contract("deadline vector has the wrong length".into()));
        }
        let jobs = self
            .jobs
            .iter()
            .zip(deadlines)
            .map(|(j, d)| j.with_deadline(*d))
            .collect::<Result<Vec<_>>>()?;
        Ok(JobSet { jobs, ..self.clone() })
    }
}

/// Execution time of every job along `s`: `t_i` is `υ` of the longest prefix
/// of `s` ending with an event of `Σ_i`, or 0 when there is none.
pub fn job_times(
    plant: &TimedPlant,
    rm: &ResourceModel,
    jobs: &JobSet,
    s: &[EventId],
    val: DurationValuation<'_>,
) -> Result<Vec<Rational>> {
    let path = plant.trajectory(s)?;
    let mut contour = Contour::new(rm.len());
    let mut times = vec![Rational::from_integer(0); jobs.len()];
    for (id, &e) in path.into_iter().zip(s) {
        contour.place(rm.occupancy(e), val.duration(id));
        let now = contour.height();
        for (i, job) in jobs.jobs().iter().enumerate() {
            if job.contains_event(e) {
                times[i] = now;
            }
        }
    }
    Ok(times)
}

/// `t_{E_i,f}(s)` for a single job.
pub fn job_exec_time(
    plant: &TimedPlant,
    rm: &ResourceModel,
    job: &JobSpec,
    s: &[EventId],
    val: DurationValuation<'_>,
) -> Result<Rational> {
    let path = plant.trajectory(s)?;
    let mut contour = Contour::new(rm.len());
    let mut t = Rational::from_integer(0);
    for (id, &e) in path.into_iter().zip(s) {
        contour.place(rm.occupancy(e), val.duration(id));
        if job.contains_event(e) {
            t = contour.height();
        }
    }
    Ok(t)
}

/// Membership in `W_f(E_T)`: every job is completed and meets its deadline.
/// Strings outside `L(G)` are not members.
pub fn in_w(plant: &TimedPlant, rm: &ResourceModel, jobs: &JobSet, s: &[EventId], val: DurationValuation<'_>) -> bool {
    if !jobs.jobs().iter().all(|j| j.completed_by(s)) {
        return false;
    }
    match job_times(plant, rm, jobs, s, val) {
        Ok(t) => t.iter().zip(jobs.jobs()).all(|(t, j)| *t <= j.deadline),
        Err(_) => false,
    }
}

/// `e(s) = Σ_i (d_i − t_i)`, given the completion times of a string in `W_f`.
pub fn earliness_string(jobs: &JobSet, times: &[Rational]) -> Result<Rational> {
    if times.len() != jobs.len() {
        return Err(Error::Contract(format!(
            "expected {} completion times, got {}",
            jobs.len(),
            times.len()
        )));
    }
    let mut total = Rational::from_integer(0);
    for (t, j) in times.iter().zip(jobs.jobs()) {
        if *t > j.deadline {
            return Err(Error::Contract(format!(
                "job `{}` completes at {} after its deadline {}",
                j.name,
                format_rational(t),
                format_rational(&j.deadline)
            )));
        }
        total += j.deadline - *t;
    }
    Ok(total)
}

/// `e(K) = max_{s ∈ K} e(s)`, with `e(∅) = 0`.
pub fn earliness_language(jobs: &JobSet, times: &[Vec<Rational>]) -> Result<Rational> {
    let mut best = Rational::from_integer(0);
    for t in times {
        best = best.max(earliness_string(jobs, t)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::int;
    use crate::timed::derive_resources;

    #[test]
    fn job_time_is_last_own_event() {
        // Σ = {a,b,c,d}, Σ_i = {a,c}, s = abcd  =>  t = υ(abc)
        let fx = fixtures::chain4();
        let rm = derive_resources(&fx.plant).unwrap();
        let v = DurationValuation::base(&fx.plant);
        let s = fx.plant.events().parse_word("a b c d").unwrap();
        let t = job_exec_time(&fx.plant, &rm, fx.jobs.job(0), &s, v).unwrap();
        let abc = crate::timed::exec_time(&fx.plant, &rm, &s[..3], v).unwrap();
        assert_eq!(t, abc);
        assert!(t < crate::timed::exec_time(&fx.plant, &rm, &s, v).unwrap());
    }

    #[test]
    fn job_time_without_own_events_is_zero() {
        let fx = fixtures::serial();
        let rm = derive_resources(&fx.plant).unwrap();
        let v = DurationValuation::base(&fx.plant);
        assert_eq!(job_exec_time(&fx.plant, &rm, fx.jobs.job(1), &[0], v).unwrap(), int(0));
    }

    #[test]
    fn serial_job_times() {
        let fx = fixtures::serial();
        let rm = derive_resources(&fx.plant).unwrap();
        let v = DurationValuation::base(&fx.plant);
        assert_eq!(job_times(&fx.plant, &rm, &fx.jobs, &[0, 1], v).unwrap(), vec![int(2), int(5)]);
        assert_eq!(job_exec_time(&fx.plant, &rm, fx.jobs.job(0), &[0, 1], v).unwrap(), int(2));
        assert_eq!(job_exec_time(&fx.plant, &rm, fx.jobs.job(1), &[0, 1], v).unwrap(), int(5));
    }

    #[test]
    fn membership_in_w() {
        let fx = fixtures::serial();
        let rm = derive_resources(&fx.plant).unwrap();
        let v = DurationValuation::base(&fx.plant);
        assert!(in_w(&fx.plant, &rm, &fx.jobs, &[0, 1], v));
        let tight = fx.jobs.with_deadlines(&[int(4), int(4)]).unwrap();
        assert!(!in_w(&fx.plant, &rm, &tight, &[0, 1], v));
        assert!(!in_w(&fx.plant, &rm, &fx.jobs, &[], v));
        assert!(!in_w(&fx.plant, &rm, &fx.jobs, &[1], v));
    }

    #[test]
    fn earliness_of_strings() {
        let fx = fixtures::job_shop();
        let e = earliness_string(&fx.jobs, &[int(16), int(10)]).unwrap();
        assert_eq!(e, int(6));
        assert_eq!(earliness_string(&fx.jobs, &[int(17), int(11)]).unwrap(), int(4));
        assert_eq!(earliness_string(&fx.jobs, &[int(20), int(12)]).unwrap(), int(0));
        assert!(matches!(
            earliness_string(&fx.jobs, &[int(21), int(12)]),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn earliness_of_languages() {
        let fx = fixtures::job_shop();
        assert_eq!(earliness_language(&fx.jobs, &[]).unwrap(), int(0));
        assert_eq!(earliness_language(&fx.jobs, &[vec![int(17), int(11)]]).unwrap(), int(4));
        let mut all = vec![vec![int(16), int(10)]; 4];
        all.push(vec![int(17), int(11)]);
        assert_eq!(earliness_language(&fx.jobs, &all).unwrap(), int(6));
    }

    #[test]
    fn cover_is_enforced() {
        let fx = fixtures::serial();
        let only_a = vec![fx.jobs.job(0).clone()];
        assert!(matches!(
            JobSet::new(fx.plant.events(), only_a, None),
            Err(Error::Model(_))
        ));
    }

    #[test]
    fn job_validation() {
        let fx = fixtures::serial();
        let j = fx.jobs.job(0);
        let t = fx.plant.events();
        assert!(JobSpec::new("x", t, BTreeSet::new(), j.language().clone(), int(1)).is_err());
        assert!(JobSpec::new("x", t, j.alphabet().clone(), j.language().clone(), int(0)).is_err());
        // language over {a} but alphabet {b}
        assert!(JobSpec::new("x", t, [1].into(), j.language().clone(), int(1)).is_err());
    }
}
