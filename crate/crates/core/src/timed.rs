//! Time-weighted plants and string execution time.
//!
//! A [`TimedPlant`] is the triple `(G, f, h)`. The mutual exclusion relation
//! `h` induces a set of resources; every transition occupies the resources
//! of its event, and a string's execution time is the height of the heap
//! obtained by stacking its transitions in order. Two evaluations are
//! provided: the max-plus matrix product ([`exec_time`]) and the contour
//! recurrence ([`heap_exec_time`]). They agree exactly.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::automaton::{Automaton, EventId, EventTable, StateId};
use crate::delayopt::DelayVector;
use crate::error::{Error, Result};
use crate::maxplus::{MaxPlus, MaxPlusMatrix};
use crate::rational::{format_rational, is_positive, Rational};

/// A transition `(x, σ)` of the plant; `ξ(x, σ)` is defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub from: StateId,
    pub event: EventId,
}

/// Index into [`TimedPlant::transitions`].
pub type TransitionId = usize;

/// Closes a list of event pairs into a reflexive, symmetric relation over
/// every event of `table`.
pub fn closed_exclusion(table: &EventTable, pairs: &[(EventId, EventId)]) -> BTreeSet<(EventId, EventId)> {
    let mut h: BTreeSet<(EventId, EventId)> = table.ids().map(|e| (e, e)).collect();
    for &(a, b) in pairs {
        h.insert((a, b));
        h.insert((b, a));
    }
    h
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedPlant {
    g: Automaton,
    transitions: Vec<Transition>,
    index: HashMap<Transition, TransitionId>,
    durations: Vec<Rational>,
    exclusion: BTreeSet<(EventId, EventId)>,
}

impl TimedPlant {
    /// `durations` must cover exactly the transitions of `g`, each strictly
    /// positive.
    pub fn new(
        g: Automaton,
        durations: &BTreeMap<Transition, Rational>,
        exclusion: BTreeSet<(EventId, EventId)>,
    ) -> Result<Self> {
        let transitions: Vec<Transition> = g
            .transitions()
            .map(|(from, event, _)| Transition { from, event })
            .collect();
        let index: HashMap<_, _> = transitions.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        for t in durations.keys() {
            if !index.contains_key(t) {
                return Err(Error::Model(format!(
                    "duration given for undefined transition ({}, {})",
                    g.state_name(t.from),
                    g.event_table().name(t.event)
                )));
            }
        }
        let mut ds = Vec::with_capacity(transitions.len());
        for t in &transitions {
            let d = durations.get(t).ok_or_else(|| {
                Error::Model(format!(
                    "missing duration for transition ({}, {})",
                    g.state_name(t.from),
                    g.event_table().name(t.event)
                ))
            })?;
            if !is_positive(d) {
                return Err(Error::Model(format!(
                    "duration of ({}, {}) must be positive, got {}",
                    g.state_name(t.from),
                    g.event_table().name(t.event),
                    format_rational(d)
                )));
            }
            ds.push(*d);
        }
        for &(a, b) in &exclusion {
            if a >= g.event_table().len() || b >= g.event_table().len() {
                return Err(Error::Model("exclusion relation references an unknown event".into()));
            }
        }
        Ok(TimedPlant {
            g,
            transitions,
            index,
            durations: ds,
            exclusion,
        })
    }

    /// Event-level shorthand: every transition labelled `σ` gets `durations[σ]`.
    pub fn with_event_durations(
        g: Automaton,
        durations: &BTreeMap<EventId, Rational>,
        exclusion: BTreeSet<(EventId, EventId)>,
    ) -> Result<Self> {
        let mut per = BTreeMap::new();
        for (from, event, _) in g.transitions() {
            let d = durations.get(&event).ok_or_else(|| {
                Error::Model(format!("missing duration for event `{}`", g.event_table().name(event)))
            })?;
            per.insert(Transition { from, event }, *d);
        }
        Self::new(g, &per, exclusion)
    }

    pub fn automaton(&self) -> &Automaton {
        &self.g
    }

    pub fn events(&self) -> &EventTable {
        self.g.event_table()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, id: TransitionId) -> Transition {
        self.transitions[id]
    }

    pub fn transition_id(&self, t: Transition) -> Option<TransitionId> {
        self.index.get(&t).copied()
    }

    pub fn duration(&self, id: TransitionId) -> Rational {
        self.durations[id]
    }

    pub fn exclusion(&self) -> &BTreeSet<(EventId, EventId)> {
        &self.exclusion
    }

    /// `x.σ` rendering used in reports.
    pub fn transition_label(&self, id: TransitionId) -> String {
        let t = self.transitions[id];
        format!("{}.{}", self.g.state_name(t.from), self.events().name(t.event))
    }

    /// The path `ϖ(s)` of `s` through `G`.
    pub fn trajectory(&self, s: &[EventId]) -> Result<Vec<TransitionId>> {
        let mut x = self
            .g
            .initial()
            .ok_or_else(|| Error::Trajectory("plant has no initial state".into()))?;
        let mut out = Vec::with_capacity(s.len());
        for (k, &e) in s.iter().enumerate() {
            let id = self.index.get(&Transition { from: x, event: e }).copied().ok_or_else(|| {
                Error::Trajectory(format!(
                    "`{}` is not enabled after `{}`",
                    self.events().name(e),
                    self.events().format_word(&s[..k])
                ))
            })?;
            out.push(id);
            x = self.g.successor(x, e).expect("indexed transition");
        }
        Ok(out)
    }
}

/// Resources induced by the exclusion relation.
///
/// One resource per unordered pair `{σ, σ'}` in `h` (a reflexive pair gives
/// the singleton `{σ}`); an event occupies every resource that contains it.
/// Two events then share a resource exactly when they are related by `h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceModel {
    resources: Vec<Vec<EventId>>,
    occupancy: Vec<Vec<usize>>,
    member: Vec<Vec<bool>>,
}

impl ResourceModel {
    pub fn len(&self) -> usize {
        self.resources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.resources.is_empty()
    }

    pub fn resources(&self) -> &[Vec<EventId>] {
        &self.resources
    }

    /// Resources occupied by event `e`, ascending.
    pub fn occupancy(&self, e: EventId) -> &[usize] {
        &self.occupancy[e]
    }

    pub fn occupies(&self, e: EventId, r: usize) -> bool {
        self.member[e][r]
    }

    pub fn resource_label(&self, table: &EventTable, r: usize) -> String {
        let names: Vec<&str> = self.resources[r].iter().map(|&e| table.name(e)).collect();
        format!("{{{}}}", names.join(","))
    }
}

pub fn derive_resources(plant: &TimedPlant) -> Result<ResourceModel> {
    let table = plant.events();
    let h = plant.exclusion();
    for e in table.ids() {
        if !h.contains(&(e, e)) {
            return Err(Error::Model(format!(
                "exclusion relation is not reflexive: missing ({0}, {0})",
                table.name(e)
            )));
        }
    }
    for &(a, b) in h {
        if !h.contains(&(b, a)) {
            return Err(Error::Model(format!(
                "exclusion relation is not symmetric: ({}, {}) without its mirror",
                table.name(a),
                table.name(b)
            )));
        }
    }
    let resources: Vec<Vec<EventId>> = h
        .iter()
        .filter(|&&(a, b)| a <= b)
        .map(|&(a, b)| if a == b { vec![a] } else { vec![a, b] })
        .collect();
    let mut occupancy = vec![Vec::new(); table.len()];
    let mut member = vec![vec![false; resources.len()]; table.len()];
    for (r, members) in resources.iter().enumerate() {
        for &e in members {
            occupancy[e].push(r);
            member[e][r] = true;
        }
    }
    Ok(ResourceModel {
        resources,
        occupancy,
        member,
    })
}

/// Transition durations, optionally extended by a delay function: `f` or `f + D`.
#[derive(Debug, Clone, Copy)]
pub struct DurationValuation<'a> {
    base: &'a TimedPlant,
    extra: Option<&'a DelayVector>,
}

impl<'a> DurationValuation<'a> {
    pub fn base(plant: &'a TimedPlant) -> Self {
        DurationValuation { base: plant, extra: None }
    }

    pub fn with_delays(plant: &'a TimedPlant, delays: &'a DelayVector) -> Self {
        DurationValuation {
            base: plant,
            extra: Some(delays),
        }
    }

    pub fn delays(&self) -> Option<&'a DelayVector> {
        self.extra
    }

    pub fn duration(&self, t: TransitionId) -> Rational {
        let d = self.base.duration(t);
        match self.extra {
            Some(extra) => d + extra.get(t),
            None => d,
        }
    }
}

/// `M̂(τ)` for a single transition.
pub fn transition_matrix(
    plant: &TimedPlant,
    rm: &ResourceModel,
    tau: Transition,
    val: DurationValuation<'_>,
) -> Result<MaxPlusMatrix> {
    let id = plant.transition_id(tau).ok_or_else(|| {
        Error::Model(format!("({}, {}) is not a transition of the plant", tau.from, tau.event))
    })?;
    Ok(matrix_of(rm, tau.event, val.duration(id)))
}

fn matrix_of(rm: &ResourceModel, event: EventId, dur: Rational) -> MaxPlusMatrix {
    let n = rm.len();
    let mut m = MaxPlusMatrix::filled(n, MaxPlus::NegInf);
    for q in 0..n {
        let q_in = rm.occupies(event, q);
        for v in 0..n {
            let v_in = rm.occupies(event, v);
            let x = if q_in && v_in {
                MaxPlus::Finite(dur)
            } else if (q == v && !q_in) || (q_in && !v_in) {
                MaxPlus::one()
            } else {
                MaxPlus::NegInf
            };
            m.set(q, v, x);
        }
    }
    m
}

/// `M̂(ϖ(s))`, the identity for the empty string.
pub fn string_matrix(
    plant: &TimedPlant,
    rm: &ResourceModel,
    s: &[EventId],
    val: DurationValuation<'_>,
) -> Result<MaxPlusMatrix> {
    let path = plant.trajectory(s)?;
    let mut m = MaxPlusMatrix::identity(rm.len());
    for id in path {
        let t = plant.transition(id);
        m = m.mul(&matrix_of(rm, t.event, val.duration(id)));
    }
    Ok(m)
}

/// `υ(s) = 1ᵗ M̂(ϖ(s)) 1`.
pub fn exec_time(
    plant: &TimedPlant,
    rm: &ResourceModel,
    s: &[EventId],
    val: DurationValuation<'_>,
) -> Result<Rational> {
    let m = string_matrix(plant, rm, s, val)?;
    Ok(m.total().finite().unwrap_or_else(|| Rational::from_integer(0)))
}

/// Upper contour of a heap: one height per resource.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Contour {
    heights: Vec<Rational>,
}

impl Contour {
    pub fn new(n: usize) -> Self {
        Contour {
            heights: vec![Rational::from_integer(0); n],
        }
    }

    pub fn heights(&self) -> &[Rational] {
        &self.heights
    }

    /// Drops a piece occupying `occupied` with the given duration. Its start
    /// is the highest contact point; resources it does not occupy are raised
    /// to that start so later pieces cannot start earlier. Returns the start.
    pub fn place(&mut self, occupied: &[usize], dur: Rational) -> Rational {
        let start = occupied
            .iter()
            .map(|&r| self.heights[r])
            .max()
            .unwrap_or_else(|| Rational::from_integer(0));
        for h in self.heights.iter_mut() {
            if *h < start {
                *h = start;
            }
        }
        let top = start + dur;
        for &r in occupied {
            self.heights[r] = top;
        }
        start
    }

    pub fn height(&self) -> Rational {
        self.heights
            .iter()
            .copied()
            .max()
            .unwrap_or_else(|| Rational::from_integer(0))
    }
}

/// Contour after executing `s`.
pub fn heap_contour(
    plant: &TimedPlant,
    rm: &ResourceModel,
    s: &[EventId],
    val: DurationValuation<'_>,
) -> Result<Contour> {
    let path = plant.trajectory(s)?;
    let mut c = Contour::new(rm.len());
    for id in path {
        c.place(rm.occupancy(plant.transition(id).event), val.duration(id));
    }
    Ok(c)
}

/// `υ(s)` by the heap recurrence.
pub fn heap_exec_time(
    plant: &TimedPlant,
    rm: &ResourceModel,
    s: &[EventId],
    val: DurationValuation<'_>,
) -> Result<Rational> {
    Ok(heap_contour(plant, rm, s, val)?.height())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::int;

    #[test]
    fn resources_of_serial_fixture() {
        let fx = fixtures::serial();
        let rm = derive_resources(&fx.plant).unwrap();
        assert_eq!(rm.resources(), &[vec![0], vec![0, 1], vec![1]]);
        assert_eq!(rm.len(), 3);
        // occupancy(a) = {{a},{a,b}}
        assert_eq!(rm.occupancy(0), &[0, 1]);
        assert_eq!(rm.occupancy(1), &[1, 2]);
    }

    #[test]
    fn resources_of_parallel_fixture() {
        let fx = fixtures::parallel();
        let rm = derive_resources(&fx.plant).unwrap();
        assert_eq!(rm.resources(), &[vec![0], vec![1]]);
        assert_eq!(rm.occupancy(0), &[0]);
        assert_eq!(rm.occupancy(1), &[1]);
    }

    #[test]
    fn intersection_iff_related() {
        let fx = fixtures::job_shop();
        let rm = derive_resources(&fx.plant).unwrap();
        let h = fx.plant.exclusion();
        for a in fx.plant.events().ids() {
            for b in fx.plant.events().ids() {
                let share = rm.occupancy(a).iter().any(|r| rm.occupancy(b).contains(r));
                assert_eq!(share, h.contains(&(a, b)));
            }
        }
    }

    #[test]
    fn rejects_bad_relations() {
        let fx = fixtures::serial();
        let g = fx.plant.automaton().clone();
        let durations: BTreeMap<_, _> = [(0, int(2)), (1, int(3))].into();
        let missing_refl: BTreeSet<_> = [(0, 0), (0, 1), (1, 0)].into();
        let p = TimedPlant::with_event_durations(g.clone(), &durations, missing_refl).unwrap();
        assert!(matches!(derive_resources(&p), Err(Error::Model(_))));
        let asym: BTreeSet<_> = [(0, 0), (1, 1), (0, 1)].into();
        let p = TimedPlant::with_event_durations(g, &durations, asym).unwrap();
        assert!(matches!(derive_resources(&p), Err(Error::Model(_))));
    }

    #[test]
    fn rejects_bad_durations() {
        let fx = fixtures::serial();
        let g = fx.plant.automaton().clone();
        let h = fx.plant.exclusion().clone();
        let zero: BTreeMap<_, _> = [(0, int(0)), (1, int(3))].into();
        assert!(TimedPlant::with_event_durations(g.clone(), &zero, h.clone()).is_err());
        let partial: BTreeMap<_, _> = [(0, int(2))].into();
        assert!(TimedPlant::with_event_durations(g, &partial, h).is_err());
    }

    #[test]
    fn matrix_of_parallel_a() {
        let fx = fixtures::parallel();
        let rm = derive_resources(&fx.plant).unwrap();
        let tau = Transition { from: 0, event: 0 };
        let m = transition_matrix(&fx.plant, &rm, tau, DurationValuation::base(&fx.plant)).unwrap();
        assert_eq!(m.get(0, 0), MaxPlus::Finite(int(2)));
        assert_eq!(m.get(0, 1), MaxPlus::Finite(int(0)));
        assert_eq!(m.get(1, 0), MaxPlus::NegInf);
        assert_eq!(m.get(1, 1), MaxPlus::Finite(int(0)));
        let bogus = Transition { from: 1, event: 0 };
        assert!(transition_matrix(&fx.plant, &rm, bogus, DurationValuation::base(&fx.plant)).is_err());
    }

    #[test]
    fn full_occupancy_gives_constant_matrix() {
        // single event plant: R(τ) is every resource
        let fx = fixtures::serial();
        let rm = derive_resources(&fx.plant).unwrap();
        let mut only_a = rm.clone();
        only_a.member[0] = vec![true; 3];
        let m = matrix_of(&only_a, 0, int(2));
        for q in 0..3 {
            for v in 0..3 {
                assert_eq!(m.get(q, v), MaxPlus::Finite(int(2)));
            }
        }
    }

    #[test]
    fn empty_string_matrix_is_identity() {
        let fx = fixtures::serial();
        let rm = derive_resources(&fx.plant).unwrap();
        let m = string_matrix(&fx.plant, &rm, &[], DurationValuation::base(&fx.plant)).unwrap();
        assert_eq!(m, MaxPlusMatrix::identity(3));
        assert_eq!(exec_time(&fx.plant, &rm, &[], DurationValuation::base(&fx.plant)).unwrap(), int(0));
        assert_eq!(heap_exec_time(&fx.plant, &rm, &[], DurationValuation::base(&fx.plant)).unwrap(), int(0));
    }

    #[test]
    fn exec_time_examples() {
        let serial = fixtures::serial();
        let rm = derive_resources(&serial.plant).unwrap();
        let v = DurationValuation::base(&serial.plant);
        assert_eq!(exec_time(&serial.plant, &rm, &[0, 1], v).unwrap(), int(5));
        assert_eq!(heap_exec_time(&serial.plant, &rm, &[0, 1], v).unwrap(), int(5));

        let par = fixtures::parallel();
        let rm = derive_resources(&par.plant).unwrap();
        let v = DurationValuation::base(&par.plant);
        assert_eq!(exec_time(&par.plant, &rm, &[0, 1], v).unwrap(), int(3));
        let c = heap_contour(&par.plant, &rm, &[0, 1], v).unwrap();
        assert_eq!(c.heights(), &[int(2), int(3)]);
    }

    #[test]
    fn string_outside_plant_is_trajectory_error() {
        let fx = fixtures::serial();
        let rm = derive_resources(&fx.plant).unwrap();
        let v = DurationValuation::base(&fx.plant);
        assert!(matches!(exec_time(&fx.plant, &rm, &[1], v), Err(Error::Trajectory(_))));
        assert!(matches!(heap_exec_time(&fx.plant, &rm, &[0, 0], v), Err(Error::Trajectory(_))));
    }
}
