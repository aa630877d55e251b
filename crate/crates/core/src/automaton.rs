//! Deterministic finite automata with a controllable/uncontrollable event
//! partition, plus the language operations used throughout the pipeline.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

pub type EventId = usize;
pub type StateId = usize;
/// A string of events, by index into an [`EventTable`].
pub type Word = Vec<EventId>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    pub name: String,
    pub controllable: bool,
}

impl Event {
    pub fn new(name: impl Into<String>, controllable: bool) -> Self {
        Event {
            name: name.into(),
            controllable,
        }
    }
}

/// An ordered alphabet in which every event is tagged controllable or not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventTable {
    events: Vec<Event>,
    index: BTreeMap<String, EventId>,
}

impl EventTable {
    pub fn new(events: Vec<Event>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (id, e) in events.iter().enumerate() {
            if e.name.is_empty() {
                return Err(Error::Model("event names must be non-empty".into()));
            }
            if index.insert(e.name.clone(), id).is_some() {
                return Err(Error::Model(format!("duplicate event `{}`", e.name)));
            }
        }
        Ok(EventTable { events, index })
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn event(&self, id: EventId) -> &Event {
        &self.events[id]
    }

    pub fn name(&self, id: EventId) -> &str {
        &self.events[id].name
    }

    pub fn is_controllable(&self, id: EventId) -> bool {
        self.events[id].controllable
    }

    pub fn id(&self, name: &str) -> Option<EventId> {
        self.index.get(name).copied()
    }

    pub fn ids(&self) -> std::ops::Range<EventId> {
        0..self.events.len()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn uncontrollable(&self) -> impl Iterator<Item = EventId> + '_ {
        self.ids().filter(|&e| !self.events[e].controllable)
    }

    /// True when both tables hold the same named events with the same tags,
    /// regardless of order.
    pub fn same_events(&self, other: &EventTable) -> bool {
        self.len() == other.len()
            && self
                .events
                .iter()
                .all(|e| other.id(&e.name).map(|o| other.events[o] == *e).unwrap_or(false))
    }

    /// Merges two alphabets. Returns the merged table and, for each input
    /// table, the position of its events in the merged one.
    pub fn union(&self, other: &EventTable) -> Result<(EventTable, Vec<EventId>, Vec<EventId>)> {
        let mut events = self.events.clone();
        let map_a: Vec<EventId> = self.ids().collect();
        let mut map_b = Vec::with_capacity(other.len());
        for e in &other.events {
            match self.id(&e.name) {
                Some(id) => {
                    if self.events[id].controllable != e.controllable {
                        return Err(Error::Model(format!(
                            "event `{}` has conflicting controllability tags",
                            e.name
                        )));
                    }
                    map_b.push(id);
                }
                None => {
                    map_b.push(events.len());
                    events.push(e.clone());
                }
            }
        }
        Ok((EventTable::new(events)?, map_a, map_b))
    }

    /// Resolves a whitespace- or comma-separated list of event names.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        text.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                self.id(t)
                    .ok_or_else(|| Error::Model(format!("unknown event `{t}`")))
            })
            .collect()
    }

    pub fn word_names(&self, w: &[EventId]) -> Vec<String> {
        w.iter().map(|&e| self.name(e).to_string()).collect()
    }

    /// Space-separated rendering; the empty string renders as `ε`.
    pub fn format_word(&self, w: &[EventId]) -> String {
        if w.is_empty() {
            "ε".to_string()
        } else {
            self.word_names(w).join(" ")
        }
    }
}

/// Classification of a state by its outgoing transitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    /// No outgoing transitions.
    Terminal,
    Controllable,
    Uncontrollable,
    /// Both controllable and uncontrollable exits.
    Mixed,
}

/// A finite set of strings.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteLanguage {
    strings: BTreeSet<Word>,
}

impl FiniteLanguage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(w: Word) -> Self {
        let mut l = Self::new();
        l.insert(w);
        l
    }

    pub fn insert(&mut self, w: Word) -> bool {
        self.strings.insert(w)
    }

    pub fn contains(&self, w: &[EventId]) -> bool {
        self.strings.contains(w)
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Word> {
        self.strings.iter()
    }

    pub fn is_subset(&self, other: &FiniteLanguage) -> bool {
        self.strings.is_subset(&other.strings)
    }

    pub fn union(&self, other: &FiniteLanguage) -> FiniteLanguage {
        FiniteLanguage {
            strings: self.strings.union(&other.strings).cloned().collect(),
        }
    }

    /// `a·L`
    pub fn prepend(&self, a: EventId) -> FiniteLanguage {
        self.strings
            .iter()
            .map(|w| {
                let mut v = Vec::with_capacity(w.len() + 1);
                v.push(a);
                v.extend_from_slice(w);
                v
            })
            .collect()
    }

    pub fn prefix_closure(&self) -> BTreeSet<Word> {
        let mut out = BTreeSet::new();
        for w in &self.strings {
            for k in 0..=w.len() {
                out.insert(w[..k].to_vec());
            }
        }
        out
    }

    pub fn to_names(&self, table: &EventTable) -> Vec<Vec<String>> {
        self.strings.iter().map(|w| table.word_names(w)).collect()
    }
}

impl FromIterator<Word> for FiniteLanguage {
    fn from_iter<I: IntoIterator<Item = Word>>(iter: I) -> Self {
        FiniteLanguage {
            strings: iter.into_iter().collect(),
        }
    }
}

impl IntoIterator for FiniteLanguage {
    type Item = Word;
    type IntoIter = std::collections::btree_set::IntoIter<Word>;
    fn into_iter(self) -> Self::IntoIter {
        self.strings.into_iter()
    }
}

/// A deterministic automaton `(X, Σ, ξ, x0, Xm)`. An automaton without an
/// initial state recognizes the empty language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    events: EventTable,
    names: Vec<String>,
    initial: Option<StateId>,
    marked: Vec<bool>,
    delta: Vec<BTreeMap<EventId, StateId>>,
}

impl Automaton {
    pub fn new(events: EventTable) -> Self {
        Automaton {
            events,
            names: Vec::new(),
            initial: None,
            marked: Vec::new(),
            delta: Vec::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>, marked: bool) -> StateId {
        self.names.push(name.into());
        self.marked.push(marked);
        self.delta.push(BTreeMap::new());
        self.names.len() - 1
    }

    pub fn set_initial(&mut self, x: StateId) -> Result<()> {
        if x >= self.names.len() {
            return Err(Error::Model(format!("initial state {x} does not exist")));
        }
        self.initial = Some(x);
        Ok(())
    }

    pub fn set_marked(&mut self, x: StateId, marked: bool) {
        self.marked[x] = marked;
    }

    /// Adds `from --event--> to`; a second, different successor for the same
    /// `(state, event)` is rejected.
    pub fn add_transition(&mut self, from: StateId, event: EventId, to: StateId) -> Result<()> {
        let n = self.names.len();
        if from >= n || to >= n {
            return Err(Error::Model(format!("transition {from} -> {to} references a missing state")));
        }
        if event >= self.events.len() {
            return Err(Error::Model(format!("transition uses unknown event id {event}")));
        }
        match self.delta[from].insert(event, to) {
            Some(prev) if prev != to => Err(Error::Model(format!(
                "nondeterministic transitions on `{}` from state `{}`",
                self.events.name(event),
                self.names[from]
            ))),
            _ => Ok(()),
        }
    }

    /// Builds a prefix tree recognizing exactly `words`.
    pub fn from_words<'a>(events: EventTable, words: impl IntoIterator<Item = &'a Word>) -> Self {
        let mut a = Automaton::new(events);
        let root = a.add_state("ε", false);
        a.initial = Some(root);
        for w in words {
            let mut x = root;
            for (k, &e) in w.iter().enumerate() {
                x = match a.delta[x].get(&e) {
                    Some(&y) => y,
                    None => {
                        let name = a.events.format_word(&w[..=k]);
                        let y = a.add_state(name, false);
                        a.delta[x].insert(e, y);
                        y
                    }
                };
            }
            a.marked[x] = true;
        }
        a.trim()
    }

    pub fn event_table(&self) -> &EventTable {
        &self.events
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().map(|d| d.len()).sum()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.names.len()
    }

    pub fn initial(&self) -> Option<StateId> {
        self.initial
    }

    pub fn is_marked(&self, x: StateId) -> bool {
        self.marked[x]
    }

    pub fn state_name(&self, x: StateId) -> &str {
        &self.names[x]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn successor(&self, x: StateId, e: EventId) -> Option<StateId> {
        self.delta[x].get(&e).copied()
    }

    pub fn outgoing(&self, x: StateId) -> impl Iterator<Item = (EventId, StateId)> + '_ {
        self.delta[x].iter().map(|(&e, &y)| (e, y))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, EventId, StateId)> + '_ {
        self.delta
            .iter()
            .enumerate()
            .flat_map(|(x, d)| d.iter().map(move |(&e, &y)| (x, e, y)))
    }

    pub fn is_empty(&self) -> bool {
        self.initial.is_none()
    }

    pub fn state_kind(&self, x: StateId) -> StateKind {
        let (mut c, mut u) = (false, false);
        for &e in self.delta[x].keys() {
            if self.events.is_controllable(e) {
                c = true;
            } else {
                u = true;
            }
        }
        match (c, u) {
            (false, false) => StateKind::Terminal,
            (true, false) => StateKind::Controllable,
            (false, true) => StateKind::Uncontrollable,
            (true, true) => StateKind::Mixed,
        }
    }

    pub fn run(&self, w: &[EventId]) -> Option<StateId> {
        let mut x = self.initial?;
        for &e in w {
            x = self.successor(x, e)?;
        }
        Some(x)
    }

    pub fn accepts(&self, w: &[EventId]) -> bool {
        self.run(w).map(|x| self.marked[x]).unwrap_or(false)
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let Some(x0) = self.initial else { return seen };
        let mut stack = vec![x0];
        seen[x0] = true;
        while let Some(x) = stack.pop() {
            for &y in self.delta[x].values() {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    pub fn coreachable(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (x, _, y) in self.transitions() {
            preds[y].push(x);
        }
        let mut seen = self.marked.clone();
        let mut stack: Vec<StateId> = (0..n).filter(|&x| seen[x]).collect();
        while let Some(y) = stack.pop() {
            for &x in &preds[y] {
                if !seen[x] {
                    seen[x] = true;
                    stack.push(x);
                }
            }
        }
        seen
    }

    /// Keeps only states that are both reachable and co-reachable. Returns the
    /// trimmed automaton and the old-to-new state map.
    pub fn trim_with_map(&self) -> (Automaton, Vec<Option<StateId>>) {
        let r = self.reachable();
        let c = self.coreachable();
        let keep: Vec<bool> = (0..self.num_states()).map(|x| r[x] && c[x]).collect();
        self.restrict(&keep)
    }

    pub fn trim(&self) -> Automaton {
        self.trim_with_map().0
    }

    /// Sub-automaton on the states flagged in `keep`; renumbers in order.
    pub(crate) fn restrict(&self, keep: &[bool]) -> (Automaton, Vec<Option<StateId>>) {
        let mut map = vec![None; self.num_states()];
        let mut out = Automaton::new(self.events.clone());
        for x in self.states().filter(|&x| keep[x]) {
            map[x] = Some(out.add_state(self.names[x].clone(), self.marked[x]));
        }
        for (x, e, y) in self.transitions() {
            if let (Some(nx), Some(ny)) = (map[x], map[y]) {
                out.delta[nx].insert(e, ny);
            }
        }
        out.initial = self.initial.and_then(|x| map[x]);
        (out, map)
    }

    /// True when the reachable part has no cycle.
    pub fn is_acyclic(&self) -> bool {
        let Some(x0) = self.initial else { return true };
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut color = vec![0u8; self.num_states()];
        let mut stack: Vec<(StateId, Vec<StateId>)> = vec![(x0, self.delta[x0].values().copied().collect())];
        color[x0] = 1;
        while let Some((x, pending)) = stack.last_mut() {
            match pending.pop() {
                Some(y) => match color[y] {
                    1 => return false,
                    0 => {
                        color[y] = 1;
                        let next = self.delta[y].values().copied().collect();
                        stack.push((y, next));
                    }
                    _ => {}
                },
                None => {
                    color[*x] = 2;
                    stack.pop();
                }
            }
        }
        true
    }

    /// Maps this automaton onto `table` by event name.
    pub fn reindexed(&self, table: &EventTable) -> Result<Automaton> {
        let mut map = Vec::with_capacity(self.events.len());
        for e in self.events.events() {
            let id = table
                .id(&e.name)
                .ok_or_else(|| Error::Model(format!("event `{}` is not in the target alphabet", e.name)))?;
            if table.is_controllable(id) != e.controllable {
                return Err(Error::Model(format!(
                    "event `{}` has conflicting controllability tags",
                    e.name
                )));
            }
            map.push(id);
        }
        let mut out = Automaton::new(table.clone());
        out.names = self.names.clone();
        out.marked = self.marked.clone();
        out.initial = self.initial;
        out.delta = self
            .delta
            .iter()
            .map(|d| d.iter().map(|(&e, &y)| (map[e], y)).collect())
            .collect();
        Ok(out)
    }
}

/// Synchronous product: shared events synchronize, private events interleave.
/// Only the reachable part is built.
pub fn sync_product(a: &Automaton, b: &Automaton) -> Result<Automaton> {
    let (table, map_a, map_b) = a.events.union(&b.events)?;
    let n = table.len();
    let mut in_a = vec![None; n];
    let mut in_b = vec![None; n];
    for (local, &global) in map_a.iter().enumerate() {
        in_a[global] = Some(local);
    }
    for (local, &global) in map_b.iter().enumerate() {
        in_b[global] = Some(local);
    }
    let mut out = Automaton::new(table);
    let (Some(a0), Some(b0)) = (a.initial, b.initial) else {
        return Ok(out);
    };
    let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |out: &mut Automaton, queue: &mut VecDeque<(StateId, StateId, StateId)>, p: StateId, q: StateId| {
        *ids.entry((p, q)).or_insert_with(|| {
            let id = out.add_state(format!("{}|{}", a.names[p], b.names[q]), a.marked[p] && b.marked[q]);
            queue.push_back((p, q, id));
            id
        })
    };
    let root = intern(&mut out, &mut queue, a0, b0);
    out.initial = Some(root);
    while let Some((p, q, from)) = queue.pop_front() {
        for e in 0..n {
            let next = match (in_a[e], in_b[e]) {
                (Some(ea), Some(eb)) => match (a.successor(p, ea), b.successor(q, eb)) {
                    (Some(p2), Some(q2)) => Some((p2, q2)),
                    _ => None,
                },
                (Some(ea), None) => a.successor(p, ea).map(|p2| (p2, q)),
                (None, Some(eb)) => b.successor(q, eb).map(|q2| (p, q2)),
                (None, None) => None,
            };
            if let Some((p2, q2)) = next {
                let to = intern(&mut out, &mut queue, p2, q2);
                out.delta[from].insert(e, to);
            }
        }
    }
    Ok(out)
}

/// Erases from `s` every event outside `keep`.
pub fn natural_projection(s: &[EventId], keep: &BTreeSet<EventId>) -> Word {
    s.iter().copied().filter(|e| keep.contains(e)).collect()
}

fn event_map(from: &EventTable, to: &EventTable) -> Result<Vec<EventId>> {
    if !from.same_events(to) {
        return Err(Error::Model("automata must share the same event table".into()));
    }
    Ok(from.ids().map(|e| to.id(from.name(e)).expect("same events")).collect())
}

/// Decides whether `L_m(k)` is controllable with respect to `g`, i.e.
/// `prefix(L_m(k))·Σ_uc ∩ L(g) ⊆ prefix(L_m(k))`.
///
/// `L_m(k) ⊆ L_m(g)` is checked during the traversal; a violation is a model
/// error.
pub fn is_controllable(k: &Automaton, g: &Automaton) -> Result<bool> {
    let map = event_map(&k.events, &g.events)?;
    let k = k.trim();
    let Some(k0) = k.initial else { return Ok(true) };
    let g0 = g
        .initial
        .ok_or_else(|| Error::Model("supervised language is not contained in L_m(G)".into()))?;
    let mut seen = HashMap::new();
    let mut stack = vec![(k0, g0)];
    seen.insert((k0, g0), ());
    let mut controllable = true;
    while let Some((p, x)) = stack.pop() {
        if k.marked[p] && !g.marked[x] {
            return Err(Error::Model(format!(
                "state `{}` is marked but plant state `{}` is not: L_m(K) ⊄ L_m(G)",
                k.names[p], g.names[x]
            )));
        }
        for (e, p2) in k.outgoing(p) {
            let x2 = g.successor(x, map[e]).ok_or_else(|| {
                Error::Model(format!(
                    "event `{}` at `{}` is not enabled by the plant: L_m(K) ⊄ L(G)",
                    k.events.name(e),
                    k.names[p]
                ))
            })?;
            if seen.insert((p2, x2), ()).is_none() {
                stack.push((p2, x2));
            }
        }
        for (ge, _) in g.outgoing(x) {
            if !g.events.is_controllable(ge) {
                let ke = k.events.id(g.events.name(ge)).expect("same events");
                if k.successor(p, ke).is_none() {
                    controllable = false;
                }
            }
        }
    }
    Ok(controllable)
}

/// All marked strings of length at most `max_len`, ordered lexicographically
/// by event index.
pub fn enumerate_language(a: &Automaton, max_len: usize) -> FiniteLanguage {
    let mut out = FiniteLanguage::new();
    let Some(x0) = a.initial else { return out };
    let mut stack: Vec<(StateId, Word)> = vec![(x0, Vec::new())];
    while let Some((x, w)) = stack.pop() {
        if a.marked[x] {
            out.insert(w.clone());
        }
        if w.len() < max_len {
            for (e, y) in a.outgoing(x) {
                let mut w2 = w.clone();
                w2.push(e);
                stack.push((y, w2));
            }
        }
    }
    out
}

/// Decides `L_m(a) = L_m(b)` by a synchronized traversal of both automata
/// completed with an implicit dead state.
pub fn language_equivalent(a: &Automaton, b: &Automaton) -> Result<bool> {
    let map = event_map(&a.events, &b.events)?;
    let a = a.trim();
    let b = b.trim();
    let mut seen = BTreeSet::new();
    let mut stack = vec![(a.initial, b.initial)];
    seen.insert((a.initial, b.initial));
    while let Some((p, q)) = stack.pop() {
        let mp = p.map(|p| a.marked[p]).unwrap_or(false);
        let mq = q.map(|q| b.marked[q]).unwrap_or(false);
        if mp != mq {
            return Ok(false);
        }
        for e in a.events.ids() {
            let p2 = p.and_then(|p| a.successor(p, e));
            let q2 = q.and_then(|q| b.successor(q, map[e]));
            if (p2.is_some() || q2.is_some()) && seen.insert((p2, q2)) {
                stack.push((p2, q2));
            }
        }
    }
    Ok(true)
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "automaton: {} states, {} transitions", self.num_states(), self.num_transitions())?;
        for (x, e, y) in self.transitions() {
            writeln!(f, "  {} --{}--> {}", self.names[x], self.events.name(e), self.names[y])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn table(spec: &[(&str, bool)]) -> EventTable {
        EventTable::new(spec.iter().map(|&(n, c)| Event::new(n, c)).collect()).unwrap()
    }

    fn single(events: &[(&str, bool)], word: &[&str]) -> Automaton {
        let t = table(events);
        let w: Word = word.iter().map(|n| t.id(n).unwrap()).collect();
        Automaton::from_words(t, [&w])
    }

    fn names(a: &Automaton, l: &FiniteLanguage) -> Vec<String> {
        l.iter().map(|w| a.event_table().word_names(w).concat()).collect()
    }

    #[test]
    fn event_table_rejects_duplicates_and_blanks() {
        assert!(EventTable::new(vec![Event::new("a", true), Event::new("a", false)]).is_err());
        assert!(EventTable::new(vec![Event::new("", true)]).is_err());
    }

    #[test]
    fn nondeterminism_is_rejected() {
        let mut a = Automaton::new(table(&[("a", true)]));
        let x = a.add_state("x", false);
        let y = a.add_state("y", false);
        let z = a.add_state("z", false);
        a.add_transition(x, 0, y).unwrap();
        a.add_transition(x, 0, y).unwrap();
        assert!(a.add_transition(x, 0, z).is_err());
    }

    #[test]
    fn product_of_disjoint_alphabets_is_shuffle() {
        let a = single(&[("x", true)], &["x"]);
        let b = single(&[("y", true)], &["y"]);
        let p = sync_product(&a, &b).unwrap();
        assert_eq!(names(&p, &enumerate_language(&p, 4)), vec!["xy", "yx"]);
    }

    #[test]
    fn product_is_idempotent() {
        let g = fixtures::serial().plant.automaton().clone();
        let p = sync_product(&g, &g).unwrap();
        assert!(language_equivalent(&p, &g).unwrap());
    }

    #[test]
    fn product_synchronizes_shared_events() {
        let a = single(&[("x", true), ("y", true)], &["x", "y"]);
        let b = single(&[("y", true)], &["y"]);
        let p = sync_product(&a, &b).unwrap();
        assert_eq!(names(&p, &enumerate_language(&p, 4)), vec!["xy"]);
    }

    #[test]
    fn product_rejects_conflicting_tags() {
        let a = single(&[("x", true)], &["x"]);
        let b = single(&[("x", false)], &["x"]);
        assert!(matches!(sync_product(&a, &b), Err(Error::Model(_))));
    }

    #[test]
    fn projection_examples() {
        let t = table(&[("a", true), ("b", true), ("c", true), ("d", true)]);
        let s = t.parse_word("a b c d").unwrap();
        let keep: BTreeSet<_> = [t.id("a").unwrap(), t.id("c").unwrap()].into();
        assert_eq!(t.format_word(&natural_projection(&s, &keep)), "a c");
        let all: BTreeSet<_> = t.ids().collect();
        assert_eq!(natural_projection(&s, &all), s);
        assert!(natural_projection(&[], &keep).is_empty());
        assert!(natural_projection(&s, &BTreeSet::new()).is_empty());
    }

    #[test]
    fn trim_drops_dead_branch() {
        let mut g = fixtures::serial().plant.automaton().clone();
        let mut events = g.event_table().events().to_vec();
        events.push(Event::new("c", true));
        let mut ext = Automaton::new(EventTable::new(events).unwrap());
        for x in g.states() {
            ext.add_state(g.state_name(x), g.is_marked(x));
        }
        for (x, e, y) in g.transitions() {
            ext.add_transition(x, e, y).unwrap();
        }
        ext.set_initial(g.initial().unwrap()).unwrap();
        let x3 = ext.add_state("x3", false);
        ext.add_transition(1, 2, x3).unwrap();
        let t = ext.trim();
        assert_eq!(t.num_states(), 3);
        assert_eq!(t.num_transitions(), 2);
        assert!(language_equivalent(&t, &ext).unwrap());
        // already trim: fixpoint
        g = g.trim();
        assert_eq!(g.trim(), g);
    }

    #[test]
    fn trim_removes_unreachable_marked_component() {
        let mut a = Automaton::new(table(&[("a", true), ("b", true)]));
        let x0 = a.add_state("x0", false);
        let x1 = a.add_state("x1", true);
        let y0 = a.add_state("y0", true);
        let y1 = a.add_state("y1", true);
        a.set_initial(x0).unwrap();
        a.add_transition(x0, 0, x1).unwrap();
        a.add_transition(y0, 1, y1).unwrap();
        let t = a.trim();
        assert_eq!(t.num_states(), 2);
        assert_eq!(enumerate_language(&t, 5), enumerate_language(&a, 5));
        assert_eq!(names(&t, &enumerate_language(&t, 5)), vec!["a"]);
    }

    #[test]
    fn empty_trim() {
        let mut a = Automaton::new(table(&[("a", true)]));
        let x = a.add_state("x", false);
        a.set_initial(x).unwrap();
        let t = a.trim();
        assert!(t.is_empty());
        assert_eq!(t.num_states(), 0);
        assert!(enumerate_language(&t, 3).is_empty());
    }

    #[test]
    fn controllability_examples() {
        let g = fixtures::serial().plant.automaton().clone();
        let ab = Automaton::from_words(g.event_table().clone(), [&vec![0, 1]]);
        assert!(is_controllable(&ab, &g).unwrap());
        assert!(is_controllable(&g, &g).unwrap());

        let g2 = fixtures::serial_with_uncontrollable_escape();
        let ab2 = Automaton::from_words(g2.event_table().clone(), [&vec![0, 1]]);
        assert!(!is_controllable(&ab2, &g2).unwrap());
        // g2 blocks after `a c`, so its own marked language escapes
        assert!(!is_controllable(&g2, &g2).unwrap());
        let uc = fixtures::uc_tree();
        assert!(is_controllable(&uc, &uc).unwrap());
    }

    #[test]
    fn controllability_checks_containment() {
        let g = fixtures::serial().plant.automaton().clone();
        let ba = Automaton::from_words(g.event_table().clone(), [&vec![1, 0]]);
        assert!(matches!(is_controllable(&ba, &g), Err(Error::Model(_))));
        let a_only = Automaton::from_words(g.event_table().clone(), [&vec![0]]);
        assert!(matches!(is_controllable(&a_only, &g), Err(Error::Model(_))));
    }

    #[test]
    fn enumerate_examples() {
        let g = fixtures::serial().plant.automaton().clone();
        assert_eq!(names(&g, &enumerate_language(&g, 2)), vec!["ab"]);
        assert!(enumerate_language(&g, 1).is_empty());
        let uc = fixtures::uc_tree();
        assert_eq!(names(&uc, &enumerate_language(&uc, 2)), vec!["u1", "u2c1", "u2c2"]);
    }

    #[test]
    fn state_kinds() {
        let uc = fixtures::uc_tree();
        let x0 = uc.initial().unwrap();
        assert_eq!(uc.state_kind(x0), StateKind::Uncontrollable);
        let q2 = uc.successor(x0, uc.event_table().id("u2").unwrap()).unwrap();
        assert_eq!(uc.state_kind(q2), StateKind::Controllable);
        let q1 = uc.successor(x0, uc.event_table().id("u1").unwrap()).unwrap();
        assert_eq!(uc.state_kind(q1), StateKind::Terminal);
    }

    #[test]
    fn acyclicity() {
        let g = fixtures::serial().plant.automaton().clone();
        assert!(g.is_acyclic());
        let mut c = Automaton::new(table(&[("a", true)]));
        let x = c.add_state("x", true);
        c.set_initial(x).unwrap();
        c.add_transition(x, 0, x).unwrap();
        assert!(!c.is_acyclic());
    }
}
