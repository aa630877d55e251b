//! Supremal controllable job-satisfaction sublanguages.
//!
//! [`sup_c`] builds the annotated job tree (every string of
//! `L_m(G) ∩ E ∩ ‖E_i` whose job times stay within the deadlines) and then
//! removes uncontrollable escapes with [`supcon_finite`]. [`sup_cr`] handles
//! relaxed deadlines, where the result may be an infinite language.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::automaton::{enumerate_language, Automaton, EventId, EventTable, FiniteLanguage, StateId, Word};
use crate::error::{Error, Result};
use crate::jobs::{earliness_string, job_times, JobSet};
use crate::rational::Rational;
use crate::timed::{Contour, DurationValuation, ResourceModel, TimedPlant};

/// Default cap on the number of nodes of a job tree or of the deadline
/// tracker built during relaxed synthesis.
pub const DEFAULT_MAX_NODES: usize = 2_000_000;

/// An automaton whose states each carry the plant state they correspond to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedAutomaton {
    pub automaton: Automaton,
    pub plant_state: Vec<StateId>,
}

impl AlignedAutomaton {
    pub fn is_empty(&self) -> bool {
        self.automaton.is_empty()
    }

    fn check_alignment(&self, g: &Automaton) -> Result<()> {
        let a = &self.automaton;
        let misaligned = |what: String| Err(Error::Model(format!("misaligned plant annotation: {what}")));
        if self.plant_state.len() != a.num_states() {
            return misaligned("one plant state per state is required".into());
        }
        if !a.event_table().same_events(g.event_table()) || a.event_table() != g.event_table() {
            return misaligned("event tables differ".into());
        }
        if let Some(q0) = a.initial() {
            if Some(self.plant_state[q0]) != g.initial() {
                return misaligned("initial state is not over the plant's initial state".into());
            }
        }
        for (q, e, q2) in a.transitions() {
            if self.plant_state[q] >= g.num_states() {
                return misaligned(format!("state {q} refers to a missing plant state"));
            }
            if g.successor(self.plant_state[q], e) != Some(self.plant_state[q2]) {
                return misaligned(format!(
                    "transition `{}` from `{}` does not follow the plant",
                    a.event_table().name(e),
                    a.state_name(q)
                ));
            }
        }
        Ok(())
    }

    fn restrict(&self, keep: &[bool]) -> AlignedAutomaton {
        let (automaton, map) = self.automaton.restrict(keep);
        let mut plant_state = vec![0; automaton.num_states()];
        for (old, new) in map.iter().enumerate() {
            if let Some(n) = new {
                plant_state[*n] = self.plant_state[old];
            }
        }
        AlignedAutomaton { automaton, plant_state }
    }

    pub fn trim(&self) -> AlignedAutomaton {
        let r = self.automaton.reachable();
        let c = self.automaton.coreachable();
        let keep: Vec<bool> = (0..r.len()).map(|x| r[x] && c[x]).collect();
        self.restrict(&keep)
    }
}

/// A node of the job tree, annotated along the unique string `s` reaching it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedNode {
    pub parent: Option<(usize, EventId)>,
    pub children: Vec<(EventId, usize)>,
    pub plant_state: StateId,
    pub logic_state: Option<StateId>,
    pub job_states: Vec<StateId>,
    /// The row vector `1ᵗ M̂(s)`, i.e. the heap contour after `s`.
    pub contour: Contour,
    /// `υ(s)`
    pub elapsed: Rational,
    pub job_times: Vec<Rational>,
    pub marked: bool,
}

impl AnnotatedNode {
    fn violates(&self, jobs: &JobSet) -> bool {
        self.job_times.iter().zip(jobs.jobs()).any(|(t, j)| *t > j.deadline())
    }
}

/// Trim, tree-shaped automaton of `L_m(G) ∩ E ∩ W_f(E_T)`, node 0 the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobTree {
    nodes: Vec<AnnotatedNode>,
}

impl JobTree {
    pub fn nodes(&self) -> &[AnnotatedNode] {
        &self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn word(&self, mut n: usize) -> Word {
        let mut w = Vec::new();
        while let Some((p, e)) = self.nodes[n].parent {
            w.push(e);
            n = p;
        }
        w.reverse();
        w
    }

    pub fn to_aligned(&self, events: &EventTable) -> AlignedAutomaton {
        let mut a = Automaton::new(events.clone());
        for (n, node) in self.nodes.iter().enumerate() {
            a.add_state(events.format_word(&self.word(n)), node.marked);
        }
        for (n, node) in self.nodes.iter().enumerate() {
            for &(e, c) in &node.children {
                a.add_transition(n, e, c).expect("tree is deterministic");
            }
        }
        if !self.nodes.is_empty() {
            a.set_initial(0).expect("root exists");
        }
        AlignedAutomaton {
            automaton: a,
            plant_state: self.nodes.iter().map(|n| n.plant_state).collect(),
        }
    }
}

pub fn build_job_tree(
    plant: &TimedPlant,
    rm: &ResourceModel,
    jobs: &JobSet,
    val: DurationValuation<'_>,
) -> Result<JobTree> {
    build_job_tree_capped(plant, rm, jobs, val, DEFAULT_MAX_NODES)
}

/// Breadth-first construction of the annotated job tree. A node whose job
/// times exceed a deadline (`t_i > d_i`) is kept but not expanded; the tree
/// is trimmed at the end.
pub fn build_job_tree_capped(
    plant: &TimedPlant,
    rm: &ResourceModel,
    jobs: &JobSet,
    val: DurationValuation<'_>,
    max_nodes: usize,
) -> Result<JobTree> {
    let g = plant.automaton();
    let table = plant.events();
    let covered: BTreeSet<EventId> = jobs.jobs().iter().flat_map(|j| j.alphabet().iter().copied()).collect();
    if covered.len() != table.len() {
        return Err(Error::Model("job alphabets do not cover Σ".into()));
    }
    let Some(x0) = g.initial() else {
        return Ok(JobTree { nodes: Vec::new() });
    };
    let logic0 = match jobs.logic() {
        Some(l) => match l.initial() {
            Some(q) => Some(q),
            None => return Ok(JobTree { nodes: Vec::new() }),
        },
        None => None,
    };
    let Some(job0) = jobs.jobs().iter().map(|j| j.initial()).collect::<Option<Vec<_>>>() else {
        return Ok(JobTree { nodes: Vec::new() });
    };
    let zero = Rational::from_integer(0);
    let mut nodes = vec![AnnotatedNode {
        parent: None,
        children: Vec::new(),
        plant_state: x0,
        logic_state: logic0,
        job_states: job0,
        contour: Contour::new(rm.len()),
        elapsed: zero,
        job_times: vec![zero; jobs.len()],
        marked: false,
    }];
    nodes[0].marked = is_accepting(g, jobs, &nodes[0]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        if nodes[n].violates(jobs) {
            continue;
        }
        for e in table.ids() {
            let node = &nodes[n];
            let Some(x2) = g.successor(node.plant_state, e) else { continue };
            let logic2 = match (jobs.logic(), node.logic_state) {
                (Some(l), Some(q)) => match l.successor(q, e) {
                    Some(q2) => Some(q2),
                    None => continue,
                },
                _ => None,
            };
            let Some(js2) = jobs
                .jobs()
                .iter()
                .zip(&node.job_states)
                .map(|(j, &q)| j.step(q, e))
                .collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            let tid = plant
                .transition_id(crate::timed::Transition {
                    from: node.plant_state,
                    event: e,
                })
                .expect("plant transition");
            let mut contour = node.contour.clone();
            contour.place(rm.occupancy(e), val.duration(tid));
            let elapsed = contour.height();
            let times: Vec<Rational> = jobs
                .jobs()
                .iter()
                .zip(&node.job_times)
                .map(|(j, t)| if j.contains_event(e) { elapsed } else { *t })
                .collect();
            let mut child = AnnotatedNode {
                parent: Some((n, e)),
                children: Vec::new(),
                plant_state: x2,
                logic_state: logic2,
                job_states: js2,
                contour,
                elapsed,
                job_times: times,
                marked: false,
            };
            child.marked = is_accepting(g, jobs, &child) && !child.violates(jobs);
            let id = nodes.len();
            if id >= max_nodes {
                return Err(Error::Limit(format!("job tree exceeds {max_nodes} nodes")));
            }
            nodes.push(child);
            nodes[n].children.push((e, id));
            queue.push_back(id);
        }
    }
    Ok(JobTree { nodes: trim_tree(nodes) })
}

fn is_accepting(g: &Automaton, jobs: &JobSet, node: &AnnotatedNode) -> bool {
    g.is_marked(node.plant_state)
        && match (jobs.logic(), node.logic_state) {
            (Some(l), Some(q)) => l.is_marked(q),
            _ => true,
        }
        && jobs.jobs().iter().zip(&node.job_states).all(|(j, &q)| j.accepting(q))
}

/// Keeps the nodes with a marked descendant (children always follow their
/// parent in BFS order).
fn trim_tree(nodes: Vec<AnnotatedNode>) -> Vec<AnnotatedNode> {
    let mut live = vec![false; nodes.len()];
    for n in (0..nodes.len()).rev() {
        live[n] = nodes[n].marked || nodes[n].children.iter().any(|&(_, c)| live[c]);
    }
    if nodes.is_empty() || !live[0] {
        return Vec::new();
    }
    let mut map = vec![usize::MAX; nodes.len()];
    let mut out: Vec<AnnotatedNode> = Vec::new();
    for (n, node) in nodes.into_iter().enumerate() {
        if !live[n] {
            continue;
        }
        map[n] = out.len();
        let mut node = node;
        node.parent = node.parent.map(|(p, e)| (map[p], e));
        node.children.retain(|&(_, c)| live[c]);
        out.push(node);
    }
    for node in out.iter_mut() {
        for c in node.children.iter_mut() {
            c.1 = map[c.1];
        }
    }
    out
}

/// Supremal controllable sublanguage of `L_m(spec)` with respect to `g`.
///
/// Each spec state must carry the plant state it sits over. States where the
/// plant enables an uncontrollable event that the spec does not follow are
/// removed, the result trimmed, and the two steps repeated until stable.
/// Cyclic specs are fine.
pub fn supcon_finite(spec: &AlignedAutomaton, g: &Automaton) -> Result<AlignedAutomaton> {
    spec.check_alignment(g)?;
    let a = &spec.automaton;
    let table = g.event_table();
    let unc: Vec<EventId> = table.uncontrollable().collect();
    let mut keep = vec![true; a.num_states()];
    loop {
        let reach = reachable_within(a, &keep);
        let coreach = coreachable_within(a, &keep);
        let mut changed = false;
        for x in a.states() {
            if keep[x] && !(reach[x] && coreach[x]) {
                keep[x] = false;
                changed = true;
            }
        }
        let mut bad = Vec::new();
        for x in a.states().filter(|&x| keep[x]) {
            let px = spec.plant_state[x];
            let escapes = unc.iter().any(|&u| {
                g.successor(px, u).is_some() && a.successor(x, u).map(|y| !keep[y]).unwrap_or(true)
            });
            if escapes {
                bad.push(x);
            }
        }
        for x in bad {
            keep[x] = false;
            changed = true;
        }
        if !changed {
            break;
        }
    }
    Ok(spec.restrict(&keep))
}

fn reachable_within(a: &Automaton, keep: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; a.num_states()];
    let Some(x0) = a.initial().filter(|&x| keep[x]) else { return seen };
    seen[x0] = true;
    let mut stack = vec![x0];
    while let Some(x) = stack.pop() {
        for (_, y) in a.outgoing(x) {
            if keep[y] && !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

fn coreachable_within(a: &Automaton, keep: &[bool]) -> Vec<bool> {
    let n = a.num_states();
    let mut preds = vec![Vec::new(); n];
    for (x, _, y) in a.transitions() {
        if keep[x] && keep[y] {
            preds[y].push(x);
        }
    }
    let mut seen: Vec<bool> = (0..n).map(|x| keep[x] && a.is_marked(x)).collect();
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

/// Per-string summary of a finite supervisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringReport {
    pub word: Word,
    pub job_times: Vec<Rational>,
    /// `None` when some job misses its deadline (possible for relaxed jobs).
    pub earliness: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisResult {
    pub supervisor: AlignedAutomaton,
    /// The marked language, when finite.
    pub language: Option<FiniteLanguage>,
    /// One entry per string of `language`, in the same order.
    pub strings: Vec<StringReport>,
}

impl SynthesisResult {
    fn from_supervisor(
        supervisor: AlignedAutomaton,
        plant: &TimedPlant,
        rm: &ResourceModel,
        jobs: &JobSet,
        val: DurationValuation<'_>,
    ) -> Result<Self> {
        let a = &supervisor.automaton;
        let (language, strings) = if a.is_acyclic() {
            let lang = enumerate_language(a, a.num_states());
            let mut strings = Vec::with_capacity(lang.len());
            for w in lang.iter() {
                let times = job_times(plant, rm, jobs, w, val)?;
                let earliness = earliness_string(jobs, &times).ok();
                strings.push(StringReport {
                    word: w.clone(),
                    job_times: times,
                    earliness,
                });
            }
            (Some(lang), strings)
        } else {
            (None, Vec::new())
        };
        Ok(SynthesisResult {
            supervisor,
            language,
            strings,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.supervisor.is_empty()
    }

    /// The supervisor as a plain automaton.
    pub fn automaton(&self) -> &Automaton {
        &self.supervisor.automaton
    }
}

/// `supC(G, f, h, E, E_T)` under the given durations.
pub fn sup_c(plant: &TimedPlant, rm: &ResourceModel, jobs: &JobSet, val: DurationValuation<'_>) -> Result<SynthesisResult> {
    let tree = build_job_tree(plant, rm, jobs, val)?;
    let spec = tree.to_aligned(plant.events());
    let k = supcon_finite(&spec, plant.automaton())?;
    SynthesisResult::from_supervisor(k, plant, rm, jobs, val)
}

/// Trim product `G × E × (E_i)_{i∈I}` recognizing `L_m(G) ∩ E ∩ ‖_i E_i`.
pub fn requirement_product(plant: &TimedPlant, jobs: &JobSet) -> AlignedAutomaton {
    type Key = (StateId, Option<StateId>, Vec<StateId>);
    let g = plant.automaton();
    let table = plant.events();
    let mut a = Automaton::new(table.clone());
    let mut plant_state = Vec::new();
    let start: Option<Key> = (|| {
        let x0 = g.initial()?;
        let l0 = match jobs.logic() {
            Some(l) => Some(l.initial()?),
            None => None,
        };
        let j0 = jobs.jobs().iter().map(|j| j.initial()).collect::<Option<Vec<_>>>()?;
        Some((x0, l0, j0))
    })();
    let Some(start) = start else {
        return AlignedAutomaton { automaton: a, plant_state };
    };
    let accepting = |k: &Key| {
        g.is_marked(k.0)
            && match (jobs.logic(), k.1) {
                (Some(l), Some(q)) => l.is_marked(q),
                _ => true,
            }
            && jobs.jobs().iter().zip(&k.2).all(|(j, &q)| j.accepting(q))
    };
    let mut ids: HashMap<Key, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let root = a.add_state(g.state_name(start.0), accepting(&start));
    plant_state.push(start.0);
    ids.insert(start.clone(), root);
    queue.push_back(start);
    a.set_initial(root).expect("root");
    while let Some(k) = queue.pop_front() {
        let from = ids[&k];
        for e in table.ids() {
            let Some(x2) = g.successor(k.0, e) else { continue };
            let l2 = match (jobs.logic(), k.1) {
                (Some(l), Some(q)) => match l.successor(q, e) {
                    Some(q2) => Some(q2),
                    None => continue,
                },
                _ => None,
            };
            let Some(j2) = jobs.jobs().iter().zip(&k.2).map(|(j, &q)| j.step(q, e)).collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            let key = (x2, l2, j2);
            let to = match ids.get(&key) {
                Some(&id) => id,
                None => {
                    let id = a.add_state(format!("{}#{}", g.state_name(x2), ids.len()), accepting(&key));
                    plant_state.push(x2);
                    ids.insert(key.clone(), id);
                    queue.push_back(key);
                    id
                }
            };
            a.add_transition(from, e, to).expect("deterministic");
        }
    }
    AlignedAutomaton { automaton: a, plant_state }.trim()
}

/// Finite automaton over `Σ` accepting the strings that meet the deadlines of
/// the tracked jobs `J = I − I₁`.
///
/// It is the tree of plant strings annotated with the contour and the job
/// times of `J`. Once `υ(s) > d_i` for every tracked job no tracked event can
/// meet its deadline any more, so the node only gets a self-loop on every
/// event outside `∪_{i∈J} Σ_i`. A node with some
/// `t_i > d_i` is not expanded. Marked iff every tracked job is complete and
/// within its deadline.
pub fn deadline_tracker(
    plant: &TimedPlant,
    rm: &ResourceModel,
    jobs: &JobSet,
    relaxed: &BTreeSet<usize>,
    val: DurationValuation<'_>,
    max_nodes: usize,
) -> Result<Automaton> {
    struct Node {
        plant_state: StateId,
        contour: Contour,
        elapsed: Rational,
        times: Vec<Rational>,
        states: Vec<StateId>,
    }
    let g = plant.automaton();
    let table = plant.events();
    let tracked: Vec<usize> = (0..jobs.len()).filter(|i| !relaxed.contains(i)).collect();
    let tracked_events: BTreeSet<EventId> = tracked
        .iter()
        .flat_map(|&i| jobs.job(i).alphabet().iter().copied())
        .collect();
    let mut a = Automaton::new(table.clone());
    let Some(x0) = g.initial() else { return Ok(a) };
    let Some(j0) = tracked.iter().map(|&i| jobs.job(i).initial()).collect::<Option<Vec<_>>>() else {
        return Ok(a);
    };
    let zero = Rational::from_integer(0);
    let within = |n: &Node| tracked.iter().zip(&n.times).all(|(&i, t)| *t <= jobs.job(i).deadline());
    let complete = |n: &Node| tracked.iter().zip(&n.states).all(|(&i, &q)| jobs.job(i).accepting(q));
    let frozen = |n: &Node| tracked.iter().all(|&i| n.elapsed > jobs.job(i).deadline());

    let mut nodes = vec![Node {
        plant_state: x0,
        contour: Contour::new(rm.len()),
        elapsed: zero,
        times: vec![zero; tracked.len()],
        states: j0,
    }];
    let root = a.add_state("ε", within(&nodes[0]) && complete(&nodes[0]));
    a.set_initial(root)?;
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        if !within(&nodes[n]) {
            continue;
        }
        let is_frozen = frozen(&nodes[n]);
        for e in table.ids() {
            if is_frozen {
                if !tracked_events.contains(&e) {
                    a.add_transition(n, e, n)?;
                }
                continue;
            }
            let node = &nodes[n];
            let Some(x2) = g.successor(node.plant_state, e) else { continue };
            let Some(states) = tracked
                .iter()
                .zip(&node.states)
                .map(|(&i, &q)| jobs.job(i).step(q, e))
                .collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            let tid = plant
                .transition_id(crate::timed::Transition {
                    from: node.plant_state,
                    event: e,
                })
                .expect("plant transition");
            let mut contour = node.contour.clone();
            contour.place(rm.occupancy(e), val.duration(tid));
            let elapsed = contour.height();
            let times = tracked
                .iter()
                .zip(&node.times)
                .map(|(&i, t)| if jobs.job(i).contains_event(e) { elapsed } else { *t })
                .collect();
            let child = Node {
                plant_state: x2,
                contour,
                elapsed,
                times,
                states,
            };
            if nodes.len() >= max_nodes {
                return Err(Error::Limit(format!("deadline tracker exceeds {max_nodes} nodes")));
            }
            let id = a.add_state(format!("q{}", nodes.len()), within(&child) && complete(&child));
            a.add_transition(n, e, id)?;
            nodes.push(child);
            queue.push_back(id);
        }
    }
    Ok(a)
}

/// Intersection of an aligned automaton with another automaton over the same
/// alphabet; plant states are inherited from the left operand.
fn intersect_aligned(left: &AlignedAutomaton, right: &Automaton) -> AlignedAutomaton {
    let l = &left.automaton;
    let mut a = Automaton::new(l.event_table().clone());
    let mut plant_state = Vec::new();
    let (Some(p0), Some(q0)) = (l.initial(), right.initial()) else {
        return AlignedAutomaton { automaton: a, plant_state };
    };
    let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let root = a.add_state(format!("{}|{}", l.state_name(p0), right.state_name(q0)), l.is_marked(p0) && right.is_marked(q0));
    plant_state.push(left.plant_state[p0]);
    ids.insert((p0, q0), root);
    queue.push_back((p0, q0));
    a.set_initial(root).expect("root");
    while let Some((p, q)) = queue.pop_front() {
        let from = ids[&(p, q)];
        for (e, p2) in l.outgoing(p) {
            let Some(q2) = right.successor(q, e) else { continue };
            let to = match ids.get(&(p2, q2)) {
                Some(&id) => id,
                None => {
                    let id = a.add_state(
                        format!("{}|{}", l.state_name(p2), right.state_name(q2)),
                        l.is_marked(p2) && right.is_marked(q2),
                    );
                    plant_state.push(left.plant_state[p2]);
                    ids.insert((p2, q2), id);
                    queue.push_back((p2, q2));
                    id
                }
            };
            a.add_transition(from, e, to).expect("deterministic");
        }
    }
    AlignedAutomaton { automaton: a, plant_state }.trim()
}

/// `supCR(I₁)`: the supremal controllable sublanguage when the deadlines of
/// the jobs in `relaxed` are dropped (their language requirements stay).
pub fn sup_cr(
    plant: &TimedPlant,
    rm: &ResourceModel,
    jobs: &JobSet,
    relaxed: &BTreeSet<usize>,
    val: DurationValuation<'_>,
) -> Result<SynthesisResult> {
    if let Some(&i) = relaxed.iter().find(|&&i| i >= jobs.len()) {
        return Err(Error::Contract(format!("relaxed job index {i} out of range")));
    }
    let gl = requirement_product(plant, jobs);
    let tracker = deadline_tracker(plant, rm, jobs, relaxed, val, DEFAULT_MAX_NODES)?;
    let h = intersect_aligned(&gl, &tracker);
    let k = supcon_finite(&h, plant.automaton())?;
    SynthesisResult::from_supervisor(k, plant, rm, jobs, val)
}

/// Supremal controllable sublanguage of `L_m(G) ∩ E ∩ ‖E_i`, ignoring every
/// deadline.
pub fn sup_deadline_free(plant: &TimedPlant, jobs: &JobSet) -> Result<AlignedAutomaton> {
    supcon_finite(&requirement_product(plant, jobs), plant.automaton())
}
