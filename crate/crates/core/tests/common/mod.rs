//! Random instance generators and brute-force reference implementations
//! shared by the integration tests and the acceptance run.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use supctl_core::automaton::{enumerate_language, Automaton, Event, EventId, EventTable, Word};
use supctl_core::jobs::{JobSet, JobSpec};
use supctl_core::rational::{int, Rational};
use supctl_core::timed::{closed_exclusion, TimedPlant, Transition, TransitionId};
use supctl_core::FiniteLanguage;

pub use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn table(rng: &mut ChaCha8Rng, n: usize, uc_prob: f64) -> EventTable {
    let names = ["a", "b", "c", "d", "e", "f"];
    EventTable::new(
        (0..n)
            .map(|i| Event::new(names[i], !rng.gen_bool(uc_prob)))
            .collect(),
    )
    .expect("distinct names")
}

/// Random exclusion pairs keeping the resource count `|Σ| + pairs` at most
/// `max_resources`.
pub fn exclusion(rng: &mut ChaCha8Rng, t: &EventTable, max_resources: usize) -> BTreeSet<(EventId, EventId)> {
    let mut all: Vec<(EventId, EventId)> = Vec::new();
    for a in t.ids() {
        for b in t.ids().filter(|&b| b > a) {
            all.push((a, b));
        }
    }
    all.shuffle(rng);
    let budget = max_resources.saturating_sub(t.len());
    let k = rng.gen_range(0..=budget.min(all.len()));
    closed_exclusion(t, &all[..k])
}

fn durations(rng: &mut ChaCha8Rng, g: &Automaton, max: i64, halves: bool) -> BTreeMap<Transition, Rational> {
    g.transitions()
        .map(|(from, event, _)| {
            let d = if halves {
                Rational::new(rng.gen_range(1..=2 * max) as i128, 2)
            } else {
                int(rng.gen_range(1..=max))
            };
            (Transition { from, event }, d)
        })
        .collect()
}

/// Dense random automaton, possibly cyclic, with at most 6 resources.
pub fn cyclic_plant(rng: &mut ChaCha8Rng) -> TimedPlant {
    let n_ev = rng.gen_range(1..=4);
    let t = table(rng, n_ev, 0.3);
    let n_st = rng.gen_range(1..=4);
    let mut g = Automaton::new(t.clone());
    for i in 0..n_st {
        g.add_state(format!("x{i}"), rng.gen_bool(0.5));
    }
    g.set_initial(0).unwrap();
    for x in 0..n_st {
        for e in t.ids() {
            if rng.gen_bool(0.7) {
                g.add_transition(x, e, rng.gen_range(0..n_st)).unwrap();
            }
        }
    }
    let d = durations(rng, &g, 4, true);
    let h = exclusion(rng, &t, 6);
    TimedPlant::new(g, &d, h).expect("valid plant")
}

/// Random walk of at most `max_len` steps from the initial state.
pub fn walk(rng: &mut ChaCha8Rng, g: &Automaton, max_len: usize) -> Word {
    let mut w = Vec::new();
    let Some(mut x) = g.initial() else { return w };
    let len = rng.gen_range(0..=max_len);
    while w.len() < len {
        let out: Vec<_> = g.outgoing(x).collect();
        let Some(&(e, y)) = out.choose(rng) else { break };
        w.push(e);
        x = y;
    }
    w
}

/// Random deterministic tree: leaves marked, inner nodes marked with a small
/// probability. Returns `None` when it has more than `max_marked` marked
/// strings or none at all.
pub fn tree(rng: &mut ChaCha8Rng, t: &EventTable, depth: usize, max_marked: usize) -> Option<Automaton> {
    let mut g = Automaton::new(t.clone());
    let root = g.add_state("n0", false);
    g.set_initial(root).unwrap();
    let mut stack = vec![(root, 0usize)];
    let mut marked = 0;
    while let Some((x, d)) = stack.pop() {
        let k = if d >= depth {
            0
        } else if d == 0 {
            rng.gen_range(1..=2)
        } else {
            rng.gen_range(0..=2)
        };
        let mut evs: Vec<EventId> = t.ids().collect();
        evs.shuffle(rng);
        for &e in evs.iter().take(k) {
            let y = g.add_state(format!("n{}", g.num_states()), false);
            g.add_transition(x, e, y).unwrap();
            stack.push((y, d + 1));
        }
        if k == 0 || rng.gen_bool(0.15) {
            g.set_marked(x, true);
            marked += 1;
        }
    }
    (marked <= max_marked).then_some(g)
}

pub fn tree_plant(rng: &mut ChaCha8Rng, n_ev: usize, depth: usize, max_marked: usize, uc_prob: f64) -> TimedPlant {
    loop {
        let t = table(rng, n_ev, uc_prob);
        if let Some(g) = tree(rng, &t, depth, max_marked) {
            let d = durations(rng, &g, 3, false);
            let h = exclusion(rng, &t, t.len() + 3);
            return TimedPlant::new(g, &d, h).expect("valid plant");
        }
    }
}

pub fn marked_strings(g: &Automaton) -> Vec<Word> {
    enumerate_language(g, g.num_states() + 1).iter().cloned().collect()
}

/// Partitions the events into `n_jobs` alphabets. Each job language is the
/// projection of a random subset of the plant's marked strings; deadlines
/// are drawn up to the longest unconstrained execution time.
pub fn jobs(rng: &mut ChaCha8Rng, plant: &TimedPlant, n_jobs: usize, logic_prob: f64) -> JobSet {
    let t = plant.events();
    let n_jobs = n_jobs.clamp(1, t.len());
    let mut evs: Vec<EventId> = t.ids().collect();
    evs.shuffle(rng);
    let mut alphabets = vec![BTreeSet::new(); n_jobs];
    for (i, &e) in evs.iter().enumerate() {
        let j = if i < n_jobs { i } else { rng.gen_range(0..n_jobs) };
        alphabets[j].insert(e);
    }
    let words = marked_strings(plant.automaton());
    let horizon = words
        .iter()
        .map(|w| contour_times(plant, w, &[], &BTreeMap::new()).0)
        .max()
        .unwrap_or(int(1))
        .max(int(1));
    let hmax = horizon.ceil().to_integer() as i64;
    let specs = alphabets
        .into_iter()
        .enumerate()
        .map(|(i, alpha)| {
            let local = EventTable::new(
                alpha
                    .iter()
                    .map(|&e| Event::new(t.name(e), t.is_controllable(e)))
                    .collect(),
            )
            .unwrap();
            let mut chosen: Vec<Word> = words.iter().filter(|_| rng.gen_bool(0.7)).cloned().collect();
            if chosen.is_empty() {
                if let Some(w) = words.choose(rng) {
                    chosen.push(w.clone());
                }
            }
            let projected: BTreeSet<Word> = chosen
                .iter()
                .map(|w| {
                    w.iter()
                        .filter(|e| alpha.contains(e))
                        .map(|&e| local.id(t.name(e)).unwrap())
                        .collect()
                })
                .collect();
            let lang = Automaton::from_words(local, &projected);
            let d = int(rng.gen_range(1..=hmax + 1));
            JobSpec::new(format!("job{}", i + 1), t, alpha, lang, d).unwrap()
        })
        .collect();
    let logic = rng.gen_bool(logic_prob).then(|| {
        let keep: Vec<Word> = words.iter().filter(|_| rng.gen_bool(0.7)).cloned().collect();
        Automaton::from_words(t.clone(), &keep)
    });
    JobSet::new(t, specs, logic).unwrap()
}

/// Independent contour evaluation: returns `(υ(s), t_i(s) per job index in
/// `job_alphabets`)`. `delays` adds to transition durations.
pub fn contour_times(
    plant: &TimedPlant,
    s: &[EventId],
    job_alphabets: &[&BTreeSet<EventId>],
    delays: &BTreeMap<TransitionId, Rational>,
) -> (Rational, Vec<Rational>) {
    let h = plant.exclusion();
    let resources: Vec<(EventId, EventId)> = h.iter().copied().filter(|&(a, b)| a <= b).collect();
    let mut height = vec![int(0); resources.len()];
    let mut times = vec![int(0); job_alphabets.len()];
    let g = plant.automaton();
    let mut x = g.initial().expect("initial state");
    for &e in s {
        let id = plant.transition_id(Transition { from: x, event: e }).expect("string in L(G)");
        let dur = plant.duration(id) + delays.get(&id).copied().unwrap_or(int(0));
        let occ: Vec<usize> = (0..resources.len())
            .filter(|&r| resources[r].0 == e || resources[r].1 == e)
            .collect();
        let start = occ.iter().map(|&r| height[r]).max().unwrap_or(int(0));
        for v in height.iter_mut() {
            *v = (*v).max(start);
        }
        for &r in &occ {
            height[r] = start + dur;
        }
        let top = height.iter().copied().max().unwrap_or(int(0));
        for (i, a) in job_alphabets.iter().enumerate() {
            if a.contains(&e) {
                times[i] = top;
            }
        }
        x = g.successor(x, e).unwrap();
    }
    (height.into_iter().max().unwrap_or(int(0)), times)
}

pub fn alphabets(jobs: &JobSet) -> Vec<&BTreeSet<EventId>> {
    jobs.jobs().iter().map(|j| j.alphabet()).collect()
}

/// Strings of `L_m(G)` accepted by the logic requirement and every job
/// language, meeting the deadlines of the jobs not in `relaxed`.
pub fn admissible(plant: &TimedPlant, jobs: &JobSet, relaxed: &BTreeSet<usize>) -> Vec<Word> {
    let alpha = alphabets(jobs);
    marked_strings(plant.automaton())
        .into_iter()
        .filter(|w| jobs.logic().is_none_or(|l| l.accepts(w)))
        .filter(|w| jobs.jobs().iter().all(|j| j.completed_by(w)))
        .filter(|w| {
            let (_, t) = contour_times(plant, w, &alpha, &BTreeMap::new());
            (0..jobs.len()).all(|i| relaxed.contains(&i) || t[i] <= jobs.job(i).deadline())
        })
        .collect()
}

fn prefixes(k: &[&Word]) -> BTreeSet<Word> {
    let mut p = BTreeSet::new();
    for w in k {
        for n in 0..=w.len() {
            p.insert(w[..n].to_vec());
        }
    }
    p
}

/// `K̄ Σ_uc ∩ L(G) ⊆ K̄`.
pub fn controllable(k: &[&Word], g: &Automaton) -> bool {
    let closure = prefixes(k);
    closure.iter().all(|p| {
        let Some(x) = g.run(p) else { return false };
        g.outgoing(x)
            .filter(|&(e, _)| !g.event_table().is_controllable(e))
            .all(|(e, _)| {
                let mut q = p.clone();
                q.push(e);
                closure.contains(&q)
            })
    })
}

fn subsets<T: Clone>(items: &[T]) -> impl Iterator<Item = Vec<T>> + '_ {
    (0u32..(1 << items.len())).map(move |m| {
        (0..items.len())
            .filter(|i| m & (1 << i) != 0)
            .map(|i| items[i].clone())
            .collect()
    })
}

/// Union of every controllable subset of `w`.
pub fn brute_supremal(w: &[Word], g: &Automaton) -> BTreeSet<Word> {
    let mut sup = BTreeSet::new();
    for s in subsets(w) {
        let refs: Vec<&Word> = s.iter().collect();
        if controllable(&refs, g) {
            sup.extend(s);
        }
    }
    sup
}

/// Minimal nonempty controllable sublanguages of `k` with respect to `g`.
pub fn brute_minimal(k: &[Word], g: &Automaton) -> BTreeSet<BTreeSet<Word>> {
    let ctrl: Vec<BTreeSet<Word>> = subsets(k)
        .filter(|s| !s.is_empty())
        .filter(|s| controllable(&s.iter().collect::<Vec<_>>(), g))
        .map(|s| s.into_iter().collect())
        .collect();
    ctrl.iter()
        .filter(|s| !ctrl.iter().any(|o| o != *s && o.is_subset(s)))
        .cloned()
        .collect()
}

/// Minimal job sets whose relaxation leaves a nonempty supremal language,
/// by evaluating every subset.
pub fn brute_relaxations(plant: &TimedPlant, jobs: &JobSet) -> Vec<BTreeSet<usize>> {
    let n = jobs.len();
    let ok: Vec<BTreeSet<usize>> = subsets(&(0..n).collect::<Vec<_>>())
        .map(|s| s.into_iter().collect::<BTreeSet<usize>>())
        .filter(|s| !brute_supremal(&admissible(plant, jobs, s), plant.automaton()).is_empty())
        .collect();
    let mut min: Vec<BTreeSet<usize>> = ok
        .iter()
        .filter(|s| !ok.iter().any(|o| o != *s && o.is_subset(s)))
        .cloned()
        .collect();
    min.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    min
}

pub fn language(words: impl IntoIterator<Item = Word>) -> FiniteLanguage {
    let mut l = FiniteLanguage::new();
    for w in words {
        l.insert(w);
    }
    l
}

/// Grid search for `min_D max_{s∈L} e_{f+D}(s)` over `vars`, each in
/// `{0, 1/16, …, bound}`. Returns `None` when no grid point is feasible.
pub fn grid_min_earliness(
    plant: &TimedPlant,
    jobs: &JobSet,
    l: &[Word],
    vars: &[TransitionId],
    bound: i64,
) -> Option<Rational> {
    let alpha = alphabets(jobs);
    let steps = 16 * bound;
    let mut best: Option<Rational> = None;
    let mut idx = vec![0i64; vars.len()];
    loop {
        let delays: BTreeMap<TransitionId, Rational> = vars
            .iter()
            .zip(&idx)
            .map(|(&v, &k)| (v, Rational::new(k as i128, 16)))
            .collect();
        let mut worst = Some(int(0));
        for w in l {
            let (_, t) = contour_times(plant, w, &alpha, &delays);
            let mut e = int(0);
            for (i, ti) in t.iter().enumerate() {
                let d = jobs.job(i).deadline();
                if *ti > d {
                    worst = None;
                    break;
                }
                e += d - *ti;
            }
            match worst {
                None => break,
                Some(ref mut m) => *m = (*m).max(e),
            }
        }
        if let Some(e) = worst {
            best = Some(best.map_or(e, |b: Rational| b.min(e)));
        }
        let mut i = 0;
        loop {
            if i == idx.len() {
                return best;
            }
            idx[i] += 1;
            if idx[i] <= steps {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}
