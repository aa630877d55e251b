//! Small reference instances used by tests, benches and the CLI.

use std::collections::{BTreeMap, BTreeSet};

use crate::automaton::{sync_product, Automaton, Event, EventTable};
use crate::jobs::{JobSet, JobSpec};
use crate::rational::{int, parse_rational, Rational};
use crate::timed::{closed_exclusion, TimedPlant};

#[derive(Debug, Clone)]
pub struct Fixture {
    pub plant: TimedPlant,
    pub jobs: JobSet,
}

fn table(spec: &[(&str, bool)]) -> EventTable {
    EventTable::new(spec.iter().map(|&(n, c)| Event::new(n, c)).collect()).expect("valid table")
}

/// Builds an automaton from `(from, event, to)` triples over named states;
/// the first listed state is initial.
pub fn automaton(
    events: &EventTable,
    states: &[(&str, bool)],
    transitions: &[(&str, &str, &str)],
) -> Automaton {
    let mut a = Automaton::new(events.clone());
    for &(name, marked) in states {
        a.add_state(name, marked);
    }
    if !states.is_empty() {
        a.set_initial(0).expect("initial");
    }
    for &(from, ev, to) in transitions {
        let x = a.state_id(from).expect("known state");
        let y = a.state_id(to).expect("known state");
        let e = events.id(ev).expect("known event");
        a.add_transition(x, e, y).expect("deterministic");
    }
    a
}

/// A job whose language is the given list of words (space separated).
pub fn job(plant_events: &EventTable, name: &str, alphabet: &[&str], words: &[&str], deadline: Rational) -> JobSpec {
    let local = EventTable::new(
        alphabet
            .iter()
            .map(|n| {
                let id = plant_events.id(n).expect("known event");
                Event::new(*n, plant_events.is_controllable(id))
            })
            .collect(),
    )
    .expect("valid alphabet");
    let ws: Vec<_> = words.iter().map(|w| local.parse_word(w).expect("word over alphabet")).collect();
    let lang = Automaton::from_words(local, &ws);
    let ids: BTreeSet<_> = alphabet.iter().map(|n| plant_events.id(n).expect("known event")).collect();
    JobSpec::new(name, plant_events, ids, lang, deadline).expect("valid job")
}

pub fn jobs_for(plant: &TimedPlant, specs: &[(&str, &[&str], &[&str], i64)]) -> JobSet {
    let jobs = specs
        .iter()
        .map(|&(name, alphabet, words, d)| job(plant.events(), name, alphabet, words, int(d)))
        .collect();
    JobSet::new(plant.events(), jobs, None).expect("valid job set")
}

fn timed(g: Automaton, durations: &[(&str, i64)], pairs: &[(&str, &str)]) -> TimedPlant {
    let d: Vec<(&str, Rational)> = durations.iter().map(|&(n, v)| (n, int(v))).collect();
    timed_q(g, &d, pairs)
}

fn timed_q(g: Automaton, durations: &[(&str, Rational)], pairs: &[(&str, &str)]) -> TimedPlant {
    let t = g.event_table().clone();
    let d: BTreeMap<_, _> = durations.iter().map(|&(n, v)| (t.id(n).expect("event"), v)).collect();
    let p: Vec<_> = pairs
        .iter()
        .map(|&(a, b)| (t.id(a).expect("event"), t.id(b).expect("event")))
        .collect();
    TimedPlant::with_event_durations(g, &d, closed_exclusion(&t, &p)).expect("valid plant")
}

fn serial_with(b_controllable: bool, pairs: &[(&str, &str)]) -> Fixture {
    let t = table(&[("a", true), ("b", b_controllable)]);
    let g = automaton(
        &t,
        &[("x0", false), ("x1", false), ("x2", true)],
        &[("x0", "a", "x1"), ("x1", "b", "x2")],
    );
    let plant = timed(g, &[("a", 2), ("b", 3)], pairs);
    let jobs = jobs_for(&plant, &[("job1", &["a"], &["a"], 4), ("job2", &["b"], &["b"], 6)]);
    Fixture { plant, jobs }
}

/// `x0 -a-> x1 -b-> x2`, `a` controllable (2), `b` uncontrollable (3),
/// mutually exclusive; jobs `({a}, 4)`, `({b}, 6)`.
pub fn serial() -> Fixture {
    serial_with(false, &[("a", "b")])
}

/// As [`serial`] with `a` and `b` independent.
pub fn parallel() -> Fixture {
    serial_with(false, &[])
}

/// As [`serial`] with `b` controllable.
pub fn serial_all_controllable() -> Fixture {
    serial_with(true, &[("a", "b")])
}

/// Serial plant plus an uncontrollable `c` from `x1` into a dead state.
pub fn serial_with_uncontrollable_escape() -> Automaton {
    let t = table(&[("a", true), ("b", false), ("c", false)]);
    automaton(
        &t,
        &[("x0", false), ("x1", false), ("x2", true), ("x3", false)],
        &[("x0", "a", "x1"), ("x1", "b", "x2"), ("x1", "c", "x3")],
    )
}

/// `q0 -u1-> q1`, `q0 -u2-> q2 -c1-> q3`, `q2 -c2-> q4`; leaves marked.
pub fn uc_tree() -> Automaton {
    let t = table(&[("u1", false), ("u2", false), ("c1", true), ("c2", true)]);
    automaton(
        &t,
        &[("q0", false), ("q1", true), ("q2", false), ("q3", true), ("q4", true)],
        &[("q0", "u1", "q1"), ("q0", "u2", "q2"), ("q2", "c1", "q3"), ("q2", "c2", "q4")],
    )
}

/// [`uc_tree`] as a timed plant with unit durations, one job per event class.
pub fn uc_plant() -> Fixture {
    let g = uc_tree();
    let plant = timed(g, &[("u1", 1), ("u2", 2), ("c1", 3), ("c2", 1)], &[("u2", "c1"), ("u2", "c2")]);
    let jobs = jobs_for(
        &plant,
        &[
            ("up", &["u1", "u2"], &["u1", "u2"], 3),
            ("down", &["c1", "c2"], &["", "c1", "c2"], 4),
        ],
    );
    Fixture { plant, jobs }
}

/// Chain `a b c d`, all controllable, unit durations, fully serialized;
/// jobs over `{a, c}` and `{b, d}`.
pub fn chain4() -> Fixture {
    let t = table(&[("a", true), ("b", true), ("c", true), ("d", true)]);
    let g = automaton(
        &t,
        &[("x0", false), ("x1", false), ("x2", false), ("x3", false), ("x4", true)],
        &[("x0", "a", "x1"), ("x1", "b", "x2"), ("x2", "c", "x3"), ("x3", "d", "x4")],
    );
    let all = ["a", "b", "c", "d"];
    let pairs: Vec<(&str, &str)> = all.iter().flat_map(|&x| all.iter().map(move |&y| (x, y))).collect();
    let plant = timed(g, &[("a", 1), ("b", 1), ("c", 1), ("d", 1)], &pairs);
    let jobs = jobs_for(&plant, &[("job1", &["a", "c"], &["a c"], 10), ("job2", &["b", "d"], &["b d"], 10)]);
    Fixture { plant, jobs }
}

/// `x0 -a-> x1`, `x1 -b-> x1`, `x1` marked; job2 accepts `b*`. Dropping
/// job2's deadline leaves an infinite language.
pub fn cyclic_relax() -> Fixture {
    let t = table(&[("a", true), ("b", true)]);
    let g = automaton(&t, &[("x0", false), ("x1", true)], &[("x0", "a", "x1"), ("x1", "b", "x1")]);
    let plant = timed(g, &[("a", 2), ("b", 3)], &[]);
    let job1 = job(plant.events(), "job1", &["a"], &["a"], int(2));
    let local = table(&[("b", true)]);
    let star = automaton(&local, &[("y", true)], &[("y", "b", "y")]);
    let job2 = JobSpec::new("job2", plant.events(), [1].into(), star, int(3)).expect("valid job");
    let jobs = JobSet::new(plant.events(), vec![job1, job2], None).expect("valid job set");
    Fixture { plant, jobs }
}

/// `x0 -a-> x1 -c-> x2 -b-> x3`, independent events `a` (3), `c` (1),
/// `b` (2); jobs `({b}, 3)` and `({a, c}, 1)`. Without job2's deadline, `b`
/// ends at `t = 3`, exactly on time, after an untracked `c`.
pub fn untracked_gap() -> Fixture {
    let t = table(&[("a", true), ("b", true), ("c", true)]);
    let g = automaton(
        &t,
        &[("x0", false), ("x1", false), ("x2", false), ("x3", true)],
        &[("x0", "a", "x1"), ("x1", "c", "x2"), ("x2", "b", "x3")],
    );
    let plant = timed(g, &[("a", 3), ("b", 2), ("c", 1)], &[]);
    let jobs = jobs_for(&plant, &[("job1", &["b"], &["b"], 3), ("job2", &["a", "c"], &["a c"], 1)]);
    Fixture { plant, jobs }
}

/// [`serial`] with a logic requirement that only admits `b a`.
pub fn logic_conflict() -> Fixture {
    let fx = serial();
    let t = fx.plant.events().clone();
    let logic = Automaton::from_words(t.clone(), &[t.parse_word("b a").expect("word")]);
    let jobs = JobSet::new(fx.plant.events(), fx.jobs.jobs().to_vec(), Some(logic)).expect("valid job set");
    Fixture { plant: fx.plant, jobs }
}

/// Event durations of the job-shop instance.
pub const SHOP_DURATIONS: [(&str, &str); 16] = [
    ("r_pickA_IO", "2.2"),
    ("r_dropA_M1", "1.2"),
    ("m1_A", "5.6"),
    ("r_pickA_M1", "1"),
    ("r_dropA_M2", "1"),
    ("m2_A", "2"),
    ("r_pickA_M2", "1"),
    ("r_dropA_IO", "1"),
    ("r_pickB_IO", "0.2"),
    ("r_dropB_M1", "0.2"),
    ("m1_B", "0.2"),
    ("r_pickB_M1", "0.2"),
    ("r_dropB_M2", "0.2"),
    ("m2_B", "3.4"),
    ("r_pickB_M2", "4.2"),
    ("r_dropB_IO", "0.2"),
];

pub const SHOP_ROUTE_A: [&str; 8] = [
    "r_pickA_IO",
    "r_dropA_M1",
    "m1_A",
    "r_pickA_M1",
    "r_dropA_M2",
    "m2_A",
    "r_pickA_M2",
    "r_dropA_IO",
];

pub const SHOP_ROUTE_B: [&str; 8] = [
    "r_pickB_IO",
    "r_dropB_M1",
    "m1_B",
    "r_pickB_M1",
    "r_dropB_M2",
    "m2_B",
    "r_pickB_M2",
    "r_dropB_IO",
];

/// Two-machine job shop: a robot moves products A and B from the I/O buffer
/// through M1 and M2 and back. All events are controllable. Robot events
/// exclude each other, as do the events of each machine.
pub fn job_shop() -> Fixture {
    let d: Vec<(&str, Rational)> = SHOP_DURATIONS
        .iter()
        .map(|&(n, v)| (n, parse_rational(v).expect("decimal duration")))
        .collect();
    job_shop_with(&d, (20, 12))
}

pub fn job_shop_with(durations: &[(&str, Rational)], deadlines: (i64, i64)) -> Fixture {
    let names: Vec<&str> = SHOP_ROUTE_A.iter().chain(&SHOP_ROUTE_B).copied().collect();
    let all = table(&names.iter().map(|&n| (n, true)).collect::<Vec<_>>());
    let sub = |pred: &dyn Fn(&str) -> bool| -> EventTable {
        table(&names.iter().filter(|n| pred(n)).map(|&n| (n, true)).collect::<Vec<_>>())
    };
    let robot_t = sub(&|n| n.starts_with("r_"));
    let m1_t = sub(&|n| n.ends_with("_M1") || n.starts_with("m1_"));
    let m2_t = sub(&|n| n.ends_with("_M2") || n.starts_with("m2_"));

    let mut robot_states = vec![("empty", true)];
    let mut robot_tr = Vec::new();
    let legs = [("IO", "M1"), ("M1", "M2"), ("M2", "IO")];
    let holding: Vec<String> = ["A", "B"]
        .iter()
        .flat_map(|p| legs.iter().map(move |(f, t)| format!("hold{p}_{f}_{t}")))
        .collect();
    for h in &holding {
        robot_states.push((h.as_str(), false));
    }
    let picks: Vec<(String, String, String)> = ["A", "B"]
        .iter()
        .flat_map(|p| {
            legs.iter()
                .map(move |(f, t)| (format!("r_pick{p}_{f}"), format!("hold{p}_{f}_{t}"), format!("r_drop{p}_{t}")))
        })
        .collect();
    for (pick, hold, drop) in &picks {
        robot_tr.push(("empty", pick.as_str(), hold.as_str()));
        robot_tr.push((hold.as_str(), drop.as_str(), "empty"));
    }
    let robot = automaton(&robot_t, &robot_states, &robot_tr);

    let machine = |t: &EventTable, m: &str| {
        let s: Vec<String> = ["A", "B"]
            .iter()
            .flat_map(|p| [format!("loaded{p}"), format!("done{p}")])
            .collect();
        let mut states = vec![("idle", true)];
        states.extend(s.iter().map(|x| (x.as_str(), false)));
        let ev: Vec<(String, String, String)> = ["A", "B"]
            .iter()
            .flat_map(|p| {
                [
                    ("idle".to_string(), format!("r_drop{p}_{}", m.to_uppercase()), format!("loaded{p}")),
                    (format!("loaded{p}"), format!("{m}_{p}"), format!("done{p}")),
                    (format!("done{p}"), format!("r_pick{p}_{}", m.to_uppercase()), "idle".to_string()),
                ]
            })
            .collect();
        let tr: Vec<(&str, &str, &str)> = ev.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
        automaton(t, &states, &tr)
    };
    let m1 = machine(&m1_t, "m1");
    let m2 = machine(&m2_t, "m2");
    let g = sync_product(&sync_product(&robot, &m1).expect("product"), &m2).expect("product");
    let g = g.reindexed(&all).expect("same events");

    let mut pairs = Vec::new();
    for group in [&robot_t, &m1_t, &m2_t] {
        for a in group.events() {
            for b in group.events() {
                pairs.push((a.name.clone(), b.name.clone()));
            }
        }
    }
    let pairs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let plant = timed_q(g, durations, &pairs);
    let route = |r: &[&str]| r.join(" ");
    let jobs = jobs_for(
        &plant,
        &[
            ("J1", &SHOP_ROUTE_A, &[&route(&SHOP_ROUTE_A)], deadlines.0),
            ("J2", &SHOP_ROUTE_B, &[&route(&SHOP_ROUTE_B)], deadlines.1),
        ],
    );
    Fixture { plant, jobs }
}
