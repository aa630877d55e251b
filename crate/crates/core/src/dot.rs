//! Graphviz rendering. Controllable edges are solid, uncontrollable dashed;
//! marked states are double circles.

use std::fmt::Write;

use crate::automaton::Automaton;
use crate::rational::format_rational;
use crate::synthesis::AlignedAutomaton;
use crate::timed::{TimedPlant, Transition};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn render(a: &Automaton, name: &str, label: impl Fn(usize, usize) -> String) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(name));
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  __start [shape=point];");
    for x in a.states() {
        let shape = if a.is_marked(x) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  s{x} [label={}, shape={shape}];", quote(a.state_name(x)));
    }
    if let Some(x0) = a.initial() {
        let _ = writeln!(out, "  __start -> s{x0};");
    }
    let t = a.event_table();
    for (x, e, y) in a.transitions() {
        let style = if t.is_controllable(e) { "solid" } else { "dashed" };
        let _ = writeln!(out, "  s{x} -> s{y} [label={}, style={style}];", quote(&label(x, e)));
    }
    out.push_str("}\n");
    out
}

/// Plain automaton; edges carry event names.
pub fn automaton_dot(a: &Automaton, name: &str) -> String {
    render(a, name, |_, e| a.event_table().name(e).to_string())
}

/// Plant with durations as `event / f(x, σ)` edge labels.
pub fn plant_dot(p: &TimedPlant, name: &str) -> String {
    let g = p.automaton();
    render(g, name, |x, e| {
        let d = p
            .transition_id(Transition { from: x, event: e })
            .map(|id| format_rational(&p.duration(id)))
            .unwrap_or_default();
        format!("{} / {}", g.event_table().name(e), d)
    })
}

/// Supervisor aligned with a plant: durations are looked up through the
/// plant state of each supervisor state.
pub fn supervisor_dot(s: &AlignedAutomaton, p: &TimedPlant, name: &str) -> String {
    let a = &s.automaton;
    render(a, name, |x, e| {
        let d = p
            .transition_id(Transition { from: s.plant_state[x], event: e })
            .map(|id| format_rational(&p.duration(id)))
            .unwrap_or_default();
        format!("{} / {}", a.event_table().name(e), d)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn serial_plant_renders_durations() {
        let f = fixtures::serial();
        let dot = plant_dot(&f.plant, "G");
        assert!(dot.starts_with("digraph \"G\" {"));
        assert!(dot.contains("label=\"a / 2\""));
        assert!(dot.contains("label=\"b / 3\""));
        assert!(dot.contains("doublecircle"));
        assert!(dot.trim_end().ends_with('}'));
    }

    #[test]
    fn uncontrollable_edges_are_dashed() {
        let a = fixtures::uc_tree();
        let dot = automaton_dot(&a, "T");
        let t = a.event_table();
        for line in dot.lines().filter(|l| l.contains(" -> s")) {
            let uc = t.uncontrollable().any(|e| line.contains(&format!("label=\"{}\"", t.name(e))));
            assert_eq!(line.contains("dashed"), uc, "{line}");
        }
    }

    #[test]
    fn names_are_escaped() {
        assert_eq!(quote("a\"b"), "\"a\\\"b\"");
    }
}
