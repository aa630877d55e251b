//! Minimal controllable sublanguages of a finite controllable language.

use std::collections::BTreeSet;

use crate::automaton::{is_controllable, Automaton, EventTable, FiniteLanguage, StateId, StateKind};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_MEMBERS: usize = 100_000;

/// A finite set of finite languages, ordered and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LanguageFamily {
    members: BTreeSet<FiniteLanguage>,
}

impl LanguageFamily {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{{ε}}`
    pub fn epsilon() -> Self {
        LanguageFamily {
            members: [FiniteLanguage::singleton(Vec::new())].into(),
        }
    }

    pub fn members(&self) -> &BTreeSet<FiniteLanguage> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FiniteLanguage> {
        self.members.iter()
    }

    pub fn insert(&mut self, l: FiniteLanguage) -> bool {
        self.members.insert(l)
    }

    /// `aℒ = {aL | L ∈ ℒ}`
    pub fn prepend(&self, a: usize) -> Self {
        self.members.iter().map(|l| l.prepend(a)).collect()
    }

    /// `ℒ₁ ∪ ℒ₂` as a union of families.
    pub fn union(&self, other: &Self) -> Self {
        self.members.union(&other.members).cloned().collect()
    }

    /// `ℒ₁ ⊔ ℒ₂ = {L₁ ∪ L₂ | L₁ ∈ ℒ₁, L₂ ∈ ℒ₂}`
    pub fn join(&self, other: &Self, cap: usize) -> Result<Self> {
        let mut out = LanguageFamily::new();
        for a in &self.members {
            for b in &other.members {
                out.insert(a.union(b));
                if out.len() > cap {
                    return Err(Error::Limit(format!("language family exceeds {cap} members")));
                }
            }
        }
        Ok(out)
    }

    /// Pairs of members where one contains the other.
    pub fn incomparability_violations(&self) -> Vec<(FiniteLanguage, FiniteLanguage)> {
        let v: Vec<&FiniteLanguage> = self.members.iter().collect();
        let mut out = Vec::new();
        for i in 0..v.len() {
            for j in 0..v.len() {
                if i != j && v[i].is_subset(v[j]) {
                    out.push((v[i].clone(), v[j].clone()));
                }
            }
        }
        out
    }

    pub fn to_names(&self, table: &EventTable) -> Vec<Vec<String>> {
        self.members
            .iter()
            .map(|l| l.iter().map(|w| table.format_word(w)).collect())
            .collect()
    }
}

impl FromIterator<FiniteLanguage> for LanguageFamily {
    fn from_iter<T: IntoIterator<Item = FiniteLanguage>>(iter: T) -> Self {
        LanguageFamily {
            members: iter.into_iter().collect(),
        }
    }
}

/// Drops the controllable transitions out of states that also have
/// uncontrollable ones, then trims.
pub fn preprocess_mixed(tree: &Automaton) -> Automaton {
    let mut out = Automaton::new(tree.event_table().clone());
    for x in tree.states() {
        out.add_state(tree.state_name(x), tree.is_marked(x));
    }
    if let Some(x0) = tree.initial() {
        out.set_initial(x0).expect("state exists");
    }
    for (x, e, y) in tree.transitions() {
        if tree.state_kind(x) == StateKind::Mixed && tree.event_table().is_controllable(e) {
            continue;
        }
        out.add_transition(x, e, y).expect("deterministic");
    }
    out.trim()
}

pub fn cl_of(tree: &Automaton, g: &Automaton) -> Result<LanguageFamily> {
    cl_of_capped(tree, g, DEFAULT_MAX_MEMBERS)
}

/// `CL(K)` for `K = L_m(tree)`, evaluated bottom-up with one value per state.
pub fn cl_of_capped(tree: &Automaton, g: &Automaton, cap: usize) -> Result<LanguageFamily> {
    let k = tree.trim();
    if k.is_empty() {
        return Err(Error::Contract("CL(K) requires a nonempty K".into()));
    }
    if !k.is_acyclic() {
        return Err(Error::Contract("CL(K) requires a finite K".into()));
    }
    if !is_controllable(&k, g)? {
        return Err(Error::Contract("K is not controllable".into()));
    }
    let mut memo: Vec<Option<LanguageFamily>> = vec![None; k.num_states()];
    for x in postorder(&k) {
        let value = family_at(&k, x, &memo, cap)?;
        memo[x] = Some(value);
    }
    Ok(memo[k.initial().expect("nonempty")].take().expect("evaluated"))
}

fn family_at(k: &Automaton, x: StateId, memo: &[Option<LanguageFamily>], cap: usize) -> Result<LanguageFamily> {
    let branch = |e: usize, y: StateId| memo[y].as_ref().expect("children first").prepend(e);
    match k.state_kind(x) {
        StateKind::Terminal => Ok(LanguageFamily::epsilon()),
        StateKind::Controllable => {
            let mut acc = if k.is_marked(x) {
                LanguageFamily::epsilon()
            } else {
                LanguageFamily::new()
            };
            for (e, y) in k.outgoing(x) {
                acc = acc.union(&branch(e, y));
                if acc.len() > cap {
                    return Err(Error::Limit(format!("language family exceeds {cap} members")));
                }
            }
            Ok(acc)
        }
        StateKind::Uncontrollable => {
            let mut acc: Option<LanguageFamily> = None;
            for (e, y) in k.outgoing(x) {
                let b = branch(e, y);
                acc = Some(match acc {
                    None => b,
                    Some(a) => a.join(&b, cap)?,
                });
            }
            Ok(acc.expect("has branches"))
        }
        StateKind::Mixed => Err(Error::Contract(format!(
            "state `{}` mixes controllable and uncontrollable exits; preprocess first",
            k.state_name(x)
        ))),
    }
}

fn postorder(a: &Automaton) -> Vec<StateId> {
    let mut seen = vec![false; a.num_states()];
    let mut order = Vec::with_capacity(a.num_states());
    let Some(x0) = a.initial() else { return order };
    let mut stack = vec![(x0, false)];
    while let Some((x, done)) = stack.pop() {
        if done {
            order.push(x);
            continue;
        }
        if seen[x] {
            continue;
        }
        seen[x] = true;
        stack.push((x, true));
        for (_, y) in a.outgoing(x) {
            if !seen[y] {
                stack.push((y, false));
            }
        }
    }
    order
}

/// `CL(K)` with mixed states handled first.
pub fn minimal_sublanguages(tree: &Automaton, g: &Automaton) -> Result<LanguageFamily> {
    cl_of(&preprocess_mixed(tree), g)
}
