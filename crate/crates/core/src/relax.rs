//! Minimal sets of jobs whose deadlines must be dropped.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jobs::JobSet;
use crate::synthesis::{sup_cr, sup_deadline_free};
use crate::timed::{DurationValuation, ResourceModel, TimedPlant};

pub const DEFAULT_MAX_JOBS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupervisorSummary {
    pub states: usize,
    pub transitions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxationReport {
    /// Antichain of job-index sets, ordered by size then lexicographically.
    pub minimal_sets: Vec<BTreeSet<usize>>,
    pub summaries: Vec<SupervisorSummary>,
    /// Set when even dropping every deadline leaves nothing.
    pub infeasible: bool,
    /// Number of `sup_cr` evaluations performed.
    pub evaluated: usize,
}

impl RelaxationReport {
    pub fn named_sets(&self, jobs: &JobSet) -> Vec<Vec<String>> {
        self.minimal_sets
            .iter()
            .map(|s| s.iter().map(|&i| jobs.job(i).name().to_string()).collect())
            .collect()
    }
}

pub fn minimal_relaxations(
    plant: &TimedPlant,
    rm: &ResourceModel,
    jobs: &JobSet,
    val: DurationValuation<'_>,
) -> Result<RelaxationReport> {
    minimal_relaxations_capped(plant, rm, jobs, val, DEFAULT_MAX_JOBS)
}

/// Walks the subset lattice level by level from `∅`, skipping supersets of
/// sets already found.
pub fn minimal_relaxations_capped(
    plant: &TimedPlant,
    rm: &ResourceModel,
    jobs: &JobSet,
    val: DurationValuation<'_>,
    max_jobs: usize,
) -> Result<RelaxationReport> {
    let n = jobs.len();
    if n > max_jobs {
        return Err(Error::Limit(format!(
            "{n} jobs exceed the relaxation cap of {max_jobs}; raise it explicitly"
        )));
    }
    if sup_deadline_free(plant, jobs)?.is_empty() {
        return Ok(RelaxationReport {
            minimal_sets: Vec::new(),
            summaries: Vec::new(),
            infeasible: true,
            evaluated: 0,
        });
    }
    let mut found: Vec<(u64, BTreeSet<usize>, SupervisorSummary)> = Vec::new();
    let mut memo: BTreeMap<u64, Option<SupervisorSummary>> = BTreeMap::new();
    for k in 0..=n {
        let level: Vec<BTreeSet<usize>> = (0..n)
            .combinations(k)
            .map(|c| c.into_iter().collect::<BTreeSet<usize>>())
            .filter(|s| {
                let m = mask(s);
                !found.iter().any(|(f, _, _)| f & m == *f)
            })
            .collect();
        let results = level
            .par_iter()
            .map(|s| {
                let r = sup_cr(plant, rm, jobs, s, val)?;
                Ok((!r.is_empty()).then(|| SupervisorSummary {
                    states: r.automaton().num_states(),
                    transitions: r.automaton().num_transitions(),
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        for (s, r) in level.into_iter().zip(results) {
            memo.insert(mask(&s), r);
            if let Some(summary) = r {
                found.push((mask(&s), s, summary));
            }
        }
    }
    Ok(RelaxationReport {
        minimal_sets: found.iter().map(|f| f.1.clone()).collect(),
        summaries: found.iter().map(|f| f.2).collect(),
        infeasible: found.is_empty(),
        evaluated: memo.len(),
    })
}

fn mask(s: &BTreeSet<usize>) -> u64 {
    s.iter().fold(0, |m, &i| m | (1 << i))
}

/// True when no member contains another.
pub fn is_antichain(sets: &[BTreeSet<usize>]) -> bool {
    sets.iter()
        .enumerate()
        .all(|(i, a)| sets.iter().enumerate().all(|(j, b)| i == j || !a.is_subset(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::int;
    use crate::timed::derive_resources;

    #[test]
    fn feasible_instance_needs_nothing() {
        let fx = fixtures::serial();
        let rm = derive_resources(&fx.plant).unwrap();
        let r = minimal_relaxations(&fx.plant, &rm, &fx.jobs, DurationValuation::base(&fx.plant)).unwrap();
        assert_eq!(r.minimal_sets, vec![BTreeSet::new()]);
        assert!(!r.infeasible);
        assert_eq!(r.evaluated, 1);
    }

    #[test]
    fn serial_tight_relaxes_job2() {
        let fx = fixtures::serial();
        let rm = derive_resources(&fx.plant).unwrap();
        let tight = fx.jobs.with_deadlines(&[int(4), int(4)]).unwrap();
        let r = minimal_relaxations(&fx.plant, &rm, &tight, DurationValuation::base(&fx.plant)).unwrap();
        assert_eq!(r.named_sets(&tight), vec![vec!["job2".to_string()]]);
        assert!(is_antichain(&r.minimal_sets));
    }

    #[test]
    fn logic_conflict_is_infeasible() {
        let fx = fixtures::logic_conflict();
        let rm = derive_resources(&fx.plant).unwrap();
        let r = minimal_relaxations(&fx.plant, &rm, &fx.jobs, DurationValuation::base(&fx.plant)).unwrap();
        assert!(r.infeasible);
        assert!(r.minimal_sets.is_empty());
    }

    #[test]
    fn job_cap() {
        let fx = fixtures::serial();
        let rm = derive_resources(&fx.plant).unwrap();
        assert!(matches!(
            minimal_relaxations_capped(&fx.plant, &rm, &fx.jobs, DurationValuation::base(&fx.plant), 1),
            Err(Error::Limit(_))
        ));
    }

    #[test]
    fn antichain_check() {
        let a: BTreeSet<usize> = [0].into();
        let b: BTreeSet<usize> = [0, 1].into();
        let c: BTreeSet<usize> = [1].into();
        assert!(!is_antichain(&[a.clone(), b]));
        assert!(is_antichain(&[a, c]));
    }
}
