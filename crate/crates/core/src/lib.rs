//! Supervisory control of time-weighted automata with job deadlines.
//!
//! The crate covers timing of strings under resource exclusion, synthesis of
//! supervisors meeting per-job deadlines, minimal controllable
//! sublanguages, optimal delay insertion and deadline relaxation.

pub mod automaton;
pub mod delayopt;
pub mod dot;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod jobs;
pub mod lp;
pub mod maxplus;
pub mod minlang;
pub mod rational;
pub mod relax;
pub mod synthesis;
pub mod timed;

pub use automaton::{Automaton, Event, EventId, EventTable, FiniteLanguage, StateId, Word};
pub use delayopt::{DelayOptions, DelayVector, OptimalDelayReport, SolveMode};
pub use error::{Error, Result};
pub use jobs::{JobSet, JobSpec};
pub use minlang::LanguageFamily;
pub use rational::Rational;
pub use relax::RelaxationReport;
pub use synthesis::SynthesisResult;
pub use timed::{derive_resources, DurationValuation, ResourceModel, TimedPlant, Transition, TransitionId};
