//! Fuzzy cognitive maps: sigmoid activation dynamics, run classification,
//! the consonance factor and genetic-algorithm weight learning.

mod ga;
mod map;
mod transitions;

pub use ga::{ga_learn, GaConfig, GaOutcome};
pub use map::{consonance, event_encode, run, step, ConceptMap, Event, FcmForecast, FcmRunResult, FcmState, RunClass};
pub use transitions::TransitionData;
