//! Heuristic forward search over ground problems.

mod heuristic;
mod search;

pub use heuristic::{heuristic_value, HeuristicKind, Objective, Relaxation};
pub use search::{minimize_plan, plan, Plan, PlanStatus, PlanStep, SearchConfig, SearchOutcome, SearchStats, Strategy};
