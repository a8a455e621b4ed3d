//! Joint planning and scheduling of pipelined data workflows onto a
//! distributed resource graph, as a numeric planning problem.
//!
//! Pipeline: [`config`] parses a document into a [`model::ProblemInstance`];
//! [`grounding`] instantiates the domain's actions; [`planner`] searches;
//! [`validator`] replays the plan; [`pddl`] writes and reads PDDL 2.1 files;
//! [`report`] renders DOT and CSV output.

pub mod benchgen;
pub mod config;
pub mod grounding;
pub mod model;
pub mod pddl;
pub mod pipeline;
pub mod planner;
pub mod rational;
pub mod report;
pub mod units;
pub mod validator;

pub use rational::Q;
