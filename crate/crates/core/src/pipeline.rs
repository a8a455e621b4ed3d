//! End-to-end runs: config, ground, prune, plan, validate, write artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use crate::config::load_config;
use crate::grounding::{ground, prune};
use crate::model::ProblemInstance;
use crate::pddl::{emit_domain, emit_problem, problem_name};
use crate::planner::{plan, Plan, PlanStatus, SearchConfig};
use crate::report::{metrics_csv, render_dot_instance, render_dot_report, report_text, Metrics};
use crate::validator::{emit_plan_text, validate_ground, PlanReport, PlanText};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNSOLVABLE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Solved,
    Unsolvable,
    BudgetExhausted,
    /// The planner's plan failed validation; an internal error.
    Invalid,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Solved => EXIT_OK,
            Verdict::Unsolvable => EXIT_UNSOLVABLE,
            Verdict::BudgetExhausted => EXIT_BUDGET,
            Verdict::Invalid => EXIT_INVALID,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Solved => "solved",
            Verdict::Unsolvable => "unsolvable",
            Verdict::BudgetExhausted => "budget-exhausted",
            Verdict::Invalid => "invalid",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub search: SearchConfig,
    pub prune: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { search: SearchConfig::default(), prune: true }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub verdict: Verdict,
    pub plan: Option<Plan>,
    pub report: Option<PlanReport>,
    pub metrics: Metrics,
    /// Why the run did not solve: relaxation witness or budget message.
    pub detail: Option<String>,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

/// Runs ground, prune, search and validation on an instance.
pub fn solve(inst: &ProblemInstance, opts: &PipelineOptions) -> PipelineRun {
    let t = Instant::now();
    let full = ground(inst);
    let ground_ms = ms(t);
    let t = Instant::now();
    let (problem, stats, witness) = if opts.prune {
        let out = prune(&full);
        (out.problem, out.stats, out.unsolvable)
    } else {
        (full.clone(), full.stats(), None)
    };
    let prune_ms = ms(t);
    let mut metrics = Metrics {
        problem: inst.name.clone(),
        stats,
        ground_ms,
        prune_ms,
        search_ms: 0.0,
        expansions: 0,
        plan_len: None,
        cost: None,
        latency: None,
        status: String::new(),
    };
    let finish = |verdict: Verdict, plan, report, detail, mut metrics: Metrics| {
        metrics.status = verdict.name().to_string();
        PipelineRun { verdict, plan, report, metrics, detail }
    };
    if let Some(w) = witness {
        return finish(Verdict::Unsolvable, None, None, Some(w), metrics);
    }
    let t = Instant::now();
    let out = plan(&problem, &opts.search);
    metrics.search_ms = ms(t);
    metrics.expansions = out.stats.expanded;
    match out.status {
        PlanStatus::Unsolvable => {
            finish(Verdict::Unsolvable, None, None, Some("search space exhausted without reaching the goal".into()), metrics)
        }
        PlanStatus::BudgetExhausted(why) => finish(Verdict::BudgetExhausted, None, None, Some(why), metrics),
        PlanStatus::Solved => {
            let p = out.plan.expect("solved search returns a plan");
            let report = validate_ground(&full, &PlanText::from(&p));
            metrics.plan_len = Some(p.len());
            metrics.cost = Some(p.cost);
            metrics.latency = Some(p.latency);
            let (verdict, detail) = if report.valid {
                (Verdict::Solved, None)
            } else {
                (Verdict::Invalid, Some(report.diagnostics.join("; ")))
            };
            finish(verdict, Some(p), Some(report), detail, metrics)
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, PipelineError> {
    fs::write(&path, text).map_err(|source| PipelineError::Io { path: path.clone(), source })?;
    Ok(path)
}

pub fn read_instance(path: &Path) -> Result<ProblemInstance, PipelineError> {
    let text = fs::read_to_string(path).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })?;
    load_config(&text).map_err(|e| PipelineError::Config(e.render(&path.display().to_string())))
}

/// Writes `domain.pddl` and `<name>.problem.pddl` into `dir`.
pub fn write_pddl(inst: &ProblemInstance, dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    fs::create_dir_all(dir).map_err(|source| PipelineError::Io { path: dir.to_path_buf(), source })?;
    Ok(vec![
        write(dir.join("domain.pddl"), &emit_domain())?,
        write(dir.join(format!("{}.problem.pddl", problem_name(inst))), &emit_problem(inst))?,
    ])
}

#[derive(Debug, Clone, Default)]
pub struct OutputOptions {
    pub out_dir: PathBuf,
    pub dot: bool,
    pub omit_timings: bool,
}

/// Solves `inst` and writes the plan, validation report, metrics CSV and
/// optional DOT views into `out.out_dir`.
pub fn run_pipeline(
    inst: &ProblemInstance,
    opts: &PipelineOptions,
    out: &OutputOptions,
) -> Result<(PipelineRun, Vec<PathBuf>), PipelineError> {
    let dir = &out.out_dir;
    fs::create_dir_all(dir).map_err(|source| PipelineError::Io { path: dir.clone(), source })?;
    let run = solve(inst, opts);
    let name = problem_name(inst);
    let mut files = Vec::new();
    if let Some(p) = &run.plan {
        files.push(write(dir.join(format!("{name}.plan")), &emit_plan_text(p))?);
    }
    if let (Some(r), Some(p)) = (&run.report, &run.plan) {
        files.push(write(dir.join(format!("{name}.report.txt")), &report_text(r, p.len()))?);
    }
    files.push(write(dir.join("metrics.csv"), &metrics_csv(std::slice::from_ref(&run.metrics), out.omit_timings))?);
    if out.dot {
        files.push(write(dir.join(format!("{name}.initial.dot")), &render_dot_instance(inst))?);
        if let Some(r) = &run.report {
            files.push(write(dir.join(format!("{name}.result.dot")), &render_dot_report(inst, r))?);
        }
    }
    Ok((run, files))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen;

    #[test]
    fn minimal_chain_solves() {
        let run = solve(&benchgen::minimal_chain(), &PipelineOptions::default());
        assert_eq!(run.verdict, Verdict::Solved);
        assert_eq!(run.plan.unwrap().len(), 6);
        assert_eq!(run.verdict.exit_code(), 0);
    }

    #[test]
    fn tight_latency_is_unsolvable() {
        let mut inst = benchgen::minimal_chain();
        inst.latency_bound = crate::rational::Q::new(1, 1000);
        assert_eq!(solve(&inst, &PipelineOptions::default()).verdict.exit_code(), EXIT_UNSOLVABLE);
    }
}
