use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use worksworld::benchgen::{gen_complex, gen_vary, VaryKind};
use worksworld::config::{serialize_config, ConfigDocument};
use worksworld::grounding::{ground, prune};
use worksworld::model::ProblemInstance;
use worksworld::pipeline::{
    read_instance, run_pipeline, solve, write_pddl, OutputOptions, PipelineOptions, Verdict, EXIT_INVALID, EXIT_OK,
    EXIT_USAGE,
};
use worksworld::planner::{HeuristicKind, Objective, SearchConfig, Strategy};
use worksworld::report::{render_dot_instance, render_dot_report, report_json, report_text, stats_row, STATS_HEADER};
use worksworld::validator::{emit_plan_text, parse_plan, validate};
use worksworld::Q;

#[derive(Parser)]
#[command(name = "worksworld", version, about = "Plan and schedule pipelined data workflows on a resource graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ground, prune, search and validate; optionally write artifacts.
    Plan(PlanArgs),
    /// Replay a plan file against a configuration.
    Validate {
        config: PathBuf,
        plan: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Write domain.pddl and <name>.problem.pddl.
    EmitPddl {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Generate a benchmark configuration.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        /// `KIND=N` for vary (KIND: wfc, interfaces, direct-links, sites); chain length for complex.
        #[arg(long)]
        param: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grounding statistics as CSV.
    Stats {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// DOT view of an instance, or of a plan's result with --plan.
    Viz {
        config: PathBuf,
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Vary,
    Complex,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Gbfs,
    Wastar,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Ff,
    GoalCount,
    Hmax,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Length,
    Cost,
}

#[derive(clap::Args)]
struct PlanArgs {
    config: PathBuf,
    /// Artifact directory; without it the plan is printed to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "gbfs")]
    strategy: StrategyArg,
    /// Weight for wastar.
    #[arg(long, default_value = "1")]
    weight: String,
    #[arg(long, value_enum, default_value = "ff")]
    heuristic: HeuristicArg,
    #[arg(long, value_enum, default_value = "length")]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Memory budget in MiB.
    #[arg(long)]
    mem_budget: Option<u64>,
    #[arg(long)]
    max_expansions: Option<u64>,
    /// Search the unpruned problem.
    #[arg(long)]
    no_prune: bool,
    /// Keep every step the search produced.
    #[arg(long)]
    no_minimize: bool,
    /// Only write the PDDL files; no search.
    #[arg(long)]
    emit_pddl: bool,
    /// Also write DOT views.
    #[arg(long)]
    dot: bool,
    /// Leave timing columns empty in metrics.csv.
    #[arg(long)]
    omit_timings: bool,
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

impl From<worksworld::pipeline::PipelineError> for Failure {
    fn from(e: worksworld::pipeline::PipelineError) -> Failure {
        usage(e.to_string())
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("io: {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("io: {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn search_config(a: &PlanArgs) -> Result<SearchConfig, Failure> {
    let strategy = match a.strategy {
        StrategyArg::Gbfs => Strategy::Gbfs,
        StrategyArg::Wastar => {
            let w: Q = a.weight.parse().map_err(|_| usage(format!("--weight: not a number: {}", a.weight)))?;
            if w < Q::ONE {
                return Err(usage("--weight must be at least 1"));
            }
            Strategy::WeightedAStar(w)
        }
    };
    let mut cfg = SearchConfig {
        strategy,
        heuristic: match a.heuristic {
            HeuristicArg::Ff => HeuristicKind::Ff,
            HeuristicArg::GoalCount => HeuristicKind::GoalCount,
            HeuristicArg::Hmax => HeuristicKind::HMax,
        },
        objective: match a.objective {
            ObjectiveArg::Length => Objective::PlanLength,
            ObjectiveArg::Cost => Objective::TotalCost,
        },
        seed: a.seed,
        minimize: !a.no_minimize,
        ..SearchConfig::default()
    };
    if let Some(t) = a.time_budget {
        if !(t.is_finite() && t > 0.0) {
            return Err(usage("--time-budget must be a positive number of seconds"));
        }
        cfg.time_limit = Some(Duration::from_secs_f64(t));
    }
    if a.mem_budget.is_some() {
        cfg.memory_limit_mb = a.mem_budget;
    }
    if a.max_expansions.is_some() {
        cfg.max_expansions = a.max_expansions;
    }
    Ok(cfg)
}

fn cmd_plan(a: &PlanArgs) -> Result<i32, Failure> {
    let inst = read_instance(&a.config)?;
    if a.emit_pddl {
        let dir = a.out.clone().unwrap_or_else(|| PathBuf::from("."));
        for f in write_pddl(&inst, &dir)? {
            println!("wrote {}", f.display());
        }
        return Ok(EXIT_OK);
    }
    let opts = PipelineOptions { search: search_config(a)?, prune: !a.no_prune };
    let run = match &a.out {
        Some(dir) => {
            let out = OutputOptions { out_dir: dir.clone(), dot: a.dot, omit_timings: a.omit_timings };
            let (run, files) = run_pipeline(&inst, &opts, &out)?;
            println!("status: {}", run.verdict.name());
            if let Some(p) = &run.plan {
                println!("steps: {}", p.len());
                println!("cost: {}", p.cost.to_decimal());
                println!("latency: {}", p.latency.to_decimal());
            }
            for f in files {
                println!("wrote {}", f.display());
            }
            run
        }
        None => {
            let run = solve(&inst, &opts);
            if let Some(p) = &run.plan {
                print!("{}", emit_plan_text(p));
            }
            eprintln!("status: {}", run.verdict.name());
            run
        }
    };
    if let Some(d) = &run.detail {
        let tag = match run.verdict {
            Verdict::Invalid => "validator",
            _ => "planner",
        };
        eprintln!("{tag}: {d}");
    }
    Ok(run.verdict.exit_code())
}

fn cmd_validate(config: &Path, plan: &Path, json: bool) -> Result<i32, Failure> {
    let inst = read_instance(config)?;
    let text = read_text(plan)?;
    let parsed = match parse_plan(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("plan: {}:{e}", plan.display());
            return Ok(EXIT_INVALID);
        }
    };
    let r = validate(&inst, &parsed);
    let n = parsed.steps.len();
    print!("{}", if json { report_json(&r, n) } else { report_text(&r, n) });
    Ok(if r.valid { EXIT_OK } else { EXIT_INVALID })
}

fn generate(family: Family, param: &str, seed: u64) -> Result<ProblemInstance, Failure> {
    let count = |s: &str| s.trim().parse::<usize>().map_err(|_| usage(format!("--param: not a count: {s}")));
    let inst = match family {
        Family::Vary => {
            let (k, n) = param.split_once('=').ok_or_else(|| usage("--param for vary takes KIND=N"))?;
            let kind = VaryKind::from_name(k.trim()).ok_or_else(|| usage(format!("--param: unknown kind `{k}`")))?;
            gen_vary(kind, count(n)?, seed)
        }
        Family::Complex => gen_complex(count(param)?, seed),
    };
    inst.map_err(|e| usage(format!("benchgen: {e}")))
}

fn cmd_stats(configs: &[PathBuf], out: Option<&Path>) -> Result<i32, Failure> {
    let mut csv = format!("{STATS_HEADER}\n");
    for c in configs {
        let inst = read_instance(c)?;
        let stats = prune(&ground(&inst)).stats;
        csv.push_str(&stats_row(&inst.name, &stats));
        csv.push('\n');
    }
    emit(out, &csv)?;
    Ok(EXIT_OK)
}

fn cmd_viz(config: &Path, plan: Option<&Path>, out: Option<&Path>) -> Result<i32, Failure> {
    let inst = read_instance(config)?;
    let dot = match plan {
        None => render_dot_instance(&inst),
        Some(p) => {
            let parsed = parse_plan(&read_text(p)?).map_err(|e| usage(format!("plan: {}:{e}", p.display())))?;
            render_dot_report(&inst, &validate(&inst, &parsed))
        }
    };
    emit(out, &dot)?;
    Ok(EXIT_OK)
}

fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Plan(a) => cmd_plan(&a),
        Command::Validate { config, plan, json } => cmd_validate(&config, &plan, json),
        Command::EmitPddl { config, out } => {
            for f in write_pddl(&read_instance(&config)?, &out)? {
                println!("wrote {}", f.display());
            }
            Ok(EXIT_OK)
        }
        Command::Gen { family, param, seed, out } => {
            let inst = generate(family, &param, seed)?;
            emit(out.as_deref(), &serialize_config(&ConfigDocument::from_instance(&inst)))?;
            Ok(EXIT_OK)
        }
        Command::Stats { configs, out } => cmd_stats(&configs, out.as_deref()),
        Command::Viz { config, plan, out } => cmd_viz(&config, plan.as_deref(), out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(c) => c,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    ExitCode::from(code as u8)
}
