//! The `ferrysched` command line.
//!
//! Exit codes: 0 success, 1 I/O or input error, 2 validation failure, an
//! infeasible model or a rejected warm start, 3 a solver or oracle limit
//! stopped the run without an answer, 64 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ferrysched_core::model::{model_stats, Formulation, IpModel};
use ferrysched_core::num;
use ferrysched_core::oracle::count_ferry_combinations;
use ferrysched_core::schedule::{extract_schedule, kpis, validate};
use ferrysched_core::{
    brute_force_oracle, solve_mip_with_clock, Assignment, BranchRule, MipError, MipStatus, OracleError, OracleLimits,
    ProblemInstance, SearchOrder, SolverConfig,
};

use crate::clock::InstantClock;
use crate::gantt::{gantt_csv, gantt_svg};
use crate::instance_file::load_instance;
use crate::lp_text::write_lp;
use crate::mps::write_mps;
use crate::solution::{read_solution, write_solution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "ferrysched", version, about = "Ferry scheduling by integer programming over time-expanded networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the model and write its canonical text form.
    Build {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve with the built-in branch and bound.
    Solve {
        instance: PathBuf,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Relative optimality gap at which to stop.
        #[arg(long, default_value_t = 1e-9)]
        gap: f64,
        #[arg(long)]
        node_limit: Option<u64>,
        /// `idle` or a solution file.
        #[arg(long)]
        warm_start: Option<String>,
        #[arg(long, value_enum, default_value_t = Search::Best)]
        search: Search,
        #[arg(long, value_enum, default_value_t = Branch::YFirst)]
        branch: Branch,
        /// Floating-point LPs instead of exact rationals.
        #[arg(long)]
        float: bool,
        /// Where to write the solution file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a solution file against every constraint family.
    Validate { instance: PathBuf, solution: PathBuf },
    /// Write the model as fixed-field MPS, or LP text with `--lp`.
    ExportMps {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        lp: bool,
    },
    /// Write Gantt vertices (CSV) and a drawing (SVG) of a solution.
    Gantt {
        instance: PathBuf,
        solution: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Print model size statistics.
    Stats { instance: PathBuf },
    /// Exhaustive search on very small instances.
    Oracle {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Search {
    Best,
    Dfs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Branch {
    YFirst,
    Pseudo,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn error(message: impl Into<String>) -> Self {
        Failure { code: EXIT_ERROR, message: message.into() }
    }
}

type Outcome = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::error(format!("{}: {e}", path.display())))
}

fn write_or_print(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::error(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::error(e.to_string())),
    }
}

fn instance(path: &Path) -> Result<ProblemInstance, Failure> {
    load_instance(&read(path)?).map_err(|e| Failure::error(format!("{}: {e}", path.display())))
}

fn formulate(inst: &ProblemInstance) -> Result<IpModel, Failure> {
    Formulation::build(inst).map(|f| f.model).map_err(|e| Failure::error(e.to_string()))
}

fn solution(model: &IpModel, path: &Path) -> Result<Assignment, Failure> {
    let result = read_solution(model, &read(path)?, 1e-9).map_err(|e| Failure::error(format!("{}: {e}", path.display())))?;
    let values = result.values.unwrap_or_default();
    Assignment::from_values(model, &values).map_err(|e| Failure::error(e.to_string()))
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Build { instance: path, output } => {
            let model = formulate(&instance(&path)?)?;
            write_or_print(out, output.as_deref(), &model.canonical_text())?;
            Ok(EXIT_OK)
        }
        Command::Solve { instance: path, time_limit, gap, node_limit, warm_start, search, branch, float, output } => {
            let inst = instance(&path)?;
            let model = formulate(&inst)?;
            let warm = match warm_start.as_deref() {
                None => None,
                Some("idle") => Some(Assignment::idle(&inst)),
                Some(file) => Some(solution(&model, Path::new(file))?),
            };
            let warm_start = match warm {
                Some(a) => Some(a.to_values(&model).map_err(|e| Failure::error(e.to_string()))?),
                None => None,
            };
            let config = SolverConfig {
                time_limit_s: time_limit,
                gap_tol: gap,
                node_limit,
                branch_rule: match branch {
                    Branch::YFirst => BranchRule::MostFractionalYFirst,
                    Branch::Pseudo => BranchRule::Pseudo,
                },
                search: match search {
                    Search::Best => SearchOrder::BestBound,
                    Search::Dfs => SearchOrder::Dfs,
                },
                warm_start,
                float,
            };
            let result = solve_mip_with_clock(&model, &config, &InstantClock::start())
                .map_err(|e| {
                    let code = match e {
                        MipError::Config(_) => EXIT_USAGE,
                        MipError::WarmStart(_) => EXIT_INVALID,
                        _ => EXIT_ERROR,
                    };
                    Failure { code, message: e.to_string() }
                })?;
            let _ = writeln!(err, "status    {}", result.status.as_str());
            let _ = writeln!(err, "nodes     {}  pivots {}  time {:.2}s", result.nodes, result.pivots, result.elapsed_s);
            if let Some(obj) = &result.objective {
                let _ = writeln!(err, "objective {}", num::format_decimal(obj));
                let _ = writeln!(err, "bound     {}", num::format_decimal(&result.bound));
                if let Some(g) = result.gap_f64() {
                    let _ = writeln!(err, "gap       {:.6}%", 100.0 * g);
                }
            }
            match result.status {
                MipStatus::Infeasible => return Err(Failure { code: EXIT_INVALID, message: "model is infeasible".into() }),
                MipStatus::TimeoutNoIncumbent => {
                    return Err(Failure { code: EXIT_LIMIT, message: "limit reached before any incumbent".into() })
                }
                MipStatus::Optimal | MipStatus::FeasibleGap => {}
            }
            let text = write_solution(&model, &result);
            match output {
                Some(p) => {
                    write_or_print(out, Some(&p), &text)?;
                    if let Some(values) = &result.values {
                        let a = Assignment::from_values(&model, values).map_err(|e| Failure::error(e.to_string()))?;
                        if let Ok(s) = extract_schedule(&inst, &a) {
                            let _ = write!(out, "{}", s.table(&inst));
                        }
                    }
                }
                None => write_or_print(out, None, &text)?,
            }
            Ok(EXIT_OK)
        }
        Command::Validate { instance: path, solution: sol } => {
            let inst = instance(&path)?;
            let model = formulate(&inst)?;
            let a = solution(&model, &sol)?;
            let report = validate(&inst, &a);
            let _ = write!(out, "{report}");
            if !report.passed() {
                return Ok(EXIT_INVALID);
            }
            if let Ok(s) = extract_schedule(&inst, &a) {
                let k = kpis(&inst, &s);
                let _ = writeln!(out, "passenger minutes {}", k.total_travel_time_aeq_min);
                let _ = writeln!(out, "operating cost    {}", num::format_decimal(&k.operating_cost));
                let _ = writeln!(out, "stranded aeq      {}", k.stranded_aeq);
                let _ = writeln!(out, "transfers         {}", k.transfers_count);
            }
            Ok(EXIT_OK)
        }
        Command::ExportMps { instance: path, output, lp } => {
            let model = formulate(&instance(&path)?)?;
            let text = if lp {
                write_lp(&model)
            } else {
                let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("FERRY");
                let name: String = name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
                write_mps(&name, &model).map_err(|e| Failure::error(e.to_string()))?
            };
            write_or_print(out, output.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Gantt { instance: path, solution: sol, csv, svg } => {
            let inst = instance(&path)?;
            let model = formulate(&inst)?;
            let a = solution(&model, &sol)?;
            let report = validate(&inst, &a);
            if !report.passed() {
                let _ = write!(err, "{report}");
                return Ok(EXIT_INVALID);
            }
            let s = extract_schedule(&inst, &a).map_err(|e| Failure::error(e.to_string()))?;
            write_or_print(out, csv.as_deref(), &gantt_csv(&inst, &s))?;
            if let Some(p) = svg {
                write_or_print(out, Some(&p), &gantt_svg(&inst, &s))?;
            }
            Ok(EXIT_OK)
        }
        Command::Stats { instance: path } => {
            let model = formulate(&instance(&path)?)?;
            let _ = writeln!(out, "{}", model_stats(&model));
            Ok(EXIT_OK)
        }
        Command::Oracle { instance: path, output } => {
            let inst = instance(&path)?;
            let limits = OracleLimits::default();
            let limit = |e: OracleError| Failure { code: EXIT_LIMIT, message: e.to_string() };
            let (total, feasible) = count_ferry_combinations(&inst, &limits).map_err(limit)?;
            let outcome = brute_force_oracle(&inst, &limits).map_err(limit)?;
            let _ = writeln!(err, "ferry path combinations {total} ({feasible} berth-feasible)");
            let _ = writeln!(err, "passenger subproblems   {}", outcome.evaluated);
            let _ = writeln!(err, "objective               {}", num::format_decimal(&outcome.objective));
            if let Some(p) = output {
                let model = formulate(&inst)?;
                write_or_print(out, Some(&p), &write_solution(&model, &outcome.to_mip_result(&model)))?;
            } else {
                let _ = writeln!(out, "objective {}", num::format_decimal(&outcome.objective));
            }
            Ok(EXIT_OK)
        }
    }
}
