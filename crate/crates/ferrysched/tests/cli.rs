use std::fs;
use std::path::{Path, PathBuf};

use ferrysched::cli::{run, EXIT_INVALID, EXIT_LIMIT, EXIT_OK, EXIT_USAGE};
use ferrysched::instance_file::save_instance;
use ferrysched::synth::{case_study, tiny_suite};
use ferrysched_core::NetworkMode;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ferrysched").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn objective_line(text: &str) -> String {
    text.lines().find(|l| l.starts_with("objective ")).unwrap().to_string()
}

#[test]
fn usage_errors_exit_64() {
    let r = cli(&["frobnicate"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("frobnicate"));
    assert_eq!(cli(&["solve"]).code, EXIT_USAGE);
    assert_eq!(cli(&["solve", "x.json", "--gap", "lots"]).code, EXIT_USAGE);
    assert_eq!(cli(&["--help"]).code, EXIT_OK);
}

#[test]
fn missing_file_is_an_error() {
    let r = cli(&["stats", "/nonexistent/instance.json"]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("/nonexistent/instance.json"));
}

#[test]
fn solve_validate_and_gantt() {
    let dir = tempfile::tempdir().unwrap();
    let (_, inst) = tiny_suite().into_iter().find(|(_, i)| i.costs().mode == NetworkMode::HomeportFree).unwrap();
    let path = write(dir.path(), "tiny.json", &save_instance(&inst));
    let sol = dir.path().join("tiny.sol");
    let r = cli(&["solve", path.to_str().unwrap(), "--warm-start", "idle", "-o", sol.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.err.contains("status    OPTIMAL"));
    let v = cli(&["validate", path.to_str().unwrap(), sol.to_str().unwrap()]);
    assert_eq!(v.code, EXIT_OK, "{}", v.out);
    assert!(v.out.contains("capacity  ok"));

    let csv = dir.path().join("g.csv");
    let svg = dir.path().join("g.svg");
    let g = cli(&[
        "gantt",
        path.to_str().unwrap(),
        sol.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(g.code, EXIT_OK, "{}", g.err);
    assert!(fs::read_to_string(&csv).unwrap().starts_with("ferry,port,time_min\n"));
    assert!(fs::read_to_string(&svg).unwrap().contains("<polyline"));

    // The warm-start file route accepts the solution just written.
    let again = cli(&["solve", path.to_str().unwrap(), "--warm-start", sol.to_str().unwrap(), "--search", "dfs"]);
    assert_eq!(again.code, EXIT_OK);
    assert_eq!(objective_line(&again.out), objective_line(&fs::read_to_string(&sol).unwrap()));
}

#[test]
fn broken_solution_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let (_, inst) = tiny_suite().into_iter().next().unwrap();
    let path = write(dir.path(), "tiny.json", &save_instance(&inst));
    let model = ferrysched_core::model::Formulation::build(&inst).unwrap().model;
    let y = model.variables.iter().find(|v| matches!(v.role, ferrysched_core::model::VarRole::Ferry(_))).unwrap();
    // One ferry arc alone breaks flow balance; the objective line matches its cost.
    let cost = ferrysched_core::num::format_decimal(&model.objective[model.var(y.role, y.arc.from, y.arc.to).unwrap()]);
    let sol = write(dir.path(), "bad.sol", &format!("objective {cost}\n{} 1\n", y.name()));
    let r = cli(&["validate", path.to_str().unwrap(), sol.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_INVALID, "{}{}", r.out, r.err);
    assert!(r.out.contains("balance   FAIL"));
}

#[test]
fn oracle_matches_solve_on_tiny_instances() {
    let dir = tempfile::tempdir().unwrap();
    for (name, inst) in tiny_suite().into_iter().step_by(5) {
        let path = write(dir.path(), &format!("{name}.json"), &save_instance(&inst));
        let o = cli(&["oracle", path.to_str().unwrap()]);
        let s = cli(&["solve", path.to_str().unwrap()]);
        assert_eq!((o.code, s.code), (EXIT_OK, EXIT_OK), "{name}");
        assert_eq!(objective_line(&o.out), objective_line(&s.out), "{name}");
    }
}

#[test]
fn oracle_refuses_large_instances() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "case.json", &save_instance(&case_study(1)));
    let r = cli(&["oracle", path.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_LIMIT);
    assert!(r.err.contains("oracle limits"));
}

#[test]
fn stats_and_exports_on_case_study() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "case.json", &save_instance(&case_study(1)));
    let r = cli(&["stats", path.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK);
    let vars: usize = r.out.lines().next().unwrap().split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((10_000..100_000).contains(&vars), "{vars}");

    let mps = dir.path().join("case.mps");
    assert_eq!(cli(&["export-mps", path.to_str().unwrap(), "-o", mps.to_str().unwrap()]).code, EXIT_OK);
    let first = fs::read_to_string(&mps).unwrap();
    assert!(first.starts_with("NAME          case\n"));
    assert_eq!(cli(&["export-mps", path.to_str().unwrap(), "-o", mps.to_str().unwrap()]).code, EXIT_OK);
    assert_eq!(fs::read_to_string(&mps).unwrap(), first);

    let lp = cli(&["export-mps", path.to_str().unwrap(), "--lp"]);
    assert!(lp.out.contains("\nSubject To\n"));
    let build = cli(&["build", path.to_str().unwrap()]);
    assert_eq!(build.code, EXIT_OK);
    assert!(!build.out.is_empty());
}

#[test]
fn time_limit_keeps_the_idle_incumbent() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "case.json", &save_instance(&case_study(2)));
    let r = cli(&["solve", path.to_str().unwrap(), "--warm-start", "idle", "--time-limit", "0.5", "--float"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.starts_with("objective "));
    assert!(r.out.contains("status FEASIBLE_GAP"));
}

#[test]
fn limit_without_incumbent_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let (_, inst) = tiny_suite().into_iter().nth(1).unwrap();
    let path = write(dir.path(), "tiny.json", &save_instance(&inst));
    let r = cli(&["solve", path.to_str().unwrap(), "--time-limit", "1e-9"]);
    assert_eq!(r.code, EXIT_LIMIT, "{}", r.err);
    assert!(r.err.contains("TIMEOUT_NO_INCUMBENT"));
    assert_eq!(cli(&["solve", path.to_str().unwrap(), "--node-limit", "0"]).code, EXIT_USAGE);
}
