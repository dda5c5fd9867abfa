//! Solution files: the exchange format with external solvers.
//!
//! ```text
//! objective 1234.5
//! status OPTIMAL
//! bound 1200
//! Y_f1_A_1_1 1
//! X_d2_1_1_2_3 = 4
//! ```
//!
//! The first line is required. `status` and `bound` are optional. Variables
//! follow as `name value` or `name = value`; unlisted variables are zero.

use std::collections::BTreeMap;
use std::fmt::Write;

use ferrysched_core::mip::{relative_gap, MipResult, MipStatus};
use ferrysched_core::model::IpModel;
use ferrysched_core::num::{self, Rational};
use num_traits::Zero;

/// Values further than this from the nearest integer are rejected.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolutionError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown variable `{name}`")]
    UnknownVariable { line: usize, name: String },
    #[error("line {line}: value of `{name}` is not integral")]
    NotIntegral { line: usize, name: String },
    #[error("reported objective {reported} differs from recomputed {recomputed}")]
    Objective { reported: String, recomputed: String },
}

pub fn write_solution(model: &IpModel, result: &MipResult) -> String {
    let mut out = String::new();
    let obj = result.objective.clone().unwrap_or_else(Rational::zero);
    let _ = writeln!(out, "objective {}", num::format_decimal(&obj));
    let _ = writeln!(out, "status {}", result.status.as_str());
    let _ = writeln!(out, "bound {}", num::format_decimal(&result.bound));
    if let Some(values) = &result.values {
        for (var, v) in model.variables.iter().zip(values) {
            if !v.is_zero() {
                let _ = writeln!(out, "{} {}", var.name(), num::format_decimal(v));
            }
        }
    }
    out
}

fn status_of(text: &str) -> Option<MipStatus> {
    [MipStatus::Optimal, MipStatus::FeasibleGap, MipStatus::Infeasible, MipStatus::TimeoutNoIncumbent]
        .into_iter()
        .find(|s| s.as_str().eq_ignore_ascii_case(text))
}

fn parse_value(text: &str) -> Option<Rational> {
    num::parse_decimal(text).or_else(|| text.parse::<f64>().ok().and_then(num::from_f64))
}

/// Reads a solution file against `model`. Values are rounded to integers,
/// the objective is recomputed exactly, and a missing bound defaults to 0.
pub fn read_solution(model: &IpModel, text: &str, gap_tol: f64) -> Result<MipResult, SolutionError> {
    let index: BTreeMap<String, usize> = model.variables.iter().enumerate().map(|(j, v)| (v.name(), j)).collect();
    let mut values = vec![Rational::zero(); model.variables.len()];
    let mut reported: Option<Rational> = None;
    let mut status: Option<MipStatus> = None;
    let mut bound: Option<Rational> = None;
    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().filter(|f| *f != "=").collect();
        let syntax = |message: &str| SolutionError::Syntax { line: ln, message: message.to_string() };
        if fields.len() != 2 {
            return Err(syntax("expected `name value`"));
        }
        let (key, val) = (fields[0], fields[1]);
        if reported.is_none() {
            if key != "objective" {
                return Err(syntax("the first line must be `objective <value>`"));
            }
            reported = Some(parse_value(val).ok_or_else(|| syntax("bad objective value"))?);
            continue;
        }
        match key {
            "status" => status = Some(status_of(val).ok_or_else(|| syntax("unknown status"))?),
            "bound" => bound = Some(parse_value(val).ok_or_else(|| syntax("bad bound"))?),
            name => {
                let &j = index
                    .get(name)
                    .ok_or_else(|| SolutionError::UnknownVariable { line: ln, name: name.to_string() })?;
                let v = parse_value(val).ok_or_else(|| syntax("bad value"))?;
                let rounded = v.round();
                if num::to_f64(&(&v - &rounded)).abs() > INTEGRALITY_TOL {
                    return Err(SolutionError::NotIntegral { line: ln, name: name.to_string() });
                }
                values[j] = rounded;
            }
        }
    }
    let reported = reported.ok_or(SolutionError::Syntax { line: 0, message: "empty solution file".into() })?;
    let objective = model.objective_value(&values);
    let scale = num::to_f64(&objective).abs().max(1.0);
    if (num::to_f64(&reported) - num::to_f64(&objective)).abs() > 1e-6 * scale {
        return Err(SolutionError::Objective {
            reported: num::format_decimal(&reported),
            recomputed: num::format_decimal(&objective),
        });
    }
    let bound = bound.unwrap_or_else(Rational::zero);
    let bound = if bound > objective { objective.clone() } else { bound };
    let gap = relative_gap(&objective, &bound);
    let status = status.unwrap_or(if num::to_f64(&gap) <= gap_tol { MipStatus::Optimal } else { MipStatus::FeasibleGap });
    Ok(MipResult {
        status,
        values: Some(values),
        objective: Some(objective),
        bound,
        gap: Some(gap),
        nodes: 0,
        pivots: 0,
        elapsed_s: 0.0,
        trace: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ferrysched_core::instance::{Ferry, Horizon, InstanceBuilder};
    use ferrysched_core::model::Formulation;
    use ferrysched_core::{solve_mip, SolverConfig};

    fn model() -> IpModel {
        let inst = InstanceBuilder::new(Horizon::new(0, 40, 10).unwrap())
            .port(1, 0)
            .port(1, 0)
            .ferry(Ferry::new(1, "A", 3, 1).both_ways(1, 2, 10).rates_per_hour(num::int(30), num::int(6)))
            .demand(1, 2, 0, 2)
            .build()
            .unwrap();
        Formulation::build(&inst).unwrap().model
    }

    #[test]
    fn written_solution_reads_back() {
        let m = model();
        let r = solve_mip(&m, &SolverConfig::default()).unwrap();
        let back = read_solution(&m, &write_solution(&m, &r), 1e-9).unwrap();
        assert_eq!(back.values, r.values);
        assert_eq!(back.objective, r.objective);
        assert_eq!(back.status, MipStatus::Optimal);
    }

    #[test]
    fn accepts_equals_syntax_and_near_integers() {
        let m = model();
        let r = solve_mip(&m, &SolverConfig::default()).unwrap();
        let mut text = format!("objective {}\n", num::to_f64(r.objective.as_ref().unwrap()));
        for (var, v) in m.variables.iter().zip(r.values.as_ref().unwrap()) {
            if !v.is_zero() {
                text.push_str(&format!("{} = {}\n", var.name(), num::to_f64(v) + 1e-9));
            }
        }
        let back = read_solution(&m, &text, 1e-9).unwrap();
        assert_eq!(back.objective, r.objective);
        // No bound given: the gap is measured against zero.
        assert_eq!(back.bound, Rational::zero());
    }

    #[test]
    fn rejects_unknown_names_and_fractions() {
        let m = model();
        assert!(matches!(read_solution(&m, "objective 0\nY_f9_A_B 1\n", 1e-9), Err(SolutionError::UnknownVariable { .. })));
        let name = m.variables[0].name();
        assert!(matches!(
            read_solution(&m, &format!("objective 0\n{name} 0.5\n"), 1e-9),
            Err(SolutionError::NotIntegral { .. })
        ));
    }
}
