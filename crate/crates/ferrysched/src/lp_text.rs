//! CPLEX-style LP text, for reading a model by eye or feeding LP-format solvers.

use std::fmt::Write;

use ferrysched_core::model::{IpModel, Sense, VarKind};
use ferrysched_core::num::{self, Rational};
use num_traits::{One, Signed, Zero};

const WRAP: usize = 200;

fn push_terms(out: &mut String, head: &str, terms: &mut dyn Iterator<Item = (Rational, String)>) {
    let mut cur = String::from(head);
    let mut first = true;
    for (a, name) in terms {
        if a.is_zero() {
            continue;
        }
        let sign = if a.is_negative() { "-" } else if first { "" } else { "+" };
        let mag = a.abs();
        let term = if mag.is_one() { name } else { format!("{} {}", num::format_decimal(&mag), name) };
        let piece = if sign.is_empty() { format!(" {term}") } else { format!(" {sign} {term}") };
        if cur.len() + piece.len() > WRAP {
            out.push_str(&cur);
            out.push('\n');
            cur = String::from("  ");
        }
        cur.push_str(&piece);
        first = false;
    }
    if first {
        cur.push_str(" 0");
    }
    out.push_str(&cur);
}

pub fn write_lp(model: &IpModel) -> String {
    let names: Vec<String> = model.variables.iter().map(|v| v.name()).collect();
    let mut out = String::new();
    let _ = writeln!(out, "\\ instance {:016x}", model.meta.instance_hash);
    out.push_str("Minimize\n");
    push_terms(
        &mut out,
        " COST:",
        &mut model.objective.iter().zip(&names).map(|(c, n)| (c.clone(), n.clone())),
    );
    out.push_str("\nSubject To\n");
    for row in &model.constraints {
        let head = format!(" {}:", row.name());
        push_terms(&mut out, &head, &mut row.terms.iter().map(|(j, a)| (a.clone(), names[*j].clone())));
        let op = match row.sense {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        };
        let _ = writeln!(out, " {op} {}", num::format_decimal(&row.rhs));
    }
    out.push_str("Bounds\n");
    for (var, name) in model.variables.iter().zip(&names) {
        if var.kind == VarKind::Integer {
            let _ = writeln!(out, " {name} >= 0");
        }
    }
    out.push_str("Binaries\n");
    for (var, name) in model.variables.iter().zip(&names) {
        if var.kind == VarKind::Binary {
            let _ = writeln!(out, " {name}");
        }
    }
    out.push_str("Generals\n");
    for (var, name) in model.variables.iter().zip(&names) {
        if var.kind == VarKind::Integer {
            let _ = writeln!(out, " {name}");
        }
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ferrysched_core::instance::{Ferry, Horizon, InstanceBuilder};
    use ferrysched_core::model::Formulation;

    #[test]
    fn sections_and_rows_present() {
        let inst = InstanceBuilder::new(Horizon::new(0, 40, 10).unwrap())
            .port(1, 0)
            .port(1, 0)
            .ferry(Ferry::new(1, "A", 3, 1).both_ways(1, 2, 10))
            .demand(1, 2, 0, 2)
            .build()
            .unwrap();
        let model = Formulation::build(&inst).unwrap().model;
        let text = write_lp(&model);
        for section in ["Minimize", "Subject To", "Bounds", "Binaries", "Generals", "End"] {
            assert!(text.lines().any(|l| l == section), "{section}");
        }
        assert!(text.contains(" FB_f1_A: - Y_f1_A_1_1"));
        assert_eq!(text.lines().filter(|l| l.starts_with(" CAP_")).count(), 6);
    }
}
