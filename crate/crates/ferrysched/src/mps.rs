//! Fixed-field MPS export and a reader for the same dialect.
//!
//! Fields start at columns 2, 5, 15, 25, 40 and 50. Names longer than their
//! field push the rest of the line right with a single separating space, so
//! the reader splits on whitespace. Coefficients are exact decimals when
//! they terminate and 15 significant digits otherwise.

use std::fmt::Write;

use ferrysched_core::model::{IpModel, Sense, VarKind};
use ferrysched_core::naming::is_valid_name;
use ferrysched_core::num::{self, Rational};
use num_traits::Zero;

pub const OBJECTIVE_ROW: &str = "COST";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MpsError {
    #[error("name `{0}` breaks the naming scheme")]
    Name(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Objective,
    Le,
    Eq,
    Ge,
}

impl RowKind {
    fn code(self) -> &'static str {
        match self {
            RowKind::Objective => "N",
            RowKind::Le => "L",
            RowKind::Eq => "E",
            RowKind::Ge => "G",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// Binary.
    Bv,
    /// Integer with the given lower bound.
    Li,
}

/// The content of an MPS file, in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MpsModel {
    pub name: String,
    pub rows: Vec<(String, RowKind)>,
    /// Column name with its `(row, coefficient)` entries.
    pub columns: Vec<(String, Vec<(String, Rational)>)>,
    pub rhs: Vec<(String, Rational)>,
    pub bounds: Vec<(BoundKind, String, Rational)>,
}

impl MpsModel {
    /// Canonical MPS image of `model`.
    pub fn from_model(name: &str, model: &IpModel) -> Result<Self, MpsError> {
        let row_names: Vec<String> = model.constraints.iter().map(|c| c.name()).collect();
        for n in &row_names {
            if !is_valid_name(n) {
                return Err(MpsError::Name(n.clone()));
            }
        }
        let mut rows = vec![(OBJECTIVE_ROW.to_string(), RowKind::Objective)];
        for (c, n) in model.constraints.iter().zip(&row_names) {
            let kind = match c.sense {
                Sense::Le => RowKind::Le,
                Sense::Eq => RowKind::Eq,
                Sense::Ge => RowKind::Ge,
            };
            rows.push((n.clone(), kind));
        }
        let mut entries: Vec<Vec<(String, Rational)>> = vec![Vec::new(); model.variables.len()];
        for (j, cost) in model.objective.iter().enumerate() {
            if !cost.is_zero() {
                entries[j].push((OBJECTIVE_ROW.to_string(), cost.clone()));
            }
        }
        for (c, n) in model.constraints.iter().zip(&row_names) {
            for (j, a) in &c.terms {
                if !a.is_zero() {
                    entries[*j].push((n.clone(), a.clone()));
                }
            }
        }
        let mut columns = Vec::with_capacity(model.variables.len());
        let mut bounds = Vec::with_capacity(model.variables.len());
        for (var, mut list) in model.variables.iter().zip(entries) {
            let name = var.name();
            if !is_valid_name(&name) {
                return Err(MpsError::Name(name));
            }
            if list.is_empty() {
                list.push((OBJECTIVE_ROW.to_string(), Rational::zero()));
            }
            bounds.push(match var.kind {
                VarKind::Binary => (BoundKind::Bv, name.clone(), Rational::zero()),
                VarKind::Integer => (BoundKind::Li, name.clone(), Rational::zero()),
            });
            columns.push((name, list));
        }
        let rhs = model
            .constraints
            .iter()
            .zip(&row_names)
            .filter(|(c, _)| !c.rhs.is_zero())
            .map(|(c, n)| (n.clone(), c.rhs.clone()))
            .collect();
        Ok(MpsModel { name: name.to_string(), rows, columns, rhs, bounds })
    }

    pub fn write(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "NAME          {}", self.name);
        out.push_str("ROWS\n");
        for (name, kind) in &self.rows {
            line(&mut out, &[kind.code(), name]);
        }
        out.push_str("COLUMNS\n");
        for (col, list) in &self.columns {
            for pair in list.chunks(2) {
                let a = num::format_decimal(&pair[0].1);
                match pair.get(1) {
                    Some((r2, v2)) => {
                        let b = num::format_decimal(v2);
                        line(&mut out, &["", col, &pair[0].0, &a, r2, &b]);
                    }
                    None => line(&mut out, &["", col, &pair[0].0, &a]),
                }
            }
        }
        out.push_str("RHS\n");
        for pair in self.rhs.chunks(2) {
            let a = num::format_decimal(&pair[0].1);
            match pair.get(1) {
                Some((r2, v2)) => {
                    let b = num::format_decimal(v2);
                    line(&mut out, &["", "RHS", &pair[0].0, &a, r2, &b]);
                }
                None => line(&mut out, &["", "RHS", &pair[0].0, &a]),
            }
        }
        out.push_str("BOUNDS\n");
        for (kind, col, value) in &self.bounds {
            match kind {
                BoundKind::Bv => line(&mut out, &["BV", "BND", col]),
                BoundKind::Li => line(&mut out, &["LI", "BND", col, &num::format_decimal(value)]),
            }
        }
        out.push_str("ENDATA\n");
        out
    }
}

const FIELD_STARTS: [usize; 6] = [1, 4, 14, 24, 39, 49];

/// Writes `fields` at the fixed MPS columns; empty trailing fields are dropped.
fn line(out: &mut String, fields: &[&str]) {
    let mut buf = String::new();
    for (i, f) in fields.iter().enumerate() {
        if f.is_empty() {
            continue;
        }
        let start = FIELD_STARTS[i];
        if buf.len() < start {
            buf.extend(std::iter::repeat_n(' ', start - buf.len()));
        } else {
            buf.push(' ');
        }
        buf.push_str(f);
    }
    out.push_str(&buf);
    out.push('\n');
}

pub fn write_mps(name: &str, model: &IpModel) -> Result<String, MpsError> {
    Ok(MpsModel::from_model(name, model)?.write())
}

/// Reads the dialect produced by [`MpsModel::write`].
pub fn parse_mps(text: &str) -> Result<MpsModel, MpsError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Rows,
        Columns,
        Rhs,
        Bounds,
        End,
    }
    let mut m = MpsModel::default();
    let mut section = Section::None;
    let err = |line: usize, message: String| MpsError::Parse { line, message };
    let value = |line: usize, s: &str| num::parse_decimal(s).ok_or_else(|| err(line, format!("bad number `{s}`")));
    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        if !raw.starts_with(' ') {
            let mut parts = raw.split_whitespace();
            let head = parts.next().unwrap_or_default();
            section = match head {
                "NAME" => {
                    m.name = raw[4..].trim().to_string();
                    Section::None
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::End,
                other => return Err(err(ln, format!("unknown section `{other}`"))),
            };
            continue;
        }
        let f: Vec<&str> = raw.split_whitespace().collect();
        match section {
            Section::Rows => {
                let kind = match f.first().copied() {
                    Some("N") => RowKind::Objective,
                    Some("L") => RowKind::Le,
                    Some("E") => RowKind::Eq,
                    Some("G") => RowKind::Ge,
                    _ => return Err(err(ln, "bad row type".into())),
                };
                let name = f.get(1).ok_or_else(|| err(ln, "missing row name".into()))?;
                m.rows.push((name.to_string(), kind));
            }
            Section::Columns | Section::Rhs => {
                if f.len() != 3 && f.len() != 5 {
                    return Err(err(ln, format!("expected 3 or 5 fields, got {}", f.len())));
                }
                let mut pairs = vec![(f[1].to_string(), value(ln, f[2])?)];
                if f.len() == 5 {
                    pairs.push((f[3].to_string(), value(ln, f[4])?));
                }
                if section == Section::Rhs {
                    m.rhs.extend(pairs);
                } else {
                    match m.columns.last_mut() {
                        Some((name, list)) if name == f[0] => list.extend(pairs),
                        _ => m.columns.push((f[0].to_string(), pairs)),
                    }
                }
            }
            Section::Bounds => match f.as_slice() {
                ["BV", _, col] => m.bounds.push((BoundKind::Bv, col.to_string(), Rational::zero())),
                ["LI", _, col, v] => m.bounds.push((BoundKind::Li, col.to_string(), value(ln, v)?)),
                _ => return Err(err(ln, "unsupported bound".into())),
            },
            Section::None | Section::End => return Err(err(ln, "data outside a section".into())),
        }
    }
    if section != Section::End {
        return Err(err(text.lines().count(), "missing ENDATA".into()));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ferrysched_core::instance::{Ferry, Horizon, InstanceBuilder};
    use ferrysched_core::model::Formulation;

    #[test]
    fn empty_model_is_a_skeleton() {
        let inst = InstanceBuilder::new(Horizon::new(0, 20, 10).unwrap()).build().unwrap();
        let model = Formulation::build(&inst).unwrap().model;
        let text = write_mps("EMPTY", &model).unwrap();
        assert_eq!(text, "NAME          EMPTY\nROWS\n N  COST\nCOLUMNS\nRHS\nBOUNDS\nENDATA\n");
        assert_eq!(parse_mps(&text).unwrap().write(), text);
    }

    #[test]
    fn fields_start_at_fixed_columns() {
        let mut out = String::new();
        line(&mut out, &["", "X1", "R1", "1", "R2", "-2.5"]);
        assert_eq!(out, "    X1        R1        1              R2        -2.5\n");
    }

    #[test]
    fn small_model_round_trips() {
        let inst = InstanceBuilder::new(Horizon::new(0, 40, 10).unwrap())
            .port(1, 0)
            .port(1, 0)
            .ferry(Ferry::new(1, "A", 3, 1).both_ways(1, 2, 10).rates_per_hour(num::int(50), num::int(7)))
            .demand(1, 2, 0, 2)
            .build()
            .unwrap();
        let model = Formulation::build(&inst).unwrap().model;
        let text = write_mps("SMALL", &model).unwrap();
        let parsed = parse_mps(&text).unwrap();
        let image = MpsModel::from_model("SMALL", &model).unwrap();
        assert_eq!(parsed.rows, image.rows);
        assert_eq!(parsed.bounds, image.bounds);
        assert_eq!(parsed.rhs, image.rhs);
        // 50 per hour over ten minutes does not terminate, so compare to 1e-12.
        for ((n1, l1), (n2, l2)) in parsed.columns.iter().zip(&image.columns) {
            assert_eq!(n1, n2);
            for ((r1, v1), (r2, v2)) in l1.iter().zip(l2) {
                assert_eq!(r1, r2);
                assert!((num::to_f64(v1) - num::to_f64(v2)).abs() < 1e-12);
            }
        }
        assert_eq!(parsed.write(), text);
    }
}
