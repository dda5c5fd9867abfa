//! Integer values for ferry arcs (`y`) and passenger arcs (`x`), keyed by arc.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::instance::{FerryId, NetworkMode, PortId, ProblemInstance};
use crate::model::{IpModel, VarRole};
use crate::naming::variable_name;
use crate::network::Node;
use crate::num::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssignmentError {
    #[error("value of {0} is not integral")]
    NotIntegral(String),
    #[error("value of {0} does not fit in 64 bits")]
    Overflow(String),
    #[error("{0} is not a variable of the model")]
    UnknownArc(String),
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
}

/// Sparse assignment; arcs not listed carry zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub ferry: BTreeMap<(FerryId, Node, Node), i64>,
    pub passenger: BTreeMap<(PortId, Node, Node), i64>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn y(&self, f: FerryId, from: Node, to: Node) -> i64 {
        self.ferry.get(&(f, from, to)).copied().unwrap_or(0)
    }

    pub fn x(&self, k: PortId, from: Node, to: Node) -> i64 {
        self.passenger.get(&(k, from, to)).copied().unwrap_or(0)
    }

    pub fn set_y(&mut self, f: FerryId, from: Node, to: Node, value: i64) {
        if value == 0 {
            self.ferry.remove(&(f, from, to));
        } else {
            self.ferry.insert((f, from, to), value);
        }
    }

    pub fn set_x(&mut self, k: PortId, from: Node, to: Node, value: i64) {
        if value == 0 {
            self.passenger.remove(&(k, from, to));
        } else {
            self.passenger.insert((k, from, to), value);
        }
    }

    pub fn add_x(&mut self, k: PortId, from: Node, to: Node, delta: i64) {
        let v = self.x(k, from, to) + delta;
        self.set_x(k, from, to, v);
    }

    /// Sets `y = 1` along consecutive nodes of `path`.
    pub fn set_ferry_path(&mut self, f: FerryId, path: &[Node]) {
        for w in path.windows(2) {
            self.set_y(f, w[0], w[1], 1);
        }
    }

    /// Adds `amount` units of commodity `k` along consecutive nodes of `path`.
    pub fn route_passengers(&mut self, k: PortId, path: &[Node], amount: i64) {
        for w in path.windows(2) {
            self.add_x(k, w[0], w[1], amount);
        }
    }

    /// Removes every ferry arc of `f`.
    pub fn clear_ferry(&mut self, f: FerryId) {
        self.ferry.retain(|key, _| key.0 != f);
    }

    /// Reads integral model values.
    pub fn from_values(model: &IpModel, values: &[Rational]) -> Result<Self, AssignmentError> {
        if values.len() != model.variables.len() {
            return Err(AssignmentError::Length { expected: model.variables.len(), got: values.len() });
        }
        let mut out = Assignment::new();
        for (var, v) in model.variables.iter().zip(values) {
            if v.is_zero() {
                continue;
            }
            if !v.is_integer() {
                return Err(AssignmentError::NotIntegral(var.name()));
            }
            let n = v.to_integer().to_i64().ok_or_else(|| AssignmentError::Overflow(var.name()))?;
            match var.role {
                VarRole::Ferry(f) => out.set_y(f, var.arc.from, var.arc.to, n),
                VarRole::Passenger(k) => out.set_x(k, var.arc.from, var.arc.to, n),
            }
        }
        Ok(out)
    }

    /// Dense value vector in model column order.
    pub fn to_values(&self, model: &IpModel) -> Result<Vec<Rational>, AssignmentError> {
        let mut values = alloc::vec![Rational::zero(); model.variables.len()];
        for (&(f, from, to), &v) in &self.ferry {
            let role = VarRole::Ferry(f);
            let id = model.var(role, from, to).ok_or_else(|| AssignmentError::UnknownArc(variable_name(role, from, to)))?;
            values[id] = Rational::from_integer(BigInt::from(v));
        }
        for (&(k, from, to), &v) in &self.passenger {
            let role = VarRole::Passenger(k);
            let id = model.var(role, from, to).ok_or_else(|| AssignmentError::UnknownArc(variable_name(role, from, to)))?;
            values[id] = int(v);
        }
        Ok(values)
    }

    /// Every ferry stays home all day and every passenger waits at the
    /// origin until the last slot, then leaves through the infeasibility arc.
    pub fn idle(inst: &ProblemInstance) -> Self {
        let q = inst.horizon().slots();
        let mut out = Assignment::new();
        for ferry in inst.ferries() {
            match inst.costs().mode {
                NetworkMode::Basic => {
                    let chain: Vec<Node> = (1..=q).map(|i| Node::at(ferry.home, i)).collect();
                    out.set_ferry_path(ferry.id, &chain);
                }
                NetworkMode::HomeportFree => out.set_ferry_path(ferry.id, &[Node::Alpha, Node::Beta]),
                NetworkMode::TwoShift => out.set_ferry_path(ferry.id, &[Node::Alpha, Node::Gamma, Node::Beta]),
            }
        }
        for d in inst.demands() {
            let mut path: Vec<Node> = (d.slot..=q).map(|i| Node::at(d.origin, i)).collect();
            path.push(Node::Zeta(d.destination));
            out.route_passengers(d.destination, &path, d.volume as i64);
        }
        out
    }
}
