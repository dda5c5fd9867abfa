//! Ferry schedules extracted from assignments, an independent validator and
//! KPIs.
//!
//! Nothing here reads the rows of an [`IpModel`](crate::IpModel): arc
//! legality, costs and every constraint family are re-derived from the
//! instance so that the validator can be used to check the builder.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use num_traits::Zero;

use crate::assignment::Assignment;
use crate::instance::{format_clock, DwellForm, FerryId, Minutes, NetworkMode, PortId, ProblemInstance, TransferForm};
use crate::network::{ArcKind, Node};
use crate::num::{int, Rational};

fn slot_time(inst: &ProblemInstance, slot: u32) -> Minutes {
    let h = inst.horizon();
    h.start() + h.delta() * (slot as Minutes - 1)
}

fn in_grid(inst: &ProblemInstance, port: PortId, slot: u32) -> bool {
    port.0 >= 1 && port.0 as usize <= inst.ports().len() && slot >= 1 && slot <= inst.horizon().slots()
}

/// Kind and duration of `(from, to)` if it is an arc of ferry `f`'s network.
pub fn classify_ferry_arc(inst: &ProblemInstance, f: FerryId, from: Node, to: Node) -> Option<(ArcKind, Minutes)> {
    if f.0 == 0 || f.0 as usize > inst.ferries().len() {
        return None;
    }
    let ferry = inst.ferry(f);
    let q = inst.horizon().slots();
    let delta = inst.horizon().delta();
    let home = ferry.home;
    let mode = inst.costs().mode;
    let at_home = |v: Node| match v {
        Node::PortTime { port, slot } if port == home && in_grid(inst, port, slot) => Some(slot),
        _ => None,
    };
    match (from, to) {
        (Node::PortTime { port: k, slot: i }, Node::PortTime { port: p, slot: j }) => {
            if !in_grid(inst, k, i) || !in_grid(inst, p, j) {
                return None;
            }
            if k == p {
                return (j == i + 1).then_some((ArcKind::Waiting, delta));
            }
            let travel = *ferry.travel.get(&(k, p))?;
            let steps = (travel + delta - 1) / delta;
            (j as Minutes == i as Minutes + steps).then(|| (ArcKind::Service, slot_time(inst, j) - slot_time(inst, i)))
        }
        _ => match mode {
            NetworkMode::Basic => None,
            NetworkMode::HomeportFree => match (from, to) {
                (Node::Alpha, Node::Beta) => Some((ArcKind::ShiftLink, 0)),
                (Node::Alpha, v) => at_home(v).filter(|&i| i < q).map(|_| (ArcKind::InPort, 0)),
                (u, Node::Beta) => at_home(u).filter(|&i| i >= 2).map(|_| (ArcKind::OutPort, 0)),
                _ => None,
            },
            NetworkMode::TwoShift => {
                let (t1, t2) = inst.costs().crew_window?;
                match (from, to) {
                    (Node::Alpha, Node::Gamma) | (Node::Gamma, Node::Beta) => Some((ArcKind::ShiftLink, 0)),
                    (Node::Alpha, v) => at_home(v).filter(|&i| slot_time(inst, i) < t1).map(|_| (ArcKind::InPort, 0)),
                    (Node::Gamma, v) => at_home(v)
                        .filter(|&i| i < q && slot_time(inst, i) >= t2)
                        .map(|_| (ArcKind::InPort, 0)),
                    (u, Node::Gamma) => at_home(u)
                        .filter(|&i| i > 1 && slot_time(inst, i) <= t1)
                        .map(|_| (ArcKind::OutPort, 0)),
                    (u, Node::Beta) => at_home(u).filter(|&i| slot_time(inst, i) > t2).map(|_| (ArcKind::OutPort, 0)),
                    _ => None,
                }
            }
        },
    }
}

/// Kind and duration of `(from, to)` if it is an arc of the passenger
/// network of destination `k`. Destinations without demand have no network.
pub fn classify_passenger_arc(inst: &ProblemInstance, k: PortId, from: Node, to: Node) -> Option<(ArcKind, Minutes)> {
    if !inst.demands().iter().any(|d| d.destination == k) {
        return None;
    }
    let q = inst.horizon().slots();
    match (from, to) {
        (Node::PortTime { port, slot }, Node::Zeta(z)) if z == k && in_grid(inst, port, slot) => {
            if port == k {
                Some((ArcKind::Destination, 0))
            } else if slot == q {
                Some((ArcKind::Infeasibility, 0))
            } else {
                None
            }
        }
        (Node::PortTime { port: a, slot: i }, Node::PortTime { port: b, slot: j }) if a == b => {
            (in_grid(inst, a, i) && in_grid(inst, b, j) && j == i + 1).then_some((ArcKind::Waiting, inst.horizon().delta()))
        }
        (Node::PortTime { .. }, Node::PortTime { .. }) => {
            inst.ferry_ids().find_map(|f| classify_ferry_arc(inst, f, from, to).filter(|(kind, _)| *kind == ArcKind::Service))
        }
        _ => None,
    }
}

/// Operating cost of one unit of flow of ferry `f` on an arc, before lambda.
pub fn ferry_leg_cost(inst: &ProblemInstance, f: FerryId, kind: ArcKind, from: Node, to: Node, minutes: Minutes) -> Rational {
    let ferry = inst.ferry(f);
    let two_shift = inst.costs().mode == NetworkMode::TwoShift;
    match kind {
        ArcKind::Service => int(minutes) * &ferry.moving_rate,
        ArcKind::Waiting => {
            if two_shift {
                if let (Some((t1, t2)), Some(i), Some(j)) = (inst.costs().crew_window, from.slot(), to.slot()) {
                    if t1 <= slot_time(inst, i) && slot_time(inst, j) <= t2 {
                        return inst.costs().big_m.clone();
                    }
                }
            }
            int(minutes) * &ferry.docked_rate
        }
        ArcKind::InPort if two_shift => ferry.shift_salary.clone(),
        _ => Rational::zero(),
    }
}

/// Travel-time cost of one AEQ on an arc, before nu.
pub fn passenger_leg_cost(inst: &ProblemInstance, kind: ArcKind, minutes: Minutes) -> Rational {
    match kind {
        ArcKind::Infeasibility => inst.costs().big_m.clone(),
        ArcKind::Destination => Rational::zero(),
        _ => int(minutes),
    }
}

/// Weighted objective of an assignment, arcs outside the networks ignored.
pub fn recompute_objective(inst: &ProblemInstance, a: &Assignment) -> Rational {
    let mut ferry_cost = Rational::zero();
    for (&(f, u, v), &y) in &a.ferry {
        if let Some((kind, minutes)) = classify_ferry_arc(inst, f, u, v) {
            ferry_cost += int(y) * ferry_leg_cost(inst, f, kind, u, v, minutes);
        }
    }
    let mut pax_cost = Rational::zero();
    for (&(k, u, v), &x) in &a.passenger {
        if let Some((kind, minutes)) = classify_passenger_arc(inst, k, u, v) {
            pax_cost += int(x) * passenger_leg_cost(inst, kind, minutes);
        }
    }
    &inst.costs().lambda * ferry_cost + &inst.costs().nu * pax_cost
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("ferry {ferry}: {message} at {node}")]
    Path { ferry: FerryId, node: Node, message: String },
    #[error("ferry {ferry}: arc {from} -> {to} carries {value}")]
    Value { ferry: FerryId, from: Node, to: Node, value: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PortCall {
    pub port: PortId,
    pub arrive_slot: u32,
    pub depart_slot: u32,
    pub arrive_min: Minutes,
    pub depart_min: Minutes,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Leg {
    pub from: PortId,
    pub to: PortId,
    pub depart_slot: u32,
    pub arrive_slot: u32,
    pub depart_min: Minutes,
    pub arrive_min: Minutes,
}

impl Leg {
    pub fn arc(&self) -> (Node, Node) {
        (Node::at(self.from, self.depart_slot), Node::at(self.to, self.arrive_slot))
    }
}

/// Crew shift a duty belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Shift {
    /// A single-crew day, or one duty running through both shifts.
    Whole,
    First,
    Second,
}

/// A continuous stretch of operation: calls alternating with legs, starting
/// and ending at the home port.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Duty {
    pub shift: Shift,
    pub calls: Vec<PortCall>,
    /// `legs[i]` sails from `calls[i]` to `calls[i + 1]`.
    pub legs: Vec<Leg>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FerrySchedule {
    pub ferry: FerryId,
    pub home: PortId,
    /// Empty when the ferry never leaves its depot.
    pub duties: Vec<Duty>,
}

impl FerrySchedule {
    pub fn is_idle(&self) -> bool {
        self.duties.iter().all(|d| d.legs.is_empty())
    }

    /// All port calls in time order; a ferry that never sails shows one call
    /// at home spanning the horizon.
    pub fn calls(&self, inst: &ProblemInstance) -> Vec<PortCall> {
        if self.is_idle() {
            let q = inst.horizon().slots();
            return alloc::vec![PortCall {
                port: self.home,
                arrive_slot: 1,
                depart_slot: q,
                arrive_min: slot_time(inst, 1),
                depart_min: slot_time(inst, q),
            }];
        }
        self.duties.iter().flat_map(|d| d.calls.iter().copied()).collect()
    }

    pub fn legs(&self) -> impl Iterator<Item = &Leg> {
        self.duties.iter().flat_map(|d| d.legs.iter())
    }

    /// Shift annotation for two-shift days; `None` otherwise.
    pub fn shift_note(&self, mode: NetworkMode) -> Option<&'static str> {
        if mode != NetworkMode::TwoShift {
            return None;
        }
        let first = self.duties.iter().any(|d| matches!(d.shift, Shift::First | Shift::Whole));
        let second = self.duties.iter().any(|d| matches!(d.shift, Shift::Second | Shift::Whole));
        Some(match (first, second) {
            (true, true) => "both shifts",
            (true, false) => "shift 1 only",
            (false, true) => "shift 2 only",
            (false, false) => "no shift",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub mode: NetworkMode,
    pub ferries: Vec<FerrySchedule>,
    /// Passenger flows, copied from the assignment.
    pub passenger: BTreeMap<(PortId, Node, Node), i64>,
}

impl Schedule {
    /// Onboard AEQ per destination on a sailing. Ferries sharing the same
    /// arc pool their capacity, so the load is that of the arc.
    pub fn leg_load(&self, leg: &Leg) -> BTreeMap<PortId, i64> {
        let (u, v) = leg.arc();
        self.passenger
            .iter()
            .filter(|(&(_, a, b), &x)| a == u && b == v && x != 0)
            .map(|(&(k, _, _), &x)| (k, x))
            .collect()
    }

    /// Re-encodes the schedule as an assignment.
    pub fn to_assignment(&self) -> Assignment {
        let mut out = Assignment::new();
        for fs in &self.ferries {
            let f = fs.ferry;
            let mut path: Vec<Node> = Vec::new();
            for duty in &fs.duties {
                match (self.mode, duty.shift) {
                    (NetworkMode::TwoShift, Shift::Second) => {
                        if path.is_empty() {
                            path.push(Node::Alpha);
                        }
                        if path.last() != Some(&Node::Gamma) {
                            path.push(Node::Gamma);
                        }
                    }
                    (NetworkMode::Basic, _) => {}
                    _ => path.push(Node::Alpha),
                }
                for (i, call) in duty.calls.iter().enumerate() {
                    for s in call.arrive_slot..=call.depart_slot {
                        path.push(Node::at(call.port, s));
                    }
                    if let Some(leg) = duty.legs.get(i) {
                        debug_assert_eq!(leg.depart_slot, call.depart_slot);
                    }
                }
                match (self.mode, duty.shift) {
                    (NetworkMode::TwoShift, Shift::First) => path.push(Node::Gamma),
                    (NetworkMode::Basic, _) => {}
                    _ => path.push(Node::Beta),
                }
            }
            match self.mode {
                NetworkMode::Basic => {}
                NetworkMode::HomeportFree => {
                    if path.is_empty() {
                        path.extend([Node::Alpha, Node::Beta]);
                    }
                }
                NetworkMode::TwoShift => {
                    if path.is_empty() {
                        path.extend([Node::Alpha, Node::Gamma]);
                    }
                    if path.last() == Some(&Node::Gamma) {
                        path.push(Node::Beta);
                    }
                }
            }
            out.set_ferry_path(f, &path);
        }
        out.passenger = self.passenger.clone();
        out
    }

    /// One row per port call and per sailing.
    pub fn table(&self, inst: &ProblemInstance) -> String {
        let mut out = String::new();
        for fs in &self.ferries {
            let ferry = inst.ferry(fs.ferry);
            let _ = write!(out, "ferry {} ({})", fs.ferry, ferry.name);
            if let Some(note) = fs.shift_note(self.mode) {
                let _ = write!(out, " [{note}]");
            }
            out.push('\n');
            if fs.is_idle() {
                let _ = writeln!(out, "  idle at port {}", fs.home);
                continue;
            }
            for duty in &fs.duties {
                if duty.shift != Shift::Whole {
                    let _ = writeln!(out, "  shift {}", if duty.shift == Shift::First { 1 } else { 2 });
                }
                for (i, call) in duty.calls.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "  call {:<12} {} - {}",
                        inst.port(call.port).name,
                        format_clock(call.arrive_min),
                        format_clock(call.depart_min)
                    );
                    if let Some(leg) = duty.legs.get(i) {
                        let load: Vec<String> =
                            self.leg_load(leg).iter().map(|(k, x)| format!("{}:{}", inst.port(*k).name, x)).collect();
                        let _ = writeln!(
                            out,
                            "  sail {} -> {} {} - {} load {}",
                            inst.port(leg.from).name,
                            inst.port(leg.to).name,
                            format_clock(leg.depart_min),
                            format_clock(leg.arrive_min),
                            if load.is_empty() { String::from("-") } else { load.join(" ") }
                        );
                    }
                }
            }
        }
        out
    }
}

/// Follows the unit flow of every ferry from source to sink.
pub fn extract_schedule(inst: &ProblemInstance, a: &Assignment) -> Result<Schedule, ScheduleError> {
    let mode = inst.costs().mode;
    let q = inst.horizon().slots();
    let mut ferries = Vec::new();
    for f in inst.ferry_ids() {
        let home = inst.ferry(f).home;
        let mut out_arcs: BTreeMap<Node, Vec<Node>> = BTreeMap::new();
        let mut total = 0usize;
        for (&(g, u, v), &y) in a.ferry.range((f, Node::at(PortId(0), 0), Node::at(PortId(0), 0))..) {
            if g != f {
                break;
            }
            if y != 1 {
                return Err(ScheduleError::Value { ferry: f, from: u, to: v, value: y });
            }
            out_arcs.entry(u).or_default().push(v);
            total += 1;
        }
        let (source, sink) = match mode {
            NetworkMode::Basic => (Node::at(home, 1), Node::at(home, q)),
            _ => (Node::Alpha, Node::Beta),
        };
        let mut path = alloc::vec![source];
        let mut cur = source;
        while cur != sink {
            let next = match out_arcs.get(&cur).map(Vec::as_slice) {
                Some([v]) => *v,
                Some([]) | None => {
                    return Err(ScheduleError::Path { ferry: f, node: cur, message: "flow stops".into() });
                }
                Some(_) => return Err(ScheduleError::Path { ferry: f, node: cur, message: "flow branches".into() }),
            };
            path.push(next);
            cur = next;
            if path.len() > total + 1 {
                return Err(ScheduleError::Path { ferry: f, node: cur, message: "flow cycles".into() });
            }
        }
        if path.len() != total + 1 {
            let on_path: BTreeSet<(Node, Node)> = path.windows(2).map(|w| (w[0], w[1])).collect();
            let stray = out_arcs
                .iter()
                .flat_map(|(&u, vs)| vs.iter().map(move |&v| (u, v)))
                .find(|e| !on_path.contains(e))
                .map_or(sink, |(u, _)| u);
            return Err(ScheduleError::Path { ferry: f, node: stray, message: "flow off the source-sink path".into() });
        }
        ferries.push(FerrySchedule { ferry: f, home, duties: duties_of(inst, f, &path)? });
    }
    Ok(Schedule { mode, ferries, passenger: a.passenger.clone() })
}

fn duties_of(inst: &ProblemInstance, f: FerryId, path: &[Node]) -> Result<Vec<Duty>, ScheduleError> {
    let mode = inst.costs().mode;
    let mut duties = Vec::new();
    let mut shift = match mode {
        NetworkMode::TwoShift => Shift::First,
        _ => Shift::Whole,
    };
    let mut run: Vec<(PortId, u32)> = Vec::new();
    let flush = |run: &mut Vec<(PortId, u32)>, shift: Shift, duties: &mut Vec<Duty>| -> Result<(), ScheduleError> {
        if run.is_empty() {
            return Ok(());
        }
        let mut calls: Vec<PortCall> = Vec::new();
        let mut legs: Vec<Leg> = Vec::new();
        let call_at = |port: PortId, slot: u32| PortCall {
            port,
            arrive_slot: slot,
            depart_slot: slot,
            arrive_min: slot_time(inst, slot),
            depart_min: slot_time(inst, slot),
        };
        calls.push(call_at(run[0].0, run[0].1));
        for w in run.windows(2) {
            let ((k, i), (p, j)) = (w[0], w[1]);
            let last = calls.last_mut().expect("open call");
            if k == p && j == i + 1 {
                last.depart_slot = j;
                last.depart_min = slot_time(inst, j);
            } else if k != p {
                legs.push(Leg {
                    from: k,
                    to: p,
                    depart_slot: i,
                    arrive_slot: j,
                    depart_min: slot_time(inst, i),
                    arrive_min: slot_time(inst, j),
                });
                calls.push(call_at(p, j));
            } else {
                return Err(ScheduleError::Path { ferry: f, node: Node::at(k, i), message: "not a ferry arc".into() });
            }
        }
        duties.push(Duty { shift, calls, legs });
        run.clear();
        Ok(())
    };
    for &node in path {
        match node {
            Node::PortTime { port, slot } => run.push((port, slot)),
            Node::Gamma => {
                flush(&mut run, shift, &mut duties)?;
                shift = Shift::Second;
            }
            _ => flush(&mut run, shift, &mut duties)?,
        }
    }
    flush(&mut run, shift, &mut duties)?;
    if mode == NetworkMode::TwoShift && !path.contains(&Node::Gamma) {
        // Straight from alpha to beta: one duty across both shifts.
        for d in &mut duties {
            d.shift = Shift::Whole;
        }
    }
    Ok(duties)
}

/// Constraint families checked by [`validate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    /// Arc legality, integrality and bounds.
    Domain,
    FerryBalance,
    Berth,
    /// Passenger conservation and delivery of every demand.
    Demand,
    Capacity,
    Dwell,
    Transfer,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Domain,
        Family::FerryBalance,
        Family::Berth,
        Family::Demand,
        Family::Capacity,
        Family::Dwell,
        Family::Transfer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Domain => "domain",
            Family::FerryBalance => "balance",
            Family::Berth => "berth",
            Family::Demand => "demand",
            Family::Capacity => "capacity",
            Family::Dwell => "dwell",
            Family::Transfer => "transfer",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub family: Family,
    pub site: String,
    /// Amount by which the requirement is missed.
    pub magnitude: i64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} (by {})", self.family.as_str(), self.site, self.magnitude)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub objective: Rational,
    pub stranded_aeq: i64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn family_passed(&self, family: Family) -> bool {
        self.violations.iter().all(|v| v.family != family)
    }

    pub fn of(&self, family: Family) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.family == family)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for family in Family::ALL {
            writeln!(f, "{:<9} {}", family.as_str(), if self.family_passed(family) { "ok" } else { "FAIL" })?;
        }
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        writeln!(f, "objective {}", crate::num::format_decimal(&self.objective))?;
        writeln!(f, "stranded  {}", self.stranded_aeq)
    }
}

/// Checks every constraint family of the model against `a`, directly from
/// the instance.
pub fn validate(inst: &ProblemInstance, a: &Assignment) -> ValidationReport {
    let mut v = Validator { inst, a, violations: Vec::new() };
    v.domain();
    v.ferry_balance();
    v.berth();
    v.demand();
    v.capacity();
    v.dwell();
    v.transfer();
    let stranded_aeq = a
        .passenger
        .iter()
        .filter(|(&(k, u, w), _)| matches!(classify_passenger_arc(inst, k, u, w), Some((ArcKind::Infeasibility, _))))
        .map(|(_, &x)| x)
        .sum();
    ValidationReport { violations: v.violations, objective: recompute_objective(inst, a), stranded_aeq }
}

struct Validator<'a> {
    inst: &'a ProblemInstance,
    a: &'a Assignment,
    violations: Vec<Violation>,
}

impl Validator<'_> {
    fn fail(&mut self, family: Family, site: String, magnitude: i64) {
        self.violations.push(Violation { family, site, magnitude });
    }

    fn y(&self, f: FerryId, u: Node, v: Node) -> i64 {
        self.a.y(f, u, v)
    }

    fn x(&self, k: PortId, u: Node, v: Node) -> i64 {
        self.a.x(k, u, v)
    }

    fn domain(&mut self) {
        for (&(f, u, v), &y) in &self.a.ferry {
            if classify_ferry_arc(self.inst, f, u, v).is_none() {
                self.fail(Family::Domain, format!("ferry {f} has no arc {u} -> {v}"), y.abs());
            } else if !(0..=1).contains(&y) {
                self.fail(Family::Domain, format!("ferry {f} arc {u} -> {v} carries {y}"), if y < 0 { -y } else { y - 1 });
            }
        }
        for (&(k, u, v), &x) in &self.a.passenger {
            if classify_passenger_arc(self.inst, k, u, v).is_none() {
                self.fail(Family::Domain, format!("destination {k} has no arc {u} -> {v}"), x.abs());
            } else if x < 0 {
                self.fail(Family::Domain, format!("destination {k} arc {u} -> {v} carries {x}"), -x);
            }
        }
    }

    fn ferry_balance(&mut self) {
        let q = self.inst.horizon().slots();
        for ferry in self.inst.ferries() {
            let f = ferry.id;
            let (source, sink) = match self.inst.costs().mode {
                NetworkMode::Basic => (Node::at(ferry.home, 1), Node::at(ferry.home, q)),
                _ => (Node::Alpha, Node::Beta),
            };
            let mut net: BTreeMap<Node, i64> = BTreeMap::new();
            net.insert(source, 0);
            net.insert(sink, 0);
            for (&(g, u, v), &y) in &self.a.ferry {
                if g == f {
                    *net.entry(u).or_insert(0) += y;
                    *net.entry(v).or_insert(0) -= y;
                }
            }
            for (node, out_minus_in) in net {
                let want = if node == source {
                    1
                } else if node == sink {
                    -1
                } else {
                    0
                };
                if out_minus_in != want {
                    self.fail(Family::FerryBalance, format!("ferry {f} at {node}"), (out_minus_in - want).abs());
                }
            }
        }
    }

    fn berth(&mut self) {
        let q = self.inst.horizon().slots();
        for port in self.inst.ports() {
            for i in 1..q {
                let (u, v) = (Node::at(port.id, i), Node::at(port.id, i + 1));
                let docked: i64 = self.inst.ferry_ids().map(|f| self.y(f, u, v)).sum();
                if docked > port.berths as i64 {
                    self.fail(Family::Berth, format!("port {} at {u}", port.id), docked - port.berths as i64);
                }
            }
        }
    }

    fn demand(&mut self) {
        let mut supply: BTreeMap<(PortId, Node), i64> = BTreeMap::new();
        for d in self.inst.demands() {
            *supply.entry((d.destination, Node::at(d.origin, d.slot))).or_insert(0) += d.volume as i64;
            *supply.entry((d.destination, Node::Zeta(d.destination))).or_insert(0) -= d.volume as i64;
        }
        let mut net: BTreeMap<(PortId, Node), i64> = BTreeMap::new();
        for (&(k, u, v), &x) in &self.a.passenger {
            *net.entry((k, u)).or_insert(0) += x;
            *net.entry((k, v)).or_insert(0) -= x;
        }
        let keys: BTreeSet<(PortId, Node)> = supply.keys().chain(net.keys()).copied().collect();
        for key in keys {
            let have = net.get(&key).copied().unwrap_or(0);
            let want = supply.get(&key).copied().unwrap_or(0);
            if have != want {
                let (k, node) = key;
                self.fail(Family::Demand, format!("destination {k} at {node}"), (have - want).abs());
            }
        }
    }

    fn capacity(&mut self) {
        let mut load: BTreeMap<(Node, Node), i64> = BTreeMap::new();
        for (&(k, u, v), &x) in &self.a.passenger {
            if matches!(classify_passenger_arc(self.inst, k, u, v), Some((ArcKind::Service, _))) {
                *load.entry((u, v)).or_insert(0) += x;
            }
        }
        for ((u, v), onboard) in load {
            let capacity: i64 = self.inst.ferries().iter().map(|f| self.y(f.id, u, v) * f.capacity as i64).sum();
            if onboard > capacity {
                self.fail(Family::Capacity, format!("sailing {u} -> {v}"), onboard - capacity);
            }
        }
    }

    fn service_arrivals(&self, f: FerryId, port: PortId, slot: u32) -> i64 {
        self.a
            .ferry
            .iter()
            .filter(|(&(g, u, v), _)| {
                g == f && v == Node::at(port, slot) && u.port().is_some_and(|p| p != port) && u.slot().is_some()
            })
            .map(|(_, &y)| y)
            .sum()
    }

    fn service_departures(&self, f: FerryId, port: PortId, slot: u32) -> i64 {
        self.a
            .ferry
            .iter()
            .filter(|(&(g, u, v), _)| {
                g == f && u == Node::at(port, slot) && v.port().is_some_and(|p| p != port) && v.slot().is_some()
            })
            .map(|(_, &y)| y)
            .sum()
    }

    fn dwell(&mut self) {
        let q = self.inst.horizon().slots();
        let form = self.inst.costs().dwell_form;
        for ferry in self.inst.ferries() {
            let f = ferry.id;
            for port in self.inst.port_ids() {
                let w = ferry.dwell_slots(port);
                if w == 0 {
                    continue;
                }
                for i in 1..=q {
                    match form {
                        DwellForm::Full => {
                            let arrivals = self.service_arrivals(f, port, i);
                            let r = (i + w).min(q);
                            if arrivals == 0 || r <= i {
                                continue;
                            }
                            let docked: i64 = (i..r).map(|j| self.y(f, Node::at(port, j), Node::at(port, j + 1))).sum();
                            let need = (r - i) as i64 * arrivals;
                            if need > docked {
                                self.fail(Family::Dwell, format!("ferry {f} after arriving at {}", Node::at(port, i)), need - docked);
                            }
                        }
                        DwellForm::Simplified => {
                            if i <= w {
                                continue;
                            }
                            let departures = self.service_departures(f, port, i);
                            let docked = self.y(f, Node::at(port, i - w), Node::at(port, i - w + 1));
                            if departures > docked {
                                self.fail(Family::Dwell, format!("ferry {f} departing {}", Node::at(port, i)), departures - docked);
                            }
                        }
                    }
                }
            }
        }
    }

    fn transfer(&mut self) {
        let q = self.inst.horizon().slots();
        let form = self.inst.costs().transfer_form;
        let destinations: BTreeSet<PortId> = self.inst.demands().iter().map(|d| d.destination).collect();
        for &k in &destinations {
            for port in self.inst.ports() {
                let big_t = port.transfer_slots;
                if big_t == 0 || port.id == k {
                    continue;
                }
                let arrivals_at = |j: u32| -> i64 {
                    self.a
                        .passenger
                        .iter()
                        .filter(|(&(c, u, v), _)| {
                            c == k && v == Node::at(port.id, j) && u.port().is_some_and(|p| p != port.id) && u.slot().is_some()
                        })
                        .map(|(_, &x)| x)
                        .sum()
                };
                for i in 1..q {
                    let r = match form {
                        TransferForm::Full => (i + big_t).min(q),
                        TransferForm::Single => i + 1,
                    };
                    let mut cumulative = 0;
                    for t in i..r {
                        cumulative += arrivals_at(t);
                        let staying = self.x(k, Node::at(port.id, t), Node::at(port.id, t + 1));
                        if cumulative > staying {
                            self.fail(
                                Family::Transfer,
                                format!("destination {k} arriving at {} leaves {} early", Node::at(port.id, i), Node::at(port.id, t)),
                                cumulative - staying,
                            );
                        }
                    }
                }
            }
        }
    }
}

/// Aggregate figures of a schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kpis {
    /// AEQ-minutes spent waiting and sailing.
    pub total_travel_time_aeq_min: i64,
    /// Ferry operating cost before lambda.
    pub operating_cost: Rational,
    pub stranded_aeq: i64,
    /// AEQ arriving by ferry at a port other than their destination.
    pub transfers_count: i64,
}

impl Kpis {
    /// Passenger part of the objective before nu: travel time plus the
    /// penalty for stranded demand.
    pub fn passenger_cost(&self, inst: &ProblemInstance) -> Rational {
        int(self.total_travel_time_aeq_min) + &inst.costs().big_m * int(self.stranded_aeq)
    }

    pub fn objective(&self, inst: &ProblemInstance) -> Rational {
        &inst.costs().lambda * &self.operating_cost + &inst.costs().nu * self.passenger_cost(inst)
    }
}

pub fn kpis(inst: &ProblemInstance, schedule: &Schedule) -> Kpis {
    let a = schedule.to_assignment();
    let mut operating_cost = Rational::zero();
    for (&(f, u, v), &y) in &a.ferry {
        if let Some((kind, minutes)) = classify_ferry_arc(inst, f, u, v) {
            operating_cost += int(y) * ferry_leg_cost(inst, f, kind, u, v, minutes);
        }
    }
    let mut travel = 0;
    let mut stranded = 0;
    let mut transfers = 0;
    for (&(k, u, v), &x) in &schedule.passenger {
        match classify_passenger_arc(inst, k, u, v) {
            Some((ArcKind::Infeasibility, _)) => stranded += x,
            Some((ArcKind::Destination, _)) | None => {}
            Some((kind, minutes)) => {
                travel += x * minutes;
                if kind == ArcKind::Service && v.port() != Some(k) {
                    transfers += x;
                }
            }
        }
    }
    Kpis { total_travel_time_aeq_min: travel, operating_cost, stranded_aeq: stranded, transfers_count: transfers }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Ferry, Horizon, InstanceBuilder};

    fn three_port_example() -> ProblemInstance {
        InstanceBuilder::new(Horizon::new(300, 360, 10).unwrap())
            .port(1, 0)
            .port(1, 0)
            .port(1, 0)
            .ferry(Ferry::new(1, "F", 10, 1).both_ways(1, 2, 20).both_ways(1, 3, 30).both_ways(2, 3, 40))
            .mode(NetworkMode::Basic)
            .build()
            .unwrap()
    }

    #[test]
    fn three_port_example_trace() {
        let inst = three_port_example();
        let mut a = Assignment::new();
        let p = |k: u16, i: u32| Node::at(PortId(k), i);
        a.set_ferry_path(FerryId(1), &[p(1, 1), p(2, 3), p(2, 4), p(1, 6)]);
        let s = extract_schedule(&inst, &a).unwrap();
        let calls = s.ferries[0].calls(&inst);
        let got: Vec<(u16, Minutes, Minutes)> = calls.iter().map(|c| (c.port.0, c.arrive_min, c.depart_min)).collect();
        assert_eq!(got, [(1, 300, 300), (2, 320, 330), (1, 350, 350)]);
        assert_eq!(s.to_assignment(), a);
        let report = validate(&inst, &a);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn branching_flow_is_a_path_error() {
        let inst = three_port_example();
        let mut a = Assignment::new();
        let p = |k: u16, i: u32| Node::at(PortId(k), i);
        a.set_ferry_path(FerryId(1), &[p(1, 1), p(1, 2)]);
        a.set_y(FerryId(1), p(1, 1), p(2, 3), 1);
        assert!(matches!(extract_schedule(&inst, &a), Err(ScheduleError::Path { .. })));
    }

    #[test]
    fn capacity_excess_has_magnitude_one() {
        let inst = InstanceBuilder::new(Horizon::new(0, 60, 10).unwrap())
            .port(1, 0)
            .port(1, 0)
            .ferry(Ferry::new(1, "A", 2, 1).both_ways(1, 2, 10))
            .demand(1, 2, 0, 3)
            .build()
            .unwrap();
        let p = |k: u16, i: u32| Node::at(PortId(k), i);
        let mut a = Assignment::new();
        a.set_ferry_path(FerryId(1), &[Node::Alpha, p(1, 1), p(2, 2), p(1, 3), Node::Beta]);
        a.route_passengers(PortId(2), &[p(1, 1), p(2, 2), Node::Zeta(PortId(2))], 3);
        let report = validate(&inst, &a);
        let cap: Vec<&Violation> = report.of(Family::Capacity).collect();
        assert_eq!(cap.len(), 1);
        assert_eq!(cap[0].magnitude, 1);
        assert_eq!(report.violations.len(), 1);
    }

    #[test]
    fn idle_kpis_have_no_operating_cost() {
        let inst = InstanceBuilder::new(Horizon::new(0, 60, 10).unwrap())
            .port(1, 0)
            .port(1, 0)
            .ferry(Ferry::new(1, "A", 2, 1).both_ways(1, 2, 10).rates_per_hour(int(60), int(30)))
            .demand(1, 2, 0, 2)
            .build()
            .unwrap();
        let idle = Assignment::idle(&inst);
        let s = extract_schedule(&inst, &idle).unwrap();
        assert!(s.ferries[0].is_idle());
        assert_eq!(s.ferries[0].calls(&inst).len(), 1);
        let k = kpis(&inst, &s);
        assert_eq!(k.operating_cost, int(0));
        assert_eq!(k.stranded_aeq, 2);
        assert_eq!(k.objective(&inst), validate(&inst, &idle).objective);
    }
}
