//! Exhaustive optimiser for tiny instances.
//!
//! Every source-to-sink path of every ferry is enumerated, combinations
//! breaking berth limits are dropped, and for each surviving combination the
//! passengers are routed one AEQ at a time over all simple paths. Arc
//! legality and costs come from [`crate::schedule`]; nothing is shared with
//! the network builder or the LP-based solver.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::assignment::Assignment;
use crate::instance::{DwellForm, FerryId, NetworkMode, PortId, ProblemInstance, TransferForm};
use crate::mip::{MipResult, MipStatus};
use crate::model::IpModel;
use crate::network::{ArcKind, Node};
use crate::num::{int, Rational};
use crate::schedule::{classify_ferry_arc, classify_passenger_arc, ferry_leg_cost, passenger_leg_cost};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_ferries: usize,
    pub max_ports: usize,
    pub max_slots: u32,
    pub max_demand_aeq: u64,
    pub max_paths_per_ferry: usize,
    pub max_combinations: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_ferries: 2,
            max_ports: 3,
            max_slots: 10,
            max_demand_aeq: 6,
            max_paths_per_ferry: 200_000,
            max_combinations: 400_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance exceeds oracle limits: {0}")]
    Limit(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleOutcome {
    pub objective: Rational,
    pub assignment: Assignment,
    /// Dwell-feasible source-to-sink paths per ferry.
    pub paths_per_ferry: Vec<usize>,
    /// Passenger subproblems actually solved.
    pub evaluated: u64,
}

impl OracleOutcome {
    /// The optimum in solver result form, with values in `model`'s column order.
    pub fn to_mip_result(&self, model: &IpModel) -> MipResult {
        MipResult {
            status: MipStatus::Optimal,
            values: self.assignment.to_values(model).ok(),
            objective: Some(self.objective.clone()),
            bound: self.objective.clone(),
            gap: Some(Rational::zero()),
            nodes: self.evaluated,
            pivots: 0,
            elapsed_s: 0.0,
            trace: Vec::new(),
        }
    }
}

/// One ferry path with its weighted cost and the waiting arcs it occupies.
#[derive(Clone, Debug)]
struct FerryPath {
    nodes: Vec<Node>,
    cost: Rational,
    docked: Vec<(PortId, u32)>,
    services: Vec<(Node, Node)>,
}

fn check_limits(inst: &ProblemInstance, limits: &OracleLimits) -> Result<(), OracleError> {
    let demand: u64 = inst.demands().iter().map(|d| d.volume).sum();
    if inst.ferries().len() > limits.max_ferries {
        return Err(OracleError::Limit(format!("{} ferries > {}", inst.ferries().len(), limits.max_ferries)));
    }
    if inst.ports().len() > limits.max_ports {
        return Err(OracleError::Limit(format!("{} ports > {}", inst.ports().len(), limits.max_ports)));
    }
    if inst.horizon().slots() > limits.max_slots {
        return Err(OracleError::Limit(format!("{} slots > {}", inst.horizon().slots(), limits.max_slots)));
    }
    if demand > limits.max_demand_aeq {
        return Err(OracleError::Limit(format!("{demand} AEQ > {}", limits.max_demand_aeq)));
    }
    Ok(())
}

fn ferry_successors(inst: &ProblemInstance, f: FerryId, u: Node) -> Vec<Node> {
    let q = inst.horizon().slots();
    let home = inst.ferry(f).home;
    let mut cands = Vec::new();
    match u {
        Node::PortTime { port, slot } => {
            cands.push(Node::at(port, slot + 1));
            for p in inst.port_ids() {
                for j in slot + 1..=q {
                    cands.push(Node::at(p, j));
                }
            }
            cands.extend([Node::Gamma, Node::Beta]);
        }
        Node::Alpha | Node::Gamma => {
            cands.extend((1..=q).map(|i| Node::at(home, i)));
            cands.extend([Node::Gamma, Node::Beta]);
        }
        _ => {}
    }
    cands.sort();
    cands.dedup();
    cands.retain(|&v| classify_ferry_arc(inst, f, u, v).is_some());
    cands
}

fn dwell_ok(inst: &ProblemInstance, f: FerryId, nodes: &[Node]) -> bool {
    let q = inst.horizon().slots();
    let ferry = inst.ferry(f);
    let waits: Vec<(PortId, u32)> = nodes
        .windows(2)
        .filter_map(|w| match (w[0].port_time(), w[1].port_time()) {
            (Some((k, i)), Some((p, j))) if k == p && j == i + 1 => Some((k, i)),
            _ => None,
        })
        .collect();
    for w in nodes.windows(2) {
        let (Some((k, i)), Some((p, j))) = (w[0].port_time(), w[1].port_time()) else { continue };
        if k == p {
            continue;
        }
        match inst.costs().dwell_form {
            DwellForm::Full => {
                let d = ferry.dwell_slots(p);
                if (j..(j + d).min(q)).any(|s| !waits.contains(&(p, s))) {
                    return false;
                }
            }
            DwellForm::Simplified => {
                let d = ferry.dwell_slots(k);
                if d > 0 && i > d && !waits.contains(&(k, i - d)) {
                    return false;
                }
            }
        }
    }
    true
}

fn enumerate_ferry_paths(inst: &ProblemInstance, f: FerryId, cap: usize) -> Result<Vec<FerryPath>, OracleError> {
    let q = inst.horizon().slots();
    let home = inst.ferry(f).home;
    let (source, sink) = match inst.costs().mode {
        NetworkMode::Basic => (Node::at(home, 1), Node::at(home, q)),
        _ => (Node::Alpha, Node::Beta),
    };
    let mut out = Vec::new();
    let mut stack: Vec<Node> = alloc::vec![source];
    fn walk(
        inst: &ProblemInstance,
        f: FerryId,
        sink: Node,
        stack: &mut Vec<Node>,
        out: &mut Vec<FerryPath>,
        cap: usize,
    ) -> Result<(), OracleError> {
        let u = *stack.last().expect("nonempty path");
        if u == sink {
            if dwell_ok(inst, f, stack) {
                out.push(finish_path(inst, f, stack.clone()));
                if out.len() > cap {
                    return Err(OracleError::Limit(format!("ferry {f} has more than {cap} paths")));
                }
            }
            return Ok(());
        }
        for v in ferry_successors(inst, f, u) {
            stack.push(v);
            walk(inst, f, sink, stack, out, cap)?;
            stack.pop();
        }
        Ok(())
    }
    walk(inst, f, sink, &mut stack, &mut out, cap)?;
    out.sort_by(|a, b| a.cost.cmp(&b.cost));
    Ok(out)
}

fn finish_path(inst: &ProblemInstance, f: FerryId, nodes: Vec<Node>) -> FerryPath {
    let mut cost = Rational::zero();
    let mut docked = Vec::new();
    let mut services = Vec::new();
    for w in nodes.windows(2) {
        let (kind, minutes) = classify_ferry_arc(inst, f, w[0], w[1]).expect("enumerated arc");
        cost += ferry_leg_cost(inst, f, kind, w[0], w[1], minutes);
        match kind {
            ArcKind::Waiting => docked.push(w[0].port_time().expect("port node")),
            ArcKind::Service => services.push((w[0], w[1])),
            _ => {}
        }
    }
    FerryPath { nodes, cost: &inst.costs().lambda * cost, docked, services }
}

/// A group of interchangeable AEQ: same origin node and destination.
struct Group {
    destination: PortId,
    count: u64,
    paths: Vec<(Rational, Vec<Node>)>,
}

struct PaxSearch<'a> {
    inst: &'a ProblemInstance,
    groups: Vec<Group>,
    capacity: &'a BTreeMap<(Node, Node), u64>,
    load: BTreeMap<(Node, Node), u64>,
    chosen: Vec<(usize, usize)>,
    /// Cheapest completion cost from unit `u` onwards.
    tail: Vec<Rational>,
    units: Vec<usize>,
    best: Option<(Rational, Vec<(usize, usize)>)>,
    limit: Option<Rational>,
}

impl PaxSearch<'_> {
    fn run(&mut self, unit: usize, first: usize, cost: Rational) {
        if self.best.as_ref().is_some_and(|(b, _)| &cost + &self.tail[unit] >= *b) {
            return;
        }
        if self.limit.as_ref().is_some_and(|l| &cost + &self.tail[unit] >= *l) {
            return;
        }
        if unit == self.units.len() {
            if self.transfers_ok() {
                self.best = Some((cost, self.chosen.clone()));
            }
            return;
        }
        let g = self.units[unit];
        let same_as_next = unit + 1 < self.units.len() && self.units[unit + 1] == g;
        for p in first..self.groups[g].paths.len() {
            let (path_cost, nodes) = &self.groups[g].paths[p];
            let arcs: Vec<(Node, Node)> =
                nodes.windows(2).map(|w| (w[0], w[1])).filter(|e| self.capacity.contains_key(e)).collect();
            if arcs.iter().any(|e| self.load.get(e).copied().unwrap_or(0) + 1 > self.capacity[e]) {
                continue;
            }
            for e in &arcs {
                *self.load.entry(*e).or_insert(0) += 1;
            }
            self.chosen.push((g, p));
            let next_first = if same_as_next { p } else { 0 };
            self.run(unit + 1, next_first, &cost + path_cost);
            self.chosen.pop();
            for e in &arcs {
                *self.load.get_mut(e).expect("loaded arc") -= 1;
            }
        }
    }

    fn transfers_ok(&self) -> bool {
        let q = self.inst.horizon().slots();
        let mut flow: BTreeMap<(PortId, Node, Node), u64> = BTreeMap::new();
        for &(g, p) in &self.chosen {
            let k = self.groups[g].destination;
            for w in self.groups[g].paths[p].1.windows(2) {
                *flow.entry((k, w[0], w[1])).or_insert(0) += 1;
            }
        }
        let destinations: Vec<PortId> = {
            let mut d: Vec<PortId> = self.groups.iter().map(|g| g.destination).collect();
            d.sort();
            d.dedup();
            d
        };
        for k in destinations {
            for port in self.inst.ports() {
                if port.transfer_slots == 0 || port.id == k {
                    continue;
                }
                let arrivals = |j: u32| -> u64 {
                    flow.iter()
                        .filter(|(&(c, u, v), _)| c == k && v == Node::at(port.id, j) && u.port().is_some_and(|p| p != port.id))
                        .map(|(_, &x)| x)
                        .sum()
                };
                for i in 1..q {
                    let r = match self.inst.costs().transfer_form {
                        TransferForm::Full => (i + port.transfer_slots).min(q),
                        TransferForm::Single => i + 1,
                    };
                    let mut cumulative = 0;
                    for t in i..r {
                        cumulative += arrivals(t);
                        let stay = flow.get(&(k, Node::at(port.id, t), Node::at(port.id, t + 1))).copied().unwrap_or(0);
                        if cumulative > stay {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

fn passenger_paths(
    inst: &ProblemInstance,
    k: PortId,
    origin: Node,
    capacity: &BTreeMap<(Node, Node), u64>,
) -> Vec<(Rational, Vec<Node>)> {
    let q = inst.horizon().slots();
    let nu = &inst.costs().nu;
    let mut out = Vec::new();
    let mut stack = alloc::vec![origin];
    fn walk(
        inst: &ProblemInstance,
        k: PortId,
        q: u32,
        capacity: &BTreeMap<(Node, Node), u64>,
        stack: &mut Vec<Node>,
        cost: Rational,
        out: &mut Vec<(Rational, Vec<Node>)>,
    ) {
        let u = *stack.last().expect("nonempty path");
        if u == Node::Zeta(k) {
            out.push((cost, stack.clone()));
            return;
        }
        let Some((port, slot)) = u.port_time() else { return };
        let mut next = alloc::vec![Node::Zeta(k)];
        if slot < q {
            next.push(Node::at(port, slot + 1));
        }
        next.extend(capacity.keys().filter(|(a, _)| *a == u).map(|(_, b)| *b));
        for v in next {
            let Some((kind, minutes)) = classify_passenger_arc(inst, k, u, v) else { continue };
            if kind == ArcKind::Service && !capacity.contains_key(&(u, v)) {
                continue;
            }
            let c = &cost + passenger_leg_cost(inst, kind, minutes);
            stack.push(v);
            walk(inst, k, q, capacity, stack, c, out);
            stack.pop();
        }
    }
    walk(inst, k, q, capacity, &mut stack, Rational::zero(), &mut out);
    for (c, _) in &mut out {
        *c = nu * &*c;
    }
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    out
}

/// Cheapest passenger routing for the given pooled service capacities, or
/// `None` if no routing beats `limit`.
fn route_passengers(
    inst: &ProblemInstance,
    capacity: &BTreeMap<(Node, Node), u64>,
    limit: Option<&Rational>,
) -> Option<(Rational, Assignment)> {
    let mut by_origin: BTreeMap<(PortId, Node), u64> = BTreeMap::new();
    for d in inst.demands() {
        *by_origin.entry((d.destination, Node::at(d.origin, d.slot))).or_insert(0) += d.volume;
    }
    let groups: Vec<Group> = by_origin
        .into_iter()
        .filter(|&(_, n)| n > 0)
        .map(|((k, origin), count)| Group { destination: k, count, paths: passenger_paths(inst, k, origin, capacity) })
        .collect();
    let units: Vec<usize> = groups.iter().enumerate().flat_map(|(g, gr)| (0..gr.count).map(move |_| g)).collect();
    let mut tail = alloc::vec![Rational::zero(); units.len() + 1];
    for u in (0..units.len()).rev() {
        tail[u] = &tail[u + 1] + &groups[units[u]].paths[0].0;
    }
    let mut search = PaxSearch {
        inst,
        groups,
        capacity,
        load: BTreeMap::new(),
        chosen: Vec::new(),
        tail,
        units,
        best: None,
        limit: limit.cloned(),
    };
    search.run(0, 0, Rational::zero());
    let (cost, chosen) = search.best?;
    let mut a = Assignment::new();
    for (g, p) in chosen {
        a.route_passengers(search.groups[g].destination, &search.groups[g].paths[p].1, 1);
    }
    Some((cost, a))
}

/// Lower bound on the passenger cost for any ferry combination: every AEQ
/// alone on its cheapest path with every service available.
fn passenger_floor(inst: &ProblemInstance, all_services: &BTreeMap<(Node, Node), u64>) -> Rational {
    let mut total = Rational::zero();
    for d in inst.demands() {
        let paths = passenger_paths(inst, d.destination, Node::at(d.origin, d.slot), all_services);
        total += int(d.volume as i64) * &paths[0].0;
    }
    total
}

/// Ferry path combinations as `(total, berth_feasible)`.
pub fn count_ferry_combinations(inst: &ProblemInstance, limits: &OracleLimits) -> Result<(u64, u64), OracleError> {
    check_limits(inst, limits)?;
    let paths: Vec<Vec<FerryPath>> = inst
        .ferry_ids()
        .map(|f| enumerate_ferry_paths(inst, f, limits.max_paths_per_ferry))
        .collect::<Result<_, _>>()?;
    let total: u64 = paths.iter().map(|p| p.len() as u64).product();
    if total > limits.max_combinations {
        return Err(OracleError::Limit(format!("{total} ferry combinations")));
    }
    let mut feasible = 0;
    let mut combo: Vec<&FerryPath> = Vec::new();
    fn rec<'p>(inst: &ProblemInstance, paths: &'p [Vec<FerryPath>], combo: &mut Vec<&'p FerryPath>, feasible: &mut u64) {
        if combo.len() == paths.len() {
            if berths_ok(inst, combo) {
                *feasible += 1;
            }
            return;
        }
        for p in &paths[combo.len()] {
            combo.push(p);
            rec(inst, paths, combo, feasible);
            combo.pop();
        }
    }
    rec(inst, &paths, &mut combo, &mut feasible);
    Ok((total, feasible))
}

fn berths_ok(inst: &ProblemInstance, combo: &[&FerryPath]) -> bool {
    let mut used: BTreeMap<(PortId, u32), u32> = BTreeMap::new();
    for p in combo {
        for &d in &p.docked {
            let n = used.entry(d).or_insert(0);
            *n += 1;
            if *n > inst.port(d.0).berths {
                return false;
            }
        }
    }
    true
}

/// Global optimum of a tiny instance by exhaustive enumeration.
pub fn brute_force_oracle(inst: &ProblemInstance, limits: &OracleLimits) -> Result<OracleOutcome, OracleError> {
    check_limits(inst, limits)?;
    let ferry_ids: Vec<FerryId> = inst.ferry_ids().collect();
    let paths: Vec<Vec<FerryPath>> = ferry_ids
        .iter()
        .map(|&f| enumerate_ferry_paths(inst, f, limits.max_paths_per_ferry))
        .collect::<Result<_, _>>()?;
    let total: u64 = paths.iter().map(|p| p.len() as u64).product();
    if total > limits.max_combinations {
        return Err(OracleError::Limit(format!("{total} ferry combinations")));
    }

    let mut all_services: BTreeMap<(Node, Node), u64> = BTreeMap::new();
    for (f, list) in ferry_ids.iter().zip(&paths) {
        let cap = inst.ferry(*f).capacity;
        let mut seen: BTreeMap<(Node, Node), ()> = BTreeMap::new();
        for p in list {
            for &e in &p.services {
                seen.insert(e, ());
            }
        }
        for e in seen.into_keys() {
            *all_services.entry(e).or_insert(0) += cap;
        }
    }
    let floor = passenger_floor(inst, &all_services);

    let mut state = Search {
        inst,
        paths: &paths,
        floor,
        best: None,
        cache: BTreeMap::new(),
        evaluated: 0,
        combo: Vec::new(),
    };
    state.rec(Rational::zero());
    let (objective, combo, pax) = state.best.expect("the idle plan is always feasible");
    let mut assignment = pax;
    for (f, (ferry_idx, path_idx)) in ferry_ids.iter().zip(combo.iter().enumerate()) {
        assignment.set_ferry_path(*f, &paths[ferry_idx][*path_idx].nodes);
    }
    Ok(OracleOutcome {
        objective,
        assignment,
        paths_per_ferry: paths.iter().map(Vec::len).collect(),
        evaluated: state.evaluated,
    })
}

type Routed = Option<(Rational, Assignment)>;

/// Pooled capacity per service arc.
type CapacityMap = Vec<((Node, Node), u64)>;

/// Whether a search cut off at `old` covers one cut off at `new`.
fn looser(old: &Option<Rational>, new: &Option<Rational>) -> bool {
    match (old, new) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(o), Some(n)) => o >= n,
    }
}

struct Search<'a> {
    inst: &'a ProblemInstance,
    paths: &'a [Vec<FerryPath>],
    floor: Rational,
    best: Option<(Rational, Vec<usize>, Assignment)>,
    /// Passenger optimum per pooled capacity map, with the limit it was solved under.
    cache: BTreeMap<CapacityMap, (Option<Rational>, Routed)>,
    evaluated: u64,
    combo: Vec<usize>,
}

impl Search<'_> {
    fn beaten(&self, bound: &Rational) -> bool {
        self.best.as_ref().is_some_and(|(b, _, _)| bound >= b)
    }

    fn rec(&mut self, ferry_cost: Rational) {
        let depth = self.combo.len();
        if depth == self.paths.len() {
            self.leaf(ferry_cost);
            return;
        }
        let rest: Rational = self.paths[depth + 1..].iter().map(|p| p[0].cost.clone()).sum();
        for idx in 0..self.paths[depth].len() {
            let c = &ferry_cost + &self.paths[depth][idx].cost;
            // Paths are sorted by cost, so later ones cannot do better either.
            if self.beaten(&(&c + &rest + &self.floor)) {
                break;
            }
            self.combo.push(idx);
            let chosen: Vec<&FerryPath> = self.combo.iter().enumerate().map(|(f, &i)| &self.paths[f][i]).collect();
            if berths_ok(self.inst, &chosen) {
                self.rec(c);
            }
            self.combo.pop();
        }
    }

    fn leaf(&mut self, ferry_cost: Rational) {
        let mut capacity: BTreeMap<(Node, Node), u64> = BTreeMap::new();
        for (f, &i) in self.combo.iter().enumerate() {
            let cap = self.inst.ferries()[f].capacity;
            for &e in &self.paths[f][i].services {
                *capacity.entry(e).or_insert(0) += cap;
            }
        }
        capacity.retain(|_, c| *c > 0);
        let limit = self.best.as_ref().map(|(b, _, _)| b - &ferry_cost);
        let key: Vec<((Node, Node), u64)> = capacity.iter().map(|(&e, &c)| (e, c)).collect();
        let routed = match self.cache.get(&key) {
            Some((solved_under, result)) if result.is_some() || looser(solved_under, &limit) => result.clone(),
            _ => {
                self.evaluated += 1;
                let r = route_passengers(self.inst, &capacity, limit.as_ref());
                self.cache.insert(key, (limit.clone(), r.clone()));
                r
            }
        };
        if let Some((pax_cost, a)) = routed {
            let total = &ferry_cost + &pax_cost;
            if !self.beaten(&total) {
                self.best = Some((total, self.combo.clone(), a));
            }
        }
    }
}
