//! Solver-neutral integer program over the ferry and passenger networks.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write;

use num_traits::{One, Signed, Zero};

use crate::instance::{DwellForm, FerryId, NetworkMode, PortId, ProblemInstance, TransferForm};
use crate::naming;
use crate::network::{
    build_all_ferry_networks, build_all_passenger_networks, build_supergraph, Arc, ArcKind, FerryFlowNetwork,
    NetworkError, Node, PassengerNetwork, SupergraphIndex,
};
use crate::num::{format_decimal, int, normalize_terms, Rational};

/// Owner of a variable: a ferry (`y^f`) or a destination commodity (`x^k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarRole {
    Ferry(FerryId),
    Passenger(PortId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Binary,
    Integer,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub role: VarRole,
    pub arc: Arc,
    pub kind: VarKind,
}

impl Variable {
    /// Upper bound; `None` means unbounded.
    pub fn upper(&self) -> Option<u64> {
        match self.kind {
            VarKind::Binary => Some(1),
            VarKind::Integer => None,
        }
    }

    pub fn name(&self) -> String {
        naming::variable_name(self.role, self.arc.from, self.arc.to)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintTag {
    FerryBalance,
    Berth,
    PaxBalance,
    Capacity,
    Dwell,
    Transfer,
}

impl ConstraintTag {
    pub const ALL: [ConstraintTag; 6] = [
        ConstraintTag::FerryBalance,
        ConstraintTag::Berth,
        ConstraintTag::PaxBalance,
        ConstraintTag::Capacity,
        ConstraintTag::Dwell,
        ConstraintTag::Transfer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintTag::FerryBalance => "FERRY_BALANCE",
            ConstraintTag::Berth => "BERTH",
            ConstraintTag::PaxBalance => "PAX_BALANCE",
            ConstraintTag::Capacity => "CAPACITY",
            ConstraintTag::Dwell => "DWELL",
            ConstraintTag::Transfer => "TRANSFER",
        }
    }
}

/// Where a constraint comes from, for names and diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    FerryNode { ferry: FerryId, node: Node },
    WaitingArc { port: PortId, slot: u32 },
    PaxNode { destination: PortId, node: Node },
    ServiceArc { from: Node, to: Node },
    Dwell { ferry: FerryId, port: PortId, slot: u32 },
    Transfer { destination: PortId, port: PortId, slot: u32, until: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    /// `(variable id, coefficient)`, sorted by id, no zeros.
    pub terms: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
    pub tag: ConstraintTag,
    pub site: Site,
}

impl LinearConstraint {
    fn new(terms: Vec<(usize, Rational)>, sense: Sense, rhs: Rational, tag: ConstraintTag, site: Site) -> Self {
        LinearConstraint { terms: normalize_terms(terms), sense, rhs, tag, site }
    }

    pub fn name(&self) -> String {
        naming::constraint_name(&self.site)
    }

    pub fn activity(&self, values: &[Rational]) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (j, a)| acc + a * &values[*j])
    }

    pub fn is_satisfied(&self, values: &[Rational]) -> bool {
        let lhs = self.activity(values);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Eq => lhs == self.rhs,
            Sense::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelMeta {
    pub instance_hash: u64,
    pub mode: NetworkMode,
    pub dwell_form: DwellForm,
    pub transfer_form: TransferForm,
    pub ports: usize,
    pub ferries: usize,
    pub slots: u32,
}

/// Minimisation model `min c x` subject to linear rows, integrality and the
/// variable bounds implied by [`VarKind`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpModel {
    pub variables: Vec<Variable>,
    pub objective: Vec<Rational>,
    pub constraints: Vec<LinearConstraint>,
    pub meta: ModelMeta,
    index: BTreeMap<(VarRole, Node, Node), usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("ferry networks were built in different modes")]
    Mode,
    #[error("formulation not applicable: {0}")]
    Form(String),
}

impl IpModel {
    /// An empty model with no variables or rows.
    pub fn empty(meta: ModelMeta) -> Self {
        IpModel { variables: Vec::new(), objective: Vec::new(), constraints: Vec::new(), meta, index: BTreeMap::new() }
    }

    /// Appends a variable and returns its id. Duplicates are rejected by
    /// returning the existing id.
    pub fn add_variable(&mut self, var: Variable, cost: Rational) -> usize {
        let key = (var.role, var.arc.from, var.arc.to);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.variables.len();
        self.variables.push(var);
        self.objective.push(cost);
        self.index.insert(key, id);
        id
    }

    pub fn var(&self, role: VarRole, from: Node, to: Node) -> Option<usize> {
        self.index.get(&(role, from, to)).copied()
    }

    pub fn objective_value(&self, values: &[Rational]) -> Rational {
        self.objective.iter().zip(values).fold(Rational::zero(), |acc, (c, v)| acc + c * v)
    }

    /// Indices of rows violated by `values`.
    pub fn violated_rows(&self, values: &[Rational]) -> Vec<usize> {
        (0..self.constraints.len()).filter(|&r| !self.constraints[r].is_satisfied(values)).collect()
    }

    /// Whether `values` is integral, within bounds and satisfies every row.
    pub fn is_feasible(&self, values: &[Rational]) -> bool {
        values.len() == self.variables.len()
            && self.variables.iter().zip(values).all(|(var, v)| {
                v.is_integer() && !v.is_negative() && var.upper().is_none_or(|u| *v <= int(u as i64))
            })
            && self.violated_rows(values).is_empty()
    }

    /// Line-oriented canonical text: a header with counts, then one line per
    /// variable and one per constraint. Identical models print identically.
    pub fn canonical_text(&self) -> String {
        let stats = model_stats(self);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "model instance={:016x} mode={} dwell={} transfer={} ports={} ferries={} slots={}",
            self.meta.instance_hash,
            self.meta.mode.as_str(),
            self.meta.dwell_form.as_str(),
            self.meta.transfer_form.as_str(),
            self.meta.ports,
            self.meta.ferries,
            self.meta.slots
        );
        let _ = writeln!(
            out,
            "counts vars={} binary={} integer={} rows={} nonzeros={}",
            stats.n_vars, stats.n_binary, stats.n_integer, stats.n_constraints, stats.n_nonzeros
        );
        for (var, cost) in self.variables.iter().zip(&self.objective) {
            let kind = match var.kind {
                VarKind::Binary => "bin",
                VarKind::Integer => "int",
            };
            let _ = writeln!(out, "var {} {} {} cost {}", var.name(), kind, var.arc.kind.as_str(), cost);
        }
        for row in &self.constraints {
            let _ = write!(out, "row {} {}:", row.name(), row.tag.as_str());
            for (j, a) in &row.terms {
                let _ = write!(out, " {} {}", a, self.variables[*j].name());
            }
            let _ = writeln!(out, " {} {}", row.sense.as_str(), row.rhs);
        }
        out
    }
}

/// FNV-1a over the `Debug` rendering; stable across runs of the same build.
pub fn instance_hash(inst: &ProblemInstance) -> u64 {
    struct Fnv(u64);
    impl Write for Fnv {
        fn write_str(&mut self, s: &str) -> fmt::Result {
            for b in s.bytes() {
                self.0 ^= b as u64;
                self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
            }
            Ok(())
        }
    }
    let mut h = Fnv(0xcbf2_9ce4_8422_2325);
    let _ = write!(h, "{inst:?}");
    h.0
}

fn meta_for(inst: &ProblemInstance) -> ModelMeta {
    ModelMeta {
        instance_hash: instance_hash(inst),
        mode: inst.costs().mode,
        dwell_form: inst.costs().dwell_form,
        transfer_form: inst.costs().transfer_form,
        ports: inst.ports().len(),
        ferries: inst.ferries().len(),
        slots: inst.horizon().slots(),
    }
}

/// Operating cost `g^f_e` of a ferry arc, before weighting by lambda.
pub fn ferry_arc_cost(inst: &ProblemInstance, f: FerryId, arc: &Arc) -> Rational {
    let ferry = inst.ferry(f);
    let minutes = int(arc.duration);
    match arc.kind {
        ArcKind::Service => minutes * &ferry.moving_rate,
        ArcKind::Waiting => {
            if inst.costs().mode == NetworkMode::TwoShift {
                let (t1, t2) = inst.costs().crew_window.unwrap_or((0, 0));
                let h = inst.horizon();
                let (tu, tv) = (h.time_of(arc.from.slot().unwrap_or(1)), h.time_of(arc.to.slot().unwrap_or(1)));
                if t1 <= tu && tv <= t2 {
                    return inst.costs().big_m.clone();
                }
            }
            minutes * &ferry.docked_rate
        }
        ArcKind::InPort if inst.costs().mode == NetworkMode::TwoShift => ferry.shift_salary.clone(),
        _ => Rational::zero(),
    }
}

/// Travel-time penalty `c^k_e` of a passenger arc, before weighting by nu.
pub fn passenger_arc_cost(inst: &ProblemInstance, arc: &Arc) -> Rational {
    match arc.kind {
        ArcKind::Infeasibility => inst.costs().big_m.clone(),
        ArcKind::Destination => Rational::zero(),
        _ => int(arc.duration),
    }
}

/// Assembles variables, objective and the balance, berth, passenger balance
/// and capacity rows, then appends dwell and transfer rows in the forms
/// selected by the instance.
pub fn build_model(
    inst: &ProblemInstance,
    networks: &[FerryFlowNetwork],
    supergraph: &SupergraphIndex,
    passengers: &[PassengerNetwork],
) -> Result<IpModel, BuildError> {
    if networks.iter().any(|n| n.mode != inst.costs().mode) {
        return Err(BuildError::Mode);
    }
    let q = inst.horizon().slots();
    let lambda = &inst.costs().lambda;
    let nu = &inst.costs().nu;
    let mut model = IpModel::empty(meta_for(inst));

    for net in networks {
        for arc in &net.arcs {
            let cost = lambda * ferry_arc_cost(inst, net.ferry, arc);
            model.add_variable(Variable { role: VarRole::Ferry(net.ferry), arc: *arc, kind: VarKind::Binary }, cost);
        }
    }
    for pax in passengers {
        for arc in &pax.arcs {
            let cost = nu * passenger_arc_cost(inst, arc);
            model.add_variable(
                Variable { role: VarRole::Passenger(pax.destination), arc: *arc, kind: VarKind::Integer },
                cost,
            );
        }
    }

    for net in networks {
        let role = VarRole::Ferry(net.ferry);
        for &v in net.nodes() {
            let mut terms = Vec::new();
            for &a in net.incoming(v) {
                let arc = &net.arcs[a];
                terms.push((model.var(role, arc.from, arc.to).expect("ferry arc variable"), Rational::one()));
            }
            for &a in net.outgoing(v) {
                let arc = &net.arcs[a];
                terms.push((model.var(role, arc.from, arc.to).expect("ferry arc variable"), -Rational::one()));
            }
            model.constraints.push(LinearConstraint::new(
                terms,
                Sense::Eq,
                int(net.divergence(v, q)),
                ConstraintTag::FerryBalance,
                Site::FerryNode { ferry: net.ferry, node: v },
            ));
        }
    }

    if !networks.is_empty() {
        for port in inst.ports() {
            for i in 1..q {
                let (u, v) = (Node::at(port.id, i), Node::at(port.id, i + 1));
                let terms: Vec<(usize, Rational)> = networks
                    .iter()
                    .filter_map(|net| model.var(VarRole::Ferry(net.ferry), u, v))
                    .map(|id| (id, Rational::one()))
                    .collect();
                model.constraints.push(LinearConstraint::new(
                    terms,
                    Sense::Le,
                    int(port.berths as i64),
                    ConstraintTag::Berth,
                    Site::WaitingArc { port: port.id, slot: i },
                ));
            }
        }
    }

    for pax in passengers {
        let role = VarRole::Passenger(pax.destination);
        for &v in pax.nodes() {
            let mut terms = Vec::new();
            for &a in pax.outgoing(v) {
                let arc = &pax.arcs[a];
                terms.push((model.var(role, arc.from, arc.to).expect("passenger arc variable"), Rational::one()));
            }
            for &a in pax.incoming(v) {
                let arc = &pax.arcs[a];
                terms.push((model.var(role, arc.from, arc.to).expect("passenger arc variable"), -Rational::one()));
            }
            model.constraints.push(LinearConstraint::new(
                terms,
                Sense::Eq,
                int(pax.supply(v)),
                ConstraintTag::PaxBalance,
                Site::PaxNode { destination: pax.destination, node: v },
            ));
        }
    }

    for (arc, ferries) in supergraph.service_arcs() {
        let mut terms = Vec::new();
        for pax in passengers {
            if let Some(id) = model.var(VarRole::Passenger(pax.destination), arc.from, arc.to) {
                terms.push((id, Rational::one()));
            }
        }
        for &f in ferries {
            if let Some(id) = model.var(VarRole::Ferry(f), arc.from, arc.to) {
                terms.push((id, -int(inst.ferry(f).capacity as i64)));
            }
        }
        model.constraints.push(LinearConstraint::new(
            terms,
            Sense::Le,
            Rational::zero(),
            ConstraintTag::Capacity,
            Site::ServiceArc { from: arc.from, to: arc.to },
        ));
    }

    add_dwell_constraints(&mut model, inst, networks, inst.costs().dwell_form)?;
    add_transfer_constraints(&mut model, inst, passengers, inst.costs().transfer_form)?;
    Ok(model)
}

/// Appends minimum dwell rows. `Full` adds, for every service arrival at
/// `k_i`, `|D| * arrivals <= sum of y over the waiting arcs D` following it.
/// `Simplified` requires the waiting arc `w` slots before every departure.
pub fn add_dwell_constraints(
    model: &mut IpModel,
    inst: &ProblemInstance,
    networks: &[FerryFlowNetwork],
    form: DwellForm,
) -> Result<usize, BuildError> {
    let q = inst.horizon().slots();
    let before = model.constraints.len();
    if form == DwellForm::Simplified {
        for net in networks {
            for port in inst.port_ids() {
                if !inst.simplified_dwell_ok(net.ferry, port) {
                    return Err(BuildError::Form(format!(
                        "simplified dwell rows need w*delta below every travel time (ferry {}, port {})",
                        net.ferry, port
                    )));
                }
            }
        }
    }
    for net in networks {
        let role = VarRole::Ferry(net.ferry);
        let ferry = inst.ferry(net.ferry);
        for port in inst.port_ids() {
            let w = ferry.dwell_slots(port);
            if w == 0 {
                continue;
            }
            for i in 1..=q {
                let node = Node::at(port, i);
                let mut terms = Vec::new();
                match form {
                    DwellForm::Full => {
                        let r = (i + w).min(q);
                        if r <= i {
                            continue;
                        }
                        let span = int((r - i) as i64);
                        for &a in net.incoming(node) {
                            let arc = &net.arcs[a];
                            if arc.kind == ArcKind::Service {
                                terms.push((model.var(role, arc.from, arc.to).expect("service arc"), span.clone()));
                            }
                        }
                        if terms.is_empty() {
                            continue;
                        }
                        for j in i..r {
                            let id = model.var(role, Node::at(port, j), Node::at(port, j + 1)).expect("waiting arc");
                            terms.push((id, -Rational::one()));
                        }
                    }
                    DwellForm::Simplified => {
                        if i <= w {
                            continue;
                        }
                        for &a in net.outgoing(node) {
                            let arc = &net.arcs[a];
                            if arc.kind == ArcKind::Service {
                                terms.push((model.var(role, arc.from, arc.to).expect("service arc"), Rational::one()));
                            }
                        }
                        if terms.is_empty() {
                            continue;
                        }
                        let j = i - w;
                        let id = model.var(role, Node::at(port, j), Node::at(port, j + 1)).expect("waiting arc");
                        terms.push((id, -Rational::one()));
                    }
                }
                model.constraints.push(LinearConstraint::new(
                    terms,
                    Sense::Le,
                    Rational::zero(),
                    ConstraintTag::Dwell,
                    Site::Dwell { ferry: net.ferry, port, slot: i },
                ));
            }
        }
    }
    Ok(model.constraints.len() - before)
}

/// Appends passenger transfer rows. `Full` bounds the cumulative service
/// arrivals at `k_i..k_t` by the flow on waiting arc `(k_t, k_t+1)` for every
/// `t` in the transfer window; `Single` keeps only `t = i`.
pub fn add_transfer_constraints(
    model: &mut IpModel,
    inst: &ProblemInstance,
    passengers: &[PassengerNetwork],
    form: TransferForm,
) -> Result<usize, BuildError> {
    let q = inst.horizon().slots();
    let before = model.constraints.len();
    if form == TransferForm::Single {
        for port in inst.ports() {
            if port.transfer_slots >= 1 && port.berths != 1 && port.transfer_slots != 1 {
                return Err(BuildError::Form(format!(
                    "single transfer rows need one berth or a one-slot transfer time at port {}",
                    port.id
                )));
            }
        }
    }
    for pax in passengers {
        let role = VarRole::Passenger(pax.destination);
        for port in inst.ports() {
            let big_t = port.transfer_slots;
            if big_t == 0 || port.id == pax.destination {
                continue;
            }
            let arrivals = |model: &IpModel, j: u32| -> Vec<usize> {
                let node = Node::at(port.id, j);
                pax.incoming(node)
                    .iter()
                    .map(|&a| &pax.arcs[a])
                    .filter(|arc| arc.kind == ArcKind::Service)
                    .map(|arc| model.var(role, arc.from, arc.to).expect("service arc"))
                    .collect()
            };
            for i in 1..q {
                let r = match form {
                    TransferForm::Full => (i + big_t).min(q),
                    TransferForm::Single => i + 1,
                };
                let mut cumulative: Vec<usize> = Vec::new();
                for t in i..r {
                    cumulative.extend(arrivals(model, t));
                    if cumulative.is_empty() {
                        continue;
                    }
                    let mut terms: Vec<(usize, Rational)> =
                        cumulative.iter().map(|&id| (id, Rational::one())).collect();
                    let wait = model.var(role, Node::at(port.id, t), Node::at(port.id, t + 1)).expect("waiting arc");
                    terms.push((wait, -Rational::one()));
                    model.constraints.push(LinearConstraint::new(
                        terms,
                        Sense::Le,
                        Rational::zero(),
                        ConstraintTag::Transfer,
                        Site::Transfer { destination: pax.destination, port: port.id, slot: i, until: t },
                    ));
                }
            }
        }
    }
    Ok(model.constraints.len() - before)
}

/// Networks and model of one instance, built together.
#[derive(Clone, Debug)]
pub struct Formulation {
    pub networks: Vec<FerryFlowNetwork>,
    pub supergraph: SupergraphIndex,
    pub passengers: Vec<PassengerNetwork>,
    pub model: IpModel,
}

impl Formulation {
    pub fn build(inst: &ProblemInstance) -> Result<Self, BuildError> {
        let networks = build_all_ferry_networks(inst)?;
        let supergraph = build_supergraph(&networks)?;
        let passengers = build_all_passenger_networks(inst, &supergraph)?;
        let model = build_model(inst, &networks, &supergraph, &passengers)?;
        Ok(Formulation { networks, supergraph, passengers, model })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ModelStats {
    pub n_vars: usize,
    pub n_binary: usize,
    pub n_integer: usize,
    pub n_constraints: usize,
    pub n_nonzeros: usize,
    pub by_tag: BTreeMap<ConstraintTag, usize>,
}

pub fn model_stats(model: &IpModel) -> ModelStats {
    let n_binary = model.variables.iter().filter(|v| v.kind == VarKind::Binary).count();
    let mut by_tag = BTreeMap::new();
    for row in &model.constraints {
        *by_tag.entry(row.tag).or_insert(0) += 1;
    }
    ModelStats {
        n_vars: model.variables.len(),
        n_binary,
        n_integer: model.variables.len() - n_binary,
        n_constraints: model.constraints.len(),
        n_nonzeros: model.constraints.iter().map(|r| r.terms.len()).sum(),
        by_tag,
    }
}

impl fmt::Display for ModelStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "variables    {}", self.n_vars)?;
        writeln!(f, "  binary     {}", self.n_binary)?;
        writeln!(f, "  integer    {}", self.n_integer)?;
        writeln!(f, "constraints  {}", self.n_constraints)?;
        for tag in ConstraintTag::ALL {
            writeln!(f, "  {:<14}{}", tag.as_str(), self.by_tag.get(&tag).copied().unwrap_or(0))?;
        }
        write!(f, "nonzeros     {}", self.n_nonzeros)
    }
}

/// Readable form of a coefficient for diagnostics.
pub fn describe_value(v: &Rational) -> String {
    format_decimal(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Ferry, Horizon, InstanceBuilder};

    fn toy() -> ProblemInstance {
        InstanceBuilder::new(Horizon::new(0, 60, 10).unwrap())
            .port(1, 0)
            .port(1, 0)
            .ferry(Ferry::new(1, "A", 5, 1).both_ways(1, 2, 20).rates_per_hour(int(120), int(60)).dwell(2, 2))
            .demand(1, 2, 0, 3)
            .build()
            .unwrap()
    }

    #[test]
    fn costs_follow_arc_kinds() {
        let inst = toy();
        let form = Formulation::build(&inst).unwrap();
        let m = &form.model;
        let p = |k, i| Node::at(PortId(k), i);
        let y = |a, b| m.var(VarRole::Ferry(FerryId(1)), a, b).unwrap();
        let x = |a, b| m.var(VarRole::Passenger(PortId(2)), a, b).unwrap();
        // 60 per hour docked is 1 per minute.
        assert_eq!(m.objective[y(p(1, 1), p(1, 2))], int(10));
        assert_eq!(m.objective[y(p(1, 1), p(2, 3))], int(40));
        assert_eq!(m.objective[y(Node::Alpha, p(1, 1))], int(0));
        assert_eq!(m.objective[x(p(1, 1), p(2, 3))], int(20));
        assert_eq!(m.objective[x(p(2, 3), Node::Zeta(PortId(2)))], int(0));
        assert_eq!(m.objective[x(p(1, 6), Node::Zeta(PortId(2)))], int(600));
        assert!(m.objective.iter().all(|c| *c >= Rational::zero()));
    }

    #[test]
    fn dwell_row_spans_following_waiting_arcs() {
        let inst = toy();
        let m = Formulation::build(&inst).unwrap().model;
        let row = m
            .constraints
            .iter()
            .find(|r| r.site == Site::Dwell { ferry: FerryId(1), port: PortId(2), slot: 3 })
            .unwrap();
        let names: Vec<(String, Rational)> = row.terms.iter().map(|(j, a)| (m.variables[*j].name(), a.clone())).collect();
        assert_eq!(
            names,
            [
                ("Y_f1_1_1_2_3".into(), int(2)),
                ("Y_f1_2_3_2_4".into(), int(-1)),
                ("Y_f1_2_4_2_5".into(), int(-1)),
            ]
        );
        // Arrival at 2_5 is truncated at q = 6.
        let last = m
            .constraints
            .iter()
            .find(|r| r.site == Site::Dwell { ferry: FerryId(1), port: PortId(2), slot: 5 })
            .unwrap();
        assert_eq!(last.terms.len(), 2);
    }

    #[test]
    fn every_column_sits_in_two_balance_rows() {
        let inst = toy();
        let m = Formulation::build(&inst).unwrap().model;
        let mut hits = alloc::vec![Vec::new(); m.variables.len()];
        for row in &m.constraints {
            if matches!(row.tag, ConstraintTag::FerryBalance | ConstraintTag::PaxBalance) {
                for (j, a) in &row.terms {
                    hits[*j].push(a.clone());
                }
            }
        }
        for h in hits {
            let mut h = h;
            h.sort();
            assert_eq!(h, [int(-1), int(1)]);
        }
    }

    #[test]
    fn empty_instance_has_empty_model() {
        let inst = InstanceBuilder::new(Horizon::new(0, 60, 10).unwrap()).port(1, 0).build().unwrap();
        let stats = model_stats(&Formulation::build(&inst).unwrap().model);
        assert_eq!(stats, ModelStats::default());
    }

    #[test]
    fn canonical_text_is_reproducible() {
        let a = Formulation::build(&toy()).unwrap().model.canonical_text();
        let b = Formulation::build(&toy()).unwrap().model.canonical_text();
        assert_eq!(a, b);
        assert!(a.starts_with("model instance="));
    }
}
