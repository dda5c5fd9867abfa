//! Time-expanded ferry and passenger networks.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write;

use crate::instance::{FerryId, Minutes, NetworkMode, PortId, ProblemInstance};

/// A node of a ferry or passenger network.
///
/// `Alpha`, `Gamma` and `Beta` belong to the ferry whose network contains
/// them; `Zeta(k)` is the sink of passengers heading to port `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    PortTime { port: PortId, slot: u32 },
    Alpha,
    Gamma,
    Beta,
    Zeta(PortId),
}

impl Node {
    pub fn at(port: PortId, slot: u32) -> Node {
        Node::PortTime { port, slot }
    }

    pub fn port_time(self) -> Option<(PortId, u32)> {
        match self {
            Node::PortTime { port, slot } => Some((port, slot)),
            _ => None,
        }
    }

    pub fn port(self) -> Option<PortId> {
        match self {
            Node::PortTime { port, .. } | Node::Zeta(port) => Some(port),
            _ => None,
        }
    }

    pub fn slot(self) -> Option<u32> {
        self.port_time().map(|(_, s)| s)
    }
}

/// Token form used in names and edge lists: `2_3`, `A`, `G`, `B`, `Z3`.
impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::PortTime { port, slot } => write!(f, "{}_{}", port.0, slot),
            Node::Alpha => f.write_str("A"),
            Node::Gamma => f.write_str("G"),
            Node::Beta => f.write_str("B"),
            Node::Zeta(port) => write!(f, "Z{}", port.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArcKind {
    Service,
    Waiting,
    Destination,
    Infeasibility,
    InPort,
    OutPort,
    ShiftLink,
}

impl ArcKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ArcKind::Service => "SERVICE",
            ArcKind::Waiting => "WAITING",
            ArcKind::Destination => "DESTINATION",
            ArcKind::Infeasibility => "INFEASIBILITY",
            ArcKind::InPort => "IN_PORT",
            ArcKind::OutPort => "OUT_PORT",
            ArcKind::ShiftLink => "SHIFT_LINK",
        }
    }
}

/// A directed arc. The derived ordering (kind, then tail, then head) is the
/// canonical arc order used everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub kind: ArcKind,
    pub from: Node,
    pub to: Node,
    /// `tau(to) - tau(from)` between port-time nodes, 0 otherwise.
    pub duration: Minutes,
}

impl Arc {
    pub fn new(kind: ArcKind, from: Node, to: Node, duration: Minutes) -> Self {
        Arc { kind, from, to, duration }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.kind.as_str(), self.from, self.to, self.duration)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetworkError {
    #[error("unknown ferry {0}")]
    UnknownFerry(FerryId),
    #[error("unknown port {0}")]
    UnknownPort(PortId),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("networks were built in different modes")]
    ModeMismatch,
}

/// Renders arcs one per line as `KIND from to duration`.
pub fn edge_list<'a>(arcs: impl IntoIterator<Item = &'a Arc>) -> String {
    let mut out = String::new();
    for arc in arcs {
        let _ = writeln!(out, "{arc}");
    }
    out
}

/// The time-expanded network `G^f` of one ferry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FerryFlowNetwork {
    pub ferry: FerryId,
    pub mode: NetworkMode,
    pub home: PortId,
    /// Arcs in canonical order.
    pub arcs: Vec<Arc>,
    nodes: Vec<Node>,
    out_arcs: BTreeMap<Node, Vec<usize>>,
    in_arcs: BTreeMap<Node, Vec<usize>>,
}

impl FerryFlowNetwork {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn source(&self) -> Node {
        match self.mode {
            NetworkMode::Basic => Node::at(self.home, 1),
            _ => Node::Alpha,
        }
    }

    pub fn sink(&self, q: u32) -> Node {
        match self.mode {
            NetworkMode::Basic => Node::at(self.home, q),
            _ => Node::Beta,
        }
    }

    /// Net inflow `b^f_v` required at `v`: -1 at the source, +1 at the sink.
    pub fn divergence(&self, v: Node, q: u32) -> i64 {
        if v == self.source() {
            -1
        } else if v == self.sink(q) {
            1
        } else {
            0
        }
    }

    /// Indices into `arcs` of arcs leaving `v`.
    pub fn outgoing(&self, v: Node) -> &[usize] {
        self.out_arcs.get(&v).map_or(&[], |v| v.as_slice())
    }

    /// Indices into `arcs` of arcs entering `v`.
    pub fn incoming(&self, v: Node) -> &[usize] {
        self.in_arcs.get(&v).map_or(&[], |v| v.as_slice())
    }

    pub fn find(&self, from: Node, to: Node) -> Option<usize> {
        self.outgoing(from).iter().copied().find(|&i| self.arcs[i].to == to)
    }

    pub fn dump(&self) -> String {
        edge_list(&self.arcs)
    }
}

fn index_arcs(arcs: &[Arc]) -> (BTreeMap<Node, Vec<usize>>, BTreeMap<Node, Vec<usize>>) {
    let mut out_arcs: BTreeMap<Node, Vec<usize>> = BTreeMap::new();
    let mut in_arcs: BTreeMap<Node, Vec<usize>> = BTreeMap::new();
    for (i, arc) in arcs.iter().enumerate() {
        out_arcs.entry(arc.from).or_default().push(i);
        in_arcs.entry(arc.to).or_default().push(i);
    }
    (out_arcs, in_arcs)
}

/// Builds `G^f` for one ferry in the instance's network mode.
pub fn build_ferry_network(inst: &ProblemInstance, f: FerryId) -> Result<FerryFlowNetwork, NetworkError> {
    if f.0 == 0 || f.0 as usize > inst.ferries().len() {
        return Err(NetworkError::UnknownFerry(f));
    }
    let ferry = inst.ferry(f);
    let horizon = inst.horizon();
    let q = horizon.slots();
    let tau = |slot: u32| horizon.time_of(slot);
    let home = ferry.home;
    let mode = inst.costs().mode;
    let mut arcs = Vec::new();

    for (&(k, h), &minutes) in &ferry.travel {
        for i in 1..=q {
            let j = horizon.landing_slot(i, minutes);
            if j > q {
                break;
            }
            arcs.push(Arc::new(ArcKind::Service, Node::at(k, i), Node::at(h, j), tau(j) - tau(i)));
        }
    }
    for k in inst.port_ids() {
        for i in 1..q {
            arcs.push(Arc::new(ArcKind::Waiting, Node::at(k, i), Node::at(k, i + 1), horizon.delta()));
        }
    }

    let mut nodes: Vec<Node> = inst.port_ids().flat_map(|k| (1..=q).map(move |i| Node::at(k, i))).collect();
    match mode {
        NetworkMode::Basic => {}
        NetworkMode::HomeportFree => {
            nodes.extend([Node::Alpha, Node::Beta]);
            for i in 1..q {
                arcs.push(Arc::new(ArcKind::InPort, Node::Alpha, Node::at(home, i), 0));
            }
            for i in 2..=q {
                arcs.push(Arc::new(ArcKind::OutPort, Node::at(home, i), Node::Beta, 0));
            }
            arcs.push(Arc::new(ArcKind::ShiftLink, Node::Alpha, Node::Beta, 0));
        }
        NetworkMode::TwoShift => {
            let (t1, t2) = inst
                .costs()
                .crew_window
                .ok_or_else(|| NetworkError::Config("TWO_SHIFT mode requires a crew window".into()))?;
            let exchange_possible = (1..q).any(|i| t1 <= tau(i) && tau(i + 1) <= t2);
            if !exchange_possible {
                return Err(NetworkError::Config(format!(
                    "no waiting arc at home port {} of ferry {} lies inside the crew window",
                    home, f
                )));
            }
            nodes.extend([Node::Alpha, Node::Gamma, Node::Beta]);
            for i in 1..=q {
                let t = tau(i);
                if t < t1 {
                    arcs.push(Arc::new(ArcKind::InPort, Node::Alpha, Node::at(home, i), 0));
                }
                if i > 1 && t <= t1 {
                    arcs.push(Arc::new(ArcKind::OutPort, Node::at(home, i), Node::Gamma, 0));
                }
                if i < q && t >= t2 {
                    arcs.push(Arc::new(ArcKind::InPort, Node::Gamma, Node::at(home, i), 0));
                }
                if t > t2 {
                    arcs.push(Arc::new(ArcKind::OutPort, Node::at(home, i), Node::Beta, 0));
                }
            }
            arcs.push(Arc::new(ArcKind::ShiftLink, Node::Alpha, Node::Gamma, 0));
            arcs.push(Arc::new(ArcKind::ShiftLink, Node::Gamma, Node::Beta, 0));
        }
    }
    arcs.sort();
    nodes.sort();
    let (out_arcs, in_arcs) = index_arcs(&arcs);
    Ok(FerryFlowNetwork { ferry: f, mode, home, arcs, nodes, out_arcs, in_arcs })
}

/// Builds the networks of every ferry, in ferry order.
pub fn build_all_ferry_networks(inst: &ProblemInstance) -> Result<Vec<FerryFlowNetwork>, NetworkError> {
    inst.ferry_ids().map(|f| build_ferry_network(inst, f)).collect()
}

/// Union of the port-time arcs of all ferry networks with the set of
/// ferries owning each arc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupergraphIndex {
    /// Arcs in canonical order with their owning ferries (ascending).
    pub arcs: Vec<(Arc, Vec<FerryId>)>,
    lookup: BTreeMap<(Node, Node), usize>,
}

impl SupergraphIndex {
    pub fn ferries_on(&self, from: Node, to: Node) -> &[FerryId] {
        self.lookup.get(&(from, to)).map_or(&[], |&i| self.arcs[i].1.as_slice())
    }

    pub fn contains(&self, from: Node, to: Node) -> bool {
        self.lookup.contains_key(&(from, to))
    }

    pub fn service_arcs(&self) -> impl Iterator<Item = &(Arc, Vec<FerryId>)> {
        self.arcs.iter().filter(|(a, _)| a.kind == ArcKind::Service)
    }
}

/// Builds the minimal supergraph `G` of the given ferry networks.
pub fn build_supergraph(networks: &[FerryFlowNetwork]) -> Result<SupergraphIndex, NetworkError> {
    if networks.windows(2).any(|w| w[0].mode != w[1].mode) {
        return Err(NetworkError::ModeMismatch);
    }
    let mut union: BTreeMap<Arc, Vec<FerryId>> = BTreeMap::new();
    for net in networks {
        for arc in &net.arcs {
            if matches!(arc.kind, ArcKind::Service | ArcKind::Waiting) {
                union.entry(*arc).or_default().push(net.ferry);
            }
        }
    }
    let arcs: Vec<(Arc, Vec<FerryId>)> = union
        .into_iter()
        .map(|(arc, mut ferries)| {
            ferries.sort();
            ferries.dedup();
            (arc, ferries)
        })
        .collect();
    let lookup = arcs.iter().enumerate().map(|(i, (a, _))| ((a.from, a.to), i)).collect();
    Ok(SupergraphIndex { arcs, lookup })
}

/// The commodity network `Omega^k` of passengers heading to port `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PassengerNetwork {
    pub destination: PortId,
    /// Arcs in canonical order.
    pub arcs: Vec<Arc>,
    nodes: Vec<Node>,
    /// Required net outflow per node: demand volume at origins, minus the
    /// total at `Zeta(k)`. Nodes not listed have zero supply.
    pub supplies: BTreeMap<Node, i64>,
    out_arcs: BTreeMap<Node, Vec<usize>>,
    in_arcs: BTreeMap<Node, Vec<usize>>,
}

impl PassengerNetwork {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn supply(&self, v: Node) -> i64 {
        self.supplies.get(&v).copied().unwrap_or(0)
    }

    pub fn total_demand(&self) -> i64 {
        -self.supply(Node::Zeta(self.destination))
    }

    pub fn outgoing(&self, v: Node) -> &[usize] {
        self.out_arcs.get(&v).map_or(&[], |v| v.as_slice())
    }

    pub fn incoming(&self, v: Node) -> &[usize] {
        self.in_arcs.get(&v).map_or(&[], |v| v.as_slice())
    }

    pub fn find(&self, from: Node, to: Node) -> Option<usize> {
        self.outgoing(from).iter().copied().find(|&i| self.arcs[i].to == to)
    }

    pub fn dump(&self) -> String {
        edge_list(&self.arcs)
    }
}

/// Builds `Omega^k`: supergraph arcs plus destination arcs into `Zeta(k)` and
/// infeasibility arcs from the last slot of every other port. Sinks of other
/// destinations carry no supply and are left out.
pub fn build_passenger_network(
    inst: &ProblemInstance,
    supergraph: &SupergraphIndex,
    k: PortId,
) -> Result<PassengerNetwork, NetworkError> {
    if k.0 == 0 || k.0 as usize > inst.ports().len() {
        return Err(NetworkError::UnknownPort(k));
    }
    let horizon = inst.horizon();
    let q = horizon.slots();
    let zeta = Node::Zeta(k);
    let mut arcs: Vec<Arc> = supergraph.arcs.iter().map(|(a, _)| *a).collect();
    // Waiting arcs belong to every ferry network; keep them even without ferries.
    if supergraph.arcs.is_empty() {
        for p in inst.port_ids() {
            for i in 1..q {
                arcs.push(Arc::new(ArcKind::Waiting, Node::at(p, i), Node::at(p, i + 1), horizon.delta()));
            }
        }
    }
    for i in 1..=q {
        arcs.push(Arc::new(ArcKind::Destination, Node::at(k, i), zeta, 0));
    }
    for s in inst.port_ids().filter(|&s| s != k) {
        arcs.push(Arc::new(ArcKind::Infeasibility, Node::at(s, q), zeta, 0));
    }
    arcs.sort();

    let mut nodes: Vec<Node> = inst.port_ids().flat_map(|p| (1..=q).map(move |i| Node::at(p, i))).collect();
    nodes.push(zeta);
    nodes.sort();

    let mut supplies: BTreeMap<Node, i64> = BTreeMap::new();
    let mut total = 0i64;
    for d in inst.demands().iter().filter(|d| d.destination == k) {
        *supplies.entry(Node::at(d.origin, d.slot)).or_insert(0) += d.volume as i64;
        total += d.volume as i64;
    }
    if total > 0 {
        supplies.insert(zeta, -total);
    }
    let (out_arcs, in_arcs) = index_arcs(&arcs);
    Ok(PassengerNetwork { destination: k, arcs, nodes, supplies, out_arcs, in_arcs })
}

/// Passenger networks of every destination that has demand, in port order.
pub fn build_all_passenger_networks(
    inst: &ProblemInstance,
    supergraph: &SupergraphIndex,
) -> Result<Vec<PassengerNetwork>, NetworkError> {
    let destinations = inst.demand_by_destination();
    destinations.keys().map(|&k| build_passenger_network(inst, supergraph, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Ferry, Horizon, InstanceBuilder};

    fn three_port_example(q: u32) -> ProblemInstance {
        InstanceBuilder::new(Horizon::new(300, 300 + 10 * q as Minutes, 10).unwrap())
            .port(1, 0)
            .port(1, 0)
            .port(1, 0)
            .ferry(Ferry::new(1, "F", 10, 1).both_ways(1, 2, 20).both_ways(1, 3, 30).both_ways(2, 3, 40))
            .mode(NetworkMode::Basic)
            .build()
            .unwrap()
    }

    #[test]
    fn service_arcs_land_at_ceiling_offsets() {
        let inst = three_port_example(6);
        let net = build_ferry_network(&inst, FerryId(1)).unwrap();
        let lands = |from: u16, to: u16| -> Vec<(u32, u32)> {
            net.arcs
                .iter()
                .filter(|a| a.kind == ArcKind::Service)
                .filter(|a| a.from.port() == Some(PortId(from)) && a.to.port() == Some(PortId(to)))
                .map(|a| (a.from.slot().unwrap(), a.to.slot().unwrap()))
                .collect()
        };
        assert_eq!(lands(1, 2), [(1, 3), (2, 4), (3, 5), (4, 6)]);
        assert_eq!(lands(1, 3), [(1, 4), (2, 5), (3, 6)]);
        assert_eq!(lands(2, 3), [(1, 5), (2, 6)]);
        let waiting = net.arcs.iter().filter(|a| a.kind == ArcKind::Waiting).count();
        assert_eq!(waiting, 3 * 5);
    }

    #[test]
    fn homeport_free_adds_in_and_out_port_arcs() {
        let inst = three_port_example(6);
        let inst = inst.with_costs(inst.costs().clone().with_mode(NetworkMode::HomeportFree)).unwrap();
        let net = build_ferry_network(&inst, FerryId(1)).unwrap();
        let count = |kind| net.arcs.iter().filter(|a| a.kind == kind).count();
        assert_eq!(count(ArcKind::InPort), 5);
        assert_eq!(count(ArcKind::OutPort), 5);
        assert_eq!(count(ArcKind::ShiftLink), 1);
        assert_eq!(net.divergence(Node::Alpha, 6), -1);
        assert_eq!(net.divergence(Node::Beta, 6), 1);
        assert_eq!(net.divergence(Node::at(PortId(1), 1), 6), 0);
    }

    #[test]
    fn two_shift_arcs_follow_the_window() {
        // Slots at 0,10,...,90; window [30, 60].
        let inst = InstanceBuilder::new(Horizon::new(0, 100, 10).unwrap())
            .port(1, 0)
            .port(1, 0)
            .ferry(Ferry::new(1, "F", 10, 1).both_ways(1, 2, 10))
            .mode(NetworkMode::TwoShift)
            .crew_window(30, 60)
            .build()
            .unwrap();
        let net = build_ferry_network(&inst, FerryId(1)).unwrap();
        let heads = |from: Node| -> Vec<String> {
            net.outgoing(from).iter().map(|&i| format!("{}", net.arcs[i].to)).collect()
        };
        assert_eq!(heads(Node::Alpha), ["1_1", "1_2", "1_3", "G"]);
        assert_eq!(heads(Node::Gamma), ["1_7", "1_8", "1_9", "B"]);
        let into_gamma: Vec<String> = net.incoming(Node::Gamma).iter().map(|&i| format!("{}", net.arcs[i].from)).collect();
        assert_eq!(into_gamma, ["1_2", "1_3", "1_4", "A"]);
        let into_beta: Vec<String> = net.incoming(Node::Beta).iter().map(|&i| format!("{}", net.arcs[i].from)).collect();
        assert_eq!(into_beta, ["1_8", "1_9", "1_10", "G"]);
    }

    #[test]
    fn two_shift_without_inner_waiting_arc_is_a_config_error() {
        let inst = InstanceBuilder::new(Horizon::new(0, 100, 10).unwrap())
            .port(1, 0)
            .ferry(Ferry::new(1, "F", 10, 1))
            .mode(NetworkMode::TwoShift)
            .crew_window(31, 39)
            .build()
            .unwrap();
        assert!(matches!(build_ferry_network(&inst, FerryId(1)), Err(NetworkError::Config(_))));
    }

    #[test]
    fn supergraph_records_owning_ferries() {
        let inst = InstanceBuilder::new(Horizon::new(0, 80, 10).unwrap())
            .port(1, 0)
            .port(1, 0)
            .ferry(Ferry::new(1, "A", 10, 1).route(1, 2, 20))
            .ferry(Ferry::new(2, "B", 10, 1).route(1, 2, 30))
            .build()
            .unwrap();
        let nets = build_all_ferry_networks(&inst).unwrap();
        let sg = build_supergraph(&nets).unwrap();
        let p1 = |i| Node::at(PortId(1), i);
        let p2 = |i| Node::at(PortId(2), i);
        assert_eq!(sg.ferries_on(p1(1), p2(3)), [FerryId(1)]);
        assert_eq!(sg.ferries_on(p1(1), p2(4)), [FerryId(2)]);
        assert_eq!(sg.ferries_on(p1(1), p1(2)), [FerryId(1), FerryId(2)]);
        assert!(sg.arcs.iter().all(|(a, _)| a.from.port_time().is_some() && a.to.port_time().is_some()));
    }

    #[test]
    fn passenger_network_supplies_balance() {
        let inst = InstanceBuilder::new(Horizon::new(0, 60, 10).unwrap())
            .port(1, 0)
            .port(1, 0)
            .port(1, 0)
            .ferry(Ferry::new(1, "A", 10, 1).both_ways(1, 3, 10).both_ways(2, 3, 10))
            .demand(1, 3, 10, 5)
            .demand(2, 3, 30, 3)
            .build()
            .unwrap();
        let nets = build_all_ferry_networks(&inst).unwrap();
        let sg = build_supergraph(&nets).unwrap();
        let pax = build_passenger_network(&inst, &sg, PortId(3)).unwrap();
        assert_eq!(pax.supply(Node::at(PortId(1), 2)), 5);
        assert_eq!(pax.supply(Node::at(PortId(2), 4)), 3);
        assert_eq!(pax.supply(Node::Zeta(PortId(3))), -8);
        assert_eq!(pax.supplies.values().sum::<i64>(), 0);
        let infeasible: Vec<String> =
            pax.arcs.iter().filter(|a| a.kind == ArcKind::Infeasibility).map(|a| format!("{}", a.from)).collect();
        assert_eq!(infeasible, ["1_6", "2_6"]);
        let dest = pax.arcs.iter().filter(|a| a.kind == ArcKind::Destination).count();
        assert_eq!(dest, 6);
        assert!(pax.arcs.iter().all(|a| a.to != Node::Zeta(PortId(1)) && a.to != Node::Zeta(PortId(2))));
    }
}
