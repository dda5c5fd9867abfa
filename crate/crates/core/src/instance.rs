//! Problem instance: ports, ferries, demands, planning horizon and cost
//! parameters, validated once at construction and immutable afterwards.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::num::{int, Rational};

/// Clock time or duration in minutes.
pub type Minutes = i64;

/// Port index in `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortId(pub u16);

/// Ferry index in `1..=m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FerryId(pub u16);

impl fmt::Display for PortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FerryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("invariant violated at {path}: {message}")]
    Invariant { path: String, message: String },
}

impl InstanceError {
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        InstanceError::Schema { path: path.into(), message: message.into() }
    }

    pub fn invariant(path: impl Into<String>, message: impl Into<String>) -> Self {
        InstanceError::Invariant { path: path.into(), message: message.into() }
    }

    pub fn path(&self) -> &str {
        match self {
            InstanceError::Schema { path, .. } | InstanceError::Invariant { path, .. } => path,
        }
    }
}

/// Formats clock minutes as `HH:MM`. Midnight at the end of a day prints as `24:00`.
pub fn format_clock(minutes: Minutes) -> String {
    let sign = if minutes < 0 { "-" } else { "" };
    let m = minutes.abs();
    format!("{sign}{:02}:{:02}", m / 60, m % 60)
}

/// Parses `HH:MM` into clock minutes. Hours may exceed 23 (e.g. `24:00`).
pub fn parse_clock(text: &str) -> Option<Minutes> {
    let (h, m) = text.trim().split_once(':')?;
    if h.is_empty() || m.len() != 2 || !h.bytes().chain(m.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let h: Minutes = h.parse().ok()?;
    let m: Minutes = m.parse().ok()?;
    if m >= 60 {
        return None;
    }
    Some(h * 60 + m)
}

/// Discretised planning horizon `[start, end]` with step `delta`.
///
/// Slot `i` (1-based) represents time `start + delta * (i - 1)`; there are
/// `q = (end - start) / delta` slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Horizon {
    start: Minutes,
    end: Minutes,
    delta: Minutes,
}

impl Horizon {
    pub fn new(start: Minutes, end: Minutes, delta: Minutes) -> Result<Self, InstanceError> {
        if delta <= 0 {
            return Err(InstanceError::invariant("horizon.delta", "time step must be positive"));
        }
        if end <= start {
            return Err(InstanceError::invariant("horizon.end", "horizon end must come after its start"));
        }
        if (end - start) % delta != 0 {
            return Err(InstanceError::invariant(
                "horizon",
                format!("horizon length {} is not divisible by the time step {}", end - start, delta),
            ));
        }
        if (end - start) / delta < 2 {
            return Err(InstanceError::invariant("horizon", "horizon must contain at least two time slots"));
        }
        Ok(Horizon { start, end, delta })
    }

    pub fn start(&self) -> Minutes {
        self.start
    }

    pub fn end(&self) -> Minutes {
        self.end
    }

    pub fn delta(&self) -> Minutes {
        self.delta
    }

    /// Number of time slots `q`.
    pub fn slots(&self) -> u32 {
        ((self.end - self.start) / self.delta) as u32
    }

    /// Clock time of a slot.
    pub fn time_of(&self, slot: u32) -> Minutes {
        self.start + self.delta * (slot as Minutes - 1)
    }

    /// Earliest slot whose time is at or after `t`, clamped to `1..=q`.
    pub fn slot_at_or_after(&self, t: Minutes) -> u32 {
        if t <= self.start {
            return 1;
        }
        let offset = t - self.start;
        let steps = (offset + self.delta - 1) / self.delta;
        (steps as u32 + 1).min(self.slots())
    }

    /// Slot reached when leaving `from` with a trip of `travel` minutes.
    /// May exceed `q`, in which case no arc exists.
    pub fn landing_slot(&self, from: u32, travel: Minutes) -> u32 {
        let steps = (travel + self.delta - 1) / self.delta;
        from + steps.max(0) as u32
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Port {
    pub id: PortId,
    pub name: String,
    /// Number of ferries that may be docked simultaneously.
    pub berths: u32,
    /// Slots a transferring passenger needs between two ferries.
    pub transfer_slots: u32,
}

impl Port {
    pub fn new(id: u16, name: impl Into<String>, berths: u32, transfer_slots: u32) -> Self {
        Port { id: PortId(id), name: name.into(), berths, transfer_slots }
    }
}

/// A vessel with its own speed table, costs and home port.
///
/// Monetary rates are stored per minute as exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ferry {
    pub id: FerryId,
    pub name: String,
    /// Capacity in automobile equivalents (AEQ).
    pub capacity: u64,
    pub home: PortId,
    pub moving_rate: Rational,
    pub docked_rate: Rational,
    pub shift_salary: Rational,
    /// Minimum number of waiting slots after arriving at a port.
    pub dwell: BTreeMap<PortId, u32>,
    /// Travel minutes for every allowed direct service `(from, to)`.
    pub travel: BTreeMap<(PortId, PortId), Minutes>,
}

impl Ferry {
    pub fn new(id: u16, name: impl Into<String>, capacity: u64, home: u16) -> Self {
        Ferry {
            id: FerryId(id),
            name: name.into(),
            capacity,
            home: PortId(home),
            moving_rate: Rational::zero(),
            docked_rate: Rational::zero(),
            shift_salary: Rational::zero(),
            dwell: BTreeMap::new(),
            travel: BTreeMap::new(),
        }
    }

    /// Sets operating costs given per hour.
    pub fn rates_per_hour(mut self, moving: Rational, docked: Rational) -> Self {
        self.moving_rate = moving / int(60);
        self.docked_rate = docked / int(60);
        self
    }

    pub fn shift_salary(mut self, salary: Rational) -> Self {
        self.shift_salary = salary;
        self
    }

    pub fn dwell(mut self, port: u16, slots: u32) -> Self {
        self.dwell.insert(PortId(port), slots);
        self
    }

    pub fn route(mut self, from: u16, to: u16, minutes: Minutes) -> Self {
        self.travel.insert((PortId(from), PortId(to)), minutes);
        self
    }

    /// Adds the same travel time in both directions.
    pub fn both_ways(self, a: u16, b: u16, minutes: Minutes) -> Self {
        self.route(a, b, minutes).route(b, a, minutes)
    }

    pub fn dwell_slots(&self, port: PortId) -> u32 {
        self.dwell.get(&port).copied().unwrap_or(0)
    }

    pub fn travel_minutes(&self, from: PortId, to: PortId) -> Option<Minutes> {
        self.travel.get(&(from, to)).copied()
    }

    pub fn moving_rate_per_hour(&self) -> Rational {
        &self.moving_rate * int(60)
    }

    pub fn docked_rate_per_hour(&self) -> Rational {
        &self.docked_rate * int(60)
    }

    /// Whether the ferry can arrive at `port` by a direct service.
    pub fn serves(&self, port: PortId) -> bool {
        self.travel.keys().any(|&(_, to)| to == port)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Demand {
    pub origin: PortId,
    pub destination: PortId,
    /// Requested departure time as given.
    pub time: Minutes,
    /// Volume in AEQ.
    pub volume: u64,
    /// Grid slot the demand is attached to (earliest slot at or after `time`).
    pub slot: u32,
}

impl Demand {
    /// A demand not yet attached to a grid; the slot is filled in by
    /// [`ProblemInstance::new`].
    pub fn new(origin: u16, destination: u16, time: Minutes, volume: u64) -> Self {
        Demand { origin: PortId(origin), destination: PortId(destination), time, volume, slot: 0 }
    }
}

/// Shape of the ferry networks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NetworkMode {
    /// Ferries start at the first and end at the last home-port slot.
    Basic,
    /// Ferries enter and leave their home port through free in/out-port arcs.
    HomeportFree,
    /// Two crew shifts with a home-port crew exchange inside the crew window.
    TwoShift,
}

/// Formulation of the minimum load/unload time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DwellForm {
    Full,
    Simplified,
}

/// Formulation of the passenger transfer time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransferForm {
    Full,
    Single,
}

impl NetworkMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NetworkMode::Basic => "BASIC",
            NetworkMode::HomeportFree => "HOMEPORT_FREE",
            NetworkMode::TwoShift => "TWO_SHIFT",
        }
    }
}

impl DwellForm {
    pub fn as_str(self) -> &'static str {
        match self {
            DwellForm::Full => "FULL",
            DwellForm::Simplified => "SIMPLIFIED",
        }
    }
}

impl TransferForm {
    pub fn as_str(self) -> &'static str {
        match self {
            TransferForm::Full => "FULL",
            TransferForm::Single => "SINGLE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostParams {
    /// Weight of the ferry operating cost.
    pub lambda: Rational,
    /// Weight of the passenger travel time and penalties.
    pub nu: Rational,
    /// Penalty per AEQ on infeasibility arcs (and crew-window waiting arcs).
    pub big_m: Rational,
    pub crew_window: Option<(Minutes, Minutes)>,
    pub mode: NetworkMode,
    pub dwell_form: DwellForm,
    pub transfer_form: TransferForm,
}

impl CostParams {
    /// `lambda = nu = 1`, `M = 10 * (L - l)`, home-port-free networks, full forms.
    pub fn defaults(horizon: &Horizon) -> Self {
        CostParams {
            lambda: int(1),
            nu: int(1),
            big_m: int(10 * (horizon.end() - horizon.start())),
            crew_window: None,
            mode: NetworkMode::HomeportFree,
            dwell_form: DwellForm::Full,
            transfer_form: TransferForm::Full,
        }
    }

    pub fn with_mode(mut self, mode: NetworkMode) -> Self {
        self.mode = mode;
        self
    }
}

/// A validated ferry scheduling instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemInstance {
    ports: Vec<Port>,
    ferries: Vec<Ferry>,
    demands: Vec<Demand>,
    horizon: Horizon,
    costs: CostParams,
    simplified_dwell_ok: BTreeMap<(FerryId, PortId), bool>,
    warnings: Vec<String>,
}

impl ProblemInstance {
    /// Validates all invariants and snaps demand times onto the slot grid.
    pub fn new(
        mut ports: Vec<Port>,
        mut ferries: Vec<Ferry>,
        mut demands: Vec<Demand>,
        horizon: Horizon,
        costs: CostParams,
    ) -> Result<Self, InstanceError> {
        ports.sort_by_key(|p| p.id);
        for (i, port) in ports.iter().enumerate() {
            if port.id.0 as usize != i + 1 {
                return Err(InstanceError::invariant(
                    format!("ports[{i}].id"),
                    "port ids must be contiguous starting at 1",
                ));
            }
            if port.berths < 1 {
                return Err(InstanceError::invariant(format!("ports[{i}].berths"), "a port needs at least one berth"));
            }
        }
        let n = ports.len() as u16;
        let valid_port = |p: PortId| p.0 >= 1 && p.0 <= n;

        ferries.sort_by_key(|f| f.id);
        for (i, ferry) in ferries.iter().enumerate() {
            let path = |field: &str| format!("ferries[{i}].{field}");
            if ferry.id.0 as usize != i + 1 {
                return Err(InstanceError::invariant(path("id"), "ferry ids must be contiguous starting at 1"));
            }
            if ferry.capacity < 1 {
                return Err(InstanceError::invariant(path("capacity"), "capacity must be positive"));
            }
            if !valid_port(ferry.home) {
                return Err(InstanceError::invariant(path("home"), format!("unknown port {}", ferry.home)));
            }
            for (field, rate) in [
                ("cost_moving_per_hour", &ferry.moving_rate),
                ("cost_docked_per_hour", &ferry.docked_rate),
                ("shift_salary", &ferry.shift_salary),
            ] {
                if rate.is_negative() {
                    return Err(InstanceError::invariant(path(field), "cost must be nonnegative"));
                }
            }
            for port in ferry.dwell.keys() {
                if !valid_port(*port) {
                    return Err(InstanceError::invariant(path(&format!("dwell.{port}")), "unknown port"));
                }
            }
            for (&(from, to), &minutes) in &ferry.travel {
                let key = path(&format!("travel.{from}-{to}"));
                if !valid_port(from) || !valid_port(to) {
                    return Err(InstanceError::invariant(key, "unknown port"));
                }
                if from == to {
                    return Err(InstanceError::invariant(key, "travel time between a port and itself"));
                }
                if minutes < 1 {
                    return Err(InstanceError::invariant(key, "travel time must be positive"));
                }
            }
        }

        for (i, demand) in demands.iter_mut().enumerate() {
            let path = |field: &str| format!("demands[{i}].{field}");
            if !valid_port(demand.origin) {
                return Err(InstanceError::invariant(path("from"), "unknown port"));
            }
            if !valid_port(demand.destination) {
                return Err(InstanceError::invariant(path("to"), "unknown port"));
            }
            if demand.origin == demand.destination {
                return Err(InstanceError::invariant(path("to"), "origin and destination coincide"));
            }
            if demand.time < horizon.start() || demand.time > horizon.end() {
                return Err(InstanceError::invariant(path("time"), "departure time outside the planning horizon"));
            }
            if demand.volume < 1 {
                return Err(InstanceError::invariant(path("aeq"), "volume must be at least 1 AEQ"));
            }
            demand.slot = horizon.slot_at_or_after(demand.time);
        }

        if costs.lambda.is_negative() {
            return Err(InstanceError::invariant("costs.lambda", "must be nonnegative"));
        }
        if costs.nu.is_negative() {
            return Err(InstanceError::invariant("costs.nu", "must be nonnegative"));
        }
        if costs.big_m <= int(horizon.end() - horizon.start()) {
            return Err(InstanceError::invariant("costs.big_m", "must exceed the horizon length in minutes"));
        }
        if let Some((t1, t2)) = costs.crew_window {
            if t1 >= t2 {
                return Err(InstanceError::invariant("costs.crew_window", "window start must precede its end"));
            }
            if t1 <= horizon.start() || t2 >= horizon.end() {
                return Err(InstanceError::invariant(
                    "costs.crew_window",
                    "window must lie strictly inside the horizon",
                ));
            }
        } else if costs.mode == NetworkMode::TwoShift {
            return Err(InstanceError::invariant("costs.crew_window", "TWO_SHIFT mode requires a crew window"));
        }

        // Passengers transferring at a port must not need longer than any
        // arriving ferry stays there.
        for (i, port) in ports.iter().enumerate() {
            if port.transfer_slots == 0 {
                continue;
            }
            for ferry in ferries.iter().filter(|f| f.serves(port.id)) {
                if port.transfer_slots > ferry.dwell_slots(port.id) {
                    return Err(InstanceError::invariant(
                        format!("ports[{i}].transfer_slots"),
                        format!(
                            "transfer time {} exceeds the dwell time {} of ferry {} at port {}",
                            port.transfer_slots,
                            ferry.dwell_slots(port.id),
                            ferry.id,
                            port.id
                        ),
                    ));
                }
            }
        }

        let mut simplified_dwell_ok = BTreeMap::new();
        for ferry in &ferries {
            for port in &ports {
                let w = ferry.dwell_slots(port.id) as Minutes;
                let ok = ferry
                    .travel
                    .iter()
                    .filter(|(&(from, _), _)| from == port.id)
                    .all(|(_, &minutes)| w == 0 || w * horizon.delta() < minutes);
                simplified_dwell_ok.insert((ferry.id, port.id), ok);
            }
        }

        let mut warnings = Vec::new();
        let reach = route_reachability(&ports, &ferries);
        let mut reported = BTreeSet::new();
        for demand in &demands {
            let key = (demand.origin, demand.destination);
            if !reach.contains(&key) && reported.insert(key) {
                warnings.push(format!(
                    "demand from port {} to port {} is not reachable by any ferry route",
                    demand.origin, demand.destination
                ));
            }
        }

        Ok(ProblemInstance { ports, ferries, demands, horizon, costs, simplified_dwell_ok, warnings })
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn ferries(&self) -> &[Ferry] {
        &self.ferries
    }

    pub fn demands(&self) -> &[Demand] {
        &self.demands
    }

    pub fn horizon(&self) -> &Horizon {
        &self.horizon
    }

    pub fn costs(&self) -> &CostParams {
        &self.costs
    }

    pub fn port(&self, id: PortId) -> &Port {
        &self.ports[id.0 as usize - 1]
    }

    pub fn ferry(&self, id: FerryId) -> &Ferry {
        &self.ferries[id.0 as usize - 1]
    }

    pub fn port_ids(&self) -> impl Iterator<Item = PortId> + '_ {
        self.ports.iter().map(|p| p.id)
    }

    pub fn ferry_ids(&self) -> impl Iterator<Item = FerryId> + '_ {
        self.ferries.iter().map(|f| f.id)
    }

    /// Whether `w * delta < T(k, h)` holds for every route of `ferry` leaving `port`.
    pub fn simplified_dwell_ok(&self, ferry: FerryId, port: PortId) -> bool {
        self.simplified_dwell_ok.get(&(ferry, port)).copied().unwrap_or(true)
    }

    /// Non-fatal findings from validation (e.g. unreachable demand).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Rebuilds the instance with different cost parameters.
    pub fn with_costs(&self, costs: CostParams) -> Result<Self, InstanceError> {
        ProblemInstance::new(
            self.ports.clone(),
            self.ferries.clone(),
            self.demands.clone(),
            self.horizon.clone(),
            costs,
        )
    }

    /// Total demand volume per destination port.
    pub fn demand_by_destination(&self) -> BTreeMap<PortId, u64> {
        let mut out = BTreeMap::new();
        for d in &self.demands {
            *out.entry(d.destination).or_insert(0) += d.volume;
        }
        out
    }
}

/// Sum of all demand volumes in AEQ.
pub fn total_demand_aeq(inst: &ProblemInstance) -> u64 {
    inst.demands.iter().map(|d| d.volume).sum()
}

fn route_reachability(ports: &[Port], ferries: &[Ferry]) -> BTreeSet<(PortId, PortId)> {
    let mut adjacency: BTreeMap<PortId, BTreeSet<PortId>> = BTreeMap::new();
    for ferry in ferries {
        for &(from, to) in ferry.travel.keys() {
            adjacency.entry(from).or_default().insert(to);
        }
    }
    let mut out = BTreeSet::new();
    for port in ports {
        let mut stack = alloc::vec![port.id];
        let mut seen = BTreeSet::new();
        while let Some(p) = stack.pop() {
            for &next in adjacency.get(&p).into_iter().flatten() {
                if seen.insert(next) {
                    out.insert((port.id, next));
                    stack.push(next);
                }
            }
        }
    }
    out
}

/// Convenience builder used by generators and tests.
#[derive(Clone, Debug)]
pub struct InstanceBuilder {
    horizon: Horizon,
    ports: Vec<Port>,
    ferries: Vec<Ferry>,
    demands: Vec<Demand>,
    costs: CostParams,
}

impl InstanceBuilder {
    pub fn new(horizon: Horizon) -> Self {
        let costs = CostParams::defaults(&horizon);
        InstanceBuilder { horizon, ports: Vec::new(), ferries: Vec::new(), demands: Vec::new(), costs }
    }

    /// Adds a port with the next free id.
    pub fn port(mut self, berths: u32, transfer_slots: u32) -> Self {
        let id = self.ports.len() as u16 + 1;
        self.ports.push(Port::new(id, format!("P{id}"), berths, transfer_slots));
        self
    }

    pub fn ferry(mut self, ferry: Ferry) -> Self {
        self.ferries.push(ferry);
        self
    }

    pub fn demand(mut self, origin: u16, destination: u16, time: Minutes, volume: u64) -> Self {
        self.demands.push(Demand::new(origin, destination, time, volume));
        self
    }

    pub fn costs(mut self, costs: CostParams) -> Self {
        self.costs = costs;
        self
    }

    pub fn mode(mut self, mode: NetworkMode) -> Self {
        self.costs.mode = mode;
        self
    }

    pub fn dwell_form(mut self, form: DwellForm) -> Self {
        self.costs.dwell_form = form;
        self
    }

    pub fn transfer_form(mut self, form: TransferForm) -> Self {
        self.costs.transfer_form = form;
        self
    }

    pub fn crew_window(mut self, t1: Minutes, t2: Minutes) -> Self {
        self.costs.crew_window = Some((t1, t2));
        self
    }

    pub fn horizon(&self) -> &Horizon {
        &self.horizon
    }

    pub fn cost_params(&self) -> &CostParams {
        &self.costs
    }

    pub fn build(self) -> Result<ProblemInstance, InstanceError> {
        ProblemInstance::new(self.ports, self.ferries, self.demands, self.horizon, self.costs)
    }
}

impl fmt::Display for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ports, {} ferries, {} demands ({} AEQ), {} slots of {} min from {}",
            self.ports.len(),
            self.ferries.len(),
            self.demands.len(),
            total_demand_aeq(self),
            self.horizon.slots(),
            self.horizon.delta(),
            format_clock(self.horizon.start())
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_port(delta: Minutes) -> InstanceBuilder {
        InstanceBuilder::new(Horizon::new(300, 420, delta).unwrap())
            .port(1, 0)
            .port(1, 0)
            .ferry(Ferry::new(1, "A", 10, 1).both_ways(1, 2, 20))
    }

    #[test]
    fn slot_count_follows_horizon_length() {
        let inst = two_port(10).demand(1, 2, 300, 1).build().unwrap();
        assert_eq!(inst.horizon().slots(), (420 - 300) / 10);
        // 5:00am to midnight in 10 minute steps.
        let day = Horizon::new(5 * 60, 24 * 60, 10).unwrap();
        assert_eq!(day.slots(), 114);
        assert_eq!(day.time_of(1), 300);
        assert_eq!(day.time_of(114), 24 * 60 - 10);
    }

    #[test]
    fn demand_snaps_up_to_next_grid_time() {
        let inst = two_port(10).demand(1, 2, 303, 2).demand(1, 2, 310, 1).demand(1, 2, 300, 1).build().unwrap();
        let slots: Vec<u32> = inst.demands().iter().map(|d| d.slot).collect();
        assert_eq!(slots, [2, 2, 1]);
        assert_eq!(inst.horizon().time_of(2), 310);
        // Past the last slot the demand stays on the final node.
        let late = two_port(10).demand(1, 2, 420, 1).build().unwrap();
        assert_eq!(late.demands()[0].slot, 12);
    }

    #[test]
    fn total_demand_sums_volumes() {
        assert_eq!(total_demand_aeq(&two_port(10).build().unwrap()), 0);
        let inst = two_port(10).demand(1, 2, 300, 3).demand(2, 1, 330, 5).build().unwrap();
        assert_eq!(total_demand_aeq(&inst), 8);
    }

    #[test]
    fn rejects_bad_horizon_and_ports() {
        assert!(matches!(Horizon::new(300, 425, 10), Err(InstanceError::Invariant { .. })));
        assert!(Horizon::new(300, 310, 10).is_err());
        assert!(Horizon::new(300, 320, 0).is_err());
        let err = InstanceBuilder::new(Horizon::new(0, 60, 10).unwrap()).port(0, 0).build().unwrap_err();
        assert_eq!(err.path(), "ports[0].berths");
    }

    #[test]
    fn rejects_bad_demands() {
        let err = two_port(10).demand(1, 1, 300, 1).build().unwrap_err();
        assert_eq!(err.path(), "demands[0].to");
        let err = two_port(10).demand(1, 2, 500, 1).build().unwrap_err();
        assert_eq!(err.path(), "demands[0].time");
        let err = two_port(10).demand(1, 2, 300, 0).build().unwrap_err();
        assert_eq!(err.path(), "demands[0].aeq");
    }

    #[test]
    fn transfer_time_must_fit_dwell_time() {
        let builder = InstanceBuilder::new(Horizon::new(0, 100, 10).unwrap())
            .port(1, 0)
            .port(1, 2)
            .ferry(Ferry::new(1, "A", 10, 1).both_ways(1, 2, 10).dwell(2, 1));
        let err = builder.build().unwrap_err();
        assert_eq!(err.path(), "ports[1].transfer_slots");
        let ok = InstanceBuilder::new(Horizon::new(0, 100, 10).unwrap())
            .port(1, 0)
            .port(1, 2)
            .ferry(Ferry::new(1, "A", 10, 1).both_ways(1, 2, 10).dwell(2, 2));
        assert!(ok.build().is_ok());
    }

    #[test]
    fn two_shift_needs_window_inside_horizon() {
        let err = two_port(10).mode(NetworkMode::TwoShift).build().unwrap_err();
        assert_eq!(err.path(), "costs.crew_window");
        assert!(two_port(10).mode(NetworkMode::TwoShift).crew_window(300, 360).build().is_err());
        assert!(two_port(10).mode(NetworkMode::TwoShift).crew_window(330, 360).build().is_ok());
    }

    #[test]
    fn big_m_must_dominate_horizon() {
        let mut builder = two_port(10);
        let mut costs = builder.cost_params().clone();
        assert_eq!(costs.big_m, int(1200));
        costs.big_m = int(120);
        builder = builder.costs(costs);
        assert_eq!(builder.build().unwrap_err().path(), "costs.big_m");
    }

    #[test]
    fn records_simplified_dwell_flag_and_warnings() {
        let inst = InstanceBuilder::new(Horizon::new(0, 100, 10).unwrap())
            .port(1, 0)
            .port(1, 0)
            .port(1, 0)
            .ferry(Ferry::new(1, "A", 10, 1).both_ways(1, 2, 20).dwell(1, 1).dwell(2, 2))
            .demand(1, 3, 0, 1)
            .build()
            .unwrap();
        assert!(inst.simplified_dwell_ok(FerryId(1), PortId(1)));
        assert!(!inst.simplified_dwell_ok(FerryId(1), PortId(2)));
        assert_eq!(inst.warnings().len(), 1);
    }

    #[test]
    fn clock_text_round_trips() {
        assert_eq!(format_clock(300), "05:00");
        assert_eq!(format_clock(1440), "24:00");
        assert_eq!(parse_clock("05:03"), Some(303));
        assert_eq!(parse_clock("24:00"), Some(1440));
        assert_eq!(parse_clock("5:3"), None);
        assert_eq!(parse_clock("05:60"), None);
    }

    #[test]
    fn rates_are_stored_per_minute() {
        let f = Ferry::new(1, "A", 10, 1).rates_per_hour(int(120), int(60));
        assert_eq!(f.moving_rate, int(2));
        assert_eq!(f.docked_rate, int(1));
        assert_eq!(f.moving_rate_per_hour(), int(120));
    }
}
