//! LP-based branch-and-bound for [`IpModel`]s.
//!
//! Children reuse a snapshot of the parent's simplex and reoptimise with the
//! dual simplex after one bound change. Exact rational arithmetic is the
//! default; floating point is opt-in, in which case integral candidates are
//! rounded and re-checked exactly before they become incumbents.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use num_traits::{Signed, Zero};

use crate::lp::{LpError, LpStatus, Scalar, Simplex};
use crate::model::{IpModel, VarKind, VarRole};
use crate::num::{self, Rational};

/// Source of elapsed wall time for time limits.
pub trait Clock {
    fn elapsed_secs(&self) -> f64;
}

/// A clock that never advances; time limits are then never reached.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_secs(&self) -> f64 {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchRule {
    /// Most fractional ferry variable, then most fractional passenger variable.
    MostFractionalYFirst,
    /// Pseudocost product score, falling back to most fractional.
    Pseudo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchOrder {
    BestBound,
    Dfs,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub time_limit_s: Option<f64>,
    /// Relative gap at which the search stops.
    pub gap_tol: f64,
    pub node_limit: Option<u64>,
    pub branch_rule: BranchRule,
    pub search: SearchOrder,
    /// Full value vector in model column order.
    pub warm_start: Option<Vec<Rational>>,
    /// Floating-point simplex instead of exact rationals.
    pub float: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            time_limit_s: None,
            gap_tol: 1e-9,
            node_limit: None,
            branch_rule: BranchRule::MostFractionalYFirst,
            search: SearchOrder::BestBound,
            warm_start: None,
            float: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MipStatus {
    Optimal,
    FeasibleGap,
    Infeasible,
    TimeoutNoIncumbent,
}

impl MipStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            MipStatus::Optimal => "OPTIMAL",
            MipStatus::FeasibleGap => "FEASIBLE_GAP",
            MipStatus::Infeasible => "INFEASIBLE",
            MipStatus::TimeoutNoIncumbent => "TIMEOUT_NO_INCUMBENT",
        }
    }
}

/// Global bound and incumbent after a processed node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundEvent {
    pub node: u64,
    pub bound: Rational,
    pub incumbent: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MipResult {
    pub status: MipStatus,
    pub values: Option<Vec<Rational>>,
    pub objective: Option<Rational>,
    /// Best proven lower bound.
    pub bound: Rational,
    /// `(objective - bound) / |objective|`, zero when they coincide.
    pub gap: Option<Rational>,
    pub nodes: u64,
    pub pivots: u64,
    pub elapsed_s: f64,
    pub trace: Vec<BoundEvent>,
}

impl MipResult {
    pub fn gap_f64(&self) -> Option<f64> {
        self.gap.as_ref().map(num::to_f64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MipError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("warm start rejected: {0}")]
    WarmStart(String),
    #[error("LP relaxation is unbounded")]
    Unbounded,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Relative gap between an incumbent and a lower bound.
pub fn relative_gap(incumbent: &Rational, bound: &Rational) -> Rational {
    let diff = incumbent - bound;
    if diff.is_zero() {
        return <Rational as Zero>::zero();
    }
    if incumbent.is_zero() {
        // Any positive difference against a zero objective is unbounded in relative terms.
        return Rational::from_integer(i64::MAX.into());
    }
    diff / Signed::abs(incumbent)
}

impl SolverConfig {
    pub fn check(&self, n_vars: usize) -> Result<(), MipError> {
        if let Some(t) = self.time_limit_s {
            if t.is_nan() || t <= 0.0 {
                return Err(MipError::Config("time limit must be positive".into()));
            }
        }
        if self.node_limit == Some(0) {
            return Err(MipError::Config("node limit must be positive".into()));
        }
        if self.gap_tol.is_nan() || self.gap_tol < 0.0 {
            return Err(MipError::Config("gap tolerance must be nonnegative".into()));
        }
        if let Some(w) = &self.warm_start {
            if w.len() != n_vars {
                return Err(MipError::WarmStart(format!("expected {n_vars} values, got {}", w.len())));
            }
        }
        Ok(())
    }
}

/// Solves `model` without a wall clock (time limits are ignored).
pub fn solve_mip(model: &IpModel, config: &SolverConfig) -> Result<MipResult, MipError> {
    solve_mip_with_clock(model, config, &NoClock)
}

pub fn solve_mip_with_clock(model: &IpModel, config: &SolverConfig, clock: &dyn Clock) -> Result<MipResult, MipError> {
    config.check(model.variables.len())?;
    if config.float {
        BranchAndBound::<f64>::new(model, config, clock).run()
    } else {
        BranchAndBound::<Rational>::new(model, config, clock).run()
    }
}

struct Pending<F: Scalar> {
    bound: Rational,
    id: u64,
    parent: Rc<Simplex<F>>,
    change: Option<Change>,
}

#[derive(Clone)]
struct Change {
    var: usize,
    up: bool,
    /// Distance from the parent value to the new bound.
    distance: f64,
    parent_objective: f64,
}

impl<F: Scalar> PartialEq for Pending<F> {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}

impl<F: Scalar> Eq for Pending<F> {}

impl<F: Scalar> PartialOrd for Pending<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<F: Scalar> Ord for Pending<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.bound, self.id).cmp(&(&other.bound, other.id))
    }
}

enum Queue<F: Scalar> {
    Best(BinaryHeap<Reverse<Pending<F>>>),
    Stack(Vec<Pending<F>>),
}

impl<F: Scalar> Queue<F> {
    fn push(&mut self, p: Pending<F>) {
        match self {
            Queue::Best(h) => h.push(Reverse(p)),
            Queue::Stack(s) => s.push(p),
        }
    }

    fn pop(&mut self) -> Option<Pending<F>> {
        match self {
            Queue::Best(h) => h.pop().map(|r| r.0),
            Queue::Stack(s) => s.pop(),
        }
    }

    fn min_bound(&self) -> Option<Rational> {
        match self {
            Queue::Best(h) => h.peek().map(|r| r.0.bound.clone()),
            Queue::Stack(s) => s.iter().map(|p| &p.bound).min().cloned(),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            Queue::Best(h) => h.is_empty(),
            Queue::Stack(s) => s.is_empty(),
        }
    }
}

#[derive(Clone, Default)]
struct Pseudocost {
    down_sum: f64,
    down_n: u32,
    up_sum: f64,
    up_n: u32,
}

struct BranchAndBound<'a, F: Scalar> {
    model: &'a IpModel,
    config: &'a SolverConfig,
    clock: &'a dyn Clock,
    incumbent: Option<(Rational, Vec<Rational>)>,
    trace: Vec<BoundEvent>,
    nodes: u64,
    pivots: u64,
    next_id: u64,
    pseudo: BTreeMap<usize, Pseudocost>,
    _scalar: core::marker::PhantomData<F>,
}

impl<'a, F: Scalar> BranchAndBound<'a, F> {
    fn new(model: &'a IpModel, config: &'a SolverConfig, clock: &'a dyn Clock) -> Self {
        BranchAndBound {
            model,
            config,
            clock,
            incumbent: None,
            trace: Vec::new(),
            nodes: 0,
            pivots: 0,
            next_id: 0,
            pseudo: BTreeMap::new(),
            _scalar: core::marker::PhantomData,
        }
    }

    fn incumbent_value(&self) -> Option<&Rational> {
        self.incumbent.as_ref().map(|(v, _)| v)
    }

    /// Whether a node with LP value `bound` cannot improve the incumbent.
    fn dominated(&self, bound: &Rational) -> bool {
        match self.incumbent_value() {
            None => false,
            Some(inc) if F::EXACT => bound >= inc,
            Some(inc) => {
                let slack = 1e-9 * num::to_f64(inc).abs().max(1.0);
                num::to_f64(bound) >= num::to_f64(inc) - slack
            }
        }
    }

    fn gap_reached(&self, bound: &Rational) -> bool {
        match self.incumbent_value() {
            None => false,
            Some(inc) => num::to_f64(&relative_gap(inc, bound)) <= self.config.gap_tol,
        }
    }

    fn offer(&mut self, values: Vec<Rational>) -> bool {
        if !self.model.is_feasible(&values) {
            return false;
        }
        let obj = self.model.objective_value(&values);
        if self.incumbent_value().is_none_or(|inc| obj < *inc) {
            self.incumbent = Some((obj, values));
            return true;
        }
        false
    }

    fn record(&mut self, bound: Rational) {
        let bound = match self.incumbent_value() {
            Some(inc) if *inc < bound => inc.clone(),
            _ => bound,
        };
        let incumbent = self.incumbent_value().cloned();
        self.trace.push(BoundEvent { node: self.nodes, bound, incumbent });
    }

    fn limits_hit(&self) -> bool {
        if self.config.node_limit.is_some_and(|n| self.nodes >= n) {
            return true;
        }
        self.time_up()
    }

    fn time_up(&self) -> bool {
        self.config.time_limit_s.is_some_and(|t| self.clock.elapsed_secs() >= t)
    }

    fn rounded(values: &[F]) -> Option<Vec<Rational>> {
        values
            .iter()
            .map(|v| {
                let half = F::one().div(&F::one().add(&F::one()));
                v.is_integral().then(|| v.add(&half).floor().to_rational())
            })
            .collect()
    }

    fn choose_branch(&self, values: &[F]) -> Option<usize> {
        let fractional: Vec<(usize, f64)> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_integral())
            .map(|(j, v)| (j, v.sub(&v.floor()).to_f64()))
            .collect();
        let is_y = |j: usize| matches!(self.model.variables[j].role, VarRole::Ferry(_));
        let tier: Vec<(usize, f64)> = if fractional.iter().any(|&(j, _)| is_y(j)) {
            fractional.iter().copied().filter(|&(j, _)| is_y(j)).collect()
        } else {
            fractional
        };
        if tier.is_empty() {
            return None;
        }
        if self.config.branch_rule == BranchRule::Pseudo {
            let scored: Vec<(usize, f64)> = tier
                .iter()
                .filter_map(|&(j, f)| {
                    let p = self.pseudo.get(&j)?;
                    if p.down_n == 0 || p.up_n == 0 {
                        return None;
                    }
                    let down = (p.down_sum / p.down_n as f64) * f;
                    let up = (p.up_sum / p.up_n as f64) * (1.0 - f);
                    Some((j, down.max(1e-6) * up.max(1e-6)))
                })
                .collect();
            if let Some(&(j, _)) =
                scored.iter().fold(None, |best: Option<&(usize, f64)>, c| match best {
                    Some(b) if b.1 >= c.1 => Some(b),
                    _ => Some(c),
                })
            {
                return Some(j);
            }
        }
        // Most fractional, lowest index on ties.
        let mut best: Option<(usize, f64)> = None;
        for &(j, f) in &tier {
            let score = f.min(1.0 - f);
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        best.map(|(j, _)| j)
    }

    fn update_pseudocost(&mut self, change: &Change, child_objective: f64) {
        if change.distance <= 0.0 {
            return;
        }
        let gain = ((child_objective - change.parent_objective) / change.distance).max(0.0);
        let entry = self.pseudo.entry(change.var).or_default();
        if change.up {
            entry.up_sum += gain;
            entry.up_n += 1;
        } else {
            entry.down_sum += gain;
            entry.down_n += 1;
        }
    }

    fn run(mut self) -> Result<MipResult, MipError> {
        if let Some(w) = &self.config.warm_start {
            if !self.offer(w.clone()) {
                let violated = self.model.violated_rows(w);
                return Err(MipError::WarmStart(match violated.first() {
                    Some(&r) => format!("violates {}", self.model.constraints[r].name()),
                    None => "values are not integral or break variable bounds".into(),
                }));
            }
        }
        let root: Simplex<F> = Simplex::from_model(self.model);
        let mut queue: Queue<F> = match self.config.search {
            SearchOrder::BestBound => Queue::Best(BinaryHeap::new()),
            SearchOrder::Dfs => Queue::Stack(Vec::new()),
        };
        let lowest = self.model.objective.iter().filter(|c| c.is_negative()).count();
        let floor = if lowest == 0 { <Rational as Zero>::zero() } else { Rational::from_integer((-i64::MAX).into()) };
        queue.push(Pending { bound: floor, id: 0, parent: Rc::new(root), change: None });
        self.next_id = 1;
        let mut complete = true;

        while let Some(node) = queue.pop() {
            if self.dominated(&node.bound) {
                continue;
            }
            if self.limits_hit() {
                queue.push(node);
                complete = false;
                break;
            }
            let mut simplex = (*node.parent).clone();
            if let Some(change) = &node.change {
                let j = change.var;
                let v = simplex.values()[j].clone();
                let lo = simplex.lower(j).cloned();
                let hi = simplex.upper(j).cloned();
                if change.up {
                    simplex.set_bounds(j, Some(v.floor().add(&F::one())), hi);
                } else {
                    simplex.set_bounds(j, lo, Some(v.floor()));
                }
            }
            let before = simplex.pivots();
            let solved = simplex.solve_until(&|| self.time_up());
            self.pivots += simplex.pivots() - before;
            let status = match solved {
                Err(LpError::Interrupted) => {
                    queue.push(node);
                    complete = false;
                    break;
                }
                other => other?,
            };
            self.nodes += 1;
            match status {
                LpStatus::Unbounded => return Err(MipError::Unbounded),
                LpStatus::Infeasible => {
                    let open = queue.min_bound();
                    if let Some(b) = open.or_else(|| self.incumbent_value().cloned()) {
                        self.record(b);
                    }
                    continue;
                }
                LpStatus::Optimal => {}
            }
            let objective = simplex.objective();
            let lp_value = objective.to_rational();
            if let Some(change) = &node.change {
                self.update_pseudocost(change, objective.to_f64());
            }
            // The node's own bound cannot fall below its parent's.
            let node_bound = if lp_value < node.bound { node.bound.clone() } else { lp_value };
            if !self.dominated(&node_bound) {
                let branch = self.choose_branch(simplex.values());
                match branch {
                    None => {
                        if let Some(values) = Self::rounded(simplex.values()) {
                            self.offer(values);
                        }
                    }
                    Some(j) => {
                        let v = simplex.values()[j].clone();
                        let frac = v.sub(&v.floor()).to_f64();
                        let parent = Rc::new(simplex);
                        let parent_objective = objective.to_f64();
                        let mk = |up: bool, id: u64| Pending {
                            bound: node_bound.clone(),
                            id,
                            parent: Rc::clone(&parent),
                            change: Some(Change {
                                var: j,
                                up,
                                distance: if up { 1.0 - frac } else { frac },
                                parent_objective,
                            }),
                        };
                        let down = mk(false, self.next_id);
                        let up = mk(true, self.next_id + 1);
                        self.next_id += 2;
                        // The stack pops the rounding direction first.
                        if frac > 0.5 {
                            queue.push(down);
                            queue.push(up);
                        } else {
                            queue.push(up);
                            queue.push(down);
                        }
                    }
                }
            }
            let global = queue
                .min_bound()
                .or_else(|| self.incumbent_value().cloned())
                .unwrap_or_else(|| node_bound.clone());
            self.record(global.clone());
            if self.gap_reached(&global) && !queue.is_empty() {
                complete = false;
                break;
            }
        }

        let open_bound = if complete { None } else { queue.min_bound() };
        let bound = match (&self.incumbent, open_bound) {
            (Some((inc, _)), Some(b)) => if b < *inc { b } else { inc.clone() },
            (Some((inc, _)), None) => inc.clone(),
            (None, Some(b)) => b,
            (None, None) => <Rational as Zero>::zero(),
        };
        let elapsed_s = self.clock.elapsed_secs();
        let (status, values, objective, gap) = match self.incumbent.take() {
            Some((obj, values)) => {
                let gap = relative_gap(&obj, &bound);
                let status = if num::to_f64(&gap) <= self.config.gap_tol || complete {
                    MipStatus::Optimal
                } else {
                    MipStatus::FeasibleGap
                };
                (status, Some(values), Some(obj), Some(gap))
            }
            None if complete || queue.is_empty() => (MipStatus::Infeasible, None, None, None),
            None => (MipStatus::TimeoutNoIncumbent, None, None, None),
        };
        Ok(MipResult {
            status,
            values,
            objective,
            bound,
            gap,
            nodes: self.nodes,
            pivots: self.pivots,
            elapsed_s,
            trace: self.trace,
        })
    }
}

/// Whether `model` has only binary and integer columns.
pub fn all_integer(model: &IpModel) -> bool {
    model.variables.iter().all(|v| matches!(v.kind, VarKind::Binary | VarKind::Integer))
}
