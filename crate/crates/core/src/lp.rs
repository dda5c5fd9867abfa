//! Bounded-variable simplex over a generic scalar.
//!
//! Every row `a_i x (<=|=|>=) b_i` gets a logical variable `s_i = a_i x`
//! whose bounds encode the sense, so the working problem is
//! `min c x` subject to `s = A x` and box bounds on all variables. The
//! tableau is kept in sparse rows expressing each basic variable in terms of
//! the nonbasic ones; the initial basis consists of the logicals.
//!
//! With nonnegative costs the slack basis is dual feasible and the dual
//! simplex alone reaches optimality. Otherwise a zero-cost dual pass finds a
//! feasible basis and the primal simplex finishes.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;

use num_traits::{One, Signed, Zero};

use crate::model::{IpModel, Sense, VarKind};
use crate::num::{self, Rational};

/// Arithmetic used by the simplex. Exact types compare exactly; floating
/// types compare with absolute tolerances.
pub trait Scalar: Clone + Debug + PartialOrd {
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_rational(&self) -> Rational;
    fn to_f64(&self) -> f64;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    /// Zero for feasibility and optimality decisions.
    fn is_zero_tol(&self) -> bool;
    /// Entries this small are dropped from the tableau.
    fn is_negligible(&self) -> bool;
    fn floor(&self) -> Self;
    fn ceil(&self) -> Self;
    fn is_integral(&self) -> bool;

    fn is_pos(&self) -> bool {
        !self.is_zero_tol() && *self > Self::zero()
    }

    fn is_neg(&self) -> bool {
        !self.is_zero_tol() && *self < Self::zero()
    }

    /// `self < other` beyond tolerance.
    fn lt_tol(&self, other: &Self) -> bool {
        other.sub(self).is_pos()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn to_f64(&self) -> f64 {
        num::to_f64(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_zero_tol(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negligible(&self) -> bool {
        Zero::is_zero(self)
    }
    fn floor(&self) -> Self {
        Rational::floor(self)
    }
    fn ceil(&self) -> Self {
        Rational::ceil(self)
    }
    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

/// Absolute tolerance for feasibility and optimality in floating mode.
pub const FLOAT_EPS: f64 = 1e-9;
/// Distance to the nearest integer accepted as integral in floating mode.
pub const FLOAT_INT_EPS: f64 = 1e-6;
/// Largest row residual accepted after a floating solve.
pub const FLOAT_RESIDUAL: f64 = 1e-7;

impl Scalar for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &Rational) -> Self {
        num::to_f64(r)
    }
    fn to_rational(&self) -> Rational {
        num::from_f64(*self).unwrap_or_else(<Rational as Zero>::zero)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_zero_tol(&self) -> bool {
        f64::abs(*self) <= FLOAT_EPS
    }
    fn is_negligible(&self) -> bool {
        f64::abs(*self) <= 1e-12
    }
    fn floor(&self) -> Self {
        libm_floor(*self)
    }
    fn ceil(&self) -> Self {
        -libm_floor(-*self)
    }
    fn is_integral(&self) -> bool {
        f64::abs(*self - libm_floor(*self + 0.5)) <= FLOAT_INT_EPS
    }
}

/// `floor` without std.
fn libm_floor(x: f64) -> f64 {
    if !x.is_finite() || f64::abs(x) >= 4_503_599_627_370_496.0 {
        return x;
    }
    let t = x as i64 as f64;
    if t > x {
        t - 1.0
    } else {
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("numerical trouble: {0}")]
    Numerical(String),
    #[error("simplex iteration limit reached")]
    IterationLimit,
    #[error("stopped by the caller")]
    Interrupted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<F> {
    pub status: LpStatus,
    /// Structural variable values (meaningful when optimal).
    pub values: Vec<F>,
    pub objective: F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic without finite bounds, held at zero.
    Free,
}

/// A constraint row: sparse terms over structurals, sense and right-hand side.
pub type Row<F> = (Vec<(usize, F)>, Sense, F);

/// Pivots between polls of the caller's stop condition.
const STOP_POLL: u64 = 16;

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 50;

/// Simplex working state. Cloning it snapshots the basis for warm starts.
#[derive(Clone, Debug)]
pub struct Simplex<F: Scalar> {
    n: usize,
    m: usize,
    cost: Vec<F>,
    lower: Vec<Option<F>>,
    upper: Vec<Option<F>>,
    status: Vec<Status>,
    basis: Vec<usize>,
    /// `rows[i]`: basic variable `basis[i]` as a sparse combination of nonbasics.
    rows: Vec<Vec<(usize, F)>>,
    /// Reduced costs; zero on basic variables.
    d: Vec<F>,
    x: Vec<F>,
    original: Vec<Vec<(usize, F)>>,
    pivots: u64,
    iteration_limit: u64,
}

fn find<F>(row: &[(usize, F)], j: usize) -> Option<&F> {
    row.binary_search_by_key(&j, |t| t.0).ok().map(|p| &row[p].1)
}

/// `a + s * b` for sparse sorted rows, skipping column `skip` of `a`.
fn merge_scaled<F: Scalar>(a: &[(usize, F)], skip: usize, b: &[(usize, F)], s: &F) -> Vec<(usize, F)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut k) = (0, 0);
    while i < a.len() || k < b.len() {
        if i < a.len() && a[i].0 == skip {
            i += 1;
            continue;
        }
        let take_a = k >= b.len() || (i < a.len() && a[i].0 < b[k].0);
        let take_b = i >= a.len() || (k < b.len() && b[k].0 < a[i].0);
        let (j, v) = if take_a {
            i += 1;
            (a[i - 1].0, a[i - 1].1.clone())
        } else if take_b {
            k += 1;
            (b[k - 1].0, b[k - 1].1.mul(s))
        } else {
            i += 1;
            k += 1;
            (a[i - 1].0, a[i - 1].1.add(&b[k - 1].1.mul(s)))
        };
        if !v.is_negligible() {
            out.push((j, v));
        }
    }
    out
}

impl<F: Scalar> Simplex<F> {
    /// `rows` are `(terms over structurals, sense, rhs)`; bounds are given
    /// for the `n` structurals, `None` meaning infinite.
    pub fn new(
        n: usize,
        rows: &[Row<F>],
        cost: Vec<F>,
        lower: Vec<Option<F>>,
        upper: Vec<Option<F>>,
    ) -> Self {
        assert_eq!(cost.len(), n);
        assert_eq!(lower.len(), n);
        assert_eq!(upper.len(), n);
        let m = rows.len();
        let mut cost = cost;
        let mut lower = lower;
        let mut upper = upper;
        let mut status = Vec::with_capacity(n + m);
        let mut x = Vec::with_capacity(n + m);
        for j in 0..n {
            let (s, v) = match (&lower[j], &upper[j]) {
                (_, Some(u)) if cost[j].is_neg() => (Status::AtUpper, u.clone()),
                (Some(l), _) => (Status::AtLower, l.clone()),
                (None, Some(u)) => (Status::AtUpper, u.clone()),
                (None, None) => (Status::Free, F::zero()),
            };
            status.push(s);
            x.push(v);
        }
        let mut tableau = Vec::with_capacity(m);
        let mut original = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        for (i, (terms, sense, rhs)) in rows.iter().enumerate() {
            let mut terms: Vec<(usize, F)> = terms.iter().filter(|t| !t.1.is_negligible()).cloned().collect();
            terms.sort_by_key(|t| t.0);
            let value = terms.iter().fold(F::zero(), |acc, (j, a)| acc.add(&a.mul(&x[*j])));
            cost.push(F::zero());
            let (lo, up) = match sense {
                Sense::Le => (None, Some(rhs.clone())),
                Sense::Ge => (Some(rhs.clone()), None),
                Sense::Eq => (Some(rhs.clone()), Some(rhs.clone())),
            };
            lower.push(lo);
            upper.push(up);
            status.push(Status::Basic(i));
            x.push(value);
            basis.push(n + i);
            original.push(terms.clone());
            tableau.push(terms);
        }
        let d = cost.clone();
        let mut d = d;
        for i in 0..m {
            d[n + i] = F::zero();
        }
        Simplex {
            n,
            m,
            cost,
            lower,
            upper,
            status,
            basis,
            rows: tableau,
            d,
            x,
            original,
            pivots: 0,
            iteration_limit: 200_000 + 50 * (n + m) as u64,
        }
    }

    /// LP relaxation of an integer model with its natural bounds.
    pub fn from_model(model: &IpModel) -> Self {
        let rows: Vec<Row<F>> = model
            .constraints
            .iter()
            .map(|r| {
                (r.terms.iter().map(|(j, a)| (*j, F::from_rational(a))).collect(), r.sense, F::from_rational(&r.rhs))
            })
            .collect();
        let cost = model.objective.iter().map(F::from_rational).collect();
        let lower = vec![Some(F::zero()); model.variables.len()];
        let upper = model
            .variables
            .iter()
            .map(|v| match v.kind {
                VarKind::Binary => Some(F::one()),
                VarKind::Integer => None,
            })
            .collect();
        Simplex::new(model.variables.len(), &rows, cost, lower, upper)
    }

    pub fn num_structural(&self) -> usize {
        self.n
    }

    pub fn pivots(&self) -> u64 {
        self.pivots
    }

    pub fn lower(&self, j: usize) -> Option<&F> {
        self.lower[j].as_ref()
    }

    pub fn upper(&self, j: usize) -> Option<&F> {
        self.upper[j].as_ref()
    }

    /// Structural values of the current basis.
    pub fn values(&self) -> &[F] {
        &self.x[..self.n]
    }

    pub fn objective(&self) -> F {
        (0..self.n).fold(F::zero(), |acc, j| acc.add(&self.cost[j].mul(&self.x[j])))
    }

    /// Whether structural `j` is basic.
    pub fn is_basic(&self, j: usize) -> bool {
        matches!(self.status[j], Status::Basic(_))
    }

    /// Changes the bounds of structural `j`. A nonbasic variable moves to
    /// the nearest valid bound and the basic values follow.
    pub fn set_bounds(&mut self, j: usize, lower: Option<F>, upper: Option<F>) {
        self.lower[j] = lower;
        self.upper[j] = upper;
        let target = match self.status[j] {
            Status::Basic(_) => return,
            Status::AtLower => match (&self.lower[j], &self.upper[j]) {
                (Some(l), _) => Some((Status::AtLower, l.clone())),
                (None, Some(u)) => Some((Status::AtUpper, u.clone())),
                (None, None) => Some((Status::Free, F::zero())),
            },
            Status::AtUpper => match (&self.lower[j], &self.upper[j]) {
                (_, Some(u)) => Some((Status::AtUpper, u.clone())),
                (Some(l), None) => Some((Status::AtLower, l.clone())),
                (None, None) => Some((Status::Free, F::zero())),
            },
            Status::Free => match (&self.lower[j], &self.upper[j]) {
                (Some(l), _) => Some((Status::AtLower, l.clone())),
                (None, Some(u)) => Some((Status::AtUpper, u.clone())),
                (None, None) => None,
            },
        };
        if let Some((s, v)) = target {
            let delta = v.sub(&self.x[j]);
            self.status[j] = s;
            self.x[j] = v;
            if !delta.is_negligible() {
                self.shift_basics(j, &delta);
            }
        }
    }

    /// Adds `t_ij * delta` to every basic value for a change of nonbasic `j`.
    fn shift_basics(&mut self, j: usize, delta: &F) {
        for i in 0..self.m {
            if let Some(t) = find(&self.rows[i], j) {
                let b = self.basis[i];
                self.x[b] = self.x[b].add(&t.mul(delta));
            }
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        match (&self.lower[j], &self.upper[j]) {
            (Some(l), Some(u)) => !l.lt_tol(u),
            _ => false,
        }
    }

    fn infeasibility(&self, j: usize) -> Option<(F, bool)> {
        let v = &self.x[j];
        if let Some(l) = &self.lower[j] {
            if v.lt_tol(l) {
                return Some((l.sub(v), true));
            }
        }
        if let Some(u) = &self.upper[j] {
            if u.lt_tol(v) {
                return Some((v.sub(u), false));
            }
        }
        None
    }

    fn dual_feasible(&self) -> bool {
        (0..self.n + self.m).all(|j| match self.status[j] {
            Status::Basic(_) => true,
            _ if self.is_fixed(j) => true,
            Status::AtLower => !self.d[j].is_neg(),
            Status::AtUpper => !self.d[j].is_pos(),
            Status::Free => self.d[j].is_zero_tol(),
        })
    }

    fn primal_feasible(&self) -> bool {
        self.basis.iter().all(|&b| self.infeasibility(b).is_none())
    }

    /// Replaces basic `basis[r]` by nonbasic `e`. The leaving variable gets
    /// status `leave_as`.
    fn pivot(&mut self, r: usize, e: usize, leave_as: Status) {
        let b = self.basis[r];
        let row_r = core::mem::take(&mut self.rows[r]);
        let t_re = find(&row_r, e).expect("pivot element").clone();
        let inv = F::one().div(&t_re);
        let mut new_r: Vec<(usize, F)> = Vec::with_capacity(row_r.len());
        let mut placed = false;
        for (j, t) in &row_r {
            if *j == e {
                continue;
            }
            if !placed && *j > b {
                new_r.push((b, inv.clone()));
                placed = true;
            }
            new_r.push((*j, t.mul(&inv).neg()));
        }
        if !placed {
            new_r.push((b, inv.clone()));
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            if let Some(t_ie) = find(&self.rows[i], e).cloned() {
                self.rows[i] = merge_scaled(&self.rows[i], e, &new_r, &t_ie);
            }
        }
        let d_e = self.d[e].clone();
        if !d_e.is_negligible() {
            for (j, t) in &new_r {
                self.d[*j] = self.d[*j].add(&d_e.mul(t));
            }
        }
        self.d[e] = F::zero();
        self.rows[r] = new_r;
        self.basis[r] = e;
        self.status[e] = Status::Basic(r);
        self.status[b] = leave_as;
        self.pivots += 1;
        if !F::EXACT && self.pivots.is_multiple_of(64) {
            self.recompute_basics();
        }
    }

    fn recompute_basics(&mut self) {
        for i in 0..self.m {
            let v = self.rows[i].iter().fold(F::zero(), |acc, (j, t)| acc.add(&t.mul(&self.x[*j])));
            self.x[self.basis[i]] = v;
        }
    }

    fn recompute_reduced_costs(&mut self) {
        let mut d = self.cost.clone();
        for i in 0..self.m {
            let cb = self.cost[self.basis[i]].clone();
            if cb.is_negligible() {
                continue;
            }
            for (j, t) in &self.rows[i] {
                d[*j] = d[*j].add(&cb.mul(t));
            }
        }
        for &b in &self.basis {
            d[b] = F::zero();
        }
        self.d = d;
    }

    /// Dual simplex from a dual feasible basis.
    fn dual_simplex(&mut self, stop: &dyn Fn() -> bool) -> Result<LpStatus, LpError> {
        let mut degenerate = 0usize;
        loop {
            if self.pivots > self.iteration_limit {
                return Err(LpError::IterationLimit);
            }
            if self.pivots.is_multiple_of(STOP_POLL) && stop() {
                return Err(LpError::Interrupted);
            }
            let bland = degenerate >= DEGENERATE_RUN;
            // Leaving row: largest infeasibility, or lowest variable index under Bland.
            let mut leave: Option<(usize, F, bool)> = None;
            for r in 0..self.m {
                let b = self.basis[r];
                if let Some((amount, below)) = self.infeasibility(b) {
                    let better = match &leave {
                        None => true,
                        Some((r0, a0, _)) => {
                            if bland {
                                b < self.basis[*r0]
                            } else {
                                a0.lt_tol(&amount)
                            }
                        }
                    };
                    if better {
                        leave = Some((r, amount, below));
                    }
                }
            }
            let Some((r, _, below)) = leave else {
                return Ok(LpStatus::Optimal);
            };
            let b = self.basis[r];
            // Entering column: minimum |d_j / t_rj| over columns moving x_b the right way.
            let mut enter: Option<(usize, F, F)> = None;
            for (j, t) in &self.rows[r] {
                let j = *j;
                if t.is_zero_tol() || self.is_fixed(j) {
                    continue;
                }
                let up_ok = matches!(self.status[j], Status::AtLower | Status::Free);
                let down_ok = matches!(self.status[j], Status::AtUpper | Status::Free);
                let eligible = if below {
                    (up_ok && t.is_pos()) || (down_ok && t.is_neg())
                } else {
                    (up_ok && t.is_neg()) || (down_ok && t.is_pos())
                };
                if !eligible {
                    continue;
                }
                let ratio = self.d[j].abs().div(&t.abs());
                let better = match &enter {
                    None => true,
                    Some((j0, r0, t0)) => {
                        if ratio.lt_tol(r0) {
                            true
                        } else if r0.lt_tol(&ratio) {
                            false
                        } else if bland || F::EXACT {
                            j < *j0
                        } else {
                            t0.abs() < t.abs()
                        }
                    }
                };
                if better {
                    enter = Some((j, ratio, t.clone()));
                }
            }
            let Some((e, ratio, t_re)) = enter else {
                return Ok(LpStatus::Infeasible);
            };
            if ratio.is_zero_tol() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            let target = if below {
                self.lower[b].clone().expect("violated lower bound")
            } else {
                self.upper[b].clone().expect("violated upper bound")
            };
            let theta = target.sub(&self.x[b]).div(&t_re);
            self.x[e] = self.x[e].add(&theta);
            for i in 0..self.m {
                if i == r {
                    continue;
                }
                if let Some(t) = find(&self.rows[i], e) {
                    let bi = self.basis[i];
                    self.x[bi] = self.x[bi].add(&t.mul(&theta));
                }
            }
            self.x[b] = target;
            let leave_as = if below { Status::AtLower } else { Status::AtUpper };
            self.pivot(r, e, leave_as);
        }
    }

    /// Primal simplex from a primal feasible basis.
    fn primal_simplex(&mut self, stop: &dyn Fn() -> bool) -> Result<LpStatus, LpError> {
        let mut degenerate = 0usize;
        loop {
            if self.pivots > self.iteration_limit {
                return Err(LpError::IterationLimit);
            }
            if self.pivots.is_multiple_of(STOP_POLL) && stop() {
                return Err(LpError::Interrupted);
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let mut enter: Option<(usize, bool)> = None;
            let mut best = F::zero();
            for j in 0..self.n + self.m {
                if matches!(self.status[j], Status::Basic(_)) || self.is_fixed(j) {
                    continue;
                }
                let dj = &self.d[j];
                let inc = matches!(self.status[j], Status::AtLower | Status::Free) && dj.is_neg();
                let dec = matches!(self.status[j], Status::AtUpper | Status::Free) && dj.is_pos();
                if !(inc || dec) {
                    continue;
                }
                if bland {
                    enter = Some((j, inc));
                    break;
                }
                if enter.is_none() || best.lt_tol(&dj.abs()) {
                    best = dj.abs();
                    enter = Some((j, inc));
                }
            }
            let Some((e, increase)) = enter else {
                return Ok(LpStatus::Optimal);
            };
            let dir = if increase { F::one() } else { F::one().neg() };
            // Step limit from the entering variable's own range.
            let mut step: Option<F> = match (increase, &self.lower[e], &self.upper[e]) {
                (true, _, Some(u)) => Some(u.sub(&self.x[e])),
                (false, Some(l), _) => Some(self.x[e].sub(l)),
                _ => None,
            };
            let mut leave: Option<(usize, bool, F)> = None;
            for i in 0..self.m {
                let Some(t) = find(&self.rows[i], e) else { continue };
                if t.is_zero_tol() {
                    continue;
                }
                let alpha = t.mul(&dir);
                let b = self.basis[i];
                let (limit, to_lower) = if alpha.is_pos() {
                    match &self.upper[b] {
                        Some(u) => (u.sub(&self.x[b]).div(&alpha), false),
                        None => continue,
                    }
                } else {
                    match &self.lower[b] {
                        Some(l) => (l.sub(&self.x[b]).div(&alpha), true),
                        None => continue,
                    }
                };
                let limit = if limit.is_neg() { F::zero() } else { limit };
                let better = match (&step, &leave) {
                    (None, _) => true,
                    (Some(s), None) => limit.lt_tol(s),
                    (Some(s), Some((i0, _, a0))) => {
                        if limit.lt_tol(s) {
                            true
                        } else if s.lt_tol(&limit) {
                            false
                        } else if bland || F::EXACT {
                            b < self.basis[*i0]
                        } else {
                            a0.abs() < alpha.abs()
                        }
                    }
                };
                if better {
                    step = Some(limit);
                    leave = Some((i, to_lower, alpha));
                }
            }
            let Some(theta) = step else {
                return Ok(LpStatus::Unbounded);
            };
            if theta.is_zero_tol() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            let delta = theta.mul(&dir);
            self.x[e] = self.x[e].add(&delta);
            self.shift_basics(e, &delta);
            match leave {
                None => {
                    // Bound flip.
                    self.status[e] = if increase { Status::AtUpper } else { Status::AtLower };
                    self.x[e] = if increase {
                        self.upper[e].clone().expect("finite upper")
                    } else {
                        self.lower[e].clone().expect("finite lower")
                    };
                }
                Some((r, to_lower, _)) => {
                    let b = self.basis[r];
                    self.x[b] = if to_lower {
                        self.lower[b].clone().expect("finite lower")
                    } else {
                        self.upper[b].clone().expect("finite upper")
                    };
                    let leave_as = if to_lower { Status::AtLower } else { Status::AtUpper };
                    self.pivot(r, e, leave_as);
                }
            }
        }
    }

    /// Solves from the current basis.
    pub fn solve(&mut self) -> Result<LpStatus, LpError> {
        self.solve_until(&|| false)
    }

    /// Like [`Simplex::solve`], polling `stop` every few pivots.
    pub fn solve_until(&mut self, stop: &dyn Fn() -> bool) -> Result<LpStatus, LpError> {
        let status = if self.dual_feasible() {
            self.dual_simplex(stop)?
        } else if self.primal_feasible() {
            self.primal_simplex(stop)?
        } else {
            let saved = core::mem::replace(&mut self.cost, vec![F::zero(); self.n + self.m]);
            self.d = vec![F::zero(); self.n + self.m];
            let phase1 = self.dual_simplex(stop);
            self.cost = saved;
            self.recompute_reduced_costs();
            match phase1? {
                LpStatus::Optimal => self.primal_simplex(stop)?,
                other => other,
            }
        };
        if !F::EXACT && status == LpStatus::Optimal {
            self.recompute_basics();
            if let Err(e) = self.check_residuals() {
                self.refactor()?;
                self.recompute_basics();
                let again = if self.dual_feasible() {
                    self.dual_simplex(stop)?
                } else if self.primal_feasible() {
                    self.primal_simplex(stop)?
                } else {
                    return Err(e);
                };
                if again == LpStatus::Optimal {
                    self.check_residuals()?;
                }
                return Ok(again);
            }
        }
        Ok(status)
    }

    /// Row residuals and bound violations of the current point.
    fn check_residuals(&self) -> Result<(), LpError> {
        for (i, terms) in self.original.iter().enumerate() {
            let lhs = terms.iter().fold(0.0, |acc, (j, a)| acc + a.to_f64() * self.x[*j].to_f64());
            let s = self.x[self.n + i].to_f64();
            if f64::abs(lhs - s) > FLOAT_RESIDUAL {
                return Err(LpError::Numerical(alloc::format!("row {i} residual {:.3e}", lhs - s)));
            }
        }
        for j in 0..self.n + self.m {
            let v = self.x[j].to_f64();
            if self.lower[j].as_ref().is_some_and(|l| v < l.to_f64() - FLOAT_RESIDUAL)
                || self.upper[j].as_ref().is_some_and(|u| v > u.to_f64() + FLOAT_RESIDUAL)
            {
                return Err(LpError::Numerical(alloc::format!("variable {j} violates its bounds")));
            }
        }
        Ok(())
    }

    /// Rebuilds the tableau from the original rows for the current basis
    /// by dense Gauss-Jordan elimination.
    fn refactor(&mut self) -> Result<(), LpError> {
        let total = self.n + self.m;
        // Constraint i: s_i - a_i x = 0, i.e. M z = 0 with M = [-A | I].
        let mut dense: Vec<Vec<F>> = vec![vec![F::zero(); total]; self.m];
        for (i, terms) in self.original.iter().enumerate() {
            for (j, a) in terms {
                dense[i][*j] = a.neg();
            }
            dense[i][self.n + i] = F::one();
        }
        let mut row_of = vec![usize::MAX; self.m];
        let mut used = vec![false; self.m];
        for (r, &b) in self.basis.iter().enumerate() {
            let mut best: Option<usize> = None;
            for i in 0..self.m {
                if used[i] || dense[i][b].is_negligible() {
                    continue;
                }
                if best.is_none_or(|k| dense[k][b].abs() < dense[i][b].abs()) {
                    best = Some(i);
                }
            }
            let p = best.ok_or_else(|| LpError::Numerical("singular basis".into()))?;
            used[p] = true;
            row_of[r] = p;
            let inv = F::one().div(&dense[p][b]);
            for v in dense[p].iter_mut() {
                *v = v.mul(&inv);
            }
            let pivot_row = dense[p].clone();
            for (i, row) in dense.iter_mut().enumerate() {
                if i == p || row[b].is_negligible() {
                    continue;
                }
                let factor = row[b].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_negligible() {
                        *v = v.sub(&factor.mul(pv));
                    }
                }
            }
        }
        for (r, &b) in self.basis.iter().enumerate() {
            let p = row_of[r];
            let mut row = Vec::new();
            for (j, entry) in dense[p].iter().enumerate().take(total) {
                if matches!(self.status[j], Status::Basic(_)) || j == b {
                    continue;
                }
                let v = entry.neg();
                if !v.is_negligible() {
                    row.push((j, v));
                }
            }
            self.rows[r] = row;
        }
        self.recompute_reduced_costs();
        Ok(())
    }

    pub fn solution(&self, status: LpStatus) -> LpSolution<F> {
        LpSolution { status, values: self.values().to_vec(), objective: self.objective() }
    }
}

/// Solves the LP relaxation of `model` exactly.
pub fn solve_lp(model: &IpModel) -> Result<LpSolution<Rational>, LpError> {
    let mut simplex: Simplex<Rational> = Simplex::from_model(model);
    let status = simplex.solve()?;
    Ok(simplex.solution(status))
}

/// Solves the LP relaxation of `model` in floating point.
pub fn solve_lp_f64(model: &IpModel) -> Result<LpSolution<f64>, LpError> {
    let mut simplex: Simplex<f64> = Simplex::from_model(model);
    let status = simplex.solve()?;
    Ok(simplex.solution(status))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, ratio};

    type IntRow<'a> = (&'a [(usize, i64)], Sense, i64);

    fn lp(
        n: usize,
        rows: &[IntRow<'_>],
        cost: &[i64],
        upper: &[Option<i64>],
    ) -> Simplex<Rational> {
        let rows: Vec<Row<Rational>> =
            rows.iter().map(|(t, s, b)| (t.iter().map(|(j, a)| (*j, int(*a))).collect(), *s, int(*b))).collect();
        Simplex::new(
            n,
            &rows,
            cost.iter().map(|c| int(*c)).collect(),
            vec![Some(int(0)); n],
            upper.iter().map(|u| u.map(int)).collect(),
        )
    }

    #[test]
    fn no_rows_gives_lower_bounds() {
        let mut s = lp(3, &[], &[1, 2, 0], &[None, Some(1), None]);
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        assert_eq!(s.objective(), int(0));
        assert!(s.values().iter().all(|v| *v == int(0)));
    }

    #[test]
    fn covering_lp_with_fractional_optimum() {
        // min x + y  s.t. 2x + y >= 3, x + 2y >= 3  -> x = y = 1, or scaled.
        let mut s = lp(2, &[(&[(0, 2), (1, 1)], Sense::Ge, 3), (&[(0, 1), (1, 2)], Sense::Ge, 3)], &[1, 1], &[None, None]);
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        assert_eq!(s.objective(), int(2));
        // min 3x + 2y s.t. x + y >= 1, x - y = 1/2 scaled: 2x - 2y = 1.
        let mut s = lp(2, &[(&[(0, 1), (1, 1)], Sense::Ge, 1), (&[(0, 2), (1, -2)], Sense::Eq, 1)], &[3, 2], &[None, None]);
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        assert_eq!(s.values(), [ratio(3, 4), ratio(1, 4)]);
        assert_eq!(s.objective(), ratio(11, 4));
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut s = lp(1, &[(&[(0, 1)], Sense::Ge, 2)], &[1], &[Some(1)]);
        assert_eq!(s.solve().unwrap(), LpStatus::Infeasible);
        let mut s = lp(2, &[(&[(0, 1), (1, -1)], Sense::Le, 1)], &[-1, 0], &[None, None]);
        assert_eq!(s.solve().unwrap(), LpStatus::Unbounded);
    }

    #[test]
    fn negative_costs_use_two_phases() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6, x,y >= 0 -> (8/5, 6/5), value 14/5.
        let mut s = lp(
            2,
            &[(&[(0, 1), (1, 2)], Sense::Le, 4), (&[(0, 3), (1, 1)], Sense::Le, 6), (&[(0, 1)], Sense::Ge, 1)],
            &[-1, -1],
            &[None, None],
        );
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        assert_eq!(s.objective(), ratio(-14, 5));
    }

    #[test]
    fn warm_start_after_bound_change() {
        let mut s = lp(2, &[(&[(0, 2), (1, 2)], Sense::Ge, 3)], &[1, 2], &[Some(1), Some(1)]);
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        assert_eq!(s.values(), [int(1), ratio(1, 2)]);
        s.set_bounds(1, Some(int(1)), Some(int(1)));
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        assert_eq!(s.objective(), ratio(5, 2));
        s.set_bounds(0, Some(int(0)), Some(int(0)));
        assert_eq!(s.solve().unwrap(), LpStatus::Infeasible);
    }

    #[test]
    fn float_mode_agrees_on_small_lp() {
        let rows = vec![
            (vec![(0, 1.0), (1, 2.0)], Sense::Le, 4.0),
            (vec![(0, 3.0), (1, 1.0)], Sense::Le, 6.0),
            (vec![(0, 1.0)], Sense::Ge, 1.0),
        ];
        let mut s: Simplex<f64> = Simplex::new(2, &rows, vec![-1.0, -1.0], vec![Some(0.0); 2], vec![None, None]);
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        assert!((s.objective() + 2.8).abs() < 1e-9);
        assert_eq!(libm_floor(-1.5), -2.0);
        assert!(1.0000001f64.is_integral());
    }
}
