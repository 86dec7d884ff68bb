//! L1 time stepping for the variable-order Caputo derivative, with the
//! exponent taken at the current step time.

use crate::error::{domain, Error, Result};
use crate::order_schedule::OrderSchedule;
use crate::scalar::Real;
use crate::special::gamma_fn;
use crate::spectral::{thomas_solve, OperatorSpec};

/// Uniform grid `t_m = m tau` on `[0, T]` containing every breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Grid<T> {
    step: T,
    steps: usize,
    orders: Vec<T>,
}

impl<T: Real> L1Grid<T> {
    pub fn new(schedule: &OrderSchedule<T>, step: T) -> Result<Self> {
        if !(step > T::zero()) {
            return domain(format!("step {step} must be positive"));
        }
        let tol = T::c(1e-12);
        let mut counts = Vec::with_capacity(schedule.breakpoints().len());
        for &t in schedule.breakpoints() {
            let m = t / step;
            let r = m.round();
            if (m - r).abs() > tol * m.max(T::one()) {
                return domain(format!("breakpoint {t} is not a multiple of step {step}"));
            }
            counts.push(r.to_usize().unwrap_or(0));
        }
        let steps = *counts.last().unwrap_or(&0);
        if steps == 0 {
            return domain("grid has no steps");
        }
        // order used at step m (time t_m), right-continuous, last segment at T
        let mut orders = vec![T::zero(); steps + 1];
        for j in 0..schedule.segments() {
            for o in orders.iter_mut().take(counts[j + 1] + 1).skip(counts[j]) {
                *o = schedule.orders()[j];
            }
        }
        Ok(Self { step, steps, orders })
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self, m: usize) -> T {
        self.step * T::of(m)
    }

    pub fn times(&self) -> Vec<T> {
        (0..=self.steps).map(|m| self.time(m)).collect()
    }

    /// Order in force at `t_m`.
    pub fn order(&self, m: usize) -> T {
        self.orders[m]
    }
}

/// Weights `b_k`, `k = 0..m`, of `sum_k b_k (u_{k+1} - u_k)` approximating the
/// Caputo derivative of order `order` at `t_m`.
pub fn l1_weights<T: Real>(order: T, m: usize, tau: T) -> Result<Vec<T>> {
    if !(order > T::zero() && order < T::one()) {
        return domain(format!("order {order} not in (0,1)"));
    }
    if m == 0 {
        return domain("step index must be at least 1");
    }
    if !(tau > T::zero()) {
        return domain(format!("step {tau} must be positive"));
    }
    let g = T::one() - order;
    let c = tau.powf(-order) / gamma_fn(T::c(2.0) - order)?;
    Ok((0..m)
        .map(|k| (T::of(m - k).powf(g) - T::of(m - k - 1).powf(g)) * c)
        .collect())
}

/// Weight tables `a_i = ((i+1)^{1-b} - i^{1-b}) tau^{-b}/Gamma(2-b)` for each
/// distinct order of the grid.
struct WeightTables<T> {
    tables: Vec<Vec<T>>,
    index: Vec<usize>,
}

impl<T: Real> WeightTables<T> {
    fn new(grid: &L1Grid<T>) -> Result<Self> {
        let mut orders: Vec<T> = Vec::new();
        let mut index = Vec::with_capacity(grid.steps + 1);
        for m in 0..=grid.steps {
            let b = grid.order(m);
            let k = match orders.iter().position(|&o| o == b) {
                Some(k) => k,
                None => {
                    orders.push(b);
                    orders.len() - 1
                }
            };
            index.push(k);
        }
        let mut tables = Vec::with_capacity(orders.len());
        for &b in &orders {
            if !(b > T::zero() && b < T::one()) {
                return domain(format!("order {b} not in (0,1)"));
            }
            let g = T::one() - b;
            let c = grid.step.powf(-b) / gamma_fn(T::c(2.0) - b)?;
            let mut prev = T::zero();
            let mut t = Vec::with_capacity(grid.steps);
            for i in 0..grid.steps {
                let next = T::of(i + 1).powf(g);
                t.push((next - prev) * c);
                prev = next;
            }
            tables.push(t);
        }
        Ok(Self { tables, index })
    }

    fn at(&self, m: usize) -> &[T] {
        &self.tables[self.index[m]]
    }
}

/// Scalar march `D^{b(t)} u + lambda u = f`, `u(0) = u0`, implicit in `lambda u`.
pub fn solve_mode_l1<T: Real, F: Fn(T) -> T>(
    lambda: T,
    f: F,
    schedule: &OrderSchedule<T>,
    u0: T,
    grid: &L1Grid<T>,
) -> Result<Vec<T>> {
    if (grid.time(grid.steps) - schedule.horizon()).abs() > T::c(1e-12) * schedule.horizon() {
        return domain("grid horizon does not match the schedule");
    }
    let w = WeightTables::new(grid)?;
    let mut u = Vec::with_capacity(grid.steps + 1);
    let mut du: Vec<T> = Vec::with_capacity(grid.steps);
    u.push(u0);
    for m in 1..=grid.steps {
        let a = w.at(m);
        // sum_{k<m-1} b_k du_k with b_k = a_{m-1-k}
        let mut hist = T::zero();
        for (k, d) in du.iter().enumerate().take(m - 1) {
            hist = hist + a[m - 1 - k] * *d;
        }
        let lead = a[0];
        let um = (f(grid.time(m)) + lead * u[m - 1] - hist) / (lead + lambda);
        if !um.is_finite() {
            return Err(Error::Numeric(format!("non-finite L1 value at step {m}")));
        }
        du.push(um - u[m - 1]);
        u.push(um);
    }
    Ok(u)
}

/// Space-time L1 march with the three-point operator on `interior` points.
/// Rows are grid times, columns the spatial grid including the boundary zeros.
pub fn solve_full_l1_fd<T: Real, U, F>(
    operator: &OperatorSpec<T>,
    schedule: &OrderSchedule<T>,
    initial: U,
    source: F,
    grid: &L1Grid<T>,
    interior: usize,
) -> Result<Vec<Vec<T>>>
where
    U: Fn(T) -> T,
    F: Fn(T, T) -> T,
{
    if interior < 16 {
        return domain(format!("{interior} spatial points; at least 16 required"));
    }
    if (grid.time(grid.steps) - schedule.horizon()).abs() > T::c(1e-12) * schedule.horizon() {
        return domain("grid horizon does not match the schedule");
    }
    let (diag, off) = operator.fd_operator(interior)?;
    let x = operator.grid(interior);
    let w = WeightTables::new(grid)?;
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(grid.steps + 1);
    let mut first: Vec<T> = x.iter().map(|&xi| initial(xi)).collect();
    first[0] = T::zero();
    first[interior + 1] = T::zero();
    rows.push(first);
    let mut du: Vec<Vec<T>> = Vec::with_capacity(grid.steps);
    let mut rhs = vec![T::zero(); interior];
    for m in 1..=grid.steps {
        let a = w.at(m);
        let t = grid.time(m);
        let lead = a[0];
        let prev = &rows[m - 1];
        for i in 0..interior {
            rhs[i] = source(x[i + 1], t) + lead * prev[i + 1];
        }
        for (k, d) in du.iter().enumerate().take(m - 1) {
            let b = a[m - 1 - k];
            for i in 0..interior {
                rhs[i] = rhs[i] - b * d[i];
            }
        }
        let sol = thomas_solve(&diag, &off, lead, &rhs)?;
        if sol.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite L1 field at step {m}")));
        }
        let mut row = Vec::with_capacity(interior + 2);
        row.push(T::zero());
        row.extend_from_slice(&sol);
        row.push(T::zero());
        du.push((0..interior).map(|i| sol[i] - prev[i + 1]).collect());
        rows.push(row);
    }
    Ok(rows)
}
