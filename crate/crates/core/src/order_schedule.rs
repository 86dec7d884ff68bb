use crate::error::{domain, Result};
use crate::scalar::Real;

/// Piecewise-constant fractional order on `[0, T)`.
///
/// `orders[j]` applies on `[breakpoints[j], breakpoints[j+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSchedule<T> {
    breakpoints: Vec<T>,
    orders: Vec<T>,
}

impl<T: Real> OrderSchedule<T> {
    pub fn new(breakpoints: Vec<T>, orders: Vec<T>) -> Result<Self> {
        if orders.is_empty() {
            return domain("schedule needs at least one segment");
        }
        if breakpoints.len() != orders.len() + 1 {
            return domain(format!("{} breakpoints for {} orders", breakpoints.len(), orders.len()));
        }
        if breakpoints.iter().any(|t| !t.is_finite()) {
            return domain("non-finite breakpoint");
        }
        if breakpoints[0] != T::zero() {
            return domain("first breakpoint must be 0");
        }
        let horizon = breakpoints[breakpoints.len() - 1];
        let min_width = T::c(1e-12) * horizon;
        for w in breakpoints.windows(2) {
            if !(w[1] > w[0]) {
                return domain("breakpoints must be strictly increasing");
            }
            if w[1] - w[0] < min_width {
                return domain(format!("segment [{}, {}] narrower than 1e-12 T", w[0], w[1]));
            }
        }
        for (j, &b) in orders.iter().enumerate() {
            if !(b > T::zero() && b < T::one()) {
                return domain(format!("order {b} of segment {j} not in (0,1)"));
            }
        }
        Ok(Self { breakpoints, orders })
    }

    /// Single segment `[0, horizon)` of constant order.
    pub fn constant(order: T, horizon: T) -> Result<Self> {
        Self::new(vec![T::zero(), horizon], vec![order])
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn orders(&self) -> &[T] {
        &self.orders
    }

    pub fn segments(&self) -> usize {
        self.orders.len()
    }

    pub fn horizon(&self) -> T {
        self.breakpoints[self.orders.len()]
    }

    pub fn start(&self, j: usize) -> T {
        self.breakpoints[j]
    }

    pub fn end(&self, j: usize) -> T {
        self.breakpoints[j + 1]
    }

    pub fn width(&self, j: usize) -> T {
        self.breakpoints[j + 1] - self.breakpoints[j]
    }

    pub fn min_order(&self) -> T {
        self.orders.iter().copied().fold(T::one(), T::min)
    }

    /// Index `j` with `t_j <= t < t_{j+1}`.
    pub fn segment_index(&self, t: T) -> Result<usize> {
        if !(t >= T::zero() && t < self.horizon()) {
            return domain(format!("time {t} outside [0, {})", self.horizon()));
        }
        let k = self.breakpoints.partition_point(|&b| b <= t);
        Ok(k - 1)
    }

    /// Right-continuous order lookup.
    pub fn order_at(&self, t: T) -> Result<T> {
        Ok(self.orders[self.segment_index(t)?])
    }

    /// Like [`segment_index`](Self::segment_index) but maps `t = T` to the last segment.
    pub fn segment_index_closed(&self, t: T) -> Result<usize> {
        if t == self.horizon() {
            Ok(self.orders.len() - 1)
        } else {
            self.segment_index(t)
        }
    }

    /// Joins `self` on `[0, T)` with `other` shifted to start at `T`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let shift = self.horizon();
        let mut bps = self.breakpoints.clone();
        bps.extend(other.breakpoints[1..].iter().map(|&t| t + shift));
        let mut ords = self.orders.clone();
        ords.extend_from_slice(&other.orders);
        Self::new(bps, ords)
    }

    /// Same order function with every segment cut into `parts` equal pieces.
    pub fn refine(&self, parts: usize) -> Result<Self> {
        if parts == 0 {
            return domain("parts must be positive");
        }
        let mut bps = vec![T::zero()];
        let mut ords = Vec::new();
        for j in 0..self.segments() {
            let (a, w) = (self.start(j), self.width(j));
            for i in 1..=parts {
                bps.push(if i == parts {
                    self.end(j)
                } else {
                    a + w * T::of(i) / T::of(parts)
                });
                ords.push(self.orders[j]);
            }
        }
        Self::new(bps, ords)
    }
}
