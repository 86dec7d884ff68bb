//! Mode-by-mode construction of the solution: segment sources carrying the
//! memory of earlier segments, junction hand-off and the Duhamel formula.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::l1::{solve_full_l1_fd, L1Grid};
use crate::order_schedule::OrderSchedule;
use crate::quadrature::{HistoryRule, SourceMesh};
use crate::scalar::Real;
use crate::special::{rgamma, OrderKernels};
use crate::spectral::{EigenSystem, OperatorSpec};

/// Function of one spatial variable on `[0, L]`.
#[derive(Clone)]
pub enum SpatialProfile<T> {
    /// Coefficients in the eigenbasis of the operator.
    Modes(Vec<T>),
    /// `sum_k b_k sin(k pi x / L)`.
    Sine(Vec<T>),
    /// Values on the eigensystem grid, boundary points included.
    Samples(Vec<T>),
    Function(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T: Real> fmt::Debug for SpatialProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpatialProfile::Modes(c) => f.debug_tuple("Modes").field(c).finish(),
            SpatialProfile::Sine(c) => f.debug_tuple("Sine").field(c).finish(),
            SpatialProfile::Samples(c) => f.debug_tuple("Samples").field(c).finish(),
            SpatialProfile::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl<T: Real> SpatialProfile<T> {
    pub fn zero() -> Self {
        SpatialProfile::Modes(Vec::new())
    }

    /// Mode coefficients under `sys`, padded or truncated to its mode count.
    pub fn coefficients(&self, sys: &EigenSystem<T>) -> Result<Vec<T>> {
        let n = sys.modes();
        match self {
            SpatialProfile::Modes(c) => {
                let mut v = c.clone();
                v.resize(n, T::zero());
                Ok(v)
            }
            SpatialProfile::Samples(s) => sys.project(s),
            _ => {
                let pts = sys.grid().to_vec();
                let vals = self.values(sys, &pts)?;
                sys.project(&vals)
            }
        }
    }

    pub fn values(&self, sys: &EigenSystem<T>, points: &[T]) -> Result<Vec<T>> {
        let l = sys.length();
        match self {
            SpatialProfile::Modes(c) => {
                let k = c.len().min(sys.modes());
                sys.synthesize(&c[..k], points)
            }
            SpatialProfile::Sine(b) => Ok(points
                .iter()
                .map(|&x| {
                    b.iter()
                        .enumerate()
                        .map(|(k, bk)| *bk * crate::special::sin_pi(T::of(k + 1) * x / l))
                        .sum()
                })
                .collect()),
            SpatialProfile::Samples(s) => {
                let g = sys.grid();
                if s.len() != g.len() {
                    return domain(format!("{} samples on a grid of {}", s.len(), g.len()));
                }
                let h = g[1] - g[0];
                points
                    .iter()
                    .map(|&x| {
                        if !(x >= T::zero() && x <= l) {
                            return domain(format!("point {x} outside [0, {l}]"));
                        }
                        let i = (x / h).floor().to_usize().unwrap_or(0).min(g.len() - 2);
                        let th = (x - g[i]) / h;
                        Ok(s[i] + (s[i + 1] - s[i]) * th)
                    })
                    .collect()
            }
            SpatialProfile::Function(f) => Ok(points.iter().map(|&x| f(x)).collect()),
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        match self {
            SpatialProfile::Modes(c) => SpatialProfile::Modes(c.iter().map(|x| *x * s).collect()),
            SpatialProfile::Sine(c) => SpatialProfile::Sine(c.iter().map(|x| *x * s).collect()),
            SpatialProfile::Samples(c) => SpatialProfile::Samples(c.iter().map(|x| *x * s).collect()),
            SpatialProfile::Function(f) => {
                let f = f.clone();
                SpatialProfile::Function(Arc::new(move |x| s * f(x)))
            }
        }
    }
}

/// `sum_i c_i t^{p_i}` with `p_i >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeProfile<T> {
    terms: Vec<(T, T)>,
}

impl<T: Real> TimeProfile<T> {
    pub fn new(terms: Vec<(T, T)>) -> Result<Self> {
        for &(c, p) in &terms {
            if !c.is_finite() || !(p >= T::zero()) || !p.is_finite() {
                return domain(format!("time term {c} t^{p} needs a finite coefficient and power >= 0"));
            }
        }
        Ok(Self { terms })
    }

    pub fn constant(c: T) -> Self {
        Self {
            terms: vec![(c, T::zero())],
        }
    }

    pub fn terms(&self) -> &[(T, T)] {
        &self.terms
    }

    pub fn value(&self, t: T) -> T {
        self.terms
            .iter()
            .map(|&(c, p)| if p == T::zero() { c } else { c * t.powf(p) })
            .sum()
    }

    pub fn derivative(&self, t: T) -> T {
        self.terms
            .iter()
            .map(|&(c, p)| {
                if p == T::zero() {
                    T::zero()
                } else if p == T::one() {
                    c
                } else {
                    c * p * t.powf(p - T::one())
                }
            })
            .sum()
    }
}

/// Right-hand side `f(x, t)` as seen by the solver.
pub trait SourceTerm<T: Real>: Send + Sync {
    fn value(&self, sys: &EigenSystem<T>, x: T, t: T) -> Result<T>;

    /// `f_{0,n}(t)` for every mode of `sys`.
    fn coefficients(&self, sys: &EigenSystem<T>, t: T) -> Result<Vec<T>> {
        let vals = sys
            .grid()
            .iter()
            .map(|&x| self.value(sys, x, t))
            .collect::<Result<Vec<T>>>()?;
        sys.project(&vals)
    }

    /// Time derivative of [`SourceTerm::coefficients`]; central differences by default.
    fn coefficient_derivatives(&self, sys: &EigenSystem<T>, t: T) -> Result<Vec<T>> {
        let h = T::epsilon().cbrt() * t.abs().max(T::c(1e-3));
        let lo = (t - h).max(T::zero());
        let hi = t + h;
        let a = self.coefficients(sys, lo)?;
        let b = self.coefficients(sys, hi)?;
        Ok(a.iter().zip(&b).map(|(x, y)| (*y - *x) / (hi - lo)).collect())
    }

    fn is_zero(&self) -> bool {
        false
    }
}

/// `sum_i g_i(x) h_i(t)`; empty means `f = 0`.
#[derive(Debug, Clone)]
pub struct SeparableSource<T: Real> {
    terms: Vec<(SpatialProfile<T>, TimeProfile<T>)>,
}

impl<T: Real> SeparableSource<T> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn new(terms: Vec<(SpatialProfile<T>, TimeProfile<T>)>) -> Self {
        Self { terms }
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            terms: self.terms.iter().map(|(g, h)| (g.scaled(s), h.clone())).collect(),
        }
    }
}

impl<T: Real> SourceTerm<T> for SeparableSource<T> {
    fn value(&self, sys: &EigenSystem<T>, x: T, t: T) -> Result<T> {
        let mut s = T::zero();
        for (g, h) in &self.terms {
            s = s + g.values(sys, &[x])?[0] * h.value(t);
        }
        Ok(s)
    }

    fn coefficients(&self, sys: &EigenSystem<T>, t: T) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); sys.modes()];
        for (g, h) in &self.terms {
            let c = g.coefficients(sys)?;
            let ht = h.value(t);
            for (o, ci) in out.iter_mut().zip(&c) {
                *o = *o + *ci * ht;
            }
        }
        Ok(out)
    }

    fn coefficient_derivatives(&self, sys: &EigenSystem<T>, t: T) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); sys.modes()];
        for (g, h) in &self.terms {
            let c = g.coefficients(sys)?;
            let ht = h.derivative(t);
            for (o, ci) in out.iter_mut().zip(&c) {
                *o = *o + *ci * ht;
            }
        }
        Ok(out)
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Eigenbasis construction route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Analytic,
    FiniteDifference,
}

/// Time discretization of the segment sources and memory integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig<T> {
    /// Cubic cells per segment source mesh.
    pub cells: usize,
    /// Mesh grading; `None` picks `4/(2 - beta_j - eps_j)` per segment.
    pub grading: Option<T>,
    /// Gauss points per cell of the memory-integral rule.
    pub history_nodes: usize,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            cells: 64,
            grading: None,
            history_nodes: 12,
        }
    }
}

/// Everything that defines one initial-boundary value problem.
#[derive(Clone)]
pub struct ProblemSpec<T: Real> {
    pub operator: OperatorSpec<T>,
    pub backend: Backend,
    pub schedule: OrderSchedule<T>,
    pub initial: SpatialProfile<T>,
    pub source: Arc<dyn SourceTerm<T>>,
    regularity: Vec<T>,
    pub modes: usize,
    pub spatial_points: usize,
    pub quad: QuadratureConfig<T>,
}

impl<T: Real> fmt::Debug for ProblemSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("operator", &self.operator)
            .field("backend", &self.backend)
            .field("schedule", &self.schedule)
            .field("initial", &self.initial)
            .field("regularity", &self.regularity)
            .field("modes", &self.modes)
            .field("spatial_points", &self.spatial_points)
            .field("quad", &self.quad)
            .finish_non_exhaustive()
    }
}

impl<T: Real> ProblemSpec<T> {
    /// `regularity[j]` is the declared exponent `eps_j in (0, 1 - beta_j)`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        operator: OperatorSpec<T>,
        backend: Backend,
        schedule: OrderSchedule<T>,
        initial: SpatialProfile<T>,
        source: Arc<dyn SourceTerm<T>>,
        regularity: Vec<T>,
        modes: usize,
        spatial_points: usize,
    ) -> Result<Self> {
        if regularity.len() != schedule.segments() {
            return domain(format!(
                "{} regularity exponents for {} segments",
                regularity.len(),
                schedule.segments()
            ));
        }
        for (j, (&e, &b)) in regularity.iter().zip(schedule.orders()).enumerate() {
            if !(e > T::zero() && e < T::one() - b) {
                return domain(format!("segment {j}: exponent {e} not in (0, {})", T::one() - b));
            }
        }
        if modes == 0 {
            return domain("at least one mode is required");
        }
        if spatial_points < modes {
            return domain(format!("{spatial_points} spatial points for {modes} modes"));
        }
        Ok(Self {
            operator,
            backend,
            schedule,
            initial,
            source,
            regularity,
            modes,
            spatial_points,
            quad: QuadratureConfig::default(),
        })
    }

    /// Midpoint exponents `eps_j = (1 - beta_j)/2`.
    pub fn default_regularity(schedule: &OrderSchedule<T>) -> Vec<T> {
        schedule.orders().iter().map(|b| (T::one() - *b) / T::c(2.0)).collect()
    }

    pub fn with_quadrature(mut self, quad: QuadratureConfig<T>) -> Self {
        self.quad = quad;
        self
    }

    pub fn regularity(&self) -> &[T] {
        &self.regularity
    }

    pub fn eigensystem(&self) -> Result<EigenSystem<T>> {
        match self.backend {
            Backend::Analytic => EigenSystem::analytic(&self.operator, self.modes, self.spatial_points),
            Backend::FiniteDifference => {
                EigenSystem::finite_difference(&self.operator, self.modes, self.spatial_points)
            }
        }
    }

    /// Grading exponent of segment `j`'s source mesh.
    pub fn grading(&self, j: usize) -> T {
        self.quad.grading.unwrap_or_else(|| {
            let b = self.schedule.orders()[j];
            T::c(4.0) / (T::c(2.0) - b - self.regularity[j])
        })
    }

    /// Same problem with `u_0` and `f` multiplied by `s`.
    pub fn scaled(&self, s: T) -> Self {
        let inner = self.source.clone();
        let mut out = self.clone();
        out.initial = self.initial.scaled(s);
        out.source = Arc::new(ScaledSource { inner, factor: s });
        out
    }

    /// Full space-time L1 solve with the three-point operator on `interior` points.
    pub fn solve_full_l1_fd(&self, grid: &L1Grid<T>, interior: usize) -> Result<Vec<Vec<T>>> {
        let sys = self.eigensystem()?;
        let x = self.operator.grid(interior);
        let u0 = self.initial.values(&sys, &x)?;
        let h = x[1] - x[0];
        let init = |xi: T| {
            let i = (xi / h).round().to_usize().unwrap_or(0).min(interior + 1);
            u0[i]
        };
        let src = |xi: T, t: T| self.source.value(&sys, xi, t).unwrap_or(T::nan());
        solve_full_l1_fd(&self.operator, &self.schedule, init, src, grid, interior)
    }
}

struct ScaledSource<T: Real> {
    inner: Arc<dyn SourceTerm<T>>,
    factor: T,
}

impl<T: Real> SourceTerm<T> for ScaledSource<T> {
    fn value(&self, sys: &EigenSystem<T>, x: T, t: T) -> Result<T> {
        Ok(self.factor * self.inner.value(sys, x, t)?)
    }

    fn coefficients(&self, sys: &EigenSystem<T>, t: T) -> Result<Vec<T>> {
        Ok(self
            .inner
            .coefficients(sys, t)?
            .into_iter()
            .map(|c| c * self.factor)
            .collect())
    }

    fn coefficient_derivatives(&self, sys: &EigenSystem<T>, t: T) -> Result<Vec<T>> {
        Ok(self
            .inner
            .coefficient_derivatives(sys, t)?
            .into_iter()
            .map(|c| c * self.factor)
            .collect())
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }
}

/// Per-segment discretization shared by all modes.
#[derive(Debug, Clone)]
pub struct SegmentContext<T> {
    pub start: T,
    pub length: T,
    pub order: T,
    pub mesh: SourceMesh<T>,
    pub kernels: OrderKernels<T>,
    pub rule: HistoryRule<T>,
}

/// Segment source `f_{j,n}` at the mesh samples: base projection minus the
/// memory of earlier segments.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSource<T> {
    pub base: Vec<T>,
    pub history: Vec<T>,
}

impl<T: Real> SegmentSource<T> {
    pub fn values(&self) -> Vec<T> {
        self.base.iter().zip(&self.history).map(|(b, h)| *b - *h).collect()
    }
}

/// `v_{j,n}` on one segment.
#[derive(Debug, Clone)]
pub struct SegmentModeSolution<T> {
    pub mode: usize,
    pub segment: usize,
    pub lambda: T,
    pub order: T,
    pub initial_value: T,
    pub source: SegmentSource<T>,
    pub end_value: T,
    values: Vec<T>,
    zero_source: bool,
    /// `l^{1-beta_j} v'(t_j + l)` at the memory rule nodes (absent on the last segment).
    memory: Option<Vec<T>>,
}

impl<T: Real> SegmentModeSolution<T> {
    /// Interpolated segment source at offset `tau`.
    pub fn source_value(&self, ctx: &SegmentContext<T>, tau: T) -> T {
        ctx.mesh.interpolate(&self.values, tau)
    }

    pub fn source_values(&self) -> &[T] {
        &self.values
    }

    /// `v(t_j + tau)`.
    pub fn eval(&self, ctx: &SegmentContext<T>, tau: T) -> Result<T> {
        if !(tau >= T::zero() && tau <= ctx.length) {
            return domain(format!("offset {tau} outside segment of length {}", ctx.length));
        }
        if tau == T::zero() {
            return Ok(self.initial_value);
        }
        let relax = self.initial_value * ctx.kernels.relaxation(self.lambda, tau)?;
        if self.zero_source {
            return Ok(relax);
        }
        Ok(relax + ctx.mesh.convolve(&ctx.kernels, self.lambda, &self.values, tau, false)?)
    }

    /// `v'(t_j + tau)`, `tau > 0`.
    pub fn derivative(&self, ctx: &SegmentContext<T>, tau: T) -> Result<T> {
        if !(tau > T::zero() && tau <= ctx.length) {
            return domain(format!(
                "derivative offset {tau} must lie in (0, {}]; it is singular at the segment start",
                ctx.length
            ));
        }
        let jump = if self.zero_source { T::zero() } else { self.values[0] };
        let lead = (jump - self.lambda * self.initial_value) * ctx.kernels.kernel(self.lambda, tau)?;
        if self.zero_source {
            return Ok(lead);
        }
        Ok(lead + ctx.mesh.convolve(&ctx.kernels, self.lambda, &self.values, tau, true)?)
    }

    pub fn memory(&self) -> Option<&[T]> {
        self.memory.as_deref()
    }
}

fn tag(e: Error, n: usize, j: usize) -> Error {
    let at = format!("mode {}, segment {j}", n + 1);
    match e {
        Error::Domain(m) => Error::Domain(format!("{at}: {m}")),
        Error::Numeric(m) => Error::Numeric(format!("{at}: {m}")),
        Error::Hypothesis(m) => Error::Hypothesis(format!("{at}: {m}")),
        Error::Accuracy {
            what,
            estimate,
            tolerance,
        } => Error::Accuracy {
            what: format!("{at}: {what}"),
            estimate,
            tolerance,
        },
    }
}

/// The assembled solution `u(x, t) = sum_n u_n(t) X_n(x)`.
#[derive(Debug, Clone)]
pub struct SolutionField<T> {
    system: EigenSystem<T>,
    schedule: OrderSchedule<T>,
    contexts: Vec<SegmentContext<T>>,
    modes: Vec<Vec<SegmentModeSolution<T>>>,
    initial: Vec<T>,
}

/// Builds the segment contexts of `spec`.
pub fn segment_contexts<T: Real>(spec: &ProblemSpec<T>) -> Result<Vec<SegmentContext<T>>> {
    let s = &spec.schedule;
    (0..s.segments())
        .map(|j| {
            let length = s.width(j);
            let order = s.orders()[j];
            Ok(SegmentContext {
                start: s.start(j),
                length,
                order,
                mesh: SourceMesh::new(length, spec.quad.cells, spec.grading(j))?,
                kernels: OrderKernels::new(order)?,
                rule: HistoryRule::new(length, order - T::one(), spec.quad.history_nodes)?,
            })
        })
        .collect()
}

/// Memory term `(1/Gamma(1-b_j)) int_{I_k} (t-s)^{-b_j} v_k'(s) ds` at offsets
/// `tau` into segment `j`, for every `k < j`.
pub fn assemble_segment_source<T: Real>(
    contexts: &[SegmentContext<T>],
    j: usize,
    prior: &[SegmentModeSolution<T>],
    base: Vec<T>,
) -> Result<SegmentSource<T>> {
    let ctx = &contexts[j];
    let offsets = ctx.mesh.sample_offsets();
    let mut history = vec![T::zero(); offsets.len()];
    if j > 0 {
        let c = rgamma(T::one() - ctx.order);
        for (k, sol) in prior.iter().enumerate().take(j) {
            let g = sol
                .memory
                .as_ref()
                .ok_or_else(|| Error::Numeric(format!("segment {k} carries no memory samples")))?;
            let gap = ctx.start - contexts[k + 1].start;
            for (hv, &tau) in history.iter_mut().zip(offsets) {
                *hv = *hv + c * contexts[k].rule.integrate(g, gap + tau, -ctx.order);
            }
        }
    }
    Ok(SegmentSource { base, history })
}

impl<T: Real> SolutionField<T> {
    pub fn solve(spec: &ProblemSpec<T>) -> Result<Self> {
        let sys = spec.eigensystem()?;
        let initial = spec.initial.coefficients(&sys)?;
        if !sys.graph_norm(&initial).is_finite() {
            return Err(Error::Hypothesis("initial data has no finite graph norm".into()));
        }
        let contexts = segment_contexts(spec)?;
        let m = contexts.len();
        let n_modes = sys.modes();
        let zero = spec.source.is_zero();

        // base[j][i][n]
        let base: Vec<Vec<Vec<T>>> = contexts
            .iter()
            .map(|ctx| {
                ctx.mesh
                    .sample_offsets()
                    .par_iter()
                    .map(|&s| {
                        if zero {
                            Ok(vec![T::zero(); n_modes])
                        } else {
                            spec.source.coefficients(&sys, ctx.start + s)
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;

        let lambdas = sys.eigenvalues().to_vec();
        let modes = (0..n_modes)
            .into_par_iter()
            .map(|n| {
                let mut sols: Vec<SegmentModeSolution<T>> = Vec::with_capacity(m);
                for j in 0..m {
                    let ctx = &contexts[j];
                    let b: Vec<T> = base[j].iter().map(|row| row[n]).collect();
                    let source = assemble_segment_source(&contexts, j, &sols, b).map_err(|e| tag(e, n, j))?;
                    let values = source.values();
                    let zero_source = values.iter().all(|v| *v == T::zero());
                    let initial_value = if j == 0 { initial[n] } else { sols[j - 1].end_value };
                    let mut sol = SegmentModeSolution {
                        mode: n,
                        segment: j,
                        lambda: lambdas[n],
                        order: ctx.order,
                        initial_value,
                        source,
                        end_value: T::zero(),
                        values,
                        zero_source,
                        memory: None,
                    };
                    sol.end_value = sol.eval(ctx, ctx.length).map_err(|e| tag(e, n, j))?;
                    if !sol.end_value.is_finite() {
                        return Err(tag(Error::Numeric("non-finite segment end value".into()), n, j));
                    }
                    if j + 1 < m {
                        let g = ctx
                            .rule
                            .regularize(|l| sol.derivative(ctx, l))
                            .map_err(|e| tag(e, n, j))?;
                        if g.iter().any(|v| !v.is_finite()) {
                            return Err(tag(Error::Numeric("non-finite derivative samples".into()), n, j));
                        }
                        sol.memory = Some(g);
                    }
                    sols.push(sol);
                }
                Ok(sols)
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            system: sys,
            schedule: spec.schedule.clone(),
            contexts,
            modes,
            initial,
        })
    }

    pub fn system(&self) -> &EigenSystem<T> {
        &self.system
    }

    pub fn schedule(&self) -> &OrderSchedule<T> {
        &self.schedule
    }

    pub fn contexts(&self) -> &[SegmentContext<T>] {
        &self.contexts
    }

    pub fn modes(&self) -> usize {
        self.modes.len()
    }

    /// Initial mode coefficients `u_{0,n}`.
    pub fn initial(&self) -> &[T] {
        &self.initial
    }

    /// `v_{j,n}` with zero-based mode index.
    pub fn segment(&self, n: usize, j: usize) -> &SegmentModeSolution<T> {
        &self.modes[n][j]
    }

    fn locate(&self, t: T) -> Result<(usize, T)> {
        let j = self.schedule.segment_index_closed(t)?;
        Ok((j, t - self.schedule.start(j)))
    }

    /// `u_n(t)`; at a breakpoint the shared junction value.
    pub fn eval_mode(&self, n: usize, t: T) -> Result<T> {
        if n >= self.modes.len() {
            return domain(format!("mode index {n} beyond {}", self.modes.len()));
        }
        let (j, tau) = self.locate(t)?;
        self.modes[n][j].eval(&self.contexts[j], tau).map_err(|e| tag(e, n, j))
    }

    /// `u_n'(t)` from the segment containing `t` (right-continuous); errors at breakpoints.
    pub fn mode_derivative(&self, n: usize, t: T) -> Result<T> {
        if n >= self.modes.len() {
            return domain(format!("mode index {n} beyond {}", self.modes.len()));
        }
        let (j, tau) = self.locate(t)?;
        self.modes[n][j]
            .derivative(&self.contexts[j], tau)
            .map_err(|e| tag(e, n, j))
    }

    /// All mode coefficients at `t`.
    pub fn coefficients(&self, t: T) -> Result<Vec<T>> {
        (0..self.modes.len()).map(|n| self.eval_mode(n, t)).collect()
    }

    /// All mode derivatives at `t`.
    pub fn derivatives(&self, t: T) -> Result<Vec<T>> {
        (0..self.modes.len()).map(|n| self.mode_derivative(n, t)).collect()
    }

    pub fn mode_trajectory(&self, n: usize, times: &[T]) -> Result<Vec<T>> {
        times.iter().map(|&t| self.eval_mode(n, t)).collect()
    }

    /// `u(x, t)`.
    pub fn evaluate(&self, x: T, t: T) -> Result<T> {
        if !(x >= T::zero() && x <= self.system.length()) {
            return domain(format!("point {x} outside [0, {}]", self.system.length()));
        }
        let c = self.coefficients(t)?;
        Ok(self.system.synthesize(&c, &[x])?[0])
    }

    /// `u(x_i, t)` at many points.
    pub fn evaluate_at(&self, points: &[T], t: T) -> Result<Vec<T>> {
        let c = self.coefficients(t)?;
        self.system.synthesize(&c, points)
    }

    /// `|v_{j-1,n}(t_j) - v_{j,n}(t_j)|` for `j = 1..M`, maximized over modes.
    pub fn junction_gaps(&self) -> Result<Vec<T>> {
        (1..self.contexts.len())
            .map(|j| {
                let mut worst = T::zero();
                for (n, sols) in self.modes.iter().enumerate() {
                    let prev = &self.contexts[j - 1];
                    let left = sols[j - 1].eval(prev, prev.length).map_err(|e| tag(e, n, j - 1))?;
                    let right = sols[j].eval(&self.contexts[j], T::zero()).map_err(|e| tag(e, n, j))?;
                    worst = worst.max((left - right).abs());
                }
                Ok(worst)
            })
            .collect()
    }
}
