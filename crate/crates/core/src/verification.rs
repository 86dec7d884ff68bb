//! Numerical checks of the regularity estimates and of the solution contract.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::quadrature::{graded_time_quadrature, HistoryRule};
use crate::scalar::Real;
use crate::solver::{ProblemSpec, SolutionField};
use crate::special::rgamma;
use crate::spectral::EigenSystem;

fn l2<T: Real>(v: &[T]) -> T {
    v.iter().map(|x| *x * *x).sum::<T>().sqrt()
}

/// Least-squares slope and the largest relative misfit `|e^r - 1|`.
fn loglog_fit<T: Real>(x: &[T], y: &[T]) -> (T, T) {
    let n = T::of(x.len());
    let lx: Vec<T> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<T> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().copied().sum::<T>() / n;
    let my = ly.iter().copied().sum::<T>() / n;
    let sxy: T = lx.iter().zip(&ly).map(|(a, b)| (*a - mx) * (*b - my)).sum();
    let sxx: T = lx.iter().map(|a| (*a - mx) * (*a - mx)).sum();
    let slope = sxy / sxx;
    let misfit = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (*b - my - slope * (*a - mx)).exp_m1().abs())
        .fold(T::zero(), T::max);
    (slope, misfit)
}

/// Log-log fit of a norm against the offset from a segment start.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit<T> {
    /// `None` when the quantity vanishes (no blow-up).
    pub exponent: Option<T>,
    pub offsets: Vec<T>,
    pub norms: Vec<T>,
    /// Number of leading samples used by the fit.
    pub used: usize,
}

impl<T: Real> RateFit<T> {
    fn from_samples(offsets: Vec<T>, norms: Vec<T>) -> Self {
        let floor = T::min_positive_value() / T::epsilon();
        if norms.iter().any(|v| !(*v > floor) || !v.is_finite()) {
            return Self {
                exponent: None,
                offsets,
                norms,
                used: 0,
            };
        }
        let (mut slope, misfit) = loglog_fit(&offsets, &norms);
        let mut used = offsets.len();
        if misfit > T::c(0.05) && offsets.len() > 4 {
            used -= 2;
            slope = loglog_fit(&offsets[..used], &norms[..used]).0;
        }
        Self {
            exponent: Some(slope),
            offsets,
            norms,
            used,
        }
    }
}

/// `n` offsets log-spaced over `[lo, hi]`, ascending.
pub fn log_offsets<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * T::of(i) / T::of(n.max(2) - 1)).exp())
        .collect()
}

/// Per-segment pieces of the data functional.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentData<T> {
    /// `int ||f|| + int ||f'||` over the segment.
    pub w11: T,
    /// `sup (t - t_k)^{beta_k + eps_k} ||f'(t)||`.
    pub weighted_sup: T,
    /// Fitted exponent of `||f'||` at the segment start.
    pub derivative_exponent: Option<T>,
}

/// `F_j = ||u_0||_{D(L)} + sum_{k<=j} (||f||_{W^{1,1}(I_k)} + ||(.-t_k)^{b_k+e_k} f'||_inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataFunctional<T> {
    pub initial: T,
    pub segments: Vec<SegmentData<T>>,
    pub values: Vec<T>,
}

fn source_segment_data<T: Real>(spec: &ProblemSpec<T>, sys: &EigenSystem<T>, k: usize) -> Result<SegmentData<T>> {
    let s = &spec.schedule;
    let (t0, h) = (s.start(k), s.width(k));
    let weight = s.orders()[k] + spec.regularity()[k];
    if spec.source.is_zero() {
        return Ok(SegmentData {
            w11: T::zero(),
            weighted_sup: T::zero(),
            derivative_exponent: None,
        });
    }
    let dnorm = |tau: T| -> Result<T> { Ok(l2(&spec.source.coefficient_derivatives(sys, t0 + tau)?)) };
    let fit_offsets = log_offsets(h * T::c(1e-8), h * T::c(1e-4), 9);
    let fit_norms = fit_offsets.iter().map(|&d| dnorm(d)).collect::<Result<Vec<T>>>()?;
    let fit = RateFit::from_samples(fit_offsets, fit_norms);
    // treat near-flat behaviour as bounded
    let q = fit.exponent.map(|q| if q.abs() < T::c(0.02) { T::zero() } else { q });
    if let Some(q) = q {
        if q < -weight - T::c(0.02) {
            return Err(Error::Hypothesis(format!(
                "segment {k}: ||f'|| grows like (t - t_k)^{q:.4}, faster than the admissible \
                 (t - t_k)^-{weight} of the declared regularity"
            )));
        }
        if q <= -T::one() {
            return Err(Error::Hypothesis(format!("segment {k}: ||f'|| is not integrable")));
        }
    }
    let p = q.unwrap_or(T::zero()).min(T::zero());
    let fnorm = |tau: T| l2(&spec.source.coefficients(sys, t0 + tau).unwrap_or_default());
    let cells = 24;
    let int_f = graded_time_quadrature(fnorm, T::zero(), h, cells, T::zero())?;
    let int_df = graded_time_quadrature(|tau| dnorm(tau).unwrap_or(T::nan()), T::zero(), h, cells, p)?;
    if !(int_f.is_finite() && int_df.is_finite()) {
        return Err(Error::Numeric(format!("segment {k}: source norms not finite")));
    }
    let mut probes = log_offsets(h * T::c(1e-10), h, 60);
    probes.extend((1..64).map(|i| h * T::of(i) / T::c(64.0)));
    let mut sup = T::zero();
    for d in probes {
        sup = sup.max(d.powf(weight) * dnorm(d)?);
    }
    Ok(SegmentData {
        w11: int_f + int_df,
        weighted_sup: sup,
        derivative_exponent: fit.exponent,
    })
}

pub fn data_functional_parts<T: Real>(spec: &ProblemSpec<T>) -> Result<DataFunctional<T>> {
    let sys = spec.eigensystem()?;
    let initial = sys.graph_norm(&spec.initial.coefficients(&sys)?);
    let segments = (0..spec.schedule.segments())
        .map(|k| source_segment_data(spec, &sys, k))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = initial;
    let values = segments
        .iter()
        .map(|s| {
            acc = acc + s.w11 + s.weighted_sup;
            acc
        })
        .collect();
    Ok(DataFunctional {
        initial,
        segments,
        values,
    })
}

/// `F_j`.
pub fn data_functional<T: Real>(spec: &ProblemSpec<T>, j: usize) -> Result<T> {
    if j >= spec.schedule.segments() {
        return domain(format!("segment {j} beyond {}", spec.schedule.segments()));
    }
    Ok(data_functional_parts(spec)?.values[j])
}

/// Breakpoints, points graded toward each of them, and a uniform sweep.
pub fn default_time_probes<T: Real>(field: &SolutionField<T>) -> Vec<T> {
    let s = field.schedule();
    let mut v: Vec<T> = s.breakpoints().to_vec();
    for j in 0..s.segments() {
        for d in log_offsets(s.width(j) * T::c(1e-6), s.width(j) * T::c(0.5), 16) {
            v.push(s.start(j) + d);
        }
    }
    v.extend((1..64).map(|i| s.horizon() * T::of(i) / T::c(64.0)));
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
    v
}

/// `max_t ||u(t)||_{D(L)}` over `probes`.
pub fn c0_dl_norm<T: Real>(field: &SolutionField<T>, probes: &[T]) -> Result<T> {
    let norms = probes
        .par_iter()
        .map(|&t| Ok(field.system().graph_norm(&field.coefficients(t)?)))
        .collect::<Result<Vec<T>>>()?;
    Ok(norms.into_iter().fold(T::zero(), T::max))
}

/// `sum_j int_{I_j} ||v_j'(t)|| dt`.
pub fn w11_norm<T: Real>(field: &SolutionField<T>) -> Result<T> {
    w11_norm_with(field, 24)
}

pub fn w11_norm_with<T: Real>(field: &SolutionField<T>, cells: usize) -> Result<T> {
    let parts = (0..field.contexts().len())
        .into_par_iter()
        .map(|j| {
            let ctx = &field.contexts()[j];
            let failure = std::cell::RefCell::new(None);
            let g = |tau: T| {
                let mut s = T::zero();
                for n in 0..field.modes() {
                    match field.segment(n, j).derivative(ctx, tau) {
                        Ok(d) => s = s + d * d,
                        Err(e) => {
                            failure.borrow_mut().get_or_insert(e);
                            return T::nan();
                        }
                    }
                }
                s.sqrt()
            };
            let v = graded_time_quadrature(g, T::zero(), ctx.length, cells, ctx.order - T::one())?;
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            if !v.is_finite() {
                return Err(Error::Numeric(format!("segment {j}: derivative norm not integrable")));
            }
            Ok(v)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(parts.into_iter().sum())
}

/// Slope of `log ||u'(t_j + d)||` against `log d`, `d in [1e-6, 1e-2] h_j`.
pub fn blowup_rate_fit<T: Real>(field: &SolutionField<T>, j: usize) -> Result<RateFit<T>> {
    if j >= field.contexts().len() {
        return domain(format!("segment {j} beyond {}", field.contexts().len()));
    }
    let ctx = &field.contexts()[j];
    let offsets = log_offsets(ctx.length * T::c(1e-6), ctx.length * T::c(1e-2), 13);
    let norms = offsets
        .par_iter()
        .map(|&d| {
            let v = (0..field.modes())
                .map(|n| field.segment(n, j).derivative(ctx, d))
                .collect::<Result<Vec<T>>>()?;
            Ok(l2(&v))
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(RateFit::from_samples(offsets, norms))
}

/// `f_j'(t_j + tau)` per mode: base derivative plus the differentiated memory terms.
pub fn segment_source_derivative<T: Real>(
    spec: &ProblemSpec<T>,
    field: &SolutionField<T>,
    j: usize,
    tau: T,
) -> Result<Vec<T>> {
    let ctxs = field.contexts();
    let ctx = &ctxs[j];
    let mut out = if spec.source.is_zero() {
        vec![T::zero(); field.modes()]
    } else {
        spec.source.coefficient_derivatives(field.system(), ctx.start + tau)?
    };
    if j > 0 {
        let c = ctx.order * rgamma(T::one() - ctx.order);
        for (n, o) in out.iter_mut().enumerate() {
            for (k, kctx) in ctxs.iter().enumerate().take(j) {
                let g = field
                    .segment(n, k)
                    .memory()
                    .ok_or_else(|| Error::Numeric(format!("segment {k} carries no memory samples")))?;
                let gap = ctx.start - ctxs[k + 1].start;
                *o = *o + c * kctx.rule.integrate(g, gap + tau, -T::one() - ctx.order);
            }
        }
    }
    Ok(out)
}

/// Same fitting protocol as [`blowup_rate_fit`] applied to `||f_j'||`.
pub fn source_rate_fit<T: Real>(spec: &ProblemSpec<T>, field: &SolutionField<T>, j: usize) -> Result<RateFit<T>> {
    if j >= field.contexts().len() {
        return domain(format!("segment {j} beyond {}", field.contexts().len()));
    }
    let ctx = &field.contexts()[j];
    let offsets = log_offsets(ctx.length * T::c(1e-6), ctx.length * T::c(1e-2), 13);
    let norms = offsets
        .par_iter()
        .map(|&d| Ok(l2(&segment_source_derivative(spec, field, j, d)?)))
        .collect::<Result<Vec<T>>>()?;
    Ok(RateFit::from_samples(offsets, norms))
}

/// `nx x nt` interior probes; times kept at least `1e-3 min h_j` from breakpoints.
pub fn interior_probe_grid<T: Real>(field: &SolutionField<T>, nx: usize, nt: usize) -> Vec<(T, T)> {
    let s = field.schedule();
    let l = field.system().length();
    let floor = (0..s.segments()).map(|j| s.width(j)).fold(T::infinity(), T::min) * T::c(1e-3);
    let half = T::c(0.5);
    let mut out = Vec::with_capacity(nx * nt);
    for it in 0..nt {
        let mut t = s.horizon() * (T::of(it) + half) / T::of(nt);
        for &b in s.breakpoints() {
            if (t - b).abs() < floor {
                t = if t >= b { b + floor } else { b - floor };
            }
        }
        for ix in 0..nx {
            out.push((l * (T::of(ix) + half) / T::of(nx), t));
        }
    }
    out
}

/// Memory samples on a finer rule, shared by all probe times.
struct ResidualMemory<T> {
    rules: Vec<HistoryRule<T>>,
    samples: Vec<Vec<Vec<T>>>,
}

const RESIDUAL_NODES: usize = 16;

fn residual_memory<T: Real>(field: &SolutionField<T>) -> Result<ResidualMemory<T>> {
    let ctxs = field.contexts();
    let m = ctxs.len();
    let mut rules = Vec::with_capacity(m);
    let mut samples = Vec::with_capacity(m);
    for (k, ctx) in ctxs.iter().enumerate().take(m.saturating_sub(1)) {
        let rule = HistoryRule::new(ctx.length, ctx.order - T::one(), RESIDUAL_NODES)?;
        let per_mode = (0..field.modes())
            .into_par_iter()
            .map(|n| rule.regularize(|l| field.segment(n, k).derivative(ctx, l)))
            .collect::<Result<Vec<_>>>()?;
        rules.push(rule);
        samples.push(per_mode);
    }
    Ok(ResidualMemory { rules, samples })
}

/// Per-mode defect `D^{beta(t)} u_n + lambda_n u_n - f_{0,n}` at time `t`.
fn mode_residuals<T: Real>(
    field: &SolutionField<T>,
    spec: &ProblemSpec<T>,
    mem: &ResidualMemory<T>,
    t: T,
) -> Result<Vec<T>> {
    let s = field.schedule();
    let j = s.segment_index(t)?;
    let ctxs = field.contexts();
    let ctx = &ctxs[j];
    let tau = t - ctx.start;
    if !(tau > T::zero()) {
        return domain(format!("residual probe {t} sits on a breakpoint"));
    }
    let c = rgamma(T::one() - ctx.order);
    let current = HistoryRule::new(tau, ctx.order - T::one(), RESIDUAL_NODES)?;
    let f0 = if spec.source.is_zero() {
        vec![T::zero(); field.modes()]
    } else {
        spec.source.coefficients(field.system(), t)?
    };
    let lambdas = field.system().eigenvalues();
    (0..field.modes())
        .into_par_iter()
        .map(|n| {
            let sol = field.segment(n, j);
            let g = current.regularize(|l| sol.derivative(ctx, l))?;
            let mut d = c * current.integrate(&g, T::zero(), -ctx.order);
            for k in 0..j {
                let gap = ctx.start - ctxs[k + 1].start;
                d = d + c * mem.rules[k].integrate(&mem.samples[k][n], gap + tau, -ctx.order);
            }
            Ok(d + lambdas[n] * sol.eval(ctx, tau)? - f0[n])
        })
        .collect()
}

/// `max |D^{beta(t)} u + L u - f|` over `(x, t)` probes.
pub fn residual_check<T: Real>(field: &SolutionField<T>, spec: &ProblemSpec<T>, probes: &[(T, T)]) -> Result<T> {
    let mem = residual_memory(field)?;
    let mut times: Vec<T> = probes.iter().map(|p| p.1).collect();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();
    let mut worst = T::zero();
    for t in times {
        let r = mode_residuals(field, spec, &mem, t)?;
        let xs: Vec<T> = probes.iter().filter(|p| p.1 == t).map(|p| p.0).collect();
        for v in field.system().synthesize(&r, &xs)? {
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}

/// `||u(t) - u_0||` at `t in {1e-3, 1e-4, 1e-5, 1e-6} T`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialLimit<T> {
    pub times: Vec<T>,
    pub deviations: Vec<T>,
    pub initial_norm: T,
}

impl<T: Real> InitialLimit<T> {
    pub fn strictly_decreasing(&self) -> bool {
        self.deviations.windows(2).all(|w| w[1] < w[0]) || self.deviations.iter().all(|d| *d == T::zero())
    }

    pub fn final_deviation(&self) -> T {
        *self.deviations.last().unwrap_or(&T::zero())
    }

    /// Decreasing and ending at most `1e-3 ||u_0||`.
    pub fn passes(&self) -> bool {
        self.strictly_decreasing() && self.final_deviation() <= T::c(1e-3) * self.initial_norm
    }
}

pub fn initial_limit_check<T: Real>(field: &SolutionField<T>) -> Result<InitialLimit<T>> {
    let horizon = field.schedule().horizon();
    let u0 = field.initial();
    let times: Vec<T> = [1e-3, 1e-4, 1e-5, 1e-6].iter().map(|f| horizon * T::c(*f)).collect();
    let deviations = times
        .iter()
        .map(|&t| {
            let c = field.coefficients(t)?;
            Ok(c.iter().zip(u0).map(|(a, b)| (*a - *b) * (*a - *b)).sum::<T>().sqrt())
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(InitialLimit {
        times,
        deviations,
        initial_norm: l2(u0),
    })
}

/// Everything the estimates say, measured.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport<T> {
    pub blowup: Vec<RateFit<T>>,
    pub source_blowup: Vec<RateFit<T>>,
    pub c0_dl: T,
    pub w11: T,
    /// Data functional, or the hypothesis violation that prevents it.
    pub data_functional: std::result::Result<DataFunctional<T>, String>,
    pub residual_max: T,
    pub initial_limit: InitialLimit<T>,
    pub junction_gaps: Vec<T>,
}

impl<T: Real> RegularityReport<T> {
    /// `(c0_dl + w11) / F_{M-1}`.
    pub fn estimate_ratio(&self) -> Option<T> {
        self.data_functional
            .as_ref()
            .ok()
            .and_then(|d| d.values.last().copied())
            .map(|f| (self.c0_dl + self.w11) / f)
    }
}

pub fn regularity_report<T: Real>(spec: &ProblemSpec<T>, field: &SolutionField<T>) -> Result<RegularityReport<T>> {
    let m = field.contexts().len();
    let blowup = (0..m).map(|j| blowup_rate_fit(field, j)).collect::<Result<Vec<_>>>()?;
    let source_blowup = (0..m)
        .map(|j| source_rate_fit(spec, field, j))
        .collect::<Result<Vec<_>>>()?;
    let data_functional = match data_functional_parts(spec) {
        Ok(d) => Ok(d),
        Err(Error::Hypothesis(m)) => Err(m),
        Err(e) => return Err(e),
    };
    let probes = interior_probe_grid(field, 10, 10);
    Ok(RegularityReport {
        blowup,
        source_blowup,
        c0_dl: c0_dl_norm(field, &default_time_probes(field))?,
        w11: w11_norm(field)?,
        data_functional,
        residual_max: residual_check(field, spec, &probes)?,
        initial_limit: initial_limit_check(field)?,
        junction_gaps: field.junction_gaps()?,
    })
}
