use std::path::Path;
use std::time::Instant;

use fracstep_core::verification::{interior_probe_grid, regularity_report, residual_check, RateFit};
use fracstep_core::{ml, solve_mode_l1, EigenSystem, L1Grid, MLParams, ProblemSpec, SolutionField, TimeProfile};
use log::{debug, info};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ProblemConfig, RunConfig};
use crate::output::{fmt, Artifacts, Table};
use crate::CliError;

pub struct Run {
    pub artifacts: Artifacts,
    pub timings: Vec<(&'static str, f64)>,
}

impl Run {
    fn new() -> Self {
        Self {
            artifacts: Artifacts::default(),
            timings: Vec::new(),
        }
    }

    fn timed<R>(&mut self, label: &'static str, f: impl FnOnce() -> R) -> R {
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        debug!("{label}: {secs:.3} s");
        self.timings.push((label, secs));
        out
    }
}

/// `f_n(t) = sum_i c_{i,n} h_i(t)` with the projections done once.
struct ModalSource {
    terms: Vec<(Vec<f64>, TimeProfile<f64>)>,
}

impl ModalSource {
    fn new(problem: &ProblemConfig, sys: &EigenSystem<f64>) -> Result<Self, CliError> {
        let terms = problem
            .source_terms()?
            .into_iter()
            .map(|(g, h)| Ok((g.coefficients(sys)?, h)))
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(Self { terms })
    }

    fn mode(&self, n: usize, t: f64) -> f64 {
        self.terms.iter().map(|(c, h)| c[n] * h.value(t)).sum()
    }
}

fn output_times(config: &RunConfig, horizon: f64) -> Result<Vec<f64>, CliError> {
    match &config.run.times {
        Some(t) => {
            if let Some(bad) = t.iter().find(|t| !(**t >= 0.0 && **t <= horizon)) {
                return Err(CliError::Config(format!("output time {bad} outside [0, {horizon}]")));
            }
            Ok(t.clone())
        }
        None => {
            let k = config.run.time_samples;
            if k == 0 {
                return Err(CliError::Config("time_samples must be positive".into()));
            }
            Ok((0..=k).map(|i| horizon * i as f64 / k as f64).collect())
        }
    }
}

fn spatial_points(length: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if n < 2 {
        return Err(CliError::Config("points must be at least 2".into()));
    }
    Ok((0..n).map(|i| length * i as f64 / (n - 1) as f64).collect())
}

fn modes_table(field: &SolutionField<f64>, times: &[f64]) -> Result<Table, CliError> {
    let mut table = Table::new(&["t", "n", "u_n"]);
    for &t in times {
        for (n, c) in field.coefficients(t)?.iter().enumerate() {
            table.row([fmt(t), (n + 1).to_string(), fmt(*c)]);
        }
    }
    Ok(table)
}

pub fn solve(config: &RunConfig) -> Result<Run, CliError> {
    let problem = config.problem()?;
    let spec = problem.build()?;
    let times = output_times(config, spec.schedule.horizon())?;
    let xs = spatial_points(problem.length, config.run.points)?;
    let mut run = Run::new();
    let field = run.timed("solve", || SolutionField::solve(&spec))?;
    info!("solved {} modes on {} segments", field.modes(), field.contexts().len());
    let rows = run.timed("evaluate", || {
        times
            .par_iter()
            .map(|&t| field.evaluate_at(&xs, t))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut solution = Table::new(&["x", "t", "u"]);
    for (&t, row) in times.iter().zip(&rows) {
        for (&x, &u) in xs.iter().zip(row) {
            solution.row([fmt(x), fmt(t), fmt(u)]);
        }
    }
    run.artifacts.add(&config.outputs.solution, solution.into_bytes());
    run.artifacts
        .add(&config.outputs.modes, modes_table(&field, &times)?.into_bytes());
    Ok(run)
}

/// L1 trajectories of every mode on `grid`.
fn modal_oracle(
    spec: &ProblemSpec<f64>,
    problem: &ProblemConfig,
    grid: &L1Grid<f64>,
) -> Result<Vec<Vec<f64>>, CliError> {
    let sys = spec.eigensystem()?;
    let u0 = spec.initial.coefficients(&sys)?;
    let src = ModalSource::new(problem, &sys)?;
    let out = (0..sys.modes())
        .into_par_iter()
        .map(|n| {
            let lam = sys.eigenvalues()[n];
            solve_mode_l1(lam, |t| src.mode(n, t), &spec.schedule, u0[n], grid)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(out)
}

pub fn oracle(config: &RunConfig) -> Result<Run, CliError> {
    let problem = config.problem()?;
    let spec = problem.build()?;
    let grid = L1Grid::new(&spec.schedule, config.run.tau)?;
    let mut run = Run::new();
    if config.run.oracle_full {
        let p = config.run.oracle_spatial_points;
        let rows = run.timed("oracle_full", || spec.solve_full_l1_fd(&grid, p))?;
        let xs = spec.operator.grid(p);
        let mut table = Table::new(&["x", "t", "u"]);
        for (m, row) in rows.iter().enumerate() {
            let t = grid.time(m);
            for (&x, &u) in xs.iter().zip(row) {
                table.row([fmt(x), fmt(t), fmt(u)]);
            }
        }
        run.artifacts.add(&config.outputs.oracle, table.into_bytes());
    } else {
        let traj = run.timed("oracle_modes", || modal_oracle(&spec, problem, &grid))?;
        let mut table = Table::new(&["t", "n", "u_n"]);
        for m in 0..=grid.steps() {
            for (n, u) in traj.iter().enumerate() {
                table.row([fmt(grid.time(m)), (n + 1).to_string(), fmt(u[m])]);
            }
        }
        run.artifacts.add(&config.outputs.oracle, table.into_bytes());
    }
    Ok(run)
}

pub fn compare(config: &RunConfig) -> Result<Run, CliError> {
    let problem = config.problem()?;
    let spec = problem.build()?;
    let horizon = spec.schedule.horizon();
    let k = config.run.compare_samples;
    if k == 0 || config.run.compare_taus.is_empty() {
        return Err(CliError::Config("compare needs sample times and step sizes".into()));
    }
    let spacing = horizon / k as f64;
    let mut strides = Vec::new();
    for &tau in &config.run.compare_taus {
        let r = spacing / tau;
        if !(r >= 1.0 && (r - r.round()).abs() <= 1e-9 * r) {
            return Err(CliError::Config(format!(
                "mismatched grids: step {tau} does not divide the sample spacing {spacing}"
            )));
        }
        strides.push(r.round() as usize);
    }
    let mut run = Run::new();
    let field = run.timed("solve", || SolutionField::solve(&spec))?;
    let times: Vec<f64> = (1..=k).map(|i| horizon * i as f64 / k as f64).collect();
    let exact = times
        .iter()
        .map(|&t| field.coefficients(t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["tau", "max_discrepancy", "l2_discrepancy"]);
    for (&tau, &stride) in config.run.compare_taus.iter().zip(&strides) {
        let grid = L1Grid::new(&spec.schedule, tau)?;
        let traj = run.timed("oracle", || modal_oracle(&spec, problem, &grid))?;
        let mut max: f64 = 0.0;
        let mut sq = 0.0;
        for (i, coeffs) in exact.iter().enumerate() {
            let mut norm = 0.0;
            for (n, c) in coeffs.iter().enumerate() {
                let d = traj[n][(i + 1) * stride] - c;
                max = max.max(d.abs());
                norm += d * d;
            }
            sq += norm;
        }
        let l2 = (sq / k as f64).sqrt();
        info!("tau {tau:e}: max {max:e}, l2 {l2:e}");
        table.row([fmt(tau), fmt(max), fmt(l2)]);
    }
    run.artifacts.add(&config.outputs.compare, table.into_bytes());
    Ok(run)
}

fn fit_json(fits: &[RateFit<f64>]) -> Value {
    Value::Array(
        fits.iter()
            .enumerate()
            .map(|(j, f)| json!({"segment": j, "exponent": f.exponent, "used": f.used}))
            .collect(),
    )
}

pub fn verify(config: &RunConfig) -> Result<Run, CliError> {
    let problem = config.problem()?;
    let spec = problem.build()?;
    let mut run = Run::new();
    let field = run.timed("solve", || SolutionField::solve(&spec))?;
    let rep = run.timed("report", || regularity_report(&spec, &field))?;
    let (nx, nt) = (config.run.verify_nx, config.run.verify_nt);
    let residual = if (nx, nt) == (10, 10) {
        rep.residual_max
    } else {
        residual_check(&field, &spec, &interior_probe_grid(&field, nx, nt))?
    };
    let data = match &rep.data_functional {
        Ok(d) => json!({
            "initial": d.initial,
            "values": d.values,
            "segments": d.segments.iter().map(|s| json!({
                "w11": s.w11,
                "weighted_sup": s.weighted_sup,
                "derivative_exponent": s.derivative_exponent,
            })).collect::<Vec<_>>(),
        }),
        Err(msg) => json!({"hypothesis_violation": msg}),
    };
    let lim = &rep.initial_limit;
    let report = json!({
        "blowup": fit_json(&rep.blowup),
        "source_blowup": fit_json(&rep.source_blowup),
        "c0_dl": rep.c0_dl,
        "w11": rep.w11,
        "data_functional": data,
        "estimate_ratio": rep.estimate_ratio(),
        "residual_max": residual,
        "residual_probes": [nx, nt],
        "initial_limit": {
            "times": lim.times,
            "deviations": lim.deviations,
            "initial_norm": lim.initial_norm,
            "strictly_decreasing": lim.strictly_decreasing(),
            "passes": lim.passes(),
        },
        "junction_gaps": rep.junction_gaps,
    });
    let mut fits = Table::new(&["kind", "segment", "offset", "norm"]);
    for (kind, list) in [("solution", &rep.blowup), ("source", &rep.source_blowup)] {
        for (j, f) in list.iter().enumerate() {
            for (d, v) in f.offsets.iter().zip(&f.norms) {
                fits.row([kind.to_string(), j.to_string(), fmt(*d), fmt(*v)]);
            }
        }
    }
    run.artifacts.add_json(&config.outputs.report, &report);
    run.artifacts.add(&config.outputs.rate_fits, fits.into_bytes());
    Ok(run)
}

pub fn ml_eval(config: &RunConfig, input: Option<&Path>, base: &Path) -> Result<Run, CliError> {
    let path = match (input, &config.run.ml_input) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => base.join(p),
        (None, None) => return Err(CliError::Config("ml-eval needs --input or run.ml_input".into())),
    };
    let mut reader = csv::Reader::from_path(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Config(format!("row {}: {e}", i + 1)))?;
        let vals = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Config(format!("row {}: {e}", i + 1)))?;
        if vals.len() != 3 {
            return Err(CliError::Config(format!("row {}: expected alpha,beta,z", i + 1)));
        }
        rows.push((vals[0], vals[1], vals[2]));
    }
    let mut run = Run::new();
    let values = run.timed("ml_eval", || {
        rows.par_iter()
            .map(|&(a, b, z)| ml(MLParams::new(a, b)?, z))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut table = Table::new(&["alpha", "beta", "z", "value"]);
    for (&(a, b, z), v) in rows.iter().zip(&values) {
        table.row([fmt(a), fmt(b), fmt(z), fmt(*v)]);
    }
    run.artifacts.add(&config.outputs.ml, table.into_bytes());
    Ok(run)
}
