//! Dirichlet eigensystems of `-(a u')' + c u` on `(0, L)`.

use crate::error::{domain, Error, Result};
use crate::scalar::Real;
use crate::special::sin_pi;

/// Coefficient of the elliptic operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient<T> {
    Constant(T),
    /// Values on a uniform grid spanning `[0, L]` (endpoints included),
    /// linearly interpolated in between.
    Sampled(Vec<T>),
}

impl<T: Real> Coefficient<T> {
    pub fn from_fn<F: Fn(T) -> T>(length: T, samples: usize, f: F) -> Self {
        let n = samples.max(2);
        Coefficient::Sampled((0..n).map(|i| f(length * T::of(i) / T::of(n - 1))).collect())
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Coefficient::Constant(_))
    }

    fn at(&self, length: T, x: T) -> T {
        match self {
            Coefficient::Constant(v) => *v,
            Coefficient::Sampled(v) => {
                let n = v.len();
                let u = (x / length).max(T::zero()).min(T::one()) * T::of(n - 1);
                let i = u.floor().to_usize().unwrap_or(0).min(n - 2);
                let th = u - T::of(i);
                v[i] + (v[i + 1] - v[i]) * th
            }
        }
    }

    fn min(&self) -> T {
        match self {
            Coefficient::Constant(v) => *v,
            Coefficient::Sampled(v) => v.iter().copied().fold(T::infinity(), T::min),
        }
    }
}

/// `-(a u')' + c u` on `(0, L)` with homogeneous Dirichlet conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec<T> {
    length: T,
    diffusivity: Coefficient<T>,
    reaction: Coefficient<T>,
    ellipticity_floor: T,
    reaction_floor: T,
}

impl<T: Real> OperatorSpec<T> {
    pub fn new(
        length: T,
        diffusivity: Coefficient<T>,
        reaction: Coefficient<T>,
        ellipticity_floor: T,
        reaction_floor: T,
    ) -> Result<Self> {
        if !(length > T::zero() && length.is_finite()) {
            return domain(format!("domain length {length} must be positive"));
        }
        for (name, c) in [("diffusivity", &diffusivity), ("reaction", &reaction)] {
            if let Coefficient::Sampled(v) = c {
                if v.len() < 2 {
                    return domain(format!("{name} needs at least two samples"));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return domain(format!("{name} has non-finite samples"));
                }
            }
        }
        if !(ellipticity_floor > T::zero()) {
            return domain(format!("ellipticity floor {ellipticity_floor} must be positive"));
        }
        if !(reaction_floor >= T::zero()) {
            return domain(format!("reaction floor {reaction_floor} must be nonnegative"));
        }
        if !(diffusivity.min() >= ellipticity_floor) {
            return domain(format!(
                "diffusivity minimum {} below ellipticity floor {ellipticity_floor}",
                diffusivity.min()
            ));
        }
        if !(reaction.min() >= -reaction_floor) {
            return domain(format!("reaction minimum {} below -{reaction_floor}", reaction.min()));
        }
        let kappa = T::PI() / length;
        if !(reaction_floor < ellipticity_floor * kappa * kappa) {
            return domain(format!(
                "operator not coercive: reaction floor {reaction_floor} >= {}",
                ellipticity_floor * kappa * kappa
            ));
        }
        Ok(Self {
            length,
            diffusivity,
            reaction,
            ellipticity_floor,
            reaction_floor,
        })
    }

    /// Constant coefficients with the tightest admissible floors.
    pub fn constant(length: T, a: T, c: T) -> Result<Self> {
        Self::new(
            length,
            Coefficient::Constant(a),
            Coefficient::Constant(c),
            a,
            (-c).max(T::zero()),
        )
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn diffusivity(&self) -> &Coefficient<T> {
        &self.diffusivity
    }

    pub fn reaction(&self) -> &Coefficient<T> {
        &self.reaction
    }

    pub fn ellipticity_floor(&self) -> T {
        self.ellipticity_floor
    }

    pub fn reaction_floor(&self) -> T {
        self.reaction_floor
    }

    /// Uniform grid `x_i = i L/(P+1)`, `i = 0..=P+1`.
    pub fn grid(&self, interior: usize) -> Vec<T> {
        let h = self.length / T::of(interior + 1);
        (0..interior + 2)
            .map(|i| if i == interior + 1 { self.length } else { h * T::of(i) })
            .collect()
    }

    /// Symmetric three-point matrix on `interior` points: `(diag, off)`,
    /// `off[i]` coupling points `i` and `i+1`.
    pub fn fd_operator(&self, interior: usize) -> Result<(Vec<T>, Vec<T>)> {
        if interior == 0 {
            return domain("finite-difference grid needs interior points");
        }
        let h = self.length / T::of(interior + 1);
        let h2 = h * h;
        let half = T::c(0.5);
        let flux: Vec<T> = (0..=interior)
            .map(|i| self.diffusivity.at(self.length, h * (T::of(i) + half)) / h2)
            .collect();
        let diag = (0..interior)
            .map(|i| flux[i] + flux[i + 1] + self.reaction.at(self.length, h * T::of(i + 1)))
            .collect();
        let off = (0..interior - 1).map(|i| -flux[i + 1]).collect();
        Ok((diag, off))
    }
}

/// How eigenfunctions are represented between grid points.
#[derive(Debug, Clone, PartialEq)]
enum Basis<T> {
    Sine,
    /// Grid values including the zero boundary entries.
    Grid(Vec<Vec<T>>),
}

/// Leading Dirichlet eigenpairs with the discrete inner product
/// `<u, v> = h sum_i u_i v_i` on the uniform interior grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem<T> {
    length: T,
    eigenvalues: Vec<T>,
    grid: Vec<T>,
    basis: Basis<T>,
}

impl<T: Real> EigenSystem<T> {
    /// `lambda_n = a (n pi/L)^2 + c`, `X_n = sqrt(2/L) sin(n pi x/L)`.
    pub fn analytic(spec: &OperatorSpec<T>, modes: usize, spatial_points: usize) -> Result<Self> {
        let (a, c) = match (&spec.diffusivity, &spec.reaction) {
            (Coefficient::Constant(a), Coefficient::Constant(c)) => (*a, *c),
            _ => return domain("analytic eigensystem needs constant coefficients"),
        };
        if modes == 0 {
            return domain("at least one mode is required");
        }
        if modes > spatial_points {
            return domain(format!("{modes} modes exceed {spatial_points} spatial points"));
        }
        let l = spec.length;
        let eigenvalues = (1..=modes)
            .map(|n| {
                let k = T::of(n) * T::PI() / l;
                a * k * k + c
            })
            .collect();
        Ok(Self {
            length: l,
            eigenvalues,
            grid: spec.grid(spatial_points),
            basis: Basis::Sine,
        })
    }

    /// Lowest `modes` eigenpairs of the three-point discretization on
    /// `spatial_points` interior points.
    pub fn finite_difference(spec: &OperatorSpec<T>, modes: usize, spatial_points: usize) -> Result<Self> {
        if modes == 0 {
            return domain("at least one mode is required");
        }
        if modes > spatial_points {
            return domain(format!("{modes} modes exceed {spatial_points} spatial points"));
        }
        if spatial_points < modes + 2 {
            return domain(format!("{spatial_points} spatial points too few for {modes} modes"));
        }
        let (diag, off) = spec.fd_operator(spatial_points)?;
        let h = spec.length / T::of(spatial_points + 1);
        let mut eigenvalues = Vec::with_capacity(modes);
        let mut vectors: Vec<Vec<T>> = Vec::with_capacity(modes);
        for k in 0..modes {
            let lam = sturm_eigenvalue(&diag, &off, k);
            let mut v = inverse_iteration(&diag, &off, lam)?;
            for prev in &vectors {
                let dot: T = v.iter().zip(&prev[1..]).map(|(a, b)| *a * *b).sum::<T>() * h;
                for (x, p) in v.iter_mut().zip(&prev[1..]) {
                    *x = *x - dot * *p;
                }
            }
            let norm = (v.iter().map(|x| *x * *x).sum::<T>() * h).sqrt();
            if !(norm > T::zero() && norm.is_finite()) {
                return Err(Error::Numeric(format!("eigenvector {} collapsed", k + 1)));
            }
            let sign = if v[0] < T::zero() { -T::one() } else { T::one() };
            let mut full = Vec::with_capacity(spatial_points + 2);
            full.push(T::zero());
            full.extend(v.iter().map(|x| sign * *x / norm));
            full.push(T::zero());
            eigenvalues.push(lam);
            vectors.push(full);
        }
        if !(eigenvalues[0] > T::zero()) {
            return Err(Error::Numeric(format!(
                "lowest eigenvalue {} not positive",
                eigenvalues[0]
            )));
        }
        Ok(Self {
            length: spec.length,
            eigenvalues,
            grid: spec.grid(spatial_points),
            basis: Basis::Grid(vectors),
        })
    }

    pub fn modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn length(&self) -> T {
        self.length
    }

    /// Spatial grid including both boundary points.
    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    fn step(&self) -> T {
        self.grid[1] - self.grid[0]
    }

    /// Eigenfunction `k` (zero-based) at grid point `i`.
    fn at_grid(&self, k: usize, i: usize) -> T {
        match &self.basis {
            Basis::Sine => self.sine(k, self.grid[i]),
            Basis::Grid(v) => v[k][i],
        }
    }

    fn sine(&self, k: usize, x: T) -> T {
        (T::c(2.0) / self.length).sqrt() * sin_pi(T::of(k + 1) * x / self.length)
    }

    /// `X_{k+1}(x)`, zero-based `k`.
    pub fn eigenfunction(&self, k: usize, x: T) -> Result<T> {
        if k >= self.modes() {
            return domain(format!("mode index {k} beyond {} modes", self.modes()));
        }
        if !(x >= T::zero() && x <= self.length) {
            return domain(format!("point {x} outside [0, {}]", self.length));
        }
        Ok(match &self.basis {
            Basis::Sine => self.sine(k, x),
            Basis::Grid(v) => {
                let h = self.step();
                let p = self.grid.len() - 1;
                let i = (x / h).floor().to_usize().unwrap_or(0).min(p - 1);
                let th = (x - self.grid[i]) / h;
                let (a, b) = (v[k][i], v[k][i + 1]);
                if th == T::zero() {
                    a
                } else if th == T::one() {
                    b
                } else {
                    a + (b - a) * th
                }
            }
        })
    }

    /// `<u, v>` for samples on the full grid.
    pub fn inner(&self, u: &[T], v: &[T]) -> Result<T> {
        let n = self.grid.len();
        if u.len() != n || v.len() != n {
            return domain(format!("samples of length {}/{} on a grid of {n}", u.len(), v.len()));
        }
        Ok(u[1..n - 1].iter().zip(&v[1..n - 1]).map(|(a, b)| *a * *b).sum::<T>() * self.step())
    }

    /// Mode coefficients of grid samples (boundary entries included, ignored).
    pub fn project(&self, field: &[T]) -> Result<Vec<T>> {
        let n = self.grid.len();
        if field.len() != n {
            return domain(format!("field has {} samples, grid has {n}", field.len()));
        }
        let h = self.step();
        Ok((0..self.modes())
            .map(|k| (1..n - 1).map(|i| field[i] * self.at_grid(k, i)).sum::<T>() * h)
            .collect())
    }

    pub fn project_fn<F: Fn(T) -> T>(&self, f: F) -> Result<Vec<T>> {
        let samples: Vec<T> = self.grid.iter().map(|&x| f(x)).collect();
        self.project(&samples)
    }

    /// `sum_n c_n X_n` at `points`.
    pub fn synthesize(&self, coeffs: &[T], points: &[T]) -> Result<Vec<T>> {
        if coeffs.len() > self.modes() {
            return domain(format!("{} coefficients for {} modes", coeffs.len(), self.modes()));
        }
        points
            .iter()
            .map(|&x| {
                let mut s = T::zero();
                for (k, c) in coeffs.iter().enumerate() {
                    if *c != T::zero() {
                        s = s + *c * self.eigenfunction(k, x)?;
                    }
                }
                Ok(s)
            })
            .collect()
    }

    /// `||f||^2 - sum g_n^2` for grid samples `field` with coefficients `coeffs`.
    pub fn parseval_defect(&self, field: &[T], coeffs: &[T]) -> Result<T> {
        let norm2 = self.inner(field, field)?;
        Ok(norm2 - coeffs.iter().map(|g| *g * *g).sum::<T>())
    }

    /// `(sum lambda_n^2 c_n^2)^{1/2}`.
    pub fn graph_norm(&self, coeffs: &[T]) -> T {
        coeffs
            .iter()
            .zip(&self.eigenvalues)
            .map(|(c, l)| *c * *l * *c * *l)
            .sum::<T>()
            .sqrt()
    }

    /// `max_{m,n} |<X_m, X_n> - delta_mn|`.
    pub fn orthonormality_defect(&self) -> T {
        let n = self.grid.len();
        let h = self.step();
        let mut worst = T::zero();
        for a in 0..self.modes() {
            for b in a..self.modes() {
                let dot = (1..n - 1).map(|i| self.at_grid(a, i) * self.at_grid(b, i)).sum::<T>() * h;
                let target = if a == b { T::one() } else { T::zero() };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `lambda_N^2 g_N^2`, a warning sign of under-resolved data.
    pub fn tail_indicator(&self, coeffs: &[T]) -> T {
        match (coeffs.last(), self.eigenvalues.get(coeffs.len().saturating_sub(1))) {
            (Some(c), Some(l)) => *l * *l * *c * *c,
            _ => T::zero(),
        }
    }
}

/// Number of eigenvalues below `x`.
fn sturm_count<T: Real>(diag: &[T], off: &[T], x: T) -> usize {
    let tiny = T::min_positive_value().sqrt();
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < T::zero() {
        count += 1;
    }
    for i in 1..diag.len() {
        let qq = if q.abs() < tiny { tiny } else { q };
        q = diag[i] - x - off[i - 1] * off[i - 1] / qq;
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

/// `k`-th smallest eigenvalue (zero-based) by bisection on the Sturm count.
fn sturm_eigenvalue<T: Real>(diag: &[T], off: &[T], k: usize) -> T {
    let n = diag.len();
    let mut lo = T::infinity();
    let mut hi = -T::infinity();
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { T::zero() } + if i + 1 < n { off[i].abs() } else { T::zero() };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    for _ in 0..200 {
        let mid = (lo + hi) / T::c(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / T::c(2.0)
}

/// Eigenvector for an accurate eigenvalue estimate `lam`.
fn inverse_iteration<T: Real>(diag: &[T], off: &[T], lam: T) -> Result<Vec<T>> {
    let n = diag.len();
    let scale = diag.iter().fold(T::zero(), |m, d| m.max(d.abs()));
    let shift = lam + scale * T::epsilon() * T::c(4.0);
    let mut v: Vec<T> = (0..n).map(|i| T::one() + T::c(1e-3) * T::of(i % 7)).collect();
    for _ in 0..3 {
        v = tridiagonal_solve_pivoted(diag, off, shift, &v)?;
        let m = v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        if !(m > T::zero() && m.is_finite()) {
            return Err(Error::Numeric("inverse iteration broke down".into()));
        }
        for x in v.iter_mut() {
            *x = *x / m;
        }
    }
    Ok(v)
}

/// Solves `(A - shift I) x = b` by Gaussian elimination with partial pivoting.
fn tridiagonal_solve_pivoted<T: Real>(diag: &[T], off: &[T], shift: T, b: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    // row i: sub l[i], main d[i], super u[i], second super u2[i]
    let mut d: Vec<T> = diag.iter().map(|x| *x - shift).collect();
    let mut u: Vec<T> = (0..n).map(|i| if i + 1 < n { off[i] } else { T::zero() }).collect();
    let mut u2 = vec![T::zero(); n];
    let mut l: Vec<T> = (0..n).map(|i| if i > 0 { off[i - 1] } else { T::zero() }).collect();
    let mut x = b.to_vec();
    let floor = T::min_positive_value().sqrt() * diag.iter().fold(T::one(), |m, d| m.max(d.abs()));
    for i in 0..n - 1 {
        let sub = l[i + 1];
        if sub.abs() > d[i].abs() {
            // swap rows i and i+1
            let (di, ui, u2i, xi) = (d[i], u[i], u2[i], x[i]);
            d[i] = sub;
            u[i] = d[i + 1];
            u2[i] = u[i + 1];
            x[i] = x[i + 1];
            l[i + 1] = di;
            d[i + 1] = ui;
            u[i + 1] = u2i;
            x[i + 1] = xi;
        }
        if d[i].abs() < floor {
            d[i] = floor;
        }
        let f = l[i + 1] / d[i];
        d[i + 1] = d[i + 1] - f * u[i];
        u[i + 1] = u[i + 1] - f * u2[i];
        x[i + 1] = x[i + 1] - f * x[i];
    }
    if d[n - 1].abs() < floor {
        d[n - 1] = floor;
    }
    x[n - 1] = x[n - 1] / d[n - 1];
    if n >= 2 {
        x[n - 2] = (x[n - 2] - u[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - u[i] * x[i + 1] - u2[i] * x[i + 2]) / d[i];
    }
    Ok(x)
}

/// Thomas algorithm for a diagonally dominant symmetric tridiagonal system
/// `(diag + shift I) x = rhs`, `off` the coupling entries.
pub fn thomas_solve<T: Real>(diag: &[T], off: &[T], shift: T, rhs: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    if rhs.len() != n || off.len() + 1 != n {
        return domain("tridiagonal system has inconsistent sizes");
    }
    let mut c = vec![T::zero(); n];
    let mut x = rhs.to_vec();
    let mut piv = diag[0] + shift;
    if piv == T::zero() {
        return Err(Error::Numeric("zero pivot in tridiagonal solve".into()));
    }
    x[0] = x[0] / piv;
    for i in 1..n {
        c[i - 1] = off[i - 1] / piv;
        piv = diag[i] + shift - off[i - 1] * c[i - 1];
        if piv == T::zero() || !piv.is_finite() {
            return Err(Error::Numeric("zero pivot in tridiagonal solve".into()));
        }
        x[i] = (x[i] - off[i - 1] * x[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        x[i] = x[i] - c[i] * x[i + 1];
    }
    Ok(x)
}
