//! Quadrature for weakly singular integrands.

mod history;
mod product;

pub use history::{history_integral, HistoryRule};
pub use product::{duhamel_convolve, SourceMesh};

use crate::error::{domain, Error, Result};
use crate::scalar::Real;
use crate::special::ln_gamma;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut x = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let nt = T::of(n);
    for i in 0..n.div_ceil(2) {
        let mut z = (T::PI() * (T::of(i) + T::c(0.75)) / (nt + T::c(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z = z - dz;
            if dz.abs() <= T::epsilon() * T::c(2.0) {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d.is_finite() {
            dp = d;
        }
        let wi = T::c(2.0) / ((T::one() - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = T::zero();
    }
    (x, w)
}

fn legendre<T: Real>(n: usize, z: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = z;
    if n == 0 {
        return (T::one(), T::zero());
    }
    for k in 2..=n {
        let kt = T::of(k);
        let p2 = ((T::c(2.0) * kt - T::one()) * z * p1 - (kt - T::one()) * p0) / kt;
        p0 = p1;
        p1 = p2;
    }
    let d = T::of(n) * (z * p1 - p0) / (z * z - T::one());
    (p1, d)
}

/// Gauss-Jacobi rule for the weight `(1-x)^a (1+x)^b` on `[-1, 1]`, ascending nodes.
///
/// Golub-Welsch eigenvalues polished by Newton steps on the three-term recurrence.
pub fn gauss_jacobi<T: Real>(n: usize, a: T, b: T) -> Result<(Vec<T>, Vec<T>)> {
    if !(a > -T::one() && b > -T::one()) {
        return domain(format!("Jacobi exponents ({a}, {b}) must exceed -1"));
    }
    if n == 0 {
        return domain("Jacobi rule needs at least one node");
    }
    let ab = a + b;
    let two = T::c(2.0);
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    d[0] = (b - a) / (ab + two);
    for k in 1..n {
        let kt = T::of(k);
        let s = two * kt + ab;
        d[k] = (b * b - a * a) / (s * (s + two));
    }
    for k in 1..n {
        let kt = T::of(k);
        let s = two * kt + ab;
        let v = if k == 1 {
            T::c(4.0) * (T::one() + a) * (T::one() + b) / ((two + ab) * (two + ab) * (T::c(3.0) + ab))
        } else {
            T::c(4.0) * kt * (kt + a) * (kt + b) * (kt + ab) / (s * s * (s + T::one()) * (s - T::one()))
        };
        e[k - 1] = v.sqrt();
    }
    let mut z = vec![T::zero(); n];
    z[0] = T::one();
    symmetric_tridiagonal_ql(&mut d, &mut e, &mut z)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());

    let ln_pre = ln_gamma(T::of(n) + a + T::one()) + ln_gamma(T::of(n) + b + T::one())
        - ln_gamma(T::of(n) + ab + T::one())
        - ln_gamma(T::of(n) + T::one())
        + (ab + T::one()) * two.ln();
    let ln_mu0 = (ab + T::one()) * two.ln() + ln_gamma(a + T::one()) + ln_gamma(b + T::one()) - ln_gamma(ab + two);
    let mu0 = ln_mu0.exp();
    let mut xs = Vec::with_capacity(n);
    let mut gws = Vec::with_capacity(n);
    for &i in &order {
        let mut x = d[i];
        for _ in 0..8 {
            let (p, dp) = jacobi_p(n, a, b, x);
            if !dp.is_finite() || dp == T::zero() {
                break;
            }
            let step = p / dp;
            let nx = x - step;
            if !(nx > -T::one() && nx < T::one()) || step.abs() > T::c(1e-3) {
                break;
            }
            x = nx;
            if step.abs() <= T::epsilon() * T::c(4.0) {
                break;
            }
        }
        xs.push(x);
        gws.push(mu0 * z[i] * z[i]);
    }
    let mut ws: Vec<T> = xs
        .iter()
        .map(|&x| {
            let (_, dp) = jacobi_p(n, a, b, x);
            (ln_pre - ((T::one() - x * x) * dp * dp).ln()).exp()
        })
        .collect();
    let close = ws
        .iter()
        .zip(&gws)
        .all(|(w, g)| w.is_finite() && (*w - *g).abs() <= T::c(1e-6) * *g + T::min_positive_value());
    if close {
        let total: T = ws.iter().copied().sum();
        let fix = mu0 / total;
        for w in ws.iter_mut() {
            *w = *w * fix;
        }
    } else {
        ws = gws;
    }
    Ok((xs, ws))
}

fn jacobi_p<T: Real>(n: usize, a: T, b: T, x: T) -> (T, T) {
    let two = T::c(2.0);
    let ab = a + b;
    let mut p0 = T::one();
    let mut p1 = ((ab + two) * x + (a - b)) / two;
    if n == 0 {
        return (T::one(), T::zero());
    }
    for k in 2..=n {
        let kt = T::of(k);
        let s = two * kt + ab;
        let c1 = two * kt * (kt + ab) * (s - two);
        let c2 = (s - T::one()) * (s * (s - two) * x + a * a - b * b);
        let c3 = two * (kt + a - T::one()) * (kt + b - T::one()) * s;
        let p2 = (c2 * p1 - c3 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    let nt = T::of(n);
    let s = two * nt + ab;
    let dp = (nt * ((a - b) - s * x) * p1 + two * (nt + a) * (nt + b) * p0) / (s * (T::one() - x * x));
    (p1, dp)
}

/// Implicit QL for a symmetric tridiagonal matrix. `d` holds the diagonal,
/// `e[i]` couples rows `i` and `i+1`; `z` is a row vector rotated along with
/// the eigenvectors (pass `e_1` to obtain first components).
pub(crate) fn symmetric_tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T], z: &mut [T]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = T::zero();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::Numeric("tridiagonal QL did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (T::c(2.0) * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let bb = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + T::c(2.0) * c * bb;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - bb;
                let fz = z[i + 1];
                z[i + 1] = s * z[i] + c * fz;
                z[i] = c * z[i] - s * fz;
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Double-exponential quadrature of `f` on `[a, b]`, tolerant of endpoint
/// singularities. Returns the value and the difference between the last two
/// levels as error estimate.
pub fn tanh_sinh<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T, max_level: usize) -> (T, T) {
    let half = (b - a) / T::c(2.0);
    let mid = a + half;
    let t_max = if T::epsilon() < T::c(1e-10) {
        T::c(4.0)
    } else {
        T::c(3.0)
    };
    let pi2 = T::FRAC_PI_2();
    let eval = |t: T| -> T {
        let u = pi2 * t.sinh();
        let cu = u.cosh();
        let wgt = half * pi2 * t.cosh() / (cu * cu);
        if !(wgt > T::zero()) {
            return T::zero();
        }
        let dist = half * T::c(2.0) / ((T::c(2.0) * u.abs()).exp() + T::one());
        let x = if t > T::zero() {
            b - dist
        } else if t < T::zero() {
            a + dist
        } else {
            mid
        };
        if x <= a || x >= b {
            return T::zero();
        }
        wgt * f(x)
    };
    let mut h = T::c(0.5);
    let mut sum = eval(T::zero());
    let mut k = 1usize;
    loop {
        let t = h * T::of(k);
        if t > t_max {
            break;
        }
        sum = sum + eval(t) + eval(-t);
        k += 1;
    }
    let mut est = h * sum;
    let mut err = T::infinity();
    for _ in 1..=max_level {
        h = h / T::c(2.0);
        let mut add = T::zero();
        let mut k = 1usize;
        loop {
            let t = h * T::of(k);
            if t > t_max {
                break;
            }
            add = add + eval(t) + eval(-t);
            k += 2;
        }
        sum = sum + add;
        let next = h * sum;
        err = (next - est).abs();
        est = next;
        if err <= tol {
            break;
        }
    }
    (est, err)
}

/// Which end of an interval a graded mesh clusters toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularEnd {
    Left,
    Right,
    Both,
}

/// Algebraically graded mesh on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedMesh<T> {
    pub a: T,
    pub b: T,
    pub n_cells: usize,
    pub grading: T,
    pub end: SingularEnd,
}

impl<T: Real> GradedMesh<T> {
    pub fn new(a: T, b: T, n_cells: usize, grading: T, end: SingularEnd) -> Result<Self> {
        if !(b > a) {
            return domain(format!("empty interval [{a}, {b}]"));
        }
        if n_cells == 0 {
            return domain("graded mesh needs at least one cell");
        }
        if !(grading >= T::one()) {
            return domain(format!("grading {grading} must be >= 1"));
        }
        if end == SingularEnd::Both && n_cells < 2 {
            return domain("two-sided grading needs at least two cells");
        }
        Ok(Self {
            a,
            b,
            n_cells,
            grading,
            end,
        })
    }

    pub fn nodes(&self) -> Vec<T> {
        let n = self.n_cells;
        let len = self.b - self.a;
        let frac = |i: usize, m: usize| (T::of(i) / T::of(m)).powf(self.grading);
        match self.end {
            SingularEnd::Left => (0..=n)
                .map(|i| if i == n { self.b } else { self.a + len * frac(i, n) })
                .collect(),
            SingularEnd::Right => (0..=n)
                .map(|i| if i == 0 { self.a } else { self.b - len * frac(n - i, n) })
                .collect(),
            SingularEnd::Both => {
                let nl = n / 2;
                let nr = n - nl;
                let half = len / T::c(2.0);
                let mut v: Vec<T> = (0..nl).map(|i| self.a + half * frac(i, nl)).collect();
                v.push(self.a + half);
                for i in (0..nr).rev() {
                    v.push(self.b - half * frac(i, nr));
                }
                v
            }
        }
    }
}

/// Integrand `(s-a)^p (b-s)^q smooth(s)` on `(a, b)`.
pub struct SingularIntegrand<T, F> {
    pub a: T,
    pub b: T,
    pub p: T,
    pub q: T,
    pub smooth: F,
}

/// Gauss-Jacobi quadrature of a [`SingularIntegrand`] with `nodes` points.
pub fn jacobi_weighted_integral<T: Real, F: Fn(T) -> T>(f: &SingularIntegrand<T, F>, nodes: usize) -> Result<T> {
    if !(f.b > f.a) {
        return domain(format!("empty interval [{}, {}]", f.a, f.b));
    }
    let (x, w) = gauss_jacobi(nodes, f.q, f.p)?;
    let half = (f.b - f.a) / T::c(2.0);
    let scale = half.powf(f.p + f.q + T::one());
    let mut s = T::zero();
    for (xi, wi) in x.iter().zip(&w) {
        let si = f.a + half * (T::one() + *xi);
        s = s + *wi * (f.smooth)(si);
    }
    Ok(scale * s)
}

/// `int_a^b g(s) ds` for `g ~ (s-a)^p` near `a`, on a mesh graded with
/// `r = max(1, 2/(1+p))`. The first cell uses a Jacobi rule, the others
/// Gauss-Legendre on geometrically subdivided cells.
pub fn graded_time_quadrature<T: Real, F: Fn(T) -> T>(g: F, a: T, b: T, n_cells: usize, p: T) -> Result<T> {
    if !(p > -T::one()) {
        return domain(format!("endpoint exponent {p} must exceed -1"));
    }
    let r = (T::c(2.0) / (T::one() + p)).max(T::one());
    let mesh = GradedMesh::new(a, b, n_cells, r, SingularEnd::Left)?;
    let nodes = mesh.nodes();
    let len = b - a;
    let offs: Vec<T> = (0..=n_cells)
        .map(|i| if i == n_cells { len } else { nodes[i] - a })
        .collect();
    let (gx, gw) = gauss_legendre::<T>(16);
    let first = SingularIntegrand {
        a: T::zero(),
        b: offs[1],
        p,
        q: T::zero(),
        smooth: |s: T| g(a + s) / s.powf(p),
    };
    let mut total = jacobi_weighted_integral(&first, 16)?;
    for c in 1..n_cells {
        let (lo, hi) = (offs[c], offs[c + 1]);
        let mut pieces = vec![lo];
        let mut x = lo;
        while hi / x > T::c(4.0) {
            x = x * T::c(4.0);
            pieces.push(x);
        }
        pieces.push(hi);
        for w in pieces.windows(2) {
            let h2 = (w[1] - w[0]) / T::c(2.0);
            let mut s = T::zero();
            for (xi, wi) in gx.iter().zip(&gw) {
                s = s + *wi * g(a + w[0] + h2 * (T::one() + *xi));
            }
            total = total + h2 * s;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::beta_fn;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre::<f64>(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-15);
        let (x, w) = gauss_legendre::<f64>(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * (x * x + 1.0)).sum();
        assert!((s - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_moments_match_beta() {
        for &(a, b) in &[(-0.5f64, -0.5f64), (0.0, -0.7), (-0.2, 0.4), (0.5, -0.9), (-0.95, 0.0)] {
            for &n in &[1usize, 5, 12, 32] {
                let (x, w) = gauss_jacobi::<f64>(n, a, b).unwrap();
                let s: f64 = w.iter().sum();
                let mu0 = 2f64.powf(a + b + 1.0) * beta_fn(a + 1.0, b + 1.0).unwrap();
                assert!((s - mu0).abs() < 1e-13 * mu0, "n={n} a={a} b={b}");
                if n >= 3 {
                    // first moment: mu0 (b - a)/(a + b + 2)
                    let m1: f64 = x.iter().zip(&w).map(|(x, w)| w * x).sum();
                    assert!((m1 - mu0 * (b - a) / (a + b + 2.0)).abs() < 1e-11 * mu0);
                }
            }
        }
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        let (v, e) = tanh_sinh(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-14, 10);
        assert!((v - 2.0).abs() < 1e-12, "{v} {e}");
    }

    #[test]
    fn graded_mesh_shapes() {
        let m = GradedMesh::new(0.0f64, 2.0, 4, 1.0, SingularEnd::Left).unwrap();
        assert_eq!(m.nodes(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let m = GradedMesh::new(0.0f64, 1.0, 4, 2.0, SingularEnd::Left).unwrap();
        assert_eq!(m.nodes(), vec![0.0, 0.0625, 0.25, 0.5625, 1.0]);
        let m = GradedMesh::new(0.0f64, 1.0, 4, 2.0, SingularEnd::Right).unwrap();
        assert_eq!(m.nodes(), vec![0.0, 0.4375, 0.75, 0.9375, 1.0]);
        let m = GradedMesh::new(0.0f64, 1.0, 4, 2.0, SingularEnd::Both).unwrap();
        assert_eq!(m.nodes(), vec![0.0, 0.125, 0.5, 0.875, 1.0]);
        assert!(GradedMesh::new(0.0f64, 1.0, 4, 0.5, SingularEnd::Left).is_err());
        assert!(GradedMesh::new(1.0f64, 1.0, 4, 1.0, SingularEnd::Left).is_err());
    }

    #[test]
    fn jacobi_integral_examples() {
        let f = SingularIntegrand {
            a: 0.0f64,
            b: 1.0,
            p: -0.5,
            q: -0.5,
            smooth: |_| 1.0,
        };
        assert!((jacobi_weighted_integral(&f, 32).unwrap() - std::f64::consts::PI).abs() < 1e-13);
        let f = SingularIntegrand {
            a: 0.0f64,
            b: 1.0,
            p: -0.5,
            q: 0.0,
            smooth: |_| 1.0,
        };
        assert!((jacobi_weighted_integral(&f, 32).unwrap() - 2.0).abs() < 1e-13);
        let bad = SingularIntegrand {
            a: 0.0f64,
            b: 1.0,
            p: -1.0,
            q: 0.0,
            smooth: |_| 1.0,
        };
        assert!(jacobi_weighted_integral(&bad, 32).is_err());
    }

    #[test]
    fn graded_time_quadrature_examples() {
        let v = graded_time_quadrature(|s: f64| s.powf(-0.5), 0.0, 1.0, 64, -0.5).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
        let v = graded_time_quadrature(|s: f64| s.cos(), 0.0, 1.0, 8, 0.0).unwrap();
        assert!((v - 1f64.sin()).abs() < 1e-14);
        assert!(graded_time_quadrature(|s: f64| s, 0.0, 1.0, 8, -1.0).is_err());
    }
}
