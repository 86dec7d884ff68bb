use crate::error::{domain, Error, Result};
use crate::scalar::Real;
use crate::special::OrderKernels;

use super::gauss_legendre;

/// Source sampling mesh on `[0, h]` for product integration.
///
/// Cells follow `h (i/K)^r`; each cell holds a cubic interpolant through the
/// four Gauss-Lobatto points, so a segment has `3K + 1` samples.
#[derive(Debug, Clone)]
pub struct SourceMesh<T> {
    length: T,
    nodes: Vec<T>,
    samples: Vec<T>,
    to_monomial: [[T; 4]; 4],
    gl8: (Vec<T>, Vec<T>),
    gl4: (Vec<T>, Vec<T>),
}

const LOBATTO: [f64; 4] = [0.0, 0.276_393_202_250_021_03, 0.723_606_797_749_978_9, 1.0];

impl<T: Real> SourceMesh<T> {
    pub fn new(length: T, cells: usize, grading: T) -> Result<Self> {
        if !(length > T::zero()) {
            return domain(format!("segment length {length} must be positive"));
        }
        if cells == 0 {
            return domain("source mesh needs at least one cell");
        }
        if !(grading >= T::one()) {
            return domain(format!("grading {grading} must be >= 1"));
        }
        let nodes: Vec<T> = (0..=cells)
            .map(|i| {
                if i == cells {
                    length
                } else {
                    length * (T::of(i) / T::of(cells)).powf(grading)
                }
            })
            .collect();
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("graded source mesh has a collapsed cell; lower the grading or cell count");
        }
        let mut samples = Vec::with_capacity(3 * cells + 1);
        for c in 0..cells {
            let (a, b) = (nodes[c], nodes[c + 1]);
            for &th in &LOBATTO[..3] {
                samples.push(a + (b - a) * T::c(th));
            }
        }
        samples.push(length);
        Ok(Self {
            length,
            nodes,
            samples,
            to_monomial: lobatto_inverse(),
            gl8: gauss_legendre(8),
            gl4: gauss_legendre(4),
        })
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Cell boundaries, offsets from the segment start.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Offsets at which the source must be sampled.
    pub fn sample_offsets(&self) -> &[T] {
        &self.samples
    }

    fn cell_poly(&self, c: usize, values: &[T]) -> [T; 4] {
        let v = &values[3 * c..3 * c + 4];
        let mut out = [T::zero(); 4];
        for (m, row) in self.to_monomial.iter().enumerate() {
            out[m] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
        out
    }

    fn locate(&self, s: T) -> usize {
        let k = self.nodes.partition_point(|&x| x <= s);
        k.saturating_sub(1).min(self.cells() - 1)
    }

    /// Piecewise-cubic interpolant at offset `s`.
    pub fn interpolate(&self, values: &[T], s: T) -> T {
        let c = self.locate(s);
        let (a, b) = (self.nodes[c], self.nodes[c + 1]);
        horner(&self.cell_poly(c, values), (s - a) / (b - a))
    }

    /// Derivative of the interpolant at offset `s`.
    pub fn interpolate_derivative(&self, values: &[T], s: T) -> T {
        let c = self.locate(s);
        let (a, b) = (self.nodes[c], self.nodes[c + 1]);
        let p = self.cell_poly(c, values);
        let d = [p[1], T::c(2.0) * p[2], T::c(3.0) * p[3], T::zero()];
        horner(&d, (s - a) / (b - a)) / (b - a)
    }

    /// `int_0^tau K(tau - s) p(s) ds` where `K(u) = u^(b-1) E_{b,b}(-lambda u^b)` and
    /// `p` is the interpolant of `values` (or its derivative when `derivative`).
    pub fn convolve(&self, kernels: &OrderKernels<T>, lambda: T, values: &[T], tau: T, derivative: bool) -> Result<T> {
        if values.len() != self.samples.len() {
            return domain(format!(
                "{} source samples for a mesh with {} points",
                values.len(),
                self.samples.len()
            ));
        }
        if !(tau >= T::zero() && tau <= self.length) {
            return domain(format!("offset {tau} outside [0, {}]", self.length));
        }
        let mut total = T::zero();
        for c in 0..self.cells() {
            let a = self.nodes[c];
            if a >= tau {
                break;
            }
            let b = self.nodes[c + 1];
            let delta = b - a;
            let mut p = self.cell_poly(c, values);
            let deg = if derivative {
                p = [
                    p[1] / delta,
                    T::c(2.0) * p[2] / delta,
                    T::c(3.0) * p[3] / delta,
                    T::zero(),
                ];
                2
            } else {
                3
            };
            let full = b <= tau;
            let hi = if full { b } else { tau };
            let big_b = tau - hi;
            let big_a = tau - a;
            if full && big_b >= delta {
                let (gx, gw) = if big_b >= T::c(8.0) * delta {
                    &self.gl4
                } else {
                    &self.gl8
                };
                let h2 = delta / T::c(2.0);
                let mut s = T::zero();
                for (x, w) in gx.iter().zip(gw) {
                    let th = (T::one() + *x) / T::c(2.0);
                    let u = big_b + h2 * (T::one() - *x);
                    s = s + *w * kernels.kernel(lambda, u)? * horner(&p, th);
                }
                total = total + h2 * s;
            } else {
                total = total + near_cell(kernels, lambda, &p, deg, delta, big_a, big_b)?;
            }
        }
        if !total.is_finite() {
            return Err(Error::Numeric(format!("non-finite Duhamel integral at offset {tau}")));
        }
        Ok(total)
    }
}

/// Exact moments on a cell piece `u in [B, A]`, `u = tau - s`.
fn near_cell<T: Real>(
    kernels: &OrderKernels<T>,
    lambda: T,
    p: &[T; 4],
    deg: usize,
    delta: T,
    big_a: T,
    big_b: T,
) -> Result<T> {
    // q(u) = p(theta_a - u/delta), expanded in powers of u
    let th = big_a / delta;
    let mut q = [T::zero(); 4];
    let mut d = *p;
    let mut fact = T::one();
    let mut scale = T::one();
    for k in 0..=deg {
        if k > 0 {
            fact = fact * T::of(k);
            scale = scale * (-T::one() / delta);
            d = [d[1], T::c(2.0) * d[2], T::c(3.0) * d[3], T::zero()];
        }
        q[k] = horner(&d, th) * scale / fact;
    }
    let moments = |s: T| -> Result<[T; 4]> {
        let mut prim = [T::zero(); 4];
        for m in 0..=deg {
            prim[m] = kernels.primitive(m + 1, lambda, s)?;
        }
        let mut out = [T::zero(); 4];
        for k in 0..=deg {
            // int_0^s u^k K(u) du = sum_m (-1)^m k!/(k-m)! s^(k-m) P_{m+1}(s)
            let mut acc = T::zero();
            let mut coef = T::one();
            for m in 0..=k {
                if m > 0 {
                    coef = -coef * T::of(k - m + 1);
                }
                acc = acc + coef * s.powi((k - m) as i32) * prim[m];
            }
            out[k] = acc;
        }
        Ok(out)
    };
    let ma = moments(big_a)?;
    let mb = if big_b > T::zero() {
        moments(big_b)?
    } else {
        [T::zero(); 4]
    };
    let mut s = T::zero();
    for k in 0..=deg {
        s = s + q[k] * (ma[k] - mb[k]);
    }
    Ok(s)
}

fn horner<T: Real>(p: &[T; 4], x: T) -> T {
    ((p[3] * x + p[2]) * x + p[1]) * x + p[0]
}

fn lobatto_inverse<T: Real>() -> [[T; 4]; 4] {
    let mut m = [[T::zero(); 8]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        let th = T::c(LOBATTO[i]);
        let mut pw = T::one();
        for col in row.iter_mut().take(4) {
            *col = pw;
            pw = pw * th;
        }
        row[4 + i] = T::one();
    }
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
            .unwrap();
        m.swap(col, piv);
        let d = m[col][col];
        for x in m[col].iter_mut() {
            *x = *x / d;
        }
        for r in 0..4 {
            if r != col {
                let f = m[r][col];
                let src = m[col];
                for (x, s) in m[r].iter_mut().zip(src.iter()) {
                    *x = *x - f * *s;
                }
            }
        }
    }
    // rows of V^{-1}: coefficient m = sum_i inv[m][i] * y_i
    let mut inv = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            inv[i][j] = m[i][4 + j];
        }
    }
    inv
}

/// `int_0^tau s^(a-1) E_{a,a}(-lambda s^a) f(tau - s) ds` for a source sampled on `mesh`.
pub fn duhamel_convolve<T: Real>(alpha: T, lambda: T, mesh: &SourceMesh<T>, values: &[T], tau: T) -> Result<T> {
    let k = OrderKernels::new(alpha)?;
    mesh.convolve(&k, lambda, values, tau, false)
}
