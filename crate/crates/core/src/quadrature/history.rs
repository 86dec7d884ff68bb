use crate::error::{domain, Result};
use crate::scalar::Real;

use super::{gauss_jacobi, gauss_legendre};

/// Composite rule for `int_0^h l^e g(l) (d + h - l)^p dl` on one segment,
/// where `e > -1` is a fixed left-end exponent and `(d, p)` vary per call.
///
/// Cells are geometrically graded (ratio 4) toward both ends. The innermost
/// left cell carries a Jacobi weight `l^e`; the innermost right cell of width
/// `~eps h` uses the exact moment of `(d + rho)^p`. Nodes are kept as offsets
/// from both ends so that `h - l` never suffers cancellation.
#[derive(Debug, Clone)]
pub struct HistoryRule<T> {
    length: T,
    left_exp: T,
    left: Vec<T>,
    right: Vec<T>,
    weights: Vec<T>,
    tail_width: T,
}

impl<T: Real> HistoryRule<T> {
    /// `order` is the Gauss-Legendre order per cell.
    pub fn new(length: T, left_exp: T, order: usize) -> Result<Self> {
        if !(length > T::zero()) {
            return domain(format!("segment length {length} must be positive"));
        }
        if !(left_exp > -T::one()) {
            return domain(format!("left exponent {left_exp} must exceed -1"));
        }
        let four = T::c(4.0);
        let half = length / T::c(2.0);
        let tol = T::epsilon() * T::c(1e3);
        let tiny = T::min_positive_value() * T::c(1e10);
        let decay = (left_exp + T::one()).min(T::one());
        let c_left = (tol.powf(T::one() / (T::c(2.0) * decay))).max(tiny / length) * length;
        let c_right = T::epsilon() * length;

        let ladder = |c0: T| -> Vec<T> {
            let mut v = vec![c0];
            let mut x = c0;
            while x * four < half {
                x = x * four;
                v.push(x);
            }
            if v.len() > 1 && half / v[v.len() - 1] < T::c(2.0) {
                v.pop();
            }
            v.push(half);
            v
        };
        let lb = ladder(c_left);
        let rb = ladder(c_right);

        let (gx, gw) = gauss_legendre::<T>(order);
        let (jx, jw) = gauss_jacobi(order, T::zero(), left_exp)?;
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut weights = Vec::new();

        let jscale = (lb[0] / T::c(2.0)).powf(left_exp + T::one());
        for (x, w) in jx.iter().zip(&jw) {
            let l = lb[0] * (T::one() + *x) / T::c(2.0);
            left.push(l);
            right.push(length - l);
            weights.push(jscale * *w);
        }
        for cell in lb.windows(2) {
            let h2 = (cell[1] - cell[0]) / T::c(2.0);
            for (x, w) in gx.iter().zip(&gw) {
                let l = cell[0] + h2 * (T::one() + *x);
                left.push(l);
                right.push(length - l);
                weights.push(h2 * *w * l.powf(left_exp));
            }
        }
        for cell in rb.windows(2) {
            let h2 = (cell[1] - cell[0]) / T::c(2.0);
            for (x, w) in gx.iter().zip(&gw) {
                let r = cell[0] + h2 * (T::one() + *x);
                let l = length - r;
                left.push(l);
                right.push(r);
                weights.push(h2 * *w * l.powf(left_exp));
            }
        }
        let r = rb[0] / T::c(2.0);
        let l = length - r;
        left.push(l);
        right.push(r);
        weights.push(l.powf(left_exp));

        Ok(Self {
            length,
            left_exp,
            left,
            right,
            weights,
            tail_width: rb[0],
        })
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn left_exponent(&self) -> T {
        self.left_exp
    }

    /// Node offsets from the left end.
    pub fn offsets(&self) -> &[T] {
        &self.left
    }

    /// Node offsets from the right end.
    pub fn offsets_from_right(&self) -> &[T] {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    /// `sum_q W_q g_q (d + rho_q)^p`, approximating
    /// `int_0^h l^e g(l) (d + h - l)^p dl` for `d >= 0` (`d > 0` when `p <= -1`).
    pub fn integrate(&self, g: &[T], d: T, p: T) -> T {
        let n = self.left.len();
        debug_assert_eq!(g.len(), n);
        let mut s = T::zero();
        for q in 0..n - 1 {
            s = s + self.weights[q] * g[q] * (d + self.right[q]).powf(p);
        }
        let c = self.tail_width;
        let p1 = p + T::one();
        let moment = if d == T::zero() {
            c.powf(p1) / p1
        } else {
            d.powf(p1) * (p1 * (c / d).ln_1p()).exp_m1() / p1
        };
        s + self.weights[n - 1] * g[n - 1] * moment
    }

    /// Samples `(l^{-e} v(l))` at the nodes, where `v` carries the `l^e` singularity.
    pub fn regularize<F: FnMut(T) -> Result<T>>(&self, mut v: F) -> Result<Vec<T>> {
        self.left.iter().map(|&l| Ok(v(l)? * l.powf(-self.left_exp))).collect()
    }
}

/// `(1/Gamma(1-beta_cur)) int_{t_k}^{t_{k+1}} (t-s)^{-beta_cur} v'(s) ds`
/// with `v'` singular like `(s-t_k)^{left_exp}`. `vprime` receives the offset
/// `s - t_k`.
pub fn history_integral<T: Real, F: FnMut(T) -> Result<T>>(
    beta_cur: T,
    segment: (T, T),
    left_exp: T,
    vprime: F,
    t: T,
) -> Result<T> {
    let (tk, tk1) = segment;
    if !(t > tk) {
        return domain(format!("evaluation time {t} must exceed segment start {tk}"));
    }
    if !(beta_cur > T::zero() && beta_cur < T::one()) {
        return domain(format!("order {beta_cur} not in (0,1)"));
    }
    let (end, d) = if t >= tk1 { (tk1, t - tk1) } else { (t, T::zero()) };
    let rule = HistoryRule::new(end - tk, left_exp, 12)?;
    let g = rule.regularize(vprime)?;
    Ok(rule.integrate(&g, d, -beta_cur) * crate::special::rgamma(T::one() - beta_cur))
}
