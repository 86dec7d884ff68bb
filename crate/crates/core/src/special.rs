//! Gamma, beta and two-parameter Mittag-Leffler functions on the negative real axis.

use crate::error::{domain, Error, Result};
use crate::quadrature::tanh_sinh;
use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum<T: Real>(xm: T) -> T {
    let mut a = T::c(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a = a + T::c(c) / (xm + T::of(i));
    }
    a
}

/// `sin(pi x)` with exact zeros at the integers.
pub fn sin_pi<T: Real>(x: T) -> T {
    let two = T::c(2.0);
    let mut r = x - two * (x / two).round();
    let mut sign = T::one();
    if r < T::zero() {
        r = -r;
        sign = -sign;
    }
    if r > T::c(0.5) {
        r = T::one() - r;
    }
    if r == T::zero() {
        return T::zero();
    }
    sign * (T::PI() * r).sin()
}

/// `cos(pi x)` with exact zeros at the half-integers.
pub fn cos_pi<T: Real>(x: T) -> T {
    sin_pi(x + T::c(0.5))
}

/// Gamma function on the whole real line (infinite at the poles).
pub fn gamma_real<T: Real>(x: T) -> T {
    if x < T::c(0.5) {
        let s = sin_pi(x);
        if s == T::zero() {
            return T::infinity();
        }
        return T::PI() / (s * gamma_real(T::one() - x));
    }
    let xm = x - T::one();
    let t = xm + T::c(LANCZOS_G + 0.5);
    let half = t.powf((xm + T::c(0.5)) / T::c(2.0));
    (T::TAU()).sqrt() * half * (half * (-t).exp()) * lanczos_sum(xm)
}

/// Gamma function for positive arguments.
pub fn gamma_fn<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return domain(format!("gamma argument {x} must be positive"));
    }
    Ok(gamma_real(x))
}

/// `ln |Gamma(x)|`.
pub fn ln_gamma<T: Real>(x: T) -> T {
    if x < T::c(0.5) {
        let s = sin_pi(x);
        if s == T::zero() {
            return T::infinity();
        }
        return (T::PI() / s.abs()).ln() - ln_gamma(T::one() - x);
    }
    let xm = x - T::one();
    let t = xm + T::c(LANCZOS_G + 0.5);
    (xm + T::c(0.5)) * t.ln() - t + ((T::TAU()).sqrt() * lanczos_sum(xm)).ln()
}

/// `1/Gamma(x)`, an entire function; exactly zero at the poles of Gamma.
pub fn rgamma<T: Real>(x: T) -> T {
    if x >= T::c(0.5) {
        if x > T::c(160.0) {
            return (-ln_gamma(x)).exp();
        }
        return T::one() / gamma_real(x);
    }
    let s = sin_pi(x);
    if s == T::zero() {
        return T::zero();
    }
    let y = T::one() - x;
    if y > T::c(160.0) {
        return s.signum() * (ln_gamma(y) + s.abs().ln() - T::PI().ln()).exp();
    }
    s * gamma_real(y) / T::PI()
}

/// Euler beta function `B(r1, r2)`.
pub fn beta_fn<T: Real>(r1: T, r2: T) -> Result<T> {
    if !(r1 > T::zero() && r2 > T::zero()) {
        return domain(format!("beta arguments ({r1}, {r2}) must be positive"));
    }
    if r1 + r2 < T::c(160.0) {
        Ok(gamma_real(r1) * gamma_real(r2) / gamma_real(r1 + r2))
    } else {
        Ok((ln_gamma(r1) + ln_gamma(r2) - ln_gamma(r1 + r2)).exp())
    }
}

/// Parameters `(alpha, beta)` of `E_{alpha,beta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams<T> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> MLParams<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha < T::c(2.0)) {
            return domain(format!("Mittag-Leffler alpha {alpha} not in (0,2)"));
        }
        if !(beta > T::zero()) || !beta.is_finite() {
            return domain(format!("Mittag-Leffler beta {beta} must be positive"));
        }
        Ok(Self { alpha, beta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Method {
    Exp,
    Unit,
    General,
}

/// Which evaluation path produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Series,
    Asymptotic,
    Integral,
    Kummer,
}

/// Reusable evaluator of `E_{alpha,beta}(z)` for `z <= 0`.
///
/// Holds the power-series and large-argument coefficients for a fixed
/// parameter pair. Every evaluation carries an error estimate and fails
/// with [`Error::Accuracy`] when it exceeds the tolerance.
#[derive(Debug, Clone)]
pub struct MittagLeffler<T> {
    alpha: T,
    beta: T,
    method: Method,
    series: Vec<T>,
    asym: Vec<T>,
    asym_ln_env: Vec<T>,
    tol: T,
    w_series: T,
    w_asym: T,
}

impl<T: Real> MittagLeffler<T> {
    pub fn new(params: MLParams<T>) -> Self {
        Self::with_tolerance(params, T::special_tol())
    }

    pub fn with_tolerance(params: MLParams<T>, tol: T) -> Self {
        let MLParams { alpha, beta } = params;
        let eps = T::epsilon();
        let w_series = (tol / eps).ln();
        let w_asym = (-tol.ln() - T::c(2.0)).max(T::c(3.0));
        let method = if alpha == T::one() && beta == T::one() {
            Method::Exp
        } else if alpha == T::one() {
            Method::Unit
        } else {
            Method::General
        };

        let mut series = Vec::new();
        let ln_xmax = alpha * w_series.ln();
        let ln_eps = eps.ln() - T::c(8.0);
        let mut k = 0usize;
        let mut past_peak = false;
        let mut prev = T::neg_infinity();
        while k < 6000 {
            let arg = alpha * T::of(k) + beta;
            series.push(rgamma(arg));
            let ln_t = T::of(k) * ln_xmax - ln_gamma(arg);
            if ln_t < prev {
                past_peak = true;
            }
            prev = ln_t;
            if past_peak && ln_t < ln_eps && k > 4 {
                break;
            }
            k += 1;
        }

        let mut asym = Vec::new();
        let mut asym_ln_env = Vec::new();
        let ln_xmin = alpha * w_asym.ln();
        let mut prev = T::infinity();
        for k in 1..4000usize {
            let arg = beta - alpha * T::of(k);
            let c = rgamma(arg);
            let refl = T::one() - arg;
            let ln_env = if refl > T::c(0.5) {
                ln_gamma(refl) - T::PI().ln()
            } else {
                c.abs().max(T::min_positive_value()).ln()
            };
            asym.push(c);
            asym_ln_env.push(ln_env);
            let ln_b = ln_env - T::of(k) * ln_xmin;
            if ln_b > prev && k > 8 {
                break;
            }
            prev = ln_b;
        }

        Self {
            alpha,
            beta,
            method,
            series,
            asym,
            asym_ln_env,
            tol,
            w_series,
            w_asym,
        }
    }

    pub fn params(&self) -> MLParams<T> {
        MLParams {
            alpha: self.alpha,
            beta: self.beta,
        }
    }

    pub fn tolerance(&self) -> T {
        self.tol
    }

    /// `E_{alpha,beta}(z)` for `z <= 0`.
    pub fn eval(&self, z: T) -> Result<T> {
        self.eval_with_regime(z).map(|(v, _)| v)
    }

    /// Value together with the path that produced it.
    pub fn eval_with_regime(&self, z: T) -> Result<(T, Regime)> {
        if !(z <= T::zero()) {
            return domain(format!("Mittag-Leffler argument {z} must be <= 0"));
        }
        if z == T::zero() {
            return Ok((self.series[0], Regime::Series));
        }
        let x = -z;
        match self.method {
            Method::Exp => return Ok((z.exp(), Regime::Series)),
            Method::Unit => {
                if x <= T::c(60.0) {
                    return Ok((self.kummer(x), Regime::Kummer));
                }
            }
            Method::General => {}
        }
        let w = (x.ln() / self.alpha).exp();
        let mut worst = T::infinity();
        if w <= self.w_series {
            let (v, e) = self.series_sum(z);
            if e <= self.tol {
                return Ok((v, Regime::Series));
            }
            worst = worst.min(e);
        }
        if w >= self.w_asym {
            let (v, e) = self.asymptotic(x, w);
            if e <= self.tol {
                return Ok((v, Regime::Asymptotic));
            }
            worst = worst.min(e);
        }
        if self.method == Method::General {
            let (v, e) = self.integral(x, w);
            if e <= self.tol {
                return Ok((v, Regime::Integral));
            }
            worst = worst.min(e);
        }
        Err(Error::Accuracy {
            what: format!("E_({},{})({})", self.alpha, self.beta, z),
            estimate: worst.f64(),
            tolerance: self.tol.f64(),
        })
    }

    /// Taylor series; the error estimate is the rounding bound on the term sum.
    pub fn series_sum(&self, z: T) -> (T, T) {
        let eps = T::epsilon();
        let mut s = T::zero();
        let mut abs = T::zero();
        let mut zp = T::one();
        let mut prev = T::infinity();
        for (k, &c) in self.series.iter().enumerate() {
            let t = c * zp;
            s = s + t;
            let at = t.abs();
            abs = abs + at;
            if k > 2 && at <= prev && at <= eps * T::c(1e-2) * abs {
                return (s, T::c(8.0) * eps * abs);
            }
            prev = at;
            zp = zp * z;
        }
        (s, T::infinity())
    }

    /// Large-argument expansion truncated near its smallest term.
    pub fn asymptotic(&self, x: T, w: T) -> (T, T) {
        let eps = T::epsilon();
        let ln_x = x.ln();
        let xi = T::one() / x;
        let mut s = T::zero();
        let mut p = T::one();
        let mut prev = T::infinity();
        let mut err = T::infinity();
        for (i, (&c, &le)) in self.asym.iter().zip(&self.asym_ln_env).enumerate() {
            let k = i + 1;
            p = p * xi;
            let bound = (le - T::of(k) * ln_x).exp();
            if k > 1 && bound > prev {
                err = prev;
                break;
            }
            let t = if k % 2 == 1 { c * p } else { -c * p };
            s = s + t;
            prev = bound;
            if bound <= eps * T::c(1e-2) * s.abs() {
                err = bound;
                break;
            }
        }
        if err.is_infinite() {
            err = prev;
        }
        if self.alpha >= T::one() {
            let weight = if self.alpha == T::one() {
                T::one()
            } else {
                T::c(2.0) / self.alpha
            };
            s = s + weight * self.residue(w);
        }
        (s, err + T::c(4.0) * eps * s.abs())
    }

    fn residue(&self, w: T) -> T {
        let theta = T::PI() / self.alpha;
        let one_b = T::one() - self.beta;
        w.powf(one_b) * (w * theta.cos()).exp() * (one_b * theta + w * theta.sin()).cos()
    }

    fn kummer(&self, x: T) -> T {
        let eps = T::epsilon();
        let bm1 = self.beta - T::one();
        let mut p = (-x).exp();
        let lead = p;
        let mut s = T::zero();
        let mut k = 1usize;
        loop {
            p = p * x / T::of(k);
            let t = p / (bm1 + T::of(k));
            s = s + t;
            if T::of(k) > x && t <= eps * T::c(1e-3) * s.abs() {
                break;
            }
            if k > 5000 {
                break;
            }
            k += 1;
        }
        (lead + bm1 * s) * self.series[0]
    }

    /// Real-line integral representation, reduced to `beta <= 1` by the
    /// three-term recurrence `E_{a,b}(z) = 1/Gamma(b) + z E_{a,a+b}(z)`.
    pub fn integral(&self, x: T, w: T) -> (T, T) {
        let a = self.alpha;
        let mut b = self.beta;
        let mut steps = 0usize;
        while b > T::one() {
            b = b - a;
            steps += 1;
        }
        let (mut v, mut e) = integral_core(a, b, x, w, self.tol * T::c(0.25));
        for _ in 0..steps {
            v = (rgamma(b) - v) / x;
            e = e / x;
            b = b + a;
        }
        (v, e)
    }
}

fn integral_core<T: Real>(a: T, b: T, x: T, w: T, tol: T) -> (T, T) {
    let inv_a = T::one() / a;
    let one_b = T::one() - b;
    let s1 = sin_pi(one_b);
    let s2 = sin_pi(one_b + a);
    let ca = cos_pi(a);
    let pow = one_b * inv_a;
    let scale = T::one() / (a * T::PI());
    let f = |r: T| {
        if r <= T::zero() {
            return T::zero();
        }
        let lr = r.ln();
        let mag = (pow * lr - (lr * inv_a).exp()).exp();
        let den = r * r + T::c(2.0) * r * x * ca + x * x;
        scale * mag * (r * s1 + x * s2) / den
    };
    let r_max = T::c(50.0).powf(a);
    let mut cuts = vec![T::zero(), T::one().min(r_max), r_max];
    if ca < T::zero() {
        let pk = -x * ca;
        if pk > T::zero() && pk < r_max {
            cuts.push(pk);
        }
    }
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup();
    let mut v = T::zero();
    let mut e = T::zero();
    let n = (cuts.len() - 1).max(1);
    for pair in cuts.windows(2) {
        if pair[1] > pair[0] {
            let (iv, ie) = tanh_sinh(f, pair[0], pair[1], tol / T::of(n), 9);
            v = v + iv;
            e = e + ie;
        }
    }
    if a > T::one() {
        let theta = T::PI() * inv_a;
        let res = w.powf(one_b) * (w * theta.cos()).exp() * (one_b * theta + w * theta.sin()).cos();
        v = v + T::c(2.0) * inv_a * res;
    }
    (v, e)
}

/// One-shot `E_{alpha,beta}(z)`, `z <= 0`.
pub fn ml<T: Real>(params: MLParams<T>, z: T) -> Result<T> {
    let params = MLParams::new(params.alpha, params.beta)?;
    MittagLeffler::new(params).eval(z)
}

/// `E_{alpha,1}(-lambda t^alpha)`.
pub fn relaxation<T: Real>(alpha: T, lambda: T, t: T) -> Result<T> {
    if !(t >= T::zero() && lambda >= T::zero()) {
        return domain(format!("relaxation needs t >= 0, lambda >= 0 (t={t}, lambda={lambda})"));
    }
    if t == T::zero() {
        return Ok(T::one());
    }
    ml(MLParams::new(alpha, T::one())?, -lambda * t.powf(alpha))
}

/// `s^(alpha-1) E_{alpha,alpha}(-lambda s^alpha)` for `s > 0`.
pub fn duhamel_kernel<T: Real>(alpha: T, lambda: T, s: T) -> Result<T> {
    if !(s > T::zero()) {
        return domain(format!("kernel argument {s} must be positive"));
    }
    if !(lambda >= T::zero()) {
        return domain(format!("lambda {lambda} must be nonnegative"));
    }
    let e = ml(MLParams::new(alpha, alpha)?, -lambda * s.powf(alpha))?;
    Ok(s.powf(alpha - T::one()) * e)
}

/// Evaluators for a fixed order `beta` used by one time segment:
/// the relaxation `E_{b,1}`, the kernel `E_{b,b}` and the primitives
/// `E_{b,b+m}`, `m = 1..=4`.
#[derive(Debug, Clone)]
pub struct OrderKernels<T> {
    pub order: T,
    relax: MittagLeffler<T>,
    kernel: MittagLeffler<T>,
    prim: [MittagLeffler<T>; 4],
}

impl<T: Real> OrderKernels<T> {
    pub fn new(order: T) -> Result<Self> {
        let mk = |b: T| -> Result<MittagLeffler<T>> { Ok(MittagLeffler::new(MLParams::new(order, b)?)) };
        Ok(Self {
            order,
            relax: mk(T::one())?,
            kernel: mk(order)?,
            prim: [
                mk(order + T::one())?,
                mk(order + T::c(2.0))?,
                mk(order + T::c(3.0))?,
                mk(order + T::c(4.0))?,
            ],
        })
    }

    /// `E_{b,1}(-lambda s^b)`.
    pub fn relaxation(&self, lambda: T, s: T) -> Result<T> {
        if s == T::zero() {
            return Ok(T::one());
        }
        self.relax.eval(-lambda * s.powf(self.order))
    }

    /// `s^(b-1) E_{b,b}(-lambda s^b)`, `s > 0`.
    pub fn kernel(&self, lambda: T, s: T) -> Result<T> {
        if !(s > T::zero()) {
            return domain(format!("kernel argument {s} must be positive"));
        }
        let sb = s.powf(self.order);
        Ok(sb / s * self.kernel.eval(-lambda * sb)?)
    }

    /// `m`-fold primitive of the kernel from 0: `s^(b+m-1) E_{b,b+m}(-lambda s^b)`, `m = 1..=4`.
    pub fn primitive(&self, m: usize, lambda: T, s: T) -> Result<T> {
        debug_assert!((1..=4).contains(&m));
        if s == T::zero() {
            return Ok(T::zero());
        }
        let sb = s.powf(self.order);
        Ok(sb * s.powi(m as i32 - 1) * self.prim[m - 1].eval(-lambda * sb)?)
    }
}
