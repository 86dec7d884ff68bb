"""Generate frozen high-precision reference values for the test suite.

Mittag-Leffler values come from the power series summed in arbitrary
precision (working precision grows with the cancellation, about
|z|^(1/alpha)/ln(10) digits).  When the series would need more than ~350
digits of cancellation the large-argument expansion is summed instead; its
truncation error there is below exp(-350).  A subset is cross-checked
against the real-line integral representation with mpmath.quad.

Run from the repository root:

    python3 crates/core/scripts/gen_oracles.py
"""
import json
import os
import random

import mpmath as mp

OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "data")


def ml_series(a, b, z):
    a, b, z = mp.mpf(a), mp.mpf(b), mp.mpf(z)
    x = -z
    w = x ** (1 / a) if x > 0 else mp.mpf(0)
    dps = int(w / mp.log(10)) + 60
    with mp.workdps(dps):
        s = mp.mpf(0)
        term_scale = mp.mpf(10) ** (-(dps - 5))
        k = 0
        zp = mp.mpf(1)
        peak = mp.mpf(0)
        while True:
            t = zp * mp.rgamma(a * k + b)
            s += t
            peak = max(peak, abs(t))
            k += 1
            zp *= z
            if k > 10 and abs(t) < term_scale * max(peak, 1) * mp.mpf(10) ** -30 and abs(t) < mp.mpf(10) ** -40:
                break
        return +s


def ml_asymptotic(a, b, z):
    a, b, x = mp.mpf(a), mp.mpf(b), -mp.mpf(z)
    with mp.workdps(60):
        s = mp.mpf(0)
        last = mp.inf
        for k in range(1, 400):
            t = (-1) ** (k + 1) * x ** (-k) * mp.rgamma(b - a * k)
            env = x ** (-k) * mp.gamma(1 + a * k)
            if env > last and k > 2:
                break
            s += t
            last = env
            if env < mp.mpf(10) ** -45:
                break
        return +s


def ml(a, b, z):
    if z == 0:
        return mp.rgamma(b)
    w = (-mp.mpf(z)) ** (1 / mp.mpf(a))
    if w <= 350:
        return ml_series(a, b, z)
    return ml_asymptotic(a, b, z)


def ml_integral(a, b, z):
    """Integral representation in r = u^a, 0<a<1, z<0; used directly for b<=1."""
    a, b, x = mp.mpf(a), mp.mpf(b), -mp.mpf(z)
    if b > 1:
        return (mp.rgamma(b - a) - ml_integral(a, b - a, z)) / x
    f = lambda r: r ** ((1 - b) / a) * mp.exp(-r ** (1 / a)) * (
        r * mp.sin(mp.pi * (1 - b)) + x * mp.sin(mp.pi * (1 - b + a))
    ) / (r * r + 2 * r * x * mp.cos(mp.pi * a) + x * x)
    pts = {mp.mpf(0), mp.mpf("0.5"), mp.mpf(1), mp.mpf(2), mp.mpf(4), mp.mpf(8), mp.inf}
    if a > 0.5:
        pts.add(-x * mp.cos(mp.pi * a))
    return mp.quad(f, sorted(pts)) / (a * mp.pi)


def main():
    mp.mp.dps = 40
    random.seed(20240613)
    rows = []
    alphas = [round(0.1 * i, 1) for i in range(1, 10)]
    for _ in range(1000):
        a = random.choice(alphas)
        b = random.choice([a, 1.0, round(a + 1.0, 10)])
        z = -100.0 * random.random()
        rows.append((a, b, z, ml(a, b, z)))
    # cross-check a subset with the integral representation
    worst = mp.mpf(0)
    for a, b, z, v in rows[::25]:
        if z == 0:
            continue
        with mp.workdps(40):
            alt = ml_integral(a, b, z)
        worst = max(worst, abs(alt - v))
    assert worst < mp.mpf(10) ** -20, worst
    with open(os.path.join(OUT, "ml_oracle.csv"), "w") as fh:
        fh.write("alpha,beta,z,value\n")
        for a, b, z, v in rows:
            fh.write("%r,%r,%r,%s\n" % (a, b, z, mp.nstr(v, 25)))

    pi = mp.pi
    vals = {}
    vals["gamma_4_7"] = mp.gamma(mp.mpf("4.7"))
    vals["ml_0_5_1_m1"] = ml(0.5, 1.0, -1.0)
    vals["relaxation_0_7_5_0_3"] = ml(0.7, 1.0, -5 * mp.mpf("0.3") ** mp.mpf("0.7"))
    s = mp.mpf("0.2")
    vals["duhamel_kernel_0_6_3_0_2"] = s ** mp.mpf("-0.4") * ml(0.6, 0.6, -3 * s ** mp.mpf("0.6"))
    # f == 1 Duhamel integral: tau^a E_{a,a+1}(-lam tau^a), by term-wise integration of the kernel series
    conv = []
    for a, lam, tau in [(0.5, 2.0, 0.7), (0.3, 10.0, 0.4), (0.8, 50.0, 1.0), (0.6, 0.0, 0.25)]:
        A, L, Tt = mp.mpf(a), mp.mpf(lam), mp.mpf(tau)
        xw = (L * Tt ** A) ** (1 / A) if lam > 0 else mp.mpf(0)
        with mp.workdps(int(xw / mp.log(10)) + 80):
            acc = mp.mpf(0)
            k = 0
            while True:
                # int_0^tau s^{a-1} (-L s^a)^k / Gamma(a k + a) ds
                t = (-L) ** k * Tt ** (A * (k + 1)) / ((A * (k + 1)) * mp.gamma(A * k + A))
                acc += t
                k += 1
                if k > 20 and abs(t) < mp.mpf(10) ** -60:
                    break
        assert abs(acc - Tt ** A * ml(A, A + 1, -L * Tt ** A)) < mp.mpf(10) ** -30
        conv.append({"alpha": a, "lambda": lam, "tau": tau, "value": mp.nstr(acc, 25)})
    vals_conv = conv
    # segment value with constant source
    b, lam, ups, c, tau = 0.6, 4.0, 0.8, 1.5, 0.5
    B, L = mp.mpf(b), mp.mpf(lam)
    Tt = mp.mpf(tau)
    seg = ups * ml(b, 1.0, -L * Tt ** B) + c * Tt ** B * ml(b, b + 1, -L * Tt ** B)
    # L1 weights beta=0.5, m=4, tau=0.25, by quadrature of the kernel moments
    beta, m, step = mp.mpf("0.5"), 4, mp.mpf("0.25")
    tm = m * step
    w = []
    for k in range(m):
        mom = mp.quad(lambda s: (tm - s) ** (-beta), [k * step, (k + 1) * step])
        w.append(mp.nstr(mom / (step * mp.gamma(1 - beta)), 25))
    # constant-order reference trajectory E_{0.5,1}(-pi^2 t^0.5), t = k/100
    traj = []
    for k in range(1, 101):
        t = mp.mpf(k) / 100
        traj.append(mp.nstr(ml(0.5, 1.0, -(pi ** 2) * mp.sqrt(t)), 25))
    # product integration against a non-polynomial source: f(s) = s^(1/2)
    # int_0^tau K(tau - s) s^g ds = Gamma(g+1) tau^(a+g) E_{a,a+g+1}(-lam tau^a)
    A, L, Tt, G = mp.mpf("0.5"), mp.mpf(2), mp.mpf("0.7"), mp.mpf("0.5")
    vals["duhamel_sqrt_source_0_5_2_0_7"] = mp.gamma(G + 1) * Tt ** (A + G) * ml(A, A + G + 1, -L * Tt ** A)
    direct = mp.quad(lambda u: u ** (A - 1) * ml(A, A, -L * u ** A) * (Tt - u) ** G, [0, Tt])
    assert abs(direct - vals["duhamel_sqrt_source_0_5_2_0_7"]) < mp.mpf(10) ** -20
    # quadrature oracles
    # s = e^x on each half removes the endpoint singularity
    def singular_at_zero(p, g, upper):
        return mp.quad(lambda x: mp.exp(x * (p + 1)) * g(mp.exp(x)), [-mp.inf, mp.log(upper)])

    p, q = mp.mpf("-0.7"), mp.mpf("-0.55")
    vals["beta_0_3_0_45"] = singular_at_zero(p, lambda s: (1 - s) ** q, 0.5) + singular_at_zero(
        q, lambda u: (1 - u) ** p, 0.5
    )
    assert abs(vals["beta_0_3_0_45"] - mp.beta(mp.mpf("0.3"), mp.mpf("0.45"))) < mp.mpf(10) ** -25
    vals["jacobi_cos_m0_3"] = singular_at_zero(mp.mpf("-0.3"), mp.cos, 1)
    vals["graded_exp_m0_3"] = singular_at_zero(mp.mpf("-0.3"), mp.exp, 1)
    # coefficients of x(1-x) in sqrt(2) sin(n pi x)
    vals["bubble_coefficients"] = [
        mp.quad(lambda x: x * (1 - x) * mp.sqrt(2) * mp.sin(n * pi * x), [0, 1]) for n in range(1, 6)
    ]
    # f = X_1 t^0.2 on (0,1): int ||f||, int ||f'||, sup t^0.9 ||f'|| (beta 0.5, eps 0.4)
    vals["source_norm_integral"] = mp.quad(lambda t: t ** mp.mpf("0.2"), [0, 1])
    vals["source_derivative_integral"] = singular_at_zero(mp.mpf("-0.8"), lambda t: mp.mpf("0.2"), 1)
    vals["source_weighted_sup"] = max(
        mp.mpf("0.2") * t ** mp.mpf("0.1") for t in [mp.mpf(k) / 1000 for k in range(1, 1001)]
    )
    out = {}
    for k, v in vals.items():
        out[k] = [mp.nstr(x, 25) for x in v] if isinstance(v, list) else mp.nstr(v, 25)
    out["duhamel_constant_source"] = vals_conv
    out["segment_constant_source"] = {
        "order": b, "lambda": lam, "initial": ups, "source": c, "tau": tau, "value": mp.nstr(seg, 25)
    }
    out["l1_weights_0_5_m4_tau_0_25"] = w
    out["relaxation_0_5_pi2_hundredths"] = traj
    with open(os.path.join(OUT, "oracle_values.json"), "w") as fh:
        json.dump(out, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
