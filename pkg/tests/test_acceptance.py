"""One test per acceptance criterion, at the stated tolerances."""
from unittest import mock

import numpy as np

from kernelq import kernel, models, oracle
from kernelq.errors import DegenerateLinear, Unstable
from kernelq.models import (
    PriorityLowFlow,
    RandomService,
    SingleDeterministic,
    TandemSecondQueue,
    analyze,
)
from kernelq.pgf import bimodal, finite


def bisect(f, lo, hi, n=200):
    flo = f(lo)
    for _ in range(n):
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ratio_band(c, values, lo, hi, label):
    v = np.asarray(values)
    c.check(bool(np.all((v >= lo) & (v <= hi))),
            f"{label} in [{v.min():.4f}, {v.max():.4f}], wanted [{lo}, {hi}]")


def test_criterion_01_single_exact_vs_oracle(A, single_oracle, criterion):
    c = criterion(1, "single queue: exact tail equals oracle tail, R <= 60")
    an = analyze(SingleDeterministic(A), 128, 60)
    err = np.max(np.abs(an.tail - oracle.tail_of(single_oracle)[:61]))
    c.check(err < 1e-9, f"max abs diff {err:.2e}")
    c.check(single_oracle.final_tv < 1e-12, f"final tv {single_oracle.final_tv:.2e}")
    c.finish()


def test_criterion_02_single_asymptotics(A, criterion):
    c = criterion(2, "single queue: exact / C beta^-R in [0.99, 1.01] for R in [40, 60]")
    an = analyze(SingleDeterministic(A), 128, 60)
    r = np.arange(40, 61)
    ratio_band(c, an.tail[r] / an.asymptotic(r), 0.99, 1.01, "ratio")
    beta = an.asym_base
    ref = bisect(lambda u: A.eval(u) - u, 1.01, 2.0)
    c.check(abs(A.eval(beta) - beta) < 1e-12, f"|A(beta) - beta| = {abs(A.eval(beta) - beta):.2e}")
    c.check(1.36 < beta < 1.37, f"beta = {beta}")
    c.check(abs(beta - ref) < 1e-12, f"beta differs from bisection by {abs(beta - ref):.2e}")
    c.finish()


def test_criterion_03_doob_factor(A, criterion):
    c = criterion(3, "Doob curve over asymptotic curve is beta / C, about 1.5")
    an = analyze(SingleDeterministic(A), 128, 60)
    r = np.arange(0, 61)
    factor = an.doob(r) / an.asymptotic(r)
    c.check(np.allclose(factor, an.asym_base / an.asym_prefactor, rtol=1e-12), "factor not constant")
    c.check(abs(factor[0] - 1.5) <= 0.05, f"factor {factor[0]:.4f}")
    c.finish()


def test_criterion_04_priority(A, B, priority_oracle, single_oracle, criterion):
    c = criterion(4, "priority low flow: exact vs oracle, oracle / asymptotic, X marginal")
    an = analyze(PriorityLowFlow(A, B), 128, 40)
    tail = oracle.tail_of(priority_oracle, "Y")
    err = np.max(np.abs(an.tail - tail[:41]))
    c.check(err < 1e-6, f"exact vs oracle {err:.2e}")
    r = np.arange(20, 41)
    ratio_band(c, tail[r] / an.asymptotic(r), 0.98, 1.02, "oracle/asymptotic")
    xerr = np.max(np.abs(priority_oracle.marginal("X") - single_oracle.dist))
    c.check(xerr < 1e-10, f"X marginal vs single {xerr:.2e}")
    c.finish()


def test_criterion_05_tandem(A, B, tandem_oracle, criterion):
    c = criterion(5, "tandem queue 2: oracle / asymptotic, C ratio delta / B(delta)")
    an = analyze(TandemSecondQueue(A, B), 128, 40)
    tail = oracle.tail_of(tandem_oracle, "Y")
    r = np.arange(20, 41)
    ratio_band(c, tail[r] / an.asymptotic(r), 0.98, 1.02, "oracle/asymptotic")
    cp, _ = models.asym_priority(A, B)
    d = an.asym_base
    gap = abs(an.asym_prefactor / cp - d / B.eval(d))
    c.check(gap < 1e-12, f"C ratio off by {gap:.2e}")
    c.finish()


def test_criterion_06_empty_probability(A, criterion):
    c = criterion(6, "P(X_t = 0) equals [z^t] 1 / (1 - T_A(z)) and tends to 1 - lambda")
    t = kernel.build_tree_function(A)
    series = kernel.empty_probability_series(t, 200).coeffs
    empty = np.array([d[0] for d, _ in zip(oracle.iter_transient_1d(A, 1.0, 6 * 200), range(201))])
    err = np.max(np.abs(series[:101] - empty[:101]))
    c.check(err < 1e-10, f"t <= 100 max diff {err:.2e}")
    c.check(abs(empty[200] - 0.6) < 0.01, f"oracle at t = 200: {empty[200]:.6f}")
    c.check(abs(series[200] - 0.6) < 0.01, f"series at t = 200: {series[200]:.6f}")
    c.finish()


def test_criterion_07_closed_form_phi(A, criterion):
    c = criterion(7, "closed-form bivariate GF equals the oracle double sum")
    t_max = 400
    dists = [d for d, _ in zip(oracle.iter_transient_1d(A, 1.0, 6 * t_max), range(t_max + 1))]
    for u, z in ((0.5, 0.5), (0.7, 0.8), (1.0, 0.9)):
        powers = u ** np.arange(6 * t_max + 1)
        direct = sum(z**k * float(d @ powers) for k, d in enumerate(dists))
        phi = models.closed_form_phi(A, u, z)
        c.check(abs(phi - direct) < 1e-8, f"({u}, {z}): {phi} vs {direct}")
    c.finish()


def lagrange(a, n_max):
    """(1/n) [x^(n-1)] A(x)^n with integer-exact polynomial powers."""
    from fractions import Fraction
    probs = [Fraction(p).limit_denominator(10**12) for p in a.probs]
    out, power = [0.0], [Fraction(1)]
    for n in range(1, n_max + 1):
        nxt = [Fraction(0)] * (len(power) + len(probs) - 1)
        for i, x in enumerate(power):
            for j, y in enumerate(probs):
                nxt[i + j] += x * y
        power = nxt
        out.append(float(power[n - 1] / n))
    return np.array(out)


def test_criterion_08_galton_watson(A, criterion):
    c = criterion(8, "tree function: Lagrange coefficients, residuals, T'(1), affine case")
    t = kernel.build_tree_function(A)
    err = np.max(np.abs(kernel.tree_series(t, 30).coeffs - lagrange(A, 30)))
    c.check(err < 1e-12, f"Lagrange diff {err:.2e}")
    resid = max(abs(x - z * A.eval(x))
                for z in np.linspace(0, t.rho, 41) for x in [kernel.tree_eval(t, z)])
    c.check(resid < 1e-12, f"residual {resid:.2e}")
    d1 = kernel.tree_deriv(t, 1.0)
    c.check(abs(d1 - 1 / 0.6) < 1e-10, f"T'(1) = {d1}")
    lin = kernel.build_tree_function(finite([0.6, 0.4]))
    zs = np.linspace(0, 2.4, 13)
    c.check(all(kernel.tree_eval(lin, z) == 0.6 * z / (1 - 0.4 * z) for z in zs),
            "affine closed form not exact")
    coeffs = kernel.tree_series(lin, 20).coeffs
    expected = np.array([0.0] + [0.6 * 0.4 ** (n - 1) for n in range(1, 21)])
    c.check(np.allclose(coeffs, expected, rtol=1e-14, atol=0), "affine series")
    c.finish()


def test_criterion_09_random_service(A, criterion):
    c = criterion(9, "random service: p = 1 reduction, oracle match, exact / C gamma^-R")
    one = analyze(RandomService(A, 1.0), 128, 60)
    single = analyze(SingleDeterministic(A), 128, 60)
    c.check(np.max(np.abs(one.tail - single.tail)) < 1e-10, "p = 1 tail")
    c.check(abs(one.asym_prefactor - single.asym_prefactor) < 1e-10, "p = 1 prefactor")
    c.check(abs(one.asym_base - single.asym_base) < 1e-10, "p = 1 base")
    an = analyze(RandomService(A, 0.9), 128, 60)
    res = oracle.stationary_1d(A, 0.9, 200, 1e-12)
    err = np.max(np.abs(an.pgf.coeffs - res.dist[:129]))
    c.check(err < 1e-9, f"coefficients vs oracle {err:.2e}")
    r = np.arange(40, 61)
    ratio_band(c, an.tail[r] / an.asymptotic(r), 0.99, 1.01, "exact/asymptotic")
    c.finish()


def test_criterion_10_error_paths(criterion):
    c = criterion(10, "degenerate and unstable inputs are rejected")
    linear = finite([0.6, 0.4])
    for call in (lambda: kernel.second_fixed_point(linear),
                 lambda: analyze(SingleDeterministic(linear))):
        try:
            call()
            c.check(False, "linear arrivals accepted")
        except DegenerateLinear:
            pass
    heavy = bimodal(0.2, 5)
    with mock.patch.object(models, "pk_single") as pk, \
            mock.patch.object(kernel, "second_fixed_point") as sfp:
        try:
            analyze(SingleDeterministic(heavy))
            c.check(False, "mean 1 accepted")
        except Unstable:
            c.check(not pk.called and not sfp.called, "work done before stability check")
    for call in (lambda: analyze(RandomService(bimodal(0.1, 5), 0.5)),
                 lambda: models.pk_random_service(bimodal(0.1, 5), 0.4, 64),
                 lambda: kernel.geometric_kernel_root(bimodal(0.1, 5), 0.5)):
        try:
            call()
            c.check(False, "lambda >= p accepted")
        except Unstable:
            pass
    c.finish()
