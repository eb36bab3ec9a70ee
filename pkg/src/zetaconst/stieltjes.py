"""Stieltjes constants by independent routes.

* ``gamma_oracle``: Taylor coefficients of ``zeta(s, a) - 1/(s-1)`` read off
  a circle around ``s = 1`` with the trapezoid rule (the integrand is
  periodic and analytic, so the rule converges geometrically).
* ``c_k_integral``: the log-power integral representation over the periodic
  Bernoulli polynomial ``P_k(x - a)``.
* ``dilcher_psi`` / ``stieltjes_limit``: direct limit formulas summed with
  Euler-Maclaurin tails.

Values are ``gamma_k(a)``; the regularized ``C_k(a) = gamma_k(a) -
ln^k(a)/a`` is stored alongside because subtracting afterwards can lose
every digit when ``a`` is small and ``k`` large.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf

from .numkernel import (
    ConvergenceError,
    DomainError,
    LogPowerFunction,
    bernoulli_number,
    compensated_sum,
    pn_sup_bound,
    stirling_s1,
    working_dps,
)
from .quadrature import integrate_pn_logpowers, integrate_trig_logpowers
from .series import LaurentSeries, series_log
from .zetacore import hurwitz_zeta

__all__ = [
    "StieltjesValue",
    "AsymptoticFit",
    "EtaSequence",
    "gamma_oracle",
    "gamma_oracle_all",
    "stieltjes_limit",
    "c_k_integral",
    "dilcher_psi",
    "dilcher_stieltjes",
    "eta_from_gamma",
    "asymptotic_fit",
    "stirling_weights",
]

METHODS = ("oracle", "integral", "dilcher", "hasse")


def _log_term(k, a):
    a = mpf(a)
    if k == 0:
        return 1 / a
    return mpmath.log(a) ** k / a


@dataclass(frozen=True)
class StieltjesValue:
    k: int
    a: object
    value: object  # gamma_k(a)
    err: float
    method: str
    regularized: object = None  # C_k(a); derived from value when omitted

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown method tag {self.method!r}")
        if self.regularized is None:
            object.__setattr__(self, "regularized", self.value - _log_term(self.k, self.a))


@dataclass(frozen=True)
class AsymptoticFit:
    k: int
    r1: object
    r2: object
    amplitude: object
    phase: object
    err: float = 0.0

    def predicted(self, a):
        two_pi_a = 2 * mpmath.pi * mpf(a)
        return self.r1 * mpmath.cos(two_pi_a) - self.r2 * mpmath.sin(two_pi_a)

    def predicted_polar(self, a):
        return self.amplitude * mpmath.sin(2 * mpmath.pi * (mpf(a) + self.phase))


@dataclass(frozen=True)
class EtaSequence:
    values: tuple
    err: float

    def __getitem__(self, j):
        return self.values[j]

    def __len__(self):
        return len(self.values)


# ---------------------------------------------------------------------------
# contour oracle
# ---------------------------------------------------------------------------

ORACLE_RADII = (1, 2, 3)
ORACLE_MIN_ORDER = 6


def _contour_coeffs(a, K, r, M, tol):
    """Taylor coefficients ``c_0..c_K`` of ``g(s) = zeta(s,a) - 1/(s-1)``
    about ``s = 1`` from ``M`` trapezoid nodes on ``|s - 1| = r``.

    ``g`` is real on the real axis, so nodes in the lower half-plane are
    conjugates of the upper ones and only ``M/2 + 1`` evaluations happen.
    """
    r = mpf(r)
    gmax = float(a) ** (-(1 + float(r))) + 10
    # gamma_k = (-1)^k k! c_k, so node errors are amplified by k!/r^k
    amp = max(math.lgamma(k + 1) / math.log(10) - k * math.log10(float(r)) for k in range(K + 1))
    node_tol = tol / (8 * gmax * 10**amp)
    with mp.workdps(working_dps(node_tol, math.log10(gmax) + 2)):
        half = M // 2
        g = []
        for j in range(half + 1):
            theta = 2 * mpmath.pi * j / M
            u = r * mpmath.expjpi(2 * mpf(j) / M)
            z = hurwitz_zeta(1 + u, a, node_tol)
            g.append((theta, z - 1 / u))
        coeffs = []
        for k in range(K + 1):
            terms = [mpmath.re(g[0][1])]
            terms.append((-1) ** k * mpmath.re(g[half][1]))
            for j in range(1, half):
                theta, val = g[j]
                terms.append(2 * mpmath.re(val * mpmath.expj(-k * theta)))
            coeffs.append(compensated_sum(terms) / (M * r**k))
    return coeffs


def _gammas_from_coeffs(coeffs):
    return [(-1) ** k * mpmath.factorial(k) * c for k, c in enumerate(coeffs)]


@functools.lru_cache(maxsize=256)
def _oracle_cached(a_key, K, tol, prec):
    a = mpf(a_key)
    M = max(64, 8 * K)
    prev = None
    attempts = [(ORACLE_RADII[0], M), (ORACLE_RADII[1], M), (ORACLE_RADII[2], 2 * M), (ORACLE_RADII[1], 4 * M)]
    for r, m in attempts:
        cur = _gammas_from_coeffs(_contour_coeffs(a, K, r, m, tol))
        if prev is not None:
            diff = max(float(abs(x - y)) for x, y in zip(cur, prev))
            if diff <= tol:
                return tuple(prev), max(diff, tol * 1e-3)
        prev = cur
    raise ConvergenceError(
        f"contour oracle did not settle for K={K}, a={a_key}", value=prev[-1], bound=diff
    )


def gamma_oracle_all(K: int, a, tol=1e-12):
    """``[StieltjesValue(k, a, ...) for k in 0..K]`` from one contour."""
    if K < 0:
        raise DomainError("K must be >= 0")
    a = mpf(a)
    if not a > 0:
        raise DomainError("a must be > 0")
    with mp.workdps(working_dps(tol)):
        vals, err = _oracle_cached(mpmath.nstr(a, mp.dps + 5), K, float(tol), mp.prec)
        return [StieltjesValue(k, a, +v, err, "oracle") for k, v in enumerate(vals)]


def gamma_oracle(k: int, a, tol=1e-12) -> StieltjesValue:
    """``gamma_k(a)`` from the Laurent coefficients of the Hurwitz zeta
    function about ``s = 1``."""
    if k < 0:
        raise DomainError("k must be >= 0")
    # small k share one cached contour
    return gamma_oracle_all(max(k, ORACLE_MIN_ORDER), a, tol)[k]


# ---------------------------------------------------------------------------
# Euler-Maclaurin limit formulas
# ---------------------------------------------------------------------------


def _em_tail(fs, N, tol):
    """``sum_{v >= N} h(v) - int_N^inf h`` for ``h = sum(sign * f)``, with
    ``fs`` a list of ``(sign, LogPowerFunction)``.

    Returns ``(value, bound, J)`` or ``None`` if ``J <= 40`` corrections do
    not reach ``tol`` at this ``N``.
    """
    acc = sum(sg * f(N) for sg, f in fs) / 2
    derivs = [(sg, f.derivative()) for sg, f in fs]  # first derivatives
    for j in range(1, 41):
        b = bernoulli_number(2 * j)
        coef = mpf(b.numerator) / b.denominator / mpmath.factorial(2 * j)
        acc -= coef * sum(sg * d(N) for sg, d in derivs)
        derivs = [(sg, d.derivative().derivative()) for sg, d in derivs]  # order 2j+1
        sup = pn_sup_bound(2 * j + 1) / math.factorial(2 * j + 1)
        bound = sup * sum(d.abs_tail_bound(N) for _, d in derivs)
        if bound <= tol:
            return acc, bound, j
    return None


def _log_over_x(k, shift=0):
    return LogPowerFunction([0] * k + [1], 1, shift)


def stieltjes_limit(k: int, tol=1e-15):
    """``gamma_k = lim_N [sum_{v<=N} ln^k v / v - ln^(k+1) N / (k+1)]`` with
    an Euler-Maclaurin tail; independent of the zeta engine."""
    if k < 0:
        raise DomainError("k must be >= 0")
    with mp.workdps(working_dps(tol, 2 + 0.5 * k)):
        g = _log_over_x(k)
        N = 16
        while N <= 1 << 14:
            tail = _em_tail([(1, g)], N, tol / 4)
            if tail is not None:
                break
            N *= 2
        else:
            raise ConvergenceError(f"limit formula for gamma_{k} did not converge")
        corr, bound, _ = tail
        head = compensated_sum([g(v) for v in range(1, N)])
        value = head - mpmath.log(N) ** (k + 1) / (k + 1) + corr
    return +value


def dilcher_psi(k: int, a, tol=1e-12, full_output=False):
    """Generalized digamma ``psi_k(a) = -gamma_k - ln^k(a)/a -
    sum_{v>=1} [ln^k(v+a)/(v+a) - ln^k(v)/v]``.

    The paired counter-term ``ln^k(v)/v`` makes the sum converge; the tail
    beyond ``N`` is handled by Euler-Maclaurin on the difference.
    """
    if k < 0:
        raise DomainError("k must be >= 0")
    a = mpf(a)
    if not a > 0:
        raise DomainError("a must be > 0")
    with mp.workdps(working_dps(tol, 2 + 0.5 * k)):
        g = _log_over_x(k)
        ga = _log_over_x(k, a)
        N = 16
        while N <= 1 << 14:
            tail = _em_tail([(1, ga), (-1, g)], N, tol / 4)
            if tail is not None:
                break
            N *= 2
        else:
            raise ConvergenceError(f"Dilcher series did not converge for k={k}")
        corr, bound, _ = tail
        head = compensated_sum([ga(v) - g(v) for v in range(1, N)])
        # int_N^inf [g(x + a) - g(x)] dx = G(N) - G(N + a), G = ln^(k+1)/(k+1)
        integral = (mpmath.log(N) ** (k + 1) - mpmath.log(N + a) ** (k + 1)) / (k + 1)
        total = head + integral + corr
        value = -stieltjes_limit(k, tol / 4) - _log_term(k, a) - total
    value = +value
    return (value, float(bound) + tol / 4) if full_output else value


def dilcher_stieltjes(k: int, a, tol=1e-12) -> StieltjesValue:
    """``gamma_k(a) = -psi_k(a)`` as a tagged value."""
    with mp.workdps(working_dps(tol)):
        psi, err = dilcher_psi(k, a, tol, full_output=True)
        return StieltjesValue(k, mpf(a), -psi, err, "dilcher")


# ---------------------------------------------------------------------------
# integral representation
# ---------------------------------------------------------------------------


def stirling_weights(k: int):
    """``s(k+1, k+1-j) / j!`` for ``j = 0..k`` (the ``j = k+1`` weight is
    ``s(k+1, 0) = 0``)."""
    return [mpf(stirling_s1(k + 1, k + 1 - j)) / mpmath.factorial(j) for j in range(k + 1)]


def _cancellation_digits(k, weights, power, sup):
    # sum_j |w_j| int_1^inf ln^j x x^-power = sum_j |w_j| j! / (power-1)^(j+1)
    q = power - 1
    scale = sup * sum(abs(float(w)) * math.factorial(j) / q ** (j + 1) for j, w in enumerate(weights))
    return max(0.0, math.log10(scale)) if scale > 0 else 0.0


def weighted_pn_integral(k, offset, scale, tol):
    """``sum_j w_j int_1^inf P_k(scale (x - offset)) ln^j x / x^(k+1) dx``.

    Returns ``(value, error_bound, panels)``.  Shared by the regularized
    constants and the multiplication formulas.
    """
    w = stirling_weights(k)
    extra = _cancellation_digits(k, w, k + 1, pn_sup_bound(k))
    with mp.workdps(working_dps(tol, extra)):
        w = stirling_weights(k)
        res = integrate_pn_logpowers(k, list(range(k + 1)), offset=offset, scale=scale, tol=tol / 2, weights=w)
        # j = 0 term isolated and added last: it carries most of the mass
        rest = compensated_sum([wj * rj.value for wj, rj in zip(w[1:], res[1:])])
        value = rest + w[0] * res[0].value
        err = sum(float(abs(wj)) * rj.error_bound for wj, rj in zip(w, res))
    return value, err, res[0].panels


def c_k_integral(k: int, a, tol=1e-10) -> StieltjesValue:
    """``C_k(a) = (-1)^(k-1) sum_j s(k+1,k+1-j)/j! int_1^inf P_k(x-a)
    ln^j x / x^(k+1) dx`` for ``k >= 1``."""
    if k < 1:
        raise DomainError("integral representation needs k >= 1")
    a = mpf(a)
    if not a > 0:
        raise DomainError("a must be > 0")
    with mp.workdps(working_dps(tol, 2)):
        val, err, _ = weighted_pn_integral(k, a, 1, tol)
        c = (-1) ** (k - 1) * val
        gamma = c + _log_term(k, a)
        return StieltjesValue(k, a, +gamma, err, "integral", regularized=+c)


# ---------------------------------------------------------------------------
# eta constants and the large-k sinusoid
# ---------------------------------------------------------------------------


def eta_from_gamma(J: int, tol=1e-12) -> EtaSequence:
    """``eta_0..eta_J`` from ``ln zeta(s) = -ln(s-1) - sum_p eta_(p-1)/p
    (s-1)^p``, using ``(s-1) zeta(s) = 1 + sum_k (-1)^k gamma_k/k! (s-1)^(k+1)``."""
    if not 0 <= J <= 10:
        raise DomainError("J must be in 0..10")
    with mp.workdps(working_dps(tol, 4)):
        gam = gamma_oracle_all(J, 1, tol / 10)
        taylor = [mpf(1)] + [(-1) ** k * g.value / mpmath.factorial(k) for k, g in enumerate(gam)]
        logs = series_log(LaurentSeries(taylor))
        etas = tuple(+(-p * logs.taylor[p]) for p in range(1, J + 2))
        err = (J + 2) ** 2 * max(g.err for g in gam)
    return EtaSequence(etas, err)


def _kappa(k):
    """Leading Fourier amplitude ``sup``-coefficient for ``P_k``:
    ``P_(2n-1)(y) ~ (-1)^n 2 (2n-1)!/(2pi)^(2n-1) sin 2pi y`` and
    ``P_(2n)(y) ~ (-1)^(n-1) 2 (2n)!/(2pi)^(2n) cos 2pi y``."""
    n = (k + 1) // 2
    sign = (-1) ** n if k % 2 else (-1) ** (k // 2 - 1)
    return sign * 2 * mpmath.factorial(k) / (2 * mpmath.pi) ** k


def asymptotic_fit(k: int, tol=1e-12) -> AsymptoticFit:
    """Leading sinusoid ``C_k(a) ~ r1 cos 2pi a - r2 sin 2pi a`` for ``k >= 11``.

    ``tol`` is an absolute target for ``r1`` and ``r2``.
    """
    if k < 11:
        raise DomainError("the sinusoid is a large-k statement; need k >= 11")
    kap = _kappa(k)
    inner_tol = tol / float(abs(kap))
    w0 = stirling_weights(k)
    extra = _cancellation_digits(k, w0, k + 1, 1.0)
    with mp.workdps(working_dps(inner_tol, extra)):
        kap = _kappa(k)
        w = stirling_weights(k)
        ks = list(range(k + 1))
        n = (k + 1) // 2
        i_sin = integrate_trig_logpowers("sin", ks, n, inner_tol / 2, w, power=k + 1)
        i_cos = integrate_trig_logpowers("cos", ks, n, inner_tol / 2, w, power=k + 1)
        s_sin = compensated_sum([wj * r.value for wj, r in zip(w, i_sin)])
        s_cos = compensated_sum([wj * r.value for wj, r in zip(w, i_cos)])
        if k % 2:
            r1, r2 = kap * s_sin, kap * s_cos
        else:
            # C_2n ~ -kap [cos 2pi a S_cos + sin 2pi a S_sin]
            r1, r2 = -kap * s_cos, kap * s_sin
        amp = mpmath.sqrt(r1 * r1 + r2 * r2)
        phase = mpmath.atan2(r1, -r2) / (2 * mpmath.pi)
        if phase < 0:
            phase += 1
        if phase >= 1:
            phase -= 1
        err = float(abs(kap)) * sum(float(abs(wj)) * (x.error_bound + y.error_bound) for wj, x, y in zip(w, i_sin, i_cos))
        return AsymptoticFit(k, +r1, +r2, +amp, +phase, err)
