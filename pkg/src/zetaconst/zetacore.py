"""Hurwitz/Riemann zeta, digamma/polygamma and the Hasse series.

``hurwitz_zeta`` is plain Euler-Maclaurin summation with an explicit
remainder bound, valid for complex ``s`` (analytic continuation included).
``digamma`` deliberately does not go through the zeta engine so the two can
check each other.

The Hasse routines evaluate the Euler-transformed alternating sums

    sum_n 2^-(n+1) sum_k (-1)^k C(n, k) ln^j(k+1) (k+1)^-s

with one incrementally grown difference table.  The inner sums cancel
catastrophically (terms of size ``2^n max|f|`` collapse to something of
order ``1/n``), so the table is built with that many extra digits.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import mpmath
from mpmath import mp, mpf

from .numkernel import (
    ConvergenceError,
    DomainError,
    PoleError,
    bernoulli_number,
    compensated_sum,
    upper_incomplete_gamma,
    working_dps,
)
from .quadrature import integrate_smooth

__all__ = [
    "EulerMaclaurinConfig",
    "SeriesInfo",
    "hurwitz_zeta",
    "riemann_zeta",
    "digamma",
    "polygamma",
    "hasse_log_sum",
    "hasse1_zeta",
    "hasse1_zeta_prime",
    "hasse2_zeta",
]

MAX_EM_CORRECTIONS = 15
MAX_DIRECT_TERMS = 1 << 16
MIN_HASSE_S = -6


class EulerMaclaurinConfig(NamedTuple):
    direct_terms: int
    correction_terms: int
    remainder_bound: float


class SeriesInfo(NamedTuple):
    terms: int
    error: float


def _bernoulli_mp(j):
    b = bernoulli_number(j)
    return mpf(b.numerator) / b.denominator


# ---------------------------------------------------------------------------
# Euler-Maclaurin Hurwitz zeta
# ---------------------------------------------------------------------------


def _em_config(s, a, tol) -> EulerMaclaurinConfig:
    """Smallest correction count (<= 15) and a direct-term count meeting
    ``tol``, using |R| <= |B_{2J+2}/(2J+2)! (s)_{2J+1}| (N+a)^(-sigma-2J-1)
    |s+2J+1| / (sigma+2J+1)."""
    sigma = float(mpmath.re(s))
    abs_s = float(abs(s))
    digits = -math.log10(tol)
    n = max(10, int(abs_s + digits / 2))
    while n <= MAX_DIRECT_TERMS:
        x = n + float(a)
        poch = abs(complex(s))  # |(s)_1|
        for j in range(1, MAX_EM_CORRECTIONS + 1):
            # |(s)_{2j+1}| from |(s)_{2j-1}|
            poch *= abs(complex(s) + 2 * j - 1) * abs(complex(s) + 2 * j)
            denom = sigma + 2 * j + 1
            if denom <= 0:
                continue
            b = abs(float(bernoulli_number(2 * j + 2))) / math.factorial(2 * j + 2)
            bound = b * poch * x ** (-sigma - 2 * j - 1) * abs(complex(s) + 2 * j + 1) / denom
            if bound <= tol:
                return EulerMaclaurinConfig(n, j, bound)
        n *= 2
    raise ConvergenceError(f"Euler-Maclaurin cannot reach tol={tol} for s={s}")


def hurwitz_zeta(s, a, tol=1e-15):
    """``zeta(s, a)`` for complex ``s != 1`` and real ``a > 0``.

    ``tol`` is absolute for ``|zeta| <= 1`` and relative above.  A real
    ``s`` gives an ``mpf``, a complex one an ``mpc``.
    """
    s = mpmath.mpmathify(s)
    a = mpf(a)
    if not a > 0:
        raise DomainError("Hurwitz zeta needs a > 0")
    if s == 1:
        raise PoleError("zeta(s, a) has a pole at s = 1")
    sigma = float(mpmath.re(s))
    est_scale = max(0.0, -sigma) * math.log10(abs(float(abs(s))) + 10 + float(a)) + max(
        0.0, sigma * math.log10(max(1.0, 1 / float(a)))
    )
    with mp.workdps(working_dps(tol, est_scale + 2)):
        cfg = _em_config(s, a, float(tol) / 4)
        n, jmax = cfg.direct_terms, cfg.correction_terms
        total = compensated_sum([(k + a) ** (-s) for k in range(n)])
        x = n + a
        xs = x ** (-s)
        total += x * xs / (s - 1) + xs / 2
        poch = s  # (s)_{2j-1}
        xpow = xs / x
        fact = mpf(2)  # (2j)!
        for j in range(1, jmax + 1):
            total += _bernoulli_mp(2 * j) / fact * poch * xpow
            poch *= (s + 2 * j - 1) * (s + 2 * j)
            xpow /= x * x
            fact *= (2 * j + 1) * (2 * j + 2)
        if isinstance(s, mpmath.mpf):
            total = mpmath.re(total)
        if abs(total) > 1 and cfg.remainder_bound > float(tol) / 4 * float(abs(total)):
            raise ConvergenceError("remainder bound above tolerance", value=total)
    return +total


def riemann_zeta(s, tol=1e-15):
    return hurwitz_zeta(s, 1, tol)


# ---------------------------------------------------------------------------
# digamma / polygamma
# ---------------------------------------------------------------------------


def digamma(a, tol=1e-15):
    """``psi(a)`` for ``a > 0`` by upward recurrence and the asymptotic
    series ``ln x - 1/(2x) - sum_j B_2j / (2j x^2j)``."""
    a = mpf(a)
    if not a > 0:
        raise DomainError("digamma needs a > 0")
    with mp.workdps(working_dps(tol, 2)):
        x0 = max(12, int(-math.log10(tol)) + 2)
        shift = max(0, int(math.ceil(x0 - float(a))))
        corr = compensated_sum([1 / (a + i) for i in range(shift)]) if shift else mpf(0)
        x = a + shift
        acc = mpmath.log(x) - 1 / (2 * x)
        x2 = x * x
        xp = x2
        for j in range(1, 60):
            term = _bernoulli_mp(2 * j) / (2 * j * xp)
            acc -= term
            nxt = abs(_bernoulli_mp(2 * j + 2) / ((2 * j + 2) * xp * x2))
            if nxt < tol / 4:
                break
            xp *= x2
        else:
            raise ConvergenceError("digamma asymptotic series did not converge")
        result = acc - corr
    return +result


def polygamma(n, a, tol=1e-15):
    """``psi^(n)(a) = (-1)^(n+1) n! zeta(n+1, a)`` for ``n >= 1``."""
    if n < 1:
        raise DomainError("polygamma order must be >= 1 (use digamma for n = 0)")
    a = mpf(a)
    if not a > 0:
        raise DomainError("polygamma needs a > 0")
    fact = math.factorial(n)
    with mp.workdps(working_dps(tol, math.log10(fact) + 2)):
        value = (-1) ** (n + 1) * fact * hurwitz_zeta(n + 1, a, tol / fact)
    return +value


# ---------------------------------------------------------------------------
# Euler-transformed difference sums
# ---------------------------------------------------------------------------


def _difference_series(f: Callable, weight: Callable, terms: int | None, tol, growth_digits):
    """``sum_n weight(n) sum_k (-1)^k C(n,k) f(k)`` over ``n < terms``.

    The inner sum is ``(-1)^n Delta^n f(0)``; row ``n`` of the backward
    difference table is built from row ``n - 1``, so the whole sum costs
    O(terms^2).  With ``terms=None`` summation stops once three
    consecutive terms and a geometric tail estimate are below ``tol``.
    Returns ``(value, SeriesInfo)``.
    """
    digits = -math.log10(tol)
    cap = terms if terms is not None else int(4 * digits) + 40
    extra = cap * math.log10(2) + growth_digits(cap)
    with mp.workdps(working_dps(tol, extra)):
        diag = []
        out = []
        small = 0
        tail = math.inf
        prev = None
        ratio = 0.5
        for n in range(cap):
            row = [f(n)]
            for i in range(1, n + 1):
                row.append(row[i - 1] - diag[i - 1])
            diag = row
            term = weight(n) * ((-1) ** n) * row[n]
            out.append(term)
            if terms is not None:
                continue
            mag = abs(term)
            if prev is not None and prev != 0 and mag != 0:
                ratio = min(0.95, max(ratio * 0.5, float(mag / prev), 0.5))
            prev = mag
            tail = float(mag) * ratio / (1 - ratio)
            small = small + 1 if (mag <= tol / 4 and tail <= tol / 4) else 0
            if small >= 3:
                break
        else:
            if terms is None:
                raise ConvergenceError(
                    f"difference series not converged after {cap} terms",
                    value=compensated_sum(out),
                    bound=tail,
                )
        if terms is not None:
            last = float(abs(out[-1])) if out else 0.0
            tail = last  # geometric ratio ~1/2 for the 2^-(n+1) weight
        value = compensated_sum(out)
    return +value, SeriesInfo(len(out), tail)


def _log_growth_digits(j, s):
    def digits(cap):
        x = cap + 1.0
        mag = (math.log(x) ** j) * x ** (-float(s))
        return max(0.0, math.log10(max(mag, 1.0)))

    return digits


def _check_hasse_s(s):
    if s < MIN_HASSE_S:
        raise DomainError(f"Hasse sums are only supported for s >= {MIN_HASSE_S}")


def hasse_log_sum(j, s, terms=None, tol=1e-15, full_output=False):
    """``sum_n 2^-(n+1) sum_{k} (-1)^k C(n,k) ln^j(k+1) / (k+1)^s``.

    For ``j >= 1`` the ``k = 0`` term vanishes, matching sums written from
    ``k = 1``.
    """
    if j < 0:
        raise DomainError("log power must be >= 0")
    s = mpf(s)
    _check_hasse_s(s)

    def f(k):
        x = mpf(k + 1)
        if j == 0:
            return x ** (-s)
        return mpmath.log(x) ** j * x ** (-s)

    value, info = _difference_series(
        f, lambda n: mpf(2) ** (-(n + 1)), terms, tol, _log_growth_digits(j, s)
    )
    return (value, info) if full_output else value


def hasse1_zeta(s, terms=None, tol=1e-15, full_output=False):
    """``zeta(s) = (1 - 2^(1-s))^-1 sum_n 2^-(n+1) sum_k (-1)^k C(n,k) (k+1)^-s``."""
    s = mpf(s)
    if s == 1:
        raise PoleError("zeta(s) has a pole at s = 1")
    with mp.workdps(working_dps(tol, 4)):
        pref = 1 / (1 - mpf(2) ** (1 - s))
        inner, info = hasse_log_sum(0, s, terms, tol / max(1.0, float(abs(pref))), True)
        value = pref * inner
    return (+value, info) if full_output else +value


def hasse1_zeta_prime(s, tol=1e-15, terms=None, full_output=False):
    """``zeta'(s) = -ln2/(2^(s-1) - 1) zeta(s) - (1-2^(1-s))^-1 * sum_n 2^-(n+1)
    sum_k (-1)^k C(n,k) ln(k+1) (k+1)^-s``, both pieces from the Hasse series."""
    s = mpf(s)
    if s == 1:
        raise PoleError("zeta'(s) has a pole at s = 1")
    with mp.workdps(working_dps(tol, 4)):
        ln2 = mpmath.log(2)
        pref = 1 / (1 - mpf(2) ** (1 - s))
        scale = max(1.0, float(abs(pref)), float(abs(ln2 / (mpf(2) ** (s - 1) - 1))))
        z, zinfo = hasse1_zeta(s, terms, tol / (4 * scale), True)
        h, hinfo = hasse_log_sum(1, s, terms, tol / (4 * scale), True)
        value = -ln2 / (mpf(2) ** (s - 1) - 1) * z - pref * h
        info = SeriesInfo(max(zinfo.terms, hinfo.terms), scale * (zinfo.error + hinfo.error))
    return (+value, info) if full_output else +value


# ---------------------------------------------------------------------------
# second (slow) Hasse series
# ---------------------------------------------------------------------------

HASSE2_DEFAULT_TERMS = 60


def _hasse2_remainder(sigma, L, tol):
    """``sum_{l >= L} Delta_l / (l + 1)`` for ``Delta_l = sum_k (-1)^k C(l,k)
    (k+1)^-sigma``.

    From ``(k+1)^-sigma = Gamma(sigma)^-1 int_0^inf t^(sigma-1) e^-(k+1)t dt``
    one gets ``Delta_l = Gamma(sigma)^-1 int t^(sigma-1) e^-t y^l dt`` with
    ``y = 1 - e^-t``; summing the geometric-like tail in closed form leaves
    ``int_0^inf t^(sigma-1) e^-t R_L(y) dt / Gamma(sigma)`` with
    ``R_L(y) = sum_{l>=L} y^l/(l+1) = t/y - sum_{l<L} y^l/(l+1)``.
    """
    sigma = mpf(sigma)
    gsig = mpmath.gamma(sigma)

    def r_tail(t):
        y = -mpmath.expm1(-t)
        if y == 0:
            return mpf(0)
        if y < mpf(1) / 2:
            acc = mpf(0)
            yl = y**L
            l = L
            while True:
                term = yl / (l + 1)
                acc += term
                if term < acc * mpf(10) ** (-mp.dps):
                    break
                yl *= y
                l += 1
            return acc
        head = mpf(0)
        yl = mpf(1)
        for l in range(L):
            head += yl / (l + 1)
            yl *= y
        return t / y - head

    def integrand(t):
        if t == 0:
            return mpf(0)
        return t ** (sigma - 1) * mpmath.exp(-t) * r_tail(t) / gsig

    # beyond T: R_L(y) <= t / y <= t / (1 - e^-T)
    T = mpf(32)
    while True:
        beyond = upper_incomplete_gamma(sigma + 1, T, 1e-6) / (gsig * (1 - mpmath.exp(-T)))
        if beyond <= tol / 4:
            break
        T *= 2
    edges = [mpf(2) ** i for i in range(-4, int(math.log2(float(T))) + 1)]
    res = integrate_smooth(integrand, 0, T, tol / 4, breakpoints=edges)
    return res.value, float(beyond) + res.error_bound


def hasse2_zeta(s, terms=HASSE2_DEFAULT_TERMS, tol=1e-15, full_output=False):
    """``zeta(s) = (s-1)^-1 sum_l (l+1)^-1 sum_k (-1)^k C(l,k) (k+1)^-(s-1)``.

    The outer series converges only like ``(ln L)^(s-2) / L``, so the first
    ``terms`` outer terms are summed directly and the remainder is evaluated
    from its integral representation (see :func:`_hasse2_remainder`).
    """
    s = mpf(s)
    if not s > 1:
        raise DomainError("hasse2_zeta is implemented for s > 1")
    sigma = s - 1
    L = int(terms)
    if L < 1:
        raise DomainError("need at least one directly summed term")
    with mp.workdps(working_dps(tol, 2 + L * math.log10(2))):

        def f(k):
            return mpf(k + 1) ** (-sigma)

        head, _ = _difference_series(f, lambda n: 1 / mpf(n + 1), L, tol, lambda cap: 0.0)
        tail, tail_err = _hasse2_remainder(sigma, L, tol * float(sigma) / 2)
        value = (head + tail) / sigma
        info = SeriesInfo(L, tail_err / float(sigma))
    return (+value, info) if full_output else +value
