"""Breakpoint-aware Gauss-Legendre quadrature.

The integrands here are a periodic factor (a periodic Bernoulli polynomial
or ``sin``/``cos`` of ``2 pi x``) times a log-power weight
``ln^k(x + c) / (x + c)^p`` on ``[lo, inf)``.  The periodic factor is only
piecewise smooth, so panels are split exactly at its lattice of kinks and
refined adaptively by bisection.  The infinite tail beyond a lattice point
``X`` is not mapped to a finite interval: it is integrated by parts ``r``
times against the exactly known antiderivatives of the periodic factor, and
the leftover integral is bounded by the sup norm of the ``r``-th
antiderivative times ``int_X^inf |f^(r)|`` (an incomplete gamma value).
``r = 0`` is the plain sup-bound cutoff of :func:`tail_cutoff`.

Per-panel error is ``|G_p - G_(p/2)|`` (order ``p`` and ``p/2`` rules on
the same panel); it is an estimate, not a proof, and in practice a heavy
overestimate because it is really the error of the lower rule.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
from mpmath import mp, mpf

from .numkernel import (
    ConvergenceError,
    DomainError,
    LogPowerFunction,
    compensated_sum,
    periodic_bernoulli,
    pn_sup_bound,
    upper_incomplete_gamma,
    working_dps,
)

__all__ = [
    "DEFAULT_ORDER",
    "QuadResult",
    "PiecewiseIntegrand",
    "gauss_legendre",
    "tail_cutoff",
    "integrate_pn_logk",
    "integrate_pn_logpowers",
    "integrate_trig_logk",
    "integrate_trig_logpowers",
    "integrate_smooth",
    "integrate_unit_a",
    "integrate_appendix",
]

DEFAULT_ORDER = 16
MAX_PANELS = 20000
MAX_PARTS = 80


@dataclass(frozen=True)
class QuadResult:
    value: object
    error_bound: float
    tail_cut: float = math.inf
    panels: int = 0


@dataclass(frozen=True)
class PiecewiseIntegrand:
    """``P_n(scale (x - offset)) ln^k x / x^power`` on ``[1, inf)``.

    ``power`` defaults to ``n + 1``.
    """

    n: int
    k: int
    offset: object = 0
    scale: object = 1
    power: int | None = None

    @property
    def denominator_power(self) -> int:
        return self.n + 1 if self.power is None else self.power

    def breakpoints(self, lo, hi) -> list:
        """Lattice ``offset + j / scale`` inside ``(lo, hi)``."""
        scale = mpf(_as_mp(self.scale))
        off = _as_mp(self.offset)
        j = int(mpmath.floor((lo - off) * scale)) + 1
        pts = []
        while True:
            x = off + mpf(j) / scale
            if x >= hi:
                break
            if x > lo:
                pts.append(x)
            j += 1
        return pts


_GL_CACHE: dict[tuple[int, int], tuple[tuple, tuple]] = {}


def gauss_legendre(order: int):
    """Nodes and weights of the ``order``-point rule on ``[-1, 1]`` at the
    current working precision."""
    key = (order, mp.prec)
    cached = _GL_CACHE.get(key)
    if cached is not None:
        return cached
    with mp.workprec(mp.prec + 20):
        nodes, weights = [], []
        for i in range(1, order + 1):
            x = mpmath.cos(mp.pi * (i - mpf(1) / 4) / (order + mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mpf(1), x
                for m in range(2, order + 1):
                    p0, p1 = p1, ((2 * m - 1) * x * p1 - (m - 1) * p0) / m
                dp = order * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mpf(2) ** (-mp.prec + 4):
                    break
            p0, p1 = mpf(1), x
            for m in range(2, order + 1):
                p0, p1 = p1, ((2 * m - 1) * x * p1 - (m - 1) * p0) / m
            dp = order * (x * p1 - p0) / (x * x - 1)
            nodes.append(x)
            weights.append(2 / ((1 - x * x) * dp * dp))
    result = (tuple(+x for x in nodes), tuple(+w for w in weights))
    _GL_CACHE[key] = result
    return result


def _as_mp(x):
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


# ---------------------------------------------------------------------------
# adaptive panel engine
# ---------------------------------------------------------------------------


def _panel(func, a, b, order, nvals):
    """Order-``order`` and order-``order/2`` estimates on ``[a, b]``."""
    half = (b - a) / 2
    mid = (a + b) / 2
    hi = [mpf(0)] * nvals
    lo = [mpf(0)] * nvals
    for rule, acc in ((gauss_legendre(order), hi), (gauss_legendre(order // 2), lo)):
        xs, ws = rule
        for x, w in zip(xs, ws):
            vals = func(mid + half * x)
            for i in range(nvals):
                acc[i] += w * vals[i]
    hi = [half * v for v in hi]
    lo = [half * v for v in lo]
    return hi, [abs(h - l) for h, l in zip(hi, lo)]


def _adaptive(func, edges, weights, tol, order=DEFAULT_ORDER, max_panels=MAX_PANELS):
    """Integrate the vector-valued ``func`` over consecutive ``edges``.

    Refines the panel with the largest weighted error until the weighted
    error sum is at most ``tol``.  Returns ``(values, errors, panels)``.
    """
    nvals = len(weights)
    weights = [abs(mpf(w)) for w in weights]
    heap = []
    seq = 0
    total = mpf(0)
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        val, err = _panel(func, a, b, order, nvals)
        e = sum(w * x for w, x in zip(weights, err))
        heapq.heappush(heap, (-e, seq, a, b, val, err))
        seq += 1
        total += e
    while total > tol:
        if len(heap) >= max_panels:
            values, errors = _collect(heap, nvals)
            raise ConvergenceError(
                f"panel cap {max_panels} reached with weighted error {mpmath.nstr(total, 3)}",
                value=values,
                bound=float(total),
            )
        neg_e, _, a, b, _, _ = heapq.heappop(heap)
        total += neg_e
        m = (a + b) / 2
        for lo_, hi_ in ((a, m), (m, b)):
            val, err = _panel(func, lo_, hi_, order, nvals)
            e = sum(w * x for w, x in zip(weights, err))
            heapq.heappush(heap, (-e, seq, lo_, hi_, val, err))
            seq += 1
            total += e
    values, errors = _collect(heap, nvals)
    return values, errors, len(heap)


def _collect(heap, nvals):
    panels = sorted(heap, key=lambda item: item[2])
    values = [compensated_sum(p[4][i] for p in panels) for i in range(nvals)]
    errors = [compensated_sum(p[5][i] for p in panels) for i in range(nvals)]
    return values, errors


# ---------------------------------------------------------------------------
# periodic factors and tails by parts
# ---------------------------------------------------------------------------


class _BernoulliFactor:
    """``P_n(scale (x - offset))`` and its repeated antiderivatives in x."""

    def __init__(self, n, offset=0, scale=1):
        if n < 1:
            raise DomainError("periodic Bernoulli factor needs n >= 1")
        self.n = n
        self.offset = _as_mp(offset)
        self.scale = _as_mp(scale)

    def __call__(self, x):
        return periodic_bernoulli(self.n, self.scale * (x - self.offset))

    def _norm(self, i):
        rising = math.prod(range(self.n + 1, self.n + i + 1))
        return rising * self.scale**i

    def antiderivative(self, i, x):
        return periodic_bernoulli(self.n + i, self.scale * (x - self.offset)) / self._norm(i)

    def sup(self, i):
        return mpf(pn_sup_bound(self.n + i)) / self._norm(i)

    def lattice(self, lo, hi):
        return PiecewiseIntegrand(self.n, 0, self.offset, self.scale).breakpoints(lo, hi)

    def lattice_at_or_above(self, x):
        j = mpmath.ceil((x - self.offset) * self.scale)
        return self.offset + j / self.scale


class _TrigFactor:
    """``sin(2 pi x)`` or ``cos(2 pi x)`` with kinks-free half-integer panels."""

    def __init__(self, kind):
        if kind not in ("sin", "cos"):
            raise DomainError("trig must be 'sin' or 'cos'")
        self.kind = kind

    def _phase(self):
        return mpf(0) if self.kind == "sin" else mp.pi / 2

    def __call__(self, x):
        return mpmath.sin(2 * mp.pi * x + self._phase())

    def antiderivative(self, i, x):
        return mpmath.sin(2 * mp.pi * x + self._phase() - i * mp.pi / 2) / (2 * mp.pi) ** i

    def sup(self, i):
        return 1 / (2 * mp.pi) ** i

    def lattice(self, lo, hi):
        j = int(mpmath.floor(2 * lo)) + 1
        pts = []
        while mpf(j) / 2 < hi:
            pts.append(mpf(j) / 2)
            j += 1
        return pts

    def lattice_at_or_above(self, x):
        return mpmath.ceil(2 * x) / 2


def _tail_by_parts(factor, fs: Sequence[LogPowerFunction], weights, X, tol):
    """Tail ``int_X^inf factor * f_i`` for each ``f_i``.

    Returns ``(values, bounds, r)`` or ``None`` when no ``r <= MAX_PARTS``
    brings the weighted bound under ``tol``.
    """
    derivs = [list(fs)]
    best = None
    for r in range(MAX_PARTS + 1):
        cur = derivs[-1]
        try:
            rem = [factor.sup(r) * f.abs_tail_bound(X) for f in cur]
        except DomainError:
            return None
        wrem = sum(abs(w) * b for w, b in zip(weights, rem))
        if best is None or wrem < best[0]:
            best = (wrem, r, rem)
        if wrem <= tol:
            break
        if best is not None and r > best[1] + 4:
            break
        derivs.append([f.derivative() for f in cur])
    wrem, r, rem = best
    if wrem > tol:
        return None
    values = []
    for idx in range(len(fs)):
        acc = mpf(0)
        for i in range(1, r + 1):
            acc += (-1) ** i * factor.antiderivative(i, X) * derivs[i - 1][idx](X)
        values.append(acc)
    return values, [float(b) for b in rem], r


def _integrate_periodic(factor, fs, weights, lo, tol, order=DEFAULT_ORDER, x_start=None):
    """``int_lo^inf factor(x) f_i(x) dx`` for every ``f_i`` in ``fs``.

    ``weights`` scale the per-component errors when splitting ``tol``
    between the interior panels and the tail.
    """
    lo = mpf(lo)
    weights = [abs(mpf(w)) for w in weights]
    X = factor.lattice_at_or_above(max(lo + 1, mpf(2) if x_start is None else mpf(x_start)))
    tail = None
    for _ in range(40):
        tail = _tail_by_parts(factor, fs, weights, X, mpf(tol) / 2)
        if tail is not None:
            break
        X = factor.lattice_at_or_above(2 * X)
    if tail is None:
        raise ConvergenceError("no tail cutoff met the tolerance")
    tail_vals, tail_bounds, _ = tail
    edges = [lo] + factor.lattice(lo, X) + [X]

    if isinstance(fs, _LogPowerFamily):

        def func(x):
            p = factor(x)
            return [p * v for v in fs.values(x)]

    else:

        def func(x):
            p = factor(x)
            return [p * f(x) for f in fs]

    vals, errs, panels = _adaptive(func, edges, weights, mpf(tol) / 2, order)
    values = [v + t for v, t in zip(vals, tail_vals)]
    bounds = [float(e) + b for e, b in zip(errs, tail_bounds)]
    return values, bounds, float(X), panels


class _LogPowerFamily(list):
    """``[ln^k x / x^power for k in ks]`` evaluated together."""

    def __init__(self, ks, power):
        super().__init__(LogPowerFunction([0] * k + [1], power) for k in ks)
        self.ks = list(ks)
        self.power = power
        self.kmax = max(self.ks)

    def values(self, x):
        lx = mpmath.log(x)
        base = x ** (-self.power)
        pows = [base]
        for _ in range(self.kmax):
            pows.append(pows[-1] * lx)
        return [pows[k] for k in self.ks]


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def tail_cutoff(n: int, k: int, tol: float) -> float:
    """Smallest ``X >= 2`` (to bisection accuracy) with
    ``pn_sup_bound(n) * Gamma(k+1, n ln X) / n^(k+1) <= tol / 2``."""
    if n < 1 or k < 0 or not tol > 0:
        raise DomainError("tail_cutoff needs n >= 1, k >= 0, tol > 0")
    sup = pn_sup_bound(n)

    def bound(x):
        return sup * float(upper_incomplete_gamma(k + 1, n * math.log(x), 1e-8)) / n ** (k + 1)

    target = tol / 2
    lo = 2.0
    if bound(lo) <= target:
        return lo
    hi = 4.0
    while bound(hi) > target:
        lo, hi = hi, hi * 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if bound(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return hi


def integrate_pn_logpowers(
    n, ks, offset=0, scale=1, power=None, tol=1e-12, weights=None, lower=1, order=DEFAULT_ORDER
):
    """``int_lower^inf P_n(scale (x - offset)) ln^k x / x^power dx`` for each
    ``k`` in ``ks``, sharing nodes.

    ``weights`` (default all ones) are the coefficients the caller will
    combine the integrals with; ``tol`` bounds the weighted error sum.
    Returns a list of :class:`QuadResult`.
    """
    power = n + 1 if power is None else power
    if n < 1 or power < 2:
        raise DomainError("integrand must be absolutely integrable (n >= 1, power >= 2)")
    weights = [1] * len(ks) if weights is None else list(weights)
    factor = _BernoulliFactor(n, offset, scale)
    fs = _LogPowerFamily(ks, power)
    values, bounds, X, panels = _integrate_periodic(factor, fs, weights, lower, tol, order)
    return [QuadResult(v, b, X, panels) for v, b in zip(values, bounds)]


def integrate_pn_logk(p: PiecewiseIntegrand, tol: float = 1e-12, order=DEFAULT_ORDER) -> QuadResult:
    """Single-integrand form of :func:`integrate_pn_logpowers`."""
    with mp.workdps(working_dps(tol)):
        (res,) = integrate_pn_logpowers(
            p.n, [p.k], p.offset, p.scale, p.denominator_power, tol, order=order
        )
    return res


def integrate_trig_logpowers(trig, ks, n, tol=1e-12, weights=None, order=DEFAULT_ORDER, power=None):
    """``int_1^inf trig(2 pi x) ln^k x / x^p dx`` for each ``k``; ``p = 2n``
    unless ``power`` overrides it (the even-index sinusoid needs ``2n + 1``)."""
    power = 2 * n if power is None else power
    if power < 2:
        raise DomainError("need a denominator power >= 2")
    weights = [1] * len(ks) if weights is None else list(weights)
    factor = _TrigFactor(trig)
    fs = _LogPowerFamily(ks, power)
    values, bounds, X, panels = _integrate_periodic(factor, fs, weights, 1, tol, order)
    return [QuadResult(v, b, X, panels) for v, b in zip(values, bounds)]


def integrate_trig_logk(trig: str, k: int, n: int, tol: float = 1e-12) -> QuadResult:
    if k < 0:
        raise DomainError("k must be >= 0")
    with mp.workdps(working_dps(tol)):
        (res,) = integrate_trig_logpowers(trig, [k], n, tol)
    return res


def integrate_smooth(f: Callable, a, b, tol=1e-12, breakpoints=(), order=DEFAULT_ORDER) -> QuadResult:
    """Adaptive Gauss-Legendre for a scalar ``f`` smooth on each piece."""
    edges = [mpf(a)] + sorted(mpf(x) for x in breakpoints if a < x < b) + [mpf(b)]
    vals, errs, panels = _adaptive(lambda x: [f(x)], edges, [1], mpf(tol), order)
    return QuadResult(vals[0], float(errs[0]), float(b), panels)


def integrate_unit_a(f: Callable, s, tol: float = 1e-10) -> QuadResult:
    """``1/(1-s) + int_0^1 f(a) da`` where ``f(a) = zeta(s, a) - a^(-s)``.

    The singular ``a^(-s)`` part of the Hurwitz zeta function integrates to
    ``1/(1-s)`` in closed form; the remainder is bounded on ``[0, 1]``.
    """
    s = mpf(s)
    if s >= 1:
        raise DomainError("needs s < 1")
    with mp.workdps(working_dps(tol)):
        res = integrate_smooth(f, 0, 1, tol, breakpoints=[mpf(1) / 2])
        value = 1 / (1 - s) + res.value
    return QuadResult(value, res.error_bound, 1.0, res.panels)


def integrate_appendix(n: int, m: int, s, tol: float = 1e-12) -> QuadResult:
    """``int_m^inf P_1(x) / (x + s + 1)^(n+2) dx``."""
    if n < 1 or m < 1 or not s > -1:
        raise DomainError("needs n >= 1, m >= 1, s > -1")
    with mp.workdps(working_dps(tol)):
        factor = _BernoulliFactor(1)
        f = LogPowerFunction([1], n + 2, mpf(s) + 1)
        values, bounds, X, panels = _integrate_periodic(factor, [f], [1], m, tol)
    return QuadResult(values[0], bounds[0], X, panels)
