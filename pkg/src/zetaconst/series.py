"""Truncated Laurent series in ``u = s - 1``.

A :class:`LaurentSeries` is ``log_coeff * ln(u) + pole_coeff / u +
sum_k taylor[k] u^k`` with the Taylor part known exactly through order
``K = len(taylor) - 1``.  Coefficients can be any field-like numbers
(``Fraction``, ``float``, ``mpf``), so exact inputs give exact outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath

from .numkernel import DomainError

__all__ = [
    "DEFAULT_ORDER",
    "LaurentSeries",
    "series_mul",
    "series_log",
    "series_exp",
    "series_reciprocal_simple_zero",
]

DEFAULT_ORDER = 12


@dataclass(frozen=True)
class LaurentSeries:
    taylor: tuple
    pole_coeff: object = 0
    log_coeff: int = field(default=0)

    def __post_init__(self):
        object.__setattr__(self, "taylor", tuple(self.taylor))
        if not self.taylor:
            raise DomainError("a series needs at least the constant coefficient")

    @property
    def order(self) -> int:
        return len(self.taylor) - 1

    def __getitem__(self, k):
        if k == -1:
            return self.pole_coeff
        return self.taylor[k]

    def truncate(self, order: int) -> "LaurentSeries":
        return LaurentSeries(self.taylor[: order + 1], self.pole_coeff, self.log_coeff)

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        k = min(self.order, other.order)
        return LaurentSeries(
            [self.taylor[i] + other.taylor[i] for i in range(k + 1)],
            self.pole_coeff + other.pole_coeff,
            self.log_coeff + other.log_coeff,
        )

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries([-c for c in self.taylor], -self.pole_coeff, -self.log_coeff)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            return series_mul(self, other)
        return LaurentSeries([c * other for c in self.taylor], self.pole_coeff * other)

    __rmul__ = __mul__

    def __call__(self, u):
        acc = 0
        for c in reversed(self.taylor):
            acc = acc * u + c
        if self.pole_coeff:
            acc += self.pole_coeff / u
        return acc

    @classmethod
    def from_pole(cls, pole_coeff, order: int = DEFAULT_ORDER) -> "LaurentSeries":
        return cls([0] * (order + 1), pole_coeff)


def _check_analytic(a: LaurentSeries, what: str) -> None:
    if a.log_coeff:
        raise DomainError(f"{what}: logarithmic terms are carried symbolically only")


def series_mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    """Product, exact through the smaller order.

    A pole part times a Taylor part shifts coefficients down one slot, so
    the pole product needs the Taylor partner known through ``K + 1``;
    the result is truncated to ``min(order) - 1`` in that case.
    """
    _check_analytic(a, "series_mul")
    _check_analytic(b, "series_mul")
    if a.pole_coeff and b.pole_coeff:
        raise DomainError("series_mul: both factors have a pole part")
    k = min(a.order, b.order)
    ta, tb = a.taylor, b.taylor
    out = [sum((ta[i] * tb[n - i] for i in range(n + 1)), 0 * ta[0]) for n in range(k + 1)]
    pole = 0
    if a.pole_coeff or b.pole_coeff:
        p, t = (a.pole_coeff, tb) if a.pole_coeff else (b.pole_coeff, ta)
        pole = p * t[0]
        for n in range(k):
            out[n] = out[n] + p * t[n + 1]
        out = out[:k] if k > 0 else out
    return LaurentSeries(out, pole)


def series_log(a: LaurentSeries) -> LaurentSeries:
    """Logarithm of a series.

    An analytic input needs ``c_0 > 0``.  An input with a pole part is read
    as ``h(u) / u`` with ``h = pole_coeff + c_0 u + ...``; the ``-ln u``
    term is then kept symbolically as ``log_coeff = -1`` and the returned
    Taylor part is ``ln h`` (one order shorter than the input).
    """
    _check_analytic(a, "series_log")
    log_coeff = 0
    if a.pole_coeff:
        # a = p/u + t0 + t1 u + ... = (p + t0 u + t1 u^2 + ...) / u
        h = [a.pole_coeff] + list(a.taylor[:-1])
        log_coeff = -1
    else:
        h = list(a.taylor)
    c0 = h[0]
    if not c0 > 0:
        raise DomainError("series_log: leading coefficient must be positive")
    # (ln h)' = h'/h  ->  n l_n c0 = n h_n - sum_{k=1}^{n-1} k l_k h_{n-k}
    n_max = len(h) - 1
    out = [_log_scalar(c0)]
    for n in range(1, n_max + 1):
        acc = n * h[n]
        for k in range(1, n):
            acc = acc - k * out[k] * h[n - k]
        out.append(acc / (n * c0))
    return LaurentSeries(out, 0, log_coeff)


def series_exp(a: LaurentSeries) -> LaurentSeries:
    """Exponential of an analytic series (inverse of :func:`series_log`)."""
    _check_analytic(a, "series_exp")
    if a.pole_coeff:
        raise DomainError("series_exp: pole part not supported")
    t = a.taylor
    out = [_exp_scalar(t[0])]
    # e' = a' e  ->  n e_n = sum_{k=1}^n k a_k e_{n-k}
    for n in range(1, len(t)):
        acc = 0 * t[0]
        for k in range(1, n + 1):
            acc = acc + k * t[k] * out[n - k]
        out.append(acc / n)
    return LaurentSeries(out)


def series_reciprocal_simple_zero(a: LaurentSeries) -> LaurentSeries:
    """``1 / a`` for ``a = c_1 u + c_2 u^2 + ...`` with ``c_1 != 0``.

    Writing ``a = u h(u)``, the reciprocal is ``(1/h)/u``; ``1/h`` is exact
    through ``K - 1`` so the result has order ``K - 2``.
    """
    _check_analytic(a, "series_reciprocal_simple_zero")
    if a.pole_coeff:
        raise DomainError("input has a pole part")
    t = a.taylor
    if t[0] != 0:
        raise DomainError("input does not vanish at u = 0")
    if len(t) < 2 or t[1] == 0:
        raise DomainError("zero at u = 0 is not simple")
    h = t[1:]
    inv = [1 / h[0]]
    for n in range(1, len(h)):
        acc = 0 * h[0]
        for k in range(1, n + 1):
            acc = acc + h[k] * inv[n - k]
        inv.append(-acc / h[0])
    # (1/h)/u: inv[0] is the pole, inv[1:] the Taylor part
    taylor = inv[1:] if len(inv) > 1 else [0 * inv[0]]
    return LaurentSeries(taylor, inv[0])


def _log_scalar(x):
    if x == 1:
        return 0 * x
    return mpmath.log(x)


def _exp_scalar(x):
    if x == 0:
        return 1 + x
    return mpmath.exp(x)
