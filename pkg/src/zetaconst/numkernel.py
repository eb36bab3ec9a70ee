"""Exact combinatorics, Bernoulli polynomials and small numerical kernels.

Everything above this module works in :mod:`mpmath` multiprecision
arithmetic.  Routines that take a target tolerance raise the working
precision themselves (see :func:`working_dps`) so the caller never has to
guess how many guard digits a cancellation-prone sum needs.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
from mpmath import mp, mpf

__all__ = [
    "ZetaConstError",
    "DomainError",
    "PoleError",
    "ConvergenceError",
    "working_dps",
    "StirlingTable",
    "stirling_s1",
    "BernoulliCache",
    "bernoulli_number",
    "bernoulli_poly",
    "periodic_bernoulli",
    "pn_sup_bound",
    "upper_incomplete_gamma",
    "compensated_sum",
    "LogPowerFunction",
]


class ZetaConstError(Exception):
    """Base class for errors raised by this package."""


class DomainError(ZetaConstError, ValueError):
    """Arguments outside the documented domain of an operation."""


class PoleError(DomainError):
    """Evaluation requested at a pole."""


class ConvergenceError(ZetaConstError, ArithmeticError):
    """A requested tolerance could not be met within the iteration caps.

    ``value`` and ``bound`` carry the best estimate and its achieved error
    bound so callers can still report something useful.
    """

    def __init__(self, message, value=None, bound=None):
        super().__init__(message)
        self.value = value
        self.bound = bound


GUARD_DIGITS = 10


def working_dps(tol, extra=0.0):
    """Decimal digits needed to hit absolute ``tol`` after ``extra`` digits
    of cancellation, including the standard guard digits.

    Never lowers the ambient precision.
    """
    tol = float(tol)
    if not tol > 0:
        raise DomainError("tolerance must be positive")
    digits = max(0.0, -math.log10(tol))
    return max(mp.dps, int(math.ceil(digits + max(0.0, extra))) + GUARD_DIGITS)


# ---------------------------------------------------------------------------
# Stirling numbers of the first kind
# ---------------------------------------------------------------------------


class StirlingTable:
    """Signed Stirling numbers of the first kind, grown on demand.

    Rows are immutable tuples of Python ints; growth is serialized by a
    lock so concurrent readers always see complete rows.
    """

    def __init__(self, max_n: int = 32):
        self._rows: list[tuple[int, ...]] = [(1,)]
        self._lock = threading.Lock()
        self._extend(max_n)

    @property
    def max_n(self) -> int:
        return len(self._rows) - 1

    def _extend(self, n: int) -> None:
        with self._lock:
            rows = self._rows
            while len(rows) <= n:
                prev = rows[-1]
                m = len(rows) - 1
                # s(m+1, j) = s(m, j-1) - m s(m, j)
                new = [0] * (m + 2)
                for j in range(1, m + 2):
                    left = prev[j - 1]
                    right = prev[j] if j <= m else 0
                    new[j] = left - m * right
                rows.append(tuple(new))

    def row(self, n: int) -> tuple[int, ...]:
        if n < 0:
            raise DomainError(f"Stirling row index must be >= 0, got {n}")
        if n > self.max_n:
            self._extend(n)
        return self._rows[n]

    def __call__(self, n: int, m: int) -> int:
        if not 0 <= m <= n:
            raise DomainError(f"s({n},{m}) requires 0 <= m <= n")
        return self.row(n)[m]


_STIRLING = StirlingTable()


def stirling_s1(n: int, m: int) -> int:
    """Signed Stirling number of the first kind ``s(n, m)`` (exact)."""
    return _STIRLING(int(n), int(m))


# ---------------------------------------------------------------------------
# Bernoulli numbers and polynomials
# ---------------------------------------------------------------------------


class BernoulliCache:
    """Exact Bernoulli numbers (``B_1 = -1/2``) and polynomial rows."""

    def __init__(self):
        self._numbers: list[Fraction] = [Fraction(1)]
        self._lock = threading.Lock()
        self._mp_rows: dict[tuple[int, int], tuple] = {}

    def number(self, j: int) -> Fraction:
        if j < 0:
            raise DomainError("Bernoulli index must be >= 0")
        if j >= len(self._numbers):
            with self._lock:
                nums = self._numbers
                while len(nums) <= j:
                    n = len(nums)
                    if n > 1 and n % 2 == 1:
                        nums.append(Fraction(0))
                        continue
                    acc = Fraction(0)
                    binom = 1
                    for i in range(n):
                        acc += binom * nums[i]
                        binom = binom * (n + 1 - i) // (i + 1)
                    nums.append(-acc / (n + 1))
        return self._numbers[j]

    def poly_row(self, n: int) -> tuple[Fraction, ...]:
        """Coefficients of ``B_n(x)``, highest power first."""
        return tuple(math.comb(n, j) * self.number(j) for j in range(n + 1))

    def mp_row(self, n: int) -> tuple:
        key = (n, mp.prec)
        row = self._mp_rows.get(key)
        if row is None:
            row = tuple(mpf(c.numerator) / c.denominator for c in self.poly_row(n))
            self._mp_rows[key] = row
        return row


_BERNOULLI = BernoulliCache()


def bernoulli_number(j: int) -> Fraction:
    return _BERNOULLI.number(int(j))


def bernoulli_poly(n: int, x):
    """``B_n(x)`` by Horner's rule on the exact coefficient row."""
    if n < 0:
        raise DomainError("Bernoulli polynomial degree must be >= 0")
    x = mpf(x)
    acc = mpf(0)
    for c in _BERNOULLI.mp_row(n):
        acc = acc * x + c
    return acc


def periodic_bernoulli(n: int, x):
    """``P_n(x) = B_n(x - floor(x))``."""
    x = mpf(x)
    return bernoulli_poly(n, x - mpmath.floor(x))


def pn_sup_bound(n: int, normalized: bool = False) -> float:
    """Sup bound on ``|P_n|`` for ``n >= 1``.

    The even/odd form ``[3 + (-1)^n] / (2 pi)^n`` bounds ``|P_n| / n!``
    (for ``n >= 2``); that is what ``normalized=True`` returns.  The default
    multiplies it back by ``n!`` and uses the exact ``1/2`` for ``n = 1``.
    """
    if n < 1:
        raise DomainError("sup bound only defined for n >= 1")
    scaled = (3 + (-1) ** n) / (2 * math.pi) ** n
    if normalized:
        return scaled
    if n == 1:
        return 0.5
    return math.factorial(n) * scaled


# ---------------------------------------------------------------------------
# Incomplete gamma
# ---------------------------------------------------------------------------

_GAMMA_ITER_CAP = 5000


def upper_incomplete_gamma(a, z, tol=1e-15):
    """Upper incomplete gamma ``Gamma(a, z)`` for ``a > 0``, ``z >= 0``.

    Power series for the lower function when ``z < a + 1``, modified Lentz
    continued fraction otherwise.  ``tol`` is relative.
    """
    a, z = mpf(a), mpf(z)
    if not a > 0 or z < 0:
        raise DomainError("upper_incomplete_gamma needs a > 0 and z >= 0")
    with mp.workdps(working_dps(tol)):
        eps = mpf(tol) / 100
        if z == 0:
            return +mpmath.gamma(a)
        if z < a + 1:
            term = 1 / a
            acc = term
            for i in range(1, _GAMMA_ITER_CAP):
                term *= z / (a + i)
                acc += term
                if abs(term) < abs(acc) * eps:
                    break
            else:
                raise ConvergenceError("incomplete gamma series did not converge")
            lower = acc * mpmath.exp(-z + a * mpmath.log(z))
            return +(mpmath.gamma(a) - lower)
        tiny = mpf(10) ** (-mp.dps * 2)
        b = z + 1 - a
        c = 1 / tiny
        d = 1 / b
        h = d
        for i in range(1, _GAMMA_ITER_CAP):
            an = -i * (i - a)
            b += 2
            d = an * d + b
            if abs(d) < tiny:
                d = tiny
            c = b + an / c
            if abs(c) < tiny:
                c = tiny
            d = 1 / d
            delta = d * c
            h *= delta
            if abs(delta - 1) < eps:
                break
        else:
            raise ConvergenceError("incomplete gamma continued fraction did not converge")
        return +(mpmath.exp(-z + a * mpmath.log(z)) * h)


# ---------------------------------------------------------------------------
# Summation
# ---------------------------------------------------------------------------


def compensated_sum(terms: Iterable):
    """Sum with compensated accumulation.

    Pure float input goes through :func:`math.fsum` (correctly rounded);
    anything else (mpf, mpc, Fraction) uses Neumaier's variant so the order
    of accumulation does not leak rounding error into the result.
    """
    terms = list(terms)
    if not terms:
        return 0.0
    if all(isinstance(t, float) for t in terms):
        return math.fsum(terms)
    total = terms[0] * 0
    comp = total
    for t in terms:
        new = total + t
        if abs(total) >= abs(t):
            comp += (total - new) + t
        else:
            comp += (t - new) + total
        total = new
    return total + comp


# ---------------------------------------------------------------------------
# Log-power functions  f(x) = sum_i c_i ln^i(x + shift) / (x + shift)^power
# ---------------------------------------------------------------------------


class LogPowerFunction:
    """Finite sum ``sum_i c_i ln^i(t) t^(-power)`` with ``t = x + shift``.

    Closed under differentiation, which is what the integration-by-parts
    tails and the Euler-Maclaurin remainders need.
    """

    __slots__ = ("coeffs", "power", "shift")

    def __init__(self, coeffs: Sequence, power, shift=0):
        self.coeffs = tuple(coeffs)
        self.power = power
        self.shift = shift

    def __call__(self, x):
        t = x + self.shift
        lt = mpmath.log(t)
        acc = mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * lt + c
        return acc * t ** (-self.power)

    def derivative(self) -> "LogPowerFunction":
        p = self.power
        c = self.coeffs
        out = [0] * len(c)
        for i, ci in enumerate(c):
            out[i] -= p * ci
            if i:
                out[i - 1] += i * ci
        return LogPowerFunction(out, p + 1, self.shift)

    def abs_tail_bound(self, x) -> float:
        """Upper bound on ``int_x^inf |f(u)| du``; needs ``x + shift >= 1``
        and ``power > 1``.  Computed in floating point (it is a bound, a few
        ulps of slack are irrelevant)."""
        t = float(x + self.shift)
        q = float(self.power) - 1
        if t < 1 or not q > 0:
            raise DomainError("tail bound needs x + shift >= 1 and power > 1")
        z = q * math.log(t)
        total = 0.0
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            # int_t^inf ln^i u u^-(q+1) du = Gamma(i+1, z) / q^(i+1)
            #   = i! e^-z sum_{m<=i} z^m/m! / q^(i+1)
            total += float(abs(c)) * math.exp(_log_gamma_upper_int(i, z) - (i + 1) * math.log(q))
        return total * (1 + 1e-12)


def _log_gamma_upper_int(i: int, z: float) -> float:
    """``ln Gamma(i + 1, z)`` for integer ``i >= 0`` and ``z >= 0``."""
    if z == 0:
        return math.lgamma(i + 1)
    logs = [m * math.log(z) - math.lgamma(m + 1) for m in range(i + 1)]
    top = max(logs)
    return math.lgamma(i + 1) - z + top + math.log(sum(math.exp(v - top) for v in logs))
