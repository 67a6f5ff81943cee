"""Dense univariate polynomials over exact arbitrary-precision rationals.

Coefficients are stored lowest power first as `fractions.Fraction` with
trailing zeros stripped, so the zero polynomial has an empty coefficient
tuple and degree -1.  All arithmetic is exact; rounding enters only when a
polynomial is evaluated at a point (double precision by default, or
arbitrary-precision binary via `eval_extended`).

`sup_norm_on_circle` estimates max{|f(z)| : |z| <= r} for a function
analytic on the closed disk: by the maximum modulus principle the maximum
is attained on the boundary circle, which is sampled on progressively
doubled uniform angle grids until the estimate stabilizes.  Doubling keeps
the previous grid nested inside the new one, so the estimates are
nondecreasing lower bounds of the true maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable

import mpmath
import numpy as np

from .errors import EvaluationError

__all__ = [
    "RationalPoly",
    "CirclePoint",
    "SamplingConfig",
    "SupNormResult",
    "as_fraction",
    "sup_norm_on_circle",
]


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions, ``"p/q"`` strings and floats to a Fraction.

    Floats convert to their exact binary value: ``as_fraction(1.5)`` is 3/2,
    while ``as_fraction(0.1)`` is the exact value of the double ``0.1``, not
    1/10.  Pass strings for exact decimal or slash notation.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot represent {value!r} as a rational")
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value)
    raise TypeError(f"not a rational value: {value!r}")


class RationalPoly:
    """Immutable dense polynomial with exact rational coefficients."""

    __slots__ = ("_coeffs", "_float_coeffs")

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self._coeffs: tuple[Fraction, ...] = tuple(cs)
        self._float_coeffs = None

    @classmethod
    def zero(cls) -> RationalPoly:
        return cls()

    @classmethod
    def one(cls) -> RationalPoly:
        return cls((1,))

    @classmethod
    def monomial(cls, power: int, coeff=1) -> RationalPoly:
        """The polynomial ``coeff * z**power``."""
        if power < 0:
            raise ValueError("power must be nonnegative")
        c = as_fraction(coeff)
        if c == 0:
            return cls()
        return cls((0,) * power + (c,))

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Degree of the leading term; the zero polynomial has degree -1."""
        return len(self._coeffs) - 1

    def is_zero(self) -> bool:
        return not self._coeffs

    def coeff(self, power: int) -> Fraction:
        if 0 <= power < len(self._coeffs):
            return self._coeffs[power]
        return Fraction(0)

    # -- exact arithmetic ------------------------------------------------

    def __add__(self, other) -> RationalPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._coeffs, other._coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RationalPoly(out)

    __radd__ = __add__

    def __neg__(self) -> RationalPoly:
        return RationalPoly(tuple(-c for c in self._coeffs))

    def __sub__(self, other) -> RationalPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> RationalPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> RationalPoly:
        if isinstance(other, RationalPoly):
            a, b = self._coeffs, other._coeffs
            if not a or not b:
                return RationalPoly()
            out = [Fraction(0)] * (len(a) + len(b) - 1)
            for i, ca in enumerate(a):
                if ca == 0:
                    continue
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
            return RationalPoly(out)
        try:
            c = as_fraction(other)
        except TypeError:
            return NotImplemented
        if c == 0:
            return RationalPoly()
        return RationalPoly(tuple(c * x for x in self._coeffs))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> RationalPoly:
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = RationalPoly.one()
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def scale(self, factor) -> RationalPoly:
        """Multiply every coefficient exactly by a rational factor."""
        return self * as_fraction(factor)

    def derivative(self, order: int = 1) -> RationalPoly:
        """Exact formal derivative of the given order."""
        if order < 0:
            raise ValueError("order must be nonnegative")
        cs = self._coeffs
        for _ in range(order):
            cs = tuple(k * c for k, c in enumerate(cs))[1:]
        return RationalPoly(cs)

    def _coerce(self, other):
        if isinstance(other, RationalPoly):
            return other
        try:
            return RationalPoly((as_fraction(other),))
        except TypeError:
            return NotImplemented

    # -- evaluation ------------------------------------------------------

    def _floats(self) -> np.ndarray:
        if self._float_coeffs is None:
            self._float_coeffs = np.array([float(c) for c in self._coeffs])
        return self._float_coeffs

    def __call__(self, z):
        """Horner evaluation in double precision.

        ``z`` may be a scalar or a numpy array of points; the result follows
        the input shape.
        """
        cs = self._floats()
        if isinstance(z, np.ndarray):
            acc = np.zeros(z.shape, dtype=complex)
            for c in cs[::-1]:
                acc *= z
                acc += c
            return acc
        zz = complex(z)
        acc = 0j
        for c in cs[::-1]:
            acc = acc * zz + c
        return acc

    def eval_extended(self, z, bits: int = 256) -> complex:
        """Horner evaluation carried out at the given binary precision.

        Coefficients enter the computation exactly (numerator divided by
        denominator at working precision), so the result is accurate to
        roughly the requested precision; it is returned rounded to a
        double-precision complex.
        """
        if bits < 53:
            raise ValueError("extended precision needs at least 53 bits")
        with mpmath.workprec(bits + 16):
            if isinstance(z, Fraction):
                zz = mpmath.mpf(z.numerator) / z.denominator
            else:
                zz = mpmath.mpmathify(z)
            acc = mpmath.mpc(0)
            for c in reversed(self._coeffs):
                acc = acc * zz + mpmath.mpf(c.numerator) / c.denominator
            return complex(acc)

    def eval_exact(self, x) -> Fraction:
        """Evaluate at a rational point with exact rational arithmetic."""
        xx = as_fraction(x)
        acc = Fraction(0)
        for c in reversed(self._coeffs):
            acc = acc * xx + c
        return acc

    # -- misc --------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalPoly):
            return self._coeffs == other._coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self._coeffs)

    def dump(self) -> str:
        """Debug dump, one ``power:numerator/denominator`` line per stored
        coefficient (dense, constant term first)."""
        return "\n".join(
            f"{k}:{c.numerator}/{c.denominator}" for k, c in enumerate(self._coeffs)
        )

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self._coeffs[k]
            if c == 0:
                continue
            mag = -c if c < 0 else c
            if k == 0:
                term = str(mag)
            else:
                var = "z" if k == 1 else f"z^{k}"
                term = var if mag == 1 else f"{mag} {var}"
            if not parts:
                parts.append(term if c > 0 else f"-{term}")
            else:
                parts.append(f"+ {term}" if c > 0 else f"- {term}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"RationalPoly('{self}')"


@dataclass(frozen=True)
class CirclePoint:
    """A point r*exp(i*angle) on the circle of the given radius."""

    radius: float
    angle: float

    @property
    def value(self) -> complex:
        return self.radius * complex(math.cos(self.angle), math.sin(self.angle))


@dataclass(frozen=True)
class SamplingConfig:
    """Controls for the circle-sampling sup-norm estimator."""

    initial_samples: int = 1024
    rel_tol: float = 1e-9
    max_samples: int = 1 << 20


@dataclass(frozen=True)
class SupNormResult:
    """Sup-norm estimate together with how it was obtained.

    ``value`` is a lower estimate of the true maximum (it is a maximum over
    finitely many boundary points).  ``history`` holds the estimate at each
    grid refinement; successive grids are nested, so it is nondecreasing.
    """

    value: float
    samples: int
    peak: CirclePoint
    history: tuple[float, ...]
    converged: bool


def _relative_change(a: float, b: float) -> float:
    m = max(abs(a), abs(b))
    if m == 0.0:
        return 0.0
    return abs(a - b) / m


def _eval_on_grid(evaluable: Callable, grid: np.ndarray) -> np.ndarray:
    """Evaluate on the whole grid at once when possible, pointwise otherwise."""
    try:
        values = np.asarray(evaluable(grid), dtype=complex)
    except (TypeError, ValueError, AttributeError):
        return np.array([complex(evaluable(z)) for z in grid], dtype=complex)
    if values.shape != grid.shape:
        values = np.broadcast_to(values, grid.shape)
    return values


def sup_norm_on_circle(
    evaluable: Callable,
    r: float,
    config: SamplingConfig | None = None,
) -> SupNormResult:
    """Estimate max{|f(z)| : |z| = r} by refined uniform circle sampling.

    The sample count doubles from ``config.initial_samples`` until the
    relative change between successive estimates drops below
    ``config.rel_tol`` or the next grid would exceed ``config.max_samples``.
    Evaluation may happen on all sample points at once (the callable receives
    a complex numpy array); a pointwise fallback handles callables that only
    accept scalars.

    Raises ``EvaluationError`` if any sample evaluates to a non-finite value.
    """
    r = float(r)
    if r <= 0:
        raise ValueError("radius must be positive")
    cfg = config or SamplingConfig()
    n = cfg.initial_samples
    history: list[float] = []
    previous: float | None = None
    while True:
        angles = np.arange(n) * (2.0 * math.pi / n)
        grid = r * np.exp(1j * angles)
        magnitudes = np.abs(_eval_on_grid(evaluable, grid))
        if not np.all(np.isfinite(magnitudes)):
            raise EvaluationError(
                f"non-finite evaluation on circle of radius {r} ({n} samples)"
            )
        index = int(np.argmax(magnitudes))
        current = float(magnitudes[index])
        history.append(current)
        converged = previous is not None and _relative_change(current, previous) < cfg.rel_tol
        if converged or 2 * n > cfg.max_samples:
            return SupNormResult(
                value=current,
                samples=n,
                peak=CirclePoint(r, float(angles[index])),
                history=tuple(history),
                converged=converged,
            )
        previous = current
        n *= 2
