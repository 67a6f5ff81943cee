"""Analytic functions on a disk, given by Taylor-coefficient generators.

A function f(z) = sum c_k z^k is represented by a pure coefficient callable
plus a growth envelope (scale M, rate A, radius R) certifying

    |c_k| <= M * A^k / k!    for all k,

which in turn gives |f(z)| <= M exp(A |z|) on the disk |z| < R.  Built-in
constructors produce exact rational coefficients, so downstream operator
algebra can stay exact end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError, HypothesisError, TruncationError
from .ratpoly import RationalPoly, as_fraction

__all__ = [
    "AnalyticFunction",
    "EnvelopeReport",
    "GrowthEnvelope",
    "derivative",
    "exponential",
    "operator_tail_bound",
    "operator_truncation_index",
    "parse_function_spec",
    "polynomial",
    "validate_envelope",
]

DEFAULT_POLY_RATE = Fraction(2, 5)


@dataclass(frozen=True)
class GrowthEnvelope:
    """Envelope |c_k| <= scale * rate^k / k! on the disk of given radius.

    Requires radius > 1, 0 < rate < 1 and rate > 1/radius, so that every
    radius 1 <= r < 1/rate lies inside the disk.
    """

    scale: Fraction
    rate: Fraction
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "scale", as_fraction(self.scale))
        object.__setattr__(self, "rate", as_fraction(self.rate))
        object.__setattr__(self, "radius", as_fraction(self.radius))
        if self.scale <= 0:
            raise ValueError(f"requires scale M > 0; got {self.scale}")
        if not 0 < self.rate < 1:
            raise ValueError(f"requires rate A in (0, 1); got {self.rate}")
        if self.radius <= 1:
            raise ValueError(f"requires radius R > 1; got {self.radius}")
        if self.rate * self.radius <= 1:
            raise ValueError(
                f"requires rate A > 1/R; got A={self.rate}, 1/R={1 / self.radius}"
            )

    def coefficient_cap(self, k: int) -> Fraction:
        return self.scale * self.rate**k / math.factorial(k)


@dataclass(frozen=True, eq=False)
class AnalyticFunction:
    """Taylor-coefficient generator with a certified growth envelope.

    ``coeff`` must be pure (repeated calls return identical Fractions).
    ``degree`` is set for polynomials and None for genuine power series; the
    operator code uses it to truncate exactly.
    """

    coeff: Callable[[int], Fraction]
    envelope: GrowthEnvelope
    label: str
    degree: int | None = None

    def coefficients(self, count: int) -> list[Fraction]:
        return [self.coeff(k) for k in range(count)]

    def taylor_poly(self, order: int) -> RationalPoly:
        """The exact Taylor partial sum through z^order."""
        return RationalPoly(self.coefficients(order + 1))

    def truncation_order(self, z_radius: float, tol: float) -> int:
        """Smallest K whose envelope tail at radius |z| is below tol.

        Uses sum_{k>K} M (A s)^k / k! <= M (A s)^(K+1)/(K+1)! * exp(A s).
        """
        if self.degree is not None:
            return max(self.degree, 0)
        if tol <= 0:
            raise ValueError("tol must be positive")
        scale = float(self.envelope.scale)
        u = float(self.envelope.rate) * float(z_radius)
        factor = scale * math.exp(u)
        term = u  # (A s)^(K+1) / (K+1)! at K = 0
        order = 0
        while factor * term >= tol:
            order += 1
            term *= u / (order + 1)
            if order > 100_000:
                raise TruncationError("Taylor tail did not fall below tol")
        return order

    def __call__(self, z, tol: float = 1e-12):
        """Evaluate by a truncated Taylor sum with envelope-certified tail.

        Accepts a scalar or a numpy array; every point must satisfy
        |z| < radius.
        """
        radius = float(self.envelope.radius)
        if isinstance(z, np.ndarray):
            top = float(np.max(np.abs(z))) if z.size else 0.0
        else:
            z = complex(z)
            top = abs(z)
        if top >= radius:
            raise DomainError(f"requires |z| < R = {radius}; got |z| = {top}")
        order = self.truncation_order(top, tol)
        return self.taylor_poly(order)(z)


@dataclass(frozen=True)
class EnvelopeReport:
    """Outcome of an envelope validation sweep."""

    ok: bool
    first_violation: int | None
    checked_depth: int


def validate_envelope(f: AnalyticFunction, depth: int) -> EnvelopeReport:
    """Check |c_k| <= M A^k / k! exactly for k = 0..depth."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    for k in range(depth + 1):
        if abs(f.coeff(k)) > f.envelope.coefficient_cap(k):
            return EnvelopeReport(ok=False, first_violation=k, checked_depth=depth)
    return EnvelopeReport(ok=True, first_violation=None, checked_depth=depth)


def _default_radius(rate: Fraction) -> Fraction:
    # Big enough that R > 2 always holds and rate > 1/R strictly for any
    # rate in (0, 1), keeping every bound applicable to the built-in set.
    return max(Fraction(4), 2 / rate)


def exponential(a) -> AnalyticFunction:
    """f(z) = exp(a z) for rational 0 < a < 1; the envelope (M=1, A=a) is tight."""
    af = as_fraction(a)
    if not 0 < af < 1:
        raise HypothesisError(f"requires 0 < a < 1 (envelope rate A must be < 1); got a={a}")

    @lru_cache(maxsize=None)
    def coeff(k: int) -> Fraction:
        return af**k / math.factorial(k)

    envelope = GrowthEnvelope(scale=Fraction(1), rate=af, radius=_default_radius(af))
    return AnalyticFunction(coeff=coeff, envelope=envelope, label=f"exp({af}*z)")


def polynomial(coeffs, rate=DEFAULT_POLY_RATE) -> AnalyticFunction:
    """Polynomial with the given coefficients (constant term first).

    The envelope scale is the smallest M valid for the chosen rate:
    M = max_k |c_k| k! / rate^k over nonzero terms (M = 1 for the zero
    polynomial).
    """
    cs = [as_fraction(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    rate_f = as_fraction(rate)
    if not 0 < rate_f < 1:
        raise HypothesisError(f"requires rate A in (0, 1); got {rate}")
    scale = max(
        (abs(c) * math.factorial(k) / rate_f**k for k, c in enumerate(cs) if c != 0),
        default=Fraction(1),
    )
    envelope = GrowthEnvelope(scale=scale, rate=rate_f, radius=_default_radius(rate_f))
    frozen = tuple(cs)

    def coeff(k: int) -> Fraction:
        return frozen[k] if k < len(frozen) else Fraction(0)

    label = "poly(" + ",".join(str(c) for c in frozen) + ")"
    return AnalyticFunction(coeff=coeff, envelope=envelope, label=label, degree=len(frozen) - 1)


def derivative(f: AnalyticFunction, p: int) -> AnalyticFunction:
    """The p-th derivative: coefficients c_{k+p} (k+p)!/k!.

    The envelope (M A^p, A, R) is valid because
    |c_{k+p}| (k+p)!/k! <= M A^(k+p)/k! = (M A^p) A^k / k!.
    """
    if p < 0:
        raise ValueError("p must be >= 0")
    if p == 0:
        return f
    base = f.coeff

    @lru_cache(maxsize=None)
    def coeff(k: int) -> Fraction:
        return base(k + p) * _falling(k + p, p)

    env = f.envelope
    envelope = GrowthEnvelope(
        scale=env.scale * env.rate**p, rate=env.rate, radius=env.radius
    )
    deg = None if f.degree is None else max(f.degree - p, -1)
    return AnalyticFunction(
        coeff=coeff, envelope=envelope, label=f"D^{p}[{f.label}]", degree=deg
    )


def _falling(n: int, p: int) -> int:
    """n (n-1) ... (n-p+1)."""
    out = 1
    for i in range(p):
        out *= n - i
    return out


# -- operator truncation ------------------------------------------------------


def operator_tail_bound(envelope: GrowthEnvelope, r: float, n: int, K: int) -> float:
    """Certified bound for the part of the operator sum beyond index K.

    Majorizes sum_{k>K} M A^k/k! * (r^k + (r+2)(k+1)! r^(k-1)/n): the first
    piece by the exponential tail, the second by the closed form of
    sum_{k>K} (k+1) u^k with u = A r < 1.
    """
    scale = float(envelope.scale)
    u = float(envelope.rate) * float(r)
    if u >= 1.0:
        raise HypothesisError(f"requires r*A < 1; got r*A = {u}")
    exp_tail = scale * _exp_tail(u, K)
    geo = u ** (K + 1) * ((K + 2) - (K + 1) * u) / (1.0 - u) ** 2
    lemma_tail = scale * (float(r) + 2.0) / (float(r) * n) * geo
    return (exp_tail + lemma_tail) * (1.0 + 1e-12)


def _exp_tail(u: float, K: int) -> float:
    """Upper bound for sum_{k>K} u^k / k!, namely u^(K+1)/(K+1)! exp(u)."""
    log_term = (K + 1) * math.log(u) - math.lgamma(K + 2) if u > 0 else -math.inf
    return math.exp(log_term + u) if log_term > -700 else 0.0


def operator_truncation_index(
    envelope: GrowthEnvelope, r: float, n: int, tol: float
) -> int:
    """Smallest K >= 1 with a certified operator tail below tol.

    Requires 1 <= r < 1/A (so A r < 1) and n > r + 2.
    """
    r = float(r)
    if r < 1:
        raise HypothesisError(f"requires r >= 1; got r={r}")
    if float(envelope.rate) * r >= 1.0:
        raise HypothesisError(
            f"requires r < 1/A; got r={r}, 1/A={1 / float(envelope.rate)}"
        )
    if n <= r + 2:
        raise HypothesisError(f"requires n > r + 2; got n={n}, r+2={r + 2}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    K = 1
    while operator_tail_bound(envelope, r, n, K) >= tol:
        K += 1
        if K > 1_000_000:
            raise TruncationError("operator tail did not fall below tol")
    return K


# -- function mini-format -------------------------------------------------------


def parse_function_spec(spec: str) -> AnalyticFunction:
    """Parse ``exp:a=1/2``, ``poly:1,0,3/2`` or ``deriv:p=2:<spec>``.

    Rational values use exact ``p/q`` or integer notation.
    """
    head, _, rest = spec.partition(":")
    if head == "exp":
        if not rest.startswith("a="):
            raise ValueError(f"exp spec must look like exp:a=1/2; got {spec!r}")
        return exponential(Fraction(rest[2:]))
    if head == "poly":
        if not rest:
            raise ValueError(f"poly spec must list coefficients; got {spec!r}")
        return polynomial([Fraction(c) for c in rest.split(",")])
    if head == "deriv":
        order_part, _, inner = rest.partition(":")
        if not order_part.startswith("p=") or not inner:
            raise ValueError(f"deriv spec must look like deriv:p=2:exp:a=1/2; got {spec!r}")
        return derivative(parse_function_spec(inner), int(order_part[2:]))
    raise ValueError(f"unknown function spec {spec!r} (expected exp:, poly: or deriv:)")
