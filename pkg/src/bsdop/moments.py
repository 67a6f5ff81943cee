"""Moment polynomials of the Baskakov-Szasz-Durrmeyer operator family.

The operator acts on a monomial e_k(z) = z^k through the basis weights

    b(n, v)(z) = C(n+v-1, v) * z^v / (1+z)^(n+v)      (discrete part)
    s(n, j)(t) = exp(-n t) * (n t)^j / j!             (integral part)

and its k-th moment T(n, k) = image of e_k is a degree-k polynomial.  Two
independent constructions are provided:

* ``moment_table`` runs the first-order recurrence
      T(n, k+1) = z(1+z)/n * T(n, k)' + (n z + k)/n * T(n, k),
  seeded with T(n, 0) = 1, entirely in exact rational arithmetic;
* ``moment_poly_from_series`` rebuilds T(n, k) without the recurrence, by
  summing the basis series against the closed-form moment integrals at k+1
  rational abscissae (with a certified geometric tail bound) and solving the
  exact Vandermonde system for the coefficients.

The module also builds the second-order remainder polynomials

    E(n, k) = T(n, k) - e_k - k(k-1)(z+2) z^(k-1) / (2n)

with their closed-form forcing term, and evaluates the explicit constants
used by the error bounds (see ``moment_error_bound``,
``remainder_bound_coefficient``, ``remainder_sup_bound``).
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConditioningError, HypothesisError, TruncationError
from .ratpoly import RationalPoly, as_fraction

__all__ = [
    "DEFAULT_MAX_K",
    "BasisFunction",
    "MomentTable",
    "OracleConfig",
    "OracleResult",
    "VoronovskajaRemainder",
    "basis_identity_holds",
    "clear_table_cache",
    "moment_error_bound",
    "moment_integral",
    "moment_poly",
    "moment_poly_from_series",
    "moment_table",
    "remainder_bound_coefficient",
    "remainder_recurrence_defect",
    "remainder_sup_bound",
    "tail_decay_inequality_holds",
    "voronovskaja_remainder",
]

# Moments above this index are useless at double precision: the error bounds
# carry a (k+1)! factor.  Callers that really need more pass max_k explicitly.
DEFAULT_MAX_K = 64

_Z = RationalPoly.monomial(1)
_Z_TIMES_1PLUSZ = RationalPoly((0, 1, 1))  # z(1+z)


def _rising(v: int, k: int) -> int:
    """v (v+1) ... (v+k-1), the empty product for k = 0."""
    out = 1
    for i in range(k):
        out *= v + i
    return out


def moment_integral(n: int, v: int, k: int) -> Fraction:
    """Exact value of the k-th moment integral against the weight s(n, v-1).

    integral_0^oo exp(-n t) (n t)^(v-1)/(v-1)! * t^k dt
        = (v+k-1)! / ((v-1)! n^(k+1)).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if v < 1:
        raise ValueError("v must be >= 1 (the weight index starts at 1)")
    if k < 0:
        raise ValueError("k must be >= 0")
    return Fraction(_rising(v, k), n ** (k + 1))


@dataclass(frozen=True)
class BasisFunction:
    """The weight b(n, v)(z) = C(n+v-1, v) z^v / (1+z)^(n+v)."""

    n: int
    v: int

    def __post_init__(self):
        if self.n < 1 or self.v < 1:
            raise ValueError("n and v must be >= 1")

    @property
    def numerator(self) -> RationalPoly:
        return RationalPoly.monomial(self.v, math.comb(self.n + self.v - 1, self.v))

    @property
    def denominator_exponent(self) -> int:
        return self.n + self.v

    def value_at(self, x) -> Fraction:
        """Exact value at a rational point x > -1."""
        xf = as_fraction(x)
        return self.numerator.eval_exact(xf) / (1 + xf) ** self.denominator_exponent


def basis_identity_holds(n: int, v: int) -> bool:
    """Check z(1+z) b' = (v - n z) b as an exact polynomial identity.

    Writing b = P / (1+z)^(n+v) with P = C(n+v-1, v) z^v, the identity is
    equivalent to z(1+z)[P'(1+z) - (n+v)P] = (v - n z) P (1+z).
    """
    p = BasisFunction(n, v).numerator
    one_plus_z = RationalPoly((1, 1))
    lhs = _Z_TIMES_1PLUSZ * (p.derivative() * one_plus_z - (n + v) * p)
    rhs = RationalPoly((v, -n)) * p * one_plus_z
    return lhs == rhs


class MomentTable:
    """The memoized family T(n, 0..K) for one operator index n.

    Entries are appended only, never rewritten, so an entry obtained from the
    table may be shared freely across threads.
    """

    def __init__(self, n: int):
        if not isinstance(n, int) or n < 1:
            raise ValueError("n must be a positive integer")
        self.n = n
        self._polys: list[RationalPoly] = [RationalPoly.one()]
        self._lock = threading.Lock()

    @property
    def K(self) -> int:
        """Largest moment index generated so far."""
        return len(self._polys) - 1

    def ensure(self, K: int) -> None:
        """Grow the table so that T(n, K) is available."""
        if K < 0:
            raise ValueError("K must be >= 0")
        with self._lock:
            n = self.n
            while len(self._polys) <= K:
                k = len(self._polys) - 1
                t = self._polys[-1]
                nxt = (
                    _Z_TIMES_1PLUSZ * t.derivative() + RationalPoly((k, n)) * t
                ).scale(Fraction(1, n))
                self._polys.append(nxt)

    def poly(self, k: int) -> RationalPoly:
        self.ensure(k)
        return self._polys[k]

    __getitem__ = poly

    def polys(self, K: int) -> tuple[RationalPoly, ...]:
        """The entries T(n, 0..K)."""
        self.ensure(K)
        return tuple(self._polys[: K + 1])

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "polys": [
                [
                    [power, f"{c.numerator}/{c.denominator}"]
                    for power, c in enumerate(poly.coeffs)
                    if c != 0
                ]
                for poly in self._polys
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> MomentTable:
        data = json.loads(text)
        table = cls(int(data["n"]))
        polys = []
        for entries in data["polys"]:
            coeffs: dict[int, Fraction] = {int(p): Fraction(c) for p, c in entries}
            top = max(coeffs) if coeffs else -1
            polys.append(RationalPoly(coeffs.get(i, 0) for i in range(top + 1)))
        if not polys or polys[0] != RationalPoly.one():
            raise ValueError("table must start with T(n, 0) = 1")
        table._polys = polys
        return table


_TABLE_CACHE: dict[int, MomentTable] = {}
_TABLE_CACHE_LOCK = threading.Lock()


def clear_table_cache() -> None:
    with _TABLE_CACHE_LOCK:
        _TABLE_CACHE.clear()


def moment_table(n: int, K: int, max_k: int | None = None) -> MomentTable:
    """Memoized table of T(n, 0..K); distinct n values are independent.

    K is capped at ``DEFAULT_MAX_K`` unless ``max_k`` raises the cap.
    """
    cap = DEFAULT_MAX_K if max_k is None else max_k
    if K > cap:
        raise ValueError(
            f"K={K} exceeds the cap {cap}; pass max_k to raise it deliberately"
        )
    with _TABLE_CACHE_LOCK:
        table = _TABLE_CACHE.setdefault(n, MomentTable(n))
    table.ensure(K)
    return table


def moment_poly(n: int, k: int, max_k: int | None = None) -> RationalPoly:
    """T(n, k) from the recurrence, exact."""
    return moment_table(n, k, max_k=max_k).poly(k)


# -- independent reconstruction ---------------------------------------------


@dataclass(frozen=True)
class OracleConfig:
    """Controls for the series-plus-interpolation reconstruction."""

    abscissa_offset: Fraction = Fraction(1)
    abscissa_step: Fraction = Fraction(1, 7)
    max_terms: int = 500_000
    coeff_target: Fraction = Fraction(1, 10**32)
    ratio_threshold: Fraction = Fraction(9, 10)


@dataclass(frozen=True)
class OracleResult:
    """Reconstructed moment polynomial with its certificate.

    When ``exact`` is true the coefficients are certified to be the true
    rationals; otherwise they are rationals within ``max_error`` of the true
    coefficients (in absolute value, coefficientwise).
    """

    poly: RationalPoly
    exact: bool
    max_error: float
    terms_used: int
    condition: float


def _series_partial(
    n: int, k: int, x: Fraction, tail_target: Fraction, config: OracleConfig
) -> tuple[Fraction, Fraction, int]:
    """Exact partial sum of n * sum_v b(n, v)(x) m(n, v, k) with tail bound.

    The ratio of consecutive terms,

        ratio(v) = x (n+v) (v+k) / ((1+x) (v+1) v),

    decreases monotonically toward x/(1+x) < 1, so once ratio(v+1) < 1 the
    tail after term v is at most term(v+1) / (1 - ratio(v+1)).  Terms are
    accumulated until that bound drops below ``tail_target``; the threshold
    ratio 9/10 avoids stopping in the slowly-contracting regime.
    """
    xr = x / (1 + x)

    def ratio(v: int) -> Fraction:
        return xr * (n + v) * (v + k) / ((v + 1) * v)

    # term at v=1: n * b(n,1)(x) * m(n,1,k) = n^2 x k! / ((1+x)^(n+1) n^(k+1))
    term = Fraction(n * n * math.factorial(k), n ** (k + 1)) * x / (1 + x) ** (n + 1)
    total = term
    v = 1
    while True:
        if v >= config.max_terms:
            raise TruncationError(
                f"series tail below {float(tail_target):.3g} not reached "
                f"within {config.max_terms} terms (n={n}, k={k}, x={x})"
            )
        next_term = term * ratio(v)
        ratio_next = ratio(v + 1)
        if ratio_next < config.ratio_threshold:
            bound = next_term / (1 - ratio_next)
            if bound <= tail_target:
                return total, bound, v
        total += next_term
        term = next_term
        v += 1


def _invert_exact(matrix: list[list[Fraction]]) -> list[list[Fraction]]:
    """Exact inverse by Gauss-Jordan elimination with partial pivoting."""
    size = len(matrix)
    work = [row[:] + [Fraction(int(i == j)) for j in range(size)] for i, row in enumerate(matrix)]
    for col in range(size):
        pivot = max(range(col, size), key=lambda i: abs(work[i][col]))
        if work[pivot][col] == 0:
            raise ConditioningError("interpolation matrix is singular")
        work[col], work[pivot] = work[pivot], work[col]
        inv = 1 / work[col][col]
        work[col] = [c * inv for c in work[col]]
        for i in range(size):
            if i != col and work[i][col] != 0:
                factor = work[i][col]
                work[i] = [a - factor * b for a, b in zip(work[i], work[col])]
    return [row[size:] for row in work]


def moment_poly_from_series(
    n: int, k: int, config: OracleConfig | None = None
) -> OracleResult:
    """Rebuild T(n, k) without the recurrence.

    For k >= 1 the basis series is summed exactly at the k+1 abscissae
    x_j = offset + j*step, each truncated with a certified geometric tail
    bound tau, and the (k+1)x(k+1) Vandermonde system is solved exactly over
    the rationals.  The coefficient error is then at most
    ``norm_inf(V^-1) * tau``; choosing tau small enough against the known
    denominator bound n^k k! lets each coefficient be rounded to the unique
    nearby rational on that denominator grid, which certifies exactness.

    For k = 0 the series plus the (1+z)^(-n) boundary term telescopes to the
    constant 1, which is returned directly.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    cfg = config or OracleConfig()
    if k == 0:
        return OracleResult(RationalPoly.one(), exact=True, max_error=0.0, terms_used=0, condition=1.0)

    xs = [cfg.abscissa_offset + j * cfg.abscissa_step for j in range(k + 1)]
    if len(set(xs)) != len(xs):
        raise ValueError("abscissae must be distinct")
    vandermonde = [[x**i for i in range(k + 1)] for x in xs]
    inverse = _invert_exact(vandermonde)
    norm = max(sum(abs(c) for c in row) for row in inverse)

    denominator_bound = n**k * math.factorial(k)
    target = min(cfg.coeff_target, Fraction(1, 4 * denominator_bound))
    exact_certified = True
    tau = target / norm
    sums: list[Fraction] = []
    worst_tail = Fraction(0)
    terms_used = 0
    try:
        for x in xs:
            total, tail, used = _series_partial(n, k, x, tau, cfg)
            sums.append(total)
            worst_tail = max(worst_tail, tail)
            terms_used = max(terms_used, used)
    except TruncationError:
        # The exactness target was too ambitious for the budget; retry at the
        # plain accuracy target, giving certified-approximate coefficients.
        if cfg.coeff_target <= target:
            raise
        exact_certified = False
        tau = cfg.coeff_target / norm
        sums, worst_tail, terms_used = [], Fraction(0), 0
        for x in xs:
            total, tail, used = _series_partial(n, k, x, tau, cfg)
            sums.append(total)
            worst_tail = max(worst_tail, tail)
            terms_used = max(terms_used, used)

    solved = [sum(row[j] * sums[j] for j in range(k + 1)) for row in inverse]
    coeff_error = norm * worst_tail

    if exact_certified:
        # True coefficients lie on the 1/denominator_bound grid and within
        # coeff_error < half a grid step of the solved values.
        coeffs = []
        for value in solved:
            candidate = Fraction(round(value * denominator_bound), denominator_bound)
            if abs(candidate - value) > coeff_error:
                raise ConditioningError(
                    f"rounded coefficient drifted beyond the certificate (n={n}, k={k})"
                )
            coeffs.append(candidate)
        return OracleResult(
            RationalPoly(coeffs),
            exact=True,
            max_error=0.0,
            terms_used=terms_used,
            condition=float(norm),
        )
    if coeff_error > Fraction(1, 10**30):
        raise ConditioningError(
            f"certified coefficient error {float(coeff_error):.3g} exceeds 1e-30 (n={n}, k={k})"
        )
    return OracleResult(
        RationalPoly(solved),
        exact=False,
        max_error=float(coeff_error),
        terms_used=terms_used,
        condition=float(norm),
    )


# -- second-order remainders --------------------------------------------------


@dataclass(frozen=True)
class VoronovskajaRemainder:
    """The remainder E(n, k) and its closed-form forcing term X(n, k).

    E(n, k) = T(n, k) - e_k - k(k-1)(z+2) z^(k-1) / (2n) measures what is
    left of the moment error after subtracting the second-order term; it
    obeys the forced recurrence

        E(n, k) = z(1+z)/n E(n, k-1)' + (n z + k - 1)/n E(n, k-1) + X(n, k)

    with E(n, 0) = E(n, 1) = 0 and, for k >= 2,

        X(n, k) = z^(k-2)/(2 n^2) [ (k-1)^2 (k-2) z^2
                                    + 2 (k-1)(k-2)(2k-3) z
                                    + 2 (k-1)(k-2)(2k-3) ].
    """

    n: int
    k: int
    remainder: RationalPoly
    forcing: RationalPoly


def voronovskaja_remainder(n: int, k: int, max_k: int | None = None) -> VoronovskajaRemainder:
    """Build E(n, k) from its definition and X(n, k) from the closed form."""
    if k < 0:
        raise ValueError("k must be >= 0")
    t = moment_poly(n, k, max_k=max_k)
    e = RationalPoly.monomial(k)
    if k >= 2:
        second_order = RationalPoly((2, 1)) * RationalPoly.monomial(
            k - 1, Fraction(k * (k - 1), 2 * n)
        )
        remainder = t - e - second_order
        a = (k - 1) ** 2 * (k - 2)
        b = 2 * (k - 1) * (k - 2) * (2 * k - 3)
        forcing = RationalPoly.monomial(k - 2, Fraction(1, 2 * n * n)) * RationalPoly((b, b, a))
    else:
        remainder = t - e
        forcing = RationalPoly.zero()
    return VoronovskajaRemainder(n=n, k=k, remainder=remainder, forcing=forcing)


def remainder_recurrence_defect(n: int, k: int, max_k: int | None = None) -> RationalPoly:
    """E(n, k) minus the forced-recurrence right side; zero iff it holds exactly."""
    if k < 1:
        raise ValueError("the recurrence starts at k = 1")
    current = voronovskaja_remainder(n, k, max_k=max_k)
    prev = voronovskaja_remainder(n, k - 1, max_k=max_k).remainder
    rhs = (
        (_Z_TIMES_1PLUSZ * prev.derivative() + RationalPoly((k - 1, n)) * prev).scale(
            Fraction(1, n)
        )
        + current.forcing
    )
    return current.remainder - rhs


# -- explicit bound constants --------------------------------------------------


def moment_error_bound(n: int, k: int, r) -> float:
    """Upper bound (r+2) (k+1)! r^(k-1) / n for the sup norm of T(n, k) - e_k
    on |z| <= r, valid for r >= 1 and n > r + 2."""
    rf = as_fraction(r)
    if k < 1:
        raise ValueError("k must be >= 1")
    if rf < 1:
        raise HypothesisError(f"requires r >= 1; got r={r}")
    if n <= rf + 2:
        raise HypothesisError(f"requires n > r + 2; got n={n}, r+2={float(rf) + 2}")
    return float((rf + 2) * math.factorial(k + 1) * rf ** (k - 1) / n)


def remainder_bound_coefficient(k: int, r) -> Fraction:
    """The growth coefficient

    B(k, r) = (k-1)^2 (k-2) r^2 + 2 (k-1)(k-2)(2k-3)(r+1) + (r+1)(r+2)(k+1)!
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    rf = as_fraction(r)
    return (
        (k - 1) ** 2 * (k - 2) * rf**2
        + 2 * (k - 1) * (k - 2) * (2 * k - 3) * (rf + 1)
        + (rf + 1) * (rf + 2) * math.factorial(k + 1)
    )


def remainder_sup_bound(n: int, k: int, r) -> float:
    """Upper bound (k-1) (r+1)^k B(k, r) / n^2 for the sup norm of E(n, k)
    on |z| <= r, valid for k <= n + 1 and n > r + 2."""
    rf = as_fraction(r)
    if n <= rf + 2:
        raise HypothesisError(f"requires n > r + 2; got n={n}, r+2={float(rf) + 2}")
    if k > n + 1:
        raise HypothesisError(f"requires k <= n + 1; got k={k}, n={n}")
    return float((k - 1) * (rf + 1) ** k * remainder_bound_coefficient(k, rf) / n**2)


def tail_decay_inequality_holds(rho: float, n: int) -> bool:
    """Check rho^n <= 2 / (n^2 ln^2(1/rho)) for 0 < rho < 1."""
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    return rho**n <= 2.0 / (n**2 * math.log(1.0 / rho) ** 2)
