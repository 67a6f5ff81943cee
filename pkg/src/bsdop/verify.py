"""Named verification suites over the standard parameter grids.

Each suite returns one `CaseResult` per grid point, so callers (the command
line front end and the acceptance tests) can report per-case outcomes and
exit nonzero on any failure.  Sup-norm comparisons allow the sampling slack
factor 1 + 1e-6 on the bound side, since the sampled value is a lower
estimate of the true maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import zip_longest

from .moments import (
    basis_identity_holds,
    moment_error_bound,
    moment_poly,
    moment_poly_from_series,
    remainder_recurrence_defect,
    remainder_sup_bound,
    tail_decay_inequality_holds,
    voronovskaja_remainder,
)
from .ratpoly import RationalPoly, SamplingConfig, sup_norm_on_circle

__all__ = [
    "BOUND_SLACK",
    "SUITE_NAMES",
    "CaseResult",
    "basis_identity_suite",
    "lemma_bound_suite",
    "oracle_suite",
    "remainder_suite",
    "run_suite",
    "tail_inequality_suite",
]

BOUND_SLACK = 1.0 + 1e-6

SUITE_NAMES = ("lemma-bound", "remainder", "basis-identity", "oracle", "tail-inequality")


@dataclass(frozen=True)
class CaseResult:
    suite: str
    case: str
    passed: bool
    lhs: str
    rhs: str


def _case(suite: str, case: str, passed: bool, lhs, rhs) -> CaseResult:
    return CaseResult(suite=suite, case=case, passed=passed, lhs=str(lhs), rhs=str(rhs))


def lemma_bound_suite(
    r_values=(1.0, 1.5, 2.0),
    n_max: int = 20,
    k_range: tuple[int, int] = (1, 10),
    sampling: SamplingConfig | None = None,
) -> list[CaseResult]:
    """sup|T(n,k) - e_k| <= (r+2)(k+1)! r^(k-1)/n on each grid point."""
    results = []
    for r in r_values:
        n_lo = math.ceil(r + 3)
        for n in range(n_lo, n_max + 1):
            for k in range(k_range[0], k_range[1] + 1):
                gap = moment_poly(n, k) - RationalPoly.monomial(k)
                measured = sup_norm_on_circle(gap, r, sampling).value
                bound = moment_error_bound(n, k, r)
                results.append(
                    _case(
                        "lemma-bound",
                        f"(n={n}, k={k}, r={r})",
                        measured <= bound * BOUND_SLACK,
                        measured,
                        bound,
                    )
                )
    return results


def remainder_suite(
    n_range: tuple[int, int] = (3, 12),
    k_max: int = 20,
    r_values=(1.0, 1.5, 2.0),
    sampling: SamplingConfig | None = None,
) -> list[CaseResult]:
    """Exact forced recurrence for E(n, k), then its sup-norm bound.

    The recurrence is checked for 2 <= k <= k_max over the whole n range;
    the bound sup|E(n,k)| <= (k-1)(r+1)^k B(k,r)/n^2 additionally needs
    k <= n + 1 and n > r + 2.
    """
    results = []
    for n in range(n_range[0], n_range[1] + 1):
        for k in range(2, k_max + 1):
            defect = remainder_recurrence_defect(n, k, max_k=max(k_max, 64))
            results.append(
                _case(
                    "remainder",
                    f"recurrence (n={n}, k={k})",
                    defect.is_zero(),
                    f"defect degree {defect.degree}",
                    "zero polynomial",
                )
            )
    for r in r_values:
        for n in range(n_range[0], n_range[1] + 1):
            if n <= r + 2:
                continue
            for k in range(2, min(k_max, n + 1) + 1):
                rem = voronovskaja_remainder(n, k, max_k=max(k_max, 64)).remainder
                measured = sup_norm_on_circle(rem, r, sampling).value
                bound = remainder_sup_bound(n, k, r)
                results.append(
                    _case(
                        "remainder",
                        f"bound (n={n}, k={k}, r={r})",
                        measured <= bound * BOUND_SLACK,
                        measured,
                        bound,
                    )
                )
    return results


def basis_identity_suite(n_max: int = 10, v_max: int = 10) -> list[CaseResult]:
    """z(1+z) b' = (v - n z) b as exact polynomial identity on the grid."""
    return [
        _case(
            "basis-identity",
            f"(n={n}, v={v})",
            basis_identity_holds(n, v),
            "identity",
            "holds",
        )
        for n in range(1, n_max + 1)
        for v in range(1, v_max + 1)
    ]


def oracle_suite(
    n_range: tuple[int, int] = (3, 10), k_range: tuple[int, int] = (0, 8)
) -> list[CaseResult]:
    """Recurrence output against the series-plus-interpolation rebuild.

    Where the rebuild certifies exactness the comparison is exact rational
    equality; otherwise coefficients must agree within the certified error
    (at most 1e-30).
    """
    results = []
    for n in range(n_range[0], n_range[1] + 1):
        for k in range(k_range[0], k_range[1] + 1):
            expected = moment_poly(n, k)
            rebuilt = moment_poly_from_series(n, k)
            if rebuilt.exact:
                ok = rebuilt.poly == expected
                lhs = "exact rebuild"
                rhs = "equal" if ok else "DIFFERS"
            else:
                worst = max(
                    (
                        abs(float(a - b))
                        for a, b in zip_longest(
                            rebuilt.poly.coeffs, expected.coeffs, fillvalue=Fraction(0)
                        )
                    ),
                    default=0.0,
                )
                ok = worst <= max(rebuilt.max_error, 1e-30)
                lhs = f"max coeff gap {worst:.3g}"
                rhs = f"tolerance {max(rebuilt.max_error, 1e-30):.3g}"
            results.append(_case("oracle", f"(n={n}, k={k})", ok, lhs, rhs))
    return results


def tail_inequality_suite(
    rho_values=(0.1, 0.5, 0.9), n_max: int = 200
) -> list[CaseResult]:
    """rho^n <= 2/(n^2 ln^2(1/rho)) over the grid."""
    return [
        _case(
            "tail-inequality",
            f"(rho={rho}, n={n})",
            tail_decay_inequality_holds(rho, n),
            f"{rho}^{n}",
            "2/(n^2 ln^2(1/rho))",
        )
        for rho in rho_values
        for n in range(1, n_max + 1)
    ]


def run_suite(name: str, **overrides) -> list[CaseResult]:
    """Run one named suite (or all of them) with optional grid overrides."""
    suites = {
        "lemma-bound": lemma_bound_suite,
        "remainder": remainder_suite,
        "basis-identity": basis_identity_suite,
        "oracle": oracle_suite,
        "tail-inequality": tail_inequality_suite,
    }
    if name == "all":
        results = []
        for fn in suites.values():
            results.extend(fn())
        return results
    if name not in suites:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)} or all")
    return suites[name](**overrides)
