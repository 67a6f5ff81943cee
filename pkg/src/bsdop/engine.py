"""Applying the truncated operator and measuring its approximation quality.

The operator sends f(z) = sum c_k z^k to sum c_k T(n, k)(z).  For built-in
functions the coefficients are exact rationals, so the truncated image and
every error polynomial below are exact `RationalPoly` values; floating point
enters only at circle sampling.

Reported errors are upper-faithful: the sampled sup norm (a lower estimate
of the true maximum) is increased by the certified truncation tail, so a
"bound satisfied" verdict can never be an artifact of truncating the series
too early.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .analytic import (
    AnalyticFunction,
    derivative,
    operator_tail_bound,
    operator_truncation_index,
    validate_envelope,
)
from .errors import DegenerateFunctionError, HypothesisError, TruncationError
from .moments import moment_table, remainder_bound_coefficient, voronovskaja_remainder
from .ratpoly import RationalPoly, SamplingConfig, as_fraction, sup_norm_on_circle

__all__ = [
    "ConvergenceRow",
    "ConvergenceTable",
    "DerivativeRow",
    "OperatorResult",
    "OrderFit",
    "ResidualRow",
    "StudyOptions",
    "TableMeta",
    "apply_operator",
    "approximation_error",
    "asymptotic_ratio",
    "convergence_study",
    "derivative_approximation_error",
    "derivative_study",
    "estimate_order",
    "upper_bound_constant",
    "voronovskaja_bound_constant",
    "voronovskaja_residual",
    "voronovskaja_study",
]

ENVELOPE_CHECK_DEPTH = 200
# Truncation tolerance as a fraction of the expected error scale.
TRUNCATION_SAFETY = 1e-14


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise HypothesisError(message)


def _check_function(f: AnalyticFunction, n: int, r: float) -> None:
    report = validate_envelope(f, ENVELOPE_CHECK_DEPTH)
    if not report.ok:
        raise HypothesisError(
            f"envelope |c_k| <= M A^k/k! fails at k={report.first_violation} for {f.label}"
        )
    _require(r >= 1, f"requires r >= 1; got r={r}")
    _require(n > r + 2, f"requires n > r + 2; got n={n}, r+2={r + 2}")
    _require(
        float(f.envelope.rate) * r < 1,
        f"requires r*A < 1; got r*A = {float(f.envelope.rate) * r}",
    )


@dataclass(frozen=True)
class OperatorResult:
    """Truncated operator image with its truncation certificate.

    ``poly`` is sum_{k<=order} c_k T(n, k); ``error_poly`` is the same sum
    with e_k subtracted from each T(n, k), i.e. the computable part of the
    approximation error.  ``tail`` bounds everything omitted beyond
    ``order`` on |z| <= radius (0 for polynomial inputs, whose sum is
    finite and exact).
    """

    n: int
    order: int
    poly: RationalPoly
    error_poly: RationalPoly
    tail: float
    radius: float


def apply_operator(
    f: AnalyticFunction, n: int, r: float = 1.0, tol: float | None = None
) -> OperatorResult:
    """Image of f under the degree-truncated operator, exact in rationals."""
    _check_function(f, n, r)
    if f.degree is not None:
        order, tail = max(f.degree, 0), 0.0
    else:
        if tol is None:
            tol = TRUNCATION_SAFETY * upper_bound_constant(
                f.envelope.scale, f.envelope.rate, r
            ) / n
        order = operator_truncation_index(f.envelope, r, n, tol)
        tail = operator_tail_bound(f.envelope, r, n, order)
    table = moment_table(n, order, max_k=order)
    coeffs = f.coefficients(order + 1)
    image = RationalPoly.zero()
    gap = RationalPoly.zero()
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        t = table.poly(k)
        image = image + t * c
        gap = gap + (t - RationalPoly.monomial(k)) * c
    return OperatorResult(n=n, order=order, poly=image, error_poly=gap, tail=tail, radius=r)


def approximation_error(
    f: AnalyticFunction,
    n: int,
    r: float = 1.0,
    tol: float | None = None,
    sampling: SamplingConfig | None = None,
) -> float:
    """Sup norm of (operator image - f) on |z| <= r, tail included."""
    result = apply_operator(f, n, r, tol)
    measured = sup_norm_on_circle(result.error_poly, r, sampling).value
    return measured + result.tail


# -- second-order residual ----------------------------------------------------


def _residual_tail_bound(envelope, r: float, n: int, K: int) -> float:
    """Bound for sum_{k>K} |c_k| |E(n, k)| on |z| <= r.

    Per term: |T - e_k| <= (r+2)(k+1)! r^(k-1)/n and the subtracted
    second-order term is at most k(k-1)(r+2) r^(k-1)/(2n); with
    |c_k| <= M A^k/k! and u = A r this sums to

        M(r+2)/(r n) * sum_{k>K} (k+1) u^k                (closed form)
      + M(r+2)/(2 r n) * sum_{k>K} u^k/(k-2)!             (exponential tail).
    """
    scale = float(envelope.scale)
    u = float(envelope.rate) * float(r)
    if u >= 1.0:
        raise HypothesisError(f"requires r*A < 1; got r*A = {u}")
    geo = u ** (K + 1) * ((K + 2) - (K + 1) * u) / (1.0 - u) ** 2
    m0 = max(K - 1, 0)
    log_term = m0 * math.log(u) - math.lgamma(m0 + 1) if u > 0 else -math.inf
    exp_tail = u * u * (math.exp(log_term + u) if log_term > -700 else 0.0)
    rr = float(r)
    return (scale * (rr + 2) / (rr * n) * (geo + 0.5 * exp_tail)) * (1.0 + 1e-12)


def voronovskaja_residual(
    f: AnalyticFunction,
    n: int,
    r: float = 1.0,
    tol: float | None = None,
    sampling: SamplingConfig | None = None,
) -> float:
    """Sup norm of (operator image - f - z(z+2) f''/(2n)) on |z| <= r.

    Requires A(r+1) < 1 and disk radius R > 2 on top of the usual
    hypotheses.  The residual equals sum_k c_k E(n, k), which is summed
    exactly through the truncation order; the omitted part is covered by a
    certified tail added to the sampled value.
    """
    _check_function(f, n, r)
    rate = float(f.envelope.rate)
    _require(
        rate * (r + 1) < 1,
        f"requires A*(r+1) < 1; got A*(r+1) = {rate * (r + 1)}",
    )
    _require(
        float(f.envelope.radius) > 2,
        f"requires disk radius R > 2; got R = {float(f.envelope.radius)}",
    )
    if f.degree is not None:
        order, tail = max(f.degree, 0), 0.0
    else:
        if tol is None:
            tol = TRUNCATION_SAFETY * voronovskaja_bound_constant(
                f.envelope.scale, f.envelope.rate, r
            ) / n**2
        order = 2
        while _residual_tail_bound(f.envelope, r, n, order) >= tol:
            order += 1
            if order > 1_000_000:
                raise TruncationError("residual tail did not fall below tol")
        tail = _residual_tail_bound(f.envelope, r, n, order)
    residual = RationalPoly.zero()
    for k in range(2, order + 1):
        c = f.coeff(k)
        if c == 0:
            continue
        residual = residual + voronovskaja_remainder(n, k, max_k=order).remainder * c
    measured = sup_norm_on_circle(residual, r, sampling).value
    return measured + tail


def derivative_approximation_error(
    f: AnalyticFunction,
    n: int,
    p: int,
    r: float = 1.0,
    r1: float = 1.5,
    tol: float | None = None,
    sampling: SamplingConfig | None = None,
) -> float:
    """Sup norm on |z| <= r of the p-th derivative of (operator image - f).

    Requires 1 <= r < r1 < 1/A; the truncation tail transfers from the
    circle of radius r1 through the Cauchy integral formula, contributing a
    factor p! r1 / (r1 - r)^(p+1).
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if not r < r1:
        raise ValueError(f"requires r < r1; got r={r}, r1={r1}")
    _check_function(f, n, r)
    rate = float(f.envelope.rate)
    _require(rate * r1 < 1, f"requires r1 < 1/A; got r1={r1}, 1/A={1 / rate}")
    cauchy = math.factorial(p) * r1 / (r1 - r) ** (p + 1)
    if f.degree is not None:
        order, tail = max(f.degree, 0), 0.0
    else:
        if tol is None:
            bound = cauchy * upper_bound_constant(f.envelope.scale, f.envelope.rate, r1) / n
            tol = TRUNCATION_SAFETY * bound
        order = 1
        while cauchy * _lemma_tail(f.envelope, r1, n, order) >= tol:
            order += 1
            if order > 1_000_000:
                raise TruncationError("derivative tail did not fall below tol")
        tail = cauchy * _lemma_tail(f.envelope, r1, n, order)
    table = moment_table(n, order, max_k=order)
    gap = RationalPoly.zero()
    for k in range(order + 1):
        c = f.coeff(k)
        if c == 0:
            continue
        gap = gap + (table.poly(k) - RationalPoly.monomial(k)) * c
    measured = sup_norm_on_circle(gap.derivative(p), r, sampling).value
    return measured + tail


def _lemma_tail(envelope, rr: float, n: int, K: int) -> float:
    """Bound for sum_{k>K} |c_k| * sup |T(n,k) - e_k| on |z| <= rr."""
    scale = float(envelope.scale)
    u = float(envelope.rate) * float(rr)
    if u >= 1.0:
        raise HypothesisError(f"requires r*A < 1; got r*A = {u}")
    geo = u ** (K + 1) * ((K + 2) - (K + 1) * u) / (1.0 - u) ** 2
    return scale * (rr + 2) / (rr * n) * geo * (1.0 + 1e-12)


# -- explicit constants ---------------------------------------------------------


def upper_bound_constant(scale, rate, r) -> float:
    """The first-order bound constant M (r+2)/r * sum_{k>=2} (k+1)(rA)^k.

    With u = r A < 1 the series is 1/(1-u)^2 - 1 - 2u in closed form.
    """
    u = float(rate) * float(r)
    if u >= 1.0:
        raise HypothesisError(f"requires r*A < 1; got r*A = {u}")
    series = 1.0 / (1.0 - u) ** 2 - 1.0 - 2.0 * u
    return float(scale) * (float(r) + 2.0) / float(r) * series


def _c2_series_term(scale, rate, r, k: int) -> Fraction:
    """Term k of the second-order constant's series: M (k-1)/k! w^k B(k, r)."""
    w = as_fraction(rate) * (as_fraction(r) + 1)
    return (
        as_fraction(scale)
        * Fraction(k - 1, math.factorial(k))
        * w**k
        * remainder_bound_coefficient(k, r)
    )


def voronovskaja_bound_constant(scale, rate, r) -> float:
    """The second-order bound constant

        M sum_{k>=2} (k-1)/k! [A(r+1)]^k B(k, r)
      + 4 M (r+2)/r * 1/ln^2(1/(A r)) * (1/(1-Ar)^2 + 4/(1-Ar)),

    requiring A(r+1) < 1.  The series has no closed form; it is summed
    exactly until a geometric majorant certifies the tail below 1e-15 of
    the partial sum.  The logarithm uses A r, the value with which the
    decay inequality is applied.
    """
    scale_f = as_fraction(scale)
    rate_f = as_fraction(rate)
    r_f = as_fraction(r)
    w = rate_f * (r_f + 1)
    if w >= 1:
        raise HypothesisError(f"requires A*(r+1) < 1; got A*(r+1) = {float(w)}")
    # B(k, r) <= (k+1)! beta, majorizing each term by M (k-1)(k+1) beta w^k.
    beta = r_f**2 + (r_f + 1) + (r_f + 1) * (r_f + 2)
    partial = Fraction(0)
    k = 2
    while True:
        partial += _c2_series_term(scale_f, rate_f, r_f, k)
        nxt = k + 1
        majorant = scale_f * (nxt - 1) * (nxt + 1) * beta * w**nxt
        q = w * Fraction(nxt * (nxt + 2), (nxt - 1) * (nxt + 1))
        if q < 1:
            tail = majorant / (1 - q)
            if tail < Fraction(1, 10**15) * partial:
                break
        k = nxt
        if k > 100_000:
            raise TruncationError("second-order constant series did not converge")
    u = float(rate_f) * float(r_f)
    log_part = 1.0 / math.log(1.0 / u) ** 2
    second = (
        4.0
        * float(scale_f)
        * (float(r_f) + 2.0)
        / float(r_f)
        * log_part
        * (1.0 / (1.0 - u) ** 2 + 4.0 / (1.0 - u))
    )
    return float(partial) + second


# -- experiment tables -----------------------------------------------------------


@dataclass(frozen=True)
class StudyOptions:
    truncation_tol: float | None = None
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    threads: int = 1


@dataclass(frozen=True)
class TableMeta:
    function: str
    r: float
    rate: float
    scale: float
    radius: float
    truncation_tol: float | None
    sampling_initial: int
    sampling_rel_tol: float
    residual_rho: str = "A*r"


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    sup_error: float
    n_error: float
    resid: float
    n2_resid: float
    bound_thm1: float
    bound_thm2: float
    K: int


@dataclass(frozen=True)
class ConvergenceTable:
    meta: TableMeta
    rows: tuple[ConvergenceRow, ...]

    CSV_HEADER = "n,sup_error,n_error,resid,n2_resid,bound_thm1,bound_thm2,K"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for row in self.rows:
            lines.append(
                ",".join(
                    [
                        str(row.n),
                        _fmt(row.sup_error),
                        _fmt(row.n_error),
                        _fmt(row.resid),
                        _fmt(row.n2_resid),
                        _fmt(row.bound_thm1),
                        _fmt(row.bound_thm2),
                        str(row.K),
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "meta": {
                "function": self.meta.function,
                "r": self.meta.r,
                "rate_A": self.meta.rate,
                "scale_M": self.meta.scale,
                "radius_R": self.meta.radius,
                "truncation_tol": self.meta.truncation_tol,
                "sampling_initial": self.meta.sampling_initial,
                "sampling_rel_tol": self.meta.sampling_rel_tol,
                "residual_rho": self.meta.residual_rho,
            },
            "columns": self.CSV_HEADER.split(","),
            "rows": [
                [
                    row.n,
                    row.sup_error,
                    row.n_error,
                    row.resid,
                    row.n2_resid,
                    row.bound_thm1,
                    row.bound_thm2,
                    row.K,
                ]
                for row in self.rows
            ],
        }


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def convergence_study(
    f: AnalyticFunction,
    r: float,
    n_list: list[int],
    options: StudyOptions | None = None,
) -> ConvergenceTable:
    """Per-n error and residual measurements with their theoretical bounds.

    Rows are sorted by n.  Residual columns are NaN when the second-order
    hypothesis A(r+1) < 1 (or R > 2) does not hold; everything else is still
    measured.  Rows may be computed in parallel; assembly is deterministic.
    """
    opts = options or StudyOptions()
    ns = sorted(set(int(n) for n in n_list))
    for n in ns:
        _require(n > r + 2, f"requires n > r + 2 for every n; got n={n}, r+2={r + 2}")
    env = f.envelope
    c1 = upper_bound_constant(env.scale, env.rate, r)
    residual_ok = float(env.rate) * (r + 1) < 1 and float(env.radius) > 2
    c2 = voronovskaja_bound_constant(env.scale, env.rate, r) if residual_ok else math.nan

    def row(n: int) -> ConvergenceRow:
        result = apply_operator(f, n, r, opts.truncation_tol)
        err = sup_norm_on_circle(result.error_poly, r, opts.sampling).value + result.tail
        if residual_ok:
            resid = voronovskaja_residual(f, n, r, opts.truncation_tol, opts.sampling)
        else:
            resid = math.nan
        return ConvergenceRow(
            n=n,
            sup_error=err,
            n_error=n * err,
            resid=resid,
            n2_resid=n * n * resid,
            bound_thm1=c1 / n,
            bound_thm2=c2 / (n * n),
            K=result.order,
        )

    if opts.threads > 1:
        with ThreadPoolExecutor(max_workers=opts.threads) as pool:
            rows = tuple(pool.map(row, ns))
    else:
        rows = tuple(row(n) for n in ns)
    meta = TableMeta(
        function=f.label,
        r=float(r),
        rate=float(env.rate),
        scale=float(env.scale),
        radius=float(env.radius),
        truncation_tol=opts.truncation_tol,
        sampling_initial=opts.sampling.initial_samples,
        sampling_rel_tol=opts.sampling.rel_tol,
    )
    return ConvergenceTable(meta=meta, rows=rows)


@dataclass(frozen=True)
class ResidualRow:
    n: int
    resid: float
    n2_resid: float
    bound_thm2: float
    K: int


def voronovskaja_study(
    f: AnalyticFunction,
    r: float,
    n_list: list[int],
    options: StudyOptions | None = None,
) -> tuple[TableMeta, tuple[ResidualRow, ...]]:
    """Second-order residuals per n; requires A(r+1) < 1 up front."""
    opts = options or StudyOptions()
    env = f.envelope
    _require(
        float(env.rate) * (r + 1) < 1,
        f"requires A*(r+1) < 1; got A*(r+1) = {float(env.rate) * (r + 1)}",
    )
    c2 = voronovskaja_bound_constant(env.scale, env.rate, r)
    ns = sorted(set(int(n) for n in n_list))
    rows = []
    for n in ns:
        resid = voronovskaja_residual(f, n, r, opts.truncation_tol, opts.sampling)
        order = apply_operator(f, n, r, opts.truncation_tol).order
        rows.append(
            ResidualRow(n=n, resid=resid, n2_resid=n * n * resid, bound_thm2=c2 / (n * n), K=order)
        )
    meta = TableMeta(
        function=f.label,
        r=float(r),
        rate=float(env.rate),
        scale=float(env.scale),
        radius=float(env.radius),
        truncation_tol=opts.truncation_tol,
        sampling_initial=opts.sampling.initial_samples,
        sampling_rel_tol=opts.sampling.rel_tol,
    )
    return meta, tuple(rows)


@dataclass(frozen=True)
class DerivativeRow:
    n: int
    deriv_error: float
    bound_deriv: float
    K: int


def derivative_study(
    f: AnalyticFunction,
    p: int,
    r: float,
    r1: float,
    n_list: list[int],
    options: StudyOptions | None = None,
) -> tuple[TableMeta, tuple[DerivativeRow, ...]]:
    """Derivative errors per n against p! r1 C(r1)/(n (r1-r)^(p+1))."""
    opts = options or StudyOptions()
    env = f.envelope
    _require(1 <= r < r1, f"requires 1 <= r < r1; got r={r}, r1={r1}")
    _require(
        float(env.rate) * r1 < 1,
        f"requires r1 < 1/A; got r1={r1}, 1/A={1 / float(env.rate)}",
    )
    c1 = upper_bound_constant(env.scale, env.rate, r1)
    cauchy = math.factorial(p) * r1 / (r1 - r) ** (p + 1)
    ns = sorted(set(int(n) for n in n_list))
    rows = []
    for n in ns:
        err = derivative_approximation_error(f, n, p, r, r1, opts.truncation_tol, opts.sampling)
        order = apply_operator(f, n, r, opts.truncation_tol).order
        rows.append(DerivativeRow(n=n, deriv_error=err, bound_deriv=cauchy * c1 / n, K=order))
    meta = TableMeta(
        function=f.label,
        r=float(r),
        rate=float(env.rate),
        scale=float(env.scale),
        radius=float(env.radius),
        truncation_tol=opts.truncation_tol,
        sampling_initial=opts.sampling.initial_samples,
        sampling_rel_tol=opts.sampling.rel_tol,
    )
    return meta, tuple(rows)


# -- order fitting and the limit object -------------------------------------------


@dataclass(frozen=True)
class OrderFit:
    """Log-log slope fit, or the exact-reproduction signal.

    ``exact_reproduction`` is set when some row has error exactly zero (the
    function is reproduced by the operator); the slope is then undefined.
    """

    slope: float | None
    r_squared: float | None
    exact_reproduction: bool


def estimate_order(
    table: ConvergenceTable, drop_preasymptotic: bool = False
) -> OrderFit:
    """Least-squares slope of log(error) against log(n), with R^2.

    With ``drop_preasymptotic`` rows with n < 8 (r+2) are excluded to reduce
    preasymptotic bias.
    """
    rows = table.rows
    if drop_preasymptotic:
        rows = tuple(row for row in rows if row.n >= 8 * (table.meta.r + 2))
    if any(row.sup_error == 0.0 for row in rows):
        return OrderFit(slope=None, r_squared=None, exact_reproduction=True)
    if len(rows) < 3:
        raise ValueError("need at least 3 rows with positive errors")
    x = np.log([row.n for row in rows])
    y = np.log([row.sup_error for row in rows])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return OrderFit(slope=float(slope), r_squared=r_squared, exact_reproduction=False)


def asymptotic_ratio(
    f: AnalyticFunction,
    r: float,
    n: int,
    tol: float | None = None,
    sampling: SamplingConfig | None = None,
) -> float:
    """n * error divided by the sup norm of z(z+2) f''(z) / 2 on |z| <= r.

    The denominator is the limit of n * error as n grows, so the ratio
    tends to 1 for any f that is not a polynomial of degree <= 1; for such
    degenerate f the denominator vanishes and an error is raised.
    """
    second = derivative(f, 2)

    def limit_object(z):
        return z * (z + 2) * second(z) / 2

    denom = sup_norm_on_circle(limit_object, r, sampling).value
    if denom == 0.0:
        raise DegenerateFunctionError(
            f"{f.label} is a polynomial of degree <= 1; the comparison term vanishes"
        )
    return n * approximation_error(f, n, r, tol, sampling) / denom
