"""Bilateral operator-weighted shifts on ``l^2(Z, K)`` with diagonal weights.

Each weight ``A_n`` acts on the orthonormal basis ``f_k`` of ``K`` as
``A_n f_k = a(k, n) f_k``.  A vector is a :class:`FinVector` over ``N x Z``
where ``(k, j)`` stands for ``f_k`` placed in slot ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import ValidationError
from .index_core import Grid, Naturals, ShiftMap
from .logmag import LogProduct
from .report import CertificateReport, fmt_float, threshold_table
from .criteria import (
    ShiftTuple,
    _Family,
    _as_schedule,
    _as_windows,
    _evaluate,
    _window_sizes,
    check_dsc,
)
from .shift_ops import PseudoShift
from .spaces import FinVector, zk_hilbert


class DiagonalWeightFamily:
    """Diagonal entries ``a(k, n) > 0`` of the weights ``A_n``.

    Range products ``prod_{v=lo}^{hi} a(k, v)`` are served from cumulative
    products around ``v = 0``, kept exact.
    """

    def __init__(self, a: Callable, name: str = "A"):
        self._a = a
        self.name = name
        self._entries = {}
        self._up = {}    # k -> [prod_{v<m} a(k, v) for m = 0, 1, ...]
        self._down = {}  # k -> [prod_{-m <= v < 0} a(k, v) for m = 0, 1, ...]

    def entry(self, k: int, n: int) -> LogProduct:
        key = (k, n)
        hit = self._entries.get(key)
        if hit is None:
            hit = LogProduct.of(self._a(k, n))
            if hit.is_zero or hit.phase != 1:
                raise ValueError(f"a({k}, {n}) must be positive")
            self._entries[key] = hit
        return hit

    def __call__(self, k: int, n: int) -> LogProduct:
        return self.entry(k, n)

    def _cum(self, k: int, m: int) -> LogProduct:
        # prod_{0 <= v < m} for m >= 0, and 1 / prod_{m <= v < 0} for m < 0
        if m >= 0:
            table = self._up.setdefault(k, [LogProduct.one()])
            while len(table) <= m:
                table.append(table[-1] * self.entry(k, len(table) - 1))
            return table[m]
        table = self._down.setdefault(k, [LogProduct.one()])
        while len(table) <= -m:
            table.append(table[-1] * self.entry(k, -len(table)))
        return table[-m].inverse()

    def range_product(self, k: int, lo: int, hi: int) -> LogProduct:
        """``prod_{v=lo}^{hi} a(k, v)``; the empty product when ``hi < lo``."""
        if hi < lo:
            return LogProduct.one()
        return self._cum(k, hi + 1) / self._cum(k, lo)

    def norm(self, n: int, ks) -> LogProduct:
        """Sampled ``||A_n|| = sup_k a(k, n)``."""
        return max((self.entry(k, n) for k in ks), key=lambda v: v.log)

    def inverse_norm(self, n: int, ks) -> LogProduct:
        """Sampled ``||A_n^{-1}|| = sup_k 1 / a(k, n)``."""
        return max((self.entry(k, n).inverse() for k in ks), key=lambda v: v.log)

    def bounds(self, ks, ns) -> dict:
        values = [self.entry(k, n) for k in ks for n in ns]
        return {"sup": fmt_float(max(values, key=lambda v: v.log).to_float()),
                "inf": fmt_float(min(values, key=lambda v: v.log).to_float())}


@dataclass
class OwsOperator:
    weights: DiagonalWeightFamily
    direction: str = "forward"

    def __post_init__(self):
        if self.direction not in ("forward", "backward"):
            raise ValueError("direction is forward or backward")


def ows_apply(T: OwsOperator, x: FinVector, n: int = 1) -> FinVector:
    """``T^n x`` from the closed product formulas, diagonal in ``k``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a = T.weights
    terms = []
    for (k, j), c in x:
        if T.direction == "forward":
            terms.append(((k, j + n), c * a.range_product(k, j, j + n - 1)))
        else:
            terms.append(((k, j - n), c * a.range_product(k, j - n + 1, j)))
    return FinVector(x.index_space, terms)


def ows_to_pseudoshift(T: OwsOperator, name: str = "T") -> PseudoShift:
    """The forward shift as ``b(i, j) = a(i, j - 1)`` with ``phi(i, j) = (i, j - 1)``."""
    if T.direction != "forward":
        raise ValidationError("direction", "only the forward shift is identified with a pseudo-shift")
    a = T.weights
    return PseudoShift(zk_hilbert(), ShiftMap.grid_translation(-1), lambda ij: a(ij[0], ij[1] - 1), name)


@dataclass
class OwsProblem:
    operators: Sequence[OwsOperator]
    powers: Sequence[int]
    name: str = ""

    def __post_init__(self):
        self.operators = tuple(self.operators)
        self.powers = tuple(int(r) for r in self.powers)
        if len(self.operators) < 2 or len(self.powers) != len(self.operators):
            raise ValidationError("operators", "need N >= 2 operators with one power each")
        if self.powers[0] < 1 or any(a >= b for a, b in zip(self.powers, self.powers[1:])):
            raise ValidationError("powers", f"powers must be strictly increasing: {self.powers}")
        if any(T.direction != "forward" for T in self.operators):
            raise ValidationError("direction", "criteria are stated for forward shifts")

    def to_shift_tuple(self) -> ShiftTuple:
        shifts = [ows_to_pseudoshift(T, f"T{l + 1}") for l, T in enumerate(self.operators)]
        return ShiftTuple(shifts, self.powers, self.name)


def _ows_families(problem: OwsProblem) -> list:
    ops, rs = problem.operators, problem.powers
    N = len(ops)
    fams = []

    def inv_back(l, i, j, m):
        # || prod_{v=j-m}^{j-1} (A_v)^{-1} f_i ||
        return ops[l].weights.range_product(i, j - m, j - 1).inverse()

    def fwd(l, i, j, lo, hi):
        return ops[l].weights.range_product(i, lo, hi)

    for l in range(N):
        for s in range(N):
            def h1(n, key, l=l, s=s):
                (i1, j1), (i2, j2) = key
                value = inv_back(l, i1, j1, rs[l] * n) * fwd(s, i2, j2, j2, j2 + rs[s] * n - 1)
                return value, (i2, j2 + rs[s] * n)

            fams.append(_Family(f"(H1), l={l + 1}, s={s + 1}", 2, h1))
    for s in range(N):
        for l in range(s + 1, N):
            def h2i(n, key, s=s, l=l):
                i, j = key[0]
                value = inv_back(s, i, j, rs[s] * n) * fwd(
                    l, i, j, j - rs[s] * n, j + (rs[l] - rs[s]) * n - 1)
                return value, (i, j + (rs[l] - rs[s]) * n)

            def h2ii(n, key, s=s, l=l):
                i, j = key[0]
                value = inv_back(l, i, j, rs[l] * n) * fwd(
                    s, i, j, j - rs[l] * n, j - (rs[l] - rs[s]) * n - 1)
                return value, (i, j - (rs[l] - rs[s]) * n)

            fams.append(_Family(f"(H2)(i), s={s + 1}, l={l + 1}", 1, h2i))
            fams.append(_Family(f"(H2)(ii), s={s + 1}, l={l + 1}", 1, h2ii))
    return fams


def check_ows_dsc(problem: OwsProblem, schedule, windows=None, cross_check: bool = True,
                  tolerance: float = 1e-10) -> CertificateReport:
    """Supercyclicity certificate from the weight products directly.

    With ``cross_check`` every grid value is compared with the generic
    pseudo-shift checker on the identified tuple; the largest log
    discrepancy is reported and must stay within ``tolerance``.
    """
    schedule, windows = _as_schedule(schedule), _as_windows(windows)
    space = Grid()
    families = _evaluate(_ows_families(problem), space, schedule, windows, 1)
    extra = {}
    if cross_check:
        generic = check_dsc(problem.to_shift_tuple(), schedule, windows)
        theirs = {(e.condition, e.k, e.indices): e.value.log for e in generic.grid()}
        worst = 0.0
        for f in families:
            for e in f.entries:
                other = theirs[(e.condition, e.k, e.indices)]
                mine = e.value.log
                if mine == other:
                    continue
                worst = max(worst, abs(mine - other))
        if worst > tolerance:
            raise AssertionError(f"generic checker disagrees by {worst:.3g} in log-magnitude")
        extra["cross_check"] = {
            "checker": "check_dsc",
            "max_log_discrepancy": fmt_float(worst),
            "tolerance": tolerance,
            "verdict": generic.verdict,
        }
    return CertificateReport(
        "check_ows_dsc", "general", space, schedule,
        dict(windows.description, sizes=_window_sizes(space, windows, schedule.K)),
        families, threshold_table(schedule.K), {}, extra,
    )


def check_ows_powers_dsc(T: OwsOperator, N: int, schedule, windows=None) -> CertificateReport:
    """Certificate for ``T, T^2, ..., T^N`` under a one-sided bound on ``||A_n^{-1}||``.

    Windows range over the basis index ``i`` of ``K`` (default ``{0, ..., k-1}``).
    The sampled bounds ``sup ||A_n^{-1}||`` for ``n < 0`` and ``n > 0`` are
    reported, not enforced.
    """
    if N < 2:
        raise ValidationError("N", "need N >= 2")
    if T.direction != "forward":
        raise ValidationError("direction", "criteria are stated for forward shifts")
    schedule, windows = _as_schedule(schedule), _as_windows(windows)
    a = T.weights
    space = Naturals()

    def neg_inv(i, m):
        # || prod_{v=1}^{m} (A_{-v})^{-1} f_i ||
        return a.range_product(i, -m, -1).inverse()

    def pos(i, m):
        return a.range_product(i, 1, m)

    fams = []
    for l in range(1, N + 1):
        fams.append(_Family(f"(P1), l={l}", 2, lambda n, key, l=l: (
            neg_inv(key[0], l * n) * pos(key[1], N * n), None)))
        fams.append(_Family(f"(P2), l={l}", 2, lambda n, key, l=l: (
            neg_inv(key[0], N * n) * pos(key[1], l * n), None)))
    for l in range(1, N):
        fams.append(_Family(f"(P3)-inverse, l={l}", 1, lambda n, key, l=l: (neg_inv(key[0], l * n), None)))
        fams.append(_Family(f"(P3)-forward, l={l}", 1, lambda n, key, l=l: (pos(key[0], l * n), None)))
    families = _evaluate(fams, space, schedule, windows, 1)
    ks = sorted({i for k in range(1, schedule.K + 1) for i in windows(space, k)})
    span = N * schedule.values[-1]
    pre = {
        "window": ks,
        "sampled_n": span,
        "sup_inverse_norm_negative": fmt_float(max(
            (a.inverse_norm(-v, ks) for v in range(1, span + 1)), key=lambda v: v.log).to_float()),
        "sup_inverse_norm_positive": fmt_float(max(
            (a.inverse_norm(v, ks) for v in range(1, span + 1)), key=lambda v: v.log).to_float()),
        "note": "one-sided inverse bound sampled on the window only",
    }
    return CertificateReport(
        "check_ows_powers_dsc", f"N={N}", space, schedule,
        dict(windows.description, sizes=_window_sizes(space, windows, schedule.K)),
        families, threshold_table(schedule.K), pre,
    )


__all__ = [
    "DiagonalWeightFamily",
    "OwsOperator",
    "OwsProblem",
    "ows_apply",
    "ows_to_pseudoshift",
    "check_ows_dsc",
    "check_ows_powers_dsc",
]
