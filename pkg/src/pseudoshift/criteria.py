"""Finite certificates for disjoint hypercyclicity and supercyclicity of pseudo-shift tuples.

For a tuple ``T_1, ..., T_N`` with powers ``r_1 < ... < r_N`` and a schedule
``n_1 < n_2 < ...`` every checked quantity at step ``k`` is the norm of a
scaled basis vector, evaluated exactly and compared with ``1/k`` on the
window ``I_k``:

* ``(H1)-forward``  ``||S_l e_i||``, the inverse forward product along ``phi_l``;
* ``(H1)-backward`` ``||T_l^{r_l n} e_i||``;
* ``(H2)(i)``  ``||T_l^{r_l n} S_s e_i||`` and ``(H2)(ii)`` ``||T_s^{r_s n} S_l e_i||`` for ``s < l``;
* in the supercyclic check, ``(H1)`` is the product ``||S_l e_i|| ||T_s^{r_s n} e_j||``.

Shift numbers ``l`` and ``s`` are 1-based in condition names.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import ModeHypothesisError, ScheduleError, SpaceMismatchError, ValidationError
from .index_core import (
    IndexSpace,
    escape_time,
    escapes_range,
    has_periodic_point,
    is_run_away,
    iterate,
    run_away_with,
)
from .logmag import LogProduct
from .report import (
    SKIPPED,
    CertificateReport,
    FamilyVerdict,
    GridEntry,
    judge,
    threshold,
    threshold_table,
)
from .shift_ops import PseudoShift, power_apply, s_map, s_map_vector
from .spaces import FinVector, SpaceModel, op_basis_bound, vector_lognorm, vector_norm

MODES = ("general", "same-map", "escaping")


# --------------------------------------------------------------------------
# problem data


class ShiftTuple:
    """``N >= 2`` pseudo-shifts on one space with strictly increasing powers."""

    def __init__(self, shifts: Sequence[PseudoShift], powers: Sequence[int], name: str = ""):
        shifts, powers = tuple(shifts), tuple(int(r) for r in powers)
        if len(shifts) < 2:
            raise ValidationError("shifts", "a tuple needs at least two shifts")
        if len(powers) != len(shifts):
            raise ValidationError("powers", "one power per shift")
        if powers[0] < 1 or any(a >= b for a, b in zip(powers, powers[1:])):
            raise ValidationError("powers", f"powers must satisfy 1 <= r_1 < ... < r_N, got {powers}")
        space = shifts[0].space
        for T in shifts[1:]:
            if not T.space.same_as(space):
                raise SpaceMismatchError(f"{T.name} lives on {T.space!r}, not {space!r}")
        self.shifts = shifts
        self.powers = powers
        self.space: SpaceModel = space
        self.name = name

    @property
    def N(self) -> int:
        return len(self.shifts)

    @property
    def index_space(self) -> IndexSpace:
        return self.space.index_space

    def shared_map(self) -> bool:
        first = self.shifts[0].map
        return all(T.map == first for T in self.shifts[1:])

    def pairs(self):
        """``(s, l)`` with ``s < l``, 0-based."""
        return itertools.combinations(range(self.N), 2)

    def __repr__(self):
        return f"ShiftTuple({[T.name for T in self.shifts]}, powers={self.powers})"


@dataclass(frozen=True)
class Schedule:
    values: tuple
    provenance: str = "user-given"

    def __post_init__(self):
        values = tuple(int(n) for n in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise ScheduleError("a schedule needs K >= 1 terms")
        if values[0] < 1 or any(a >= b for a, b in zip(values, values[1:])):
            raise ScheduleError(f"schedule must be strictly increasing positive integers: {values}")

    @classmethod
    def formula(cls, fn: Callable[[int], int], K: int, provenance="user-given") -> "Schedule":
        return cls(tuple(fn(k) for k in range(1, K + 1)), provenance)

    @property
    def K(self) -> int:
        return len(self.values)

    def n(self, k: int) -> int:
        return self.values[k - 1]

    def to_dict(self):
        return {"n": list(self.values), "K": self.K, "provenance": self.provenance}


@dataclass(frozen=True)
class ScheduleNotFound:
    blocking_k: int
    best_margin: float
    best_n: int | None
    partial: tuple
    n_max: int

    found = False

    def to_dict(self):
        return {
            "status": "NOT-FOUND",
            "blocking_k": self.blocking_k,
            "best_margin": self.best_margin,
            "best_n": self.best_n,
            "partial": list(self.partial),
            "n_max": self.n_max,
        }


class Windows:
    """How the window ``I_k`` grows with ``k``."""

    def __init__(self, pick: Callable, description: dict):
        self._pick = pick
        self.description = description

    def __call__(self, space: IndexSpace, k: int) -> tuple:
        return tuple(self._pick(space, k))

    @classmethod
    def linear(cls) -> "Windows":
        """``|I_k| = k``: the first ``k`` indices of the enumeration.

        On a finite index set the window stops at the whole set.
        """

        def pick(space, k):
            if space.finite:
                k = min(k, len(space.labels))
            return space.window(k)

        return cls(pick, {"growth": "linear"})

    @classmethod
    def bounded(cls, predicate: Callable, label: str, scan_limit: int = 1_000_000) -> "Windows":
        """The first ``k`` enumerated indices satisfying ``predicate``."""

        def pick(space, k):
            out = []
            for n, i in enumerate(space.enumerate()):
                if n >= scan_limit:
                    raise ValueError(f"fewer than {k} indices satisfy {label}")
                if predicate(i):
                    out.append(i)
                    if len(out) == k:
                        return out
            raise ValueError(f"fewer than {k} indices satisfy {label}")

        return cls(pick, {"growth": "linear", "bound": label})

    @classmethod
    def fixed(cls, indices) -> "Windows":
        """The same window at every ``k`` (an int means that prefix size)."""

        def pick(space, k):
            if isinstance(indices, int):
                return space.window(indices)
            return indices

        return cls(pick, {"growth": "fixed", "size": indices if isinstance(indices, int) else len(indices)})

    @classmethod
    def explicit(cls, windows: Sequence) -> "Windows":
        windows = tuple(tuple(w) for w in windows)
        return cls(lambda space, k: windows[k - 1], {"growth": "explicit"})


def _as_windows(windows) -> Windows:
    if windows is None:
        return Windows.linear()
    if isinstance(windows, Windows):
        return windows
    if isinstance(windows, int):
        return Windows.fixed(windows)
    return Windows.fixed(tuple(windows))


def _as_schedule(schedule) -> Schedule:
    if isinstance(schedule, Schedule):
        return schedule
    return Schedule(tuple(schedule))


# --------------------------------------------------------------------------
# single quantities: (value including ||e_landing||, landing)


def h1_forward(problem: ShiftTuple, l: int, n: int, i):
    """``||S_l e_i||`` with ``l`` 0-based."""
    T, r = problem.shifts[l], problem.powers[l]
    prod, landing = T.forward(i, r * n)
    return prod.inverse() * problem.space.basis_norm(landing), landing


def h1_backward(problem: ShiftTuple, l: int, n: int, i):
    """``||T_l^{r_l n} e_i||``."""
    T, r = problem.shifts[l], problem.powers[l]
    prod, landing = T.backward(i, r * n)
    return prod * problem.space.basis_norm(landing), landing


def h2_first(problem: ShiftTuple, s: int, l: int, n: int, i, method: str = "general"):
    """``||T_l^{r_l n} S_s e_i||`` for ``s < l``."""
    Ts, Tl = problem.shifts[s], problem.shifts[l]
    rs, rl = problem.powers[s], problem.powers[l]
    if method == "same-map":
        fs, _ = Ts.forward(i, rs * n)
        fl, _ = Tl.forward(i, rs * n)
        bl, landing = Tl.backward(i, (rl - rs) * n)
        value = bl * fl / fs
    else:
        fs, mid = Ts.forward(i, rs * n)
        bl, landing = Tl.backward(mid, rl * n)
        value = bl / fs
    return value * problem.space.basis_norm(landing), landing


def h2_second(problem: ShiftTuple, s: int, l: int, n: int, i, method: str = "general"):
    """``||T_s^{r_s n} S_l e_i||`` for ``s < l``."""
    Ts, Tl = problem.shifts[s], problem.shifts[l]
    rs, rl = problem.powers[s], problem.powers[l]
    if method == "same-map":
        fl, _ = Tl.forward(i, rl * n)
        fs_long, _ = Ts.forward(i, rl * n)
        fs_short, landing = Ts.forward(i, (rl - rs) * n)
        value = fs_long / fs_short / fl
    else:
        fl, mid = Tl.forward(i, rl * n)
        bs, landing = Ts.backward(mid, rs * n)
        value = bs / fl
    return value * problem.space.basis_norm(landing), landing


def general_landings(problem: ShiftTuple, s: int, l: int, n: int, i):
    """Landing indices of the two mixed quantities, by iterating the maps only."""
    ms, ml = problem.shifts[s].map, problem.shifts[l].map
    rs, rl = problem.powers[s], problem.powers[l]
    first = iterate(ml, iterate(ms, i, rs * n), -rl * n)
    second = iterate(ms, iterate(ml, i, rl * n), -rs * n)
    return first, second


def same_map_landings(problem: ShiftTuple, s: int, l: int, n: int, i):
    m = problem.shifts[0].map
    d = (problem.powers[l] - problem.powers[s]) * n
    return iterate(m, i, -d), iterate(m, i, d)


# --------------------------------------------------------------------------
# families


@dataclass
class _Family:
    condition: str
    arity: int
    value: Callable  # (n, key) -> (LogProduct, landing)
    skip_reason: str | None = None


def _dhc_families(problem: ShiftTuple, method: str) -> list:
    fams = []
    for l in range(problem.N):
        fams.append(_Family(f"(H1)-forward, l={l + 1}", 1,
                            lambda n, key, l=l: h1_forward(problem, l, n, key[0])))
        fams.append(_Family(f"(H1)-backward, l={l + 1}", 1,
                            lambda n, key, l=l: h1_backward(problem, l, n, key[0])))
    fams.extend(_h2_families(problem, method))
    return fams


def _h2_families(problem: ShiftTuple, method: str, skip_first: str | None = None) -> list:
    fams = []
    for s, l in problem.pairs():
        fams.append(_Family(f"(H2)(i), s={s + 1}, l={l + 1}", 1,
                            lambda n, key, s=s, l=l: h2_first(problem, s, l, n, key[0], method),
                            skip_first))
        fams.append(_Family(f"(H2)(ii), s={s + 1}, l={l + 1}", 1,
                            lambda n, key, s=s, l=l: h2_second(problem, s, l, n, key[0], method)))
    return fams


def _dsc_families(problem: ShiftTuple, method: str, skip: str | None = None) -> list:
    fams = []
    for l in range(problem.N):
        for s in range(problem.N):
            def value(n, key, l=l, s=s):
                fwd, _ = h1_forward(problem, l, n, key[0])
                bwd, landing = h1_backward(problem, s, n, key[1])
                return fwd * bwd, landing

            fams.append(_Family(f"(H1), l={l + 1}, s={s + 1}", 2, value, skip))
    fams.extend(_h2_families(problem, method, skip))
    return fams


def _keys(window: tuple, arity: int):
    if arity == 1:
        return [(i,) for i in window]
    return list(itertools.product(window, repeat=arity))


def _evaluate(families, index_space, schedule: Schedule, windows: Windows, scale, evaluate_skipped=False):
    verdicts = []
    for fam in families:
        if fam.skip_reason and not evaluate_skipped:
            verdicts.append(FamilyVerdict(fam.condition, SKIPPED, reason=fam.skip_reason))
            continue
        entries = []
        for k in range(1, schedule.K + 1):
            n, bound = schedule.n(k), threshold(k, scale)
            for key in _keys(windows(index_space, k), fam.arity):
                value, landing = fam.value(n, key)
                entries.append(GridEntry(fam.condition, k, key, value, landing, value.less_than(bound)))
        verdict = judge(fam.condition, entries)
        if fam.skip_reason:
            verdict.reason = fam.skip_reason
        verdicts.append(verdict)
    return verdicts


def _window_sizes(index_space, windows: Windows, K: int):
    return [len(windows(index_space, k)) for k in range(1, K + 1)]


def _union_window(index_space, windows: Windows, K: int) -> tuple:
    seen = {}
    for k in range(1, K + 1):
        for i in windows(index_space, k):
            seen.setdefault(i, None)
    return tuple(seen)


def preconditions(problem: ShiftTuple, schedule: Schedule, windows: Windows, kind: str,
                  horizon: int | None = None) -> dict:
    """Sampled hypotheses; reported only, they never change a verdict."""
    space = problem.index_space
    window = _union_window(space, windows, schedule.K)
    if horizon is None:
        horizon = max(problem.powers) * schedule.values[-1]
    out = {"window": [space.encode(i) for i in window], "horizon": horizon}
    out["boundedness"] = [
        {"shift": l + 1, "sup_norm_ratio": T.boundedness(window)} for l, T in enumerate(problem.shifts)
    ]
    out["op_basis_bound"] = op_basis_bound(problem.space, window)
    out["periodicity"] = [
        dict(has_periodic_point(T.map, window, max(len(window), 1) * max(problem.powers)).to_dict(space),
             shift=l + 1)
        for l, T in enumerate(problem.shifts)
    ]
    if kind == "super":
        out["run_away"] = [
            dict(is_run_away(T.map, 1, window, horizon).to_dict(space), shift=l + 1)
            for l, T in enumerate(problem.shifts)
        ]
    out["run_away_with"] = [
        dict(
            run_away_with(problem.shifts[s].map, problem.powers[s], problem.shifts[l].map,
                          problem.powers[l], window, horizon).to_dict(space),
            s=s + 1, l=l + 1,
        )
        for s, l in problem.pairs()
    ]
    return out


def _min_gap(powers) -> int:
    return min([powers[0]] + [b - a for a, b in zip(powers, powers[1:])])


def _check_escaping(problem: ShiftTuple, schedule: Schedule, windows: Windows, horizon):
    """Every ``i`` in ``I_k`` must leave ``phi^n(I)`` by step ``d * n_k``.

    ``d`` is the smallest of ``r_1`` and the gaps ``r_l - r_s``, so every
    skipped quantity at step ``k`` has an undefined landing.
    """
    if not problem.shared_map():
        raise ModeHypothesisError("escaping mode needs one map shared by all shifts",
                                  witness={"shifts": [T.name for T in problem.shifts]})
    need = max(problem.powers) * schedule.values[-1]
    if horizon is not None and horizon < need:
        raise ModeHypothesisError(f"horizon {horizon} is below max r_l * n_K = {need}",
                                  witness={"horizon": horizon})
    horizon = need if horizon is None else horizon
    phi = problem.shifts[0].map
    space = problem.index_space
    gap = _min_gap(problem.powers)
    for k in range(1, schedule.K + 1):
        for i in windows(space, k):
            n_e = escape_time(phi, i, horizon)
            if n_e is None or n_e > gap * schedule.n(k):
                raise ModeHypothesisError(
                    f"index {space.encode(i)} does not leave the range of phi "
                    f"by step {gap * schedule.n(k)} (k={k})",
                    witness={"index": space.encode(i), "k": k,
                             "escape": n_e if n_e is not None else "NOT-ESCAPED"},
                )
    window = _union_window(space, windows, schedule.K)
    return escapes_range(phi, window, horizon).to_dict(space)


# --------------------------------------------------------------------------
# checkers


def check_dhc(problem: ShiftTuple, schedule, windows=None, threshold_scale=1,
              horizon: int | None = None) -> CertificateReport:
    """Disjoint hypercyclicity certificate: both single families and both mixed families."""
    schedule, windows = _as_schedule(schedule), _as_windows(windows)
    _revalidate(problem)
    families = _evaluate(_dhc_families(problem, "general"), problem.index_space, schedule,
                         windows, threshold_scale)
    return CertificateReport(
        "check_dhc", "general", problem.index_space, schedule,
        dict(windows.description, sizes=_window_sizes(problem.index_space, windows, schedule.K)),
        families, threshold_table(schedule.K, threshold_scale),
        preconditions(problem, schedule, windows, "hyper", horizon),
    )


def check_dsc(problem: ShiftTuple, schedule, windows=None, mode: str = "general",
              threshold_scale=1, horizon: int | None = None,
              evaluate_skipped: bool = False) -> CertificateReport:
    """Disjoint supercyclicity certificate.

    ``same-map`` uses the single-orbit form of the mixed quantities (and
    checks its landings against the general ones); ``escaping`` skips the
    families whose landings are provably undefined.
    """
    if mode not in MODES:
        raise ValidationError("mode", f"unknown mode {mode!r}")
    schedule, windows = _as_schedule(schedule), _as_windows(windows)
    _revalidate(problem)
    space = problem.index_space
    skip = None
    method = "general"
    pre = preconditions(problem, schedule, windows, "super", horizon)
    if mode == "same-map":
        if not problem.shared_map():
            raise ModeHypothesisError("same-map mode needs one map shared by all shifts",
                                      witness={"shifts": [T.name for T in problem.shifts]})
        method = "same-map"
        _check_same_map_landings(problem, schedule, windows)
    elif mode == "escaping":
        pre["escape"] = _check_escaping(problem, schedule, windows, horizon)
        method = "same-map"
        skip = "landing leaves the range of phi; automatically satisfied"
    fams = _dsc_families(problem, method, skip)
    families = _evaluate(fams, space, schedule, windows, threshold_scale, evaluate_skipped)
    return CertificateReport(
        "check_dsc", mode, space, schedule,
        dict(windows.description, sizes=_window_sizes(space, windows, schedule.K)),
        families, threshold_table(schedule.K, threshold_scale), pre,
    )


def _check_same_map_landings(problem, schedule, windows):
    space = problem.index_space
    for k in range(1, schedule.K + 1):
        n = schedule.n(k)
        for i in windows(space, k):
            for s, l in problem.pairs():
                if general_landings(problem, s, l, n, i) != same_map_landings(problem, s, l, n, i):
                    raise ModeHypothesisError("same-map landings disagree",
                                              witness={"index": space.encode(i), "k": k})


def _revalidate(problem: ShiftTuple):
    for T in problem.shifts[1:]:
        if not T.space.same_as(problem.space):
            raise SpaceMismatchError(f"{T.name} lives on a different space")


# --------------------------------------------------------------------------
# schedule search


def search_schedule(problem: ShiftTuple, mode: str = "super", K: int = 4, n_max: int = 100,
                    windows=None, check_mode: str = "general", threshold_scale=1):
    """Greedy schedule: the smallest ``n_k > n_{k-1}`` making every quantity on ``I_k`` below ``1/k``.

    Returns a :class:`Schedule` or :class:`ScheduleNotFound` with the
    blocking ``k`` and the best margin ``min_n max_entries value * k``.
    """
    if K < 1 or n_max < K:
        raise ValidationError("K", "need K >= 1 and n_max >= K")
    windows = _as_windows(windows)
    method = "same-map" if problem.shared_map() else "general"
    if mode == "hyper":
        fams = _dhc_families(problem, method)
    elif mode == "super":
        skip = "skipped" if check_mode == "escaping" else None
        fams = [f for f in _dsc_families(problem, method, skip) if not f.skip_reason]
    else:
        raise ValidationError("mode", f"unknown search mode {mode!r}")
    space = problem.index_space
    values = []
    prev = 0
    for k in range(1, K + 1):
        bound = threshold(k, threshold_scale)
        window = windows(space, k)
        best_log, best_n = math.inf, None
        chosen = None
        for n in range(prev + 1, n_max + 1):
            worst = -math.inf
            ok = True
            for fam in fams:
                for key in _keys(window, fam.arity):
                    value, _ = fam.value(n, key)
                    worst = max(worst, value.log)
                    if not value.less_than(bound):
                        ok = False
            if worst < best_log:
                best_log, best_n = worst, n
            if ok:
                chosen = n
                break
        if chosen is None:
            margin = math.exp(best_log - LogProduct.of(bound).log) if best_log < math.inf else math.inf
            return ScheduleNotFound(k, margin, best_n, tuple(values), n_max)
        values.append(chosen)
        prev = chosen
    return Schedule(tuple(values), "searched")


# --------------------------------------------------------------------------
# pointwise criterion and synthesis


def _norm_value(space: SpaceModel, x: FinVector) -> LogProduct:
    if x.is_zero():
        return LogProduct.zero_value()
    if len(x) == 1:
        i, c = x.terms[0]
        return c.magnitude() * space.basis_norm(i)
    return LogProduct.from_log(vector_lognorm(space, x))


def verify_criterion_pointwise(problem: ShiftTuple, schedule, basis_window=None,
                               mode: str = "hyper", threshold_scale=1) -> CertificateReport:
    """Tabulate the criterion's defining sequences on basis vectors.

    Families: ``T^{rn} e_i`` and ``S e_i`` per shift, the residual
    ``T_l^{r_l n} S_s e_i - delta_{sl} e_i`` for every ordered pair and, in
    super mode, ``||T_l^{r_l n} e_i|| * ||sum_j S_j e_i'||``.
    """
    schedule, windows = _as_schedule(schedule), _as_windows(basis_window)
    space, X = problem.index_space, problem.space
    fams = []
    for l in range(problem.N):
        fams.append(_Family(f"T^rn e_i, l={l + 1}", 1,
                            lambda n, key, l=l: h1_backward(problem, l, n, key[0])))
        fams.append(_Family(f"S e_i, l={l + 1}", 1,
                            lambda n, key, l=l: h1_forward(problem, l, n, key[0])))
    for l in range(problem.N):
        for s in range(problem.N):
            def residual(n, key, l=l, s=s):
                i = key[0]
                y = s_map(problem.shifts[s], problem.powers[s], n, i)
                out = power_apply(problem.shifts[l], y, problem.powers[l] * n)
                if s == l:
                    out = out - FinVector.basis(space, i)
                landing = out.terms[0][0] if len(out) == 1 else None
                return _norm_value(X, out), landing

            fams.append(_Family(f"residual, l={l + 1}, s={s + 1}", 1, residual))
    if mode == "super":
        for l in range(problem.N):
            def scaled(n, key, l=l):
                i, target = key
                tn, _ = h1_backward(problem, l, n, i)
                y = FinVector(space, [])
                for j in range(problem.N):
                    y = y + s_map(problem.shifts[j], problem.powers[j], n, target)
                return tn * _norm_value(X, y), None

            fams.append(_Family(f"super product, l={l + 1}", 2, scaled))
    elif mode != "hyper":
        raise ValidationError("mode", f"unknown mode {mode!r}")
    families = _evaluate(fams, space, schedule, windows, threshold_scale)
    return CertificateReport(
        "verify_criterion_pointwise", mode, space, schedule,
        dict(windows.description, sizes=_window_sizes(space, windows, schedule.K)),
        families, threshold_table(schedule.K, threshold_scale),
    )


def synthesize_vector(problem: ShiftTuple, n: int, targets: Sequence[FinVector],
                      base: FinVector | None = None):
    """``x = base + sum_l S_{l,n}(target_l)`` and the residuals ``||T_l^{r_l n} x - target_l||``."""
    if n < 1:
        raise ValidationError("n", "n must be >= 1")
    if len(targets) != problem.N:
        raise ValidationError("targets", f"need {problem.N} targets")
    space = problem.index_space
    x = base if base is not None else FinVector.zero(space)
    for T, r, y in zip(problem.shifts, problem.powers, targets):
        x = x + s_map_vector(T, r, n, y)
    residuals = []
    for T, r, y in zip(problem.shifts, problem.powers, targets):
        residuals.append(vector_norm(problem.space, power_apply(T, x, r * n) - y))
    return x, residuals


__all__ = [
    "ShiftTuple",
    "Schedule",
    "ScheduleNotFound",
    "Windows",
    "check_dhc",
    "check_dsc",
    "search_schedule",
    "verify_criterion_pointwise",
    "synthesize_vector",
    "h1_forward",
    "h1_backward",
    "h2_first",
    "h2_second",
    "general_landings",
    "same_map_landings",
    "preconditions",
]
