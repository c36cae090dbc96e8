"""Built-in worked examples with their expected verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .criteria import Schedule, ShiftTuple, Windows, check_dhc, check_dsc
from .errors import ParamRangeError, ValidationError
from .index_core import Naturals, ShiftMap
from .logmag import LogProduct
from .ows import DiagonalWeightFamily, OwsOperator, OwsProblem, check_ows_dsc, check_ows_powers_dsc
from .report import FAIL, PASS
from .shift_ops import PseudoShift
from .spaces import TreeSpace, path_tree, weighted_lp

# ---------------------------------------------------------------- directed tree


def tree_weights(s1, s2) -> Callable:
    """``lambda_u`` on the path labelled by Z with base vertex 0 and ``par(v) = v + 1``.

    Vertices ``v > 0`` are ancestors of the base vertex and get ``s1**-v``;
    vertices ``v < 0`` are descendants and get ``s2**v``.
    """
    up, down = LogProduct.of(s1), LogProduct.of(s2)

    def weight(v):
        return up ** (-v) if v >= 0 else down ** v

    return weight


def build_tree(s1=2, s2=2, p=2) -> TreeSpace:
    if not (1 < Fraction(s1) <= Fraction(s2)):
        raise ParamRangeError(f"need 1 < s1 <= s2, got s1={s1}, s2={s2}")
    if Fraction(p) < 1:
        raise ParamRangeError(f"need p >= 1, got {p}")
    return path_tree(tree_weights(s1, s2), p)


def build_tree_example(s1=2, s2=2, p=2) -> ShiftTuple:
    """Unweighted shifts ``S_1 = par`` and ``S_2 = par^2`` on the weighted path, powers (1, 2)."""
    tree = build_tree(s1, s2, p)
    space = tree.space()
    one = lambda v: 1
    S1 = PseudoShift(space, tree.shift_map(1), one, "S1")
    S2 = PseudoShift(space, tree.shift_map(2), one, "S2")
    return ShiftTuple([S1, S2], (1, 2), "tree-path")


# ----------------------------------------------------- unilateral backward shifts


def build_unilateral_example(weights=(2, 2), powers=(1, 2), p=2) -> ShiftTuple:
    """Backward shifts on ``l^p(N)`` with ``T_l e_j = a_l(j) e_{j-1}`` and ``T_l e_0 = 0``.

    Each entry of ``weights`` is a constant or a function of ``j >= 1``; as a
    pseudo-shift ``b_i = a_l(i + 1)`` and ``phi(i) = i + 1``.
    """
    if len(weights) != len(powers):
        raise ValidationError("weights", "one weight rule per power")
    space = weighted_lp(Naturals(), p)
    phi = ShiftMap.translation(Naturals(), 1)
    shifts = []
    for l, a in enumerate(weights):
        rule = a if callable(a) else (lambda j, c=a: c)
        shifts.append(PseudoShift(space, phi, lambda i, rule=rule: rule(i + 1), f"T{l + 1}"))
    return ShiftTuple(shifts, powers, "unilateral-backward")


# ------------------------------------------------------------ diagonal weights


def _block_start(s: int) -> int:
    return 2 ** (2 * s + 1)


@lru_cache(maxsize=None)
def block_of(n: int):
    """``("C" | "D" | "E", s)`` for the block containing ``n``, else ``None``."""
    if n < 0:
        m = -n
        s = (m.bit_length() - 2) // 2
        if s >= 0 and m == _block_start(s):
            return ("E", s)
        return None
    s = 0
    while _block_start(s) - (2 * s + 1) <= n:
        start = _block_start(s)
        if start - (2 * s + 1) <= n <= start - 1:
            return ("C", s)
        if start <= n <= start + 2 * s:
            return ("D", s)
        s += 1
    return None


HALF = Fraction(1, 2)


def example_4_3_entry(k: int, n: int):
    """Diagonal entry ``a(k, n)`` of the weight ``A_n``."""
    block = block_of(n)
    if block is None:
        return 1
    kind = block[0]
    if kind == "C":
        return HALF if k <= n else 1
    if kind == "D":
        return 2 if k <= n else 1
    return 2 if k <= -n else 1


def build_example_4_3() -> OwsProblem:
    """``(T, T^2)`` for the forward shift with the piecewise weights above."""
    T = OwsOperator(DiagonalWeightFamily(example_4_3_entry, "A"), "forward")
    return OwsProblem([T, T], (1, 2), "example-4-3")


def example_4_3_schedule(K: int = 5) -> Schedule:
    return Schedule.formula(lambda k: 2 ** (2 * k + 1), K)


def example_4_3_grid_windows() -> Windows:
    return Windows.bounded(lambda ij: ij[0] <= 4 and abs(ij[1]) <= 4, "i <= 4, |j| <= 4")


def example_4_3_basis_windows() -> Windows:
    return Windows.bounded(lambda i: i <= 4, "i <= 4")


# ------------------------------------------------------------------- registry


@dataclass
class GalleryCheck:
    checker: str
    expected: str
    run: Callable
    witness: str | None = None


@dataclass
class GalleryEntry:
    name: str
    description: str
    parameters: dict
    build: Callable
    schedule: Schedule
    checks: dict = field(default_factory=dict)
    default_mode: str = "super"

    def run(self, mode: str | None = None):
        mode = mode or self.default_mode
        if mode not in self.checks:
            raise ValidationError("mode", f"{self.name} has no {mode!r} check; "
                                          f"choose from {sorted(self.checks)}")
        return self.checks[mode].run()


def _example_4_3_entry() -> GalleryEntry:
    schedule = example_4_3_schedule()

    def problem():
        return build_example_4_3()

    return GalleryEntry(
        "example-4-3",
        "forward operator-weighted shift with piecewise diagonal weights; (T, T^2)",
        {"K": 5, "schedule": "n_k = 2^(2k+1)", "windows": "i <= 4, |j| <= 4"},
        problem,
        schedule,
        {
            "super": GalleryCheck("check_dsc", PASS, lambda: check_dsc(
                problem().to_shift_tuple(), schedule, example_4_3_grid_windows())),
            "hyper": GalleryCheck("check_dhc", FAIL, lambda: check_dhc(
                problem().to_shift_tuple(), schedule, example_4_3_grid_windows()),
                "(H1)-backward, l=2"),
            "ows": GalleryCheck("check_ows_dsc", PASS, lambda: check_ows_dsc(
                problem(), schedule, example_4_3_grid_windows())),
            "ows-powers": GalleryCheck("check_ows_powers_dsc", PASS, lambda: check_ows_powers_dsc(
                problem().operators[0], 2, schedule, example_4_3_basis_windows())),
        },
        "super",
    )


def _tree_entry() -> GalleryEntry:
    schedule = Schedule.formula(lambda k: 2 * k, 6)
    return GalleryEntry(
        "tree-path",
        "unweighted shifts S_1 = par, S_2 = par^2 on the weighted bi-infinite path",
        {"s1": 2, "s2": 2, "p": 2, "K": 6, "schedule": "n_k = 2k"},
        build_tree_example,
        schedule,
        {"hyper": GalleryCheck("check_dhc", PASS, lambda: check_dhc(build_tree_example(), schedule))},
        "hyper",
    )


def _unilateral_entry() -> GalleryEntry:
    schedule = Schedule.formula(lambda k: k, 6)
    return GalleryEntry(
        "unilateral-backward",
        "unilateral backward shifts on l^2(N) with weights a_l = 2, powers (1, 2)",
        {"weights": [2, 2], "powers": [1, 2], "K": 6, "schedule": "n_k = k"},
        build_unilateral_example,
        schedule,
        {"super": GalleryCheck("check_dsc", PASS, lambda: check_dsc(
            build_unilateral_example(), schedule, mode="escaping"))},
        "super",
    )


GALLERY = {e.name: e for e in (_example_4_3_entry(), _tree_entry(), _unilateral_entry())}


def get(name: str) -> GalleryEntry:
    try:
        return GALLERY[name]
    except KeyError:
        raise ValidationError("gallery", f"unknown gallery entry {name!r}; "
                                         f"known: {', '.join(sorted(GALLERY))}") from None


__all__ = [
    "build_tree",
    "build_tree_example",
    "build_unilateral_example",
    "build_example_4_3",
    "example_4_3_entry",
    "example_4_3_schedule",
    "example_4_3_grid_windows",
    "example_4_3_basis_windows",
    "block_of",
    "tree_weights",
    "GALLERY",
    "GalleryEntry",
    "GalleryCheck",
    "get",
]
