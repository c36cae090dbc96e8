"""Countable index sets and injective shift maps, evaluated lazily.

Infinite sets are never materialised.  An :class:`IndexSpace` is an
enumeration plus a membership test; a :class:`ShiftMap` is a forward
function with its partial inverse.  Every search below works on an explicit
finite window and horizon and says so in its report: a negative answer means
"not found within the search bounds", never "proved".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Hashable, Iterator, Sequence


class _Undefined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDEFINED"

    def __bool__(self):
        return False

    def __reduce__(self):
        return (_Undefined, ())


UNDEFINED = _Undefined()
"""Result of a backward step that leaves the range of the map."""


def _z_at(m: int) -> int:
    # 0, 1, -1, 2, -2, ...
    return (m + 1) // 2 if m % 2 else -(m // 2)


def _z_pos(z: int) -> int:
    return 2 * z - 1 if z > 0 else -2 * z


class IndexSpace:
    """A countable index set with a fixed enumeration ``i_1, i_2, ...``."""

    kind = "abstract"
    finite = False

    def enumerate(self) -> Iterator:
        raise NotImplementedError

    def position(self, index) -> int:
        raise NotImplementedError

    def contains(self, index) -> bool:
        raise NotImplementedError

    def encode(self, index) -> str:
        return str(index)

    def window(self, k: int) -> tuple:
        """The prefix ``I_k`` of the enumeration."""
        if k < 0:
            raise ValueError("window size must be non-negative")
        return tuple(itertools.islice(self.enumerate(), k))

    def sort(self, indices) -> list:
        return sorted(indices, key=self.position)

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def _key(self):
        return ()

    def __repr__(self):
        return f"{type(self).__name__}()"


class Integers(IndexSpace):
    """``Z`` enumerated as 0, 1, -1, 2, -2, ..."""

    kind = "integers"

    def enumerate(self):
        for m in itertools.count():
            yield _z_at(m)

    def position(self, index):
        return _z_pos(index)

    def contains(self, index):
        return isinstance(index, int) and not isinstance(index, bool)


class Naturals(IndexSpace):
    kind = "naturals"

    def enumerate(self):
        return itertools.count()

    def position(self, index):
        return index

    def contains(self, index):
        return isinstance(index, int) and not isinstance(index, bool) and index >= 0


class Grid(IndexSpace):
    """``N x Z`` enumerated along anti-diagonals of (i, position of j in Z)."""

    kind = "grid"

    def enumerate(self):
        for d in itertools.count():
            for i in range(d + 1):
                yield (i, _z_at(d - i))

    def position(self, index):
        i, j = index
        d = i + _z_pos(j)
        return d * (d + 1) // 2 + i

    def contains(self, index):
        return (
            isinstance(index, tuple)
            and len(index) == 2
            and Naturals().contains(index[0])
            and Integers().contains(index[1])
        )

    def encode(self, index):
        return f"({index[0]},{index[1]})"


class FiniteTable(IndexSpace):
    """A finite labelled set, enumerated in the given order."""

    kind = "table"
    finite = True

    def __init__(self, labels: Sequence[Hashable]):
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise ValueError("table labels must be distinct")
        self.labels = labels
        self._pos = {lab: n for n, lab in enumerate(labels)}

    def enumerate(self):
        return iter(self.labels)

    def window(self, k):
        if k > len(self.labels):
            raise ValueError(f"table has only {len(self.labels)} indices")
        return self.labels[:k]

    def position(self, index):
        return self._pos[index]

    def contains(self, index):
        return index in self._pos

    def _key(self):
        return self.labels

    def __repr__(self):
        return f"FiniteTable({list(self.labels)!r})"


class TreeVertices(Integers):
    """Vertices of the bi-infinite directed path, labelled by ``Z``.

    This is the only connected unrooted directed tree in which every vertex
    has one parent and at most one child; ``par(v) = v + 1``.
    """

    kind = "tree"


def resolve_window(space: IndexSpace, window) -> tuple:
    """Accept either a prefix size or an explicit sequence of indices."""
    if isinstance(window, int):
        return space.window(window)
    return tuple(window)


@dataclass(frozen=True, eq=False)
class ShiftMap:
    """An injective map ``phi`` with partial inverse ``psi`` on one index space.

    ``backward`` returns :data:`UNDEFINED` outside ``phi(I)``.  ``key`` is a
    hashable description used for equality; maps without a key compare by
    identity.
    """

    space: IndexSpace
    forward: Callable
    backward: Callable
    key: Hashable = None
    name: str = "phi"

    def __call__(self, index):
        return self.forward(index)

    def inverse(self, index):
        if index is UNDEFINED:
            return UNDEFINED
        return self.backward(index)

    def in_range(self, index) -> bool:
        return self.inverse(index) is not UNDEFINED

    def iterate(self, index, n: int):
        return iterate(self, index, n)

    def power(self, m: int) -> "ShiftMap":
        """The map ``phi**m`` (``m >= 1``) with inverse ``psi**m``."""
        if m < 1:
            raise ValueError("power must be >= 1")
        if m == 1:
            return self
        base = self
        key = None if self.key is None else ("power", self.key, m)
        return ShiftMap(
            self.space,
            lambda i: iterate(base, i, m),
            lambda i: iterate(base, i, -m),
            key,
            f"{self.name}^{m}",
        )

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, ShiftMap) or self.key is None or other.key is None:
            return False
        return self.space == other.space and self.key == other.key

    def __hash__(self):
        if self.key is None:
            return id(self)
        return hash((self.space, self.key))

    def __repr__(self):
        return f"ShiftMap({self.name}, key={self.key!r})"

    # constructors ---------------------------------------------------------

    @classmethod
    def translation(cls, space: IndexSpace, step: int) -> "ShiftMap":
        """``i -> i + step`` on Z, N or tree labels (N needs ``step >= 0``)."""
        if isinstance(space, Naturals):
            if step < 0:
                raise ValueError("a translation of N must have step >= 0")

            def back(i, step=step):
                j = i - step
                return j if j >= 0 else UNDEFINED

            return cls(space, lambda i: i + step, back, ("translate", step), f"i+{step}")
        if isinstance(space, Integers):
            return cls(
                space, lambda i: i + step, lambda i: i - step, ("translate", step), f"i+{step}"
            )
        raise TypeError(f"translation is not defined on {space!r}")

    @classmethod
    def grid_translation(cls, step: int = -1) -> "ShiftMap":
        """``(i, j) -> (i, j + step)`` on N x Z."""
        return cls(
            Grid(),
            lambda ij: (ij[0], ij[1] + step),
            lambda ij: (ij[0], ij[1] - step),
            ("grid-translate", step),
            f"(i,j{step:+d})",
        )

    @classmethod
    def from_table(cls, space: IndexSpace, images: dict, name: str = "table") -> "ShiftMap":
        """A map given by an explicit dict; checked injective and total on ``space``."""
        if not space.finite:
            raise TypeError("from_table needs a finite index space")
        missing = [i for i in space.enumerate() if i not in images]
        if missing:
            raise ValueError(f"map undefined at {missing[0]!r}")
        inverse = {}
        for src, dst in images.items():
            if not space.contains(dst):
                raise ValueError(f"image {dst!r} of {src!r} is outside the index set")
            if dst in inverse:
                raise ValueError(f"map is not injective: {inverse[dst]!r}, {src!r} -> {dst!r}")
            inverse[dst] = src
        frozen = tuple(sorted(images.items(), key=lambda kv: space.position(kv[0])))
        return cls(
            space,
            images.__getitem__,
            lambda i: inverse.get(i, UNDEFINED),
            ("table", frozen),
            name,
        )


def iterate(map: ShiftMap, index, n: int):
    """Apply ``phi`` ``n`` times (``n >= 0``) or ``psi`` ``|n|`` times (``n < 0``)."""
    if index is UNDEFINED:
        return UNDEFINED
    if n >= 0:
        for _ in range(n):
            index = map.forward(index)
        return index
    for _ in range(-n):
        index = map.backward(index)
        if index is UNDEFINED:
            return UNDEFINED
    return index


# --------------------------------------------------------------------------
# finite searches

SEARCH_NOTE = "not found within search bounds"


@dataclass(frozen=True)
class PeriodicityReport:
    window: tuple
    max_period: int
    periodic: tuple  # ((index, smallest period), ...)
    contradiction: bool = False
    note: str = SEARCH_NOTE

    @property
    def found(self) -> bool:
        return bool(self.periodic)

    def to_dict(self, space: IndexSpace):
        return {
            "window": [space.encode(i) for i in self.window],
            "max_period": self.max_period,
            "periodic": [{"index": space.encode(i), "period": m} for i, m in self.periodic],
            "contradiction": self.contradiction,
            "note": self.note if not self.periodic else "periodic points found",
        }


def has_periodic_point(map: ShiftMap, window_size, max_period: int) -> PeriodicityReport:
    """Report every window index with ``phi**M(i) == i`` for some ``M <= max_period``.

    An empty report only means none was found.  If the window is mapped into
    itself and every period up to its size was searched, an empty result is
    impossible for an injective map; the report flags that as a contradiction
    in the harness.
    """
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    window = resolve_window(map.space, window_size)
    found = []
    for i in window:
        cur = i
        for m in range(1, max_period + 1):
            cur = map.forward(cur)
            if cur == i:
                found.append((i, m))
                break
    contradiction = False
    if not found and max_period >= len(window):
        members = set(window)
        contradiction = all(map.forward(i) in members for i in window)
    return PeriodicityReport(window, max_period, tuple(found), contradiction)


@dataclass(frozen=True)
class RunAwayReport:
    kind: str  # "run-away" | "run-away-with"
    powers: tuple
    window: tuple
    horizon: int
    n0: int | None
    witness: dict | None = None
    note: str = "sampled on a finite window and horizon"

    @property
    def passed(self) -> bool:
        return self.n0 is not None

    def to_dict(self, space: IndexSpace):
        witness = None
        if self.witness is not None:
            witness = {
                key: (space.encode(v) if key in ("index", "other", "hit") else v)
                for key, v in self.witness.items()
            }
        return {
            "kind": self.kind,
            "powers": list(self.powers),
            "window": [space.encode(i) for i in self.window],
            "horizon": self.horizon,
            "status": "PASS" if self.passed else "FAIL",
            "n0": self.n0,
            "witness": witness,
            "note": self.note,
        }


def is_run_away(map: ShiftMap, power: int, window_size, horizon: int) -> RunAwayReport:
    """Smallest ``n0 <= horizon`` with ``(phi**power)**n (I0)`` disjoint from ``I0`` on ``[n0, horizon]``.

    On failure the witness prefers an index that returns to itself (a cycle
    inside the window), which shows the intersection recurs forever; otherwise
    it is the first intersection found.
    """
    if power < 1 or horizon < 1:
        raise ValueError("power and horizon must be >= 1")
    window = resolve_window(map.space, window_size)
    members = set(window)
    step = map.power(power)
    images = list(window)
    last_hit = 0
    first = None
    cycle = None
    for n in range(1, horizon + 1):
        images = [step.forward(x) for x in images]
        for src, img in zip(window, images):
            if img in members:
                last_hit = n
                if first is None:
                    first = {"index": src, "n": n, "hit": img}
                if img == src and cycle is None:
                    cycle = {"index": src, "n": n, "hit": img}
    if last_hit < horizon:
        return RunAwayReport("run-away", (power,), window, horizon, last_hit + 1)
    return RunAwayReport("run-away", (power,), window, horizon, None, cycle or first)


def run_away_with(
    map_a: ShiftMap, power_a: int, map_b: ShiftMap, power_b: int, window_size, horizon: int
) -> RunAwayReport:
    """Smallest ``n0`` with ``A**n (I0)`` and ``B**n (I0)`` disjoint on ``[n0, horizon]``."""
    if map_a.space != map_b.space:
        raise ValueError("run_away_with needs maps on one index space")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    window = resolve_window(map_a.space, window_size)
    step_a, step_b = map_a.power(power_a), map_b.power(power_b)
    img_a, img_b = list(window), list(window)
    last_hit = 0
    first = None
    for n in range(1, horizon + 1):
        img_a = [step_a.forward(x) for x in img_a]
        img_b = [step_b.forward(x) for x in img_b]
        where_b = {img: src for src, img in zip(window, img_b)}
        for src, img in zip(window, img_a):
            if img in where_b:
                last_hit = n
                if first is None:
                    first = {"index": src, "other": where_b[img], "n": n, "hit": img}
                break
    powers = (power_a, power_b)
    if last_hit < horizon:
        return RunAwayReport("run-away-with", powers, window, horizon, last_hit + 1)
    return RunAwayReport("run-away-with", powers, window, horizon, None, first)


@dataclass(frozen=True)
class EscapeReport:
    window: tuple
    horizon: int
    escape: tuple  # ((index, n or None), ...)
    note: str = "escape observed up to the horizon only"

    @property
    def all_escaped(self) -> bool:
        return all(n is not None for _, n in self.escape)

    def escape_time(self, index):
        for i, n in self.escape:
            if i == index:
                return n
        raise KeyError(index)

    def to_dict(self, space: IndexSpace):
        return {
            "window": [space.encode(i) for i in self.window],
            "horizon": self.horizon,
            "escape": [
                {"index": space.encode(i), "n": n if n is not None else "NOT-ESCAPED"}
                for i, n in self.escape
            ],
            "all_escaped": self.all_escaped,
            "note": self.note,
        }


def escape_time(map: ShiftMap, index, horizon: int):
    """Smallest ``n <= horizon`` with ``index`` outside ``phi**n (I)``, else ``None``.

    Leaving ``phi**n (I)`` is permanent because ``psi`` annihilates, so this is
    also the point after which the index stays outside.
    """
    cur = index
    for n in range(1, horizon + 1):
        cur = map.backward(cur)
        if cur is UNDEFINED:
            return n
    return None


def escapes_range(map: ShiftMap, window_size, horizon: int) -> EscapeReport:
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    window = resolve_window(map.space, window_size)
    return EscapeReport(window, horizon, tuple((i, escape_time(map, i, horizon)) for i in window))


__all__ = [
    "UNDEFINED",
    "IndexSpace",
    "Integers",
    "Naturals",
    "Grid",
    "FiniteTable",
    "TreeVertices",
    "ShiftMap",
    "iterate",
    "resolve_window",
    "has_periodic_point",
    "is_run_away",
    "run_away_with",
    "escapes_range",
    "escape_time",
    "PeriodicityReport",
    "RunAwayReport",
    "EscapeReport",
]
