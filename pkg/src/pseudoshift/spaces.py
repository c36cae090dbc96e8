"""Norm models for sequence spaces with a canonical basis.

Three kinds are built in: weighted ``l^p`` (``||e_i|| = w_i**(1/p)``), the
weighted ``L^p`` space of a directed tree, and ``l^2(Z, K)`` indexed by
``N x Z`` with orthonormal basis.  Basis norms are exact :class:`LogProduct`
values; norms of general finite vectors are floats computed with a max-shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .errors import TreeError
from .index_core import (
    UNDEFINED,
    FiniteTable,
    Grid,
    IndexSpace,
    ShiftMap,
    TreeVertices,
    iterate,
    resolve_window,
)
from .logmag import LogProduct

KINDS = ("weighted-lp", "tree-lp", "zk-hilbert")


def _unit(_index):
    return 1


@dataclass(frozen=True, eq=False)
class SpaceModel:
    """A sequence space over ``index_space`` in which ``||e_i||**p = weight(i)``."""

    kind: str
    index_space: IndexSpace
    p: Fraction = Fraction(2)
    weight: Callable = _unit
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        object.__setattr__(self, "p", Fraction(self.p))
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.kind == "zk-hilbert" and self.p != 2:
            raise ValueError("l^2(Z, K) has p = 2")
        object.__setattr__(self, "_cache", {})

    def basis_norm(self, index) -> LogProduct:
        """``||e_i||`` as an exact value; exact zero for UNDEFINED."""
        if index is UNDEFINED:
            return LogProduct.zero_value()
        cache = self._cache
        hit = cache.get(index)
        if hit is None:
            w = self.weight(index)
            if not isinstance(w, LogProduct):
                if w <= 0:
                    raise ValueError(f"basis weight at {index!r} must be positive")
                w = LogProduct.of(w)
            hit = w if self.p == 1 else w ** (1 / self.p)
            cache[index] = hit
        return hit

    def basis_lognorm(self, index) -> float:
        return self.basis_norm(index).log

    def dual_norm(self, index) -> LogProduct:
        """Norm of the coordinate functional ``f_i``; the inverse of ``||e_i||`` here."""
        return self.basis_norm(index).inverse()

    def same_as(self, other: "SpaceModel") -> bool:
        return self is other or (
            self.kind == other.kind
            and self.index_space == other.index_space
            and self.p == other.p
            and self.weight is other.weight
        )

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"SpaceModel({self.kind}{label}, p={self.p})"


def weighted_lp(index_space: IndexSpace, p=2, weight: Callable = _unit, name="") -> SpaceModel:
    return SpaceModel("weighted-lp", index_space, Fraction(p), weight, name)


def zk_hilbert() -> SpaceModel:
    return SpaceModel("zk-hilbert", Grid(), Fraction(2), _unit, "l2(Z,K)")


def basis_lognorm(space: SpaceModel, index) -> float:
    return space.basis_lognorm(index)


class FinVector:
    """A finitely supported vector ``sum c_i e_i`` with :class:`LogProduct` coefficients.

    Terms are kept in enumeration order with zero coefficients dropped, so
    two vectors with the same terms compare equal.
    """

    __slots__ = ("index_space", "terms")

    def __init__(self, index_space: IndexSpace, terms: Iterable = ()):
        acc = {}
        for index, coef in _pairs(terms):
            if index is UNDEFINED:
                continue
            coef = LogProduct.of(coef)
            if coef.is_zero:
                continue
            if index in acc:
                coef = acc[index] + coef
                if coef.is_zero:
                    del acc[index]
                    continue
            acc[index] = coef
        self.index_space = index_space
        self.terms = tuple((i, acc[i]) for i in index_space.sort(acc))

    @classmethod
    def basis(cls, index_space: IndexSpace, index, coef=1) -> "FinVector":
        return cls(index_space, [(index, coef)])

    @classmethod
    def zero(cls, index_space: IndexSpace) -> "FinVector":
        return cls(index_space)

    @property
    def support(self) -> tuple:
        return tuple(i for i, _ in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, index) -> LogProduct:
        for i, c in self.terms:
            if i == index:
                return c
        return LogProduct.zero_value()

    def scale(self, c) -> "FinVector":
        c = LogProduct.of(c)
        return FinVector(self.index_space, [(i, v * c) for i, v in self.terms])

    def __add__(self, other: "FinVector") -> "FinVector":
        return FinVector(self.index_space, self.terms + other.terms)

    def __neg__(self) -> "FinVector":
        return FinVector(self.index_space, [(i, -v) for i, v in self.terms])

    def __sub__(self, other: "FinVector") -> "FinVector":
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, FinVector) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __repr__(self):
        body = " + ".join(f"{c!r}*e{self.index_space.encode(i)}" for i, c in self.terms)
        return f"FinVector({body or '0'})"


def _pairs(terms):
    if isinstance(terms, dict):
        return terms.items()
    return terms


def _exact_power_sum(space: SpaceModel, x: FinVector):
    # sum |c|^p ||e_i||^p as a Fraction when every term is rational
    if space.p.denominator != 1:
        return None
    total = Fraction(0)
    for i, c in x.terms:
        term = (c.magnitude() * space.basis_norm(i)) ** space.p
        value = term.to_fraction()
        if value is None:
            return None
        total += value
    return total


def vector_lognorm(space: SpaceModel, x: FinVector) -> float:
    """Log of the space norm; ``-inf`` for the zero vector."""
    if x.is_zero():
        return -math.inf
    if len(x.terms) == 1:
        index, c = x.terms[0]
        return (c.magnitude() * space.basis_norm(index)).log
    p = float(space.p)
    logs = [p * (c.log + space.basis_lognorm(i)) for i, c in x.terms]
    logs = [t for t in logs if t != -math.inf]
    if not logs:
        return -math.inf
    top = max(logs)
    return (top + math.log(math.fsum(math.exp(t - top) for t in logs))) / p


def vector_norm(space: SpaceModel, x: FinVector) -> float:
    """The space norm as a float (``inf`` if it overflows; use :func:`vector_lognorm` then)."""
    exact = _exact_power_sum(space, x)
    if exact is not None:
        try:
            return float(exact) ** (1 / float(space.p))
        except OverflowError:
            pass
    log = vector_lognorm(space, x)
    if log == -math.inf:
        return 0.0
    try:
        return math.exp(log)
    except OverflowError:
        return math.inf


def op_basis_bound(space: SpaceModel, window) -> float:
    """Sampled ``sup ||e_i|| ||f_i||`` over a window."""
    indices = resolve_window(space.index_space, window)
    values = [space.basis_norm(i) * space.dual_norm(i) for i in indices]
    return max(values, key=lambda v: v.log).to_float() if values else 0.0


# --------------------------------------------------------------------------
# directed trees


@dataclass(frozen=True, eq=False)
class TreeSpace:
    """A directed tree with total parent map, partial child map and vertex weights."""

    vertices: IndexSpace
    par: Callable
    chi: Callable
    weight: Callable
    p: Fraction = Fraction(2)

    def parent_map(self) -> ShiftMap:
        return ShiftMap(self.vertices, self.par, self._child, ("tree-par", id(self)), "par")

    def shift_map(self, power: int) -> ShiftMap:
        """``par**power`` with inverse ``chi**power``."""
        return self.parent_map().power(power)

    def _child(self, v):
        c = self.chi(v)
        return UNDEFINED if c is None else c

    def space(self) -> SpaceModel:
        return SpaceModel("tree-lp", self.vertices, self.p, self.weight, "tree")

    def boundedness(self, window) -> dict:
        """Sampled ``sup lambda_chi(u) / lambda_u`` and ``sup lambda_chi2(u) / lambda_u``."""
        indices = resolve_window(self.vertices, window)
        out = {}
        for depth in (1, 2):
            best = LogProduct.zero_value()
            for u in indices:
                v = iterate(self.parent_map(), u, -depth)
                if v is UNDEFINED:
                    continue
                ratio = LogProduct.of(self.weight(v)) / self.weight(u)
                if ratio.log > best.log:
                    best = ratio
            out[f"chi^{depth}"] = best.to_float()
        return out


def tree_from_parent(parents, weights, p=2, child: Callable | None = None, vertices=None,
                     window: int = 64) -> TreeSpace:
    """Validate a parent map and derive the child map as its partial inverse.

    ``parents`` is either a dict (finite vertex set) or a callable; a callable
    needs an explicit ``child`` function and index space, and is checked on
    the first ``window`` vertices.  Checks run in order: outdegree, totality,
    cycles.
    """
    if isinstance(parents, dict):
        verts = FiniteTable(dict.fromkeys(list(parents) + [v for v in parents.values() if v is not None]))
        children = {}
        for v in parents:
            u = parents[v]
            if u in children:
                raise TreeError("OUTDEGREE", u, f"vertex {u!r} has children {children[u]!r} and {v!r}")
            children[u] = v
        for v in verts.enumerate():
            if parents.get(v) is None:
                raise TreeError("PARTIAL-PARENT", v, f"vertex {v!r} has no parent")
        for v in verts.enumerate():
            _check_no_cycle(parents.__getitem__, v, len(verts.labels))
        vertices = verts
        par, chi = parents.__getitem__, children.get
    else:
        if child is None or vertices is None:
            raise ValueError("an intensional parent map needs child= and vertices=")
        sample = vertices.window(window) if not vertices.finite else tuple(vertices.enumerate())
        seen = {}
        for v in sample:
            u = parents(v)
            if u is None or u is UNDEFINED:
                continue
            if u in seen:
                raise TreeError("OUTDEGREE", u, f"vertex {u!r} has children {seen[u]!r} and {v!r}")
            seen[u] = v
            c = child(u)
            if c != v:
                raise TreeError("OUTDEGREE", u, f"vertex {u!r} has children {c!r} and {v!r}")
        for v in sample:
            u = parents(v)
            if u is None or u is UNDEFINED:
                raise TreeError("PARTIAL-PARENT", v, f"vertex {v!r} has no parent")
        for v in sample:
            _check_no_cycle(parents, v, window)
        par, chi = parents, child
    if not callable(weights):
        weights = dict(weights).__getitem__
    return TreeSpace(vertices, par, chi, weights, Fraction(p))


def _check_no_cycle(par, v, bound):
    cur = v
    for _ in range(bound):
        cur = par(cur)
        if cur == v:
            raise TreeError("CYCLE", v, f"vertex {v!r} is its own ancestor")


def path_tree(weights: Callable, p=2) -> TreeSpace:
    """The bi-infinite directed path on ``Z`` with ``par(v) = v + 1``."""
    return tree_from_parent(
        lambda v: v + 1, weights, p, child=lambda v: v - 1, vertices=TreeVertices()
    )


__all__ = [
    "SpaceModel",
    "weighted_lp",
    "zk_hilbert",
    "basis_lognorm",
    "FinVector",
    "vector_norm",
    "vector_lognorm",
    "op_basis_bound",
    "TreeSpace",
    "tree_from_parent",
    "path_tree",
]
