"""Weighted pseudo-shifts ``(T x)_i = b_i x_phi(i)`` and their orbit products.

On basis vectors ``T e_i = b_psi(i) e_psi(i)``, which vanishes when ``i`` is
outside the range of ``phi``.  All products come back as exact
:class:`LogProduct` values together with the index they land on.
"""

from __future__ import annotations

from typing import Callable

from .index_core import UNDEFINED, ShiftMap, resolve_window
from .logmag import LogAccumulator, LogProduct
from .spaces import FinVector, SpaceModel


class _Orbit:
    """Lazily extended orbit of one index with running weight products."""

    __slots__ = ("indices", "products", "acc", "step", "weight")

    def __init__(self, start, step, weight):
        self.indices = [start]
        self.products = [LogProduct.one()]
        self.acc = LogAccumulator()
        self.step = step
        self.weight = weight

    def extend_to(self, n):
        while len(self.indices) <= n:
            self.extend_one(self.indices[-1])

    def extend_one(self, cur):
        raise NotImplementedError


class _ForwardOrbit(_Orbit):
    # products[n] = b_i b_phi(i) ... b_phi^(n-1)(i), indices[n] = phi^n(i)
    __slots__ = ()

    def extend_one(self, cur):
        self.acc.mul(self.weight(cur))
        self.indices.append(self.step(cur))
        self.products.append(self.acc.freeze())


class _BackwardOrbit(_Orbit):
    # products[n] = b_psi(i) ... b_psi^n(i), indices[n] = psi^n(i)
    __slots__ = ()

    def extend_one(self, cur):
        nxt = UNDEFINED if cur is UNDEFINED else self.step(cur)
        self.indices.append(nxt)
        if nxt is UNDEFINED:
            self.products.append(LogProduct.zero_value())
            return
        self.acc.mul(self.weight(nxt))
        self.products.append(self.acc.freeze())


class PseudoShift:
    """The operator ``T_{b, phi}`` on a :class:`SpaceModel`.

    ``weight`` maps an index to a non-zero scalar (or :class:`LogProduct`).
    Weights and orbit products are memoised per instance; the memo never
    changes any result.
    """

    def __init__(self, space: SpaceModel, map: ShiftMap, weight: Callable, name: str = "T"):
        if map.space != space.index_space:
            raise ValueError("shift map and space use different index sets")
        self.space = space
        self.map = map
        self._weight = weight
        self.name = name
        self._weights = {}
        self._fwd = {}
        self._bwd = {}

    def weight(self, index) -> LogProduct:
        """``b_i`` as a :class:`LogProduct`; exact zero at UNDEFINED."""
        if index is UNDEFINED:
            return LogProduct.zero_value()
        hit = self._weights.get(index)
        if hit is None:
            w = self._weight(index)
            hit = LogProduct.of(w)
            if hit.is_zero:
                raise ValueError(f"weight vanishes at {index!r}")
            self._weights[index] = hit
        return hit

    def _forward_orbit(self, i) -> _ForwardOrbit:
        orbit = self._fwd.get(i)
        if orbit is None:
            orbit = self._fwd[i] = _ForwardOrbit(i, self.map.forward, self.weight)
        return orbit

    def _backward_orbit(self, i) -> _BackwardOrbit:
        orbit = self._bwd.get(i)
        if orbit is None:
            orbit = self._bwd[i] = _BackwardOrbit(i, self.map.backward, self.weight)
        return orbit

    def forward(self, i, n: int):
        """``(prod_{v<n} b_phi^v(i), phi^n(i))``."""
        if n < 0:
            raise ValueError("n must be >= 0")
        orbit = self._forward_orbit(i)
        orbit.extend_to(n)
        return orbit.products[n], orbit.indices[n]

    def backward(self, i, n: int):
        """``(prod_{v=1..n} b_psi^v(i), psi^n(i))``; exact zero once psi is undefined."""
        if n < 0:
            raise ValueError("n must be >= 0")
        if i is UNDEFINED:
            return LogProduct.zero_value(), UNDEFINED
        orbit = self._backward_orbit(i)
        orbit.extend_to(n)
        return orbit.products[n], orbit.indices[n]

    def scaled(self, c, name=None) -> "PseudoShift":
        """The same shift with every weight multiplied by ``c``."""
        c = LogProduct.of(c)
        base = self._weight
        return PseudoShift(self.space, self.map, lambda i: LogProduct.of(base(i)) * c,
                           name or f"{self.name}*c")

    def boundedness(self, window) -> float:
        """Sampled ``sup ||T e_i|| / ||e_i||`` over a window (0 if ``T`` kills the window)."""
        best = LogProduct.zero_value()
        for i in resolve_window(self.space.index_space, window):
            j = self.map.inverse(i)
            if j is UNDEFINED:
                continue
            ratio = self.weight(j) * self.space.basis_norm(j) / self.space.basis_norm(i)
            if ratio.log > best.log:
                best = ratio
        return best.to_float()

    def __repr__(self):
        return f"PseudoShift({self.name}, {self.map!r})"


def forward_product(T: PseudoShift, i, n: int) -> LogProduct:
    return T.forward(i, n)[0]


def backward_product(T: PseudoShift, i, n: int):
    return T.backward(i, n)


def apply(T: PseudoShift, x: FinVector) -> FinVector:
    terms = []
    for i, c in x:
        j = T.map.inverse(i)
        if j is not UNDEFINED:
            terms.append((j, c * T.weight(j)))
    return FinVector(x.index_space, terms)


def power_apply(T: PseudoShift, x: FinVector, n: int) -> FinVector:
    """``T**n x`` computed term by term from backward products."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return x
    terms = []
    for i, c in x:
        prod, landing = T.backward(i, n)
        if landing is not UNDEFINED:
            terms.append((landing, c * prod))
    return FinVector(x.index_space, terms)


def s_map(T: PseudoShift, r: int, n: int, i) -> FinVector:
    """``S e_i``: the scaled basis vector that ``T**(r n)`` sends back to ``e_i``."""
    if r < 1 or n < 1:
        raise ValueError("r and n must be >= 1")
    prod, landing = T.forward(i, r * n)
    return FinVector.basis(T.space.index_space, landing, prod.inverse())


def s_map_vector(T: PseudoShift, r: int, n: int, x: FinVector) -> FinVector:
    """``S`` extended linearly to a finite vector."""
    terms = []
    for i, c in x:
        prod, landing = T.forward(i, r * n)
        terms.append((landing, c / prod))
    return FinVector(x.index_space, terms)


__all__ = [
    "PseudoShift",
    "apply",
    "forward_product",
    "backward_product",
    "power_apply",
    "s_map",
    "s_map_vector",
]
