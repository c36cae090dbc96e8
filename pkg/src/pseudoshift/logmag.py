"""Exact log-domain products of non-zero scalars.

A :class:`LogProduct` stores a scalar as ``phase * prod(base ** exponent)``
where every base is a rational number greater than one and every exponent is
a rational.  The log-magnitude is evaluated with :func:`math.fsum` only when
asked for, so products of thousands of weights such as ``2**-8192`` never
overflow and products that cancel algebraically cancel exactly.

Addition cannot stay symbolic; sums fall back to a float log ``offset`` and a
free complex phase atom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from numbers import Rational

_MINUS_ONE = complex(-1.0, 0.0)


@lru_cache(maxsize=None)
def _log_base(base: Fraction) -> float:
    return math.log(base.numerator) - math.log(base.denominator)


@lru_cache(maxsize=65536)
def _normalize(value):
    """Split a non-zero number into ``(base, sign, atom)``.

    ``abs(value) == base ** sign`` with ``base > 1`` (``None`` when the
    magnitude is exactly one) and ``atom`` is the unit phase, ``None`` for
    positive reals.
    """
    atom = None
    if isinstance(value, complex):
        if value.imag == 0.0:
            value = value.real
        else:
            mag = abs(value)
            atom = value / mag
            value = mag
    if isinstance(value, Rational):
        mag = Fraction(value)
    else:
        if not math.isfinite(value):
            raise ValueError(f"non-finite scalar {value!r}")
        mag = Fraction(value)
    if mag == 0:
        raise ZeroDivisionError("zero has no log-magnitude")
    if mag < 0:
        mag = -mag
        atom = _MINUS_ONE
    if mag == 1:
        return None, 0, atom
    if mag < 1:
        return 1 / mag, -1, atom
    return mag, 1, atom


def _merge(target: dict, items, scale=1):
    for key, exp in items:
        new = target.get(key, 0) + exp * scale
        if new:
            target[key] = new
        else:
            target.pop(key, None)


def _clean_atoms(atoms: dict) -> tuple:
    out = []
    for atom, exp in atoms.items():
        if atom == _MINUS_ONE:
            exp %= 2
        if exp:
            out.append((atom, exp))
    out.sort(key=lambda pair: (pair[0].real, pair[0].imag))
    return tuple(out)


@dataclass(frozen=True)
class LogProduct:
    factors: tuple = ()
    atoms: tuple = ()
    offset: float = 0.0
    zero: bool = False

    # constructors ---------------------------------------------------------

    @classmethod
    def one(cls) -> "LogProduct":
        return _ONE

    @classmethod
    def zero_value(cls) -> "LogProduct":
        return _ZERO

    @classmethod
    def of(cls, value) -> "LogProduct":
        if isinstance(value, LogProduct):
            return value
        if value == 0:
            return _ZERO
        base, sign, atom = _normalize(value)
        factors = ((base, Fraction(sign)),) if base is not None else ()
        atoms = ((atom, 1),) if atom is not None else ()
        return cls(factors, atoms)

    @classmethod
    def power_of(cls, base, exponent) -> "LogProduct":
        """``base ** exponent`` for a positive base and rational exponent, kept symbolic."""
        if base <= 0:
            raise ValueError("power_of needs a positive base")
        return cls.of(base) ** Fraction(exponent)

    @classmethod
    def from_log(cls, log_magnitude: float, phase: complex = 1.0) -> "LogProduct":
        if log_magnitude == -math.inf:
            return _ZERO
        atoms = ()
        if phase != 1:
            atoms = ((complex(phase), 1),)
        return cls((), atoms, float(log_magnitude))

    # algebra --------------------------------------------------------------

    def __mul__(self, other) -> "LogProduct":
        if not isinstance(other, LogProduct):
            other = LogProduct.of(other)
        if self.zero or other.zero:
            return _ZERO
        if not other.factors and not other.atoms and not other.offset:
            return self
        if not self.factors and not self.atoms and not self.offset:
            return other
        factors = dict(self.factors)
        _merge(factors, other.factors)
        atoms = dict(self.atoms)
        _merge(atoms, other.atoms)
        return LogProduct(
            tuple(sorted(factors.items())),
            _clean_atoms(atoms),
            self.offset + other.offset,
        )

    __rmul__ = __mul__

    def inverse(self) -> "LogProduct":
        if self.zero:
            raise ZeroDivisionError("inverse of an exact zero")
        return LogProduct(
            tuple((b, -e) for b, e in self.factors),
            _clean_atoms({a: -e for a, e in self.atoms}),
            -self.offset,
        )

    def __truediv__(self, other) -> "LogProduct":
        if not isinstance(other, LogProduct):
            other = LogProduct.of(other)
        return self * other.inverse()

    def __rtruediv__(self, other) -> "LogProduct":
        return LogProduct.of(other) * self.inverse()

    def __pow__(self, exponent) -> "LogProduct":
        exponent = Fraction(exponent)
        if self.zero:
            if exponent <= 0:
                raise ZeroDivisionError("non-positive power of an exact zero")
            return _ZERO
        if exponent == 0:
            return _ONE
        if self.atoms and exponent.denominator != 1:
            raise ValueError("fractional power of a value with a phase")
        return LogProduct(
            tuple((b, e * exponent) for b, e in self.factors),
            _clean_atoms({a: e * int(exponent) for a, e in self.atoms}),
            self.offset * float(exponent),
        )

    def __neg__(self) -> "LogProduct":
        if self.zero:
            return self
        return self * LogProduct((), ((_MINUS_ONE, 1),))

    def magnitude(self) -> "LogProduct":
        if not self.atoms:
            return self
        return LogProduct(self.factors, (), self.offset, self.zero)

    def __add__(self, other) -> "LogProduct":
        if not isinstance(other, LogProduct):
            other = LogProduct.of(other)
        if self.zero:
            return other
        if other.zero:
            return self
        if self == other:
            return self * 2
        if self == -other:
            return _ZERO
        la, lb = self.log, other.log
        top = max(la, lb)
        z = self.phase * math.exp(la - top) + other.phase * math.exp(lb - top)
        size = abs(z)
        if size == 0.0:
            return _ZERO
        return LogProduct.from_log(top + math.log(size), z / size)

    __radd__ = __add__

    def __sub__(self, other) -> "LogProduct":
        if not isinstance(other, LogProduct):
            other = LogProduct.of(other)
        if self == other:
            return _ZERO
        return self + (-other)

    # read-out -------------------------------------------------------------

    @cached_property
    def log(self) -> float:
        """Natural log of the magnitude; ``-inf`` for an exact zero."""
        if self.zero:
            return -math.inf
        terms = [float(e) * _log_base(b) for b, e in self.factors]
        if self.offset:
            terms.append(self.offset)
        return math.fsum(terms)

    @property
    def phase(self) -> complex:
        out = complex(1.0)
        for atom, exp in self.atoms:
            out *= atom ** exp
        return out

    @property
    def is_zero(self) -> bool:
        return self.zero

    @property
    def is_one(self) -> bool:
        return self == _ONE

    @property
    def exact(self) -> bool:
        return self.offset == 0.0

    def to_complex(self) -> complex:
        if self.zero:
            return 0j
        exact = self.to_fraction(max_bits=1000)
        if exact is not None:
            return self.phase * float(exact)
        return self.phase * math.exp(self.log)

    def to_float(self) -> float:
        """The magnitude as a float, exact when it is a small rational."""
        return abs(self.to_complex())

    def to_fraction(self, max_bits: int = 4096):
        """The magnitude as an exact :class:`Fraction`, or ``None`` if it is not rational or too large."""
        if self.zero:
            return Fraction(0)
        if not self.exact or any(e.denominator != 1 for _, e in self.factors):
            return None
        if sum(abs(e) * b.numerator.bit_length() for b, e in self.factors) > max_bits:
            return None
        out = Fraction(1)
        for b, e in self.factors:
            out *= b ** int(e)
        return out

    def less_than(self, bound) -> bool:
        """``abs(self) < bound`` for a positive rational bound, decided exactly when close."""
        bound = Fraction(bound)
        if self.zero:
            return True
        lb = _log_base(bound) if bound >= 1 else -_log_base(1 / bound)
        lv = self.log
        gap = lv - lb
        if abs(gap) > 1e-9 * max(1.0, abs(lv), abs(lb)) or not self.exact:
            return gap < 0
        denom = 1
        for _, e in self.factors:
            denom = denom * e.denominator // math.gcd(denom, e.denominator)
        bits = sum(abs(e * denom) * b.numerator.bit_length() for b, e in self.factors)
        if bits > 5_000_000:
            return gap < 0
        lhs = Fraction(1)
        for b, e in self.factors:
            lhs *= b ** int(e * denom)
        return lhs < bound ** denom

    def __repr__(self):
        if self.zero:
            return "LogProduct(0)"
        parts = [f"{b}^{e}" for b, e in self.factors]
        if self.offset:
            parts.append(f"exp({self.offset!r})")
        if self.atoms:
            parts.append(f"phase {self.phase!r}")
        return "LogProduct(" + (" * ".join(parts) or "1") + ")"


_ONE = LogProduct()
_ZERO = LogProduct(zero=True)


class LogAccumulator:
    """Mutable running product used on hot orbit loops."""

    __slots__ = ("factors", "atoms", "offset", "zero")

    def __init__(self):
        self.factors = {}
        self.atoms = {}
        self.offset = 0.0
        self.zero = False

    def mul(self, value: LogProduct, sign: int = 1):
        if value.zero:
            if sign < 0:
                raise ZeroDivisionError("division by an exact zero")
            self.zero = True
            return
        _merge(self.factors, value.factors, sign)
        if value.atoms:
            _merge(self.atoms, value.atoms, sign)
        if value.offset:
            self.offset += sign * value.offset

    def freeze(self) -> LogProduct:
        if self.zero:
            return _ZERO
        return LogProduct(
            tuple(sorted(self.factors.items())),
            _clean_atoms(self.atoms),
            self.offset,
        )


def product(values) -> LogProduct:
    acc = LogAccumulator()
    for v in values:
        acc.mul(LogProduct.of(v))
    return acc.freeze()
