"""Max-of-affine expressions over exact rationals.

The scheduler only ever adds durations and takes maxima, so running it
with symbolic node positions yields the completion time as a maximum of
affine functions of those positions.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


class MaxAffine:
    """max_i (c_i0 + sum_k c_ik x_k); each piece is a tuple of Fractions."""

    __slots__ = ("pieces", "nvars")

    def __init__(self, pieces: Iterable[Sequence], nvars: int):
        self.nvars = nvars
        self.pieces = frozenset(tuple(Fraction(c) for c in p) for p in pieces)

    @classmethod
    def constant(cls, value, nvars: int) -> "MaxAffine":
        return cls([(Fraction(value),) + (Fraction(0),) * nvars], nvars)

    @classmethod
    def variable(cls, k: int, nvars: int) -> "MaxAffine":
        coeffs = [Fraction(0)] * (nvars + 1)
        coeffs[k + 1] = Fraction(1)
        return cls([coeffs], nvars)

    def _lift(self, other) -> "MaxAffine":
        return other if isinstance(other, MaxAffine) else MaxAffine.constant(other, self.nvars)

    def __add__(self, other) -> "MaxAffine":
        other = self._lift(other)
        return MaxAffine([tuple(a + b for a, b in zip(p, q)) for p in self.pieces for q in other.pieces], self.nvars)

    __radd__ = __add__

    def __neg__(self) -> "MaxAffine":
        if len(self.pieces) != 1:
            raise ValueError("only a single affine piece can be negated")
        (p,) = self.pieces
        return MaxAffine([tuple(-c for c in p)], self.nvars)

    def __sub__(self, other) -> "MaxAffine":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "MaxAffine":
        return self._lift(other) + (-self)

    def __mul__(self, k) -> "MaxAffine":
        k = Fraction(k)
        if k < 0:
            raise ValueError("scaling by a negative number does not preserve a maximum")
        return MaxAffine([tuple(k * c for c in p) for p in self.pieces], self.nvars)

    __rmul__ = __mul__

    def join(self, *others) -> "MaxAffine":
        pieces = set(self.pieces)
        for o in others:
            pieces |= self._lift(o).pieces
        return MaxAffine(pieces, self.nvars)

    def __call__(self, xs: Sequence) -> Fraction:
        return max(p[0] + sum(c * x for c, x in zip(p[1:], xs)) for p in self.pieces)

    def sorted_pieces(self) -> list:
        return sorted(self.pieces)

    def __repr__(self) -> str:
        return f"MaxAffine({len(self.pieces)} pieces)"


def tmax(values) -> object:
    """Maximum that also understands MaxAffine operands."""
    values = list(values)
    sym = [v for v in values if isinstance(v, MaxAffine)]
    if not sym:
        return max(values)
    return sym[0].join(*[v for v in values if v is not sym[0]])
