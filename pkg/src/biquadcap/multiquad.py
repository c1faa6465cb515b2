"""Exact arithmetic in multiquadratic fields Q(sqrt(m_1), ..., sqrt(m_r)).

An element is stored on the basis b_S = sqrt(s_S), S a subset of the
radicand indices (a bitmask), where s_S is the signed squarefree part of
the product of the radicands in S.  For negative s, sqrt(s) means
i*sqrt(|s|).  Coefficients are integer numerators over one positive common
denominator.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Sequence

from .arith import GaussInt, isqrt, rational_sqrt, squarefree_part
from .errors import PreconditionError


class MQField:
    """Q(sqrt(m_1), ..., sqrt(m_r)) with radicands sorted ascending."""

    def __init__(self, radicands: Sequence[int]):
        rads = tuple(sorted(int(m) for m in radicands))
        for m in rads:
            if m == 1 or squarefree_part(m) != m:
                raise PreconditionError(f"radicand {m} is not squarefree and != 1")
        self.radicands = rads
        self.r = len(rads)
        self.degree = 1 << self.r
        basis = []
        for mask in range(self.degree):
            prod = 1
            for i in range(self.r):
                if mask >> i & 1:
                    prod *= rads[i]
            basis.append(squarefree_part(prod) if mask else 1)
        if len(set(basis)) != self.degree:
            raise PreconditionError(f"radicands {rads} are not multiplicatively independent")
        self.basis = tuple(basis)
        self._index = {s: mask for mask, s in enumerate(basis)}
        self.table = tuple(tuple(self._basis_product(a, b) for b in range(self.degree))
                           for a in range(self.degree))

    @classmethod
    @lru_cache(maxsize=None)
    def of(cls, *radicands: int) -> MQField:
        return cls(radicands)

    def _basis_product(self, a: int, b: int) -> int:
        # b_a * b_b = c * b_{a^b}; returns the integer c
        sa, sb = self.basis[a], self.basis[b]
        sign = -1 if sa < 0 and sb < 0 else 1
        prod = abs(sa * sb) if sign < 0 else sa * sb
        target = self.basis[a ^ b]
        g2, rem = divmod(prod, target)
        g = isqrt(g2)
        assert rem == 0 and g * g == g2
        return sign * g

    def __repr__(self) -> str:
        return f"MQField{self.radicands}"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MQField) and other.radicands == self.radicands

    def __hash__(self) -> int:
        return hash(self.radicands)

    # element constructors -------------------------------------------------

    def element(self, coeffs: Iterable, den: int = 1) -> MQElem:
        """Element from a full coefficient vector (ints or Fractions)."""
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) != self.degree:
            raise PreconditionError("coefficient vector has the wrong length")
        common = reduce(math.lcm, (c.denominator for c in coeffs), 1)
        nums = tuple(int(c * common) for c in coeffs)
        return MQElem(self, nums, common * den)

    def scalar(self, c) -> MQElem:
        c = Fraction(c)
        return MQElem(self, (c.numerator,) + (0,) * (self.degree - 1), c.denominator)

    def one(self) -> MQElem:
        return self.scalar(1)

    def zero(self) -> MQElem:
        return self.scalar(0)

    def mask_of(self, m: int) -> int | None:
        """Mask of the basis element sqrt(squarefree_part(m)), if present."""
        return self._index.get(squarefree_part(m))

    def contains_sqrt(self, m: int) -> bool:
        return self.mask_of(m) is not None

    def sqrt(self, m: int) -> MQElem:
        """sqrt(m) as a field element; m = k^2 * s with sqrt(s) in the basis."""
        s = squarefree_part(m)
        mask = self._index.get(s)
        if mask is None:
            raise PreconditionError(f"sqrt({m}) is not in {self}")
        k = isqrt(m // s)
        nums = [0] * self.degree
        nums[mask] = k
        return MQElem(self, tuple(nums), 1)

    def quadratic(self, x, y, m: int) -> MQElem:
        """x + y*sqrt(m)."""
        return self.scalar(x) + self.sqrt(m) * self.scalar(y)

    def gaussian(self, z: GaussInt) -> MQElem:
        return self.scalar(z.re) + self.sqrt(-1) * z.im

    def subfield(self, radicands: Sequence[int]) -> MQField:
        return MQField.of(*sorted(radicands))

    # Galois group ----------------------------------------------------------

    def automorphisms_fixing(self, sub: MQField | None) -> list[int]:
        """Masks S of the automorphisms sigma_S that fix ``sub`` pointwise."""
        if sub is None:
            return list(range(self.degree))
        fixed = [self.mask_of(m) for m in sub.radicands]
        if any(f is None for f in fixed):
            raise PreconditionError(f"{sub} is not a subfield of {self}")
        return [s for s in range(self.degree)
                if all(bin(s & f).count("1") % 2 == 0 for f in fixed)]


class MQElem:
    """Exact element of an MQField; immutable."""

    __slots__ = ("field", "nums", "den")

    def __init__(self, field: MQField, nums: tuple[int, ...], den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            nums, den = tuple(-n for n in nums), -den
        g = math.gcd(den, *nums)
        if g > 1:
            nums, den = tuple(n // g for n in nums), den // g
        self.field = field
        self.nums = nums
        self.den = den

    # basic protocol ---------------------------------------------------------

    def coeffs(self) -> list[Fraction]:
        return [Fraction(n, self.den) for n in self.nums]

    def coeff(self, mask: int) -> Fraction:
        return Fraction(self.nums[mask], self.den)

    def is_zero(self) -> bool:
        return not any(self.nums)

    def is_rational(self) -> bool:
        return not any(self.nums[1:])

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.field.scalar(other)
        if not isinstance(other, MQElem):
            return NotImplemented
        return self.field == other.field and self.nums == other.nums and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.field, self.nums, self.den))

    def _coerce(self, other) -> MQElem:
        if isinstance(other, MQElem):
            if other.field != self.field:
                raise PreconditionError(f"field mismatch: {self.field} vs {other.field}")
            return other
        if isinstance(other, GaussInt):
            return self.field.gaussian(other)
        return self.field.scalar(other)

    # ring operations -------------------------------------------------------

    def __add__(self, other) -> MQElem:
        o = self._coerce(other)
        d1, d2 = self.den, o.den
        return MQElem(self.field, tuple(a * d2 + b * d1 for a, b in zip(self.nums, o.nums)), d1 * d2)

    __radd__ = __add__

    def __neg__(self) -> MQElem:
        return MQElem(self.field, tuple(-a for a in self.nums), self.den)

    def __sub__(self, other) -> MQElem:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> MQElem:
        return self._coerce(other) - self

    def __mul__(self, other) -> MQElem:
        o = self._coerce(other)
        n = self.field.degree
        table = self.field.table
        out = [0] * n
        for a, x in enumerate(self.nums):
            if not x:
                continue
            row = table[a]
            for b, y in enumerate(o.nums):
                if y:
                    out[a ^ b] += row[b] * x * y
        return MQElem(self.field, tuple(out), self.den * o.den)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> MQElem:
        if k < 0:
            return self.inv() ** (-k)
        out, base = self.field.one(), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self, mask: int) -> MQElem:
        """Image under sigma_mask, which negates sqrt(m_i) for i in mask."""
        nums = tuple(-c if bin(mask & s).count("1") % 2 else c
                     for s, c in enumerate(self.nums))
        return MQElem(self.field, nums, self.den)

    def norm(self, over: MQField | None = None) -> MQElem:
        """Relative norm down to ``over`` (absolute norm when None)."""
        out = self.field.one()
        for s in self.field.automorphisms_fixing(over):
            out = out * self.conj(s)
        return out

    def inv(self) -> MQElem:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        others = self.field.one()
        for s in range(1, self.field.degree):
            others = others * self.conj(s)
        n = (self * others).rational()
        return others * (1 / n)

    def __truediv__(self, other) -> MQElem:
        return self * self._coerce(other).inv()

    def __rtruediv__(self, other) -> MQElem:
        return self._coerce(other) * self.inv()

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise PreconditionError(f"{self} is not rational")
        return Fraction(self.nums[0], self.den)

    def canonical_sign(self) -> MQElem:
        """Return +-self so that the first nonzero coefficient is positive."""
        for c in self.nums:
            if c:
                return self if c > 0 else -self
        return self

    def in_field(self, field: MQField) -> MQElem:
        """Re-express this element in a field containing it (or a subfield)."""
        out = field.zero()
        for s, c in enumerate(self.nums):
            if c:
                out = out + field.sqrt(self.field.basis[s]) * Fraction(c, self.den)
        return out

    # rendering ---------------------------------------------------------------

    def to_text(self) -> str:
        """Canonical serialization: sorted basis terms, coefficients num/den."""
        terms = []
        for s, c in enumerate(self.nums):
            if not c:
                continue
            q = Fraction(c, self.den)
            coef = f"{q.numerator}/{q.denominator}"
            terms.append(coef if s == 0 else f"{coef}*sqrt({self.field.basis[s]})")
        return " + ".join(terms) if terms else "0/1"

    def __str__(self) -> str:
        terms = []
        for s, c in enumerate(self.nums):
            if not c:
                continue
            q = Fraction(c, self.den)
            rad = "" if s == 0 else f"√{self.field.basis[s]}" if self.field.basis[s] > 0 \
                else ("i" if self.field.basis[s] == -1 else f"i√{-self.field.basis[s]}")
            if s == 0:
                terms.append(str(q))
            elif q == 1:
                terms.append(rad)
            elif q == -1:
                terms.append("-" + rad)
            else:
                terms.append(f"({q}){rad}" if q.denominator != 1 else f"{q}{rad}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"

    def __repr__(self) -> str:
        return f"MQElem({self.field.radicands}, {self.to_text()!r})"


_TERM = re.compile(r"^(-?\d+)/(\d+)(?:\*sqrt\((-?\d+)\))?$")


def from_text(field: MQField, text: str) -> MQElem:
    """Parse the output of :meth:`MQElem.to_text`."""
    out = field.zero()
    for term in text.split(" + "):
        m = _TERM.match(term.strip())
        if not m:
            raise ValueError(f"malformed term {term!r}")
        q = Fraction(int(m.group(1)), int(m.group(2)))
        out = out + (field.sqrt(int(m.group(3))) * q if m.group(3) else field.scalar(q))
    return out


# square roots --------------------------------------------------------------

def _split_top(x: MQElem) -> tuple[MQElem, MQElem, MQField]:
    """x = u + v*sqrt(m_top) with u, v in the field without the last radicand."""
    f = x.field
    sub = MQField.of(*f.radicands[:-1])
    half = f.degree // 2
    top = half
    table = f.table
    u_nums = x.nums[:half]
    # b_{S|top} = b_S * b_top / table[S][top]
    v = [Fraction(x.nums[s | top], x.den) / table[s][top] for s in range(half)]
    return MQElem(sub, u_nums, x.den), sub.element(v), sub


def _lift(y: MQElem, field: MQField) -> MQElem:
    return MQElem(field, y.nums + (0,) * (field.degree - y.field.degree), y.den)


def is_square(x: MQElem) -> MQElem | None:
    """Return y with y*y == x (canonical sign), or None when x is not a square.

    Descends the tower F(sqrt(d))/F: for x = u + v sqrt(d) with v != 0, x is a
    square iff u^2 - d v^2 = n^2 for some n in F and (u + n)/2 or (u - n)/2
    is a square w^2 in F, the root being w + v/(2w) sqrt(d).  For v = 0,
    either u or u/d is a square in F.
    """
    root = _sqrt(x)
    if root is None:
        return None
    if root * root != x:  # pragma: no cover - guarded by construction
        raise AssertionError(f"bad square root of {x}")
    return root.canonical_sign()


def _sqrt(x: MQElem) -> MQElem | None:
    f = x.field
    if f.r == 0:
        q = rational_sqrt(Fraction(x.nums[0], x.den))
        return None if q is None else f.scalar(q)
    if x.is_zero():
        return x
    u, v, sub = _split_top(x)
    g = f.sqrt(f.radicands[-1])
    d = f.radicands[-1]
    if v.is_zero():
        w = _sqrt(u)
        if w is not None:
            return _lift(w, f)
        w = _sqrt(u * Fraction(1, d))
        return None if w is None else _lift(w, f) * g
    # cheap filter: the absolute norm must be a rational square
    n = _sqrt(u * u - v * v * d)
    if n is None:
        return None
    for cand in (u + n, u - n):
        if cand.is_zero():
            continue
        w = _sqrt(cand * Fraction(1, 2))
        if w is not None:
            t = v / (w * 2)
            root = _lift(w, f) + _lift(t, f) * g
            if root * root == x:
                return root
    return None


def unit_check(x: MQElem) -> bool:
    """True iff x is an algebraic integer whose absolute norm is +-1."""
    if x.is_zero():
        return False
    poly = char_poly(x)
    if any(c.denominator != 1 for c in poly):
        return False
    return poly[-1] in (1, -1)


def char_poly(x: MQElem) -> list[Fraction]:
    """Coefficients (leading first) of prod over the Galois group of (T - sigma(x))."""
    f = x.field
    poly = [f.one()]
    for s in range(f.degree):
        c = x.conj(s)
        nxt = poly + [f.zero()]
        for k in range(1, len(nxt)):
            nxt[k] = nxt[k] - poly[k - 1] * c
        poly = nxt
    return [p.rational() for p in poly]
