"""Fundamental units of real quadratic fields and their square classes."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .arith import is_squarefree, isqrt, perfect_square, rational_sqrt
from .errors import InconsistencyError, PreconditionError


def _cf_limit() -> int:
    from .config import bounds
    return bounds().cf_steps


@dataclass(frozen=True)
class QuadUnit:
    """Fundamental unit x + y*sqrt(d) > 1 of Q(sqrt(d))."""

    d: int
    x: Fraction
    y: Fraction
    norm: int

    @property
    def integral(self) -> bool:
        return self.x.denominator == 1 and self.y.denominator == 1

    def __str__(self) -> str:
        return f"{_q(self.x)} + {_q(self.y)}*sqrt({self.d})"


def _q(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


@lru_cache(maxsize=4096)
def fundamental_unit(d: int) -> QuadUnit:
    """Fundamental unit via the continued fraction of the ring generator.

    The generator is sqrt(d), or (1 + sqrt(d))/2 when d = 1 (mod 4).  The
    first convergent h/g whose associated element h - g*conj(omega) has
    norm +-1 is the fundamental unit.
    """
    if d <= 1 or not is_squarefree(d):
        raise PreconditionError(f"d = {d} must be a squarefree integer > 1")
    half = d % 4 == 1
    P, Q = (1, 2) if half else (0, 1)
    s = isqrt(d)
    h_prev, h = 0, 1
    g_prev, g = 1, 0
    seen: set[tuple[int, int]] = set()
    for _ in range(_cf_limit()):
        a = (P + s) // Q
        h, h_prev = a * h + h_prev, h
        g, g_prev = a * g + g_prev, g
        if half:
            x, y = Fraction(2 * h - g, 2), Fraction(g, 2)
        else:
            x, y = Fraction(h), Fraction(g)
        n = x * x - d * y * y
        if n in (1, -1):
            return QuadUnit(d, x, y, int(n))
        P = a * Q - P
        Q = (d - P * P) // Q
        if (P, Q) in seen:
            raise InconsistencyError(f"period of sqrt({d}) closed without a unit")
        seen.add((P, Q))
    raise InconsistencyError(f"continued fraction step bound exceeded for d = {d}")


class Case(enum.Enum):
    X_PLUS = "x+1"
    X_MINUS = "x-1"
    PX_PLUS = "p(x+1)"
    PX_MINUS = "p(x-1)"
    TWO_PX_PLUS = "2p(x+1)"
    TWO_PX_MINUS = "2p(x-1)"

    @property
    def sign(self) -> int:
        return 1 if "+1" in self.value else -1

    @property
    def is_x(self) -> bool:
        """True for the branches where x+1 or x-1 itself is a square."""
        return self in (Case.X_PLUS, Case.X_MINUS)

    @property
    def is_p(self) -> bool:
        return self in (Case.PX_PLUS, Case.PX_MINUS)

    @property
    def is_2p(self) -> bool:
        return self in (Case.TWO_PX_PLUS, Case.TWO_PX_MINUS)

    def label(self, var: str = "x") -> str:
        return self.value.replace("x", var)


_ORDER = [
    (Case.X_PLUS, 1, 1), (Case.X_MINUS, 1, -1),
    (Case.PX_PLUS, "p", 1), (Case.PX_MINUS, "p", -1),
    (Case.TWO_PX_PLUS, "2p", 1), (Case.TWO_PX_MINUS, "2p", -1),
]


@dataclass(frozen=True)
class SquareClass:
    """Which of x+-1, p(x+-1), 2p(x+-1) is a square, with its witnesses.

    ``root**2 == multiplier*(x + sign)`` and the cofactor identities
    ``x + sign == c1*y1**2``, ``x - sign == c2*y2**2`` hold exactly.
    """

    case: Case
    root: int
    multiplier: int
    c1: int
    y1: int
    c2: int
    y2: int


def square_class_case(u: QuadUnit, p: int) -> SquareClass:
    """Resolve the square-class trichotomy of a norm +1 unit."""
    if u.norm != 1:
        raise PreconditionError(f"eps_{u.d} has norm -1; no trichotomy")
    if not u.integral:
        raise PreconditionError(f"eps_{u.d} has half-integral coordinates")
    if u.d % p:
        raise PreconditionError(f"p = {p} does not divide d = {u.d}")
    x, d = int(u.x), u.d
    hits = []
    for case, mult, sign in _ORDER:
        m = {1: 1, "p": p, "2p": 2 * p}[mult]
        r = perfect_square(m * (x + sign))
        if r is not None:
            hits.append((case, m, sign, r))
    if not hits:
        raise InconsistencyError(f"no square class found for eps_{d} with p = {p}")
    if len(hits) > 1 and d not in (p, 2 * p):
        raise InconsistencyError(f"eps_{d}: several square classes {[h[0] for h in hits]}")
    case, m, sign, r = hits[0]
    assert r % m == 0 or m == 1
    c1, y1 = m, r // m
    other = x - sign
    c2 = y2 = None
    for c in _squarefree_divisors(2 * d):
        if other % c == 0:
            t = perfect_square(other // c)
            if t is not None:
                c2, y2 = c, t
                break
    if c2 is None or c1 * y1 * y1 != x + sign or c2 * y2 * y2 != other:
        raise InconsistencyError(f"cofactor decomposition failed for eps_{d}")
    if (x + sign) * other != d * int(u.y) ** 2:
        raise InconsistencyError(f"x^2 - 1 != d*y^2 for eps_{d}")
    return SquareClass(case, r, m, c1, y1, c2, y2)


def _squarefree_divisors(n: int) -> list[int]:
    from .arith import factorize
    out = [1]
    for prime in sorted(factorize(n)):
        out += [c * prime for c in out]
    return sorted(out)


def doubled_square_violations(u: QuadUnit) -> list[str]:
    """Which of 2(x+1), 2(x-1), 2d(x+1), 2d(x-1) are squares (should be none)."""
    if u.norm != 1:
        return []
    bad = []
    for name, val in (("2(x+1)", 2 * (u.x + 1)), ("2(x-1)", 2 * (u.x - 1)),
                      ("2d(x+1)", 2 * u.d * (u.x + 1)), ("2d(x-1)", 2 * u.d * (u.x - 1))):
        if rational_sqrt(val) is not None:
            bad.append(name)
    return bad


@dataclass(frozen=True)
class TwoEpsRoot:
    """(b1 + b2*sqrt(d))**2 == 2*eps_d."""

    b1: Fraction
    b2: Fraction
    sign: int  # which of x+1, x-1 equals b1**2


def two_eps_square(u: QuadUnit) -> TwoEpsRoot | None:
    """Square root of 2*eps_d inside Q(sqrt(d)), when there is one.

    (b1 + b2 sqrt d)^2 = 2 eps forces b1^2 to be a root of
    T^2 - 2xT + d y^2, that is x + 1 or x - 1 when the norm is +1.  Units
    of norm -1 never qualify.
    """
    if u.norm != 1:
        return None
    found = []
    for sign in (1, -1):
        b1 = rational_sqrt(u.x + sign)
        if b1:
            found.append(TwoEpsRoot(b1, u.y / b1, sign))
    if len(found) > 1 and u.d > 3:
        raise InconsistencyError(f"both x+1 and x-1 are squares for eps_{u.d}")
    for r in found:
        if r.b1 ** 2 + u.d * r.b2 ** 2 != 2 * u.x or 2 * r.b1 * r.b2 != 2 * u.y:
            raise InconsistencyError(f"sqrt(2 eps_{u.d}) failed to verify")
        return r
    return None


def check_eps_q_structure(q: int) -> dict:
    """Check the structure of eps_q for a prime q = 3 (mod 4)."""
    from .arith import is_prime
    if q % 4 != 3 or not is_prime(q):
        raise PreconditionError(f"{q} is not a prime congruent to 3 mod 4")
    u = fundamental_unit(q)
    x = u.x
    squares = [s for s in (1, -1) if rational_sqrt(x + s) is not None]
    root = two_eps_square(u)
    report = {
        "q": q, "x": int(x), "y": int(u.y), "norm": u.norm,
        "x_even": x.denominator == 1 and int(x) % 2 == 0,
        "square_signs": squares,
        "sqrt_2eps": None if root is None else (int(root.b1), int(root.b2)),
    }
    if u.norm != 1 or not report["x_even"] or len(squares) != 1 or root is None:
        raise InconsistencyError(f"eps_{q} contradicts the eps_q structure: {report}")
    return report


def eps(m: int) -> QuadUnit:
    return fundamental_unit(m)

