"""Independent cross-checks: binary quadratic forms, class numbers, table fixtures."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from math import gcd, prod

from .arith import factorize, is_squarefree, isqrt
from .errors import InconsistencyError, PreconditionError
from .quadfield import fundamental_unit
from .units import check_pair, fsu_k

Form = tuple[int, int, int]


# imaginary quadratic forms ---------------------------------------------------

def _check_disc(D: int) -> None:
    if D >= 0 or D % 4 not in (0, 1):
        raise PreconditionError(f"D = {D} is not a negative discriminant")


def reduce_form(f: Form) -> Form:
    """Reduce a positive definite form."""
    a, b, c = f
    while True:
        if c < a:
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            # b -> b + 2ak brings b into (-a, a]
            k = (a - b) // (2 * a)
            c = c + b * k + a * k * k
            b = b + 2 * a * k
            continue
        if (a == c or b == -a) and b < 0:
            b = -b
        return a, b, c


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        t = a // b
        a, b = b, a - t * b
        x0, x1 = x1, x0 - t * x1
        y0, y1 = y1, y0 - t * y1
    return a, x0, y0


def compose(f: Form, g: Form) -> Form:
    """Gaussian composition of primitive forms of the same discriminant."""
    (a1, b1, c1), (a2, b2, c2) = f, g
    if b1 * b1 - 4 * a1 * c1 != b2 * b2 - 4 * a2 * c2:
        raise PreconditionError("forms of different discriminants")
    D = b1 * b1 - 4 * a1 * c1
    s = (b1 + b2) // 2
    e, u, v = _xgcd(a1, a2)
    e2, w, z = _xgcd(e, s)
    # w*(u*a1 + v*a2) + z*s = e2
    a3 = a1 * a2 // (e2 * e2)
    B = (w * u * a1 * b2 + w * v * a2 * b1 + z * (b1 * b2 + D) // 2) // e2
    b3 = B % (2 * a3)
    c3 = (b3 * b3 - D) // (4 * a3)
    if b3 * b3 - 4 * a3 * c3 != D:
        raise InconsistencyError(f"composition of {f} and {g} failed")
    return reduce_form((a3, b3, c3))


def reduced_forms(D: int) -> list[Form]:
    _check_disc(D)
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2 or (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (b < 0 and a == c) or gcd(gcd(a, b), c) != 1:
                continue
            out.append((a, b, c))
        a += 1
    return out


@dataclass(frozen=True)
class FormClassGroup:
    D: int
    forms: tuple[Form, ...]
    structure: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.forms)

    @property
    def identity(self) -> Form:
        return reduce_form((1, self.D % 2, (self.D % 2 - self.D) // 4))


def _form_order(f: Form, one: Form) -> int:
    n, g = 1, f
    while g != one:
        g = compose(g, f)
        n += 1
    return n


def group_structure(orders: list[int]) -> tuple[int, ...]:
    """Invariant factors of a finite abelian group from its element orders."""
    h = len(orders)
    if h == 1:
        return ()
    parts: dict[int, list[int]] = {}
    for ell, e in factorize(h).items():
        # c_i = #{x : x^(ell^i) = 1} = ell^(sum_j min(i, e_j))
        sums = [0]
        for i in range(1, e + 1):
            c = sum(1 for o in orders if (ell ** i) % o == 0)
            k = 0
            while ell ** k < c:
                k += 1
            sums.append(k)
        # number of cyclic factors of exponent >= i is sums[i] - sums[i-1]
        ge = [sums[i] - sums[i - 1] for i in range(1, e + 1)] + [0]
        exps = []
        for i in range(1, e + 1):
            exps += [i] * (ge[i - 1] - ge[i])
        parts[ell] = sorted(exps, reverse=True)
    width = max(len(v) for v in parts.values())
    out = []
    for n in range(width):
        out.append(prod(ell ** v[n] for ell, v in parts.items() if n < len(v)))
    return tuple(out)


@lru_cache(maxsize=256)
def imag_class_group(D: int) -> FormClassGroup:
    forms = reduced_forms(D)
    one = reduce_form((1, D % 2, (D % 2 - D) // 4))
    if one not in forms:
        raise InconsistencyError(f"principal form missing for D = {D}")
    orders = [_form_order(f, one) for f in forms]
    if any(len(forms) % o for o in orders):
        raise InconsistencyError(f"element order does not divide h for D = {D}")
    return FormClassGroup(D, tuple(forms), group_structure(orders))


def fundamental_disc(m: int) -> int:
    if not is_squarefree(abs(m)) or m in (0, 1):
        raise PreconditionError(f"{m} is not a squarefree integer != 0, 1")
    return m if m % 4 == 1 else 4 * m


def imag_class_number(m: int) -> int:
    """h(Q(sqrt(-m))) for squarefree m > 0."""
    return imag_class_group(fundamental_disc(-m)).order


# real quadratic forms --------------------------------------------------------

def _is_reduced_indef(f: Form, D: int) -> bool:
    a, b, _ = f
    return 0 < b and b * b < D and D < (2 * abs(a) + b) ** 2 and \
        (2 * abs(a) - b < 0 or (2 * abs(a) - b) ** 2 < D)


def _rho(f: Form, D: int) -> Form:
    _, b, c = f
    r, m = isqrt(D), 2 * abs(c)
    # largest b2 <= isqrt(D) with b2 = -b mod 2|c|
    b2 = r - ((r + b) % m)
    return c, b2, (b2 * b2 - D) // (4 * c)


def reduced_indefinite_forms(D: int) -> list[Form]:
    r = isqrt(D)
    out = []
    for b in range(1, r + 1):
        if (b - D) % 2:
            continue
        n = (b * b - D) // 4  # = a*c < 0
        # reduced forms have |a| < (sqrt(D) + b)/2 < sqrt(D)
        for a in range(1, min(-n, r) + 1):
            if n % a:
                continue
            for sa in (a, -a):
                f = (sa, b, n // sa)
                if gcd(gcd(a, b), n // a) == 1 and _is_reduced_indef(f, D):
                    out.append(f)
    return out


def narrow_class_number(D: int) -> int:
    forms = set(reduced_indefinite_forms(D))
    cycles = 0
    while forms:
        start = f = forms.pop()
        cycles += 1
        while True:
            f = _rho(f, D)
            if f == start:
                break
            if f not in forms:
                raise InconsistencyError(f"reduction cycle left the reduced set at {f}")
            forms.discard(f)
    return cycles


@lru_cache(maxsize=256)
def real_class_number(d: int) -> int:
    """Wide class number of Q(sqrt(d)) from cycles of reduced forms."""
    if d < 2 or not is_squarefree(d):
        raise PreconditionError(f"d = {d} must be squarefree > 1")
    hp = narrow_class_number(fundamental_disc(d))
    if fundamental_unit(d).norm == 1:
        if hp % 2:
            raise InconsistencyError(f"odd narrow class number with N(eps_{d}) = 1")
        return hp // 2
    return hp


# class number of k -----------------------------------------------------------

@dataclass(frozen=True)
class KurodaConvention:
    """h(k) = factor * (Q/2) * h(2pq) * h(-2pq); ``factor`` is pinned on a fixture."""

    factor: int = 1
    pinned_on: int | None = None


def kuroda_terms(p: int, q: int) -> tuple[int, int, int]:
    check_pair(p, q)
    d = 2 * p * q
    return fsu_k(p, q).hasse_Q, real_class_number(d), imag_class_number(d)


def kuroda_h_k(p: int, q: int, conv: KurodaConvention = KurodaConvention()) -> int:
    Q, hr, hi = kuroda_terms(p, q)
    num = conv.factor * Q * hr * hi
    if num % 2:
        raise InconsistencyError(f"odd Kuroda numerator for ({p}, {q})")
    return num // 2


def pin_kuroda(row: FixtureRow) -> KurodaConvention:
    """Find the power-of-two factor that reproduces one fixture Cl(k) order."""
    Q, hr, hi = kuroda_terms(row.p, row.q)
    target = prod(row.cl_k)
    for factor in (1, 2, 4):
        if factor * Q * hr * hi == 2 * target:
            return KurodaConvention(factor, row.d)
    raise InconsistencyError(f"no Kuroda constant fits d = {row.d}: Q={Q}, h+={hr}, h-={hi}")


# fixtures --------------------------------------------------------------------

@dataclass(frozen=True)
class FixtureRow:
    table: str
    d: int
    p: int
    q: int
    case_label: str
    root: int | None
    cl_k: tuple[int, ...]
    cl_k2: tuple[int, ...]
    verdicts: tuple[tuple[str, str, bool], ...]  # (field, label, principal)

    def verdict(self, field: str, label: str) -> bool | None:
        for f, lab, v in self.verdicts:
            if f == field and lab == label:
                return v
        return None

    def cells(self, field: str) -> dict[str, bool]:
        return {lab: v for f, lab, v in self.verdicts if f == field}


FIXTURE_COLUMNS = ["table", "d", "p", "q", "case_label", "root", "cl_k", "cl_k2", "verdict_bits"]


def _parse_type(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split("-"))


def _parse_verdicts(text: str) -> tuple[tuple[str, str, bool], ...]:
    out = []
    for cell in text.split(";"):
        key, bit = cell.split("=")
        field, lab = key.split(":")
        if bit not in ("0", "1"):
            raise ValueError(f"bad verdict bit in {cell!r}")
        out.append((field, lab, bit == "1"))
    return tuple(out)


def parse_fixtures(text: str) -> list[FixtureRow]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# rows:"):
        raise ValueError("fixture file lacks its row-count header")
    expected = int(lines[0].split(":")[1])
    reader = csv.DictReader(io.StringIO("\n".join(lines[1:])))
    if reader.fieldnames != FIXTURE_COLUMNS:
        raise ValueError(f"fixture columns {reader.fieldnames} != {FIXTURE_COLUMNS}")
    rows = []
    for r in reader:
        rows.append(FixtureRow(
            r["table"], int(r["d"]), int(r["p"]), int(r["q"]), r["case_label"],
            int(r["root"]) if r["root"] else None, _parse_type(r["cl_k"]),
            _parse_type(r["cl_k2"]), _parse_verdicts(r["verdict_bits"])))
    if len(rows) != expected:
        raise ValueError(f"fixture file has {len(rows)} rows, header says {expected}")
    for row in rows:
        if row.d != 2 * row.p * row.q:
            raise ValueError(f"row d = {row.d} is not 2*{row.p}*{row.q}")
    return rows


def fixture_text() -> str:
    return resources.files("biquadcap").joinpath("data/fixtures.csv").read_text()


@lru_cache(maxsize=1)
def fixtures() -> tuple[FixtureRow, ...]:
    return tuple(parse_fixtures(fixture_text()))


def fixture_rows(p: int, q: int) -> list[FixtureRow]:
    return [r for r in fixtures() if r.p == p and r.q == q]
