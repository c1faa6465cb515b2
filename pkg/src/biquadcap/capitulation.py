"""Capitulation of the strongly ambiguous classes of k in K1, K2, K3 and the genus field.

An ideal H of k with H^2 = (g) becomes principal in an extension K exactly
when g*u is a square in K for some unit u; u only matters modulo E_K^2, so
a finite search over unit representatives decides it.  Classes involving the
auxiliary ideal I have no explicit generator here and stay fixture-only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from .arith import GaussInt, gaussian_split, gaussian_sqrt, kronecker, perfect_square
from .errors import InconsistencyError, PreconditionError
from .genus import IdealLabel, ambiguous_sizes, label, span, strong_generators, x_square
from .multiquad import MQElem, is_square, unit_check
from .quadfield import fundamental_unit, square_class_case
from .units import check_pair, field_of, fsu, fsu_k, hasse_Q_K3, n0_of, unit_index

EXTENSIONS = ("K1", "K2", "K3")
H_LABELS = tuple(IdealLabel(e + (0,)) for e in product((0, 1), repeat=3))[1:]
ONE = IdealLabel((0, 0, 0, 0))


def _gauss_text(z: GaussInt) -> str:
    return f"({z})" if z.re and z.im else str(z)


# witnesses ---------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    """alpha**2 == square, and (alpha/scale) generates the extension of ``label``.

    ``square / (scale**2 * g)`` must be a unit, where label**2 = (g).
    """

    label: IdealLabel
    field_id: str
    alpha: MQElem
    square: MQElem
    scale: GaussInt
    identity: str
    route: str  # "constructive" or "search"
    verified: bool

    def to_dict(self) -> dict:
        return {"label": str(self.label), "field": self.field_id, "alpha": self.alpha.to_text(),
                "alpha_pretty": str(self.alpha), "identity": self.identity,
                "scale": str(self.scale), "route": self.route, "verified": self.verified}


def verify_witness(w: Witness, p: int) -> bool:
    g = w.label.square_generator(p)
    F = w.alpha.field
    if g is None or w.alpha * w.alpha != w.square:
        return False
    return unit_check(w.square / F.gaussian(w.scale * w.scale * g))


def _make(lab: str, j: str, alpha: MQElem, square: MQElem, scale: GaussInt, identity: str,
          route: str, p: int) -> Witness:
    w = Witness(label(lab), j, alpha, square, scale, identity, route, False)
    ok = verify_witness(w, p)
    if not ok:
        raise InconsistencyError(f"witness for {lab} in {j} fails: {identity}")
    return Witness(w.label, j, alpha, square, scale, identity, route, True)


# exact decision by search over units ---------------------------------------------

@lru_cache(maxsize=512)
def unit_representatives(j: str, p: int, q: int) -> tuple[tuple[str, MQElem], ...]:
    """Representatives of E/E^2 for k or K_j, with printable names."""
    F = field_of(j, p, q)
    rep = fsu_k(p, q) if j == "k" else fsu(j, p, q)
    tor = ("ξ" if j == "K3" else "i", n0_of(F).xi)
    gens = [tor] + [(g.text, g.value) for g in rep.generators]
    out = []
    for mask in range(1 << len(gens)):
        names, u = [], F.one()
        for n, (name, val) in enumerate(gens):
            if mask >> n & 1:
                names.append(name)
                u = u * val
        out.append(("·".join(names) or "1", u))
    return tuple(out)


@lru_cache(maxsize=4096)
def search_witness(j: str, p: int, q: int, lab: IdealLabel) -> Witness | None:
    """Generator of the extension of ``lab`` to k or K_j, or None if it stays non-principal."""
    g = lab.square_generator(p)
    if g is None:
        raise PreconditionError("labels with I have no explicit square generator")
    F = field_of(j, p, q)
    G = F.gaussian(g)
    for name, u in unit_representatives(j, p, q):
        root = is_square(G * u)
        if root is not None:
            ident = f"α² = {_gauss_text(g)}·{name}"
            return _make(str(lab), j, root, G * u, GaussInt(1), ident, "search", p)
    return None


def principal_in(j: str, p: int, q: int, lab: IdealLabel) -> bool:
    return lab == ONE or search_witness(j, p, q, lab) is not None


def k_principal_labels(p: int, q: int) -> set[IdealLabel]:
    """H-labels principal in k, by search and by the strong ambiguous class structure."""
    found = {ONE} | {h for h in H_LABELS if principal_in("k", p, q, h)}
    expected = {ONE} if x_square(p, q) else {ONE, label("H1H2")}
    if found != expected:
        raise InconsistencyError(
            f"principal H-labels in k: search {sorted(map(str, found))}, "
            f"structure {sorted(map(str, expected))}")
    return found


def capitulating_h_labels(j: str, p: int, q: int) -> set[IdealLabel]:
    return {ONE} | {h for h in H_LABELS if principal_in(j, p, q, h)}


# kernel sizes --------------------------------------------------------------------

def _a_square(p: int, q: int) -> bool:
    return square_class_case(fundamental_unit(p * q), p).case.is_x


def _kernel_size_table(p: int, q: int, j: str) -> int:
    xs = x_square(p, q)
    if j in ("K1", "K2"):
        return 4 if xs else 2
    as_ = _a_square(p, q)
    if xs and as_:
        return 4 if hasse_Q_K3(p, q).Q == 1 else 2
    return 4 if xs or as_ else 2


def kernel_size(p: int, q: int, j: str) -> int:
    check_pair(p, q)
    if j not in EXTENSIONS:
        raise PreconditionError(f"field must be one of {EXTENSIONS}, got {j!r}")
    n = 2 * unit_index(p, q, j)
    table = _kernel_size_table(p, q, j)
    if n != table:
        raise InconsistencyError(f"|kappa_{j}|: unit index gives {n}, case table {table}")
    return n


# constructive witnesses -------------------------------------------------------------

def _witnesses_K1(p: int, q: int, assoc: GaussInt = GaussInt(1)) -> list[Witness]:
    """``assoc`` rescales pi1 by a unit; the primary choice always lands in system 1."""
    F = field_of("K1", p, q)
    sp = gaussian_split(p)
    pi1 = sp.pi1 * assoc
    pi2 = pi1.conj()
    u = fundamental_unit(p)
    s, t = int(2 * u.x), int(2 * u.y)
    if s * s + 4 != t * t * p:
        raise InconsistencyError(f"s^2 + 4 != t^2 p for eps_{p}")
    i = GaussInt(0, 1)
    for sign, unit in product((1, -1), (GaussInt(1), i)):
        z = GaussInt(s, 2 * sign)
        quo = z.exact_div(unit * pi1)
        t1 = gaussian_sqrt(quo) if quo is not None else None
        if t1 is not None:
            break
    else:
        raise InconsistencyError(f"s ± 2i does not factor as unit*t1^2*pi1 for p = {p}")
    t2 = t1.conj()
    if t1 * t2 != GaussInt(t):
        raise InconsistencyError(f"t1*t2 != t for p = {p}")
    g = F.gaussian
    rp = F.sqrt(p)
    eps_p = F.quadratic(u.x, u.y, p)
    out = []
    if unit == GaussInt(1):
        alpha = (g(t1 * pi1) + g(t2) * rp) / 2
        beta = (g(t2 * pi2) + g(t1) * rp) / 2
        out.append(_make("H1", "K1", alpha, g(pi1) * eps_p, GaussInt(1),
                         f"α = ½(t1·π1 + t2·√p), α² = π1·ε_p, π1 = {pi1}, t1 = {t1}",
                         "constructive", p))
        out.append(_make("H2", "K1", beta, g(pi2) * eps_p, GaussInt(1),
                         f"β = ½(t2·π2 + t1·√p), β² = π2·ε_p, π2 = {pi2}, t2 = {t2}",
                         "constructive", p))
    else:
        one_i, one_mi = GaussInt(1, 1), GaussInt(1, -1)
        alpha = (g(t1 * one_i * pi1) + g(t2 * one_mi) * rp) / 2
        beta = (g(t1 * one_i) * rp + g(t2 * one_mi * pi2)) / 2
        out.append(_make("H1", "K1", alpha, g(pi1) * eps_p * 2, one_i,
                         f"α = ½(t1(1+i)π1 + t2(1-i)√p), α² = 2π1·ε_p, π1 = {pi1}, t1 = {t1}",
                         "constructive", p))
        out.append(_make("H2", "K1", beta, g(pi2) * eps_p * 2, one_i,
                         f"β = ½(t1(1+i)√p + t2(1-i)π2), β² = 2π2·ε_p, π2 = {pi2}, t2 = {t2}",
                         "constructive", p))
    return out


def k1_system(p: int, q: int, assoc: GaussInt = GaussInt(1)) -> int:
    """1 or 2: which factorization of s ± 2i the K1 witnesses came from."""
    return 1 if _witnesses_K1(p, q, assoc)[0].scale == GaussInt(1) else 2


def _h1h2_K2(p: int, q: int) -> Witness:
    F = field_of("K2", p, q)
    one_i = F.gaussian(GaussInt(1, 1))
    alpha = F.sqrt(2 * p) / one_i
    return _make("H1H2", "K2", alpha, F.gaussian(GaussInt(0, -p)), GaussInt(1),
                 "α = √(2p)/(1+i), α² = -i·p = -i·π1π2", "constructive", p)


def _norm_minus_witnesses_K2(p: int, q: int) -> list[Witness]:
    """From eps_2p = a + b sqrt(2p) with a^2 + 1 = 2 b^2 p."""
    u = fundamental_unit(2 * p)
    if u.norm != -1:
        raise PreconditionError(f"N(eps_{2 * p}) = 1")
    a, b = int(u.x), int(u.y)
    if a * a + 1 != 2 * b * b * p:
        raise InconsistencyError(f"a^2 + 1 != 2 b^2 p for eps_{2 * p}")
    F = field_of("K2", p, q)
    sp = gaussian_split(p)
    i, one_i = GaussInt(0, 1), GaussInt(1, 1)
    b1 = None
    for sign, unit in product((1, -1), (GaussInt(1), i)):
        z = GaussInt(a, sign)
        den = unit * one_i * sp.pi1
        quo = z.exact_div(den)
        root = gaussian_sqrt(quo) if quo is not None else None
        if root is not None:
            b1 = root
            break
    if b1 is None:
        raise InconsistencyError(f"a ± i does not factor as unit*(1+i)*b1^2*pi1 for p = {p}")
    b2 = b1.conj()
    g = F.gaussian
    r2p = F.sqrt(2 * p)
    eps = F.quadratic(u.x, u.y, 2 * p)
    out = []
    units = (GaussInt(1), i, GaussInt(-1), GaussInt(0, -1))
    for lab, pi, c1, c2, base in (("H0H1", sp.pi1, b1, b2, one_i),
                                  ("H0H2", sp.pi2, b2, b1, one_i.conj())):
        for e1, e2 in product(units, units):
            alpha = g(base) * (g(e1 * c1 * base * pi) + g(e2 * c2) * r2p) / 2
            sq = alpha * alpha
            ratio = sq / (g(base * pi) * eps)
            k = next((n for n, w in enumerate(units) if ratio == g(w)), None)
            if k is not None:
                name = "π1" if lab == "H0H1" else "π2"
                b = "b1" if lab == "H0H1" else "b2"
                ident = (f"α = ½{_gauss_text(base)}({_gauss_text(e1)}·{b}{_gauss_text(base)}{name}"
                         f" + {_gauss_text(e2)}·{'b2' if b == 'b1' else 'b1'}·√(2p)), "
                         f"α² = {_gauss_text(units[k])}·{_gauss_text(base)}{name}·ε_2p, "
                         f"{b} = {c1}")
                out.append(_make(lab, "K2", alpha, sq, GaussInt(1), ident, "constructive", p))
                break
        else:
            raise InconsistencyError(f"no unit normalization makes the {lab} witness verify")
    return out


def _h0_K3(p: int, q: int) -> Witness:
    F = field_of("K3", p, q)
    r2 = F.sqrt(2)
    one_i = F.gaussian(GaussInt(1, 1))
    alpha = (one_i * r2 + 2) / 2
    eps2 = r2 + 1
    return _make("H0", "K3", alpha, one_i * eps2, GaussInt(1),
                 "α = ½(2 + (1+i)√2), α² = (1+i)·ε_2", "constructive", p)


def _h1h2_K3(p: int, q: int) -> Witness:
    """sqrt(p*eps_pq) when p(a±1) or 2p(a±1) is a square."""
    u = fundamental_unit(p * q)
    sc = square_class_case(u, p)
    if not (sc.case.is_p or sc.case.is_2p):
        raise PreconditionError("p*eps_pq is a square in K3 only when a±1 is not")
    F = field_of("K3", p, q)
    m = sc.multiplier
    # (root ± y2*sqrt(m*c2))^2 = 2m*eps_pq, and 2m/p is 2 or 4
    scale = F.sqrt(2) if 2 * m // p == 2 else F.scalar(2)
    target = F.quadratic(u.x, u.y, p * q) * p
    for sgn in (1, -1):
        alpha = (F.sqrt(m * sc.c2) * (sgn * sc.y2) + sc.root) / scale
        if alpha * alpha == target:
            mult = "2p" if m == 2 * p else "p"
            return _make("H1H2", "K3", alpha, target, GaussInt(1),
                         f"α = (r + y·√({m * sc.c2}))/√{2 * m // p}, α² = p·ε_pq, "
                         f"{mult}(a{sc.case.value[-2:]}) = r², r = {sc.root}",
                         "constructive", p)
    raise InconsistencyError(f"sqrt(p*eps_pq) failed to verify for ({p}, {q})")


def constructive_witnesses(p: int, q: int, j: str) -> list[Witness]:
    check_pair(p, q)
    if j == "K1":
        return _witnesses_K1(p, q)
    if j == "K2":
        out = [_h1h2_K2(p, q)]
        if fundamental_unit(2 * p).norm == -1:
            out += _norm_minus_witnesses_K2(p, q)
        return out
    if j == "K3":
        out = [_h0_K3(p, q)]
        if x_square(p, q) and not _a_square(p, q):
            out.append(_h1h2_K3(p, q))
        return out
    raise PreconditionError(f"field must be one of {EXTENSIONS}, got {j!r}")


# kernels ------------------------------------------------------------------------------

@dataclass
class CapReport:
    field_id: str
    p: int
    q: int
    branch: str
    kernel_size: int
    candidates: list[list[IdealLabel]]
    kernel_generators: list[IdealLabel] | None
    resolved_by: str  # theorem, search, fixture, unresolved
    witnesses: list[Witness]
    h_capitulating: list[IdealLabel]
    fixture_resolution: list[IdealLabel] | None = None
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        lst = lambda xs: None if xs is None else [str(x) for x in xs]  # noqa: E731
        return {
            "field": self.field_id, "p": self.p, "q": self.q, "branch": self.branch,
            "kernel_size": self.kernel_size,
            "candidates": [lst(c) for c in self.candidates],
            "kernel_generators": lst(self.kernel_generators),
            "resolved_by": self.resolved_by,
            "h_capitulating": lst(self.h_capitulating),
            "fixture_resolution": lst(self.fixture_resolution),
            "witnesses": [w.to_dict() for w in self.witnesses],
            "notes": self.notes,
        }

    def kernel_text(self) -> str:
        if self.kernel_generators is None:
            return " or ".join(_gen_text(c) for c in self.candidates)
        return _gen_text(self.kernel_generators)


def _gen_text(gens: list[IdealLabel]) -> str:
    return "⟨" + ", ".join(f"[{g}]" for g in gens) + "⟩"


def _labels(*names: str) -> list[IdealLabel]:
    return [label(n) for n in names]


def class_count(gens: list[IdealLabel], principal: set[IdealLabel]) -> int:
    """Number of classes spanned, given the principal H-labels (I never principal)."""
    s = span(gens)
    return len(s) // len(s & principal)


def predicted_principal(cand: list[IdealLabel], principal: set[IdealLabel],
                        lab: IdealLabel) -> bool:
    """Is lab's class in the subgroup spanned by cand?"""
    return any(lab * c in principal for c in span(cand))


def candidate_sets(p: int, q: int, j: str) -> tuple[str, list[list[IdealLabel]]]:
    xs = x_square(p, q)
    if j == "K1":
        return ("(1)", [_labels("H1", "H2")]) if xs else ("(2)", [_labels("H1")])
    if j == "K2":
        if fundamental_unit(2 * p).norm == 1:
            if xs:
                return "(1)", [_labels("H0", "H1H2"), _labels("H1", "H2")]
            return "(2)", [_labels(n) for n in ("I", "H0I", "H1I", "H0H1I")]
        if xs:
            return "(3)(i)", [_labels("H0H1", "H0H2")]
        return "(3)(ii)", [_labels("H0H1")]
    as_ = _a_square(p, q)
    if xs and as_:
        if hasse_Q_K3(p, q).Q == 2:
            return "(1)(a)", [_labels("H0")]
        return "(1)(b)", [_labels("H0", "H1H2")]
    if xs:
        return "(2)", [_labels("H0", "H1H2")]
    if as_:
        return "(3)", [_labels("H0", "I"), _labels("H0", "H1I")]
    return "(4)", [_labels("H0")]


def _fixture_choice(p: int, q: int, j: str, cands: list[list[IdealLabel]],
                    principal: set[IdealLabel]) -> tuple[list[IdealLabel] | None, dict]:
    from .oracle import fixture_rows
    for row in fixture_rows(p, q):
        cells = row.cells(j)
        if not cells:
            continue
        fits = [c for c in cands
                if all(predicted_principal(c, principal, label(lab)) == v
                       for lab, v in cells.items())]
        info = {"table": row.table, "d": row.d, "cells": {k: int(v) for k, v in cells.items()}}
        if len(fits) != 1:
            raise InconsistencyError(f"fixture d = {row.d} fits {len(fits)} candidates in {j}")
        return fits[0], info
    return None, {}


def _kappa(p: int, q: int, j: str) -> CapReport:
    check_pair(p, q)
    size = kernel_size(p, q, j)
    branch, cands = candidate_sets(p, q, j)
    principal = k_principal_labels(p, q)
    for c in cands:
        if class_count(c, principal) != size:
            raise InconsistencyError(f"candidate {_gen_text(c)} has the wrong order in {j}")
    cap = capitulating_h_labels(j, p, q)
    h_classes = len(cap) // len(principal)
    fits = [c for c in cands
            if all(predicted_principal(c, principal, h) == (h in cap) for h in H_LABELS)]
    if not fits:
        raise InconsistencyError(
            f"{j}({p},{q}): capitulating H-labels {sorted(map(str, cap))} fit no candidate")
    witnesses = constructive_witnesses(p, q, j)
    for w in witnesses:
        if w.label not in cap:
            raise InconsistencyError(f"constructive witness for {w.label} but search says no")
    have = {w.label for w in witnesses}
    witnesses += [search_witness(j, p, q, h) for h in sorted(cap - have - {ONE})]
    fixture, info = _fixture_choice(p, q, j, cands, principal)
    if fixture is not None and fixture not in fits:
        raise InconsistencyError(f"fixture resolution {_gen_text(fixture)} contradicts search")
    if len(cands) == 1:
        gens, how = cands[0], "theorem"
    elif len(fits) == 1:
        gens, how = fits[0], "search"
    elif fixture is not None:
        gens, how = fixture, "fixture"
    else:
        gens, how = None, "unresolved"
    notes = {"h_classes_capitulating": h_classes}
    if info:
        notes["fixture"] = info
    if j == "K1" and not x_square(p, q):
        notes["relation"] = "[H1] = [H2]"
    return CapReport(j, p, q, branch, size, cands, gens, how, witnesses,
                     sorted(cap - {ONE}), fixture, notes)


def kappa_K1(p: int, q: int) -> CapReport:
    return _kappa(p, q, "K1")


def kappa_K2(p: int, q: int) -> CapReport:
    return _kappa(p, q, "K2")


def kappa_K3(p: int, q: int) -> CapReport:
    return _kappa(p, q, "K3")


def kappa(p: int, q: int, j: str) -> CapReport:
    if j not in EXTENSIONS:
        raise PreconditionError(f"field must be one of {EXTENSIONS}, got {j!r}")
    return _kappa(p, q, j)


# genus field ------------------------------------------------------------------------

@dataclass
class GenusKernel:
    p: int
    q: int
    branch: str
    generators: list[IdealLabel]
    order: int
    evidence: dict
    am_s_contained: bool

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "branch": self.branch,
                "generators": [str(g) for g in self.generators], "order": self.order,
                "evidence": self.evidence, "am_s_contained": self.am_s_contained}


def genus_kernel(p: int, q: int, reports: dict[str, CapReport] | None = None) -> GenusKernel:
    """Guaranteed part of the kernel in the genus field, each generator backed by a K_j."""
    check_pair(p, q)
    reports = reports or {j: kappa(p, q, j) for j in EXTENSIONS}
    xs = x_square(p, q)
    if xs:
        branch, gens = "(1)", _labels("H0", "H1", "H2")
    elif fundamental_unit(2 * p).norm == 1 or _a_square(p, q):
        branch, gens = "(2)(a)", _labels("H0", "H1", "I")
    else:
        branch, gens = "(2)(b)", _labels("H0", "H1")
    principal = k_principal_labels(p, q)
    evidence = {}
    for g in gens:
        if g.has_I:
            src = [j for j, r in reports.items()
                   if r.candidates and all(any(x.has_I for x in c) for c in r.candidates)]
            if not src:
                raise InconsistencyError("no extension forces an I-class into the kernel")
            evidence[str(g)] = {"via": src, "route": "every candidate kernel is X·I with X "
                                "in the verified H-part"}
            continue
        via = [j for j, r in reports.items() if g in r.h_capitulating]
        if not via:
            raise InconsistencyError(f"{g} capitulates in none of K1, K2, K3")
        evidence[str(g)] = {"via": via}
    strong, _ = strong_generators(p, q)
    covered = span(gens)
    contained = all(any(s * c in principal for c in covered) for s in strong)
    if not contained:
        raise InconsistencyError("Am_s is not inside the genus kernel")
    return GenusKernel(p, q, branch, gens, class_count(gens, principal), evidence, contained)


# the 2-elementary application ---------------------------------------------------------

@dataclass
class ApplicationProfile:
    p: int
    q: int
    hypotheses: dict
    x_minus_root: int
    a_minus_root: int
    cl2_type: tuple[int, ...]
    cl2_from_kuroda: int
    kernels: dict
    genus_order: int

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "hypotheses": self.hypotheses,
                "x-1": f"{self.x_minus_root}^2", "a-1": f"{self.a_minus_root}^2",
                "cl2_type": list(self.cl2_type), "cl2_order_from_kuroda": self.cl2_from_kuroda,
                "kernels": self.kernels, "genus_kernel_order": self.genus_order}


def application_profile(p: int, q: int) -> ApplicationProfile:
    check_pair(p, q)
    if p % 8 != 1:
        raise PreconditionError(f"p mod 8 = {p % 8}, need 1")
    if q % 8 != 3:
        raise PreconditionError(f"q mod 8 = {q % 8}, need 3")
    if kronecker(p, q) != -1:
        raise PreconditionError(f"(p/q) = {kronecker(p, q)}, need -1")
    roots = []
    for m in (2 * p * q, p * q):
        u = fundamental_unit(m)
        r = perfect_square(int(u.x) - 1) if u.norm == 1 and u.integral else None
        if r is None:
            raise InconsistencyError(f"x-1 is not a square for eps_{m}")
        roots.append(r)
    from .oracle import kuroda_h_k
    h = kuroda_h_k(p, q)
    two = h & -h
    am, am_s, _, _ = ambiguous_sizes(p, q)
    if two != 8 or am_s != 8:
        raise InconsistencyError(f"|Cl_2(k)| = {two}, |Am_s| = {am_s}; expected 8")
    reps = {j: kappa(p, q, j) for j in EXTENSIONS}
    if reps["K1"].kernel_generators != _labels("H1", "H2"):
        raise InconsistencyError("kappa_K1 is not <H1, H2>")
    gk = genus_kernel(p, q, reps)
    if gk.order != 8:
        raise InconsistencyError(f"genus kernel order {gk.order} != 8")
    hyp = {"p mod 8": p % 8, "q mod 8": q % 8, "(p/q)": kronecker(p, q)}
    kernels = {j: r.kernel_text() for j, r in reps.items()}
    kernels["genus"] = _gen_text(gk.generators)
    return ApplicationProfile(p, q, hyp, roots[0], roots[1], (2, 2, 2), two, kernels, gk.order)

