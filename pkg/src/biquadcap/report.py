"""Canonical report documents, range scans and fixture verification."""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import prod

from .arith import is_prime, kronecker
from .capitulation import (EXTENSIONS, _a_square, _gen_text, application_profile, genus_kernel,
                           k_principal_labels, kappa, kernel_size, predicted_principal,
                           principal_in)
from .errors import InconsistencyError, PreconditionError
from .genus import ambiguous_report, ambiguous_sizes, label, x_square
from .oracle import (FixtureRow, KurodaConvention, fixture_rows, fixtures, kuroda_h_k,
                     kuroda_terms, pin_kuroda)
from .quadfield import fundamental_unit, square_class_case
from .units import check_pair, fsu, hasse_Q_K3, unit_index


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2)


# single pair -----------------------------------------------------------------

def _eps_dict(m: int, p: int) -> dict:
    u = fundamental_unit(m)
    d = {"m": m, "x": str(u.x), "y": str(u.y), "norm": u.norm}
    if u.norm == 1 and u.integral and m % p == 0:
        sc = square_class_case(u, p)
        d["square_class"] = sc.case.value
        d["root"] = sc.root
    return d


def kuroda_convention() -> KurodaConvention:
    return pin_kuroda(fixtures()[0])


def build_report(p: int, q: int, aux_bound: int | None = None) -> dict:
    check_pair(p, q)
    d = 2 * p * q
    caps = {j: kappa(p, q, j) for j in EXTENSIONS}
    gk = genus_kernel(p, q, caps)
    conv = kuroda_convention()
    Q, hr, hi = kuroda_terms(p, q)
    oracle = {"kuroda": {"h_k": kuroda_h_k(p, q, conv), "hasse_Q_k": Q, "h_2pq": hr,
                         "h_minus_2pq": hi, "factor": conv.factor, "pinned_on": conv.pinned_on}}
    rows = fixture_rows(p, q)
    if rows:
        oracle["fixture_cl_k_order"] = prod(rows[0].cl_k)
        oracle["fixture_tables"] = [r.table for r in rows]
    doc = {
        "input": {"p": p, "q": q, "d": d},
        "units": {"eps_2pq": _eps_dict(d, p), "eps_pq": _eps_dict(p * q, p),
                  "eps_2p": _eps_dict(2 * p, p), "eps_p": _eps_dict(p, p),
                  "eps_q": _eps_dict(q, p)},
        "fsu": {j: fsu(j, p, q).to_dict() for j in ("k",) + EXTENSIONS},
        "unit_index": {j: unit_index(p, q, j) for j in EXTENSIONS},
        "ambiguous": ambiguous_report(p, q, aux_bound).to_dict(),
        "capitulation": {j: r.to_dict() for j, r in caps.items()},
        "genus_kernel": gk.to_dict(),
        "oracle": oracle,
        "application": None,
    }
    if p % 8 == 1 and q % 8 == 3 and kronecker(p, q) == -1:
        doc["application"] = application_profile(p, q).to_dict()
    return doc


def to_markdown(doc: dict) -> str:
    inp = doc["input"]
    out = [f"# p = {inp['p']}, q = {inp['q']}, d = {inp['d']}", ""]
    out += ["| unit | x | y | norm | square class |", "|---|---|---|---|---|"]
    for name, u in doc["units"].items():
        sc = f"{u['square_class']} = {u['root']}²" if "square_class" in u else ""
        out.append(f"| {name} | {u['x']} | {u['y']} | {u['norm']} | {sc} |")
    out += ["", "| field | FSU | Q | branch |", "|---|---|---|---|"]
    for j, r in doc["fsu"].items():
        gens = ", ".join([r["torsion"]] + [g["symbol"] for g in r["generators"]])
        out.append(f"| {j} | {gens} | {r['hasse_Q']} | {r['branch']} |")
    am = doc["ambiguous"]
    out += ["", f"Ambiguous classes: |Am| = {am['am_order']}, |Am_s| = {am['am_s_order']}, "
            f"strong generators {', '.join(am['strong_generators'])}"]
    if am["auxiliary_prime"]:
        out.append(f"Auxiliary prime l = {am['auxiliary_prime']['l']}")
    out += ["", "| field | branch | size | kernel | resolved by | witnesses |",
            "|---|---|---|---|---|---|"]
    for j, c in doc["capitulation"].items():
        if c["kernel_generators"] is not None:
            ker = "⟨" + ", ".join(f"[{g}]" for g in c["kernel_generators"]) + "⟩"
        else:
            ker = " or ".join("⟨" + ", ".join(f"[{g}]" for g in cand) + "⟩"
                              for cand in c["candidates"])
        wit = ", ".join(f"{w['label']} ({w['route']})" for w in c["witnesses"])
        out.append(f"| {j} | {c['branch']} | {c['kernel_size']} | {ker} | "
                   f"{c['resolved_by']} | {wit} |")
    g = doc["genus_kernel"]
    out += ["", f"Genus field kernel contains ⟨{', '.join(g['generators'])}⟩ "
            f"(order {g['order']}, branch {g['branch']})"]
    k = doc["oracle"]["kuroda"]
    out.append(f"Class number of k (Kuroda): {k['h_k']}")
    if doc["application"]:
        a = doc["application"]
        out += ["", "## 2-elementary case", f"x-1 = {a['x-1']}, a-1 = {a['a-1']}, "
                f"Cl_2(k) of type {tuple(a['cl2_type'])}, genus kernel order "
                f"{a['genus_kernel_order']}"]
    return "\n".join(out) + "\n"


# scans --------------------------------------------------------------------------

SCAN_COLUMNS = ["p", "q", "d", "eps_2pq_case", "eps_pq_case", "norm_eps_2p", "Q_K3",
                "kappa_K1", "kappa_K2", "kappa_K3", "am_order", "am_s_order",
                "k2_case", "k3_case"]


def _k2_case(p: int, q: int) -> str:
    if fundamental_unit(2 * p).norm == 1:
        return "1" if x_square(p, q) else "2"
    return "3"


def _k3_case(p: int, q: int) -> str:
    xs, as_ = x_square(p, q), _a_square(p, q)
    return "1" if xs and as_ else "2" if xs else "3" if as_ else "4"


FILTERS = {
    "p1mod8": lambda p, q: p % 8 == 1,
    "p5mod8": lambda p, q: p % 8 == 5,
    "xs": lambda p, q: x_square(p, q),
    "app": lambda p, q: p % 8 == 1 and q % 8 == 3 and kronecker(p, q) == -1,
    **{f"k2-case{n}": (lambda n: lambda p, q: _k2_case(p, q) == n)(str(n)) for n in (1, 2, 3)},
    **{f"k3-case{n}": (lambda n: lambda p, q: _k3_case(p, q) == n)(str(n)) for n in (1, 2, 3, 4)},
}


def scan_row(pair: tuple[int, int]) -> dict:
    p, q = pair
    d = 2 * p * q
    sc = square_class_case(fundamental_unit(d), p)
    sa = square_class_case(fundamental_unit(p * q), p)
    k3 = _k3_case(p, q)
    am, am_s, _, _ = ambiguous_sizes(p, q)
    return {
        "p": p, "q": q, "d": d, "eps_2pq_case": sc.case.value,
        "eps_pq_case": sa.case.label("a"), "norm_eps_2p": fundamental_unit(2 * p).norm,
        "Q_K3": hasse_Q_K3(p, q).Q if k3 == "1" else 1,
        "kappa_K1": kernel_size(p, q, "K1"), "kappa_K2": kernel_size(p, q, "K2"),
        "kappa_K3": kernel_size(p, q, "K3"), "am_order": am, "am_s_order": am_s,
        "k2_case": _k2_case(p, q), "k3_case": k3,
    }


def admissible_pairs(p_max: int, q_max: int) -> list[tuple[int, int]]:
    ps = [p for p in range(5, p_max + 1) if p % 4 == 1 and is_prime(p)]
    qs = [q for q in range(3, q_max + 1) if q % 4 == 3 and is_prime(q)]
    return [(p, q) for p in ps for q in qs]


def scan(p_max: int, q_max: int, filters: list[str] | None = None, jobs: int = 1) -> list[dict]:
    filters = filters or []
    for f in filters:
        if f not in FILTERS:
            raise PreconditionError(f"unknown filter {f!r}; choose from {sorted(FILTERS)}")
    pairs = [pq for pq in admissible_pairs(p_max, q_max)
             if all(FILTERS[f](*pq) for f in filters)]
    if jobs > 1 and len(pairs) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(scan_row, pairs, chunksize=4))
    else:
        rows = [scan_row(pq) for pq in pairs]
    return sorted(rows, key=lambda r: (r["p"], r["q"]))


# fixture verification ------------------------------------------------------------

@dataclass
class CellCheck:
    cell: str
    status: str  # pass, fail, fixture-only
    detail: str = ""


@dataclass
class RowCheck:
    row: FixtureRow
    cells: list[CellCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.cells)

    def to_dict(self) -> dict:
        return {"table": self.row.table, "d": self.row.d, "ok": self.ok,
                "cells": [{"cell": c.cell, "status": c.status, "detail": c.detail}
                          for c in self.cells]}


def _check(cells: list[CellCheck], name: str, ok: bool, detail: str) -> None:
    cells.append(CellCheck(name, "pass" if ok else "fail", detail))


def _branch_ok(row: FixtureRow) -> tuple[bool, str]:
    p, q = row.p, row.q
    if row.table.startswith("K2"):
        want = "1" if row.table in ("K2-x+1", "K2-x-1") else "2"
        got = _k2_case(p, q)
        return got == want, f"K2 case {got}, table expects {want}"
    got = _k3_case(p, q)
    return got == "3", f"K3 case {got}, table expects 3"


def verify_row(row: FixtureRow, conv: KurodaConvention) -> RowCheck:
    p, q, d = row.p, row.q, row.d
    out = RowCheck(row)
    cells = out.cells
    try:
        check_pair(p, q)
    except PreconditionError as e:
        _check(cells, "pair", False, str(e))
        return out
    if row.root is not None:
        sc = square_class_case(fundamental_unit(d), p)
        _check(cells, "case_label", sc.case.value == row.case_label,
               f"fixture {row.case_label}, computed {sc.case.value}")
        _check(cells, "root", sc.root == row.root, f"fixture {row.root}, computed {sc.root}")
    else:
        sa = square_class_case(fundamental_unit(p * q), p)
        _check(cells, "case_label", sa.case.is_x and not x_square(p, q),
               f"fixture {row.case_label}, computed a-class {sa.case.label('a')}")
    ok, detail = _branch_ok(row)
    _check(cells, "branch", ok, detail)
    h = kuroda_h_k(p, q, conv)
    _check(cells, "cl_k_order", h == prod(row.cl_k), f"fixture {prod(row.cl_k)}, Kuroda {h}")
    principal = k_principal_labels(p, q)
    for fid, lab, bit in row.verdicts:
        name = f"{fid}:{lab}"
        if "^" in lab or "I" in lab:
            cells.append(CellCheck(name, "fixture-only", f"table bit {int(bit)}"))
            continue
        L = label(lab)
        got = L in principal if fid == "k" else principal_in(fid, p, q, L)
        _check(cells, name, got == bit, f"fixture {int(bit)}, computed {int(got)}")
    for fid in sorted({v[0] for v in row.verdicts} - {"k"}):
        rep = kappa(p, q, fid)
        cand = row.cells(fid)
        fits = [c for c in rep.candidates
                if all(predicted_principal(c, principal, label(lab)) == v
                       for lab, v in cand.items())]
        texts = " or ".join(_gen_text(c) for c in fits) or "none"
        _check(cells, f"{fid}:kernel", len(fits) == 1,
               f"cells select {texts} among {len(rep.candidates)} candidate(s)")
        if rep.resolved_by == "search" and len(fits) == 1:
            _check(cells, f"{fid}:kernel_vs_search", fits[0] == rep.kernel_generators,
                   f"search gives {rep.kernel_text()}")
    return out


def verify_fixtures(rows: list[FixtureRow] | None = None) -> list[RowCheck]:
    rows = list(fixtures() if rows is None else rows)
    try:
        conv = pin_kuroda(rows[0])
    except InconsistencyError:
        conv = KurodaConvention()
    return [verify_row(r, conv) for r in rows]
