"""Published Tables 2-8 and the Lie-algebra list, transcribed cell by cell,
and a computed verdict for every cell.

A merged (multirow) cell is a single entry whose claim is checked against
each model row it spans.  Verdicts: ``matches``, ``proportional`` (equal up
to a nonzero constant), ``mismatch`` and ``ambiguous`` (the cell cannot be
read as one claim, or it holds for some spanned rows and fails for others).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from functools import lru_cache

from .cohomology import build_slice, cohomology_dims, independent_mod_image, is_cocycle
from .leaves import frame_violations, leaf_frame, table5_vectors, LeafFrame
from .models import (
    CASIMIRS,
    MODEL_CODES,
    TABLE4_FORMS,
    flaschka_ratiu,
    get_model,
    model_lie_class,
    proportionality_check,
)
from .multivector import MultiVector, bundle_map
from .poly import Polynomial, parse

VERDICTS = ("matches", "proportional", "mismatch", "ambiguous")


@dataclass(frozen=True)
class Entry:
    location: str
    paper_text: str
    computed: str
    verdict: str

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"bad verdict {self.verdict!r}")


@dataclass
class DiscrepancyReport:
    entries: list

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            if e.location in seen:
                raise ValueError(f"duplicate cell {e.location}")
            seen.add(e.location)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def get(self, location: str) -> Entry:
        for e in self.entries:
            if e.location == location:
                return e
        raise KeyError(location)

    def select(self, prefix: str) -> DiscrepancyReport:
        return DiscrepancyReport([e for e in self.entries if e.location.startswith(prefix)])

    def counts(self) -> dict:
        out = {v: 0 for v in VERDICTS}
        for e in self.entries:
            out[e.verdict] += 1
        return out

    def flagged(self) -> list:
        return [e for e in self.entries if e.verdict in ("mismatch", "ambiguous")]

    def to_json_obj(self) -> list:
        return [asdict(e) for e in self.entries]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["location", "paper_text", "computed", "verdict"])
        for e in self.entries:
            w.writerow([e.location, e.paper_text, e.computed, e.verdict])
        return buf.getvalue()

    def to_text(self) -> str:
        if not self.entries:
            return ""
        width = max(len(e.location) for e in self.entries)
        lines = []
        for e in self.entries:
            lines.append(f"{e.location:<{width}}  [{e.verdict}]")
            lines.append(f"{'':<{width}}    published: {e.paper_text}")
            lines.append(f"{'':<{width}}    computed:  {e.computed}")
        return "\n".join(lines)


def _mv(grade: int, spec: dict) -> MultiVector:
    return MultiVector(grade, {tuple(idx): parse(s) for idx, s in spec.items()})


def _fmt_factor(g) -> str:
    return str(g)


# -- Table 2: Casimirs -------------------------------------------------------------

TABLE2 = {code: (CASIMIRS[code], "t") for code in MODEL_CODES}


def table2_entries() -> list:
    out = []
    for code in MODEL_CODES:
        m = get_model(code)
        for n, text in enumerate(TABLE2[code], start=1):
            c = parse(text)
            ok = c == m.casimirs[n - 1] and bundle_map(m.bivector, c.gradient()).is_zero()
            computed = f"{c}; annihilated by the determinant bivector: {'yes' if ok else 'no'}"
            out.append(Entry(f"table2/{code}/C{n}", text, computed, "matches" if ok else "mismatch"))
    return out


# -- Table 3: differentials ---------------------------------------------------------

TABLE3 = {
    "c0-i0": (("2*x1", "2*x2", "2*x3", "0"), ("0", "0", "0", "1")),
    "c0-i3": (("-2*x1", "-2*x2", "-2*x3", "0"), ("0", "0", "0", "1")),
    "s0-i1": (("-2*x1", "2*x2", "2*x3", "0"), ("0", "0", "0", "1")),
    "s0-i2": (("-2*x1", "-2*x2", "2*x3", "0"), ("0", "0", "0", "1")),
    "c1-i0": (("2*x1", "2*x2", "0", "0"), ("0", "0", "0", "1")),
    "c1-i2": (("-2*x1", "-2*x2", "0", "0"), ("0", "0", "0", "1")),
    "s1-i1": (("-2*x1", "2*x2", "0", "0"), ("0", "0", "0", "1")),
}


def _tuple_text(polys) -> str:
    return "(" + ", ".join(str(p) for p in polys) + ")"


def table3_entries() -> list:
    out = []
    for code in MODEL_CODES:
        m = get_model(code)
        for n, comps in enumerate(TABLE3[code], start=1):
            grad = m.casimirs[n - 1].gradient()
            ok = tuple(parse(s) for s in comps) == tuple(grad)
            out.append(Entry(f"table3/{code}/dC{n}", "(" + ", ".join(comps) + ")", _tuple_text(grad), "matches" if ok else "mismatch"))
    return out


# -- Table 4: bivectors ------------------------------------------------------------------

TABLE4_SPANS = {1: ("c0-i0", "c0-i3"), 2: ("s0-i1",), 3: ("s0-i2",), 4: ("c1-i0", "c1-i2"), 5: ("s1-i1",)}


def table4_entries() -> list:
    out = []
    for form, codes in TABLE4_SPANS.items():
        pub = _mv(2, TABLE4_FORMS[form])
        parts, factors = [], []
        for code in codes:
            fr = get_model(code).bivector
            g = proportionality_check(fr, pub)
            factors.append(g)
            parts.append(f"{code}: det bivector {fr}" + (f" = ({_fmt_factor(g)}) * published" if g is not None else ", not proportional"))
        duplicate = any(TABLE4_FORMS[o] == TABLE4_FORMS[form] for o in TABLE4_FORMS if o != form)
        if all(g is not None and isinstance(g, type(factors[0])) and not isinstance(g, Polynomial) for g in factors):
            verdict = "matches" if all(g == 1 for g in factors) else "proportional"
        elif duplicate:
            verdict = "ambiguous"
            parts.append("printed expression duplicates another form")
        else:
            verdict = "mismatch"
        out.append(Entry(f"table4/form{form}", f"k*({pub})", "; ".join(parts), verdict))
    return out


# -- Lie algebra list ----------------------------------------------------------------------

LIE_CLAIMS = {
    # item -> (Table 4 form it is attached to, printed brackets, printed name)
    1: (1, {(1, 2): "x3", (1, 3): "-x2", (2, 3): "x1"}, "so3"),
    2: (2, {(1, 2): "-x3", (1, 3): "x2", (2, 3): "x1"}, "sl2R"),
    3: (3, {(1, 3): "-x2", (2, 3): "x1"}, "e2"),
}


def lie_entries() -> list:
    from .models import classify_lie, structure_constants

    out = []
    for item, (form, brackets, name) in LIE_CLAIMS.items():
        listed = classify_lie(structure_constants(_mv(2, brackets))).name
        rows = TABLE4_SPANS[form]
        classes = {code: model_lie_class(code).name for code in rows}
        printed_form = _mv(2, TABLE4_FORMS[form])
        same_constants = printed_form == _mv(2, brackets)
        computed = ", ".join(f"{c}: {n}" for c, n in classes.items())
        computed += f"; printed brackets classify as {listed}"
        if not same_constants:
            owners = [f for f, s in TABLE4_FORMS.items() if _mv(2, s) == _mv(2, brackets)]
            computed += f" and are the constants of form {owners}" if owners else " and match no form"
        ok = listed == name and all(n == name for n in classes.values())
        out.append(Entry(f"lie-list/item{item}", f"form ({form}) -> {name}", computed, "matches" if ok else "mismatch"))
    unnamed = model_lie_class("s1-i1").name
    out.append(Entry("lie-list/form5", "(no algebra named)", f"s1-i1: {unnamed}", "ambiguous"))
    return out


# -- Table 5: leaf frames ---------------------------------------------------------------------

TABLE5_SAMPLE_POINTS = ((0.6, -0.3, 0.45, 0.2), (-0.2, 0.7, -0.5, -0.4), (1.1, 0.4, 0.9, 0.0))

# (cell, the rows it spans, which vector)
TABLE5_CELLS = (
    ("table5/dim0-center/u", ("c0-i0", "c0-i3"), "u", "(-x2*d1 + x1*d2)/sqrt(x1^2+x2^2)"),
    ("table5/dim0-center/v", ("c0-i0", "c0-i3"), "v", "-1/(x1^2+x2^2)*(x1^2*x3*d1 + x1*x2*x3*d2) + x1*d3"),
    ("table5/s0-i1/u", ("s0-i1",), "u", "(x2*d1 + x1*d2)/sqrt(x1^2+x2^2)"),
    ("table5/s0-i1/v", ("s0-i1",), "v", "-1/(x1^2+x2^2)*(x1^2*x3*d1 - x1*x2*x3*d2) + x1*d3"),
    ("table5/s0-i2/u", ("s0-i2",), "u", "(-x2*d1 + x1*d2)/sqrt(x1^2+x2^2)"),
    ("table5/s0-i2/v", ("s0-i2",), "v", "-1/(x1^2+x2^2)*(x1^2*x3*d1 + x1*x2*x3*d2) + x1*d3"),
    ("table5/dim1-center/u", ("c1-i0", "c1-i2"), "u", "(-x2*d1 + x1*d2)/sqrt(x1^2+x2^2)"),
    ("table5/s1-i1/u", ("s1-i1",), "u", "(x2*d1 + x1*d2)/sqrt(x1^2+x2^2)"),
    ("table5/dim1/v", ("c1-i0", "c1-i2", "s1-i1"), "v", "x1*d3"),
)


def _printed_frame_ok(code: str, which: str) -> bool:
    for p in TABLE5_SAMPLE_POINTS:
        u, v = table5_vectors(code, p)
        frame = LeafFrame(u=u, v=v, point=p)
        bad = [b for b in frame_violations(code, frame) if f"({which})" in b or "orthogonal" in b]
        if bad:
            return False
    return True


def table5_entries() -> list:
    out = []
    for loc, codes, which, text in TABLE5_CELLS:
        ok = {c: _printed_frame_ok(c, which) for c in codes}
        if all(ok.values()):
            out.append(Entry(loc, text, "tangent to the leaf and orthogonal to its partner at sampled points", "matches"))
            continue
        fixes = []
        for c in codes:
            if not ok[c]:
                fr = leaf_frame(c, TABLE5_SAMPLE_POINTS[0])
                fixes.append(f"{c}: not annihilated by dC1; flipping the prefactor to +1/(x1^2+x2^2) gives a tangent frame, "
                             f"e.g. v = {tuple(round(x, 6) for x in fr.v)} at {TABLE5_SAMPLE_POINTS[0]}")
        verdict = "mismatch" if not any(ok.values()) else "ambiguous"
        out.append(Entry(loc, text, "; ".join(fixes), verdict))
    out.append(
        Entry(
            "leaf-form/area",
            "omega = x1/(k sqrt(x1^2+x2^2)) * (euclidean area form)",
            "on the frame (u, v) the induced form is omega(u, v) = x1/(k sqrt(x1^2+x2^2)) for k times the normal form, "
            "while the euclidean area |u||v| is |x1| sqrt(x1^2+x2^2+x3^2)/sqrt(x1^2+x2^2) (isolated) or |x1| (circles); "
            "the formula holds with the area form normalized to 1 on the frame",
            "mismatch",
        )
    )
    return out


# -- Tables 6-8: cohomology ---------------------------------------------------------------

@dataclass(frozen=True)
class CohomologyClaim:
    location: str
    models: tuple
    grade: int  # -1 for the "all k >= 1" cells
    degrees: tuple
    dim: int
    generators: tuple = ()  # (grade, {indices: coeff}) pairs
    text: str = ""


def _gen(grade, spec):
    return (grade, tuple(sorted(spec.items())))


_SO3 = ("c0-i0", "c0-i3")
_E2ROWS = ("c1-i0", "c1-i2", "s1-i1")

COHOMOLOGY_CLAIMS = (
    CohomologyClaim("table6/index0/H0", ("c0-i0",), 0, (2,), 1, (_gen(0, {(): "x1^2+x2^2+x3^2"}),), "R, generated by <x1^2+x2^2+x3^2>"),
    CohomologyClaim("table6/index0/Hk", ("c0-i0",), -1, (0, 1, 2), 0, (), "0 for k >= 1"),
    CohomologyClaim("table6/index3/H0", ("c0-i3",), 0, (2,), 1, (_gen(0, {(): "-x1^2-x2^2-x3^2"}),), "R, generated by <-x1^2-x2^2-x3^2>"),
    CohomologyClaim("table6/index3/Hk", ("c0-i3",), -1, (0, 1, 2), 0, (), "0 for k >= 1"),
    CohomologyClaim("table6/index1/H0", ("s0-i1",), 0, (2,), 1, (_gen(0, {(): "-x1^2+x2^2+x3^2"}),), "R generated by <-x1^2+x2^2+x3^2>"),
    CohomologyClaim("table6/index1/Hk", ("s0-i1",), -1, (0, 1, 2), 0, (), "0 for k >= 1"),
    # linear coefficients: H0 read at degree 2 (its generator is quadratic), the rest at degree 1
    CohomologyClaim("table7/s0-i2/H0", ("s0-i2",), 0, (2,), 1, (_gen(0, {(): "-x1^2-x2^2+x3^2"}),), "R generated by <-x1^2-x2^2+x3^2>"),
    CohomologyClaim("table7/s0-i2/H1", ("s0-i2",), 1, (1,), 0, (), "0"),
    CohomologyClaim("table7/s0-i2/H2", ("s0-i2",), 2, (1,), 0, (), "0"),
    CohomologyClaim("table7/s0-i2/H3", ("s0-i2",), 3, (1,), 0, (), "0"),
    CohomologyClaim("table7/dim1/H0", _E2ROWS, 0, (2,), 1, (_gen(0, {(): "-x1^2+x2^2"}),), "R, generated by <-x1^2+x2^2>"),
    CohomologyClaim("table7/dim1/H1", _E2ROWS, 1, (1,), 1, (_gen(1, {(1,): "x1", (2,): "x2"}),), "R generated by <x1*d1 + x2*d2>"),
    CohomologyClaim("table7/dim1/H2", _E2ROWS, 2, (1,), 1, (_gen(2, {(1, 2): "x3"}),), "R generated by <x3*d12>"),
    CohomologyClaim("table7/dim1/H3", _E2ROWS, 3, (1,), 1, (_gen(3, {(1, 2, 3): "x3"}),), "R generated by <x3*d123>"),
    CohomologyClaim("table8/s0-i2/H0", ("s0-i2",), 0, (2,), 1, (_gen(0, {(): "-x1^2-x2^2+x3^2"}),), "R generated by <-x1^2-x2^2+x3^2>"),
    CohomologyClaim("table8/s0-i2/H1", ("s0-i2",), 1, (2,), 0, (), "0"),
    CohomologyClaim("table8/s0-i2/H2", ("s0-i2",), 2, (2,), 0, (), "0"),
    CohomologyClaim("table8/s0-i2/H3", ("s0-i2",), 3, (2,), 0, (), "0"),
    CohomologyClaim("table8/dim1/H0", _E2ROWS, 0, (2,), 1, (_gen(0, {(): "-x1^2+x2^2"}),), "R, generated by <-x1^2+x2^2>"),
    CohomologyClaim(
        "table8/dim1/H1", _E2ROWS, 1, (2,), 2, (_gen(1, {(3,): "x1^2"}), _gen(1, {(3,): "x2^2"})),
        "R^2 generated by <a*x1^2*d3, b*x2^2*d3>, a != b",
    ),
    CohomologyClaim("table8/dim1/H2", _E2ROWS, 2, (2,), 1, (_gen(2, {(1, 2): "x3^2"}),), "R generated by <x3^2*d12>"),
    CohomologyClaim("table8/dim1/H3", _E2ROWS, 3, (2,), 1, (_gen(3, {(1, 2, 3): "x3^2"}),), "R generated by <x3^2*d123>"),
)

# bivector and Lie algebra cells of Tables 6-8
STRUCTURE_CELLS = (
    ("table6/index0-3/bivector", _SO3, {(1, 2): "x3", (1, 3): "-x2", (2, 3): "x1"}, None),
    ("table6/index0-3/lie", _SO3, None, "so3"),
    ("table6/index1/bivector", ("s0-i1",), {(1, 2): "-x3", (1, 3): "x2", (2, 3): "x1"}, None),
    ("table6/index1/lie", ("s0-i1",), None, "sl2R"),
    ("table7/s0-i2/bivector", ("s0-i2",), {(1, 2): "-x3", (1, 3): "-x2", (2, 3): "x1"}, None),
    ("table7/index0-2/bivector", ("c1-i0", "c1-i2"), {(1, 3): "-x2", (2, 3): "x1"}, None),
    ("table7/index1/bivector", ("s1-i1",), {(1, 3): "x2", (2, 3): "x1"}, None),
    ("table8/s0-i2/bivector", ("s0-i2",), {(1, 2): "-x3", (1, 3): "-x2", (2, 3): "x1"}, None),
    ("table8/index0-2/bivector", ("c1-i0", "c1-i2"), {(1, 3): "-x2", (2, 3): "x1"}, None),
    ("table8/index1/bivector", ("s1-i1",), {(1, 3): "x2", (2, 3): "x1"}, None),
)


@lru_cache(maxsize=None)
def model_cohomology(code: str, d: int):
    return cohomology_dims(get_model(code).normal_form, d)


def _claim_holds(claim: CohomologyClaim, code: str) -> tuple:
    """(holds, computed text) for one spanned row."""
    pi = get_model(code).normal_form
    notes = []
    holds = True
    for d in claim.degrees:
        res = model_cohomology(code, d)
        grades = (1, 2, 3) if claim.grade == -1 else (claim.grade,)
        for k in grades:
            h = res.dims[k]
            gens = ", ".join(str(g) for g in res.generators[k]) or "-"
            notes.append(f"h{k}(d={d})={h} [{gens}]")
            if h != claim.dim:
                holds = False
    if claim.generators:
        d = claim.degrees[0]
        vecs = [_mv(g, dict(spec)) for g, spec in claim.generators]
        k = claim.grade
        if not all(is_cocycle(pi, v) for v in vecs):
            holds = False
            notes.append("printed generator is not a cocycle")
        elif not independent_mod_image(pi, d, k, vecs):
            holds = False
            notes.append("printed generators are dependent modulo coboundaries")
    return holds, "; ".join(notes)


def cohomology_entries(prefix: str = "") -> list:
    out = []
    for cell, codes, spec, lie in STRUCTURE_CELLS:
        if not cell.startswith(prefix):
            continue
        if spec is not None:
            pub = _mv(2, spec)
            parts, ok = [], True
            for code in codes:
                g = proportionality_check(get_model(code).bivector, pub)
                if g is None or isinstance(g, Polynomial):
                    ok = False
                    parts.append(f"{code}: not proportional to the determinant bivector")
                else:
                    parts.append(f"{code}: determinant bivector = ({g}) * printed")
            out.append(Entry(cell, str(pub), "; ".join(parts), "proportional" if ok else "mismatch"))
        else:
            names = {code: model_lie_class(code).name for code in codes}
            ok = all(n == lie for n in names.values())
            out.append(Entry(cell, lie, ", ".join(f"{c}: {n}" for c, n in names.items()), "matches" if ok else "mismatch"))
    for claim in COHOMOLOGY_CLAIMS:
        if not claim.location.startswith(prefix):
            continue
        results = {code: _claim_holds(claim, code) for code in claim.models}
        computed = " | ".join(f"{code}: {txt}" for code, (_, txt) in results.items())
        flags = [ok for ok, _ in results.values()]
        verdict = "matches" if all(flags) else "mismatch" if not any(flags) else "ambiguous"
        out.append(Entry(claim.location, claim.text, computed, verdict))
    return out


def cohomology_claims(code: str) -> dict:
    """Published cohomology cells covering ``code``, keyed by location."""
    return {c.location: c.text for c in COHOMOLOGY_CLAIMS if code in c.models}


def compare_cohomology(code: str, results: dict) -> list:
    """Short discrepancy lines for the cells covering ``code``."""
    out = []
    for claim in COHOMOLOGY_CLAIMS:
        if code not in claim.models:
            continue
        ok, text = _claim_holds(claim, code)
        if not ok:
            out.append(f"{claim.location}: published {claim.text!r}; computed {text}")
    return out


# -- assembly --------------------------------------------------------------------------------

_BUILDERS = {
    2: table2_entries,
    3: table3_entries,
    4: lambda: table4_entries() + lie_entries(),
    5: table5_entries,
    6: lambda: cohomology_entries("table6"),
    7: lambda: cohomology_entries("table7"),
    8: lambda: cohomology_entries("table8"),
}


def discrepancy_report(which=None) -> DiscrepancyReport:
    tables = sorted(_BUILDERS) if which is None else [int(which)]
    entries = []
    for n in tables:
        if n not in _BUILDERS:
            raise ValueError(f"no table {n}; choose from {sorted(_BUILDERS)}")
        entries.extend(_BUILDERS[n]())
    return DiscrepancyReport(entries)


def computed_table(which: int) -> list:
    """Rows of the computed table in the published layout (list of dicts)."""
    which = int(which)
    rows = []
    if which == 2:
        for code in MODEL_CODES:
            m = get_model(code)
            rows.append({"model": code, "C1": str(m.casimirs[0]), "C2": str(m.casimirs[1])})
    elif which == 3:
        for code in MODEL_CODES:
            m = get_model(code)
            rows.append({"model": code, "dC1": _tuple_text(m.differentials[0]), "dC2": _tuple_text(m.differentials[1])})
    elif which == 4:
        for code in MODEL_CODES:
            m = get_model(code)
            g = proportionality_check(m.bivector, m.paper_bivector)
            rows.append({
                "model": code,
                "bivector": str(m.bivector),
                "published_form": m.table4_form,
                "factor": "none" if g is None else str(g),
                "lie_class": model_lie_class(code).name,
            })
    elif which == 5:
        p = TABLE5_SAMPLE_POINTS[0]
        for code in MODEL_CODES:
            fr = leaf_frame(code, p)
            rows.append({"model": code, "point": str(p), "u": str(tuple(round(x, 12) for x in fr.u)),
                         "v": str(tuple(round(x, 12) for x in fr.v)), "corrected": fr.corrected})
    elif which in (6, 7, 8):
        codes = {6: ("c0-i0", "c0-i3", "s0-i1"), 7: ("s0-i2",) + _E2ROWS, 8: ("s0-i2",) + _E2ROWS}[which]
        for code in codes:
            for d in range(4):
                res = model_cohomology(code, d)
                rows.append({"model": code, "d": d, **{f"h{k}": res.dims[k] for k in range(4)}})
    else:
        raise ValueError(f"no table {which}; choose from {sorted(_BUILDERS)}")
    return rows


def render_table(which: int, fmt: str = "text") -> str:
    rows = computed_table(which)
    report = discrepancy_report(which)
    if fmt == "json":
        return json.dumps({"table": int(which), "rows": rows, "cells": report.to_json_obj()}, indent=2, sort_keys=True)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue() + "\n" + report.to_csv()
    cols = list(rows[0])
    widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) for c in cols}
    lines = [f"table {which} (computed)", "  ".join(f"{c:<{widths[c]}}" for c in cols)]
    lines += ["  ".join(f"{str(r[c]):<{widths[c]}}" for c in cols) for r in rows]
    counts = ", ".join(f"{k}: {v}" for k, v in report.counts().items())
    lines += ["", f"cells ({counts})", report.to_text()]
    return "\n".join(lines)
