"""JSON job parsing, validation and result serialization.

A job file is a single JSON object:

    {
      "group":      {"elements": [...], "table": [[...]], "rho": [...]}
                    or {"rank": r},
      "truncation": N,
      "command":    one of the names in COMMANDS,
      "operands":   command-specific payload
    }

Rationals travel as strings "p/q" (or "p"); series as
{"low": m, "coeffs": [{"<h-name>": "p/q", ...}, ...]} with one object
per exponent starting at ``low``; matrices as nested arrays of series;
class series as [{"degree": k, "classes": {"t^n*h": "p/q"}}]; models as
{"degree": s, "nodes": [...], "edges": [{"from", "to", "sign",
"label"}]} with labels {"t": n, "h": "<h-name>"}; complexes as
{"ranks": [...], "differentials": [matrix, ...]}.

Validation failures carry a JSON-pointer style ``path`` to the
offending value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .dynamics import DegreeModel, LabeledOrbitModel, ModelEdge
from .errors import ParseError, ValidationError
from .groups import TwistedGroup
from .k1 import SeriesMatrix
from .series import AlgebraElement, TruncatedSeries
from .torsion import BasedComplex
from .wittlog import ClassSeries

COMMANDS = (
    "log",
    "exp",
    "bchd",
    "project",
    "factorize",
    "trace-log",
    "gauss",
    "frakl",
    "torsion",
    "eta-direct",
    "eta-traces",
    "zeta-det",
    "zeta-counts",
    "abelian-zeta",
    "check-main",
)


@dataclass
class JobSpec:
    group: TwistedGroup
    truncation: int
    command: str
    operands: dict


# ---------------------------------------------------------------------------
# low-level readers
# ---------------------------------------------------------------------------


def _need(obj, key, path):
    if not isinstance(obj, dict):
        raise ValidationError("expected an object", path)
    if key not in obj:
        raise ValidationError("missing key %r" % key, path)
    return obj[key]


def _int(v, path):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValidationError("expected an integer", path)
    return v


def _rational(v, path):
    if isinstance(v, int) and not isinstance(v, bool):
        return Fraction(v)
    if not isinstance(v, str):
        raise ValidationError("rationals must be strings like \"p/q\"", path)
    try:
        return Fraction(v)
    except (ValueError, ZeroDivisionError):
        raise ValidationError("malformed rational %r" % v, path) from None


def read_group(obj, path="/group"):
    if not isinstance(obj, dict):
        raise ValidationError("group spec must be an object", path)
    if "rank" in obj:
        rank = _int(obj["rank"], path + "/rank")
        if rank < 0:
            raise ValidationError("rank must be >= 0", path + "/rank")
        return TwistedGroup.free_abelian(rank)
    elements = _need(obj, "elements", path)
    table = _need(obj, "table", path)
    rho = obj.get("rho")
    if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
        raise ValidationError("elements must be a list of names", path + "/elements")
    for i, name in enumerate(elements):
        if not name or "*" in name or any(ch.isspace() for ch in name):
            raise ValidationError(
                "element names must be nonempty without '*' or spaces",
                path + "/elements/%d" % i,
            )
    try:
        return TwistedGroup.finite(elements, table, rho)
    except ValidationError as exc:
        raise ValidationError(str(exc), path) from None


def read_algebra(group, obj, path):
    if not isinstance(obj, dict):
        raise ValidationError("coefficient must be an object {h: rational}", path)
    coeffs = {}
    for name, val in obj.items():
        h = _h_by_name(group, name, path)
        q = _rational(val, path + "/" + name)
        if q:
            coeffs[h] = coeffs.get(h, 0) + q
    return AlgebraElement(group, coeffs)


def _h_by_name(group, name, path):
    try:
        return group.h_by_name(name)
    except ValidationError as exc:
        raise ValidationError(str(exc), path) from None


def read_series(group, order, obj, path):
    if not isinstance(obj, dict):
        raise ValidationError("series must be an object", path)
    low = _int(_need(obj, "low", path), path + "/low")
    coeffs_json = _need(obj, "coeffs", path)
    if not isinstance(coeffs_json, list):
        raise ValidationError("coeffs must be a list", path + "/coeffs")
    out = TruncatedSeries.zero(group, order)
    for i, cobj in enumerate(coeffs_json):
        a = read_algebra(group, cobj, path + "/coeffs/%d" % i)
        if a and low + i <= order:
            out = out + TruncatedSeries.monomial(group, order, low + i, a)
    return out


def read_element(group, obj, path):
    if not isinstance(obj, dict):
        raise ValidationError("element must be {\"t\": n, \"h\": name}", path)
    n = _int(_need(obj, "t", path), path + "/t")
    h = _h_by_name(group, _need(obj, "h", path), path + "/h")
    return group.element(n, h)


def read_matrix(group, order, obj, path):
    if not isinstance(obj, list) or not obj:
        raise ValidationError("matrix must be a nonempty array of rows", path)
    rows = []
    width = None
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise ValidationError("row must be an array", path + "/%d" % i)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ValidationError("ragged matrix", path + "/%d" % i)
        rows.append(
            [read_series(group, order, s, path + "/%d/%d" % (i, j)) for j, s in enumerate(row)]
        )
    return SeriesMatrix(group, order, rows)


def read_class_series(group, order, obj, path):
    if not isinstance(obj, list):
        raise ValidationError("class series must be an array", path)
    out = ClassSeries.zero(group, order)
    coeffs = {}
    for i, entry in enumerate(obj):
        epath = path + "/%d" % i
        k = _int(_need(entry, "degree", epath), epath + "/degree")
        if k < 0:
            raise ValidationError("degree must be >= 0", epath + "/degree")
        if k > order:
            continue
        classes = _need(entry, "classes", epath)
        if not isinstance(classes, dict):
            raise ValidationError("classes must be an object", epath + "/classes")
        row = coeffs.setdefault(k, {})
        for name, val in classes.items():
            g = _element_by_name(group, name, epath + "/classes")
            if g.n != k:
                raise ValidationError(
                    "class %r is not at level %d" % (name, -k), epath + "/classes"
                )
            cls = group.conj_class(g)
            q = _rational(val, epath + "/classes/" + name)
            s = row.get(cls, 0) + q
            if s:
                row[cls] = s
            else:
                row.pop(cls, None)
    coeffs = {k: row for k, row in coeffs.items() if row}
    return ClassSeries(group, order, coeffs)


def _element_by_name(group, name, path):
    if not isinstance(name, str) or not name.startswith("t^") or "*" not in name:
        raise ValidationError("element name must look like \"t^n*h\"", path)
    head, hname = name.split("*", 1)
    try:
        n = int(head[2:])
    except ValueError:
        raise ValidationError("bad t-exponent in %r" % name, path) from None
    return group.element(n, _h_by_name(group, hname, path))


def read_model(group, obj, path):
    if not isinstance(obj, dict):
        raise ValidationError("model must be an object", path)
    degree = _int(_need(obj, "degree", path), path + "/degree")
    if degree < 0:
        raise ValidationError("degree must be >= 0", path + "/degree")
    nodes = _need(obj, "nodes", path)
    if not isinstance(nodes, list) or not all(isinstance(n, str) for n in nodes):
        raise ValidationError("nodes must be a list of names", path + "/nodes")
    index = {}
    for i, n in enumerate(nodes):
        if n in index:
            raise ValidationError("duplicate node %r" % n, path + "/nodes/%d" % i)
        index[n] = i
    edges_json = _need(obj, "edges", path)
    if not isinstance(edges_json, list):
        raise ValidationError("edges must be an array", path + "/edges")
    edges = []
    for i, e in enumerate(edges_json):
        epath = path + "/edges/%d" % i
        src = _need(e, "from", epath)
        dst = _need(e, "to", epath)
        if src not in index:
            raise ValidationError("unknown node %r" % src, epath + "/from")
        if dst not in index:
            raise ValidationError("unknown node %r" % dst, epath + "/to")
        sign = _int(_need(e, "sign", epath), epath + "/sign")
        if sign not in (1, -1):
            raise ValidationError("sign must be +1 or -1", epath + "/sign")
        label = read_element(group, _need(e, "label", epath), epath + "/label")
        if label.n != 1:
            raise ValidationError(
                "label grading level is %d, must be -1" % -label.n, epath + "/label"
            )
        edges.append(ModelEdge(index[src], index[dst], sign, label))
    return DegreeModel(degree, list(nodes), edges)


def read_models(group, obj, path):
    if not isinstance(obj, list) or not obj:
        raise ValidationError("models must be a nonempty array", path)
    parts = [read_model(group, m, path + "/%d" % i) for i, m in enumerate(obj)]
    try:
        return LabeledOrbitModel(group, parts)
    except ValidationError as exc:
        raise ValidationError(str(exc), path) from None


def read_complex(group, order, obj, path):
    ranks = _need(obj, "ranks", path)
    if not isinstance(ranks, list) or not ranks:
        raise ValidationError("ranks must be a nonempty array", path + "/ranks")
    ranks = [_int(r, path + "/ranks/%d" % i) for i, r in enumerate(ranks)]
    if any(r < 0 for r in ranks):
        raise ValidationError("ranks must be >= 0", path + "/ranks")
    diffs_json = _need(obj, "differentials", path)
    if not isinstance(diffs_json, list) or len(diffs_json) != len(ranks) - 1:
        raise ValidationError(
            "need exactly %d differentials" % (len(ranks) - 1), path + "/differentials"
        )
    diffs = []
    for i, d in enumerate(diffs_json):
        dpath = path + "/differentials/%d" % i
        if ranks[i] == 0 or ranks[i + 1] == 0:
            if d not in ([], None):
                raise ValidationError(
                    "differential %d must be [] when an adjacent rank is 0" % (i + 1),
                    dpath,
                )
            diffs.append(SeriesMatrix.zeros(group, order, ranks[i], ranks[i + 1]))
            continue
        m = read_matrix(group, order, d, dpath)
        if (m.nrows, m.ncols) != (ranks[i], ranks[i + 1]):
            raise ValidationError(
                "differential %d must be %d x %d" % (i + 1, ranks[i], ranks[i + 1]),
                dpath,
            )
        diffs.append(m)
    try:
        return BasedComplex(group, order, ranks, diffs)
    except Exception as exc:
        raise ValidationError(str(exc), path) from None


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------


def write_algebra(a: AlgebraElement):
    return {a.group.h_name(h): str(q) for h, q in sorted(a.coeffs.items())}


def write_series(s: TruncatedSeries):
    if not s.coeffs:
        return {"low": 0, "coeffs": []}
    low = min(s.coeffs)
    high = max(s.coeffs)
    return {
        "low": low,
        "coeffs": [write_algebra(s.coefficient(e)) for e in range(low, high + 1)],
    }


def write_matrix(m: SeriesMatrix):
    return [[write_series(s) for s in row] for row in m.rows]


def write_class_series(cs: ClassSeries):
    out = []
    for k in sorted(cs.coeffs):
        row = cs.coeffs[k]
        out.append(
            {
                "degree": k,
                "classes": {
                    c.name: str(row[c])
                    for c in sorted(row, key=lambda c: c.sort_key())
                },
            }
        )
    return out


def write_zeta(z):
    return {"coeffs": [str(c) for c in z.coeffs]}


# ---------------------------------------------------------------------------
# job parsing
# ---------------------------------------------------------------------------


def parse_job(text, truncation_override=None) -> JobSpec:
    """Parse and validate a job file; raises ParseError/ValidationError."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("invalid JSON: %s" % exc) from None
    if not isinstance(obj, dict):
        raise ValidationError("job must be a JSON object", "")
    group = read_group(_need(obj, "group", ""))
    if truncation_override is not None:
        order = truncation_override
    else:
        order = _int(_need(obj, "truncation", ""), "/truncation")
    if order < 0:
        raise ValidationError("truncation must be >= 0", "/truncation")
    command = _need(obj, "command", "")
    if command not in COMMANDS:
        raise ValidationError(
            "unknown command %r (expected one of %s)" % (command, ", ".join(COMMANDS)),
            "/command",
        )
    operands_json = obj.get("operands", {})
    if not isinstance(operands_json, dict):
        raise ValidationError("operands must be an object", "/operands")
    operands = _parse_operands(group, order, command, operands_json)
    return JobSpec(group, order, command, operands)


def _parse_operands(group, order, command, obj):
    p = "/operands"
    if command in ("log", "exp", "project", "factorize"):
        return {"series": read_series(group, order, _need(obj, "series", p), p + "/series")}
    if command == "bchd":
        return {
            "x": read_series(group, order, _need(obj, "x", p), p + "/x"),
            "y": read_series(group, order, _need(obj, "y", p), p + "/y"),
        }
    if command in ("trace-log", "gauss", "frakl"):
        return {"matrix": read_matrix(group, order, _need(obj, "matrix", p), p + "/matrix")}
    if command == "torsion":
        return {"complex": read_complex(group, order, _need(obj, "complex", p), p + "/complex")}
    if command in ("eta-direct", "eta-traces"):
        return {"models": read_models(group, _need(obj, "models", p), p + "/models")}
    if command == "zeta-det":
        blocks_json = _need(obj, "homology", p)
        if not isinstance(blocks_json, list):
            raise ValidationError("homology must be an array", p + "/homology")
        blocks = []
        for i, b in enumerate(blocks_json):
            bpath = p + "/homology/%d" % i
            deg = _int(_need(b, "degree", bpath), bpath + "/degree")
            rows = _need(b, "matrix", bpath)
            if not isinstance(rows, list) or not all(
                isinstance(r, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in r)
                for r in rows
            ):
                raise ValidationError("matrix must be integer rows", bpath + "/matrix")
            blocks.append((deg, rows))
        return {"homology": blocks}
    if command == "zeta-counts":
        counts = _need(obj, "counts", p)
        if not isinstance(counts, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in counts
        ):
            raise ValidationError("counts must be a list of integers", p + "/counts")
        return {"counts": counts}
    if command == "abelian-zeta":
        return {"eta": read_class_series(group, order, _need(obj, "eta", p), p + "/eta")}
    if command == "check-main":
        return {
            "models": read_models(group, _need(obj, "models", p), p + "/models"),
            "complex": read_complex(group, order, _need(obj, "complex", p), p + "/complex"),
        }
    raise AssertionError("unhandled command %r" % command)
