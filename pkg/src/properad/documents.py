"""JSON document formats: dg vector spaces, structure constants, surfaces
and gluing instructions.  Coefficients travel as exact "p/q" strings."""

import json
from fractions import Fraction

from .cycles import Cycle
from .frobenius import OpenSurface
from .graded import GradedBasis, DGVectorSpace
from .master import closed_gen, open_gen, oc_gen


class DocumentError(ValueError):
    """Malformed input document."""


def parse_rational(text):
    try:
        if isinstance(text, int):
            return Fraction(text)
        if isinstance(text, str):
            return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise DocumentError("bad rational %r: %s" % (text, exc))
    raise DocumentError("rational coefficients must be strings like '3/4'")


def format_rational(value):
    return str(Fraction(value))


def _check_keys(obj, allowed, what):
    extra = set(obj) - set(allowed)
    if extra:
        raise DocumentError("unknown keys in %s: %s" % (what, sorted(extra)))


def load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DocumentError("cannot read %s: %s" % (path, exc))


def load_dgvs(doc):
    """{"basis": [{"name", "degree", "color"?}...],
       "differential": [{"from", "to", "coeff"}...]}

    "color" (open|closed) is only meaningful for the open-closed flavor and
    defaults to open.  Returns (DGVectorSpace, colors)."""
    _check_keys(doc, ("basis", "differential"), "dgvs document")
    if "basis" not in doc:
        raise DocumentError("dgvs document lacks a basis")
    elements = []
    colors = {}
    for entry in doc["basis"]:
        _check_keys(entry, ("name", "degree", "color"), "basis element")
        name, degree = entry.get("name"), entry.get("degree")
        if not isinstance(name, str) or not isinstance(degree, int):
            raise DocumentError("basis elements need a string name and integer degree")
        color = entry.get("color", "open")
        if color not in ("open", "closed"):
            raise DocumentError("bad color %r" % (color,))
        elements.append((name, degree))
        colors[name] = color
    diff = {}
    for entry in doc.get("differential", []):
        _check_keys(entry, ("from", "to", "coeff"), "differential entry")
        src, tgt = entry.get("from"), entry.get("to")
        coeff = parse_rational(entry.get("coeff", "1"))
        diff[(tgt, src)] = diff.get((tgt, src), Fraction(0)) + coeff
    try:
        space = DGVectorSpace(GradedBasis(elements), diff)
    except ValueError as exc:
        raise DocumentError(str(exc))
    return space, colors


def load_surface(doc):
    _check_keys(doc, ("genus", "out_cycles", "in_cycles"), "surface document")
    try:
        return OpenSurface(doc.get("genus", 0),
                           [Cycle(c) for c in doc.get("out_cycles", [])],
                           [Cycle(c) for c in doc.get("in_cycles", [])])
    except ValueError as exc:
        raise DocumentError(str(exc))


def dump_surface(surface):
    return {"genus": surface.genus,
            "out_cycles": [list(c) for c in surface.out_cycles],
            "in_cycles": [list(c) for c in surface.in_cycles]}


def load_gluing(doc):
    """{"pairs": [[input_label, output_label] ...]}"""
    _check_keys(doc, ("pairs",), "gluing document")
    eta = {}
    for pair in doc.get("pairs", []):
        if not isinstance(pair, list) or len(pair) != 2:
            raise DocumentError("gluing pairs must be [input, output] lists")
        b, a = pair
        if b in eta:
            raise DocumentError("input %r glued twice" % (b,))
        eta[b] = a
    if len(set(eta.values())) != len(eta):
        raise DocumentError("an output label is glued twice")
    return eta


def _word(entry, key, length=None):
    word = entry.get(key, [])
    if not isinstance(word, list) or not all(isinstance(x, str) for x in word):
        raise DocumentError("%s must be a list of basis names" % (key,))
    if length is not None and len(word) != length:
        raise DocumentError("%s has length %d, expected %d" % (key, len(word), length))
    return tuple(word)


def load_structure(doc):
    """Structure constants; returns (flavor, entries) with entries as
    (term, Fraction) pairs in the master module's term format."""
    _check_keys(doc, ("flavor", "entries"), "structure document")
    flavor = doc.get("flavor")
    if flavor not in ("closed", "open", "open-closed"):
        raise DocumentError("flavor must be closed, open or open-closed")
    entries = []
    for entry in doc.get("entries", []):
        coeff = parse_rational(entry.get("coeff", "1"))
        if flavor == "closed":
            _check_keys(entry, ("m", "n", "chi", "J", "I", "coeff"), "entry")
            m, n, chi = entry.get("m"), entry.get("n"), entry.get("chi")
            if not all(isinstance(v, int) for v in (m, n, chi)):
                raise DocumentError("closed entries need integer m, n, chi")
            term = (closed_gen(m, n, chi), _word(entry, "J", m), _word(entry, "I", n))
        elif flavor == "open":
            _check_keys(entry, ("g", "J_blocks", "I_blocks", "coeff"), "entry")
            jb = [_word({"w": blk}, "w") for blk in entry.get("J_blocks", [])]
            ib = [_word({"w": blk}, "w") for blk in entry.get("I_blocks", [])]
            gen = open_gen(entry.get("g", 0),
                           tuple(len(b) for b in jb), tuple(len(b) for b in ib))
            term = (gen, sum(jb, ()), sum(ib, ()))
        else:
            _check_keys(entry, ("g", "J_blocks", "I_blocks", "J_closed",
                                "I_closed", "coeff"), "entry")
            jb = [_word({"w": blk}, "w") for blk in entry.get("J_blocks", [])]
            ib = [_word({"w": blk}, "w") for blk in entry.get("I_blocks", [])]
            jc = _word(entry, "J_closed")
            ic = _word(entry, "I_closed")
            gen = oc_gen(entry.get("g", 0),
                         tuple(len(b) for b in jb), tuple(len(b) for b in ib),
                         len(jc), len(ic))
            term = (gen, sum(jb, ()) + jc, sum(ib, ()) + ic)
        entries.append((term, coeff))
    return flavor, entries


def report_to_json(report):
    """Machine-readable verdict report."""
    components = []
    for key, verdict in sorted(report["components"].items(), key=lambda kv: str(kv[0])):
        row = {"component": list(_flatten(key)), "status": verdict["status"]}
        if "residual" in verdict:
            row["residual"] = _residual_rows(verdict["residual"])
        components.append(row)
    return {"verdict": "PASS" if report["ok"] else "FAIL",
            "components": components}


def _flatten(key):
    for part in key:
        if isinstance(part, tuple):
            yield list(_flatten(part))
        else:
            yield part


def _residual_rows(residual):
    if isinstance(residual, Fraction):
        return format_rational(residual)
    rows = []
    for term, coeff in sorted(residual.items(), key=lambda kv: str(kv[0])):
        gen, J, I = term
        rows.append({"generator": list(_flatten(gen)), "J": list(J),
                     "I": list(I), "coeff": format_rational(coeff)})
    return rows
