#!/usr/bin/env python3
"""
Schema - Structured-Text Records for Forms, Structures, Jets and Presets

Every payload read or written by the command line is JSON. Scalars are
encoded as strings for exact rationals ("3/4", "-2") and as JSON numbers
for binary64 values, so the backend survives a round trip. Forms are
{"dim", "degree", "terms": {"1,3,5": value}}.

Record kinds:
    form, metric, su3, spin7, jet, parametrized, lattice, gysin

Usage:
    from schema import load_record, jet_from_record
    jet = jet_from_record(load_record("presets/jet_lemma37.json"))
"""

import json
from fractions import Fraction
from pathlib import Path

from exterior_core import Form, GeometryError, Metric, Orientation, to_scalar
from spin7_kit import JetPoint, Spin7Data, make_data, parametrized_jet
from su3_kit import make_su3, standard_su3
from topology_tools import GysinInput, IntersectionLattice, KahlerVector, weighted_kahler


PRESETS_DIR = Path(__file__).parent.parent / "presets"
JET_FIELDS = ("d_omega", "d_re", "d_im", "d_eta", "d_theta", "dp", "dq", "dr")


class MalformedInput(GeometryError):
    pass


# ============================================================================
# SCALARS AND FILES
# ============================================================================

def encode_scalar(x):
    x = to_scalar(x)
    return str(x) if isinstance(x, Fraction) else float(x)


def decode_scalar(value):
    if isinstance(value, bool):
        raise MalformedInput(f"boolean where a scalar was expected: {value!r}")
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInput(f"not a rational literal: {value!r}") from exc
    if isinstance(value, (int, float)):
        return to_scalar(value)
    raise MalformedInput(f"not a scalar: {value!r}")


def load_record(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path} is not valid JSON: {exc}") from exc


def dumps(record):
    """Deterministic text of a record (sorted keys, fixed indentation)."""
    return json.dumps(record, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def dump_record(record, path):
    Path(path).write_text(dumps(record), encoding="utf-8")


def preset_path(name):
    path = PRESETS_DIR / f"{name}.json"
    if not path.exists():
        raise MalformedInput(f"unknown preset {name!r}")
    return path


def _field(record, key, kind=None):
    if not isinstance(record, dict):
        raise MalformedInput(f"expected an object, got {type(record).__name__}")
    if kind is not None and record.get("kind", kind) != kind:
        raise MalformedInput(f"expected a {kind!r} record, got {record.get('kind')!r}")
    try:
        return record[key]
    except KeyError as exc:
        raise MalformedInput(f"missing field {key!r}") from exc


# ============================================================================
# FORMS AND STRUCTURES
# ============================================================================

def form_to_record(form):
    return {
        "kind": "form", "dim": form.dim, "degree": form.degree,
        "terms": {",".join(map(str, key)): encode_scalar(v) for key, v in sorted(form.terms.items())},
    }


def form_from_record(record):
    dim, degree, terms = (_field(record, k, "form") for k in ("dim", "degree", "terms"))
    if not isinstance(terms, dict):
        raise MalformedInput("form terms must be an object")
    try:
        parsed = {tuple(int(i) for i in key.split(",")) if key else (): decode_scalar(v) for key, v in terms.items()}
    except ValueError as exc:
        raise MalformedInput(f"bad form index: {exc}") from exc
    return Form(int(dim), int(degree), parsed)


def metric_to_record(g):
    return {"kind": "metric", "matrix": [[encode_scalar(x) for x in row] for row in g.matrix]}


def metric_from_record(record):
    matrix = _field(record, "matrix", "metric")
    return Metric(tuple(tuple(decode_scalar(x) for x in row) for row in matrix))


def su3_to_record(s):
    return {"kind": "su3", "omega": form_to_record(s.omega), "re_omega": form_to_record(s.re_omega),
            "orientation": s.orientation.sign}


def su3_from_record(record):
    return make_su3(form_from_record(_field(record, "omega", "su3")),
                    form_from_record(_field(record, "re_omega", "su3")),
                    Orientation(int(record.get("orientation", 1))))


def data_to_record(d):
    return {
        "kind": "spin7", "su3": su3_to_record(d.su3),
        "eta": form_to_record(d.eta), "theta": form_to_record(d.theta),
        "p": encode_scalar(d.p), "q": encode_scalar(d.q), "r": encode_scalar(d.r),
        "vertical": [[encode_scalar(x) for x in v] for v in d.vertical],
    }


def data_from_record(record):
    su3 = su3_from_record(_field(record, "su3", "spin7"))
    vertical = record.get("vertical")
    return Spin7Data(
        su3=su3, eta=form_from_record(_field(record, "eta")), theta=form_from_record(_field(record, "theta")),
        p=decode_scalar(_field(record, "p")), q=decode_scalar(_field(record, "q")),
        r=decode_scalar(record.get("r", "0")),
        vertical=tuple(tuple(decode_scalar(x) for x in v) for v in vertical) if vertical else Spin7Data.vertical,
    )


def jet_to_record(j):
    return {"kind": "jet", "data": data_to_record(j.data),
            "jets": {name: form_to_record(getattr(j, name)) for name in JET_FIELDS}}


def jet_from_record(record):
    """A full jet record, or a parametrized record rebuilt through parametrized_jet."""
    kind = record.get("kind") if isinstance(record, dict) else None
    if kind == "parametrized":
        data = _standard_or_data(_field(record, "data"))
        parts = [form_from_record(_field(record, k)) for k in ("dtheta8", "deta8", "dp", "dq", "dr")]
        return parametrized_jet(data, *parts)
    data = data_from_record(_field(record, "data", "jet"))
    jets = _field(record, "jets")
    return JetPoint(data, *(form_from_record(_field(jets, name)) for name in JET_FIELDS))


def _standard_or_data(record):
    if record == "standard":
        return make_data(standard_su3(), 1, 1, 0)
    if isinstance(record, dict) and record.get("kind") == "pqr":
        return make_data(standard_su3(), *(decode_scalar(_field(record, k)) for k in ("p", "q", "r")))
    return data_from_record(record)


# ============================================================================
# TOPOLOGY INPUTS
# ============================================================================

def _params(record, overrides):
    params = dict(record.get("defaults", {}))
    params.update({k: v for k, v in overrides.items() if v is not None})
    return params


def _fill(value, params):
    """Integers pass through; strings are templates such as "{p}" or "1/{k}"."""
    if not isinstance(value, str):
        return value
    try:
        return value.format(**params)
    except (KeyError, IndexError) as exc:
        raise MalformedInput(f"template {value!r} names an unset parameter") from exc


def _fill_int(value, params):
    text = _fill(value, params)
    try:
        return int(text)
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"not an integer: {text!r}") from exc


def lattice_from_record(record, **overrides):
    """
    (IntersectionLattice, KahlerVector or None, extras) from a lattice record.

    extras carries the Seifert filters, dim H²(Σ), dim H⁵(B), the resolved
    parameters and the expected table entries.
    """
    params = _params(record, overrides)
    Q = _field(record, "Q", "lattice")
    L = IntersectionLattice(tuple(tuple(decode_scalar(_fill(x, params)) for x in row) for row in Q),
                            tuple(record.get("labels", ())))
    kahler = record.get("kahler")
    extras = {
        "filters": tuple((_fill_int(c, params), _fill_int(w, params)) for c, w in record.get("filters", ())),
        "link_b2": _fill_int(record.get("link_b2", 0), params),
        "h5": _fill_int(record.get("h5", 0), params),
        "params": params,
        "expect": record.get("expect", {}),
    }
    weighted = record.get("weighted_kahler")
    if weighted:
        k = weighted_kahler(*(_fill_int(weighted[key], params) for key in ("k", "e", "d1", "d2")))
    else:
        k = KahlerVector(tuple(_fill_int(c, params) for c in kahler)) if kahler else None
    return L, k, extras


def gysin_from_record(record, **overrides):
    """(base GysinInput, second-bundle ranks or None, parameters, expectations)."""
    params = _params(record, overrides)
    base = tuple(_fill_int(b, params) for b in _field(record, "base_betti", "gysin"))
    first = tuple(_fill_int(r, params) for r in record.get("first_ranks", ()))
    second = record.get("second_ranks")
    second = tuple(_fill_int(r, params) for r in second) if second is not None else None
    return GysinInput(base, first), second, params, record.get("expect", {})
