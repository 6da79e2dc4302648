"""Tests for schema: JSON records for forms, structures, jets and presets."""

import json
from fractions import Fraction

import pytest

from exterior_core import Form, Metric, random_form
from schema import (
    JET_FIELDS, MalformedInput, PRESETS_DIR, data_from_record, data_to_record, decode_scalar,
    dumps, encode_scalar, form_from_record, form_to_record, gysin_from_record, jet_from_record,
    jet_to_record, lattice_from_record, load_record, metric_from_record, metric_to_record,
    preset_path, su3_from_record, su3_to_record,
)
from spin7_kit import random_data, random_jet, torsion_residuals
from su3_kit import pulled_back_standard, random_gl_plus


# ============================================================================
# SCALARS AND FORMS
# ============================================================================

def test_scalar_encoding_keeps_the_backend():
    assert encode_scalar(Fraction(3, 4)) == "3/4"
    assert encode_scalar(2) == "2"
    assert encode_scalar(0.5) == 0.5
    assert decode_scalar("3/4") == Fraction(3, 4)
    assert isinstance(decode_scalar(0.25), float)
    assert decode_scalar(3) == Fraction(3)


@pytest.mark.parametrize("value", [True, "x/y", "1/0", None, [1]], ids=["bool", "text", "zero", "null", "list"])
def test_bad_scalars(value):
    with pytest.raises(MalformedInput):
        decode_scalar(value)


def test_form_record_layout():
    record = form_to_record(Form.basis(6, 1, 3, 5) * Fraction(1, 2) - Form.basis(6, 2, 4, 6))
    assert record == {"kind": "form", "dim": 6, "degree": 3, "terms": {"1,3,5": "1/2", "2,4,6": "-1"}}


def test_form_records_round_trip(rng):
    for k in range(4):
        a = random_form(rng, 6, k)
        assert form_from_record(form_to_record(a)) == a
    b = random_form(rng, 8, 2).to_float() * 0.1
    assert form_from_record(json.loads(dumps(form_to_record(b)))) == b


def test_zero_form_uses_empty_key():
    c = Form.constant(6, Fraction(2))
    assert form_from_record(form_to_record(c)) == c


@pytest.mark.parametrize("record", [
    {"kind": "form", "dim": 6, "degree": 2},
    {"kind": "metric", "dim": 6, "degree": 2, "terms": {}},
    {"kind": "form", "dim": 6, "degree": 2, "terms": {"1,a": "1"}},
    {"kind": "form", "dim": 6, "degree": 2, "terms": []},
    [1, 2],
], ids=["missing", "kind", "index", "terms-list", "not-object"])
def test_malformed_form_records(record):
    with pytest.raises(MalformedInput):
        form_from_record(record)


# ============================================================================
# STRUCTURES AND JETS
# ============================================================================

def test_metric_round_trip():
    g = Metric(((2, 1), (1, 3)))
    assert metric_from_record(metric_to_record(g)) == g


def test_su3_round_trip(rng):
    s = pulled_back_standard(random_gl_plus(rng))
    back = su3_from_record(su3_to_record(s))
    assert back.omega == s.omega and back.im_omega == s.im_omega
    assert back.metric == s.metric


def test_spin7_data_round_trip(rng):
    d = random_data(rng)
    back = data_from_record(json.loads(dumps(data_to_record(d))))
    assert (back.p, back.q, back.r) == (d.p, d.q, d.r)
    assert back.eta == d.eta and back.theta == d.theta
    assert back.vertical == d.vertical


def test_jet_round_trip(rng):
    j = random_jet(rng)
    back = jet_from_record(json.loads(dumps(jet_to_record(j))))
    for name in JET_FIELDS:
        assert getattr(back, name) == getattr(j, name), name
    assert torsion_residuals(back).norms() == torsion_residuals(j).norms()


def test_dumps_is_deterministic():
    text = dumps({"b": 1, "a": [Fraction(1, 2).numerator, "é"]})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    assert "é" in text


# ============================================================================
# FILES AND PRESETS
# ============================================================================

def test_load_record_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(MalformedInput):
        load_record(bad)
    with pytest.raises(MalformedInput):
        load_record(tmp_path / "missing.json")


def test_every_preset_is_valid_json():
    names = sorted(p.stem for p in PRESETS_DIR.glob("*.json"))
    assert names == ["cAp", "dP6", "dP7", "jet_lemma37", "wp112k"]
    for name in names:
        assert "kind" in load_record(preset_path(name))


def test_unknown_preset():
    with pytest.raises(MalformedInput):
        preset_path("nope")


def test_parametrized_jet_preset_is_torsion_free():
    j = jet_from_record(load_record(preset_path("jet_lemma37")))
    assert (j.data.p, j.data.q, j.data.r) == (1, 2, Fraction(1, 2))
    assert torsion_residuals(j).nonzero() == []


def test_del_pezzo_preset():
    L, k, extras = lattice_from_record(load_record(preset_path("dP6")))
    assert L.labels == ("E", "D1", "D2", "D3")
    assert k.coords == (3, 1, 1, 1)
    assert extras["link_b2"] == 3 and extras["h5"] == 0
    assert extras["expect"]["kernel_rank"] == 3


def test_weighted_preset_templates():
    L, k, extras = lattice_from_record(load_record(preset_path("wp112k")), k=5)
    assert L.Q[0][0] == Fraction(1, 5)
    assert k.coords == (5, 1, 1)
    assert extras["filters"] == ((0, 5),)
    assert extras["params"]["k"] == 5


def test_cap_preset_templates():
    base, second, params, expect = gysin_from_record(load_record(preset_path("cAp")), p=5)
    assert base.betti == (1, 0, 5, 0, 0, 0, 0)
    assert second == (1,)
    assert params["p"] == 5
    assert expect["betti"]["3"] == [2, -1]


def test_unset_template_parameter():
    with pytest.raises(MalformedInput):
        gysin_from_record({"kind": "gysin", "base_betti": [1, 0, "{p}"]})
    with pytest.raises(MalformedInput):
        gysin_from_record({"kind": "gysin", "base_betti": [1, 0, "two"]})
