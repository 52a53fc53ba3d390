import json

import numpy as np
import pytest
from hypothesis import given

from opmetric.chk import ClosedOperator
from opmetric.dynamics import HBiholomorphicMap
from opmetric.errors import DimensionMismatch, NonFiniteEntry, NormTooCloseToOne, ParseError
from opmetric.fileio import (
    emit,
    generator_document,
    operator_document,
    parse_generator,
    parse_generator_file,
    parse_operator,
    parse_operator_file,
    write_generator_file,
    write_operator_file,
)
from opmetric.oracles import InstanceFactory

from .strategies import operators


def _doc(**kw):
    d = {"rows": 1, "cols": 1, "dimH": 1, "dimK": 1, "data": [[1, 0]]}
    d.update(kw)
    return json.dumps(d, indent=1)


def test_parse_minimal():
    t = parse_operator(_doc())
    assert t.mat.shape == (1, 1) and t.mat[0, 0] == 1 + 0j


def test_parse_errors():
    with pytest.raises(DimensionMismatch):
        parse_operator(_doc(data=[[1, 0], [2, 0]]))
    with pytest.raises(DimensionMismatch):
        parse_operator(_doc(dimH=2))
    with pytest.raises(NonFiniteEntry):
        parse_operator('{"rows": 1, "cols": 1, "dimH": 1, "dimK": 1, "data": [[NaN, 0]]}')
    with pytest.raises(ParseError, match="missing field 'dimK'"):
        parse_operator('{"rows": 1, "cols": 1, "dimH": 1, "data": [[1, 0]]}')
    with pytest.raises(ParseError):
        parse_operator(_doc(data=[["1", 0]]))
    with pytest.raises(ParseError):
        parse_operator(_doc(rows=0))
    with pytest.raises(ParseError):
        parse_operator("[1, 2]")


def test_parse_error_has_line_context():
    text = '{\n "rows": 1,\n "cols": 1,\n "dimH": 1,\n "dimK": 1,\n "data": [[1, 0]\n'
    with pytest.raises(ParseError, match=r"f\.json:\d+:\d+"):
        parse_operator(text, "f.json")
    with pytest.raises(DimensionMismatch, match=r"f\.json:6"):
        parse_operator(_doc(data=[]), "f.json")


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        parse_operator_file(tmp_path / "nope.json")


@given(operators())
def test_round_trip_exact(ops):
    (t,) = ops
    back = parse_operator(emit(operator_document(t)))
    assert np.array_equal(back.mat, t.mat)


def test_round_trip_file(tmp_path, factory):
    t = factory.operator(5, 3)
    write_operator_file(tmp_path / "t.json", t)
    assert np.array_equal(parse_operator_file(tmp_path / "t.json").mat, t.mat)
    g = HBiholomorphicMap.from_params(*factory.automorphism_params(3, 2))
    write_generator_file(tmp_path / "g.json", g)
    back = parse_generator_file(tmp_path / "g.json")
    assert np.array_equal(back.auto.A.mat, g.auto.A.mat)
    assert np.array_equal(back.auto.U, g.auto.U) and np.array_equal(back.auto.V, g.auto.V)


def test_generator_errors(factory):
    g = HBiholomorphicMap.from_params(*factory.automorphism_params(2, 1))
    doc = generator_document(g)
    bad = dict(doc, U=dict(doc["U"], rows=3))
    with pytest.raises(DimensionMismatch):
        parse_generator(json.dumps(bad))
    with pytest.raises(ParseError):
        parse_generator(json.dumps({k: v for k, v in doc.items() if k != "V"}))
    outside = dict(doc, A={"rows": 2, "cols": 1, "data": [[1, 0], [0, 0]]})
    with pytest.raises(NormTooCloseToOne):
        parse_generator(json.dumps(outside))


def test_emit_format():
    text = emit({"value": 0.1, "flag": True, "n": 3, "xs": [1.5, 2], "none": float("nan")})
    doc = json.loads(text)
    assert doc == {"value": 0.1, "flag": True, "n": 3, "xs": [1.5, 2], "none": None}
    assert '"value": 0.10000000000000001' in text


def test_operator_document_fields():
    doc = operator_document(ClosedOperator([[1 + 2j, 3.0]]))
    assert doc == {"rows": 1, "cols": 2, "dimH": 2, "dimK": 1, "data": [[1.0, 2.0], [3.0, 0.0]]}


def test_random_corpus_round_trip():
    f = InstanceFactory(99)
    for _ in range(20):
        t = f.operator(*f.dims())
        assert np.array_equal(parse_operator(emit(operator_document(t))).mat, t.mat)
