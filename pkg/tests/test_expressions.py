import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.errors import ChannelExprError, FileFormatError
from app.services import channel_service, expression_service
from app.services.expression_service import (
    ComposeExpr,
    EraseExpr,
    IdExpr,
    KrausExpr,
    MixExpr,
    TwoPauliExpr,
    format_channel,
    parse_channel,
)
from app.utils import sampling

unit_floats = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


def _expressions(d: int):
    leaves = [st.builds(IdExpr, dim=st.just(d)), st.builds(EraseExpr, dim=st.just(d))]
    if d == 2:
        leaves.append(st.builds(TwoPauliExpr, x=unit_floats))
    return st.recursive(
        st.one_of(leaves),
        lambda children: st.one_of(
            st.builds(MixExpr, c=unit_floats, first=children, second=children),
            st.builds(ComposeExpr, outer=children, inner=children),
        ),
        max_leaves=8,
    )


well_typed = st.integers(min_value=1, max_value=4).flatmap(_expressions)


@settings(max_examples=60, deadline=None)
@given(well_typed)
def test_format_then_parse_is_identity(expr):
    text = format_channel(expr)
    parsed = parse_channel(text)
    assert parsed == expr
    assert format_channel(parsed) == text


@pytest.mark.parametrize(
    "text,canonical,dims",
    [
        ("id(2)", "id(2)", (2, 2)),
        ("  erase( 3 )  ", "erase(3)", (3, 3)),
        ("twopauli(.5)", "twopauli(0.5)", (2, 2)),
        ("twopauli(1)", "twopauli(1.0)", (2, 2)),
        ("mix(0.3,erase(2),id(2))", "mix(0.3, erase(2), id(2))", (2, 2)),
        ("compose(twopauli(0.25), mix(0.5, id(2), erase(2)))", "compose(twopauli(0.25), mix(0.5, id(2), erase(2)))", (2, 2)),
        ("mix(0.1,\n  compose(id(3), erase(3)),\n  id(3))", "mix(0.1, compose(id(3), erase(3)), id(3))", (3, 3)),
    ],
)
def test_canonical_form(text, canonical, dims):
    expr = parse_channel(text)
    assert format_channel(expr) == canonical
    assert expr.dims == dims


def test_compose_applies_inner_first():
    expr = parse_channel("compose(erase(2), twopauli(0.3))")
    assert isinstance(expr, ComposeExpr)
    assert expr.outer == EraseExpr(dim=2)
    assert expr.inner == TwoPauliExpr(x=0.3)


@pytest.mark.parametrize(
    "text,kind,line,column,expected",
    [
        ("", "syntax", 1, 1, None),
        ("id(2", "syntax", 1, 5, (")",)),
        ("twopauli(1.5)", "range", 1, 1, None),
        ("id(0)", "range", 1, 1, None),
        ("mix(-0.2, id(2), id(2))", "range", 1, 1, None),
        ("compose(id(2), id(3))", "type", 1, 1, None),
        ("mix(0.5, id(2), erase(3))", "type", 1, 1, None),
        ("mix(0.3, erase(2) id(2))", "syntax", 1, 19, (",",)),
        ("id(2)$", "lexical", 1, 6, None),
        ("id(2) id(2)", "syntax", 1, 7, None),
        ("twopauli(abc)", "syntax", 1, 10, ("FLOAT",)),
        ("erase(2.5)", "syntax", 1, 8, (")",)),
        ("id(2)\n)", "syntax", 2, 1, None),
        ("identity(2)", "syntax", 1, 1, None),
    ],
)
def test_malformed_expressions(text, kind, line, column, expected):
    with pytest.raises(ChannelExprError) as info:
        parse_channel(text)
    error = info.value
    assert (error.kind, error.line, error.column) == (kind, line, column)
    if expected is not None:
        assert error.expected == expected
    assert f"line {line}, column {column}" in str(error)


def test_unknown_constructor_lists_alternatives():
    with pytest.raises(ChannelExprError) as info:
        parse_channel("depolarize(0.5)")
    assert "id(" in info.value.expected
    assert "kraus(" in info.value.expected


class TestKrausExpressions:
    @pytest.fixture
    def flip_file(self, tmp_path):
        path = tmp_path / "flip.json"
        path.write_text(json.dumps({"dimIn": 2, "dimOut": 2, "ops": [[[0, 1], [1, 0]]]}))
        return str(path)

    def test_dimensions_are_read_at_parse_time(self, flip_file):
        expr = parse_channel(f"kraus({flip_file})")
        assert expr == KrausExpr(path=flip_file, dim_in=2, dim_out=2)
        assert format_channel(expr) == f"kraus({flip_file})"

    def test_quoted_path_with_spaces(self, tmp_path):
        path = tmp_path / "my channel.json"
        path.write_text(json.dumps({"dimIn": 1, "dimOut": 2, "ops": [[[1], [0]]]}))
        expr = parse_channel(f'kraus("{path}")')
        assert expr.dims == (1, 2)
        assert parse_channel(format_channel(expr)) == expr

    def test_type_errors_see_file_dimensions(self, flip_file):
        with pytest.raises(ChannelExprError) as info:
            parse_channel(f"compose(kraus({flip_file}), id(3))")
        assert info.value.kind == "type"

    def test_evaluates_operators(self, flip_file, pure0):
        s = expression_service.channel_from_text(f"compose(id(2), kraus({flip_file}))")
        out = channel_service.apply(s, pure0)
        assert np.allclose(out.mat, np.diag([0.0, 1.0]))

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            parse_channel(f"kraus({tmp_path / 'absent.json'})")

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"dimIn": 0, "dimOut": 2, "ops": []}))
        with pytest.raises(FileFormatError):
            parse_channel(f"kraus({path})")


def test_evaluation_matches_channel_algebra(mixed2):
    s = expression_service.channel_from_text("mix(0.5, erase(2), id(2))")
    assert np.allclose(channel_service.apply(s, mixed2).mat, np.diag([0.75, 0.25]))


def test_evaluated_two_pauli_composition(rng):
    s = expression_service.channel_from_text("compose(twopauli(0.4), twopauli(0.7))")
    direct = channel_service.compose(channel_service.two_pauli(0.4), channel_service.two_pauli(0.7))
    m = sampling.complex_normal(rng, (2, 2))
    assert np.allclose(channel_service.apply_operator(s, m), channel_service.apply_operator(direct, m))
