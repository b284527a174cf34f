from fractions import Fraction

import pytest

from distmatch import fixtures
from distmatch.core import InputError, Instance, Mode, Variant
from distmatch.io import (
    format_instance,
    format_matching,
    format_rational,
    parse_edge_order,
    parse_instance,
    parse_matching,
    parse_rational,
    read_instance,
    write_instance,
)


@pytest.mark.parametrize("text,value", [("3", 3), ("-2", -2), ("3/4", Fraction(3, 4)), ("6/4", Fraction(3, 2))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["1.5", "1/0", "a", "1/-2", ""])
def test_parse_rational_rejects(text):
    with pytest.raises(InputError):
        parse_rational(text)


def test_format_rational():
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-3, 6)) == "-1/2"


def test_round_trip_all_fixtures():
    for name in fixtures.NAMES:
        inst = fixtures.build(name).instance
        text = format_instance(inst)
        again = parse_instance(text)
        assert again == inst
        assert format_instance(again) == text


def test_canonical_output_sorts_edges():
    text = "dm 1 3 2 1 max line\ne 3 1 2\ne 1 2 1/2\n\n# note\nr 2 1\n"
    inst = parse_instance(text)
    assert format_instance(inst) == "dm 1 3 2 1 max line\n# note\ne 1 2 1/2\ne 3 1 2\nr 2 1\n"


def test_cycle_perfect_header():
    inst = parse_instance("dm 1 2 1 1 perfect cycle\ne 1 1 1\ne 2 1 1\n")
    assert inst.mode is Mode.PERFECT and inst.variant is Variant.CYCLE


@pytest.mark.parametrize(
    "text",
    [
        "",
        "dm 2 1 1 1 max line\n",
        "dm 1 1 1 1 most line\n",
        "dm 1 1 1 1 max line\ne 1 1\n",
        "dm 1 1 1 1 max line\ne 2 1 1\n",
        "dm 1 1 1 1 max line\ne 1 1 1\ne 1 1 2\n",
        "dm 1 1 1 1 max line\nx 1 1 1\n",
        "dm 1 x 1 1 max line\n",
    ],
)
def test_parse_instance_rejects(text):
    with pytest.raises(InputError):
        parse_instance(text)


def test_matching_round_trip():
    fx = fixtures.build("fig1")
    text = format_matching(fx.instance, fx.refs["feasible"])
    assert text.splitlines()[0] == "m 1 2"
    assert parse_matching(text, fx.instance) == fx.refs["feasible"]


def test_matching_rejects_missing_and_duplicate_edges():
    inst = fixtures.build("fig1").instance
    with pytest.raises(InputError):
        parse_matching("m 1 1\n", inst)
    with pytest.raises(InputError):
        parse_matching("m 1 2\nm 1 2\n", inst)


def test_edge_order_keeps_line_order():
    inst = fixtures.build("fig3a").instance
    order = parse_edge_order("m 2 2\nm 1 2\n", inst)
    assert [inst.label(e) for e in order] == ["s2t2", "s1t2"]


def test_file_helpers(tmp_path):
    inst = Instance(2, 1, 1, ((1, 1, 1), (2, 1, "5/3")))
    path = tmp_path / "a.dm"
    write_instance(inst, path)
    assert read_instance(path) == inst
