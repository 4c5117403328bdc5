from fractions import Fraction

import pytest

from latticeva.exact import Scalar
from latticeva.grammar import ParseError, parse
from latticeva.verify import load_catalogue


def test_simple_word():
    e = parse("H[7] H[-1] vac")
    assert len(e.summands) == 1
    c, w = e.summands[0]
    assert c == Scalar.const(1)
    assert w.terms == (("H", 7), ("H", -1))
    assert w.base == ("vac",)


def test_bases():
    assert parse("E[-1] vac").summands[0][1].terms == (("E", -1),)
    assert parse("e[-3/4]").summands[0][1].base == ("e", Fraction(-3, 4))
    assert parse("w[1] vactw").summands[0][1].base == ("vactw",)


def test_coefficients():
    e = parse("-2p/(2p - 1) w[-1] vac + 3 * vac - h[-2] h[-1] vac")
    cs = [c for c, _ in e.summands]
    assert cs[0] == Scalar.parse("-2p/(2p-1)")
    assert cs[1] == 3 and cs[2] == -1


@pytest.mark.parametrize("src", ["w[1 vac", "Q[1] vac", "w[-1]", "w[x] vac", "E[] vac", "w[1] vac +"])
def test_errors_have_caret(src):
    with pytest.raises(ParseError) as info:
        parse(src)
    msg = str(info.value)
    assert "line 1, column" in msg and "^" in msg


def test_catalogue_round_trip():
    for rel in load_catalogue():
        e = parse(rel.expression)
        assert parse(e.render()) == e, rel.name
