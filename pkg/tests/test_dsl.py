import pytest

from mild.dsl import parse, parse_element, pretty
from mild.errors import DegreeError, ParseError, RingError

S2_SRC = """
ring Q
cdga S2 { gen v : 2  gen w : 3  d w = v^2 }
"""

FULL_SRC = """
# two-sphere with 3-torsion and a polynomial source
ring Z invert 2
cdga S2 { gen v : 2  gen w : 3  d w = 3*v^2 }
cdga P { gen x : 2 }
morphism f : P -> S2 { x -> v }
"""


def test_parse_s2_block():
    ws = parse(S2_SRC)
    A = ws.algebra("S2")
    assert [(g.name, g.degree) for g in A.gens] == [("v", 2), ("w", 3)]
    assert str(A.d(A.gen("w"))) == "v^2"


def test_parse_full_workspace():
    ws = parse(FULL_SRC)
    assert ws.ring.inverted_primes == (2,)
    f = ws.morphism("f")
    assert str(f.images[0]) == "v"


def test_non_chain_morphism_rejected():
    src = """
ring Q
cdga S2 { gen v : 2  gen w : 3  d w = v^2 }
cdga P { gen x : 2 }
morphism f : S2 -> P { v -> x  w -> 0 }
"""
    with pytest.raises(DegreeError):
        parse(src)


def test_degree_error():
    src = "ring Q\ncdga A { gen v : 2  gen w : 3  d w = v }"
    with pytest.raises(DegreeError):
        parse(src)


def test_ring_error_for_bad_coefficient():
    src = "ring Z invert 2\ncdga A { gen v : 2  gen w : 3  d w = 1/3*v^2 }"
    with pytest.raises(RingError):
        parse(src)


def test_parse_error_locations():
    with pytest.raises(ParseError) as exc:
        parse("ring Q\ncdga A { gen v 2 }")
    assert exc.value.line == 2
    with pytest.raises(ParseError):
        parse("cdga A { gen v : 2 }")  # ring must come first
    with pytest.raises(ParseError):
        parse("ring Q\ncdga A { gen v : 2 }\nmorphism f : A -> B { v -> v }")


def test_d_squared_rejected():
    src = """
ring Q
cdga A { gen v : 2  gen w : 3  gen s : 4
  d w = v^2
  d s = v*w }
"""
    with pytest.raises(DegreeError):
        parse(src)


def test_tensor_flavor_words():
    ws = parse("ring Q\ndga T { gen x : 2  gen y : 3  d y = x^2 }")
    T = ws.algebra("T")
    x, y = T.gen("x"), T.gen("y")
    assert x * y != y * x  # words do not commute


def test_round_trip():
    ws = parse(FULL_SRC)
    text = pretty(ws)
    ws2 = parse(text)
    assert pretty(ws2) == text
    assert ws2.ring == ws.ring
    assert [(g.name, g.degree) for g in ws2.algebra("S2").gens] == \
        [(g.name, g.degree) for g in ws.algebra("S2").gens]


def test_parse_element():
    ws = parse(S2_SRC)
    A = ws.algebra("S2")
    A.set_cap(10)
    el = parse_element("2*v^2 - v*v", A, ws.ring)
    assert str(el) == "v^2"
    zero = parse_element("0", A, ws.ring)
    assert zero.is_zero()
    with pytest.raises(DegreeError):
        parse_element("v + w", A, ws.ring)
