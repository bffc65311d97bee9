import pytest
from hypothesis import given, strategies as st

from nuchi import words as W
from nuchi.errors import PresentationParseError
from nuchi.presentation import Presentation, parse_presentation, parse_word

letters = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=30)


def test_free_reduce_cancels_adjacent_inverses():
    assert W.free_reduce((1, 2, -2, -1, 3)) == (3,)
    assert W.free_reduce((1, -1)) == ()


def test_cyclic_reduce():
    assert W.cyclic_reduce((-1, 2, 1)) == (2,)
    assert W.cyclic_reduce((1, 2, -1, 3)) == (1, 2, -1, 3)


def test_commutator_convention():
    x, y = (1,), (2,)
    assert W.commutator(x, y) == (-1, -2, 1, 2)
    assert W.commutator(x, y, x) == W.commutator(W.commutator(x, y), x)
    assert W.conjugate(x, y) == (-2, 1, 2)


def test_power_and_inverse():
    assert W.power((1, 2), 2) == (1, 2, 1, 2)
    assert W.power((1, 2), -1) == (-2, -1)
    assert W.power((1,), 0) == ()


def test_columns_round_trip():
    w = (1, -2, 3, -1)
    assert W.from_columns(W.to_columns(w)) == w
    assert list(W.to_columns((1, -1))) == [0, 1]


def test_shift_renames_generators():
    assert W.shift((1, -2), 2) == (3, -4)


@given(letters, letters)
def test_inverse_is_two_sided(u, v):
    u = W.free_reduce(u)
    assert W.mul(u, W.inverse(u)) == ()
    assert W.inverse(W.mul(u, v)) == W.mul(W.inverse(v), W.inverse(u))


@given(letters)
def test_free_reduce_idempotent(u):
    r = W.free_reduce(u)
    assert W.free_reduce(r) == r
    assert all(r[i] != -r[i + 1] for i in range(len(r) - 1))


def test_parse_basic_grammar():
    p = parse_presentation("gens: a b\nrel: a^4\nrel: [a,b]\nrel: (a b)^2 # comment\nrel: b^-1 a b = a^3")
    assert p.generator_count == 2
    assert p.relators[0] == (1, 1, 1, 1)
    assert p.relators[1] == (-1, -2, 1, 2)
    assert p.relators[2] == (1, 2, 1, 2)
    assert p.relators[3] == (-2, 1, 2, -1, -1, -1)


def test_parse_word_forms():
    names = ["a", "b", "ab"]
    assert parse_word("ab", names) == (3,)  # longest name wins
    assert parse_word("a*b", names) == (1, 2)
    assert parse_word("1", names) == ()
    assert parse_word("[a,b,a]", names) == W.commutator((1,), (2,), (1,))
    assert parse_word("(a b^-1)^-2", names) == W.power((1, -2), -2)


def test_presentation_dedups_and_drops_trivial():
    p = Presentation(1, ((1, 1), (1, -1, 1, 1), ()))
    assert p.relators == ((1, 1),)
    assert p.names == ("x1",)


def test_format_round_trip():
    p = parse_presentation("gens: a b\nrel: a^4\nrel: b^-1 a b a")
    assert parse_presentation(p.format()).relators == p.relators


@pytest.mark.parametrize(
    "text, line",
    [
        ("gens: a\nrel: a^", 2),
        ("gens: a\nrel: c", 2),
        ("rel: a", 1),
        ("gens: a\nrel: [a,a", 2),
        ("gens: a\nfoo: a", 2),
        ("gens: a a", 1),
        ("gens: a\nnonsense", 2),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(PresentationParseError) as ei:
        parse_presentation(text)
    assert ei.value.line == line


def test_parse_error_column_points_into_value():
    with pytest.raises(PresentationParseError) as ei:
        parse_presentation("gens: a\nrel: a a ^x")
    assert ei.value.line == 2
    assert ei.value.column > 5
