from hypothesis import given, settings
from hypothesis import strategies as st

from pseudoshift.index_core import (
    UNDEFINED,
    FiniteTable,
    Grid,
    Integers,
    Naturals,
    ShiftMap,
    escape_time,
    escapes_range,
    has_periodic_point,
    is_run_away,
    iterate,
    run_away_with,
)
from pseudoshift.spaces import path_tree

SPACES = [Integers(), Naturals(), Grid()]


def test_integer_enumeration_order():
    assert Integers().window(5) == (0, 1, -1, 2, -2)
    assert Naturals().window(4) == (0, 1, 2, 3)


def test_grid_diagonal_order():
    assert Grid().window(5) == ((0, 0), (0, 1), (1, 0), (0, -1), (1, 1))


@given(st.sampled_from(SPACES), st.integers(1, 300))
def test_windows_are_distinct_and_nested(space, k):
    w = space.window(k)
    assert len(set(w)) == k
    assert space.window(k + 1)[:k] == w
    assert [space.position(i) for i in w] == list(range(k))


def test_encoding():
    assert Grid().encode((2, -3)) == "(2,-3)"
    assert Integers().encode(-4) == "-4"
    assert FiniteTable(["a", "b"]).encode("b") == "b"


def test_translation_iterates():
    phi = ShiftMap.translation(Integers(), 1)
    assert iterate(phi, 0, 3) == 3
    assert iterate(phi, 0, -3) == -3


def test_naturals_backward_leaves_the_set():
    phi = ShiftMap.translation(Naturals(), 1)
    assert iterate(phi, 2, -2) == 0
    assert iterate(phi, 2, -3) is UNDEFINED
    assert not UNDEFINED


def test_tree_parent_power():
    tree = path_tree(lambda v: 1)
    assert iterate(tree.shift_map(2), 0, 2) == 4
    assert iterate(tree.shift_map(2), 0, -1) == -2


MAPS = [
    ShiftMap.translation(Integers(), 1),
    ShiftMap.translation(Integers(), -3),
    ShiftMap.translation(Naturals(), 2),
    ShiftMap.grid_translation(-1),
]


@given(st.sampled_from(MAPS), st.integers(1, 50))
def test_inverse_and_injectivity_on_windows(phi, k):
    w = phi.space.window(k)
    images = [phi(i) for i in w]
    assert [phi.inverse(j) for j in images] == list(w)
    assert len(set(images)) == len(images)


@settings(max_examples=200)
@given(st.sampled_from(MAPS[:2] + MAPS[3:]), st.integers(0, 49), st.integers(-50, 50), st.integers(-50, 50))
def test_iterate_composition_on_bijective_maps(phi, pos, m, n):
    i = phi.space.window(pos + 1)[-1]
    assert iterate(phi, i, m + n) == iterate(phi, iterate(phi, i, m), n)


@given(st.integers(0, 49), st.integers(0, 50), st.integers(0, 50))
def test_iterate_composition_same_sign_on_naturals(i, m, n):
    phi = ShiftMap.translation(Naturals(), 1)
    assert iterate(phi, i, m + n) == iterate(phi, iterate(phi, i, m), n)
    assert iterate(phi, i, -m - n) == iterate(phi, iterate(phi, i, -m), -n)


def test_table_map_validation():
    space = FiniteTable(["a", "b"])
    swap = ShiftMap.from_table(space, {"a": "b", "b": "a"})
    assert swap("a") == "b" and swap.inverse("a") == "b"
    for bad in ({"a": "a", "b": "a"}, {"a": "b"}, {"a": "b", "b": "z"}):
        try:
            ShiftMap.from_table(space, bad)
        except ValueError:
            continue
        raise AssertionError(f"accepted {bad}")


def test_map_equality_by_key():
    assert ShiftMap.translation(Integers(), 1) == ShiftMap.translation(Integers(), 1)
    assert ShiftMap.translation(Integers(), 1) != ShiftMap.translation(Integers(), 2)
    phi = ShiftMap.translation(Integers(), 1)
    assert phi.power(2) == ShiftMap.translation(Integers(), 1).power(2)


# periodic points


def test_translation_has_no_periodic_points():
    rep = has_periodic_point(ShiftMap.translation(Integers(), 1), 50, 50)
    assert not rep.found and not rep.contradiction


def test_two_cycle_periods():
    space = FiniteTable(["a", "b"])
    rep = has_periodic_point(ShiftMap.from_table(space, {"a": "b", "b": "a"}), 2, 2)
    assert dict(rep.periodic) == {"a": 2, "b": 2}


def test_grid_translation_has_no_periodic_points():
    assert not has_periodic_point(ShiftMap.grid_translation(-1), 20, 20).found


def test_negative_result_is_labelled():
    space = Integers()
    rep = has_periodic_point(ShiftMap.translation(space, 1), 5, 5).to_dict(space)
    assert rep["note"] == "not found within search bounds"


# run-away


def test_run_away_translation():
    assert is_run_away(ShiftMap.translation(Integers(), 1), 1, list(range(1, 11)), 20).n0 == 10


def test_run_away_cycle_witness():
    space = FiniteTable(["a", "b"])
    rep = is_run_away(ShiftMap.from_table(space, {"a": "b", "b": "a"}), 1, 2, 10)
    assert not rep.passed
    assert (rep.witness["index"], rep.witness["n"]) == ("a", 2)


def test_run_away_step_two():
    assert is_run_away(ShiftMap.translation(Integers(), 2), 1, 4, 10).n0 == 2


def test_run_away_with_equal_sequences():
    a = ShiftMap.translation(Integers(), 2)
    b = ShiftMap.translation(Integers(), 1)
    rep = run_away_with(a, 1, b, 2, 6, 10)
    assert not rep.passed and rep.witness["n"] == 1


def test_run_away_with_offsets():
    phi = ShiftMap.translation(Integers(), 1)
    assert run_away_with(phi, 1, phi, 2, [0, 1, 2, 3, 4], 20).n0 == 5


@given(st.sampled_from(MAPS), st.integers(1, 3), st.integers(1, 8))
def test_run_away_with_itself_fails_at_one(phi, r, k):
    rep = run_away_with(phi, r, phi, r, k, 10)
    assert not rep.passed and rep.witness["n"] == 1


@given(st.integers(-3, 3).filter(bool), st.integers(1, 12), st.integers(1, 40), st.integers(1, 40))
def test_run_away_horizon_monotone(step, k, h, h2):
    phi = ShiftMap.translation(Integers(), step)
    big, small = max(h, h2), min(h, h2)
    rep = is_run_away(phi, 1, k, big)
    if rep.passed and rep.n0 <= small:
        assert is_run_away(phi, 1, k, small).n0 == rep.n0


# escape


def test_escape_times_on_naturals():
    phi = ShiftMap.translation(Naturals(), 1)
    assert escape_time(phi, 3, 10) == 4
    rep = escapes_range(phi, 10, 11)
    assert rep.all_escaped
    assert all(rep.escape_time(i) == i + 1 for i in range(10))


def test_surjective_maps_never_escape():
    assert escape_time(ShiftMap.translation(Integers(), 1), 0, 50) is None
    rep = escapes_range(ShiftMap.grid_translation(-1), 10, 50)
    assert all(n is None for _, n in rep.escape)
