import numpy as np
import pytest
from expcorr.polynomial import MultiPoly, monomial_exponents
from hypothesis import given
from hypothesis import strategies as st

from tests.utils.strategies import st_poly

point = st.fixed_dictionaries({v: st.integers(-3, 3).map(float) for v in ("x", "y")})


@pytest.fixture
def xy():
    return MultiPoly.variable("x", ["x", "y"]), MultiPoly.variable("y", ["x", "y"])


@pytest.mark.parametrize("degree, count", [(0, 1), (1, 3), (2, 6), (3, 10), (4, 15)])
def test_monomial_count(degree, count):
    assert len(monomial_exponents(2, degree)) == count


def test_zero_coefficients_are_dropped():
    p = MultiPoly(["x"], {(1,): 0.0, (0,): 2.0})
    assert len(p) == 1
    assert MultiPoly(["x"], [((1,), 1.0), ((1,), -1.0)]).is_zero


def test_degrees(xy):
    x, y = xy
    p = x * x * y + 3 * y
    assert p.total_degree == 3
    assert p.degree("x") == 2
    assert p.degree("y") == 1
    assert p.degree("z") == 0
    assert MultiPoly(["x"]).degree("x") == -1


def test_str(xy):
    x, y = xy
    assert str(MultiPoly(["x"])) == "0"
    assert str(-x - 1) == "-x - 1"
    assert str(0.5 * x * y - 2 * y**2) == "0.5*x*y - 2*y^2"


@pytest.mark.parametrize(
    "c, expected",
    [(1 - 1e-15, "c*n"), (-1 + 1e-15, "-c*n"), (1 + 2e-9, "c*n"), (1.0001, "1.0001*c*n")],
)
def test_str_of_coefficients_that_print_as_one(c, expected):
    assert str(MultiPoly(["c", "n"], {(1, 1): c})) == expected
    assert str(MultiPoly(["c", "n"], {(1, 1): c, (0, 0): 2.0})) == f"{expected} + 2"


def test_equality_ignores_variable_order(xy):
    x, _ = xy
    assert x == MultiPoly.variable("x")
    assert x + 1 == MultiPoly(["y", "x"], {(0, 1): 1.0, (0, 0): 1.0})
    assert x != MultiPoly.variable("y")


def test_with_variables_refuses_to_drop_used(xy):
    x, y = xy
    with pytest.raises(ValueError):
        (x + y).with_variables(["x"])
    assert (x + 0 * y).drop_unused().variables == ("x",)


def test_coefficients_in(xy):
    x, y = xy
    coefficients = (x * x * y + 2 * x + y - 1).coefficients_in("x")
    assert [str(c) for c in coefficients] == ["y - 1", "2", "y"]
    assert all(c.variables == ("y",) for c in coefficients)


def test_normalized_sign_follows_first_largest():
    p = MultiPoly(["a", "b"], {(1, 0): -2.0, (0, 1): 2.0, (0, 0): 0.5})
    assert str(p.normalized()) == "a - b - 0.25"


def test_pruned():
    p = MultiPoly(["a"], {(2,): 1.0, (1,): 1e-13, (0,): -3.0})
    assert str(p.pruned(1e-12)) == "a^2 - 3"


def test_evaluate_arrays(xy):
    x, y = xy
    p = x * y + 1
    np.testing.assert_allclose(p({"x": np.array([1.0, 2.0]), "y": np.array([3.0, 4.0])}), [4, 9])


def test_evaluate_missing_variable(xy):
    x, y = xy
    with pytest.raises(KeyError):
        (x + y)({"x": 1.0})
    assert (x + 0 * y)({"x": 2.0}) == 2.0


def test_rename_and_dict(xy):
    x, y = xy
    p = (x - 2 * y).rename({"x": "u"})
    assert p.variables == ("u", "y")
    assert MultiPoly.from_dict(p.to_dict()) == p


@given(p=st_poly(), q=st_poly(), at=point)
def test_arithmetic_matches_evaluation(p, q, at):
    assert (p + q)(at) == p(at) + q(at)
    assert (p - q)(at) == p(at) - q(at)
    assert (p * q)(at) == pytest.approx(p(at) * q(at))


@given(p=st_poly(max_degree=3), k=st.integers(0, 3), at=point)
def test_power(p, k, at):
    assert (p**k)(at) == pytest.approx(p(at) ** k)


@given(p=st_poly(), q=st_poly(("u",)), at=point)
def test_substitute(p, q, at):
    substituted = p.substitute({"x": q})
    assert set(substituted.variables) <= {"y", "u"}
    assert substituted({"u": at["x"], "y": at["y"]}) == pytest.approx(
        p({"x": q({"u": at["x"]}), "y": at["y"]})
    )


@given(p=st_poly(integral=False))
def test_normalized_largest_is_one(p):
    if p.is_zero:
        assert p.normalized().is_zero
        return
    normalized = p.normalized()
    assert normalized.max_abs_coefficient == pytest.approx(1.0)
    assert any(c == pytest.approx(1.0) for _, c in normalized)
