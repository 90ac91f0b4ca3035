import logging

import numpy as np
import pytest
from expcorr.errors import (
    DegenerateGeometryError,
    FormatError,
    OutOfRangeError,
    ShapeError,
    UnderdeterminedError,
)
from expcorr.polynomial import MultiPoly, monomial_exponents
from expcorr.surface import (
    AffineFrame,
    FittedField,
    RectDomain,
    evaluate,
    fit_surface,
    to_implicit,
)
from expcorr.table import SampleRow, SampleTable
from hypothesis import given, settings
from hypothesis import strategies as st

from tests.utils.strategies import st_poly

X = MultiPoly.variable("x", ["x", "y"])
Y = MultiPoly.variable("y", ["x", "y"])
UNIT = RectDomain(0.0, 1.0, 0.0, 1.0)


def sample(points, f) -> SampleTable:
    rows = [
        SampleRow(str(i), float(x), float(y), {"w": f(x, y)}) for i, (x, y) in enumerate(points)
    ]
    return SampleTable(rows, variables=["w"])


def grid(count: int, offset: float = 0.0) -> list[tuple[float, float]]:
    return [(i + offset, j + offset) for i in range(count) for j in range(count)]


class TestRectDomain:
    @pytest.mark.parametrize("bounds", [(0, 0, 0, 1), (0, 1, 2, 1)])
    def test_zero_extent(self, bounds):
        with pytest.raises(DegenerateGeometryError):
            RectDomain(*bounds)

    def test_non_finite(self):
        with pytest.raises(FormatError):
            RectDomain(0.0, float("inf"), 0.0, 1.0)

    def test_intersection(self):
        assert UNIT.intersection(RectDomain(0.5, 2, -1, 0.5)) == RectDomain(0.5, 1, 0, 0.5)
        assert UNIT.intersection(RectDomain(1, 2, 0, 1)) is None
        assert RectDomain(0, 2, 0, 3).area == 6


@given(p=st_poly(max_degree=3))
def test_frame_maps_are_inverse(p):
    frame = AffineFrame.of(RectDomain(-2.0, 6.0, 10.0, 11.0))
    roundtrip = frame.local_to_global(frame.global_to_local(p))
    for point in [{"x": 0.0, "y": 10.0}, {"x": 5.0, "y": 10.5}, {"x": -2.0, "y": 11.0}]:
        assert roundtrip(point) == pytest.approx(p(point), rel=1e-9, abs=1e-9)


class TestFitSurface:
    def test_recovers_plane(self):
        points = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (3, 5)]
        field = fit_surface(sample(points, lambda x, y: 2 + 3 * x - y), "w", degree=1)
        for exps, expected in [((0, 0), 2.0), ((1, 0), 3.0), ((0, 1), -1.0)]:
            assert field.poly.coefficient(exps) == pytest.approx(expected, abs=1e-8)
        assert field.diagnostics is not None
        assert field.diagnostics.rss <= 1e-16
        assert field.diagnostics.r_squared == pytest.approx(1.0)
        assert field.domain == RectDomain(0, 3, 0, 5)

    def test_recovers_square(self):
        field = fit_surface(sample(grid(4), lambda x, y: x * x), "w", degree=2)
        assert field.poly.coefficient((2, 0)) == pytest.approx(1.0, abs=1e-8)
        for exps in [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2)]:
            assert abs(field.poly.coefficient(exps)) <= 1e-8

    @pytest.mark.parametrize("degree", [0, 1, 2])
    def test_constant_target(self, degree):
        field = fit_surface(sample(grid(3), lambda x, y: 7.0), "w", degree=degree)
        assert field.poly.total_degree == 0
        assert field.poly.coefficient((0, 0)) == pytest.approx(7.0)
        assert field.diagnostics is not None
        assert field.diagnostics.r_squared == 1.0

    def test_degree_zero_on_a_single_location(self):
        field = fit_surface(sample([(1, 1)], lambda x, y: 3.0), "w", degree=0)
        assert field.domain == RectDomain(0.5, 1.5, 0.5, 1.5)

    def test_evaluate_at_samples(self):
        points = grid(3)
        field = fit_surface(sample(points, lambda x, y: 1 + x * y - 2 * y * y), "w", degree=2)
        for x, y in points:
            assert evaluate(field, x, y) == pytest.approx(1 + x * y - 2 * y * y, abs=1e-8)
            assert to_implicit(field)({"x": x, "y": y, "w": 1 + x * y - 2 * y * y}) == (
                pytest.approx(0.0, abs=1e-8)
            )

    def test_underdetermined(self):
        with pytest.raises(UnderdeterminedError):
            fit_surface(sample(grid(2), lambda x, y: x), "w", degree=2)

    def test_collinear(self):
        points = [(i, 2 * i) for i in range(6)]
        with pytest.raises(DegenerateGeometryError):
            fit_surface(sample(points, lambda x, y: x), "w", degree=1)

    def test_shared_coordinate(self):
        points = [(1, i) for i in range(6)]
        with pytest.raises(DegenerateGeometryError):
            fit_surface(sample(points, lambda x, y: y), "w", degree=1)

    @pytest.mark.parametrize("degree", [-1, 5])
    def test_degree_range(self, degree):
        with pytest.raises(FormatError):
            fit_surface(sample(grid(6), lambda x, y: x), "w", degree=degree)

    def test_rows_outside_domain(self):
        with pytest.raises(OutOfRangeError):
            fit_surface(sample(grid(3), lambda x, y: x), "w", degree=1, domain=UNIT)

    def test_correspondence_objective_on_cell_centers(self):
        # every sample sits at the center of its own cell and has a distinct value
        table = sample(grid(4, offset=0.5), lambda x, y: 2 + 3 * x + 0.25 * y)
        field = fit_surface(
            table,
            "w",
            degree=1,
            objective="correspondence",
            cells=4,
            domain=RectDomain(0, 4, 0, 4),
        )
        for exps, expected in [((0, 0), 2.0), ((1, 0), 3.0), ((0, 1), 0.25)]:
            assert field.poly.coefficient(exps) == pytest.approx(expected, abs=1e-8)
        assert field.diagnostics is not None
        assert field.diagnostics.objective == "correspondence"

    def test_unknown_objective(self):
        with pytest.raises(FormatError):
            fit_surface(sample(grid(3), lambda x, y: x), "w", 1, "ridge")  # type: ignore[arg-type]


class TestFittedField:
    def test_from_poly_rejects_other_variables(self):
        with pytest.raises(ShapeError):
            FittedField.from_poly(X + MultiPoly.variable("c"), "w", UNIT)

    def test_document(self):
        field = fit_surface(sample(grid(3), lambda x, y: x - y), "w", degree=1)
        loaded = FittedField.from_dict(field.to_dict())
        assert loaded.poly == field.poly
        assert loaded.diagnostics == field.diagnostics
        assert loaded.domain == field.domain

    @pytest.mark.parametrize("document", [{}, {"variable": "w"}, {"poly": 3}])
    def test_invalid_document(self, document):
        with pytest.raises(FormatError):
            FittedField.from_dict(document)

    def test_implicit_of_constant(self):
        implicit = to_implicit(FittedField.from_poly(MultiPoly.constant(2.0), "w", UNIT))
        assert str(implicit) == "-w + 2"
        assert implicit({"w": 2.0}) == 0.0

    def test_implicit_name_collision(self):
        with pytest.raises(ShapeError):
            to_implicit(FittedField.from_poly(X, "x", UNIT))

    def test_evaluate_outside_domain_is_logged(self, caplog):
        field = FittedField.from_poly(X, "w", UNIT)
        with caplog.at_level(logging.WARNING):
            assert evaluate(field, 2.0, 0.5) == 2.0
        assert "outside its domain" in caplog.text

    def test_zero_field(self):
        assert evaluate(FittedField.from_poly(MultiPoly(["x", "y"]), "w", UNIT), 0.3, 0.2) == 0.0


def test_local_poly_agrees_with_poly():
    field = FittedField.from_poly(3 * X * Y - Y + 1, "w", RectDomain(2.0, 4.0, -1.0, 1.0))
    us, vs = np.array([-1.0, 0.0, 0.5]), np.array([1.0, -0.5, 0.0])
    xs, ys = 3.0 + us, vs
    np.testing.assert_allclose(
        field.local_poly({"x": us, "y": vs}), field.poly({"x": xs, "y": ys}), atol=1e-12
    )


class TestFitProperties:
    POINTS = [(x, y) for x in (0.0, 0.5, 1.5, 2.0, 3.5, 4.0) for y in (0.0, 1.0, 1.5, 3.0, 4.0)]

    @settings(max_examples=100)
    @given(p=st_poly(max_degree=3, integral=False))
    def test_exact_recovery(self, p):
        table = sample(self.POINTS, lambda x, y: float(p({"x": x, "y": y})))
        field = fit_surface(table, "w", degree=3)
        for exps in monomial_exponents(2, 3):
            assert field.poly.coefficient(exps) == pytest.approx(p.coefficient(exps), abs=1e-8)
        assert field.diagnostics is not None
        assert field.diagnostics.rss <= 1e-12

    @given(
        values=st.lists(st.integers(-10, 10).map(float), min_size=30, max_size=30),
        degree=st.integers(0, 4),
    )
    def test_ols_residuals_are_orthogonal_to_the_design(self, values, degree):
        lookup = dict(zip(self.POINTS, values))
        table = sample(self.POINTS, lambda x, y: lookup[x, y])
        field = fit_surface(table, "w", degree=degree)
        residuals = table.column("w") - field.values(table.xs, table.ys)
        u, v = field.frame.to_local(table.xs, table.ys)
        for i, j in monomial_exponents(2, degree):
            assert abs(float(np.dot(u**i * v**j, residuals))) <= 1e-8

    @given(values=st.lists(st.integers(-10, 10).map(float), min_size=30, max_size=30))
    def test_rss_does_not_grow_with_the_degree(self, values):
        lookup = dict(zip(self.POINTS, values))
        table = sample(self.POINTS, lambda x, y: lookup[x, y])
        rss = []
        for degree in range(5):
            diagnostics = fit_surface(table, "w", degree=degree).diagnostics
            assert diagnostics is not None
            rss.append(diagnostics.rss)
        for lower, higher in zip(rss, rss[1:]):
            assert higher <= lower + 1e-9


@settings(max_examples=50)
@given(local=st_poly(max_degree=4, integral=False))
def test_in_model_fit_far_from_the_origin(local):
    # samples of a quartic over [300, 310] x [30, 40], given by its standardized shape
    frame = AffineFrame.of(RectDomain(300.0, 310.0, 30.0, 40.0))
    points = [(300.0 + 2 * i, 30.0 + 2 * j) for i in range(6) for j in range(6)]

    def shape(x: float, y: float) -> float:
        u, v = frame.to_local(np.array([x]), np.array([y]))
        return float(np.asarray(local({"x": u, "y": v}) + np.zeros_like(u))[0])

    table = sample(points, shape)
    field = fit_surface(table, "w", degree=4)
    assert field.frame == frame
    w = table.column("w")
    assert np.max(np.abs(field.values(table.xs, table.ys) - w)) <= 1e-8
    assert field.diagnostics is not None
    assert field.diagnostics.rss <= 1e-14
    for (x, y), expected in zip(points, w):
        assert evaluate(field, x, y) == pytest.approx(expected, abs=1e-8)
