import pytest
from expcorr.elimination import (
    CouplingRelation,
    derive_coupling,
    raw_resultant,
    sylvester_resultant,
    verify_coupling,
)
from expcorr.errors import (
    DegenerateEliminationError,
    NothingToEliminateError,
    ShapeError,
)
from expcorr.polynomial import MultiPoly
from expcorr.surface import FittedField, fit_surface
from expcorr.table import SampleRow, SampleTable
from hypothesis import given
from hypothesis import strategies as st

from tests.utils.planar import UNIT, planar_fields, planar_table
from tests.utils.strategies import st_poly

VARIABLES = ["x", "a", "b", "c", "n", "t", "w"]
x, a, b, c, n, t, w = (MultiPoly.variable(v, VARIABLES) for v in VARIABLES)


class TestSylvesterResultant:
    @pytest.mark.parametrize(
        "p_a, p_b, expected",
        [
            (x + c - 1, x - n, c + n - 1),
            (x - a, x - b, a - b),
            (x * x - w, x - t, t * t - w),
            (2 * x * x + a, x + b, 2 * b * b + a),
        ],
    )
    def test_known_resultants(self, p_a, p_b, expected):
        assert sylvester_resultant(p_a, p_b, "x") == expected.normalized()

    def test_resultant_drops_the_variable(self):
        result = sylvester_resultant(x * x + a * x + 1, x - b, "x")
        assert "x" not in result.used_variables
        assert result.max_abs_coefficient == 1.0

    def test_common_factor(self):
        with pytest.raises(DegenerateEliminationError):
            sylvester_resultant((x - a) * (x + 1), x - a, "x")

    def test_nothing_to_eliminate(self):
        with pytest.raises(NothingToEliminateError):
            sylvester_resultant(a + b, x - a, "x")

    def test_degree_limit(self):
        with pytest.raises(ShapeError):
            sylvester_resultant(x**5 - a, x - b, "x")

    @given(
        p=st_poly(("x", "t"), max_degree=2),
        q=st_poly(("x", "t"), max_degree=2),
        root=st.tuples(st.integers(-2, 2), st.integers(-2, 2)),
    )
    def test_vanishes_at_common_roots(self, p, q, root):
        at = {"x": float(root[0]), "t": float(root[1])}
        p, q = p - p(at), q - q(at)
        if p.degree("x") <= 0 or q.degree("x") <= 0:
            return
        assert raw_resultant(p, q, "x")({"t": at["t"]}) == pytest.approx(0.0, abs=1e-8)

    @given(
        p=st_poly(("x", "t"), max_degree=3),
        q=st_poly(("x", "t"), max_degree=3),
        s=st.integers(-3, 3).filter(bool),
    )
    def test_symmetry_and_scaling(self, p, q, s):
        m, k = p.degree("x"), q.degree("x")
        if m <= 0 or k <= 0:
            return
        forward = raw_resultant(p, q, "x")
        assert raw_resultant(q, p, "x") == forward * (-1) ** (m * k)
        assert raw_resultant(s * p, q, "x") == forward * s**k


class TestDeriveCoupling:
    @pytest.fixture(scope="class")
    def relation(self) -> CouplingRelation:
        return derive_coupling(planar_fields())

    def test_components(self, relation):
        h1, h2 = relation.components
        assert str(h1) == "c + n - p"
        assert set(h2.used_variables) == {"n", "p", "m"}
        assert set(relation.poly.used_variables) <= {"c", "n", "p", "m"}

    def test_normalized(self, relation):
        assert relation.poly.max_abs_coefficient == 1.0
        assert relation.scale != 0.0

    def test_provenance(self, relation):
        assert [str(s) for s in relation.provenance] == [
            "g1 = Res_x(F_c, F_n)",
            "g2 = Res_x(F_c, F_p)",
            "h1 = Res_y(g1, g2)",
            "g3 = Res_x(F_n, F_p)",
            "g4 = Res_x(F_n, F_m)",
            "h2 = Res_y(g3, g4)",
        ]
        rules = {s.name: s.rule for s in relation.provenance}
        assert rules["g4"] == "power"
        assert rules["h1"] == "sylvester"

    def test_vanishes_on_samples(self, relation):
        check = verify_coupling(relation, planar_table())
        assert check.max_abs <= 1e-8
        assert check.rms <= check.max_abs

    def test_does_not_vanish_off_the_relation(self, relation):
        assert abs(relation.poly({"c": 1.0, "n": 1.0, "p": 0.0, "m": 0.0})) > 1e-3

    def test_deterministic(self, relation):
        again = derive_coupling(planar_fields())
        assert repr(again.poly) == repr(relation.poly)

    def test_from_fitted_fields(self):
        table = planar_table()
        fields = {v: fit_surface(table, v, degree=1) for v in ("c", "n", "p", "m")}
        check = verify_coupling(derive_coupling(fields), table)
        assert check.max_abs <= 1e-8

    def test_duplicated_field(self):
        fields = planar_fields()
        fields["m"] = fields["p"]
        with pytest.raises(DegenerateEliminationError) as error:
            derive_coupling(fields)
        assert "h2" in error.value.origin

    def test_constant_field(self):
        fields = planar_fields()
        fields["n"] = FittedField.from_poly(MultiPoly.constant(2.0), "n", UNIT)
        with pytest.raises(NothingToEliminateError):
            derive_coupling(fields)

    def test_field_count(self):
        fields = planar_fields()
        del fields["m"]
        with pytest.raises(ShapeError):
            derive_coupling(fields)


class TestVerifyCoupling:
    def test_missing_variable(self):
        relation = CouplingRelation(c - n, (), 1.0, (c - n, c - n))
        table = SampleTable([SampleRow("r", 0.0, 0.0, {"c": 1.0})], variables=["c"])
        with pytest.raises(ShapeError):
            verify_coupling(relation, table)

    def test_values(self):
        relation = CouplingRelation((c - n).drop_unused(), (), 1.0, (c - n, c - n))
        rows = [
            SampleRow("1", 0, 0, {"c": 1.0, "n": 4.0}),
            SampleRow("2", 0, 0, {"c": 1.0, "n": 1.0}),
        ]
        check = verify_coupling(relation, SampleTable(rows, variables=["c", "n"]))
        assert check.max_abs == 3.0
        assert check.rms == pytest.approx((9 / 2) ** 0.5)
