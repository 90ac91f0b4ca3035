from collections.abc import Sequence

from expcorr.polynomial import MultiPoly, monomial_exponents
from expcorr.table import SampleRow, SampleTable
from hypothesis import strategies as st


@st.composite
def st_table(
    draw,
    variables: Sequence[str] = ("A", "B"),
    *,
    min_rows: int = 3,
    max_rows: int = 12,
    levels: int = 5,
) -> SampleTable:
    """Strategy for small tables whose values are drawn from ``levels`` integers.

    Few levels give many ties, so bins are shared by several rows.
    """
    count = draw(st.integers(min_rows, max_rows))
    value = st.integers(0, levels - 1).map(float)
    coordinate = st.floats(0.0, 10.0, allow_nan=False, allow_infinity=False)
    rows = [
        SampleRow(
            id=f"r{i}",
            x=draw(coordinate),
            y=draw(coordinate),
            values={v: draw(value) for v in variables},
        )
        for i in range(count)
    ]
    return SampleTable(rows, variables=variables)


@st.composite
def st_poly(
    draw, variables: Sequence[str] = ("x", "y"), *, max_degree: int = 2, integral: bool = True
) -> MultiPoly:
    """Strategy for dense-ish polynomials with small coefficients."""
    degree = draw(st.integers(0, max_degree))
    coefficient = (
        st.integers(-3, 3).map(float)
        if integral
        else st.integers(-300, 300).map(lambda k: k / 100)
    )
    return MultiPoly(
        variables,
        {e: draw(coefficient) for e in monomial_exponents(len(variables), degree)},
    )
