"""Sparse multivariate polynomials with real coefficients."""

from collections.abc import Iterable, Iterator, Mapping, Sequence
from itertools import combinations_with_replacement
from typing import Any, Union

Exponents = tuple[int, ...]
Scalar = Union[int, float]


def grlex_key(exponents: Exponents) -> tuple[int, Exponents]:
    """Sort key of the graded lexicographic order (total degree first)."""
    return sum(exponents), exponents


def monomial_exponents(arity: int, degree: int) -> list[Exponents]:
    """All exponent tuples of total degree ``<= degree``, in ascending graded order.

    Example
    -------
    >>> monomial_exponents(2, 2)
    [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]

    The number of monomials is ``(degree + 1) * (degree + 2) / 2`` for two variables.
    """
    assert arity >= 1 and degree >= 0
    result: list[Exponents] = []
    for total in range(degree + 1):
        for combo in combinations_with_replacement(range(arity), total):
            exps = [0] * arity
            for index in combo:
                exps[index] += 1
            result.append(tuple(exps))
    return sorted(result, key=grlex_key)


class MultiPoly:
    """A sparse polynomial over named variables.

    Terms map exponent tuples (one entry per variable) to non-zero coefficients. The
    canonical order of terms is descending graded lexicographic.

    Example
    -------
    >>> x, y = MultiPoly.variable("x", ["x", "y"]), MultiPoly.variable("y", ["x", "y"])
    >>> p = 2 + 3 * x - y
    >>> print(p)
    3*x - y + 2
    >>> p({"x": 1.0, "y": 1.0})
    4.0
    >>> print((x + y) * (x - y))
    x^2 - y^2

    Binary operations on polynomials over different variables work over the union of the
    variables:

    >>> c = MultiPoly.variable("c")
    >>> (x + c).variables
    ('x', 'y', 'c')

    """

    __slots__ = ("_variables", "_terms")

    def __init__(
        self,
        variables: Iterable[str],
        terms: Mapping[Exponents, Scalar] | Iterable[tuple[Exponents, Scalar]] = (),
    ):
        """Create a polynomial.

        :param variables: Ordered variable names.
        :param terms: Exponent tuples and coefficients. Repeated exponents are summed,
            exactly-zero coefficients are dropped.
        """
        self._variables: tuple[str, ...] = tuple(variables)
        assert len(set(self._variables)) == len(self._variables), "Variables must be unique."

        items = terms.items() if isinstance(terms, Mapping) else terms
        collected: dict[Exponents, float] = {}
        for exps, coeff in items:
            exps = tuple(int(e) for e in exps)
            assert len(exps) == len(self._variables), f"Arity mismatch: {exps}."
            assert all(e >= 0 for e in exps), f"Negative exponent: {exps}."
            collected[exps] = collected.get(exps, 0.0) + float(coeff)

        self._terms: dict[Exponents, float] = {
            e: collected[e]
            for e in sorted(collected, key=grlex_key, reverse=True)
            if collected[e] != 0.0
        }

    @staticmethod
    def constant(value: Scalar, variables: Iterable[str] = ()) -> "MultiPoly":
        """Return the constant polynomial ``value``."""
        variables = tuple(variables)
        return MultiPoly(variables, {(0,) * len(variables): value})

    @staticmethod
    def variable(name: str, variables: Iterable[str] | None = None) -> "MultiPoly":
        """Return the polynomial ``name`` (over ``variables``, default just ``name``)."""
        variables = tuple(variables) if variables is not None else (name,)
        assert name in variables
        return MultiPoly(variables, {tuple(int(v == name) for v in variables): 1.0})

    @property
    def variables(self) -> tuple[str, ...]:
        """The ordered variable names."""
        return self._variables

    @property
    def terms(self) -> dict[Exponents, float]:
        """A copy of the terms in canonical order."""
        return dict(self._terms)

    def __iter__(self) -> Iterator[tuple[Exponents, float]]:
        """Iterate over ``(exponents, coefficient)`` in canonical order."""
        return iter(self._terms.items())

    def __len__(self) -> int:
        """Number of non-zero terms."""
        return len(self._terms)

    @property
    def is_zero(self) -> bool:
        """Whether the polynomial has no terms."""
        return not self._terms

    @property
    def total_degree(self) -> int:
        """Largest total degree of a term (``-1`` for the zero polynomial)."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree(self, name: str) -> int:
        """Degree in one variable (``0`` if it does not occur, ``-1`` for zero)."""
        if self.is_zero:
            return -1
        if name not in self._variables:
            return 0
        index = self._variables.index(name)
        return max(e[index] for e in self._terms)

    @property
    def used_variables(self) -> tuple[str, ...]:
        """The variables that occur with a positive exponent, in order."""
        return tuple(
            v for i, v in enumerate(self._variables) if any(e[i] for e in self._terms)
        )

    def coefficient(self, exponents: Exponents) -> float:
        """Return the coefficient of a monomial (``0.0`` if absent)."""
        return self._terms.get(tuple(exponents), 0.0)

    @property
    def max_abs_coefficient(self) -> float:
        """Largest absolute coefficient (``0.0`` for the zero polynomial)."""
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def with_variables(self, variables: Sequence[str]) -> "MultiPoly":
        """Re-express over another variable order.

        Variables that are dropped must not occur in any term.
        """
        variables = tuple(variables)
        used = self.used_variables
        missing = [v for v in used if v not in variables]
        if missing:
            raise ValueError(f"Cannot drop variables in use: {missing}.")

        positions = [self._variables.index(v) if v in self._variables else None for v in variables]
        return MultiPoly(
            variables,
            {
                tuple(0 if p is None else e[p] for p in positions): c
                for e, c in self._terms.items()
            },
        )

    def drop_unused(self) -> "MultiPoly":
        """Remove the variables that do not occur."""
        return self.with_variables(self.used_variables)

    def rename(self, mapping: Mapping[str, str]) -> "MultiPoly":
        """Rename variables."""
        return MultiPoly((mapping.get(v, v) for v in self._variables), self._terms)

    def scaled(self, factor: Scalar) -> "MultiPoly":
        """Multiply all coefficients by ``factor``."""
        return MultiPoly(self._variables, {e: c * factor for e, c in self._terms.items()})

    def pruned(self, rel_tol: float) -> "MultiPoly":
        """Drop coefficients smaller than ``rel_tol`` times the largest one."""
        threshold = rel_tol * self.max_abs_coefficient
        return MultiPoly(
            self._variables, {e: c for e, c in self._terms.items() if abs(c) >= threshold}
        )

    def normalized(self, rel_tol: float = 0.0) -> "MultiPoly":
        """Scale so the largest coefficient becomes ``+1``, then prune below ``rel_tol``.

        Among coefficients of equal magnitude the first one in canonical order decides the
        sign. The zero polynomial is returned unchanged.

        Example
        -------
        >>> print(MultiPoly(["a"], {(1,): -4.0, (0,): 2.0}).normalized())
        a - 0.5

        """
        if self.is_zero:
            return self
        biggest = self.max_abs_coefficient
        lead = next(c for c in self._terms.values() if abs(c) == biggest)
        return self.scaled(1.0 / lead).pruned(rel_tol)

    def coefficients_in(self, name: str) -> list["MultiPoly"]:
        """Coefficients as polynomials in the remaining variables.

        Entry ``k`` is the coefficient of ``name**k``.

        Example
        -------
        >>> p = MultiPoly(["x", "c"], {(1, 0): 1.0, (0, 1): 1.0, (0, 0): -1.0})
        >>> [str(q) for q in p.coefficients_in("x")]
        ['c - 1', '1']

        """
        rest = tuple(v for v in self._variables if v != name)
        if name not in self._variables:
            return [self.with_variables(rest)]

        index = self._variables.index(name)
        buckets: list[dict[Exponents, float]] = [{} for _ in range(self.degree(name) + 1)]
        for e, c in self._terms.items():
            buckets[e[index]][e[:index] + e[index + 1 :]] = c
        return [MultiPoly(rest, b) for b in buckets]

    def substitute(self, mapping: Mapping[str, "MultiPoly | Scalar"]) -> "MultiPoly":
        """Replace variables by polynomials (or numbers).

        The result is over the remaining variables followed by new variables of the
        substituted polynomials.

        Example
        -------
        >>> x = MultiPoly.variable("x")
        >>> print((x * x).substitute({"x": 2 * MultiPoly.variable("u") + 1}))
        4*u^2 + 4*u + 1

        """
        replaced = [v for v in self._variables if v in mapping]
        kept = tuple(v for v in self._variables if v not in mapping)
        parts = {
            v: p if isinstance(p, MultiPoly) else MultiPoly.constant(p) for v, p in mapping.items()
        }

        variables = list(kept)
        for v in replaced:
            variables.extend(w for w in parts[v].variables if w not in variables)

        kept_index = [self._variables.index(v) for v in kept]
        powers: dict[tuple[str, int], MultiPoly] = {}

        def power(name: str, k: int) -> MultiPoly:
            if (name, k) not in powers:
                powers[(name, k)] = parts[name] ** k
            return powers[(name, k)]

        result = MultiPoly(variables)
        for e, c in self._terms.items():
            term = MultiPoly(variables, {_embed(variables, kept, [e[i] for i in kept_index]): c})
            for v in replaced:
                k = e[self._variables.index(v)]
                if k:
                    term = term * power(v, k)
            result = result + term
        return result.with_variables(variables)

    def __call__(self, point: Mapping[str, Any]) -> Any:
        """Evaluate at a point given as a mapping of variable names to values.

        Values may be numbers or numpy arrays (evaluated elementwise). Variables that do not
        occur may be omitted.
        """
        used = set(self.used_variables)
        missing = [v for v in used if v not in point]
        if missing:
            raise KeyError(f"No value for variable(s) {missing}.")

        total: Any = 0.0
        for e, c in self._terms.items():
            value: Any = c
            for v, k in zip(self._variables, e):
                if k:
                    value = value * point[v] ** k
            total = total + value
        return total

    def _aligned(self, other: "MultiPoly") -> tuple["MultiPoly", "MultiPoly"]:
        if self._variables == other._variables:
            return self, other
        variables = self._variables + tuple(v for v in other._variables if v not in self._variables)
        return self.with_variables(variables), other.with_variables(variables)

    def _coerce(self, other: "MultiPoly | Scalar") -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.constant(other, self._variables)

    def __add__(self, other: "MultiPoly | Scalar") -> "MultiPoly":
        """Sum of two polynomials (or a polynomial and a number)."""
        a, b = self._aligned(self._coerce(other))
        terms = dict(a._terms)
        for e, c in b._terms.items():
            terms[e] = terms.get(e, 0.0) + c
        return MultiPoly(a._variables, terms)

    def __radd__(self, other: Scalar) -> "MultiPoly":
        """Number plus polynomial."""
        return self + other

    def __neg__(self) -> "MultiPoly":
        """Negation."""
        return self.scaled(-1.0)

    def __sub__(self, other: "MultiPoly | Scalar") -> "MultiPoly":
        """Difference."""
        return self + (-self._coerce(other))

    def __rsub__(self, other: Scalar) -> "MultiPoly":
        """Number minus polynomial."""
        return -self + other

    def __mul__(self, other: "MultiPoly | Scalar") -> "MultiPoly":
        """Product."""
        if not isinstance(other, MultiPoly):
            return self.scaled(other)
        a, b = self._aligned(other)
        terms: dict[Exponents, float] = {}
        for ea, ca in a._terms.items():
            for eb, cb in b._terms.items():
                e = tuple(i + j for i, j in zip(ea, eb))
                terms[e] = terms.get(e, 0.0) + ca * cb
        return MultiPoly(a._variables, terms)

    def __rmul__(self, other: Scalar) -> "MultiPoly":
        """Number times polynomial."""
        return self.scaled(other)

    def __truediv__(self, other: Scalar) -> "MultiPoly":
        """Division by a number."""
        return self.scaled(1.0 / other)

    def __pow__(self, k: int) -> "MultiPoly":
        """Non-negative integer power by repeated squaring."""
        assert k >= 0
        result = MultiPoly.constant(1.0, self._variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        """Exact equality of terms, independent of variable order."""
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if set(self.used_variables) != set(other.used_variables):
            return False
        a, b = self._aligned(other)
        return a._terms == b._terms

    __hash__ = None  # type: ignore[assignment]

    def to_dict(self) -> dict[str, Any]:
        """JSON-friendly representation."""
        return {
            "variables": list(self._variables),
            "terms": [[list(e), c] for e, c in self._terms.items()],
        }

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> "MultiPoly":
        """Inverse of ``to_dict``."""
        return MultiPoly(data["variables"], [(tuple(e), c) for e, c in data["terms"]])

    def __repr__(self) -> str:
        """Exact representation."""
        return f"{MultiPoly.__name__}({list(self._variables)}, {self._terms})"

    def __str__(self) -> str:
        """Human readable form in canonical order."""
        if self.is_zero:
            return "0"

        pieces: list[str] = []
        for e, c in self._terms.items():
            monomial = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self._variables, e) if k
            )
            magnitude = f"{abs(c):g}"
            if monomial and magnitude == "1":
                body = monomial
            elif monomial:
                body = f"{magnitude}*{monomial}"
            else:
                body = magnitude
            sign = "-" if c < 0 else "+"
            pieces.append(f"{sign} {body}" if pieces else ("-" + body if c < 0 else body))
        return " ".join(pieces)


def _embed(variables: Sequence[str], names: Sequence[str], exps: Sequence[int]) -> Exponents:
    lookup = dict(zip(names, exps))
    return tuple(lookup.get(v, 0) for v in variables)
