"""Exact rational polynomial engine for the A2 Dunkl operators.

Everything here is exact: coefficients are ``gmpy2.mpq`` and the
multiplicity ``k`` is a rational number.  The module provides

* a sparse multivariate polynomial type (:class:`RationalPoly`),
* the Dunkl operators acting on the first three variables,
* the Fischer-pairing Gram matrices whose inverses are the homogeneous
  Taylor components of the Dunkl kernel (:func:`kernel_series`),
* floating evaluation of the truncated kernel with a rigorous tail bound,
* the constant ``T_V(V)(0)`` and an exact replay of Opdam's functional
  equation, degree by degree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from gmpy2 import mpq, mpz

Rational = type(mpq(0))

_ZERO = mpq(0)
_ONE = mpq(1)

PERMUTATIONS_3 = tuple(itertools.permutations(range(3)))


def to_rational(value) -> Rational:
    """Convert ``value`` to an exact rational.

    Accepts ints, Fractions, mpq, floats (converted exactly from their binary
    representation) and strings ``"p/q"`` or decimals like ``"0.75"``.
    """
    if isinstance(value, Rational):
        return value
    if isinstance(value, (int, mpz)):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot convert {value!r} to a rational")
        n, d = value.as_integer_ratio()
        return mpq(n, d)
    if isinstance(value, str):
        text = value.strip()
        try:
            frac = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed rational {value!r}") from exc
        return mpq(frac.numerator, frac.denominator)
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def permute_point(perm: Sequence[int], x: Sequence) -> tuple:
    """Action of a permutation on a point: ``(sigma.x)_i = x_{sigma^{-1}(i)}``."""
    out = [None] * len(x)
    for i, p in enumerate(perm):
        out[p] = x[i]
    return tuple(out)


class RationalPoly:
    """Sparse polynomial over the rationals in ``nvars`` variables.

    ``terms`` maps exponent tuples to nonzero ``mpq`` coefficients.  Instances
    are treated as immutable.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exps, c in terms.items():
                if len(exps) != nvars:
                    raise ValueError("exponent tuple has wrong length")
                c = to_rational(c)
                if c != 0:
                    clean[tuple(exps)] = c
        self.terms = clean

    # construction helpers
    @classmethod
    def constant(cls, nvars: int, c) -> "RationalPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "RationalPoly":
        exps = [0] * nvars
        exps[i] = 1
        return cls(nvars, {tuple(exps): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "RationalPoly":
        return cls(len(exps), {tuple(exps): c})

    @classmethod
    def variables(cls, nvars: int) -> list["RationalPoly"]:
        return [cls.variable(nvars, i) for i in range(nvars)]

    def _from_raw(self, terms: dict) -> "RationalPoly":
        out = RationalPoly.__new__(RationalPoly)
        out.nvars = self.nvars
        out.terms = {e: c for e, c in terms.items() if c != 0}
        return out

    def _coerce(self, other) -> "RationalPoly":
        if isinstance(other, RationalPoly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in different rings")
            return other
        return RationalPoly.constant(self.nvars, other)

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, _ZERO) + c
        return self._from_raw(terms)

    __radd__ = __add__

    def __neg__(self):
        return self._from_raw({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, RationalPoly):
            c = to_rational(other)
            return self._from_raw({e: c * v for e, v in self.terms.items()})
        other = self._coerce(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, _ZERO) + c1 * c2
        return self._from_raw(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = RationalPoly.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, RationalPoly):
            try:
                other = RationalPoly.constant(self.nvars, other)
            except TypeError:
                return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "RationalPoly(0)"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(f"x{i + 1}^{p}" if p > 1 else f"x{i + 1}"
                            for i, p in enumerate(e) if p)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return "RationalPoly(" + " + ".join(parts) + ")"

    # structure
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def coefficient(self, exps: Sequence[int]) -> Rational:
        return self.terms.get(tuple(exps), _ZERO)

    def homogeneous_part(self, d: int) -> "RationalPoly":
        return self._from_raw({e: c for e, c in self.terms.items() if sum(e) == d})

    def derivative(self, i: int) -> "RationalPoly":
        terms: dict = {}
        for e, c in self.terms.items():
            p = e[i]
            if p:
                ne = e[:i] + (p - 1,) + e[i + 1:]
                terms[ne] = terms.get(ne, _ZERO) + c * p
        return self._from_raw(terms)

    def swap(self, i: int, j: int) -> "RationalPoly":
        """The reflection ``s_ij``: interchange variables ``i`` and ``j``."""
        terms = {}
        for e, c in self.terms.items():
            ne = list(e)
            ne[i], ne[j] = ne[j], ne[i]
            terms[tuple(ne)] = c
        return self._from_raw(terms)

    def permute(self, perm: Sequence[int], offset: int = 0) -> "RationalPoly":
        """Compose with a permutation of variables ``offset .. offset+len(perm)-1``.

        Returns ``q`` with ``q(x) = p(sigma^{-1}.x)`` on those variables, so that
        evaluating ``q`` at ``x`` equals evaluating ``p`` at the permuted point.
        """
        n = len(perm)
        terms = {}
        for e, c in self.terms.items():
            block = e[offset:offset + n]
            nb = [0] * n
            for src, dst in enumerate(perm):
                nb[dst] = block[src]
            ne = e[:offset] + tuple(nb) + e[offset + n:]
            terms[ne] = terms.get(ne, _ZERO) + c
        return self._from_raw(terms)

    def divide_by_difference(self, i: int, j: int) -> "RationalPoly":
        """Exact quotient of ``self`` by ``(x_i - x_j)``.

        Synthetic division in ``x_i`` whose coefficients are polynomials in the
        remaining variables.  A nonzero remainder means the caller broke an
        invariant and raises ``ArithmeticError``.
        """
        if i == j:
            raise ValueError("need two distinct variables")
        # group by power of x_i; coefficient keyed by the exponent tuple with x_i removed
        by_power: dict[int, dict] = {}
        for e, c in self.terms.items():
            rest = e[:i] + (0,) + e[i + 1:]
            bucket = by_power.setdefault(e[i], {})
            bucket[rest] = bucket.get(rest, _ZERO) + c
        if not by_power:
            return self._from_raw({})
        top = max(by_power)
        quotient: dict = {}
        carry: dict = {}
        # q_{d-1} = c_d + x_j * q_d, from the top power downwards
        for d in range(top, 0, -1):
            cur = dict(by_power.get(d, {}))
            for rest, c in carry.items():
                cur[rest] = cur.get(rest, _ZERO) + c
            cur = {r: c for r, c in cur.items() if c != 0}
            for rest, c in cur.items():
                ne = list(rest)
                ne[i] = d - 1
                quotient[tuple(ne)] = quotient.get(tuple(ne), _ZERO) + c
            carry = {}
            for rest, c in cur.items():
                ne = list(rest)
                ne[j] += 1
                carry[tuple(ne)] = c
        remainder = dict(by_power.get(0, {}))
        for rest, c in carry.items():
            remainder[rest] = remainder.get(rest, _ZERO) + c
        if any(c != 0 for c in remainder.values()):
            raise ArithmeticError(f"polynomial is not divisible by x{i + 1} - x{j + 1}")
        return self._from_raw(quotient)

    def substitute(self, i: int, value: "RationalPoly") -> "RationalPoly":
        """Replace variable ``i`` by the polynomial ``value``."""
        value = self._coerce(value)
        result = RationalPoly(self.nvars)
        powers = {0: RationalPoly.constant(self.nvars, 1)}
        for e, c in self.terms.items():
            p = e[i]
            if p not in powers:
                powers[p] = value ** p
            rest = e[:i] + (0,) + e[i + 1:]
            result = result + powers[p] * RationalPoly(self.nvars, {rest: c})
        return result

    def evaluate(self, point: Sequence):
        """Evaluate at ``point``; exact if every coordinate is rational."""
        if len(point) != self.nvars:
            raise ValueError("point has wrong dimension")
        exact = all(isinstance(v, (int, Rational, Fraction, mpz)) for v in point)
        if exact:
            pt = [to_rational(v) for v in point]
            total = _ZERO
        else:
            pt = [float(v) for v in point]
            total = 0.0
        for e, c in self.terms.items():
            term = c if exact else float(c)
            for v, p in zip(pt, e):
                if p:
                    term = term * v ** p
            total = total + term
        return total

    def __call__(self, *point):
        return self.evaluate(point)


# --------------------------------------------------------------------------
# Dunkl operators on exact polynomials


def _as_k(k) -> Rational:
    return to_rational(k)


def poly_dunkl_T(i: int, k, p: RationalPoly) -> RationalPoly:
    """Dunkl operator ``T_i`` (``i`` in 1..3) acting on the first three variables."""
    if i not in (1, 2, 3):
        raise ValueError("i must be 1, 2 or 3")
    if p.nvars < 3:
        raise ValueError("Dunkl operators need at least three variables")
    k = _as_k(k)
    a = i - 1
    out = p.derivative(a)
    if k != 0:
        for b in range(3):
            if b == a:
                continue
            diff = p - p.swap(a, b)
            if not diff.is_zero():
                out = out + diff.divide_by_difference(a, b) * k
    return out


def vandermonde_poly(nvars: int = 3, offset: int = 0) -> RationalPoly:
    x = RationalPoly.variables(nvars)
    x1, x2, x3 = x[offset:offset + 3]
    return (x1 - x2) * (x1 - x3) * (x2 - x3)


def apply_T_V_poly(k, p: RationalPoly) -> RationalPoly:
    """``T_V = (T1 - T2)(T2 - T3)(T1 - T3)`` applied exactly."""
    def diff(i, j, q):
        return poly_dunkl_T(i, k, q) - poly_dunkl_T(j, k, q)

    return diff(1, 2, diff(2, 3, diff(1, 3, p)))


# --------------------------------------------------------------------------
# Fischer pairing and the kernel's Taylor components


@lru_cache(maxsize=None)
def monomial_basis(m: int) -> tuple[tuple[int, int, int], ...]:
    """Exponent triples of total degree ``m`` in a fixed (lexicographically decreasing) order."""
    return tuple((a, b, m - a - b) for a in range(m, -1, -1) for b in range(m - a, -1, -1))


@lru_cache(maxsize=None)
def _lowering_columns(k: Rational, m: int, i: int):
    """Sparse columns of ``T_i`` from degree ``m`` to ``m-1`` monomials."""
    index = {e: r for r, e in enumerate(monomial_basis(m - 1))}
    cols = []
    for beta in monomial_basis(m):
        img = poly_dunkl_T(i + 1, k, RationalPoly.monomial(beta))
        cols.append([(index[e], c) for e, c in img.terms.items()])
    return cols


@lru_cache(maxsize=None)
def _gram_cached(k: Rational, m: int):
    if m == 0:
        return ((_ONE,),)
    prev = _gram_cached(k, m - 1)
    index_prev = {e: r for r, e in enumerate(monomial_basis(m - 1))}
    rows = []
    for alpha in monomial_basis(m):
        i = next(t for t in range(3) if alpha[t] > 0)
        lower = list(alpha)
        lower[i] -= 1
        prow = prev[index_prev[tuple(lower)]]
        cols = _lowering_columns(k, m, i)
        row = []
        for col in cols:
            s = _ZERO
            for r, c in col:
                pr = prow[r]
                if pr:
                    s += pr * c
            row.append(s)
        rows.append(tuple(row))
    return tuple(rows)


def fischer_gram(k, m: int) -> list[list[Rational]]:
    """Gram matrix ``G[a][b] = (T^a x^b)(0)`` over degree-``m`` monomials."""
    if m < 0:
        raise ValueError("degree must be nonnegative")
    return [list(row) for row in _gram_cached(_as_k(k), m)]


def exact_inverse(matrix: Sequence[Sequence]) -> list[list[Rational]]:
    """Gauss-Jordan inverse over the rationals (raises on a singular matrix)."""
    n = len(matrix)
    a = [[to_rational(v) for v in row] + [_ONE if r == c else _ZERO for c in range(n)]
         for r, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular Gram matrix")
        a[col], a[piv] = a[piv], a[col]
        prow = a[col]
        inv = 1 / prow[col]
        prow = [v * inv for v in prow]
        a[col] = prow
        nz = [c for c in range(col, 2 * n) if prow[c] != 0]
        for r in range(n):
            if r == col:
                continue
            row = a[r]
            f = row[col]
            if f != 0:
                for c in nz:
                    row[c] -= f * prow[c]
    return [row[n:] for row in a]


def ldl_pivots(matrix: Sequence[Sequence]) -> list[Rational]:
    """Pivots of the exact symmetric LDL^T factorization (no pivoting)."""
    n = len(matrix)
    a = [[to_rational(v) for v in row] for row in matrix]
    pivots = []
    for col in range(n):
        d = a[col][col]
        pivots.append(d)
        if d == 0:
            break
        for r in range(col + 1, n):
            f = a[r][col] / d
            if f != 0:
                for c in range(col + 1, n):
                    a[r][c] -= f * a[col][c]
    return pivots


def _w_polys(nvars: int = 3, offset: int = 0):
    """Translation-invariant coordinates ``w1 = x1 - x3``, ``w2 = x2 - x3`` and ``s = x1 + x2 + x3``."""
    x = RationalPoly.variables(nvars)
    x1, x2, x3 = x[offset:offset + 3]
    return x1 - x3, x2 - x3, x1 + x2 + x3


@lru_cache(maxsize=None)
def invariant_basis(d: int) -> tuple[tuple[int, int], ...]:
    return tuple((a, d - a) for a in range(d, -1, -1))


@lru_cache(maxsize=None)
def _invariant_embedding(d: int):
    """Rows: coefficient vectors of ``w1^a w2^b`` in the degree-``d`` monomial basis."""
    w1, w2, _ = _w_polys()
    index = {e: r for r, e in enumerate(monomial_basis(d))}
    rows = []
    for a, b in invariant_basis(d):
        p = (w1 ** a) * (w2 ** b)
        row = [_ZERO] * len(index)
        for e, c in p.terms.items():
            row[index[e]] = c
        rows.append(tuple(row))
    return tuple(rows)


@lru_cache(maxsize=None)
def _shifted_embedding(a: int, d: int):
    """Rows: coefficient vectors of ``s^a w1^p w2^q`` (``p + q = d``) in the degree ``a + d`` basis."""
    w1, w2, s = _w_polys()
    sa = s ** a
    index = {e: r for r, e in enumerate(monomial_basis(a + d))}
    rows = []
    for p, q in invariant_basis(d):
        poly = sa * (w1 ** p) * (w2 ** q)
        row = [_ZERO] * len(index)
        for e, c in poly.terms.items():
            row[index[e]] = c
        rows.append(tuple(row))
    return tuple(rows)


@lru_cache(maxsize=None)
def _invariant_gram(k: Rational, d: int):
    """Fischer Gram matrix restricted to translation-invariant polynomials of degree ``d``."""
    G = _gram_cached(k, d)
    B = _invariant_embedding(d)
    n = len(G)
    BG = []
    for brow in B:
        nz = [(r, c) for r, c in enumerate(brow) if c != 0]
        BG.append([sum((c * G[r][col] for r, c in nz), _ZERO) for col in range(n)])
    out = []
    for row in BG:
        out.append(tuple(sum((row[c] * bcol[c] for c in range(n) if bcol[c] != 0), _ZERO)
                         for bcol in B))
    return tuple(out)


@lru_cache(maxsize=None)
def _invariant_block(k: Rational, d: int):
    return tuple(tuple(row) for row in exact_inverse(_invariant_gram(k, d)))


@dataclass
class KernelSeries:
    """Homogeneous Taylor components ``E_m(x, y)`` of the Dunkl kernel for ``m <= M``.

    Translation by the all-ones vector splits the Fischer pairing
    orthogonally: with ``s = x1 + x2 + x3`` and ``w = (x1 - x3, x2 - x3)``,

        E_m(x, y) = sum_a (s(x) s(y) / 3)^a / a! * H_{m-a}(w(x), w(y)),

    where ``H_d`` is the inverse Gram matrix on translation-invariant
    polynomials of degree ``d`` (stored in ``blocks``).  The monomial-basis
    matrices of the full bivariate forms are expanded on demand by
    :meth:`coefficient_matrix`.
    """

    k: Rational
    blocks: list = field(default_factory=list)

    @property
    def max_degree(self) -> int:
        return len(self.blocks) - 1

    def coefficient_matrix(self, m: int) -> list[list[Rational]]:
        """``C_m`` with ``E_m(x, y) = sum C_m[a][b] x^a y^b`` over :func:`monomial_basis`."""
        cache = self.__dict__.setdefault("_matrix_cache", {})
        if m not in cache:
            n = len(monomial_basis(m))
            C = [[_ZERO] * n for _ in range(n)]
            for a in range(m + 1):
                d = m - a
                B = _shifted_embedding(a, d)
                H = self.blocks[d]
                scale = mpq(1, math.factorial(a) * 3 ** a)
                # HB = H @ B, then C += scale * B^T @ HB
                HB = [[sum((h * B[r][c] for r, h in enumerate(hrow) if h != 0), _ZERO)
                       for c in range(n)] for hrow in H]
                for r, brow in enumerate(B):
                    hb = HB[r]
                    for i, bi in enumerate(brow):
                        if bi == 0:
                            continue
                        f = bi * scale
                        Ci = C[i]
                        for j, v in enumerate(hb):
                            if v != 0:
                                Ci[j] += f * v
            cache[m] = C
        return [list(row) for row in cache[m]]

    def component_poly(self, m: int) -> RationalPoly:
        """``E_m`` as a polynomial in six variables ``(x1, x2, x3, y1, y2, y3)``."""
        basis = monomial_basis(m)
        C = self.coefficient_matrix(m)
        return RationalPoly(6, {a + b: c for a, row in zip(basis, C)
                                for b, c in zip(basis, row) if c != 0})

    def _float_blocks(self) -> list[np.ndarray]:
        cache = self.__dict__.get("_float_cache")
        if cache is None:
            cache = [np.array([[float(c) for c in row] for row in blk], dtype=float)
                     for blk in self.blocks]
            self.__dict__["_float_cache"] = cache
        return cache

    def component_values(self, x: Sequence[float], y: Sequence[float]) -> np.ndarray:
        """Floating values ``E_m(x, y)`` for ``m = 0 .. M``."""
        x = [float(v) for v in x]
        y = [float(v) for v in y]
        wx = (x[0] - x[2], x[1] - x[2])
        wy = (y[0] - y[2], y[1] - y[2])
        t = sum(x) * sum(y) / 3.0
        h = np.empty(self.max_degree + 1)
        for d, blk in enumerate(self._float_blocks()):
            ex = np.array(invariant_basis(d), dtype=float)
            ux = wx[0] ** ex[:, 0] * wx[1] ** ex[:, 1]
            uy = wy[0] ** ex[:, 0] * wy[1] ** ex[:, 1]
            h[d] = ux @ blk @ uy
        out = np.zeros_like(h)
        for m in range(len(h)):
            coef = 1.0
            for a in range(m + 1):
                out[m] += coef * h[m - a]
                coef *= t / (a + 1)
        return out

    def check_recurrence(self) -> list[tuple[int, int]]:
        """Return the ``(i, m)`` pairs where ``T_i^x E_{m+1} = y_i E_m`` fails (empty if exact)."""
        failures = []
        ys = RationalPoly.variables(6)[3:]
        for m in range(self.max_degree):
            em = self.component_poly(m)
            em1 = self.component_poly(m + 1)
            for i in (1, 2, 3):
                if poly_dunkl_T(i, self.k, em1) != ys[i - 1] * em:
                    failures.append((i, m))
        return failures

    def to_text(self) -> str:
        """Serialise the invariant blocks.

        Header ``k <num> <den> M <M>``, then one line per nonzero entry:
        ``d a1 a2 b1 b2 num den`` meaning the coefficient of
        ``w1(x)^a1 w2(x)^a2 w1(y)^b1 w2(y)^b2`` in ``H_d``.
        """
        lines = [f"k {self.k.numerator} {self.k.denominator} M {self.max_degree}"]
        for d, blk in enumerate(self.blocks):
            basis = invariant_basis(d)
            for a, row in zip(basis, blk):
                for b, c in zip(basis, row):
                    if c != 0:
                        lines.append(" ".join(str(v) for v in (d, *a, *b, c.numerator, c.denominator)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "KernelSeries":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if len(head) != 5 or head[0] != "k" or head[3] != "M":
            raise ValueError("missing kernel series header")
        k = mpq(int(head[1]), int(head[2]))
        M = int(head[4])
        blocks = []
        for d in range(M + 1):
            size = d + 1
            blocks.append([[_ZERO] * size for _ in range(size)])
        index = [{e: r for r, e in enumerate(invariant_basis(d))} for d in range(M + 1)]
        for ln in lines[1:]:
            f = [int(v) for v in ln.split()]
            if len(f) != 7:
                raise ValueError(f"bad coefficient line: {ln!r}")
            d = f[0]
            a, b = tuple(f[1:3]), tuple(f[3:5])
            blocks[d][index[d][a]][index[d][b]] = mpq(f[5], f[6])
        return cls(k=k, blocks=blocks)


def kernel_series(k, M: int) -> KernelSeries:
    """Taylor components of the Dunkl kernel up to total degree ``M`` (in each argument)."""
    if M < 0:
        raise ValueError("M must be nonnegative")
    k = _as_k(k)
    blocks = [[list(row) for row in _invariant_block(k, d)] for d in range(M + 1)]
    return KernelSeries(k=k, blocks=blocks)


@lru_cache(maxsize=None)
def _series_cached(k: Rational, M: int) -> KernelSeries:
    return kernel_series(k, M)


@dataclass(frozen=True)
class SeriesValue:
    """Truncated series value with tail diagnostics."""

    value: float
    last_terms: tuple[float, float]
    tail_estimate: float   # from the ratio of the last two components
    tail_bound: float      # rigorous: sum_{m>M} (|x||y|)^m / m!
    flagged: bool

    def __float__(self):
        return self.value


def _exp_tail(r: float, M: int) -> float:
    term = r ** (M + 1) / math.factorial(M + 1)
    total, m = 0.0, M + 1
    while term > 1e-300 and m < M + 400:
        total += term
        m += 1
        term *= r / m
        if term < 1e-17 * total:
            break
    return total


def _tail_from_components(comps: np.ndarray, r: float, M: int, tol: float):
    last = float(comps[-1])
    prev = float(comps[-2]) if len(comps) > 1 else 0.0
    if last == 0.0:
        est = 0.0
    elif prev != 0.0 and abs(last) < abs(prev):
        rho = abs(last) / abs(prev)
        est = abs(last) * rho / (1.0 - rho)
    else:
        est = math.inf
    bound = _exp_tail(r, M)
    return (prev, last), est, bound, bound > tol


def oracle_E(k, mu: Sequence[float], lam: Sequence[float], M: int = 14,
             tol: float = 1e-8) -> SeriesValue:
    """Truncated Dunkl kernel ``sum_{m <= M} E_m(mu, lam)``."""
    series = _series_cached(_as_k(k), int(M))
    comps = series.component_values(mu, lam)
    r = float(np.linalg.norm(mu) * np.linalg.norm(lam))
    last, est, bound, flag = _tail_from_components(comps, r, M, tol)
    return SeriesValue(float(math.fsum(comps)), last, est, bound, flag)


def oracle_J(k, mu: Sequence[float], lam: Sequence[float], M: int = 14,
             tol: float = 1e-8) -> SeriesValue:
    """Symmetrisation of :func:`oracle_E` over the six permutations of ``mu``."""
    series = _series_cached(_as_k(k), int(M))
    comps = np.zeros(M + 1)
    for perm in PERMUTATIONS_3:
        comps += series.component_values(permute_point(perm, tuple(mu)), lam)
    comps /= 6.0
    r = float(np.linalg.norm(mu) * np.linalg.norm(lam))
    last, est, bound, flag = _tail_from_components(comps, r, M, tol)
    return SeriesValue(float(math.fsum(comps)), last, est, bound, flag)


def symmetrized_component(series: KernelSeries, m: int) -> RationalPoly:
    """``J_m(x, y) = (1/6) sum_sigma E_m(sigma.x, y)`` as a six-variable polynomial."""
    em = series.component_poly(m)
    total = RationalPoly(6)
    for perm in PERMUTATIONS_3:
        total = total + em.permute(perm)
    return total * mpq(1, 6)


# --------------------------------------------------------------------------
# gamma_k and Opdam's functional equation


def gamma_k(k) -> Rational:
    """Exact ``T_V(V)(0)``."""
    tv = apply_T_V_poly(_as_k(k), vandermonde_poly())
    if tv.degree > 0:
        raise ArithmeticError("T_V(V) should be a constant")
    return tv.coefficient((0, 0, 0))


def gamma_closed_form(k) -> Rational:
    """The closed form ``((2k+1)(3k+1)(3k+2))^{-1}`` as printed alongside ``T_V(V)(0)``."""
    k = _as_k(k)
    return 1 / ((2 * k + 1) * (3 * k + 1) * (3 * k + 2))


def antisymmetrization_constant(k) -> Rational:
    """Constant ``c`` with ``sum_sigma det(sigma) E(sigma.mu, lam) = c V(mu) V(lam) J_{k+1}``.

    Pairing the degree-3 antisymmetric part of the kernel with ``V`` gives
    ``c = 6 / T_V(V)(0)``.
    """
    return 6 / gamma_k(k)


def gamma_report(k) -> dict:
    """Compare the exact ``T_V(V)(0)`` with the printed closed form."""
    exact = gamma_k(k)
    printed = gamma_closed_form(k)
    if exact == printed:
        verdict = "match"
    elif exact * printed == 1:
        verdict = "reciprocal-match"
    else:
        verdict = "mismatch"
    ratio = exact * printed
    return {
        "k": str(_as_k(k)),
        "T_V(V)(0)": str(exact),
        "closed_form": str(printed),
        "verdict": verdict,
        "exact_times_closed_form": str(ratio),
        "antisymmetrization_constant": str(antisymmetrization_constant(k)),
        "closed_form_equals_antisymmetrization_constant": printed == antisymmetrization_constant(k),
    }


@dataclass
class OpdamReport:
    k: Rational
    max_degree: int
    gamma: Rational
    failing_degree: int | None
    checked_degrees: list[int]

    @property
    def ok(self) -> bool:
        return self.failing_degree is None


def verify_opdam(k, M: int) -> OpdamReport:
    """Exact check of ``T_V(J_{k+1}(., y) V)(x) = gamma_k J_k(x, y)`` degree by degree.

    The bidegree-``(m, m)`` part of both sides is compared for ``m <= M - 3``.
    """
    if M < 3:
        raise ValueError("M must be at least 3")
    k = _as_k(k)
    top = M - 3
    upper = _series_cached(k + 1, top)
    lower = _series_cached(k, top)
    g = gamma_k(k)
    V = vandermonde_poly(6)
    checked = []
    for m in range(top + 1):
        lhs = apply_T_V_poly(k, V * symmetrized_component(upper, m))
        rhs = symmetrized_component(lower, m) * g
        if lhs != rhs:
            return OpdamReport(k, M, g, m, checked)
        checked.append(m)
    return OpdamReport(k, M, g, None, checked)


def random_rationals(rng, count: int, lo: int = -9, hi: int = 9, den: int = 7) -> list[Rational]:
    return [mpq(int(rng.integers(lo * den, hi * den + 1)), int(rng.integers(1, den + 1)))
            for _ in range(count)]


def polys_equal_at(points: Iterable[Sequence], lhs, rhs) -> Rational:
    """Largest absolute exact difference of two callables over rational points."""
    worst = _ZERO
    for pt in points:
        d = abs(to_rational(lhs(*pt)) - to_rational(rhs(*pt)))
        if d > worst:
            worst = d
    return worst
