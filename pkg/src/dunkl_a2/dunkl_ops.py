"""Dunkl operators of type A2 applied to black-box scalar fields.

``T_i f(x) = d_i f(x) + k sum_{j != i} (f(x) - f(s_ij x)) / (x_i - x_j)``.

The partial derivative is a fourth-order central difference with one
Richardson step; the reflection terms are exact differences of field values.
When ``x_i`` and ``x_j`` nearly coincide the quotient is replaced by its limit,
the derivative of ``f`` along ``e_i - e_j`` at the midpoint of ``x`` and
``s_ij x``.

A field is any callable on a length-3 array.  Wrapping it in
:class:`ScalarField` with a ``batch`` evaluator lets a whole stencil go
through one vectorized call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from . import poly_oracle as po

DEFAULT_REL_STEP = 1e-4
SWAP_REL_TOL = 1e-6
T_V_REL_STEP = 1e-3


@dataclass(frozen=True)
class ScalarField:
    func: Callable[[np.ndarray], float]
    batch: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, x) -> float:
        return float(self.func(np.asarray(x, dtype=float)))

    def many(self, points: np.ndarray) -> np.ndarray:
        if self.batch is not None:
            return np.asarray(self.batch(points), dtype=float)
        return np.array([self.func(p) for p in points], dtype=float)


def as_field(f) -> ScalarField:
    return f if isinstance(f, ScalarField) else ScalarField(f)


def kernel_field(k, lam, n_nodes: int = kernels.DEFAULT_NODES) -> ScalarField:
    """``x -> E_k(x, lam)`` with batched stencil evaluation."""
    return ScalarField(lambda x: kernels.dunkl_E(k, x, lam, n_nodes),
                       lambda pts: kernels.dunkl_E_batch(k, pts, lam, n_nodes))


def polynomial_field(p: po.RationalPoly) -> ScalarField:
    """Float evaluation of a polynomial in the first three variables."""
    exps = np.array(list(p.terms.keys()), dtype=float).reshape(-1, p.nvars)[:, :3]
    coeffs = np.array([float(c) for c in p.terms.values()])

    def batch(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.prod(pts[:, None, :] ** exps[None, :, :], axis=2) @ coeffs

    return ScalarField(lambda x: float(batch(x)[0]), batch)


def _swap(x: np.ndarray, i: int, j: int) -> np.ndarray:
    y = x.copy()
    y[i], y[j] = x[j], x[i]
    return y


# central differences: f'(0) ~ (8(f(h) - f(-h)) - (f(2h) - f(-2h))) / (12 h)
_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_COEFFS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0


def _stencil(x: np.ndarray, direction: np.ndarray, h: float) -> np.ndarray:
    """Points for the Richardson pair of fourth-order stencils (steps ``h`` and ``h/2``)."""
    offs = np.concatenate([_OFFSETS * h, _OFFSETS * h / 2.0])
    return x[None, :] + offs[:, None] * direction[None, :]


def _derivative(vals: np.ndarray, h: float) -> float:
    d_h = float(np.dot(_COEFFS, vals[:4])) / h
    d_half = float(np.dot(_COEFFS, vals[4:])) / (h / 2.0)
    return (16.0 * d_half - d_h) / 15.0


def _check_index(i: int) -> int:
    if i not in (1, 2, 3):
        raise ValueError("Dunkl operator index must be 1, 2 or 3")
    return i - 1


def default_step(x) -> float:
    return DEFAULT_REL_STEP * (1.0 + float(np.linalg.norm(x)))


def _plan(i0: int, x: np.ndarray, h: float):
    """All points one ``T_i`` needs, and a function turning their values into ``T_i f(x)``."""
    unit = np.zeros(3)
    unit[i0] = 1.0
    blocks = [_stencil(x, unit, h)]
    kinds = []
    delta = SWAP_REL_TOL * (1.0 + float(np.linalg.norm(x)))
    for j in range(3):
        if j == i0:
            continue
        gap = x[i0] - x[j]
        if abs(gap) > delta:
            blocks.append(np.stack([x, _swap(x, i0, j)]))
            kinds.append(("quotient", gap))
        else:
            mid = (x + _swap(x, i0, j)) / 2.0
            u = np.zeros(3)
            u[i0], u[j] = 1.0, -1.0
            blocks.append(_stencil(mid, u, h))
            kinds.append(("limit", None))
    points = np.concatenate(blocks)

    def combine(vals: np.ndarray, k: float) -> float:
        total = _derivative(vals[:8], h)
        pos = 8
        for kind, gap in kinds:
            if kind == "quotient":
                total += k * (vals[pos] - vals[pos + 1]) / gap
                pos += 2
            else:
                total += k * _derivative(vals[pos:pos + 8], h)
                pos += 8
        return total

    return points, combine


def apply_dunkl_T(i: int, k, f, x: Sequence[float], h: float | None = None) -> float:
    """``T_i f(x)`` for ``i`` in ``{1, 2, 3}``."""
    i0 = _check_index(i)
    x = np.asarray(x, dtype=float)
    h = default_step(x) if h is None else float(h)
    if not h > 0:
        raise ValueError("step h must be positive")
    field = as_field(f)
    points, combine = _plan(i0, x, h)
    vals = field.many(points)
    if not np.all(np.isfinite(vals)):
        raise ArithmeticError("field is not finite on the stencil")
    return combine(vals, float(k))


def apply_dunkl_T_all(k, f, x: Sequence[float], h: float | None = None) -> np.ndarray:
    """``(T_1 f(x), T_2 f(x), T_3 f(x))`` from a single batched field call."""
    x = np.asarray(x, dtype=float)
    h = default_step(x) if h is None else float(h)
    field = as_field(f)
    plans = [_plan(i0, x, h) for i0 in range(3)]
    vals = field.many(np.concatenate([p for p, _ in plans]))
    if not np.all(np.isfinite(vals)):
        raise ArithmeticError("field is not finite on the stencil")
    out = []
    pos = 0
    for points, combine in plans:
        out.append(combine(vals[pos:pos + len(points)], float(k)))
        pos += len(points)
    return np.array(out)


def residual_scale(value: float) -> float:
    return max(1.0, abs(value))


def verify_eigen(k, mu, lam, h: float | None = None,
                 n_nodes: int = kernels.DEFAULT_NODES) -> tuple[float, float, float]:
    """Residuals of ``T_i E_k(., lam)(mu) = lam_i E_k(mu, lam)``.

    Each residual is divided by ``max(1, |E_k(mu, lam)| max(1, |lam|))``.
    """
    k = kernels.check_k(k)
    lam = kernels.check_chamber(lam)
    mu = kernels.check_point(mu)
    field = kernel_field(k, lam, n_nodes)
    T = apply_dunkl_T_all(k, field, mu, h)
    E = field(mu)
    scale = residual_scale(E * max(1.0, float(np.linalg.norm(lam))))
    return tuple(float(abs(T[i] - lam[i] * E) / scale) for i in range(3))


@dataclass(frozen=True)
class LemmaCoefficients:
    alpha: float
    beta: float

    @classmethod
    def from_lambda(cls, lam) -> "LemmaCoefficients":
        alpha, beta = kernels.lemma_coefficients(lam)
        return cls(alpha, beta)


def apply_lemma_T(k, lam, f, mu, h: float | None = None) -> float:
    """``(alpha(lam) T_1 + beta(lam) T_2 + 1) f`` at ``mu``."""
    coeffs = LemmaCoefficients.from_lambda(lam)
    field = as_field(f)
    T = apply_dunkl_T_all(k, field, mu, h)
    return coeffs.alpha * T[0] + coeffs.beta * T[1] + field(mu)


def lemma_field(k, lam, n_nodes: int = kernels.DEFAULT_NODES) -> ScalarField:
    """``g = (c/6) V(lam) V(.) J_{k+1}(., lam) + J_k(., lam)``.

    ``c`` is the constant of the antisymmetrization identity, taken exactly
    from :func:`poly_oracle.antisymmetrization_constant`.
    """
    k = kernels.check_k(k)
    lam = kernels.check_chamber(lam)
    c = float(po.antisymmetrization_constant(po.to_rational(k)))
    Vl = kernels.vandermonde(lam)

    def batch(pts):
        pts = np.atleast_2d(pts)
        Vx = (pts[:, 0] - pts[:, 1]) * (pts[:, 0] - pts[:, 2]) * (pts[:, 1] - pts[:, 2])
        return (c / 6.0 * Vl * Vx * kernels.gen_bessel_J_batch(k + 1.0, pts, lam, n_nodes)
                + kernels.gen_bessel_J_batch(k, pts, lam, n_nodes))

    return ScalarField(lambda x: float(batch(x)[0]), batch)


def lemma_residual(k, mu, lam, h: float | None = None, n_nodes: int = kernels.DEFAULT_NODES) -> float:
    """``|T g(mu) - E_k(mu, lam)| / max(1, |E_k(mu, lam)|)``."""
    got = apply_lemma_T(k, lam, lemma_field(k, lam, n_nodes), mu, h)
    want = kernels.dunkl_E(k, mu, lam, n_nodes)
    return abs(got - want) / residual_scale(want)


def _difference_field(k, f: ScalarField, i: int, j: int, h: float) -> ScalarField:
    """The field ``x -> (T_i - T_j) f(x)``."""
    def func(x):
        x = np.asarray(x, dtype=float)
        return apply_dunkl_T(i, k, f, x, h) - apply_dunkl_T(j, k, f, x, h)
    return ScalarField(func)


def apply_T_V(k, f, x, h: float | None = None) -> float:
    """``(T_1 - T_2)(T_2 - T_3)(T_1 - T_3) f`` at ``x`` by nested differencing.

    Accuracy is limited to roughly 1e-4 relative; exact checks belong to the
    polynomial oracle.
    """
    x = np.asarray(x, dtype=float)
    h = T_V_REL_STEP * (1.0 + float(np.linalg.norm(x))) if h is None else float(h)
    field = as_field(f)
    inner = _difference_field(k, field, 1, 3, h)
    middle = _difference_field(k, inner, 2, 3, h)
    return apply_dunkl_T(1, k, middle, x, h) - apply_dunkl_T(2, k, middle, x, h)
