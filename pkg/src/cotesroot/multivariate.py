"""Dense d-dimensional Newton, Newton-trapezoidal, and Newton-Simpson steps.

Vector functions are caller-supplied callables (residual and Jacobian); no
parsing happens at this level.  Linear systems are solved by LU with partial
pivoting at the working precision.  The trapezoidal predictor step is taken
as h1 = -J(x)^-1 F(x), the sign that makes the d=1 case collapse to the
scalar two-node map.
"""

from __future__ import annotations

import mpmath as mp

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .bigreal import BigReal, as_mpf, working_dps
from .errors import DomainError, SingularMatrix
from .solver import BREAKDOWN, CONVERGED, DIVERGED, MAX_ITERATIONS, Termination

KIND_NEWTON = "newton"
KIND_TRAPEZOIDAL = "trapezoidal"
KIND_SIMPSON = "simpson"
KINDS = (KIND_NEWTON, KIND_TRAPEZOIDAL, KIND_SIMPSON)


@dataclass(frozen=True)
class VectorFunction:
    """Residual and Jacobian evaluators for a map R^d -> R^d."""

    dimension: int
    residual: Callable[[Sequence], Sequence]
    jacobian: Callable[[Sequence], Sequence]


@dataclass(frozen=True)
class VectorIterateRecord:
    k: int
    x: tuple[BigReal, ...]
    residual_norm: Optional[BigReal]
    step_norm: Optional[BigReal] = None


@dataclass(frozen=True)
class VectorTrajectory:
    kind: str
    iterates: tuple[VectorIterateRecord, ...]
    termination: Termination

    @property
    def final(self) -> VectorIterateRecord:
        return self.iterates[-1]


def _as_vector(values, d) -> list[mp.mpf]:
    out = [as_mpf(v) for v in values]
    if len(out) != d:
        raise ValueError(f"expected a vector of length {d}, got {len(out)}")
    return out


def _as_matrix(rows, d) -> list[list[mp.mpf]]:
    out = [[as_mpf(v) for v in row] for row in rows]
    if len(out) != d or any(len(row) != d for row in out):
        raise ValueError(f"expected a {d}x{d} matrix")
    return out


def _max_norm(vec) -> mp.mpf:
    return max(abs(v) for v in vec) if vec else mp.mpf(0)


def _lu_solve(matrix, rhs, precision):
    """Ax = b by LU with partial pivoting; raises SingularMatrix on tiny pivots."""
    d = len(rhs)
    a = [row[:] for row in matrix]
    b = rhs[:]
    scale = max((abs(v) for row in a for v in row), default=mp.mpf(0))
    threshold = mp.mpf(10) ** (5 - precision) * scale
    for col in range(d):
        pivot_row = max(range(col, d), key=lambda r: abs(a[r][col]))
        if abs(a[pivot_row][col]) <= threshold:
            raise SingularMatrix(f"pivot below threshold in column {col}")
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            b[col], b[pivot_row] = b[pivot_row], b[col]
        inv = 1 / a[col][col]
        for row in range(col + 1, d):
            factor = a[row][col] * inv
            if factor == 0:
                continue
            for j in range(col, d):
                a[row][j] -= factor * a[col][j]
            b[row] -= factor * b[col]
    x = [mp.mpf(0)] * d
    for row in range(d - 1, -1, -1):
        acc = b[row]
        for j in range(row + 1, d):
            acc -= a[row][j] * x[j]
        x[row] = acc / a[row][row]
    return x


def solve_linear(matrix, rhs, precision: int) -> list[BigReal]:
    """Solve a dense square system at the given working precision."""
    with mp.workdps(working_dps(precision)):
        d = len(rhs)
        a = _as_matrix(matrix, d)
        b = _as_vector(rhs, d)
        x = _lu_solve(a, b, precision)
        return [BigReal(v, precision) for v in x]


def _step_raw(kind, func, x, precision):
    d = func.dimension
    fx = _as_vector(func.residual(x), d)
    j0 = _as_matrix(func.jacobian(x), d)
    if kind == KIND_NEWTON:
        s = _lu_solve(j0, fx, precision)
        return [xi - si for xi, si in zip(x, s)]
    if kind == KIND_TRAPEZOIDAL:
        return _trapezoid_raw(func, x, fx, j0, precision)
    if kind == KIND_SIMPSON:
        t1 = _trapezoid_raw(func, x, fx, j0, precision)
        h2 = [(t - xi) / 2 for t, xi in zip(t1, x)]
        jm = _as_matrix(func.jacobian([xi + hi for xi, hi in zip(x, h2)]), d)
        jf = _as_matrix(func.jacobian([xi + 2 * hi for xi, hi in zip(x, h2)]), d)
        total = [
            [j0[r][c] + 4 * jm[r][c] + jf[r][c] for c in range(d)] for r in range(d)
        ]
        u = _lu_solve(total, fx, precision)
        return [xi - 6 * ui for xi, ui in zip(x, u)]
    raise ValueError(f"unknown step kind {kind!r}")


def _trapezoid_raw(func, x, fx, j0, precision):
    d = func.dimension
    h1 = [-v for v in _lu_solve(j0, fx, precision)]
    j1 = _as_matrix(func.jacobian([xi + hi for xi, hi in zip(x, h1)]), d)
    total = [[j0[r][c] + j1[r][c] for c in range(d)] for r in range(d)]
    u = _lu_solve(total, fx, precision)
    return [xi - 2 * ui for xi, ui in zip(x, u)]


def nd_step(kind: str, func: VectorFunction, x, precision: int) -> list[BigReal]:
    """One step of the chosen kind from x."""
    with mp.workdps(working_dps(precision)):
        point = _as_vector(x, func.dimension)
        result = _step_raw(kind, func, point, precision)
        return [BigReal(v, precision) for v in result]


def nd_iterate(
    func: VectorFunction,
    x0,
    kind: str = KIND_NEWTON,
    precision: int = 50,
    max_iter: int = 30,
    step_tol=None,
    residual_tol=None,
    divergence_bound=None,
) -> VectorTrajectory:
    """Outer loop around nd_step with max-norm stopping rules."""
    if kind not in KINDS:
        raise ValueError(f"unknown step kind {kind!r}")
    with mp.workdps(working_dps(precision)):
        x = _as_vector(x0, func.dimension)
        default_tol = mp.mpf(10) ** (10 - precision)
        stol = as_mpf(step_tol) if step_tol is not None else default_tol
        rtol = as_mpf(residual_tol) if residual_tol is not None else default_tol
        bound = (
            as_mpf(divergence_bound)
            if divergence_bound is not None
            else mp.mpf(10) ** 6 * (1 + _max_norm(x))
        )

        def wrap_point(vec):
            return tuple(BigReal(v, precision) for v in vec)

        records: list[VectorIterateRecord] = []
        try:
            fx = _as_vector(func.residual(x), func.dimension)
        except DomainError:
            return VectorTrajectory(
                kind,
                (VectorIterateRecord(0, wrap_point(x), None),),
                Termination(BREAKDOWN, "domain"),
            )
        records.append(
            VectorIterateRecord(0, wrap_point(x), BigReal(_max_norm(fx), precision))
        )
        if _max_norm(fx) < rtol:
            return VectorTrajectory(kind, tuple(records), Termination(CONVERGED, "residual"))

        termination = Termination(MAX_ITERATIONS)
        for k in range(1, max_iter + 1):
            try:
                xn = _step_raw(kind, func, x, precision)
                fxn = _as_vector(func.residual(xn), func.dimension)
            except SingularMatrix:
                termination = Termination(BREAKDOWN, "singular_matrix")
                break
            except DomainError:
                termination = Termination(BREAKDOWN, "domain")
                break
            step_norm = _max_norm([a - b for a, b in zip(xn, x)])
            records.append(
                VectorIterateRecord(
                    k,
                    wrap_point(xn),
                    BigReal(_max_norm(fxn), precision),
                    BigReal(step_norm, precision),
                )
            )
            x = xn
            if _max_norm(xn) > bound:
                termination = Termination(DIVERGED)
                break
            if step_norm < stol:
                termination = Termination(CONVERGED, "step")
                break
            if _max_norm(fxn) < rtol:
                termination = Termination(CONVERGED, "residual")
                break
    return VectorTrajectory(kind, tuple(records), termination)


@dataclass(frozen=True)
class DemoSystem:
    """A built-in demonstration system for the command line."""

    name: str
    function: VectorFunction
    x0: tuple[str, ...]
    reference: Optional[tuple[str, ...]]


def demo_system(name: str) -> DemoSystem:
    if name == "affine":
        a = ((3, 1), (1, 2))
        b = (5, 5)

        def residual(p):
            return [sum(as_mpf(c) * v for c, v in zip(row, p)) - rhs
                    for row, rhs in zip(a, b)]

        def jacobian(p):
            return a

        return DemoSystem(name, VectorFunction(2, residual, jacobian), ("0", "0"), ("1", "2"))
    if name == "circle-line":

        def residual(p):
            x, y = p
            return [x * x + y * y - 1, x - y]

        def jacobian(p):
            x, y = p
            return [[2 * x, 2 * y], [1, -1]]

        return DemoSystem(name, VectorFunction(2, residual, jacobian), ("1", "0.5"), None)
    raise ValueError(f"unknown demo system {name!r}; choose 'affine' or 'circle-line'")
