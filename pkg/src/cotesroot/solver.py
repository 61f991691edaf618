"""Recursive closed-rule iterative maps, compositions, and the outer loop.

The map with n+1 nodes is built bottom-up per evaluation point x: starting
from the Newton value y_0 = x - f(x)/f'(x), each level k takes the step
h_k = (y_{k-1} - x)/k, forms the weighted slope sum
B_k = sum_i A_i f'(x + i h_k) with the level-k rule weights, and sets
y_k = x - c_k f(x)/B_k.  Every level is computed exactly once, so one
application of the n-th map costs (n+1)(n+2)/2 slope evaluations.

``simpson_seed`` switches how the three-node level obtains its step: the
default "trapezoid" wiring (h_2 from y_1) is the properly recursive ladder
and carries the full order n+2; the "newton" wiring (h_2 from y_0) drops the
three-node level to third order but is the variant that generated the
published reference tables, so the table-reproduction layer selects it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import mpmath as mp

from .bigreal import BigReal, as_mpf, working_dps
from .errors import Breakdown, DomainError
from .expr import Expression, Jet2, _jet, _value
from .quadrature import MAX_RULE, builtin_rule

SEED_TRAPEZOID = "trapezoid"
SEED_NEWTON = "newton"

# termination kinds
CONVERGED = "converged"
MAX_ITERATIONS = "max_iterations"
BREAKDOWN = "breakdown"
DIVERGED = "diverged"

_RULES = [builtin_rule(n) for n in range(MAX_RULE + 1)]


@dataclass(frozen=True)
class MethodId:
    """Identity of an iterative map.

    ``outer`` alone names the basic map t_outer; with ``inner`` set the map
    is the composition t_outer(t_inner(x)) (inner applied first).  With
    ``transform`` every f/f' evaluation is replaced by the multiple-root
    transform F = -f/f' and its slope.
    """

    outer: int
    inner: Optional[int] = None
    transform: bool = False
    simpson_seed: str = SEED_TRAPEZOID

    def __post_init__(self):
        for idx in (self.outer, self.inner):
            if idx is not None and not 0 <= idx <= MAX_RULE:
                raise ValueError(f"map index must be in 0..{MAX_RULE}, got {idx}")
        if self.simpson_seed not in (SEED_TRAPEZOID, SEED_NEWTON):
            raise ValueError(f"unknown simpson_seed {self.simpson_seed!r}")

    @classmethod
    def basic(cls, n: int, **kw) -> "MethodId":
        return cls(n, **kw)

    @classmethod
    def composed(cls, i: int, j: int, **kw) -> "MethodId":
        return cls(i, inner=j, **kw)

    @classmethod
    def parse(cls, spec: str, simpson_seed: str = SEED_TRAPEZOID) -> "MethodId":
        """Parse "tN", "tI_J" (composition t_I o t_J), optional "+F" suffix."""
        text = spec.strip()
        transform = False
        if text.endswith("+F"):
            transform = True
            text = text[:-2]
        if not text.startswith("t"):
            raise ValueError(f"method spec must start with 't': {spec!r}")
        body = text[1:]
        try:
            if "_" in body:
                i, j = body.split("_")
                return cls(int(i), inner=int(j), transform=transform,
                           simpson_seed=simpson_seed)
            return cls(int(body), transform=transform, simpson_seed=simpson_seed)
        except ValueError as exc:
            raise ValueError(f"bad method spec {spec!r}") from exc

    def with_seed(self, simpson_seed: str) -> "MethodId":
        return replace(self, simpson_seed=simpson_seed)

    def __str__(self) -> str:
        body = f"t{self.outer}" if self.inner is None else f"t{self.outer}_{self.inner}"
        return body + ("+F" if self.transform else "")


@dataclass(frozen=True)
class ScalarProblem:
    """One scalar root-finding run: function, start, precision, stop rules."""

    f: Expression
    x0: BigReal
    precision: int = 50
    max_iter: int = 30
    step_tol: Optional[BigReal] = None
    residual_tol: Optional[BigReal] = None
    divergence_bound: Optional[BigReal] = None
    known_root: Optional[BigReal] = None

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        with mp.workdps(working_dps(self.precision)):
            default_tol = BigReal(mp.mpf(10) ** (10 - self.precision), self.precision)
            if self.step_tol is None:
                object.__setattr__(self, "step_tol", default_tol)
            if self.residual_tol is None:
                object.__setattr__(self, "residual_tol", default_tol)
            if self.divergence_bound is None:
                bound = mp.mpf(10) ** 6 * (1 + abs(as_mpf(self.x0)))
                object.__setattr__(self, "divergence_bound", BigReal(bound, self.precision))
        for name in ("step_tol", "residual_tol"):
            if getattr(self, name).value <= 0:
                raise ValueError(f"{name} must be positive")
        if self.divergence_bound.value <= abs(self.x0.value):
            raise ValueError("divergence_bound must exceed |x0|")


@dataclass(frozen=True)
class IterateRecord:
    """One trajectory entry: the iterate, its residual, the outgoing step."""

    k: int
    x: BigReal
    fx: Optional[BigReal]
    step: Optional[BigReal] = None  # x_{k+1} - x_k once the next iterate exists
    s: Optional[BigReal] = None  # significant digits against known_root


@dataclass(frozen=True)
class Termination:
    kind: str  # converged | max_iterations | breakdown | diverged
    detail: Optional[str] = None  # step/residual for converged, breakdown kind


@dataclass(frozen=True)
class Trajectory:
    method: MethodId
    iterates: tuple[IterateRecord, ...]
    termination: Termination

    @property
    def final(self) -> IterateRecord:
        return self.iterates[-1]

    def steps(self) -> list[BigReal]:
        return [r.step for r in self.iterates if r.step is not None]


class _PlainTarget:
    """(f, f') pairs straight from the expression jets."""

    def __init__(self, f: Expression):
        self.f = f
        self.jet_evals = 0

    def pair(self, x):
        self.jet_evals += 1
        v, d1, _ = _jet(self.f.root, x)
        return v, d1


class TransformedFunction:
    """Evaluator for the multiple-root transform F = -f/f'.

    F has a simple root wherever f has a multiple one (when f'' does not
    vanish there); its slope follows from the quotient rule:
    F' = f f''/(f')^2 - 1.  The removable 0/0 singularity at the multiple
    root itself is not patched: evaluation there raises DomainError.
    """

    def __init__(self, f: Expression):
        self.f = f
        self.jet_evals = 0

    def pair(self, x):
        self.jet_evals += 1
        v, d1, d2 = _jet(self.f.root, x)
        if d1 == 0:
            if v == 0:
                raise DomainError("transform is 0/0 at a root of both f and f'")
            raise Breakdown(Breakdown.ZERO_DERIVATIVE, "f' vanished under the transform")
        return -v / d1, v * d2 / (d1 * d1) - 1

    def __call__(self, x, precision: int) -> tuple[BigReal, BigReal]:
        with mp.workdps(working_dps(precision)):
            value, slope = self.pair(as_mpf(x))
        return BigReal(value, precision), BigReal(slope, precision)


def transform_function(f: Expression) -> TransformedFunction:
    return TransformedFunction(f)


def _ladder_full(n, target, x, simpson_seed, precision):
    """Map values y_0..y_n at x plus the weighted slope sums B_0..B_n.

    Raises Breakdown when a denominator vanishes: exactly-zero slope at the
    base point, or a slope sum more than ~precision digits below it.
    """
    fx, slope0 = target.pair(x)
    if slope0 == 0:
        raise Breakdown(Breakdown.ZERO_DERIVATIVE, "f' vanished at the base point")
    # cancellation trap for the weighted slope sums, relative to the slope
    # at this step's base point
    tiny = mp.mpf(10) ** (5 - precision) * abs(slope0)
    ys = [x - fx / slope0]
    sums = [slope0]
    for k in range(1, n + 1):
        rule = _RULES[k]
        base = ys[0] if (k == 2 and simpson_seed == SEED_NEWTON) else ys[k - 1]
        h = (base - x) / k
        acc = mp.mpf(0)
        for i, w in enumerate(rule.weights):
            _, slope = target.pair(x + i * h)
            acc += w * slope
        if acc == 0 or abs(acc) < tiny:
            raise Breakdown(
                Breakdown.ZERO_DENOMINATOR,
                f"weighted slope sum vanished at level {k}",
            )
        ys.append(x - rule.c * fx / acc)
        sums.append(acc)
    return ys, sums


def _ladder(n, target, x, simpson_seed, precision):
    return _ladder_full(n, target, x, simpson_seed, precision)[0]


def apply_t0(x: BigReal, jet: Jet2) -> BigReal:
    """One Newton step from a precomputed jet."""
    precision = max(x.precision, jet.f.precision)
    with mp.workdps(working_dps(precision)):
        if jet.d1.value == 0:
            raise Breakdown(Breakdown.ZERO_DERIVATIVE, "f' vanished at the base point")
        return BigReal(x.value - jet.f.value / jet.d1.value, precision)


def apply_tn(
    n: int,
    f: Expression,
    x,
    precision: int,
    *,
    simpson_seed: str = SEED_TRAPEZOID,
    transform: bool = False,
) -> BigReal:
    """One application of the map with n+1 nodes at x."""
    if not 0 <= n <= MAX_RULE:
        raise ValueError(f"map index must be in 0..{MAX_RULE}, got {n}")
    target = TransformedFunction(f) if transform else _PlainTarget(f)
    with mp.workdps(working_dps(precision)):
        ys = _ladder(n, target, as_mpf(x), simpson_seed, precision)
    return BigReal(ys[n], precision)


def apply_method(m: MethodId, f: Expression, x, precision: int) -> BigReal:
    """One application of a basic or composed map (inner map first)."""
    target = TransformedFunction(f) if m.transform else _PlainTarget(f)
    with mp.workdps(working_dps(precision)):
        point = as_mpf(x)
        if m.inner is not None:
            point = _ladder(m.inner, target, point, m.simpson_seed, precision)[m.inner]
        result = _ladder(m.outer, target, point, m.simpson_seed, precision)[m.outer]
    return BigReal(result, precision)


def iterate(problem: ScalarProblem, m: MethodId) -> Trajectory:
    """Run the outer iteration until a stop rule fires.

    Stops on small step, small residual, iteration budget, the divergence
    bound, or a recorded breakdown (vanishing denominator / domain exit).
    Breakdowns terminate the trajectory; they are never raised to the caller.
    """
    precision = problem.precision
    target = TransformedFunction(problem.f) if m.transform else _PlainTarget(problem.f)
    root_node = problem.f.root

    with mp.workdps(working_dps(precision)):
        x = as_mpf(problem.x0)
        step_tol = as_mpf(problem.step_tol)
        residual_tol = as_mpf(problem.residual_tol)
        bound = as_mpf(problem.divergence_bound)
        root = as_mpf(problem.known_root) if problem.known_root is not None else None

        def sdigits(value):
            if root is None:
                return None
            err = abs(root - value)
            if err == 0:
                return BigReal(mp.mpf(precision), precision)
            return BigReal(-mp.log10(err), precision)

        def wrap(value):
            return BigReal(value, precision)

        records: list[IterateRecord] = []

        try:
            fx = _value(root_node, x)
        except DomainError:
            return Trajectory(m, (IterateRecord(0, wrap(x), None, s=sdigits(x)),),
                              Termination(BREAKDOWN, "domain"))
        records.append(IterateRecord(0, wrap(x), wrap(fx), s=sdigits(x)))
        if abs(fx) < residual_tol:
            return Trajectory(m, tuple(records), Termination(CONVERGED, "residual"))

        termination = Termination(MAX_ITERATIONS)
        for k in range(1, problem.max_iter + 1):
            try:
                if m.inner is not None:
                    mid = _ladder(m.inner, target, x, m.simpson_seed, precision)[m.inner]
                    xn = _ladder(m.outer, target, mid, m.simpson_seed, precision)[m.outer]
                else:
                    xn = _ladder(m.outer, target, x, m.simpson_seed, precision)[m.outer]
            except Breakdown as exc:
                termination = Termination(BREAKDOWN, exc.kind)
                break
            except DomainError:
                termination = Termination(BREAKDOWN, "domain")
                break

            step = xn - x
            records[-1] = replace(records[-1], step=wrap(step))
            try:
                fxn = _value(root_node, xn)
            except DomainError:
                records.append(IterateRecord(k, wrap(xn), None, s=sdigits(xn)))
                termination = Termination(BREAKDOWN, "domain")
                break
            records.append(IterateRecord(k, wrap(xn), wrap(fxn), s=sdigits(xn)))
            x = xn

            if abs(xn) > bound:
                termination = Termination(DIVERGED)
                break
            if abs(step) < step_tol:
                termination = Termination(CONVERGED, "step")
                break
            if abs(fxn) < residual_tol:
                termination = Termination(CONVERGED, "residual")
                break

    return Trajectory(m, tuple(records), termination)
