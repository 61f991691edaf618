from fractions import Fraction

import mpmath as mp
import pytest

from cotesroot import (
    Breakdown,
    DomainError,
    MethodId,
    ScalarProblem,
    bigreal,
    eval_jet,
    parse,
    transform_function,
)
from cotesroot.solver import (
    BREAKDOWN,
    CONVERGED,
    DIVERGED,
    MAX_ITERATIONS,
    SEED_NEWTON,
    _PlainTarget,
    _ladder_full,
    apply_method,
    apply_t0,
    apply_tn,
    iterate,
)


def close_to_fraction(value, frac, precision, slack=3):
    with mp.workdps(precision + 10):
        target = mp.mpf(frac.numerator) / frac.denominator
        return abs(value.value - target) < mp.mpf(10) ** (slack - precision)


# ------------------------------------------------------------- MethodId

def test_method_parse_roundtrip():
    assert str(MethodId.parse("t3")) == "t3"
    assert str(MethodId.parse("t7_6")) == "t7_6"
    assert str(MethodId.parse("t2+F")) == "t2+F"
    assert str(MethodId.parse("t1_2+F")) == "t1_2+F"
    m = MethodId.parse("t7_6")
    assert m.outer == 7 and m.inner == 6 and not m.transform


@pytest.mark.parametrize("bad", ["", "s2", "t8", "t-1", "tx", "t1_9", "t12"])
def test_method_parse_rejects(bad):
    with pytest.raises(ValueError):
        MethodId.parse(bad)


def test_method_seed_validation():
    with pytest.raises(ValueError):
        MethodId(2, simpson_seed="midpoint")
    assert MethodId(2).with_seed(SEED_NEWTON).simpson_seed == SEED_NEWTON


def test_apply_tn_rejects_out_of_range_index():
    f = parse("x^2-2")
    for n in (-1, 8):
        with pytest.raises(ValueError):
            apply_tn(n, f, bigreal("1.5", 40), 40)


# ------------------------------------------------------------- one step

def test_newton_step_on_square():
    f = parse("x^2-4")
    x = bigreal(3, 50)
    jet = eval_jet(f, x, 50)
    assert close_to_fraction(apply_t0(x, jet), Fraction(13, 6), 50)


def test_newton_step_on_cbrt_doubles_and_flips():
    f = parse("cbrt(x)")
    with mp.workdps(60):
        for a in ("0.7", "-1.3", "4"):
            x = bigreal(a, 50)
            got = apply_t0(x, eval_jet(f, x, 50))
            assert abs(got.value - (-2 * x.value)) < mp.mpf(10) ** -45


def test_newton_step_exact_on_affine():
    f = parse("3*x-7")
    x = bigreal("11.25", 50)
    assert close_to_fraction(apply_t0(x, eval_jet(f, x, 50)), Fraction(7, 3), 50)


def test_newton_step_zero_derivative():
    f = parse("x^2-4")
    x = bigreal(0, 50)
    with pytest.raises(Breakdown) as err:
        apply_t0(x, eval_jet(f, x, 50))
    assert err.value.kind == Breakdown.ZERO_DERIVATIVE


def test_two_node_map_on_square():
    # h = -5/6, B = 6 + 13/3 = 31/3, t1 = 3 - 2*5/(31/3) = 63/31
    got = apply_tn(1, parse("x^2-4"), bigreal(3, 60), 60)
    assert close_to_fraction(got, Fraction(63, 31), 60)


def test_level_zero_reduces_to_newton():
    f = parse("tanh(x-1)")
    x = bigreal("1.37", 50)
    a = apply_tn(0, f, x, 50)
    b = apply_t0(x, eval_jet(f, x, 50))
    assert a.value == b.value


def test_two_node_map_exact_on_affine():
    got = apply_tn(1, parse("3*x-7"), bigreal(40, 50), 50)
    assert close_to_fraction(got, Fraction(7, 3), 50)


@pytest.mark.parametrize("n", range(8))
def test_slope_evaluation_count(n):
    target = _PlainTarget(parse("x^3+2*x-5"))
    with mp.workdps(60):
        _ladder_full(n, target, mp.mpf("1.4"), "trapezoid", 50)
    assert target.jet_evals == (n + 1) * (n + 2) // 2


def test_composed_two_newton_steps():
    # t0(t0(3)) on x^2-4: t0(13/6) = 13/6 - (25/36)/(13/3) = 313/156
    got = apply_method(MethodId.composed(0, 0), parse("x^2-4"), bigreal(3, 60), 60)
    assert close_to_fraction(got, Fraction(313, 156), 60)


def test_composition_applies_inner_first():
    f = parse("tanh(x-1)")
    x = bigreal("1.1", 80)
    inner = apply_tn(6, f, x, 80)
    direct = apply_tn(7, f, inner, 80)
    composed = apply_method(MethodId.composed(7, 6), f, x, 80)
    assert abs(composed.value - direct.value) < mp.mpf(10) ** -75


# ------------------------------------------------------------- transform

def test_transform_of_square():
    F = transform_function(parse("x^2"))
    with mp.workdps(60):
        for x in ("0.8", "-2.5"):
            val, slope = F(bigreal(x, 50), 50)
            assert abs(val.value - (-mp.mpf(x) / 2)) < mp.mpf(10) ** -45
            assert abs(slope.value - mp.mpf("-0.5")) < mp.mpf(10) ** -45


def test_transform_of_cbrt_is_minus_3x():
    F = transform_function(parse("cbrt(x)"))
    with mp.workdps(60):
        val, slope = F(bigreal("0.5", 50), 50)
        assert abs(val.value + mp.mpf("1.5")) < mp.mpf(10) ** -45
        assert abs(slope.value + 3) < mp.mpf(10) ** -45


def test_transform_slope_limit_at_multiple_root():
    # f = sin(x) - x has a triple root at 0; F = -f/f' has slope -> -1/3
    F = transform_function(parse("sin(x)-x"))
    _, slope = F(bigreal("1e-8", 60), 60)
    assert abs(slope.value + mp.mpf(1) / 3) < 1e-14  # magnitude 1/3


def test_transform_errors():
    F = transform_function(parse("x^2"))
    with pytest.raises(DomainError):  # f = f' = 0: removable 0/0, not patched
        F(bigreal(0, 50), 50)
    G = transform_function(parse("x^2-4"))
    with pytest.raises(Breakdown) as err:  # f' = 0 while f != 0
        G(bigreal(0, 50), 50)
    assert err.value.kind == Breakdown.ZERO_DERIVATIVE


def test_transformed_cbrt_one_application_hits_zero():
    f = parse("cbrt(x)")
    m = MethodId.basic(0, transform=True)
    for x0 in ("0.5", "-3", "100"):
        got = apply_method(m, f, bigreal(x0, 50), 50)
        assert abs(got.value) < mp.mpf(10) ** -50 * abs(mp.mpf(x0))


# ------------------------------------------------------------- ladder guards

class _StubTarget:
    """Slope flips sign away from the base point: forces a vanishing sum."""

    def __init__(self, base):
        self.base = base

    def pair(self, x):
        return (mp.mpf(1), mp.mpf(1) if x == self.base else mp.mpf(-1))


def test_zero_denominator_guard():
    with mp.workdps(60):
        base = mp.mpf("0.3")
        with pytest.raises(Breakdown) as err:
            _ladder_full(1, _StubTarget(base), base, "trapezoid", 50)
    assert err.value.kind == Breakdown.ZERO_DENOMINATOR


# ------------------------------------------------------------- iterate

def test_iterate_square_root_of_two():
    problem = ScalarProblem(parse("x^2-2"), bigreal("1.5", 60), precision=60)
    traj = iterate(problem, MethodId.basic(0))
    assert traj.termination.kind == CONVERGED
    with mp.workdps(130):
        reference = mp.sqrt(2)  # independent 2x-precision oracle
        assert abs(traj.final.x.value - reference) < mp.mpf(10) ** -49


def test_iterate_records_steps_and_s():
    root = bigreal(1, 40)
    problem = ScalarProblem(
        parse("tanh(x-1)"), bigreal(2, 40), precision=40, known_root=root
    )
    traj = iterate(problem, MethodId.basic(2))
    assert traj.termination.kind == CONVERGED
    xs = [r.x.value for r in traj.iterates]
    with mp.workdps(50 + 10):  # the solver's internal working precision
        for rec in traj.iterates[:-1]:
            assert rec.step is not None
            assert rec.step.value == xs[rec.k + 1] - xs[rec.k]
    s_values = [float(r.s) for r in traj.iterates]
    assert s_values == sorted(s_values)  # monotone error decrease here


def test_iterate_flat_tail_diverges():
    for x0 in (-5, 3):
        problem = ScalarProblem(parse("tanh(x-1)"), bigreal(x0, 30), precision=30)
        traj = iterate(problem, MethodId.basic(0))
        assert traj.termination.kind == DIVERGED


def test_iterate_repelling_fixed_point_diverges():
    problem = ScalarProblem(parse("cbrt(x)"), bigreal("0.5", 40), precision=40)
    traj = iterate(problem, MethodId.basic(0))
    assert traj.termination.kind == DIVERGED
    # |t0'(0)| = 2: each application doubles the distance
    xs = [r.x.value for r in traj.iterates]
    assert abs(xs[1] + 2 * xs[0]) < mp.mpf(10) ** -35


def test_iterate_transformed_cbrt_converges():
    problem = ScalarProblem(parse("cbrt(x)"), bigreal("0.5", 50), precision=50)
    traj = iterate(problem, MethodId.basic(0, transform=True))
    assert traj.termination.kind == CONVERGED
    assert len(traj.iterates) <= 4
    assert abs(traj.final.x.value) < mp.mpf(10) ** -40


def test_iterate_converged_at_start():
    problem = ScalarProblem(parse("x^2-4"), bigreal(2, 40), precision=40)
    traj = iterate(problem, MethodId.basic(0))
    assert traj.termination == (traj.termination.__class__(CONVERGED, "residual"))
    assert len(traj.iterates) == 1
    assert traj.steps() == []


def test_iterate_domain_exit_records_breakdown():
    problem = ScalarProblem(parse("log(x)"), bigreal(3, 40), precision=40)
    traj = iterate(problem, MethodId.basic(0))
    assert traj.termination.kind == BREAKDOWN
    assert traj.termination.detail == "domain"


def test_iterate_zero_derivative_breakdown():
    problem = ScalarProblem(parse("x^2-4"), bigreal(0, 40), precision=40)
    traj = iterate(problem, MethodId.basic(0))
    assert traj.termination.kind == BREAKDOWN
    assert traj.termination.detail == Breakdown.ZERO_DERIVATIVE


def test_iterate_max_iterations():
    problem = ScalarProblem(parse("sin(x)-x"), bigreal("0.1", 40), precision=40,
                            max_iter=3)
    traj = iterate(problem, MethodId.basic(0))
    assert traj.termination.kind == MAX_ITERATIONS
    assert len(traj.iterates) == 4


def test_problem_validation():
    f = parse("x^2-2")
    with pytest.raises(ValueError):
        ScalarProblem(f, bigreal(1, 40), precision=0)
    with pytest.raises(ValueError):
        ScalarProblem(f, bigreal(1, 40), precision=40, max_iter=0)
    with pytest.raises(ValueError):
        ScalarProblem(f, bigreal(1, 40), precision=40,
                      divergence_bound=bigreal("0.5", 40))


# ------------------------------------------------------------- properties

SUPERLINEAR_CASES = [("x^2-4", "2"), ("tanh(x-1)", "1")]


@pytest.mark.parametrize("text,root", SUPERLINEAR_CASES)
@pytest.mark.parametrize("n", range(8))
@pytest.mark.parametrize("d", [5, 10, 20])
def test_one_application_is_superlinear(text, root, n, d):
    precision = 120
    f = parse(text)
    with mp.workdps(precision + 10):
        z = mp.mpf(root)
        x = bigreal(z + mp.mpf(10) ** -d, precision)
        got = apply_tn(n, f, x, precision)
        assert abs(got.value - z) < mp.mpf(10) ** (-(2 * d - 2))


def test_scaling_function_leaves_iterates_bit_identical():
    # the maps are invariant under f -> c f; for power-of-two c the floating
    # point trajectories agree bit for bit
    base = parse("tanh(x-1)")
    for lam in ("4", "0.25", "-8"):
        scaled = parse(f"{lam}*(tanh(x-1))")
        p1 = ScalarProblem(base, bigreal("1.5", 50), precision=50)
        p2 = ScalarProblem(scaled, bigreal("1.5", 50), precision=50)
        t1 = iterate(p1, MethodId.basic(2))
        t2 = iterate(p2, MethodId.basic(2))
        assert [r.x.decimal() for r in t1.iterates] == [r.x.decimal() for r in t2.iterates]
        assert [r.x.value for r in t1.iterates] == [r.x.value for r in t2.iterates]


def test_iterate_deterministic():
    problem = ScalarProblem(parse("x^3+2*x-5"), bigreal("1.5", 80), precision=80)
    a = iterate(problem, MethodId.basic(3))
    b = iterate(problem, MethodId.basic(3))
    assert [r.x.decimal() for r in a.iterates] == [r.x.decimal() for r in b.iterates]
    assert a.termination == b.termination


@pytest.mark.parametrize("n", range(1, 8))
def test_slope_sum_near_root_approximates_scaled_derivative(n):
    # at the root the weighted slope sum collapses to c_n * f'(z)
    precision = 60
    f = parse("x^2-2")
    target = _PlainTarget(f)
    with mp.workdps(precision + 10):
        z = mp.sqrt(2)
        _, sums = _ladder_full(n, target, z, "trapezoid", precision)
        fpz = 2 * z
        from cotesroot.quadrature import builtin_rule
        for k in range(1, n + 1):
            expected = builtin_rule(k).c * fpz
            assert abs(sums[k] - expected) < mp.mpf(10) ** (-precision // 2) * abs(expected)


def test_newton_seeded_simpson_matches_alternate_wiring():
    # the published-tables wiring takes the three-node step from the Newton
    # value; check against a direct transcription of that variant
    f = parse("tanh(x-1)")
    x = bigreal("1.1", 60)
    got = apply_tn(2, f, x, 60, simpson_seed=SEED_NEWTON)
    with mp.workdps(70):
        u = mp.mpf("1.1")
        fx = mp.tanh(u - 1)
        fp = lambda t: mp.sech(t - 1) ** 2
        h = -(fx / fp(u)) / 2
        b = fp(u) + 4 * fp(u + h) + fp(u + 2 * h)
        expected = u - 6 * fx / b
        assert abs(got.value - expected) < mp.mpf(10) ** -55
