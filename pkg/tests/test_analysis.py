import mpmath as mp
import pytest

from cotesroot import (
    InsufficientData,
    MethodId,
    RoundoffFloor,
    ScalarProblem,
    bigreal,
    bisect_root,
    error_from_steps,
    estimate_order,
    estimate_order_from_steps,
    iterate,
    map_derivatives_at,
    parse,
    significant_digits,
)
from cotesroot.solver import SEED_NEWTON, apply_tn


# ------------------------------------------------------- significant digits

def test_sdigits_unit_error():
    assert float(significant_digits(bigreal(2, 30), bigreal(1, 30))) == 0.0


def test_sdigits_exact_hit_capped_at_precision():
    x = bigreal("1.25", 45)
    assert float(significant_digits(x, x)) == 45.0


def test_sdigits_monotone():
    z = bigreal(1, 40)
    values = [float(significant_digits(bigreal(1 + 10**-d, 40), z)) for d in (1, 3, 7)]
    assert values == sorted(values)


def test_sdigits_one_simpson_application_on_tanh():
    # published-tables wiring; reference row value 5.6
    f = parse("tanh(x-1)")
    got = apply_tn(2, f, bigreal("1.1", 60), 60, simpson_seed=SEED_NEWTON)
    s = float(significant_digits(got, bigreal(1, 60)))
    assert s == pytest.approx(5.6, abs=0.15)


# ------------------------------------------------------- order estimation

def _newton_on_sqrt2(precision=200, max_iter=12):
    problem = ScalarProblem(parse("x^2-2"), bigreal("1.5", precision),
                            precision=precision, max_iter=max_iter)
    return iterate(problem, MethodId.basic(0))


def test_order_newton_on_sqrt2():
    traj = _newton_on_sqrt2()
    with mp.workdps(410):
        reference = bigreal(mp.sqrt(2), 400)  # independent 2x-precision oracle
    est = estimate_order(traj, reference)
    assert float(est.q) == pytest.approx(2.0, abs=0.1)
    assert est.samples_used >= 4


def test_order_newton_on_tanh_is_cubic():
    problem = ScalarProblem(parse("tanh(x-1)"), bigreal("1.5", 300), precision=300,
                            max_iter=10)
    est = estimate_order(iterate(problem, MethodId.basic(0)), bigreal(1, 300))
    assert float(est.q) == pytest.approx(3.0, abs=0.2)


def test_order_simpson_on_tanh_is_quintic():
    problem = ScalarProblem(parse("tanh(x-1)"), bigreal("1.5", 600), precision=600,
                            max_iter=10)
    est = estimate_order(iterate(problem, MethodId.basic(2)), bigreal(1, 600))
    assert float(est.q) == pytest.approx(5.0, abs=0.3)


def test_order_insufficient_data():
    traj = _newton_on_sqrt2(precision=60, max_iter=2)
    with mp.workdps(130):
        reference = bigreal(mp.sqrt(2), 120)
    with pytest.raises(InsufficientData):
        estimate_order(traj, reference)


def test_order_roundoff_floor():
    # start so close that the very first error is already below the floor
    problem = ScalarProblem(parse("x^2-4"), bigreal(2 + mp.mpf(10) ** -30, 40),
                            precision=40, max_iter=6)
    traj = iterate(problem, MethodId.basic(0))
    with pytest.raises(RoundoffFloor):
        estimate_order(traj, bigreal(2, 40))


def test_order_scale_invariant():
    reference = None
    results = []
    for text in ("x^2-2", "8*(x^2-2)"):
        problem = ScalarProblem(parse(text), bigreal("1.5", 200), precision=200,
                                max_iter=12)
        traj = iterate(problem, MethodId.basic(0))
        with mp.workdps(410):
            reference = bigreal(mp.sqrt(2), 400)
        results.append(estimate_order(traj, reference))
    assert results[0].q.value == results[1].q.value
    assert [r.value for r in results[0].per_pair] == [r.value for r in results[1].per_pair]


def test_order_from_steps_three_point():
    traj = _newton_on_sqrt2(precision=300)
    est = estimate_order_from_steps(traj)
    assert float(est.q) == pytest.approx(2.0, abs=0.2)


def test_order_from_steps_insufficient():
    traj = _newton_on_sqrt2(precision=60, max_iter=2)
    with pytest.raises(InsufficientData):
        estimate_order_from_steps(traj)


# ------------------------------------------------------- step-based errors

def test_error_from_steps_matches_differences():
    traj = _newton_on_sqrt2(precision=80, max_iter=8)
    steps = error_from_steps(traj)
    assert len(steps) == len(traj.iterates) - 1
    with mp.workdps(90):
        for k, st in enumerate(steps):
            diff = traj.iterates[k + 1].x.value - traj.iterates[k].x.value
            assert st.value == diff


def test_error_from_steps_empty_when_converged_at_start():
    problem = ScalarProblem(parse("x^2-4"), bigreal(2, 40), precision=40)
    traj = iterate(problem, MethodId.basic(0))
    assert error_from_steps(traj) == []


# ------------------------------------------------------- map derivatives

def test_map_derivatives_newton_superattracting():
    f = parse("x^2-4")
    derivs = map_derivatives_at(MethodId.basic(0), f, bigreal(2, 100), 1, 100)
    assert abs(float(derivs[0])) < 1e-6


def test_map_derivatives_newton_on_tanh():
    f = parse("tanh(x-1)")
    derivs = map_derivatives_at(MethodId.basic(0), f, bigreal(1, 250), 5, 250)
    expected = (0.0, 0.0, -4.0, 0.0, -16.0)
    for got, want in zip(derivs, expected):
        if want == 0.0:
            assert abs(float(got)) < 1e-3
        else:
            assert float(got) == pytest.approx(want, rel=0.01)


def test_map_derivatives_validation():
    f = parse("x^2-4")
    with pytest.raises(ValueError):
        map_derivatives_at(MethodId.basic(0), f, bigreal(2, 100), 6, 400)
    with pytest.raises(ValueError):
        map_derivatives_at(MethodId.basic(0), f, bigreal(2, 100), 5, 100)


# ------------------------------------------------------- reference roots

def test_bisect_root_sqrt2():
    root = bisect_root(parse("x^2-2"), 1, 2, 60)
    with mp.workdps(80):
        assert abs(root.value - mp.sqrt(2)) < mp.mpf(10) ** -58


def test_bisect_root_needs_sign_change():
    with pytest.raises(ValueError):
        bisect_root(parse("x^2+1"), -1, 1, 30)
