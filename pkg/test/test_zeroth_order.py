from multiprocessing.pool import ThreadPool
import numpy as np
import pytest

from test.utils import tpf_bound_d4, opf_single_bound_d2, \
    opf_double_bound_d1, bias_bound_d10
from zo_sadom.objectives.quadratic import QuadraticNode
from zo_sadom.objectives.problem import ProblemSpec, make_quadratic_problem, \
    make_nonsmooth_problem, node_value_grad, estimate_constants
from zo_sadom.zeroth_order.sampling import sphere_rows, ball_rows, \
    sample_unit_sphere, sample_unit_ball, smoothed_value, smoothed_gradient
from zo_sadom.zeroth_order.estimators import OracleConfig, \
    feedback_estimate, estimate_gradient, estimate_gradients, \
    measure_estimator, oracle_calls_per_node
from zo_sadom.zeroth_order.bounds import scheme_variance, variance_bound, \
    bias_bound, gamma_for_accuracy
from zo_sadom.utils.errors import BadSpec, SchemeMismatch, MissingConstant
from zo_sadom.utils.rng import keyed_generator, STREAM_PROBE


def _square_norm_problem():
    node = QuadraticNode(2 * np.eye(2), np.zeros(2))
    return ProblemSpec("quadratic", 1, 2, 2.0, lipschitz_grad=2.0,
                       per_node_data=(node,))


def test_unit_sphere_samples():
    for key in ((0, 1, 2), (5, 0, 0), (1, 2, 3, 4)):
        e = sample_unit_sphere(1, key)
        assert abs(abs(e[0]) - 1) < 1e-15, f"{e}"
    for d in (2, 5, 54):
        for i in range(100):
            e = sample_unit_sphere(d, (d, i, 0, 0))
            assert abs(np.linalg.norm(e) - 1) < 1e-12, f"{np.linalg.norm(e)}"
    assert np.array_equal(sample_unit_sphere(4, (0, 1, 2)),
                          sample_unit_sphere(4, (0, 1, 2)))
    assert not np.array_equal(sample_unit_sphere(4, (0, 1, 2)),
                              sample_unit_sphere(4, (0, 1, 3)))


def test_sphere_second_moment():
    d = 8
    s = np.arange(1.0, 9.0)
    rows = sphere_rows(keyed_generator(9, STREAM_PROBE), 10 ** 5, d)
    values = d * (rows @ s) ** 2
    std_err = values.std(ddof=1) / np.sqrt(len(values))
    deviation = abs(values.mean() - s @ s)
    assert deviation <= 5 * std_err, f"{deviation} > 5 * {std_err}"


def test_unit_ball_samples():
    for i in range(100):
        assert np.linalg.norm(sample_unit_ball(3, (i, 0, 0, 0))) <= 1.0
    rows = ball_rows(keyed_generator(10, STREAM_PROBE), 10 ** 5, 2)
    assert np.max(np.linalg.norm(rows, axis=1)) <= 1 + 1e-12
    sq = np.sum(rows ** 2, axis=1)
    std_err = sq.std(ddof=1) / np.sqrt(len(sq))
    assert abs(sq.mean() - 0.5) <= 5 * std_err, f"{sq.mean()}"
    rows = ball_rows(keyed_generator(11, STREAM_PROBE), 10 ** 5, 1)
    assert np.max(np.abs(rows)) <= 1.0
    std_err = rows.std(ddof=1) / np.sqrt(len(rows))
    assert abs(rows.mean()) <= 5 * std_err, f"{rows.mean()}"


def test_smoothed_square_norm():
    spec = _square_norm_problem()
    value, std_err = smoothed_value(
        spec, np.zeros(2), 1.0, 10 ** 6, return_std_err=True)
    assert abs(value - 0.5) <= 5 * std_err, f"{value} != 0.5 +- {std_err}"
    x = np.array([1.0, 1.0])
    value = smoothed_value(spec, x, 1e-8, 100)
    assert abs(value - 2.0) < 1e-6, f"{value} != 2"


def test_smoothed_gradient_of_square_norm():
    spec = _square_norm_problem()
    x = np.array([0.5, -1.0])
    grad = smoothed_gradient(spec, x, 0.1, 10 ** 5, seed=2)
    assert np.linalg.norm(grad - 2 * x) < 1e-2, f"{grad} != {2 * x}"


def test_smoothing_sandwich():
    spec = estimate_constants(
        make_nonsmooth_problem(3, 4, samples_per_node=8, mu=0.2, seed=3), 2.0)
    gamma = 0.1
    points = ball_rows(keyed_generator(12, STREAM_PROBE), 100, 4)
    for i, x in enumerate(points):
        exact = node_value_grad(spec, 0, x)[0]
        value, std_err = smoothed_value(
            spec, x, gamma, 4000, seed=i, return_std_err=True)
        assert exact <= value + 5 * std_err, f"{exact} > {value}"
        assert value <= exact + gamma * spec.lipschitz_value + 5 * std_err, \
            f"{value} > {exact} + {gamma * spec.lipschitz_value}"


def test_feedback_formulas():
    e = np.array([[1.0, 0.0]])
    g = feedback_estimate("tpf", np.array([0.1]), np.array([-0.1]), 0.1, e)
    assert np.allclose(g, [[2.0, 0.0]]), f"{g}"
    e = np.array([[0.0, 1.0], [0.0, -1.0]])
    g = feedback_estimate("opf_single", np.array([3.0, 3.0]), None, 0.5, e)
    assert np.allclose(g[0], [0.0, 12.0]), f"{g}"
    assert np.allclose(g.sum(axis=0), [0.0, 0.0]), f"{g}"
    with pytest.raises(SchemeMismatch):
        feedback_estimate("exact", np.ones(1), np.ones(1), 0.1, e[:1])


def test_oracle_config_validation():
    with pytest.raises(BadSpec):
        OracleConfig(scheme="fd")
    with pytest.raises(BadSpec):
        OracleConfig(scheme="tpf", gamma=0.0)
    with pytest.raises(BadSpec):
        OracleConfig(scheme="tpf", batch=0)
    with pytest.raises(BadSpec):
        OracleConfig(scheme="tpf", noise_kind="gaussian")
    assert oracle_calls_per_node(OracleConfig()) == 1
    assert oracle_calls_per_node(OracleConfig("opf_single", batch=5)) == 5
    assert oracle_calls_per_node(OracleConfig("tpf", batch=5)) == 10
    assert oracle_calls_per_node(OracleConfig("opf_double", batch=3)) == 6


def test_two_point_estimator_is_unbiased_on_quadratics():
    spec = make_quadratic_problem(2, 4, mu=1.0, lipschitz=5.0, seed=1)
    x = np.full(4, 0.3)
    stats = measure_estimator(
        spec, x, OracleConfig("tpf", gamma=0.1), 10 ** 5)
    assert stats.sample_count == 10 ** 5
    assert stats.bias_norm <= 4 * stats.bias_std_err, \
        f"{stats.bias_norm} > 4 * {stats.bias_std_err}"


def test_variance_bound_formulas():
    assert abs(scheme_variance("tpf", 4, 0.1, 0.0, m2=1.0) -
               tpf_bound_d4) < 1e-4
    assert abs(scheme_variance("opf_single", 2, 1.0, 0.0, g=1.0) -
               opf_single_bound_d2) < 1e-12
    assert abs(scheme_variance("opf_double", 1, 0.5, 0.0, m2=1.0) -
               opf_double_bound_d1) < 1e-12
    with pytest.raises(MissingConstant):
        scheme_variance("tpf", 4, 0.1)
    with pytest.raises(MissingConstant):
        scheme_variance("opf_single", 4, 0.1, m2=1.0)
    with pytest.raises(SchemeMismatch):
        variance_bound(OracleConfig(), make_quadratic_problem(1, 2))


def test_bias_bound_and_gamma():
    cfg = OracleConfig("tpf", gamma=1e-3, noise_bound=1e-6)
    assert abs(bias_bound(cfg, 10) - bias_bound_d10) < 1e-15
    assert bias_bound(OracleConfig("tpf", gamma=1e-3), 10) == 0
    assert bias_bound(OracleConfig(), 10) == 0
    gamma, _ = gamma_for_accuracy(0.01, 5.0)
    assert abs(gamma - 0.001) < 1e-15, f"{gamma}"
    gamma, smoothness = gamma_for_accuracy(10.0, 5.0, d=4)
    assert gamma == 1.0 and smoothness == 10.0, f"{gamma}, {smoothness}"


def test_estimator_second_moments_below_bounds():
    for d, gamma, noise in ((4, 0.1, 0.0), (4, 0.1, 1e-4), (54, 1e-4, 0.0)):
        spec = estimate_constants(
            make_quadratic_problem(1, d, mu=1.0, lipschitz=4.0, seed=d), 1.0)
        for scheme in ("tpf", "opf_single", "opf_double"):
            cfg = OracleConfig(scheme, gamma=gamma, noise_bound=noise,
                               noise_kind="uniform", seed=d)
            stats = measure_estimator(spec, np.zeros(d), cfg, 10 ** 5)
            bound = variance_bound(cfg, spec)
            assert stats.second_moment <= \
                bound + 3 * stats.second_moment_std_err, \
                f"{scheme} d={d}: {stats.second_moment} > {bound}"


def test_worst_case_noise_bias():
    d, gamma, noise = 4, 0.1, 1e-3
    spec = make_quadratic_problem(1, d, mu=1.0, lipschitz=4.0, seed=2)
    cfg = OracleConfig("tpf", gamma=gamma, noise_bound=noise,
                       noise_kind="worst_case_sign")
    stats = measure_estimator(spec, np.zeros(d), cfg, 10 ** 5)
    bound = bias_bound(cfg, d)
    assert stats.bias_norm <= bound + 3 * stats.bias_std_err, \
        f"{stats.bias_norm} > {bound} + 3 * {stats.bias_std_err}"


def test_batching_reduces_noise():
    d = 10
    spec = make_quadratic_problem(1, d, mu=1.0, lipschitz=4.0, seed=3)
    x = np.zeros(d)
    grad_sq = float(np.sum(node_value_grad(spec, 0, x)[1] ** 2))
    noise = []
    for batch in (1, 16):
        cfg = OracleConfig("tpf", gamma=0.1, batch=batch)
        stats = measure_estimator(spec, x, cfg, 10 ** 4)
        noise.append(stats.second_moment - grad_sq)
    ratio = noise[1] / (noise[0] / 16)
    assert 0.5 <= ratio <= 2.0, f"{ratio} not in [0.5, 2]"


def test_gradient_estimates_are_reproducible():
    spec = make_nonsmooth_problem(4, 3, samples_per_node=6, mu=0.1, seed=1)
    cfg = OracleConfig("opf_double", gamma=0.05, batch=3, seed=7)
    x = keyed_generator(0, 8).standard_normal((4, 3))
    inline, calls = estimate_gradients(spec, x, cfg, 5)
    with ThreadPool(3) as pool:
        pooled, _ = estimate_gradients(spec, x, cfg, 5, pool)
    assert np.array_equal(inline, pooled)
    assert calls == 4 * 6, f"{calls} != 24"
    single = estimate_gradient(spec, x, cfg, 5, 2)
    assert np.array_equal(single, inline[2])
    assert not np.array_equal(estimate_gradient(spec, x, cfg, 6, 2), single)
    exact, calls = estimate_gradients(spec, x, OracleConfig(), 0)
    assert calls == 4 and exact.shape == (4, 3)
