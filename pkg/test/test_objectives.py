import math
import numpy as np
import pytest

from zo_sadom.objectives.logreg import Dataset, parse_libsvm, partition, \
    logreg_value_grad, calibrate_regularizer, data_smoothness, \
    synthetic_classification, concat
from zo_sadom.objectives.nonsmooth import AbsData, nonsmooth_value_subgrad
from zo_sadom.objectives.quadratic import QuadraticNode
from zo_sadom.objectives.problem import ProblemSpec, make_problem, \
    make_quadratic_problem, make_nonsmooth_problem, make_logreg_problem, \
    node_value_grad, sample_values, pooled_value, pooled_gradient, \
    pooled_hessian, estimate_constants, feasible_radius
from zo_sadom.objectives.reference import reference_minimizer
from zo_sadom.zeroth_order.sampling import ball_rows
from zo_sadom.utils.errors import ParseError, IndexOutOfRange, \
    TooFewSamples, DegenerateData, BadSpec
from zo_sadom.utils.filesystem import read_libsvm_file, \
    write_dataset_cache, read_dataset_cache, store_reference, load_reference
from zo_sadom.utils.rng import keyed_generator


def _small_problems():
    ds = synthetic_classification(60, 4, seed=1)
    return [
        make_quadratic_problem(3, 4, mu=0.5, lipschitz=5.0, seed=2),
        make_nonsmooth_problem(3, 4, samples_per_node=8, mu=0.2, seed=3),
        make_logreg_problem(ds, 3, kappa=50.0),
    ]


def test_parse_libsvm():
    ds = parse_libsvm("1 1:0.5 3:2.0\n", 3)
    assert ds.m == 1 and ds.d == 3, f"{ds.m}, {ds.d}"
    assert ds.labels[0] == 1, f"{ds.labels}"
    assert np.array_equal(ds.features[0], [0.5, 0.0, 2.0]), f"{ds.features}"
    ds = parse_libsvm(b"2 2:1\n", 2)
    assert ds.labels[0] == -1, f"{ds.labels}"
    assert np.array_equal(ds.features[0], [0.0, 1.0]), f"{ds.features}"
    ds = parse_libsvm("-1 1:1\n+1 2:1\n", 2)
    assert np.array_equal(ds.labels, [-1, 1]), f"{ds.labels}"
    ds = parse_libsvm("", 5)
    assert ds.m == 0 and ds.d == 5, f"{ds.m}, {ds.d}"


def test_parse_libsvm_errors():
    with pytest.raises(IndexOutOfRange) as err:
        parse_libsvm("1 1:1\n1 4:1\n", 3)
    assert err.value.line == 2, f"{err.value.line} != 2"
    with pytest.raises(ParseError) as err:
        parse_libsvm("1 1:1\n3 1:1\n", 3)
    assert err.value.line == 2, f"{err.value.line} != 2"


def test_read_libsvm_file_and_cache(tmp_path):
    path = tmp_path / "data.libsvm"
    path.write_text("1 1:0.5\n2 2:1.5\n1 1:1 2:1\n", encoding="utf-8")
    ds = read_libsvm_file(str(path), 2)
    assert ds.m == 3, f"{ds.m} != 3"
    ds = read_libsvm_file(str(path), 2, max_rows=2)
    assert ds.m == 2, f"{ds.m} != 2"
    cache = str(tmp_path / "data.bin")
    assert read_dataset_cache(cache) is None
    write_dataset_cache(cache, ds)
    loaded = read_dataset_cache(cache)
    assert np.array_equal(loaded.features, ds.features)
    assert np.array_equal(loaded.labels, ds.labels)
    assert (tmp_path / "data.bin").stat().st_size == 16 + 8 * 2 * 2 + 2


def test_partition():
    ds = Dataset(np.arange(10, dtype=float)[:, None], np.ones(10))
    sizes = [block.m for block in partition(ds, 3)]
    assert sizes == [4, 3, 3], f"{sizes}"
    assert partition(ds, 3)[1].features[0, 0] == 4
    ds = Dataset(np.zeros((5, 2)), np.ones(5))
    assert [block.m for block in partition(ds, 5)] == [1] * 5
    with pytest.raises(TooFewSamples):
        partition(ds, 6)


def test_partition_then_concat_restores_the_rows():
    for m, n in ((10, 3), (7, 7), (2000, 20), (581, 100)):
        ds = synthetic_classification(m, 4, seed=m)
        joined = concat(partition(ds, n))
        assert np.array_equal(joined.features, ds.features), f"m={m}, n={n}"
        assert np.array_equal(joined.labels, ds.labels), f"m={m}, n={n}"


def test_logreg_single_sample():
    ds = Dataset(np.array([[1.0, 0.0]]), np.array([1.0]))
    value, grad = logreg_value_grad(ds, np.zeros(2), 0.0)
    assert abs(value - math.log(2)) < 1e-15, f"{value}"
    assert np.allclose(grad, [0.5, 0.0]), f"{grad}"
    value_r, grad_r = logreg_value_grad(ds, np.zeros(2), 3.0)
    assert value_r == value and np.array_equal(grad_r, grad)
    value_s, grad_s = logreg_value_grad(ds, np.zeros(2), 0.0, sign=-1.0)
    assert abs(value_s - math.log(2)) < 1e-15
    assert np.allclose(grad_s, [-0.5, 0.0]), f"{grad_s}"


def test_logreg_gradient_matches_finite_differences():
    rng = keyed_generator(0, 1)
    h = 1e-6
    for trial in range(5):
        ds = synthetic_classification(30, 5, seed=trial)
        x = rng.standard_normal(5)
        _, grad = logreg_value_grad(ds, x, 0.1)
        fd = np.zeros(5)
        for j in range(5):
            step = np.zeros(5)
            step[j] = h
            fd[j] = (logreg_value_grad(ds, x + step, 0.1)[0] -
                     logreg_value_grad(ds, x - step, 0.1)[0]) / (2 * h)
        err = np.linalg.norm(fd - grad) / np.linalg.norm(grad)
        assert err < 1e-5, f"trial {trial}: relative error {err}"


def test_pooled_hessian_matches_gradient_differences():
    rng = keyed_generator(0, 2)
    h = 1e-6
    for spec in _small_problems():
        if not spec.is_smooth:
            with pytest.raises(BadSpec):
                pooled_hessian(spec, np.zeros(spec.d))
            continue
        x = rng.standard_normal(spec.d)
        hessian = pooled_hessian(spec, x)
        assert np.allclose(hessian, hessian.T), f"{spec.kind}"
        fd = np.zeros((spec.d, spec.d))
        for j in range(spec.d):
            step = np.zeros(spec.d)
            step[j] = h
            fd[:, j] = (pooled_gradient(spec, x + step) -
                        pooled_gradient(spec, x - step)) / (2 * h)
        err = np.linalg.norm(fd - hessian) / np.linalg.norm(hessian)
        assert err < 1e-5, f"{spec.kind}: relative error {err}"


def test_calibrate_regularizer():
    ds = Dataset(np.array([[2.0]]), np.array([1.0]))
    assert abs(data_smoothness(ds) - 1) < 1e-12, f"{data_smoothness(ds)}"
    r = calibrate_regularizer(ds, 1e5)
    assert abs(r - 1 / (1e5 - 1)) < 1e-18, f"{r}"
    assert abs(calibrate_regularizer(ds, 2.0) - 1) < 1e-12
    with pytest.raises(DegenerateData):
        calibrate_regularizer(Dataset(np.zeros((3, 2)), np.ones(3)), 10.0)


def test_data_smoothness_matches_dense_eigensolver():
    rng = keyed_generator(4, 2)
    features = rng.standard_normal((200, 5)) + 3.0
    ds = Dataset(features, np.ones(200))
    expected = np.linalg.eigvalsh(features.T @ features / 800)[-1]
    estimate = data_smoothness(ds)
    assert abs(estimate - expected) <= 1e-6 * expected, \
        f"{estimate} != {expected}"


def test_logreg_problem_condition_number():
    ds = synthetic_classification(200, 6, seed=5)
    spec = make_logreg_problem(ds, 4, kappa=1e3)
    assert spec.mu == spec.regularizer > 0
    kappa = spec.lipschitz_grad / spec.mu
    assert kappa >= 1e3 * (1 - 1e-12), f"{kappa}"
    assert spec.sign == 1.0
    assert make_logreg_problem(ds, 4, 1e3, standard_sign=True).sign == -1.0


def test_nonsmooth_value_and_subgradient():
    data = AbsData(np.array([[1.0]]), np.array([0.0]))
    value, subgrad = nonsmooth_value_subgrad(data, np.array([2.0]), 0.0)
    assert value == 2.0 and np.array_equal(subgrad, [1.0]), \
        f"{value}, {subgrad}"
    data = AbsData(np.array([[1.0, 1.0]]), np.array([2.0]))
    _, subgrad = nonsmooth_value_subgrad(data, np.array([1.0, 1.0]), 0.0)
    assert np.array_equal(subgrad, [0.0, 0.0]), f"{subgrad}"
    rng = keyed_generator(0, 3)
    for _ in range(10):
        a, b, x = rng.standard_normal((7, 3)), rng.standard_normal(7), \
            rng.standard_normal(3)
        value, _ = nonsmooth_value_subgrad(AbsData(a, b), x, 0.3)
        brute = sum(abs(float(a[j] @ x) - b[j]) for j in range(7)) / 7 + \
            0.15 * float(x @ x)
        assert abs(value - brute) < 1e-12, f"{value} != {brute}"


def test_quadratic_spectra():
    spec = make_quadratic_problem(4, 5, mu=0.5, lipschitz=8.0, seed=1)
    for node in spec.per_node_data:
        eigenvalues = np.linalg.eigvalsh(node.hessian)
        assert abs(eigenvalues[0] - 0.5) < 1e-9, f"{eigenvalues}"
        assert abs(eigenvalues[-1] - 8.0) < 1e-9, f"{eigenvalues}"
    with pytest.raises(BadSpec):
        make_quadratic_problem(2, 3, mu=2.0, lipschitz=1.0)


def test_strong_convexity():
    rng = keyed_generator(0, 4)
    for spec in _small_problems():
        for node in range(spec.n):
            for _ in range(20):
                x, y = rng.standard_normal(spec.d), rng.standard_normal(spec.d)
                fx, gx = node_value_grad(spec, node, x)
                fy, _ = node_value_grad(spec, node, y)
                lower = fx + gx @ (y - x) + spec.mu / 2 * np.sum((y - x) ** 2)
                assert fy >= lower - 1e-9, f"{spec.kind}: {fy} < {lower}"


def test_sample_values_average_to_node_value():
    rng = keyed_generator(0, 5)
    for spec in _small_problems():
        x = rng.standard_normal(spec.d)
        if spec.kind == "quadratic":
            m = 1
        else:
            m = spec.per_node_data[1].m
        values = sample_values(spec, 1, np.tile(x, (m, 1)), np.arange(m))
        expected = node_value_grad(spec, 1, x)[0]
        assert abs(np.mean(values) - expected) < 1e-12, \
            f"{spec.kind}: {np.mean(values)} != {expected}"
        full = sample_values(spec, 1, x[None, :])
        assert abs(full[0] - expected) < 1e-12, f"{spec.kind}"


def test_estimated_constants_bound_the_oracle():
    rng = keyed_generator(0, 6)
    for spec in _small_problems():
        spec = estimate_constants(spec, 2.0)
        assert spec.radius == 2.0
        for node in range(spec.n):
            x = 2.0 * ball_rows(rng, 50, spec.d)
            y = 2.0 * ball_rows(rng, 50, spec.d)
            m = 1 if spec.kind == "quadratic" else spec.per_node_data[node].m
            idx = rng.integers(0, m, size=50)
            fx = sample_values(spec, node, x, idx)
            fy = sample_values(spec, node, y, idx)
            dist = np.linalg.norm(x - y, axis=1)
            assert np.all(np.abs(fx - fy) <= spec.lipschitz_value * dist +
                          1e-12), f"{spec.kind}: M2 violated"
            assert np.all(np.abs(fx) <= spec.value_bound + 1e-12), \
                f"{spec.kind}: G violated"


def test_make_problem_dispatch():
    spec = make_problem("quadratic", 3, 2, mu=1.0, lipschitz=3.0, seed=1)
    assert spec.kind == "quadratic" and spec.lipschitz_grad == 3.0
    spec = make_problem("nonsmooth_abs", 3, 2, mu=0.1, samples_per_node=4)
    assert spec.kind == "nonsmooth_abs" and not spec.is_smooth
    spec = make_problem("logreg", 3, 4, kappa=100.0, synthetic_samples=30)
    assert sum(p.m for p in spec.per_node_data) == 30
    with pytest.raises(BadSpec):
        make_problem("hinge", 3, 2)


def test_reference_of_centered_quadratics():
    centers = [np.array([1.0, 2.0]), np.array([-3.0, 0.0]),
               np.array([0.5, 1.0])]
    nodes = tuple(QuadraticNode(np.eye(2), c) for c in centers)
    spec = ProblemSpec("quadratic", 3, 2, 1.0, lipschitz_grad=1.0,
                       per_node_data=nodes)
    ref = reference_minimizer(spec)
    expected = np.mean(centers, axis=0)
    assert np.linalg.norm(ref.x_star - expected) < 1e-9, f"{ref.x_star}"
    assert ref.tolerance <= 1e-10, f"{ref.tolerance}"


def test_reference_of_strongly_regularized_logreg():
    ds = synthetic_classification(40, 3, seed=7)
    spec = make_logreg_problem(ds, 2, kappa=1.0 + 1e-4)
    ref = reference_minimizer(spec)
    g0 = pooled_gradient(spec, np.zeros(3))
    expected = -g0 / (spec.n * spec.regularizer)
    err = np.linalg.norm(ref.x_star - expected) / np.linalg.norm(expected)
    assert err < 1e-3, f"relative error {err}"
    assert np.linalg.norm(pooled_gradient(spec, ref.x_star)) <= 1e-10


def test_reference_of_nonsmooth_problems():
    data = (AbsData(np.array([[1.0]]), np.array([0.0])),)
    spec = ProblemSpec("nonsmooth_abs", 1, 1, 0.5, per_node_data=data)
    ref = reference_minimizer(spec)
    assert abs(ref.x_star[0]) < 1e-8, f"{ref.x_star}"
    spec = make_nonsmooth_problem(4, 3, samples_per_node=10, mu=0.1, seed=0)
    ref = reference_minimizer(spec)
    assert ref.tolerance <= 1e-8, f"{ref.tolerance}"
    assert abs(pooled_value(spec, ref.x_star) - ref.f_star) < 1e-12
    rng = keyed_generator(0, 7)
    for _ in range(50):
        x = ref.x_star + 1e-3 * rng.standard_normal(3)
        assert pooled_value(spec, x) >= ref.f_star - 1e-8


def test_reference_cache(tmp_path):
    spec = make_quadratic_problem(3, 2, seed=4)
    ref = reference_minimizer(spec)
    path = str(tmp_path / "ref.npz")
    assert load_reference(path) is None
    store_reference(path, ref)
    loaded = load_reference(path)
    assert np.array_equal(loaded.x_star, ref.x_star)
    assert loaded.f_star == ref.f_star


def test_feasible_radius():
    assert feasible_radius(np.zeros(2), np.zeros(2)) == 1.0
    assert feasible_radius(np.zeros(2), np.array([3.0, 4.0])) == 10.0
