import numpy as np
import pytest
from conftest import rand_full_targets, rand_partial_targets, rand_raster
from oracles import dense_solve, gradient_descent

from sizedepth.annotation import DepthTargets
from sizedepth.crf import (
    CrfConfig,
    build_similarity,
    energy,
    energy_of_graph,
    energy_terms,
    solve_map,
)
from sizedepth.errors import (
    DimensionError,
    EmptyConstraintError,
    SolverError,
    UnderdeterminedError,
)
from sizedepth.raster import raster_from_intensity


def two_pixel_raster(i0=0.5, i1=0.5):
    return raster_from_intensity(np.array([[i0, i1]]))


def full_targets(values):
    d = np.asarray(values, dtype=float)
    return DepthTargets(d=d, mask=np.ones(d.size, dtype=bool))


# ---------------------------------------------------------------------------
# similarity graph


def test_constant_raster_gives_unit_weights():
    raster = raster_from_intensity(np.full((5, 6), 0.37))
    graph = build_similarity(raster, beta=25.0)
    assert np.all(graph.wh == 1.0)
    assert np.all(graph.wv == 1.0)


def test_beta_zero_gives_unit_weights():
    rng = np.random.default_rng(0)
    graph = build_similarity(rand_raster(rng, 4, 7), beta=0.0)
    _, _, w = graph.edges()
    assert np.all(w == 1.0)


def test_unit_intensity_gap_with_log2_beta_halves_weight():
    raster = two_pixel_raster(0.0, 1.0)
    graph = build_similarity(raster, beta=np.log(2.0))
    assert graph.wh[0, 0] == pytest.approx(0.5, rel=1e-14)


def test_edge_count_matches_grid_formula():
    rng = np.random.default_rng(1)
    for h, w in [(1, 2), (2, 1), (3, 3), (5, 8), (63, 84)]:
        graph = build_similarity(rand_raster(rng, h, w), beta=3.0)
        b, c, weights = graph.edges()
        assert graph.n_edges == h * (w - 1) + w * (h - 1)
        assert len(b) == len(c) == len(weights) == graph.n_edges


def test_degrees_match_incident_edge_sums():
    rng = np.random.default_rng(2)
    graph = build_similarity(rand_raster(rng, 6, 9), beta=7.0)
    b, c, w = graph.edges()
    deg = np.zeros(graph.n_pixels)
    np.add.at(deg, b, w)
    np.add.at(deg, c, w)
    assert np.abs(deg - graph.degrees).max() < 1e-12


def test_weights_lie_in_unit_interval():
    rng = np.random.default_rng(3)
    for beta in (0.0, 1.0, 10.0, 100.0):
        graph = build_similarity(rand_raster(rng, 5, 5), beta=beta)
        _, _, w = graph.edges()
        assert np.all(w > 0.0)
        assert np.all(w <= 1.0)


# ---------------------------------------------------------------------------
# energy


def test_energy_zero_at_exact_constant_match():
    raster = raster_from_intensity(np.full((3, 4), 0.5))
    targets = full_targets(np.full(12, 2.0))
    config = CrfConfig(lam=1.0, beta=2.0)
    assert energy(raster, targets, np.full(12, 2.0), config) == 0.0


def test_energy_hand_computed_two_pixel_case():
    raster = two_pixel_raster()
    targets = full_targets([0.0, 3.0])
    config = CrfConfig(lam=1.0, beta=4.0)  # equal intensities: weight 1
    assert energy(raster, targets, np.array([0.0, 3.0]), config) == 9.0
    assert energy(raster, targets, np.array([1.0, 2.0]), config) == 3.0


def test_energy_terms_split():
    raster = two_pixel_raster()
    graph = build_similarity(raster, beta=1.0)
    targets = full_targets([0.0, 3.0])
    unary, binary = energy_terms(graph, targets, np.array([1.0, 2.0]))
    assert unary == 2.0
    assert binary == 1.0


def test_energy_rejects_dimension_mismatch():
    raster = two_pixel_raster()
    targets = full_targets([0.0, 3.0])
    with pytest.raises(DimensionError):
        energy(raster, targets, np.zeros(3), CrfConfig())


# ---------------------------------------------------------------------------
# solve_map


def test_lambda_zero_identity(backend):
    rng = np.random.default_rng(10)
    for _ in range(5):
        h, w = rng.integers(2, 12, size=2)
        raster = rand_raster(rng, h, w)
        targets = rand_full_targets(rng, h * w)
        field = solve_map(raster, targets, CrfConfig(lam=0.0, beta=3.0), backend=backend)
        assert np.abs(field.y.ravel() - targets.d).max() == 0.0


def test_constant_targets_stay_constant(backend):
    rng = np.random.default_rng(11)
    raster = rand_raster(rng, 9, 12)
    targets = full_targets(np.full(9 * 12, 0.9))
    for lam in (0.1, 1.0, 10.0):
        for beta in (0.0, 1.0, 10.0):
            field = solve_map(raster, targets, CrfConfig(lam=lam, beta=beta), backend=backend)
            assert np.abs(field.y - 0.9).max() < 1e-8


def test_two_pixel_analytic_solution(backend):
    field = solve_map(
        two_pixel_raster(), full_targets([0.0, 3.0]), CrfConfig(lam=1.0, beta=5.0), backend=backend
    )
    assert np.abs(field.y.ravel() - np.array([1.0, 2.0])).max() < 1e-9


def test_matches_dense_and_gradient_descent_oracles(backend):
    rng = np.random.default_rng(12)
    for _ in range(10):
        h = int(rng.integers(2, 9))
        w = int(rng.integers(2, 9))
        raster = rand_raster(rng, h, w)
        targets = rand_full_targets(rng, h * w)
        lam = float(rng.uniform(0.1, 2.0))
        beta = float(rng.uniform(0.0, 10.0))
        config = CrfConfig(lam=lam, beta=beta)
        field = solve_map(raster, targets, config, backend=backend)
        graph = build_similarity(raster, beta)
        y_dense = dense_solve(graph, targets.mask, targets.d, lam)
        assert np.abs(field.y.ravel() - y_dense).max() < 1e-6
        y_gd = gradient_descent(graph, targets.mask, targets.d, lam, steps=10000)
        assert np.abs(field.y.ravel() - y_gd).max() < 1e-3


def test_partial_mask_matches_dense_oracle(backend):
    rng = np.random.default_rng(13)
    for _ in range(10):
        h = int(rng.integers(2, 9))
        w = int(rng.integers(2, 9))
        raster = rand_raster(rng, h, w)
        targets = rand_partial_targets(rng, h * w)
        config = CrfConfig(lam=float(rng.uniform(0.2, 2.0)), beta=float(rng.uniform(0.0, 8.0)))
        field = solve_map(raster, targets, config, backend=backend)
        graph = build_similarity(raster, config.beta)
        y_dense = dense_solve(graph, targets.mask, targets.d, config.lam)
        assert np.abs(field.y.ravel() - y_dense).max() < 1e-6


def test_stationarity_of_returned_solution(backend):
    rng = np.random.default_rng(14)
    for _ in range(10):
        h, w = int(rng.integers(2, 10)), int(rng.integers(2, 10))
        raster = rand_raster(rng, h, w)
        targets = rand_full_targets(rng, h * w)
        config = CrfConfig(lam=float(rng.uniform(0.1, 5.0)), beta=float(rng.uniform(0.0, 10.0)))
        field = solve_map(raster, targets, config, backend=backend)
        graph = build_similarity(raster, config.beta)
        a = graph.dense_system(targets.mask.astype(float), config.lam)
        grad = 2.0 * (a @ field.y.ravel() - targets.d)
        assert np.abs(grad).max() <= 10.0 * config.tol * np.abs(targets.d).max()


def test_perturbations_never_beat_optimum(backend):
    rng = np.random.default_rng(15)
    raster = rand_raster(rng, 6, 8)
    targets = rand_full_targets(rng, 48)
    config = CrfConfig(lam=0.7, beta=4.0)
    field = solve_map(raster, targets, config, backend=backend)
    graph = build_similarity(raster, config.beta)
    y = field.y.ravel()
    e_star = energy_of_graph(graph, targets, y, config.lam)
    scale = 0.1 * np.abs(y).max()
    for _ in range(100):
        delta = rng.uniform(-scale, scale, size=y.size)
        assert energy_of_graph(graph, targets, y + delta, config.lam) >= e_star - 1e-9


def test_system_matrix_is_spd():
    rng = np.random.default_rng(16)
    for _ in range(5):
        h, w = int(rng.integers(2, 7)), int(rng.integers(2, 7))
        raster = rand_raster(rng, h, w)
        graph = build_similarity(raster, beta=float(rng.uniform(0, 8)))
        for targets in (rand_full_targets(rng, h * w), rand_partial_targets(rng, h * w)):
            a = graph.dense_system(targets.mask.astype(float), lam=float(rng.uniform(0.1, 3)))
            assert np.array_equal(a, a.T)
            eigmin = np.linalg.eigvalsh(a).min()
            assert eigmin >= targets.mask.astype(float).min() - 1e-10


def test_lambda_sweep_monotonicity(backend):
    rng = np.random.default_rng(17)
    raster = rand_raster(rng, 8, 10)
    d = rng.uniform(1.0, 5.0, size=80)
    targets = DepthTargets(d=d, mask=np.ones(80, dtype=bool))
    beta = 5.0
    graph = build_similarity(raster, beta)
    unaries, binaries = [], []
    for lam in (0.1, 1.0, 10.0):
        field = solve_map(raster, targets, CrfConfig(lam=lam, beta=beta), backend=backend)
        unary, binary = energy_terms(graph, targets, field.y.ravel())
        unaries.append(unary)
        binaries.append(binary)
    assert binaries[0] > binaries[1] > binaries[2]
    assert unaries[0] < unaries[1] < unaries[2]


def test_maximum_principle_all_masked(backend):
    rng = np.random.default_rng(18)
    for _ in range(10):
        h, w = int(rng.integers(2, 10)), int(rng.integers(2, 10))
        raster = rand_raster(rng, h, w)
        targets = rand_full_targets(rng, h * w)
        config = CrfConfig(lam=float(rng.uniform(0.1, 5)), beta=float(rng.uniform(0, 10)))
        field = solve_map(raster, targets, config, backend=backend)
        assert field.y.min() >= targets.d.min() - 1e-9
        assert field.y.max() <= targets.d.max() + 1e-9


def test_empty_mask_rejected(backend):
    raster = two_pixel_raster()
    targets = DepthTargets(d=np.zeros(2), mask=np.zeros(2, dtype=bool))
    with pytest.raises(EmptyConstraintError):
        solve_map(raster, targets, CrfConfig(), backend=backend)


def test_lambda_zero_with_gaps_rejected(backend):
    raster = two_pixel_raster()
    targets = DepthTargets(d=np.array([1.0, 0.0]), mask=np.array([True, False]))
    with pytest.raises(UnderdeterminedError):
        solve_map(raster, targets, CrfConfig(lam=0.0), backend=backend)


def test_non_convergence_raises_solver_error(backend):
    rng = np.random.default_rng(19)
    raster = rand_raster(rng, 8, 8)
    targets = rand_partial_targets(rng, 64)
    with pytest.raises(SolverError) as err:
        solve_map(raster, targets, CrfConfig(lam=5.0, beta=1.0, max_iter=1), backend=backend)
    assert err.value.residual > 0.0
    assert err.value.iterations == 1


def test_backends_agree():
    from sizedepth.crf import available_backends

    if len(available_backends()) < 2:
        pytest.skip("compiled backend not built")
    rng = np.random.default_rng(20)
    raster = rand_raster(rng, 12, 15)
    targets = rand_partial_targets(rng, 12 * 15)
    config = CrfConfig(lam=1.3, beta=6.0)
    y_cy = solve_map(raster, targets, config, backend="cython").y
    y_np = solve_map(raster, targets, config, backend="numpy").y
    assert np.abs(y_cy - y_np).max() < 1e-8


def test_solve_reports_energies_and_time(backend):
    rng = np.random.default_rng(21)
    raster = rand_raster(rng, 5, 5)
    targets = rand_full_targets(rng, 25)
    field = solve_map(raster, targets, CrfConfig(lam=1.0, beta=3.0), backend=backend)
    graph = build_similarity(raster, 3.0)
    unary, binary = energy_terms(graph, targets, field.y.ravel())
    assert field.unary_energy == unary
    assert field.binary_energy == binary
    assert field.wall_time_s >= 0.0
    assert field.backend == backend


def test_config_validation():
    with pytest.raises(DimensionError):
        CrfConfig(lam=-1.0)
    with pytest.raises(DimensionError):
        CrfConfig(beta=-0.1)
    with pytest.raises(DimensionError):
        CrfConfig(tol=0.0)
    with pytest.raises(DimensionError):
        CrfConfig(max_iter=0)
