"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import goalfem as gf


def test_mesh_counts():
    mesh = gf.build_interval_mesh(128)
    assert mesh.element_count() == 128
    assert len(mesh.nodes) == 129

    square = gf.build_square_mesh(16, gf.SquareSplit.crisscross)
    assert square.triangle_count() == 1024
    assert square.total_area() == pytest.approx(1.0, abs=1e-12)

    with pytest.raises(ValueError):
        gf.build_interval_mesh(0)


def test_spaces_and_quadrature():
    space = gf.Space1D(gf.build_interval_mesh(4), 1, gf.BoundaryCondition.left_dirichlet)
    assert space.dof_count() == 4

    trial2d = gf.Space2D(
        gf.build_square_mesh(2, gf.SquareSplit.diagonal), 1, gf.BoundaryCondition.full_dirichlet
    )
    assert trial2d.dof_count() == 1

    rule = gf.quadrature_rule(gf.ElementKind.interval, 9)
    assert rule.weights.shape == (5,)
    assert np.dot(rule.weights, rule.points[:, 0] ** 9) == pytest.approx(0.1, abs=1e-14)


def test_weightnet_roundtrip(tmp_path):
    net = gf.WeightNet.make(1, 5, gf.GKind.exp)
    assert net.param_count() == 15
    assert net.weight(0.3) == 1.0  # zero parameters: the Galerkin weight

    net.theta = np.linspace(-0.4, 0.4, 15)
    path = str(tmp_path / "model.json")
    gf.save_weightnet_json(net, path)
    back = gf.load_weightnet_json(path)
    assert np.array_equal(np.asarray(back.theta), np.asarray(net.theta))


def test_galerkin_recovery():
    problem = gf.make_diffusion_1d_problem([gf.QoiSpec.point_value(0.6)])
    trial = gf.Space1D(gf.build_interval_mesh(1), 1, gf.BoundaryCondition.left_dirichlet)
    disc = gf.MixedDiscretization(trial, trial, problem, 5, gf.GKind.exp)
    op = disc.condense(np.zeros(disc.param_count()))
    qoi = op.online_qoi(disc.assemble_load(0.5))
    assert qoi[0] == pytest.approx(0.3, abs=1e-13)


def test_benchmarks_and_training():
    catalog = gf.benchmark_catalog()
    assert [b.id for b in catalog] == [
        "diffusion1d",
        "advection1d",
        "advection1d2qoi",
        "diffusion2d",
    ]
    adv = gf.find_benchmark("advection1d")
    assert gf.exact_qoi(adv, 0.0)[0] == pytest.approx(0.405, abs=1e-15)

    # a short training run on a miniature setup
    problem = gf.make_advection_1d_problem([gf.QoiSpec.point_value(0.9)])
    trial = gf.Space1D(gf.build_interval_mesh(1), 1, gf.BoundaryCondition.left_dirichlet)
    test = gf.Space1D(gf.build_interval_mesh(8), 1, gf.BoundaryCondition.none)
    disc = gf.MixedDiscretization(trial, test, problem, 2, gf.GKind.sigmoid)
    training_set = [
        gf.TrainingSample(lam, np.array([problem.exact(lam, 0.9)])) for lam in (0.0, 0.5, 1.0)
    ]
    config = gf.TrainConfig()
    config.max_iterations = 50
    config.tolerance = 1e-30
    theta0 = gf.random_initial_theta(disc.param_count(), 42)
    run = gf.train(config, disc, training_set, theta0)
    assert run.final_loss <= run.history[0].loss
    assert len(run.history) == run.iterations + 1

    loss0 = gf.loss(theta0, training_set, disc)
    assert loss0 == pytest.approx(run.history[0].loss)


def test_optimal_test_function():
    net = gf.WeightNet.make(1, 1, gf.GKind.affine_sigmoid)
    net.theta = np.array([48.5, -9.0])
    phi = gf.OptimalTestFunction1D(net, 2048)
    err = gf.optimal_test_rel_error(phi, 0.15, 0.1)
    assert err < 0.007  # the near-optimal slope from the slope scan

    trivial = gf.OptimalTestFunction1D(gf.WeightNet.make(1, 5, gf.GKind.exp), 256)
    assert trivial(0.7) == pytest.approx(0.7, abs=1e-12)


def test_condensed_roundtrip(tmp_path):
    problem = gf.make_advection_1d_problem([gf.QoiSpec.point_value(0.9)])
    trial = gf.Space1D(gf.build_interval_mesh(2), 1, gf.BoundaryCondition.left_dirichlet)
    test = gf.Space1D(gf.build_interval_mesh(16), 1, gf.BoundaryCondition.none)
    disc = gf.MixedDiscretization(trial, test, problem, 2, gf.GKind.sigmoid)
    theta = gf.random_initial_theta(disc.param_count(), 3)
    op = disc.condense(theta)
    path = str(tmp_path / "condensed.bin")
    op.save(path)
    online = gf.OnlineOperator.load(path)
    load = disc.assemble_load(0.37)
    assert online.online_qoi(load)[0] == op.online_qoi(load)[0]


def test_exact_solution_formulas():
    d1 = gf.find_benchmark("diffusion1d")
    assert gf.exact_solution(d1, 0.15, 0.1) == pytest.approx(0.1)
    adv = gf.find_benchmark("advection1d")
    assert gf.exact_solution(adv, 0.19, 0.9) == pytest.approx(0.5 * 0.71**2)
    d2 = gf.find_benchmark("diffusion2d")
    assert gf.exact_solution(d2, 0.5, 0.0, 0.3) == 0.0
    assert gf.exact_solution(d2, 1.0, 0.5, 0.5) == pytest.approx(
        math.sin(math.pi * 0.5) ** 4, abs=1e-14
    )
