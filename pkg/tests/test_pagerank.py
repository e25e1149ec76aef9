import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from bench.fixtures import STRESS_TELEPORT, STRESS_THETA
from bench.harness import run_pagerank_sweep
from markov.errors import DimensionMismatchError, StochasticityError, TensorStructureError
from markov.tensor import StochasticTensor, apply, apply_matrix, residual, validate
from pagerank.generator import gen_random_tensor
from pagerank.problem import PageRankProblem, pagerank_apply, solve_pagerank
from solvers.config import Method, SolverConfig


class TestOperator:
    def test_identity_base(self):
        p = PageRankProblem(StochasticTensor.from_dense(np.eye(2)), 0.5)
        assert_allclose(p.apply(np.array([1.0, 0.0])), [0.75, 0.25])

    def test_uniform_base_gives_uniform(self, random_simplex):
        p = PageRankProblem(StochasticTensor.uniform(3, 4), 0.85)
        assert_allclose(pagerank_apply(p, random_simplex(4)), np.full(4, 0.25), atol=1e-15)

    @pytest.mark.parametrize("order,dim", [(2, 5), (3, 3), (3, 5), (4, 3)])
    def test_matches_materialised_tensor(self, random_tensor, random_simplex, order, dim):
        v = random_simplex(dim)
        p = PageRankProblem(random_tensor(order, dim, seed=dim, density=0.5), 0.8, v)
        full = p.materialize()
        assert validate(full).ok
        for _ in range(10):
            x = random_simplex(dim)
            assert_allclose(p.apply(x), apply(full, x), atol=1e-14)
            assert_allclose(p.apply_matrix(x), apply_matrix(full, x), atol=1e-14)

    def test_teleport_read_only(self, fixture_i):
        p = PageRankProblem(fixture_i.tensor, 0.5)
        with pytest.raises(ValueError):
            p.teleport[0] = 1.0


class TestValidation:
    @pytest.mark.parametrize("theta", [0.0, 1.0, -0.2, 1.5])
    def test_damping_range(self, fixture_i, theta):
        with pytest.raises(ValueError, match="damping"):
            PageRankProblem(fixture_i.tensor, theta)

    def test_teleport_length(self, fixture_i):
        with pytest.raises(DimensionMismatchError, match="teleport"):
            PageRankProblem(fixture_i.tensor, 0.5, np.array([0.5, 0.5]))

    def test_teleport_on_simplex(self, fixture_i):
        with pytest.raises(StochasticityError):
            PageRankProblem(fixture_i.tensor, 0.5, np.array([0.5, 0.5, 0.5]))

    def test_dimension_checked_on_apply(self, fixture_i):
        p = PageRankProblem(fixture_i.tensor, 0.5)
        with pytest.raises(DimensionMismatchError):
            p.apply(np.array([0.5, 0.5]))


class TestSolve:
    def test_small_damping_all_methods_agree(self, random_tensor):
        p = PageRankProblem(random_tensor(3, 5, seed=11, density=0.5), 0.1)
        solutions = [
            solve_pagerank(p, SolverConfig(method=m, beta=0.1, eta=0.1)).final_x for m in Method
        ]
        for x in solutions[1:]:
            assert_allclose(x, solutions[0], atol=1e-9)

    def test_uniform_base_converges_in_one_step(self):
        p = PageRankProblem(StochasticTensor.uniform(3, 5), 0.7)
        report = solve_pagerank(p, SolverConfig())
        assert report.converged
        assert report.iterations == 1

    @pytest.mark.parametrize("method", [Method.HOPM, Method.GEAP, Method.RHOPM, Method.QEHOPM])
    def test_fixed_point(self, random_tensor, method):
        p = PageRankProblem(random_tensor(3, 6, seed=4, density=0.5), 0.85)
        report = solve_pagerank(p, SolverConfig(method=method))
        assert report.converged
        x = report.final_x
        fixed = 0.85 * p.base.apply(x) + 0.15 * p.teleport
        assert np.abs(fixed - x).sum() < 10 * 1e-10

    def test_strong_damping_on_rotating_chain(self, cyclic):
        p = PageRankProblem(cyclic, STRESS_THETA, np.array(STRESS_TELEPORT))
        hopm = solve_pagerank(p, SolverConfig(max_iter=1000))
        assert not hopm.converged

        qe = solve_pagerank(p, SolverConfig(method=Method.QEHOPM, max_iter=1000))
        assert qe.converged
        assert qe.iterations <= 10
        assert residual(p, qe.final_x) <= 1e-10

    def test_moderate_damping_on_rotating_chain(self, cyclic):
        p = PageRankProblem(cyclic, 0.7, np.array(STRESS_TELEPORT))
        hopm = solve_pagerank(p, SolverConfig())
        qe = solve_pagerank(p, SolverConfig(method=Method.QEHOPM))
        assert hopm.converged and qe.converged
        assert qe.iterations < hopm.iterations
        assert_allclose(qe.final_x, hopm.final_x, atol=1e-9)


class TestGenerator:
    def test_reproducible(self):
        a = gen_random_tensor(3, 5, 0.5, seed=7)
        b = gen_random_tensor(3, 5, 0.5, seed=7)
        assert_array_equal(a.subs, b.subs)
        assert_array_equal(a.vals, b.vals)
        c = gen_random_tensor(3, 5, 0.5, seed=8)
        assert not np.array_equal(a.to_dense(), c.to_dense())

    def test_full_density(self):
        assert gen_random_tensor(3, 4, 1.0, seed=0).nnz == 4 ** 3

    def test_sparse_columns_never_empty(self):
        t = gen_random_tensor(3, 6, 0.05, seed=1)
        assert validate(t).ok
        assert np.all(t.to_dense().sum(axis=0) > 0)

    def test_blend_floor(self):
        t = gen_random_tensor(3, 4, 0.3, seed=2, uniform_blend=0.4)
        assert t.to_dense().min() >= 0.4 / 4 - 1e-15

    @pytest.mark.parametrize("kw,err", [
        ({"order": 1}, TensorStructureError),
        ({"dim": 0}, TensorStructureError),
        ({"density": 0.0}, ValueError),
        ({"density": 1.5}, ValueError),
        ({"uniform_blend": 1.5}, ValueError),
    ])
    def test_bad_parameters(self, kw, err):
        args = {"order": 3, "dim": 3, "density": 0.5, "seed": 0, **kw}
        with pytest.raises(err):
            gen_random_tensor(**args)


@pytest.mark.bench
class TestSweep:
    def test_reliability_pattern(self):
        report = run_pagerank_sweep()
        assert len(report.rows) == 29 * 5 * 3
        summary = {(s["theta"], s["method"]): s for s in report.summary()}
        for method in ("hopm", "qehopm"):
            assert summary[(0.7, method)]["converged"] == 29
        for theta in (0.7, 0.85, 0.9, 0.95, 0.99):
            qe = summary[(theta, "qehopm")]["converged"]
            assert qe >= summary[(theta, "hopm")]["converged"]
            assert qe >= summary[(theta, "rhopm")]["converged"]

        outcome = {(r.seed, r.theta, r.method): r.converged for r in report.rows}
        for (seed, theta, method), converged in outcome.items():
            if method == "hopm" and converged:
                assert outcome[(seed, theta, "qehopm")]
        assert report.reliability_flags() == []
