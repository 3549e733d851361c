import numpy as np
import pytest

from surrde.benchmarks import (
    BASE_FUNCTIONS,
    BenchmarkSpec,
    evaluate,
    evaluate_base,
    make_suite,
)
from surrde.core import Bounds


class TestBaseFunctions:
    @pytest.mark.parametrize("kind", sorted(BASE_FUNCTIONS))
    def test_zero_at_origin(self, kind):
        assert evaluate_base(kind, np.zeros(6)) == pytest.approx(0.0, abs=1e-12)

    def test_sphere(self):
        assert evaluate_base("sphere", [1.0, 1.0]) == 2.0

    def test_rastrigin_at_zero(self):
        assert evaluate_base("rastrigin", [0.0, 0.0]) == pytest.approx(0.0)

    def test_ackley_at_zero(self):
        assert evaluate_base("ackley", np.zeros(10)) == pytest.approx(0.0, abs=1e-12)

    def test_rastrigin_formula(self):
        z = np.array([0.5, -1.5])
        expected = 10 * 2 + sum(v * v - 10 * np.cos(2 * np.pi * v) for v in z)
        assert evaluate_base("rastrigin", z) == pytest.approx(expected)

    def test_unknown_kind(self):
        with pytest.raises(KeyError):
            evaluate_base("mystery", [0.0])

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            evaluate_base("sphere", [np.nan, 0.0])

    def test_deterministic(self):
        z = np.random.default_rng(0).normal(size=12)
        for kind in BASE_FUNCTIONS:
            assert evaluate_base(kind, z) == evaluate_base(kind, z)


class TestEvaluate:
    def _spec(self, kinds, dim, shift):
        return BenchmarkSpec(
            id="T",
            dim=dim,
            bounds=Bounds(np.full(dim, -5.0), np.full(dim, 5.0)),
            shift=shift,
            kinds=kinds,
        )

    def test_optimum_at_shift(self):
        shift = np.array([1.0, -2.0, 0.5])
        spec = self._spec(("sphere",), 3, shift)
        assert evaluate(spec, shift) == pytest.approx(0.0, abs=1e-12)

    def test_hybrid_optimum_at_shift(self):
        shift = np.array([1.0, -2.0, 0.5, 2.0])
        spec = self._spec(("sphere", "rastrigin"), 4, shift)
        assert evaluate(spec, shift) == pytest.approx(0.0, abs=1e-12)

    def test_hybrid_additivity_matches_plain(self):
        # hybrid(f, f) must equal plain f on any x (independent oracle path).
        shift = np.zeros(4)
        hybrid = self._spec(("sphere", "sphere"), 4, shift)
        plain = self._spec(("sphere",), 4, shift)
        x = np.array([1.0, 1.0, 1.0, 1.0])
        assert evaluate(hybrid, x) == evaluate(plain, x) == 4.0
        rng = np.random.default_rng(5)
        for _ in range(20):
            x = rng.uniform(-5, 5, size=4)
            assert evaluate(hybrid, x) == pytest.approx(evaluate(plain, x))

    def test_dimension_mismatch(self):
        spec = self._spec(("sphere",), 3, np.zeros(3))
        with pytest.raises(ValueError):
            evaluate(spec, np.zeros(4))


class TestMakeSuite:
    def test_nineteen_specs_dim_50(self):
        suite = make_suite(50, seed=7)
        assert len(suite) == 19
        assert all(s.dim == 50 for s in suite)
        assert [s.id for s in suite] == [f"F{i}" for i in range(1, 20)]

    def test_determinism(self):
        a = make_suite(10, seed=3)
        b = make_suite(10, seed=3)
        for sa, sb in zip(a, b):
            assert np.array_equal(sa.shift, sb.shift)

    def test_shift_inside_bounds_small_dim(self):
        for spec in make_suite(2, seed=1):
            assert spec.shift.shape == (2,)
            assert (spec.shift >= spec.bounds.lower).all()
            assert (spec.shift <= spec.bounds.upper).all()

    def test_every_spec_zero_at_shift(self):
        for spec in make_suite(8, seed=11):
            assert evaluate(spec, spec.shift) == pytest.approx(0.0, abs=1e-9)

    def test_simple_and_hybrid_split(self):
        suite = make_suite(6, seed=2)
        assert all(len(s.kinds) == 1 for s in suite[:11])
        assert all(len(s.kinds) == 2 for s in suite[11:])
        assert all(s.kinds[0] != s.kinds[1] for s in suite[11:])
