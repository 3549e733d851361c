import numpy as np
import pytest

from surrde.core import Bounds, RngStreams
from surrde.learners import LearnerSpec
from surrde.optimizer import (
    DEConfig,
    OptimizationRun,
    crossover_exp,
    init_population,
    mutate_rand1,
    run_optimization,
    run_shadow,
)
from surrde.strategies import StrategyFlags
from surrde.surrogate import SurrogateConfig


def sphere_evaluator(batch):
    return [float(np.sum(np.asarray(x) ** 2)) for x in batch]


def bounds(dim, lo=-5.0, hi=5.0):
    return Bounds(np.full(dim, lo), np.full(dim, hi))


def dt_pairwise(warmup=4, **kw):
    return SurrogateConfig(
        approach="pairwise",
        learner=LearnerSpec("decision_tree", "classifier"),
        warmup_generations=warmup,
        **kw,
    )


class TestInitPopulation:
    def test_size_and_bounds(self):
        cfg = DEConfig(budget=750, pop_size=15)
        pop = init_population(cfg, bounds(50), RngStreams(1, 0).get("population_init"))
        assert pop.shape == (15, 50)
        assert (np.abs(pop) <= 5.0).all()

    def test_seed_determinism(self):
        cfg = DEConfig(budget=100)
        a = init_population(cfg, bounds(5), RngStreams(9, 2).get("population_init"))
        b = init_population(cfg, bounds(5), RngStreams(9, 2).get("population_init"))
        assert np.array_equal(a, b)

    def test_budget_smaller_than_population(self):
        with pytest.raises(ValueError):
            init_population(
                DEConfig(budget=3, pop_size=4),
                bounds(2),
                RngStreams(0, 0).get("population_init"),
            )


class TestMutateRand1:
    def test_direct_arithmetic(self):
        pop = np.array([[9.0, 9.0], [1.0, 1.0], [2.0, 2.0], [0.0, 0.0]])
        out = mutate_rand1(pop, 1, 2, 3, 0.5, bounds(2))
        assert out.tolist() == [2.0, 2.0]

    def test_zero_factor(self):
        pop = np.array([[9.0, 9.0], [1.0, 1.0], [2.0, 2.0], [0.0, 0.0]])
        assert mutate_rand1(pop, 1, 2, 3, 0.0, bounds(2)).tolist() == [1.0, 1.0]

    def test_identical_donors(self):
        pop = np.array([[9.0, 9.0], [1.0, 1.0], [2.0, 2.0], [2.0, 2.0]])
        assert mutate_rand1(pop, 1, 2, 3, 0.7, bounds(2)).tolist() == [1.0, 1.0]

    def test_clamped(self):
        pop = np.array([[4.0, 4.0], [5.0, 5.0], [-5.0, -5.0], [0.0, 0.0]])
        out = mutate_rand1(pop, 1, 1, 2, 1.0, bounds(2))
        assert out.tolist() == [5.0, 5.0]


class TestCrossoverExp:
    def test_cr_zero_single_component(self):
        rng = np.random.default_rng(0)
        target = np.zeros(8)
        mutant = np.ones(8)
        out = crossover_exp(target, mutant, 0.0, rng)
        assert out.sum() == 1.0

    def test_cr_one_entire_mutant(self):
        rng = np.random.default_rng(0)
        out = crossover_exp(np.zeros(8), np.ones(8), 1.0, rng)
        assert out.sum() == 8.0

    def test_equal_vectors_unchanged(self):
        rng = np.random.default_rng(0)
        v = np.arange(5.0)
        assert crossover_exp(v.copy(), v.copy(), 0.5, rng).tolist() == v.tolist()

    def test_copied_block_is_circular_run(self):
        rng = np.random.default_rng(3)
        target = np.zeros(10)
        mutant = np.ones(10)
        out = crossover_exp(target, mutant, 0.7, rng)
        ones = np.flatnonzero(out == 1.0)
        n = len(ones)
        # the copied indices form one contiguous circular run
        start = ones[0]
        runs = {tuple(sorted((s + k) % 10 for k in range(n))) for s in range(10)}
        assert tuple(sorted(ones)) in runs


class TestRunOptimization:
    def test_plain_de_budget_exact(self):
        rec = run_optimization(
            DEConfig(budget=150, pop_size=15),
            bounds(10),
            sphere_evaluator,
            RngStreams(5, 0),
        )
        assert rec.termination == "budget"
        assert rec.evaluations_used == 150
        assert rec.best_curve[-1][0] == 150

    def test_identical_seeds_identical_records(self):
        def go():
            return run_optimization(
                DEConfig(budget=120, pop_size=10),
                bounds(6),
                sphere_evaluator,
                RngStreams(8, 1),
                dt_pairwise(warmup=2),
                StrategyFlags(use_prob=True),
            )

        a, b = go(), go()
        assert a.best_curve == b.best_curve
        assert a.generations == b.generations
        assert a.final_best == b.final_best

    def test_best_non_increasing_across_generations(self):
        rec = run_optimization(
            DEConfig(budget=200, pop_size=8),
            bounds(5),
            sphere_evaluator,
            RngStreams(3, 0),
        )
        bests = [g.best_fitness for g in rec.generations]
        assert all(a >= b for a, b in zip(bests, bests[1:]))

    def test_accepted_plus_discarded_is_pop_size(self):
        rec = run_optimization(
            DEConfig(budget=140, pop_size=10),
            bounds(4),
            sphere_evaluator,
            RngStreams(2, 0),
            dt_pairwise(warmup=2),
        )
        for g in rec.generations:
            assert g.accepted + g.discarded == 10

    def test_oracle_equivalence_infinite_warmup(self):
        # A never-activating surrogate must not perturb the trajectory.
        for seed in range(5):
            plain = run_optimization(
                DEConfig(budget=150, pop_size=15),
                bounds(10),
                sphere_evaluator,
                RngStreams(seed, 0),
            )
            shadowed = run_optimization(
                DEConfig(budget=150, pop_size=15),
                bounds(10),
                sphere_evaluator,
                RngStreams(seed, 0),
                dt_pairwise(warmup=10**9),
            )
            assert plain.best_curve == shadowed.best_curve
            assert plain.generations == shadowed.generations

    def test_reject_all_filter_stops_on_no_improvement(self):
        rec = run_optimization(
            DEConfig(budget=500, pop_size=6, no_improvement_limit=50),
            bounds(3),
            sphere_evaluator,
            RngStreams(4, 0),
            filter_override=lambda cur, q, ch: False,
        )
        assert rec.termination == "no_improvement"
        assert rec.evaluations_used == 6  # initial population only
        assert len(rec.generations) == 50
        assert all(g.accepted == 0 for g in rec.generations)

    def test_accept_all_override_consumes_pop_per_generation(self):
        rec = run_optimization(
            DEConfig(budget=60, pop_size=6),
            bounds(3),
            sphere_evaluator,
            RngStreams(4, 0),
            filter_override=lambda cur, q, ch: True,
        )
        for g in rec.generations:
            assert g.accepted == 6
        assert rec.evaluations_used == 60

    def test_initial_population_shared_across_configs(self):
        a = run_optimization(
            DEConfig(budget=40, pop_size=8),
            bounds(4),
            sphere_evaluator,
            RngStreams(77, 0),
        )
        b = run_optimization(
            DEConfig(budget=40, pop_size=8),
            bounds(4),
            sphere_evaluator,
            RngStreams(77, 0),
            dt_pairwise(warmup=1),
            StrategyFlags(use_diver=True),
        )
        assert a.initial_population == b.initial_population


class TestShadowMode:
    def test_oracle_filter_no_errors(self):
        # A filter that knows the true fitness makes no confusion errors.
        def oracle(cur_vec, cur_q, challenger):
            return sphere_evaluator([challenger])[0] < cur_q

        rec = run_shadow(
            DEConfig(budget=300, pop_size=10),
            bounds(4),
            sphere_evaluator,
            RngStreams(6, 0),
            filter_override=oracle,
        )
        tp, fp, tn, fn = rec.confusion
        assert fp == 0 and fn == 0
        assert tp > 0 and tn > 0

    def test_accept_all_sensitivity_one(self):
        rec = run_shadow(
            DEConfig(budget=200, pop_size=10),
            bounds(4),
            sphere_evaluator,
            RngStreams(6, 0),
            filter_override=lambda cur, q, ch: True,
        )
        tp, fp, tn, fn = rec.confusion
        assert fn == 0 and tn == 0
        assert tp + fp > 0

    def test_reject_all_specificity_one(self):
        rec = run_shadow(
            DEConfig(budget=200, pop_size=10, no_improvement_limit=10),
            bounds(4),
            sphere_evaluator,
            RngStreams(6, 0),
            filter_override=lambda cur, q, ch: False,
        )
        tp, fp, tn, fn = rec.confusion
        assert tp == 0 and fp == 0
        assert tn + fn > 0

    def test_shadow_counts_every_challenger_in_budget(self):
        rec = run_shadow(
            DEConfig(budget=100, pop_size=10),
            bounds(4),
            sphere_evaluator,
            RngStreams(1, 0),
            filter_override=lambda cur, q, ch: False,
        )
        # init 10 + every challenger truly evaluated until budget exhausted
        assert rec.evaluations_used == 100
        assert rec.termination == "budget"


class TestConfigValidation:
    def test_pop_size_minimum(self):
        with pytest.raises(ValueError):
            DEConfig(budget=100, pop_size=3)

    def test_factor_ranges(self):
        with pytest.raises(ValueError):
            DEConfig(budget=100, mutation=1.5)

    def test_variant_pinned(self):
        with pytest.raises(ValueError):
            DEConfig(budget=100, variant="best/1/bin")
