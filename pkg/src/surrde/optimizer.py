"""Differential Evolution (rand/1/exp) with a surrogate accept/discard filter.

The loop builds every generation's challengers from the generation-start
population snapshot, so accepted challengers can be truly evaluated as one
batch (results are always applied in slot order, making parallel evaluation
indistinguishable from sequential). Replacement compares each challenger's
true fitness against its own slot only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Bounds, EvaluationLedger, RngStreams, is_better
from .strategies import RunningMeans, StrategyFlags, combined_accept, diversity_distance
from .surrogate import SurrogateConfig, in_warmup, make_surrogate


@dataclass
class DEConfig:
    budget: int
    pop_size: int = 15
    mutation: float = 0.5  # F
    recombination: float = 0.5  # CR
    no_improvement_limit: int = 50
    variant: str = "rand/1/exp"

    def __post_init__(self):
        if self.pop_size < 4:
            raise ValueError("rand/1 mutation needs at least 4 individuals")
        if not (0.0 <= self.mutation <= 1.0 and 0.0 <= self.recombination <= 1.0):
            raise ValueError("mutation and recombination factors must be in [0, 1]")
        if self.variant != "rand/1/exp":
            raise ValueError("only the rand/1/exp variant is supported")


@dataclass
class GenerationLog:
    generation: int
    evaluations_used: int
    best_fitness: float
    accepted: int
    discarded: int
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0


@dataclass
class RunRecord:
    best_curve: list
    generations: list
    termination: str
    evaluations_used: int
    final_best: float
    initial_population: list  # (vector tuple, fitness) pairs
    shadow: bool = False
    confusion: tuple = (0, 0, 0, 0)  # (TP, FP, TN, FN), shadow mode only


def init_population(cfg: DEConfig, bounds: Bounds, rng: np.random.Generator):
    if cfg.budget < cfg.pop_size:
        raise ValueError("budget smaller than the initial population size")
    return bounds.sample(rng, cfg.pop_size)


def mutate_rand1(pop, r1: int, r2: int, r3: int, factor: float, bounds: Bounds):
    v = pop[r1] + factor * (pop[r2] - pop[r3])
    return bounds.clamp(v)


def crossover_exp(target, mutant, cr: float, rng: np.random.Generator):
    """Exponential crossover: a circular run of mutant components from a
    random start, extended while uniform draws stay below CR; at least one
    component always comes from the mutant."""
    dim = target.shape[0]
    trial = target.copy()
    j = int(rng.integers(dim))
    copied = 0
    while True:
        trial[j] = mutant[j]
        copied += 1
        j = (j + 1) % dim
        if copied >= dim or rng.random() >= cr:
            break
    return trial


class OptimizationRun:
    """One surrogate-assisted (or plain) DE run against a single objective."""

    def __init__(
        self,
        de_cfg: DEConfig,
        bounds: Bounds,
        evaluator,
        streams: RngStreams,
        surrogate_cfg: SurrogateConfig | None = None,
        flags: StrategyFlags | None = None,
        shadow: bool = False,
        filter_override=None,
    ):
        self.cfg = de_cfg
        self.bounds = bounds
        self.evaluator = evaluator
        self.streams = streams
        self.surrogate_cfg = surrogate_cfg
        self.flags = flags if flags is not None else StrategyFlags()
        self.shadow = shadow
        self.filter_override = filter_override
        self.surrogate = (
            make_surrogate(surrogate_cfg, bounds.dim) if surrogate_cfg else None
        )
        self.means = RunningMeans()
        self.ledger = EvaluationLedger(de_cfg.budget)
        self._evaluated: list[np.ndarray] = []

    # -- internal helpers ---------------------------------------------------

    def _ingest(self, vector, fitness):
        if self.surrogate is not None:
            self.surrogate.ingest(vector, fitness)

    def _register_evaluated(self, vector, post_warmup: bool):
        if self._evaluated and post_warmup:
            self.means.update_nn(diversity_distance(vector, self._evaluated))
        self._evaluated.append(np.asarray(vector, dtype=float))

    def _decide(self, current_vec, current_q, challenger, active: bool):
        """Returns (accept, consulted, verdict)."""
        if self.filter_override is not None:
            verdict = bool(self.filter_override(current_vec, current_q, challenger))
            consulted = True
            q_hat_x = q_hat_c = None
        elif not active:
            return True, False, None
        elif self.surrogate_cfg.approach == "surface":
            q_hat_c = self.surrogate.estimate(challenger)
            verdict = q_hat_c < current_q
            consulted = True
            q_hat_x = (
                self.surrogate.estimate(current_vec) if self.flags.use_qual else None
            )
        else:
            verdict = self.surrogate.estimate(current_vec, challenger)
            consulted = True
            q_hat_x = q_hat_c = None

        nn = None
        if self.flags.use_diver and self._evaluated:
            nn = diversity_distance(challenger, self._evaluated)
        accept = combined_accept(
            verdict,
            self.flags,
            self.means,
            self.streams.get("strategy_bernoulli"),
            q_hat_x=q_hat_x,
            q_hat_challenger=q_hat_c,
            nn_distance=nn,
        )
        if self.flags.use_qual and q_hat_x is not None and q_hat_c is not None:
            self.means.update_pair(abs(q_hat_x - q_hat_c))
        return accept, consulted, verdict

    # -- main loop ----------------------------------------------------------

    def run(self) -> RunRecord:
        cfg = self.cfg
        pop = init_population(cfg, self.bounds, self.streams.get("population_init"))
        fitness = np.asarray(self.evaluator(list(pop)), dtype=float)
        for vec, fit in zip(pop, fitness):
            self.ledger.record(fit)
            self._ingest(vec, fit)
            self._register_evaluated(vec, post_warmup=False)
        initial = [(tuple(v), float(f)) for v, f in zip(pop, fitness)]

        de_rng = self.streams.get("de_operators")
        learn_rng = self.streams.get("learner_training")
        gen_logs: list[GenerationLog] = []
        confusion = [0, 0, 0, 0]
        no_improve = 0
        generation = 0
        termination = "budget" if self.ledger.exhausted else None

        while termination is None:
            best_before = self.ledger.best()
            snapshot = pop.copy()
            snap_fit = fitness.copy()

            # Build all challengers from the snapshot.
            challengers = []
            for i in range(cfg.pop_size):
                others = np.array([j for j in range(cfg.pop_size) if j != i])
                r1, r2, r3 = de_rng.choice(others, size=3, replace=False)
                mutant = mutate_rand1(
                    snapshot, r1, r2, r3, cfg.mutation, self.bounds
                )
                challengers.append(
                    crossover_exp(snapshot[i], mutant, cfg.recombination, de_rng)
                )

            active = (
                self.surrogate is not None
                and not in_warmup(generation, self.surrogate_cfg)
                and self.surrogate.fitted
            ) or self.filter_override is not None
            post_warmup = active

            decisions = []
            for i in range(cfg.pop_size):
                decisions.append(
                    self._decide(snapshot[i], snap_fit[i], challengers[i], active)
                )
            accepted_count = sum(1 for a, _, _ in decisions if a)

            # True evaluations for this generation, in slot order, capped by
            # the remaining budget.
            if self.shadow:
                slots = list(range(cfg.pop_size))
            else:
                slots = [i for i in range(cfg.pop_size) if decisions[i][0]]
            truncated = len(slots) > self.ledger.remaining
            slots = slots[: self.ledger.remaining]
            values = self.evaluator([challengers[i] for i in slots]) if slots else []

            gen_conf = [0, 0, 0, 0]
            for i, value in zip(slots, values):
                value = float(value)
                self.ledger.record(value)
                accept, consulted, _ = decisions[i]
                if self.shadow and consulted:
                    truly_better = is_better(value, snap_fit[i])
                    if truly_better and accept:
                        gen_conf[0] += 1
                    elif not truly_better and accept:
                        gen_conf[1] += 1
                    elif not truly_better and not accept:
                        gen_conf[2] += 1
                    else:
                        gen_conf[3] += 1
                if not accept:
                    continue  # shadow mode: measured, but the search discards it
                if is_better(value, fitness[i]):
                    pop[i] = challengers[i]
                    fitness[i] = value
                self._ingest(challengers[i], value)
                self._register_evaluated(challengers[i], post_warmup)

            if self.surrogate is not None:
                self.surrogate.retrain(learn_rng)

            for k in range(4):
                confusion[k] += gen_conf[k]
            gen_logs.append(
                GenerationLog(
                    generation=generation,
                    evaluations_used=self.ledger.used,
                    best_fitness=self.ledger.best(),
                    accepted=accepted_count,
                    discarded=cfg.pop_size - accepted_count,
                    tp=gen_conf[0],
                    fp=gen_conf[1],
                    tn=gen_conf[2],
                    fn=gen_conf[3],
                )
            )

            if is_better(self.ledger.best(), best_before):
                no_improve = 0
            else:
                no_improve += 1

            generation += 1
            if self.ledger.exhausted or truncated:
                termination = "budget"
            elif no_improve >= cfg.no_improvement_limit:
                termination = "no_improvement"

        return RunRecord(
            best_curve=list(self.ledger.best_curve),
            generations=gen_logs,
            termination=termination,
            evaluations_used=self.ledger.used,
            final_best=self.ledger.best(),
            initial_population=initial,
            shadow=self.shadow,
            confusion=tuple(confusion),
        )


def run_optimization(
    de_cfg: DEConfig,
    bounds: Bounds,
    evaluator,
    streams: RngStreams,
    surrogate_cfg: SurrogateConfig | None = None,
    flags: StrategyFlags | None = None,
    filter_override=None,
) -> RunRecord:
    return OptimizationRun(
        de_cfg, bounds, evaluator, streams, surrogate_cfg, flags,
        filter_override=filter_override,
    ).run()


def run_shadow(
    de_cfg: DEConfig,
    bounds: Bounds,
    evaluator,
    streams: RngStreams,
    surrogate_cfg: SurrogateConfig | None = None,
    flags: StrategyFlags | None = None,
    filter_override=None,
) -> RunRecord:
    return OptimizationRun(
        de_cfg, bounds, evaluator, streams, surrogate_cfg, flags,
        shadow=True, filter_override=filter_override,
    ).run()
