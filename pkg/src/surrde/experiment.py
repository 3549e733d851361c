"""Experiment-matrix execution, result persistence, and report tables.

An experiment is described by a versioned INI file, executed as a matrix of
(function, configuration, run) tasks, and persisted as one plain-text file
per run plus a manifest. Runs are independent and internally deterministic,
so the matrix can execute on a process pool; the store contains no
timestamps and is byte-identical across re-executions with the same config.
"""

from __future__ import annotations

import ast
import concurrent.futures
import configparser
import traceback
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.stats

from .benchmarks import make_suite
from .core import RngStreams
from .learners import LearnerSpec, fit, latin_hypercube_sample, predict_value
from .metrics import confusion_rates, delta_e, zeta
from .optimizer import DEConfig, GenerationLog, run_optimization, run_shadow
from .stats import average_ranking, friedman_test, holm_correction, wilcoxon_signed_rank
from .strategies import StrategyFlags
from .surrogate import DEFAULT_TRAIL_SIZE, SurrogateConfig

SCHEMA_VERSION = 1
STRATEGY_TOKENS = ("probability", "quality_distance", "diversity")
RUN_FILE_MAGIC = "# surrde-run v1"
MANIFEST_NAME = "manifest.txt"

_EXPERIMENT_KEYS = {
    "schema_version", "dimension", "suite_seed", "functions", "repetitions",
    "base_seed", "budget_multiplier", "output_dir", "workers",
}
_ENTRY_KEYS = {
    "approach", "learner", "strategies", "warmup", "mapping", "trail", "shadow",
}


@dataclass(frozen=True)
class ConfigEntry:
    """One optimizer configuration (a column of the experiment matrix)."""

    label: str
    approach: str  # "none" | "surface" | "pairwise"
    learner: str | None = None
    strategies: tuple[str, ...] = ()
    warmup: int | None = None
    mapping: str = "extended"
    trail: int = DEFAULT_TRAIL_SIZE
    shadow: bool = False

    def __post_init__(self):
        if self.approach not in ("none", "surface", "pairwise"):
            raise ValueError(f"unknown approach {self.approach!r}")
        if self.approach == "none":
            if self.learner is not None:
                raise ValueError("approach 'none' takes no learner")
            if self.strategies:
                raise ValueError("approach 'none' takes no strategies")
        elif self.learner is None:
            raise ValueError(f"configuration {self.label!r} needs a learner")
        for token in self.strategies:
            if token not in STRATEGY_TOKENS:
                raise ValueError(f"unknown strategy {token!r}")
        if len(set(self.strategies)) != len(self.strategies):
            raise ValueError("duplicate strategy tokens")

    def surrogate_config(self) -> SurrogateConfig | None:
        if self.approach == "none":
            return None
        mode = "regressor" if self.approach == "surface" else "classifier"
        return SurrogateConfig(
            approach=self.approach,
            learner=LearnerSpec(self.learner, mode),
            warmup_generations=self.warmup,
            trail_size=self.trail,
            mapping=self.mapping,
        )

    def strategy_flags(self) -> StrategyFlags | None:
        if not self.strategies:
            return None
        return StrategyFlags(
            use_prob="probability" in self.strategies,
            use_qual="quality_distance" in self.strategies,
            use_diver="diversity" in self.strategies,
        )


@dataclass(frozen=True)
class ExperimentConfig:
    dimension: int
    suite_seed: int
    functions: tuple[str, ...]
    entries: tuple[ConfigEntry, ...]
    repetitions: int = 15
    base_seed: int = 0
    budget_multiplier: int = 15
    output_dir: str = "results"
    workers: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.entries:
            raise ValueError("at least one configuration is required")
        labels = [e.label for e in self.entries]
        if len(set(labels)) != len(labels):
            raise ValueError("configuration labels must be unique")
        if not self.functions:
            raise ValueError("at least one function is required")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def budget(self) -> int:
        return self.budget_multiplier * self.dimension


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def load_config(path) -> ExperimentConfig:
    """Read an experiment INI file; unknown sections or keys are errors."""
    parser = configparser.ConfigParser(interpolation=None)
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(path)
    if "experiment" not in parser:
        raise ValueError("missing [experiment] section")
    exp = parser["experiment"]
    unknown = set(exp) - _EXPERIMENT_KEYS
    if unknown:
        raise ValueError(f"unknown [experiment] keys: {sorted(unknown)}")
    version = int(exp.get("schema_version", "-1"))
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {version}")

    entries = []
    for section in parser.sections():
        if section == "experiment":
            continue
        if not section.startswith("config."):
            raise ValueError(f"unknown section [{section}]")
        sec = parser[section]
        unknown = set(sec) - _ENTRY_KEYS
        if unknown:
            raise ValueError(f"unknown keys in [{section}]: {sorted(unknown)}")
        entries.append(ConfigEntry(
            label=section[len("config."):],
            approach=sec.get("approach", "none"),
            learner=sec.get("learner") or None,
            strategies=tuple(sec.get("strategies", "").split()),
            warmup=int(sec["warmup"]) if "warmup" in sec else None,
            mapping=sec.get("mapping", "extended"),
            trail=int(sec.get("trail", str(DEFAULT_TRAIL_SIZE))),
            shadow=_parse_bool(sec.get("shadow", "false")),
        ))

    return ExperimentConfig(
        dimension=int(exp["dimension"]),
        suite_seed=int(exp["suite_seed"]),
        functions=tuple(exp["functions"].split()),
        entries=tuple(entries),
        repetitions=int(exp.get("repetitions", "15")),
        base_seed=int(exp.get("base_seed", "0")),
        budget_multiplier=int(exp.get("budget_multiplier", "15")),
        output_dir=exp.get("output_dir", "results"),
        workers=int(exp.get("workers", "1")),
    )


# --------------------------------------------------------------------------
# Run persistence


@dataclass
class RunResult:
    """A persisted run, as loaded back from its store file."""

    function: str
    config: str
    run: int
    approach: str
    final_best: float
    evaluations_used: int
    termination: str
    shadow: bool
    best_curve: list
    generations: list  # GenerationLog
    confusion: tuple


def format_run_record(function: str, config: str, run: int, record,
                      approach: str = "none") -> str:
    lines = [
        RUN_FILE_MAGIC,
        f"# function = {function!r}",
        f"# config = {config!r}",
        f"# run = {run!r}",
        f"# approach = {approach!r}",
        f"# final_best = {float(record.final_best)!r}",
        f"# evaluations_used = {record.evaluations_used!r}",
        f"# termination = {record.termination!r}",
        f"# shadow = {record.shadow!r}",
        f"# confusion = {tuple(record.confusion)!r}",
        "[curve]",
        "used best",
    ]
    lines.extend(f"{used} {float(best)!r}" for used, best in record.best_curve)
    lines.append("[generations]")
    lines.append("generation evaluations_used best_fitness accepted discarded tp fp tn fn")
    for g in record.generations:
        lines.append(
            f"{g.generation} {g.evaluations_used} {float(g.best_fitness)!r} "
            f"{g.accepted} {g.discarded} {g.tp} {g.fp} {g.tn} {g.fn}"
        )
    return "\n".join(lines) + "\n"


def parse_run_file(path) -> RunResult:
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or lines[0] != RUN_FILE_MAGIC:
        raise ValueError(f"{path}: not a run file")
    meta = {}
    i = 1
    while i < len(lines) and lines[i].startswith("# "):
        key, _, value = lines[i][2:].partition(" = ")
        meta[key] = ast.literal_eval(value)
        i += 1
    if lines[i] != "[curve]":
        raise ValueError(f"{path}: missing [curve] section")
    i += 2  # skip header row
    curve = []
    while lines[i] != "[generations]":
        used, best = lines[i].split()
        curve.append((int(used), float(best)))
        i += 1
    i += 2  # skip header row
    gens = []
    for line in lines[i:]:
        parts = line.split()
        gens.append(GenerationLog(
            generation=int(parts[0]), evaluations_used=int(parts[1]),
            best_fitness=float(parts[2]), accepted=int(parts[3]),
            discarded=int(parts[4]), tp=int(parts[5]), fp=int(parts[6]),
            tn=int(parts[7]), fn=int(parts[8]),
        ))
    return RunResult(
        function=meta["function"], config=meta["config"], run=meta["run"],
        approach=meta["approach"], final_best=meta["final_best"],
        evaluations_used=meta["evaluations_used"],
        termination=meta["termination"], shadow=meta["shadow"],
        best_curve=curve, generations=gens, confusion=tuple(meta["confusion"]),
    )


def run_file_name(function: str, config: str, run: int) -> str:
    safe = config.replace("/", "--")
    return f"{function}__{safe}__run{run:03d}.txt"


@dataclass
class ResultStore:
    """A directory of per-run files plus a manifest of task outcomes."""

    root: Path
    manifest: dict = field(default_factory=dict)  # (fn, cfg, run) -> status

    @property
    def failures(self) -> list:
        return sorted(k for k, v in self.manifest.items() if v != "done")

    def path(self, function: str, config: str, run: int) -> Path:
        return self.root / run_file_name(function, config, run)

    def load(self, function: str, config: str, run: int) -> RunResult:
        return parse_run_file(self.path(function, config, run))

    def load_all(self) -> list[RunResult]:
        return [self.load(*key) for key, status in sorted(self.manifest.items())
                if status == "done"]

    def write_manifest(self) -> None:
        lines = [
            f"{fn}\t{cfg}\t{run}\t{status}\t{run_file_name(fn, cfg, run)}"
            for (fn, cfg, run), status in sorted(self.manifest.items())
        ]
        (self.root / MANIFEST_NAME).write_text("\n".join(lines) + "\n")


def open_store(root) -> ResultStore:
    root = Path(root)
    store = ResultStore(root=root)
    manifest = root / MANIFEST_NAME
    if not manifest.exists():
        raise FileNotFoundError(f"no manifest under {root}")
    for line in manifest.read_text().splitlines():
        fn, cfg, run, status, _ = line.split("\t")
        store.manifest[(fn, cfg, int(run))] = status
    return store


# --------------------------------------------------------------------------
# Matrix execution


def _execute_task(cfg: ExperimentConfig, entry: ConfigEntry,
                  function: str, run: int) -> str:
    """Run one matrix cell and return the serialized run file content."""
    suite = {s.id: s for s in make_suite(cfg.dimension, cfg.suite_seed)}
    if function not in suite:
        raise ValueError(f"unknown suite function {function!r}")
    spec = suite[function]
    evaluator = lambda batch: [spec.evaluate(x) for x in batch]
    streams = RngStreams(cfg.base_seed, run)
    runner = run_shadow if entry.shadow else run_optimization
    record = runner(
        DEConfig(budget=cfg.budget), spec.bounds, evaluator, streams,
        surrogate_cfg=entry.surrogate_config(),
        flags=entry.strategy_flags(),
    )
    return format_run_record(function, entry.label, run, record,
                             approach=entry.approach)


def _task_worker(args):
    cfg, entry, function, run = args
    try:
        return (function, entry.label, run), "done", _execute_task(cfg, entry, function, run)
    except Exception:
        return (function, entry.label, run), "failed", traceback.format_exc()


def run_experiment(cfg: ExperimentConfig, skip_existing: bool = False) -> ResultStore:
    """Execute the full (function x configuration x run) matrix."""
    root = Path(cfg.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    store = ResultStore(root=root)

    pending = []
    for function in cfg.functions:
        for entry in cfg.entries:
            for run in range(cfg.repetitions):
                key = (function, entry.label, run)
                if skip_existing and store.path(*key).exists():
                    store.manifest[key] = "done"
                    continue
                pending.append((cfg, entry, function, run))

    if cfg.workers > 1 and len(pending) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = pool.map(_task_worker, pending)
            for outcome in outcomes:
                _store_outcome(store, outcome)
    else:
        for task in pending:
            _store_outcome(store, _task_worker(task))

    store.write_manifest()
    return store


def _store_outcome(store: ResultStore, outcome) -> None:
    """Persist one run as soon as it finishes, so interrupted matrices resume."""
    key, status, payload = outcome
    store.manifest[key] = status
    path = store.path(*key)
    target = path if status == "done" else path.with_suffix(".error.txt")
    tmp = target.with_suffix(target.suffix + ".part")
    tmp.write_text(payload)
    tmp.replace(target)


# --------------------------------------------------------------------------
# Offline Kriging baseline

FULL_SCALE_INNER_ALLOWANCE = 60000  # per dimension, as reported; desk runs scale this down


@dataclass(frozen=True)
class KrigingOfflineResult:
    lhs_best: float
    final_true_fitness: float
    inner_best_predicted: float
    evaluations_used: int


def run_kriging_offline(bounds, evaluator, budget: int, streams: RngStreams,
                        inner_allowance: int) -> KrigingOfflineResult:
    """Fit a GPR on budget-1 true evaluations, optimize its mean, verify once.

    The model is trained once on a Latin-hypercube sample; a plain DE run
    then searches the model's predictive mean with `inner_allowance`
    model-only evaluations (no true-function cost), and the single reserved
    budget unit truly evaluates the proposed optimum.
    """
    if budget < 2:
        raise ValueError("budget must leave room for the final true evaluation")
    rng = streams.get("population_init")
    X = latin_hypercube_sample(budget - 1, bounds, rng)
    y = np.asarray(evaluator([np.asarray(row) for row in X]), dtype=float)
    model = fit(LearnerSpec("gpr", "regressor"), X, y, streams.get("learner_training"))

    # The inner DE spends model-only evaluations; remember the best vector it
    # proposes so the reserved budget unit can truly evaluate it.
    state = {"best": None, "value": np.inf}

    def surrogate_eval(batch):
        values = [predict_value(model, x) for x in batch]
        for x, v in zip(batch, values):
            if v < state["value"]:
                state["best"], state["value"] = np.array(x, dtype=float), v
        return values

    inner = run_optimization(
        DEConfig(budget=inner_allowance), bounds, surrogate_eval, streams,
    )
    final_true = evaluator([state["best"]])[0]
    return KrigingOfflineResult(
        lhs_best=float(y.min()),
        final_true_fitness=float(final_true),
        inner_best_predicted=float(inner.final_best),
        evaluations_used=budget,
    )


# --------------------------------------------------------------------------
# Reports

REPORT_KINDS = ("ranking", "stats", "delta_e", "confusion", "zeta")
ALPHA = 0.05
ZETA_WINDOW = 40


def _result_matrix(results: list[RunResult]):
    """rows = functions, cols = config labels, cell = median final best."""
    functions = sorted({r.function for r in results})
    configs = sorted({r.config for r in results})
    matrix = np.empty((len(functions), len(configs)))
    for i, fn in enumerate(functions):
        for j, cfg in enumerate(configs):
            finals = [r.final_best for r in results
                      if r.function == fn and r.config == cfg]
            if not finals:
                raise ValueError(f"no runs for ({fn}, {cfg})")
            matrix[i, j] = float(np.median(finals))
    return functions, configs, matrix


def _write(out_dir: Path, name: str, lines: list[str]) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text("\n".join(lines) + "\n")
    return path


def report(store: ResultStore, kind: str, out_dir) -> list[Path]:
    """Emit delimiter-separated report tables for one report kind."""
    if kind not in REPORT_KINDS:
        raise ValueError(f"unknown report kind {kind!r}")
    results = store.load_all()
    if not results:
        raise ValueError("the result store is empty")
    out_dir = Path(out_dir)
    return _REPORT_BUILDERS[kind](results, out_dir)


def _report_ranking(results, out_dir):
    functions, configs, matrix = _result_matrix(results)
    if matrix.shape[0] >= 2 and matrix.shape[1] >= 2:
        mean_ranks = average_ranking(matrix)
    else:
        # a single function (or single config) still gets a rank column,
        # though no cross-problem comparison is possible
        mean_ranks = scipy.stats.rankdata(matrix, axis=1).mean(axis=0)
    order = np.argsort(mean_ranks, kind="stable")
    lines = ["config\tmean_rank"]
    lines += [f"{configs[j]}\t{float(mean_ranks[j])!r}" for j in order]
    paths = [_write(out_dir, "ranking.tsv", lines)]

    # Heat-map grid: one cell per (learner, strategy-set) among surrogate
    # configs, encoded from labels of the form learner-strategyset when
    # available; configs without that shape land in a residual row.
    grid = {}
    for j, label in enumerate(configs):
        learner, _, strat = label.partition("/")
        grid[(learner, strat or "default")] = mean_ranks[j]
    strat_cols = sorted({s for _, s in grid})
    lines = ["learner\t" + "\t".join(strat_cols)]
    for learner in sorted({l for l, _ in grid}):
        row = [learner]
        for s in strat_cols:
            value = grid.get((learner, s))
            row.append("" if value is None else repr(float(value)))
        lines.append("\t".join(row))
    paths.append(_write(out_dir, "ranking_grid.tsv", lines))
    return paths


def _report_stats(results, out_dir):
    functions, configs, matrix = _result_matrix(results)
    if len(configs) < 2:
        raise ValueError("statistical comparison needs at least two configs")
    mean_ranks = average_ranking(matrix)
    stat, friedman_p = friedman_test(matrix)
    reference = int(np.argmin(mean_ranks))
    others = [j for j in range(len(configs)) if j != reference]
    raw = []
    for j in others:
        _, p = wilcoxon_signed_rank(matrix[:, reference], matrix[:, j])
        raw.append(p)
    adjusted = holm_correction(raw) if raw else []
    lines = [
        f"# friedman_statistic\t{float(stat)!r}",
        f"# friedman_p\t{float(friedman_p)!r}",
        f"# reference\t{configs[reference]}",
        "config\tmean_rank\twilcoxon_p\tholm_p\tsignificant",
        f"{configs[reference]}\t{float(mean_ranks[reference])!r}\t\t\t",
    ]
    for j, p, hp in zip(others, raw, adjusted):
        mark = "*" if hp < ALPHA else ""
        lines.append(
            f"{configs[j]}\t{float(mean_ranks[j])!r}\t{float(p)!r}\t"
            f"{float(hp)!r}\t{mark}"
        )
    return [_write(out_dir, "stats.tsv", lines)]


def _baseline_label(results) -> str:
    """delta_e compares each surrogate config against the plain-DE config."""
    candidates = sorted({r.config for r in results if r.approach == "none"})
    if not candidates:
        raise ValueError("no baseline (surrogate-free) configuration found")
    return candidates[0]


def _report_delta_e(results, out_dir):
    by_key = {(r.function, r.config, r.run): r for r in results}
    baseline = _baseline_label(results)
    configs = sorted({r.config for r in results if r.config != baseline})
    if not configs:
        raise ValueError("delta_e needs at least one non-baseline config")
    lines = [f"# baseline\t{baseline}",
             "function\tconfig\trun\tn\tm\tdelta\tratio\tcensored"]
    for (fn, cfg, run), r in sorted(by_key.items()):
        if cfg == baseline:
            continue
        base = by_key.get((fn, baseline, run))
        if base is None:
            raise ValueError(f"missing baseline run ({fn}, {run})")
        reduction = delta_e(r.best_curve, base.best_curve, r.evaluations_used)
        lines.append(
            f"{fn}\t{cfg}\t{run}\t{reduction.n}\t{reduction.m}\t"
            f"{reduction.delta}\t{reduction.ratio!r}\t{reduction.censored}"
        )
    return [_write(out_dir, "delta_e.tsv", lines)]


def _report_confusion(results, out_dir):
    shadows = [r for r in results if r.shadow]
    if not shadows:
        raise ValueError("confusion report requires shadow runs")
    lines = ["function\tconfig\trun\tgeneration\taccuracy\tsensitivity\tspecificity"]
    for r in sorted(shadows, key=lambda r: (r.function, r.config, r.run)):
        tp = fp = tn = fn = 0
        for g in r.generations:
            tp, fp, tn, fn = tp + g.tp, fp + g.fp, tn + g.tn, fn + g.fn
            acc, sens, spec = confusion_rates(tp, fp, tn, fn)
            if acc is None:
                continue
            lines.append(
                f"{r.function}\t{r.config}\t{r.run}\t{g.generation}\t"
                f"{acc!r}\t{'' if sens is None else repr(sens)}\t"
                f"{'' if spec is None else repr(spec)}"
            )
    return [_write(out_dir, "confusion.tsv", lines)]


def _report_zeta(results, out_dir):
    lines = ["function\tconfig\trun\tgeneration\tzeta"]
    for r in sorted(results, key=lambda r: (r.function, r.config, r.run)):
        for i in range(1, len(r.generations)):
            value = zeta(r, ZETA_WINDOW, i)
            if value is None:
                continue
            lines.append(f"{r.function}\t{r.config}\t{r.run}\t{i}\t{value!r}")
    return [_write(out_dir, "zeta.tsv", lines)]


_REPORT_BUILDERS = {
    "ranking": _report_ranking,
    "stats": _report_stats,
    "delta_e": _report_delta_e,
    "confusion": _report_confusion,
    "zeta": _report_zeta,
}
