"""Blending technique scores with smell values and searching the blend space.

A module's blended score is (1 - alpha) * score + alpha * smell, where
both inputs are max-normalized over the ranked module universe. alpha runs
over a fixed 101-point grid; for each (system, metric) pair the sweep records
the whole curve and the set of maximizing grid points, reported by the
smallest maximizer. The configuration search evaluates every smell
configuration this way and adds a pseudo-ideal bound that picks the best
(configuration, alpha) pair per system.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

from .metrics import ranking_stats
from .smells import (
    AGGREGATORS,
    BOTH_GRANULARITIES,
    CLASS_GRANULARITY,
    METHOD_GRANULARITY,
    SMELL_TYPES,
    SmellConfiguration,
    SmellInstance,
    is_original_index,
    smell_values,
)

logger = logging.getLogger(__name__)

ALPHA_GRID: tuple[float, ...] = tuple(i / 100 for i in range(101))

METRIC_NAMES = ("top1", "top5", "top10", "mrr", "map")

GRANULARITY_LABELS = {
    "g1": CLASS_GRANULARITY,
    "g2": METHOD_GRANULARITY,
    "g3": BOTH_GRANULARITIES,
}
LABEL_BY_GRANULARITY = {v: k for k, v in GRANULARITY_LABELS.items()}

# Shapes of a metric-versus-alpha curve, judged by where the maximizers sit:
# "flat" means every grid point ties, "baseline" means alpha 0 is already
# optimal, "plateau" means the optimum persists through alpha 1, and
# "mountain" means the optimum is interior only.
CURVE_SHAPES = ("flat", "baseline", "plateau", "mountain")


@dataclass(frozen=True)
class System:
    """One project version prepared for blending with one ranked universe."""

    name: str
    modules: tuple[str, ...]
    bug_ids: tuple[str, ...]
    gold: Mapping[str, frozenset[str]]
    smells: tuple[SmellInstance, ...]


@dataclass(frozen=True)
class TechniqueScores:
    """Raw per-bug score maps emitted by one localization technique."""

    technique: str
    by_bug: Mapping[str, Mapping[str, float]]


@dataclass(frozen=True)
class AlphaSweepResult:
    config: SmellConfiguration
    metric: str
    values: tuple[float, ...]  # one point per grid alpha
    best_alphas: tuple[float, ...]
    best_value: float


@dataclass(frozen=True)
class ConfigOutcome:
    """One configuration's result for one metric across all systems."""

    value: float  # pooled over every bug report at per-system best alpha
    chosen_alpha: dict[str, float]  # system -> smallest maximizing alpha
    maximizers: dict[str, tuple[float, ...]]  # system -> full maximizer set


@dataclass(frozen=True)
class ConfigRow:
    config: SmellConfiguration
    outcomes: dict[str, ConfigOutcome]  # per metric
    systems_improved: int  # systems whose chosen alpha (for map) is > 0
    original_index: bool
    curves: dict[str, dict[str, tuple[float, ...]]]  # system -> metric -> curve


@dataclass(frozen=True)
class ConfigSearchReport:
    rows: tuple[ConfigRow, ...]  # sorted by map value descending
    ideal: dict[str, float]  # per metric, the pseudo-ideal pooled value
    ideal_choice: dict[str, dict[str, tuple[str, float]]]  # metric -> system -> (config label, alpha)
    ideal_systems_improved: int
    systems: tuple[str, ...]
    technique: str


def normalize(values: Mapping[str, float]) -> dict[str, float]:
    """Scale a score map into [0, 1] by dividing by the maximum.

    All-zero maps stay all zero. Techniques that emit negative scores are
    shifted so their minimum lands on 0 first; the normalization itself
    assumes nonnegative input.
    """
    for module, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"non-finite score for module {module!r}: {value}")
    if not values:
        return {}
    lo = min(values.values())
    if lo < 0:
        logger.warning("negative raw scores; shifting minimum %g to zero", lo)
        values = {m: v - lo for m, v in values.items()}
    hi = max(values.values())
    if hi == 0:
        return {m: 0.0 for m in values}
    return {m: v / hi for m, v in values.items()}


def blend(
    norm_score: Mapping[str, float],
    norm_smell: Mapping[str, float],
    alpha: float,
) -> dict[str, float]:
    """Convex combination of two normalized maps over the same modules."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha {alpha} outside [0, 1]")
    if norm_score.keys() != norm_smell.keys():
        diff = sorted(norm_score.keys() ^ norm_smell.keys())
        raise ValueError(f"score and smell module sets differ: {diff[:10]}")
    return {
        m: (1.0 - alpha) * norm_score[m] + alpha * norm_smell[m]
        for m in norm_score
    }


def normalized_smell(system: System, config: SmellConfiguration) -> dict[str, float]:
    """Normalized smell value of every module in the system's universe."""
    return normalize(smell_values(system.modules, system.smells, config))


_N_STATS = 6  # hits at 1, 5, 10, reciprocal-rank sum, precision sum, reports


def _sweep_stats(
    system: System,
    scores: TechniqueScores,
    norm_smell: Mapping[str, float],
) -> list[tuple[float, ...]]:
    """Per grid alpha: pooled outcome stats over the system's bug reports.

    Returns, for each alpha, (top1 hits, top5 hits, top10 hits, sum of
    reciprocal ranks, sum of average precisions, report count).
    """
    modules = tuple(sorted(system.modules))
    m_count = len(modules)
    indices = range(m_count)
    smell_vec = [norm_smell[m] for m in modules]
    per_alpha = [[0.0] * _N_STATS for _ in ALPHA_GRID]
    for bug_id in system.bug_ids:
        raw = scores.by_bug.get(bug_id, {})
        norm_score = normalize({m: raw.get(m, 0.0) for m in modules})
        score_vec = [norm_score[m] for m in modules]
        # Gold modules the universe lacks still dilute precision; negative
        # sentinels keep them countable without ever matching a ranked index.
        gold = system.gold[bug_id]
        gold_idx = {i for i in indices if modules[i] in gold}
        gold_idx.update(-(k + 1) for k in range(len(gold - set(modules))))
        outcome_cache: dict[tuple[int, ...], tuple[float, float, float, float, float]] = {}
        for ai, alpha in enumerate(ALPHA_GRID):
            beta = 1.0 - alpha
            combined = [
                beta * score_vec[i] + alpha * smell_vec[i] for i in indices
            ]
            # Stable reverse sort: ties stay in ascending index order, and
            # indices follow ascending module id.
            order = tuple(sorted(indices, key=combined.__getitem__, reverse=True))
            stats = outcome_cache.get(order)
            if stats is None:
                rank, ap = ranking_stats(order, gold_idx)
                stats = (
                    1.0 if rank is not None and rank <= 1 else 0.0,
                    1.0 if rank is not None and rank <= 5 else 0.0,
                    1.0 if rank is not None and rank <= 10 else 0.0,
                    1.0 / rank if rank is not None else 0.0,
                    ap,
                )
                outcome_cache[order] = stats
            row = per_alpha[ai]
            for k in range(5):
                row[k] += stats[k]
            row[5] += 1.0
    return [tuple(row) for row in per_alpha]


def _metric_value(stats: tuple[float, ...], metric: str) -> float:
    n = stats[5]
    if n == 0:
        raise ValueError("no bug reports")
    index = {"top1": 0, "top5": 1, "top10": 2, "mrr": 3, "map": 4}[metric]
    return stats[index] / n


def _curve(stats_by_alpha: Sequence[tuple[float, ...]], metric: str) -> tuple[float, ...]:
    return tuple(_metric_value(stats, metric) for stats in stats_by_alpha)


def _best_alphas(curve: Sequence[float]) -> tuple[tuple[float, ...], float]:
    best = max(curve)
    return (
        tuple(ALPHA_GRID[i] for i, v in enumerate(curve) if v == best),
        best,
    )


def sweep_all_metrics(
    system: System,
    scores: TechniqueScores,
    config: SmellConfiguration,
) -> dict[str, AlphaSweepResult]:
    """Sweep the alpha grid once and read off every metric's curve."""
    stats = _sweep_stats(system, scores, normalized_smell(system, config))
    results = {}
    for metric in METRIC_NAMES:
        curve = _curve(stats, metric)
        maximizers, best = _best_alphas(curve)
        results[metric] = AlphaSweepResult(
            config=config,
            metric=metric,
            values=curve,
            best_alphas=maximizers,
            best_value=best,
        )
    return results


def sweep_alpha(
    system: System,
    scores: TechniqueScores,
    config: SmellConfiguration,
    metric: str,
) -> AlphaSweepResult:
    """Evaluate one metric over the whole alpha grid for one configuration."""
    if metric not in METRIC_NAMES:
        raise ValueError(f"unknown metric {metric!r}")
    return sweep_all_metrics(system, scores, config)[metric]


def optimize_alpha(result: AlphaSweepResult) -> float:
    """Deterministic representative of the maximizer set: its smallest alpha."""
    return min(result.best_alphas)


def curve_shape(result: AlphaSweepResult) -> str:
    """Classify a sweep curve by where its maximizers lie."""
    best = set(result.best_alphas)
    if len(best) == len(ALPHA_GRID):
        return "flat"
    if 0.0 in best:
        return "baseline"
    if 1.0 in best:
        return "plateau"
    return "mountain"


def parse_config_label(label: str) -> tuple[str, str, str]:
    """Split a "granularity,aggregator,selector" triple, e.g. "g1,a4,s2"."""
    parts = [p.strip() for p in label.split(",")]
    if len(parts) != 3 or not all(parts):
        raise ValueError(
            f"configuration {label!r} is not a granularity,aggregator,selector triple"
        )
    return parts[0], parts[1], parts[2]


def make_config(
    granularity_label: str,
    aggregator: str,
    selector_label: str,
    selectors: Mapping[str, frozenset[str]],
) -> SmellConfiguration:
    """Build a configuration from labels plus the derived selector sets.

    The selector may be one of the selector-set names or a single smell-type
    name; single types imply their own granularity only when the caller says
    "g1"/"g2" consistently, so the granularity label is always honored.
    """
    granularity = GRANULARITY_LABELS.get(granularity_label, granularity_label)
    if granularity not in GRANULARITY_LABELS.values():
        raise ValueError(f"unknown granularity {granularity_label!r}")
    if selector_label in selectors:
        selector = selectors[selector_label]
    else:
        selector = frozenset({selector_label})
    name = f"{LABEL_BY_GRANULARITY[granularity]},{aggregator},{selector_label}"
    return SmellConfiguration(
        granularity=granularity, aggregator=aggregator, selector=selector, name=name
    )


def enumerate_configs(
    selectors: Mapping[str, frozenset[str]],
    include_single_type: bool = False,
) -> list[SmellConfiguration]:
    """The full 3 x 10 x 5 configuration grid, optionally plus the 68
    single-type configurations (class types under a2/a3, method types under
    a1..a6, granularity implied by the type)."""
    configs = []
    for g_label in ("g1", "g2", "g3"):
        for aggregator in AGGREGATORS:
            for s_label in ("s1", "s2", "s3", "s4", "s5"):
                configs.append(make_config(g_label, aggregator, s_label, selectors))
    if include_single_type:
        for smell_type in SMELL_TYPES:
            if smell_type.granularity == CLASS_GRANULARITY:
                aggs = ("a2", "a3")
            else:
                aggs = ("a1", "a2", "a3", "a4", "a5", "a6")
            for aggregator in aggs:
                configs.append(
                    SmellConfiguration(
                        granularity=smell_type.granularity,
                        aggregator=aggregator,
                        selector=frozenset({smell_type.name}),
                        name=f"{smell_type.name},{aggregator}",
                    )
                )
    return configs


def _system_task(
    args: tuple[System, TechniqueScores, tuple[SmellConfiguration, ...]]
) -> list[list[tuple[float, ...]]]:
    """Sweep stats for every configuration of one system (worker body).

    Configurations that induce the same raw smell map share one sweep.
    """
    system, scores, configs = args
    cache: dict[tuple[float, ...], list[tuple[float, ...]]] = {}
    out = []
    modules = tuple(sorted(system.modules))
    for config in configs:
        raw = smell_values(modules, system.smells, config)
        key = tuple(raw[m] for m in modules)
        stats = cache.get(key)
        if stats is None:
            stats = _sweep_stats(system, scores, normalize(raw))
            cache[key] = stats
        out.append(stats)
    return out


def config_search(
    systems: Sequence[tuple[System, TechniqueScores]],
    configs: Sequence[SmellConfiguration],
    jobs: int = 1,
) -> ConfigSearchReport:
    """Optimize alpha per (system, metric) for every configuration.

    Each configuration row reports, per metric, the pooled value over every
    surviving bug report with each system evaluated at its own best alpha,
    plus how many systems preferred a nonzero alpha. The ideal entry instead
    lets every system pick its best configuration as well, which bounds every
    row from above.
    """
    if not systems:
        raise ValueError("no systems to search")
    if not configs:
        raise ValueError("no configurations to search")
    technique = systems[0][1].technique
    tasks = [(system, scores, tuple(configs)) for system, scores in systems]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_system = list(pool.map(_system_task, tasks))
    else:
        per_system = [_system_task(task) for task in tasks]

    system_names = tuple(system.name for system, _ in systems)
    rows = []
    for ci, config in enumerate(configs):
        outcomes = {}
        curves: dict[str, dict[str, tuple[float, ...]]] = {
            name: {} for name in system_names
        }
        for metric in METRIC_NAMES:
            chosen: dict[str, float] = {}
            maximizers: dict[str, tuple[float, ...]] = {}
            pooled = [0.0] * _N_STATS
            for si, name in enumerate(system_names):
                stats = per_system[si][ci]
                curve = _curve(stats, metric)
                curves[name][metric] = curve
                max_set, _ = _best_alphas(curve)
                alpha = min(max_set)
                chosen[name] = alpha
                maximizers[name] = max_set
                best_stats = stats[ALPHA_GRID.index(alpha)]
                for k in range(_N_STATS):
                    pooled[k] += best_stats[k]
            outcomes[metric] = ConfigOutcome(
                value=_metric_value(tuple(pooled), metric),
                chosen_alpha=chosen,
                maximizers=maximizers,
            )
        rows.append(
            ConfigRow(
                config=config,
                outcomes=outcomes,
                systems_improved=sum(
                    1 for a in outcomes["map"].chosen_alpha.values() if a > 0
                ),
                original_index=is_original_index(config),
                curves=curves,
            )
        )

    ideal: dict[str, float] = {}
    ideal_choice: dict[str, dict[str, tuple[str, float]]] = {}
    for metric in METRIC_NAMES:
        pooled = [0.0] * _N_STATS
        choice: dict[str, tuple[str, float]] = {}
        for si, name in enumerate(system_names):
            best_value = None
            best_pick = None
            for ci, config in enumerate(configs):
                stats = per_system[si][ci]
                curve = _curve(stats, metric)
                max_set, value = _best_alphas(curve)
                if best_value is None or value > best_value:
                    best_value = value
                    best_pick = (ci, min(max_set))
            ci, alpha = best_pick
            choice[name] = (configs[ci].label(), alpha)
            stats = per_system[si][ci][ALPHA_GRID.index(alpha)]
            for k in range(_N_STATS):
                pooled[k] += stats[k]
        ideal[metric] = _metric_value(tuple(pooled), metric)
        ideal_choice[metric] = choice

    order = sorted(
        range(len(rows)),
        key=lambda i: (-rows[i].outcomes["map"].value, rows[i].config.label()),
    )
    return ConfigSearchReport(
        rows=tuple(rows[i] for i in order),
        ideal=ideal,
        ideal_choice=ideal_choice,
        ideal_systems_improved=sum(
            1 for _, alpha in ideal_choice["map"].values() if alpha > 0
        ),
        systems=system_names,
        technique=technique,
    )
