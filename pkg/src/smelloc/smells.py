"""Smell instances, configurations, aggregation, and an exemplar detector.

A smell report is a flat list of instances (type, module, optional method,
severity 1..10) coming from an external detector. A configuration picks a
granularity, an aggregator, and a set of smell types; applying it to a module
yields one nonnegative number, the module's raw smell value. Method-level
instances are attached to their enclosing file, since localization targets
are files.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Sequence

CLASS_GRANULARITY = "class"
METHOD_GRANULARITY = "method"
BOTH_GRANULARITIES = "both"

GRANULARITIES = (CLASS_GRANULARITY, METHOD_GRANULARITY, BOTH_GRANULARITIES)

AGGREGATORS = ("a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8", "a9", "a10")


@dataclass(frozen=True)
class SmellType:
    name: str
    granularity: str  # "class" or "method"


CLASS_SMELL_TYPES = (
    SmellType("Blob Class", CLASS_GRANULARITY),
    SmellType("Data Class", CLASS_GRANULARITY),
    SmellType("Distorted Hierarchy", CLASS_GRANULARITY),
    SmellType("God Class", CLASS_GRANULARITY),
    SmellType("Refused Parent Bequest", CLASS_GRANULARITY),
    SmellType("Schizophrenic Class", CLASS_GRANULARITY),
    SmellType("Tradition Breaker", CLASS_GRANULARITY),
)

METHOD_SMELL_TYPES = (
    SmellType("Blob Operation", METHOD_GRANULARITY),
    SmellType("Data Clumps", METHOD_GRANULARITY),
    SmellType("External Duplication", METHOD_GRANULARITY),
    SmellType("Feature Envy", METHOD_GRANULARITY),
    SmellType("Intensive Coupling", METHOD_GRANULARITY),
    SmellType("Internal Duplication", METHOD_GRANULARITY),
    SmellType("Message Chains", METHOD_GRANULARITY),
    SmellType("Shotgun Surgery", METHOD_GRANULARITY),
    SmellType("Sibling Duplication", METHOD_GRANULARITY),
)

SMELL_TYPES = CLASS_SMELL_TYPES + METHOD_SMELL_TYPES
SMELL_TYPE_BY_NAME = {t.name: t for t in SMELL_TYPES}
ALL_TYPE_NAMES = frozenset(SMELL_TYPE_BY_NAME)


@dataclass(frozen=True)
class SmellInstance:
    """One detected smell occurrence."""

    type: SmellType
    module: str
    severity: int
    method_signature: str | None = None

    def __post_init__(self):
        if not self.module:
            raise ValueError("smell instance needs a nonempty module")
        if not 1 <= self.severity <= 10:
            raise ValueError(f"severity {self.severity} outside 1..10")
        if self.type.granularity == METHOD_GRANULARITY and not self.method_signature:
            raise ValueError(
                f"method-level smell {self.type.name!r} needs a method signature"
            )
        if self.type.granularity == CLASS_GRANULARITY and self.method_signature:
            raise ValueError(
                f"class-level smell {self.type.name!r} cannot carry a method signature"
            )


@dataclass(frozen=True)
class SmellConfiguration:
    """Granularity + aggregator + smell-type selector."""

    granularity: str
    aggregator: str
    selector: frozenset[str]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.granularity not in GRANULARITIES:
            raise ValueError(f"unknown granularity {self.granularity!r}")
        if self.aggregator not in AGGREGATORS:
            raise ValueError(f"unknown aggregator {self.aggregator!r}")
        if not self.selector:
            raise ValueError("selector must be nonempty")
        unknown = set(self.selector) - ALL_TYPE_NAMES
        if unknown:
            raise ValueError(f"unknown smell types in selector: {sorted(unknown)}")

    def label(self) -> str:
        return self.name or "{},{},{{{}}}".format(
            self.granularity, self.aggregator, ",".join(sorted(self.selector))
        )


def is_original_index(config: SmellConfiguration) -> bool:
    """True for the class-granularity, severity-sum, all-types configuration.

    That corner of the configuration space is the ungeneralized index the
    rest of the space extends.
    """
    return (
        config.granularity == CLASS_GRANULARITY
        and config.aggregator == "a1"
        and config.selector == ALL_TYPE_NAMES
    )


def select_instances(
    instances: Iterable[SmellInstance], config: SmellConfiguration
) -> list[SmellInstance]:
    """Keep instances matching the configuration's types and granularity."""
    kept = []
    for inst in instances:
        if inst.type.name not in config.selector:
            continue
        if (
            config.granularity != BOTH_GRANULARITIES
            and inst.type.granularity != config.granularity
        ):
            continue
        kept.append(inst)
    return kept


def _per_type(instances: Sequence[SmellInstance]) -> dict[str, list[int]]:
    groups: dict[str, list[int]] = {}
    for inst in instances:
        groups.setdefault(inst.type.name, []).append(inst.severity)
    return groups


def aggregate(instances: Sequence[SmellInstance], aggregator: str) -> float:
    """Collapse a module's selected instances to one number; empty -> 0."""
    if aggregator not in AGGREGATORS:
        raise ValueError(f"unknown aggregator {aggregator!r}")
    if not instances:
        return 0.0
    severities = [inst.severity for inst in instances]
    if aggregator == "a1":
        return float(sum(severities))
    if aggregator == "a2":
        return float(max(severities))
    if aggregator == "a3":
        return 1.0
    if aggregator == "a4":
        return float(len(severities))
    if aggregator == "a5":
        return float(statistics.mean(severities))
    if aggregator == "a6":
        return float(statistics.median(severities))
    groups = _per_type(instances)
    if aggregator == "a7":
        return float(statistics.mean(max(sevs) for sevs in groups.values()))
    if aggregator == "a8":
        return float(statistics.median(max(sevs) for sevs in groups.values()))
    if aggregator == "a9":
        return float(statistics.mean(len(sevs) for sevs in groups.values()))
    return float(statistics.median(len(sevs) for sevs in groups.values()))


def smell_value(
    module: str, report: Iterable[SmellInstance], config: SmellConfiguration
) -> float:
    """Raw smell value of one module under a configuration."""
    mine = [inst for inst in report if inst.module == module]
    return aggregate(select_instances(mine, config), config.aggregator)


def smell_values(
    modules: Iterable[str],
    report: Iterable[SmellInstance],
    config: SmellConfiguration,
) -> dict[str, float]:
    """Raw smell values for a whole module universe; absent modules get 0."""
    selected = select_instances(report, config)
    by_module: dict[str, list[SmellInstance]] = {}
    for inst in selected:
        by_module.setdefault(inst.module, []).append(inst)
    return {
        module: aggregate(by_module.get(module, ()), config.aggregator)
        for module in modules
    }


@dataclass(frozen=True)
class MetricVector:
    """Class-level metrics consumed by the God Class detector."""

    atfd: float  # accesses to foreign data
    wmc: float  # weighted method count
    tcc: float  # tight class cohesion

    def __post_init__(self):
        if self.atfd < 0 or self.wmc < 0:
            raise ValueError("atfd and wmc must be nonnegative")
        if not 0.0 <= self.tcc <= 1.0:
            raise ValueError("tcc must lie in [0, 1]")


@dataclass(frozen=True)
class GodClassThresholds:
    atfd: float
    wmc: float
    tcc: float

    def __post_init__(self):
        if self.atfd <= 0 or self.wmc <= 0 or self.tcc <= 0:
            raise ValueError("thresholds must be positive")
        if self.tcc > 1.0:
            raise ValueError("tcc threshold must lie in (0, 1]")


def detect_god_class(metrics: MetricVector, thresholds: GodClassThresholds) -> bool:
    """Metric-based God Class check; every comparison is inclusive.

    High foreign-data access and complexity plus low cohesion together
    flag the class, so tcc is compared downward.
    """
    return (
        metrics.atfd >= thresholds.atfd
        and metrics.wmc >= thresholds.wmc
        and metrics.tcc <= thresholds.tcc
    )


def severity_from_metric(value: float, threshold: float) -> int:
    """Severity as how many times a metric value covers its threshold.

    The ratio is floored and clamped to [1, 10]. A value below the threshold
    means the smell would not have been detected at all, so it is an error
    rather than severity 0.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if value < threshold:
        raise ValueError(
            f"metric below detection threshold: {value} < {threshold}"
        )
    return min(10, max(1, math.floor(value / threshold)))
