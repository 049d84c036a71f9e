"""Loading, validation, and filtering of localization datasets.

A system is one project version: a source snapshot, its bug reports with
gold sets, a smell report, and optional external technique scores. Filtering
applies the selection protocol in a fixed order: first bug reports whose
ranking is unusable under any requested technique, then systems without any
smell instance, then systems left with fewer than five reports. Every
exclusion is recorded with exactly one reason.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import combine
from .corpus import TokenDocument, build_corpus, build_query
from .index import build_index, cosine_score, rvsm_score
from .smells import SMELL_TYPE_BY_NAME, SmellInstance
from .stopwords import DEFAULT_STOPWORDS

logger = logging.getLogger(__name__)

NATIVE_TECHNIQUES = ("vsm", "rvsm")

REASON_NAN = "nan-score"
REASON_NO_GOLD = "no-gold-in-ranking"
REASON_MISSING = "missing-technique"
REASON_NO_SMELLS = "no-smells"
REASON_TOO_FEW = "fewer-than-5-reports"

MIN_REPORTS = 5


@dataclass(frozen=True)
class BugReport:
    id: str
    summary: str
    description: str
    gold: frozenset[str]

    def __post_init__(self):
        if not self.id:
            raise ValueError("bug report needs a nonempty id")
        if not self.gold:
            raise ValueError(f"bug report {self.id!r} has an empty gold set")


@dataclass(frozen=True)
class SystemDescriptor:
    """Where one system's inputs live on disk."""

    project: str
    version: str
    snapshot_path: Path
    bug_reports_path: Path
    smell_report_path: Path
    external_score_paths: dict[str, Path] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return f"{self.project}-{self.version}"


@dataclass(frozen=True)
class SystemSnapshot:
    """One system loaded into memory."""

    name: str
    modules: tuple[str, ...]
    corpus: tuple[TokenDocument, ...]
    reports: tuple[BugReport, ...]
    smells: tuple[SmellInstance, ...]
    external_scores: dict[str, combine.TechniqueScores]
    stopwords: frozenset[str]


@dataclass(frozen=True)
class PreparedTechnique:
    technique: str
    modules: tuple[str, ...]  # ranked universe for this technique
    by_bug: dict[str, dict[str, float]]  # aligned to the universe


@dataclass(frozen=True)
class PreparedSystem:
    name: str
    reports: tuple[BugReport, ...]
    smells: tuple[SmellInstance, ...]
    techniques: dict[str, PreparedTechnique]


@dataclass(frozen=True)
class ExcludedReport:
    system: str
    bug_id: str
    reason: str


@dataclass(frozen=True)
class ExcludedSystem:
    system: str
    reason: str


@dataclass(frozen=True)
class ValidationReport:
    excluded_reports: tuple[ExcludedReport, ...]
    excluded_systems: tuple[ExcludedSystem, ...]

    def to_json_dict(self) -> dict:
        return {
            "excluded_reports": [
                {"system": e.system, "bug": e.bug_id, "reason": e.reason}
                for e in self.excluded_reports
            ],
            "excluded_systems": [
                {"system": e.system, "reason": e.reason}
                for e in self.excluded_systems
            ],
        }

    def to_text(self) -> str:
        lines = []
        for e in self.excluded_reports:
            lines.append(f"excluded report {e.bug_id} of {e.system}: {e.reason}")
        for e in self.excluded_systems:
            lines.append(f"excluded system {e.system}: {e.reason}")
        if not lines:
            lines.append("nothing excluded")
        return "\n".join(lines)


def _json_error(path: str | Path, exc: json.JSONDecodeError) -> ValueError:
    return ValueError(f"{path}:{exc.lineno}: malformed JSON: {exc.msg}")


def load_bug_reports(path: str | Path) -> tuple[BugReport, ...]:
    """Read a JSON array of {"id", "summary", "description", "gold": [...]}."""
    with open(path, encoding="utf-8", errors="replace") as fh:
        try:
            records = json.load(fh)
        except json.JSONDecodeError as exc:
            raise _json_error(path, exc) from exc
    if not isinstance(records, list):
        raise ValueError(f"{path}: expected a JSON array of bug reports")
    reports = []
    seen = set()
    for pos, rec in enumerate(records):
        try:
            report = BugReport(
                id=str(rec["id"]),
                summary=str(rec.get("summary", "")),
                description=str(rec.get("description", "")),
                gold=frozenset(str(g) for g in rec.get("gold", ())),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}: bug report #{pos}: {exc}") from exc
        if report.id in seen:
            raise ValueError(f"{path}: duplicate bug report id {report.id!r}")
        seen.add(report.id)
        reports.append(report)
    return tuple(reports)


def load_smell_report(path: str | Path) -> tuple[SmellInstance, ...]:
    """Read a JSON array of {"type", "module", "method"?, "severity"}."""
    with open(path, encoding="utf-8", errors="replace") as fh:
        try:
            records = json.load(fh)
        except json.JSONDecodeError as exc:
            raise _json_error(path, exc) from exc
    if not isinstance(records, list):
        raise ValueError(f"{path}: expected a JSON array of smell instances")
    instances = []
    for pos, rec in enumerate(records):
        try:
            type_name = rec["type"]
            smell_type = SMELL_TYPE_BY_NAME.get(type_name)
            if smell_type is None:
                raise ValueError(f"unknown smell type {type_name!r}")
            instances.append(
                SmellInstance(
                    type=smell_type,
                    module=str(rec["module"]),
                    severity=rec["severity"],
                    method_signature=rec.get("method"),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}: smell instance #{pos}: {exc}") from exc
    return tuple(instances)


def load_external_scores(
    path: str | Path,
    technique: str,
    known_bugs: Iterable[str] | None = None,
) -> combine.TechniqueScores:
    """Read JSON lines of {"bug", "module", "score"}.

    Non-finite scores are kept as parsed; the validity filter flags them
    later instead of this loader repairing them silently. Duplicate
    (bug, module) pairs are an error; bug ids outside known_bugs only warn.
    """
    by_bug: dict[str, dict[str, float]] = {}
    known = set(known_bugs) if known_bugs is not None else None
    with open(path, encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                bug = str(rec["bug"])
                module = str(rec["module"])
                score = float(rec["score"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad score entry: {exc}") from exc
            modules = by_bug.setdefault(bug, {})
            if module in modules:
                raise ValueError(
                    f"{path}:{lineno}: duplicate score for bug {bug!r}, module {module!r}"
                )
            if known is not None and bug not in known:
                logger.warning("%s:%d: score for unknown bug id %r", path, lineno, bug)
                known.add(bug)  # warn once per id
            modules[module] = score
    return combine.TechniqueScores(technique=technique, by_bug=by_bug)


def load_descriptor(path: str | Path) -> SystemDescriptor:
    """Read a system descriptor JSON file; relative paths resolve against it."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            rec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise _json_error(path, exc) from exc
    base = path.parent

    def resolve(p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else base / p

    try:
        return SystemDescriptor(
            project=str(rec["project"]),
            version=str(rec["version"]),
            snapshot_path=resolve(rec["snapshot"]),
            bug_reports_path=resolve(rec["bugs"]),
            smell_report_path=resolve(rec["smells"]),
            external_score_paths={
                name: resolve(p) for name, p in rec.get("scores", {}).items()
            },
        )
    except KeyError as exc:
        raise ValueError(f"{path}: descriptor missing key {exc}") from exc


def load_system(
    descriptor: SystemDescriptor,
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
    jobs: int = 1,
) -> SystemSnapshot:
    """Load and cross-check one system's inputs.

    Gold modules or smelly modules missing from the snapshot are warned
    about but kept: external techniques may rank artifacts the corpus
    skipped, and the risk analysis validates its own universe.
    """
    corpus = build_corpus(descriptor.snapshot_path, stopwords=stopwords, jobs=jobs)
    modules = tuple(doc.id for doc in corpus)
    module_set = set(modules)
    reports = load_bug_reports(descriptor.bug_reports_path)
    for report in reports:
        stray = report.gold - module_set
        if stray:
            logger.warning(
                "system %s bug %s: %d gold modules not in snapshot (e.g. %s)",
                descriptor.name,
                report.id,
                len(stray),
                sorted(stray)[0],
            )
    smells = load_smell_report(descriptor.smell_report_path)
    stray_smelly = {i.module for i in smells} - module_set
    if stray_smelly:
        logger.warning(
            "system %s: %d smelly modules not in snapshot (e.g. %s)",
            descriptor.name,
            len(stray_smelly),
            sorted(stray_smelly)[0],
        )
    known = [r.id for r in reports]
    external = {
        name: load_external_scores(path, name, known_bugs=known)
        for name, path in descriptor.external_score_paths.items()
    }
    return SystemSnapshot(
        name=descriptor.name,
        modules=modules,
        corpus=corpus if isinstance(corpus, tuple) else tuple(corpus),
        reports=reports,
        smells=smells,
        external_scores=external,
        stopwords=stopwords,
    )


def prepare_system(
    snapshot: SystemSnapshot, techniques: Sequence[str]
) -> PreparedSystem:
    """Compute or align per-technique score maps over their ranked universes.

    Native techniques rank exactly the snapshot modules. External score
    files may mention extra modules; those stay in that technique's universe,
    and universe modules the file skips score 0 (they rank at the bottom).
    """
    prepared: dict[str, PreparedTechnique] = {}
    term_index = None
    for technique in techniques:
        if technique in NATIVE_TECHNIQUES:
            if term_index is None:
                term_index = build_index(list(snapshot.corpus))
            scorer = cosine_score if technique == "vsm" else rvsm_score
            by_bug = {}
            for report in snapshot.reports:
                query = build_query(report, snapshot.stopwords)
                by_bug[report.id] = scorer(query, term_index)
            prepared[technique] = PreparedTechnique(
                technique=technique, modules=snapshot.modules, by_bug=by_bug
            )
        elif technique in snapshot.external_scores:
            raw = snapshot.external_scores[technique]
            extra = {
                m for scores in raw.by_bug.values() for m in scores
            } - set(snapshot.modules)
            if extra:
                logger.warning(
                    "system %s technique %s: %d modules outside the snapshot kept",
                    snapshot.name,
                    technique,
                    len(extra),
                )
            universe = tuple(sorted(set(snapshot.modules) | extra))
            by_bug = {}
            filled = 0
            for bug, scores in raw.by_bug.items():
                filled += len(universe) - len(scores)
                by_bug[bug] = {m: scores.get(m, 0.0) for m in universe}
            if filled:
                logger.warning(
                    "system %s technique %s: %d missing module scores filled with 0",
                    snapshot.name,
                    technique,
                    filled,
                )
            prepared[technique] = PreparedTechnique(
                technique=technique, modules=universe, by_bug=by_bug
            )
        else:
            raise ValueError(
                f"system {snapshot.name}: unknown technique {technique!r}"
            )
    return PreparedSystem(
        name=snapshot.name,
        reports=snapshot.reports,
        smells=snapshot.smells,
        techniques=prepared,
    )


def validate_ranking(
    scores: Mapping[str, float] | None, gold: Iterable[str]
) -> str | None:
    """Classify one technique's score map for one bug report.

    Returns None when usable, otherwise the exclusion reason: the technique
    produced nothing, produced a non-finite score, or ranks no gold module.
    """
    if scores is None:
        return REASON_MISSING
    if any(not math.isfinite(v) for v in scores.values()):
        return REASON_NAN
    if not any(m in scores for m in gold):
        return REASON_NO_GOLD
    return None


def filter_dataset(
    systems: Sequence[PreparedSystem], techniques: Sequence[str]
) -> tuple[list[PreparedSystem], ValidationReport]:
    """Apply the selection protocol and record every exclusion.

    A report is dropped if any requested technique's ranking for it is
    invalid. Afterwards, systems without smells are dropped, then systems
    with fewer than five surviving reports. Raises when nothing survives.
    """
    excluded_reports: list[ExcludedReport] = []
    excluded_systems: list[ExcludedSystem] = []
    kept_systems: list[PreparedSystem] = []
    for system in systems:
        surviving = []
        for report in system.reports:
            reason = None
            for technique in techniques:
                tech = system.techniques.get(technique)
                scores = None if tech is None else tech.by_bug.get(report.id)
                reason = validate_ranking(scores, report.gold)
                if reason is not None:
                    break
            if reason is None:
                surviving.append(report)
            else:
                excluded_reports.append(
                    ExcludedReport(system=system.name, bug_id=report.id, reason=reason)
                )
        if not system.smells:
            excluded_systems.append(
                ExcludedSystem(system=system.name, reason=REASON_NO_SMELLS)
            )
            continue
        if len(surviving) < MIN_REPORTS:
            excluded_systems.append(
                ExcludedSystem(system=system.name, reason=REASON_TOO_FEW)
            )
            continue
        kept_systems.append(
            PreparedSystem(
                name=system.name,
                reports=tuple(surviving),
                smells=system.smells,
                techniques=system.techniques,
            )
        )
    if not kept_systems:
        raise ValueError("dataset empty after filtering")
    return kept_systems, ValidationReport(
        excluded_reports=tuple(excluded_reports),
        excluded_systems=tuple(excluded_systems),
    )


def to_combine_inputs(
    system: PreparedSystem, technique: str
) -> tuple[combine.System, combine.TechniqueScores]:
    """Adapt one prepared system to the blending machinery's input types."""
    tech = system.techniques.get(technique)
    if tech is None:
        raise ValueError(f"system {system.name}: technique {technique!r} not prepared")
    return (
        combine.System(
            name=system.name,
            modules=tech.modules,
            bug_ids=tuple(r.id for r in system.reports),
            gold={r.id: r.gold for r in system.reports},
            smells=system.smells,
        ),
        combine.TechniqueScores(technique=technique, by_bug=tech.by_bug),
    )
