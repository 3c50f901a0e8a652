"""Core data types: logged routing interactions, curated R/P samples, and their file formats.

Files are line-delimited JSON with a versioned schema header on the first
line. Floats are serialized with full precision so load(save(x)) reproduces
records field-for-field.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import RecordError, SchemaError, ValidationError

log = logging.getLogger(__name__)

INTERACTION_SCHEMA = "interaction-log"
RP_SCHEMA = "rp-dataset"
FORMAT_VERSION = 1


class SampleType(str, Enum):
    REGRESSION = "REGRESSION"
    PROGRESSION = "PROGRESSION"


class LifecycleStatus(str, Enum):
    ACTIVE = "ACTIVE"
    DEPRECATED = "DEPRECATED"


class SplitTag(str, Enum):
    TRAIN = "TRAIN"
    VALIDATION = "VALIDATION"
    TEST = "TEST"


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(eq=False)
class Candidate:
    """One routing hypothesis: an opaque id plus its real-valued feature vector."""

    candidate_id: str
    features: np.ndarray

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim != 1:
            raise ValueError("candidate features must be a flat vector")
        if not np.all(np.isfinite(self.features)):
            raise ValueError(f"candidate {self.candidate_id!r} has non-finite features")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Candidate):
            return NotImplemented
        return self.candidate_id == other.candidate_id and np.array_equal(
            self.features, other.features
        )


@dataclass(eq=False)
class LoggedInteraction:
    """One logged routing decision.

    Fields mirror the on-disk record: the candidate set shown to the policy,
    the action the logging policy chose, the propensity it recorded for that
    choice, and the observed reward in [0, 1].
    """

    context_id: str
    candidates: list[Candidate]
    chosen_action: int
    logging_propensity: float
    reward: float
    _feature_matrix: np.ndarray | None = field(
        default=None, repr=False, compare=False
    )

    def __post_init__(self):
        if len(self.candidates) < 1:
            raise ValueError("candidate list must be non-empty")
        dims = {c.features.shape[0] for c in self.candidates}
        if len(dims) != 1:
            raise ValueError(f"candidates disagree on feature dimension: {sorted(dims)}")
        self.chosen_action = int(self.chosen_action)
        if not 0 <= self.chosen_action < len(self.candidates):
            raise ValueError(
                f"chosen_action must index the candidate list, got {self.chosen_action} "
                f"for {len(self.candidates)} candidates"
            )
        self.logging_propensity = _require_finite(
            "logging_propensity", self.logging_propensity
        )
        if not 0.0 < self.logging_propensity <= 1.0:
            raise ValueError(
                f"logging_propensity must be in (0,1], got {self.logging_propensity}"
            )
        self.reward = _require_finite("reward", self.reward)
        if not 0.0 <= self.reward <= 1.0:
            raise ValueError(f"reward must be in [0,1], got {self.reward}")

    @property
    def feature_dim(self) -> int:
        return self.candidates[0].features.shape[0]

    @property
    def feature_matrix(self) -> np.ndarray:
        """Candidate features stacked as a (n_candidates, feature_dim) array."""
        if self._feature_matrix is None:
            self._feature_matrix = np.stack([c.features for c in self.candidates])
        return self._feature_matrix

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LoggedInteraction):
            return NotImplemented
        return (
            self.context_id == other.context_id
            and self.candidates == other.candidates
            and self.chosen_action == other.chosen_action
            and self.logging_propensity == other.logging_propensity
            and self.reward == other.reward
        )


@dataclass(eq=False)
class RPSample:
    """A curated regression or progression sample with incident metadata.

    For REGRESSION samples `interaction.chosen_action` records the defective
    action; for PROGRESSION samples it records the desired action. Only
    ACTIVE samples participate in evaluation, gating, and training.
    """

    uid: str
    interaction: LoggedInteraction
    sample_type: SampleType
    severity: int
    reported_date: str
    lifecycle_status: LifecycleStatus
    incident_id: str
    description: str = ""

    def __post_init__(self):
        self.sample_type = SampleType(self.sample_type)
        self.lifecycle_status = LifecycleStatus(self.lifecycle_status)
        self.severity = int(self.severity)
        if not 1 <= self.severity <= 5:
            raise ValueError(f"severity must be an integer in 1..5, got {self.severity}")
        try:
            date.fromisoformat(self.reported_date)
        except ValueError as exc:
            raise ValueError(f"reported_date must be an ISO-8601 date: {exc}") from exc

    @property
    def is_active(self) -> bool:
        return self.lifecycle_status is LifecycleStatus.ACTIVE

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RPSample):
            return NotImplemented
        return (
            self.uid == other.uid
            and self.interaction == other.interaction
            and self.sample_type == other.sample_type
            and self.severity == other.severity
            and self.reported_date == other.reported_date
            and self.lifecycle_status == other.lifecycle_status
            and self.incident_id == other.incident_id
            and self.description == other.description
        )


@dataclass(eq=False)
class Dataset:
    """A list of logged interactions plus an optional split tag."""

    interactions: list[LoggedInteraction]
    split_tag: SplitTag | None = None

    def __post_init__(self):
        if self.split_tag is not None:
            self.split_tag = SplitTag(self.split_tag)
        dims = {x.feature_dim for x in self.interactions}
        if len(dims) > 1:
            raise ValueError(f"interactions disagree on feature dimension: {sorted(dims)}")

    def __len__(self) -> int:
        return len(self.interactions)

    def __iter__(self) -> Iterator[LoggedInteraction]:
        return iter(self.interactions)

    @property
    def feature_dim(self) -> int | None:
        return self.interactions[0].feature_dim if self.interactions else None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.interactions == other.interactions and self.split_tag == other.split_tag
        )


@dataclass(eq=False)
class RPDataset:
    """A set of R/P samples with unique uids plus an optional split tag."""

    samples: list[RPSample]
    split_tag: SplitTag | None = None

    def __post_init__(self):
        if self.split_tag is not None:
            self.split_tag = SplitTag(self.split_tag)
        seen: dict[str, int] = {}
        for s in self.samples:
            seen[s.uid] = seen.get(s.uid, 0) + 1
        duplicates = sorted(uid for uid, n in seen.items() if n > 1)
        if duplicates:
            raise ValidationError(f"duplicate uids in R/P dataset: {duplicates}")

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[RPSample]:
        return iter(self.samples)

    @property
    def active_samples(self) -> list[RPSample]:
        """Samples eligible for evaluation/gating/training (DEPRECATED excluded)."""
        return [s for s in self.samples if s.is_active]

    @property
    def uids(self) -> set[str]:
        return {s.uid for s in self.samples}

    @property
    def incident_ids(self) -> set[str]:
        return {s.incident_id for s in self.samples}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RPDataset):
            return NotImplemented
        return self.samples == other.samples and self.split_tag == other.split_tag


# ---------------------------------------------------------------------------
# record codecs


def interaction_to_record(x: LoggedInteraction) -> dict:
    return {
        "context_id": x.context_id,
        "candidates": [
            {"candidate_id": c.candidate_id, "features": c.features.tolist()}
            for c in x.candidates
        ],
        "chosen_action": x.chosen_action,
        "logging_propensity": x.logging_propensity,
        "reward": x.reward,
    }


def interaction_from_record(record: dict) -> LoggedInteraction:
    try:
        candidates = [
            Candidate(c["candidate_id"], np.asarray(c["features"], dtype=np.float64))
            for c in record["candidates"]
        ]
        return LoggedInteraction(
            context_id=record["context_id"],
            candidates=candidates,
            chosen_action=record["chosen_action"],
            logging_propensity=record["logging_propensity"],
            reward=record["reward"],
        )
    except KeyError as exc:
        raise ValueError(f"missing field {exc.args[0]!r}") from exc


def rp_sample_to_record(s: RPSample) -> dict:
    record = interaction_to_record(s.interaction)
    record.update(
        {
            "uid": s.uid,
            "sample_type": s.sample_type.value,
            "severity": s.severity,
            "reported_date": s.reported_date,
            "lifecycle_status": s.lifecycle_status.value,
            "incident_id": s.incident_id,
            "description": s.description,
        }
    )
    return record


def rp_sample_from_record(record: dict) -> RPSample:
    try:
        return RPSample(
            uid=record["uid"],
            interaction=interaction_from_record(record),
            sample_type=record["sample_type"],
            severity=record["severity"],
            reported_date=record["reported_date"],
            lifecycle_status=record["lifecycle_status"],
            incident_id=record["incident_id"],
            description=record.get("description", ""),
        )
    except KeyError as exc:
        raise ValueError(f"missing field {exc.args[0]!r}") from exc


# ---------------------------------------------------------------------------
# line-delimited file IO


def dump_json_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _read_lines(path: Path) -> Iterator[tuple[int, dict]]:
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise RecordError(f"invalid JSON: {exc}", path=str(path), line=lineno)
            if not isinstance(record, dict):
                raise RecordError("record must be a JSON object", path=str(path), line=lineno)
            yield lineno, record


def _check_header(
    header: dict, schema: str, path: Path
) -> dict:
    if header.get("schema") != schema:
        raise SchemaError(
            f"{path}: expected schema {schema!r}, got {header.get('schema')!r}"
        )
    version = header.get("version")
    if version != FORMAT_VERSION:
        raise SchemaError(f"{path}: unsupported format version {version!r}")
    return header


def _header_for(schema: str, feature_dim: int | None, split_tag: SplitTag | None) -> dict:
    header: dict = {"schema": schema, "version": FORMAT_VERSION}
    if feature_dim is not None:
        header["feature_dim"] = feature_dim
    if split_tag is not None:
        header["split"] = split_tag.value
    return header


def load_interactions(path: str | Path, feature_dim: int | None = None) -> Dataset:
    """Load and validate a line-delimited interaction log.

    Args:
        path: file to read; first line must be the schema header.
        feature_dim: if given, enforced against the header's feature_dim.

    Raises:
        SchemaError: wrong schema, version, or feature dimension.
        RecordError: a malformed record, naming line number and field.
    """
    path = Path(path)
    lines = _read_lines(path)
    try:
        _, header = next(lines)
    except StopIteration:
        log.warning("interaction log %s is empty", path)
        return Dataset([], split_tag=None)
    _check_header(header, INTERACTION_SCHEMA, path)
    expected_dim = header.get("feature_dim")
    if feature_dim is not None and expected_dim != feature_dim:
        raise SchemaError(
            f"{path}: feature_dim mismatch: expected {feature_dim}, header says {expected_dim}"
        )
    split = SplitTag(header["split"]) if "split" in header else None

    interactions = []
    for lineno, record in lines:
        try:
            interaction = interaction_from_record(record)
        except (ValueError, TypeError) as exc:
            raise RecordError(str(exc), path=str(path), line=lineno)
        if expected_dim is not None and interaction.feature_dim != expected_dim:
            raise SchemaError(
                f"{path}:{lineno}: feature dimension mismatch: expected {expected_dim}, "
                f"got {interaction.feature_dim}"
            )
        interactions.append(interaction)
    if not interactions:
        log.warning("interaction log %s contains no records", path)
    return Dataset(interactions, split_tag=split)


def save_interactions(dataset: Dataset, path: str | Path) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            dump_json_line(
                _header_for(INTERACTION_SCHEMA, dataset.feature_dim, dataset.split_tag)
            )
            + "\n"
        )
        for x in dataset.interactions:
            fh.write(dump_json_line(interaction_to_record(x)) + "\n")


def load_rp_dataset(path: str | Path, feature_dim: int | None = None) -> RPDataset:
    """Load a curated R/P sample file.

    DEPRECATED samples are retained in the dataset but excluded from
    `active_samples`. Duplicate uids raise a ValidationError listing them.
    """
    path = Path(path)
    lines = _read_lines(path)
    try:
        _, header = next(lines)
    except StopIteration:
        log.warning("R/P dataset %s is empty", path)
        return RPDataset([], split_tag=None)
    _check_header(header, RP_SCHEMA, path)
    expected_dim = header.get("feature_dim")
    if feature_dim is not None and expected_dim != feature_dim:
        raise SchemaError(
            f"{path}: feature_dim mismatch: expected {feature_dim}, header says {expected_dim}"
        )
    split = SplitTag(header["split"]) if "split" in header else None

    samples = []
    for lineno, record in lines:
        try:
            sample = rp_sample_from_record(record)
        except (ValueError, TypeError) as exc:
            raise RecordError(str(exc), path=str(path), line=lineno)
        if expected_dim is not None and sample.interaction.feature_dim != expected_dim:
            raise SchemaError(
                f"{path}:{lineno}: feature dimension mismatch: expected {expected_dim}, "
                f"got {sample.interaction.feature_dim}"
            )
        samples.append(sample)
    dataset = RPDataset(samples, split_tag=split)
    counts = rp_type_counts(dataset)
    log.info(
        "loaded %d R/P samples (%d active): %s",
        len(dataset),
        len(dataset.active_samples),
        counts,
    )
    return dataset


def save_rp_dataset(dataset: RPDataset, path: str | Path) -> None:
    path = Path(path)
    dim = dataset.samples[0].interaction.feature_dim if dataset.samples else None
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_json_line(_header_for(RP_SCHEMA, dim, dataset.split_tag)) + "\n")
        for s in dataset.samples:
            fh.write(dump_json_line(rp_sample_to_record(s)) + "\n")


def rp_type_counts(dataset: RPDataset | Iterable[RPSample]) -> dict[str, int]:
    counts = {t.value: 0 for t in SampleType}
    samples = dataset.samples if isinstance(dataset, RPDataset) else dataset
    for s in samples:
        counts[s.sample_type.value] += 1
    return counts


# ---------------------------------------------------------------------------
# split validation


@dataclass
class RPSplitSummary:
    """Result of checking a train/test R/P split."""

    n_train: int
    n_test: int
    train_fraction: float
    test_fraction: float
    train_type_counts: dict[str, int]
    test_type_counts: dict[str, int]
    incidents_in_both: list[str]
    incidents_train_only: list[str]
    incidents_test_only: list[str]
    warnings: list[str]


def validate_rp_split(train: RPDataset, test: RPDataset) -> RPSplitSummary:
    """Check disjointness and per-incident coverage of an R/P split.

    Overlapping uids are a hard error; an incident present in only one split
    is reported as a warning (coverage is best-effort when an incident has a
    single sample).
    """
    overlap = sorted(train.uids & test.uids)
    if overlap:
        raise ValidationError(f"R/P splits share uids: {overlap}")

    total = len(train) + len(test)
    train_incidents = train.incident_ids
    test_incidents = test.incident_ids
    warnings = []
    train_only = sorted(train_incidents - test_incidents)
    test_only = sorted(test_incidents - train_incidents)
    for incident in train_only:
        warnings.append(f"incident {incident!r} has no samples in the test split")
    for incident in test_only:
        warnings.append(f"incident {incident!r} has no samples in the train split")
    for message in warnings:
        log.warning("%s", message)
    return RPSplitSummary(
        n_train=len(train),
        n_test=len(test),
        train_fraction=len(train) / total if total else 0.0,
        test_fraction=len(test) / total if total else 0.0,
        train_type_counts=rp_type_counts(train),
        test_type_counts=rp_type_counts(test),
        incidents_in_both=sorted(train_incidents & test_incidents),
        incidents_train_only=train_only,
        incidents_test_only=test_only,
        warnings=warnings,
    )
