"""Domain model for a single-school selection instance.

An instance bundles the applicant pool, the school's strict priority order,
its capacity, and a two-rank quota table over diversity types.  Type id 0 is
reserved for the universal type that every student implicitly holds; real
diversity types are numbered from 1.  Instances are immutable and safe to
share across worker processes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Any

UNIVERSAL_TYPE = 0

StudentId = int
TypeId = int


@dataclass(frozen=True)
class Student:
    """One applicant: a dense integer id plus the real types they hold.

    The universal type is implicit and never listed in ``types``.
    """

    id: StudentId
    types: frozenset[TypeId] = frozenset()


@dataclass(frozen=True)
class QuotaTable:
    """Per-type seat counts at ranks 1 and 2, indexed by type id.

    Index 0 belongs to the universal type and must be zero at both ranks.
    Rank-1 counts play the role of minimum quotas, rank-2 counts the role of
    maximum quotas; both are soft goals, never feasibility constraints.
    """

    rank1: tuple[int, ...]
    rank2: tuple[int, ...]

    @property
    def n_types(self) -> int:
        """Number of type slots, universal type included."""
        return len(self.rank1)

    def quota(self, type_id: TypeId, rank: int) -> int:
        if rank == 1:
            return self.rank1[type_id]
        if rank == 2:
            return self.rank2[type_id]
        raise ValueError(f"quota rank must be 1 or 2, got {rank}")

    def scaled(self, factor: int) -> "QuotaTable":
        return QuotaTable(
            tuple(c * factor for c in self.rank1),
            tuple(c * factor for c in self.rank2),
        )


@dataclass(frozen=True)
class Instance:
    """A selection problem: students, priority order, capacity, and quotas.

    ``priority`` is a permutation of student ids; position 0 is the highest
    priority.  ``acceptable_count`` optionally cuts the priority list: only
    the first ``acceptable_count`` students may be selected (``None`` means
    everyone is acceptable, which is the only case the experiments exercise).
    ``scores`` carries the raw priority scores when the instance came from a
    generator; it is informational and listed in student-id order.
    """

    students: tuple[Student, ...]
    priority: tuple[StudentId, ...]
    capacity: int
    quotas: QuotaTable
    acceptable_count: int | None = None
    type_names: tuple[str, ...] | None = None
    scores: tuple[float, ...] | None = None

    @property
    def n_students(self) -> int:
        return len(self.students)

    @property
    def n_types(self) -> int:
        return self.quotas.n_types

    @cached_property
    def _rank_of(self) -> dict[StudentId, int]:
        # Inverse priority map; the algorithms repeatedly need O(1) lookups.
        return {sid: pos for pos, sid in enumerate(self.priority)}

    def priority_position(self, sid: StudentId) -> int:
        """0-based position of a student in the priority order."""
        return self._rank_of[sid]

    def student_at(self, position: int) -> StudentId:
        return self.priority[position]

    @property
    def acceptable(self) -> tuple[StudentId, ...]:
        """Acceptable students, highest priority first."""
        if self.acceptable_count is None:
            return self.priority
        return self.priority[: self.acceptable_count]

    def is_acceptable(self, sid: StudentId) -> bool:
        if self.acceptable_count is None:
            return True
        return self._rank_of[sid] < self.acceptable_count

    def student(self, sid: StudentId) -> Student:
        return self.students[sid]

    def type_name(self, type_id: TypeId) -> str:
        if type_id == UNIVERSAL_TYPE:
            return "t0"
        if self.type_names is not None:
            return self.type_names[type_id - 1]
        return f"t{type_id}"


def validate(instance: Instance) -> list[str]:
    """Check the structural invariants of an instance.

    Returns a list of human-readable violations; an empty list means the
    instance is well formed.  Nothing is raised so callers can report all
    problems at once.
    """
    errors: list[str] = []
    n = instance.n_students

    if instance.capacity < 1:
        errors.append(f"capacity: must be >= 1, got {instance.capacity}")

    ids = [s.id for s in instance.students]
    if ids != list(range(n)):
        errors.append("students: ids must be the dense ordinals 0..n-1 in order")

    if sorted(instance.priority) != list(range(n)):
        errors.append("priority: not a permutation of the student ids")

    quotas = instance.quotas
    if len(quotas.rank1) != len(quotas.rank2):
        errors.append("quotas: rank1 and rank2 must have equal length")
    else:
        if quotas.n_types < 1:
            errors.append("quotas: must cover at least the universal type")
        elif quotas.rank1[UNIVERSAL_TYPE] != 0 or quotas.rank2[UNIVERSAL_TYPE] != 0:
            errors.append("quotas: universal type must have zero quota at both ranks")
        for rank, counts in ((1, quotas.rank1), (2, quotas.rank2)):
            for t, c in enumerate(counts):
                if not isinstance(c, int) or c < 0:
                    errors.append(f"quotas: rank-{rank} count for type {t} must be a non-negative integer")

    declared = set(range(1, quotas.n_types))
    for s in instance.students:
        extra = s.types - declared
        if extra:
            errors.append(f"student {s.id}: undeclared types {sorted(extra)}")
        if UNIVERSAL_TYPE in s.types:
            errors.append(f"student {s.id}: universal type must not be listed explicitly")

    if instance.acceptable_count is not None and not 0 <= instance.acceptable_count <= n:
        errors.append(f"acceptable_count: must be in [0, {n}], got {instance.acceptable_count}")

    if instance.type_names is not None and len(instance.type_names) != quotas.n_types - 1:
        errors.append("type_names: must name every non-universal type")

    if instance.scores is not None and len(instance.scores) != n:
        errors.append("scores: must have one entry per student")

    return errors


def total_reserves(instance: Instance) -> int:
    """Total number of reserved seats across both ranks (the universal type
    contributes nothing)."""
    return sum(instance.quotas.rank1) + sum(instance.quotas.rank2)


class InstanceFormatError(ValueError):
    """Raised when an instance document cannot be parsed."""


def _require(doc: dict[str, Any], key: str, kind: type) -> Any:
    if key not in doc:
        raise InstanceFormatError(f"missing field {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise InstanceFormatError(f"field {key!r} must be {kind.__name__}")
    return value


def parse_instance(text: str) -> Instance:
    """Parse the JSON instance format.

    Document fields: ``capacity`` (int), ``types`` (list of names for the
    real types; type id k names ``types[k-1]``), ``quotas`` (object with
    ``rank1``/``rank2`` integer arrays parallel to ``types``), ``students``
    (array of type-id lists, array order = priority order), and optionally
    ``scores`` (floats, priority order) and ``acceptable`` (int cutoff).
    Students are re-identified as 0..n-1 in priority order.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError("document must be a JSON object")

    capacity = _require(doc, "capacity", int)
    names = _require(doc, "types", list)
    quotas_doc = _require(doc, "quotas", dict)
    students_doc = _require(doc, "students", list)

    n_real = len(names)
    rank1 = quotas_doc.get("rank1")
    rank2 = quotas_doc.get("rank2")
    if not isinstance(rank1, list) or not isinstance(rank2, list):
        raise InstanceFormatError("quotas must contain rank1 and rank2 arrays")
    if len(rank1) != n_real or len(rank2) != n_real:
        raise InstanceFormatError("quota arrays must be parallel to the types array")
    if not all(isinstance(c, int) and c >= 0 for c in rank1 + rank2):
        raise InstanceFormatError("quota entries must be non-negative integers")

    students = []
    for i, entry in enumerate(students_doc):
        if not isinstance(entry, list):
            raise InstanceFormatError(f"students[{i}] must be a list of type ids")
        for t in entry:
            if not isinstance(t, int) or not 1 <= t <= n_real:
                raise InstanceFormatError(f"students[{i}]: type id {t!r} out of range")
        students.append(Student(i, frozenset(entry)))

    scores = None
    if "scores" in doc:
        raw = doc["scores"]
        if not isinstance(raw, list) or len(raw) != len(students):
            raise InstanceFormatError("scores must be a list with one entry per student")
        scores = tuple(float(x) for x in raw)

    acceptable = doc.get("acceptable")
    if acceptable is not None and not isinstance(acceptable, int):
        raise InstanceFormatError("acceptable must be an integer cutoff")

    return Instance(
        students=tuple(students),
        priority=tuple(range(len(students))),
        capacity=capacity,
        quotas=QuotaTable((0, *rank1), (0, *rank2)),
        acceptable_count=acceptable,
        type_names=tuple(str(x) for x in names),
        scores=scores,
    )


def serialize_instance(instance: Instance) -> str:
    """Render an instance in the JSON format accepted by ``parse_instance``.

    Students are written in priority order, so parsing the output of this
    function reproduces the instance exactly when its ids already follow the
    priority order (which holds for everything the generators emit), and an
    equivalent relabeled instance otherwise.
    """
    n_real = instance.n_types - 1
    names = [instance.type_name(t) for t in range(1, instance.n_types)]
    doc: dict[str, Any] = {
        "capacity": instance.capacity,
        "types": names,
        "quotas": {
            "rank1": list(instance.quotas.rank1[1:]),
            "rank2": list(instance.quotas.rank2[1:]),
        },
        "students": [
            sorted(instance.student(sid).types) for sid in instance.priority
        ],
    }
    if instance.scores is not None:
        doc["scores"] = [instance.scores[sid] for sid in instance.priority]
    if instance.acceptable_count is not None:
        doc["acceptable"] = instance.acceptable_count
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_instance(path: Any) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


def save_instance(instance: Instance, path: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_instance(instance))
