"""Seeded synthetic applicant pools.

Pools mimic a standardized-test admission setting: three overlapping
disadvantage types drawn with conditional probabilities, test scores from a
truncated normal whose mean drops with the types held (harmonically
discounted so overlaps do not stack linearly), quotas proportional to the
selection capacity, and a priority order by descending score.

Streams are consumed in a fixed order (all type draws, then all score
draws), so one integer seed pins an instance bit for bit.  Cells of an
experiment derive independent seeds via ``numpy.random.SeedSequence`` spawn
keys; see :mod:`reservematch.experiment`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .model import Instance, QuotaTable, Student, validate

DEFAULT_TYPE_NAMES = ("minority", "low_parent_edu", "low_income")

# Membership model: type 1 is unconditional; type 2 depends on type 1;
# type 3 depends on how many of the first two are held.
P_TYPE1 = 0.39
P_TYPE2_GIVEN_T1 = 0.64
P_TYPE2_OTHERWISE = 0.30
P_TYPE3_GIVEN_BOTH = 0.30
P_TYPE3_GIVEN_ONE = 0.26
P_TYPE3_GIVEN_NONE = 0.10

# Quota fractions of the capacity per (type, rank); scaled by the reserve
# factor and rounded half-up.  Summing to 0.65 means the baseline setting
# reserves 65% of the capacity across both ranks.
BASE_QUOTA_FRACTIONS: tuple[tuple[Fraction, Fraction], ...] = (
    (Fraction(15, 100), Fraction(20, 100)),
    (Fraction(10, 100), Fraction(10, 100)),
    (Fraction(5, 100), Fraction(5, 100)),
)


@dataclass(frozen=True)
class ScoreModel:
    """Truncated-normal score distribution with per-type mean penalties."""

    base_mean: float = 1135.0
    sd: float = 211.0
    lower: float = 0.0
    upper: float = 1600.0
    penalties: tuple[int, ...] = (172, 171, 86)


DEFAULT_SCORE_MODEL = ScoreModel()


@dataclass(frozen=True)
class SatGenConfig:
    """Parameters for one generated applicant pool."""

    capacity: int
    seed: int
    n_students: int = 100
    psi_factor: float | int | str | Fraction = 1

    def check(self) -> None:
        if self.n_students < 1:
            raise ValueError("n_students must be >= 1")
        if not 1 <= self.capacity <= self.n_students:
            raise ValueError("capacity must be in [1, n_students]")
        if _as_fraction(self.psi_factor) <= 0:
            raise ValueError("psi_factor must be positive")


def _as_rng(seed: int | np.random.Generator | np.random.SeedSequence) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _as_fraction(value: float | int | str | Fraction) -> Fraction:
    # Floats go through their decimal repr so 2.3077 means exactly 2.3077.
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


def gen_types(seed: int | np.random.Generator, n: int) -> list[frozenset[int]]:
    """Draw type sets for ``n`` students per the conditional model."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _as_rng(seed)
    u = rng.random((n, 3))
    t1 = u[:, 0] < P_TYPE1
    t2 = u[:, 1] < np.where(t1, P_TYPE2_GIVEN_T1, P_TYPE2_OTHERWISE)
    p3 = np.where(
        t1 & t2,
        P_TYPE3_GIVEN_BOTH,
        np.where(t1 ^ t2, P_TYPE3_GIVEN_ONE, P_TYPE3_GIVEN_NONE),
    )
    t3 = u[:, 2] < p3
    out = []
    for a, b, c in zip(t1, t2, t3):
        types = set()
        if a:
            types.add(1)
        if b:
            types.add(2)
        if c:
            types.add(3)
        out.append(frozenset(types))
    return out


def score_mean(types: frozenset[int], model: ScoreModel = DEFAULT_SCORE_MODEL) -> float:
    """Expected (pre-truncation) score: each held type's penalty is divided
    by its 1-based position among the held types, heaviest penalty first,
    and rounded up."""
    held = [model.penalties[t - 1] for t in (1, 2, 3) if t in types]
    reduction = sum(math.ceil(Fraction(p, k)) for k, p in enumerate(held, start=1))
    return model.base_mean - reduction


def gen_scores(
    seed: int | np.random.Generator,
    type_sets: Sequence[frozenset[int]],
    model: ScoreModel = DEFAULT_SCORE_MODEL,
) -> np.ndarray:
    """Truncated-normal scores, one per type set.

    Sampling rejects draws outside the domain and redraws; at the default
    parameters the acceptance rate is essentially one, and the sample mean
    stays within a point of the analytic truncated mean.
    """
    rng = _as_rng(seed)
    means = np.array([score_mean(ts, model) for ts in type_sets], dtype=float)
    scores = rng.normal(means, model.sd)
    bad = (scores < model.lower) | (scores > model.upper)
    while bad.any():
        scores[bad] = rng.normal(means[bad], model.sd)
        bad = (scores < model.lower) | (scores > model.upper)
    return scores


def gen_score(
    seed: int | np.random.Generator,
    types: frozenset[int],
    model: ScoreModel = DEFAULT_SCORE_MODEL,
) -> float:
    """Single-score convenience wrapper around :func:`gen_scores`."""
    return float(gen_scores(seed, [types], model)[0])


def gen_quotas(capacity: int, psi_factor: float | int | str | Fraction = 1) -> QuotaTable:
    """Quota table proportional to the capacity.

    Each baseline fraction is scaled by ``psi_factor`` and by the capacity,
    then rounded half-up (so a 0.05 share of capacity 30 yields 2 seats).
    The arithmetic is exact, decimal factors like 2.3077 included.
    """
    if capacity < 1:
        raise ValueError("capacity must be >= 1")
    factor = _as_fraction(psi_factor)
    if factor <= 0:
        raise ValueError("psi_factor must be positive")
    half = Fraction(1, 2)
    rank1 = [0]
    rank2 = [0]
    for f1, f2 in BASE_QUOTA_FRACTIONS:
        rank1.append(math.floor(f1 * factor * capacity + half))
        rank2.append(math.floor(f2 * factor * capacity + half))
    return QuotaTable(tuple(rank1), tuple(rank2))


def gen_instance(config: SatGenConfig, model: ScoreModel = DEFAULT_SCORE_MODEL) -> Instance:
    """Assemble a full instance from a config.

    Students are relabeled so ids follow the priority order (descending
    score, generation index breaking the measure-zero ties), which is also
    the order used by the instance file format.
    """
    config.check()
    rng = _as_rng(config.seed)
    n = config.n_students
    type_sets = gen_types(rng, n)
    scores = gen_scores(rng, type_sets, model)
    order = np.lexsort((np.arange(n), -scores))
    students = tuple(Student(i, type_sets[j]) for i, j in enumerate(order))
    instance = Instance(
        students=students,
        priority=tuple(range(n)),
        capacity=config.capacity,
        quotas=gen_quotas(config.capacity, config.psi_factor),
        type_names=DEFAULT_TYPE_NAMES,
        scores=tuple(float(scores[j]) for j in order),
    )
    problems = validate(instance)
    if problems:
        raise AssertionError(f"generated instance failed validation: {problems}")
    return instance
