import random

import pytest

from reservematch import Instance, QuotaTable, Student
from reservematch.model import UNIVERSAL_TYPE


def make_example() -> Instance:
    """The six-student worked instance used across the golden tests.

    Students 0..5 in priority order; capacity 3; one rank-1 seat each for
    types 1 and 2, one rank-2 seat each for types 3 and 4.
    """
    return Instance(
        students=(
            Student(0, frozenset()),
            Student(1, frozenset({4})),
            Student(2, frozenset({3})),
            Student(3, frozenset({1, 2, 3})),
            Student(4, frozenset({1})),
            Student(5, frozenset({2, 3})),
        ),
        priority=(0, 1, 2, 3, 4, 5),
        capacity=3,
        quotas=QuotaTable((0, 1, 1, 0, 0), (0, 0, 0, 1, 1)),
        type_names=("t1", "t2", "t3", "t4"),
    )


@pytest.fixture
def example() -> Instance:
    return make_example()


def random_instance(rnd: random.Random, *, max_students: int = 12, max_types: int = 4,
                    max_quota: int = 3, max_capacity: int = 6) -> Instance:
    """Random instance for algorithm property tests (no oracle bounds)."""
    n = rnd.randint(1, max_students)
    m = rnd.randint(1, max_types)
    capacity = rnd.randint(1, max_capacity)
    students = tuple(
        Student(i, frozenset(t for t in range(1, m + 1) if rnd.random() < 0.5))
        for i in range(n)
    )
    priority = list(range(n))
    rnd.shuffle(priority)
    return Instance(
        students=students,
        priority=tuple(priority),
        capacity=capacity,
        quotas=QuotaTable(
            (0, *(rnd.randint(0, max_quota) for _ in range(m))),
            (0, *(rnd.randint(0, max_quota) for _ in range(m))),
        ),
    )


def check_outcome(instance: Instance, outcome) -> None:
    """Assert the structural invariants every selection rule must satisfy."""
    target = min(instance.capacity, len(instance.acceptable))
    assert len(outcome.selected) == target
    assert len(set(outcome.selected)) == len(outcome.selected)
    assert all(instance.is_acceptable(sid) for sid in outcome.selected)
    assert outcome.matching.students() == set(outcome.selected)
    assert len(outcome.matching) <= instance.capacity

    seats = [seat for _, seat in outcome.matching.pairs]
    assert len(set(seats)) == len(seats), "a seat is used twice"
    for sid, seat in outcome.matching.pairs:
        if seat.type == UNIVERSAL_TYPE:
            assert seat.rank == 3
            assert 0 <= seat.index < instance.capacity
        else:
            assert seat.rank in (1, 2)
            assert seat.type in instance.student(sid).types
            assert 0 <= seat.index < instance.quotas.quota(seat.type, seat.rank)
